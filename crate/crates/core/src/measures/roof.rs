//! Randomized convex-roof search.
//!
//! Any decomposition `ρ = Σ_j |ψ_j⟩⟨ψ_j|` (subnormalized) can be written as
//! `ψ_j = Σ_i U_ji √λ_i |v_i⟩` with `U` a `k x r` isometry over the spectral
//! decomposition. We sample `U` from Haar unitaries and descend by mixing pairs
//! of rows. The result is the cost of an actual decomposition, so it is always
//! an upper bound on the roof.

use std::f64::consts::PI;

use rand::Rng;

use crate::matcore::{hermitian_eig, ComplexMatrix, C64, ZERO};
use crate::rng::rng_from_seed;
use crate::states::random_unitary;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoofOptions {
    /// Random restarts after the spectral starting point.
    pub restarts: usize,
    /// Refinement sweeps over all row pairs per restart.
    pub sweeps: usize,
    /// Cap on the number of decomposition elements (never above `rank²`).
    pub max_terms: usize,
    pub seed: u64,
}

impl Default for RoofOptions {
    fn default() -> Self {
        RoofOptions { restarts: 200, sweeps: 12, max_terms: 16, seed: 0x5EED }
    }
}

impl RoofOptions {
    /// Small budget used in batch harnesses where the bound only certifies inequalities.
    pub fn quick(seed: u64) -> Self {
        RoofOptions { restarts: 3, sweeps: 4, max_terms: 8, seed }
    }
}

struct Decomposition<'a> {
    // rows of U, each of length r
    rows: Vec<Vec<C64>>,
    weighted: &'a [Vec<C64>],
    costs: Vec<f64>,
}

impl<'a> Decomposition<'a> {
    fn term(&self, row: &[C64]) -> Vec<C64> {
        let n = self.weighted[0].len();
        let mut psi = vec![ZERO; n];
        for (u, w) in row.iter().zip(self.weighted) {
            if *u == ZERO {
                continue;
            }
            for (p, x) in psi.iter_mut().zip(w) {
                *p += u * x;
            }
        }
        psi
    }

    fn cost_of(&self, row: &[C64], cost: &dyn Fn(&[C64]) -> f64) -> f64 {
        let psi = self.term(row);
        let p: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if p <= 1e-15 {
            return 0.0;
        }
        let norm = p.sqrt();
        let unit: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        p * cost(&unit)
    }

    fn total(&self) -> f64 {
        self.costs.iter().sum()
    }
}

/// Upper bound on `min Σ p_j E(ψ_j)` over pure decompositions of `rho`.
pub fn convex_roof_upper_bound(rho: &ComplexMatrix, cost: &dyn Fn(&[C64]) -> f64, opts: &RoofOptions) -> f64 {
    let eig = hermitian_eig(rho).expect("density matrix is square");
    let weighted: Vec<Vec<C64>> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 1e-13)
        .map(|(k, &l)| eig.vectors.column(k).into_iter().map(|z| z * l.sqrt()).collect())
        .collect();
    let r = weighted.len();
    if r == 0 {
        return 0.0;
    }
    let k = (r * r).min(opts.max_terms.max(r));
    let mut rng = rng_from_seed(opts.seed);

    let spectral: Vec<Vec<C64>> =
        (0..k).map(|j| (0..r).map(|i| if i == j { C64::new(1.0, 0.0) } else { ZERO }).collect()).collect();
    let mut best = f64::INFINITY;
    for restart in 0..=opts.restarts {
        let rows = if restart == 0 {
            spectral.clone()
        } else {
            let u = random_unitary(k, &mut rng);
            (0..k).map(|j| (0..r).map(|i| u[(j, i)]).collect()).collect()
        };
        let mut dec = Decomposition { rows, weighted: &weighted, costs: Vec::new() };
        dec.costs = dec.rows.iter().map(|row| dec.cost_of(row, cost)).collect();
        refine(&mut dec, cost, opts.sweeps, &mut rng);
        best = best.min(dec.total());
    }
    best.max(0.0)
}

fn refine<R: Rng>(dec: &mut Decomposition<'_>, cost: &dyn Fn(&[C64]) -> f64, sweeps: usize, rng: &mut R) {
    let k = dec.rows.len();
    if k < 2 {
        return;
    }
    let mut step: f64 = 0.6;
    for _ in 0..sweeps {
        let mut improved = false;
        for a in 0..k {
            for b in (a + 1)..k {
                let theta = rng.random_range(-step..step);
                let phi = rng.random_range(0.0..2.0 * PI);
                let (c, s) = (theta.cos(), theta.sin());
                let e = C64::from_polar(s, phi);
                let ra: Vec<C64> = dec.rows[a].iter().zip(&dec.rows[b]).map(|(x, y)| x * c + y * e).collect();
                let rb: Vec<C64> = dec.rows[a].iter().zip(&dec.rows[b]).map(|(x, y)| -x * e.conj() + y * c).collect();
                let ca = dec.cost_of(&ra, cost);
                let cb = dec.cost_of(&rb, cost);
                if ca + cb < dec.costs[a] + dec.costs[b] - 1e-15 {
                    dec.rows[a] = ra;
                    dec.rows[b] = rb;
                    dec.costs[a] = ca;
                    dec.costs[b] = cb;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
}
