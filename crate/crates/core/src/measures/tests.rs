use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::Rng;

use super::*;
use crate::channels::depolarize;
use crate::matcore::{hermitian_eigenvalues, kron, partial_trace, relative_entropy, ComplexMatrix, C64};
use crate::rng::rng_from_seed;
use crate::states::{
    mcs_from_amplitudes, random_coherent_amplitudes, random_density, random_pure, standard_state, validate_density,
    CoherentAmplitudes, DensityMatrix,
};

fn bin_h(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

fn noisy_qubit(alpha: f64, p: f64) -> DensityMatrix {
    let beta = (1.0 - alpha * alpha).sqrt();
    let psi = [C64::new(alpha, 0.0), C64::new(beta, 0.0)];
    depolarize(&DensityMatrix::from_pure(&psi, &[2]).unwrap(), p).unwrap()
}

fn noisy_ghz(alpha: f64, p: f64) -> DensityMatrix {
    let beta = (1.0 - alpha * alpha).sqrt();
    let a = CoherentAmplitudes::from_real(&[alpha, beta]).unwrap();
    depolarize(&mcs_from_amplitudes(&a, 3).unwrap(), p).unwrap()
}

fn cut(left: &[usize], n: usize) -> Bipartition {
    Bipartition::new(left, n).unwrap()
}

/// Entropy of the reduced state computed from the eigenvalues of an independent partial trace.
fn reduced_entropy_oracle(rho: &DensityMatrix, keep: &[usize]) -> f64 {
    let red = partial_trace(rho.matrix(), rho.dims(), keep).unwrap();
    hermitian_eigenvalues(&red).unwrap().into_iter().filter(|&l| l > 1e-14).map(|l| -l * l.log2()).sum()
}

#[test]
fn bipartition_enumeration_and_parsing() {
    let cuts = Bipartition::all(3);
    assert_eq!(cuts.len(), 3);
    assert_eq!(Bipartition::all(4).len(), 7);
    assert_eq!(cuts[0].to_string(), "A|BC");
    let c = parse_cut("A|BC", 3).unwrap();
    assert_eq!(c.left(), &[0]);
    assert_eq!(parse_cut("0,2|1", 3).unwrap().left(), &[0, 2]);
    assert_eq!(parse_cut("BC|A", 3).unwrap().left(), &[1, 2]);
    assert!(parse_cut("A|B", 3).is_err());
    assert!(parse_cut("ABC", 3).is_err());
    assert!(Bipartition::new(&[0, 1, 2], 3).is_err());
    assert!(Bipartition::new(&[], 3).is_err());
}

#[test]
fn distillable_coherence_examples() {
    let psi2 = standard_state("max_coherent", &[2]).unwrap();
    assert_abs_diff_eq!(c_d(&psi2).value, 1.0, epsilon = 1e-12);
    let diag = validate_density(ComplexMatrix::from_real_diagonal(&[0.2, 0.3, 0.5]), &[3]).unwrap();
    assert_abs_diff_eq!(c_d(&diag).value, 0.0, epsilon = 1e-12);

    let r = c_d(&noisy_qubit(std::f64::consts::FRAC_1_SQRT_2, 0.2));
    let closed = bin_h(0.5) - bin_h(0.1);
    assert_abs_diff_eq!(r.value, closed, epsilon = 1e-12);
    assert_abs_diff_eq!(closed, 0.531004, epsilon = 1e-6);
    assert_eq!(r.kind, MeasureKind::Exact);
}

#[test]
fn coherence_of_formation_examples() {
    let psi2 = standard_state("max_coherent", &[2]).unwrap();
    let r = c_f(&psi2);
    assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
    assert_eq!(r.kind, MeasureKind::Exact);

    let diag = validate_density(ComplexMatrix::from_real_diagonal(&[0.3, 0.7]), &[2]).unwrap();
    assert_abs_diff_eq!(c_f(&diag).value, 0.0, epsilon = 1e-12);

    let noisy = noisy_qubit(std::f64::consts::FRAC_1_SQRT_2, 0.2);
    let r = c_f(&noisy);
    assert_eq!(r.kind, MeasureKind::ClosedForm);
    assert_abs_diff_eq!(r.value, bin_h(0.8), epsilon = 1e-12);
    assert_abs_diff_eq!(r.value, 0.721928, epsilon = 1e-6);
    // the decomposition search is an independent route to the same roof
    let cost = |psi: &[C64]| {
        let p: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
        crate::matcore::shannon_entropy(&p)
    };
    let opts = RoofOptions { restarts: 40, ..Default::default() };
    let search = convex_roof_upper_bound(noisy.matrix(), &cost, &opts);
    assert!(search >= r.value - 1e-9 && search - r.value < 5e-3, "{search}");
}

#[test]
fn coherence_of_formation_qutrit_is_heuristic_bound() {
    let mut rng = rng_from_seed(4);
    let rho = random_density(3, 3, &mut rng).unwrap();
    let opts = RoofOptions { restarts: 5, ..Default::default() };
    let r = c_f_with(&rho, &opts);
    assert_eq!(r.kind, MeasureKind::HeuristicUpperBound);
    // C_f ≥ C_d always, so a valid upper bound must sit above it
    assert!(r.value >= c_d(&rho).value - 1e-9);
}

#[test]
fn concurrence_examples() {
    let bell = standard_state("bell", &[]).unwrap();
    assert_abs_diff_eq!(concurrence(&bell).unwrap(), 1.0, epsilon = 1e-10);
    let diag = validate_density(ComplexMatrix::from_real_diagonal(&[0.1, 0.2, 0.3, 0.4]), &[2, 2]).unwrap();
    assert_abs_diff_eq!(concurrence(&diag).unwrap(), 0.0, epsilon = 1e-12);
    let w = standard_state("w3", &[]).unwrap();
    for pair in [[0, 1], [0, 2], [1, 2]] {
        assert_abs_diff_eq!(concurrence(&w.reduce(&pair).unwrap()).unwrap(), 2.0 / 3.0, epsilon = 1e-10);
    }
    assert!(concurrence(&standard_state("ghz", &[3]).unwrap()).is_err());
}

/// X-state closed form `2 max(0, |ρ03| - sqrt(ρ11 ρ22), |ρ12| - sqrt(ρ00 ρ33))`.
fn x_state_concurrence(m: &ComplexMatrix) -> f64 {
    let a = m[(0, 3)].norm() - (m[(1, 1)].re * m[(2, 2)].re).sqrt();
    let b = m[(1, 2)].norm() - (m[(0, 0)].re * m[(3, 3)].re).sqrt();
    2.0 * a.max(b).max(0.0)
}

#[test]
fn concurrence_matches_x_state_oracle() {
    let mut rng = rng_from_seed(21);
    for _ in 0..50 {
        let mut w: Vec<f64> = (0..4).map(|_| rng.random_range(0.05..1.0)).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        let mut m = ComplexMatrix::from_real_diagonal(&w);
        let z = C64::from_polar(
            rng.random_range(0.0..1.0) * (w[0] * w[3]).sqrt(),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        let y = C64::from_polar(
            rng.random_range(0.0..1.0) * (w[1] * w[2]).sqrt(),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        m[(0, 3)] = z;
        m[(3, 0)] = z.conj();
        m[(1, 2)] = y;
        m[(2, 1)] = y.conj();
        let rho = validate_density(m.clone(), &[2, 2]).unwrap();
        assert_abs_diff_eq!(concurrence(&rho).unwrap(), x_state_concurrence(&m), epsilon = 1e-9);
    }
}

#[test]
fn formation_entanglement_examples() {
    let bell = standard_state("bell", &[]).unwrap();
    assert_abs_diff_eq!(e_f(&bell, &cut(&[0], 2)).unwrap().value, 1.0, epsilon = 1e-10);
    let diag = validate_density(ComplexMatrix::from_real_diagonal(&[0.1, 0.2, 0.3, 0.4]), &[2, 2]).unwrap();
    assert_abs_diff_eq!(e_f(&diag, &cut(&[0], 2)).unwrap().value, 0.0, epsilon = 1e-12);

    let mcs = mcs_from_amplitudes(&CoherentAmplitudes::from_real(&[0.8, 0.6]).unwrap(), 3).unwrap();
    for c in Bipartition::all(3) {
        let r = e_f(&mcs, &c).unwrap();
        assert_eq!(r.kind, MeasureKind::Exact);
        assert_abs_diff_eq!(r.value, reduced_entropy_oracle(&mcs, c.left()), epsilon = 1e-10);
        assert_abs_diff_eq!(r.value, 0.942683, epsilon = 1e-6);
    }
}

#[test]
fn formation_entanglement_of_mixed_mcs_uses_amplitude_state() {
    let mut rng = rng_from_seed(8);
    let amp = random_density(2, 2, &mut rng).unwrap();
    let mcs = crate::states::mcs_from_matrix(&amp, 3).unwrap();
    let r = e_f(&mcs, &cut(&[0, 2], 3)).unwrap();
    assert_eq!(r.kind, MeasureKind::ClosedForm);
    assert_abs_diff_eq!(r.value, c_f(&amp).value, epsilon = 1e-12);
}

#[test]
fn distillable_entanglement_examples() {
    let ghz = standard_state("ghz", &[3]).unwrap();
    let r = e_d(&ghz, &cut(&[0], 3)).unwrap();
    assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);
    assert_eq!(r.kind, MeasureKind::Exact);

    let diag = validate_density(ComplexMatrix::from_real_diagonal(&[0.1, 0.2, 0.3, 0.4]), &[2, 2]).unwrap();
    let r = e_d(&diag, &cut(&[0], 2)).unwrap();
    assert_eq!((r.value, r.kind), (0.0, MeasureKind::Exact));

    let noisy = noisy_ghz(std::f64::consts::FRAC_1_SQRT_2, 0.1);
    let r = e_d(&noisy, &cut(&[0], 3)).unwrap();
    assert_eq!(r.kind, MeasureKind::UpperBound);
    let zeta: f64 = (8.0 * 0.9 * 0.5 - 0.1f64).max(0.0);
    assert_abs_diff_eq!(zeta, 3.5, epsilon = 1e-12);
    assert_abs_diff_eq!(r.value, (1.0 + zeta / 4.0).log2(), epsilon = 1e-10);
    assert_abs_diff_eq!(r.value, 0.906891, epsilon = 1e-6);
}

#[test]
fn log_negativity_examples() {
    let bell = standard_state("bell", &[]).unwrap();
    assert_abs_diff_eq!(log_negativity(&bell, &cut(&[0], 2)).unwrap(), 1.0, epsilon = 1e-10);
    let mut rng = rng_from_seed(2);
    let a = random_density(2, 2, &mut rng).unwrap();
    let b = random_density(3, 2, &mut rng).unwrap();
    let prod = validate_density(kron(a.matrix(), b.matrix()), &[2, 3]).unwrap();
    assert_abs_diff_eq!(log_negativity(&prod, &cut(&[0], 2)).unwrap(), 0.0, epsilon = 1e-10);

    let mcs = mcs_from_amplitudes(&CoherentAmplitudes::from_real(&[0.8, 0.6]).unwrap(), 2).unwrap();
    // partial transpose: diag (0.64, 0.36) plus a ±0.48 block
    let oracle = (0.64f64 + 0.36 + 2.0 * 0.48).log2();
    assert_abs_diff_eq!(log_negativity(&mcs, &cut(&[0], 2)).unwrap(), oracle, epsilon = 1e-10);
    assert_abs_diff_eq!(oracle, 0.970854, epsilon = 1e-6);
}

#[test]
fn chen_lower_bound_examples() {
    let bell = standard_state("bell", &[]).unwrap();
    assert_abs_diff_eq!(e_f_lower_bound(&bell, &cut(&[0], 2)).unwrap(), 1.0, epsilon = 1e-10);
    let sep = validate_density(ComplexMatrix::from_real_diagonal(&[0.25; 4]), &[2, 2]).unwrap();
    assert_abs_diff_eq!(e_f_lower_bound(&sep, &cut(&[0], 2)).unwrap(), 0.0, epsilon = 1e-12);

    let noisy = noisy_ghz(std::f64::consts::FRAC_1_SQRT_2, 0.2);
    let pt = crate::matcore::partial_transpose(noisy.matrix(), noisy.dims(), 0).unwrap();
    let omega: f64 = hermitian_eigenvalues(&pt).unwrap().iter().map(|v| v.abs()).sum();
    let want = bin_h((omega.sqrt() + (2.0 - omega).sqrt()).powi(2) / 4.0);
    assert_abs_diff_eq!(e_f_lower_bound(&noisy, &cut(&[0], 3)).unwrap(), want, epsilon = 1e-10);

    let qutrits = crate::states::DensityMatrix::maximally_mixed(&[3, 3]);
    assert!(matches!(e_f_lower_bound(&qutrits, &cut(&[0], 2)), Err(Error::Dimension(_))));
}

#[test]
fn gme_pure_examples() {
    let (ghz, dims) = crate::states::StandardState::Ghz { n: 3 }.vector().unwrap();
    let (r, _) = e_gme_pure(&ghz, &dims, GmeBase::Formation).unwrap();
    assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let zero_bell = crate::matcore::kron_vec(
        &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        &[C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)],
    );
    let (r, c) = e_gme_pure(&zero_bell, &[2, 2, 2], GmeBase::Distillable).unwrap();
    assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-10);
    assert_eq!(c.left(), &[0]);

    let a = CoherentAmplitudes::from_real(&[0.8, 0.6]).unwrap();
    let v = crate::states::mcs_vector(&a, 3);
    let (r, _) = e_gme_pure(&v, &[2, 2, 2], GmeBase::Formation).unwrap();
    let rho = mcs_from_amplitudes(&a, 3).unwrap();
    let oracle =
        Bipartition::all(3).iter().map(|c| reduced_entropy_oracle(&rho, c.left())).fold(f64::INFINITY, f64::min);
    assert_abs_diff_eq!(r.value, oracle, epsilon = 1e-10);

    assert!(matches!(
        e_gme_pure(&[C64::new(2.0, 0.0); 8], &[2, 2, 2], GmeBase::Formation),
        Err(Error::Normalization { .. })
    ));
}

#[test]
fn mcs_multipartite_examples() {
    let ghz = standard_state("ghz", &[3]).unwrap();
    assert_abs_diff_eq!(e_r_m_mcs(&ghz).unwrap().value, 1.0, epsilon = 1e-10);
    assert_abs_diff_eq!(e_f_gme_mcs(&ghz).unwrap().value, 1.0, epsilon = 1e-10);

    let inc = mcs_from_amplitudes(&CoherentAmplitudes::from_real(&[1.0, 0.0]).unwrap(), 3).unwrap();
    assert_abs_diff_eq!(e_r_m_mcs(&inc).unwrap().value, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(e_f_gme_mcs(&inc).unwrap().value, 0.0, epsilon = 1e-12);

    let a = CoherentAmplitudes::from_real(&[0.8, 0.6]).unwrap();
    let m = mcs_from_amplitudes(&a, 3).unwrap();
    assert_abs_diff_eq!(e_r_m_mcs(&m).unwrap().value, bin_h(0.64), epsilon = 1e-10);
    let x = 2.0f64 * 0.48;
    assert_abs_diff_eq!(e_f_gme_mcs(&m).unwrap().value, bin_h((1.0 + (1.0 - x * x).sqrt()) / 2.0), epsilon = 1e-10);

    assert!(matches!(e_r_m_mcs(&standard_state("w3", &[]).unwrap()), Err(Error::NotMcs(_))));
}

/// Direct numerical minimization of S(ρ‖χ) over two-qubit states incoherent on party 0.
fn qi_minimization_oracle(rho: &DensityMatrix, seed: u64) -> f64 {
    let mut rng = rng_from_seed(seed);
    // χ = Σ_a q_a |a⟩⟨a| ⊗ τ_a, τ_a from Bloch vectors
    let build = |q: f64, b0: [f64; 3], b1: [f64; 3]| -> ComplexMatrix {
        let tau = |b: [f64; 3]| {
            ComplexMatrix::from_row_major(
                2,
                2,
                vec![
                    C64::new((1.0 + b[2]) / 2.0, 0.0),
                    C64::new(b[0] / 2.0, -b[1] / 2.0),
                    C64::new(b[0] / 2.0, b[1] / 2.0),
                    C64::new((1.0 - b[2]) / 2.0, 0.0),
                ],
            )
            .unwrap()
        };
        let p0 = ComplexMatrix::from_real_diagonal(&[q, 0.0]);
        let p1 = ComplexMatrix::from_real_diagonal(&[0.0, 1.0 - q]);
        &kron(&p0, &tau(b0)) + &kron(&p1, &tau(b1))
    };
    let shrink = |b: [f64; 3]| {
        let n = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
        if n > 0.999_999 {
            b.map(|x| x * 0.999_999 / n)
        } else {
            b
        }
    };
    let eval = |q: f64, b0: [f64; 3], b1: [f64; 3]| relative_entropy(rho.matrix(), &build(q, b0, b1)).unwrap();
    let mut best = (0.5, [0.0; 3], [0.0; 3]);
    let mut best_val = eval(best.0, best.1, best.2);
    let mut step = 0.5;
    for it in 0..6000 {
        let mut q = (best.0 + rng.random_range(-step..step) * 0.5).clamp(1e-6, 1.0 - 1e-6);
        let mut b0 = best.1;
        let mut b1 = best.2;
        for k in 0..3 {
            b0[k] += rng.random_range(-step..step);
            b1[k] += rng.random_range(-step..step);
        }
        b0 = shrink(b0);
        b1 = shrink(b1);
        if it % 500 == 0 {
            q = rng.random_range(0.01..0.99);
        }
        let v = eval(q, b0, b1);
        if v < best_val {
            best_val = v;
            best = (q, b0, b1);
        } else if it % 200 == 199 {
            step = (step * 0.7).max(1e-4);
        }
    }
    best_val
}

#[test]
fn qi_relative_entropy_examples() {
    let bell = standard_state("bell", &[]).unwrap();
    let r = qi_relative_entropy(&bell, 0).unwrap();
    assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);
    let oracle = qi_minimization_oracle(&bell, 1);
    assert!(oracle >= r.value - 1e-9 && oracle - r.value < 1e-2, "oracle {oracle}");

    let diag = validate_density(ComplexMatrix::from_real_diagonal(&[0.1, 0.2, 0.3, 0.4]), &[2, 2]).unwrap();
    assert_abs_diff_eq!(qi_relative_entropy(&diag, 0).unwrap().value, 0.0, epsilon = 1e-12);

    let ghz = standard_state("ghz", &[3]).unwrap();
    assert_abs_diff_eq!(qi_relative_entropy(&ghz, 0).unwrap().value, 1.0, epsilon = 1e-10);
}

#[test]
fn qi_closed_form_agrees_with_minimization_on_mixed_states() {
    let mut rng = rng_from_seed(77);
    for trial in 0..3 {
        let rho = random_density(4, 3, &mut rng).unwrap().with_dims(&[2, 2]).unwrap();
        let closed = qi_relative_entropy(&rho, 0).unwrap().value;
        let oracle = qi_minimization_oracle(&rho, 100 + trial);
        assert!(oracle >= closed - 1e-9, "minimizer went below closed form: {oracle} < {closed}");
        assert!(oracle - closed < 2e-2, "minimizer {oracle} far above closed form {closed}");
    }
}

#[test]
fn qi_bounds_local_coherence_of_product() {
    // |+⟩|0⟩ with target A: the target already carries one bit
    let plus = standard_state("plus", &[]).unwrap();
    let zero = standard_state("basis", &[2, 0]).unwrap();
    let rho = validate_density(kron(plus.matrix(), zero.matrix()), &[2, 2]).unwrap();
    assert_abs_diff_eq!(qi_relative_entropy(&rho, 0).unwrap().value, 1.0, epsilon = 1e-10);
}

#[test]
fn indicator_examples() {
    let ghz = standard_state("ghz", &[3]).unwrap();
    let med = tau_med(&ghz).unwrap();
    let mef = tau_mef(&ghz).unwrap();
    assert_abs_diff_eq!(med.value, 1.0, epsilon = 1e-10);
    assert_abs_diff_eq!(mef.value, 1.0, epsilon = 1e-10);
    assert_eq!(med.kind, MeasureKind::Exact);
    assert_eq!(mef.kind, MeasureKind::Exact);

    let zero = standard_state("basis", &[8, 0]).unwrap().with_dims(&[2, 2, 2]).unwrap();
    assert_abs_diff_eq!(tau_med(&zero).unwrap().value, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(tau_mef(&zero).unwrap().value, 0.0, epsilon = 1e-12);

    let noisy = noisy_ghz(std::f64::consts::FRAC_1_SQRT_2, 0.2);
    let zeta: f64 = (8.0 * 0.8 * 0.5 - 0.2f64).max(0.0);
    assert_abs_diff_eq!(zeta, 3.0, epsilon = 1e-12);
    let ub = tau_med_ub(&noisy).unwrap();
    assert_abs_diff_eq!(ub.value, (1.0 + zeta / 4.0).log2(), epsilon = 1e-10);
    assert_abs_diff_eq!(ub.value, 0.807355, epsilon = 1e-6);
    assert_eq!(ub.kind, MeasureKind::UpperBound);
    let generic = tau_med(&noisy).unwrap();
    assert_eq!(generic.kind, MeasureKind::UpperBound);
    assert_abs_diff_eq!(generic.value, ub.value, epsilon = 1e-12);

    let lb = tau_mef(&noisy).unwrap();
    assert_eq!(lb.kind, MeasureKind::LowerBound);
    assert_abs_diff_eq!(lb.value, tau_mef_lb(&noisy).unwrap().value, epsilon = 1e-12);

    assert!(tau_med(&standard_state("max_coherent", &[3]).unwrap()).is_err());
}

#[test]
fn w_state_indicator_is_zero() {
    // W: E_f(A|BC) = h(1/3)... and both pairs carry C = 2/3; the residual is not negative
    let w = standard_state("w3", &[]).unwrap();
    let r = tau_mef(&w).unwrap();
    assert_eq!(r.kind, MeasureKind::Exact);
    assert!(r.value >= 0.0);
}

fn random_three_qubit_pure(seed: u64) -> DensityMatrix {
    let v = random_pure(8, &mut rng_from_seed(seed));
    DensityMatrix::from_pure(&v, &[2, 2, 2]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn c_d_vanishes_exactly_on_incoherent_states(seed in any::<u64>(), d in 2usize..5) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(d, d, &mut rng).unwrap();
        let dephased = crate::channels::dephase(&rho, None).unwrap();
        prop_assert!(c_d(&dephased).value.abs() <= 1e-9);
        let is_dephased = rho.matrix().max_abs_diff(dephased.matrix()) <= 1e-9;
        prop_assert_eq!(c_d(&rho).value <= 1e-9, is_dephased);
    }

    #[test]
    fn mcs_saturates_every_cut(seed in any::<u64>(), d in 2usize..5, parties in 2usize..4) {
        let mut rng = rng_from_seed(seed);
        let a = random_coherent_amplitudes(d, &mut rng);
        let m = mcs_from_amplitudes(&a, parties).unwrap();
        let cd_amp = c_d(&a.density()).value;
        let cf_amp = c_f(&a.density()).value;
        prop_assert!((c_d(&m).value - cd_amp).abs() <= 1e-9);
        for c in Bipartition::all(parties) {
            prop_assert!((e_d(&m, &c).unwrap().value - c_d(&m).value).abs() <= 1e-9);
            prop_assert!((e_f(&m, &c).unwrap().value - cf_amp).abs() <= 1e-9);
        }
    }

    #[test]
    fn squared_formation_is_monogamous_on_pure_qubits(seed in any::<u64>()) {
        let rho = random_three_qubit_pure(seed);
        let ef_a = e_f(&rho, &Bipartition::single(0, 3).unwrap()).unwrap().value;
        let pair = |i| e_f(&rho.reduce(&[0, i]).unwrap(), &Bipartition::single(0, 2).unwrap()).unwrap().value;
        let gap_f = ef_a * ef_a - pair(1).powi(2) - pair(2).powi(2);
        prop_assert!(gap_f >= -1e-9, "gap {}", gap_f);
        // pure one-vs-rest E_d equals E_f; pair E_d never exceeds pair E_f
        let ed_a = e_d(&rho, &Bipartition::single(0, 3).unwrap()).unwrap();
        prop_assert!(ed_a.kind.is_exact());
        prop_assert!((ed_a.value - ef_a).abs() <= 1e-9);
    }

    #[test]
    fn qi_dominates_target_coherence_on_mcs(seed in any::<u64>(), d in 2usize..4) {
        let mut rng = rng_from_seed(seed);
        let amp = random_density(d, 1 + (seed as usize) % d, &mut rng).unwrap();
        let m = crate::states::mcs_from_matrix(&amp, 3).unwrap();
        let qi = qi_relative_entropy(&m, 0).unwrap().value;
        prop_assert!(qi >= c_d(&m.reduce(&[0]).unwrap()).value - 1e-9);
    }
}

#[test]
fn coherent_information_examples() {
    let bell = standard_state("bell", &[]).unwrap();
    assert_abs_diff_eq!(coherent_information(&bell, &cut(&[0], 2)).unwrap(), 1.0, epsilon = 1e-10);
    let mixed = DensityMatrix::maximally_mixed(&[2, 2]);
    assert_abs_diff_eq!(coherent_information(&mixed, &cut(&[0], 2)).unwrap(), 0.0, epsilon = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hashing_bound_sits_below_log_negativity(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let rank = 1 + (seed % 4) as usize;
        let rho = random_density(8, rank, &mut rng).unwrap().with_dims(&[2, 2, 2]).unwrap();
        for c in Bipartition::all(3) {
            let lo = coherent_information(&rho, &c).unwrap();
            let hi = log_negativity(&rho, &c).unwrap();
            prop_assert!(lo <= hi + 1e-9, "{} > {}", lo, hi);
        }
    }
}
