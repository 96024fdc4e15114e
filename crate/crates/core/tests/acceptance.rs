//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cohent::dynamics::{self, esd_probability, unit_grid};
use cohent::matcore::C64;
use cohent::measures::{c_d, c_f, e_d, e_f, e_f_gme_mcs, e_r_m_mcs, log_negativity, tau_med, tau_mef, Bipartition};
use cohent::multilevel::{is_product_amplitudes, kraft_decomposable, observation1, plus_minus_family};
use cohent::protocols::{convert, cyclic, licc_step, verify_theorems, OutcomeChoice, VerifyConfig};
use cohent::rng::{rng_from_seed, substream, substream_seed};
use cohent::states::{
    mcs_from_amplitudes, mcs_vector, random_coherent_amplitudes, random_pure, standard_state, CoherentAmplitudes,
    DensityMatrix,
};
use rand::seq::SliceRandom;
use rand::Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure((a - b).abs() <= tol, || format!("{what}: {a} vs {b}"))
}

fn ghz_saturation() -> Check {
    let psi = standard_state("max_coherent", &[2]).map_err(|e| e.to_string())?;
    let (out, r) = convert(&psi, 2).map_err(|e| e.to_string())?;
    let ghz = standard_state("ghz", &[3]).map_err(|e| e.to_string())?;
    ensure(out.matrix().max_abs_diff(ghz.matrix()) <= 1e-12, || "output is not GHZ3".into())?;
    let tau_d = r.tau_med.as_ref().ok_or("tau_med missing")?.value;
    let tau_f = r.tau_mef.as_ref().ok_or("tau_mef missing")?.value;
    for (name, v) in [("C_d", r.c_d.value), ("E_r^M", r.e_r_m.value), ("tau_MED", tau_d)] {
        close(v, 1.0, 1e-9, name)?;
    }
    for (name, v) in [("C_f", r.c_f.value), ("E_f^GME", r.e_f_gme.value), ("tau_MEF", tau_f)] {
        close(v, 1.0, 1e-9, name)?;
    }
    Ok("all six quantities equal 1".into())
}

fn cyclic_losslessness() -> Check {
    let mut worst: f64 = 0.0;
    for i in 0..200u64 {
        let mut rng = substream(2024, i);
        let v = random_pure(2, &mut rng);
        let rho = DensityMatrix::from_pure(&v, &[2]).map_err(|e| e.to_string())?;
        let trace = cyclic(&rho, substream_seed(7, i)).map_err(|e| e.to_string())?;
        worst = worst.max(trace.loss_c_d).max(trace.loss_c_f);
    }
    ensure(worst <= 1e-9, || format!("max loss {worst:e}"))?;
    Ok(format!("200 inputs, max loss {worst:.2e}"))
}

fn inequality_sweep() -> Check {
    let cfg = VerifyConfig { samples: 1000, d: 2, n: 2, seed: 1, tolerance: 1e-8 };
    let reports = verify_theorems(&cfg).map_err(|e| e.to_string())?;
    let violations: usize = reports.iter().map(|r| r.violations.len()).sum();
    ensure(violations == 0, || {
        let first = reports.iter().flat_map(|r| r.violations.iter().map(move |v| (r.id.clone(), v.clone()))).next();
        format!("{violations} violations, first {first:?}")
    })?;
    let sat = reports.iter().find(|r| r.id == "u_mcn.saturation").ok_or("no saturation report")?;
    let spread = sat.min_margin.unwrap_or(0.0).abs().max(sat.max_margin.unwrap_or(0.0).abs());
    ensure(sat.inconclusive == 0 && sat.checks > 0, || "saturation checks not all decided".into())?;
    ensure(spread <= 1e-9, || format!("U_mcn saturation off by {spread:e}"))?;
    let checks: usize = reports.iter().map(|r| r.checks).sum();
    Ok(format!("{checks} checks, 0 violations, saturation within {spread:.1e}"))
}

fn mcs_identities() -> Check {
    let mut count = 0;
    for d in 2..=4usize {
        for parties in 2..=3usize {
            for i in 0..100u64 {
                let seed = substream_seed(((d as u64) << 8) | parties as u64, i);
                let mut rng = rng_from_seed(seed);
                let a = random_coherent_amplitudes(d, &mut rng);
                let rho = mcs_from_amplitudes(&a, parties).map_err(|e| e.to_string())?;
                let cd = c_d(&rho).value;
                let cf = c_f(&rho).value;
                let erm = e_r_m_mcs(&rho).map_err(|e| e.to_string())?.value;
                let egme = e_f_gme_mcs(&rho).map_err(|e| e.to_string())?.value;
                close(erm, cd, 1e-9, "E_r^M vs C_d")?;
                close(egme, cf, 1e-9, "E_f^GME vs C_f")?;
                for cut in Bipartition::all(parties) {
                    close(e_d(&rho, &cut).map_err(|e| e.to_string())?.value, cd, 1e-9, "E_d vs C_d")?;
                    close(e_f(&rho, &cut).map_err(|e| e.to_string())?.value, cf, 1e-9, "E_f vs C_f")?;
                }
                // measure the last party, correct the first, until one party remains
                let (mut state, mut prev_d, mut prev_f) = (rho, cd, cf);
                let mut k = 0;
                while state.n_parties() > 1 {
                    let last = state.n_parties() - 1;
                    let step = licc_step(&state, last, 0, OutcomeChoice::Sampled(substream_seed(seed, k)))
                        .map_err(|e| e.to_string())?;
                    let (nd, nf) = (c_d(&step.state).value, c_f(&step.state).value);
                    ensure(nd <= prev_d + 1e-9 && nf <= prev_f + 1e-9, || {
                        format!("LICC increased coherence: d={d} parties={parties} sample={i}")
                    })?;
                    (state, prev_d, prev_f) = (step.state, nd, nf);
                    k += 1;
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} maximally correlated states"))
}

/// Smallest grid-free noise level where the numerical indicator vanishes.
fn pipeline_esd(alpha: f64) -> Result<f64, String> {
    let alive = |p: f64| dynamics::point(alpha, p).map(|pt| pt.tau_med_ub_num > 1e-13).map_err(|e| e.to_string());
    let (mut lo, mut hi) = (0.0, 1.0);
    if !alive(0.0)? {
        return Ok(0.0);
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if alive(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn dynamics_closed_forms() -> Check {
    let grid = unit_grid(21).map_err(|e| e.to_string())?;
    let points = dynamics::sweep(&grid, &grid).map_err(|e| e.to_string())?;
    let worst = points.iter().map(|p| p.max_discrepancy()).fold(0.0, f64::max);
    ensure(worst <= 1e-9, || format!("closed forms differ from pipeline by {worst:e}"))?;
    let mut esd_gap: f64 = 0.0;
    for &alpha in &grid[1..grid.len() - 1] {
        let line = esd_probability(alpha).map_err(|e| e.to_string())?;
        esd_gap = esd_gap.max((line.formula - line.bisection).abs());
        esd_gap = esd_gap.max((line.formula - pipeline_esd(alpha)?).abs());
    }
    ensure(esd_gap <= 1e-6, || format!("ESD line off by {esd_gap:e}"))?;
    let mid = esd_probability(FRAC_1_SQRT_2).map_err(|e| e.to_string())?.formula;
    close(mid, 0.8, 1e-12, "ESD at alpha = 1/sqrt2")?;
    Ok(format!("441 points within {worst:.1e}, ESD line within {esd_gap:.1e}"))
}

fn monogamy() -> Check {
    let a_bc = Bipartition::single(0, 3).map_err(|e| e.to_string())?;
    let pair_cut = Bipartition::single(0, 2).map_err(|e| e.to_string())?;
    let (mut min_gap_f, mut min_chain) = (f64::INFINITY, f64::INFINITY);
    for i in 0..500u64 {
        let v = random_pure(8, &mut substream(500, i));
        let rho = DensityMatrix::from_pure(&v, &[2, 2, 2]).map_err(|e| e.to_string())?;
        let ef_a = e_f(&rho, &a_bc).map_err(|e| e.to_string())?.value;
        let ed_a = e_d(&rho, &a_bc).map_err(|e| e.to_string())?;
        ensure(ed_a.kind.is_exact(), || "pure one-vs-rest E_d not exact".into())?;
        let mut gap_f = ef_a * ef_a;
        let mut gap_d = ed_a.value * ed_a.value;
        for j in [1, 2] {
            let pair = rho.reduce(&[0, j]).map_err(|e| e.to_string())?;
            let ef = e_f(&pair, &pair_cut).map_err(|e| e.to_string())?.value;
            // E_d of the pair is at most its log-negativity and at most its E_f
            let ed_ub = log_negativity(&pair, &pair_cut).map_err(|e| e.to_string())?.min(ef);
            gap_f -= ef * ef;
            gap_d -= ed_ub * ed_ub;
        }
        min_gap_f = min_gap_f.min(gap_f);
        min_chain = min_chain.min(gap_d - gap_f);
        ensure(gap_f >= -1e-9, || format!("sample {i}: E_f monogamy gap {gap_f:e}"))?;
        ensure(gap_d - gap_f >= -1e-9, || format!("sample {i}: E_d gap below E_f gap by {:e}", gap_f - gap_d))?;
        let tf = tau_mef(&rho).map_err(|e| e.to_string())?.value;
        close(tf, gap_f.max(0.0).sqrt(), 1e-9, "tau_MEF")?;
        ensure(tau_med(&rho).is_ok(), || "tau_MED failed".into())?;
    }
    Ok(format!("500 states, min E_f gap {min_gap_f:.3e}, min chain slack {min_chain:.3e}"))
}

fn observation_vs_kraft() -> Check {
    let mut rng = rng_from_seed(77);
    let (mut agree, mut decomposable) = (0, 0);
    for i in 0..500 {
        let a = if i % 2 == 0 {
            random_coherent_amplitudes(4, &mut rng)
        } else {
            // moduli of a two-qubit product, shuffled, with random phases
            let (x, y) = (rng.random_range(0.0..1.0f64), rng.random_range(0.0..1.0f64));
            let (xs, ys) = ([x.sqrt(), (1.0 - x).sqrt()], [y.sqrt(), (1.0 - y).sqrt()]);
            let mut m: Vec<f64> = xs.iter().flat_map(|a| ys.iter().map(move |b| a * b)).collect();
            m.shuffle(&mut rng);
            let amps = m.iter().map(|&r| C64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))).collect();
            CoherentAmplitudes::new(amps).map_err(|e| e.to_string())?
        };
        let obs = observation1(&a).map_err(|e| e.to_string())?;
        let kraft = kraft_decomposable(&mcs_vector(&a, 2)).map_err(|e| e.to_string())?;
        ensure(obs.decomposable == kraft.decomposable, || format!("sample {i}: verdicts differ"))?;
        if i % 2 == 1 {
            ensure(obs.decomposable, || format!("sample {i}: product moduli judged genuine"))?;
        }
        agree += 1;
        decomposable += usize::from(obs.decomposable);
    }
    for _ in 0..50 {
        let (x, y) = (rng.random_range(0.0..1.0f64), rng.random_range(0.0..1.0f64));
        let amps: Vec<f64> =
            [x.sqrt(), (1.0 - x).sqrt()].iter().flat_map(|a| [y.sqrt(), (1.0 - y).sqrt()].map(|b| a * b)).collect();
        let a = CoherentAmplitudes::from_real(&amps).map_err(|e| e.to_string())?;
        ensure(is_product_amplitudes(&a), || "tensor product not recognized".into())?;
        ensure(observation1(&a).map_err(|e| e.to_string())?.decomposable, || "tensor product judged genuine".into())?;
    }
    for k in 1..20 {
        let a = plus_minus_family(k as f64 / 20.0).map_err(|e| e.to_string())?;
        ensure(!is_product_amplitudes(&a), || "plus/minus member is a product".into())?;
        ensure(observation1(&a).map_err(|e| e.to_string())?.decomposable, || {
            "plus/minus member judged genuine".into()
        })?;
        ensure(kraft_decomposable(&mcs_vector(&a, 2)).map_err(|e| e.to_string())?.decomposable, || {
            "plus/minus member judged genuine by Schmidt test".into()
        })?;
    }
    Ok(format!("{agree} agreeing verdicts, {decomposable} decomposable"))
}

fn sweep_qualitative() -> Check {
    let grid = unit_grid(51).map_err(|e| e.to_string())?;
    let points = dynamics::sweep(&grid, &grid).map_err(|e| e.to_string())?;
    let mut rows = 0;
    for row in points.chunks(grid.len()) {
        let alpha = row[0].alpha;
        if alpha == 0.0 || alpha == 1.0 {
            continue;
        }
        let line = esd_probability(alpha).map_err(|e| e.to_string())?.formula;
        for pt in row {
            if pt.p < 1.0 {
                ensure(pt.c_d > 0.0 && pt.c_f > 0.0, || format!("coherence vanished at alpha={alpha} p={}", pt.p))?;
            }
            if pt.p >= line {
                ensure(pt.tau_med_ub <= 1e-12 && pt.tau_mef_lb <= 1e-12 && pt.esd, || {
                    format!("indicator alive past ESD at alpha={alpha} p={}", pt.p)
                })?;
            } else if pt.p < line - 1e-9 {
                ensure(pt.tau_med_ub > 0.0 && !pt.esd, || {
                    format!("indicator dead before ESD at alpha={alpha} p={}", pt.p)
                })?;
            }
        }
        rows += 1;
    }
    Ok(format!("{rows} rows show asymptotic coherence decay and sudden death of the indicators"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("ghz saturation", ghz_saturation, Duration::from_secs(1)),
        ("cyclic losslessness", cyclic_losslessness, Duration::from_secs(10)),
        ("inequality sweep", inequality_sweep, Duration::from_secs(60)),
        ("maximally correlated identities", mcs_identities, Duration::from_secs(30)),
        ("dynamics closed forms", dynamics_closed_forms, Duration::from_secs(30)),
        ("monogamy", monogamy, Duration::from_secs(30)),
        ("amplitude vs Schmidt decomposability", observation_vs_kraft, Duration::from_secs(10)),
        ("noise sweep qualitative shape", sweep_qualitative, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed <= *budget {
                Ok(msg)
            } else {
                Err(format!("took {:.2} s, budget {} s", elapsed.as_secs_f64(), budget.as_secs()))
            }
        });
        match outcome {
            Ok(msg) => println!("PASS {} {name} ({:.2} s): {msg}", i + 1, elapsed.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name} ({:.2} s): {msg}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
