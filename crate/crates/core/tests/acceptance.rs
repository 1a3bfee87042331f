//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use num_complex::Complex64;
use rand::Rng;
use spectral_sl::cli::{cmd_forward, cmd_inverse, forward, inverse, relative_error, RunConfig};
use spectral_sl::coeffs::{forward_vtable, FourierPotential, VTable};
use spectral_sl::contour::Rect;
use spectral_sl::formats::{from_json, to_json, SpectralDataFile};
use spectral_sl::inverse::{reconstruct, AnalyticProvider};
use spectral_sl::scattering::{c12, connection_coefficients, wronskian};
use spectral_sl::solutions::{
    eval_f1, eval_f2, eval_fn_limit, eval_native, ode_residual, Branch, FundamentalSystem, Solution,
};
use spectral_sl::spectrum::{
    find_eigenvalues, resolvent_residue, sector_kernel, Axis, Sector, DEFAULT_BOX,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn random_lambda(rng: &mut rand_chacha::ChaCha8Rng, beta: f64) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(0.1..4.0), rng.gen_range(0.1..4.0))
            * I.powu(rng.gen_range(0..4));
        if off_lattice(beta, z) {
            return z;
        }
    }
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for beta in [0.5, 1.0, 2.0] {
        let v = VTable::zeros(30);
        for z in [c(0.7, 0.3), c(-1.2, 2.5), c(3.0, -0.4), c(-0.25, -0.9)] {
            for x in [0.0, 0.5, 2.0, 6.0] {
                let f1 = eval_f1(&v, z, x, Branch::Plus).unwrap().value;
                worst = worst.max(rel(f1, (I * z * x).exp()));
                let f2 = eval_f2(&v, beta, z, -x, Branch::Plus).unwrap().value;
                worst = worst.max(rel(f2, (-z * beta * x).exp()));
            }
            let cc = connection_coefficients(&v, beta, z).unwrap();
            worst = worst.max(rel(cc.c12, -(1.0 + I * beta) / 2.0));
            worst = worst.max(rel(cc.c11, -(1.0 - I * beta) / 2.0));
        }
    }
    let mut found = 0;
    for beta in [0.5, 1.0, 2.0] {
        let v = VTable::zeros(30);
        for rect in [DEFAULT_BOX, Rect::new(0.1, 2.0, 0.1, 2.0).unwrap()] {
            found += find_eigenvalues(&v, beta, Sector::S0, &rect, 1e-12)
                .unwrap()
                .len();
        }
    }
    outcome(
        worst < 1e-12 && found == 0,
        format!("closed forms max rel err {worst:.1e} (< 1e-12), S0 eigenvalues found {found}"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = seeded_rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let p = random_small_potential(&mut rng, 3);
        let beta = p.beta();
        let v = forward_vtable(&p, 30);
        let z = random_lambda(&mut rng, beta);
        for k in 1..=32 {
            let x = std::f64::consts::PI * k as f64 / 16.0;
            let w1 = wronskian(
                &eval_f1(&v, z, x, Branch::Plus).unwrap(),
                &eval_f1(&v, z, x, Branch::Minus).unwrap(),
            );
            let w2 = wronskian(
                &eval_f2(&v, beta, z, -x, Branch::Plus).unwrap(),
                &eval_f2(&v, beta, z, -x, Branch::Minus).unwrap(),
            );
            worst = worst.max(rel(w1, 2.0 * I * z)).max(rel(w2, 2.0 * z * beta));
        }
    }
    outcome(
        worst < 1e-9,
        format!(
            "W[f1+,f1-] = 2iλ and W[f2+,f2-] = 2λβ, 50 cases, max rel err {worst:.1e} (< 1e-9)"
        ),
    )
}

fn criterion_3() -> Outcome {
    let p = FourierPotential::new(1.0, vec![c(1.0, 0.0)]).unwrap();
    let orders = [5, 10, 20, 30];
    let tables: Vec<VTable> = orders.iter().map(|&a| forward_vtable(&p, a)).collect();
    let mut rng = seeded_rng(3);
    let mut maxima = [0.0f64; 4];
    let mut monotone = true;
    for _ in 0..20 {
        let z = random_lambda(&mut rng, 1.0);
        let x = rng.gen_range(-2.0 * std::f64::consts::PI..2.0 * std::f64::consts::PI);
        let r: Vec<f64> = tables
            .iter()
            .map(|v| ode_residual(&p, v, z, x, Solution::F1Plus).unwrap().norm())
            .collect();
        for (m, value) in maxima.iter_mut().zip(&r) {
            *m = m.max(*value);
        }
        // roundoff level of the three terms of the equation at this point
        let f = FundamentalSystem::new(&tables[3], 1.0, z)
            .extended(Solution::F1Plus, x)
            .unwrap()
            .value
            .norm();
        let floor = 1e-13 * f * (2.0 + z.norm_sqr());
        monotone &= r.windows(2).all(|w| w[1] < w[0] || w[0].max(w[1]) < floor);
    }
    outcome(
        monotone && maxima[3] < 1e-8,
        format!(
            "max residual at A = 5/10/20/30: {:.1e} {:.1e} {:.1e} {:.1e} \
             (decreasing down to roundoff at every point, < 1e-8 at 30)",
            maxima[0], maxima[1], maxima[2], maxima[3]
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = seeded_rng(4);
    let mut worst_11: f64 = 0.0;
    let mut worst_9: f64 = 0.0;
    for _ in 0..50 {
        let p = random_small_potential(&mut rng, 3);
        let beta = p.beta();
        let v = forward_vtable(&p, 30);
        let z = random_lambda(&mut rng, beta);
        let cc = connection_coefficients(&v, beta, z).unwrap();
        let reflected = connection_coefficients(&v, beta, -z).unwrap();
        // C22 and C21 from their own Wronskians, against the C11, C12 forms
        let at0 = |k| eval_native(&v, beta, k, z, Complex64::new(0.0, 0.0)).unwrap();
        let f1p = at0(Solution::F1Plus);
        let c22 = -wronskian(&f1p, &at0(Solution::F2Minus)) / (2.0 * z * beta);
        let c21 = wronskian(&f1p, &at0(Solution::F2Plus)) / (2.0 * z * beta);
        worst_11 = worst_11
            .max(rel(c22, I / beta * reflected.c11))
            .max(rel(c21, -I / beta * cc.c12));
        let sys = FundamentalSystem::new(&v, beta, z);
        for kind in [
            Solution::F1Plus,
            Solution::F1Minus,
            Solution::F2Plus,
            Solution::F2Minus,
        ] {
            let right = sys.extended(kind, 0.0).unwrap();
            let left = sys.extended(kind, -f64::MIN_POSITIVE).unwrap();
            worst_9 = worst_9
                .max(rel(left.value, right.value))
                .max(rel(left.d1, right.d1));
        }
    }
    outcome(
        worst_11 < 1e-10 && worst_9 < 1e-10,
        format!("connection identities {worst_11:.1e}, continuity at 0 {worst_9:.1e} (< 1e-10)"),
    )
}

fn criterion_5() -> Outcome {
    let p = FourierPotential::new(1.0, vec![c(1.0, 0.0)]).unwrap();
    let v = forward_vtable(&p, 30);
    let eps = 1e-5;
    let (x, t) = (0.7, 0.3);
    let mut residue_err: f64 = 0.0;
    for n in 1..=3 {
        let h = n as f64 / 2.0;
        let lam = h + eps * spectral_sl::limits::diagonal();
        let scaled =
            (n as f64 - 2.0 * lam) * sector_kernel(&v, 1.0, Sector::S0, lam, x, t).unwrap();
        let closed = resolvent_residue(&v, 1.0, n, Axis::Real, x, t).unwrap();
        residue_err = residue_err.max(rel(scaled, closed));
    }
    let mut limit_err: f64 = 0.0;
    for n in 1..=3 {
        for k in 0..=20 {
            let x = -3.0 + 0.3 * k as f64;
            let lhs = eval_fn_limit(&v, n, x, Branch::Minus);
            let g = Complex64::new(-(n as f64) / 2.0, 0.0);
            let rhs = v.get(n, n)
                * FundamentalSystem::new(&v, 1.0, g)
                    .native(Solution::F1Minus, x.into())
                    .unwrap()
                    .value;
            limit_err = limit_err.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
        }
    }
    outcome(
        residue_err < 1e-6 && limit_err < 1e-9,
        format!(
            "(n-2λ)R11 at ε = 1e-5 vs closed-form residue: rel err {residue_err:.1e} (< 1e-6); \
             f_n limit vs V_nn f1-(·,-n/2): {limit_err:.1e} (< 1e-9)"
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = seeded_rng(6);
    let mut analytic_q: f64 = 0.0;
    let mut analytic_beta: f64 = 0.0;
    let mut sampled_q: f64 = 0.0;
    let mut sampled_beta: f64 = 0.0;
    let mut failures = Vec::new();
    let n_max = 5;
    let cfg = RunConfig {
        n_max,
        ..RunConfig::default()
    };
    for k in 0..20 {
        let q = random_small_potential(&mut rng, 5).harmonics().to_vec();
        for beta in [0.5, 1.0, 2.0] {
            let p = FourierPotential::new(beta, q.clone()).unwrap();
            let q_err = |r: &[Complex64]| {
                r.iter()
                    .enumerate()
                    .map(|(i, x)| relative_error(*x, p.harmonic(i + 1)))
                    .fold(0.0, f64::max)
            };
            let analytic = AnalyticProvider::new(&p, 30, &DEFAULT_BOX, &Default::default())
                .and_then(|prov| reconstruct(&prov, n_max, 30));
            match analytic {
                Ok(r) => {
                    analytic_q = analytic_q.max(q_err(&r.q));
                    analytic_beta = analytic_beta.max((r.beta - beta).abs() / beta);
                }
                Err(e) => failures.push(format!("potential {k}, β = {beta}, analytic: {e}")),
            }
            let sampled = forward(&p, &cfg)
                .and_then(|(data, _)| to_json(&data))
                .and_then(|text| from_json::<SpectralDataFile>(&text))
                .and_then(|data| inverse(&data));
            match sampled {
                Ok(r) => {
                    sampled_q = sampled_q.max(q_err(&r.q));
                    sampled_beta = sampled_beta.max((r.beta - beta).abs() / beta);
                }
                Err(e) => failures.push(format!("potential {k}, β = {beta}, sampled: {e}")),
            }
        }
    }
    let passed = failures.is_empty()
        && analytic_q < 1e-6
        && analytic_beta < 1e-8
        && sampled_q < 1e-4
        && sampled_beta < 1e-4;
    let mut detail = format!(
        "60 round trips; analytic q {analytic_q:.1e} (< 1e-6), β {analytic_beta:.1e} (< 1e-8); \
         sampled q {sampled_q:.1e}, β {sampled_beta:.1e} (< 1e-4)"
    );
    for f in failures {
        detail.push_str(&format!("; {f}"));
    }
    outcome(passed, detail)
}

fn criterion_7() -> Outcome {
    let beta = 1.0;
    let p = FourierPotential::new(beta, vec![c(1.0, 0.0)]).unwrap();
    let v = forward_vtable(&p, 30);
    let limit = -(1.0 + I * beta) / 2.0;
    let ray = Complex64::from_polar(1.0, 0.3);
    let d: Vec<f64> = [10.0, 100.0, 1000.0]
        .iter()
        .map(|&r| (c12(&v, beta, ray * r).unwrap() - limit).norm())
        .collect();
    outcome(
        d[1] < d[0] && d[2] < d[1] && d[2] < 1e-2,
        format!(
            "|C12 + (1+iβ)/2| at |λ| = 10/100/1000: {:.1e} {:.1e} {:.1e} (decreasing, < 1e-2)",
            d[0], d[1], d[2]
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = seeded_rng(8);
    let mut worst: f64 = 0.0;
    let mut zero_mismatch = 0;
    for _ in 0..10 {
        let len = rng.gen_range(1..=4);
        let q: Vec<Rc> = (0..len)
            .map(|_| Rc::new(random_rational(&mut rng), random_rational(&mut rng)))
            .collect();
        let order = rng.gen_range(1..=8);
        let exact = exact_vtable(&q, order);
        let p = FourierPotential::new(1.0, q.iter().map(Rc::to_f64).collect()).unwrap();
        let float = forward_vtable(&p, order);
        for n in 1..=order {
            for a in n..=order {
                let e = &exact[n - 1][a - 1];
                if e.is_zero() {
                    zero_mismatch += usize::from(float.get(n, a) != c(0.0, 0.0));
                } else {
                    worst = worst.max(rel(float.get(n, a), e.to_f64()));
                }
            }
        }
    }
    outcome(
        worst < 1e-13 && zero_mismatch == 0,
        format!("10 rational potentials, A ≤ 8, max entrywise rel err {worst:.1e} (< 1e-13)"),
    )
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let potential = dir.path().join("potential.json");
    std::fs::write(&potential, r#"{"beta": 1.0, "q": [[-2, 1], [0.25, 0.5]]}"#).unwrap();
    let cfg = RunConfig {
        n_max: 4,
        seed: 9,
        ..RunConfig::default()
    };
    let mut outputs = Vec::new();
    for run in ["first", "second"] {
        let out = dir.path().join(run);
        cmd_forward(&potential, &out, &cfg).unwrap();
        let rec = out.join("reconstruction.json");
        cmd_inverse(&out.join("spectral-data.json"), Some(&rec)).unwrap();
        let files: Vec<Vec<u8>> = [
            "spectral-data.json",
            "spectrum-report.json",
            "reconstruction.json",
        ]
        .iter()
        .map(|f| std::fs::read(out.join(f)).unwrap())
        .collect();
        outputs.push(files);
    }
    let identical = outputs[0] == outputs[1];
    let bytes: usize = outputs[0].iter().map(Vec::len).sum();
    outcome(
        identical,
        format!(
            "forward and inverse outputs of two runs byte-identical: {identical} ({bytes} bytes)"
        ),
    )
}

type Criterion = (u32, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, criterion_1, Duration::from_secs(5)),
        (2, criterion_2, Duration::from_secs(30)),
        (3, criterion_3, Duration::from_secs(10)),
        (4, criterion_4, Duration::from_secs(10)),
        (5, criterion_5, Duration::from_secs(10)),
        (6, criterion_6, Duration::from_secs(60)),
        (7, criterion_7, Duration::MAX),
        (8, criterion_8, Duration::MAX),
        (9, criterion_9, Duration::MAX),
    ];
    let mut failed = 0;
    for (k, run, budget) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run);
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= budget, o.detail),
            Err(_) => (false, "panicked".to_string()),
        };
        let budget_note = if budget == Duration::MAX {
            String::new()
        } else {
            format!(", budget {} s", budget.as_secs())
        };
        println!(
            "{} criterion {k}: {detail} [{:.2} s{budget_note}]",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        failed += usize::from(!passed);
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
