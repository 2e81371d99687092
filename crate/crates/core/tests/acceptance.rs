//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use lvyscale::exponent::{default_index_grid, layered_asymptotic_constants, log_grid, IndexEnd, JumpLaw, LevyExponent};
use lvyscale::sampler::{sample_increment, NoiseSpec};
use lvyscale::synth::{GridSpec, Operator, Synthesizer};
use lvyscale::verify::{
    default_xi_grid, empirical_cf, estimate_hurst, verify_degeneration, verify_scaling_limit, DegenerationRequest,
    Direction, ScalingRequest, Verdict,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn sampler_fidelity() -> Outcome {
    let families = [
        ("gaussian", LevyExponent::gaussian(1.0).unwrap()),
        ("sas0.5", LevyExponent::sas(0.5, 1.0).unwrap()),
        ("sas1", LevyExponent::sas(1.0, 1.0).unwrap()),
        ("sas1.5", LevyExponent::sas(1.5, 1.0).unwrap()),
        ("laplace0.5", LevyExponent::generalized_laplace(0.5).unwrap()),
        ("laplace1", LevyExponent::generalized_laplace(1.0).unwrap()),
        (
            "poisson-gaussian",
            LevyExponent::compound_poisson(1.0, JumpLaw::Gaussian { variance: 1.0 }).unwrap(),
        ),
        ("layered(0.7,1.5)", LevyExponent::layered_stable(0.7, 1.5).unwrap()),
    ];
    let mut worst: (f64, &str) = (0.0, "");
    let mut parts = Vec::new();
    for (i, (name, e)) in families.iter().enumerate() {
        let xs = sample_increment(&NoiseSpec::new(e.clone(), 1000 + i as u64), 1.0, 100_000).unwrap();
        let d = empirical_cf(&xs, &default_xi_grid()).unwrap().compare(e, 1.0).unwrap();
        parts.push(format!("{name}={d:.4}"));
        if d > worst.0 {
            worst = (d, name);
        }
    }
    outcome(
        worst.0 < 0.02,
        format!(
            "max sup|ECF-exp(Ψ)| = {:.4} ({}) < 0.02; {}",
            worst.0,
            worst.1,
            parts.join(" ")
        ),
    )
}

fn layered_constants() -> Outcome {
    let closed = PI / (libm::tgamma(2.0) * (PI / 2.0).sin());
    let (c0, cinf) = layered_asymptotic_constants(1.0, 1.0).unwrap();
    let err = (c0 - closed).abs().max((cinf - closed).abs());
    outcome(
        err < 1e-6,
        format!("(C0, Cinf) = ({c0:.12}, {cinf:.12}), max error vs π {err:.2e} < 1e-6"),
    )
}

fn index_recovery() -> Outcome {
    let table = [
        ("gaussian", LevyExponent::gaussian(1.0).unwrap()),
        ("sas0.5", LevyExponent::sas(0.5, 1.0).unwrap()),
        ("sas1.5", LevyExponent::sas(1.5, 1.0).unwrap()),
        ("cauchy", LevyExponent::cauchy(1.0).unwrap()),
        ("laplace", LevyExponent::generalized_laplace(1.0).unwrap()),
        (
            "poisson-gaussian",
            LevyExponent::compound_poisson(1.0, JumpLaw::Gaussian { variance: 1.0 }).unwrap(),
        ),
        (
            "poisson-sas1.2",
            LevyExponent::compound_poisson(1.0, JumpLaw::Sas { alpha: 1.2, scale: 1.0 }).unwrap(),
        ),
        ("layered(0.7,1.5)", LevyExponent::layered_stable(0.7, 1.5).unwrap()),
    ];
    let far = log_grid(1e8, 1e12, 16);
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, e) in &table {
        let th = e.theoretical_indices();
        let b0 = e
            .estimate_index(IndexEnd::Zero, &default_index_grid(IndexEnd::Zero))
            .unwrap();
        let ok0 = (b0 - th.beta0).abs() < 0.05;
        let (binf, okinf) = if th.beta_inf > 0.0 {
            let v = e
                .estimate_index(IndexEnd::Infinity, &default_index_grid(IndexEnd::Infinity))
                .unwrap();
            (v, (v - th.beta_inf).abs() < 0.05)
        } else {
            let v = e.estimate_index(IndexEnd::Infinity, &far).unwrap();
            (v, v < 0.1)
        };
        pass &= ok0 && okinf;
        parts.push(format!(
            "{name}: ({b0:.3}, {binf:.3}) vs ({}, {})",
            th.beta0, th.beta_inf
        ));
    }
    outcome(pass, parts.join("; "))
}

fn self_similarity() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, alpha) in [1.0, 2.0].into_iter().enumerate() {
        for (j, (direction, a)) in [(Direction::Coarse, 0.25), (Direction::Fine, 4.0)]
            .into_iter()
            .enumerate()
        {
            let noise = NoiseSpec::new(LevyExponent::sas(alpha, 1.0).unwrap(), 2000 + 10 * k as u64 + j as u64);
            let mut req = ScalingRequest::new(noise, Operator::Levy, direction, vec![a]);
            req.ensemble = 10_000;
            let r = verify_scaling_limit(&req).unwrap();
            let p = r.ladder[0].ks_p_value.unwrap();
            pass &= p > 0.01 && r.h == 1.0 / alpha;
            parts.push(format!("α={alpha} a={a} H={} p={p:.3}", r.h));
        }
    }
    outcome(pass, format!("KS p-value > 0.01: {}", parts.join("; ")))
}

fn levy_check(noise: LevyExponent, seed: u64, direction: Direction, end: Option<IndexEnd>) -> (f64, f64, Verdict) {
    let ladder = match direction {
        Direction::Coarse => vec![1.0, 0.1, 0.01, 0.001],
        Direction::Fine => vec![10.0, 100.0, 1000.0],
    };
    let mut req = ScalingRequest::new(NoiseSpec::new(noise, seed), Operator::Levy, direction, ladder);
    req.ensemble = 10_000;
    req.limit_end = end;
    let r = verify_scaling_limit(&req).unwrap();
    (r.h, r.final_distance(), r.verdict)
}

fn coarse_limit() -> Outcome {
    let cases = [
        ("laplace", LevyExponent::generalized_laplace(1.0).unwrap(), 0.5),
        (
            "poisson-gaussian",
            LevyExponent::compound_poisson(1.0, JumpLaw::Gaussian { variance: 1.0 }).unwrap(),
            0.5,
        ),
        (
            "poisson-cauchy",
            LevyExponent::compound_poisson(1.0, JumpLaw::Cauchy { scale: 1.0 }).unwrap(),
            1.0,
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (name, e, want_h)) in cases.into_iter().enumerate() {
        let (h, d, _) = levy_check(e, 3000 + i as u64, Direction::Coarse, None);
        pass &= h == want_h && d < 0.03;
        parts.push(format!("{name} H={h} KS@a=1e-3 {d:.4}"));
    }
    outcome(pass, format!("{} (< 0.03)", parts.join("; ")))
}

fn transition() -> Outcome {
    let gc = LevyExponent::sum(vec![
        LevyExponent::gaussian(1.0).unwrap(),
        LevyExponent::cauchy(1.0).unwrap(),
    ])
    .unwrap();
    let (hf, df, vf) = levy_check(gc.clone(), 4000, Direction::Fine, None);
    let (hc, dc, vc) = levy_check(gc.clone(), 4001, Direction::Coarse, None);
    let (hsf, dsf, vsf) = levy_check(gc.clone(), 4002, Direction::Fine, Some(IndexEnd::Zero));
    let (hsc, dsc, vsc) = levy_check(gc, 4003, Direction::Coarse, Some(IndexEnd::Infinity));
    let pass = hf == 0.5
        && vf == Verdict::Converging
        && hc == 1.0
        && vc == Verdict::Converging
        && vsf == Verdict::NonConverging
        && vsc == Verdict::NonConverging;
    outcome(
        pass,
        format!(
            "fine H={hf} KS {df:.4} {vf:?}; coarse H={hc} KS {dc:.4} {vc:?}; swapped fine H={hsf} KS {dsf:.3} {vsf:?}; swapped coarse H={hsc} KS {dsc:.3} {vsc:?}"
        ),
    )
}

fn degeneration() -> Outcome {
    let cp = LevyExponent::compound_poisson(1.0, JumpLaw::Gaussian { variance: 1.0 }).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, h) in [-1.0, 0.0, 1.0].into_iter().enumerate() {
        let mut req = DegenerationRequest::new(
            NoiseSpec::new(cp.clone(), 5000 + i as u64),
            Operator::Levy,
            h,
            vec![10.0, 100.0, 1000.0],
        );
        req.delta = 0.1;
        req.ensemble = 10_000;
        let r = verify_degeneration(&req).unwrap();
        let p = r.final_distance();
        pass &= p < 0.01;
        parts.push(format!("H={h} P(|·|>0.1)@a=1e3 {p:.4}"));
    }
    outcome(pass, format!("{} (< 0.01)", parts.join("; ")))
}

fn sheet() -> Outcome {
    let mut req = ScalingRequest::new(
        NoiseSpec::new(LevyExponent::gaussian(1.0).unwrap(), 6000),
        Operator::Sheet,
        Direction::Coarse,
        vec![0.25, 1.0 / 16.0, 1.0 / 64.0, 1.0 / 255.0],
    );
    req.ensemble = 5000;
    req.threshold = 0.05;
    let r = verify_scaling_limit(&req).unwrap();
    let d = r.final_distance();
    outcome(
        r.h == 1.0 && d < 0.05,
        format!("256x256 grid, H={}, KS at (1,1) vs Brownian sheet {d:.4} < 0.05", r.h),
    )
}

fn hurst() -> Outcome {
    let grid = GridSpec::line(1.0 / 64.0, 1025).unwrap();
    let t: Vec<f64> = (0..9).map(|k| 2f64.powi(k - 4)).collect();
    let cases = [
        ("brownian", LevyExponent::gaussian(1.0).unwrap(), Operator::Levy, 0.5),
        ("cauchy", LevyExponent::cauchy(1.0).unwrap(), Operator::Levy, 1.0),
        (
            "fractional-gaussian γ=1.5",
            LevyExponent::gaussian(1.0).unwrap(),
            Operator::Fractional { gamma: 1.5 },
            1.0,
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (name, e, op, want)) in cases.into_iter().enumerate() {
        let paths = Synthesizer::new(&NoiseSpec::new(e, 7000 + i as u64), op, grid)
            .unwrap()
            .ensemble(0, 1000);
        let h = estimate_hurst(&paths, &t).unwrap().h;
        pass &= (h - want).abs() < 0.05;
        parts.push(format!("{name} {h:.3} vs {want}"));
    }
    outcome(pass, format!("{} (±0.05)", parts.join("; ")))
}

fn main() {
    type Check = fn() -> Outcome;
    let checks: [(&str, Check, Duration); 9] = [
        ("sampler fidelity", sampler_fidelity, Duration::from_secs(30)),
        (
            "layered asymptotic constants",
            layered_constants,
            Duration::from_secs(1),
        ),
        ("index recovery", index_recovery, Duration::from_secs(10)),
        ("exact self-similarity", self_similarity, Duration::from_secs(60)),
        ("coarse-scale limit", coarse_limit, Duration::from_secs(300)),
        ("fine/coarse transition", transition, Duration::from_secs(300)),
        ("degeneration", degeneration, Duration::from_secs(120)),
        ("sheet coarse limit", sheet, Duration::from_secs(300)),
        ("hurst estimation", hurst, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (name, check, budget) in checks {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let pass = o.pass && took <= budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {name}: {} [{:.2}s, budget {}s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of 9 acceptance criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
