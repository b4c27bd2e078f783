//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` print FAIL but do not fail the
//! process; any other failure does. Pass criterion numbers as arguments to
//! run a subset.

use std::time::{Duration, Instant};

use rand::Rng;

use stochord::channels::ChannelModel;
use stochord::csv_io::Series;
use stochord::metrics::{
    certify_cm, ci_capacity, ergodic_capacity, ergodic_capacity_direct, oa_capacity, oa_constraint, oa_threshold,
    MetricFunction,
};
use stochord::montecarlo::{
    crossover_detect, db_grid, db_to_linear, derive_seed, mc_mean, significant_violations, Crossover, Estimate,
    StreamRng,
};
use stochord::noise::NoiseModel;
use stochord::orders::{default_rho_grid, default_x_grid, implication_audit, log_grid};
use stochord::runner::{figure_scenario, run_scenario, Overrides};
use stochord::specfun::q_function;
use stochord::systems::{df_combined_error, simulate_system, Topology, TopologyKind};

const KNOWN_FAILURES: [u32; 3] = [4, 7, 12];

struct Check {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Check {
    Check {
        pass,
        detail: detail.into(),
    }
}

fn figure(n: u32) -> Vec<Series> {
    let out = run_scenario(&figure_scenario(n).unwrap(), &Overrides::default(), None).unwrap();
    assert_eq!(out.series.len(), 2);
    out.series
}

fn overlaps(c: &Crossover, target: f64, tol: f64) -> bool {
    c.lo_db <= target + tol && c.hi_db >= target - tol
}

fn fmt_crossovers(c: &[Crossover]) -> String {
    if c.is_empty() {
        return "none".into();
    }
    c.iter()
        .map(|c| format!("[{}, {}] dB", c.lo_db, c.hi_db))
        .collect::<Vec<_>>()
        .join(", ")
}

fn single_crossover(n: u32, target: f64) -> Check {
    let s = figure(n);
    let cross = crossover_detect(&s[0].result, &s[1].result).unwrap();
    let pass = cross.len() == 1 && overlaps(&cross[0], target, 0.5);
    check(
        pass,
        format!("crossovers {} (target {target} dB +/- 0.5)", fmt_crossovers(&cross)),
    )
}

/// The better channel (second series) is never significantly worse.
fn uniform_ordering(n: u32) -> Check {
    let s = figure(n);
    let (worse, better) = (&s[0].result, &s[1].result);
    let viol = significant_violations(better, worse).unwrap();
    let cross = crossover_detect(worse, better).unwrap();
    let strict = better
        .points
        .iter()
        .zip(&worse.points)
        .filter(|(b, w)| w.estimate - b.estimate > 3.0 * (b.stderr.hypot(w.stderr)))
        .count();
    check(
        viol.is_empty() && cross.is_empty(),
        format!(
            "{} of {} points violate at 3 sigma, crossovers {}, strictly ordered at {strict} points",
            viol.len(),
            better.points.len(),
            fmt_crossovers(&cross)
        ),
    )
}

fn c1() -> Check {
    let t = Instant::now();
    let s = figure(3);
    let elapsed = t.elapsed();
    let n = s[0].result.points.iter().map(|p| p.n_samples).min().unwrap();
    let cross = crossover_detect(&s[0].result, &s[1].result).unwrap();
    let pass = cross.len() == 1 && overlaps(&cross[0], -0.5, 0.5) && elapsed <= Duration::from_secs(120) && n >= 1_000_000;
    check(
        pass,
        format!(
            "crossovers {} (target -0.5 dB +/- 0.5), {n} samples/point, {:.1} s",
            fmt_crossovers(&cross),
            elapsed.as_secs_f64()
        ),
    )
}

fn c2() -> Check {
    let (p2, p5) = (ChannelModel::pareto(2.0).unwrap(), ChannelModel::pareto(5.0).unwrap());
    let mut min_margin = f64::INFINITY;
    let mut max_route_gap: f64 = 0.0;
    for db in db_grid(-10.0, 30.0, 1.0).unwrap() {
        let rho = db_to_linear(db);
        let (a, b) = (ergodic_capacity(&p2, rho).unwrap(), ergodic_capacity(&p5, rho).unwrap());
        min_margin = min_margin.min(a - b);
        for (m, v) in [(&p2, a), (&p5, b)] {
            max_route_gap = max_route_gap.max((ergodic_capacity_direct(m, rho).unwrap() - v).abs());
        }
    }
    check(
        min_margin > 1e-6 && max_route_gap <= 1e-6,
        format!("min C(beta=2) - C(beta=5) = {min_margin:.3e}, tail vs direct quadrature gap {max_route_gap:.1e}"),
    )
}

fn c3() -> Check {
    let a = uniform_ordering(5);
    let b = uniform_ordering(6);
    check(a.pass && b.pass, format!("mrc: {}; egc: {}", a.detail, b.detail))
}

fn c8() -> Check {
    let mut worst: f64 = 0.0;
    for m in [0.5, 1.0, 2.0, 3.7, 10.0] {
        let ch = ChannelModel::nakagami(m).unwrap();
        for rho in log_grid(1e-3, 1e3, 50) {
            let want = (1.0 + rho / m).powf(-m);
            let got = ch.laplace(rho).unwrap().value;
            worst = worst.max((got - want).abs() / want);
        }
    }
    let mut worst_z: f64 = 0.0;
    for (i, k) in [2.0, 5.0].into_iter().enumerate() {
        let ch = ChannelModel::rician(k).unwrap();
        let sampler = ch.sampler().unwrap();
        for (j, rho) in log_grid(0.05, 50.0, 10).into_iter().enumerate() {
            let est: Estimate = mc_mean(10_000_000, 2024 + i as u64, j as u64, |rng| (-rho * sampler.sample(rng)).exp());
            let lt = ch.laplace(rho).unwrap().value;
            worst_z = worst_z.max((est.mean - lt).abs() / est.stderr);
        }
    }
    check(
        worst <= 1e-12 && worst_z <= 4.0,
        format!("nakagami max rel err {worst:.1e}; rician vs 1e7-sample MC max |z| = {worst_z:.2}"),
    )
}

fn c9() -> Check {
    let metrics = [
        MetricFunction::mpsk(2).unwrap(),
        MetricFunction::mpsk(4).unwrap(),
        MetricFunction::mpsk(8).unwrap(),
        MetricFunction::mqam(4).unwrap(),
        MetricFunction::mqam(16).unwrap(),
        MetricFunction::mqam(64).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for f in metrics {
        for s in log_grid(0.01, 100.0, 10) {
            let r = f.bernstein_transform(s).unwrap();
            worst = worst.max((r - f.instant(s).unwrap()).abs());
        }
    }
    check(worst <= 1e-6, format!("max |transform - SER| = {worst:.1e}"))
}

fn c10() -> Check {
    let grid = log_grid(1e-3, 50.0, 40);
    let mut failures = Vec::new();
    let metrics = [
        MetricFunction::Dpsk,
        MetricFunction::BPSK,
        MetricFunction::a_q_sqrt_b(3.0, 0.7).unwrap(),
        MetricFunction::mpsk(4).unwrap(),
        MetricFunction::mpsk(8).unwrap(),
        MetricFunction::mqam(16).unwrap(),
        MetricFunction::mqam(64).unwrap(),
    ];
    for f in metrics {
        let r = certify_cm(|s| f.instant(s).unwrap(), 4, &grid).unwrap();
        if !r.passes {
            failures.push(format!("{f}"));
        }
    }
    let compound = [
        NoiseModel::compound(ChannelModel::Rayleigh).unwrap(),
        NoiseModel::compound(ChannelModel::lognormal(4.0).unwrap()).unwrap(),
        NoiseModel::compound(ChannelModel::nakagami(2.5).unwrap()).unwrap(),
    ];
    for n in &compound {
        let r = certify_cm(|s| n.conditional_ber(s).unwrap(), 4, &grid).unwrap();
        if !r.passes {
            failures.push(format!("{n}: {:?}", r.violations.first()));
        }
    }
    let uniform = NoiseModel::uniform(3f64.sqrt()).unwrap();
    let u = certify_cm(|s| uniform.conditional_ber(s).unwrap(), 4, &grid).unwrap();
    let second_diff = u.violations.iter().any(|v| v.derivative == 2);
    let rejected = !u.passes && (second_diff || u.compact_support.is_some());
    check(
        failures.is_empty() && rejected,
        format!(
            "{} of {} c.m. candidates rejected{}; uniform: second-difference violation {second_diff}, compact support at {:?}",
            failures.len(),
            metrics.len() + compound.len(),
            if failures.is_empty() { String::new() } else { format!(" ({})", failures.join("; ")) },
            u.compact_support
        ),
    )
}

fn c11() -> Check {
    let ch = |s: &str| stochord::expr::parse_channel(s).unwrap();
    let battery = [
        ("rician(k=2)", "rician(k=5)"),
        ("nakagami(m=1)", "nakagami(m=2)"),
        ("pareto(beta=2)", "pareto(beta=5)"),
        ("rayleigh", "lognormal(sigma_db=6)"),
        ("scaled(rayleigh, gain=0.5)", "rayleigh"),
        ("nakagami(m=0.5)", "nakagami(m=3)"),
        ("lognormal(sigma_db=8)", "lognormal(sigma_db=4)"),
        ("rician(k=1)", "nakagami(m=3)"),
        ("rayleigh", "scaled(nakagami(m=2), gain=2)"),
        ("product(rayleigh, nakagami(m=4))", "rayleigh"),
    ];
    let (xg, rg) = (default_x_grid(), default_rho_grid());
    let mut broken = Vec::new();
    let mut premises = 0;
    for (x, y) in battery {
        let a = implication_audit(&ch(x), &ch(y), &xg, &rg).unwrap();
        premises += [&a.st_xy, &a.st_yx, &a.cx_xy, &a.cx_yx].iter().filter(|v| v.holds()).count();
        if !a.consistent() {
            broken.push(format!("{x} vs {y}: {}", a.violations.join("; ")));
        }
    }
    check(
        broken.is_empty(),
        format!(
            "{} pairs, {premises} st/cx premises hold, {} violations{}",
            battery.len(),
            broken.len(),
            if broken.is_empty() { String::new() } else { format!(": {}", broken.join(" | ")) }
        ),
    )
}

fn c12() -> Check {
    let n2 = ChannelModel::nakagami(2.0).unwrap();
    let one = ChannelModel::point_mass(1.0).unwrap();
    let grid = db_grid(-10.0, 30.0, 1.0).unwrap();
    let mut worst_residual: f64 = 0.0;
    let mut point_mass_err: f64 = 0.0;
    let mut chain_breaks = Vec::new();
    let mut correct_chain = true;
    for &db in &grid {
        let rho = db_to_linear(db);
        let zt = oa_threshold(&n2, rho).unwrap();
        worst_residual = worst_residual.max(oa_constraint(&n2, zt, rho).unwrap().abs() / rho);
        let z1 = oa_threshold(&one, rho).unwrap();
        point_mass_err = point_mass_err
            .max((z1 - 1.0 / (1.0 + rho)).abs())
            .max((oa_capacity(&one, rho).unwrap() - rho.ln_1p()).abs());
        let (ci, oa, erg) = (
            ci_capacity(&n2, rho).unwrap(),
            oa_capacity(&n2, rho).unwrap(),
            ergodic_capacity(&n2, rho).unwrap(),
        );
        if !(ci <= oa && oa <= erg) {
            chain_breaks.push((db, oa - erg));
        }
        correct_chain &= ci <= erg && erg <= oa;
    }
    let pass = worst_residual <= 1e-8 && point_mass_err <= 1e-9 && chain_breaks.is_empty();
    let first = chain_breaks
        .first()
        .map(|(db, gap)| format!(", first at {db} dB with C_oa - C_erg = {gap:.3e}"))
        .unwrap_or_default();
    check(
        pass,
        format!(
            "residual/rho max {worst_residual:.1e}; point-mass error {point_mass_err:.1e}; \
             C_ci <= C_oa <= C_erg broken at {} of {} points{first}; C_ci <= C_erg <= C_oa holds everywhere: {correct_chain}",
            chain_breaks.len(),
            grid.len()
        ),
    )
}

/// Per-hop BPSK decisions on `√(2ρX)·s + N`, forwarded hop by hop.
fn cascade_bit_error(channels: &[ChannelModel], rho: f64, n: u64, seed: u64) -> Estimate {
    let samplers: Vec<_> = channels.iter().map(|c| c.sampler().unwrap()).collect();
    mc_mean(n, seed, 0, |rng: &mut StreamRng| {
        let mut bit = 1.0;
        for s in &samplers {
            let x = s.sample(rng);
            let noise: f64 = rng.sample(rand_distr::StandardNormal);
            let r = bit * (2.0 * rho * x).sqrt() + noise;
            bit = if r >= 0.0 { 1.0 } else { -1.0 };
        }
        if bit < 0.0 {
            1.0
        } else {
            0.0
        }
    })
}

fn c13() -> Check {
    let (k2, k5) = (ChannelModel::rician(2.0).unwrap(), ChannelModel::rician(5.0).unwrap());
    let top = |c: &ChannelModel| Topology::iid(TopologyKind::MultiHopDf(3), c.clone()).unwrap();
    let grid = db_grid(-10.0, 30.0, 0.5).unwrap();
    let seed = derive_seed(1, "df-audit");
    let mut violations = 0;
    for (i, &db) in grid.iter().enumerate() {
        let rho = db_to_linear(db);
        let a = simulate_system(&top(&k2), &MetricFunction::BPSK, rho, 1_000_000, seed ^ (2 * i as u64)).unwrap();
        let b = simulate_system(&top(&k5), &MetricFunction::BPSK, rho, 1_000_000, seed ^ (2 * i as u64 + 1)).unwrap();
        if b.mean - a.mean > 3.0 * a.stderr.hypot(b.stderr) {
            violations += 1;
        }
    }
    // analytic composition against an explicit bit cascade
    let mut worst_z: f64 = 0.0;
    for (j, db) in [-5.0, 0.0, 5.0, 10.0, 15.0].into_iter().enumerate() {
        let rho = db_to_linear(db);
        let composed = simulate_system(&top(&k2), &MetricFunction::BPSK, rho, 1_000_000, 11 + j as u64).unwrap();
        let links = vec![k2.clone(); 3];
        let brute = cascade_bit_error(&links, rho, 4_000_000, 101 + j as u64);
        worst_z = worst_z.max((composed.mean - brute.mean).abs() / composed.stderr.hypot(brute.stderr));
    }
    // and the composition rule itself at fixed per-hop error rates
    let p = [q_function(0.3), q_function(1.1), q_function(2.0)];
    let direct = df_combined_error(&p).unwrap();
    let mut rule = 0.0;
    for mask in 0u32..8 {
        let odd = mask.count_ones() % 2 == 1;
        let prob: f64 = (0..3).map(|h| if mask >> h & 1 == 1 { p[h] } else { 1.0 - p[h] }).product();
        if odd {
            rule += prob;
        }
    }
    check(
        violations == 0 && worst_z <= 3.0 && (direct - rule).abs() < 1e-14,
        format!(
            "{violations} ordering violations over {} points; composed vs bit cascade max |z| = {worst_z:.2}",
            grid.len()
        ),
    )
}

fn c14() -> Check {
    let bin = env!("CARGO_BIN_EXE_stochord");
    let mut details = Vec::new();
    let mut pass = true;
    for args in [
        vec!["reproduce-figure", "3", "--samples", "200000", "--grid", "-10:30:2"],
        vec!["reproduce-figure", "8", "--samples", "50000", "--grid", "-10:30:5"],
        vec!["reproduce-figure", "9", "--samples", "100000", "--grid", "-10:30:5"],
    ] {
        let outs: Vec<Vec<u8>> = ["1", "2", "7"]
            .iter()
            .map(|t| {
                let o = std::process::Command::new(bin)
                    .args(&args)
                    .args(["--threads", t, "--seed", "99"])
                    .env_remove("STOCHORD_SEED")
                    .output()
                    .unwrap();
                assert!(o.status.success());
                o.stdout
            })
            .collect();
        let same = outs.windows(2).all(|w| w[0] == w[1]) && !outs[0].is_empty();
        pass &= same;
        details.push(format!("figure {}: {}", args[1], if same { "identical" } else { "differs" }));
    }
    check(pass, format!("threads 1/2/7: {}", details.join(", ")))
}

fn main() {
    type Criterion = (u32, &'static str, fn() -> Check);
    let criteria: Vec<Criterion> = vec![
        (1, "dpsk pareto crossover", c1),
        (2, "pareto ergodic capacity ordering", c2),
        (3, "mrc/egc uniform ordering", c3),
        (4, "selection combining crossover", || single_crossover(7, -0.4)),
        (5, "af relay uniform ordering", || uniform_ordering(8)),
        (6, "alpha-stable noise uniform ordering", || uniform_ordering(9)),
        (7, "uniform noise crossover", || single_crossover(10, 2.6)),
        (8, "laplace transform oracles", c8),
        (9, "bernstein reconstruction", c9),
        (10, "complete monotonicity certification", c10),
        (11, "order implication audit", c11),
        (12, "water-filling", c12),
        (13, "decode-and-forward ordering", c13),
        (14, "thread-count determinism", c14),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut gating = Vec::new();
    let mut passed = 0;
    let mut ran = 0;
    for (id, name, f) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        ran += 1;
        let t = Instant::now();
        let c = f();
        let secs = t.elapsed().as_secs_f64();
        let known = KNOWN_FAILURES.contains(&id);
        let status = if c.pass { "PASS" } else { "FAIL" };
        let note = match (c.pass, known) {
            (false, true) => " [known, non-gating]",
            (true, true) => " [known failure now passes]",
            _ => "",
        };
        println!("criterion {id:>2} {status}{note} {name}: {} ({secs:.1} s)", c.detail);
        if c.pass {
            passed += 1;
        } else if !known {
            gating.push(id);
        }
    }
    println!("acceptance: {passed}/{ran} criteria pass");
    if !gating.is_empty() {
        println!("unexpected failures: {gating:?}");
        std::process::exit(1);
    }
}
