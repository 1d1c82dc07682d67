//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (visible with `--nocapture`). Exact identities run in rational
//! arithmetic; desk-scale simulation criteria use fixed seeds, so the
//! suite is deterministic. The edge-universality comparison is marked
//! `#[ignore]` because of its runtime; run it with
//! `cargo test --release -p jackgas --test acceptance -- --ignored`.

use std::time::Instant;

use jackgas::asymptotics::{
    clt_covariance, clt_covariance_series, edge_rate, edge_rate_integrand, gbe_sample,
    edge_compare,
};
use jackgas::ensemble::{build_model, Case, CaseParams};
use jackgas::equilibrium::{band_endpoints, phi_limits, r_mu, EquilibriumDensity};
use jackgas::mcmc::{run_chains, ChainConfig, EmpiricalMeasure, InitState};
use jackgas::oracle::{run_suite, Suite};
use jackgas::poly::Poly;
use num_complex::Complex64;

fn case_ii_desk() -> CaseParams {
    CaseParams::new(Case::II, 1.0, 200).with_ab(0.7, 0.7).with_m_count(300)
}

/// Piecewise-linear CDF of an equilibrium density on a fine grid, cheap
/// enough to evaluate at every pooled sample point.
fn grid_cdf(eq: &EquilibriumDensity, cells: usize) -> impl Fn(f64) -> f64 {
    let edge = eq.info().right_edge;
    let h = edge / cells as f64;
    let mut cum = Vec::with_capacity(cells + 1);
    cum.push(0.0);
    let mut acc = 0.0;
    let mut prev = eq.density(0.0);
    for i in 1..=cells {
        let x = i as f64 * h;
        let cur = eq.density(x);
        acc += 0.5 * (prev + cur) * h;
        cum.push(acc);
        prev = cur;
    }
    let total = *cum.last().unwrap();
    move |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= edge {
            return 1.0;
        }
        let u = x / h;
        let i = (u as usize).min(cells - 1);
        let w = u - i as f64;
        ((1.0 - w) * cum[i] + w * cum[i + 1]) / total
    }
}

/// Runs the chains and returns the KS distance of the pooled rescaled
/// particle positions against the equilibrium CDF.
fn lln_ks(p: &CaseParams, cfg: &ChainConfig) -> f64 {
    let model = build_model(p).expect("valid params");
    let eq = EquilibriumDensity::new(p).expect("valid params");
    let cdf = grid_cdf(&eq, 8000);
    let outputs = run_chains(&model, cfg).expect("chains run");
    let samples: Vec<_> = outputs
        .iter()
        .flat_map(|c| c.samples.iter().map(|(_, lam)| lam))
        .collect();
    let emp = EmpiricalMeasure::from_samples(&model, samples, model.k() as f64)
        .expect("samples");
    emp.ks_distance(cdf)
}

/// Mean of `|lambda| / N^2` over chains and samples.
fn mcmc_mean_size(p: &CaseParams, cfg: &ChainConfig) -> f64 {
    let model = build_model(p).expect("valid params");
    let outputs = run_chains(&model, cfg).expect("chains run");
    let mut total = 0.0;
    let mut count = 0usize;
    for chain in &outputs {
        for (_, lam) in &chain.samples {
            total += lam.weight() as f64;
            count += 1;
        }
    }
    total / count as f64 / (p.n as f64 * p.n as f64)
}

#[test]
fn a01_exact_normalization_suite() {
    let start = Instant::now();
    let reports = run_suite(Suite::Normalization, 6).expect("suite runs");
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed()).collect();
    println!(
        "criterion 01 (exact normalization, {} instances): {} [{:.1?}]",
        reports.len(),
        if failed.is_empty() { "PASS" } else { "FAIL" },
        start.elapsed()
    );
    assert!(failed.is_empty(), "{failed:?}");
    assert!(start.elapsed().as_secs() < 60, "over the 60 s budget");
}

#[test]
fn a02_specialization_formulas() {
    let start = Instant::now();
    let reports = run_suite(Suite::Jack, 6).expect("suite runs");
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed()).collect();
    println!(
        "criterion 02 (specialization formulas, degree <= 6): {} [{:.1?}]",
        if failed.is_empty() { "PASS" } else { "FAIL" },
        start.elapsed()
    );
    assert!(failed.is_empty(), "{failed:?}");
    assert!(start.elapsed().as_secs() < 120, "over the 120 s budget");
}

#[test]
fn a03_pmf_identification() {
    let start = Instant::now();
    let reports = run_suite(Suite::Pmf, 6).expect("suite runs");
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed()).collect();
    let worst = reports.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
    println!(
        "criterion 03 (pmf identification, worst deviation {worst:.2e}): {} [{:.1?}]",
        if failed.is_empty() { "PASS" } else { "FAIL" },
        start.elapsed()
    );
    assert!(failed.is_empty(), "{failed:?}");
    assert!(start.elapsed().as_secs() < 30, "over the 30 s budget");
}

#[test]
fn a04_nekrasov_polynomiality() {
    let start = Instant::now();
    let reports = run_suite(Suite::Nekrasov, 6).expect("suite runs");
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed()).collect();
    let worst = reports.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
    println!(
        "criterion 04 (Nekrasov polynomiality, worst residual {worst:.2e}): {} [{:.1?}]",
        if failed.is_empty() { "PASS" } else { "FAIL" },
        start.elapsed()
    );
    assert!(failed.is_empty(), "{failed:?}");
    assert!(start.elapsed().as_secs() < 60, "over the 60 s budget");
}

#[test]
fn a05_lln_case_ii_desk_run() {
    let start = Instant::now();
    let p = case_ii_desk();
    // 2000 burn-in sweeps plus 500 samples at thinning 20.
    let base = ChainConfig::new(12_000, 2_000, 20, 11);
    let ks = lln_ks(&p, &base);
    let doubled = ChainConfig::new(24_000, 2_000, 20, 11);
    let ks_doubled = lln_ks(&p, &doubled);
    let top = ChainConfig::new(12_000, 2_000, 20, 11).with_init(InitState::FullBox);
    let ks_top = lln_ks(&p, &top);
    let pass = ks <= 0.05
        && (ks - ks_doubled).abs() <= 0.01
        && (ks - ks_top).abs() <= 0.01;
    println!(
        "criterion 05 (LLN Case II desk run): {} - KS {ks:.4}, doubled {ks_doubled:.4}, \
         top start {ks_top:.4} [{:.1?}]",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed()
    );
    assert!(ks <= 0.05, "KS = {ks}");
    assert!((ks - ks_doubled).abs() <= 0.01, "{ks} vs doubled {ks_doubled}");
    assert!((ks - ks_top).abs() <= 0.01, "{ks} vs top start {ks_top}");
    assert!(start.elapsed().as_secs() < 600, "over the 10 min budget");
}

#[test]
fn a06_lln_remaining_cases() {
    let start = Instant::now();
    let schedule = ChainConfig::new(12_000, 2_000, 20, 13);
    let mut lines = Vec::new();
    let mut ok = true;

    let case_i = CaseParams::new(Case::I, 1.0, 150).with_ab(0.7, 0.7).with_m_count(225);
    let mut case_iii = CaseParams::new(Case::III, 1.0, 200).with_t(1.0);
    case_iii.a = Some(1.0);
    for p in [case_i, case_iii] {
        let ks = lln_ks(&p, &schedule);
        ok &= ks <= 0.05;
        lines.push(format!("{} KS {ks:.4}", p.case));
    }

    let case_iv = CaseParams::new(Case::IV, 1.0, 40).with_ab(0.5, 0.5).with_m_count(40);
    let mut case_v = CaseParams::new(Case::V, 1.0, 40).with_t(0.5);
    case_v.a = Some(1.0);
    let case_vi = CaseParams::new(Case::VI, 1.0, 40).with_t12(1.0, 1.0);
    for p in [case_iv, case_v, case_vi] {
        let d = p.resolved_d().unwrap();
        let ks = lln_ks(&p, &schedule);
        let ks2 = lln_ks(&p.clone().with_d(2 * d), &schedule);
        ok &= ks <= 0.05 && ks2 <= 0.05 && (ks - ks2).abs() <= 0.01;
        lines.push(format!("{} KS {ks:.4} (d={d}), {ks2:.4} (d={})", p.case, 2 * d));
    }
    println!(
        "criterion 06 (LLN Cases I, III-VI): {} - {} [{:.1?}]",
        if ok { "PASS" } else { "FAIL" },
        lines.join("; "),
        start.elapsed()
    );
    assert!(ok, "{lines:?}");
    assert!(start.elapsed().as_secs() < 1800, "over the 30 min budget");
}

#[test]
fn a07_moment_identities_mcmc() {
    let start = Instant::now();
    // 30 independent chains per case; the estimator pools 8 spaced
    // samples per chain after a generous burn-in.
    let cfg = ChainConfig::new(3_300, 2_500, 100, 17).with_chains(30);
    let mut lines = Vec::new();
    let mut ok = true;

    let case_ii = CaseParams::new(Case::II, 1.0, 48).with_ab(0.7, 0.7).with_m_count(72);
    let ab = 0.49;
    let expect_ii = 1.5 * ab / (1.0 + ab);
    let case_iv = CaseParams::new(Case::IV, 1.0, 24).with_ab(0.5, 0.5).with_m_count(24);
    let expect_iv = 0.25 / 0.75;
    let mut case_v = CaseParams::new(Case::V, 1.0, 24).with_t(0.5);
    case_v.a = Some(1.0);
    let expect_v = 0.5;
    let case_vi = CaseParams::new(Case::VI, 1.0, 16).with_t12(1.0, 1.0);
    let expect_vi = 1.0;

    for (p, expect) in [
        (case_ii, expect_ii),
        (case_iv, expect_iv),
        (case_v, expect_v),
        (case_vi, expect_vi),
    ] {
        let got = mcmc_mean_size(&p, &cfg);
        let rel = (got - expect).abs() / expect;
        ok &= rel <= 0.02;
        lines.push(format!("{}: {got:.5} vs {expect:.5} ({:.2}%)", p.case, 100.0 * rel));
    }
    println!(
        "criterion 07 (moment identities, >= 30 chains): {} - {} [{:.1?}]",
        if ok { "PASS" } else { "FAIL" },
        lines.join("; "),
        start.elapsed()
    );
    assert!(ok, "{lines:?}");
}

#[test]
fn a08_equilibrium_self_consistency() {
    let start = Instant::now();
    let mut worst_loop = 0.0f64;
    let mut worst_q = 0.0f64;
    let mut case_v = CaseParams::new(Case::V, 1.0, 100).with_t(0.5);
    case_v.a = Some(1.0);
    let mut case_iii = CaseParams::new(Case::III, 1.0, 100).with_t(1.0);
    case_iii.a = Some(1.0);
    let all = vec![
        CaseParams::new(Case::I, 1.0, 100).with_ab(0.7, 0.7).with_m_ratio(1.5),
        case_ii_desk(),
        case_iii,
        CaseParams::new(Case::IV, 1.0, 100).with_ab(0.5, 0.5).with_m_ratio(1.0),
        case_v,
        CaseParams::new(Case::VI, 1.0, 100).with_t12(1.0, 1.0),
    ];
    for p in &all {
        let eq = EquilibriumDensity::new(p).unwrap();
        let (pm, pp) = phi_limits(p).unwrap();
        let r = r_mu(p).unwrap();
        let theta = p.theta;
        let (lo, hi) = eq.support();
        let center = Complex64::new(0.5 * (lo + hi), 0.0);
        // 100 off-support points on two rings.
        for ring in 0..2 {
            let radius = (hi - lo).max(1.0) * (0.8 + 1.2 * ring as f64);
            for k in 0..50 {
                let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / 50.0;
                let z = center + radius * Complex64::new(ang.cos(), ang.sin());
                let g = eq.stieltjes(z).unwrap();
                let lhs = pm.eval_c(z) * (-theta * g).exp() + pp.eval_c(z) * (theta * g).exp();
                let dev = (lhs - r.eval_c(z)).norm();
                worst_loop = worst_loop.max(dev);
                if p.case == Case::II {
                    let info = band_endpoints(p).unwrap();
                    let (alpha, beta) = info.band;
                    let q = pm.eval_c(z) * (-theta * g).exp() - pp.eval_c(z) * (theta * g).exp();
                    let ab = p.a.unwrap() * p.b.unwrap();
                    let root = (((z - alpha).ln() + (z - beta).ln()) * 0.5).exp();
                    worst_q = worst_q.max((q - (1.0 + ab) * root).norm());
                }
            }
        }
    }
    let pass = worst_loop <= 1e-6 && worst_q <= 1e-6;
    println!(
        "criterion 08 (equilibrium self-consistency): {} - worst loop residual {worst_loop:.2e}, \
         worst Q residual {worst_q:.2e} [{:.1?}]",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed()
    );
    assert!(worst_loop <= 1e-6);
    assert!(worst_q <= 1e-6);
    assert!(start.elapsed().as_secs() < 60, "over the 60 s budget");
}

#[test]
fn a09_clt_covariance() {
    let start = Instant::now();
    let p = case_ii_desk();
    let ident = Poly::new(vec![0.0, 1.0]);
    let numeric = clt_covariance(&ident, &ident, &p, 2048).unwrap();
    let series = clt_covariance_series(&ident, &ident, &p).unwrap();
    let quad_dev = (numeric.value - series).abs();

    // Variance of sum_i l_i / N across independent chains. In this case
    // |lambda| is exactly Binomial(NM, ab/(1+ab)), so the limit formula
    // value is also the exact finite-N variance.
    let cfg = ChainConfig::new(3_100, 2_200, 150, 23).with_chains(240);
    let model = build_model(&p).unwrap();
    let outputs = run_chains(&model, &cfg).unwrap();
    let n = p.n as f64;
    let values: Vec<f64> = outputs
        .iter()
        .flat_map(|c| c.samples.iter().map(|(_, lam)| lam.weight() as f64 / n))
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
        / (values.len() - 1) as f64;
    let rel = (var - series).abs() / series;

    let pass = quad_dev <= 1e-8 && rel <= 0.15;
    println!(
        "criterion 09 (CLT): {} - quadrature vs oracle {quad_dev:.2e}, MCMC variance {var:.4} \
         vs formula {series:.4} ({:.1}%, {} values from {} chains) [{:.1?}]",
        if pass { "PASS" } else { "FAIL" },
        100.0 * rel,
        values.len(),
        cfg.chains,
        start.elapsed()
    );
    assert!(quad_dev <= 1e-8, "quadrature vs series oracle: {quad_dev}");
    assert!(rel <= 0.15, "MCMC variance {var} vs formula {series}");
    assert!(start.elapsed().as_secs() < 1800, "over the 30 min budget");
}

#[test]
fn a10_edge_ldp_rate_function() {
    let start = Instant::now();
    let p = case_ii_desk();
    let info = band_endpoints(&p).unwrap();
    let beta = info.band.1;
    let top = p.resolved_m_ratio().unwrap() + p.theta;

    assert_eq!(edge_rate(beta, &p).unwrap(), 0.0, "I(beta) != 0");

    let mut prev = -1.0;
    let mut monotone = true;
    for i in 0..=1000 {
        let t = beta + (top - 1e-6 - beta) * i as f64 / 1000.0;
        let v = edge_rate(t, &p).unwrap();
        monotone &= v >= prev - 1e-12;
        prev = v;
    }

    let integrand = edge_rate_integrand(&p).unwrap();
    let mut worst_fd = 0.0f64;
    for &t in &[beta + 0.03, beta + 0.08, beta + 0.12, beta + 0.17] {
        let h = 1e-5;
        let fd = (edge_rate(t + h, &p).unwrap() - edge_rate(t - h, &p).unwrap()) / (2.0 * h);
        worst_fd = worst_fd.max((fd - integrand(t)).abs());
    }
    let pass = monotone && worst_fd <= 1e-6;
    println!(
        "criterion 10 (edge LDP rate): {} - I(beta) = 0, nondecreasing on 10^3 grid, \
         worst FD-vs-integrand {worst_fd:.2e} [{:.1?}]",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed()
    );
    assert!(monotone);
    assert!(worst_fd <= 1e-6);
    assert!(start.elapsed().as_secs() < 60, "over the 60 s budget");
}

/// Optional (loose) edge-universality comparison at desk scale; the
/// statement is asymptotic, so this is only a coarse KS check. Runs in
/// tens of minutes on one core, hence ignored by default.
#[test]
#[ignore = "optional desk-scale edge-universality check (long); run with -- --ignored"]
fn a11_edge_universality_optional() {
    let start = Instant::now();
    let p = CaseParams::new(Case::II, 1.0, 400).with_ab(0.7, 0.7).with_m_count(600);
    let model = build_model(&p).unwrap();
    let chains = 300u64;
    let cfg = ChainConfig::new(5_001, 5_000, 1, 29).with_chains(chains);
    let outputs = run_chains(&model, &cfg).unwrap();
    let n = p.n;
    let tops: Vec<f64> = outputs
        .iter()
        .filter_map(|c| c.samples.last())
        .map(|(_, lam)| {
            (lam.row(1) as f64 + (model.k() as f64 - 1.0) * model.theta()) / n as f64
        })
        .collect();
    let beta = 2.0 * p.theta;
    let gbe_tops: Vec<f64> = (0..chains)
        .map(|i| gbe_sample(n as usize, beta, 0xEDBE ^ i).unwrap()[0])
        .collect();
    let ks = edge_compare(&p, n, &tops, &gbe_tops).unwrap();
    let pass = ks <= 0.15;
    println!(
        "criterion 11 (edge universality, optional): {} - KS {ks:.4} over {} chains [{:.1?}]",
        if pass { "PASS" } else { "FAIL" },
        tops.len(),
        start.elapsed()
    );
    assert!(ks <= 0.15, "KS = {ks}");
}
