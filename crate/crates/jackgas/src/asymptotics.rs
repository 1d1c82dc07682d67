//! Case II asymptotics: CLT covariance by double contour integration,
//! the edge large-deviation rate function, the global energy functional,
//! and a Gaussian beta-ensemble reference sampler for edge comparison.
//!
//! The covariance kernel is diagonalized by the Joukowski map
//! `z = c + g (x + 1/x)/2` with `c = (alpha + beta)/2`, `g = (beta - alpha)/2`:
//! for polynomial test functions `Cov(f, h) = theta^{-1} sum_{k>=1} k f_k h_k`
//! where `f_k` are the (symmetric) Laurent coefficients of `f(z(x))`. The
//! numeric route integrates the kernel over two nested circles enclosing
//! `[alpha, beta]` with the trapezoid rule; the Laurent route is kept as
//! an independent algebraic oracle. The normalization is pinned by an
//! exact finite-size identity: in Case II the total size `|lambda|` is
//! Binomial(NM, ab/(1+ab)) for every theta, so `Var(sum_i l_i / N)` is
//! exactly `M ab / (N (1+ab)^2)`, which the kernel must reproduce as
//! `theta^{-1} (beta - alpha)^2 / 16` for the identity test function.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::ensemble::{Case, CaseParams};
use crate::equilibrium::{band_endpoints, EquilibriumDensity};
use crate::error::{Error, Result};
use crate::mcmc::ks_two_sample;
use crate::poly::Poly;
use crate::quad;

/// The square root of `(z - a)(z - b)` with branch cut only on `[a, b]`
/// and asymptotic to `z` at infinity, realized as
/// `exp((log(z - a) + log(z - b)) / 2)` with principal logarithms (their
/// cuts on `(-inf, a]` and `(-inf, b]` cancel).
pub fn sqrt_branch(z: Complex64, a: f64, b: f64) -> Result<Complex64> {
    if z.im == 0.0 && z.re >= a && z.re <= b {
        return Err(Error::Domain(format!("z = {z} lies on the cut [{a}, {b}]")));
    }
    Ok(sqrt_branch_unchecked(z, a, b))
}

fn sqrt_branch_unchecked(z: Complex64, a: f64, b: f64) -> Complex64 {
    (((z - a).ln() + (z - b).ln()) * 0.5).exp()
}

/// Result of a numeric contour integration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CltResult {
    pub value: f64,
    /// Difference against the half-resolution rule.
    pub error_estimate: f64,
    /// Nodes per contour at the finest level.
    pub nodes: usize,
    /// The imaginary residue that was discarded (must be tiny).
    pub imaginary_residue: f64,
    /// Set when the band is degenerate (`ab m = theta` or `m = ab theta`);
    /// the formula is still evaluated.
    pub degenerate: bool,
}

fn case_ii_band(p: &CaseParams) -> Result<(f64, f64, bool)> {
    if p.case != Case::II {
        return Err(Error::Parameter(
            "the CLT/edge formulas are implemented for Case II".into(),
        ));
    }
    let info = band_endpoints(p)?;
    Ok((info.band.0, info.band.1, info.degenerate))
}

/// CLT covariance of two polynomial linear statistics by trapezoid
/// quadrature on two nested circles around the band.
///
/// The kernel is `theta^{-1} f(z) g(w) (A(z,w) - 2) / (4 (z-w)^2)` with
/// `A = ((z-a)(w-b) + (w-a)(z-b)) / (sqrt((z-a)(z-b)) sqrt((w-a)(w-b)))`,
/// whose double contour integral is the Gaussian limit covariance of
/// `sum_i f(l_i/N)` and `sum_i g(l_i/N)`.
pub fn clt_covariance(f: &Poly, g: &Poly, p: &CaseParams, nodes: usize) -> Result<CltResult> {
    let (alpha, beta, degenerate) = case_ii_band(p)?;
    if beta <= alpha || beta.is_nan() {
        return Err(Error::Config("degenerate band: beta <= alpha".into()));
    }
    let coarse = integrate_kernel(f, g, p.theta, alpha, beta, (nodes / 2).max(8));
    let fine = integrate_kernel(f, g, p.theta, alpha, beta, nodes.max(16));
    Ok(CltResult {
        value: fine.re,
        error_estimate: (fine - coarse).norm(),
        nodes: nodes.max(16),
        imaginary_residue: fine.im.abs(),
        degenerate,
    })
}

fn integrate_kernel(
    f: &Poly,
    g: &Poly,
    theta: f64,
    alpha: f64,
    beta: f64,
    m: usize,
) -> Complex64 {
    let c0 = Complex64::new(0.5 * (alpha + beta), 0.0);
    let half = 0.5 * (beta - alpha);
    // Both circles enclose the cut with margin and stay separated, so the
    // (z - w)^{-2} factor is harmless.
    let r_in = 1.35 * half;
    let r_out = 2.1 * half;
    let step = 2.0 * std::f64::consts::PI / m as f64;
    // Offset the outer grid by half a step so nodes never align radially.
    let zs: Vec<(Complex64, Complex64)> = (0..m)
        .map(|j| {
            let ang = step * (j as f64 + 0.5);
            let dir = Complex64::new(ang.cos(), ang.sin());
            (c0 + r_out * dir, r_out * dir)
        })
        .collect();
    let ws: Vec<(Complex64, Complex64)> = (0..m)
        .map(|j| {
            let ang = step * j as f64;
            let dir = Complex64::new(ang.cos(), ang.sin());
            (c0 + r_in * dir, r_in * dir)
        })
        .collect();
    let sw: Vec<Complex64> = ws
        .iter()
        .map(|&(w, _)| sqrt_branch_unchecked(w, alpha, beta))
        .collect();
    let gw: Vec<Complex64> = ws.iter().map(|&(w, _)| g.eval_c(w)).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for &(z, tz) in &zs {
        let fz = f.eval_c(z);
        let sz = sqrt_branch_unchecked(z, alpha, beta);
        for (k, &(w, tw)) in ws.iter().enumerate() {
            let a_zw = ((z - alpha) * (w - beta) + (w - alpha) * (z - beta)) / (sz * sw[k]);
            let kernel = (a_zw - 2.0) / (4.0 * (z - w) * (z - w));
            total += fz * gw[k] * kernel * tz * tw;
        }
    }
    total / (theta * (m * m) as f64)
}

/// Laurent coefficients (`k >= 0`) of `f(c + g (x + 1/x) / 2)`.
fn joukowski_coeffs(f: &Poly, c: f64, g: f64) -> Vec<f64> {
    // Horner over Laurent polynomials: acc = acc * u + a_j with
    // u = c + g(x + 1/x)/2.
    let mut acc: BTreeMap<i64, f64> = BTreeMap::new();
    for &a in f.coeffs().iter().rev() {
        let mut next: BTreeMap<i64, f64> = BTreeMap::new();
        for (&e, &v) in &acc {
            *next.entry(e).or_insert(0.0) += v * c;
            *next.entry(e + 1).or_insert(0.0) += v * g / 2.0;
            *next.entry(e - 1).or_insert(0.0) += v * g / 2.0;
        }
        *next.entry(0).or_insert(0.0) += a;
        acc = next;
    }
    let top = acc.keys().next_back().copied().unwrap_or(0).max(0);
    (0..=top).map(|k| acc.get(&k).copied().unwrap_or(0.0)).collect()
}

/// Independent residue-series oracle for the covariance:
/// `theta^{-1} sum_{k>=1} k f_k g_k` over the Joukowski-Laurent
/// coefficients. Exact up to floating arithmetic.
pub fn clt_covariance_series(f: &Poly, g: &Poly, p: &CaseParams) -> Result<f64> {
    let (alpha, beta, _) = case_ii_band(p)?;
    let c = 0.5 * (alpha + beta);
    let half = 0.5 * (beta - alpha);
    let fc = joukowski_coeffs(f, c, half);
    let gc = joukowski_coeffs(g, c, half);
    let mut total = 0.0;
    for k in 1..fc.len().min(gc.len()) {
        total += k as f64 * fc[k] * gc[k];
    }
    Ok(total / p.theta)
}

/// Edge large-deviation rate function `I^Edge(t)` for Case II on
/// `t in [theta, m + theta)`.
///
/// Zero when `m <= ab theta`, or when `t <= beta`; otherwise
/// `int_beta^t 2 log[ ((1-ab) y + ab m - theta + (1+ab) sqrt((y-alpha)(y-beta)))
///                    / (2 sqrt(ab y (m + theta - y))) ] dy`.
/// The integrand vanishes like `sqrt(y - beta)` at the left end, which a
/// `y = beta + u^2` substitution removes; its logarithmic blow-up at the
/// right wall `m + theta` stays outside the admissible `t` range.
pub fn edge_rate(t: f64, p: &CaseParams) -> Result<f64> {
    let (_, beta, _) = case_ii_band(p)?;
    let theta = p.theta;
    let m = p.limit_m_ratio()?;
    let ab = p.a.unwrap() * p.b.unwrap();
    if !(theta..m + theta).contains(&t) {
        return Err(Error::Domain(format!(
            "t = {t} outside [theta, m + theta) = [{theta}, {})",
            m + theta
        )));
    }
    if m <= ab * theta || t <= beta {
        return Ok(0.0);
    }
    let integrand = edge_rate_integrand(p)?;
    let (v, _) = quad::integrate(
        |u| integrand(beta + u * u) * 2.0 * u,
        0.0,
        (t - beta).sqrt(),
        1e-11,
        1e-11,
    )?;
    Ok(v)
}

/// The integrand of the edge rate (its derivative in `t` on `(beta, m + theta)`).
pub fn edge_rate_integrand(p: &CaseParams) -> Result<impl Fn(f64) -> f64> {
    let (alpha, beta, _) = case_ii_band(p)?;
    let theta = p.theta;
    let m = p.limit_m_ratio()?;
    let ab = p.a.unwrap() * p.b.unwrap();
    Ok(move |y: f64| {
        let root = ((y - alpha).max(0.0) * (y - beta).max(0.0)).sqrt();
        let num = (1.0 - ab) * y + ab * m - theta + (1.0 + ab) * root;
        let den = 2.0 * (ab * y * (m + theta - y)).sqrt();
        2.0 * (num / den).ln()
    })
}

/// The Case II external potential
/// `V(x) = x log x + (m + theta - x) log(m + theta - x) - x log(ab)`.
pub fn case_ii_potential(p: &CaseParams) -> Result<impl Fn(f64) -> f64> {
    if p.case != Case::II {
        return Err(Error::Parameter("the potential is the Case II one".into()));
    }
    let m = p.limit_m_ratio()?;
    let theta = p.theta;
    let log_ab = (p.a.unwrap() * p.b.unwrap()).ln();
    let edge = m + theta;
    Ok(move |x: f64| {
        let xl = if x > 0.0 { x * x.ln() } else { 0.0 };
        let yl = if edge - x > 0.0 { (edge - x) * (edge - x).ln() } else { 0.0 };
        xl + yl - x * log_ab
    })
}

/// The energy `E_V(mu) = int int [log|x-y|^{-1} + V(x)/2 + V(y)/2] dmu dmu`
/// of a density on `[0, m + theta]`, on a midpoint grid of `cells` cells.
/// Off-diagonal cells use the midpoint kernel value; each diagonal cell
/// uses the exact square integral `int int -log|x-y| = h^2 (3/2 - log h)`
/// against the piecewise-constant density.
pub fn global_energy<F: Fn(f64) -> f64>(density: F, p: &CaseParams, cells: usize) -> Result<f64> {
    let potential = case_ii_potential(p)?;
    let m = p.limit_m_ratio()?;
    let theta = p.theta;
    let edge = m + theta;
    let h = edge / cells as f64;
    let xs: Vec<f64> = (0..cells).map(|i| (i as f64 + 0.5) * h).collect();
    let mut masses = Vec::with_capacity(cells);
    for &x in &xs {
        let rho = density(x);
        if !(0.0..=1.0 / theta + 1e-9).contains(&rho) {
            return Err(Error::Domain(format!(
                "density({x}) = {rho} outside [0, 1/theta]"
            )));
        }
        masses.push(rho * h);
    }
    let total_mass: f64 = masses.iter().sum();
    let mut log_term = 0.0;
    for i in 0..cells {
        if masses[i] == 0.0 {
            continue;
        }
        log_term += masses[i] * masses[i] * (1.5 - h.ln());
        for j in 0..i {
            if masses[j] == 0.0 {
                continue;
            }
            log_term -= 2.0 * masses[i] * masses[j] * (xs[i] - xs[j]).ln();
        }
    }
    let v_term: f64 = xs.iter().zip(&masses).map(|(&x, &w)| potential(x) * w).sum();
    Ok(log_term + total_mass * v_term)
}

/// The global rate `I(mu) = theta (E_V(mu) - E_V(mu^II))`, comparing at
/// the same grid resolution.
pub fn global_rate<F: Fn(f64) -> f64>(density: F, p: &CaseParams, cells: usize) -> Result<f64> {
    let eq = EquilibriumDensity::new(p)?;
    let e_mu = global_energy(density, p, cells)?;
    let e_eq = global_energy(|x| eq.density(x), p, cells)?;
    Ok(p.theta * (e_mu - e_eq))
}

/// Eigenvalues of a symmetric tridiagonal matrix by the implicit-shift QL
/// algorithm, ascending; `diag` has length n, `off` length n-1. No
/// eigenvectors are accumulated.
pub fn symtridiag_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(Error::Domain("off-diagonal must have length n - 1".into()));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 50 {
                return Err(Error::Resource("QL iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Samples the spectrum of the Gaussian beta-ensemble with joint density
/// proportional to `prod |x_i - x_j|^beta exp(-N beta x_i^2 / 4)` via the
/// standard symmetric tridiagonal random matrix (Gaussian diagonal,
/// chi-distributed off-diagonal), returned in decreasing order.
///
/// The edge-universality comparison is cited for `beta = 2 theta >= 1`;
/// smaller beta still samples but sits outside that regime.
pub fn gbe_sample(n: usize, beta: f64, seed: u64) -> Result<Vec<f64>> {
    if n == 0 || beta <= 0.0 || beta.is_nan() {
        return Err(Error::Parameter("need n >= 1 and beta > 0".into()));
    }
    if n > 2000 {
        return Err(Error::Resource("spectrum sampling is limited to n <= 2000".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 2.0_f64.sqrt()).expect("valid normal");
    let mut diag = Vec::with_capacity(n);
    for _ in 0..n {
        diag.push(normal.sample(&mut rng));
    }
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let df = beta * (n - i) as f64;
        let chi2 =
            ChiSquared::new(df).map_err(|e| Error::Parameter(format!("chi-squared: {e}")))?;
        off.push(chi2.sample(&mut rng).sqrt());
    }
    let scale = 1.0 / (n as f64 * beta).sqrt();
    let mut eigs = symtridiag_eigenvalues(&diag, &off)?;
    for v in &mut eigs {
        *v *= scale;
    }
    eigs.reverse();
    Ok(eigs)
}

/// CDF of the semicircle law `(2 pi)^{-1} sqrt(4 - x^2)` on `[-2, 2]`.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + x * (4.0 - x * x).sqrt() / (4.0 * std::f64::consts::PI)
            + (x / 2.0).asin() / std::f64::consts::PI
    }
}

/// The semicircle upper quantile: `int_gamma^inf = q`.
pub fn semicircle_quantile_upper(q: f64) -> f64 {
    let target = 1.0 - q;
    let (mut lo, mut hi) = (-2.0, 2.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if semicircle_cdf(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The band-edge scale constant
/// `s_B = sqrt((1+ab)(beta-alpha)) / (2 theta sqrt(ab beta (m+theta-beta)))`.
pub fn s_b_constant(p: &CaseParams) -> Result<f64> {
    let (alpha, beta, _) = case_ii_band(p)?;
    let theta = p.theta;
    let m = p.limit_m_ratio()?;
    let ab = p.a.unwrap() * p.b.unwrap();
    Ok(((1.0 + ab) * (beta - alpha)).sqrt()
        / (2.0 * theta * (ab * beta * (m + theta - beta)).sqrt()))
}

/// Rescales top-particle positions `l_1 / N` to the edge-fluctuation
/// coordinate `(N s_B)^{2/3} (l_1/N - gamma^II_{1,N})`.
pub fn edge_rescale_ell(p: &CaseParams, n: u64, ell1_over_n: &[f64]) -> Result<Vec<f64>> {
    let eq = EquilibriumDensity::new(p)?;
    let gamma = eq.quantile_upper(0.5 / n as f64)?;
    let s_b = s_b_constant(p)?;
    let scale = (n as f64 * s_b).powf(2.0 / 3.0);
    Ok(ell1_over_n.iter().map(|&x| scale * (x - gamma)).collect())
}

/// Rescales GbetaE top eigenvalues to `N^{2/3} (X_1 - gamma^sc_{1,N})`.
pub fn edge_rescale_gbe(n: u64, x1: &[f64]) -> Vec<f64> {
    let gamma = semicircle_quantile_upper(0.5 / n as f64);
    let scale = (n as f64).powf(2.0 / 3.0);
    x1.iter().map(|&x| scale * (x - gamma)).collect()
}

/// Two-sample KS distance between the rescaled top-particle fluctuations
/// and the rescaled GbetaE top-eigenvalue fluctuations.
pub fn edge_compare(p: &CaseParams, n: u64, ell1_over_n: &[f64], gbe_x1: &[f64]) -> Result<f64> {
    let a = edge_rescale_ell(p, n, ell1_over_n)?;
    let b = edge_rescale_gbe(n, gbe_x1);
    Ok(ks_two_sample(&a, &b))
}
