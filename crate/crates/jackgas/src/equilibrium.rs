//! Closed-form equilibrium densities for the six cases.
//!
//! The density of the limiting particle measure is
//! `mu(x) = 1{0 < x < R + theta} (theta pi)^{-1} arccos( R_mu(x) / (2 sqrt(Phi^-(x) Phi^+(x))) )`
//! with the truncated arccosine, where `Phi^{pm}` are the loop-equation
//! limit polynomials and `R_mu` is a polynomial of degree at most two.
//! `R_mu` is both hard-coded per case and recomputed from the `1/z`
//! expansion of `Phi^- e^{-theta G} + Phi^+ e^{theta G}` (using only the
//! mass and, in the degree-two cases, the closed-form first moment); the
//! tests assert the two routes agree, which catches transcription slips.
//!
//! Support decomposes into at most three regions: a band where the
//! density lies strictly between 0 and `1/theta`, and a void (density 0)
//! or saturated (density `1/theta`) region on each side. Region kinds
//! come from the sign of `R_mu` at the region midpoint: off the band
//! `|R_mu| >= 2 sqrt(Phi^- Phi^+)`, so the sign alone decides whether the
//! arccosine sits at 0 or at pi.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensemble::{Case, CaseParams};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quad;

/// Arccosine truncated to `[0, pi]`: the usual arccos on `[-1, 1]`,
/// `pi` for `x <= -1`, `0` for `x >= 1`.
pub fn truncated_arccos(x: f64) -> f64 {
    if x <= -1.0 {
        std::f64::consts::PI
    } else if x >= 1.0 {
        0.0
    } else {
        x.acos()
    }
}

/// Arccos of the guarded ratio `num / (2 sqrt(q))`; `q <= 0` is resolved
/// by the sign of the numerator (junction points take the continuous value).
fn arccos_ratio(num: f64, q: f64) -> f64 {
    if q <= 0.0 {
        if num > 0.0 {
            0.0
        } else if num < 0.0 {
            std::f64::consts::PI
        } else {
            std::f64::consts::FRAC_PI_2
        }
    } else {
        truncated_arccos(num / (2.0 * q.sqrt()))
    }
}

/// Scaled parameters shared by the limit formulas.
struct Scaled {
    theta: f64,
    ab: f64,
    /// Ratio after the Case I role swap (`>= 1` there); raw ratio elsewhere.
    m: f64,
    at: f64,
    t1: f64,
    t2: f64,
    d: f64,
}

fn scaled(p: &CaseParams) -> Result<Scaled> {
    p.validate()?;
    let mut s = Scaled {
        theta: p.theta,
        ab: p.a.unwrap_or(1.0) * p.b.unwrap_or(1.0),
        m: 1.0,
        at: p.a.unwrap_or(1.0) * p.t.unwrap_or(1.0),
        t1: p.t1.unwrap_or(1.0),
        t2: p.t2.unwrap_or(1.0),
        d: 1.0,
    };
    match p.case {
        Case::I => {
            let m = p.limit_m_ratio()?;
            s.m = m.max(1.0 / m);
        }
        Case::II => s.m = p.limit_m_ratio()?,
        Case::IV => {
            s.m = p.limit_m_ratio()?;
            s.d = p.resolved_d()? as f64;
        }
        Case::V | Case::VI => s.d = p.resolved_d()? as f64,
        Case::III => {}
    }
    Ok(s)
}

/// The loop-equation limit polynomials `(Phi^-, Phi^+)` in the rescaled
/// particle coordinate `x = l / K`.
pub fn phi_limits(p: &CaseParams) -> Result<(Poly, Poly)> {
    let Scaled { theta, ab, m, at, t1, t2, d } = scaled(p)?;
    let pair = match p.case {
        Case::I => (
            Poly::new(vec![0.0, 1.0]),
            Poly::new(vec![ab * theta * (m - 1.0), ab]),
        ),
        Case::II => (
            Poly::new(vec![0.0, 1.0]),
            Poly::new(vec![ab * (m + theta), -ab]),
        ),
        Case::III => (Poly::new(vec![0.0, 1.0]), Poly::constant(at * theta)),
        Case::IV => {
            let w1 = Poly::new(vec![1.0 / d + theta, -1.0]);
            let w2 = Poly::new(vec![m / d + theta, -1.0]);
            (Poly::new(vec![0.0, 0.0, 1.0]), w1.mul(&w2).scale(ab))
        }
        Case::V => (
            Poly::new(vec![0.0, 0.0, 1.0]),
            Poly::new(vec![theta + 1.0 / d, -1.0]).scale(at * theta / d),
        ),
        Case::VI => (
            Poly::new(vec![0.0, 0.0, 1.0]),
            Poly::constant(t1 * t2 * theta * theta / (d * d)),
        ),
    };
    Ok(pair)
}

/// The per-case polynomial `R_mu`, hard-coded from the loop-equation
/// computation.
pub fn r_mu(p: &CaseParams) -> Result<Poly> {
    let Scaled { theta, ab, m, at, d, .. } = scaled(p)?;
    let poly = match p.case {
        Case::I => Poly::new(vec![theta * (ab * m - 1.0), 1.0 + ab]),
        Case::II => Poly::new(vec![ab * m - theta, 1.0 - ab]),
        Case::III => Poly::new(vec![at * theta - theta, 1.0]),
        Case::IV => Poly::new(vec![
            0.0,
            -(theta + ab * ((m + 1.0) / d + theta)),
            1.0 + ab,
        ]),
        Case::V => Poly::new(vec![0.0, -theta - at * theta / d, 1.0]),
        Case::VI => Poly::new(vec![0.0, -theta, 1.0]),
    };
    Ok(poly)
}

/// Closed-form first moment `int x dmu` where the loop-equation route
/// needs it (the degree-two cases); `None` elsewhere.
pub fn first_moment_closed_form(p: &CaseParams) -> Result<Option<f64>> {
    let s = scaled(p)?;
    let v = match p.case {
        Case::IV => Some(s.ab * s.m / ((1.0 - s.ab) * s.d * s.d * s.theta) + s.theta / 2.0),
        Case::V => Some(s.at / (s.d * s.d) + s.theta / 2.0),
        Case::VI => Some(s.t1 * s.t2 * s.theta / (s.d * s.d) + s.theta / 2.0),
        _ => None,
    };
    Ok(v)
}

/// Recomputes `R_mu` from the `1/z` expansion of
/// `Phi^-(z) e^{-theta G(z)} + Phi^+(z) e^{theta G(z)}`, keeping the
/// polynomial part. Uses only `int dmu = 1` in the degree-one cases, plus
/// the closed-form first moment in the degree-two cases.
pub fn r_mu_from_moment_expansion(p: &CaseParams) -> Result<Poly> {
    let (phi_minus, phi_plus) = phi_limits(p)?;
    let theta = p.theta;
    let m0 = 1.0;
    let m1 = first_moment_closed_form(p)?.unwrap_or(0.0);
    // e^{+-theta G} = 1 +- theta(m0/z + m1/z^2) + theta^2 m0^2/(2 z^2) + O(z^-3),
    // recorded as the coefficients of z^0, z^-1, z^-2.
    let expansion =
        |sign: f64| [1.0, sign * theta * m0, sign * theta * m1 + theta * theta * m0 * m0 / 2.0];
    let deg = phi_minus.degree().max(phi_plus.degree());
    let mut coeffs = vec![0.0; deg + 1];
    for (poly, e) in [(&phi_minus, expansion(-1.0)), (&phi_plus, expansion(1.0))] {
        for (j, &c) in poly.coeffs().iter().enumerate() {
            for (k, &ek) in e.iter().enumerate() {
                if j >= k {
                    coeffs[j - k] += c * ek;
                }
            }
        }
    }
    Ok(Poly::new(coeffs))
}

/// Region classification of the admissible interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionKind {
    /// Density 0.
    Void,
    /// Density strictly between 0 and `1/theta`.
    Band,
    /// Density `1/theta`.
    Saturated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lo: f64,
    pub hi: f64,
    pub kind: RegionKind,
}

/// Band endpoints and region labels for the equilibrium measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandInfo {
    /// Roots of `R_mu^2 - 4 Phi^- Phi^+` (with the `x^2` factor removed in
    /// the degree-two cases), clamped to `[0, right_edge]`.
    pub band: (f64, f64),
    /// The subintervals of `(0, right_edge)` with their kinds.
    pub regions: Vec<Region>,
    /// Right edge of the admissible interval `[0, R + theta]`; for the
    /// unbounded Cases I and III this is the right band edge, beyond which
    /// the density vanishes identically.
    pub right_edge: f64,
    /// Boundary parameters (`ab m = theta` or `m = ab theta` in Case II)
    /// where a side region degenerates; densities remain valid but the
    /// edge-universality regime excludes these.
    pub degenerate: bool,
}

/// Band endpoints via the per-case closed forms, with regions labeled by
/// the sign of `R_mu` at region midpoints.
pub fn band_endpoints(p: &CaseParams) -> Result<BandInfo> {
    let Scaled { theta, ab, m, at, t1, t2, d } = scaled(p)?;
    let (lo, hi, right_edge) = match p.case {
        Case::I => {
            let x1 = theta * (1.0 - (ab * m).sqrt()).powi(2) / (1.0 - ab);
            let x2 = theta * (1.0 + (ab * m).sqrt()).powi(2) / (1.0 - ab);
            (x1, x2, x2)
        }
        Case::II => {
            let root = 2.0 * (ab * m * theta).sqrt();
            let alpha = (ab * m + theta - root) / (1.0 + ab);
            let beta = (ab * m + theta + root) / (1.0 + ab);
            (alpha, beta, m + theta)
        }
        Case::III => {
            let x1 = ((at * theta).sqrt() - theta.sqrt()).powi(2);
            let x2 = ((at * theta).sqrt() + theta.sqrt()).powi(2);
            (x1, x2, x2)
        }
        Case::IV => {
            let den = (1.0 - ab) * d;
            let x1 = theta - (ab * (m + 1.0) + 2.0 * (ab * m).sqrt()) / den;
            let x2 = theta - (ab * (m + 1.0) - 2.0 * (ab * m).sqrt()) / den;
            (x1, x2, theta + m.min(1.0) / d)
        }
        Case::V => {
            let x1 = theta - (at * theta + 2.0 * (at * theta).sqrt()) / d;
            let x2 = theta - (at * theta - 2.0 * (at * theta).sqrt()) / d;
            (x1, x2, theta + 1.0 / d)
        }
        Case::VI => {
            let w = 2.0 * theta * (t1 * t2).sqrt() / d;
            (theta - w, theta + w, theta + 1.0)
        }
    };
    let r_poly = r_mu(p)?;
    let band_lo = lo.clamp(0.0, right_edge);
    let band_hi = hi.clamp(band_lo, right_edge);
    let mut regions = Vec::new();
    let mut push = |lo: f64, hi: f64, kind: RegionKind| {
        if hi - lo > 1e-14 {
            regions.push(Region { lo, hi, kind });
        }
    };
    let side = |x: f64| {
        if r_poly.eval(x) > 0.0 {
            RegionKind::Void
        } else {
            RegionKind::Saturated
        }
    };
    if band_lo > 0.0 {
        push(0.0, band_lo, side(band_lo / 2.0));
    }
    push(band_lo, band_hi, RegionKind::Band);
    if right_edge > band_hi {
        push(band_hi, right_edge, side((band_hi + right_edge) / 2.0));
    }
    let degenerate = band_lo <= 1e-12
        || (p.case == Case::II && (m - ab * theta).abs() <= 1e-12)
        || right_edge - band_hi <= 1e-12;
    Ok(BandInfo { band: (band_lo, band_hi), regions, right_edge, degenerate })
}

/// A fully resolved equilibrium measure with density, CDF, quantile,
/// moment and Stieltjes-transform access. Pure and immutable.
pub struct EquilibriumDensity {
    theta: f64,
    phi_minus: Poly,
    phi_plus: Poly,
    r_mu: Poly,
    info: BandInfo,
}

impl EquilibriumDensity {
    pub fn new(p: &CaseParams) -> Result<Self> {
        let (phi_minus, phi_plus) = phi_limits(p)?;
        Ok(EquilibriumDensity {
            theta: p.theta,
            phi_minus,
            phi_plus,
            r_mu: r_mu(p)?,
            info: band_endpoints(p)?,
        })
    }

    pub fn info(&self) -> &BandInfo {
        &self.info
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The interval spanned by the measure's support.
    pub fn support(&self) -> (f64, f64) {
        let lo = self
            .info
            .regions
            .iter()
            .find(|r| r.kind != RegionKind::Void)
            .map_or(0.0, |r| r.lo);
        let hi = self
            .info
            .regions
            .iter()
            .rev()
            .find(|r| r.kind != RegionKind::Void)
            .map_or(0.0, |r| r.hi);
        (lo, hi)
    }

    /// Density value at `x`.
    pub fn density(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= self.info.right_edge {
            return 0.0;
        }
        let q = self.phi_minus.eval(x) * self.phi_plus.eval(x);
        arccos_ratio(self.r_mu.eval(x), q) / (self.theta * std::f64::consts::PI)
    }

    /// Integrates `f` against the measure over `[0, upto]`. Saturated
    /// regions integrate the constant `1/theta` directly; bands go through
    /// the cosine substitution that removes square-root edge behavior.
    fn integrate_against_upto<F: Fn(f64) -> Complex64>(
        &self,
        f: F,
        upto: f64,
        tol: f64,
    ) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for region in &self.info.regions {
            let hi = region.hi.min(upto);
            if hi <= region.lo {
                break;
            }
            match region.kind {
                RegionKind::Void => {}
                RegionKind::Saturated => {
                    let (v, _) = quad::integrate_c(&f, region.lo, hi, tol, tol)
                        .expect("finite saturated segment");
                    total += v / self.theta;
                }
                RegionKind::Band => {
                    let c = 0.5 * (region.lo + region.hi);
                    let g = 0.5 * (region.hi - region.lo);
                    // x = c + g cos(phi); a clipped upper limit in x is a
                    // lower limit in phi.
                    let phi_lo = if hi >= region.hi {
                        0.0
                    } else {
                        ((hi - c) / g).clamp(-1.0, 1.0).acos()
                    };
                    let (v, _) = quad::integrate_c(
                        |phi| {
                            let x = c + g * phi.cos();
                            f(x) * self.density(x) * g * phi.sin()
                        },
                        phi_lo,
                        std::f64::consts::PI,
                        tol,
                        tol,
                    )
                    .expect("finite band segment");
                    total += v;
                }
            }
        }
        total
    }

    /// Total mass (1 up to quadrature error).
    pub fn mass(&self) -> f64 {
        self.cdf(self.info.right_edge)
    }

    /// `int_0^x` of the density.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.integrate_against_upto(|_| Complex64::new(1.0, 0.0), x, 1e-11).re
    }

    /// `int x^k dmu` by region-aware quadrature.
    pub fn moment(&self, k: u32) -> f64 {
        self.integrate_against_upto(|x| Complex64::new(x.powi(k as i32), 0.0), f64::INFINITY, 1e-11)
            .re
    }

    /// The upper quantile `gamma` solving `int_gamma^inf dmu = q`.
    pub fn quantile_upper(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Domain(format!("quantile level {q} outside [0,1]")));
        }
        let target = self.mass() - q;
        let (mut lo, mut hi) = (0.0, self.info.right_edge);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 * self.info.right_edge.max(1.0) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Stieltjes transform `G(z) = int dmu(x) / (z - x)` for `z` off the
    /// support. Saturated segments contribute exactly through logarithms.
    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        let (lo, hi) = self.support();
        let dx = (lo - z.re).max(z.re - hi).max(0.0);
        let dist = dx.hypot(z.im);
        if dist <= 1e-9 {
            return Err(Error::Domain(format!(
                "z = {z} is on or too close to the support [{lo}, {hi}]"
            )));
        }
        let mut total = Complex64::new(0.0, 0.0);
        for region in &self.info.regions {
            match region.kind {
                RegionKind::Void => {}
                RegionKind::Saturated => {
                    let num = (z - region.lo).ln() - (z - region.hi).ln();
                    total += num / self.theta;
                }
                RegionKind::Band => {
                    let c = 0.5 * (region.lo + region.hi);
                    let g = 0.5 * (region.hi - region.lo);
                    let (v, _) = quad::integrate_c(
                        |phi| {
                            let x = c + g * phi.cos();
                            self.density(x) * g * phi.sin() / (z - x)
                        },
                        0.0,
                        std::f64::consts::PI,
                        1e-11,
                        1e-11,
                    )?;
                    total += v;
                }
            }
        }
        Ok(total)
    }
}

/// Density of the limiting particle measure at `x` (rescaled coordinate
/// `l / K`).
pub fn equilibrium_density(p: &CaseParams, x: f64) -> Result<f64> {
    Ok(EquilibriumDensity::new(p)?.density(x))
}

/// Stieltjes transform of the limiting particle measure at a point `z`
/// off its support.
pub fn stieltjes(p: &CaseParams, z: Complex64) -> Result<Complex64> {
    EquilibriumDensity::new(p)?.stieltjes(z)
}

/// Density `f(x)` of the vague limit of the global measures
/// `nu_N = N^{-1} sum_i delta((lambda_i - i theta) / N)`, per case.
/// Uses the raw ratio `m = M/N` (no role swap).
pub fn nu_density(p: &CaseParams, x: f64) -> Result<f64> {
    p.validate()?;
    let theta = p.theta;
    let inv_theta = 1.0 / theta;
    let pi_theta = theta * std::f64::consts::PI;
    let ab = p.a.unwrap_or(1.0) * p.b.unwrap_or(1.0);
    let value = match p.case {
        Case::I => {
            let m = p.limit_m_ratio()?;
            let thr = -theta * m.min(1.0);
            if x < thr {
                inv_theta
            } else {
                let num = (1.0 + ab) * x + ab * theta * (m + 1.0);
                let q = ab * (x + theta) * (x + m * theta);
                arccos_ratio(num, q) / pi_theta
            }
        }
        Case::II => {
            let m = p.limit_m_ratio()?;
            if x > m {
                0.0
            } else if x < -theta {
                inv_theta
            } else {
                let num = (1.0 - ab) * x + ab * (m - theta);
                let q = ab * (x + theta) * (m - x);
                arccos_ratio(num, q) / pi_theta
            }
        }
        Case::III => {
            let at = p.a.unwrap() * p.t.unwrap();
            if x < -theta {
                inv_theta
            } else {
                let num = x + at * theta;
                let q = at * theta * (x + theta);
                arccos_ratio(num, q) / pi_theta
            }
        }
        Case::IV => {
            let m = p.limit_m_ratio()?;
            let alpha = (ab * (m + 1.0) + 2.0 * (ab * m).sqrt()) / (1.0 - ab);
            if x > m.min(1.0) {
                0.0
            } else if x < -alpha {
                inv_theta
            } else {
                let num = (1.0 + ab) * x - ab * (m + 1.0);
                let q = ab * (1.0 - x) * (m - x);
                arccos_ratio(num, q) / pi_theta
            }
        }
        Case::V => {
            let at = p.a.unwrap() * p.t.unwrap();
            let alpha = at * theta + 2.0 * (at * theta).sqrt();
            if x > 1.0 {
                0.0
            } else if x < -alpha {
                inv_theta
            } else {
                let num = x - at * theta;
                let q = at * theta * (1.0 - x);
                arccos_ratio(num, q) / pi_theta
            }
        }
        Case::VI => {
            let edge = 2.0 * theta * (p.t1.unwrap() * p.t2.unwrap()).sqrt();
            if x > edge {
                0.0
            } else if x < -edge {
                inv_theta
            } else {
                truncated_arccos(x / edge) / pi_theta
            }
        }
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case_ii() -> CaseParams {
        CaseParams::new(Case::II, 1.0, 100)
            .with_ab(0.5, 1.0)
            .with_m_ratio(1.0)
    }

    fn all_cases() -> Vec<CaseParams> {
        let mut c3 = CaseParams::new(Case::III, 1.0, 100).with_t(1.0);
        c3.a = Some(1.0);
        let mut c5 = CaseParams::new(Case::V, 1.0, 100).with_t(0.5);
        c5.a = Some(1.0);
        vec![
            CaseParams::new(Case::I, 1.0, 100).with_ab(0.7, 0.7).with_m_ratio(1.5),
            case_ii(),
            c3,
            CaseParams::new(Case::IV, 1.0, 100).with_ab(0.5, 0.5).with_m_ratio(1.0),
            c5,
            CaseParams::new(Case::VI, 1.0, 100).with_t12(1.0, 1.0),
        ]
    }

    #[test]
    fn truncated_arccos_examples() {
        assert_eq!(truncated_arccos(-1.5), std::f64::consts::PI);
        assert_eq!(truncated_arccos(0.0), std::f64::consts::FRAC_PI_2);
        assert_eq!(truncated_arccos(2.0), 0.0);
    }

    #[test]
    fn phi_limit_examples() {
        // Case II: (z, ab(m + theta) - ab z).
        let (pm, pp) = phi_limits(&case_ii()).unwrap();
        assert_eq!(pm.coeffs(), &[0.0, 1.0]);
        assert_eq!(pp.coeffs(), &[0.5 * 2.0, -0.5]);

        // Case III: (z, a t theta).
        let mut c3 = CaseParams::new(Case::III, 2.0, 10).with_t(1.5);
        c3.a = Some(2.0);
        let (pm, pp) = phi_limits(&c3).unwrap();
        assert_eq!(pm.coeffs(), &[0.0, 1.0]);
        assert_eq!(pp.coeffs(), &[6.0]);

        // Case VI: (z^2, t1 t2 theta^2 / d^2).
        let c6 = CaseParams::new(Case::VI, 2.0, 10).with_t12(1.0, 2.0).with_d(4);
        let (pm, pp) = phi_limits(&c6).unwrap();
        assert_eq!(pm.coeffs(), &[0.0, 0.0, 1.0]);
        assert_eq!(pp.coeffs(), &[2.0 * 4.0 / 16.0]);
    }

    #[test]
    fn r_mu_examples() {
        // Case II with ab = 1/2, m = 1, theta = 1: (1/2) z - 1/2.
        let r = r_mu(&case_ii()).unwrap();
        assert_eq!(r.coeffs(), &[-0.5, 0.5]);

        // Case VI: z^2 - theta z regardless of t1, t2, d.
        let c6 = CaseParams::new(Case::VI, 0.5, 10).with_t12(3.0, 2.0).with_d(7);
        assert_eq!(r_mu(&c6).unwrap().coeffs(), &[0.0, -0.5, 1.0]);

        // Case III with a t = 1: R = z.
        let mut c3 = CaseParams::new(Case::III, 1.0, 10).with_t(0.5);
        c3.a = Some(2.0);
        assert_eq!(r_mu(&c3).unwrap().coeffs(), &[0.0, 1.0]);
    }

    #[test]
    fn r_mu_matches_moment_expansion_all_cases() {
        for p in all_cases() {
            let hard = r_mu(&p).unwrap();
            let expanded = r_mu_from_moment_expansion(&p).unwrap();
            assert_eq!(hard.coeffs().len(), expanded.coeffs().len(), "case {}", p.case);
            for (a, b) in hard.coeffs().iter().zip(expanded.coeffs()) {
                assert!(
                    (a - b).abs() <= 1e-12 * a.abs().max(1.0),
                    "case {}: {hard:?} vs {expanded:?}",
                    p.case
                );
            }
        }
    }

    #[test]
    fn band_endpoints_case_ii() {
        // ab = 1/2, m = 1, theta = 1: alpha, beta = (1.5 -+ 2 sqrt(1/2)) / 1.5.
        let info = band_endpoints(&case_ii()).unwrap();
        let expect_alpha = (1.5 - 2.0 * 0.5_f64.sqrt()) / 1.5;
        let expect_beta = (1.5 + 2.0 * 0.5_f64.sqrt()) / 1.5;
        assert!((info.band.0 - expect_alpha).abs() < 1e-14);
        assert!((info.band.1 - expect_beta).abs() < 1e-14);
        assert_eq!(info.right_edge, 2.0);
        // ab m = 1/2 < theta = 1: left saturated; m = 1 > ab theta: right void.
        assert_eq!(info.regions[0].kind, RegionKind::Saturated);
        assert_eq!(info.regions[2].kind, RegionKind::Void);

        // ab m = theta collapses the left region exactly to a point.
        let p = CaseParams::new(Case::II, 0.5, 10).with_ab(0.5, 1.0).with_m_ratio(1.0);
        let info = band_endpoints(&p).unwrap();
        assert!(info.band.0.abs() < 1e-14);
        assert!(info.degenerate);
    }

    #[test]
    fn band_endpoints_are_roots_of_discriminant() {
        for p in all_cases() {
            let info = band_endpoints(&p).unwrap();
            let r = r_mu(&p).unwrap();
            let (pm, pp) = phi_limits(&p).unwrap();
            for &x in [info.band.0, info.band.1].iter() {
                if x <= 1e-12 {
                    continue;
                }
                let disc = r.eval(x).powi(2) - 4.0 * pm.eval(x) * pp.eval(x);
                assert!(
                    disc.abs() < 1e-9 * (1.0 + r.eval(x).powi(2)),
                    "case {}: disc({x}) = {disc}",
                    p.case
                );
            }
        }
    }

    #[test]
    fn density_examples() {
        // Case II at the point where R_mu vanishes: arccos(0) = pi/2 -> 1/2.
        let d = EquilibriumDensity::new(&case_ii()).unwrap();
        assert!((d.density(1.0) - 0.5).abs() < 1e-14);
        // Void region beyond beta.
        assert_eq!(d.density(1.99), 0.0);
        assert_eq!(d.density(2.5), 0.0);
        // Saturated region near zero.
        assert!((d.density(0.05) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn densities_integrate_to_one_and_stay_bounded() {
        for p in all_cases() {
            let d = EquilibriumDensity::new(&p).unwrap();
            let mass = d.mass();
            assert!((mass - 1.0).abs() < 1e-8, "case {}: mass = {mass}", p.case);
            let cap = 1.0 / p.theta + 1e-12;
            for i in 0..=10_000 {
                let x = i as f64 / 10_000.0 * d.info().right_edge;
                let v = d.density(x);
                assert!((0.0..=cap).contains(&v), "case {}: density({x}) = {v}", p.case);
            }
        }
    }

    #[test]
    fn density_bounds_under_random_parameter_draws() {
        // 0 <= mu(x) <= 1/theta on a 10^4 grid for 20 pseudo-random
        // parameter draws per case (fixed linear-congruential stream).
        let mut state = 0x2545f491u64;
        let mut unit = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as f64 / (1u64 << 31) as f64
        };
        for draw in 0..20 {
            let theta = 0.3 + 2.0 * unit();
            let a = 0.2 + 0.7 * unit();
            let b = 0.2 + (0.99 / a - 0.2).min(1.5) * unit();
            let m = 0.4 + 2.0 * unit();
            let t = 0.3 + 1.5 * unit();
            let mut c3 = CaseParams::new(Case::III, theta, 50).with_t(t);
            c3.a = Some(a);
            let mut c5 = CaseParams::new(Case::V, theta, 50).with_t(t);
            c5.a = Some(a);
            let cases = vec![
                CaseParams::new(Case::I, theta, 50).with_ab(a, b).with_m_ratio(m),
                CaseParams::new(Case::II, theta, 50).with_ab(a, b).with_m_ratio(m),
                c3,
                CaseParams::new(Case::IV, theta, 50).with_ab(a, b).with_m_ratio(m),
                c5,
                CaseParams::new(Case::VI, theta, 50).with_t12(t, 0.4 + unit()),
            ];
            for p in cases {
                let d = EquilibriumDensity::new(&p).unwrap();
                let cap = 1.0 / theta + 1e-12;
                for i in 0..=10_000 {
                    let x = i as f64 / 10_000.0 * d.info().right_edge;
                    let v = d.density(x);
                    assert!(
                        (0.0..=cap).contains(&v),
                        "draw {draw} case {}: density({x}) = {v}",
                        p.case
                    );
                }
            }
        }
    }

    #[test]
    fn density_continuous_at_junctions() {
        for p in all_cases() {
            let d = EquilibriumDensity::new(&p).unwrap();
            let (b_lo, b_hi) = d.info().band;
            for &edge in [b_lo, b_hi].iter() {
                if edge <= 1e-12 || edge >= d.info().right_edge - 1e-12 {
                    continue;
                }
                let eps = 1e-9 * d.info().right_edge.max(1.0);
                let jump = d.density(edge + eps) - d.density(edge - eps);
                assert!(jump.abs() < 1e-3, "case {}: jump {jump} at {edge}", p.case);
            }
        }
    }

    #[test]
    fn case_vi_reflection_symmetry() {
        let p = CaseParams::new(Case::VI, 0.75, 10).with_t12(1.0, 1.5).with_d(6);
        let d = EquilibriumDensity::new(&p).unwrap();
        let theta = 0.75;
        let half_width = d.info().band.1 - theta;
        for i in 1..50 {
            let x = half_width * i as f64 / 50.0;
            let sum = d.density(theta + x) + d.density(theta - x);
            assert!((sum - 1.0 / theta).abs() < 1e-12, "x = {x}: sum = {sum}");
        }
    }

    #[test]
    fn nu_density_examples() {
        // f^VI is theta^{-1} deep in the saturated tail and 1/(2 theta) at 0.
        let p = CaseParams::new(Case::VI, 0.5, 10).with_t12(1.0, 1.0);
        let edge = 2.0 * 0.5;
        assert!((nu_density(&p, -edge - 1.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((nu_density(&p, 0.0).unwrap() - 1.0).abs() < 1e-14);

        // f^III at 0 with a t = 4 hits arccos(1) = 0.
        let mut c3 = CaseParams::new(Case::III, 1.0, 10).with_t(2.0);
        c3.a = Some(2.0);
        assert_eq!(nu_density(&c3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn nu_matches_shifted_equilibrium_case_ii() {
        let p = case_ii();
        let d = EquilibriumDensity::new(&p).unwrap();
        let theta = p.theta;
        for i in 0..=400 {
            let x = -theta + 1e-6 + (i as f64 / 400.0) * (2.0 + theta);
            let f = nu_density(&p, x).unwrap();
            let mu = d.density(x + theta);
            assert!((f - mu).abs() < 1e-12, "x = {x}: nu = {f}, shifted mu = {mu}");
        }
    }

    #[test]
    fn nu_matches_shifted_equilibrium_case_i() {
        // For M >= N (no swap) the global density is the particle density
        // shifted by theta, exactly as in Case II.
        let p = CaseParams::new(Case::I, 0.5, 100).with_ab(0.6, 0.8).with_m_ratio(2.0);
        let d = EquilibriumDensity::new(&p).unwrap();
        for i in 0..=200 {
            let x = -0.5 + 1e-6 + (i as f64 / 200.0) * 6.0;
            let f = nu_density(&p, x).unwrap();
            let mu = d.density(x + 0.5);
            assert!((f - mu).abs() < 1e-10, "x = {x}: {f} vs {mu}");
        }
    }

    #[test]
    fn stieltjes_behaves_like_one_over_z() {
        for p in all_cases() {
            let d = EquilibriumDensity::new(&p).unwrap();
            let z = Complex64::new(1e3, 0.0);
            let g = d.stieltjes(z).unwrap();
            // G - 1/z = m1/z^2 + O(z^-3), so 1e-5 absolute at |z| = 1e3.
            assert!((g - 1.0 / z).norm() < 1e-5, "case {}: G({z}) = {g}", p.case);
            let zc = Complex64::new(0.3, 0.9);
            let g1 = d.stieltjes(zc).unwrap();
            let g2 = d.stieltjes(zc.conj()).unwrap();
            assert!((g1.conj() - g2).norm() < 1e-12);
        }
    }

    #[test]
    fn stieltjes_rejects_points_on_support() {
        let d = EquilibriumDensity::new(&case_ii()).unwrap();
        assert!(d.stieltjes(Complex64::new(0.5, 0.0)).is_err());
        assert!(d.stieltjes(Complex64::new(3.0, 0.0)).is_ok());
    }

    #[test]
    fn loop_equation_self_consistency() {
        // Phi^-(z) e^{-theta G} + Phi^+(z) e^{theta G} = R_mu(z) off support.
        for p in all_cases() {
            let d = EquilibriumDensity::new(&p).unwrap();
            let (pm, pp) = phi_limits(&p).unwrap();
            let r = r_mu(&p).unwrap();
            let theta = p.theta;
            let center = Complex64::new(0.5 * d.info().right_edge, 0.0);
            for k in 0..12 {
                let angle = 2.0 * std::f64::consts::PI * k as f64 / 12.0;
                let z = center
                    + Complex64::new(angle.cos(), angle.sin())
                        * (d.info().right_edge.max(1.0) * 1.5);
                let g = d.stieltjes(z).unwrap();
                let lhs = pm.eval_c(z) * (-theta * g).exp() + pp.eval_c(z) * (theta * g).exp();
                let rhs = r.eval_c(z);
                assert!(
                    (lhs - rhs).norm() <= 1e-6 * rhs.norm().max(1.0),
                    "case {}: z = {z}, lhs = {lhs}, rhs = {rhs}",
                    p.case
                );
            }
        }
    }

    #[test]
    fn first_moments_match_closed_forms() {
        for p in all_cases() {
            if let Some(expect) = first_moment_closed_form(&p).unwrap() {
                let d = EquilibriumDensity::new(&p).unwrap();
                let m1 = d.moment(1);
                assert!(
                    (m1 - expect).abs() < 1e-6,
                    "case {}: moment {m1} vs closed form {expect}",
                    p.case
                );
            }
        }
    }

    #[test]
    fn cdf_and_quantiles() {
        let d = EquilibriumDensity::new(&case_ii()).unwrap();
        assert!(d.cdf(0.0).abs() < 1e-15);
        assert!((d.cdf(d.info().right_edge) - 1.0).abs() < 1e-8);
        assert!(d.quantile_upper(1.5).is_err());
        let med = d.quantile_upper(0.5).unwrap();
        assert!((d.cdf(med) - 0.5).abs() < 1e-8);
        let hi = d.quantile_upper(0.01).unwrap();
        assert!(hi > med);
    }
}
