//! The six Jack-measure weight families as discrete beta-ensembles.
//!
//! After conditioning on a `K x R` box, each case becomes a measure on
//! particle configurations `l_i = lambda_i + (K - i) theta` with the
//! Gamma-ratio pairwise interaction and a case-specific site weight
//! `w(x; K)`. Log-Gamma is the single primitive: every Gamma ratio is a
//! difference of log-Gamma values, so weights stay finite at `K ~ 10^3`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::partition::Partition;

/// The six homogeneous specialization pairings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl Case {
    pub fn all() -> [Case; 6] {
        [Case::I, Case::II, Case::III, Case::IV, Case::V, Case::VI]
    }
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
            Case::IV => "IV",
            Case::V => "V",
            Case::VI => "VI",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Case> {
        match s {
            "I" | "i" | "1" => Ok(Case::I),
            "II" | "ii" | "2" => Ok(Case::II),
            "III" | "iii" | "3" => Ok(Case::III),
            "IV" | "iv" | "4" => Ok(Case::IV),
            "V" | "v" | "5" => Ok(Case::V),
            "VI" | "vi" | "6" => Ok(Case::VI),
            other => Err(Error::Config(format!("unknown case {other:?}"))),
        }
    }
}

/// Parameters of one Jack-measure instance.
///
/// `a, b` apply to Cases I, II, IV; `t` to III and V; `t1, t2` to VI. For
/// Cases I, II, IV either the count `M` or the ratio `m` must be given;
/// when only the ratio is given, `M = ceil(m * N)`. The reported ratio is
/// always `M / N`. Cases IV, V, VI use the box multiplier `d` (particle
/// count `K = N d`); when absent it defaults to the explicit lower bound
/// from the loop-equation analysis, doubled once. `r_box` overrides the
/// box column bound, and `r_factor` overrides the cutoff ratio `R/K` used
/// by the unbounded Cases I and III.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseParams {
    pub case: Case,
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Ratio parameter (lowercase `m` in configs).
    #[serde(default, rename = "m", skip_serializing_if = "Option::is_none")]
    pub m_ratio: Option<f64>,
    /// Explicit second count (uppercase `M` in configs).
    #[serde(default, rename = "M", skip_serializing_if = "Option::is_none")]
    pub m_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_box: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_factor: Option<f64>,
}

impl CaseParams {
    /// A skeleton with only the case, `theta` and `N` set.
    pub fn new(case: Case, theta: f64, n: u64) -> Self {
        CaseParams {
            case,
            theta,
            a: None,
            b: None,
            m_ratio: None,
            m_count: None,
            t: None,
            t1: None,
            t2: None,
            n,
            d: None,
            r_box: None,
            r_factor: None,
        }
    }

    pub fn with_ab(mut self, a: f64, b: f64) -> Self {
        self.a = Some(a);
        self.b = Some(b);
        self
    }

    pub fn with_m_ratio(mut self, m: f64) -> Self {
        self.m_ratio = Some(m);
        self
    }

    pub fn with_m_count(mut self, m: u64) -> Self {
        self.m_count = Some(m);
        self
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn with_t12(mut self, t1: f64, t2: f64) -> Self {
        self.t1 = Some(t1);
        self.t2 = Some(t2);
        self
    }

    pub fn with_d(mut self, d: u64) -> Self {
        self.d = Some(d);
        self
    }

    pub fn with_r_box(mut self, r: u64) -> Self {
        self.r_box = Some(r);
        self
    }

    fn uses_ab(&self) -> bool {
        matches!(self.case, Case::I | Case::II | Case::IV)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() || self.theta <= 0.0 {
            return Err(Error::Parameter("theta must be positive".into()));
        }
        if self.n == 0 {
            return Err(Error::Parameter("N must be positive".into()));
        }
        if self.uses_ab() {
            let a = self.a.ok_or_else(|| missing(self.case, "a"))?;
            let b = self.b.ok_or_else(|| missing(self.case, "b"))?;
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::Parameter("a and b must be positive".into()));
            }
            if matches!(self.case, Case::I | Case::IV) && a * b >= 1.0 {
                return Err(Error::Parameter(format!(
                    "case {} needs ab in (0,1); got ab = {}",
                    self.case,
                    a * b
                )));
            }
            if self.m_ratio.is_none() && self.m_count.is_none() {
                return Err(missing(self.case, "m or M"));
            }
            if self.m_ratio.is_some_and(|m| m.is_nan() || m <= 0.0) {
                return Err(Error::Parameter("m must be positive".into()));
            }
            if self.m_count == Some(0) {
                return Err(Error::Parameter("M must be positive".into()));
            }
        }
        if matches!(self.case, Case::III | Case::V) {
            let a = self.a.ok_or_else(|| missing(self.case, "a"))?;
            let t = self.t.ok_or_else(|| missing(self.case, "t"))?;
            if !(a > 0.0 && t > 0.0) {
                return Err(Error::Parameter("a and t must be positive".into()));
            }
        }
        if self.case == Case::VI {
            let t1 = self.t1.ok_or_else(|| missing(self.case, "t1"))?;
            let t2 = self.t2.ok_or_else(|| missing(self.case, "t2"))?;
            if !(t1 > 0.0 && t2 > 0.0) {
                return Err(Error::Parameter("t1 and t2 must be positive".into()));
            }
        }
        if self.d == Some(0) {
            return Err(Error::Parameter("d must be positive".into()));
        }
        Ok(())
    }

    /// Resolved second count `M` for Cases I/II/IV: explicit, else `ceil(m N)`.
    pub fn resolved_m_count(&self) -> Result<u64> {
        self.validate()?;
        match (self.m_count, self.m_ratio) {
            (Some(m), _) => Ok(m),
            (None, Some(r)) => Ok((r * self.n as f64).ceil() as u64),
            (None, None) => Err(missing(self.case, "m or M")),
        }
    }

    /// Reported ratio `m = M / N`.
    pub fn resolved_m_ratio(&self) -> Result<f64> {
        Ok(self.resolved_m_count()? as f64 / self.n as f64)
    }

    /// Ratio parameter for the limit formulas. Cases I/II/IV use `M/N`
    /// when counts are known, falling back to the bare ratio `m` so the
    /// limit objects can be built without any finite-size data.
    pub fn limit_m_ratio(&self) -> Result<f64> {
        if self.m_count.is_some() {
            self.resolved_m_ratio()
        } else {
            self.m_ratio
                .ok_or_else(|| missing(self.case, "m or M"))
        }
    }

    /// Box multiplier for Cases IV/V/VI: user value, or the explicit
    /// lower bound of the loop-equation analysis doubled once.
    pub fn resolved_d(&self) -> Result<u64> {
        self.validate()?;
        if let Some(d) = self.d {
            return Ok(d);
        }
        let theta = self.theta;
        let bound = match self.case {
            Case::IV => {
                let ab = self.a.unwrap() * self.b.unwrap();
                let m = self.limit_m_ratio()?;
                let alpha = (ab * (m + 1.0) + 2.0 * (ab * m).sqrt()) / (1.0 - ab);
                alpha / theta
            }
            Case::V => {
                let at = self.a.unwrap() * self.t.unwrap();
                let alpha = at * theta + 2.0 * (at * theta).sqrt();
                alpha / theta
            }
            Case::VI => {
                let root = (self.t1.unwrap() * self.t2.unwrap()).sqrt();
                (2.0 * root).max(2.0 * theta * root)
            }
            _ => return Ok(1),
        };
        Ok(2 * (bound.ceil() as u64).max(1))
    }

    /// Default cutoff ratio `R/K` for the unbounded Cases I and III,
    /// twice the right edge of the limiting support.
    pub fn default_r_factor(&self) -> Result<f64> {
        let theta = self.theta;
        match self.case {
            Case::I => {
                let ab = self.a.unwrap() * self.b.unwrap();
                let m = self.swapped_m_ratio()?;
                Ok(2.0 * theta * (1.0 + (ab * m).sqrt()).powi(2) / (1.0 - ab))
            }
            Case::III => {
                let at = self.a.unwrap() * self.t.unwrap();
                Ok(4.0 * (at + 1.0) * theta)
            }
            _ => Err(Error::Config(
                "cutoff ratio only applies to Cases I and III".into(),
            )),
        }
    }

    /// Case I ratio after the role swap that makes the alpha-count at
    /// least the particle count: `max(M, N) / min(M, N) >= 1`.
    pub fn swapped_m_ratio(&self) -> Result<f64> {
        let m = self.resolved_m_count()?;
        let n = self.n;
        Ok(m.max(n) as f64 / m.min(n) as f64)
    }
}

fn missing(case: Case, what: &str) -> Error {
    Error::Parameter(format!("case {case} needs {what}"))
}

/// Case-resolved site weight, evaluated through log-Gamma.
#[derive(Debug, Clone, PartialEq)]
enum SiteWeight {
    /// `(ab)^x Gamma(c1 + x) / Gamma(x + 1)` (Case I with K = min(M, N)).
    GeometricGamma { log_ab: f64, c1: f64 },
    /// `(ab)^x / (Gamma(x+1) Gamma(c - x))` (Case II, c = M + N theta + 1 - theta).
    Krawtchouk { log_ab: f64, c: f64 },
    /// `r^x / Gamma(x+1)` (Case III, r = a s theta).
    Poisson { log_r: f64 },
    /// `(ab)^x / (Gamma(x+1) Gamma(x+theta) Gamma(c1-x) Gamma(c2-x))` (Case IV).
    DoubleWall { log_ab: f64, c1: f64, c2: f64 },
    /// `r^x / (Gamma(x+1) Gamma(x+theta) Gamma(c1-x))` (Case V, r = a s theta).
    SingleWall { log_r: f64, c1: f64 },
    /// `r^x / (Gamma(x+1) Gamma(x+theta))` (Case VI, r = s1 s2 theta^2).
    DoublePoisson { log_r: f64 },
}

/// A discrete beta-ensemble on the `K x R` box: particle count, box bound,
/// `theta` and the site weight. Immutable after construction; evaluation
/// is pure, so one model can back many chains concurrently.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    case: Case,
    k: usize,
    r: u64,
    theta: f64,
    weight: SiteWeight,
}

/// Strictly decreasing particle coordinates `l_i = lambda_i + (K - i) theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleConfig {
    ells: Vec<f64>,
    theta: f64,
}

impl ParticleConfig {
    /// Builds the K-row particle view of a partition.
    pub fn from_partition(lambda: &Partition, k: usize, theta: f64) -> Result<Self> {
        let padded = lambda.padded(k)?;
        let ells = padded
            .iter()
            .enumerate()
            .map(|(i0, &lam)| lam as f64 + (k - 1 - i0) as f64 * theta)
            .collect();
        Ok(ParticleConfig { ells, theta })
    }

    pub fn ells(&self) -> &[f64] {
        &self.ells
    }

    /// Recovers the partition; errors if the configuration is not of the
    /// staircase-plus-integers form.
    pub fn to_partition(&self) -> Result<Partition> {
        let k = self.ells.len();
        let mut parts = Vec::with_capacity(k);
        for (i0, &l) in self.ells.iter().enumerate() {
            let lam = l - (k - 1 - i0) as f64 * self.theta;
            let rounded = lam.round();
            if (lam - rounded).abs() > 1e-9 || rounded < 0.0 {
                return Err(Error::Domain(format!(
                    "l_{} = {l} is not lambda + (K-i) theta for integer lambda",
                    i0 + 1
                )));
            }
            parts.push(rounded as u32);
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Partition::new(parts)
    }
}

/// Builds the discrete beta-ensemble for the given parameters.
///
/// Particle count and box bound per case: I has `K = min(M, N)` and an
/// unbounded box truncated at `R = ceil(K * r_factor)`; II has `K = N`,
/// `R = M`; III has `K = N` with the same truncation as I; IV has
/// `K = N d`, `R = min(M, N)`; V has `K = N d`, `R = N`; VI has
/// `K = N d`, `R = N d`. `r_box` overrides `R` in every case, which is
/// legitimate: conditioning a Jack measure on a smaller box is again a
/// discrete beta-ensemble with the same weight.
pub fn build_model(p: &CaseParams) -> Result<EnsembleModel> {
    p.validate()?;
    let theta = p.theta;
    let n = p.n;
    match p.case {
        Case::I => {
            let m = p.resolved_m_count()?;
            let (k, big) = (m.min(n), m.max(n));
            let r = match p.r_box {
                Some(r) => r,
                None => {
                    let factor = match p.r_factor {
                        Some(f) => f,
                        None => p.default_r_factor()?,
                    };
                    (factor * k as f64).ceil() as u64
                }
            };
            let ab = p.a.unwrap() * p.b.unwrap();
            // With K = min(M, N) the second Gamma pair in the Case I weight
            // cancels against Gamma(x + theta), leaving a single ratio.
            let c1 = (big - k + 1) as f64 * theta;
            Ok(EnsembleModel {
                case: Case::I,
                k: k as usize,
                r,
                theta,
                weight: SiteWeight::GeometricGamma { log_ab: ab.ln(), c1 },
            })
        }
        Case::II => {
            let m = p.resolved_m_count()?;
            let r = p.r_box.unwrap_or(m);
            if r > m {
                return Err(Error::Config("Case II box cannot exceed R = M".into()));
            }
            let ab = p.a.unwrap() * p.b.unwrap();
            let c = m as f64 + n as f64 * theta + 1.0 - theta;
            Ok(EnsembleModel {
                case: Case::II,
                k: n as usize,
                r,
                theta,
                weight: SiteWeight::Krawtchouk { log_ab: ab.ln(), c },
            })
        }
        Case::III => {
            let r = match p.r_box {
                Some(r) => r,
                None => {
                    let factor = match p.r_factor {
                        Some(f) => f,
                        None => p.default_r_factor()?,
                    };
                    (factor * n as f64).ceil() as u64
                }
            };
            let s = n as f64 * p.t.unwrap();
            let rate = p.a.unwrap() * s * theta;
            Ok(EnsembleModel {
                case: Case::III,
                k: n as usize,
                r,
                theta,
                weight: SiteWeight::Poisson { log_r: rate.ln() },
            })
        }
        Case::IV => {
            let m = p.resolved_m_count()?;
            let d = p.resolved_d()?;
            let k = n * d;
            let r = p.r_box.unwrap_or(m.min(n));
            let ab = p.a.unwrap() * p.b.unwrap();
            let c1 = n as f64 + k as f64 * theta + 1.0 - theta;
            let c2 = m as f64 + k as f64 * theta + 1.0 - theta;
            Ok(EnsembleModel {
                case: Case::IV,
                k: k as usize,
                r,
                theta,
                weight: SiteWeight::DoubleWall { log_ab: ab.ln(), c1, c2 },
            })
        }
        Case::V => {
            let d = p.resolved_d()?;
            let k = n * d;
            let r = p.r_box.unwrap_or(n);
            let s = n as f64 * p.t.unwrap();
            let rate = p.a.unwrap() * s * theta;
            let c1 = n as f64 + k as f64 * theta + 1.0 - theta;
            Ok(EnsembleModel {
                case: Case::V,
                k: k as usize,
                r,
                theta,
                weight: SiteWeight::SingleWall { log_r: rate.ln(), c1 },
            })
        }
        Case::VI => {
            let d = p.resolved_d()?;
            let k = n * d;
            let r = p.r_box.unwrap_or(k);
            let s1 = n as f64 * p.t1.unwrap();
            let s2 = n as f64 * p.t2.unwrap();
            let rate = s1 * s2 * theta * theta;
            Ok(EnsembleModel {
                case: Case::VI,
                k: k as usize,
                r,
                theta,
                weight: SiteWeight::DoublePoisson { log_r: rate.ln() },
            })
        }
    }
}

impl EnsembleModel {
    pub fn case(&self) -> Case {
        self.case
    }

    /// Particle count `K`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Box column bound `R`.
    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `log w(x; K)` at a particle coordinate `x in [0, R + (K-1) theta]`.
    pub fn logw(&self, x: f64) -> f64 {
        match &self.weight {
            SiteWeight::GeometricGamma { log_ab, c1 } => {
                x * log_ab + ln_gamma(c1 + x) - ln_gamma(x + 1.0)
            }
            SiteWeight::Krawtchouk { log_ab, c } => {
                x * log_ab - ln_gamma(x + 1.0) - ln_gamma(c - x)
            }
            SiteWeight::Poisson { log_r } => x * log_r - ln_gamma(x + 1.0),
            SiteWeight::DoubleWall { log_ab, c1, c2 } => {
                x * log_ab
                    - ln_gamma(x + 1.0)
                    - ln_gamma(x + self.theta)
                    - ln_gamma(c1 - x)
                    - ln_gamma(c2 - x)
            }
            SiteWeight::SingleWall { log_r, c1 } => {
                x * log_r - ln_gamma(x + 1.0) - ln_gamma(x + self.theta) - ln_gamma(c1 - x)
            }
            SiteWeight::DoublePoisson { log_r } => {
                x * log_r - ln_gamma(x + 1.0) - ln_gamma(x + self.theta)
            }
        }
    }

    /// The finite-K loop-equation pair `(Phi^+_K(x), Phi^-_K(x))`, two
    /// polynomial values with `w(x)/w(x-1) = Phi^+_K(x) / Phi^-_K(x)`
    /// for admissible `x >= 1`.
    pub fn weight_ratio(&self, x: f64) -> (f64, f64) {
        let theta = self.theta;
        match &self.weight {
            SiteWeight::GeometricGamma { log_ab, c1 } => {
                (log_ab.exp() * (c1 + x - 1.0), x)
            }
            SiteWeight::Krawtchouk { log_ab, c } => (log_ab.exp() * (c - x), x),
            SiteWeight::Poisson { log_r } => (log_r.exp(), x),
            SiteWeight::DoubleWall { log_ab, c1, c2 } => (
                log_ab.exp() * (c1 - x) * (c2 - x),
                x * (x + theta - 1.0),
            ),
            SiteWeight::SingleWall { log_r, c1 } => {
                (log_r.exp() * (c1 - x), x * (x + theta - 1.0))
            }
            SiteWeight::DoublePoisson { log_r } => (log_r.exp(), x * (x + theta - 1.0)),
        }
    }

    /// The finite-K loop-equation pair as explicit polynomials
    /// `(Phi^+_K, Phi^-_K)`, matching [`EnsembleModel::weight_ratio`]
    /// evaluated pointwise.
    pub fn phi_polys(&self) -> (crate::poly::Poly, crate::poly::Poly) {
        use crate::poly::Poly;
        let theta = self.theta;
        let lin = Poly::new(vec![0.0, 1.0]);
        let quad = Poly::new(vec![0.0, theta - 1.0, 1.0]);
        match &self.weight {
            SiteWeight::GeometricGamma { log_ab, c1 } => {
                (Poly::new(vec![c1 - 1.0, 1.0]).scale(log_ab.exp()), lin)
            }
            SiteWeight::Krawtchouk { log_ab, c } => {
                (Poly::new(vec![*c, -1.0]).scale(log_ab.exp()), lin)
            }
            SiteWeight::Poisson { log_r } => (Poly::constant(log_r.exp()), lin),
            SiteWeight::DoubleWall { log_ab, c1, c2 } => {
                let w = Poly::new(vec![*c1, -1.0]).mul(&Poly::new(vec![*c2, -1.0]));
                (w.scale(log_ab.exp()), quad)
            }
            SiteWeight::SingleWall { log_r, c1 } => {
                (Poly::new(vec![*c1, -1.0]).scale(log_r.exp()), quad)
            }
            SiteWeight::DoublePoisson { log_r } => (Poly::constant(log_r.exp()), quad),
        }
    }

    /// Degree of the `Phi^{pm}_K` polynomials (1 or 2).
    pub fn phi_degree(&self) -> usize {
        match &self.weight {
            SiteWeight::GeometricGamma { .. }
            | SiteWeight::Krawtchouk { .. }
            | SiteWeight::Poisson { .. } => 1,
            _ => 2,
        }
    }

    /// Checks that the partition fits in the `K x R` box.
    pub fn contains(&self, lambda: &Partition) -> bool {
        lambda.length() <= self.k && u64::from(lambda.row(1)) <= self.r
    }

    /// Particle view of a partition in this model's box.
    pub fn particles(&self, lambda: &Partition) -> Result<ParticleConfig> {
        if !self.contains(lambda) {
            return Err(Error::Domain(format!(
                "{lambda} does not fit in the {} x {} box",
                self.k, self.r
            )));
        }
        ParticleConfig::from_partition(lambda, self.k, self.theta)
    }

    /// Unnormalized log-probability of a partition in the box.
    pub fn log_pmf_unnormalized(&self, lambda: &Partition) -> Result<f64> {
        let config = self.particles(lambda)?;
        let mut total = log_interaction(&config, self.theta);
        for &l in config.ells() {
            total += self.logw(l);
        }
        Ok(total)
    }
}

/// `sum_{i<j} log [Gamma(d+1) Gamma(d+theta) / (Gamma(d) Gamma(d+1-theta))]`
/// over the gaps `d = l_i - l_j`.
pub fn log_interaction(config: &ParticleConfig, theta: f64) -> f64 {
    let ells = config.ells();
    let mut total = 0.0;
    for i in 0..ells.len() {
        for j in i + 1..ells.len() {
            let d = ells[i] - ells[j];
            total += ln_gamma(d + 1.0) + ln_gamma(d + theta)
                - ln_gamma(d)
                - ln_gamma(d + 1.0 - theta);
        }
    }
    total
}

/// Closed-form log-normalization `log H_theta(rho_1; rho_2)` of the
/// unconditioned Jack measure for each case.
pub fn normalization_closed_form(p: &CaseParams) -> Result<f64> {
    p.validate()?;
    let theta = p.theta;
    let n = p.n as f64;
    match p.case {
        Case::I => {
            let m = p.resolved_m_count()? as f64;
            let ab = p.a.unwrap() * p.b.unwrap();
            Ok(-theta * n * m * (1.0 - ab).ln())
        }
        Case::II => {
            let m = p.resolved_m_count()? as f64;
            let ab = p.a.unwrap() * p.b.unwrap();
            Ok(n * m * (1.0 + ab).ln())
        }
        Case::III => {
            let s = n * p.t.unwrap();
            Ok(theta * p.a.unwrap() * n * s)
        }
        Case::IV => {
            let m = p.resolved_m_count()? as f64;
            let ab = p.a.unwrap() * p.b.unwrap();
            Ok(-n * m / theta * (1.0 - ab).ln())
        }
        Case::V => {
            let s = n * p.t.unwrap();
            Ok(p.a.unwrap() * n * s)
        }
        Case::VI => {
            let s1 = n * p.t1.unwrap();
            let s2 = n * p.t2.unwrap();
            Ok(theta * s1 * s2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    /// One representative parameter set per case, small but not tiny.
    fn desk_params() -> Vec<CaseParams> {
        let mut case3 = CaseParams::new(Case::III, 0.5, 6).with_t(1.5);
        case3.a = Some(0.8);
        let mut case5 = CaseParams::new(Case::V, 2.0, 3).with_t(0.5).with_d(2);
        case5.a = Some(1.2);
        vec![
            CaseParams::new(Case::I, 0.5, 4).with_ab(0.6, 0.8).with_m_count(6),
            CaseParams::new(Case::II, 1.0, 5).with_ab(0.7, 0.7).with_m_count(8),
            case3,
            CaseParams::new(Case::IV, 2.0, 3).with_ab(0.5, 0.9).with_m_count(4).with_d(3),
            case5,
            CaseParams::new(Case::VI, 0.5, 4).with_t12(1.0, 2.0).with_d(2),
        ]
    }

    #[test]
    fn case_ii_logw_at_zero() {
        // N=1, M=2, theta=1: w(0) = 1/Gamma(3), so logw(0) = -ln 2.
        let p = CaseParams::new(Case::II, 1.0, 1)
            .with_ab(0.5, 0.5)
            .with_m_count(2);
        let model = build_model(&p).unwrap();
        assert!((model.logw(0.0) + 2.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn case_iii_logw_is_poisson() {
        // N=1, a t theta = 2: logw(x) = x ln 2 - ln Gamma(x+1).
        let p = CaseParams::new(Case::III, 1.0, 1).with_t(2.0);
        let mut p = p;
        p.a = Some(1.0);
        let model = build_model(&p).unwrap();
        for x in [0.0, 1.0, 2.0, 5.0] {
            let expected = x * 2.0_f64.ln() - ln_gamma(x + 1.0);
            assert!((model.logw(x) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn case_vi_logw_at_zero() {
        let theta = 0.7;
        let p = CaseParams::new(Case::VI, theta, 1).with_t12(1.0, 1.0);
        let model = build_model(&p).unwrap();
        assert!((model.logw(0.0) + ln_gamma(theta)).abs() < 1e-12);
    }

    #[test]
    fn interaction_examples() {
        // K = 1: empty product.
        let single = ParticleConfig::from_partition(&pt(&[3]), 1, 0.5).unwrap();
        assert_eq!(log_interaction(&single, 0.5), 0.0);

        // theta = 1, l = (2, 0): cross term (l_i - l_j)^2 = 4.
        let cfg = ParticleConfig { ells: vec![2.0, 0.0], theta: 1.0 };
        assert!((log_interaction(&cfg, 1.0) - 4.0_f64.ln()).abs() < 1e-12);

        // theta = 1/2, l = (3/2, 0): Gamma(5/2)Gamma(2)/(Gamma(3/2)Gamma(2)) = 3/2.
        let cfg = ParticleConfig { ells: vec![1.5, 0.0], theta: 0.5 };
        assert!((log_interaction(&cfg, 0.5) - 1.5_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn particle_roundtrip() {
        let theta = 0.5;
        let lam = pt(&[4, 2, 2]);
        let cfg = ParticleConfig::from_partition(&lam, 5, theta).unwrap();
        assert_eq!(cfg.ells().len(), 5);
        assert_eq!(cfg.ells()[0], 4.0 + 4.0 * theta);
        assert_eq!(cfg.to_partition().unwrap(), lam);
        assert!(ParticleConfig::from_partition(&lam, 2, theta).is_err());
    }

    #[test]
    fn weight_ratio_matches_logw_all_cases() {
        let params = desk_params();
        for p in &params {
            let model = build_model(p).unwrap();
            let hi = model.r() as f64 + (model.k() as f64 - 1.0) * model.theta();
            for step in 1..=50 {
                let x = (step as f64 / 50.0 * (hi - 1.0)).floor() + 1.0;
                let (plus, minus) = model.weight_ratio(x);
                let direct = (model.logw(x) - model.logw(x - 1.0)).exp();
                let via_phi = plus / minus;
                assert!(
                    (direct - via_phi).abs() <= 1e-10 * via_phi.abs().max(1.0),
                    "case {} x={x}: {direct} vs {via_phi}",
                    p.case
                );
            }
        }
    }

    #[test]
    fn phi_boundary_zeros() {
        // Phi^-_K(0) = 0 in every case; Case II additionally has
        // Phi^+_K(s_K) = 0 at the wall s_K = M + 1 + (N-1) theta.
        for p in &desk_params() {
            let model = build_model(p).unwrap();
            let (plus, minus) = model.phi_polys();
            assert_eq!(minus.eval(0.0), 0.0, "case {}", p.case);
            if p.case == Case::II {
                let s_k = model.r() as f64 + 1.0 + (model.k() as f64 - 1.0) * model.theta();
                assert!(plus.eval(s_k).abs() < 1e-12, "case II wall: {}", plus.eval(s_k));
            }
        }
    }

    #[test]
    fn phi_polys_match_weight_ratio() {
        for p in &desk_params() {
            let model = build_model(p).unwrap();
            let (plus, minus) = model.phi_polys();
            for step in 1..=20 {
                let x = step as f64;
                let (vp, vm) = model.weight_ratio(x);
                assert!((plus.eval(x) - vp).abs() < 1e-9 * vp.abs().max(1.0));
                assert!((minus.eval(x) - vm).abs() < 1e-9 * vm.abs().max(1.0));
            }
        }
    }

    #[test]
    fn pmf_is_finite_on_box_states() {
        for p in &desk_params() {
            let model = build_model(p).unwrap();
            let lam = pt(&[2, 1]);
            if model.contains(&lam) {
                let v = model.log_pmf_unnormalized(&lam).unwrap();
                assert!(v.is_finite(), "case {}", p.case);
            }
        }
    }

    #[test]
    fn empty_partition_pmf_is_weight_of_staircase() {
        let p = CaseParams::new(Case::II, 0.5, 3)
            .with_ab(0.6, 0.7)
            .with_m_count(4);
        let model = build_model(&p).unwrap();
        let lam = Partition::empty();
        let direct = model.log_pmf_unnormalized(&lam).unwrap();
        let cfg = model.particles(&lam).unwrap();
        let manual: f64 = cfg.ells().iter().map(|&l| model.logw(l)).sum::<f64>()
            + log_interaction(&cfg, 0.5);
        assert!((direct - manual).abs() < 1e-12);
    }

    #[test]
    fn out_of_box_rejected() {
        let p = CaseParams::new(Case::II, 1.0, 2)
            .with_ab(0.5, 0.5)
            .with_m_count(2);
        let model = build_model(&p).unwrap();
        assert!(model.log_pmf_unnormalized(&pt(&[3])).is_err());
        assert!(model.log_pmf_unnormalized(&pt(&[1, 1, 1])).is_err());
    }

    #[test]
    fn normalization_closed_forms() {
        // Case I, N=M=1, theta=1, ab=1/4 -> log(4/3).
        let p1 = CaseParams::new(Case::I, 1.0, 1)
            .with_ab(0.5, 0.5)
            .with_m_count(1);
        assert!(
            (normalization_closed_form(&p1).unwrap() - (4.0_f64 / 3.0).ln()).abs() < 1e-12
        );

        // Case II, N=2, M=3, ab=1/2 -> 6 log(3/2).
        let p2 = CaseParams::new(Case::II, 1.0, 2)
            .with_ab(1.0, 0.5)
            .with_m_count(3);
        assert!(
            (normalization_closed_form(&p2).unwrap() - 6.0 * 1.5_f64.ln()).abs() < 1e-12
        );

        // Case VI with s1 s2 = 0 is excluded by validation (t > 0), but the
        // formula at tiny t is near zero.
        let p6 = CaseParams::new(Case::VI, 1.0, 1).with_t12(1e-12, 1e-12);
        assert!(normalization_closed_form(&p6).unwrap().abs() < 1e-20);
    }

    #[test]
    fn invalid_parameters_rejected() {
        let p = CaseParams::new(Case::I, 1.0, 2).with_ab(2.0, 0.6).with_m_count(2);
        assert!(matches!(build_model(&p), Err(Error::Parameter(_))));
        let p = CaseParams::new(Case::IV, 1.0, 2).with_ab(1.5, 0.9).with_m_count(2);
        assert!(matches!(build_model(&p), Err(Error::Parameter(_))));
        let p = CaseParams::new(Case::II, 1.0, 2).with_ab(0.5, 0.5);
        assert!(build_model(&p).is_err());
    }

    #[test]
    fn case_i_swaps_roles_when_m_smaller() {
        let p = CaseParams::new(Case::I, 1.0, 5)
            .with_ab(0.5, 0.5)
            .with_m_count(3);
        let model = build_model(&p).unwrap();
        assert_eq!(model.k(), 3);
        assert!((p.swapped_m_ratio().unwrap() - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn defaults_for_d_and_cutoff() {
        let p = CaseParams::new(Case::IV, 1.0, 2).with_ab(0.5, 0.5).with_m_count(2);
        // alpha = (0.25*2 + 2*sqrt(0.25)) / 0.75 = 2 -> d = 4.
        assert_eq!(p.resolved_d().unwrap(), 4);

        let p = CaseParams::new(Case::VI, 1.0, 2).with_t12(1.0, 1.0);
        assert_eq!(p.resolved_d().unwrap(), 4);

        let mut p3 = CaseParams::new(Case::III, 1.0, 10).with_t(1.0);
        p3.a = Some(1.0);
        let model = build_model(&p3).unwrap();
        assert_eq!(model.r(), 80); // 4 (at + 1) theta * N = 80
    }

    #[test]
    fn json_config_roundtrip() {
        let json = r#"{"case":"II","theta":1.0,"a":0.7,"b":0.7,"N":200,"M":300}"#;
        let p: CaseParams = serde_json::from_str(json).unwrap();
        assert_eq!(p.case, Case::II);
        assert_eq!(p.n, 200);
        assert_eq!(p.resolved_m_count().unwrap(), 300);
        assert!((p.resolved_m_ratio().unwrap() - 1.5).abs() < 1e-15);
        let back = serde_json::to_string(&p).unwrap();
        let p2: CaseParams = serde_json::from_str(&back).unwrap();
        assert_eq!(p, p2);
    }
}
