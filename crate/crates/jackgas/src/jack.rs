//! Jack symmetric functions in exact rational arithmetic.
//!
//! The deformation parameter `theta` is an exact positive rational here;
//! floating-point `theta` only enters the numeric modules downstream. The
//! scalar product on power sums is
//! `<p_lam, p_mu> = 1{lam = mu} * theta^{-l(lam)} * prod_i i^{m_i} m_i!`,
//! and `J_lam` is the unique family that is orthogonal for it and monic in
//! the monomial basis with respect to reverse-lexicographic order. The
//! basis is built per degree by Gram-Schmidt in the monomial basis, with
//! the scalar product pushed through the exact p <-> m change of basis;
//! closed-form product evaluations at the homogeneous specializations are
//! implemented separately and cross-checked against the symbolic route.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::partition::{cell_stats, cells, partitions_of, Partition};

pub type Rat = BigRational;

/// Default cap on the degree of the symbolic (Gram-Schmidt) route. Beyond
/// it only the closed product evaluations are offered.
pub const DEFAULT_SYMBOLIC_CAP: u64 = 10;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

fn rat_int(n: u64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `x^k` for signed `k` (requires `x != 0` when `k < 0`).
fn rat_pow(x: &Rat, k: i64) -> Rat {
    if k >= 0 {
        x.pow(k as i32)
    } else {
        x.pow((-k) as i32).recip()
    }
}

/// A homogeneous symmetric function expressed in the power-sum basis:
/// a map from the index partition of `p_lam` to an exact coefficient.
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymFuncExpr {
    degree: u64,
    terms: BTreeMap<Partition, Rat>,
}

impl SymFuncExpr {
    pub fn zero(degree: u64) -> Self {
        SymFuncExpr { degree, terms: BTreeMap::new() }
    }

    /// Builds from (partition, coefficient) pairs; all index partitions
    /// must have weight `degree`.
    pub fn from_terms(
        degree: u64,
        terms: impl IntoIterator<Item = (Partition, Rat)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lam, c) in terms {
            if lam.weight() != degree {
                return Err(Error::Domain(format!(
                    "term p_{lam} has weight {} in a degree-{degree} expression",
                    lam.weight()
                )));
            }
            if !c.is_zero() {
                let entry = map.entry(lam).or_insert_with(Rat::zero);
                *entry += c;
            }
        }
        map.retain(|_, c: &mut Rat| !c.is_zero());
        Ok(SymFuncExpr { degree, terms: map })
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, lam: &Partition) -> Rat {
        self.terms.get(lam).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Serialize for SymFuncExpr {
    /// Serializes as a list of `{partition, numerator, denominator}` with
    /// the big integers rendered as decimal strings.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            partition: &'a [u32],
            numerator: String,
            denominator: String,
        }
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (lam, c) in &self.terms {
            seq.serialize_element(&Term {
                partition: lam.parts(),
                numerator: c.numer().to_string(),
                denominator: c.denom().to_string(),
            })?;
        }
        seq.end()
    }
}

/// Entry-point precondition: the deformation parameter is a positive
/// rational throughout the symbolic core.
fn check_theta(theta: &Rat) {
    assert!(theta.is_positive(), "theta must be a positive rational, got {theta}");
}

/// `<p_lam, p_lam> = theta^{-l(lam)} * prod_{i>=1} i^{m_i(lam)} m_i(lam)!`.
pub fn power_product_norm(lam: &Partition, theta: &Rat) -> Rat {
    check_theta(theta);
    let mut acc = rat_pow(theta, -(lam.length() as i64));
    let lam1 = lam.parts().first().copied().unwrap_or(0);
    for i in 1..=lam1 {
        let m = lam.multiplicity(i) as u64;
        if m == 0 {
            continue;
        }
        acc *= rat_int(i as u64).pow(m as i32);
        for f in 1..=m {
            acc *= rat_int(f);
        }
    }
    acc
}

/// A homogeneous Jack-positive specialization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Specialization {
    /// `alpha_1 = ... = alpha_N = a`, everything else zero.
    HomAlpha { a: Rat, n: u64 },
    /// `beta_1 = ... = beta_M = b / theta`, everything else zero.
    HomBeta { b: Rat, m: u64 },
    /// Plancherel specialization `tau_s`: `gamma = s`.
    Plancherel { s: Rat },
}

impl Specialization {
    pub fn hom_alpha(a: Rat, n: u64) -> Result<Self> {
        if !a.is_positive() || n == 0 {
            return Err(Error::Parameter("pure-alpha needs a > 0 and N >= 1".into()));
        }
        Ok(Specialization::HomAlpha { a, n })
    }

    pub fn hom_beta(b: Rat, m: u64) -> Result<Self> {
        if !b.is_positive() || m == 0 {
            return Err(Error::Parameter("pure-beta needs b > 0 and M >= 1".into()));
        }
        Ok(Specialization::HomBeta { b, m })
    }

    pub fn plancherel(s: Rat) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::Parameter("Plancherel needs s > 0".into()));
        }
        Ok(Specialization::Plancherel { s })
    }

    /// Image of `p_k` under the specialization, for the given `theta`.
    ///
    /// Pure-alpha sends `p_k -> N a^k`; pure-beta with `beta_i = b/theta`
    /// sends `p_k -> (-theta)^{k-1} M (b/theta)^k = M (-1)^{k-1} b^k / theta`;
    /// Plancherel sends `p_1 -> s` and kills all higher `p_k`.
    pub fn power_sum_image(&self, k: u32, theta: &Rat) -> Rat {
        assert!(k >= 1);
        match self {
            Specialization::HomAlpha { a, n } => rat_int(*n) * a.pow(k as i32),
            Specialization::HomBeta { b, m } => {
                let sign = if k % 2 == 1 { Rat::one() } else { -Rat::one() };
                sign * rat_int(*m) * b.pow(k as i32) / theta
            }
            Specialization::Plancherel { s } => {
                if k == 1 {
                    s.clone()
                } else {
                    Rat::zero()
                }
            }
        }
    }
}

/// Evaluates a power-sum expression at a specialization.
pub fn specialize(expr: &SymFuncExpr, rho: &Specialization, theta: &Rat) -> Rat {
    let mut total = Rat::zero();
    for (lam, c) in expr.terms() {
        let mut prod = c.clone();
        for &part in lam.parts() {
            prod *= rho.power_sum_image(part, theta);
        }
        total += prod;
    }
    total
}

/// The automorphism `omega_{theta^{-1}}`: `p_k -> (-1)^{k-1} theta^{-1} p_k`,
/// extended multiplicatively over `p_lam`.
pub fn omega_theta(expr: &SymFuncExpr, theta: &Rat) -> SymFuncExpr {
    let terms = expr.terms().map(|(lam, c)| {
        let sign = (lam.weight() - lam.length() as u64) % 2;
        let mut factor = rat_pow(theta, -(lam.length() as i64));
        if sign == 1 {
            factor = -factor;
        }
        (lam.clone(), c.clone() * factor)
    });
    SymFuncExpr::from_terms(expr.degree(), terms.collect::<Vec<_>>())
        .expect("degree preserved")
}

/// `prod_box (a + theta*l + theta) / (a + theta*l + 1)`, the ratio between
/// the dual Jack function and `J_lam`.
pub fn dual_scale_factor(lam: &Partition, theta: &Rat) -> Rat {
    check_theta(theta);
    let mut acc = Rat::one();
    for (i, j) in cells(lam) {
        let st = cell_stats(lam, i, j).expect("cell of lambda");
        let base = rat_int(st.arm as u64) + theta * rat_int(st.leg as u64);
        acc *= (&base + theta) / (base + Rat::one());
    }
    acc
}

/// Closed-form evaluation of `J_lam` (or its dual) at a homogeneous
/// specialization, via the box products; exact, any degree.
///
/// Vanishing is exact: pure-alpha gives 0 when `l(lam) > N`, pure-beta
/// gives 0 when `lam_1 > M`.
pub fn eval_jack(lam: &Partition, rho: &Specialization, theta: &Rat, dual: bool) -> Rat {
    check_theta(theta);
    match rho {
        Specialization::HomAlpha { a, n } => alpha_eval(lam, a, *n, theta, dual),
        Specialization::Plancherel { s } => plancherel_eval(lam, s, theta, dual),
        Specialization::HomBeta { b, m } => {
            // J_lam(b_beta^M; theta) = Jt_{lam'}(b^M; 1/theta) and
            // Jt_lam(b_beta^M; theta) = J_{lam'}(b^M; 1/theta).
            let conj = lam.conjugate();
            alpha_eval(&conj, b, *m, &theta.clone().recip(), !dual)
        }
    }
}

fn alpha_eval(lam: &Partition, a: &Rat, n: u64, theta: &Rat, dual: bool) -> Rat {
    if lam.length() as u64 > n {
        return Rat::zero();
    }
    let mut acc = a.pow(lam.weight() as i32);
    for (i, j) in cells(lam) {
        let st = cell_stats(lam, i, j).expect("cell of lambda");
        let num = theta * rat_int(n) + rat_int(st.coarm as u64)
            - theta * rat_int(st.coleg as u64);
        let hook = rat_int(st.arm as u64) + theta * rat_int(st.leg as u64);
        let den = if dual { hook + Rat::one() } else { hook + theta };
        acc *= num / den;
    }
    acc
}

fn plancherel_eval(lam: &Partition, s: &Rat, theta: &Rat, dual: bool) -> Rat {
    let mut acc = (s * theta).pow(lam.weight() as i32);
    for (i, j) in cells(lam) {
        let st = cell_stats(lam, i, j).expect("cell of lambda");
        let hook = rat_int(st.arm as u64) + theta * rat_int(st.leg as u64);
        let den = if dual { hook + Rat::one() } else { hook + theta };
        acc /= den;
    }
    acc
}

/// Per-degree exact linear algebra: partitions of `n` in ascending
/// reverse-lex order, the p <-> m transition matrices, and the Jack basis
/// coefficients in both bases. Read-only after construction.
pub(crate) struct DegreeTable {
    pub parts: Vec<Partition>,
    index: HashMap<Partition, usize>,
    /// `J_{parts[i]} = sum_j jack_m[i][j] m_j`; unitriangular.
    #[allow(dead_code)]
    pub jack_m: Vec<Vec<Rat>>,
    /// `J_{parts[i]} = sum_j jack_p[i][j] p_j`.
    pub jack_p: Vec<Vec<Rat>>,
}

impl DegreeTable {
    pub fn index_of(&self, lam: &Partition) -> usize {
        self.index[lam]
    }

    fn build(n: u64, theta: &Rat) -> DegreeTable {
        let parts = partitions_of(n);
        let count = parts.len();
        let index: HashMap<Partition, usize> =
            parts.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();

        // Expand each p_lam over monomials by multiplying in one power sum
        // at a time: p_r * m_mu = sum over ways to add r to a part of mu
        // (including a zero part), weighted by the multiplicity of the
        // grown part in the result.
        let mut p2m: Vec<Vec<Rat>> = Vec::with_capacity(count);
        for lam in &parts {
            let mut acc: BTreeMap<Partition, Rat> = BTreeMap::new();
            acc.insert(Partition::empty(), Rat::one());
            for &r in lam.parts() {
                let mut next: BTreeMap<Partition, Rat> = BTreeMap::new();
                for (mu, coeff) in &acc {
                    let mut values: Vec<u32> = vec![0];
                    values.extend(mu.parts().iter().copied());
                    values.dedup();
                    for &v in values.iter() {
                        let grown = grow_part(mu, v, r);
                        let mult = grown.multiplicity(v + r) as u64;
                        let entry = next.entry(grown).or_insert_with(Rat::zero);
                        *entry += coeff.clone() * rat_int(mult);
                    }
                }
                acc = next;
            }
            let mut row = vec![Rat::zero(); count];
            for (mu, coeff) in acc {
                row[index[&mu]] = coeff;
            }
            p2m.push(row);
        }

        // Invert the (upper triangular, nonzero diagonal) p2m matrix.
        let m2p = invert_upper_triangular(&p2m);

        // Gram matrix of the monomial functions through the p-basis, where
        // the scalar product is diagonal with entries z_k = <p_k, p_k>.
        let z: Vec<Rat> = parts.iter().map(|p| power_product_norm(p, theta)).collect();
        let gram = |u: &[Rat], v: &[Rat]| -> Rat {
            let mut s = Rat::zero();
            for k in 0..count {
                if !u[k].is_zero() && !v[k].is_zero() {
                    s += &u[k] * &v[k] * &z[k];
                }
            }
            s
        };

        // Gram-Schmidt in ascending reverse-lex order keeps each J monic on
        // its own monomial and supported on smaller ones.
        let mut jack_m: Vec<Vec<Rat>> = Vec::with_capacity(count);
        let mut jack_p: Vec<Vec<Rat>> = Vec::with_capacity(count);
        let mut norms: Vec<Rat> = Vec::with_capacity(count);
        for i in 0..count {
            let mut coeff_m = vec![Rat::zero(); count];
            coeff_m[i] = Rat::one();
            let mut coeff_p = m2p[i].clone();
            for j in 0..i {
                let overlap = gram(&m2p[i], &jack_p[j]);
                if overlap.is_zero() {
                    continue;
                }
                let c = overlap / &norms[j];
                for k in 0..count {
                    let dm = c.clone() * &jack_m[j][k];
                    coeff_m[k] -= dm;
                    let dp = c.clone() * &jack_p[j][k];
                    coeff_p[k] -= dp;
                }
            }
            norms.push(gram(&coeff_p, &coeff_p));
            jack_m.push(coeff_m);
            jack_p.push(coeff_p);
        }

        DegreeTable { parts, index, jack_m, jack_p }
    }
}

fn grow_part(mu: &Partition, v: u32, r: u32) -> Partition {
    let mut parts: Vec<u32> = mu.parts().to_vec();
    if v == 0 {
        parts.push(r);
    } else {
        let pos = parts.iter().position(|&p| p == v).expect("value present");
        parts[pos] = v + r;
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Partition::from_valid(parts)
}

fn invert_upper_triangular(a: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = a.len();
    let mut inv = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        inv[i][i] = a[i][i].clone().recip();
        for j in i + 1..n {
            let mut s = Rat::zero();
            for k in i..j {
                if !inv[i][k].is_zero() && !a[k][j].is_zero() {
                    s += &inv[i][k] * &a[k][j];
                }
            }
            if !s.is_zero() {
                inv[i][j] = -s / &a[j][j];
            }
        }
    }
    inv
}

type TableKey = (u64, String);

static TABLE_CACHE: LazyLock<Mutex<HashMap<TableKey, Arc<DegreeTable>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

pub(crate) fn degree_table(n: u64, theta: &Rat) -> Arc<DegreeTable> {
    let key = (n, theta.to_string());
    if let Some(t) = TABLE_CACHE.lock().unwrap().get(&key) {
        return Arc::clone(t);
    }
    let table = Arc::new(DegreeTable::build(n, theta));
    TABLE_CACHE
        .lock()
        .unwrap()
        .entry(key)
        .or_insert(table)
        .clone()
}

/// The Jack symmetric function `J_lam` expanded in the power-sum basis,
/// computed by exact Gram-Schmidt. Fails with a resource error beyond the
/// degree cap.
pub fn jack_in_p_basis_capped(lam: &Partition, theta: &Rat, cap: u64) -> Result<SymFuncExpr> {
    check_theta(theta);
    let n = lam.weight();
    if n > cap {
        return Err(Error::Resource(format!(
            "degree {n} exceeds the symbolic cap {cap}; use the closed products"
        )));
    }
    let table = degree_table(n, theta);
    let i = table.index_of(lam);
    let terms: Vec<(Partition, Rat)> = table
        .parts
        .iter()
        .cloned()
        .zip(table.jack_p[i].iter().cloned())
        .collect();
    SymFuncExpr::from_terms(n, terms)
}

/// [`jack_in_p_basis_capped`] with the default cap of 10.
pub fn jack_in_p_basis(lam: &Partition, theta: &Rat) -> Result<SymFuncExpr> {
    jack_in_p_basis_capped(lam, theta, DEFAULT_SYMBOLIC_CAP)
}
