//! Integer partitions and their diagram statistics.
//!
//! A partition is stored dense as its nonzero parts in weakly decreasing
//! order; zero-padding to a fixed number of rows happens on demand where a
//! `K`-row view is needed. Row and column indices in cell operations are
//! 1-based, matching the usual (i, j) conventions for Young diagrams.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition: a weakly decreasing sequence of nonnegative integers with
/// trailing zeros suppressed. Serializes as a plain JSON integer array.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// The empty partition.
    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// Builds a partition from the given parts, which must be weakly
    /// decreasing once trailing zeros are dropped.
    pub fn new(parts: impl Into<Vec<u32>>) -> Result<Self> {
        let mut parts = parts.into();
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain(format!(
                "parts are not weakly decreasing: {parts:?}"
            )));
        }
        if parts.contains(&0) {
            return Err(Error::Domain("zero part before a nonzero part".into()));
        }
        Ok(Partition { parts })
    }

    /// Internal constructor for sequences already known to be valid.
    pub(crate) fn from_valid(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(parts.last() != Some(&0));
        Partition { parts }
    }

    /// Nonzero parts, largest first.
    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of nonzero parts, `l(lambda)`.
    pub fn length(&self) -> usize {
        self.parts.len()
    }

    /// Sum of the parts, `|lambda|`.
    pub fn weight(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    /// Row `i` (1-based); zero beyond the length.
    pub fn row(&self, i: usize) -> u32 {
        if i == 0 {
            panic!("row index is 1-based");
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// Multiplicity of the value `j` among the parts.
    pub fn multiplicity(&self, j: u32) -> usize {
        if j == 0 {
            return 0;
        }
        self.parts.iter().filter(|&&p| p == j).count()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The conjugate partition: `lambda'_i = #{j : lambda_j >= i}`.
    pub fn conjugate(&self) -> Partition {
        let cols = self.parts.first().copied().unwrap_or(0) as usize;
        let mut conj = Vec::with_capacity(cols);
        for i in 1..=cols {
            let count = self.parts.iter().take_while(|&&p| p as usize >= i).count();
            conj.push(count as u32);
        }
        Partition::from_valid(conj)
    }

    /// The parts padded with zeros to exactly `k` rows. Fails if the
    /// partition has more than `k` nonzero parts.
    pub fn padded(&self, k: usize) -> Result<Vec<u32>> {
        if self.parts.len() > k {
            return Err(Error::Domain(format!(
                "partition has {} rows, more than k = {k}",
                self.parts.len()
            )));
        }
        let mut out = self.parts.clone();
        out.resize(k, 0);
        Ok(out)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.parts
    }
}

/// Reverse-lexicographic comparison: `lambda > mu` iff there is a `k` with
/// `lambda_i = mu_i` for `i < k` and `lambda_k > mu_k`.
pub fn reverse_lex_compare(a: &Partition, b: &Partition) -> Ordering {
    let n = a.parts.len().max(b.parts.len());
    for i in 0..n {
        let x = a.parts.get(i).copied().unwrap_or(0);
        let y = b.parts.get(i).copied().unwrap_or(0);
        match x.cmp(&y) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    Ordering::Equal
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        reverse_lex_compare(self, other)
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Arm, leg, co-arm and co-leg lengths of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellStats {
    pub arm: u32,
    pub leg: u32,
    pub coarm: u32,
    pub coleg: u32,
}

/// Statistics of the cell `(i, j)` (1-based row and column) of `lambda`:
/// arm `lambda_i - j`, leg `lambda'_j - i`, co-arm `j - 1`, co-leg `i - 1`.
pub fn cell_stats(lambda: &Partition, i: usize, j: usize) -> Result<CellStats> {
    if i == 0 || j == 0 {
        return Err(Error::Domain("cell indices are 1-based".into()));
    }
    if j as u32 > lambda.row(i) {
        return Err(Error::Domain(format!(
            "cell ({i},{j}) lies outside the diagram {lambda}"
        )));
    }
    let conj_col = lambda
        .parts
        .iter()
        .take_while(|&&p| p as usize >= j)
        .count() as u32;
    Ok(CellStats {
        arm: lambda.row(i) - j as u32,
        leg: conj_col - i as u32,
        coarm: (j - 1) as u32,
        coleg: (i - 1) as u32,
    })
}

/// Iterates over all cells `(i, j)` of the diagram, row by row.
pub fn cells(lambda: &Partition) -> impl Iterator<Item = (usize, usize)> + '_ {
    lambda
        .parts
        .iter()
        .enumerate()
        .flat_map(|(i0, &p)| (1..=p as usize).map(move |j| (i0 + 1, j)))
}

/// Streaming enumeration of the partitions with at most `k` rows, largest
/// part at most `r` (when finite) and weight at most `max_weight` (when
/// given), in ascending reverse-lexicographic order, each exactly once.
///
/// At least one of `r` and `max_weight` must be finite.
pub fn enumerate_box(
    k: usize,
    r: Option<u32>,
    max_weight: Option<u64>,
) -> Result<BoxPartitions> {
    if r.is_none() && max_weight.is_none() {
        return Err(Error::Config(
            "enumerate_box needs a finite column bound or a weight cap".into(),
        ));
    }
    Ok(BoxPartitions {
        k,
        r,
        max_weight,
        state: None,
        done: false,
    })
}

/// Iterator produced by [`enumerate_box`].
pub struct BoxPartitions {
    k: usize,
    r: Option<u32>,
    max_weight: Option<u64>,
    /// Current partition as a k-padded vector; `None` before the first item.
    state: Option<Vec<u32>>,
    done: bool,
}

impl Iterator for BoxPartitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let r = self.r;
        let max_weight = self.max_weight;
        let state = match &mut self.state {
            None => {
                self.state = Some(vec![0; self.k]);
                return Some(Partition::empty());
            }
            Some(s) => s,
        };
        // Successor in ascending reverse-lex order: bump the deepest row
        // that can grow, zeroing everything below it.
        for idx in (0..self.k).rev() {
            let above = if idx == 0 { u32::MAX } else { state[idx - 1] };
            let bound = match r {
                Some(r) => r.min(above),
                None => above,
            };
            let prefix: u64 = state[..idx].iter().map(|&p| p as u64).sum();
            let new_weight = prefix + state[idx] as u64 + 1;
            let weight_ok = max_weight.is_none_or(|w| new_weight <= w);
            if state[idx] < bound && weight_ok {
                state[idx] += 1;
                for p in &mut state[idx + 1..] {
                    *p = 0;
                }
                let parts: Vec<u32> =
                    state.iter().copied().take_while(|&p| p > 0).collect();
                return Some(Partition::from_valid(parts));
            }
        }
        self.done = true;
        None
    }
}

/// All partitions of weight exactly `n`, ascending reverse-lex.
pub fn partitions_of(n: u64) -> Vec<Partition> {
    let iter = enumerate_box(n as usize, None, Some(n)).expect("weight cap given");
    iter.filter(|p| p.weight() == n).collect()
}
