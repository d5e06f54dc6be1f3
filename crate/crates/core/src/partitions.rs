//! Integer partitions and the part surgery used by the singular-vector
//! constraint system.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weakly decreasing sequence of positive integers. The empty partition is the
/// unique partition of zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Sorts the parts into weakly decreasing order. Zero parts are rejected.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Parse(format!("partition {parts:?} has a zero part")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition::default()
    }

    /// `[n]`, or the empty partition when `n = 0`.
    pub fn single(n: u32) -> Self {
        if n == 0 {
            Partition::empty()
        } else {
            Partition { parts: vec![n] }
        }
    }

    /// `[value^count]`
    pub fn rectangle(value: u32, count: usize) -> Self {
        assert!(value > 0 || count == 0, "zero part");
        Partition { parts: vec![value; count] }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn largest(&self) -> Option<u32> {
        self.parts.first().copied()
    }

    /// Number of parts equal to `n`.
    pub fn mult(&self, n: u32) -> usize {
        self.parts.iter().filter(|&&p| p == n).count()
    }

    /// Multiplicity runs `(value, count)` in decreasing value order.
    pub fn runs(&self) -> Vec<(u32, usize)> {
        let mut out: Vec<(u32, usize)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((v, c)) if *v == p => *c += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// Distinct part values, decreasing.
    pub fn distinct_parts(&self) -> Vec<u32> {
        self.runs().into_iter().map(|(v, _)| v).collect()
    }

    /// `self` with the parts of `sub` removed, respecting multiplicities.
    pub fn remove(&self, sub: &Partition) -> Result<Partition> {
        let mut parts = self.parts.clone();
        for &p in &sub.parts {
            let Some(pos) = parts.iter().position(|&q| q == p) else {
                return Err(Error::NotSubpartition { sub: sub.to_string(), whole: self.to_string() });
            };
            parts.remove(pos);
        }
        Ok(Partition { parts })
    }

    /// `self` with one part `n` removed, if present.
    pub fn remove_part(&self, n: u32) -> Option<Partition> {
        let pos = self.parts.iter().position(|&q| q == n)?;
        let mut parts = self.parts.clone();
        parts.remove(pos);
        Some(Partition { parts })
    }

    /// `self` with an extra part `n`. Inserting zero is the identity.
    pub fn insert(&self, n: u32) -> Partition {
        if n == 0 {
            return self.clone();
        }
        let mut parts = self.parts.clone();
        let pos = parts.iter().position(|&q| q < n).unwrap_or(parts.len());
        parts.insert(pos, n);
        Partition { parts }
    }

    pub fn is_subpartition_of(&self, whole: &Partition) -> bool {
        whole.remove(self).is_ok()
    }

    /// Adds `n` to the `k`-th part (1-based) and re-sorts. Equal parts give
    /// equal results, so only the value at position `k` matters.
    ///
    /// Panics if `k` is out of range.
    pub fn bump(&self, k: usize, n: u32) -> Partition {
        let mut parts = self.parts.clone();
        parts[k - 1] += n;
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    /// Subtracts `n` from the `k`-th part (1-based) and re-sorts. Absent unless
    /// that part strictly exceeds `n`; a part reduced to zero is not allowed.
    pub fn unbump(&self, k: usize, n: u32) -> Option<Partition> {
        let part = *self.parts.get(k.checked_sub(1)?)?;
        if part <= n {
            return None;
        }
        let mut parts = self.parts.clone();
        parts[k - 1] = part - n;
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Some(Partition { parts })
    }

    /// Run form, e.g. `[4^1,2^2]`.
    pub fn run_string(&self) -> String {
        let runs: Vec<String> = self.runs().iter().map(|(v, c)| format!("{v}^{c}")).collect();
        format!("[{}]", runs.join(","))
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Accepts `[4,2,1]`, the run form `[4^1,2^1,1^1]` and `[]`.
impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected a partition like [4,2,1], got {s:?}"));
        let inner = s.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(bad)?;
        let mut parts = Vec::new();
        for item in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item.split_once('^') {
                Some((v, c)) => {
                    let v: u32 = v.trim().parse().map_err(|_| bad())?;
                    let c: usize = c.trim().parse().map_err(|_| bad())?;
                    parts.extend(std::iter::repeat_n(v, c));
                }
                None => parts.push(item.parse().map_err(|_| bad())?),
            }
        }
        Partition::new(parts)
    }
}

/// All partitions of `n` in reverse lexicographic order.
pub fn enumerate(n: u32) -> Vec<Partition> {
    fn go(remaining: u32, max: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition { parts: current.clone() });
            return;
        }
        for p in (1..=max.min(remaining)).rev() {
            current.push(p);
            go(remaining - p, p, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Distinct subpartitions of `whole` with exactly `m` parts, each at most `max_part`.
pub fn bounded_subpartitions(whole: &Partition, m: usize, max_part: u32) -> Vec<Partition> {
    let runs: Vec<(u32, usize)> = whole.runs().into_iter().filter(|&(v, _)| v <= max_part).collect();
    fn go(runs: &[(u32, usize)], left: usize, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
        let Some((&(v, c), rest)) = runs.split_first() else {
            if left == 0 {
                out.push(Partition { parts: current.clone() });
            }
            return;
        };
        for take in (0..=c.min(left)).rev() {
            let len = current.len();
            current.extend(std::iter::repeat_n(v, take));
            go(rest, left - take, current, out);
            current.truncate(len);
        }
    }
    let mut out = Vec::new();
    go(&runs, m, &mut Vec::new(), &mut out);
    out
}

/// Number of partitions of each `0..=n`.
pub fn partition_counts(n: usize) -> Vec<u64> {
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for part in 1..=n {
        for total in part..=n {
            p[total] += p[total - part];
        }
    }
    p
}
