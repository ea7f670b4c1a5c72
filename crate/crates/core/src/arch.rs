//! GSAC architecture configurations and RF-chain partition enumeration.
//!
//! A configuration describes how a transmit array of `n_t` antennas is split
//! into sub-arrays, how many RF chains feed each sub-array, and therefore how
//! many phase shifters the transmitter carries. Candidate RF configurations
//! for a given total chain count are exactly the integer partitions of that
//! count, stored in canonical non-increasing form.

use std::fmt;

use crate::error::{Error, Result};

/// Validated RF/antenna split of the transmit array.
///
/// Immutable after construction: every instance satisfies
/// - `Σ rf_per_sub = n_rf_total` and `Σ ant_per_sub = n_t`,
/// - `1 ≤ rf_i ≤ ant_i` per sub-array (one phase shifter per antenna
///   per chain, so `n_ps_i = ant_i`),
/// - sub-arrays sorted canonically (RF count non-increasing, antenna count
///   non-increasing on ties), since orderings of the same multiset describe
///   the same architecture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GsacConfig {
    n_t: usize,
    n_rf_total: usize,
    rf_per_sub: Vec<usize>,
    ant_per_sub: Vec<usize>,
}

impl GsacConfig {
    /// Build and validate a configuration from explicit per-sub-array counts.
    pub fn new(n_t: usize, rf_per_sub: &[usize], ant_per_sub: &[usize]) -> Result<Self> {
        if rf_per_sub.is_empty() {
            return Err(Error::ConstraintViolation(
                "at least one sub-array is required".into(),
            ));
        }
        if rf_per_sub.len() != ant_per_sub.len() {
            return Err(Error::ConstraintViolation(format!(
                "rf_per_sub has {} entries but ant_per_sub has {}",
                rf_per_sub.len(),
                ant_per_sub.len()
            )));
        }
        let mut pairs: Vec<(usize, usize)> = rf_per_sub
            .iter()
            .copied()
            .zip(ant_per_sub.iter().copied())
            .collect();
        // Canonical order: RF count descending, antennas descending on ties.
        pairs.sort_by(|a, b| b.cmp(a));

        let n_rf_total: usize = pairs.iter().map(|p| p.0).sum();
        let ant_sum: usize = pairs.iter().map(|p| p.1).sum();
        if ant_sum != n_t {
            return Err(Error::ConstraintViolation(format!(
                "antennas per sub-array sum to {ant_sum}, expected n_t = {n_t}"
            )));
        }
        for (i, &(rf, ant)) in pairs.iter().enumerate() {
            if rf < 1 {
                return Err(Error::ConstraintViolation(format!(
                    "sub-array {i}: RF chain count must be at least 1"
                )));
            }
            if rf > ant {
                return Err(Error::ConstraintViolation(format!(
                    "sub-array {i}: {rf} RF chains exceed {ant} antennas"
                )));
            }
        }
        let cfg = GsacConfig {
            n_t,
            n_rf_total,
            rf_per_sub: pairs.iter().map(|p| p.0).collect(),
            ant_per_sub: pairs.iter().map(|p| p.1).collect(),
        };
        debug_assert!(cfg.n_sub() <= cfg.n_rf_total);
        debug_assert!(cfg.n_rf_total <= cfg.n_t);
        debug_assert!(cfg.n_t <= cfg.n_ps_total() && cfg.n_ps_total() <= cfg.n_t * cfg.n_rf_total);
        Ok(cfg)
    }

    /// Configuration with antennas allocated proportionally to RF chains.
    pub fn proportional(n_t: usize, rf_per_sub: &[usize]) -> Result<Self> {
        let ant = allocate_antennas(n_t, rf_per_sub)?;
        GsacConfig::new(n_t, rf_per_sub, &ant)
    }

    /// Fully-connected boundary: one sub-array holding every RF chain.
    pub fn fully_connected(n_t: usize, n_rf: usize) -> Result<Self> {
        GsacConfig::new(n_t, &[n_rf], &[n_t])
    }

    /// Sub-array-connected boundary: one RF chain per sub-array.
    pub fn sub_array_connected(n_t: usize, n_rf: usize) -> Result<Self> {
        GsacConfig::proportional(n_t, &vec![1; n_rf])
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_rf_total(&self) -> usize {
        self.n_rf_total
    }

    /// Stream count; the architecture transmits one stream per RF chain.
    pub fn n_s(&self) -> usize {
        self.n_rf_total
    }

    pub fn n_sub(&self) -> usize {
        self.rf_per_sub.len()
    }

    pub fn rf_per_sub(&self) -> &[usize] {
        &self.rf_per_sub
    }

    pub fn ant_per_sub(&self) -> &[usize] {
        &self.ant_per_sub
    }

    /// Phase shifters per RF chain in each sub-array (equal to the antenna
    /// count of that sub-array).
    pub fn n_ps_per_rf(&self) -> &[usize] {
        &self.ant_per_sub
    }

    /// Total phase shifter count `Σ ant_i · rf_i`.
    pub fn n_ps_total(&self) -> usize {
        self.rf_per_sub
            .iter()
            .zip(&self.ant_per_sub)
            .map(|(rf, ant)| rf * ant)
            .sum()
    }

    /// Row offset of sub-array `i` in the stacked antenna dimension.
    pub fn ant_offset(&self, i: usize) -> usize {
        self.ant_per_sub[..i].iter().sum()
    }

    /// Column offset of sub-array `i` in the stacked RF dimension.
    pub fn rf_offset(&self, i: usize) -> usize {
        self.rf_per_sub[..i].iter().sum()
    }

    /// The RF partition as a display string, e.g. `(5,2,1)`.
    pub fn rf_string(&self) -> String {
        partition_string(&self.rf_per_sub)
    }
}

impl fmt::Display for GsacConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rf_string())
    }
}

/// Render a partition in the configuration-string format `(5,2,1)`.
pub fn partition_string(parts: &[usize]) -> String {
    let inner: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
    format!("({})", inner.join(","))
}

/// Parse a configuration string of comma-separated integers in parentheses,
/// e.g. `(5,2,1)`.
pub fn parse_partition_string(s: &str) -> Result<Vec<usize>> {
    let t = s.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|rest| rest.strip_suffix(')'))
        .ok_or_else(|| {
            Error::Parse(format!(
                "configuration `{s}` must be wrapped in parentheses"
            ))
        })?;
    let mut parts = Vec::new();
    for tok in inner.split(',') {
        let tok = tok.trim();
        let v: usize = tok
            .parse()
            .map_err(|_| Error::Parse(format!("configuration `{s}`: `{tok}` is not an integer")))?;
        parts.push(v);
    }
    if parts.is_empty() {
        return Err(Error::Parse(format!("configuration `{s}` has no entries")));
    }
    Ok(parts)
}

/// Split `n_t` antennas over sub-arrays proportionally to their RF chains:
/// `ant_i = (n_t / Σrf) · rf_i`.
///
/// Fails with [`Error::IndivisibleAllocation`] unless `n_t` is an exact
/// multiple of the total RF count, so reproduced experiments always use
/// exact proportional splits; pass explicit antenna counts to
/// [`GsacConfig::new`] for anything else.
pub fn allocate_antennas(n_t: usize, rf_per_sub: &[usize]) -> Result<Vec<usize>> {
    let n_rf: usize = rf_per_sub.iter().sum();
    if n_rf == 0 {
        return Err(Error::ConstraintViolation(
            "rf_per_sub must contain at least one chain".into(),
        ));
    }
    if !n_t.is_multiple_of(n_rf) {
        return Err(Error::IndivisibleAllocation { n_t, n_rf });
    }
    let per_chain = n_t / n_rf;
    Ok(rf_per_sub.iter().map(|&rf| per_chain * rf).collect())
}

/// All partitions of an integer, canonical and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSet {
    n: usize,
    partitions: Vec<Vec<usize>>,
}

impl PartitionSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn partitions(&self) -> &[Vec<usize>] {
        &self.partitions
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }
}

/// Largest integer accepted by [`enumerate_partitions`]; p(64) ≈ 1.7 million
/// keeps exhaustive searches bounded.
pub const MAX_PARTITION_N: usize = 64;

/// Enumerate every partition of `n` with parts in non-increasing order,
/// listed in reverse lexicographic order: `(n)` first, `(1,…,1)` last.
pub fn enumerate_partitions(n: usize) -> Result<PartitionSet> {
    if !(1..=MAX_PARTITION_N).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "partition argument {n} outside 1..={MAX_PARTITION_N}"
        )));
    }
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    descend(n, n, &mut prefix, &mut out);
    Ok(PartitionSet { n, partitions: out })
}

fn descend(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if remaining == 0 {
        out.push(prefix.clone());
        return;
    }
    let top = remaining.min(max_part);
    for part in (1..=top).rev() {
        prefix.push(part);
        descend(remaining - part, part, prefix, out);
        prefix.pop();
    }
}

/// Hardy–Ramanujan asymptotic for the partition count:
/// `p(n) ≈ e^{π√(2n/3)} / (4n√3)`.
///
/// Only used for reporting and pre-sizing; enumeration is always exact.
pub fn partition_count_estimate(n: usize) -> f64 {
    let nf = n as f64;
    (std::f64::consts::PI * (2.0 * nf / 3.0).sqrt()).exp() / (4.0 * nf * 3.0f64.sqrt())
}
