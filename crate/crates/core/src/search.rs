//! Exhaustive energy-efficiency search over RF configurations.
//!
//! For a given total RF chain count the candidate architectures are the
//! integer partitions of that count. Every candidate is evaluated on the
//! same set of channel realizations (common random numbers), scoring the
//! Monte-Carlo mean rate of the SIC hybrid design against the deterministic
//! transmitter power of the configuration.

use crate::arch::{enumerate_partitions, partition_string, GsacConfig};
use crate::channel::{generate_channel, ChannelMatrix, ChannelParams, ChannelProfile};
use crate::error::{Error, Result};
use crate::metrics::{achievable_rate, energy_efficiency, total_power, LinkBudget, PowerModel};
use crate::precoder::design_sic_hybrid;
use crate::rng::derive_stream;
use crate::scalar::Scalar;

/// Outcome of evaluating one candidate RF configuration.
#[derive(Debug, Clone)]
pub enum CandidateOutcome<T> {
    Evaluated {
        cfg: GsacConfig,
        n_ps: usize,
        power: T,
        mean_rate: T,
        mean_ee: T,
        /// Digest of the channel set this candidate actually saw; equal
        /// digests across candidates certify common random numbers.
        channel_hash: u64,
    },
    Skipped {
        reason: String,
    },
}

/// One candidate row of a search report.
#[derive(Debug, Clone)]
pub struct Candidate<T> {
    pub rf_per_sub: Vec<usize>,
    pub outcome: CandidateOutcome<T>,
}

impl<T: Scalar> Candidate<T> {
    pub fn mean_ee(&self) -> Option<T> {
        match &self.outcome {
            CandidateOutcome::Evaluated { mean_ee, .. } => Some(*mean_ee),
            CandidateOutcome::Skipped { .. } => None,
        }
    }

    pub fn n_ps(&self) -> Option<usize> {
        match &self.outcome {
            CandidateOutcome::Evaluated { n_ps, .. } => Some(*n_ps),
            CandidateOutcome::Skipped { .. } => None,
        }
    }
}

/// Result of one exhaustive search run.
#[derive(Debug, Clone)]
pub struct SearchReport<T> {
    pub n_t: usize,
    pub n_r: usize,
    pub n_rf: usize,
    pub trials: usize,
    pub seed: u64,
    /// Linear SNR the candidates were scored at.
    pub snr: T,
    /// One entry per partition of `n_rf`, in enumeration order.
    pub candidates: Vec<Candidate<T>>,
    /// Index of the winner in `candidates`.
    pub best: usize,
}

impl<T: Scalar> SearchReport<T> {
    pub fn winner(&self) -> &Candidate<T> {
        &self.candidates[self.best]
    }

    fn find(&self, rf: &[usize]) -> Option<&Candidate<T>> {
        self.candidates.iter().find(|c| c.rf_per_sub == rf)
    }
}

/// Candidate ordering for the argmax: higher mean EE wins; ties prefer
/// fewer phase shifters, then the lexicographically larger partition.
fn better<T: Scalar>(a: &Candidate<T>, b: &Candidate<T>) -> bool {
    match (a.mean_ee(), b.mean_ee()) {
        (None, _) => false,
        (Some(_), None) => true,
        (Some(ea), Some(eb)) => {
            if ea != eb {
                return ea > eb;
            }
            let (pa, pb) = (a.n_ps().unwrap(), b.n_ps().unwrap());
            if pa != pb {
                return pa < pb;
            }
            a.rf_per_sub > b.rf_per_sub
        }
    }
}

/// Evaluate every RF configuration for `n_rf` chains and pick the one with
/// the best Monte-Carlo energy efficiency.
///
/// All candidates are scored on identical channel realizations derived from
/// `seed` by counter-based streams. Candidates whose proportional antenna
/// allocation is impossible are listed as skipped with the reason, never
/// dropped silently; if no candidate is feasible the allocation error is
/// returned.
#[allow(clippy::too_many_arguments)]
pub fn search_best_config<T: Scalar>(
    n_t: usize,
    n_r: usize,
    n_rf: usize,
    profile: &ChannelProfile<T>,
    snr: T,
    pm: &PowerModel<T>,
    trials: usize,
    seed: u64,
) -> Result<SearchReport<T>> {
    if trials < 1 {
        return Err(Error::OutOfRange("search needs at least one trial".into()));
    }
    let partitions = enumerate_partitions(n_rf)?;
    let budget = LinkBudget::new(snr, n_rf);

    // Common random numbers: one channel set shared by every candidate.
    let channels: Vec<ChannelMatrix<T>> = (0..trials)
        .map(|t| {
            let params = ChannelParams::new(*profile, n_t, n_r, derive_stream(seed, t as u64));
            generate_channel(&params)
        })
        .collect::<Result<_>>()?;

    let mut candidates = Vec::with_capacity(partitions.len());
    let mut first_skip: Option<Error> = None;
    for parts in partitions.partitions() {
        let cfg = match GsacConfig::proportional(n_t, parts) {
            Ok(cfg) => cfg,
            Err(e) => {
                let reason = e.to_string();
                if first_skip.is_none() {
                    first_skip = Some(e);
                }
                candidates.push(Candidate {
                    rf_per_sub: parts.clone(),
                    outcome: CandidateOutcome::Skipped { reason },
                });
                continue;
            }
        };
        let mut rate_sum = T::zero();
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for ch in &channels {
            hash ^= ch.content_hash();
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            let hp = design_sic_hybrid(ch.h(), &cfg, snr)?;
            rate_sum += achievable_rate(ch.h(), hp.f(), &budget)?;
        }
        let mean_rate = rate_sum / T::from_f64_lit(trials as f64);
        let power = total_power(&cfg, pm);
        let mean_ee = energy_efficiency(mean_rate, power)?;
        candidates.push(Candidate {
            rf_per_sub: parts.clone(),
            outcome: CandidateOutcome::Evaluated {
                n_ps: cfg.n_ps_total(),
                cfg,
                power,
                mean_rate,
                mean_ee,
                channel_hash: hash,
            },
        });
    }

    let mut best: Option<usize> = None;
    for (i, cand) in candidates.iter().enumerate() {
        if cand.mean_ee().is_none() {
            continue;
        }
        match best {
            Some(b) if !better(cand, &candidates[b]) => {}
            _ => best = Some(i),
        }
    }
    let best = match best {
        Some(b) => b,
        None => {
            return Err(first_skip
                .unwrap_or_else(|| Error::ConstraintViolation("no feasible candidate".into())));
        }
    };
    Ok(SearchReport {
        n_t,
        n_r,
        n_rf,
        trials,
        seed,
        snr,
        candidates,
        best,
    })
}

/// Cross-seed robustness comparison of two search reports.
#[derive(Debug, Clone)]
pub struct RobustnessSummary<T> {
    pub winners_match: bool,
    pub winner_a: Vec<usize>,
    pub winner_b: Vec<usize>,
    /// EE forfeited under report B's channels by adopting A's winner.
    pub ee_gap_a_under_b: T,
    /// EE forfeited under report A's channels by adopting B's winner.
    pub ee_gap_b_under_a: T,
}

/// Compare the winners of two searches over the same space but different
/// seeds: do they coincide, and how much efficiency would each winner give
/// up when evaluated under the other report's channels?
pub fn config_robustness<T: Scalar>(
    report_a: &SearchReport<T>,
    report_b: &SearchReport<T>,
) -> Result<RobustnessSummary<T>> {
    if report_a.n_rf != report_b.n_rf
        || report_a.n_t != report_b.n_t
        || report_a.n_r != report_b.n_r
    {
        return Err(Error::MismatchedSearchSpace(format!(
            "report A is (n_t={}, n_r={}, n_rf={}), report B is (n_t={}, n_r={}, n_rf={})",
            report_a.n_t, report_a.n_r, report_a.n_rf, report_b.n_t, report_b.n_r, report_b.n_rf
        )));
    }
    let winner_a = report_a.winner().rf_per_sub.clone();
    let winner_b = report_b.winner().rf_per_sub.clone();

    let cross = |winner: &[usize], other: &SearchReport<T>| -> Result<T> {
        let best_ee = other.winner().mean_ee().expect("winner is evaluated");
        let there = other
            .find(winner)
            .and_then(|c| c.mean_ee())
            .ok_or_else(|| {
                Error::MismatchedSearchSpace(format!(
                    "configuration {} missing from the other report",
                    partition_string(winner)
                ))
            })?;
        Ok(best_ee - there)
    };
    Ok(RobustnessSummary {
        winners_match: winner_a == winner_b,
        ee_gap_a_under_b: cross(&winner_a, report_b)?,
        ee_gap_b_under_a: cross(&winner_b, report_a)?,
        winner_a,
        winner_b,
    })
}

/// Render a search report as CSV: one row per candidate.
pub fn search_report_csv<T: Scalar>(report: &SearchReport<T>) -> String {
    let mut out = String::from("cfg,n_ps,power_w,mean_rate,mean_ee,skipped_reason\n");
    for cand in &report.candidates {
        let cfg = partition_string(&cand.rf_per_sub);
        match &cand.outcome {
            CandidateOutcome::Evaluated {
                n_ps,
                power,
                mean_rate,
                mean_ee,
                ..
            } => {
                out.push_str(&format!(
                    "\"{cfg}\",{n_ps},{power},{mean_rate},{mean_ee},\n"
                ));
            }
            CandidateOutcome::Skipped { reason } => {
                out.push_str(&format!(
                    "\"{cfg}\",,,,,\"{}\"\n",
                    reason.replace('"', "\"\"")
                ));
            }
        }
    }
    out
}

/// One-line human summary of the winner.
pub fn winner_summary<T: Scalar>(report: &SearchReport<T>) -> String {
    let w = report.winner();
    match &w.outcome {
        CandidateOutcome::Evaluated {
            power,
            mean_rate,
            mean_ee,
            ..
        } => format!(
            "best {} mean_rate={} bits/s/Hz power={} W mean_ee={} bits/s/Hz/W ({} trials, seed {})",
            partition_string(&w.rf_per_sub),
            mean_rate,
            power,
            mean_ee,
            report.trials,
            report.seed
        ),
        CandidateOutcome::Skipped { .. } => unreachable!("winner is always evaluated"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelMatrix;
    use crate::scalar::C;

    fn profile() -> ChannelProfile<f64> {
        ChannelProfile {
            n_cl: 4,
            n_ray: 2,
            spread: 7.5f64.to_radians(),
        }
    }

    #[test]
    fn candidate_count_matches_partition_count() {
        let pm = PowerModel::default();
        let report = search_best_config(16, 4, 4, &profile(), 1.0, &pm, 3, 11).unwrap();
        assert_eq!(report.candidates.len(), 5);
        assert!(report
            .candidates
            .iter()
            .all(|c| matches!(c.outcome, CandidateOutcome::Evaluated { .. })));
        // Winner EE dominates both boundary architectures (they are members
        // of the candidate set).
        let best = report.winner().mean_ee().unwrap();
        let fc = report.find(&[4]).unwrap().mean_ee().unwrap();
        let sac = report.find(&[1, 1, 1, 1]).unwrap().mean_ee().unwrap();
        assert!(best >= fc && best >= sac);
    }

    #[test]
    fn winner_dominates_every_candidate() {
        let pm = PowerModel::default();
        let report = search_best_config(16, 4, 4, &profile(), 2.0, &pm, 4, 99).unwrap();
        let best = report.winner().mean_ee().unwrap();
        for c in &report.candidates {
            assert!(best >= c.mean_ee().unwrap());
        }
    }

    #[test]
    fn common_random_numbers_hash_equal_across_candidates() {
        let pm = PowerModel::default();
        let report = search_best_config(8, 4, 4, &profile(), 1.0, &pm, 2, 5).unwrap();
        let hashes: Vec<u64> = report
            .candidates
            .iter()
            .filter_map(|c| match &c.outcome {
                CandidateOutcome::Evaluated { channel_hash, .. } => Some(*channel_hash),
                _ => None,
            })
            .collect();
        assert!(hashes.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn indivisible_candidates_are_skipped_with_reason() {
        // n_t = 6, n_rf = 4: no partition of 4 divides 6 evenly.
        let pm = PowerModel::default();
        let err = search_best_config(6, 4, 4, &profile(), 1.0, &pm, 1, 1).unwrap_err();
        assert!(matches!(err, Error::IndivisibleAllocation { .. }));
    }

    #[test]
    fn rank_one_channel_makes_all_architectures_equivalent() {
        // On a single-path channel every architecture can capture the whole
        // path: the FC candidate's feasible set contains all others, and the
        // dominance is tight. At the unconstrained level every candidate
        // achieves exactly log2(1 + (snr/N_s)·N_t·N_r); the practical SIC
        // rates sit in a narrow band around it (steering slices extract
        // losslessly).
        let n_t = 8;
        let n_r = 4;
        let snr = 1.0;
        let ch = ChannelMatrix::from_paths(n_t, n_r, &[(C::new(1.0, 0.0), 1.2, 0.7)]);
        let budget = LinkBudget::new(snr, 4);
        let fc_opt_rate = (1.0 + snr / 4.0 * (n_t * n_r) as f64).log2();
        for parts in enumerate_partitions(4).unwrap().partitions() {
            let cfg = GsacConfig::proportional(n_t, parts).unwrap();
            let opt = crate::precoder::design_unconstrained(ch.h(), &cfg, snr).unwrap();
            let r_opt = achievable_rate(ch.h(), opt.f_opt(), &budget).unwrap();
            assert!(
                (r_opt - fc_opt_rate).abs() < 1e-9,
                "{parts:?}: unconstrained rate {r_opt} vs FC {fc_opt_rate}"
            );
            let hp = design_sic_hybrid(ch.h(), &cfg, snr).unwrap();
            let r_sic = achievable_rate(ch.h(), hp.f(), &budget).unwrap();
            assert!(
                (r_sic - fc_opt_rate).abs() / fc_opt_rate < 0.15,
                "{parts:?}: SIC rate {r_sic} far from {fc_opt_rate}"
            );
        }
    }

    #[test]
    fn robustness_identical_seeds_match() {
        let pm = PowerModel::default();
        let a = search_best_config(16, 4, 4, &profile(), 1.0, &pm, 3, 7).unwrap();
        let b = search_best_config(16, 4, 4, &profile(), 1.0, &pm, 3, 7).unwrap();
        let summary = config_robustness(&a, &b).unwrap();
        assert!(summary.winners_match);
        assert_eq!(summary.ee_gap_a_under_b, 0.0);
        assert_eq!(summary.ee_gap_b_under_a, 0.0);
    }

    #[test]
    fn robustness_gaps_are_nonnegative_across_seeds() {
        let pm = PowerModel::default();
        let a = search_best_config(16, 4, 4, &profile(), 1.0, &pm, 4, 1).unwrap();
        let b = search_best_config(16, 4, 4, &profile(), 1.0, &pm, 4, 2).unwrap();
        let summary = config_robustness(&a, &b).unwrap();
        assert!(summary.ee_gap_a_under_b >= 0.0);
        assert!(summary.ee_gap_b_under_a >= 0.0);
    }

    #[test]
    fn robustness_rejects_disjoint_spaces() {
        let pm = PowerModel::default();
        let a = search_best_config(16, 4, 4, &profile(), 1.0, &pm, 2, 1).unwrap();
        let b = search_best_config(16, 4, 2, &profile(), 1.0, &pm, 2, 1).unwrap();
        assert!(matches!(
            config_robustness(&a, &b),
            Err(Error::MismatchedSearchSpace(_))
        ));
    }

    #[test]
    fn report_csv_lists_every_candidate() {
        let pm = PowerModel::default();
        let report = search_best_config(16, 4, 4, &profile(), 1.0, &pm, 2, 3).unwrap();
        let csv = search_report_csv(&report);
        assert_eq!(csv.lines().count(), 1 + 5);
        assert!(csv.starts_with("cfg,n_ps,power_w,mean_rate,mean_ee,skipped_reason\n"));
        assert!(csv.contains("\"(2,2)\""));
        assert!(winner_summary(&report).starts_with("best ("));
    }
}
