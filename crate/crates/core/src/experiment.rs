//! Reproducible Monte-Carlo experiment sweeps.
//!
//! An [`ExperimentSpec`] declares one sweep axis (SNR, transmit antennas,
//! sub-array count, RF chains per sub-array, or codebook bits), the fixed
//! system parameters, and the set of schemes to compare. The runner
//! evaluates every sweep point × scheme × trial with common random numbers
//! across schemes inside a trial, and renders raw records plus per-point
//! aggregates as CSV with a fixed column order. Identical spec and seed give
//! byte-identical CSV.
//!
//! Spec files are flat `key = value` text; `#` starts a comment and unknown
//! keys are hard errors so typos cannot silently change an experiment.

use std::collections::BTreeMap;

use crate::arch::{parse_partition_string, partition_string, GsacConfig};
use crate::channel::{generate_channel, ChannelParams, ChannelProfile};
use crate::codebook::{build_codebook, quantize_analog, BeamsteeringCodebook};
use crate::error::{Error, Result};
use crate::metrics::{achievable_rate, total_power, LinkBudget, PowerModel};
use crate::precoder::{aod_dictionary, design_fc_omp, design_sic_hybrid, design_unconstrained};
use crate::rng::derive_stream;

/// Precoding scheme evaluated by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// SIC hybrid design on each configured RF partition.
    GsacSic,
    /// Unconstrained block-diagonal reference on the same partitions.
    GsacOpt,
    /// Beamsteering-codebook quantization of the unconstrained design;
    /// `None` takes the bit depth from a `bits` sweep axis.
    GsacCodebook(Option<u32>),
    /// SIC design on the one-chain-per-sub-array boundary.
    SacSic,
    /// Orthogonal matching pursuit on the fully-connected boundary.
    FcOmp,
    /// SIC design with the RF chains split equally across sub-arrays.
    GsacSicEqualRf,
}

impl Scheme {
    pub fn label(&self) -> String {
        match self {
            Scheme::GsacSic => "gsac-sic".into(),
            Scheme::GsacOpt => "gsac-opt".into(),
            Scheme::GsacCodebook(None) => "gsac-codebook".into(),
            Scheme::GsacCodebook(Some(b)) => format!("gsac-codebook({b})"),
            Scheme::SacSic => "sac-sic".into(),
            Scheme::FcOmp => "fc-omp".into(),
            Scheme::GsacSicEqualRf => "gsac-sic-equal-rf".into(),
        }
    }

    pub fn parse(token: &str) -> Result<Self> {
        let t = token.trim().to_ascii_lowercase();
        match t.as_str() {
            "gsac-sic" => return Ok(Scheme::GsacSic),
            "gsac-opt" => return Ok(Scheme::GsacOpt),
            "gsac-codebook" => return Ok(Scheme::GsacCodebook(None)),
            "sac-sic" => return Ok(Scheme::SacSic),
            "fc-omp" => return Ok(Scheme::FcOmp),
            "gsac-sic-equal-rf" => return Ok(Scheme::GsacSicEqualRf),
            _ => {}
        }
        if let Some(inner) = t
            .strip_prefix("gsac-codebook(")
            .and_then(|s| s.strip_suffix(')'))
        {
            let b: u32 = inner
                .parse()
                .map_err(|_| Error::Parse(format!("scheme `{token}`: bad bit count `{inner}`")))?;
            return Ok(Scheme::GsacCodebook(Some(b)));
        }
        Err(Error::Parse(format!("unknown scheme `{token}`")))
    }
}

/// The swept quantity and its values.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    SnrDb(Vec<f64>),
    NT(Vec<usize>),
    NSub(Vec<usize>),
    NRfPerSub(Vec<usize>),
    Bits(Vec<u32>),
}

impl SweepAxis {
    /// CSV column name of the axis.
    pub fn key(&self) -> &'static str {
        match self {
            SweepAxis::SnrDb(_) => "snr_db",
            SweepAxis::NT(_) => "n_t",
            SweepAxis::NSub(_) => "n_sub",
            SweepAxis::NRfPerSub(_) => "n_rf_i",
            SweepAxis::Bits(_) => "bits",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SweepAxis::SnrDb(v) => v.len(),
            SweepAxis::NT(v) => v.len(),
            SweepAxis::NSub(v) => v.len(),
            SweepAxis::NRfPerSub(v) => v.len(),
            SweepAxis::Bits(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn value_label(&self, idx: usize) -> String {
        match self {
            SweepAxis::SnrDb(v) => format!("{}", v[idx]),
            SweepAxis::NT(v) => format!("{}", v[idx]),
            SweepAxis::NSub(v) => format!("{}", v[idx]),
            SweepAxis::NRfPerSub(v) => format!("{}", v[idx]),
            SweepAxis::Bits(v) => format!("{}", v[idx]),
        }
    }
}

/// Declarative description of one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub id: String,
    pub sweep: SweepAxis,
    /// Transmit antennas (fixed value; ignored when sweeping `n_t`).
    pub n_t: usize,
    pub n_r: usize,
    /// Total RF chains (fixed; derived per point for `n_sub`/`n_rf_i` sweeps).
    pub n_rf: usize,
    /// Sub-array count used by `n_rf_i` sweeps.
    pub n_sub: Option<usize>,
    /// RF chains per sub-array used by `n_sub` sweeps and the equal-RF scheme.
    pub n_rf_i: Option<usize>,
    /// Operating SNR in dB when not sweeping SNR.
    pub snr_db: f64,
    pub profile: ChannelProfile<f64>,
    pub power: PowerModel<f64>,
    pub schemes: Vec<Scheme>,
    /// RF partitions evaluated by the GSAC schemes on non-structural sweeps.
    pub rf_configs: Vec<Vec<usize>>,
    pub trials: usize,
    pub seed: u64,
}

/// One Monte-Carlo result row.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub experiment: String,
    pub scheme: String,
    pub cfg: String,
    pub sweep_value: String,
    pub trial: usize,
    /// Derived per-trial channel seed.
    pub seed: u64,
    pub rate: Option<f64>,
    pub power: f64,
    pub ee: Option<f64>,
    pub error: Option<String>,
}

/// Per (sweep value, scheme, cfg) aggregate.
#[derive(Debug, Clone)]
pub struct AggregateRow {
    pub experiment: String,
    pub scheme: String,
    pub cfg: String,
    pub sweep_value: String,
    pub mean_rate: f64,
    pub std_rate: f64,
    pub power: f64,
    pub mean_ee: f64,
    /// Number of successful trials aggregated.
    pub trials: usize,
}

/// Per-trial outcome of every arm: the derived channel seed and the rate.
type TrialSlot = Option<Vec<(u64, Result<f64>)>>;

/// Everything a finished run produces.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub sweep_key: &'static str,
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<AggregateRow>,
}

/// One (scheme, configuration) pair to evaluate at a given sweep point.
struct Arm {
    scheme: Scheme,
    label: String,
    cfg: GsacConfig,
    codebook: Option<BeamsteeringCodebook<f64>>,
    power: f64,
}

/// System dimensions at one sweep point.
struct Point {
    label: String,
    n_t: usize,
    n_rf: usize,
    snr_db: f64,
    arms: Vec<Arm>,
}

impl ExperimentSpec {
    /// Expand the sweep into per-point dimensions and scheme arms,
    /// validating every configuration on the way.
    fn resolve_points(&self) -> Result<Vec<Point>> {
        if self.sweep.is_empty() {
            return Err(Error::Parse("sweep axis has no values".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Parse("scheme list is empty".into()));
        }
        if self.trials < 1 {
            return Err(Error::Parse("trials must be at least 1".into()));
        }
        let mut points = Vec::with_capacity(self.sweep.len());
        for idx in 0..self.sweep.len() {
            let (n_t, n_rf, snr_db, bits, structural_cfg) = match &self.sweep {
                SweepAxis::SnrDb(v) => (self.n_t, self.n_rf, v[idx], None, None),
                SweepAxis::NT(v) => (v[idx], self.n_rf, self.snr_db, None, None),
                SweepAxis::NSub(v) => {
                    let per = self.n_rf_i.ok_or_else(|| {
                        Error::Parse("`n_sub` sweep requires the `n_rf_i` key".into())
                    })?;
                    let cfg = vec![per; v[idx]];
                    (self.n_t, per * v[idx], self.snr_db, None, Some(cfg))
                }
                SweepAxis::NRfPerSub(v) => {
                    let subs = self.n_sub.ok_or_else(|| {
                        Error::Parse("`n_rf_i` sweep requires the `n_sub` key".into())
                    })?;
                    let cfg = vec![v[idx]; subs];
                    (self.n_t, v[idx] * subs, self.snr_db, None, Some(cfg))
                }
                SweepAxis::Bits(v) => (self.n_t, self.n_rf, self.snr_db, Some(v[idx]), None),
            };

            let gsac_cfgs: Vec<Vec<usize>> = match &structural_cfg {
                Some(cfg) => vec![cfg.clone()],
                None => {
                    if self.rf_configs.is_empty() {
                        return Err(Error::Parse(
                            "rf_configs must list at least one partition for this sweep".into(),
                        ));
                    }
                    for parts in &self.rf_configs {
                        let total: usize = parts.iter().sum();
                        if total != n_rf {
                            return Err(Error::Parse(format!(
                                "rf_config {} sums to {total}, expected n_rf = {n_rf}",
                                partition_string(parts)
                            )));
                        }
                    }
                    self.rf_configs.clone()
                }
            };

            let mut arms = Vec::new();
            for scheme in &self.schemes {
                match scheme {
                    Scheme::GsacSic | Scheme::GsacOpt | Scheme::GsacCodebook(_) => {
                        for parts in &gsac_cfgs {
                            let cfg = GsacConfig::proportional(n_t, parts)?;
                            let arm_bits = match scheme {
                                Scheme::GsacCodebook(fixed) => {
                                    let b = fixed.or(bits).ok_or_else(|| {
                                        Error::Parse(
                                            "gsac-codebook needs explicit bits or a bits sweep"
                                                .into(),
                                        )
                                    })?;
                                    Some(b)
                                }
                                _ => None,
                            };
                            let codebook = match arm_bits {
                                Some(b) => Some(build_codebook(&cfg, b)?),
                                None => None,
                            };
                            arms.push(Arm {
                                scheme: *scheme,
                                label: scheme.label(),
                                power: total_power(&cfg, &self.power),
                                codebook,
                                cfg,
                            });
                        }
                    }
                    Scheme::SacSic => {
                        let cfg = GsacConfig::sub_array_connected(n_t, n_rf)?;
                        arms.push(Arm {
                            scheme: *scheme,
                            label: scheme.label(),
                            power: total_power(&cfg, &self.power),
                            codebook: None,
                            cfg,
                        });
                    }
                    Scheme::FcOmp => {
                        let cfg = GsacConfig::fully_connected(n_t, n_rf)?;
                        arms.push(Arm {
                            scheme: *scheme,
                            label: scheme.label(),
                            power: total_power(&cfg, &self.power),
                            codebook: None,
                            cfg,
                        });
                    }
                    Scheme::GsacSicEqualRf => {
                        let per = self.n_rf_i.ok_or_else(|| {
                            Error::Parse("gsac-sic-equal-rf requires the `n_rf_i` key".into())
                        })?;
                        if n_rf % per != 0 {
                            return Err(Error::Parse(format!(
                                "n_rf = {n_rf} is not a multiple of n_rf_i = {per}"
                            )));
                        }
                        let cfg = GsacConfig::proportional(n_t, &vec![per; n_rf / per])?;
                        arms.push(Arm {
                            scheme: *scheme,
                            label: scheme.label(),
                            power: total_power(&cfg, &self.power),
                            codebook: None,
                            cfg,
                        });
                    }
                }
            }
            points.push(Point {
                label: self.sweep.value_label(idx),
                n_t,
                n_rf,
                snr_db,
                arms,
            });
        }
        Ok(points)
    }

    /// Validate the spec without running it.
    pub fn validate(&self) -> Result<()> {
        self.resolve_points().map(|_| ())
    }
}

/// Evaluate one arm on one channel; returns the achieved rate.
fn run_arm(arm: &Arm, h: &crate::channel::ChannelMatrix<f64>, snr: f64) -> Result<f64> {
    let budget = LinkBudget::new(snr, arm.cfg.n_s());
    let f = match arm.scheme {
        Scheme::GsacSic | Scheme::SacSic | Scheme::GsacSicEqualRf => {
            design_sic_hybrid(h.h(), &arm.cfg, snr)?.f().clone()
        }
        Scheme::GsacOpt => design_unconstrained(h.h(), &arm.cfg, snr)?.f_opt().clone(),
        Scheme::GsacCodebook(_) => {
            let unconstrained = design_unconstrained(h.h(), &arm.cfg, snr)?;
            let codebook = arm.codebook.as_ref().expect("codebook prebuilt");
            quantize_analog(&unconstrained, codebook)?.f().clone()
        }
        Scheme::FcOmp => {
            let dict = aod_dictionary(h);
            design_fc_omp(h.h(), arm.cfg.n_rf_total(), &dict)?
                .f()
                .clone()
        }
    };
    achievable_rate(h.h(), &f, &budget)
}

/// Run the experiment with `workers` threads over the trial axis.
///
/// Records come out ordered by (sweep value, scheme arm, trial index)
/// regardless of scheduling; per-trial channels are derived from
/// `(seed, transmit dimension, trial)` so every scheme inside a trial sees
/// the same realization (checked by hash).
pub fn run_experiment(spec: &ExperimentSpec, workers: usize) -> Result<ExperimentResult> {
    let points = spec.resolve_points()?;
    let workers = workers.max(1);
    let mut records = Vec::new();
    let mut aggregates = Vec::new();

    for point in &points {
        let snr = 10f64.powf(point.snr_db / 10.0);
        // rates[trial][arm]
        let mut rates: Vec<TrialSlot> = (0..spec.trials).map(|_| None).collect();

        let chunk = spec.trials.div_ceil(workers);
        std::thread::scope(|scope| {
            for (w, slot_chunk) in rates.chunks_mut(chunk).enumerate() {
                let point = &point;
                let spec = &spec;
                scope.spawn(move || {
                    for (k, slot) in slot_chunk.iter_mut().enumerate() {
                        let trial = w * chunk + k;
                        // Streams depend on the channel dimension, not the
                        // sweep index: sweeps that leave the channel intact
                        // (SNR, structure, bits) share realizations across
                        // points, which removes Monte-Carlo noise from the
                        // comparison of sweep points.
                        let stream =
                            derive_stream(spec.seed, ((point.n_t as u64) << 32) | trial as u64);
                        let params = ChannelParams::new(spec.profile, point.n_t, spec.n_r, stream);
                        let ch = match generate_channel(&params) {
                            Ok(ch) => ch,
                            Err(e) => {
                                *slot = Some(
                                    point
                                        .arms
                                        .iter()
                                        .map(|_| (stream, Err(clone_error(&e))))
                                        .collect(),
                                );
                                continue;
                            }
                        };
                        let hash = ch.content_hash();
                        let mut per_arm = Vec::with_capacity(point.arms.len());
                        for arm in &point.arms {
                            // Common-random-numbers check: every arm sees the
                            // identical realization.
                            assert_eq!(ch.content_hash(), hash, "channel mutated across arms");
                            per_arm.push((stream, run_arm(arm, &ch, snr)));
                        }
                        *slot = Some(per_arm);
                    }
                });
            }
        });

        for (a, arm) in point.arms.iter().enumerate() {
            let cfg_string = arm.cfg.rf_string();
            let mut ok_rates = Vec::with_capacity(spec.trials);
            for (trial, slot) in rates.iter().enumerate() {
                let per_arm = slot.as_ref().expect("trial slot filled");
                let (stream, outcome) = &per_arm[a];
                let record = match outcome {
                    Ok(rate) => {
                        ok_rates.push(*rate);
                        TrialRecord {
                            experiment: spec.id.clone(),
                            scheme: arm.label.clone(),
                            cfg: cfg_string.clone(),
                            sweep_value: point.label.clone(),
                            trial,
                            seed: *stream,
                            rate: Some(*rate),
                            power: arm.power,
                            ee: Some(*rate / arm.power),
                            error: None,
                        }
                    }
                    Err(e) => TrialRecord {
                        experiment: spec.id.clone(),
                        scheme: arm.label.clone(),
                        cfg: cfg_string.clone(),
                        sweep_value: point.label.clone(),
                        trial,
                        seed: *stream,
                        rate: None,
                        power: arm.power,
                        ee: None,
                        error: Some(e.to_string()),
                    },
                };
                records.push(record);
            }
            let n = ok_rates.len();
            let mean = if n > 0 {
                ok_rates.iter().sum::<f64>() / n as f64
            } else {
                0.0
            };
            let std = if n > 1 {
                (ok_rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            aggregates.push(AggregateRow {
                experiment: spec.id.clone(),
                scheme: arm.label.clone(),
                cfg: cfg_string,
                sweep_value: point.label.clone(),
                mean_rate: mean,
                std_rate: std,
                power: arm.power,
                mean_ee: mean / arm.power,
                trials: n,
            });
        }
        debug_assert_eq!(point.n_rf, point.arms[0].cfg.n_rf_total());
    }
    Ok(ExperimentResult {
        sweep_key: spec.sweep.key(),
        records,
        aggregates,
    })
}

fn clone_error(e: &Error) -> Error {
    Error::Parse(e.to_string())
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

impl ExperimentResult {
    /// Raw per-trial rows.
    pub fn raw_csv(&self) -> String {
        let mut out = format!(
            "experiment,scheme,cfg,{},trial,seed,rate,power_w,ee,error\n",
            self.sweep_key
        );
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.experiment,
                r.scheme,
                csv_quote(&r.cfg),
                r.sweep_value,
                r.trial,
                r.seed,
                r.rate.map(|v| v.to_string()).unwrap_or_default(),
                r.power,
                r.ee.map(|v| v.to_string()).unwrap_or_default(),
                r.error.as_deref().map(csv_quote).unwrap_or_default(),
            ));
        }
        out
    }

    /// Aggregated per-sweep-point rows.
    pub fn aggregate_csv(&self) -> String {
        let mut out = format!(
            "experiment,scheme,cfg,{},mean_rate,std_rate,power_w,mean_ee,trials\n",
            self.sweep_key
        );
        for a in &self.aggregates {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                a.experiment,
                a.scheme,
                csv_quote(&a.cfg),
                a.sweep_value,
                a.mean_rate,
                a.std_rate,
                a.power,
                a.mean_ee,
                a.trials,
            ));
        }
        out
    }
}

// ── Spec-file parsing ───────────────────────────────────────────────────

fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|t| t.trim().to_string())
        .filter(|t| !t.is_empty())
        .collect()
}

/// Split a value holding parenthesized groups, e.g. `(4), (2,2)`.
fn split_partition_list(value: &str) -> Result<Vec<String>> {
    let mut groups = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in value.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                if depth == 0 {
                    return Err(Error::Parse(format!("unbalanced `)` in `{value}`")));
                }
                depth -= 1;
                current.push(ch);
                if depth == 0 {
                    groups.push(current.trim().to_string());
                    current.clear();
                }
            }
            ',' | ' ' | '\t' if depth == 0 => {}
            _ if depth > 0 => current.push(ch),
            _ => {
                return Err(Error::Parse(format!(
                    "unexpected `{ch}` outside parentheses in `{value}`"
                )));
            }
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced `(` in `{value}`")));
    }
    if groups.is_empty() {
        return Err(Error::Parse(format!("no partitions found in `{value}`")));
    }
    Ok(groups)
}

fn parse_scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::Parse(format!("key `{key}`: cannot parse `{value}`")))
}

fn parse_number_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items = split_list(value);
    if items.is_empty() {
        return Err(Error::Parse(format!("key `{key}`: empty list")));
    }
    items.iter().map(|t| parse_scalar(key, t)).collect()
}

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "sweep",
    "snr_db",
    "n_t",
    "n_r",
    "n_rf",
    "n_sub",
    "n_rf_i",
    "bits",
    "n_cl",
    "n_ray",
    "spread_deg",
    "schemes",
    "rf_configs",
    "trials",
    "seed",
    "p_co",
    "p_rf",
    "p_pa",
    "p_ps",
];

/// Parse a flat `key = value` experiment spec.
pub fn parse_spec(text: &str) -> Result<ExperimentSpec> {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::Parse(format!(
                "line {}: unknown key `{key}`",
                lineno + 1
            )));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(Error::Parse(format!(
                "line {}: duplicate key `{key}`",
                lineno + 1
            )));
        }
    }
    let get = |key: &str| -> Result<&String> {
        map.get(key)
            .ok_or_else(|| Error::Parse(format!("missing required key `{key}`")))
    };

    let sweep_name = get("sweep")?.to_ascii_lowercase();
    let sweep = match sweep_name.as_str() {
        "snr_db" => SweepAxis::SnrDb(parse_number_list("snr_db", get("snr_db")?)?),
        "n_t" => SweepAxis::NT(parse_number_list("n_t", get("n_t")?)?),
        "n_sub" => SweepAxis::NSub(parse_number_list("n_sub", get("n_sub")?)?),
        "n_rf_i" => SweepAxis::NRfPerSub(parse_number_list("n_rf_i", get("n_rf_i")?)?),
        "bits" => SweepAxis::Bits(parse_number_list("bits", get("bits")?)?),
        other => {
            return Err(Error::Parse(format!(
                "sweep `{other}` is not one of snr_db, n_t, n_sub, n_rf_i, bits"
            )));
        }
    };

    // Fixed scalars; keys doubling as the sweep axis are consumed above.
    let fixed_usize = |key: &str, required: bool, axis: bool| -> Result<Option<usize>> {
        if axis {
            return Ok(None);
        }
        match map.get(key) {
            Some(v) => Ok(Some(parse_scalar(key, v)?)),
            None if required => Err(Error::Parse(format!("missing required key `{key}`"))),
            None => Ok(None),
        }
    };

    let n_t = match &sweep {
        SweepAxis::NT(v) => v[0],
        _ => fixed_usize("n_t", true, false)?.unwrap(),
    };
    let n_r = fixed_usize("n_r", true, false)?.unwrap();

    let n_sub = fixed_usize("n_sub", false, matches!(sweep, SweepAxis::NSub(_)))?;
    let n_rf_i = fixed_usize("n_rf_i", false, matches!(sweep, SweepAxis::NRfPerSub(_)))?;
    let n_rf = match &sweep {
        SweepAxis::NSub(v) => {
            let per = n_rf_i
                .ok_or_else(|| Error::Parse("`n_sub` sweep requires the `n_rf_i` key".into()))?;
            per * v[0]
        }
        SweepAxis::NRfPerSub(v) => {
            let subs = n_sub
                .ok_or_else(|| Error::Parse("`n_rf_i` sweep requires the `n_sub` key".into()))?;
            subs * v[0]
        }
        _ => fixed_usize("n_rf", true, false)?.unwrap(),
    };

    let snr_db = match &sweep {
        SweepAxis::SnrDb(_) => 0.0,
        _ => match map.get("snr_db") {
            Some(v) => parse_scalar("snr_db", v)?,
            None => 0.0,
        },
    };

    let profile = ChannelProfile {
        n_cl: match map.get("n_cl") {
            Some(v) => parse_scalar("n_cl", v)?,
            None => 10,
        },
        n_ray: match map.get("n_ray") {
            Some(v) => parse_scalar("n_ray", v)?,
            None => 5,
        },
        spread: match map.get("spread_deg") {
            Some(v) => parse_scalar::<f64>("spread_deg", v)?.to_radians(),
            None => 7.5f64.to_radians(),
        },
    };

    let defaults = PowerModel::<f64>::default();
    let power = PowerModel {
        p_co: match map.get("p_co") {
            Some(v) => parse_scalar("p_co", v)?,
            None => defaults.p_co,
        },
        p_rf: match map.get("p_rf") {
            Some(v) => parse_scalar("p_rf", v)?,
            None => defaults.p_rf,
        },
        p_pa: match map.get("p_pa") {
            Some(v) => parse_scalar("p_pa", v)?,
            None => defaults.p_pa,
        },
        p_ps: match map.get("p_ps") {
            Some(v) => parse_scalar("p_ps", v)?,
            None => defaults.p_ps,
        },
    };

    let schemes = split_list(get("schemes")?)
        .iter()
        .map(|t| Scheme::parse(t))
        .collect::<Result<Vec<_>>>()?;
    if schemes.is_empty() {
        return Err(Error::Parse("schemes list is empty".into()));
    }

    let rf_configs = match map.get("rf_configs") {
        Some(v) => split_partition_list(v)?
            .iter()
            .map(|g| parse_partition_string(g))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };

    let spec = ExperimentSpec {
        id: get("experiment")?.clone(),
        sweep,
        n_t,
        n_r,
        n_rf,
        n_sub,
        n_rf_i,
        snr_db,
        profile,
        power,
        schemes,
        rf_configs,
        trials: parse_scalar("trials", get("trials")?)?,
        seed: parse_scalar("seed", get("seed")?)?,
    };
    spec.validate()?;
    Ok(spec)
}
