//! Quantized beamsteering codebooks for limited feedback.
//!
//! Each sub-array gets its own codebook: array-response-shaped codewords at
//! `2^b` uniformly quantized steering angles, built over that sub-array's
//! global antenna indices. Quantizing an unconstrained precoder picks, per
//! analog column, the codeword with maximum correlation magnitude; the
//! digital stage is then refit by least squares. Only `(cfg, b)` need to be
//! fed back to reconstruct the analog stage: `b` bits per analog column.

use crate::arch::GsacConfig;
use crate::error::{Error, Result};
use crate::linalg::{inner, CMat};
use crate::precoder::{assemble_hybrid, HybridPrecoder, UnconstrainedPrecoder};
use crate::scalar::{cis, Scalar, C};

/// Per-sub-array beamsteering codebooks for one GSAC configuration.
#[derive(Debug, Clone)]
pub struct BeamsteeringCodebook<T> {
    bits: u32,
    per_sub: Vec<CMat<T>>,
    antenna_index_sets: Vec<std::ops::Range<usize>>,
    cfg: GsacConfig,
}

impl<T: Scalar> BeamsteeringCodebook<T> {
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Codebook of sub-array `i`: an `N_t,i × 2^b` matrix of codewords.
    pub fn per_sub(&self) -> &[CMat<T>] {
        &self.per_sub
    }

    /// Contiguous global antenna indices feeding each sub-array.
    pub fn antenna_index_sets(&self) -> &[std::ops::Range<usize>] {
        &self.antenna_index_sets
    }

    pub fn cfg(&self) -> &GsacConfig {
        &self.cfg
    }

    /// Feedback cost of one quantized analog precoder: `b` bits for each of
    /// the `N_RF` analog columns.
    pub fn feedback_bits(&self) -> u64 {
        self.bits as u64 * self.cfg.n_rf_total() as u64
    }
}

/// Largest supported quantization depth.
pub const MAX_CODEBOOK_BITS: u32 = 12;

/// Build the per-sub-array beamsteering codebooks for `cfg` with `b`
/// quantization bits.
///
/// Codeword `n` of sub-array `i` has entries
/// `(1/√N_t,i)·e^{jπ·λ·sin θ_n}` over that sub-array's global antenna
/// indices `λ`, with `θ_n = 2πn/2^b`. The prefactor keeps every codeword on
/// the constant-amplitude set the analog stage requires, so quantized
/// precoders satisfy the same per-entry modulus as the SIC designs
/// (correlation-based selection is scale-invariant, so the choice of
/// prefactor never changes which codeword wins).
pub fn build_codebook<T: Scalar>(cfg: &GsacConfig, b: u32) -> Result<BeamsteeringCodebook<T>> {
    if !(1..=MAX_CODEBOOK_BITS).contains(&b) {
        return Err(Error::OutOfRange(format!(
            "quantization bits {b} outside 1..={MAX_CODEBOOK_BITS}"
        )));
    }
    let n_words = 1usize << b;
    let two_pi = T::PI() + T::PI();
    let mut per_sub = Vec::with_capacity(cfg.n_sub());
    let mut antenna_index_sets = Vec::with_capacity(cfg.n_sub());
    for i in 0..cfg.n_sub() {
        let offset = cfg.ant_offset(i);
        let n_ti = cfg.ant_per_sub()[i];
        let inv_sqrt = T::one() / T::from_f64_lit(n_ti as f64).sqrt();
        let mut a = CMat::zeros(n_ti, n_words);
        for n in 0..n_words {
            let theta = two_pi * T::from_f64_lit(n as f64) / T::from_f64_lit(n_words as f64);
            let sin_theta = theta.sin();
            for k in 0..n_ti {
                let lambda = T::from_f64_lit((offset + k) as f64);
                let e = cis(T::PI() * lambda * sin_theta);
                a[(k, n)] = C::new(e.re * inv_sqrt, e.im * inv_sqrt);
            }
        }
        per_sub.push(a);
        antenna_index_sets.push(offset..offset + n_ti);
    }
    Ok(BeamsteeringCodebook {
        bits: b,
        per_sub,
        antenna_index_sets,
        cfg: cfg.clone(),
    })
}

/// Whether codeword `n` is numerically parallel to any codeword already in
/// `sel` (codewords are unit vectors, so parallel means `|⟨·,·⟩| ≈ 1`).
fn parallel_to_any<T: Scalar>(codebook: &CMat<T>, n: usize, sel: &[usize]) -> bool {
    let threshold = T::one() - T::from_f64_lit(1e-9);
    sel.iter()
        .any(|&s| inner(&codebook.col(s), &codebook.col(n)).norm() > threshold)
}

/// Index of the codeword with maximum `|⟨codeword, target⟩|`; ties break to
/// the lowest index.
fn best_codeword<T: Scalar>(codebook: &CMat<T>, target: &[C<T>]) -> usize {
    let mut best = 0usize;
    let mut best_corr = T::neg_infinity();
    for n in 0..codebook.cols() {
        let corr = inner(&codebook.col(n), target).norm_sqr();
        if corr > best_corr {
            best_corr = corr;
            best = n;
        }
    }
    best
}

/// Quantize the analog stage of an unconstrained precoder onto the codebook
/// and refit the digital stage by least squares.
///
/// Sub-arrays quantize independently. Duplicate codeword selections within a
/// block are allowed; only if they make the least-squares system singular do
/// later duplicate columns fall back to their next-best distinct codeword.
pub fn quantize_analog<T: Scalar>(
    f_opt: &UnconstrainedPrecoder<T>,
    codebook: &BeamsteeringCodebook<T>,
) -> Result<HybridPrecoder<T>> {
    let cfg = f_opt.cfg();
    if cfg != codebook.cfg() {
        return Err(Error::ShapeMismatch(format!(
            "codebook built for {} but precoder uses {}",
            codebook.cfg().rf_string(),
            cfg.rf_string()
        )));
    }
    let mut blocks = Vec::with_capacity(cfg.n_sub());
    for (i, v_block) in f_opt.per_block().iter().enumerate() {
        let a_i = &codebook.per_sub()[i];
        let n_rf_i = cfg.rf_per_sub()[i];
        let mut selected: Vec<usize> = (0..n_rf_i)
            .map(|m| best_codeword(a_i, &v_block.col(m)))
            .collect();

        let build = |sel: &[usize]| -> CMat<T> {
            CMat::from_fn(a_i.rows(), sel.len(), |r, c| a_i[(r, sel[c])])
        };
        // The fit must reproduce the projection of the block onto the
        // selected codewords; a near-parallel selection can slip past the LU
        // pivot check yet blow the projection norm bound `‖·‖²_F ≤ N_RF,i`,
        // so both conditions gate the fallback.
        let fit = |f_rf: &CMat<T>| -> Option<CMat<T>> {
            let gram = f_rf.herm_mul(f_rf);
            let bb = gram.solve(&f_rf.herm_mul(v_block))?;
            let power = f_rf.mul(&bb).fro_norm_sqr();
            let cap = T::from_f64_lit(v_block.cols() as f64) + T::from_f64_lit(1e-9);
            if power > cap {
                None
            } else {
                Some(bb)
            }
        };

        let mut f_rf = build(&selected);
        let f_bb = match fit(&f_rf) {
            Some(bb) => bb,
            None => {
                // The uniform angle grid aliases in sin-space, so a codebook
                // can hold (numerically) parallel codewords. Move each later
                // column to its best codeword that is not parallel to an
                // earlier selection.
                for m in 1..n_rf_i {
                    if !parallel_to_any(a_i, selected[m], &selected[..m]) {
                        continue;
                    }
                    let target = v_block.col(m);
                    let mut best: Option<(usize, T)> = None;
                    for n in 0..a_i.cols() {
                        if parallel_to_any(a_i, n, &selected[..m]) {
                            continue;
                        }
                        let corr = inner(&a_i.col(n), &target).norm_sqr();
                        match best {
                            Some((_, c)) if corr <= c => {}
                            _ => best = Some((n, corr)),
                        }
                    }
                    selected[m] = best
                        .ok_or_else(|| {
                            Error::RankDeficientAnalog(format!(
                                "sub-array {i}: fewer than {n_rf_i} non-parallel codewords"
                            ))
                        })?
                        .0;
                }
                f_rf = build(&selected);
                fit(&f_rf).ok_or_else(|| {
                    Error::RankDeficientAnalog(
                        "quantized analog block remains singular after fallback".into(),
                    )
                })?
            }
        };
        blocks.push((f_rf, f_bb));
    }
    Ok(assemble_hybrid(cfg, &blocks))
}
