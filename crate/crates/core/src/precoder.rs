//! Precoder construction for the GSAC architecture.
//!
//! Three design paths share the same successive per-sub-array recursion:
//!
//! - [`design_unconstrained`]: the optimal block-diagonal reference. Each
//!   sub-array takes the top eigenvectors of its interference-whitened
//!   channel Gram block, then the interference matrix is updated with the
//!   block just designed.
//! - [`design_sic_hybrid`]: the practical hybrid design. Each unconstrained
//!   block is projected onto the constant-amplitude analog set by phase
//!   extraction (vector form for single-chain sub-arrays, matrix form plus a
//!   least-squares digital stage otherwise) before the interference update.
//! - [`design_fc_omp`]: the fully-connected orthogonal-matching-pursuit
//!   baseline, which greedily picks dictionary atoms to approximate the
//!   unconstrained precoder.
//!
//! The rate of any block-diagonal precoder decomposes exactly into per-sub-
//! array sub-rates; [`subrate_decomposition`] recomputes that split and is
//! the main correctness oracle for the recursion.

use crate::arch::GsacConfig;
use crate::channel::{ula_response, ChannelMatrix};
use crate::error::{Error, Result};
use crate::linalg::{vec_norm1, CMat};
use crate::scalar::{Scalar, C};

/// Relative residual above which a linear solve against the interference
/// matrix is declared numerically singular.
const SOLVE_RESIDUAL_TOL: f64 = 1e-6;

/// Optimal unconstrained block-diagonal precoder.
#[derive(Debug, Clone)]
pub struct UnconstrainedPrecoder<T> {
    per_block: Vec<CMat<T>>,
    f_opt: CMat<T>,
    cfg: GsacConfig,
}

impl<T: Scalar> UnconstrainedPrecoder<T> {
    /// Assemble from explicit per-sub-array blocks (columns are expected to
    /// be orthonormal; shapes are validated against the configuration).
    pub fn from_blocks(cfg: &GsacConfig, per_block: Vec<CMat<T>>) -> Result<Self> {
        if per_block.len() != cfg.n_sub() {
            return Err(Error::ShapeMismatch(format!(
                "{} blocks supplied for {} sub-arrays",
                per_block.len(),
                cfg.n_sub()
            )));
        }
        let mut f_opt = CMat::zeros(cfg.n_t(), cfg.n_rf_total());
        for (i, block) in per_block.iter().enumerate() {
            if block.rows() != cfg.ant_per_sub()[i] || block.cols() != cfg.rf_per_sub()[i] {
                return Err(Error::ShapeMismatch(format!(
                    "block {i} is {}x{}, configuration expects {}x{}",
                    block.rows(),
                    block.cols(),
                    cfg.ant_per_sub()[i],
                    cfg.rf_per_sub()[i]
                )));
            }
            f_opt.set_block(cfg.ant_offset(i), cfg.rf_offset(i), block);
        }
        Ok(UnconstrainedPrecoder {
            per_block,
            f_opt,
            cfg: cfg.clone(),
        })
    }

    /// Per-sub-array blocks of orthonormal columns.
    pub fn per_block(&self) -> &[CMat<T>] {
        &self.per_block
    }

    /// Full `N_t × N_RF` block-diagonal assembly.
    pub fn f_opt(&self) -> &CMat<T> {
        &self.f_opt
    }

    pub fn cfg(&self) -> &GsacConfig {
        &self.cfg
    }
}

/// Hybrid precoder: constant-amplitude analog stage times block digital stage.
#[derive(Debug, Clone)]
pub struct HybridPrecoder<T> {
    f_rf: CMat<T>,
    f_bb: CMat<T>,
    f: CMat<T>,
    cfg: GsacConfig,
}

/// Place per-sub-array analog/digital block pairs on the block diagonals,
/// form the composite precoder, and scale the digital stage so the full
/// transmit power budget `‖F_RF·F_BB‖²_F = N_s` is used exactly.
///
/// The per-block extraction formulas alone leave `‖F‖²_F` strictly below the
/// budget; under the equal-power-allocation assumption the transmitter spends
/// the whole budget, and every scheme is compared at the same radiated power.
pub(crate) fn assemble_hybrid<T: Scalar>(
    cfg: &GsacConfig,
    blocks: &[(CMat<T>, CMat<T>)],
) -> HybridPrecoder<T> {
    let n_t = cfg.n_t();
    let n_rf = cfg.n_rf_total();
    let mut f_rf = CMat::zeros(n_t, n_rf);
    let mut f_bb = CMat::zeros(n_rf, cfg.n_s());
    for (i, (rf_i, bb_i)) in blocks.iter().enumerate() {
        f_rf.set_block(cfg.ant_offset(i), cfg.rf_offset(i), rf_i);
        f_bb.set_block(cfg.rf_offset(i), cfg.rf_offset(i), bb_i);
    }
    let mut f = f_rf.mul(&f_bb);
    let power = f.fro_norm_sqr();
    if power > T::zero() {
        let gain = (T::from_f64_lit(cfg.n_s() as f64) / power).sqrt();
        f_bb = f_bb.scale_re(gain);
        f = f.scale_re(gain);
    }
    HybridPrecoder {
        f_rf,
        f_bb,
        f,
        cfg: cfg.clone(),
    }
}

impl<T: Scalar> HybridPrecoder<T> {
    /// `N_t × N_RF` analog matrix.
    pub fn f_rf(&self) -> &CMat<T> {
        &self.f_rf
    }

    /// `N_RF × N_s` digital matrix.
    pub fn f_bb(&self) -> &CMat<T> {
        &self.f_bb
    }

    /// The composite precoder `F = F_RF·F_BB`.
    pub fn f(&self) -> &CMat<T> {
        &self.f
    }

    pub fn cfg(&self) -> &GsacConfig {
        &self.cfg
    }

    /// Verify the structural invariants: block-diagonal zero patterns, the
    /// per-block constant-amplitude constraint `|entry| = 1/√N_t,i` within
    /// `amp_tol`, and total power `‖F‖²_F ≤ N_s + power_tol`.
    pub fn check_invariants(&self, amp_tol: T, power_tol: T) -> Result<()> {
        let cfg = &self.cfg;
        for r in 0..self.f_rf.rows() {
            for c in 0..self.f_rf.cols() {
                let inside = (0..cfg.n_sub()).any(|i| {
                    let (a, b) = (cfg.ant_offset(i), cfg.rf_offset(i));
                    r >= a && r < a + cfg.ant_per_sub()[i] && c >= b && c < b + cfg.rf_per_sub()[i]
                });
                let z = self.f_rf[(r, c)];
                if inside {
                    let i = (0..cfg.n_sub())
                        .find(|&i| {
                            r >= cfg.ant_offset(i) && r < cfg.ant_offset(i) + cfg.ant_per_sub()[i]
                        })
                        .unwrap();
                    let want = T::one() / T::from_f64_lit(cfg.ant_per_sub()[i] as f64).sqrt();
                    if (z.norm() - want).abs() > amp_tol {
                        return Err(Error::ConstraintViolation(format!(
                            "analog entry ({r},{c}) modulus {} differs from 1/sqrt(N_t,{i})",
                            z.norm()
                        )));
                    }
                } else if z.norm_sqr() != T::zero() {
                    return Err(Error::ConstraintViolation(format!(
                        "analog entry ({r},{c}) outside the block pattern is nonzero"
                    )));
                }
            }
        }
        for r in 0..self.f_bb.rows() {
            for c in 0..self.f_bb.cols() {
                let inside = (0..cfg.n_sub()).any(|i| {
                    let b = cfg.rf_offset(i);
                    r >= b && r < b + cfg.rf_per_sub()[i] && c >= b && c < b + cfg.rf_per_sub()[i]
                });
                if !inside && self.f_bb[(r, c)].norm_sqr() != T::zero() {
                    return Err(Error::ConstraintViolation(format!(
                        "digital entry ({r},{c}) outside the block pattern is nonzero"
                    )));
                }
            }
        }
        let power = self.f.fro_norm_sqr();
        let cap = T::from_f64_lit(cfg.n_s() as f64) + power_tol;
        if power > cap {
            return Err(Error::ConstraintViolation(format!(
                "precoder power {power} exceeds N_s = {}",
                cfg.n_s()
            )));
        }
        Ok(())
    }
}

/// Orthonormal eigenvectors for the `k` largest eigenvalues of a Hermitian
/// PSD matrix, eigenvalues in non-increasing order.
///
/// The input is symmetrized defensively. Each returned column is rotated so
/// its largest-magnitude entry is real non-negative (ties to the lowest
/// index), which makes the otherwise free eigenvector phases deterministic.
pub fn hermitian_top_eigvecs<T: Scalar>(p: &CMat<T>, k: usize) -> Result<CMat<T>> {
    if p.rows() != p.cols() {
        return Err(Error::ShapeMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    if k < 1 || k > p.rows() {
        return Err(Error::OutOfRange(format!(
            "requested {k} eigenvectors from a {} x {} matrix",
            p.rows(),
            p.rows()
        )));
    }
    if !p.is_finite() {
        return Err(Error::DecompositionFailure(
            "non-finite matrix entries".into(),
        ));
    }
    let (_, vecs) = p
        .hermitian_eigen()
        .ok_or_else(|| Error::DecompositionFailure("Jacobi sweep did not converge".into()))?;
    Ok(vecs.block(0, 0, p.rows(), k))
}

/// Project a unit vector onto the constant-amplitude set: the analog vector
/// keeps only entry phases at modulus `1/√n`, the real digital gain is
/// `‖v‖₁/√n`. Zero entries take phase 0. The product `a·d` never exceeds
/// unit norm.
pub fn phase_extract_vector<T: Scalar>(v: &[C<T>]) -> (Vec<C<T>>, T) {
    let n = v.len();
    let inv_sqrt = T::one() / T::from_f64_lit(n as f64).sqrt();
    let a: Vec<C<T>> = v
        .iter()
        .map(|z| {
            let m = z.norm();
            if m == T::zero() {
                C::new(inv_sqrt, T::zero())
            } else {
                C::new(z.re / m * inv_sqrt, z.im / m * inv_sqrt)
            }
        })
        .collect();
    let d = vec_norm1(v) * inv_sqrt;
    (a, d)
}

/// Matrix form of phase extraction: the analog block keeps entry phases at
/// modulus `1/√n`, the digital block is the least-squares fit
/// `(F_RFᴴF_RF)⁻¹F_RFᴴV`, making the product the orthogonal projection of
/// `V` onto the analog column space.
pub fn phase_extract_matrix<T: Scalar>(v_block: &CMat<T>) -> Result<(CMat<T>, CMat<T>)> {
    let n = v_block.rows();
    let inv_sqrt = T::one() / T::from_f64_lit(n as f64).sqrt();
    let f_rf = CMat::from_fn(n, v_block.cols(), |i, j| {
        let z = v_block[(i, j)];
        let m = z.norm();
        if m == T::zero() {
            C::new(inv_sqrt, T::zero())
        } else {
            C::new(z.re / m * inv_sqrt, z.im / m * inv_sqrt)
        }
    });
    let gram = f_rf.herm_mul(&f_rf);
    let rhs = f_rf.herm_mul(v_block);
    let f_bb = gram.solve(&rhs).ok_or_else(|| {
        Error::RankDeficientAnalog("analog Gram matrix is numerically singular".into())
    })?;
    Ok((f_rf, f_bb))
}

/// One step of the shared successive recursion: solve the interference
/// system for this sub-array's channel columns and return the whitened Gram
/// block `P̃ = H_iᴴ·C⁻¹·H_i`.
fn whitened_gram_block<T: Scalar>(
    c: &CMat<T>,
    h: &CMat<T>,
    offset: usize,
    width: usize,
) -> Result<CMat<T>> {
    let h_sub = h.block(0, offset, h.rows(), width);
    let x = c
        .solve(&h_sub)
        .ok_or_else(|| Error::SingularUpdate("interference matrix solve failed".into()))?;
    let rhs_norm = h_sub.fro_norm();
    if rhs_norm > T::zero() {
        let resid = c.mul(&x).sub(&h_sub).fro_norm() / rhs_norm;
        if resid > T::from_f64_lit(SOLVE_RESIDUAL_TOL) {
            return Err(Error::SingularUpdate(format!(
                "interference solve residual {resid} exceeds {SOLVE_RESIDUAL_TOL}"
            )));
        }
    }
    Ok(h_sub.herm_mul(&x))
}

fn check_design_inputs<T: Scalar>(h: &CMat<T>, cfg: &GsacConfig, snr: T) -> Result<()> {
    if h.cols() != cfg.n_t() {
        return Err(Error::ShapeMismatch(format!(
            "channel has {} transmit antennas, configuration expects {}",
            h.cols(),
            cfg.n_t()
        )));
    }
    if !h.is_finite() || !snr.is_finite() || snr < T::zero() {
        return Err(Error::NonFinite("design input".into()));
    }
    Ok(())
}

/// Design the optimal unconstrained block-diagonal precoder by successive
/// per-sub-array eigenbeamforming with interference updates.
pub fn design_unconstrained<T: Scalar>(
    h: &CMat<T>,
    cfg: &GsacConfig,
    snr: T,
) -> Result<UnconstrainedPrecoder<T>> {
    check_design_inputs(h, cfg, snr)?;
    let n_r = h.rows();
    let scale = snr / T::from_f64_lit(cfg.n_s() as f64);
    let mut c = CMat::<T>::identity(n_r);
    let mut per_block = Vec::with_capacity(cfg.n_sub());
    let mut f_opt = CMat::zeros(cfg.n_t(), cfg.n_rf_total());
    for i in 0..cfg.n_sub() {
        let offset = cfg.ant_offset(i);
        let width = cfg.ant_per_sub()[i];
        let p_tilde = whitened_gram_block(&c, h, offset, width)?;
        let block = hermitian_top_eigvecs(&p_tilde, cfg.rf_per_sub()[i])?;
        let g = h.block(0, offset, n_r, width).mul(&block);
        c.rank_update(scale, &g);
        f_opt.set_block(offset, cfg.rf_offset(i), &block);
        per_block.push(block);
    }
    Ok(UnconstrainedPrecoder {
        per_block,
        f_opt,
        cfg: cfg.clone(),
    })
}

/// Design the practical SIC hybrid precoder: per sub-array, take the top
/// eigenvectors of the whitened Gram block, phase-extract them onto the
/// constant-amplitude set, then fold the realized block into the
/// interference matrix before moving to the next sub-array. The recursion
/// runs on the raw extracted blocks; assembly scales the digital stage to
/// the exact power budget.
pub fn design_sic_hybrid<T: Scalar>(
    h: &CMat<T>,
    cfg: &GsacConfig,
    snr: T,
) -> Result<HybridPrecoder<T>> {
    check_design_inputs(h, cfg, snr)?;
    let n_r = h.rows();
    let scale = snr / T::from_f64_lit(cfg.n_s() as f64);
    let mut c = CMat::<T>::identity(n_r);
    let mut blocks = Vec::with_capacity(cfg.n_sub());
    for i in 0..cfg.n_sub() {
        let offset = cfg.ant_offset(i);
        let width = cfg.ant_per_sub()[i];
        let n_rf_i = cfg.rf_per_sub()[i];
        let p_tilde = whitened_gram_block(&c, h, offset, width)?;
        let vecs = hermitian_top_eigvecs(&p_tilde, n_rf_i)?;
        let (rf_i, bb_i) = if n_rf_i == 1 {
            let (a, d) = phase_extract_vector(&vecs.col(0));
            let mut bb = CMat::zeros(1, 1);
            bb[(0, 0)] = C::new(d, T::zero());
            (CMat::col_vec(&a), bb)
        } else {
            phase_extract_matrix(&vecs)?
        };
        let f_tilde = rf_i.mul(&bb_i);
        let g = h.block(0, offset, n_r, width).mul(&f_tilde);
        c.rank_update(scale, &g);
        blocks.push((rf_i, bb_i));
    }
    Ok(assemble_hybrid(cfg, &blocks))
}

/// Per-sub-array sub-rates of a block-diagonal precoder.
///
/// Recomputes the successive interference recursion with the precoder's own
/// blocks; the sum of the returned terms equals the direct log-det rate of
/// the assembled precoder, which is the identity the SIC design exploits.
pub fn subrate_decomposition<T: Scalar>(
    h: &CMat<T>,
    cfg: &GsacConfig,
    f: &CMat<T>,
    snr: T,
) -> Result<Vec<T>> {
    check_design_inputs(h, cfg, snr)?;
    if f.rows() != cfg.n_t() || f.cols() != cfg.n_s() {
        return Err(Error::ShapeMismatch(format!(
            "precoder is {}x{}, configuration expects {}x{}",
            f.rows(),
            f.cols(),
            cfg.n_t(),
            cfg.n_s()
        )));
    }
    let n_r = h.rows();
    let scale = snr / T::from_f64_lit(cfg.n_s() as f64);
    let mut c = CMat::<T>::identity(n_r);
    let mut subrates = Vec::with_capacity(cfg.n_sub());
    for i in 0..cfg.n_sub() {
        let offset = cfg.ant_offset(i);
        let width = cfg.ant_per_sub()[i];
        let n_rf_i = cfg.rf_per_sub()[i];
        let f_tilde = f.block(offset, cfg.rf_offset(i), width, n_rf_i);
        let p_tilde = whitened_gram_block(&c, h, offset, width)?;
        let mut m = f_tilde
            .herm_mul(&p_tilde.mul(&f_tilde))
            .hermitian_part()
            .scale_re(scale);
        for k in 0..n_rf_i {
            m[(k, k)] = C::new(m[(k, k)].re + T::one(), T::zero());
        }
        let r_i = m
            .hpd_log2_det()
            .ok_or_else(|| Error::NonFinite("sub-rate determinant not positive".into()))?;
        subrates.push(r_i);
        let g = h.block(0, offset, n_r, width).mul(&f_tilde);
        c.rank_update(scale, &g);
    }
    Ok(subrates)
}

/// Dictionary of transmit array responses at the channel's true departure
/// angles, the default for the OMP baseline.
pub fn aod_dictionary<T: Scalar>(ch: &ChannelMatrix<T>) -> CMat<T> {
    let n_t = ch.n_t();
    let mut dict = CMat::zeros(n_t, ch.aod().len());
    for (j, &theta) in ch.aod().iter().enumerate() {
        let a = ula_response(n_t, theta);
        for i in 0..n_t {
            dict[(i, j)] = a[i];
        }
    }
    dict
}

/// Dictionary of transmit array responses on a uniform grid in sin-space,
/// for channels whose true angles are unknown.
pub fn grid_dictionary<T: Scalar>(n_t: usize, n_atoms: usize) -> CMat<T> {
    let mut dict = CMat::zeros(n_t, n_atoms);
    for j in 0..n_atoms {
        let sin_theta = -T::one()
            + T::from_f64_lit(2.0) * T::from_f64_lit(j as f64) / T::from_f64_lit(n_atoms as f64);
        let theta = sin_theta.asin();
        let a = ula_response(n_t, theta);
        for i in 0..n_t {
            dict[(i, j)] = a[i];
        }
    }
    dict
}

/// Fully-connected OMP baseline: greedily select `n_rf` dictionary atoms by
/// residual correlation against the unconstrained precoder, fit the digital
/// stage by least squares, and renormalize so `‖F_RF·F_BB‖²_F = N_s`.
pub fn design_fc_omp<T: Scalar>(
    h: &CMat<T>,
    n_rf: usize,
    dictionary: &CMat<T>,
) -> Result<HybridPrecoder<T>> {
    let n_t = h.cols();
    let cfg = GsacConfig::fully_connected(n_t, n_rf)?;
    check_design_inputs(h, &cfg, T::zero())?;
    if dictionary.rows() != n_t {
        return Err(Error::ShapeMismatch(format!(
            "dictionary atoms have {} entries, channel has {} transmit antennas",
            dictionary.rows(),
            n_t
        )));
    }
    let n_atoms = dictionary.cols();
    if n_atoms < n_rf {
        return Err(Error::DictionaryTooSmall {
            atoms: n_atoms,
            needed: n_rf,
        });
    }

    let f_opt = hermitian_top_eigvecs(&h.herm_mul(h), n_rf)?;
    let mut selected: Vec<usize> = Vec::with_capacity(n_rf);
    let mut residual = f_opt.clone();
    let mut f_bb = CMat::zeros(0, 0);
    let mut f_rf = CMat::zeros(n_t, 0);
    for _ in 0..n_rf {
        // Correlate every unselected atom with the residual.
        let psi = dictionary.herm_mul(&residual);
        let mut best: Option<(usize, T)> = None;
        for k in 0..n_atoms {
            if selected.contains(&k) {
                continue;
            }
            let energy = (0..psi.cols()).fold(T::zero(), |acc, j| acc + psi[(k, j)].norm_sqr());
            match best {
                Some((_, e)) if energy <= e => {}
                _ => best = Some((k, energy)),
            }
        }
        let (k, _) = best.expect("dictionary has enough atoms");
        selected.push(k);

        f_rf = CMat::from_fn(n_t, selected.len(), |i, j| dictionary[(i, selected[j])]);
        let gram = f_rf.herm_mul(&f_rf);
        let rhs = f_rf.herm_mul(&f_opt);
        f_bb = gram.solve(&rhs).ok_or_else(|| {
            Error::RankDeficientAnalog("selected atoms are numerically dependent".into())
        })?;
        let approx = f_rf.mul(&f_bb);
        residual = f_opt.sub(&approx);
        let norm = residual.fro_norm();
        if norm > T::epsilon() {
            residual = residual.scale_re(T::one() / norm);
        }
    }
    // Assembly renormalizes to the exact transmit power budget.
    Ok(assemble_hybrid(&cfg, &[(f_rf, f_bb)]))
}

/// Render a hybrid precoder in the interchange format: a `# cfg=(…)` header
/// and one CSV block per stage with re,im interleaved row-major.
pub fn precoder_to_csv(p: &HybridPrecoder<f64>) -> String {
    fn matrix_rows(m: &CMat<f64>, out: &mut String) {
        for r in 0..m.rows() {
            let mut fields = Vec::with_capacity(2 * m.cols());
            for c in 0..m.cols() {
                fields.push(format!("{}", m[(r, c)].re));
                fields.push(format!("{}", m[(r, c)].im));
            }
            out.push_str(&fields.join(","));
            out.push('\n');
        }
    }
    let mut out = String::new();
    out.push_str(&format!("# cfg={}\n", p.cfg().rf_string()));
    out.push_str(&format!(
        "# f_rf rows={} cols={}\n",
        p.f_rf().rows(),
        p.f_rf().cols()
    ));
    matrix_rows(p.f_rf(), &mut out);
    out.push_str(&format!(
        "# f_bb rows={} cols={}\n",
        p.f_bb().rows(),
        p.f_bb().cols()
    ));
    matrix_rows(p.f_bb(), &mut out);
    out
}
