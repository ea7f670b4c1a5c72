//! Achievable rate, transmitter power consumption and energy efficiency.

use crate::arch::GsacConfig;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scalar::Scalar;

/// Per-component power consumption of the transmitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel<T> {
    /// Common/site power (cooling, baseband, synchronization), watts.
    pub p_co: T,
    /// Watts per RF chain.
    pub p_rf: T,
    /// Watts per power amplifier (one per antenna).
    pub p_pa: T,
    /// Watts per phase shifter.
    pub p_ps: T,
}

impl<T: Scalar> Default for PowerModel<T> {
    /// Reference values: 10 W common, 100 mW per RF chain and amplifier,
    /// 10 mW per phase shifter.
    fn default() -> Self {
        PowerModel {
            p_co: T::from_f64_lit(10.0),
            p_rf: T::from_f64_lit(0.1),
            p_pa: T::from_f64_lit(0.1),
            p_ps: T::from_f64_lit(0.01),
        }
    }
}

/// Link-level operating point: linear SNR and stream count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget<T> {
    /// Linear signal-to-noise ratio ρ/σ².
    pub snr: T,
    /// Stream count; equals the total RF chain count of the architecture.
    pub n_s: usize,
}

impl<T: Scalar> LinkBudget<T> {
    pub fn new(snr: T, n_s: usize) -> Self {
        LinkBudget { snr, n_s }
    }

    /// Operating point given in dB.
    pub fn from_snr_db(snr_db: T, n_s: usize) -> Self {
        let ten: T = T::from_f64_lit(10.0);
        LinkBudget {
            snr: ten.powf(snr_db / ten),
            n_s,
        }
    }

    /// The per-stream scaling ρ/(N_s·σ²) applied to the channel Gram matrix.
    pub fn stream_scale(&self) -> T {
        self.snr / T::from_f64_lit(self.n_s as f64)
    }
}

/// Achievable rate `log₂ det(I + (snr/N_s)·H·F·Fᴴ·Hᴴ)` in bits/s/Hz.
///
/// Evaluated through the equivalent `N_s × N_s` form
/// `log₂ det(I + (snr/N_s)·(HF)ᴴ(HF))` and a Cholesky factorization of the
/// identity-plus-PSD matrix, which stays well conditioned at high SNR.
pub fn achievable_rate<T: Scalar>(h: &CMat<T>, f: &CMat<T>, budget: &LinkBudget<T>) -> Result<T> {
    if h.cols() != f.rows() {
        return Err(Error::ShapeMismatch(format!(
            "channel has {} transmit antennas, precoder has {} rows",
            h.cols(),
            f.rows()
        )));
    }
    if !h.is_finite() || !f.is_finite() || !budget.snr.is_finite() {
        return Err(Error::NonFinite("achievable_rate input".into()));
    }
    if budget.snr < T::zero() {
        return Err(Error::OutOfRange("snr must be non-negative".into()));
    }
    let g = h.mul(f);
    let mut m = g.herm_mul(&g).scale_re(budget.stream_scale());
    for i in 0..m.rows() {
        m[(i, i)] = num_complex::Complex::new(m[(i, i)].re + T::one(), T::zero());
    }
    let rate = m
        .hpd_log2_det()
        .ok_or_else(|| Error::NonFinite("rate determinant not positive definite".into()))?;
    Ok(rate.max(T::zero()))
}

/// Total transmitter power `P_CO + N_RF·P_RF + N_t·P_PA + N_PS·P_PS`.
pub fn total_power<T: Scalar>(cfg: &GsacConfig, pm: &PowerModel<T>) -> T {
    pm.p_co
        + pm.p_rf * T::from_f64_lit(cfg.n_rf_total() as f64)
        + pm.p_pa * T::from_f64_lit(cfg.n_t() as f64)
        + pm.p_ps * T::from_f64_lit(cfg.n_ps_total() as f64)
}

/// Energy efficiency `η = rate / power` in bits/s/Hz per watt.
pub fn energy_efficiency<T: Scalar>(rate: T, power: T) -> Result<T> {
    if power <= T::zero() || power.is_nan() {
        return Err(Error::ZeroPower);
    }
    Ok(rate / power)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use crate::scalar::C;

    type M = CMat<f64>;

    fn random_matrix(rng: &mut Rng, rows: usize, cols: usize) -> M {
        M::from_fn(rows, cols, |_, _| rng.next_cn01())
    }

    #[test]
    fn zero_channel_zero_rate() {
        let h = M::zeros(3, 4);
        let f = M::identity(4);
        let r = achievable_rate(&h, &f, &LinkBudget::new(2.0, 4)).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn scalar_link_gives_one_bit() {
        let h = M::identity(1);
        let f = M::identity(1);
        let r = achievable_rate(&h, &f, &LinkBudget::new(1.0, 1)).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rate_matches_eigenvalue_sum_oracle() {
        let mut rng = Rng::new(8);
        for _ in 0..20 {
            let h = random_matrix(&mut rng, 3, 4);
            let f = random_matrix(&mut rng, 4, 2);
            let budget = LinkBudget::new(3.7, 2);
            let rate = achievable_rate(&h, &f, &budget).unwrap();
            // Independent route: eigenvalues of the N_r × N_r outer form.
            let g = h.mul(&f);
            let outer = g.mul(&g.hermitian());
            let (vals, _) = outer.hermitian_eigen().unwrap();
            let oracle: f64 = vals
                .iter()
                .map(|l| (1.0 + budget.stream_scale() * l.max(0.0)).log2())
                .sum();
            assert!(
                (rate - oracle).abs() <= 1e-10 * oracle.max(1.0),
                "{rate} vs {oracle}"
            );
        }
    }

    #[test]
    fn rate_is_monotone_in_snr() {
        let mut rng = Rng::new(13);
        let h = random_matrix(&mut rng, 4, 6);
        let f = random_matrix(&mut rng, 6, 3);
        let mut prev = 0.0;
        for k in 0..14 {
            let snr = 10f64.powf(-3.0 + 0.5 * k as f64);
            let r = achievable_rate(&h, &f, &LinkBudget::new(snr, 3)).unwrap();
            assert!(r >= prev - 1e-12, "snr={snr}");
            prev = r;
        }
    }

    #[test]
    fn rate_invariant_under_unitary_stream_rotation() {
        let mut rng = Rng::new(29);
        let h = random_matrix(&mut rng, 4, 5);
        let f = random_matrix(&mut rng, 5, 3);
        // Unitary factor from the eigenvectors of a random Hermitian matrix.
        let b = random_matrix(&mut rng, 3, 3);
        let (_, u) = b.herm_mul(&b).hermitian_eigen().unwrap();
        let budget = LinkBudget::new(2.0, 3);
        let r1 = achievable_rate(&h, &f, &budget).unwrap();
        let r2 = achievable_rate(&h, &f.mul(&u), &budget).unwrap();
        assert!((r1 - r2).abs() < 1e-10);
    }

    #[test]
    fn rate_rejects_non_finite() {
        let mut h = M::identity(2);
        h[(0, 0)] = C::new(f64::NAN, 0.0);
        assert!(matches!(
            achievable_rate(&h, &M::identity(2), &LinkBudget::new(1.0, 2)),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn hand_computed_reference_powers() {
        let pm = PowerModel::<f64>::default();
        let sac = GsacConfig::sub_array_connected(144, 8).unwrap();
        let fc = GsacConfig::fully_connected(144, 8).unwrap();
        let gsac = GsacConfig::new(144, &[5, 2, 1], &[90, 36, 18]).unwrap();
        assert!((total_power(&sac, &pm) - 26.64).abs() < 1e-12);
        assert!((total_power(&fc, &pm) - 36.72).abs() < 1e-12);
        assert!((total_power(&gsac, &pm) - 30.60).abs() < 1e-12);
    }

    #[test]
    fn efficiency_basics() {
        assert_eq!(energy_efficiency(0.0f64, 26.64).unwrap(), 0.0);
        assert!((energy_efficiency(26.64f64, 26.64).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            energy_efficiency(1.0f64, 0.0),
            Err(Error::ZeroPower)
        ));
        // Same rate, SAC power vs FC power: SAC is more efficient.
        let pm = PowerModel::<f64>::default();
        let sac = total_power(&GsacConfig::sub_array_connected(144, 8).unwrap(), &pm);
        let fc = total_power(&GsacConfig::fully_connected(144, 8).unwrap(), &pm);
        assert!(energy_efficiency(5.0, sac).unwrap() > energy_efficiency(5.0, fc).unwrap());
    }

    #[test]
    fn power_ordering_over_all_partitions_of_eight() {
        let pm = PowerModel::<f64>::default();
        let n_t = 144;
        let sac = total_power(&GsacConfig::sub_array_connected(n_t, 8).unwrap(), &pm);
        let fc = total_power(&GsacConfig::fully_connected(n_t, 8).unwrap(), &pm);
        for parts in crate::arch::enumerate_partitions(8).unwrap().partitions() {
            let cfg = GsacConfig::proportional(n_t, parts).unwrap();
            let p = total_power(&cfg, &pm);
            assert!(sac <= p && p <= fc, "cfg {parts:?} power {p}");
        }
    }

    #[test]
    fn db_conversion() {
        let b = LinkBudget::<f64>::from_snr_db(0.0, 4);
        assert!((b.snr - 1.0).abs() < 1e-15);
        let b = LinkBudget::<f64>::from_snr_db(10.0, 4);
        assert!((b.snr - 10.0).abs() < 1e-12);
        assert!((b.stream_scale() - 2.5).abs() < 1e-12);
    }
}
