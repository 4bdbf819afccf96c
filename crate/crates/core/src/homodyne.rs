//! Balanced homodyne detection of a bright squeezed beam against a strong
//! local oscillator, and the two shot-noise reference corrections.
//!
//! The subtracted photocurrent measures
//! `N₋ ≃ 2αβ cos θ + α δB₋θ + β δA_θ`, so the mean field of the signal beam
//! adds its own shot noise `α²` on top of the squeezed term `β²⟨δA_θ²⟩`.
//! Results are normalized to `β²` (LO shot noise).

use crate::error::{invalid, Error, Result};
use crate::gaussian::QuadratureState;
use crate::scalar::Real;

/// Powers and LO phase; powers stand in for α² and β².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneConfig<T> {
    /// Signal (OPA) beam power, W.
    pub opa_power: T,
    /// Local oscillator power, W.
    pub lo_power: T,
    /// `θ = φ_LO − φ_OPA`, rad.
    pub lo_phase_theta: T,
    /// Optical wavelength, m; converts powers to photon flux.
    pub wavelength: T,
}

impl<T: Real> HomodyneConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.opa_power >= T::zero()) {
            return Err(invalid("homodyne.opa_power", "must be >= 0"));
        }
        if !(self.lo_power > T::zero()) {
            return Err(invalid("homodyne.lo_power", "must be > 0"));
        }
        if !(self.wavelength > T::zero()) {
            return Err(invalid("homodyne.wavelength", "must be > 0"));
        }
        Ok(())
    }

    /// `P_OPA / P_LO = α²/β²`.
    pub fn power_ratio(&self) -> T {
        self.opa_power / self.lo_power
    }
}

/// Mean and variance of the difference photocurrent, in units of β².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneStats<T> {
    pub mean: T,
    pub variance: T,
}

/// Linearized statistics of `N₋` for the given signal and LO states.
///
/// The amplitudes of `opa` and `lo` are taken from `cfg` powers; only their
/// squeezing enters here.
pub fn difference_photocurrent_stats<T: Real>(
    cfg: &HomodyneConfig<T>,
    opa: &QuadratureState<T>,
    lo: &QuadratureState<T>,
) -> Result<HomodyneStats<T>> {
    if cfg.opa_power < T::zero() || cfg.lo_power < T::zero() {
        return Err(invalid("homodyne power", "powers must be non-negative"));
    }
    if !(cfg.lo_power > T::zero()) {
        return Err(invalid("homodyne.lo_power", "must be > 0"));
    }
    let theta = cfg.lo_phase_theta;
    let alpha2 = cfg.opa_power;
    let beta2 = cfg.lo_power;
    let mean = T::lit(2.0) * (alpha2 * beta2).sqrt() * theta.cos();
    let variance = alpha2 * lo.variance_at(-theta) + beta2 * opa.variance_at(theta);
    Ok(HomodyneStats {
        mean: mean / beta2,
        variance: variance / beta2,
    })
}

/// Forward map, OPA beam blocked for the reference: `P_OPA/P_LO + e^{-2r}`.
pub fn blocked_shot_noise_ratio<T: Real>(squeezed_variance: T, power_ratio: T) -> T {
    power_ratio + squeezed_variance
}

/// Infers `e^{-2r}` from a ratio referenced to LO-only shot noise.
pub fn correct_blocked_shot_noise<T: Real>(observed_ratio: T, power_ratio: T) -> Result<T> {
    if !(power_ratio >= T::zero()) {
        return Err(invalid("power_ratio", "must be >= 0"));
    }
    if !(observed_ratio > power_ratio) {
        return Err(Error::NonPhysical(format!(
            "observed ratio {observed_ratio} does not exceed the bright-beam offset {power_ratio}"
        )));
    }
    Ok(observed_ratio - power_ratio)
}

/// Forward map, equal-power coherent beam for the reference:
/// `(α² + β²e^{-2r}) / (α² + β²)`.
pub fn equal_power_shot_noise_ratio<T: Real>(squeezed_variance: T, power_ratio: T) -> T {
    (power_ratio + squeezed_variance) / (power_ratio + T::one())
}

/// Infers `e^{-2r}` from a ratio referenced to an equal-power coherent beam.
pub fn correct_equal_power_shot_noise<T: Real>(observed_ratio: T, power_ratio: T) -> Result<T> {
    if !(power_ratio >= T::zero()) {
        return Err(invalid("power_ratio", "must be >= 0"));
    }
    let e = observed_ratio * (T::one() + power_ratio) - power_ratio;
    if !(e > T::zero()) {
        return Err(Error::NonPhysical(format!(
            "observed ratio {observed_ratio} implies non-positive squeezed variance {e}"
        )));
    }
    Ok(e)
}

/// Which shot-noise reference an observed ratio was taken against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceMode {
    /// OPA beam blocked.
    Blocked,
    /// OPA beam replaced with a coherent beam of the same power.
    EqualPower,
}

pub fn correct_shot_noise<T: Real>(mode: ReferenceMode, observed_ratio: T, power_ratio: T) -> Result<T> {
    match mode {
        ReferenceMode::Blocked => correct_blocked_shot_noise(observed_ratio, power_ratio),
        ReferenceMode::EqualPower => correct_equal_power_shot_noise(observed_ratio, power_ratio),
    }
}

/// Tone-to-floor ratio in dB.
pub fn modulation_snr<T: Real>(tone_power_db_rel_shot: T, noise_floor_db_rel_shot: T) -> T {
    tone_power_db_rel_shot - noise_floor_db_rel_shot
}

/// SNR improvement from lowering the floor; tone power does not depend on squeezing.
pub fn squeezing_gain_db<T: Real>(coherent_floor_db: T, squeezed_floor_db: T) -> T {
    coherent_floor_db - squeezed_floor_db
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{db_to_ratio, ratio_to_db};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn cfg(ratio: f64, theta: f64) -> HomodyneConfig<f64> {
        HomodyneConfig {
            opa_power: ratio * 4.2e-3,
            lo_power: 4.2e-3,
            lo_phase_theta: theta,
            wavelength: 1.064e-6,
        }
    }

    #[test]
    fn quadrature_fringe_null() {
        let opa = QuadratureState::phase_squeezed(0.0, 0.4).unwrap();
        let lo = QuadratureState::coherent(0.0);
        let st = difference_photocurrent_stats(&cfg(0.038, FRAC_PI_2), &opa, &lo).unwrap();
        assert!(st.mean.abs() < 1e-15);
    }

    #[test]
    fn bright_beam_offset_on_squeezed_variance() {
        let r = -(0.3837f64).ln() / 2.0;
        let opa = QuadratureState::phase_squeezed(0.0, r).unwrap();
        let lo = QuadratureState::coherent(0.0);
        let st = difference_photocurrent_stats(&cfg(0.038, FRAC_PI_2), &opa, &lo).unwrap();
        assert_relative_eq!(st.variance, 0.4217, epsilon = 1e-12);
        assert!((ratio_to_db(st.variance).unwrap() + 3.75).abs() < 0.001);
    }

    #[test]
    fn coherent_case_adds_both_shot_noises() {
        let opa = QuadratureState::coherent(0.0);
        let lo = QuadratureState::coherent(0.0);
        for theta in [0.0, 0.3, FRAC_PI_2, 2.0] {
            let st = difference_photocurrent_stats(&cfg(0.038, theta), &opa, &lo).unwrap();
            assert_relative_eq!(st.variance, 1.038, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_negative_power() {
        let s = QuadratureState::coherent(0.0);
        let mut c = cfg(0.038, 0.0);
        c.opa_power = -1.0;
        assert!(difference_photocurrent_stats(&c, &s, &s).is_err());
    }

    #[test]
    fn blocked_correction_examples() {
        let e = correct_blocked_shot_noise(db_to_ratio(-3.75), 0.038).unwrap();
        assert!(f64::abs(ratio_to_db(e).unwrap() + 4.16) < 0.01);
        assert_eq!(correct_blocked_shot_noise(0.7, 0.0).unwrap(), 0.7);
        let fwd = blocked_shot_noise_ratio(1.0, 0.038);
        assert_relative_eq!(fwd, 1.038);
        assert!(f64::abs(ratio_to_db(fwd).unwrap() - 0.16) < 0.005);
        assert!(matches!(
            correct_blocked_shot_noise(0.03, 0.038),
            Err(Error::NonPhysical(_))
        ));
    }

    #[test]
    fn equal_power_correction_examples() {
        let e = correct_equal_power_shot_noise(0.5012, 0.038).unwrap();
        assert!(f64::abs(e - 0.4823) < 1e-4, "{e}");
        assert!(f64::abs(ratio_to_db(e).unwrap() + 3.17) < 0.005);
        assert_eq!(correct_equal_power_shot_noise(0.6, 0.0).unwrap(), 0.6);
        for p in [0.0, 0.038, 1.0, 10.0] {
            assert_relative_eq!(equal_power_shot_noise_ratio(1.0, p), 1.0, epsilon = 1e-15);
        }
        assert!(correct_equal_power_shot_noise(0.01, 0.038).is_err());
    }

    #[test]
    fn snr_examples() {
        assert_relative_eq!(squeezing_gain_db(0.0, -3.2), 3.2);
        assert_relative_eq!(modulation_snr(-2.0, 0.0), -2.0);
        assert_relative_eq!(modulation_snr(-2.0, -3.2), 1.2, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn corrections_invert_forward_maps(e in 1e-3f64..10.0, p in 0.0f64..5.0) {
            let b = correct_blocked_shot_noise(blocked_shot_noise_ratio(e, p), p).unwrap();
            prop_assert!(((b - e) / e).abs() < 1e-12 * (1.0 + p / e));
            let q = correct_equal_power_shot_noise(equal_power_shot_noise_ratio(e, p), p).unwrap();
            prop_assert!(((q - e) / e).abs() < 1e-12 * (1.0 + p / e));
        }

        #[test]
        fn correction_ordering(obs in 0.05f64..3.0, p in 0.0f64..0.04) {
            prop_assume!(obs > p);
            let b = correct_blocked_shot_noise(obs, p).unwrap();
            prop_assert!(b <= obs);
            if let Ok(q) = correct_equal_power_shot_noise(obs, p) {
                if p > 0.0 && obs != 1.0 {
                    prop_assert_eq!(q < obs, obs < 1.0);
                }
            }
        }

        #[test]
        fn corrections_converge_at_zero_ratio(obs in 0.01f64..3.0) {
            let p = 1e-12;
            let b = correct_blocked_shot_noise(obs, p).unwrap();
            let q = correct_equal_power_shot_noise(obs, p).unwrap();
            prop_assert!((b - obs).abs() < 1e-11);
            prop_assert!((q - obs).abs() < 1e-11);
        }

        #[test]
        fn coherent_signal_is_blocked_plus_alpha2(ratio in 0.0f64..1.0) {
            let lo = QuadratureState::coherent(0.0);
            let coh = QuadratureState::coherent(0.0);
            let with_beam = difference_photocurrent_stats(&cfg(ratio, FRAC_PI_2), &coh, &lo).unwrap();
            let blocked = difference_photocurrent_stats(&cfg(0.0, FRAC_PI_2), &coh, &lo).unwrap();
            prop_assert!((with_beam.variance - (blocked.variance + ratio)).abs() < 1e-12);
        }
    }
}
