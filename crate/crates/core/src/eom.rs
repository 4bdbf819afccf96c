//! Electro-optic phase modulation in an RTA crystal and the resulting tone
//! level on the homodyne spectrum.

use crate::error::{invalid, Result};
use crate::homodyne::HomodyneConfig;
use crate::scalar::{Real, PLANCK, SPEED_OF_LIGHT};

/// Literature-typical RTA indices at 1064 nm; not measured values.
pub const RTA_N_Z_1064: f64 = 1.90;
pub const RTA_N_Y_1064: f64 = 1.81;
/// RTA electro-optic coefficients, m/V.
pub const RTA_R33: f64 = 36.7e-12;
pub const RTA_R23: f64 = 15.7e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EomParams<T> {
    pub n_z: T,
    pub n_y: T,
    /// m/V
    pub r33: T,
    /// m/V
    pub r23: T,
    /// m
    pub crystal_length: T,
    /// m
    pub wavelength: T,
    /// Applied field along Z, V/m.
    pub field_e_z: T,
    /// Ω/2π, Hz.
    pub modulation_frequency: T,
}

impl<T: Real> EomParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.n_z > T::one()) {
            return Err(invalid("eom.n_z", "must be > 1"));
        }
        if !(self.n_y > T::one()) {
            return Err(invalid("eom.n_y", "must be > 1"));
        }
        if !(self.r33 > T::zero()) {
            return Err(invalid("eom.r33", "must be > 0"));
        }
        if !(self.r23 > T::zero()) {
            return Err(invalid("eom.r23", "must be > 0"));
        }
        if !(self.crystal_length > T::zero()) {
            return Err(invalid("eom.crystal_length", "must be > 0"));
        }
        if !(self.wavelength > T::zero()) {
            return Err(invalid("eom.wavelength", "must be > 0"));
        }
        if !(self.modulation_frequency >= T::zero()) {
            return Err(invalid("eom.modulation_frequency", "must be >= 0"));
        }
        Ok(())
    }

    /// Phase shift per unit field, rad·m/V. Both index terms are kept
    /// because the LO crosses the crystal once Z- and once Y-polarized.
    fn phase_per_field(&self) -> T {
        let n3 = |n: T| n * n * n;
        (n3(self.n_z) * self.r33 + n3(self.n_y) * self.r23) * self.crystal_length * T::PI() / self.wavelength
    }
}

/// `δθ₀ = (n_Z³ r₃₃ + n_Y³ r₂₃) E_Z · lπ/λ`.
pub fn phase_shift_amplitude<T: Real>(p: &EomParams<T>) -> T {
    p.phase_per_field() * p.field_e_z
}

/// Field that produces a given modulation depth.
pub fn field_for_phase_shift<T: Real>(p: &EomParams<T>, delta_theta0: T) -> T {
    delta_theta0 / p.phase_per_field()
}

/// Photon flux of a beam, photons/s.
pub fn photon_flux<T: Real>(power: T, wavelength: T) -> T {
    power * wavelength / T::lit(PLANCK * SPEED_OF_LIGHT)
}

/// Tone power in one resolution bin relative to the LO shot-noise power in
/// the same bin, dB.
///
/// The modulated fringe `2αβ sin δθ(t)` carries mean-square power
/// `2α²β²δθ₀²`; LO shot noise has one-sided density `2β²` (photon-rate
/// units), so the ratio is `α²δθ₀² / RBW` with α² in photons/s. Squeezing
/// does not enter.
pub fn tone_power_rel_shot<T: Real>(delta_theta0: T, cfg: &HomodyneConfig<T>, rbw: T) -> Result<T> {
    if !(rbw > T::zero()) {
        return Err(invalid("rbw", "must be > 0"));
    }
    cfg.validate()?;
    if delta_theta0.abs() > T::lit(0.1) {
        log::warn!("modulation depth {delta_theta0} rad exceeds 0.1 rad; small-signal tone model is questionable");
    }
    let ratio = photon_flux(cfg.opa_power, cfg.wavelength) * delta_theta0 * delta_theta0 / rbw;
    if ratio == T::zero() {
        return Ok(T::neg_infinity());
    }
    Ok(T::lit(10.0) * ratio.log10())
}

/// Inverse of [`tone_power_rel_shot`].
pub fn delta_theta_for_tone_db<T: Real>(tone_db: T, cfg: &HomodyneConfig<T>, rbw: T) -> Result<T> {
    if !(rbw > T::zero()) {
        return Err(invalid("rbw", "must be > 0"));
    }
    cfg.validate()?;
    let flux = photon_flux(cfg.opa_power, cfg.wavelength);
    if !(flux > T::zero()) {
        return Err(invalid("homodyne.opa_power", "a tone needs a bright signal beam"));
    }
    let ratio = T::lit(10.0).powf(tone_db / T::lit(10.0));
    Ok((ratio * rbw / flux).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToneVisibility {
    /// Below both floors.
    Buried,
    /// Above the squeezed floor only.
    RevealedBySqueezingOnly,
    /// Above both floors.
    VisibleInBoth,
}

/// Classifies a tone level against a coherent and a squeezed noise floor (all dB rel. shot noise).
pub fn classify_tone<T: Real>(tone_db: T, coherent_floor_db: T, squeezed_floor_db: T) -> ToneVisibility {
    if tone_db > coherent_floor_db {
        ToneVisibility::VisibleInBoth
    } else if tone_db > squeezed_floor_db {
        ToneVisibility::RevealedBySqueezingOnly
    } else {
        ToneVisibility::Buried
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn params(e: f64) -> EomParams<f64> {
        EomParams {
            n_z: RTA_N_Z_1064,
            n_y: RTA_N_Y_1064,
            r33: RTA_R33,
            r23: RTA_R23,
            crystal_length: 0.02,
            wavelength: 1.064e-6,
            field_e_z: e,
            modulation_frequency: 4.5e6,
        }
    }

    fn homodyne() -> HomodyneConfig<f64> {
        HomodyneConfig {
            opa_power: 0.16e-3,
            lo_power: 4.2e-3,
            lo_phase_theta: FRAC_PI_2,
            wavelength: 1.064e-6,
        }
    }

    #[test]
    fn zero_field_zero_shift() {
        assert_eq!(phase_shift_amplitude(&params(0.0)), 0.0);
    }

    #[test]
    fn hand_evaluated_shift() {
        // (1.90³·36.7e-12 + 1.81³·15.7e-12)·1000·0.02·π/1.064e-6
        let hand = (6.859 * 36.7e-12 + 5.929741 * 15.7e-12) * 1000.0 * 0.02 * PI / 1.064e-6;
        let got = phase_shift_amplitude(&params(1000.0));
        assert_relative_eq!(got, hand, max_relative = 1e-12);
        assert!((got - 0.0204).abs() < 5e-5, "{got}");
        assert_relative_eq!(phase_shift_amplitude(&params(2000.0)), 2.0 * got, max_relative = 1e-15);
        assert_relative_eq!(field_for_phase_shift(&params(0.0), got), 1000.0, max_relative = 1e-12);
    }

    #[test]
    fn tone_levels() {
        let h = homodyne();
        assert_eq!(tone_power_rel_shot(0.0, &h, 30e3).unwrap(), f64::NEG_INFINITY);
        let a = tone_power_rel_shot(1e-6, &h, 30e3).unwrap();
        let b = tone_power_rel_shot(2e-6, &h, 30e3).unwrap();
        assert!((b - a - 6.0206).abs() < 1e-3);
        assert!(tone_power_rel_shot(1e-6, &h, 0.0).is_err());
    }

    #[test]
    fn tone_inversion_and_classification() {
        // tone 1 dB above a −3.2 dB squeezed floor = 2.2 dB below shot noise
        let h = homodyne();
        let d = delta_theta_for_tone_db(-2.2, &h, 30e3).unwrap();
        let t = tone_power_rel_shot(d, &h, 30e3).unwrap();
        assert!((t + 2.2).abs() < 1e-9);
        assert_eq!(classify_tone(t, 0.0, -3.2), ToneVisibility::RevealedBySqueezingOnly);
        assert_eq!(classify_tone(-4.0, 0.0, -3.2), ToneVisibility::Buried);
        assert_eq!(classify_tone(0.5, 0.0, -3.2), ToneVisibility::VisibleInBoth);
        // minute modulation: a few µrad
        assert!(d > 1e-6 && d < 1e-5, "{d}");
    }

    proptest! {
        #[test]
        fn linear_in_field_and_length(e in 1e-3f64..1e5, l in 1e-4f64..0.1, k in 0.1f64..10.0) {
            let p = EomParams { crystal_length: l, ..params(e) };
            let base = phase_shift_amplitude(&p);
            let scaled_e = phase_shift_amplitude(&EomParams { field_e_z: e * k, ..p });
            let scaled_l = phase_shift_amplitude(&EomParams { crystal_length: l * k, ..p });
            let scaled_w = phase_shift_amplitude(&EomParams { wavelength: p.wavelength * k, ..p });
            prop_assert!((scaled_e / base - k).abs() < 1e-9 * k);
            prop_assert!((scaled_l / base - k).abs() < 1e-9 * k);
            prop_assert!((scaled_w * k / base - 1.0).abs() < 1e-9);
        }
    }
}
