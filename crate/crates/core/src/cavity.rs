//! Linear OPA resonator: mode spacing, finesse, linewidth, escape efficiency
//! and oscillation threshold.

use crate::error::{invalid, Error, Result};
use crate::scalar::{Real, SPEED_OF_LIGHT};

/// Default KTP refractive index at 1064 nm (z-polarized). Literature value, not measured here.
pub const KTP_INDEX_1064: f64 = 1.830;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams<T> {
    /// Mirror separation, m.
    pub geometric_length: T,
    /// Nonlinear crystal length, m.
    pub crystal_length: T,
    pub crystal_index: T,
    /// Output coupler reflectivity at the signal wavelength.
    pub mirror_r1: T,
    /// Input mirror reflectivity at the signal wavelength.
    pub mirror_r2: T,
    /// Round-trip fractional power loss excluding the mirrors.
    pub intracavity_loss: T,
    /// Single-pass second-harmonic conversion efficiency, W⁻¹.
    pub shg_efficiency: T,
}

impl<T: Real> CavityParams<T> {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: T| v > T::zero() && v.is_finite();
        if !pos(self.geometric_length) {
            return Err(invalid("cavity.geometric_length", "must be > 0"));
        }
        if !(self.crystal_length >= T::zero()) || self.crystal_length > self.geometric_length {
            return Err(invalid(
                "cavity.crystal_length",
                "must be >= 0 and no longer than the cavity",
            ));
        }
        if !(self.crystal_index >= T::one()) {
            return Err(invalid("cavity.crystal_index", "must be >= 1"));
        }
        let unit_open = |v: T| v > T::zero() && v < T::one();
        if !unit_open(self.mirror_r1) {
            return Err(invalid("cavity.mirror_r1", "must be in (0, 1)"));
        }
        if !unit_open(self.mirror_r2) {
            return Err(invalid("cavity.mirror_r2", "must be in (0, 1)"));
        }
        if !(self.intracavity_loss >= T::zero() && self.intracavity_loss < T::one()) {
            return Err(invalid("cavity.intracavity_loss", "must be in [0, 1)"));
        }
        if !pos(self.shg_efficiency) {
            return Err(invalid("cavity.shg_efficiency", "must be > 0"));
        }
        Ok(())
    }

    /// Optical path length of one pass: air gap plus index-weighted crystal.
    pub fn optical_length(&self) -> T {
        (self.geometric_length - self.crystal_length) + self.crystal_index * self.crystal_length
    }

    /// Output coupler transmission `1 − R₁`.
    pub fn output_coupling(&self) -> T {
        T::one() - self.mirror_r1
    }
}

/// `c / (2·L_opt)` for a linear (standing-wave) cavity.
pub fn free_spectral_range<T: Real>(c: &CavityParams<T>) -> T {
    T::lit(SPEED_OF_LIGHT) / (T::lit(2.0) * c.optical_length())
}

/// Mirror-limited finesse `π(R₁R₂)^{1/4} / [1 − (R₁R₂)^{1/2}]`.
pub fn finesse<T: Real>(c: &CavityParams<T>) -> Result<T> {
    finesse_from_reflectivities(c.mirror_r1, c.mirror_r2)
}

pub fn finesse_from_reflectivities<T: Real>(r1: T, r2: T) -> Result<T> {
    let product = r1 * r2;
    if !(product > T::zero()) {
        return Err(invalid("mirror reflectivity", "R1·R2 must be > 0"));
    }
    let root = product.sqrt();
    if root >= T::one() {
        return Err(Error::NonPhysical("R1·R2 = 1 gives an infinite finesse".into()));
    }
    Ok(T::PI() * root.sqrt() / (T::one() - root))
}

/// Linewidth (full width at half maximum) `FSR / F`.
pub fn fwhm<T: Real>(c: &CavityParams<T>) -> Result<T> {
    Ok(fwhm_from(free_spectral_range(c), finesse(c)?))
}

pub fn fwhm_from<T: Real>(fsr: T, finesse: T) -> T {
    fsr / finesse
}

/// Degenerate-OPO threshold `(T₁ + L)² / (4·E_NL)`, W.
pub fn threshold_power<T: Real>(c: &CavityParams<T>) -> T {
    let total = c.output_coupling() + c.intracavity_loss;
    total * total / (T::lit(4.0) * c.shg_efficiency)
}

/// Fraction of intracavity loss leaving through the output coupler, `T₁ / (T₁ + L)`.
pub fn escape_efficiency<T: Real>(c: &CavityParams<T>) -> T {
    let t1 = c.output_coupling();
    t1 / (t1 + c.intracavity_loss)
}
