//! Linearized single-mode Gaussian field statistics.
//!
//! Variances are in shot-noise units: the vacuum (and any coherent state)
//! has variance 1 in every quadrature.

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Which quadrature carries the reduced noise `e^{-2r}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SqueezedQuadrature {
    /// Phase squeezing: measuring at `θ = π/2` gives `e^{-2r}`.
    Phase,
    /// Amplitude squeezing: measuring at `θ = 0` gives `e^{-2r}`.
    Amplitude,
}

/// A linearized Gaussian mode `a = α + δa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureState<T> {
    /// Mean field amplitude α (square root of photon flux).
    pub mean_amplitude: T,
    /// Squeezing parameter r ≥ 0.
    pub squeeze_r: T,
    pub squeezed_quadrature: SqueezedQuadrature,
    /// LO-relative quadrature angle θ in radians.
    pub phase_offset_theta: T,
}

impl<T: Real> QuadratureState<T> {
    pub fn new(
        mean_amplitude: T,
        squeeze_r: T,
        squeezed_quadrature: SqueezedQuadrature,
        phase_offset_theta: T,
    ) -> Result<Self> {
        if !(squeeze_r >= T::zero()) || !squeeze_r.is_finite() {
            return Err(invalid(
                "squeeze_r",
                format!("must be finite and >= 0, got {squeeze_r}"),
            ));
        }
        if !mean_amplitude.is_finite() || !phase_offset_theta.is_finite() {
            return Err(invalid("mean_amplitude", "amplitude and angle must be finite"));
        }
        Ok(Self {
            mean_amplitude,
            squeeze_r,
            squeezed_quadrature,
            phase_offset_theta,
        })
    }

    /// A coherent state of the given amplitude (r = 0).
    pub fn coherent(mean_amplitude: T) -> Self {
        Self {
            mean_amplitude,
            squeeze_r: T::zero(),
            squeezed_quadrature: SqueezedQuadrature::Phase,
            phase_offset_theta: T::zero(),
        }
    }

    /// Phase-squeezed state whose squeezed variance is `e^{-2r}`.
    pub fn phase_squeezed(mean_amplitude: T, squeeze_r: T) -> Result<Self> {
        Self::new(mean_amplitude, squeeze_r, SqueezedQuadrature::Phase, T::zero())
    }

    /// Variance of the quadrature `A_θ` in shot-noise units.
    pub fn variance_at(&self, theta: T) -> T {
        let two_r = self.squeeze_r + self.squeeze_r;
        let squeezed = (-two_r).exp();
        let anti = two_r.exp();
        let (s, c) = theta.sin_cos();
        match self.squeezed_quadrature {
            SqueezedQuadrature::Phase => squeezed * s * s + anti * c * c,
            SqueezedQuadrature::Amplitude => squeezed * c * c + anti * s * s,
        }
    }

    /// Variance at the state's own `phase_offset_theta`.
    pub fn measured_variance(&self) -> T {
        self.variance_at(self.phase_offset_theta)
    }

    /// `e^{-2r}`, the minimum quadrature variance.
    pub fn squeezed_variance(&self) -> T {
        (-(self.squeeze_r + self.squeeze_r)).exp()
    }

    /// `e^{2r}`, the maximum quadrature variance.
    pub fn antisqueezed_variance(&self) -> T {
        (self.squeeze_r + self.squeeze_r).exp()
    }

    /// Inverts `e^{-2r}` back to r.
    pub fn r_from_squeezed_variance(v: T) -> Result<T> {
        if !(v > T::zero() && v <= T::one()) {
            return Err(invalid("squeezed_variance", format!("must be in (0, 1], got {v}")));
        }
        Ok(-v.ln() / T::lit(2.0))
    }
}

/// Power transmission / detection efficiency, η ∈ (0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossModel<T> {
    efficiency_eta: T,
}

impl<T: Real> LossModel<T> {
    pub fn new(efficiency_eta: T) -> Result<Self> {
        if !(efficiency_eta > T::zero() && efficiency_eta <= T::one()) {
            return Err(invalid(
                "efficiency_eta",
                format!("must be in (0, 1], got {efficiency_eta}"),
            ));
        }
        Ok(Self { efficiency_eta })
    }

    pub fn lossless() -> Self {
        Self {
            efficiency_eta: T::one(),
        }
    }

    pub fn efficiency(&self) -> T {
        self.efficiency_eta
    }

    /// Two losses in cascade.
    pub fn then(self, other: Self) -> Self {
        Self {
            efficiency_eta: self.efficiency_eta * other.efficiency_eta,
        }
    }
}

/// Beam-splitter loss: `η·V + (1 − η)`.
pub fn apply_loss<T: Real>(state_variance: T, loss: LossModel<T>) -> Result<T> {
    if !(state_variance > T::zero()) {
        return Err(invalid("state_variance", format!("must be > 0, got {state_variance}")));
    }
    let eta = loss.efficiency();
    Ok(eta * state_variance + (T::one() - eta))
}

/// Mixes the two principal variances for a fixed quadrature misalignment:
/// `v_min·cos²σ + v_max·sin²σ`.
pub fn apply_phase_jitter<T: Real>(v_min: T, v_max: T, jitter_rms: T) -> Result<T> {
    if v_min < T::zero() || v_max < T::zero() {
        return Err(invalid(
            "variance",
            format!("variances must be non-negative, got ({v_min}, {v_max})"),
        ));
    }
    if v_min > v_max {
        return Err(invalid("v_min", format!("v_min {v_min} exceeds v_max {v_max}")));
    }
    if !(jitter_rms >= T::zero()) {
        return Err(invalid("jitter_rms", format!("must be >= 0, got {jitter_rms}")));
    }
    let (s, c) = jitter_rms.sin_cos();
    Ok(v_min * c * c + v_max * s * s)
}

/// Misalignment σ ∈ [0, π/2] for which [`apply_phase_jitter`] returns `target`.
pub fn jitter_for_target<T: Real>(v_min: T, v_max: T, target: T) -> Result<T> {
    if v_min < T::zero() || v_min > v_max {
        return Err(invalid("v_min", "need 0 <= v_min <= v_max"));
    }
    if !(target >= v_min && target <= v_max) {
        return Err(invalid("target", format!("{target} is outside [{v_min}, {v_max}]")));
    }
    if v_max == v_min {
        return Ok(T::zero());
    }
    let sin2 = (target - v_min) / (v_max - v_min);
    Ok(sin2.sqrt().asin())
}

/// `10·log10(v)`.
pub fn ratio_to_db<T: Real>(v: T) -> Result<T> {
    if !(v > T::zero()) {
        return Err(invalid("ratio", format!("must be > 0 for dB conversion, got {v}")));
    }
    Ok(T::lit(10.0) * v.log10())
}

/// `10^(d/10)`.
pub fn db_to_ratio<T: Real>(d: T) -> T {
    T::lit(10.0).powf(d / T::lit(10.0))
}
