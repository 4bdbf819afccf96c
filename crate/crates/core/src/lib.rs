//! Simulation and analysis of a bright phase-squeezed beam from a
//! below-threshold optical parametric amplifier.
//!
//! * [`gaussian`]: single-mode quadrature variances, loss, misalignment, dB.
//! * [`cavity`]: resonator FSR, finesse, linewidth, threshold, escape efficiency.
//! * [`spectrum`]: analytic squeezing spectra through the detection chain.
//! * [`homodyne`]: bright-beam balanced homodyne statistics and reference corrections.
//! * [`eom`]: electro-optic phase modulation and tone levels.
//! * [`trace`]: photocurrent synthesis and RBW/VBW PSD estimation.
//! * [`capacity`]: Gaussian channel capacities and the Holevo bound.
//!
//! Every model is generic over [`Real`]; the `*64` / `*32` aliases below fix
//! the precision.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod cavity;
pub mod eom;
mod error;
pub mod gaussian;
pub mod homodyne;
mod scalar;
pub mod spectrum;
pub mod trace;

pub use error::{Error, Result};
pub use scalar::{Real, PLANCK, SPEED_OF_LIGHT};

pub type QuadratureState64 = gaussian::QuadratureState<f64>;
pub type QuadratureState32 = gaussian::QuadratureState<f32>;
pub type LossModel64 = gaussian::LossModel<f64>;
pub type LossModel32 = gaussian::LossModel<f32>;
pub type CavityParams64 = cavity::CavityParams<f64>;
pub type CavityParams32 = cavity::CavityParams<f32>;
pub type OpaOperatingPoint64 = spectrum::OpaOperatingPoint<f64>;
pub type OpaOperatingPoint32 = spectrum::OpaOperatingPoint<f32>;
pub type DetectionChain64 = spectrum::DetectionChain<f64>;
pub type DetectionChain32 = spectrum::DetectionChain<f32>;
pub type SpectrumTrace64 = spectrum::SpectrumTrace<f64>;
pub type SpectrumTrace32 = spectrum::SpectrumTrace<f32>;
pub type HomodyneConfig64 = homodyne::HomodyneConfig<f64>;
pub type HomodyneConfig32 = homodyne::HomodyneConfig<f32>;
pub type EomParams64 = eom::EomParams<f64>;
pub type EomParams32 = eom::EomParams<f32>;
pub type TraceConfig64 = trace::TraceConfig<f64>;
pub type TraceConfig32 = trace::TraceConfig<f32>;
pub type PhotocurrentTrace64 = trace::PhotocurrentTrace<f64>;
pub type PsdEstimate64 = trace::PsdEstimate<f64>;
pub type ChannelSpec64 = capacity::ChannelSpec<f64>;
pub type CapacityCurve64 = capacity::CapacityCurve<f64>;
