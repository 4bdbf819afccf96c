//! Scenario configuration: a flat `section.key = value` text format.
//!
//! ```text
//! # comment
//! cavity.mirror_r1 = 0.95
//! trace.sweeps = 100
//! interfere.tone_db_rel_shot = none
//! ```
//!
//! Keys under `meta.`, `args.` and `assumption.` are accepted and ignored,
//! so an output's metadata sidecar can be fed back as a config.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use squeezelab::cavity::{self, CavityParams, KTP_INDEX_1064};
use squeezelab::eom::{self, EomParams, RTA_N_Y_1064, RTA_N_Z_1064, RTA_R23, RTA_R33};
use squeezelab::homodyne::HomodyneConfig;
use squeezelab::spectrum::{fit_phase_jitter, DetectionChain, OpaOperatingPoint};
use squeezelab::trace::TraceConfig;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("field `{key}`: cannot parse `{value}` ({reason})")]
    BadValue { key: String, value: String, reason: String },
    #[error("field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
}

impl From<squeezelab::Error> for ConfigError {
    fn from(e: squeezelab::Error) -> Self {
        match e {
            squeezelab::Error::InvalidParameter { name, reason } => ConfigError::Invalid {
                field: name.to_string(),
                reason,
            },
            squeezelab::Error::AboveThreshold { x } => ConfigError::Invalid {
                field: "opa.pump_power".into(),
                reason: format!("pump must stay below threshold (x = {x:.4})"),
            },
            squeezelab::Error::UnderSampled(reason) => ConfigError::Invalid {
                field: "trace.sample_rate".into(),
                reason,
            },
            other => ConfigError::Invalid {
                field: "scenario".into(),
                reason: other.to_string(),
            },
        }
    }
}

/// Detection losses and misalignment; escape efficiency comes from the cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSettings {
    pub quantum_efficiency: f64,
    pub homodyne_contrast: f64,
    pub propagation_efficiency: f64,
    pub phase_jitter_rms: f64,
}

/// Analytic spectrum grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSettings {
    pub start_hz: f64,
    pub stop_hz: f64,
    pub step_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacitySettings {
    pub squeeze_r: f64,
    pub nbar_min: f64,
    pub nbar_max: f64,
    pub points: usize,
}

/// The tone sits at `eom.modulation_frequency`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfereSettings {
    /// Explicit tone level; `None` derives it from the EOM drive.
    pub tone_db_rel_shot: Option<f64>,
    /// Squeezed floor at the tone frequency to fit the misalignment to;
    /// `None` keeps `chain.phase_jitter_rms`.
    pub target_floor_db: Option<f64>,
    /// Half-width of the floor window around the tone, Hz.
    pub floor_halfwidth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub cavity: CavityParams<f64>,
    pub opa: OpaOperatingPoint<f64>,
    pub chain: ChainSettings,
    pub homodyne: HomodyneConfig<f64>,
    pub eom: EomParams<f64>,
    pub trace: TraceConfig<f64>,
    pub spectrum: GridSettings,
    pub capacity: CapacitySettings,
    pub interfere: InterfereSettings,
}

/// Preset values that are modeling or simulation choices rather than
/// measured quantities of the reference experiment.
pub const ASSUMPTIONS: &[(&str, &str)] = &[
    ("cavity.crystal_index", "KTP literature index at 1064 nm"),
    (
        "cavity.intracavity_loss",
        "crystal loss taken as negligible next to the output coupler",
    ),
    ("opa.cavity_hwhm", "half of the measured 21.3 MHz linewidth"),
    (
        "chain.phase_jitter_rms",
        "fitted so the detected spectrum reads -4.16 dB at 3.2 MHz",
    ),
    ("eom.n_z", "literature-typical RTA index"),
    ("eom.n_y", "literature-typical RTA index"),
    ("eom.crystal_length", "not reported"),
    (
        "eom.field_e_z",
        "chosen so the tone sits 1 dB below shot noise in a 30 kHz bin",
    ),
    ("trace.sample_rate", "simulation choice"),
    ("trace.duration", "simulation choice"),
    ("trace.seed", "simulation choice"),
    (
        "trace.electronic_floor_db",
        "read qualitatively; not a measured constant",
    ),
    ("interfere.target_floor_db", "corrected squeezing of the modulation run"),
    ("capacity.nbar_min", "plot range"),
    ("capacity.nbar_max", "plot range"),
];

impl Scenario {
    pub fn reference_preset() -> Self {
        let cavity = CavityParams {
            geometric_length: 0.052,
            crystal_length: 0.005,
            crystal_index: KTP_INDEX_1064,
            mirror_r1: 0.95,
            mirror_r2: 0.99992,
            intracavity_loss: 0.0,
            shg_efficiency: 3.83e-3,
        };
        let opa = OpaOperatingPoint {
            pump_power: 0.130,
            threshold_power: 0.145,
            cavity_hwhm: 21.3e6 / 2.0,
        };
        let mut chain = ChainSettings {
            quantum_efficiency: 0.95,
            homodyne_contrast: 0.96,
            propagation_efficiency: 0.94,
            phase_jitter_rms: 0.0,
        };
        let aligned = DetectionChain {
            escape_efficiency: cavity::escape_efficiency(&cavity),
            quantum_efficiency: chain.quantum_efficiency,
            homodyne_contrast: chain.homodyne_contrast,
            propagation_efficiency: chain.propagation_efficiency,
            phase_jitter_rms: 0.0,
        };
        chain.phase_jitter_rms =
            fit_phase_jitter(&opa, &aligned, 3.2e6, -4.16).expect("preset operating point is valid");

        let homodyne = HomodyneConfig {
            opa_power: 0.16e-3,
            lo_power: 4.2e-3,
            lo_phase_theta: FRAC_PI_2,
            wavelength: 1.064e-6,
        };
        let trace = TraceConfig {
            sample_rate: 100.0e6,
            duration: 1.0e-3,
            sweeps: 100,
            rbw: 30.0e3,
            vbw: 10.0e3,
            seed: 20_070_531,
            electronic_floor_db: -20.0,
        };
        let mut eom = EomParams {
            n_z: RTA_N_Z_1064,
            n_y: RTA_N_Y_1064,
            r33: RTA_R33,
            r23: RTA_R23,
            crystal_length: 0.02,
            wavelength: 1.064e-6,
            field_e_z: 0.0,
            modulation_frequency: 4.5e6,
        };
        let depth = eom::delta_theta_for_tone_db(-1.0, &homodyne, trace.effective_rbw())
            .expect("preset homodyne config is valid");
        eom.field_e_z = eom::field_for_phase_shift(&eom, depth);

        Scenario {
            cavity,
            opa,
            chain,
            homodyne,
            eom,
            trace,
            spectrum: GridSettings {
                start_hz: 1.0e6,
                stop_hz: 25.0e6,
                step_hz: 30.0e3,
            },
            capacity: CapacitySettings {
                squeeze_r: -(0.47f64).ln() / 2.0,
                nbar_min: 0.01,
                nbar_max: 10.0,
                points: 200,
            },
            interfere: InterfereSettings {
                tone_db_rel_shot: None,
                target_floor_db: Some(-3.2),
                floor_halfwidth: 0.5e6,
            },
        }
    }

    pub fn detection_chain(&self) -> DetectionChain<f64> {
        DetectionChain {
            escape_efficiency: cavity::escape_efficiency(&self.cavity),
            quantum_efficiency: self.chain.quantum_efficiency,
            homodyne_contrast: self.chain.homodyne_contrast,
            propagation_efficiency: self.chain.propagation_efficiency,
            phase_jitter_rms: self.chain.phase_jitter_rms,
        }
    }

    /// Per-component and cross-field checks.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.cavity.validate()?;
        self.opa.validate()?;
        self.detection_chain().validate()?;
        self.homodyne.validate()?;
        self.eom.validate()?;
        self.trace.validate()?;
        let invalid = |field: &str, reason: &str| {
            Err(ConfigError::Invalid {
                field: field.into(),
                reason: reason.into(),
            })
        };
        let g = &self.spectrum;
        if !(g.start_hz >= 0.0 && g.stop_hz > g.start_hz && g.step_hz > 0.0) {
            return invalid("spectrum.step_hz", "need 0 <= start_hz < stop_hz and step_hz > 0");
        }
        let c = &self.capacity;
        if !(c.squeeze_r >= 0.0) {
            return invalid("capacity.squeeze_r", "must be >= 0");
        }
        if !(c.nbar_min > 0.0 && c.nbar_max > c.nbar_min) || c.points < 2 {
            return invalid("capacity.points", "need 0 < nbar_min < nbar_max and points >= 2");
        }
        let i = &self.interfere;
        if !(i.floor_halfwidth > 0.0) {
            return invalid("interfere.floor_halfwidth", "must be > 0");
        }
        if !(self.trace.sample_rate > 2.0 * g.stop_hz) {
            return invalid("trace.sample_rate", "Nyquist frequency must exceed spectrum.stop_hz");
        }
        let tone = self.eom.modulation_frequency;
        if !(self.trace.sample_rate > 2.0 * (tone + i.floor_halfwidth)) {
            return invalid(
                "eom.modulation_frequency",
                "tone and its floor window must lie below Nyquist",
            );
        }
        if !(tone > i.floor_halfwidth) {
            return invalid("eom.modulation_frequency", "must exceed interfere.floor_halfwidth");
        }
        Ok(())
    }

    /// Every key in canonical order with its serialized value.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let f = |v: f64| format!("{v:?}");
        let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), f);
        let s = self;
        vec![
            ("cavity.geometric_length", f(s.cavity.geometric_length)),
            ("cavity.crystal_length", f(s.cavity.crystal_length)),
            ("cavity.crystal_index", f(s.cavity.crystal_index)),
            ("cavity.mirror_r1", f(s.cavity.mirror_r1)),
            ("cavity.mirror_r2", f(s.cavity.mirror_r2)),
            ("cavity.intracavity_loss", f(s.cavity.intracavity_loss)),
            ("cavity.shg_efficiency", f(s.cavity.shg_efficiency)),
            ("opa.pump_power", f(s.opa.pump_power)),
            ("opa.threshold_power", f(s.opa.threshold_power)),
            ("opa.cavity_hwhm", f(s.opa.cavity_hwhm)),
            ("chain.quantum_efficiency", f(s.chain.quantum_efficiency)),
            ("chain.homodyne_contrast", f(s.chain.homodyne_contrast)),
            ("chain.propagation_efficiency", f(s.chain.propagation_efficiency)),
            ("chain.phase_jitter_rms", f(s.chain.phase_jitter_rms)),
            ("homodyne.opa_power", f(s.homodyne.opa_power)),
            ("homodyne.lo_power", f(s.homodyne.lo_power)),
            ("homodyne.lo_phase_theta", f(s.homodyne.lo_phase_theta)),
            ("homodyne.wavelength", f(s.homodyne.wavelength)),
            ("eom.n_z", f(s.eom.n_z)),
            ("eom.n_y", f(s.eom.n_y)),
            ("eom.r33", f(s.eom.r33)),
            ("eom.r23", f(s.eom.r23)),
            ("eom.crystal_length", f(s.eom.crystal_length)),
            ("eom.wavelength", f(s.eom.wavelength)),
            ("eom.field_e_z", f(s.eom.field_e_z)),
            ("eom.modulation_frequency", f(s.eom.modulation_frequency)),
            ("trace.sample_rate", f(s.trace.sample_rate)),
            ("trace.duration", f(s.trace.duration)),
            ("trace.sweeps", s.trace.sweeps.to_string()),
            ("trace.rbw", f(s.trace.rbw)),
            ("trace.vbw", f(s.trace.vbw)),
            ("trace.seed", s.trace.seed.to_string()),
            ("trace.electronic_floor_db", f(s.trace.electronic_floor_db)),
            ("spectrum.start_hz", f(s.spectrum.start_hz)),
            ("spectrum.stop_hz", f(s.spectrum.stop_hz)),
            ("spectrum.step_hz", f(s.spectrum.step_hz)),
            ("capacity.squeeze_r", f(s.capacity.squeeze_r)),
            ("capacity.nbar_min", f(s.capacity.nbar_min)),
            ("capacity.nbar_max", f(s.capacity.nbar_max)),
            ("capacity.points", s.capacity.points.to_string()),
            ("interfere.tone_db_rel_shot", opt(s.interfere.tone_db_rel_shot)),
            ("interfere.target_floor_db", opt(s.interfere.target_floor_db)),
            ("interfere.floor_halfwidth", f(s.interfere.floor_halfwidth)),
        ]
    }

    /// Sets one dotted key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |reason: &str| ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
            reason: reason.to_string(),
        };
        let num = || -> Result<f64, ConfigError> { value.trim().parse::<f64>().map_err(|_| bad("expected a number")) };
        let int = || -> Result<u64, ConfigError> {
            value
                .trim()
                .parse::<u64>()
                .map_err(|_| bad("expected a non-negative integer"))
        };
        let opt = || -> Result<Option<f64>, ConfigError> {
            match value.trim() {
                "none" => Ok(None),
                _ => num().map(Some),
            }
        };
        let s = self;
        match key {
            "cavity.geometric_length" => s.cavity.geometric_length = num()?,
            "cavity.crystal_length" => s.cavity.crystal_length = num()?,
            "cavity.crystal_index" => s.cavity.crystal_index = num()?,
            "cavity.mirror_r1" => s.cavity.mirror_r1 = num()?,
            "cavity.mirror_r2" => s.cavity.mirror_r2 = num()?,
            "cavity.intracavity_loss" => s.cavity.intracavity_loss = num()?,
            "cavity.shg_efficiency" => s.cavity.shg_efficiency = num()?,
            "opa.pump_power" => s.opa.pump_power = num()?,
            "opa.threshold_power" => s.opa.threshold_power = num()?,
            "opa.cavity_hwhm" => s.opa.cavity_hwhm = num()?,
            "chain.quantum_efficiency" => s.chain.quantum_efficiency = num()?,
            "chain.homodyne_contrast" => s.chain.homodyne_contrast = num()?,
            "chain.propagation_efficiency" => s.chain.propagation_efficiency = num()?,
            "chain.phase_jitter_rms" => s.chain.phase_jitter_rms = num()?,
            "homodyne.opa_power" => s.homodyne.opa_power = num()?,
            "homodyne.lo_power" => s.homodyne.lo_power = num()?,
            "homodyne.lo_phase_theta" => s.homodyne.lo_phase_theta = num()?,
            "homodyne.wavelength" => s.homodyne.wavelength = num()?,
            "eom.n_z" => s.eom.n_z = num()?,
            "eom.n_y" => s.eom.n_y = num()?,
            "eom.r33" => s.eom.r33 = num()?,
            "eom.r23" => s.eom.r23 = num()?,
            "eom.crystal_length" => s.eom.crystal_length = num()?,
            "eom.wavelength" => s.eom.wavelength = num()?,
            "eom.field_e_z" => s.eom.field_e_z = num()?,
            "eom.modulation_frequency" => s.eom.modulation_frequency = num()?,
            "trace.sample_rate" => s.trace.sample_rate = num()?,
            "trace.duration" => s.trace.duration = num()?,
            "trace.sweeps" => s.trace.sweeps = int()? as usize,
            "trace.rbw" => s.trace.rbw = num()?,
            "trace.vbw" => s.trace.vbw = num()?,
            "trace.seed" => s.trace.seed = int()?,
            "trace.electronic_floor_db" => s.trace.electronic_floor_db = num()?,
            "spectrum.start_hz" => s.spectrum.start_hz = num()?,
            "spectrum.stop_hz" => s.spectrum.stop_hz = num()?,
            "spectrum.step_hz" => s.spectrum.step_hz = num()?,
            "capacity.squeeze_r" => s.capacity.squeeze_r = num()?,
            "capacity.nbar_min" => s.capacity.nbar_min = num()?,
            "capacity.nbar_max" => s.capacity.nbar_max = num()?,
            "capacity.points" => s.capacity.points = int()? as usize,
            "interfere.tone_db_rel_shot" => s.interfere.tone_db_rel_shot = opt()?,
            "interfere.target_floor_db" => s.interfere.target_floor_db = opt()?,
            "interfere.floor_halfwidth" => s.interfere.floor_halfwidth = num()?,
            _ if is_passive_key(key) => {}
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Applies `text` on top of `self`; keys not mentioned keep their values.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                reason: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            if !key.contains('.') {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    reason: format!("key `{key}` has no section prefix"),
                });
            }
            self.set(key, value.trim())?;
        }
        Ok(())
    }

    /// Parses a config on top of the reference preset.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut s = Self::reference_preset();
        s.apply_text(text)?;
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut section = "";
        for (key, value) in self.entries() {
            let sec = key.split('.').next().unwrap_or("");
            if sec != section {
                if !section.is_empty() {
                    out.push('\n');
                }
                let _ = writeln!(out, "# {sec}");
                section = sec;
            }
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }
}

fn is_passive_key(key: &str) -> bool {
    ["meta.", "args.", "assumption."].iter().any(|p| key.starts_with(p))
}

/// Whether `key` names a settable scenario field.
pub fn is_scenario_key(key: &str) -> bool {
    Scenario::reference_preset().entries().iter().any(|(k, _)| *k == key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn preset_constants() {
        let p = Scenario::reference_preset();
        assert!((p.opa.pump_power / p.opa.threshold_power - 0.90).abs() < 0.005);
        assert_eq!(p.trace.sweeps, 100);
        assert!((p.homodyne.opa_power / p.homodyne.lo_power - 0.038).abs() < 0.0005);
        assert_eq!(p.trace.rbw, 30e3);
        assert_eq!(p.trace.vbw, 10e3);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn text_round_trip() {
        let p = Scenario::reference_preset();
        let back = Scenario::parse(&p.to_text()).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_text(), p.to_text());
    }

    #[test]
    fn partial_config_and_comments() {
        let s =
            Scenario::parse("# hi\n\ncavity.mirror_r1 = 0.9  # comment\ninterfere.tone_db_rel_shot = -2\n").unwrap();
        assert_eq!(s.cavity.mirror_r1, 0.9);
        assert_eq!(s.interfere.tone_db_rel_shot, Some(-2.0));
        assert_eq!(s.cavity.mirror_r2, 0.99992);
    }

    #[test]
    fn errors_are_field_qualified() {
        assert_eq!(
            Scenario::parse("cavity.colour = 3"),
            Err(ConfigError::UnknownKey("cavity.colour".into()))
        );
        assert!(matches!(
            Scenario::parse("trace.sweeps = -1"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            Scenario::parse("just words"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        let s = Scenario::parse("cavity.mirror_r1 = 1.5").unwrap();
        let err = s.validate().unwrap_err();
        assert!(err.to_string().contains("cavity.mirror_r1"), "{err}");
        let s = Scenario::parse("opa.pump_power = 0.2").unwrap();
        assert!(s.validate().unwrap_err().to_string().contains("opa.pump_power"));
        let s = Scenario::parse("trace.sample_rate = 20e6").unwrap();
        assert!(s.validate().unwrap_err().to_string().contains("trace.sample_rate"));
    }

    #[test]
    fn passive_keys_ignored() {
        let s = Scenario::parse("meta.hash = abc\nargs.observed_db = -3\nassumption.eom.n_z = x\n").unwrap();
        assert_eq!(s, Scenario::reference_preset());
    }

    proptest! {
        #[test]
        fn arbitrary_values_round_trip(
            r1 in 0.0f64..1.0, loss in 0.0f64..1.0, seed in any::<u64>(), sweeps in 1usize..1000,
            floor in proptest::option::of(-10.0f64..0.0), e in -1e3f64..1e3,
        ) {
            let mut s = Scenario::reference_preset();
            s.cavity.mirror_r1 = r1;
            s.cavity.intracavity_loss = loss;
            s.trace.seed = seed;
            s.trace.sweeps = sweeps;
            s.interfere.target_floor_db = floor;
            s.eom.field_e_z = e;
            let back = Scenario::parse(&s.to_text()).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
