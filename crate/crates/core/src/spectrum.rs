//! Frequency-resolved squeezing of a below-threshold degenerate OPA and its
//! degradation through the detection chain.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::gaussian::{apply_loss, apply_phase_jitter, db_to_ratio, jitter_for_target, ratio_to_db, LossModel};
use crate::scalar::Real;

/// Below-threshold pump setting of the OPA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpaOperatingPoint<T> {
    /// Pump power, W.
    pub pump_power: T,
    /// Oscillation threshold, W.
    pub threshold_power: T,
    /// Cavity half-width at half maximum, Hz.
    pub cavity_hwhm: T,
}

impl<T: Real> OpaOperatingPoint<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold_power > T::zero()) {
            return Err(invalid("opa.threshold_power", "must be > 0"));
        }
        if !(self.pump_power >= T::zero()) {
            return Err(invalid("opa.pump_power", "must be >= 0"));
        }
        if self.pump_power >= self.threshold_power {
            return Err(Error::AboveThreshold {
                x: self.pump_ratio_x().as_f64(),
            });
        }
        if !(self.cavity_hwhm > T::zero()) {
            return Err(invalid("opa.cavity_hwhm", "must be > 0"));
        }
        Ok(())
    }

    /// Normalized pump amplitude `x = √(P_p / P_th)`.
    pub fn pump_ratio_x(&self) -> T {
        (self.pump_power / self.threshold_power).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrature {
    Squeezed,
    Antisqueezed,
}

/// Everything between the OPA crystal and the spectrum analyzer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionChain<T> {
    /// Cavity escape efficiency, see [`crate::cavity::escape_efficiency`].
    pub escape_efficiency: T,
    pub quantum_efficiency: T,
    /// Homodyne fringe visibility; enters squared.
    pub homodyne_contrast: T,
    pub propagation_efficiency: T,
    /// Fixed quadrature misalignment, rad.
    pub phase_jitter_rms: T,
}

impl<T: Real> DetectionChain<T> {
    pub fn ideal() -> Self {
        Self {
            escape_efficiency: T::one(),
            quantum_efficiency: T::one(),
            homodyne_contrast: T::one(),
            propagation_efficiency: T::one(),
            phase_jitter_rms: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("chain.escape_efficiency", self.escape_efficiency),
            ("chain.quantum_efficiency", self.quantum_efficiency),
            ("chain.homodyne_contrast", self.homodyne_contrast),
            ("chain.propagation_efficiency", self.propagation_efficiency),
        ] {
            if !(v > T::zero() && v <= T::one()) {
                return Err(invalid(name, format!("must be in (0, 1], got {v}")));
            }
        }
        if !(self.phase_jitter_rms >= T::zero()) {
            return Err(invalid("chain.phase_jitter_rms", "must be >= 0"));
        }
        Ok(())
    }

    /// `η = η_esc · η_QE · contrast² · η_prop`.
    pub fn total_efficiency(&self) -> T {
        self.escape_efficiency
            * self.quantum_efficiency
            * self.homodyne_contrast
            * self.homodyne_contrast
            * self.propagation_efficiency
    }

    pub fn loss(&self) -> Result<LossModel<T>> {
        self.validate()?;
        LossModel::new(self.total_efficiency())
    }
}

/// Label of a noise-power record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceLabel {
    SqueezedQuadrature,
    AntisqueezedQuadrature,
    ShotNoise,
    ElectronicNoise,
}

impl fmt::Display for TraceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceLabel::SqueezedQuadrature => "SqueezedQuadrature",
            TraceLabel::AntisqueezedQuadrature => "AntisqueezedQuadrature",
            TraceLabel::ShotNoise => "ShotNoise",
            TraceLabel::ElectronicNoise => "ElectronicNoise",
        })
    }
}

impl FromStr for TraceLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SqueezedQuadrature" => Ok(TraceLabel::SqueezedQuadrature),
            "AntisqueezedQuadrature" => Ok(TraceLabel::AntisqueezedQuadrature),
            "ShotNoise" => Ok(TraceLabel::ShotNoise),
            "ElectronicNoise" => Ok(TraceLabel::ElectronicNoise),
            other => Err(invalid("label", format!("unknown trace label `{other}`"))),
        }
    }
}

/// Noise power versus frequency, in dB relative to shot noise.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTrace<T> {
    frequencies: Vec<T>,
    values_db: Vec<T>,
    pub label: TraceLabel,
}

impl<T: Real> SpectrumTrace<T> {
    pub fn new(frequencies: Vec<T>, values_db: Vec<T>, label: TraceLabel) -> Result<Self> {
        if frequencies.len() != values_db.len() {
            return Err(invalid(
                "values_db",
                format!("{} values for {} frequencies", values_db.len(), frequencies.len()),
            ));
        }
        if frequencies.is_empty() {
            return Err(invalid("frequencies", "trace is empty"));
        }
        if frequencies.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("frequencies", "must be strictly increasing"));
        }
        Ok(Self {
            frequencies,
            values_db,
            label,
        })
    }

    /// A frequency-independent trace.
    pub fn flat(frequencies: Vec<T>, level_db: T, label: TraceLabel) -> Result<Self> {
        let values = vec![level_db; frequencies.len()];
        Self::new(frequencies, values, label)
    }

    pub fn frequencies(&self) -> &[T] {
        &self.frequencies
    }

    pub fn values_db(&self) -> &[T] {
        &self.values_db
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.frequencies.iter().copied().zip(self.values_db.iter().copied())
    }

    /// Linear power ratio at `f`, interpolated linearly in power and held
    /// constant beyond either end.
    pub fn linear_at(&self, f: T) -> T {
        let fs = &self.frequencies;
        let n = fs.len();
        if f <= fs[0] {
            return db_to_ratio(self.values_db[0]);
        }
        if f >= fs[n - 1] {
            return db_to_ratio(self.values_db[n - 1]);
        }
        let hi = fs.partition_point(|&x| x <= f);
        let lo = hi - 1;
        let t = (f - fs[lo]) / (fs[hi] - fs[lo]);
        let a = db_to_ratio(self.values_db[lo]);
        let b = db_to_ratio(self.values_db[hi]);
        a + (b - a) * t
    }

    /// Writes `frequency_hz,value_db,label` with header.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        write_csv(out, std::slice::from_ref(self))
    }
}

/// Writes several traces into one CSV with a single header.
pub fn write_csv<T: Real, W: Write>(out: &mut W, traces: &[SpectrumTrace<T>]) -> io::Result<()> {
    writeln!(out, "frequency_hz,value_db,label")?;
    for trace in traces {
        for (f, v) in trace.iter() {
            writeln!(out, "{},{},{}", f, v, trace.label)?;
        }
    }
    Ok(())
}

/// Reads the CSV written by [`write_csv`], grouping rows by label in order of first appearance.
pub fn read_csv<T: Real + FromStr>(text: &str) -> Result<Vec<SpectrumTrace<T>>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("frequency_hz,value_db,label") => {}
        other => {
            return Err(invalid("csv", format!("unexpected header {other:?}")));
        }
    }
    let mut groups: Vec<(TraceLabel, Vec<T>, Vec<T>)> = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(invalid("csv", format!("row {} has {} fields", i + 2, fields.len())));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<T>()
                .map_err(|_| invalid("csv", format!("row {}: bad number `{s}`", i + 2)))
        };
        let (f, v, label) = (parse(fields[0])?, parse(fields[1])?, fields[2].trim().parse()?);
        match groups.iter_mut().find(|g| g.0 == label) {
            Some(g) => {
                g.1.push(f);
                g.2.push(v);
            }
            None => groups.push((label, vec![f], vec![v])),
        }
    }
    groups
        .into_iter()
        .map(|(l, f, v)| SpectrumTrace::new(f, v, l))
        .collect()
}

/// Loss-free intracavity spectrum `1 ∓ 4x / [(1 ± x)² + (Ω/γ)²]`.
pub fn ideal_spectrum<T: Real>(op: &OpaOperatingPoint<T>, omega: T, quadrature: Quadrature) -> Result<T> {
    op.validate()?;
    let x = op.pump_ratio_x();
    let detuning = omega / op.cavity_hwhm;
    let d2 = detuning * detuning;
    let four_x = T::lit(4.0) * x;
    Ok(match quadrature {
        Quadrature::Squeezed => {
            let a = T::one() + x;
            T::one() - four_x / (a * a + d2)
        }
        Quadrature::Antisqueezed => {
            let a = T::one() - x;
            T::one() + four_x / (a * a + d2)
        }
    })
}

/// Detected (squeezed, antisqueezed) variances at `omega`, linear shot-noise units.
pub fn detected_pair<T: Real>(op: &OpaOperatingPoint<T>, chain: &DetectionChain<T>, omega: T) -> Result<(T, T)> {
    let loss = chain.loss()?;
    let sq = apply_loss(ideal_spectrum(op, omega, Quadrature::Squeezed)?, loss)?;
    let anti = apply_loss(ideal_spectrum(op, omega, Quadrature::Antisqueezed)?, loss)?;
    let jitter = chain.phase_jitter_rms;
    let sq_j = apply_phase_jitter(sq, anti, jitter)?;
    let (s, c) = jitter.sin_cos();
    let anti_j = anti * c * c + sq * s * s;
    Ok((sq_j, anti_j))
}

/// Detected variance of one quadrature at `omega`, linear.
pub fn detected_value<T: Real>(
    op: &OpaOperatingPoint<T>,
    chain: &DetectionChain<T>,
    omega: T,
    quadrature: Quadrature,
) -> Result<T> {
    let (sq, anti) = detected_pair(op, chain, omega)?;
    Ok(match quadrature {
        Quadrature::Squeezed => sq,
        Quadrature::Antisqueezed => anti,
    })
}

/// Squeezed-quadrature detected spectrum over `omega_grid`.
pub fn detected_spectrum<T: Real>(
    op: &OpaOperatingPoint<T>,
    chain: &DetectionChain<T>,
    omega_grid: &[T],
) -> Result<SpectrumTrace<T>> {
    detected_spectrum_for(op, chain, omega_grid, Quadrature::Squeezed)
}

pub fn detected_spectrum_for<T: Real>(
    op: &OpaOperatingPoint<T>,
    chain: &DetectionChain<T>,
    omega_grid: &[T],
    quadrature: Quadrature,
) -> Result<SpectrumTrace<T>> {
    let values = omega_grid
        .iter()
        .map(|&w| ratio_to_db(detected_value(op, chain, w, quadrature)?))
        .collect::<Result<Vec<_>>>()?;
    let label = match quadrature {
        Quadrature::Squeezed => TraceLabel::SqueezedQuadrature,
        Quadrature::Antisqueezed => TraceLabel::AntisqueezedQuadrature,
    };
    SpectrumTrace::new(omega_grid.to_vec(), values, label)
}

/// Quadrature misalignment that puts the detected squeezed spectrum at
/// `target_db` at frequency `omega`, with all other chain parameters fixed.
pub fn fit_phase_jitter<T: Real>(
    op: &OpaOperatingPoint<T>,
    chain: &DetectionChain<T>,
    omega: T,
    target_db: T,
) -> Result<T> {
    let aligned = DetectionChain {
        phase_jitter_rms: T::zero(),
        ..*chain
    };
    let (v_min, v_max) = detected_pair(op, &aligned, omega)?;
    jitter_for_target(v_min, v_max, db_to_ratio(target_db))
}

/// `start, start+step, …` up to and including `stop` (within half a step).
pub fn linear_grid<T: Real>(start: T, stop: T, step: T) -> Vec<T> {
    let n = ((stop - start) / step + T::lit(0.5)).floor().to_usize().unwrap_or(0);
    (0..=n).map(|i| start + step * T::from_usize(i).unwrap()).collect()
}

/// 1–25 MHz at 30 kHz steps.
pub fn default_grid<T: Real>() -> Vec<T> {
    linear_grid(T::lit(1.0e6), T::lit(25.0e6), T::lit(30.0e3))
}
