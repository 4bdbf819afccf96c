//! The analyses behind each subcommand, returning data rather than files.

use std::fmt::Write as _;

use squeezelab::capacity::{self, CapacityCurve};
use squeezelab::cavity;
use squeezelab::eom::{self, ToneVisibility};
use squeezelab::gaussian::{db_to_ratio, ratio_to_db};
use squeezelab::homodyne::{self, ReferenceMode};
use squeezelab::spectrum::{
    self, detected_pair, fit_phase_jitter, linear_grid, DetectionChain, Quadrature, SpectrumTrace, TraceLabel,
};
use squeezelab::trace::{simulate_psd, PsdEstimate, Tone, TraceConfig};
use squeezelab::Result;

use crate::config::Scenario;

/// Frequency step of the synthesis target, Hz.
const TARGET_STEP_HZ: f64 = 25.0e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityReport {
    pub optical_length: f64,
    pub fsr: f64,
    pub finesse: f64,
    pub fwhm: f64,
    pub threshold: f64,
    pub escape_efficiency: f64,
}

pub fn cavity_report(s: &Scenario) -> Result<CavityReport> {
    let c = &s.cavity;
    Ok(CavityReport {
        optical_length: c.optical_length(),
        fsr: cavity::free_spectral_range(c),
        finesse: cavity::finesse(c)?,
        fwhm: cavity::fwhm(c)?,
        threshold: cavity::threshold_power(c),
        escape_efficiency: cavity::escape_efficiency(c),
    })
}

impl CavityReport {
    pub fn csv(&self) -> String {
        let rows = [
            ("optical_length", self.optical_length, "m"),
            ("free_spectral_range", self.fsr, "Hz"),
            ("finesse", self.finesse, ""),
            ("fwhm", self.fwhm, "Hz"),
            ("threshold_power", self.threshold, "W"),
            ("escape_efficiency", self.escape_efficiency, ""),
        ];
        let mut out = String::from("quantity,value,unit\n");
        for (q, v, u) in rows {
            let _ = writeln!(out, "{q},{v},{u}");
        }
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "FSR {:.3} GHz\nfinesse {:.1}\nFWHM {:.2} MHz\nthreshold {:.0} mW\nescape efficiency {:.3}\n",
            self.fsr / 1e9,
            self.finesse,
            self.fwhm / 1e6,
            self.threshold * 1e3,
            self.escape_efficiency
        )
    }
}

/// Analytic squeezed, antisqueezed and shot-noise spectra on the scenario grid.
pub fn analytic_spectra(s: &Scenario) -> Result<Vec<SpectrumTrace<f64>>> {
    let g = &s.spectrum;
    let grid = linear_grid(g.start_hz, g.stop_hz, g.step_hz);
    let chain = s.detection_chain();
    Ok(vec![
        spectrum::detected_spectrum_for(&s.opa, &chain, &grid, Quadrature::Squeezed)?,
        spectrum::detected_spectrum_for(&s.opa, &chain, &grid, Quadrature::Antisqueezed)?,
        SpectrumTrace::flat(grid, 0.0, TraceLabel::ShotNoise)?,
    ])
}

pub fn csv_of_traces(traces: &[SpectrumTrace<f64>]) -> String {
    let mut buf = Vec::new();
    spectrum::write_csv(&mut buf, traces).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

/// Corrected squeezing in dB from an observed ratio in dB.
pub fn correct(observed_db: f64, power_ratio: f64, mode: ReferenceMode) -> Result<f64> {
    let e = homodyne::correct_shot_noise(mode, db_to_ratio(observed_db), power_ratio)?;
    ratio_to_db(e)
}

/// Synthesis target for one quadrature, 0 Hz to Nyquist.
pub fn synthesis_target(s: &Scenario, chain: &DetectionChain<f64>, label: TraceLabel) -> Result<SpectrumTrace<f64>> {
    let grid = linear_grid(0.0, s.trace.nyquist(), TARGET_STEP_HZ);
    match label {
        TraceLabel::SqueezedQuadrature => spectrum::detected_spectrum_for(&s.opa, chain, &grid, Quadrature::Squeezed),
        TraceLabel::AntisqueezedQuadrature => {
            spectrum::detected_spectrum_for(&s.opa, chain, &grid, Quadrature::Antisqueezed)
        }
        TraceLabel::ShotNoise => SpectrumTrace::flat(grid, 0.0, label),
        TraceLabel::ElectronicNoise => SpectrumTrace::flat(grid, f64::NEG_INFINITY, label),
    }
}

/// Seed used for the `k`-th independent trace of one run.
pub fn trace_config(s: &Scenario, k: u64) -> TraceConfig<f64> {
    TraceConfig {
        seed: s.trace.seed.wrapping_add(k),
        ..s.trace
    }
}

/// Expected displayed level: analytic detected spectrum plus the electronic floor, dB.
pub fn analytic_with_floor_db(s: &Scenario, chain: &DetectionChain<f64>, label: TraceLabel, f: f64) -> Result<f64> {
    let base = match label {
        TraceLabel::SqueezedQuadrature => detected_pair(&s.opa, chain, f)?.0,
        TraceLabel::AntisqueezedQuadrature => detected_pair(&s.opa, chain, f)?.1,
        TraceLabel::ShotNoise => 1.0,
        TraceLabel::ElectronicNoise => 0.0,
    };
    ratio_to_db(base + db_to_ratio(s.trace.electronic_floor_db))
}

/// Trace order of the spectrum figure and the seed offset of each.
pub const FIGURE_TRACES: [TraceLabel; 4] = [
    TraceLabel::AntisqueezedQuadrature,
    TraceLabel::ShotNoise,
    TraceLabel::SqueezedQuadrature,
    TraceLabel::ElectronicNoise,
];

/// Averaged PSD of one synthesized trace kind.
pub fn simulate_trace(s: &Scenario, label: TraceLabel) -> Result<PsdEstimate<f64>> {
    let k = FIGURE_TRACES.iter().position(|&l| l == label).unwrap_or(0) as u64;
    let target = synthesis_target(s, &s.detection_chain(), label)?;
    simulate_psd(&trace_config(s, k), &target, None)
}

/// All four spectrum-figure traces, dB relative to shot noise.
pub fn figure_traces(s: &Scenario) -> Result<Vec<SpectrumTrace<f64>>> {
    FIGURE_TRACES
        .iter()
        .map(|&label| simulate_trace(s, label)?.to_trace(label))
        .collect()
}

/// Mean level, ripple and tone excess around a frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloorStats {
    /// Mean linear power in the window, as dB.
    pub floor_db: f64,
    /// Standard deviation of the dB values about a straight-line fit, so
    /// the spectrum's own slope does not count as ripple.
    pub ripple_sigma_db: f64,
    /// Highest value within the exclusion zone minus the floor, dB.
    pub peak_excess_db: f64,
}

/// Floor over `|f − f0| ≤ halfwidth`, skipping `|f − f0| ≤ exclusion`.
pub fn floor_stats(trace: &SpectrumTrace<f64>, f0: f64, halfwidth: f64, exclusion: f64) -> FloorStats {
    let window: Vec<(f64, f64)> = trace
        .iter()
        .filter(|(f, _)| (f - f0).abs() <= halfwidth && (f - f0).abs() > exclusion)
        .collect();
    let n = window.len() as f64;
    let floor_db = 10.0 * (window.iter().map(|&(_, v)| db_to_ratio(v)).sum::<f64>() / n).log10();
    let (mf, mv) = window.iter().fold((0.0, 0.0), |a, &(f, v)| (a.0 + f / n, a.1 + v / n));
    let sxx: f64 = window.iter().map(|&(f, _)| (f - mf).powi(2)).sum();
    let slope = if sxx > 0.0 {
        window.iter().map(|&(f, v)| (f - mf) * (v - mv)).sum::<f64>() / sxx
    } else {
        0.0
    };
    let ss: f64 = window.iter().map(|&(f, v)| (v - mv - slope * (f - mf)).powi(2)).sum();
    let ripple_sigma_db = (ss / (n - 2.0)).sqrt();
    let peak = trace
        .iter()
        .filter(|(f, _)| (f - f0).abs() <= exclusion)
        .map(|(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    FloorStats {
        floor_db,
        ripple_sigma_db,
        peak_excess_db: peak - floor_db,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfereReport {
    pub tone_frequency: f64,
    pub tone_db: f64,
    pub phase_jitter_rms: f64,
    /// Analytic squeezed floor at the tone, without electronic noise.
    pub analytic_floor_db: f64,
    pub coherent: SpectrumTrace<f64>,
    pub squeezed: SpectrumTrace<f64>,
    pub coherent_stats: FloorStats,
    pub squeezed_stats: FloorStats,
    pub visibility: ToneVisibility,
}

impl InterfereReport {
    pub fn snr_gain_db(&self) -> f64 {
        homodyne::squeezing_gain_db(self.coherent_stats.floor_db, self.squeezed_stats.floor_db)
    }

    pub fn summary(&self) -> String {
        let c = &self.coherent_stats;
        let q = &self.squeezed_stats;
        format!(
            "tone {:.2} MHz at {:.2} dB rel. shot noise (jitter {:.1} mrad)\n\
             coherent floor {:.2} dB, ripple {:.3} dB, peak +{:.2} dB\n\
             squeezed floor {:.2} dB, ripple {:.3} dB, peak +{:.2} dB\n\
             SNR gain {:.2} dB; analytic visibility {:?}\n",
            self.tone_frequency / 1e6,
            self.tone_db,
            self.phase_jitter_rms * 1e3,
            c.floor_db,
            c.ripple_sigma_db,
            c.peak_excess_db,
            q.floor_db,
            q.ripple_sigma_db,
            q.peak_excess_db,
            self.snr_gain_db(),
            self.visibility,
        )
    }
}

/// Tone level from the explicit setting, else from the EOM drive.
pub fn tone_db(s: &Scenario) -> Result<f64> {
    match s.interfere.tone_db_rel_shot {
        Some(db) => Ok(db),
        None => eom::tone_power_rel_shot(eom::phase_shift_amplitude(&s.eom), &s.homodyne, s.trace.effective_rbw()),
    }
}

/// Coherent versus squeezed reference with the same tone.
pub fn interfere(s: &Scenario) -> Result<InterfereReport> {
    let f0 = s.eom.modulation_frequency;
    let mut chain = s.detection_chain();
    if let Some(target) = s.interfere.target_floor_db {
        chain.phase_jitter_rms = fit_phase_jitter(&s.opa, &chain, f0, target)?;
    }
    let tone_db = tone_db(s)?;
    let coherent_cfg = trace_config(s, 0);
    let squeezed_cfg = trace_config(s, 1);
    let tone = Tone::from_rel_shot_db(f0, tone_db, &coherent_cfg);

    let coherent_target = synthesis_target(s, &chain, TraceLabel::ShotNoise)?;
    let squeezed_target = synthesis_target(s, &chain, TraceLabel::SqueezedQuadrature)?;
    let coherent = simulate_psd(&coherent_cfg, &coherent_target, Some(&tone))?.to_trace(TraceLabel::ShotNoise)?;
    let squeezed =
        simulate_psd(&squeezed_cfg, &squeezed_target, Some(&tone))?.to_trace(TraceLabel::SqueezedQuadrature)?;

    let exclusion = 2.0 * s.trace.effective_rbw();
    let half = s.interfere.floor_halfwidth;
    let analytic_floor_db = ratio_to_db(detected_pair(&s.opa, &chain, f0)?.0)?;
    Ok(InterfereReport {
        tone_frequency: f0,
        tone_db,
        phase_jitter_rms: chain.phase_jitter_rms,
        analytic_floor_db,
        coherent_stats: floor_stats(&coherent, f0, half, exclusion),
        squeezed_stats: floor_stats(&squeezed, f0, half, exclusion),
        coherent,
        squeezed,
        visibility: eom::classify_tone(tone_db, 0.0, analytic_floor_db),
    })
}

pub fn capacity_curves(s: &Scenario) -> Result<Vec<CapacityCurve<f64>>> {
    let c = &s.capacity;
    let grid = capacity::log_grid(c.nbar_min, c.nbar_max, c.points)?;
    capacity::curve_suite(&grid, c.squeeze_r)
}

pub fn capacity_csv(curves: &[CapacityCurve<f64>]) -> String {
    let mut buf = Vec::new();
    capacity::write_csv(&mut buf, curves).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}
