//! Time-domain photocurrent synthesis and spectrum-analyzer style PSD
//! estimation.
//!
//! Samples are in shot-noise-normalized current units: white Gaussian noise
//! of unit variance is exactly the shot-noise level, so its estimated PSD
//! reads 0 dB.
//!
//! Colored noise is produced by masking the DFT of white Gaussian noise with
//! `√S(f)` and transforming back. The mask is circular, so one extra
//! segment is generated at the start of every sweep and discarded.
//!
//! The estimator is a Welch average of periodic-Hann, 50 %-overlap
//! segments. The segment length is chosen so the window's noise-equivalent
//! bandwidth (1.5 bins) equals the requested RBW, which makes a sinusoid
//! centred on a bin read `P_tone / RBW` above the noise density. VBW is a
//! moving average of `rbw/vbw` successive segment periodograms (post-
//! detection smoothing in time), and sweeps are averaged in index order.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftNum, FftPlanner};

use crate::error::{invalid, Error, Result};
use crate::gaussian::db_to_ratio;
use crate::scalar::Real;
use crate::spectrum::{SpectrumTrace, TraceLabel};

/// Identifies the pseudorandom construction so runs can be reproduced elsewhere.
pub const RNG_ALGORITHM: &str =
    "ChaCha20 (rand_chacha), seed_from_u64(seed), stream = sweep index; normals: rand_distr StandardNormal (ziggurat) in f64";

/// Noise-equivalent bandwidth of the periodic Hann window, in bins.
pub const HANN_ENBW_BINS: f64 = 1.5;

/// Scalars the synthesizer can run in.
pub trait SimReal: Real + FftNum {}
impl<T: Real + FftNum> SimReal for T {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceConfig<T> {
    /// Hz.
    pub sample_rate: T,
    /// Seconds per sweep.
    pub duration: T,
    pub sweeps: usize,
    /// Resolution bandwidth, Hz (Hann noise-equivalent bandwidth).
    pub rbw: T,
    /// Video bandwidth, Hz.
    pub vbw: T,
    pub seed: u64,
    /// White electronic noise relative to shot noise; `-inf` disables it.
    pub electronic_floor_db: T,
}

impl<T: Real> TraceConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate > T::zero()) || !self.sample_rate.is_finite() {
            return Err(invalid("trace.sample_rate", "must be > 0"));
        }
        if !(self.duration > T::zero()) || !self.duration.is_finite() {
            return Err(invalid("trace.duration", "must be > 0"));
        }
        if self.sweeps == 0 {
            return Err(invalid("trace.sweeps", "must be >= 1"));
        }
        if !(self.rbw > T::zero()) || !self.rbw.is_finite() {
            return Err(invalid("trace.rbw", "must be > 0"));
        }
        if !(self.vbw > T::zero()) {
            return Err(invalid("trace.vbw", "must be > 0"));
        }
        if self.electronic_floor_db.is_nan() || self.electronic_floor_db == T::infinity() {
            return Err(invalid(
                "trace.electronic_floor_db",
                "must be a finite dB value or -inf",
            ));
        }
        let n = self.samples_per_sweep();
        if n < 2 || self.rbw < self.sample_rate / T::from_usize(n).unwrap() {
            return Err(invalid(
                "trace.rbw",
                format!(
                    "{} Hz is finer than sample_rate/samples_per_sweep = {} Hz",
                    self.rbw,
                    self.sample_rate / T::from_usize(n.max(1)).unwrap()
                ),
            ));
        }
        Ok(())
    }

    pub fn samples_per_sweep(&self) -> usize {
        (self.sample_rate * self.duration).round().to_usize().unwrap_or(0)
    }

    /// Segment length whose Hann ENBW matches the RBW.
    pub fn segment_len(&self) -> usize {
        let n = (T::lit(HANN_ENBW_BINS) * self.sample_rate / self.rbw)
            .round()
            .to_usize()
            .unwrap_or(0);
        n.max(4)
    }

    /// RBW actually realized after rounding the segment length.
    pub fn effective_rbw(&self) -> T {
        T::lit(HANN_ENBW_BINS) * self.sample_rate / T::from_usize(self.segment_len()).unwrap()
    }

    /// Segments per VBW moving-average window.
    pub fn vbw_span(&self) -> usize {
        (self.rbw / self.vbw).round().to_usize().unwrap_or(1).max(1)
    }

    pub fn nyquist(&self) -> T {
        self.sample_rate / T::lit(2.0)
    }

    /// Errors unless `max_frequency` is strictly below Nyquist.
    pub fn check_band(&self, max_frequency: T) -> Result<()> {
        if !(self.sample_rate > T::lit(2.0) * max_frequency) {
            return Err(Error::UnderSampled(format!(
                "sample rate {} Hz cannot represent {} Hz",
                self.sample_rate, max_frequency
            )));
        }
        Ok(())
    }
}

/// A deterministic sinusoid added to the photocurrent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tone<T> {
    /// Hz.
    pub frequency: T,
    /// Peak amplitude in shot-noise-normalized current units.
    pub amplitude: T,
}

impl<T: Real> Tone<T> {
    /// Tone whose power in one RBW bin is `db` relative to the shot-noise power in that bin.
    pub fn from_rel_shot_db(frequency: T, db: T, cfg: &TraceConfig<T>) -> Self {
        // A²/2 = ratio · RBW · (2/fs)
        let amplitude = (T::lit(4.0) * cfg.effective_rbw() * db_to_ratio(db) / cfg.sample_rate).sqrt();
        Self { frequency, amplitude }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotocurrentTrace<T> {
    pub samples: Vec<T>,
    pub sample_rate: T,
}

impl<T: Real> PhotocurrentTrace<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> T {
        let n = T::from_usize(self.samples.len()).unwrap();
        self.samples.iter().fold(T::zero(), |a, &x| a + x) / n
    }

    /// Population variance.
    pub fn variance(&self) -> T {
        let m = self.mean();
        let n = T::from_usize(self.samples.len()).unwrap();
        self.samples.iter().fold(T::zero(), |a, &x| a + (x - m) * (x - m)) / n
    }
}

/// Precomputed FFT plans and spectral mask for one (config, target) pair.
struct Synthesizer<T: SimReal> {
    cfg: TraceConfig<T>,
    total_len: usize,
    discard: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    mask: Vec<T>,
    electronic_std: T,
}

impl<T: SimReal> Synthesizer<T> {
    fn new(cfg: &TraceConfig<T>, target: &SpectrumTrace<T>, tone: Option<&Tone<T>>) -> Result<Self> {
        cfg.validate()?;
        let top = *target.frequencies().last().expect("trace is non-empty");
        if top > cfg.nyquist() * T::lit(1.0 + 1e-9) {
            return Err(Error::UnderSampled(format!(
                "target extends to {} Hz beyond Nyquist {} Hz",
                top,
                cfg.nyquist()
            )));
        }
        if let Some(t) = tone {
            cfg.check_band(t.frequency)?;
            if !(t.frequency >= T::zero()) || !t.amplitude.is_finite() {
                return Err(invalid("tone", "frequency must be >= 0 and amplitude finite"));
            }
        }
        let n = cfg.samples_per_sweep();
        let discard = cfg.segment_len();
        let total_len = n + discard;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(total_len);
        let inverse = planner.plan_fft_inverse(total_len);
        let df = cfg.sample_rate / T::from_usize(total_len).unwrap();
        let mask = (0..total_len)
            .map(|k| {
                let bin = k.min(total_len - k);
                target.linear_at(df * T::from_usize(bin).unwrap()).sqrt()
            })
            .collect();
        Ok(Self {
            cfg: *cfg,
            total_len,
            discard,
            forward,
            inverse,
            mask,
            electronic_std: db_to_ratio(cfg.electronic_floor_db).sqrt(),
        })
    }

    fn sweep(&self, index: u64, tone: Option<&Tone<T>>) -> PhotocurrentTrace<T> {
        let mut rng = ChaCha20Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(index);
        let mut buf: Vec<Complex<T>> = (0..self.total_len)
            .map(|_| Complex::new(normal(&mut rng), T::zero()))
            .collect();
        self.forward.process(&mut buf);
        for (c, &m) in buf.iter_mut().zip(&self.mask) {
            *c = *c * m;
        }
        self.inverse.process(&mut buf);
        let scale = T::one() / T::from_usize(self.total_len).unwrap();
        let mut samples: Vec<T> = buf[self.discard..].iter().map(|c| c.re * scale).collect();

        if self.electronic_std > T::zero() {
            for s in samples.iter_mut() {
                *s = *s + self.electronic_std * normal::<T>(&mut rng);
            }
        }
        if let Some(t) = tone {
            let w = T::TAU() * t.frequency / self.cfg.sample_rate;
            for (i, s) in samples.iter_mut().enumerate() {
                *s = *s + t.amplitude * (w * T::from_usize(i).unwrap()).cos();
            }
        }
        PhotocurrentTrace {
            samples,
            sample_rate: self.cfg.sample_rate,
        }
    }
}

fn normal<T: Real>(rng: &mut ChaCha20Rng) -> T {
    let x: f64 = rng.sample(StandardNormal);
    T::lit(x)
}

/// One sweep of Gaussian noise whose one-sided PSD follows `target`
/// (linear interpolation in power, held flat beyond its ends), plus the
/// electronic floor and an optional tone.
pub fn synthesize_trace<T: SimReal>(
    cfg: &TraceConfig<T>,
    target: &SpectrumTrace<T>,
    tone: Option<&Tone<T>>,
) -> Result<PhotocurrentTrace<T>> {
    synthesize_sweep(cfg, target, tone, 0)
}

/// Like [`synthesize_trace`] for sweep number `index`; each index draws an independent stream.
pub fn synthesize_sweep<T: SimReal>(
    cfg: &TraceConfig<T>,
    target: &SpectrumTrace<T>,
    tone: Option<&Tone<T>>,
    index: u64,
) -> Result<PhotocurrentTrace<T>> {
    Ok(Synthesizer::new(cfg, target, tone)?.sweep(index, tone))
}

/// One-sided power spectral density, units²/Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate<T> {
    pub frequencies: Vec<T>,
    pub density: Vec<T>,
    pub sample_rate: T,
    /// Periodograms averaged into this estimate.
    pub segments: usize,
}

impl<T: Real> PsdEstimate<T> {
    pub fn bin_width(&self) -> T {
        self.sample_rate / T::from_usize(2 * (self.frequencies.len() - 1)).unwrap()
    }

    /// `Σ density · Δf`; equals the variance of the input for a real signal.
    pub fn integrated_power(&self) -> T {
        self.density.iter().fold(T::zero(), |a, &d| a + d) * self.bin_width()
    }

    /// Density relative to unit-variance white noise (2/fs), in dB.
    pub fn to_trace(&self, label: TraceLabel) -> Result<SpectrumTrace<T>> {
        let reference = T::lit(2.0) / self.sample_rate;
        let values = self
            .density
            .iter()
            .map(|&d| T::lit(10.0) * (d / reference).log10())
            .collect();
        SpectrumTrace::new(self.frequencies.clone(), values, label)
    }
}

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / n as f64).cos())
        .collect()
}

struct Estimator<T: SimReal> {
    seg: usize,
    hop: usize,
    window: Vec<T>,
    scale: T,
    fft: Arc<dyn Fft<T>>,
    vbw_span: usize,
}

impl<T: SimReal> Estimator<T> {
    fn new(cfg: &TraceConfig<T>) -> Self {
        let seg = cfg.segment_len();
        let w = hann(seg);
        let s2: f64 = w.iter().map(|x| x * x).sum();
        let scale = T::one() / (cfg.sample_rate * T::lit(s2));
        Self {
            seg,
            hop: seg / 2,
            window: w.into_iter().map(T::lit).collect(),
            scale,
            fft: FftPlanner::new().plan_fft_forward(seg),
            vbw_span: cfg.vbw_span(),
        }
    }

    fn estimate(&self, trace: &PhotocurrentTrace<T>) -> Result<PsdEstimate<T>> {
        let n = trace.samples.len();
        if n < self.seg {
            return Err(Error::InsufficientSamples {
                needed: self.seg,
                available: n,
            });
        }
        let segments = (n - self.seg) / self.hop + 1;
        let bins = self.seg / 2 + 1;
        let mut buf = vec![Complex::new(T::zero(), T::zero()); self.seg];
        let periodograms: Vec<Vec<T>> = (0..segments)
            .map(|s| {
                let chunk = &trace.samples[s * self.hop..s * self.hop + self.seg];
                for ((b, &x), &w) in buf.iter_mut().zip(chunk).zip(&self.window) {
                    *b = Complex::new(x * w, T::zero());
                }
                self.fft.process(&mut buf);
                (0..bins)
                    .map(|k| {
                        let p = buf[k].norm_sqr() * self.scale;
                        if k == 0 || 2 * k == self.seg {
                            p
                        } else {
                            p + p
                        }
                    })
                    .collect()
            })
            .collect();

        // Video filter: moving average over successive periodograms.
        let span = self.vbw_span.min(segments);
        let outputs = segments - span + 1;
        let mut weights = vec![0usize; segments];
        for start in 0..outputs {
            for w in &mut weights[start..start + span] {
                *w += 1;
            }
        }
        let norm = T::one() / T::from_usize(outputs * span).unwrap();
        let mut density = vec![T::zero(); bins];
        for (p, &w) in periodograms.iter().zip(&weights) {
            let w = T::from_usize(w).unwrap() * norm;
            for (d, &v) in density.iter_mut().zip(p) {
                *d = *d + v * w;
            }
        }
        let df = trace.sample_rate / T::from_usize(self.seg).unwrap();
        Ok(PsdEstimate {
            frequencies: (0..bins).map(|k| df * T::from_usize(k).unwrap()).collect(),
            density,
            sample_rate: trace.sample_rate,
            segments,
        })
    }
}

/// Single-sweep PSD estimate of `trace`.
pub fn estimate_psd<T: SimReal>(trace: &PhotocurrentTrace<T>, cfg: &TraceConfig<T>) -> Result<PsdEstimate<T>> {
    cfg.validate()?;
    if trace.sample_rate != cfg.sample_rate {
        return Err(invalid("trace.sample_rate", "trace and config sample rates differ"));
    }
    Estimator::new(cfg).estimate(trace)
}

/// Bin-wise mean of estimates taken with identical settings, in slice order.
pub fn average_estimates<T: Real>(estimates: &[PsdEstimate<T>]) -> Result<PsdEstimate<T>> {
    let first = estimates
        .first()
        .ok_or_else(|| invalid("estimates", "nothing to average"))?;
    if estimates.iter().any(|e| e.frequencies != first.frequencies) {
        return Err(invalid("estimates", "frequency grids differ"));
    }
    let k = T::from_usize(estimates.len()).unwrap();
    let mut density = vec![T::zero(); first.density.len()];
    for e in estimates {
        for (d, &v) in density.iter_mut().zip(&e.density) {
            *d = *d + v;
        }
    }
    density.iter_mut().for_each(|d| *d = *d / k);
    Ok(PsdEstimate {
        frequencies: first.frequencies.clone(),
        density,
        sample_rate: first.sample_rate,
        segments: estimates.iter().map(|e| e.segments).sum(),
    })
}

/// Synthesizes `cfg.sweeps` independent sweeps (in parallel), estimates
/// each, and averages them. Bit-identical for a fixed seed regardless of
/// thread scheduling.
pub fn simulate_psd<T: SimReal>(
    cfg: &TraceConfig<T>,
    target: &SpectrumTrace<T>,
    tone: Option<&Tone<T>>,
) -> Result<PsdEstimate<T>> {
    let synth = Synthesizer::new(cfg, target, tone)?;
    let est = Estimator::new(cfg);
    if cfg.samples_per_sweep() < est.seg {
        return Err(Error::InsufficientSamples {
            needed: est.seg,
            available: cfg.samples_per_sweep(),
        });
    }
    let per_sweep = (0..cfg.sweeps as u64)
        .into_par_iter()
        .map(|i| est.estimate(&synth.sweep(i, tone)))
        .collect::<Result<Vec<_>>>()?;
    average_estimates(&per_sweep)
}
