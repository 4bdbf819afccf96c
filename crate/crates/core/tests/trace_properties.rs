use squeezelab::gaussian::db_to_ratio;
use squeezelab::spectrum::{
    detected_spectrum, linear_grid, DetectionChain, OpaOperatingPoint, SpectrumTrace, TraceLabel,
};
use squeezelab::trace::{estimate_psd, simulate_psd, synthesize_sweep, synthesize_trace, Tone, TraceConfig};

fn cfg(sweeps: usize, seed: u64) -> TraceConfig<f64> {
    TraceConfig {
        sample_rate: 10.0e6,
        duration: 2.0e-3,
        sweeps,
        rbw: 30.0e3,
        vbw: 10.0e3,
        seed,
        electronic_floor_db: f64::NEG_INFINITY,
    }
}

fn shot_noise(c: &TraceConfig<f64>) -> SpectrumTrace<f64> {
    SpectrumTrace::flat(vec![0.0, c.nyquist()], 0.0, TraceLabel::ShotNoise).unwrap()
}

fn squeezed_target(c: &TraceConfig<f64>) -> SpectrumTrace<f64> {
    let op = OpaOperatingPoint {
        pump_power: 0.130,
        threshold_power: 0.145,
        cavity_hwhm: 1.0e6,
    };
    let chain = DetectionChain {
        escape_efficiency: 1.0,
        quantum_efficiency: 0.95,
        homodyne_contrast: 0.96,
        propagation_efficiency: 0.94,
        phase_jitter_rms: 0.03,
    };
    let grid = linear_grid(0.0, c.nyquist(), 5.0e3);
    detected_spectrum(&op, &chain, &grid).unwrap()
}

#[test]
fn white_noise_reads_zero_db() {
    let c = cfg(16, 1);
    let est = simulate_psd(&c, &shot_noise(&c), None).unwrap();
    let tr = est.to_trace(TraceLabel::ShotNoise).unwrap();
    let inner: Vec<f64> = tr.values_db()[1..tr.len() - 1].to_vec();
    let mean_lin = inner.iter().map(|&d| db_to_ratio(d)).sum::<f64>() / inner.len() as f64;
    assert!((10.0 * mean_lin.log10()).abs() < 0.02, "{mean_lin}");
    // ~16·39 averages per bin → σ ≈ 0.18 dB
    assert!(inner.iter().all(|d| d.abs() < 1.0));
}

#[test]
fn parseval_within_one_percent() {
    for (i, target) in [shot_noise(&cfg(1, 0)), squeezed_target(&cfg(1, 0))].iter().enumerate() {
        for seed in 0..3u64 {
            let c = cfg(1, seed + 10 * i as u64);
            let trace = synthesize_trace(&c, target, None).unwrap();
            let est = estimate_psd(&trace, &c).unwrap();
            let (p, v) = (est.integrated_power(), trace.variance());
            assert!(((p - v) / v).abs() < 0.01, "target {i} seed {seed}: {p} vs {v}");
        }
    }
}

#[test]
fn estimator_variance_scales_inverse_with_sweeps() {
    let c0 = TraceConfig {
        duration: 0.3e-3,
        ..cfg(1, 0)
    };
    let counts = [1usize, 4, 16, 64];
    let mut points = Vec::new();
    for &k in &counts {
        let c = TraceConfig { sweeps: k, ..c0 };
        let est = simulate_psd(&c, &shot_noise(&c), None).unwrap();
        let r: Vec<f64> = est.to_trace(TraceLabel::ShotNoise).unwrap().values_db()[2..est.density.len() - 2]
            .iter()
            .map(|&d| db_to_ratio(d))
            .collect();
        let m = r.iter().sum::<f64>() / r.len() as f64;
        let var = r.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (r.len() - 1) as f64;
        points.push(((k as f64).ln(), var.ln()));
    }
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 1.0).abs() < 0.15, "log-log slope {slope}, points {points:?}");
}

#[test]
fn fixed_seed_is_bit_identical() {
    let c = cfg(8, 42);
    let target = squeezed_target(&c);
    let tone = Tone::from_rel_shot_db(1.2e6, -1.0, &c);
    let a = simulate_psd(&c, &target, Some(&tone)).unwrap();
    let b = simulate_psd(&c, &target, Some(&tone)).unwrap();
    assert_eq!(a, b);
    let t1 = synthesize_sweep(&c, &target, None, 3).unwrap();
    let t2 = synthesize_sweep(&c, &target, None, 3).unwrap();
    assert_eq!(t1.samples, t2.samples);
    let other = synthesize_sweep(&c, &target, None, 4).unwrap();
    assert_ne!(t1.samples, other.samples);
    let reseeded = simulate_psd(&TraceConfig { seed: 43, ..c }, &target, Some(&tone)).unwrap();
    assert_ne!(a.density, reseeded.density);
}

#[test]
fn tone_changes_psd_only_near_its_frequency() {
    let c = cfg(4, 5);
    let target = squeezed_target(&c);
    let plain = simulate_psd(&c, &target, None).unwrap();
    // 1.2 MHz is an exact bin of the 500-point segments (20 kHz spacing).
    let tone = Tone::from_rel_shot_db(1.2e6, -1.0, &c);
    let toned = simulate_psd(&c, &target, Some(&tone)).unwrap();
    let rbw = c.effective_rbw();
    for ((f, a), b) in plain.frequencies.iter().zip(&plain.density).zip(&toned.density) {
        let rel = ((b - a) / a).abs();
        if (f - 1.2e6).abs() > 2.0 * rbw {
            assert!(rel < 1e-9, "{f} Hz changed by {rel}");
        }
    }
    let k = (1.2e6 / plain.bin_width()).round() as usize;
    assert!(toned.density[k] > plain.density[k] * 1.3);
}

#[test]
fn synthesized_spectrum_tracks_target() {
    let c = cfg(32, 9);
    let target = squeezed_target(&c);
    let est = simulate_psd(&c, &target, None).unwrap();
    let tr = est.to_trace(TraceLabel::SqueezedQuadrature).unwrap();
    for (f, v) in tr.iter().filter(|(f, _)| *f > 0.2e6 && *f < 4.8e6) {
        let expect = 10.0 * target.linear_at(f).log10();
        // 32·39 averages: σ ≈ 0.13 dB
        assert!((v - expect).abs() < 0.6, "{f}: {v} vs {expect}");
    }
}
