//! Gaussian-channel capacities versus mean signal photon number.

use std::fmt;
use std::io::{self, Write};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec<T> {
    /// Signal variance V_S, shot-noise units.
    pub signal_variance: T,
    /// Noise variance V_N, shot-noise units.
    pub noise_variance: T,
    pub squeeze_r: T,
}

/// `½ log₂(1 + V_S/V_N)`.
pub fn capacity_generic<T: Real>(spec: &ChannelSpec<T>) -> Result<T> {
    if !(spec.signal_variance >= T::zero()) {
        return Err(invalid("signal_variance", "must be >= 0"));
    }
    if !(spec.noise_variance > T::zero()) {
        return Err(invalid("noise_variance", "must be > 0"));
    }
    Ok(half_log2_1p(spec.signal_variance / spec.noise_variance))
}

fn half_log2_1p<T: Real>(x: T) -> T {
    x.ln_1p() / (T::lit(2.0) * T::LN_2())
}

/// `n̄ = ¼(V₀ + V_{π/2}) − ½`.
pub fn nbar_from_variances<T: Real>(v0: T, vpi2: T) -> Result<T> {
    if !(v0 >= T::zero() && vpi2 >= T::zero()) {
        return Err(invalid("variance", "quadrature variances must be >= 0"));
    }
    let n = (v0 + vpi2) / T::lit(4.0) - T::lit(0.5);
    if n < T::zero() {
        return Err(Error::NonPhysical(format!(
            "variances ({v0}, {vpi2}) give negative photon number {n}"
        )));
    }
    Ok(n)
}

fn check_nbar<T: Real>(nbar: T) -> Result<()> {
    if !(nbar >= T::zero()) || !nbar.is_finite() {
        return Err(invalid("nbar", format!("must be finite and >= 0, got {nbar}")));
    }
    Ok(())
}

fn check_r<T: Real>(r: T) -> Result<()> {
    if !(r >= T::zero()) {
        return Err(invalid("squeeze_r", format!("must be >= 0, got {r}")));
    }
    Ok(())
}

/// Coherent encoding, coherent detection: `½ log₂(1 + 4n̄)`.
pub fn capacity_coherent<T: Real>(nbar: T) -> Result<T> {
    check_nbar(nbar)?;
    Ok(half_log2_1p(T::lit(4.0) * nbar))
}

/// Coherent encoding read out against squeezed noise: `½ log₂(1 + 4e^{2r}n̄)`.
pub fn capacity_coherent_squeezed_detection<T: Real>(nbar: T, r: T) -> Result<T> {
    check_nbar(nbar)?;
    check_r(r)?;
    Ok(half_log2_1p(T::lit(4.0) * (r + r).exp() * nbar))
}

/// Signal encoded on a squeezed beam: `½ log₂[1 + 4e^{2r}(n̄ − sinh²r)]`, requires `n̄ > sinh²r`.
pub fn capacity_squeezed_encoding<T: Real>(nbar: T, r: T) -> Result<T> {
    check_nbar(nbar)?;
    check_r(r)?;
    let sh = r.sinh();
    let squeeze_photons = sh * sh;
    if r > T::zero() && !(nbar > squeeze_photons) {
        return Err(Error::NonPhysical(format!(
            "n̄ = {nbar} must exceed sinh²r = {squeeze_photons} for an encoded signal"
        )));
    }
    Ok(half_log2_1p(T::lit(4.0) * (r + r).exp() * (nbar - squeeze_photons)))
}

/// `(1+n̄)log₂(1+n̄) − n̄ log₂ n̄`, continuous at n̄ = 0.
pub fn holevo_bound<T: Real>(nbar: T) -> Result<T> {
    check_nbar(nbar)?;
    if nbar == T::zero() {
        return Ok(T::zero());
    }
    let one = T::one() + nbar;
    Ok(one * one.log2() - nbar * nbar.log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Coherent,
    CoherentWithSqueezedDetection,
    SqueezedEncoding,
    Holevo,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] = [
        BoundKind::Coherent,
        BoundKind::CoherentWithSqueezedDetection,
        BoundKind::SqueezedEncoding,
        BoundKind::Holevo,
    ];
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Coherent => "Coherent",
            BoundKind::CoherentWithSqueezedDetection => "CoherentWithSqueezedDetection",
            BoundKind::SqueezedEncoding => "SqueezedEncoding",
            BoundKind::Holevo => "Holevo",
        })
    }
}

/// Capacity versus n̄; `None` marks grid points outside a bound's domain.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityCurve<T> {
    pub nbar_grid: Vec<T>,
    pub capacities: Vec<Option<T>>,
    pub bound_kind: BoundKind,
}

pub fn capacity_for<T: Real>(kind: BoundKind, nbar: T, r: T) -> Result<T> {
    match kind {
        BoundKind::Coherent => capacity_coherent(nbar),
        BoundKind::CoherentWithSqueezedDetection => capacity_coherent_squeezed_detection(nbar, r),
        BoundKind::SqueezedEncoding => capacity_squeezed_encoding(nbar, r),
        BoundKind::Holevo => holevo_bound(nbar),
    }
}

/// All four curves over `nbar_grid` (positive, strictly increasing).
pub fn curve_suite<T: Real>(nbar_grid: &[T], r: T) -> Result<Vec<CapacityCurve<T>>> {
    check_r(r)?;
    if nbar_grid.iter().any(|&n| !(n > T::zero())) {
        return Err(invalid("nbar_grid", "all points must be > 0"));
    }
    if nbar_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("nbar_grid", "must be strictly increasing"));
    }
    BoundKind::ALL
        .iter()
        .map(|&kind| {
            let capacities = nbar_grid
                .iter()
                .map(|&n| match capacity_for(kind, n, r) {
                    Ok(c) => Ok(Some(c)),
                    Err(Error::NonPhysical(_)) if kind == BoundKind::SqueezedEncoding => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CapacityCurve {
                nbar_grid: nbar_grid.to_vec(),
                capacities,
                bound_kind: kind,
            })
        })
        .collect()
}

/// `points` log-spaced values from `min` to `max` inclusive.
pub fn log_grid<T: Real>(min: T, max: T, points: usize) -> Result<Vec<T>> {
    if !(min > T::zero() && max > min) || points < 2 {
        return Err(invalid("nbar grid", "need 0 < min < max and at least 2 points"));
    }
    let (a, b) = (min.ln(), max.ln());
    let step = (b - a) / T::from_usize(points - 1).unwrap();
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                max
            } else {
                (a + step * T::from_usize(i).unwrap()).exp()
            }
        })
        .collect())
}

/// Writes `nbar,capacity_bits,bound_kind`; absent points leave the capacity field empty.
pub fn write_csv<T: Real, W: Write>(out: &mut W, curves: &[CapacityCurve<T>]) -> io::Result<()> {
    writeln!(out, "nbar,capacity_bits,bound_kind")?;
    for curve in curves {
        for (n, c) in curve.nbar_grid.iter().zip(&curve.capacities) {
            match c {
                Some(c) => writeln!(out, "{},{},{}", n, c, curve.bound_kind)?,
                None => writeln!(out, "{},,{}", n, curve.bound_kind)?,
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const R_32DB: f64 = 0.3776;

    #[test]
    fn generic_examples() {
        let spec = |s, n| ChannelSpec {
            signal_variance: s,
            noise_variance: n,
            squeeze_r: 0.0,
        };
        assert_eq!(capacity_generic(&spec(0.0, 1.0)).unwrap(), 0.0);
        assert_relative_eq!(capacity_generic(&spec(3.0, 1.0)).unwrap(), 1.0, epsilon = 1e-15);
        let c = capacity_generic(&spec(4.0, 0.47)).unwrap();
        assert_relative_eq!(c, 0.5 * (1.0f64 + 4.0 / 0.47).log2(), epsilon = 1e-14);
        assert!((c - 1.625).abs() < 1e-3);
        assert!(capacity_generic(&spec(1.0, 0.0)).is_err());
    }

    #[test]
    fn nbar_examples() {
        assert_eq!(nbar_from_variances(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(nbar_from_variances(3.0, 1.0).unwrap(), 0.5);
        let (e, ei) = ((2.0 * R_32DB).exp(), (-2.0 * R_32DB).exp());
        let n = nbar_from_variances(ei, e).unwrap();
        assert_relative_eq!(n, R_32DB.sinh().powi(2), epsilon = 1e-14);
        assert!((n - 0.1502).abs() < 1e-3);
        assert!(nbar_from_variances(0.5, 0.5).is_err());
    }

    #[test]
    fn coherent_examples() {
        assert_eq!(capacity_coherent(0.0).unwrap(), 0.0);
        assert!(f64::abs(capacity_coherent(1.0).unwrap() - 1.161) < 1e-3);
        assert!(f64::abs(capacity_coherent(2.0).unwrap() - 1.585) < 1e-3);
    }

    #[test]
    fn squeezed_detection_examples() {
        for n in [0.0, 0.3, 5.0] {
            assert_eq!(
                capacity_coherent_squeezed_detection(n, 0.0).unwrap(),
                capacity_coherent(n).unwrap()
            );
            assert_eq!(capacity_coherent_squeezed_detection(0.0, 0.7).unwrap(), 0.0);
        }
        let r = -(0.47f64).ln() / 2.0;
        let c = capacity_coherent_squeezed_detection(1.0, r).unwrap();
        assert_relative_eq!(c, 0.5 * (9.5106f64).log2(), epsilon = 1e-4);
        assert!((c - 1.625).abs() < 1e-3);
    }

    #[test]
    fn squeezed_encoding_examples() {
        for n in [0.0, 0.3, 5.0] {
            assert_eq!(
                capacity_squeezed_encoding(n, 0.0).unwrap(),
                capacity_coherent(n).unwrap()
            );
        }
        let c = capacity_squeezed_encoding(1.0, R_32DB).unwrap();
        assert!((c - 1.521).abs() < 1e-3, "{c}");
        let edge = R_32DB.sinh().powi(2);
        let c = capacity_squeezed_encoding(edge * (1.0 + 1e-9), R_32DB).unwrap();
        assert!(c < 1e-8);
        assert!(matches!(
            capacity_squeezed_encoding(edge * 0.9, R_32DB),
            Err(Error::NonPhysical(_))
        ));
    }

    #[test]
    fn holevo_examples() {
        assert_eq!(holevo_bound(0.0).unwrap(), 0.0);
        assert_relative_eq!(holevo_bound(1.0).unwrap(), 2.0, epsilon = 1e-15);
        let h = holevo_bound(3.0).unwrap();
        assert_relative_eq!(h, 8.0 - 3.0 * 3.0f64.log2(), epsilon = 1e-14);
        assert!((h - 3.245).abs() < 1e-3);
        assert!(holevo_bound(1e-300).unwrap() >= 0.0);
    }

    #[test]
    fn suite_coincides_without_squeezing() {
        let grid = log_grid(0.01, 10.0, 50).unwrap();
        let curves = curve_suite(&grid, 0.0).unwrap();
        assert_eq!(curves.len(), 4);
        for i in 0..grid.len() {
            let c = curves[0].capacities[i].unwrap();
            assert_eq!(curves[1].capacities[i], Some(c));
            assert_eq!(curves[2].capacities[i], Some(c));
        }
    }

    #[test]
    fn suite_marks_encoding_domain() {
        let grid = log_grid(0.01, 10.0, 50).unwrap();
        let curves = curve_suite(&grid, R_32DB).unwrap();
        let edge = R_32DB.sinh().powi(2);
        for (n, c) in grid.iter().zip(&curves[2].capacities) {
            assert_eq!(c.is_some(), *n > edge);
        }
        let mut buf = Vec::new();
        write_csv(&mut buf, &curves).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("nbar,capacity_bits,bound_kind\n"));
        assert!(text.lines().any(|l| l.contains(",,SqueezedEncoding")));
        assert_eq!(text.lines().count(), 1 + 4 * 50);
    }

    #[test]
    fn suite_rejects_bad_grid() {
        assert!(curve_suite(&[0.0, 1.0], 0.1).is_err());
        assert!(curve_suite(&[2.0, 1.0], 0.1).is_err());
    }

    #[test]
    fn ordering_on_plot_grid() {
        let grid = log_grid(0.01, 10.0, 400).unwrap();
        for &n in &grid {
            let coh = capacity_coherent(n).unwrap();
            let det = capacity_coherent_squeezed_detection(n, R_32DB).unwrap();
            let h = holevo_bound(n).unwrap();
            assert!(coh < det && det < h, "n̄ = {n}");
        }
    }

    #[test]
    fn holevo_dominates_physical_photon_budgets() {
        // The squeezed-encoding n̄ counts every photon in the beam, so it is
        // bounded by Holevo for any r. The squeezed-detection n̄ excludes the
        // photons of the squeezed resource; at r = 1 that curve exceeds the
        // bound (e.g. ½log₂(1+4e²) ≈ 2.47 > 2 at n̄ = 1).
        let grid = log_grid(0.01, 10.0, 400).unwrap();
        for r in [0.0, R_32DB, 1.0] {
            for &n in &grid {
                let h = holevo_bound(n).unwrap();
                assert!(capacity_coherent(n).unwrap() <= h);
                if let Ok(c) = capacity_squeezed_encoding(n, r) {
                    assert!(c <= h, "r = {r}, n̄ = {n}");
                }
                if r < 0.5 {
                    assert!(capacity_coherent_squeezed_detection(n, r).unwrap() <= h);
                }
            }
        }
        assert!(capacity_coherent_squeezed_detection(1.0, 1.0).unwrap() > holevo_bound(1.0).unwrap());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(0.01, 10.0, 4).unwrap();
        assert_relative_eq!(g[0], 0.01);
        assert_relative_eq!(g[1], 0.1, max_relative = 1e-12);
        assert_eq!(g[3], 10.0);
    }

    proptest! {
        #[test]
        fn capacities_nondecreasing(n in 0.0f64..50.0, dn in 0.0f64..5.0, r in 0.0f64..1.5) {
            for kind in BoundKind::ALL {
                if let (Ok(a), Ok(b)) = (capacity_for(kind, n, r), capacity_for(kind, n + dn, r)) {
                    prop_assert!(b >= a - 1e-12, "{kind}");
                }
            }
        }

        #[test]
        fn detection_beats_encoding(n in 0.0f64..50.0, r in 1e-3f64..1.5) {
            if let Ok(enc) = capacity_squeezed_encoding(n, r) {
                prop_assert!(capacity_coherent_squeezed_detection(n, r).unwrap() >= enc);
            }
        }

        #[test]
        fn generic_matches_coherent(n in 0.0f64..100.0) {
            let spec = ChannelSpec { signal_variance: 4.0 * n, noise_variance: 1.0, squeeze_r: 0.0 };
            prop_assert_eq!(capacity_generic(&spec).unwrap(), capacity_coherent(n).unwrap());
        }
    }
}
