//! Fourth-order interference patterns versus detector position.
//!
//! The coincidence rate with the signal detector at `x_s` and the idler
//! detector at `x_i` is ⟨v|ρ|v⟩ with the amplitude vector
//! v = (r_{l_s}(x_s)·r_{l_i}(x_i)), using the stationary-phase kernels for
//! speed. For an entangled state the signal-side fringe pattern depends on
//! where the idler detector sits (conditionality); for a product state it
//! does not.

use nalgebra::Vector4;

use crate::geometry::{DetectorSlit, OpticalParams, Slit, SlitGeometry};
use crate::optics::overlap_r_closed;
use crate::states::{basis_index, DensityMatrix};
use crate::{par, Result, C64};

/// A scan of the coincidence rate over signal-detector positions at a fixed
/// idler position. Rates are normalized to a unit maximum.
#[derive(Debug, Clone)]
pub struct FringeScan {
    pub idler_x: f64,
    pub positions: Vec<f64>,
    pub rates: Vec<f64>,
}

/// Coincidence rate (arbitrary units) at one detector-position pair.
pub fn coincidence_rate(
    rho: &DensityMatrix,
    geom: &SlitGeometry,
    opt: &OpticalParams,
    detector_half_width: f64,
    x_signal: f64,
    x_idler: f64,
) -> f64 {
    let det_s = DetectorSlit {
        x: x_signal,
        b: detector_half_width,
    };
    let det_i = DetectorSlit {
        x: x_idler,
        b: detector_half_width,
    };
    let mut v = Vector4::<C64>::zeros();
    for ls in Slit::BOTH {
        let rs = overlap_r_closed(ls, &det_s, geom, opt);
        for li in Slit::BOTH {
            let ri = overlap_r_closed(li, &det_i, geom, opt);
            v[basis_index(ls, li)] = rs * ri;
        }
    }
    (v.adjoint() * rho.matrix() * v)[(0, 0)].re
}

/// Scan the signal detector over `[lo, hi]` with `points` samples.
pub fn scan(
    rho: &DensityMatrix,
    geom: &SlitGeometry,
    opt: &OpticalParams,
    detector_half_width: f64,
    idler_x: f64,
    range: (f64, f64),
    points: usize,
) -> Result<FringeScan> {
    if points < 2 {
        return Err(crate::Error::invalid("points", "need at least 2 samples"));
    }
    if !(range.1 > range.0) {
        return Err(crate::Error::invalid("range", "upper bound must exceed lower"));
    }
    let step = (range.1 - range.0) / (points - 1) as f64;
    let positions: Vec<f64> = (0..points).map(|i| range.0 + i as f64 * step).collect();
    let rho = rho.clone();
    let geom = *geom;
    let opt = *opt;
    let rates_raw = par::map_indexed(points, |i| {
        coincidence_rate(
            &rho,
            &geom,
            &opt,
            detector_half_width,
            range.0 + i as f64 * step,
            idler_x,
        )
    });
    let max = rates_raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let rates = if max > 0.0 {
        rates_raw.iter().map(|r| r / max).collect()
    } else {
        rates_raw
    };
    Ok(FringeScan {
        idler_x,
        positions,
        rates,
    })
}

/// Fringe visibility (max − min)/(max + min) within a window around x = 0.
pub fn visibility(scan: &FringeScan, window: f64) -> f64 {
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    for (x, r) in scan.positions.iter().zip(&scan.rates) {
        if x.abs() <= window {
            max = max.max(*r);
            min = min.min(*r);
        }
    }
    if max + min > 0.0 {
        (max - min) / (max + min)
    } else {
        0.0
    }
}

/// Lag of `b` relative to `a` maximizing their zero-padded cross-correlation,
/// searched over ±`max_lag`. Both scans must share their position grid.
/// Zero padding keeps the self-correlation maximal at lag zero, so identical
/// shapes always report a null shift.
pub fn peak_shift(a: &FringeScan, b: &FringeScan, max_lag: f64) -> f64 {
    assert_eq!(a.positions.len(), b.positions.len(), "grids must match");
    let n = a.rates.len();
    let step = a.positions[1] - a.positions[0];
    let lag_max = (max_lag / step).floor() as i64;
    let mut best = (f64::NEG_INFINITY, 0i64);
    for lag in -lag_max..=lag_max {
        let mut corr = 0.0;
        for i in 0..n {
            let j = i as i64 + lag;
            if j >= 0 && (j as usize) < n {
                corr += a.rates[i] * b.rates[j as usize];
            }
        }
        // ties (flat maxima) resolve to the smallest |lag|
        if corr > best.0 + 1e-12 || (corr > best.0 - 1e-12 && lag.abs() < best.1.abs()) {
            best = (corr, lag);
        }
    }
    best.1 as f64 * step
}

/// Full width at half maximum of the central peak of a scan.
pub fn fwhm_central_peak(scan: &FringeScan) -> f64 {
    let n = scan.rates.len();
    // highest sample, ties broken toward the center of the scan
    let mut peak = 0usize;
    for i in 1..n {
        let better = scan.rates[i] > scan.rates[peak] + 1e-12;
        let tie_closer = (scan.rates[i] - scan.rates[peak]).abs() <= 1e-12
            && scan.positions[i].abs() < scan.positions[peak].abs();
        if better || tie_closer {
            peak = i;
        }
    }
    let base = scan
        .rates
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
        .max(0.0);
    let half = base + 0.5 * (scan.rates[peak] - base);

    let cross = |i0: usize, i1: usize| -> f64 {
        // linear interpolation of the half-max crossing between two samples
        let (r0, r1) = (scan.rates[i0], scan.rates[i1]);
        let (x0, x1) = (scan.positions[i0], scan.positions[i1]);
        if (r1 - r0).abs() < 1e-300 {
            x0
        } else {
            x0 + (half - r0) / (r1 - r0) * (x1 - x0)
        }
    };

    let mut left = scan.positions[0];
    for i in (1..=peak).rev() {
        if scan.rates[i - 1] < half && scan.rates[i] >= half {
            left = cross(i - 1, i);
            break;
        }
    }
    let mut right = scan.positions[n - 1];
    for i in peak..n - 1 {
        if scan.rates[i] >= half && scan.rates[i + 1] < half {
            right = cross(i, i + 1);
            break;
        }
    }
    right - left
}
