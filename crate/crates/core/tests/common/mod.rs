//! Shared fixtures and independent brute-force oracles for the integration
//! and acceptance suites. The oracles are written directly from the defining
//! integrals and share nothing with the library's quadrature path except the
//! truncation window, so a disagreement means a quadrature bug rather than a
//! differing convention.

#![allow(dead_code)]

use nalgebra::Matrix4;
use num_complex::Complex;
use slitomo_core::geometry::{DetectorSlit, OpticalParams, SlitGeometry};
use slitomo_core::par;
use slitomo_core::states::{DensityMatrix, PureState2Q};
use slitomo_core::C64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The reconstructed density matrix reported by the experiment this crate
/// models (non-physical: one Schwarz violation, one negative eigenvalue).
pub fn measured_matrix() -> DensityMatrix {
    let rows = [
        [c(0.028, 0.0), c(0.083, 0.004), c(0.081, 0.005), c(-0.129, 0.062)],
        [c(0.083, -0.004), c(0.468, 0.0), c(0.444, -0.058), c(0.097, -0.008)],
        [c(0.081, -0.005), c(0.444, 0.058), c(0.462, 0.0), c(0.096, -0.006)],
        [c(-0.129, -0.062), c(0.097, 0.008), c(0.096, 0.006), c(0.042, 0.0)],
    ];
    let mut m = Matrix4::<C64>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = rows[i][j];
        }
    }
    DensityMatrix::new(m).unwrap()
}

/// Upper-triangle entries of [`measured_matrix`] in OFFDIAG_PAIRS order.
pub fn measured_offdiagonals() -> [C64; 6] {
    [
        c(0.083, 0.004),
        c(0.081, 0.005),
        c(-0.129, 0.062),
        c(0.444, -0.058),
        c(0.097, -0.008),
        c(0.096, -0.006),
    ]
}

/// Dominant component of the measured two-component fit (common phase 4.2).
pub fn fitted_dominant_component() -> PureState2Q {
    let phase = Complex::from_polar(1.0, 4.2);
    PureState2Q::new([
        c(0.077, 0.0) * phase,
        c(0.704, 0.0) * phase,
        c(0.699, 0.0) * phase,
        c(0.099, 0.0) * phase,
    ])
    .unwrap()
}

/// Minor component of the measured fit (relative phase 0.07 on the cross
/// terms).
pub fn fitted_minor_component() -> PureState2Q {
    let t = Complex::from_polar(1.0, 0.07);
    PureState2Q::new([
        c(0.514, 0.0),
        c(0.502, 0.0) * t,
        c(0.501, 0.0) * t,
        c(0.483, 0.0),
    ])
    .unwrap()
}

/// Midpoint Riemann sum of a complex integrand, split into deterministic
/// chunks that may evaluate in parallel.
pub fn riemann_midpoint<F>(f: F, lo: f64, hi: f64, nodes: usize) -> C64
where
    F: Fn(f64) -> C64 + Sync + Send,
{
    let step = (hi - lo) / nodes as f64;
    let chunks = 256usize;
    let per_chunk = nodes.div_ceil(chunks);
    let partials = par::map_indexed(chunks, |chunk| {
        let start = chunk * per_chunk;
        let end = ((chunk + 1) * per_chunk).min(nodes);
        let mut sum = C64::new(0.0, 0.0);
        for i in start..end {
            let x = lo + (i as f64 + 0.5) * step;
            sum += f(x);
        }
        sum
    });
    partials.into_iter().sum::<C64>() * step
}

fn oracle_sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Dense-sum evaluation of the propagated slit mode
/// g_l(x) = √(a/2π²) ∫ dq e^{-iαq²} e^{-i l q d} sinc(qa) e^{iqx},
/// with l = ±1/2.
pub fn oracle_propagated_mode(
    geom: &SlitGeometry,
    opt: &OpticalParams,
    l_half: f64,
    x: f64,
    q_max: f64,
    nodes: usize,
) -> C64 {
    let a = geom.half_width();
    let d = geom.spacing();
    let alpha = opt.alpha();
    let prefactor = (a / (2.0 * std::f64::consts::PI * std::f64::consts::PI)).sqrt();
    riemann_midpoint(
        |q| {
            let phase = -alpha * q * q - l_half * q * d + q * x;
            Complex::from_polar(prefactor * oracle_sinc(q * a), phase)
        },
        -q_max,
        q_max,
        nodes,
    )
}

/// Dense-sum evaluation of the detector kernel
/// r_l(x) = (√(ab)/π) ∫ dq e^{-iαq²} e^{-i l q d} sinc(qa) sinc(qb) e^{iqx}.
pub fn oracle_detector_kernel(
    geom: &SlitGeometry,
    opt: &OpticalParams,
    l_half: f64,
    det: &DetectorSlit,
    q_max: f64,
    nodes: usize,
) -> C64 {
    let a = geom.half_width();
    let d = geom.spacing();
    let alpha = opt.alpha();
    let prefactor = (a * det.b).sqrt() / std::f64::consts::PI;
    riemann_midpoint(
        |q| {
            let phase = -alpha * q * q - l_half * q * d + q * det.x;
            Complex::from_polar(prefactor * oracle_sinc(q * a) * oracle_sinc(q * det.b), phase)
        },
        -q_max,
        q_max,
        nodes,
    )
}

/// The iterated form of the detector kernel: midpoint average of the
/// (adaptively integrated) propagated mode across the detector aperture,
/// normalized by 1/√(2b). Exercises the aperture-integration identity
/// against the one-pass q-space evaluation.
pub fn oracle_kernel_by_aperture_average(
    geom: &SlitGeometry,
    opt: &OpticalParams,
    slit: slitomo_core::geometry::Slit,
    det: &DetectorSlit,
    cfg: &slitomo_core::optics::OpticsConfig,
    nodes: usize,
) -> C64 {
    let lo = det.x - det.b;
    let step = 2.0 * det.b / nodes as f64;
    let partials = par::map_indexed(nodes, |i| {
        let x = lo + (i as f64 + 0.5) * step;
        slitomo_core::optics::propagate_slit_mode(slit, geom, opt, x, cfg).unwrap()
    });
    partials.into_iter().sum::<C64>() * step / (2.0 * det.b).sqrt()
}
