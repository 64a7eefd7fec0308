//! Pure-state generation from pump profiles and incoherent mixtures.
//!
//! The coefficient of the joint slit state |l⟩_s|m⟩_i is the pump transverse
//! amplitude sampled at the slit-pair midpoint (l+m)d/2, times the aperture
//! phase exp(i·k_pump·d²(m-l)²/8z_a). A pump focused to a spot much smaller
//! than d only feeds the midpoint x = 0 and yields the maximally entangled
//! (|+-⟩+|-+⟩)/√2; a broad pump feeds all four coefficients and yields the
//! four-term state with relative phase φ = k_pump·d²/8z_a. An unbalanced
//! interferometer in the pump path longer than the coherence length turns
//! the two arm states into an incoherent mixture, modeled by [`mix_states`].

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix4;
use num_complex::Complex;

use crate::error::Error;
use crate::geometry::{OpticalParams, Slit, SlitGeometry};
use crate::states::{basis_index, DensityMatrix, PureState2Q};
use crate::{Result, C64};

/// Pump transverse amplitude profile W(x) at the aperture plane.
#[derive(Clone)]
pub enum PumpProfile {
    /// Gaussian focused to `width` (field standard deviation, in meters);
    /// must be well below the slit spacing.
    Focused { width: f64 },
    /// Gaussian broadened to `width`; must cover all slit-pair midpoints.
    Broad { width: f64 },
    /// Arbitrary profile.
    Custom(Arc<dyn Fn(f64) -> C64 + Send + Sync>),
}

impl fmt::Debug for PumpProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PumpProfile::Focused { width } => write!(f, "Focused {{ width: {width} }}"),
            PumpProfile::Broad { width } => write!(f, "Broad {{ width: {width} }}"),
            PumpProfile::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl PumpProfile {
    pub fn amplitude(&self, x: f64) -> C64 {
        match self {
            PumpProfile::Focused { width } | PumpProfile::Broad { width } => {
                Complex::new((-x * x / (2.0 * width * width)).exp(), 0.0)
            }
            PumpProfile::Custom(f) => f(x),
        }
    }

    /// Validate the built-in width against the aperture geometry.
    pub fn validate(&self, geom: &SlitGeometry) -> Result<()> {
        match *self {
            PumpProfile::Focused { width } => {
                if !(width > 0.0 && width < geom.spacing() / 2.0) {
                    return Err(Error::invalid(
                        "pump.width",
                        format!(
                            "focused width {width} must lie in (0, d/2) with d = {}",
                            geom.spacing()
                        ),
                    ));
                }
            }
            PumpProfile::Broad { width } => {
                let min = geom.slit_count() as f64 * geom.spacing();
                if !(width >= min) {
                    return Err(Error::invalid(
                        "pump.width",
                        format!("broad width {width} must be at least D·d = {min}"),
                    ));
                }
            }
            PumpProfile::Custom(_) => {}
        }
        Ok(())
    }
}

/// Relative phase φ = k_pump·d²/(8 z_a) between the double-transmission and
/// cross-transmission coefficients.
pub fn arm_phase(geom: &SlitGeometry, opt: &OpticalParams) -> f64 {
    let d = geom.spacing();
    opt.k_pump() * d * d / (8.0 * geom.aperture_z())
}

/// Build the pure two-qubit state produced by `pump` behind the double slits.
///
/// The output is normalized and phase-canonicalized (largest coefficient
/// real-positive). Fails with [`Error::DegeneratePump`] when the profile
/// vanishes on every slit-pair midpoint.
pub fn generate_pure_state(
    pump: &PumpProfile,
    geom: &SlitGeometry,
    opt: &OpticalParams,
) -> Result<PureState2Q> {
    pump.validate(geom)?;
    let phi = arm_phase(geom, opt);
    let d = geom.spacing();
    let mut coeffs = [C64::new(0.0, 0.0); 4];
    for ls in Slit::BOTH {
        for li in Slit::BOTH {
            let midpoint = (ls.half() + li.half()) * d / 2.0;
            let diff = li.half() - ls.half();
            let phase = Complex::from_polar(1.0, phi * diff * diff);
            let w = pump.amplitude(midpoint);
            if !w.is_finite() {
                return Err(Error::invalid(
                    "pump",
                    format!("profile is not finite at x = {midpoint}"),
                ));
            }
            coeffs[basis_index(ls, li)] = w * phase;
        }
    }
    let norm_sqr: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if norm_sqr < 1e-280 {
        return Err(Error::DegeneratePump);
    }
    Ok(PureState2Q::new(coeffs)?.canonicalized())
}

/// Convex mixture ρ = Σ wᵢ |ψᵢ⟩⟨ψᵢ|.
pub fn mix_states(weights: &[f64], states: &[PureState2Q]) -> Result<DensityMatrix> {
    if weights.len() != states.len() {
        return Err(Error::WeightStateMismatch {
            weights: weights.len(),
            states: states.len(),
        });
    }
    if weights.is_empty() {
        return Err(Error::invalid("weights", "need at least one component"));
    }
    const TOL: f64 = 1e-9;
    if let Some(&w) = weights.iter().find(|&&w| w < 0.0) {
        return Err(Error::invalid(
            "weights",
            format!("negative weight {w} is not a probability"),
        ));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > TOL {
        return Err(Error::WeightSum {
            sum,
            tolerance: TOL,
        });
    }
    let mut m = Matrix4::<C64>::zeros();
    for (w, s) in weights.iter().zip(states) {
        m += s.projector().matrix() * C64::new(*w / sum, 0.0);
    }
    DensityMatrix::new(m)
}

/// The two arm states of the default experiment: the focused-pump Bell-like
/// state and the broad-pump four-term state.
pub fn arm_states(geom: &SlitGeometry, opt: &OpticalParams) -> Result<(PureState2Q, PureState2Q)> {
    let psi1 = generate_pure_state(&crate::presets::focused_pump(), geom, opt)?;
    let psi2 = generate_pure_state(&crate::presets::broad_pump(), geom, opt)?;
    Ok((psi1, psi2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn setup() -> (SlitGeometry, OpticalParams) {
        (presets::geometry(), presets::optics())
    }

    #[test]
    fn arm_phase_reference_value_two_routes() {
        let (geom, opt) = setup();
        let direct = arm_phase(&geom, &opt);
        // independent route: φ = π d² / (4 λ_pump z_a)
        let alt = std::f64::consts::PI * geom.spacing().powi(2)
            / (4.0 * opt.lambda_pump() * geom.aperture_z());
        assert_abs_diff_eq!(direct, alt, epsilon = 1e-15);
        assert_abs_diff_eq!(direct, 0.308_073_855_860_5, epsilon = 1e-12);
    }

    #[test]
    fn arm_phase_scales_quadratically_with_spacing() {
        let z_a = 0.2;
        let g1 = SlitGeometry::new(2, 1.0e-4, 2.0e-5, z_a).unwrap();
        let g2 = SlitGeometry::new(2, 2.0e-4, 2.0e-5, z_a).unwrap();
        let opt = OpticalParams::new(413e-9, 826e-9, 1.4, &g1).unwrap();
        assert_abs_diff_eq!(
            4.0 * arm_phase(&g1, &opt),
            arm_phase(&g2, &opt),
            epsilon = 1e-12
        );
        // d → 0 limit
        let g_small = SlitGeometry::new(2, 1.0e-9, 4.0e-10, z_a).unwrap();
        assert!(arm_phase(&g_small, &opt) < 1e-10);
    }

    #[test]
    fn focused_pump_yields_the_entangled_state() {
        let (geom, opt) = setup();
        let state = generate_pure_state(&presets::focused_pump(), &geom, &opt).unwrap();
        let bell = PureState2Q::new([
            c(0.0, 0.0),
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            c(0.0, 0.0),
        ])
        .unwrap();
        let fid = state.overlap(&bell).norm_sqr();
        assert!(fid >= 0.999, "fidelity with Bell state: {fid}");
    }

    #[test]
    fn uniform_pump_yields_the_four_term_state() {
        let (geom, opt) = setup();
        let flat = PumpProfile::Custom(Arc::new(|_| C64::new(1.0, 0.0)));
        let state = generate_pure_state(&flat, &geom, &opt).unwrap();
        let phi = arm_phase(&geom, &opt);
        let expect = PureState2Q::new([
            c(0.5, 0.0),
            Complex::from_polar(0.5, phi),
            Complex::from_polar(0.5, phi),
            c(0.5, 0.0),
        ])
        .unwrap();
        for i in 0..4 {
            let diff = (state.coeffs()[i] - expect.coeffs()[i]).norm();
            assert!(diff < 1e-12, "coefficient {i} differs by {diff}");
        }
    }

    #[test]
    fn pointlike_pump_on_one_midpoint_selects_a_product_state() {
        let (geom, opt) = setup();
        let d = geom.spacing();
        let spike = PumpProfile::Custom(Arc::new(move |x| {
            if (x - d / 2.0).abs() < 1e-9 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }));
        let state = generate_pure_state(&spike, &geom, &opt).unwrap();
        assert_abs_diff_eq!(state.coeffs()[0].norm(), 1.0, epsilon = 1e-12);
        for i in 1..4 {
            assert!(state.coeffs()[i].norm() < 1e-12);
        }
    }

    #[test]
    fn vanishing_pump_is_a_degenerate_pump_error() {
        let (geom, opt) = setup();
        let dark = PumpProfile::Custom(Arc::new(|_| C64::new(0.0, 0.0)));
        assert!(matches!(
            generate_pure_state(&dark, &geom, &opt),
            Err(Error::DegeneratePump)
        ));
    }

    #[test]
    fn generated_states_are_normalized() {
        let (geom, opt) = setup();
        for width in [1e-6, 5e-6, 2e-5] {
            let s =
                generate_pure_state(&PumpProfile::Focused { width }, &geom, &opt).unwrap();
            assert_abs_diff_eq!(s.coeffs().norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn mixture_of_projectors() {
        let up = PureState2Q::new([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let down = PureState2Q::new([c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let rho = mix_states(&[0.5, 0.5], &[up.clone(), down]).unwrap();
        assert_abs_diff_eq!(rho.entry(0, 0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry(3, 3).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry(1, 1).re, 0.0, epsilon = 1e-15);

        let pure = mix_states(&[1.0, 0.0], &[up.clone(), up.clone()]).unwrap();
        assert!(crate::states::frobenius_distance(pure.matrix(), up.projector().matrix()) < 1e-15);
    }

    #[test]
    fn mixture_validates_weights() {
        let (geom, opt) = setup();
        let (p1, p2) = arm_states(&geom, &opt).unwrap();
        assert!(matches!(
            mix_states(&[0.8, 0.1], &[p1.clone(), p2.clone()]),
            Err(Error::WeightSum { .. })
        ));
        assert!(mix_states(&[0.8], &[p1.clone(), p2.clone()]).is_err());
        assert!(mix_states(&[1.2, -0.2], &[p1, p2]).is_err());
    }

    #[test]
    fn mixture_eigenvalues_and_trace() {
        let (geom, opt) = setup();
        let (p1, p2) = arm_states(&geom, &opt).unwrap();
        let rho = mix_states(&[0.87, 0.13], &[p1, p2]).unwrap();
        let vals = rho.eigenvalues_desc();
        assert!(vals.iter().all(|&v| v >= -1e-12));
        assert_abs_diff_eq!(vals.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mixture_is_convex_linear() {
        let (geom, opt) = setup();
        let (p1, p2) = arm_states(&geom, &opt).unwrap();
        let w = [0.3, 0.7];
        let rho = mix_states(&w, &[p1.clone(), p2.clone()]).unwrap();
        let manual = p1.projector().matrix() * c(0.3, 0.0) + p2.projector().matrix() * c(0.7, 0.0);
        assert!(crate::states::frobenius_distance(rho.matrix(), &manual) < 1e-15);
    }
}
