//! Default experimental parameters.
//!
//! These reproduce the double-slit biphoton setup this crate models: a
//! 413 nm pump down-converted to 826 nm photon pairs, identical double
//! slits 200 mm from the crystal, and measurement slits of 0.1 mm width at
//! the detection plane. The detection plane `z` is placed so that the
//! measurement-slit spacing Δ = α·π/d comes out at 1.376 mm.

use crate::geometry::{OpticalParams, SlitGeometry};
use crate::quad::QuadConfig;
use crate::stategen::PumpProfile;

/// Center-to-center slit spacing d [m].
pub const SLIT_SPACING: f64 = 0.18e-3;
/// Slit half-width a [m] (full width 0.09 mm).
pub const SLIT_HALF_WIDTH: f64 = 0.045e-3;
/// Aperture plane position z_a [m].
pub const APERTURE_PLANE_Z: f64 = 0.200;
/// Pump wavelength [m].
pub const PUMP_WAVELENGTH: f64 = 413e-9;
/// Down-converted wavelength [m].
pub const DOWN_WAVELENGTH: f64 = 826e-9;
/// Detector-slit half-width b [m] (slit width 0.1 mm).
pub const DETECTOR_HALF_WIDTH: f64 = 0.05e-3;
/// Measurement-slit spacing Δ [m].
pub const DETECTOR_SPACING: f64 = 1.376e-3;
/// Image-plane detector offset used for the logical-basis measurement [m].
pub const IMAGE_PLANE_OFFSET: f64 = 100e-6;
/// Mixing probabilities (arm 1, arm 2) of the default mixed state.
pub const MIXTURE_WEIGHTS: (f64, f64) = (0.87, 0.13);

/// Detection plane position chosen so that α·π/d = [`DETECTOR_SPACING`].
pub fn detection_plane_z() -> f64 {
    let alpha = DETECTOR_SPACING * SLIT_SPACING / std::f64::consts::PI;
    let k = 2.0 * std::f64::consts::PI / DOWN_WAVELENGTH;
    APERTURE_PLANE_Z + 2.0 * k * alpha
}

pub fn geometry() -> SlitGeometry {
    SlitGeometry::new(2, SLIT_SPACING, SLIT_HALF_WIDTH, APERTURE_PLANE_Z)
        .expect("preset geometry is valid")
}

pub fn optics() -> OpticalParams {
    OpticalParams::new(
        PUMP_WAVELENGTH,
        DOWN_WAVELENGTH,
        detection_plane_z(),
        &geometry(),
    )
    .expect("preset optics are valid")
}

pub fn quad_config() -> QuadConfig {
    QuadConfig::default()
}

/// Pump focused to a spot much narrower than the slit spacing (arm 1).
pub fn focused_pump() -> PumpProfile {
    PumpProfile::Focused {
        width: SLIT_HALF_WIDTH / 10.0,
    }
}

/// Pump broadened to cover both slit pairs uniformly (arm 2).
pub fn broad_pump() -> PumpProfile {
    PumpProfile::Broad {
        width: 10.0 * SLIT_SPACING,
    }
}
