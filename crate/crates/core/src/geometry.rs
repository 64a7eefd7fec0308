//! Aperture geometry and optical parameters.
//!
//! All lengths are in meters. The double slit sits at the aperture plane
//! `z_a`; detection happens at the plane `z`. The propagation scale
//! `alpha = (z - z_a) / (2 k)` (an area) governs the Fresnel phase curvature
//! of the slit modes at the detection plane.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Which slit of the double slit a photon was transmitted through.
///
/// `Plus` is the upper slit (center at `+d/2`), `Minus` the lower one
/// (center at `-d/2`). These are the logical basis states of one spatial
/// qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slit {
    Plus,
    Minus,
}

impl Slit {
    pub const BOTH: [Slit; 2] = [Slit::Plus, Slit::Minus];

    /// Basis index: `Plus` → 0, `Minus` → 1.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Slit::Plus => 0,
            Slit::Minus => 1,
        }
    }

    #[inline]
    pub fn from_index(i: usize) -> Slit {
        if i == 0 {
            Slit::Plus
        } else {
            Slit::Minus
        }
    }

    /// Half-integer slit label `l = ±1/2`; the slit center is `l · d`.
    #[inline]
    pub fn half(self) -> f64 {
        match self {
            Slit::Plus => 0.5,
            Slit::Minus => -0.5,
        }
    }

    /// Transverse position of the slit center for spacing `d`.
    #[inline]
    pub fn center(self, d: f64) -> f64 {
        self.half() * d
    }

    pub fn label(self) -> char {
        match self {
            Slit::Plus => '+',
            Slit::Minus => '-',
        }
    }
}

/// Double-slit aperture description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlitGeometry {
    slit_count: u32,
    /// Center-to-center slit spacing [m].
    d: f64,
    /// Slit half-width [m].
    a: f64,
    /// Position of the aperture plane along the optical axis [m].
    z_a: f64,
}

impl SlitGeometry {
    pub fn new(slit_count: u32, d: f64, a: f64, z_a: f64) -> Result<Self> {
        if slit_count < 2 {
            return Err(Error::invalid(
                "slit_count",
                format!("{slit_count} < 2: need at least two slits"),
            ));
        }
        if !(a > 0.0 && d > 2.0 * a) {
            return Err(Error::invalid(
                "d",
                format!("need d > 2a > 0, got d = {d}, a = {a}"),
            ));
        }
        if !(z_a > 0.0) {
            return Err(Error::invalid("z_a", format!("{z_a} must be positive")));
        }
        Ok(SlitGeometry {
            slit_count,
            d,
            a,
            z_a,
        })
    }

    #[inline]
    pub fn slit_count(&self) -> u32 {
        self.slit_count
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.d
    }

    #[inline]
    pub fn half_width(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn aperture_z(&self) -> f64 {
        self.z_a
    }
}

/// Wavelengths and the detection-plane position.
///
/// `alpha` is always derived from `(z, z_a, k)` on demand so it can never go
/// stale with respect to the stored fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalParams {
    /// Pump wavelength [m].
    lambda_pump: f64,
    /// Down-converted (signal/idler) wavelength [m].
    lambda_down: f64,
    /// Detection plane position [m].
    z: f64,
    /// Aperture plane position [m] (copied from the geometry it was built with).
    z_a: f64,
}

impl OpticalParams {
    pub fn new(lambda_pump: f64, lambda_down: f64, z: f64, geom: &SlitGeometry) -> Result<Self> {
        if !(lambda_pump > 0.0) {
            return Err(Error::invalid("lambda_pump", "must be positive"));
        }
        if !(lambda_down > 0.0) {
            return Err(Error::invalid("lambda_down", "must be positive"));
        }
        if !(z > geom.aperture_z()) {
            return Err(Error::invalid(
                "z",
                format!(
                    "detection plane z = {z} must lie beyond the aperture plane z_a = {}",
                    geom.aperture_z()
                ),
            ));
        }
        Ok(OpticalParams {
            lambda_pump,
            lambda_down,
            z,
            z_a: geom.aperture_z(),
        })
    }

    #[inline]
    pub fn lambda_pump(&self) -> f64 {
        self.lambda_pump
    }

    #[inline]
    pub fn lambda_down(&self) -> f64 {
        self.lambda_down
    }

    #[inline]
    pub fn z(&self) -> f64 {
        self.z
    }

    /// Wavenumber of the down-converted photons, `2π/λ_down`.
    #[inline]
    pub fn k_down(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.lambda_down
    }

    /// Wavenumber of the pump, `2π/λ_pump`.
    #[inline]
    pub fn k_pump(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.lambda_pump
    }

    /// Fresnel propagation scale `(z - z_a) / (2 k_down)` [m²].
    #[inline]
    pub fn alpha(&self) -> f64 {
        (self.z - self.z_a) / (2.0 * self.k_down())
    }
}

/// A detector slit at the detection plane: center position and half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorSlit {
    /// Transverse center position [m].
    pub x: f64,
    /// Half-width [m].
    pub b: f64,
}

impl DetectorSlit {
    pub fn new(x: f64, b: f64) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::invalid("b", format!("{b} must be positive")));
        }
        Ok(DetectorSlit { x, b })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn geometry_rejects_bad_values() {
        assert!(SlitGeometry::new(1, 1e-4, 4e-5, 0.2).is_err());
        assert!(SlitGeometry::new(2, 1e-4, 6e-5, 0.2).is_err()); // d < 2a
        assert!(SlitGeometry::new(2, 1e-4, 4e-5, -0.2).is_err());
        assert!(SlitGeometry::new(2, 1.8e-4, 4.5e-5, 0.2).is_ok());
    }

    #[test]
    fn optics_requires_z_beyond_aperture() {
        let geom = presets::geometry();
        assert!(OpticalParams::new(413e-9, 826e-9, 0.1, &geom).is_err());
        assert!(OpticalParams::new(413e-9, 826e-9, 1.4, &geom).is_ok());
    }

    #[test]
    fn alpha_is_derived_from_fields() {
        let geom = presets::geometry();
        let opt = OpticalParams::new(413e-9, 826e-9, 1.4, &geom).unwrap();
        let k = 2.0 * std::f64::consts::PI / 826e-9;
        let expect = (1.4 - 0.2) / (2.0 * k);
        assert!((opt.alpha() - expect).abs() < 1e-18);
    }

    #[test]
    fn slit_centers_sit_at_half_spacing() {
        assert_eq!(Slit::Plus.center(0.18e-3), 0.09e-3);
        assert_eq!(Slit::Minus.center(0.18e-3), -0.09e-3);
        assert_eq!(Slit::Plus.index(), 0);
    }

    #[test]
    fn detector_slit_needs_positive_width() {
        assert!(DetectorSlit::new(0.0, 0.0).is_err());
        assert!(DetectorSlit::new(1e-3, 5e-5).is_ok());
    }
}
