//! Experiment configuration: a single TOML file with nested sections.
//!
//! Every field has a default reproducing the modeled experiment, so an empty
//! file (or no `--config` at all) runs the reference setup. Unknown keys are
//! rejected rather than ignored.

use std::path::Path;

use anyhow::{bail, Context as _};
use serde::{Deserialize, Serialize};
use slitomo_core::geometry::{OpticalParams, SlitGeometry};
use slitomo_core::measurement::{MeasurementModel, NoiseModel, SlitPlan};
use slitomo_core::optics::OpticsConfig;
use slitomo_core::presets;
use slitomo_core::quad::QuadConfig;
use slitomo_core::stategen::PumpProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    /// Number of slits per aperture (2 for qubits).
    pub slit_count: u32,
    /// Center-to-center slit spacing d [m].
    pub spacing: f64,
    /// Slit half-width a [m].
    pub half_width: f64,
    /// Aperture plane position z_a [m].
    pub aperture_z: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        GeometrySection {
            slit_count: 2,
            spacing: presets::SLIT_SPACING,
            half_width: presets::SLIT_HALF_WIDTH,
            aperture_z: presets::APERTURE_PLANE_Z,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpticsSection {
    /// Pump wavelength [m].
    pub lambda_pump: f64,
    /// Down-converted wavelength [m].
    pub lambda_down: f64,
    /// Detection plane position [m]. The default places it so the
    /// measurement-slit spacing α·π/d comes out at 1.376 mm.
    pub detection_z: f64,
}

impl Default for OpticsSection {
    fn default() -> Self {
        OpticsSection {
            lambda_pump: presets::PUMP_WAVELENGTH,
            lambda_down: presets::DOWN_WAVELENGTH,
            detection_z: presets::detection_plane_z(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum PumpKind {
    Focused,
    Broad,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpDescriptor {
    pub kind: PumpKind,
    /// Gaussian field width (standard deviation) at the aperture plane [m].
    pub width: f64,
}

impl PumpDescriptor {
    pub fn profile(&self) -> PumpProfile {
        match self.kind {
            PumpKind::Focused => PumpProfile::Focused { width: self.width },
            PumpKind::Broad => PumpProfile::Broad { width: self.width },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PumpSection {
    /// Arm 1 of the pump interferometer: focused spot (entangling).
    pub arm1: PumpDescriptor,
    /// Arm 2: broadened beam (feeds all four coefficients).
    pub arm2: PumpDescriptor,
}

impl Default for PumpSection {
    fn default() -> Self {
        PumpSection {
            arm1: PumpDescriptor {
                kind: PumpKind::Focused,
                width: presets::SLIT_HALF_WIDTH / 10.0,
            },
            arm2: PumpDescriptor {
                kind: PumpKind::Broad,
                width: 10.0 * presets::SLIT_SPACING,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MixtureSection {
    /// Probability of the arm-1 (entangled) component.
    pub arm1: f64,
    /// Probability of the arm-2 component.
    pub arm2: f64,
}

impl Default for MixtureSection {
    fn default() -> Self {
        MixtureSection {
            arm1: presets::MIXTURE_WEIGHTS.0,
            arm2: presets::MIXTURE_WEIGHTS.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlanSection {
    /// Detector-slit half-width b [m].
    pub detector_half_width: f64,
    /// Measurement-slit spacing Δ [m]; omit to derive α·π/d from the optics.
    pub delta: Option<f64>,
}

impl Default for PlanSection {
    fn default() -> Self {
        PlanSection {
            detector_half_width: presets::DETECTOR_HALF_WIDTH,
            delta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    /// Coincidences per measurement setting (not from the modeled
    /// experiment, which never states acquisition totals).
    pub counts_per_setting: u64,
    pub seed: u64,
    pub noise: NoiseModel,
}

impl Default for SimulationSection {
    fn default() -> Self {
        SimulationSection {
            counts_per_setting: 100_000,
            seed: 7,
            noise: NoiseModel::Multinomial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSection {
    /// Absolute tolerance of the adaptive quadrature.
    pub abs_tol: f64,
    /// Panel budget before a quadrature reports failure.
    pub max_panels: usize,
    /// q-window half-width in units of π/a.
    pub trunc_factor: f64,
    /// Transverse window around the optical axis [m].
    pub x_window: f64,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let oc = OpticsConfig::default();
        QuadratureSection {
            abs_tol: oc.quad.abs_tol,
            max_panels: oc.quad.max_panels,
            trunc_factor: oc.trunc_factor,
            x_window: oc.x_window,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BootstrapSection {
    /// Parametric-bootstrap resamples behind the per-element error bars.
    pub resamples: usize,
}

impl Default for BootstrapSection {
    fn default() -> Self {
        BootstrapSection { resamples: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PatternSection {
    /// Signal-detector scan range [m].
    pub range: [f64; 2],
    pub points: usize,
}

impl Default for PatternSection {
    fn default() -> Self {
        PatternSection {
            range: [-7.0e-3, 7.0e-3],
            points: 1401,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: "out".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub geometry: GeometrySection,
    pub optics: OpticsSection,
    pub pump: PumpSection,
    pub mixture: MixtureSection,
    pub plan: PlanSection,
    pub simulation: SimulationSection,
    pub quadrature: QuadratureSection,
    pub bootstrap: BootstrapSection,
    pub pattern: PatternSection,
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: ExperimentConfig = toml::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Build and cross-check every domain object, so field errors surface at
    /// parse time with their section and name.
    pub fn validate(&self) -> anyhow::Result<()> {
        let geom = self.geometry_checked()?;
        let opt = self.optics_checked(&geom)?;
        self.pump.arm1.profile().validate(&geom).map_err(anyhow::Error::from)?;
        self.pump.arm2.profile().validate(&geom).map_err(anyhow::Error::from)?;
        self.slit_plan(&geom, &opt)?;
        if self.mixture.arm1 < 0.0 || self.mixture.arm2 < 0.0 {
            bail!("mixture: weights must be non-negative");
        }
        if (self.mixture.arm1 + self.mixture.arm2 - 1.0).abs() > 1e-9 {
            bail!(
                "mixture: arm1 + arm2 = {} must equal 1",
                self.mixture.arm1 + self.mixture.arm2
            );
        }
        if self.simulation.counts_per_setting == 0 {
            bail!("simulation.counts_per_setting: must be positive");
        }
        if self.pattern.points < 2 {
            bail!("pattern.points: need at least 2 samples");
        }
        if !(self.pattern.range[1] > self.pattern.range[0]) {
            bail!("pattern.range: upper bound must exceed lower bound");
        }
        if self.pattern.range[0].abs() > self.quadrature.x_window
            || self.pattern.range[1].abs() > self.quadrature.x_window
        {
            bail!(
                "pattern.range: scan [{}, {}] exceeds quadrature.x_window = {}",
                self.pattern.range[0],
                self.pattern.range[1],
                self.quadrature.x_window
            );
        }
        Ok(())
    }

    pub fn geometry_checked(&self) -> anyhow::Result<SlitGeometry> {
        SlitGeometry::new(
            self.geometry.slit_count,
            self.geometry.spacing,
            self.geometry.half_width,
            self.geometry.aperture_z,
        )
        .context("geometry")
    }

    pub fn optics_checked(&self, geom: &SlitGeometry) -> anyhow::Result<OpticalParams> {
        OpticalParams::new(
            self.optics.lambda_pump,
            self.optics.lambda_down,
            self.optics.detection_z,
            geom,
        )
        .context("optics")
    }

    pub fn optics_config(&self) -> OpticsConfig {
        OpticsConfig {
            quad: QuadConfig {
                abs_tol: self.quadrature.abs_tol,
                max_panels: self.quadrature.max_panels,
            },
            trunc_factor: self.quadrature.trunc_factor,
            x_window: self.quadrature.x_window,
        }
    }

    pub fn slit_plan(&self, geom: &SlitGeometry, opt: &OpticalParams) -> anyhow::Result<SlitPlan> {
        let plan = match self.plan.delta {
            Some(delta) => SlitPlan::with_delta(delta, self.plan.detector_half_width),
            None => SlitPlan::from_optics(geom, opt, self.plan.detector_half_width),
        };
        plan.context("plan")
    }

    pub fn measurement_model(&self) -> anyhow::Result<MeasurementModel> {
        let geom = self.geometry_checked()?;
        let opt = self.optics_checked(&geom)?;
        let plan = self.slit_plan(&geom, &opt)?;
        Ok(MeasurementModel::new(geom, opt, plan, &self.optics_config())?)
    }

    pub fn mixture_weights(&self) -> [f64; 2] {
        [self.mixture.arm1, self.mixture.arm2]
    }
}
