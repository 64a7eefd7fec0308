//! The batch commands behind the CLI: generate → simulate → reconstruct →
//! pattern/histogram, plus the all-in-one pipeline.
//!
//! Every command is a plain function over a [`Workspace`] so the pipeline
//! and the integration tests can drive them directly. All outputs land in
//! the workspace output directory with fixed names; a run is reproducible
//! byte-for-byte from (config, seed).

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _};
use slitomo_core::fringe;
use slitomo_core::io;
use slitomo_core::measurement::{simulate_all_settings, NoiseModel};
use slitomo_core::states::PureState2Q;
use slitomo_core::stategen::{arm_phase, generate_pure_state, mix_states};
use slitomo_core::tomography::{
    decompose_two_component, fidelity, fit_mixture_weights, project_physical, purity, reconstruct,
    InversionMethod, ReconstructionOptions, TomographyResult,
};

use crate::config::ExperimentConfig;

pub struct Workspace {
    pub config: ExperimentConfig,
    pub out: PathBuf,
}

impl Workspace {
    pub fn new(
        mut config: ExperimentConfig,
        out_override: Option<PathBuf>,
        seed_override: Option<u64>,
    ) -> Self {
        if let Some(seed) = seed_override {
            config.simulation.seed = seed;
        }
        let out = out_override.unwrap_or_else(|| PathBuf::from(&config.output.dir));
        Workspace { config, out }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn ensure_out_dir(&self) -> anyhow::Result<()> {
        fs::create_dir_all(&self.out)
            .with_context(|| format!("cannot create output directory {}", self.out.display()))
    }
}

/// Wrap an angle into (-π, π].
fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut y = x % two_pi;
    if y > std::f64::consts::PI {
        y -= two_pi;
    }
    if y <= -std::f64::consts::PI {
        y += two_pi;
    }
    y
}

/// Build the two arm states and their mixture; write all three plus the
/// resolved configuration.
pub fn generate(ws: &Workspace) -> anyhow::Result<()> {
    ws.ensure_out_dir()?;
    let geom = ws.config.geometry_checked()?;
    let opt = ws.config.optics_checked(&geom)?;

    let psi1 = generate_pure_state(&ws.config.pump.arm1.profile(), &geom, &opt)?;
    let psi2 = generate_pure_state(&ws.config.pump.arm2.profile(), &geom, &opt)?;
    let weights = ws.config.mixture_weights();
    let rho = mix_states(&weights, &[psi1.clone(), psi2.clone()])?;

    // internal consistency: the relative phase between the cross- and
    // double-transmission coefficients of the broad-pump state must be the
    // aperture phase
    let phi = arm_phase(&geom, &opt);
    let c = psi2.coeffs();
    if c[0].norm() > 1e-9 && c[1].norm() > 1e-9 {
        let relative = (c[1] * c[0].conj()).arg();
        let dev = wrap_angle(relative - phi).abs();
        if dev > 1e-9 {
            bail!("generated arm-2 state phase {relative} disagrees with the aperture phase {phi}");
        }
    }

    io::save_pure_state(&ws.path("psi1.json"), &psi1)?;
    io::save_pure_state(&ws.path("psi2.json"), &psi2)?;
    io::save_density_matrix(&ws.path("rho_the.json"), &rho)?;
    fs::write(ws.path("config.toml"), ws.config.to_toml_string()?)?;

    println!("generate: wrote psi1.json, psi2.json, rho_the.json (aperture phase {phi:.6} rad)");
    Ok(())
}

/// Simulate the nine-setting acquisition of a state file into counts.csv.
pub fn simulate(
    ws: &Workspace,
    state: Option<PathBuf>,
    counts: Option<u64>,
    noise: Option<NoiseModel>,
) -> anyhow::Result<PathBuf> {
    ws.ensure_out_dir()?;
    let state_path = state.unwrap_or_else(|| ws.path("rho_the.json"));
    let rho = io::load_state_as_density(&state_path)
        .with_context(|| format!("cannot load state {}", state_path.display()))?;
    let model = ws.config.measurement_model()?;
    let total = counts.unwrap_or(ws.config.simulation.counts_per_setting);
    let noise = noise.unwrap_or(ws.config.simulation.noise);
    let seed = ws.config.simulation.seed;

    let records = simulate_all_settings(&rho, &model, total, noise, seed)?;
    let out = ws.path("counts.csv");
    io::write_counts_csv(&out, &records)?;
    io::write_counts_json(&ws.path("counts.json"), &records)?;
    println!(
        "simulate: {} settings × {total} counts ({noise:?}, seed {seed}) -> {}",
        records.len(),
        out.display()
    );
    Ok(out)
}

/// Invert a counts CSV into a density matrix with diagnostics.
pub fn reconstruct_counts(
    ws: &Workspace,
    counts_csv: &Path,
    method: InversionMethod,
    bootstrap: Option<usize>,
) -> anyhow::Result<TomographyResult> {
    ws.ensure_out_dir()?;
    let records = io::read_counts_csv(counts_csv)
        .with_context(|| format!("cannot read counts {}", counts_csv.display()))?;
    let model = ws.config.measurement_model()?;
    let opts = ReconstructionOptions {
        method,
        bootstrap_resamples: bootstrap.unwrap_or(ws.config.bootstrap.resamples),
        bootstrap_seed: ws.config.simulation.seed ^ 0xB005_7EED,
        bootstrap_noise: ws.config.simulation.noise,
        ..ReconstructionOptions::default()
    };
    let result = reconstruct(&records, &model, &opts)?;

    io::save_result(&ws.path("result.json"), &result)?;
    let pretty = io::pretty_matrix(result.rho.matrix());
    let mut report = String::new();
    report.push_str("reconstructed density matrix:\n");
    report.push_str(&pretty);
    report.push_str(&format!(
        "eigenvalues: [{:.4}, {:.4}, {:.4}, {:.4}]\n",
        result.eigenvalues[0], result.eigenvalues[1], result.eigenvalues[2], result.eigenvalues[3]
    ));
    report.push_str(&format!("physical: {}\n", result.physical));
    if let Some(cond) = result.condition_number {
        report.push_str(&format!("inversion condition number: {cond:.3}\n"));
    }
    report.push_str(&format!(
        "hermitization asymmetry: {:.3e}\n",
        result.hermitization_asymmetry
    ));
    if result.schwarz_violations.is_empty() {
        report.push_str("Schwarz check: no violations\n");
    } else {
        for v in &result.schwarz_violations {
            report.push_str(&format!(
                "Schwarz violation at ({}, {}): |ρ| = {:.3} > bound {:.3}\n",
                slitomo_core::states::BASIS_LABELS[v.j],
                slitomo_core::states::BASIS_LABELS[v.k],
                v.modulus,
                v.bound
            ));
        }
    }
    fs::write(ws.path("result.txt"), &report)?;
    print!("{report}");
    println!("reconstruct: wrote result.json, result.txt");
    Ok(result)
}

/// Where the idler detector sits during a fringe scan.
#[derive(Debug, Clone, Copy)]
pub enum IdlerPosition {
    /// On the optical axis (0 mm preset).
    Zero,
    /// At the measurement-slit spacing Δ (1.376 mm preset).
    Delta,
    Custom(f64),
}

impl IdlerPosition {
    fn resolve(self, ws: &Workspace) -> anyhow::Result<(f64, String)> {
        Ok(match self {
            IdlerPosition::Zero => (0.0, "zero".to_string()),
            IdlerPosition::Delta => {
                let geom = ws.config.geometry_checked()?;
                let opt = ws.config.optics_checked(&geom)?;
                let plan = ws.config.slit_plan(&geom, &opt)?;
                (plan.delta, "delta".to_string())
            }
            IdlerPosition::Custom(x) => (x, format!("{:.3}mm", x * 1e3)),
        })
    }
}

/// Scan the coincidence rate over signal-detector positions at a fixed
/// idler position; write one CSV per call.
pub fn pattern(
    ws: &Workspace,
    state: Option<PathBuf>,
    idler: IdlerPosition,
    range: Option<(f64, f64)>,
    points: Option<usize>,
) -> anyhow::Result<PathBuf> {
    ws.ensure_out_dir()?;
    let state_path = state.unwrap_or_else(|| ws.path("rho_the.json"));
    let rho = io::load_state_as_density(&state_path)
        .with_context(|| format!("cannot load state {}", state_path.display()))?;
    let geom = ws.config.geometry_checked()?;
    let opt = ws.config.optics_checked(&geom)?;
    let (idler_x, tag) = idler.resolve(ws)?;

    let range = range.unwrap_or((ws.config.pattern.range[0], ws.config.pattern.range[1]));
    let points = points.unwrap_or(ws.config.pattern.points);
    let window = ws.config.quadrature.x_window;
    if range.0.abs() > window || range.1.abs() > window || idler_x.abs() > window {
        bail!(
            "pattern: scan range [{}, {}] or idler position {} outside the configured window ±{}",
            range.0,
            range.1,
            idler_x,
            window
        );
    }

    let scan = fringe::scan(
        &rho,
        &geom,
        &opt,
        ws.config.plan.detector_half_width,
        idler_x,
        range,
        points,
    )?;

    let out = ws.path(&format!("pattern_{tag}.csv"));
    let mut text = String::new();
    text.push_str(&format!("# idler_x={idler_x}\n"));
    text.push_str("x_signal,rate\n");
    for (x, r) in scan.positions.iter().zip(&scan.rates) {
        text.push_str(&format!("{x},{r}\n"));
    }
    fs::write(&out, text)?;
    println!(
        "pattern: idler at {:.3} mm, {} points -> {}",
        idler_x * 1e3,
        points,
        out.display()
    );
    Ok(out)
}

/// Tabulate the real parts of the measured, two-component-model, and
/// predicted matrices for external plotting.
pub fn histogram(
    ws: &Workspace,
    result: Option<PathBuf>,
    psi1: Option<PathBuf>,
    psi2: Option<PathBuf>,
) -> anyhow::Result<PathBuf> {
    ws.ensure_out_dir()?;
    let result_path = result.unwrap_or_else(|| ws.path("result.json"));
    let measured = io::load_result(&result_path)
        .with_context(|| format!("cannot load result {}", result_path.display()))?;

    let psi1 = load_component(ws, psi1, "psi1.json")?;
    let psi2 = load_component(ws, psi2, "psi2.json")?;
    let weights = ws.config.mixture_weights();
    let predicted = mix_states(&weights, &[psi1, psi2])?;

    let decomposition = decompose_two_component(&measured.rho);
    let model_matrix = decomposition.components.0.projector().matrix()
        * slitomo_core::C64::new(decomposition.weights.0, 0.0)
        + decomposition.components.1.projector().matrix()
            * slitomo_core::C64::new(decomposition.weights.1, 0.0);

    let out = ws.path("histogram.csv");
    let mut text = String::new();
    text.push_str("row,col,label,measured_re,decomposed_re,predicted_re\n");
    for i in 0..4 {
        for j in 0..4 {
            text.push_str(&format!(
                "{i},{j},\"{}|{}\",{},{},{}\n",
                slitomo_core::states::BASIS_LABELS[i],
                slitomo_core::states::BASIS_LABELS[j],
                measured.rho.entry(i, j).re,
                model_matrix[(i, j)].re,
                predicted.entry(i, j).re,
            ));
        }
    }
    fs::write(&out, text)?;
    println!(
        "histogram: decomposition weights ({:.3}, {:.3}), residual {:.4} -> {}",
        decomposition.weights.0,
        decomposition.weights.1,
        decomposition.residual,
        out.display()
    );
    Ok(out)
}

fn load_component(
    ws: &Workspace,
    path: Option<PathBuf>,
    default_name: &str,
) -> anyhow::Result<PureState2Q> {
    let path = path.unwrap_or_else(|| ws.path(default_name));
    io::load_pure_state(&path).with_context(|| format!("cannot load state {}", path.display()))
}

/// generate → simulate → reconstruct → both fringe presets → histogram,
/// with a closing summary comparing the reconstruction to the generated
/// state.
pub fn pipeline(ws: &Workspace, method: InversionMethod) -> anyhow::Result<TomographyResult> {
    generate(ws)?;
    let counts = simulate(ws, None, None, None)?;
    let result = reconstruct_counts(ws, &counts, method, None)?;
    // fringes of the reconstructed state at both presets
    let reconstructed_state = ws.path("result_state.json");
    io::save_density_matrix(&reconstructed_state, &result.rho)?;
    pattern(ws, Some(reconstructed_state.clone()), IdlerPosition::Zero, None, None)?;
    pattern(ws, Some(reconstructed_state), IdlerPosition::Delta, None, None)?;
    histogram(ws, None, None, None)?;

    let psi1 = io::load_pure_state(&ws.path("psi1.json"))?;
    let psi2 = io::load_pure_state(&ws.path("psi2.json"))?;
    let generated = io::load_density_matrix(&ws.path("rho_the.json"))?;
    let (fit_a, fit_b) = fit_mixture_weights(&result.rho, &psi1, &psi2);
    let projected = project_physical(&result.rho);
    let fid = fidelity(&projected, &generated)?;
    println!(
        "pipeline: fitted mixture weights ({fit_a:.4}, {fit_b:.4}); fidelity(projected, generated) = {fid:.6}; purity = {:.4}",
        purity(&projected)
    );
    Ok(result)
}
