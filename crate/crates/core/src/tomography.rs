//! Linear inversion of coincidence data into a density matrix, with
//! validity diagnostics and mixture analysis.
//!
//! The Z⊗Z setting measures the four diagonal elements directly. Each
//! off-diagonal element is reached by a pair of settings: the X-family
//! setting fixes its real part and the Y-family setting its imaginary part.
//! For the signal-side element ρ_{++,-+} the closed forms are
//!
//! ```text
//! Re ρ_{++,-+} = (p⁽ˣᶻ⁾₀₊ - ρ_{++,++} cos²θₓ - ρ_{-+,-+} sin²θₓ) / sin 2θₓ
//! Im ρ_{++,-+} = (-p⁽ʸᶻ⁾₀₊ + ρ_{++,++} cos²θᵧ + ρ_{-+,-+} sin²θᵧ) / sin 2θᵧ
//! ```
//!
//! and the other five elements follow the same pattern across the three
//! measurement families (idler-side, signal-side, both-sided). This module
//! implements that per-element inversion in a form generalized to arbitrary
//! invertible transforms, plus a redundancy-using least-squares solve of the
//! full 16-real-parameter system; on noiseless data the two agree to
//! essentially machine precision, and the least-squares route is the default
//! under noise.
//!
//! Reconstructed matrices are Hermitian with unit trace by construction, but
//! nothing forces them positive: the Schwarz check |ρ_jk|² ≤ ρ_jj·ρ_kk and
//! the eigenvalue spectrum are reported as diagnostics, and
//! [`project_physical`] offers the nearest physical state (eigenvalue
//! simplex projection) as the only repair. Per-element error bars come from
//! a parametric bootstrap: counts are resimulated from the reconstructed
//! frequencies with independent seeded streams and re-inverted.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, Vector2, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::measurement::{
    draw_counts, Basis, BasisSetting, CountsRecord, MeasurementModel, NoiseModel,
};
use crate::states::{frobenius_distance, DensityMatrix, PureState2Q, PHYSICALITY_TOL};
use crate::{par, Result, C64};

/// Slack added to the Schwarz bound before flagging a violation.
pub const SCHWARZ_TOL: f64 = 1e-12;

/// Upper-triangle element order used for off-diagonal vectors.
pub const OFFDIAG_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// One Schwarz-inequality violation: |ρ_jk| exceeds √(ρ_jj ρ_kk).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchwarzViolation {
    pub j: usize,
    pub k: usize,
    pub modulus: f64,
    pub bound: f64,
}

/// Outcome of a reconstruction, with diagnostics.
#[derive(Debug, Clone)]
pub struct TomographyResult {
    pub rho: DensityMatrix,
    pub schwarz_violations: Vec<SchwarzViolation>,
    /// Eigenvalues sorted descending.
    pub eigenvalues: [f64; 4],
    /// Condition number of the stacked 16×16 inversion map, when a model was
    /// involved.
    pub condition_number: Option<f64>,
    /// Bootstrap standard error per element, when requested.
    pub element_errors: Option<[[f64; 4]; 4]>,
    /// Largest disagreement between the primary and the complementary-outcome
    /// estimates of an off-diagonal element, before hermitization (closed
    /// form only; zero for the least-squares route).
    pub hermitization_asymmetry: f64,
    /// True when all eigenvalues are ≥ -1e-9.
    pub physical: bool,
}

/// Scan the upper triangle for Schwarz violations.
pub fn schwarz_violations(rho: &DensityMatrix) -> Vec<SchwarzViolation> {
    let mut out = Vec::new();
    for &(j, k) in &OFFDIAG_PAIRS {
        let off = rho.entry(j, k).norm_sqr();
        let prod = rho.entry(j, j).re * rho.entry(k, k).re;
        if off > prod + SCHWARZ_TOL {
            out.push(SchwarzViolation {
                j,
                k,
                modulus: off.sqrt(),
                bound: prod.max(0.0).sqrt(),
            });
        }
    }
    out
}

fn result_from_matrix(
    rho: DensityMatrix,
    condition_number: Option<f64>,
    hermitization_asymmetry: f64,
) -> TomographyResult {
    let eigenvalues = rho.eigenvalues_desc();
    let physical = eigenvalues.iter().all(|&l| l >= -PHYSICALITY_TOL);
    TomographyResult {
        schwarz_violations: schwarz_violations(&rho),
        eigenvalues,
        condition_number,
        element_errors: None,
        hermitization_asymmetry,
        physical,
        rho,
    }
}

/// Normalized Z⊗Z counts are the diagonal elements, in basis order.
pub fn reconstruct_diagonals(record: &CountsRecord) -> Result<[f64; 4]> {
    if record.setting != BasisSetting::new(Basis::Z, Basis::Z) {
        return Err(Error::MalformedData(format!(
            "diagonal reconstruction needs the zz setting, got {}",
            record.setting.label()
        )));
    }
    record.frequencies()
}

/// Per-setting normalized outcome frequencies for all nine settings, in
/// canonical order.
#[derive(Debug, Clone)]
pub struct SettingProbabilities {
    probs: [[f64; 4]; 9],
    totals: [u64; 9],
}

impl SettingProbabilities {
    /// Collect and validate a full nine-setting record list. Every setting
    /// must appear exactly once; missing ones are reported by label.
    pub fn from_records(records: &[CountsRecord]) -> Result<Self> {
        let mut probs = [[f64::NAN; 4]; 9];
        let mut totals = [0u64; 9];
        let mut seen = [false; 9];
        for rec in records {
            let idx = rec.setting.canonical_index();
            if seen[idx] {
                return Err(Error::MalformedData(format!(
                    "duplicate setting {}",
                    rec.setting.label()
                )));
            }
            seen[idx] = true;
            probs[idx] = rec.frequencies()?;
            totals[idx] = rec.counts.iter().sum();
        }
        let missing: Vec<String> = BasisSetting::all_nine()
            .iter()
            .enumerate()
            .filter(|(i, _)| !seen[*i])
            .map(|(_, s)| s.label())
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingSettings(missing));
        }
        Ok(SettingProbabilities { probs, totals })
    }

    /// Exact forward probabilities of a state (noiseless data).
    pub fn from_state(rho: &DensityMatrix, model: &MeasurementModel) -> Self {
        let mut probs = [[0.0; 4]; 9];
        for (i, setting) in BasisSetting::all_nine().into_iter().enumerate() {
            probs[i] = model.probabilities(rho, setting);
        }
        SettingProbabilities {
            probs,
            totals: [0; 9],
        }
    }

    #[inline]
    pub fn get(&self, setting: BasisSetting) -> &[f64; 4] {
        &self.probs[setting.canonical_index()]
    }

    #[inline]
    pub fn total(&self, setting: BasisSetting) -> u64 {
        self.totals[setting.canonical_index()]
    }
}

/// The scalar per-element closed form: real part from the X-family
/// probability, imaginary part from the Y-family probability, given the two
/// already-known diagonal elements.
pub fn invert_re_im_pair(
    p_x: f64,
    p_y: f64,
    diag_a: f64,
    diag_b: f64,
    theta_x: f64,
    theta_y: f64,
) -> Result<C64> {
    let sin2x = (2.0 * theta_x).sin();
    let sin2y = (2.0 * theta_y).sin();
    let worst = sin2x.abs().min(sin2y.abs());
    if worst < 1e-9 {
        return Err(Error::IllConditionedPlan {
            sin_two_theta: worst,
        });
    }
    let (cx, sx) = (theta_x.cos(), theta_x.sin());
    let (cy, sy) = (theta_y.cos(), theta_y.sin());
    let re = (p_x - diag_a * cx * cx - diag_b * sx * sx) / sin2x;
    let im = (-p_y + diag_a * cy * cy + diag_b * sy * sy) / sin2y;
    Ok(C64::new(re, im))
}

/// Contribution of the already-known entries to outcome `row` of the joint
/// transform `u4`.
fn known_term(u4: &Matrix4<C64>, row: usize, known: &Matrix4<C64>) -> f64 {
    let transformed = u4 * known * u4.adjoint();
    transformed[(row, row)].re
}

/// Real 2-vector equation row for one complex target entry.
#[inline]
fn target_coefficients(u4: &Matrix4<C64>, row: usize, i: usize, j: usize) -> (f64, f64) {
    let w = u4[(row, i)] * u4[(row, j)].conj();
    (2.0 * w.re, -2.0 * w.im)
}

/// Solve one single-target group: two settings (X-family, Y-family) observed
/// at outcome `row`, target entry (i, j).
fn solve_single_target(
    model: &MeasurementModel,
    sp: &SettingProbabilities,
    settings: (BasisSetting, BasisSetting),
    row: usize,
    target: (usize, usize),
    known: &Matrix4<C64>,
) -> Result<C64> {
    let mut m = Matrix2::<f64>::zeros();
    let mut rhs = Vector2::<f64>::zeros();
    for (r, setting) in [settings.0, settings.1].into_iter().enumerate() {
        let u4 = model.joint_transform(setting);
        let (cre, cim) = target_coefficients(&u4, row, target.0, target.1);
        m[(r, 0)] = cre;
        m[(r, 1)] = cim;
        rhs[r] = sp.get(setting)[row] - known_term(&u4, row, known);
    }
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if det.abs() < 1e-9 {
        let tx = model.transform(Basis::X).theta;
        let ty = model.transform(Basis::Y).theta;
        return Err(Error::IllConditionedPlan {
            sin_two_theta: (2.0 * tx).sin().abs().min((2.0 * ty).sin().abs()),
        });
    }
    let sol = m.lu().solve(&rhs).expect("non-singular 2×2 system");
    Ok(C64::new(sol[0], sol[1]))
}

/// Solve the two both-sided targets (0,3) and (1,2) jointly from the four
/// two-sided settings observed at outcome `row`.
fn solve_double_targets(
    model: &MeasurementModel,
    sp: &SettingProbabilities,
    row: usize,
    known: &Matrix4<C64>,
) -> Result<(C64, C64)> {
    use Basis::*;
    let settings = [
        BasisSetting::new(X, X),
        BasisSetting::new(X, Y),
        BasisSetting::new(Y, X),
        BasisSetting::new(Y, Y),
    ];
    let mut m = Matrix4::<f64>::zeros();
    let mut rhs = Vector4::<f64>::zeros();
    for (r, &setting) in settings.iter().enumerate() {
        let u4 = model.joint_transform(setting);
        let (a_re, a_im) = target_coefficients(&u4, row, 0, 3);
        let (b_re, b_im) = target_coefficients(&u4, row, 1, 2);
        m[(r, 0)] = a_re;
        m[(r, 1)] = a_im;
        m[(r, 2)] = b_re;
        m[(r, 3)] = b_im;
        rhs[r] = sp.get(setting)[row] - known_term(&u4, row, known);
    }
    let lu = m.lu();
    if !lu.is_invertible() {
        let tx = model.transform(Basis::X).theta;
        let ty = model.transform(Basis::Y).theta;
        return Err(Error::IllConditionedPlan {
            sin_two_theta: (2.0 * tx).sin().abs().min((2.0 * ty).sin().abs()),
        });
    }
    let sol = lu.solve(&rhs).expect("checked invertible");
    Ok((C64::new(sol[0], sol[1]), C64::new(sol[2], sol[3])))
}

struct Group {
    target: (usize, usize),
    settings: (BasisSetting, BasisSetting),
    /// Primary outcome row and the complementary row used for the
    /// asymmetry diagnostic.
    rows: (usize, usize),
}

fn single_target_groups() -> [Group; 4] {
    use Basis::*;
    [
        // signal-side elements: signal transform varies, idler stays in Z
        Group {
            target: (0, 2),
            settings: (BasisSetting::new(X, Z), BasisSetting::new(Y, Z)),
            rows: (0, 2),
        },
        Group {
            target: (1, 3),
            settings: (BasisSetting::new(X, Z), BasisSetting::new(Y, Z)),
            rows: (1, 3),
        },
        // idler-side elements: roles reversed
        Group {
            target: (0, 1),
            settings: (BasisSetting::new(Z, X), BasisSetting::new(Z, Y)),
            rows: (0, 1),
        },
        Group {
            target: (2, 3),
            settings: (BasisSetting::new(Z, X), BasisSetting::new(Z, Y)),
            rows: (2, 3),
        },
    ]
}

/// Per-element closed-form inversion of a full nine-setting data set.
///
/// Returns the reconstructed matrix (before trace renormalization) and the
/// hermitization-asymmetry diagnostic: the largest deviation between the
/// primary estimates and those obtained from the complementary detector
/// outcomes.
pub fn invert_closed_form(
    sp: &SettingProbabilities,
    model: &MeasurementModel,
) -> Result<(Matrix4<C64>, f64)> {
    let diag = sp.get(BasisSetting::new(Basis::Z, Basis::Z));
    let mut known = Matrix4::<C64>::zeros();
    for i in 0..4 {
        known[(i, i)] = C64::new(diag[i], 0.0);
    }

    let mut asymmetry: f64 = 0.0;
    for group in single_target_groups() {
        let primary = solve_single_target(model, sp, group.settings, group.rows.0, group.target, &known)?;
        let alt = solve_single_target(model, sp, group.settings, group.rows.1, group.target, &known)?;
        asymmetry = asymmetry.max((primary - alt).norm());
        known[(group.target.0, group.target.1)] = primary;
        known[(group.target.1, group.target.0)] = primary.conj();
    }

    let (t03, t12) = solve_double_targets(model, sp, 0, &known)?;
    let (a03, a12) = solve_double_targets(model, sp, 3, &known)?;
    asymmetry = asymmetry.max((t03 - a03).norm()).max((t12 - a12).norm());
    known[(0, 3)] = t03;
    known[(3, 0)] = t03.conj();
    known[(1, 2)] = t12;
    known[(2, 1)] = t12.conj();

    Ok((known, asymmetry))
}

/// Hermitian parameter basis: 4 diagonal entries, then (Re, Im) of the six
/// upper-triangle entries in [`OFFDIAG_PAIRS`] order.
fn parameter_basis(k: usize) -> Matrix4<C64> {
    let mut m = Matrix4::<C64>::zeros();
    if k < 4 {
        m[(k, k)] = C64::new(1.0, 0.0);
    } else {
        let pair = OFFDIAG_PAIRS[(k - 4) / 2];
        if (k - 4) % 2 == 0 {
            m[(pair.0, pair.1)] = C64::new(1.0, 0.0);
            m[(pair.1, pair.0)] = C64::new(1.0, 0.0);
        } else {
            m[(pair.0, pair.1)] = C64::new(0.0, 1.0);
            m[(pair.1, pair.0)] = C64::new(0.0, -1.0);
        }
    }
    m
}

fn matrix_from_parameters(t: &[f64; 16]) -> Matrix4<C64> {
    let mut m = Matrix4::<C64>::zeros();
    for (k, &v) in t.iter().enumerate() {
        m += parameter_basis(k) * C64::new(v, 0.0);
    }
    m
}

/// Forward map from the 16 real parameters to all 36 outcome probabilities
/// (settings in canonical order, outcomes flat within each).
pub fn forward_matrix(model: &MeasurementModel) -> DMatrix<f64> {
    let mut a = DMatrix::<f64>::zeros(36, 16);
    for k in 0..16 {
        let basis = parameter_basis(k);
        for (s, setting) in BasisSetting::all_nine().into_iter().enumerate() {
            let u4 = model.joint_transform(setting);
            let transformed = &u4 * basis * u4.adjoint();
            for outcome in 0..4 {
                a[(4 * s + outcome, k)] = transformed[(outcome, outcome)].re;
            }
        }
    }
    a
}

/// The stacked square inversion map: the 16 canonical probability rows
/// (4 Z⊗Z diagonals, 8 single-sided rows, 4 both-sided rows) against the 16
/// real parameters.
pub fn stacked_inversion_matrix(model: &MeasurementModel) -> DMatrix<f64> {
    use Basis::*;
    let full = forward_matrix(model);
    let rows: [(BasisSetting, usize); 16] = [
        (BasisSetting::new(Z, Z), 0),
        (BasisSetting::new(Z, Z), 1),
        (BasisSetting::new(Z, Z), 2),
        (BasisSetting::new(Z, Z), 3),
        (BasisSetting::new(X, Z), 0),
        (BasisSetting::new(X, Z), 1),
        (BasisSetting::new(Y, Z), 0),
        (BasisSetting::new(Y, Z), 1),
        (BasisSetting::new(Z, X), 0),
        (BasisSetting::new(Z, X), 2),
        (BasisSetting::new(Z, Y), 0),
        (BasisSetting::new(Z, Y), 2),
        (BasisSetting::new(X, X), 0),
        (BasisSetting::new(X, Y), 0),
        (BasisSetting::new(Y, X), 0),
        (BasisSetting::new(Y, Y), 0),
    ];
    let mut m = DMatrix::<f64>::zeros(16, 16);
    for (r, (setting, outcome)) in rows.into_iter().enumerate() {
        let src = 4 * setting.canonical_index() + outcome;
        for k in 0..16 {
            m[(r, k)] = full[(src, k)];
        }
    }
    m
}

/// Condition number (σ_max/σ_min) of the stacked inversion map.
pub fn stacked_condition_number(model: &MeasurementModel) -> f64 {
    let svd = stacked_inversion_matrix(model).svd(false, false);
    let sv = &svd.singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Least-squares inversion over all 36 probability rows, with the trace
/// constraint eliminated exactly.
pub fn invert_least_squares(
    sp: &SettingProbabilities,
    model: &MeasurementModel,
) -> Result<Matrix4<C64>> {
    let a = forward_matrix(model);
    let mut b = DVector::<f64>::zeros(36);
    for (s, setting) in BasisSetting::all_nine().into_iter().enumerate() {
        let p = sp.get(setting);
        for outcome in 0..4 {
            b[4 * s + outcome] = p[outcome];
        }
    }
    // substitute t3 = 1 - t0 - t1 - t2
    let mut reduced = DMatrix::<f64>::zeros(36, 15);
    for r in 0..36 {
        for k in 0..3 {
            reduced[(r, k)] = a[(r, k)] - a[(r, 3)];
        }
        for k in 4..16 {
            reduced[(r, k - 1)] = a[(r, k)];
        }
        b[r] -= a[(r, 3)];
    }
    let svd = reduced.svd(true, true);
    let sol = svd
        .solve(&b, 1e-12)
        .map_err(|e| Error::MalformedData(format!("least-squares solve failed: {e}")))?;
    let mut t = [0.0; 16];
    t[0] = sol[0];
    t[1] = sol[1];
    t[2] = sol[2];
    t[3] = 1.0 - sol[0] - sol[1] - sol[2];
    for k in 4..16 {
        t[k] = sol[k - 1];
    }
    Ok(matrix_from_parameters(&t))
}

/// Inversion strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InversionMethod {
    /// The per-element scalar formulas (exactly determined rows only).
    ClosedForm,
    /// Full-system least squares using all redundant rows (default).
    LeastSquares,
}

#[derive(Debug, Clone, Copy)]
pub struct ReconstructionOptions {
    pub method: InversionMethod,
    /// Parametric-bootstrap resamples for per-element errors; 0 disables.
    pub bootstrap_resamples: usize,
    pub bootstrap_seed: u64,
    pub bootstrap_noise: NoiseModel,
    /// Allowed trace deviation before renormalization is refused.
    pub trace_tol: f64,
}

impl Default for ReconstructionOptions {
    fn default() -> Self {
        ReconstructionOptions {
            method: InversionMethod::LeastSquares,
            bootstrap_resamples: 0,
            bootstrap_seed: 0,
            bootstrap_noise: NoiseModel::Multinomial,
            trace_tol: 1e-6,
        }
    }
}

fn invert_probabilities(
    sp: &SettingProbabilities,
    model: &MeasurementModel,
    method: InversionMethod,
) -> Result<(Matrix4<C64>, f64)> {
    match method {
        InversionMethod::ClosedForm => invert_closed_form(sp, model),
        InversionMethod::LeastSquares => Ok((invert_least_squares(sp, model)?, 0.0)),
    }
}

/// Full reconstruction from a nine-setting record list.
pub fn reconstruct(
    records: &[CountsRecord],
    model: &MeasurementModel,
    opts: &ReconstructionOptions,
) -> Result<TomographyResult> {
    let sp = SettingProbabilities::from_records(records)?;
    let (raw, asymmetry) = invert_probabilities(&sp, model, opts.method)?;
    let rho = DensityMatrix::from_reconstruction(raw, opts.trace_tol)?;
    let mut result = result_from_matrix(rho, Some(stacked_condition_number(model)), asymmetry);
    if opts.bootstrap_resamples > 1 {
        result.element_errors = Some(bootstrap_errors(
            &sp,
            model,
            opts.method,
            opts.bootstrap_noise,
            opts.bootstrap_resamples,
            opts.bootstrap_seed,
        )?);
    }
    Ok(result)
}

/// Reconstruct directly from exact probabilities (noiseless studies).
pub fn reconstruct_from_probabilities(
    sp: &SettingProbabilities,
    model: &MeasurementModel,
    method: InversionMethod,
) -> Result<TomographyResult> {
    let (raw, asymmetry) = invert_probabilities(sp, model, method)?;
    let rho = DensityMatrix::from_reconstruction(raw, 1e-6)?;
    Ok(result_from_matrix(
        rho,
        Some(stacked_condition_number(model)),
        asymmetry,
    ))
}

/// Assemble a result from externally obtained diagonals and off-diagonals
/// (upper triangle in [`OFFDIAG_PAIRS`] order). The trace is renormalized if
/// within `1e-6` of one, otherwise the input is rejected.
pub fn assemble(diagonals: &[f64; 4], offdiagonals: &[C64; 6]) -> Result<TomographyResult> {
    let mut m = Matrix4::<C64>::zeros();
    for i in 0..4 {
        m[(i, i)] = C64::new(diagonals[i], 0.0);
    }
    for (&(j, k), &v) in OFFDIAG_PAIRS.iter().zip(offdiagonals) {
        m[(j, k)] = v;
        m[(k, j)] = v.conj();
    }
    let rho = DensityMatrix::from_reconstruction(m, 1e-6)?;
    Ok(result_from_matrix(rho, None, 0.0))
}

/// Euclidean projection of a real 4-vector onto the probability simplex.
fn project_to_simplex(vals: [f64; 4]) -> [f64; 4] {
    let mut sorted = vals;
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let candidate = (cumsum - 1.0) / (k + 1) as f64;
        if v - candidate > 0.0 {
            tau = candidate;
        }
    }
    let mut out = [0.0; 4];
    for (o, v) in out.iter_mut().zip(vals) {
        *o = (v - tau).max(0.0);
    }
    out
}

/// Nearest (Frobenius) trace-one positive-semidefinite matrix: eigenvalues
/// are projected onto the probability simplex, eigenvectors kept.
pub fn project_physical(rho: &DensityMatrix) -> DensityMatrix {
    let (vals, vecs) = rho.eigen_desc();
    let projected = project_to_simplex(vals);
    let mut m = Matrix4::<C64>::zeros();
    for k in 0..4 {
        if projected[k] != 0.0 {
            m += (&vecs[k] * vecs[k].adjoint()) * C64::new(projected[k], 0.0);
        }
    }
    for i in 0..4 {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
    }
    DensityMatrix::new(m).expect("simplex projection yields a valid state")
}

/// Uhlmann fidelity F(ρ,σ) = (tr √(√ρ σ √ρ))², in [0, 1].
///
/// Both inputs must be physical (eigenvalues ≥ -1e-9); project first if not.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    for rho in [a, b] {
        let min = rho.eigenvalues_desc()[3];
        if min < -PHYSICALITY_TOL {
            return Err(Error::NonPhysicalState {
                min_eigenvalue: min,
            });
        }
    }
    let (vals, vecs) = a.eigen_desc();
    let mut sqrt_a = Matrix4::<C64>::zeros();
    for k in 0..4 {
        let l = vals[k].max(0.0).sqrt();
        sqrt_a += (&vecs[k] * vecs[k].adjoint()) * C64::new(l, 0.0);
    }
    let inner = &sqrt_a * b.matrix() * sqrt_a;
    let herm = (inner + inner.adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(herm);
    let root_sum: f64 = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok((root_sum * root_sum).min(1.0))
}

/// Purity tr ρ², in [¼, 1] for two qubits.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Best rank-two pure-mixture fit of a state.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Renormalized top-two eigenvalues; they sum to one.
    pub weights: (f64, f64),
    pub components: (PureState2Q, PureState2Q),
    /// Frobenius distance between the input and the two-component
    /// recomposition.
    pub residual: f64,
    /// Set when the top-two eigenvalue split is below 1e-9, making the
    /// dominant component ill-defined.
    pub degenerate_split: bool,
}

/// Eigen-based two-component decomposition: project to the physical set,
/// keep the top two eigenpairs, renormalize their weights.
pub fn decompose_two_component(rho: &DensityMatrix) -> Decomposition {
    let projected = project_physical(rho);
    let (vals, vecs) = projected.eigen_desc();
    let wsum = vals[0] + vals[1];
    let weights = (vals[0] / wsum, vals[1] / wsum);
    let comp = |v: &Vector4<C64>| {
        PureState2Q::new([v[0], v[1], v[2], v[3]])
            .expect("eigenvector has unit norm")
            .canonicalized()
    };
    let c0 = comp(&vecs[0]);
    let c1 = comp(&vecs[1]);
    let recomposition = c0.projector().matrix() * C64::new(weights.0, 0.0)
        + c1.projector().matrix() * C64::new(weights.1, 0.0);
    Decomposition {
        weights,
        residual: frobenius_distance(rho.matrix(), &recomposition),
        degenerate_split: (vals[0] - vals[1]).abs() < 1e-9,
        components: (c0, c1),
    }
}

/// Best convex weight for a known two-component model: minimizes
/// ‖w·P₁ + (1-w)·P₂ − ρ‖_F over w, clamped to [0, 1].
pub fn fit_mixture_weights(
    rho: &DensityMatrix,
    first: &PureState2Q,
    second: &PureState2Q,
) -> (f64, f64) {
    let p1 = first.projector();
    let p2 = second.projector();
    let diff = p1.matrix() - p2.matrix();
    let denom: f64 = diff.iter().map(|c| c.norm_sqr()).sum();
    if denom < 1e-30 {
        return (0.5, 0.5);
    }
    let delta = rho.matrix() - p2.matrix();
    let numer: f64 = delta
        .iter()
        .zip(diff.iter())
        .map(|(x, y)| (x * y.conj()).re)
        .sum();
    let w = (numer / denom).clamp(0.0, 1.0);
    (w, 1.0 - w)
}

fn mix_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Parametric-bootstrap standard error of each matrix element.
///
/// Counts are resimulated from the measured frequencies with the recorded
/// per-setting totals, re-inverted, and the per-element spread is reported
/// as √E|ρ_r − ρ̄|². Resamples use independent seeded streams and are
/// aggregated in index order, so the result does not depend on how the work
/// is scheduled.
pub fn bootstrap_errors(
    sp: &SettingProbabilities,
    model: &MeasurementModel,
    method: InversionMethod,
    noise: NoiseModel,
    resamples: usize,
    seed: u64,
) -> Result<[[f64; 4]; 4]> {
    if resamples < 2 {
        return Err(Error::invalid(
            "bootstrap_resamples",
            "need at least 2 resamples",
        ));
    }
    let settings = BasisSetting::all_nine();
    // sampling law: clamp tiny negatives, renormalize per setting
    let mut law = [[0.0f64; 4]; 9];
    for (i, &setting) in settings.iter().enumerate() {
        let p = sp.get(setting);
        let mut q = [0.0; 4];
        let mut sum = 0.0;
        for k in 0..4 {
            q[k] = p[k].max(0.0);
            sum += q[k];
        }
        if sum <= 0.0 {
            return Err(Error::ZeroTotalCounts {
                setting: setting.label(),
            });
        }
        for v in &mut q {
            *v /= sum;
        }
        law[i] = q;
    }

    let draws: Vec<Result<Matrix4<C64>>> = par::map_indexed(resamples, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, r));
        let mut probs = [[0.0f64; 4]; 9];
        let mut totals = [0u64; 9];
        for (i, &setting) in settings.iter().enumerate() {
            let total = sp.total(setting);
            let counts = draw_counts(&mut rng, &law[i], total, noise);
            let drawn: u64 = counts.iter().sum();
            if drawn == 0 {
                return Err(Error::ZeroTotalCounts {
                    setting: setting.label(),
                });
            }
            for k in 0..4 {
                probs[i][k] = counts[k] as f64 / drawn as f64;
            }
            totals[i] = drawn;
        }
        let resampled = SettingProbabilities { probs, totals };
        invert_probabilities(&resampled, model, method).map(|(m, _)| m)
    });

    let mut matrices = Vec::with_capacity(resamples);
    for d in draws {
        matrices.push(d?);
    }
    let n = matrices.len() as f64;
    let mut mean = Matrix4::<C64>::zeros();
    for m in &matrices {
        mean += m;
    }
    mean /= C64::new(n, 0.0);
    let mut errors = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let var: f64 = matrices
                .iter()
                .map(|m| (m[(i, j)] - mean[(i, j)]).norm_sqr())
                .sum::<f64>()
                / (n - 1.0);
            errors[i][j] = var.sqrt();
        }
    }
    Ok(errors)
}
