//! File formats: state JSON, tomography-result JSON, counts CSV, and the
//! plain-text matrix display.
//!
//! Complex entries serialize as `[re, im]` pairs with the basis order fixed
//! as (++, +-, -+, --); floats round-trip bit-exactly through JSON. The
//! counts CSV has the fixed column order `setting,k_s,k_i,count,seed,total`,
//! one row per outcome, with the master seed repeated in a leading `#`
//! comment line.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::measurement::{BasisSetting, CountsRecord};
use crate::states::{DensityMatrix, PureState2Q, BASIS_LABELS};
use crate::tomography::{SchwarzViolation, TomographyResult};
use crate::{Result, C64};

type PackedVector = [[f64; 2]; 4];
type PackedMatrix = [[[f64; 2]; 4]; 4];

fn pack_matrix(m: &Matrix4<C64>) -> PackedMatrix {
    let mut out = [[[0.0; 2]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = [m[(i, j)].re, m[(i, j)].im];
        }
    }
    out
}

fn unpack_matrix(p: &PackedMatrix) -> Matrix4<C64> {
    let mut m = Matrix4::<C64>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = C64::new(p[i][j][0], p[i][j][1]);
        }
    }
    m
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PureStateFile {
    kind: String,
    basis: [String; 4],
    coeffs: PackedVector,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityMatrixFile {
    kind: String,
    basis: [String; 4],
    rho: PackedMatrix,
}

fn basis_strings() -> [String; 4] {
    BASIS_LABELS.map(str::to_string)
}

fn check_basis(basis: &[String; 4], path: &Path) -> Result<()> {
    if basis.iter().map(String::as_str).ne(BASIS_LABELS) {
        return Err(Error::MalformedData(format!(
            "{}: unexpected basis order {:?}",
            path.display(),
            basis
        )));
    }
    Ok(())
}

pub fn save_pure_state(path: &Path, state: &PureState2Q) -> Result<()> {
    let mut coeffs = [[0.0; 2]; 4];
    for (slot, c) in coeffs.iter_mut().zip(state.coeffs().iter()) {
        *slot = [c.re, c.im];
    }
    let file = PureStateFile {
        kind: "pure_state".to_string(),
        basis: basis_strings(),
        coeffs,
    };
    write_json(path, &file)
}

pub fn load_pure_state(path: &Path) -> Result<PureState2Q> {
    let file: PureStateFile = read_json(path)?;
    if file.kind != "pure_state" {
        return Err(Error::MalformedData(format!(
            "{}: expected kind pure_state, got {}",
            path.display(),
            file.kind
        )));
    }
    check_basis(&file.basis, path)?;
    let c = file.coeffs.map(|[re, im]| C64::new(re, im));
    PureState2Q::new(c)
}

pub fn save_density_matrix(path: &Path, rho: &DensityMatrix) -> Result<()> {
    let file = DensityMatrixFile {
        kind: "density_matrix".to_string(),
        basis: basis_strings(),
        rho: pack_matrix(rho.matrix()),
    };
    write_json(path, &file)
}

pub fn load_density_matrix(path: &Path) -> Result<DensityMatrix> {
    let file: DensityMatrixFile = read_json(path)?;
    if file.kind != "density_matrix" {
        return Err(Error::MalformedData(format!(
            "{}: expected kind density_matrix, got {}",
            path.display(),
            file.kind
        )));
    }
    check_basis(&file.basis, path)?;
    DensityMatrix::new(unpack_matrix(&file.rho))
}

/// Load either a pure-state or a density-matrix file as a density matrix.
pub fn load_state_as_density(path: &Path) -> Result<DensityMatrix> {
    #[derive(Deserialize)]
    struct Probe {
        kind: String,
    }
    let text = fs::read_to_string(path)?;
    let probe: Probe = serde_json::from_str(&text)?;
    match probe.kind.as_str() {
        "pure_state" => Ok(load_pure_state(path)?.projector()),
        "density_matrix" => load_density_matrix(path),
        other => Err(Error::MalformedData(format!(
            "{}: unknown state kind '{other}'",
            path.display()
        ))),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ViolationFile {
    pair: [String; 2],
    indices: [usize; 2],
    modulus: f64,
    bound: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResultFile {
    kind: String,
    basis: [String; 4],
    rho: PackedMatrix,
    eigenvalues: [f64; 4],
    schwarz_violations: Vec<ViolationFile>,
    condition_number: Option<f64>,
    element_errors: Option<[[f64; 4]; 4]>,
    hermitization_asymmetry: f64,
    physical: bool,
}

pub fn save_result(path: &Path, result: &TomographyResult) -> Result<()> {
    let file = ResultFile {
        kind: "tomography_result".to_string(),
        basis: basis_strings(),
        rho: pack_matrix(result.rho.matrix()),
        eigenvalues: result.eigenvalues,
        schwarz_violations: result
            .schwarz_violations
            .iter()
            .map(|v| ViolationFile {
                pair: [
                    BASIS_LABELS[v.j].to_string(),
                    BASIS_LABELS[v.k].to_string(),
                ],
                indices: [v.j, v.k],
                modulus: v.modulus,
                bound: v.bound,
            })
            .collect(),
        condition_number: result.condition_number,
        element_errors: result.element_errors,
        hermitization_asymmetry: result.hermitization_asymmetry,
        physical: result.physical,
    };
    write_json(path, &file)
}

pub fn load_result(path: &Path) -> Result<TomographyResult> {
    let file: ResultFile = read_json(path)?;
    if file.kind != "tomography_result" {
        return Err(Error::MalformedData(format!(
            "{}: expected kind tomography_result, got {}",
            path.display(),
            file.kind
        )));
    }
    check_basis(&file.basis, path)?;
    Ok(TomographyResult {
        rho: DensityMatrix::new(unpack_matrix(&file.rho))?,
        schwarz_violations: file
            .schwarz_violations
            .into_iter()
            .map(|v| SchwarzViolation {
                j: v.indices[0],
                k: v.indices[1],
                modulus: v.modulus,
                bound: v.bound,
            })
            .collect(),
        eigenvalues: file.eigenvalues,
        condition_number: file.condition_number,
        element_errors: file.element_errors,
        hermitization_asymmetry: file.hermitization_asymmetry,
        physical: file.physical,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n")?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CountsFile {
    kind: String,
    records: Vec<CountsRecord>,
}

/// Counts as JSON (the CSV twin, for programmatic consumers).
pub fn write_counts_json(path: &Path, records: &[CountsRecord]) -> Result<()> {
    write_json(
        path,
        &CountsFile {
            kind: "counts".to_string(),
            records: records.to_vec(),
        },
    )
}

pub fn read_counts_json(path: &Path) -> Result<Vec<CountsRecord>> {
    let file: CountsFile = read_json(path)?;
    if file.kind != "counts" {
        return Err(Error::MalformedData(format!(
            "{}: expected kind counts, got {}",
            path.display(),
            file.kind
        )));
    }
    Ok(file.records)
}

#[derive(Serialize, Deserialize)]
struct CountsRow {
    setting: String,
    k_s: u8,
    k_i: u8,
    count: u64,
    seed: u64,
    total: u64,
}

/// Write counts as CSV: a `# seed=` comment, a header, then one row per
/// outcome in fixed order.
pub fn write_counts_csv(path: &Path, records: &[CountsRecord]) -> Result<()> {
    let mut raw = Vec::new();
    if let Some(first) = records.first() {
        writeln!(&mut raw, "# seed={}", first.seed)?;
    }
    {
        let mut w = csv::Writer::from_writer(&mut raw);
        for rec in records {
            for k in 0..4u8 {
                w.serialize(CountsRow {
                    setting: rec.setting.label(),
                    k_s: k / 2,
                    k_i: k % 2,
                    count: rec.counts[k as usize],
                    seed: rec.seed,
                    total: rec.total,
                })?;
            }
        }
        w.flush()?;
    }
    fs::write(path, raw)?;
    Ok(())
}

/// Read a counts CSV written by [`write_counts_csv`]. Settings may appear in
/// any order; each needs all four outcome rows exactly once.
pub fn read_counts_csv(path: &Path) -> Result<Vec<CountsRecord>> {
    let text = fs::read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut order: Vec<BasisSetting> = Vec::new();
    let mut partial: std::collections::HashMap<String, (CountsRecord, [bool; 4])> =
        std::collections::HashMap::new();
    for row in reader.deserialize() {
        let row: CountsRow = row?;
        let setting = BasisSetting::parse(&row.setting)?;
        if row.k_s > 1 || row.k_i > 1 {
            return Err(Error::MalformedData(format!(
                "outcome ({}, {}) out of range",
                row.k_s, row.k_i
            )));
        }
        let entry = partial.entry(row.setting.clone()).or_insert_with(|| {
            order.push(setting);
            (
                CountsRecord {
                    setting,
                    counts: [0; 4],
                    total: row.total,
                    seed: row.seed,
                },
                [false; 4],
            )
        });
        let flat = (row.k_s * 2 + row.k_i) as usize;
        if entry.1[flat] {
            return Err(Error::MalformedData(format!(
                "duplicate outcome row for setting {} ({}, {})",
                row.setting, row.k_s, row.k_i
            )));
        }
        entry.0.counts[flat] = row.count;
        entry.1[flat] = true;
    }
    let mut records = Vec::with_capacity(order.len());
    for setting in order {
        let (rec, seen) = partial
            .remove(&setting.label())
            .expect("setting was inserted");
        if seen != [true; 4] {
            return Err(Error::MalformedData(format!(
                "setting {} is missing outcome rows",
                setting.label()
            )));
        }
        records.push(rec);
    }
    Ok(records)
}

/// Terminal display of a 4×4 complex matrix, aligned columns, three
/// decimals, imaginary parts only where nonzero.
pub fn pretty_matrix(m: &Matrix4<C64>) -> String {
    let mut out = String::new();
    for i in 0..4 {
        for j in 0..4 {
            let e = m[(i, j)];
            let cell = if e.im == 0.0 {
                format!("{:.3}", e.re)
            } else {
                format!("{:.3}{:+.3}i", e.re, e.im)
            };
            out.push_str(&format!("{cell:>15}"));
        }
        out.push('\n');
    }
    out
}
