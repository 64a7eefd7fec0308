//! Two-qubit state types over the slit basis.
//!
//! The joint basis is ordered (++, +-, -+, --) with the signal slit index
//! first: entry `i = 2·ls + li` where `ls`, `li` are the [`Slit`] indices of
//! the signal and idler photons. Density matrices are kept Hermitian with
//! unit trace; positivity is a *diagnostic*, not an invariant, because
//! linear-inversion tomography can and does produce non-positive matrices.

use nalgebra::{Matrix4, Vector4};
use rand::Rng;

use crate::error::Error;
use crate::geometry::Slit;
use crate::{Result, C64};

/// Labels of the joint slit basis, in storage order.
pub const BASIS_LABELS: [&str; 4] = ["++", "+-", "-+", "--"];

/// Tolerance on Hermiticity and trace deviations for constructed matrices.
pub const MATRIX_TOL: f64 = 1e-12;

/// Eigenvalues above `-PHYSICALITY_TOL` count as physical.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Flat index of the joint basis element with signal slit `s` and idler slit `i`.
#[inline]
pub fn basis_index(s: Slit, i: Slit) -> usize {
    2 * s.index() + i.index()
}

/// Normalized pure state of the two spatial qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState2Q {
    coeffs: Vector4<C64>,
}

impl PureState2Q {
    /// Build a state from coefficients in basis order (++, +-, -+, --).
    /// The vector is normalized; a zero vector is rejected.
    pub fn new(coeffs: [C64; 4]) -> Result<Self> {
        let v = Vector4::from_row_slice(&coeffs);
        let norm = v.norm();
        if !norm.is_finite() || norm < 1e-150 {
            return Err(Error::ZeroNormState);
        }
        Ok(PureState2Q {
            coeffs: v / C64::new(norm, 0.0),
        })
    }

    /// Fix the global phase so the largest-modulus coefficient is real and
    /// positive (first of equals wins). Serialized states are reproducible
    /// under this convention.
    pub fn canonicalized(mut self) -> Self {
        let mut best = 0;
        for i in 1..4 {
            if self.coeffs[i].norm_sqr() > self.coeffs[best].norm_sqr() {
                best = i;
            }
        }
        let c = self.coeffs[best];
        let m = c.norm();
        if m > 0.0 {
            let phase = c / C64::new(m, 0.0);
            self.coeffs /= phase;
        }
        self
    }

    #[inline]
    pub fn coeffs(&self) -> &Vector4<C64> {
        &self.coeffs
    }

    #[inline]
    pub fn coeff(&self, s: Slit, i: Slit) -> C64 {
        self.coeffs[basis_index(s, i)]
    }

    /// Inner product ⟨self|other⟩.
    pub fn overlap(&self, other: &PureState2Q) -> C64 {
        self.coeffs.dotc(&other.coeffs)
    }

    /// Rank-one density matrix |ψ⟩⟨ψ|.
    pub fn projector(&self) -> DensityMatrix {
        let m = &self.coeffs * self.coeffs.adjoint();
        DensityMatrix::new(m).expect("projector of a normalized state is valid")
    }

    /// Haar-like random state (complex Gaussian coefficients, normalized).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        use rand_distr::{Distribution, StandardNormal};
        let mut c = [C64::new(0.0, 0.0); 4];
        for entry in &mut c {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *entry = C64::new(re, im);
        }
        PureState2Q::new(c).expect("Gaussian draw is nonzero almost surely")
    }
}

/// 4×4 Hermitian, trace-one density matrix of the two spatial qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: Matrix4<C64>,
}

impl DensityMatrix {
    /// Validate Hermiticity and unit trace to [`MATRIX_TOL`].
    pub fn new(m: Matrix4<C64>) -> Result<Self> {
        let dev = hermiticity_deviation(&m);
        if dev > MATRIX_TOL {
            return Err(Error::invalid(
                "density_matrix",
                format!("Hermiticity deviation {dev:.3e} exceeds {MATRIX_TOL:.0e}"),
            ));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > MATRIX_TOL || tr.im.abs() > MATRIX_TOL {
            return Err(Error::invalid(
                "density_matrix",
                format!("trace {tr} deviates from 1 beyond {MATRIX_TOL:.0e}"),
            ));
        }
        Ok(DensityMatrix { m })
    }

    /// Repair a nearly-Hermitian matrix: average with its adjoint and rescale
    /// the trace to one. The trace must already be within `trace_tol` of one.
    pub fn from_reconstruction(m: Matrix4<C64>, trace_tol: f64) -> Result<Self> {
        let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let tr = herm.trace().re;
        if (tr - 1.0).abs() > trace_tol {
            return Err(Error::InconsistentTrace {
                trace: tr,
                tolerance: trace_tol,
            });
        }
        // skip the renormalization when it could only perturb entries by
        // rounding
        let mut fixed = if (tr - 1.0).abs() > 4.0 * f64::EPSILON {
            herm / C64::new(tr, 0.0)
        } else {
            herm
        };
        // exact real diagonal after hermitization
        for i in 0..4 {
            fixed[(i, i)] = C64::new(fixed[(i, i)].re, 0.0);
        }
        DensityMatrix::new(fixed)
    }

    /// Maximally mixed state I/4.
    pub fn maximally_mixed() -> Self {
        DensityMatrix {
            m: Matrix4::identity() * C64::new(0.25, 0.0),
        }
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.m
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    /// Eigen-decomposition sorted by descending eigenvalue.
    pub fn eigen_desc(&self) -> ([f64; 4], [Vector4<C64>; 4]) {
        let se = nalgebra::SymmetricEigen::new(self.m);
        let mut order = [0usize, 1, 2, 3];
        order.sort_by(|&i, &j| se.eigenvalues[j].total_cmp(&se.eigenvalues[i]));
        let mut vals = [0.0; 4];
        let mut vecs = [Vector4::zeros(); 4];
        for (slot, &idx) in order.iter().enumerate() {
            vals[slot] = se.eigenvalues[idx];
            vecs[slot] = se.eigenvectors.column(idx).into_owned();
        }
        (vals, vecs)
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues_desc(&self) -> [f64; 4] {
        self.eigen_desc().0
    }

    /// All eigenvalues at least `-tol`?
    pub fn is_physical(&self, tol: f64) -> bool {
        self.eigenvalues_desc().iter().all(|&l| l >= -tol)
    }

    /// Trace of ρ² (¼ for the maximally mixed state, 1 for pure states).
    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    /// Random full-rank physical state: G G† / tr(G G†) with Gaussian G.
    pub fn random_physical<R: Rng + ?Sized>(rng: &mut R) -> Self {
        use rand_distr::{Distribution, StandardNormal};
        let mut g = Matrix4::<C64>::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                g[(i, j)] = C64::new(re, im);
            }
        }
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        let mut normed = m / C64::new(tr, 0.0);
        for i in 0..4 {
            normed[(i, i)] = C64::new(normed[(i, i)].re, 0.0);
        }
        DensityMatrix::new(normed).expect("Gram matrix is Hermitian with unit trace")
    }
}

/// Largest entry-wise deviation between `m` and its adjoint.
pub fn hermiticity_deviation(m: &Matrix4<C64>) -> f64 {
    let diff = m - m.adjoint();
    diff.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Frobenius distance ‖a − b‖_F between two matrices.
pub fn frobenius_distance(a: &Matrix4<C64>, b: &Matrix4<C64>) -> f64 {
    (a - b).norm()
}
