//! Positive-definite quadratic forms and their restrictions to hyperplanes.
//!
//! `|q|` denotes the determinant, i.e. the product of the eigenvalues, and
//! `σ₁(q) ≤ σ₂(q)` the extreme eigenvalues.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};

/// Relative slack tolerated in the distortion precondition `σ₂/σ₁ ≤ Q`.
const DISTORTION_SLACK: f64 = 1e-12;

/// A symmetric positive-definite form on `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    matrix: DMatrix<f64>,
    eigenvalues: Vec<f64>,
}

impl QuadraticForm {
    /// Requires exact symmetry and strictly positive eigenvalues.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return Err(Error::NotPositiveDefinite(format!(
                "expected a non-empty square matrix, got {}x{}",
                n,
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::NotPositiveDefinite("non-finite entry".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if matrix[(i, j)] != matrix[(j, i)] {
                    return Err(Error::NotPositiveDefinite(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        let mut eigenvalues: Vec<f64> = SymmetricEigen::new(matrix.clone()).eigenvalues.iter().copied().collect();
        eigenvalues.sort_by(f64::total_cmp);
        if !(eigenvalues[0] > 0.0) {
            return Err(Error::NotPositiveDefinite(format!("smallest eigenvalue {}", eigenvalues[0])));
        }
        Ok(Self { matrix, eigenvalues })
    }

    pub fn from_rows(n: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != n * n {
            return Err(Error::NotPositiveDefinite(format!("{} entries for dimension {n}", rows.len())));
        }
        Self::new(DMatrix::from_row_slice(n, n, rows))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(values)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Eigenvalues in increasing order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn determinant(&self) -> f64 {
        self.eigenvalues.iter().product()
    }

    /// `(σ₁, σ₂)`: smallest and largest eigenvalue.
    pub fn extremes(&self) -> (f64, f64) {
        (self.eigenvalues[0], *self.eigenvalues.last().expect("non-empty"))
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(&self.matrix * c)
    }

    /// Restriction to the hyperplane orthogonal to `normal`, written in an
    /// orthonormal basis of that hyperplane.
    pub fn restrict(&self, normal: &DVector<f64>) -> Result<QuadraticForm> {
        let basis = hyperplane_basis(normal, self.dim())?;
        let m = basis.transpose() * &self.matrix * &basis;
        QuadraticForm::new(symmetrize(m))
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    // (a + b)/2 is commutative in floating point, so the result is exactly symmetric
    (&m + m.transpose()) * 0.5
}

/// Orthonormal basis (as columns) of `normal^⊥`, by Gram-Schmidt on the
/// coordinate vectors, dropping the one most aligned with the normal.
fn hyperplane_basis(normal: &DVector<f64>, n: usize) -> Result<DMatrix<f64>> {
    if normal.len() != n {
        return Err(Error::InvalidParameter(format!(
            "normal has length {}, form has dimension {n}",
            normal.len()
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("cannot restrict a one-dimensional form".into()));
    }
    let norm = normal.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroNormal);
    }
    let unit = normal / norm;
    let skip = unit.iamax();
    let mut vectors: Vec<DVector<f64>> = vec![unit];
    for i in (0..n).filter(|&i| i != skip) {
        let mut v = DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 });
        // two passes keep the basis orthogonal to working precision
        for _ in 0..2 {
            for w in &vectors {
                let c = w.dot(&v);
                v -= w * c;
            }
        }
        let len = v.norm();
        v /= len;
        vectors.push(v);
    }
    Ok(DMatrix::from_columns(&vectors[1..]))
}

/// Sides and slacks of the two hyperplane inequalities for one instance.
///
/// Slacks are relative to `|q|`, hence invariant under `q → c q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaReport {
    pub det_q: f64,
    pub det_restricted: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    /// `|q₀| σ₁(q)`.
    pub first_rhs: f64,
    /// `|q₀|^{n/(n-1)} / Q`.
    pub second_rhs: f64,
    pub first_slack: f64,
    pub second_slack: f64,
}

impl LemmaReport {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.first_slack >= -tolerance && self.second_slack >= -tolerance
    }
}

/// Evaluates `|q| ≥ |q₀| σ₁(q)` and `|q| ≥ |q₀|^{n/(n-1)}/Q` for the
/// restriction `q₀` of `q` to `normal^⊥`. Requires `σ₂(q)/σ₁(q) ≤ Q`.
pub fn lemma_check(q: &QuadraticForm, normal: &DVector<f64>, quasi: f64) -> Result<LemmaReport> {
    let n = q.dim();
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let (sigma1, sigma2) = q.extremes();
    let ratio = sigma2 / sigma1;
    if !(quasi >= 1.0) || ratio > quasi * (1.0 + DISTORTION_SLACK) {
        return Err(Error::DistortionExceeded { ratio, q: quasi });
    }
    let restricted = q.restrict(normal)?;
    let det_q = q.determinant();
    let det_restricted = restricted.determinant();
    let first_rhs = det_restricted * sigma1;
    let second_rhs = det_restricted.powf(n as f64 / (n as f64 - 1.0)) / quasi;
    Ok(LemmaReport {
        det_q,
        det_restricted,
        sigma1,
        sigma2,
        first_rhs,
        second_rhs,
        first_slack: (det_q - first_rhs) / det_q,
        second_slack: (det_q - second_rhs) / det_q,
    })
}

/// Distance of an instance from the equality pattern of the second
/// inequality: the largest relative deviation of the spectrum from
/// `(λ, Qλ, …, Qλ)` and the angle between `normal` and the `λ` eigenvector.
pub fn equality_deviation(q: &QuadraticForm, normal: &DVector<f64>, quasi: f64) -> Result<(f64, f64)> {
    let eig = SymmetricEigen::new(q.matrix.clone());
    let low = eig.eigenvalues.imin();
    let lambda = eig.eigenvalues[low];
    let spectral = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != low)
        .map(|(_, &mu)| (mu - quasi * lambda).abs() / (quasi * lambda))
        .fold(0.0, f64::max);
    let norm = normal.norm();
    if !(norm > 0.0) {
        return Err(Error::ZeroNormal);
    }
    let cos = (eig.eigenvectors.column(low).dot(normal) / norm).abs().min(1.0);
    Ok((spectral, cos.acos()))
}

/// Haar-distributed orthogonal matrix from the QR factorization of a
/// Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Form `O diag(spectrum) Oᵀ` for the orthogonal matrix `o`.
pub fn conjugated_form(o: &DMatrix<f64>, spectrum: &[f64]) -> Result<QuadraticForm> {
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(spectrum));
    QuadraticForm::new(symmetrize(o * d * o.transpose()))
}

/// Random form of distortion at most `Q` together with a random unit normal.
///
/// The spectrum spans `[λ, Qλ']` with `Q'` slightly below `Q` so rounding in
/// the conjugation cannot break the precondition; about a quarter of the
/// draws put every eigenvalue but one at an endpoint to probe near-equality.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, quasi: f64) -> Result<(QuadraticForm, DVector<f64>)> {
    let lambda = (rng.random::<f64>() * 4.0 - 2.0).exp();
    let top = 1.0 + (quasi - 1.0) * (1.0 - 1e-9);
    let pinned = rng.random::<f64>() < 0.25;
    let spectrum: Vec<f64> = (0..n)
        .map(|i| match (i, pinned) {
            (0, _) => lambda,
            (_, true) => lambda * top,
            (_, false) => lambda * (1.0 + (top - 1.0) * rng.random::<f64>()),
        })
        .collect();
    let o = random_orthogonal(rng, n);
    let form = conjugated_form(&o, &spectrum)?;
    let normal = if pinned && rng.random::<f64>() < 0.5 {
        // nearly the λ eigenvector
        let mut v = o.column(0).into_owned();
        for x in v.iter_mut() {
            *x += 1e-3 * rng.sample::<f64, _>(StandardNormal);
        }
        v
    } else {
        DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
    };
    Ok((form, normal.normalize()))
}

/// Instance attaining equality in the second inequality: spectrum
/// `(λ, Qλ, …, Qλ)` and the hyperplane spanned by the `Qλ` eigenvectors.
pub fn equality_witness<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    quasi: f64,
    lambda: f64,
) -> Result<(QuadraticForm, DVector<f64>)> {
    let spectrum: Vec<f64> = (0..n).map(|i| if i == 0 { lambda } else { quasi * lambda }).collect();
    let o = random_orthogonal(rng, n);
    let form = conjugated_form(&o, &spectrum)?;
    Ok((form, o.column(0).into_owned()))
}
