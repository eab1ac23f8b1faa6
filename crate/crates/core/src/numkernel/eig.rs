//! Hermitian eigendecomposition by cyclic Jacobi rotations.
//!
//! Sizes in this crate stay at or below a few hundred rows, where Jacobi's
//! simplicity and accuracy beat anything fancier.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{ComplexMatrix, ComplexVector};

/// Hard cap on matrix size accepted by the eigensolver.
pub const EIG_SIZE_CAP: usize = 256;

const MAX_SWEEPS: usize = 64;

/// One eigenvalue with its unit-norm eigenvector.
#[derive(Debug, Clone)]
pub struct EigPair {
    pub value: f64,
    pub vector: ComplexVector,
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Returns all `n` pairs sorted by descending eigenvalue. Eigenvector phases
/// are normalized so the largest-magnitude entry of each vector is real and
/// nonnegative, which makes results deterministic.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<Vec<EigPair>> {
    a.require_hermitian()?;
    if a.rows > EIG_SIZE_CAP {
        return Err(Error::TooLarge { size: a.rows, cap: EIG_SIZE_CAP });
    }
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }

    // Work on an exactly-Hermitian copy so rotation updates can assume
    // a[j][i] = conj(a[i][j]).
    let mut m = a.hermitize();
    let mut q = ComplexMatrix::identity(n);

    let scale = m.frobenius_norm();
    if scale == 0.0 {
        // Zero matrix: eigenvalues all zero, vectors the standard basis.
        return Ok((0..n)
            .map(|i| EigPair { value: 0.0, vector: ComplexVector::basis(n, i) })
            .collect());
    }
    let stop = 1e-15 * scale;

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                rotate(&mut m, &mut q, p, r);
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > stop.max(1e-12 * scale) {
        return Err(Error::ConvergenceFailure("Jacobi eigendecomposition"));
    }

    let mut pairs: Vec<EigPair> = (0..n)
        .map(|i| EigPair { value: m[(i, i)].re, vector: normalize_phase(q.column(i)) })
        .collect();
    pairs.sort_by(|x, y| y.value.partial_cmp(&x.value).unwrap());
    Ok(pairs)
}

/// The largest eigenvalue and its eigenvector.
pub fn max_eigpair(a: &ComplexMatrix) -> Result<EigPair> {
    let pairs = hermitian_eig(a)?;
    pairs.into_iter().next().ok_or(Error::DimensionMismatch { expected: 1, got: 0 })
}

/// Projection onto the positive semidefinite cone: clamp negative
/// eigenvalues to zero and reassemble.
pub fn psd_project(s: &ComplexMatrix) -> Result<ComplexMatrix> {
    let pairs = hermitian_eig(s)?;
    let n = s.rows;
    let mut out = ComplexMatrix::zeros(n, n);
    for pair in &pairs {
        if pair.value <= 0.0 {
            continue;
        }
        let v = &pair.vector;
        for i in 0..n {
            let vi = v.entries[i] * pair.value;
            for j in 0..n {
                out[(i, j)] += vi * v.entries[j].conj();
            }
        }
    }
    Ok(out.hermitize())
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows;
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            acc += 2.0 * m[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

/// Zero out entry (p, r) of Hermitian `m` with a unitary plane rotation,
/// accumulating the rotation into `q`.
fn rotate(m: &mut ComplexMatrix, q: &mut ComplexMatrix, p: usize, r: usize) {
    let beta = m[(p, r)];
    let beta_abs = beta.norm();
    if beta_abs == 0.0 {
        return;
    }
    let alpha = m[(p, p)].re;
    let gamma = m[(r, r)].re;

    // tan of the rotation angle: smaller-magnitude root of
    // |beta| t^2 + (gamma - alpha) t - |beta| = 0.
    let tau = (gamma - alpha) / (2.0 * beta_abs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let sigma = t * c;
    let phase = beta / beta_abs;
    let s = phase * sigma; // complex sine-like factor

    let n = m.rows;

    // M <- G^H M G with G = I except G[p,p]=c, G[p,r]=s, G[r,p]=-conj(s), G[r,r]=c.
    // Columns first: M G.
    for i in 0..n {
        let mip = m[(i, p)];
        let mir = m[(i, r)];
        m[(i, p)] = mip * c - mir * s.conj();
        m[(i, r)] = mip * s + mir * c;
    }
    // Rows: G^H (M G).
    for j in 0..n {
        let mpj = m[(p, j)];
        let mrj = m[(r, j)];
        m[(p, j)] = mpj * c - mrj * s;
        m[(r, j)] = mpj * s.conj() + mrj * c;
    }
    // Exactness at the pivot: the rotation is built to annihilate (p, r).
    m[(p, r)] = Complex64::new(0.0, 0.0);
    m[(r, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(r, r)] = Complex64::new(m[(r, r)].re, 0.0);

    // Accumulate eigenvectors: Q <- Q G.
    for i in 0..n {
        let qip = q[(i, p)];
        let qir = q[(i, r)];
        q[(i, p)] = qip * c - qir * s.conj();
        q[(i, r)] = qip * s + qir * c;
    }
}

/// Rotate a unit vector's global phase so its largest-magnitude entry is
/// real nonnegative.
fn normalize_phase(v: ComplexVector) -> ComplexVector {
    let mut best = 0usize;
    let mut best_mag = 0.0f64;
    for (i, z) in v.entries.iter().enumerate() {
        let mag = z.norm_sqr();
        if mag > best_mag {
            best_mag = mag;
            best = i;
        }
    }
    if best_mag == 0.0 {
        return v;
    }
    let z = v.entries[best];
    let phase = z / z.norm();
    v.scale(phase.conj())
}
