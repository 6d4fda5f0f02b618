//! Exact dense spectral oracle.
//!
//! Reference implementation the synthesizer is judged against: symmetric
//! eigendecomposition (Householder tridiagonalization plus implicit-shift
//! QL), the matrix exponential `exp(-i t γ H) = Q exp(-i t γ Λ) Q†`, state
//! evolution, and distance metrics. Everything here is a pure function over
//! immutable matrices.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, WalkError};
use crate::graph::{Graph, WalkParams};

/// Centralized numerical tolerances.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Max |a - a^T| accepted as symmetric.
    pub symmetry: f64,
    /// Allowed residual of `Q Λ Q† - A`.
    pub reconstruction: f64,
    /// Allowed deviation of `U† U` from the identity.
    pub unitarity: f64,
    /// Default circuit-vs-oracle verification tolerance.
    pub verify_default: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            symmetry: 1e-12,
            reconstruction: 1e-10,
            unitarity: 1e-11,
            verify_default: 1e-9,
        }
    }
}

/// Eigenvectors (columns of `vectors`) and eigenvalues of a real symmetric
/// matrix, sorted by descending eigenvalue with stable tie order, so that
/// `A = Q diag(Λ) Q^T`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub vectors: Array2<f64>,
    pub values: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `Q diag(λ) Q^T` — reconstructs the decomposed operator.
    pub fn reconstruct(&self) -> Array2<f64> {
        let n = self.dim();
        let q = self.vectors.as_slice().expect("standard layout");
        let mut scaled = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                scaled[i * n + k] = q[i * n + k] * self.values[k];
            }
        }
        let mut out = Array2::zeros((n, n));
        {
            let o = out.as_slice_mut().expect("standard layout");
            o.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
                for (j, slot) in row.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for k in 0..n {
                        acc += scaled[i * n + k] * q[j * n + k];
                    }
                    *slot = acc;
                }
            });
        }
        out
    }

    /// `Q diag(exp(-i t γ λ)) Q^T` — the walk unitary, one matmul per call.
    pub fn evolution(&self, params: WalkParams) -> Array2<Complex64> {
        let n = self.dim();
        let q = self.vectors.as_slice().expect("standard layout");
        let phases: Vec<Complex64> = self
            .values
            .iter()
            .map(|&lambda| Complex64::cis(params.phase(lambda)))
            .collect();
        let mut scaled = vec![Complex64::ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                scaled[i * n + k] = phases[k] * q[i * n + k];
            }
        }
        let mut out = Array2::from_elem((n, n), Complex64::ZERO);
        {
            let o = out.as_slice_mut().expect("standard layout");
            o.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
                for (j, slot) in row.iter_mut().enumerate() {
                    let mut acc = Complex64::ZERO;
                    for k in 0..n {
                        acc += scaled[i * n + k] * q[j * n + k];
                    }
                    *slot = acc;
                }
            });
        }
        out
    }
}

/// A normalized state over the graph's index space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(WalkError::InvalidArgument(format!(
                "state vector norm {norm} differs from 1 by more than 1e-12"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// The basis state `|index>` of the given dimension.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(WalkError::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::ZERO; dim];
        amplitudes[index] = Complex64::ONE;
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub(crate) fn from_raw(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

// ---------------------------------------------------------------------------
// Eigendecomposition
// ---------------------------------------------------------------------------

/// Eigendecomposition of a real symmetric matrix.
///
/// Householder reduction to tridiagonal form followed by the implicit-shift
/// QL iteration, with the orthogonal transform accumulated throughout.
/// Returns eigenvalues sorted descending (stable tie order) with eigenvector
/// columns ordered to match. Rejects input whose asymmetry exceeds the
/// symmetry tolerance.
pub fn eig_hermitian(h: &Array2<f64>) -> Result<SpectralDecomposition> {
    let tol = Tolerances::default();
    let n = h.nrows();
    if h.ncols() != n {
        return Err(WalkError::DimensionMismatch {
            left: n,
            right: h.ncols(),
        });
    }
    let mut max_dev: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            max_dev = max_dev.max((h[[i, j]] - h[[j, i]]).abs());
        }
    }
    if max_dev > tol.symmetry {
        return Err(WalkError::AsymmetricInput { max_dev });
    }
    if n == 0 {
        return Err(WalkError::InvalidArgument("empty matrix".into()));
    }

    let mut v: Vec<f64> = h.iter().copied().collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e, n);
    ql_implicit(&mut v, &mut d, &mut e, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].partial_cmp(&d[i]).expect("finite eigenvalues"));

    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[[row, col]] = v[row * n + src];
        }
    }
    Ok(SpectralDecomposition { vectors, values })
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
///
/// On entry `v` holds the matrix (row-major); on exit it holds the
/// accumulated orthogonal transform, `d` the diagonal and `e` the
/// subdiagonal of the tridiagonal matrix.
fn tridiagonalize(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut hh = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
                v[j * n + i] = 0.0;
            }
        } else {
            for item in d.iter_mut().take(i) {
                *item /= scale;
                hh += *item * *item;
            }
            let mut f = d[i - 1];
            let mut g = hh.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            hh -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[j * n + i] = f;
                g = e[j] + v[j * n + j] * f;
                for k in (j + 1)..i {
                    g += v[k * n + j] * d[k];
                    e[k] += v[k * n + j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= hh;
                f += e[j] * d[j];
            }
            let correction = f / (hh + hh);
            for j in 0..i {
                e[j] -= correction * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k * n + j] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
            }
        }
        d[i] = hh;
    }

    // Accumulate the Householder transformations.
    for i in 0..n.saturating_sub(1) {
        v[(n - 1) * n + i] = v[i * n + i];
        v[i * n + i] = 1.0;
        let hh = d[i + 1];
        if hh != 0.0 {
            for k in 0..=i {
                d[k] = v[k * n + i + 1] / hh;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k * n + i + 1] * v[k * n + j];
                }
                for k in 0..=i {
                    v[k * n + j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k * n + i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
        v[(n - 1) * n + j] = 0.0;
    }
    v[(n - 1) * n + n - 1] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix, rotating
/// the accumulated transform `v` along with it.
fn ql_implicit(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    // Global scale for the negligibility threshold. The classic incremental
    // form breaks on padded inputs whose reduction orders a block of
    // subnormal noise first: a near-zero running scale lets the iteration
    // chase that noise with rotations built from subnormal ratios, which are
    // far from orthogonal.
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
    }

    let mut f = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 64 {
                    return Err(WalkError::Internal(format!(
                        "eigensolver failed to converge at row {l} after {iter} iterations"
                    )));
                }

                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut hh = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= hh;
                }
                f += hh;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    hh = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = hh + s * (c * g + s * d[i]);

                    for k in 0..n {
                        hh = v[k * n + i + 1];
                        v[k * n + i + 1] = s * v[k * n + i] + c * hh;
                        v[k * n + i] = c * v[k * n + i] - s * hh;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Evolution
// ---------------------------------------------------------------------------

/// The walk unitary `exp(-i t γ H)` of a real symmetric `H`.
pub fn expm_hermitian(h: &Array2<f64>, params: WalkParams) -> Result<Array2<Complex64>> {
    Ok(eig_hermitian(h)?.evolution(params))
}

/// Evolve a state without forming the full unitary:
/// `ψ(t) = Q (exp(-i t γ λ) ∘ (Q^T ψ0))`.
pub fn evolve_state(
    h: &Array2<f64>,
    params: WalkParams,
    psi0: &StateVector,
) -> Result<StateVector> {
    let dec = eig_hermitian(h)?;
    let n = dec.dim();
    if psi0.dim() != n {
        return Err(WalkError::DimensionMismatch {
            left: n,
            right: psi0.dim(),
        });
    }
    let q = dec.vectors.as_slice().expect("standard layout");
    let amps = psi0.amplitudes();
    let mut in_basis = vec![Complex64::ZERO; n];
    for k in 0..n {
        let mut acc = Complex64::ZERO;
        for i in 0..n {
            acc += q[i * n + k] * amps[i];
        }
        in_basis[k] = acc * Complex64::cis(params.phase(dec.values[k]));
    }
    let mut out = vec![Complex64::ZERO; n];
    for i in 0..n {
        let mut acc = Complex64::ZERO;
        for k in 0..n {
            acc += q[i * n + k] * in_basis[k];
        }
        out[i] = acc;
    }
    Ok(StateVector::from_raw(out))
}

// ---------------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------------

/// Max entrywise distance together with the spectral-norm distance.
#[derive(Debug, Clone, Copy)]
pub struct UnitaryDistance {
    pub max_entrywise: f64,
    pub spectral: f64,
}

/// Distance between two operators of equal dimension: max entrywise |u - v|,
/// reported alongside the spectral norm of `u - v` (largest eigenvalue of
/// `(u-v)†(u-v)`, found by deterministic power iteration).
pub fn unitary_distance(u: &Array2<Complex64>, v: &Array2<Complex64>) -> Result<UnitaryDistance> {
    if u.dim() != v.dim() {
        return Err(WalkError::DimensionMismatch {
            left: u.nrows(),
            right: v.nrows(),
        });
    }
    let diff = u - v;
    let max_entrywise = diff.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let spectral = spectral_norm(&diff);
    Ok(UnitaryDistance {
        max_entrywise,
        spectral,
    })
}

/// Largest singular value of `m` by power iteration on `m† m`.
///
/// Deterministic: fixed start vector, fixed iteration budget, converges to
/// the dominant eigenvalue of the Gram matrix regardless of degeneracy.
pub fn spectral_norm(m: &Array2<Complex64>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    let data = m.as_slice().expect("standard layout");
    let scale = data.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    // Deterministic non-degenerate start vector.
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + (i as f64) / (n as f64), 0.0))
        .collect();
    normalize(&mut v);
    let mut lambda = 0.0;
    let mut work = vec![Complex64::ZERO; n];
    for _ in 0..200 {
        // work = m v ; v' = m† work
        for i in 0..n {
            let mut acc = Complex64::ZERO;
            for k in 0..n {
                acc += data[i * n + k] * v[k];
            }
            work[i] = acc;
        }
        let mut next = vec![Complex64::ZERO; n];
        for k in 0..n {
            let mut acc = Complex64::ZERO;
            for i in 0..n {
                acc += data[i * n + k].conj() * work[i];
            }
            next[k] = acc;
        }
        let new_lambda = next.iter().map(|z| z.norm()).fold(0.0, f64::max).max(0.0);
        let norm: f64 = next.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        for z in next.iter_mut() {
            *z /= norm;
        }
        let rayleigh = norm_of_image_sq(data, &next, &mut work, n);
        if (rayleigh - lambda).abs() <= 1e-13 * rayleigh.max(1.0) {
            return rayleigh.sqrt();
        }
        lambda = rayleigh;
        let _ = new_lambda;
        v = next;
    }
    lambda.sqrt()
}

fn norm_of_image_sq(data: &[Complex64], v: &[Complex64], work: &mut [Complex64], n: usize) -> f64 {
    for i in 0..n {
        let mut acc = Complex64::ZERO;
        for k in 0..n {
            acc += data[i * n + k] * v[k];
        }
        work[i] = acc;
    }
    work.iter().map(|z| z.norm_sqr()).sum()
}

fn normalize(v: &mut [Complex64]) {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
}

/// Complex matrix product `a · b` (row-major, cache-friendly inner loops).
pub fn matmul(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    if a.ncols() != b.nrows() || b.ncols() != n || a.nrows() != a.ncols() {
        return Err(WalkError::DimensionMismatch {
            left: a.ncols(),
            right: b.nrows(),
        });
    }
    let bt = Array2::from_shape_fn((n, n), |(i, j)| b[[j, i]]);
    let a_owned;
    let ad = match a.as_slice() {
        Some(s) => s,
        None => {
            a_owned = a.as_standard_layout().into_owned();
            a_owned.as_slice().expect("standard layout")
        }
    };
    let btd = bt.as_slice().expect("standard layout");
    let mut out = Array2::from_elem((n, n), Complex64::ZERO);
    {
        let o = out.as_slice_mut().expect("standard layout");
        o.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, slot) in row.iter_mut().enumerate() {
                let mut acc = Complex64::ZERO;
                for k in 0..n {
                    acc += ad[i * n + k] * btd[j * n + k];
                }
                *slot = acc;
            }
        });
    }
    Ok(out)
}

/// Conjugate transpose.
pub fn dagger(m: &Array2<Complex64>) -> Array2<Complex64> {
    Array2::from_shape_fn((m.ncols(), m.nrows()), |(i, j)| m[[j, i]].conj())
}

/// Max entrywise deviation of `U† U` from the identity.
pub fn unitarity_deviation(u: &Array2<Complex64>) -> f64 {
    let gram = matmul(&dagger(u), u).expect("square");
    let n = gram.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j {
                Complex64::ONE
            } else {
                Complex64::ZERO
            };
            dev = dev.max((gram[[i, j]] - expect).norm());
        }
    }
    dev
}

/// Distance between `exp(-itγ(A+B))` and `exp(-itγA)·exp(-itγB)`.
///
/// Zero (to numerical noise) exactly when the factorization of the sum is
/// exact for these inputs, i.e. when the adjacency matrices commute.
pub fn product_formula_gap(a: &Graph, b: &Graph, params: WalkParams) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(WalkError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let sum = a.adjacency_f64() + b.adjacency_f64();
    let joint = expm_hermitian(&sum, params)?;
    let ua = expm_hermitian(&a.adjacency_f64(), params)?;
    let ub = expm_hermitian(&b.adjacency_f64(), params)?;
    let split = matmul(&ua, &ub)?;
    Ok(unitary_distance(&joint, &split)?.max_entrywise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph;
    use ndarray::linalg::kron;

    fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
        assert!((a - b).abs() <= tol, "{what}: {a} vs {b}");
    }

    /// Independent route: Taylor-series exponential of `-i t γ H` with
    /// scaling and squaring. Test-only; never touches the eigensolver.
    fn expm_taylor(h: &Array2<f64>, params: WalkParams) -> Array2<Complex64> {
        let n = h.nrows();
        let mut m = Array2::from_elem((n, n), Complex64::ZERO);
        for i in 0..n {
            for j in 0..n {
                m[[i, j]] = Complex64::new(0.0, -params.gamma * params.t * h[[i, j]]);
            }
        }
        let norm: f64 = m.iter().map(|z| z.norm()).fold(0.0, f64::max) * n as f64;
        let squarings = norm.log2().ceil().max(0.0) as usize + 1;
        m.mapv_inplace(|z| z / (1u64 << squarings) as f64);
        let mut result = Array2::from_elem((n, n), Complex64::ZERO);
        for i in 0..n {
            result[[i, i]] = Complex64::ONE;
        }
        let mut term = result.clone();
        for k in 1..40 {
            term = matmul(&term, &m).unwrap();
            term.mapv_inplace(|z| z / k as f64);
            result += &term;
        }
        for _ in 0..squarings {
            result = matmul(&result, &result).unwrap();
        }
        result
    }

    /// Independent route: cyclic Jacobi rotations. Test-only cross-check of
    /// the Householder/QL production path; returns eigenvalues descending.
    fn jacobi_eigenvalues(h: &Array2<f64>) -> Vec<f64> {
        let n = h.nrows();
        let mut a: Vec<f64> = h.iter().copied().collect();
        for _ in 0..64 {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[p * n + q] * a[p * n + q];
                }
            }
            if off.sqrt() <= 1e-13 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[p * n + k];
                        let akq = a[q * n + k];
                        a[p * n + k] = c * akp - s * akq;
                        a[q * n + k] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                }
            }
        }
        let mut vals: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
        vals.sort_by(|x, y| y.partial_cmp(x).unwrap());
        vals
    }

    #[test]
    fn eigenvalues_match_jacobi_cross_check() {
        for g in [
            graph::path2(),
            graph::complete_graph(2).unwrap(),
            graph::star(2).unwrap(),
            graph::complete_bipartite(2, 1).unwrap(),
            graph::hypercube(4).unwrap(),
            graph::book(2).unwrap(),
        ] {
            let dec = eig_hermitian(&g.adjacency_f64()).unwrap();
            let reference = jacobi_eigenvalues(&g.adjacency_f64());
            for (a, b) in dec.values.iter().zip(&reference) {
                assert!((a - b).abs() <= 1e-10, "{}: {a} vs {b}", g.label());
            }
        }
    }

    #[test]
    fn path2_spectrum() {
        let dec = eig_hermitian(&graph::path2().adjacency_f64()).unwrap();
        assert_close(dec.values[0], 1.0, 1e-12, "lambda0");
        assert_close(dec.values[1], -1.0, 1e-12, "lambda1");
    }

    #[test]
    fn k4_spectrum() {
        let dec = eig_hermitian(&graph::complete_graph(2).unwrap().adjacency_f64()).unwrap();
        let expect = [3.0, -1.0, -1.0, -1.0];
        for (v, e) in dec.values.iter().zip(expect) {
            assert_close(*v, e, 1e-12, "K4 eigenvalue");
        }
    }

    #[test]
    fn padded_bipartite_spectrum() {
        // K_{8,4} in dimension 16: eigenvalues {sqrt(32), 0 x 14, -sqrt(32)}.
        let g = graph::complete_bipartite(3, 2).unwrap();
        let dec = eig_hermitian(&g.adjacency_f64()).unwrap();
        let s = 32f64.sqrt();
        assert_close(dec.values[0], s, 1e-10, "top");
        assert_close(dec.values[15], -s, 1e-10, "bottom");
        for k in 1..15 {
            assert_close(dec.values[k], 0.0, 1e-10, "zero block");
        }
    }

    #[test]
    fn zero_matrix_decomposes_to_identity() {
        let dec = eig_hermitian(&Array2::zeros((4, 4))).unwrap();
        assert!(dec.values.iter().all(|&v| v == 0.0));
        for i in 0..4 {
            for j in 0..4 {
                assert_close(
                    dec.vectors[[i, j]],
                    if i == j { 1.0 } else { 0.0 },
                    0.0,
                    "identity eigenvectors",
                );
            }
        }
    }

    #[test]
    fn eig_rejects_asymmetric_input() {
        let mut m = Array2::zeros((2, 2));
        m[[0, 1]] = 1.0;
        assert!(matches!(
            eig_hermitian(&m),
            Err(WalkError::AsymmetricInput { .. })
        ));
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        // bipartite(7, 6) is the regression case for the negligibility
        // threshold: its tridiagonal reduction leads with subnormal noise,
        // which once sent the QL iteration into non-orthogonal rotations.
        for g in [
            graph::path2(),
            graph::complete_graph(3).unwrap(),
            graph::complete_bipartite(3, 2).unwrap(),
            graph::complete_bipartite(7, 6).unwrap(),
            graph::hypercube(5).unwrap(),
            graph::book(2).unwrap(),
        ] {
            let h = g.adjacency_f64();
            let dec = eig_hermitian(&h).unwrap();
            let rec = dec.reconstruct();
            let residual = (&rec - &h).iter().map(|x| x.abs()).fold(0.0, f64::max);
            assert!(residual <= 1e-10, "{}: residual {residual}", g.label());
            let qtq = dec.vectors.t().dot(&dec.vectors);
            for i in 0..dec.dim() {
                for j in 0..dec.dim() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((qtq[[i, j]] - expect).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn expm_path2_is_the_cos_sin_rotation() {
        let t = 0.83;
        let u = expm_hermitian(
            &graph::path2().adjacency_f64(),
            WalkParams { gamma: 1.0, t },
        )
        .unwrap();
        let c = Complex64::new(t.cos(), 0.0);
        let s = Complex64::new(0.0, -t.sin());
        assert!((u[[0, 0]] - c).norm() < 1e-13);
        assert!((u[[0, 1]] - s).norm() < 1e-13);
        assert!((u[[1, 0]] - s).norm() < 1e-13);
        assert!((u[[1, 1]] - c).norm() < 1e-13);
    }

    #[test]
    fn expm_at_t_zero_is_identity() {
        let u = expm_hermitian(
            &graph::star(2).unwrap().adjacency_f64(),
            WalkParams { gamma: 1.0, t: 0.0 },
        )
        .unwrap();
        assert!(unitary_distance(&u, &eye(8)).unwrap().max_entrywise <= 1e-14);
    }

    fn eye(n: usize) -> Array2<Complex64> {
        let mut m = Array2::from_elem((n, n), Complex64::ZERO);
        for i in 0..n {
            m[[i, i]] = Complex64::ONE;
        }
        m
    }

    #[test]
    fn expm_of_product_factorizes() {
        // Q2's walk equals the tensor product of two P2 walks.
        let params = WalkParams { gamma: 1.0, t: 0.7 };
        let u = expm_hermitian(&graph::hypercube(2).unwrap().adjacency_f64(), params).unwrap();
        let up = expm_hermitian(&graph::path2().adjacency_f64(), params).unwrap();
        let expect = kron(&up, &up);
        assert!(unitary_distance(&u, &expect).unwrap().max_entrywise <= 1e-12);
    }

    #[test]
    fn expm_matches_taylor_route() {
        let params = WalkParams {
            gamma: 0.37,
            t: 1.9,
        };
        for g in [
            graph::star(2).unwrap(),
            graph::complete_graph(2).unwrap(),
            graph::book(1).unwrap(),
        ] {
            let u = expm_hermitian(&g.adjacency_f64(), params).unwrap();
            let v = expm_taylor(&g.adjacency_f64(), params);
            let d = unitary_distance(&u, &v).unwrap().max_entrywise;
            assert!(d <= 1e-11, "{}: {d}", g.label());
        }
    }

    #[test]
    fn expm_group_law_and_unitarity() {
        let h = graph::complete_bipartite(2, 1).unwrap().adjacency_f64();
        let dec = eig_hermitian(&h).unwrap();
        for (t1, t2) in [(0.5, 1.0), (3.3, 7.3), (0.0, 31.4)] {
            let u1 = dec.evolution(WalkParams { gamma: 1.0, t: t1 });
            let u2 = dec.evolution(WalkParams { gamma: 1.0, t: t2 });
            let u12 = dec.evolution(WalkParams {
                gamma: 1.0,
                t: t1 + t2,
            });
            let prod = matmul(&u2, &u1).unwrap();
            assert!(unitary_distance(&prod, &u12).unwrap().max_entrywise <= 1e-10);
            assert!(unitarity_deviation(&u1) <= 1e-11);
        }
    }

    #[test]
    fn evolve_state_examples() {
        let p2 = graph::path2().adjacency_f64();
        let psi0 = StateVector::basis(2, 0).unwrap();
        let out = evolve_state(
            &p2,
            WalkParams {
                gamma: 1.0,
                t: std::f64::consts::FRAC_PI_2,
            },
            &psi0,
        )
        .unwrap();
        assert!(out.amplitudes()[0].norm() <= 1e-11);
        assert!((out.amplitudes()[1] - Complex64::new(0.0, -1.0)).norm() <= 1e-11);

        // t = 0 leaves the state alone.
        let same = evolve_state(&p2, WalkParams { gamma: 1.0, t: 0.0 }, &psi0).unwrap();
        assert!((same.amplitudes()[0] - Complex64::ONE).norm() <= 1e-12);

        // Probability conservation on the star from the center.
        let s = graph::star(1).unwrap();
        let center = StateVector::basis(4, 2).unwrap();
        for t in [0.3, 1.7] {
            let out =
                evolve_state(&s.adjacency_f64(), WalkParams { gamma: 1.0, t }, &center).unwrap();
            assert_close(out.probabilities().iter().sum(), 1.0, 1e-11, "conservation");
        }
    }

    #[test]
    fn distance_between_phased_identities() {
        let n = 3;
        let u = eye(n);
        let mut v = eye(n);
        let phi = 0.1;
        v.mapv_inplace(|z| z * Complex64::cis(phi));
        let d = unitary_distance(&u, &v).unwrap();
        let analytic = 2.0 * (phi / 2.0).sin();
        assert_close(d.max_entrywise, analytic, 1e-12, "max entrywise");
        assert_close(d.spectral, analytic, 1e-9, "spectral");
        let zero = unitary_distance(&u, &u).unwrap();
        assert_eq!(zero.max_entrywise, 0.0);
        assert_eq!(zero.spectral, 0.0);

        let wide = eye(4);
        assert!(matches!(
            unitary_distance(&u, &wide),
            Err(WalkError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spectral_norm_of_known_matrix() {
        // diag(3, -1): spectral norm 3.
        let mut m = Array2::from_elem((2, 2), Complex64::ZERO);
        m[[0, 0]] = Complex64::new(3.0, 0.0);
        m[[1, 1]] = Complex64::new(-1.0, 0.0);
        assert_close(spectral_norm(&m), 3.0, 1e-9, "spectral norm");
    }

    #[test]
    fn product_formula_gap_detects_commutativity() {
        let pair = graph::identity_interlink(&graph::complete_graph(2).unwrap()).unwrap();
        for t in [0.5, 2.5] {
            let gap = product_formula_gap(pair.intra(), pair.inter(), WalkParams { gamma: 1.0, t })
                .unwrap();
            assert!(gap <= 1e-10, "commuting gap {gap}");
        }

        let a = Graph::from_edges(4, &[(0, 1)], "edge01").unwrap();
        let b = Graph::from_edges(4, &[(1, 2)], "edge12").unwrap();
        let gap = product_formula_gap(&a, &b, WalkParams { gamma: 1.0, t: 1.0 }).unwrap();
        assert!(gap > 0.01, "non-commuting gap {gap}");
    }

    use crate::graph::Graph;

    #[test]
    fn state_vector_validation() {
        assert!(StateVector::new(vec![Complex64::new(0.5, 0.0); 2]).is_err());
        assert!(StateVector::basis(4, 4).is_err());
        let s = StateVector::basis(4, 1).unwrap();
        assert_eq!(s.dim(), 4);
        assert_close(s.norm(), 1.0, 0.0, "norm");
    }
}
