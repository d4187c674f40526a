//! Small dense/sparse complex linear-algebra layer.
//!
//! Dense eigenproblems are delegated to `faer`; the sparse path (used only
//! for sector superoperators too large to densify) is a hand-rolled CSR
//! matvec plus a propagator-filtered Arnoldi iteration with Rayleigh-Ritz
//! extraction on the original operator.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use num_complex::Complex64;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub nrows: usize,
    pub ncols: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CMat { nrows, ncols, data: vec![Complex64::ZERO; nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn matmul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.ncols, rhs.nrows);
        let mut out = CMat::zeros(self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.ncols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> CMat {
        let mut out = CMat::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn sub(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> CMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.nrows.min(self.ncols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Column-stacking vectorization: vec(M)[j*n + i] = M[i, j].
    pub fn vec(&self) -> Vec<Complex64> {
        let mut v = Vec::with_capacity(self.nrows * self.ncols);
        for j in 0..self.ncols {
            for i in 0..self.nrows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    pub fn unvec(v: &[Complex64], nrows: usize) -> CMat {
        assert_eq!(v.len() % nrows, 0);
        let ncols = v.len() / nrows;
        let mut m = CMat::zeros(nrows, ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                m[(i, j)] = v[j * nrows + i];
            }
        }
        m
    }

    pub fn to_faer(&self) -> Mat<Complex64> {
        Mat::from_fn(self.nrows, self.ncols, |i, j| self[(i, j)])
    }

    pub fn from_faer(m: faer::MatRef<'_, Complex64>) -> CMat {
        let mut out = CMat::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out[(i, j)] = m[(i, j)];
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.ncols + j]
    }
}

/// Full eigendecomposition of a general complex matrix.
/// Returns (eigenvalues, eigenvector matrix), unordered.
pub fn eig_general(m: &CMat) -> crate::Result<(Vec<Complex64>, CMat)> {
    assert_eq!(m.nrows, m.ncols);
    let evd = m
        .to_faer()
        .eigen()
        .map_err(|e| crate::Error::Numerics(format!("eigendecomposition failed: {e:?}")))?;
    let vals: Vec<Complex64> = evd.S().column_vector().iter().copied().collect();
    Ok((vals, CMat::from_faer(evd.U().as_ref())))
}

/// Eigenvalues and vectors of a Hermitian matrix, ascending.
pub fn eig_hermitian(m: &CMat) -> crate::Result<(Vec<f64>, CMat)> {
    assert_eq!(m.nrows, m.ncols);
    let evd = m
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| crate::Error::Numerics(format!("hermitian eigen failed: {e:?}")))?;
    let vals: Vec<f64> = evd.S().column_vector().iter().map(|z| z.re).collect();
    Ok((vals, CMat::from_faer(evd.U().as_ref())))
}

/// Spectral projector onto the span of the selected eigenvectors, using left
/// eigenvectors from the inverse of the eigenvector matrix. Applies the
/// projector to `v`.
pub fn spectral_project(evecs: &CMat, selected: &[usize], v: &[Complex64]) -> Vec<Complex64> {
    let n = evecs.nrows;
    let u = evecs.to_faer();
    let lu = u.full_piv_lu();
    let rhs = Mat::from_fn(n, 1, |i, _| v[i]);
    let y = lu.solve(&rhs); // y = U^{-1} v
    let mut out = vec![Complex64::ZERO; n];
    for &k in selected {
        let c = y[(k, 0)];
        for i in 0..n {
            out[i] += c * evecs[(i, k)];
        }
    }
    out
}

/// Orthonormalizes the columns of `m` (modified Gram-Schmidt, two passes),
/// dropping numerically dependent columns.
pub fn orthonormal_columns(m: &CMat, tol: f64) -> CMat {
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    for j in 0..m.ncols {
        let mut v: Vec<Complex64> = (0..m.nrows).map(|i| m[(i, j)]).collect();
        for _ in 0..2 {
            for q in &cols {
                let ip: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q.iter()) {
                    *vi -= ip * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > tol {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            cols.push(v);
        }
    }
    let mut out = CMat::zeros(m.nrows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for i in 0..m.nrows {
            out[(i, j)] = c[i];
        }
    }
    out
}

/// Largest principal-angle sine between two subspaces given by (orthonormal)
/// column bases, computed from the projection residual b - a (a' b) so that
/// aligned spans report at machine precision. Returns 1.0 when the
/// dimensions differ.
pub fn subspace_distance(a: &CMat, b: &CMat) -> f64 {
    if a.ncols != b.ncols {
        return 1.0;
    }
    if a.ncols == 0 {
        return 0.0;
    }
    let residual = b.sub(&a.matmul(&a.dagger().matmul(b)));
    let svals = residual.to_faer().singular_values().expect("svd failed");
    svals.iter().cloned().fold(0.0, f64::max)
}

/// Compressed sparse row matrix over Complex64.
#[derive(Debug, Clone)]
pub struct Csr {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<Complex64>,
}

impl Csr {
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Csr {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut indptr = vec![0usize; n + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut data: Vec<Complex64> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            indices.push(c);
            data.push(v);
            indptr[r + 1] += 1;
        }
        for r in 0..n {
            indptr[r + 1] += indptr[r];
        }
        // merge duplicate columns within each row
        let mut m_indptr = vec![0usize; n + 1];
        let mut m_indices = Vec::with_capacity(indices.len());
        let mut m_data = Vec::with_capacity(data.len());
        for r in 0..n {
            let lo = indptr[r];
            let hi = indptr[r + 1];
            let mut k = lo;
            while k < hi {
                let c = indices[k];
                let mut v = data[k];
                let mut k2 = k + 1;
                while k2 < hi && indices[k2] == c {
                    v += data[k2];
                    k2 += 1;
                }
                if v.norm_sqr() > 0.0 {
                    m_indices.push(c);
                    m_data.push(v);
                }
                k = k2;
            }
            m_indptr[r + 1] = m_indices.len();
        }
        Csr { n, indptr: m_indptr, indices: m_indices, data: m_data }
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for r in 0..self.n {
            let mut acc = Complex64::ZERO;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.data[k] * x[self.indices[k]];
            }
            y[r] = acc;
        }
    }

    pub fn max_row_abs_sum(&self) -> f64 {
        (0..self.n)
            .map(|r| {
                (self.indptr[r]..self.indptr[r + 1])
                    .map(|k| self.data[k].norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.n, self.n);
        for r in 0..self.n {
            for k in self.indptr[r]..self.indptr[r + 1] {
                m[(r, self.indices[k])] += self.data[k];
            }
        }
        m
    }
}

fn axpy(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        *yi += a * xi;
    }
}

fn nrm2(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dotc(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// One classical RK4 step of y' = A y.
fn rk4_step(a: &Csr, y: &mut Vec<Complex64>, dt: f64, scratch: &mut [Vec<Complex64>; 4]) {
    let n = a.n;
    let [k1, k2, k3, tmp] = scratch;
    a.matvec(y, k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * dt * k1[i];
    }
    a.matvec(tmp, k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * dt * k2[i];
    }
    a.matvec(tmp, k3);
    for i in 0..n {
        tmp[i] = y[i] + dt * k3[i];
    }
    let k4 = tmp.clone();
    let mut k4v = vec![Complex64::ZERO; n];
    a.matvec(&k4, &mut k4v);
    for i in 0..n {
        y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4v[i]);
    }
}

/// Ritz pairs of `a` from a Krylov space built with the time propagator
/// exp(tau * a) (RK4-approximated). Targets the eigenvalues of largest real
/// part; suitable for Lindbladian spectra where Re(lambda) <= 0.
///
/// Returns (ritz values, residual norms), sorted by descending real part.
pub fn filtered_arnoldi_spectrum(
    a: &Csr,
    krylov_dim: usize,
    steps_per_apply: usize,
    seed: u64,
) -> Vec<(Complex64, f64)> {
    let n = a.n;
    let dim = krylov_dim.min(n);
    let norm_bound = a.max_row_abs_sum().max(1e-12);
    let dt = 1.5 / norm_bound;

    // deterministic pseudo-random start
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
    let mut rand_unit = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state as f64 / u64::MAX as f64) * 2.0 - 1.0
    };
    let mut v0: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rand_unit(), rand_unit()))
        .collect();
    let norm = nrm2(&v0);
    v0.iter_mut().for_each(|z| *z /= norm);

    let mut basis: Vec<Vec<Complex64>> = vec![v0];
    let mut scratch = [
        vec![Complex64::ZERO; n],
        vec![Complex64::ZERO; n],
        vec![Complex64::ZERO; n],
        vec![Complex64::ZERO; n],
    ];
    for j in 0..dim - 1 {
        let mut w = basis[j].clone();
        for _ in 0..steps_per_apply {
            rk4_step(a, &mut w, dt, &mut scratch);
        }
        // two-pass MGS
        for _ in 0..2 {
            for q in &basis {
                let ip = dotc(q, &w);
                axpy(&mut w, -ip, q);
            }
        }
        let norm = nrm2(&w);
        if norm < 1e-13 {
            break;
        }
        w.iter_mut().for_each(|z| *z /= norm);
        basis.push(w);
    }

    // Rayleigh-Ritz on the original operator
    let k = basis.len();
    let mut av: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    for q in &basis {
        let mut y = vec![Complex64::ZERO; n];
        a.matvec(q, &mut y);
        av.push(y);
    }
    let mut h = CMat::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            h[(i, j)] = dotc(&basis[i], &av[j]);
        }
    }
    let (vals, vecs) = eig_general(&h).expect("small dense eig");
    let mut out = Vec::with_capacity(k);
    for (idx, theta) in vals.iter().enumerate() {
        // residual ||A V y - theta V y||
        let mut res = vec![Complex64::ZERO; n];
        let mut vy = vec![Complex64::ZERO; n];
        for j in 0..k {
            let c = vecs[(j, idx)];
            axpy(&mut res, c, &av[j]);
            axpy(&mut vy, c, &basis[j]);
        }
        axpy(&mut res, -theta, &vy);
        let scale = nrm2(&vy).max(1e-300);
        out.push((*theta, nrm2(&res) / scale));
    }
    out.sort_by(|x, y| y.0.re.partial_cmp(&x.0.re).unwrap());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_eig_recovers_diagonal() {
        let mut m = CMat::zeros(3, 3);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(1, 1)] = Complex64::new(-2.0, 0.5);
        m[(2, 2)] = Complex64::new(0.0, -1.0);
        let (vals, _) = eig_general(&m).unwrap();
        let mut re: Vec<f64> = vals.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn csr_merges_duplicates() {
        let t = vec![
            (0, 0, Complex64::ONE),
            (0, 0, Complex64::ONE),
            (1, 0, Complex64::new(0.0, 1.0)),
        ];
        let m = Csr::from_triplets(2, t);
        let x = vec![Complex64::ONE, Complex64::ONE];
        let mut y = vec![Complex64::ZERO; 2];
        m.matvec(&x, &mut y);
        assert_eq!(y[0], Complex64::new(2.0, 0.0));
        assert_eq!(y[1], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn filtered_arnoldi_finds_slow_modes() {
        // diagonal operator with known spectrum
        let n = 200;
        let mut trips = Vec::new();
        for i in 0..n {
            let lam = if i == 0 {
                Complex64::ZERO
            } else {
                Complex64::new(-0.3 - 0.01 * i as f64, 0.1 * ((i % 7) as f64 - 3.0))
            };
            trips.push((i, i, lam));
        }
        let a = Csr::from_triplets(n, trips);
        let ritz = filtered_arnoldi_spectrum(&a, 60, 10, 7);
        let zero = ritz.iter().find(|(v, r)| v.norm() < 1e-8 && *r < 1e-8);
        assert!(zero.is_some(), "null mode found");
        let gap = ritz
            .iter()
            .filter(|(v, r)| v.re < -1e-6 && *r < 1e-7)
            .map(|(v, _)| -v.re)
            .fold(f64::INFINITY, f64::min);
        assert!((gap - 0.31).abs() < 1e-6, "gap {gap}");
    }

    #[test]
    fn subspace_distance_detects_overlap() {
        let mut a = CMat::zeros(4, 2);
        a[(0, 0)] = Complex64::ONE;
        a[(1, 1)] = Complex64::ONE;
        let mut b = CMat::zeros(4, 2);
        b[(0, 0)] = Complex64::ONE;
        b[(2, 1)] = Complex64::ONE;
        assert!(subspace_distance(&a, &a) < 1e-14);
        assert!((subspace_distance(&a, &b) - 1.0).abs() < 1e-14);
    }
}
