//! Dense complex matrices and the few factorizations the designs need.
//!
//! Everything is written against small-to-medium matrices (a few hundred
//! rows at most), so the implementations favour clarity and bit-for-bit
//! determinism over asymptotic tricks:
//!
//! - row-major `CMat<T>` with the usual products and block extraction
//! - LU solve with partial pivoting (no explicit inverses anywhere)
//! - Cholesky log-determinant for `I + c·M` rate evaluations
//! - cyclic Jacobi eigendecomposition for Hermitian matrices, with a fixed
//!   sweep order and a phase convention that makes eigenvectors reproducible

use crate::scalar::{czero, Scalar, C};

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Scalar> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Column vector from a slice.
    pub fn col_vec(v: &[C<T>]) -> Self {
        CMat {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> Self {
        let mut m = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    /// `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `selfᴴ * other` without materializing the transpose.
    pub fn herm_mul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "herm_mul dimension mismatch");
        let mut out = CMat::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            for i in 0..self.cols {
                let a = self[(k, i)].conj();
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn scale_re(&self, s: T) -> Self {
        let mut out = self.clone();
        for z in &mut out.data {
            *z = C::new(z.re * s, z.im * s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (z, w) in out.data.iter_mut().zip(&other.data) {
            *z = *z + *w;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (z, w) in out.data.iter_mut().zip(&other.data) {
            *z = *z - *w;
        }
        out
    }

    /// `self += s · g · gᴴ`, the rank-k interference update.
    pub fn rank_update(&mut self, s: T, g: &Self) {
        assert_eq!(self.rows, g.rows);
        assert_eq!(self.cols, g.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let mut acc: C<T> = czero();
                for k in 0..g.cols {
                    acc = acc + g[(i, k)] * g[(j, k)].conj();
                }
                self[(i, j)] = self[(i, j)] + C::new(acc.re * s, acc.im * s);
            }
        }
    }

    /// Contiguous sub-matrix copy.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(
            r0 + nr <= self.rows && c0 + nc <= self.cols,
            "block out of bounds"
        );
        CMat::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        assert!(
            r0 + b.rows <= self.rows && c0 + b.cols <= self.cols,
            "block out of bounds"
        );
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    pub fn col(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn fro_norm_sqr(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn fro_norm(&self) -> T {
        self.fro_norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `(self + selfᴴ)/2`, the defensively symmetrized Hermitian part.
    pub fn hermitian_part(&self) -> Self {
        assert_eq!(self.rows, self.cols);
        let half = T::from_f64_lit(0.5);
        CMat::from_fn(self.rows, self.rows, |i, j| {
            let z = self[(i, j)] + self[(j, i)].conj();
            C::new(z.re * half, z.im * half)
        })
    }

    /// Solve `self · X = rhs` by LU with partial pivoting.
    ///
    /// Returns `None` when a pivot falls below the numerical-singularity
    /// threshold.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "solve needs a square matrix");
        assert_eq!(self.rows, rhs.rows, "solve rhs row mismatch");
        let n = self.rows;
        if n == 0 {
            return Some(CMat::zeros(0, rhs.cols));
        }
        let mut lu = self.clone();
        let mut x = rhs.clone();

        let amax = lu
            .data
            .iter()
            .fold(T::zero(), |acc, z| acc.max(z.norm_sqr()))
            .sqrt();
        if amax == T::zero() || !amax.is_finite() {
            return None;
        }
        let pivot_floor = amax * T::epsilon() * T::from_f64_lit(n as f64);

        for k in 0..n {
            // Partial pivot: largest magnitude in column k at or below row k.
            let mut p = k;
            let mut best = lu[(k, k)].norm_sqr();
            for i in (k + 1)..n {
                let m = lu[(i, k)].norm_sqr();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if best.sqrt() <= pivot_floor {
                return None;
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                for j in 0..x.cols {
                    let t = x[(k, j)];
                    x[(k, j)] = x[(p, j)];
                    x[(p, j)] = t;
                }
            }
            let piv = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / piv;
                if factor.re == T::zero() && factor.im == T::zero() {
                    continue;
                }
                lu[(i, k)] = factor;
                for j in (k + 1)..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - factor * v;
                }
                for j in 0..x.cols {
                    let v = x[(k, j)];
                    x[(i, j)] = x[(i, j)] - factor * v;
                }
            }
        }
        // Back substitution.
        for j in 0..x.cols {
            for i in (0..n).rev() {
                let mut acc = x[(i, j)];
                for k in (i + 1)..n {
                    acc = acc - lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = acc / lu[(i, i)];
            }
        }
        Some(x)
    }

    /// `log₂ det(self)` for a Hermitian positive-definite matrix, via
    /// Cholesky. `None` when the matrix is not numerically HPD.
    pub fn hpd_log2_det(&self) -> Option<T> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut l = CMat::<T>::zeros(n, n);
        let mut log2det = T::zero();
        let ln2 = T::from_f64_lit(2.0).ln();
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if d <= T::zero() || !d.is_finite() {
                return None;
            }
            let djj = d.sqrt();
            l[(j, j)] = C::new(djj, T::zero());
            log2det += (T::one() + T::one()) * djj.ln() / ln2;
            for i in (j + 1)..n {
                let mut acc = self[(i, j)];
                for k in 0..j {
                    acc = acc - l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = acc / djj;
            }
        }
        Some(log2det)
    }

    /// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi.
    ///
    /// Returns eigenvalues in non-increasing order with matching orthonormal
    /// eigenvector columns. Each eigenvector is rotated so that its
    /// largest-magnitude entry (lowest index on ties) is real non-negative,
    /// which pins the otherwise arbitrary phases and makes downstream phase
    /// extraction reproducible.
    pub fn hermitian_eigen(&self) -> Option<(Vec<T>, CMat<T>)> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if !self.is_finite() {
            return None;
        }
        if n == 0 {
            return Some((Vec::new(), CMat::zeros(0, 0)));
        }
        let mut a = self.hermitian_part();
        let mut v = CMat::<T>::identity(n);

        let scale = a.fro_norm();
        let off_tol = scale * T::epsilon() * T::from_f64_lit(n as f64);
        let mut converged = scale == T::zero();
        const MAX_SWEEPS: usize = 64;

        for _ in 0..MAX_SWEEPS {
            if converged {
                break;
            }
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= off_tol {
                converged = true;
                break;
            }
            for p in 0..(n - 1) {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let r = apq.norm();
                    if r <= off_tol {
                        continue;
                    }
                    let w = apq / r;
                    let alpha = a[(p, p)].re;
                    let beta = a[(q, q)].re;
                    let tau = (alpha - beta) / (r + r);
                    let t = if tau >= T::zero() {
                        T::one() / (tau + (T::one() + tau * tau).sqrt())
                    } else {
                        T::one() / (tau - (T::one() + tau * tau).sqrt())
                    };
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = t * c;

                    // Right multiplication by U touches columns p and q.
                    let sw_conj = C::new(w.re * s, -w.im * s);
                    let sw = C::new(w.re * s, w.im * s);
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * c + akq * sw_conj;
                        a[(k, q)] = akq * c - akp * sw;
                    }
                    // Left multiplication by Uᴴ touches rows p and q.
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = apk * c + aqk * sw;
                        a[(q, k)] = aqk * c - apk * sw_conj;
                    }
                    a[(p, q)] = czero();
                    a[(q, p)] = czero();
                    a[(p, p)] = C::new(a[(p, p)].re, T::zero());
                    a[(q, q)] = C::new(a[(q, q)].re, T::zero());

                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c + vkq * sw_conj;
                        v[(k, q)] = vkq * c - vkp * sw;
                    }
                }
            }
        }
        if !converged {
            // One final check: tiny residual off-diagonals are acceptable.
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() > off_tol * T::from_f64_lit(100.0) {
                return None;
            }
        }

        // Stable sort by descending eigenvalue; equal values keep their
        // diagonal order so degenerate spectra stay deterministic.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            a[(j, j)]
                .re
                .partial_cmp(&a[(i, i)].re)
                .unwrap_or(std::cmp::Ordering::Equal)
        });

        let vals: Vec<T> = order.iter().map(|&i| a[(i, i)].re).collect();
        let mut vecs = CMat::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            for k in 0..n {
                vecs[(k, dst)] = v[(k, src)];
            }
        }
        for j in 0..n {
            normalize_column_phase(&mut vecs, j);
        }
        Some((vals, vecs))
    }
}

/// Rotate column `j` so its largest-magnitude entry is real non-negative;
/// ties break toward the lowest row index.
pub fn normalize_column_phase<T: Scalar>(m: &mut CMat<T>, j: usize) {
    let mut best_row = 0;
    let mut best_mag = T::zero();
    for i in 0..m.rows() {
        let mag = m[(i, j)].norm_sqr();
        if mag > best_mag {
            best_mag = mag;
            best_row = i;
        }
    }
    if best_mag == T::zero() {
        return;
    }
    let z = m[(best_row, j)];
    let mag = z.norm();
    let phase_conj = C::new(z.re / mag, -z.im / mag);
    for i in 0..m.rows() {
        m[(i, j)] = m[(i, j)] * phase_conj;
    }
    // Exact by construction, up to rounding in the anchor entry itself.
    let anchor = m[(best_row, j)];
    m[(best_row, j)] = C::new(anchor.norm(), T::zero());
}

impl<T> std::ops::Index<(usize, usize)> for CMat<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for CMat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm2<T: Scalar>(v: &[C<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// `Σ |v_k|`, the l1 norm.
pub fn vec_norm1<T: Scalar>(v: &[C<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm())
}

/// `⟨a, b⟩ = aᴴ·b`.
pub fn inner<T: Scalar>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(czero(), |acc, (x, y)| acc + x.conj() * *y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    type M = CMat<f64>;

    fn random_matrix(rng: &mut Rng, rows: usize, cols: usize) -> M {
        M::from_fn(rows, cols, |_, _| rng.next_cn01())
    }

    fn random_hpsd(rng: &mut Rng, n: usize) -> M {
        let b = random_matrix(rng, n, n);
        b.herm_mul(&b)
    }

    #[test]
    fn product_against_hand_example() {
        let a = M::from_fn(2, 2, |i, j| C::new((i * 2 + j) as f64, 1.0));
        let id = M::identity(2);
        assert_eq!(a.mul(&id), a);
        // herm_mul equals explicit hermitian().mul
        let b = random_matrix(&mut Rng::new(3), 2, 3);
        let lhs = a.herm_mul(&b);
        let rhs = a.hermitian().mul(&b);
        assert!(lhs.sub(&rhs).fro_norm() < 1e-14);
    }

    #[test]
    fn solve_recovers_rhs() {
        let mut rng = Rng::new(17);
        for n in [1usize, 2, 5, 9] {
            let a = random_matrix(&mut rng, n, n);
            let x_true = random_matrix(&mut rng, n, 3);
            let b = a.mul(&x_true);
            let x = a.solve(&b).expect("well conditioned");
            assert!(
                x.sub(&x_true).fro_norm() < 1e-9,
                "n={n} err={}",
                x.sub(&x_true).fro_norm()
            );
        }
    }

    #[test]
    fn solve_flags_singular() {
        let mut m = M::zeros(2, 2);
        m[(0, 0)] = C::new(1.0, 0.0);
        m[(0, 1)] = C::new(2.0, 0.0);
        m[(1, 0)] = C::new(1.0, 0.0);
        m[(1, 1)] = C::new(2.0, 0.0);
        assert!(m.solve(&M::identity(2)).is_none());
    }

    #[test]
    fn cholesky_logdet_matches_eigenvalues() {
        let mut rng = Rng::new(23);
        for n in [1usize, 3, 6] {
            let m = random_hpsd(&mut rng, n).add(&M::identity(n));
            let ld = m.hpd_log2_det().expect("HPD");
            let (vals, _) = m.hermitian_eigen().expect("finite");
            let ld_eig: f64 = vals.iter().map(|v| v.log2()).sum();
            assert!((ld - ld_eig).abs() < 1e-10, "n={n} {ld} vs {ld_eig}");
        }
    }

    #[test]
    fn eigen_residual_is_tiny() {
        let mut rng = Rng::new(5);
        for n in [2usize, 4, 7, 12] {
            let p = random_hpsd(&mut rng, n);
            let (vals, vecs) = p.hermitian_eigen().expect("finite");
            // Non-increasing eigenvalues.
            for k in 1..n {
                assert!(vals[k - 1] >= vals[k] - 1e-12);
            }
            for (k, &val) in vals.iter().enumerate() {
                let v = M::col_vec(&vecs.col(k));
                let pv = p.mul(&v);
                let lv = v.scale_re(val);
                let resid = pv.sub(&lv).fro_norm();
                assert!(
                    resid < 1e-10 * p.fro_norm().max(1.0),
                    "n={n} k={k} resid={resid}"
                );
            }
            // Orthonormal columns.
            let gram = vecs.herm_mul(&vecs);
            assert!(gram.sub(&M::identity(n)).fro_norm() < 1e-11);
        }
    }

    #[test]
    fn eigen_identity_keeps_axis_order() {
        let (vals, vecs) = M::identity(3).hermitian_eigen().unwrap();
        assert_eq!(vals, vec![1.0, 1.0, 1.0]);
        assert!(vecs.sub(&M::identity(3)).fro_norm() < 1e-15);
    }

    #[test]
    fn eigen_is_deterministic() {
        let mut rng = Rng::new(77);
        let p = random_hpsd(&mut rng, 6);
        let (va, ma) = p.hermitian_eigen().unwrap();
        let (vb, mb) = p.hermitian_eigen().unwrap();
        assert_eq!(va, vb);
        assert_eq!(ma.data(), mb.data());
    }

    #[test]
    fn phase_convention_anchor_is_real() {
        let mut rng = Rng::new(31);
        let p = random_hpsd(&mut rng, 5);
        let (_, vecs) = p.hermitian_eigen().unwrap();
        for j in 0..5 {
            let col = vecs.col(j);
            let mut best = 0;
            for i in 0..5 {
                if col[i].norm_sqr() > col[best].norm_sqr() {
                    best = i;
                }
            }
            assert!(col[best].im.abs() < 1e-14);
            assert!(col[best].re >= 0.0);
        }
    }

    #[test]
    fn rank_update_matches_explicit_product() {
        let mut rng = Rng::new(41);
        let g = random_matrix(&mut rng, 4, 2);
        let mut c = M::identity(4);
        c.rank_update(0.7, &g);
        let explicit = M::identity(4).add(&g.mul(&g.hermitian()).scale_re(0.7));
        assert!(c.sub(&explicit).fro_norm() < 1e-13);
    }
}
