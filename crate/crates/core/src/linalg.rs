//! Small dense complex linear algebra: LU solves, complex Schur form,
//! eigenvectors, and characteristic polynomials.
//!
//! Sizes here are the number of poles (tens at most), so everything is plain
//! row-major storage with O(n³) kernels.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::scalar::{cone, cr, czero, Real, C};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diag(diag: &[C<T>]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Builds a matrix from row slices; every row must have the same length.
    pub fn from_rows(rows: &[Vec<C<T>>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_column(col: &[C<T>]) -> Self {
        Self {
            rows: col.len(),
            cols: 1,
            data: col.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    /// Entries in row-major order.
    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C<T>> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, k: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| *z * k).collect(),
        }
    }

    pub fn trace(&self) -> C<T> {
        self.diagonal().into_iter().fold(czero(), |a, b| a + b)
    }

    pub fn norm_fro(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn matvec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(v.len(), self.cols, "matvec dimension");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(czero::<T>(), |acc, j| acc + self[(i, j)] * v[j])
            })
            .collect()
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `A - z I`.
    pub fn shift(&self, z: C<T>) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] = m[(i, i)] - z;
        }
        m
    }

    pub fn lu(&self) -> Option<Lu<T>> {
        Lu::factor(self)
    }

    pub fn inverse(&self) -> Option<Self> {
        self.lu().map(|lu| lu.inverse())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T: Real> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a, T: Real> Mul for &'a CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: Self) -> CMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "matmul dimension");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == czero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<'a, T: Real> Add for &'a CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: Self) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add dimension");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<'a, T: Real> Sub for &'a CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: Self) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub dimension");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<'a, T: Real> Neg for &'a CMatrix<T> {
    type Output = CMatrix<T>;
    fn neg(self) -> CMatrix<T> {
        self.scale(-cone::<T>())
    }
}

/// LU factorization with partial pivoting, `PA = LU`.
#[derive(Clone, Debug)]
pub struct Lu<T: Real> {
    n: usize,
    lu: CMatrix<T>,
    perm: Vec<usize>,
    sign: T,
}

impl<T: Real> Lu<T> {
    /// Returns `None` when a pivot falls below `n·ε·max|A|` (numerically singular).
    pub fn factor(a: &CMatrix<T>) -> Option<Self> {
        assert!(a.is_square(), "LU of non-square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let scale = a.norm_max();
        let tiny = T::from_usize(n.max(1)).unwrap() * T::epsilon() * scale;
        if !a.is_finite() {
            return None;
        }
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= tiny || pmax == T::zero() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == czero() {
                    continue;
                }
                for j in (k + 1)..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - f * u;
                }
            }
        }
        Some(Self { n, lu, perm, sign })
    }

    pub fn solve(&self, b: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(b.len(), self.n, "solve dimension");
        let n = self.n;
        let mut y: Vec<C<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = y[i];
            for j in 0..i {
                acc = acc - self.lu[(i, j)] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in (i + 1)..n {
                acc = acc - self.lu[(i, j)] * y[j];
            }
            y[i] = acc / self.lu[(i, i)];
        }
        y
    }

    pub fn solve_matrix(&self, b: &CMatrix<T>) -> CMatrix<T> {
        let mut out = CMatrix::zeros(b.rows, b.cols);
        for j in 0..b.cols {
            let x = self.solve(&b.column(j));
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }

    pub fn inverse(&self) -> CMatrix<T> {
        self.solve_matrix(&CMatrix::identity(self.n))
    }

    pub fn det(&self) -> C<T> {
        (0..self.n).fold(cr(self.sign), |acc, i| acc * self.lu[(i, i)])
    }
}

/// Complex Schur form `A = Q T Qᴴ` with `T` upper triangular.
#[derive(Clone, Debug)]
pub struct Schur<T: Real> {
    pub q: CMatrix<T>,
    pub t: CMatrix<T>,
}

/// Unitary rotation `G = [[c, s], [-s̄, c]]` with `G·[x, y]ᵀ = [r, 0]ᵀ`.
fn givens<T: Real>(x: C<T>, y: C<T>) -> (T, C<T>) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == T::zero() {
        return (T::one(), czero());
    }
    if ax == T::zero() {
        return (T::zero(), y.conj() / cr(ay));
    }
    let nrm = ax.hypot(ay);
    let c = ax / nrm;
    let s = (x / cr(ax)) * y.conj() / cr(nrm);
    (c, s)
}

/// Reduce to upper Hessenberg form by Householder reflections, returning `(H, Q)`
/// with `A = Q H Qᴴ`.
pub fn hessenberg<T: Real>(a: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    assert!(a.is_square());
    let n = a.rows;
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        let tail: T = ((k + 2)..n).map(|i| h[(i, k)].norm_sqr()).sum();
        if tail == T::zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let norm = (tail + x0.norm_sqr()).sqrt();
        let phase = if x0.norm() == T::zero() {
            cone()
        } else {
            x0 / cr(x0.norm())
        };
        let alpha = -phase * cr(norm);
        let mut v: Vec<C<T>> = vec![czero(); n];
        v[k + 1] = x0 - alpha;
        for i in (k + 2)..n {
            v[i] = h[(i, k)];
        }
        let vnorm2: T = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let two = cr(T::lit(2.0) / vnorm2);
        // H <- P H, P = I - 2 v vᴴ / (vᴴ v)
        for j in 0..n {
            let dot = ((k + 1)..n).fold(czero::<T>(), |acc, i| acc + v[i].conj() * h[(i, j)]);
            let f = dot * two;
            for i in (k + 1)..n {
                h[(i, j)] = h[(i, j)] - v[i] * f;
            }
        }
        // H <- H P, Q <- Q P
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let dot = ((k + 1)..n).fold(czero::<T>(), |acc, j| acc + m[(i, j)] * v[j]);
                let f = dot * two;
                for j in (k + 1)..n {
                    m[(i, j)] = m[(i, j)] - f * v[j].conj();
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = czero();
        }
    }
    (h, q)
}

/// Complex Schur decomposition by Hessenberg reduction and Wilkinson-shifted
/// QR sweeps. Returns `None` if the iteration fails to converge.
pub fn schur<T: Real>(a: &CMatrix<T>) -> Option<Schur<T>> {
    let n = a.rows;
    let (mut h, mut q) = hessenberg(a);
    if n < 2 {
        return Some(Schur { q, t: h });
    }
    let eps = T::epsilon();
    let max_iter = 60 * n;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == T::zero() { a.norm_max() } else { s };
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = czero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter * n {
            return None;
        }
        let mu = if iter % 11 == 10 {
            // exceptional shift
            h[(hi, hi)] + cr(h[(hi, hi - 1)].norm() * T::lit(0.75))
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        let mut x = h[(l, l)] - mu;
        let mut y = h[(l + 1, l)];
        for k in l..hi {
            if k > l {
                x = h[(k, k - 1)];
                y = h[(k + 1, k - 1)];
            }
            let (cs, sn) = givens(x, y);
            let c = cr(cs);
            let start = if k > l { k - 1 } else { k };
            for j in start..n {
                let a1 = h[(k, j)];
                let a2 = h[(k + 1, j)];
                h[(k, j)] = c * a1 + sn * a2;
                h[(k + 1, j)] = -sn.conj() * a1 + c * a2;
            }
            let last = (k + 2).min(hi);
            for i in 0..=last {
                let a1 = h[(i, k)];
                let a2 = h[(i, k + 1)];
                h[(i, k)] = a1 * c + a2 * sn.conj();
                h[(i, k + 1)] = -a1 * sn + a2 * c;
            }
            for i in 0..n {
                let a1 = q[(i, k)];
                let a2 = q[(i, k + 1)];
                q[(i, k)] = a1 * c + a2 * sn.conj();
                q[(i, k + 1)] = -a1 * sn + a2 * c;
            }
            if k > l {
                h[(k + 1, k - 1)] = czero();
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = czero();
        }
    }
    Some(Schur { q, t: h })
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift<T: Real>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> C<T> {
    let half = cr(T::lit(0.5));
    let tr = (a + d) * half;
    let diff = (a - d) * half;
    let disc = (diff * diff + b * c).sqrt();
    let l1 = tr + disc;
    let l2 = tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigen-decomposition `A = P diag(λ) P⁻¹` of a diagonalizable matrix.
#[derive(Clone, Debug)]
pub struct Eigen<T: Real> {
    pub values: Vec<C<T>>,
    /// Eigenvectors as unit-norm columns.
    pub vectors: CMatrix<T>,
}

impl<T: Real> Eigen<T> {
    /// Condition estimate `‖P‖_F ‖P⁻¹‖_F`; infinite if `P` is singular.
    pub fn condition(&self) -> T {
        match self.vectors.inverse() {
            Some(inv) => self.vectors.norm_fro() * inv.norm_fro(),
            None => T::infinity(),
        }
    }
}

/// Eigenvalues and eigenvectors via the complex Schur form and triangular
/// back-substitution.
pub fn eigen<T: Real>(a: &CMatrix<T>) -> Option<Eigen<T>> {
    let n = a.rows;
    let Schur { q, t } = schur(a)?;
    let values = t.diagonal();
    let small = T::epsilon() * t.norm_max().max(T::min_positive_value());
    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        y[(k, k)] = cone();
        for i in (0..k).rev() {
            let mut acc = czero::<T>();
            for j in (i + 1)..=k {
                acc = acc + t[(i, j)] * y[(j, k)];
            }
            let mut den = t[(i, i)] - values[k];
            if den.norm() < small {
                den = cr(small);
            }
            y[(i, k)] = -acc / den;
        }
    }
    let mut vectors = &q * &y;
    for k in 0..n {
        let nrm = (0..n).map(|i| vectors[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if nrm > T::zero() {
            for i in 0..n {
                vectors[(i, k)] = vectors[(i, k)] / cr(nrm);
            }
        }
    }
    Some(Eigen { values, vectors })
}

/// Coefficients `[1, c₁, …, cₙ]` of `det(λI − A) = λⁿ + c₁λⁿ⁻¹ + … + cₙ`,
/// computed from the Hessenberg form by the standard determinant recurrence.
pub fn char_poly<T: Real>(a: &CMatrix<T>) -> Vec<C<T>> {
    assert!(a.is_square());
    let n = a.rows;
    let (h, _) = hessenberg(a);
    // polys[k] holds the characteristic polynomial of the leading k×k block,
    // stored highest degree first.
    let mut polys: Vec<Vec<C<T>>> = vec![vec![cone()]];
    for k in 1..=n {
        let prev = &polys[k - 1];
        // (λ − h_kk) p_{k−1}
        let mut p = vec![czero(); k + 1];
        for (i, coef) in prev.iter().enumerate() {
            p[i] = p[i] + *coef;
            p[i + 1] = p[i + 1] - h[(k - 1, k - 1)] * *coef;
        }
        // − Σ_{i<k} h_{i,k} (Π_{j=i+1}^{k} h_{j,j−1}) p_{i−1}, 1-based
        let mut prod = cone();
        for i in (1..k).rev() {
            prod = prod * h[(i, i - 1)];
            let f = h[(i - 1, k - 1)] * prod;
            let q = &polys[i - 1];
            let off = (k + 1) - q.len();
            for (m, coef) in q.iter().enumerate() {
                p[off + m] = p[off + m] - f * *coef;
            }
        }
        polys.push(p);
    }
    polys.pop().unwrap()
}

/// `[Tr A, Tr A², …, Tr A^kmax]`.
pub fn power_traces<T: Real>(a: &CMatrix<T>, kmax: usize) -> Vec<C<T>> {
    let mut out = Vec::with_capacity(kmax);
    let mut p = a.clone();
    for k in 1..=kmax {
        if k > 1 {
            p = &p * a;
        }
        out.push(p.trace());
    }
    out
}
