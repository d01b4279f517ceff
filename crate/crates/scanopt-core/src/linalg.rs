//! Small dense linear algebra for systems of order <= 4.
//!
//! Everything here is sized for the actuator models (order 2 or 3, plus one
//! augmentation row for the input integral), so a row-major `Vec<T>` matrix
//! with unrolled loops is all that is needed. Eigenvalues use the closed-form
//! quadratic/cubic root formulas so results are deterministic digit-for-digit.

use crate::float::Real;
use num_complex::Complex;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: T) -> Self {
        let data = self.data.iter().map(|&a| a * s).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(T::zero(), |acc, &x| acc + x.abs()))
            .fold(T::zero(), T::max)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Matrix exponential by scaling and squaring with a diagonal Padé approximant.
///
/// The argument is scaled until its infinity norm is below 1/2, where the
/// [9/9] Padé truncation error sits far under double-precision roundoff, then
/// squared back up.
pub fn expm<T: Real>(a: &Mat<T>) -> Mat<T> {
    assert_eq!(a.rows(), a.cols());
    let n = a.rows();
    let norm = a.norm_inf();
    let half = T::of(0.5);
    let mut squarings = 0u32;
    let mut scale = T::one();
    if norm > half {
        // smallest s with norm/2^s <= 1/2
        let ratio: f64 = (norm / half).to_f64().unwrap_or(f64::MAX);
        squarings = ratio.log2().ceil().max(0.0) as u32;
        scale = T::of(0.5f64.powi(squarings as i32));
    }
    let a_scaled = a.scale(scale);

    // Padé [9/9] coefficients.
    const B: [f64; 10] = [
        17_643_225_600.0,
        8_821_612_800.0,
        2_075_673_600.0,
        302_702_400.0,
        30_270_240.0,
        2_162_160.0,
        110_880.0,
        3_960.0,
        90.0,
        1.0,
    ];
    let mut powers = Vec::with_capacity(10);
    powers.push(Mat::identity(n));
    for k in 1..10 {
        let next = powers[k - 1].mul(&a_scaled);
        powers.push(next);
    }
    let mut num = Mat::zeros(n, n); // odd terms  -> U
    let mut den = Mat::zeros(n, n); // even terms -> V
    for (k, p) in powers.iter().enumerate() {
        let term = p.scale(T::of(B[k]));
        if k % 2 == 1 {
            num = num.add(&term);
        } else {
            den = den.add(&term);
        }
    }
    // (V - U) X = (V + U)
    let lhs = den.add(&num.scale(-T::one()));
    let rhs = den.add(&num);
    let mut result = solve_matrix(&lhs, &rhs).expect("Padé denominator is nonsingular");
    for _ in 0..squarings {
        result = result.mul(&result);
    }
    result
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve<T: Real>(a: &Mat<T>, b: &[T]) -> Option<Vec<T>> {
    let rhs = Mat { rows: b.len(), cols: 1, data: b.to_vec() };
    solve_matrix(a, &rhs).map(|m| m.data)
}

/// Solve `A X = B` for a matrix right-hand side.
pub fn solve_matrix<T: Real>(a: &Mat<T>, b: &Mat<T>) -> Option<Mat<T>> {
    assert_eq!(a.rows(), a.cols());
    assert_eq!(a.rows(), b.rows());
    let n = a.rows();
    let m = b.cols();
    let mut aug = Mat::zeros(n, n + m);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)];
        }
        for j in 0..m {
            aug[(i, n + j)] = b[(i, j)];
        }
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| {
                aug[(p, col)].abs().partial_cmp(&aug[(q, col)].abs()).unwrap()
            })?;
        if aug[(pivot_row, col)].abs() == T::zero() {
            return None;
        }
        if pivot_row != col {
            for j in 0..n + m {
                let tmp = aug[(col, j)];
                aug[(col, j)] = aug[(pivot_row, j)];
                aug[(pivot_row, j)] = tmp;
            }
        }
        let pivot = aug[(col, col)];
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = aug[(row, col)] / pivot;
            if factor == T::zero() {
                continue;
            }
            for j in col..n + m {
                let delta = factor * aug[(col, j)];
                aug[(row, j)] = aug[(row, j)] - delta;
            }
        }
    }
    let mut out = Mat::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            out[(i, j)] = aug[(i, n + j)] / aug[(i, i)];
        }
    }
    Some(out)
}

/// Solve a complex system `A x = b`, n <= 4, partial pivoting on magnitude.
pub fn solve_complex<T: Real>(
    a: &[Vec<Complex<T>>],
    b: &[Complex<T>],
) -> Option<Vec<Complex<T>>> {
    let n = a.len();
    let mut m: Vec<Vec<Complex<T>>> = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&p, &q| {
            m[p][col].norm_sqr().partial_cmp(&m[q][col].norm_sqr()).unwrap()
        })?;
        if m[pivot_row][col].norm_sqr() == T::zero() {
            return None;
        }
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            for j in col..n {
                let delta = factor * m[col][j];
                m[row][j] = m[row][j] - delta;
            }
            let delta = factor * rhs[col];
            rhs[row] = rhs[row] - delta;
        }
    }
    let mut x = vec![Complex::new(T::zero(), T::zero()); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for j in row + 1..n {
            acc = acc - m[row][j] * x[j];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Eigenvalues of a real matrix of order 1..=3, by the closed-form
/// characteristic-polynomial roots.
///
/// Sorted by ascending magnitude of the real part; complex conjugate pairs
/// are adjacent with the positive imaginary part first.
pub fn eigenvalues<T: Real>(a: &Mat<T>) -> Vec<Complex<T>> {
    assert_eq!(a.rows(), a.cols());
    let mut eigs = match a.rows() {
        1 => vec![Complex::new(a[(0, 0)], T::zero())],
        2 => {
            let tr = a[(0, 0)] + a[(1, 1)];
            let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
            quadratic_roots(-tr, det)
        }
        3 => {
            // det(λI - A) = λ^3 + c2 λ^2 + c1 λ + c0
            let tr = a[(0, 0)] + a[(1, 1)] + a[(2, 2)];
            let minors = (a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)])
                + (a[(0, 0)] * a[(2, 2)] - a[(0, 2)] * a[(2, 0)])
                + (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)]);
            let det = a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
                - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
                + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)]);
            cubic_roots(-tr, minors, -det)
        }
        n => panic!("eigenvalues: unsupported order {n}"),
    };
    eigs.sort_by(|p, q| {
        p.re.abs()
            .partial_cmp(&q.re.abs())
            .unwrap()
            .then(q.im.partial_cmp(&p.im).unwrap())
    });
    eigs
}

/// Roots of λ^2 + b λ + c.
fn quadratic_roots<T: Real>(b: T, c: T) -> Vec<Complex<T>> {
    let four = T::of(4.0);
    let two = T::of(2.0);
    let disc = b * b - four * c;
    if disc >= T::zero() {
        let sq = disc.sqrt();
        // Avoid cancellation: compute the larger-magnitude root first.
        let q = if b >= T::zero() { -(b + sq) / two } else { -(b - sq) / two };
        let r1 = q;
        let r2 = if q != T::zero() { c / q } else { -b - q };
        vec![Complex::new(r1, T::zero()), Complex::new(r2, T::zero())]
    } else {
        let re = -b / two;
        let im = (-disc).sqrt() / two;
        vec![Complex::new(re, im), Complex::new(re, -im)]
    }
}

/// Roots of λ^3 + p λ^2 + q λ + r.
fn cubic_roots<T: Real>(p: T, q: T, r: T) -> Vec<Complex<T>> {
    let three = T::of(3.0);
    let two = T::of(2.0);
    let nine = T::of(9.0);
    let twenty_seven = T::of(27.0);
    let shift = p / three;
    // Depressed cubic t^3 + a t + b with λ = t - p/3.
    let a = q - p * p / three;
    let b = two * p * p * p / twenty_seven - p * q / three + r;
    let disc = -(T::of(4.0) * a * a * a + twenty_seven * b * b);
    let roots_t: Vec<Complex<T>> = if a == T::zero() && b == T::zero() {
        vec![Complex::new(T::zero(), T::zero()); 3]
    } else if disc >= T::zero() {
        // Three real roots: trigonometric form (a < 0 here).
        let m = two * (-a / three).sqrt();
        let arg = (three * b / (a * m)).max(-T::one()).min(T::one());
        let theta = arg.acos() / three;
        (0..3)
            .map(|k| {
                let angle = theta - T::tau() * T::of(k as f64) / three;
                Complex::new(m * angle.cos(), T::zero())
            })
            .collect()
    } else {
        // One real root via Cardano, then a conjugate pair from deflation.
        let half_b = b / two;
        let inner = (b * b / T::of(4.0) + a * a * a / twenty_seven).sqrt();
        let u = cbrt(-half_b + inner);
        let v = cbrt(-half_b - inner);
        let t0 = u + v;
        // t^3 + a t + b = (t - t0)(t^2 + t0 t + (a + t0^2))
        let mut pair = quadratic_roots(t0, a + t0 * t0);
        let mut out = vec![Complex::new(t0, T::zero())];
        out.append(&mut pair);
        out
    };
    let _ = nine;
    roots_t.into_iter().map(|t| t - Complex::new(shift, T::zero())).collect()
}

fn cbrt<T: Real>(x: T) -> T {
    let third = T::one() / T::of(3.0);
    if x >= T::zero() {
        x.powf(third)
    } else {
        -(-x).powf(third)
    }
}

/// Right eigenvectors for a matrix with all-real eigenvalues, each scaled to
/// unit infinity norm. Returns `None` when any eigenvalue has an imaginary
/// part above `tol` relative to the spectrum scale.
pub fn real_eigenvectors<T: Real>(a: &Mat<T>, tol: T) -> Option<Vec<(T, Vec<T>)>> {
    let n = a.rows();
    let eigs = eigenvalues(a);
    let scale = eigs.iter().map(|e| e.norm()).fold(T::one(), T::max);
    if eigs.iter().any(|e| e.im.abs() > tol * scale) {
        return None;
    }
    let mut out = Vec::with_capacity(n);
    for lam in &eigs {
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] = shifted[(i, i)] - lam.re;
        }
        let v = nullspace_vector(&shifted)?;
        out.push((lam.re, v));
    }
    Some(out)
}

/// One vector from the nullspace of a square matrix, unit infinity norm.
pub fn nullspace_vector<T: Real>(a: &Mat<T>) -> Option<Vec<T>> {
    let n = a.rows();
    let mut m = a.clone();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut rank = 0usize;
    for step in 0..n {
        // Full pivoting keeps the elimination stable for nearly-defective cases.
        let mut best = (step, step);
        let mut best_val = T::zero();
        for i in step..n {
            for j in step..n {
                if m[(i, j)].abs() > best_val {
                    best_val = m[(i, j)].abs();
                    best = (i, j);
                }
            }
        }
        let cutoff = T::of(1e-9) * a.norm_inf().max(T::one());
        if best_val <= cutoff {
            break;
        }
        let (pi, pj) = best;
        if pi != step {
            for j in 0..n {
                let tmp = m[(step, j)];
                m[(step, j)] = m[(pi, j)];
                m[(pi, j)] = tmp;
            }
        }
        if pj != step {
            for i in 0..n {
                let tmp = m[(i, step)];
                m[(i, step)] = m[(i, pj)];
                m[(i, pj)] = tmp;
            }
            col_perm.swap(step, pj);
        }
        for i in step + 1..n {
            let factor = m[(i, step)] / m[(step, step)];
            for j in step..n {
                let delta = factor * m[(step, j)];
                m[(i, j)] = m[(i, j)] - delta;
            }
        }
        rank += 1;
    }
    if rank == n {
        return None;
    }
    // Free variable = 1 for the first nullspace direction, back-substitute.
    let mut x = vec![T::zero(); n];
    x[rank] = T::one();
    for row in (0..rank).rev() {
        let mut acc = T::zero();
        for j in row + 1..n {
            acc = acc + m[(row, j)] * x[j];
        }
        x[row] = -acc / m[(row, row)];
    }
    let mut v = vec![T::zero(); n];
    for (permuted, original) in col_perm.iter().enumerate() {
        v[*original] = x[permuted];
    }
    let norm = v.iter().fold(T::zero(), |acc, &c| acc.max(c.abs()));
    Some(v.into_iter().map(|c| c / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> Mat<f64> {
        Mat::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = Mat::<f64>::zeros(3, 3);
        let e = expm(&z);
        assert_eq!(e, Mat::identity(3));
    }

    #[test]
    fn expm_diagonal() {
        let a = mat(&[&[1.0, 0.0], &[0.0, -2.0]]);
        let e = expm(&a);
        assert!((e[(0, 0)] - 1f64.exp()).abs() < 1e-14);
        assert!((e[(1, 1)] - (-2f64).exp()).abs() < 1e-14);
        assert!(e[(0, 1)].abs() < 1e-16);
    }

    #[test]
    fn expm_nilpotent_double_integrator() {
        // exp([[0,1],[0,0]] t) = [[1,t],[0,1]]
        let t = 0.37;
        let a = mat(&[&[0.0, t], &[0.0, 0.0]]);
        let e = expm(&a);
        assert!((e[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((e[(0, 1)] - t).abs() < 1e-15);
        assert!((e[(1, 1)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expm_rotation_block() {
        // exp([[0,w],[-w,0]] t) is a rotation by w t.
        let w = 3.0;
        let t = 0.5;
        let a = mat(&[&[0.0, w * t], &[-w * t, 0.0]]);
        let e = expm(&a);
        assert!((e[(0, 0)] - (w * t).cos()).abs() < 1e-13);
        assert!((e[(0, 1)] - (w * t).sin()).abs() < 1e-13);
    }

    #[test]
    fn expm_large_norm_uses_squaring() {
        let a = mat(&[&[-1666.7, 0.0], &[0.0, -0.5]]);
        let e = expm(&a.scale(0.01));
        assert!((e[(0, 0)] - (-16.667f64).exp()).abs() < 1e-20);
        assert!((e[(1, 1)] - (-0.005f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn solve_small_system() {
        let a = mat(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let x = solve(&a, &[5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_diagonal_sorted() {
        let a = mat(&[&[-2.0, 0.0], &[0.0, -1.0]]);
        let e = eigenvalues(&a);
        assert!((e[0].re + 1.0).abs() < 1e-14);
        assert!((e[1].re + 2.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_complex_pair_adjacent() {
        // λ^2 + 2λ + 5 → -1 ± 2j
        let a = mat(&[&[0.0, 1.0], &[-5.0, -2.0]]);
        let e = eigenvalues(&a);
        assert!((e[0].re + 1.0).abs() < 1e-14);
        assert!((e[0].im - 2.0).abs() < 1e-14);
        assert_eq!(e[1].im, -e[0].im);
    }

    #[test]
    fn eigenvalues_cubic_three_real() {
        // companion of (λ+1)(λ+2)(λ+3) = λ^3 + 6λ^2 + 11λ + 6
        let a = mat(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[-6.0, -11.0, -6.0]]);
        let e = eigenvalues(&a);
        let mut re: Vec<f64> = e.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + 3.0).abs() < 1e-10);
        assert!((re[1] + 2.0).abs() < 1e-10);
        assert!((re[2] + 1.0).abs() < 1e-10);
        assert!(e.iter().all(|z| z.im.abs() < 1e-10));
    }

    #[test]
    fn eigenvalues_cubic_with_zero_root() {
        // λ(λ+6.2692)(λ+1664.5) style spectrum
        let a = mat(&[
            &[0.0, 1.0, 0.0],
            &[0.0, -4.0816, 57.755],
            &[0.0, -62.889, -1666.7],
        ]);
        let e = eigenvalues(&a);
        assert!(e[0].re.abs() < 1e-9);
        assert!((e[1].re + 6.2692).abs() < 5e-4);
        assert!((e[2].re + 1664.5).abs() < 0.1);
    }

    #[test]
    fn real_eigenvector_reconstruction() {
        let a = mat(&[&[0.0, 1.0], &[-314.29, -42.996]]);
        let pairs = real_eigenvectors(&a, 1e-9).unwrap();
        for (lam, v) in pairs {
            let av = a.mul_vec(&v);
            for i in 0..2 {
                assert!((av[i] - lam * v[i]).abs() < 1e-8, "A v != λ v");
            }
        }
    }

    #[test]
    fn complex_solve_matches_real() {
        let a: Vec<Vec<Complex<f64>>> = vec![
            vec![Complex::new(2.0, 0.0), Complex::new(1.0, 0.0)],
            vec![Complex::new(1.0, 0.0), Complex::new(3.0, 0.0)],
        ];
        let x = solve_complex(&a, &[Complex::new(5.0, 0.0), Complex::new(10.0, 0.0)]).unwrap();
        assert!((x[0].re - 1.0).abs() < 1e-14);
        assert!((x[1].re - 3.0).abs() < 1e-14);
    }
}
