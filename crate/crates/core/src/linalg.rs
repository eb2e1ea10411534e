//! Small dense linear algebra: Gaussian elimination, power iteration and
//! cubic root finding. Matrices here are at most 6×6.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[&[T]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::ShapeMismatch {
                    expected: dim,
                    actual: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.dim);
        (0..self.dim).map(|i| dot(self.row(i), v)).collect()
    }

    /// Leading principal `k × k` block.
    pub fn leading_block(&self, k: usize) -> Self {
        let mut m = Self::zeros(k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = self[(i, j)];
            }
        }
        m
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |a, &b| a.max(b.abs()))
    }
}

impl<T> std::ops::Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.dim + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for SquareMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.dim + j]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Solves `a · x = b` by Gaussian elimination with partial pivoting.
pub fn solve<T: Scalar>(a: &SquareMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = m.max_abs().max(T::min_positive_value());
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().partial_cmp(&m[(j, col)].abs()).unwrap())
            .unwrap();
        if m[(pivot, col)].abs() <= scale * T::epsilon() * T::lit(16.0) {
            return Err(Error::Singular);
        }
        if pivot != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(pivot, j)];
                m[(pivot, j)] = tmp;
            }
            x.swap(col, pivot);
        }
        for i in col + 1..n {
            let factor = m[(i, col)] / m[(col, col)];
            if factor == T::zero() {
                continue;
            }
            for j in col..n {
                let v = m[(col, j)];
                m[(i, j)] = m[(i, j)] - factor * v;
            }
            x[i] = x[i] - factor * x[col];
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in i + 1..n {
            acc = acc - m[(i, j)] * x[j];
        }
        x[i] = acc / m[(i, i)];
    }
    Ok(x)
}

/// Settings for [`power_iteration_radius`].
#[derive(Debug, Clone, Copy)]
pub struct PowerIteration {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 200_000,
        }
    }
}

/// Largest eigenvalue modulus by power iteration.
///
/// Each iteration fits `A²x ≈ a·Ax + b·x` over the last three iterates, so
/// a dominant complex-conjugate pair (or a `±λ` pair) is resolved through the
/// roots of `μ² − aμ − b` instead of oscillating forever. When `x` and `Ax`
/// are (nearly) parallel the plain Rayleigh ratio is used.
///
/// The start vector is fixed, so results are reproducible.
pub fn power_iteration_radius<T: Scalar>(
    a: &SquareMatrix<T>,
    settings: PowerIteration,
) -> Result<T> {
    let n = a.dim();
    if n == 0 {
        return Ok(T::zero());
    }
    let tol = T::lit(settings.tolerance);
    let mut x: Vec<T> = (0..n)
        .map(|i| {
            T::one() / T::from_usize(i + 1).unwrap()
                + T::lit(std::f64::consts::FRAC_1_PI) * T::from_usize(i).unwrap()
        })
        .collect();
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v = *v / nx);

    let mut prev = T::nan();
    let mut stable = 0usize;
    for _ in 0..settings.max_iterations {
        let y = a.mul_vec(&x);
        let ny = norm(&y);
        if ny == T::zero() {
            // x lies in the kernel; a nilpotent part cannot hide a larger radius
            // unless the start vector was unlucky, so probe with A itself
            return Ok(if a.max_abs() == T::zero() {
                T::zero()
            } else {
                nilpotent_probe(a)
            });
        }
        let z = a.mul_vec(&y);
        let nz = norm(&z);

        let xy = dot(&x, &y);
        let rayleigh_residual = y
            .iter()
            .zip(&x)
            .fold(T::zero(), |acc, (&yi, &xi)| {
                acc + (yi - xy * xi) * (yi - xy * xi)
            })
            .sqrt()
            / ny;

        // once x is (numerically) an eigenvector the two-term fit is
        // ill-conditioned and its spare root is noise, so stay with Rayleigh
        let (estimate, residual) = if rayleigh_residual <= T::lit(1e-6) {
            (ny, rayleigh_residual)
        } else {
            // normal equations for z ≈ a·y + b·x with ‖x‖ = 1
            let yy = ny * ny;
            let gram = yy - xy * xy;
            let zy = dot(&z, &y);
            let zx = dot(&z, &x);
            let coef_a = (zy - zx * xy) / gram;
            let coef_b = (zx * yy - zy * xy) / gram;
            let res: T = z
                .iter()
                .zip(y.iter().zip(&x))
                .fold(T::zero(), |acc, (&zi, (&yi, &xi))| {
                    let r = zi - coef_a * yi - coef_b * xi;
                    acc + r * r
                })
                .sqrt();
            let scale = nz.max(T::min_positive_value());
            (quadratic_max_modulus(coef_a, coef_b), res / scale)
        };

        let converged_estimate = (estimate - prev).abs() <= tol * estimate.max(T::one());
        if converged_estimate && residual <= T::lit(1e-6) {
            stable += 1;
            if stable >= 3 {
                return Ok(estimate);
            }
        } else {
            stable = 0;
        }
        prev = estimate;
        x = y.into_iter().map(|v| v / ny).collect();
    }
    Err(Error::NotConverged {
        iterations: settings.max_iterations,
    })
}

// For a matrix sending the start vector to zero: ‖A^k‖^(1/k) on the
// identity columns, which is exact for the nilpotent case.
fn nilpotent_probe<T: Scalar>(a: &SquareMatrix<T>) -> T {
    let n = a.dim();
    let mut power = SquareMatrix::identity(n);
    for _ in 0..n {
        let mut next = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    acc = acc + power[(i, k)] * a[(k, j)];
                }
                next[(i, j)] = acc;
            }
        }
        power = next;
    }
    if power.max_abs() == T::zero() {
        T::zero()
    } else {
        power.max_abs().powf(T::one() / T::from_usize(n).unwrap())
    }
}

/// Largest root modulus of `μ² − aμ − b = 0`.
fn quadratic_max_modulus<T: Scalar>(a: T, b: T) -> T {
    let disc = a * a + T::lit(4.0) * b;
    if disc < T::zero() {
        (-b).abs().sqrt()
    } else {
        let s = disc.sqrt();
        ((a + s) / T::lit(2.0))
            .abs()
            .max(((a - s) / T::lit(2.0)).abs())
    }
}

/// Coefficients `(c2, c1, c0)` of the monic characteristic polynomial
/// `λ³ + c2 λ² + c1 λ + c0` of a 3×3 matrix.
pub fn characteristic_cubic<T: Scalar>(a: &SquareMatrix<T>) -> Result<(T, T, T)> {
    if a.dim() != 3 {
        return Err(Error::ShapeMismatch {
            expected: 3,
            actual: a.dim(),
        });
    }
    let tr = a[(0, 0)] + a[(1, 1)] + a[(2, 2)];
    let minors = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)] + a[(0, 0)] * a[(2, 2)]
        - a[(0, 2)] * a[(2, 0)]
        + a[(1, 1)] * a[(2, 2)]
        - a[(1, 2)] * a[(2, 1)];
    let det = a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
        - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
        + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)]);
    Ok((-tr, minors, -det))
}

/// All three roots of `λ³ + c2 λ² + c1 λ + c0`.
///
/// A real root is bracketed inside the Cauchy bound and refined by
/// safeguarded Newton steps; the remaining quadratic is solved directly.
pub fn cubic_roots<T: Scalar>(c2: T, c1: T, c0: T) -> [Complex<T>; 3] {
    let p = |x: T| ((x + c2) * x + c1) * x + c0;
    let dp = |x: T| (T::lit(3.0) * x + T::lit(2.0) * c2) * x + c1;
    let bound = T::one() + c2.abs().max(c1.abs()).max(c0.abs());
    let (mut lo, mut hi) = (-bound, bound);
    // p(-bound) < 0 < p(bound) for a monic cubic
    let mut r = T::zero();
    for _ in 0..400 {
        let pr = p(r);
        if pr == T::zero() {
            break;
        }
        if pr < T::zero() {
            lo = r;
        } else {
            hi = r;
        }
        if hi - lo <= T::epsilon() * lo.abs().max(hi.abs()).max(T::min_positive_value()) {
            break;
        }
        let d = dp(r);
        let newton = r - pr / d;
        r = if d != T::zero() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) / T::lit(2.0)
        };
        if r == lo || r == hi {
            break;
        }
    }
    // deflate: λ³ + c2 λ² + c1 λ + c0 = (λ − r)(λ² + b1 λ + b0)
    let b1 = c2 + r;
    let b0 = c1 + r * b1;
    let disc = b1 * b1 - T::lit(4.0) * b0;
    let two = T::lit(2.0);
    let (q1, q2) = if disc >= T::zero() {
        let s = disc.sqrt();
        // stable form avoids cancellation
        let q = -(b1 + b1.signum() * s) / two;
        if q == T::zero() {
            (
                Complex::new(T::zero(), T::zero()),
                Complex::new(T::zero(), T::zero()),
            )
        } else {
            (Complex::new(q, T::zero()), Complex::new(b0 / q, T::zero()))
        }
    } else {
        let im = (-disc).sqrt() / two;
        let re = -b1 / two;
        (Complex::new(re, im), Complex::new(re, -im))
    };
    [Complex::new(r, T::zero()), q1, q2]
}

/// Spectral radius of a 3×3 matrix from its characteristic cubic.
pub fn cubic_spectral_radius<T: Scalar>(a: &SquareMatrix<T>) -> Result<T> {
    let (c2, c1, c0) = characteristic_cubic(a)?;
    Ok(cubic_roots(c2, c1, c0)
        .iter()
        .fold(T::zero(), |acc, z| acc.max(z.norm())))
}
