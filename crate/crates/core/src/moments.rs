//! First and second moments of a single particle with frozen attractors.
//!
//! With the personal best `P` and global best `G` held fixed, one coordinate
//! of one particle follows
//!
//! ```text
//! X' = (1 + ω − φ1 R − φ2 S) X − ω X₋ + φ1 R P + φ2 S G + Δ
//! ```
//!
//! with `R, S ~ U[0,1]` and `Δ ~ U[−δ/2, δ/2]` independent. The vector
//! `(E[X²], E[X X₋], E[X₋²], E[X], E[X₋], 1)` then evolves by an exact
//! linear map, built here from `E[R] = 1/2`, `E[R²] = 1/3`, `E[RS] = 1/4`
//! and `E[Δ²] = δ²/12`. Its fixed point is the ground truth that the
//! closed-form limits are checked against.

use crate::error::{Error, Result};
use crate::linalg::{self, PowerIteration, SquareMatrix};
use crate::params::PsoParams;
use crate::scalar::Scalar;

/// `(E[X_t²], E[X_t X_{t−1}], E[X_{t−1}²], E[X_t], E[X_{t−1}], 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState<T>(pub [T; 6]);

impl<T: Scalar> MomentState<T> {
    /// Deterministic start `X_0 = x0`, `X_{−1} = x_prev`.
    pub fn deterministic(x0: T, x_prev: T) -> Self {
        Self([x0 * x0, x0 * x_prev, x_prev * x_prev, x0, x_prev, T::one()])
    }

    pub fn second_moment(&self) -> T {
        self.0[0]
    }
    pub fn lag_cross_moment(&self) -> T {
        self.0[1]
    }
    pub fn mean(&self) -> T {
        self.0[3]
    }
    pub fn variance(&self) -> T {
        self.0[0] - self.0[3] * self.0[3]
    }
}

/// Limits of `E[X_t]` and `Var(X_t)` together with `f(1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentLimits<T> {
    pub mean_limit: T,
    pub var_limit: T,
    pub f1: T,
    pub ms_stable: bool,
}

/// The 6×6 matrix advancing a [`MomentState`] by one step.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTransition<T> {
    matrix: SquareMatrix<T>,
}

pub fn equilibrium_point<T: Scalar>(params: &PsoParams<T>, p: T, g: T) -> Result<T> {
    let sum = params.phi1 + params.phi2;
    if sum == T::zero() {
        return Err(Error::Precondition("phi1 + phi2 must be positive".into()));
    }
    Ok((params.phi1 * p + params.phi2 * g) / sum)
}

/// Characteristic polynomial of the second-moment recurrence evaluated at 1:
///
/// `−(φ1+φ2)ω² + (φ1²/6 + φ2²/6 + φ1φ2/2)ω + φ1 + φ2 − φ1²/3 − φ2²/3 − φ1φ2/2`.
///
/// Positive exactly when the second moments converge (for `0 ≤ ω < 1`).
pub fn f_one<T: Scalar>(params: &PsoParams<T>) -> T {
    f_one_raw(params.omega, params.phi1, params.phi2)
}

pub fn f_one_raw<T: Scalar>(omega: T, phi1: T, phi2: T) -> T {
    let (sixth, third, half) = (T::lit(1.0 / 6.0), T::lit(1.0 / 3.0), T::lit(0.5));
    -(phi1 + phi2) * omega * omega
        + (sixth * phi1 * phi1 + sixth * phi2 * phi2 + half * phi1 * phi2) * omega
        + phi1
        + phi2
        - third * phi1 * phi1
        - third * phi2 * phi2
        - half * phi1 * phi2
}

/// The asymmetric printing with ω-coefficient `φ2²/6 + φ1²φ2²/2`.
/// Kept for comparison only; it disagrees with the moment recurrence.
pub fn f_one_asymmetric<T: Scalar>(omega: T, phi1: T, phi2: T) -> T {
    let (sixth, third, half) = (T::lit(1.0 / 6.0), T::lit(1.0 / 3.0), T::lit(0.5));
    -(phi1 + phi2) * omega * omega
        + (sixth * phi2 * phi2 + half * phi1 * phi1 * phi2 * phi2) * omega
        + phi1
        + phi2
        - third * phi1 * phi1
        - third * phi2 * phi2
        - half * phi1 * phi2
}

fn check_ms_preconditions<T: Scalar>(params: &PsoParams<T>) -> Result<T> {
    if !(params.omega >= T::zero() && params.omega < T::one()) {
        return Err(Error::Precondition(
            "variance limit needs 0 <= omega < 1".into(),
        ));
    }
    if params.phi_sum() <= T::zero() {
        return Err(Error::Precondition(
            "variance limit needs phi1 + phi2 > 0".into(),
        ));
    }
    let f1 = f_one(params);
    if f1 <= T::zero() {
        return Err(Error::Precondition(format!("f(1) = {f1} is not positive")));
    }
    Ok(f1)
}

/// `(1/6)·(φ1φ2/(φ1+φ2))²·(G−P)²`: the attractor-spread part of the
/// stationary second-moment source.
fn spread_term<T: Scalar>(params: &PsoParams<T>, p: T, g: T) -> T {
    let h = params.phi1 * params.phi2 / params.phi_sum();
    T::lit(1.0 / 6.0) * h * h * (g - p) * (g - p)
}

/// Stationary variance, matching the fixed point of [`MomentTransition`]:
///
/// `(1+ω)·((1/6)(φ1φ2/(φ1+φ2))²(G−P)² + δ²/12) / f(1)`.
///
/// The `(1+ω)` factor multiplies the noise term as well; see
/// [`variance_limit_printed`] for the variant where it does not.
pub fn variance_limit<T: Scalar>(params: &PsoParams<T>, p: T, g: T) -> Result<T> {
    let f1 = check_ms_preconditions(params)?;
    let noise = params.delta * params.delta / T::lit(12.0);
    Ok((T::one() + params.omega) * (spread_term(params, p, g) + noise) / f1)
}

/// `((1/6)(φ1φ2/(φ1+φ2))²(G−P)²(1+ω) + δ²/12) / f(1)`: noise term without
/// the `(1+ω)` factor. Underestimates the true limit whenever `ω > 0, δ > 0`.
pub fn variance_limit_printed<T: Scalar>(params: &PsoParams<T>, p: T, g: T) -> Result<T> {
    let f1 = check_ms_preconditions(params)?;
    let noise = params.delta * params.delta / T::lit(12.0);
    Ok((spread_term(params, p, g) * (T::one() + params.omega) + noise) / f1)
}

/// `(1/6)(φ1φ2/(φ1+φ2))² + (G−P)²(1+ω)/f(1)` (noise-free), the other printed
/// bracketing. Not even zero for `P = G`.
pub fn variance_limit_printed_alt<T: Scalar>(params: &PsoParams<T>, p: T, g: T) -> Result<T> {
    let f1 = check_ms_preconditions(params)?;
    let h = params.phi1 * params.phi2 / params.phi_sum();
    Ok(T::lit(1.0 / 6.0) * h * h + (g - p) * (g - p) * (T::one() + params.omega) / f1)
}

/// Closed-form limits, or `ms_stable = false` with NaN limits outside the region.
pub fn moment_limits<T: Scalar>(params: &PsoParams<T>, p: T, g: T) -> MomentLimits<T> {
    let f1 = f_one(params);
    match (
        equilibrium_point(params, p, g),
        variance_limit(params, p, g),
    ) {
        (Ok(mean_limit), Ok(var_limit)) => MomentLimits {
            mean_limit,
            var_limit,
            f1,
            ms_stable: true,
        },
        (mean, _) => MomentLimits {
            mean_limit: mean.unwrap_or_else(|_| T::nan()),
            var_limit: T::nan(),
            f1,
            ms_stable: false,
        },
    }
}

impl<T: Scalar> MomentTransition<T> {
    pub fn new(params: &PsoParams<T>, p: T, g: T) -> Self {
        let (omega, phi1, phi2) = (params.omega, params.phi1, params.phi2);
        let (half, third, quarter) = (T::lit(0.5), T::lit(1.0 / 3.0), T::lit(0.25));
        let two = T::lit(2.0);
        let k = T::one() + omega;
        let sum = phi1 + phi2;

        // a = k − φ1 R − φ2 S,  c = φ1 R P + φ2 S G
        let ea = k - half * sum;
        let ea2 = k * k - k * sum + third * phi1 * phi1 + third * phi2 * phi2 + half * phi1 * phi2;
        let ec = half * (phi1 * p + phi2 * g);
        let ec2 =
            third * phi1 * phi1 * p * p + third * phi2 * phi2 * g * g + half * phi1 * phi2 * p * g;
        let eac = k * ec
            - (third * phi1 * phi1 * p + quarter * phi1 * phi2 * (p + g) + third * phi2 * phi2 * g);
        let noise = params.delta * params.delta / T::lit(12.0);

        let z = T::zero();
        let o = T::one();
        let rows: [[T; 6]; 6] = [
            [
                ea2,
                -two * omega * ea,
                omega * omega,
                two * eac,
                -two * omega * ec,
                ec2 + noise,
            ],
            [ea, -omega, z, ec, z, z],
            [o, z, z, z, z, z],
            [z, z, z, ea, -omega, ec],
            [z, z, z, o, z, z],
            [z, z, z, z, z, o],
        ];
        let refs: Vec<&[T]> = rows.iter().map(|r| r.as_slice()).collect();
        Self {
            matrix: SquareMatrix::from_rows(&refs).expect("6x6"),
        }
    }

    pub fn matrix(&self) -> &SquareMatrix<T> {
        &self.matrix
    }

    pub fn apply(&self, s: &MomentState<T>) -> MomentState<T> {
        let v = self.matrix.mul_vec(&s.0);
        MomentState([v[0], v[1], v[2], v[3], v[4], v[5]])
    }

    /// `[s_0, s_1, …, s_steps]`.
    pub fn iterate(&self, init: MomentState<T>, steps: usize) -> Vec<MomentState<T>> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(init);
        let mut cur = init;
        for _ in 0..steps {
            cur = self.apply(&cur);
            out.push(cur);
        }
        out
    }

    /// Homogeneous second-moment block acting on `(E[X²], E[X X₋], E[X₋²])`.
    pub fn second_moment_block(&self) -> SquareMatrix<T> {
        self.matrix.leading_block(3)
    }

    /// Mean block acting on `(E[X], E[X₋])`.
    pub fn mean_block(&self) -> SquareMatrix<T> {
        let mut m = SquareMatrix::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = self.matrix[(3 + i, 3 + j)];
            }
        }
        m
    }

    /// Solves `s = A s + b` on the five non-constant components directly.
    pub fn fixed_point(&self) -> Result<MomentState<T>> {
        let mut lhs = SquareMatrix::zeros(5);
        let mut rhs = vec![T::zero(); 5];
        for i in 0..5 {
            for j in 0..5 {
                let id = if i == j { T::one() } else { T::zero() };
                lhs[(i, j)] = id - self.matrix[(i, j)];
            }
            rhs[i] = self.matrix[(i, 5)];
        }
        let s = linalg::solve(&lhs, &rhs)?;
        Ok(MomentState([s[0], s[1], s[2], s[3], s[4], T::one()]))
    }
}

/// Spectral radius by power iteration (tolerance 1e−12).
pub fn spectral_radius<T: Scalar>(m: &SquareMatrix<T>) -> Result<T> {
    linalg::power_iteration_radius(m, PowerIteration::default())
}

/// Spectral radius of the second-moment block for the given parameters;
/// `P` and `G` do not enter the homogeneous part.
pub fn second_moment_radius<T: Scalar>(params: &PsoParams<T>) -> Result<T> {
    spectral_radius(&MomentTransition::new(params, T::zero(), T::zero()).second_moment_block())
}

/// Cross-check of [`second_moment_radius`] through the characteristic cubic.
pub fn second_moment_radius_cubic<T: Scalar>(params: &PsoParams<T>) -> Result<T> {
    linalg::cubic_spectral_radius(
        &MomentTransition::new(params, T::zero(), T::zero()).second_moment_block(),
    )
}
