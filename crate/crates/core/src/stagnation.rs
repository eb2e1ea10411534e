//! Closed forms and bounds for stagnating swarms.
//!
//! Two settings are covered. A single particle started with a small negative
//! velocity drifts geometrically and stops short of the optimum. Two particles
//! driven only by the social term contract towards each other at rate `κ`,
//! and the total distance they can still travel is bounded in expectation.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::params::PsoParams;
use crate::scalar::Scalar;

/// Initial positions and velocities of a two-particle swarm (1-D).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoParticleInit<T> {
    pub x1: T,
    pub x2: T,
    pub v1: T,
    pub v2: T,
}

impl<T: Scalar> TwoParticleInit<T> {
    pub fn new(x1: T, x2: T, v1: T, v2: T) -> Self {
        Self { x1, x2, v1, v2 }
    }

    /// `D_0 = x2 − x1`.
    pub fn d0(&self) -> T {
        self.x2 - self.x1
    }

    /// `|D_0| + |v1| + |v2|`, the scale shared by the distance and velocity bounds.
    pub fn spread(&self) -> T {
        self.d0().abs() + self.v1.abs() + self.v2.abs()
    }
}

/// Condition names reported by [`check_two_particle_stagnation`].
pub const CONDITIONS: [&str; 5] = [
    "omega_lt_1",
    "phi2_in_(1,2)",
    "velocities_nonpositive",
    "kappa_lt_1",
    "positions_above_threshold",
];

#[derive(Debug, Clone, PartialEq)]
pub struct StagnationVerdict<T> {
    pub kappa: T,
    pub lambda: T,
    /// `2ε + 2φ2 (|D0| + |v1| + |v2|) / ((1−ω)(1−κ))`; `+inf` when `κ ≥ 1`.
    pub position_threshold: T,
    /// `2φ2 / ((1−ω)(1−κ))`, the coefficient of the velocity-sum bound.
    pub velocity_coefficient: T,
    pub conditions: BTreeMap<&'static str, bool>,
}

impl<T> StagnationVerdict<T> {
    pub fn all_met(&self) -> bool {
        self.conditions.values().all(|&ok| ok)
    }
}

fn require_positive<T: Scalar>(name: &'static str, v: T) -> Result<()> {
    if v > T::zero() {
        Ok(())
    } else {
        Err(Error::param(name, "must be positive"))
    }
}

/// `λ = (φ² − 2φ + 2)/φ + 2ω`.
pub fn lambda<T: Scalar>(omega: T, phi2: T) -> Result<T> {
    require_positive("phi2", phi2)?;
    let two = T::lit(2.0);
    Ok((phi2 * phi2 - two * phi2 + two) / phi2 + two * omega)
}

/// Contraction rate of `E|D_t|`:
///
/// `κ = (φ²−2φ+2+2ωφ)/(4φ) + √((φ²−2φ+2ωφ+2)(φ²+6φ+2ωφ+2))/(4φ)` with `φ = φ2`.
pub fn kappa<T: Scalar>(omega: T, phi2: T) -> Result<T> {
    require_positive("phi2", phi2)?;
    let (two, four, six) = (T::lit(2.0), T::lit(4.0), T::lit(6.0));
    let phi = phi2;
    let a = phi * phi - two * phi + two + two * omega * phi;
    let b = phi * phi + six * phi + two * omega * phi + two;
    Ok(a / (four * phi) + (a * b).sqrt() / (four * phi))
}

/// `κ` expressed through `λ`: `(λ + √(8λ + λ²))/4`.
pub fn kappa_from_lambda<T: Scalar>(lambda: T) -> T {
    (lambda + (T::lit(8.0) * lambda + lambda * lambda).sqrt()) / T::lit(4.0)
}

/// `E|1 − Sφ| = (φ² − 2φ + 2)/(2φ)` for `S ~ U[0,1]`, `φ > 1`.
pub fn expected_abs_one_minus_s_phi<T: Scalar>(phi: T) -> Result<T> {
    if phi <= T::one() {
        return Err(Error::param("phi", "closed form derived for phi > 1"));
    }
    let two = T::lit(2.0);
    Ok((phi * phi - two * phi + two) / (two * phi))
}

/// `E|1 − Sφ|` by adaptive quadrature over `s ∈ [0, 1]`; valid for any `φ`.
pub fn expected_abs_one_minus_s_phi_quadrature(phi: f64) -> f64 {
    crate::quadrature::adaptive_simpson(|s| (1.0 - s * phi).abs(), 0.0, 1.0, 1e-14)
}

/// Roots `(α, β)` of `x² = c(x + 1)`.
pub fn fib_roots<T: Scalar>(c: T) -> Result<(T, T)> {
    require_positive("c", c)?;
    let root = (c * (T::lit(4.0) + c)).sqrt();
    Ok(((c - root) / T::lit(2.0), (c + root) / T::lit(2.0)))
}

/// `a_n` for `a_n = c(a_{n−1} + a_{n−2})` with seeds `a_1`, `a_2`, via
/// `a_n = αⁿA + βⁿB`.
pub fn fib_closed_form<T: Scalar>(c: T, a1: T, a2: T, n: u32) -> Result<T> {
    if n == 0 {
        return Err(Error::param("n", "index starts at 1"));
    }
    let (alpha, beta) = fib_roots(c)?;
    match n {
        1 => return Ok(a1),
        2 => return Ok(a2),
        _ => {}
    }
    let gap = beta - alpha;
    let a = (a1 * beta - a2) / (alpha * gap);
    let b = (a2 - alpha * a1) / (beta * gap);
    let n = n as i32;
    Ok(alpha.powi(n) * a + beta.powi(n) * b)
}

/// `κᵗ (2|D0| + v1 − v2)`, the bound on `E|D_t|` as stated (signed velocities).
pub fn d_abs_expectation_bound<T: Scalar>(t: u32, init: &TwoParticleInit<T>, kappa: T) -> T {
    kappa.powi(t as i32) * (T::lit(2.0) * init.d0().abs() + init.v1 - init.v2)
}

/// `κᵗ (2|D0| + |v1| + |v2|)`, never smaller than [`d_abs_expectation_bound`].
pub fn d_abs_expectation_bound_abs<T: Scalar>(t: u32, init: &TwoParticleInit<T>, kappa: T) -> T {
    kappa.powi(t as i32) * (T::lit(2.0) * init.d0().abs() + init.v1.abs() + init.v2.abs())
}

/// `2φ2/((1−ω)(1−κ)) · (|D0| + |v1| + |v2|)`, bounding `Σ_t E|V_t|` per particle.
pub fn velocity_sum_bound<T: Scalar>(
    params: &PsoParams<T>,
    init: &TwoParticleInit<T>,
) -> Result<T> {
    let k = kappa(params.omega, params.phi2)?;
    if k >= T::one() {
        return Err(Error::Precondition(format!(
            "kappa = {k} >= 1, the series diverges"
        )));
    }
    if !(params.omega > T::zero() && params.omega < T::one()) {
        return Err(Error::Precondition(
            "velocity-sum bound needs 0 < omega < 1".into(),
        ));
    }
    Ok(velocity_coefficient(params.omega, params.phi2, k) * init.spread())
}

fn velocity_coefficient<T: Scalar>(omega: T, phi2: T, kappa: T) -> T {
    T::lit(2.0) * phi2 / ((T::one() - omega) * (T::one() - kappa))
}

/// Evaluates every hypothesis of the two-particle stagnation result.
///
/// `params.epsilon` is read as the radius of the ball around the optimum in
/// search space.
pub fn check_two_particle_stagnation<T: Scalar>(
    params: &PsoParams<T>,
    init: &TwoParticleInit<T>,
) -> StagnationVerdict<T> {
    let (omega, phi2) = (params.omega, params.phi2);
    let kappa_v = kappa(omega, phi2).unwrap_or_else(|_| T::nan());
    let lambda_v = lambda(omega, phi2).unwrap_or_else(|_| T::nan());
    let kappa_ok = kappa_v < T::one();
    let omega_ok = omega < T::one();
    let coefficient = if kappa_ok && omega_ok {
        velocity_coefficient(omega, phi2, kappa_v)
    } else {
        T::infinity()
    };
    let threshold = T::lit(2.0) * params.epsilon + coefficient * init.spread();
    let mut conditions = BTreeMap::new();
    conditions.insert(CONDITIONS[0], omega_ok);
    conditions.insert(CONDITIONS[1], phi2 > T::one() && phi2 < T::lit(2.0));
    conditions.insert(CONDITIONS[2], init.v1 <= T::zero() && init.v2 <= T::zero());
    conditions.insert(CONDITIONS[3], kappa_ok);
    conditions.insert(CONDITIONS[4], init.x1 > threshold && init.x2 > threshold);
    StagnationVerdict {
        kappa: kappa_v,
        lambda: lambda_v,
        position_threshold: threshold,
        velocity_coefficient: coefficient,
        conditions,
    }
}

/// `x0 > εα` and `(εα − x0)/(1−ω) < v0 < 0`.
pub fn bad_init_event<T: Scalar>(x0: T, v0: T, omega: T, epsilon: T, alpha: T) -> bool {
    let r = epsilon * alpha;
    x0 > r && (r - x0) / (T::one() - omega) < v0 && v0 < T::zero()
}

/// Condition under which the lone-particle limit `X0 + V0·ω/(1−ω)` really
/// stays above `εα`: `x0 > εα` and `(εα − x0)(1−ω)/ω < v0 < 0`.
///
/// [`bad_init_event`] implies this only when `ω/(1−ω)² ≤ 1`, i.e.
/// `ω ≤ (3 − √5)/2`; for larger inertia some of its members do reach the ball.
pub fn bad_init_event_sufficient<T: Scalar>(x0: T, v0: T, omega: T, epsilon: T, alpha: T) -> bool {
    let r = epsilon * alpha;
    if !(x0 > r && v0 < T::zero() && omega < T::one()) {
        return false;
    }
    omega <= T::zero() || (r - x0) * (T::one() - omega) / omega < v0
}

/// Lone-particle trajectory after a bad initialisation:
/// `V_t = ωᵗ V_0`, `X_t = X_0 + V_0 Σ_{i=1}^{t} ωⁱ`.
pub fn one_particle_trajectory<T: Scalar>(x0: T, v0: T, omega: T, t: u32) -> (T, T) {
    let wt = omega.powi(t as i32);
    let sum = if omega == T::one() {
        T::from_u32(t).unwrap()
    } else {
        omega * (T::one() - wt) / (T::one() - omega)
    };
    (x0 + v0 * sum, wt * v0)
}

/// `X_∞ = X_0 + V_0 ω/(1−ω)`.
pub fn one_particle_limit<T: Scalar>(x0: T, v0: T, omega: T) -> T {
    x0 + v0 * omega / (T::one() - omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kappa_examples() {
        assert!((kappa(0.07_f64, 1.5).unwrap() - 0.982169).abs() < 1e-6);
        assert_relative_eq!(kappa(0.0, 2.0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(kappa(0.1, 0.0).is_err());
    }

    #[test]
    fn lambda_examples() {
        assert_relative_eq!(
            lambda(0.07, 1.5).unwrap(),
            1.25 / 1.5 + 0.14,
            epsilon = 1e-15
        );
        assert_eq!(lambda(0.0, 1.0).unwrap(), 1.0);
        assert_eq!(lambda(0.5, 1.0).unwrap(), 2.0);
        assert!(lambda(0.5, -1.0).is_err());
    }

    #[test]
    fn kappa_below_one_iff_lambda_below_one() {
        for i in 0..50 {
            for j in 1..50 {
                let w = i as f64 / 50.0;
                let phi = 1.0 + j as f64 / 50.0;
                let (k, l) = (kappa(w, phi).unwrap(), lambda(w, phi).unwrap());
                if (l - 1.0).abs() > 1e-12 {
                    assert_eq!(k < 1.0, l < 1.0, "w={w} phi={phi}");
                }
            }
        }
    }

    #[test]
    fn abs_one_minus_s_phi() {
        assert_relative_eq!(
            expected_abs_one_minus_s_phi(1.5).unwrap(),
            5.0 / 12.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            expected_abs_one_minus_s_phi(2.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            expected_abs_one_minus_s_phi(1.0 + 1e-12).unwrap(),
            0.5,
            epsilon = 1e-11
        );
        assert!(expected_abs_one_minus_s_phi(1.0).is_err());
    }

    #[test]
    fn fibonacci_examples() {
        assert_relative_eq!(
            fib_closed_form(1.0, 1.0, 1.0, 10).unwrap(),
            55.0,
            epsilon = 1e-9
        );
        assert_eq!(fib_closed_form(0.7, 0.3, -2.0, 1).unwrap(), 0.3);
        assert_eq!(fib_closed_form(0.7, 0.3, -2.0, 2).unwrap(), -2.0);
        assert!(fib_closed_form(0.0, 1.0, 1.0, 5).is_err());
        assert!(fib_closed_form(1.0, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn d_bound_examples() {
        let init = TwoParticleInit::new(184.0, 185.0, -1.0, -1.0);
        let k: f64 = 0.982169;
        assert_relative_eq!(
            d_abs_expectation_bound(7, &init, k),
            2.0 * k.powi(7),
            epsilon = 1e-15
        );
        assert_eq!(d_abs_expectation_bound(0, &init, k), 2.0);
        let still = TwoParticleInit::new(3.0, 3.0, 0.0, 0.0);
        assert_eq!(d_abs_expectation_bound(5, &still, k), 0.0);
        assert!(d_abs_expectation_bound_abs(5, &init, k) >= d_abs_expectation_bound(5, &init, k));
    }

    #[test]
    fn velocity_sum_bound_example() {
        let p = PsoParams::new(0.07, 0.0, 1.5, 0.0, 200.0, 0.5, 2, 1).unwrap();
        let init = TwoParticleInit::new(184.0, 185.0, -1.0, -1.0);
        let b = velocity_sum_bound(&p, &init).unwrap();
        assert!((b - 542.8_f64).abs() < 0.5, "{b}");
        let zero = TwoParticleInit::new(184.0, 184.0, 0.0, 0.0);
        assert_eq!(velocity_sum_bound(&p, &zero).unwrap(), 0.0);
        let p_unstable = PsoParams { omega: 0.5, ..p };
        assert!(velocity_sum_bound(&p_unstable, &init).is_err());
    }

    #[test]
    fn velocity_bound_grows_with_omega() {
        let init = TwoParticleInit::new(184.0, 185.0, -1.0, -1.0);
        let mut last = 0.0;
        for i in 1..7 {
            let p = PsoParams::new(0.01 * i as f64, 0.0, 1.5, 0.0, 1.0, 0.5, 2, 1).unwrap();
            let b = velocity_sum_bound(&p, &init).unwrap();
            assert!(b > last);
            last = b;
        }
    }

    #[test]
    fn published_example_misses_threshold() {
        let p = PsoParams::new(0.07, 0.0, 1.5, 0.0, 200.0, 0.5, 2, 1).unwrap();
        let v = check_two_particle_stagnation(&p, &TwoParticleInit::new(184.0, 185.0, -1.0, -1.0));
        assert!(v.conditions["omega_lt_1"]);
        assert!(v.conditions["phi2_in_(1,2)"]);
        assert!(v.conditions["velocities_nonpositive"]);
        assert!(v.conditions["kappa_lt_1"]);
        assert!(!v.conditions["positions_above_threshold"]);
        assert!((v.position_threshold - 543.8_f64).abs() < 0.5);
        assert!((v.velocity_coefficient - 180.9_f64).abs() < 0.1);

        let far =
            check_two_particle_stagnation(&p, &TwoParticleInit::new(600.0, 601.0, -1.0, -1.0));
        assert!(far.all_met());
        assert!(far.kappa < 1.0);

        let p25 = PsoParams { phi2: 2.5, ..p };
        let v =
            check_two_particle_stagnation(&p25, &TwoParticleInit::new(600.0, 601.0, -1.0, -1.0));
        assert!(!v.conditions["phi2_in_(1,2)"]);
        assert!(!v.all_met());
    }

    #[test]
    fn bad_init_examples() {
        assert!(bad_init_event(0.9, -0.05, 0.5, 0.5, 1.0));
        assert!(!bad_init_event(0.9, 0.0, 0.5, 0.5, 1.0));
        assert!(!bad_init_event(0.5, -0.05, 0.5, 0.5, 1.0));
        assert!(!bad_init_event(0.9, -0.8, 0.5, 0.5, 1.0));
    }

    #[test]
    fn printed_event_can_reach_the_ball_for_large_inertia() {
        let (x0, v0, omega) = (0.9, -0.3, 0.7);
        assert!(bad_init_event(x0, v0, omega, 0.5, 1.0));
        assert!(!bad_init_event_sufficient(x0, v0, omega, 0.5, 1.0));
        assert!(one_particle_limit(x0, v0, omega) < 0.5);
    }

    #[test]
    fn one_particle_examples() {
        let (x, v) = one_particle_trajectory(0.9, -0.05, 0.5, 1);
        assert_relative_eq!(x, 0.9 + 0.5 * -0.05, epsilon = 1e-16);
        assert_relative_eq!(v, 0.5 * -0.05, epsilon = 1e-16);
        assert_relative_eq!(one_particle_limit(0.9, -0.05, 0.5), 0.85, epsilon = 1e-15);
        let (x, _) = one_particle_trajectory(0.9, -0.05, 0.5, 200);
        assert_relative_eq!(x, 0.85, epsilon = 1e-15);
    }

    #[test]
    fn abs_expectation_matches_quadrature() {
        for phi in [1.1, 1.5, 1.9] {
            let q = expected_abs_one_minus_s_phi_quadrature(phi);
            assert!((expected_abs_one_minus_s_phi(phi).unwrap() - q).abs() < 1e-10);
        }
        assert!((expected_abs_one_minus_s_phi_quadrature(0.5) - 0.75).abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn fib_closed_form_matches_recurrence(c in 0.05f64..3.0, a1 in -5.0f64..5.0, a2 in -5.0f64..5.0) {
            // rounding error scales with the absolute-value recurrence
            let (mut prev2, mut prev1) = (a1, a2);
            let (mut mag2, mut mag1) = (a1.abs(), a2.abs());
            for n in 3..=40u32 {
                let next = c * (prev1 + prev2);
                let mag = c * (mag1 + mag2);
                let cf = fib_closed_form(c, a1, a2, n).unwrap();
                proptest::prop_assert!((cf - next).abs() <= 1e-9 * mag.max(1e-300), "n={} cf={} rec={}", n, cf, next);
                prev2 = prev1;
                prev1 = next;
                mag2 = mag1;
                mag1 = mag;
            }
        }

        #[test]
        fn sufficient_event_trajectory_stays_outside(x0 in 0.51f64..1.0, frac in 0.01f64..0.99, omega in 0.05f64..0.95) {
            let (eps, alpha) = (0.5, 1.0);
            let v0 = -frac * (x0 - eps * alpha) * (1.0 - omega) / omega;
            proptest::prop_assert!(bad_init_event_sufficient(x0, v0, omega, eps, alpha));
            proptest::prop_assert!(one_particle_limit(x0, v0, omega) > eps * alpha);
            for t in [1u32, 10, 100, 1000] {
                let (x, _) = one_particle_trajectory(x0, v0, omega, t);
                proptest::prop_assert!(x > eps * alpha);
            }
        }

        #[test]
        fn printed_event_suffices_for_small_inertia(x0 in 0.51f64..1.0, frac in 0.01f64..0.99, omega in 0.0f64..0.38) {
            let (eps, alpha) = (0.5, 1.0);
            let v0 = -frac * (x0 - eps * alpha) / (1.0 - omega);
            proptest::prop_assert!(bad_init_event(x0, v0, omega, eps, alpha));
            proptest::prop_assert!(bad_init_event_sufficient(x0, v0, omega, eps, alpha));
            proptest::prop_assert!(one_particle_limit(x0, v0, omega) > eps * alpha);
        }
    }
}
