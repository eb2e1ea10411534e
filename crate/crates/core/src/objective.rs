//! Benchmark objectives with known optimum values.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::scalar::Scalar;

/// A minimisation objective with a known optimum value.
pub trait Objective<T: Scalar>: Sync {
    fn evaluate(&self, x: &[T]) -> T;

    /// `f(x*)` for a global minimiser `x*`.
    fn optimum_value(&self) -> T;

    fn name(&self) -> &str;
}

impl<T: Scalar, O: Objective<T> + ?Sized> Objective<T> for &O {
    fn evaluate(&self, x: &[T]) -> T {
        (**self).evaluate(x)
    }
    fn optimum_value(&self) -> T {
        (**self).optimum_value()
    }
    fn name(&self) -> &str {
        (**self).name()
    }
}

/// Squared Euclidean norm.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sphere;

impl<T: Scalar> Objective<T> for Sphere {
    #[inline]
    fn evaluate(&self, x: &[T]) -> T {
        x.iter().fold(T::zero(), |acc, &xi| acc + xi * xi)
    }
    fn optimum_value(&self) -> T {
        T::zero()
    }
    fn name(&self) -> &str {
        "sphere"
    }
}

/// Sphere restricted to the non-negative orthant; `+inf` everywhere else.
///
/// Defined for one dimension; in higher dimensions any negative coordinate
/// maps to `+inf`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpherePlus;

impl<T: Scalar> Objective<T> for SpherePlus {
    #[inline]
    fn evaluate(&self, x: &[T]) -> T {
        if x.iter().any(|&xi| xi < T::zero()) {
            T::infinity()
        } else {
            Sphere.evaluate(x)
        }
    }
    fn optimum_value(&self) -> T {
        T::zero()
    }
    fn name(&self) -> &str {
        "sphere_plus"
    }
}

/// `f(0) = 0`, `f(1) = 1`, `f(x) = 2` elsewhere. Exact comparisons.
///
/// Only the first coordinate is read.
#[derive(Debug, Clone, Copy, Default)]
pub struct Counterexample;

impl<T: Scalar> Objective<T> for Counterexample {
    #[inline]
    fn evaluate(&self, x: &[T]) -> T {
        let x0 = x[0];
        if x0 == T::zero() {
            T::zero()
        } else if x0 == T::one() {
            T::one()
        } else {
            T::lit(2.0)
        }
    }
    fn optimum_value(&self) -> T {
        T::zero()
    }
    fn name(&self) -> &str {
        "counterexample"
    }
}

/// `g ∘ f` for a strictly increasing `g`.
///
/// The optimum value is mapped through `g` as well, so hitting is measured
/// against `g(f(x*))`.
pub struct Transformed<O, G> {
    pub inner: O,
    pub transform: G,
    name: String,
}

impl<O, G> Transformed<O, G> {
    pub fn new(inner: O, transform: G, name: impl Into<String>) -> Self {
        Self {
            inner,
            transform,
            name: name.into(),
        }
    }
}

impl<T, O, G> Objective<T> for Transformed<O, G>
where
    T: Scalar,
    O: Objective<T>,
    G: Fn(T) -> T + Sync,
{
    fn evaluate(&self, x: &[T]) -> T {
        (self.transform)(self.inner.evaluate(x))
    }
    fn optimum_value(&self) -> T {
        (self.transform)(self.inner.optimum_value())
    }
    fn name(&self) -> &str {
        &self.name
    }
}

/// Objective selector used by configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    Sphere,
    SpherePlus,
    Counterexample,
}

impl<T: Scalar> Objective<T> for ObjectiveKind {
    #[inline]
    fn evaluate(&self, x: &[T]) -> T {
        match self {
            ObjectiveKind::Sphere => Sphere.evaluate(x),
            ObjectiveKind::SpherePlus => SpherePlus.evaluate(x),
            ObjectiveKind::Counterexample => Counterexample.evaluate(x),
        }
    }
    fn optimum_value(&self) -> T {
        T::zero()
    }
    fn name(&self) -> &str {
        self.as_str()
    }
}

impl ObjectiveKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ObjectiveKind::Sphere => "sphere",
            ObjectiveKind::SpherePlus => "sphere_plus",
            ObjectiveKind::Counterexample => "counterexample",
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sphere" => Ok(ObjectiveKind::Sphere),
            "sphere_plus" | "sphere+" => Ok(ObjectiveKind::SpherePlus),
            "counterexample" => Ok(ObjectiveKind::Counterexample),
            other => Err(Error::param(
                "objective",
                format!("unknown objective `{other}`"),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_values() {
        assert_eq!(Sphere.evaluate(&[0.0f64, 0.0, 0.0]), 0.0);
        assert_eq!(Sphere.evaluate(&[3.0f64, 4.0]), 25.0);
        assert_eq!(Sphere.evaluate(&[-2.0f64]), 4.0);
    }

    #[test]
    fn sphere_plus_values() {
        assert_eq!(SpherePlus.evaluate(&[2.0f64]), 4.0);
        assert_eq!(SpherePlus.evaluate(&[0.0f64]), 0.0);
        assert_eq!(SpherePlus.evaluate(&[-0.5f64]), f64::INFINITY);
        // any freshly initialised best with +inf loses every comparison
        assert!(1e300 < SpherePlus.evaluate(&[-0.5f64]));
    }

    #[test]
    fn counterexample_values() {
        assert_eq!(Counterexample.evaluate(&[0.0f64]), 0.0);
        assert_eq!(Counterexample.evaluate(&[1.0f64]), 1.0);
        assert_eq!(Counterexample.evaluate(&[0.5f64]), 2.0);
        assert_eq!(Counterexample.evaluate(&[1.0f64 + f64::EPSILON]), 2.0);
    }

    #[test]
    fn kind_parses_and_dispatches() {
        let k: ObjectiveKind = "sphere_plus".parse().unwrap();
        assert_eq!(Objective::<f64>::evaluate(&k, &[-1.0]), f64::INFINITY);
        assert!("rosenbrock".parse::<ObjectiveKind>().is_err());
    }

    #[test]
    fn transformed_maps_optimum() {
        let g = Transformed::new(Sphere, |v: f64| v.exp(), "exp_sphere");
        assert_eq!(g.optimum_value(), 1.0);
        assert_eq!(g.evaluate(&[1.0]), 1f64.exp());
    }

    proptest::proptest! {
        #[test]
        fn sphere_plus_agrees_on_nonnegative(x in 0.0f64..1e6) {
            proptest::prop_assert_eq!(SpherePlus.evaluate(&[x]), Sphere.evaluate(&[x]));
        }
    }
}
