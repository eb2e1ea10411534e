//! Validated PSO parameter tuple.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parameters of the Basic PSO (`delta == 0`) and the Noisy PSO (`delta > 0`).
///
/// `epsilon` is the target radius in objective space: a position `x` hits
/// when `|f(x) - f(x*)| < epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsoParams<T> {
    /// Inertia factor.
    pub omega: T,
    /// Cognitive acceleration (towards the personal best).
    pub phi1: T,
    /// Social acceleration (towards the global best).
    pub phi2: T,
    /// Width of the uniform velocity noise `U[-delta/2, delta/2]`.
    pub delta: T,
    /// Half-range of the uniform initialisation `U[-alpha, alpha]`.
    pub alpha: T,
    /// Hitting radius in objective space.
    pub epsilon: T,
    /// Swarm size.
    pub m: usize,
    /// Search-space dimension.
    pub n: usize,
}

impl<T: Scalar> PsoParams<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        omega: T,
        phi1: T,
        phi2: T,
        delta: T,
        alpha: T,
        epsilon: T,
        m: usize,
        n: usize,
    ) -> Result<Self> {
        let params = Self {
            omega,
            phi1,
            phi2,
            delta,
            alpha,
            epsilon,
            m,
            n,
        };
        params.validate()?;
        Ok(params)
    }

    /// Re-checks every invariant. Useful after fields were edited in place.
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &'static str, v: T| -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, "must be finite"))
            }
        };
        finite("omega", self.omega)?;
        finite("phi1", self.phi1)?;
        finite("phi2", self.phi2)?;
        finite("delta", self.delta)?;
        finite("alpha", self.alpha)?;
        finite("epsilon", self.epsilon)?;
        if self.phi1 < T::zero() {
            return Err(Error::param("phi1", "must be non-negative"));
        }
        if self.phi2 < T::zero() {
            return Err(Error::param("phi2", "must be non-negative"));
        }
        if self.delta < T::zero() {
            return Err(Error::param("delta", "must be non-negative"));
        }
        if self.alpha <= T::zero() {
            return Err(Error::param("alpha", "must be positive"));
        }
        if self.epsilon <= T::zero() {
            return Err(Error::param("epsilon", "must be positive"));
        }
        if self.m < 1 {
            return Err(Error::param("m", "swarm size must be at least 1"));
        }
        if self.n < 1 {
            return Err(Error::param("n", "dimension must be at least 1"));
        }
        Ok(())
    }

    /// `true` for the Noisy PSO.
    pub fn is_noisy(&self) -> bool {
        self.delta > T::zero()
    }

    pub fn with_delta(mut self, delta: T) -> Result<Self> {
        self.delta = delta;
        self.validate()?;
        Ok(self)
    }

    pub fn phi_sum(&self) -> T {
        self.phi1 + self.phi2
    }
}
