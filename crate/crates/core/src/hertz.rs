//! Hertzian sphere-on-surface contact for the pulp against a rigid
//! environment.

use crate::error::{ModelError, Result};

/// Shape of the rigid surface the fingertip presses against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Environment {
    Flat,
    /// Convex body of the given radius (m), e.g. a cylinder or ball.
    Convex(f64),
    /// Concave socket of the given radius (m).
    Concave(f64),
}

impl Environment {
    pub fn name(&self) -> &'static str {
        match self {
            Environment::Flat => "flat",
            Environment::Convex(_) => "convex",
            Environment::Concave(_) => "concave",
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match *self {
            Environment::Flat => None,
            Environment::Convex(r) | Environment::Concave(r) => Some(r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactScenario {
    pub pulp_radius: f64,
    pub environment: Environment,
    pub pulp_modulus: f64,
    pub pulp_poisson: f64,
}

impl ContactScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.pulp_radius.is_finite() && self.pulp_radius > 0.0) {
            return Err(ModelError::InvalidScenario(format!(
                "pulp radius must be positive, got {}",
                self.pulp_radius
            )));
        }
        if !(self.pulp_modulus.is_finite() && self.pulp_modulus >= 0.0) {
            return Err(ModelError::InvalidScenario(format!(
                "pulp modulus must be non-negative, got {}",
                self.pulp_modulus
            )));
        }
        if !(0.0..0.5).contains(&self.pulp_poisson) {
            return Err(ModelError::InvalidScenario(format!(
                "Poisson ratio must lie in [0, 0.5), got {}",
                self.pulp_poisson
            )));
        }
        if let Some(r) = self.environment.radius() {
            if !(r.is_finite() && r > 0.0) {
                return Err(ModelError::InvalidScenario(format!(
                    "environment radius must be positive, got {r}"
                )));
            }
        }
        if let Environment::Concave(r) = self.environment {
            if r <= self.pulp_radius {
                return Err(ModelError::CurvatureMismatch {
                    r_pulp: self.pulp_radius,
                    r_env: r,
                });
            }
        }
        Ok(())
    }

    pub fn with_environment(&self, environment: Environment) -> Self {
        ContactScenario { environment, ..*self }
    }

    /// Plane-strain modulus `E / (1 - nu^2)` of the pulp.
    pub fn effective_modulus(&self) -> f64 {
        self.pulp_modulus / (1.0 - self.pulp_poisson * self.pulp_poisson)
    }

    /// Radius of the equivalent sphere-on-flat problem.
    pub fn effective_radius(&self) -> Result<f64> {
        self.validate()?;
        Ok(match self.environment {
            Environment::Flat => self.pulp_radius,
            Environment::Convex(r) => 1.0 / (1.0 / self.pulp_radius + 1.0 / r),
            Environment::Concave(r) => 1.0 / (1.0 / self.pulp_radius - 1.0 / r),
        })
    }

    /// `E* sqrt(R_eff)`, the common prefactor of every Hertz law.
    pub fn contact_stiffness_factor(&self) -> Result<f64> {
        Ok(self.effective_modulus() * self.effective_radius()?.sqrt())
    }

    /// `F = (4/3) E* sqrt(R_eff) delta^{3/2}`.
    pub fn contact_force(&self, delta_c: f64) -> Result<f64> {
        Ok(hertz_force(self.contact_stiffness_factor()?, delta_c))
    }

    /// `a = sqrt(R_eff delta)`.
    pub fn contact_radius(&self, delta_c: f64) -> Result<f64> {
        Ok((self.effective_radius()? * delta_c).sqrt())
    }

    /// `U = (8/15) E* sqrt(R_eff) delta^{5/2}`.
    pub fn contact_energy(&self, delta_c: f64) -> Result<f64> {
        Ok(hertz_energy(self.contact_stiffness_factor()?, delta_c))
    }
}

pub(crate) fn hertz_force(factor: f64, delta_c: f64) -> f64 {
    4.0 / 3.0 * factor * delta_c * delta_c.sqrt()
}

pub(crate) fn hertz_energy(factor: f64, delta_c: f64) -> f64 {
    8.0 / 15.0 * factor * delta_c * delta_c * delta_c.sqrt()
}
