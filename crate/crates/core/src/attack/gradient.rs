//! Gradient-descent attack through a smooth stand-in for the ternarizer.
//!
//! The objective is `J(x) = ½‖u_a − φ̃(Bx)‖² + λ‖x‖²` with `B = A·W` and the
//! soft ternarizer `φ̃(t) = ½[tanh(β(t−τ)) + tanh(β(t+τ))]`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::codec::{top_k_support, ProtectedTemplate};
use crate::error::{Result, StcaError};
use crate::linalg::{dot, Matrix};
use crate::seed::SeedSpec;

/// Objective values beyond this abort the descent.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurrogateSpec {
    pub beta: f64,
    pub tau: f64,
}

impl Default for SurrogateSpec {
    fn default() -> Self {
        SurrogateSpec { beta: 10.0, tau: 0.0 }
    }
}

impl SurrogateSpec {
    pub fn new(beta: f64, tau: f64) -> Result<Self> {
        let spec = SurrogateSpec { beta, tau };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(StcaError::param(format!("surrogate beta must be > 0, got {}", self.beta)));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(StcaError::param(format!("surrogate tau must be >= 0, got {}", self.tau)));
        }
        Ok(())
    }

    /// Threshold set to the `s_x`-th largest `|projection|` so the soft
    /// ternarizer switches where top-`s_x` selection would.
    pub fn aligned(beta: f64, projection: &[f64], s_x: usize) -> Result<Self> {
        let support = top_k_support(projection, s_x);
        let tau = support
            .iter()
            .map(|&i| projection[i].abs())
            .fold(f64::INFINITY, f64::min);
        let tau = if tau.is_finite() { tau } else { 0.0 };
        SurrogateSpec::new(beta, tau)
    }

    #[inline]
    fn eval(&self, t: f64) -> (f64, f64) {
        let lo = (self.beta * (t - self.tau)).tanh();
        let hi = (self.beta * (t + self.tau)).tanh();
        let value = 0.5 * (lo + hi);
        let slope = 0.5 * self.beta * ((1.0 - lo * lo) + (1.0 - hi * hi));
        (value, slope)
    }
}

pub fn surrogate_apply(v: &[f64], spec: &SurrogateSpec) -> Vec<f64> {
    v.iter().map(|&t| spec.eval(t).0).collect()
}

pub fn surrogate_derivative(v: &[f64], spec: &SurrogateSpec) -> Vec<f64> {
    v.iter().map(|&t| spec.eval(t).1).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Init {
    Zeros,
    Gaussian { seed: SeedSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradientAttackConfig {
    pub step_size: f64,
    pub iterations: usize,
    pub lambda: f64,
    pub init: Init,
}

impl Default for GradientAttackConfig {
    fn default() -> Self {
        GradientAttackConfig {
            step_size: 1e-2,
            iterations: 200,
            lambda: 0.0,
            init: Init::Zeros,
        }
    }
}

impl GradientAttackConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(StcaError::param(format!("step size must be > 0, got {}", self.step_size)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(StcaError::param(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        Ok(())
    }

    pub fn initial_point(&self, n: usize) -> Vec<f64> {
        match &self.init {
            Init::Zeros => vec![0.0; n],
            Init::Gaussian { seed } => {
                let mut rng = seed.rng();
                (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
            }
        }
    }
}

/// The attack objective for one template.
#[derive(Debug, Clone)]
pub struct GradientAttack<'a> {
    target: Vec<f64>,
    composed: &'a Matrix,
    spec: SurrogateSpec,
    lambda: f64,
}

impl<'a> GradientAttack<'a> {
    pub fn new(u_a: &ProtectedTemplate, composed: &'a Matrix, spec: SurrogateSpec, lambda: f64) -> Result<Self> {
        spec.validate()?;
        if u_a.len() != composed.rows() {
            return Err(StcaError::shape(format!(
                "template length {} does not match {} projection rows",
                u_a.len(),
                composed.rows()
            )));
        }
        Ok(GradientAttack {
            target: u_a.to_real(),
            composed,
            spec,
            lambda,
        })
    }

    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        let v = self.composed.matvec(x)?;
        let misfit: f64 = v
            .iter()
            .zip(&self.target)
            .map(|(&t, &u)| (u - self.spec.eval(t).0).powi(2))
            .sum();
        Ok(0.5 * misfit + self.lambda * dot(x, x))
    }

    /// Analytic `∇J(x) = −Bᵀ[(u_a − φ̃(Bx)) ⊙ φ̃'(Bx)] + 2λx`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let v = self.composed.matvec(x)?;
        let back: Vec<f64> = v
            .iter()
            .zip(&self.target)
            .map(|(&t, &u)| {
                let (value, slope) = self.spec.eval(t);
                -(u - value) * slope
            })
            .collect();
        let mut grad = self.composed.matvec_t(&back)?;
        for (g, xi) in grad.iter_mut().zip(x) {
            *g += 2.0 * self.lambda * xi;
        }
        Ok(grad)
    }

    /// Runs `iterations` steps of `x ← x − η∇J(x)` from `x0`.
    pub fn descend(&self, x0: Vec<f64>, step_size: f64, iterations: usize) -> Result<Vec<f64>> {
        let mut x = x0;
        for it in 0..iterations {
            let grad = self.gradient(&x)?;
            for (xi, g) in x.iter_mut().zip(&grad) {
                *xi -= step_size * g;
            }
            let j = self.objective(&x)?;
            if !(j.is_finite() && j <= DIVERGENCE_LIMIT) {
                return Err(StcaError::Divergence(format!(
                    "objective {j:e} at iteration {} (step size {step_size} too large?)",
                    it + 1
                )));
            }
        }
        Ok(x)
    }
}

pub fn gradient_attack(
    u_a: &ProtectedTemplate,
    a: &Matrix,
    w: &Matrix,
    spec: &SurrogateSpec,
    cfg: &GradientAttackConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let composed = a.matmul(w)?;
    let attack = GradientAttack::new(u_a, &composed, *spec, cfg.lambda)?;
    attack.descend(cfg.initial_point(composed.cols()), cfg.step_size, cfg.iterations)
}
