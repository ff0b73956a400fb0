//! Adversarial reconstructions from a public template.

mod gradient;
mod pinv;

pub use gradient::{
    gradient_attack, surrogate_apply, surrogate_derivative, GradientAttack, GradientAttackConfig,
    Init, SurrogateSpec, DIVERGENCE_LIMIT,
};
pub use pinv::{pinv_attack, PinvAttack};
