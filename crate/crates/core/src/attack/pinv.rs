use crate::codec::ProtectedTemplate;
use crate::error::{Result, StcaError};
use crate::linalg::{Matrix, RidgeSolver};

/// Closed-form ridge reconstruction `x̂ = ((AW)ᵀAW + λI)⁻¹(AW)ᵀ u_a`, treating
/// the ternary template as if it were the unquantized projection.
pub fn pinv_attack(u_a: &ProtectedTemplate, a: &Matrix, w: &Matrix, lambda: f64) -> Result<Vec<f64>> {
    PinvAttack::new(a.matmul(w)?, lambda)?.reconstruct(u_a)
}

/// Pre-factored pseudo-inverse attack for repeated use on one `A·W`.
#[derive(Debug, Clone)]
pub struct PinvAttack {
    solver: RidgeSolver,
}

impl PinvAttack {
    pub fn new(composed: Matrix, lambda: f64) -> Result<Self> {
        Ok(PinvAttack {
            solver: RidgeSolver::new(composed, lambda)?,
        })
    }

    pub fn solver(&self) -> &RidgeSolver {
        &self.solver
    }

    pub fn reconstruct(&self, u_a: &ProtectedTemplate) -> Result<Vec<f64>> {
        self.reconstruct_real(&u_a.to_real())
    }

    /// Applies the same linear map to an arbitrary real code vector.
    pub fn reconstruct_real(&self, code: &[f64]) -> Result<Vec<f64>> {
        if code.len() != self.solver.operator().rows() {
            return Err(StcaError::shape(format!(
                "code length {} does not match {} projection rows",
                code.len(),
                self.solver.operator().rows()
            )));
        }
        self.solver.solve(code)
    }
}
