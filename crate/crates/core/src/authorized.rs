//! Authorized decoding: a holder of a noisy probe `x + z` re-derives the code
//! support, strips the ambiguization symbols and solves the ridge system.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::codec::{project, top_k_support, ProtectedTemplate, TernaryCode};
use crate::error::{Result, StcaError};
use crate::linalg::{Matrix, RidgeSolver};
use crate::pack::ProjectionPack;
use crate::seed::SeedSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct NoisyProbe {
    pub values: Vec<f64>,
    pub noise_variance: f64,
}

impl NoisyProbe {
    pub fn new(values: Vec<f64>, noise_variance: f64) -> Result<Self> {
        if !(noise_variance >= 0.0) {
            return Err(StcaError::param(format!(
                "noise variance must be >= 0, got {noise_variance}"
            )));
        }
        Ok(NoisyProbe {
            values,
            noise_variance,
        })
    }

    /// `x + z` with `z ~ N(0, noise_variance·I)` drawn from `seed`.
    pub fn observe(x: &[f64], noise_variance: f64, seed: &SeedSpec) -> Result<Self> {
        let probe = NoisyProbe::new(x.to_vec(), noise_variance)?;
        if noise_variance == 0.0 {
            return Ok(probe);
        }
        let std = noise_variance.sqrt();
        let mut rng = seed.rng();
        let values = x
            .iter()
            .map(|v| v + std * rng.sample::<f64, _>(StandardNormal))
            .collect();
        Ok(NoisyProbe { values, ..probe })
    }
}

/// Sorted, de-duplicated code positions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SupportSet(Vec<usize>);

impl SupportSet {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        SupportSet(indices)
    }

    pub fn full(m: usize) -> Self {
        SupportSet((0..m).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|self ∩ truth| / |truth|`; 1 for an empty truth.
    pub fn overlap(&self, truth: &SupportSet) -> f64 {
        if truth.is_empty() {
            return 1.0;
        }
        let common = self.0.iter().filter(|i| truth.0.binary_search(i).is_ok()).count();
        common as f64 / truth.len() as f64
    }
}

/// Positions of the `s_x` largest projection magnitudes of the probe.
pub fn estimate_support(probe: &NoisyProbe, w: &Matrix, a: &Matrix, s_x: usize) -> Result<SupportSet> {
    let v = project(&probe.values, w, a)?;
    if s_x == 0 || s_x > v.len() {
        return Err(StcaError::param(format!("s_x must lie in [1, {}], got {s_x}", v.len())));
    }
    Ok(SupportSet(top_k_support(&v, s_x)))
}

pub fn unlock(u_a: &ProtectedTemplate, support: &SupportSet) -> Result<TernaryCode> {
    u_a.restrict(support.indices())
}

pub fn authorized_reconstruct(
    u_a: &ProtectedTemplate,
    probe: &NoisyProbe,
    w: &Matrix,
    a: &Matrix,
    s_x: usize,
    lambda: f64,
) -> Result<Vec<f64>> {
    let b = a.matmul(w)?;
    let solver = RidgeSolver::new(b, lambda)?;
    reconstruct_with(&solver, u_a, probe, w, a, s_x)
}

/// Same as [`authorized_reconstruct`] with a pre-factored solver for `A·W`.
pub fn reconstruct_with(
    solver: &RidgeSolver,
    u_a: &ProtectedTemplate,
    probe: &NoisyProbe,
    w: &Matrix,
    a: &Matrix,
    s_x: usize,
) -> Result<Vec<f64>> {
    if u_a.len() != a.rows() {
        return Err(StcaError::shape(format!(
            "template length {} does not match projection rows {}",
            u_a.len(),
            a.rows()
        )));
    }
    let support = estimate_support(probe, w, a, s_x)?;
    let code = unlock(u_a, &support)?;
    solver.solve(&code.to_real())
}

/// Pack-level convenience used by the CLI and the sweeps.
pub fn reconstruct_with_pack(
    pack: &ProjectionPack,
    solver: &RidgeSolver,
    u_a: &ProtectedTemplate,
    probe: &NoisyProbe,
) -> Result<Vec<f64>> {
    reconstruct_with(solver, u_a, probe, pack.w(), pack.a(), pack.params().s_x)
}
