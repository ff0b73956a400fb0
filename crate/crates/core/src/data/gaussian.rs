use rand::Rng;
use rand_distr::StandardNormal;

use super::Dataset;
use crate::error::{Result, StcaError};
use crate::seed::SeedSpec;

/// `count` i.i.d. draws from `N(0, sigma2_x·I_n)`.
pub fn gen_gaussian(n: usize, count: usize, sigma2_x: f64, seed: &SeedSpec) -> Result<Dataset> {
    if count == 0 || n == 0 {
        return Err(StcaError::param("gaussian source needs n >= 1 and count >= 1"));
    }
    if !(sigma2_x >= 0.0 && sigma2_x.is_finite()) {
        return Err(StcaError::param(format!("variance must be >= 0, got {sigma2_x}")));
    }
    let std = sigma2_x.sqrt();
    let mut rng = seed.rng();
    let samples = (0..count)
        .map(|_| (0..n).map(|_| std * rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    Dataset::new(samples, None, format!("gaussian(n={n}, sigma2={sigma2_x})"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_per_coordinate() {
        let (n, count) = (529, 10_000);
        let d = gen_gaussian(n, count, 1.0, &SeedSpec::new(3, "moments")).unwrap();
        let band = 4.0 / (count as f64).sqrt();
        for j in 0..n {
            let mean = d.samples.iter().map(|s| s[j]).sum::<f64>() / count as f64;
            let var = d.samples.iter().map(|s| (s[j] - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            assert!(mean.abs() <= band, "coord {j} mean {mean}");
            assert!((var - 1.0).abs() <= 0.05, "coord {j} var {var}");
        }
    }

    #[test]
    fn deterministic_and_degenerate() {
        let s = SeedSpec::new(1, "g");
        assert_eq!(gen_gaussian(5, 3, 2.0, &s).unwrap(), gen_gaussian(5, 3, 2.0, &s).unwrap());
        let z = gen_gaussian(5, 3, 0.0, &s).unwrap();
        assert!(z.samples.iter().flatten().all(|&v| v == 0.0));
        assert!(gen_gaussian(5, 0, 1.0, &s).is_err());
        assert!(gen_gaussian(5, 1, -1.0, &s).is_err());
    }
}
