use serde::Serialize;

use crate::error::{FuncordError, Result};

/// Nonnegative weights on a finite set of atoms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measure {
    pub weights: Vec<f64>,
}

impl Measure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= -1e-12)) {
            return Err(FuncordError::Construction(format!("negative weight {w} on atom {i}")));
        }
        Ok(Measure { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `μ(E)` for the set of atoms whose bits are set in `mask`.
    pub fn of_set(&self, mask: u64) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, w)| *w)
            .sum()
    }
}

fn same_len(mu: &Measure, nu: &Measure) -> Result<()> {
    if mu.len() != nu.len() {
        return Err(FuncordError::SizeMismatch {
            expected: mu.len(),
            got: nu.len(),
        });
    }
    Ok(())
}

/// Classical decomposition: the part of `μ` on atoms charged by `ν`, and the rest.
pub fn measure_lebesgue(mu: &Measure, nu: &Measure) -> Result<(Measure, Measure)> {
    same_len(mu, nu)?;
    let (ac, sing) = mu
        .weights
        .iter()
        .zip(&nu.weights)
        .map(|(&m, &n)| if n > 0.0 { (m, 0.0) } else { (0.0, m) })
        .unzip();
    Ok((Measure { weights: ac }, Measure { weights: sing }))
}

/// Atomwise harmonic combination `μν / (μ + ν)`.
pub fn measure_parallel_sum(mu: &Measure, nu: &Measure) -> Result<Measure> {
    same_len(mu, nu)?;
    let weights = mu
        .weights
        .iter()
        .zip(&nu.weights)
        .map(|(&m, &n)| if m + n > 0.0 { m * n / (m + n) } else { 0.0 })
        .collect();
    Ok(Measure { weights })
}

/// Entrywise minimum; for at most 10 atoms also checked against
/// `(μ∧ν)(E) = inf_F μ(E∩F) + ν(E∖F)` on the full set and every singleton.
pub fn measure_infimum(mu: &Measure, nu: &Measure) -> Result<Measure> {
    same_len(mu, nu)?;
    let weights: Vec<f64> = mu
        .weights
        .iter()
        .zip(&nu.weights)
        .map(|(&m, &n)| m.min(n))
        .collect();
    let meet = Measure { weights };
    let m = mu.len();
    if m <= 10 {
        let full = (1u64 << m) - 1;
        let sets = std::iter::once(full).chain((0..m).map(|i| 1u64 << i));
        for e in sets {
            let brute = (0..=full)
                .map(|f| mu.of_set(e & f) + nu.of_set(e & !f))
                .fold(f64::INFINITY, f64::min);
            let diff = (brute - meet.of_set(e)).abs();
            let bound = 1e-12 * (1.0 + brute.abs());
            if diff > bound {
                return Err(FuncordError::CrossCheckFailed {
                    what: format!("measure infimum on set {e:#b}"),
                    diff,
                    bound,
                });
            }
        }
    }
    Ok(meet)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(w: &[f64]) -> Measure {
        Measure::new(w.to_vec()).unwrap()
    }

    #[test]
    fn lebesgue_examples() {
        assert_eq!(measure_lebesgue(&m(&[1.0, 1.0]), &m(&[1.0, 0.0])).unwrap(), (m(&[1.0, 0.0]), m(&[0.0, 1.0])));
        let mu = m(&[0.5, 2.0, 3.0]);
        assert_eq!(measure_lebesgue(&mu, &m(&[1.0, 1.0, 0.1])).unwrap(), (mu.clone(), m(&[0.0, 0.0, 0.0])));
        let zero = m(&[0.0, 0.0]);
        assert_eq!(measure_lebesgue(&zero, &m(&[1.0, 0.0])).unwrap(), (zero.clone(), zero));
    }

    #[test]
    fn infimum_examples() {
        assert_eq!(measure_infimum(&m(&[2.0, 1.0]), &m(&[1.0, 3.0])).unwrap(), m(&[1.0, 1.0]));
        let mu = m(&[0.3, 0.0, 4.0]);
        assert_eq!(measure_infimum(&mu, &mu).unwrap(), mu);
        assert_eq!(measure_infimum(&m(&[1.0, 0.0]), &m(&[0.0, 1.0])).unwrap(), m(&[0.0, 0.0]));
    }

    #[test]
    fn parallel_sum_is_harmonic() {
        let ps = measure_parallel_sum(&m(&[1.0, 1.0, 0.0]), &m(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(ps, m(&[0.5, 0.0, 0.0]));
    }

    #[test]
    fn size_mismatch() {
        assert!(measure_infimum(&m(&[1.0]), &m(&[1.0, 2.0])).is_err());
        assert!(Measure::new(vec![1.0, -0.5]).is_err());
    }
}
