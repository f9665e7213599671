use num_complex::Complex64;

use crate::error::{Error, Result};

const MAGNITUDE_TOL: f64 = 1e-10;

/// Time series of a decoherence factor together with its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoherenceTrace {
    times: Vec<f64>,
    values: Vec<Complex64>,
    model_id: String,
    params_digest: String,
}

impl DecoherenceTrace {
    pub fn new(
        times: Vec<f64>,
        values: Vec<Complex64>,
        model_id: impl Into<String>,
        params_digest: impl Into<String>,
    ) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), found: values.len() });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("times", "must be strictly increasing"));
        }
        if let Some(v) = values.iter().find(|v| !(v.norm() <= 1.0 + MAGNITUDE_TOL)) {
            return Err(Error::param("values", format!("|F| = {} exceeds 1", v.norm())));
        }
        Ok(Self { times, values, model_id: model_id.into(), params_digest: params_digest.into() })
    }

    /// Samples `f` on the given times.
    pub fn sample(
        times: Vec<f64>,
        model_id: impl Into<String>,
        params_digest: impl Into<String>,
        mut f: impl FnMut(f64) -> Result<Complex64>,
    ) -> Result<Self> {
        let values = times.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
        Self::new(times, values, model_id, params_digest)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn params_digest(&self) -> &str {
        &self.params_digest
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    /// Smallest `|F|` over the trace.
    pub fn min_magnitude(&self) -> Option<f64> {
        self.values.iter().map(|v| v.norm()).min_by(f64::total_cmp)
    }
}

/// `n` equally spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (n - 1) as f64;
            (0..n).map(|i| if i == n - 1 { end } else { start + step * i as f64 }).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_ordering_and_magnitude() {
        let one = Complex64::new(1.0, 0.0);
        assert!(DecoherenceTrace::new(vec![0.0, 1.0], vec![one, one], "m", "d").is_ok());
        assert!(DecoherenceTrace::new(vec![0.0, 0.0], vec![one, one], "m", "d").is_err());
        assert!(DecoherenceTrace::new(vec![0.0], vec![one * 1.001], "m", "d").is_err());
        assert!(DecoherenceTrace::new(vec![0.0], vec![one, one], "m", "d").is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let t = linspace(0.0, 3.0, 4);
        assert_eq!(t, vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(linspace(0.1, 0.7, 7).last(), Some(&0.7));
    }
}
