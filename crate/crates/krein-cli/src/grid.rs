//! `start:stop:count` grids.

use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("grid `{0}`: expected start:stop:count or a single number")]
    Syntax(String),
    #[error("grid `{0}`: count must be at least 1")]
    Empty(String),
    #[error("grid `{0}`: endpoints must differ when count > 1, and coincide when count = 1")]
    NotMonotone(String),
    #[error("grid `{0}`: log spacing needs endpoints of the same sign, both nonzero")]
    LogSign(String),
}

/// Parsed grid specification; values are produced by [`GridSpec::values`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl FromStr for GridSpec {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GridError::Syntax(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
        let spec = match parts.as_slice() {
            [v] => {
                let v = num(v)?;
                GridSpec { start: v, stop: v, count: 1 }
            }
            [a, b, n] => {
                let count: usize = n.trim().parse().map_err(|_| bad())?;
                GridSpec { start: num(a)?, stop: num(b)?, count }
            }
            _ => return Err(bad()),
        };
        if spec.count == 0 {
            return Err(GridError::Empty(s.to_string()));
        }
        if (spec.count == 1) != (spec.start == spec.stop) {
            return Err(GridError::NotMonotone(s.to_string()));
        }
        Ok(spec)
    }
}

impl GridSpec {
    /// Inclusive grid, geometric when `log` is set.
    pub fn values(&self, log: bool) -> Result<Vec<f64>, GridError> {
        let (a, b, n) = (self.start, self.stop, self.count);
        if n == 1 {
            return Ok(vec![a]);
        }
        let step = |k: usize| k as f64 / (n - 1) as f64;
        if log {
            if !(a * b > 0.0) {
                return Err(GridError::LogSign(format!("{a}:{b}:{n}")));
            }
            let ratio = b / a;
            let mut v: Vec<f64> = (0..n).map(|k| a * ratio.powf(step(k))).collect();
            v[0] = a;
            v[n - 1] = b;
            Ok(v)
        } else {
            let mut v: Vec<f64> = (0..n).map(|k| a + (b - a) * step(k)).collect();
            v[n - 1] = b;
            Ok(v)
        }
    }
}
