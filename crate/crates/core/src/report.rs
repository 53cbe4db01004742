//! Machine-readable records of individual checks.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One comparison of two computed quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub params: BTreeMap<String, Value>,
    /// `[re, im]`.
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
    /// Zero unless timings were requested, so that reports are reproducible.
    pub wall_time_ms: u64,
    /// The identity or construction the check instantiates.
    pub paper_ref: String,
}

impl CheckReport {
    /// Compares `lhs` with `rhs` at relative tolerance `tol`. The relative
    /// error is taken against `|rhs|`, or is the absolute error when `rhs`
    /// vanishes.
    pub fn compare(name: &str, lhs: Complex64, rhs: Complex64, tol: f64, anchor: &str) -> Self {
        let abs_err = (lhs - rhs).norm();
        let scale = rhs.norm();
        let rel_err = if scale > 0.0 { abs_err / scale } else { abs_err };
        CheckReport {
            check_name: name.to_string(),
            params: BTreeMap::new(),
            lhs: [lhs.re, lhs.im],
            rhs: [rhs.re, rhs.im],
            abs_err,
            rel_err,
            tol,
            pass: rel_err <= tol,
            wall_time_ms: 0,
            paper_ref: anchor.to_string(),
        }
    }

    /// A check measured by a single error figure, with `lhs` the measured
    /// error and `rhs` zero.
    pub fn bound(name: &str, err: f64, tol: f64, anchor: &str) -> Self {
        CheckReport {
            check_name: name.to_string(),
            params: BTreeMap::new(),
            lhs: [err, 0.0],
            rhs: [0.0, 0.0],
            abs_err: err,
            rel_err: err,
            tol,
            pass: err <= tol,
            wall_time_ms: 0,
            paper_ref: anchor.to_string(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_time(mut self, ms: u64) -> Self {
        self.wall_time_ms = ms;
        self
    }

    pub fn lhs_complex(&self) -> Complex64 {
        Complex64::new(self.lhs[0], self.lhs[1])
    }

    pub fn rhs_complex(&self) -> Complex64 {
        Complex64::new(self.rhs[0], self.rhs[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison_fields() {
        let r = CheckReport::compare("x", Complex64::new(1.0, 0.0), Complex64::new(1.0 + 1e-9, 0.0), 1e-8, "a")
            .with_param("n", 3);
        assert!(r.pass);
        assert!(r.rel_err < 1.1e-9);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"paper_ref\":\"a\""));
        let back: CheckReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert!(!CheckReport::bound("y", 2e-3, 1e-3, "b").pass);
    }
}
