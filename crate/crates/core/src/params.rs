//! Parameter windows and the descent `u -> ((m-1)u - 1)/(m-2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the exact algebraic identities of the descent map.
pub const DESCENT_TOL: f64 = 1e-14;

/// A complementary series parameter triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CSParams {
    pub n: usize,
    pub i: usize,
    pub u: f64,
}

impl CSParams {
    pub fn new(n: usize, i: usize, u: f64) -> Self {
        CSParams { n, i, u }
    }

    /// Dimension of the Bruhat cell, `n - 1`.
    pub fn d(&self) -> usize {
        self.n - 1
    }

    /// `lambda = (n-1)(1-u)`, the exponent of the intertwining kernel.
    pub fn lambda(&self) -> f64 {
        (self.n as f64 - 1.0) * (1.0 - self.u)
    }

    /// Exponent `(n-1)u` of the Fourier-side weight.
    pub fn weight_exponent(&self) -> f64 {
        (self.n as f64 - 1.0) * self.u
    }

    /// Checks the embedding window `1/(n-1) < u < 1 - 2i/(n-1)`.
    pub fn validate(&self) -> Result<()> {
        let v = validate(self.n, self.i, self.u);
        if v.ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(v.reason))
        }
    }

    /// Checks the weaker form window `0 < u < 1 - 2i/(n-1)`. Unlike the
    /// embedding window this admits `n = 2`, the target group of the first descent.
    pub fn validate_form(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParams(format!("n = {} must be at least 2", self.n)));
        }
        if self.i + 1 > self.n / 2 {
            return Err(Error::InvalidParams(format!(
                "degree {} exceeds [n/2] - 1 = {}",
                self.i,
                (self.n / 2) as i64 - 1
            )));
        }
        let hi = upper_limit(self.n, self.i);
        if !(self.u > 0.0 && self.u < hi) {
            return Err(Error::InvalidParams(format!("u = {} outside (0, {hi})", self.u)));
        }
        Ok(())
    }
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validity {
    pub ok: bool,
    pub reason: String,
}

fn upper_limit(n: usize, i: usize) -> f64 {
    1.0 - 2.0 * i as f64 / (n as f64 - 1.0)
}

/// Whether `(n, i, u)` lies in the embedding window.
pub fn validate(n: usize, i: usize, u: f64) -> Validity {
    let fail = |reason: String| Validity { ok: false, reason };
    if n < 3 {
        return fail(format!("n = {n} must be at least 3"));
    }
    if i + 1 > n / 2 {
        return fail(format!("degree {i} exceeds [n/2] - 1 = {}", (n / 2) as i64 - 1));
    }
    let lo = 1.0 / (n as f64 - 1.0);
    let hi = upper_limit(n, i);
    if !(u > lo) {
        return fail(format!("u = {u} is not above the lower limit 1/(n-1) = {lo}"));
    }
    if !(u < hi) {
        return fail(format!("u = {u} is not below the cohomological limit 1 - 2i/(n-1) = {hi}"));
    }
    Validity {
        ok: true,
        reason: format!("{lo} < u < {hi}"),
    }
}

/// `1 - 2i/(n-1)`.
pub fn cohomological_limit(n: usize, i: usize) -> Result<f64> {
    if n < 3 || i + 1 > n / 2 {
        return Err(Error::DegreeOutOfRange { degree: i, dim: n });
    }
    Ok(upper_limit(n, i))
}

/// `((m-1)u - 1)/(m-2)`.
pub fn descend_u(m: usize, u: f64) -> f64 {
    ((m as f64 - 1.0) * u - 1.0) / (m as f64 - 2.0)
}

/// How a chain entry relates to the windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepStatus {
    /// Inside the embedding window.
    Valid,
    /// `i = [m/2]`.
    Tempered,
    /// The window is empty or `u` left it.
    WindowCollapsed,
    /// `m - 2 = 0`; the descent map is undefined.
    Bottom,
    /// On the upper limit itself.
    Boundary,
}

impl StepStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepStatus::Valid => "valid",
            StepStatus::Tempered => "tempered",
            StepStatus::WindowCollapsed => "window-collapsed",
            StepStatus::Bottom => "bottom",
            StepStatus::Boundary => "boundary",
        }
    }
}

/// One entry `(m, u_m)` of a descent chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescentStep {
    pub m: usize,
    pub i: usize,
    pub u_m: f64,
    pub tempered: bool,
}

impl DescentStep {
    pub fn new(m: usize, i: usize, u_m: f64) -> Self {
        DescentStep {
            m,
            i,
            u_m,
            tempered: i == m / 2,
        }
    }

    pub fn status(&self) -> StepStatus {
        if self.tempered {
            StepStatus::Tempered
        } else if validate(self.m, self.i, self.u_m).ok {
            StepStatus::Valid
        } else {
            StepStatus::WindowCollapsed
        }
    }

    /// `(m-1)(1-u_m)`, constant along a chain.
    pub fn lambda(&self) -> f64 {
        (self.m as f64 - 1.0) * (1.0 - self.u_m)
    }
}

/// One descent step `m -> m - 1`.
pub fn descend(step: &DescentStep) -> Result<DescentStep> {
    if step.tempered || step.m <= 2 {
        return Err(Error::ChainBottom { m: step.m, i: step.i });
    }
    let m = step.m - 1;
    if step.i > m / 2 {
        return Err(Error::ChainBottom { m, i: step.i });
    }
    Ok(DescentStep::new(m, step.i, descend_u(step.m, step.u_m)))
}

/// Iterates [`descend`] from `(n, i, u)` while the current entry is valid.
///
/// The last entry carries the reason the chain stopped: tempered, window
/// collapsed, or bottom. A start outside the window yields a one-entry chain.
pub fn chain(n: usize, i: usize, u: f64) -> Vec<(DescentStep, StepStatus)> {
    let mut out = Vec::new();
    let mut step = DescentStep::new(n, i, u);
    loop {
        let status = step.status();
        if status != StepStatus::Valid {
            out.push((step, status));
            return out;
        }
        match descend(&step) {
            Ok(next) => {
                out.push((step, status));
                step = next;
            }
            Err(_) => {
                out.push((step, StepStatus::Bottom));
                return out;
            }
        }
    }
}

/// The chain of upper limits `1 - 2i/(m-1)` from `m = n` down to the tempered
/// degree `i = [m/2]`.
pub fn boundary_chain(n: usize, i: usize) -> Result<Vec<(DescentStep, StepStatus)>> {
    let mut step = DescentStep::new(n, i, cohomological_limit(n, i)?);
    let mut out = Vec::new();
    loop {
        if step.tempered {
            out.push((step, StepStatus::Tempered));
            return Ok(out);
        }
        match descend(&step) {
            Ok(next) => {
                out.push((step, StepStatus::Boundary));
                step = next;
            }
            Err(_) => {
                out.push((step, StepStatus::Bottom));
                return Ok(out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validate_examples() {
        assert!(validate(5, 1, 0.4).ok);
        let v = validate(5, 1, 0.5);
        assert!(!v.ok && v.reason.contains("cohomological"));
        for u in [0.1, 0.3, 0.9] {
            let v = validate(4, 2, u);
            assert!(!v.ok && v.reason.contains("degree"));
        }
        assert!(!validate(4, 1, 0.3).ok, "window (1/3, 1/3) is empty");
        assert!(!validate(6, 2, 0.19).ok);
    }

    #[test]
    fn limits() {
        assert_eq!(cohomological_limit(5, 1).unwrap(), 0.5);
        assert_eq!(cohomological_limit(7, 0).unwrap(), 1.0);
        for i in 1..4 {
            let n = 2 * i + 2;
            let expected = 1.0 - 2.0 * i as f64 / (2.0 * i as f64 + 1.0);
            assert!((cohomological_limit(n, i).unwrap() - expected).abs() < 1e-15);
        }
        assert!(cohomological_limit(4, 2).is_err());
    }

    #[test]
    fn descend_examples() {
        let s = descend(&DescentStep::new(4, 0, 0.5)).unwrap();
        assert_eq!((s.m, s.u_m), (3, 0.25));
        assert!(matches!(descend(&DescentStep::new(2, 0, 0.9)), Err(Error::ChainBottom { .. })));
    }

    #[test]
    fn boundary_compatibility() {
        for m in 4..12usize {
            for i in 0..(m / 2) {
                let u = 1.0 - 2.0 * i as f64 / (m as f64 - 1.0);
                let next = descend_u(m, u);
                let expected = 1.0 - 2.0 * i as f64 / (m as f64 - 2.0);
                assert!((next - expected).abs() <= DESCENT_TOL, "m={m} i={i}");
            }
        }
    }

    #[test]
    fn chain_for_empty_window_and_its_boundary() {
        let c = chain(6, 2, 0.19);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].1, StepStatus::WindowCollapsed);
        let b = boundary_chain(6, 2).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!((b[0].0.m, b[0].1), (6, StepStatus::Boundary));
        assert_eq!((b[1].0.m, b[1].1), (5, StepStatus::Tempered));
        assert!(b[1].0.u_m.abs() < DESCENT_TOL);
    }

    #[test]
    fn degree_zero_chains_end_by_collapse() {
        let c = chain(6, 0, 0.95);
        let last = c.last().unwrap();
        assert!(matches!(last.1, StepStatus::WindowCollapsed | StepStatus::Bottom));
        assert!(c.iter().all(|(s, _)| !s.tempered));
        assert!(c[..c.len() - 1].iter().all(|(_, st)| *st == StepStatus::Valid));
    }

    #[test]
    fn interior_chains_collapse_where_the_window_closes() {
        // at m = 2i + 2 both window ends equal 1/(2i + 1)
        for i in 1..4usize {
            let m = 2 * i + 2;
            assert!((1.0 / (m as f64 - 1.0) - upper_limit(m, i)).abs() < 1e-15);
        }
        let c = chain(7, 1, 0.6);
        assert_eq!(c.last().unwrap().1, StepStatus::WindowCollapsed);
        assert_eq!(c.last().unwrap().0.m, 4);
    }

    #[test]
    fn boundary_chains_reach_tempered() {
        for n in 3..12usize {
            for i in 0..(n / 2) {
                let b = boundary_chain(n, i).unwrap();
                let (last, status) = b.last().unwrap();
                if i == 0 {
                    assert_eq!(*status, StepStatus::Bottom);
                } else {
                    assert_eq!(*status, StepStatus::Tempered);
                    assert_eq!(last.m, 2 * i + 1);
                    assert!(last.u_m.abs() < DESCENT_TOL);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn lambda_is_preserved(m in 4usize..20, u in 0.0f64..1.0) {
            let s = DescentStep::new(m, 0, u);
            let t = descend(&s).unwrap();
            prop_assert!((s.lambda() - t.lambda()).abs() <= DESCENT_TOL * 20.0);
            prop_assert!(t.u_m < s.u_m);
        }

        #[test]
        fn two_steps_match_the_double_map(n in 5usize..20, u in 0.0f64..1.0) {
            let u2 = descend_u(n - 1, descend_u(n, u));
            let direct = ((n as f64 - 1.0) * u - 2.0) / (n as f64 - 3.0);
            prop_assert!((u2 - direct).abs() <= 1e-13);
        }

        #[test]
        fn chain_entries_revalidate(n in 3usize..12, i in 0usize..4, u in 0.0f64..1.0) {
            for (k, (step, status)) in chain(n, i, u).iter().enumerate() {
                match status {
                    StepStatus::Valid => prop_assert!(validate(step.m, step.i, step.u_m).ok),
                    StepStatus::Tempered => prop_assert_eq!(step.i, step.m / 2),
                    _ => prop_assert!(!validate(step.m, step.i, step.u_m).ok || step.m <= 2),
                }
                prop_assert_eq!(step.m, n - k);
            }
        }
    }
}
