//! Derived scale parameters for a network of `n` vertices.
//!
//! With `q = c1 / c0`:
//!
//! * `r_0 = n^{-1/2} (ln n)^{c0}`, the contact radius of the community regime;
//! * `R_0 = n^{-1/2} (ln n)^{2 c0}`, the community radius;
//! * `t_r = 12 (ln n)^2 n^q / r^{2(1-q)}`, the time after which cap masses
//!   concentrate, and `t_0 = t_{r_0} = 12 n / (ln n)^{2c0 - 2c1 - 2}`;
//! * `c_2 = c1 ln(xi(1 + xi/2) + 1) / ln((7 + 400/xi)^2 (xi(1 + xi/2) + 1))`.
//!
//! `exponent_window_valid` is the strict double inequality
//! `(c0-c1-1)(1 - 1/(xi+2)) < c1 < 2(c0-c1-1)(1 - 2/(2+xi))`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct DerivedParameters {
    pub n: usize,
    pub xi: f64,
    pub c0: f64,
    pub c1: f64,
    /// Contact radius `t_r` was evaluated at.
    pub r: f64,
    pub r_0: f64,
    pub R_0: f64,
    pub t_r: f64,
    pub t_0: f64,
    pub c_2: f64,
    pub exponent_window_valid: bool,
    pub exponent_window_lower: f64,
    pub exponent_window_upper: f64,
    /// `r_0` exceeded pi and was replaced by pi.
    pub r_0_clamped: bool,
    /// `R_0` exceeded pi and was replaced by pi.
    #[serde(rename = "R_0_clamped")]
    pub R_0_clamped: bool,
    /// `t_r > n`: no checkpoint of an `n`-vertex run lies in the concentrated regime.
    pub t_r_exceeds_n: bool,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// `12 (ln n)^2 n^q / r^{2(1-q)}` with `q = c1/c0`, floored at 1.
pub fn t_r(n: usize, c0: f64, c1: f64, r: f64) -> f64 {
    let ln_n = (n as f64).ln();
    let q = c1 / c0;
    (12.0 * ln_n * ln_n * (n as f64).powf(q) / r.powf(2.0 * (1.0 - q))).max(1.0)
}

/// Evaluates the scale parameters. `r` selects the contact radius for `t_r`
/// and defaults to `r_0`, in which case `t_r == t_0`.
#[allow(non_snake_case)]
pub fn derive_parameters(n: usize, xi: f64, c0: f64, c1: f64, r: Option<f64>) -> Result<DerivedParameters> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("n must be at least 3, got {n}")));
    }
    positive("xi", xi)?;
    positive("c0", c0)?;
    positive("c1", c1)?;
    if let Some(r) = r {
        positive("r", r)?;
        if r > PI {
            return Err(Error::RadiusOutOfRange(r));
        }
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let raw_r0 = ln_n.powf(c0) / nf.sqrt();
    let raw_R0 = ln_n.powf(2.0 * c0) / nf.sqrt();
    let r_0 = raw_r0.min(PI);
    let R_0 = raw_R0.min(PI);
    let r_eval = r.unwrap_or(r_0);
    let t_r = t_r(n, c0, c1, r_eval);
    let t_0 = (12.0 * nf / ln_n.powf(2.0 * c0 - 2.0 * c1 - 2.0)).max(1.0);
    let g = xi * (1.0 + xi / 2.0) + 1.0;
    let c_2 = c1 * g.ln() / ((7.0 + 400.0 / xi).powi(2) * g).ln();
    let gap = c0 - c1 - 1.0;
    let exponent_window_lower = gap * (1.0 - 1.0 / (xi + 2.0));
    let exponent_window_upper = 2.0 * gap * (1.0 - 2.0 / (2.0 + xi));
    Ok(DerivedParameters {
        n,
        xi,
        c0,
        c1,
        r: r_eval,
        r_0,
        R_0,
        t_r,
        t_0,
        c_2,
        exponent_window_valid: exponent_window_lower < c1 && c1 < exponent_window_upper,
        exponent_window_lower,
        exponent_window_upper,
        r_0_clamped: raw_r0 > PI,
        R_0_clamped: raw_R0 > PI,
        t_r_exceeds_n: t_r > nf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inequality_example() {
        let p = derive_parameters(100_000, 2.0, 10.0, 4.0, None).unwrap();
        assert!((p.exponent_window_lower - 3.75).abs() < 1e-12);
        assert!((p.exponent_window_upper - 5.0).abs() < 1e-12);
        assert!(p.exponent_window_valid);
    }

    #[test]
    fn c2_example() {
        let p = derive_parameters(100_000, 2.0, 10.0, 4.0, None).unwrap();
        let expected = 4.0 * 5f64.ln() / (207f64 * 207.0 * 5.0).ln();
        assert!((p.c_2 - expected).abs() < 1e-14);
        assert!((p.c_2 - 0.524).abs() < 5e-4);
    }

    #[test]
    fn radii_example() {
        let p = derive_parameters(100_000, 1.0, 1.0, 0.5, None).unwrap();
        let ln = 100_000f64.ln();
        assert!((p.r_0 - ln / 100_000f64.sqrt()).abs() < 1e-15);
        assert!((p.r_0 - 0.0364).abs() < 1e-4);
        assert!((p.R_0 - 0.419).abs() < 1e-3);
        assert!(!p.r_0_clamped && !p.R_0_clamped);
    }

    #[test]
    fn t0_is_tr_at_r0() {
        // only holds while r_0 is unclamped
        for (n, c0, c1) in [(100_000, 1.0, 0.5), (10_000, 1.5, 1.0), (1_000, 1.2, 0.7)] {
            let p = derive_parameters(n, 1.0, c0, c1, None).unwrap();
            assert!((p.t_r - p.t_0).abs() <= 1e-9 * p.t_0, "{p:?}");
            let q = derive_parameters(n, 1.0, c0, c1, Some(p.r_0)).unwrap();
            assert_eq!(p, q);
        }
    }

    #[test]
    fn both_arms_are_strict() {
        // xi = 2, c0 = 10: lower arm 0.75 (9 - c1), upper arm 9 - c1
        let xi = 2.0;
        let lower_edge = 0.75 * 9.0 / 1.75;
        let upper_edge = 9.0 / 2.0;
        let at = |c1: f64| derive_parameters(1000, xi, 10.0, c1, None).unwrap();
        let eps = 1e-9;
        assert!(!at(lower_edge - eps).exponent_window_valid);
        assert!(at(lower_edge + eps).exponent_window_valid);
        assert!(at(upper_edge - eps).exponent_window_valid);
        assert!(!at(upper_edge + eps).exponent_window_valid);
        let p = at(lower_edge + eps);
        assert!(p.exponent_window_lower < p.c1);
        let p = at(upper_edge + eps);
        assert!(p.exponent_window_lower < p.c1 && p.c1 > p.exponent_window_upper);
    }

    #[test]
    fn clamps_with_flag() {
        let p = derive_parameters(1000, 1.0, 3.0, 1.0, None).unwrap();
        assert!(p.r_0_clamped && p.R_0_clamped);
        assert_eq!(p.R_0, PI);
        assert!(p.r_0 <= PI);
    }

    #[test]
    fn tr_exceeds_n_is_flagged() {
        let p = derive_parameters(100_000, 1.0, 1.0, 0.5, Some(0.1)).unwrap();
        assert!(p.t_r_exceeds_n);
        assert!(p.t_r >= 1.0 && p.c_2 > 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(derive_parameters(2, 1.0, 1.0, 1.0, None).is_err());
        assert!(derive_parameters(10, 0.0, 1.0, 1.0, None).is_err());
        assert!(derive_parameters(10, 1.0, -1.0, 1.0, None).is_err());
        assert!(derive_parameters(10, 1.0, 1.0, 0.0, None).is_err());
        assert!(derive_parameters(10, 1.0, 1.0, f64::NAN, None).is_err());
        assert!(derive_parameters(10, 1.0, 1.0, 1.0, Some(4.0)).is_err());
    }

    #[test]
    fn serializes_upper_case_radius() {
        let p = derive_parameters(100_000, 1.0, 1.0, 0.5, None).unwrap();
        let v: serde_json::Value = serde_json::to_value(p).unwrap();
        assert!(v.get("R_0").is_some() && v.get("r_0").is_some());
        let back: DerivedParameters = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }
}
