//! Least-squares fits of a static potential and string-breaking detection.

use serde::{Deserialize, Serialize};

/// `V(r) ≈ intercept + slope · r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub rms_residual: f64,
}

/// `V(r) ≈ intercept + coefficient / r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoulombFit {
    pub intercept: f64,
    pub coefficient: f64,
    pub rms_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    /// First separation of the flat region.
    pub onset: f64,
    /// Mean potential from the onset on.
    pub height: f64,
    /// Per-unit increment below which `V` counts as flat.
    pub threshold: f64,
}

/// Ordinary least squares `y ≈ a + b x`; `None` for fewer than two distinct `x`.
fn least_squares(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss: f64 = x.iter().zip(y).map(|(&u, &v)| (v - a - b * u).powi(2)).sum();
    Some((a, b, (ss / n as f64).sqrt()))
}

pub fn fit_linear(r: &[f64], v: &[f64]) -> Option<LinearFit> {
    least_squares(r, v).map(|(intercept, slope, rms_residual)| LinearFit {
        intercept,
        slope,
        rms_residual,
    })
}

pub fn fit_coulomb(r: &[f64], v: &[f64]) -> Option<CoulombFit> {
    if r.iter().any(|&x| x <= 0.0) {
        return None;
    }
    let inv: Vec<f64> = r.iter().map(|&x| 1.0 / x).collect();
    least_squares(&inv, v).map(|(intercept, coefficient, rms_residual)| CoulombFit {
        intercept,
        coefficient,
        rms_residual,
    })
}

/// First point after which two consecutive per-unit increments
/// `(V_{k+1} − V_k) / (r_{k+1} − r_k)` stay below `fraction · g²/2`.
/// Points must be sorted by `r`.
pub fn detect_plateau(r: &[f64], v: &[f64], fraction: f64, g2: f64) -> Option<Plateau> {
    let threshold = fraction * g2 / 2.0;
    let slopes: Vec<f64> = r
        .windows(2)
        .zip(v.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect();
    let k = slopes.windows(2).position(|s| s[0] < threshold && s[1] < threshold)?;
    let tail = &v[k..];
    Some(Plateau {
        onset: r[k],
        height: tail.iter().sum::<f64>() / tail.len() as f64,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_lines_recovered() {
        let r = [1.0, 2.0, 3.0, 4.0];
        let lin: Vec<f64> = r.iter().map(|x| 2.0 + 3.0 * x).collect();
        let f = fit_linear(&r, &lin).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12 && f.rms_residual < 1e-12);
        let cou: Vec<f64> = r.iter().map(|x| 1.0 - 0.5 / x).collect();
        let c = fit_coulomb(&r, &cou).unwrap();
        assert!((c.coefficient + 0.5).abs() < 1e-12 && c.rms_residual < 1e-12);
        assert!(fit_linear(&r, &cou).unwrap().rms_residual > 1e-3);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_linear(&[1.0], &[2.0]).is_none());
        assert!(fit_linear(&[1.0, 1.0], &[2.0, 3.0]).is_none());
        assert!(fit_coulomb(&[0.0, 1.0], &[2.0, 3.0]).is_none());
    }

    #[test]
    fn plateau_after_string() {
        let r = [1.0, 3.0, 5.0, 7.0];
        let v = [26.0, 52.0, 52.0, 52.1];
        let p = detect_plateau(&r, &v, 0.05, 50.0).unwrap();
        assert_eq!(p.onset, 3.0);
        assert!((p.height - 52.0333).abs() < 1e-3);
        // One flat increment is not enough.
        assert!(detect_plateau(&r[..3], &v[..3], 0.05, 50.0).is_none());
        assert!(detect_plateau(&r, &[1.0, 51.0, 101.0, 151.0], 0.05, 50.0).is_none());
    }

    proptest! {
        #[test]
        fn residual_invariant_under_offset(
            v in proptest::collection::vec(-10.0f64..10.0, 4),
            shift in -100.0f64..100.0,
        ) {
            let r = [1.0, 3.0, 5.0, 7.0];
            let a = fit_linear(&r, &v).unwrap();
            let w: Vec<f64> = v.iter().map(|x| x + shift).collect();
            let b = fit_linear(&r, &w).unwrap();
            prop_assert!((a.rms_residual - b.rms_residual).abs() < 1e-9);
            prop_assert!((a.slope - b.slope).abs() < 1e-9);
        }
    }
}
