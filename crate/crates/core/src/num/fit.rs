//! Least-squares fitting: polynomial models, log-log decay slopes and
//! Richardson extrapolation in a small parameter.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Least-squares fit of `y ~ sum_k c_k x^k`, degree `deg`. Returns the
/// coefficients `c_0..c_deg`.
pub fn polyfit(x: &[f64], y: &[f64], deg: usize) -> Result<Vec<f64>> {
    if x.len() != y.len() || x.len() < deg + 1 {
        return Err(Error::InsufficientSamples { need: deg + 1, got: x.len() });
    }
    let n = x.len();
    let mut a = DMatrix::zeros(n, deg + 1);
    for i in 0..n {
        let mut p = 1.0;
        for k in 0..=deg {
            a[(i, k)] = p;
            p *= x[i];
        }
    }
    let b = DVector::from_column_slice(y);
    let ata = a.transpose() * &a;
    let atb = a.transpose() * b;
    let sol = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| Error::ExtrapolationDiverged("singular normal equations".into()))?;
    Ok(sol.iter().copied().collect())
}

/// Straight-line fit `y ~ a + b x` with the standard error of the slope.
#[derive(Clone, Debug)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    /// Standard error of the slope estimate.
    pub slope_stderr: f64,
    /// Root-mean-square residual.
    pub rms_residual: f64,
}

pub fn line_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::InsufficientSamples { need: 2, got: n });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(u, v)| {
            let r = v - (intercept + slope * u);
            r * r
        })
        .sum();
    let dof = (n as f64 - 2.0).max(1.0);
    let slope_stderr = (ss_res / dof / sxx).sqrt();
    Ok(LineFit { intercept, slope, slope_stderr, rms_residual: (ss_res / nf).sqrt() })
}

/// Result of a log-log decay fit `|v| ~ C * s^slope`.
pub struct DecayFit {
    pub slope: f64,
    pub slope_stderr: f64,
    pub log_c: f64,
    /// True when all samples were below the zero floor, in which case no
    /// slope was fitted (the quantity vanishes identically to precision).
    pub exact_zero: bool,
}

/// Fit the decay exponent of `values` against `scales` on a log-log grid.
/// Samples below `zero_floor` are dropped; if everything is below the
/// floor the fit is flagged as exactly zero.
pub fn decay_fit(scales: &[f64], values: &[f64], zero_floor: f64) -> Result<DecayFit> {
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (&s, &v) in scales.iter().zip(values) {
        if v.abs() > zero_floor {
            lx.push(s.ln());
            ly.push(v.abs().ln());
        }
    }
    if lx.is_empty() {
        return Ok(DecayFit { slope: f64::INFINITY, slope_stderr: 0.0, log_c: 0.0, exact_zero: true });
    }
    if lx.len() < 3 {
        return Err(Error::InsufficientSamples { need: 3, got: lx.len() });
    }
    let f = line_fit(&lx, &ly)?;
    Ok(DecayFit { slope: f.slope, slope_stderr: f.slope_stderr, log_c: f.intercept, exact_zero: false })
}

/// Richardson extrapolation to 0 of samples `(eps_j, v_j)` assuming a smooth
/// error expansion `v(eps) = v0 + c1 eps + c2 eps^2 + ...` of the given degree.
pub struct Richardson {
    pub value: f64,
    /// Magnitude of the last correction, a crude error estimate.
    pub err_estimate: f64,
    pub coefficients: Vec<f64>,
}

pub fn richardson(eps: &[f64], v: &[f64], degree: usize) -> Result<Richardson> {
    let c = polyfit(eps, v, degree)?;
    // residual of the fit as error proxy
    let mut max_res: f64 = 0.0;
    for (&e, &val) in eps.iter().zip(v) {
        let mut p = 0.0;
        let mut xp = 1.0;
        for &ck in &c {
            p += ck * xp;
            xp *= e;
        }
        max_res = max_res.max((val - p).abs());
    }
    Ok(Richardson { value: c[0], err_estimate: max_res, coefficients: c })
}

/// Dyadic epsilon ladder `eps0 * 2^-j`, `j = 0..count`.
pub fn dyadic(eps0: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| eps0 * 0.5_f64.powi(j as i32)).collect()
}
