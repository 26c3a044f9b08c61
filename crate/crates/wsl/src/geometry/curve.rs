//! Sampled curve data (curvature, torsion) and twist-angle functions.

use crate::interp::CubicSpline;
use crate::{Error, Result};

/// A space curve given by arc-length samples of its curvature and torsion.
///
/// The curve itself is reconstructed from `(kappa, tau)` by frame
/// integration; see [`crate::geometry::integrate_frame`]. Samples are
/// interpolated by the crate-wide fixed cubic rule.
#[derive(Debug, Clone)]
pub struct CurveData {
    s_grid: Vec<f64>,
    kappa: CubicSpline,
    tau: CubicSpline,
}

impl CurveData {
    pub fn from_samples(s_grid: Vec<f64>, kappa: Vec<f64>, tau: Vec<f64>) -> Result<Self> {
        if kappa.len() != s_grid.len() || tau.len() != s_grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "curve samples: s {} kappa {} tau {}",
                s_grid.len(),
                kappa.len(),
                tau.len()
            )));
        }
        if let Some(k) = kappa.iter().find(|k| **k < -1e-12) {
            return Err(Error::NonPositiveCurvature(format!(
                "negative curvature sample {k}"
            )));
        }
        let kappa = CubicSpline::new(&s_grid, &kappa)?;
        let tau = CubicSpline::new(&s_grid, &tau)?;
        Ok(Self { s_grid, kappa, tau })
    }

    /// Straight line on `[s0, s1]`.
    pub fn line(s0: f64, s1: f64, n: usize) -> Self {
        let s = uniform(s0, s1, n);
        let z = vec![0.0; n];
        Self::from_samples(s, z.clone(), z).expect("line preset")
    }

    /// Planar circle of radius `1/kappa0`.
    pub fn circle(kappa0: f64, s0: f64, s1: f64, n: usize) -> Self {
        let s = uniform(s0, s1, n);
        let k = vec![kappa0; n];
        let z = vec![0.0; n];
        Self::from_samples(s, k, z).expect("circle preset")
    }

    /// Curve of constant curvature and torsion (a circular helix).
    pub fn helix(kappa0: f64, tau0: f64, s0: f64, s1: f64, n: usize) -> Self {
        let s = uniform(s0, s1, n);
        let k = vec![kappa0; n];
        let t = vec![tau0; n];
        Self::from_samples(s, k, t).expect("helix preset")
    }

    /// Compactly supported curvature bump
    /// `kappa(s) = kappa0 * exp(-1 / (1 - (s/width)^2))` on `|s| < width`,
    /// zero elsewhere, torsion zero. Smooth, planar, straight outside the
    /// bump.
    pub fn bump(kappa0: f64, width: f64, s0: f64, s1: f64, n: usize) -> Self {
        let s = uniform(s0, s1, n);
        let k: Vec<f64> = s.iter().map(|&x| bump_profile(x, width) * kappa0).collect();
        let z = vec![0.0; n];
        Self::from_samples(s, k, z).expect("bump preset")
    }

    /// Slowly decaying curvature `kappa(s) = eps0 / (1 + s^2)`, torsion zero.
    pub fn lorentzian(eps0: f64, s0: f64, s1: f64, n: usize) -> Self {
        let s = uniform(s0, s1, n);
        let k: Vec<f64> = s.iter().map(|&x| eps0 / (1.0 + x * x)).collect();
        let z = vec![0.0; n];
        Self::from_samples(s, k, z).expect("lorentzian preset")
    }

    pub fn s_grid(&self) -> &[f64] {
        &self.s_grid
    }

    pub fn s_min(&self) -> f64 {
        self.s_grid[0]
    }

    pub fn s_max(&self) -> f64 {
        *self.s_grid.last().expect("nonempty grid")
    }

    pub fn kappa(&self, s: f64) -> f64 {
        self.kappa.eval(s)
    }

    pub fn kappa_deriv(&self, s: f64) -> f64 {
        self.kappa.deriv(s)
    }

    pub fn tau(&self, s: f64) -> f64 {
        self.tau.eval(s)
    }

    pub fn tau_deriv(&self, s: f64) -> f64 {
        self.tau.deriv(s)
    }

    pub fn tau_spline(&self) -> &CubicSpline {
        &self.tau
    }

    pub fn kappa_sup(&self) -> f64 {
        self.kappa.sup_norm_estimate()
    }

    /// Sup of the frame rotation rates, used to pick integration step sizes.
    pub fn rate_sup(&self) -> f64 {
        self.kappa.sup_norm_estimate() + self.tau.sup_norm_estimate()
    }
}

/// Twist angle `theta` and its derivative, sampled on the curve grid.
///
/// Value and derivative are interpolated through separate splines so that
/// presets can make `tau - theta_dot` vanish identically: the Tang frame
/// stores the torsion samples as its `theta_dot`, and both quantities are
/// then evaluated through the same interpolant.
#[derive(Debug, Clone)]
pub struct AngleFunction {
    theta: CubicSpline,
    theta_dot: CubicSpline,
}

impl AngleFunction {
    /// Builds from explicit samples and validates consistency: over every
    /// grid interval the increment of `theta` must match the exact integral
    /// of the `theta_dot` interpolant to relative tolerance `1e-6`.
    pub fn from_samples(s_grid: &[f64], theta: Vec<f64>, theta_dot: Vec<f64>) -> Result<Self> {
        if theta.len() != s_grid.len() || theta_dot.len() != s_grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "angle samples: s {} theta {} theta_dot {}",
                s_grid.len(),
                theta.len(),
                theta_dot.len()
            )));
        }
        let theta_sp = CubicSpline::new(s_grid, &theta)?;
        let dot_sp = CubicSpline::new(s_grid, &theta_dot)?;
        let span = s_grid.last().unwrap() - s_grid[0];
        let scale = 1.0
            + theta.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            + dot_sp.sup_norm_estimate() * span.max(1.0);
        for k in 0..s_grid.len() - 1 {
            let inc = theta[k + 1] - theta[k];
            let quad = dot_sp.integral_from_start(s_grid[k + 1])
                - dot_sp.integral_from_start(s_grid[k]);
            if (inc - quad).abs() > 1e-6 * scale {
                return Err(Error::InvalidInput(format!(
                    "theta_dot inconsistent with theta on [{}, {}]: increment {} vs integral {}",
                    s_grid[k],
                    s_grid[k + 1],
                    inc,
                    quad
                )));
            }
        }
        Ok(Self {
            theta: theta_sp,
            theta_dot: dot_sp,
        })
    }

    /// Constant angle (no twist relative to the Frenet frame).
    pub fn constant(s_grid: &[f64], theta0: f64) -> Self {
        let n = s_grid.len();
        Self::from_samples(s_grid, vec![theta0; n], vec![0.0; n]).expect("constant angle")
    }

    /// Twist-rate bump: `theta_dot(s) = rate0 * exp(-1/(1-(s/width)^2))` on
    /// `|s| < width`, with `theta` obtained by exact quadrature.
    pub fn twist_bump(s_grid: &[f64], rate0: f64, width: f64, theta0: f64) -> Result<Self> {
        let dot: Vec<f64> = s_grid
            .iter()
            .map(|&s| rate0 * bump_profile(s, width))
            .collect();
        Self::from_rate_samples(s_grid, &dot, theta0)
    }

    /// Constant twist rate `theta_dot = rate0`.
    pub fn constant_rate(s_grid: &[f64], rate0: f64, theta0: f64) -> Self {
        let dot = vec![rate0; s_grid.len()];
        Self::from_rate_samples(s_grid, &dot, theta0).expect("constant rate")
    }

    /// Builds the angle from rate samples by exact integration of the rate
    /// interpolant; the consistency invariant then holds by construction.
    pub fn from_rate_samples(s_grid: &[f64], theta_dot: &[f64], theta0: f64) -> Result<Self> {
        let dot_sp = CubicSpline::new(s_grid, theta_dot)?;
        let theta: Vec<f64> = s_grid
            .iter()
            .map(|&s| theta0 + dot_sp.integral_from_start(s))
            .collect();
        Ok(Self {
            theta: CubicSpline::new(s_grid, &theta)?,
            theta_dot: dot_sp,
        })
    }

    pub fn theta(&self, s: f64) -> f64 {
        self.theta.eval(s)
    }

    pub fn theta_dot(&self, s: f64) -> f64 {
        self.theta_dot.eval(s)
    }

    pub fn theta_ddot(&self, s: f64) -> f64 {
        self.theta_dot.deriv(s)
    }

    pub fn rate_sup(&self) -> f64 {
        self.theta_dot.sup_norm_estimate()
    }

    /// Pointwise `theta` samples at the grid knots.
    pub fn theta_samples(&self) -> &[f64] {
        self.theta.values()
    }

    pub fn theta_dot_samples(&self) -> &[f64] {
        self.theta_dot.values()
    }
}

/// The Tang frame angle: `theta_dot = tau` pointwise, so the moving frame
/// rotates with the torsion and the transverse coordinates are orthogonal.
/// `theta` is the exact quadrature of the torsion interpolant and the rate
/// spline *is* the torsion spline, hence `tau - theta_dot` vanishes to
/// round-off at every evaluation point.
pub fn tang_frame_angle(curve: &CurveData, theta0: f64) -> AngleFunction {
    let s_grid = curve.s_grid();
    let tau_sp = curve.tau_spline();
    let theta: Vec<f64> = s_grid
        .iter()
        .map(|&s| theta0 + tau_sp.integral_from_start(s))
        .collect();
    AngleFunction {
        theta: CubicSpline::new(s_grid, &theta).expect("tang theta spline"),
        theta_dot: tau_sp.clone(),
    }
}

pub(crate) fn bump_profile(x: f64, width: f64) -> f64 {
    let u = x / width;
    if u.abs() < 1.0 {
        (-1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

pub(crate) fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least two grid points");
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}
