//! Curves, moving frames, the tube embedding and its metric.
//!
//! A tube is the image of `(-L, L) x omega` under
//! `L(s, t) = gamma(s) + t2 e2(s) + t3 e3(s)`, where `{e1, e2, e3}` is the
//! twist-rotated Frenet frame of the reference curve. Working in the
//! straightened coordinates `(s, t)`, the geometry enters the spectral
//! problem only through the metric coefficients
//!
//! ```text
//! h  = 1 - (t2 cos + t3 sin)(theta) kappa,   h2 = -t3 (tau - theta_dot),
//! h3 = t2 (tau - theta_dot),                 det G = h^2.
//! ```
//!
//! Everything here is immutable after construction and safe to share across
//! threads.

mod curve;
mod frame;

pub use curve::{tang_frame_angle, AngleFunction, CurveData};
pub use frame::{frame_roundtrip_defect, integrate_frame, integrate_frame_on, FrameField};

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::shape::CrossSectionShape;
use crate::{Error, Result};

/// Metric data of the straightened tube at one parameter point.
#[derive(Debug, Clone, Copy)]
pub struct MetricCoefficients {
    pub h: f64,
    pub h2: f64,
    pub h3: f64,
}

impl MetricCoefficients {
    /// Full metric tensor `G` in the `(s, t2, t3)` coordinates.
    pub fn g(&self) -> Matrix3<f64> {
        let (h, h2, h3) = (self.h, self.h2, self.h3);
        Matrix3::new(
            h * h + h2 * h2 + h3 * h3,
            h2,
            h3,
            h2,
            1.0,
            0.0,
            h3,
            0.0,
            1.0,
        )
    }

    /// Closed-form inverse of `G`.
    pub fn g_inv(&self) -> Matrix3<f64> {
        let (h, h2, h3) = (self.h, self.h2, self.h3);
        let ih2 = 1.0 / (h * h);
        Matrix3::new(
            ih2,
            -h2 * ih2,
            -h3 * ih2,
            -h2 * ih2,
            (h * h + h2 * h2) * ih2,
            h2 * h3 * ih2,
            -h3 * ih2,
            h3 * h2 * ih2,
            (h * h + h3 * h3) * ih2,
        )
    }

    pub fn det_g(&self) -> f64 {
        self.h * self.h
    }
}

/// Complete description of a tube: reference curve, twist angle,
/// cross-section shape and the truncation half-length.
///
/// This is plain data; building a [`Tube`] validates the standing
/// hypotheses and integrates the moving frame.
#[derive(Debug, Clone)]
pub struct TubeSpec {
    pub curve: CurveData,
    pub angle: AngleFunction,
    pub shape: CrossSectionShape,
    pub half_length: f64,
}

/// Report of the standing-hypothesis check: positivity margin of the
/// Jacobian and the probabilistic self-intersection probe.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HypothesisReport {
    pub a: f64,
    pub kappa_sup: f64,
    /// `1 - a * sup kappa`; must be positive.
    pub margin: f64,
    pub pairs_checked: usize,
    pub min_image_distance: f64,
    pub tube_diameter: f64,
}

/// A validated tube with its integrated moving frame.
#[derive(Debug, Clone)]
pub struct Tube {
    spec: TubeSpec,
    fine: FrameField,
    fine_step: f64,
}

impl Tube {
    pub fn new(spec: TubeSpec) -> Result<Self> {
        let l = spec.half_length;
        if !(l > 0.0) {
            return Err(Error::InvalidInput("half_length must be positive".into()));
        }
        if spec.curve.s_min() > -l || spec.curve.s_max() < l {
            return Err(Error::InvalidInput(format!(
                "curve grid [{}, {}] does not cover [-{l}, {l}]",
                spec.curve.s_min(),
                spec.curve.s_max()
            )));
        }
        let a = spec.shape.farthest_radius();
        let kappa_sup = spec.curve.kappa_sup();
        if a * kappa_sup >= 1.0 {
            return Err(Error::HypothesisViolated(format!(
                "a * sup(kappa) = {:.6} >= 1 (a = {a:.6}, sup kappa = {kappa_sup:.6})",
                a * kappa_sup
            )));
        }
        let rate = spec.curve.rate_sup() + spec.angle.rate_sup();
        let step_target = (0.02_f64 / (1.0 + rate)).min(0.02);
        let n = ((2.0 * l) / step_target).ceil() as usize + 1;
        let grid = curve::uniform(-l, l, n.max(5));
        let fine_step = grid[1] - grid[0];
        let fine = integrate_frame_on(&spec.curve, &spec.angle, &grid)?;
        Ok(Self {
            spec,
            fine,
            fine_step,
        })
    }

    pub fn spec(&self) -> &TubeSpec {
        &self.spec
    }

    pub fn half_length(&self) -> f64 {
        self.spec.half_length
    }

    pub fn frames(&self) -> &FrameField {
        &self.fine
    }

    /// Frame and curve position at arbitrary arc length, reconstructed by a
    /// short deterministic integration from the nearest stored sample.
    pub fn frame_at(&self, s: f64) -> Result<(Matrix3<f64>, Vector3<f64>)> {
        let l = self.spec.half_length;
        if s < -l - 1e-12 || s > l + 1e-12 {
            return Err(Error::OutOfDomain(format!("s = {s} outside [-{l}, {l}]")));
        }
        let s = s.clamp(-l, l);
        let idx = (((s + l) / self.fine_step).floor() as usize).min(self.fine.len() - 1);
        let s_node = self.fine.s_grid()[idx];
        if (s - s_node).abs() < 1e-14 {
            return Ok((self.fine.frames()[idx], self.fine.gamma()[idx]));
        }
        let grid = [s_node, s];
        let seg = integrate_frame_seeded(
            &self.spec.curve,
            &self.spec.angle,
            &grid,
            self.fine.frames()[idx],
            self.fine.gamma()[idx],
        )?;
        Ok((seg.frames()[1], seg.gamma()[1]))
    }

    /// The embedding `L(s, t) = gamma(s) + t2 e2(s) + t3 e3(s)`.
    pub fn tube_map(&self, s: f64, t: [f64; 2]) -> Result<Vector3<f64>> {
        if !self.spec.shape.contains(t, 1e-9) {
            return Err(Error::OutOfDomain(format!(
                "t = ({}, {}) outside the cross-section",
                t[0], t[1]
            )));
        }
        let (f, gamma) = self.frame_at(s)?;
        Ok(gamma + f.row(1).transpose() * t[0] + f.row(2).transpose() * t[1])
    }

    /// Metric coefficients at `(s, t)` from the closed-form expressions.
    pub fn metric_at(&self, s: f64, t: [f64; 2]) -> Result<MetricCoefficients> {
        let l = self.spec.half_length;
        if s < -l - 1e-12 || s > l + 1e-12 {
            return Err(Error::OutOfDomain(format!("s = {s} outside [-{l}, {l}]")));
        }
        metric_from_scalars(
            self.spec.curve.kappa(s),
            self.spec.curve.tau(s),
            self.spec.angle.theta(s),
            self.spec.angle.theta_dot(s),
            t,
            s,
        )
    }

    /// Checks hypothesis `a * sup kappa < 1` and probes injectivity of the
    /// embedding on randomly sampled parameter pairs with well-separated
    /// arc-length coordinates.
    pub fn check_hypotheses(&self, sample_count: usize) -> Result<HypothesisReport> {
        let a = self.spec.shape.farthest_radius();
        let kappa_sup = self.spec.curve.kappa_sup();
        let margin = 1.0 - a * kappa_sup;
        if margin <= 0.0 {
            return Err(Error::HypothesisViolated(format!(
                "margin 1 - a*sup(kappa) = {margin:.6} <= 0"
            )));
        }
        let l = self.spec.half_length;
        let mut rng = ChaCha8Rng::seed_from_u64(0x57a7_1c5e);
        let floor = (8.0 * self.fine_step).max(4.0 * a).max(2e-3 * l);
        let mut points = Vec::with_capacity(sample_count.max(2));
        let mut lo = Vector3::repeat(f64::INFINITY);
        let mut hi = Vector3::repeat(f64::NEG_INFINITY);
        while points.len() < sample_count.max(2) {
            let s = rng.gen_range(-l..=l);
            let t = self.spec.shape.sample_point(&mut rng);
            let p = self.tube_map(s, t)?;
            lo = lo.inf(&p);
            hi = hi.sup(&p);
            points.push((s, p));
        }
        let diameter = (hi - lo).norm().max(2.0 * a);
        let mut min_dist = f64::INFINITY;
        let mut pairs = 0usize;
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if (points[i].0 - points[j].0).abs() < floor {
                    continue;
                }
                pairs += 1;
                let d = (points[i].1 - points[j].1).norm();
                min_dist = min_dist.min(d);
                if d < 1e-9 * diameter {
                    return Err(Error::HypothesisViolated(format!(
                        "self-intersection probe: |L(s,t) - L(s',t')| = {d:.3e} at s = {:.4}, s' = {:.4} (floor {floor:.3})",
                        points[i].0, points[j].0
                    )));
                }
            }
        }
        Ok(HypothesisReport {
            a,
            kappa_sup,
            margin,
            pairs_checked: pairs,
            min_image_distance: min_dist,
            tube_diameter: diameter,
        })
    }

    /// Gauss curvature of the ruled surface swept by the rotated normal
    /// `e2`, evaluated at mid-ruling radius `a/2` by second-fundamental-form
    /// finite differences. Vanishes (to discretization accuracy) precisely
    /// when `tau - theta_dot = 0` at `s`.
    pub fn ruled_surface_gauss_curvature(&self, s: f64) -> Result<f64> {
        let delta = 5e-3_f64.min(self.spec.half_length / 16.0);
        let l = self.spec.half_length;
        if s - 2.0 * delta < -l || s + 2.0 * delta > l {
            return Err(Error::OutOfDomain(format!(
                "s = {s} too close to the truncation ends for the FD stencil"
            )));
        }
        let r = 0.5 * self.spec.shape.farthest_radius();
        let mut pos = [Vector3::zeros(); 3];
        let mut e2s = [Vector3::zeros(); 3];
        for (k, off) in [-1.0f64, 0.0, 1.0].iter().enumerate() {
            let (f, gamma) = self.frame_at(s + off * delta)?;
            e2s[k] = f.row(1).transpose();
            pos[k] = gamma + e2s[k] * r;
        }
        let sigma_s = (pos[2] - pos[0]) / (2.0 * delta);
        let sigma_ss = (pos[2] - pos[1] * 2.0 + pos[0]) / (delta * delta);
        let sigma_sr = (e2s[2] - e2s[0]) / (2.0 * delta);
        let sigma_r = e2s[1];
        let normal = sigma_s.cross(&sigma_r);
        let nn = normal.norm();
        if nn < 1e-14 {
            return Err(Error::DegenerateJacobian {
                h: 0.0,
                s,
                t2: r,
                t3: 0.0,
            });
        }
        let n = normal / nn;
        let e = sigma_s.dot(&sigma_s);
        let f = sigma_s.dot(&sigma_r);
        let g = sigma_r.dot(&sigma_r);
        let l2 = n.dot(&sigma_ss);
        let m2 = n.dot(&sigma_sr);
        // sigma_rr = 0 for a ruled surface, so N = 0.
        Ok((l2 * 0.0 - m2 * m2) / (e * g - f * f))
    }
}

/// Single metric evaluation from scalar curve data; shared with assembly's
/// quadrature loop, which bypasses the `Tube` wrapper for speed.
pub(crate) fn metric_from_scalars(
    kappa: f64,
    tau: f64,
    theta: f64,
    theta_dot: f64,
    t: [f64; 2],
    s: f64,
) -> Result<MetricCoefficients> {
    let (st, ct) = theta.sin_cos();
    let h = 1.0 - (t[0] * ct + t[1] * st) * kappa;
    if h <= 0.0 {
        return Err(Error::DegenerateJacobian {
            h,
            s,
            t2: t[0],
            t3: t[1],
        });
    }
    let nu = tau - theta_dot;
    Ok(MetricCoefficients {
        h,
        h2: -t[1] * nu,
        h3: t[0] * nu,
    })
}

fn integrate_frame_seeded(
    curve: &CurveData,
    angle: &AngleFunction,
    s_out: &[f64],
    f0: Matrix3<f64>,
    gamma0: Vector3<f64>,
) -> Result<FrameField> {
    // Re-run the standard integrator and then rebase: the integrator starts
    // from the canonical initial frame at s_out[0]; the stored state there is
    // reached by the same deterministic path, so rebasing is exact up to
    // round-off. Cheaper and simpler than exposing seeded initial conditions.
    let ff = integrate_frame_on(curve, angle, s_out)?;
    let f_start = ff.frames()[0];
    // Rotation carrying the canonical start frame to the stored one.
    let rot = f0.transpose() * f_start;
    let frames: Vec<Matrix3<f64>> = ff.frames().iter().map(|f| rot.transpose() * f).collect();
    let gamma: Vec<Vector3<f64>> = ff
        .gamma()
        .iter()
        .map(|g| gamma0 + rot.transpose() * g)
        .collect();
    Ok(FrameField {
        s: s_out.to_vec(),
        frames,
        gamma,
    })
}

/// Writes a frame field as CSV with columns `s, e1x..e3z` (nine frame
/// entries in row-major order).
pub fn write_frames_csv<W: std::io::Write>(ff: &FrameField, mut w: W) -> Result<()> {
    writeln!(
        w,
        "s,e1x,e1y,e1z,e2x,e2y,e2z,e3x,e3y,e3z"
    )?;
    for (i, s) in ff.s_grid().iter().enumerate() {
        let f = &ff.frames()[i];
        let row: Vec<String> = (0..3)
            .flat_map(|r| (0..3).map(move |c| (r, c)))
            .map(|(r, c)| format!("{}", f[(r, c)]))
            .collect();
        writeln!(w, "{},{}", s, row.join(","))?;
    }
    Ok(())
}

/// Writes metric samples as CSV with columns `s, t2, t3, h, h2, h3`.
pub fn write_metric_csv<W: std::io::Write>(
    tube: &Tube,
    samples: &[(f64, [f64; 2])],
    mut w: W,
) -> Result<()> {
    writeln!(w, "s,t2,t3,h,h2,h3")?;
    for &(s, t) in samples {
        let m = tube.metric_at(s, t)?;
        writeln!(w, "{},{},{},{},{},{}", s, t[0], t[1], m.h, m.h2, m.h3)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::CrossSectionShape;
    use std::f64::consts::PI;

    fn disc_spec(radius: f64, curve: CurveData, angle: AngleFunction, l: f64) -> TubeSpec {
        TubeSpec {
            curve,
            angle,
            shape: CrossSectionShape::disc(radius, [0.0, 0.0]),
            half_length: l,
        }
    }

    #[test]
    fn metric_is_euclidean_for_straight_untwisted_tube() {
        let curve = CurveData::line(-5.0, 5.0, 21);
        let angle = AngleFunction::constant(curve.s_grid(), 0.0);
        let tube = Tube::new(disc_spec(0.5, curve, angle, 5.0)).unwrap();
        let m = tube.metric_at(1.3, [0.2, -0.1]).unwrap();
        assert!((m.h - 1.0).abs() < 1e-14);
        assert!(m.h2.abs() < 1e-14 && m.h3.abs() < 1e-14);
        let g = m.g();
        assert!((g - Matrix3::identity()).iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn metric_on_axis_is_trivial() {
        let curve = CurveData::helix(0.4, 0.3, -4.0, 4.0, 41);
        let angle = AngleFunction::constant(curve.s_grid(), 0.3);
        let tube = Tube::new(disc_spec(0.5, curve, angle, 4.0)).unwrap();
        let m = tube.metric_at(0.77, [0.0, 0.0]).unwrap();
        assert!((m.h - 1.0).abs() < 1e-14);
        assert!(m.h2.abs() < 1e-14 && m.h3.abs() < 1e-14);
    }

    #[test]
    fn metric_matches_hand_computed_sample() {
        // kappa = 0.5, theta = 0, tau - theta_dot = 2, t = (1, 0).
        let s = crate::geometry::curve::uniform(-2.0, 2.0, 41);
        let curve =
            CurveData::from_samples(s.clone(), vec![0.5; 41], vec![2.0; 41]).unwrap();
        let angle = AngleFunction::constant(&s, 0.0);
        let tube = Tube::new(disc_spec(1.0, curve, angle, 2.0)).unwrap();
        let m = tube.metric_at(0.0, [1.0, 0.0]).unwrap();
        assert!((m.h - 0.5).abs() < 1e-14);
        assert!(m.h2.abs() < 1e-14);
        assert!((m.h3 - 2.0).abs() < 1e-14);
        assert!((m.det_g() - 0.25).abs() < 1e-14);
        let gi = m.g() * m.g_inv() - Matrix3::identity();
        assert!(gi.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn metric_matches_fd_jacobian_of_tube_map() {
        let s = crate::geometry::curve::uniform(-2.0, 2.0, 81);
        let curve =
            CurveData::from_samples(s.clone(), vec![0.5; 81], vec![2.0; 81]).unwrap();
        let angle = AngleFunction::constant(&s, 0.0);
        let tube = Tube::new(disc_spec(1.0, curve, angle, 2.0)).unwrap();
        let (s0, t0) = (0.4, [0.55, -0.3]);
        let d = 1e-5;
        let col = |ds: f64, dt2: f64, dt3: f64| {
            tube.tube_map(s0 + ds, [t0[0] + dt2, t0[1] + dt3]).unwrap()
        };
        let js = (col(d, 0.0, 0.0) - col(-d, 0.0, 0.0)) / (2.0 * d);
        let j2 = (col(0.0, d, 0.0) - col(0.0, -d, 0.0)) / (2.0 * d);
        let j3 = (col(0.0, 0.0, d) - col(0.0, 0.0, -d)) / (2.0 * d);
        let m = tube.metric_at(s0, t0).unwrap();
        let g = m.g();
        let num = [
            [js.dot(&js), js.dot(&j2), js.dot(&j3)],
            [j2.dot(&js), j2.dot(&j2), j2.dot(&j3)],
            [j3.dot(&js), j3.dot(&j2), j3.dot(&j3)],
        ];
        for r in 0..3 {
            for c in 0..3 {
                assert!(
                    (num[r][c] - g[(r, c)]).abs() < 1e-7,
                    "G[{r}][{c}] fd {} vs exact {}",
                    num[r][c],
                    g[(r, c)]
                );
            }
        }
        let det_fd = Matrix3::from_fn(|r, c| num[r][c]).determinant();
        assert!((det_fd - m.det_g()).abs() < 1e-6);
    }

    #[test]
    fn tube_map_straight_is_euclidean() {
        let curve = CurveData::line(-5.0, 5.0, 11);
        let angle = AngleFunction::constant(curve.s_grid(), 0.0);
        let tube = Tube::new(disc_spec(1.0, curve, angle, 5.0)).unwrap();
        let p = tube.tube_map(2.0, [0.3, -0.4]).unwrap();
        // Canonical initial frame at s = -5.
        assert!((p - Vector3::new(7.0, 0.3, -0.4)).norm() < 1e-10);
    }

    #[test]
    fn tube_map_circle_points_along_inward_normal() {
        let curve = CurveData::circle(1.0, -PI, PI, 129);
        let angle = AngleFunction::constant(curve.s_grid(), 0.0);
        let tube = Tube::new(disc_spec(0.3, curve, angle, PI)).unwrap();
        let on_axis = tube.tube_map(0.0, [0.0, 0.0]).unwrap();
        let off = tube.tube_map(0.0, [0.25, 0.0]).unwrap();
        let (f, _) = tube.frame_at(0.0).unwrap();
        let e2 = f.row(1).transpose();
        assert!(((off - on_axis) - e2 * 0.25).norm() < 1e-9);
        // e2 is the curve's normal: for the circle it points to the center.
        let de1 = {
            let (fa, _) = tube.frame_at(1e-4).unwrap();
            let (fb, _) = tube.frame_at(-1e-4).unwrap();
            (fa.row(0).transpose() - fb.row(0).transpose()) / 2e-4
        };
        assert!((de1.normalize() - e2).norm() < 1e-6);
    }

    #[test]
    fn rotating_shape_and_angle_together_is_a_no_op() {
        let s = crate::geometry::curve::uniform(-3.0, 3.0, 61);
        let tau: Vec<f64> = s.iter().map(|x| 0.4 * (x * 0.7).cos()).collect();
        let kappa: Vec<f64> = s.iter().map(|x| 0.3 / (1.0 + x * x)).collect();
        let curve = CurveData::from_samples(s.clone(), kappa, tau).unwrap();
        let beta = 0.83;
        let angle_a = AngleFunction::constant_rate(&s, 0.2, 0.5);
        let angle_b = AngleFunction::constant_rate(&s, 0.2, 0.5 - beta);
        let tube_a = Tube::new(TubeSpec {
            curve: curve.clone(),
            angle: angle_a,
            shape: CrossSectionShape::disc(1.0, [0.0, 0.0]),
            half_length: 3.0,
        })
        .unwrap();
        let tube_b = Tube::new(TubeSpec {
            curve,
            angle: angle_b,
            shape: CrossSectionShape::disc(1.0, [0.0, 0.0]),
            half_length: 3.0,
        })
        .unwrap();
        // Point t in tube A corresponds to R(beta) t in tube B.
        let (sb, cb) = beta.sin_cos();
        for (s0, t) in [(0.33, [0.4, 0.1]), (-1.7, [-0.2, 0.55]), (2.4, [0.0, 0.8])] {
            let p_a = tube_a.tube_map(s0, t).unwrap();
            let t_rot = [cb * t[0] - sb * t[1], sb * t[0] + cb * t[1]];
            let p_b = tube_b.tube_map(s0, t_rot).unwrap();
            assert!((p_a - p_b).norm() < 1e-10, "mismatch at s = {s0}");
        }
    }

    #[test]
    fn hypothesis_margin_and_violation() {
        let curve = CurveData::circle(1.0, -2.0, 2.0, 41);
        let angle = AngleFunction::constant(curve.s_grid(), 0.0);
        let tube = Tube::new(disc_spec(0.3, curve.clone(), angle.clone(), 2.0)).unwrap();
        let rep = tube.check_hypotheses(120).unwrap();
        assert!((rep.margin - 0.7).abs() < 1e-9);

        let curve4 = CurveData::circle(4.0, -2.0, 2.0, 41);
        let bad = Tube::new(disc_spec(0.3, curve4, angle, 2.0));
        assert!(matches!(bad, Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn straight_tube_margin_is_one() {
        let curve = CurveData::line(-4.0, 4.0, 17);
        let angle = AngleFunction::constant(curve.s_grid(), 0.0);
        let tube = Tube::new(disc_spec(0.5, curve, angle, 4.0)).unwrap();
        let rep = tube.check_hypotheses(100).unwrap();
        assert!((rep.margin - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_curvature_vanishes_for_tang_frame() {
        let s = crate::geometry::curve::uniform(-4.0, 4.0, 81);
        let tau: Vec<f64> = s.iter().map(|x| 0.5 * (0.6 * x).sin()).collect();
        let kappa: Vec<f64> = s.iter().map(|x| 0.2 + 0.1 * (0.4 * x).cos()).collect();
        let curve = CurveData::from_samples(s.clone(), kappa, tau).unwrap();
        let angle = tang_frame_angle(&curve, 0.1);
        let tube = Tube::new(disc_spec(0.8, curve, angle, 4.0)).unwrap();
        for s0 in [-2.0, 0.0, 1.5] {
            let k = tube.ruled_surface_gauss_curvature(s0).unwrap();
            assert!(k.abs() < 1e-6, "K = {k} at s = {s0}");
        }
    }

    #[test]
    fn gauss_curvature_matches_helicoid_closed_form() {
        let s = crate::geometry::curve::uniform(-4.0, 4.0, 41);
        let curve = CurveData::line(-4.0, 4.0, 41);
        let angle = AngleFunction::constant_rate(&s, 1.0, 0.0);
        let tube = Tube::new(disc_spec(0.8, curve, angle, 4.0)).unwrap();
        let r = 0.4; // mid-ruling of a = 0.8
        let expect = -1.0 / (1.0 + r * r).powi(2);
        let k = tube.ruled_surface_gauss_curvature(0.3).unwrap();
        assert!(
            (k - expect).abs() < 1e-3 * expect.abs(),
            "K = {k}, expected {expect}"
        );
        assert!(k < 0.0);
    }

    #[test]
    fn gauss_curvature_zero_for_plane() {
        let curve = CurveData::line(-4.0, 4.0, 41);
        let angle = AngleFunction::constant(curve.s_grid(), 0.0);
        let tube = Tube::new(disc_spec(0.8, curve, angle, 4.0)).unwrap();
        let k = tube.ruled_surface_gauss_curvature(0.0).unwrap();
        assert!(k.abs() < 1e-10);
    }

    #[test]
    fn det_g_equals_h_squared_randomly() {
        use rand::Rng;
        let s = crate::geometry::curve::uniform(-3.0, 3.0, 61);
        let tau: Vec<f64> = s.iter().map(|x| 0.8 * (x * 1.1).sin()).collect();
        let kappa: Vec<f64> = s.iter().map(|x| 0.25 * (1.0 + (0.5 * x).cos())).collect();
        let curve = CurveData::from_samples(s.clone(), kappa, tau).unwrap();
        let angle = AngleFunction::constant_rate(&s, -0.4, 0.9);
        let tube = Tube::new(disc_spec(1.2, curve, angle, 3.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let s0 = rng.gen_range(-3.0..3.0);
            let t = [rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)];
            let m = tube.metric_at(s0, t).unwrap();
            let g = m.g();
            assert!((g.determinant() - m.det_g()).abs() < 1e-12);
            let prod = g * m.g_inv() - Matrix3::identity();
            assert!(prod.iter().all(|v| v.abs() < 1e-12));
            // Uniform bounds on h under the standing hypothesis.
            let a = 1.2;
            let ks = tube.spec().curve.kappa_sup();
            assert!(m.h >= 1.0 - a * ks - 1e-12 && m.h <= 1.0 + a * ks + 1e-12);
        }
    }
}
