//! Planar cross-section shapes.
//!
//! Shapes are symbolic descriptors: the farthest-point radius `a`, membership
//! tests and the rotational-invariance decision are computed from the
//! descriptor, not from a mesh.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Bounded open connected planar domain swept along the curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CrossSectionShape {
    Disc {
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Annulus {
        r_in: f64,
        r_out: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Ellipse {
        semi_axes: [f64; 2],
        #[serde(default)]
        center: [f64; 2],
        /// Tilt of the major axis in radians.
        #[serde(default)]
        tilt: f64,
    },
    Rectangle {
        widths: [f64; 2],
        #[serde(default)]
        center: [f64; 2],
        #[serde(default)]
        tilt: f64,
    },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl CrossSectionShape {
    pub fn disc(radius: f64, center: [f64; 2]) -> Self {
        Self::Disc { radius, center }
    }

    pub fn annulus(r_in: f64, r_out: f64, center: [f64; 2]) -> Self {
        Self::Annulus {
            r_in,
            r_out,
            center,
        }
    }

    pub fn ellipse(semi_axes: [f64; 2], center: [f64; 2], tilt: f64) -> Self {
        Self::Ellipse {
            semi_axes,
            center,
            tilt,
        }
    }

    pub fn rectangle(widths: [f64; 2], center: [f64; 2], tilt: f64) -> Self {
        Self::Rectangle {
            widths,
            center,
            tilt,
        }
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Self {
        Self::Polygon { vertices }
    }

    /// Distance of the farthest point of the closure to the origin of the
    /// transverse plane; the quantity `a` entering the hypothesis
    /// `a * sup kappa < 1`.
    pub fn farthest_radius(&self) -> f64 {
        fn norm(p: [f64; 2]) -> f64 {
            (p[0] * p[0] + p[1] * p[1]).sqrt()
        }
        match self {
            Self::Disc { radius, center } => norm(*center) + radius,
            Self::Annulus { r_out, center, .. } => norm(*center) + r_out,
            Self::Ellipse {
                semi_axes,
                center,
                tilt,
            } => {
                // Maximize |center + R(tilt) (sa cos p, sb sin p)| over p by a
                // dense scan with local parabolic refinement.
                let (st, ct) = tilt.sin_cos();
                let at = |p: f64| {
                    let v = [semi_axes[0] * p.cos(), semi_axes[1] * p.sin()];
                    let w = [ct * v[0] - st * v[1], st * v[0] + ct * v[1]];
                    norm([center[0] + w[0], center[1] + w[1]])
                };
                let n = 720;
                let mut best = (0.0f64, 0.0f64);
                for k in 0..n {
                    let p = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    let v = at(p);
                    if v > best.1 {
                        best = (p, v);
                    }
                }
                let mut lo = best.0 - 2.0 * std::f64::consts::PI / n as f64;
                let mut hi = best.0 + 2.0 * std::f64::consts::PI / n as f64;
                for _ in 0..60 {
                    let m1 = lo + (hi - lo) / 3.0;
                    let m2 = hi - (hi - lo) / 3.0;
                    if at(m1) < at(m2) {
                        lo = m1;
                    } else {
                        hi = m2;
                    }
                }
                at(0.5 * (lo + hi)).max(best.1)
            }
            Self::Rectangle {
                widths,
                center,
                tilt,
            } => {
                let (st, ct) = tilt.sin_cos();
                let mut best = 0.0f64;
                for sx in [-0.5, 0.5] {
                    for sy in [-0.5, 0.5] {
                        let v = [sx * widths[0], sy * widths[1]];
                        let w = [ct * v[0] - st * v[1], st * v[0] + ct * v[1]];
                        best = best.max(norm([center[0] + w[0], center[1] + w[1]]));
                    }
                }
                best
            }
            Self::Polygon { vertices } => vertices.iter().fold(0.0, |m, v| m.max(norm(*v))),
        }
    }

    /// Radius of a disc guaranteed to fit inside the shape; used only to
    /// sanity-check requested mesh sizes.
    pub fn inradius(&self) -> f64 {
        match self {
            Self::Disc { radius, .. } => *radius,
            Self::Annulus { r_in, r_out, .. } => 0.5 * (r_out - r_in),
            Self::Ellipse { semi_axes, .. } => semi_axes[0].min(semi_axes[1]),
            Self::Rectangle { widths, .. } => 0.5 * widths[0].min(widths[1]),
            Self::Polygon { vertices } => {
                // Distance from the vertex centroid to the nearest edge.
                let n = vertices.len();
                let cx = vertices.iter().map(|v| v[0]).sum::<f64>() / n as f64;
                let cy = vertices.iter().map(|v| v[1]).sum::<f64>() / n as f64;
                let mut d = f64::INFINITY;
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    d = d.min(point_segment_distance([cx, cy], a, b));
                }
                d
            }
        }
    }

    /// Membership test with boundary tolerance `tol` (points within `tol` of
    /// the closure are accepted).
    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        match self {
            Self::Disc { radius, center } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                dx * dx + dy * dy <= (radius + tol) * (radius + tol)
            }
            Self::Annulus {
                r_in,
                r_out,
                center,
            } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                let r2 = dx * dx + dy * dy;
                r2 <= (r_out + tol) * (r_out + tol)
                    && r2 >= (r_in - tol).max(0.0) * (r_in - tol).max(0.0)
            }
            Self::Ellipse {
                semi_axes,
                center,
                tilt,
            } => {
                let (st, ct) = tilt.sin_cos();
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                let u = ct * dx + st * dy;
                let v = -st * dx + ct * dy;
                let ea = semi_axes[0] + tol;
                let eb = semi_axes[1] + tol;
                (u / ea) * (u / ea) + (v / eb) * (v / eb) <= 1.0
            }
            Self::Rectangle {
                widths,
                center,
                tilt,
            } => {
                let (st, ct) = tilt.sin_cos();
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                let u = ct * dx + st * dy;
                let v = -st * dx + ct * dy;
                u.abs() <= 0.5 * widths[0] + tol && v.abs() <= 0.5 * widths[1] + tol
            }
            Self::Polygon { vertices } => {
                if winding_contains(vertices, p) {
                    return true;
                }
                let n = vertices.len();
                (0..n).any(|i| {
                    point_segment_distance(p, vertices[i], vertices[(i + 1) % n]) <= tol
                })
            }
        }
    }

    /// True when the shape is rotationally invariant with respect to the
    /// origin of the transverse plane: a disc or annulus centered at the
    /// origin (an ellipse with equal semi-axes counts as a disc). Twisting
    /// such a cross-section has no geometric effect.
    pub fn is_rotationally_invariant(&self, tol: f64) -> bool {
        let centered = |c: &[f64; 2]| c[0].abs() <= tol && c[1].abs() <= tol;
        match self {
            Self::Disc { center, .. } => centered(center),
            Self::Annulus { center, .. } => centered(center),
            Self::Ellipse {
                semi_axes, center, ..
            } => centered(center) && (semi_axes[0] - semi_axes[1]).abs() <= tol,
            Self::Rectangle { .. } | Self::Polygon { .. } => false,
        }
    }

    /// Shape rotated about the origin by `beta` (composition of tilts for the
    /// analytic kinds, vertex rotation for polygons).
    pub fn rotated(&self, beta: f64) -> Self {
        let (sb, cb) = beta.sin_cos();
        let rot = |p: [f64; 2]| [cb * p[0] - sb * p[1], sb * p[0] + cb * p[1]];
        match self {
            Self::Disc { radius, center } => Self::Disc {
                radius: *radius,
                center: rot(*center),
            },
            Self::Annulus {
                r_in,
                r_out,
                center,
            } => Self::Annulus {
                r_in: *r_in,
                r_out: *r_out,
                center: rot(*center),
            },
            Self::Ellipse {
                semi_axes,
                center,
                tilt,
            } => Self::Ellipse {
                semi_axes: *semi_axes,
                center: rot(*center),
                tilt: tilt + beta,
            },
            Self::Rectangle {
                widths,
                center,
                tilt,
            } => Self::Rectangle {
                widths: *widths,
                center: rot(*center),
                tilt: tilt + beta,
            },
            Self::Polygon { vertices } => Self::Polygon {
                vertices: vertices.iter().map(|v| rot(*v)).collect(),
            },
        }
    }

    /// Shape scaled about the origin by `eps` (the thin-tube family).
    pub fn scaled(&self, eps: f64) -> Self {
        let sc = |p: [f64; 2]| [eps * p[0], eps * p[1]];
        match self {
            Self::Disc { radius, center } => Self::Disc {
                radius: eps * radius,
                center: sc(*center),
            },
            Self::Annulus {
                r_in,
                r_out,
                center,
            } => Self::Annulus {
                r_in: eps * r_in,
                r_out: eps * r_out,
                center: sc(*center),
            },
            Self::Ellipse {
                semi_axes,
                center,
                tilt,
            } => Self::Ellipse {
                semi_axes: [eps * semi_axes[0], eps * semi_axes[1]],
                center: sc(*center),
                tilt: *tilt,
            },
            Self::Rectangle {
                widths,
                center,
                tilt,
            } => Self::Rectangle {
                widths: [eps * widths[0], eps * widths[1]],
                center: sc(*center),
                tilt: *tilt,
            },
            Self::Polygon { vertices } => Self::Polygon {
                vertices: vertices.iter().map(|v| sc(*v)).collect(),
            },
        }
    }

    /// Uniform random point inside the shape (rejection from the bounding
    /// box); used by the probabilistic injectivity probe.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> [f64; 2] {
        let a = self.farthest_radius();
        loop {
            let p = [rng.gen_range(-a..=a), rng.gen_range(-a..=a)];
            if self.contains(p, 0.0) {
                return p;
            }
        }
    }
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let d = [ap[0] - t * ab[0], ap[1] - t * ab[1]];
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}

fn winding_contains(vertices: &[[f64; 2]], p: [f64; 2]) -> bool {
    let mut inside = false;
    let n = vertices.len();
    let mut j = n - 1;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[j];
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0];
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn farthest_radius_closed_forms() {
        assert!((CrossSectionShape::disc(0.3, [0.0, 0.0]).farthest_radius() - 0.3).abs() < 1e-15);
        assert!(
            (CrossSectionShape::disc(0.3, [0.1, 0.0]).farthest_radius() - 0.4).abs() < 1e-15
        );
        assert!(
            (CrossSectionShape::annulus(0.4, 1.0, [0.0, 0.0]).farthest_radius() - 1.0).abs()
                < 1e-15
        );
        let e = CrossSectionShape::ellipse([1.0, 0.5], [0.0, 0.0], 0.4);
        assert!((e.farthest_radius() - 1.0).abs() < 1e-9);
        let r = CrossSectionShape::rectangle([1.0, 1.0], [0.5, 0.5], 0.0);
        assert!((r.farthest_radius() - (2.0f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rotational_invariance_decisions() {
        assert!(CrossSectionShape::disc(1.0, [0.0, 0.0]).is_rotationally_invariant(1e-12));
        assert!(!CrossSectionShape::disc(1.0, [0.1, 0.0]).is_rotationally_invariant(1e-12));
        assert!(
            CrossSectionShape::annulus(0.4, 1.0, [0.0, 0.0]).is_rotationally_invariant(1e-12)
        );
        assert!(!CrossSectionShape::ellipse([1.0, 0.5], [0.0, 0.0], 0.0)
            .is_rotationally_invariant(1e-12));
        assert!(CrossSectionShape::ellipse([0.7, 0.7], [0.0, 0.0], 0.3)
            .is_rotationally_invariant(1e-12));
        assert!(!CrossSectionShape::rectangle([1.0, 1.0], [0.0, 0.0], 0.0)
            .is_rotationally_invariant(1e-12));
    }

    #[test]
    fn polygon_membership() {
        let square = CrossSectionShape::polygon(vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [1.0, 1.0],
            [0.0, 1.0],
        ]);
        assert!(square.contains([0.5, 0.5], 0.0));
        assert!(!square.contains([1.5, 0.5], 0.0));
        assert!(square.contains([1.0 + 1e-10, 0.5], 1e-9));
        assert!((square.farthest_radius() - (2.0f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn shape_serde_roundtrip() {
        let shapes = vec![
            CrossSectionShape::disc(0.3, [0.0, 0.1]),
            CrossSectionShape::ellipse([1.0, 0.5], [0.0, 0.0], 0.2),
            CrossSectionShape::polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.5, 0.8]]),
        ];
        for s in shapes {
            let txt = serde_json::to_string(&s).unwrap();
            let back: CrossSectionShape = serde_json::from_str(&txt).unwrap();
            assert_eq!(s, back);
        }
    }
}
