//! Conforming triangulations of the cross-section shapes.
//!
//! Meshing strategy per shape:
//!
//! * rectangles: structured tensor grid split into triangles;
//! * discs and annuli: polar rings with a fixed azimuthal node count. For a
//!   centered disc or annulus the triangulation is then exactly invariant
//!   under the cyclic rotation group of the ring, which is what makes the
//!   "twisting a circular cross-section does nothing" control tests hold to
//!   tight tolerances;
//! * ellipses: the unit-disc mesh mapped by the semi-axes (boundary nodes
//!   land exactly on the true ellipse);
//! * polygons: boundary subdivision plus an interior hexagonal lattice,
//!   triangulated by Bowyer-Watson.
//!
//! Meshes are immutable after generation.

use std::collections::BTreeMap;

use crate::shape::CrossSectionShape;
use crate::{Error, Result};

/// Triangulated cross-section with boundary markers.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2D {
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    h_mesh: f64,
}

impl Mesh2D {
    /// Builds a mesh from raw arrays, orienting triangles positively and
    /// deriving boundary flags from the edge structure. Fails when the
    /// triangulation is not conforming or contains degenerate triangles.
    pub fn from_raw(
        nodes: Vec<[f64; 2]>,
        mut triangles: Vec<[usize; 3]>,
        h_mesh: f64,
    ) -> Result<Self> {
        if nodes.len() < 3 || triangles.is_empty() {
            return Err(Error::MeshFailure("empty triangulation".into()));
        }
        for tri in triangles.iter_mut() {
            if tri.iter().any(|&i| i >= nodes.len()) {
                return Err(Error::MeshFailure("triangle index out of range".into()));
            }
            let a = signed_area(&nodes, *tri);
            if a.abs() < 1e-14 * h_mesh * h_mesh {
                return Err(Error::MeshFailure(format!(
                    "degenerate triangle {:?} (area {a:.3e})",
                    tri
                )));
            }
            if a < 0.0 {
                tri.swap(1, 2);
            }
        }
        // Edge incidence: conforming means every edge belongs to at most two
        // triangles, and the boundary is the set of single-incidence edges.
        let mut edge_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for tri in &triangles {
            for e in 0..3 {
                let (u, v) = (tri[e], tri[(e + 1) % 3]);
                let key = (u.min(v), u.max(v));
                *edge_count.entry(key).or_insert(0) += 1;
            }
        }
        let mut boundary = vec![false; nodes.len()];
        for (&(u, v), &c) in &edge_count {
            match c {
                1 => {
                    boundary[u] = true;
                    boundary[v] = true;
                }
                2 => {}
                _ => {
                    return Err(Error::MeshFailure(format!(
                        "edge ({u}, {v}) shared by {c} triangles"
                    )))
                }
            }
        }
        Ok(Self {
            nodes,
            triangles,
            boundary,
            h_mesh,
        })
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary[node]
    }

    pub fn h_mesh(&self) -> f64 {
        self.h_mesh
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_interior(&self) -> usize {
        self.boundary.iter().filter(|b| !**b).count()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        signed_area(&self.nodes, self.triangles[t])
    }

    pub fn max_edge_length(&self) -> f64 {
        let mut m = 0.0f64;
        for tri in &self.triangles {
            for e in 0..3 {
                let a = self.nodes[tri[e]];
                let b = self.nodes[tri[(e + 1) % 3]];
                m = m.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
            }
        }
        m
    }

    /// Number of connected boundary loops (1 for simply connected shapes,
    /// 2 for an annulus).
    pub fn boundary_loops(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            let mut i = i;
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let mut edge_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for tri in &self.triangles {
            for e in 0..3 {
                let (u, v) = (tri[e], tri[(e + 1) % 3]);
                let key = (u.min(v), u.max(v));
                *edge_count.entry(key).or_insert(0) += 1;
            }
        }
        for (&(u, v), &c) in &edge_count {
            if c == 1 {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                parent[ru] = rv;
            }
        }
        let mut roots: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| self.boundary[i])
            .map(|i| find(&mut parent, i))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// Mesh with all node coordinates scaled by `eps` about the origin
    /// (same topology; the thin-tube cross-section family).
    pub fn scaled(&self, eps: f64) -> Self {
        Self {
            nodes: self.nodes.iter().map(|p| [eps * p[0], eps * p[1]]).collect(),
            triangles: self.triangles.clone(),
            boundary: self.boundary.clone(),
            h_mesh: self.h_mesh * eps,
        }
    }

    /// Mesh rotated about the origin by `beta` (same topology).
    pub fn rotated(&self, beta: f64) -> Self {
        let (sb, cb) = beta.sin_cos();
        Self {
            nodes: self
                .nodes
                .iter()
                .map(|p| [cb * p[0] - sb * p[1], sb * p[0] + cb * p[1]])
                .collect(),
            triangles: self.triangles.clone(),
            boundary: self.boundary.clone(),
            h_mesh: self.h_mesh,
        }
    }

    /// Plain-text export: a header line with counts and the mesh size, one
    /// node per line (`x y boundary_flag`), then one triangle per line.
    pub fn write_text<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {}", self.nodes.len(), self.triangles.len(), self.h_mesh)?;
        for (p, b) in self.nodes.iter().zip(&self.boundary) {
            writeln!(w, "{} {} {}", p[0], p[1], u8::from(*b))?;
        }
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }

    pub fn read_text<R: std::io::BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::MeshFailure("empty mesh file".into()))??;
        let mut it = header.split_whitespace();
        let parse_err = |what: &str| Error::MeshFailure(format!("bad mesh header: {what}"));
        let n: usize = it
            .next()
            .ok_or_else(|| parse_err("nodes"))?
            .parse()
            .map_err(|_| parse_err("nodes"))?;
        let m: usize = it
            .next()
            .ok_or_else(|| parse_err("triangles"))?
            .parse()
            .map_err(|_| parse_err("triangles"))?;
        let h: f64 = it
            .next()
            .ok_or_else(|| parse_err("h_mesh"))?
            .parse()
            .map_err(|_| parse_err("h_mesh"))?;
        let mut nodes = Vec::with_capacity(n);
        let mut flags = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::MeshFailure("truncated node list".into()))??;
            let v: Vec<f64> = line
                .split_whitespace()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::MeshFailure(format!("bad node line: {line}")))?;
            if v.len() != 3 {
                return Err(Error::MeshFailure(format!("bad node line: {line}")));
            }
            nodes.push([v[0], v[1]]);
            flags.push(v[2] != 0.0);
        }
        let mut triangles = Vec::with_capacity(m);
        for _ in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| Error::MeshFailure("truncated triangle list".into()))??;
            let v: Vec<usize> = line
                .split_whitespace()
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::MeshFailure(format!("bad triangle line: {line}")))?;
            if v.len() != 3 {
                return Err(Error::MeshFailure(format!("bad triangle line: {line}")));
            }
            triangles.push([v[0], v[1], v[2]]);
        }
        let mesh = Self::from_raw(nodes, triangles, h)?;
        // Recomputed flags must agree with the stored ones.
        for (i, &f) in flags.iter().enumerate() {
            if f != mesh.boundary[i] {
                return Err(Error::MeshFailure(format!(
                    "boundary flag mismatch at node {i}"
                )));
            }
        }
        Ok(mesh)
    }
}

fn signed_area(nodes: &[[f64; 2]], tri: [usize; 3]) -> f64 {
    let [a, b, c] = tri;
    0.5 * ((nodes[b][0] - nodes[a][0]) * (nodes[c][1] - nodes[a][1])
        - (nodes[c][0] - nodes[a][0]) * (nodes[b][1] - nodes[a][1]))
}

/// Generates a conforming triangulation of the shape with target mesh size
/// `h_mesh` (maximum edge below `1.5 * h_mesh`, boundary nodes exactly on
/// the analytic boundary).
pub fn generate_mesh(shape: &CrossSectionShape, h_mesh: f64) -> Result<Mesh2D> {
    if !(h_mesh > 0.0) {
        return Err(Error::MeshFailure("h_mesh must be positive".into()));
    }
    if h_mesh > shape.inradius() {
        return Err(Error::MeshFailure(format!(
            "h_mesh = {h_mesh} exceeds the shape inradius {}",
            shape.inradius()
        )));
    }
    match shape {
        CrossSectionShape::Rectangle {
            widths,
            center,
            tilt,
        } => rectangle_mesh(*widths, *center, *tilt, h_mesh),
        CrossSectionShape::Disc { radius, center } => {
            let mesh = disc_mesh(*radius, h_mesh)?;
            Ok(translate(mesh, *center))
        }
        CrossSectionShape::Annulus {
            r_in,
            r_out,
            center,
        } => {
            let mesh = annulus_mesh(*r_in, *r_out, h_mesh)?;
            Ok(translate(mesh, *center))
        }
        CrossSectionShape::Ellipse {
            semi_axes,
            center,
            tilt,
        } => {
            let sa_max = semi_axes[0].max(semi_axes[1]);
            let unit = disc_mesh(1.0, h_mesh / sa_max)?;
            let (st, ct) = tilt.sin_cos();
            let nodes = unit
                .nodes
                .iter()
                .map(|p| {
                    let v = [semi_axes[0] * p[0], semi_axes[1] * p[1]];
                    [
                        center[0] + ct * v[0] - st * v[1],
                        center[1] + st * v[0] + ct * v[1],
                    ]
                })
                .collect();
            Mesh2D::from_raw(nodes, unit.triangles, h_mesh)
        }
        CrossSectionShape::Polygon { vertices } => polygon_mesh(vertices, h_mesh),
    }
}

fn translate(mesh: Mesh2D, c: [f64; 2]) -> Mesh2D {
    if c == [0.0, 0.0] {
        return mesh;
    }
    Mesh2D {
        nodes: mesh
            .nodes
            .iter()
            .map(|p| [p[0] + c[0], p[1] + c[1]])
            .collect(),
        ..mesh
    }
}

fn rectangle_mesh(widths: [f64; 2], center: [f64; 2], tilt: f64, h: f64) -> Result<Mesh2D> {
    let nx = (widths[0] / h).ceil() as usize;
    let ny = (widths[1] / h).ceil() as usize;
    let (st, ct) = tilt.sin_cos();
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let u = -0.5 * widths[0] + widths[0] * i as f64 / nx as f64;
            let v = -0.5 * widths[1] + widths[1] * j as f64 / ny as f64;
            nodes.push([center[0] + ct * u - st * v, center[1] + st * u + ct * v]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    Mesh2D::from_raw(nodes, triangles, h)
}

/// Polar-ring disc mesh centered at the origin. All rings carry the same
/// azimuthal node count so a centered disc is invariant under the cyclic
/// rotation by one azimuthal step.
fn disc_mesh(radius: f64, h: f64) -> Result<Mesh2D> {
    let n_r = (radius / h).ceil().max(2.0) as usize;
    let n_t = ((2.0 * std::f64::consts::PI * radius) / h).ceil().max(6.0) as usize;
    let mut nodes = vec![[0.0, 0.0]];
    for j in 1..=n_r {
        let r = radius * j as f64 / n_r as f64;
        for k in 0..n_t {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / n_t as f64;
            nodes.push([r * phi.cos(), r * phi.sin()]);
        }
    }
    let ring = |j: usize, k: usize| 1 + (j - 1) * n_t + (k % n_t);
    let mut triangles = Vec::new();
    for k in 0..n_t {
        triangles.push([0, ring(1, k), ring(1, k + 1)]);
    }
    for j in 1..n_r {
        for k in 0..n_t {
            triangles.push([ring(j, k), ring(j + 1, k), ring(j + 1, k + 1)]);
            triangles.push([ring(j, k), ring(j + 1, k + 1), ring(j, k + 1)]);
        }
    }
    Mesh2D::from_raw(nodes, triangles, h)
}

fn annulus_mesh(r_in: f64, r_out: f64, h: f64) -> Result<Mesh2D> {
    if !(r_out > r_in && r_in > 0.0) {
        return Err(Error::MeshFailure(format!(
            "bad annulus radii ({r_in}, {r_out})"
        )));
    }
    let n_r = ((r_out - r_in) / h).ceil().max(2.0) as usize;
    let n_t = ((2.0 * std::f64::consts::PI * r_out) / h).ceil().max(6.0) as usize;
    let mut nodes = Vec::with_capacity((n_r + 1) * n_t);
    for j in 0..=n_r {
        let r = r_in + (r_out - r_in) * j as f64 / n_r as f64;
        for k in 0..n_t {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / n_t as f64;
            nodes.push([r * phi.cos(), r * phi.sin()]);
        }
    }
    let ring = |j: usize, k: usize| j * n_t + (k % n_t);
    let mut triangles = Vec::new();
    for j in 0..n_r {
        for k in 0..n_t {
            triangles.push([ring(j, k), ring(j + 1, k), ring(j + 1, k + 1)]);
            triangles.push([ring(j, k), ring(j + 1, k + 1), ring(j, k + 1)]);
        }
    }
    Mesh2D::from_raw(nodes, triangles, h)
}

fn polygon_mesh(vertices: &[[f64; 2]], h: f64) -> Result<Mesh2D> {
    if vertices.len() < 3 {
        return Err(Error::MeshFailure("polygon needs >= 3 vertices".into()));
    }
    let n = vertices.len();
    let mut points: Vec<[f64; 2]> = Vec::new();
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let m = (len / h).ceil().max(1.0) as usize;
        for k in 0..m {
            let t = k as f64 / m as f64;
            points.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    let n_boundary = points.len();
    let shape = CrossSectionShape::polygon(vertices.to_vec());
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in vertices {
        for d in 0..2 {
            lo[d] = lo[d].min(v[d]);
            hi[d] = hi[d].max(v[d]);
        }
    }
    let row_h = h * 3.0f64.sqrt() / 2.0;
    let mut row = 0usize;
    loop {
        let y = lo[1] + row_h * (row as f64 + 0.7);
        if y >= hi[1] {
            break;
        }
        let x_off = if row % 2 == 0 { 0.5 * h } else { h };
        let mut col = 0usize;
        loop {
            let x = lo[0] + x_off + h * col as f64;
            if x >= hi[0] {
                break;
            }
            let p = [x, y];
            let near_boundary = (0..n).any(|i| {
                point_segment_distance(p, vertices[i], vertices[(i + 1) % n]) < 0.5 * h
            }) || points[..n_boundary]
                .iter()
                .any(|q| (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2) < (0.5 * h).powi(2));
            if shape.contains(p, 0.0) && !near_boundary {
                points.push(p);
            }
            col += 1;
        }
        row += 1;
    }
    let triangles = bowyer_watson(&points)?;
    // Drop triangles whose centroid falls outside (non-convex polygons).
    let kept: Vec<[usize; 3]> = triangles
        .into_iter()
        .filter(|t| {
            let c = [
                (points[t[0]][0] + points[t[1]][0] + points[t[2]][0]) / 3.0,
                (points[t[0]][1] + points[t[1]][1] + points[t[2]][1]) / 3.0,
            ];
            shape.contains(c, 0.0)
        })
        .collect();
    Mesh2D::from_raw(points, kept, h)
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

/// Deterministic Bowyer-Watson Delaunay triangulation of a point set.
fn bowyer_watson(points: &[[f64; 2]]) -> Result<Vec<[usize; 3]>> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let cx = 0.5 * (lo[0] + hi[0]);
    let cy = 0.5 * (lo[1] + hi[1]);
    let big = 20.0 * span;
    let n = points.len();
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.push([cx - big, cy - big]);
    pts.push([cx + big, cy - big]);
    pts.push([cx, cy + big]);
    let mut tris: Vec<[usize; 3]> = vec![[n, n + 1, n + 2]];

    for p in 0..n {
        let mut bad = Vec::new();
        for (ti, t) in tris.iter().enumerate() {
            if in_circumcircle(&pts, *t, pts[p]) {
                bad.push(ti);
            }
        }
        let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &ti in &bad {
            let t = tris[ti];
            for e in 0..3 {
                let (u, v) = (t[e], t[(e + 1) % 3]);
                *edges.entry((u.min(v), u.max(v))).or_insert(0) += 1;
            }
        }
        for &ti in bad.iter().rev() {
            tris.swap_remove(ti);
        }
        for (&(u, v), &c) in &edges {
            if c == 1 {
                tris.push(orient(&pts, [u, v, p]));
            }
        }
    }
    Ok(tris
        .into_iter()
        .filter(|t| t.iter().all(|&i| i < n))
        .collect())
}

fn orient(pts: &[[f64; 2]], t: [usize; 3]) -> [usize; 3] {
    let a = pts[t[0]];
    let b = pts[t[1]];
    let c = pts[t[2]];
    let cross = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    if cross < 0.0 {
        [t[0], t[2], t[1]]
    } else {
        t
    }
}

fn in_circumcircle(pts: &[[f64; 2]], t: [usize; 3], p: [f64; 2]) -> bool {
    let t = orient(pts, t);
    let a = pts[t[0]];
    let b = pts[t[1]];
    let c = pts[t[2]];
    let m = [
        [a[0] - p[0], a[1] - p[1], (a[0] - p[0]).powi(2) + (a[1] - p[1]).powi(2)],
        [b[0] - p[0], b[1] - p[1], (b[0] - p[0]).powi(2) + (b[1] - p[1]).powi(2)],
        [c[0] - p[0], c[1] - p[1], (c[0] - p[0]).powi(2) + (c[1] - p[1]).powi(2)],
    ];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    det > 1e-12 * ((a[0] - p[0]).abs() + (b[0] - p[0]).abs() + (c[0] - p[0]).abs()).powi(4).max(1e-300)
}

/// Writes nodal values as CSV with columns `node, t2, t3, value`.
pub fn write_nodal_csv<W: std::io::Write>(mesh: &Mesh2D, values: &[f64], mut w: W) -> Result<()> {
    if values.len() != mesh.num_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "nodal values {} vs nodes {}",
            values.len(),
            mesh.num_nodes()
        )));
    }
    writeln!(w, "node,t2,t3,value")?;
    for (i, p) in mesh.nodes().iter().enumerate() {
        writeln!(w, "{},{},{},{}", i, p[0], p[1], values[i])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_sixteenth_gives_289_nodes() {
        let shape = CrossSectionShape::rectangle([1.0, 1.0], [0.5, 0.5], 0.0);
        let mesh = generate_mesh(&shape, 1.0 / 16.0).unwrap();
        assert_eq!(mesh.num_nodes(), 289);
        assert_eq!(mesh.num_triangles(), 512);
        assert!(mesh.max_edge_length() <= 1.5 / 16.0 + 1e-12);
    }

    #[test]
    fn disc_boundary_nodes_on_circle() {
        let shape = CrossSectionShape::disc(1.0, [0.0, 0.0]);
        let mesh = generate_mesh(&shape, 0.1).unwrap();
        for (i, p) in mesh.nodes().iter().enumerate() {
            if mesh.is_boundary(i) {
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                assert!((r - 1.0).abs() < 1e-12, "boundary node at radius {r}");
            }
        }
        assert_eq!(mesh.boundary_loops(), 1);
        assert!(mesh.max_edge_length() <= 0.15 + 1e-12);
    }

    #[test]
    fn annulus_has_two_boundary_loops() {
        let shape = CrossSectionShape::annulus(0.4, 1.0, [0.0, 0.0]);
        let mesh = generate_mesh(&shape, 0.1).unwrap();
        assert_eq!(mesh.boundary_loops(), 2);
        for (i, p) in mesh.nodes().iter().enumerate() {
            if mesh.is_boundary(i) {
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                assert!((r - 0.4).abs() < 1e-12 || (r - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ellipse_boundary_on_true_ellipse() {
        let shape = CrossSectionShape::ellipse([1.0, 0.5], [0.0, 0.0], 0.0);
        let mesh = generate_mesh(&shape, 0.125).unwrap();
        for (i, p) in mesh.nodes().iter().enumerate() {
            if mesh.is_boundary(i) {
                let v = p[0] * p[0] + (p[1] / 0.5) * (p[1] / 0.5);
                assert!((v - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn polygon_mesh_is_conforming() {
        // Non-convex L-shape.
        let shape = CrossSectionShape::polygon(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ]);
        let mesh = generate_mesh(&shape, 0.2).unwrap();
        assert!(mesh.num_triangles() > 40);
        for t in 0..mesh.num_triangles() {
            assert!(mesh.triangle_area(t) > 0.0);
        }
        // Total area close to the exact 3.0.
        let total: f64 = (0..mesh.num_triangles()).map(|t| mesh.triangle_area(t)).sum();
        assert!((total - 3.0).abs() < 0.05, "area {total}");
    }

    #[test]
    fn mesh_too_coarse_rejected() {
        let shape = CrossSectionShape::disc(0.1, [0.0, 0.0]);
        assert!(generate_mesh(&shape, 0.5).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let shape = CrossSectionShape::disc(1.0, [0.2, 0.0]);
        let mesh = generate_mesh(&shape, 0.25).unwrap();
        let mut buf = Vec::new();
        mesh.write_text(&mut buf).unwrap();
        let back = Mesh2D::read_text(std::io::BufReader::new(buf.as_slice())).unwrap();
        assert_eq!(mesh, back);
    }

    #[test]
    fn disc_mesh_is_cyclically_symmetric() {
        let shape = CrossSectionShape::disc(1.0, [0.0, 0.0]);
        let mesh = generate_mesh(&shape, 0.2).unwrap();
        // Rotating by one azimuthal step maps the node set onto itself.
        let n_t = mesh
            .nodes()
            .iter()
            .enumerate()
            .filter(|(i, _)| mesh.is_boundary(*i))
            .count();
        let step = 2.0 * std::f64::consts::PI / n_t as f64;
        let rot = mesh.rotated(step);
        for p in rot.nodes() {
            let found = mesh
                .nodes()
                .iter()
                .any(|q| (q[0] - p[0]).abs() < 1e-9 && (q[1] - p[1]).abs() < 1e-9);
            assert!(found);
        }
    }
}
