//! High-order lifting: equidistant-node degree elevation, boundary and
//! interface node snapping onto the reconstructed curves, composite
//! mean-value interior deformation and the sector validity certificate.

pub mod mvc;

use std::collections::BTreeMap;

use crate::curves::{bernstein_all, lagrange_basis_all, solve};
use crate::error::{Error, Result};
use crate::geom::{BBox, Point2, Sector};
use crate::linear_mesh::{EdgeTag, LinearMesh};
use crate::reconstruct::Reconstruction;
use crate::scalar::{real, Real};

/// One curved quadrilateral element as a value: a degree-n tensor grid of
/// Lagrange nodes `P_ij` at uniform reference positions, `(i, j)` stored as
/// `i + j*(n+1)`.
#[derive(Debug, Clone)]
pub struct QuadElement<R> {
    pub degree: usize,
    pub nodes: Vec<Point2<R>>,
}

impl<R: Real> QuadElement<R> {
    pub fn new(degree: usize, nodes: Vec<Point2<R>>) -> Result<Self> {
        if nodes.len() != (degree + 1) * (degree + 1) {
            return Err(Error::InvalidArgument(format!(
                "degree-{degree} element needs {} nodes, got {}",
                (degree + 1) * (degree + 1),
                nodes.len()
            )));
        }
        Ok(Self { degree, nodes })
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> Point2<R> {
        self.nodes[i + j * (self.degree + 1)]
    }

    /// Evaluates the tensor-product Lagrange map at `(xi, eta)`.
    pub fn eval(&self, xi: R, eta: R) -> Point2<R> {
        let n = self.degree;
        let bx = lagrange_basis_all(n, xi);
        let by = lagrange_basis_all(n, eta);
        let mut p = Point2::zero();
        for j in 0..=n {
            for i in 0..=n {
                p += self.node(i, j) * (bx[i] * by[j]);
            }
        }
        p
    }

    /// Element diameter as the corner bounding-box diagonal.
    pub fn diameter(&self) -> R {
        BBox::from_points(self.nodes.iter()).diag()
    }

    /// Boundary polygon: the 4n edge and corner nodes in counterclockwise
    /// order starting at the (0,0) corner.
    pub fn boundary_polygon(&self) -> Vec<Point2<R>> {
        let n = self.degree;
        let mut poly = Vec::with_capacity(4 * n);
        for i in 0..n {
            poly.push(self.node(i, 0));
        }
        for j in 0..n {
            poly.push(self.node(n, j));
        }
        for i in 0..n {
            poly.push(self.node(n - i, n));
        }
        for j in 0..n {
            poly.push(self.node(0, n - j));
        }
        poly
    }

    /// Interior (face) node indices of the grid.
    pub fn interior_indices(&self) -> Vec<(usize, usize)> {
        let n = self.degree;
        let mut out = Vec::new();
        for j in 1..n {
            for i in 1..n {
                out.push((i, j));
            }
        }
        out
    }

    /// The equivalent Bézier control net `Q_ij` (same layout).
    pub fn bezier_ctrl(&self) -> Vec<Point2<R>> {
        let n = self.degree;
        let m: Vec<Vec<R>> = (0..=n)
            .map(|k| bernstein_all(n, real::<R>(k as f64 / n as f64)))
            .collect();
        // P = M Q M^T: solve along eta (columns), then along xi (rows).
        let mut inter = vec![Point2::zero(); (n + 1) * (n + 1)];
        for i in 0..=n {
            let col: Vec<Point2<R>> = (0..=n).map(|j| self.node(i, j)).collect();
            for (j, q) in solve::solve_points(&m, &col).into_iter().enumerate() {
                inter[i + j * (n + 1)] = q;
            }
        }
        let mut ctrl = vec![Point2::zero(); (n + 1) * (n + 1)];
        for j in 0..=n {
            let row: Vec<Point2<R>> = (0..=n).map(|i| inter[i + j * (n + 1)]).collect();
            for (i, q) in solve::solve_points(&m, &row).into_iter().enumerate() {
                ctrl[i + j * (n + 1)] = q;
            }
        }
        ctrl
    }

    /// Evaluates the Bernstein tensor form (for conversion checks).
    pub fn eval_bezier(&self, ctrl: &[Point2<R>], xi: R, eta: R) -> Point2<R> {
        let n = self.degree;
        let bx = bernstein_all(n, xi);
        let by = bernstein_all(n, eta);
        let mut p = Point2::zero();
        for j in 0..=n {
            for i in 0..=n {
                p += ctrl[i + j * (n + 1)] * (bx[i] * by[j]);
            }
        }
        p
    }
}

/// Validity certificate from the control-vector sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// Sectors are disjoint and separated by a line: the map is injective
    /// with positive Jacobian.
    Valid,
    /// The sufficient condition failed; the element may still be fine.
    Inconclusive(&'static str),
}

impl Certificate {
    pub fn is_valid(&self) -> bool {
        matches!(self, Certificate::Valid)
    }
}

/// Angular sectors of the 0- and 1-direction control vectors.
#[derive(Debug, Clone)]
pub struct ControlVectorSectors<R> {
    pub r0: Option<Sector<R>>,
    pub r1: Option<Sector<R>>,
    pub had_zero_vectors: bool,
}

/// Computes the control-vector sectors of an element's Bézier net.
///
/// The 0-vectors span `Q_(i+1)j - Q_ij` over all `j` rows (the ranges the
/// Jacobian convex-combination argument actually needs), and symmetrically
/// for the 1-vectors.
pub fn control_vector_sectors<R: Real>(element: &QuadElement<R>) -> ControlVectorSectors<R> {
    let n = element.degree;
    let ctrl = element.bezier_ctrl();
    let at = |i: usize, j: usize| ctrl[i + j * (n + 1)];
    let mut d0 = Vec::with_capacity(n * (n + 1));
    let mut d1 = Vec::with_capacity(n * (n + 1));
    for j in 0..=n {
        for i in 0..n {
            d0.push(at(i + 1, j) - at(i, j));
        }
    }
    for j in 0..n {
        for i in 0..=n {
            d1.push(at(i, j + 1) - at(i, j));
        }
    }
    let had_zero = d0.iter().chain(&d1).any(|v| v.norm() == R::zero());
    let nonzero = |v: &Vec<Point2<R>>| -> Vec<Point2<R>> {
        v.iter().copied().filter(|d| d.norm() > R::zero()).collect()
    };
    ControlVectorSectors {
        r0: Sector::span_of(&nonzero(&d0)),
        r1: Sector::span_of(&nonzero(&d1)),
        had_zero_vectors: had_zero,
    }
}

/// Sufficient validity check: both sectors exist, are disjoint, and a line
/// separates the plane with both sectors strictly on one side (their common
/// angular hull stays below pi). Zero control vectors are skipped for the
/// sector spans but downgrade the result to inconclusive, since the
/// convex-combination argument can then vanish on the element boundary.
pub fn sector_certificate<R: Real>(element: &QuadElement<R>) -> Certificate {
    let s = control_vector_sectors(element);
    let (Some(r0), Some(r1)) = (s.r0, s.r1) else {
        return Certificate::Inconclusive("all control vectors degenerate");
    };
    if matches!(r0, Sector::Full) || matches!(r1, Sector::Full) {
        return Certificate::Inconclusive("sector spans a half-plane or more");
    }
    if r0.intersects(&r1) {
        return Certificate::Inconclusive("sectors intersect");
    }
    if r0.hull(&r1).is_none() {
        return Certificate::Inconclusive("no separating line");
    }
    if s.had_zero_vectors {
        return Certificate::Inconclusive("zero control vector");
    }
    Certificate::Valid
}

/// Degree-n tensor quadrilateral mesh with a shared node table.
#[derive(Debug, Clone)]
pub struct HighOrderQuadMesh<R> {
    pub degree: usize,
    pub nodes: Vec<Point2<R>>,
    /// `(n+1)^2` node ids per element, `(i, j) -> i + j*(n+1)`.
    pub elements: Vec<Vec<usize>>,
    pub regions: Vec<usize>,
    /// Corner-pair keyed tags carried over from the linear mesh.
    pub edge_tags: BTreeMap<(usize, usize), EdgeTag>,
    /// Linear corner ids per element (v0..v3, counterclockwise).
    pub corners: Vec<[usize; 4]>,
}

impl<R: Real> HighOrderQuadMesh<R> {
    pub fn element(&self, e: usize) -> QuadElement<R> {
        QuadElement {
            degree: self.degree,
            nodes: self.elements[e].iter().map(|&v| self.nodes[v]).collect(),
        }
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    /// Whether any edge of element `e` is tagged.
    pub fn element_is_tagged(&self, e: usize) -> bool {
        let c = self.corners[e];
        (0..4).any(|k| {
            self.edge_tags
                .contains_key(&edge_key(c[k], c[(k + 1) % 4]))
        })
    }

    /// Node ids along local edge `k` (between corners k and k+1), in local
    /// direction, including both corner nodes.
    pub fn edge_node_ids(&self, e: usize, k: usize) -> Vec<usize> {
        let n = self.degree;
        let ids = &self.elements[e];
        let grid = |i: usize, j: usize| ids[i + j * (n + 1)];
        match k {
            0 => (0..=n).map(|i| grid(i, 0)).collect(),
            1 => (0..=n).map(|j| grid(n, j)).collect(),
            2 => (0..=n).map(|i| grid(n - i, n)).collect(),
            _ => (0..=n).map(|j| grid(0, n - j)).collect(),
        }
    }
}

#[inline]
fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Places `(n+1)^2` nodes per quad at uniform bilinear reference positions.
/// The element geometry equals the linear mesh exactly; shared edge nodes
/// are stored once.
pub fn elevate_to_order<R: Real>(mesh: &LinearMesh<R>, degree: usize) -> Result<HighOrderQuadMesh<R>> {
    if degree < 2 {
        return Err(Error::InvalidArgument(format!(
            "mesh order must be at least 2, got {degree}"
        )));
    }
    if !mesh.tris.is_empty() {
        return Err(Error::InvalidArgument(
            "high-order lifting needs a pure quad mesh".into(),
        ));
    }
    let n = degree;
    let mut nodes = mesh.vertices.clone();
    // Interior edge nodes, allocated once per undirected edge in canonical
    // (min -> max) direction.
    let mut edge_nodes: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut elements = Vec::with_capacity(mesh.quads.len());
    let mut corners = Vec::with_capacity(mesh.quads.len());
    for q in &mesh.quads {
        let mut ids = vec![usize::MAX; (n + 1) * (n + 1)];
        let grid_at = |i: usize, j: usize| i + j * (n + 1);
        // Corners.
        ids[grid_at(0, 0)] = q[0];
        ids[grid_at(n, 0)] = q[1];
        ids[grid_at(n, n)] = q[2];
        ids[grid_at(0, n)] = q[3];
        // Edges: local edge k runs corner k -> corner k+1.
        for k in 0..4 {
            let (a, b) = (q[k], q[(k + 1) % 4]);
            let key = edge_key(a, b);
            let canon = edge_nodes.entry(key).or_insert_with(|| {
                let (pa, pb) = (nodes[key.0], nodes[key.1]);
                (1..n)
                    .map(|s| {
                        nodes.push(pa.lerp(pb, real::<R>(s as f64 / n as f64)));
                        nodes.len() - 1
                    })
                    .collect()
            });
            // Interior ids in local direction a -> b.
            let locals: Vec<usize> = if key.0 == a {
                canon.clone()
            } else {
                canon.iter().rev().copied().collect()
            };
            for (s, &nid) in locals.iter().enumerate() {
                let step = s + 1;
                let (i, j) = match k {
                    0 => (step, 0),
                    1 => (n, step),
                    2 => (n - step, n),
                    _ => (0, n - step),
                };
                ids[grid_at(i, j)] = nid;
            }
        }
        // Face nodes at bilinear positions.
        let (p0, p1, p2, p3) = (
            mesh.vertices[q[0]],
            mesh.vertices[q[1]],
            mesh.vertices[q[2]],
            mesh.vertices[q[3]],
        );
        for j in 1..n {
            for i in 1..n {
                let xi = real::<R>(i as f64 / n as f64);
                let eta = real::<R>(j as f64 / n as f64);
                let p = p0 * ((R::one() - xi) * (R::one() - eta))
                    + p1 * (xi * (R::one() - eta))
                    + p2 * (xi * eta)
                    + p3 * ((R::one() - xi) * eta);
                nodes.push(p);
                ids[grid_at(i, j)] = nodes.len() - 1;
            }
        }
        debug_assert!(ids.iter().all(|&v| v != usize::MAX));
        elements.push(ids);
        corners.push([q[0], q[1], q[2], q[3]]);
    }
    Ok(HighOrderQuadMesh {
        degree,
        nodes,
        elements,
        regions: mesh.quad_region.clone(),
        edge_tags: mesh.edge_tags.clone(),
        corners,
    })
}

/// Moves interior nodes of tagged edges onto their reconstructed curve
/// pieces: node `k` of an edge goes to the arc-length fraction `k/n` of the
/// piece half the edge covers.
pub fn snap_boundary_nodes<R: Real>(
    mesh: &mut HighOrderQuadMesh<R>,
    rec: &Reconstruction<R>,
) -> Result<()> {
    let n = mesh.degree;
    if n != rec.degree {
        return Err(Error::InvalidArgument(format!(
            "mesh order {n} does not match the reconstruction degree {}",
            rec.degree
        )));
    }
    // Iterate tags once; edge interior node ids are canonical (min -> max).
    let tags: Vec<((usize, usize), EdgeTag)> =
        mesh.edge_tags.iter().map(|(k, t)| (*k, *t)).collect();
    // Locate each tagged edge's interior node ids through any element that
    // owns it.
    let mut owner: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for e in 0..mesh.elements.len() {
        let c = mesh.corners[e];
        for k in 0..4 {
            let key = edge_key(c[k], c[(k + 1) % 4]);
            owner.entry(key).or_insert((e, k));
        }
    }
    for (key, tag) in tags {
        let Some(half) = tag.half else {
            return Err(Error::Internal(
                "tagged edge without a piece half after subdivision".into(),
            ));
        };
        let Some(&(e, k)) = owner.get(&key) else {
            continue;
        };
        let piece = &rec.chains[tag.piece.chain].pieces[tag.piece.piece];
        let total = piece.bez.arclength();
        let half_len = total * real::<R>(0.5);
        let (s0, s1) = if half == 0 {
            (R::zero(), half_len)
        } else {
            (half_len, total)
        };
        let edge_ids = mesh.edge_node_ids(e, k);
        // Local direction corner k -> corner k+1; translate to canonical
        // (min -> max) then to arc direction via tag.forward.
        let local_starts_at_min = mesh.corners[e][k] == key.0;
        for s in 1..n {
            let nid = edge_ids[s];
            // Fraction along the canonical direction.
            let f_canon = if local_starts_at_min {
                s as f64 / n as f64
            } else {
                (n - s) as f64 / n as f64
            };
            let f_arc = if tag.forward { f_canon } else { 1.0 - f_canon };
            let target_s = s0 + (s1 - s0) * real::<R>(f_arc);
            let t = piece.bez.param_at_arclength(target_s);
            mesh.nodes[nid] = piece.bez.eval(t);
        }
    }
    Ok(())
}

/// Outcome of the interior deformation pass.
#[derive(Debug, Default, Clone)]
pub struct DeformStats {
    pub deformed_elements: usize,
    pub max_steps: usize,
}

/// Re-positions interior (face) nodes of every tagged element with the
/// composite mean-value mapping from the pre-snap boundary polygon to the
/// snapped one. Untagged elements never move.
pub fn deform_interiors<R: Real>(
    mesh: &mut HighOrderQuadMesh<R>,
    pre_snap_nodes: &[Point2<R>],
) -> Result<DeformStats> {
    let n = mesh.degree;
    let mut stats = DeformStats::default();
    for e in 0..mesh.elements.len() {
        if !mesh.element_is_tagged(e) {
            continue;
        }
        let elem_pre = QuadElement {
            degree: n,
            nodes: mesh.elements[e]
                .iter()
                .map(|&v| pre_snap_nodes[v])
                .collect(),
        };
        let elem_now = mesh.element(e);
        let source = elem_pre.boundary_polygon();
        let target = elem_now.boundary_polygon();
        let max_disp = source
            .iter()
            .zip(&target)
            .map(|(a, b)| a.dist(*b))
            .fold(R::zero(), |m, d| m.max(d));
        if max_disp == R::zero() {
            continue;
        }
        let diam = elem_now.diameter().max(R::min_positive_value());
        let ratio = (max_disp / (real::<R>(0.1) * diam))
            .to_f64()
            .unwrap_or(1.0);
        let steps = ratio.ceil().max(1.0) as usize;
        let interior: Vec<Point2<R>> = elem_pre
            .interior_indices()
            .iter()
            .map(|&(i, j)| elem_pre.node(i, j))
            .collect();
        if interior.is_empty() {
            continue;
        }
        let moved = mvc::composite_deform(&source, &target, &interior, steps)?;
        for (&(i, j), p) in elem_pre.interior_indices().iter().zip(moved) {
            let nid = mesh.elements[e][i + j * (n + 1)];
            mesh.nodes[nid] = p;
        }
        stats.deformed_elements += 1;
        stats.max_steps = stats.max_steps.max(steps);
    }
    Ok(stats)
}

#[cfg(test)]
mod tests;
