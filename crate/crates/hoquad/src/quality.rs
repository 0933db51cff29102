//! Jacobian-based element quality and geometric fidelity metrics.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::curves::{lagrange_basis_all, lagrange_deriv_all};
use crate::geom::Point2;
use crate::high_order::{sector_certificate, HighOrderQuadMesh, QuadElement};
use crate::reconstruct::Reconstruction;
use crate::scalar::{real, Real};

/// Jacobian of the element map at a reference point, stored by columns.
#[derive(Debug, Clone, Copy)]
pub struct Jacobian<R> {
    pub d_xi: Point2<R>,
    pub d_eta: Point2<R>,
}

impl<R: Real> Jacobian<R> {
    pub fn det(&self) -> R {
        self.d_xi.cross(self.d_eta)
    }

    pub fn frobenius_sq(&self) -> R {
        self.d_xi.norm_sq() + self.d_eta.norm_sq()
    }
}

/// Evaluates the Jacobian from the Lagrange tensor form.
pub fn jacobian<R: Real>(element: &QuadElement<R>, xi: R, eta: R) -> Jacobian<R> {
    let n = element.degree;
    let bx = lagrange_basis_all(n, xi);
    let by = lagrange_basis_all(n, eta);
    let dx = lagrange_deriv_all(n, xi);
    let dy = lagrange_deriv_all(n, eta);
    let mut d_xi = Point2::zero();
    let mut d_eta = Point2::zero();
    for j in 0..=n {
        for i in 0..=n {
            let p = element.node(i, j);
            d_xi += p * (dx[i] * by[j]);
            d_eta += p * (bx[i] * dy[j]);
        }
    }
    Jacobian { d_xi, d_eta }
}

/// Shape measure `J_m = 2 det(J) / ||J||_F^2`, in [-1, 1]; 1 for a square.
/// Degenerate Jacobians report 0 with the flag set.
pub fn shape_measure<R: Real>(j: &Jacobian<R>) -> (R, bool) {
    let f2 = j.frobenius_sq();
    if f2 == R::zero() {
        return (R::zero(), true);
    }
    ((j.det() + j.det()) / f2, false)
}

/// Skew measure `J_k = det(J) / (|j1| |j2|)`: orthogonality only.
pub fn skew_measure<R: Real>(j: &Jacobian<R>) -> (R, bool) {
    let denom = j.d_xi.norm() * j.d_eta.norm();
    if denom == R::zero() {
        return (R::zero(), true);
    }
    (j.det() / denom, false)
}

/// 10-point Gauss-Lobatto abscissae on [0, 1].
///
/// The interior nodes are the roots of the derivative of the degree-9
/// Legendre polynomial, found by Newton iteration and cached.
pub fn gauss_lobatto_10<R: Real>() -> Vec<R> {
    static CACHE: OnceLock<[f64; 10]> = OnceLock::new();
    let nodes = CACHE.get_or_init(|| {
        // Legendre values and first/second derivatives of P_9.
        let p_and_dp = |x: f64| -> (f64, f64, f64) {
            let mut p_prev = 1.0; // P_0
            let mut p = x; // P_1
            for k in 2..=9u32 {
                let kf = k as f64;
                let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
                p_prev = p;
                p = next;
            }
            // P'_9 and P''_9 via the standard relations.
            let dp = 9.0 * (x * p - p_prev) / (x * x - 1.0);
            let ddp = (2.0 * x * dp - 90.0 * p) / (1.0 - x * x);
            (p, dp, ddp)
        };
        let mut out = [0.0f64; 10];
        out[0] = -1.0;
        out[9] = 1.0;
        for k in 1..=8 {
            // Chebyshev-Gauss-Lobatto initial guess.
            let mut x = -(std::f64::consts::PI * k as f64 / 9.0).cos();
            for _ in 0..60 {
                let (_, dp, ddp) = p_and_dp(x);
                let step = dp / ddp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            out[k] = x;
        }
        out
    });
    nodes.iter().map(|&x| real::<R>(0.5 * (x + 1.0))).collect()
}

/// Per-element quality statistics over the 10x10 Gauss-Lobatto grid.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ElementQuality {
    pub min_jm: f64,
    pub avg_jm: f64,
    pub min_jk: f64,
    pub avg_jk: f64,
    pub certified: bool,
}

/// Evaluates the shape and skew measures of one element at the 100
/// Gauss-Lobatto points (corners and edges included, where extrema live).
pub fn evaluate_element<R: Real>(element: &QuadElement<R>) -> ElementQuality {
    let pts = gauss_lobatto_10::<R>();
    let mut min_jm = f64::INFINITY;
    let mut min_jk = f64::INFINITY;
    let mut sum_jm = 0.0;
    let mut sum_jk = 0.0;
    for eta in &pts {
        for xi in &pts {
            let j = jacobian(element, *xi, *eta);
            let (jm, _) = shape_measure(&j);
            let (jk, _) = skew_measure(&j);
            let jm = jm.to_f64().expect("finite");
            let jk = jk.to_f64().expect("finite");
            min_jm = min_jm.min(jm);
            min_jk = min_jk.min(jk);
            sum_jm += jm;
            sum_jk += jk;
        }
    }
    let count = (pts.len() * pts.len()) as f64;
    ElementQuality {
        min_jm,
        avg_jm: sum_jm / count,
        min_jk,
        avg_jk: sum_jk / count,
        certified: false,
    }
}

/// Number of singular vertices.
///
/// Interior vertices are singular when their edge valence differs from 4.
/// Boundary/interface vertices (endpoints of tagged edges) use the
/// corner-adjusted rule: singular when the valence is outside {2, 3}.
/// `interior_only` restricts the count to interior vertices.
pub fn count_singular<R: Real>(mesh: &HighOrderQuadMesh<R>, interior_only: bool) -> usize {
    let mut valence: BTreeMap<usize, std::collections::BTreeSet<usize>> = BTreeMap::new();
    let mut edge_quads: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for c in &mesh.corners {
        for k in 0..4 {
            let (a, b) = (c[k], c[(k + 1) % 4]);
            valence.entry(a).or_default().insert(b);
            valence.entry(b).or_default().insert(a);
            *edge_quads.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    // Boundary/interface vertices: endpoints of tagged edges or of edges
    // with a single adjacent quad.
    let mut on_line: std::collections::BTreeSet<usize> = Default::default();
    for (a, b) in mesh.edge_tags.keys() {
        on_line.insert(*a);
        on_line.insert(*b);
    }
    for (&(a, b), &count) in &edge_quads {
        if count == 1 {
            on_line.insert(a);
            on_line.insert(b);
        }
    }
    let mut n_s = 0usize;
    for (v, nbrs) in &valence {
        let val = nbrs.len();
        if on_line.contains(v) {
            if !interior_only && !(val == 2 || val == 3) {
                n_s += 1;
            }
        } else if val != 4 {
            n_s += 1;
        }
    }
    n_s
}

/// Worst certified curve-approximation bound divided by the input
/// bounding-box diagonal.
pub fn relative_geometric_error<R: Real>(rec: &Reconstruction<R>) -> f64 {
    let diag = rec.bbox_diag.to_f64().expect("finite");
    if diag == 0.0 {
        return 0.0;
    }
    rec.max_bound().to_f64().expect("finite") / diag
}

/// Global quality summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlobalQuality {
    pub min_jm: f64,
    pub avg_jm: f64,
    pub min_jk: f64,
    pub avg_jk: f64,
    pub n_singular: usize,
    pub b_e: f64,
    pub element_count: usize,
    pub inverted_elements: usize,
    pub certified_elements: usize,
    /// Children whose linear corners inverted during midpoint projection.
    pub flagged_after_projection: usize,
    pub wall_time_seconds: f64,
}

/// Full quality report; `avg` values are plain means over all sample points
/// of all elements.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QualityReport {
    pub per_element: Vec<ElementQuality>,
    pub global: GlobalQuality,
    pub stage_seconds: BTreeMap<String, f64>,
}

/// Evaluates every element, runs the validity certificate, and aggregates.
pub fn assess<R: Real>(mesh: &HighOrderQuadMesh<R>, rec: &Reconstruction<R>) -> QualityReport {
    let mut per_element = Vec::with_capacity(mesh.element_count());
    let mut min_jm = f64::INFINITY;
    let mut min_jk = f64::INFINITY;
    let mut sum_jm = 0.0;
    let mut sum_jk = 0.0;
    let mut inverted = 0usize;
    let mut certified = 0usize;
    for e in 0..mesh.element_count() {
        let elem = mesh.element(e);
        let mut q = evaluate_element(&elem);
        q.certified = sector_certificate(&elem).is_valid();
        if q.certified {
            certified += 1;
        }
        if q.min_jm <= 0.0 {
            inverted += 1;
        }
        min_jm = min_jm.min(q.min_jm);
        min_jk = min_jk.min(q.min_jk);
        sum_jm += q.avg_jm;
        sum_jk += q.avg_jk;
        per_element.push(q);
    }
    let count = per_element.len().max(1) as f64;
    QualityReport {
        global: GlobalQuality {
            min_jm,
            avg_jm: sum_jm / count,
            min_jk,
            avg_jk: sum_jk / count,
            n_singular: count_singular(mesh, false),
            b_e: relative_geometric_error(rec),
            element_count: per_element.len(),
            inverted_elements: inverted,
            certified_elements: certified,
            flagged_after_projection: 0,
            wall_time_seconds: 0.0,
        },
        per_element,
        stage_seconds: BTreeMap::new(),
    }
}
