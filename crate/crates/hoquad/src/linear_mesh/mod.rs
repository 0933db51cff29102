//! Linear quadrilateral meshing: constrained triangulation of the
//! reconstructed chords, dual-graph matching with the interface penalty,
//! triangle merging and global midpoint subdivision with curve projection.

mod cdt;
pub mod matching;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geom::{orient2d, Point2};
use crate::network::SegmentTag;
use crate::reconstruct::{PieceId, Reconstruction};
use crate::scalar::{real, Real};
use cdt::Cdt;
use matching::DualEdge;

/// Tag of a mesh edge lying on a reconstructed curve piece. Edges absent
/// from the tag map are interior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeTag {
    pub kind: SegmentTag,
    pub piece: PieceId,
    /// After midpoint subdivision: which arc-length half of the piece this
    /// sub-edge covers.
    pub half: Option<u8>,
    /// Whether the canonical (min, max) vertex order runs along increasing
    /// arc length of the piece.
    pub forward: bool,
}

/// Straight-sided mesh with boundary/interface tags and region labels.
#[derive(Debug, Clone)]
pub struct LinearMesh<R> {
    pub vertices: Vec<Point2<R>>,
    pub tris: Vec<[usize; 3]>,
    pub tri_region: Vec<usize>,
    pub quads: Vec<[usize; 4]>,
    pub quad_region: Vec<usize>,
    pub edge_tags: BTreeMap<(usize, usize), EdgeTag>,
    /// Quads whose linear corners inverted after midpoint projection;
    /// reported, not silently accepted.
    pub flagged_inverted: Vec<usize>,
}

#[inline]
fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl<R: Real> LinearMesh<R> {
    pub fn is_tagged(&self, a: usize, b: usize) -> bool {
        self.edge_tags.contains_key(&edge_key(a, b))
    }

    pub fn tag(&self, a: usize, b: usize) -> Option<&EdgeTag> {
        self.edge_tags.get(&edge_key(a, b))
    }

    /// Counts tagged edges of an element given by its vertex loop.
    pub fn tagged_edge_count(&self, verts: &[usize]) -> usize {
        (0..verts.len())
            .filter(|&i| self.is_tagged(verts[i], verts[(i + 1) % verts.len()]))
            .count()
    }
}

/// Bilinear corner shape quality of a quadrilateral: 1 for a square,
/// 0 for a degenerate or inverted element.
pub fn linear_quad_quality<R: Real>(q: [Point2<R>; 4]) -> Result<R> {
    for i in 0..4 {
        for j in i + 1..4 {
            if q[i] == q[j] {
                return Err(Error::Degenerate(
                    "quadrilateral has repeated vertices".into(),
                ));
            }
        }
    }
    let mut beta = R::one();
    for k in 0..4 {
        let e1 = q[(k + 1) % 4] - q[k];
        let e2 = q[(k + 3) % 4] - q[k];
        let det = e1.cross(e2);
        let denom = e1.norm_sq() + e2.norm_sq();
        let corner = if denom > R::zero() {
            (det + det) / denom
        } else {
            R::zero()
        };
        beta = beta.min(corner);
    }
    Ok(beta.max(R::zero()).min(R::one()))
}

/// Vertex ids of all reconstruction joints, shared at network junctions.
struct JointVertexTable {
    /// vid per (chain, joint index)
    per_chain: Vec<Vec<usize>>,
}

fn build_vertices<R: Real>(rec: &Reconstruction<R>) -> (Vec<Point2<R>>, JointVertexTable) {
    let mut vertices: Vec<Point2<R>> = Vec::new();
    let mut net_vid: BTreeMap<usize, usize> = BTreeMap::new();
    let mut per_chain = Vec::with_capacity(rec.chains.len());
    for chain in &rec.chains {
        let last = chain.joints.len() - 1;
        let mut vids = Vec::with_capacity(chain.joints.len());
        for (ji, joint) in chain.joints.iter().enumerate() {
            let net = if chain.closed {
                None
            } else if ji == 0 {
                chain.start_joint_net
            } else if ji == last {
                chain.end_joint_net
            } else {
                None
            };
            let vid = match net {
                Some(nj) => *net_vid.entry(nj).or_insert_with(|| {
                    vertices.push(chain.source.point_at(joint.s));
                    vertices.len() - 1
                }),
                None => {
                    vertices.push(chain.source.point_at(joint.s));
                    vertices.len() - 1
                }
            };
            vids.push(vid);
        }
        per_chain.push(vids);
    }
    (vertices, JointVertexTable { per_chain })
}

/// Chord endpoints (vertex ids) of piece `pi` on chain `ci`.
fn chord_of<R: Real>(
    rec: &Reconstruction<R>,
    table: &JointVertexTable,
    ci: usize,
    pi: usize,
) -> (usize, usize) {
    let chain = &rec.chains[ci];
    let j0 = pi;
    let j1 = if chain.closed {
        (pi + 1) % chain.joints.len()
    } else {
        pi + 1
    };
    (table.per_chain[ci][j0], table.per_chain[ci][j1])
}

/// Constrained Delaunay triangulation of every region with interior
/// refinement toward an edge length of `2*lt`. Every reconstructed chord
/// appears as a tagged mesh edge.
pub fn triangulate<R: Real>(rec: &Reconstruction<R>, lt: R) -> Result<LinearMesh<R>> {
    let (mut vertices, table) = build_vertices(rec);

    // Tag every chord edge.
    let mut edge_tags: BTreeMap<(usize, usize), EdgeTag> = BTreeMap::new();
    for (ci, chain) in rec.chains.iter().enumerate() {
        for pi in 0..chain.pieces.len() {
            let (va, vb) = chord_of(rec, &table, ci, pi);
            if va == vb {
                return Err(Error::GeometryMismatch(format!(
                    "degenerate chord on chain {ci} piece {pi}"
                )));
            }
            let key = edge_key(va, vb);
            edge_tags.insert(
                key,
                EdgeTag {
                    kind: chain.tag,
                    piece: PieceId { chain: ci, piece: pi },
                    half: None,
                    forward: key.0 == va,
                },
            );
        }
    }

    // Region ids in deterministic order.
    let mut region_ids: Vec<usize> = rec.loop_runs.iter().map(|lr| lr.region).collect();
    region_ids.sort_unstable();
    region_ids.dedup();

    let mut tris: Vec<[usize; 3]> = Vec::new();
    let mut tri_region: Vec<usize> = Vec::new();

    for &rid in &region_ids {
        // Chord loops of this region (global vertex ids, in traversal order).
        let mut loops: Vec<Vec<usize>> = Vec::new();
        for lr in rec.loop_runs.iter().filter(|lr| lr.region == rid) {
            let mut lp: Vec<usize> = Vec::new();
            for &(chain_id, forward) in &lr.runs {
                let ci = chain_id.0;
                let m = rec.chains[ci].pieces.len();
                for k in 0..m {
                    let pi = if forward { k } else { m - 1 - k };
                    let (va, vb) = chord_of(rec, &table, ci, pi);
                    let v = if forward { va } else { vb };
                    // Avoid duplicating junction vertices between runs.
                    if lp.last() != Some(&v) {
                        lp.push(v);
                    }
                }
            }
            if lp.first() == lp.last() && lp.len() > 1 {
                lp.pop();
            }
            if lp.len() < 3 {
                return Err(Error::GeometryMismatch(format!(
                    "region {rid} has a loop with fewer than 3 chord vertices"
                )));
            }
            loops.push(lp);
        }

        // Local point set for this region's triangulation.
        let mut local_of: BTreeMap<usize, usize> = BTreeMap::new();
        let mut local_pts: Vec<Point2<R>> = Vec::new();
        for lp in &loops {
            for &v in lp {
                local_of.entry(v).or_insert_with(|| {
                    local_pts.push(vertices[v]);
                    local_pts.len() - 1
                });
            }
        }
        let n_boundary = local_pts.len();
        let mut tri = Cdt::new(&local_pts)
            .map_err(|e| e.in_stage("triangulation"))?;
        for lp in &loops {
            for k in 0..lp.len() {
                let a = local_of[&lp[k]];
                let b = local_of[&lp[(k + 1) % lp.len()]];
                tri.insert_constraint(a, b)
                    .map_err(|e| e.in_stage("triangulation"))?;
            }
        }
        let loop_polys: Vec<Vec<Point2<R>>> = loops
            .iter()
            .map(|lp| lp.iter().map(|&v| vertices[v]).collect())
            .collect();
        tri.classify_region(&loop_polys);
        tri.refine(lt + lt).map_err(|e| e.in_stage("triangulation"))?;

        // Map back to global ids; refinement points get fresh ids.
        let mut global_of_local: Vec<usize> = vec![usize::MAX; tri.pts.len()];
        for (&gv, &lv) in &local_of {
            global_of_local[lv] = gv;
        }
        for (v, _) in tri.export() {
            let mut gv = [0usize; 3];
            for (k, &lv) in v.iter().enumerate() {
                if global_of_local[lv] == usize::MAX {
                    debug_assert!(lv >= n_boundary);
                    vertices.push(tri.pts[lv]);
                    global_of_local[lv] = vertices.len() - 1;
                }
                gv[k] = global_of_local[lv];
            }
            tris.push(gv);
            tri_region.push(rid);
        }
    }

    // Sanity: every chord must be present as a triangle edge.
    let mut present: BTreeMap<(usize, usize), ()> = BTreeMap::new();
    for t in &tris {
        for i in 0..3 {
            present.insert(edge_key(t[i], t[(i + 1) % 3]), ());
        }
    }
    for key in edge_tags.keys() {
        if !present.contains_key(key) {
            return Err(Error::Internal(format!(
                "chord edge {key:?} missing from the triangulation"
            )));
        }
    }

    Ok(LinearMesh {
        vertices,
        tris,
        tri_region,
        quads: Vec::new(),
        quad_region: Vec::new(),
        edge_tags,
        flagged_inverted: Vec::new(),
    })
}

/// Fans triangles that own two or more tagged edges around their incenter.
/// Such triangles would subdivide into quads with two tagged edges, which
/// the modified blossom-quad construction must rule out.
pub fn split_double_tagged_triangles<R: Real>(mesh: &mut LinearMesh<R>) {
    let mut i = 0;
    while i < mesh.tris.len() {
        let t = mesh.tris[i];
        if mesh.tagged_edge_count(&t) < 2 {
            i += 1;
            continue;
        }
        let a = mesh.vertices[t[0]];
        let b = mesh.vertices[t[1]];
        let c = mesh.vertices[t[2]];
        let la = b.dist(c);
        let lb = c.dist(a);
        let lc = a.dist(b);
        let inc = (a * la + b * lb + c * lc) / (la + lb + lc);
        mesh.vertices.push(inc);
        let v = mesh.vertices.len() - 1;
        let rid = mesh.tri_region[i];
        mesh.tris[i] = [t[0], t[1], v];
        mesh.tris.push([t[1], t[2], v]);
        mesh.tri_region.push(rid);
        mesh.tris.push([t[2], t[0], v]);
        mesh.tri_region.push(rid);
        i += 1;
    }
}

/// Builds the triangle dual graph (dual edges never cross tagged edges)
/// and returns the minimum-cost maximum-cardinality matching.
pub fn build_dual_and_match<R: Real>(mesh: &LinearMesh<R>) -> Vec<Option<usize>> {
    let edges = dual_edges(mesh);
    matching::min_cost_max_cardinality(mesh.tris.len(), &edges)
}

/// Dual edges with the modified blossom-quad cost
/// `(1 - beta(q)) + zeta(q)`.
pub fn dual_edges<R: Real>(mesh: &LinearMesh<R>) -> Vec<DualEdge<R>> {
    let mut by_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (ti, t) in mesh.tris.iter().enumerate() {
        for i in 0..3 {
            by_edge
                .entry(edge_key(t[i], t[(i + 1) % 3]))
                .or_default()
                .push(ti);
        }
    }
    let mut edges = Vec::new();
    for (key, ts) in &by_edge {
        if ts.len() != 2 || mesh.edge_tags.contains_key(key) {
            continue;
        }
        let (t1, t2) = (ts[0], ts[1]);
        if mesh.tri_region[t1] != mesh.tri_region[t2] {
            continue;
        }
        let Some(q) = merged_quad(mesh, t1, t2) else {
            continue;
        };
        let beta = match linear_quad_quality([
            mesh.vertices[q[0]],
            mesh.vertices[q[1]],
            mesh.vertices[q[2]],
            mesh.vertices[q[3]],
        ]) {
            Ok(b) => b,
            Err(_) => continue,
        };
        let zeta = if mesh.tagged_edge_count(&q) >= 2 {
            real::<R>(10_000.0)
        } else {
            R::zero()
        };
        edges.push(DualEdge {
            a: t1,
            b: t2,
            cost: (R::one() - beta) + zeta,
        });
    }
    edges
}

/// Vertex loop of the quad formed by merging two triangles across their
/// shared edge: (o1, a, o2, b) in counterclockwise order.
fn merged_quad<R: Real>(mesh: &LinearMesh<R>, t1: usize, t2: usize) -> Option<[usize; 4]> {
    let v1 = mesh.tris[t1];
    let v2 = mesh.tris[t2];
    for i in 0..3 {
        let a = v1[i];
        let b = v1[(i + 1) % 3];
        for j in 0..3 {
            if v2[j] == b && v2[(j + 1) % 3] == a {
                let o1 = v1[(i + 2) % 3];
                let o2 = v2[(j + 2) % 3];
                return Some([o1, a, o2, b]);
            }
        }
    }
    None
}

/// Merges matched pairs into quads (pairs that would own two tagged edges
/// are left unmerged), then applies global midpoint subdivision with tagged
/// midpoints placed at the arc-length midpoints of their curve pieces.
pub fn merge_and_subdivide<R: Real>(
    mesh: &LinearMesh<R>,
    mates: &[Option<usize>],
    rec: &Reconstruction<R>,
) -> Result<LinearMesh<R>> {
    enum Face {
        Quad([usize; 4]),
        Tri([usize; 3]),
    }
    let mut faces: Vec<(Face, usize)> = Vec::new();
    let mut consumed = vec![false; mesh.tris.len()];
    for t1 in 0..mesh.tris.len() {
        if consumed[t1] {
            continue;
        }
        match mates.get(t1).copied().flatten() {
            Some(t2) if t2 > t1 && !consumed[t2] => {
                let q = merged_quad(mesh, t1, t2)
                    .ok_or_else(|| Error::Internal("matched pair shares no edge".into()))?;
                consumed[t1] = true;
                consumed[t2] = true;
                if mesh.tagged_edge_count(&q) >= 2 {
                    // Modified blossom-quad guarantee: a quad with two
                    // boundary/interface edges degenerates after curving.
                    faces.push((Face::Tri(mesh.tris[t1]), mesh.tri_region[t1]));
                    faces.push((Face::Tri(mesh.tris[t2]), mesh.tri_region[t2]));
                } else {
                    faces.push((Face::Quad(q), mesh.tri_region[t1]));
                }
            }
            _ => {
                consumed[t1] = true;
                faces.push((Face::Tri(mesh.tris[t1]), mesh.tri_region[t1]));
            }
        }
    }

    let mut vertices = mesh.vertices.clone();
    let mut edge_tags: BTreeMap<(usize, usize), EdgeTag> = BTreeMap::new();
    let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();

    let mut midpoint_of = |a: usize,
                           b: usize,
                           vertices: &mut Vec<Point2<R>>,
                           edge_tags: &mut BTreeMap<(usize, usize), EdgeTag>|
     -> usize {
        let key = edge_key(a, b);
        if let Some(&m) = midpoint.get(&key) {
            return m;
        }
        let (pos, tag) = match mesh.edge_tags.get(&key) {
            Some(tag) => {
                let piece = &rec.chains[tag.piece.chain].pieces[tag.piece.piece];
                let (p, _) = piece.bez.arc_midpoint();
                (p, Some(*tag))
            }
            None => (vertices[a].midpoint(vertices[b]), None),
        };
        vertices.push(pos);
        let m = vertices.len() - 1;
        midpoint.insert(key, m);
        if let Some(tag) = tag {
            // Split the tag into the two arc-length halves. The half that
            // touches the piece-start vertex is half 0.
            let start_vertex = if tag.forward { key.0 } else { key.1 };
            for end in [key.0, key.1] {
                let sub = edge_key(end, m);
                let is_start_side = end == start_vertex;
                // Increasing arc length runs from the old vertex toward the
                // midpoint on the start half, and from the midpoint toward
                // the old vertex on the end half.
                let forward = if is_start_side {
                    sub.0 == end
                } else {
                    sub.0 == m
                };
                edge_tags.insert(
                    sub,
                    EdgeTag {
                        kind: tag.kind,
                        piece: tag.piece,
                        half: Some(if is_start_side { 0 } else { 1 }),
                        forward,
                    },
                );
            }
        }
        m
    };

    let mut quads: Vec<[usize; 4]> = Vec::new();
    let mut quad_region: Vec<usize> = Vec::new();
    let mut flagged: Vec<usize> = Vec::new();

    for (face, rid) in &faces {
        match face {
            Face::Quad(q) => {
                let m01 = midpoint_of(q[0], q[1], &mut vertices, &mut edge_tags);
                let m12 = midpoint_of(q[1], q[2], &mut vertices, &mut edge_tags);
                let m23 = midpoint_of(q[2], q[3], &mut vertices, &mut edge_tags);
                let m30 = midpoint_of(q[3], q[0], &mut vertices, &mut edge_tags);
                let c = (vertices[q[0]] + vertices[q[1]] + vertices[q[2]] + vertices[q[3]])
                    / real(4.0);
                vertices.push(c);
                let cid = vertices.len() - 1;
                for child in [
                    [q[0], m01, cid, m30],
                    [q[1], m12, cid, m01],
                    [q[2], m23, cid, m12],
                    [q[3], m30, cid, m23],
                ] {
                    push_child(child, *rid, &vertices, &mut quads, &mut quad_region, &mut flagged);
                }
            }
            Face::Tri(t) => {
                let m01 = midpoint_of(t[0], t[1], &mut vertices, &mut edge_tags);
                let m12 = midpoint_of(t[1], t[2], &mut vertices, &mut edge_tags);
                let m20 = midpoint_of(t[2], t[0], &mut vertices, &mut edge_tags);
                let c = (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / real(3.0);
                vertices.push(c);
                let cid = vertices.len() - 1;
                for child in [
                    [t[0], m01, cid, m20],
                    [t[1], m12, cid, m01],
                    [t[2], m20, cid, m12],
                ] {
                    push_child(child, *rid, &vertices, &mut quads, &mut quad_region, &mut flagged);
                }
            }
        }
    }

    Ok(LinearMesh {
        vertices,
        tris: Vec::new(),
        tri_region: Vec::new(),
        quads,
        quad_region,
        edge_tags,
        flagged_inverted: flagged,
    })
}

fn push_child<R: Real>(
    child: [usize; 4],
    rid: usize,
    vertices: &[Point2<R>],
    quads: &mut Vec<[usize; 4]>,
    quad_region: &mut Vec<usize>,
    flagged: &mut Vec<usize>,
) {
    let area_ok = {
        let p = [
            vertices[child[0]],
            vertices[child[1]],
            vertices[child[2]],
            vertices[child[3]],
        ];
        let two_a = p[0].cross(p[1]) + p[1].cross(p[2]) + p[2].cross(p[3]) + p[3].cross(p[0]);
        two_a > R::zero()
    };
    quads.push(child);
    quad_region.push(rid);
    if !area_ok {
        flagged.push(quads.len() - 1);
    }
}

/// Signed area of element `verts`.
pub fn element_area<R: Real>(vertices: &[Point2<R>], verts: &[usize]) -> R {
    let mut s = R::zero();
    for i in 0..verts.len() {
        let a = vertices[verts[i]];
        let b = vertices[verts[(i + 1) % verts.len()]];
        s += a.cross(b);
    }
    s / real(2.0)
}

/// Orientation helper used by tests: all triangles counterclockwise.
pub fn all_ccw<R: Real>(mesh: &LinearMesh<R>) -> bool {
    mesh.tris.iter().all(|t| {
        orient2d(
            mesh.vertices[t[0]],
            mesh.vertices[t[1]],
            mesh.vertices[t[2]],
        ) > R::zero()
    }) && mesh
        .quads
        .iter()
        .all(|q| element_area(&mesh.vertices, q) > R::zero())
}

#[cfg(test)]
mod tests;
