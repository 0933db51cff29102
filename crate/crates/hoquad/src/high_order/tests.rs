use super::*;
use crate::curves::LagrangeSegment;
use crate::linear_mesh::{
    build_dual_and_match, merge_and_subdivide, split_double_tagged_triangles, triangulate,
};
use crate::network::{CurveNetwork, NetworkSegment, Region, SegRef};
use crate::reconstruct::{reconstruct, ReconParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type P = Point2<f64>;

fn pt(x: f64, y: f64) -> P {
    P::new(x, y)
}

fn unit_square_mesh() -> LinearMesh<f64> {
    LinearMesh {
        vertices: vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)],
        tris: vec![],
        tri_region: vec![],
        quads: vec![[0, 1, 2, 3]],
        quad_region: vec![0],
        edge_tags: BTreeMap::new(),
        flagged_inverted: vec![],
    }
}

fn two_quad_mesh() -> LinearMesh<f64> {
    LinearMesh {
        vertices: vec![
            pt(0.0, 0.0),
            pt(1.0, 0.0),
            pt(2.0, 0.0),
            pt(2.0, 1.0),
            pt(1.0, 1.0),
            pt(0.0, 1.0),
        ],
        tris: vec![],
        tri_region: vec![],
        quads: vec![[0, 1, 4, 5], [1, 2, 3, 4]],
        quad_region: vec![0, 0],
        edge_tags: BTreeMap::new(),
        flagged_inverted: vec![],
    }
}

fn identity_element(n: usize) -> QuadElement<f64> {
    let nodes = (0..=n)
        .flat_map(|j| (0..=n).map(move |i| pt(i as f64 / n as f64, j as f64 / n as f64)))
        .collect();
    QuadElement::new(n, nodes).unwrap()
}

/// Jacobian determinant via the Bernstein derivative formulas, an
/// independent route from the Lagrange-basis evaluation in `quality`.
fn det_from_ctrl(elem: &QuadElement<f64>, ctrl: &[P], xi: f64, eta: f64) -> f64 {
    let n = elem.degree;
    let at = |i: usize, j: usize| ctrl[i + j * (n + 1)];
    let bx_lo = crate::curves::bernstein_all(n - 1, xi);
    let bx_hi = crate::curves::bernstein_all(n, xi);
    let by_lo = crate::curves::bernstein_all(n - 1, eta);
    let by_hi = crate::curves::bernstein_all(n, eta);
    let mut dxi = P::zero();
    for j in 0..=n {
        for i in 0..n {
            dxi += (at(i + 1, j) - at(i, j)) * (bx_lo[i] * by_hi[j] * n as f64);
        }
    }
    let mut deta = P::zero();
    for j in 0..n {
        for i in 0..=n {
            deta += (at(i, j + 1) - at(i, j)) * (bx_hi[i] * by_lo[j] * n as f64);
        }
    }
    dxi.cross(deta)
}

#[test]
fn elevation_places_nine_nodes_with_center() {
    let ho = elevate_to_order(&unit_square_mesh(), 2).unwrap();
    assert_eq!(ho.nodes.len(), 9);
    let elem = ho.element(0);
    assert_eq!(elem.node(1, 1), pt(0.5, 0.5));
    assert_eq!(elem.node(0, 0), pt(0.0, 0.0));
    assert_eq!(elem.node(2, 2), pt(1.0, 1.0));
}

#[test]
fn elevation_rejects_low_order_and_triangles() {
    assert!(elevate_to_order(&unit_square_mesh(), 1).is_err());
    let mut with_tri = unit_square_mesh();
    with_tri.tris.push([0, 1, 2]);
    with_tri.tri_region.push(0);
    assert!(elevate_to_order(&with_tri, 2).is_err());
}

#[test]
fn elevated_geometry_equals_bilinear_map() {
    // A skewed quad; the degree-3 element must reproduce the bilinear map.
    let mesh = LinearMesh {
        vertices: vec![pt(0.0, 0.0), pt(1.2, 0.1), pt(1.4, 1.3), pt(-0.2, 0.9)],
        tris: vec![],
        tri_region: vec![],
        quads: vec![[0, 1, 2, 3]],
        quad_region: vec![0],
        edge_tags: BTreeMap::new(),
        flagged_inverted: vec![],
    };
    let ho = elevate_to_order(&mesh, 3).unwrap();
    let elem = ho.element(0);
    let (p0, p1, p2, p3) = (
        mesh.vertices[0],
        mesh.vertices[1],
        mesh.vertices[2],
        mesh.vertices[3],
    );
    for a in 0..5 {
        for b in 0..5 {
            let xi = a as f64 / 4.0;
            let eta = b as f64 / 4.0;
            let bilinear = p0 * ((1.0 - xi) * (1.0 - eta))
                + p1 * (xi * (1.0 - eta))
                + p2 * (xi * eta)
                + p3 * ((1.0 - xi) * eta);
            assert!(elem.eval(xi, eta).dist(bilinear) < 1e-12);
        }
    }
}

#[test]
fn shared_edge_nodes_are_bit_identical() {
    let ho = elevate_to_order(&two_quad_mesh(), 3).unwrap();
    // Elements 0 and 1 share the edge between vertices 1 and 4.
    let e0 = ho.edge_node_ids(0, 1); // local edge v1->v4 of element 0
    let e1 = ho.edge_node_ids(1, 3); // local edge v4->v1 of element 1
    let rev: Vec<usize> = e1.iter().rev().copied().collect();
    assert_eq!(e0, rev, "same node ids, opposite traversal");
}

#[test]
fn lagrange_and_bezier_forms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for n in [2usize, 3, 4] {
        let mut elem = identity_element(n);
        for p in &mut elem.nodes {
            *p += pt(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05));
        }
        let ctrl = elem.bezier_ctrl();
        let scale = elem.diameter();
        for a in 0..=6 {
            for b in 0..=6 {
                let xi = a as f64 / 6.0;
                let eta = b as f64 / 6.0;
                let d = elem.eval(xi, eta).dist(elem.eval_bezier(&ctrl, xi, eta));
                assert!(d < 1e-12 * scale.max(1.0), "n={n}: {d}");
            }
        }
    }
}

#[test]
fn snapping_straight_pieces_is_a_noop() {
    // Square domain -> all pieces straight; snapping must not move nodes.
    let corners = [pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)];
    let segments = (0..4)
        .map(|i| NetworkSegment {
            curve: LagrangeSegment::new(vec![
                corners[i],
                corners[i].midpoint(corners[(i + 1) % 4]),
                corners[(i + 1) % 4],
            ])
            .unwrap(),
            start_joint: i,
            end_joint: (i + 1) % 4,
        })
        .collect();
    let regions = vec![Region {
        id: 0,
        loops: vec![(0..4).map(|seg| SegRef { seg, reversed: false }).collect()],
    }];
    let net = CurveNetwork::new(segments, regions).unwrap();
    let p = ReconParams {
        eps: 1e-3 * net.bbox().diag(),
        lt: 0.2,
        tau: std::f64::consts::FRAC_PI_4,
        alpha: 2.3,
        max_iterations: 20,
        lloyd_iterations: 5,
    };
    let rec = reconstruct(&net, &p).unwrap();
    let mut mesh = triangulate(&rec, p.lt).unwrap();
    split_double_tagged_triangles(&mut mesh);
    let mates = build_dual_and_match(&mesh);
    let lin = merge_and_subdivide(&mesh, &mates, &rec).unwrap();
    let mut ho = elevate_to_order(&lin, 2).unwrap();
    let before = ho.nodes.clone();
    snap_boundary_nodes(&mut ho, &rec).unwrap();
    let max_move = ho
        .nodes
        .iter()
        .zip(&before)
        .map(|(a, b)| a.dist(*b))
        .fold(0.0f64, f64::max);
    assert!(max_move < 1e-9, "straight snap moved nodes by {max_move}");
}

fn circle_net(n: usize) -> CurveNetwork<f64> {
    let segments = (0..n)
        .map(|i| {
            let a0 = std::f64::consts::TAU * i as f64 / n as f64;
            let a1 = std::f64::consts::TAU * (i + 1) as f64 / n as f64;
            let am = 0.5 * (a0 + a1);
            NetworkSegment {
                curve: LagrangeSegment::new(vec![
                    pt(a0.cos(), a0.sin()),
                    pt(am.cos(), am.sin()),
                    pt(a1.cos(), a1.sin()),
                ])
                .unwrap(),
                start_joint: i,
                end_joint: (i + 1) % n,
            }
        })
        .collect();
    let regions = vec![Region {
        id: 0,
        loops: vec![(0..n).map(|seg| SegRef { seg, reversed: false }).collect()],
    }];
    CurveNetwork::new(segments, regions).unwrap()
}

#[test]
fn snapped_boundary_follows_curved_pieces() {
    let net = circle_net(12);
    let d = net.bbox().diag();
    let p = ReconParams {
        eps: 1e-3 * d,
        lt: 0.1 * d,
        tau: std::f64::consts::FRAC_PI_4,
        alpha: 2.3,
        max_iterations: 20,
        lloyd_iterations: 5,
    };
    let rec = reconstruct(&net, &p).unwrap();
    let mut mesh = triangulate(&rec, p.lt).unwrap();
    split_double_tagged_triangles(&mut mesh);
    let mates = build_dual_and_match(&mesh);
    let lin = merge_and_subdivide(&mesh, &mates, &rec).unwrap();
    let mut ho = elevate_to_order(&lin, 2).unwrap();
    let before = ho.nodes.clone();
    snap_boundary_nodes(&mut ho, &rec).unwrap();
    // Every tagged-edge midnode must sit on its piece curve, off the chord.
    let mut moved_any = false;
    for (key, tag) in ho.edge_tags.clone() {
        let piece = &rec.chains[tag.piece.chain].pieces[tag.piece.piece];
        // Find the owning element edge and inspect its interior node.
        for e in 0..ho.element_count() {
            let c = ho.corners[e];
            for k in 0..4 {
                if (c[k].min(c[(k + 1) % 4]), c[k].max(c[(k + 1) % 4])) == key {
                    let ids = ho.edge_node_ids(e, k);
                    let mid = ho.nodes[ids[1]];
                    let on_curve = piece.bez.closest_point(mid).dist;
                    assert!(on_curve < 1e-7 * d, "midnode off piece by {on_curve}");
                    if mid.dist(before[ids[1]]) > 1e-6 {
                        moved_any = true;
                    }
                }
            }
        }
    }
    assert!(moved_any, "circular pieces must move midnodes off the chord");
    // Conformity: snapping choices are per-edge, so both elements at an
    // interface see identical node ids by construction (single storage).
}

#[test]
fn certificate_examples() {
    // Identity square: r0 = {(1,0)}, r1 = {(0,1)} -> valid.
    let elem = identity_element(2);
    assert_eq!(sector_certificate(&elem), Certificate::Valid);

    // Opposing 0-vectors: fold the right edge back across the element.
    let mut folded = identity_element(2);
    for j in 0..=2 {
        let idx = 2 + j * 3;
        folded.nodes[idx] = pt(-1.0, folded.nodes[idx].y);
    }
    assert!(!sector_certificate(&folded).is_valid());
}

#[test]
fn certificate_is_sound_on_random_perturbations() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut valid_count = 0usize;
    for _ in 0..500 {
        let n = if rng.gen_bool(0.5) { 2 } else { 3 };
        let mut elem = identity_element(n);
        let amp = rng.gen_range(0.0..0.45) / n as f64;
        for p in &mut elem.nodes {
            *p += pt(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp));
        }
        if !sector_certificate(&elem).is_valid() {
            continue;
        }
        valid_count += 1;
        let ctrl = elem.bezier_ctrl();
        for a in 0..=40 {
            for b in 0..=40 {
                let xi = a as f64 / 40.0;
                let eta = b as f64 / 40.0;
                let det = det_from_ctrl(&elem, &ctrl, xi, eta);
                assert!(det > 0.0, "certified element with det {det} at ({xi},{eta})");
            }
        }
    }
    assert!(valid_count > 50, "only {valid_count} certified elements");
}

#[test]
fn composite_deform_is_stable_under_step_doubling() {
    // Curved-boundary element: consistency of the composite map.
    let n = 3;
    let elem = identity_element(n);
    let source = elem.boundary_polygon();
    let mut target = source.clone();
    // Bulge the bottom edge upward by a snap-scale displacement.
    for (i, p) in target.iter_mut().enumerate() {
        if i > 0 && i < n {
            p.y += 0.05;
        }
    }
    let interior: Vec<P> = elem
        .interior_indices()
        .iter()
        .map(|&(i, j)| elem.node(i, j))
        .collect();
    let a = mvc::composite_deform(&source, &target, &interior, 4).unwrap();
    let b = mvc::composite_deform(&source, &target, &interior, 8).unwrap();
    let diam = elem.diameter();
    for (x, y) in a.iter().zip(&b) {
        assert!(x.dist(*y) < 1e-3 * diam, "step doubling moved node by {}", x.dist(*y));
    }
}
