use super::*;
use crate::curves::LagrangeSegment;
use crate::network::{CurveNetwork, NetworkSegment, Region, SegRef};
use crate::reconstruct::{reconstruct, split_at_corners, ReconParams};
use matching::brute_force_best;

type P = Point2<f64>;

fn pt(x: f64, y: f64) -> P {
    P::new(x, y)
}

fn quad_seg(a: P, b: P) -> LagrangeSegment<f64> {
    LagrangeSegment::new(vec![a, a.midpoint(b), b]).unwrap()
}

fn square_network(side: f64) -> CurveNetwork<f64> {
    let corners = [pt(0.0, 0.0), pt(side, 0.0), pt(side, side), pt(0.0, side)];
    let segments = (0..4)
        .map(|i| NetworkSegment {
            curve: quad_seg(corners[i], corners[(i + 1) % 4]),
            start_joint: i,
            end_joint: (i + 1) % 4,
        })
        .collect();
    let regions = vec![Region {
        id: 0,
        loops: vec![(0..4).map(|seg| SegRef { seg, reversed: false }).collect()],
    }];
    CurveNetwork::new(segments, regions).unwrap()
}

fn split_square_network() -> CurveNetwork<f64> {
    // Unit square split by the vertical interface x = 0.5.
    let segs = vec![
        NetworkSegment { curve: quad_seg(pt(0.0, 0.0), pt(0.5, 0.0)), start_joint: 0, end_joint: 1 },
        NetworkSegment { curve: quad_seg(pt(0.5, 0.0), pt(0.5, 1.0)), start_joint: 1, end_joint: 2 },
        NetworkSegment { curve: quad_seg(pt(0.5, 1.0), pt(0.0, 1.0)), start_joint: 2, end_joint: 3 },
        NetworkSegment { curve: quad_seg(pt(0.0, 1.0), pt(0.0, 0.0)), start_joint: 3, end_joint: 0 },
        NetworkSegment { curve: quad_seg(pt(0.5, 0.0), pt(1.0, 0.0)), start_joint: 1, end_joint: 4 },
        NetworkSegment { curve: quad_seg(pt(1.0, 0.0), pt(1.0, 1.0)), start_joint: 4, end_joint: 5 },
        NetworkSegment { curve: quad_seg(pt(1.0, 1.0), pt(0.5, 1.0)), start_joint: 5, end_joint: 2 },
    ];
    let regions = vec![
        Region {
            id: 0,
            loops: vec![vec![
                SegRef { seg: 0, reversed: false },
                SegRef { seg: 1, reversed: false },
                SegRef { seg: 2, reversed: false },
                SegRef { seg: 3, reversed: false },
            ]],
        },
        Region {
            id: 1,
            loops: vec![vec![
                SegRef { seg: 4, reversed: false },
                SegRef { seg: 5, reversed: false },
                SegRef { seg: 6, reversed: false },
                SegRef { seg: 1, reversed: true },
            ]],
        },
    ];
    CurveNetwork::new(segs, regions).unwrap()
}

fn circle_network(n: usize) -> CurveNetwork<f64> {
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

fn params(eps: f64, lt: f64) -> ReconParams<f64> {
    ReconParams {
        eps,
        lt,
        tau: std::f64::consts::FRAC_PI_4,
        alpha: 2.3,
        max_iterations: 20,
        lloyd_iterations: 5,
    }
}

#[test]
fn unit_square_with_unit_chords_gives_two_triangles() {
    let net = square_network(1.0);
    let rec = split_at_corners(&net).unwrap();
    let mesh = triangulate(&rec, 0.5).unwrap();
    assert_eq!(mesh.tris.len(), 2);
    assert_eq!(mesh.edge_tags.len(), 4);
    assert!(all_ccw(&mesh));
}

#[test]
fn interface_diagonal_shared_by_both_sides() {
    let net = split_square_network();
    let rec = split_at_corners(&net).unwrap();
    let mesh = triangulate(&rec, 0.5).unwrap();
    // The interface chord (0.5,0)-(0.5,1) must be an edge of exactly one
    // triangle per region.
    let iface: Vec<(usize, usize)> = mesh
        .edge_tags
        .iter()
        .filter(|(_, t)| t.kind == SegmentTag::Interface)
        .map(|(k, _)| *k)
        .collect();
    assert_eq!(iface.len(), 1);
    let key = iface[0];
    let mut regions_at_edge = Vec::new();
    for (ti, t) in mesh.tris.iter().enumerate() {
        for i in 0..3 {
            if edge_key(t[i], t[(i + 1) % 3]) == key {
                regions_at_edge.push(mesh.tri_region[ti]);
            }
        }
    }
    regions_at_edge.sort_unstable();
    assert_eq!(regions_at_edge, vec![0, 1]);
}

#[test]
fn disk_keeps_all_chords() {
    let net = circle_network(16);
    let rec = split_at_corners(&net).unwrap();
    let mesh = triangulate(&rec, 0.4).unwrap();
    assert_eq!(mesh.edge_tags.len(), 16);
    // triangulate() errors internally if a chord is missing; double-check.
    let mut present = std::collections::BTreeSet::new();
    for t in &mesh.tris {
        for i in 0..3 {
            present.insert(edge_key(t[i], t[(i + 1) % 3]));
        }
    }
    for k in mesh.edge_tags.keys() {
        assert!(present.contains(k));
    }
    assert!(all_ccw(&mesh));
}

#[test]
fn quad_quality_examples() {
    let square = [pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)];
    assert!((linear_quad_quality(square).unwrap() - 1.0).abs() < 1e-15);

    // Near-degenerate sliver: one corner angle approaching 180 degrees.
    let sliver = [pt(0.0, 0.0), pt(1.0, 0.02), pt(2.0, 0.0), pt(1.0, 0.06)];
    assert!(linear_quad_quality(sliver).unwrap() < 0.1);

    let rect = [pt(0.0, 0.0), pt(2.0, 0.0), pt(2.0, 1.0), pt(0.0, 1.0)];
    let beta = linear_quad_quality(rect).unwrap();
    assert!(beta > 0.1 && beta < 1.0, "beta = {beta}");

    // Twisted (negative area) clamps to zero.
    let twisted = [pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 1.0), pt(1.0, 1.0)];
    assert_eq!(linear_quad_quality(twisted).unwrap(), 0.0);

    let repeated = [pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 0.0), pt(0.0, 1.0)];
    assert!(linear_quad_quality(repeated).is_err());
}

#[test]
fn two_triangles_merge_into_a_quad() {
    let net = square_network(1.0);
    let rec = split_at_corners(&net).unwrap();
    let mesh = triangulate(&rec, 0.5).unwrap();
    let mates = build_dual_and_match(&mesh);
    assert_eq!(mates.iter().filter(|m| m.is_some()).count(), 2);
}

#[test]
fn penalty_steers_matching_away_from_double_tagged_quads() {
    // Hand-built strip of 4 triangles on a tagged bottom row:
    //   3---4---5
    //   | \ | \ |
    //   0---1---2     edges (0,1) and (1,2) tagged as boundary.
    let vertices = vec![
        pt(0.0, 0.0),
        pt(1.0, 0.0),
        pt(2.0, 0.0),
        pt(0.0, 1.0),
        pt(1.0, 1.0),
        pt(2.0, 1.0),
    ];
    let tris = vec![[0, 1, 3], [1, 4, 3], [1, 2, 4], [2, 5, 4]];
    let mut edge_tags = BTreeMap::new();
    for (a, b, piece) in [(0usize, 1usize, 0usize), (1, 2, 1)] {
        edge_tags.insert(
            edge_key(a, b),
            EdgeTag {
                kind: SegmentTag::Boundary,
                piece: crate::reconstruct::PieceId { chain: 0, piece },
                half: None,
                forward: true,
            },
        );
    }
    let mesh = LinearMesh {
        vertices,
        tri_region: vec![0; tris.len()],
        tris,
        quads: vec![],
        quad_region: vec![],
        edge_tags,
        flagged_inverted: vec![],
    };
    // The middle pairing (1,2) would form quad (0,1)+(1,2)... check costs:
    // pairing t1 with t2 gives quad [0,1,
    // Actually enumerate: the only perfect matchings are {(0,1),(2,3)} and
    // none other with cardinality 2 here; what matters is that the merged
    // quads carry at most one tagged edge each.
    let mates = build_dual_and_match(&mesh);
    let edges = dual_edges(&mesh);
    let (card, weight) = matching::matching_stats(&edges, &mates);
    let (bc, bw) = brute_force_best(mesh.tris.len(), &edges);
    assert_eq!(card, bc);
    assert_eq!(weight, bw);
    for t1 in 0..mesh.tris.len() {
        if let Some(t2) = mates[t1] {
            if t2 > t1 {
                let q = merged_quad(&mesh, t1, t2).unwrap();
                assert!(mesh.tagged_edge_count(&q) < 2);
            }
        }
    }
}

#[test]
fn odd_triangle_count_leaves_one_unmatched() {
    // Triangle region split so an odd number of triangles remains.
    let vertices = vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(0.5, 0.8)];
    let tris = vec![[0, 1, 2]];
    let mesh = LinearMesh {
        vertices,
        tri_region: vec![0],
        tris,
        quads: vec![],
        quad_region: vec![],
        edge_tags: BTreeMap::new(),
        flagged_inverted: vec![],
    };
    let mates = build_dual_and_match(&mesh);
    assert_eq!(mates, vec![None]);
}

#[test]
fn one_quad_subdivides_into_four() {
    let net = square_network(1.0);
    let rec = split_at_corners(&net).unwrap();
    let vertices = vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)];
    let mesh = LinearMesh {
        vertices,
        tris: vec![[0, 1, 2], [0, 2, 3]],
        tri_region: vec![0, 0],
        quads: vec![],
        quad_region: vec![],
        edge_tags: BTreeMap::new(),
        flagged_inverted: vec![],
    };
    // Force the pair to merge into the full square, then subdivide.
    let mates = vec![Some(1), Some(0)];
    let out = merge_and_subdivide(&mesh, &mates, &rec).unwrap();
    assert_eq!(out.quads.len(), 4);
    assert_eq!(out.vertices.len(), 9);
    assert!(out.tris.is_empty());
    assert!(all_ccw(&out));
}

#[test]
fn one_triangle_subdivides_into_three() {
    let net = square_network(1.0);
    let rec = split_at_corners(&net).unwrap();
    let vertices = vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(0.5, 0.8)];
    let mesh = LinearMesh {
        vertices,
        tris: vec![[0, 1, 2]],
        tri_region: vec![0],
        quads: vec![],
        quad_region: vec![],
        edge_tags: BTreeMap::new(),
        flagged_inverted: vec![],
    };
    let out = merge_and_subdivide(&mesh, &[None], &rec).unwrap();
    assert_eq!(out.quads.len(), 3);
    assert_eq!(out.vertices.len(), 7);
    assert!(all_ccw(&out));
}

#[test]
fn tagged_midpoints_land_on_the_reconstructed_curve() {
    let net = circle_network(12);
    let d = net.bbox().diag();
    let p = params(1e-3 * d, 0.12 * d);
    let rec = reconstruct(&net, &p).unwrap();
    let mut mesh = triangulate(&rec, p.lt).unwrap();
    split_double_tagged_triangles(&mut mesh);
    let mates = build_dual_and_match(&mesh);
    let out = merge_and_subdivide(&mesh, &mates, &rec).unwrap();
    assert!(out.tris.is_empty());
    // Every tagged sub-edge midpoint vertex must lie on its piece curve,
    // far off the chord for a circle.
    let mut checked = 0;
    for (key, tag) in &out.edge_tags {
        assert!(tag.half.is_some());
        let piece = &rec.chains[tag.piece.chain].pieces[tag.piece.piece];
        for &v in &[key.0, key.1] {
            let d_curve = piece.bez.closest_point(out.vertices[v]).dist;
            assert!(d_curve < 1e-9 * d, "vertex off its piece by {d_curve}");
        }
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn final_mesh_has_no_double_tagged_quads_and_conforms() {
    let net = split_square_network();
    let d = net.bbox().diag();
    let p = params(1e-3 * d, 0.18 * d);
    let rec = reconstruct(&net, &p).unwrap();
    let mut mesh = triangulate(&rec, p.lt).unwrap();
    split_double_tagged_triangles(&mut mesh);
    let mates = build_dual_and_match(&mesh);
    let out = merge_and_subdivide(&mesh, &mates, &rec).unwrap();
    assert!(out.tris.is_empty());
    assert!(out.flagged_inverted.is_empty());
    assert!(all_ccw(&out));
    // Zero quads with two tagged edges.
    for q in &out.quads {
        assert!(out.tagged_edge_count(q) < 2, "double-tagged quad {q:?}");
    }
    // Interface sub-edges are shared by exactly one quad per region.
    let mut at_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (qi, q) in out.quads.iter().enumerate() {
        for i in 0..4 {
            at_edge
                .entry(edge_key(q[i], q[(i + 1) % 4]))
                .or_default()
                .push(qi);
        }
    }
    let mut interface_edges = 0;
    for (key, tag) in &out.edge_tags {
        let quads_here = &at_edge[key];
        match tag.kind {
            SegmentTag::Interface => {
                interface_edges += 1;
                assert_eq!(quads_here.len(), 2, "hanging node at {key:?}");
                let r0 = out.quad_region[quads_here[0]];
                let r1 = out.quad_region[quads_here[1]];
                assert_ne!(r0, r1);
            }
            SegmentTag::Boundary => {
                assert_eq!(quads_here.len(), 1);
            }
        }
    }
    assert!(interface_edges >= 2);
    // Euler characteristic: each region is a disk, V - E + F = 1.
    for rid in [0usize, 1] {
        let mut verts = std::collections::BTreeSet::new();
        let mut edges = std::collections::BTreeSet::new();
        let mut f = 0usize;
        for (qi, q) in out.quads.iter().enumerate() {
            if out.quad_region[qi] != rid {
                continue;
            }
            f += 1;
            for i in 0..4 {
                verts.insert(q[i]);
                edges.insert(edge_key(q[i], q[(i + 1) % 4]));
            }
        }
        assert_eq!(verts.len() as i64 - edges.len() as i64 + f as i64, 1);
    }
}

#[test]
fn matching_cost_is_optimal_on_small_meshes() {
    for n in [6usize, 8, 10] {
        let net = circle_network(n);
        let rec = split_at_corners(&net).unwrap();
        let mesh = triangulate(&rec, 10.0).unwrap();
        if mesh.tris.len() > 12 {
            continue;
        }
        let edges = dual_edges(&mesh);
        let mates = build_dual_and_match(&mesh);
        let (card, weight) = matching::matching_stats(&edges, &mates);
        let (bc, bw) = brute_force_best(mesh.tris.len(), &edges);
        assert_eq!(card, bc, "n={n}");
        assert_eq!(weight, bw, "n={n}");
    }
}

#[test]
fn double_tagged_triangles_are_fanned_out() {
    // Tiny triangular region: every edge tagged.
    let vertices = vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(0.5, 0.8)];
    let mut edge_tags = BTreeMap::new();
    for (i, (a, b)) in [(0usize, 1usize), (1, 2), (2, 0)].iter().enumerate() {
        edge_tags.insert(
            edge_key(*a, *b),
            EdgeTag {
                kind: SegmentTag::Boundary,
                piece: crate::reconstruct::PieceId { chain: 0, piece: i },
                half: None,
                forward: true,
            },
        );
    }
    let mut mesh = LinearMesh {
        vertices,
        tris: vec![[0, 1, 2]],
        tri_region: vec![0],
        quads: vec![],
        quad_region: vec![],
        edge_tags,
        flagged_inverted: vec![],
    };
    split_double_tagged_triangles(&mut mesh);
    assert_eq!(mesh.tris.len(), 3);
    for t in &mesh.tris {
        assert!(mesh.tagged_edge_count(t) < 2);
    }
    assert!(all_ccw(&mesh));
}
