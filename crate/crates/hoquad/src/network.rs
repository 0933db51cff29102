//! Input curve networks: regions bounded by oriented piecewise Lagrange
//! curves with shared interface segments.

use std::collections::BTreeMap;

use crate::curves::{ChainId, LagrangeSegment, SourceChain};
use crate::error::{Error, Result};
use crate::geom::{winding_number, BBox, Point2};
use crate::scalar::{real, Real};

/// Classification of a network segment by loop membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentTag {
    /// Referenced by exactly one region loop.
    Boundary,
    /// Shared by two region loops with opposite orientation.
    Interface,
}

/// Oriented reference to a segment inside a region loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegRef {
    pub seg: usize,
    pub reversed: bool,
}

/// A segment with its endpoint joint identifiers.
#[derive(Debug, Clone)]
pub struct NetworkSegment<R> {
    pub curve: LagrangeSegment<R>,
    pub start_joint: usize,
    pub end_joint: usize,
}

impl<R: Real> NetworkSegment<R> {
    fn joint_at(&self, reversed: bool, end: bool) -> usize {
        // Joint at the start (end=false) or end (end=true) of the traversal.
        if reversed == end {
            self.start_joint
        } else {
            self.end_joint
        }
    }
}

/// A region bounded by one outer loop and optional hole loops.
#[derive(Debug, Clone)]
pub struct Region {
    pub id: usize,
    pub loops: Vec<Vec<SegRef>>,
}

/// Planar regions enclosed by degree-n piecewise Lagrange curves. Regions may
/// share interface curves but never overlapping area.
#[derive(Debug, Clone)]
pub struct CurveNetwork<R> {
    segments: Vec<NetworkSegment<R>>,
    regions: Vec<Region>,
    tags: Vec<SegmentTag>,
    degree: usize,
}

impl<R: Real> CurveNetwork<R> {
    pub fn new(segments: Vec<NetworkSegment<R>>, regions: Vec<Region>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Topology("network has no segments".into()));
        }
        let degree = segments[0].curve.degree();
        for (i, s) in segments.iter().enumerate() {
            if s.curve.degree() != degree {
                return Err(Error::Topology(format!(
                    "segment {i} has degree {} but the network degree is {degree}",
                    s.curve.degree()
                )));
            }
        }
        // Count loop memberships and check loop contiguity.
        let mut usage: Vec<Vec<bool>> = vec![Vec::new(); segments.len()];
        for region in &regions {
            for (li, lp) in region.loops.iter().enumerate() {
                if lp.is_empty() {
                    return Err(Error::Topology(format!(
                        "region {} loop {li} is empty",
                        region.id
                    )));
                }
                for r in lp {
                    if r.seg >= segments.len() {
                        return Err(Error::Topology(format!(
                            "region {} references unknown segment {}",
                            region.id, r.seg
                        )));
                    }
                    usage[r.seg].push(r.reversed);
                }
                for k in 0..lp.len() {
                    let cur = &lp[k];
                    let nxt = &lp[(k + 1) % lp.len()];
                    let end = segments[cur.seg].joint_at(cur.reversed, true);
                    let start = segments[nxt.seg].joint_at(nxt.reversed, false);
                    if end != start {
                        return Err(Error::Topology(format!(
                            "region {} loop {li} has a gap at joint {end} (segment {} does not continue into segment {})",
                            region.id, cur.seg, nxt.seg
                        )));
                    }
                }
            }
        }
        let mut tags = Vec::with_capacity(segments.len());
        for (i, uses) in usage.iter().enumerate() {
            match uses.len() {
                0 => {
                    return Err(Error::Topology(format!(
                        "segment {i} is not referenced by any region"
                    )))
                }
                1 => tags.push(SegmentTag::Boundary),
                2 => {
                    if uses[0] == uses[1] {
                        return Err(Error::Topology(format!(
                            "segment {i} is used twice with the same orientation"
                        )));
                    }
                    tags.push(SegmentTag::Interface);
                }
                n => {
                    return Err(Error::Topology(format!(
                        "segment {i} is referenced by {n} loops (at most 2 allowed)"
                    )))
                }
            }
        }
        Ok(Self {
            segments,
            regions,
            tags,
            degree,
        })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn segments(&self) -> &[NetworkSegment<R>] {
        &self.segments
    }

    #[inline]
    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    #[inline]
    pub fn tag(&self, seg: usize) -> SegmentTag {
        self.tags[seg]
    }

    pub fn bbox(&self) -> BBox<R> {
        let mut b = BBox::empty();
        for s in &self.segments {
            b.merge(&s.curve.bbox());
        }
        b
    }

    /// Polyline of a loop, sampled along each segment (for winding tests).
    pub fn loop_polyline(&self, lp: &[SegRef], samples_per_segment: usize) -> Vec<Point2<R>> {
        let mut pts = Vec::new();
        for r in lp {
            let seg = &self.segments[r.seg].curve;
            for k in 0..samples_per_segment {
                let t = real::<R>(k as f64 / samples_per_segment as f64);
                let t = if r.reversed { R::one() - t } else { t };
                pts.push(seg.eval(t));
            }
        }
        pts
    }

    /// Whether `p` lies inside the given region (nonzero winding over all its
    /// loops).
    pub fn region_contains(&self, region: &Region, p: Point2<R>, samples: usize) -> bool {
        let mut wn = 0;
        for lp in &region.loops {
            wn += winding_number(&self.loop_polyline(lp, samples), p);
        }
        wn != 0
    }

    /// Sampled check that no two regions bound overlapping area.
    pub fn validate_no_overlap(&self, grid: usize) -> Result<()> {
        if self.regions.len() < 2 {
            return Ok(());
        }
        let bbox = self.bbox();
        let polylines: Vec<Vec<Vec<Point2<R>>>> = self
            .regions
            .iter()
            .map(|reg| {
                reg.loops
                    .iter()
                    .map(|lp| self.loop_polyline(lp, 8))
                    .collect()
            })
            .collect();
        for gy in 0..grid {
            for gx in 0..grid {
                let fx = real::<R>((gx as f64 + 0.5) / grid as f64);
                let fy = real::<R>((gy as f64 + 0.5) / grid as f64);
                let p = Point2::new(
                    bbox.min.x + (bbox.max.x - bbox.min.x) * fx,
                    bbox.min.y + (bbox.max.y - bbox.min.y) * fy,
                );
                let mut inside = 0usize;
                for loops in &polylines {
                    let wn: i32 = loops.iter().map(|lp| winding_number(lp, p)).sum();
                    if wn != 0 {
                        inside += 1;
                        if inside > 1 {
                            return Err(Error::Topology(format!(
                                "regions overlap near ({}, {})",
                                p.x, p.y
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A maximal corner-free run of same-tag segments.
#[derive(Debug, Clone)]
pub struct ChainInfo<R> {
    pub source: SourceChain<R>,
    pub tag: SegmentTag,
    /// Traversed segments as (segment id, reversed relative to storage).
    pub refs: Vec<(usize, bool)>,
    pub closed: bool,
    /// Network joint ids bounding an open chain.
    pub start_joint: Option<usize>,
    pub end_joint: Option<usize>,
}

/// Chains plus the per-loop traversal order needed to assemble region
/// boundaries after reconstruction.
#[derive(Debug, Clone)]
pub struct ChainSet<R> {
    pub chains: Vec<ChainInfo<R>>,
    /// For every region loop: the chains it traverses, in order, with the
    /// direction relative to the chain's own orientation.
    pub loop_runs: Vec<LoopRuns>,
    /// Joints flagged as corners (tangent discontinuities and junctions).
    pub corner_joints: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LoopRuns {
    pub region: usize,
    pub loop_index: usize,
    pub runs: Vec<(ChainId, bool)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum End {
    Start,
    End,
}

/// Direction pointing away from the joint into the segment.
fn outgoing_dir<R: Real>(seg: &LagrangeSegment<R>, end: End) -> Option<Point2<R>> {
    let bez = seg.to_bezier();
    let ctrl = bez.ctrl();
    match end {
        End::Start => ctrl[1..]
            .iter()
            .map(|q| *q - ctrl[0])
            .find_map(|d| d.normalized()),
        End::End => {
            let last = ctrl[ctrl.len() - 1];
            ctrl[..ctrl.len() - 1]
                .iter()
                .rev()
                .map(|q| *q - last)
                .find_map(|d| d.normalized())
        }
    }
}

/// Splits the network into maximal smooth chains. Joints with more or fewer
/// than two incident segment ends, with mixed tags, or with a tangent jump
/// above `corner_tol_rad` break chains and are flagged as corners.
pub fn extract_chains<R: Real>(
    net: &CurveNetwork<R>,
    corner_tol_rad: f64,
) -> Result<ChainSet<R>> {
    let nseg = net.segments().len();
    let mut incidence: BTreeMap<usize, Vec<(usize, End)>> = BTreeMap::new();
    for (i, s) in net.segments().iter().enumerate() {
        incidence.entry(s.start_joint).or_default().push((i, End::Start));
        incidence.entry(s.end_joint).or_default().push((i, End::End));
    }

    // Identify break joints.
    let mut breaks: Vec<usize> = Vec::new();
    for (&joint, inc) in &incidence {
        let is_break = if inc.len() != 2 {
            true
        } else {
            let (s0, e0) = inc[0];
            let (s1, e1) = inc[1];
            if net.tag(s0) != net.tag(s1) {
                true
            } else {
                match (outgoing_dir(&net.segments()[s0].curve, e0),
                       outgoing_dir(&net.segments()[s1].curve, e1)) {
                    (Some(d0), Some(d1)) => {
                        // Smooth continuation means the outgoing directions
                        // are opposite.
                        let cos = (-d0).dot(d1);
                        let cos_tol = real::<R>(corner_tol_rad.cos());
                        cos < cos_tol
                    }
                    _ => true,
                }
            }
        };
        if is_break {
            breaks.push(joint);
        }
    }

    // Walk chains.
    let mut visited = vec![false; nseg];
    let mut chains: Vec<ChainInfo<R>> = Vec::new();
    let mut seg_to_chain: Vec<(usize, usize, bool)> = vec![(usize::MAX, 0, false); nseg];

    let next_incidence = |joint: usize, seg: usize| -> Option<(usize, End)> {
        let inc = &incidence[&joint];
        if inc.len() != 2 {
            return None;
        }
        // The continuation is the other incidence at this joint. For a
        // single-segment closed loop both incidences reference `seg`.
        if inc[0].0 == seg && inc[1].0 == seg {
            None
        } else if inc[0].0 == seg {
            Some(inc[1])
        } else {
            Some(inc[0])
        }
    };
    let is_break = |joint: usize, breaks: &[usize]| breaks.binary_search(&joint).is_ok();

    for start_seg in 0..nseg {
        if visited[start_seg] {
            continue;
        }
        // Walk backward from start_seg (in its stored direction) to a break
        // joint or until we loop back.
        let mut first = (start_seg, false);
        {
            let mut cur = (start_seg, false);
            loop {
                let (s, rev) = cur;
                let back_joint = net.segments()[s].joint_at(rev, false);
                if is_break(back_joint, &breaks) {
                    break;
                }
                let prev = match next_incidence(back_joint, s) {
                    Some(p) => p,
                    None => break,
                };
                // The previous segment is traversed so that it ENDS at
                // back_joint.
                let prev_rev = prev.1 == End::Start;
                if prev.0 == start_seg {
                    // Closed smooth cycle.
                    break;
                }
                cur = (prev.0, prev_rev);
                first = cur;
            }
        }
        // Walk forward from `first` collecting the chain.
        let mut refs: Vec<(usize, bool)> = Vec::new();
        let mut closed = false;
        let mut cur = first;
        loop {
            refs.push(cur);
            visited[cur.0] = true;
            let end_joint = net.segments()[cur.0].joint_at(cur.1, true);
            if is_break(end_joint, &breaks) {
                break;
            }
            let nxt = match next_incidence(end_joint, cur.0) {
                Some(n) => n,
                None => {
                    // Single-segment smooth closed loop.
                    closed = true;
                    break;
                }
            };
            if nxt.0 == first.0 {
                closed = true;
                break;
            }
            let nxt_rev = nxt.1 == End::End;
            cur = (nxt.0, nxt_rev);
        }

        let lagrange: Vec<LagrangeSegment<R>> = refs
            .iter()
            .map(|&(s, rev)| {
                let c = &net.segments()[s].curve;
                if rev {
                    c.reversed()
                } else {
                    c.clone()
                }
            })
            .collect();
        let id = ChainId(chains.len());
        let source = SourceChain::new(id, lagrange, closed)?;
        for (pos, &(s, rev)) in refs.iter().enumerate() {
            seg_to_chain[s] = (chains.len(), pos, rev);
        }
        let (start_joint, end_joint) = if closed {
            (None, None)
        } else {
            (
                Some(net.segments()[refs[0].0].joint_at(refs[0].1, false)),
                Some(
                    net.segments()[refs.last().unwrap().0]
                        .joint_at(refs.last().unwrap().1, true),
                ),
            )
        };
        chains.push(ChainInfo {
            source,
            tag: net.tag(first.0),
            refs,
            closed,
            start_joint,
            end_joint,
        });
    }

    // Map each region loop onto chain runs.
    let mut loop_runs = Vec::new();
    for region in net.regions() {
        for (li, lp) in region.loops.iter().enumerate() {
            let mut runs: Vec<(ChainId, bool)> = Vec::new();
            for r in lp {
                let (chain, _pos, stored_rev) = seg_to_chain[r.seg];
                debug_assert!(chain != usize::MAX);
                // Loop traverses the segment reversed relative to the chain?
                let forward = r.reversed == stored_rev;
                match runs.last() {
                    Some(&(last, fwd)) if last == ChainId(chain) && fwd == forward => {}
                    _ => runs.push((ChainId(chain), forward)),
                }
            }
            // A closed chain traversed as the whole loop may have been split
            // into two runs if the loop starts mid-chain; merge them.
            if runs.len() > 1 {
                let first = runs[0];
                let last = *runs.last().unwrap();
                if first == last && !chains[first.0 .0].closed {
                    // Open chains cannot wrap; nothing to merge.
                } else if first == last && runs.len() > 1 {
                    runs.pop();
                }
            }
            loop_runs.push(LoopRuns {
                region: region.id,
                loop_index: li,
                runs,
            });
        }
    }

    Ok(ChainSet {
        chains,
        loop_runs,
        corner_joints: breaks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Point2<f64>;

    fn pt(x: f64, y: f64) -> P {
        P::new(x, y)
    }

    fn quad_seg(a: P, b: P) -> LagrangeSegment<f64> {
        LagrangeSegment::new(vec![a, a.midpoint(b), b]).unwrap()
    }

    /// Unit square: 4 straight quadratic segments, one region.
    fn square_network() -> CurveNetwork<f64> {
        let corners = [pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)];
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

    /// Circle from `n` quadratic segments sampling uniform angles.
    fn circle_network(n: usize) -> CurveNetwork<f64> {
        let seg_nodes = |i: usize| {
            let a0 = std::f64::consts::TAU * i as f64 / n as f64;
            let a1 = std::f64::consts::TAU * (i + 1) as f64 / n as f64;
            let am = 0.5 * (a0 + a1);
            vec![
                pt(a0.cos(), a0.sin()),
                pt(am.cos(), am.sin()),
                pt(a1.cos(), a1.sin()),
            ]
        };
        let segments = (0..n)
            .map(|i| NetworkSegment {
                curve: LagrangeSegment::new(seg_nodes(i)).unwrap(),
                start_joint: i,
                end_joint: (i + 1) % n,
            })
            .collect();
        let regions = vec![Region {
            id: 0,
            loops: vec![(0..n).map(|seg| SegRef { seg, reversed: false }).collect()],
        }];
        CurveNetwork::new(segments, regions).unwrap()
    }

    #[test]
    fn square_has_four_corner_chains() {
        let net = square_network();
        let set = extract_chains(&net, 5f64.to_radians()).unwrap();
        assert_eq!(set.corner_joints.len(), 4);
        assert_eq!(set.chains.len(), 4);
        assert!(set.chains.iter().all(|c| !c.closed));
    }

    #[test]
    fn smooth_circle_is_one_closed_chain() {
        let net = circle_network(12);
        let set = extract_chains(&net, 5f64.to_radians()).unwrap();
        assert_eq!(set.corner_joints.len(), 0);
        assert_eq!(set.chains.len(), 1);
        assert!(set.chains[0].closed);
        assert_eq!(set.chains[0].refs.len(), 12);
        assert_eq!(set.loop_runs.len(), 1);
        assert_eq!(set.loop_runs[0].runs.len(), 1);
    }

    #[test]
    fn l_shaped_chain_breaks_at_the_right_angle() {
        // Two segments meeting at a 90-degree corner, part of a triangle-ish
        // region closed by a third segment back to the start.
        let a = pt(0.0, 0.0);
        let b = pt(1.0, 0.0);
        let c = pt(1.0, 1.0);
        let segments = vec![
            NetworkSegment { curve: quad_seg(a, b), start_joint: 0, end_joint: 1 },
            NetworkSegment { curve: quad_seg(b, c), start_joint: 1, end_joint: 2 },
            NetworkSegment { curve: quad_seg(c, a), start_joint: 2, end_joint: 0 },
        ];
        let regions = vec![Region {
            id: 0,
            loops: vec![(0..3).map(|seg| SegRef { seg, reversed: false }).collect()],
        }];
        let net = CurveNetwork::new(segments, regions).unwrap();
        let set = extract_chains(&net, 5f64.to_radians()).unwrap();
        assert!(set.corner_joints.contains(&1));
        assert_eq!(set.chains.len(), 3);
    }

    #[test]
    fn interface_tagging_from_dual_membership() {
        // Two half squares sharing the vertical middle segment.
        let segs = vec![
            // left region: (0,0)->(1,0) is the shared diagonal? keep simple:
            // outer square split by vertical line x=0.5 is clearer.
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
        let net = CurveNetwork::new(segs, regions).unwrap();
        assert_eq!(net.tag(1), SegmentTag::Interface);
        assert_eq!(net.tag(0), SegmentTag::Boundary);
        net.validate_no_overlap(24).unwrap();
        let set = extract_chains(&net, 5f64.to_radians()).unwrap();
        let iface: Vec<_> = set
            .chains
            .iter()
            .filter(|c| c.tag == SegmentTag::Interface)
            .collect();
        assert_eq!(iface.len(), 1);
    }

    #[test]
    fn gap_in_loop_is_a_topology_error() {
        let segs = vec![
            NetworkSegment { curve: quad_seg(pt(0.0, 0.0), pt(1.0, 0.0)), start_joint: 0, end_joint: 1 },
            NetworkSegment { curve: quad_seg(pt(1.0, 0.5), pt(0.0, 0.5)), start_joint: 2, end_joint: 3 },
        ];
        let regions = vec![Region {
            id: 0,
            loops: vec![vec![
                SegRef { seg: 0, reversed: false },
                SegRef { seg: 1, reversed: false },
            ]],
        }];
        let err = CurveNetwork::new(segs, regions).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("gap"), "{msg}");
        assert!(msg.contains("joint 1"), "{msg}");
    }

    #[test]
    fn same_orientation_double_use_rejected() {
        let segs = vec![
            NetworkSegment { curve: quad_seg(pt(0.0, 0.0), pt(1.0, 0.0)), start_joint: 0, end_joint: 1 },
            NetworkSegment { curve: quad_seg(pt(1.0, 0.0), pt(0.0, 0.0)), start_joint: 1, end_joint: 0 },
        ];
        let regions = vec![
            Region {
                id: 0,
                loops: vec![vec![
                    SegRef { seg: 0, reversed: false },
                    SegRef { seg: 1, reversed: false },
                ]],
            },
            Region {
                id: 1,
                loops: vec![vec![
                    SegRef { seg: 0, reversed: false },
                    SegRef { seg: 1, reversed: false },
                ]],
            },
        ];
        assert!(CurveNetwork::new(segs, regions).is_err());
    }
}
