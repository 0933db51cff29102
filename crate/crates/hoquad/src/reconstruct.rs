//! Geometric error-bounded curve reconstruction.
//!
//! Corner splitting, bounded-error merge/bisect approximation, angular and
//! size adaptive refinement, proximity-based density control and Lloyd/CVT
//! endpoint optimization. Every reconstructed piece keeps a certified
//! Hausdorff bound against its source arc, re-enforced after every step.

use crate::curves::{ArcRef, BezierSegment, LagrangeSegment, SourceChain};
use crate::error::{Error, Result};
use crate::geom::{BBox, Sector};
use crate::hausdorff::{bound_chain_vs_curve, bound_symmetric};
use crate::network::{extract_chains, ChainSet, CurveNetwork, LoopRuns, SegmentTag};
use crate::scalar::{real, Real};

/// Tangent deviation (degrees) above which a joint counts as a corner.
pub const CORNER_TOL_DEG: f64 = 5.0;

/// Recursion cap for bisection; beyond this the input is pathological.
const MAX_BISECT_DEPTH: usize = 40;

/// Cap on proximity-refinement sweeps.
const MAX_PROXIMITY_PASSES: usize = 60;

/// Identifies a reconstructed piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PieceId {
    pub chain: usize,
    pub piece: usize,
}

/// One reconstructed curve piece together with its source arc and the
/// certified Hausdorff bound between the two.
#[derive(Debug, Clone)]
pub struct Piece<R> {
    pub curve: LagrangeSegment<R>,
    pub bez: BezierSegment<R>,
    pub arc: ArcRef<R>,
    pub bound: R,
    /// Piece geometry coincides with the source arc (identity or exact
    /// subdivision), so the bound is zero by construction.
    pub exact: bool,
}

/// A joint between consecutive pieces, addressed by chain arc length.
#[derive(Debug, Clone, Copy)]
pub struct Joint<R> {
    pub s: R,
    pub fixed: bool,
}

/// Reconstruction state of one corner-bounded (or smooth closed) chain.
#[derive(Debug, Clone)]
pub struct ReconstructedChain<R> {
    pub source: SourceChain<R>,
    pub tag: SegmentTag,
    pub closed: bool,
    /// Network joint ids at the ends of an open chain.
    pub start_joint_net: Option<usize>,
    pub end_joint_net: Option<usize>,
    /// Ascending arc-length joint positions; open chains have
    /// `pieces.len() + 1` joints, closed ones `pieces.len()`.
    pub joints: Vec<Joint<R>>,
    pub pieces: Vec<Piece<R>>,
}

/// Parameters of the reconstruction stages (absolute units).
#[derive(Debug, Clone, Copy)]
pub struct ReconParams<R> {
    pub eps: R,
    pub lt: R,
    pub tau: R,
    pub alpha: R,
    pub max_iterations: usize,
    pub lloyd_iterations: usize,
}

/// Full reconstruction result over all chains of a network.
#[derive(Debug, Clone)]
pub struct Reconstruction<R> {
    pub chains: Vec<ReconstructedChain<R>>,
    pub loop_runs: Vec<LoopRuns>,
    pub corner_joints: Vec<usize>,
    pub degree: usize,
    pub bbox_diag: R,
}

impl<R: Real> Reconstruction<R> {
    pub fn piece(&self, id: PieceId) -> &Piece<R> {
        &self.chains[id.chain].pieces[id.piece]
    }

    pub fn piece_count(&self) -> usize {
        self.chains.iter().map(|c| c.pieces.len()).sum()
    }

    /// Worst certified bound over all pieces.
    pub fn max_bound(&self) -> R {
        self.chains
            .iter()
            .flat_map(|c| c.pieces.iter())
            .map(|p| p.bound)
            .fold(R::zero(), |a, b| a.max(b))
    }
}

/// Certifies a reconstructed curve against its source arc. Geometry
/// mismatches (non-monotone projections) report an infinite bound, which
/// callers treat as "refine further".
fn certify<R: Real>(
    source: &SourceChain<R>,
    arc: &ArcRef<R>,
    curve: &BezierSegment<R>,
    eps: R,
    k0: usize,
) -> R {
    let arc_pieces = source.sub_arc(arc);
    if arc_pieces.is_empty() {
        return R::infinity();
    }
    match bound_chain_vs_curve(&arc_pieces, curve, eps, k0) {
        Ok(r) => r.bound,
        Err(_) => R::infinity(),
    }
}

impl<R: Real> ReconstructedChain<R> {
    /// Initial reconstruction state: the pieces are the source segments
    /// themselves (zero error by construction).
    pub(crate) fn from_source(
        source: SourceChain<R>,
        tag: SegmentTag,
        closed: bool,
        start_joint_net: Option<usize>,
        end_joint_net: Option<usize>,
    ) -> Result<Self> {
        let m = source.segment_count();
        let joint_count = if closed { m } else { m + 1 };
        let joints = (0..joint_count)
            .map(|i| Joint {
                s: if i < m {
                    source.segment_start(i)
                } else {
                    source.total_len()
                },
                fixed: false,
            })
            .collect();
        let pieces = (0..m)
            .map(|i| {
                let s0 = source.segment_start(i);
                let s1 = if i + 1 < m {
                    source.segment_start(i + 1)
                } else {
                    source.total_len()
                };
                let curve = source.lagrange_segments()[i].clone();
                let bez = curve.to_bezier();
                Ok(Piece {
                    curve,
                    bez,
                    arc: source.arc(s0, s1)?,
                    bound: R::zero(),
                    exact: true,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            source,
            tag,
            closed,
            start_joint_net,
            end_joint_net,
            joints,
            pieces,
        })
    }

    fn total_len(&self) -> R {
        self.source.total_len()
    }

    /// Arc between two consecutive joints, unwrapped on closed chains.
    fn arc_between(&self, s0: R, mut s1: R) -> Result<ArcRef<R>> {
        if self.closed {
            while s1 <= s0 {
                s1 += self.total_len();
            }
        }
        self.source.arc(s0, s1)
    }

    /// Builds a resampled piece over `[s0, s1]` and certifies it.
    fn build_piece(&self, s0: R, s1: R, degree: usize, eps: R, k0: usize) -> Result<Piece<R>> {
        let arc = self.arc_between(s0, s1)?;
        let curve = self.source.build_h(&arc, degree)?;
        let bez = curve.to_bezier();
        let bound = certify(&self.source, &arc, &bez, eps, k0);
        Ok(Piece {
            curve,
            bez,
            arc,
            bound,
            exact: false,
        })
    }

    /// Extracts the exact sub-curve over `[s0, s1]`; only valid while the
    /// range stays inside one source segment (the zero-tolerance path).
    fn build_exact_piece(&self, s0: R, s1: R) -> Result<Piece<R>> {
        let arc = self.arc_between(s0, s1)?;
        let parts = self.source.sub_arc(&arc);
        if parts.len() != 1 {
            return Err(Error::Internal(
                "exact piece would span multiple source segments".into(),
            ));
        }
        let bez = parts.into_iter().next().expect("one part");
        Ok(Piece {
            curve: bez.to_lagrange(),
            bez,
            arc,
            bound: R::zero(),
            exact: true,
        })
    }

    fn joint_count(&self) -> usize {
        self.joints.len()
    }

    /// Joint index pair bounding piece `i`.
    fn piece_joints(&self, i: usize) -> (usize, usize) {
        if self.closed {
            (i, (i + 1) % self.joint_count())
        } else {
            (i, i + 1)
        }
    }

    /// Bounded-error merge: replaces consecutive piece pairs by one
    /// resampled curve while the certified bound stays below `eps`.
    /// Scans in order and restarts after every replacement.
    fn merge_pass(&mut self, degree: usize, eps: R, k0: usize) -> Result<()> {
        if eps <= R::zero() {
            return Ok(());
        }
        'restart: loop {
            let m = self.pieces.len();
            let pair_count = if self.closed { m } else { m.saturating_sub(1) };
            if self.closed && m <= 3 {
                return Ok(());
            }
            for i in 0..pair_count {
                let (j0, _) = self.piece_joints(i);
                let jn = if self.closed { (i + 2) % m } else { i + 2 };
                let s0 = self.joints[j0].s;
                let s1 = self.joints[jn].s;
                let piece = match self.build_piece(s0, s1, degree, eps, k0) {
                    Ok(p) => p,
                    Err(_) => continue,
                };
                if piece.bound < eps {
                    // Replace pieces i and i+1, drop the shared joint.
                    let shared = if self.closed { (i + 1) % m } else { i + 1 };
                    self.pieces[i] = piece;
                    self.pieces.remove(shared);
                    self.joints.remove(shared);
                    continue 'restart;
                }
            }
            return Ok(());
        }
    }

    /// Recursive bisection at source-arc midpoints until every produced
    /// piece certifies below `eps`.
    fn bisect_to_tolerance(
        &self,
        s0: R,
        s1: R,
        degree: usize,
        eps: R,
        k0: usize,
        depth: usize,
    ) -> Result<Vec<Piece<R>>> {
        if depth > MAX_BISECT_DEPTH {
            return Err(Error::NonConvergence(format!(
                "bisection exceeded depth {MAX_BISECT_DEPTH} while chasing tolerance {eps}"
            )));
        }
        let piece = self.build_piece(s0, s1, degree, eps, k0)?;
        if piece.bound < eps {
            return Ok(vec![piece]);
        }
        let mid = (s0 + s1) * real::<R>(0.5);
        let mut out = self.bisect_to_tolerance(s0, mid, degree, eps, k0, depth + 1)?;
        out.extend(self.bisect_to_tolerance(mid, s1, degree, eps, k0, depth + 1)?);
        Ok(out)
    }

    /// Splits piece `i` at its arc midpoint; new joint is movable.
    fn split_piece(&mut self, i: usize, degree: usize, eps: R, k0: usize) -> Result<()> {
        let (j0, j1) = self.piece_joints(i);
        let s0 = self.joints[j0].s;
        let mut s1 = self.joints[j1].s;
        if self.closed {
            while s1 <= s0 {
                s1 += self.total_len();
            }
        }
        let mid = (s0 + s1) * real::<R>(0.5);
        let (left, right) = if self.pieces[i].exact {
            (
                self.build_exact_piece(s0, mid)?,
                self.build_exact_piece(mid, s1)?,
            )
        } else {
            (
                self.build_piece(s0, mid, degree, eps, k0)?,
                self.build_piece(mid, s1, degree, eps, k0)?,
            )
        };
        let total = self.total_len();
        let mid_norm = if self.closed && mid >= total {
            mid - total
        } else {
            mid
        };
        self.pieces[i] = left;
        self.pieces.insert(i + 1, right);
        let insert_at = j0 + 1;
        self.joints.insert(
            insert_at,
            Joint {
                s: mid_norm,
                fixed: false,
            },
        );
        if self.closed && mid_norm < s0 {
            // The new joint wrapped past the seam; keep joints sorted by
            // rotating bookkeeping: joints must stay ascending.
            self.normalize_closed_order();
        }
        Ok(())
    }

    /// Re-sorts joints/pieces of a closed chain so joints ascend in s.
    fn normalize_closed_order(&mut self) {
        if !self.closed || self.joints.len() < 2 {
            return;
        }
        let mut idx: Vec<usize> = (0..self.joints.len()).collect();
        idx.sort_by(|&a, &b| {
            self.joints[a]
                .s
                .partial_cmp(&self.joints[b].s)
                .expect("finite joints")
        });
        let joints: Vec<Joint<R>> = idx.iter().map(|&i| self.joints[i]).collect();
        let pieces: Vec<Piece<R>> = idx.iter().map(|&i| self.pieces[i].clone()).collect();
        self.joints = joints;
        self.pieces = pieces;
    }

    /// Replaces piece `i` with a certified bisection of its arc.
    fn enforce_piece(&mut self, i: usize, degree: usize, eps: R, k0: usize) -> Result<()> {
        let (j0, j1) = self.piece_joints(i);
        let s0 = self.joints[j0].s;
        let mut s1 = self.joints[j1].s;
        if self.closed {
            while s1 <= s0 {
                s1 += self.total_len();
            }
        }
        let parts = self.bisect_to_tolerance(s0, s1, degree, eps, k0, 0)?;
        debug_assert!(!parts.is_empty());
        let total = self.total_len();
        let mut new_joints = Vec::new();
        let mut s_acc = s0;
        for p in &parts[..parts.len() - 1] {
            s_acc += p.arc.len();
            let s_n = if self.closed && s_acc >= total {
                s_acc - total
            } else {
                s_acc
            };
            new_joints.push(Joint {
                s: s_n,
                fixed: false,
            });
        }
        let count = parts.len();
        self.pieces.splice(i..=i, parts);
        let insert_at = j0 + 1;
        for (k, j) in new_joints.into_iter().enumerate() {
            self.joints.insert(insert_at + k, j);
        }
        if self.closed && count > 1 {
            self.normalize_closed_order();
        }
        Ok(())
    }

    /// Re-certifies every piece and bisects violators.
    fn enforce_error(&mut self, degree: usize, eps: R, k0: usize) -> Result<()> {
        if eps <= R::zero() {
            // Zero-tolerance path: pieces are exact by construction.
            return Ok(());
        }
        let mut i = 0;
        while i < self.pieces.len() {
            if self.pieces[i].bound >= eps {
                self.enforce_piece(i, degree, eps, k0)?;
            }
            i += 1;
        }
        Ok(())
    }

    fn movable(&self, j: usize) -> bool {
        if self.joints[j].fixed {
            return false;
        }
        if !self.closed && (j == 0 || j + 1 == self.joints.len()) {
            return false;
        }
        true
    }
}

/// Minimal sector angle spanned by the control vectors of a piece.
///
/// Returns the `2*pi` sentinel when no half-plane contains all directions;
/// errors if every control vector is zero.
pub fn sector_angle<R: Real>(bez: &BezierSegment<R>) -> Result<R> {
    let dirs: Vec<_> = bez
        .control_vectors()
        .into_iter()
        .filter(|d| d.norm() > R::zero())
        .collect();
    match Sector::span_of(&dirs) {
        None => Err(Error::Degenerate(
            "all control vectors are zero (point curve)".into(),
        )),
        Some(Sector::Full) => Ok(real(std::f64::consts::TAU)),
        Some(arc) => Ok(arc.width()),
    }
}

/// Proximity-based target size `z(c)` from piece length, nearest-piece
/// length and their Hausdorff distance estimate.
pub fn proximity_target<R: Real>(len_c: R, len_ck: R, dh: R, alpha: R) -> R {
    if dh >= len_ck {
        // Largest gamma >= 0 with dh/len_ck > sum_{k=0..gamma} alpha^k.
        let ratio = dh / len_ck;
        let mut gamma_pow = R::one();
        let mut sum = R::zero();
        let mut pow = R::one();
        for g in 0..64 {
            sum += pow;
            if ratio > sum {
                gamma_pow = if g == 0 { R::one() } else { gamma_pow * alpha };
            } else {
                break;
            }
            pow *= alpha;
        }
        gamma_pow * len_ck
    } else if dh <= len_c {
        dh
    } else {
        let omega = (dh - len_c) / (len_ck - len_c);
        let half = real::<R>(0.5);
        (R::one() - omega) * (len_c + dh) * half + omega * (len_ck + len_c) * half
    }
}

/// Splits the network at corners and junctions into reconstruction chains.
/// Geometry is unchanged: the initial pieces are the original segments.
pub fn split_at_corners<R: Real>(net: &CurveNetwork<R>) -> Result<Reconstruction<R>> {
    let ChainSet {
        chains,
        loop_runs,
        corner_joints,
    } = extract_chains(net, CORNER_TOL_DEG.to_radians())?;
    let degree = net.degree();
    let bbox_diag = net.bbox().diag();
    let rec_chains = chains
        .into_iter()
        .map(|info| {
            ReconstructedChain::from_source(
                info.source,
                info.tag,
                info.closed,
                info.start_joint,
                info.end_joint,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Reconstruction {
        chains: rec_chains,
        loop_runs,
        corner_joints,
        degree,
        bbox_diag,
    })
}

/// Stage 1: bounded-error approximation (merge, then resample-or-bisect).
/// All joints surviving this stage are fixed during Lloyd optimization.
pub fn approximate<R: Real>(rec: &mut Reconstruction<R>, p: &ReconParams<R>) -> Result<()> {
    let degree = rec.degree;
    for chain in &mut rec.chains {
        chain.merge_pass(degree, p.eps, p.max_iterations)?;
        if p.eps > R::zero() {
            // Resample every piece; bisect those out of tolerance.
            let mut i = 0;
            while i < chain.pieces.len() {
                chain.enforce_piece(i, degree, p.eps, p.max_iterations)?;
                i += 1;
            }
        }
        for j in &mut chain.joints {
            j.fixed = true;
        }
    }
    Ok(())
}

/// Stage 2a: bisect pieces until the control-vector sector stays within
/// `tau` and the arc length below `2*lt`.
pub fn angular_size_refine<R: Real>(rec: &mut Reconstruction<R>, p: &ReconParams<R>) -> Result<()> {
    let degree = rec.degree;
    let two_lt = p.lt + p.lt;
    for chain in &mut rec.chains {
        let mut guard = 0usize;
        let mut i = 0;
        while i < chain.pieces.len() {
            let theta = sector_angle(&chain.pieces[i].bez)?;
            let len = chain.pieces[i].bez.arclength();
            if theta > p.tau || len >= two_lt {
                chain.split_piece(i, degree, p.eps, p.max_iterations)?;
                guard += 1;
                if guard > 100_000 {
                    return Err(Error::NonConvergence(
                        "angular/size refinement does not terminate".into(),
                    ));
                }
                // Re-examine the left half at the same index.
                continue;
            }
            i += 1;
        }
        chain.enforce_error(degree, p.eps, p.max_iterations)?;
    }
    Ok(())
}

/// Stage 2b: proximity-adaptive refinement against the nearest
/// non-adjacent piece.
pub fn proximity_refine<R: Real>(rec: &mut Reconstruction<R>, p: &ReconParams<R>) -> Result<()> {
    let degree = rec.degree;
    for _pass in 0..MAX_PROXIMITY_PASSES {
        // Snapshot piece geometry.
        #[derive(Clone)]
        struct Entry<R> {
            chain: usize,
            piece: usize,
            len: R,
            bbox: BBox<R>,
            start: crate::geom::Point2<R>,
            end: crate::geom::Point2<R>,
        }
        let mut entries: Vec<Entry<R>> = Vec::new();
        for (ci, chain) in rec.chains.iter().enumerate() {
            for (pi, piece) in chain.pieces.iter().enumerate() {
                entries.push(Entry {
                    chain: ci,
                    piece: pi,
                    len: piece.bez.arclength(),
                    bbox: piece.bez.bbox(),
                    start: piece.bez.start(),
                    end: piece.bez.end(),
                });
            }
        }
        let join_tol = real::<R>(1e-9) * rec.bbox_diag.max(R::min_positive_value());
        let adjacent = |a: &Entry<R>, b: &Entry<R>| -> bool {
            if a.chain == b.chain {
                let m = rec.chains[a.chain].pieces.len();
                let d = if a.piece > b.piece {
                    a.piece - b.piece
                } else {
                    b.piece - a.piece
                };
                if d <= 1 || (rec.chains[a.chain].closed && d == m - 1) {
                    return true;
                }
            }
            a.start.dist(b.start) < join_tol
                || a.start.dist(b.end) < join_tol
                || a.end.dist(b.start) < join_tol
                || a.end.dist(b.end) < join_tol
        };

        let mut to_split: Vec<(usize, usize)> = Vec::new();
        for (i, e) in entries.iter().enumerate() {
            // Nearest non-adjacent piece by sampled curve distance with
            // bounding-box pruning.
            let c_bez = &rec.chains[e.chain].pieces[e.piece].bez;
            let mut dists: Vec<(R, usize)> = Vec::new();
            let mut best = R::infinity();
            for (k, o) in entries.iter().enumerate() {
                if k == i || adjacent(e, o) {
                    continue;
                }
                let lb = e.bbox.dist_to_box(&o.bbox);
                if lb > best {
                    continue;
                }
                let o_bez = &rec.chains[o.chain].pieces[o.piece].bez;
                let mut d = R::infinity();
                for qi in 0..=8 {
                    let t = real::<R>(qi as f64 / 8.0);
                    d = d.min(o_bez.closest_point(c_bez.eval(t)).dist);
                }
                best = best.min(d);
                dists.push((d, k));
            }
            if !best.is_finite() {
                // Isolated piece: nothing to compare against.
                continue;
            }
            // Near-ties in the nearest-piece choice (grid-aligned inputs)
            // resolve to the candidate with the smallest certified distance.
            let window = best * real::<R>(1.05) + real::<R>(1e-12);
            let mut z_best: Option<R> = None;
            let mut o_best = 0usize;
            for &(d, k) in &dists {
                if d > window {
                    continue;
                }
                let o_bez = &rec.chains[entries[k].chain].pieces[entries[k].piece].bez;
                let dh_f = bound_symmetric(c_bez, o_bez, R::zero(), p.max_iterations).bound;
                let dh_r =
                    bound_symmetric(c_bez, &o_bez.reversed(), R::zero(), p.max_iterations).bound;
                let dh = dh_f.min(dh_r);
                if z_best.map_or(true, |zb| dh < zb) {
                    z_best = Some(dh);
                    o_best = k;
                }
            }
            let Some(dh) = z_best else { continue };
            let z = proximity_target(e.len, entries[o_best].len, dh, p.alpha);
            if z > R::zero() && e.len / z > p.alpha {
                to_split.push((e.chain, e.piece));
            }
        }
        if to_split.is_empty() {
            break;
        }
        // Apply splits back-to-front so earlier indices stay valid.
        to_split.sort();
        to_split.reverse();
        for (ci, pi) in to_split {
            rec.chains[ci].split_piece(pi, degree, p.eps, p.max_iterations)?;
        }
        for chain in &mut rec.chains {
            chain.enforce_error(degree, p.eps, p.max_iterations)?;
        }
    }
    Ok(())
}

/// Curvature-weighted centroid of the arc-length cell `[a, b]`.
fn cell_centroid<R: Real>(source: &SourceChain<R>, a: R, b: R) -> R {
    // Composite midpoint-panel quadrature of s*rho and rho with rho = 1 + kappa.
    let panels = 24usize;
    let h = (b - a) / real::<R>(panels as f64);
    let mut num = R::zero();
    let mut den = R::zero();
    for k in 0..panels {
        let s = a + h * (real::<R>(k as f64) + real::<R>(0.5));
        let rho = R::one() + source.curvature_at(s);
        num += s * rho;
        den += rho;
    }
    num / den
}

/// Stage 3: Lloyd iterations moving refinement-stage joints to the
/// curvature-weighted centroids of their arc-length Voronoi cells.
pub fn lloyd_optimize<R: Real>(rec: &mut Reconstruction<R>, p: &ReconParams<R>) -> Result<()> {
    if p.eps <= R::zero() {
        // Zero-tolerance path keeps the exact segmentation.
        return Ok(());
    }
    let degree = rec.degree;
    for _ in 0..p.lloyd_iterations {
        for chain in &mut rec.chains {
            let m = chain.joints.len();
            if m < 2 {
                continue;
            }
            let total = chain.total_len();
            let mut new_s: Vec<R> = chain.joints.iter().map(|j| j.s).collect();
            for j in 0..m {
                if !chain.movable(j) {
                    continue;
                }
                let s = chain.joints[j].s;
                let (prev, next) = if chain.closed {
                    ((j + m - 1) % m, (j + 1) % m)
                } else {
                    (j - 1, j + 1)
                };
                let mut sp = chain.joints[prev].s;
                let mut sn = chain.joints[next].s;
                if chain.closed {
                    if sp >= s {
                        sp -= total;
                    }
                    if sn <= s {
                        sn += total;
                    }
                }
                let a = (sp + s) * real::<R>(0.5);
                let b = (s + sn) * real::<R>(0.5);
                let mut c = cell_centroid(&chain.source, a, b);
                if !(c > a && c < b) {
                    return Err(Error::Internal(
                        "Voronoi centroid left its cell".into(),
                    ));
                }
                if chain.closed {
                    if c < R::zero() {
                        c += total;
                    }
                    if c >= total {
                        c -= total;
                    }
                }
                new_s[j] = c;
            }
            for (j, s) in new_s.into_iter().enumerate() {
                chain.joints[j].s = s;
            }
            if chain.closed {
                chain.normalize_closed_order();
            }
            // Rebuild every piece from the moved joints.
            let jm = chain.joints.len();
            let mut pieces = Vec::with_capacity(chain.pieces.len());
            for i in 0..chain.pieces.len() {
                let (j0, j1) = if chain.closed {
                    (i, (i + 1) % jm)
                } else {
                    (i, i + 1)
                };
                pieces.push(chain.build_piece(
                    chain.joints[j0].s,
                    chain.joints[j1].s,
                    degree,
                    p.eps,
                    p.max_iterations,
                )?);
            }
            chain.pieces = pieces;
            chain.enforce_error(degree, p.eps, p.max_iterations)?;
        }
    }
    Ok(())
}

/// Runs the full reconstruction: corner split, bounded-error approximation,
/// adaptive refinement and Lloyd optimization, with the error bound
/// re-enforced after every step.
pub fn reconstruct<R: Real>(
    net: &CurveNetwork<R>,
    params: &ReconParams<R>,
) -> Result<Reconstruction<R>> {
    let mut rec = split_at_corners(net)?;
    approximate(&mut rec, params)?;
    angular_size_refine(&mut rec, params)?;
    proximity_refine(&mut rec, params)?;
    lloyd_optimize(&mut rec, params)?;
    Ok(rec)
}
