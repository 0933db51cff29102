//! End-to-end orchestration: reconstruct, triangulate, match and merge,
//! subdivide, lift to high order, deform, certify, report.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::high_order::{deform_interiors, elevate_to_order, snap_boundary_nodes, HighOrderQuadMesh};
use crate::linear_mesh::{
    build_dual_and_match, merge_and_subdivide, split_double_tagged_triangles, triangulate,
    LinearMesh,
};
use crate::network::CurveNetwork;
use crate::quality::{assess, QualityReport};
use crate::reconstruct::{reconstruct, ReconParams, Reconstruction};
use crate::scalar::{real, Real};

/// Requested polynomial order of the output mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshOrder {
    /// Match the input curve degree.
    Auto,
    Fixed(usize),
}

/// Pipeline parameters. `lt` and `eps` are relative to the input
/// bounding-box diagonal unless `absolute_units` is set.
#[derive(Debug, Clone, Copy)]
pub struct PipelineConfig {
    pub lt: f64,
    pub eps: f64,
    pub tau: f64,
    pub alpha: f64,
    pub max_iterations: usize,
    pub lloyd_iterations: usize,
    pub order: MeshOrder,
    pub absolute_units: bool,
    /// Reserved for randomized tie-breaks; every stage is currently
    /// deterministic, so the seed has no effect on the output.
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            lt: 0.05,
            eps: 0.001,
            tau: std::f64::consts::FRAC_PI_4,
            alpha: 2.3,
            max_iterations: 20,
            lloyd_iterations: 5,
            order: MeshOrder::Auto,
            absolute_units: false,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "target length must be positive, got {}",
                self.lt
            )));
        }
        if !(self.eps >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "geometric tolerance must be nonnegative, got {}",
                self.eps
            )));
        }
        if !(self.tau > 0.0 && self.tau < std::f64::consts::PI) {
            return Err(Error::InvalidArgument(format!(
                "angular threshold must lie in (0, pi), got {}",
                self.tau
            )));
        }
        if !(self.alpha > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "density parameter must exceed 1, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Intermediate artifacts for inspection and debug rendering.
#[derive(Debug, Clone)]
pub struct StageArtifacts<R> {
    pub reconstruction: Reconstruction<R>,
    pub triangulation: LinearMesh<R>,
    pub matching: Vec<Option<usize>>,
    pub linear_mesh: LinearMesh<R>,
}

#[derive(Debug, Clone)]
pub struct PipelineResult<R> {
    pub mesh: HighOrderQuadMesh<R>,
    pub report: QualityReport,
    pub artifacts: StageArtifacts<R>,
}

/// Runs the full meshing pipeline. Deterministic for identical inputs.
pub fn run<R: Real>(net: &CurveNetwork<R>, cfg: &PipelineConfig) -> Result<PipelineResult<R>> {
    cfg.validate()?;
    let total_start = Instant::now();
    let diag = net.bbox().diag().to_f64().expect("finite bbox");
    if !(diag > 0.0) {
        return Err(Error::Degenerate("input has an empty bounding box".into()));
    }
    let scale = if cfg.absolute_units { 1.0 } else { diag };
    let order = match cfg.order {
        MeshOrder::Auto => net.degree(),
        MeshOrder::Fixed(n) => {
            if n != net.degree() {
                return Err(Error::InvalidArgument(format!(
                    "requested order {n} does not match the input degree {} \
                     (mixed orders are unsupported; use auto)",
                    net.degree()
                )));
            }
            n
        }
    };
    if order < 2 {
        return Err(Error::InvalidArgument(format!(
            "input degree {order} is below the minimum mesh order 2"
        )));
    }

    net.validate_no_overlap(24)
        .map_err(|e| e.in_stage("input validation"))?;

    let params = ReconParams {
        eps: real::<R>(cfg.eps * scale),
        lt: real::<R>(cfg.lt * scale),
        tau: real::<R>(cfg.tau),
        alpha: real::<R>(cfg.alpha),
        max_iterations: cfg.max_iterations,
        lloyd_iterations: cfg.lloyd_iterations,
    };

    let mut stage_seconds = std::collections::BTreeMap::new();
    let t0 = Instant::now();
    let rec = reconstruct(net, &params).map_err(|e| e.in_stage("reconstruction"))?;
    stage_seconds.insert("reconstruct".to_string(), t0.elapsed().as_secs_f64());

    let t0 = Instant::now();
    let mut tri_mesh = triangulate(&rec, params.lt).map_err(|e| e.in_stage("triangulation"))?;
    split_double_tagged_triangles(&mut tri_mesh);
    stage_seconds.insert("triangulate".to_string(), t0.elapsed().as_secs_f64());

    let t0 = Instant::now();
    let matching = build_dual_and_match(&tri_mesh);
    stage_seconds.insert("match".to_string(), t0.elapsed().as_secs_f64());

    let t0 = Instant::now();
    let linear = merge_and_subdivide(&tri_mesh, &matching, &rec)
        .map_err(|e| e.in_stage("merge/subdivide"))?;
    stage_seconds.insert("subdivide".to_string(), t0.elapsed().as_secs_f64());

    let t0 = Instant::now();
    let mut mesh = elevate_to_order(&linear, order).map_err(|e| e.in_stage("elevation"))?;
    let pre_snap = mesh.nodes.clone();
    snap_boundary_nodes(&mut mesh, &rec).map_err(|e| e.in_stage("boundary snap"))?;
    deform_interiors(&mut mesh, &pre_snap).map_err(|e| e.in_stage("deformation"))?;
    stage_seconds.insert("lift".to_string(), t0.elapsed().as_secs_f64());

    let t0 = Instant::now();
    let mut report = assess(&mesh, &rec);
    stage_seconds.insert("assess".to_string(), t0.elapsed().as_secs_f64());
    report.stage_seconds = stage_seconds;
    report.global.wall_time_seconds = total_start.elapsed().as_secs_f64();
    report.global.flagged_after_projection = linear.flagged_inverted.len();

    Ok(PipelineResult {
        mesh,
        report,
        artifacts: StageArtifacts {
            reconstruction: rec,
            triangulation: tri_mesh,
            matching,
            linear_mesh: linear,
        },
    })
}
