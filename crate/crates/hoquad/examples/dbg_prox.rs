use hoquad::curves::LagrangeSegment;
use hoquad::geom::Point2;
use hoquad::network::{CurveNetwork, NetworkSegment, Region, SegRef};
use hoquad::reconstruct::{approximate, proximity_refine, split_at_corners, ReconParams};

type P = Point2<f64>;
fn pt(x: f64, y: f64) -> P { P::new(x, y) }
fn quad_seg(a: P, b: P) -> LagrangeSegment<f64> {
    LagrangeSegment::new(vec![a, a.midpoint(b), b]).unwrap()
}

fn main() {
    let a = pt(0.0, 0.0); let b = pt(1.0, 0.0); let c = pt(1.0, 0.08); let d = pt(0.0, 0.08);
    let segments = vec![
        NetworkSegment { curve: quad_seg(a, b), start_joint: 0, end_joint: 1 },
        NetworkSegment { curve: quad_seg(b, c), start_joint: 1, end_joint: 2 },
        NetworkSegment { curve: quad_seg(c, d), start_joint: 2, end_joint: 3 },
        NetworkSegment { curve: quad_seg(d, a), start_joint: 3, end_joint: 0 },
    ];
    let regions = vec![Region { id: 0, loops: vec![(0..4).map(|seg| SegRef { seg, reversed: false }).collect()] }];
    let net = CurveNetwork::new(segments, regions).unwrap();
    let mut rec = split_at_corners(&net).unwrap();
    let p = ReconParams { eps: 1e-3, lt: 10.0, tau: std::f64::consts::FRAC_PI_4, alpha: 2.3, max_iterations: 20, lloyd_iterations: 5 };
    approximate(&mut rec, &p).unwrap();
    for (ci, ch) in rec.chains.iter().enumerate() {
        println!("chain {ci}: pieces={} len={:.3} start={:?} end={:?}", ch.pieces.len(),
            ch.pieces.iter().map(|q| q.bez.arclength()).sum::<f64>(),
            ch.pieces[0].bez.start(), ch.pieces.last().unwrap().bez.end());
    }
    proximity_refine(&mut rec, &p).unwrap();
    for (ci, ch) in rec.chains.iter().enumerate() {
        let lens: Vec<f64> = ch.pieces.iter().map(|q| q.bez.arclength()).collect();
        println!("after: chain {ci}: {:?}", lens);
    }
}
