use hoquad::geom::Point2;
use hoquad::high_order::{mvc, QuadElement};
use hoquad::quality::evaluate_element;

type P = Point2<f64>;
fn pt(x: f64, y: f64) -> P { P::new(x, y) }

fn main() {
    for h in [0.3, 0.45, 0.55, 0.65, 0.75, 0.85] {
        // n=2 identity square, snap bottom midnode up to (0.5, h).
        let mut nodes: Vec<P> = (0..3)
            .flat_map(|j| (0..3).map(move |i| pt(i as f64 / 2.0, j as f64 / 2.0)))
            .collect();
        let pre = QuadElement::new(2, nodes.clone()).unwrap();
        nodes[1] = pt(0.5, h); // bottom edge midnode
        let snapped = QuadElement::new(2, nodes.clone()).unwrap();
        let q_pre = evaluate_element(&pre);
        let q_snap = evaluate_element(&snapped);
        // MVC deform the face node (index 4).
        let source = pre.boundary_polygon();
        let target = snapped.boundary_polygon();
        let max_disp = source.iter().zip(&target).map(|(a,b)| a.dist(*b)).fold(0.0f64, f64::max);
        let steps = (max_disp / (0.1 * snapped.diameter())).ceil().max(1.0) as usize;
        let interior = vec![pre.node(1, 1)];
        match mvc::composite_deform(&source, &target, &interior, steps) {
            Ok(moved) => {
                let mut nodes2 = nodes.clone();
                nodes2[4] = moved[0];
                let fixed = QuadElement::new(2, nodes2).unwrap();
                let q_fix = evaluate_element(&fixed);
                println!("h={h}: pre={:.3} snap={:.3} mvc={:.3} (face {:?} steps {steps})",
                    q_pre.min_jm, q_snap.min_jm, q_fix.min_jm, moved[0]);
            }
            Err(e) => println!("h={h}: snap={:.3} mvc failed: {e}", q_snap.min_jm),
        }
    }
}
