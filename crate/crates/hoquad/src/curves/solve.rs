//! Small dense linear solves for basis conversion.

use crate::geom::Point2;
use crate::scalar::Real;

/// Solves `M x = rhs` by Gaussian elimination with partial pivoting.
fn solve_one<R: Real>(m: &[Vec<R>], rhs: &[R]) -> Vec<R> {
    let n = m.len();
    let mut a: Vec<Vec<R>> = m.iter().cloned().collect();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let diag = a[col][col];
        debug_assert!(diag != R::zero(), "singular conversion matrix");
        for row in col + 1..n {
            let f = a[row][col] / diag;
            if f == R::zero() {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] = a[row][k] - f * v;
            }
            let bv = b[col];
            b[row] = b[row] - f * bv;
        }
    }
    let mut x = vec![R::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc = acc - a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

fn mat_vec<R: Real>(m: &[Vec<R>], x: &[R]) -> Vec<R> {
    m.iter()
        .map(|row| {
            let mut acc = R::zero();
            for (a, b) in row.iter().zip(x) {
                acc += *a * *b;
            }
            acc
        })
        .collect()
}

/// Solves `M q = p` per coordinate with one step of iterative refinement,
/// which keeps basis-conversion residuals at machine precision for the
/// degrees used here.
pub fn solve_points<R: Real>(m: &[Vec<R>], p: &[Point2<R>]) -> Vec<Point2<R>> {
    let solve_coord = |rhs: Vec<R>| -> Vec<R> {
        let mut x = solve_one(m, &rhs);
        let mx = mat_vec(m, &x);
        let res: Vec<R> = rhs.iter().zip(&mx).map(|(r, v)| *r - *v).collect();
        let dx = solve_one(m, &res);
        for (xi, di) in x.iter_mut().zip(dx) {
            *xi += di;
        }
        x
    };
    let xs = solve_coord(p.iter().map(|q| q.x).collect());
    let ys = solve_coord(p.iter().map(|q| q.y).collect());
    xs.into_iter()
        .zip(ys)
        .map(|(x, y)| Point2::new(x, y))
        .collect()
}
