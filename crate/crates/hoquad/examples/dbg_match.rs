use mwmatching::{Matching, Edges};

fn main() {
    // wikipedia-ish sanity: path graph 0-1-2-3 weights favor (0-1),(2-3)
    let edges: Edges = vec![(0, 1, 5), (1, 2, 1), (2, 3, 5)];
    let mates = Matching::new(edges).max_cardinality().solve();
    println!("{mates:?}");
    let edges2: Edges = vec![(0, 1, 10), (1, 2, 20), (2, 3, 10)];
    println!("{:?}", Matching::new(edges2).max_cardinality().solve());
    // odd cycle (blossom): triangle
    let edges3: Edges = vec![(0, 1, 3), (1, 2, 3), (0, 2, 3)];
    println!("{:?}", Matching::new(edges3).max_cardinality().solve());
}
