//! On trees (and graphs simulated by small trees) some small coalition can
//! always force a coin.

use fairring::treesim::*;

fn main() {
    for (name, p) in [("constant 1", constant(1)), ("dictator", dictator()), ("xor", xor())] {
        let set = assure_search_two_party(&p).unwrap();
        let pairs: Vec<_> = set.iter().map(|d| (d.coalition[0], d.bit)).collect();
        println!("{name:<10} assured {pairs:?}, two-sided {}", two_side_holds(&set));
    }

    let path = parity_walk(&Graph::path(4));
    let r = tree_assure_search(&path).unwrap();
    println!("parity walk on P4: processor {} assures {} after folds {:?}", r.processor, r.bit, r.folds);

    let g = Graph::new(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]).unwrap();
    let sim = decompose_half(&g).unwrap();
    println!("two triangles: parts {:?}, k = {}", sim.parts(), sim.k);
    let c = coalition_via_tree(&parity_walk(&g), &sim).unwrap();
    println!("coalition {:?} forces {}", c.deviation.coalition, c.deviation.bit);

    let n = for_each_two_party(2, [2, 2], |p| assert!(two_side_holds(&assure_search_two_party(p).unwrap())));
    println!("{n} depth-2 protocols checked");
}
