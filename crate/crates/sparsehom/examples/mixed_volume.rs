//! Mixed volumes by three independent routes.
//!
//! `cargo run --example mixed_volume`

use sparsehom::mixedvol::{defect, mixed_volume, MvMethod};
use sparsehom::polytope::convex_hull_int;

fn main() {
    let square = convex_hull_int(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
    let simplex = convex_hull_int(&[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
    let skew = convex_hull_int(&[vec![0, 0], vec![1, 2], vec![2, 1]]).unwrap();

    for (name, tuple) in [("square, simplex", vec![square.clone(), simplex]), ("square, skew triangle", vec![square, skew])] {
        println!("{name}:");
        for m in [MvMethod::AlternatingVolume, MvMethod::LatticePoints, MvMethod::MixedCells] {
            println!("  {m:?}: {}", mixed_volume(&tuple, m).unwrap());
        }
    }

    // Two parallel segments are not essential, so their mixed volume is 0.
    let seg = convex_hull_int(&[vec![0, 0], vec![1, 0]]).unwrap();
    let pair = [seg.clone(), seg];
    println!("parallel segments: defect {}, MV {}", defect(&pair), mixed_volume(&pair, MvMethod::AlternatingVolume).unwrap());
}
