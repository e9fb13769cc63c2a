use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsehom::mixedvol::mixed_volume_of_supports;
use sparsehom::polyhedral::{random_system, sparse_solve};
use sparsehom::tracker::TrackerConfig;
use sparsehom::{SparsePoly, SparseSystem};

fn random_supports(rng: &mut ChaCha8Rng) -> Vec<Vec<Vec<i64>>> {
    (0..2)
        .map(|_| {
            let m = rng.gen_range(3..=5);
            let mut a: Vec<Vec<i64>> = (0..m).map(|_| vec![rng.gen_range(0..=4), rng.gen_range(0..=4)]).collect();
            a.sort();
            a.dedup();
            a
        })
        .collect()
}

#[test]
fn solution_counts_match_mixed_volume() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 50 {
        let supports = random_supports(&mut rng);
        let mv = mixed_volume_of_supports(&supports).unwrap();
        if mv == 0 {
            continue;
        }
        let f = random_system(&supports, checked);
        let rep = sparse_solve(&f, &TrackerConfig { seed: checked, ..Default::default() }).unwrap();
        assert_eq!(rep.solutions.len() as i64, mv, "system {checked}: {supports:?}");
        checked += 1;
    }
}

#[test]
fn solutions_off_the_torus_are_excluded() {
    // x (y - 1) = 0, x + y = 2: (0, 2) is off the torus, (1, 1) is not.
    let f = SparseSystem::new(vec![
        SparsePoly::from_pairs(2, &[(1.0, &[1, 1][..]), (-1.0, &[1, 0])]),
        SparsePoly::from_pairs(2, &[(1.0, &[1, 0][..]), (1.0, &[0, 1]), (-2.0, &[0, 0])]),
    ])
    .unwrap();
    let rep = sparse_solve(&f, &TrackerConfig::default()).unwrap();
    assert_eq!(rep.solutions.len(), 1);
    assert!((rep.solutions[0][0].re - 1.0).abs() < 1e-8 && (rep.solutions[0][1].re - 1.0).abs() < 1e-8);
}
