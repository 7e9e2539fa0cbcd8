#![allow(dead_code)]

use asthreshold::{AbsorbingSetSpec, Rational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FIXTURES: [&str; 5] = ["as_4_4", "as_5_3", "as_4_0", "as_7_3", "as_6_4"];

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Random elementary absorbing set on `a` VNs: every VN gets 2 or 3 internal
/// CNs (random pairing of edge stubs, parallel CNs allowed) and fills its
/// remaining degree with unsatisfied CNs.
pub fn random_as(seed: u64, a: usize) -> AbsorbingSetSpec {
    assert!(a >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let deg: Vec<usize> = (0..a).map(|_| rng.gen_range(2..=3)).collect();
        if deg.iter().sum::<usize>() % 2 == 1 {
            continue;
        }
        let mut stubs: Vec<usize> = deg.iter().enumerate().flat_map(|(v, &d)| vec![v; d]).collect();
        stubs.shuffle(&mut rng);
        let pairs: Vec<Vec<usize>> = stubs.chunks(2).map(|c| vec![c[0], c[1]]).collect();
        if pairs.iter().any(|p| p[0] == p[1]) {
            continue;
        }
        let mut cns = pairs;
        for (v, &d) in deg.iter().enumerate() {
            for _ in d..3 {
                cns.push(vec![v]);
            }
        }
        cns.shuffle(&mut rng);
        return AbsorbingSetSpec::new(format!("rand_{seed}_{a}"), a, cns, None).unwrap();
    }
}

/// Same set with VNs renamed by `perm` and CNs listed in a rotated order.
pub fn relabel(spec: &AbsorbingSetSpec, perm: &[usize], rotate: usize) -> AbsorbingSetSpec {
    let mut cns: Vec<Vec<usize>> = spec
        .check_nodes
        .iter()
        .map(|c| c.iter().map(|&v| perm[v]).collect())
        .collect();
    let k = rotate % cns.len().max(1);
    cns.rotate_left(k);
    AbsorbingSetSpec::new(spec.name.clone(), spec.a, cns, None).unwrap()
}
