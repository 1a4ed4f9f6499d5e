//! Targets with special structure, conjugated at random, against random
//! normals: the shapes random sampling almost never produces.

use std::collections::BTreeMap;

use hyperbracket::oracle::random_instance;
use hyperbracket::{decompose, Elem, Field, Hyperplane, Mat, SolverConfig, Strategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Block-diagonal sum of `lambda I_k + J_k` blocks.
fn jordan_form(f: &Field, blocks: &[(usize, Elem)]) -> Mat {
    let n: usize = blocks.iter().map(|b| b.0).sum();
    let mut m = Mat::zeros(f, n);
    let mut at = 0;
    for (k, l) in blocks {
        for i in 0..*k {
            m.set(at + i, at + i, l.clone());
            if i + 1 < *k {
                m.set(at + i, at + i + 1, f.one());
            }
        }
        at += k;
    }
    m
}

fn shapes(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> Vec<Mat> {
    let mut out = Vec::new();
    // Partitions of n into nilpotent blocks, and with one eigenvalue shift.
    let parts: Vec<Vec<usize>> = match n {
        3 => vec![vec![3], vec![2, 1], vec![1, 1, 1]],
        4 => vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]],
        _ => vec![vec![5], vec![4, 1], vec![3, 2], vec![2, 2, 1], vec![1; 5]],
    };
    for p in parts {
        let c = f.random(rng);
        let blocks: Vec<(usize, Elem)> = p.iter().map(|&k| (k, c.clone())).collect();
        out.push(jordan_form(f, &blocks));
        let d = f.random(rng);
        let mut blocks = blocks;
        blocks[0].1 = d;
        out.push(jordan_form(f, &blocks));
    }
    // Rank-one perturbations of scalars and diagonal matrices.
    let u: Vec<Elem> = (0..n).map(|_| f.random(rng)).collect();
    let v: Vec<Elem> = (0..n).map(|_| f.random(rng)).collect();
    let c = f.random(rng);
    out.push(Mat::from_fn(f, n, |i, j| {
        let d = if i == j { c.clone() } else { f.zero() };
        f.add(&d, &f.mul(&u[i], &v[j]))
    }));
    let diag: Vec<Elem> = (0..n).map(|_| f.random(rng)).collect();
    out.push(Mat::diag(f, &diag));
    // Shift every shape to trace zero when possible, otherwise drop it.
    out.into_iter()
        .filter_map(|m| {
            let t = m.trace();
            if f.is_zero(&t) {
                return Some(m);
            }
            let dim = f.from_i64(n as i64);
            let c = f.div(&t, &dim).ok()?;
            Some(m.add_scaled(&f.neg(&c), &Mat::identity(f, n)))
        })
        .collect()
}

#[test]
fn structured_targets_decompose() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut hist: BTreeMap<String, usize> = BTreeMap::new();
    for desc in ["gf 2 2", "gf 5", "gf 3 2", "gf 7", "q"] {
        let f = Field::parse(desc).unwrap();
        for n in [3, 4, 5] {
            for _ in 0..6 {
                for shape in shapes(&f, n, &mut rng) {
                    let p = Mat::random_invertible(&f, n, &mut rng);
                    let a = p.conjugate(&shape).unwrap();
                    for trace_zero in [true, false] {
                        let b = random_instance(&f, n, &mut rng, trace_zero).b;
                        let h = Hyperplane::new(b).unwrap();
                        let seed = rng.gen();
                        let out = decompose(&a, &h, &SolverConfig::with_seed(seed)).unwrap();
                        let d = out.decomposition().unwrap_or_else(|| panic!("{desc} n={n} {a:?} {h:?}: {out:?}"));
                        *hist.entry(format!("{desc} {}", d.strategy())).or_default() += 1;
                        if f.cardinality().is_none_or(|q| q >= 4) {
                            assert_ne!(d.strategy(), Strategy::Exhaustive, "{desc} n={n}");
                        }
                    }
                }
            }
        }
    }
    eprintln!("{hist:#?}");
}
