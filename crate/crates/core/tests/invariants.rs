//! Algebraic invariants checked on generated matrices over several fields.

use hyperbracket::matrix::{eval_poly, span_dimension};
use hyperbracket::oracle::random_instance;
use hyperbracket::{decompose, verify_decomposition, Field, Hyperplane, Mat, SolverConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FIELDS: [&str; 6] = ["gf 2", "gf 3", "gf 5", "gf 2 2", "gf 3 2", "q"];

fn field(i: usize) -> Field {
    Field::parse(FIELDS[i]).unwrap()
}

/// Random matrices tend to be cyclic; mixing in a low-rank part and a
/// scalar produces derogatory ones as well.
fn sample(f: &Field, n: usize, seed: u64) -> Mat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = Mat::random(f, n, &mut rng);
    match seed % 3 {
        0 => m,
        1 => {
            let u = Mat::random(f, n, &mut rng);
            let mut low = Mat::zeros(f, n);
            for j in 0..n {
                low.set(0, j, u.get(0, j).clone());
            }
            low.add_scaled(&f.random(&mut rng), &Mat::identity(f, n))
        }
        _ => Mat::random_invertible(f, n, &mut rng).conjugate(&Mat::jordan(f, n)).unwrap(),
    }
}

fn inputs() -> impl Strategy<Value = (usize, usize, u64)> {
    (0..FIELDS.len(), 1usize..5, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn centralizer_and_image_dimensions_add_up((fi, n, seed) in inputs()) {
        let f = field(fi);
        let m = sample(&f, n, seed);
        let images: Vec<Mat> = (0..n * n)
            .map(|k| m.commutator(&Mat::unit(&f, n, k / n, k % n)).unwrap())
            .collect();
        prop_assert_eq!(m.centralizer_basis().len() + span_dimension(&images), n * n);
    }

    #[test]
    fn characteristic_and_minimal_polynomials_annihilate((fi, n, seed) in inputs()) {
        let f = field(fi);
        let m = sample(&f, n, seed);
        let chi = m.char_poly();
        let mu = m.min_poly();
        prop_assert_eq!(chi.degree(), Some(n));
        prop_assert!(eval_poly(&chi, &m).is_zero());
        prop_assert!(eval_poly(&mu, &m).is_zero());
        prop_assert!(mu.divides(&chi));
        prop_assert_eq!(m.is_cyclic(), mu.degree() == Some(n));
    }

    #[test]
    fn image_criteria_agree((fi, n, seed) in inputs(), other in any::<u64>()) {
        let f = field(fi);
        let m = sample(&f, n, seed);
        // Half the targets are commutators with m, so both answers occur.
        let mut t = sample(&f, n, other);
        if other % 2 == 0 {
            t = m.commutator(&t).unwrap();
        }
        let by_centralizer = m.in_image_ad(&t).unwrap();
        let solved = m.solve_commutator_equation(&t);
        prop_assert_eq!(by_centralizer, solved.is_some());
        if let Some(x) = solved {
            prop_assert_eq!(m.commutator(&x).unwrap(), t.clone());
        }
        if m.is_cyclic() {
            prop_assert_eq!(m.in_image_ad_cyclic(&t).unwrap(), by_centralizer);
        } else {
            prop_assert!(m.in_image_ad_cyclic(&t).is_err());
        }
    }

    #[test]
    fn landing_is_idempotent((fi, n, seed) in inputs(), other in any::<u64>()) {
        let f = field(fi);
        let b = sample(&f, n, seed);
        prop_assume!(!b.is_zero());
        let h = Hyperplane::new(b).unwrap();
        let x = sample(&f, n, other);
        let c = sample(&f, n, other.wrapping_add(1));
        prop_assume!(!h.contains(&c).unwrap());
        let landed = h.land_on(&x, &c).unwrap();
        prop_assert!(h.contains(&landed).unwrap());
        prop_assert_eq!(h.land_on(&landed, &c).unwrap(), landed.clone());
        // The landed point differs from x by a multiple of c.
        prop_assert!(span_dimension(&[landed.try_sub(&x).unwrap(), c]) <= 1);
    }

    #[test]
    fn solver_output_verifies((fi, n, seed) in (2usize..FIELDS.len(), 2usize..5, any::<u64>())) {
        let f = field(fi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&f, n, &mut rng, seed % 2 == 0);
        let h = Hyperplane::new(inst.b.clone()).unwrap();
        let out = decompose(&inst.a, &h, &SolverConfig::with_seed(seed)).unwrap();
        // At least four elements: every instance with n >= 3 decomposes. For
        // n = 2 the bracket set can be a line.
        if n >= 3 {
            let d = out.decomposition().expect("decomposes");
            prop_assert!(verify_decomposition(&inst.a, &h, d.a1(), d.a2()).is_ok());
        } else if let Some(d) = out.decomposition() {
            prop_assert!(verify_decomposition(&inst.a, &h, d.a1(), d.a2()).is_ok());
        }
    }
}
