//! Fixed inputs shared by the benchmarks.

use hyperbracket::{Field, Hyperplane, Mat, SweepConfig};

/// Instance `index` of the seeded sweep over `field` in dimension `n`, with
/// `I` inside the hyperplane so the structured stages do the work.
pub fn instance(field: &str, n: usize, index: u64) -> (Mat, Hyperplane) {
    let f = Field::parse(field).expect("field descriptor");
    let mut config = SweepConfig::new(f, n, index + 1, 7);
    config.force_identity_in_h = true;
    let inst = config.instance(index);
    let h = Hyperplane::new(inst.b).expect("nonzero normal");
    (inst.a, h)
}
