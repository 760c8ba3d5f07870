//! Input generators shared by the criterion benchmarks.

use permred::boolcirc::Repr;
use permred::{BigInt, BoolFunc, HpComplex, Matrix, Precision};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n×n` integers in `[-bound, bound]`, reproducible from `seed`.
pub fn int_matrix(n: usize, bound: i64, seed: u64) -> Matrix<BigInt> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Matrix::from_fn(n, n, (), |_, _| BigInt::from(rng.gen_range(-bound..=bound)))
}

/// Wide integers like the ones a truncated mode matrix produces.
pub fn wide_int_matrix(n: usize, bits: u32, seed: u64) -> Matrix<BigInt> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Matrix::from_fn(n, n, (), |_, _| {
        let mut x = BigInt::from(rng.gen_range(-1i64..=1));
        for _ in 0..bits.div_ceil(32) {
            x = (x << 32u32) + rng.gen::<u32>();
        }
        x
    })
}

pub fn hp_matrix(n: usize, prec: Precision, seed: u64) -> Matrix<HpComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Matrix::from_fn(n, n, prec, |_, _| {
        HpComplex::from_f64(prec, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_table(n: u32, seed: u64) -> BoolFunc {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    BoolFunc::new(
        n,
        Repr::TruthTable((0..1usize << n).map(|_| rng.gen()).collect()),
    )
    .expect("table size")
}
