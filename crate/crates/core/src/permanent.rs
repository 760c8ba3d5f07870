//! Permanent engines.
//!
//! [`per_naive`] sums over all `N!` permutations and is the reference
//! oracle. [`per_ryser`] is the production kernel: Ryser's inclusion–exclusion
//!
//! ```text
//! Per(A) = (-1)^N · Σ_{S ⊆ [N]} (-1)^|S| · Π_i Σ_{j ∈ S} a_ij
//! ```
//!
//! with subsets visited in binary-reflected Gray-code order, so each step
//! adds or removes one column from the running row sums.
//!
//! The subset range is split into a fixed number of contiguous chunks that
//! depends only on `N`. Chunks may be evaluated concurrently; their partial
//! sums are always combined in ascending chunk order, so floating results do
//! not depend on the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{expand_submatrix, FockState};
use crate::matrix::Matrix;
use crate::numerics::Scalar;

pub const NAIVE_MAX: usize = 9;
pub const RYSER_MAX: usize = 32;

/// Upper bound on the chunk count of the Ryser sum.
const MAX_CHUNK_LOG2: usize = 6;

/// Scalar operations performed by Ryser on an `n × n` matrix, `2^n · n`.
pub fn ryser_cost(n: usize) -> u128 {
    (1u128 << n) * n as u128
}

fn check_square<T: Scalar>(a: &Matrix<T>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::invalid(format!(
            "permanent of a non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

/// Permanent by direct enumeration of all permutations.
pub fn per_naive<T: Scalar>(a: &Matrix<T>) -> Result<T> {
    check_square(a)?;
    let n = a.rows();
    if n > NAIVE_MAX {
        return Err(Error::budget(
            "naive permanent size",
            n as u64,
            NAIVE_MAX as u64,
        ));
    }
    let ctx = a.ctx();
    let mut total = T::zero(ctx);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut add_term = |perm: &[usize]| {
        let mut term = T::one(ctx);
        for (i, &j) in perm.iter().enumerate() {
            term.mul_assign_ref(&a[(i, j)]);
        }
        total.add_assign_ref(&term);
    };
    // Heap's algorithm, iterative form.
    add_term(&perm);
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            add_term(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(total)
}

/// Permanent by Ryser's formula with Gray-code updates.
pub fn per_ryser<T: Scalar>(a: &Matrix<T>) -> Result<T> {
    let chunk_log2 = a.rows().min(MAX_CHUNK_LOG2);
    per_ryser_chunked(a, 1 << chunk_log2)
}

/// [`per_ryser`] with an explicit number of contiguous subset chunks.
pub fn per_ryser_chunked<T: Scalar>(a: &Matrix<T>, chunks: usize) -> Result<T> {
    check_square(a)?;
    let n = a.rows();
    if n > RYSER_MAX {
        return Err(Error::Budget {
            what: "Ryser permanent size",
            requested: n as u64,
            limit: RYSER_MAX as u64,
            estimate: Some(format!("2^{n}·{n} = {} scalar operations", ryser_cost(n))),
        });
    }
    let ctx = a.ctx();
    if n == 0 {
        return Ok(T::one(ctx));
    }
    let total_steps: u64 = 1 << n;
    let chunks = (chunks.max(1) as u64).min(total_steps);
    let bounds: Vec<(u64, u64)> = (0..chunks)
        .map(|c| (total_steps * c / chunks, total_steps * (c + 1) / chunks))
        .collect();
    let partials: Vec<T> = bounds
        .par_iter()
        .map(|&(lo, hi)| ryser_range(a, lo, hi))
        .collect();
    let mut total = T::zero(ctx);
    for p in &partials {
        total.add_assign_ref(p);
    }
    if n % 2 == 1 {
        total.neg_mut();
    }
    Ok(total)
}

/// `Per(U_{S,T})`: the permanent of `U` with row `i` repeated `sᵢ` times and
/// column `j` repeated `tⱼ` times.
pub fn per_expanded<T: Scalar>(u: &Matrix<T>, s: &FockState, t: &FockState) -> Result<T> {
    per_ryser(&expand_submatrix(u, s, t)?)
}

/// Sum of `(-1)^|S| Π_i rowsum_i(S)` over Gray-code steps `k ∈ [lo, hi)`,
/// where step `k` visits the subset `k ^ (k >> 1)`.
fn ryser_range<T: Scalar>(a: &Matrix<T>, lo: u64, hi: u64) -> T {
    let n = a.rows();
    let ctx = a.ctx();
    let gray = |k: u64| k ^ (k >> 1);

    let mut sums = vec![T::zero(ctx); n];
    let start = gray(lo);
    for j in (0..n).filter(|j| start >> j & 1 == 1) {
        for (i, s) in sums.iter_mut().enumerate() {
            s.add_assign_ref(&a[(i, j)]);
        }
    }

    let mut acc = T::zero(ctx);
    let mut k = lo;
    loop {
        let subset = gray(k);
        // The empty subset contributes a product of empty sums, i.e. zero.
        if subset != 0 {
            let mut term = sums[0].clone();
            for s in &sums[1..] {
                if term.is_zero() {
                    break;
                }
                term.mul_assign_ref(s);
            }
            if subset.count_ones() % 2 == 1 {
                acc.sub_assign_ref(&term);
            } else {
                acc.add_assign_ref(&term);
            }
        }
        k += 1;
        if k >= hi {
            break;
        }
        let j = k.trailing_zeros() as usize;
        let entering = gray(k) >> j & 1 == 1;
        for (i, s) in sums.iter_mut().enumerate() {
            if entering {
                s.add_assign_ref(&a[(i, j)]);
            } else {
                s.sub_assign_ref(&a[(i, j)]);
            }
        }
    }
    acc
}
