//! Brute-force photon-number simulator.
//!
//! For an `m × m` mode transformation `U`, the induced action on `n`-photon
//! Fock states has entries
//!
//! ```text
//! ⟨S|φ(U)|T⟩ = Per(U_{S,T}) / √(s₁!⋯s_m! · t₁!⋯t_m!)
//! ```
//!
//! where `U_{S,T}` repeats row `i` of `U` `sᵢ` times and column `j` `tⱼ` times.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rug::Float;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numerics::{factorial, BigInt, HpComplex, Precision, Scalar};
use crate::permanent::per_ryser;

pub const MAX_BASIS: usize = 1_000_000;
pub const MAX_PHI_BASIS: usize = 2000;

/// Occupation numbers `(s₁, …, s_m)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockState(pub Vec<u32>);

impl FockState {
    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn photons(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Mode indices in ascending order, each repeated by its occupation.
    pub fn expanded_indices(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &s)| std::iter::repeat_n(i, s as usize))
            .collect()
    }

    /// `s₁!⋯s_m!`.
    pub fn factorial_product(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::from(1), |acc, &s| acc * factorial(s))
    }
}

impl From<&[u32]> for FockState {
    fn from(s: &[u32]) -> Self {
        FockState(s.to_vec())
    }
}

/// All `n`-photon states over `m` modes in ascending lexicographic order.
#[derive(Clone, Debug)]
pub struct OccupancyBasis {
    m: usize,
    n: u32,
    states: Vec<FockState>,
}

impl OccupancyBasis {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, s: &FockState) -> Option<usize> {
        self.states.binary_search(s).ok()
    }
}

/// `C(m + n − 1, n)`, saturating at `u64::MAX`.
pub fn basis_size(m: usize, n: u32) -> u64 {
    if m == 0 {
        return u64::from(n == 0);
    }
    let total = BigInt::from(m as u64 + n as u64 - 1);
    total.binomial(n).to_u64().unwrap_or(u64::MAX)
}

pub fn enum_basis(m: usize, n: u32) -> Result<OccupancyBasis> {
    let size = basis_size(m, n);
    if size > MAX_BASIS as u64 {
        return Err(Error::budget("Fock basis size", size, MAX_BASIS as u64));
    }
    let mut states = Vec::with_capacity(size as usize);
    let mut cur = vec![0u32; m];
    fill(&mut cur, 0, n, &mut states);
    Ok(OccupancyBasis { m, n, states })
}

fn fill(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<FockState>) {
    if pos + 1 >= cur.len() {
        if let Some(last) = cur.last_mut() {
            *last = left;
            out.push(FockState(cur.clone()));
        } else if left == 0 {
            out.push(FockState(Vec::new()));
        }
        return;
    }
    for v in 0..=left {
        cur[pos] = v;
        fill(cur, pos + 1, left - v, out);
    }
}

/// `U_{S,T}`.
pub fn expand_submatrix<T: Scalar>(
    u: &Matrix<T>,
    s: &FockState,
    t: &FockState,
) -> Result<Matrix<T>> {
    if s.photons() != t.photons() {
        return Err(Error::invalid(format!(
            "photon counts differ: {} vs {}",
            s.photons(),
            t.photons()
        )));
    }
    if s.modes() != u.rows() || t.modes() != u.cols() {
        return Err(Error::invalid(format!(
            "states over {}/{} modes do not fit a {}x{} matrix",
            s.modes(),
            t.modes(),
            u.rows(),
            u.cols()
        )));
    }
    Ok(u.select(&s.expanded_indices(), &t.expanded_indices()))
}

/// `⟨S|φ(U)|T⟩`.
pub fn transition_amp(u: &Matrix<HpComplex>, s: &FockState, t: &FockState) -> Result<HpComplex> {
    let per = per_ryser(&expand_submatrix(u, s, t)?)?;
    let p = u.prec().bits();
    let norm = Float::with_val(p, s.factorial_product() * t.factorial_product()).sqrt();
    Ok(per.scale(&norm.recip()))
}

/// The matrix of `φ(U)` on the `n`-photon basis.
pub fn phi_operator(u: &Matrix<HpComplex>, n: u32) -> Result<(OccupancyBasis, Matrix<HpComplex>)> {
    if !u.is_square() {
        return Err(Error::invalid("mode transformation must be square"));
    }
    let size = basis_size(u.rows(), n);
    if size > MAX_PHI_BASIS as u64 {
        return Err(Error::budget(
            "phi operator basis size",
            size,
            MAX_PHI_BASIS as u64,
        ));
    }
    let basis = enum_basis(u.rows(), n)?;
    let states = basis.states();
    let rows: Vec<Vec<HpComplex>> = states
        .par_iter()
        .map(|s| {
            states
                .iter()
                .map(|t| transition_amp(u, s, t))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let phi = Matrix::from_rows(rows, u.prec())?;
    Ok((basis, phi))
}

/// Largest deviation from
/// `Per((VU)_{S,T}) = Σ_R Per(V_{S,R})·Per(U_{R,T}) / (r₁!⋯r_m!)`
/// over all `n`-photon `S`, `T`.
pub fn check_homomorphism(u: &Matrix<HpComplex>, v: &Matrix<HpComplex>, n: u32) -> Result<Float> {
    let vu = v.matmul(u)?;
    let basis = enum_basis(u.rows(), n)?;
    let states = basis.states();
    let p = u.prec().bits();
    let pers = |a: &Matrix<HpComplex>| -> Result<Vec<Vec<HpComplex>>> {
        states
            .iter()
            .map(|s| {
                states
                    .iter()
                    .map(|t| per_ryser(&expand_submatrix(a, s, t)?))
                    .collect()
            })
            .collect()
    };
    let (pv, pu, pvu) = (pers(v)?, pers(u)?, pers(&vu)?);
    let weights: Vec<Float> = states
        .iter()
        .map(|r| Float::with_val(p, r.factorial_product()).recip())
        .collect();
    let mut worst = Float::new(p);
    for si in 0..states.len() {
        for ti in 0..states.len() {
            let mut sum = HpComplex::zero(u.prec());
            for (ri, w) in weights.iter().enumerate() {
                let term = (&pv[si][ri] * &pu[ri][ti]).scale(w);
                sum = &sum + &term;
            }
            worst.max_mut(&sum.dist(&pvu[si][ti]));
        }
    }
    Ok(worst)
}

/// An `m × m` matrix of independent standard complex Gaussian entries.
pub fn random_gaussian_matrix(m: usize, prec: Precision, rng: &mut impl Rng) -> Matrix<HpComplex> {
    Matrix::from_fn(m, m, prec, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        HpComplex::from_f64(prec, re, im)
    })
}

/// A random unitary: Gram–Schmidt on the columns of a Gaussian matrix,
/// processed left to right.
pub fn random_unitary(m: usize, prec: Precision, rng: &mut impl Rng) -> Matrix<HpComplex> {
    let mut a = random_gaussian_matrix(m, prec, rng);
    for j in 0..m {
        for prev in 0..j {
            // a_j -= ⟨a_prev, a_j⟩ a_prev
            let mut dot = HpComplex::zero(prec);
            for i in 0..m {
                dot = &dot + &(&a[(i, prev)].conj() * &a[(i, j)]);
            }
            for i in 0..m {
                let delta = &dot * &a[(i, prev)];
                a[(i, j)] = &a[(i, j)] - &delta;
            }
        }
        let norm = (0..m)
            .fold(Float::new(prec.bits()), |acc, i| acc + a[(i, j)].norm_sqr())
            .sqrt();
        let inv = norm.recip();
        for i in 0..m {
            a[(i, j)] = a[(i, j)].scale(&inv);
        }
    }
    a
}
