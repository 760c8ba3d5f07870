//! Recovering `Δ_C` exactly from an oracle that only reports the sign of
//! `Δ_C + k` for chosen integers `k`.
//!
//! After probing `k = 0`, the search walks away from zero in the direction
//! that drives `Δ_C + k` toward zero, doubling `|k|` until the sign flips or
//! vanishes, then bisects the last bracket.

use std::collections::HashMap;

use crate::boolcirc::{pad, BoolFunc};
use crate::error::{Error, Result};
use crate::klm::Variant;
use crate::numerics::BigInt;
use crate::reduce::{provenance, recover, reduce};

pub trait SignOracle {
    /// `sign(Δ_C + k) ∈ {−1, 0, 1}`.
    fn sign(&mut self, c: &BoolFunc, k: i64) -> Result<i8>;
}

fn sign_of(x: &BigInt) -> i8 {
    x.cmp0() as i8
}

/// Evaluates `Δ_C + k` by enumerating assignments.
#[derive(Clone, Debug, Default)]
pub struct BruteOracle;

impl SignOracle for BruteOracle {
    fn sign(&mut self, c: &BoolFunc, k: i64) -> Result<i8> {
        Ok(sign_of(&pad(c, k).delta()?))
    }
}

/// Evaluates `Δ_C` by reducing `C` to a permanent and recovering it, then
/// shifts by `k`. The recovered value is cached per function.
#[derive(Clone, Debug)]
pub struct PermanentOracle {
    variant: Variant,
    cache: HashMap<String, BigInt>,
}

impl PermanentOracle {
    pub fn new(variant: Variant) -> Self {
        PermanentOracle {
            variant,
            cache: HashMap::new(),
        }
    }
}

impl SignOracle for PermanentOracle {
    fn sign(&mut self, c: &BoolFunc, k: i64) -> Result<i8> {
        let key = provenance(c);
        let delta = match self.cache.get(&key) {
            Some(d) => d.clone(),
            None => {
                let d = recover(&reduce(c, self.variant)?)?;
                self.cache.insert(key, d.clone());
                d
            }
        };
        Ok(sign_of(&(delta + k)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Probe {
    pub k: i64,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub delta: BigInt,
    pub trace: Vec<Probe>,
}

/// `2⌈log2(|Δ| + 2)⌉ + 4`.
pub fn call_bound(delta: &BigInt) -> usize {
    let mag = BigInt::from(delta.abs_ref()) + 2u32;
    2 * crate::numerics::ceil_log2(&mag) as usize + 4
}

pub fn determine_delta(oracle: &mut impl SignOracle, c: &BoolFunc) -> Result<SearchOutcome> {
    let mut trace = Vec::new();
    let mut probe = |k: i64, trace: &mut Vec<Probe>| -> Result<i8> {
        let sign = oracle.sign(c, k)?;
        trace.push(Probe { k, sign });
        Ok(sign)
    };
    let s0 = probe(0, &mut trace)?;
    if s0 == 0 {
        return Ok(SearchOutcome {
            delta: BigInt::new(),
            trace,
        });
    }
    // g(t) = sign(|Δ| − t), probed through k = −s0·t.
    let dir = -(s0 as i64);
    let mut g = |t: i64, trace: &mut Vec<Probe>| -> Result<i8> { Ok(s0 * probe(dir * t, trace)?) };
    let found = |t: i64, trace: Vec<Probe>| SearchOutcome {
        delta: BigInt::from(t * s0 as i64),
        trace,
    };

    let mut lo = 0i64;
    let mut hi = 1i64;
    loop {
        match g(hi, &mut trace)? {
            0 => return Ok(found(hi, trace)),
            1 => {
                lo = hi;
                hi = hi
                    .checked_mul(2)
                    .ok_or_else(|| Error::invalid("sign search overflowed"))?;
            }
            _ => break,
        }
    }
    // Now lo < |Δ| < hi.
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match g(mid, &mut trace)? {
            0 => return Ok(found(mid, trace)),
            1 => lo = mid,
            _ => hi = mid,
        }
    }
    Err(Error::invalid(format!(
        "sign oracle is inconsistent: no integer strictly between {lo} and {hi}"
    )))
}
