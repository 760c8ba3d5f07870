//! The end-to-end reduction from a Boolean function to an integer matrix
//! whose permanent determines `Δ_C`, and the exact recovery of `Δ_C`.

use std::fmt::Write as _;

use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::boolcirc::BoolFunc;
use crate::error::{Error, Format, Result};
use crate::klm::{compile, entry_bound, extract_v, mode_matrix, LOCircuit, Variant};
use crate::matrix::Matrix;
use crate::numerics::{
    ceil_log2, factorial, pow2, round_nearest_int, round_to_dyadic, BigInt, BigRational, HpComplex,
    Precision,
};
use crate::permanent::{per_ryser, ryser_cost, RYSER_MAX};
use crate::qcirc::{encoding_circuit, QCircuit, ToffoliStyle};

/// Extra bits added on top of the truncation bound.
pub const SAFETY_BITS: u32 = 8;

/// Slack, in bits below the working precision, allowed for imaginary parts
/// of `V`.
pub const IMAG_SLACK: u32 = 44;

#[derive(Clone, Debug, PartialEq)]
pub struct PermanentInstance {
    pub a: Matrix<BigInt>,
    pub b: u32,
    pub n: u32,
    pub gamma: usize,
    pub k: usize,
    pub variant: Variant,
    pub provenance: String,
    /// Entry bound used to choose `b`; not part of the serialized form.
    pub entry_bound: Option<u64>,
}

impl PermanentInstance {
    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// `log2` of the factor multiplying `Per(A)/2^{bN}` in the recovery.
    pub fn recovery_shift(&self) -> u32 {
        self.n + 2 * self.gamma as u32 * self.variant.csign_amplitude_log4()
    }
}

/// `⌈log2(N!·N·(M+1)^{N−1}) + n + 2 + 2Γ⌉ + 8`.
pub fn choose_b(n: u32, dim: usize, gamma: usize, m: u64) -> u32 {
    let dim_u = dim.max(1) as u32;
    let bound = factorial(dim_u) * dim_u * BigInt::from(m + 1).pow(dim_u - 1);
    ceil_log2(&bound) + n + 2 + 2 * gamma as u32 + SAFETY_BITS
}

/// `A = round(2^b · V)` entrywise.
pub fn truncate_v(v: &Matrix<HpComplex>, b: u32) -> Result<Matrix<BigInt>> {
    let prec = v.prec();
    let tol = prec.tolerance(IMAG_SLACK);
    let mut rows = Vec::with_capacity(v.rows());
    for i in 0..v.rows() {
        let mut row = Vec::with_capacity(v.cols());
        for j in 0..v.cols() {
            let d = round_to_dyadic(&v[(i, j)], b, &tol).map_err(|e| match e {
                Error::ImaginaryResidue {
                    residue,
                    tolerance_exp,
                    ..
                } => Error::ImaginaryResidue {
                    location: format!("V[{}][{}]", i + 1, j + 1),
                    residue,
                    tolerance_exp,
                },
                other => other,
            })?;
            row.push(d.into_numerator());
        }
        rows.push(row);
    }
    Matrix::from_rows(rows, ())
}

#[derive(Clone, Debug, Default)]
pub struct ReduceOptions {
    pub style: ToffoliStyle,
    /// Working precision; defaults to `max(128, b + 64)`.
    pub precision: Option<Precision>,
}

/// Every intermediate artifact of one reduction.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub circuit: QCircuit,
    pub optics: LOCircuit,
    pub mode_matrix: Matrix<HpComplex>,
    pub v: Matrix<HpComplex>,
    pub instance: PermanentInstance,
    pub prec: Precision,
}

/// Hex SHA-256 of the canonical `.bf` text of `c`.
pub fn provenance(c: &BoolFunc) -> String {
    hex::encode(Sha256::digest(c.to_bf().as_bytes()))
}

pub fn run_pipeline(c: &BoolFunc, variant: Variant, opts: &ReduceOptions) -> Result<Pipeline> {
    let circuit = encoding_circuit(c, opts.style)?;
    let probe_prec = Precision::DEFAULT;
    let probe = compile(&circuit, variant, probe_prec)?;
    let probe_u = mode_matrix(&probe);
    let m_bound = entry_bound(&probe, &probe_u);
    let dim = probe.photons();
    let b = choose_b(c.n(), dim, circuit.csign_count(), m_bound);
    let prec = opts
        .precision
        .unwrap_or_else(|| Precision::for_truncation(b));

    let (optics, u) = if prec == probe_prec {
        (probe, probe_u)
    } else {
        let optics = compile(&circuit, variant, prec)?;
        let u = mode_matrix(&optics);
        (optics, u)
    };
    let v = extract_v(&u, optics.layout());
    let a = truncate_v(&v, b)?;
    let instance = PermanentInstance {
        a,
        b,
        n: c.n(),
        gamma: circuit.csign_count(),
        k: circuit.k(),
        variant,
        provenance: provenance(c),
        entry_bound: Some(m_bound),
    };
    Ok(Pipeline {
        circuit,
        optics,
        mode_matrix: u,
        v,
        instance,
        prec,
    })
}

pub fn reduce(c: &BoolFunc, variant: Variant) -> Result<PermanentInstance> {
    Ok(run_pipeline(c, variant, &ReduceOptions::default())?.instance)
}

fn ryser_refusal(dim: usize) -> Error {
    Error::Budget {
        what: "Ryser permanent size",
        requested: dim as u64,
        limit: RYSER_MAX as u64,
        estimate: Some(format!(
            "2^{dim}·{dim} = {} scalar operations",
            ryser_cost(dim)
        )),
    }
}

/// `2^{shift}·Per(A)/2^{bN}` as an exact rational.
pub fn recovery_quotient(inst: &PermanentInstance) -> Result<BigRational> {
    let dim = inst.dim();
    if dim > RYSER_MAX {
        return Err(ryser_refusal(dim));
    }
    let per = per_ryser(&inst.a)?;
    let num = per * pow2(inst.recovery_shift());
    let den = pow2(inst.b * dim as u32);
    Ok(BigRational::from((num, den)))
}

/// `Δ_C`, the integer nearest to the recovery quotient.
pub fn recover(inst: &PermanentInstance) -> Result<BigInt> {
    Ok(round_nearest_int(&recovery_quotient(inst)?))
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    version: u32,
    n: u32,
    k: usize,
    gamma: usize,
    b: u32,
    #[serde(rename = "N")]
    dim: usize,
    variant: String,
    #[serde(rename = "A")]
    a: Vec<Vec<String>>,
    provenance: String,
}

impl PermanentInstance {
    /// Compact `.pm.json` text with a trailing newline.
    pub fn to_json(&self) -> String {
        let doc = InstanceJson {
            version: 1,
            n: self.n,
            k: self.k,
            gamma: self.gamma,
            b: self.b,
            dim: self.dim(),
            variant: self.variant.as_str().to_string(),
            a: (0..self.dim())
                .map(|i| self.a.row(i).iter().map(|x| x.to_string()).collect())
                .collect(),
            provenance: self.provenance.clone(),
        };
        let mut s = serde_json::to_string(&doc).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceJson = serde_json::from_str(text)
            .map_err(|e| Error::parse(Format::Instance, e.line(), e.to_string()))?;
        let bad = |msg: String| Error::parse(Format::Instance, 1, msg);
        if doc.version != 1 {
            return Err(bad(format!("unsupported version {}", doc.version)));
        }
        let variant: Variant = doc.variant.parse().map_err(|e: Error| bad(e.to_string()))?;
        if doc.a.len() != doc.dim || doc.a.iter().any(|r| r.len() != doc.dim) {
            return Err(bad(format!("A is not {0}x{0}", doc.dim)));
        }
        if doc.dim != doc.k + 2 * doc.gamma {
            return Err(bad(format!(
                "N = {} does not equal k + 2*gamma = {}",
                doc.dim,
                doc.k + 2 * doc.gamma
            )));
        }
        let rows = doc
            .a
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| {
                        x.parse::<BigInt>()
                            .map_err(|_| bad(format!("bad integer {x:?} in A")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PermanentInstance {
            a: Matrix::from_rows(rows, ())?,
            b: doc.b,
            n: doc.n,
            gamma: doc.gamma,
            k: doc.k,
            variant,
            provenance: doc.provenance,
            entry_bound: None,
        })
    }
}

/// Parses the plain matrix format: a line with `N`, then `N` rows of `N`
/// decimal integers. Blank lines and `#` comments are ignored.
pub fn parse_plain_matrix(text: &str) -> Result<Matrix<BigInt>> {
    let perr = |line: usize, msg: String| Error::parse(Format::PlainMatrix, line, msg);
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, head) = lines.next().ok_or_else(|| perr(1, "empty input".into()))?;
    let dim: usize = head
        .parse()
        .map_err(|_| perr(ln, format!("expected matrix dimension, found {head:?}")))?;
    let mut rows = Vec::with_capacity(dim);
    let mut last = ln;
    for (ln, line) in lines {
        last = ln;
        if rows.len() == dim {
            return Err(perr(ln, "more rows than the declared dimension".into()));
        }
        let row = line
            .split_whitespace()
            .map(|t| {
                t.parse::<BigInt>()
                    .map_err(|_| perr(ln, format!("bad integer {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != dim {
            return Err(perr(
                ln,
                format!("row has {} entries, expected {dim}", row.len()),
            ));
        }
        rows.push(row);
    }
    if rows.len() != dim {
        return Err(perr(
            last + 1,
            format!("found {} rows, expected {dim}", rows.len()),
        ));
    }
    Matrix::from_rows(rows, ())
}

pub fn format_plain_matrix(a: &Matrix<BigInt>) -> String {
    let mut s = format!("{}\n", a.rows());
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

/// `Per(A)/2^{bN}` evaluated in floating point from the HP truncation,
/// for cross-checking the exact engine.
pub fn scaled_permanent_hp(inst: &PermanentInstance, prec: Precision) -> Result<HpComplex> {
    let p = prec.bits();
    let scale = Float::with_val(p, Float::i_exp(1, -(inst.b as i32)));
    let v_tilde = inst.a.map(prec, |x| {
        HpComplex::real(prec, Float::with_val(p, x) * &scale)
    });
    per_ryser(&v_tilde)
}
