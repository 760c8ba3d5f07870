//! Reduction from ±1-weighted counting of Boolean functions to permanents of
//! integer matrices, through a quantum circuit and its linear-optical
//! compilation.

pub mod boolcirc;
pub mod corpus;
pub mod error;
pub mod fock;
pub mod klm;
pub mod matrix;
pub mod numerics;
pub mod permanent;
pub mod qcirc;
pub mod reduce;
pub mod selftest;
pub mod signsearch;

pub use boolcirc::{BoolFunc, GateKind, Monomial, Network, PaddedFunc, Repr, Signal, Wire};
pub use error::{Error, Format, Result};
pub use fock::FockState;
pub use klm::{LOCircuit, ModeLayout, Variant};
pub use matrix::Matrix;
pub use numerics::{BigInt, BigRational, Dyadic, HpComplex, Precision, Scalar};
pub use qcirc::{Gate, OneQubit, QCircuit, ToffoliStyle};
pub use reduce::{PermanentInstance, Pipeline, ReduceOptions};
pub use signsearch::{SearchOutcome, SignOracle};
