//! Compilation of qubit circuits into postselected linear-optics circuits.
//!
//! Qubit `i` is dual-rail encoded in modes `2i` and `2i + 1`; the photon sits
//! in mode `2i + 1` for `|0⟩` and in mode `2i` for `|1⟩`. Each CSIGN becomes
//! a Hadamard on the two `|1⟩`-modes, a nonlinear-sign gadget on each of them
//! and a second Hadamard. The gadget either applies the unitary `W` to the
//! target mode and two fresh ancilla modes (one empty, one holding a photon)
//! or the non-unitary `Y` to the target mode and one fresh occupied ancilla.
//!
//! Postselecting every mode on its initial occupation turns the amplitude
//! `⟨0…0|Q|0…0⟩` into the permanent of the occupied rows and columns of the
//! mode matrix, scaled by `4^{−Γ}` for `W` and unscaled for `Y`.

use std::fmt;
use std::str::FromStr;

use rug::Float;
use serde_json::json;

use crate::error::{Error, Result};
use crate::fock::{transition_amp, FockState};
use crate::matrix::Matrix;
use crate::numerics::{HpComplex, Precision};
use crate::qcirc::{Gate, OneQubit, QCircuit, PARSED_UNITARY_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    W,
    Y,
}

impl Variant {
    /// Postselection amplitude of one CSIGN gadget.
    pub fn csign_amplitude_log4(self) -> u32 {
        match self {
            Variant::W => 1,
            Variant::Y => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::W => "w",
            Variant::Y => "y",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "w" => Ok(Variant::W),
            "y" => Ok(Variant::Y),
            other => Err(Error::invalid(format!(
                "unknown variant {other:?}, expected w or y"
            ))),
        }
    }
}

/// Fresh modes introduced by one nonlinear-sign gadget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AncillaGroup {
    pub target: usize,
    pub modes: Vec<usize>,
    pub occupied: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeLayout {
    m: usize,
    qubit_modes: Vec<(usize, usize)>,
    ancillas: Vec<AncillaGroup>,
    occupancy: Vec<bool>,
}

impl ModeLayout {
    fn dual_rail(k: usize) -> Self {
        ModeLayout {
            m: 2 * k,
            qubit_modes: (0..k).map(|i| (2 * i, 2 * i + 1)).collect(),
            ancillas: Vec::new(),
            occupancy: (0..2 * k).map(|j| j % 2 == 1).collect(),
        }
    }

    fn add_ancillas(&mut self, target: usize, occupied: &[bool]) -> Vec<usize> {
        let modes: Vec<usize> = (self.m..self.m + occupied.len()).collect();
        self.m += occupied.len();
        self.occupancy.extend_from_slice(occupied);
        self.ancillas.push(AncillaGroup {
            target,
            modes: modes.clone(),
            occupied: occupied.to_vec(),
        });
        modes
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `((i,0), (i,1))` for each qubit.
    pub fn qubit_modes(&self) -> &[(usize, usize)] {
        &self.qubit_modes
    }

    pub fn ancillas(&self) -> &[AncillaGroup] {
        &self.ancillas
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    /// Indices of initially occupied modes in ascending order.
    pub fn occupied_modes(&self) -> Vec<usize> {
        (0..self.m).filter(|&j| self.occupancy[j]).collect()
    }

    /// Fock state with the qubits in basis state `x` (first qubit most
    /// significant) and every ancilla at its initial occupation.
    pub fn basis_state(&self, x: usize) -> FockState {
        let k = self.qubit_modes.len();
        let mut s: Vec<u32> = self.occupancy.iter().map(|&o| o as u32).collect();
        for (q, &(one, zero)) in self.qubit_modes.iter().enumerate() {
            let bit = x >> (k - 1 - q) & 1 == 1;
            s[one] = bit as u32;
            s[zero] = (!bit) as u32;
        }
        FockState(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LOGate {
    pub modes: Vec<usize>,
    pub block: Matrix<HpComplex>,
    pub unitary: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LOCircuit {
    layout: ModeLayout,
    gates: Vec<LOGate>,
    variant: Variant,
    gamma: usize,
    k: usize,
    n: u32,
    prec: Precision,
}

impl LOCircuit {
    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn gates(&self) -> &[LOGate] {
        &self.gates
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.layout.m
    }

    pub fn prec(&self) -> Precision {
        self.prec
    }

    /// Photon count, `k + 2Γ`.
    pub fn photons(&self) -> usize {
        self.layout.occupancy.iter().filter(|&&o| o).count()
    }

    /// Debug dump: modes, occupancy and each block as `re`/`im` arrays.
    pub fn to_lo_json(&self) -> String {
        let rows = |b: &Matrix<HpComplex>, part: fn(&HpComplex) -> f64| -> Vec<Vec<f64>> {
            (0..b.rows())
                .map(|i| b.row(i).iter().map(part).collect())
                .collect()
        };
        let gates: Vec<_> = self
            .gates
            .iter()
            .map(|g| {
                json!({
                    "modes": g.modes,
                    "re": rows(&g.block, |z| z.re().to_f64()),
                    "im": rows(&g.block, |z| z.im().to_f64()),
                    "unitary": g.unitary,
                })
            })
            .collect();
        let doc = json!({
            "variant": self.variant.as_str(),
            "modes": self.layout.m,
            "qubits": self.k,
            "gamma": self.gamma,
            "occupancy": self.layout.occupancy.iter().map(|&o| o as u8).collect::<Vec<_>>(),
            "gates": gates,
        });
        serde_json::to_string_pretty(&doc).expect("json values serialize")
    }
}

fn sqrt<T>(p: u32, x: T) -> Float
where
    Float: rug::Assign<T>,
{
    Float::with_val(p, x).sqrt()
}

/// The nonlinear-sign block: `W` (3×3, unitary) or `Y` (2×2, non-unitary).
pub fn ns1_block(variant: Variant, prec: Precision) -> Matrix<HpComplex> {
    let p = prec.bits();
    let two = Float::with_val(p, 2);
    let root2 = sqrt(p, 2);
    let half = Float::with_val(p, 0.5);
    let r = |x: Float| HpComplex::real(prec, x);
    match variant {
        Variant::W => {
            let w11 = Float::with_val(p, 1 - &root2);
            // √(3/√2 − 2)
            let w12 = sqrt(p, Float::with_val(p, 3 / &root2) - &two);
            // 2^{−1/4}
            let w13 = sqrt(p, &root2).recip();
            let w22 = Float::with_val(p, &root2 - &half);
            let w23 = Float::with_val(p, &half - root2.clone().recip());
            let rows = vec![
                vec![r(w11), r(w12.clone()), r(w13.clone())],
                vec![r(w12), r(w22), r(w23.clone())],
                vec![r(w13), r(w23), r(half)],
            ];
            Matrix::from_rows(rows, prec).expect("square block")
        }
        Variant::Y => {
            let rows = vec![
                vec![r(Float::with_val(p, 1 - &root2)), r(root2)],
                vec![HpComplex::one(prec), HpComplex::one(prec)],
            ];
            Matrix::from_rows(rows, prec).expect("square block")
        }
    }
}

/// Ancilla occupations the gadget starts and is postselected in.
fn ns1_ancillas(variant: Variant) -> &'static [bool] {
    match variant {
        Variant::W => &[false, true],
        Variant::Y => &[true],
    }
}

/// `(λ₀, λ₁, λ₂)`: the gadget's postselected amplitude on 0, 1, 2 photons
/// in its target mode.
pub fn ns1_amplitudes(block: &Matrix<HpComplex>, variant: Variant) -> Result<[HpComplex; 3]> {
    let anc = ns1_ancillas(variant);
    let amp = |s: u32| {
        let mut st = vec![s];
        st.extend(anc.iter().map(|&o| o as u32));
        let st = FockState(st);
        transition_amp(block, &st, &st)
    };
    Ok([amp(0)?, amp(1)?, amp(2)?])
}

fn hadamard_block(prec: Precision) -> Matrix<HpComplex> {
    let m = OneQubit::H.matrix(prec);
    Matrix::from_rows(vec![m[..2].to_vec(), m[2..].to_vec()], prec).expect("2x2")
}

/// Compiles `q` with the given nonlinear-sign block, which lets tests
/// substitute a corrupted constant.
pub fn compile_with_block(
    q: &QCircuit,
    variant: Variant,
    block: &Matrix<HpComplex>,
    prec: Precision,
) -> Result<LOCircuit> {
    let expected = if variant == Variant::W { 3 } else { 2 };
    if block.rows() != expected || !block.is_square() {
        return Err(Error::invalid(format!(
            "{variant} gadget needs a {expected}x{expected} block"
        )));
    }
    let mut layout = ModeLayout::dual_rail(q.k());
    let mut gates = Vec::new();
    let tol = Float::with_val(prec.bits(), PARSED_UNITARY_TOL);
    let h = hadamard_block(prec);
    for g in q.gates() {
        match g {
            Gate::One { target, op } => {
                op.check_unitary(prec, &tol)?;
                let m = op.matrix(prec);
                let (one, zero) = layout.qubit_modes[*target];
                gates.push(LOGate {
                    modes: vec![zero, one],
                    block: Matrix::from_rows(vec![m[..2].to_vec(), m[2..].to_vec()], prec)?,
                    unitary: true,
                });
            }
            Gate::CSign(a, b) => {
                let (ma, mb) = (layout.qubit_modes[*a].0, layout.qubit_modes[*b].0);
                let hgate = LOGate {
                    modes: vec![ma, mb],
                    block: h.clone(),
                    unitary: true,
                };
                gates.push(hgate.clone());
                for target in [ma, mb] {
                    let anc = layout.add_ancillas(target, ns1_ancillas(variant));
                    let mut modes = vec![target];
                    modes.extend(anc);
                    gates.push(LOGate {
                        modes,
                        block: block.clone(),
                        unitary: variant == Variant::W,
                    });
                }
                gates.push(hgate);
            }
        }
    }
    Ok(LOCircuit {
        layout,
        gates,
        variant,
        gamma: q.csign_count(),
        k: q.k(),
        n: q.n(),
        prec,
    })
}

pub fn compile(q: &QCircuit, variant: Variant, prec: Precision) -> Result<LOCircuit> {
    compile_with_block(q, variant, &ns1_block(variant, prec), prec)
}

/// The `m × m` mode matrix: the product of embedded blocks with the latest
/// gate leftmost.
pub fn mode_matrix(l: &LOCircuit) -> Matrix<HpComplex> {
    let prec = l.prec;
    let m = l.m();
    let mut u = Matrix::<HpComplex>::identity(m, prec);
    for g in &l.gates {
        // Rows outside g.modes are untouched by the direct sum with identity.
        let old: Vec<Vec<HpComplex>> = g.modes.iter().map(|&r| u.row(r).to_vec()).collect();
        for (bi, &r) in g.modes.iter().enumerate() {
            for c in 0..m {
                let mut acc = HpComplex::zero(prec);
                for (bj, old_row) in old.iter().enumerate() {
                    let coeff = &g.block[(bi, bj)];
                    if !crate::numerics::Scalar::is_zero(coeff)
                        && !crate::numerics::Scalar::is_zero(&old_row[c])
                    {
                        acc = &acc + &(coeff * &old_row[c]);
                    }
                }
                u[(r, c)] = acc;
            }
        }
    }
    u
}

/// `V`: the rows and columns of initially occupied modes.
pub fn extract_v(u: &Matrix<HpComplex>, layout: &ModeLayout) -> Matrix<HpComplex> {
    let occ = layout.occupied_modes();
    u.select(&occ, &occ)
}

/// Integer bound `M` on `|V_ij|`: 1 for `W` (a submatrix of a unitary), and
/// `⌈‖U‖_∞⌉` for `Y`.
pub fn entry_bound(l: &LOCircuit, u: &Matrix<HpComplex>) -> u64 {
    match l.variant {
        Variant::W => 1,
        Variant::Y => {
            let norm = u.inf_norm();
            norm.ceil().to_f64().max(1.0) as u64
        }
    }
}

/// The postselected action on the `2^k` dual-rail basis states, computed
/// photon by photon with the Fock simulator.
pub fn dual_rail_action(l: &LOCircuit) -> Result<Matrix<HpComplex>> {
    if l.k > 4 {
        return Err(Error::budget("dual-rail action qubit count", l.k as u64, 4));
    }
    let u = mode_matrix(l);
    let dim = 1 << l.k;
    let states: Vec<FockState> = (0..dim).map(|x| l.layout.basis_state(x)).collect();
    let mut out = Matrix::zeros(dim, dim, l.prec);
    for (r, s) in states.iter().enumerate() {
        for (c, t) in states.iter().enumerate() {
            out[(r, c)] = transition_amp(&u, s, t)?;
        }
    }
    Ok(out)
}
