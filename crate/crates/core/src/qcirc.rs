//! Qubit circuits over arbitrary 1-qubit gates plus CSIGN, the circuits that
//! encode `Δ_C` as the amplitude `⟨0…0|Q|0…0⟩ = Δ_C / 2ⁿ`, and a
//! statevector simulator.
//!
//! Qubit `q` (0-based) is bit `k − 1 − q` of a basis index, so the first
//! qubit is the most significant bit.

use std::collections::BTreeSet;
use std::fmt;

use rug::ops::Pow;
use rug::Float;

use crate::boolcirc::{BoolFunc, GateKind, Network, Repr, Signal};
use crate::error::{Error, Format, Result};
use crate::matrix::Matrix;
use crate::numerics::{pi_over_8, BigInt, BigRational, HpComplex, Precision};

pub const MAX_DENSE_QUBITS: usize = 12;
pub const MAX_STATEVECTOR_QUBITS: usize = 24;

/// Unitarity tolerance for gates read from decimal text.
pub const PARSED_UNITARY_TOL: f64 = 1e-6;

/// A 1-qubit operation. Named gates are materialized at any precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OneQubit {
    H,
    /// `exp(iπ/8·X) = [[cos π/8, i sin π/8], [i sin π/8, cos π/8]]`.
    B,
    Bdg,
    X,
    Z,
    /// `Ry(π/4) = [[cos π/8, −sin π/8], [sin π/8, cos π/8]]`.
    Ry,
    Rydg,
    /// `e^{ikπ/8}·I`.
    GlobalPhase(i32),
    /// `diag(1, re + i·im)`.
    Phase {
        re: BigRational,
        im: BigRational,
    },
    /// Row-major `(re, im)` pairs of a 2×2 matrix.
    Matrix(Box<[BigRational; 8]>),
}

impl OneQubit {
    pub fn matrix(&self, prec: Precision) -> [HpComplex; 4] {
        let p = prec.bits();
        let zero = || HpComplex::zero(prec);
        let one = || HpComplex::one(prec);
        let (c, s) = pi_over_8(prec);
        let real = |x: &Float| HpComplex::real(prec, x.clone());
        let imag = |x: &Float| HpComplex::new(prec, Float::new(p), x.clone());
        match self {
            OneQubit::H => {
                let h = Float::with_val(p, 0.5).sqrt();
                [real(&h), real(&h), real(&h), real(&(-h.clone()))]
            }
            OneQubit::B => [real(&c), imag(&s), imag(&s), real(&c)],
            OneQubit::Bdg => {
                let ns = -s.clone();
                [real(&c), imag(&ns), imag(&ns), real(&c)]
            }
            OneQubit::X => [zero(), one(), one(), zero()],
            OneQubit::Z => [one(), zero(), zero(), -one()],
            OneQubit::Ry => [real(&c), real(&(-s.clone())), real(&s), real(&c)],
            OneQubit::Rydg => [real(&c), real(&s), real(&(-s.clone())), real(&c)],
            OneQubit::GlobalPhase(k) => {
                let ph = HpComplex::eighth_root_phase(prec, *k);
                [ph.clone(), zero(), zero(), ph]
            }
            OneQubit::Phase { re, im } => [
                one(),
                zero(),
                zero(),
                HpComplex::new(prec, Float::with_val(p, re), Float::with_val(p, im)),
            ],
            OneQubit::Matrix(e) => std::array::from_fn(|i| {
                HpComplex::new(
                    prec,
                    Float::with_val(p, &e[2 * i]),
                    Float::with_val(p, &e[2 * i + 1]),
                )
            }),
        }
    }

    pub fn inverse(&self) -> OneQubit {
        match self {
            OneQubit::B => OneQubit::Bdg,
            OneQubit::Bdg => OneQubit::B,
            OneQubit::Ry => OneQubit::Rydg,
            OneQubit::Rydg => OneQubit::Ry,
            OneQubit::GlobalPhase(k) => OneQubit::GlobalPhase((16 - k.rem_euclid(16)) % 16),
            OneQubit::Phase { re, im } => OneQubit::Phase {
                re: re.clone(),
                im: BigRational::from(-im),
            },
            OneQubit::Matrix(e) => {
                // Conjugate transpose: entry (i, j) ← conj(entry (j, i)).
                let at = |r: usize, c: usize| (&e[2 * (2 * r + c)], &e[2 * (2 * r + c) + 1]);
                let mut out: [BigRational; 8] = Default::default();
                for r in 0..2 {
                    for c in 0..2 {
                        let (re, im) = at(c, r);
                        out[2 * (2 * r + c)] = re.clone();
                        out[2 * (2 * r + c) + 1] = BigRational::from(-im);
                    }
                }
                OneQubit::Matrix(Box::new(out))
            }
            other => other.clone(),
        }
    }

    /// Whether the matrix is unitary to within `tol`.
    pub fn check_unitary(&self, prec: Precision, tol: &Float) -> Result<()> {
        let m = self.matrix(prec);
        let mat = Matrix::from_rows(vec![m[..2].to_vec(), m[2..].to_vec()], prec)?;
        let defect = mat.unitarity_defect();
        if defect > *tol {
            return Err(Error::NotUnitary {
                deviation: defect.to_f64(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    One { target: usize, op: OneQubit },
    CSign(usize, usize),
}

impl Gate {
    pub fn one(target: usize, op: OneQubit) -> Self {
        Gate::One { target, op }
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::One { target, op } => Gate::one(*target, op.inverse()),
            Gate::CSign(a, b) => Gate::CSign(*a, *b),
        }
    }

    fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::One { target, .. } => vec![*target],
            Gate::CSign(a, b) => vec![*a, *b],
        }
    }
}

/// How Toffoli-type subcircuits are lowered to CSIGN and 1-qubit gates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ToffoliStyle {
    /// Toffoli up to a sign on one computational basis state, from 3 CSIGNs
    /// and real `Ry(±π/4)`/`H` gates. Every mode matrix it produces is real.
    #[default]
    RelativePhase,
    /// The exact 6-CSIGN Toffoli built from `B`, `B†` and `H`.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QCircuit {
    k: usize,
    n: u32,
    gates: Vec<Gate>,
}

impl QCircuit {
    /// An empty circuit on `k` qubits encoding a function of `n` variables.
    pub fn new(k: usize, n: u32) -> Self {
        QCircuit {
            k,
            n,
            gates: Vec::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let qs = gate.qubits();
        if let Some(q) = qs.iter().find(|&&q| q >= self.k) {
            return Err(Error::invalid(format!(
                "qubit {} out of range for {} qubits",
                q + 1,
                self.k
            )));
        }
        if let Gate::CSign(a, b) = gate {
            if a == b {
                return Err(Error::invalid("CSIGN needs two distinct qubits"));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.push(g))
    }

    pub fn csign_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::CSign(..)))
            .count()
    }

    pub fn inverse(&self) -> QCircuit {
        QCircuit {
            k: self.k,
            n: self.n,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Applies every gate to `state` in list order.
    pub fn apply(&self, state: &mut [HpComplex], prec: Precision) {
        assert_eq!(state.len(), 1 << self.k);
        for g in &self.gates {
            match g {
                Gate::One { target, op } => {
                    apply_one(state, self.k, *target, &op.matrix(prec));
                }
                Gate::CSign(a, b) => {
                    let mask = (1usize << (self.k - 1 - a)) | (1usize << (self.k - 1 - b));
                    for (i, z) in state.iter_mut().enumerate() {
                        if i & mask == mask {
                            *z = -std::mem::replace(z, HpComplex::zero(prec));
                        }
                    }
                }
            }
        }
    }

    /// `Q|0…0⟩`.
    pub fn statevector(&self, prec: Precision) -> Result<Vec<HpComplex>> {
        if self.k > MAX_STATEVECTOR_QUBITS {
            return Err(Error::budget(
                "statevector qubit count",
                self.k as u64,
                MAX_STATEVECTOR_QUBITS as u64,
            ));
        }
        let mut state = vec![HpComplex::zero(prec); 1 << self.k];
        state[0] = HpComplex::one(prec);
        self.apply(&mut state, prec);
        Ok(state)
    }

    /// `⟨0…0|Q|0…0⟩`.
    pub fn amp00(&self, prec: Precision) -> Result<HpComplex> {
        Ok(self.statevector(prec)?.swap_remove(0))
    }

    /// The full `2^k × 2^k` unitary.
    pub fn dense_unitary(&self, prec: Precision) -> Result<Matrix<HpComplex>> {
        if self.k > MAX_DENSE_QUBITS {
            return Err(Error::budget(
                "dense unitary qubit count",
                self.k as u64,
                MAX_DENSE_QUBITS as u64,
            ));
        }
        let dim = 1 << self.k;
        let mut out = Matrix::zeros(dim, dim, prec);
        for col in 0..dim {
            let mut state = vec![HpComplex::zero(prec); dim];
            state[col] = HpComplex::one(prec);
            self.apply(&mut state, prec);
            for (row, z) in state.into_iter().enumerate() {
                out[(row, col)] = z;
            }
        }
        Ok(out)
    }

    /// The `.qc` text of this circuit.
    pub fn to_qc(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for QCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.k)?;
        for g in &self.gates {
            match g {
                Gate::CSign(a, b) => writeln!(f, "CSIGN {} {}", a + 1, b + 1)?,
                Gate::One { target, op } => {
                    let q = target + 1;
                    match op {
                        OneQubit::H => writeln!(f, "H {q}")?,
                        OneQubit::B => writeln!(f, "B {q}")?,
                        OneQubit::Bdg => writeln!(f, "BD {q}")?,
                        OneQubit::X => writeln!(f, "X {q}")?,
                        OneQubit::Z => writeln!(f, "Z {q}")?,
                        OneQubit::Ry => writeln!(f, "R {q}")?,
                        OneQubit::Rydg => writeln!(f, "RD {q}")?,
                        OneQubit::GlobalPhase(k) => writeln!(f, "G {q} {k}")?,
                        OneQubit::Phase { re, im } => {
                            writeln!(f, "P {q} {} {}", format_decimal(re), format_decimal(im))?
                        }
                        OneQubit::Matrix(e) => {
                            write!(f, "U {q}")?;
                            for x in e.iter() {
                                write!(f, " {}", format_decimal(x))?;
                            }
                            writeln!(f)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn apply_one(state: &mut [HpComplex], k: usize, target: usize, m: &[HpComplex; 4]) {
    let stride = 1usize << (k - 1 - target);
    let nz: [bool; 4] = std::array::from_fn(|i| !crate::numerics::Scalar::is_zero(&m[i]));
    for i in 0..state.len() {
        if i & stride != 0 {
            continue;
        }
        let j = i | stride;
        let (a, b) = (&state[i], &state[j]);
        let combine = |x: usize, y: usize| -> HpComplex {
            match (nz[x], nz[y]) {
                (true, true) => &(&m[x] * a) + &(&m[y] * b),
                (true, false) => &m[x] * a,
                (false, true) => &m[y] * b,
                (false, false) => HpComplex::zero(a.prec()),
            }
        };
        let na = combine(0, 1);
        let nb = combine(2, 3);
        state[i] = na;
        state[j] = nb;
    }
}

fn cnot(control: usize, target: usize) -> [Gate; 3] {
    [
        Gate::one(target, OneQubit::H),
        Gate::CSign(control, target),
        Gate::one(target, OneQubit::H),
    ]
}

/// Exact Toffoli with controls `a`, `b` and target `c`: 6 CSIGNs plus a
/// closing global-phase gate.
pub fn toffoli_gates(a: usize, b: usize, c: usize) -> Vec<Gate> {
    use OneQubit::*;
    let one = Gate::one;
    vec![
        one(c, Bdg),
        Gate::CSign(a, c),
        one(c, B),
        Gate::CSign(b, c),
        one(c, Bdg),
        Gate::CSign(a, c),
        one(c, B),
        Gate::CSign(b, c),
        one(a, H),
        one(a, Bdg),
        one(a, H),
        one(b, H),
        one(b, Bdg),
        one(b, H),
        one(b, H),
        Gate::CSign(a, b),
        one(b, B),
        Gate::CSign(a, b),
        one(b, H),
        one(a, GlobalPhase(1)),
    ]
}

/// Toffoli composed with a sign flip on `|a,b,c⟩ = |1,0,1⟩`; 3 CSIGNs.
pub fn relative_phase_toffoli_gates(a: usize, b: usize, c: usize) -> Vec<Gate> {
    let mut g = vec![Gate::one(c, OneQubit::Ry)];
    g.extend(cnot(b, c));
    g.push(Gate::one(c, OneQubit::Ry));
    g.extend(cnot(a, c));
    g.push(Gate::one(c, OneQubit::Rydg));
    g.extend(cnot(b, c));
    g.push(Gate::one(c, OneQubit::Rydg));
    g
}

fn toffoli_like(style: ToffoliStyle, a: usize, b: usize, c: usize) -> Vec<Gate> {
    match style {
        ToffoliStyle::RelativePhase => relative_phase_toffoli_gates(a, b, c),
        ToffoliStyle::Exact => toffoli_gates(a, b, c),
    }
}

fn inverse_gates(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().map(Gate::inverse).collect()
}

pub fn toffoli_circuit() -> QCircuit {
    let mut q = QCircuit::new(3, 3);
    q.extend(toffoli_gates(0, 1, 2)).expect("qubits in range");
    q
}

/// `diag(1,1,1,1,1,1,1,−1)` as `H_c · Toffoli · H_c`.
pub fn ccz_circuit() -> QCircuit {
    let mut q = QCircuit::new(3, 3);
    q.push(Gate::one(2, OneQubit::H)).expect("qubit in range");
    q.extend(toffoli_gates(0, 1, 2)).expect("qubits in range");
    q.push(Gate::one(2, OneQubit::H)).expect("qubit in range");
    q
}

fn hadamard_layer(n: u32) -> impl Iterator<Item = Gate> {
    (0..n as usize).map(|q| Gate::one(q, OneQubit::H))
}

/// `H^⊗n · D_C · H^⊗n` for a phase polynomial.
///
/// Degree-1 terms become `Z`, degree-2 terms CSIGN. Degree-3 terms use the
/// exact CCZ in [`ToffoliStyle::Exact`]; otherwise they compute the AND of
/// two variables into one shared ancilla (qubit `n`), apply CSIGN with the
/// third, and uncompute.
pub fn phase_poly_circuit(c: &BoolFunc, style: ToffoliStyle) -> Result<QCircuit> {
    let Repr::PhasePoly(terms) = c.repr() else {
        return Err(Error::invalid(
            "phase_poly_circuit needs a phase-polynomial function; use uncompute_circuit for networks",
        ));
    };
    let n = c.n();
    let cubic = terms.iter().any(|m| m.degree() == 3);
    let ancilla = n as usize;
    let k = if cubic && style == ToffoliStyle::RelativePhase {
        ancilla + 1
    } else {
        ancilla
    };
    let mut q = QCircuit::new(k, n);
    q.extend(hadamard_layer(n))?;
    for m in terms {
        match *m.vars() {
            [i] => q.push(Gate::one(i, OneQubit::Z))?,
            [i, j] => q.push(Gate::CSign(i, j))?,
            [i, j, l] => match style {
                ToffoliStyle::Exact => {
                    q.push(Gate::one(l, OneQubit::H))?;
                    q.extend(toffoli_gates(i, j, l))?;
                    q.push(Gate::one(l, OneQubit::H))?;
                }
                ToffoliStyle::RelativePhase => {
                    let and = relative_phase_toffoli_gates(i, j, ancilla);
                    q.extend(and.iter().cloned())?;
                    q.push(Gate::CSign(ancilla, l))?;
                    q.extend(inverse_gates(&and))?;
                }
            },
            _ => unreachable!("monomial degree is 1..=3"),
        }
    }
    q.extend(hadamard_layer(n))?;
    Ok(q)
}

/// A wire value as a parity of qubit values plus a constant.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Affine {
    atoms: BTreeSet<usize>,
    constant: bool,
}

impl Affine {
    fn atom(q: usize) -> Self {
        Affine {
            atoms: BTreeSet::from([q]),
            constant: false,
        }
    }

    fn constant(v: bool) -> Self {
        Affine {
            atoms: BTreeSet::new(),
            constant: v,
        }
    }

    fn xor(&self, other: &Affine) -> Affine {
        Affine {
            atoms: self
                .atoms
                .symmetric_difference(&other.atoms)
                .copied()
                .collect(),
            constant: self.constant ^ other.constant,
        }
    }

    fn not(&self) -> Affine {
        Affine {
            atoms: self.atoms.clone(),
            constant: !self.constant,
        }
    }
}

struct NetworkLowering {
    style: ToffoliStyle,
    next_qubit: usize,
    compute: Vec<Gate>,
}

impl NetworkLowering {
    fn and(&mut self, a: &Affine, b: &Affine) -> Affine {
        if a.atoms.is_empty() {
            return if a.constant {
                b.clone()
            } else {
                Affine::constant(false)
            };
        }
        if b.atoms.is_empty() {
            return if b.constant {
                a.clone()
            } else {
                Affine::constant(false)
            };
        }
        if a.atoms == b.atoms {
            return if a.constant == b.constant {
                a.clone()
            } else {
                Affine::constant(false)
            };
        }

        let mut scratch = Vec::new();
        // Fold a's parity onto its first atom.
        let pa = *a.atoms.first().expect("nonempty");
        for &q in a.atoms.iter().skip(1) {
            scratch.extend(cnot(q, pa));
        }
        // Qubit pa now holds a's parity, so b's atom pa stands for
        // pa ⊕ (the rest of a).
        let b_atoms: BTreeSet<usize> = if b.atoms.contains(&pa) {
            b.atoms
                .symmetric_difference(&a.atoms)
                .copied()
                .chain([pa])
                .collect()
        } else {
            b.atoms.clone()
        };
        let pb = *b_atoms.iter().find(|&&q| q != pa).expect("forms differ");
        for &q in b_atoms.iter().filter(|&&q| q != pb) {
            scratch.extend(cnot(q, pb));
        }
        for (p, c) in [(pa, a.constant), (pb, b.constant)] {
            if c {
                scratch.push(Gate::one(p, OneQubit::X));
            }
        }
        let target = self.next_qubit;
        self.next_qubit += 1;
        self.compute.extend(scratch.iter().cloned());
        self.compute
            .extend(toffoli_like(self.style, pa, pb, target));
        self.compute.extend(inverse_gates(&scratch));
        Affine::atom(target)
    }
}

/// `H^⊗n · (compute, phase, uncompute) · H^⊗n` for a network.
///
/// XOR and NOT are tracked classically as affine forms over qubits. Each
/// AND (and OR, via De Morgan) writes into a fresh ancilla; parities are
/// folded onto one qubit with CNOTs just for the duration of the Toffoli.
/// Wires that do not feed the output are skipped.
pub fn uncompute_circuit(c: &BoolFunc, style: ToffoliStyle) -> Result<QCircuit> {
    let Repr::Network(net) = c.repr() else {
        return Err(Error::invalid("uncompute_circuit needs a network function"));
    };
    let n = c.n();
    let live = live_wires(net);
    let mut low = NetworkLowering {
        style,
        next_qubit: n as usize,
        compute: Vec::new(),
    };
    let mut forms: Vec<Option<Affine>> = vec![None; net.wires().len()];
    let read = |s: Signal, forms: &[Option<Affine>]| match s {
        Signal::Input(i) => Affine::atom(i),
        Signal::Wire(w) => forms[w].clone().expect("operands precede their uses"),
    };
    for (idx, w) in net.wires().iter().enumerate() {
        if !live[idx] {
            continue;
        }
        let a = read(w.args[0], &forms);
        let form = match w.gate {
            GateKind::Not => a.not(),
            GateKind::Xor => a.xor(&read(w.args[1], &forms)),
            GateKind::And => low.and(&a, &read(w.args[1], &forms)),
            GateKind::Or => low.and(&a.not(), &read(w.args[1], &forms).not()).not(),
        };
        forms[idx] = Some(form);
    }
    let out = read(net.output(), &forms);

    let mut q = QCircuit::new(low.next_qubit, n);
    q.extend(hadamard_layer(n))?;
    q.extend(low.compute.iter().cloned())?;
    for &atom in &out.atoms {
        q.push(Gate::one(atom, OneQubit::Z))?;
    }
    if out.constant {
        q.push(Gate::one(0, OneQubit::GlobalPhase(8)))?;
    }
    q.extend(inverse_gates(&low.compute))?;
    q.extend(hadamard_layer(n))?;
    Ok(q)
}

fn live_wires(net: &Network) -> Vec<bool> {
    let mut live = vec![false; net.wires().len()];
    if let Signal::Wire(w) = net.output() {
        live[w] = true;
    }
    for idx in (0..net.wires().len()).rev() {
        if live[idx] {
            for &a in &net.wires()[idx].args {
                if let Signal::Wire(w) = a {
                    live[w] = true;
                }
            }
        }
    }
    live
}

/// The amplitude-encoding circuit for any representation. Truth tables are
/// rejected because they have no gate-level lowering.
pub fn encoding_circuit(c: &BoolFunc, style: ToffoliStyle) -> Result<QCircuit> {
    match c.repr() {
        Repr::PhasePoly(_) => phase_poly_circuit(c, style),
        Repr::Network(_) => uncompute_circuit(c, style),
        Repr::TruthTable(_) => encoding_circuit(&c.to_gate_form(), style),
    }
}

/// Parses a decimal literal such as `-0.25`, `3` or `1.5e-3` exactly.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all = format!("{int_part}{frac_part}");
    let mut value = BigRational::from(all.parse::<BigInt>().ok()?);
    let scale = exp - frac_part.len() as i32;
    let ten = BigRational::from(10);
    for _ in 0..scale.unsigned_abs() {
        if scale > 0 {
            value *= &ten;
        } else {
            value /= &ten;
        }
    }
    Some(if neg { -value } else { value })
}

/// Exact decimal text for rationals whose denominator divides a power of 10;
/// other values fall back to 40 significant digits.
pub fn format_decimal(x: &BigRational) -> String {
    let mut den = x.denom().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while den.is_divisible_u(2) {
        den /= 2;
        twos += 1;
    }
    while den.is_divisible_u(5) {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return Float::with_val(160, x).to_string_radix(10, Some(40));
    }
    let places = twos.max(fives);
    let scaled = x * BigRational::from(BigInt::from(10).pow(places));
    let int = scaled.numer().clone();
    if places == 0 {
        return int.to_string();
    }
    let neg = int < 0;
    let digits = int.abs().to_string();
    let padded = format!("{:0>width$}", digits, width = places as usize + 1);
    let (head, tail) = padded.split_at(padded.len() - places as usize);
    format!("{}{head}.{tail}", if neg { "-" } else { "" })
}

fn qerr(line: usize, msg: impl Into<String>) -> Error {
    Error::parse(Format::QCircuit, line, msg)
}

/// Parses the `.qc` format. Beyond the basic gate names it accepts `BD`
/// (B†), `R`/`RD` (`Ry(±π/4)`) and `G <q> <k>` (`e^{ikπ/8}`), which is what
/// [`QCircuit::to_qc`] writes for generated circuits.
pub fn parse_qcircuit(text: &str) -> Result<QCircuit> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, header) = lines.next().ok_or_else(|| qerr(1, "empty input"))?;
    let k: usize = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["qubits", v] => v
            .parse()
            .map_err(|_| qerr(ln, format!("bad qubit count {v:?}")))?,
        _ => return Err(qerr(ln, "expected header \"qubits <k>\"")),
    };
    if k == 0 {
        return Err(qerr(ln, "qubit count must be positive"));
    }
    let mut q = QCircuit::new(k, k as u32);
    let check_prec = Precision::DEFAULT;
    let tol = Float::with_val(check_prec.bits(), PARSED_UNITARY_TOL);
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let qubit = |t: &str| -> Result<usize> {
            match t.parse::<usize>() {
                Ok(v) if (1..=k).contains(&v) => Ok(v - 1),
                _ => Err(qerr(ln, format!("qubit {t:?} outside 1..={k}"))),
            }
        };
        let num = |t: &str| parse_decimal(t).ok_or_else(|| qerr(ln, format!("bad number {t:?}")));
        let arity = |want: usize| -> Result<()> {
            if toks.len() != want + 1 {
                return Err(qerr(ln, format!("{} takes {want} argument(s)", toks[0])));
            }
            Ok(())
        };
        let named = |op: OneQubit| -> Result<Gate> {
            arity(1)?;
            Ok(Gate::one(qubit(toks[1])?, op))
        };
        let gate = match toks[0] {
            "H" => named(OneQubit::H)?,
            "B" => named(OneQubit::B)?,
            "BD" => named(OneQubit::Bdg)?,
            "X" => named(OneQubit::X)?,
            "Z" => named(OneQubit::Z)?,
            "R" => named(OneQubit::Ry)?,
            "RD" => named(OneQubit::Rydg)?,
            "G" => {
                arity(2)?;
                let ph = toks[2]
                    .parse::<i32>()
                    .map_err(|_| qerr(ln, format!("bad phase index {:?}", toks[2])))?;
                Gate::one(qubit(toks[1])?, OneQubit::GlobalPhase(ph.rem_euclid(16)))
            }
            "P" => {
                arity(3)?;
                let op = OneQubit::Phase {
                    re: num(toks[2])?,
                    im: num(toks[3])?,
                };
                op.check_unitary(check_prec, &tol)
                    .map_err(|e| qerr(ln, e.to_string()))?;
                Gate::one(qubit(toks[1])?, op)
            }
            "U" => {
                arity(9)?;
                let mut e: [BigRational; 8] = Default::default();
                for (slot, t) in e.iter_mut().zip(&toks[2..]) {
                    *slot = num(t)?;
                }
                let op = OneQubit::Matrix(Box::new(e));
                op.check_unitary(check_prec, &tol)
                    .map_err(|e| qerr(ln, e.to_string()))?;
                Gate::one(qubit(toks[1])?, op)
            }
            "CSIGN" => {
                arity(2)?;
                let (a, b) = (qubit(toks[1])?, qubit(toks[2])?);
                if a == b {
                    return Err(qerr(ln, "CSIGN needs two distinct qubits"));
                }
                Gate::CSign(a, b)
            }
            other => return Err(qerr(ln, format!("unknown gate {other:?}"))),
        };
        q.push(gate).map_err(|e| qerr(ln, e.to_string()))?;
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolcirc::parse_boolfunc;
    use proptest::prelude::*;

    fn p() -> Precision {
        Precision::DEFAULT
    }

    fn close(a: &HpComplex, b: &HpComplex) -> bool {
        a.dist(b) <= p().tolerance(40)
    }

    fn approx(re: f64) -> HpComplex {
        HpComplex::from_f64(p(), re, 0.0)
    }

    fn rational(num: i64, den: i64) -> HpComplex {
        HpComplex::from_rational(p(), &BigRational::from((num, den)))
    }

    /// Reference matrix for a basis permutation with optional signs.
    fn signed_permutation(dim: usize, f: impl Fn(usize) -> (usize, i32)) -> Matrix<HpComplex> {
        let mut m = Matrix::zeros(dim, dim, p());
        for col in 0..dim {
            let (row, sign) = f(col);
            m[(row, col)] = if sign < 0 {
                -HpComplex::one(p())
            } else {
                HpComplex::one(p())
            };
        }
        m
    }

    fn toffoli_reference() -> Matrix<HpComplex> {
        signed_permutation(8, |x| {
            if x & 0b110 == 0b110 {
                (x ^ 1, 1)
            } else {
                (x, 1)
            }
        })
    }

    #[test]
    fn toffoli_is_exact_with_six_csigns() {
        let q = toffoli_circuit();
        assert_eq!(q.csign_count(), 6);
        let u = q.dense_unitary(p()).unwrap();
        assert!(u.max_dist(&toffoli_reference()) <= p().tolerance(40));
        // |110⟩ → |111⟩ and |010⟩ is fixed.
        assert!(close(&u[(0b111, 0b110)], &HpComplex::one(p())));
        assert!(close(&u[(0b010, 0b010)], &HpComplex::one(p())));
    }

    #[test]
    fn ccz_is_diagonal_sign() {
        let q = ccz_circuit();
        assert_eq!(q.csign_count(), 6);
        let u = q.dense_unitary(p()).unwrap();
        let expect = signed_permutation(8, |x| (x, if x == 7 { -1 } else { 1 }));
        assert!(u.max_dist(&expect) <= p().tolerance(40));
    }

    #[test]
    fn relative_phase_toffoli_is_signed_toffoli() {
        let mut q = QCircuit::new(3, 3);
        q.extend(relative_phase_toffoli_gates(0, 1, 2)).unwrap();
        assert_eq!(q.csign_count(), 3);
        let u = q.dense_unitary(p()).unwrap();
        let expect = signed_permutation(8, |x| {
            let row = if x & 0b110 == 0b110 { x ^ 1 } else { x };
            (row, if x == 0b101 { -1 } else { 1 })
        });
        assert!(u.max_dist(&expect) <= p().tolerance(40));
        assert!(u.max_imag() <= p().tolerance(40));
    }

    #[test]
    fn named_gates_are_unitary() {
        let tol = p().tolerance(40);
        let ops = [
            OneQubit::H,
            OneQubit::B,
            OneQubit::Bdg,
            OneQubit::X,
            OneQubit::Z,
            OneQubit::Ry,
            OneQubit::Rydg,
            OneQubit::GlobalPhase(3),
        ];
        for op in ops {
            op.check_unitary(p(), &tol).unwrap();
        }
    }

    #[test]
    fn b_gate_constant() {
        // B = ½[[√(2+√2), i√(2−√2)], [i√(2−√2), √(2+√2)]].
        let m = OneQubit::B.matrix(p());
        let (a, c) = (
            (2.0 + 2f64.sqrt()).sqrt() / 2.0,
            (2.0 - 2f64.sqrt()).sqrt() / 2.0,
        );
        let (re, im) = m[0].to_f64_pair();
        assert!((re - a).abs() < 1e-15 && im == 0.0);
        let (re, im) = m[1].to_f64_pair();
        assert!(re == 0.0 && (im - c).abs() < 1e-15);
    }

    #[test]
    fn dense_unitary_examples() {
        let mut h = QCircuit::new(1, 1);
        h.push(Gate::one(0, OneQubit::H)).unwrap();
        let u = h.dense_unitary(p()).unwrap();
        let r = HpComplex::real(p(), Float::with_val(128, 0.5).sqrt());
        assert!(close(&u[(0, 0)], &r) && close(&u[(1, 1)], &-r.clone()));
        assert!(close(&h.amp00(p()).unwrap(), &r));

        let mut cz = QCircuit::new(2, 2);
        cz.push(Gate::CSign(0, 1)).unwrap();
        let expect = signed_permutation(4, |x| (x, if x == 3 { -1 } else { 1 }));
        assert!(cz.dense_unitary(p()).unwrap().max_dist(&expect) <= p().tolerance(40));

        let empty = QCircuit::new(2, 2);
        assert!(
            empty
                .dense_unitary(p())
                .unwrap()
                .max_dist(&Matrix::identity(4, p()))
                <= p().tolerance(40)
        );
        assert!(close(&empty.amp00(p()).unwrap(), &HpComplex::one(p())));
        assert_eq!(empty.csign_count(), 0);
    }

    #[test]
    fn refusals() {
        assert!(matches!(
            QCircuit::new(13, 1).dense_unitary(p()),
            Err(Error::Budget { .. })
        ));
        assert!(matches!(
            QCircuit::new(25, 1).amp00(p()),
            Err(Error::Budget { .. })
        ));
        let mut q = QCircuit::new(2, 2);
        assert!(q.push(Gate::CSign(0, 0)).is_err());
        assert!(q.push(Gate::one(2, OneQubit::X)).is_err());
    }

    #[test]
    fn phase_poly_examples() {
        let cz = BoolFunc::phase_poly(2, &[&[1, 2]]).unwrap();
        let q = phase_poly_circuit(&cz, ToffoliStyle::Exact).unwrap();
        assert_eq!((q.k(), q.csign_count()), (2, 1));
        assert!(close(&q.amp00(p()).unwrap(), &approx(0.5)));

        let z = BoolFunc::phase_poly(1, &[&[1]]).unwrap();
        let q = phase_poly_circuit(&z, ToffoliStyle::Exact).unwrap();
        assert_eq!(q.csign_count(), 0);
        assert!(close(&q.amp00(p()).unwrap(), &HpComplex::zero(p())));

        let ccz = BoolFunc::phase_poly(3, &[&[1, 2, 3]]).unwrap();
        let exact = phase_poly_circuit(&ccz, ToffoliStyle::Exact).unwrap();
        assert_eq!((exact.k(), exact.csign_count()), (3, 6));
        assert!(close(&exact.amp00(p()).unwrap(), &rational(3, 4)));
        let real = phase_poly_circuit(&ccz, ToffoliStyle::RelativePhase).unwrap();
        assert_eq!((real.k(), real.csign_count()), (4, 7));
        assert!(close(&real.amp00(p()).unwrap(), &rational(3, 4)));

        let net = parse_boolfunc("n 1\nrepr network\noutput x1\n").unwrap();
        assert!(phase_poly_circuit(&net, ToffoliStyle::Exact).is_err());
    }

    #[test]
    fn uncompute_examples() {
        let and = parse_boolfunc("n 2\nrepr network\nwire w1 = AND x1 x2\noutput w1\n").unwrap();
        let q = uncompute_circuit(&and, ToffoliStyle::Exact).unwrap();
        assert_eq!((q.k(), q.csign_count()), (3, 12));
        assert!(close(&q.amp00(p()).unwrap(), &approx(0.5)));
        let q = uncompute_circuit(&and, ToffoliStyle::RelativePhase).unwrap();
        assert_eq!((q.k(), q.csign_count()), (3, 6));
        assert!(close(&q.amp00(p()).unwrap(), &approx(0.5)));

        let not = parse_boolfunc("n 1\nrepr network\nwire w1 = NOT x1\noutput w1\n").unwrap();
        let q = uncompute_circuit(&not, ToffoliStyle::RelativePhase).unwrap();
        assert_eq!(q.csign_count(), 0);
        assert!(close(&q.amp00(p()).unwrap(), &HpComplex::zero(p())));

        let constant =
            parse_boolfunc("n 1\nrepr network\nwire w1 = XOR x1 x1\noutput w1\n").unwrap();
        let q = uncompute_circuit(&constant, ToffoliStyle::RelativePhase).unwrap();
        assert!(close(&q.amp00(p()).unwrap(), &HpComplex::one(p())));
    }

    /// Independent oracle: `H^⊗n D_C H^⊗n` applied with a diagonal phase.
    fn diagonal_oracle_amp(c: &BoolFunc) -> HpComplex {
        let n = c.n();
        let total: i64 = (0..1u64 << n).map(|x| c.eval(x) as i64).sum();
        rational(total, 1 << n)
    }

    fn check_restores_ancillas(q: &QCircuit) {
        let n = q.n() as usize;
        let state = q.statevector(p()).unwrap();
        let anc_mask = (1usize << (q.k() - n)) - 1;
        let leak = state
            .iter()
            .enumerate()
            .filter(|(i, _)| i & anc_mask != 0)
            .fold(Float::new(128), |acc, (_, z)| acc + z.norm_sqr());
        let bound = Float::with_val(128, Float::i_exp(1, -2 * (128 - 40)));
        assert!(leak <= bound, "ancilla leak {leak}");
    }

    #[test]
    fn amplitude_encodes_delta_on_all_small_phase_polys() {
        for n in 1..=3u32 {
            let monos: Vec<Vec<usize>> = (1u32..1 << n)
                .map(|mask| (0..n as usize).filter(|i| mask >> i & 1 == 1).collect())
                .collect();
            // Every subset of monomials for n ≤ 2; a sampled family for n = 3.
            let limit: u64 = if n <= 2 { 1 << monos.len() } else { 40 };
            for pick in 0..limit {
                let sel = if n <= 2 {
                    pick
                } else {
                    pick.wrapping_mul(0x9E37_79B9) % (1 << monos.len())
                };
                let terms: Vec<&[usize]> = monos
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| sel >> i & 1 == 1)
                    .map(|(_, m)| m.as_slice())
                    .collect();
                let one_based: Vec<Vec<usize>> = terms
                    .iter()
                    .map(|t| t.iter().map(|v| v + 1).collect())
                    .collect();
                let refs: Vec<&[usize]> = one_based.iter().map(Vec::as_slice).collect();
                let c = BoolFunc::phase_poly(n, &refs).unwrap();
                for style in [ToffoliStyle::Exact, ToffoliStyle::RelativePhase] {
                    let q = phase_poly_circuit(&c, style).unwrap();
                    assert!(
                        close(&q.amp00(p()).unwrap(), &diagonal_oracle_amp(&c)),
                        "{c:?} {style:?}"
                    );
                    check_restores_ancillas(&q);
                }
            }
        }
    }

    #[test]
    fn networks_with_xor_folding_restore_ancillas() {
        let sources = [
            "n 3\nrepr network\nwire a = XOR x1 x2\nwire b = AND a x3\noutput b\n",
            "n 3\nrepr network\nwire a = XOR x1 x2\nwire b = AND a x1\noutput b\n",
            "n 3\nrepr network\nwire a = XOR x1 x2\nwire b = XOR x2 x3\nwire c = AND a b\noutput c\n",
            "n 2\nrepr network\nwire a = OR x1 x2\noutput a\n",
            "n 3\nrepr network\nwire a = NOT x1\nwire b = AND a x2\nwire c = OR b x3\noutput c\n",
            "n 2\nrepr network\nwire a = AND x1 x2\nwire b = AND x1 x2\nwire c = XOR a b\noutput c\n",
            "n 2\nrepr network\nwire a = AND x1 x1\nwire b = NOT x2\nwire c = AND x2 b\nwire d = XOR a c\noutput d\n",
        ];
        for src in sources {
            let c = parse_boolfunc(src).unwrap();
            for style in [ToffoliStyle::Exact, ToffoliStyle::RelativePhase] {
                let q = uncompute_circuit(&c, style).unwrap();
                assert!(
                    close(&q.amp00(p()).unwrap(), &diagonal_oracle_amp(&c)),
                    "{src}"
                );
                check_restores_ancillas(&q);
            }
        }
    }

    #[test]
    fn inverse_undoes_circuit() {
        let c = BoolFunc::phase_poly(3, &[&[1, 2, 3], &[1]]).unwrap();
        let q = phase_poly_circuit(&c, ToffoliStyle::Exact).unwrap();
        let mut both = q.clone();
        both.extend(q.inverse().gates().iter().cloned()).unwrap();
        let u = both.dense_unitary(p()).unwrap();
        assert!(u.max_dist(&Matrix::identity(8, p())) <= p().tolerance(40));
    }

    #[test]
    fn qc_round_trip_and_errors() {
        let c = BoolFunc::phase_poly(3, &[&[1, 2, 3]]).unwrap();
        let q = phase_poly_circuit(&c, ToffoliStyle::RelativePhase).unwrap();
        let back = parse_qcircuit(&q.to_qc()).unwrap();
        assert_eq!(back.gates(), q.gates());

        let src = "qubits 2\nP 1 0 1\nU 2 0 0 1 0 1 0 0 0\nCSIGN 1 2\nG 1 -3\n";
        let q = parse_qcircuit(src).unwrap();
        assert_eq!(parse_qcircuit(&q.to_qc()).unwrap(), q);
        assert!(q.to_qc().contains("G 1 13"));

        let line = |s: &str| match parse_qcircuit(s) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line("qbits 2\n"), 1);
        assert_eq!(line("qubits 2\nH 3\n"), 2);
        assert_eq!(line("qubits 2\nH 1\nCSIGN 1 1\n"), 3);
        assert_eq!(line("qubits 1\nP 1 2 0\n"), 2);
        assert_eq!(line("qubits 1\nU 1 1 0 0 0 0 0\n"), 2);
        assert_eq!(line("qubits 1\nT 1\n"), 2);
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_decimal("-0.25"), Some(BigRational::from((-1, 4))));
        assert_eq!(parse_decimal("1.5e-3"), Some(BigRational::from((3, 2000))));
        assert_eq!(parse_decimal("12"), Some(BigRational::from(12)));
        assert_eq!(parse_decimal("."), None);
        assert_eq!(parse_decimal("1x"), None);
        assert_eq!(format_decimal(&BigRational::from((-3, 2000))), "-0.0015");
        assert_eq!(format_decimal(&BigRational::from(7)), "7");
    }

    proptest! {
        #[test]
        fn decimal_format_round_trips(num in -100_000i64..100_000, places in 0u32..12) {
            let x = BigRational::from((num, 10i64.pow(places)));
            prop_assert_eq!(parse_decimal(&format_decimal(&x)), Some(x));
        }
    }
}
