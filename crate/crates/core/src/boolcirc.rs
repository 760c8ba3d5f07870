//! Boolean functions `C: {0,1}^n → {−1,+1}` and their ±1-weighted count
//! `Δ_C = Σ_x C(x)`.
//!
//! Assignments are indexed by an integer `x` whose most significant of `n`
//! bits is `x₁`. Every representation evaluates 64 consecutive assignments
//! at a time as bit lanes.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Format, Result};
use crate::numerics::BigInt;

/// Largest variable count the brute-force oracle accepts.
pub const MAX_VARS: u32 = 24;

/// A set of 1–3 distinct variables, stored 0-based and sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<usize>);

impl Monomial {
    pub fn new(vars: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = vars.into_iter().collect();
        if set.is_empty() || set.len() > 3 {
            return Err(Error::invalid(format!(
                "monomial degree {} outside 1..=3",
                set.len()
            )));
        }
        Ok(Monomial(set.into_iter().collect()))
    }

    pub fn vars(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Or,
    Xor,
    Not,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Not => 1,
            _ => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Xor => "XOR",
            GateKind::Not => "NOT",
        }
    }
}

/// A wire operand: an input variable (0-based) or an earlier wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Signal {
    Input(usize),
    Wire(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wire {
    pub name: String,
    pub gate: GateKind,
    pub args: Vec<Signal>,
}

/// A straight-line circuit; wires only reference inputs and earlier wires.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    wires: Vec<Wire>,
    output: Signal,
}

impl Network {
    pub fn new(n: u32, wires: Vec<Wire>, output: Signal) -> Result<Self> {
        let check = |s: Signal, limit: usize| match s {
            Signal::Input(i) if i < n as usize => Ok(()),
            Signal::Wire(w) if w < limit => Ok(()),
            other => Err(Error::invalid(format!("dangling signal {other:?}"))),
        };
        for (idx, w) in wires.iter().enumerate() {
            if w.args.len() != w.gate.arity() {
                return Err(Error::invalid(format!(
                    "wire {} expects {} operands",
                    w.name,
                    w.gate.arity()
                )));
            }
            for &a in &w.args {
                check(a, idx)?;
            }
        }
        check(output, wires.len())?;
        Ok(Network { wires, output })
    }

    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    pub fn output(&self) -> Signal {
        self.output
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Repr {
    /// `C(x)` for every `x`; `true` stands for `−1`.
    TruthTable(Vec<bool>),
    /// `C(x) = (−1)^{⊕_m Π_{i∈m} x_i}`; an empty list is the constant `+1`.
    PhasePoly(Vec<Monomial>),
    /// `C(x) = (−1)^{f(x)}` for the network output `f`.
    Network(Network),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolFunc {
    n: u32,
    repr: Repr,
}

// Lane masks for the six low bits of an assignment index within a 64-block.
const LANE_BITS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

impl BoolFunc {
    pub fn new(n: u32, repr: Repr) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::invalid(format!(
                "variable count {n} outside 1..={MAX_VARS}"
            )));
        }
        match &repr {
            Repr::TruthTable(t) if t.len() != 1usize << n => {
                return Err(Error::invalid(format!(
                    "truth table has {} entries, expected {}",
                    t.len(),
                    1usize << n
                )))
            }
            Repr::PhasePoly(terms) => {
                if let Some(v) = terms
                    .iter()
                    .flat_map(|m| m.vars())
                    .find(|&&v| v >= n as usize)
                {
                    return Err(Error::invalid(format!(
                        "monomial variable x{} exceeds n",
                        v + 1
                    )));
                }
            }
            _ => {}
        }
        Ok(BoolFunc { n, repr })
    }

    pub fn phase_poly(n: u32, terms: &[&[usize]]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|t| Monomial::new(t.iter().map(|v| v - 1)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, Repr::PhasePoly(terms))
    }

    pub fn constant_one(n: u32) -> Result<Self> {
        Self::new(n, Repr::PhasePoly(Vec::new()))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    /// `C(x) ∈ {−1, +1}`.
    pub fn eval(&self, x: u64) -> i8 {
        let base = x & !63;
        if self.eval_block(base) >> (x - base) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    fn input_lane(&self, var: usize, base: u64) -> u64 {
        let shift = self.n as usize - 1 - var;
        if shift < 6 {
            LANE_BITS[shift]
        } else if base >> shift & 1 == 1 {
            u64::MAX
        } else {
            0
        }
    }

    /// Bit `t` is set iff `C(base + t) = −1`; `base` is a multiple of 64.
    fn eval_block(&self, base: u64) -> u64 {
        match &self.repr {
            Repr::TruthTable(t) => {
                let end = (base + 64).min(t.len() as u64);
                (base..end).fold(0, |acc, x| acc | (t[x as usize] as u64) << (x - base))
            }
            Repr::PhasePoly(terms) => terms.iter().fold(0, |acc, m| {
                acc ^ m
                    .vars()
                    .iter()
                    .fold(u64::MAX, |lane, &v| lane & self.input_lane(v, base))
            }),
            Repr::Network(net) => {
                let mut values = Vec::with_capacity(net.wires.len());
                let read = |s: Signal, values: &[u64]| match s {
                    Signal::Input(i) => self.input_lane(i, base),
                    Signal::Wire(w) => values[w],
                };
                for w in &net.wires {
                    let a = read(w.args[0], &values);
                    let v = match w.gate {
                        GateKind::Not => !a,
                        GateKind::And => a & read(w.args[1], &values),
                        // De Morgan: a ∨ b = ¬(¬a ∧ ¬b).
                        GateKind::Or => !(!a & !read(w.args[1], &values)),
                        GateKind::Xor => a ^ read(w.args[1], &values),
                    };
                    values.push(v);
                }
                read(net.output, &values)
            }
        }
    }

    /// `Δ_C` by exhaustive enumeration.
    pub fn delta(&self) -> Result<BigInt> {
        if self.n > MAX_VARS {
            return Err(Error::budget(
                "brute-force variable count",
                self.n as u64,
                MAX_VARS as u64,
            ));
        }
        let total: u64 = 1 << self.n;
        let blocks = total.div_ceil(64);
        // Fixed chunking; the partial sums are exact so order only matters for traces.
        let chunk = 1024u64;
        let partials: Vec<i64> = (0..blocks.div_ceil(chunk))
            .into_par_iter()
            .map(|c| {
                (c * chunk..((c + 1) * chunk).min(blocks))
                    .map(|blk| {
                        let base = blk * 64;
                        let valid = (total - base).min(64);
                        let mask = if valid == 64 {
                            u64::MAX
                        } else {
                            (1u64 << valid) - 1
                        };
                        valid as i64 - 2 * (self.eval_block(base) & mask).count_ones() as i64
                    })
                    .sum()
            })
            .collect();
        Ok(BigInt::from(partials.iter().sum::<i64>()))
    }

    /// The same function as an explicit truth table.
    pub fn to_truth_table(&self) -> BoolFunc {
        let table = (0..1u64 << self.n).map(|x| self.eval(x) == -1).collect();
        BoolFunc {
            n: self.n,
            repr: Repr::TruthTable(table),
        }
    }

    /// Algebraic normal form: the monomials, as variable masks in the
    /// assignment-index convention, whose XOR is `f` where `C = (−1)^f`.
    pub fn anf(&self) -> Vec<u64> {
        let mut coeffs: Vec<bool> = (0..1u64 << self.n).map(|x| self.eval(x) == -1).collect();
        for bit in 0..self.n {
            let step = 1usize << bit;
            for x in 0..coeffs.len() {
                if x & step != 0 {
                    coeffs[x] ^= coeffs[x ^ step];
                }
            }
        }
        (0..coeffs.len() as u64)
            .filter(|&m| coeffs[m as usize])
            .collect()
    }

    /// An equivalent function with a gate-level form. Phase polynomials and
    /// networks are returned unchanged; a truth table becomes a phase
    /// polynomial when its normal form has no constant term and degree at
    /// most 3, and an AND/XOR network otherwise.
    pub fn to_gate_form(&self) -> BoolFunc {
        if !matches!(self.repr, Repr::TruthTable(_)) {
            return self.clone();
        }
        let n = self.n as usize;
        let vars_of = |mask: u64| -> Vec<usize> {
            (0..n).filter(|&v| mask >> (n - 1 - v) & 1 == 1).collect()
        };
        let monomials = self.anf();
        if monomials.iter().all(|&m| m != 0 && m.count_ones() <= 3) {
            let terms = monomials
                .iter()
                .map(|&m| Monomial::new(vars_of(m)).expect("degree 1..=3"))
                .collect();
            return BoolFunc {
                n: self.n,
                repr: Repr::PhasePoly(terms),
            };
        }
        let mut wires: Vec<Wire> = Vec::new();
        let push = |gate: GateKind, args: Vec<Signal>, wires: &mut Vec<Wire>| {
            wires.push(Wire {
                name: format!("w{}", wires.len() + 1),
                gate,
                args,
            });
            Signal::Wire(wires.len() - 1)
        };
        let mut acc: Option<Signal> = None;
        let mut constant = false;
        for &m in &monomials {
            if m == 0 {
                constant = true;
                continue;
            }
            let vars = vars_of(m);
            let mut term = Signal::Input(vars[0]);
            for &v in &vars[1..] {
                term = push(GateKind::And, vec![term, Signal::Input(v)], &mut wires);
            }
            acc = Some(match acc {
                None => term,
                Some(prev) => push(GateKind::Xor, vec![prev, term], &mut wires),
            });
        }
        let mut out = match acc {
            Some(s) => s,
            None => push(
                GateKind::Xor,
                vec![Signal::Input(0), Signal::Input(0)],
                &mut wires,
            ),
        };
        if constant {
            out = push(GateKind::Not, vec![out], &mut wires);
        }
        let net = Network::new(self.n, wires, out).expect("wires reference earlier wires");
        BoolFunc {
            n: self.n,
            repr: Repr::Network(net),
        }
    }

    /// Canonical `.bf` text for this function.
    pub fn to_bf(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        match &self.repr {
            Repr::TruthTable(t) => {
                out.push_str("repr table\n");
                out.extend(t.iter().map(|&neg| if neg { '-' } else { '+' }));
                out.push('\n');
            }
            Repr::PhasePoly(terms) => {
                out.push_str("repr phasepoly\n");
                for m in terms {
                    out.push_str("term");
                    for v in m.vars() {
                        let _ = write!(out, " {}", v + 1);
                    }
                    out.push('\n');
                }
            }
            Repr::Network(net) => {
                out.push_str("repr network\n");
                let name = |s: Signal| match s {
                    Signal::Input(i) => format!("x{}", i + 1),
                    Signal::Wire(w) => net.wires[w].name.clone(),
                };
                for w in &net.wires {
                    let _ = write!(out, "wire {} = {}", w.name, w.gate.name());
                    for &a in &w.args {
                        let _ = write!(out, " {}", name(a));
                    }
                    out.push('\n');
                }
                let _ = writeln!(out, "output {}", name(net.output));
            }
        }
        out
    }
}

/// `C[k]`: `C` extended by `|k|` virtual assignments of value `sign(k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaddedFunc {
    pub base: BoolFunc,
    pub k: i64,
}

impl PaddedFunc {
    pub fn delta(&self) -> Result<BigInt> {
        Ok(self.base.delta()? + self.k)
    }
}

pub fn pad(c: &BoolFunc, k: i64) -> PaddedFunc {
    PaddedFunc { base: c.clone(), k }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::parse(Format::BoolFunc, line, msg)
}

/// Parses the line-based `.bf` format.
pub fn parse_boolfunc(text: &str) -> Result<BoolFunc> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let n: u32 = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["n", v] => v
            .parse()
            .map_err(|_| perr(ln, format!("bad variable count {v:?}")))?,
        _ => return Err(perr(ln, "expected header \"n <int>\"")),
    };
    if n == 0 || n > MAX_VARS {
        return Err(perr(
            ln,
            format!("variable count {n} outside 1..={MAX_VARS}"),
        ));
    }
    let (ln, repr_line) = lines
        .next()
        .ok_or_else(|| perr(ln + 1, "missing repr line"))?;
    let kind = match repr_line.split_whitespace().collect::<Vec<_>>()[..] {
        ["repr", k] => k,
        _ => return Err(perr(ln, "expected \"repr table|phasepoly|network\"")),
    };

    let repr = match kind {
        "table" => {
            let (ln, row) = lines
                .next()
                .ok_or_else(|| perr(ln + 1, "missing truth table"))?;
            let mut table = Vec::with_capacity(1 << n);
            for ch in row.chars() {
                match ch {
                    '+' => table.push(false),
                    '-' | '\u{2212}' => table.push(true),
                    other => return Err(perr(ln, format!("invalid table character {other:?}"))),
                }
            }
            if table.len() != 1 << n {
                return Err(perr(
                    ln,
                    format!(
                        "table length {} does not match 2^{n} = {}",
                        table.len(),
                        1u64 << n
                    ),
                ));
            }
            if let Some((ln, _)) = lines.next() {
                return Err(perr(ln, "unexpected content after truth table"));
            }
            Repr::TruthTable(table)
        }
        "phasepoly" => {
            let mut terms = Vec::new();
            let mut seen = BTreeSet::new();
            for (ln, line) in lines {
                let mut toks = line.split_whitespace();
                if toks.next() != Some("term") {
                    return Err(perr(ln, "expected \"term <i> [<j> [<k>]]\""));
                }
                let vars = toks
                    .map(|t| match t.parse::<usize>() {
                        Ok(v) if (1..=n as usize).contains(&v) => Ok(v - 1),
                        _ => Err(perr(ln, format!("variable {t:?} outside 1..={n}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let distinct: BTreeSet<_> = vars.iter().copied().collect();
                if distinct.len() != vars.len() {
                    return Err(perr(ln, "repeated variable in monomial"));
                }
                if vars.len() > 3 {
                    return Err(perr(
                        ln,
                        format!("monomial degree {} exceeds 3", vars.len()),
                    ));
                }
                let m = Monomial::new(vars).map_err(|e| perr(ln, e.to_string()))?;
                if !seen.insert(m.clone()) {
                    return Err(perr(ln, "duplicate monomial"));
                }
                terms.push(m);
            }
            Repr::PhasePoly(terms)
        }
        "network" => parse_network(n, lines)?,
        other => return Err(perr(ln, format!("unknown representation {other:?}"))),
    };
    BoolFunc::new(n, repr).map_err(|e| perr(0, e.to_string()))
}

fn parse_network<'a>(n: u32, lines: impl Iterator<Item = (usize, &'a str)>) -> Result<Repr> {
    let mut wires: Vec<Wire> = Vec::new();
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut output = None;
    let mut last_line = 0;
    let resolve = |tok: &str, names: &HashMap<String, usize>, ln: usize| -> Result<Signal> {
        if let Some(idx) = tok.strip_prefix('x').and_then(|v| v.parse::<usize>().ok()) {
            if (1..=n as usize).contains(&idx) {
                return Ok(Signal::Input(idx - 1));
            }
            return Err(perr(ln, format!("input {tok} outside x1..x{n}")));
        }
        names
            .get(tok)
            .map(|&w| Signal::Wire(w))
            .ok_or_else(|| perr(ln, format!("reference to undefined or later wire {tok:?}")))
    };
    for (ln, line) in lines {
        last_line = ln;
        if output.is_some() {
            return Err(perr(ln, "content after output line"));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[..] {
            ["wire", name, "=", gate, ref args @ ..] => {
                let gate = match gate {
                    "AND" => GateKind::And,
                    "OR" => GateKind::Or,
                    "XOR" => GateKind::Xor,
                    "NOT" => GateKind::Not,
                    other => return Err(perr(ln, format!("unknown gate {other:?}"))),
                };
                if args.len() != gate.arity() {
                    return Err(perr(
                        ln,
                        format!("{} takes {} operand(s)", gate.name(), gate.arity()),
                    ));
                }
                let looks_like_input = name
                    .strip_prefix('x')
                    .is_some_and(|v| v.parse::<usize>().is_ok());
                if looks_like_input || names.contains_key(name) {
                    return Err(perr(
                        ln,
                        format!("wire name {name:?} is reserved or already defined"),
                    ));
                }
                let args = args
                    .iter()
                    .map(|a| resolve(a, &names, ln))
                    .collect::<Result<Vec<_>>>()?;
                names.insert(name.to_string(), wires.len());
                wires.push(Wire {
                    name: name.to_string(),
                    gate,
                    args,
                });
            }
            ["output", name] => output = Some(resolve(name, &names, ln)?),
            _ => {
                return Err(perr(
                    ln,
                    "expected \"wire <name> = <GATE> <arg> [<arg>]\" or \"output <name>\"",
                ))
            }
        }
    }
    let output = output.ok_or_else(|| perr(last_line + 1, "missing output line"))?;
    Ok(Repr::Network(Network::new(n, wires, output)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle: straightforward per-assignment evaluation.
    fn slow_delta(c: &BoolFunc) -> i64 {
        let n = c.n();
        let bit = |x: u64, v: usize| (x >> (n as usize - 1 - v)) & 1 == 1;
        (0..1u64 << n)
            .map(|x| {
                let neg = match c.repr() {
                    Repr::TruthTable(t) => t[x as usize],
                    Repr::PhasePoly(ts) => ts
                        .iter()
                        .fold(false, |acc, m| acc ^ m.vars().iter().all(|&v| bit(x, v))),
                    Repr::Network(net) => {
                        let mut vals: Vec<bool> = Vec::new();
                        let rd = |s: Signal, vals: &Vec<bool>| match s {
                            Signal::Input(i) => bit(x, i),
                            Signal::Wire(w) => vals[w],
                        };
                        for w in net.wires() {
                            let a = rd(w.args[0], &vals);
                            let v = match w.gate {
                                GateKind::Not => !a,
                                GateKind::And => a && rd(w.args[1], &vals),
                                GateKind::Or => a || rd(w.args[1], &vals),
                                GateKind::Xor => a ^ rd(w.args[1], &vals),
                            };
                            vals.push(v);
                        }
                        rd(net.output(), &vals)
                    }
                };
                if neg {
                    -1
                } else {
                    1
                }
            })
            .sum()
    }

    #[test]
    fn delta_examples() {
        assert_eq!(BoolFunc::constant_one(2).unwrap().delta().unwrap(), 4);
        let c = BoolFunc::phase_poly(2, &[&[1, 2]]).unwrap();
        assert_eq!(c.delta().unwrap(), 2);
        assert_eq!(slow_delta(&c), 2);
        let t = parse_boolfunc("n 2\nrepr table\n+−−+\n").unwrap();
        assert_eq!(t.delta().unwrap(), 0);
    }

    #[test]
    fn pad_examples() {
        let c = BoolFunc::phase_poly(2, &[&[1, 2]]).unwrap();
        assert_eq!(pad(&c, 3).delta().unwrap(), 5);
        assert_eq!(pad(&c, 0).delta().unwrap(), 2);
        assert_eq!(pad(&c, -7).delta().unwrap(), -5);
    }

    #[test]
    fn parse_examples() {
        let t = parse_boolfunc("n 2\nrepr table\n++-+\n").unwrap();
        assert_eq!(t.repr(), &Repr::TruthTable(vec![false, false, true, false]));

        let p = parse_boolfunc("n 3\nrepr phasepoly\nterm 1 2 3\n").unwrap();
        assert_eq!(
            p.repr(),
            &Repr::PhasePoly(vec![Monomial::new([0, 1, 2]).unwrap()])
        );

        let net = parse_boolfunc("n 2\nrepr network\nwire w1 = AND x1 x2\noutput w1\n").unwrap();
        assert_eq!(net.delta().unwrap(), 2);
        assert_eq!(slow_delta(&net), 2);
    }

    #[test]
    fn parse_comments_and_round_trip() {
        let src = "# cz phase\nn 2  # two variables\n\nrepr phasepoly\nterm 1 2\n";
        let c = parse_boolfunc(src).unwrap();
        assert_eq!(parse_boolfunc(&c.to_bf()).unwrap(), c);
        let net = parse_boolfunc(
            "n 3\nrepr network\nwire a = XOR x1 x2\nwire b = NOT a\nwire c = OR b x3\noutput c\n",
        )
        .unwrap();
        assert_eq!(parse_boolfunc(&net.to_bf()).unwrap(), net);
    }

    fn parse_err_line(src: &str) -> usize {
        match parse_boolfunc(src) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert_eq!(parse_err_line("m 2\nrepr table\n++++\n"), 1);
        assert_eq!(parse_err_line("n 2\nrepr table\n+++\n"), 3);
        assert_eq!(
            parse_err_line("n 2\nrepr network\nwire a = AND x1 b\nwire b = NOT x1\noutput a\n"),
            3
        );
        assert_eq!(
            parse_err_line("n 4\nrepr phasepoly\nterm 1\nterm 1 2 3 4\n"),
            4
        );
        assert_eq!(parse_err_line("n 2\nrepr phasepoly\nterm 3\n"), 3);
        assert_eq!(parse_err_line("n 2\nrepr cnf\n"), 2);
        assert_eq!(
            parse_err_line("n 2\nrepr network\nwire a = AND x1\noutput a\n"),
            3
        );
        assert_eq!(parse_err_line("n 2\nrepr network\nwire a = AND x1 x2\n"), 4);
        assert_eq!(parse_err_line("n 0\nrepr table\n+\n"), 1);
    }

    #[test]
    fn network_output_may_be_an_input() {
        let c = parse_boolfunc("n 1\nrepr network\noutput x1\n").unwrap();
        assert_eq!(c.delta().unwrap(), 0);
    }

    #[test]
    fn delta_across_block_boundaries() {
        // n = 8 spans several 64-lane blocks; n = 3 uses a partial block.
        for n in [3u32, 6, 7, 8] {
            let c = BoolFunc::phase_poly(n, &[&[1, n as usize], &[2], &[1, 2, 3]]).unwrap();
            assert_eq!(c.delta().unwrap(), slow_delta(&c));
        }
    }

    #[test]
    fn large_n_is_refused_at_construction() {
        assert!(BoolFunc::constant_one(25).is_err());
        assert_eq!(
            BoolFunc::constant_one(20).unwrap().delta().unwrap(),
            1 << 20
        );
    }

    #[test]
    fn truth_tables_lower_to_gate_forms() {
        let and3 = parse_boolfunc("n 3\nrepr table\n+++++++-\n").unwrap();
        let g = and3.to_gate_form();
        assert_eq!(
            g.repr(),
            &Repr::PhasePoly(vec![Monomial::new([0, 1, 2]).unwrap()])
        );
        let xnor = parse_boolfunc("n 2\nrepr table\n+--+\n").unwrap();
        assert_eq!(
            xnor.to_gate_form().repr(),
            &Repr::PhasePoly(vec![
                Monomial::new([1]).unwrap(),
                Monomial::new([0]).unwrap(),
            ])
        );
        let neg = parse_boolfunc("n 1\nrepr table\n--\n").unwrap();
        assert!(matches!(neg.to_gate_form().repr(), Repr::Network(_)));
        assert_eq!(neg.to_gate_form().delta().unwrap(), -2);
    }

    fn any_func(max_n: u32) -> impl Strategy<Value = BoolFunc> {
        (1..=max_n).prop_flat_map(|n| {
            let nn = n as usize;
            let mono = proptest::collection::btree_set(0..nn, 1..=3.min(nn));
            let poly = proptest::collection::btree_set(mono, 0..6).prop_map(move |ms| {
                BoolFunc::new(
                    n,
                    Repr::PhasePoly(ms.into_iter().map(|m| Monomial::new(m).unwrap()).collect()),
                )
                .unwrap()
            });
            let wire = (0..4usize, any::<u16>(), any::<u16>());
            let net = proptest::collection::vec(wire, 0..6)
                .prop_flat_map(move |ws| {
                    let count = ws.len();
                    (Just(ws), 0..(nn + count))
                })
                .prop_map(move |(ws, out)| {
                    let mut wires = Vec::new();
                    for (idx, (g, a, b)) in ws.into_iter().enumerate() {
                        let pick = |r: u16| {
                            let r = r as usize % (nn + idx);
                            if r < nn {
                                Signal::Input(r)
                            } else {
                                Signal::Wire(r - nn)
                            }
                        };
                        let gate = [GateKind::And, GateKind::Or, GateKind::Xor, GateKind::Not][g];
                        let args = if gate == GateKind::Not {
                            vec![pick(a)]
                        } else {
                            vec![pick(a), pick(b)]
                        };
                        wires.push(Wire {
                            name: format!("w{idx}"),
                            gate,
                            args,
                        });
                    }
                    let output = if out < nn {
                        Signal::Input(out)
                    } else {
                        Signal::Wire(out - nn)
                    };
                    BoolFunc::new(n, Repr::Network(Network::new(n, wires, output).unwrap()))
                        .unwrap()
                });
            prop_oneof![poly, net]
        })
    }

    proptest! {
        #[test]
        fn representations_agree(c in any_func(10)) {
            let d = c.delta().unwrap();
            prop_assert_eq!(c.to_truth_table().delta().unwrap(), d.clone());
            prop_assert_eq!(d, slow_delta(&c));
        }

        #[test]
        fn delta_parity_and_magnitude(c in any_func(10)) {
            let d = c.delta().unwrap();
            let full = BigInt::from(1u64 << c.n());
            prop_assert!(BigInt::from(d.abs_ref()) <= full);
            prop_assert!(BigInt::from(&full - &d).is_even());
        }

        #[test]
        fn gate_form_preserves_function(c in any_func(6)) {
            let t = c.to_truth_table();
            let g = t.to_gate_form();
            prop_assert!(!matches!(g.repr(), Repr::TruthTable(_)));
            prop_assert_eq!(g.to_truth_table(), t);
        }

        #[test]
        fn padding_shifts_delta(c in any_func(6), k in -200i64..200) {
            prop_assert_eq!(pad(&c, k).delta().unwrap(), c.delta().unwrap() + k);
        }

        #[test]
        fn bf_text_round_trips(c in any_func(6)) {
            prop_assert_eq!(parse_boolfunc(&c.to_bf()).unwrap(), c);
        }
    }
}
