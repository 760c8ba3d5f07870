//! Invariant suite behind `permred selftest`: gadget amplitudes, the
//! Hadamard-pair table, the Toffoli construction, the composition identity
//! for induced Fock operators, their unitarity, and the bound
//! `|Per(U)| ≤ 1` for unitary `U`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Float;

use crate::error::Result;
use crate::fock::{
    check_homomorphism, phi_operator, random_gaussian_matrix, random_unitary, transition_amp,
    FockState,
};
use crate::klm::{compile_with_block, dual_rail_action, ns1_amplitudes, ns1_block, Variant};
use crate::matrix::Matrix;
use crate::numerics::{HpComplex, Precision};
use crate::permanent::per_ryser;
use crate::qcirc::{toffoli_circuit, Gate, OneQubit, QCircuit};

#[derive(Clone, Debug, Default)]
pub struct SelftestOptions {
    /// Fewer random trials.
    pub quick: bool,
    /// Perturb `w₃₃` before running, to confirm the suite notices.
    pub corrupt_w: bool,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: Result<Float>, tol: &Float) -> Check {
    match worst {
        Ok(w) => Check {
            name,
            passed: w <= *tol,
            detail: format!(
                "max deviation {:.3e} (tolerance {:.3e})",
                w.to_f64(),
                tol.to_f64()
            ),
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn frac(prec: Precision, n: i64, d: i64) -> HpComplex {
    HpComplex::from_rational(prec, &crate::BigRational::from((n, d)))
}

fn worst_of(prec: Precision, pairs: impl IntoIterator<Item = (HpComplex, HpComplex)>) -> Float {
    pairs
        .into_iter()
        .fold(Float::new(prec.bits()), |acc, (a, b)| acc.max(&a.dist(&b)))
}

pub fn w_block(prec: Precision, corrupt: bool) -> Matrix<HpComplex> {
    let mut w = ns1_block(Variant::W, prec);
    if corrupt {
        let bump = HpComplex::from_f64(prec, 1.0 / 1024.0, 0.0);
        w[(2, 2)] = &w[(2, 2)] + &bump;
    }
    w
}

pub fn run(opts: &SelftestOptions) -> Vec<Check> {
    let prec = Precision::DEFAULT;
    let tol40 = prec.tolerance(40);
    let tol44 = prec.tolerance(44);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let trials = |full: usize, quick: usize| if opts.quick { quick } else { full };
    let w = w_block(prec, opts.corrupt_w);
    let mut out = Vec::new();

    for (name, variant, block, want) in [
        (
            "nonlinear sign gadget W",
            Variant::W,
            w.clone(),
            [(1, 2), (1, 2), (-1, 2)],
        ),
        (
            "nonlinear sign gadget Y",
            Variant::Y,
            ns1_block(Variant::Y, prec),
            [(1, 1), (1, 1), (-1, 1)],
        ),
    ] {
        let worst = ns1_amplitudes(&block, variant).map(|got| {
            worst_of(
                prec,
                got.into_iter().zip(want.map(|(n, d)| frac(prec, n, d))),
            )
        });
        out.push(check(name, worst, &tol40));
    }

    let mut cz = QCircuit::new(2, 2);
    cz.push(Gate::CSign(0, 1)).expect("two qubits");
    for (name, variant, block, scale) in [
        ("CSIGN gadget W", Variant::W, w.clone(), 4),
        ("CSIGN gadget Y", Variant::Y, ns1_block(Variant::Y, prec), 1),
    ] {
        let worst = compile_with_block(&cz, variant, &block, prec)
            .and_then(|l| dual_rail_action(&l))
            .map(|act| {
                let expect = Matrix::from_fn(4, 4, prec, |r, c| match (r == c, r) {
                    (false, _) => HpComplex::zero(prec),
                    (true, 3) => frac(prec, -1, scale),
                    (true, _) => frac(prec, 1, scale),
                });
                act.max_dist(&expect)
            });
        out.push(check(name, worst, &tol40));
    }

    let hadamard = {
        let m = OneQubit::H.matrix(prec);
        Matrix::from_rows(vec![m[..2].to_vec(), m[2..].to_vec()], prec).expect("2x2")
    };
    let worst = phi_operator(&hadamard, 2).map(|(_, phi)| {
        let r = HpComplex::real(prec, Float::with_val(prec.bits(), 0.5).sqrt());
        // |1,1⟩ → (|2,0⟩ − |0,2⟩)/√2 in the basis (0,2), (1,1), (2,0).
        worst_of(
            prec,
            [
                (phi[(2, 1)].clone(), r.clone()),
                (phi[(0, 1)].clone(), -r),
                (phi[(1, 1)].clone(), HpComplex::zero(prec)),
            ],
        )
    });
    out.push(check("Hadamard pair table", worst, &tol40));

    let diag = Matrix::from_f64_rows(prec, &[vec![1.0, 0.0], vec![0.0, -1.0]]).expect("2x2");
    let s = FockState(vec![2, 1]);
    let worst = transition_amp(&diag, &s, &s).map(|a| a.dist(&-HpComplex::one(prec)));
    out.push(check("transition amplitude example", worst, &tol40));

    let tof = toffoli_circuit();
    let worst = tof.dense_unitary(prec).map(|u| {
        let expect = Matrix::from_fn(8, 8, prec, |r, c| {
            let image = if c & 0b110 == 0b110 { c ^ 1 } else { c };
            if r == image {
                HpComplex::one(prec)
            } else {
                HpComplex::zero(prec)
            }
        });
        u.max_dist(&expect)
    });
    let mut tc = check("Toffoli from six CSIGNs", worst, &tol40);
    if tof.csign_count() != 6 {
        tc.passed = false;
        tc.detail = format!("{} CSIGN gates", tof.csign_count());
    }
    out.push(tc);

    let mut worst: Result<Float> = Ok(Float::new(prec.bits()));
    for t in 0..trials(100, 10) {
        let m = 1 + t % 4;
        let n = 1 + (t / 4) as u32 % 3;
        let (u, v) = if t % 2 == 0 {
            (
                random_unitary(m, prec, &mut rng),
                random_unitary(m, prec, &mut rng),
            )
        } else {
            (
                random_gaussian_matrix(m, prec, &mut rng),
                random_gaussian_matrix(m, prec, &mut rng),
            )
        };
        worst = worst.and_then(|w| Ok(w.max(&check_homomorphism(&u, &v, n)?)));
    }
    out.push(check(
        "composition identity for induced operators",
        worst,
        &tol40,
    ));

    let mut worst: Result<Float> = Ok(Float::new(prec.bits()));
    for t in 0..trials(50, 8) {
        let m = 1 + t % 4;
        let n = 1 + (t / 4) as u32 % 3;
        let u = random_unitary(m, prec, &mut rng);
        worst = worst.and_then(|w| Ok(w.max(&phi_operator(&u, n)?.1.unitarity_defect())));
    }
    out.push(check("induced operator unitarity", worst, &tol44));

    let mut worst: Result<Float> = Ok(Float::new(prec.bits()));
    for t in 0..trials(100, 12) {
        let m = 2 + t % 6;
        let u = random_unitary(m, prec, &mut rng);
        worst = worst.and_then(|w| {
            let excess = per_ryser(&u)?.abs() - 1u32;
            Ok(w.max(&excess))
        });
    }
    out.push(check("unitary permanent bounded by one", worst, &tol40));

    out
}
