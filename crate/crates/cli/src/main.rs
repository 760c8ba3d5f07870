use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use permred::boolcirc::parse_boolfunc;
use permred::klm::compile;
use permred::permanent::{per_naive, per_ryser, NAIVE_MAX};
use permred::qcirc::{encoding_circuit, parse_qcircuit};
use permred::reduce::{parse_plain_matrix, recover, run_pipeline, ReduceOptions};
use permred::selftest::{self, SelftestOptions};
use permred::signsearch::{call_bound, determine_delta, BruteOracle, PermanentOracle};
use permred::{BigInt, BoolFunc, Error, PermanentInstance, Precision, ToffoliStyle, Variant};
use rug::Float;

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "permred",
    version,
    about = "Reduce ±1-weighted Boolean counting to integer matrix permanents"
)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Config {
    /// Working precision in bits (at least 53); defaults to max(128, b + 64).
    #[arg(long, global = true, env = "PERMRED_PRECISION")]
    precision: Option<u32>,
    /// Largest permanent the exact engine will evaluate.
    #[arg(long, global = true, default_value_t = 22, value_parser = clap::value_parser!(u32).range(1..=32))]
    max_dim: u32,
    /// Suppress progress notes on stderr.
    #[arg(short, long, global = true)]
    quiet: bool,
}

impl Config {
    fn precision(&self) -> anyhow::Result<Option<Precision>> {
        Ok(self.precision.map(Precision::new).transpose()?)
    }

    fn reduce_options(&self, style: ToffoliStyle) -> anyhow::Result<ReduceOptions> {
        Ok(ReduceOptions {
            style,
            precision: self.precision()?,
        })
    }

    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn check_dim(&self, dim: usize) -> Result<(), Error> {
        if dim > self.max_dim as usize {
            return Err(Error::Budget {
                what: "permanent size",
                requested: dim as u64,
                limit: self.max_dim as u64,
                estimate: Some(format!(
                    "2^{dim}·{dim} = {} scalar operations",
                    permred::permanent::ryser_cost(dim)
                )),
            });
        }
        Ok(())
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduce a `.bf` function to an integer matrix and write its `.pm.json`.
    Compile(CompileArgs),
    /// Evaluate the permanent of a plain matrix or of the matrix in a `.pm.json`.
    Permanent(PermanentArgs),
    /// Recover the weighted count from a `.pm.json` instance.
    Recover { instance: PathBuf },
    /// Compare the count by enumeration, circuit amplitude and permanent recovery.
    Verify(FuncArgs),
    /// Find the count by probing only the sign of shifted counts.
    Signsearch(SignsearchArgs),
    /// Run the built-in invariant suite.
    Selftest(SelftestArgs),
    /// Print the encoding circuit of a `.bf` function as `.qc` text.
    Circuit(CircuitArgs),
    /// Print the all-zeros amplitude of a `.qc` circuit.
    Amp { circuit: PathBuf },
    /// Print the compiled linear-optical network as `.lo` JSON.
    Lo(FuncArgs),
}

#[derive(Args, Debug)]
struct CompileArgs {
    bf: PathBuf,
    #[arg(long, default_value = "w")]
    variant: Variant,
    /// Output path; defaults to the input path with a `.pm.json` extension.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Algo {
    Ryser,
    Naive,
}

#[derive(Args, Debug)]
struct PermanentArgs {
    matrix: PathBuf,
    #[arg(long, value_enum, default_value = "ryser")]
    algo: Algo,
}

#[derive(Args, Debug)]
struct FuncArgs {
    bf: PathBuf,
    #[arg(long, default_value = "w")]
    variant: Variant,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Backend {
    Brute,
    Permanent,
}

#[derive(Args, Debug)]
struct SignsearchArgs {
    bf: PathBuf,
    #[arg(long, value_enum, default_value = "brute")]
    backend: Backend,
    #[arg(long, default_value = "w")]
    variant: Variant,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Run fewer random trials.
    #[arg(long)]
    quick: bool,
    /// Perturb the W gadget before running; the suite should then fail.
    #[arg(long)]
    corrupt_w: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Style {
    RelativePhase,
    Exact,
}

#[derive(Args, Debug)]
struct CircuitArgs {
    bf: PathBuf,
    #[arg(long, value_enum, default_value = "relative-phase")]
    style: Style,
}

impl From<Style> for ToffoliStyle {
    fn from(s: Style) -> Self {
        match s {
            Style::RelativePhase => ToffoliStyle::RelativePhase,
            Style::Exact => ToffoliStyle::Exact,
        }
    }
}

/// A failed comparison; exits with status 4.
#[derive(Debug)]
struct Mismatch(String);

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Mismatch {}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_func(path: &Path) -> anyhow::Result<BoolFunc> {
    let text = read(path)?;
    parse_boolfunc(&text).with_context(|| format!("in {}", path.display()))
}

fn load_instance(path: &Path) -> anyhow::Result<PermanentInstance> {
    let text = read(path)?;
    PermanentInstance::from_json(&text).with_context(|| format!("in {}", path.display()))
}

fn default_out(bf: &Path) -> PathBuf {
    let stem = bf
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    bf.with_file_name(format!("{stem}.pm.json"))
}

fn cmd_compile(cfg: &Config, args: &CompileArgs) -> anyhow::Result<()> {
    let c = load_func(&args.bf)?;
    let p = run_pipeline(
        &c,
        args.variant,
        &cfg.reduce_options(ToffoliStyle::default())?,
    )?;
    let out = args.out.clone().unwrap_or_else(|| default_out(&args.bf));
    fs::write(&out, p.instance.to_json()).with_context(|| format!("writing {}", out.display()))?;
    let inst = &p.instance;
    println!("n {}", inst.n);
    println!("k {}", inst.k);
    println!("gamma {}", inst.gamma);
    println!("m {}", p.optics.m());
    println!("N {}", inst.dim());
    println!("b {}", inst.b);
    println!("p {}", p.prec.bits());
    println!("variant {}", inst.variant);
    cfg.note(format!("wrote {}", out.display()));
    Ok(())
}

fn cmd_permanent(cfg: &Config, args: &PermanentArgs) -> anyhow::Result<()> {
    let text = read(&args.matrix)?;
    let a = if text.trim_start().starts_with('{') {
        PermanentInstance::from_json(&text)?.a
    } else {
        parse_plain_matrix(&text)?
    };
    let value = match args.algo {
        Algo::Ryser => {
            cfg.check_dim(a.rows())?;
            per_ryser(&a)?
        }
        Algo::Naive => {
            if a.rows() > NAIVE_MAX {
                return Err(Error::Budget {
                    what: "naive permanent size",
                    requested: a.rows() as u64,
                    limit: NAIVE_MAX as u64,
                    estimate: None,
                }
                .into());
            }
            per_naive(&a)?
        }
    };
    println!("permanent {value}");
    Ok(())
}

fn cmd_recover(cfg: &Config, path: &Path) -> anyhow::Result<()> {
    let inst = load_instance(path)?;
    cfg.check_dim(inst.dim())?;
    println!("delta {}", recover(&inst)?);
    Ok(())
}

/// `amp00 · 2^n` rounded, with the distance to the nearest integer.
fn amplitude_count(c: &BoolFunc, prec: Precision) -> anyhow::Result<(BigInt, f64)> {
    let q = encoding_circuit(c, ToffoliStyle::default())?;
    let amp = q.amp00(prec)?;
    let scaled = amp.scale(&Float::with_val(prec.bits(), Float::i_exp(1, c.n() as i32)));
    let (rounded, _) = scaled
        .re()
        .to_integer_round(rug::float::Round::Nearest)
        .context("amplitude is not finite")?;
    let residue = scaled.dist(&permred::HpComplex::real(
        prec,
        Float::with_val(prec.bits(), &rounded),
    ));
    Ok((rounded, residue.to_f64()))
}

fn cmd_verify(cfg: &Config, args: &FuncArgs) -> anyhow::Result<()> {
    let c = load_func(&args.bf)?;
    let brute = c.delta()?;
    println!("brute {brute}");

    let prec = cfg.precision()?.unwrap_or_default();
    let (amp, residue) = amplitude_count(&c, prec)?;
    let amp_ok = residue <= prec.tolerance(50).to_f64() * f64::from(1u32 << c.n().min(31));
    println!("amplitude {amp}");

    let p = run_pipeline(
        &c,
        args.variant,
        &cfg.reduce_options(ToffoliStyle::default())?,
    )?;
    let dim = p.instance.dim();
    let recovered = match cfg.check_dim(dim) {
        Ok(()) => {
            let r = recover(&p.instance)?;
            println!("permanent {r}");
            Some(r)
        }
        Err(e) => {
            cfg.note(format!("skipping permanent recovery: {e}"));
            println!("permanent skipped");
            None
        }
    };

    let agree = amp_ok && amp == brute && recovered.as_ref().is_none_or(|r| *r == brute);
    if !agree {
        println!("status MISMATCH");
        bail!(Mismatch(format!(
            "counts disagree for {}: brute {brute}, amplitude {amp} (residue {residue:e}), permanent {}",
            args.bf.display(),
            recovered.map_or("skipped".to_string(), |r| r.to_string())
        )));
    }
    println!("status OK");
    Ok(())
}

fn cmd_signsearch(cfg: &Config, args: &SignsearchArgs) -> anyhow::Result<()> {
    let c = load_func(&args.bf)?;
    let outcome = match args.backend {
        Backend::Brute => determine_delta(&mut BruteOracle, &c)?,
        Backend::Permanent => {
            if cfg.precision.is_some() {
                cfg.note("note: the permanent backend chooses its own precision");
            }
            determine_delta(&mut PermanentOracle::new(args.variant), &c)?
        }
    };
    for probe in &outcome.trace {
        println!("probe {} {}", probe.k, probe.sign);
    }
    println!("calls {}", outcome.trace.len());
    println!("bound {}", call_bound(&outcome.delta));
    println!("delta {}", outcome.delta);
    Ok(())
}

fn cmd_selftest(args: &SelftestArgs) -> anyhow::Result<()> {
    let checks = selftest::run(&SelftestOptions {
        quick: args.quick,
        corrupt_w: args.corrupt_w,
        seed: args.seed,
    });
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    if failed > 0 {
        bail!(Mismatch(format!(
            "{failed} of {} checks failed",
            checks.len()
        )));
    }
    Ok(())
}

fn cmd_amp(path: &Path) -> anyhow::Result<()> {
    let q = parse_qcircuit(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    let amp = q.amp00(Precision::DEFAULT)?;
    let (re, im) = amp.to_f64_pair();
    println!("re {re:e}");
    println!("im {im:e}");
    Ok(())
}

fn cmd_lo(cfg: &Config, args: &FuncArgs) -> anyhow::Result<()> {
    let c = load_func(&args.bf)?;
    let q = encoding_circuit(&c, ToffoliStyle::default())?;
    let l = compile(&q, args.variant, cfg.precision()?.unwrap_or_default())?;
    print!("{}", l.to_lo_json());
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Compile(a) => cmd_compile(cfg, a),
        Command::Permanent(a) => cmd_permanent(cfg, a),
        Command::Recover { instance } => cmd_recover(cfg, instance),
        Command::Verify(a) => cmd_verify(cfg, a),
        Command::Signsearch(a) => cmd_signsearch(cfg, a),
        Command::Selftest(a) => cmd_selftest(a),
        Command::Circuit(a) => {
            let q = encoding_circuit(&load_func(&a.bf)?, a.style.into())?;
            print!("{}", q.to_qc());
            Ok(())
        }
        Command::Amp { circuit } => cmd_amp(circuit),
        Command::Lo(a) => cmd_lo(cfg, a),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Mismatch>() {
            return EXIT_MISMATCH;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Parse { .. } => EXIT_PARSE,
                Error::Budget { .. } => EXIT_BUDGET,
                _ => EXIT_FAILURE,
            };
        }
    }
    EXIT_FAILURE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
