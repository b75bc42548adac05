use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use torimmp::adjoint::{
    diophantine_gap, fg_from_saturation_semiample, rationality_certificate, restricted_algebra, saturation_check,
    truncation_fg, CurveFgVerdict, FgVerdict, RationalityCertificate,
};
use torimmp::birational::singularity_class;
use torimmp::curves::nef_shift;
use torimmp::io::{read_curve_instance, read_divisor, read_pair, read_semigroup, TraceRecord};
use torimmp::mmp::{
    finiteness_explorer, minimal_model, mori_fiber_space, mori_mmp_model, scaling_run, scaling_setup, Candidate,
    Chooser, Model, Outcome, Strategy, StrategyChooser, Trace,
};
use torimmp::suite::run_suite;
use torimmp::{Error, Result, Scalar, TDivisor, ToricPair};

#[derive(Parser)]
#[command(name = "torimmp", version, about = "Exact minimal model program on toric varieties")]
struct Cli {
    /// Seed for the random strategy and the suite.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the machine-readable trace or report here.
    #[arg(long, global = true)]
    trace: Option<PathBuf>,
    /// Comma-separated caps: steps=N, window=N, degree=N.
    #[arg(long, global = true, default_value = "")]
    caps: String,
    /// first-critical, divisorial-first, random or interactive.
    #[arg(long, global = true, default_value = "first-critical")]
    strategy: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a fan or pair file and report its flags.
    Validate { file: PathBuf },
    /// Mori program with a free choice of extremal ray.
    Mori { pair: PathBuf },
    /// MMP with scaling of an ample divisor.
    Scale {
        pair: PathBuf,
        #[arg(long = "H")]
        h: Option<PathBuf>,
        #[arg(long)]
        t0: Option<String>,
    },
    /// Minimal model of a big klt pair with pseudo-effective K + Delta.
    Bend { pair: PathBuf },
    /// Mori fiber space of a pair with K + Delta not pseudo-effective.
    Mfs {
        pair: PathBuf,
        #[arg(long = "H")]
        h: PathBuf,
    },
    /// Models of the boundary perturbed inside a cube.
    Explore {
        pair: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long, num_args = 1..)]
        dirs: Vec<PathBuf>,
    },
    #[command(subcommand)]
    Algebra(AlgebraCommand),
    /// Randomized regression over every driver.
    Suite(SuiteArgs),
}

#[derive(Subcommand)]
enum AlgebraCommand {
    /// Saturation and finite generation of a curve algebra.
    Saturate { instance: PathBuf },
    /// Rationality of the limit of a curve algebra.
    Rationality { instance: PathBuf },
    /// Integral approximation of a nef divisor with a free gap.
    Diophantine {
        pair: PathBuf,
        #[arg(long)]
        divisor: PathBuf,
        #[arg(long)]
        eps: String,
    },
    /// Finite generation of a graded semigroup and of its truncation.
    Truncate {
        algebra: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Restricted algebra of a pl flip.
    Restricted {
        pair: PathBuf,
        #[arg(long)]
        s: usize,
    },
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
}

#[derive(Clone, Copy, Debug, Default)]
struct Caps {
    steps: Option<usize>,
    window: Option<usize>,
    degree: Option<usize>,
}

impl Caps {
    fn parse(s: &str) -> Result<Caps> {
        let mut caps = Caps::default();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("cap {item:?} is not key=value")))?;
            let v: usize = v.parse().map_err(|_| Error::Parse(format!("cap {k} = {v:?}")))?;
            if v == 0 {
                return Err(Error::Invalid(format!("cap {k} must be positive")));
            }
            match k {
                "steps" => caps.steps = Some(v),
                "window" => caps.window = Some(v),
                "degree" => caps.degree = Some(v),
                _ => return Err(Error::Parse(format!("unknown cap {k:?}"))),
            }
        }
        Ok(caps)
    }
}

/// Asks for a candidate index on the terminal at every step.
struct Interactive;

impl Chooser for Interactive {
    fn choose(&mut self, pair: &ToricPair, candidates: &[Candidate]) -> Result<usize> {
        let mut err = io::stderr();
        let _ = writeln!(err, "K + Delta = {}", pair.log_canonical());
        for (i, c) in candidates.iter().enumerate() {
            let _ = writeln!(err, "  [{i}] wall {} {}", c.ray.wall, c.action.kind);
        }
        let stdin = io::stdin();
        loop {
            let _ = write!(err, "ray> ");
            let _ = err.flush();
            let mut line = String::new();
            if stdin.lock().read_line(&mut line).map_err(|e| Error::Io(e.to_string()))? == 0 {
                return Err(Error::Io("end of input".into()));
            }
            match line.trim().parse::<usize>() {
                Ok(i) if i < candidates.len() => return Ok(i),
                _ => {
                    let _ = writeln!(err, "enter a number below {}", candidates.len());
                }
            }
        }
    }
}

fn chooser(name: &str, seed: u64) -> Result<Box<dyn Chooser>> {
    if name == "interactive" {
        return Ok(Box::new(Interactive));
    }
    let strategy = match name.parse::<Strategy>()? {
        Strategy::Random(_) => Strategy::Random(seed),
        s => s,
    };
    Ok(Box::new(StrategyChooser::new(strategy)))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => Ok(()),
    }
}

fn print_trace(t: &Trace) {
    for s in &t.steps {
        let t = s.t.as_ref().map(|t| format!(" t = {t}")).unwrap_or_default();
        println!("step {}:{t} {} on wall {:?}", s.index, s.action.kind, s.wall_rays);
    }
    println!("outcome {}", t.outcome);
}

fn emit_trace(cli: &Cli, t: &Trace, extra: &[(&str, String)]) -> Result<()> {
    print_trace(t);
    let mut rec = TraceRecord::from_trace(t);
    rec.extra.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
    write_out(&cli.trace, &rec.to_json())?;
    match t.outcome {
        Outcome::Aborted(_) => Err(Error::StepCap(t.steps.len())),
        _ => Ok(()),
    }
}

fn run(cli: &Cli) -> Result<()> {
    let caps = Caps::parse(&cli.caps)?;
    match &cli.command {
        Command::Validate { file } => {
            let p = read_pair(&read(file)?)?;
            let f = p.fan.flags();
            println!("rank {} rays {} cones {}", p.fan.rank(), p.fan.num_rays(), p.fan.cones().len());
            println!("smooth {} simplicial {} complete {}", f.smooth, f.simplicial, f.complete);
            if f.simplicial {
                println!("pair {:?}", singularity_class(&p.fan, &p.boundary)?);
            }
            Ok(())
        }
        Command::Mori { pair } => {
            let p = read_pair(&read(pair)?)?;
            let mut ch = chooser(&cli.strategy, cli.seed)?;
            let t = mori_mmp_model(Model::new(p), ch.as_mut(), caps.steps)?;
            emit_trace(cli, &t, &[])
        }
        Command::Scale { pair, h, t0 } => {
            let p = read_pair(&read(pair)?)?;
            let n = p.fan.num_rays();
            let (h, t0) = match h {
                Some(path) => {
                    let h = read_divisor(&read(path)?, n)?;
                    let t0 = match t0 {
                        Some(s) => Scalar::parse(s)?,
                        None => {
                            let s = nef_shift(&p.fan, &p.log_canonical(), &h)?;
                            if s > Scalar::one() {
                                s
                            } else {
                                Scalar::one()
                            }
                        }
                    };
                    (h, t0)
                }
                None => {
                    let (h, t) = scaling_setup(&p)?;
                    (h, t0.as_deref().map(Scalar::parse).transpose()?.unwrap_or(t))
                }
            };
            let mut ch = chooser(&cli.strategy, cli.seed)?;
            let t = scaling_run(
                Model::new(p).with_h(h),
                &t0,
                &Scalar::zero(),
                ch.as_mut(),
                &mut |_, _, _| Ok(()),
                caps.steps,
            )?;
            emit_trace(cli, &t, &[("t0", t0.to_string())])
        }
        Command::Bend { pair } => {
            let p = read_pair(&read(pair)?)?;
            let r = minimal_model(&p)?;
            for (name, t) in &r.stages {
                println!("stage {name}: {} steps", t.steps.len());
            }
            println!("final {}", r.final_pair().fan.canonical_hash());
            println!("outcome MinimalModel");
            let mut rec = TraceRecord::from_stages(r.stages.iter().map(|(_, t)| t));
            rec.final_hash = r.final_pair().fan.canonical_hash();
            write_out(&cli.trace, &rec.to_json())
        }
        Command::Mfs { pair, h } => {
            let p = read_pair(&read(pair)?)?;
            let h = read_divisor(&read(h)?, p.fan.num_rays())?;
            let (c, t) = mori_fiber_space(&p, &h)?;
            println!("c = {c}");
            emit_trace(cli, &t, &[("c", c.to_string())])
        }
        Command::Explore { pair, eps, dirs } => {
            let p = read_pair(&read(pair)?)?;
            let n = p.fan.num_rays();
            let dirs = dirs
                .iter()
                .map(|d| read_divisor(&read(d)?, n))
                .collect::<Result<Vec<TDivisor>>>()?;
            let set = finiteness_explorer(&p, &dirs, &Scalar::parse(eps)?)?;
            println!("{} models", set.len());
            let mut report = serde_json::Map::new();
            let mut models = Vec::new();
            for m in &set.models {
                let hash = m.fan.canonical_hash();
                let w: Vec<String> = m.witness.iter().map(|x| x.to_string()).collect();
                println!("{hash} at ({})", w.join(", "));
                models.push(serde_json::json!({"hash": hash, "witness": w}));
            }
            report.insert("models".into(), models.into());
            write_out(&cli.trace, &pretty(&report.into()))
        }
        Command::Algebra(a) => run_algebra(cli, a, caps),
        Command::Suite(s) => {
            let r = run_suite(cli.seed, s.count, s.dim)?;
            let mut rows = Vec::new();
            for row in &r.rows {
                let mark = if row.passed { "pass" } else { "FAIL" };
                println!("{:>6} {:<12} {mark} {}", row.case, row.check, row.detail);
                rows.push(serde_json::json!({
                    "case": row.case, "check": row.check, "passed": row.passed,
                    "detail": row.detail, "repro": row.repro,
                }));
            }
            let failed: Vec<_> = r.failures().collect();
            println!("{} checks, {} failed", r.rows.len(), failed.len());
            for f in &failed {
                println!("reproduce: {}", f.repro);
            }
            write_out(&cli.trace, &pretty(&serde_json::json!({ "rows": rows })))?;
            match failed.first() {
                None => Ok(()),
                Some(f) => Err(Error::Invariant(format!("case {} check {}: {}", f.case, f.check, f.detail))),
            }
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn run_algebra(cli: &Cli, cmd: &AlgebraCommand, caps: Caps) -> Result<()> {
    match cmd {
        AlgebraCommand::Saturate { instance } => {
            let inst = read_curve_instance(&read(instance)?)?;
            let window = caps.window.unwrap_or(inst.horizon()).min(inst.horizon());
            let sat = saturation_check(&inst, window)?;
            let line = match fg_from_saturation_semiample(&inst, window)? {
                CurveFgVerdict::Fg { d, .. } => format!("saturated; d = {d}; FG"),
                CurveFgVerdict::SaturationFails { i, j } => format!("not saturated at i = {i}, j = {j}"),
                CurveFgVerdict::Unknown { window } if sat.saturated => {
                    format!("saturated; FG unknown within window {window}")
                }
                CurveFgVerdict::Unknown { window } => format!("FG unknown within window {window}"),
            };
            println!("{line}");
            write_out(&cli.trace, &pretty(&serde_json::json!({ "result": line })))
        }
        AlgebraCommand::Rationality { instance } => {
            let inst = read_curve_instance(&read(instance)?)?;
            let line = match rationality_certificate(&inst)? {
                RationalityCertificate::Rational { d, j } => format!("rational; d = {d}; j = {j}"),
                RationalityCertificate::IrrationalWitness { j, fractional } => {
                    format!("irrational; j = {j}; fractional part {fractional}")
                }
            };
            println!("{line}");
            write_out(&cli.trace, &pretty(&serde_json::json!({ "result": line })))
        }
        AlgebraCommand::Diophantine { pair, divisor, eps } => {
            let p = read_pair(&read(pair)?)?;
            let d = read_divisor(&read(divisor)?, p.fan.num_rays())?;
            let (m, j) = diophantine_gap(&p.fan, &d, &Scalar::parse(eps)?)?;
            println!("j = {j}");
            println!("M = {m}");
            write_out(
                &cli.trace,
                &pretty(&serde_json::json!({ "j": j, "M": torimmp::io::divisor_to_json(&m) })),
            )
        }
        AlgebraCommand::Truncate { algebra, k } => {
            let alg = read_semigroup(&read(algebra)?)?;
            let bound = caps.degree.unwrap_or(12);
            let r = truncation_fg(&alg, *k, bound)?;
            let show = |v: &FgVerdict| match v {
                FgVerdict::Fg { generators, bound } => format!("FG, {} generators up to degree {bound}", generators.len()),
                FgVerdict::Unknown { degree_bound, .. } => format!("unknown up to degree {degree_bound}"),
            };
            println!("full: {}", show(&r.full));
            println!("truncation k = {}: {}", r.k, show(&r.truncated));
            println!("agree {}", r.agree());
            write_out(
                &cli.trace,
                &pretty(&serde_json::json!({
                    "k": r.k, "full": show(&r.full), "truncated": show(&r.truncated), "agree": r.agree(),
                })),
            )
        }
        AlgebraCommand::Restricted { pair, s } => {
            let p = read_pair(&read(pair)?)?;
            let a = restricted_algebra(&p, *s, caps.degree.unwrap_or(6))?;
            println!("L = {}", a.l);
            for d in &a.degrees {
                println!("degree {}: {} sections restrict, h0 on S = {}", d.m, d.image.len(), d.h0_s);
            }
            let fg = a.verdict.is_fg();
            println!("restricted algebra {}", if fg { "FG" } else { "unknown" });
            println!("truncation agrees {}", a.full.agree());
            write_out(
                &cli.trace,
                &pretty(&serde_json::json!({
                    "k": a.k,
                    "sections": a.degrees.iter().map(|d| d.image.len()).collect::<Vec<_>>(),
                    "h0_s": a.degrees.iter().map(|d| d.h0_s).collect::<Vec<_>>(),
                    "fg": fg,
                })),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
