//! Command-line front end.
//!
//! Exit status: 0 success or positive decision, 1 negative decision,
//! 2 usage or input error, 3 overflow or budget exhaustion.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::Error;
use crate::finite::{
    check_auto_p2, check_cyclic, cyclic_structures, gl2_oracle, gln_oracle, p2_structures,
    realize_cyclic, realize_p2, DEFAULT_ORACLE_BUDGET,
};
use crate::poly::{cyclotomic_via_division, cyclotomic_via_gcd, IntPolynomial};
use crate::structures::{
    parse_length_list, parse_permutation, structure_of, CycleStructure, Permutation,
    ZStructureDescriptor,
};
use crate::zn::{build_automorphism, lcm_closure, validate_descriptor};

pub const BUDGET_ENV: &str = "AUTOREAL_ORACLE_BUDGET";

/// Largest modulus accepted by the cyclic subcommands.
pub const MAX_CYCLIC_N: u64 = 1_000_000;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "autoreal",
    version,
    about = "Realize bijections as abelian group automorphisms"
)]
pub struct Cli {
    /// Output mode.
    #[arg(long, value_enum, global = true, default_value_t = OutputMode::Text)]
    pub format: OutputMode,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the cycle structures of all automorphisms.
    #[command(subcommand)]
    Enumerate(GroupArgs),
    /// Decide whether a permutation has the auto-property.
    #[command(subcommand)]
    Check(PermGroupArgs),
    /// Construct a group labeling turning a permutation into an automorphism.
    #[command(subcommand)]
    Realize(PermGroupArgs),
    /// Structures of bijections on countably infinite sets.
    #[command(subcommand)]
    Zn(ZnCommand),
    /// Compute the n-th cyclotomic polynomial.
    Cyclotomic(CyclotomicArgs),
    /// Brute-force oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Subcommand)]
pub enum GroupArgs {
    /// Automorphisms of Z_n.
    Cyclic {
        #[arg(long)]
        n: u64,
    },
    /// Automorphisms of Z_p x Z_p.
    P2 {
        #[arg(long)]
        p: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum PermGroupArgs {
    /// Against the cyclic group of the same order.
    Cyclic {
        /// Permutation file, or `-` for standard input.
        #[arg(long)]
        perm: PathBuf,
    },
    /// Against Z_p x Z_p (p^2 points).
    P2 {
        #[arg(long)]
        perm: PathBuf,
        #[arg(long)]
        p: u64,
    },
}

#[derive(Debug, Args)]
pub struct DescriptorArgs {
    /// Comma-separated non-zero cycle lengths.
    #[arg(long, default_value = "")]
    pub lengths: String,
    /// The structure contains chains.
    #[arg(long)]
    pub chains: bool,
}

#[derive(Debug, Subcommand)]
pub enum ZnCommand {
    /// Validate a descriptor.
    Check {
        #[command(flatten)]
        descriptor: DescriptorArgs,
        /// Close the length set under lcm before validating.
        #[arg(long)]
        complete: bool,
    },
    /// Build a unimodular matrix realizing a descriptor.
    Build {
        #[command(flatten)]
        descriptor: DescriptorArgs,
        /// Also write the JSON document to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Gcd,
    Division,
    Both,
}

#[derive(Debug, Args)]
pub struct CyclotomicArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_enum, default_value_t = Method::Gcd)]
    pub method: Method,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Cycle structures of every element of GL_dim(F_p).
    Gl {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        dim: usize,
    },
}

/// Where output goes and what the environment supplied.
pub struct Io<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
    pub oracle_budget: u64,
}

/// Reads the oracle budget override from the environment.
pub fn budget_from_env() -> Result<u64, String> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&b| b > 0)
            .ok_or_else(|| format!("{BUDGET_ENV} must be a positive integer, got {v:?}")),
        Err(_) => Ok(DEFAULT_ORACLE_BUDGET),
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `argv` (including the program name) and executes it.
pub fn run<I, T>(argv: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { io.stderr } else { io.stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(&cli, io) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(io.stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(io.stderr, "error: {e}");
            if e.is_resource() {
                EXIT_RESOURCE
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn execute(cli: &Cli, io: &mut Io<'_>) -> CmdResult {
    let mode = cli.format;
    match &cli.command {
        Command::Enumerate(GroupArgs::Cyclic { n }) => {
            check_cyclic_n(*n)?;
            let set = cyclic_structures(*n)?;
            emit_structures(io, mode, json!({"group": "cyclic", "n": n}), set.iter())
        }
        Command::Enumerate(GroupArgs::P2 { p }) => {
            let set = p2_structures(*p)?;
            emit_structures(io, mode, json!({"group": "p2", "p": p}), set.iter())
        }
        Command::Check(args) => check(args, io, mode),
        Command::Realize(args) => realize(args, io, mode),
        Command::Zn(ZnCommand::Check {
            descriptor,
            complete,
        }) => zn_check(descriptor, *complete, io, mode),
        Command::Zn(ZnCommand::Build { descriptor, out }) => {
            zn_build(descriptor, out.as_ref(), io, mode)
        }
        Command::Cyclotomic(args) => cyclotomic(args, io, mode),
        Command::Oracle(OracleCommand::Gl { p, dim }) => {
            let set = if *dim == 2 && *p <= crate::finite::GL2_ORACLE_MAX_P {
                let cost = (*p as u128).pow(6);
                if cost > io.oracle_budget as u128 {
                    return Err(Error::BudgetExceeded {
                        cost,
                        budget: io.oracle_budget,
                    }
                    .into());
                }
                gl2_oracle(*p)?
            } else {
                gln_oracle(*p, *dim, io.oracle_budget)?
            };
            emit_structures(
                io,
                mode,
                json!({"group": "gl", "p": p, "dim": dim}),
                set.iter(),
            )
        }
    }
}

fn check_cyclic_n(n: u64) -> Result<(), Failure> {
    if !(2..=MAX_CYCLIC_N).contains(&n) {
        return Err(Failure::Usage(format!(
            "--n must be in 2..={MAX_CYCLIC_N}, got {n}"
        )));
    }
    Ok(())
}

fn emit_structures<'a>(
    io: &mut Io<'_>,
    mode: OutputMode,
    header: serde_json::Value,
    set: impl Iterator<Item = &'a CycleStructure>,
) -> CmdResult {
    let lines: Vec<String> = set.map(ToString::to_string).collect();
    match mode {
        OutputMode::Text => {
            for l in &lines {
                writeln!(io.stdout, "{l}")?;
            }
        }
        OutputMode::Json => {
            let mut doc = header;
            doc["structures"] = json!(lines);
            write_json(io, &doc)?;
        }
    }
    Ok(EXIT_OK)
}

fn write_json(io: &mut Io<'_>, doc: &serde_json::Value) -> std::io::Result<()> {
    writeln!(
        io.stdout,
        "{}",
        serde_json::to_string(doc).expect("serializable")
    )
}

fn read_perm(path: &PathBuf, io: &mut Io<'_>) -> Result<Permutation, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io.stdin.read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
    };
    Ok(parse_permutation(&text)?)
}

fn check(args: &PermGroupArgs, io: &mut Io<'_>, mode: OutputMode) -> CmdResult {
    let (perm, verdict, extra) = match args {
        PermGroupArgs::Cyclic { perm } => {
            let perm = read_perm(perm, io)?;
            if perm.len() as u64 > MAX_CYCLIC_N {
                return Err(Failure::Usage(format!(
                    "at most {MAX_CYCLIC_N} points supported"
                )));
            }
            let k = check_cyclic(&perm);
            (
                perm,
                k.is_some(),
                json!({"group": "cyclic", "multiplier": k}),
            )
        }
        PermGroupArgs::P2 { perm, p } => {
            let perm = read_perm(perm, io)?;
            let yes = check_auto_p2(&perm, *p)?;
            (perm, yes, json!({"group": "p2", "p": p}))
        }
    };
    let structure = structure_of(&perm);
    match mode {
        OutputMode::Text => {
            let mut line = format!(
                "{} structure={structure}",
                if verdict { "yes" } else { "no" }
            );
            if let Some(k) = extra.get("multiplier").and_then(|k| k.as_u64()) {
                line.push_str(&format!(" multiplier={k}"));
            }
            writeln!(io.stdout, "{line}")?;
        }
        OutputMode::Json => {
            let mut doc = extra;
            doc["realizable"] = json!(verdict);
            doc["structure"] = json!(structure.to_string());
            write_json(io, &doc)?;
        }
    }
    Ok(if verdict { EXIT_OK } else { EXIT_NO })
}

fn realize(args: &PermGroupArgs, io: &mut Io<'_>, mode: OutputMode) -> CmdResult {
    let result = match args {
        PermGroupArgs::Cyclic { perm } => {
            let perm = read_perm(perm, io)?;
            if perm.len() as u64 > MAX_CYCLIC_N {
                return Err(Failure::Usage(format!(
                    "at most {MAX_CYCLIC_N} points supported"
                )));
            }
            realize_cyclic(&perm).map(|w| {
                let text = format!(
                    "modulus {}\nmultiplier {}\nlabeling {}\n",
                    w.modulus,
                    w.multiplier,
                    join(w.labeling.iter())
                );
                (text, serde_json::to_value(&w).expect("serializable"))
            })
        }
        PermGroupArgs::P2 { perm, p } => {
            let perm = read_perm(perm, io)?;
            realize_p2(&perm, *p).map(|w| {
                let [[a, b], [c, d]] = w.matrix.entries;
                let labels: Vec<String> =
                    w.labeling.iter().map(|(x, y)| format!("{x},{y}")).collect();
                let text = format!(
                    "p {}\nmatrix {a} {b}\n       {c} {d}\nlabeling {}\n",
                    w.p,
                    labels.join(" ")
                );
                (text, serde_json::to_value(&w).expect("serializable"))
            })
        }
    };
    match result {
        Ok((text, doc)) => {
            match mode {
                OutputMode::Text => io.stdout.write_all(text.as_bytes())?,
                OutputMode::Json => write_json(io, &doc)?,
            }
            Ok(EXIT_OK)
        }
        Err(Error::NotRealizable(msg)) => {
            match mode {
                OutputMode::Text => writeln!(io.stdout, "not realizable: {msg}")?,
                OutputMode::Json => write_json(io, &json!({"realizable": false, "reason": msg}))?,
            }
            Ok(EXIT_NO)
        }
        Err(e) => Err(e.into()),
    }
}

fn join<T: ToString>(items: impl Iterator<Item = T>) -> String {
    items.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn descriptor(args: &DescriptorArgs) -> Result<ZStructureDescriptor, Failure> {
    let lengths = parse_length_list(&args.lengths).map_err(Failure::Usage)?;
    Ok(ZStructureDescriptor::new(lengths, args.chains)?)
}

fn zn_check(args: &DescriptorArgs, complete: bool, io: &mut Io<'_>, mode: OutputMode) -> CmdResult {
    let mut d = descriptor(args)?;
    if complete {
        d.lengths = lcm_closure(&d.lengths)?;
    }
    let verdict = validate_descriptor(&d);
    match (&verdict, mode) {
        (Ok(()), OutputMode::Text) => writeln!(io.stdout, "ok: {d}")?,
        (Err(vs), OutputMode::Text) => {
            for v in vs {
                writeln!(io.stdout, "{v}")?;
            }
        }
        (_, OutputMode::Json) => {
            let violations = verdict.clone().err().unwrap_or_default();
            write_json(
                io,
                &json!({
                    "descriptor": d.to_string(),
                    "ok": verdict.is_ok(),
                    "violations": violations.iter().map(|v| json!({
                        "condition": v.condition(),
                        "detail": v,
                        "message": v.to_string(),
                    })).collect::<Vec<_>>(),
                }),
            )?
        }
    }
    Ok(if verdict.is_ok() { EXIT_OK } else { EXIT_NO })
}

fn zn_build(
    args: &DescriptorArgs,
    out: Option<&PathBuf>,
    io: &mut Io<'_>,
    mode: OutputMode,
) -> CmdResult {
    let d = descriptor(args)?;
    if let Err(vs) = validate_descriptor(&d) {
        for v in &vs {
            writeln!(io.stdout, "{v}")?;
        }
        return Ok(EXIT_NO);
    }
    let r = build_automorphism(&d)?;
    let doc = json!({
        "descriptor": d.to_string(),
        "matrix": r.matrix,
        "blocks": r.blocks,
    });
    if let Some(path) = out {
        std::fs::write(
            path,
            format!(
                "{}\n",
                serde_json::to_string_pretty(&doc).expect("serializable")
            ),
        )
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    match mode {
        OutputMode::Text => {
            writeln!(io.stdout, "{d}")?;
            writeln!(io.stdout, "dimension {}", r.matrix.rows())?;
            for b in &r.blocks {
                writeln!(
                    io.stdout,
                    "block {} offset {} size {}",
                    b.label, b.offset, b.size
                )?;
            }
            io.stdout.write_all(r.matrix.to_aligned_text().as_bytes())?;
        }
        OutputMode::Json => write_json(io, &doc)?,
    }
    Ok(EXIT_OK)
}

fn cyclotomic(args: &CyclotomicArgs, io: &mut Io<'_>, mode: OutputMode) -> CmdResult {
    let n = args.n;
    if !(1..=10_000).contains(&n) {
        return Err(Failure::Usage(format!("--n must be in 1..=10000, got {n}")));
    }
    let poly: IntPolynomial = match args.method {
        Method::Gcd => cyclotomic_via_gcd(n)?,
        Method::Division => cyclotomic_via_division(n)?,
        Method::Both => {
            let g = cyclotomic_via_gcd(n)?;
            let d = cyclotomic_via_division(n)?;
            if g != d {
                return Err(Error::Verification(format!("routes disagree: {g} vs {d}")).into());
            }
            g
        }
    };
    match mode {
        OutputMode::Text => writeln!(io.stdout, "{poly}")?,
        OutputMode::Json => write_json(
            io,
            &json!({
                "n": n,
                "coefficients": poly.coeffs(),
                "text": poly.to_string(),
            }),
        )?,
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut input = stdin.as_bytes();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = {
            let mut io = Io {
                stdin: &mut input,
                stdout: &mut out,
                stderr: &mut err,
                oracle_budget: DEFAULT_ORACLE_BUDGET,
            };
            run(
                std::iter::once("autoreal").chain(args.iter().copied()),
                &mut io,
            )
        };
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn enumerate_cyclic() {
        let (code, out, _) = run_capture(&["enumerate", "cyclic", "--n", "12"], "");
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 4);
        assert!(out.lines().any(|l| l == "2^4 1^4"));
    }

    #[test]
    fn stdin_permutation() {
        let (code, out, _) = run_capture(&["check", "cyclic", "--perm", "-"], "3\n0 2 1\n");
        assert_eq!(code, 0);
        assert_eq!(out, "yes structure=2^1 1^1 multiplier=2\n");
        let (code, out, _) = run_capture(&["check", "cyclic", "--perm", "-"], "4\n1 2 3 0\n");
        assert_eq!(code, 1);
        assert_eq!(out, "no structure=4^1\n");
    }

    #[test]
    fn input_errors_exit_2() {
        let (code, _, err) = run_capture(&["check", "cyclic", "--perm", "-"], "3\n1 1 2\n");
        assert_eq!(code, 2);
        assert!(err.contains("bijection"));
        let (code, _, _) = run_capture(&["enumerate", "p2", "--p", "9"], "");
        assert_eq!(code, 2);
        let (code, _, _) = run_capture(&["bogus"], "");
        assert_eq!(code, 2);
        let (code, _, _) = run_capture(&["zn", "check", "--lengths", "3,x"], "");
        assert_eq!(code, 2);
        let (code, _, _) = run_capture(&["cyclotomic", "--n", "1"], "");
        assert_eq!(code, 2);
    }

    #[test]
    fn budget_exhaustion_exits_3() {
        let mut input: &[u8] = b"";
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut io = Io {
            stdin: &mut input,
            stdout: &mut out,
            stderr: &mut err,
            oracle_budget: 100,
        };
        let code = run(
            ["autoreal", "oracle", "gl", "--p", "2", "--dim", "3"],
            &mut io,
        );
        assert_eq!(code, 3);
        let code = run(
            ["autoreal", "oracle", "gl", "--p", "3", "--dim", "2"],
            &mut io,
        );
        assert_eq!(code, 3);
    }

    #[test]
    fn cyclotomic_methods() {
        for method in ["gcd", "division", "both"] {
            let (code, out, _) = run_capture(&["cyclotomic", "--n", "6", "--method", method], "");
            assert_eq!((code, out.as_str()), (0, "1 - x + x^2\n"));
        }
        let (code, out, _) = run_capture(&["cyclotomic", "--n", "1", "--method", "division"], "");
        assert_eq!((code, out.as_str()), (0, "-1 + x\n"));
    }

    #[test]
    fn zn_complete_flag() {
        let (code, out, _) = run_capture(
            &["zn", "check", "--lengths", "6,15", "--chains", "--complete"],
            "",
        );
        assert_eq!(code, 0);
        assert_eq!(out, "ok: lengths=6,15,30 chains=yes\n");
        let (code, out, _) = run_capture(&["zn", "check"], "");
        assert_eq!(code, 1);
        assert!(out.starts_with("not countably infinite"));
    }
}
