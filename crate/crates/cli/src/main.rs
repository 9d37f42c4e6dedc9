use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use grover_rudolph::angles::{compute_angles, AngleTree};
use grover_rudolph::circuit::{build_full, to_qasm, write_circuit, GateCounts};
use grover_rudolph::distribution::{
    build_mass_tree_with, BuildOptions, DistributionSpec, MassTree, PiecewiseLinear, DEFAULT_NORMALIZATION_TOL,
    DEFAULT_QUAD_TOL,
};
use grover_rudolph::report::{angle_table, histogram_csv, OutputFormat, ProbabilityReport};
use grover_rudolph::simulator::{run, sample};
use grover_rudolph::transpiler::{discrepancy_report, transpile_full_with, TranspileOptions, DEFAULT_TOL};
use grover_rudolph::Error;
use serde_json::json;

const SIMULATE_TOL: f64 = 1e-12;

/// Grover-Rudolph state preparation: angles, circuits, transpilation and sampling.
#[derive(Parser, Debug)]
#[command(name = "grprep", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Conditional masses and rotation angles for every dyadic word.
    Angles(Common),
    /// Pattern-controlled rotation circuit.
    Compile(Common),
    /// {RY, CX} circuit, QASM export and ladder discrepancy report.
    Transpile(Common),
    /// Exact outcome probabilities against the target distribution.
    Simulate(Common),
    /// Seeded measurement histogram.
    Sample(Common),
    /// Direct vs transpiled equivalence checks.
    Verify(Common),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// pmf document `{"n": <int>, "p": [...]}`
    #[arg(long)]
    pmf: Option<PathBuf>,
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
}

#[derive(Args, Debug)]
struct Common {
    #[command(flatten)]
    source: Source,
    /// Number of qubits for a builtin density.
    #[arg(long, requires = "builtin")]
    n: Option<u32>,
    /// Breakpoints `x:y,x:y,...` for the piecewise-linear builtin.
    #[arg(long)]
    breakpoints: Option<String>,
    /// Write artifacts into this directory instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 2048)]
    shots: u64,
    /// Main tolerance of the subcommand (transpile/verify: statevector, simulate: probabilities).
    #[arg(long)]
    tol: Option<f64>,
    /// Probability tolerance used by `verify`.
    #[arg(long, default_value_t = SIMULATE_TOL)]
    born_tol: f64,
    #[arg(long, default_value_t = DEFAULT_NORMALIZATION_TOL)]
    normalization_tol: f64,
    #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
    quad_tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Builtin {
    Uniform,
    Triangular,
    PiecewiseLinear,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

enum Failure {
    Input(anyhow::Error),
    Verification(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(Error::Compilation { .. }) => Failure::Verification(format!("{e:#}")),
            _ => Failure::Input(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match &cli.command {
        Command::Angles(c) => cmd_angles(c),
        Command::Compile(c) => cmd_compile(c),
        Command::Transpile(c) => cmd_transpile(c),
        Command::Simulate(c) => cmd_simulate(c),
        Command::Sample(c) => cmd_sample(c),
        Command::Verify(c) => cmd_verify(c),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}

impl Common {
    fn spec(&self) -> anyhow::Result<DistributionSpec> {
        if let Some(path) = &self.source.pmf {
            if self.breakpoints.is_some() {
                bail!("--breakpoints only applies to --builtin piecewise-linear");
            }
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return DistributionSpec::from_pmf_json(&text).with_context(|| format!("parsing {}", path.display()));
        }
        let builtin = self.source.builtin.expect("clap enforces a source");
        let Some(n) = self.n else { bail!("--builtin needs --n <qubits>") };
        Ok(match (builtin, &self.breakpoints) {
            (Builtin::Uniform, None) => DistributionSpec::uniform(n),
            (Builtin::Triangular, None) => DistributionSpec::triangular(n),
            (Builtin::PiecewiseLinear, Some(bp)) => DistributionSpec::piecewise_linear(PiecewiseLinear::parse(bp)?, n),
            (Builtin::PiecewiseLinear, None) => bail!("piecewise-linear needs --breakpoints \"x:y,x:y,...\""),
            (_, Some(_)) => bail!("--breakpoints only applies to --builtin piecewise-linear"),
        })
    }

    fn build_options(&self) -> BuildOptions {
        BuildOptions { normalization_tol: self.normalization_tol, quad_tol: self.quad_tol, ..Default::default() }
    }

    fn masses(&self) -> anyhow::Result<MassTree> {
        let tree = build_mass_tree_with(&self.spec()?, &self.build_options())?;
        if let Some(notice) = tree.notice() {
            eprintln!("note: input summed to {:.17e}; rescaled to 1", notice.original_total);
        }
        Ok(tree)
    }

    fn angles(&self) -> anyhow::Result<(MassTree, AngleTree)> {
        let tree = self.masses()?;
        let angles = compute_angles(&tree)?;
        Ok((tree, angles))
    }

    fn transpile_options(&self) -> anyhow::Result<TranspileOptions> {
        Ok(TranspileOptions { tol: positive("--tol", self.tol.unwrap_or(DEFAULT_TOL))?, ..Default::default() })
    }

    /// Writes `name` under `--out`, or prints it when no directory was given.
    fn emit(&self, name: &str, contents: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(dir) => write_file(dir, name, contents),
            None => {
                print!("{contents}");
                Ok(())
            }
        }
    }

    /// Summary lines go to stdout when artifacts go to files, otherwise to stderr.
    fn summary(&self, text: &str) {
        if self.out.is_some() {
            print!("{text}");
        } else {
            eprint!("{text}");
        }
    }
}

fn positive(flag: &str, v: f64) -> anyhow::Result<f64> {
    if !(v.is_finite() && v > 0.0) {
        bail!("{flag} must be a positive finite number, got {v}");
    }
    Ok(v)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn counts_line(c: &GateCounts) -> String {
    format!("gates: {} (RY {}, PRY {}, X {}, CX {})\n", c.total(), c.rot_y, c.pattern_rot, c.pauli_x, c.cnot)
}

fn cmd_angles(c: &Common) -> Outcome {
    let (tree, angles) = c.angles()?;
    let format = OutputFormat::from(c.format);
    c.emit(&format!("angles.{}", format.extension()), &angle_table(&tree, &angles, format))?;
    Ok(())
}

fn cmd_compile(c: &Common) -> Outcome {
    let (_, angles) = c.angles()?;
    let circuit = build_full(&angles)?;
    c.emit("circuit.txt", &write_circuit(&circuit))?;
    c.summary(&counts_line(&circuit.gate_counts()));
    Ok(())
}

fn cmd_transpile(c: &Common) -> Outcome {
    let (_, angles) = c.angles()?;
    let opts = c.transpile_options()?;
    let circuit = transpile_full_with(&angles, &opts)?;
    let report = discrepancy_report(&angles, &opts)?;
    c.emit("transpiled.txt", &write_circuit(&circuit))?;
    if let Some(dir) = &c.out {
        write_file(dir, "transpiled.qasm", &to_qasm(&circuit)?)?;
        let mut doc = serde_json::to_string_pretty(&report).context("serialising discrepancy report")?;
        doc.push('\n');
        write_file(dir, "discrepancy.json", &doc)?;
    }
    let mut s = counts_line(&circuit.gate_counts());
    writeln!(
        s,
        "stage tolerance: {:e} (dense check m <= {}, sampled m <= {})",
        opts.tol, opts.dense_verify_max_m, opts.sampled_verify_max_m
    )
    .unwrap();
    c.summary(&s);
    Ok(())
}

fn cmd_simulate(c: &Common) -> Outcome {
    let (tree, angles) = c.angles()?;
    let tol = positive("--tol", c.tol.unwrap_or(SIMULATE_TOL))?;
    let state = run(&build_full(&angles)?)?;
    let report =
        ProbabilityReport { n: tree.n(), target: tree.leaves().to_vec(), simulated: state.born_probabilities(), tol };
    let format = match c.format {
        Format::Json => OutputFormat::Json,
        _ => OutputFormat::Csv,
    };
    c.emit(&format!("probabilities.{}", format.extension()), &report.render(format))?;
    let (k, err) = report.worst();
    if !report.passed() {
        return Err(Failure::Verification(format!("k = {k}: |p_target - p_simulated| = {err:e} > tolerance {tol:e}")));
    }
    c.summary(&format!("max abs error {err:e} at k = {k} (tolerance {tol:e})\n"));
    Ok(())
}

fn cmd_sample(c: &Common) -> Outcome {
    let Some(seed) = c.seed else {
        return Err(Failure::Input(anyhow::anyhow!("sample needs --seed <u64>")));
    };
    if c.shots == 0 {
        return Err(Failure::Input(anyhow::anyhow!("--shots must be at least 1")));
    }
    let (tree, angles) = c.angles()?;
    let state = run(&build_full(&angles)?)?;
    let hist = sample(&state, c.shots, seed)?;
    c.emit("histogram.csv", &histogram_csv(&hist, tree.n()))?;
    c.summary(&format!("{} shots, seed {seed}\n", hist.shots));
    Ok(())
}

fn cmd_verify(c: &Common) -> Outcome {
    let (tree, angles) = c.angles()?;
    let opts = c.transpile_options()?;
    let born_tol = positive("--born-tol", c.born_tol)?;

    let direct = run(&build_full(&angles)?)?;
    let transpiled = run(&transpile_full_with(&angles, &opts)?)?;
    let (amp_k, amp_dev) = direct
        .amplitudes()
        .iter()
        .zip(transpiled.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .enumerate()
        .fold((0, 0.0), |best, (k, d)| if d > best.1 { (k, d) } else { best });
    let (born_k, born_dev) = transpiled
        .born_probabilities()
        .iter()
        .zip(tree.leaves())
        .map(|(p, q)| (p - q).abs())
        .enumerate()
        .fold((0, 0.0), |best, (k, d)| if d > best.1 { (k, d) } else { best });
    let report = discrepancy_report(&angles, &opts)?;
    let (stage_j, stage_dev) = report
        .stages
        .iter()
        .filter_map(|s| s.closed.deviation.map(|d| (s.stage, d.matrix)))
        .fold((0, 0.0), |best, (j, d)| if d > best.1 { (j, d) } else { best });

    let mut failures = Vec::new();
    if amp_dev > opts.tol {
        failures.push(format!("statevector: k = {amp_k}, deviation {amp_dev:e} > {:e}", opts.tol));
    }
    if born_dev > born_tol {
        failures.push(format!("probabilities: k = {born_k}, deviation {born_dev:e} > {born_tol:e}"));
    }
    if stage_dev > opts.tol {
        failures.push(format!("stage {stage_j}: dense deviation {stage_dev:e} > {:e}", opts.tol));
    }

    let rendered = match c.format {
        Format::Json => {
            let doc = json!({
                "n": tree.n(),
                "passed": failures.is_empty(),
                "statevector": { "max_deviation": amp_dev, "k": amp_k, "tolerance": opts.tol },
                "probabilities": { "max_deviation": born_dev, "k": born_k, "tolerance": born_tol },
                "stages": { "max_dense_deviation": stage_dev, "stage": stage_j, "tolerance": opts.tol,
                            "dense_verify_max_m": opts.dense_verify_max_m },
            });
            let mut s = serde_json::to_string_pretty(&doc).context("serialising verify report")?;
            s.push('\n');
            s
        }
        _ => {
            let mut s = String::new();
            writeln!(s, "n = {}", tree.n()).unwrap();
            writeln!(s, "statevector distance {amp_dev:e} at k = {amp_k} (tolerance {:e})", opts.tol).unwrap();
            writeln!(s, "probability error {born_dev:e} at k = {born_k} (tolerance {born_tol:e})").unwrap();
            writeln!(
                s,
                "worst dense stage deviation {stage_dev:e} at stage {stage_j} (tolerance {:e}, m <= {})",
                opts.tol, opts.dense_verify_max_m
            )
            .unwrap();
            writeln!(s, "{}", if failures.is_empty() { "PASS" } else { "FAIL" }).unwrap();
            s
        }
    };
    let ext = if matches!(c.format, Format::Json) { "json" } else { "txt" };
    c.emit(&format!("verify.{ext}"), &rendered)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failures.join("; ")))
    }
}
