use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use zeroset::adversary::{
    find_separated_peaks, flatten_perturbation, iterate_improvement, refine_interpolant,
    sampled_distance,
};
use zeroset::certifier::{certify, Certificate, CertifyOptions};
use zeroset::chart::Chart;
use zeroset::driver::{fit_slope, sweep, Column, SweepConfig};
use zeroset::extremal::ExtremalFunction;
use zeroset::funcrep::{
    count_zero_components, read_function_file, write_function_file, SampledFunction,
};
use zeroset::modulus::{check_modulus_axioms, ModulusSpec};
use zeroset::VectorField;

#[derive(Parser)]
#[command(name = "zeroset", version, about = "Zero-set lower bounds under sup-norm perturbation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate, invert or sanity-check a modulus of continuity.
    Modulus(ModulusArgs),
    /// Evaluate a sampled function file at a point.
    Eval {
        #[arg(long)]
        func: PathBuf,
        /// Comma-separated coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Vec<f64>,
    },
    /// Describe the extremal function, optionally sampling it to a file.
    Build {
        #[command(flatten)]
        shape: Shape,
        /// Uniform knot spacing on every axis.
        #[arg(long, requires = "out")]
        sample: Option<f64>,
        #[arg(long, requires = "sample")]
        out: Option<PathBuf>,
    },
    /// Certify a lower bound on the number of zeros.
    Certify(CertifyArgs),
    /// Build a perturbation that removes zeros of a scalar function on [0,1].
    Perturb(PerturbArgs),
    /// Run a dyadic budget sweep and write the CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        chart: Option<String>,
        #[arg(long, requires = "chart")]
        r0: Option<f64>,
        /// Print the log-log slope of these columns after the sweep.
        #[arg(long, value_delimiter = ',')]
        fit: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModulusKind {
    Power,
    Table,
}

#[derive(Args)]
#[command(group(ArgGroup::new("op").required(true).args(["eval", "invert", "check"])))]
struct ModulusArgs {
    #[arg(long, value_enum, default_value = "power")]
    kind: ModulusKind,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Two-column breakpoint table (delta value).
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long)]
    eval: Option<f64>,
    #[arg(long)]
    invert: Option<f64>,
    /// Check the axioms on a uniform grid of [0, 1] with this step.
    #[arg(long)]
    check: Option<f64>,
}

#[derive(Args)]
struct Shape {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    p: usize,
}

impl Shape {
    fn function(&self) -> Result<ExtremalFunction> {
        if self.p >= self.m {
            bail!("need p < m, got p={}, m={}", self.p, self.m);
        }
        let beta = ModulusSpec::power(self.lambda, self.alpha)?;
        Ok(ExtremalFunction::new(beta, self.d, self.m - self.p, self.p)?)
    }
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    shape: Shape,
    #[arg(long)]
    eps: f64,
    /// Sampled perturbation to check on the face lattices.
    #[arg(long)]
    h: Option<PathBuf>,
    #[arg(long)]
    chart: Option<String>,
    #[arg(long, requires = "chart")]
    r0: Option<f64>,
    #[arg(long)]
    z_grid: Option<usize>,
    /// Append a CSV row (header written when the file is new).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PerturbMode {
    Flatten,
    Refine,
    Iterate,
}

#[derive(Args)]
#[command(group(ArgGroup::new("target").required(true).args(["func", "alpha"])))]
struct PerturbArgs {
    #[arg(long, value_enum)]
    mode: PerturbMode,
    #[arg(long)]
    eps: f64,
    #[arg(long = "C", alias = "c")]
    c: f64,
    #[arg(long)]
    func: Option<PathBuf>,
    #[arg(long, requires = "lambda")]
    alpha: Option<f64>,
    #[arg(long, requires = "alpha")]
    lambda: Option<f64>,
    /// Rounds for `iterate`.
    #[arg(long, default_value_t = 3)]
    rounds: u32,
    #[arg(long)]
    out: PathBuf,
}

fn parse_chart(spec: &str, r0: Option<f64>, m: usize) -> Result<Chart> {
    let chart = Chart::parse(spec, m)?;
    Ok(match r0 {
        Some(r) => chart.with_r0(r)?,
        None => chart,
    })
}

fn run_modulus(a: &ModulusArgs) -> Result<()> {
    let beta = match a.kind {
        ModulusKind::Power => ModulusSpec::power(a.lambda, a.alpha)?,
        ModulusKind::Table => {
            let path = a.file.as_ref().context("--kind table needs --file")?;
            ModulusSpec::table_from_file(path)?
        }
    };
    if let Some(s) = a.eval {
        println!("{}", beta.eval(s)?);
    } else if let Some(s) = a.invert {
        println!("{}", beta.inverse().eval(s)?);
    } else if let Some(step) = a.check {
        if !(step > 0.0 && step <= 1.0) {
            bail!("--check step must lie in (0, 1], got {step}");
        }
        let n = (1.0 / step).ceil() as usize;
        let grid: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(1.0)).collect();
        let report = check_modulus_axioms(&beta, &grid);
        println!("monotone={}", report.monotone);
        println!("subadditive={}", report.subadditive);
        println!("vanishes_at_zero={}", report.vanishes_at_zero);
    }
    Ok(())
}

fn run_build(shape: &Shape, sample: Option<f64>, out: Option<&Path>) -> Result<()> {
    let f = shape.function()?;
    if let (Some(step), Some(out)) = (sample, out) {
        let h = f.sample(step)?;
        write_function_file(out, &h)?;
        println!("wrote {} knots to {}", h.values().len() / h.m(), out.display());
    } else {
        println!("d={}\nm={}\nq={}\np={}", f.d, f.m(), f.q, f.p);
        println!("beta={:?}", f.beta);
    }
    Ok(())
}

fn append_row(path: &Path, cert: &Certificate) -> Result<()> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(
            file,
            "eps,effective_eps,gamma,n0,certified_count,paper_bound,theory_bound,theory_vacuous,envelope_ok"
        )?;
    }
    writeln!(
        file,
        "{:.16e},{:.16e},{:.16e},{},{},{},{:.16e},{},{}",
        cert.eps,
        cert.effective_eps,
        cert.gamma,
        cert.n0,
        cert.certified_count,
        cert.paper_bound,
        cert.theory_bound,
        cert.theory_vacuous,
        cert.envelope_ok
    )?;
    Ok(())
}

fn run_certify(a: &CertifyArgs) -> Result<()> {
    let f = a.shape.function()?;
    let h = a.h.as_ref().map(read_function_file).transpose()?;
    let chart = a
        .chart
        .as_deref()
        .map(|s| parse_chart(s, a.r0, f.m()))
        .transpose()?;
    let opts = CertifyOptions {
        perturbation: h.as_ref().map(|h| h as &dyn VectorField),
        chart: chart.as_ref(),
        z_grid: a.z_grid,
    };
    let cert = certify(&f, a.eps, &opts)?;
    print!("{}", cert.to_key_values());
    if let Some(path) = &a.csv {
        append_row(path, &cert)?;
    }
    Ok(())
}

fn run_perturb(a: &PerturbArgs) -> Result<()> {
    let target: Box<dyn VectorField> = match (&a.func, a.alpha, a.lambda) {
        (Some(path), _, _) => Box::new(read_function_file(path)?),
        (None, Some(alpha), Some(lambda)) => {
            Box::new(ExtremalFunction::scalar(ModulusSpec::power(lambda, alpha)?))
        }
        _ => bail!("give --func or both --alpha and --lambda"),
    };
    let report = |h: &SampledFunction, step: f64| -> Result<()> {
        let zeros = count_zero_components(h)?;
        match zeros.cardinality() {
            zeroset::funcrep::Cardinality::Finite(n) => println!("zeros={n}"),
            zeroset::funcrep::Cardinality::Infinite => println!("zeros=infinite"),
        }
        println!("distance={:.16e}", sampled_distance(&target, h, step)?);
        Ok(())
    };
    match a.mode {
        PerturbMode::Flatten => {
            let flat = flatten_perturbation(&target, a.eps, a.c)?;
            write_function_file(&a.out, &flat.function)?;
            println!("intervals={}", flat.lifted.len());
            println!("interpolated={}", flat.interpolated_count());
            report(&flat.function, a.eps / 64.0)?;
        }
        PerturbMode::Refine => {
            let peaks = find_separated_peaks(&target, a.eps, a.c)?;
            let refined = refine_interpolant(&target, a.eps, &peaks)?;
            write_function_file(&a.out, &refined.function)?;
            println!("peaks={}", peaks.len());
            println!("cells={}", refined.cells);
            println!("zero_budget={}", refined.zero_budget());
            report(&refined.function, a.eps / 64.0)?;
        }
        PerturbMode::Iterate => {
            let steps = iterate_improvement(&target, a.eps, a.c, a.rounds)?;
            let mut file = std::fs::File::create(&a.out)?;
            writeln!(file, "round,scale,eps,peaks,zero_count,envelope")?;
            for s in &steps {
                let zeros = match s.zero_count {
                    zeroset::funcrep::Cardinality::Finite(n) => n.to_string(),
                    zeroset::funcrep::Cardinality::Infinite => "inf".into(),
                };
                writeln!(
                    file,
                    "{},{:.16e},{:.16e},{},{},{:.16e}",
                    s.round, s.scale, s.eps, s.peaks, zeros, s.envelope
                )?;
                println!("round={} eps={:e} zeros={} envelope={:.6}", s.round, s.eps, zeros, s.envelope);
            }
        }
    }
    Ok(())
}

fn run_sweep(
    config: &Path,
    out: &Path,
    chart: Option<&str>,
    r0: Option<f64>,
    fit: &[String],
) -> Result<()> {
    let text = std::fs::read_to_string(config)
        .with_context(|| format!("reading {}", config.display()))?;
    let mut cfg: SweepConfig = text.parse()?;
    if let Some(spec) = chart {
        cfg.chart = Some(parse_chart(spec, r0, cfg.m)?);
        cfg.validate()?;
    }
    let records = sweep(&cfg, out)?;
    println!("wrote {} records to {}", records.len(), out.display());
    for name in fit {
        let column: Column = name.parse()?;
        println!("slope[{column}]={:.12}", fit_slope(&records, column)?);
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Modulus(a) => run_modulus(a),
        Command::Eval { func, at } => {
            let h = read_function_file(func)?;
            let v = h.evaluate(at)?;
            let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            println!("{}", parts.join(" "));
            Ok(())
        }
        Command::Build { shape, sample, out } => run_build(shape, *sample, out.as_deref()),
        Command::Certify(a) => run_certify(a),
        Command::Perturb(a) => run_perturb(a),
        Command::Sweep {
            config,
            out,
            chart,
            r0,
            fit,
        } => run_sweep(config, out, chart.as_deref(), *r0, fit),
    }
}
