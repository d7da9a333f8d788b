use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use facetlift::document::{
    format_rational, parse_expression, serialize_expression, ExpressionDocument, Metadata,
};
use facetlift::lifting::{
    compatibility_holds, four_party_19, lift2, lift3, mabk, symmetry_images, wbz333,
    LiftDiagnostics,
};
use facetlift::polytope::{enumerate_facets_brute, lr_maximizer, tightness};
use facetlift::quantum::{
    bell_operator, correlation_tensor, spectrum, violation_factor, MeasurementSettings,
    NamedState, QuantumState, SeesawConfig,
};
use facetlift::reproduce::{reproduce_report, run_criterion, sig6, Report, CRITERIA};
use facetlift::{BellExpression, Scenario};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

const EXIT_DOMAIN: u8 = 1;
const EXIT_CAP: u8 = 2;
const EXIT_REPRODUCTION: u8 = 3;

/// Construct, certify and test CHSH-type correlation Bell inequalities.
///
/// Expressions are exchanged as JSON documents
/// `{"settings": [..], "terms": [{"s": [..], "c": "p/q"}, ..]}`.
/// Every INPUT argument is a file path, or `-` for standard input.
#[derive(Parser, Debug)]
#[command(name = "facetlift", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Seed for every stochastic optimization.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// See-saw restarts.
    #[arg(long, global = true, default_value_t = 50)]
    restarts: usize,
    /// See-saw stopping threshold on the per-sweep improvement.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl GlobalArgs {
    fn seesaw(&self) -> SeesawConfig {
        SeesawConfig {
            restarts: self.restarts,
            tol: self.tol,
            seed: self.seed,
            ..SeesawConfig::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact local-realistic bound and a maximizing strategy.
    LrBound { input: String },
    /// Facet test: rank of the saturating admissible vectors.
    Tightness { input: String },
    /// All facets of a tiny correlation polytope by brute force.
    Facets {
        /// Settings per party, e.g. `2,2,2`.
        #[arg(long, value_delimiter = ',', required = true)]
        settings: Vec<usize>,
    },
    /// Prepend a two-setting party to the facets I+ and I-.
    Lift2 { i_plus: String, i_minus: String },
    /// Prepend a three-setting party to the facets I0, I2 and I3.
    Lift3 { i0: String, i2: String, i3: String },
    /// Whether I2 + I3 - I0 is a valid inequality.
    Compat { i0: String, i2: String, i3: String },
    /// The n-party MABK expression.
    Mabk { n: usize },
    /// Built-in inequalities.
    Builtin { which: Builtin },
    /// Maximize the quantum expectation on a state by see-saw.
    Violate {
        input: String,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Bell operator spectrum at given or optimized settings.
    Spectrum {
        input: String,
        /// JSON settings (`{"directions": ..}` or a `violate` result).
        #[arg(long, conflicts_with = "state")]
        settings: Option<String>,
        /// Optimize settings on this state first.
        #[command(flatten)]
        state: OptionalStateArgs,
    },
    /// Pauli-product correlation tensor of a state.
    CorrTensor {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Recompute every published number and compare.
    Reproduce {
        /// Only these criteria, e.g. `1,4,5`.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Builtin {
    Wbz333,
    #[value(name = "four-party-19")]
    FourParty19,
    SymmetryImages,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct StateArgs {
    /// ghz4, generalized-ghz, w4, pdc, chi, cluster4, bell-pair, ghz,
    /// product-zeros or custom.
    #[arg(long)]
    state: String,
    /// Numeric state parameter (lambda in radians, or a qubit count).
    #[arg(long = "param")]
    params: Vec<f64>,
    /// Amplitudes for `custom`: JSON list of reals or [re, im] pairs.
    #[arg(long)]
    amplitudes: Option<String>,
}

#[derive(Args, Debug)]
struct OptionalStateArgs {
    #[arg(long)]
    state: Option<String>,
    #[arg(long = "param")]
    params: Vec<f64>,
    #[arg(long)]
    amplitudes: Option<String>,
}

fn read_input(source: &str) -> anyhow::Result<String> {
    if source == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).context("reading standard input")?;
        Ok(text)
    } else {
        fs::read_to_string(source).with_context(|| format!("reading {source}"))
    }
}

fn read_expression(source: &str) -> anyhow::Result<BellExpression> {
    let text = read_input(source)?;
    parse_expression(&text).map_err(|e| anyhow!(e).context(format!("parsing {source}")))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display())),
        None => match writeln!(io::stdout().lock(), "{text}") {
            // a closed pipe downstream (e.g. `| head`) is not an error
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            other => Ok(other?),
        },
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> anyhow::Result<()> {
    emit(out, &serde_json::to_string_pretty(value)?)
}

fn document(expr: &BellExpression, name: &str, comment: Option<String>) -> ExpressionDocument {
    let mut doc = serialize_expression(expr);
    doc.metadata = Some(Metadata {
        name: Some(name.into()),
        comment,
    });
    doc
}

fn diagnostics_comment(d: &LiftDiagnostics) -> String {
    serde_json::to_string(d).expect("diagnostics serialize")
}

fn parse_amplitudes(text: &str) -> anyhow::Result<Vec<Complex64>> {
    let items: Vec<Value> = serde_json::from_str(text).context("amplitudes must be a JSON list")?;
    items
        .iter()
        .map(|v| match v {
            Value::Number(x) => Ok(Complex64::new(x.as_f64().unwrap_or(f64::NAN), 0.0)),
            Value::Array(pair) if pair.len() == 2 => {
                let re = pair[0].as_f64().ok_or_else(|| anyhow!("bad amplitude {v}"))?;
                let im = pair[1].as_f64().ok_or_else(|| anyhow!("bad amplitude {v}"))?;
                Ok(Complex64::new(re, im))
            }
            other => Err(anyhow!("bad amplitude {other}")),
        })
        .collect()
}

fn build_state(name: &str, params: &[f64], amplitudes: Option<&str>) -> anyhow::Result<QuantumState> {
    let named = if name == "custom" {
        let source = amplitudes.ok_or_else(|| anyhow!("custom states need --amplitudes"))?;
        NamedState::Custom(parse_amplitudes(&read_input(source)?)?)
    } else {
        if amplitudes.is_some() {
            bail!("--amplitudes only applies to custom states");
        }
        NamedState::parse(name, params)?
    };
    Ok(named.build()?)
}

fn read_settings(source: &str) -> anyhow::Result<MeasurementSettings> {
    let value: Value = serde_json::from_str(&read_input(source)?).context("settings must be JSON")?;
    let inner = value.get("settings").cloned().unwrap_or(value);
    let parsed: MeasurementSettings = serde_json::from_value(inner).context("expected {\"directions\": [[[x, y, z], ..], ..]}")?;
    // deserialization bypasses validation
    Ok(MeasurementSettings::new(parsed.directions().to_vec())?)
}

fn print_report(report: &Report, format: Format, out: Option<&Path>) -> anyhow::Result<()> {
    match format {
        Format::Json => emit_json(out, report),
        Format::Text => {
            let mut lines: Vec<String> = report.rows.iter().map(|r| r.to_string()).collect();
            let failed = report.rows.iter().filter(|r| !r.pass).count();
            lines.push(format!("{} rows, {failed} failed", report.rows.len()));
            emit(out, &lines.join("\n"))
        }
    }
}

/// Runs the command; `Ok(false)` means a reproduction failure.
fn run(cli: Cli) -> anyhow::Result<bool> {
    let g = &cli.global;
    let out = g.out.as_deref();
    match &cli.command {
        Command::LrBound { input } => {
            let expr = read_expression(input)?;
            let (value, strategy) = lr_maximizer(&expr)?;
            emit_json(out, &json!({
                "lr_max": format_rational(&value),
                "maximizer": strategy.outcomes(),
            }))?;
        }
        Command::Tightness { input } => {
            emit_json(out, &tightness(&read_expression(input)?)?)?;
        }
        Command::Facets { settings } => {
            let facets = enumerate_facets_brute(&Scenario::new(settings.clone())?)?;
            let docs: Vec<ExpressionDocument> = facets
                .iter()
                .enumerate()
                .map(|(k, f)| document(f, &format!("facet {k}"), None))
                .collect();
            emit_json(out, &docs)?;
        }
        Command::Lift2 { i_plus, i_minus } => {
            let (expr, diag) = lift2(&read_expression(i_plus)?, &read_expression(i_minus)?)?;
            emit_json(out, &document(&expr, "lift2", Some(diagnostics_comment(&diag))))?;
        }
        Command::Lift3 { i0, i2, i3 } => {
            let (expr, diag) = lift3(&read_expression(i0)?, &read_expression(i2)?, &read_expression(i3)?)?;
            if let Some(w) = &diag.compatibility_witness {
                log::warn!("compatibility fails on strategy {w}; the output is not certified valid");
            }
            emit_json(out, &document(&expr, "lift3", Some(diagnostics_comment(&diag))))?;
        }
        Command::Compat { i0, i2, i3 } => {
            let (ok, witness) = compatibility_holds(&read_expression(i0)?, &read_expression(i2)?, &read_expression(i3)?)?;
            emit_json(out, &json!({
                "compatible": ok,
                "witness": witness.map(|w| w.outcomes().to_vec()),
            }))?;
        }
        Command::Mabk { n } => {
            emit_json(out, &document(&mabk(*n)?, &format!("mabk({n})"), None))?;
        }
        Command::Builtin { which } => match which {
            Builtin::Wbz333 => emit_json(out, &document(&wbz333(), "wbz333", None))?,
            Builtin::FourParty19 => emit_json(out, &document(&four_party_19(), "four-party-19", None))?,
            Builtin::SymmetryImages => {
                let (b1, b2, b3) = symmetry_images();
                emit_json(out, &vec![
                    document(&b1, "B1", None),
                    document(&b2, "B2", None),
                    document(&b3, "B3", None),
                ])?;
            }
        },
        Command::Violate { input, state } => {
            let expr = read_expression(input)?;
            let rho = build_state(&state.state, &state.params, state.amplitudes.as_deref())?;
            let r = violation_factor(&expr, &rho, &g.seesaw())?;
            if !r.converged {
                log::warn!("best restart hit the sweep limit");
            }
            emit_json(out, &json!({
                "violation_factor": r.value,
                "violation_factor_6sig": sig6(r.value),
                "converged": r.converged,
                "best_restart": r.best_restart,
                "sweeps": r.sweeps,
                "settings": r.settings,
            }))?;
        }
        Command::Spectrum { input, settings, state } => {
            let expr = read_expression(input)?;
            let dirs = match (settings, &state.state) {
                (Some(path), _) => read_settings(path)?,
                (None, Some(name)) => {
                    let rho = build_state(name, &state.params, state.amplitudes.as_deref())?;
                    violation_factor(&expr, &rho, &g.seesaw())?.settings
                }
                (None, None) => bail!("give --settings or --state"),
            };
            let sp = spectrum(&bell_operator(&expr, &dirs)?)?;
            emit_json(out, &json!({
                "eigenvalues": sp.eigenvalues,
                "levels": sp.levels,
                "settings": dirs,
            }))?;
        }
        Command::CorrTensor { state } => {
            let rho = build_state(&state.state, &state.params, state.amplitudes.as_deref())?;
            let t = correlation_tensor(&rho, None)?;
            emit_json(out, &json!({
                "shape": t.tensor().shape(),
                "entries": t.tensor().data(),
                "sum_squares": t.sum_squares(),
            }))?;
        }
        Command::Reproduce { criteria, format } => {
            let config = g.seesaw();
            let report = if criteria.is_empty() {
                reproduce_report(&config)
            } else {
                if let Some(bad) = criteria.iter().find(|&&c| c == 0 || c > CRITERIA) {
                    bail!("criteria are numbered 1..={CRITERIA}, got {bad}");
                }
                Report {
                    rows: criteria.iter().flat_map(|&c| run_criterion(c, &config)).collect(),
                }
            };
            print_report(&report, *format, out)?;
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<facetlift::Error>() {
        Some(facetlift::Error::CapExceeded { .. }) => EXIT_CAP,
        _ => EXIT_DOMAIN,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_REPRODUCTION),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
