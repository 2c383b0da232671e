use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qres::coherence::{coherence_fidelity, coherence_l1, maximal_coherence, tau_classifier};
use qres::harness::{run_suite, Suite};
use qres::io::{read_state, StateSpec};
use qres::measurement::{
    fmin, quantum_correlation, weak_fidelity, weak_purity, FminMode, MeasurementParams,
    OptimizerSettings, Optimum, WeakMeasurement,
};
use qres::purity::{fidelity_purity, hs_purity, linear_purity};
use qres::sweep::{notes, sweep, to_csv, Family, SweepSpec, DEFAULT_STEPS};
use qres::{ComplexMatrix, QresError};

const EXIT_INVALID: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qres",
    version,
    about = "Fidelity-based purity, coherence and correlation measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one measure on a JSON state file.
    Measure {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum)]
        name: Measure,
        /// Weak-measurement strength.
        #[arg(long)]
        x: Option<f64>,
        /// The first k computational basis vectors span the first outcome.
        #[arg(long, default_value_t = 1)]
        dichotomy: usize,
        /// Restrict fmin to measurements that leave the a-marginal unchanged.
        #[arg(long)]
        constrained: bool,
        /// Seed for the multistart optimizer (d_a = 3, 4).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print a JSON object with the value and optimizer details.
        #[arg(long)]
        json: bool,
    },
    /// Purity curves along a state family, as CSV.
    Sweep {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Local dimension for the Werner family.
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, allow_negative_numbers = true)]
        from: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        to: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the randomized property suites.
    Harness {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Measure {
    LinearPurity,
    HsPurity,
    FidelityPurity,
    CoherenceF,
    CoherenceL1,
    MaxCoherence,
    Tau,
    Qcorr,
    Fmin,
    WeakFidelity,
    WeakPurity,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Bell,
    Werner,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<QresError> for Failure {
    fn from(e: QresError) -> Self {
        let code = match e {
            QresError::Unsupported(_) | QresError::DimensionTooLarge { .. } => EXIT_UNSUPPORTED,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Measure {
            state,
            name,
            x,
            dichotomy,
            constrained,
            seed,
            json,
        } => cmd_measure(&state, name, x, dichotomy, constrained, seed, json),
        Command::Sweep {
            family,
            d,
            from,
            to,
            steps,
            out,
        } => cmd_sweep(family, d, from, to, steps, out),
        Command::Harness {
            suite,
            trials,
            seed,
            out,
        } => cmd_harness(suite, trials, seed, out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// `v` with 12 significant digits; scientific notation outside `[1e-5, 1e15)`.
fn format_value(v: f64) -> String {
    if v == 0.0 {
        return format!("{:.11}", 0.0);
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exponent = v.abs().log10().floor() as i32;
    if !(-5..15).contains(&exponent) {
        return format!("{v:.11e}");
    }
    let decimals = (11 - exponent).max(0) as usize;
    format!("{v:.decimals$}")
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|z| json!([z.re, z.im])).collect()))
            .collect(),
    )
}

fn optimum_json(opt: &Optimum) -> Value {
    let params = match &opt.params {
        MeasurementParams::Bloch { theta, phi } => {
            json!({"parametrization": "bloch", "theta": theta, "phi": phi})
        }
        MeasurementParams::Givens { angles } => {
            json!({"parametrization": "givens", "angles": angles})
        }
        MeasurementParams::Fixed => json!({"parametrization": "fixed"}),
    };
    json!({"params": params, "basis": matrix_json(&opt.basis)})
}

fn cmd_measure(
    path: &std::path::Path,
    name: Measure,
    x: Option<f64>,
    dichotomy: usize,
    constrained: bool,
    seed: u64,
    as_json: bool,
) -> Result<u8, Failure> {
    let spec = read_state(path)?;
    let rho = spec.density();
    let dims: Vec<usize> = match &spec {
        StateSpec::Single(r) => vec![r.dim()],
        StateSpec::Bipartite(b) => vec![b.dims().0, b.dims().1],
    };
    let settings = OptimizerSettings {
        seed,
        ..OptimizerSettings::default()
    };
    let mut detail = json!({});
    let value = match name {
        Measure::LinearPurity => linear_purity(rho),
        Measure::HsPurity => hs_purity(rho),
        Measure::FidelityPurity => fidelity_purity(rho, None),
        Measure::CoherenceF => coherence_fidelity(rho),
        Measure::CoherenceL1 => coherence_l1(rho),
        Measure::MaxCoherence => maximal_coherence(rho),
        Measure::Tau => tau_classifier(rho)?,
        Measure::Qcorr => {
            let opt = quantum_correlation(&spec.as_bipartite(), &settings)?;
            detail = optimum_json(&opt);
            opt.value
        }
        Measure::Fmin => {
            let mode = if constrained {
                FminMode::MarginalPreserving
            } else {
                FminMode::Unconstrained
            };
            let opt = fmin(&spec.as_bipartite(), &settings, mode)?;
            detail = optimum_json(&opt);
            opt.value
        }
        Measure::WeakFidelity | Measure::WeakPurity => {
            let x = x.ok_or_else(|| invalid("--x is required for weak measures"))?;
            let bipartite = spec.as_bipartite();
            let w = WeakMeasurement::computational(bipartite.dims().0, dichotomy, x)?;
            detail = json!({"x": x, "dichotomy": dichotomy, "t": w.t()});
            if matches!(name, Measure::WeakFidelity) {
                weak_fidelity(&bipartite, &w)?
            } else {
                weak_purity(&bipartite, &w)?
            }
        }
    };
    let value = if value == 0.0 { 0.0 } else { value };
    if as_json {
        let name_str = name
            .to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_string();
        let mut out = json!({"measure": name_str, "dims": dims, "value": value, "formatted": format_value(value)});
        if let (Value::Object(o), Value::Object(d)) = (&mut out, detail) {
            o.extend(d);
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("serializable")
        );
    } else {
        println!("{}", format_value(value));
    }
    Ok(0)
}

fn cmd_sweep(
    family: FamilyArg,
    d: usize,
    from: Option<f64>,
    to: Option<f64>,
    steps: usize,
    out: Option<PathBuf>,
) -> Result<u8, Failure> {
    let family = match family {
        FamilyArg::Bell => Family::Bell,
        FamilyArg::Werner => Family::Werner { d },
    };
    let mut spec = SweepSpec::new(family);
    spec.from = from.unwrap_or(spec.from);
    spec.to = to.unwrap_or(spec.to);
    spec.steps = steps;
    let rows = sweep(&spec)?;
    let csv = to_csv(&rows);
    match out {
        Some(path) => std::fs::write(&path, csv)
            .map_err(|e| invalid(format!("--out {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    for note in notes(&spec) {
        eprintln!("note: {note}");
    }
    Ok(0)
}

fn cmd_harness(
    suite: Suite,
    trials: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<u8, Failure> {
    if trials == 0 {
        return Err(invalid("--trials must be positive"));
    }
    let report = run_suite(suite, trials, seed);
    let text = report.render();
    print!("{text}");
    if let Some(path) = out {
        std::fs::write(&path, &text)
            .map_err(|e| invalid(format!("--out {}: {e}", path.display())))?;
    }
    Ok(if report.passed() { 0 } else { 1 })
}
