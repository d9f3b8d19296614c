use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use tfqd::asymptotics::{alternative_rate, default_window, report_from_series, theory_leading, Deviations};
use tfqd::msd::{
    coeff_regime1, coeff_regime2, initial_msd, overflow_horizon, rate_bounds_regime3, Msd, OVERFLOW_EXPONENT,
};
use tfqd::selftest::{self, Faults};
use tfqd::spectral::Regime;
use tfqd::Error;

mod config;

use config::{DatumConfig, DatumKind, ExperimentConfig, Outputs, QuadratureConfig, TimeGrid};

#[derive(Parser)]
#[command(
    name = "tfqd",
    version,
    about = "Mean-square displacement of the time-fractional Schrödinger equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample D₂ on a log grid, fit the regime's law and write CSV/JSON.
    Run(ProblemArgs),
    /// Run the built-in invariant checks.
    Selftest(SelftestArgs),
    /// Print the theoretical constants for a problem without sampling D₂.
    Constants(ProblemArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// JSON experiment config; flags given alongside override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    dim: Option<u32>,
    #[arg(long, value_enum)]
    datum: Option<DatumKind>,
    #[arg(long)]
    lambda_minus: Option<f64>,
    #[arg(long)]
    lambda_plus: Option<f64>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Grid points per decade of t.
    #[arg(long)]
    ppd: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Override the Mittag-Leffler series/asymptotic crossover radius.
    #[arg(long)]
    inject_crossover: Option<f64>,
    /// Treat |alpha - beta| up to this value as alpha = beta.
    #[arg(long, default_value_t = 0.0)]
    inject_ballistic_tolerance: f64,
}

enum Failure {
    Validation(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Quadrature { .. } => Failure::Runtime(format!("{e}; try a looser --rel-tol")),
            e => Failure::Runtime(e.to_string()),
        }
    }
}

fn load_config(args: &ProblemArgs) -> Result<ExperimentConfig, String> {
    let mut c = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))?
        }
        None => ExperimentConfig {
            alpha: args.alpha.ok_or("--alpha is required without --config")?,
            beta: args.beta.ok_or("--beta is required without --config")?,
            dimension: 1,
            datum: DatumConfig {
                class: DatumKind::Gaussian,
                lambda_minus: None,
                lambda_plus: None,
            },
            time_grid: TimeGrid::default(),
            quadrature: QuadratureConfig::default(),
            outputs: Outputs::default(),
        },
    };
    macro_rules! set {
        ($flag:ident => $($field:tt)+) => {
            if let Some(v) = args.$flag.clone() {
                c.$($field)+ = v;
            }
        };
    }
    set!(alpha => alpha);
    set!(beta => beta);
    set!(dim => dimension);
    set!(datum => datum.class);
    set!(rel_tol => quadrature.rel_tol);
    set!(abs_tol => quadrature.abs_tol);
    set!(ppd => time_grid.points_per_decade);
    if args.lambda_minus.is_some() {
        c.datum.lambda_minus = args.lambda_minus;
    }
    if args.lambda_plus.is_some() {
        c.datum.lambda_plus = args.lambda_plus;
    }
    if args.t_min.is_some() {
        c.time_grid.t_min = args.t_min;
    }
    if args.t_max.is_some() {
        c.time_grid.t_max = args.t_max;
    }
    if args.out_csv.is_some() {
        c.outputs.csv_path = args.out_csv.clone();
    }
    if args.out_json.is_some() {
        c.outputs.json_path = args.out_json.clone();
    }
    Ok(c)
}

#[derive(Serialize)]
struct Fitted {
    exponent: Option<f64>,
    rate: Option<f64>,
    coefficient: f64,
    r_squared: f64,
    window: (f64, f64),
    samples: usize,
}

#[derive(Serialize)]
struct Theory {
    exponent: Option<f64>,
    coefficient: Option<f64>,
    rate_bracket: Option<(f64, f64)>,
    overflow_horizon: Option<f64>,
}

/// The exponential rate has two written forms, with cos(πβ/(2α)) and with
/// cos(πβ/α). The report carries both brackets.
#[derive(Serialize)]
struct RateFormulaNote {
    used: &'static str,
    alternative: &'static str,
    alternative_bracket: (f64, f64),
    fitted_in_alternative_bracket: bool,
}

#[derive(Serialize)]
struct Report {
    config: ExperimentConfig,
    regime: Regime,
    fitted: Fitted,
    theory: Theory,
    deviations: Deviations,
    rate_formula_note: Option<RateFormulaNote>,
    tool_version: &'static str,
}

fn number(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn run(args: &ProblemArgs) -> Result<(), Failure> {
    let cfg = load_config(args).map_err(Failure::Validation)?;
    let exp = cfg.validate().map_err(Failure::Validation)?;
    let (idx, datum) = (exp.idx, exp.datum);

    let series = Msd::new(idx, datum, exp.quad)?.series(&exp.grid)?;
    let r = report_from_series(&series, &datum)?;

    if let Some(path) = &exp.resolved.outputs.csv_path {
        let mut csv = String::from("t,d2,theory_leading\n");
        for (&t, &d2) in series.times.iter().zip(&series.values) {
            let lead = theory_leading(idx, &datum, t)?.map(number).unwrap_or_default();
            writeln!(csv, "{},{},{}", number(t), number(d2), lead).expect("writing to a String");
        }
        write_out(path, &csv)?;
    }

    let rate_formula_note = match r.regime {
        Regime::ExponentialGrowth => {
            let bracket = (
                alternative_rate(idx, datum.lambda_minus),
                alternative_rate(idx, datum.lambda_plus),
            );
            let rate = r.fitted_rate.expect("regime 3 report has a rate");
            Some(RateFormulaNote {
                used: "2 cos(pi beta / (2 alpha)) Lambda^(2/alpha)",
                alternative: "2 cos(pi beta / alpha) Lambda^(2/alpha)",
                alternative_bracket: bracket,
                fitted_in_alternative_bracket: bracket.0 <= rate && rate <= bracket.1,
            })
        }
        _ => None,
    };
    let report = Report {
        regime: r.regime,
        fitted: Fitted {
            exponent: r.fitted_exponent,
            rate: r.fitted_rate,
            coefficient: r.fitted_coefficient,
            r_squared: r.r_squared,
            window: r.window,
            samples: r.samples,
        },
        theory: Theory {
            exponent: r.theory_exponent,
            coefficient: r.theory_coefficient,
            rate_bracket: r.theory_rate_bracket,
            overflow_horizon: overflow_horizon(idx, &datum),
        },
        deviations: r.deviations,
        rate_formula_note,
        tool_version: env!("CARGO_PKG_VERSION"),
        config: exp.resolved,
    };
    let json = serde_json::to_string_pretty(&report).expect("report is serializable") + "\n";
    match &report.config.outputs.json_path {
        Some(path) => write_out(path, &json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Constants {
    regime: Regime,
    datum: String,
    initial_msd: f64,
    decay_coefficient: Option<f64>,
    ballistic_coefficient: Option<f64>,
    rate_bracket: Option<(f64, f64)>,
    overflow_exponent: f64,
    overflow_horizon: Option<f64>,
    default_window: Option<(f64, f64)>,
}

fn constants(args: &ProblemArgs) -> Result<(), Failure> {
    let cfg = load_config(args).map_err(Failure::Validation)?;
    let (idx, datum) = cfg.problem().map_err(Failure::Validation)?;
    let c = Constants {
        regime: idx.regime(),
        datum: datum.id(),
        initial_msd: initial_msd(&datum)?,
        decay_coefficient: if idx.alpha < 1.0 {
            coeff_regime1(&datum, idx.alpha).ok()
        } else {
            None
        },
        ballistic_coefficient: Some(coeff_regime2(&datum, idx.alpha)?),
        rate_bracket: rate_bounds_regime3(idx, &datum).ok(),
        overflow_exponent: OVERFLOW_EXPONENT,
        overflow_horizon: overflow_horizon(idx, &datum),
        default_window: default_window(idx, &datum).ok(),
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&c).expect("constants are serializable")
    );
    Ok(())
}

fn run_selftest(args: &SelftestArgs) -> Result<(), Failure> {
    let faults = Faults {
        crossover: args.inject_crossover,
        ballistic_tolerance: args.inject_ballistic_tolerance,
    };
    let results = selftest::run(&faults);
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in &results {
        let mark = if r.passed { "PASS" } else { "FAIL" };
        println!("{mark}  {:width$}  {}", r.name, r.detail);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} checks, {failed} failed", results.len());
    if failed > 0 {
        return Err(Failure::Runtime(format!("{failed} selftest check(s) failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(a) => run(a),
        Command::Selftest(a) => run_selftest(a),
        Command::Constants(a) => constants(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("tfqd: invalid configuration: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("tfqd: {msg}");
            ExitCode::from(1)
        }
    }
}
