use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thetacert::report::{scan_csv, witness_line, ReportDocument};
use thetacert::scanner::{scan, ExponentQuery};
use thetacert::theta::{self, DerivativeOrder};
use thetacert::verifier::{
    compute_greek_constants, rounds_to_printed, run_suite, truncates_to_printed, Suite, SuiteOptions, TargetSign, REFERENCE_GREEK,
};
use thetacert::{Enclosure, Error, EvalConfig};

#[derive(Parser)]
#[command(name = "thetacert", version, about = "Certified theta-function numerics and convexity verification")]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, env = "THETACERT_PRECISION", default_value_t = 128)]
    precision: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Function {
    Theta2,
    Theta4,
    F,
    #[value(name = "f'")]
    FPrime,
    #[value(name = "f''")]
    FSecond,
}

impl Function {
    fn name(self) -> &'static str {
        match self {
            Function::Theta2 => "theta2",
            Function::Theta4 => "theta4",
            Function::F => "f",
            Function::FPrime => "f'",
            Function::FSecond => "f''",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sign {
    Positive,
    Negative,
}

#[derive(Subcommand)]
enum Command {
    /// Print a certified enclosure of a function value.
    Eval {
        #[arg(value_enum)]
        function: Function,
        /// Positive decimal argument.
        #[arg(long, allow_hyphen_values = true, value_parser = positive_decimal)]
        y: String,
        /// Derivative order (theta2/theta4 only).
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=3))]
        order: u8,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a verification suite; exit status 0 only if everything certifies.
    Verify {
        /// lemma1, modular, g-chain, large-y, small-y, greek, convexity, decreasing or all.
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        /// Interval for the direct f'' / f' certification.
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
        interval: Option<Vec<f64>>,
        #[arg(long, value_enum)]
        target_sign: Option<Sign>,
        /// Largest n in the termwise checks.
        #[arg(long, default_value_t = 50)]
        n_max: u32,
        /// Upper end of the bounded certifications before the analytic tail takes over.
        #[arg(long, default_value_t = 30.0)]
        y_cap: f64,
        /// Write a JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Search for non-convexity of y^a theta4'/theta4.
    Scan {
        /// Exponent, as a decimal.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, num_args = 2, value_names = ["A", "B"], default_values_t = [0.05, 5.0])]
        interval: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn positive_decimal(s: &str) -> Result<String, String> {
    let e = Enclosure::from_decimal(s, 64).map_err(|e| e.to_string())?;
    if !e.is_positive() {
        return Err(format!("y must be positive, got {s}"));
    }
    Ok(s.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), ExitCode> {
    std::fs::write(path, contents).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        ExitCode::from(1)
    })
}

fn eval(fun: Function, y: &str, order: u8, format: Format, cfg: &EvalConfig) -> ExitCode {
    let p = cfg.precision_bits;
    let started = now();
    let yv = match Enclosure::from_decimal(y, p) {
        Ok(v) => v,
        Err(e) => return usage_error(e),
    };
    let nu = DerivativeOrder::new(order).expect("range checked by the parser");
    let (value, order) = match fun {
        Function::Theta2 => (theta::theta2(&yv, nu, cfg), Some(order)),
        Function::Theta4 => (theta::theta4(&yv, nu, cfg), Some(order)),
        Function::F => (theta::f_derivative(&yv, 0, cfg), None),
        Function::FPrime => (theta::f_derivative(&yv, 1, cfg), None),
        Function::FSecond => (theta::f_derivative(&yv, 2, cfg), None),
    };
    let value = match value {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match format {
        Format::Text => {
            let (lo, hi) = value.to_decimal_strings(40);
            let label = match order {
                Some(k) if k > 0 => format!("{}^({k})", fun.name()),
                _ => fun.name().to_string(),
            };
            println!("{label}({y}) in [{lo}, {hi}]");
        }
        Format::Json => {
            let mut doc = ReportDocument::new(&format!("eval {}", fun.name()), cfg);
            doc.started_at = Some(started);
            doc.push_value(fun.name(), Some(y), order, &value, None);
            doc.finished_at = Some(now());
            println!("{}", doc.to_json());
        }
    }
    ExitCode::SUCCESS
}

struct VerifyArgs {
    suite: Suite,
    interval: Option<Vec<f64>>,
    target_sign: Option<Sign>,
    n_max: u32,
    y_cap: f64,
    json: Option<PathBuf>,
}

fn verify(args: VerifyArgs, cfg: &EvalConfig) -> ExitCode {
    let mut opts = SuiteOptions { n_max: args.n_max, y_cap: args.y_cap, ..SuiteOptions::default() };
    if let Some(iv) = &args.interval {
        if !(iv[0] > 0.0 && iv[1] > iv[0] && iv[1].is_finite()) {
            return usage_error(format!("--interval {} {} must satisfy 0 < a < b", iv[0], iv[1]));
        }
        opts.interval = (iv[0], iv[1]);
    }
    if !(opts.y_cap > 1.0 && opts.y_cap.is_finite()) {
        return usage_error("--y-cap must be a finite number above 1");
    }
    if let Some(s) = args.target_sign {
        opts.target_sign = match s {
            Sign::Positive => TargetSign::Positive,
            Sign::Negative => TargetSign::Negative,
        };
    }

    let mut doc = ReportDocument::new(&format!("verify {}", args.suite), cfg);
    doc.started_at = Some(now());
    let reports = run_suite(args.suite, &opts, cfg);
    for r in &reports {
        doc.push_report(r);
        let boxes = if r.boxes_examined > 0 { format!(" ({} boxes)", r.boxes_examined) } else { String::new() };
        println!("{:<12} {}{boxes}", r.status.label(), r.id);
        match &r.status {
            thetacert::Status::Certified => {}
            thetacert::Status::Failed { reason, witness } => {
                println!("             {reason}");
                if let Some(w) = witness {
                    let (lo, hi) = w.y.to_decimal_strings(20);
                    println!("             witness y in [{lo}, {hi}]");
                }
            }
            thetacert::Status::Inconclusive { reason, deepest_box } => {
                println!("             {reason}");
                if let Some(b) = deepest_box {
                    let (lo, hi) = b.to_decimal_strings(20);
                    println!("             undecided box [{lo}, {hi}]");
                }
            }
        }
    }
    if matches!(args.suite, Suite::Greek | Suite::All) {
        if let Ok(g) = compute_greek_constants(cfg) {
            for ((name, v), (_, printed)) in g.named().iter().zip(REFERENCE_GREEK.iter()) {
                let note = format!(
                    "printed {printed}; rounds to printed: {}; truncates to printed: {}",
                    rounds_to_printed(v, printed),
                    truncates_to_printed(v, printed)
                );
                doc.push_value(name, None, None, v, Some(note));
                let (lo, hi) = v.to_decimal_strings(15);
                println!("             {name:<8} [{lo}, {hi}]  printed {printed}");
            }
        }
    }
    doc.finished_at = Some(now());
    let s = &doc.summary;
    println!("summary: {} certified, {} failed, {} inconclusive of {}", s.certified, s.failed, s.inconclusive, s.total);
    if let Some(path) = &args.json {
        if let Err(code) = write_file(path, &doc.to_json()) {
            return code;
        }
    }
    if doc.summary.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run_scan(a: &str, interval: &[f64], resolution: usize, csv: Option<PathBuf>, cfg: &EvalConfig) -> ExitCode {
    let q = match ExponentQuery::new(a, interval[0], interval[1], resolution, cfg.precision_bits) {
        Ok(q) => q,
        Err(e) => return usage_error(e),
    };
    let result = match scan(&q, cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let table = scan_csv(&result, 20);
    let witness = result.witness.as_ref().map(|w| witness_line(w, 20));
    match csv {
        Some(path) => {
            if let Err(code) = write_file(&path, &table) {
                return code;
            }
            println!("wrote {} rows to {}", result.rows.len(), path.display());
        }
        None => print!("{table}"),
    }
    match witness {
        Some(line) => println!("{line}"),
        None => println!("# no witness found (this does not prove convexity)"),
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = EvalConfig::with_precision(cli.precision);
    if let Err(e) = cfg.validate() {
        return usage_error(e);
    }
    match cli.command {
        Command::Eval { function, y, order, format } => eval(function, &y, order, format, &cfg),
        Command::Verify { suite, interval, target_sign, n_max, y_cap, json } => {
            verify(VerifyArgs { suite, interval, target_sign, n_max, y_cap, json }, &cfg)
        }
        Command::Scan { a, interval, resolution, csv } => run_scan(&a, &interval, resolution, csv, &cfg),
    }
}
