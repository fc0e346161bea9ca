//! Command-line front end: strategy evaluation, classical enumeration,
//! seesaw search, normal forms, certified bound claims, certificate
//! verification, and dimension scans.
//!
//! Exit codes: 0 success, 1 claim-verification failure, 2 input error.
//! All runs are deterministic for a fixed set of flags.

use clap::{Parser, Subcommand, ValueEnum};
use i3322::ascent::{
    optimize_omega, schmidt_seesaw, seesaw_restarts, OptimizeParams, SchmidtParams, SeesawParams,
};
use i3322::bell::{classical_max, entanglement_entropy, i3322_value, load_strategy, save_strategy};
use i3322::bounds::{claim_case, claim_d4, omega_closed, verify_f_cap, BoundReport};
use i3322::soscheck::{builtin_case3, load_certificate, verify};
use i3322::structure::{build_normal_form, Branch, NormalFormSpec};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "i3322", version, about = "I3322 Bell functional toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SchmidtMode {
    Uniform,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ClaimName {
    #[value(name = "f-cap")]
    FCap,
    Case1,
    Case2,
    Case3,
    D4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BranchArg {
    #[value(name = "chain-even")]
    ChainEven,
    #[value(name = "chain-odd")]
    ChainOdd,
    #[value(name = "chain-even-exchanged")]
    ChainEvenExchanged,
    #[value(name = "chain-odd-exchanged")]
    ChainOddExchanged,
    Cyclic,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Branch {
        match b {
            BranchArg::ChainEven => Branch::ChainEven,
            BranchArg::ChainOdd => Branch::ChainOdd,
            BranchArg::ChainEvenExchanged => Branch::ChainEvenExchanged,
            BranchArg::ChainOddExchanged => Branch::ChainOddExchanged,
            BranchArg::Cyclic => Branch::Cyclic,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the functional on a strategy file.
    Value {
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Enumerate all 64 deterministic assignments.
    Classical,
    /// Seeded random-restart seesaw ascent.
    Seesaw {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SchmidtMode::Uniform)]
        schmidt: SchmidtMode,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build or optimize a joint normal form.
    NormalForm {
        #[arg(long, value_enum)]
        branch: BranchArg,
        /// Comma-separated free coefficients.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Option<Vec<f64>>,
        /// Optimize the coefficients instead of taking them from --coeffs.
        #[arg(long, default_value_t = false)]
        optimize: bool,
        #[arg(long)]
        dim: Option<usize>,
        /// Coarse grid step for --optimize.
        #[arg(long, default_value_t = 0.25)]
        step: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified grid verdict for one bound claim.
    Bounds {
        #[arg(long, value_enum)]
        claim: ClaimName,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Emit the report as a CSV row instead of text.
        #[arg(long, default_value_t = false)]
        csv: bool,
    },
    /// Verify a sum-of-squares certificate ("builtin" or a file path).
    Certify {
        #[arg(long, default_value = "builtin")]
        cert: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Optimize a branch across a dimension range, emitting CSV.
    Scan {
        #[arg(long, value_enum)]
        branch: BranchArg,
        /// Range as A:B:STEP (inclusive).
        #[arg(long)]
        dims: String,
        #[arg(long, default_value_t = 0.25)]
        step: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn print_bound_report(report: &BoundReport, csv: bool) -> ExitCode {
    if csv {
        println!("{}", BoundReport::csv_header());
        println!("{}", report.csv_row());
    } else {
        println!("{report}");
    }
    if report.holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn parse_dims(spec: &str) -> Result<Vec<usize>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("--dims expects A:B:STEP, got `{spec}`"));
    }
    let a: usize = parts[0]
        .parse()
        .map_err(|_| "bad range start".to_string())?;
    let b: usize = parts[1].parse().map_err(|_| "bad range end".to_string())?;
    let s: usize = parts[2].parse().map_err(|_| "bad range step".to_string())?;
    if s == 0 || b < a {
        return Err("empty dimension range".into());
    }
    Ok((a..=b).step_by(s).collect())
}

fn run_value(strategy: PathBuf) -> ExitCode {
    let s = match load_strategy(&strategy) {
        Ok(s) => s,
        Err(e) => return input_error(e),
    };
    let bv = i3322_value(&s);
    println!("{:.12}", bv.value);
    for (label, v) in &bv.terms {
        println!("  {label:<8} = {v:.12}");
    }
    ExitCode::SUCCESS
}

fn run_classical() -> ExitCode {
    let r = classical_max();
    println!("max = {}", r.max);
    println!(
        "maximizers = {} of {} assignments",
        r.maximizers.len(),
        r.evaluated
    );
    for (a, b) in &r.maximizers {
        println!(
            "  a=({},{},{}) b=({},{},{})",
            a[0], a[1], a[2], b[0], b[1], b[2]
        );
    }
    ExitCode::SUCCESS
}

fn run_seesaw(
    dim: usize,
    restarts: usize,
    seed: u64,
    schmidt: SchmidtMode,
    tol: f64,
    out: Option<PathBuf>,
) -> ExitCode {
    if dim == 0 || restarts == 0 {
        return input_error("--dim and --restarts must be positive");
    }
    let (best, best_value, best_index, converged, entropy) = match schmidt {
        SchmidtMode::Uniform => {
            let params = SeesawParams {
                tol,
                ..SeesawParams::default()
            };
            let out = seesaw_restarts(dim, restarts, seed, &params);
            let converged = out.summaries.iter().filter(|s| s.converged).count();
            let h = entanglement_entropy(out.best.schmidt()).expect("valid weights");
            (out.best, out.best_value, out.best_index, converged, h)
        }
        SchmidtMode::Free => {
            if dim < 2 {
                return input_error("--schmidt free requires --dim >= 2");
            }
            let params = SchmidtParams {
                tol,
                ..SchmidtParams::default()
            };
            let out = match schmidt_seesaw(dim, restarts, seed, &params) {
                Ok(o) => o,
                Err(e) => return input_error(e),
            };
            let converged = out.summaries.iter().filter(|s| s.converged).count();
            (
                out.best,
                out.best_value,
                out.best_index,
                converged,
                out.entropy,
            )
        }
    };
    println!("best value = {best_value:.12}");
    println!("best restart = {best_index}");
    println!("converged restarts = {converged} of {restarts}");
    println!("entropy = {entropy:.12} bits");
    if let Some(path) = out {
        if let Err(e) = save_strategy(&best, &path) {
            return input_error(e);
        }
        println!("strategy written to {}", path.display());
    }
    ExitCode::SUCCESS
}

fn run_normal_form(
    branch: BranchArg,
    coeffs: Option<Vec<f64>>,
    optimize: bool,
    dim: Option<usize>,
    step: f64,
    seed: u64,
    out: Option<PathBuf>,
) -> ExitCode {
    let branch: Branch = branch.into();
    let spec = if optimize {
        let Some(dim) = dim else {
            return input_error("--optimize requires --dim");
        };
        let params = OptimizeParams {
            grid_step: step,
            seed,
            ..OptimizeParams::default()
        };
        match optimize_omega(branch, dim, &params) {
            Ok((spec, _)) => spec,
            Err(e) => return input_error(e),
        }
    } else {
        let Some(coeffs) = coeffs else {
            return input_error("provide --coeffs or --optimize");
        };
        let dim = match dim {
            Some(d) => d,
            None => match branch {
                Branch::Cyclic => 2 * coeffs.len(),
                Branch::ChainEven | Branch::ChainEvenExchanged => 2 * (coeffs.len() - 1),
                Branch::ChainOdd | Branch::ChainOddExchanged => 2 * coeffs.len() - 3,
            },
        };
        match NormalFormSpec::new(branch, dim, coeffs) {
            Ok(s) => s,
            Err(e) => return input_error(e),
        }
    };
    let strategy = match build_normal_form(&spec) {
        Ok(s) => s,
        Err(e) => return input_error(e),
    };
    let direct = i3322_value(&strategy).value;
    let coeff_strs: Vec<String> = spec.coeffs.iter().map(|c| format!("{c:.12}")).collect();
    println!("branch = {}", spec.branch);
    println!("dim = {}", spec.dim);
    println!("coeffs = {}", coeff_strs.join(","));
    match omega_closed(&spec) {
        Ok(closed) => {
            println!("closed-form value = {closed:.12}");
            println!("direct value      = {direct:.12}");
            println!("difference        = {:.3e}", (closed - direct).abs());
        }
        Err(_) => {
            println!("closed-form value = unsupported for this branch");
            println!("direct value      = {direct:.12}");
        }
    }
    if let Some(path) = out {
        if let Err(e) = save_strategy(&strategy, &path) {
            return input_error(e);
        }
        println!("strategy written to {}", path.display());
    }
    ExitCode::SUCCESS
}

fn run_bounds(claim: ClaimName, step: f64, csv: bool) -> ExitCode {
    if step <= 0.0 {
        return input_error("--step must be positive");
    }
    let report = match claim {
        ClaimName::FCap => verify_f_cap(step),
        ClaimName::Case1 => claim_case(1, step).expect("case 1 exists"),
        ClaimName::Case2 => claim_case(2, step).expect("case 2 exists"),
        ClaimName::Case3 => claim_case(3, step).expect("case 3 exists"),
        ClaimName::D4 => claim_d4(step),
    };
    print_bound_report(&report, csv)
}

fn run_certify(cert: String, samples: usize, seed: u64) -> ExitCode {
    let certificate = if cert == "builtin" || cert == "i3322-case3" {
        builtin_case3()
    } else {
        match load_certificate(&PathBuf::from(&cert)) {
            Ok(c) => c,
            Err(e) => return input_error(e),
        }
    };
    match verify(&certificate, samples, seed) {
        Ok(v) => {
            println!("certificate = {}", certificate.id);
            println!("{v}");
            if v.accepted {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => input_error(e),
    }
}

fn run_scan(
    branch: BranchArg,
    dims: String,
    step: f64,
    seed: u64,
    out: Option<PathBuf>,
) -> ExitCode {
    let branch: Branch = branch.into();
    let dims = match parse_dims(&dims) {
        Ok(d) => d,
        Err(e) => return input_error(e),
    };
    let params = OptimizeParams {
        grid_step: step,
        seed,
        ..OptimizeParams::default()
    };
    let mut rows = vec!["dim,branch,value,coeffs".to_string()];
    for d in dims {
        match optimize_omega(branch, d, &params) {
            Ok((spec, value)) => {
                let coeffs: Vec<String> = spec.coeffs.iter().map(|c| format!("{c:.12}")).collect();
                rows.push(format!("{d},{branch},{value:.12},{}", coeffs.join(";")));
            }
            Err(e) => return input_error(e),
        }
    }
    let text = rows.join("\n") + "\n";
    print!("{text}");
    if let Some(path) = out {
        if let Err(e) = std::fs::write(&path, &text) {
            return input_error(e);
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Value { strategy } => run_value(strategy),
        Command::Classical => run_classical(),
        Command::Seesaw {
            dim,
            restarts,
            seed,
            schmidt,
            tol,
            out,
        } => run_seesaw(dim, restarts, seed, schmidt, tol, out),
        Command::NormalForm {
            branch,
            coeffs,
            optimize,
            dim,
            step,
            seed,
            out,
        } => run_normal_form(branch, coeffs, optimize, dim, step, seed, out),
        Command::Bounds { claim, step, csv } => run_bounds(claim, step, csv),
        Command::Certify {
            cert,
            samples,
            seed,
        } => run_certify(cert, samples, seed),
        Command::Scan {
            branch,
            dims,
            step,
            seed,
            out,
        } => run_scan(branch, dims, step, seed, out),
    }
}
