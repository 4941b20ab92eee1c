use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use polylog::coleman::a_coeffs;
use polylog::finite::finite_table_csv;
use polylog::identities::{e_coeffs, residue_mod};
use polylog::verify::{self, parse_replay, CheckKind, Matrix, Report, RunConfig};
use polylog::{Error, FiniteField};

#[derive(Parser)]
#[command(name = "polylog", version, about = "Finite and p-adic polylogarithm verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification: theorem, proposition1, corollary, maincong, remark,
    /// delprop, f-lemmas, identities, finite, or all.
    Verify {
        check: Option<String>,
        #[arg(long, default_value_t = 7)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Working precision A (digits).
        #[arg(long, env = "POLYLOG_PRECISION")]
        precision: Option<u32>,
        /// Riemann-sum level m.
        #[arg(long, env = "POLYLOG_RIEMANN")]
        riemann: Option<u32>,
        /// Series truncation order M.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Matrix for `verify all`.
        #[arg(long, default_value = "small")]
        matrix: String,
        /// A failing sample record (JSON text or a path to a file holding it).
        #[arg(long)]
        replay: Option<String>,
    },
    /// Print `z,li_n(z)` for every z in F_{p^k}.
    FiniteTable {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        n: u32,
    },
    /// Print the coefficients a_k and e_m, optionally reduced mod p.
    Coeffs {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn config_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn render(reports: &[Report], format: Format) -> String {
    match format {
        Format::Json if reports.len() == 1 => reports[0].to_json(),
        Format::Json => serde_json::to_string_pretty(reports).expect("reports serialize"),
        Format::Csv => {
            let mut out = String::new();
            for (i, r) in reports.iter().enumerate() {
                let csv = r.to_csv();
                let body = if i == 0 { &csv[..] } else { csv.split_once('\n').map_or("", |(_, b)| b) };
                out.push_str(body);
            }
            out
        }
        Format::Text => reports.iter().map(Report::to_text).collect(),
    }
}

fn finish(reports: &[Report], format: Format) -> ExitCode {
    let mut text = render(reports, format);
    if !text.ends_with('\n') {
        text.push('\n');
    }
    // a closed pipe downstream is not a verification failure
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    if reports.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CoeffRow {
    index: u32,
    value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    residue: Option<u64>,
}

#[derive(Serialize)]
struct Coeffs {
    n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
    a: Vec<CoeffRow>,
    e: Vec<CoeffRow>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            check,
            p,
            n,
            k,
            samples,
            seed,
            precision,
            riemann,
            order,
            format,
            trace,
            jobs,
            matrix,
            replay,
        } => {
            if let Some(arg) = replay {
                let text = std::fs::read_to_string(&arg).unwrap_or(arg);
                let report = match parse_replay(&text).and_then(|r| verify::replay(&r, trace)) {
                    Ok(r) => r,
                    Err(e) => return config_error(e),
                };
                return finish(&[report], format);
            }
            let Some(check) = check else {
                return config_error("a check name or --replay is required");
            };
            let configs = if check == "all" {
                let kind: Matrix = match matrix.parse() {
                    Ok(m) => m,
                    Err(e) => return config_error(e),
                };
                verify::matrix(kind, seed)
            } else {
                match check.parse::<CheckKind>() {
                    Ok(c) => vec![RunConfig::new(c, p, n, k).with_samples(samples).with_seed(seed)],
                    Err(e) => return config_error(e),
                }
            };
            let mut reports = Vec::with_capacity(configs.len());
            for mut cfg in configs {
                cfg.precision = precision.or(cfg.precision);
                cfg.riemann = riemann.or(cfg.riemann);
                cfg.order = order.or(cfg.order);
                cfg.trace = trace;
                cfg.jobs = jobs;
                match verify::run(&cfg) {
                    Ok(r) => reports.push(r),
                    Err(e) => return config_error(e),
                }
            }
            finish(&reports, format)
        }
        Command::FiniteTable { p, k, n } => match FiniteField::new(p, k) {
            Ok(field) => {
                let _ = std::io::stdout().lock().write_all(finite_table_csv(&field, n).as_bytes());
                ExitCode::SUCCESS
            }
            Err(e) => config_error(e),
        },
        Command::Coeffs { n, p, format } => {
            if let Some(p) = p {
                if !polylog::arith::is_prime(p) || p == 2 {
                    return config_error(Error::NotOddPrime(p));
                }
            }
            let e = match e_coeffs(n) {
                Ok(e) => e,
                Err(err) => return config_error(err),
            };
            let rows = |v: Vec<num_rational::BigRational>| -> Vec<CoeffRow> {
                v.iter()
                    .enumerate()
                    .map(|(i, q)| CoeffRow {
                        index: i as u32,
                        value: q.to_string(),
                        residue: p.and_then(|p| residue_mod(q, p)),
                    })
                    .collect()
            };
            let out = Coeffs { n, p, a: rows(a_coeffs(n)), e: rows(e) };
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out).expect("serializes")),
                Format::Csv => {
                    println!("name,index,value,residue");
                    for (name, list) in [("a", &out.a), ("e", &out.e)] {
                        for r in list {
                            let res = r.residue.map(|x| x.to_string()).unwrap_or_default();
                            println!("{name},{},{},{res}", r.index, r.value);
                        }
                    }
                }
                Format::Text => {
                    for (name, list) in [("a", &out.a), ("e", &out.e)] {
                        for r in list {
                            match (p, r.residue) {
                                (Some(p), Some(res)) => println!("{name}_{} = {} = {res} mod {p}", r.index, r.value),
                                (Some(p), None) => println!("{name}_{} = {} (not {p}-integral)", r.index, r.value),
                                _ => println!("{name}_{} = {}", r.index, r.value),
                            }
                        }
                    }
                }
            }
            ExitCode::SUCCESS
        }
    }
}
