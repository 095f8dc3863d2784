//! `primecover audit`: batch audits over modulus ranges with deterministic
//! report output.

use crate::config::{parse_rational, RunConfig};
use crate::{CliError, CODE_CONFIG, CODE_LIMIT, CODE_MISMATCH};
use primecover_core as core;
use primecover_core::{
    enumerate_subgroups_of_index, factorize, sieve_primes, trouble_index_report, unit_group,
    Error, PrimeTable, Rational, Regime,
};
use rayon::prelude::*;
use serde_json::json;

/// Hard cap on the sieve size an audit run will allocate. Larger scan
/// ceilings are clamped by the core routines and surface as exceedance rows.
const SIEVE_CAP: u64 = 20_000_000;

pub struct AuditOutcome {
    pub output: String,
    pub exit: i32,
}

fn need(cfg: &RunConfig, field: Option<u64>, name: &str) -> Result<u64, CliError> {
    field.ok_or_else(|| CliError::config(format!("audit {:?} requires --{name}", cfg.kind)))
}

/// ceil(q^(num/den)) with an exact integer correction when the powers fit.
fn ceil_pow(q: u64, e: &Rational) -> u64 {
    let (num, den) = (e.num as u32, e.den as u32);
    let mut y = (q as f64).powf(e.value()).ceil() as u64;
    let lhs = |y: u64| (y as u128).checked_pow(den);
    if let Some(rhs) = (q as u128).checked_pow(num) {
        while y > 1 && lhs(y - 1).map_or(false, |l| l >= rhs) {
            y -= 1;
        }
        while lhs(y).map_or(false, |l| l < rhs) {
            y += 1;
        }
    }
    y
}

fn exit_for(err: &Error) -> i32 {
    match err {
        Error::LimitExceeded(_) | Error::SizeLimit(_) => CODE_LIMIT,
        Error::Domain(_) | Error::UnsupportedModulus(_) => CODE_CONFIG,
        _ => CODE_MISMATCH,
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn is_prime(q: u64) -> bool {
    let f = factorize(q);
    f.len() == 1 && f[0].1 == 1
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|e| format!("{e:.15}")).unwrap_or_default()
}

/// One modulus worth of report rows: JSON lines plus CSV lines, and the
/// worst exit code encountered.
struct TaskRows {
    json: Vec<String>,
    csv: Vec<String>,
    exit: i32,
}

impl TaskRows {
    fn error(kind: &str, q: u64, err: &Error) -> TaskRows {
        TaskRows {
            json: vec![json!({"kind": kind, "q": q, "error": err.to_string()}).to_string()],
            csv: vec![format!("{q},{}", csv_quote(&err.to_string()))],
            exit: exit_for(err),
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<AuditOutcome, CliError> {
    let kind = cfg
        .kind
        .clone()
        .ok_or_else(|| CliError::config("audit requires a kind".into()))?;
    match kind.as_str() {
        "trouble-indices" => return run_trouble(cfg),
        "cover" | "t1" | "p2" | "density" | "convolution" => {}
        other => {
            return Err(CliError::config(format!(
                "unknown audit kind `{other}` (expected cover|t1|p2|density|convolution|trouble-indices)"
            )))
        }
    }

    let q_lo = need(cfg, cfg.q_lo, "q-lo")?;
    let q_hi = need(cfg, cfg.q_hi, "q-hi")?;
    if q_lo < 3 || q_lo > q_hi {
        return Err(CliError::config(format!("empty or invalid range [{q_lo}, {q_hi}] (need 3 <= q-lo <= q-hi)")));
    }
    let format = cfg.format.clone().unwrap_or_else(|| "json".into());
    if format != "json" && format != "csv" {
        return Err(CliError::config(format!("unknown format `{format}`")));
    }

    // size the shared prime table for the largest scan this run can need
    let sieve_need = match kind.as_str() {
        "cover" => match (cfg.y, &cfg.exponent) {
            (Some(y), _) => y + 1,
            (None, Some(e)) => ceil_pow(q_hi, e) + 1,
            (None, None) => cfg.ceiling.unwrap_or(q_hi * q_hi) + 1,
        },
        "t1" => cfg.ceiling.unwrap_or(q_hi * q_hi * q_hi) + 1,
        "p2" => cfg.ceiling.unwrap_or(q_hi * q_hi) + 1,
        "density" => ceil_pow(q_hi, cfg.exponent.as_ref().unwrap_or(&Rational::new(3, 2))) + 1,
        "convolution" => need(cfg, cfg.x, "x")? + 1,
        _ => unreachable!(),
    };
    if matches!(kind.as_str(), "cover" | "density") && cfg.y.is_none() && sieve_need > SIEVE_CAP {
        return Err(CliError {
            code: CODE_LIMIT,
            message: format!("required sieve size {sieve_need} exceeds the cap {SIEVE_CAP}"),
        });
    }
    let pt = sieve_primes(sieve_need.clamp(1000, SIEVE_CAP)).map_err(CliError::from)?;

    let qs: Vec<u64> = (q_lo..=q_hi)
        .filter(|&q| match kind.as_str() {
            // the multiplicative audits only make sense for prime moduli
            "t1" | "p2" | "convolution" => is_prime(q),
            _ => true,
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::config(format!("cannot build thread pool: {e}")))?;
    let tasks: Vec<TaskRows> = pool.install(|| {
        qs.par_iter()
            .map(|&q| audit_one(&kind, q, cfg, &pt))
            .collect()
    });

    let mut output = String::new();
    let mut exit = 0;
    if format == "csv" {
        output.push_str(csv_header(&kind));
        output.push('\n');
    }
    for t in tasks {
        let lines = if format == "json" { &t.json } else { &t.csv };
        for line in lines {
            output.push_str(line);
            output.push('\n');
        }
        exit = exit.max(t.exit);
    }
    Ok(AuditOutcome { output, exit })
}

fn csv_header(kind: &str) -> &'static str {
    match kind {
        "cover" => "q,k,y,covered,min_exponent",
        "t1" => "q,y,least_prime,exponent",
        "p2" => "q,y,coset,representative,least_n,omega,exponent",
        "density" => "q,x,regime,eta,violating_fraction",
        "convolution" => "q,y,x,hypothesis_ok,identity_ok,s,s_expected",
        _ => "",
    }
}

fn subgroup_indices(cfg: &RunConfig, q: u64) -> Vec<u64> {
    match cfg.y {
        Some(y) => vec![y],
        None => (2..=5).collect(),
    }
    .into_iter()
    .filter(|&y| (q - 1) % y == 0)
    .collect()
}

fn audit_one(kind: &str, q: u64, cfg: &RunConfig, pt: &PrimeTable) -> TaskRows {
    let units = match unit_group(q) {
        Ok(u) => u,
        Err(e) => return TaskRows::error(kind, q, &e),
    };
    let mut rows = TaskRows { json: Vec::new(), csv: Vec::new(), exit: 0 };
    match kind {
        "cover" => {
            let result = match (cfg.y, &cfg.exponent) {
                (Some(_), _) | (None, Some(_)) => {
                    let y = cfg.y.unwrap_or_else(|| ceil_pow(q, cfg.exponent.as_ref().unwrap()));
                    core::verify_product_cover(pt, &units, y, cfg.k.unwrap_or(3)).map(|r| {
                        rows.json.push(
                            json!({"kind": "cover", "q": q,
                                   "params": {"k": r.k, "y": y},
                                   "verdict": r})
                            .to_string(),
                        );
                        rows.csv.push(format!("{q},{},{y},{},", r.k, r.covered));
                    })
                }
                (None, None) => {
                    let ceiling = cfg.ceiling.unwrap_or(q * q);
                    core::min_cover_exponent(pt, &units, cfg.k.unwrap_or(3), ceiling).map(|r| {
                        rows.csv.push(format!(
                            "{q},{},{},{},{}",
                            cfg.k.unwrap_or(3),
                            r.y_star.map(|y| y.to_string()).unwrap_or_default(),
                            r.y_star.is_some(),
                            fmt_opt_f64(r.exponent)
                        ));
                        rows.json.push(
                            json!({"kind": "cover", "q": q,
                                   "params": {"k": cfg.k.unwrap_or(3), "ceiling": ceiling},
                                   "verdict": r})
                            .to_string(),
                        );
                    })
                }
            };
            if let Err(e) = result {
                return TaskRows::error(kind, q, &e);
            }
        }
        "t1" | "p2" | "convolution" => {
            for y in subgroup_indices(cfg, q) {
                let subs = match enumerate_subgroups_of_index(units.group(), y) {
                    Ok(s) => s,
                    Err(e) => return TaskRows::error(kind, q, &e),
                };
                for h in &subs {
                    let res = match kind {
                        "t1" => core::least_prime_in_subgroup(pt, &units, h, cfg.ceiling.unwrap_or(q * q * q))
                            .map(|r| {
                                rows.csv.push(format!(
                                    "{q},{y},{},{}",
                                    r.least_prime.map(|p| p.to_string()).unwrap_or_default(),
                                    fmt_opt_f64(r.exponent)
                                ));
                                rows.json.push(
                                    json!({"kind": "t1", "q": q, "params": {"y": y}, "verdict": r})
                                        .to_string(),
                                );
                            }),
                        "p2" => core::least_p2_in_cosets(
                            pt,
                            &units,
                            h,
                            cfg.ceiling.unwrap_or(q * q),
                            cfg.mode.as_deref() == Some("squarefree"),
                        )
                        .map(|r| {
                            for row in &r.rows {
                                rows.csv.push(format!(
                                    "{q},{y},{},{},{},{},{}",
                                    row.coset,
                                    row.representative,
                                    row.least_n.map(|n| n.to_string()).unwrap_or_default(),
                                    row.omega.map(|n| n.to_string()).unwrap_or_default(),
                                    fmt_opt_f64(row.exponent)
                                ));
                            }
                            rows.json.push(
                                json!({"kind": "p2", "q": q, "params": {"y": y}, "verdict": r})
                                    .to_string(),
                            );
                        }),
                        _ => {
                            let x = cfg.x.unwrap();
                            core::convolution_identity_check(pt, &units, h, x).map(|r| {
                                rows.csv.push(format!(
                                    "{q},{y},{x},{},{},{},{}",
                                    r.hypothesis_ok,
                                    r.identity_ok.map(|b| b.to_string()).unwrap_or_default(),
                                    fmt_opt_f64(r.s),
                                    fmt_opt_f64(r.s_expected)
                                ));
                                rows.json.push(
                                    json!({"kind": "convolution", "q": q,
                                           "params": {"y": y, "x": x}, "verdict": r})
                                    .to_string(),
                                );
                            })
                        }
                    };
                    if let Err(e) = res {
                        rows.json.push(
                            json!({"kind": kind, "q": q, "params": {"y": y}, "error": e.to_string()})
                                .to_string(),
                        );
                        rows.csv.push(format!("{q},{}", csv_quote(&e.to_string())));
                        rows.exit = rows.exit.max(exit_for(&e));
                    }
                }
            }
        }
        "density" => {
            let e = cfg.exponent.clone().unwrap_or(Rational::new(3, 2));
            let x = ceil_pow(q, &e);
            let regime = match cfg.mode.as_deref().unwrap_or("iwa") {
                "iwa" => Regime::Iwa,
                "mika" => Regime::Mika,
                other => {
                    return TaskRows::error(
                        kind,
                        q,
                        &Error::Domain(format!("unknown density regime `{other}`")),
                    )
                }
            };
            match core::density_probe(pt, &units, x, regime, 0.0, 6.0) {
                Ok(r) => {
                    rows.csv.push(format!(
                        "{q},{x},{:?},{}/{},{:.15}",
                        regime, r.eta.num, r.eta.den, r.violating_fraction
                    ));
                    rows.json.push(
                        json!({"kind": "density", "q": q, "params": {"x": x}, "verdict": r})
                            .to_string(),
                    );
                }
                Err(e) => return TaskRows::error(kind, q, &e),
            }
        }
        _ => unreachable!(),
    }
    rows
}

fn run_trouble(cfg: &RunConfig) -> Result<AuditOutcome, CliError> {
    let eta = cfg
        .eta
        .clone()
        .ok_or_else(|| CliError::config("trouble-indices requires --eta NUM/DEN".into()))?;
    let ymax = cfg.y0.unwrap_or(32);
    let report = trouble_index_report(&eta, ymax).map_err(CliError::from)?;
    let format = cfg.format.clone().unwrap_or_else(|| "json".into());
    let mut output = String::new();
    match format.as_str() {
        "json" => {
            output.push_str(
                &json!({"kind": "trouble-indices",
                        "params": {"eta": format!("{}/{}", eta.num, eta.den), "ymax": ymax},
                        "verdict": report})
                .to_string(),
            );
            output.push('\n');
        }
        "csv" => {
            output.push_str("list,values\n");
            let join = |v: &[u64]| v.iter().map(|y| y.to_string()).collect::<Vec<_>>().join(",");
            output.push_str(&format!("arithmetic_strict,{}\n", csv_quote(&join(&report.arithmetic_strict))));
            output.push_str(&format!("arithmetic_nonstrict,{}\n", csv_quote(&join(&report.arithmetic_nonstrict))));
            output.push_str(&format!("search,{}\n", csv_quote(&join(&report.search))));
            output.push_str(&format!("reference,{}\n", csv_quote(&join(&report.reference))));
            for d in &report.discrepancies {
                output.push_str(&format!("discrepancy_{},{}\n", d.y, csv_quote(&d.note)));
            }
        }
        other => return Err(CliError::config(format!("unknown format `{other}`"))),
    }
    Ok(AuditOutcome { output, exit: 0 })
}

/// Parse-and-validate helper used by main for --exponent/--eta strings.
pub fn rational_flag(value: &Option<String>) -> Result<Option<Rational>, CliError> {
    match value {
        None => Ok(None),
        Some(s) => parse_rational(s).map(Some).map_err(CliError::config),
    }
}
