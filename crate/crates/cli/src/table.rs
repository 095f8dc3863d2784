//! `primecover table`: reproduce the exceptional-set size table and diff it
//! against the embedded reference fixture.

use crate::{CliError, CODE_MISMATCH};
use primecover_core::{diff_table_against_reference, table_rows};
use serde_json::json;

pub struct TableOutcome {
    pub output: String,
    pub diffs: Vec<String>,
    pub exit: i32,
}

pub fn run(ell_max: u64, format: &str) -> Result<TableOutcome, CliError> {
    if ell_max > primecover_core::DEFAULT_SEARCH_MAX {
        return Err(CliError {
            code: crate::CODE_LIMIT,
            message: format!(
                "ell-max {ell_max} exceeds the search maximum {}",
                primecover_core::DEFAULT_SEARCH_MAX
            ),
        });
    }
    let rows = table_rows(ell_max).map_err(CliError::from)?;
    let mut output = String::new();
    match format {
        "csv" => {
            output.push_str("ell,sizes\n");
            for (ell, sizes) in &rows {
                let joined = sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
                if sizes.len() > 1 {
                    output.push_str(&format!("{ell},\"{joined}\"\n"));
                } else {
                    output.push_str(&format!("{ell},{joined}\n"));
                }
            }
        }
        "json" => {
            for (ell, sizes) in &rows {
                output.push_str(&json!({"ell": ell, "sizes": sizes}).to_string());
                output.push('\n');
            }
        }
        other => return Err(CliError::config(format!("unknown format `{other}`"))),
    }
    let diffs = diff_table_against_reference(&rows, ell_max);
    let exit = if diffs.is_empty() { 0 } else { CODE_MISMATCH };
    Ok(TableOutcome { output, diffs, exit })
}
