//! CSV and JSON emission of run records.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;

use crate::config::Format;
use crate::run::RunRecord;

/// 17 significant digits, `NaN` for missing values.
fn num(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.16e}"),
        None => "NaN".to_string(),
    }
}

pub fn to_csv(r: &RunRecord) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# respq {}", r.version);
    let _ = writeln!(s, "# config_sha256 {}", r.config_sha256);
    let _ = writeln!(s, "# seed {}", r.seed);
    if r.shift_ev != 0.0 {
        let _ = writeln!(s, "# shift {} hartree ({} eV)", num(Some(r.shift_hartree)), num(Some(r.shift_ev)));
    }
    s.push_str("omega,re_chi,im_chi,residual,sigma_abs");
    if r.oracle.is_some() {
        s.push_str(",re_chi_oracle,im_chi_oracle,sigma_abs_oracle");
    }
    s.push('\n');
    for (k, row) in r.rows.iter().enumerate() {
        let _ = write!(
            s,
            "{},{},{},{},{}",
            num(Some(row.omega)),
            num(row.re_chi),
            num(row.im_chi),
            num(row.residual),
            num(row.sigma_abs)
        );
        if let Some(o) = &r.oracle {
            let or = &o.rows[k];
            let _ = write!(s, ",{},{},{}", num(Some(or.re_chi)), num(Some(or.im_chi)), num(Some(or.sigma_abs)));
        }
        s.push('\n');
    }
    if let Some(o) = &r.oracle {
        let _ = writeln!(s, "# max_abs_delta_chi {}", num(o.max_abs_delta));
    }
    if !r.failures.is_empty() {
        let _ = writeln!(s, "# failures: omega,axis,error");
        for f in &r.failures {
            let _ = writeln!(s, "# {},{},{}", num(Some(f.omega)), f.axis, f.error.replace('\n', " "));
        }
    }
    s
}

pub fn to_json(r: &RunRecord) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(r)? + "\n")
}

pub fn from_json(text: &str) -> anyhow::Result<RunRecord> {
    Ok(serde_json::from_str(text)?)
}

pub fn render(r: &RunRecord, format: Format) -> anyhow::Result<String> {
    match format {
        Format::Csv => Ok(to_csv(r)),
        Format::Json => to_json(r),
    }
}

pub fn emit(r: &RunRecord, format: Format, path: &Path) -> anyhow::Result<()> {
    let text = render(r, format)?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
