//! Rendering of check reports, classifications and sweep tables.
//!
//! Reports are written with every float at 17 significant digits so that two
//! runs with the same configuration produce byte-identical files. Data files
//! (states, witnesses) read back through the ordinary serde parsers.

use std::fmt::Write as _;
use std::io;

use serde::Serialize;

use crate::verify::{CheckReport, Classification, SweepRow};

/// Float formatting with a fixed 17 significant digits.
pub fn fixed(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Compact JSON formatter writing floats as `d.dddddddddddddddde±x`.
#[derive(Debug, Default, Clone, Copy)]
struct FixedDigits;

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fixed(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// One-line JSON with 17-significant-digit floats; non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub const SWEEP_HEADER: &str = "gamma,rank,symmetric,expected,iid,consistent,max_deviation";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fixed(r.gamma),
            r.rank,
            r.symmetric,
            r.expected,
            r.iid,
            r.consistent,
            fixed(r.max_deviation)
        );
    }
    out
}

pub const REPORT_HEADER: &str = "name,passed,max_deviation,samples_run,witness";

pub fn reports_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.name,
            r.passed,
            fixed(r.max_deviation),
            r.samples_run,
            witness_kind(r)
        );
    }
    out
}

fn witness_kind(r: &CheckReport) -> String {
    r.witness
        .as_ref()
        .and_then(|w| serde_json::to_value(w).ok())
        .and_then(|v| v.get("kind").and_then(|k| k.as_str()).map(str::to_owned))
        .unwrap_or_default()
}

pub fn report_line(r: &CheckReport) -> String {
    let mark = if r.passed { "PASS" } else { "FAIL" };
    let mut line = format!("{mark} {:<24} max_dev={} samples={}", r.name, fixed(r.max_deviation), r.samples_run);
    if !r.passed {
        let kind = witness_kind(r);
        if !kind.is_empty() {
            let _ = write!(line, " witness={kind}");
        }
    }
    line
}

pub fn reports_human(reports: &[CheckReport]) -> String {
    reports.iter().map(|r| report_line(r) + "\n").collect()
}

pub fn classification_human(c: &Classification) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "gamma      {}", fixed(c.gamma));
    let _ = writeln!(out, "rank       {}", c.rank);
    let _ = writeln!(out, "symmetric  {}", c.symmetric);
    let _ = writeln!(out, "expected   {}", c.expected);
    let _ = writeln!(out, "iid        {}", c.iid);
    let _ = writeln!(out, "consistent {}", c.consistent);
    if let Some(ce) = &c.counterexample {
        let _ = writeln!(out, "counterexample ratio {} at eigenvector {}", fixed(ce.ratio), ce.j0);
    }
    out.push_str(&reports_human(&c.reports));
    out
}

pub fn classification_csv(c: &Classification) -> String {
    let mut out = sweep_csv(std::slice::from_ref(&SweepRow::from(c)));
    out.push_str(&reports_csv(&c.reports));
    out
}

pub fn sweep_human(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let count = |f: &dyn Fn(&SweepRow) -> bool| rows.iter().filter(|r| f(r)).count();
    let _ = writeln!(out, "states                {}", rows.len());
    let _ = writeln!(out, "symmetric             {}", count(&|r| r.symmetric));
    let _ = writeln!(out, "expected, not iid     {}", count(&|r| r.expected && !r.iid));
    let _ = writeln!(out, "not expected          {}", count(&|r| !r.expected));
    let _ = writeln!(out, "inconsistent          {}", count(&|r| !r.consistent));
    let worst = rows.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
    let _ = writeln!(out, "max residual          {}", fixed(worst));
    for (i, r) in rows.iter().enumerate().filter(|(_, r)| !r.consistent) {
        let _ = writeln!(out, "INCONSISTENT state {i}: gamma={} rank={}", fixed(r.gamma), r.rank);
    }
    out
}
