//! Verification reports and table regeneration.

use std::fmt::Write as _;

use serde::Serialize;

use crate::catalog::{completion_ambiguity, render_table, Catalog, Status, Table, TableId, TableRow};
use crate::link::{row_host_model, verify_link, ColumnCheck};
use crate::rational::{show, Printed, Rational};
use crate::smallness::{certify_smallness, CertificateRecord, SearchOptions, Verdict};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Reference string of rows that must certify as small.
pub const SMALL_CLAIM_REF: &str = "Thm 1";

/// Which rows a report covers. `None` means everything.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Selection {
    pub tables: Option<Vec<TableId>>,
    pub rows: Option<Vec<u32>>,
}

impl Selection {
    pub fn all() -> Self {
        Selection::default()
    }

    fn wants_table(&self, id: TableId) -> bool {
        self.tables.as_ref().is_none_or(|t| t.contains(&id))
    }

    fn wants_row(&self, no: u32) -> bool {
        self.rows.as_ref().is_none_or(|r| r.contains(&no))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    /// Numerics agree; the row is an open case of the classification.
    Open,
}

#[derive(Debug, Clone, Serialize)]
pub struct ColumnResult {
    pub column: &'static str,
    pub printed: Option<String>,
    pub computed: Option<String>,
    pub pass: bool,
}

impl From<&ColumnCheck> for ColumnResult {
    fn from(c: &ColumnCheck) -> Self {
        ColumnResult {
            column: c.column,
            printed: c.expected.as_ref().map(show),
            computed: c.computed.as_ref().map(show),
            pass: c.passed(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RowResult {
    pub id: String,
    pub table_id: String,
    pub no: u32,
    pub status: Status,
    #[serde(rename = "ref")]
    pub reference: String,
    pub outcome: Outcome,
    pub columns: Vec<ColumnResult>,
    pub error: Option<String>,
    pub certificate: Option<CertificateRecord>,
    pub certificate_error: Option<String>,
    /// Another link type fits the same numerics; independent of smallness.
    pub completion_ambiguity: Option<&'static str>,
}

impl RowResult {
    pub fn column(&self, name: &str) -> Option<&ColumnResult> {
        self.columns.iter().find(|c| c.column == name)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub open: usize,
    /// Rows of the selected tables left out by the row filter.
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub engine_version: &'static str,
    pub counts: Counts,
    pub rows: Vec<RowResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.counts.fail == 0
    }

    pub fn row(&self, id: &str) -> Option<&RowResult> {
        self.rows.iter().find(|r| r.id == id)
    }
}

fn verify_one(row: &TableRow, opts: &SearchOptions) -> RowResult {
    let mut result = RowResult {
        id: row.id(),
        table_id: row.table.token().to_string(),
        no: row.no,
        status: row.status,
        reference: row.reference.clone(),
        outcome: Outcome::Pass,
        columns: Vec::new(),
        error: None,
        certificate: None,
        certificate_error: None,
        completion_ambiguity: completion_ambiguity(row.table, row.no),
    };

    let model = match row_host_model(row) {
        Ok(m) => m,
        Err(e) => {
            result.error = Some(e.to_string());
            result.outcome = Outcome::Fail;
            return result;
        }
    };
    match verify_link(&model, row) {
        Ok(v) => result.columns = v.checks.iter().map(ColumnResult::from).collect(),
        Err(e) => result.error = Some(e.to_string()),
    }

    if row.table == TableId::E1E1 {
        match certify_smallness(&model, Some(row.id()), opts) {
            Ok(c) => result.certificate = Some(c.record()),
            Err(e) => result.certificate_error = Some(e.to_string()),
        }
        if row.reference == SMALL_CLAIM_REF {
            let certified = result.certificate.as_ref().map(|c| c.verdict);
            result.columns.push(ColumnResult {
                column: "smallness",
                printed: Some("SmallCertified".into()),
                computed: certified.map(|v| format!("{v:?}")),
                pass: certified == Some(Verdict::SmallCertified),
            });
        }
    }

    let failed = result.error.is_some() || result.columns.iter().any(|c| !c.pass);
    result.outcome = if failed {
        Outcome::Fail
    } else if row.status == Status::Open {
        Outcome::Open
    } else {
        Outcome::Pass
    };
    result
}

pub fn verify_catalog(catalog: &Catalog, selection: &Selection, opts: &SearchOptions) -> VerificationReport {
    let mut counts = Counts::default();
    let mut rows = Vec::new();
    for table in catalog.tables.iter().filter(|t| selection.wants_table(t.id)) {
        for row in &table.rows {
            if !selection.wants_row(row.no) {
                counts.skipped += 1;
                continue;
            }
            let r = verify_one(row, opts);
            match r.outcome {
                Outcome::Pass => counts.pass += 1,
                Outcome::Fail => counts.fail += 1,
                Outcome::Open => counts.open += 1,
            }
            rows.push(r);
        }
    }
    VerificationReport { engine_version: ENGINE_VERSION, counts, rows }
}

fn column_summary(c: &ColumnResult) -> String {
    let dash = || "-".to_string();
    let computed = c.computed.clone().unwrap_or_else(dash);
    let printed = c.printed.clone().unwrap_or_else(dash);
    if c.pass {
        format!("{} {computed}={printed}", c.column)
    } else {
        format!("{} {computed}!={printed}", c.column)
    }
}

const SHOWN_COLUMNS: [&str; 5] = ["kx3", "kyp3", "alpha", "beta", "e"];

pub fn render_human(report: &VerificationReport) -> String {
    let mut out = String::new();
    writeln!(out, "fano2 {} verify", report.engine_version).unwrap();
    for row in &report.rows {
        let outcome = match row.outcome {
            Outcome::Pass => "pass",
            Outcome::Fail => "FAIL",
            Outcome::Open => "open",
        };
        let mut parts: Vec<String> =
            row.columns.iter().filter(|c| SHOWN_COLUMNS.contains(&c.column) || !c.pass).map(column_summary).collect();
        if let Some(err) = &row.error {
            parts.push(format!("error: {err}"));
        }
        write!(out, "{:<10} {outcome}  {}", row.id, parts.join("  ")).unwrap();
        if let Some(c) = &row.certificate {
            let reason = c.curve_reason.map(|r| r.token()).unwrap_or("-");
            write!(out, "  | {:?} square={} curve={reason}", c.verdict, c.square).unwrap();
        } else if let Some(err) = &row.certificate_error {
            write!(out, "  | no certificate: {err}").unwrap();
        }
        if let Some(alt) = row.completion_ambiguity {
            write!(out, "  | ambiguous completion ({alt})").unwrap();
        }
        out.push('\n');
    }
    let c = report.counts;
    writeln!(out, "pass {}  fail {}  open {}  skipped {}", c.pass, c.fail, c.open, c.skipped).unwrap();
    out
}

pub fn render_json(report: &VerificationReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("plain data serializes");
    s.push('\n');
    s
}

/// One line per recomputed column.
pub fn render_csv(report: &VerificationReport) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["id", "outcome", "column", "printed", "computed", "pass"]).unwrap();
    for row in &report.rows {
        let outcome = serde_json::to_value(row.outcome).unwrap();
        let outcome = outcome.as_str().unwrap_or_default();
        for c in &row.columns {
            w.write_record([
                row.id.as_str(),
                outcome,
                c.column,
                c.printed.as_deref().unwrap_or(""),
                c.computed.as_deref().unwrap_or(""),
                if c.pass { "true" } else { "false" },
            ])
            .unwrap();
        }
        if let Some(err) = &row.error {
            w.write_record([row.id.as_str(), outcome, "error", "", err.as_str(), "false"]).unwrap();
        }
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn recomputed(printed: &Printed, value: Option<&Rational>) -> Printed {
    match value {
        Some(v) => Printed { value: v.clone(), notation: printed.notation },
        None => printed.clone(),
    }
}

/// The row with its derived columns replaced by engine values, each in the
/// notation the original used. Rows the engine cannot evaluate come back
/// unchanged.
pub fn regenerate_row(row: &TableRow) -> TableRow {
    let Ok(v) = row_host_model(row).and_then(|m| verify_link(&m, row)) else {
        return row.clone();
    };
    let mut out = row.clone();
    out.kx3 = recomputed(&row.kx3, v.computed("kx3"));
    if let Some(kyp3) = &row.kyp3 {
        out.kyp3 = Some(recomputed(kyp3, v.computed("kyp3")));
    }
    out.alpha = recomputed(&row.alpha, v.computed("alpha"));
    out.beta = recomputed(&row.beta, v.computed("beta"));
    out.e = recomputed(&row.e, v.computed("e"));
    out
}

/// Regenerated file contents for one table.
pub fn regenerate_table(table: &Table) -> String {
    let rows: Vec<TableRow> = table.rows.iter().map(regenerate_row).collect();
    render_table(&rows)
}

/// Regenerated rows as JSON records.
pub fn regenerate_table_json(table: &Table) -> String {
    let rows: Vec<crate::catalog::RowRecord> = table.rows.iter().map(regenerate_row).map(|r| (&r).into()).collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("plain data serializes");
    s.push('\n');
    s
}
