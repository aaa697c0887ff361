//! Rank-1 Fano host admissibility and the shipped classification tables.
//!
//! Tables are plain CSV with one header line:
//!
//! ```text
//! table_id,no,kx3,ky3,kyp3,alpha,beta,r,d,g,rp,dp,gp,e,status,ref
//! ```
//!
//! Numbers are integers, `p/q` fractions or decimals; columns that do not
//! apply to a table (curve data of a point leg, `kyp3` of a point-point
//! table) are left empty. Row numbers keep the gaps of the original
//! numbering.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::lattice::HostKind;
use crate::rational::{ParseRationalError, Printed, Rational};

pub const HEADER: [&str; 16] =
    ["table_id", "no", "kx3", "ky3", "kyp3", "alpha", "beta", "r", "d", "g", "rp", "dp", "gp", "e", "status", "ref"];

const GORENSTEIN_DEGREES: [(u32, &[i64]); 4] =
    [(1, &[2, 4, 6, 8, 10, 12, 14, 16, 18, 22]), (2, &[8, 16, 24, 32, 40]), (3, &[54]), (4, &[64])];

/// A rank-1 Fano threefold, reduced to its index and anticanonical degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOneFano {
    pub r: u32,
    pub minus_k3: Rational,
    pub gorenstein: bool,
}

impl RankOneFano {
    pub fn is_admissible(&self) -> bool {
        if !self.gorenstein {
            // a single 1/2(1,1,1) point: -K^3 lies in 1/2 + Z
            let doubled = &self.minus_k3 * Rational::from_integer(2.into());
            return self.minus_k3.is_positive() && doubled.is_integer() && !self.minus_k3.is_integer();
        }
        let Some(k3) = self.minus_k3.is_integer().then(|| self.minus_k3.to_integer().to_i64()).flatten() else {
            return false;
        };
        GORENSTEIN_DEGREES.iter().any(|(r, degrees)| *r == self.r && degrees.contains(&k3))
    }
}

/// Whether `(r, −K³)` is the index and degree of a smooth rank-1 Fano threefold.
pub fn validate_host(r: u32, minus_k3: &Rational) -> bool {
    RankOneFano { r, minus_k3: minus_k3.clone(), gorenstein: true }.is_admissible()
}

/// Admissibility of the base `Y` of a blow-up of the given kind.
///
/// Point blow-ups are normalized to `H = −K_Y`, so only the degree is
/// checked; `E5` bases are non-Gorenstein.
pub fn admissible_base(kind: HostKind, minus_ky3: &Rational) -> bool {
    match kind {
        HostKind::E1 { r, .. } => validate_host(r, minus_ky3),
        HostKind::E2 | HostKind::E3E4 => (1..=4).any(|r| validate_host(r, minus_ky3)),
        HostKind::E5 => RankOneFano { r: 1, minus_k3: minus_ky3.clone(), gorenstein: false }.is_admissible(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TableId {
    E1E1,
    E1E2,
    E1E34,
    E1E5,
    E2E2,
    E3E3,
    E5E5,
}

/// Which leg type a table fixes on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leg {
    Curve,
    E2,
    E3E4,
    E5,
}

impl TableId {
    pub const ALL: [TableId; 7] =
        [TableId::E1E1, TableId::E1E2, TableId::E1E34, TableId::E1E5, TableId::E2E2, TableId::E3E3, TableId::E5E5];

    pub fn token(&self) -> &'static str {
        match self {
            TableId::E1E1 => "E1E1",
            TableId::E1E2 => "E1E2",
            TableId::E1E34 => "E1E34",
            TableId::E1E5 => "E1E5",
            TableId::E2E2 => "E2E2",
            TableId::E3E3 => "E3E3",
            TableId::E5E5 => "E5E5",
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.token().to_ascii_lowercase())
    }

    /// Caption of the printed table.
    pub fn caption(&self) -> &'static str {
        match self {
            TableId::E1E1 => "E1-E1",
            TableId::E1E2 => "E1-E2",
            TableId::E1E34 => "E1-E3/E4",
            TableId::E1E5 => "E1-E5",
            TableId::E2E2 => "E2-E2",
            TableId::E3E3 => "E3/4-E3/4",
            TableId::E5E5 => "E5-E5",
        }
    }

    pub fn legs(&self) -> (Leg, Leg) {
        match self {
            TableId::E1E1 => (Leg::Curve, Leg::Curve),
            TableId::E1E2 => (Leg::Curve, Leg::E2),
            TableId::E1E34 => (Leg::Curve, Leg::E3E4),
            TableId::E1E5 => (Leg::Curve, Leg::E5),
            TableId::E2E2 => (Leg::E2, Leg::E2),
            TableId::E3E3 => (Leg::E3E4, Leg::E3E4),
            TableId::E5E5 => (Leg::E5, Leg::E5),
        }
    }

    /// Point-point tables print a single `−K_Y³` column shared by both legs.
    pub fn is_symmetric_point_table(&self) -> bool {
        self.legs().0 != Leg::Curve
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for TableId {
    type Err = CatalogError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s.chars().filter(|c| !matches!(c, '-' | '/' | '_')).collect::<String>().to_ascii_uppercase();
        let norm = match norm.as_str() {
            "E1E3E4" | "E1E3" => "E1E34",
            "E3E4E3E4" | "E34E34" => "E3E3",
            other => other,
        };
        TableId::ALL.into_iter().find(|t| t.token() == norm).ok_or_else(|| CatalogError::UnknownTable(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Exists,
    NotExists,
    Open,
}

impl Status {
    pub fn token(&self) -> &'static str {
        match self {
            Status::Exists => "exists",
            Status::NotExists => "not_exists",
            Status::Open => "open",
        }
    }
}

impl FromStr for Status {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "exists" => Ok(Status::Exists),
            "not_exists" => Ok(Status::NotExists),
            "open" => Ok(Status::Open),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("{source_name}: {source}")]
    Csv {
        source_name: String,
        #[source]
        source: csv::Error,
    },
    #[error("{0}: cannot read: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error("{source_name}: header must be `{}`", HEADER.join(","))]
    BadHeader { source_name: String },
    #[error("{source_name} line {line}: column {column}: {error}")]
    BadNumber { source_name: String, line: u64, column: &'static str, error: ParseRationalError },
    #[error("{source_name} line {line}: column {column}: {message}")]
    BadField { source_name: String, line: u64, column: &'static str, message: String },
    #[error("{source_name} line {line}: unknown status token {token:?}")]
    UnknownStatus { source_name: String, line: u64, token: String },
    #[error("duplicate row {table}:{no}")]
    DuplicateRow { table: TableId, no: u32 },
    #[error("unknown table {0:?}")]
    UnknownTable(String),
    #[error("row {table}:{no} lacks the {what} needed to infer its host")]
    RowKind { table: TableId, no: u32, what: &'static str },
}

/// One printed table row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub table: TableId,
    pub no: u32,
    pub kx3: Printed,
    pub ky3: Printed,
    pub kyp3: Option<Printed>,
    pub alpha: Printed,
    pub beta: Printed,
    pub r: Option<u32>,
    pub d: Option<u32>,
    pub g: Option<u32>,
    pub rp: Option<u32>,
    pub dp: Option<u32>,
    pub gp: Option<u32>,
    pub e: Printed,
    pub status: Status,
    pub reference: String,
}

fn leg_kind(leg: Leg, r: Option<u32>, d: Option<u32>, g: Option<u32>) -> Option<HostKind> {
    Some(match leg {
        Leg::Curve => HostKind::E1 { r: r?, d: d?, g: g? },
        Leg::E2 => HostKind::E2,
        Leg::E3E4 => HostKind::E3E4,
        Leg::E5 => HostKind::E5,
    })
}

impl TableRow {
    pub fn id(&self) -> String {
        format!("{}:{}", self.table.token().to_ascii_lowercase(), self.no)
    }

    pub fn host_kind(&self) -> Result<HostKind, CatalogError> {
        leg_kind(self.table.legs().0, self.r, self.d, self.g).ok_or(CatalogError::RowKind {
            table: self.table,
            no: self.no,
            what: "host curve data (r, d, g)",
        })
    }

    /// The extremal type of `X⁺ → Y⁺`, described as a blow-up of `Y⁺`.
    pub fn target_kind(&self) -> Result<HostKind, CatalogError> {
        leg_kind(self.table.legs().1, self.rp, self.dp, self.gp).ok_or(CatalogError::RowKind {
            table: self.table,
            no: self.no,
            what: "target curve data (rp, dp, gp)",
        })
    }

    /// `−K_{Y⁺}³` as printed, or the shared `−K_Y³` column of point-point tables.
    pub fn printed_target_degree(&self) -> Option<&Printed> {
        match &self.kyp3 {
            Some(p) => Some(p),
            None if self.table.is_symmetric_point_table() => Some(&self.ky3),
            None => None,
        }
    }

    fn fields(&self) -> [String; 16] {
        let num = |v: &Option<u32>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.table.token().to_string(),
            self.no.to_string(),
            self.kx3.render(),
            self.ky3.render(),
            self.kyp3.as_ref().map(Printed::render).unwrap_or_default(),
            self.alpha.render(),
            self.beta.render(),
            num(&self.r),
            num(&self.d),
            num(&self.g),
            num(&self.rp),
            num(&self.dp),
            num(&self.gp),
            self.e.render(),
            self.status.token().to_string(),
            self.reference.clone(),
        ]
    }
}

/// JSON shape of a row; values keep their printed spelling.
#[derive(Debug, Clone, Serialize)]
pub struct RowRecord {
    pub table_id: String,
    pub no: u32,
    pub kx3: String,
    pub ky3: String,
    pub kyp3: Option<String>,
    pub alpha: String,
    pub beta: String,
    pub r: Option<u32>,
    pub d: Option<u32>,
    pub g: Option<u32>,
    pub rp: Option<u32>,
    pub dp: Option<u32>,
    pub gp: Option<u32>,
    pub e: String,
    pub status: Status,
    #[serde(rename = "ref")]
    pub reference: String,
}

impl From<&TableRow> for RowRecord {
    fn from(row: &TableRow) -> Self {
        RowRecord {
            table_id: row.table.token().to_string(),
            no: row.no,
            kx3: row.kx3.render(),
            ky3: row.ky3.render(),
            kyp3: row.kyp3.as_ref().map(Printed::render),
            alpha: row.alpha.render(),
            beta: row.beta.render(),
            r: row.r,
            d: row.d,
            g: row.g,
            rp: row.rp,
            dp: row.dp,
            gp: row.gp,
            e: row.e.render(),
            status: row.status,
            reference: row.reference.clone(),
        }
    }
}

struct FieldReader<'a> {
    record: &'a csv::StringRecord,
    source_name: &'a str,
    line: u64,
}

impl FieldReader<'_> {
    fn raw(&self, idx: usize) -> &str {
        self.record.get(idx).unwrap_or("")
    }

    fn number(&self, idx: usize) -> Result<Printed, CatalogError> {
        Printed::parse(self.raw(idx)).map_err(|error| CatalogError::BadNumber {
            source_name: self.source_name.to_string(),
            line: self.line,
            column: HEADER[idx],
            error,
        })
    }

    fn opt_number(&self, idx: usize) -> Result<Option<Printed>, CatalogError> {
        if self.raw(idx).is_empty() {
            Ok(None)
        } else {
            self.number(idx).map(Some)
        }
    }

    fn opt_count(&self, idx: usize) -> Result<Option<u32>, CatalogError> {
        let raw = self.raw(idx);
        if raw.is_empty() {
            return Ok(None);
        }
        raw.parse::<u32>().map(Some).map_err(|_| self.bad(idx, format!("expected a nonnegative integer, got {raw:?}")))
    }

    fn bad(&self, idx: usize, message: String) -> CatalogError {
        CatalogError::BadField {
            source_name: self.source_name.to_string(),
            line: self.line,
            column: HEADER[idx],
            message,
        }
    }
}

fn check_presence(reader: &FieldReader<'_>, idx: usize, present: bool, wanted: bool) -> Result<(), CatalogError> {
    match (present, wanted) {
        (false, true) => Err(reader.bad(idx, "required for this table".into())),
        (true, false) => Err(reader.bad(idx, "must be empty for this table".into())),
        _ => Ok(()),
    }
}

fn parse_record(record: &csv::StringRecord, source_name: &str) -> Result<TableRow, CatalogError> {
    let line = record.position().map(|p| p.line()).unwrap_or(0);
    let reader = FieldReader { record, source_name, line };
    if record.len() != HEADER.len() {
        return Err(reader.bad(0, format!("expected {} fields, found {}", HEADER.len(), record.len())));
    }
    let table: TableId =
        reader.raw(0).parse().map_err(|_| reader.bad(0, format!("unknown table id {:?}", reader.raw(0))))?;
    let no = reader
        .raw(1)
        .parse::<u32>()
        .map_err(|_| reader.bad(1, format!("expected a row number, got {:?}", reader.raw(1))))?;
    let status_token = reader.raw(14);
    let status = status_token.parse().map_err(|_| CatalogError::UnknownStatus {
        source_name: source_name.to_string(),
        line,
        token: status_token.to_string(),
    })?;
    let row = TableRow {
        table,
        no,
        kx3: reader.number(2)?,
        ky3: reader.number(3)?,
        kyp3: reader.opt_number(4)?,
        alpha: reader.number(5)?,
        beta: reader.number(6)?,
        r: reader.opt_count(7)?,
        d: reader.opt_count(8)?,
        g: reader.opt_count(9)?,
        rp: reader.opt_count(10)?,
        dp: reader.opt_count(11)?,
        gp: reader.opt_count(12)?,
        e: reader.number(13)?,
        status,
        reference: reader.raw(15).to_string(),
    };

    let (host, target) = table.legs();
    let host_curve = host == Leg::Curve;
    let target_curve = target == Leg::Curve;
    check_presence(&reader, 4, row.kyp3.is_some(), host_curve)?;
    for (idx, v) in [(7, row.r), (8, row.d), (9, row.g)] {
        check_presence(&reader, idx, v.is_some(), host_curve)?;
    }
    for (idx, v) in [(10, row.rp), (11, row.dp), (12, row.gp)] {
        check_presence(&reader, idx, v.is_some(), target_curve)?;
    }
    Ok(row)
}

/// Parses table text. `source_name` only labels error messages.
pub fn parse_table(text: &str, source_name: &str) -> Result<Vec<TableRow>, CatalogError> {
    let csv_err = |source| CatalogError::Csv { source_name: source_name.to_string(), source };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_err)?;
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(CatalogError::BadHeader { source_name: source_name.to_string() });
    }
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let row = parse_record(&record, source_name)?;
        if !seen.insert((row.table, row.no)) {
            return Err(CatalogError::DuplicateRow { table: row.table, no: row.no });
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn load_table(path: &Path) -> Result<Vec<TableRow>, CatalogError> {
    let text = fs::read_to_string(path).map_err(|e| CatalogError::Io(path.to_path_buf(), e))?;
    parse_table(&text, &path.display().to_string())
}

/// Renders rows in the shipped file format.
pub fn render_table(rows: &[TableRow]) -> String {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    writer.write_record(HEADER).expect("write to Vec");
    for row in rows {
        writer.write_record(row.fields()).expect("write to Vec");
    }
    String::from_utf8(writer.into_inner().expect("flush Vec")).expect("utf-8 input")
}

const BUILTIN: [(TableId, &str); 7] = [
    (TableId::E1E1, include_str!("../data/e1e1.csv")),
    (TableId::E1E2, include_str!("../data/e1e2.csv")),
    (TableId::E1E34, include_str!("../data/e1e34.csv")),
    (TableId::E1E5, include_str!("../data/e1e5.csv")),
    (TableId::E2E2, include_str!("../data/e2e2.csv")),
    (TableId::E3E3, include_str!("../data/e3e3.csv")),
    (TableId::E5E5, include_str!("../data/e5e5.csv")),
];

/// Shipped file contents of one table.
pub fn builtin_source(id: TableId) -> &'static str {
    BUILTIN.iter().find(|(t, _)| *t == id).map(|(_, s)| *s).expect("all tables are shipped")
}

#[derive(Debug, Clone)]
pub struct Table {
    pub id: TableId,
    /// Exact file contents the rows were parsed from.
    pub source: String,
    pub rows: Vec<TableRow>,
}

/// All tables, keyed by [`TableId`] in [`TableId::ALL`] order.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub tables: Vec<Table>,
}

impl Catalog {
    pub fn builtin() -> Self {
        let tables = BUILTIN
            .iter()
            .map(|(id, text)| Table {
                id: *id,
                source: text.to_string(),
                rows: parse_table(text, &id.file_name()).expect("shipped tables parse"),
            })
            .collect();
        Catalog { tables }
    }

    /// Loads `<dir>/<table>.csv` for every table id.
    pub fn load_dir(dir: &Path) -> Result<Self, CatalogError> {
        let mut tables = Vec::new();
        for id in TableId::ALL {
            let path = dir.join(id.file_name());
            let source = fs::read_to_string(&path).map_err(|e| CatalogError::Io(path.clone(), e))?;
            let rows = parse_table(&source, &path.display().to_string())?;
            if let Some(row) = rows.iter().find(|r| r.table != id) {
                return Err(CatalogError::BadField {
                    source_name: path.display().to_string(),
                    line: 0,
                    column: "table_id",
                    message: format!("row {} belongs to {}, not {id}", row.no, row.table),
                });
            }
            tables.push(Table { id, source, rows });
        }
        Ok(Catalog { tables })
    }

    pub fn table(&self, id: TableId) -> Option<&Table> {
        self.tables.iter().find(|t| t.id == id)
    }

    pub fn rows(&self) -> impl Iterator<Item = &TableRow> {
        self.tables.iter().flat_map(|t| t.rows.iter())
    }

    pub fn find(&self, id: TableId, no: u32) -> Option<&TableRow> {
        self.table(id)?.rows.iter().find(|r| r.no == no)
    }

    /// Resolves ids like `e1e1:10`.
    pub fn resolve(&self, case: &str) -> Result<&TableRow, CatalogError> {
        let (table, no) = case.split_once(':').ok_or_else(|| CatalogError::UnknownTable(case.to_string()))?;
        let id: TableId = table.parse()?;
        let no: u32 = no.trim().parse().map_err(|_| CatalogError::UnknownTable(case.to_string()))?;
        self.find(id, no).ok_or_else(|| CatalogError::UnknownTable(case.to_string()))
    }
}

/// E1-E1 rows whose numerics also fit a link with a non-divisorial second
/// leg, so the E1-E1 type cannot be forced by the tables alone.
pub fn completion_ambiguity(id: TableId, no: u32) -> Option<&'static str> {
    match (id, no) {
        (TableId::E1E1, 59) | (TableId::E1E1, 80) => Some("E1-dP"),
        (TableId::E1E1, 61) => Some("E1-CB"),
        _ => None,
    }
}
