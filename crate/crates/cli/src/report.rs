use serde::Serialize;

use qtheta_core::catalog::{IdentityCase, Status, VerificationReport};
use qtheta_core::Eisenstein;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Serialize)]
struct Coeff {
    a: String,
    b: String,
}

impl From<&Eisenstein> for Coeff {
    fn from(c: &Eisenstein) -> Self {
        Coeff {
            a: c.a.to_string(),
            b: c.b.to_string(),
        }
    }
}

#[derive(Serialize)]
struct MismatchRecord {
    exponent_num: i64,
    exponent_den: i64,
    lhs: Coeff,
    rhs: Coeff,
    detail: Option<String>,
}

#[derive(Serialize)]
struct ReportRecord<'a> {
    id: &'a str,
    status: &'static str,
    checked_order: i64,
    first_mismatch: Option<MismatchRecord>,
    error: Option<&'a str>,
    wall_time_ms: u128,
}

fn record(r: &VerificationReport) -> ReportRecord<'_> {
    ReportRecord {
        id: &r.id,
        status: r.status.as_str(),
        checked_order: r.checked_order,
        first_mismatch: r.first_mismatch.as_ref().map(|m| MismatchRecord {
            exponent_num: m.exponent_num,
            exponent_den: m.exponent_den,
            lhs: (&m.lhs).into(),
            rhs: (&m.rhs).into(),
            detail: m.detail.clone(),
        }),
        error: r.error.as_deref(),
        wall_time_ms: r.wall_time_ms,
    }
}

pub const CSV_HEADER: [&str; 12] = [
    "id",
    "status",
    "checked_order",
    "exponent_num",
    "exponent_den",
    "lhs_a",
    "lhs_b",
    "rhs_a",
    "rhs_b",
    "detail",
    "error",
    "wall_time_ms",
];

fn csv_text<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
            if i + 1 == cells.len() {
                s.push_str(c);
            } else {
                s.push_str(&format!("{:<w$}  ", c, w = w));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

fn coeff_text(c: &Eisenstein) -> String {
    c.to_string()
}

pub fn emit_reports(reports: &[VerificationReport], format: Format) -> String {
    match format {
        Format::Json => {
            let recs: Vec<_> = reports.iter().map(record).collect();
            serde_json::to_string_pretty(&recs).expect("serializable") + "\n"
        }
        Format::Csv => csv_text(
            &CSV_HEADER,
            reports.iter().map(|r| {
                let m = r.first_mismatch.as_ref();
                vec![
                    r.id.clone(),
                    r.status.as_str().to_string(),
                    r.checked_order.to_string(),
                    m.map(|m| m.exponent_num.to_string()).unwrap_or_default(),
                    m.map(|m| m.exponent_den.to_string()).unwrap_or_default(),
                    m.map(|m| m.lhs.a.to_string()).unwrap_or_default(),
                    m.map(|m| m.lhs.b.to_string()).unwrap_or_default(),
                    m.map(|m| m.rhs.a.to_string()).unwrap_or_default(),
                    m.map(|m| m.rhs.b.to_string()).unwrap_or_default(),
                    m.and_then(|m| m.detail.clone()).unwrap_or_default(),
                    r.error.clone().unwrap_or_default(),
                    r.wall_time_ms.to_string(),
                ]
            }),
        ),
        Format::Text => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    let note = match (&r.first_mismatch, &r.error) {
                        (Some(m), _) => {
                            let at = match &m.detail {
                                Some(d) => format!(" [{}]", d),
                                None => String::new(),
                            };
                            let e = if m.exponent_den == 1 {
                                m.exponent_num.to_string()
                            } else {
                                format!("({}/{})", m.exponent_num, m.exponent_den)
                            };
                            format!("q^{}{}: lhs {} rhs {}", e, at, coeff_text(&m.lhs), coeff_text(&m.rhs))
                        }
                        (None, Some(e)) => e.clone(),
                        (None, None) => String::new(),
                    };
                    vec![
                        r.id.clone(),
                        r.status.as_str().to_string(),
                        r.checked_order.to_string(),
                        format!("{}ms", r.wall_time_ms),
                        note,
                    ]
                })
                .collect();
            table(&["ID", "STATUS", "ORDER", "TIME", "FIRST MISMATCH"], &rows)
        }
    }
}

#[derive(Serialize)]
struct CaseRecord<'a> {
    id: &'a str,
    description: &'a str,
    kind: &'static str,
    default_order: i64,
    exponent_den: i64,
    anchor: &'a str,
}

pub fn emit_cases(cases: &[IdentityCase], format: Format) -> String {
    let recs: Vec<CaseRecord> = cases
        .iter()
        .map(|c| CaseRecord {
            id: &c.id,
            description: &c.description,
            kind: c.kind.as_str(),
            default_order: c.default_order,
            exponent_den: c.exponent_den,
            anchor: &c.anchor,
        })
        .collect();
    let rows = || {
        recs.iter().map(|c| {
            vec![
                c.id.to_string(),
                c.kind.to_string(),
                c.default_order.to_string(),
                c.exponent_den.to_string(),
                c.description.to_string(),
                c.anchor.to_string(),
            ]
        })
    };
    let header = ["id", "kind", "default_order", "exponent_den", "description", "anchor"];
    match format {
        Format::Json => serde_json::to_string_pretty(&recs).expect("serializable") + "\n",
        Format::Csv => csv_text(&header, rows()),
        Format::Text => {
            let rows: Vec<Vec<String>> = rows()
                .map(|mut r| {
                    r.truncate(5);
                    r
                })
                .collect();
            table(&["ID", "KIND", "ORDER", "DEN", "DESCRIPTION"], &rows)
        }
    }
}

pub fn all_pass(reports: &[VerificationReport]) -> bool {
    reports.iter().all(|r| r.status == Status::Pass)
}
