//! Serialisation of scan rows as CSV, JSON or an aligned text table.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::quasilocal::ScanRow;

pub const CSV_HEADER: &str = "m_adm,branch,gamma,k_h,min_K,int_He,int_H,mass_fb_by,hm_lhs,hm_rhs,boundary_gap";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Pretty,
}

fn to_io(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

pub fn to_csv(rows: &[ScanRow]) -> io::Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    // Written by hand so the header is present even with no rows.
    w.write_record(CSV_HEADER.split(',')).map_err(to_io)?;
    for row in rows {
        w.serialize(row).map_err(to_io)?;
    }
    w.into_inner().map_err(|e| io::Error::other(e.to_string()))
}

pub fn to_json(rows: &[ScanRow]) -> io::Result<Vec<u8>> {
    let mut buf = serde_json::to_vec_pretty(rows)?;
    buf.push(b'\n');
    Ok(buf)
}

pub fn to_pretty(rows: &[ScanRow]) -> Vec<u8> {
    let names: Vec<&str> = CSV_HEADER.split(',').collect();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![format!("{:.6}", r.m_adm), r.gamma_branch_index.to_string()];
            v.extend(
                [
                    r.gamma,
                    r.k_h,
                    r.min_k,
                    r.int_he,
                    r.int_h,
                    r.mass_fb_by,
                    r.hm_lhs,
                    r.hm_rhs,
                    r.boundary_gap,
                ]
                .iter()
                .map(|x| format!("{x:.8}")),
            );
            v
        })
        .collect();
    let widths: Vec<usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| cells.iter().map(|c| c[i].len()).chain([n.len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |out: &mut String, items: &[&str]| {
        let joined: Vec<String> = items
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:>w$}"))
            .collect();
        out.push_str(joined.join("  ").trim_end());
        out.push('\n');
    };
    line(&mut out, &names);
    for c in &cells {
        let refs: Vec<&str> = c.iter().map(String::as_str).collect();
        line(&mut out, &refs);
    }
    out.into_bytes()
}

/// Writes `rows` to `out` and returns the number of bytes written.
pub fn emit(rows: &[ScanRow], format: Format, out: &mut dyn Write) -> io::Result<usize> {
    let bytes = match format {
        Format::Csv => to_csv(rows)?,
        Format::Json => to_json(rows)?,
        Format::Pretty => to_pretty(rows),
    };
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(bytes.len())
}

pub fn parse_csv(text: &str) -> Result<Vec<ScanRow>, csv::Error> {
    csv::ReaderBuilder::new()
        .from_reader(text.as_bytes())
        .deserialize()
        .collect()
}

pub fn parse_json(text: &str) -> serde_json::Result<Vec<ScanRow>> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(m: f64, branch: u32) -> ScanRow {
        ScanRow {
            m_adm: m,
            gamma_branch_index: branch,
            gamma: 0.1 + m,
            k_h: 1.0,
            min_k: 2.5,
            int_he: 3.0,
            int_h: 2.9,
            mass_fb_by: 0.1,
            hm_lhs: 0.2,
            hm_rhs: 0.3,
            boundary_gap: 0.15,
        }
    }

    #[test]
    fn header_and_cardinality() {
        let rows: Vec<ScanRow> = (0..3).flat_map(|i| [row(i as f64 * 0.01, 0), row(i as f64 * 0.01, 1)]).collect();
        let csv = String::from_utf8(to_csv(&rows).unwrap()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 7);
        assert!(!csv.contains('\r'));
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn empty_csv_still_has_header() {
        let csv = String::from_utf8(to_csv(&[]).unwrap()).unwrap();
        assert_eq!(csv, format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn flat_row_serialises_zero_mass() {
        let mut r = row(0.0, 0);
        r.mass_fb_by = 0.0;
        let csv = String::from_utf8(to_csv(&[r]).unwrap()).unwrap();
        let fields: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(fields[7].parse::<f64>().unwrap(), 0.0);
    }

    #[test]
    fn json_uses_csv_field_names() {
        let json = String::from_utf8(to_json(&[row(0.1, 1)]).unwrap()).unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let obj = value[0].as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        let mut expected: Vec<&str> = CSV_HEADER.split(',').collect();
        keys.sort_unstable();
        expected.sort_unstable();
        assert_eq!(keys, expected);
    }

    #[test]
    fn emit_counts_bytes() {
        let mut sink = Vec::new();
        let n = emit(&[row(0.1, 0)], Format::Pretty, &mut sink).unwrap();
        assert_eq!(n, sink.len());
        assert!(String::from_utf8(sink).unwrap().starts_with("   m_adm"));
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e6f64..1e6, -1e-6f64..1e-6, Just(0.0)]
    }

    prop_compose! {
        fn any_row()(m in 0.0f64..0.2, b in 0u32..2, v in prop::collection::vec(finite(), 9)) -> ScanRow {
            ScanRow {
                m_adm: m, gamma_branch_index: b, gamma: v[0], k_h: v[1], min_k: v[2],
                int_he: v[3], int_h: v[4], mass_fb_by: v[5], hm_lhs: v[6], hm_rhs: v[7], boundary_gap: v[8],
            }
        }
    }

    proptest! {
        #[test]
        fn csv_round_trip(rows in prop::collection::vec(any_row(), 0..8)) {
            let text = String::from_utf8(to_csv(&rows).unwrap()).unwrap();
            prop_assert_eq!(parse_csv(&text).unwrap(), rows);
        }

        #[test]
        fn json_round_trip(rows in prop::collection::vec(any_row(), 0..8)) {
            let text = String::from_utf8(to_json(&rows).unwrap()).unwrap();
            prop_assert_eq!(parse_json(&text).unwrap(), rows);
        }
    }
}
