//! File formats: the `LIFTKIT-DESIGN v1` text format for ensembles, a CSV
//! layout for measurement records, and JSON for certificate reports.
//!
//! Design file:
//!
//! ```text
//! LIFTKIT-DESIGN v1
//! d N t
//! w re_0 im_0 re_1 im_1 ...     (one line per vector)
//! ```
//!
//! Floats are written with 17 significant digits so a round trip is exact.
//!
//! Measurement CSV: a `d,m,seed,label` header and its value row, then the
//! column header `i,re_0..re_{d-1},im_0..im_{d-1},y`. Row `i = 0` holds the
//! intensity `y₀` with a zero vector; rows `1..=m` hold the measurements.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde_json::{json, Value};

use crate::certificate::CertificateReport;
use crate::designs::DesignEnsemble;
use crate::error::{Error, Result};
use crate::linalg::{ComplexVec, HermMat, C64};
use crate::measurement::MeasurementRecord;

const DESIGN_MAGIC: &str = "LIFTKIT-DESIGN v1";

pub fn write_design<W: Write>(e: &DesignEnsemble, mut out: W) -> Result<()> {
    writeln!(out, "{DESIGN_MAGIC}")?;
    writeln!(out, "{} {} {}", e.dim(), e.len(), e.order_claim())?;
    for (v, w) in e.vectors().iter().zip(e.weights()) {
        let mut line = format!("{w:.16e}");
        for z in v.entries() {
            line.push_str(&format!(" {:.16e} {:.16e}", z.re, z.im));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("bad number '{tok}'")))
}

pub fn read_design<R: Read>(input: R, label: &str) -> Result<DesignEnsemble> {
    let mut lines = BufReader::new(input).lines();
    let mut next = |n: usize| -> Result<String> {
        match lines.next() {
            Some(l) => Ok(l?),
            None => Err(parse_err(n, "unexpected end of file")),
        }
    };
    if next(1)?.trim() != DESIGN_MAGIC {
        return Err(parse_err(1, format!("expected '{DESIGN_MAGIC}'")));
    }
    let header = next(2)?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 {
        return Err(parse_err(2, "expected 'd N t'"));
    }
    let (d, n, t): (usize, usize, usize) = (parse_num(h[0], 2)?, parse_num(h[1], 2)?, parse_num(h[2], 2)?);
    let mut vectors = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        let lineno = k + 3;
        let line = next(lineno)?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 1 + 2 * d {
            return Err(parse_err(lineno, format!("expected {} fields, found {}", 1 + 2 * d, toks.len())));
        }
        weights.push(parse_num::<f64>(toks[0], lineno)?);
        let mut entries = Vec::with_capacity(d);
        for j in 0..d {
            let re = parse_num(toks[1 + 2 * j], lineno)?;
            let im = parse_num(toks[2 + 2 * j], lineno)?;
            entries.push(C64::new(re, im));
        }
        vectors.push(ComplexVec::from_vec(entries));
    }
    DesignEnsemble::new(t, vectors, weights, label)
}

pub fn save_design(e: &DesignEnsemble, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_design(e, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_design(path: &Path) -> Result<DesignEnsemble> {
    let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("file");
    read_design(File::open(path)?, label)
}

pub fn write_record<W: Write>(rec: &MeasurementRecord, out: W) -> Result<()> {
    let d = rec.signal_dim;
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(["d", "m", "seed", "label"])?;
    w.write_record([d.to_string(), rec.len().to_string(), rec.seed.to_string(), rec.source_label.clone()])?;
    let mut cols = vec!["i".to_string()];
    cols.extend((0..d).map(|k| format!("re_{k}")));
    cols.extend((0..d).map(|k| format!("im_{k}")));
    cols.push("y".into());
    w.write_record(&cols)?;
    let row = |i: usize, a: Option<&ComplexVec>, y: f64| -> Vec<String> {
        let mut r = vec![i.to_string()];
        match a {
            Some(a) => {
                r.extend(a.entries().iter().map(|z| z.re.to_string()));
                r.extend(a.entries().iter().map(|z| z.im.to_string()));
            }
            None => r.extend(std::iter::repeat_n("0".to_string(), 2 * d)),
        }
        r.push(y.to_string());
        r
    };
    w.write_record(row(0, None, rec.intensity))?;
    for (i, (a, y)) in rec.vectors.iter().zip(&rec.amplitudes).enumerate() {
        w.write_record(row(i + 1, Some(a), *y))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_record<R: Read>(input: R) -> Result<MeasurementRecord> {
    let mut r = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(false)
        .from_reader(input);
    let rows: Vec<csv::StringRecord> = r.records().collect::<std::result::Result<_, _>>()?;
    if rows.len() < 4 {
        return Err(parse_err(rows.len() + 1, "truncated measurement file"));
    }
    if rows[0].iter().collect::<Vec<_>>() != ["d", "m", "seed", "label"] {
        return Err(parse_err(1, "expected header 'd,m,seed,label'"));
    }
    let meta = &rows[1];
    if meta.len() != 4 {
        return Err(parse_err(2, "expected 4 metadata fields"));
    }
    let d: usize = parse_num(&meta[0], 2)?;
    let m: usize = parse_num(&meta[1], 2)?;
    let seed: u64 = parse_num(&meta[2], 2)?;
    let label = meta[3].to_string();
    if rows.len() != m + 4 {
        return Err(parse_err(rows.len(), format!("expected {} data rows, found {}", m + 1, rows.len() - 3)));
    }
    let width = 2 * d + 2;
    let mut vectors = Vec::with_capacity(m);
    let mut amplitudes = Vec::with_capacity(m);
    let mut intensity = 0.0;
    for (k, row) in rows[3..].iter().enumerate() {
        let lineno = k + 4;
        if row.len() != width {
            return Err(parse_err(lineno, format!("expected {width} fields, found {}", row.len())));
        }
        let i: usize = parse_num(&row[0], lineno)?;
        if i != k {
            return Err(parse_err(lineno, format!("row index {i}, expected {k}")));
        }
        let y: f64 = parse_num(&row[width - 1], lineno)?;
        if k == 0 {
            intensity = y;
            continue;
        }
        let mut entries = Vec::with_capacity(d);
        for j in 0..d {
            entries.push(C64::new(parse_num(&row[1 + j], lineno)?, parse_num(&row[1 + d + j], lineno)?));
        }
        vectors.push(ComplexVec::from_vec(entries));
        amplitudes.push(y);
    }
    Ok(MeasurementRecord {
        signal_dim: d,
        vectors,
        amplitudes,
        intensity,
        seed,
        source_label: label,
    })
}

pub fn save_record(rec: &MeasurementRecord, path: &Path) -> Result<()> {
    write_record(rec, BufWriter::new(File::create(path)?))
}

pub fn load_record(path: &Path) -> Result<MeasurementRecord> {
    read_record(File::open(path)?)
}

/// `{"re": [[..]], "im": [[..]]}`, row-major.
pub fn herm_to_json(m: &HermMat) -> Value {
    let a = m.as_matrix();
    let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
        (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| f(&a[(i, j)])).collect()).collect()
    };
    json!({ "re": rows(|z| z.re), "im": rows(|z| z.im) })
}

pub fn certificate_to_json(report: &CertificateReport) -> Value {
    let d = report.y.dim();
    json!({
        "d": d,
        "tangent_error": report.tangent_error,
        "tangent_bound": 1.0 / (4.0 * d as f64),
        "complement_norm": report.complement_norm,
        "complement_bound": 0.5,
        "legs_used": report.legs_used,
        "success_flags": report.success_flags,
        "is_valid": report.is_valid,
        "y": herm_to_json(&report.y),
    })
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// later keys override earlier ones.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(parse_err(k + 1, format!("expected 'key = value', found '{line}'")));
        };
        let key = key.trim().trim_start_matches("--").to_string();
        if key.is_empty() {
            return Err(parse_err(k + 1, "empty key"));
        }
        out.retain(|(existing, _)| *existing != key);
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

/// Integer list syntax: `8`, `2,4,8`, `1:10` or `4:32:4` (inclusive).
pub fn parse_int_list(s: &str) -> Result<Vec<usize>> {
    let bad = || parse_err(1, format!("bad integer list '{s}'"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let fields: Vec<&str> = part.split(':').map(str::trim).collect();
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        match fields.as_slice() {
            [v] => out.push(num(v)?),
            [a, b] | [a, b, _] => {
                let (a, b) = (num(a)?, num(b)?);
                let step = if fields.len() == 3 { num(fields[2])? } else { 1 };
                if step == 0 || a > b {
                    return Err(bad());
                }
                out.extend((a..=b).step_by(step));
            }
            _ => return Err(bad()),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::verify_certificate;
    use crate::designs::{haar_ensemble, mub_maximal, projected_stabilizer_design};
    use crate::linalg::lift;
    use crate::measurement::{measure, sample_vectors};

    #[test]
    fn design_round_trip_is_exact() {
        for e in [
            mub_maximal(5).unwrap(),
            projected_stabilizer_design(6).unwrap(),
            haar_ensemble(3, 7, 2).unwrap(),
        ] {
            let mut buf = Vec::new();
            write_design(&e, &mut buf).unwrap();
            let back = read_design(buf.as_slice(), e.label()).unwrap();
            assert_eq!(back.dim(), e.dim());
            assert_eq!(back.order_claim(), e.order_claim());
            assert_eq!(back.weights(), e.weights());
            assert_eq!(back.vectors(), e.vectors());
            let mut again = Vec::new();
            write_design(&back, &mut again).unwrap();
            assert_eq!(buf, again);
        }
    }

    #[test]
    fn design_parse_errors() {
        assert!(matches!(read_design("nope\n".as_bytes(), "x"), Err(Error::Parse { line: 1, .. })));
        let bad = "LIFTKIT-DESIGN v1\n2 1 2\n1.0 1.0 0.0\n";
        assert!(matches!(read_design(bad.as_bytes(), "x"), Err(Error::Parse { line: 3, .. })));
        let short = "LIFTKIT-DESIGN v1\n2 2 2\n0.5 1 0 0 0\n";
        assert!(read_design(short.as_bytes(), "x").is_err());
    }

    #[test]
    fn record_round_trip_is_exact() {
        let e = mub_maximal(3).unwrap();
        let x = ComplexVec::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.0)]);
        let rec = measure(&x, &sample_vectors(&e, 9, 4))
            .unwrap()
            .with_provenance(4, "mub, sampled");
        let mut buf = Vec::new();
        write_record(&rec, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("d,m,seed,label\n3,9,4,\"mub, sampled\"\ni,re_0,re_1,re_2,im_0,im_1,im_2,y\n0,"));
        let back = read_record(buf.as_slice()).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn record_rejects_wrong_width() {
        let text = "d,m,seed,label\n2,1,0,x\ni,re_0,re_1,im_0,im_1,y\n0,0,0,0,0,1\n1,1,0,0,0\n";
        assert!(matches!(read_record(text.as_bytes()), Err(Error::Parse { line: 5, .. })));
    }

    #[test]
    fn config_and_lists() {
        let cfg = parse_config("# grid\nd = 2:4\n--seed=7 # trailing\n\nd = 8\n").unwrap();
        assert_eq!(cfg, vec![("seed".to_string(), "7".to_string()), ("d".to_string(), "8".to_string())]);
        assert!(matches!(parse_config("a = 1\noops\n"), Err(Error::Parse { line: 2, .. })));
        assert_eq!(parse_int_list("8").unwrap(), vec![8]);
        assert_eq!(parse_int_list("2, 4,8").unwrap(), vec![2, 4, 8]);
        assert_eq!(parse_int_list("1:4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_int_list("4:16:4,20").unwrap(), vec![4, 8, 12, 16, 20]);
        for bad in ["", "x", "5:1", "1:4:0", "1:2:3:4"] {
            assert!(parse_int_list(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn certificate_json_fields() {
        let x = ComplexVec::basis(3, 1);
        let rep = verify_certificate(&lift(&x), &x).unwrap();
        let v = certificate_to_json(&rep);
        assert_eq!(v["d"], 3);
        assert_eq!(v["is_valid"], true);
        assert_eq!(v["y"]["re"][1][1], 1.0);
        let text = serde_json::to_string_pretty(&v).unwrap();
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, v);
    }
}
