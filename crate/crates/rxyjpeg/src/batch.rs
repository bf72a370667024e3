//! Capacity measurement over a directory of covers named `<image>_q<QF>.jpg`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rxyjpeg_core::{measure_with, CapacityReport, Error as CoreError, TerminatePolicy};

use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct BatchRow {
    pub path: PathBuf,
    pub image: String,
    /// `None` when the file name carries no `_q<QF>` suffix.
    pub qf: Option<u8>,
    pub report: Result<CapacityReport, CoreError>,
}

/// Splits `camera_q70.jpg` into `("camera", Some(70))`.
pub fn parse_name(file_name: &str) -> (String, Option<u8>) {
    let stem = file_name.rsplit_once('.').map_or(file_name, |(s, _)| s);
    if let Some((image, q)) = stem.rsplit_once("_q") {
        if let Ok(qf) = q.parse::<u8>() {
            if !image.is_empty() {
                return (image.to_owned(), Some(qf));
            }
        }
    }
    (stem.to_owned(), None)
}

fn is_jpeg(p: &Path) -> bool {
    p.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("jpg") || e.eq_ignore_ascii_case("jpeg"))
}

/// Measures every JPEG in `dir`. Rows are sorted by image, then by
/// descending quality factor.
pub fn run(
    dir: &Path,
    jobs: Option<usize>,
    policy: TerminatePolicy,
) -> Result<Vec<BatchRow>, CliError> {
    let io_err = |source| CliError::Io { path: dir.to_owned(), source };
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let p = entry.map_err(io_err)?.path();
        if p.is_file() && is_jpeg(&p) {
            paths.push(p);
        }
    }

    let measure = |p: &PathBuf| -> Result<BatchRow, CliError> {
        let bytes = crate::io::read(p)?;
        let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let (image, qf) = parse_name(&name);
        Ok(BatchRow { path: p.clone(), image, qf, report: measure_with(&bytes, policy) })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut rows = pool.install(|| paths.par_iter().map(measure).collect::<Result<Vec<_>, _>>())?;
    rows.sort_by(|a, b| {
        a.image.cmp(&b.image).then(b.qf.cmp(&a.qf)).then_with(|| a.path.cmp(&b.path))
    });
    Ok(rows)
}

/// One tab-separated line per file.
pub fn format_rows(rows: &[BatchRow]) -> String {
    let mut out = String::from("image\tqf\tec_bits\trate_percent\tt\tspecials\tsaved_bytes\n");
    for r in rows {
        let qf = r.qf.map_or("-".to_owned(), |q| q.to_string());
        match &r.report {
            Ok(c) => {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{:.3}\t{}\t{}\t{}",
                    r.image, qf, c.ec_bits, c.rate_percent, c.t, c.special_count, c.saved_bytes
                );
            }
            Err(e) => {
                let _ = writeln!(out, "{}\t{}\terror: {}", r.image, qf, e);
            }
        }
    }
    out
}

type Column = dyn Fn(&CapacityReport) -> String;

/// Two grids, EC in bits and Rate in percent, with images down the side and
/// quality factors across the top (highest first).
pub fn format_text(rows: &[BatchRow]) -> String {
    let qfs: BTreeSet<u8> = rows.iter().filter_map(|r| r.qf).collect();
    let qfs: Vec<u8> = qfs.into_iter().rev().collect();
    let mut images: Vec<&str> = rows.iter().map(|r| r.image.as_str()).collect();
    images.dedup();
    let width = images.iter().map(|s| s.len()).max().unwrap_or(5).max(5);

    let cell = |image: &str, qf: u8, f: &Column| -> String {
        rows.iter()
            .find(|r| r.image == image && r.qf == Some(qf))
            .map_or("".to_owned(), |r| r.report.as_ref().map_or("err".to_owned(), f))
    };

    let mut out = String::new();
    let grids: [(&str, &Column); 2] = [
        ("EC (bits)", &|c| c.ec_bits.to_string()),
        ("Rate (%)", &|c| format!("{:.2}", c.rate_percent)),
    ];
    for (title, f) in grids {
        let _ = writeln!(out, "{title}");
        let _ = write!(out, "{:<width$}", "QF");
        for q in &qfs {
            let _ = write!(out, " {q:>7}");
        }
        out.push('\n');
        for image in &images {
            let _ = write!(out, "{image:<width$}");
            for &q in &qfs {
                let _ = write!(out, " {:>7}", cell(image, q, f));
            }
            out.push('\n');
        }
        out.push('\n');
    }
    let unnamed: Vec<_> = rows.iter().filter(|r| r.qf.is_none()).collect();
    if !unnamed.is_empty() {
        out.push_str(&format_rows(&unnamed.into_iter().cloned().collect::<Vec<_>>()));
    }
    out
}
