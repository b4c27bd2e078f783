//! CSV emission and parsing of sweep results.
//!
//! Header `snr_db,estimate,stderr,n_samples`, preceded by a `series` column
//! when several series share a file. Reals carry 12 significant digits.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::montecarlo::{SweepMetadata, SweepPoint, SweepResult};

/// A named sweep result.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub result: SweepResult,
}

/// Shortest decimal that equals `x` rounded to 12 significant digits.
pub fn fmt_sig12(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded:?}")
}

/// Write one or more series. A `series` column is added when
/// `with_series_column` is set.
pub fn write_series<W: Write>(w: W, series: &[Series], with_series_column: bool) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    if with_series_column {
        wtr.write_record(["series", "snr_db", "estimate", "stderr", "n_samples"])?;
    } else {
        wtr.write_record(["snr_db", "estimate", "stderr", "n_samples"])?;
    }
    for s in series {
        for p in &s.result.points {
            let fields = [
                fmt_sig12(p.rho_db),
                fmt_sig12(p.estimate),
                fmt_sig12(p.stderr),
                p.n_samples.to_string(),
            ];
            if with_series_column {
                wtr.write_record(std::iter::once(s.name.clone()).chain(fields))?;
            } else {
                wtr.write_record(fields)?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Parse a file written by [`write_series`]. Series keep their first
/// appearance order; a file without a `series` column yields one series
/// named `""`.
pub fn read_series<R: Read>(r: R) -> Result<Vec<Series>> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let offset = match header.as_slice() {
        [a, b, c, d] if a == "snr_db" && b == "estimate" && c == "stderr" && d == "n_samples" => 0,
        [s, a, b, c, d]
            if s == "series" && a == "snr_db" && b == "estimate" && c == "stderr" && d == "n_samples" =>
        {
            1
        }
        _ => return Err(Error::Io(format!("unexpected CSV header {header:?}"))),
    };
    let mut out: Vec<Series> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |j: usize| -> Result<f64> {
            rec.get(j + offset)
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| Error::Io(format!("row {}: bad field {}", i + 2, j + offset)))
        };
        let point = SweepPoint {
            rho_db: num(0)?,
            estimate: num(1)?,
            stderr: num(2)?,
            n_samples: rec
                .get(3 + offset)
                .and_then(|v| v.parse::<u64>().ok())
                .ok_or_else(|| Error::Io(format!("row {}: bad n_samples", i + 2)))?,
        };
        let name = if offset == 1 { rec.get(0).unwrap_or("").to_string() } else { String::new() };
        match out.iter_mut().find(|s| s.name == name) {
            Some(s) => s.result.points.push(point),
            None => out.push(Series {
                name,
                result: SweepResult {
                    points: vec![point],
                    metadata: SweepMetadata::default(),
                },
            }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(name: &str, vals: &[(f64, f64, f64, u64)]) -> Series {
        Series {
            name: name.into(),
            result: SweepResult {
                points: vals
                    .iter()
                    .map(|&(rho_db, estimate, stderr, n_samples)| SweepPoint {
                        rho_db,
                        estimate,
                        stderr,
                        n_samples,
                    })
                    .collect(),
                metadata: SweepMetadata::default(),
            },
        }
    }

    #[test]
    fn formats() {
        assert_eq!(fmt_sig12(-10.0), "-10.0");
        assert_eq!(fmt_sig12(0.5), "0.5");
        assert_eq!(fmt_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig12(1.234_567_890_123_456e-7), "1.23456789012e-7");
    }

    #[test]
    fn header_and_layout() {
        let mut buf = Vec::new();
        write_series(&mut buf, &[series("a", &[(0.0, 0.25, 0.0, 0)])], false).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "snr_db,estimate,stderr,n_samples\n0.0,0.25,0.0,0\n");
        let mut buf = Vec::new();
        write_series(&mut buf, &[series("rician(k=2)", &[(0.5, 0.1, 0.01, 10)])], true).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "series,snr_db,estimate,stderr,n_samples\nrician(k=2),0.5,0.1,0.01,10\n"
        );
    }

    proptest! {
        #[test]
        fn round_trip_at_printed_precision(
            pts in prop::collection::vec((-50.0f64..50.0, 0.0f64..1.0, 0.0f64..0.1, 0u64..10_000_000), 1..20)
        ) {
            let s = vec![series("x", &pts), series("y, z", &pts)];
            let mut buf = Vec::new();
            write_series(&mut buf, &s, true).unwrap();
            let back = read_series(buf.as_slice()).unwrap();
            prop_assert_eq!(back.len(), 2);
            for (orig, got) in s.iter().zip(&back) {
                prop_assert_eq!(&orig.name, &got.name);
                for (a, b) in orig.result.points.iter().zip(&got.result.points) {
                    for (u, v) in [(a.rho_db, b.rho_db), (a.estimate, b.estimate), (a.stderr, b.stderr)] {
                        prop_assert!((u - v).abs() <= 1e-11 * u.abs());
                        prop_assert_eq!(fmt_sig12(u), fmt_sig12(v));
                    }
                    prop_assert_eq!(a.n_samples, b.n_samples);
                }
            }
        }
    }
}
