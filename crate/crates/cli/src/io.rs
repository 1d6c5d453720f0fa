//! File formats: the per-step time-series CSV, field snapshots, and the
//! epsilon-sweep table. The series reader exists so round-trips can be
//! tested and downstream tooling has a reference parser.

use std::fmt::Write as _;
use std::path::Path;

use chemcomp_core::diagnostics::{SeriesRow, TimeSeries};
use chemcomp_core::{Dim, State};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

pub const SERIES_HEADER: &str =
    "t,mass_u,mass_v,amp_u,amp_v,min_u,min_v,max_u,max_v,front_u,front_v";

fn push_field(out: &mut String, v: f64) {
    // shortest round-trip representation
    write!(out, "{v}").unwrap();
}

fn push_optional(out: &mut String, v: Option<f64>) {
    if let Some(v) = v {
        push_field(out, v);
    }
}

/// Render the time series; `a_ode` (one value per row) appends an `A_ode`
/// column for the amplitude-verification overlay.
pub fn series_csv(series: &TimeSeries, a_ode: Option<&[f64]>) -> String {
    if let Some(a) = a_ode {
        assert_eq!(a.len(), series.rows().len(), "one A_ode value per row");
    }
    let mut out = String::new();
    out.push_str(SERIES_HEADER);
    if a_ode.is_some() {
        out.push_str(",A_ode");
    }
    out.push('\n');
    for (i, r) in series.rows().iter().enumerate() {
        for (j, v) in [
            r.t, r.mass_u, r.mass_v, r.amp_u, r.amp_v, r.min_u, r.min_v, r.max_u, r.max_v,
        ]
        .into_iter()
        .enumerate()
        {
            if j > 0 {
                out.push(',');
            }
            push_field(&mut out, v);
        }
        out.push(',');
        push_optional(&mut out, r.front_u);
        out.push(',');
        push_optional(&mut out, r.front_v);
        if let Some(a) = a_ode {
            out.push(',');
            push_field(&mut out, a[i]);
        }
        out.push('\n');
    }
    out
}

/// Parse a series CSV produced by [`series_csv`].
pub fn parse_series_csv(text: &str) -> Result<(Vec<SeriesRow>, Option<Vec<f64>>), FormatError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(FormatError::Malformed {
        line: 1,
        msg: "empty file".into(),
    })?;
    let with_ode = match header {
        h if h == SERIES_HEADER => false,
        h if h == format!("{SERIES_HEADER},A_ode") => true,
        other => {
            return Err(FormatError::Malformed {
                line: 1,
                msg: format!("unexpected header `{other}`"),
            })
        }
    };
    let expected = 11 + usize::from(with_ode);
    let mut rows = Vec::new();
    let mut ode = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != expected {
            return Err(FormatError::Malformed {
                line: idx + 1,
                msg: format!("expected {expected} fields, got {}", cells.len()),
            });
        }
        let num = |i: usize| -> Result<f64, FormatError> {
            cells[i].parse().map_err(|_| FormatError::Malformed {
                line: idx + 1,
                msg: format!("bad number `{}`", cells[i]),
            })
        };
        let opt = |i: usize| -> Result<Option<f64>, FormatError> {
            if cells[i].is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        rows.push(SeriesRow {
            t: num(0)?,
            mass_u: num(1)?,
            mass_v: num(2)?,
            amp_u: num(3)?,
            amp_v: num(4)?,
            min_u: num(5)?,
            min_v: num(6)?,
            max_u: num(7)?,
            max_v: num(8)?,
            front_u: opt(9)?,
            front_v: opt(10)?,
        });
        if with_ode {
            ode.push(num(11)?);
        }
    }
    Ok((rows, with_ode.then_some(ode)))
}

/// Render one field snapshot: header `x[,y],u,v,cu,cv`, one row per cell,
/// 17 significant digits.
pub fn snapshot_csv(state: &State) -> String {
    let grid = state.grid();
    let mut out = String::new();
    match grid.dim() {
        Dim::One => {
            out.push_str("x,u,v,cu,cv\n");
            for i in 0..grid.n() {
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    grid.center(i),
                    state.u[i],
                    state.v[i],
                    state.cu[i],
                    state.cv[i]
                )
                .unwrap();
            }
        }
        Dim::Two => {
            out.push_str("x,y,u,v,cu,cv\n");
            for iy in 0..grid.n() {
                for ix in 0..grid.n() {
                    writeln!(
                        out,
                        "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                        grid.center(ix),
                        grid.center(iy),
                        state.u.at(ix, iy),
                        state.v.at(ix, iy),
                        state.cu.at(ix, iy),
                        state.cv.at(ix, iy)
                    )
                    .unwrap();
                }
            }
        }
    }
    out
}

/// Render the sweep table: one row per requested epsilon.
pub fn sweep_csv(rows: &[crate::sweep::SweepRow]) -> String {
    let mut out = String::from("eps,a_amp_final,a_predicted,status\n");
    for r in rows {
        match &r.outcome {
            Ok(amp) => {
                writeln!(out, "{},{},{},ok", r.eps, amp, r.predicted).unwrap();
            }
            Err(msg) => {
                writeln!(out, "{},,{},error: {}", r.eps, r.predicted, msg).unwrap();
            }
        }
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)
}
