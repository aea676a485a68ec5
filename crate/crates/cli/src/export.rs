//! File artifacts: CSV tables, the run-metadata document, and the readers
//! that take them back in. Every write goes to a temp sibling first and is
//! renamed into place, so a crash never leaves a half-written file behind.
//!
//! Floats are formatted with `Display`, which emits the shortest string that
//! parses back to the same value — re-importing a CSV reproduces every finite
//! value bit for bit.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use mottlobe_core::dynamics::{CurrentTrace, TraceMeta};
use mottlobe_core::phase::{MapSource, PhaseDiagramGrid, PointStatus};
use mottlobe_core::pipeline::SlicePoint;
use mottlobe_core::spectral::SpectrumResult;

use crate::config::SweepConfig;
use crate::Failure;

/// Writes `bytes` to `path` atomically (temp file in the same directory,
/// then rename). Creates parent directories as needed.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", path.display()));
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(io)?;
        }
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| Failure::Io(format!("{}: not a file path", path.display())))?;
    let mut tmp = path.to_path_buf();
    tmp.set_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    {
        let mut f = std::fs::File::create(&tmp).map_err(io)?;
        f.write_all(bytes).map_err(io)?;
        f.sync_all().map_err(io)?;
    }
    std::fs::rename(&tmp, path).map_err(io)
}

pub fn trace_csv(trace: &CurrentTrace<f64>) -> String {
    let mut out = String::from("t,J\n");
    for (t, j) in trace.times().iter().zip(trace.values()) {
        writeln!(out, "{t},{j}").unwrap();
    }
    out
}

pub fn spectrum_csv(spectrum: &SpectrumResult<f64>) -> String {
    let mut out = String::from("omega,J_omega\n");
    for (w, v) in spectrum.omegas.iter().zip(&spectrum.values) {
        writeln!(out, "{w},{v}").unwrap();
    }
    out
}

pub const PHASE_DIAGRAM_HEADER: &str = "mu_over_u,kappa_over_u,psi,source,flags";

/// One exported grid point.
pub struct PhaseRow {
    pub mu_over_u: f64,
    pub kappa_over_u: f64,
    pub psi: f64,
    pub source: MapSource,
    pub status: PointStatus,
}

/// Rows to CSV; an empty iterator yields just the header line.
pub fn phase_diagram_csv(rows: impl IntoIterator<Item = PhaseRow>) -> String {
    let mut out = String::from(PHASE_DIAGRAM_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.mu_over_u, r.kappa_over_u, r.psi, r.source, r.status
        )
        .unwrap();
    }
    out
}

/// The full grid as rows, μ/U outer, matching the in-memory layout.
pub fn grid_rows(grid: &PhaseDiagramGrid<f64>) -> Vec<PhaseRow> {
    let mut rows = Vec::with_capacity(grid.values().len());
    for (i, &mu) in grid.mu_axis().iter().enumerate() {
        for (j, &kappa) in grid.kappa_axis().iter().enumerate() {
            rows.push(PhaseRow {
                mu_over_u: mu,
                kappa_over_u: kappa,
                psi: grid.value(i, j),
                source: grid.source(),
                status: grid.status(i, j).clone(),
            });
        }
    }
    rows
}

pub fn slice_csv(points: &[SlicePoint<f64>], mu_over_u: f64) -> String {
    let mut out = String::from("u,mu_over_u,j_m,omega_star,psi_a,psi_b,flags\n");
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.u, mu_over_u, p.peak_current, p.dominant_omega, p.psi_a, p.psi_b, p.status
        )
        .unwrap();
    }
    out
}

#[derive(Serialize)]
struct RunInfo<'a> {
    command: &'a str,
    version: &'a str,
    core_version: &'a str,
    wall_time_seconds: f64,
    points: usize,
    failures: usize,
}

#[derive(Serialize)]
struct RunMeta<'a> {
    run: RunInfo<'a>,
    config: &'a SweepConfig,
}

/// The machine-readable run record: what ran, how long, and the full
/// configuration it ran with.
pub fn run_meta(
    command: &str,
    config: &SweepConfig,
    wall_time_seconds: f64,
    points: usize,
    failures: usize,
) -> String {
    let meta = RunMeta {
        run: RunInfo {
            command,
            version: env!("CARGO_PKG_VERSION"),
            core_version: mottlobe_core::VERSION,
            wall_time_seconds,
            points,
            failures,
        },
        config,
    };
    toml::to_string(&meta).expect("run metadata serializes")
}

fn read_lines(path: &Path, header: &str) -> Result<Vec<String>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == header => {}
        other => {
            return Err(Failure::Config(format!(
                "{}: expected header {header:?}, found {:?}",
                path.display(),
                other.unwrap_or("")
            )))
        }
    }
    Ok(lines.map(str::to_owned).collect())
}

fn parse_f64(path: &Path, line_no: usize, field: &str, raw: &str) -> Result<f64, Failure> {
    raw.parse().map_err(|_| {
        Failure::Config(format!(
            "{}:{line_no}: bad {field} value {raw:?}",
            path.display()
        ))
    })
}

/// Reads a trace written by [`trace_csv`]. The returned metadata carries only
/// placeholders; a re-read trace knows its samples, not its provenance.
pub fn read_trace_csv(path: &Path) -> Result<CurrentTrace<f64>, Failure> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (k, line) in read_lines(path, "t,J")?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (t, j) = line.split_once(',').ok_or_else(|| {
            Failure::Config(format!("{}:{}: expected two fields", path.display(), k + 2))
        })?;
        times.push(parse_f64(path, k + 2, "t", t)?);
        values.push(parse_f64(path, k + 2, "J", j)?);
    }
    let meta = TraceMeta {
        mu_over_u: None,
        kappa_over_u: None,
        g: 0.0,
        delta_mu: 0.0,
        basis_dim: 0,
    };
    CurrentTrace::new(times, values, meta).map_err(|e| Failure::Config(e.to_string()))
}

/// Reads a map written by [`phase_diagram_csv`] back into a grid. Rows must
/// cover a full rectangular grid in the row-major order the writer emits.
pub fn read_phase_diagram_csv(path: &Path) -> Result<PhaseDiagramGrid<f64>, Failure> {
    let bad = |k: usize, msg: String| Failure::Config(format!("{}:{k}: {msg}", path.display()));
    let mut rows = Vec::new();
    for (k, line) in read_lines(path, PHASE_DIAGRAM_HEADER)?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = k + 2;
        let fields: Vec<&str> = line.splitn(5, ',').collect();
        if fields.len() != 5 {
            return Err(bad(line_no, "expected five fields".into()));
        }
        let source = MapSource::from_str(fields[3])
            .map_err(|e| bad(line_no, e.to_string()))?;
        let status = PointStatus::from_str(fields[4])
            .map_err(|e| bad(line_no, e.to_string()))?;
        rows.push((
            parse_f64(path, line_no, "mu_over_u", fields[0])?,
            parse_f64(path, line_no, "kappa_over_u", fields[1])?,
            parse_f64(path, line_no, "psi", fields[2])?,
            source,
            status,
        ));
    }
    if rows.is_empty() {
        return Err(Failure::Config(format!("{}: no data rows", path.display())));
    }
    let source = rows[0].3;
    if rows.iter().any(|r| r.3 != source) {
        return Err(Failure::Config(format!(
            "{}: mixed sources in one file",
            path.display()
        )));
    }
    // Row-major with μ/U outer: the κ/U axis is the leading run of rows
    // sharing the first μ/U value.
    let mu0 = rows[0].0;
    let n_kappa = rows
        .iter()
        .position(|r| r.0 != mu0)
        .unwrap_or(rows.len());
    if rows.len() % n_kappa != 0 {
        return Err(Failure::Config(format!(
            "{}: {} rows do not tile a grid with {} kappa points",
            path.display(),
            rows.len(),
            n_kappa
        )));
    }
    let kappa_axis: Vec<f64> = rows[..n_kappa].iter().map(|r| r.1).collect();
    let mu_axis: Vec<f64> = rows.iter().step_by(n_kappa).map(|r| r.0).collect();
    for (idx, r) in rows.iter().enumerate() {
        if r.0 != mu_axis[idx / n_kappa] || r.1 != kappa_axis[idx % n_kappa] {
            return Err(Failure::Config(format!(
                "{}:{}: rows are not in row-major grid order",
                path.display(),
                idx + 2
            )));
        }
    }
    let values = rows.iter().map(|r| r.2).collect();
    let statuses = rows.iter().map(|r| r.4.clone()).collect();
    PhaseDiagramGrid::new(mu_axis, kappa_axis, values, statuses, source)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}
