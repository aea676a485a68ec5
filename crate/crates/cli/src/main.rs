//! Batch tool around the core library: sweep the measurement protocol over a
//! (μ/U, κ/U) grid or a fixed-ratio U slice, build the auxiliary-field and
//! Gutzwiller reference maps, and inspect single points (trace, spectrum,
//! two-mode reduction). All outputs land in the configured directory as CSV
//! plus a run-metadata document; identical configurations produce identical
//! CSV bytes.

mod config;
mod export;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use mottlobe_core::dynamics::{peak_current, TraceMeta};
use mottlobe_core::gutzwiller::GutzwillerOptions;
use mottlobe_core::lattice::{self, Boundary, CavityParams, Severity};
use mottlobe_core::phase::{compare_maps, PointStatus};
use mottlobe_core::pipeline::{
    run_auxfield_map, run_gutzwiller_map, run_gutzwiller_map_scaled, run_josephson_map,
    run_protocol, run_u_slice, SweepOutcome,
};
use mottlobe_core::spectral::{dominant_frequency, frequency_grid, sine_transform};
use mottlobe_core::twomode::{
    current_from_phase_trajectory, current_from_trajectory, from_population_phase,
    integrate_amplitudes, integrate_population_phase, reduce_params,
};

use config::{GridMode, Range, SweepConfig};

/// What went wrong, keyed to the process exit code: config 1, numerical 2,
/// I/O 3.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "{m}"),
            Failure::Numerical(m) => write!(f, "{m}"),
            Failure::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<mottlobe_core::Error> for Failure {
    fn from(e: mottlobe_core::Error) -> Self {
        use mottlobe_core::Error as E;
        match e {
            E::Io(io) => Failure::Io(io.to_string()),
            E::NonConvergence(_)
            | E::ZeroNorm
            | E::NotHermitian(_)
            | E::ImaginaryResidue(_)
            | E::BasisMismatch
            | E::DimensionMismatch { .. }
            | E::BadTimeGrid => Failure::Numerical(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "mottlobe",
    version,
    about = "Josephson-current readout of Bose-Hubbard Mott lobes"
)]
struct Cli {
    /// Configuration file (TOML); command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Every configuration field, addressable from the command line.
#[derive(Args)]
struct Overrides {
    /// Lattice dimension (1 or 2).
    #[arg(long, global = true)]
    dimension: Option<usize>,
    /// Sites per lattice N.
    #[arg(long, global = true)]
    sites: Option<usize>,
    /// Boundary conditions: open | periodic.
    #[arg(long, global = true, value_parser = parse_boundary)]
    boundary: Option<Boundary>,

    #[arg(long, global = true)]
    kappa: Option<f64>,
    #[arg(long, global = true)]
    u: Option<f64>,
    #[arg(long, global = true)]
    mu: Option<f64>,
    #[arg(long, global = true)]
    g: Option<f64>,
    #[arg(long, global = true)]
    delta_mu: Option<f64>,
    #[arg(long, global = true)]
    lambda: Option<f64>,
    #[arg(long, global = true)]
    n_max: Option<usize>,
    #[arg(long, global = true)]
    n_total_max: Option<usize>,
    /// Prepare ground states with the global grand-canonical shift.
    #[arg(long, global = true)]
    grand_canonical: Option<bool>,

    /// Grid mode: map | u-slice.
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<GridMode>,
    /// μ/U axis as start:stop:steps.
    #[arg(long, global = true, value_parser = parse_range, value_name = "A:B:N")]
    mu_over_u: Option<Range>,
    /// κ/U axis as start:stop:steps.
    #[arg(long, global = true, value_parser = parse_range, value_name = "A:B:N")]
    kappa_over_u: Option<Range>,
    /// U axis for slices as start:stop:steps.
    #[arg(long, global = true, value_parser = parse_range, value_name = "A:B:N")]
    u_range: Option<Range>,
    /// μ/U held fixed along a U slice.
    #[arg(long, global = true)]
    mu_over_u_fixed: Option<f64>,
    /// Space the slice's U axis geometrically.
    #[arg(long, global = true)]
    log_u: Option<bool>,

    /// Sine-transform window τ in units of 1/Δμ.
    #[arg(long, global = true)]
    tau_delta_mu: Option<f64>,
    #[arg(long, global = true)]
    samples_per_period: Option<usize>,
    #[arg(long, global = true)]
    min_periods: Option<usize>,
    /// ω grid upper edge in units of Δμ.
    #[arg(long, global = true)]
    omega_max: Option<f64>,
    #[arg(long, global = true)]
    omega_points: Option<usize>,
    #[arg(long, global = true)]
    psi_b_threshold: Option<f64>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Comma-separated output formats (csv,svg).
    #[arg(long, global = true, value_delimiter = ',')]
    formats: Option<Vec<String>>,
    /// Hard Hilbert-space dimension cap (0 = none).
    #[arg(long, global = true)]
    dim_cap: Option<usize>,
}

impl Overrides {
    fn apply(&self, cfg: &mut SweepConfig) {
        macro_rules! set {
            ($($field:expr => $target:expr),* $(,)?) => {
                $(if let Some(v) = $field.clone() { $target = v; })*
            };
        }
        set! {
            self.dimension => cfg.lattice.dimension,
            self.sites => cfg.lattice.sites_per_lattice,
            self.boundary => cfg.lattice.boundary,
            self.kappa => cfg.params.kappa,
            self.u => cfg.params.u,
            self.mu => cfg.params.mu,
            self.g => cfg.params.g,
            self.delta_mu => cfg.params.delta_mu,
            self.lambda => cfg.params.lambda,
            self.n_max => cfg.params.n_max,
            self.n_total_max => cfg.params.n_total_max,
            self.grand_canonical => cfg.params.grand_canonical,
            self.mode => cfg.grid.mode,
            self.mu_over_u => cfg.grid.mu_over_u,
            self.kappa_over_u => cfg.grid.kappa_over_u,
            self.u_range => cfg.grid.u,
            self.mu_over_u_fixed => cfg.grid.mu_over_u_fixed,
            self.log_u => cfg.grid.log_u,
            self.tau_delta_mu => cfg.dynamics.tau_delta_mu,
            self.samples_per_period => cfg.dynamics.samples_per_period,
            self.min_periods => cfg.dynamics.min_periods,
            self.omega_max => cfg.dynamics.omega_max_over_delta_mu,
            self.omega_points => cfg.dynamics.omega_points,
            self.psi_b_threshold => cfg.dynamics.psi_b_threshold,
            self.out_dir => cfg.output.directory,
            self.formats => cfg.output.formats,
            self.dim_cap => cfg.limits.dim_cap,
        }
    }
}

fn parse_boundary(s: &str) -> Result<Boundary, String> {
    match s {
        "open" => Ok(Boundary::Open),
        "periodic" => Ok(Boundary::Periodic),
        _ => Err(format!("expected open or periodic, got {s:?}")),
    }
}

fn parse_mode(s: &str) -> Result<GridMode, String> {
    match s {
        "map" => Ok(GridMode::Map),
        "u-slice" => Ok(GridMode::USlice),
        _ => Err(format!("expected map or u-slice, got {s:?}")),
    }
}

fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected start:stop:steps, got {s:?}"));
    }
    let num = |p: &str| p.parse::<f64>().map_err(|_| format!("bad number {p:?} in {s:?}"));
    let steps = parts[2]
        .parse::<usize>()
        .map_err(|_| format!("bad step count {:?} in {s:?}", parts[2]))?;
    Ok(Range::new(num(parts[0])?, num(parts[1])?, steps))
}

#[derive(Subcommand)]
enum Command {
    /// Run the measurement protocol over the configured grid or U slice.
    Sweep,
    /// Map the auxiliary-field order parameter over the grid.
    Auxfield,
    /// Map the single-site mean-field order parameter over the grid.
    Gutzwiller {
        /// Read the second grid axis directly as zκ/U instead of κ/U.
        #[arg(long)]
        zkappa: bool,
    },
    /// Integrate the two-mode reduction at the configured point.
    Twomode {
        /// Initial population imbalance z = (N_b − N_a)/N.
        #[arg(long, default_value_t = 0.0)]
        z0: f64,
        /// Initial relative phase Θ.
        #[arg(long, default_value_t = 0.0)]
        theta0: f64,
        /// Total boson number (defaults to n_total_max).
        #[arg(long)]
        n_total: Option<f64>,
        /// Trace length in characteristic periods.
        #[arg(long, default_value_t = 10.0)]
        periods: f64,
        #[arg(long, default_value_t = 200)]
        steps_per_period: usize,
        /// Integrate complex amplitudes or the (z, Θ) form.
        #[arg(long, default_value = "amplitude", value_parser = ["amplitude", "phase"])]
        representation: String,
        /// Leave the Δμ drive off (static junction).
        #[arg(long)]
        no_drive: bool,
    },
    /// Run the protocol at the configured single point and write J(t).
    Current,
    /// Sine-transform a trace (fresh, or an existing trace.csv).
    Spectrum {
        /// Transform this trace file instead of running the protocol.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
    },
    /// Rank-correlate two exported phase-diagram maps.
    Compare {
        #[arg(long, value_name = "FILE")]
        a: PathBuf,
        #[arg(long, value_name = "FILE")]
        b: PathBuf,
        /// Contour levels for the overlay (repeatable).
        #[arg(long)]
        level: Vec<f64>,
        /// Write a contour-overlay SVG here.
        #[arg(long, value_name = "FILE")]
        svg_out: Option<PathBuf>,
    },
    /// Convert driven-cavity couplings to effective (U, μ).
    MapCavity {
        /// Atoms per cavity S.
        #[arg(long)]
        s: u32,
        #[arg(long)]
        g13: f64,
        #[arg(long)]
        g24: f64,
        #[arg(long)]
        omega: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
    },
    /// Check the configuration and report physics advisories.
    Validate,
}

fn main() -> ExitCode {
    // Usage errors share the config exit code; --help and --version keep
    // their conventional success exit.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = match &cli.config {
        Some(path) => SweepConfig::load(path)?,
        None => SweepConfig::default(),
    };
    cli.overrides.apply(&mut cfg);
    cfg.check()?;

    match cli.command {
        Command::Sweep => sweep(&cfg),
        Command::Auxfield => auxfield(&cfg),
        Command::Gutzwiller { zkappa } => gutzwiller(&cfg, zkappa),
        Command::Twomode {
            z0,
            theta0,
            n_total,
            periods,
            steps_per_period,
            representation,
            no_drive,
        } => twomode(&cfg, z0, theta0, n_total, periods, steps_per_period, &representation, no_drive),
        Command::Current => current(&cfg),
        Command::Spectrum { trace } => spectrum(&cfg, trace.as_deref()),
        Command::Compare { a, b, level, svg_out } => compare(&a, &b, &level, svg_out.as_deref()),
        Command::MapCavity { s, g13, g24, omega, delta, epsilon } => {
            map_cavity(s, g13, g24, omega, delta, epsilon)
        }
        Command::Validate => validate(&cfg),
    }
}

/// Shared tail of every map subcommand: all-failed check, CSV, SVG, metadata.
fn finish_map(
    command: &str,
    cfg: &SweepConfig,
    outcome: &SweepOutcome<f64>,
    started: Instant,
) -> Result<(), Failure> {
    let points = outcome.points.len();
    if points > 0 && outcome.failures == points {
        return Err(Failure::Numerical(format!(
            "all {points} grid points failed; first error: {}",
            first_failure(outcome).unwrap_or("unknown")
        )));
    }
    let dir = &cfg.output.directory;
    if cfg.wants("csv") {
        export::atomic_write(
            &dir.join("phase_diagram.csv"),
            export::phase_diagram_csv(export::grid_rows(&outcome.grid)).as_bytes(),
        )?;
    }
    if cfg.wants("svg") {
        let finite_max = outcome
            .grid
            .values()
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0f64, f64::max);
        let levels = if finite_max > 0.0 { vec![finite_max / 2.0] } else { vec![] };
        let title = format!("psi ({})", outcome.grid.source());
        export::atomic_write(
            &dir.join("phase_diagram.svg"),
            svg::heatmap_svg(&outcome.grid, &levels, &title).as_bytes(),
        )?;
    }
    let elapsed = started.elapsed().as_secs_f64();
    export::atomic_write(
        &dir.join("run.meta"),
        export::run_meta(command, cfg, elapsed, points, outcome.failures).as_bytes(),
    )?;
    println!(
        "{command}: {points} points ({} failed) in {elapsed:.1} s -> {}",
        outcome.failures,
        dir.display()
    );
    Ok(())
}

fn first_failure<'a>(outcome: &'a SweepOutcome<f64>) -> Option<&'a str> {
    outcome.points.iter().find_map(|p| match &p.status {
        PointStatus::Failed(reason) => Some(reason.as_str()),
        _ => None,
    })
}

fn sweep(cfg: &SweepConfig) -> Result<(), Failure> {
    let started = Instant::now();
    let spec = cfg.lattice_spec()?;
    let params = cfg.model_params();
    let opts = cfg.protocol_options();
    match cfg.grid.mode {
        GridMode::Map => {
            let outcome = run_josephson_map(
                &spec,
                &params,
                &cfg.grid.mu_over_u.axis(),
                &cfg.grid.kappa_over_u.axis(),
                &opts,
            )?;
            finish_map("sweep", cfg, &outcome, started)
        }
        GridMode::USlice => {
            let axis =
                if cfg.grid.log_u { cfg.grid.u.log_axis() } else { cfg.grid.u.axis() };
            let points = run_u_slice(&spec, &params, cfg.grid.mu_over_u_fixed, &axis, &opts);
            let failures = points
                .iter()
                .filter(|p| matches!(p.status, PointStatus::Failed(_)))
                .count();
            if !points.is_empty() && failures == points.len() {
                return Err(Failure::Numerical(format!(
                    "all {failures} slice points failed"
                )));
            }
            let dir = &cfg.output.directory;
            if cfg.wants("csv") {
                export::atomic_write(
                    &dir.join("slice.csv"),
                    export::slice_csv(&points, cfg.grid.mu_over_u_fixed).as_bytes(),
                )?;
            }
            let elapsed = started.elapsed().as_secs_f64();
            export::atomic_write(
                &dir.join("run.meta"),
                export::run_meta("sweep", cfg, elapsed, points.len(), failures).as_bytes(),
            )?;
            println!(
                "sweep (u-slice): {} points ({failures} failed) in {elapsed:.1} s -> {}",
                points.len(),
                dir.display()
            );
            Ok(())
        }
    }
}

fn auxfield(cfg: &SweepConfig) -> Result<(), Failure> {
    let started = Instant::now();
    let spec = cfg.lattice_spec()?;
    let outcome = run_auxfield_map(
        &spec,
        &cfg.model_params(),
        &cfg.grid.mu_over_u.axis(),
        &cfg.grid.kappa_over_u.axis(),
        &cfg.protocol_options(),
    )?;
    finish_map("auxfield", cfg, &outcome, started)
}

fn gutzwiller(cfg: &SweepConfig, zkappa: bool) -> Result<(), Failure> {
    let started = Instant::now();
    let mu = cfg.grid.mu_over_u.axis();
    let kappa = cfg.grid.kappa_over_u.axis();
    let gopts = GutzwillerOptions::default();
    let outcome = if zkappa {
        run_gutzwiller_map_scaled(&mu, &kappa, 1.0, &gopts)?
    } else {
        let spec = cfg.lattice_spec()?;
        run_gutzwiller_map(&spec, &mu, &kappa, &gopts)?
    };
    finish_map("gutzwiller", cfg, &outcome, started)
}

#[allow(clippy::too_many_arguments)]
fn twomode(
    cfg: &SweepConfig,
    z0: f64,
    theta0: f64,
    n_total: Option<f64>,
    periods: f64,
    steps_per_period: usize,
    representation: &str,
    no_drive: bool,
) -> Result<(), Failure> {
    if periods <= 0.0 || steps_per_period == 0 {
        return Err(Failure::Config("periods and steps-per-period must be positive".into()));
    }
    let spec = cfg.lattice_spec()?;
    let params = cfg.model_params();
    let mut tp = reduce_params(&spec, &params);
    if !no_drive {
        tp.e_b += params.delta_mu;
    }
    let n = n_total.unwrap_or(params.n_total_max as f64);
    if !(n > 0.0) {
        return Err(Failure::Config(format!("total boson number must be positive, got {n}")));
    }
    // default_step() is 1/200 of the fastest characteristic period.
    let t0 = tp.default_step() * 200.0;
    let dt = t0 / steps_per_period as f64;
    let t_end = periods * t0;
    let meta = TraceMeta {
        mu_over_u: (params.u != 0.0).then(|| params.mu / params.u),
        kappa_over_u: (params.u != 0.0).then(|| params.kappa / params.u),
        g: params.g,
        delta_mu: if no_drive { 0.0 } else { params.delta_mu },
        basis_dim: 2,
    };
    let trace = match representation {
        "phase" => {
            let traj = integrate_population_phase(&tp, z0, theta0, n, dt, t_end)?;
            if let Some(t) = traj.pole {
                println!("note: |z| reached 1 at t = {t}; trace truncated");
            }
            current_from_phase_trajectory(&tp, &traj, meta)?
        }
        _ => {
            let start = from_population_phase(z0, theta0, n);
            let traj = integrate_amplitudes(&tp, start, dt, t_end)?;
            current_from_trajectory(&tp, &traj, meta)?
        }
    };
    let dir = &cfg.output.directory;
    if cfg.wants("csv") {
        export::atomic_write(&dir.join("trace.csv"), export::trace_csv(&trace).as_bytes())?;
    }
    export::atomic_write(
        &dir.join("run.meta"),
        export::run_meta("twomode", cfg, 0.0, trace.times().len(), 0).as_bytes(),
    )?;
    println!(
        "twomode ({representation}): e_a = {}, e_b = {}, U_a = {}, K = {}; J_m = {}",
        tp.e_a,
        tp.e_b,
        tp.u_a,
        tp.coupling,
        peak_current(&trace)
    );
    Ok(())
}

fn current(cfg: &SweepConfig) -> Result<(), Failure> {
    let spec = cfg.lattice_spec()?;
    let record = run_protocol(&spec, &cfg.model_params(), &cfg.protocol_options())?;
    let dir = &cfg.output.directory;
    if cfg.wants("csv") {
        export::atomic_write(&dir.join("trace.csv"), export::trace_csv(&record.trace).as_bytes())?;
    }
    export::atomic_write(
        &dir.join("run.meta"),
        export::run_meta("current", cfg, 0.0, 1, 0).as_bytes(),
    )?;
    println!(
        "J_m = {}, omega* = {}, psi_a = {}, psi_b = {}, sector = {}, dim = {}, drift = {:.3e}, status = {}",
        record.peak_current,
        record.dominant_omega,
        record.psi_a,
        record.psi_b,
        record.sector,
        record.evolution_dim,
        record.norm_drift,
        record.status
    );
    Ok(())
}

fn spectrum(cfg: &SweepConfig, trace_path: Option<&std::path::Path>) -> Result<(), Failure> {
    let dir = &cfg.output.directory;
    let (spectrum, omega_star) = match trace_path {
        Some(path) => {
            let trace = export::read_trace_csv(path)?;
            let tau = cfg.dynamics.tau_delta_mu / cfg.params.delta_mu;
            let omegas = frequency_grid(
                0.0,
                cfg.dynamics.omega_max_over_delta_mu * cfg.params.delta_mu,
                cfg.dynamics.omega_points,
            );
            let s = sine_transform(&trace, &omegas, tau)?;
            let peak = dominant_frequency(&s);
            (s, peak)
        }
        None => {
            let spec = cfg.lattice_spec()?;
            let record = run_protocol(&spec, &cfg.model_params(), &cfg.protocol_options())?;
            let peak = dominant_frequency(&record.spectrum);
            (record.spectrum, peak)
        }
    };
    if cfg.wants("csv") {
        export::atomic_write(
            &dir.join("spectrum.csv"),
            export::spectrum_csv(&spectrum).as_bytes(),
        )?;
    }
    export::atomic_write(
        &dir.join("run.meta"),
        export::run_meta("spectrum", cfg, 0.0, spectrum.omegas.len(), 0).as_bytes(),
    )?;
    if omega_star.no_peak {
        println!("spectrum is identically zero over the window tau = {}", spectrum.tau);
    } else {
        println!("dominant omega = {} (tau = {})", omega_star.omega, spectrum.tau);
    }
    Ok(())
}

fn compare(
    a: &std::path::Path,
    b: &std::path::Path,
    levels: &[f64],
    svg_out: Option<&std::path::Path>,
) -> Result<(), Failure> {
    let grid_a = export::read_phase_diagram_csv(a)?;
    let grid_b = export::read_phase_diagram_csv(b)?;
    let cmp = compare_maps(&grid_a, &grid_b)?;
    println!(
        "spearman = {}\npoints_used = {}\nmean_abs_difference = {}\nmax_abs_difference = {}",
        cmp.spearman, cmp.points_used, cmp.mean_abs_difference, cmp.max_abs_difference
    );
    if let Some(path) = svg_out {
        let levels = if levels.is_empty() {
            let m = grid_a.values().iter().copied().filter(|v| v.is_finite()).fold(0.0f64, f64::max);
            vec![m / 2.0]
        } else {
            levels.to_vec()
        };
        let title = format!("{} vs {}", grid_a.source(), grid_b.source());
        export::atomic_write(
            path,
            svg::overlay_svg(&grid_a, &grid_b, &levels, &title).as_bytes(),
        )?;
    }
    Ok(())
}

fn map_cavity(
    s: u32,
    g13: f64,
    g24: f64,
    omega: f64,
    delta: f64,
    epsilon: f64,
) -> Result<(), Failure> {
    let (u, mu) = lattice::cavity_to_hubbard(&CavityParams { s, g13, omega, g24, delta, epsilon })?;
    println!("u = {u}\nmu = {mu}");
    Ok(())
}

/// Counts basis vectors with per-site occupations ≤ n_max summing to ≤ cap.
fn capped_dimension(sites: usize, n_max: usize, cap: usize) -> u128 {
    let mut counts = vec![0u128; cap + 1];
    counts[0] = 1;
    for _ in 0..sites {
        let mut next = vec![0u128; cap + 1];
        for (total, &ways) in counts.iter().enumerate() {
            for occ in 0..=n_max.min(cap - total) {
                next[total + occ] = next[total + occ].saturating_add(ways);
            }
        }
        counts = next;
    }
    counts.iter().sum()
}

fn validate(cfg: &SweepConfig) -> Result<(), Failure> {
    let spec = cfg.lattice_spec()?;
    let params = cfg.model_params();
    let diag = lattice::validate(&spec, &params);
    for item in &diag.items {
        let tag = match item.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        println!("{tag}: {}", item.message);
    }
    let dim = capped_dimension(spec.total_sites(), params.n_max, params.n_total_max);
    println!(
        "pair basis dimension: {dim} ({} sites, n_max = {}, n_total_max = {})",
        spec.total_sites(),
        params.n_max,
        params.n_total_max
    );
    if let Some(cap) = cfg.dim_cap() {
        if dim > cap as u128 {
            println!(
                "warning: basis dimension {dim} exceeds limits.dim_cap = {cap}; runs will be rejected"
            );
        }
    }
    if diag.has_errors() {
        return Err(Failure::Config("configuration has errors (listed above)".into()));
    }
    println!("configuration ok");
    Ok(())
}
