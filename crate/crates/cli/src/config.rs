//! Run configuration: one TOML file, every field overridable from the
//! command line. Defaults reproduce the reference setup (two-site chains,
//! κ = 1, g = 0.1, Δμ = 100, a 40×40 map over μ/U ∈ [0, 3], κ/U ∈ [0, 0.3]).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use mottlobe_core::lattice::{build_pair_lattice, Boundary, LatticeSpec};
use mottlobe_core::phase::linspace;
use mottlobe_core::pipeline::ProtocolOptions;
use mottlobe_core::ModelParams;

use crate::Failure;

/// Inclusive axis description; `steps` is the number of grid points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Range {
    pub fn new(start: f64, stop: f64, steps: usize) -> Self {
        Self { start, stop, steps }
    }

    pub fn axis(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.steps)
    }

    /// Geometric spacing for decade-spanning sweeps (requires start > 0).
    pub fn log_axis(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.start];
        }
        let ratio = self.stop / self.start;
        (0..self.steps)
            .map(|k| self.start * ratio.powf(k as f64 / (self.steps - 1) as f64))
            .collect()
    }

    fn check(&self, name: &str) -> Result<(), Failure> {
        if self.steps == 0 {
            return Err(Failure::Config(format!("grid.{name}: steps must be at least 1")));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Failure::Config(format!("grid.{name}: bounds must be finite")));
        }
        if self.stop < self.start {
            return Err(Failure::Config(format!(
                "grid.{name}: stop = {} is below start = {}",
                self.stop, self.start
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeBlock {
    pub dimension: usize,
    pub sites_per_lattice: usize,
    pub boundary: Boundary,
}

impl Default for LatticeBlock {
    fn default() -> Self {
        Self { dimension: 1, sites_per_lattice: 2, boundary: Boundary::Open }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsBlock {
    pub kappa: f64,
    pub u: f64,
    pub mu: f64,
    pub g: f64,
    pub delta_mu: f64,
    pub lambda: f64,
    pub n_max: usize,
    pub n_total_max: usize,
    /// Prepare ground states with the global −μ N̂ shift (lattice A at
    /// chemical potential μ, lattice B as superfluid remainder).
    pub grand_canonical: bool,
}

impl Default for ParamsBlock {
    fn default() -> Self {
        let p = ModelParams::default();
        Self {
            kappa: p.kappa,
            u: p.u,
            mu: p.mu,
            g: p.g,
            delta_mu: p.delta_mu,
            lambda: p.lambda,
            n_max: p.n_max,
            n_total_max: p.n_total_max,
            grand_canonical: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridMode {
    #[serde(rename = "map")]
    Map,
    #[serde(rename = "u-slice")]
    USlice,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridBlock {
    pub mode: GridMode,
    /// Map mode: first axis.
    pub mu_over_u: Range,
    /// Map mode: second axis.
    pub kappa_over_u: Range,
    /// Slice mode: the swept U axis (κ, g, Δμ stay fixed).
    pub u: Range,
    /// Slice mode: μ/U held at this ratio.
    pub mu_over_u_fixed: f64,
    /// Slice mode: space the U axis geometrically.
    pub log_u: bool,
}

impl Default for GridBlock {
    fn default() -> Self {
        Self {
            mode: GridMode::Map,
            mu_over_u: Range::new(0.0, 3.0, 40),
            kappa_over_u: Range::new(0.0, 0.3, 40),
            u: Range::new(0.1, 20.0, 40),
            mu_over_u_fixed: 0.5,
            log_u: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsBlock {
    /// Sine-transform window τ in units of 1/Δμ.
    pub tau_delta_mu: f64,
    pub samples_per_period: usize,
    pub min_periods: usize,
    pub omega_max_over_delta_mu: f64,
    pub omega_points: usize,
    pub psi_b_threshold: f64,
}

impl Default for DynamicsBlock {
    fn default() -> Self {
        let o = ProtocolOptions::<f64>::default();
        Self {
            tau_delta_mu: o.tau_delta_mu,
            samples_per_period: o.samples_per_period,
            min_periods: o.min_periods,
            omega_max_over_delta_mu: o.omega_max_over_delta_mu,
            omega_points: o.omega_points,
            psi_b_threshold: o.psi_b_threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub directory: PathBuf,
    /// Any of "csv", "svg"; order is irrelevant.
    pub formats: Vec<String>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { directory: PathBuf::from("out"), formats: vec!["csv".into()] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitsBlock {
    /// Hard cap on the Hilbert-space dimension; 0 disables the cap.
    pub dim_cap: usize,
}

impl Default for LimitsBlock {
    fn default() -> Self {
        Self { dim_cap: 0 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub lattice: LatticeBlock,
    pub params: ParamsBlock,
    pub grid: GridBlock,
    pub dynamics: DynamicsBlock,
    pub output: OutputBlock,
    pub limits: LimitsBlock,
}

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
    }

    /// Structural checks beyond what serde enforces. Physics advisories
    /// (weak coupling, Δμ scale) are `validate`'s business, not errors here.
    pub fn check(&self) -> Result<(), Failure> {
        self.grid.mu_over_u.check("mu_over_u")?;
        self.grid.kappa_over_u.check("kappa_over_u")?;
        self.grid.u.check("u")?;
        if self.grid.log_u && self.grid.u.start <= 0.0 {
            return Err(Failure::Config(
                "grid.u: log spacing needs start > 0".into(),
            ));
        }
        if !self.grid.mu_over_u_fixed.is_finite() {
            return Err(Failure::Config("grid.mu_over_u_fixed must be finite".into()));
        }
        if self.dynamics.samples_per_period == 0
            || self.dynamics.min_periods == 0
            || self.dynamics.omega_points == 0
        {
            return Err(Failure::Config(
                "dynamics: samples_per_period, min_periods, and omega_points must be positive"
                    .into(),
            ));
        }
        for f in [
            ("tau_delta_mu", self.dynamics.tau_delta_mu),
            ("omega_max_over_delta_mu", self.dynamics.omega_max_over_delta_mu),
        ] {
            if !(f.1 > 0.0) {
                return Err(Failure::Config(format!("dynamics.{} must be positive", f.0)));
            }
        }
        if !(self.dynamics.psi_b_threshold >= 0.0) {
            return Err(Failure::Config("dynamics.psi_b_threshold must be >= 0".into()));
        }
        for fmt in &self.output.formats {
            if fmt != "csv" && fmt != "svg" {
                return Err(Failure::Config(format!(
                    "output.formats: unknown format {fmt:?} (expected \"csv\" or \"svg\")"
                )));
            }
        }
        Ok(())
    }

    pub fn lattice_spec(&self) -> Result<LatticeSpec, Failure> {
        build_pair_lattice(
            self.lattice.dimension,
            self.lattice.sites_per_lattice,
            self.lattice.boundary,
        )
        .map_err(|e| Failure::Config(e.to_string()))
    }

    pub fn model_params(&self) -> ModelParams {
        ModelParams {
            kappa: self.params.kappa,
            u: self.params.u,
            mu: self.params.mu,
            g: self.params.g,
            delta_mu: self.params.delta_mu,
            lambda: self.params.lambda,
            n_max: self.params.n_max,
            n_total_max: self.params.n_total_max,
        }
    }

    pub fn protocol_options(&self) -> ProtocolOptions<f64> {
        ProtocolOptions {
            tau_delta_mu: self.dynamics.tau_delta_mu,
            samples_per_period: self.dynamics.samples_per_period,
            min_periods: self.dynamics.min_periods,
            omega_max_over_delta_mu: self.dynamics.omega_max_over_delta_mu,
            omega_points: self.dynamics.omega_points,
            psi_b_threshold: self.dynamics.psi_b_threshold,
            grand_canonical: self.params.grand_canonical,
            dim_cap: self.dim_cap(),
            ..ProtocolOptions::default()
        }
    }

    pub fn dim_cap(&self) -> Option<usize> {
        (self.limits.dim_cap > 0).then_some(self.limits.dim_cap)
    }

    pub fn wants(&self, format: &str) -> bool {
        self.output.formats.iter().any(|f| f == format)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = SweepConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back: SweepConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        cfg.check().unwrap();
    }

    #[test]
    fn partial_file_fills_in_defaults() {
        let cfg: SweepConfig = toml::from_str(
            "[params]\ng = 0.2\n\n[grid]\nmode = \"u-slice\"\nmu_over_u_fixed = 0.41\n",
        )
        .unwrap();
        assert_eq!(cfg.params.g, 0.2);
        assert_eq!(cfg.params.kappa, 1.0);
        assert_eq!(cfg.grid.mode, GridMode::USlice);
        assert_eq!(cfg.grid.mu_over_u_fixed, 0.41);
        assert_eq!(cfg.grid.mu_over_u, Range::new(0.0, 3.0, 40));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<SweepConfig>("[params]\ngg = 0.2\n").is_err());
        assert!(toml::from_str::<SweepConfig>("[paramz]\ng = 0.2\n").is_err());
    }

    #[test]
    fn structural_checks_catch_bad_grids() {
        let mut cfg = SweepConfig::default();
        cfg.grid.mu_over_u.steps = 0;
        assert!(cfg.check().is_err());

        let mut cfg = SweepConfig::default();
        cfg.grid.u = Range::new(0.0, 20.0, 10);
        cfg.grid.log_u = true;
        assert!(cfg.check().is_err());
        cfg.grid.log_u = false;
        cfg.check().unwrap();

        let mut cfg = SweepConfig::default();
        cfg.output.formats = vec!["csv".into(), "png".into()];
        assert!(cfg.check().is_err());
    }

    #[test]
    fn log_axis_spans_the_decades() {
        let r = Range::new(0.1, 10.0, 5);
        let axis = r.log_axis();
        assert_eq!(axis.len(), 5);
        assert!((axis[0] - 0.1).abs() < 1e-15);
        assert!((axis[2] - 1.0).abs() < 1e-12);
        assert!((axis[4] - 10.0).abs() < 1e-12);
    }
}
