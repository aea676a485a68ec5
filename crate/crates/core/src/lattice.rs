//! Lattice geometry and model parameters.
//!
//! Two identical d-dimensional lattices A and B are coupled through a contact
//! region C: in d = 1 a single shared site pair, in d = 2 one edge of the
//! square (⌈N^(1/2)⌉ sites). Site indices are 0-based throughout; a combined
//! A∪B system indexes A as `0..n` and B as `n..2n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{count, real, report, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Geometry of the coupled pair of lattices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    pub dimension: usize,
    pub sites_per_lattice: usize,
    /// Intra-lattice bonds of A, each bond listed once as (i, j) with i < j.
    pub edges_a: Vec<(usize, usize)>,
    /// Intra-lattice bonds of B, in A-local indices (identical to `edges_a`).
    pub edges_b: Vec<(usize, usize)>,
    /// Contact sites (A-local indices); site i of A couples to site i of B.
    pub contact_sites: Vec<usize>,
    pub boundary: Boundary,
}

impl LatticeSpec {
    /// Number of sites in the combined A∪B system.
    pub fn total_sites(&self) -> usize {
        2 * self.sites_per_lattice
    }

    /// Index of B-lattice site `i` in the combined system.
    pub fn b_site(&self, i: usize) -> usize {
        self.sites_per_lattice + i
    }

    /// |C|^(d-1)/d scaling factor N^((d-1)/d) used by the mean-field current
    /// amplitude: 1 in d = 1, √N in d = 2.
    pub fn contact_scale<T: Real>(&self) -> T {
        let n = count::<T>(self.sites_per_lattice);
        match self.dimension {
            1 => T::one(),
            _ => n.sqrt(),
        }
    }

    /// Lattice coordination number z = 2d.
    pub fn coordination(&self) -> usize {
        2 * self.dimension
    }
}

/// Couplings of the Bose-Hubbard pair, in units fixed by the caller
/// (the CLI works in units of κ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams<T: Real> {
    /// Hopping amplitude κ ≥ 0, common to both lattices.
    pub kappa: T,
    /// On-site repulsion U ≥ 0 of lattice A.
    pub u: T,
    /// Chemical-potential offset μ of lattice B (doubles as the grand-
    /// canonical potential of A when the global shift term is enabled).
    pub mu: T,
    /// Junction coupling g ≥ 0 across the contact region.
    pub g: T,
    /// Drive strength Δμ applied to lattice B during evolution.
    pub delta_mu: T,
    /// Symmetry-breaking field λ ≥ 0 of the auxiliary-field branch.
    pub lambda: T,
    /// Per-site occupation cap of the Fock space.
    pub n_max: usize,
    /// Cap on the total particle number explored by sector searches.
    pub n_total_max: usize,
}

impl<T: Real> ModelParams<T> {
    /// Slice/sweep parameters at fixed ratios: given U and μ/U, fill in μ.
    pub fn at_ratio(mut self, u: T, mu_over_u: T) -> Self {
        self.u = u;
        self.mu = mu_over_u * u;
        self
    }
}

impl<T: Real> Default for ModelParams<T> {
    fn default() -> Self {
        Self {
            kappa: T::one(),
            u: T::one(),
            mu: real(0.5),
            g: real(0.1),
            delta_mu: real(100.0),
            lambda: real(0.1),
            n_max: 4,
            n_total_max: 8,
        }
    }
}

/// Raw couplings of the driven-cavity realization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavityParams<T: Real> {
    /// Atoms per cavity.
    pub s: u32,
    /// Raman coupling g13 between levels 1 and 3.
    pub g13: T,
    /// Pump Rabi frequency Ω.
    pub omega: T,
    /// Coupling g24 driving the two-photon interaction.
    pub g24: T,
    /// Detuning Δ of the interaction channel.
    pub delta: T,
    /// Two-photon detuning ε setting the chemical potential.
    pub epsilon: T,
}

/// Maps cavity couplings onto the effective Hubbard pair (U, μ):
/// U = S·(g13/Ω)²·g24²/Δ and μ = S·(g13/Ω)²·ε.
pub fn cavity_to_hubbard<T: Real>(c: &CavityParams<T>) -> Result<(T, T)> {
    if c.omega == T::zero() {
        return Err(Error::CavityDegenerate("pump Rabi frequency Ω is zero"));
    }
    let s = T::from_u32(c.s).expect("atom count fits the scalar");
    let photon = c.g13 / c.omega;
    let weight = s * photon * photon;
    let u = if c.g24 == T::zero() {
        T::zero()
    } else {
        if c.delta == T::zero() {
            return Err(Error::CavityDegenerate("detuning Δ is zero with g24 ≠ 0"));
        }
        weight * c.g24 * c.g24 / c.delta
    };
    let mu = weight * c.epsilon;
    Ok((u, mu))
}

/// Builds the standard pair geometry: a chain (d = 1) or square (d = 2) with
/// the stated boundary, plus the contact region (site 0 in d = 1, the first
/// row in d = 2).
pub fn build_pair_lattice(
    dimension: usize,
    sites_per_lattice: usize,
    boundary: Boundary,
) -> Result<LatticeSpec> {
    if sites_per_lattice == 0 {
        return Err(Error::BadSiteCount { sites: 0, dimension });
    }
    let (edges, contact_sites) = match dimension {
        1 => {
            let mut edges: Vec<(usize, usize)> = (0..sites_per_lattice.saturating_sub(1))
                .map(|i| (i, i + 1))
                .collect();
            // The wrap bond duplicates (0, 1) on a 2-site ring; keep bonds unique.
            if boundary == Boundary::Periodic && sites_per_lattice >= 3 {
                edges.push((0, sites_per_lattice - 1));
            }
            (edges, vec![0])
        }
        2 => {
            let m = (sites_per_lattice as f64).sqrt().round() as usize;
            if m * m != sites_per_lattice {
                return Err(Error::BadSiteCount { sites: sites_per_lattice, dimension });
            }
            let idx = |r: usize, c: usize| r * m + c;
            let mut edges = Vec::new();
            for r in 0..m {
                for c in 0..m {
                    if c + 1 < m {
                        edges.push((idx(r, c), idx(r, c + 1)));
                    }
                    if r + 1 < m {
                        edges.push((idx(r, c), idx(r + 1, c)));
                    }
                    if boundary == Boundary::Periodic && m >= 3 {
                        if c + 1 == m {
                            edges.push((idx(r, 0), idx(r, c)));
                        }
                        if r + 1 == m {
                            edges.push((idx(0, c), idx(r, c)));
                        }
                    }
                }
            }
            edges.sort_unstable();
            ((edges), (0..m).collect())
        }
        d => return Err(Error::InvalidDimension(d)),
    };
    Ok(LatticeSpec {
        dimension,
        sites_per_lattice,
        edges_a: edges.clone(),
        edges_b: edges,
        contact_sites,
        boundary,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

/// Outcome of [`validate`]: hard violations plus physics advisories.
#[derive(Clone, Debug, Default)]
pub struct Diagnostics {
    pub items: Vec<Diagnostic>,
}

impl Diagnostics {
    fn push(&mut self, severity: Severity, message: String) {
        self.items.push(Diagnostic { severity, message });
    }

    pub fn has_errors(&self) -> bool {
        self.items.iter().any(|d| d.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.items.iter().filter(|d| d.severity == Severity::Warning)
    }
}

/// Checks a lattice/parameter combination and reports violations (errors) and
/// regime advisories (warnings). Never panics; callers decide how hard to
/// fail.
pub fn validate<T: Real>(spec: &LatticeSpec, params: &ModelParams<T>) -> Diagnostics {
    let mut diag = Diagnostics::default();
    let n = spec.sites_per_lattice;

    if spec.dimension != 1 && spec.dimension != 2 {
        diag.push(Severity::Error, format!("unsupported dimension {}", spec.dimension));
    }
    if n == 0 {
        diag.push(Severity::Error, "lattice has no sites".into());
    }
    let mut seen = std::collections::BTreeSet::new();
    for &(i, j) in spec.edges_a.iter().chain(&spec.edges_b) {
        if i >= n || j >= n {
            diag.push(Severity::Error, format!("bond ({i}, {j}) leaves the lattice"));
        }
        if i == j {
            diag.push(Severity::Error, format!("bond ({i}, {j}) is a self-loop"));
        }
    }
    for &(i, j) in &spec.edges_a {
        if !seen.insert((i.min(j), i.max(j))) {
            diag.push(Severity::Error, format!("duplicate bond ({i}, {j}) in lattice A"));
        }
    }
    let canon = |edges: &[(usize, usize)]| {
        let mut e: Vec<_> = edges.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
        e.sort_unstable();
        e
    };
    if canon(&spec.edges_a) != canon(&spec.edges_b) {
        diag.push(Severity::Error, "lattices A and B must share the same bond set".into());
    }
    if spec.contact_sites.is_empty() {
        diag.push(Severity::Error, "contact region is empty".into());
    }
    let mut contact_seen = std::collections::BTreeSet::new();
    for &c in &spec.contact_sites {
        if c >= n {
            diag.push(Severity::Error, format!("contact site {c} leaves the lattice"));
        }
        if !contact_seen.insert(c) {
            diag.push(Severity::Error, format!("duplicate contact site {c}"));
        }
    }

    if params.n_max == 0 {
        diag.push(Severity::Error, "per-site cap n_max must be at least 1".into());
    }
    let capacity = params.n_max * spec.total_sites();
    if params.n_total_max > capacity {
        diag.push(
            Severity::Error,
            format!(
                "n_total_max = {} exceeds the basis capacity {} (n_max × sites)",
                params.n_total_max, capacity
            ),
        );
    }
    for (name, v) in [
        ("kappa", params.kappa),
        ("u", params.u),
        ("g", params.g),
        ("lambda", params.lambda),
    ] {
        if v < T::zero() {
            diag.push(Severity::Error, format!("{name} must be non-negative, got {}", report(v)));
        }
    }

    if params.g >= params.kappa && params.kappa > T::zero() {
        diag.push(
            Severity::Warning,
            format!(
                "g = {} is not small against kappa = {}; the junction is outside the weak-coupling regime",
                report(params.g),
                report(params.kappa)
            ),
        );
    }
    let scale = if params.u > params.kappa { params.u } else { params.kappa };
    if params.delta_mu != T::zero() && params.delta_mu < real::<T>(10.0) * scale {
        diag.push(
            Severity::Warning,
            format!(
                "delta_mu = {} is not large against max(U, kappa) = {}; the junction frequency may not dominate the spectrum",
                report(params.delta_mu),
                report(scale)
            ),
        );
    }
    if params.n_max < 2 {
        diag.push(
            Severity::Warning,
            "n_max < 2 cannot represent on-site repulsion; densities will pin at the cap".into(),
        );
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_of_two_with_single_contact() {
        let spec = build_pair_lattice(1, 2, Boundary::Open).unwrap();
        assert_eq!(spec.sites_per_lattice, 2);
        assert_eq!(spec.edges_a, vec![(0, 1)]);
        assert_eq!(spec.edges_b, spec.edges_a);
        assert_eq!(spec.contact_sites, vec![0]);
        assert_eq!(spec.total_sites(), 4);
        assert_eq!(spec.b_site(1), 3);
    }

    #[test]
    fn single_site_has_no_bonds() {
        let spec = build_pair_lattice(1, 1, Boundary::Open).unwrap();
        assert!(spec.edges_a.is_empty());
        assert_eq!(spec.contact_sites, vec![0]);
    }

    #[test]
    fn square_of_four_contacts_along_one_edge() {
        let spec = build_pair_lattice(2, 4, Boundary::Open).unwrap();
        let mut edges = spec.edges_a.clone();
        edges.sort_unstable();
        assert_eq!(edges, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(spec.contact_sites, vec![0, 1]);
        assert_eq!(spec.contact_scale::<f64>(), 2.0);
    }

    #[test]
    fn periodic_chain_bond_counts() {
        // Wrap bonds only appear once sites are distinct from the open bonds.
        for n in 2..=8 {
            let open = build_pair_lattice(1, n, Boundary::Open).unwrap();
            let ring = build_pair_lattice(1, n, Boundary::Periodic).unwrap();
            assert_eq!(open.edges_a.len(), n - 1);
            let expect = if n >= 3 { n } else { n - 1 };
            assert_eq!(ring.edges_a.len(), expect, "n = {n}");
            let mut uniq = ring.edges_a.clone();
            uniq.sort_unstable();
            uniq.dedup();
            assert_eq!(uniq.len(), ring.edges_a.len());
        }
    }

    #[test]
    fn periodic_square_bond_count() {
        let ring = build_pair_lattice(2, 9, Boundary::Periodic).unwrap();
        // 2 bonds per site on a torus.
        assert_eq!(ring.edges_a.len(), 18);
        let mut uniq = ring.edges_a.clone();
        uniq.sort_unstable();
        uniq.dedup();
        assert_eq!(uniq.len(), 18);
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(matches!(build_pair_lattice(3, 4, Boundary::Open), Err(Error::InvalidDimension(3))));
        assert!(matches!(
            build_pair_lattice(2, 5, Boundary::Open),
            Err(Error::BadSiteCount { sites: 5, dimension: 2 })
        ));
        assert!(build_pair_lattice(1, 0, Boundary::Open).is_err());
    }

    #[test]
    fn cavity_map_reference_points() {
        let c =
            CavityParams::<f64> { s: 2, g13: 1.0, omega: 10.0, g24: 3.0, delta: 2.0, epsilon: 5.0 };
        let (u, mu) = cavity_to_hubbard(&c).unwrap();
        assert!((u - 2.0 * 0.01 * 4.5).abs() < 1e-15);
        assert!((mu - 2.0 * 0.01 * 5.0).abs() < 1e-15);

        // g24 = 0 kills the interaction channel without touching mu.
        let free = CavityParams { g24: 0.0, delta: 0.0, ..c };
        let (u, mu) = cavity_to_hubbard(&free).unwrap();
        assert_eq!(u, 0.0);
        assert!((mu - 0.1).abs() < 1e-15);

        let bad = CavityParams { omega: 0.0, ..c };
        assert!(cavity_to_hubbard(&bad).is_err());
        let bad = CavityParams { delta: 0.0, ..c };
        assert!(cavity_to_hubbard(&bad).is_err());
    }

    #[test]
    fn cavity_map_scales_linearly_in_atom_number() {
        let base =
            CavityParams::<f64> { s: 1, g13: 0.7, omega: 4.0, g24: 1.3, delta: 0.9, epsilon: 2.1 };
        let (u1, mu1) = cavity_to_hubbard(&base).unwrap();
        for s in 2..=6u32 {
            let (u, mu) = cavity_to_hubbard(&CavityParams { s, ..base }).unwrap();
            assert!((u - f64::from(s) * u1).abs() < 1e-12);
            assert!((mu - f64::from(s) * mu1).abs() < 1e-12);
        }
    }

    #[test]
    fn validate_flags_regimes_and_violations() {
        let spec = build_pair_lattice(1, 2, Boundary::Open).unwrap();
        let params = ModelParams::<f64>::default();
        let diag = validate(&spec, &params);
        assert!(!diag.has_errors(), "{:?}", diag.items);

        // Strong junction: warning, not error.
        let strong = ModelParams { g: 2.0, ..params };
        let diag = validate(&spec, &strong);
        assert!(!diag.has_errors());
        assert!(diag.warnings().any(|d| d.message.contains("weak-coupling")));

        // Broken geometry and negative couplings are hard errors.
        let mut broken = spec.clone();
        broken.contact_sites = vec![7];
        assert!(validate(&broken, &params).has_errors());
        let negative = ModelParams { u: -1.0, ..params };
        assert!(validate(&spec, &negative).has_errors());
        let overfull = ModelParams { n_total_max: 100, ..params };
        assert!(validate(&spec, &overfull).has_errors());
    }
}
