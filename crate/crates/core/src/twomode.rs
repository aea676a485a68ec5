//! Two-mode mean-field reduction of the junction.
//!
//! Each lattice is condensed into a single mode: φ_a with on-site scale
//! E_a = −2dκ and interaction U_a = U/N, φ_b with E_b = μ − 2dκ, coupled by
//! K = g/N^(1/d). Amplitude equations of motion:
//!   i φ̇_a = (E_a + U_a|φ_a|²) φ_a − K φ_b,
//!   i φ̇_b = E_b φ_b − K φ_a.
//! In population-imbalance/phase variables z = (N_b−N_a)/N, Θ = θ_a−θ_b:
//!   ż = −2K √(1−z²) sin Θ,
//!   Θ̇ = ΔE + Λ z + 2K z cos Θ / √(1−z²),
//! with ΔE = E_b − E_a − U_a N/2 and Λ = U_a N/2. The junction current is
//! J = −2K √(N_aN_b) sin Θ = 2K Im(φ_a* φ_b) = dN_b/dt, matching the ED sign
//! convention. Both representations are integrated with fixed-step classical
//! RK4; the phase form has a coordinate pole at |z| = 1 where integration
//! halts with a flag.

use crate::dynamics::{CurrentTrace, TraceMeta};
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, ModelParams};
use crate::scalar::{cis, count, cr, real, Real, C};

/// Reduced couplings of the two condensate modes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoModeParams<T: Real> {
    pub e_a: T,
    pub e_b: T,
    /// Interaction per particle U/N.
    pub u_a: T,
    /// Inter-mode coupling K.
    pub coupling: T,
}

impl<T: Real> TwoModeParams<T> {
    /// ΔE at total number N: E_b − E_a − U_a N / 2.
    pub fn delta_e(&self, n_total: T) -> T {
        self.e_b - self.e_a - self.u_a * n_total / real(2.0)
    }

    /// Λ at total number N: U_a N / 2.
    pub fn lambda_big(&self, n_total: T) -> T {
        self.u_a * n_total / real(2.0)
    }

    /// Integration step used by default: a 200th of the fastest period.
    pub fn default_step(&self) -> T {
        let mut scale = (self.e_b - self.e_a).abs();
        if self.coupling.abs() > scale {
            scale = self.coupling.abs();
        }
        if scale == T::zero() {
            scale = T::one();
        }
        real::<T>(2.0) * T::pi() / scale / real(200.0)
    }
}

/// Collapses the lattice model onto the two condensate modes.
pub fn reduce_params<T: Real>(spec: &LatticeSpec, params: &ModelParams<T>) -> TwoModeParams<T> {
    let n = count::<T>(spec.sites_per_lattice);
    let d = count::<T>(spec.dimension);
    let band_bottom = -real::<T>(2.0) * d * params.kappa;
    let per_site = match spec.dimension {
        1 => n,
        _ => n.sqrt(),
    };
    TwoModeParams {
        e_a: band_bottom,
        e_b: params.mu + band_bottom,
        u_a: params.u / n,
        coupling: params.g / per_site,
    }
}

/// Complex mode amplitudes (φ_a, φ_b); |φ|² are mode occupations.
#[derive(Clone, Copy, Debug)]
pub struct AmplitudeState<T: Real> {
    pub phi_a: C<T>,
    pub phi_b: C<T>,
}

impl<T: Real> AmplitudeState<T> {
    pub fn occupations(&self) -> (T, T) {
        (self.phi_a.norm_sqr(), self.phi_b.norm_sqr())
    }

    pub fn total(&self) -> T {
        let (na, nb) = self.occupations();
        na + nb
    }

    /// (z, Θ) of this state.
    pub fn population_phase(&self) -> (T, T) {
        let (na, nb) = self.occupations();
        let z = (nb - na) / (na + nb);
        // Θ = θ_a − θ_b = arg(φ_a φ_b*).
        let cross = self.phi_a * self.phi_b.conj();
        (z, cross.im.atan2(cross.re))
    }
}

/// Amplitudes matching (z, Θ, N) in the θ_a = 0 gauge.
pub fn from_population_phase<T: Real>(z: T, theta: T, n_total: T) -> AmplitudeState<T> {
    let half = real::<T>(0.5);
    let na = n_total * half * (T::one() - z);
    let nb = n_total * half * (T::one() + z);
    AmplitudeState { phi_a: cr(na.sqrt()), phi_b: cis(-theta) * nb.sqrt() }
}

/// Conserved mean-field energy.
pub fn energy<T: Real>(tp: &TwoModeParams<T>, s: &AmplitudeState<T>) -> T {
    let (na, nb) = s.occupations();
    tp.e_a * na + tp.e_b * nb + tp.u_a / real(2.0) * na * na
        - real::<T>(2.0) * tp.coupling * (s.phi_a.conj() * s.phi_b).re
}

/// Instantaneous current J = 2K Im(φ_a* φ_b).
pub fn current<T: Real>(tp: &TwoModeParams<T>, s: &AmplitudeState<T>) -> T {
    real::<T>(2.0) * tp.coupling * (s.phi_a.conj() * s.phi_b).im
}

/// Amplitude-representation trajectory on a uniform grid.
#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<AmplitudeState<T>>,
}

/// (z, Θ) trajectory; truncated at `pole` if |z| → 1 was reached.
#[derive(Clone, Debug)]
pub struct PhaseTrajectory<T: Real> {
    pub times: Vec<T>,
    pub zs: Vec<T>,
    pub thetas: Vec<T>,
    pub n_total: T,
    /// Time at which the coordinate pole halted integration.
    pub pole: Option<T>,
}

fn deriv_amplitude<T: Real>(tp: &TwoModeParams<T>, s: &AmplitudeState<T>) -> AmplitudeState<T> {
    let i = C::new(T::zero(), T::one());
    let na = s.phi_a.norm_sqr();
    let da = -i * (s.phi_a * cr(tp.e_a + tp.u_a * na) - s.phi_b * cr(tp.coupling));
    let db = -i * (s.phi_b * cr(tp.e_b) - s.phi_a * cr(tp.coupling));
    AmplitudeState { phi_a: da, phi_b: db }
}

/// Classical RK4 on the amplitude equations.
pub fn integrate_amplitudes<T: Real>(
    tp: &TwoModeParams<T>,
    start: AmplitudeState<T>,
    dt: T,
    t_end: T,
) -> Result<Trajectory<T>> {
    if dt <= T::zero() || t_end <= T::zero() {
        return Err(Error::Config("step and end time must be positive".into()));
    }
    let steps = (t_end / dt).to_f64().map(|x| x.ceil() as usize).unwrap_or(0).max(1);
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut s = start;
    for k in 0..=steps {
        times.push(dt * count::<T>(k));
        states.push(s);
        if k == steps {
            break;
        }
        let half = real::<T>(0.5);
        let sixth = real::<T>(1.0 / 6.0);
        let k1 = deriv_amplitude(tp, &s);
        let k2 = deriv_amplitude(tp, &advance(&s, &k1, dt * half));
        let k3 = deriv_amplitude(tp, &advance(&s, &k2, dt * half));
        let k4 = deriv_amplitude(tp, &advance(&s, &k3, dt));
        s = AmplitudeState {
            phi_a: s.phi_a
                + (k1.phi_a + (k2.phi_a + k3.phi_a) * cr(real::<T>(2.0)) + k4.phi_a)
                    * cr(dt * sixth),
            phi_b: s.phi_b
                + (k1.phi_b + (k2.phi_b + k3.phi_b) * cr(real::<T>(2.0)) + k4.phi_b)
                    * cr(dt * sixth),
        };
    }
    Ok(Trajectory { times, states })
}

fn advance<T: Real>(s: &AmplitudeState<T>, d: &AmplitudeState<T>, dt: T) -> AmplitudeState<T> {
    AmplitudeState { phi_a: s.phi_a + d.phi_a * cr(dt), phi_b: s.phi_b + d.phi_b * cr(dt) }
}

fn deriv_phase<T: Real>(tp: &TwoModeParams<T>, n_total: T, z: T, theta: T) -> (T, T) {
    let one = T::one();
    let root = (one - z * z).sqrt();
    let two_k = real::<T>(2.0) * tp.coupling;
    let dz = -two_k * root * theta.sin();
    let dtheta = tp.delta_e(n_total) + tp.lambda_big(n_total) * z + two_k * z * theta.cos() / root;
    (dz, dtheta)
}

/// Classical RK4 on the (z, Θ) equations. Near |z| = 1 the equations are
/// singular; integration then stops early with `pole` set (the returned
/// trajectory keeps every completed step).
pub fn integrate_population_phase<T: Real>(
    tp: &TwoModeParams<T>,
    z0: T,
    theta0: T,
    n_total: T,
    dt: T,
    t_end: T,
) -> Result<PhaseTrajectory<T>> {
    if dt <= T::zero() || t_end <= T::zero() {
        return Err(Error::Config("step and end time must be positive".into()));
    }
    if z0.abs() >= T::one() {
        return Err(Error::Config("population imbalance must satisfy |z| < 1".into()));
    }
    let steps = (t_end / dt).to_f64().map(|x| x.ceil() as usize).unwrap_or(0).max(1);
    let mut traj = PhaseTrajectory {
        times: Vec::with_capacity(steps + 1),
        zs: Vec::with_capacity(steps + 1),
        thetas: Vec::with_capacity(steps + 1),
        n_total,
        pole: None,
    };
    let guard = T::one() - real::<T>(1e-12);
    let (mut z, mut theta) = (z0, theta0);
    for k in 0..=steps {
        traj.times.push(dt * count::<T>(k));
        traj.zs.push(z);
        traj.thetas.push(theta);
        if k == steps {
            break;
        }
        let half = real::<T>(0.5);
        let sixth = real::<T>(1.0 / 6.0);
        let (dz1, dt1) = deriv_phase(tp, n_total, z, theta);
        let (dz2, dt2) = deriv_phase(tp, n_total, z + dz1 * dt * half, theta + dt1 * dt * half);
        let (dz3, dt3) = deriv_phase(tp, n_total, z + dz2 * dt * half, theta + dt2 * dt * half);
        let (dz4, dt4) = deriv_phase(tp, n_total, z + dz3 * dt, theta + dt3 * dt);
        let two = real::<T>(2.0);
        let znew = z + (dz1 + two * (dz2 + dz3) + dz4) * dt * sixth;
        let tnew = theta + (dt1 + two * (dt2 + dt3) + dt4) * dt * sixth;
        if !(znew.is_finite() && tnew.is_finite()) || znew.abs() >= guard {
            traj.pole = Some(dt * count::<T>(k + 1));
            break;
        }
        z = znew;
        theta = tnew;
    }
    Ok(traj)
}

/// Current trace from an amplitude trajectory.
pub fn current_from_trajectory<T: Real>(
    tp: &TwoModeParams<T>,
    traj: &Trajectory<T>,
    meta: TraceMeta<T>,
) -> Result<CurrentTrace<T>> {
    let values = traj.states.iter().map(|s| current(tp, s)).collect();
    CurrentTrace::new(traj.times.clone(), values, meta)
}

/// Current trace from a (z, Θ) trajectory: J = −2K √(N_aN_b) sin Θ.
pub fn current_from_phase_trajectory<T: Real>(
    tp: &TwoModeParams<T>,
    traj: &PhaseTrajectory<T>,
    meta: TraceMeta<T>,
) -> Result<CurrentTrace<T>> {
    let half = real::<T>(0.5);
    let values = traj
        .zs
        .iter()
        .zip(&traj.thetas)
        .map(|(&z, &theta)| {
            let na = traj.n_total * half * (T::one() - z);
            let nb = traj.n_total * half * (T::one() + z);
            -real::<T>(2.0) * tp.coupling * (na * nb).sqrt() * theta.sin()
        })
        .collect();
    CurrentTrace::new(traj.times.clone(), values, meta)
}

/// Mean-field current amplitude 2 g N^((d−1)/d) ψ_a ψ_b; `contact_scale` is
/// N^((d−1)/d) (see [`LatticeSpec::contact_scale`]).
pub fn meanfield_amplitude<T: Real>(g: T, contact_scale: T, psi_a: T, psi_b: T) -> T {
    real::<T>(2.0) * g * contact_scale * psi_a * psi_b
}

/// Frozen-population envelope 2K√(N_a(0)N_b(0)) against the instantaneous
/// maximum of 2K√(N_a(t)N_b(t)): reports how much population transfer bends
/// the amplitude estimate.
#[derive(Clone, Copy, Debug)]
pub struct EnvelopeReport<T: Real> {
    pub frozen: T,
    pub instantaneous_max: T,
    pub relative_difference: T,
}

pub fn envelope_report<T: Real>(tp: &TwoModeParams<T>, traj: &Trajectory<T>) -> EnvelopeReport<T> {
    let two_k = real::<T>(2.0) * tp.coupling;
    let geo = |s: &AmplitudeState<T>| {
        let (na, nb) = s.occupations();
        two_k * (na * nb).sqrt()
    };
    let frozen = geo(&traj.states[0]);
    let instantaneous_max =
        traj.states.iter().map(geo).fold(T::zero(), |m, x| if x > m { x } else { m });
    let denom = if frozen.abs() > real(1e-12) { frozen.abs() } else { real(1e-12) };
    EnvelopeReport {
        frozen,
        instantaneous_max,
        relative_difference: (instantaneous_max - frozen).abs() / denom,
    }
}
