//! Eigensolvers: dense Hermitian decomposition for small blocks, Lanczos with
//! full reorthogonalization for large ones, and the sector-searched ground
//! state used by the measurement protocol.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fock::QuantumState;
use crate::hamiltonian::HamiltonianBundle;
use crate::scalar::{cr, real, report, Real, C};
use crate::sparse::SparseOperator;

/// Eigenpairs sorted by ascending eigenvalue; column k of `vectors` belongs
/// to `energies[k]`.
#[derive(Clone, Debug)]
pub struct Eigendecomposition<T: Real> {
    pub energies: Vec<T>,
    pub vectors: DMatrix<C<T>>,
}

/// Full dense eigendecomposition of a Hermitian operator.
pub fn dense_eig<T: Real>(op: &SparseOperator<T>) -> Result<Eigendecomposition<T>> {
    if !op.is_square() {
        return Err(Error::Unsupported("eigendecomposition of a rectangular operator"));
    }
    let scale = op.max_abs_entry();
    let herm_tol = real::<T>(1e-10) * if scale > T::one() { scale } else { T::one() };
    let residual = op.hermiticity_residual();
    if residual > herm_tol {
        return Err(Error::NotHermitian(report(residual)));
    }
    let dim = op.nrows();
    if dim == 0 {
        return Ok(Eigendecomposition { energies: Vec::new(), vectors: DMatrix::zeros(0, 0) });
    }
    let se = op.to_dense().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).expect("eigenvalues are finite")
    });
    let energies = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(dim, dim);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &se.eigenvectors.column(i));
    }
    Ok(Eigendecomposition { energies, vectors })
}

/// Options for [`ground_state`].
#[derive(Clone, Copy, Debug)]
pub struct GroundStateOptions {
    /// Blocks up to this dimension are solved densely; larger ones with
    /// Lanczos.
    pub dense_dim_cap: usize,
    pub lanczos_max_iter: usize,
    /// Ritz residual target, relative to the eigenvalue scale.
    pub lanczos_tol: f64,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        Self { dense_dim_cap: 2000, lanczos_max_iter: 300, lanczos_tol: 1e-13 }
    }
}

/// Extremal (lowest) eigenpair via Lanczos with full reorthogonalization and
/// a deterministic start vector.
pub fn lanczos_ground<T: Real>(
    op: &SparseOperator<T>,
    max_iter: usize,
    tol: f64,
) -> Result<(T, DVector<C<T>>)> {
    if !op.is_square() {
        return Err(Error::Unsupported("Lanczos on a rectangular operator"));
    }
    let dim = op.nrows();
    if dim == 0 {
        return Err(Error::DimensionMismatch { left: 0, right: 0 });
    }
    if dim == 1 {
        let e = op.entries().first().map(|&(_, _, v)| v.re).unwrap_or_else(T::zero);
        return Ok((e, DVector::from_element(1, cr(T::one()))));
    }
    let tol = real::<T>(tol);
    let mut vs: Vec<DVector<C<T>>> = Vec::new();
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new();

    let mut v = seed_vector::<T>(dim);
    let norm = v.norm();
    v /= cr(norm);
    vs.push(v);

    for k in 0..max_iter.min(dim) {
        let mut w = op.apply(&vs[k])?;
        if k > 0 {
            w -= &vs[k - 1] * cr(betas[k - 1]);
        }
        let alpha = vs[k].dotc(&w).re;
        w -= &vs[k] * cr(alpha);
        alphas.push(alpha);
        // Full reorthogonalization keeps the Krylov basis clean at these
        // dimensions; do it twice for numerical safety.
        for _ in 0..2 {
            for u in &vs {
                let proj = u.dotc(&w);
                w -= u * proj;
            }
        }
        let beta = w.norm();

        let (theta, s) = tridiag_lowest(&alphas, &betas)?;
        let scale = if theta.abs() > T::one() { theta.abs() } else { T::one() };
        let ritz_residual = beta * s[s.len() - 1].abs();
        let converged = ritz_residual <= tol * scale || beta <= tol * scale || k + 1 == dim;
        if converged {
            let mut ground = DVector::zeros(dim);
            for (i, u) in vs.iter().enumerate() {
                ground += u * cr(s[i]);
            }
            let norm = ground.norm();
            if norm == T::zero() {
                return Err(Error::NonConvergence(k + 1));
            }
            ground /= cr(norm);
            return Ok((theta, ground));
        }
        betas.push(beta);
        vs.push(w / cr(beta));
    }
    Err(Error::NonConvergence(max_iter))
}

/// Lowest eigenpair of the symmetric tridiagonal (alphas, betas) matrix.
fn tridiag_lowest<T: Real>(alphas: &[T], betas: &[T]) -> Result<(T, Vec<T>)> {
    let k = alphas.len();
    let mut m = DMatrix::<T>::zeros(k, k);
    for i in 0..k {
        m[(i, i)] = alphas[i];
        if i + 1 < k {
            m[(i, i + 1)] = betas[i];
            m[(i + 1, i)] = betas[i];
        }
    }
    let se = m.symmetric_eigen();
    let mut lowest = 0;
    for i in 1..k {
        if se.eigenvalues[i] < se.eigenvalues[lowest] {
            lowest = i;
        }
    }
    Ok((se.eigenvalues[lowest], se.eigenvectors.column(lowest).iter().copied().collect()))
}

/// Deterministic Lanczos seed: dense, aperiodic, reproducible bit-for-bit.
fn seed_vector<T: Real>(dim: usize) -> DVector<C<T>> {
    DVector::from_fn(dim, |i, _| {
        let x = real::<T>(1.0 + 0.5 * ((i as f64) * 0.7391 + 0.2).sin());
        let y = real::<T>(0.25 * ((i as f64) * 1.1731 - 0.4).cos());
        C::new(x, y)
    })
}

/// Ground state of a bundle.
#[derive(Clone, Debug)]
pub struct GroundState<T: Real> {
    pub energy: T,
    /// Lives on the winning sector basis (or the bundle basis when no sector
    /// search applies).
    pub state: QuantumState<T>,
    /// Winning total particle number, if the search ranged over sectors.
    pub sector: Option<usize>,
    /// ‖Hv − Ev‖ of the returned pair.
    pub residual: T,
}

/// Ground state of the static Hamiltonian.
///
/// Number-conserving bundles on an unrestricted basis are minimized over all
/// sectors 0..=n_total_max (ties resolved toward the smallest total number);
/// sector-restricted bundles are solved in place; bundles with an auxiliary
/// field are solved over the full basis.
pub fn ground_state<T: Real>(
    bundle: &HamiltonianBundle<T>,
    opts: &GroundStateOptions,
) -> Result<GroundState<T>> {
    if bundle.h_aux.is_some() || bundle.basis.sector().is_some() {
        let h = bundle.h_full_static()?;
        let (energy, vector, residual) = lowest_eigenpair(&h, opts)?;
        let state = QuantumState::new(bundle.basis.clone(), vector)?.fix_phase();
        return Ok(GroundState { energy, state, sector: bundle.basis.sector(), residual });
    }

    let mut best: Option<GroundState<T>> = None;
    for n_tot in 0..=bundle.sector_search_max() {
        let block = bundle.sector_block(n_tot)?;
        if block.basis.dim() == 0 {
            continue;
        }
        let (energy, vector, residual) = lowest_eigenpair(&block.h_static, opts)?;
        let state = QuantumState::new(block.basis.clone(), vector)?.fix_phase();
        let better = best.as_ref().map_or(true, |b| energy < b.energy);
        if better {
            best = Some(GroundState { energy, state, sector: Some(n_tot), residual });
        }
    }
    best.ok_or(Error::NonConvergence(0))
}

fn lowest_eigenpair<T: Real>(
    h: &SparseOperator<T>,
    opts: &GroundStateOptions,
) -> Result<(T, DVector<C<T>>, T)> {
    let (energy, vector) = if h.nrows() <= opts.dense_dim_cap {
        let eig = dense_eig(h)?;
        (eig.energies[0], eig.vectors.column(0).into_owned())
    } else {
        lanczos_ground(h, opts.lanczos_max_iter, opts.lanczos_tol)?
    };
    let mut hv = h.apply(&vector)?;
    hv -= &vector * cr(energy);
    Ok((energy, vector, hv.norm()))
}
