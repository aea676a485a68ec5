//! Second-quantized operators on a truncated Fock basis.
//!
//! Matrix convention: columns index source states, rows target states, so
//! `A[target, source] = ⟨target|Â|source⟩`. Bosonic amplitudes are √n per
//! lowering and √(n+1) per raising, with the cap enforced by dropping any
//! process that would exceed n_max (hard-wall truncation: a·a† = n+1 only
//! below the cap).

use crate::error::{Error, Result};
use crate::fock::{FockBasis, QuantumState};
use crate::scalar::{count, cr, Real, C};
use crate::sparse::SparseOperator;

#[inline]
fn root<T: Real>(n: usize) -> T {
    count::<T>(n).sqrt()
}

fn check_site(basis: &FockBasis, site: usize) -> Result<()> {
    if site >= basis.site_count() {
        return Err(Error::InvalidSite { site, sites: basis.site_count() });
    }
    Ok(())
}

/// a_i on an unrestricted basis (number-changing operators leave a fixed
/// sector; use [`annihilation_sector_map`] there).
pub fn annihilation<T: Real>(basis: &FockBasis, site: usize) -> Result<SparseOperator<T>> {
    check_site(basis, site)?;
    if basis.sector().is_some() {
        return Err(Error::Unsupported(
            "annihilation on a fixed-number basis; use annihilation_sector_map",
        ));
    }
    let mut triplets = Vec::new();
    let mut occ = Vec::new();
    for (src, state) in basis.states().enumerate() {
        let n = state[site] as usize;
        if n == 0 {
            continue;
        }
        occ.clear();
        occ.extend_from_slice(state);
        occ[site] -= 1;
        let dst = basis.index_of(&occ).expect("lowered state stays in the basis");
        triplets.push((dst, src, cr(root::<T>(n))));
    }
    SparseOperator::new(basis.dim(), basis.dim(), triplets)
}

/// a_i† on an unrestricted basis.
pub fn creation<T: Real>(basis: &FockBasis, site: usize) -> Result<SparseOperator<T>> {
    Ok(annihilation::<T>(basis, site)?.adjoint())
}

/// Rectangular a_i mapping the N-particle sector into the (N−1)-particle
/// sector: rows index `to`, columns index `from`.
pub fn annihilation_sector_map<T: Real>(
    from: &FockBasis,
    to: &FockBasis,
    site: usize,
) -> Result<SparseOperator<T>> {
    check_site(from, site)?;
    let (Some(n_from), Some(n_to)) = (from.sector(), to.sector()) else {
        return Err(Error::Unsupported("sector map requires fixed-number bases"));
    };
    if n_to + 1 != n_from
        || from.site_count() != to.site_count()
        || from.n_max() != to.n_max()
    {
        return Err(Error::BasisMismatch);
    }
    let mut triplets = Vec::new();
    let mut occ = Vec::new();
    for (src, state) in from.states().enumerate() {
        let n = state[site] as usize;
        if n == 0 {
            continue;
        }
        occ.clear();
        occ.extend_from_slice(state);
        occ[site] -= 1;
        let dst = to.index_of(&occ).expect("lowered state lands in the target sector");
        triplets.push((dst, src, cr(root::<T>(n))));
    }
    SparseOperator::new(to.dim(), from.dim(), triplets)
}

/// Number operator n_i = a_i†a_i (diagonal in any basis).
pub fn number<T: Real>(basis: &FockBasis, site: usize) -> Result<SparseOperator<T>> {
    check_site(basis, site)?;
    let triplets = basis
        .states()
        .enumerate()
        .filter(|(_, s)| s[site] > 0)
        .map(|(i, s)| (i, i, cr(count::<T>(s[site] as usize))))
        .collect();
    SparseOperator::new(basis.dim(), basis.dim(), triplets)
}

/// Pair interaction n_i(n_i − 1), the diagonal of a_i†a_i†a_ia_i.
pub fn pair_interaction<T: Real>(basis: &FockBasis, site: usize) -> Result<SparseOperator<T>> {
    check_site(basis, site)?;
    let triplets = basis
        .states()
        .enumerate()
        .filter(|(_, s)| s[site] > 1)
        .map(|(i, s)| {
            let n = s[site] as usize;
            (i, i, cr(count::<T>(n) * count::<T>(n - 1)))
        })
        .collect();
    SparseOperator::new(basis.dim(), basis.dim(), triplets)
}

/// Hopping a_i†a_j. Number-conserving, so valid on sector bases as well; for
/// i = j this degenerates to the number operator.
pub fn hop<T: Real>(basis: &FockBasis, i: usize, j: usize) -> Result<SparseOperator<T>> {
    check_site(basis, i)?;
    check_site(basis, j)?;
    if i == j {
        return number(basis, i);
    }
    let mut triplets = Vec::new();
    let mut occ = Vec::new();
    for (src, state) in basis.states().enumerate() {
        let nj = state[j] as usize;
        let ni = state[i] as usize;
        if nj == 0 || ni >= basis.n_max() {
            continue;
        }
        occ.clear();
        occ.extend_from_slice(state);
        occ[j] -= 1;
        occ[i] += 1;
        let dst = basis.index_of(&occ).expect("hopped state stays in the basis");
        triplets.push((dst, src, cr(root::<T>(nj) * root::<T>(ni + 1))));
    }
    SparseOperator::new(basis.dim(), basis.dim(), triplets)
}

/// Displacement a_i + a_i†, the symmetry-breaking probe. Unrestricted bases
/// only (it changes particle number).
pub fn displacement<T: Real>(basis: &FockBasis, site: usize) -> Result<SparseOperator<T>> {
    let a = annihilation::<T>(basis, site)?;
    a.add(&a.adjoint())
}

/// Total number operator Σ_i n_i.
pub fn total_number<T: Real>(basis: &FockBasis) -> Result<SparseOperator<T>> {
    let triplets = (0..basis.dim())
        .filter(|&i| basis.total_occupation(i) > 0)
        .map(|i| (i, i, cr(count::<T>(basis.total_occupation(i)))))
        .collect();
    SparseOperator::new(basis.dim(), basis.dim(), triplets)
}

/// ⟨ψ|Â|ψ⟩ with a basis-compatibility guard.
pub fn expectation_value<T: Real>(
    op: &SparseOperator<T>,
    state: &QuantumState<T>,
) -> Result<C<T>> {
    if op.ncols() != state.basis().dim() {
        return Err(Error::DimensionMismatch { left: op.ncols(), right: state.basis().dim() });
    }
    op.expectation(state.amplitudes())
}
