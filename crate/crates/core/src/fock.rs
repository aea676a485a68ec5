//! Truncated bosonic Fock space.
//!
//! Occupation vectors are enumerated in lexicographic order (leftmost site
//! most significant), either over the full truncated space or restricted to a
//! fixed total particle number. Lexicographic order makes index lookup a
//! binary search and keeps sector sub-bases aligned with the parent: the
//! sector basis equals the parent basis filtered in place.

use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

/// Occupation-number basis with a per-site cap and an optional fixed total
/// particle number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockBasis {
    site_count: usize,
    n_max: usize,
    sector: Option<usize>,
    states: Vec<Vec<u8>>,
}

impl FockBasis {
    /// Enumerates the basis. `sector = Some(n)` keeps only occupation vectors
    /// with total particle number n.
    pub fn new(site_count: usize, n_max: usize, sector: Option<usize>) -> Result<Self> {
        Self::with_cap(site_count, n_max, sector, DEFAULT_DIM_CAP)
    }

    /// As [`FockBasis::new`], but errors out before allocating more than
    /// `dim_cap` states.
    pub fn with_cap(
        site_count: usize,
        n_max: usize,
        sector: Option<usize>,
        dim_cap: usize,
    ) -> Result<Self> {
        if site_count == 0 {
            return Err(Error::BadSiteCount { sites: 0, dimension: 0 });
        }
        if n_max == 0 || n_max > u8::MAX as usize {
            return Err(Error::Config(format!("per-site cap n_max = {n_max} out of range")));
        }
        let capacity = n_max * site_count;
        if let Some(s) = sector {
            if s > capacity {
                return Err(Error::SectorOutOfRange { sector: s, max: capacity });
            }
        }
        let dim = dimension(site_count, n_max, sector);
        if dim > dim_cap {
            return Err(Error::BasisTooLarge { dim, cap: dim_cap });
        }
        let mut states = Vec::with_capacity(dim);
        let mut occ = vec![0u8; site_count];
        enumerate(&mut occ, 0, n_max as u8, sector, &mut states);
        debug_assert_eq!(states.len(), dim);
        Ok(Self { site_count, n_max, sector, states })
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn sector(&self) -> Option<usize> {
        self.sector
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Occupation vector of basis state `index`.
    pub fn state(&self, index: usize) -> &[u8] {
        &self.states[index]
    }

    pub fn states(&self) -> impl Iterator<Item = &[u8]> {
        self.states.iter().map(|s| s.as_slice())
    }

    /// Index of an occupation vector, if it belongs to this basis.
    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        if occ.len() != self.site_count {
            return None;
        }
        self.states.binary_search_by(|s| s.as_slice().cmp(occ)).ok()
    }

    pub fn total_occupation(&self, index: usize) -> usize {
        self.states[index].iter().map(|&n| n as usize).sum()
    }

    /// Positions (in this unrestricted basis) of the states with total
    /// particle number `n_total`, in basis order.
    pub fn sector_indices(&self, n_total: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.total_occupation(i) == n_total).collect()
    }

    /// The fixed-number sub-basis with `n_total` particles.
    pub fn sector_basis(&self, n_total: usize) -> Result<FockBasis> {
        if self.sector.is_some() {
            return Err(Error::Unsupported("cannot re-slice a fixed-number basis"));
        }
        FockBasis::new(self.site_count, self.n_max, Some(n_total))
    }

    /// Cheap compatibility check used to guard operator/state pairings.
    pub fn compatible(&self, other: &FockBasis) -> bool {
        self.site_count == other.site_count
            && self.n_max == other.n_max
            && self.sector == other.sector
            && self.dim() == other.dim()
    }
}

/// Basis dimension without enumeration: (n_max+1)^sites unrestricted, or the
/// bounded-composition count for a fixed sector.
pub fn dimension(site_count: usize, n_max: usize, sector: Option<usize>) -> usize {
    match sector {
        None => (n_max + 1).pow(site_count as u32),
        Some(s) => {
            // Number of ways to write s as site_count parts each ≤ n_max;
            // dynamic program over sites.
            let mut ways = vec![0usize; s + 1];
            ways[0] = 1;
            for _ in 0..site_count {
                let mut next = vec![0usize; s + 1];
                for (total, &w) in ways.iter().enumerate() {
                    if w == 0 {
                        continue;
                    }
                    for add in 0..=n_max.min(s - total) {
                        next[total + add] += w;
                    }
                }
                ways = next;
            }
            ways[s]
        }
    }
}

fn enumerate(
    occ: &mut Vec<u8>,
    site: usize,
    n_max: u8,
    sector: Option<usize>,
    out: &mut Vec<Vec<u8>>,
) {
    if site == occ.len() {
        if sector.map_or(true, |s| occ.iter().map(|&n| n as usize).sum::<usize>() == s) {
            out.push(occ.clone());
        }
        return;
    }
    // Prune sector enumeration: remaining sites can add at most (sites-site-1)·n_max.
    let used: usize = occ[..site].iter().map(|&n| n as usize).sum();
    for n in 0..=n_max {
        if let Some(s) = sector {
            let here = used + n as usize;
            if here > s {
                break;
            }
            let headroom = (occ.len() - site - 1) * n_max as usize;
            if here + headroom < s {
                continue;
            }
        }
        occ[site] = n;
        enumerate(occ, site + 1, n_max, sector, out);
    }
    occ[site] = 0;
}

/// Default hard cap on basis dimension; construction errors out above this.
pub const DEFAULT_DIM_CAP: usize = 200_000;

/// Normalized state vector over a shared [`FockBasis`].
#[derive(Clone, Debug)]
pub struct QuantumState<T: Real> {
    basis: Arc<FockBasis>,
    amplitudes: DVector<C<T>>,
}

impl<T: Real> QuantumState<T> {
    /// Wraps and normalizes an amplitude vector. Errors on a zero vector or a
    /// length mismatch.
    pub fn new(basis: Arc<FockBasis>, amplitudes: DVector<C<T>>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch { left: amplitudes.len(), right: basis.dim() });
        }
        let norm = amplitudes.norm();
        if norm == T::zero() {
            return Err(Error::ZeroNorm);
        }
        let amplitudes = amplitudes / cr(norm);
        Ok(Self { basis, amplitudes })
    }

    /// Wraps an already-unit vector *without* renormalizing, so norm drift
    /// stays observable downstream; rejects vectors off the unit sphere by
    /// more than 1e-6 (an upstream bug, not drift).
    pub fn from_unit(basis: Arc<FockBasis>, amplitudes: DVector<C<T>>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch { left: amplitudes.len(), right: basis.dim() });
        }
        let norm = amplitudes.norm();
        if (norm - T::one()).abs() > crate::scalar::real(1e-6) {
            return Err(Error::ZeroNorm);
        }
        Ok(Self { basis, amplitudes })
    }

    /// The basis state |occ⟩.
    pub fn from_occupation(basis: Arc<FockBasis>, occ: &[u8]) -> Result<Self> {
        let index = basis.index_of(occ).ok_or(Error::BasisMismatch)?;
        let mut amplitudes = DVector::zeros(basis.dim());
        amplitudes[index] = cr(T::one());
        Ok(Self { basis, amplitudes })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<C<T>> {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes.norm()
    }

    /// ⟨self|other⟩.
    pub fn overlap(&self, other: &QuantumState<T>) -> Result<C<T>> {
        if !self.basis.compatible(&other.basis) {
            return Err(Error::BasisMismatch);
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Rotates the global phase so the largest-magnitude amplitude is real
    /// and positive. Stabilizes eigenvector-based comparisons.
    pub fn fix_phase(mut self) -> Self {
        let mut best = 0usize;
        let mut best_mag = T::zero();
        for (i, a) in self.amplitudes.iter().enumerate() {
            let m = a.norm_sqr();
            if m > best_mag {
                best_mag = m;
                best = i;
            }
        }
        let pivot = self.amplitudes[best];
        let mag = crate::scalar::cmod(pivot);
        if mag > T::zero() {
            let phase = pivot / cr(mag);
            let correction = phase.conj();
            for a in self.amplitudes.iter_mut() {
                *a *= correction;
            }
        }
        self
    }
}

/// Guard used after evolution steps: |norm − 1| must stay below tolerance.
pub fn norm_drift<T: Real>(state: &QuantumState<T>) -> T {
    (state.norm() - T::one()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_site_three_levels() {
        let b = FockBasis::new(1, 2, None).unwrap();
        assert_eq!(b.dim(), 3);
        let states: Vec<_> = b.states().collect();
        assert_eq!(states, vec![&[0][..], &[1], &[2]]);
    }

    #[test]
    fn two_site_sector_enumeration() {
        let b = FockBasis::new(2, 2, Some(2)).unwrap();
        let states: Vec<_> = b.states().collect();
        assert_eq!(states, vec![&[0, 2][..], &[1, 1], &[2, 0]]);
        assert_eq!(b.dim(), 3);
    }

    #[test]
    fn four_site_unrestricted_dimension() {
        let b = FockBasis::new(4, 4, None).unwrap();
        assert_eq!(b.dim(), 625);
        assert_eq!(dimension(4, 4, None), 625);
    }

    #[test]
    fn sector_dimensions_partition_the_space() {
        let b = FockBasis::new(3, 3, None).unwrap();
        let total: usize = (0..=9).map(|s| dimension(3, 3, Some(s))).sum();
        assert_eq!(total, b.dim());
        for s in 0..=9 {
            assert_eq!(b.sector_indices(s).len(), dimension(3, 3, Some(s)));
            let sub = b.sector_basis(s).unwrap();
            let filtered: Vec<_> =
                b.sector_indices(s).into_iter().map(|i| b.state(i).to_vec()).collect();
            let subs: Vec<_> = sub.states().map(|s| s.to_vec()).collect();
            assert_eq!(filtered, subs, "sector {s} order must match the parent filter");
        }
    }

    #[test]
    fn sector_out_of_range() {
        assert!(matches!(
            FockBasis::new(2, 2, Some(5)),
            Err(Error::SectorOutOfRange { sector: 5, max: 4 })
        ));
    }

    #[test]
    fn dimension_cap_is_enforced() {
        assert!(matches!(
            FockBasis::with_cap(4, 4, None, 100),
            Err(Error::BasisTooLarge { dim: 625, cap: 100 })
        ));
    }

    #[test]
    fn lexicographic_order_and_lookup() {
        let b = FockBasis::new(3, 2, None).unwrap();
        for i in 1..b.dim() {
            assert!(b.state(i - 1) < b.state(i), "states must be strictly increasing");
        }
        assert_eq!(b.index_of(&[0, 0, 0]), Some(0));
        assert_eq!(b.index_of(&[2, 2, 2]), Some(b.dim() - 1));
        assert_eq!(b.index_of(&[0, 3, 0]), None);
    }

    #[test]
    fn states_normalize_and_overlap() {
        let b = Arc::new(FockBasis::new(1, 2, None).unwrap());
        let psi = QuantumState::<f64>::new(
            b.clone(),
            DVector::from_vec(vec![cr(3.0), cr(4.0), cr(0.0)]),
        )
        .unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-15);
        let ground = QuantumState::from_occupation(b.clone(), &[0]).unwrap();
        let ov = ground.overlap(&psi).unwrap();
        assert!((ov.re - 0.6).abs() < 1e-15);
        assert!(QuantumState::<f64>::new(b, DVector::zeros(3)).is_err());
    }

    #[test]
    fn phase_fixing_pins_the_dominant_amplitude() {
        let b = Arc::new(FockBasis::new(1, 1, None).unwrap());
        let psi = QuantumState::<f64>::new(
            b,
            DVector::from_vec(vec![C::new(0.0, -0.8), C::new(0.6, 0.0)]),
        )
        .unwrap()
        .fix_phase();
        assert!(psi.amplitudes()[0].re > 0.0);
        assert!(psi.amplitudes()[0].im.abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn index_of_inverts_state(site_count in 1usize..4, n_max in 1usize..4, sector in 0usize..6) {
            let capacity = site_count * n_max;
            let sector = if sector % 2 == 0 { None } else { Some(sector.min(capacity)) };
            let b = FockBasis::new(site_count, n_max, sector).unwrap();
            for i in 0..b.dim() {
                prop_assert_eq!(b.index_of(b.state(i)), Some(i));
            }
        }
    }
}
