//! Phase-diagram maps over a (μ/U, κ/U) grid and the tools that compare
//! them: rank correlation between two maps and marching-squares contours of
//! the order parameter (Mott-lobe boundaries).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{count, real, report, Real};

/// Which route produced a map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapSource {
    /// ψ_a reconstructed from the junction-current amplitude.
    Josephson,
    /// Site-averaged |⟨a⟩| under the auxiliary symmetry-breaking field.
    AuxField,
    /// Self-consistent single-site mean field.
    Gutzwiller,
}

impl fmt::Display for MapSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapSource::Josephson => "josephson",
            MapSource::AuxField => "auxfield",
            MapSource::Gutzwiller => "gutzwiller",
        })
    }
}

impl FromStr for MapSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "josephson" => Ok(MapSource::Josephson),
            "auxfield" => Ok(MapSource::AuxField),
            "gutzwiller" => Ok(MapSource::Gutzwiller),
            other => Err(Error::Parse {
                path: String::new(),
                reason: format!("unknown map source `{other}`"),
            }),
        }
    }
}

/// Per-point outcome recorded alongside ψ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointStatus {
    Ok,
    /// g = 0: no junction current, ψ_a undefined on the Josephson route.
    ZeroCoupling,
    /// ψ_b too small to divide by; the reconstructed ψ_a is unreliable.
    PsiBBelowThreshold,
    Failed(String),
}

impl PointStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, PointStatus::Ok)
    }
}

impl fmt::Display for PointStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointStatus::Ok => f.write_str("ok"),
            PointStatus::ZeroCoupling => f.write_str("zero-coupling"),
            PointStatus::PsiBBelowThreshold => f.write_str("psi-b-below-threshold"),
            // Keep the flag a single CSV token.
            PointStatus::Failed(reason) => {
                write!(f, "failed({})", reason.replace([',', '\n'], ";"))
            }
        }
    }
}

impl FromStr for PointStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ok" => Ok(PointStatus::Ok),
            "zero-coupling" => Ok(PointStatus::ZeroCoupling),
            "psi-b-below-threshold" => Ok(PointStatus::PsiBBelowThreshold),
            other => {
                if let Some(body) = other.strip_prefix("failed(").and_then(|r| r.strip_suffix(')'))
                {
                    Ok(PointStatus::Failed(body.to_owned()))
                } else {
                    Err(Error::Parse {
                        path: String::new(),
                        reason: format!("unknown point status `{other}`"),
                    })
                }
            }
        }
    }
}

/// ψ over a rectangular (μ/U, κ/U) grid, row-major with μ/U as the outer
/// index: entry (i, j) = values[i * kappa_axis.len() + j].
#[derive(Clone, Debug)]
pub struct PhaseDiagramGrid<T: Real> {
    mu_axis: Vec<T>,
    kappa_axis: Vec<T>,
    values: Vec<T>,
    statuses: Vec<PointStatus>,
    source: MapSource,
}

impl<T: Real> PhaseDiagramGrid<T> {
    pub fn new(
        mu_axis: Vec<T>,
        kappa_axis: Vec<T>,
        values: Vec<T>,
        statuses: Vec<PointStatus>,
        source: MapSource,
    ) -> Result<Self> {
        ascending(&mu_axis, "mu axis")?;
        ascending(&kappa_axis, "kappa axis")?;
        let n = mu_axis.len() * kappa_axis.len();
        if values.len() != n || statuses.len() != n {
            return Err(Error::GridMismatch(format!(
                "{} x {} grid needs {n} points, got {} values and {} statuses",
                mu_axis.len(),
                kappa_axis.len(),
                values.len(),
                statuses.len(),
            )));
        }
        Ok(Self { mu_axis, kappa_axis, values, statuses, source })
    }

    pub fn mu_axis(&self) -> &[T] {
        &self.mu_axis
    }

    pub fn kappa_axis(&self) -> &[T] {
        &self.kappa_axis
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn statuses(&self) -> &[PointStatus] {
        &self.statuses
    }

    pub fn source(&self) -> MapSource {
        self.source
    }

    pub fn index(&self, i_mu: usize, i_kappa: usize) -> usize {
        i_mu * self.kappa_axis.len() + i_kappa
    }

    pub fn value(&self, i_mu: usize, i_kappa: usize) -> T {
        self.values[self.index(i_mu, i_kappa)]
    }

    pub fn status(&self, i_mu: usize, i_kappa: usize) -> &PointStatus {
        &self.statuses[self.index(i_mu, i_kappa)]
    }

    pub fn ok_count(&self) -> usize {
        self.statuses.iter().filter(|s| s.is_ok()).count()
    }

    /// Contours of ψ at `level`, as (μ/U, κ/U) polylines.
    pub fn boundary_contours(&self, level: T) -> Vec<Vec<(T, T)>> {
        contour_lines(&self.mu_axis, &self.kappa_axis, &self.values, level)
    }
}

fn ascending<T: Real>(axis: &[T], name: &str) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::GridMismatch(format!("{name} is empty")));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::GridMismatch(format!("{name} must be strictly ascending")));
    }
    if axis.iter().any(|x| !x.is_finite()) {
        return Err(Error::GridMismatch(format!("{name} has non-finite entries")));
    }
    Ok(())
}

/// Uniformly spaced axis with `steps` points from `start` to `stop`
/// inclusive.
pub fn linspace<T: Real>(start: T, stop: T, steps: usize) -> Vec<T> {
    if steps <= 1 {
        return vec![start];
    }
    let h = (stop - start) / count::<T>(steps - 1);
    (0..steps).map(|k| start + h * count::<T>(k)).collect()
}

/// Result of matching two maps point by point.
#[derive(Clone, Copy, Debug)]
pub struct MapComparison<T: Real> {
    /// Spearman rank correlation over points valid in both maps.
    pub spearman: T,
    pub points_used: usize,
    pub mean_abs_difference: T,
    pub max_abs_difference: T,
}

/// Compares two maps on the same grid over the points both report as ok.
pub fn compare_maps<T: Real>(
    a: &PhaseDiagramGrid<T>,
    b: &PhaseDiagramGrid<T>,
) -> Result<MapComparison<T>> {
    if a.mu_axis != b.mu_axis || a.kappa_axis != b.kappa_axis {
        return Err(Error::GridMismatch("maps live on different grids".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 0..a.values.len() {
        if a.statuses[k].is_ok() && b.statuses[k].is_ok() {
            xs.push(a.values[k]);
            ys.push(b.values[k]);
        }
    }
    let rho = spearman(&xs, &ys)?;
    let mut mean = T::zero();
    let mut max = T::zero();
    for (&x, &y) in xs.iter().zip(&ys) {
        let d = (x - y).abs();
        mean += d;
        if d > max {
            max = d;
        }
    }
    mean /= count(xs.len());
    Ok(MapComparison {
        spearman: rho,
        points_used: xs.len(),
        mean_abs_difference: mean,
        max_abs_difference: max,
    })
}

/// Spearman rank correlation with average ranks on ties.
pub fn spearman<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() {
        return Err(Error::GridMismatch(format!(
            "rank correlation needs equal lengths, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::Config("rank correlation needs at least two points".into()));
    }
    if xs.iter().chain(ys).any(|x| !x.is_finite()) {
        return Err(Error::Config("rank correlation input has non-finite values".into()));
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    pearson(&rx, &ry)
}

/// Average ranks (1-based); tied values share the mean of their positions.
fn ranks<T: Real>(xs: &[T]) -> Vec<T> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("finite values"));
    let mut out = vec![T::zero(); xs.len()];
    let mut k = 0;
    while k < order.len() {
        let mut j = k;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[k]] {
            j += 1;
        }
        // Positions k..=j share the rank (k + j)/2 + 1.
        let shared = (count::<T>(k) + count::<T>(j)) / real(2.0) + T::one();
        for &idx in &order[k..=j] {
            out[idx] = shared;
        }
        k = j + 1;
    }
    out
}

fn pearson<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    let n = count::<T>(xs.len());
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    let mut syy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(Error::Config("rank correlation undefined for constant input".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Marching squares: level contours of a row-major field (x outer index).
/// Crossing points on shared cell edges are computed identically from both
/// sides, so segment stitching can match endpoints exactly. Saddle cells are
/// resolved by the cell-center average. Cells with a non-finite corner are
/// skipped.
pub fn contour_lines<T: Real>(xs: &[T], ys: &[T], values: &[T], level: T) -> Vec<Vec<(T, T)>> {
    let (nx, ny) = (xs.len(), ys.len());
    let mut segments: Vec<[(T, T); 2]> = Vec::new();
    if nx < 2 || ny < 2 || values.len() != nx * ny {
        return Vec::new();
    }
    let at = |i: usize, j: usize| values[i * ny + j];
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            let (v00, v10, v11, v01) = (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
            if !(v00.is_finite() && v10.is_finite() && v11.is_finite() && v01.is_finite()) {
                continue;
            }
            let mut case = 0u8;
            if v00 >= level {
                case |= 1;
            }
            if v10 >= level {
                case |= 2;
            }
            if v11 >= level {
                case |= 4;
            }
            if v01 >= level {
                case |= 8;
            }
            if case == 0 || case == 15 {
                continue;
            }
            // Edge crossings by linear interpolation.
            let cross = |xa: T, ya: T, va: T, xb: T, yb: T, vb: T| -> (T, T) {
                let t = (level - va) / (vb - va);
                (xa + (xb - xa) * t, ya + (yb - ya) * t)
            };
            let bottom = || cross(xs[i], ys[j], v00, xs[i + 1], ys[j], v10);
            let top = || cross(xs[i], ys[j + 1], v01, xs[i + 1], ys[j + 1], v11);
            let left = || cross(xs[i], ys[j], v00, xs[i], ys[j + 1], v01);
            let right = || cross(xs[i + 1], ys[j], v10, xs[i + 1], ys[j + 1], v11);
            match case {
                1 | 14 => segments.push([left(), bottom()]),
                2 | 13 => segments.push([bottom(), right()]),
                3 | 12 => segments.push([left(), right()]),
                4 | 11 => segments.push([top(), right()]),
                6 | 9 => segments.push([bottom(), top()]),
                7 | 8 => segments.push([left(), top()]),
                5 | 10 => {
                    let center =
                        (v00 + v10 + v11 + v01) / real(4.0);
                    let joined = (center >= level) == (case == 5);
                    if joined {
                        segments.push([left(), top()]);
                        segments.push([bottom(), right()]);
                    } else {
                        segments.push([left(), bottom()]);
                        segments.push([top(), right()]);
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    stitch(segments)
}

fn key<T: Real>(p: (T, T)) -> (u64, u64) {
    let norm = |x: f64| if x == 0.0 { 0.0f64 } else { x };
    (norm(report(p.0)).to_bits(), norm(report(p.1)).to_bits())
}

/// Joins segments sharing exact endpoints into polylines.
fn stitch<T: Real>(segments: Vec<[(T, T); 2]>) -> Vec<Vec<(T, T)>> {
    let mut by_end: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
    for (k, seg) in segments.iter().enumerate() {
        by_end.entry(key(seg[0])).or_default().push(k);
        by_end.entry(key(seg[1])).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut line = vec![segments[start][0], segments[start][1]];
        // Grow forward from the tail, then backward from the head.
        for forward in [true, false] {
            loop {
                let tip = if forward { *line.last().unwrap() } else { line[0] };
                let Some(next) = by_end
                    .get(&key(tip))
                    .and_then(|cands| cands.iter().find(|&&k| !used[k]))
                    .copied()
                else {
                    break;
                };
                used[next] = true;
                let far = if key(segments[next][0]) == key(tip) {
                    segments[next][1]
                } else {
                    segments[next][0]
                };
                if forward {
                    line.push(far);
                } else {
                    line.insert(0, far);
                }
            }
        }
        lines.push(line);
    }
    lines
}
