//! One-dimensional k-means over grid intensities and the mapping of clusters
//! to traversability.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::grid::{CellClass, IntensityGrid, Raster, TraversabilityGrid};
use crate::error::{Error, Result};
use crate::scalar::{uniform_left_open, Real};

/// Lloyd iteration result. Centroids are sorted ascending, so cluster 0 is the
/// darkest (coast) and cluster `k - 1` the brightest (water).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel<T> {
    pub centroids: Vec<T>,
    pub assignments: Vec<usize>,
    pub iterations: usize,
    /// Within-cluster sum of squares after every assignment step.
    pub objective: Vec<T>,
}

impl<T: Real> ClusterModel<T> {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    /// Index of the nearest centroid; ties go to the lower index.
    pub fn nearest(&self, v: T) -> usize {
        nearest(&self.centroids, v)
    }
}

fn nearest<T: Real>(centroids: &[T], v: T) -> usize {
    let mut best = 0;
    let mut best_d = (v - centroids[0]).abs();
    for (i, &c) in centroids.iter().enumerate().skip(1) {
        let d = (v - c).abs();
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig<T> {
    pub k: usize,
    pub max_iterations: usize,
    /// Stop once no centroid moves by more than this. Zero keeps the final
    /// assignment an exact fixed point.
    pub tolerance: T,
}

impl<T: Real> Default for KMeansConfig<T> {
    fn default() -> Self {
        Self { k: 3, max_iterations: 100, tolerance: T::zero() }
    }
}

/// Clusters the grid intensities. Deterministic: centroids start at the
/// distinct values nearest to `k` evenly spaced levels across the value range,
/// falling back to evenly spaced quantiles when two levels share a value.
pub fn cluster_map<T: Real>(grid: &IntensityGrid<T>, cfg: &KMeansConfig<T>) -> Result<ClusterModel<T>> {
    let k = cfg.k;
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let mut distinct = grid.values.clone();
    distinct.sort_by(|a, b| a.partial_cmp(b).expect("finite grid values"));
    distinct.dedup();
    if k > distinct.len() {
        return Err(Error::DegenerateCluster { k, distinct: distinct.len() });
    }
    let mut centroids = initial_centroids(&distinct, k);
    if centroids.len() < k {
        centroids = (0..k)
            .map(|i| distinct[(i * (distinct.len() - 1) + (k - 1) / 2) / (k - 1)])
            .collect();
    }
    debug_assert_eq!(centroids.len(), k);

    let values = &grid.values;
    let mut assignments = vec![usize::MAX; values.len()];
    let mut objective = Vec::new();
    let mut iterations = 0;
    let mut sums = vec![T::zero(); k];
    let mut counts = vec![0usize; k];
    loop {
        iterations += 1;
        let mut changed = false;
        let mut sse = T::zero();
        for (a, &v) in assignments.iter_mut().zip(values) {
            let c = nearest(&centroids, v);
            if *a != c {
                *a = c;
                changed = true;
            }
            let d = v - centroids[c];
            sse = sse + d * d;
        }
        objective.push(sse);

        let previous = centroids.clone();
        update_means(values, &assignments, &mut centroids, &mut sums, &mut counts);
        let shift = previous
            .iter()
            .zip(&centroids)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max);
        // with tolerance 0 a zero shift means the next pass cannot reassign
        if !changed || shift <= cfg.tolerance || iterations >= cfg.max_iterations {
            break;
        }
    }

    // relabel so centroids ascend
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| centroids[a].partial_cmp(&centroids[b]).expect("finite centroids"));
    let mut rank = vec![0; k];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r;
    }
    let centroids = order.iter().map(|&c| centroids[c]).collect();
    for a in &mut assignments {
        *a = rank[*a];
    }
    Ok(ClusterModel { centroids, assignments, iterations, objective })
}

fn initial_centroids<T: Real>(distinct: &[T], k: usize) -> Vec<T> {
    if k == 1 {
        return vec![distinct[distinct.len() / 2]];
    }
    let (lo, hi) = (distinct[0], distinct[distinct.len() - 1]);
    let mut out: Vec<T> = (0..k)
        .map(|i| {
            let level = lo + (hi - lo) * T::of_usize(i) / T::of_usize(k - 1);
            let j = distinct.partition_point(|&v| v < level);
            match (j.checked_sub(1), distinct.get(j)) {
                (Some(p), Some(&n)) if level - distinct[p] <= n - level => distinct[p],
                (_, Some(&n)) => n,
                (Some(p), None) => distinct[p],
                (None, None) => unreachable!("distinct values are non-empty"),
            }
        })
        .collect();
    out.dedup();
    out
}

fn update_means<T: Real>(values: &[T], assignments: &[usize], centroids: &mut [T], sums: &mut [T], counts: &mut [usize]) {
    sums.iter_mut().for_each(|s| *s = T::zero());
    counts.iter_mut().for_each(|c| *c = 0);
    for (&v, &a) in values.iter().zip(assignments) {
        sums[a] = sums[a] + v;
        counts[a] += 1;
    }
    for i in 0..centroids.len() {
        // an emptied cluster keeps its previous centroid
        if counts[i] > 0 {
            centroids[i] = sums[i] / T::of_usize(counts[i]);
        }
    }
}

/// Range of traversability values given to uncertain cells; `lo` is excluded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertainBand<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Default for UncertainBand<T> {
    fn default() -> Self {
        Self { lo: T::zero(), hi: T::of(0.03) }
    }
}

/// Maps clusters to classes: the lowest-intensity cluster is coast, the
/// highest is water, anything between is uncertain and receives a value drawn
/// uniformly from `(band.lo, band.hi]`.
pub fn classify_grid<T: Real, R: Rng + ?Sized>(
    model: &ClusterModel<T>,
    grid: &IntensityGrid<T>,
    band: UncertainBand<T>,
    rng: &mut R,
) -> Result<TraversabilityGrid<T>> {
    if model.assignments.len() != grid.len() {
        return Err(Error::Grid("cluster model does not match grid size".into()));
    }
    if !(band.lo >= T::zero() && band.hi > band.lo && band.hi < T::one()) {
        return Err(Error::Config("uncertain band must satisfy 0 <= lo < hi < 1".into()));
    }
    let k = model.k();
    let mut values = Vec::with_capacity(grid.len());
    let mut classes = Vec::with_capacity(grid.len());
    for &a in &model.assignments {
        let class = if a == 0 && k > 1 {
            CellClass::Coast
        } else if a == k - 1 {
            CellClass::Water
        } else {
            CellClass::Uncertain
        };
        let v = match class {
            CellClass::Coast => T::zero(),
            CellClass::Water => T::one(),
            CellClass::Uncertain => uniform_left_open(rng, band.lo, band.hi),
        };
        values.push(v);
        classes.push(class);
    }
    Ok(TraversabilityGrid {
        raster: Raster::new(grid.width, grid.height, grid.cell_size, values)?,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid(values: Vec<f64>) -> IntensityGrid<f64> {
        let n = values.len();
        Raster::new(n, 1, 1.0, values).unwrap()
    }

    #[test]
    fn three_level_grid_classifies_cleanly() {
        let g = grid(vec![0.1, 0.11, 0.5, 0.52, 0.9, 0.93, 0.1, 0.9]);
        let m = cluster_map(&g, &KMeansConfig::default()).unwrap();
        assert_eq!(m.assignments, vec![0, 0, 1, 1, 2, 2, 0, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = classify_grid(&m, &g, UncertainBand::default(), &mut rng).unwrap();
        assert_eq!(t.raster.values[0], 0.0);
        assert_eq!(t.raster.values[4], 1.0);
        assert!(t.raster.values[2] > 0.0 && t.raster.values[2] <= 0.03);
    }

    #[test]
    fn too_many_clusters_is_degenerate() {
        let g = grid(vec![0.2, 0.2, 0.8]);
        match cluster_map(&g, &KMeansConfig { k: 3, ..Default::default() }) {
            Err(Error::DegenerateCluster { k: 3, distinct: 2 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn centroids_are_member_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f64> = (0..500).map(|_| rand::Rng::gen(&mut rng)).collect();
        let g = grid(values.clone());
        let m = cluster_map(&g, &KMeansConfig::default()).unwrap();
        for c in 0..m.k() {
            let members: Vec<f64> = values
                .iter()
                .zip(&m.assignments)
                .filter(|(_, &a)| a == c)
                .map(|(&v, _)| v)
                .collect();
            let mean = members.iter().sum::<f64>() / members.len() as f64;
            assert!((mean - m.centroids[c]).abs() < 1e-12);
        }
        assert!(m.objective.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }
}
