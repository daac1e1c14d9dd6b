//! Per-run records, batch summaries and the small amount of statistics the
//! experiments need.
//!
//! Columns holding wall-clock measurements end in `_ms`; everything else is a
//! pure function of the master seed.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{io_err, Result};

/// Linear-interpolation quantile of sorted data, `q` in `[0, 1]`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let h = q * (n - 1) as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    /// Finite values summarized; non-finite entries mark failed runs.
    pub count: usize,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
    pub mean: f64,
}

impl Quantiles {
    pub fn of(values: &[f64]) -> Self {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        v.sort_by(f64::total_cmp);
        // rounding can push the mean of equal values past them
        let mean = if v.is_empty() { f64::NAN } else { (v.iter().sum::<f64>() / v.len() as f64).clamp(v[0], v[v.len() - 1]) };
        Self {
            count: v.len(),
            min: quantile(&v, 0.0),
            q25: quantile(&v, 0.25),
            median: quantile(&v, 0.5),
            q75: quantile(&v, 0.75),
            max: quantile(&v, 1.0),
            mean,
        }
    }

    pub const STATS: [&'static str; 7] = ["count", "min", "q25", "median", "q75", "max", "mean"];

    pub fn values(&self) -> [f64; 7] {
        [self.count as f64, self.min, self.q25, self.median, self.q75, self.max, self.mean]
    }
}

/// Least-squares line and its coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    LinearFit { slope, intercept: my - slope * mx, r_squared: sxy * sxy / (sxx * syy) }
}

/// One Monte Carlo run.
pub trait Record: Serialize + Send {
    /// Named numeric outputs summarized across the batch.
    fn metrics(&self) -> Vec<(&'static str, f64)>;
    /// The run broke a constraint it is judged by.
    fn violated(&self) -> bool;
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchStats<R> {
    pub records: Vec<R>,
    /// Per metric, in record field order.
    pub summary: Vec<(&'static str, Quantiles)>,
    pub violations: usize,
}

impl<R: Record> BatchStats<R> {
    pub fn new(records: Vec<R>) -> Self {
        let names: Vec<&'static str> = records.first().map_or(Vec::new(), |r| r.metrics().into_iter().map(|m| m.0).collect());
        let summary = names
            .iter()
            .enumerate()
            .map(|(k, &name)| {
                let v: Vec<f64> = records.iter().map(|r| r.metrics()[k].1).collect();
                (name, Quantiles::of(&v))
            })
            .collect();
        let violations = records.iter().filter(|r| r.violated()).count();
        Self { records, summary, violations }
    }

    pub fn quantiles(&self, metric: &str) -> Option<&Quantiles> {
        self.summary.iter().find(|(n, _)| *n == metric).map(|(_, q)| q)
    }

    /// One row per run.
    pub fn write_records(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush().map_err(io_err(path))?;
        Ok(())
    }

    /// One row per statistic, one column per metric, so wall-clock metrics
    /// stay in their own `_ms` columns.
    pub fn write_summary(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["stat"];
        header.extend(self.summary.iter().map(|(n, _)| *n));
        w.write_record(&header)?;
        for (k, stat) in Quantiles::STATS.iter().enumerate() {
            let mut row = vec![stat.to_string()];
            row.extend(self.summary.iter().map(|(_, q)| q.values()[k].to_string()));
            w.write_record(&row)?;
        }
        w.flush().map_err(io_err(path))?;
        Ok(())
    }

    pub fn summary_map(&self) -> BTreeMap<&'static str, Quantiles> {
        self.summary.iter().cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[derive(Serialize)]
    struct R {
        x: f64,
    }

    impl Record for R {
        fn metrics(&self) -> Vec<(&'static str, f64)> {
            vec![("x", self.x)]
        }
        fn violated(&self) -> bool {
            self.x < 0.0
        }
    }

    #[test]
    fn single_run_batch_is_that_run() {
        let b = BatchStats::new(vec![R { x: 4.5 }]);
        let q = b.quantiles("x").unwrap();
        assert_eq!(q.values(), [1.0, 4.5, 4.5, 4.5, 4.5, 4.5, 4.5]);
        assert_eq!(b.violations, 0);
    }

    #[test]
    fn quartiles_of_one_to_five() {
        let q = Quantiles::of(&[5.0, 1.0, 4.0, 2.0, 3.0]);
        assert_eq!((q.min, q.q25, q.median, q.q75, q.max, q.mean), (1.0, 2.0, 3.0, 4.0, 5.0, 3.0));
    }

    #[test]
    fn failed_runs_are_not_summarized() {
        let q = Quantiles::of(&[1.0, f64::NAN, 3.0]);
        assert_eq!((q.count, q.median), (2, 2.0));
    }

    #[test]
    fn exact_line_fits_perfectly() {
        let f = linear_fit(&[1.0, 2.0, 3.0, 4.0], &[3.0, 5.0, 7.0, 9.0]);
        assert_eq!((f.slope, f.intercept, f.r_squared), (2.0, 1.0, 1.0));
    }

    proptest! {
        #[test]
        fn quantiles_are_ordered(v in prop::collection::vec(-1e6..1e6f64, 1..50)) {
            let q = Quantiles::of(&v);
            prop_assert!(q.min <= q.q25 && q.q25 <= q.median && q.median <= q.q75 && q.q75 <= q.max);
            prop_assert!(q.min <= q.mean && q.mean <= q.max);
        }
    }
}
