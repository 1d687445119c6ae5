//! Utility metrics, seed aggregation and the CSV row type.

use std::fmt;
use std::path::Path;

use dpscd::data::{Dataset, Task};
use dpscd::Error;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Mse,
    Accuracy,
    PrimalObjective,
    DualObjective,
    DualityGap,
}

impl Metric {
    /// Utility metric reported for a task.
    pub fn for_task(task: Task) -> Self {
        match task {
            Task::Regression => Metric::Mse,
            Task::Classification => Metric::Accuracy,
        }
    }

    pub fn higher_is_better(self) -> bool {
        self == Metric::Accuracy
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Mse => "mse",
            Metric::Accuracy => "accuracy",
            Metric::PrimalObjective => "primal_objective",
            Metric::DualObjective => "dual_objective",
            Metric::DualityGap => "duality_gap",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Utility of the linear predictor `xᵀθ + intercept` on `data`.
///
/// Regression reports the mean squared error against the stored labels.
/// Classification predicts `sign(xᵀθ)`, counting an exact zero as the
/// positive class, and reports the fraction of correct predictions.
pub fn evaluate(theta: &[f64], intercept: f64, data: &Dataset, task: Task) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("cannot evaluate on an empty split".into()).into());
    }
    let scores = data.scores(theta)?;
    let n = data.n_examples() as f64;
    let labels = data.labels();
    Ok(match task {
        Task::Regression => {
            scores
                .iter()
                .zip(labels)
                .map(|(s, y)| (s + intercept - y).powi(2))
                .sum::<f64>()
                / n
        }
        Task::Classification => {
            let correct = scores
                .iter()
                .zip(labels)
                .filter(|(s, y)| {
                    let pred = if **s + intercept >= 0.0 { 1.0 } else { -1.0 };
                    pred == **y
                })
                .count();
            correct as f64 / n
        }
    })
}

/// Lower empirical quantile: the `floor(p (n - 1))`-th order statistic, so
/// the result is always one of the inputs. NaN sorts last.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = (p.clamp(0.0, 1.0) * (v.len() - 1) as f64).floor() as usize;
    v[k]
}

/// The lower median, `quantile(values, 0.5)`.
pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

/// One line of an output CSV: a metric for one configuration, aggregated
/// over seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub algorithm: String,
    /// `inf` for non-private algorithms.
    pub epsilon: f64,
    pub delta: Option<f64>,
    pub sigma: f64,
    pub batch_size: usize,
    pub scale: Option<f64>,
    pub learning_rate: Option<f64>,
    pub split: Split,
    pub metric: Metric,
    pub epoch: Option<usize>,
    pub median: f64,
    /// One value per seed, in seed order.
    pub values: Vec<f64>,
}

/// Hyperparameters and privacy parameters shared by a group of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct RowKey {
    pub algorithm: String,
    pub epsilon: f64,
    pub delta: Option<f64>,
    pub sigma: f64,
    pub batch_size: usize,
    pub scale: Option<f64>,
    pub learning_rate: Option<f64>,
}

impl MetricRow {
    pub fn new(key: &RowKey, split: Split, metric: Metric, epoch: Option<usize>, values: Vec<f64>) -> Self {
        MetricRow {
            algorithm: key.algorithm.clone(),
            epsilon: key.epsilon,
            delta: key.delta,
            sigma: key.sigma,
            batch_size: key.batch_size,
            scale: key.scale,
            learning_rate: key.learning_rate,
            split,
            metric,
            epoch,
            median: median(&values),
            values,
        }
    }

    fn record(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        let mut out = vec![
            self.algorithm.clone(),
            self.epsilon.to_string(),
            opt(self.delta),
            self.sigma.to_string(),
            self.batch_size.to_string(),
            opt(self.scale),
            opt(self.learning_rate),
            self.split.to_string(),
            self.metric.to_string(),
            self.epoch.map_or(String::new(), |e| e.to_string()),
            self.median.to_string(),
        ];
        out.extend(self.values.iter().map(f64::to_string));
        out
    }
}

pub const CSV_COLUMNS: [&str; 11] = [
    "algorithm",
    "epsilon",
    "delta",
    "sigma",
    "batch_size",
    "scale",
    "learning_rate",
    "split",
    "metric",
    "epoch",
    "median",
];

/// Writes rows with a header naming one `seed_<s>` column per run seed.
/// Floats use Rust's shortest round-trip formatting, so files are
/// byte-identical across reruns and parse back to the exact values.
pub fn write_csv(path: &Path, seeds: &[u64], rows: &[MetricRow]) -> Result<()> {
    let wrap = |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    let header = CSV_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .chain(seeds.iter().map(|s| format!("seed_{s}")));
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        if row.values.len() != seeds.len() {
            return Err(BenchError::Runtime(format!(
                "row for {} has {} seed values, expected {}",
                row.algorithm,
                row.values.len(),
                seeds.len()
            )));
        }
        w.write_record(row.record()).map_err(wrap)?;
    }
    w.flush().map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(cols: &[Vec<f64>], labels: Vec<f64>) -> Dataset {
        Dataset::from_dense(cols[0].len(), cols, labels).unwrap()
    }

    #[test]
    fn perfect_predictor() {
        let cols = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![-1.0, 2.0]];
        let theta = [2.0, -1.0];
        let y: Vec<f64> = cols.iter().map(|c| 2.0 * c[0] - c[1] + 0.5).collect();
        let d = dataset(&cols, y);
        assert_eq!(evaluate(&theta, 0.5, &d, Task::Regression).unwrap(), 0.0);
        let signs: Vec<f64> = cols
            .iter()
            .map(|c| if 2.0 * c[0] - c[1] >= 0.0 { 1.0 } else { -1.0 })
            .collect();
        let d = dataset(&cols, signs);
        assert_eq!(evaluate(&theta, 0.0, &d, Task::Classification).unwrap(), 1.0);
    }

    #[test]
    fn zero_model_predicts_the_positive_class() {
        let cols = vec![vec![1.0]; 5];
        let d = dataset(&cols, vec![1.0, -1.0, 1.0, 1.0, -1.0]);
        assert_eq!(evaluate(&[0.0], 0.0, &d, Task::Classification).unwrap(), 0.6);
    }

    #[test]
    fn matches_a_scalar_loop() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let m = 4;
        let cols: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..m).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = (0..20).map(|_| rng.random_range(-2.0..2.0)).collect();
        let theta: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let d = dataset(&cols, y.clone());
        let mut sse = 0.0;
        for i in 0..20 {
            let mut s = 0.3;
            for j in 0..m {
                s += cols[i][j] * theta[j];
            }
            sse += (s - y[i]) * (s - y[i]);
        }
        let got = evaluate(&theta, 0.3, &d, Task::Regression).unwrap();
        assert!((got - sse / 20.0).abs() <= 1e-12 * sse.max(1.0));
    }

    #[test]
    fn empty_split_is_an_error() {
        let d = Dataset::empty(3);
        assert!(evaluate(&[0.0; 3], 0.0, &d, Task::Regression).is_err());
    }

    #[test]
    fn median_is_an_order_statistic() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.0);
        assert_eq!(median(&[5.0]), 5.0);
        assert!(median(&[]).is_nan());
        assert_eq!(median(&[1.0, f64::NAN, 0.0]), 1.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.25), 2.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.75), 4.0);
    }

    #[test]
    fn csv_round_trips_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        let key = RowKey {
            algorithm: "dpscd".into(),
            epsilon: 0.1,
            delta: Some(1e-3),
            sigma: 3.25,
            batch_size: 10,
            scale: Some(1e-8),
            learning_rate: None,
        };
        let vals = vec![0.1 + 0.2, 1.0 / 3.0];
        let row = MetricRow::new(&key, Split::Test, Metric::Mse, None, vals.clone());
        write_csv(&path, &[4, 5], &[row]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "algorithm,epsilon,delta,sigma,batch_size,scale,learning_rate,split,metric,epoch,median,seed_4,seed_5"
        );
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields[5], "0.00000001");
        assert_eq!(fields[6], "");
        let parsed: Vec<f64> = fields[11..].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(parsed, vals);
        assert_eq!(fields[10].parse::<f64>().unwrap(), median(&vals));
    }

    #[test]
    fn csv_rejects_ragged_rows() {
        let dir = tempfile::tempdir().unwrap();
        let key = RowKey {
            algorithm: "sdca".into(),
            epsilon: f64::INFINITY,
            delta: None,
            sigma: 0.0,
            batch_size: 1,
            scale: None,
            learning_rate: None,
        };
        let row = MetricRow::new(&key, Split::Test, Metric::Mse, None, vec![1.0]);
        assert!(write_csv(&dir.path().join("x.csv"), &[0, 1], &[row]).is_err());
    }
}
