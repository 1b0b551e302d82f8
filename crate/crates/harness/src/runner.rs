//! Repeated-trial experiments with a fixed test set.

use std::time::Instant;

use rand::seq::index::sample;
use rayon::prelude::*;

use rpens_core::rng::streams;
use rpens_core::{test_error, LabeledDataset, RngSeed};

use crate::config::{DataSource, ExperimentConfig, MethodSpec};
use crate::error::{HarnessError, Result};
use crate::fetch::{default_cache_dir, epilepsy_url, fetch_epilepsy_dataset, HttpDownloader};
use crate::loader::{load_csv, read_table};
use crate::model::fit_method;
use crate::report::{mean_sd, summarise, ExperimentReport, ReportRow, SweepPoint};
use crate::synthetic::generate_synthetic;

/// The fixed test set and the source of per-repetition training samples.
#[derive(Debug, Clone)]
pub struct Splits {
    pub test: LabeledDataset,
    pool: Pool,
    master: RngSeed,
    n_train: usize,
    pub available: Option<usize>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
enum Pool {
    /// Observations not in the test set.
    Finite(LabeledDataset),
    Generated(crate::synthetic::SyntheticSpec),
}

impl Splits {
    pub fn feature_count(&self) -> usize {
        self.test.dim()
    }

    /// Training sample for `repetition`, drawn without replacement from the
    /// observations outside the test set.
    pub fn train(&self, repetition: usize) -> Result<LabeledDataset> {
        let seed = self.master.derive(&[streams::TRAIN_SPLIT, repetition as u64]);
        match &self.pool {
            Pool::Finite(rest) => {
                let idx = sample(&mut seed.rng(), rest.n(), self.n_train).into_vec();
                Ok(rest.subset(&idx))
            }
            Pool::Generated(spec) => generate_synthetic(spec, self.n_train, seed),
        }
    }

    /// Split a finite dataset: `n_test` rows chosen at random form the test set.
    pub fn from_dataset(data: &LabeledDataset, n_train: usize, n_test: usize, master: RngSeed) -> Result<Self> {
        let n = data.n();
        if n_train + n_test > n {
            return Err(HarnessError::Config(format!(
                "n_train + n_test = {} exceeds the {n} available observations",
                n_train + n_test
            )));
        }
        let mut order = sample(&mut master.derive(&[streams::TEST_SPLIT]).rng(), n, n).into_vec();
        let rest = order.split_off(n_test);
        Ok(Self {
            test: data.subset(&order),
            pool: Pool::Finite(data.subset(&rest)),
            master,
            n_train,
            available: Some(n),
            notes: Vec::new(),
        })
    }

    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        let master = config.master_seed;
        match &config.source {
            DataSource::Synthetic { spec } => {
                let test = generate_synthetic(spec, config.n_test, master.derive(&[streams::TEST_SPLIT]))?;
                Ok(Self {
                    test,
                    pool: Pool::Generated(spec.clone()),
                    master,
                    n_train: config.n_train,
                    available: None,
                    notes: Vec::new(),
                })
            }
            DataSource::Csv { path, options } => {
                let data = load_csv(path, options)?;
                let mut splits = Self::from_dataset(&data, config.n_train, config.n_test, master)?;
                splits.notes.push(format!("{}: {} rows, {} features", path.display(), data.n(), data.dim()));
                Ok(splits)
            }
            DataSource::Epilepsy { cache_dir, url, sha256 } => {
                let dir = cache_dir.clone().unwrap_or_else(default_cache_dir);
                let url = url.clone().unwrap_or_else(epilepsy_url);
                let file = fetch_epilepsy_dataset(&dir, &url, sha256.as_deref(), &HttpDownloader::default())?;
                let table = read_table(&file.path, &file.options)?;
                let note = format!(
                    "{} columns read, identifier columns {:?} dropped, {} features kept; sha256 {}",
                    table.raw_columns, table.dropped_columns, table.p, file.sha256
                );
                let data = table.into_dataset()?;
                let [n0, n1] = data.class_counts();
                let mut splits = Self::from_dataset(&data, config.n_train, config.n_test, master)?;
                splits.notes.push(note);
                splits.notes.push(format!("class counts after merging: {n0} class 0, {n1} class 1"));
                Ok(splits)
            }
        }
    }
}

/// Seed for method `index` in `repetition`.
pub fn method_seed(master: RngSeed, repetition: usize, index: usize) -> RngSeed {
    master.derive(&[streams::METHOD, repetition as u64, index as u64])
}

fn evaluate(spec: &MethodSpec, train: &LabeledDataset, test: &LabeledDataset, seed: RngSeed) -> Result<f64> {
    let model = fit_method(spec, train, seed)?;
    Ok(test_error(&model, test)?)
}

/// Run on prepared splits. Failed fits become intractable rows.
pub fn run_on_splits(config: &ExperimentConfig, splits: &Splits) -> Result<ExperimentReport> {
    config.validate()?;
    let reps = config.repetitions;
    let roster = &config.roster;
    let trains = (0..reps).into_par_iter().map(|r| splits.train(r)).collect::<Result<Vec<_>>>()?;
    let tasks: Vec<(usize, usize)> = (0..reps).flat_map(|r| (0..roster.len()).map(move |m| (r, m))).collect();
    let rows: Vec<ReportRow> = tasks
        .par_iter()
        .map(|&(rep, idx)| {
            let spec = &roster[idx];
            let seed = method_seed(config.master_seed, rep, idx);
            let start = Instant::now();
            let outcome = evaluate(spec, &trains[rep], &splits.test, seed);
            let seconds = config.record_timings.then(|| start.elapsed().as_secs_f64());
            let (error, reason) = match outcome {
                Ok(e) => (Some(e), None),
                Err(e) => (None, Some(e.to_string())),
            };
            ReportRow {
                repetition: rep,
                method: spec.display_name(),
                intractable: error.is_none(),
                error,
                reason,
                seconds,
                seed,
            }
        })
        .collect();
    let names: Vec<String> = roster.iter().map(MethodSpec::display_name).collect();
    let summaries = summarise(&names, &rows);
    Ok(ExperimentReport {
        config: config.clone(),
        available: splits.available,
        feature_count: splits.feature_count(),
        test_seed: config.master_seed.derive(&[streams::TEST_SPLIT]),
        notes: splits.notes.clone(),
        rows,
        summaries,
    })
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    with_threads(config.threads, || {
        let splits = Splits::from_config(config)?;
        run_on_splits(config, &splits)
    })?
}

/// Train `ensembles` projection ensembles for each `B1` in `grid` on one
/// training set and report the mean and sample standard deviation of their
/// test errors. Ensemble `e` uses the same seed at every grid point, so
/// smaller ensembles are prefixes of larger ones.
pub fn b1_sweep(
    spec: &MethodSpec,
    train: &LabeledDataset,
    test: &LabeledDataset,
    grid: &[usize],
    ensembles: usize,
    master: RngSeed,
) -> Result<Vec<SweepPoint>> {
    if !spec.id()?.is_rp_ensemble() {
        return Err(HarnessError::Config(format!("b1-sweep needs a projection ensemble, got {}", spec.display_name())));
    }
    if ensembles < 2 {
        return Err(HarnessError::Config("b1-sweep needs at least two ensembles per grid point".into()));
    }
    grid.iter()
        .map(|&b1| {
            let spec = MethodSpec { b1: Some(b1), ..spec.clone() };
            let errors = (0..ensembles)
                .into_par_iter()
                .map(|e| evaluate(&spec, train, test, master.derive(&[streams::SWEEP, e as u64])))
                .collect::<Result<Vec<_>>>()?;
            let (mean, sd) = mean_sd(&errors);
            Ok(SweepPoint { b1, mean_error: mean.unwrap_or(f64::NAN), sd_error: sd.unwrap_or(f64::NAN), errors })
        })
        .collect()
}

/// Sweep using repetition 0's training sample and the fixed test set of `config`.
pub fn b1_sweep_from_config(config: &ExperimentConfig, grid: &[usize], ensembles: usize) -> Result<Vec<SweepPoint>> {
    config.validate()?;
    let spec = config
        .roster
        .iter()
        .find(|m| m.method.is_some_and(|id| id.is_rp_ensemble()))
        .ok_or_else(|| HarnessError::Config("roster has no projection-ensemble method".into()))?;
    with_threads(config.threads, || {
        let splits = Splits::from_config(config)?;
        let train = splits.train(0)?;
        b1_sweep(spec, &train, &splits.test, grid, ensembles, config.master_seed)
    })?
}
