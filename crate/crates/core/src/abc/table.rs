use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{AbcError, Result};
use crate::oracle::ModelPrior;
use crate::rng::{derive_stream, RngStream};
use crate::sim::{sample_prior, simulate_dataset, ModelIndex, ModelPairSpec};
use crate::stats::{summarize, SummaryStatistic};

use super::config::AbcConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct TableMetadata {
    pub pair: ModelPairSpec,
    pub statistic: SummaryStatistic,
    pub data_size: usize,
    pub table_size: usize,
    pub master_seed: u64,
    /// Model prior the rows were simulated under.
    pub model_prior: ModelPrior,
}

/// Simulated `(m, θ, η(z))` rows. Row `i` is a pure function of
/// `derive_stream(master_seed, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTable {
    metadata: TableMetadata,
    models: Vec<ModelIndex>,
    thetas: Vec<f64>,
    summaries: Vec<f64>,
    theta_dim: usize,
    summary_dim: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct TableRow<'a> {
    pub model: ModelIndex,
    pub theta: &'a [f64],
    pub summary: &'a [f64],
}

type RowData = (ModelIndex, Vec<f64>, Vec<f64>);

fn simulate_row(
    pair: &ModelPairSpec,
    statistic: SummaryStatistic,
    n: usize,
    model: ModelIndex,
    rng: &mut RngStream,
) -> Result<RowData> {
    let theta = sample_prior(pair, model, rng);
    let z = simulate_dataset(pair, model, &theta, n, rng)?;
    let summary = summarize(statistic, &z)?;
    Ok((model, theta, summary))
}

fn draw_model(prior: ModelPrior, rng: &mut RngStream) -> ModelIndex {
    if rng.random::<f64>() < prior.p1() {
        ModelIndex::One
    } else {
        ModelIndex::Two
    }
}

impl ReferenceTable {
    fn from_rows(metadata: TableMetadata, rows: Vec<RowData>) -> Self {
        let theta_dim = metadata.pair.parameter_dim();
        let summary_dim = metadata.statistic.output_dim(metadata.data_size);
        let mut models = Vec::with_capacity(rows.len());
        let mut thetas = Vec::with_capacity(rows.len() * theta_dim);
        let mut summaries = Vec::with_capacity(rows.len() * summary_dim);
        for (m, theta, summary) in rows {
            debug_assert_eq!(summary.len(), summary_dim);
            models.push(m);
            thetas.extend_from_slice(&theta);
            summaries.extend_from_slice(&summary);
        }
        ReferenceTable {
            metadata,
            models,
            thetas,
            summaries,
            theta_dim,
            summary_dim,
        }
    }

    /// Simulates `metadata.table_size` rows, choosing each row's model with
    /// `choose`. Runs on the current rayon pool.
    pub(crate) fn simulate<F>(metadata: TableMetadata, choose: F) -> Result<Self>
    where
        F: Fn(&mut RngStream) -> ModelIndex + Sync,
    {
        let pair = metadata.pair;
        let statistic = metadata.statistic;
        let n = metadata.data_size;
        let seed = metadata.master_seed;
        let rows = (0..metadata.table_size as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = derive_stream(seed, i);
                let model = choose(&mut rng);
                simulate_row(&pair, statistic, n, model, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_rows(metadata, rows))
    }

    #[cfg(test)]
    pub(crate) fn from_rows_for_tests(metadata: TableMetadata, rows: Vec<RowData>) -> Self {
        Self::from_rows(metadata, rows)
    }

    pub fn metadata(&self) -> &TableMetadata {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn summary_dim(&self) -> usize {
        self.summary_dim
    }

    pub fn theta_dim(&self) -> usize {
        self.theta_dim
    }

    pub fn model(&self, i: usize) -> ModelIndex {
        self.models[i]
    }

    pub fn theta(&self, i: usize) -> &[f64] {
        &self.thetas[i * self.theta_dim..(i + 1) * self.theta_dim]
    }

    pub fn summary(&self, i: usize) -> &[f64] {
        &self.summaries[i * self.summary_dim..(i + 1) * self.summary_dim]
    }

    pub fn row(&self, i: usize) -> TableRow<'_> {
        TableRow {
            model: self.model(i),
            theta: self.theta(i),
            summary: self.summary(i),
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = TableRow<'_>> + '_ {
        (0..self.len()).map(|i| self.row(i))
    }

    /// Number of rows from each model.
    pub fn model_counts(&self) -> (usize, usize) {
        let ones = self.models.iter().filter(|m| **m == ModelIndex::One).count();
        (ones, self.len() - ones)
    }

    /// Writes the table as CSV: `#`-prefixed metadata lines, then a header
    /// `m,theta_1..theta_k,eta_1..eta_d`, then one row per simulation with
    /// 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        let md = &self.metadata;
        let io = |e| AbcError::io("<reference table>", e);
        writeln!(out, "# pair: {}", md.pair.name()).map_err(io)?;
        if let ModelPairSpec::NormalNormal {
            sigma1,
            sigma2,
            prior_scale,
        } = md.pair
        {
            writeln!(out, "# sigma1: {}", fmt_real(sigma1)).map_err(io)?;
            writeln!(out, "# sigma2: {}", fmt_real(sigma2)).map_err(io)?;
            writeln!(out, "# a: {}", fmt_real(prior_scale)).map_err(io)?;
        }
        writeln!(out, "# statistic: {}", md.statistic).map_err(io)?;
        writeln!(out, "# n: {}", md.data_size).map_err(io)?;
        writeln!(out, "# T: {}", md.table_size).map_err(io)?;
        writeln!(out, "# seed: {}", md.master_seed).map_err(io)?;
        writeln!(out, "# model_prior_p1: {}", fmt_real(md.model_prior.p1())).map_err(io)?;

        let mut writer = csv::Writer::from_writer(out);
        let mut header = vec!["m".to_string()];
        header.extend((1..=self.theta_dim).map(|j| format!("theta_{j}")));
        header.extend((1..=self.summary_dim).map(|j| format!("eta_{j}")));
        writer.write_record(&header)?;
        let mut record = Vec::with_capacity(header.len());
        for row in self.rows() {
            record.clear();
            record.push(row.model.number().to_string());
            record.extend(row.theta.iter().map(|v| fmt_real(*v)));
            record.extend(row.summary.iter().map(|v| fmt_real(*v)));
            writer.write_record(&record)?;
        }
        writer.flush().map_err(io)?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| AbcError::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
            .map_err(|e| match e {
                AbcError::Io { source, .. } => AbcError::io(path, source),
                other => other,
            })
    }

    /// Parses the format written by [`ReferenceTable::write_csv`].
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut text = String::new();
        let mut input = input;
        input
            .read_to_string(&mut text)
            .map_err(|e| AbcError::io("<reference table>", e))?;

        let mut meta = std::collections::HashMap::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once(':') {
                    meta.insert(k.trim().to_string(), v.trim().to_string());
                }
            }
        }
        let get = |k: &str| {
            meta.get(k)
                .cloned()
                .ok_or_else(|| AbcError::Parse(format!("missing metadata '{k}'")))
        };
        let num = |k: &str| -> Result<f64> {
            get(k)?
                .parse::<f64>()
                .map_err(|_| AbcError::Parse(format!("bad metadata '{k}'")))
        };
        let int = |k: &str| -> Result<u64> {
            get(k)?
                .parse::<u64>()
                .map_err(|_| AbcError::Parse(format!("bad metadata '{k}'")))
        };
        let pair = match get("pair")?.as_str() {
            "pois-geo" => ModelPairSpec::PoissonGeometric,
            "normal" => ModelPairSpec::normal(num("sigma1")?, num("sigma2")?, num("a")?)?,
            other => return Err(AbcError::Parse(format!("unknown pair '{other}'"))),
        };
        let metadata = TableMetadata {
            pair,
            statistic: get("statistic")?.parse()?,
            data_size: int("n")? as usize,
            table_size: int("T")? as usize,
            master_seed: int("seed")?,
            model_prior: ModelPrior::new(num("model_prior_p1")?)?,
        };

        let theta_dim = pair.parameter_dim();
        let summary_dim = metadata.statistic.output_dim(metadata.data_size);
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let width = reader.headers()?.len();
        if width != 1 + theta_dim + summary_dim {
            return Err(AbcError::DimensionMismatch {
                expected: 1 + theta_dim + summary_dim,
                got: width,
            });
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| AbcError::Parse(format!("bad number '{s}'")))
            };
            let m: u8 = record[0]
                .parse()
                .map_err(|_| AbcError::Parse(format!("bad model '{}'", &record[0])))?;
            let theta = (1..=theta_dim).map(|j| parse(&record[j])).collect::<Result<Vec<_>>>()?;
            let summary = (1 + theta_dim..width)
                .map(|j| parse(&record[j]))
                .collect::<Result<Vec<_>>>()?;
            rows.push((ModelIndex::from_number(m)?, theta, summary));
        }
        if rows.len() != metadata.table_size {
            return Err(AbcError::Parse(format!(
                "metadata says T={} but found {} rows",
                metadata.table_size,
                rows.len()
            )));
        }
        Ok(Self::from_rows(metadata, rows))
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub(crate) fn fmt_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Simulates `config.table_size` rows from the joint prior of `pair`.
pub fn generate_reference_table(pair: &ModelPairSpec, config: &AbcConfig) -> Result<ReferenceTable> {
    config.validate()?;
    let metadata = TableMetadata {
        pair: *pair,
        statistic: config.statistic,
        data_size: config.data_size,
        table_size: config.table_size,
        master_seed: config.master_seed,
        model_prior: config.model_prior,
    };
    let prior = config.model_prior;
    ReferenceTable::simulate(metadata, move |rng| draw_model(prior, rng))
}

/// As [`generate_reference_table`], on a dedicated pool of `workers` threads.
pub fn generate_reference_table_with_workers(
    pair: &ModelPairSpec,
    config: &AbcConfig,
    workers: usize,
) -> Result<ReferenceTable> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| AbcError::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| generate_reference_table(pair, config))
}
