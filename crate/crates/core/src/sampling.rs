//! Monte Carlo estimates of correlation records from simulated local
//! measurements.
//!
//! Every record gets its own ChaCha8 stream: the generator is seeded from the
//! master seed and its stream number is the record's position in the full
//! record order. Results therefore do not depend on thread count or on which
//! subset of records is requested.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::DensityOperator;
use crate::error::{Error, Result};
use crate::formats::precise;
use crate::linalg::{digits, hermitian_eig, kron, partial_trace, ComplexMatrix, HermitianOperator};
use crate::tomography::{
    project_to_physical, BasisDescriptor, CorrelationRecord, CorrelationSet, CorrelationTomography,
    OperatorBasis, Partition,
};

/// Generator identifier written into empirical record files.
pub const GENERATOR: &str =
    "rand_chacha-0.9/ChaCha8Rng seed_from_u64(seed), set_stream(record index)";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotPlan {
    pub shots: u64,
    pub seed: u64,
    /// Index tuples to estimate; `None` means every record.
    pub targets: Option<Vec<Vec<usize>>>,
}

impl ShotPlan {
    pub fn new(shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::Format("shot count must be at least 1".into()));
        }
        Ok(ShotPlan {
            shots,
            seed,
            targets: None,
        })
    }

    pub fn with_targets(mut self, targets: Vec<Vec<usize>>) -> Self {
        self.targets = Some(targets);
        self
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// An observable acting on one tensor factor.
#[derive(Clone, Debug)]
pub struct LocalObservable {
    pub factor: usize,
    pub operator: HermitianOperator,
}

/// Exact joint outcome distribution of commuting local observables.
#[derive(Clone, Debug)]
pub struct JointDistribution {
    /// Eigenvalues of each observable, in the order given.
    pub eigenvalues: Vec<Vec<f64>>,
    /// Probabilities of eigenvector tuples, first observable slowest.
    pub probabilities: Vec<f64>,
    cdf: Vec<f64>,
}

impl JointDistribution {
    pub fn new(
        w: &DensityOperator,
        partition: &Partition,
        observables: &[LocalObservable],
    ) -> Result<Self> {
        if w.dim() != partition.total() {
            return Err(Error::Dimension(format!(
                "density operator of dimension {} on a {partition} partition",
                w.dim()
            )));
        }
        if observables.is_empty() {
            return Err(Error::Dimension("no observables to measure".into()));
        }
        let mut factors: Vec<usize> = observables.iter().map(|o| o.factor).collect();
        for o in observables {
            if o.factor >= partition.len() {
                return Err(Error::Dimension(format!(
                    "factor {} outside {partition}",
                    o.factor
                )));
            }
            if o.operator.dim() != partition.dims()[o.factor] {
                return Err(Error::Dimension(format!(
                    "observable of dimension {} on factor {} of dimension {}",
                    o.operator.dim(),
                    o.factor,
                    partition.dims()[o.factor]
                )));
            }
        }
        factors.sort_unstable();
        if let Some(pair) = factors.windows(2).find(|p| p[0] == p[1]) {
            return Err(Error::Commutation(format!(
                "two observables on factor {}",
                pair[0]
            )));
        }

        // reduced state on the measured factors, in ascending factor order
        let reduced = partial_trace(w.matrix(), partition.dims(), &factors)?;
        let eigs: Vec<_> = observables
            .iter()
            .map(|o| hermitian_eig(&o.operator))
            .collect();
        let mut order: Vec<usize> = (0..observables.len()).collect();
        order.sort_by_key(|&k| observables[k].factor);
        let basis: ComplexMatrix = order
            .iter()
            .map(|&k| eigs[k].vectors.matrix().clone())
            .reduce(|a, b| kron(&a, &b))
            .unwrap();

        let sizes: Vec<usize> = eigs.iter().map(|e| e.values.len()).collect();
        let sorted_sizes: Vec<usize> = order.iter().map(|&k| sizes[k]).collect();
        let total: usize = sizes.iter().product();
        let column_probability = |col: usize| {
            let v = basis.column(col);
            let wv = reduced.mul_vec(&v);
            crate::linalg::inner(&v, &wv).re.max(0.0)
        };
        // map each given-order tuple to the ascending-factor column of `basis`
        let mut given = vec![0; sizes.len()];
        let mut sorted = vec![0; sizes.len()];
        let probabilities: Vec<f64> = (0..total)
            .map(|flat| {
                digits(flat, &sizes, &mut given);
                for (slot, &k) in order.iter().enumerate() {
                    sorted[slot] = given[k];
                }
                let col = sorted
                    .iter()
                    .zip(&sorted_sizes)
                    .fold(0, |acc, (&i, &s)| acc * s + i);
                column_probability(col)
            })
            .collect();

        let mut acc = 0.0;
        let mut cdf: Vec<f64> = probabilities
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let norm = acc;
        cdf.iter_mut().for_each(|c| *c /= norm);
        Ok(JointDistribution {
            eigenvalues: eigs.into_iter().map(|e| e.values).collect(),
            probabilities,
            cdf,
        })
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Eigenvalue indices of outcome `flat`.
    pub fn outcome(&self, flat: usize) -> Vec<usize> {
        let sizes: Vec<usize> = self.eigenvalues.iter().map(Vec::len).collect();
        let mut out = vec![0; sizes.len()];
        digits(flat, &sizes, &mut out);
        out
    }

    /// Product of the eigenvalues of outcome `flat`.
    pub fn product_value(&self, flat: usize) -> f64 {
        self.outcome(flat)
            .iter()
            .zip(&self.eigenvalues)
            .map(|(&i, vals)| vals[i])
            .product()
    }

    /// Exact expectation of the eigenvalue product.
    pub fn mean(&self) -> f64 {
        (0..self.len())
            .map(|k| self.probabilities[k] * self.product_value(k))
            .sum()
    }

    /// One outcome by inverse CDF.
    pub fn draw(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len() - 1)
    }

    pub fn sample(&self, shots: u64, rng: &mut impl Rng) -> OutcomeCounts {
        let mut counts = vec![0u64; self.len()];
        for _ in 0..shots {
            counts[self.draw(rng)] += 1;
        }
        OutcomeCounts {
            values: (0..self.len()).map(|k| self.product_value(k)).collect(),
            counts,
        }
    }
}

/// Counts per joint outcome, in `JointDistribution` order.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeCounts {
    /// Eigenvalue product of each outcome.
    pub values: Vec<f64>,
    pub counts: Vec<u64>,
}

impl OutcomeCounts {
    pub fn shots(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        let n = self.shots() as f64;
        self.counts
            .iter()
            .zip(&self.values)
            .map(|(&c, v)| c as f64 * v)
            .sum::<f64>()
            / n
    }

    /// Sample standard deviation over `√shots`. A single shot has no sample
    /// variance, so it reports half the range of possible values instead.
    pub fn standard_error(&self) -> f64 {
        let n = self.shots();
        if n < 2 {
            let max = self
                .values
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            let min = self.values.iter().copied().fold(f64::INFINITY, f64::min);
            return (max - min) / 2.0;
        }
        let mean = self.mean();
        let ss: f64 = self
            .counts
            .iter()
            .zip(&self.values)
            .map(|(&c, v)| c as f64 * (v - mean).powi(2))
            .sum();
        (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
    }
}

/// Samples the joint outcomes of `observables` on `w` (stream 0 of the plan's seed).
pub fn sample_outcomes(
    w: &DensityOperator,
    partition: &Partition,
    observables: &[LocalObservable],
    plan: &ShotPlan,
) -> Result<OutcomeCounts> {
    let dist = JointDistribution::new(w, partition, observables)?;
    Ok(dist.sample(plan.shots, &mut plan.rng(0)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRecord {
    pub indices: Vec<usize>,
    #[serde(rename = "value", with = "precise")]
    pub estimate: f64,
    pub shots: u64,
    #[serde(with = "precise")]
    pub standard_error: f64,
}

/// Estimated records plus the metadata needed to reproduce them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSet {
    pub partition: Partition,
    pub bases: Vec<BasisDescriptor>,
    pub shots: u64,
    pub seed: u64,
    pub generator: String,
    pub records: Vec<EmpiricalRecord>,
}

impl EmpiricalSet {
    /// Estimates as plain correlation records.
    pub fn to_correlation_set(&self) -> CorrelationSet {
        CorrelationSet {
            partition: self.partition.clone(),
            bases: self.bases.clone(),
            records: self
                .records
                .iter()
                .map(|r| CorrelationRecord {
                    indices: r.indices.clone(),
                    value: r.estimate,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        crate::formats::to_json(self).expect("finite estimates serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Estimates `tr(W · M_{i₁} ⊗ … ⊗ M_{iₙ})` as the shot mean of eigenvalue
/// products, one independent stream per record.
pub fn empirical_correlations(
    w: &DensityOperator,
    partition: &Partition,
    bases: &[OperatorBasis],
    plan: &ShotPlan,
) -> Result<EmpiricalSet> {
    if plan.shots == 0 {
        return Err(Error::Format("shot count must be at least 1".into()));
    }
    // validates bases against the partition
    crate::tomography::product_expectations(
        &ComplexMatrix::identity(partition.total()),
        partition,
        bases,
    )?;
    let all = partition.index_tuples();
    let targets: Vec<(usize, Vec<usize>)> = match &plan.targets {
        None => all.into_iter().enumerate().collect(),
        Some(t) => t
            .iter()
            .map(|tuple| {
                all.iter()
                    .position(|a| a == tuple)
                    .map(|k| (k, tuple.clone()))
                    .ok_or_else(|| {
                        Error::Format(format!("target {tuple:?} does not fit {partition}"))
                    })
            })
            .collect::<Result<_>>()?,
    };

    let records = targets
        .par_iter()
        .map(|(stream, tuple)| {
            let observables: Vec<LocalObservable> = tuple
                .iter()
                .enumerate()
                .map(|(factor, &i)| LocalObservable {
                    factor,
                    operator: bases[factor].elements()[i].clone(),
                })
                .collect();
            let dist = JointDistribution::new(w, partition, &observables)?;
            let counts = dist.sample(plan.shots, &mut plan.rng(*stream as u64));
            Ok(EmpiricalRecord {
                indices: tuple.clone(),
                estimate: counts.mean(),
                shots: plan.shots,
                standard_error: counts.standard_error(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(EmpiricalSet {
        partition: partition.clone(),
        bases: bases.iter().map(|b| b.descriptor().clone()).collect(),
        shots: plan.shots,
        seed: plan.seed,
        generator: GENERATOR.to_string(),
        records,
    })
}

#[derive(Clone, Debug)]
pub struct EmpiricalReconstruction {
    /// Reconstruction of the estimates, not necessarily positive.
    pub raw: ComplexMatrix,
    /// `raw` with negative eigenvalues clipped and the trace restored.
    pub physical: DensityOperator,
    /// Why `raw` is not a density operator, if it is not.
    pub physicality: Option<String>,
    /// Max-element errors against the exact state, when one was given.
    pub raw_error: Option<f64>,
    pub physical_error: Option<f64>,
}

pub fn reconstruct_empirical(
    set: &EmpiricalSet,
    exact: Option<&DensityOperator>,
) -> Result<EmpiricalReconstruction> {
    let tomo = CorrelationTomography::new(&set.to_correlation_set())?;
    let raw = tomo.reconstruct_matrix()?;
    let physicality = match tomo.reconstruct() {
        Ok(_) => None,
        Err(Error::Physicality(msg)) => Some(msg),
        Err(e) => return Err(e),
    };
    let physical = project_to_physical(&raw)?;
    Ok(EmpiricalReconstruction {
        raw_error: exact.map(|w| raw.max_abs_diff(w.matrix())),
        physical_error: exact.map(|w| physical.matrix().max_abs_diff(w.matrix())),
        raw,
        physical,
        physicality,
    })
}
