//! Empirical matrix distributions: sampled distance matrices, their
//! symmetry and projectivity checks, minor spectra and entropy of growing
//! corner minors.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{admissibility_event, eps_entropy, AdmissibilityMethod, EpsMethod};
use crate::metric::{validate, DistanceMatrix, FiniteMetricTriple};
use crate::sample::{distance_matrix, sample_points, SampleableTriple};
use crate::{rng, Error, Result};

/// Fewest replicas accepted by the invariance test.
pub const MIN_INVARIANCE_REPLICAS: usize = 30;
/// p-values below this flag an implementation error.
pub const GROSS_FAILURE_P: f64 = 1e-4;
pub const SPECTRAL_TOL: f64 = 1e-7;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixSampleSet {
    pub source: String,
    pub n: usize,
    pub replicas: usize,
    pub seed: u64,
    pub matrices: Vec<DistanceMatrix>,
}

/// `replicas` distance matrices of `n` i.i.d. points each. Replica `r`
/// uses its own stream, so results do not depend on scheduling.
pub fn sample_dn<S: SampleableTriple + ?Sized>(t: &S, n: usize, replicas: usize, seed: u64) -> Result<MatrixSampleSet> {
    if n == 0 {
        return Err(Error::Value("matrix dimension must be at least 1".into()));
    }
    let matrices = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let m = distance_matrix(t, &sample_points(t, seed, r, n));
            let report = validate(&m.rows(), false)?;
            if report.ok() {
                Ok(m)
            } else {
                Err(Error::Validation(format!("replica {r}: {}", report.summary())))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MatrixSampleSet { source: t.describe(), n, replicas, seed, matrices })
}

/// Whether the leading `n x n` block of an `n + 1` point sample equals the
/// `n` point sample from the same stream.
pub fn projectivity_check<S: SampleableTriple + ?Sized>(t: &S, n: usize, seed: u64) -> bool {
    let big = distance_matrix(t, &sample_points(t, seed, 0, n + 1));
    let small = distance_matrix(t, &sample_points(t, seed, 0, n));
    big.minor(n) == small
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvarianceStatistic {
    /// Largest eigenvalue.
    Spectral,
    /// Entry `(0, 1)`.
    Entrywise,
}

impl std::str::FromStr for InvarianceStatistic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(InvarianceStatistic::Spectral),
            "entrywise" => Ok(InvarianceStatistic::Entrywise),
            other => Err(Error::Value(format!("unknown statistic '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub statistic: InvarianceStatistic,
    pub raw_count: usize,
    pub permuted_count: usize,
    pub ks_statistic: f64,
    pub p_value: f64,
    pub gross_failure: bool,
}

fn eigenvalues(m: &DistanceMatrix) -> Vec<f64> {
    let n = m.n();
    let a = DMatrix::from_row_slice(n, n, m.as_slice());
    let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

fn statistic(m: &DistanceMatrix, s: InvarianceStatistic) -> f64 {
    match s {
        InvarianceStatistic::Spectral => eigenvalues(m)[0],
        InvarianceStatistic::Entrywise => {
            if m.n() < 2 {
                0.0
            } else {
                m.get(0, 1)
            }
        }
    }
}

/// Asymptotic two-sample Kolmogorov-Smirnov test; returns `(D, p)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n1, n2) = (x.len(), y.len());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < n1 && j < n2 {
        let v = x[i].min(y[j]);
        while i < n1 && x[i] <= v {
            i += 1;
        }
        while j < n2 && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    let en = ((n1 * n2) as f64 / (n1 + n2) as f64).sqrt();
    (d, kolmogorov_q((en + 0.12 + 0.11 / en) * d))
}

/// Tail `Q(l) = 2 sum_k (-1)^(k-1) exp(-2 k^2 l^2)` of the Kolmogorov law.
fn kolmogorov_q(l: f64) -> f64 {
    if l < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let term = sign * (-2.0 * (k * k) as f64 * l * l).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Compares a statistic of half the matrices against the same statistic of
/// the other half after conjugation by random permutations. The halves are
/// independent, so under exact invariance the p-value is uniform.
pub fn permutation_invariance_test(set: &MatrixSampleSet, stat: InvarianceStatistic, seed: u64) -> Result<InvarianceReport> {
    if set.matrices.len() < MIN_INVARIANCE_REPLICAS {
        return Err(Error::InsufficientData(format!(
            "{} replicas given, the test needs at least {MIN_INVARIANCE_REPLICAS}",
            set.matrices.len()
        )));
    }
    let raw: Vec<f64> = set.matrices.iter().step_by(2).map(|m| statistic(m, stat)).collect();
    let permuted: Vec<f64> = set
        .matrices
        .iter()
        .enumerate()
        .skip(1)
        .step_by(2)
        .map(|(r, m)| {
            let mut perm: Vec<usize> = (0..m.n()).collect();
            perm.shuffle(&mut rng::stream(seed, "permute", r as u64));
            statistic(&m.submatrix(&perm), stat)
        })
        .collect();
    let (d, p) = ks_two_sample(&raw, &permuted);
    Ok(InvarianceReport {
        statistic: stat,
        raw_count: raw.len(),
        permuted_count: permuted.len(),
        ks_statistic: d,
        p_value: p,
        gross_failure: p < GROSS_FAILURE_P,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub replica: usize,
    pub size: usize,
    pub index: usize,
    pub eigenvalue: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SizeSummary {
    pub size: usize,
    pub mean_largest: f64,
    pub mean_smallest: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectraReport {
    pub sizes: Vec<usize>,
    /// Eigenvalues in descending order per replica and minor size.
    pub rows: Vec<SpectrumRow>,
    pub summary: Vec<SizeSummary>,
    /// Largest `|sum of eigenvalues|` seen; the trace is zero.
    pub max_trace_error: f64,
    /// Largest violation of Cauchy interlacing between nested minors.
    pub max_interlacing_violation: f64,
    pub trace_ok: bool,
    pub interlacing_ok: bool,
}

impl SpectraReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("replica,size,index,eigenvalue\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{:?}\n", r.replica, r.size, r.index, r.eigenvalue));
        }
        s
    }
}

/// Eigenvalues of the leading principal minors of each sampled matrix.
pub fn minor_spectra(set: &MatrixSampleSet, sizes: &[usize]) -> Result<SpectraReport> {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    if let Some(&s) = sizes.iter().find(|&&s| s == 0 || s > set.n) {
        return Err(Error::Value(format!("minor size {s} outside 1..={}", set.n)));
    }
    let per: Vec<Vec<Vec<f64>>> =
        set.matrices.par_iter().map(|m| sizes.iter().map(|&k| eigenvalues(&m.minor(k))).collect()).collect();
    let mut rows = Vec::new();
    let mut trace_err: f64 = 0.0;
    let mut inter: f64 = 0.0;
    for (r, spectra) in per.iter().enumerate() {
        for (s, ev) in sizes.iter().zip(spectra) {
            trace_err = trace_err.max(ev.iter().sum::<f64>().abs());
            for (i, &e) in ev.iter().enumerate() {
                rows.push(SpectrumRow { replica: r, size: *s, index: i, eigenvalue: e });
            }
        }
        // lambda_i(big) >= lambda_i(small) >= lambda_{i + big - small}(big)
        for a in 0..sizes.len() {
            for b in a + 1..sizes.len() {
                let (small, big) = (&spectra[a], &spectra[b]);
                let gap = sizes[b] - sizes[a];
                for (i, &l) in small.iter().enumerate() {
                    inter = inter.max(l - big[i]).max(big[i + gap] - l);
                }
            }
        }
    }
    let summary = sizes
        .iter()
        .enumerate()
        .map(|(k, &size)| {
            let cnt = per.len().max(1) as f64;
            SizeSummary {
                size,
                mean_largest: per.iter().map(|s| s[k][0]).sum::<f64>() / cnt,
                mean_smallest: per.iter().map(|s| *s[k].last().unwrap()).sum::<f64>() / cnt,
            }
        })
        .collect();
    Ok(SpectraReport {
        sizes,
        rows,
        summary,
        max_trace_error: trace_err,
        max_interlacing_violation: inter,
        trace_ok: trace_err <= SPECTRAL_TOL,
        interlacing_ok: inter <= SPECTRAL_TOL,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CornerEntropy {
    pub eps: f64,
    pub k: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CornerVerdict {
    pub eps: f64,
    /// The last three corner entropies agree.
    pub bounded_so_far: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdmissibilityDiagnostic {
    pub rows: Vec<CornerEntropy>,
    pub verdicts: Vec<CornerVerdict>,
}

/// Corner sizes `1, 2, 4, ...` up to `n`, ending at `n`.
pub fn doubling_schedule(n: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = std::iter::successors(Some(1usize), |&k| Some(k * 2)).take_while(|&k| k <= n).collect();
    if ks.last() != Some(&n) && n > 0 {
        ks.push(n);
    }
    ks
}

/// Exact entropy of the uniformly weighted corner minors along the doubling
/// schedule, with a boundedness verdict per `eps`.
pub fn entropy_admissibility_diagnostic(m: &DistanceMatrix, eps_list: &[f64]) -> Result<AdmissibilityDiagnostic> {
    let report = validate(&m.rows(), false)?;
    if !report.ok() {
        return Err(Error::Validation(report.summary()));
    }
    let ks = doubling_schedule(m.n());
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for &eps in eps_list {
        let mut values = Vec::new();
        for &k in &ks {
            let t = FiniteMetricTriple::uniform(m.minor(k)).quotient_zero_blocks();
            let v = eps_entropy(&t, eps, EpsMethod::Exact)?.value;
            rows.push(CornerEntropy { eps, k, value: v });
            values.push(v);
        }
        let tail = &values[values.len().saturating_sub(3)..];
        let bounded = values.len() >= 3 && tail.iter().all(|&v| v == tail[0]);
        verdicts.push(CornerVerdict { eps, bounded_so_far: bounded });
    }
    Ok(AdmissibilityDiagnostic { rows, verdicts })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EventFrequency {
    pub n: usize,
    pub frequency: f64,
    /// Binomial standard error of the frequency.
    pub stderr: f64,
}

/// Frequency over replicas of the event that `n` sampled points contain at
/// least `eps * n` points pairwise farther apart than `eps`.
pub fn admissibility_frequency<S: SampleableTriple + ?Sized>(
    t: &S,
    eps: f64,
    sizes: &[usize],
    replicas: usize,
    seed: u64,
) -> Result<Vec<EventFrequency>> {
    sizes
        .iter()
        .map(|&n| {
            let hits = (0..replicas as u64)
                .into_par_iter()
                .map(|r| {
                    let d = distance_matrix(t, &sample_points(t, seed, r, n));
                    admissibility_event(&d, eps, AdmissibilityMethod::Exact).map(|a| a.event as usize)
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .sum::<usize>();
            let f = hits as f64 / replicas.max(1) as f64;
            Ok(EventFrequency { n, frequency: f, stderr: (f * (1.0 - f) / replicas.max(1) as f64).sqrt() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{Circle, Cube};

    #[test]
    fn one_point_matrices() {
        let s = sample_dn(&Circle, 1, 3, 0).unwrap();
        assert!(s.matrices.iter().all(|m| m.n() == 1 && m.get(0, 0) == 0.0));
    }

    #[test]
    fn projectivity_holds_and_reseeding_breaks_it() {
        assert!(projectivity_check(&Circle, 6, 9));
        let big = distance_matrix(&Circle, &sample_points(&Circle, 1, 0, 7));
        let other = distance_matrix(&Circle, &sample_points(&Circle, 2, 0, 6));
        assert_ne!(big.minor(6), other);
    }

    #[test]
    fn two_point_spectrum() {
        let m = DistanceMatrix::from_fn(2, |_, _| 0.3).unwrap();
        let ev = eigenvalues(&m);
        assert!((ev[0] - 0.3).abs() < 1e-15 && (ev[1] + 0.3).abs() < 1e-15);
    }

    #[test]
    fn ks_of_identical_samples() {
        let a: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let (d, p) = ks_two_sample(&a, &a);
        assert_eq!(d, 0.0);
        assert_eq!(p, 1.0);
        let b: Vec<f64> = a.iter().map(|x| x + 100.0).collect();
        assert!(ks_two_sample(&a, &b).1 < 1e-10);
    }

    #[test]
    fn simplex_corners_are_unbounded() {
        let m = DistanceMatrix::from_fn(16, |_, _| 1.0).unwrap();
        let d = entropy_admissibility_diagnostic(&m, &[0.5]).unwrap();
        assert!(!d.verdicts[0].bounded_so_far);
        let z = DistanceMatrix::zeros(16);
        let d = entropy_admissibility_diagnostic(&z, &[0.5]).unwrap();
        assert!(d.verdicts[0].bounded_so_far && d.rows.iter().all(|r| r.value == 0.0));
    }

    #[test]
    fn spectra_of_cube_samples() {
        let s = sample_dn(&Cube { dim: 6 }, 10, 5, 3).unwrap();
        let r = minor_spectra(&s, &[3, 5, 10]).unwrap();
        assert!(r.trace_ok && r.interlacing_ok);
        assert_eq!(r.rows.len(), 5 * 18);
    }
}
