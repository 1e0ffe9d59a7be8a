//! Trace sums, sigma-multiset necessary conditions, and the brute-force
//! search for coupling vectors isospectral to a given one on the same
//! marked graph.

use crate::error::{Error, Result};
use crate::graph::{Coupling, MarkedGraph, VertexType};
use crate::spectrum::{compare_spectra, find_spectrum, ComparisonReport, ScanConfig};
use serde::Serialize;

fn finite_alpha(g: &MarkedGraph, k: usize) -> Result<f64> {
    g.coupling(k)
        .finite()
        .ok_or(Error::InfiniteCoupling { vertex: k })
}

/// The spectral invariant attached to vertex `k`: `-alpha/gamma` at a delta
/// vertex, `gamma/alpha` at a delta-prime vertex with nonzero coupling, and
/// zero at a delta-prime vertex with zero coupling.
fn sigma_of(g: &MarkedGraph, k: usize, degree: usize) -> Result<f64> {
    let alpha = finite_alpha(g, k)?;
    let gamma = degree as f64;
    Ok(match g.vertex_type(k) {
        VertexType::Delta => -alpha / gamma,
        VertexType::DeltaPrime => {
            if alpha == 0.0 {
                0.0
            } else {
                gamma / alpha
            }
        }
    })
}

/// Power sum of the vertex invariants.
pub fn trace_sum(g: &MarkedGraph, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::ParamMismatch("trace order must be positive".into()));
    }
    let degrees = g.degrees();
    let mut sum = 0.0;
    for k in 0..g.num_vertices() {
        let alpha = finite_alpha(g, k)?;
        // delta-prime vertices with zero coupling drop out of the sum
        if g.vertex_type(k) == VertexType::DeltaPrime && alpha == 0.0 {
            continue;
        }
        sum += sigma_of(g, k, degrees[k])?.powi(m as i32);
    }
    Ok(sum)
}

/// Sorted vertex invariants with structural zero counts. Zero membership is
/// decided on exact `alpha == 0`, not numerically: a zero coupling changes
/// the boundary condition, it is not a small number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaMultiset {
    pub values: Vec<f64>,
    pub deltaprime_zero_count: usize,
    pub total_zero_count: usize,
}

pub fn sigma_multiset(g: &MarkedGraph) -> Result<SigmaMultiset> {
    let degrees = g.degrees();
    let mut values = Vec::with_capacity(g.num_vertices());
    let mut dp_zero = 0;
    let mut total_zero = 0;
    for k in 0..g.num_vertices() {
        let alpha = finite_alpha(g, k)?;
        if alpha == 0.0 {
            total_zero += 1;
            if g.vertex_type(k) == VertexType::DeltaPrime {
                dp_zero += 1;
            }
        }
        values.push(sigma_of(g, k, degrees[k])?);
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(SigmaMultiset {
        values,
        deltaprime_zero_count: dp_zero,
        total_zero_count: total_zero,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub m: u32,
    pub lhs_sum: f64,
    pub rhs_sum: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub passes: bool,
    pub first_violation: Option<String>,
    pub trace_rows: Vec<TraceRow>,
}

/// Necessary conditions for isospectrality of two coupling choices on the
/// same marked graph: matching sigma multisets and matching zero counts.
/// Power-sum residuals are reported alongside as corroboration.
pub fn necessary_check(g1: &MarkedGraph, g2: &MarkedGraph, tol: f64) -> Result<CheckReport> {
    if g1.num_vertices() != g2.num_vertices() {
        return Err(Error::SizeMismatch(g1.num_vertices(), g2.num_vertices()));
    }
    let s1 = sigma_multiset(g1)?;
    let s2 = sigma_multiset(g2)?;
    let scale = s1
        .values
        .iter()
        .chain(&s2.values)
        .fold(1.0f64, |m, v| m.max(v.abs()));

    let mut first_violation = None;
    if s1.deltaprime_zero_count != s2.deltaprime_zero_count {
        first_violation = Some(format!(
            "delta-prime zero counts differ: {} vs {}",
            s1.deltaprime_zero_count, s2.deltaprime_zero_count
        ));
    } else if s1.total_zero_count != s2.total_zero_count {
        first_violation = Some(format!(
            "total zero counts differ: {} vs {}",
            s1.total_zero_count, s2.total_zero_count
        ));
    } else {
        for (i, (a, b)) in s1.values.iter().zip(&s2.values).enumerate() {
            if (a - b).abs() > tol * scale {
                first_violation = Some(format!("sigma[{i}] differs: {a} vs {b}"));
                break;
            }
        }
    }

    let n = g1.num_vertices() as u32;
    let mut trace_rows = Vec::new();
    for m in 1..=n.max(1) {
        let lhs = trace_sum(g1, m)?;
        let rhs = trace_sum(g2, m)?;
        trace_rows.push(TraceRow {
            m,
            lhs_sum: lhs,
            rhs_sum: rhs,
            residual: lhs - rhs,
        });
    }
    Ok(CheckReport {
        passes: first_violation.is_none(),
        first_violation,
        trace_rows,
    })
}

/// True iff the power sums of the two multisets agree for `m = 1..=m_max`.
/// For `m_max >= N` this is equivalent to multiset equality.
pub fn power_sums_match(beta1: &[f64], beta2: &[f64], m_max: u32) -> Result<bool> {
    if beta1.len() != beta2.len() {
        return Err(Error::SizeMismatch(beta1.len(), beta2.len()));
    }
    let scale = beta1
        .iter()
        .chain(beta2)
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let n = beta1.len() as f64;
    for m in 1..=m_max {
        let p1: f64 = beta1.iter().map(|b| b.powi(m as i32)).sum();
        let p2: f64 = beta2.iter().map(|b| b.powi(m as i32)).sum();
        if (p1 - p2).abs() > 1e-9 * n * scale.powi(m as i32).max(1.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Generate all distinct permutations of `values` (duplicates collapsed).
fn unique_permutations(values: &[f64]) -> Vec<Vec<f64>> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let mut used = vec![false; n];
    let mut current = Vec::with_capacity(n);
    let mut out = Vec::new();
    fn rec(
        sorted: &[f64],
        used: &mut [bool],
        current: &mut Vec<f64>,
        out: &mut Vec<Vec<f64>>,
    ) {
        if current.len() == sorted.len() {
            out.push(current.clone());
            return;
        }
        for i in 0..sorted.len() {
            if used[i] || (i > 0 && sorted[i] == sorted[i - 1] && !used[i - 1]) {
                continue;
            }
            used[i] = true;
            current.push(sorted[i]);
            rec(sorted, used, current, out);
            current.pop();
            used[i] = false;
        }
    }
    rec(&sorted, &mut used, &mut current, &mut out);
    out
}

/// Invert a sigma assignment back to coupling constants; `None` when the
/// assignment is incompatible with the vertex types.
fn invert_assignment(g: &MarkedGraph, sigmas: &[f64]) -> Option<Vec<f64>> {
    let degrees = g.degrees();
    let mut alphas = Vec::with_capacity(sigmas.len());
    for (k, &s) in sigmas.iter().enumerate() {
        let gamma = degrees[k] as f64;
        let a = match g.vertex_type(k) {
            VertexType::Delta => -s * gamma,
            VertexType::DeltaPrime => {
                if s == 0.0 {
                    0.0
                } else {
                    gamma / s
                }
            }
        };
        alphas.push(a);
    }
    Some(alphas)
}

/// Exhaustive search over permutations of the vertex invariants for coupling
/// vectors numerically isospectral to `g`. Candidates that change which
/// vertices carry structurally zero couplings are pruned before any spectral
/// work, and the identity configuration is excluded.
pub fn search_isospectral(
    g: &MarkedGraph,
    lambda_max: f64,
    tol: f64,
) -> Result<Vec<(Vec<f64>, ComparisonReport)>> {
    let n = g.num_vertices();
    if n > 8 {
        return Err(Error::SearchSpaceTooLarge(n));
    }
    let base_sigma = sigma_multiset(g)?;
    let base_alphas: Vec<f64> = (0..n)
        .map(|k| finite_alpha(g, k))
        .collect::<Result<_>>()?;

    let cfg = ScanConfig::default();
    let base_spec = find_spectrum(g, lambda_max, &cfg)?;

    let mut seen: Vec<Vec<f64>> = Vec::new();
    let mut hits = Vec::new();
    for perm in unique_permutations(&base_sigma.values) {
        let dp_zero = perm
            .iter()
            .enumerate()
            .filter(|&(k, &s)| s == 0.0 && g.vertex_type(k) == VertexType::DeltaPrime)
            .count();
        if dp_zero != base_sigma.deltaprime_zero_count {
            continue;
        }
        let Some(alphas) = invert_assignment(g, &perm) else {
            continue;
        };
        let is_identity = alphas
            .iter()
            .zip(&base_alphas)
            .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        if is_identity || seen.iter().any(|s| s == &alphas) {
            continue;
        }
        seen.push(alphas.clone());
        let candidate = g.with_couplings(alphas.iter().map(|&a| Coupling::Finite(a)).collect())?;
        let spec = find_spectrum(&candidate, lambda_max, &cfg)?;
        let report = compare_spectra(&base_spec, &spec, tol);
        if report.verdict == crate::spectrum::Verdict::Isospectral {
            hits.push((alphas, report));
        }
    }
    hits.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(hits)
}

/// Compare `g` against the fully decoupled operator obtained by sending all
/// couplings to infinity. The graph must be homogeneous in vertex type.
pub fn decoupled_isospectrality_check(
    g: &MarkedGraph,
    lambda_max: f64,
) -> Result<ComparisonReport> {
    let types = g.vertex_types();
    if types.iter().any(|&t| t != types[0]) {
        return Err(Error::MixedTypes);
    }
    let cfg = ScanConfig::default();
    let s1 = find_spectrum(g, lambda_max, &cfg)?;
    let s2 = find_spectrum(&g.with_all_infinite(), lambda_max, &cfg)?;
    Ok(compare_spectra(&s1, &s2, 1e-7))
}
