//! Eigenvalue location on `[-kappa_max^2, lambda_max]` by scanning the
//! entire edge secular function, refining brackets, and assigning
//! multiplicities from the nullity of the matching system.

use crate::edge_secular::{nullspace_dimension, secular_edge};
use crate::error::{Error, Result};
use crate::graph::{Coupling, MarkedGraph, VertexType};
use crate::zeros::{bisect, golden_min, merge_close, scan_candidates, Candidate};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

/// Which machinery produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectrumMethod {
    EdgeSecular,
    FiniteDifference,
}

/// Sorted eigenvalues with multiplicities up to a cutoff.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<(f64, usize)>,
    pub lambda_max: f64,
    pub method: SpectrumMethod,
    /// Set when the Weyl counting bound suggests the scan missed a root.
    pub missed_root_suspected: bool,
}

impl Spectrum {
    /// Eigenvalues repeated according to multiplicity.
    pub fn flattened(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for &(lam, m) in &self.eigenvalues {
            for _ in 0..m {
                out.push(lam);
            }
        }
        out
    }

    /// Total count below `lambda`, with multiplicity.
    pub fn count_below(&self, lambda: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|&&(l, _)| l <= lambda)
            .map(|&(_, m)| m)
            .sum()
    }
}

/// Scan and refinement settings.
#[derive(Debug, Clone)]
pub struct ScanConfig {
    /// Grid step in `mu` (positive spectrum) and `kappa` (negative); derived
    /// from the total length and `oversample` when `None`.
    pub mu_step: Option<f64>,
    pub oversample: usize,
    pub refine_tol: f64,
    /// Cluster tolerance for refined roots, in the scan variable.
    pub merge_tol: f64,
    /// Search bound for the negative spectrum; heuristic from the coupling
    /// magnitudes when `None`.
    pub kappa_max: Option<f64>,
    pub rank_tol: f64,
    pub max_evaluations: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            mu_step: None,
            oversample: 8,
            refine_tol: 1e-10,
            merge_tol: 1e-7,
            kappa_max: None,
            rank_tol: 1e-6,
            max_evaluations: 5_000_000,
        }
    }
}

/// Negative-spectrum bound from the coupling magnitudes. The source theory
/// gives no localization, so fixtures double-check this by doubling.
pub fn default_kappa_max(g: &MarkedGraph) -> f64 {
    let degrees = g.degrees();
    let mut m: f64 = 0.0;
    for k in 0..g.num_vertices() {
        if let Coupling::Finite(a) = g.coupling(k) {
            match g.vertex_type(k) {
                VertexType::Delta => m = m.max(a.abs()),
                VertexType::DeltaPrime => {
                    if a != 0.0 {
                        m = m.max(degrees[k] as f64 / a.abs());
                    }
                }
            }
        }
    }
    1.0 + 2.0 * m
}

struct Budget<'a> {
    used: &'a AtomicUsize,
    limit: usize,
}

impl Budget<'_> {
    fn spend(&self) -> Result<()> {
        if self.used.fetch_add(1, Ordering::Relaxed) >= self.limit {
            Err(Error::BudgetExceeded)
        } else {
            Ok(())
        }
    }
}

/// Locate eigenvalues of the graph Laplacian in `[-kappa_max^2, lambda_max]`.
pub fn find_spectrum(g: &MarkedGraph, lambda_max: f64, cfg: &ScanConfig) -> Result<Spectrum> {
    if !(lambda_max > 0.0) {
        return Err(Error::ParamMismatch("lambda_max must be positive".into()));
    }
    if cfg.oversample < 4 {
        return Err(Error::ParamMismatch("oversample must be at least 4".into()));
    }
    let total = g.total_length();
    let coarse_limit = PI / (2.0 * total);
    let step = cfg
        .mu_step
        .unwrap_or(coarse_limit / cfg.oversample as f64);
    if step > coarse_limit {
        return Err(Error::ParamMismatch(format!(
            "mu_step {step} exceeds pi / (2 L) = {coarse_limit}"
        )));
    }
    let used = AtomicUsize::new(0);
    let budget = Budget {
        used: &used,
        limit: cfg.max_evaluations,
    };

    let mut eigenvalues: Vec<(f64, usize)> = Vec::new();

    // lambda = 0, via the entire basis directly
    let nullity0 = nullspace_dimension(g, 0.0, cfg.rank_tol)?;
    if nullity0 > 0 {
        eigenvalues.push((0.0, nullity0));
    }

    // positive spectrum: scan in mu
    let mu_max = lambda_max.sqrt();
    let pos = scan_axis(g, step, mu_max, 1.0, cfg, &budget)?;
    for (mu, m) in pos {
        if mu > 10.0 * cfg.merge_tol {
            eigenvalues.push((mu * mu, m));
        }
    }

    // negative spectrum: scan in kappa
    let kappa_max = cfg.kappa_max.unwrap_or_else(|| default_kappa_max(g));
    let neg = scan_axis(g, step, kappa_max, -1.0, cfg, &budget)?;
    for (kappa, m) in neg {
        if kappa > 10.0 * cfg.merge_tol {
            eigenvalues.push((-kappa * kappa, m));
        }
    }

    eigenvalues.retain(|&(l, _)| l <= lambda_max * (1.0 + 1e-12) + 1e-12);
    eigenvalues.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // Weyl counting sanity bound; only meaningful for finite couplings.
    let mut missed = false;
    if g.all_couplings_finite() {
        let count = eigenvalues.iter().map(|&(_, m)| m).sum::<usize>() as f64;
        let expect = total * lambda_max.sqrt() / PI;
        let slack = (g.num_vertices() + g.num_edges()) as f64;
        if (count - expect).abs() > slack {
            missed = true;
        }
    }

    Ok(Spectrum {
        eigenvalues,
        lambda_max,
        method: SpectrumMethod::EdgeSecular,
        missed_root_suspected: missed,
    })
}

/// Scan one half-axis. `sign = 1` scans `lambda = x^2`, `sign = -1` scans
/// `lambda = -x^2`. Returns refined roots in the scan variable with
/// multiplicities.
fn scan_axis(
    g: &MarkedGraph,
    step: f64,
    x_max: f64,
    sign: f64,
    cfg: &ScanConfig,
    budget: &Budget<'_>,
) -> Result<Vec<(f64, usize)>> {
    if x_max <= 0.0 {
        return Ok(Vec::new());
    }
    let n_steps = (x_max / step).ceil() as usize;
    let mut xs: Vec<f64> = Vec::with_capacity(n_steps + 2);
    xs.push(step * 1e-6);
    for i in 1..=n_steps {
        xs.push((i as f64 * step).min(x_max));
    }
    let f = |x: f64| secular_edge(g, sign * x * x);
    let fs: Vec<f64> = xs
        .par_iter()
        .map(|&x| {
            budget.spend()?;
            Ok(f(x))
        })
        .collect::<Result<Vec<f64>>>()?;

    let candidates = scan_candidates(&xs, &fs);
    let refined: Vec<Vec<(f64, usize)>> = candidates
        .par_iter()
        .map(|cand| -> Result<Vec<(f64, usize)>> {
            match *cand {
                Candidate::SignChange { lo, hi } => {
                    budget.spend()?;
                    let root = if lo == hi {
                        lo
                    } else {
                        bisect(f, lo, hi, cfg.refine_tol, 200)
                    };
                    let mult = nullspace_dimension(g, sign * root * root, cfg.rank_tol)?.max(1);
                    Ok(vec![(root, mult)])
                }
                Candidate::LocalMin {
                    lo,
                    hi,
                    local_scale,
                    ..
                } => {
                    budget.spend()?;
                    let (x0, fmin) = golden_min(|x| f(x).abs(), lo, hi, cfg.refine_tol);
                    if fmin > 1e-4 * local_scale.max(f64::MIN_POSITIVE) {
                        return Ok(Vec::new());
                    }
                    let m0 = nullspace_dimension(g, sign * x0 * x0, cfg.rank_tol)?;
                    if m0 == 0 {
                        return Ok(Vec::new());
                    }
                    let mut found = vec![(x0, m0)];
                    // Deflating by the located root exposes a second root
                    // hiding in the same cell (near-degenerate pairs do not
                    // change the sign of the determinant on the grid).
                    let defl = |x: f64| f(x) / (x - x0).powi(m0 as i32);
                    let sub_n = 32usize;
                    let sub: Vec<f64> = (0..=sub_n)
                        .map(|i| lo + (hi - lo) * i as f64 / sub_n as f64)
                        .collect();
                    let subf: Vec<f64> = sub.iter().map(|&x| defl(x)).collect();
                    budget.spend()?;
                    for c in scan_candidates(&sub, &subf) {
                        if let Candidate::SignChange { lo: a, hi: b } = c {
                            let r = if a == b {
                                a
                            } else {
                                bisect(defl, a, b, cfg.refine_tol, 200)
                            };
                            if (r - x0).abs() > cfg.merge_tol {
                                let mr = nullspace_dimension(g, sign * r * r, cfg.rank_tol)?;
                                if mr > 0 {
                                    found.push((r, mr));
                                }
                            }
                        }
                    }
                    Ok(found)
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;

    // cluster refined roots; keep the largest multiplicity in a cluster
    let mut roots: Vec<(f64, usize)> = refined.into_iter().flatten().collect();
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let centers = merge_close(roots.iter().map(|&(x, _)| x).collect(), cfg.merge_tol);
    let mut out = Vec::with_capacity(centers.len());
    for c in centers {
        let mult = roots
            .iter()
            .filter(|&&(x, _)| (x - c).abs() <= cfg.merge_tol)
            .map(|&(_, m)| m)
            .max()
            .unwrap_or(1);
        out.push((c, mult));
    }
    Ok(out)
}

/// Where two spectra first disagree.
#[derive(Debug, Clone, Serialize)]
pub struct Mismatch {
    pub index: usize,
    pub lambda_left: Option<f64>,
    pub lambda_right: Option<f64>,
}

/// Outcome of a spectrum comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Isospectral,
    NotIsospectral,
    /// Fewer than 10 comparable eigenvalues: never claimed isospectral.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub verdict: Verdict,
    pub compared: usize,
    pub max_deviation: f64,
    pub first_mismatch: Option<Mismatch>,
    pub lambda_max: f64,
    pub tol: f64,
}

/// Compare two spectra up to the smaller cutoff, counting multiplicities.
pub fn compare_spectra(s1: &Spectrum, s2: &Spectrum, tol: f64) -> ComparisonReport {
    let lambda_max = s1.lambda_max.min(s2.lambda_max);
    let f1: Vec<f64> = s1
        .flattened()
        .into_iter()
        .filter(|&l| l <= lambda_max)
        .collect();
    let f2: Vec<f64> = s2
        .flattened()
        .into_iter()
        .filter(|&l| l <= lambda_max)
        .collect();
    let common = f1.len().min(f2.len());
    let mut max_deviation: f64 = 0.0;
    let mut first_mismatch = None;
    for i in 0..common {
        let d = (f1[i] - f2[i]).abs();
        max_deviation = max_deviation.max(d);
        if d > tol && first_mismatch.is_none() {
            first_mismatch = Some(Mismatch {
                index: i,
                lambda_left: Some(f1[i]),
                lambda_right: Some(f2[i]),
            });
        }
    }
    if first_mismatch.is_none() && f1.len() != f2.len() {
        first_mismatch = Some(Mismatch {
            index: common,
            lambda_left: f1.get(common).copied(),
            lambda_right: f2.get(common).copied(),
        });
    }
    let verdict = if first_mismatch.is_some() {
        Verdict::NotIsospectral
    } else if common < 10 {
        Verdict::Inconclusive
    } else {
        Verdict::Isospectral
    };
    ComparisonReport {
        verdict,
        compared: common,
        max_deviation,
        first_mismatch,
        lambda_max,
        tol,
    }
}
