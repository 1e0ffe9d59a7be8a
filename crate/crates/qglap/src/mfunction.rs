//! The vertex M-matrix and the vertex secular function `det(B - M(lambda))`.
//!
//! Entries follow the closed forms for delta and delta-prime vertices:
//! trigonometric on the positive real axis, hyperbolic rewrites on the
//! negative real axis (so real input gives exactly real output), series
//! limits at `lambda = 0`, and complex trigonometry elsewhere.

use crate::error::{Error, Result};
use crate::graph::{Coupling, MarkedGraph, VertexType};
use crate::point::SpectralPoint;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Points whose mu-distance to an entry pole is below this are rejected;
/// the edge formulation covers those neighborhoods.
pub const EPS_POLE: f64 = 1e-8;

/// The M-matrix evaluated at one spectral point.
#[derive(Debug, Clone)]
pub struct MMatrix {
    pub point: SpectralPoint,
    pub entries: DMatrix<Complex64>,
}

impl MMatrix {
    /// Real part of the entries; valid for real `lambda` off poles where
    /// the imaginary parts vanish identically.
    pub fn real_entries(&self) -> DMatrix<f64> {
        self.entries.map(|z| z.re)
    }
}

/// Per-edge values of the trigonometric building blocks at one spectral
/// point. `inv_*` entries are the `1/mu`-scaled variants used by
/// delta-prime vertices.
#[derive(Debug, Clone, Copy)]
struct Kernels<T> {
    mu_cot: T,
    mu_csc: T,
    mu_tan: T,
    sec: T,
    inv_mu_cot: T,
    inv_mu_csc: T,
    inv_mu_tan: T,
    mu_tan_half: T,
    inv_mu_cot_half: T,
}

// Overflow-safe hyperbolic helpers; for x*l beyond ~700 the naive cosh and
// sinh overflow while these saturate smoothly.
fn coth(x: f64) -> f64 {
    if x > 350.0 {
        1.0
    } else {
        1.0 + 2.0 / ((2.0 * x).exp_m1())
    }
}

fn csch(x: f64) -> f64 {
    if x > 350.0 {
        0.0
    } else {
        let e = (-x).exp();
        2.0 * e / (1.0 - e * e)
    }
}

fn real_kernels(lambda: f64, l: f64) -> Kernels<f64> {
    if lambda > 0.0 {
        let mu = lambda.sqrt();
        let (s, c) = (mu * l).sin_cos();
        let (sh, ch) = (mu * l / 2.0).sin_cos();
        Kernels {
            mu_cot: mu * c / s,
            mu_csc: mu / s,
            mu_tan: mu * s / c,
            sec: 1.0 / c,
            inv_mu_cot: c / (mu * s),
            inv_mu_csc: 1.0 / (mu * s),
            inv_mu_tan: s / (mu * c),
            mu_tan_half: mu * sh / ch,
            inv_mu_cot_half: ch / (mu * sh),
        }
    } else if lambda < 0.0 {
        let k = (-lambda).sqrt();
        Kernels {
            mu_cot: k * coth(k * l),
            mu_csc: k * csch(k * l),
            mu_tan: -k * (k * l).tanh(),
            sec: csch(k * l) * (k * l).tanh(), // 1/cosh
            inv_mu_cot: -coth(k * l) / k,
            inv_mu_csc: -csch(k * l) / k,
            inv_mu_tan: (k * l).tanh() / k,
            mu_tan_half: -k * (k * l / 2.0).tanh(),
            inv_mu_cot_half: -coth(k * l / 2.0) / k,
        }
    } else {
        // series limits at lambda = 0; the 1/mu-scaled kernels diverge and
        // must not be consumed (delta-prime entries pole at zero)
        Kernels {
            mu_cot: 1.0 / l,
            mu_csc: 1.0 / l,
            mu_tan: 0.0,
            sec: 1.0,
            inv_mu_cot: f64::INFINITY,
            inv_mu_csc: f64::INFINITY,
            inv_mu_tan: 0.0,
            mu_tan_half: 0.0,
            inv_mu_cot_half: f64::INFINITY,
        }
    }
}

fn complex_kernels(mu: Complex64, l: f64) -> Kernels<Complex64> {
    let z = mu * l;
    let (s, c) = (z.sin(), z.cos());
    let zh = z / 2.0;
    let (sh, ch) = (zh.sin(), zh.cos());
    Kernels {
        mu_cot: mu * c / s,
        mu_csc: mu / s,
        mu_tan: mu * s / c,
        sec: Complex64::new(1.0, 0.0) / c,
        inv_mu_cot: c / (mu * s),
        inv_mu_csc: Complex64::new(1.0, 0.0) / (mu * s),
        inv_mu_tan: s / (mu * c),
        mu_tan_half: mu * sh / ch,
        inv_mu_cot_half: ch / (mu * sh),
    }
}

/// Sorted pole positions (in mu) of the M-matrix entries on `(0, mu_max]`.
/// Only the families actually used by the graph's edges are listed.
pub fn vertex_pole_mus(g: &MarkedGraph, mu_max: f64) -> Vec<f64> {
    use std::f64::consts::PI;
    let mut poles = Vec::new();
    for e in g.edges() {
        let l = e.length;
        let is_loop = e.left_vertex == e.right_vertex;
        if is_loop {
            match g.vertex_type(e.left_vertex) {
                // mu tan(mu l / 2): cos(mu l / 2) = 0
                VertexType::Delta => {
                    let mut k = 0u64;
                    loop {
                        let mu = (2 * k + 1) as f64 * PI / l;
                        if mu > mu_max {
                            break;
                        }
                        poles.push(mu);
                        k += 1;
                    }
                }
                // cot(mu l / 2) / mu: sin(mu l / 2) = 0
                VertexType::DeltaPrime => {
                    let mut k = 1u64;
                    loop {
                        let mu = 2.0 * k as f64 * PI / l;
                        if mu > mu_max {
                            break;
                        }
                        poles.push(mu);
                        k += 1;
                    }
                }
            }
        } else if g.vertex_type(e.left_vertex) == g.vertex_type(e.right_vertex) {
            // cot / csc terms: sin(mu l) = 0
            let mut k = 1u64;
            loop {
                let mu = k as f64 * PI / l;
                if mu > mu_max {
                    break;
                }
                poles.push(mu);
                k += 1;
            }
        } else {
            // tan / sec terms: cos(mu l) = 0
            let mut k = 0u64;
            loop {
                let mu = (k as f64 + 0.5) * PI / l;
                if mu > mu_max {
                    break;
                }
                poles.push(mu);
                k += 1;
            }
        }
    }
    poles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    poles
}

/// Minimal mu-distance from a real spectral point to any relevant pole.
pub fn pole_distance(g: &MarkedGraph, lambda: f64) -> f64 {
    let has_delta_prime = g
        .vertex_types()
        .iter()
        .any(|&t| t == VertexType::DeltaPrime);
    if lambda < 0.0 {
        // hyperbolic half-line is pole free apart from the origin
        return if has_delta_prime {
            (-lambda).sqrt()
        } else {
            f64::INFINITY
        };
    }
    let mu = lambda.sqrt();
    let mut dist = if has_delta_prime { mu } else { f64::INFINITY };
    for p in vertex_pole_mus(g, mu + 1.0) {
        dist = dist.min((mu - p).abs());
    }
    dist
}

fn check_finite_couplings(g: &MarkedGraph) -> Result<()> {
    for (k, c) in g.couplings().iter().enumerate() {
        if c.is_infinite() {
            return Err(Error::InfiniteCoupling { vertex: k });
        }
    }
    Ok(())
}

/// The coupling diagonal `B = diag(alpha_1, ..., alpha_N)`.
pub fn coupling_matrix(g: &MarkedGraph) -> Result<DVector<f64>> {
    check_finite_couplings(g)?;
    Ok(DVector::from_iterator(
        g.num_vertices(),
        g.couplings().iter().map(|c| c.finite().unwrap()),
    ))
}

fn assemble<T, F>(g: &MarkedGraph, kernels: F, zero: T) -> DMatrix<T>
where
    T: nalgebra::Scalar + std::ops::AddAssign + std::ops::Sub<Output = T> + Copy,
    F: Fn(usize) -> Kernels<T>,
    T: std::ops::Neg<Output = T> + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = g.num_vertices();
    let mut m = DMatrix::from_element(n, n, zero);
    // diagonal entries
    for k in 0..n {
        let sets = g.incidence_sets(k, None).expect("valid vertex");
        let mut acc = zero;
        match g.vertex_type(k) {
            VertexType::Delta => {
                for &t in &sets.same_type {
                    acc += -kernels(t).mu_cot;
                }
                for &t in &sets.diff_type {
                    acc += kernels(t).mu_tan;
                }
                for &t in &sets.loops {
                    acc += kernels(t).mu_tan_half * 2.0;
                }
            }
            VertexType::DeltaPrime => {
                for &t in &sets.same_type {
                    acc += -kernels(t).inv_mu_cot;
                }
                for &t in &sets.diff_type {
                    acc += kernels(t).inv_mu_tan;
                }
                for &t in &sets.loops {
                    acc += -(kernels(t).inv_mu_cot_half * 2.0);
                }
            }
        }
        m[(k, k)] = acc;
    }
    // off-diagonal entries, one unordered pair at a time
    for k in 0..n {
        for j in (k + 1)..n {
            let sets = g.incidence_sets(k, Some(j)).expect("valid pair");
            let mut acc = zero;
            for &t in &sets.connecting_same {
                match g.vertex_type(k) {
                    VertexType::Delta => acc += kernels(t).mu_csc,
                    VertexType::DeltaPrime => acc += -kernels(t).inv_mu_csc,
                }
            }
            for &t in &sets.connecting_diff {
                acc += -kernels(t).sec;
            }
            m[(k, j)] = acc;
            m[(j, k)] = acc;
        }
    }
    m
}

/// M-matrix on the real axis. Off-pole real `lambda` only.
pub fn m_matrix_real(g: &MarkedGraph, lambda: f64) -> Result<DMatrix<f64>> {
    check_finite_couplings(g)?;
    let distance = pole_distance(g, lambda);
    if distance < EPS_POLE {
        return Err(Error::PoleProximity { distance });
    }
    let per_edge: Vec<Kernels<f64>> = g
        .edges()
        .iter()
        .map(|e| real_kernels(lambda, e.length))
        .collect();
    Ok(assemble(g, |t| per_edge[t], 0.0))
}

/// The Weyl-Titchmarsh M-matrix at an arbitrary spectral point. Real
/// input takes the exactly-real path.
pub fn m_matrix(g: &MarkedGraph, p: SpectralPoint) -> Result<MMatrix> {
    if p.is_real() {
        let real = m_matrix_real(g, p.lambda.re)?;
        return Ok(MMatrix {
            point: p,
            entries: real.map(|x| Complex64::new(x, 0.0)),
        });
    }
    check_finite_couplings(g)?;
    let per_edge: Vec<Kernels<Complex64>> = g
        .edges()
        .iter()
        .map(|e| complex_kernels(p.mu, e.length))
        .collect();
    Ok(MMatrix {
        point: p,
        entries: assemble(g, |t| per_edge[t], Complex64::new(0.0, 0.0)),
    })
}

/// Vertex secular function `det(B - M(lambda))` on the real axis.
pub fn secular_vertex_real(g: &MarkedGraph, lambda: f64) -> Result<f64> {
    let b = coupling_matrix(g)?;
    let m = m_matrix_real(g, lambda)?;
    let bm = DMatrix::from_diagonal(&b) - m;
    Ok(bm.lu().determinant())
}

/// Vertex secular function at an arbitrary spectral point.
pub fn secular_vertex(g: &MarkedGraph, p: SpectralPoint) -> Result<Complex64> {
    if p.is_real() {
        return Ok(Complex64::new(secular_vertex_real(g, p.lambda.re)?, 0.0));
    }
    let b = coupling_matrix(g)?;
    let m = m_matrix(g, p)?;
    let bd = DMatrix::from_diagonal(&b.map(|x| Complex64::new(x, 0.0)));
    Ok((bd - m.entries).lu().determinant())
}

/// Samples of `det(B1 - M(-tau^2)) / det(B2 - M(-tau^2))` along the negative
/// real axis. Constant samples signal isospectral coupling vectors.
pub fn hadamard_ratio(
    g1: &MarkedGraph,
    g2: &MarkedGraph,
    tau_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if !g1.same_marked_graph(g2) {
        return Err(Error::GraphMismatch("topology, lengths or types".into()));
    }
    let mut out = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        let lambda = -tau * tau;
        let num = secular_vertex_real(g1, lambda)?;
        let den = secular_vertex_real(g2, lambda)?;
        if den.abs() < 1e-300 {
            return Err(Error::DivisionNearZero(den.abs()));
        }
        out.push((tau, num / den));
    }
    Ok(out)
}

/// Limit of the determinant ratio as `tau -> infinity`: the ratio of the
/// delta-prime coupling products (with degrees substituted for zero
/// couplings). Equals 1 for all-delta graphs.
pub fn hadamard_limit(g1: &MarkedGraph, g2: &MarkedGraph) -> Result<f64> {
    if !g1.same_marked_graph(g2) {
        return Err(Error::GraphMismatch("topology, lengths or types".into()));
    }
    let degrees = g1.degrees();
    let product = |g: &MarkedGraph| -> Result<f64> {
        let mut p = 1.0;
        for k in 0..g.num_vertices() {
            if g.vertex_type(k) == VertexType::DeltaPrime {
                match g.coupling(k) {
                    Coupling::Finite(a) if a != 0.0 => p *= a,
                    Coupling::Finite(_) => p *= degrees[k] as f64,
                    Coupling::Infinite => {
                        return Err(Error::InfiniteCoupling { vertex: k });
                    }
                }
            }
        }
        Ok(p)
    };
    let den = product(g2)?;
    if den.abs() < 1e-300 {
        return Err(Error::DivisionNearZero(den.abs()));
    }
    Ok(product(g1)? / den)
}
