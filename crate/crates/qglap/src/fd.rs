//! Independent finite-difference oracle: a lumped-mass piecewise-linear
//! discretization of the quadratic form, equivalent to the symmetric
//! second-order finite-difference scheme. Couplings enter either as
//! boundary terms of the form or as essential constraints.

use crate::error::{Error, Result};
use crate::graph::{Coupling, End, MarkedGraph, VertexType};
use crate::spectrum::{Spectrum, SpectrumMethod};
use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

/// Dof index or an eliminated value.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Node {
    Dof(usize),
    /// Dirichlet endpoint: value identically zero.
    Zero,
}

/// Compute the lowest `count` eigenvalues on a mesh with `mesh_per_unit`
/// subdivisions per unit length. Eigenvalues closer than the discretization
/// error estimate are clustered into a single entry with multiplicity.
pub fn fd_spectrum(g: &MarkedGraph, mesh_per_unit: usize, count: usize) -> Result<Spectrum> {
    if mesh_per_unit < 16 {
        return Err(Error::MeshTooCoarse(mesh_per_unit));
    }

    let n_vertices = g.num_vertices();
    let degrees = g.degrees();

    // Per-edge subdivision counts and node layout. Endpoint nodes are
    // resolved after vertex handling below.
    let n_sub: Vec<usize> = g
        .edges()
        .iter()
        .map(|e| ((e.length * mesh_per_unit as f64).ceil() as usize).max(2))
        .collect();
    let h: Vec<f64> = g
        .edges()
        .iter()
        .zip(&n_sub)
        .map(|(e, &n)| e.length / n as f64)
        .collect();
    let h_max = h.iter().cloned().fold(0.0f64, f64::max);

    let mut next_dof = 0usize;
    let mut alloc = || {
        let d = next_dof;
        next_dof += 1;
        d
    };

    // Endpoint nodes per vertex. Delta with finite coupling shares one dof
    // across the vertex; Delta with infinite coupling pins every endpoint to
    // zero; DeltaPrime gives each endpoint its own dof.
    let mut endpoint_node = vec![[Node::Zero; 2]; g.num_edges()];
    // (vertex, endpoint dofs) for finite nonzero delta-prime couplings
    let mut rank_one: Vec<(f64, Vec<usize>)> = Vec::new();
    // endpoint-dof groups whose sum is constrained to zero
    let mut zero_sum: Vec<Vec<usize>> = Vec::new();
    // dofs carrying a diagonal coupling term
    let mut diag_terms: Vec<(usize, f64)> = Vec::new();

    for k in 0..n_vertices {
        let eps = g.endpoints_at(k);
        match (g.vertex_type(k), g.coupling(k)) {
            (VertexType::Delta, Coupling::Finite(a)) => {
                let d = alloc();
                for ep in &eps {
                    let slot = if ep.end == End::Left { 0 } else { 1 };
                    endpoint_node[ep.edge][slot] = Node::Dof(d);
                }
                if a != 0.0 {
                    diag_terms.push((d, a));
                }
            }
            (VertexType::Delta, Coupling::Infinite) => {
                // endpoints already Node::Zero
            }
            (VertexType::DeltaPrime, c) => {
                let mut dofs = Vec::with_capacity(eps.len());
                for ep in &eps {
                    let d = alloc();
                    let slot = if ep.end == End::Left { 0 } else { 1 };
                    endpoint_node[ep.edge][slot] = Node::Dof(d);
                    dofs.push(d);
                }
                match c {
                    Coupling::Finite(a) if a != 0.0 => rank_one.push((a, dofs)),
                    Coupling::Finite(_) => zero_sum.push(dofs),
                    Coupling::Infinite => {} // fully decoupled Neumann ends
                }
            }
        }
        let _ = degrees[k];
    }

    // Interior nodes.
    let mut interior: Vec<Vec<usize>> = Vec::with_capacity(g.num_edges());
    for &n in &n_sub {
        interior.push((0..n - 1).map(|_| alloc()).collect());
    }
    let n_full = next_dof;

    let mut a_mat = DMatrix::<f64>::zeros(n_full, n_full);
    let mut m_mat = DMatrix::<f64>::zeros(n_full, n_full);

    // element assembly: stiffness (1/h)[[1,-1],[-1,1]], lumped mass h/2 each
    for (e, &n) in n_sub.iter().enumerate() {
        let he = h[e];
        let node_at = |i: usize| -> Node {
            if i == 0 {
                endpoint_node[e][0]
            } else if i == n {
                endpoint_node[e][1]
            } else {
                Node::Dof(interior[e][i - 1])
            }
        };
        for i in 0..n {
            let pair = [node_at(i), node_at(i + 1)];
            for (r, &nr) in pair.iter().enumerate() {
                let Node::Dof(dr) = nr else { continue };
                m_mat[(dr, dr)] += he / 2.0;
                for (c, &nc) in pair.iter().enumerate() {
                    let Node::Dof(dc) = nc else { continue };
                    let s = if r == c { 1.0 } else { -1.0 };
                    a_mat[(dr, dc)] += s / he;
                }
            }
        }
    }
    for &(d, a) in &diag_terms {
        a_mat[(d, d)] += a;
    }
    for (a, dofs) in &rank_one {
        for &r in dofs {
            for &c in dofs {
                a_mat[(r, c)] -= 1.0 / a;
            }
        }
    }

    // Essential zero-sum constraints: eliminate the last dof of each group
    // by congruence with the map expressing it as minus the others.
    let eliminated: Vec<usize> = zero_sum.iter().map(|grp| *grp.last().unwrap()).collect();
    let keep: Vec<usize> = (0..n_full).filter(|d| !eliminated.contains(d)).collect();
    let n_red = keep.len();
    if n_red == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            lambda_max: 0.0,
            method: SpectrumMethod::FiniteDifference,
            missed_root_suspected: false,
        });
    }
    let mut t = DMatrix::<f64>::zeros(n_full, n_red);
    let red_index: Vec<Option<usize>> = {
        let mut v = vec![None; n_full];
        for (j, &d) in keep.iter().enumerate() {
            v[d] = Some(j);
        }
        v
    };
    for (j, &d) in keep.iter().enumerate() {
        t[(d, j)] = 1.0;
    }
    for grp in &zero_sum {
        let last = *grp.last().unwrap();
        for &d in &grp[..grp.len() - 1] {
            t[(last, red_index[d].unwrap())] = -1.0;
        }
    }

    let a_red = t.transpose() * &a_mat * &t;
    let m_red = t.transpose() * &m_mat * &t;

    // generalized symmetric problem via Cholesky of the mass matrix
    let chol = Cholesky::new(m_red).ok_or(Error::RankTolDegenerate)?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or(Error::RankTolDegenerate)?;
    let b = &linv * a_red * linv.transpose();
    let b = (&b + b.transpose()) * 0.5;
    let eig = SymmetricEigen::new(b);
    let mut lams: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    lams.sort_by(|a, b| a.partial_cmp(b).unwrap());
    lams.truncate(count.max(1));

    // cluster within the expected discretization error
    let mut eigenvalues: Vec<(f64, usize)> = Vec::new();
    for lam in lams {
        let tol = 20.0 * (1.0 + lam.abs()) * h_max * h_max;
        match eigenvalues.last_mut() {
            Some((l0, m)) if (lam - *l0).abs() <= tol => *m += 1,
            _ => eigenvalues.push((lam, 1)),
        }
    }
    let lambda_max = eigenvalues.last().map(|&(l, _)| l).unwrap_or(0.0);
    Ok(Spectrum {
        eigenvalues,
        lambda_max,
        method: SpectrumMethod::FiniteDifference,
        missed_root_suspected: false,
    })
}
