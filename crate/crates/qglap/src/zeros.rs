//! Root-location helpers for scalar functions sampled on a grid:
//! sign-change bracketing with bisection refinement, and local-minimum
//! probing for even-order roots that do not change sign.

/// Bisect a sign-change bracket `[lo, hi]` down to width `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    for _ in 0..max_iter {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimization of `f` on `[lo, hi]` to interval width `tol`.
/// Returns the abscissa and the value there.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// A candidate root found while scanning a sampled function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Candidate {
    /// The function changes sign on `(lo, hi)`.
    SignChange { lo: f64, hi: f64 },
    /// Strict local minimum of `|f|` at `x` with no adjacent sign change;
    /// `local_scale` is the largest `|f|` sample in a small window.
    LocalMin {
        lo: f64,
        hi: f64,
        x: f64,
        fx: f64,
        local_scale: f64,
    },
}

/// Scan samples `(xs[i], fs[i])` for sign-change brackets and suspicious
/// local minima of `|f|` (candidates for even-order roots).
pub fn scan_candidates(xs: &[f64], fs: &[f64]) -> Vec<Candidate> {
    assert_eq!(xs.len(), fs.len());
    let n = xs.len();
    let mut out = Vec::new();
    let mut sign_change_at = vec![false; n];
    for i in 0..n.saturating_sub(1) {
        if fs[i] == 0.0 {
            // exact grid hit: treat as a degenerate bracket
            out.push(Candidate::SignChange {
                lo: xs[i],
                hi: xs[i],
            });
            sign_change_at[i] = true;
            continue;
        }
        if fs[i].signum() != fs[i + 1].signum() && fs[i + 1] != 0.0 {
            out.push(Candidate::SignChange {
                lo: xs[i],
                hi: xs[i + 1],
            });
            sign_change_at[i] = true;
        }
    }
    for i in 1..n.saturating_sub(1) {
        let a = fs[i - 1].abs();
        let b = fs[i].abs();
        let c = fs[i + 1].abs();
        if b < a && b < c && !sign_change_at[i - 1] && !sign_change_at[i] {
            let wlo = i.saturating_sub(5);
            let whi = (i + 6).min(n);
            let local_scale = fs[wlo..whi].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            out.push(Candidate::LocalMin {
                lo: xs[i - 1],
                hi: xs[i + 1],
                x: xs[i],
                fx: fs[i],
                local_scale,
            });
        }
    }
    out
}

/// Merge sorted root abscissas closer than `tol` into clusters, keeping the
/// mean of each cluster.
pub fn merge_close(mut roots: Vec<f64>, tol: f64) -> Vec<f64> {
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::new();
    let mut cluster: Vec<f64> = Vec::new();
    for r in roots {
        if let Some(&last) = cluster.last() {
            if r - last > tol {
                out.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
                cluster.clear();
            }
        }
        cluster.push(r);
    }
    if !cluster.is_empty() {
        out.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
    }
    out
}
