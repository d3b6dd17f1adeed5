//! Hausdorff distance between finite point clouds.
//!
//! `d_H(A, B) = max( sup_{a∈A} dist(a, B), sup_{b∈B} dist(b, A) )`, the
//! tightest `r` such that each cloud is contained in the `r`-fattening of
//! the other.  Conventions for degenerate inputs: the distance between two
//! empty clouds is 0, and between an empty and a non-empty cloud is `+∞`
//! (no fattening of the empty set ever covers a point).

fn directed(from: &[[f64; 2]], to: &[[f64; 2]]) -> f64 {
    let mut sup = 0.0f64;
    for a in from {
        let mut best = f64::INFINITY;
        for b in to {
            let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
            if d2 < best {
                best = d2;
            }
        }
        sup = sup.max(best.sqrt());
    }
    sup
}

/// Hausdorff distance between two finite planar point clouds.
pub fn hausdorff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        (false, false) => directed(a, b).max(directed(b, a)),
    }
}
