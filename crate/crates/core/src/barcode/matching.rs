//! Integer bottleneck distance by binary search over matching feasibility.

use super::{Barcode, Interval};
use crate::ext::ExtNat;

fn match_cost(a: &Interval, b: &Interval) -> ExtNat {
    let births = a.birth.abs_diff(b.birth);
    let deaths = match (a.death, b.death) {
        (ExtNat::Fin(x), ExtNat::Fin(y)) => ExtNat::Fin(x.abs_diff(y)),
        (ExtNat::Inf, ExtNat::Inf) => ExtNat::ZERO,
        _ => ExtNat::Inf,
    };
    ExtNat::Fin(births).max(deaths)
}

/// Perfect matching between `A ∪ Δ(B)` and `B ∪ Δ(A)` using only edges of
/// cost at most `eps`.
fn feasible(a: &[Interval], b: &[Interval], eps: usize) -> bool {
    let (n, m) = (a.len(), b.len());
    let within = |c: ExtNat| c <= ExtNat::Fin(eps);
    // Left vertices: a_0..a_{n-1}, then diagonal copies of b. Right vertices:
    // b_0..b_{m-1}, then diagonal copies of a.
    let adjacency: Vec<Vec<usize>> = (0..n + m)
        .map(|l| {
            if l < n {
                let mut out: Vec<usize> = (0..m).filter(|&r| within(match_cost(&a[l], &b[r]))).collect();
                if within(a[l].deletion_cost()) {
                    out.push(m + l);
                }
                out
            } else {
                let k = l - n;
                let mut out = Vec::new();
                if within(b[k].deletion_cost()) {
                    out.push(k);
                }
                out.extend(m..m + n);
                out
            }
        })
        .collect();

    let mut owner: Vec<Option<usize>> = vec![None; n + m];
    fn augment(l: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &r in &adj[l] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if owner[r].is_none_or(|o| augment(o, adj, owner, seen)) {
                owner[r] = Some(l);
                return true;
            }
        }
        false
    }
    (0..n + m).all(|l| {
        let mut seen = vec![false; n + m];
        augment(l, &adjacency, &mut owner, &mut seen)
    })
}

/// Least `ε` with a matching of cost at most `ε`, or `∞` when the infinite
/// bars cannot be paired.
pub fn bottleneck_distance(a: &Barcode, b: &Barcode) -> ExtNat {
    let t = a.stabilization().max(b.stabilization());
    let longest = a
        .intervals()
        .iter()
        .chain(b.intervals())
        .filter_map(|iv| iv.death.finite().map(|d| d - iv.birth))
        .max()
        .unwrap_or(0);
    let (xs, ys) = (a.intervals(), b.intervals());
    let mut hi = t + longest;
    if !feasible(xs, ys, hi) {
        return ExtNat::Inf;
    }
    let mut lo = 0;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(xs, ys, mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    ExtNat::Fin(lo)
}
