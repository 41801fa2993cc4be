//! Non-dominated sorting and elite selection, maximizing (I, L).

use crate::oracle::Objectives;
use std::cmp::Ordering;

/// `a` is no worse on both objectives and strictly better on one.
pub fn dominates(a: &Objectives, b: &Objectives) -> bool {
    a.i >= b.i && a.l >= b.l && (a.i > b.i || a.l > b.l)
}

/// Front index per point (0 = non-dominated).
pub fn front_ranks(points: &[Objectives]) -> Vec<usize> {
    let n = points.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dominates(&points[i], &points[j]) {
                dominates_list[i].push(j);
                dominated_by[j] += 1;
            }
        }
    }
    let mut rank = vec![0usize; n];
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    let mut r = 0;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            rank[i] = r;
            for &j in &dominates_list[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        current = next;
        r += 1;
    }
    rank
}

/// Crowding distance of each point within its own front; boundary points
/// get infinity. Points with identical objectives share one distance, so
/// duplicates never outrank each other.
pub fn crowding_distances(points: &[Objectives], ranks: &[usize]) -> Vec<f64> {
    let n = points.len();
    let mut dist = vec![0.0; n];
    let max_rank = ranks.iter().copied().max().unwrap_or(0);
    let key = |o: &Objectives| (o.i.to_bits(), o.l.to_bits());
    let getters: [fn(&Objectives) -> f64; 2] = [|o| o.i, |o| o.l];
    for r in 0..=max_rank {
        let mut uniq: Vec<Objectives> = Vec::new();
        for i in (0..n).filter(|&i| ranks[i] == r) {
            if !uniq.iter().any(|u| key(u) == key(&points[i])) {
                uniq.push(points[i]);
            }
        }
        let mut d = vec![0.0; uniq.len()];
        if uniq.len() <= 2 {
            d.fill(f64::INFINITY);
        } else {
            for get in getters {
                let mut m: Vec<usize> = (0..uniq.len()).collect();
                m.sort_by(|&a, &b| get(&uniq[a]).total_cmp(&get(&uniq[b])).then(a.cmp(&b)));
                let (lo, hi) = (get(&uniq[m[0]]), get(&uniq[m[m.len() - 1]]));
                d[m[0]] = f64::INFINITY;
                d[m[m.len() - 1]] = f64::INFINITY;
                let span = hi - lo;
                if span <= 0.0 {
                    continue;
                }
                for w in 1..m.len() - 1 {
                    d[m[w]] += (get(&uniq[m[w + 1]]) - get(&uniq[m[w - 1]])) / span;
                }
            }
        }
        for i in (0..n).filter(|&i| ranks[i] == r) {
            let u = uniq.iter().position(|u| key(u) == key(&points[i])).expect("collected above");
            dist[i] = d[u];
        }
    }
    dist
}

/// Indices of the `k` best points: lower front first, then larger crowding
/// distance, then lower id. The order is total, so repeats agree.
pub fn pareto_select(points: &[Objectives], ids: &[u64], k: usize) -> Vec<usize> {
    let ranks = front_ranks(points);
    let crowd = crowding_distances(points, &ranks);
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        ranks[a]
            .cmp(&ranks[b])
            .then_with(|| crowd[b].partial_cmp(&crowd[a]).unwrap_or(Ordering::Equal))
            .then_with(|| ids[a].cmp(&ids[b]))
    });
    order.truncate(k);
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(i: f64, l: f64) -> Objectives {
        Objectives { i, l }
    }

    #[test]
    fn dominance_basics() {
        assert_eq!(front_ranks(&[o(1.0, 1.0), o(2.0, 2.0)]), vec![1, 0]);
        assert_eq!(front_ranks(&[o(1.0, 3.0), o(3.0, 1.0), o(2.0, 2.0)]), vec![0, 0, 0]);
        assert!(!dominates(&o(1.0, 1.0), &o(1.0, 1.0)));
    }

    #[test]
    fn selection_prefers_front_then_spread_then_id() {
        let pts = [o(1.0, 3.0), o(3.0, 1.0), o(2.0, 2.0), o(0.0, 0.0), o(2.0, 2.0)];
        let sel = pareto_select(&pts, &[10, 11, 12, 13, 14], 3);
        // Boundary points first, then the lower id of the duplicated middle.
        assert_eq!(sel, vec![0, 1, 2]);
        let sel = pareto_select(&pts, &[10, 11, 14, 13, 12], 3);
        assert_eq!(sel, vec![0, 1, 4]);
    }
}
