use crate::scenario::Scenario;

use super::{distance_table, Tour};

/// Shortest Hamiltonian path `start -> (all of interior) -> end` by bitmask
/// DP. Indices address `dist`. Returns the reordered interior and the path
/// length.
pub fn shortest_fixed_path(dist: &[Vec<f64>], start: usize, interior: &[usize], end: usize) -> (Vec<usize>, f64) {
    let n = interior.len();
    if n == 0 {
        return (Vec::new(), dist[start][end]);
    }
    let full = 1usize << n;
    let mut cost = vec![f64::INFINITY; full * n];
    let mut parent = vec![usize::MAX; full * n];
    for j in 0..n {
        cost[(1 << j) * n + j] = dist[start][interior[j]];
    }
    for mask in 1..full {
        for j in 0..n {
            let here = cost[mask * n + j];
            if mask & (1 << j) == 0 || !here.is_finite() {
                continue;
            }
            for k in 0..n {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next = mask | (1 << k);
                let cand = here + dist[interior[j]][interior[k]];
                if cand < cost[next * n + k] {
                    cost[next * n + k] = cand;
                    parent[next * n + k] = j;
                }
            }
        }
    }
    let all = full - 1;
    let (mut last, mut best) = (0, f64::INFINITY);
    for j in 0..n {
        let c = cost[all * n + j] + dist[interior[j]][end];
        if c < best {
            best = c;
            last = j;
        }
    }
    let mut path = Vec::with_capacity(n);
    let mut mask = all;
    let mut j = last;
    loop {
        path.push(interior[j]);
        let p = parent[mask * n + j];
        mask &= !(1 << j);
        if p == usize::MAX {
            break;
        }
        j = p;
    }
    path.reverse();
    (path, best)
}

/// Window-wise exact refinement.
///
/// The loop is written as `station, order..., station` (positions `0..=M+1`)
/// and cut into windows `[i*a, (i+1)*a]` for `i < floor(M/a)`, plus a last
/// window from `floor(M/a)*a` to the closing station. Consecutive windows
/// share an endpoint. Each window keeps its endpoints and has its interior
/// reordered optimally. The result replaces `tour` only if strictly shorter.
pub fn dp_refine(scenario: &Scenario, tour: &Tour, subpath_length: usize) -> Tour {
    assert!(subpath_length >= 2, "subpath_length must be at least 2");
    let m = tour.order.len();
    let a = subpath_length;
    let dist = distance_table(scenario);
    let station = scenario.node_count();
    let mut seq: Vec<usize> = std::iter::once(station)
        .chain(tour.order.iter().copied())
        .chain(std::iter::once(station))
        .collect();

    let b = m / a;
    let mut windows: Vec<(usize, usize)> = (0..b).map(|i| (i * a, (i + 1) * a)).collect();
    windows.push((b * a, m + 1));
    for (lo, hi) in windows {
        if hi - lo < 2 {
            continue;
        }
        let (path, _) = shortest_fixed_path(&dist, seq[lo], &seq[lo + 1..hi], seq[hi]);
        seq[lo + 1..hi].copy_from_slice(&path);
    }

    let refined = Tour::new(scenario, seq[1..=m].to_vec());
    if refined.total_distance_m < tour.total_distance_m {
        refined
    } else {
        tour.clone()
    }
}
