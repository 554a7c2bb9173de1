use crate::error::{Error, Result};
use crate::scenario::Scenario;

use super::{distance_table, Tour};

/// Largest instance [`held_karp`] accepts.
pub const HELD_KARP_MAX_NODES: usize = 16;

/// Greedy tour from the station. With `start_node`, that node is visited
/// first and the greedy rule takes over from there.
pub fn nearest_neighbor(scenario: &Scenario, start_node: Option<usize>) -> Tour {
    let m = scenario.node_count();
    let dist = distance_table(scenario);
    let station = m;
    let mut visited = vec![false; m];
    let mut order = Vec::with_capacity(m);
    let mut current = station;
    if let Some(first) = start_node {
        let first = first % m;
        visited[first] = true;
        order.push(first);
        current = first;
    }
    while order.len() < m {
        let next = (0..m)
            .filter(|&j| !visited[j])
            .min_by(|&a, &b| dist[current][a].total_cmp(&dist[current][b]).then(a.cmp(&b)))
            .expect("unvisited node remains");
        visited[next] = true;
        order.push(next);
        current = next;
    }
    Tour::new(scenario, order)
}

/// Exact closed tour by Held-Karp over node subsets, `O(M^2 2^M)`.
pub fn held_karp(scenario: &Scenario) -> Result<Tour> {
    let m = scenario.node_count();
    if m > HELD_KARP_MAX_NODES {
        return Err(Error::SizeGuard {
            what: "node count",
            got: m,
            limit: HELD_KARP_MAX_NODES,
        });
    }
    let dist = distance_table(scenario);
    let station = m;
    let full = 1usize << m;
    // cost[mask * m + j]: shortest path from the station through `mask`, ending at j.
    let mut cost = vec![f64::INFINITY; full * m];
    let mut parent = vec![usize::MAX; full * m];
    for j in 0..m {
        cost[(1 << j) * m + j] = dist[station][j];
    }
    for mask in 1..full {
        for j in 0..m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let here = cost[mask * m + j];
            if !here.is_finite() {
                continue;
            }
            for k in 0..m {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next = mask | (1 << k);
                let cand = here + dist[j][k];
                if cand < cost[next * m + k] {
                    cost[next * m + k] = cand;
                    parent[next * m + k] = j;
                }
            }
        }
    }
    let all = full - 1;
    let mut last = 0;
    let mut best = f64::INFINITY;
    for j in 0..m {
        let c = cost[all * m + j] + dist[j][station];
        if c < best {
            best = c;
            last = j;
        }
    }
    let mut order = Vec::with_capacity(m);
    let mut mask = all;
    let mut j = last;
    loop {
        order.push(j);
        let p = parent[mask * m + j];
        mask &= !(1 << j);
        if p == usize::MAX {
            break;
        }
        j = p;
    }
    order.reverse();
    Ok(Tour::new(scenario, order))
}
