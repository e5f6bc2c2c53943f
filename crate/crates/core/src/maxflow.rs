//! Shortest-augmenting-path maximum flow over any exact ordered capacity type.

use std::collections::VecDeque;
use std::ops::{Add, Sub};

use num_traits::Zero;

struct Arc<C> {
    to: usize,
    rev: usize,
    residual: C,
}

/// Computes a maximum flow on arcs `(from, to, capacity)`.
///
/// Returns the flow value and the flow on each input arc. Augmenting paths are
/// found by BFS over arcs in insertion order, so the result is deterministic.
pub(crate) fn max_flow<C>(
    n: usize,
    source: usize,
    sink: usize,
    arcs: &[(usize, usize, C)],
) -> (C, Vec<C>)
where
    C: Copy + Ord + Zero + Add<Output = C> + Sub<Output = C>,
{
    let mut adj: Vec<Vec<Arc<C>>> = (0..n).map(|_| Vec::new()).collect();
    let mut handle = Vec::with_capacity(arcs.len());
    for &(u, v, cap) in arcs {
        let fwd = adj[u].len();
        let back = adj[v].len();
        adj[u].push(Arc {
            to: v,
            rev: back,
            residual: cap,
        });
        adj[v].push(Arc {
            to: u,
            rev: fwd,
            residual: C::zero(),
        });
        handle.push((u, fwd));
    }

    let mut total = C::zero();
    loop {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut queue = VecDeque::from([source]);
        let mut found = false;
        'bfs: while let Some(v) = queue.pop_front() {
            for (i, arc) in adj[v].iter().enumerate() {
                if arc.residual > C::zero() && arc.to != source && parent[arc.to].is_none() {
                    parent[arc.to] = Some((v, i));
                    if arc.to == sink {
                        found = true;
                        break 'bfs;
                    }
                    queue.push_back(arc.to);
                }
            }
        }
        if !found {
            break;
        }
        let mut bottleneck = None;
        let mut v = sink;
        while let Some((u, i)) = parent[v] {
            let r = adj[u][i].residual;
            bottleneck = Some(match bottleneck {
                Some(b) if b < r => b,
                _ => r,
            });
            v = u;
        }
        let delta = bottleneck.expect("augmenting path has an arc");
        let mut v = sink;
        while let Some((u, i)) = parent[v] {
            adj[u][i].residual = adj[u][i].residual - delta;
            let (to, rev) = (adj[u][i].to, adj[u][i].rev);
            adj[to][rev].residual = adj[to][rev].residual + delta;
            v = u;
        }
        total = total + delta;
    }

    let flows = arcs
        .iter()
        .zip(&handle)
        .map(|(&(_, _, cap), &(u, i))| cap - adj[u][i].residual)
        .collect();
    (total, flows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_network() {
        // CLRS figure 26.1, value 23.
        let arcs = [
            (0, 1, 16u64),
            (0, 2, 13),
            (2, 1, 4),
            (1, 3, 12),
            (3, 2, 9),
            (2, 4, 14),
            (4, 3, 7),
            (3, 5, 20),
            (4, 5, 4),
        ];
        let (value, flows) = max_flow(6, 0, 5, &arcs);
        assert_eq!(value, 23);
        for (&(_, _, c), &f) in arcs.iter().zip(&flows) {
            assert!(f <= c);
        }
    }

    #[test]
    fn antiparallel_arcs() {
        let arcs = [(0, 1, 3i64), (1, 2, 2), (2, 1, 5), (1, 3, 1), (2, 3, 4)];
        let (value, _) = max_flow(4, 0, 3, &arcs);
        assert_eq!(value, 3);
    }
}
