//! Fill-reducing ordering for sparse Cholesky.
//!
//! Minimum-degree on a quotient graph with element absorption: eliminated
//! variables become elements, elements reached through the pivot are absorbed
//! into the new one, and variable-variable edges covered by an element are
//! pruned. Degrees are recomputed exactly from the quotient structure; FEM
//! graphs keep them small enough that the approximation machinery of full
//! AMD buys nothing here.

use std::collections::BTreeSet;

/// Returns the elimination order: `order[k]` is the variable eliminated at
/// step `k`. `adjacency` lists neighbours without self loops; deterministic
/// for identical input (ties break on the smaller variable index).
pub fn min_degree_order(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = adjacency.len();
    let mut var_adj: Vec<Vec<usize>> = adjacency.to_vec();
    let mut var_elems: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut elem_vars: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut is_element = vec![false; n];
    let mut eliminated = vec![false; n];
    let mut degree: Vec<usize> = var_adj.iter().map(|a| a.len()).collect();

    // (degree, variable) set doubles as a deterministic priority queue.
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (degree[v], v)).collect();

    let mut marker = vec![0u64; n];
    let mut stamp = 0u64;
    let mut order = Vec::with_capacity(n);

    while let Some(&(d, pivot)) = queue.iter().next() {
        queue.remove(&(d, pivot));
        eliminated[pivot] = true;
        order.push(pivot);

        // Variables reachable from the pivot: direct edges plus the members
        // of every adjacent element.
        stamp += 1;
        marker[pivot] = stamp;
        let mut reach: Vec<usize> = Vec::new();
        for &v in &var_adj[pivot] {
            if !eliminated[v] && marker[v] != stamp {
                marker[v] = stamp;
                reach.push(v);
            }
        }
        for &e in &var_elems[pivot] {
            for &v in &elem_vars[e] {
                if !eliminated[v] && marker[v] != stamp {
                    marker[v] = stamp;
                    reach.push(v);
                }
            }
        }
        reach.sort_unstable();

        // Absorb the pivot's elements into the new one.
        for &e in &var_elems[pivot] {
            is_element[e] = false;
            elem_vars[e] = Vec::new();
        }
        var_adj[pivot] = Vec::new();
        var_elems[pivot] = Vec::new();
        is_element[pivot] = true;
        elem_vars[pivot] = reach.clone();

        for &v in &reach {
            // Edges inside the new element are redundant, as is the pivot.
            var_adj[v].retain(|&u| !eliminated[u] && marker[u] != stamp);
            var_elems[v].retain(|&e| is_element[e]);
            var_elems[v].push(pivot);

            stamp += 1;
            marker[v] = stamp;
            let mut deg = 0usize;
            for &u in &var_adj[v] {
                if marker[u] != stamp {
                    marker[u] = stamp;
                    deg += 1;
                }
            }
            for &e in &var_elems[v] {
                for &u in &elem_vars[e] {
                    if !eliminated[u] && marker[u] != stamp {
                        marker[u] = stamp;
                        deg += 1;
                    }
                }
            }
            queue.remove(&(degree[v], v));
            degree[v] = deg;
            queue.insert((deg, v));
        }
    }
    order
}
