//! Strongly connected components and periods on small adjacency lists.

use num_integer::Integer;

/// Tarjan's algorithm, iterative. Returns the component index of every
/// vertex; components are numbered in reverse topological order (sinks
/// first).
pub fn scc(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (vertex, next edge to explore)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(top) = call.last_mut() {
            let v = top.0;
            if top.1 < adj[v].len() {
                let w = adj[v][top.1];
                top.1 += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Period of the component containing `v`: the gcd of all closed-walk
/// lengths through `v`, or `None` when `v` lies on no cycle.
///
/// Uses BFS levels inside the component: the period is the gcd of
/// `level(a) + 1 - level(b)` over component edges `a → b`.
pub fn period(adj: &[Vec<usize>], comp: &[usize], v: usize) -> Option<u64> {
    let c = comp[v];
    let mut level = vec![usize::MAX; adj.len()];
    level[v] = 0;
    let mut queue = std::collections::VecDeque::from([v]);
    let mut g: u64 = 0;
    let mut has_cycle = false;
    while let Some(a) = queue.pop_front() {
        for &b in &adj[a] {
            if comp[b] != c {
                continue;
            }
            has_cycle = true;
            if level[b] == usize::MAX {
                level[b] = level[a] + 1;
                queue.push_back(b);
            } else {
                let d = (level[a] as i64 + 1 - level[b] as i64).unsigned_abs();
                g = g.gcd(&d);
            }
        }
    }
    if has_cycle {
        Some(g)
    } else {
        None
    }
}
