//! Strongly connected components and the block upper triangular ordering
//! they induce on a nonnegative matrix.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{contract, Result};
use crate::matrix::{Mat, MatTuple};

/// Boolean support of a matrix: `true` where the entry is nonzero.
pub fn support(m: &Mat) -> Vec<Vec<bool>> {
    m.rows().map(|r| r.iter().map(|&x| x != 0.0).collect()).collect()
}

/// Strongly connected components of a digraph, linearized so that every
/// edge goes from an earlier component to a later one (or stays inside a
/// component). Conjugating the adjacency matrix by [`Condensation::order`]
/// therefore gives a block upper triangular matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condensation {
    /// Component index (in linear order) of each vertex.
    pub component_of: Vec<usize>,
    /// Vertices of each component, ascending.
    pub components: Vec<Vec<usize>>,
    /// Singleton components without a self-loop.
    pub trivial_zero: Vec<bool>,
}

impl Condensation {
    /// Vertex ordering: components in linear order, vertices ascending inside.
    pub fn order(&self) -> Vec<usize> {
        self.components.iter().flatten().copied().collect()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Tarjan's algorithm (iterative) followed by a deterministic topological
/// linearization of the component DAG. Ties are broken by the smallest vertex
/// index contained in each component.
pub fn condense(adj: &[Vec<bool>]) -> Condensation {
    let n = adj.len();
    let succ: Vec<Vec<usize>> = adj
        .iter()
        .map(|row| row.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j).collect())
        .collect();

    // Tarjan
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comp_raw = vec![usize::MAX; n];
    let mut n_comps = 0usize;
    let mut counter = 0usize;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // frames: (vertex, next successor position)
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if *pos < succ[v].len() {
                let w = succ[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp_raw[w] = n_comps;
                        if w == v {
                            break;
                        }
                    }
                    n_comps += 1;
                }
            }
        }
    }

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_comps];
    for v in 0..n {
        members[comp_raw[v]].push(v);
    }
    // Component DAG and in-degrees.
    let mut dag: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_comps];
    for v in 0..n {
        for &w in &succ[v] {
            let (a, b) = (comp_raw[v], comp_raw[w]);
            if a != b {
                dag[a].insert(b);
            }
        }
    }
    let mut indeg = vec![0usize; n_comps];
    for edges in &dag {
        for &b in edges {
            indeg[b] += 1;
        }
    }
    let mut ready: BTreeSet<(usize, usize)> = (0..n_comps)
        .filter(|&c| indeg[c] == 0)
        .map(|c| (members[c][0], c))
        .collect();
    let mut linear = Vec::with_capacity(n_comps);
    while let Some(&(key, c)) = ready.iter().next() {
        ready.remove(&(key, c));
        linear.push(c);
        for &b in &dag[c] {
            indeg[b] -= 1;
            if indeg[b] == 0 {
                ready.insert((members[b][0], b));
            }
        }
    }

    let mut component_of = vec![0usize; n];
    let mut components = Vec::with_capacity(n_comps);
    let mut trivial_zero = Vec::with_capacity(n_comps);
    for (pos, &c) in linear.iter().enumerate() {
        for &v in &members[c] {
            component_of[v] = pos;
        }
        let single = members[c].len() == 1;
        trivial_zero.push(single && !adj[members[c][0]][members[c][0]]);
        components.push(members[c].clone());
    }
    Condensation {
        component_of,
        components,
        trivial_zero,
    }
}

/// `true` iff the digraph is strongly connected and (for a single vertex)
/// carries a self-loop, i.e. some partial power sum of the adjacency matrix
/// is strictly positive.
pub fn is_irreducible_support(adj: &[Vec<bool>]) -> bool {
    let c = condense(adj);
    c.len() == 1 && !c.trivial_zero[0]
}

/// Positive irreducibility of a nonnegative tuple: the support digraph of
/// `Σ M_i` must be strongly connected.
pub fn is_positively_irreducible(m: &MatTuple) -> Result<bool> {
    if !m.is_nonnegative() {
        return Err(contract("positive irreducibility is defined for nonnegative tuples"));
    }
    Ok(is_irreducible_support(&support(&m.sum())))
}

/// Checks that conjugation by `order` leaves nothing below the block
/// diagonal with the given block sizes (exact test on the support).
pub fn is_block_upper_triangular(adj: &[Vec<bool>], order: &[usize], block_sizes: &[usize]) -> bool {
    let mut block_of_pos = Vec::with_capacity(order.len());
    for (b, &s) in block_sizes.iter().enumerate() {
        block_of_pos.extend(core::iter::repeat_n(b, s));
    }
    for (s, &i) in order.iter().enumerate() {
        for (t, &j) in order.iter().enumerate() {
            if adj[i][j] && block_of_pos[s] > block_of_pos[t] {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adj(rows: &[&[u8]]) -> Vec<Vec<bool>> {
        rows.iter().map(|r| r.iter().map(|&x| x != 0).collect()).collect()
    }

    #[test]
    fn self_loop_single_component() {
        let c = condense(&adj(&[&[1]]));
        assert_eq!(c.len(), 1);
        assert!(!c.trivial_zero[0]);
    }

    #[test]
    fn one_edge_two_trivial_components() {
        let a = adj(&[&[0, 1], &[0, 0]]);
        let c = condense(&a);
        assert_eq!(c.components, vec![vec![0], vec![1]]);
        assert_eq!(c.trivial_zero, vec![true, true]);
        assert!(is_block_upper_triangular(&a, &c.order(), &c.block_sizes()));
    }

    #[test]
    fn reversed_edge_reorders_blocks() {
        let a = adj(&[&[0, 0], &[1, 0]]);
        let c = condense(&a);
        assert_eq!(c.order(), vec![1, 0]);
        assert!(is_block_upper_triangular(&a, &c.order(), &c.block_sizes()));
        assert!(!is_block_upper_triangular(&a, &[0, 1], &[1, 1]));
    }

    #[test]
    fn two_cycle_is_one_component() {
        let c = condense(&adj(&[&[0, 1], &[1, 0]]));
        assert_eq!(c.len(), 1);
        assert!(!c.trivial_zero[0]);
    }

    #[test]
    fn positive_irreducibility_examples() {
        assert!(is_positively_irreducible(&MatTuple::elementary_2x2()).unwrap());
        let upper = MatTuple::from_rows(&[vec![vec![1.0, 1.0], vec![0.0, 1.0]]]).unwrap();
        assert!(!is_positively_irreducible(&upper).unwrap());
        let swap = MatTuple::from_rows(&[vec![vec![0.0, 1.0], vec![1.0, 0.0]]]).unwrap();
        assert!(is_positively_irreducible(&swap).unwrap());
        let neg = MatTuple::from_rows(&[vec![vec![0.0, -1.0], vec![1.0, 0.0]]]).unwrap();
        assert!(is_positively_irreducible(&neg).is_err());
    }
}
