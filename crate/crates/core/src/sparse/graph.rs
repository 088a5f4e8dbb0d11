use std::collections::VecDeque;

/// Undirected graph without self-loops; neighbor lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyGraph {
    adj: Vec<Vec<usize>>,
}

impl AdjacencyGraph {
    /// Builds the symmetric closure of the given pairs, ignoring the
    /// diagonal and duplicates.
    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (i, j) in entries {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        AdjacencyGraph { adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.len()).all(|u| self.adj[u].iter().all(|&v| v != u && self.has_edge(v, u)))
    }

    /// Subgraph induced by `vertices`, relabelled `0..vertices.len()` in the
    /// given order.
    pub fn induced(&self, vertices: &[usize]) -> AdjacencyGraph {
        let mut local = vec![usize::MAX; self.len()];
        for (k, &v) in vertices.iter().enumerate() {
            local[v] = k;
        }
        let adj = vertices
            .iter()
            .map(|&v| {
                let mut a: Vec<usize> = self.adj[v]
                    .iter()
                    .filter_map(|&w| (local[w] != usize::MAX).then_some(local[w]))
                    .collect();
                a.sort_unstable();
                a
            })
            .collect();
        AdjacencyGraph { adj }
    }

    /// Connected components, each sorted ascending, ordered by their
    /// smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut comps = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_and_induced() {
        let g = AdjacencyGraph::from_entries(6, [(0, 3), (3, 5), (1, 2), (2, 2)]);
        assert!(g.is_symmetric());
        assert_eq!(g.components(), vec![vec![0, 3, 5], vec![1, 2], vec![4]]);
        let sub = g.induced(&[5, 3, 0]);
        assert_eq!(sub.neighbors(0), &[1]);
        assert_eq!(sub.neighbors(1), &[0, 2]);
        assert_eq!(g.num_edges(), 3);
    }
}
