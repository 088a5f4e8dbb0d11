//! Fill-reducing symmetric orderings: approximate minimum degree, nested
//! dissection and reverse Cuthill-McKee.
//!
//! Every ordering returns a [`Permutation`] whose `order()[k]` is the
//! vertex eliminated at step `k`. Ties are always broken by the lowest
//! vertex index, so results are deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sparse::{AdjacencyGraph, Pattern, Permutation};

/// Default component size at which nested dissection stops splitting.
pub const DEFAULT_LEAF: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderingMethod {
    Natural,
    Amd,
    NestedDissection { leaf: usize },
    Rcm,
}

impl OrderingMethod {
    /// The orderings compared in the experiments, natural first.
    pub const STANDARD: [OrderingMethod; 4] = [
        OrderingMethod::Natural,
        OrderingMethod::Amd,
        OrderingMethod::NestedDissection { leaf: DEFAULT_LEAF },
        OrderingMethod::Rcm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OrderingMethod::Natural => "natural",
            OrderingMethod::Amd => "amd",
            OrderingMethod::NestedDissection { .. } => "nd",
            OrderingMethod::Rcm => "rcm",
        }
    }

    pub fn compute(&self, g: &AdjacencyGraph) -> Result<Permutation> {
        match *self {
            OrderingMethod::Natural => Ok(Permutation::identity(g.len())),
            OrderingMethod::Amd => Ok(amd(g)),
            OrderingMethod::NestedDissection { leaf } => nested_dissection(g, leaf),
            OrderingMethod::Rcm => Ok(rcm(g)),
        }
    }
}

impl fmt::Display for OrderingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrderingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "natural" | "none" => Ok(OrderingMethod::Natural),
            "amd" => Ok(OrderingMethod::Amd),
            "nd" => Ok(OrderingMethod::NestedDissection { leaf: DEFAULT_LEAF }),
            "rcm" => Ok(OrderingMethod::Rcm),
            other => Err(Error::invalid(format!("unknown ordering method '{other}'"))),
        }
    }
}

/// Breadth-first levels from a root; `levels[d]` holds the vertices at
/// distance `d`, each level in visiting order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStructure {
    pub root: usize,
    pub levels: Vec<Vec<usize>>,
}

impl LevelStructure {
    pub fn rooted(g: &AdjacencyGraph, root: usize) -> Self {
        let mut seen = vec![false; g.len()];
        seen[root] = true;
        let mut levels = vec![vec![root]];
        loop {
            let mut next = Vec::new();
            for &v in levels.last().unwrap() {
                for &w in g.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            levels.push(next);
        }
        LevelStructure { root, levels }
    }

    pub fn eccentricity(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn width(&self) -> usize {
        self.levels.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn num_vertices(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }
}

fn min_degree_vertex(g: &AdjacencyGraph, vertices: &[usize]) -> usize {
    *vertices
        .iter()
        .min_by_key(|&&v| (g.degree(v), v))
        .expect("non-empty vertex set")
}

/// Pseudo-peripheral vertex of the component containing `component`,
/// found by re-rooting at a minimum-degree vertex of the last level until
/// the eccentricity stops growing.
pub fn pseudo_peripheral(g: &AdjacencyGraph, component: &[usize]) -> LevelStructure {
    let mut ls = LevelStructure::rooted(g, min_degree_vertex(g, component));
    loop {
        let candidate = min_degree_vertex(g, ls.levels.last().unwrap());
        let next = LevelStructure::rooted(g, candidate);
        if next.eccentricity() > ls.eccentricity() {
            ls = next;
        } else {
            return ls;
        }
    }
}

/// Reverse Cuthill-McKee.
pub fn rcm(g: &AdjacencyGraph) -> Permutation {
    let n = g.len();
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    for comp in g.components() {
        let root = pseudo_peripheral(g, &comp).root;
        visited[root] = true;
        let mut head = order.len();
        order.push(root);
        while head < order.len() {
            let v = order[head];
            head += 1;
            let mut next: Vec<usize> = g.neighbors(v).iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_unstable_by_key(|&w| (g.degree(w), w));
            for w in next {
                visited[w] = true;
                order.push(w);
            }
        }
    }
    order.reverse();
    Permutation::from_order(order).expect("BFS visits every vertex once")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexStatus {
    Variable,
    Element,
    Absorbed,
}

/// Quotient graph for approximate minimum degree elimination.
///
/// A live variable `i` keeps its remaining variable neighbors `A_i` and
/// adjacent elements `E_i`; an element `e` keeps its variable set `L_e`.
/// Indistinguishable variables are merged into supervariables whose
/// principal carries the weight `nv`.
#[derive(Debug, Clone)]
pub struct EliminationState {
    n: usize,
    status: Vec<VertexStatus>,
    vars: Vec<Vec<usize>>,
    elems: Vec<Vec<usize>>,
    lset: Vec<Vec<usize>>,
    nv: Vec<usize>,
    members: Vec<Vec<usize>>,
    degree: Vec<usize>,
    queue: BTreeSet<(usize, usize)>,
    eliminated: usize,
    order: Vec<usize>,
    mark: Vec<usize>,
    wmark: Vec<usize>,
    w: Vec<usize>,
    stamp: usize,
}

impl EliminationState {
    pub fn new(g: &AdjacencyGraph) -> Self {
        let n = g.len();
        let degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
        EliminationState {
            n,
            status: vec![VertexStatus::Variable; n],
            vars: (0..n).map(|v| g.neighbors(v).to_vec()).collect(),
            elems: vec![Vec::new(); n],
            lset: vec![Vec::new(); n],
            nv: vec![1; n],
            members: (0..n).map(|v| vec![v]).collect(),
            queue: (0..n).map(|v| (degree[v] + 1, v)).collect(),
            degree,
            eliminated: 0,
            order: Vec::with_capacity(n),
            mark: vec![0; n],
            wmark: vec![0; n],
            w: vec![0; n],
            stamp: 0,
        }
    }

    // Ranked by external degree plus the supervariable's own weight, so a
    // merged supervariable does not win a tie against a singleton whose
    // elimination is cheaper.
    fn queue_key(&self, i: usize) -> (usize, usize) {
        (self.degree[i] + self.nv[i], i)
    }

    pub fn is_done(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn status(&self, v: usize) -> VertexStatus {
        self.status[v]
    }

    /// Principal variables still awaiting elimination.
    pub fn live_variables(&self) -> Vec<usize> {
        self.queue.iter().map(|&(_, v)| v).collect()
    }

    /// Stored approximate external degree of a principal variable.
    pub fn approximate_degree(&self, i: usize) -> Option<usize> {
        (self.status[i] == VertexStatus::Variable).then_some(self.degree[i])
    }

    /// Exact external degree (weighted count of distinct variables reachable
    /// through `A_i` and `E_i`, excluding `i`'s own members).
    pub fn external_degree(&self, i: usize) -> Option<usize> {
        if self.status[i] != VertexStatus::Variable {
            return None;
        }
        let mut reach: BTreeSet<usize> = self.vars[i].iter().copied().collect();
        for &e in &self.elems[i] {
            if self.status[e] == VertexStatus::Element {
                reach.extend(self.lset[e].iter().copied());
            }
        }
        Some(
            reach
                .into_iter()
                .filter(|&v| v != i && self.status[v] == VertexStatus::Variable)
                .map(|v| self.nv[v])
                .sum(),
        )
    }

    /// Size of a supervariable (0 once merged into another).
    pub fn weight(&self, i: usize) -> usize {
        self.nv[i]
    }

    fn is_var(&self, v: usize) -> bool {
        self.status[v] == VertexStatus::Variable
    }

    /// Eliminates the minimum-degree variable and returns it.
    pub fn eliminate_next(&mut self) -> Option<usize> {
        let &(d, p) = self.queue.iter().next()?;
        self.queue.remove(&(d, p));
        self.stamp += 1;
        let stamp = self.stamp;

        // L_p: variables adjacent to p directly or through its elements
        self.mark[p] = stamp;
        let mut lp = Vec::new();
        for k in 0..self.vars[p].len() {
            let v = self.vars[p][k];
            if self.is_var(v) && self.mark[v] != stamp {
                self.mark[v] = stamp;
                lp.push(v);
            }
        }
        for e in std::mem::take(&mut self.elems[p]) {
            if self.status[e] != VertexStatus::Element {
                continue;
            }
            for k in 0..self.lset[e].len() {
                let v = self.lset[e][k];
                if self.is_var(v) && self.mark[v] != stamp {
                    self.mark[v] = stamp;
                    lp.push(v);
                }
            }
            self.status[e] = VertexStatus::Absorbed;
            self.lset[e] = Vec::new();
        }
        lp.sort_unstable();
        self.status[p] = VertexStatus::Element;
        self.vars[p] = Vec::new();
        self.order.extend_from_slice(&self.members[p]);
        self.eliminated += self.nv[p];

        for &i in &lp {
            self.queue.remove(&self.queue_key(i));
        }

        // prune A_i (now covered by p) and refresh E_i
        for &i in &lp {
            let (status, mark) = (&self.status, &self.mark);
            self.vars[i].retain(|&v| status[v] == VertexStatus::Variable && mark[v] != stamp);
            self.elems[i].retain(|&e| status[e] == VertexStatus::Element);
            self.elems[i].push(p);
        }

        // w(e) = |L_e \ L_p| for the elements touching L_p
        for &i in &lp {
            for k in 0..self.elems[i].len() {
                let e = self.elems[i][k];
                if e == p {
                    continue;
                }
                if self.wmark[e] != stamp {
                    self.wmark[e] = stamp;
                    let status = &self.status;
                    self.lset[e].retain(|&v| status[v] == VertexStatus::Variable);
                    self.w[e] = self.lset[e].iter().map(|&v| self.nv[v]).sum();
                }
                self.w[e] -= self.nv[i];
            }
        }

        // aggressive absorption of elements contained in L_p
        for &i in &lp {
            for k in 0..self.elems[i].len() {
                let e = self.elems[i][k];
                if e != p && self.status[e] == VertexStatus::Element && self.w[e] == 0 {
                    self.status[e] = VertexStatus::Absorbed;
                    self.lset[e] = Vec::new();
                }
            }
        }
        for &i in &lp {
            let status = &self.status;
            self.elems[i].retain(|&e| status[e] == VertexStatus::Element);
            self.elems[i].sort_unstable();
        }

        self.detect_supervariables(&lp);

        let live: Vec<usize> = lp.into_iter().filter(|&i| self.is_var(i)).collect();
        let lp_weight: usize = live.iter().map(|&i| self.nv[i]).sum();
        let remaining = self.n - self.eliminated;
        for &i in &live {
            let a: usize = self.vars[i].iter().filter(|&&v| self.is_var(v)).map(|&v| self.nv[v]).sum();
            let s: usize = self.elems[i].iter().filter(|&&e| e != p).map(|&e| self.w[e]).sum();
            let ext = lp_weight - self.nv[i];
            let d = (remaining - self.nv[i]).min(self.degree[i] + ext).min(a + ext + s);
            self.degree[i] = d;
            self.queue.insert(self.queue_key(i));
        }
        self.lset[p] = live;
        Some(p)
    }

    fn detect_supervariables(&mut self, lp: &[usize]) {
        let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &i in lp {
            let h = self.vars[i]
                .iter()
                .chain(&self.elems[i])
                .fold(0usize, |acc, &v| acc.wrapping_add(v));
            buckets.entry(h).or_default().push(i);
        }
        for bucket in buckets.values().filter(|b| b.len() > 1) {
            for a in 0..bucket.len() {
                let i = bucket[a];
                if !self.is_var(i) {
                    continue;
                }
                for &j in &bucket[a + 1..] {
                    if self.is_var(j) && self.vars[i] == self.vars[j] && self.elems[i] == self.elems[j] {
                        self.nv[i] += self.nv[j];
                        self.nv[j] = 0;
                        let moved = std::mem::take(&mut self.members[j]);
                        self.members[i].extend(moved);
                        self.status[j] = VertexStatus::Absorbed;
                        self.vars[j] = Vec::new();
                        self.elems[j] = Vec::new();
                    }
                }
            }
        }
    }

    /// Runs the elimination to completion.
    pub fn finish(mut self) -> Permutation {
        while self.eliminate_next().is_some() {}
        Permutation::from_order(self.order).expect("every vertex is eliminated once")
    }
}

/// Approximate minimum degree ordering.
pub fn amd(g: &AdjacencyGraph) -> Permutation {
    EliminationState::new(g).finish()
}

/// Nested dissection with level-structure vertex separators; components of
/// at most `leaf` vertices are ordered by [`amd`].
pub fn nested_dissection(g: &AdjacencyGraph, leaf: usize) -> Result<Permutation> {
    if leaf == 0 {
        return Err(Error::invalid("nested dissection leaf threshold must be at least 1"));
    }
    let mut order = Vec::with_capacity(g.len());
    let all: Vec<usize> = (0..g.len()).collect();
    dissect(g, &all, leaf, &mut order);
    Permutation::from_order(order)
}

fn amd_subset(g: &AdjacencyGraph, vertices: &[usize], out: &mut Vec<usize>) {
    let local = amd(&g.induced(vertices));
    out.extend(local.order().iter().map(|&l| vertices[l]));
}

/// Orders `vertices` (sorted ascending) and appends them to `out`.
fn dissect(g: &AdjacencyGraph, vertices: &[usize], leaf: usize, out: &mut Vec<usize>) {
    let sub = g.induced(vertices);
    for comp in sub.components() {
        let global: Vec<usize> = comp.iter().map(|&l| vertices[l]).collect();
        if comp.len() <= leaf {
            amd_subset(g, &global, out);
            continue;
        }
        match separate(&sub.induced(&comp)) {
            Some((part1, part2, sep)) => {
                let lift = |s: Vec<usize>| -> Vec<usize> { s.into_iter().map(|l| global[l]).collect() };
                dissect(g, &lift(part1), leaf, out);
                dissect(g, &lift(part2), leaf, out);
                out.extend(lift(sep));
            }
            None => amd_subset(g, &global, out),
        }
    }
}

/// Splits a connected graph at its median BFS level. Returns the two parts
/// and the separator, each sorted, or `None` when a part would be empty.
fn separate(g: &AdjacencyGraph) -> Option<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    let n = g.len();
    let all: Vec<usize> = (0..n).collect();
    let ls = pseudo_peripheral(g, &all);
    let levels = &ls.levels;
    if levels.len() < 2 {
        return None;
    }
    let mut cum = 0;
    let mut m = levels.len() - 1;
    for (d, level) in levels.iter().enumerate() {
        cum += level.len();
        if 2 * cum >= n {
            m = d;
            break;
        }
    }
    let m = m.min(levels.len() - 2);

    let mut depth = vec![0usize; n];
    for (d, level) in levels.iter().enumerate() {
        for &v in level {
            depth[v] = d;
        }
    }
    let touching = |level: usize, other: usize| -> Vec<usize> {
        let mut s: Vec<usize> = levels[level]
            .iter()
            .copied()
            .filter(|&v| g.neighbors(v).iter().any(|&w| depth[w] == other))
            .collect();
        s.sort_unstable();
        s
    };
    let side_a = touching(m, m + 1);
    let side_b = touching(m + 1, m);
    let sep = if side_b.len() < side_a.len() { side_b } else { side_a };

    let mut in_sep = vec![false; n];
    for &v in &sep {
        in_sep[v] = true;
    }
    let part1: Vec<usize> = (0..n).filter(|&v| depth[v] <= m && !in_sep[v]).collect();
    let part2: Vec<usize> = (0..n).filter(|&v| depth[v] > m && !in_sep[v]).collect();
    if part1.is_empty() || part2.is_empty() {
        return None;
    }
    Some((part1, part2, sep))
}

/// `(bandwidth, profile)` of a square pattern: the largest `|i - j|` over
/// the entries, and the sum over rows of the distance from the first entry
/// at or left of the diagonal to the diagonal.
pub fn bandwidth_profile(p: &Pattern) -> (usize, usize) {
    let mut first = vec![usize::MAX; p.dim];
    let mut bandwidth = 0;
    for (i, j) in p.iter() {
        bandwidth = bandwidth.max(i.abs_diff(j));
        if j <= i && j < first[i] {
            first[i] = j;
        }
    }
    let profile = first
        .iter()
        .enumerate()
        .filter(|(_, &f)| f != usize::MAX)
        .map(|(i, &f)| i - f)
        .sum();
    (bandwidth, profile)
}
