//! Directed multigraph instances over node-weighted metrics, plus the
//! multiset, connectivity and Euler-walk utilities shared by every other
//! module.
//!
//! Edge weights are never stored: `w(u, v) = f(u)`. Parallel edges get
//! distinct ids, so multiset operations reduce to integer arithmetic on
//! per-id multiplicities.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::num::Scalar;

pub type Vertex = u32;
pub type EdgeId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("instance needs at least two vertices")]
    TooFewVertices,
    #[error("weight vector has {got} entries for {expected} vertices")]
    WeightCountMismatch { got: usize, expected: usize },
    #[error("vertex {vertex} has a negative (or non-finite) weight")]
    NegativeWeight { vertex: Vertex },
    #[error("edge {edge} is a self-loop")]
    SelfLoop { edge: usize },
    #[error("edge {edge} references a vertex outside the instance")]
    BadEndpoint { edge: usize },
    #[error("vertex {to} is not reachable from vertex {from}")]
    NotStronglyConnected { from: Vertex, to: Vertex },
    #[error("unknown edge id {edge}")]
    UnknownEdge { edge: EdgeId },
    #[error("unknown vertex {vertex}")]
    UnknownVertex { vertex: Vertex },
    #[error("no path from {from} to {to} under the given restriction")]
    Unreachable { from: Vertex, to: Vertex },
    #[error("vertex {vertex} has unequal in- and out-degree in the multiset")]
    NotBalanced { vertex: Vertex },
    #[error("edge multiset is not connected")]
    NotConnected,
    #[error("circuit never visits vertex {vertex}")]
    VertexMissed { vertex: Vertex },
    #[error("graph invariant breach: {0}")]
    Internal(String),
}

/// Multiset of instance edges; the common currency for circulations,
/// Eulerian sets and tours. Multiplicities are per edge id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeMultiset {
    counts: BTreeMap<EdgeId, u32>,
}

impl EdgeMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ids<I: IntoIterator<Item = EdgeId>>(ids: I) -> Self {
        let mut s = Self::new();
        for e in ids {
            s.add(e, 1);
        }
        s
    }

    pub fn add(&mut self, edge: EdgeId, k: u32) {
        if k > 0 {
            *self.counts.entry(edge).or_insert(0) += k;
        }
    }

    pub fn count(&self, edge: EdgeId) -> u32 {
        self.counts.get(&edge).copied().unwrap_or(0)
    }

    pub fn contains(&self, edge: EdgeId) -> bool {
        self.counts.contains_key(&edge)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Number of distinct edge ids present.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Total multiplicity over all entries.
    pub fn total(&self) -> usize {
        self.counts.values().map(|&c| c as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, u32)> + '_ {
        self.counts.iter().map(|(&e, &c)| (e, c))
    }

    pub fn union_with(&mut self, other: &Self) {
        for (e, c) in other.iter() {
            self.add(e, c);
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (e, c) in self.iter() {
            let k = c.min(other.count(e));
            if k > 0 {
                out.add(e, k);
            }
        }
        out
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (e, c) in self.iter() {
            let k = c.saturating_sub(other.count(e));
            if k > 0 {
                out.add(e, k);
            }
        }
        out
    }
}

impl FromIterator<EdgeId> for EdgeMultiset {
    fn from_iter<I: IntoIterator<Item = EdgeId>>(ids: I) -> Self {
        Self::from_ids(ids)
    }
}

/// One connected component of `(V, E')` for some edge multiset `E'`,
/// computed ignoring edge direction.
#[derive(Debug, Clone)]
pub struct Component {
    /// Sorted ascending.
    pub vertices: Vec<Vertex>,
    pub edges: EdgeMultiset,
}

impl Component {
    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn min_vertex(&self) -> Vertex {
        self.vertices[0]
    }
}

/// All connected components of `(V, E')`; vertices untouched by `E'` appear
/// as singleton components. Components are ordered by smallest vertex.
#[derive(Debug, Clone)]
pub struct ComponentView {
    pub components: Vec<Component>,
    comp_of: Vec<usize>,
}

impl ComponentView {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Index into `components` for a vertex.
    pub fn component_of(&self, v: Vertex) -> usize {
        self.comp_of[v as usize]
    }
}

/// All-pairs shortest-path distances under `w(u, v) = f(u)`; `d(u, u) = 0`.
#[derive(Debug, Clone)]
pub struct ClosureMatrix<S> {
    n: usize,
    d: Vec<S>,
}

impl<S: Scalar> ClosureMatrix<S> {
    /// Wrap an explicit distance matrix (row-major, `n * n` entries).
    /// Used by the exact oracle for general-metric cross-checks.
    pub fn from_raw(n: usize, d: Vec<S>) -> Self {
        assert_eq!(d.len(), n * n);
        Self { n, d }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self, u: Vertex, v: Vertex) -> S {
        self.d[u as usize * self.n + v as usize]
    }
}

/// A strongly connected digraph with nonnegative vertex weights; edge
/// weights are derived as `w(u, v) = f(u)`. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Instance<S> {
    f: Vec<S>,
    edges: Vec<(Vertex, Vertex)>,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
    closure: OnceLock<ClosureMatrix<S>>,
}

impl<S: Scalar> Instance<S> {
    /// Validates and builds an instance. Fails on fewer than two vertices,
    /// negative weights, self-loops, endpoints out of range, or a digraph
    /// that is not strongly connected (the error names an unreachable
    /// ordered pair).
    pub fn new(f: Vec<S>, edges: Vec<(Vertex, Vertex)>) -> Result<Self, GraphError> {
        let n = f.len();
        if n < 2 {
            return Err(GraphError::TooFewVertices);
        }
        for (v, w) in f.iter().enumerate() {
            if !(*w >= S::zero()) || !w.is_finite() {
                return Err(GraphError::NegativeWeight { vertex: v as Vertex });
            }
        }
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::BadEndpoint { edge: i });
            }
            if u == v {
                return Err(GraphError::SelfLoop { edge: i });
            }
        }

        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            out_adj[u as usize].push(i as EdgeId);
            in_adj[v as usize].push(i as EdgeId);
        }
        // Deterministic neighbour order: by head (resp. tail), then edge id.
        for (v, adj) in out_adj.iter_mut().enumerate() {
            let _ = v;
            adj.sort_by_key(|&e| (edges[e as usize].1, e));
        }
        for adj in in_adj.iter_mut() {
            adj.sort_by_key(|&e| (edges[e as usize].0, e));
        }

        let inst = Self {
            f,
            edges,
            out_adj,
            in_adj,
            closure: OnceLock::new(),
        };
        inst.check_strongly_connected()?;
        Ok(inst)
    }

    fn check_strongly_connected(&self) -> Result<(), GraphError> {
        let n = self.n();
        let reach = |forward: bool| -> Vec<bool> {
            let mut seen = vec![false; n];
            let mut stack = vec![0 as Vertex];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                let adj = if forward {
                    &self.out_adj[v as usize]
                } else {
                    &self.in_adj[v as usize]
                };
                for &e in adj {
                    let (a, b) = self.edges[e as usize];
                    let w = if forward { b } else { a };
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        stack.push(w);
                    }
                }
            }
            seen
        };
        let fwd = reach(true);
        if let Some(v) = fwd.iter().position(|&r| !r) {
            return Err(GraphError::NotStronglyConnected {
                from: 0,
                to: v as Vertex,
            });
        }
        let bwd = reach(false);
        if let Some(v) = bwd.iter().position(|&r| !r) {
            return Err(GraphError::NotStronglyConnected {
                from: v as Vertex,
                to: 0,
            });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.f.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, v: Vertex) -> S {
        self.f[v as usize]
    }

    pub fn weights(&self) -> &[S] {
        &self.f
    }

    pub fn edge(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.edges[e as usize]
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    /// `w(e) = f(tail)`.
    pub fn edge_weight(&self, e: EdgeId) -> S {
        self.f[self.edges[e as usize].0 as usize]
    }

    /// Outgoing edge ids of `v`, sorted by (head, id).
    pub fn out_edges(&self, v: Vertex) -> &[EdgeId] {
        &self.out_adj[v as usize]
    }

    pub fn in_edges(&self, v: Vertex) -> &[EdgeId] {
        &self.in_adj[v as usize]
    }

    fn check_ids(&self, em: &EdgeMultiset) -> Result<(), GraphError> {
        if let Some((e, _)) = em.iter().find(|&(e, _)| e as usize >= self.m()) {
            return Err(GraphError::UnknownEdge { edge: e });
        }
        Ok(())
    }

    /// Total weight of a multiset: sum over occurrences of `f(tail)`.
    pub fn multiset_weight(&self, em: &EdgeMultiset) -> S {
        em.iter()
            .map(|(e, c)| self.edge_weight(e) * S::from_u32(c).unwrap())
            .sum()
    }

    /// Multiplicity-counted (out, in) degrees per vertex.
    pub fn degrees(&self, em: &EdgeMultiset) -> Result<(Vec<u32>, Vec<u32>), GraphError> {
        self.check_ids(em)?;
        let mut out = vec![0u32; self.n()];
        let mut inn = vec![0u32; self.n()];
        for (e, c) in em.iter() {
            let (u, v) = self.edges[e as usize];
            out[u as usize] += c;
            inn[v as usize] += c;
        }
        Ok((out, inn))
    }

    /// Err names the first unbalanced vertex.
    pub fn eulerian_balance(&self, em: &EdgeMultiset) -> Result<(), GraphError> {
        let (out, inn) = self.degrees(em)?;
        for v in 0..self.n() {
            if out[v] != inn[v] {
                return Err(GraphError::NotBalanced { vertex: v as Vertex });
            }
        }
        Ok(())
    }

    /// Undirected connected components of `(V, E')`; untouched vertices come
    /// out as singletons.
    pub fn components(&self, em: &EdgeMultiset) -> Result<ComponentView, GraphError> {
        self.check_ids(em)?;
        let n = self.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut c = x;
            while parent[c] != r {
                let next = parent[c];
                parent[c] = r;
                c = next;
            }
            r
        }
        for (e, _) in em.iter() {
            let (u, v) = self.edges[e as usize];
            let (ru, rv) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
            if ru != rv {
                // Root at the smaller index so component order is stable.
                let (lo, hi) = if ru < rv { (ru, rv) } else { (rv, ru) };
                parent[hi] = lo;
            }
        }
        let mut root_to_comp: BTreeMap<usize, usize> = BTreeMap::new();
        let mut comp_of = vec![0usize; n];
        for v in 0..n {
            let r = find(&mut parent, v);
            let next = root_to_comp.len();
            let idx = *root_to_comp.entry(r).or_insert(next);
            comp_of[v] = idx;
        }
        let mut components: Vec<Component> = (0..root_to_comp.len())
            .map(|_| Component {
                vertices: Vec::new(),
                edges: EdgeMultiset::new(),
            })
            .collect();
        for v in 0..n {
            components[comp_of[v]].vertices.push(v as Vertex);
        }
        for (e, c) in em.iter() {
            let (u, _) = self.edges[e as usize];
            components[comp_of[u as usize]].edges.add(e, c);
        }
        Ok(ComponentView {
            components,
            comp_of,
        })
    }

    /// Restriction of `em` to edges with both endpoints inside `vertices`.
    pub fn restrict(&self, em: &EdgeMultiset, vertices: &[Vertex]) -> EdgeMultiset {
        let mut inside = vec![false; self.n()];
        for &v in vertices {
            inside[v as usize] = true;
        }
        let mut out = EdgeMultiset::new();
        for (e, c) in em.iter() {
            let (u, v) = self.edges[e as usize];
            if inside[u as usize] && inside[v as usize] {
                out.add(e, c);
            }
        }
        out
    }

    fn dijkstra(&self, src: Vertex, forward: bool, allowed: Option<&[bool]>) -> Vec<S> {
        let n = self.n();
        let inf = S::infinity();
        let mut dist = vec![inf; n];
        if let Some(mask) = allowed {
            if !mask[src as usize] {
                return dist;
            }
        }
        dist[src as usize] = S::zero();
        let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<HeapItem<S>>> =
            std::collections::BinaryHeap::new();
        heap.push(std::cmp::Reverse(HeapItem {
            dist: S::zero(),
            v: src,
        }));
        while let Some(std::cmp::Reverse(item)) = heap.pop() {
            if item.dist > dist[item.v as usize] {
                continue;
            }
            let adj = if forward {
                &self.out_adj[item.v as usize]
            } else {
                &self.in_adj[item.v as usize]
            };
            for &e in adj {
                let (a, b) = self.edges[e as usize];
                // Forward: relax tail -> head paying f(tail). Backward: walk
                // head -> tail of the reversed arc, still paying f(tail).
                let (next, step) = if forward {
                    (b, self.f[a as usize])
                } else {
                    (a, self.f[a as usize])
                };
                if let Some(mask) = allowed {
                    if !mask[next as usize] {
                        continue;
                    }
                }
                let nd = item.dist + step;
                if nd < dist[next as usize] {
                    dist[next as usize] = nd;
                    heap.push(std::cmp::Reverse(HeapItem { dist: nd, v: next }));
                }
            }
        }
        dist
    }

    /// Minimum-weight simple directed path from `u` to `v`, optionally
    /// restricted to a vertex set that must contain both endpoints. Ties are
    /// broken towards the lexicographically smallest vertex sequence.
    /// Returns the edge list and its weight; `u == v` yields an empty path.
    pub fn shortest_path(
        &self,
        u: Vertex,
        v: Vertex,
        restrict: Option<&[Vertex]>,
    ) -> Result<(Vec<EdgeId>, S), GraphError> {
        if u as usize >= self.n() {
            return Err(GraphError::UnknownVertex { vertex: u });
        }
        if v as usize >= self.n() {
            return Err(GraphError::UnknownVertex { vertex: v });
        }
        if u == v {
            return Ok((Vec::new(), S::zero()));
        }
        let mask: Option<Vec<bool>> = restrict.map(|set| {
            let mut m = vec![false; self.n()];
            for &x in set {
                m[x as usize] = true;
            }
            m
        });
        let mask_ref = mask.as_deref();
        let dist_from = self.dijkstra(u, true, mask_ref);
        if !dist_from[v as usize].is_finite() {
            return Err(GraphError::Unreachable { from: u, to: v });
        }
        let dist_to = self.dijkstra(v, false, mask_ref);
        let total = dist_from[v as usize];
        let tol = S::WEIGHT_TOL;

        // Depth-first walk over tolerance-tight edges, trying smaller heads
        // first: the first complete simple path is the lexicographically
        // smallest one. Zero-weight vertices can force backtracking, so cap
        // the expansions and fall back to a plain greedy tight walk.
        let mut visited = vec![false; self.n()];
        let mut path: Vec<EdgeId> = Vec::new();
        let mut budget: usize = 64 * self.n() * self.n() + 4096;
        if self.lex_dfs(
            u,
            v,
            S::zero(),
            total,
            tol,
            mask_ref,
            &dist_to,
            &mut visited,
            &mut path,
            &mut budget,
        ) {
            let w: S = path.iter().map(|&e| self.edge_weight(e)).sum();
            return Ok((path, w));
        }
        self.greedy_tight_path(u, v, total, tol, mask_ref, &dist_to)
    }

    #[allow(clippy::too_many_arguments)]
    fn lex_dfs(
        &self,
        cur: Vertex,
        target: Vertex,
        acc: S,
        total: S,
        tol: S,
        mask: Option<&[bool]>,
        dist_to: &[S],
        visited: &mut [bool],
        path: &mut Vec<EdgeId>,
        budget: &mut usize,
    ) -> bool {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        visited[cur as usize] = true;
        for &e in &self.out_adj[cur as usize] {
            let (_, next) = self.edges[e as usize];
            if next != target && visited[next as usize] {
                continue;
            }
            if let Some(m) = mask {
                if !m[next as usize] {
                    continue;
                }
            }
            let through = acc + self.f[cur as usize] + dist_to[next as usize];
            if !(through <= total + tol) {
                continue;
            }
            path.push(e);
            if next == target {
                visited[cur as usize] = false;
                return true;
            }
            if self.lex_dfs(
                next, target, acc + self.f[cur as usize], total, tol, mask, dist_to, visited,
                path, budget,
            ) {
                visited[cur as usize] = false;
                return true;
            }
            path.pop();
        }
        visited[cur as usize] = false;
        false
    }

    /// Fallback for pathological zero-weight neighbourhoods: follow the
    /// smallest tight successor without backtracking.
    fn greedy_tight_path(
        &self,
        u: Vertex,
        v: Vertex,
        total: S,
        tol: S,
        mask: Option<&[bool]>,
        dist_to: &[S],
    ) -> Result<(Vec<EdgeId>, S), GraphError> {
        let mut path = Vec::new();
        let mut cur = u;
        let mut acc = S::zero();
        let mut steps = 0usize;
        while cur != v {
            steps += 1;
            if steps > self.n() + 1 {
                return Err(GraphError::Internal(format!(
                    "tight-path walk from {u} to {v} did not terminate"
                )));
            }
            let mut chosen = None;
            for &e in &self.out_adj[cur as usize] {
                let (_, next) = self.edges[e as usize];
                if let Some(m) = mask {
                    if !m[next as usize] {
                        continue;
                    }
                }
                if acc + self.f[cur as usize] + dist_to[next as usize] <= total + tol {
                    chosen = Some((e, next));
                    break;
                }
            }
            let Some((e, next)) = chosen else {
                return Err(GraphError::Internal(format!(
                    "no tight successor at vertex {cur} on path {u} -> {v}"
                )));
            };
            acc += self.f[cur as usize];
            path.push(e);
            cur = next;
        }
        Ok((path, acc))
    }

    /// Cached metric closure (all-pairs shortest paths), computed once.
    pub fn closure(&self) -> &ClosureMatrix<S> {
        self.closure.get_or_init(|| {
            let n = self.n();
            let mut d = Vec::with_capacity(n * n);
            for src in 0..n {
                d.extend(self.dijkstra(src as Vertex, true, None));
            }
            ClosureMatrix { n, d }
        })
    }

    /// Closed walk using every multiset occurrence exactly once, as a list
    /// of edge ids. Requires the multiset to be balanced and connected.
    pub fn eulerian_circuit(&self, em: &EdgeMultiset) -> Result<Vec<EdgeId>, GraphError> {
        if em.is_empty() {
            return Err(GraphError::NotConnected);
        }
        self.eulerian_balance(em)?;
        let view = self.components(em)?;
        if view.components.iter().filter(|c| !c.is_trivial()).count() != 1 {
            return Err(GraphError::NotConnected);
        }

        // Hierholzer on the multigraph; adjacency consumed in sorted order
        // for deterministic walks.
        let n = self.n();
        let mut adj: Vec<Vec<(EdgeId, u32)>> = vec![Vec::new(); n];
        for (e, c) in em.iter() {
            let (u, _) = self.edges[e as usize];
            adj[u as usize].push((e, c));
        }
        for a in adj.iter_mut() {
            a.sort_by_key(|&(e, _)| (self.edges[e as usize].1, e));
        }
        let mut cursor = vec![0usize; n];
        let start = em
            .iter()
            .map(|(e, _)| self.edges[e as usize].0.min(self.edges[e as usize].1))
            .min()
            .unwrap();

        let mut stack: Vec<(Vertex, Option<EdgeId>)> = vec![(start, None)];
        let mut circuit_rev: Vec<EdgeId> = Vec::new();
        while let Some(&(v, via)) = stack.last() {
            let vs = v as usize;
            let mut advanced = false;
            while cursor[vs] < adj[vs].len() {
                let (e, ref mut rem) = adj[vs][cursor[vs]];
                if rem == &0 {
                    cursor[vs] += 1;
                    continue;
                }
                *rem -= 1;
                stack.push((self.edges[e as usize].1, Some(e)));
                advanced = true;
                break;
            }
            if !advanced {
                stack.pop();
                if let Some(e) = via {
                    circuit_rev.push(e);
                }
            }
        }
        circuit_rev.reverse();
        if circuit_rev.len() != em.total() {
            return Err(GraphError::Internal(
                "euler walk did not consume every edge occurrence".into(),
            ));
        }
        Ok(circuit_rev)
    }

    /// Vertex sequence of an edge walk, including the closing vertex.
    pub fn walk_vertices(&self, circuit: &[EdgeId]) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(circuit.len() + 1);
        if let Some(&e0) = circuit.first() {
            out.push(self.edges[e0 as usize].0);
            for &e in circuit {
                out.push(self.edges[e as usize].1);
            }
        }
        out
    }

    /// Shortcut a closed walk that visits every vertex into a Hamiltonian
    /// order (first occurrence) priced in the metric closure. The result
    /// never weighs more than the walk itself.
    pub fn shortcut(&self, circuit: &[EdgeId]) -> Result<(Vec<Vertex>, S), GraphError> {
        if circuit.is_empty() {
            return Err(GraphError::NotConnected);
        }
        let n = self.n();
        let mut seen = vec![false; n];
        let mut order: Vec<Vertex> = Vec::with_capacity(n);
        let start = self.edges[circuit[0] as usize].0;
        seen[start as usize] = true;
        order.push(start);
        for &e in circuit {
            let h = self.edges[e as usize].1;
            if !seen[h as usize] {
                seen[h as usize] = true;
                order.push(h);
            }
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(GraphError::VertexMissed {
                vertex: v as Vertex,
            });
        }
        let d = self.closure();
        let mut w = S::zero();
        for i in 0..order.len() {
            let a = order[i];
            let b = order[(i + 1) % order.len()];
            w += d.dist(a, b);
        }
        let circuit_w: S = circuit.iter().map(|&e| self.edge_weight(e)).sum();
        if w > circuit_w + S::WEIGHT_TOL {
            return Err(GraphError::Internal(format!(
                "shortcut weight {w} exceeds circuit weight {circuit_w}"
            )));
        }
        Ok((order, w))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapItem<S> {
    dist: S,
    v: Vertex,
}

impl<S: Scalar> Eq for HeapItem<S> {}

impl<S: Scalar> Ord for HeapItem<S> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Weights are validated finite, so partial_cmp cannot fail.
        self.dist
            .partial_cmp(&other.dist)
            .unwrap()
            .then(self.v.cmp(&other.v))
    }
}

impl<S: Scalar> PartialOrd for HeapItem<S> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Inst = Instance<f64>;

    pub(crate) fn c4() -> Inst {
        Instance::new(vec![1.0; 4], vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    fn digon(f0: f64, f1: f64) -> Inst {
        Instance::new(vec![f0, f1], vec![(0, 1), (1, 0)]).unwrap()
    }

    fn all_edges(inst: &Inst) -> EdgeMultiset {
        (0..inst.m() as EdgeId).collect()
    }

    /// Walk validity: consecutive edges chain head-to-tail, the walk closes,
    /// and the multiset is consumed exactly.
    fn assert_valid_circuit(inst: &Inst, em: &EdgeMultiset, walk: &[EdgeId]) {
        assert_eq!(walk.len(), em.total());
        let mut used = EdgeMultiset::new();
        for w in walk.windows(2) {
            assert_eq!(inst.edge(w[0]).1, inst.edge(w[1]).0);
        }
        assert_eq!(
            inst.edge(*walk.last().unwrap()).1,
            inst.edge(walk[0]).0,
            "walk must close"
        );
        for &e in walk {
            used.add(e, 1);
        }
        assert_eq!(&used, em);
    }

    #[test]
    fn validate_accepts_cycle_and_digon() {
        c4();
        digon(2.0, 3.0);
    }

    #[test]
    fn validate_rejects_path() {
        let err = Instance::<f64>::new(vec![1.0, 1.0], vec![(0, 1)]).unwrap_err();
        assert_eq!(err, GraphError::NotStronglyConnected { from: 1, to: 0 });
    }

    #[test]
    fn validate_rejects_self_loop_and_negative_weight() {
        let err = Instance::<f64>::new(vec![1.0, 1.0], vec![(0, 0), (0, 1), (1, 0)]).unwrap_err();
        assert_eq!(err, GraphError::SelfLoop { edge: 0 });
        let err = Instance::<f64>::new(vec![1.0, -0.5], vec![(0, 1), (1, 0)]).unwrap_err();
        assert_eq!(err, GraphError::NegativeWeight { vertex: 1 });
    }

    #[test]
    fn validate_rejects_single_vertex() {
        let err = Instance::<f64>::new(vec![1.0], vec![]).unwrap_err();
        assert_eq!(err, GraphError::TooFewVertices);
    }

    #[test]
    fn components_empty_and_full() {
        let inst = c4();
        let view = inst.components(&EdgeMultiset::new()).unwrap();
        assert_eq!(view.len(), 4);
        assert!(view.components.iter().all(|c| c.is_trivial()));

        let view = inst.components(&all_edges(&inst)).unwrap();
        assert_eq!(view.len(), 1);
        assert_eq!(view.components[0].vertices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn components_digon_inside_larger_instance() {
        // Digon on {0,1} plus a covering cycle to keep the instance valid.
        let inst = Instance::<f64>::new(
            vec![1.0; 4],
            vec![(0, 1), (1, 0), (0, 2), (2, 3), (3, 0)],
        )
        .unwrap();
        let em = EdgeMultiset::from_ids([0, 1]);
        let view = inst.components(&em).unwrap();
        assert_eq!(view.len(), 3);
        assert_eq!(view.components[0].vertices, vec![0, 1]);
        assert_eq!(view.components[1].vertices, vec![2]);
        assert_eq!(view.components[2].vertices, vec![3]);
        assert_eq!(view.component_of(1), 0);
    }

    #[test]
    fn components_rejects_unknown_edge() {
        let inst = c4();
        let em = EdgeMultiset::from_ids([9]);
        assert_eq!(
            inst.components(&em).unwrap_err(),
            GraphError::UnknownEdge { edge: 9 }
        );
    }

    #[test]
    fn shortest_path_on_cycle() {
        let inst = c4();
        let (path, w) = inst.shortest_path(0, 2, None).unwrap();
        assert_eq!(path, vec![0, 1]);
        assert_eq!(w, 2.0);
        let (path, w) = inst.shortest_path(1, 1, None).unwrap();
        assert!(path.is_empty());
        assert_eq!(w, 0.0);
    }

    /// Oracle: enumerate all simple paths on a 3-vertex instance.
    #[test]
    fn shortest_path_beats_detour() {
        let edges = vec![(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)];
        let inst = Instance::new(vec![1.0, 5.0, 1.0], edges).unwrap();
        // Brute force all simple 0 -> 1 paths: direct = f(0) = 1,
        // via 2 = f(0) + f(2) = 2.
        let mut best = f64::INFINITY;
        for path in [vec![(0u32, 1u32)], vec![(0, 2), (2, 1)]] {
            let w: f64 = path.iter().map(|&(t, _)| inst.weight(t)).sum();
            best = best.min(w);
        }
        assert_eq!(best, 1.0);
        let (path, w) = inst.shortest_path(0, 1, None).unwrap();
        assert_eq!(w, best);
        assert_eq!(path, vec![0]);
    }

    #[test]
    fn shortest_path_respects_restriction() {
        let edges = vec![(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)];
        let inst = Instance::new(vec![1.0, 1.0, 1.0], edges).unwrap();
        let err = inst.shortest_path(0, 1, Some(&[0, 2])).unwrap_err();
        assert_eq!(err, GraphError::Unreachable { from: 0, to: 1 });
        let (path, w) = inst.shortest_path(0, 2, Some(&[0, 2])).unwrap();
        assert_eq!(path, vec![4]);
        assert_eq!(w, 1.0);
    }

    #[test]
    fn euler_circuit_on_cycle_and_doubled_digon() {
        let inst = c4();
        let em = all_edges(&inst);
        let walk = inst.eulerian_circuit(&em).unwrap();
        assert_valid_circuit(&inst, &em, &walk);
        assert_eq!(inst.walk_vertices(&walk), vec![0, 1, 2, 3, 0]);

        let inst = digon(1.0, 1.0);
        let mut em = EdgeMultiset::new();
        em.add(0, 2);
        em.add(1, 2);
        let walk = inst.eulerian_circuit(&em).unwrap();
        assert_eq!(walk.len(), 4);
        assert_valid_circuit(&inst, &em, &walk);
    }

    #[test]
    fn euler_circuit_figure_eight() {
        // Two directed triangles sharing vertex 0.
        let edges = vec![(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)];
        let inst = Instance::<f64>::new(vec![1.0; 5], edges).unwrap();
        let em = all_edges(&inst);
        let walk = inst.eulerian_circuit(&em).unwrap();
        assert_eq!(walk.len(), 6);
        assert_valid_circuit(&inst, &em, &walk);
    }

    #[test]
    fn euler_circuit_rejects_imbalance_and_disconnect() {
        let inst = c4();
        let em = EdgeMultiset::from_ids([0]);
        assert_eq!(
            inst.eulerian_circuit(&em).unwrap_err(),
            GraphError::NotBalanced { vertex: 0 }
        );

        // Two disjoint digons inside a 4-vertex instance.
        let inst = Instance::<f64>::new(
            vec![1.0; 4],
            vec![(0, 1), (1, 0), (2, 3), (3, 2), (1, 2), (2, 1)],
        )
        .unwrap();
        let em = EdgeMultiset::from_ids([0, 1, 2, 3]);
        assert_eq!(
            inst.eulerian_circuit(&em).unwrap_err(),
            GraphError::NotConnected
        );
    }

    #[test]
    fn shortcut_cycle_is_identity() {
        let inst = c4();
        let walk = inst.eulerian_circuit(&all_edges(&inst)).unwrap();
        let (order, w) = inst.shortcut(&walk).unwrap();
        assert_eq!(order, vec![0, 1, 2, 3]);
        assert_eq!(w, 4.0);
    }

    #[test]
    fn shortcut_star_walk_never_costs_more() {
        // Star-like Eulerian multiset around vertex 0: 0,1,0,2,0.
        let edges = vec![(0, 1), (1, 0), (0, 2), (2, 0)];
        let inst = Instance::new(vec![1.0, 2.0, 3.0], edges).unwrap();
        let em = all_edges(&inst);
        let walk = inst.eulerian_circuit(&em).unwrap();
        let (order, w) = inst.shortcut(&walk).unwrap();
        assert_eq!(order.len(), 3);
        assert!(w <= inst.multiset_weight(&em) + 1e-9);

        // Independent all-pairs oracle (Floyd-Warshall) for the closure.
        let n = inst.n();
        let mut d = vec![vec![f64::INFINITY; n]; n];
        for v in 0..n {
            d[v][v] = 0.0;
        }
        for &(u, v) in inst.edges() {
            d[u as usize][v as usize] = d[u as usize][v as usize].min(inst.weight(u));
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                assert!(
                    (inst.closure().dist(i as Vertex, j as Vertex) - d[i][j]).abs() < 1e-12,
                    "closure mismatch at ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn shortcut_reports_missed_vertex() {
        let inst = Instance::<f64>::new(
            vec![1.0; 4],
            vec![(0, 1), (1, 0), (0, 2), (2, 3), (3, 0)],
        )
        .unwrap();
        let em = EdgeMultiset::from_ids([0, 1]);
        let walk = inst.eulerian_circuit(&em).unwrap();
        assert_eq!(
            inst.shortcut(&walk).unwrap_err(),
            GraphError::VertexMissed { vertex: 2 }
        );
    }

    #[test]
    fn multiset_algebra_matches_expectations() {
        let mut a = EdgeMultiset::new();
        a.add(0, 2);
        a.add(1, 1);
        let mut b = EdgeMultiset::new();
        b.add(0, 1);
        b.add(1, 1);
        let u = a.union(&b);
        assert_eq!(u.count(0), 3);
        assert_eq!(u.count(1), 2);
        let i = a.intersection(&b);
        assert_eq!(i.count(0), 1);
        assert_eq!(i.count(1), 1);
        let d = a.difference(&b);
        assert_eq!(d.count(0), 1);
        assert_eq!(d.count(1), 0);
        assert!(!d.contains(1));
    }

    #[test]
    fn weight_is_additive_under_union() {
        let inst = digon(2.0, 3.0);
        let a = EdgeMultiset::from_ids([0]);
        let b = EdgeMultiset::from_ids([0, 1]);
        let w = inst.multiset_weight(&a.union(&b));
        assert_eq!(
            w,
            inst.multiset_weight(&a) + inst.multiset_weight(&b)
        );
    }
}
