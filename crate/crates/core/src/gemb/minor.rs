//! Brute-force graph-minor test on small unlabeled trees.
//!
//! Term graphs are trees and contracting an edge of a tree yields a tree, so
//! isomorphism is decided through a canonical encoding rooted at the centre.

use std::collections::{BTreeSet, VecDeque};

use crate::term::Term;

pub const DEFAULT_MINOR_BUDGET: usize = 10;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum MinorError {
    #[error("graph has {nodes} nodes, above the budget of {budget}")]
    Budget { nodes: usize, budget: usize },
    #[error("edge list does not describe a tree: {0}")]
    NotATree(String),
}

/// An unlabeled tree given by adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeGraph {
    adj: Vec<Vec<usize>>,
}

impl TreeGraph {
    pub fn from_term(t: &Term) -> Self {
        let mut adj: Vec<Vec<usize>> = Vec::new();
        fn build(t: &Term, adj: &mut Vec<Vec<usize>>) -> usize {
            let me = adj.len();
            adj.push(Vec::new());
            for a in t.args() {
                let c = build(a, adj);
                adj[me].push(c);
                adj[c].push(me);
            }
            me
        }
        build(t, &mut adj);
        TreeGraph { adj }
    }

    pub fn from_edges(nodes: usize, edges: &[(usize, usize)]) -> Result<Self, MinorError> {
        if nodes == 0 {
            return Err(MinorError::NotATree("no nodes".into()));
        }
        if edges.len() + 1 != nodes {
            return Err(MinorError::NotATree(format!("{nodes} nodes need {} edges", nodes - 1)));
        }
        let mut adj = vec![Vec::new(); nodes];
        for &(a, b) in edges {
            if a >= nodes || b >= nodes || a == b {
                return Err(MinorError::NotATree(format!("bad edge ({a},{b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let g = TreeGraph { adj };
        if g.component_size(0) != nodes {
            return Err(MinorError::NotATree("disconnected".into()));
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    fn component_size(&self, start: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        let mut q = VecDeque::from([start]);
        seen[start] = true;
        let mut n = 0;
        while let Some(v) = q.pop_front() {
            n += 1;
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
        n
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, ns) in self.adj.iter().enumerate() {
            for &b in ns {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// `G/e`: merges `b` into `a`.
    pub fn contract(&self, a: usize, b: usize) -> TreeGraph {
        let remap = |v: usize| -> usize {
            let v = if v == b { a } else { v };
            if v > b {
                v - 1
            } else {
                v
            }
        };
        let n = self.adj.len() - 1;
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (x, y) in self.edges() {
            let (x, y) = (remap(x), remap(y));
            if x != y {
                adj[x].insert(y);
                adj[y].insert(x);
            }
        }
        TreeGraph { adj: adj.into_iter().map(|s| s.into_iter().collect()).collect() }
    }

    fn centres(&self) -> Vec<usize> {
        let n = self.adj.len();
        if n <= 2 {
            return (0..n).collect();
        }
        let mut deg: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
        let mut left = n;
        while left > 2 {
            left -= layer.len();
            let mut next = Vec::new();
            for &v in &layer {
                for &w in &self.adj[v] {
                    if deg[w] > 1 {
                        deg[w] -= 1;
                        if deg[w] == 1 {
                            next.push(w);
                        }
                    }
                }
                deg[v] = 0;
            }
            layer = next;
        }
        layer
    }

    fn encode(&self, v: usize, parent: Option<usize>) -> String {
        let mut kids: Vec<String> =
            self.adj[v].iter().filter(|&&w| Some(w) != parent).map(|&w| self.encode(w, Some(v))).collect();
        kids.sort();
        format!("({})", kids.concat())
    }

    /// Isomorphism-invariant encoding.
    pub fn canonical(&self) -> String {
        self.centres().into_iter().map(|c| self.encode(c, None)).min().unwrap_or_default()
    }

    /// Whether `h` is obtained from `self` by zero or more edge contractions.
    pub fn contracts_to(&self, h: &TreeGraph, budget: usize) -> Result<bool, MinorError> {
        for g in [self, h] {
            if g.node_count() > budget {
                return Err(MinorError::Budget { nodes: g.node_count(), budget });
            }
        }
        if h.node_count() > self.node_count() {
            return Ok(false);
        }
        let goal = h.canonical();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([self.clone()]);
        seen.insert(self.canonical());
        while let Some(g) = queue.pop_front() {
            let c = g.canonical();
            if c == goal {
                return Ok(true);
            }
            if g.node_count() <= h.node_count() {
                continue;
            }
            for (a, b) in g.edges() {
                let k = g.contract(a, b);
                if seen.insert(k.canonical()) {
                    queue.push_back(k);
                }
            }
        }
        Ok(false)
    }
}

/// Whether the term graph of `u` is a minor (by contractions) of that of `t`.
pub fn graph_minor_oracle(t: &Term, u: &Term, budget: usize) -> Result<bool, MinorError> {
    TreeGraph::from_term(t).contracts_to(&TreeGraph::from_term(u), budget)
}
