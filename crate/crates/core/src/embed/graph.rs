//! Taxonomy ingestion and transitive closure.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;
use std::path::Path;

use crate::{Error, Result};

/// A directed acyclic taxonomy. Pairs are stored as `(u, v)` with `u` the
/// parent (or ancestor, in the closure) and `v` the child.
#[derive(Debug, Clone, Default)]
pub struct TaxonomyGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    closure: Vec<(usize, usize)>,
    closure_set: HashSet<(usize, usize)>,
    related: Vec<HashSet<usize>>,
    degrees: Vec<usize>,
    has_parent: Vec<bool>,
    has_child: Vec<bool>,
}

impl TaxonomyGraph {
    pub fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::parse(std::io::BufReader::new(file))
    }

    /// Parses `child<TAB>parent` lines; blank lines and lines starting with
    /// `#` are skipped.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut index = HashMap::new();
        let mut edges = Vec::new();
        let mut seen = HashSet::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            if fields.len() != 2 {
                return Err(bad(&format!(
                    "expected `child<TAB>parent`, found {} field(s)",
                    fields.len()
                )));
            }
            let (child, parent) = (fields[0].trim(), fields[1].trim());
            if child.is_empty() || parent.is_empty() {
                return Err(bad("empty node name"));
            }
            let mut id = |name: &str| {
                *index.entry(name.to_string()).or_insert_with(|| {
                    names.push(name.to_string());
                    names.len() - 1
                })
            };
            let c = id(child);
            let p = id(parent);
            if seen.insert((p, c)) {
                edges.push((p, c));
            }
        }
        Self::build(names, edges)
    }

    /// Builds a graph from node names and `(parent, child)` index pairs.
    pub fn from_edges(names: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = names.len();
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n || v >= n) {
            return Err(Error::Config(format!(
                "edge ({u}, {v}) refers to an unknown node"
            )));
        }
        let mut seen = HashSet::new();
        let edges = edges.into_iter().filter(|e| seen.insert(*e)).collect();
        Self::build(names, edges)
    }

    fn build(names: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = names.len();
        let index = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect::<HashMap<_, _>>();
        if index.len() != n {
            return Err(Error::Config("duplicate node names".into()));
        }
        let mut parents = vec![Vec::new(); n];
        let mut has_parent = vec![false; n];
        let mut has_child = vec![false; n];
        for &(p, c) in &edges {
            parents[c].push(p);
            has_parent[c] = true;
            has_child[p] = true;
        }
        if let Some(cycle) = find_cycle(&parents) {
            return Err(Error::Cycle(
                cycle.into_iter().map(|i| names[i].clone()).collect(),
            ));
        }

        // ancestors of each node by reachability along parent links
        let mut closure = Vec::new();
        for v in 0..n {
            let mut seen = vec![false; n];
            let mut stack = parents[v].clone();
            while let Some(u) = stack.pop() {
                if !seen[u] {
                    seen[u] = true;
                    closure.push((u, v));
                    stack.extend(&parents[u]);
                }
            }
        }
        closure.sort_unstable();
        let mut related = vec![HashSet::new(); n];
        let mut degrees = vec![0; n];
        for &(u, v) in &closure {
            related[u].insert(v);
            related[v].insert(u);
            degrees[u] += 1;
            degrees[v] += 1;
        }
        let closure_set = closure.iter().copied().collect();
        Ok(Self {
            names,
            index,
            edges,
            closure,
            closure_set,
            related,
            degrees,
            has_parent,
            has_child,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Raw `(parent, child)` edges in input order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted `(ancestor, descendant)` pairs of the transitive closure.
    pub fn closure(&self) -> &[(usize, usize)] {
        &self.closure
    }

    pub fn in_closure(&self, u: usize, v: usize) -> bool {
        self.closure_set.contains(&(u, v))
    }

    /// Whether `u` and `v` are linked by a closure edge in either direction.
    pub fn related(&self, u: usize, v: usize) -> bool {
        self.related[u].contains(&v)
    }

    /// Number of closure edges incident to each node.
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn is_root(&self, v: usize) -> bool {
        !self.has_parent[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        !self.has_child[v]
    }
}

/// Iterative three-colour DFS; returns the nodes of one cycle, closed by
/// repeating its first node.
fn find_cycle(parents: &[Vec<usize>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let n = parents.len();
    let mut mark = vec![Mark::New; n];
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        let mut path = vec![root];
        let mut next = vec![0usize];
        mark[root] = Mark::Open;
        while let Some(&v) = path.last() {
            let k = next.last_mut().unwrap();
            if let Some(&u) = parents[v].get(*k) {
                *k += 1;
                match mark[u] {
                    Mark::New => {
                        mark[u] = Mark::Open;
                        path.push(u);
                        next.push(0);
                    }
                    Mark::Open => {
                        let start = path.iter().position(|&w| w == u).unwrap();
                        let mut cycle = path[start..].to_vec();
                        cycle.push(u);
                        return Some(cycle);
                    }
                    Mark::Done => {}
                }
            } else {
                mark[v] = Mark::Done;
                path.pop();
                next.pop();
            }
        }
    }
    None
}

/// Balanced tree where every internal node has `branching` children and
/// leaves sit `depth - 1` levels below the root; node `i` is named `n{i}`.
pub fn balanced_tree(branching: usize, depth: usize) -> Result<TaxonomyGraph> {
    let mut names = Vec::new();
    let mut edges = Vec::new();
    if depth > 0 {
        names.push("n0".to_string());
        let mut level = vec![0usize];
        for _ in 1..depth {
            let mut next = Vec::new();
            for &p in &level {
                for _ in 0..branching {
                    let c = names.len();
                    names.push(format!("n{c}"));
                    edges.push((p, c));
                    next.push(c);
                }
            }
            level = next;
        }
    }
    TaxonomyGraph::from_edges(names, edges)
}
