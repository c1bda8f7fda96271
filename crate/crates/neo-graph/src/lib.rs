//! Colored graphs, elimination trees and their triad/sheaf decomposition.
//!
//! An *elimination tree* of a graph is a rooted tree on the vertex set such
//! that every graph edge connects an ancestor-descendant pair. Its *depth*
//! (counted in vertices on a root-to-leaf path) bounds the branching state of
//! the model-checking recursion built on top of it.
//!
//! Every tree node `u` induces a *triad*: the `tail` (ancestors of `u`), the
//! `subtree` (descendants of `u`) and the `sheaf` (the bucket of graph edges
//! charged to `u`'s subtree). Edges are charged to leaves: an edge `ab` with
//! `a` an ancestor of `b` belongs to the sheaf of the leftmost leaf descendant
//! of `b`, and the sheaf of an inner node is the union over the leaves below
//! it. Sibling sheafs therefore partition the parent's sheaf, and the sheaf of
//! the root is the whole edge set.

use std::collections::BTreeMap;
use thiserror::Error;

pub type Vertex = usize;
/// Edge id: index into `Graph::edges`.
pub type EdgeId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph file parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-loop on vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex {0} out of range (n = {1})")]
    VertexRange(Vertex, usize),
    #[error("color {0:?} used on both vertices and edges")]
    MixedColor(String),
    #[error("edge color {color:?} applied to non-edge {u}-{v}")]
    ColorNonEdge { color: String, u: Vertex, v: Vertex },
    #[error("empty graph")]
    EmptyGraph,
    #[error("parent pointers do not form a rooted tree (cycle or missing root)")]
    CyclicParentMap,
    #[error("elimination tree parent map does not cover vertex {0}")]
    MissingVertex(Vertex),
    #[error("edge {0}-{1} joins two tree nodes that are not in ancestor-descendant relation")]
    NonAncestorEdge(Vertex, Vertex),
}

/// Simple undirected graph with vertex and edge color classes.
///
/// Vertices are dense ids `0..n`. A color name is used either on vertices or
/// on edges, never both.
#[derive(Debug, Clone)]
pub struct Graph {
    pub n: usize,
    /// Edges as ordered pairs `(min, max)`, deduplicated.
    pub edges: Vec<(Vertex, Vertex)>,
    /// color name -> sorted vertex list
    pub vertex_colors: BTreeMap<String, Vec<Vertex>>,
    /// color name -> sorted edge-id list
    pub edge_colors: BTreeMap<String, Vec<EdgeId>>,
    /// adjacency: for each vertex, (neighbor, edge id), sorted by neighbor
    pub adj: Vec<Vec<(Vertex, EdgeId)>>,
    edge_index: BTreeMap<(Vertex, Vertex), EdgeId>,
}

impl Graph {
    pub fn new(n: usize, edge_list: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut g = Graph {
            n,
            edges: Vec::new(),
            vertex_colors: BTreeMap::new(),
            edge_colors: BTreeMap::new(),
            adj: vec![Vec::new(); n],
            edge_index: BTreeMap::new(),
        };
        for &(u, v) in edge_list {
            g.add_edge(u, v)?;
        }
        for nb in &mut g.adj {
            nb.sort_unstable();
        }
        Ok(g)
    }

    fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for &w in &[u, v] {
            if w >= self.n {
                return Err(GraphError::VertexRange(w, self.n));
            }
        }
        let key = (u.min(v), u.max(v));
        if self.edge_index.contains_key(&key) {
            return Err(GraphError::DuplicateEdge(key.0, key.1));
        }
        let id = self.edges.len();
        self.edges.push(key);
        self.edge_index.insert(key, id);
        self.adj[u].push((v, id));
        self.adj[v].push((u, id));
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_id(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        self.edge_index.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edge_id(u, v).is_some()
    }

    pub fn add_vertex_color(&mut self, name: &str, vs: &[Vertex]) -> Result<(), GraphError> {
        if self.edge_colors.contains_key(name) {
            return Err(GraphError::MixedColor(name.to_string()));
        }
        for &v in vs {
            if v >= self.n {
                return Err(GraphError::VertexRange(v, self.n));
            }
        }
        let entry = self.vertex_colors.entry(name.to_string()).or_default();
        entry.extend_from_slice(vs);
        entry.sort_unstable();
        entry.dedup();
        Ok(())
    }

    pub fn add_edge_color(&mut self, name: &str, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        if self.vertex_colors.contains_key(name) {
            return Err(GraphError::MixedColor(name.to_string()));
        }
        let id = self.edge_id(u, v).ok_or(GraphError::ColorNonEdge {
            color: name.to_string(),
            u,
            v,
        })?;
        let entry = self.edge_colors.entry(name.to_string()).or_default();
        entry.push(id);
        entry.sort_unstable();
        entry.dedup();
        Ok(())
    }

    /// Parse the text format:
    /// `p <n> <m>`, then `e <u> <v>` per edge, `vc <color> <u...>` per vertex
    /// color and `ec <color> <u> <v>` per colored edge. Blank lines and lines
    /// starting with `#` or `c ` are ignored.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut g: Option<Graph> = None;
        let mut declared_m = 0usize;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') || l.starts_with("c ") {
                continue;
            }
            let toks: Vec<&str> = l.split_whitespace().collect();
            let parse_v = |s: &str| -> Result<Vertex, GraphError> {
                s.parse().map_err(|_| GraphError::Parse {
                    line,
                    msg: format!("bad vertex id {s:?}"),
                })
            };
            match toks[0] {
                "p" => {
                    if toks.len() != 3 {
                        return Err(GraphError::Parse {
                            line,
                            msg: "expected `p <n> <m>`".into(),
                        });
                    }
                    let n = parse_v(toks[1])?;
                    declared_m = parse_v(toks[2])?;
                    g = Some(Graph::new(n, &[])?);
                }
                "e" => {
                    let g = g.as_mut().ok_or(GraphError::Parse {
                        line,
                        msg: "`e` before `p`".into(),
                    })?;
                    if toks.len() != 3 {
                        return Err(GraphError::Parse {
                            line,
                            msg: "expected `e <u> <v>`".into(),
                        });
                    }
                    g.add_edge(parse_v(toks[1])?, parse_v(toks[2])?)?;
                }
                "vc" => {
                    let g = g.as_mut().ok_or(GraphError::Parse {
                        line,
                        msg: "`vc` before `p`".into(),
                    })?;
                    if toks.len() < 2 {
                        return Err(GraphError::Parse {
                            line,
                            msg: "expected `vc <color> <u...>`".into(),
                        });
                    }
                    let vs: Result<Vec<_>, _> = toks[2..].iter().map(|s| parse_v(s)).collect();
                    g.add_vertex_color(toks[1], &vs?)?;
                }
                "ec" => {
                    let g = g.as_mut().ok_or(GraphError::Parse {
                        line,
                        msg: "`ec` before `p`".into(),
                    })?;
                    if toks.len() != 4 {
                        return Err(GraphError::Parse {
                            line,
                            msg: "expected `ec <color> <u> <v>`".into(),
                        });
                    }
                    g.add_edge_color(toks[1], parse_v(toks[2])?, parse_v(toks[3])?)?;
                }
                other => {
                    return Err(GraphError::Parse {
                        line,
                        msg: format!("unknown record {other:?}"),
                    });
                }
            }
        }
        let mut g = g.ok_or(GraphError::Parse {
            line: 0,
            msg: "missing `p` line".into(),
        })?;
        if g.m() != declared_m {
            return Err(GraphError::Parse {
                line: 0,
                msg: format!("declared {} edges, found {}", declared_m, g.m()),
            });
        }
        for nb in &mut g.adj {
            nb.sort_unstable();
        }
        Ok(g)
    }
}

/// Rooted elimination tree on the vertex set of a graph.
#[derive(Debug, Clone)]
pub struct ElimTree {
    /// parent[v] = Some(parent) or None for the root.
    pub parent: Vec<Option<Vertex>>,
    /// Ordered children (fixed left-to-right order; determines sheafs).
    pub children: Vec<Vec<Vertex>>,
    pub root: Vertex,
    /// Number of vertices on the longest root-to-leaf path.
    pub depth: usize,
}

impl ElimTree {
    /// Build from a parent map (`None` marks the root); `order` fixes the
    /// left-to-right child order (vertices earlier in `order` come first).
    pub fn from_parents(parent: Vec<Option<Vertex>>, order: &[Vertex]) -> Result<Self, GraphError> {
        let n = parent.len();
        let mut root = None;
        for (v, p) in parent.iter().enumerate() {
            match p {
                None => {
                    if root.replace(v).is_some() {
                        return Err(GraphError::CyclicParentMap);
                    }
                }
                Some(p) => {
                    if *p >= n {
                        return Err(GraphError::VertexRange(*p, n));
                    }
                }
            }
        }
        let root = root.ok_or(GraphError::CyclicParentMap)?;
        let mut children = vec![Vec::new(); n];
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            if v < n && pos[v] == usize::MAX {
                pos[v] = i;
            }
        }
        let mut by_pos: Vec<Vertex> = (0..n).collect();
        by_pos.sort_by_key(|&v| (pos[v], v));
        for &v in &by_pos {
            if let Some(p) = parent[v] {
                children[p].push(v);
            }
        }
        // Depth check doubles as a cycle/reachability check.
        let mut depth = vec![0usize; n];
        let mut stack = vec![(root, 1usize)];
        let mut seen = 0usize;
        let mut max_depth = 0usize;
        while let Some((v, d)) = stack.pop() {
            if depth[v] != 0 {
                return Err(GraphError::CyclicParentMap);
            }
            depth[v] = d;
            seen += 1;
            max_depth = max_depth.max(d);
            for &c in &children[v] {
                stack.push((c, d + 1));
            }
        }
        if seen != n {
            return Err(GraphError::CyclicParentMap);
        }
        Ok(ElimTree {
            parent,
            children,
            root,
            depth: max_depth,
        })
    }

    /// Parse the text format: one line `t <v> <parent|-1>` per vertex.
    /// Child order is file order.
    pub fn parse(text: &str, n: usize) -> Result<Self, GraphError> {
        let mut parent: Vec<Option<Option<Vertex>>> = vec![None; n];
        let mut order = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') || l.starts_with("c ") {
                continue;
            }
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 3 || toks[0] != "t" {
                return Err(GraphError::Parse {
                    line,
                    msg: "expected `t <v> <parent|-1>`".into(),
                });
            }
            let v: Vertex = toks[1].parse().map_err(|_| GraphError::Parse {
                line,
                msg: format!("bad vertex {:?}", toks[1]),
            })?;
            if v >= n {
                return Err(GraphError::VertexRange(v, n));
            }
            let p = if toks[2] == "-1" {
                None
            } else {
                let p: Vertex = toks[2].parse().map_err(|_| GraphError::Parse {
                    line,
                    msg: format!("bad parent {:?}", toks[2]),
                })?;
                if p >= n {
                    return Err(GraphError::VertexRange(p, n));
                }
                Some(p)
            };
            parent[v] = Some(p);
            order.push(v);
        }
        let parent: Result<Vec<_>, _> = parent
            .into_iter()
            .enumerate()
            .map(|(v, p)| p.ok_or(GraphError::MissingVertex(v)))
            .collect();
        ElimTree::from_parents(parent?, &order)
    }

    pub fn is_leaf(&self, v: Vertex) -> bool {
        self.children[v].is_empty()
    }

    /// Ancestors of `v` from the root down to and including `v`.
    pub fn tail_closed(&self, v: Vertex) -> Vec<Vertex> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Descendants of `v`, including `v`, in preorder.
    pub fn subtree_closed(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            out.push(u);
            for &c in self.children[u].iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    pub fn is_ancestor(&self, a: Vertex, mut b: Vertex) -> bool {
        loop {
            if a == b {
                return true;
            }
            match self.parent[b] {
                Some(p) => b = p,
                None => return false,
            }
        }
    }
}

/// Check that `t` is a rooted spanning tree and every graph edge joins an
/// ancestor-descendant pair. Reports the first violating edge.
pub fn validate_elimination_tree(g: &Graph, t: &ElimTree) -> Result<(), GraphError> {
    if t.parent.len() != g.n {
        return Err(GraphError::MissingVertex(t.parent.len().min(g.n)));
    }
    for &(u, v) in &g.edges {
        if !(t.is_ancestor(u, v) || t.is_ancestor(v, u)) {
            return Err(GraphError::NonAncestorEdge(u, v));
        }
    }
    Ok(())
}

/// Build an elimination tree by depth-first search. DFS trees of graphs are
/// always valid elimination trees (non-tree edges go to ancestors). For a
/// disconnected graph the DFS roots of the later components are attached
/// below the first component's root.
///
/// The search is run from every possible start vertex and the shallowest
/// resulting tree is kept (ties broken by smaller start id) so that the
/// heuristic is deterministic and reasonably tight on small graphs.
pub fn build_dfs_elimination_tree(g: &Graph) -> Result<ElimTree, GraphError> {
    if g.n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let mut best: Option<ElimTree> = None;
    for start in 0..g.n {
        let t = dfs_tree_from(g, start);
        if best.as_ref().map_or(true, |b| t.depth < b.depth) {
            best = Some(t);
        }
    }
    Ok(best.unwrap())
}

fn dfs_tree_from(g: &Graph, start: Vertex) -> ElimTree {
    let n = g.n;
    let mut parent: Vec<Option<Vertex>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    let dfs = |root: Vertex, parent: &mut Vec<Option<Vertex>>, visited: &mut Vec<bool>, order: &mut Vec<Vertex>| {
        let mut stack = vec![root];
        visited[root] = true;
        order.push(root);
        while let Some(v) = stack.pop() {
            for &(w, _) in &g.adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = Some(v);
                    order.push(w);
                    stack.push(v);
                    stack.push(w);
                    break;
                }
            }
        }
    };

    dfs(start, &mut parent, &mut visited, &mut order);
    // Attach the remaining components' DFS roots below the first root.
    for v in 0..n {
        if !visited[v] {
            parent[v] = Some(start);
            dfs(v, &mut parent, &mut visited, &mut order);
        }
    }
    ElimTree::from_parents(parent, &order).expect("DFS construction yields a tree")
}

/// A triad: the recursion frame of a tree node — active ancestors (`tail`),
/// processed descendants (`subtree`) and processed edges (`sheaf`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triad {
    pub tail: Vec<Vertex>,
    pub subtree: Vec<Vertex>,
    pub sheaf: Vec<EdgeId>,
}

/// Sheaf buckets for every node, precomputed once per (graph, tree).
#[derive(Debug, Clone)]
pub struct Sheafs {
    /// per node: sorted edge-id bucket
    pub by_node: Vec<Vec<EdgeId>>,
}

impl Sheafs {
    pub fn build(g: &Graph, t: &ElimTree) -> Self {
        let n = g.n;
        // leftmost leaf descendant of each node
        let mut leftmost = vec![0 as Vertex; n];
        // compute in reverse preorder so children are done before parents
        let pre = t.subtree_closed(t.root);
        for &v in pre.iter().rev() {
            leftmost[v] = if t.is_leaf(v) {
                v
            } else {
                leftmost[t.children[v][0]]
            };
        }
        let mut by_node = vec![Vec::new(); n];
        for (id, &(u, v)) in g.edges.iter().enumerate() {
            // the deeper endpoint determines the owning leaf
            let lower = if t.is_ancestor(u, v) { v } else { u };
            by_node[leftmost[lower]].push(id);
        }
        // propagate leaf buckets up: sheaf(u) = union over leaves below u
        for &v in pre.iter().rev() {
            if !t.is_leaf(v) {
                let mut acc = Vec::new();
                for &c in &t.children[v] {
                    acc.extend_from_slice(&by_node[c]);
                }
                by_node[v] = acc;
            }
        }
        for b in &mut by_node {
            b.sort_unstable();
        }
        Sheafs { by_node }
    }
}

pub fn sheaf_of_node(g: &Graph, t: &ElimTree, u: Vertex) -> Vec<EdgeId> {
    Sheafs::build(g, t).by_node[u].clone()
}

/// Closed triad of `u`: tail includes `u`, subtree excludes it.
pub fn triad_closed(t: &ElimTree, sheafs: &Sheafs, u: Vertex) -> Triad {
    let tail = t.tail_closed(u);
    let mut subtree = t.subtree_closed(u);
    subtree.retain(|&v| v != u);
    Triad {
        tail,
        subtree,
        sheaf: sheafs.by_node[u].clone(),
    }
}

/// Open triad of `u`: tail excludes `u`, subtree includes it.
pub fn triad_open(t: &ElimTree, sheafs: &Sheafs, u: Vertex) -> Triad {
    let mut tail = t.tail_closed(u);
    tail.pop();
    Triad {
        tail,
        subtree: t.subtree_closed(u),
        sheaf: sheafs.by_node[u].clone(),
    }
}
