//! Coupling graphs, cut vertices, BFS routing and Steiner trees.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::circuit::CnotCircuit;
use crate::error::{Error, Result};

const IBMQ20: &str = include_str!("../data/ibmq20.edges");
const T20: &str = include_str!("../data/t20.edges");
const ATHENS5: &str = include_str!("../data/athens5.edges");
const YORKTOWN5: &str = include_str!("../data/yorktown5.edges");

/// Undirected simple graph with sorted adjacency and an active mask.
/// Deactivated vertices are invisible to every query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyGraph {
    adj: Vec<Vec<usize>>,
    active: Vec<bool>,
    num_active: usize,
}

impl TopologyGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("duplicate edge at vertex {u}")));
            }
        }
        Ok(TopologyGraph { adj, active: vec![true; n], num_active: n })
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    /// All neighbours, active or not.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn active_degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&w| self.active[w]).count()
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_active(&self, v: usize) -> bool {
        self.active[v]
    }

    pub fn num_active(&self) -> usize {
        self.num_active
    }

    pub fn active_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.adj.len()).filter(|&v| self.active[v])
    }

    pub fn deactivate(&mut self, v: usize) {
        if std::mem::replace(&mut self.active[v], false) {
            self.num_active -= 1;
        }
    }

    pub fn activate_all(&mut self) {
        self.active.iter_mut().for_each(|a| *a = true);
        self.num_active = self.adj.len();
    }

    pub fn is_connected(&self) -> bool {
        let Some(start) = self.active_vertices().next() else {
            return true;
        };
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![start];
        seen[start] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if self.active[w] && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.num_active
    }

    /// Articulation points of the active subgraph (iterative low-link DFS).
    pub fn cut_vertices(&self) -> Vec<bool> {
        let n = self.adj.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut cut = vec![false; n];
        let mut time = 0;
        for root in 0..n {
            if !self.active[root] || disc[root] != usize::MAX {
                continue;
            }
            disc[root] = time;
            low[root] = time;
            time += 1;
            let mut root_children = 0;
            // (vertex, parent, next neighbour position)
            let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
            while let Some(top) = stack.last_mut() {
                let (u, parent) = (top.0, top.1);
                if let Some(&w) = self.adj[u].get(top.2) {
                    top.2 += 1;
                    if !self.active[w] || w == parent {
                        continue;
                    }
                    if disc[w] == usize::MAX {
                        disc[w] = time;
                        low[w] = time;
                        time += 1;
                        if u == root {
                            root_children += 1;
                        }
                        stack.push((w, u, 0));
                    } else {
                        low[u] = low[u].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if parent != usize::MAX {
                        low[parent] = low[parent].min(low[u]);
                        if parent != root && low[u] >= disc[parent] {
                            cut[parent] = true;
                        }
                    }
                }
            }
            cut[root] = root_children > 1;
        }
        cut
    }

    /// Lowest-index active vertex that is not an articulation point.
    pub fn find_non_cut_vertex(&self) -> Result<usize> {
        let cut = self.cut_vertices();
        self.active_vertices().find(|&v| !cut[v]).ok_or(Error::EmptyGraph)
    }

    /// BFS from `src` over active vertices; stops once every vertex flagged in
    /// `want` has been reached. Returns the parent array (`usize::MAX` = unseen,
    /// `src` is its own parent) and the distance array.
    fn bfs(&self, src: usize, want: Option<(&[bool], usize)>) -> (Vec<usize>, Vec<usize>) {
        let n = self.adj.len();
        let mut parent = vec![usize::MAX; n];
        let mut dist = vec![usize::MAX; n];
        parent[src] = src;
        dist[src] = 0;
        let mut remaining = match want {
            Some((flags, count)) => count - usize::from(flags[src]),
            None => usize::MAX,
        };
        let mut queue = std::collections::VecDeque::from([src]);
        'outer: while let Some(u) = queue.pop_front() {
            if remaining == 0 {
                break;
            }
            for &w in &self.adj[u] {
                if self.active[w] && parent[w] == usize::MAX {
                    parent[w] = u;
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                    if let Some((flags, _)) = want {
                        if flags[w] {
                            remaining -= 1;
                            if remaining == 0 {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        (parent, dist)
    }

    pub fn distances_from(&self, src: usize) -> Vec<usize> {
        self.bfs(src, None).1
    }

    /// Fewest-edge path from `u` to `v`; earlier-discovered (lower index)
    /// neighbours win ties.
    pub fn shortest_path(&self, u: usize, v: usize) -> Result<Vec<usize>> {
        let n = self.adj.len();
        if u >= n || v >= n {
            return Err(Error::IndexOutOfRange { index: u.max(v), n });
        }
        if !self.active[u] || !self.active[v] {
            return Err(Error::Disconnected(u, v));
        }
        let mut flags = vec![false; n];
        flags[v] = true;
        let (parent, _) = self.bfs(u, Some((&flags, 1)));
        path_from_parents(&parent, u, v).ok_or(Error::Disconnected(u, v))
    }

    /// Metric-closure 2-approximation, rooted at `terminals[0]`.
    pub fn steiner_tree_2approx(&self, terminals: &[usize]) -> Result<SteinerTree> {
        let n = self.adj.len();
        let Some(&root) = terminals.first() else {
            return Err(Error::InvalidGraph("empty terminal set".into()));
        };
        let mut terms: Vec<usize> = Vec::with_capacity(terminals.len());
        let mut flags = vec![false; n];
        for &t in terminals {
            if t >= n {
                return Err(Error::IndexOutOfRange { index: t, n });
            }
            if !self.active[t] {
                return Err(Error::Disconnected(root, t));
            }
            if !flags[t] {
                flags[t] = true;
                terms.push(t);
            }
        }
        let k = terms.len();
        if k == 1 {
            return Ok(SteinerTree::from_tree(RootedTree::single(root), terms));
        }

        let searches: Vec<(Vec<usize>, Vec<usize>)> =
            terms.iter().map(|&t| self.bfs(t, Some((&flags, k)))).collect();
        for (a, (_, dist)) in searches.iter().enumerate() {
            for &b in &terms {
                if dist[b] == usize::MAX {
                    return Err(Error::Disconnected(terms[a], b));
                }
            }
        }

        // Prim over terminal indices; ties go to the lower terminal position.
        let mut in_tree = vec![false; k];
        let mut best = vec![(usize::MAX, 0usize); k];
        in_tree[0] = true;
        for b in 1..k {
            best[b] = (searches[0].1[terms[b]], 0);
        }
        let mut union_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for _ in 1..k {
            let b = (0..k)
                .filter(|&b| !in_tree[b])
                .min_by_key(|&b| (best[b].0, b))
                .expect("terminal left");
            in_tree[b] = true;
            let a = best[b].1;
            let path = path_from_parents(&searches[a].0, terms[a], terms[b]).expect("reachable");
            for w in path.windows(2) {
                union_edges.insert((w[0].min(w[1]), w[0].max(w[1])));
            }
            for c in 0..k {
                if !in_tree[c] {
                    let d = searches[b].1[terms[c]];
                    if d < best[c].0 {
                        best[c] = (d, b);
                    }
                }
            }
        }

        // Spanning tree of the union by BFS from the root, then prune.
        let mut sub: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(a, b) in &union_edges {
            sub.entry(a).or_default().push(b);
            sub.entry(b).or_default().push(a);
        }
        for list in sub.values_mut() {
            list.sort_unstable();
        }
        let mut parent: HashMap<usize, usize> = HashMap::new();
        let mut order = vec![root];
        parent.insert(root, root);
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &w in &sub[&u] {
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(w) {
                    e.insert(u);
                    order.push(w);
                }
            }
        }
        let mut child_count: HashMap<usize, usize> = HashMap::new();
        for &v in &order[1..] {
            *child_count.entry(parent[&v]).or_default() += 1;
        }
        let mut removed: BTreeSet<usize> = BTreeSet::new();
        for &v in order.iter().rev() {
            let mut x = v;
            while x != root
                && !flags[x]
                && !removed.contains(&x)
                && child_count.get(&x).copied().unwrap_or(0) == 0
            {
                removed.insert(x);
                let p = parent[&x];
                *child_count.get_mut(&p).expect("parent has children") -= 1;
                x = p;
            }
        }
        let edges: Vec<(usize, usize)> = order[1..]
            .iter()
            .filter(|v| !removed.contains(v))
            .map(|&v| (v, parent[&v]))
            .collect();
        Ok(SteinerTree::from_tree(RootedTree::from_parent_edges(root, &edges), terms))
    }

    /// Whether every gate acts on an edge.
    pub fn validate_circuit(&self, c: &CnotCircuit) -> Result<bool> {
        if c.num_qubits() != self.num_vertices() {
            return Err(Error::DimensionMismatch { expected: self.num_vertices(), found: c.num_qubits() });
        }
        Ok(c.gates().iter().all(|g| self.has_edge(g.control, g.target)))
    }

    pub fn to_edge_list(&self) -> String {
        self.to_string()
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Self::from_edges(n, &edges)
    }

    /// Grid with row-major numbering (last coordinate fastest).
    pub fn grid(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidGraph(format!("bad grid dimensions {dims:?}")));
        }
        let n: usize = dims.iter().product();
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len() - 1).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let mut edges = Vec::new();
        for v in 0..n {
            for (k, &stride) in strides.iter().enumerate() {
                if (v / stride) % dims[k] + 1 < dims[k] {
                    edges.push((v, v + stride));
                }
            }
        }
        Self::from_edges(n, &edges)
    }

    /// `path(n)`, `grid(a,b,..)`, `complete(n)`, `ibmq20`, `t20`, `athens5`,
    /// `yorktown5`. A leading `preset:` is ignored.
    pub fn preset(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let spec = spec.strip_prefix("preset:").unwrap_or(spec);
        let unknown = || Error::UnknownPreset(spec.to_string());
        match spec {
            "ibmq20" => return IBMQ20.parse(),
            "t20" => return T20.parse(),
            "athens5" => return ATHENS5.parse(),
            "yorktown5" => return YORKTOWN5.parse(),
            _ => {}
        }
        let (name, args) = spec.split_once('(').ok_or_else(unknown)?;
        let args = args.strip_suffix(')').ok_or_else(unknown)?;
        let nums: Vec<usize> = args
            .split(',')
            .map(|a| a.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidGraph(format!("bad parameters in '{spec}'")))?;
        match (name, nums.as_slice()) {
            ("path", &[n]) if n >= 1 => Self::path(n),
            ("complete", &[n]) if n >= 1 => Self::complete(n),
            ("grid", dims) => Self::grid(dims),
            ("path" | "complete", _) => Err(Error::InvalidGraph(format!("bad parameters in '{spec}'"))),
            _ => Err(unknown()),
        }
    }
}

fn path_from_parents(parent: &[usize], src: usize, dst: usize) -> Option<Vec<usize>> {
    if parent[dst] == usize::MAX {
        return None;
    }
    let mut path = vec![dst];
    let mut x = dst;
    while x != src {
        x = parent[x];
        path.push(x);
    }
    path.reverse();
    Some(path)
}

impl fmt::Display for TopologyGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges = self.edges();
        writeln!(f, "{} {}", self.num_vertices(), edges.len())?;
        for (u, v) in edges {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

impl FromStr for TopologyGraph {
    type Err = Error;

    /// Edge list: "n m" then m lines "u v". Lines starting with '#' are skipped.
    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let pair = |ln: usize, l: &str| -> Result<(usize, usize)> {
            let mut it = l.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
                _ => Err(Error::Parse { line: ln, msg: format!("expected two integers, got '{l}'") }),
            }
        };
        let (ln, head) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let (n, m) = pair(ln, head)?;
        let edges: Vec<(usize, usize)> = lines.map(|(ln, l)| pair(ln, l)).collect::<Result<_>>()?;
        if edges.len() != m {
            return Err(Error::Parse { line: 0, msg: format!("declared {m} edges, found {}", edges.len()) });
        }
        Self::from_edges(n, &edges)
    }
}

/// Tree over graph vertices with ordered children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    root: usize,
    parent: HashMap<usize, usize>,
    children: HashMap<usize, Vec<usize>>,
    preorder: Vec<usize>,
}

impl RootedTree {
    pub fn single(root: usize) -> Self {
        RootedTree { root, parent: HashMap::new(), children: HashMap::new(), preorder: vec![root] }
    }

    /// `edges` are (child, parent) pairs; children are visited in ascending order.
    pub fn from_parent_edges(root: usize, edges: &[(usize, usize)]) -> Self {
        let mut parent = HashMap::with_capacity(edges.len());
        let mut children: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(c, p) in edges {
            let prev = parent.insert(c, p);
            assert!(prev.is_none() && c != root, "vertex {c} has two parents");
            children.entry(p).or_default().push(c);
        }
        for list in children.values_mut() {
            list.sort_unstable();
        }
        let mut preorder = Vec::with_capacity(edges.len() + 1);
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            preorder.push(u);
            if let Some(ch) = children.get(&u) {
                stack.extend(ch.iter().rev());
            }
        }
        assert_eq!(preorder.len(), edges.len() + 1, "edges do not form a tree under the root");
        RootedTree { root, parent, children, preorder }
    }

    /// Like [`RootedTree::from_parent_edges`], but keeps the given child order
    /// and uses `order` (parents before children) as the traversal order.
    pub fn from_ordered(root: usize, order: &[(usize, usize)]) -> Self {
        let mut parent = HashMap::with_capacity(order.len());
        let mut children: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut preorder = vec![root];
        for &(c, p) in order {
            assert!(p == root || parent.contains_key(&p), "parent {p} listed after child {c}");
            let prev = parent.insert(c, p);
            assert!(prev.is_none() && c != root, "vertex {c} has two parents");
            children.entry(p).or_default().push(c);
            preorder.push(c);
        }
        RootedTree { root, parent, children, preorder }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.preorder.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: usize) -> bool {
        v == self.root || self.parent.contains_key(&v)
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent.get(&v).copied()
    }

    pub fn children(&self, v: usize) -> &[usize] {
        self.children.get(&v).map_or(&[], Vec::as_slice)
    }

    /// Parents strictly before children.
    pub fn preorder(&self) -> &[usize] {
        &self.preorder
    }

    /// Children (ascending) before parents, depth-first.
    pub fn postorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.preorder.len());
        let mut stack: Vec<(usize, usize)> = vec![(self.root, 0)];
        while let Some(top) = stack.last_mut() {
            let u = top.0;
            let ch = self.children(u);
            if top.1 < ch.len() {
                let c = ch[top.1];
                top.1 += 1;
                stack.push((c, 0));
            } else {
                out.push(u);
                stack.pop();
            }
        }
        out
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.preorder[1..].iter().map(|&c| (c, self.parent[&c]))
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        self.preorder.iter().copied().filter(|&v| self.children(v).is_empty())
    }
}

/// Rooted tree plus the terminals it must cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerTree {
    pub tree: RootedTree,
    pub terminals: Vec<usize>,
}

impl SteinerTree {
    fn from_tree(tree: RootedTree, terminals: Vec<usize>) -> Self {
        SteinerTree { tree, terminals }
    }

    pub fn root(&self) -> usize {
        self.tree.root()
    }

    pub fn node_count(&self) -> usize {
        self.tree.len()
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.terminals.contains(&v)
    }
}
