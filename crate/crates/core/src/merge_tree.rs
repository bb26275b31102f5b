//! Join and split trees of regular-grid scalar fields.
//!
//! Vertices are swept in a total order: by scalar value (increasing for join
//! trees, decreasing for split trees), ties broken by the lower vertex index.
//! Every comparison between nodes goes through that order, so plateaus behave
//! like a symbolically perturbed field.
//!
//! Each arc carries an optional *junction* value: the scalar value at which
//! the child's component actually joins its parent. It equals the parent's
//! value unless saddles were merged, in which case branches keep the death
//! value of the saddle they originally died at.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::diagram::{BirthDeathPoint, PersistenceDiagram};
use crate::grid::ScalarFieldGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Join,
    Split,
}

impl TreeKind {
    /// Sweep order between two `(value, vertex)` keys.
    pub fn cmp_keys(self, a: (f64, usize), b: (f64, usize)) -> Ordering {
        let by_value = match self {
            TreeKind::Join => a.0.total_cmp(&b.0),
            TreeKind::Split => b.0.total_cmp(&a.0),
        };
        by_value.then(a.1.cmp(&b.1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeRole {
    Leaf,
    Saddle,
    Root,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MtNode {
    pub vertex: usize,
    pub value: f64,
    pub parent: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub junction: Option<f64>,
    pub role: NodeRole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeTree {
    pub kind: TreeKind,
    pub nodes: Vec<MtNode>,
}

/// One Elder-rule pair expressed on tree nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct NodePair {
    /// Leaf where the component is born.
    pub leaf: usize,
    /// Scalar value where it dies.
    pub death_value: f64,
    /// Child of the death node through which the component arrives, `None`
    /// for the global pair.
    pub via: Option<usize>,
    /// Index (into the returned pair list) of the branch it dies into.
    pub parent: Option<usize>,
    pub depth: usize,
}

impl MergeTree {
    pub(crate) fn from_nodes(kind: TreeKind, nodes: Vec<MtNode>) -> Self {
        let mut tree = Self { kind, nodes };
        tree.assign_roles();
        tree
    }

    pub fn root(&self) -> usize {
        self.nodes
            .iter()
            .position(|n| n.parent.is_none())
            .expect("merge tree has a root")
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if let Some(p) = n.parent {
                children[p].push(i);
            }
        }
        children
    }

    fn key(&self, i: usize) -> (f64, usize) {
        (self.nodes[i].value, self.nodes[i].vertex)
    }

    fn cmp_nodes(&self, a: usize, b: usize) -> Ordering {
        self.kind.cmp_keys(self.key(a), self.key(b))
    }

    /// Value at which node `i` joins its parent.
    pub fn junction_value(&self, i: usize) -> Option<f64> {
        let n = &self.nodes[i];
        n.parent.map(|p| n.junction.unwrap_or(self.nodes[p].value))
    }

    fn assign_roles(&mut self) {
        let mut n_children = vec![0usize; self.nodes.len()];
        for n in &self.nodes {
            if let Some(p) = n.parent {
                n_children[p] += 1;
            }
        }
        for (n, &c) in self.nodes.iter_mut().zip(&n_children) {
            n.role = if n.parent.is_none() {
                NodeRole::Root
            } else if c == 0 {
                NodeRole::Leaf
            } else {
                NodeRole::Saddle
            };
        }
    }

    /// Post-order (children before parents) starting at the root.
    fn post_order(&self, children: &[Vec<usize>]) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root(), false)];
        while let Some((n, expanded)) = stack.pop() {
            if expanded {
                out.push(n);
            } else {
                stack.push((n, true));
                for &c in children[n].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Oldest leaf of every node's subtree.
    fn oldest_leaves(&self, children: &[Vec<usize>]) -> Vec<usize> {
        let mut oldest: Vec<usize> = (0..self.nodes.len()).collect();
        for n in self.post_order(children) {
            if let Some(o) = children[n]
                .iter()
                .map(|&c| oldest[c])
                .min_by(|&a, &b| self.cmp_nodes(a, b))
            {
                oldest[n] = o;
            }
        }
        oldest
    }

    /// Elder-rule pairing. The first pair is the global one.
    pub(crate) fn node_pairs(&self) -> Vec<NodePair> {
        let children = self.children();
        let oldest = self.oldest_leaves(&children);
        let root = self.root();

        let mut pairs = vec![NodePair {
            leaf: oldest[root],
            death_value: self.nodes[root].value,
            via: None,
            parent: None,
            depth: 0,
        }];
        // Branch (pair index) that a given oldest leaf labels.
        let mut branch_of_leaf = vec![usize::MAX; self.nodes.len()];
        branch_of_leaf[oldest[root]] = 0;

        // Pre-order so that parent branches are registered first.
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            let elder = oldest[n];
            let parent_branch = branch_of_leaf[elder];
            for &c in &children[n] {
                if oldest[c] != elder {
                    let depth = pairs[parent_branch].depth + 1;
                    branch_of_leaf[oldest[c]] = pairs.len();
                    pairs.push(NodePair {
                        leaf: oldest[c],
                        death_value: self.junction_value(c).expect("child has parent"),
                        via: Some(c),
                        parent: Some(parent_branch),
                        depth,
                    });
                }
            }
            for &c in children[n].iter().rev() {
                stack.push(c);
            }
        }
        pairs
    }

    pub(crate) fn pair_point(&self, p: &NodePair) -> BirthDeathPoint {
        let leaf = self.nodes[p.leaf].value;
        BirthDeathPoint::new(leaf.min(p.death_value), leaf.max(p.death_value))
    }

    /// Global range covered by the tree (persistence of the global pair).
    pub fn range(&self) -> f64 {
        let pairs = self.node_pairs();
        self.pair_point(&pairs[0]).persistence()
    }

    /// Elder-rule persistence pairs: each leaf is paired with the node where
    /// its component merges into an older one; the oldest leaf pairs with the
    /// root.
    pub fn extract_pairs(&self) -> PersistenceDiagram {
        let pairs = self.node_pairs();
        PersistenceDiagram::new(pairs.iter().map(|p| self.pair_point(p)).collect())
    }

    /// Removes every non-global pair whose persistence is below
    /// `threshold * range`, contracting the saddles that become regular.
    pub fn simplify(&self, threshold: f64) -> MergeTree {
        let limit = threshold * self.range();
        let mut tree = self.clone();
        loop {
            let pairs = tree.node_pairs();
            let doomed: Vec<usize> = pairs
                .iter()
                .filter(|p| p.via.is_some() && tree.pair_point(p).persistence() < limit)
                .filter_map(|p| p.via)
                .collect();
            if doomed.is_empty() {
                return tree;
            }
            let children = tree.children();
            let mut removed = vec![false; tree.nodes.len()];
            for v in doomed {
                let mut stack = vec![v];
                while let Some(n) = stack.pop() {
                    if !removed[n] {
                        removed[n] = true;
                        stack.extend(&children[n]);
                    }
                }
            }
            tree = tree.without(&removed).contract_regular();
        }
    }

    /// Merges adjacent merge nodes whose values differ by less than
    /// `eps1 * range`. Branches keep their original death values; only the
    /// nesting structure changes. `eps1 >= 1` merges every merge node into
    /// its topmost ancestor merge node.
    pub fn merge_saddles(&self, eps1: f64) -> MergeTree {
        let range = self.range();
        let mut tree = self.clone();
        let children = tree.children();
        let oldest = tree.oldest_leaves(&children);
        let mut n_children: Vec<usize> = children.iter().map(Vec::len).collect();
        let mut kids = children;

        let mut order: Vec<usize> = (0..tree.nodes.len()).collect();
        order.sort_by(|&a, &b| tree.cmp_nodes(a, b));

        let mut removed = vec![false; tree.nodes.len()];
        for s in order {
            let Some(p) = tree.nodes[s].parent else { continue };
            if n_children[s] < 2 || n_children[p] < 2 {
                continue;
            }
            let diff = (tree.nodes[s].value - tree.nodes[p].value).abs();
            if !(eps1 >= 1.0 || diff < eps1 * range) {
                continue;
            }
            let s_junction = tree.nodes[s].junction;
            let s_value = tree.nodes[s].value;
            let moved = std::mem::take(&mut kids[s]);
            for &c in &moved {
                let node = &mut tree.nodes[c];
                node.junction = if oldest[c] == oldest[s] {
                    s_junction
                } else {
                    Some(node.junction.unwrap_or(s_value))
                };
                node.parent = Some(p);
            }
            kids[p].retain(|&c| c != s);
            n_children[p] += moved.len() - 1;
            kids[p].extend(moved);
            removed[s] = true;
        }
        tree.without(&removed)
    }

    /// Drops flagged nodes and reindexes; surviving parents must survive.
    fn without(&self, removed: &[bool]) -> MergeTree {
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if !removed[i] {
                remap[i] = nodes.len();
                nodes.push(n.clone());
            }
        }
        for n in &mut nodes {
            n.parent = n.parent.map(|p| remap[p]);
            debug_assert!(n.parent != Some(usize::MAX));
        }
        MergeTree::from_nodes(self.kind, nodes)
    }

    /// Removes non-root nodes with exactly one child.
    fn contract_regular(&self) -> MergeTree {
        let children = self.children();
        let contracted: Vec<bool> = self
            .nodes
            .iter()
            .zip(&children)
            .map(|(n, c)| c.len() == 1 && n.parent.is_some())
            .collect();
        let mut tree = self.clone();
        for i in 0..tree.nodes.len() {
            if contracted[i] {
                continue;
            }
            // A survivor continues along the arc of its topmost contracted
            // ancestor.
            let mut target = self.nodes[i].parent;
            let mut junction = self.nodes[i].junction;
            while let Some(t) = target.filter(|&t| contracted[t]) {
                junction = self.nodes[t].junction;
                target = self.nodes[t].parent;
            }
            tree.nodes[i].parent = target;
            tree.nodes[i].junction = junction;
        }
        tree.without(&contracted)
    }
}

/// Union-find with path halving; `comp_*` data lives at component roots.
struct Components {
    parent: Vec<usize>,
}

impl Components {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }
}

/// Sweeps the vertices in sweep order, creating leaves at component births,
/// merge nodes where components meet, and a root at the last vertex.
pub fn compute_merge_tree(field: &ScalarFieldGrid, kind: TreeKind) -> MergeTree {
    let n = field.len();
    assert!(n > 0, "scalar field must be non-empty");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| kind.cmp_keys((field.values[a], a), (field.values[b], b)));
    let mut rank = vec![0usize; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }

    let mut uf = Components::new(n);
    let mut processed = vec![false; n];
    // Per component root: oldest vertex (by rank) and current lowest tree node.
    let mut oldest = vec![usize::MAX; n];
    let mut current = vec![usize::MAX; n];
    let mut nodes: Vec<MtNode> = Vec::new();
    let mut node_of_vertex = vec![usize::MAX; n];

    let new_node = |nodes: &mut Vec<MtNode>, v: usize| {
        nodes.push(MtNode {
            vertex: v,
            value: field.values[v],
            parent: None,
            junction: None,
            role: NodeRole::Leaf,
        });
        nodes.len() - 1
    };

    for &v in &order {
        let mut roots: Vec<usize> = field
            .neighbors(v)
            .filter(|&u| processed[u])
            .map(|u| uf.find(u))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        match roots.len() {
            0 => {
                let id = new_node(&mut nodes, v);
                node_of_vertex[v] = id;
                oldest[v] = v;
                current[v] = id;
            }
            1 => {
                let r = roots[0];
                uf.parent[v] = r;
            }
            _ => {
                let id = new_node(&mut nodes, v);
                node_of_vertex[v] = id;
                let elder = roots
                    .iter()
                    .map(|&r| oldest[r])
                    .min_by_key(|&o| rank[o])
                    .expect("non-empty");
                for &r in &roots {
                    nodes[current[r]].parent = Some(id);
                    uf.parent[r] = v;
                }
                oldest[v] = elder;
                current[v] = id;
            }
        }
        processed[v] = true;
    }

    let last = *order.last().expect("non-empty");
    if node_of_vertex[last] == usize::MAX {
        let r = uf.find(last);
        let id = new_node(&mut nodes, last);
        nodes[current[r]].parent = Some(id);
    }
    MergeTree::from_nodes(kind, nodes)
}
