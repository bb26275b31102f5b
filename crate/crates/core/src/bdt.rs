//! Branch decomposition trees.
//!
//! Branches are stored in decreasing persistence order (ties: shallower
//! first), which keeps every parent at a lower index than its children. All
//! routines here rely on that.

use serde::{Deserialize, Serialize};

use crate::diagram::{BirthDeathPoint, PersistenceDiagram};
use crate::error::{Error, Result};
use crate::merge_tree::{MergeTree, MtNode, NodeRole, TreeKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub birth: f64,
    pub death: f64,
    pub parent: Option<usize>,
}

impl Branch {
    pub fn point(&self) -> BirthDeathPoint {
        BirthDeathPoint::new(self.birth, self.death)
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Bdt {
    pub branches: Vec<Branch>,
    #[serde(default)]
    pub normalized: bool,
    /// Interval of the root before normalization.
    #[serde(default)]
    pub root_interval: [f64; 2],
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        1.0
    } else {
        a / b
    }
}

impl Bdt {
    /// Builds an unnormalized tree from branches already in storage order.
    pub fn from_branches(branches: Vec<Branch>) -> Result<Self> {
        let root = branches
            .first()
            .ok_or_else(|| Error::InvalidBdt("no branches".into()))?;
        let bdt = Self {
            root_interval: [root.birth, root.death],
            branches,
            normalized: false,
        };
        bdt.check_structure()?;
        Ok(bdt)
    }

    /// Normalized tree with root `(0,1)` and the given non-root branches.
    pub fn normalized_from(children: Vec<Branch>, root_interval: [f64; 2]) -> Result<Self> {
        let mut branches = vec![Branch {
            birth: 0.0,
            death: 1.0,
            parent: None,
        }];
        branches.extend(children);
        let bdt = Self {
            branches,
            normalized: true,
            root_interval,
        };
        bdt.check_structure()?;
        Ok(bdt)
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn points(&self) -> Vec<BirthDeathPoint> {
        self.branches.iter().map(Branch::point).collect()
    }

    /// The branch set viewed as a persistence diagram.
    pub fn diagram(&self) -> PersistenceDiagram {
        PersistenceDiagram::new(self.points())
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.branches.len()];
        for (i, b) in self.branches.iter().enumerate() {
            if let Some(p) = b.parent {
                children[p].push(i);
            }
        }
        children
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.branches.len()];
        for (i, b) in self.branches.iter().enumerate() {
            if let Some(p) = b.parent {
                depth[i] = depth[p] + 1;
            }
        }
        depth
    }

    pub fn max_depth(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Root first, parents before children, no dangling indices.
    pub fn check_structure(&self) -> Result<()> {
        if self.branches.is_empty() {
            return Err(Error::InvalidBdt("no branches".into()));
        }
        for (i, b) in self.branches.iter().enumerate() {
            match (i, b.parent) {
                (0, None) => {}
                (0, Some(_)) => return Err(Error::InvalidBdt("branch 0 must be the root".into())),
                (_, None) => return Err(Error::InvalidBdt(format!("branch {i} has no parent"))),
                (_, Some(p)) if p >= i => {
                    return Err(Error::InvalidBdt(format!(
                        "branch {i} has parent {p}; parents must precede children"
                    )))
                }
                _ => {}
            }
            if !b.birth.is_finite() || !b.death.is_finite() {
                return Err(Error::InvalidBdt(format!("branch {i} is not finite")));
            }
        }
        Ok(())
    }

    /// Every child interval lies inside its parent's, up to `tol`.
    pub fn satisfies_nesting(&self, tol: f64) -> bool {
        let pts = if self.normalized {
            self.denormalized()
        } else {
            self.points()
        };
        self.branches.iter().zip(&pts).all(|(b, q)| match b.parent {
            None => q.birth <= q.death + tol,
            Some(p) => {
                let r = pts[p];
                q.birth <= q.death + tol && q.birth >= r.birth - tol && q.death <= r.death + tol
            }
        })
    }

    /// Checks the normalized domain: root `(0,1)`, branches in `[0,1]` with
    /// `birth <= death` (or `<` when `strict`).
    pub fn check_normalized(&self, strict: bool) -> Result<()> {
        if !self.normalized {
            return Err(Error::NotNormalized);
        }
        self.check_structure()?;
        let root = self.branches[0];
        if root.birth != 0.0 || root.death != 1.0 {
            return Err(Error::InvalidBdt(format!(
                "normalized root must be (0,1), got ({}, {})",
                root.birth, root.death
            )));
        }
        for (i, b) in self.branches.iter().enumerate().skip(1) {
            let ordered = if strict {
                b.birth < b.death
            } else {
                b.birth <= b.death
            };
            if !(0.0..=1.0).contains(&b.birth) || !(0.0..=1.0).contains(&b.death) || !ordered {
                return Err(Error::InvalidBdt(format!(
                    "branch {i} = ({}, {}) outside the normalized domain",
                    b.birth, b.death
                )));
            }
        }
        Ok(())
    }

    /// Original (birth, death) values: top-down inversion of the
    /// normalization. Returns the points unchanged for unnormalized trees.
    pub fn denormalized(&self) -> Vec<BirthDeathPoint> {
        if !self.normalized {
            return self.points();
        }
        let mut out: Vec<BirthDeathPoint> = Vec::with_capacity(self.len());
        for b in &self.branches {
            let (lo, hi) = match b.parent {
                None => {
                    out.push(BirthDeathPoint::new(self.root_interval[0], self.root_interval[1]));
                    continue;
                }
                Some(p) => (out[p].birth, out[p].death),
            };
            let span = hi - lo;
            out.push(BirthDeathPoint::new(lo + b.birth * span, lo + b.death * span));
        }
        out
    }

    /// Branch persistences in original units.
    pub fn denormalized_persistence(&self) -> Vec<f64> {
        self.denormalized().iter().map(BirthDeathPoint::persistence).collect()
    }

    /// Maps every branch into its parent's interval; the root becomes `(0,1)`.
    pub fn normalize(&self) -> Result<Bdt> {
        if self.normalized {
            return Ok(self.clone());
        }
        self.check_structure()?;
        let mut branches = self.branches.clone();
        branches[0].birth = 0.0;
        branches[0].death = 1.0;
        for (i, b) in branches.iter_mut().enumerate().skip(1) {
            let p = b.parent.expect("checked structure");
            let parent = self.branches[p];
            let span = parent.persistence();
            if span == 0.0 {
                return Err(Error::DegenerateBranch { branch: i, parent: p });
            }
            b.birth = (b.birth - parent.birth) / span;
            b.death = (b.death - parent.birth) / span;
        }
        Ok(Bdt {
            branches,
            normalized: true,
            root_interval: [self.branches[0].birth, self.branches[0].death],
        })
    }

    /// Reattaches branches to their grandparent while they are large relative
    /// to their parent (`> eps2`) yet not among the globally dominant ones
    /// (`<= eps3` of the root persistence). Iterates to a fixpoint.
    pub fn preprocess(&self, eps2: f64, eps3: f64) -> Bdt {
        let mut out = self.clone();
        let pers: Vec<f64> = self.branches.iter().map(Branch::persistence).collect();
        let root_pers = pers[0];
        loop {
            let mut moved = false;
            for i in 1..out.len() {
                let p = out.branches[i].parent.expect("non-root");
                let Some(gp) = out.branches[p].parent else { continue };
                if ratio(pers[i], pers[p]) > eps2 && ratio(pers[i], root_pers) <= eps3 {
                    out.branches[i].parent = Some(gp);
                    moved = true;
                }
            }
            if !moved {
                return out;
            }
        }
    }

    /// Drops non-root branches of zero persistence (and their subtrees,
    /// which nesting forces to be empty intervals too), reindexing parents.
    pub fn prune_zero_persistence(&self) -> Bdt {
        let pts = self.denormalized();
        let mut keep = vec![true; self.len()];
        for (i, b) in self.branches.iter().enumerate().skip(1) {
            let p = b.parent.expect("non-root");
            keep[i] = keep[p] && pts[i].persistence() > 0.0 && b.birth < b.death;
        }
        self.retain(&keep)
    }

    /// Keeps the flagged branches; every kept branch's parent must be kept.
    pub fn retain(&self, keep: &[bool]) -> Bdt {
        let mut remap = vec![usize::MAX; self.len()];
        let mut branches = Vec::new();
        for (i, b) in self.branches.iter().enumerate() {
            if keep[i] {
                remap[i] = branches.len();
                let mut nb = *b;
                nb.parent = b.parent.map(|p| remap[p]);
                debug_assert!(nb.parent != Some(usize::MAX));
                branches.push(nb);
            }
        }
        Bdt {
            branches,
            normalized: self.normalized,
            root_interval: self.root_interval,
        }
    }
}

/// Elder-rule branches of a merge tree, in storage order.
pub fn branch_decomposition(tree: &MergeTree) -> Bdt {
    let pairs = tree.node_pairs();
    let points: Vec<BirthDeathPoint> = pairs.iter().map(|p| tree.pair_point(p)).collect();
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&a, &b| {
        points[b]
            .persistence()
            .total_cmp(&points[a].persistence())
            .then(pairs[a].depth.cmp(&pairs[b].depth))
            .then(a.cmp(&b))
    });
    let mut rank = vec![0; pairs.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let branches = order
        .iter()
        .map(|&i| Branch {
            birth: points[i].birth,
            death: points[i].death,
            parent: pairs[i].parent.map(|p| rank[p]),
        })
        .collect();
    Bdt {
        root_interval: [points[0].birth, points[0].death],
        branches,
        normalized: false,
    }
}

/// Builds a merge tree whose branch decomposition is `bdt` (denormalized).
///
/// Each branch becomes a leaf at its birth (join) or death (split) and a
/// merge node on its parent's branch; the root branch ends at the root node.
pub fn bdt_to_merge_tree(bdt: &Bdt, kind: TreeKind) -> Result<MergeTree> {
    bdt.check_normalized(true)?;
    let pts = bdt.denormalized();
    // Split trees are built as join trees of the negated field.
    let (lo, hi): (Vec<f64>, Vec<f64>) = match kind {
        TreeKind::Join => pts.iter().map(|p| (p.birth, p.death)).unzip(),
        TreeKind::Split => pts.iter().map(|p| (-p.death, -p.birth)).unzip(),
    };
    let depth = bdt.depths();
    let max_depth = depth.iter().copied().max().unwrap_or(0);
    let n = bdt.len();
    let children = bdt.children();

    // Node list: leaf of every branch, then the upper end of every branch
    // (merge node on the parent chain, or the root node).
    struct Proto {
        value: f64,
        secondary: usize,
        parent: Option<usize>,
    }
    let mut nodes: Vec<Proto> = Vec::with_capacity(2 * n);
    for (i, &v) in lo.iter().enumerate() {
        nodes.push(Proto {
            value: v,
            secondary: i,
            parent: None,
        });
    }
    for i in 0..n {
        // Nodes on the chain of branch i sit above its leaf; the chain's
        // depth orders coincident values so that deeper chains come first.
        let chain_depth = bdt.branches[i].parent.map_or(0, |p| depth[p]);
        let secondary = n + (max_depth + 1 - chain_depth) + if i == 0 { 1 } else { 0 };
        nodes.push(Proto {
            value: hi[i],
            secondary,
            parent: None,
        });
    }
    let upper = |i: usize| n + i;
    let by_key = |nodes: &[Proto], a: usize, b: usize| {
        nodes[a]
            .value
            .total_cmp(&nodes[b].value)
            .then(nodes[a].secondary.cmp(&nodes[b].secondary))
            .then(a.cmp(&b))
    };
    // Chain of branch i: its leaf, the merge nodes of its children in sweep
    // order, then its own upper node (the root for branch 0).
    for i in 0..n {
        let mut chain: Vec<usize> = children[i].iter().map(|&c| upper(c)).collect();
        chain.sort_by(|&a, &b| by_key(&nodes, a, b));
        chain.push(upper(i));
        let mut prev = i;
        for s in chain {
            nodes[prev].parent = Some(s);
            prev = s;
        }
    }
    nodes[upper(0)].parent = None;

    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| by_key(&nodes, a, b));
    let mut vertex = vec![0; nodes.len()];
    for (r, &i) in order.iter().enumerate() {
        vertex[i] = r;
    }
    let sign = match kind {
        TreeKind::Join => 1.0,
        TreeKind::Split => -1.0,
    };
    let out = nodes
        .iter()
        .enumerate()
        .map(|(i, p)| MtNode {
            vertex: vertex[i],
            value: sign * p.value,
            parent: p.parent,
            junction: None,
            role: NodeRole::Leaf,
        })
        .collect();
    Ok(MergeTree::from_nodes(kind, out))
}
