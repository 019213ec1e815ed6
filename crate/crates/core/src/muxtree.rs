//! Multiplexer tree extraction and the context-propagation rewrites.
//!
//! A tree is rooted at a mux or pmux whose output escapes (module output,
//! multiple readers, or a non-data use). An edge descends into a child mux
//! only when the child's entire output spec equals the parent's data-port
//! slice and every output net has that data port as its single reader, so
//! rerouting an edge can never disturb logic outside the tree.
//!
//! Two rewrites propagate path facts top-down:
//! rule 1 bypasses a node when the path leaves exactly one branch live,
//! rule 2 replaces a data-port bit with the constant the path implies.
//! Analysis runs on an immutable snapshot per tree; the collected rewrites
//! replay in pre-order, so a bypass chain collapses in one pass.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::netlist::{Cell, CellId, CellKind, Const, GraphIndex, Netlist, SigBit};

/// Control facts accumulated along a path from a tree root.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathContext {
    facts: BTreeMap<u32, bool>,
}

impl PathContext {
    pub fn new() -> PathContext {
        PathContext::default()
    }

    pub fn get(&self, net: u32) -> Option<bool> {
        self.facts.get(&net).copied()
    }

    /// Record a fact. Returns false when it contradicts the context.
    pub fn assume(&mut self, net: u32, value: bool) -> bool {
        match self.facts.insert(net, value) {
            Some(old) if old != value => false,
            _ => true,
        }
    }

    pub fn contradicts(&self, facts: &[(u32, bool)]) -> bool {
        facts
            .iter()
            .any(|&(n, v)| self.get(n).map(|known| known != v).unwrap_or(false))
    }

    /// Context plus branch facts; None when they contradict it.
    pub fn extend(&self, facts: &[(u32, bool)]) -> Option<PathContext> {
        let mut out = self.clone();
        for &(n, v) in facts {
            if !out.assume(n, v) {
                return None;
            }
        }
        Some(out)
    }

    pub fn facts(&self) -> impl Iterator<Item = (u32, bool)> + '_ {
        self.facts.iter().map(|(&n, &v)| (n, v))
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }
}

/// One selectable branch of a mux or pmux node.
#[derive(Debug, Clone)]
pub struct MuxBranch {
    /// Select-net values that hold whenever this branch drives the output.
    pub facts: Vec<(u32, bool)>,
    /// Constant select bits already rule this branch out.
    pub dead: bool,
    /// Data port and bit offset of the branch slice.
    pub port: &'static str,
    pub lo: usize,
    /// The pmux select bit that must be hot for this branch; None for a
    /// mux branch and for the pmux default.
    pub select: Option<SigBit>,
    /// Tree node fed wholly by this slice.
    pub child: Option<usize>,
}

impl MuxBranch {
    /// Every select fact is pinned by the context, so the branch guard is
    /// identically one on this path. For pmux this is strictly stronger
    /// than all siblings being dead: unknown selects could still go
    /// multi-hot, which yields zero, not this branch.
    pub fn forced(&self, ctx: &PathContext) -> bool {
        !self.dead && self.facts.iter().all(|&(n, v)| ctx.get(n) == Some(v))
    }
}

#[derive(Debug, Clone)]
pub struct MuxNode {
    pub cell: CellId,
    pub width: usize,
    /// False when a select bit is unknown (x); liveness reasoning is then
    /// unsound, per-branch facts remain valid.
    pub analyzable: bool,
    pub branches: Vec<MuxBranch>,
}

#[derive(Debug, Clone)]
pub struct MuxTree {
    pub root: CellId,
    /// Pre-order, index 0 is the root.
    pub nodes: Vec<MuxNode>,
}

impl MuxTree {
    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        self.nodes.iter().map(|n| n.cell)
    }
}

/// A single netlist edit. Edits read live state when applied, so replaying
/// them in analysis order composes chained bypasses correctly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rewrite {
    /// Replace one data-port bit with the constant the path implies.
    SetPortBit {
        cell: CellId,
        port: &'static str,
        index: usize,
        value: Const,
    },
    /// Route the surviving branch slice around the cell.
    Bypass {
        cell: CellId,
        port: &'static str,
        lo: usize,
    },
    /// Every branch is dead on this path; under one-hot pmux semantics the
    /// output is constant zero.
    ZeroOutput { cell: CellId },
    /// Remove pmux branches whose guards can never be hot: drop the listed
    /// select bits and their B chunks.
    DropPmuxBranches { cell: CellId, selects: Vec<usize> },
}

fn branch_descriptors(cell: &Cell) -> (Vec<MuxBranch>, bool) {
    let mut analyzable = true;
    let branches = match cell.kind {
        CellKind::Mux => {
            let s = cell.port("S").expect("mux S")[0];
            let mk = |facts: Vec<(u32, bool)>, dead: bool, port: &'static str| MuxBranch {
                facts,
                dead,
                port,
                lo: 0,
                select: None,
                child: None,
            };
            match s {
                SigBit::Net(n) => vec![
                    mk(vec![(n, false)], false, "A"),
                    mk(vec![(n, true)], false, "B"),
                ],
                SigBit::Const(Const::Zero) => vec![mk(vec![], false, "A"), mk(vec![], true, "B")],
                SigBit::Const(Const::One) => vec![mk(vec![], true, "A"), mk(vec![], false, "B")],
                SigBit::Const(Const::X) => {
                    analyzable = false;
                    vec![mk(vec![], false, "A"), mk(vec![], false, "B")]
                }
            }
        }
        CellKind::Pmux => {
            let s = cell.port("S").expect("pmux S").bits().to_vec();
            let w = cell.port("Y").expect("pmux Y").width();
            let n = s.len();
            let mut out = Vec::with_capacity(n + 1);
            // Branch i requires select i hot and every other select cold;
            // the default requires all cold.
            for i in 0..=n {
                let hot = if i < n { Some(i) } else { None };
                let mut facts: BTreeMap<u32, bool> = BTreeMap::new();
                let mut dead = false;
                for (j, &bit) in s.iter().enumerate() {
                    let want = Some(j) == hot;
                    match bit {
                        SigBit::Net(m) => match facts.insert(m, want) {
                            Some(prev) if prev != want => dead = true,
                            _ => {}
                        },
                        SigBit::Const(Const::Zero) => {
                            if want {
                                dead = true;
                            }
                        }
                        SigBit::Const(Const::One) => {
                            if !want {
                                dead = true;
                            }
                        }
                        SigBit::Const(Const::X) => analyzable = false,
                    }
                }
                let (port, lo) = match hot {
                    Some(i) => ("B", i * w),
                    None => ("A", 0),
                };
                out.push(MuxBranch {
                    facts: facts.into_iter().collect(),
                    dead,
                    port,
                    lo,
                    select: hot.map(|i| s[i]),
                    child: None,
                });
            }
            out
        }
        _ => unreachable!("branch descriptors on a non-mux cell"),
    };
    (branches, analyzable)
}

/// Child cell fed exclusively through the given branch slice, if the edge
/// qualifies as tree-interior.
fn interior_child(
    n: &Netlist,
    idx: &GraphIndex,
    parent: &Cell,
    port: &str,
    lo: usize,
    width: usize,
) -> Option<CellId> {
    if width == 0 {
        return None;
    }
    let slice = parent.port(port)?.slice(lo, width);
    let first = slice[0].as_net()?;
    let child = idx.driver_cell(first)?;
    let cell = n.cell(child);
    if !matches!(cell.kind, CellKind::Mux | CellKind::Pmux) {
        return None;
    }
    if cell.port("Y") != Some(&slice) {
        return None;
    }
    for bit in slice.bits() {
        let net = bit.as_net()?;
        if idx.fanouts(net).len() != 1 || idx.feeds_module_output(net) {
            return None;
        }
    }
    Some(child)
}

/// Partition the mux and pmux cells into rooted trees.
pub fn extract_muxtrees(n: &Netlist, idx: &GraphIndex) -> Vec<MuxTree> {
    let mux_cells: Vec<CellId> = n
        .cells()
        .filter(|(_, c)| matches!(c.kind, CellKind::Mux | CellKind::Pmux))
        .map(|(id, _)| id)
        .collect();
    let mut interior: std::collections::BTreeSet<CellId> = Default::default();
    for &id in &mux_cells {
        let cell = n.cell(id);
        let (branches, _) = branch_descriptors(cell);
        let width = cell.port("Y").map(|y| y.width()).unwrap_or(0);
        for b in &branches {
            if let Some(child) = interior_child(n, idx, cell, b.port, b.lo, width) {
                interior.insert(child);
            }
        }
    }
    mux_cells
        .iter()
        .filter(|id| !interior.contains(id))
        .map(|&root| build_tree(n, idx, root))
        .collect()
}

fn build_tree(n: &Netlist, idx: &GraphIndex, root: CellId) -> MuxTree {
    let mut nodes: Vec<MuxNode> = Vec::new();
    // Stack entries: cell to expand and the (node, branch) edge that leads
    // to it. Pre-order with branches visited in descriptor order.
    let mut stack: Vec<(CellId, Option<(usize, usize)>)> = vec![(root, None)];
    while let Some((cell_id, edge)) = stack.pop() {
        let cell = n.cell(cell_id);
        let (branches, analyzable) = branch_descriptors(cell);
        let width = cell.port("Y").map(|y| y.width()).unwrap_or(0);
        let node_idx = nodes.len();
        nodes.push(MuxNode {
            cell: cell_id,
            width,
            analyzable,
            branches,
        });
        if let Some((parent, branch)) = edge {
            nodes[parent].branches[branch].child = Some(node_idx);
        }
        // Push in reverse so branch 0 expands first.
        let n_branches = nodes[node_idx].branches.len();
        for b in (0..n_branches).rev() {
            let br = &nodes[node_idx].branches[b];
            if let Some(child) = interior_child(n, idx, cell, br.port, br.lo, width) {
                stack.push((child, Some((node_idx, b))));
            }
        }
    }
    MuxTree { root, nodes }
}

/// Rewrites for one tree, computed against an immutable snapshot.
pub fn classic_analyze_tree(n: &Netlist, tree: &MuxTree) -> Vec<Rewrite> {
    let mut out = Vec::new();
    walk(n, tree, 0, &PathContext::new(), &mut out);
    out
}

fn walk(n: &Netlist, tree: &MuxTree, node_idx: usize, ctx: &PathContext, out: &mut Vec<Rewrite>) {
    let node = &tree.nodes[node_idx];
    let cell = n.cell(node.cell);
    let live: Vec<usize> = node
        .branches
        .iter()
        .enumerate()
        .filter(|(_, b)| !b.dead && !ctx.contradicts(&b.facts))
        .map(|(i, _)| i)
        .collect();
    if node.analyzable && live.is_empty() {
        out.push(Rewrite::ZeroOutput { cell: node.cell });
        return;
    }
    let bypass = bypass_target(cell, node, &live, ctx);
    for &bi in &live {
        let branch = &node.branches[bi];
        let branch_ctx = ctx
            .extend(&branch.facts)
            .expect("live branch cannot contradict the context");
        if branch.child.is_none() {
            data_const_rewrites(cell, node.cell, branch, node.width, &branch_ctx, out);
        }
        if bypass == Some(bi) {
            // Rule 1: the path pins this branch's guard to one, route the
            // slice around the cell.
            out.push(Rewrite::Bypass {
                cell: node.cell,
                port: branch.port,
                lo: branch.lo,
            });
        }
        if let Some(child) = branch.child {
            walk(n, tree, child, &branch_ctx, out);
        }
    }
}

/// Which live branch, if any, may replace the node output on this path.
/// A mux is exhaustive, so a sole survivor always wins. A pmux survivor
/// must be forced: with any select unknown the inputs could go multi-hot
/// and the output would be zero, not the surviving chunk.
pub(crate) fn bypass_target(
    cell: &Cell,
    node: &MuxNode,
    live: &[usize],
    ctx: &PathContext,
) -> Option<usize> {
    if !node.analyzable {
        return None;
    }
    match cell.kind {
        CellKind::Mux => (live.len() == 1).then(|| live[0]),
        CellKind::Pmux => live
            .iter()
            .copied()
            .find(|&bi| node.branches[bi].forced(ctx)),
        _ => None,
    }
}

/// Rule 2 over one leaf branch: a data bit whose net value is pinned on
/// this path becomes that constant. Child slices never qualify: their nets
/// have a single data-port reader, so they are never select nets.
pub(crate) fn data_const_rewrites(
    cell: &Cell,
    id: CellId,
    branch: &MuxBranch,
    width: usize,
    branch_ctx: &PathContext,
    out: &mut Vec<Rewrite>,
) {
    let Some(spec) = cell.port(branch.port) else {
        return;
    };
    for k in 0..width {
        if let SigBit::Net(m) = spec[branch.lo + k] {
            if let Some(v) = branch_ctx.get(m) {
                out.push(Rewrite::SetPortBit {
                    cell: id,
                    port: branch.port,
                    index: branch.lo + k,
                    value: if v { Const::One } else { Const::Zero },
                });
            }
        }
    }
}

/// Replay rewrites in order against the live netlist.
pub fn apply_rewrites(n: &mut Netlist, rewrites: &[Rewrite]) {
    for rw in rewrites {
        match rw {
            Rewrite::SetPortBit {
                cell,
                port,
                index,
                value,
            } => {
                let mut bits = n.cell(*cell).port(port).expect("port exists").bits().to_vec();
                bits[*index] = SigBit::Const(*value);
                n.reconnect(*cell, port, bits.into());
            }
            Rewrite::Bypass { cell, port, lo } => {
                let c = n.cell(*cell);
                let y = c.port("Y").expect("mux Y").clone();
                let data = c.port(port).expect("data port").slice(*lo, y.width());
                for (i, bit) in y.bits().iter().enumerate() {
                    if let SigBit::Net(net) = bit {
                        n.replace_net_uses(*net, data[i]);
                    }
                }
            }
            Rewrite::ZeroOutput { cell } => {
                let y = n.cell(*cell).port("Y").expect("mux Y").clone();
                for bit in y.bits() {
                    if let SigBit::Net(net) = bit {
                        n.replace_net_uses(*net, SigBit::Const(Const::Zero));
                    }
                }
            }
            Rewrite::DropPmuxBranches { cell, selects } => {
                let c = n.cell(*cell);
                let s = c.port("S").expect("pmux S").clone();
                let b = c.port("B").expect("pmux B").clone();
                let w = c.port("Y").expect("pmux Y").width();
                let keep: Vec<usize> =
                    (0..s.width()).filter(|i| !selects.contains(i)).collect();
                assert!(!keep.is_empty(), "shrink would leave no selects");
                let new_s: Vec<SigBit> = keep.iter().map(|&i| s[i]).collect();
                let mut new_b: Vec<SigBit> = Vec::with_capacity(keep.len() * w);
                for &i in &keep {
                    new_b.extend_from_slice(b.slice(i * w, w).bits());
                }
                n.reconnect(*cell, "S", new_s.into());
                n.reconnect(*cell, "B", new_b.into());
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassicStats {
    pub trees: usize,
    pub bypasses: usize,
    pub const_bits: usize,
    pub zeroed: usize,
}

impl ClassicStats {
    pub fn fired(&self) -> bool {
        self.bypasses + self.const_bits + self.zeroed > 0
    }
}

/// Run the context-propagation pass over every tree. Dead cells are left
/// behind for the caller's sweep.
pub fn classic_optimize(n: &mut Netlist) -> ClassicStats {
    let idx = n.build_indices();
    let trees = extract_muxtrees(n, &idx);
    let per_tree: Vec<Vec<Rewrite>> = trees
        .par_iter()
        .map(|t| classic_analyze_tree(n, t))
        .collect();
    let mut stats = ClassicStats {
        trees: trees.len(),
        ..Default::default()
    };
    for rewrites in &per_tree {
        for rw in rewrites {
            match rw {
                Rewrite::Bypass { .. } => stats.bypasses += 1,
                Rewrite::SetPortBit { .. } => stats.const_bits += 1,
                Rewrite::ZeroOutput { .. } => stats.zeroed += 1,
                // The context pass never shrinks pmux branches.
                Rewrite::DropPmuxBranches { .. } => {}
            }
        }
        apply_rewrites(n, rewrites);
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{PortDir, SigSpec};

    fn mux(name: &str, s: SigBit, a: SigSpec, b: SigSpec, y: SigSpec) -> Cell {
        Cell {
            name: name.into(),
            kind: CellKind::Mux,
            connections: [
                ("A".to_string(), a),
                ("B".to_string(), b),
                ("S".to_string(), SigSpec::from(vec![s])),
                ("Y".to_string(), y),
            ]
            .into_iter()
            .collect(),
            parameters: Default::default(),
            port_directions: Default::default(),
        }
    }

    fn pmux(name: &str, s: SigSpec, a: SigSpec, b: SigSpec, y: SigSpec) -> Cell {
        Cell {
            name: name.into(),
            kind: CellKind::Pmux,
            connections: [
                ("A".to_string(), a),
                ("B".to_string(), b),
                ("S".to_string(), s),
                ("Y".to_string(), y),
            ]
            .into_iter()
            .collect(),
            parameters: Default::default(),
            port_directions: Default::default(),
        }
    }

    fn net(n: u32) -> SigSpec {
        SigSpec::from_net(n)
    }

    /// y = s ? c : (s ? b : a); the inner mux collapses to its A branch.
    fn chained_pair() -> Netlist {
        let mut nl = Netlist::new("t");
        nl.add_port("s", PortDir::Input, net(1));
        nl.add_port("a", PortDir::Input, net(2));
        nl.add_port("b", PortDir::Input, net(3));
        nl.add_port("c", PortDir::Input, net(4));
        nl.add_port("y", PortDir::Output, net(6));
        nl.add_cell(mux("m1", SigBit::Net(1), net(2), net(3), net(5)));
        nl.add_cell(mux("m2", SigBit::Net(1), net(5), net(4), net(6)));
        nl.validate().unwrap();
        nl
    }

    #[test]
    fn chained_muxes_form_one_tree() {
        let nl = chained_pair();
        let idx = nl.build_indices();
        let trees = extract_muxtrees(&nl, &idx);
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].nodes.len(), 2);
        assert_eq!(nl.cell(trees[0].root).name, "m2");
        assert_eq!(trees[0].nodes[0].branches[0].child, Some(1));
        assert_eq!(trees[0].nodes[0].branches[1].child, None);
    }

    #[test]
    fn repeated_control_bypasses_inner_mux() {
        let mut nl = chained_pair();
        let stats = classic_optimize(&mut nl);
        assert_eq!(stats.bypasses, 1);
        assert_eq!(stats.const_bits, 0);
        nl.dead_cell_sweep();
        assert_eq!(nl.cell_count(), 1);
        let m2 = nl.cell(nl.find_cell("m2").unwrap());
        // Inner mux selected s=0, so its A input a (net 2) replaces it.
        assert_eq!(m2.port("A"), Some(&net(2)));
        assert_eq!(m2.port("B"), Some(&net(4)));
    }

    #[test]
    fn select_net_in_data_becomes_constant() {
        let mut nl = Netlist::new("t");
        nl.add_port("s", PortDir::Input, net(1));
        nl.add_port("a", PortDir::Input, net(2));
        nl.add_port("y", PortDir::Output, net(3));
        // B data bit is the select itself, so it is 1 whenever chosen.
        nl.add_cell(mux("m", SigBit::Net(1), net(2), net(1), net(3)));
        nl.validate().unwrap();
        let stats = classic_optimize(&mut nl);
        assert_eq!(stats.const_bits, 1);
        assert_eq!(stats.bypasses, 0);
        let m = nl.cell(nl.find_cell("m").unwrap());
        assert_eq!(m.port("B"), Some(&SigSpec::constant(Const::One, 1)));
    }

    #[test]
    fn fanout_blocks_tree_edges() {
        let mut nl = chained_pair();
        // Second reader of the inner mux output net 5.
        nl.add_port("t", PortDir::Output, net(5));
        nl.validate().unwrap();
        let idx = nl.build_indices();
        let trees = extract_muxtrees(&nl, &idx);
        assert_eq!(trees.len(), 2);
        assert!(trees.iter().all(|t| t.nodes.len() == 1));
        // No context reaches the former child, nothing fires.
        let mut nl2 = nl.clone();
        let stats = classic_optimize(&mut nl2);
        assert!(!stats.fired());
    }

    /// Path s0=0, s1=0 reaches a pmux on [s1, s0]; only its default
    /// branch stays live.
    #[test]
    fn pmux_collapses_to_default_under_context() {
        let mut nl = Netlist::new("t");
        for (i, p) in ["s0", "s1", "d", "b0", "b1", "u", "v"].iter().enumerate() {
            nl.add_port(*p, PortDir::Input, net(i as u32 + 1));
        }
        nl.add_port("y", PortDir::Output, net(10));
        nl.add_cell(pmux(
            "pm",
            SigSpec::from_nets([2, 1]),
            net(3),
            SigSpec::from_nets([4, 5]),
            net(8),
        ));
        nl.add_cell(mux("mid", SigBit::Net(2), net(8), net(7), net(9)));
        nl.add_cell(mux("top", SigBit::Net(1), net(9), net(6), net(10)));
        nl.validate().unwrap();
        let idx = nl.build_indices();
        let trees = extract_muxtrees(&nl, &idx);
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].nodes.len(), 3);
        let mut rewrites = Vec::new();
        walk(&nl, &trees[0], 0, &PathContext::new(), &mut rewrites);
        assert_eq!(
            rewrites,
            vec![Rewrite::Bypass {
                cell: trees[0].nodes[2].cell,
                port: "A",
                lo: 0,
            }]
        );
        let mut opt = nl.clone();
        classic_optimize(&mut opt);
        opt.dead_cell_sweep();
        let mid = opt.cell(opt.find_cell("mid").unwrap());
        // Default data d (net 3) replaced the pmux.
        assert_eq!(mid.port("A"), Some(&net(3)));
    }

    /// Context kills all but one pmux branch, yet the survivor's own
    /// select stays unknown. Multi-hot inputs would drive the output to
    /// zero, so routing the surviving chunk through would be wrong.
    #[test]
    fn unknown_sibling_select_blocks_pmux_bypass() {
        let mut nl = Netlist::new("t");
        for (i, p) in ["s0", "s1", "d", "b0", "b1", "u"].iter().enumerate() {
            nl.add_port(*p, PortDir::Input, net(i as u32 + 1));
        }
        nl.add_port("y", PortDir::Output, net(8));
        nl.add_cell(pmux(
            "pm",
            SigSpec::from_nets([1, 2]),
            net(3),
            SigSpec::from_nets([4, 5]),
            net(7),
        ));
        nl.add_cell(mux("top", SigBit::Net(2), net(6), net(7), net(8)));
        nl.validate().unwrap();
        // Under s1=1 the branch on s0 and the default are both dead, but
        // s0=1 still forces the pmux output to zero, not to b1.
        let stats = classic_optimize(&mut nl);
        assert!(!stats.fired());
        let pm = nl.cell(nl.find_cell("pm").unwrap());
        assert_eq!(pm.port("S"), Some(&SigSpec::from_nets([1, 2])));
    }

    /// Path s0=1, s1=1 makes every branch of a pmux over [s0, s1] dead;
    /// one-hot semantics give constant zero.
    #[test]
    fn contradictory_selects_zero_the_output() {
        let mut nl = Netlist::new("t");
        for (i, p) in ["s0", "s1", "d", "b0", "b1", "u", "v"].iter().enumerate() {
            nl.add_port(*p, PortDir::Input, net(i as u32 + 1));
        }
        nl.add_port("y", PortDir::Output, net(10));
        nl.add_cell(pmux(
            "pm",
            SigSpec::from_nets([1, 2]),
            net(3),
            SigSpec::from_nets([4, 5]),
            net(8),
        ));
        nl.add_cell(mux("mid", SigBit::Net(2), net(7), net(8), net(9)));
        nl.add_cell(mux("top", SigBit::Net(1), net(6), net(9), net(10)));
        nl.validate().unwrap();
        let mut stats = ClassicStats::default();
        let idx = nl.build_indices();
        for tree in extract_muxtrees(&nl, &idx) {
            let rewrites = classic_analyze_tree(&nl, &tree);
            stats.zeroed += rewrites
                .iter()
                .filter(|r| matches!(r, Rewrite::ZeroOutput { .. }))
                .count();
            apply_rewrites(&mut nl, &rewrites);
        }
        assert_eq!(stats.zeroed, 1);
        let mid = nl.cell(nl.find_cell("mid").unwrap());
        assert_eq!(mid.port("B"), Some(&SigSpec::constant(Const::Zero, 1)));
    }

    #[test]
    fn every_mux_lands_in_exactly_one_tree() {
        let nl = chained_pair();
        let idx = nl.build_indices();
        let trees = extract_muxtrees(&nl, &idx);
        let mut seen: Vec<CellId> = trees.iter().flat_map(|t| t.cells()).collect();
        seen.sort();
        seen.dedup();
        let muxes = nl
            .cells()
            .filter(|(_, c)| matches!(c.kind, CellKind::Mux | CellKind::Pmux))
            .count();
        assert_eq!(seen.len(), muxes);
    }
}
