//! Case-statement muxtrees rebuilt through decision diagrams.
//!
//! A tree whose selects all test one control signal, through eq cells
//! against constants, logic_not, plain bits, or or-combinations of those,
//! is a priority case function. The function is re-expressed as a decision
//! diagram over the control bits: a greedy order picks the bit that
//! minimizes the terminal types of the two cofactors, a cost gate weighs
//! the new mux count against the freed condition gates, and accepted
//! plans re-emit the tree with one mux per internal node.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::muxtree::{extract_muxtrees, MuxTree};
use crate::netlist::{
    Cell, CellId, CellKind, Const, Driver, GraphIndex, Netlist, SigBit, SigSpec,
};

/// Structural limit on the control width. Wider cases blow up the
/// exhaustive verification oracle and never pay for themselves.
pub const HARD_HEIGHT_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseBit {
    Zero,
    One,
    /// Wildcard, written `z` in HDL case patterns.
    Any,
}

/// One case arm: a cube over the control bits and the data it selects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CasePattern {
    pub bits: Vec<CaseBit>,
    pub terminal: SigSpec,
}

/// Priority case function: the first matching pattern wins, the default
/// catches everything else. Total by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseFunction {
    pub control: SigSpec,
    pub patterns: Vec<CasePattern>,
    pub default: SigSpec,
}

impl CaseFunction {
    pub fn height(&self) -> usize {
        self.control.width()
    }

    pub fn eval(&self, assign: &[bool]) -> &SigSpec {
        debug_assert_eq!(assign.len(), self.height());
        for p in &self.patterns {
            if cube_matches(&p.bits, assign) {
                return &p.terminal;
            }
        }
        &self.default
    }
}

fn cube_matches(cube: &[CaseBit], assign: &[bool]) -> bool {
    cube.iter().zip(assign).all(|(&c, &v)| match c {
        CaseBit::Any => true,
        CaseBit::One => v,
        CaseBit::Zero => !v,
    })
}

/// Conjunction of two cubes; None when they exclude each other.
fn cube_and(a: &[CaseBit], b: &[CaseBit]) -> Option<Vec<CaseBit>> {
    let mut out = Vec::with_capacity(a.len());
    for (&x, &y) in a.iter().zip(b) {
        out.push(match (x, y) {
            (CaseBit::Any, z) | (z, CaseBit::Any) => z,
            (x, y) if x == y => x,
            _ => return None,
        });
    }
    Some(out)
}

/// `wide` matches every assignment `narrow` does.
fn cube_covers(wide: &[CaseBit], narrow: &[CaseBit]) -> bool {
    wide.iter()
        .zip(narrow)
        .all(|(&w, &n)| w == CaseBit::Any || w == n)
}

/// Conjunction of control-net literals; sorted by net, conflict-free.
type LitCube = Vec<(u32, bool)>;

/// Recognizes select-net conditions as disjunctions of literal cubes and
/// records what backs them: eq/logic_not base signals (anchors), nets
/// used directly or under a not (bare), and the traversed cells (cone).
struct CondScan<'a> {
    n: &'a Netlist,
    idx: &'a GraphIndex,
    memo: HashMap<u32, Option<Vec<LitCube>>>,
    anchors: Vec<Vec<u32>>,
    bare: BTreeSet<u32>,
    cone: BTreeSet<CellId>,
}

impl<'a> CondScan<'a> {
    fn new(n: &'a Netlist, idx: &'a GraphIndex) -> Self {
        CondScan {
            n,
            idx,
            memo: HashMap::new(),
            anchors: Vec::new(),
            bare: BTreeSet::new(),
            cone: BTreeSet::new(),
        }
    }

    fn cond_of(&mut self, bit: SigBit) -> Option<Vec<LitCube>> {
        let m = match bit {
            SigBit::Const(Const::One) => return Some(vec![vec![]]),
            SigBit::Const(Const::Zero) => return Some(vec![]),
            SigBit::Const(Const::X) => return None,
            SigBit::Net(m) => m,
        };
        if let Some(hit) = self.memo.get(&m) {
            return hit.clone();
        }
        let out = self.scan_net(m);
        self.memo.insert(m, out.clone());
        out
    }

    fn scan_net(&mut self, m: u32) -> Option<Vec<LitCube>> {
        let (id, obit) = match self.idx.driver(m) {
            Some(Driver::Cell { cell, bit, .. }) => (*cell, *bit),
            _ => return self.bare_lit(m),
        };
        let cell = self.n.cell(id);
        match cell.kind {
            CellKind::Eq => {
                let a = cell.port("A")?;
                let b = cell.port("B")?;
                let (sig, k) = if b.bits().iter().all(SigBit::is_const) {
                    (a, b)
                } else if a.bits().iter().all(SigBit::is_const) {
                    (b, a)
                } else {
                    return None;
                };
                self.cone.insert(id);
                let wide = sig.width().max(k.width());
                let mut lits: BTreeMap<u32, bool> = BTreeMap::new();
                let mut anchor = Vec::new();
                for i in 0..wide {
                    // Unsigned comparison zero-extends the shorter side.
                    let sb = sig.bits().get(i).copied().unwrap_or(SigBit::Const(Const::Zero));
                    let kb = k.bits().get(i).copied().unwrap_or(SigBit::Const(Const::Zero));
                    let want = match kb {
                        SigBit::Const(Const::Zero) => false,
                        SigBit::Const(Const::One) => true,
                        _ => return None,
                    };
                    match sb {
                        SigBit::Net(net) => {
                            anchor.push(net);
                            match lits.insert(net, want) {
                                Some(prev) if prev != want => return Some(vec![]),
                                _ => {}
                            }
                        }
                        SigBit::Const(Const::Zero) if !want => {}
                        SigBit::Const(Const::One) if want => {}
                        SigBit::Const(Const::X) => return None,
                        SigBit::Const(_) => return Some(vec![]),
                    }
                }
                self.anchors.push(anchor);
                Some(vec![lits.into_iter().collect()])
            }
            CellKind::LogicNot => {
                self.cone.insert(id);
                let a = cell.port("A")?;
                let mut lits: BTreeMap<u32, bool> = BTreeMap::new();
                let mut anchor = Vec::new();
                for &sb in a.bits() {
                    match sb {
                        SigBit::Net(net) => {
                            anchor.push(net);
                            lits.insert(net, false);
                        }
                        SigBit::Const(Const::Zero) => {}
                        SigBit::Const(Const::One) => return Some(vec![]),
                        SigBit::Const(Const::X) => return None,
                    }
                }
                self.anchors.push(anchor);
                Some(vec![lits.into_iter().collect()])
            }
            CellKind::Not => {
                self.cone.insert(id);
                match cell.port("A")?[obit] {
                    SigBit::Net(net) => {
                        self.bare.insert(net);
                        Some(vec![vec![(net, false)]])
                    }
                    SigBit::Const(Const::Zero) => Some(vec![vec![]]),
                    SigBit::Const(Const::One) => Some(vec![]),
                    SigBit::Const(Const::X) => None,
                }
            }
            CellKind::Or | CellKind::LogicOr => {
                let a = cell.port("A")?;
                let b = cell.port("B")?;
                if cell.kind == CellKind::LogicOr && (a.width() != 1 || b.width() != 1) {
                    return None;
                }
                self.cone.insert(id);
                let mut cubes = self.cond_of(a[obit.min(a.width() - 1)])?;
                cubes.extend(self.cond_of(b[obit.min(b.width() - 1)])?);
                Some(cubes)
            }
            _ => self.bare_lit(m),
        }
    }

    /// A select bit with no recognizable condition cell behind it is an
    /// opaque control literal; it must land inside the anchored signal.
    fn bare_lit(&mut self, m: u32) -> Option<Vec<LitCube>> {
        self.bare.insert(m);
        Some(vec![vec![(m, true)]])
    }
}

/// Per-node select conditions plus the scanner's bookkeeping.
struct TreeScan {
    /// Aligned with tree nodes; one entry per select bit (mux has one).
    conds: Vec<Vec<Option<Vec<LitCube>>>>,
    anchors: Vec<Vec<u32>>,
    bare: BTreeSet<u32>,
    cone: BTreeSet<CellId>,
}

fn scan_tree(n: &Netlist, idx: &GraphIndex, tree: &MuxTree) -> TreeScan {
    let mut scan = CondScan::new(n, idx);
    let mut conds = Vec::with_capacity(tree.nodes.len());
    for node in &tree.nodes {
        let cell = n.cell(node.cell);
        let s = cell.port("S").expect("mux S");
        conds.push(s.bits().iter().map(|&b| scan.cond_of(b)).collect());
    }
    TreeScan {
        conds,
        anchors: scan.anchors,
        bare: scan.bare,
        cone: scan.cone,
    }
}

/// Orders the control bits when the anchors form one connected signal.
/// Anchors connect through shared nets or a shared named wire; two eq
/// cells over unrelated signals stay in separate components and the tree
/// is not a candidate.
fn unify_control(n: &Netlist, scan: &TreeScan) -> Option<Vec<u32>> {
    if scan.anchors.is_empty() {
        return None;
    }
    let mut wire_of: HashMap<u32, usize> = HashMap::new();
    for (wi, nn) in n.netnames.iter().enumerate() {
        for bit in nn.bits.bits() {
            if let SigBit::Net(m) = bit {
                wire_of.entry(*m).or_insert(wi);
            }
        }
    }
    // Small anchor counts; merge components by direct scan.
    let mut comps: Vec<(BTreeSet<u32>, BTreeSet<usize>)> = Vec::new();
    for anchor in &scan.anchors {
        let bits: BTreeSet<u32> = anchor.iter().copied().collect();
        let wires: BTreeSet<usize> = anchor
            .iter()
            .filter_map(|m| wire_of.get(m).copied())
            .collect();
        let mut merged = (bits, wires);
        comps.retain(|c| {
            let touches = !c.0.is_disjoint(&merged.0) || !c.1.is_disjoint(&merged.1);
            if touches {
                merged.0.extend(c.0.iter().copied());
                merged.1.extend(c.1.iter().copied());
            }
            !touches
        });
        comps.push(merged);
    }
    if comps.len() != 1 {
        return None;
    }
    let mut order: Vec<u32> = Vec::new();
    for anchor in &scan.anchors {
        for &m in anchor {
            if !order.contains(&m) {
                order.push(m);
            }
        }
    }
    if !scan.bare.iter().all(|m| order.contains(m)) {
        return None;
    }
    if order.is_empty() || order.len() > HARD_HEIGHT_CAP {
        return None;
    }
    Some(order)
}

/// Recognize one tree as a priority case function over a single control.
pub fn extract_case(n: &Netlist, idx: &GraphIndex, tree: &MuxTree) -> Option<CaseFunction> {
    let scan = scan_tree(n, idx, tree);
    let control = unify_control(n, &scan)?;
    let pos: HashMap<u32, usize> = control.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let h = control.len();

    // Map literal cubes onto control positions, per node and select bit.
    let mut mapped: Vec<Vec<Vec<Vec<CaseBit>>>> = Vec::with_capacity(tree.nodes.len());
    for node_conds in &scan.conds {
        let mut per_sel = Vec::with_capacity(node_conds.len());
        for cond in node_conds {
            let cond = cond.as_ref()?;
            let cubes: Vec<Vec<CaseBit>> = cond
                .iter()
                .map(|lits| {
                    let mut cube = vec![CaseBit::Any; h];
                    for &(m, v) in lits {
                        cube[pos[&m]] = if v { CaseBit::One } else { CaseBit::Zero };
                    }
                    cube
                })
                .collect();
            per_sel.push(cubes);
        }
        mapped.push(per_sel);
    }

    // A pmux picks a chunk only when its select is the sole hot bit, so
    // faithfulness to first-match case semantics needs pairwise disjoint
    // branch conditions; overlap would read as zero output instead.
    for (ni, node) in tree.nodes.iter().enumerate() {
        if n.cell(node.cell).kind != CellKind::Pmux {
            continue;
        }
        let sels = &mapped[ni];
        for i in 0..sels.len() {
            for j in i + 1..sels.len() {
                for a in &sels[i] {
                    for b in &sels[j] {
                        if cube_and(a, b).is_some() {
                            return None;
                        }
                    }
                }
            }
        }
    }

    let mut raw: Vec<(Vec<CaseBit>, SigSpec)> = Vec::new();
    emit_patterns(n, tree, &mapped, 0, &[vec![CaseBit::Any; h]], &mut raw)?;

    // First match wins, so a pattern inside an earlier cube never fires.
    let mut kept: Vec<(Vec<CaseBit>, SigSpec)> = Vec::new();
    for (cube, term) in raw {
        if !kept.iter().any(|(k, _)| cube_covers(k, &cube)) {
            kept.push((cube, term));
        }
    }
    let (last_cube, default) = kept.pop()?;
    if last_cube.iter().any(|&b| b != CaseBit::Any) {
        return None;
    }
    Some(CaseFunction {
        control: SigSpec::from_nets(control),
        patterns: kept
            .into_iter()
            .map(|(bits, terminal)| CasePattern { bits, terminal })
            .collect(),
        default,
    })
}

/// Walk the tree in priority order. A taken branch conjoins its condition
/// onto every context cube; the fall-through side keeps the context as it
/// is, because anything the condition matched was already emitted ahead
/// of it.
fn emit_patterns(
    n: &Netlist,
    tree: &MuxTree,
    mapped: &[Vec<Vec<Vec<CaseBit>>>],
    node_idx: usize,
    ctx: &[Vec<CaseBit>],
    out: &mut Vec<(Vec<CaseBit>, SigSpec)>,
) -> Option<()> {
    let node = &tree.nodes[node_idx];
    let cell = n.cell(node.cell);
    let conjoin = |cond: &[Vec<CaseBit>]| -> Vec<Vec<CaseBit>> {
        let mut cubes = Vec::new();
        for c in ctx {
            for k in cond {
                if let Some(a) = cube_and(c, k) {
                    cubes.push(a);
                }
            }
        }
        cubes
    };
    let leaf_or_recurse = |branch_idx: usize,
                               bctx: &[Vec<CaseBit>],
                               out: &mut Vec<(Vec<CaseBit>, SigSpec)>|
     -> Option<()> {
        let branch = &node.branches[branch_idx];
        match branch.child {
            Some(child) => emit_patterns(n, tree, mapped, child, bctx, out),
            None => {
                let term = cell.port(branch.port)?.slice(branch.lo, node.width);
                for cube in bctx {
                    out.push((cube.clone(), term.clone()));
                }
                Some(())
            }
        }
    };
    match cell.kind {
        CellKind::Mux => {
            if !node.branches[1].dead {
                let bctx = conjoin(&mapped[node_idx][0]);
                leaf_or_recurse(1, &bctx, out)?;
            }
            if !node.branches[0].dead {
                leaf_or_recurse(0, ctx, out)?;
            }
        }
        CellKind::Pmux => {
            let n_sel = mapped[node_idx].len();
            for i in 0..n_sel {
                if node.branches[i].dead {
                    continue;
                }
                let bctx = conjoin(&mapped[node_idx][i]);
                leaf_or_recurse(i, &bctx, out)?;
            }
            if !node.branches[n_sel].dead {
                leaf_or_recurse(n_sel, ctx, out)?;
            }
        }
        _ => return None,
    }
    Some(())
}

/// Case trees recognized across the extracted forest, keyed by tree index.
pub fn detect_candidates(
    n: &Netlist,
    idx: &GraphIndex,
    trees: &[MuxTree],
) -> Vec<(usize, CaseFunction)> {
    let cases: Vec<Option<CaseFunction>> = (0..trees.len())
        .into_par_iter()
        .map(|ti| extract_case(n, idx, &trees[ti]))
        .collect();
    cases
        .into_iter()
        .enumerate()
        .filter_map(|(ti, f)| f.map(|f| (ti, f)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AddNode {
    Terminal(SigSpec),
    Internal {
        bit: usize,
        child0: usize,
        child1: usize,
    },
}

/// Decision diagram over the control bits with data terminals. Children
/// precede parents in the store; terminals are always shared, internal
/// nodes only under hash-consing.
#[derive(Debug, Clone)]
pub struct Add {
    pub nodes: Vec<AddNode>,
    pub root: usize,
}

impl Add {
    pub fn internal_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, AddNode::Internal { .. }))
            .count()
    }

    pub fn eval(&self, assign: &[bool]) -> &SigSpec {
        let mut i = self.root;
        loop {
            match &self.nodes[i] {
                AddNode::Terminal(t) => return t,
                AddNode::Internal { bit, child0, child1 } => {
                    i = if assign[*bit] { *child1 } else { *child0 };
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct AddOptions {
    /// Forced test order; None picks greedily by terminal-type count.
    pub order: Option<Vec<usize>>,
    /// Merge structurally identical internal nodes.
    pub hash_consing: bool,
}

impl Default for AddOptions {
    fn default() -> Self {
        AddOptions {
            order: None,
            hash_consing: true,
        }
    }
}

struct AddBuilder<'a> {
    h: usize,
    /// Patterns as (cube, terminal id), the default appended as all-Any,
    /// so every assignment matches something.
    patterns: Vec<(Vec<CaseBit>, usize)>,
    terminals: Vec<&'a SigSpec>,
    reach_memo: HashMap<(u32, u32), BTreeSet<usize>>,
    term_nodes: HashMap<usize, usize>,
    cons: HashMap<(usize, usize, usize), usize>,
    nodes: Vec<AddNode>,
}

enum Scan {
    /// The first live pattern is fully determined and shadows the rest.
    Settled(usize),
    /// The first live pattern still tests this unfixed bit.
    Split(usize),
}

impl<'a> AddBuilder<'a> {
    fn new(f: &'a CaseFunction) -> Self {
        let mut terminals: Vec<&SigSpec> = Vec::new();
        let mut ids: HashMap<&SigSpec, usize> = HashMap::new();
        let mut tid = |t: &'a SigSpec| -> usize {
            *ids.entry(t).or_insert_with(|| {
                terminals.push(t);
                terminals.len() - 1
            })
        };
        let mut patterns: Vec<(Vec<CaseBit>, usize)> = f
            .patterns
            .iter()
            .map(|p| (p.bits.clone(), tid(&p.terminal)))
            .collect();
        patterns.push((vec![CaseBit::Any; f.height()], tid(&f.default)));
        AddBuilder {
            h: f.height(),
            patterns,
            terminals,
            reach_memo: HashMap::new(),
            term_nodes: HashMap::new(),
            cons: HashMap::new(),
            nodes: Vec::new(),
        }
    }

    fn scan(&self, mask: u32, vals: u32) -> Scan {
        for (cube, t) in &self.patterns {
            let mut dead = false;
            let mut free_bit = None;
            for (i, &cb) in cube.iter().enumerate() {
                let want = match cb {
                    CaseBit::Any => continue,
                    CaseBit::One => true,
                    CaseBit::Zero => false,
                };
                if mask >> i & 1 == 1 {
                    if (vals >> i & 1 == 1) != want {
                        dead = true;
                        break;
                    }
                } else if free_bit.is_none() {
                    free_bit = Some(i);
                }
            }
            if dead {
                continue;
            }
            return match free_bit {
                None => Scan::Settled(*t),
                Some(b) => Scan::Split(b),
            };
        }
        unreachable!("the trailing all-Any default always matches")
    }

    /// Terminals actually selected by some completion of the fixed bits.
    /// Exact, not the surviving-pattern overapproximation: a default
    /// shadowed on every remaining assignment does not count.
    fn reach(&mut self, mask: u32, vals: u32) -> BTreeSet<usize> {
        if let Some(r) = self.reach_memo.get(&(mask, vals)) {
            return r.clone();
        }
        let out = match self.scan(mask, vals) {
            Scan::Settled(t) => BTreeSet::from([t]),
            Scan::Split(b) => {
                let m2 = mask | 1 << b;
                let mut r = self.reach(m2, vals);
                r.extend(self.reach(m2, vals | 1 << b));
                r
            }
        };
        self.reach_memo.insert((mask, vals), out.clone());
        out
    }

    fn pick_bit(&mut self, mask: u32, vals: u32, opts: &AddOptions) -> usize {
        if let Some(order) = &opts.order {
            return *order
                .iter()
                .find(|&&b| mask >> b & 1 == 0)
                .expect("forced order ran out before the function settled");
        }
        let mut best: Option<(usize, usize)> = None;
        for b in 0..self.h {
            if mask >> b & 1 == 1 {
                continue;
            }
            let m2 = mask | 1 << b;
            let score = self.reach(m2, vals).len() + self.reach(m2, vals | 1 << b).len();
            if best.map_or(true, |(s, _)| score < s) {
                best = Some((score, b));
            }
        }
        best.expect("non-constant function has an unfixed bit").1
    }

    fn terminal_node(&mut self, t: usize) -> usize {
        if let Some(&id) = self.term_nodes.get(&t) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(AddNode::Terminal(self.terminals[t].clone()));
        self.term_nodes.insert(t, id);
        id
    }

    fn build(&mut self, mask: u32, vals: u32, opts: &AddOptions) -> usize {
        let r = self.reach(mask, vals);
        if r.len() == 1 {
            let t = *r.iter().next().unwrap();
            return self.terminal_node(t);
        }
        let bit = self.pick_bit(mask, vals, opts);
        let c0 = self.build(mask | 1 << bit, vals, opts);
        let c1 = self.build(mask | 1 << bit, vals | 1 << bit, opts);
        if c0 == c1 {
            return c0;
        }
        if opts.hash_consing {
            if let Some(&id) = self.cons.get(&(bit, c0, c1)) {
                return id;
            }
        }
        let id = self.nodes.len();
        self.nodes.push(AddNode::Internal {
            bit,
            child0: c0,
            child1: c1,
        });
        if opts.hash_consing {
            self.cons.insert((bit, c0, c1), id);
        }
        id
    }
}

pub fn build_add(f: &CaseFunction) -> Add {
    build_add_with(f, &AddOptions::default())
}

pub fn build_add_with(f: &CaseFunction, opts: &AddOptions) -> Add {
    assert!(
        f.height() <= HARD_HEIGHT_CAP,
        "control width {} above the hard cap",
        f.height()
    );
    let mut b = AddBuilder::new(f);
    let root = b.build(0, 0, opts);
    Add {
        nodes: b.nodes,
        root,
    }
}

/// Cofactor terminal-type score per control bit at the root, in bit
/// order. The chosen bit is the minimum.
pub fn root_scores(f: &CaseFunction) -> Vec<usize> {
    let mut b = AddBuilder::new(f);
    (0..f.height())
        .map(|bit| {
            let m = 1u32 << bit;
            b.reach(m, 0).len() + b.reach(m, m).len()
        })
        .collect()
}

/// An accepted restructuring: everything `rebuild` needs plus the cost
/// figures that justified it.
#[derive(Debug, Clone)]
pub struct RebuildPlan {
    pub root: CellId,
    pub control: SigSpec,
    pub add: Add,
    pub tree_cells: Vec<CellId>,
    pub removable: Vec<CellId>,
    pub height: usize,
    pub width: usize,
    pub old_mux_units: usize,
    pub credit: i64,
    pub savings: i64,
}

/// AND-count of one cell under the area model; used both for the removed
/// credit and implicitly for the 3w-per-mux debit.
fn gate_cost(cell: &Cell) -> i64 {
    match cell.kind {
        CellKind::Eq => {
            let a = cell.port("A").map(|s| s.width()).unwrap_or(1);
            let b = cell.port("B").map(|s| s.width()).unwrap_or(1);
            let w = a.max(b) as i64;
            let vs_const = cell
                .port("A")
                .map(|s| s.bits().iter().all(SigBit::is_const))
                .unwrap_or(false)
                || cell
                    .port("B")
                    .map(|s| s.bits().iter().all(SigBit::is_const))
                    .unwrap_or(false);
            if vs_const {
                w - 1
            } else {
                4 * w - 1
            }
        }
        CellKind::LogicNot => cell.port("A").map(|s| s.width()).unwrap_or(1) as i64 - 1,
        CellKind::Not => 0,
        CellKind::Or | CellKind::LogicOr => 1,
        _ => 0,
    }
}

/// Cost-model figures and the removable set for one tree. None only when
/// the control misses the height cap; the savings sign is left to the
/// caller.
fn make_plan(
    n: &Netlist,
    idx: &GraphIndex,
    tree: &MuxTree,
    f: &CaseFunction,
    add: &Add,
    height_cap: usize,
) -> Option<RebuildPlan> {
    let h = f.height();
    if h > height_cap {
        return None;
    }
    let width = tree.nodes[0].width;
    let tree_cells: BTreeSet<CellId> = tree.cells().collect();
    let old_mux_units: usize = tree_cells
        .iter()
        .map(|&id| {
            let c = n.cell(id);
            match c.kind {
                CellKind::Pmux => c.port("S").map(|s| s.width()).unwrap_or(1),
                _ => 1,
            }
        })
        .sum();

    // A condition gate is only credited when its whole fanout dies with
    // the tree: inside the tree itself or inside other removed gates.
    let mut removable = scan_tree(n, idx, tree).cone;
    loop {
        let doomed = removable.clone();
        let mut dropped = false;
        removable.retain(|&id| {
            let survives = n.cell(id).outputs().iter().all(|(_, spec)| {
                spec.bits().iter().all(|bit| {
                    let SigBit::Net(m) = bit else { return true };
                    !idx.feeds_module_output(*m)
                        && idx
                            .fanouts(*m)
                            .iter()
                            .all(|f| tree_cells.contains(&f.cell) || doomed.contains(&f.cell))
                })
            });
            if !survives {
                dropped = true;
            }
            survives
        });
        if !dropped {
            break;
        }
    }

    let credit: i64 = removable.iter().map(|&id| gate_cost(n.cell(id))).sum();
    let delta = old_mux_units as i64 - add.internal_count() as i64;
    let savings = credit + 3 * width as i64 * delta;
    Some(RebuildPlan {
        root: tree.root,
        control: f.control.clone(),
        add: add.clone(),
        tree_cells: tree_cells.into_iter().collect(),
        removable: removable.into_iter().collect(),
        height: h,
        width,
        old_mux_units,
        credit,
        savings,
    })
}

/// Gate the rebuild on the cost model: freed condition gates plus the mux
/// delta must come out strictly positive and the control must fit the cap.
pub fn check_rebuild(
    n: &Netlist,
    idx: &GraphIndex,
    tree: &MuxTree,
    f: &CaseFunction,
    add: &Add,
    height_cap: usize,
) -> Option<RebuildPlan> {
    make_plan(n, idx, tree, f, add, height_cap).filter(|p| p.savings > 0)
}

/// Replace the tree with one mux per internal node. The old root's output
/// nets move onto the new root so consumers stay untouched; a constant
/// diagram substitutes the terminal directly. Removes exactly the plan's
/// own cells, so pending plans for other trees stay applicable.
pub fn rebuild(n: &mut Netlist, plan: &RebuildPlan) {
    let root_cell = n.cell(plan.root);
    let base = root_cell.name.clone();
    let y = root_cell.port("Y").expect("root Y").clone();
    for &id in &plan.tree_cells {
        n.remove_cell(id);
    }
    for &id in &plan.removable {
        n.remove_cell(id);
    }
    match &plan.add.nodes[plan.add.root] {
        AddNode::Terminal(t) => {
            for (k, bit) in y.bits().iter().enumerate() {
                if let SigBit::Net(m) = bit {
                    n.replace_net_uses(*m, t[k]);
                }
            }
        }
        AddNode::Internal { .. } => {
            let mut taken: BTreeSet<String> = n.cells().map(|(_, c)| c.name.clone()).collect();
            let mut sigs: Vec<Option<SigSpec>> = vec![None; plan.add.nodes.len()];
            for (i, node) in plan.add.nodes.iter().enumerate() {
                match node {
                    AddNode::Terminal(t) => sigs[i] = Some(t.clone()),
                    AddNode::Internal { bit, child0, child1 } => {
                        debug_assert!(*child0 < i && *child1 < i, "children precede parents");
                        let y_spec = if i == plan.add.root {
                            y.clone()
                        } else {
                            SigSpec::from_nets((0..plan.width).map(|_| n.fresh_net()))
                        };
                        let mut name = format!("{base}__add{i}");
                        while taken.contains(&name) {
                            name.push('_');
                        }
                        taken.insert(name.clone());
                        n.add_cell(Cell {
                            name,
                            kind: CellKind::Mux,
                            connections: [
                                ("A".to_string(), sigs[*child0].clone().unwrap()),
                                ("B".to_string(), sigs[*child1].clone().unwrap()),
                                ("S".to_string(), SigSpec(vec![plan.control[*bit]])),
                                ("Y".to_string(), y_spec.clone()),
                            ]
                            .into_iter()
                            .collect(),
                            parameters: BTreeMap::new(),
                            port_directions: BTreeMap::new(),
                        });
                        sigs[i] = Some(y_spec);
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CandidateReport {
    pub root: String,
    pub height: usize,
    pub width: usize,
    pub old_mux_units: usize,
    pub add_internals: usize,
    pub credit: i64,
    pub savings: i64,
    pub accepted: bool,
    /// Passed the cost gate but rolled back by the area recheck.
    pub area_rejected: bool,
}

#[derive(Debug, Clone, Default)]
pub struct RebuildStats {
    pub trees: usize,
    pub candidates: usize,
    pub accepted: usize,
    pub reports: Vec<CandidateReport>,
}

impl RebuildStats {
    pub fn fired(&self) -> bool {
        self.accepted > 0
    }
}

fn resolve(map: &BTreeMap<u32, SigBit>, mut bit: SigBit) -> SigBit {
    for _ in 0..64 {
        let SigBit::Net(m) = bit else { break };
        match map.get(&m) {
            Some(&next) if next != bit => bit = next,
            _ => break,
        }
    }
    bit
}

fn retarget(spec: &mut SigSpec, map: &BTreeMap<u32, SigBit>) {
    for bit in spec.0.iter_mut() {
        *bit = resolve(map, *bit);
    }
}

/// Run detection, construction, and the cost gate over every tree, then
/// apply the plans one at a time. Each application re-measures the module
/// area and rolls back if the rebuild grew it. A plan the cost model
/// rejects still gets a measured trial and must strictly shrink the area;
/// modules the area mapper cannot model (opaque cells) apply only
/// gate-approved plans.
pub fn restructure(n: &mut Netlist, height_cap: usize) -> RebuildStats {
    let idx = n.build_indices();
    let trees = extract_muxtrees(n, &idx);
    let snapshot: &Netlist = n;
    let analyses: Vec<Option<(CandidateReport, Option<RebuildPlan>)>> = (0..trees.len())
        .into_par_iter()
        .map(|ti| {
            let tree = &trees[ti];
            let f = extract_case(snapshot, &idx, tree)?;
            let add = build_add(&f);
            let plan = make_plan(snapshot, &idx, tree, &f, &add, height_cap);
            let report = CandidateReport {
                root: snapshot.cell(tree.root).name.clone(),
                height: f.height(),
                width: tree.nodes[0].width,
                old_mux_units: plan.as_ref().map(|p| p.old_mux_units).unwrap_or(0),
                add_internals: add.internal_count(),
                credit: plan.as_ref().map(|p| p.credit).unwrap_or(0),
                savings: plan.as_ref().map(|p| p.savings).unwrap_or(0),
                accepted: false,
                area_rejected: false,
            };
            Some((report, plan))
        })
        .collect();

    let mut stats = RebuildStats {
        trees: trees.len(),
        ..Default::default()
    };
    // Applied root-terminal substitutions, so later plans that captured
    // the replaced nets in their terminals or control stay current.
    let mut subst: BTreeMap<u32, SigBit> = BTreeMap::new();
    for entry in analyses.into_iter().flatten() {
        let (mut report, plan) = entry;
        stats.candidates += 1;
        if let Some(mut plan) = plan {
            retarget(&mut plan.control, &subst);
            for node in plan.add.nodes.iter_mut() {
                if let AddNode::Terminal(t) = node {
                    retarget(t, &subst);
                }
            }
            let gated = plan.savings > 0;
            let before = n.clone();
            let area_before = crate::aig::map_to_aig(&before).ok().map(|a| a.area());
            let root_y = n.cell(plan.root).port("Y").expect("root Y").clone();
            rebuild(n, &plan);
            let grew = match area_before {
                Some(a0) => match crate::aig::map_to_aig(n) {
                    Ok(a) if gated => a.area() > a0,
                    Ok(a) => a.area() >= a0,
                    Err(_) => true,
                },
                None => !gated,
            };
            if grew {
                *n = before;
                report.area_rejected = true;
            } else {
                report.accepted = true;
                stats.accepted += 1;
                if let AddNode::Terminal(t) = &plan.add.nodes[plan.add.root] {
                    for (k, bit) in root_y.bits().iter().enumerate() {
                        if let SigBit::Net(m) = bit {
                            subst.insert(*m, t[k]);
                        }
                    }
                }
            }
        }
        stats.reports.push(report);
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::NetlistSim;
    use crate::netlist::PortDir;
    use std::hash::{Hash, Hasher};

    fn net(n: u32) -> SigSpec {
        SigSpec::from_net(n)
    }

    fn nets(list: impl IntoIterator<Item = u32>) -> SigSpec {
        SigSpec::from_nets(list)
    }

    fn cell(name: &str, kind: CellKind, conns: &[(&str, SigSpec)]) -> Cell {
        Cell {
            name: name.to_string(),
            kind,
            connections: conns
                .iter()
                .map(|(p, s)| (p.to_string(), s.clone()))
                .collect(),
            parameters: BTreeMap::new(),
            port_directions: BTreeMap::new(),
        }
    }

    fn mux(name: &str, s: SigBit, a: SigSpec, b: SigSpec, y: SigSpec) -> Cell {
        cell(
            name,
            CellKind::Mux,
            &[("A", a), ("B", b), ("S", SigSpec(vec![s])), ("Y", y)],
        )
    }

    fn eq_const(name: &str, a: SigSpec, pattern: &[Const], y: u32) -> Cell {
        let b = SigSpec(pattern.iter().map(|&c| SigBit::Const(c)).collect());
        cell(name, CellKind::Eq, &[("A", a), ("B", b), ("Y", net(y))])
    }

    const Z: Const = Const::Zero;
    const O: Const = Const::One;

    /// Same outputs on a spread of hashed input words.
    fn same_function(a: &Netlist, b: &Netlist) -> bool {
        let (ia, ib) = (a.build_indices(), b.build_indices());
        let (sa, sb) = (NetlistSim::new(a, &ia), NetlistSim::new(b, &ib));
        let words = |sim: &NetlistSim, round: u64| -> Vec<u64> {
            sim.pseudo_inputs()
                .map(|k| {
                    let mut h = std::collections::hash_map::DefaultHasher::new();
                    k.hash(&mut h);
                    round.hash(&mut h);
                    h.finish()
                })
                .collect()
        };
        (0..16).all(|round| {
            let oa: BTreeMap<_, _> = sa
                .pseudo_outputs()
                .cloned()
                .zip(sa.output_words(&sa.run(&words(&sa, round))))
                .collect();
            let ob: BTreeMap<_, _> = sb
                .pseudo_outputs()
                .cloned()
                .zip(sb.output_words(&sb.run(&words(&sb, round))))
                .collect();
            oa == ob
        })
    }

    /// Priority chain for a 2-bit case: 00 -> p0, 01 -> p1, 10 -> p2,
    /// default p3, data width `w`. Condition nets 3..5, data from 10.
    fn case_chain(w: usize, eq_outputs_exported: bool) -> Netlist {
        let mut nl = Netlist::new("chain");
        nl.add_port("S", PortDir::Input, nets([1, 2]));
        let p = |k: usize| nets((0..w).map(move |i| 10 + (k * w + i) as u32));
        for k in 0..4 {
            nl.add_port(format!("p{k}"), PortDir::Input, p(k));
        }
        let t2 = nets((0..w).map(|i| 100 + i as u32));
        let t1 = nets((0..w).map(|i| 200 + i as u32));
        let y = nets((0..w).map(|i| 300 + i as u32));
        nl.add_port("y", PortDir::Output, y.clone());
        nl.add_cell(eq_const("e0", nets([1, 2]), &[Z, Z], 3));
        nl.add_cell(eq_const("e1", nets([1, 2]), &[O, Z], 4));
        nl.add_cell(eq_const("e2", nets([1, 2]), &[Z, O], 5));
        nl.add_cell(mux("m2", SigBit::Net(5), p(3), p(2), t2.clone()));
        nl.add_cell(mux("m1", SigBit::Net(4), t2, p(1), t1.clone()));
        nl.add_cell(mux("m0", SigBit::Net(3), t1, p(0), y));
        if eq_outputs_exported {
            for (i, c) in [3u32, 4, 5].iter().enumerate() {
                nl.add_port(format!("c{i}"), PortDir::Output, net(*c));
            }
        }
        nl.validate().unwrap();
        nl
    }

    fn chain_function() -> CaseFunction {
        let nl = case_chain(1, false);
        let idx = nl.build_indices();
        let trees = extract_muxtrees(&nl, &idx);
        assert_eq!(trees.len(), 1);
        extract_case(&nl, &idx, &trees[0]).expect("chain is a candidate")
    }

    #[test]
    fn priority_chain_detects_as_case() {
        let f = chain_function();
        assert_eq!(f.control, nets([1, 2]));
        assert_eq!(f.patterns.len(), 3);
        use CaseBit::*;
        assert_eq!(f.patterns[0].bits, vec![Zero, Zero]);
        assert_eq!(f.patterns[1].bits, vec![One, Zero]);
        assert_eq!(f.patterns[2].bits, vec![Zero, One]);
        assert_eq!(f.patterns[0].terminal, net(10));
        assert_eq!(f.default, net(13));
    }

    /// The same case built as a balanced tree with an or-combined root
    /// condition recognizes as the identical function.
    #[test]
    fn balanced_tree_with_or_condition_matches_chain() {
        let mut nl = Netlist::new("chain");
        nl.add_port("S", PortDir::Input, nets([1, 2]));
        for k in 0..4u32 {
            nl.add_port(format!("p{k}"), PortDir::Input, net(10 + k));
        }
        nl.add_port("y", PortDir::Output, net(30));
        nl.add_cell(eq_const("e0", nets([1, 2]), &[Z, Z], 3));
        nl.add_cell(eq_const("e1", nets([1, 2]), &[O, Z], 4));
        nl.add_cell(eq_const("e2", nets([1, 2]), &[Z, O], 5));
        nl.add_cell(cell(
            "root_or",
            CellKind::Or,
            &[("A", net(3)), ("B", net(4)), ("Y", net(6))],
        ));
        nl.add_cell(mux("left", SigBit::Net(3), net(11), net(10), net(20)));
        nl.add_cell(mux("right", SigBit::Net(5), net(13), net(12), net(21)));
        nl.add_cell(mux("top", SigBit::Net(6), net(21), net(20), net(30)));
        nl.validate().unwrap();
        let idx = nl.build_indices();
        let trees = extract_muxtrees(&nl, &idx);
        assert_eq!(trees.len(), 1);
        let f = extract_case(&nl, &idx, &trees[0]).expect("balanced form is a candidate");
        assert_eq!(f, chain_function());
    }

    #[test]
    fn mixed_control_signals_are_rejected() {
        let mut nl = Netlist::new("mixed");
        nl.add_port("S", PortDir::Input, nets([1, 2]));
        nl.add_port("T", PortDir::Input, nets([6, 7]));
        for k in 0..3u32 {
            nl.add_port(format!("p{k}"), PortDir::Input, net(10 + k));
        }
        nl.add_port("y", PortDir::Output, net(30));
        nl.add_cell(eq_const("e0", nets([1, 2]), &[Z, Z], 3));
        nl.add_cell(eq_const("e1", nets([6, 7]), &[O, Z], 4));
        nl.add_cell(mux("m1", SigBit::Net(4), net(12), net(11), net(20)));
        nl.add_cell(mux("m0", SigBit::Net(3), net(20), net(10), net(30)));
        nl.validate().unwrap();
        let idx = nl.build_indices();
        let trees = extract_muxtrees(&nl, &idx);
        assert!(detect_candidates(&nl, &idx, &trees).is_empty());
    }

    /// 3'b1zz -> p0, 3'b01z -> p1, 3'b001 -> p2, default p3 over control
    /// bits [S0, S1, S2].
    fn assignment_function() -> CaseFunction {
        use CaseBit::*;
        let pat = |bits: Vec<CaseBit>, t: u32| CasePattern {
            bits,
            terminal: net(t),
        };
        CaseFunction {
            control: nets([1, 2, 3]),
            patterns: vec![
                pat(vec![Any, Any, One], 10),
                pat(vec![Any, One, Zero], 11),
                pat(vec![One, Zero, Zero], 12),
            ],
            default: net(13),
        }
    }

    #[test]
    fn cofactor_scores_match_hand_counts() {
        // S0 leaves {p0,p1,p3} and {p0,p1,p2}, S2 splits {p1,p2,p3} from
        // {p0}; the shadowed default is excluded on the S0=1 side.
        assert_eq!(root_scores(&assignment_function()), vec![6, 5, 4]);
    }

    #[test]
    fn greedy_order_needs_three_nodes() {
        let f = assignment_function();
        let add = build_add(&f);
        assert_eq!(add.internal_count(), 3);
        match add.nodes[add.root] {
            AddNode::Internal { bit, .. } => assert_eq!(bit, 2),
            _ => panic!("constant diagram for a non-constant function"),
        }
        for a in 0u32..8 {
            let assign: Vec<bool> = (0..3).map(|i| a >> i & 1 == 1).collect();
            assert_eq!(add.eval(&assign), f.eval(&assign));
        }
    }

    #[test]
    fn forced_worst_order_counts_depend_on_consing() {
        let f = assignment_function();
        let forced = |consing: bool| {
            build_add_with(
                &f,
                &AddOptions {
                    order: Some(vec![0, 1, 2]),
                    hash_consing: consing,
                },
            )
        };
        let plain = forced(false);
        assert_eq!(plain.internal_count(), 7);
        let consed = forced(true);
        assert_eq!(consed.internal_count(), 6);
        for a in 0u32..8 {
            let assign: Vec<bool> = (0..3).map(|i| a >> i & 1 == 1).collect();
            assert_eq!(plain.eval(&assign), f.eval(&assign));
            assert_eq!(consed.eval(&assign), f.eval(&assign));
        }
    }

    #[test]
    fn constant_function_is_a_lone_terminal() {
        let f = CaseFunction {
            control: nets([1, 2]),
            patterns: vec![CasePattern {
                bits: vec![CaseBit::Zero, CaseBit::Any],
                terminal: net(10),
            }],
            default: net(10),
        };
        let add = build_add(&f);
        assert_eq!(add.internal_count(), 0);
        assert!(matches!(&add.nodes[add.root], AddNode::Terminal(t) if *t == net(10)));
    }

    #[test]
    fn no_path_tests_a_bit_twice() {
        let add = build_add(&assignment_function());
        fn walk(add: &Add, node: usize, seen: &mut Vec<usize>) {
            if let AddNode::Internal { bit, child0, child1 } = add.nodes[node] {
                assert!(!seen.contains(&bit), "bit {bit} retested on one path");
                seen.push(bit);
                walk(add, child0, seen);
                walk(add, child1, seen);
                seen.pop();
            }
        }
        walk(&add, add.root, &mut Vec::new());
    }

    #[test]
    fn chain_rebuild_passes_the_gate_and_preserves_the_function() {
        let mut nl = case_chain(8, false);
        let golden = nl.clone();
        let idx = nl.build_indices();
        let trees = extract_muxtrees(&nl, &idx);
        let f = extract_case(&nl, &idx, &trees[0]).unwrap();
        let add = build_add(&f);
        let plan = check_rebuild(&nl, &idx, &trees[0], &f, &add, 8).expect("gate accepts");
        // Three eq cells of width 2 are tree-exclusive, mux counts tie.
        assert_eq!(plan.credit, 3);
        assert_eq!(plan.savings, 3);
        assert_eq!(plan.old_mux_units, 3);
        rebuild(&mut nl, &plan);
        assert_eq!(nl.cell_count(), 3);
        for (_, c) in nl.cells() {
            assert_eq!(c.kind, CellKind::Mux);
            let s = c.port("S").unwrap();
            assert!(matches!(s[0], SigBit::Net(1) | SigBit::Net(2)));
        }
        assert!(same_function(&golden, &nl));
    }

    #[test]
    fn exported_eq_outputs_kill_the_credit() {
        let nl = case_chain(8, true);
        let idx = nl.build_indices();
        let trees = extract_muxtrees(&nl, &idx);
        let f = extract_case(&nl, &idx, &trees[0]).unwrap();
        let add = build_add(&f);
        assert!(check_rebuild(&nl, &idx, &trees[0], &f, &add, 8).is_none());
    }

    /// rebuild() itself on a hand-made plan: one mux whose select runs
    /// through a logic_not ends up testing the control bit directly.
    #[test]
    fn single_inverted_control_rebuilds_onto_the_bit() {
        let mut nl = Netlist::new("inv");
        nl.add_port("s", PortDir::Input, net(1));
        nl.add_port("a", PortDir::Input, net(2));
        nl.add_port("b", PortDir::Input, net(3));
        nl.add_port("y", PortDir::Output, net(5));
        nl.add_cell(cell(
            "cond",
            CellKind::LogicNot,
            &[("A", net(1)), ("Y", net(4))],
        ));
        nl.add_cell(mux("m", SigBit::Net(4), net(2), net(3), net(5)));
        nl.validate().unwrap();
        let golden = nl.clone();
        let idx = nl.build_indices();
        let trees = extract_muxtrees(&nl, &idx);
        let f = extract_case(&nl, &idx, &trees[0]).unwrap();
        assert_eq!(f.control, net(1));
        let add = build_add(&f);
        assert_eq!(add.internal_count(), 1);
        // A 1-bit inverter is free in the area model, so the gate rejects;
        // drive rebuild directly to pin its output shape.
        assert!(check_rebuild(&nl, &idx, &trees[0], &f, &add, 8).is_none());
        let plan = RebuildPlan {
            root: trees[0].root,
            control: f.control.clone(),
            add,
            tree_cells: trees[0].cells().collect(),
            removable: vec![nl.find_cell("cond").unwrap()],
            height: 1,
            width: 1,
            old_mux_units: 1,
            credit: 0,
            savings: 0,
        };
        rebuild(&mut nl, &plan);
        assert_eq!(nl.cell_count(), 1);
        let (_, m) = nl.cells().next().unwrap();
        assert_eq!(m.port("S"), Some(&net(1)));
        assert!(same_function(&golden, &nl));
    }

    /// Sliced eq conditions plus a bare root bit anchor one control.
    #[test]
    fn bare_bit_and_sliced_conditions_share_the_control() {
        let mut nl = Netlist::new("casez");
        nl.add_port("S", PortDir::Input, nets([1, 2, 3]));
        for k in 0..4u32 {
            nl.add_port(format!("p{k}"), PortDir::Input, net(10 + k));
        }
        nl.add_port("y", PortDir::Output, net(30));
        nl.add_cell(eq_const("e1", nets([2, 3]), &[O, Z], 4));
        nl.add_cell(eq_const("e2", nets([1, 2, 3]), &[O, Z, Z], 5));
        nl.add_cell(mux("m2", SigBit::Net(5), net(13), net(12), net(20)));
        nl.add_cell(mux("m1", SigBit::Net(4), net(20), net(11), net(21)));
        nl.add_cell(mux("m0", SigBit::Net(3), net(21), net(10), net(30)));
        nl.validate().unwrap();
        let golden = nl.clone();
        let idx = nl.build_indices();
        let trees = extract_muxtrees(&nl, &idx);
        let f = extract_case(&nl, &idx, &trees[0]).expect("bare bit anchors");
        assert_eq!(f.height(), 3);
        assert_eq!(f.control, nets([2, 3, 1]));
        let add = build_add(&f);
        let plan = check_rebuild(&nl, &idx, &trees[0], &f, &add, 8).expect("accepted");
        rebuild(&mut nl, &plan);
        assert!(same_function(&golden, &nl));
    }

    #[test]
    fn overlapping_pmux_conditions_are_rejected() {
        let mut nl = Netlist::new("overlap");
        nl.add_port("S", PortDir::Input, nets([1, 2]));
        for k in 0..3u32 {
            nl.add_port(format!("p{k}"), PortDir::Input, net(10 + k));
        }
        nl.add_port("y", PortDir::Output, net(30));
        nl.add_cell(eq_const("e0", nets([1, 2]), &[Z, Z], 3));
        nl.add_cell(cell(
            "n0",
            CellKind::LogicNot,
            &[("A", net(1)), ("Y", net(4))],
        ));
        nl.add_cell(cell(
            "pm",
            CellKind::Pmux,
            &[
                ("A", net(12)),
                ("B", nets([10, 11])),
                ("S", nets([3, 4])),
                ("Y", net(30)),
            ],
        ));
        nl.validate().unwrap();
        let idx = nl.build_indices();
        let trees = extract_muxtrees(&nl, &idx);
        // S=00 satisfies both conditions at once.
        assert!(detect_candidates(&nl, &idx, &trees).is_empty());
    }

    #[test]
    fn disjoint_pmux_case_rebuilds() {
        let mut nl = Netlist::new("pmcase");
        nl.add_port("S", PortDir::Input, nets([1, 2]));
        for k in 0..3u32 {
            nl.add_port(format!("p{k}"), PortDir::Input, net(10 + k));
        }
        nl.add_port("y", PortDir::Output, net(30));
        nl.add_cell(eq_const("e0", nets([1, 2]), &[Z, Z], 3));
        nl.add_cell(eq_const("e1", nets([1, 2]), &[O, Z], 4));
        nl.add_cell(cell(
            "pm",
            CellKind::Pmux,
            &[
                ("A", net(12)),
                ("B", nets([10, 11])),
                ("S", nets([3, 4])),
                ("Y", net(30)),
            ],
        ));
        nl.validate().unwrap();
        let golden = nl.clone();
        let idx = nl.build_indices();
        let trees = extract_muxtrees(&nl, &idx);
        let f = extract_case(&nl, &idx, &trees[0]).expect("disjoint selects qualify");
        assert_eq!(f.patterns.len(), 2);
        assert_eq!(f.default, net(12));
        let add = build_add(&f);
        assert_eq!(add.internal_count(), 2);
        let plan = check_rebuild(&nl, &idx, &trees[0], &f, &add, 8).expect("accepted");
        rebuild(&mut nl, &plan);
        assert_eq!(nl.cell_count(), 2);
        assert!(same_function(&golden, &nl));
    }
}
