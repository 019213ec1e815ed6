//! Redundancy elimination driven by local satisfiability queries.
//!
//! For every mux tree, walk top-down carrying the path facts. At each node
//! the select nets are deduced against a radius-limited sub-graph of the
//! surrounding logic: cheap inference rules first, exhaustive simulation
//! when few nets are free, two SAT calls otherwise. A select proven
//! constant collapses branches exactly like a context-known select; facts
//! proven inconsistent mark the whole path dead and the parent routes
//! around it.
//!
//! Before a query the sub-graph is pruned to the backward cone of the
//! target and the fact nets. Logic outside that cone can tighten neither
//! the target nor the facts, so pruning never changes a verdict.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::muxtree::{
    apply_rewrites, bypass_target, data_const_rewrites, extract_muxtrees, MuxTree, PathContext,
    Rewrite,
};
use crate::netlist::{Cell, CellId, CellKind, Const, GraphIndex, Netlist, SigBit};
use crate::sat::{self, SimOutcome, SolveResult};

/// Knobs for the query pipeline. Defaults follow the CLI.
#[derive(Debug, Clone)]
pub struct SatConfig {
    /// Sub-graph radius in cells behind each select net.
    pub k: usize,
    /// Exhaustive simulation handles up to this many free nets.
    pub sim_threshold: usize,
    /// SAT handles up to this many free nets; beyond it the query is
    /// skipped.
    pub sat_input_max: usize,
    /// Conflict budget per SAT call.
    pub conflict_cap: u64,
    /// Directory for DIMACS dumps of every SAT query.
    pub dump_cnf: Option<std::path::PathBuf>,
}

impl Default for SatConfig {
    fn default() -> Self {
        SatConfig {
            k: 5,
            sim_threshold: 12,
            sat_input_max: 64,
            conflict_cap: 100_000,
            dump_cnf: None,
        }
    }
}

/// Cells within distance `k` behind a growing set of root nets. Expansion
/// stops at flip-flops, opaque cells, and module inputs; nets on the rim
/// stay free.
#[derive(Debug, Clone)]
pub struct SubGraph {
    k: usize,
    /// Best remaining budget each net was expanded with.
    best: BTreeMap<u32, usize>,
    members: BTreeSet<CellId>,
}

impl SubGraph {
    pub fn new(k: usize) -> SubGraph {
        SubGraph {
            k,
            best: BTreeMap::new(),
            members: BTreeSet::new(),
        }
    }

    /// Grow the sub-graph backward from more root nets. Nets reached
    /// earlier with a smaller budget are re-expanded.
    pub fn extend(
        &mut self,
        n: &Netlist,
        idx: &GraphIndex,
        roots: impl IntoIterator<Item = u32>,
    ) {
        let mut queue: Vec<(u32, usize)> = roots.into_iter().map(|r| (r, self.k)).collect();
        while let Some((net, budget)) = queue.pop() {
            if let Some(&b) = self.best.get(&net) {
                if b >= budget {
                    continue;
                }
            }
            self.best.insert(net, budget);
            if budget == 0 {
                continue;
            }
            let Some(c) = idx.driver_cell(net) else {
                continue;
            };
            let cell = n.cell(c);
            if !cell.is_supported() {
                continue;
            }
            self.members.insert(c);
            for (_, sig) in cell.inputs() {
                for bit in sig.bits() {
                    if let SigBit::Net(m) = bit {
                        queue.push((*m, budget - 1));
                    }
                }
            }
        }
    }

    pub fn contains(&self, c: CellId) -> bool {
        self.members.contains(&c)
    }

    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn build_subgraph(n: &Netlist, idx: &GraphIndex, roots: &[u32], k: usize) -> SubGraph {
    let mut sub = SubGraph::new(k);
    sub.extend(n, idx, roots.iter().copied());
    sub
}

/// Restrict `sub` to the backward cone of `roots` (the query target plus
/// every fact net), topologically sorted. Cells outside the cone drive
/// neither the target nor a fact, so dropping them preserves every
/// verdict, including unreachability.
pub fn prune_relevance(
    n: &Netlist,
    idx: &GraphIndex,
    sub: &SubGraph,
    roots: &[u32],
) -> Vec<CellId> {
    let mut keep: BTreeSet<CellId> = BTreeSet::new();
    let mut seen: BTreeSet<u32> = BTreeSet::new();
    let mut queue: Vec<u32> = roots.to_vec();
    while let Some(net) = queue.pop() {
        if !seen.insert(net) {
            continue;
        }
        let Some(c) = idx.driver_cell(net) else {
            continue;
        };
        if sub.contains(c) && keep.insert(c) {
            for (_, sig) in n.cell(c).inputs() {
                for bit in sig.bits() {
                    if let SigBit::Net(m) = bit {
                        queue.push(*m);
                    }
                }
            }
        }
    }
    let rank: HashMap<CellId, usize> = idx
        .topo()
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .collect();
    let mut cells: Vec<CellId> = keep.into_iter().collect();
    cells.sort_by_key(|c| rank[c]);
    cells
}

/// Nets the given cells read without driving, plus any extras, counting a
/// shared unknown-constant input when one appears.
fn free_inputs(n: &Netlist, cells: &[CellId], extras: &[u32]) -> usize {
    let mut driven: BTreeSet<u32> = BTreeSet::new();
    for &id in cells {
        for (_, sig) in n.cell(id).outputs() {
            for bit in sig.bits() {
                if let SigBit::Net(m) = bit {
                    driven.insert(*m);
                }
            }
        }
    }
    let mut free: BTreeSet<u32> = BTreeSet::new();
    let mut has_x = false;
    for &id in cells {
        for (_, sig) in n.cell(id).inputs() {
            for bit in sig.bits() {
                match bit {
                    SigBit::Net(m) if !driven.contains(m) => {
                        free.insert(*m);
                    }
                    SigBit::Const(Const::X) => has_x = true,
                    _ => {}
                }
            }
        }
    }
    for &m in extras {
        if !driven.contains(&m) {
            free.insert(m);
        }
    }
    free.len() + has_x as usize
}

/// Facts derivable from a seed set by local gate rules, run to fixpoint.
#[derive(Debug, Clone, Default)]
pub struct Inferred {
    pub facts: BTreeMap<u32, bool>,
    /// The seed facts are mutually inconsistent with the gates.
    pub contradiction: bool,
}

/// A (bit, want) literal: true exactly when the bit carries `want`.
type Lit = (SigBit, bool);

enum View {
    /// y holds iff every literal holds.
    And { y: u32, lits: Vec<Lit> },
    /// y holds iff some literal holds.
    Or { y: u32, lits: Vec<Lit> },
    Xor { y: u32, a: SigBit, b: SigBit },
    MuxBit {
        y: u32,
        s: SigBit,
        a: SigBit,
        b: SigBit,
    },
}

fn views_of(cell: &Cell) -> Vec<View> {
    let bits = |port: &str| -> Vec<SigBit> {
        cell.port(port)
            .map(|s| s.bits().to_vec())
            .unwrap_or_default()
    };
    let y_nets = |ys: &[SigBit]| -> Vec<Option<u32>> { ys.iter().map(|b| b.as_net()).collect() };
    let mut out = Vec::new();
    match &cell.kind {
        CellKind::Mux => {
            let (a, b, y) = (bits("A"), bits("B"), bits("Y"));
            let s = bits("S")[0];
            for (i, yn) in y_nets(&y).into_iter().enumerate() {
                if let Some(yn) = yn {
                    out.push(View::MuxBit {
                        y: yn,
                        s,
                        a: a[i],
                        b: b[i],
                    });
                }
            }
        }
        CellKind::And | CellKind::Or | CellKind::Xor => {
            let (a, b, y) = (bits("A"), bits("B"), bits("Y"));
            for (i, yn) in y_nets(&y).into_iter().enumerate() {
                let Some(yn) = yn else { continue };
                out.push(match cell.kind {
                    CellKind::And => View::And {
                        y: yn,
                        lits: vec![(a[i], true), (b[i], true)],
                    },
                    CellKind::Or => View::Or {
                        y: yn,
                        lits: vec![(a[i], true), (b[i], true)],
                    },
                    _ => View::Xor {
                        y: yn,
                        a: a[i],
                        b: b[i],
                    },
                });
            }
        }
        CellKind::Not => {
            let (a, y) = (bits("A"), bits("Y"));
            for (i, yn) in y_nets(&y).into_iter().enumerate() {
                if let Some(yn) = yn {
                    out.push(View::And {
                        y: yn,
                        lits: vec![(a[i], false)],
                    });
                }
            }
        }
        CellKind::LogicNot => {
            let (a, y) = (bits("A"), bits("Y"));
            if let Some(yn) = y[0].as_net() {
                out.push(View::And {
                    y: yn,
                    lits: a.iter().map(|&bit| (bit, false)).collect(),
                });
            }
        }
        CellKind::ReduceAnd | CellKind::ReduceOr | CellKind::ReduceBool => {
            let (a, y) = (bits("A"), bits("Y"));
            if let Some(yn) = y[0].as_net() {
                let lits: Vec<Lit> = a.iter().map(|&bit| (bit, true)).collect();
                out.push(if cell.kind == CellKind::ReduceAnd {
                    View::And { y: yn, lits }
                } else {
                    View::Or { y: yn, lits }
                });
            }
        }
        CellKind::LogicAnd | CellKind::LogicOr => {
            let (a, b, y) = (bits("A"), bits("B"), bits("Y"));
            if a.len() == 1 && b.len() == 1 {
                if let Some(yn) = y[0].as_net() {
                    let lits = vec![(a[0], true), (b[0], true)];
                    out.push(if cell.kind == CellKind::LogicAnd {
                        View::And { y: yn, lits }
                    } else {
                        View::Or { y: yn, lits }
                    });
                }
            }
        }
        CellKind::Eq => {
            // Equality against a full constant is a conjunction of bit
            // literals; anything else is left to simulation or SAT.
            let (mut a, mut b, y) = (bits("A"), bits("B"), bits("Y"));
            if a.iter().all(|x| x.is_const()) {
                std::mem::swap(&mut a, &mut b);
            }
            let Some(yn) = y[0].as_net() else {
                return out;
            };
            if !b.iter().all(|x| x.is_const()) {
                return out;
            }
            let w = a.len().max(b.len());
            let mut lits = Vec::with_capacity(w);
            for i in 0..w {
                let av = a.get(i).copied().unwrap_or(SigBit::Const(Const::Zero));
                match b.get(i).copied().unwrap_or(SigBit::Const(Const::Zero)) {
                    SigBit::Const(Const::Zero) => lits.push((av, false)),
                    SigBit::Const(Const::One) => lits.push((av, true)),
                    _ => return out,
                }
            }
            out.push(View::And { y: yn, lits });
        }
        CellKind::Pmux | CellKind::Dff | CellKind::Opaque(_) => {}
    }
    out
}

struct FactStore {
    facts: BTreeMap<u32, bool>,
    changed: bool,
    contradiction: bool,
}

impl FactStore {
    fn val(&self, bit: SigBit) -> Option<bool> {
        match bit {
            SigBit::Net(m) => self.facts.get(&m).copied(),
            SigBit::Const(Const::Zero) => Some(false),
            SigBit::Const(Const::One) => Some(true),
            SigBit::Const(Const::X) => None,
        }
    }

    fn lit_val(&self, lit: Lit) -> Option<bool> {
        self.val(lit.0).map(|v| v == lit.1)
    }

    fn set_bit(&mut self, bit: SigBit, value: bool) {
        match bit {
            SigBit::Net(m) => match self.facts.insert(m, value) {
                Some(old) if old != value => self.contradiction = true,
                Some(_) => {}
                None => self.changed = true,
            },
            SigBit::Const(Const::Zero) => self.contradiction |= value,
            SigBit::Const(Const::One) => self.contradiction |= !value,
            // An unknown constant absorbs any requirement.
            SigBit::Const(Const::X) => {}
        }
    }

    fn set_lit(&mut self, lit: Lit, holds: bool) {
        self.set_bit(lit.0, lit.1 == holds);
    }
}

fn apply_view(store: &mut FactStore, view: &View) {
    match view {
        View::And { y, lits } => {
            let yv = store.facts.get(y).copied();
            let vals: Vec<Option<bool>> = lits.iter().map(|&l| store.lit_val(l)).collect();
            if vals.iter().any(|v| *v == Some(false)) {
                store.set_bit(SigBit::Net(*y), false);
            } else if vals.iter().all(|v| *v == Some(true)) {
                store.set_bit(SigBit::Net(*y), true);
            }
            match yv {
                Some(true) => {
                    for &l in lits {
                        store.set_lit(l, true);
                    }
                }
                Some(false) => {
                    let open: Vec<usize> = vals
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| **v != Some(true))
                        .map(|(i, _)| i)
                        .collect();
                    if open.len() == 1 {
                        store.set_lit(lits[open[0]], false);
                    }
                }
                None => {}
            }
        }
        View::Or { y, lits } => {
            let yv = store.facts.get(y).copied();
            let vals: Vec<Option<bool>> = lits.iter().map(|&l| store.lit_val(l)).collect();
            if vals.iter().any(|v| *v == Some(true)) {
                store.set_bit(SigBit::Net(*y), true);
            } else if vals.iter().all(|v| *v == Some(false)) {
                store.set_bit(SigBit::Net(*y), false);
            }
            match yv {
                Some(false) => {
                    for &l in lits {
                        store.set_lit(l, false);
                    }
                }
                Some(true) => {
                    let open: Vec<usize> = vals
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| **v != Some(false))
                        .map(|(i, _)| i)
                        .collect();
                    if open.len() == 1 {
                        store.set_lit(lits[open[0]], true);
                    }
                }
                None => {}
            }
        }
        View::Xor { y, a, b } => {
            let (yv, av, bv) = (
                store.facts.get(y).copied(),
                store.val(*a),
                store.val(*b),
            );
            match (yv, av, bv) {
                (_, Some(av), Some(bv)) => store.set_bit(SigBit::Net(*y), av ^ bv),
                (Some(yv), Some(av), None) => store.set_bit(*b, yv ^ av),
                (Some(yv), None, Some(bv)) => store.set_bit(*a, yv ^ bv),
                _ => {}
            }
        }
        View::MuxBit { y, s, a, b } => {
            let (yv, sv, av, bv) = (
                store.facts.get(y).copied(),
                store.val(*s),
                store.val(*a),
                store.val(*b),
            );
            match sv {
                Some(true) => {
                    if let Some(bv) = bv {
                        store.set_bit(SigBit::Net(*y), bv);
                    }
                    if let Some(yv) = yv {
                        store.set_bit(*b, yv);
                    }
                }
                Some(false) => {
                    if let Some(av) = av {
                        store.set_bit(SigBit::Net(*y), av);
                    }
                    if let Some(yv) = yv {
                        store.set_bit(*a, yv);
                    }
                }
                None => {
                    if let (Some(av), Some(bv)) = (av, bv) {
                        if av == bv {
                            store.set_bit(SigBit::Net(*y), av);
                        }
                    }
                    // The output differing from one input pins the select.
                    if let (Some(yv), Some(av)) = (yv, av) {
                        if yv != av {
                            store.set_bit(*s, true);
                            store.set_bit(*b, yv);
                        }
                    }
                    if let (Some(yv), Some(bv)) = (yv, bv) {
                        if yv != bv {
                            store.set_bit(*s, false);
                            store.set_bit(*a, yv);
                        }
                    }
                }
            }
        }
    }
}

/// Run the gate rules over `cells` to fixpoint from the seed facts.
pub fn infer_rules(n: &Netlist, cells: &[CellId], seed: &[(u32, bool)]) -> Inferred {
    let views: Vec<View> = cells.iter().flat_map(|&id| views_of(n.cell(id))).collect();
    let mut store = FactStore {
        facts: BTreeMap::new(),
        changed: false,
        contradiction: false,
    };
    for &(net, val) in seed {
        store.set_bit(SigBit::Net(net), val);
    }
    loop {
        store.changed = false;
        for view in &views {
            apply_view(&mut store, view);
            if store.contradiction {
                return Inferred {
                    facts: store.facts,
                    contradiction: true,
                };
            }
        }
        if !store.changed {
            break;
        }
    }
    Inferred {
        facts: store.facts,
        contradiction: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Const0,
    Const1,
    Varies,
    /// The facts themselves are unsatisfiable: no execution reaches this
    /// path.
    Unreachable,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Inference,
    Simulation,
    Sat,
    Skipped,
}

#[derive(Debug, Clone)]
pub struct Deduction {
    pub verdict: Verdict,
    pub method: Method,
    pub free_inputs: usize,
    pub pruned_cells: usize,
}

/// Classify `target` under `facts` against the pruned cell slice.
pub fn deduce(
    n: &Netlist,
    cells: &[CellId],
    target: u32,
    facts: &[(u32, bool)],
    cfg: &SatConfig,
) -> Deduction {
    deduce_internal(n, cells, target, facts, cfg).0
}

fn deduce_internal(
    n: &Netlist,
    cells: &[CellId],
    target: u32,
    facts: &[(u32, bool)],
    cfg: &SatConfig,
) -> (Deduction, Option<sat::Cnf>) {
    let mut extras: Vec<u32> = vec![target];
    extras.extend(facts.iter().map(|&(m, _)| m));
    let nf = free_inputs(n, cells, &extras);
    let done = |verdict, method| {
        (
            Deduction {
                verdict,
                method,
                free_inputs: nf,
                pruned_cells: cells.len(),
            },
            None,
        )
    };
    let inferred = infer_rules(n, cells, facts);
    if inferred.contradiction {
        return done(Verdict::Unreachable, Method::Inference);
    }
    if let Some(&v) = inferred.facts.get(&target) {
        let verdict = if v { Verdict::Const1 } else { Verdict::Const0 };
        return done(verdict, Method::Inference);
    }
    // Inferred facts are implied, so forwarding them is sound and narrows
    // the later search.
    let all_facts: Vec<(u32, bool)> = inferred.facts.into_iter().collect();
    if nf <= cfg.sim_threshold {
        let outcome = sat::simulate_exhaustive(n, cells, target, &all_facts, cfg.sim_threshold)
            .expect("free count checked against the threshold");
        let verdict = match outcome {
            SimOutcome::Const0 => Verdict::Const0,
            SimOutcome::Const1 => Verdict::Const1,
            SimOutcome::Varies => Verdict::Varies,
            SimOutcome::Unreachable => Verdict::Unreachable,
        };
        return done(verdict, Method::Simulation);
    }
    if nf <= cfg.sat_input_max {
        let member_cells: Vec<&Cell> = cells.iter().map(|&id| n.cell(id)).collect();
        let enc = sat::encode(member_cells.iter().copied(), &all_facts, &[target]);
        let t = enc.map.var_of(target).expect("target allocated");
        let r0 = sat::solve(&enc.cnf, &[-t], cfg.conflict_cap);
        let r1 = sat::solve(&enc.cnf, &[t], cfg.conflict_cap);
        let verdict = match (r0, r1) {
            (SolveResult::Unsat, SolveResult::Unsat) => Verdict::Unreachable,
            (SolveResult::Unsat, SolveResult::Sat(_)) => Verdict::Const1,
            (SolveResult::Sat(_), SolveResult::Unsat) => Verdict::Const0,
            (SolveResult::Sat(_), SolveResult::Sat(_)) => Verdict::Varies,
            _ => Verdict::Unknown,
        };
        return (
            Deduction {
                verdict,
                method: Method::Sat,
                free_inputs: nf,
                pruned_cells: cells.len(),
            },
            Some(enc.cnf),
        );
    }
    done(Verdict::Unknown, Method::Skipped)
}

/// Simulation-only deduction, used to cross-check the SAT path.
pub fn deduce_by_sim(
    n: &Netlist,
    cells: &[CellId],
    target: u32,
    facts: &[(u32, bool)],
    max_free: usize,
) -> Option<Verdict> {
    sat::simulate_exhaustive(n, cells, target, facts, max_free).map(|o| match o {
        SimOutcome::Const0 => Verdict::Const0,
        SimOutcome::Const1 => Verdict::Const1,
        SimOutcome::Varies => Verdict::Varies,
        SimOutcome::Unreachable => Verdict::Unreachable,
    })
}

/// SAT-only deduction, used to cross-check the simulation path.
pub fn deduce_by_sat(
    n: &Netlist,
    cells: &[CellId],
    target: u32,
    facts: &[(u32, bool)],
    conflict_cap: u64,
) -> Verdict {
    let member_cells: Vec<&Cell> = cells.iter().map(|&id| n.cell(id)).collect();
    let enc = sat::encode(member_cells.iter().copied(), facts, &[target]);
    let t = enc.map.var_of(target).expect("target allocated");
    let r0 = sat::solve(&enc.cnf, &[-t], conflict_cap);
    let r1 = sat::solve(&enc.cnf, &[t], conflict_cap);
    match (r0, r1) {
        (SolveResult::Unsat, SolveResult::Unsat) => Verdict::Unreachable,
        (SolveResult::Unsat, SolveResult::Sat(_)) => Verdict::Const1,
        (SolveResult::Sat(_), SolveResult::Unsat) => Verdict::Const0,
        (SolveResult::Sat(_), SolveResult::Sat(_)) => Verdict::Varies,
        _ => Verdict::Unknown,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SatPassStats {
    pub trees: usize,
    pub queries: usize,
    pub inference: usize,
    pub simulation: usize,
    pub sat: usize,
    pub skipped: usize,
    pub const0: usize,
    pub const1: usize,
    pub varies: usize,
    pub unreachable: usize,
    pub unknown: usize,
    pub bypasses: usize,
    pub const_bits: usize,
    pub zeroed: usize,
    pub shrunk: usize,
    pub masked: usize,
    pub pruned_cells: usize,
    pub subgraph_cells: usize,
}

impl SatPassStats {
    pub fn fired(&self) -> bool {
        self.bypasses + self.const_bits + self.zeroed + self.shrunk + self.masked > 0
    }

    /// Average fraction of sub-graph cells surviving relevance pruning.
    pub fn pruned_ratio(&self) -> f64 {
        if self.subgraph_cells == 0 {
            1.0
        } else {
            self.pruned_cells as f64 / self.subgraph_cells as f64
        }
    }

    fn absorb(&mut self, d: &Deduction) {
        self.queries += 1;
        match d.method {
            Method::Inference => self.inference += 1,
            Method::Simulation => self.simulation += 1,
            Method::Sat => self.sat += 1,
            Method::Skipped => self.skipped += 1,
        }
        match d.verdict {
            Verdict::Const0 => self.const0 += 1,
            Verdict::Const1 => self.const1 += 1,
            Verdict::Varies => self.varies += 1,
            Verdict::Unreachable => self.unreachable += 1,
            Verdict::Unknown => self.unknown += 1,
        }
        self.pruned_cells += d.pruned_cells;
    }

    fn merge(&mut self, other: &SatPassStats) {
        self.trees += other.trees;
        self.queries += other.queries;
        self.inference += other.inference;
        self.simulation += other.simulation;
        self.sat += other.sat;
        self.skipped += other.skipped;
        self.const0 += other.const0;
        self.const1 += other.const1;
        self.varies += other.varies;
        self.unreachable += other.unreachable;
        self.unknown += other.unknown;
        self.bypasses += other.bypasses;
        self.const_bits += other.const_bits;
        self.zeroed += other.zeroed;
        self.shrunk += other.shrunk;
        self.masked += other.masked;
        self.pruned_cells += other.pruned_cells;
        self.subgraph_cells += other.subgraph_cells;
    }
}

enum NodeFate {
    /// The path facts are unsatisfiable; the parent edge is never taken.
    Dead,
    Alive,
}

struct Walker<'a> {
    n: &'a Netlist,
    idx: &'a GraphIndex,
    tree: &'a MuxTree,
    cfg: &'a SatConfig,
    sub: SubGraph,
    stats: SatPassStats,
    out: Vec<Rewrite>,
    tree_idx: usize,
    query_idx: usize,
}

impl Walker<'_> {
    fn visit(&mut self, node_idx: usize, ctx: &PathContext) -> NodeFate {
        let node = &self.tree.nodes[node_idx];
        let cell = self.n.cell(node.cell);
        let mut ctx = ctx.clone();
        let mut controls: Vec<u32> = Vec::new();
        if let Some(s) = cell.port("S") {
            for bit in s.bits() {
                if let SigBit::Net(m) = bit {
                    if !controls.contains(m) {
                        controls.push(*m);
                    }
                }
            }
        }
        self.sub.extend(self.n, self.idx, controls.iter().copied());
        for &m in &controls {
            if ctx.get(m).is_some() {
                continue;
            }
            let facts: Vec<(u32, bool)> = ctx.facts().collect();
            let mut roots: Vec<u32> = vec![m];
            roots.extend(facts.iter().map(|&(net, _)| net));
            let pruned = prune_relevance(self.n, self.idx, &self.sub, &roots);
            self.stats.subgraph_cells += self.sub.len();
            let (ded, cnf) = deduce_internal(self.n, &pruned, m, &facts, self.cfg);
            if let (Some(dir), Some(cnf)) = (self.cfg.dump_cnf.as_ref(), cnf.as_ref()) {
                self.dump_query(dir, m, cnf);
            }
            self.stats.absorb(&ded);
            match ded.verdict {
                Verdict::Unreachable => return NodeFate::Dead,
                Verdict::Const0 => {
                    ctx.assume(m, false);
                }
                Verdict::Const1 => {
                    ctx.assume(m, true);
                }
                Verdict::Varies | Verdict::Unknown => {}
            }
        }
        let mut alive: Vec<bool> = node
            .branches
            .iter()
            .map(|b| !b.dead && !ctx.contradicts(&b.facts))
            .collect();
        for (bi, branch) in node.branches.iter().enumerate() {
            if !alive[bi] {
                continue;
            }
            let branch_ctx = ctx
                .extend(&branch.facts)
                .expect("live branch cannot contradict the context");
            match branch.child {
                None => {
                    let before = self.out.len();
                    data_const_rewrites(
                        cell,
                        node.cell,
                        branch,
                        node.width,
                        &branch_ctx,
                        &mut self.out,
                    );
                    self.stats.const_bits += self.out.len() - before;
                }
                Some(child) => {
                    if let NodeFate::Dead = self.visit(child, &branch_ctx) {
                        alive[bi] = false;
                    }
                }
            }
        }
        let live: Vec<usize> = (0..alive.len()).filter(|&i| alive[i]).collect();
        if live.is_empty() {
            if node.analyzable {
                self.out.push(Rewrite::ZeroOutput { cell: node.cell });
                self.stats.zeroed += 1;
            }
            return NodeFate::Alive;
        }
        if let Some(bi) = bypass_target(cell, node, &live, &ctx) {
            let b = &node.branches[bi];
            self.out.push(Rewrite::Bypass {
                cell: node.cell,
                port: b.port,
                lo: b.lo,
            });
            self.stats.bypasses += 1;
            return NodeFate::Alive;
        }
        if cell.kind == CellKind::Pmux {
            // A dead branch's guard is unsatisfiable at the net level, which
            // holds under unknown select bits too. Removing its select bit is
            // stronger and only sound when that bit itself is known cold:
            // sibling guards carry its negation, and dropping an unknown bit
            // would let them fire on multi-hot inputs.
            let mut drops: Vec<usize> = Vec::new();
            for (bi, b) in node.branches.iter().enumerate() {
                if alive[bi] {
                    continue;
                }
                let cold = match b.select {
                    Some(SigBit::Const(Const::Zero)) => true,
                    Some(SigBit::Net(m)) => ctx.get(m) == Some(false),
                    _ => false,
                };
                if cold {
                    drops.push(bi);
                    continue;
                }
                // The chunk is never observed on this path; zero it to cut
                // the cone loose. Ones cost guard terms in the or-form
                // mapping, so constants flip too. Recorded before any drop
                // so indices refer to the original chunk layout.
                let spec = cell.port(b.port).expect("pmux data port");
                for k in 0..node.width {
                    if spec[b.lo + k] != SigBit::Const(Const::Zero) {
                        self.out.push(Rewrite::SetPortBit {
                            cell: node.cell,
                            port: b.port,
                            index: b.lo + k,
                            value: Const::Zero,
                        });
                        self.stats.masked += 1;
                    }
                }
            }
            // A branch is only droppable when its select is identically
            // zero, so every sibling keeps its guard; with all selects cold
            // the default would have been forced and bypassed above, hence
            // at least one select always survives.
            if !drops.is_empty() {
                self.out.push(Rewrite::DropPmuxBranches {
                    cell: node.cell,
                    selects: drops,
                });
                self.stats.shrunk += 1;
            }
        }
        NodeFate::Alive
    }

    fn dump_query(&mut self, dir: &std::path::Path, target: u32, cnf: &sat::Cnf) {
        let name = format!(
            "{}_t{}_q{}.cnf",
            sanitize(&self.n.name),
            self.tree_idx,
            self.query_idx
        );
        self.query_idx += 1;
        let mut text = format!("c target net {target}\n");
        text.push_str(&cnf.to_dimacs());
        let _ = std::fs::write(dir.join(name), text);
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// Run the SAT-driven pass over every mux tree. Dead cells are left for
/// the caller's sweep.
pub fn eliminate(n: &mut Netlist, cfg: &SatConfig) -> SatPassStats {
    let idx = n.build_indices();
    let snapshot: &Netlist = n;
    let trees = extract_muxtrees(snapshot, &idx);
    if let Some(dir) = &cfg.dump_cnf {
        let _ = std::fs::create_dir_all(dir);
    }
    let results: Vec<(Vec<Rewrite>, SatPassStats)> = trees
        .par_iter()
        .enumerate()
        .map(|(ti, tree)| {
            let mut w = Walker {
                n: snapshot,
                idx: &idx,
                tree,
                cfg,
                sub: SubGraph::new(cfg.k),
                stats: SatPassStats::default(),
                out: Vec::new(),
                tree_idx: ti,
                query_idx: 0,
            };
            w.visit(0, &PathContext::new());
            (w.out, w.stats)
        })
        .collect();
    let mut stats = SatPassStats {
        trees: trees.len(),
        ..Default::default()
    };
    for (rewrites, st) in &results {
        stats.merge(st);
        apply_rewrites(n, rewrites);
    }
    stats
}
