//! And-inverter graphs: the area metric behind accept decisions, AIGER
//! export, and equivalence checking between two netlists.
//!
//! Literals follow the AIGER convention: variable v has literals 2v and
//! 2v+1, the odd one complemented, and variable 0 is constant false.
//! Inverters are free; area is the number of AND nodes reachable from
//! the observables. Leaf variables are the combinational pseudo-inputs
//! of the netlist, so two mappings of the same interface line up
//! leaf-for-leaf even after cells were rewritten.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::eval::{block_count, input_word, PiKey, PoKey};
use crate::netlist::{Cell, CellKind, Const, Netlist, NetlistError, PortDir, SigBit};
use crate::sat::{solve, Cnf, SolveResult};

pub type AigLit = u32;

pub const FALSE_LIT: AigLit = 0;
pub const TRUE_LIT: AigLit = 1;

/// Conflict budget for one equivalence miter; generous because a wrong
/// Undecided stalls the whole pipeline run.
pub const EQUIV_CONFLICT_CAP: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("cell {cell} ({ty}): no gate-level model")]
    Unsupported { cell: String, ty: String },
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// Structurally hashed AND node store. Operand pairs are ordered high
/// then low, so a commuted AND lands on the same node.
pub struct AigBuilder {
    first_and_var: u32,
    ands: Vec<(AigLit, AigLit)>,
    strash: HashMap<(AigLit, AigLit), AigLit>,
}

impl AigBuilder {
    pub fn new(n_leaves: usize) -> AigBuilder {
        AigBuilder {
            first_and_var: n_leaves as u32 + 1,
            ands: Vec::new(),
            strash: HashMap::new(),
        }
    }

    pub fn leaf(&self, index: usize) -> AigLit {
        let var = index as u32 + 1;
        debug_assert!(var < self.first_and_var);
        2 * var
    }

    pub fn not(l: AigLit) -> AigLit {
        l ^ 1
    }

    pub fn and(&mut self, a: AigLit, b: AigLit) -> AigLit {
        if a == FALSE_LIT || b == FALSE_LIT || a == Self::not(b) {
            return FALSE_LIT;
        }
        if a == TRUE_LIT || a == b {
            return b;
        }
        if b == TRUE_LIT {
            return a;
        }
        let key = (a.max(b), a.min(b));
        if let Some(&l) = self.strash.get(&key) {
            return l;
        }
        let lit = 2 * (self.first_and_var + self.ands.len() as u32);
        self.ands.push(key);
        self.strash.insert(key, lit);
        lit
    }

    pub fn or(&mut self, a: AigLit, b: AigLit) -> AigLit {
        Self::not(self.and(Self::not(a), Self::not(b)))
    }

    pub fn xor(&mut self, a: AigLit, b: AigLit) -> AigLit {
        let t0 = self.and(a, Self::not(b));
        let t1 = self.and(Self::not(a), b);
        self.or(t0, t1)
    }

    /// Select-high mux: s picks b, otherwise a.
    pub fn mux(&mut self, s: AigLit, a: AigLit, b: AigLit) -> AigLit {
        let hi = self.and(s, b);
        let lo = self.and(Self::not(s), a);
        self.or(hi, lo)
    }

    /// Balanced reduction; `empty` is the identity of the operation.
    fn reduce(
        &mut self,
        mut v: Vec<AigLit>,
        op: fn(&mut AigBuilder, AigLit, AigLit) -> AigLit,
        empty: AigLit,
    ) -> AigLit {
        if v.is_empty() {
            return empty;
        }
        while v.len() > 1 {
            let mut next = Vec::with_capacity(v.len().div_ceil(2));
            for pair in v.chunks(2) {
                next.push(if pair.len() == 2 {
                    op(self, pair[0], pair[1])
                } else {
                    pair[0]
                });
            }
            v = next;
        }
        v[0]
    }

    pub fn and_tree(&mut self, v: Vec<AigLit>) -> AigLit {
        self.reduce(v, AigBuilder::and, TRUE_LIT)
    }

    pub fn or_tree(&mut self, v: Vec<AigLit>) -> AigLit {
        self.reduce(v, AigBuilder::or, FALSE_LIT)
    }
}

/// A mapped netlist. Variables: 0 constant, 1..=I the inputs in order,
/// then L latch state bits, then the AND nodes.
pub struct Aig {
    /// Input ports, floating nets, and the shared x, in mapping order.
    pub inputs: Vec<PiKey>,
    /// Flip-flop state bits as (cell name, bit).
    pub latches: Vec<(String, usize)>,
    /// Next-state literal per latch, aligned with `latches`.
    pub latch_next: Vec<AigLit>,
    /// Operand literal pairs, high then low.
    pub ands: Vec<(AigLit, AigLit)>,
    /// Output port bits as (key, literal).
    pub outputs: Vec<(PoKey, AigLit)>,
}

impl Aig {
    fn first_and_var(&self) -> u32 {
        1 + (self.inputs.len() + self.latches.len()) as u32
    }

    /// Combinational pseudo-inputs: the inputs, then latch state.
    pub fn leaves(&self) -> Vec<PiKey> {
        let mut v = self.inputs.clone();
        v.extend(
            self.latches
                .iter()
                .map(|(c, b)| PiKey::DffQ(c.clone(), *b)),
        );
        v
    }

    /// Observable points: output ports, then latch next-state.
    pub fn observables(&self) -> Vec<(PoKey, AigLit)> {
        let mut v = self.outputs.clone();
        v.extend(
            self.latches
                .iter()
                .zip(&self.latch_next)
                .map(|((c, b), &l)| (PoKey::DffD(c.clone(), *b), l)),
        );
        v
    }

    /// AND nodes reachable from the observables. Strashing can leave
    /// orphans behind folds, so this walks instead of counting the store.
    pub fn area(&self) -> usize {
        let first = self.first_and_var();
        let mut seen = vec![false; self.ands.len()];
        let mut stack: Vec<u32> = self
            .observables()
            .iter()
            .map(|(_, l)| l >> 1)
            .filter(|&v| v >= first)
            .collect();
        let mut count = 0usize;
        while let Some(v) = stack.pop() {
            let i = (v - first) as usize;
            if seen[i] {
                continue;
            }
            seen[i] = true;
            count += 1;
            let (a, b) = self.ands[i];
            for operand in [a >> 1, b >> 1] {
                if operand >= first {
                    stack.push(operand);
                }
            }
        }
        count
    }

    /// Word-parallel evaluation; one word per leaf, in `leaves()` order.
    /// Returns a word per variable.
    pub fn eval_words(&self, leaf_words: &[u64]) -> Vec<u64> {
        let n_leaves = self.inputs.len() + self.latches.len();
        assert_eq!(leaf_words.len(), n_leaves);
        let mut w = vec![0u64; 1 + n_leaves + self.ands.len()];
        w[1..=n_leaves].copy_from_slice(leaf_words);
        let first = self.first_and_var() as usize;
        for (i, &(a, b)) in self.ands.iter().enumerate() {
            w[first + i] = lit_word(&w, a) & lit_word(&w, b);
        }
        w
    }

    /// ASCII AIGER. Unreachable AND nodes are dropped and the rest are
    /// renumbered, so the header's A equals `area()`. No symbol table.
    pub fn write_aiger(&self) -> String {
        use std::fmt::Write;
        let first = self.first_and_var();
        let mut keep: Vec<u32> = Vec::new();
        let mut seen = vec![false; self.ands.len()];
        let mut stack: Vec<u32> = self
            .observables()
            .iter()
            .map(|(_, l)| l >> 1)
            .filter(|&v| v >= first)
            .collect();
        while let Some(v) = stack.pop() {
            let i = (v - first) as usize;
            if seen[i] {
                continue;
            }
            seen[i] = true;
            keep.push(v);
            let (a, b) = self.ands[i];
            for operand in [a >> 1, b >> 1] {
                if operand >= first {
                    stack.push(operand);
                }
            }
        }
        keep.sort_unstable();
        let mut renum: BTreeMap<u32, u32> = (1..first).map(|v| (v, v)).collect();
        for (i, &v) in keep.iter().enumerate() {
            renum.insert(v, first + i as u32);
        }
        let map = |l: AigLit| -> u32 {
            if l <= 1 {
                l
            } else {
                2 * renum[&(l >> 1)] + (l & 1)
            }
        };
        let (i, l, o, a) = (
            self.inputs.len(),
            self.latches.len(),
            self.outputs.len(),
            keep.len(),
        );
        let mut s = String::new();
        let _ = writeln!(s, "aag {} {i} {l} {o} {a}", i + l + a);
        for v in 1..=i {
            let _ = writeln!(s, "{}", 2 * v);
        }
        for (j, &next) in self.latch_next.iter().enumerate() {
            let _ = writeln!(s, "{} {}", 2 * (i + 1 + j), map(next));
        }
        for (_, lit) in &self.outputs {
            let _ = writeln!(s, "{}", map(*lit));
        }
        for &v in &keep {
            let (x, y) = self.ands[(v - first) as usize];
            let _ = writeln!(s, "{} {} {}", 2 * renum[&v], map(x), map(y));
        }
        s
    }
}

fn lit_word(w: &[u64], l: AigLit) -> u64 {
    let v = w[(l >> 1) as usize];
    if l & 1 == 1 {
        !v
    } else {
        v
    }
}

struct Mapper {
    b: AigBuilder,
    net_lit: BTreeMap<u32, AigLit>,
    x_lit: Option<AigLit>,
}

impl Mapper {
    fn read(&self, bit: SigBit) -> AigLit {
        match bit {
            SigBit::Net(m) => *self
                .net_lit
                .get(&m)
                .expect("net driven before use in topo order"),
            SigBit::Const(Const::Zero) => FALSE_LIT,
            SigBit::Const(Const::One) => TRUE_LIT,
            SigBit::Const(Const::X) => self.x_lit.expect("x leaf allocated by the upfront scan"),
        }
    }

    fn read_port(&self, cell: &Cell, port: &str) -> Vec<AigLit> {
        cell.port(port)
            .map(|s| s.bits().iter().map(|&b| self.read(b)).collect())
            .unwrap_or_default()
    }

    fn write_y(&mut self, cell: &Cell, lits: &[AigLit]) {
        let y = cell.port("Y").expect("combinational cells drive Y");
        debug_assert_eq!(y.width(), lits.len());
        for (bit, &lit) in y.bits().iter().zip(lits) {
            if let SigBit::Net(m) = bit {
                self.net_lit.insert(*m, lit);
            }
        }
    }

    fn map_cell(&mut self, cell: &Cell) {
        match cell.kind {
            CellKind::Mux => {
                let s = self.read(cell.port("S").expect("mux S")[0]);
                let a = self.read_port(cell, "A");
                let bb = self.read_port(cell, "B");
                let out: Vec<AigLit> = a
                    .iter()
                    .zip(&bb)
                    .map(|(&av, &bv)| self.b.mux(s, av, bv))
                    .collect();
                self.write_y(cell, &out);
            }
            CellKind::Pmux => {
                let s = self.read_port(cell, "S");
                let a = self.read_port(cell, "A");
                let bb = self.read_port(cell, "B");
                let (n, w) = (s.len(), a.len());
                let guards: Vec<AigLit> = (0..n)
                    .map(|i| {
                        let terms: Vec<AigLit> = (0..n)
                            .map(|j| if j == i { s[j] } else { AigBuilder::not(s[j]) })
                            .collect();
                        self.b.and_tree(terms)
                    })
                    .collect();
                let none = {
                    let terms: Vec<AigLit> = s.iter().map(|&l| AigBuilder::not(l)).collect();
                    self.b.and_tree(terms)
                };
                let out: Vec<AigLit> = (0..w)
                    .map(|wi| {
                        let mut terms = vec![self.b.and(none, a[wi])];
                        for (i, &g) in guards.iter().enumerate() {
                            terms.push(self.b.and(g, bb[i * w + wi]));
                        }
                        self.b.or_tree(terms)
                    })
                    .collect();
                self.write_y(cell, &out);
            }
            CellKind::Eq => {
                let a = self.read_port(cell, "A");
                let bb = self.read_port(cell, "B");
                let w = a.len().max(bb.len());
                let bits: Vec<AigLit> = (0..w)
                    .map(|i| {
                        // Zero-extend the shorter operand.
                        let av = a.get(i).copied().unwrap_or(FALSE_LIT);
                        let bv = bb.get(i).copied().unwrap_or(FALSE_LIT);
                        AigBuilder::not(self.b.xor(av, bv))
                    })
                    .collect();
                let out = self.b.and_tree(bits);
                self.write_y(cell, &[out]);
            }
            CellKind::LogicNot => {
                let a = self.read_port(cell, "A");
                let any = self.b.or_tree(a);
                self.write_y(cell, &[AigBuilder::not(any)]);
            }
            CellKind::Not => {
                let out: Vec<AigLit> = self
                    .read_port(cell, "A")
                    .into_iter()
                    .map(AigBuilder::not)
                    .collect();
                self.write_y(cell, &out);
            }
            CellKind::And | CellKind::Or | CellKind::Xor => {
                let a = self.read_port(cell, "A");
                let bb = self.read_port(cell, "B");
                let kind = cell.kind.clone();
                let out: Vec<AigLit> = a
                    .iter()
                    .zip(&bb)
                    .map(|(&av, &bv)| match kind {
                        CellKind::And => self.b.and(av, bv),
                        CellKind::Or => self.b.or(av, bv),
                        _ => self.b.xor(av, bv),
                    })
                    .collect();
                self.write_y(cell, &out);
            }
            CellKind::LogicAnd | CellKind::LogicOr => {
                let a = self.read_port(cell, "A");
                let bb = self.read_port(cell, "B");
                let av = self.b.or_tree(a);
                let bv = self.b.or_tree(bb);
                let out = if cell.kind == CellKind::LogicAnd {
                    self.b.and(av, bv)
                } else {
                    self.b.or(av, bv)
                };
                self.write_y(cell, &[out]);
            }
            CellKind::ReduceOr | CellKind::ReduceBool => {
                let a = self.read_port(cell, "A");
                let out = self.b.or_tree(a);
                self.write_y(cell, &[out]);
            }
            CellKind::ReduceAnd => {
                let a = self.read_port(cell, "A");
                let out = self.b.and_tree(a);
                self.write_y(cell, &[out]);
            }
            CellKind::Dff | CellKind::Opaque(_) => {
                unreachable!("screened before mapping")
            }
        }
    }
}

/// Map the combinational view of a netlist onto an AIG. Leaves follow
/// the simulator's pseudo-input rules: input and inout port bits, then
/// undriven nets, then one shared x when any connection mentions the
/// constant, then flip-flop state. Cells without a gate-level model
/// reject the whole module.
pub fn map_to_aig(n: &Netlist) -> Result<Aig, MapError> {
    let idx = n.try_build_indices()?;
    for (_, cell) in n.cells() {
        if !cell.is_supported() {
            return Err(MapError::Unsupported {
                cell: cell.name.clone(),
                ty: cell.kind.type_name().to_string(),
            });
        }
    }

    let mut inputs: Vec<PiKey> = Vec::new();
    let mut leaf_nets: Vec<Option<u32>> = Vec::new();
    for port in &n.ports {
        if port.dir == PortDir::Output {
            continue;
        }
        for (i, bit) in port.bits.bits().iter().enumerate() {
            if let SigBit::Net(net) = bit {
                inputs.push(PiKey::Port(port.name.clone(), i));
                leaf_nets.push(Some(*net));
            }
        }
    }
    for &net in &n.all_nets() {
        if idx.driver(net).is_none() {
            inputs.push(PiKey::Floating(net));
            leaf_nets.push(Some(net));
        }
    }
    let mut has_x = n
        .ports
        .iter()
        .any(|p| p.bits.bits().contains(&SigBit::Const(Const::X)));
    for (_, cell) in n.cells() {
        has_x |= cell
            .connections
            .values()
            .any(|s| s.bits().contains(&SigBit::Const(Const::X)));
    }
    if has_x {
        inputs.push(PiKey::X);
        leaf_nets.push(None);
    }

    let mut latches: Vec<(String, usize)> = Vec::new();
    let mut latch_d: Vec<SigBit> = Vec::new();
    for (_, cell) in n.cells() {
        if cell.kind != CellKind::Dff {
            continue;
        }
        let q = cell.port("Q").expect("dff Q");
        let d = cell.port("D").expect("dff D");
        for (i, bit) in q.bits().iter().enumerate() {
            if let SigBit::Net(net) = bit {
                latches.push((cell.name.clone(), i));
                leaf_nets.push(Some(*net));
                latch_d.push(d[i]);
            }
        }
    }

    let mut mapper = Mapper {
        b: AigBuilder::new(inputs.len() + latches.len()),
        net_lit: BTreeMap::new(),
        x_lit: None,
    };
    for (li, net) in leaf_nets.iter().enumerate() {
        let lit = mapper.b.leaf(li);
        match net {
            Some(net) => {
                mapper.net_lit.insert(*net, lit);
            }
            None => mapper.x_lit = Some(lit),
        }
    }
    for &id in idx.topo() {
        mapper.map_cell(n.cell(id));
    }

    let mut outputs: Vec<(PoKey, AigLit)> = Vec::new();
    for port in &n.ports {
        if port.dir != PortDir::Output {
            continue;
        }
        for (i, bit) in port.bits.bits().iter().enumerate() {
            outputs.push((PoKey::Port(port.name.clone(), i), mapper.read(*bit)));
        }
    }
    let latch_next: Vec<AigLit> = latch_d.iter().map(|&b| mapper.read(b)).collect();

    Ok(Aig {
        inputs,
        latches,
        latch_next,
        ands: mapper.b.ands,
        outputs,
    })
}

/// Module area in AND nodes; the single figure optimization reports.
pub fn area(n: &Netlist) -> Result<usize, MapError> {
    map_to_aig(n).map(|a| a.area())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivMethod {
    /// Exhaustive simulation when the joint input count allows, SAT
    /// otherwise.
    Auto,
    Sim,
    Sat,
}

#[derive(Debug, Clone)]
pub struct Counterexample {
    pub assignment: Vec<(PiKey, bool)>,
    pub output: PoKey,
    pub golden: bool,
    pub revised: bool,
}

#[derive(Debug, Clone)]
pub enum EquivVerdict {
    Equivalent,
    Inequivalent(Counterexample),
    /// The solver gave up on this observable.
    Undecided { output: PoKey },
}

#[derive(Debug, Error)]
pub enum EquivError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("output signatures differ: {0}")]
    OutputMismatch(String),
    #[error("{count} joint inputs exceed the simulation limit {max}")]
    TooManyInputs { count: usize, max: usize },
}

/// Observable pairs to compare: every output port bit must exist on both
/// sides; flip-flop next-state is compared when the latch survives in
/// both, since a state bit nothing reads may legitimately disappear.
fn comparison_points(
    golden: &Aig,
    revised: &Aig,
) -> Result<Vec<(PoKey, AigLit, AigLit)>, EquivError> {
    let g: BTreeMap<PoKey, AigLit> = golden.observables().into_iter().collect();
    let r: BTreeMap<PoKey, AigLit> = revised.observables().into_iter().collect();
    let g_ports: BTreeSet<&PoKey> = g.keys().filter(|k| matches!(k, PoKey::Port(..))).collect();
    let r_ports: BTreeSet<&PoKey> = r.keys().filter(|k| matches!(k, PoKey::Port(..))).collect();
    if g_ports != r_ports {
        let missing = g_ports
            .symmetric_difference(&r_ports)
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        return Err(EquivError::OutputMismatch(missing));
    }
    Ok(g.iter()
        .filter_map(|(k, &gl)| r.get(k).map(|&rl| (k.clone(), gl, rl)))
        .collect())
}

/// Decide whether two netlists compute the same outputs over the joint
/// pseudo-input space. Constant x bits share one unknown on both sides.
pub fn check_equiv(
    golden: &Netlist,
    revised: &Netlist,
    method: EquivMethod,
    max_sim_inputs: usize,
) -> Result<EquivVerdict, EquivError> {
    let ga = map_to_aig(golden)?;
    let ra = map_to_aig(revised)?;
    let points = comparison_points(&ga, &ra)?;
    let keys: Vec<PiKey> = {
        let mut set: BTreeSet<PiKey> = ga.leaves().into_iter().collect();
        set.extend(ra.leaves());
        set.into_iter().collect()
    };
    match method {
        EquivMethod::Sim => {
            if keys.len() > max_sim_inputs {
                return Err(EquivError::TooManyInputs {
                    count: keys.len(),
                    max: max_sim_inputs,
                });
            }
            Ok(equiv_by_sim(&ga, &ra, &points, &keys))
        }
        EquivMethod::Sat => Ok(equiv_by_sat(&ga, &ra, &points, &keys)),
        EquivMethod::Auto => {
            if keys.len() <= max_sim_inputs {
                Ok(equiv_by_sim(&ga, &ra, &points, &keys))
            } else {
                Ok(equiv_by_sat(&ga, &ra, &points, &keys))
            }
        }
    }
}

/// Word indices of one AIG's leaves inside the joint key order.
fn leaf_positions(aig: &Aig, keys: &[PiKey]) -> Vec<usize> {
    aig.leaves()
        .iter()
        .map(|k| keys.iter().position(|j| j == k).expect("leaf in joint set"))
        .collect()
}

fn equiv_by_sim(
    ga: &Aig,
    ra: &Aig,
    points: &[(PoKey, AigLit, AigLit)],
    keys: &[PiKey],
) -> EquivVerdict {
    let gpos = leaf_positions(ga, keys);
    let rpos = leaf_positions(ra, keys);
    for block in 0..block_count(keys.len()) {
        let joint: Vec<u64> = (0..keys.len()).map(|i| input_word(i, block)).collect();
        let gw = ga.eval_words(&gpos.iter().map(|&p| joint[p]).collect::<Vec<_>>());
        let rw = ra.eval_words(&rpos.iter().map(|&p| joint[p]).collect::<Vec<_>>());
        for (key, gl, rl) in points {
            let diff = lit_word(&gw, *gl) ^ lit_word(&rw, *rl);
            if diff != 0 {
                let bit = diff.trailing_zeros();
                let assignment = keys
                    .iter()
                    .enumerate()
                    .map(|(i, k)| (k.clone(), input_word(i, block) >> bit & 1 == 1))
                    .collect();
                return EquivVerdict::Inequivalent(Counterexample {
                    assignment,
                    output: key.clone(),
                    golden: lit_word(&gw, *gl) >> bit & 1 == 1,
                    revised: lit_word(&rw, *rl) >> bit & 1 == 1,
                });
            }
        }
    }
    EquivVerdict::Equivalent
}

/// Tseitin clauses for one AIG over shared leaf variables; returns a SAT
/// literal per AIG variable.
fn encode_aig(aig: &Aig, key_vars: &BTreeMap<PiKey, i32>, true_var: i32, cnf: &mut Cnf) -> Vec<i32> {
    let mut var_sat: Vec<i32> = Vec::with_capacity(1 + aig.leaves().len() + aig.ands.len());
    var_sat.push(-true_var);
    for key in aig.leaves() {
        var_sat.push(key_vars[&key]);
    }
    let sat_lit = |var_sat: &[i32], l: AigLit| -> i32 {
        let s = var_sat[(l >> 1) as usize];
        if l & 1 == 1 {
            -s
        } else {
            s
        }
    };
    for &(a, b) in &aig.ands {
        let v = cnf.fresh_var();
        let (sa, sb) = (sat_lit(&var_sat, a), sat_lit(&var_sat, b));
        cnf.add_clause(&[-v, sa]);
        cnf.add_clause(&[-v, sb]);
        cnf.add_clause(&[v, -sa, -sb]);
        var_sat.push(v);
    }
    var_sat
}

fn equiv_by_sat(
    ga: &Aig,
    ra: &Aig,
    points: &[(PoKey, AigLit, AigLit)],
    keys: &[PiKey],
) -> EquivVerdict {
    let mut cnf = Cnf::new();
    let true_var = cnf.fresh_var();
    cnf.add_clause(&[true_var]);
    let key_vars: BTreeMap<PiKey, i32> = keys
        .iter()
        .map(|k| (k.clone(), cnf.fresh_var()))
        .collect();
    let gv = encode_aig(ga, &key_vars, true_var, &mut cnf);
    let rv = encode_aig(ra, &key_vars, true_var, &mut cnf);
    let sat_lit = |v: &[i32], l: AigLit| -> i32 {
        let s = v[(l >> 1) as usize];
        if l & 1 == 1 {
            -s
        } else {
            s
        }
    };
    for (key, gl, rl) in points {
        let (a, b) = (sat_lit(&gv, *gl), sat_lit(&rv, *rl));
        let m = cnf.fresh_var();
        cnf.add_clause(&[-m, a, b]);
        cnf.add_clause(&[-m, -a, -b]);
        cnf.add_clause(&[m, -a, b]);
        cnf.add_clause(&[m, a, -b]);
        match solve(&cnf, &[m], EQUIV_CONFLICT_CAP) {
            SolveResult::Unsat => continue,
            SolveResult::Unknown => return EquivVerdict::Undecided { output: key.clone() },
            SolveResult::Sat(model) => {
                let assignment: Vec<(PiKey, bool)> = keys
                    .iter()
                    .map(|k| (k.clone(), model[(key_vars[k] - 1) as usize]))
                    .collect();
                // Replay the model through both graphs; the solver's view
                // of the encoding must agree with direct evaluation.
                let words: BTreeMap<&PiKey, u64> = assignment
                    .iter()
                    .map(|(k, v)| (k, *v as u64))
                    .collect();
                let gw = ga.eval_words(
                    &ga.leaves().iter().map(|k| words[k]).collect::<Vec<_>>(),
                );
                let rw = ra.eval_words(
                    &ra.leaves().iter().map(|k| words[k]).collect::<Vec<_>>(),
                );
                let gbit = lit_word(&gw, *gl) & 1 == 1;
                let rbit = lit_word(&rw, *rl) & 1 == 1;
                if gbit == rbit {
                    debug_assert!(false, "model does not replay");
                    return EquivVerdict::Undecided { output: key.clone() };
                }
                return EquivVerdict::Inequivalent(Counterexample {
                    assignment,
                    output: key.clone(),
                    golden: gbit,
                    revised: rbit,
                });
            }
        }
    }
    EquivVerdict::Equivalent
}
