//! CNF construction and a self-contained SAT decision procedure.
//!
//! The solver is conflict-driven: two watched literals per clause, first-UIP
//! clause learning, activity-ordered decisions with phase saving, and Luby
//! restarts. Assumptions are handled as forced decisions at the bottom
//! levels, so a query under assumptions never pollutes later queries (every
//! call starts from a fresh solver).
//!
//! Encoding is Tseitin-style over bit-blasted cells. Multi-input
//! conjunction and disjunction are built as balanced trees of 2-input
//! gates, which keeps every gate at no more than 4 clauses.

use std::fmt::Write as _;

use crate::netlist::{Cell, CellId, CellKind, Const, Netlist, SigBit};

/// A CNF formula. Variables are 1-based; literals are nonzero signed
/// integers in DIMACS convention.
#[derive(Debug, Clone, Default)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn new() -> Cnf {
        Cnf::default()
    }

    pub fn fresh_var(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    /// Add one clause. Duplicate literals are removed; tautologies are
    /// dropped. Empty clauses are a construction bug.
    pub fn add_clause(&mut self, lits: &[i32]) {
        assert!(!lits.is_empty(), "empty clause");
        let mut c: Vec<i32> = lits.to_vec();
        c.sort_unstable_by_key(|l| (l.unsigned_abs(), *l < 0));
        c.dedup();
        for w in c.windows(2) {
            if w[0] == -w[1] {
                return;
            }
        }
        for &l in &c {
            assert!(l != 0 && l.unsigned_abs() as usize <= self.num_vars);
        }
        self.clauses.push(c);
    }

    /// DIMACS text form, for debug export.
    pub fn to_dimacs(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "p cnf {} {}", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(s, "{l} ");
            }
            let _ = writeln!(s, "0");
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    /// Model indexed by variable - 1.
    Sat(Vec<bool>),
    Unsat,
    /// Conflict budget exhausted; callers treat this as "no deduction".
    Unknown,
}

/// Decide `cnf` under `assumptions`, giving up after `conflict_cap`
/// conflicts.
pub fn solve(cnf: &Cnf, assumptions: &[i32], conflict_cap: u64) -> SolveResult {
    Solver::new(cnf).run(assumptions, conflict_cap)
}

const NO_REASON: i32 = -1;

struct Watch {
    clause: u32,
    blocker: i32,
}

struct Solver {
    nvars: usize,
    clauses: Vec<Vec<i32>>,
    watches: Vec<Vec<Watch>>,
    assign: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<i32>,
    trail: Vec<i32>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    polarity: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
}

fn widx(lit: i32) -> usize {
    (lit.unsigned_abs() as usize) * 2 + (lit < 0) as usize
}

fn lit_value(assign: &[i8], lit: i32) -> i8 {
    let v = assign[lit.unsigned_abs() as usize];
    if lit < 0 {
        -v
    } else {
        v
    }
}

impl Solver {
    fn new(cnf: &Cnf) -> Solver {
        let n = cnf.num_vars;
        let mut s = Solver {
            nvars: n,
            clauses: Vec::with_capacity(cnf.clauses.len()),
            watches: (0..2 * (n + 1)).map(|_| Vec::new()).collect(),
            assign: vec![0; n + 1],
            level: vec![0; n + 1],
            reason: vec![NO_REASON; n + 1],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n + 1],
            var_inc: 1.0,
            polarity: vec![false; n + 1],
            seen: vec![false; n + 1],
            ok: true,
        };
        for c in &cnf.clauses {
            s.add_clause(c.clone());
            if !s.ok {
                break;
            }
        }
        s
    }

    fn value(&self, lit: i32) -> i8 {
        lit_value(&self.assign, lit)
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn add_clause(&mut self, c: Vec<i32>) {
        match c.len() {
            0 => self.ok = false,
            1 => {
                match self.value(c[0]) {
                    -1 => self.ok = false,
                    0 => self.enqueue(c[0], NO_REASON),
                    _ => {}
                }
            }
            _ => {
                let ci = self.clauses.len() as u32;
                self.watches[widx(c[0])].push(Watch {
                    clause: ci,
                    blocker: c[1],
                });
                self.watches[widx(c[1])].push(Watch {
                    clause: ci,
                    blocker: c[0],
                });
                self.clauses.push(c);
            }
        }
    }

    fn enqueue(&mut self, lit: i32, reason: i32) {
        let v = lit.unsigned_abs() as usize;
        debug_assert_eq!(self.assign[v], 0);
        self.assign[v] = if lit > 0 { 1 } else { -1 };
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = -p;
            let wl = widx(false_lit);
            let mut i = 0;
            'next_watch: while i < self.watches[wl].len() {
                let blocker = self.watches[wl][i].blocker;
                if self.value(blocker) == 1 {
                    i += 1;
                    continue;
                }
                let ci = self.watches[wl][i].clause;
                let clause = &mut self.clauses[ci as usize];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if lit_value(&self.assign, first) == 1 {
                    self.watches[wl][i].blocker = first;
                    i += 1;
                    continue;
                }
                for j in 2..clause.len() {
                    if lit_value(&self.assign, clause[j]) != -1 {
                        clause.swap(1, j);
                        let moved = clause[1];
                        self.watches[widx(moved)].push(Watch {
                            clause: ci,
                            blocker: first,
                        });
                        self.watches[wl].swap_remove(i);
                        continue 'next_watch;
                    }
                }
                if self.value(first) == -1 {
                    self.qhead = self.trail.len();
                    return Some(ci);
                }
                self.enqueue(first, ci as i32);
                i += 1;
            }
        }
        None
    }

    fn bump(&mut self, var: usize) {
        self.activity[var] += self.var_inc;
        if self.activity[var] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, confl: u32) -> (Vec<i32>, usize) {
        let mut learnt: Vec<i32> = vec![0];
        let mut counter = 0usize;
        let mut p: i32 = 0;
        let mut idx = self.trail.len();
        let mut clause_idx = confl as i32;
        let cur = self.decision_level() as u32;
        loop {
            debug_assert!(clause_idx != NO_REASON);
            let skip_first = p != 0;
            let clause = &self.clauses[clause_idx as usize];
            let lits: Vec<i32> = clause[skip_first as usize..].to_vec();
            for q in lits {
                let v = q.unsigned_abs() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] >= cur {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].unsigned_abs() as usize] {
                    break;
                }
            }
            p = self.trail[idx];
            let v = p.unsigned_abs() as usize;
            self.seen[v] = false;
            clause_idx = self.reason[v];
            counter -= 1;
            if counter == 0 {
                break;
            }
        }
        learnt[0] = -p;
        for &q in &learnt[1..] {
            self.seen[q.unsigned_abs() as usize] = false;
        }
        let bt = if learnt.len() == 1 {
            0
        } else {
            // Highest level among the rest goes to slot 1 (watch invariant).
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].unsigned_abs() as usize]
                    > self.level[learnt[max_i].unsigned_abs() as usize]
                {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].unsigned_abs() as usize] as usize
        };
        (learnt, bt)
    }

    fn backtrack(&mut self, target: usize) {
        while self.decision_level() > target {
            let lim = self.trail_lim.pop().unwrap();
            while self.trail.len() > lim {
                let lit = self.trail.pop().unwrap();
                let v = lit.unsigned_abs() as usize;
                self.polarity[v] = lit > 0;
                self.assign[v] = 0;
                self.reason[v] = NO_REASON;
            }
        }
        self.qhead = self.trail.len();
    }

    fn decide_var(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for v in 1..=self.nvars {
            if self.assign[v] == 0
                && best.map(|b| self.activity[v] > self.activity[b]).unwrap_or(true)
            {
                best = Some(v);
            }
        }
        best
    }

    fn run(&mut self, assumptions: &[i32], conflict_cap: u64) -> SolveResult {
        if !self.ok {
            return SolveResult::Unsat;
        }
        for &a in assumptions {
            assert!(a != 0 && a.unsigned_abs() as usize <= self.nvars);
        }
        if self.propagate().is_some() {
            return SolveResult::Unsat;
        }
        let mut conflicts: u64 = 0;
        let mut restarts: u32 = 0;
        let mut restart_budget = 100 * luby(restarts);
        loop {
            if let Some(confl) = self.propagate() {
                conflicts += 1;
                if self.decision_level() == 0 {
                    return SolveResult::Unsat;
                }
                if conflicts >= conflict_cap {
                    return SolveResult::Unknown;
                }
                let (learnt, bt) = self.analyze(confl);
                self.backtrack(bt);
                let asserting = learnt[0];
                if learnt.len() == 1 {
                    self.enqueue(asserting, NO_REASON);
                } else {
                    let ci = self.clauses.len() as i32;
                    self.add_clause(learnt);
                    self.enqueue(asserting, ci);
                }
                self.var_inc *= 1.0 / 0.95;
                restart_budget = restart_budget.saturating_sub(1);
            } else if restart_budget == 0 {
                restarts += 1;
                restart_budget = 100 * luby(restarts);
                self.backtrack(0);
            } else if self.decision_level() < assumptions.len() {
                let a = assumptions[self.decision_level()];
                match self.value(a) {
                    1 => self.trail_lim.push(self.trail.len()),
                    -1 => return SolveResult::Unsat,
                    _ => {
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(a, NO_REASON);
                    }
                }
            } else if let Some(v) = self.decide_var() {
                self.trail_lim.push(self.trail.len());
                let lit = if self.polarity[v] { v as i32 } else { -(v as i32) };
                self.enqueue(lit, NO_REASON);
            } else {
                let model = (1..=self.nvars).map(|v| self.assign[v] == 1).collect();
                return SolveResult::Sat(model);
            }
        }
    }
}

fn luby(i: u32) -> u64 {
    // Sequence 1,1,2,1,1,2,4,...; index 0-based.
    let mut k = 1u32;
    while (1u64 << k) < (i as u64 + 2) {
        k += 1;
    }
    let mut i = i as u64;
    let mut sz = (1u64 << k) - 1;
    while sz != i + 1 {
        sz >>= 1;
        k -= 1;
        i %= sz;
    }
    1u64 << (k - 1)
}

/// Maps netlist signal bits to CNF literals during encoding.
#[derive(Debug, Clone, Default)]
pub struct VarMap {
    vars: std::collections::BTreeMap<u32, i32>,
    true_var: Option<i32>,
    x_var: Option<i32>,
}

impl VarMap {
    pub fn var_of(&self, net: u32) -> Option<i32> {
        self.vars.get(&net).copied()
    }

    fn alloc(&mut self, cnf: &mut Cnf, net: u32) -> i32 {
        if let Some(&v) = self.vars.get(&net) {
            return v;
        }
        let v = cnf.fresh_var();
        self.vars.insert(net, v);
        v
    }

    /// Literal for a bit. The constant-1 variable and the shared unknown
    /// variable are allocated lazily.
    fn lit(&mut self, cnf: &mut Cnf, bit: SigBit) -> i32 {
        match bit {
            SigBit::Net(n) => self.alloc(cnf, n),
            SigBit::Const(Const::One) | SigBit::Const(Const::Zero) => {
                let t = *self.true_var.get_or_insert_with(|| {
                    let v = cnf.fresh_var();
                    cnf.clauses.push(vec![v]);
                    v
                });
                if bit == SigBit::Const(Const::One) {
                    t
                } else {
                    -t
                }
            }
            SigBit::Const(Const::X) => *self
                .x_var
                .get_or_insert_with(|| cnf.fresh_var()),
        }
    }
}

/// Tseitin encoding of a list of cells plus unit-clause facts.
pub struct Encoded {
    pub cnf: Cnf,
    pub map: VarMap,
    /// Bit-blasted 2-input gate definitions emitted; each contributes at
    /// most 4 clauses, giving the linear clause bound.
    pub gate_count: usize,
}

struct GateWriter {
    cnf: Cnf,
    map: VarMap,
    gates: usize,
}

impl GateWriter {
    fn lit(&mut self, bit: SigBit) -> i32 {
        self.map.lit(&mut self.cnf, bit)
    }

    fn define_and(&mut self, y: i32, a: i32, b: i32) {
        self.gates += 1;
        self.cnf.add_clause(&[-y, a]);
        self.cnf.add_clause(&[-y, b]);
        self.cnf.add_clause(&[y, -a, -b]);
    }

    fn define_or(&mut self, y: i32, a: i32, b: i32) {
        self.gates += 1;
        self.cnf.add_clause(&[-a, y]);
        self.cnf.add_clause(&[-b, y]);
        self.cnf.add_clause(&[a, b, -y]);
    }

    fn define_xor(&mut self, y: i32, a: i32, b: i32) {
        self.gates += 1;
        self.cnf.add_clause(&[-y, a, b]);
        self.cnf.add_clause(&[-y, -a, -b]);
        self.cnf.add_clause(&[y, -a, b]);
        self.cnf.add_clause(&[y, a, -b]);
    }

    /// y = s ? b : a.
    fn define_mux(&mut self, y: i32, s: i32, a: i32, b: i32) {
        self.gates += 1;
        self.cnf.add_clause(&[-s, -b, y]);
        self.cnf.add_clause(&[-s, b, -y]);
        self.cnf.add_clause(&[s, -a, y]);
        self.cnf.add_clause(&[s, a, -y]);
    }

    /// y equals the given literal (buffer).
    fn bind(&mut self, y: i32, l: i32) {
        if y == l {
            return;
        }
        self.gates += 1;
        self.cnf.add_clause(&[-y, l]);
        self.cnf.add_clause(&[y, -l]);
    }

    /// Balanced tree computing the conjunction of `lits` into `y`.
    fn and_tree_into(&mut self, y: i32, lits: &[i32]) {
        match lits.len() {
            0 => {
                // Empty conjunction is true.
                self.cnf.add_clause(&[y]);
            }
            1 => self.bind(y, lits[0]),
            2 => self.define_and(y, lits[0], lits[1]),
            n => {
                let (l, r) = lits.split_at(n / 2);
                let lv = self.cnf.fresh_var();
                let rv = self.cnf.fresh_var();
                self.and_tree_into(lv, l);
                self.and_tree_into(rv, r);
                self.define_and(y, lv, rv);
            }
        }
    }

    fn or_tree_into(&mut self, y: i32, lits: &[i32]) {
        match lits.len() {
            0 => self.cnf.add_clause(&[-y]),
            1 => self.bind(y, lits[0]),
            2 => self.define_or(y, lits[0], lits[1]),
            n => {
                let (l, r) = lits.split_at(n / 2);
                let lv = self.cnf.fresh_var();
                let rv = self.cnf.fresh_var();
                self.or_tree_into(lv, l);
                self.or_tree_into(rv, r);
                self.define_or(y, lv, rv);
            }
        }
    }

    fn port_lits(&mut self, cell: &Cell, port: &str) -> Vec<i32> {
        cell.port(port)
            .unwrap_or_else(|| panic!("cell {}: missing port {port}", cell.name))
            .bits()
            .iter()
            .map(|&b| self.lit(b))
            .collect()
    }

    fn encode_cell(&mut self, cell: &Cell) {
        match &cell.kind {
            CellKind::Mux => {
                let s = self.port_lits(cell, "S")[0];
                let a = self.port_lits(cell, "A");
                let b = self.port_lits(cell, "B");
                let y = self.port_lits(cell, "Y");
                for i in 0..y.len() {
                    self.define_mux(y[i], s, a[i], b[i]);
                }
            }
            CellKind::Pmux => {
                let s = self.port_lits(cell, "S");
                let a = self.port_lits(cell, "A");
                let b = self.port_lits(cell, "B");
                let y = self.port_lits(cell, "Y");
                let (n, w) = (s.len(), y.len());
                let mut guards = Vec::with_capacity(n + 1);
                for i in 0..n {
                    let terms: Vec<i32> = (0..n)
                        .map(|j| if j == i { s[j] } else { -s[j] })
                        .collect();
                    let g = self.cnf.fresh_var();
                    self.and_tree_into(g, &terms);
                    guards.push(g);
                }
                let none: Vec<i32> = s.iter().map(|&l| -l).collect();
                let z = self.cnf.fresh_var();
                self.and_tree_into(z, &none);
                for wi in 0..w {
                    let mut terms = Vec::with_capacity(n + 1);
                    let tz = self.cnf.fresh_var();
                    self.define_and(tz, z, a[wi]);
                    terms.push(tz);
                    for i in 0..n {
                        let t = self.cnf.fresh_var();
                        self.define_and(t, guards[i], b[i * w + wi]);
                        terms.push(t);
                    }
                    self.or_tree_into(y[wi], &terms);
                }
            }
            CellKind::Eq => {
                let a = self.port_lits(cell, "A");
                let b = self.port_lits(cell, "B");
                let y = self.port_lits(cell, "Y")[0];
                let zero = self.lit(SigBit::Const(Const::Zero));
                let w = a.len().max(b.len());
                let mut eq_bits = Vec::with_capacity(w);
                for i in 0..w {
                    let av = a.get(i).copied().unwrap_or(zero);
                    let bv = b.get(i).copied().unwrap_or(zero);
                    let x = self.cnf.fresh_var();
                    self.define_xor(x, av, bv);
                    eq_bits.push(-x);
                }
                self.and_tree_into(y, &eq_bits);
            }
            CellKind::LogicNot => {
                let a = self.port_lits(cell, "A");
                let y = self.port_lits(cell, "Y")[0];
                let neg: Vec<i32> = a.iter().map(|&l| -l).collect();
                self.and_tree_into(y, &neg);
            }
            CellKind::Not => {
                let a = self.port_lits(cell, "A");
                let y = self.port_lits(cell, "Y");
                for i in 0..y.len() {
                    self.bind(y[i], -a[i]);
                }
            }
            CellKind::And | CellKind::Or | CellKind::Xor => {
                let a = self.port_lits(cell, "A");
                let b = self.port_lits(cell, "B");
                let y = self.port_lits(cell, "Y");
                for i in 0..y.len() {
                    match cell.kind {
                        CellKind::And => self.define_and(y[i], a[i], b[i]),
                        CellKind::Or => self.define_or(y[i], a[i], b[i]),
                        _ => self.define_xor(y[i], a[i], b[i]),
                    }
                }
            }
            CellKind::LogicAnd | CellKind::LogicOr => {
                let a = self.port_lits(cell, "A");
                let b = self.port_lits(cell, "B");
                let y = self.port_lits(cell, "Y")[0];
                let ta = self.cnf.fresh_var();
                self.or_tree_into(ta, &a);
                let tb = self.cnf.fresh_var();
                self.or_tree_into(tb, &b);
                if cell.kind == CellKind::LogicAnd {
                    self.define_and(y, ta, tb);
                } else {
                    self.define_or(y, ta, tb);
                }
            }
            CellKind::ReduceOr | CellKind::ReduceBool => {
                let a = self.port_lits(cell, "A");
                let y = self.port_lits(cell, "Y")[0];
                self.or_tree_into(y, &a);
            }
            CellKind::ReduceAnd => {
                let a = self.port_lits(cell, "A");
                let y = self.port_lits(cell, "Y")[0];
                self.and_tree_into(y, &a);
            }
            CellKind::Dff | CellKind::Opaque(_) => {
                unreachable!("cell {}: unsupported kind in encoding", cell.name)
            }
        }
    }
}

/// Encode `cells` as CNF. `facts` become unit clauses; `extra_nets` are
/// allocated even when no cell mentions them (free boundary nets of an
/// empty slice).
pub fn encode<'a>(
    cells: impl IntoIterator<Item = &'a Cell>,
    facts: &[(u32, bool)],
    extra_nets: &[u32],
) -> Encoded {
    let mut w = GateWriter {
        cnf: Cnf::new(),
        map: VarMap::default(),
        gates: 0,
    };
    for cell in cells {
        w.encode_cell(cell);
    }
    for &n in extra_nets {
        w.map.alloc(&mut w.cnf, n);
    }
    for &(net, val) in facts {
        let v = w.map.alloc(&mut w.cnf, net);
        w.cnf.add_clause(&[if val { v } else { -v }]);
    }
    Encoded {
        cnf: w.cnf,
        map: w.map,
        gate_count: w.gates,
    }
}

/// Outcome of exhaustively simulating a target net over a cell slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimOutcome {
    Const0,
    Const1,
    Varies,
    /// No assignment of the free nets satisfies the facts.
    Unreachable,
}

/// Enumerate every assignment of the free nets feeding `cells`
/// (word-parallel, 64 per pass) and classify `target` under `facts`.
/// `cells` must be topologically sorted. Returns None when the free-input
/// count exceeds `max_free`. A shared unknown-constant input is modeled as
/// one extra free net.
pub fn simulate_exhaustive(
    n: &Netlist,
    cells: &[CellId],
    target: u32,
    facts: &[(u32, bool)],
    max_free: usize,
) -> Option<SimOutcome> {
    use std::collections::{BTreeMap, BTreeSet};
    let mut driven: BTreeSet<u32> = BTreeSet::new();
    let mut has_x = false;
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
    let note = |net: u32, driven: &BTreeSet<u32>, free: &mut BTreeSet<u32>| {
        if !driven.contains(&net) {
            free.insert(net);
        }
    };
    for &id in cells {
        for (_, sig) in n.cell(id).inputs() {
            for bit in sig.bits() {
                match bit {
                    SigBit::Net(m) => note(*m, &driven, &mut free),
                    SigBit::Const(Const::X) => has_x = true,
                    _ => {}
                }
            }
        }
    }
    note(target, &driven, &mut free);
    for &(net, _) in facts {
        note(net, &driven, &mut free);
    }
    let nf = free.len() + has_x as usize;
    if nf > max_free {
        return None;
    }
    let slots: BTreeMap<u32, usize> = free.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let (mut seen0, mut seen1, mut any) = (false, false, false);
    for block in 0..crate::eval::block_count(nf) {
        let mut store: BTreeMap<u32, u64> = slots
            .iter()
            .map(|(&m, &i)| (m, crate::eval::input_word(i, block)))
            .collect();
        let xw = if has_x {
            crate::eval::input_word(free.len(), block)
        } else {
            0
        };
        for &id in cells {
            let mut outs: Vec<(u32, u64)> = Vec::new();
            crate::eval::eval_cell(
                n.cell(id),
                |bit| match bit {
                    SigBit::Net(m) => *store
                        .get(&m)
                        .unwrap_or_else(|| panic!("net {m} unresolved; cells not in topo order")),
                    SigBit::Const(Const::Zero) => 0,
                    SigBit::Const(Const::One) => !0,
                    SigBit::Const(Const::X) => xw,
                },
                |net, w| outs.push((net, w)),
            );
            for (net, w) in outs {
                store.insert(net, w);
            }
        }
        // Rows beyond 2^nf in the last word repeat earlier assignments;
        // mask them off so Unreachable detection stays exact.
        let mut mask = if nf < 6 {
            (1u64 << (1usize << nf)) - 1
        } else {
            !0
        };
        for &(net, val) in facts {
            let w = store[&net];
            mask &= if val { w } else { !w };
        }
        if mask == 0 {
            continue;
        }
        any = true;
        let tw = store[&target];
        if mask & tw != 0 {
            seen1 = true;
        }
        if mask & !tw != 0 {
            seen0 = true;
        }
        if seen0 && seen1 {
            return Some(SimOutcome::Varies);
        }
    }
    Some(match (any, seen0, seen1) {
        (false, _, _) => SimOutcome::Unreachable,
        (_, true, false) => SimOutcome::Const0,
        (_, false, true) => SimOutcome::Const1,
        _ => unreachable!("a consistent row fixes the target"),
    })
}

/// Reference decision procedure: exhaustive bit-parallel enumeration.
/// Returns None above 24 variables. Used by the test oracles.
pub fn exhaustive_sat(cnf: &Cnf) -> Option<bool> {
    if cnf.num_vars > 24 {
        return None;
    }
    for block in 0..crate::eval::block_count(cnf.num_vars) {
        let words: Vec<u64> = (0..cnf.num_vars)
            .map(|i| crate::eval::input_word(i, block))
            .collect();
        let mut all = !0u64;
        for c in &cnf.clauses {
            let mut cw = 0u64;
            for &l in c {
                let w = words[l.unsigned_abs() as usize - 1];
                cw |= if l > 0 { w } else { !w };
            }
            all &= cw;
            if all == 0 {
                break;
            }
        }
        // Mask off samples beyond 2^n when n < 6.
        if cnf.num_vars < 6 {
            all &= (1u64 << (1usize << cnf.num_vars)) - 1;
        }
        if all != 0 {
            return Some(true);
        }
    }
    Some(false)
}
