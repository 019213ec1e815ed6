//! RTL-level netlist data model: multi-bit signals, typed cells, graph
//! indices, rewrite primitives and the dead-cell sweep.
//!
//! Signals are ordered bit lists (LSB first). Every bit is either a net id
//! or a constant (`0`, `1`, `x`). The `x` constant is an unknown that all
//! analyses treat as a free Boolean variable, never as 0 or 1.
//!
//! Mux polarity convention: `Y = S ? B : A` (B is selected when S is 1).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Errors produced while building or validating a netlist.
#[derive(Debug, Error)]
pub enum NetlistError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("netlist schema: {0}")]
    Schema(String),
    #[error("no module named {0:?} in design")]
    NoSuchModule(String),
    #[error("design contains {0} modules; select one by name")]
    AmbiguousModule(usize),
    #[error("cell {cell}: width mismatch on port {port}: expected {expected}, got {got}")]
    WidthMismatch {
        cell: String,
        port: String,
        expected: usize,
        got: usize,
    },
    #[error("cell {cell}: missing connection for port {port}")]
    MissingPort { cell: String, port: String },
    #[error("net {0} is driven more than once")]
    MultipleDrivers(u32),
    #[error("combinational cycle through cell {0}")]
    CombinationalCycle(String),
}

/// A single signal bit: a net id or a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SigBit {
    Net(u32),
    Const(Const),
}

/// Constant bit values. `X` is unknown and is never coerced to 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Const {
    Zero,
    One,
    X,
}

impl SigBit {
    pub fn as_net(&self) -> Option<u32> {
        match self {
            SigBit::Net(n) => Some(*n),
            SigBit::Const(_) => None,
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, SigBit::Const(_))
    }
}

impl fmt::Display for SigBit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigBit::Net(n) => write!(f, "{n}"),
            SigBit::Const(Const::Zero) => write!(f, "0"),
            SigBit::Const(Const::One) => write!(f, "1"),
            SigBit::Const(Const::X) => write!(f, "x"),
        }
    }
}

/// An ordered list of bits, LSB first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SigSpec(pub Vec<SigBit>);

impl SigSpec {
    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn bits(&self) -> &[SigBit] {
        &self.0
    }

    pub fn from_net(net: u32) -> Self {
        SigSpec(vec![SigBit::Net(net)])
    }

    pub fn from_nets(nets: impl IntoIterator<Item = u32>) -> Self {
        SigSpec(nets.into_iter().map(SigBit::Net).collect())
    }

    pub fn constant(value: Const, width: usize) -> Self {
        SigSpec(vec![SigBit::Const(value); width])
    }

    /// Bits `[lo, lo+len)` as a new spec.
    pub fn slice(&self, lo: usize, len: usize) -> SigSpec {
        SigSpec(self.0[lo..lo + len].to_vec())
    }
}

impl From<Vec<SigBit>> for SigSpec {
    fn from(bits: Vec<SigBit>) -> Self {
        SigSpec(bits)
    }
}

impl std::ops::Index<usize> for SigSpec {
    type Output = SigBit;

    fn index(&self, i: usize) -> &SigBit {
        &self.0[i]
    }
}

/// Cell kinds understood by the analyses. Anything else round-trips as
/// `Opaque` and is excluded from optimization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CellKind {
    /// `Y = S ? B : A`, 1-bit S.
    Mux,
    /// Parallel mux: n-bit one-hot selector S, `B` holds n chunks of
    /// `width(Y)` bits; bit i of S selects chunk i, no bit set selects A.
    Pmux,
    /// `Y = (A == B)`, unsigned, 1-bit Y.
    Eq,
    /// `Y = (A == 0)`, 1-bit Y.
    LogicNot,
    /// Bitwise complement.
    Not,
    And,
    Or,
    Xor,
    /// `Y = (A != 0) && (B != 0)`, 1-bit Y.
    LogicAnd,
    /// `Y = (A != 0) || (B != 0)`, 1-bit Y.
    LogicOr,
    ReduceOr,
    ReduceAnd,
    /// Same semantics as `ReduceOr`.
    ReduceBool,
    /// D flip-flop; the only sequential kind.
    Dff,
    /// Unknown type, preserved verbatim, never analyzed.
    Opaque(String),
}

impl CellKind {
    pub fn from_type_name(ty: &str) -> CellKind {
        match ty {
            "$mux" => CellKind::Mux,
            "$pmux" => CellKind::Pmux,
            "$eq" => CellKind::Eq,
            "$logic_not" => CellKind::LogicNot,
            "$not" => CellKind::Not,
            "$and" => CellKind::And,
            "$or" => CellKind::Or,
            "$xor" => CellKind::Xor,
            "$logic_and" => CellKind::LogicAnd,
            "$logic_or" => CellKind::LogicOr,
            "$reduce_or" => CellKind::ReduceOr,
            "$reduce_and" => CellKind::ReduceAnd,
            "$reduce_bool" => CellKind::ReduceBool,
            "$dff" => CellKind::Dff,
            other => CellKind::Opaque(other.to_string()),
        }
    }

    pub fn type_name(&self) -> &str {
        match self {
            CellKind::Mux => "$mux",
            CellKind::Pmux => "$pmux",
            CellKind::Eq => "$eq",
            CellKind::LogicNot => "$logic_not",
            CellKind::Not => "$not",
            CellKind::And => "$and",
            CellKind::Or => "$or",
            CellKind::Xor => "$xor",
            CellKind::LogicAnd => "$logic_and",
            CellKind::LogicOr => "$logic_or",
            CellKind::ReduceOr => "$reduce_or",
            CellKind::ReduceAnd => "$reduce_and",
            CellKind::ReduceBool => "$reduce_bool",
            CellKind::Dff => "$dff",
            CellKind::Opaque(ty) => ty,
        }
    }

    pub fn is_opaque(&self) -> bool {
        matches!(self, CellKind::Opaque(_))
    }

    pub fn is_sequential(&self) -> bool {
        matches!(self, CellKind::Dff)
    }

    /// Output port names for known kinds.
    fn output_ports(&self) -> &'static [&'static str] {
        match self {
            CellKind::Dff => &["Q"],
            CellKind::Opaque(_) => &[],
            _ => &["Y"],
        }
    }
}

/// A cell instance: kind, port connections, and raw parameters kept for
/// lossless JSON round trips.
#[derive(Debug, Clone)]
pub struct Cell {
    pub name: String,
    pub kind: CellKind,
    pub connections: BTreeMap<String, SigSpec>,
    /// Raw `parameters` object from the source JSON (or one we synthesize
    /// on write). Never interpreted beyond width/signedness validation.
    pub parameters: BTreeMap<String, serde_json::Value>,
    /// Raw `port_directions`, used to classify opaque cell ports.
    pub port_directions: BTreeMap<String, PortDir>,
}

impl Cell {
    pub fn port(&self, name: &str) -> Option<&SigSpec> {
        self.connections.get(name)
    }

    /// Output connections of this cell: known kinds by convention,
    /// opaque kinds from `port_directions`.
    pub fn outputs(&self) -> Vec<(&str, &SigSpec)> {
        if self.kind.is_opaque() {
            self.connections
                .iter()
                .filter(|(p, _)| self.port_directions.get(*p) == Some(&PortDir::Output))
                .map(|(p, s)| (p.as_str(), s))
                .collect()
        } else {
            self.kind
                .output_ports()
                .iter()
                .filter_map(|p| self.connections.get(*p).map(|s| (*p, s)))
                .collect()
        }
    }

    /// Input connections (everything that is not an output).
    pub fn inputs(&self) -> Vec<(&str, &SigSpec)> {
        let outs: Vec<&str> = self.outputs().iter().map(|(p, _)| *p).collect();
        self.connections
            .iter()
            .filter(|(p, _)| !outs.contains(&p.as_str()))
            .map(|(p, s)| (p.as_str(), s))
            .collect()
    }

    /// True when an `$eq` cell carries signed comparison parameters;
    /// such cells are excluded from every analysis.
    pub fn is_signed_eq(&self) -> bool {
        if self.kind != CellKind::Eq {
            return false;
        }
        ["A_SIGNED", "B_SIGNED"].iter().any(|k| {
            self.parameters
                .get(*k)
                .map(param_is_nonzero)
                .unwrap_or(false)
        })
    }

    /// A kind we can analyze and evaluate. Signed eq is demoted to opaque
    /// handling throughout.
    pub fn is_supported(&self) -> bool {
        !self.kind.is_opaque() && !self.is_signed_eq()
    }
}

fn param_is_nonzero(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Number(n) => n.as_i64().map(|i| i != 0).unwrap_or(true),
        serde_json::Value::String(s) => s.contains('1'),
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortDir {
    Input,
    Output,
    InOut,
}

/// A module-level port.
#[derive(Debug, Clone)]
pub struct Port {
    pub name: String,
    pub dir: PortDir,
    pub bits: SigSpec,
}

/// A named wire annotation, carried through for round trips.
#[derive(Debug, Clone)]
pub struct NetName {
    pub name: String,
    pub bits: SigSpec,
    pub attributes: BTreeMap<String, serde_json::Value>,
}

/// Stable handle to a cell slot. Slots survive removals, so ids taken
/// before a sweep stay valid for the surviving cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(pub u32);

/// One module's gate graph. Exactly one module is optimized per run.
#[derive(Debug, Clone)]
pub struct Netlist {
    pub name: String,
    pub ports: Vec<Port>,
    pub netnames: Vec<NetName>,
    /// Raw module attributes, round-tripped verbatim.
    pub attributes: BTreeMap<String, serde_json::Value>,
    slots: Vec<Option<Cell>>,
    next_net: u32,
}

impl Netlist {
    pub fn new(name: impl Into<String>) -> Self {
        Netlist {
            name: name.into(),
            ports: Vec::new(),
            netnames: Vec::new(),
            attributes: BTreeMap::new(),
            slots: Vec::new(),
            next_net: 2,
        }
    }

    pub fn add_port(&mut self, name: impl Into<String>, dir: PortDir, bits: SigSpec) {
        self.note_nets(&bits);
        self.ports.push(Port {
            name: name.into(),
            dir,
            bits,
        });
    }

    pub fn add_cell(&mut self, cell: Cell) -> CellId {
        for (_, sig) in cell.connections.iter() {
            self.note_nets(sig);
        }
        let id = CellId(self.slots.len() as u32);
        self.slots.push(Some(cell));
        id
    }

    pub fn remove_cell(&mut self, id: CellId) -> Option<Cell> {
        self.slots[id.0 as usize].take()
    }

    pub fn cell(&self, id: CellId) -> &Cell {
        self.slots[id.0 as usize]
            .as_ref()
            .expect("stale cell id")
    }

    pub fn cell_mut(&mut self, id: CellId) -> &mut Cell {
        self.slots[id.0 as usize]
            .as_mut()
            .expect("stale cell id")
    }

    pub fn contains(&self, id: CellId) -> bool {
        self.slots
            .get(id.0 as usize)
            .map(|s| s.is_some())
            .unwrap_or(false)
    }

    /// Live cells in stable id order.
    pub fn cells(&self) -> impl Iterator<Item = (CellId, &Cell)> {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|c| (CellId(i as u32), c)))
    }

    pub fn cell_count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    pub fn find_cell(&self, name: &str) -> Option<CellId> {
        self.cells()
            .find(|(_, c)| c.name == name)
            .map(|(id, _)| id)
    }

    fn note_nets(&mut self, sig: &SigSpec) {
        for bit in sig.bits() {
            if let SigBit::Net(n) = bit {
                self.next_net = self.next_net.max(n + 1);
            }
        }
    }

    /// Allocate a fresh net id unused anywhere in the module.
    pub fn fresh_net(&mut self) -> u32 {
        let n = self.next_net;
        self.next_net += 1;
        n
    }

    /// Every net mentioned by ports, cells, or netnames.
    pub fn all_nets(&self) -> BTreeSet<u32> {
        let mut nets = BTreeSet::new();
        let mut take = |sig: &SigSpec| {
            for bit in sig.bits() {
                if let SigBit::Net(n) = bit {
                    nets.insert(*n);
                }
            }
        };
        for port in &self.ports {
            take(&port.bits);
        }
        for (_, cell) in self.cells() {
            for (_, sig) in cell.connections.iter() {
                take(sig);
            }
        }
        nets
    }

    /// Validate structural invariants: port widths per kind, single
    /// drivers, and combinational acyclicity. Called after parsing and
    /// cheap enough to re-run after rewrites in debug builds.
    pub fn validate(&self) -> Result<(), NetlistError> {
        self.check_cell_widths()?;
        let _ = self.try_build_indices()?;
        Ok(())
    }

    fn check_cell_widths(&self) -> Result<(), NetlistError> {
        for (_, cell) in self.cells() {
            check_widths(cell)?;
        }
        Ok(())
    }

    /// Replace every use of net `old` (cell inputs and module output port
    /// bits) with `new`. The driver of `old` is left alone; callers remove
    /// or disconnect it separately.
    pub fn replace_net_uses(&mut self, old: u32, new: SigBit) {
        let is_old = |b: &SigBit| *b == SigBit::Net(old);
        for slot in self.slots.iter_mut() {
            let Some(cell) = slot else { continue };
            let out_ports: Vec<String> = cell.outputs().iter().map(|(p, _)| p.to_string()).collect();
            for (port, sig) in cell.connections.iter_mut() {
                if out_ports.contains(port) {
                    continue;
                }
                for bit in sig.0.iter_mut() {
                    if is_old(bit) {
                        *bit = new;
                    }
                }
            }
        }
        for port in self.ports.iter_mut() {
            if port.dir == PortDir::Output {
                for bit in port.bits.0.iter_mut() {
                    if is_old(bit) {
                        *bit = new;
                    }
                }
            }
        }
    }

    /// Reconnect one port of one cell.
    pub fn reconnect(&mut self, id: CellId, port: &str, sig: SigSpec) {
        self.note_nets(&sig);
        let cell = self.cell_mut(id);
        cell.connections.insert(port.to_string(), sig);
    }

    /// Remove cells whose outputs reach no module output and no flip-flop
    /// input, repeating until a fixpoint. Returns the number removed.
    pub fn dead_cell_sweep(&mut self) -> usize {
        let mut removed = 0usize;
        loop {
            // Nets with at least one live consumer (cell input or output port).
            let mut used: BTreeSet<u32> = BTreeSet::new();
            for port in &self.ports {
                if port.dir == PortDir::Output {
                    for bit in port.bits.bits() {
                        if let SigBit::Net(n) = bit {
                            used.insert(*n);
                        }
                    }
                }
            }
            for (_, cell) in self.cells() {
                for (_, sig) in cell.inputs() {
                    for bit in sig.bits() {
                        if let SigBit::Net(n) = bit {
                            used.insert(*n);
                        }
                    }
                }
            }
            let dead: Vec<CellId> = self
                .cells()
                .filter(|(_, cell)| {
                    let outs = cell.outputs();
                    // Cells with no outputs at all (e.g. opaque sinks) are kept.
                    !outs.is_empty()
                        && outs.iter().all(|(_, sig)| {
                            sig.bits()
                                .iter()
                                .all(|b| b.as_net().map(|n| !used.contains(&n)).unwrap_or(true))
                        })
                })
                .map(|(id, _)| id)
                .collect();
            if dead.is_empty() {
                break;
            }
            removed += dead.len();
            for id in dead {
                self.remove_cell(id);
            }
        }
        removed
    }

    pub fn build_indices(&self) -> GraphIndex {
        self.try_build_indices()
            .expect("index construction on an unvalidated netlist")
    }

    /// Driver/fanout maps plus a topological order over combinational
    /// cells. Fails on multiple drivers or a combinational cycle.
    pub fn try_build_indices(&self) -> Result<GraphIndex, NetlistError> {
        let mut drivers: HashMap<u32, Driver> = HashMap::new();
        let mut add_driver = |net: u32, d: Driver| -> Result<(), NetlistError> {
            if drivers.insert(net, d).is_some() {
                return Err(NetlistError::MultipleDrivers(net));
            }
            Ok(())
        };
        for port in &self.ports {
            if port.dir != PortDir::Output {
                for (i, bit) in port.bits.bits().iter().enumerate() {
                    if let SigBit::Net(n) = bit {
                        add_driver(
                            *n,
                            Driver::ModuleInput {
                                port: port.name.clone(),
                                bit: i,
                            },
                        )?;
                    }
                }
            }
        }
        for (id, cell) in self.cells() {
            for (pname, sig) in cell.outputs() {
                for (i, bit) in sig.bits().iter().enumerate() {
                    if let SigBit::Net(n) = bit {
                        add_driver(
                            *n,
                            Driver::Cell {
                                cell: id,
                                port: pname.to_string(),
                                bit: i,
                            },
                        )?;
                    }
                }
            }
        }

        let mut fanouts: HashMap<u32, Vec<Fanout>> = HashMap::new();
        let mut output_uses: HashMap<u32, Vec<(String, usize)>> = HashMap::new();
        for (id, cell) in self.cells() {
            for (pname, sig) in cell.inputs() {
                for (i, bit) in sig.bits().iter().enumerate() {
                    if let SigBit::Net(n) = bit {
                        fanouts.entry(*n).or_default().push(Fanout {
                            cell: id,
                            port: pname.to_string(),
                            bit: i,
                        });
                    }
                }
            }
        }
        for port in &self.ports {
            if port.dir == PortDir::Output {
                for (i, bit) in port.bits.bits().iter().enumerate() {
                    if let SigBit::Net(n) = bit {
                        output_uses
                            .entry(*n)
                            .or_default()
                            .push((port.name.clone(), i));
                    }
                }
            }
        }
        for v in fanouts.values_mut() {
            v.sort();
        }

        // Kahn's algorithm over combinational cells. Dff cells are excluded:
        // their outputs act as sources and their inputs as sinks.
        let comb: Vec<CellId> = self
            .cells()
            .filter(|(_, c)| !c.kind.is_sequential())
            .map(|(id, _)| id)
            .collect();
        let comb_set: BTreeSet<CellId> = comb.iter().copied().collect();
        let mut indegree: BTreeMap<CellId, usize> = comb.iter().map(|id| (*id, 0)).collect();
        let mut edges: BTreeMap<CellId, Vec<CellId>> = BTreeMap::new();
        for &id in &comb {
            for (_, sig) in self.cell(id).inputs() {
                for bit in sig.bits() {
                    let Some(n) = bit.as_net() else { continue };
                    if let Some(Driver::Cell { cell, .. }) = drivers.get(&n) {
                        if comb_set.contains(cell) {
                            edges.entry(*cell).or_default().push(id);
                            *indegree.get_mut(&id).unwrap() += 1;
                        }
                    }
                }
            }
        }
        let mut ready: Vec<CellId> = indegree
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(id, _)| *id)
            .collect();
        ready.sort();
        let mut topo = Vec::with_capacity(comb.len());
        let mut queue: std::collections::VecDeque<CellId> = ready.into();
        while let Some(id) = queue.pop_front() {
            topo.push(id);
            if let Some(next) = edges.get(&id) {
                for &m in next {
                    let d = indegree.get_mut(&m).unwrap();
                    *d -= 1;
                    if *d == 0 {
                        queue.push_back(m);
                    }
                }
            }
        }
        if topo.len() != comb.len() {
            let stuck = indegree
                .iter()
                .find(|(_, d)| **d > 0)
                .map(|(id, _)| self.cell(*id).name.clone())
                .unwrap_or_default();
            return Err(NetlistError::CombinationalCycle(stuck));
        }

        Ok(GraphIndex {
            drivers,
            fanouts,
            output_uses,
            topo,
        })
    }
}

fn expect_width(
    cell: &Cell,
    port: &str,
    expected: usize,
) -> Result<(), NetlistError> {
    let sig = cell.port(port).ok_or_else(|| NetlistError::MissingPort {
        cell: cell.name.clone(),
        port: port.to_string(),
    })?;
    if sig.width() != expected {
        return Err(NetlistError::WidthMismatch {
            cell: cell.name.clone(),
            port: port.to_string(),
            expected,
            got: sig.width(),
        });
    }
    Ok(())
}

fn port_width(cell: &Cell, port: &str) -> Result<usize, NetlistError> {
    cell.port(port)
        .map(|s| s.width())
        .ok_or_else(|| NetlistError::MissingPort {
            cell: cell.name.clone(),
            port: port.to_string(),
        })
}

/// Port-width consistency rules for the known cell kinds.
pub fn check_widths(cell: &Cell) -> Result<(), NetlistError> {
    match &cell.kind {
        CellKind::Mux => {
            let w = port_width(cell, "Y")?;
            expect_width(cell, "A", w)?;
            expect_width(cell, "B", w)?;
            expect_width(cell, "S", 1)?;
        }
        CellKind::Pmux => {
            let w = port_width(cell, "Y")?;
            let n = port_width(cell, "S")?;
            expect_width(cell, "A", w)?;
            expect_width(cell, "B", w.checked_mul(n).unwrap_or(usize::MAX))?;
        }
        CellKind::Eq => {
            // A and B may differ in width; comparison zero-extends.
            port_width(cell, "A")?;
            port_width(cell, "B")?;
            expect_width(cell, "Y", 1)?;
        }
        CellKind::LogicNot | CellKind::ReduceOr | CellKind::ReduceAnd | CellKind::ReduceBool => {
            port_width(cell, "A")?;
            expect_width(cell, "Y", 1)?;
        }
        CellKind::LogicAnd | CellKind::LogicOr => {
            port_width(cell, "A")?;
            port_width(cell, "B")?;
            expect_width(cell, "Y", 1)?;
        }
        CellKind::Not => {
            let w = port_width(cell, "Y")?;
            expect_width(cell, "A", w)?;
        }
        CellKind::And | CellKind::Or | CellKind::Xor => {
            let w = port_width(cell, "Y")?;
            expect_width(cell, "A", w)?;
            expect_width(cell, "B", w)?;
        }
        CellKind::Dff => {
            let w = port_width(cell, "Q")?;
            expect_width(cell, "D", w)?;
            expect_width(cell, "CLK", 1)?;
        }
        CellKind::Opaque(_) => {}
    }
    Ok(())
}

/// What drives a net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Driver {
    ModuleInput { port: String, bit: usize },
    Cell { cell: CellId, port: String, bit: usize },
}

/// One consuming cell port bit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fanout {
    pub cell: CellId,
    pub port: String,
    pub bit: usize,
}

/// Driver map, fanout map, module-output uses, and a combinational
/// topological order. Built once per analysis phase over an immutable
/// snapshot.
#[derive(Debug, Clone)]
pub struct GraphIndex {
    drivers: HashMap<u32, Driver>,
    fanouts: HashMap<u32, Vec<Fanout>>,
    output_uses: HashMap<u32, Vec<(String, usize)>>,
    topo: Vec<CellId>,
}

impl GraphIndex {
    pub fn driver(&self, net: u32) -> Option<&Driver> {
        self.drivers.get(&net)
    }

    /// The cell driving `net`, when a combinational or sequential cell does.
    pub fn driver_cell(&self, net: u32) -> Option<CellId> {
        match self.drivers.get(&net) {
            Some(Driver::Cell { cell, .. }) => Some(*cell),
            _ => None,
        }
    }

    pub fn fanouts(&self, net: u32) -> &[Fanout] {
        self.fanouts.get(&net).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn feeds_module_output(&self, net: u32) -> bool {
        self.output_uses.contains_key(&net)
    }

    /// Combinational cells, inputs before consumers.
    pub fn topo(&self) -> &[CellId] {
        &self.topo
    }
}
