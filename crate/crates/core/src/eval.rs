//! Word-parallel evaluation of cell semantics.
//!
//! Every net carries a 64-bit word holding 64 independent samples, so one
//! sweep over the netlist evaluates 64 input vectors. This module is the
//! single definition of what each cell kind computes; the CNF encoder and
//! the AIG mapper mirror these semantics exactly.
//!
//! pmux selection is guarded exactly-one-hot: branch i is taken when
//! S[i]=1 and every other S bit is 0; when no bit or more than one bit is
//! set, the default input A is taken only in the all-zero case, and the
//! output is 0 otherwise. Path facts derived from pmux branches rely on
//! this reading.

use std::collections::{BTreeMap, BTreeSet};

use crate::netlist::{Cell, CellKind, Const, GraphIndex, Netlist, PortDir, SigBit};

/// Evaluate one combinational cell. `read` supplies input bit words
/// (including constants), `write` receives each output net's word.
/// Sequential and opaque cells are not evaluated here.
pub fn eval_cell<R, W>(cell: &Cell, mut read: R, mut write: W)
where
    R: FnMut(SigBit) -> u64,
    W: FnMut(u32, u64),
{
    let bits = |port: &str| -> &[SigBit] {
        cell.port(port)
            .unwrap_or_else(|| panic!("cell {}: missing port {port}", cell.name))
            .bits()
    };
    let mut write_out = |port: &str, words: &[u64]| {
        for (bit, word) in bits(port).iter().zip(words) {
            if let SigBit::Net(n) = bit {
                write(*n, *word);
            }
        }
    };
    match &cell.kind {
        CellKind::Mux => {
            let s = read(bits("S")[0]);
            let out: Vec<u64> = bits("A")
                .iter()
                .zip(bits("B"))
                .map(|(&a, &b)| (s & read(b)) | (!s & read(a)))
                .collect();
            write_out("Y", &out);
        }
        CellKind::Pmux => {
            let s: Vec<u64> = bits("S").iter().map(|&b| read(b)).collect();
            let n = s.len();
            let w = bits("Y").len();
            let mut none = !0u64;
            for &sv in &s {
                none &= !sv;
            }
            let guard: Vec<u64> = (0..n)
                .map(|i| {
                    let mut g = s[i];
                    for (j, &sv) in s.iter().enumerate() {
                        if j != i {
                            g &= !sv;
                        }
                    }
                    g
                })
                .collect();
            let a = bits("A");
            let b = bits("B");
            let out: Vec<u64> = (0..w)
                .map(|wi| {
                    let mut y = none & read(a[wi]);
                    for (i, &g) in guard.iter().enumerate() {
                        y |= g & read(b[i * w + wi]);
                    }
                    y
                })
                .collect();
            write_out("Y", &out);
        }
        CellKind::Eq => {
            let a = bits("A");
            let b = bits("B");
            let w = a.len().max(b.len());
            let mut acc = !0u64;
            for i in 0..w {
                let av = a.get(i).map(|&x| read(x)).unwrap_or(0);
                let bv = b.get(i).map(|&x| read(x)).unwrap_or(0);
                acc &= !(av ^ bv);
            }
            write_out("Y", &[acc]);
        }
        CellKind::LogicNot => {
            let mut any = 0u64;
            for &a in bits("A") {
                any |= read(a);
            }
            write_out("Y", &[!any]);
        }
        CellKind::Not => {
            let out: Vec<u64> = bits("A").iter().map(|&a| !read(a)).collect();
            write_out("Y", &out);
        }
        CellKind::And | CellKind::Or | CellKind::Xor => {
            let kind = cell.kind.clone();
            let out: Vec<u64> = bits("A")
                .iter()
                .zip(bits("B"))
                .map(|(&a, &b)| {
                    let (a, b) = (read(a), read(b));
                    match kind {
                        CellKind::And => a & b,
                        CellKind::Or => a | b,
                        _ => a ^ b,
                    }
                })
                .collect();
            write_out("Y", &out);
        }
        CellKind::LogicAnd | CellKind::LogicOr => {
            let mut a_any = 0u64;
            for &a in bits("A") {
                a_any |= read(a);
            }
            let mut b_any = 0u64;
            for &b in bits("B") {
                b_any |= read(b);
            }
            let y = if cell.kind == CellKind::LogicAnd {
                a_any & b_any
            } else {
                a_any | b_any
            };
            write_out("Y", &[y]);
        }
        CellKind::ReduceOr | CellKind::ReduceBool => {
            let mut any = 0u64;
            for &a in bits("A") {
                any |= read(a);
            }
            write_out("Y", &[any]);
        }
        CellKind::ReduceAnd => {
            let mut all = !0u64;
            for &a in bits("A") {
                all &= read(a);
            }
            write_out("Y", &[all]);
        }
        CellKind::Dff | CellKind::Opaque(_) => {
            panic!("cell {}: not combinationally evaluable", cell.name);
        }
    }
}

/// The word for free input `index` in enumeration block `block`. Inputs
/// 0..6 vary within a word; higher inputs take their value from the block
/// counter, so all 2^k assignments are covered by 2^(k-6) blocks.
pub fn input_word(index: usize, block: u64) -> u64 {
    const PATTERNS: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    if index < 6 {
        PATTERNS[index]
    } else if (block >> (index - 6)) & 1 == 1 {
        !0
    } else {
        0
    }
}

/// Number of 64-sample blocks needed to enumerate `k` free inputs.
pub fn block_count(k: usize) -> u64 {
    1u64 << k.saturating_sub(6)
}

/// A pseudo-input of the combinational view of a netlist: a source of
/// unconstrained value. The key is stable across optimization so two
/// netlists can be compared input-for-input.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PiKey {
    /// Input or inout port bit.
    Port(String, usize),
    /// Flip-flop current state, by cell name and bit.
    DffQ(String, usize),
    /// Output bit of an opaque cell, by cell name, port, and bit.
    OpaqueOut(String, String, usize),
    /// Net with no driver at all.
    Floating(u32),
    /// Shared unknown: every constant `x` bit reads this one variable.
    X,
}

/// An observable point: output port bits and flip-flop next-state bits.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PoKey {
    Port(String, usize),
    DffD(String, usize),
}

impl std::fmt::Display for PiKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PiKey::Port(p, b) => write!(f, "{p}[{b}]"),
            PiKey::DffQ(c, b) => write!(f, "{c}.Q[{b}]"),
            PiKey::OpaqueOut(c, p, b) => write!(f, "{c}.{p}[{b}]"),
            PiKey::Floating(n) => write!(f, "net{n}"),
            PiKey::X => write!(f, "x"),
        }
    }
}

impl std::fmt::Display for PoKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PoKey::Port(p, b) => write!(f, "{p}[{b}]"),
            PoKey::DffD(c, b) => write!(f, "{c}.D[{b}]"),
        }
    }
}

/// Prepared word-parallel simulator for one netlist's combinational view.
pub struct NetlistSim<'a> {
    n: &'a Netlist,
    topo: Vec<crate::netlist::CellId>,
    net_slot: BTreeMap<u32, usize>,
    pis: Vec<(PiKey, Option<u32>)>,
    pos: Vec<(PoKey, SigBit)>,
}

impl<'a> NetlistSim<'a> {
    pub fn new(n: &'a Netlist, idx: &GraphIndex) -> NetlistSim<'a> {
        let all_nets = n.all_nets();
        let net_slot: BTreeMap<u32, usize> =
            all_nets.iter().enumerate().map(|(i, &net)| (net, i)).collect();

        let mut pis: Vec<(PiKey, Option<u32>)> = Vec::new();
        let mut covered: BTreeSet<u32> = BTreeSet::new();
        for port in &n.ports {
            if port.dir == PortDir::Output {
                continue;
            }
            for (i, bit) in port.bits.bits().iter().enumerate() {
                if let SigBit::Net(net) = bit {
                    pis.push((PiKey::Port(port.name.clone(), i), Some(*net)));
                    covered.insert(*net);
                }
            }
        }
        for (_, cell) in n.cells() {
            if cell.kind == CellKind::Dff {
                for (i, bit) in cell.port("Q").map(|s| s.bits()).unwrap_or(&[]).iter().enumerate()
                {
                    if let SigBit::Net(net) = bit {
                        pis.push((PiKey::DffQ(cell.name.clone(), i), Some(*net)));
                        covered.insert(*net);
                    }
                }
            } else if !cell.is_supported() {
                for (pname, sig) in cell.outputs() {
                    for (i, bit) in sig.bits().iter().enumerate() {
                        if let SigBit::Net(net) = bit {
                            pis.push((
                                PiKey::OpaqueOut(cell.name.clone(), pname.to_string(), i),
                                Some(*net),
                            ));
                            covered.insert(*net);
                        }
                    }
                }
            }
        }
        for &net in &all_nets {
            if idx.driver(net).is_none() && covered.insert(net) {
                pis.push((PiKey::Floating(net), Some(net)));
            }
        }

        let mut has_x = false;
        let mut scan = |bit: &SigBit| {
            if *bit == SigBit::Const(Const::X) {
                has_x = true;
            }
        };
        for port in &n.ports {
            port.bits.bits().iter().for_each(&mut scan);
        }
        for (_, cell) in n.cells() {
            for (_, sig) in cell.connections.iter() {
                sig.bits().iter().for_each(&mut scan);
            }
        }
        if has_x {
            pis.push((PiKey::X, None));
        }

        let mut pos: Vec<(PoKey, SigBit)> = Vec::new();
        for port in &n.ports {
            if port.dir == PortDir::Output {
                for (i, bit) in port.bits.bits().iter().enumerate() {
                    pos.push((PoKey::Port(port.name.clone(), i), *bit));
                }
            }
        }
        for (_, cell) in n.cells() {
            if cell.kind == CellKind::Dff {
                for (i, bit) in cell.port("D").map(|s| s.bits()).unwrap_or(&[]).iter().enumerate()
                {
                    pos.push((PoKey::DffD(cell.name.clone(), i), *bit));
                }
            }
        }

        // Supported combinational cells only; dff and opaque outputs are
        // pseudo-inputs, so their consumers still evaluate.
        let topo = idx
            .topo()
            .iter()
            .copied()
            .filter(|&id| n.cell(id).is_supported())
            .collect();

        NetlistSim {
            n,
            topo,
            net_slot,
            pis,
            pos,
        }
    }

    pub fn pseudo_inputs(&self) -> impl Iterator<Item = &PiKey> {
        self.pis.iter().map(|(k, _)| k)
    }

    pub fn pseudo_outputs(&self) -> impl Iterator<Item = &PoKey> {
        self.pos.iter().map(|(k, _)| k)
    }

    /// Evaluate every net under the given pseudo-input words, one word
    /// per entry of `pseudo_inputs()` in order.
    pub fn run(&self, pi_words: &[u64]) -> SimState<'_> {
        assert_eq!(pi_words.len(), self.pis.len());
        let mut words = vec![0u64; self.net_slot.len()];
        let mut x_word = 0u64;
        for ((key, net), &w) in self.pis.iter().zip(pi_words) {
            match net {
                Some(net) => words[self.net_slot[net]] = w,
                None => {
                    debug_assert_eq!(*key, PiKey::X);
                    x_word = w;
                }
            }
        }
        for &id in &self.topo {
            let cell = self.n.cell(id);
            let slot = &self.net_slot;
            let (mut out_nets, mut out_words) = (Vec::new(), Vec::new());
            eval_cell(
                cell,
                |bit| match bit {
                    SigBit::Net(n) => words[slot[&n]],
                    SigBit::Const(Const::Zero) => 0,
                    SigBit::Const(Const::One) => !0,
                    SigBit::Const(Const::X) => x_word,
                },
                |net, w| {
                    out_nets.push(net);
                    out_words.push(w);
                },
            );
            for (net, w) in out_nets.into_iter().zip(out_words) {
                words[self.net_slot[&net]] = w;
            }
        }
        SimState {
            words,
            x_word,
            net_slot: &self.net_slot,
        }
    }

    /// Words of every pseudo-output, in `pseudo_outputs()` order.
    pub fn output_words(&self, state: &SimState) -> Vec<u64> {
        self.pos.iter().map(|(_, bit)| state.read(*bit)).collect()
    }
}

/// Net values after one simulation sweep.
pub struct SimState<'a> {
    words: Vec<u64>,
    x_word: u64,
    net_slot: &'a BTreeMap<u32, usize>,
}

impl SimState<'_> {
    pub fn read(&self, bit: SigBit) -> u64 {
        match bit {
            SigBit::Net(n) => self.words[self.net_slot[&n]],
            SigBit::Const(Const::Zero) => 0,
            SigBit::Const(Const::One) => !0,
            SigBit::Const(Const::X) => self.x_word,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::SigSpec;
    use std::collections::BTreeMap as Map;

    fn cell(name: &str, kind: CellKind, conns: &[(&str, SigSpec)]) -> Cell {
        Cell {
            name: name.into(),
            kind,
            connections: conns.iter().map(|(p, s)| (p.to_string(), s.clone())).collect(),
            parameters: Map::new(),
            port_directions: Map::new(),
        }
    }

    fn eval1(c: &Cell, env: &[(u32, u64)]) -> Vec<(u32, u64)> {
        let env: Map<u32, u64> = env.iter().copied().collect();
        let mut out = Vec::new();
        eval_cell(
            c,
            |b| match b {
                SigBit::Net(n) => env[&n],
                SigBit::Const(Const::Zero) => 0,
                SigBit::Const(Const::One) => !0,
                SigBit::Const(Const::X) => 0,
            },
            |n, w| out.push((n, w)),
        );
        out
    }

    #[test]
    fn mux_selects_b_on_s1() {
        let c = cell(
            "m",
            CellKind::Mux,
            &[
                ("A", SigSpec::from_net(1)),
                ("B", SigSpec::from_net(2)),
                ("S", SigSpec::from_net(3)),
                ("Y", SigSpec::from_net(4)),
            ],
        );
        let out = eval1(&c, &[(1, 0b0011), (2, 0b0101), (3, 0b1111)]);
        assert_eq!(out, vec![(4, 0b0101)]);
        let out = eval1(&c, &[(1, 0b0011), (2, 0b0101), (3, 0)]);
        assert_eq!(out, vec![(4, 0b0011)]);
    }

    #[test]
    fn pmux_one_hot_and_default() {
        // 2 branches, width 1: B = [b0, b1], S = [s0, s1].
        let c = cell(
            "p",
            CellKind::Pmux,
            &[
                ("A", SigSpec::from_net(1)),
                ("B", SigSpec::from_nets([2, 3])),
                ("S", SigSpec::from_nets([4, 5])),
                ("Y", SigSpec::from_net(6)),
            ],
        );
        // Sample layout: bit0 all-zero selector, bit1 s0 only, bit2 s1
        // only, bit3 both set (invalid one-hot reads as 0).
        let a = 0b1111;
        let b0 = 0b1111;
        let b1 = 0b1111;
        let s0 = 0b1010;
        let s1 = 0b1100;
        let out = eval1(&c, &[(1, a), (2, b0), (3, b1), (4, s0), (5, s1)]);
        assert_eq!(out, vec![(6, 0b0111)]);
    }

    #[test]
    fn eq_zero_extends() {
        let c = cell(
            "e",
            CellKind::Eq,
            &[
                ("A", SigSpec::from_nets([1, 2])),
                ("B", SigSpec::from_net(3)),
                ("Y", SigSpec::from_net(4)),
            ],
        );
        // B zero-extends to A's width: equal iff a0 == b0 and a1 == 0.
        // Samples: s0 a=3,b=0; s1 a=2,b=1; s2 a=1,b=1; s3 a=0,b=0.
        // Sample positions past s3 hold a=0,b=0 and compare equal.
        let out = eval1(&c, &[(1, 0b0101), (2, 0b0011), (3, 0b0110)]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, 4);
        assert_eq!(out[0].1 & 0xF, 0b1100);
    }

    #[test]
    fn input_word_patterns_enumerate() {
        // 7 inputs: 2 blocks of 64 samples cover 128 assignments uniquely.
        let mut seen = std::collections::HashSet::new();
        for block in 0..block_count(7) {
            for s in 0..64 {
                let mut v = 0u32;
                for i in 0..7 {
                    if (input_word(i, block) >> s) & 1 == 1 {
                        v |= 1 << i;
                    }
                }
                seen.insert(v);
            }
        }
        assert_eq!(seen.len(), 128);
    }

    #[test]
    fn netlist_sim_end_to_end() {
        use crate::netlist::{Netlist, PortDir};
        let mut n = Netlist::new("t");
        n.add_port("a", PortDir::Input, SigSpec::from_net(1));
        n.add_port("b", PortDir::Input, SigSpec::from_net(2));
        n.add_port("y", PortDir::Output, SigSpec::from_net(3));
        n.add_cell(cell(
            "g",
            CellKind::And,
            &[
                ("A", SigSpec::from_net(1)),
                ("B", SigSpec::from_net(2)),
                ("Y", SigSpec::from_net(3)),
            ],
        ));
        let idx = n.build_indices();
        let sim = NetlistSim::new(&n, &idx);
        let keys: Vec<_> = sim.pseudo_inputs().cloned().collect();
        assert_eq!(
            keys,
            vec![PiKey::Port("a".into(), 0), PiKey::Port("b".into(), 0)]
        );
        let st = sim.run(&[0b0011, 0b0101]);
        assert_eq!(sim.output_words(&st), vec![0b0001]);
    }
}
