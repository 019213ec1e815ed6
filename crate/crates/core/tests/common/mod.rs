//! Shared fixtures, oracles, and seeded generators for the integration
//! suites.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use muxopt::eval::NetlistSim;
use muxopt::netlist::{Cell, CellKind, Const, Netlist, PortDir, SigBit, SigSpec};
use muxopt::restructure::{CaseBit, CaseFunction, CasePattern};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const Z: SigBit = SigBit::Const(Const::Zero);
pub const O: SigBit = SigBit::Const(Const::One);

pub fn net(n: u32) -> SigSpec {
    SigSpec::from_net(n)
}

pub fn nets(iter: impl IntoIterator<Item = u32>) -> SigSpec {
    SigSpec::from_nets(iter)
}

pub fn cell(name: &str, kind: CellKind, conns: &[(&str, SigSpec)]) -> Cell {
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

pub fn mux(name: &str, s: SigBit, a: SigSpec, b: SigSpec, y: SigSpec) -> Cell {
    cell(
        name,
        CellKind::Mux,
        &[("A", a), ("B", b), ("S", SigSpec::from(vec![s])), ("Y", y)],
    )
}

pub fn eq_const(name: &str, a: SigSpec, b: &[SigBit], y: u32) -> Cell {
    cell(
        name,
        CellKind::Eq,
        &[("A", a), ("B", SigSpec::from(b.to_vec())), ("Y", net(y))],
    )
}

/// y = s ? (s ? a : b) : c. The inner mux repeats the outer select, so
/// context propagation alone reduces it to y = s ? a : c.
pub fn nested_same_select() -> Netlist {
    let mut nl = Netlist::new("nested_same_select");
    nl.add_port("s", PortDir::Input, net(1));
    nl.add_port("a", PortDir::Input, net(2));
    nl.add_port("b", PortDir::Input, net(3));
    nl.add_port("c", PortDir::Input, net(4));
    nl.add_port("y", PortDir::Output, net(6));
    nl.add_cell(mux("inner", SigBit::Net(1), net(3), net(2), net(5)));
    nl.add_cell(mux("outer", SigBit::Net(1), net(4), net(5), net(6)));
    nl.validate().unwrap();
    nl
}

/// y = s ? (a ? s : b) : c. The inner data leg reads the outer select,
/// so on the taken path that bit is the constant 1.
pub fn select_feeds_data() -> Netlist {
    let mut nl = Netlist::new("select_feeds_data");
    nl.add_port("s", PortDir::Input, net(1));
    nl.add_port("a", PortDir::Input, net(2));
    nl.add_port("b", PortDir::Input, net(3));
    nl.add_port("c", PortDir::Input, net(4));
    nl.add_port("y", PortDir::Output, net(6));
    nl.add_cell(mux("inner", SigBit::Net(2), net(3), net(1), net(5)));
    nl.add_cell(mux("outer", SigBit::Net(1), net(4), net(5), net(6)));
    nl.validate().unwrap();
    nl
}

/// y = s ? ((s|r) ? a : b) : c. The inner select is a different net that
/// the path fact s=1 forces to 1; deduction eliminates the inner mux.
pub fn dependent_or_select() -> Netlist {
    let mut nl = Netlist::new("dependent_or_select");
    nl.add_port("s", PortDir::Input, net(1));
    nl.add_port("r", PortDir::Input, net(2));
    nl.add_port("a", PortDir::Input, net(3));
    nl.add_port("b", PortDir::Input, net(4));
    nl.add_port("c", PortDir::Input, net(7));
    nl.add_port("y", PortDir::Output, net(8));
    nl.add_cell(cell(
        "dep",
        CellKind::Or,
        &[("A", net(1)), ("B", net(2)), ("Y", net(5))],
    ));
    nl.add_cell(mux("inner", SigBit::Net(5), net(4), net(3), net(6)));
    nl.add_cell(mux("outer", SigBit::Net(1), net(7), net(6), net(8)));
    nl.validate().unwrap();
    nl
}

/// Priority chain for a 2-bit case: 00 -> p0, 01 -> p1, 10 -> p2,
/// default p3, data width `w`. Three eq cells drive the selects; the
/// exported variant adds their outputs as module outputs.
pub fn case_chain(w: usize, eq_outputs_exported: bool) -> Netlist {
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

/// Three-bit case whose cofactor counts separate the control bits: bit 2
/// shadows two patterns, bit 0 none.
pub fn assignment_case() -> CaseFunction {
    use CaseBit::*;
    CaseFunction {
        control: nets([1, 2, 3]),
        patterns: vec![
            CasePattern {
                bits: vec![Any, Any, One],
                terminal: net(10),
            },
            CasePattern {
                bits: vec![Any, One, Zero],
                terminal: net(11),
            },
            CasePattern {
                bits: vec![One, Zero, Zero],
                terminal: net(12),
            },
        ],
        default: net(13),
    }
}

/// Compare two modules over 16 rounds of hashed input words on the joint
/// pseudo-input set. Both sides read the same word for the same key.
pub fn same_function(a: &Netlist, b: &Netlist) -> bool {
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

struct Gen {
    nl: Netlist,
    rng: ChaCha8Rng,
    /// One-bit signals usable as data or selects.
    pool: Vec<SigBit>,
    cap: usize,
    names: usize,
}

impl Gen {
    fn name(&mut self, prefix: &str) -> String {
        self.names += 1;
        format!("{prefix}{}", self.names)
    }

    fn full(&self) -> bool {
        self.nl.cell_count() >= self.cap
    }

    fn pick(&mut self) -> SigBit {
        if self.rng.random_bool(0.1) {
            if self.rng.random_bool(0.5) {
                Z
            } else {
                O
            }
        } else {
            self.pool[self.rng.random_range(0..self.pool.len())]
        }
    }

    fn leaf(&mut self, w: usize) -> SigSpec {
        SigSpec::from((0..w).map(|_| self.pick()).collect::<Vec<_>>())
    }

    /// One-bit comparison of the 2-bit control bus against `val`.
    fn eq_sel(&mut self, val: u32) -> SigBit {
        let y = self.nl.fresh_net();
        let b = [
            if val & 1 != 0 { O } else { Z },
            if val & 2 != 0 { O } else { Z },
        ];
        let name = self.name("e");
        self.nl.add_cell(eq_const(&name, nets([1, 2]), &b, y));
        SigBit::Net(y)
    }

    fn select(&mut self) -> SigBit {
        if !self.full() && self.rng.random_bool(0.5) {
            let val = self.rng.random_range(0..4u32);
            self.eq_sel(val)
        } else {
            let bit = self.pick();
            if matches!(bit, SigBit::Const(_)) {
                // Constant selects are legal but collapse trivially; a
                // net keeps the branch alive.
                self.pool[self.rng.random_range(0..self.pool.len())]
            } else {
                bit
            }
        }
    }

    fn gate(&mut self) {
        let y = self.nl.fresh_net();
        let a = self.pick();
        let name;
        let c = match self.rng.random_range(0..5) {
            0 | 1 => {
                let kind = if self.rng.random_bool(0.5) {
                    CellKind::And
                } else {
                    CellKind::Or
                };
                let b = self.pick();
                name = self.name("g");
                cell(
                    &name,
                    kind,
                    &[
                        ("A", SigSpec::from(vec![a])),
                        ("B", SigSpec::from(vec![b])),
                        ("Y", net(y)),
                    ],
                )
            }
            2 => {
                let b = self.pick();
                name = self.name("g");
                cell(
                    &name,
                    CellKind::Xor,
                    &[
                        ("A", SigSpec::from(vec![a])),
                        ("B", SigSpec::from(vec![b])),
                        ("Y", net(y)),
                    ],
                )
            }
            3 => {
                name = self.name("g");
                cell(
                    &name,
                    CellKind::Not,
                    &[("A", SigSpec::from(vec![a])), ("Y", net(y))],
                )
            }
            _ => {
                name = self.name("g");
                cell(
                    &name,
                    CellKind::LogicNot,
                    &[("A", SigSpec::from(vec![a])), ("Y", net(y))],
                )
            }
        };
        self.nl.add_cell(c);
        self.pool.push(SigBit::Net(y));
    }

    fn tree(&mut self, w: usize, depth: usize) -> SigSpec {
        if depth == 0 || self.full() {
            return self.leaf(w);
        }
        if self.rng.random_bool(0.7) {
            let s = self.select();
            let a = self.tree(w, depth - 1);
            let b = self.tree(w, depth - 1);
            let y = nets((0..w).map(|_| self.nl.fresh_net()));
            let name = self.name("m");
            self.nl.add_cell(mux(&name, s, a, b, y.clone()));
            y
        } else {
            let ns = self.rng.random_range(2..=3usize);
            let disjoint = self.rng.random_bool(0.7);
            let mut svals: Vec<u32> = (0..4).collect();
            let s = SigSpec::from(
                (0..ns)
                    .map(|_| {
                        if disjoint {
                            let i = self.rng.random_range(0..svals.len());
                            let val = svals.remove(i);
                            self.eq_sel(val)
                        } else {
                            self.select()
                        }
                    })
                    .collect::<Vec<_>>(),
            );
            let mut bbits = Vec::new();
            for _ in 0..ns {
                bbits.extend(self.tree(w, depth - 1).0);
            }
            let a = self.tree(w, depth - 1);
            let y = nets((0..w).map(|_| self.nl.fresh_net()));
            let name = self.name("p");
            self.nl.add_cell(cell(
                &name,
                CellKind::Pmux,
                &[("A", a), ("B", SigSpec(bbits)), ("S", s), ("Y", y.clone())],
            ));
            y
        }
    }
}

/// Seeded nested case/if module: at most 16 one-bit inputs, at most 200
/// cells, mux and pmux trees over eq-driven and gate-driven selects.
pub fn random_netlist(seed: u64) -> Netlist {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nl = Netlist::new(format!("fuzz{seed}"));
    let n_in = rng.random_range(4..=16usize);
    for i in 0..n_in {
        nl.add_port(format!("i{i}"), PortDir::Input, net(i as u32 + 1));
    }
    let mut g = Gen {
        nl,
        pool: (1..=n_in as u32).map(SigBit::Net).collect(),
        cap: rng.random_range(30..=190usize),
        names: 0,
        rng,
    };
    for _ in 0..g.rng.random_range(2..=6usize) {
        g.gate();
    }
    let n_out = g.rng.random_range(1..=3usize);
    for o in 0..n_out {
        let w = g.rng.random_range(1..=3usize);
        let depth = g.rng.random_range(2..=4usize);
        let spec = g.tree(w, depth);
        g.nl.add_port(format!("y{o}"), PortDir::Output, spec);
    }
    assert!(g.nl.cell_count() <= 200);
    g.nl.validate().unwrap();
    g.nl
}

/// Seeded case function: height 1..=10, width 1..=3, terminals drawn
/// from a small net alphabet so hash consing has work to do.
pub fn random_case_function(seed: u64) -> CaseFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = rng.random_range(1..=10usize);
    let w = rng.random_range(1..=3usize);
    let term = |rng: &mut ChaCha8Rng| -> SigSpec {
        SigSpec::from(
            (0..w)
                .map(|_| match rng.random_range(0..4u32) {
                    0 => Z,
                    1 => O,
                    _ => SigBit::Net(rng.random_range(100..=104u32)),
                })
                .collect::<Vec<_>>(),
        )
    };
    let n_pat = rng.random_range(1..=2 * h);
    let patterns = (0..n_pat)
        .map(|_| CasePattern {
            bits: (0..h)
                .map(|_| match rng.random_range(0..3u32) {
                    0 => CaseBit::Zero,
                    1 => CaseBit::One,
                    _ => CaseBit::Any,
                })
                .collect(),
            terminal: term(&mut rng),
        })
        .collect();
    CaseFunction {
        control: nets(1..=h as u32),
        patterns,
        default: term(&mut rng),
    }
}

/// Seeded gate-level module plus a deduction query against it: a target
/// net and input facts. At most 6 inputs, so every query is exhaustible.
pub fn random_gate_netlist(seed: u64) -> (Netlist, u32, Vec<(u32, bool)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nl = Netlist::new(format!("gates{seed}"));
    let n_in = rng.random_range(2..=6usize);
    for i in 0..n_in {
        nl.add_port(format!("i{i}"), PortDir::Input, net(i as u32 + 1));
    }
    let mut pool: Vec<u32> = (1..=n_in as u32).collect();
    let n_gates = rng.random_range(3..=20usize);
    for gi in 0..n_gates {
        let y = nl.fresh_net();
        let pick = |rng: &mut ChaCha8Rng| net(pool[rng.random_range(0..pool.len())]);
        let a = pick(&mut rng);
        let c = match rng.random_range(0..7u32) {
            0 => cell(
                &format!("g{gi}"),
                CellKind::And,
                &[("A", a), ("B", pick(&mut rng)), ("Y", net(y))],
            ),
            1 => cell(
                &format!("g{gi}"),
                CellKind::Or,
                &[("A", a), ("B", pick(&mut rng)), ("Y", net(y))],
            ),
            2 => cell(
                &format!("g{gi}"),
                CellKind::Xor,
                &[("A", a), ("B", pick(&mut rng)), ("Y", net(y))],
            ),
            3 => cell(&format!("g{gi}"), CellKind::Not, &[("A", a), ("Y", net(y))]),
            4 => {
                let s = pick(&mut rng).0[0];
                mux(&format!("g{gi}"), s, a, pick(&mut rng), net(y))
            }
            5 => {
                let a2 = SigSpec(vec![a.0[0], pick(&mut rng).0[0]]);
                let b = [
                    if rng.random_bool(0.5) { O } else { Z },
                    if rng.random_bool(0.5) { O } else { Z },
                ];
                eq_const(&format!("g{gi}"), a2, &b, y)
            }
            _ => cell(
                &format!("g{gi}"),
                CellKind::LogicNot,
                &[("A", a), ("Y", net(y))],
            ),
        };
        nl.add_cell(c);
        pool.push(y);
    }
    let target = pool[rng.random_range(n_in..pool.len())];
    nl.add_port("y", PortDir::Output, net(target));
    nl.validate().unwrap();
    let n_facts = rng.random_range(0..=2usize);
    let facts: Vec<(u32, bool)> = (0..n_facts)
        .map(|_| {
            (
                rng.random_range(1..=n_in as u32),
                rng.random_bool(0.5),
            )
        })
        .collect();
    (nl, target, facts)
}
