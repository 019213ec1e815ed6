//! Pass scheduling. The rewrite passes run in rounds, every pass that
//! changed the module is checked against its own pre-state, and the run
//! ends early once a whole round fires nothing.

use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use crate::aig::{self, Counterexample, EquivError, EquivMethod, EquivVerdict};
use crate::muxtree::{classic_optimize, ClassicStats};
use crate::netlist::Netlist;
use crate::restructure::{restructure, RebuildStats};
use crate::subsat::{eliminate, SatConfig, SatPassStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PassKind {
    /// Context propagation through mux trees.
    Classic,
    /// Sub-graph deduction over select nets.
    Sat,
    /// Decision-diagram rebuild of case trees.
    Rebuild,
}

impl PassKind {
    pub fn name(self) -> &'static str {
        match self {
            PassKind::Classic => "classic",
            PassKind::Sat => "sat",
            PassKind::Rebuild => "rebuild",
        }
    }
}

impl std::str::FromStr for PassKind {
    type Err = String;

    fn from_str(s: &str) -> Result<PassKind, String> {
        match s {
            "classic" => Ok(PassKind::Classic),
            "sat" => Ok(PassKind::Sat),
            "rebuild" => Ok(PassKind::Rebuild),
            other => Err(format!(
                "unknown pass {other:?}; expected classic, sat, or rebuild"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PassConfig {
    pub passes: Vec<PassKind>,
    /// Upper bound on rounds; a silent round stops earlier.
    pub rounds: usize,
    pub k: usize,
    pub sim_threshold: usize,
    pub sat_input_max: usize,
    pub conflict_cap: u64,
    pub height_cap: usize,
    /// Verify every firing pass against its pre-state.
    pub check_equivalence: bool,
    /// Joint input bound for the exhaustive verification path.
    pub max_sim_inputs: usize,
    pub jobs: Option<usize>,
    pub dump_cnf: Option<PathBuf>,
}

impl Default for PassConfig {
    fn default() -> Self {
        PassConfig {
            passes: vec![PassKind::Classic, PassKind::Sat, PassKind::Rebuild],
            rounds: 3,
            k: 5,
            sim_threshold: 12,
            sat_input_max: 64,
            conflict_cap: 100_000,
            height_cap: 8,
            check_equivalence: true,
            max_sim_inputs: 20,
            jobs: None,
            dump_cnf: None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum PassOutcome {
    Classic(ClassicStats),
    Sat(SatPassStats),
    Rebuild(RebuildStats),
}

impl PassOutcome {
    pub fn fired(&self) -> bool {
        match self {
            PassOutcome::Classic(s) => s.fired(),
            PassOutcome::Sat(s) => s.fired(),
            PassOutcome::Rebuild(s) => s.fired(),
        }
    }

    fn summary(&self) -> String {
        match self {
            PassOutcome::Classic(s) => format!(
                "{} bypasses, {} constant bits, {} zeroed outputs over {} trees",
                s.bypasses, s.const_bits, s.zeroed, s.trees
            ),
            PassOutcome::Sat(s) => format!(
                "{} deductions ({} inference, {} simulation, {} sat, {} skipped), \
                 {} bypasses, {} constant bits, {} zeroed, {} branches dropped, \
                 {} bits masked",
                s.queries,
                s.inference,
                s.simulation,
                s.sat,
                s.skipped,
                s.bypasses,
                s.const_bits,
                s.zeroed,
                s.shrunk,
                s.masked
            ),
            PassOutcome::Rebuild(s) => format!(
                "{} case trees of {} candidates rebuilt",
                s.accepted, s.candidates
            ),
        }
    }
}

/// How the post-pass safety check concluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivNote {
    Verified,
    Disabled,
    /// Nothing changed, nothing to prove.
    NoChange,
    /// The module has no gate-level model to compare.
    Unmappable,
}

impl EquivNote {
    fn label(self) -> &'static str {
        match self {
            EquivNote::Verified => "verified",
            EquivNote::Disabled => "unchecked",
            EquivNote::NoChange => "no change",
            EquivNote::Unmappable => "not comparable",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PassReport {
    pub round: usize,
    pub pass: PassKind,
    pub outcome: PassOutcome,
    pub cells_after: usize,
    pub equiv: EquivNote,
}

#[derive(Debug, Clone)]
pub struct OptReport {
    pub module: String,
    pub cells_before: usize,
    pub cells_after: usize,
    /// AND counts; absent when the module cannot be mapped.
    pub area_before: Option<usize>,
    pub area_after: Option<usize>,
    pub rounds: usize,
    pub swept: usize,
    pub passes: Vec<PassReport>,
}

impl OptReport {
    /// Deterministic human-readable summary, one pass per line.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let area = |a: &Option<usize>| match a {
            Some(v) => v.to_string(),
            None => "n/a".to_string(),
        };
        let _ = writeln!(
            s,
            "module {}: cells {} -> {}, area {} -> {}, {} swept, {} rounds",
            self.module,
            self.cells_before,
            self.cells_after,
            area(&self.area_before),
            area(&self.area_after),
            self.swept,
            self.rounds
        );
        for p in &self.passes {
            let _ = writeln!(
                s,
                "  round {} {}: {}; {} cells; {}",
                p.round,
                p.pass.name(),
                p.outcome.summary(),
                p.cells_after,
                p.equiv.label()
            );
        }
        s
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    /// A pass produced a module that is not equivalent to its input, or
    /// equivalence could not be certified. The netlist is left as the
    /// pass made it so the failure can be inspected.
    #[error("{pass} pass failed verification: {detail}")]
    Verification { pass: &'static str, detail: String },
    #[error("thread pool: {0}")]
    Threads(String),
}

pub fn format_cex(cex: &Counterexample) -> String {
    let assign = cex
        .assignment
        .iter()
        .map(|(k, v)| format!("{k}={}", *v as u8))
        .collect::<Vec<_>>()
        .join(" ");
    format!(
        "{} reads {} in the golden design and {} in the revised under {assign}",
        cex.output, cex.golden as u8, cex.revised as u8
    )
}

fn verify(
    pass: PassKind,
    golden: &Netlist,
    revised: &Netlist,
    cfg: &PassConfig,
) -> Result<EquivNote, PipelineError> {
    match aig::check_equiv(golden, revised, EquivMethod::Auto, cfg.max_sim_inputs) {
        Ok(EquivVerdict::Equivalent) => Ok(EquivNote::Verified),
        Ok(EquivVerdict::Inequivalent(cex)) => Err(PipelineError::Verification {
            pass: pass.name(),
            detail: format_cex(&cex),
        }),
        Ok(EquivVerdict::Undecided { output }) => Err(PipelineError::Verification {
            pass: pass.name(),
            detail: format!("equivalence of {output} undecided within the conflict budget"),
        }),
        Err(EquivError::Map(_)) => Ok(EquivNote::Unmappable),
        Err(e) => Err(PipelineError::Verification {
            pass: pass.name(),
            detail: e.to_string(),
        }),
    }
}

fn run_rounds(n: &mut Netlist, cfg: &PassConfig) -> Result<OptReport, PipelineError> {
    let mut report = OptReport {
        module: n.name.clone(),
        cells_before: n.cell_count(),
        cells_after: 0,
        area_before: aig::area(n).ok(),
        area_after: None,
        rounds: 0,
        swept: 0,
        passes: Vec::new(),
    };
    let sat_cfg = SatConfig {
        k: cfg.k,
        sim_threshold: cfg.sim_threshold,
        sat_input_max: cfg.sat_input_max,
        conflict_cap: cfg.conflict_cap,
        dump_cnf: cfg.dump_cnf.clone(),
    };
    for round in 1..=cfg.rounds {
        report.rounds = round;
        let mut fired_any = false;
        for &pass in &cfg.passes {
            let golden = cfg.check_equivalence.then(|| n.clone());
            let outcome = match pass {
                PassKind::Classic => PassOutcome::Classic(classic_optimize(n)),
                PassKind::Sat => PassOutcome::Sat(eliminate(n, &sat_cfg)),
                PassKind::Rebuild => PassOutcome::Rebuild(restructure(n, cfg.height_cap)),
            };
            let fired = outcome.fired();
            if fired {
                // Keep later passes off logic a rewrite just disconnected.
                report.swept += n.dead_cell_sweep();
            }
            let equiv = match &golden {
                None => EquivNote::Disabled,
                Some(_) if !fired => EquivNote::NoChange,
                Some(gold) => verify(pass, gold, n, cfg)?,
            };
            fired_any |= fired;
            report.passes.push(PassReport {
                round,
                pass,
                outcome,
                cells_after: n.cell_count(),
                equiv,
            });
        }
        if !fired_any {
            break;
        }
    }
    report.cells_after = n.cell_count();
    report.area_after = aig::area(n).ok();
    Ok(report)
}

/// Optimize one module in place. `jobs` pins the worker count; the
/// result is identical either way, parallelism only reorders analysis.
pub fn optimize(n: &mut Netlist, cfg: &PassConfig) -> Result<OptReport, PipelineError> {
    match cfg.jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| PipelineError::Threads(e.to_string()))?;
            pool.install(|| run_rounds(n, cfg))
        }
        None => run_rounds(n, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{Cell, CellKind, Const, PortDir, SigBit, SigSpec};
    use std::collections::BTreeMap;

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

    fn net(n: u32) -> SigSpec {
        SigSpec::from_net(n)
    }

    /// Nested mux with the same select on both levels; the inner arm is
    /// unreachable, so one round of the classic pass settles it.
    fn redundant_pair() -> Netlist {
        let mut nl = Netlist::new("pair");
        nl.add_port("s", PortDir::Input, net(1));
        nl.add_port("a", PortDir::Input, net(2));
        nl.add_port("b", PortDir::Input, net(3));
        nl.add_port("y", PortDir::Output, net(5));
        nl.add_cell(cell(
            "inner",
            CellKind::Mux,
            &[("A", net(2)), ("B", net(3)), ("S", net(1)), ("Y", net(4))],
        ));
        nl.add_cell(cell(
            "outer",
            CellKind::Mux,
            &[("A", net(2)), ("B", net(4)), ("S", net(1)), ("Y", net(5))],
        ));
        nl.validate().unwrap();
        nl
    }

    #[test]
    fn rounds_stop_when_nothing_fires() {
        let mut nl = redundant_pair();
        let report = optimize(&mut nl, &PassConfig::default()).unwrap();
        assert!(report.rounds < 3, "a silent round must stop the loop");
        assert!(report.cells_after < report.cells_before);
        assert!(report.area_after.unwrap() < report.area_before.unwrap());
        assert!(report
            .passes
            .iter()
            .all(|p| matches!(p.equiv, EquivNote::Verified | EquivNote::NoChange)));
    }

    #[test]
    fn disabled_check_is_reported_as_unchecked() {
        let mut nl = redundant_pair();
        let cfg = PassConfig {
            check_equivalence: false,
            ..PassConfig::default()
        };
        let report = optimize(&mut nl, &cfg).unwrap();
        assert!(report
            .passes
            .iter()
            .all(|p| p.equiv == EquivNote::Disabled));
    }

    #[test]
    fn pinned_job_count_matches_default_run() {
        let mut a = redundant_pair();
        let mut b = redundant_pair();
        optimize(&mut a, &PassConfig::default()).unwrap();
        let cfg = PassConfig {
            jobs: Some(1),
            ..PassConfig::default()
        };
        optimize(&mut b, &cfg).unwrap();
        let dump = |n: &Netlist| {
            crate::json::write_design(&crate::json::design_from_netlist(n.clone()))
        };
        assert_eq!(dump(&a), dump(&b));
    }

    #[test]
    fn constant_select_is_settled_by_one_classic_round() {
        let mut nl = Netlist::new("const_sel");
        nl.add_port("a", PortDir::Input, net(2));
        nl.add_port("b", PortDir::Input, net(3));
        nl.add_port("y", PortDir::Output, net(4));
        nl.add_cell(cell(
            "m",
            CellKind::Mux,
            &[
                ("A", net(2)),
                ("B", net(3)),
                ("S", SigSpec(vec![SigBit::Const(Const::One)])),
                ("Y", net(4)),
            ],
        ));
        nl.validate().unwrap();
        let cfg = PassConfig {
            passes: vec![PassKind::Classic],
            ..PassConfig::default()
        };
        let report = optimize(&mut nl, &cfg).unwrap();
        assert_eq!(nl.cell_count(), 0);
        assert!(report.render().contains("classic"));
    }
}
