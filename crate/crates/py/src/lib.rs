//! Python bindings: parse a Yosys JSON design, optimize its mux trees in
//! place, measure area, export AIGER, and compare two designs.
//!
//! Build with `cargo build -p muxopt-py --release`; the cdylib in
//! `target/release` loads as the module `muxopt_py`.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use muxopt::aig::{self, EquivMethod, EquivVerdict};
use muxopt::json;
use muxopt::pipeline::{self, format_cex, PassConfig, PassKind};

/// One module of a Yosys JSON design plus everything needed to write the
/// design back out with the other modules untouched.
#[pyclass(module = "muxopt_py")]
struct Design {
    inner: json::Design,
}

#[pymethods]
impl Design {
    /// Parse design text. `module` selects one by name; without it the
    /// design must hold a single module or mark one as top.
    #[staticmethod]
    #[pyo3(signature = (text, module=None))]
    fn parse(text: &str, module: Option<&str>) -> PyResult<Design> {
        let inner = json::parse_design(text, module)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Design { inner })
    }

    /// Read and parse a design file.
    #[staticmethod]
    #[pyo3(signature = (path, module=None))]
    fn load(path: PathBuf, module: Option<&str>) -> PyResult<Design> {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| PyIOError::new_err(format!("cannot read {}: {e}", path.display())))?;
        Design::parse(&text, module)
    }

    /// Serialize the whole design back to Yosys JSON. Output is
    /// deterministic: equal designs serialize to identical bytes.
    fn write(&self) -> String {
        json::write_design(&self.inner)
    }

    /// Write the design to a file.
    fn save(&self, path: PathBuf) -> PyResult<()> {
        std::fs::write(&path, json::write_design(&self.inner))
            .map_err(|e| PyIOError::new_err(format!("cannot write {}: {e}", path.display())))
    }

    /// Name of the selected module.
    #[getter]
    fn name(&self) -> &str {
        &self.inner.netlist.name
    }

    /// Cell count of the selected module.
    #[getter]
    fn cell_count(&self) -> usize {
        self.inner.netlist.cell_count()
    }

    /// AND-gate count of the module mapped to an and-inverter graph.
    /// Raises ValueError when the module holds unsupported cells.
    fn area(&self) -> PyResult<usize> {
        aig::area(&self.inner.netlist).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// The module as an ASCII AIGER dump.
    fn to_aiger(&self) -> PyResult<String> {
        aig::map_to_aig(&self.inner.netlist)
            .map(|g| g.write_aiger())
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Run the optimization pipeline on the module in place and return a
    /// report. Defaults mirror the CLI; `passes` is a list drawn from
    /// "classic", "sat", "rebuild", run in order each round. With `check`
    /// left on, every firing pass is verified against its pre-state and a
    /// failure raises RuntimeError.
    #[pyo3(signature = (
        passes=None, rounds=None, k=None, sim_threshold=None, sat_input_max=None,
        conflicts=None, height_cap=None, check=true, max_sim_inputs=None, jobs=None
    ))]
    #[allow(clippy::too_many_arguments)]
    fn optimize(
        &mut self,
        py: Python<'_>,
        passes: Option<Vec<String>>,
        rounds: Option<usize>,
        k: Option<usize>,
        sim_threshold: Option<usize>,
        sat_input_max: Option<usize>,
        conflicts: Option<u64>,
        height_cap: Option<usize>,
        check: bool,
        max_sim_inputs: Option<usize>,
        jobs: Option<usize>,
    ) -> PyResult<Report> {
        let mut cfg = PassConfig::default();
        if let Some(names) = passes {
            cfg.passes = names
                .iter()
                .map(|s| s.parse::<PassKind>())
                .collect::<Result<_, _>>()
                .map_err(PyValueError::new_err)?;
        }
        if let Some(v) = rounds {
            cfg.rounds = v;
        }
        if let Some(v) = k {
            cfg.k = v;
        }
        if let Some(v) = sim_threshold {
            cfg.sim_threshold = v;
        }
        if let Some(v) = sat_input_max {
            cfg.sat_input_max = v;
        }
        if let Some(v) = conflicts {
            cfg.conflict_cap = v;
        }
        if let Some(v) = height_cap {
            cfg.height_cap = v;
        }
        cfg.check_equivalence = check;
        if let Some(v) = max_sim_inputs {
            cfg.max_sim_inputs = v;
        }
        cfg.jobs = jobs;

        let netlist = &mut self.inner.netlist;
        let report = py
            .detach(|| pipeline::optimize(netlist, &cfg))
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(Report { inner: report })
    }

    fn __repr__(&self) -> String {
        format!(
            "<Design {:?}, {} cells>",
            self.inner.netlist.name,
            self.inner.netlist.cell_count()
        )
    }
}

/// What one optimization run did to a module.
#[pyclass(module = "muxopt_py")]
struct Report {
    inner: pipeline::OptReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn module(&self) -> &str {
        &self.inner.module
    }

    #[getter]
    fn cells_before(&self) -> usize {
        self.inner.cells_before
    }

    #[getter]
    fn cells_after(&self) -> usize {
        self.inner.cells_after
    }

    /// AND count before the run; None when the module cannot be mapped.
    #[getter]
    fn area_before(&self) -> Option<usize> {
        self.inner.area_before
    }

    /// AND count after the run; None when the module cannot be mapped.
    #[getter]
    fn area_after(&self) -> Option<usize> {
        self.inner.area_after
    }

    #[getter]
    fn rounds(&self) -> usize {
        self.inner.rounds
    }

    /// Disconnected cells removed after the passes.
    #[getter]
    fn swept(&self) -> usize {
        self.inner.swept
    }

    /// The multi-line human-readable report the CLI prints.
    fn render(&self) -> String {
        self.inner.render()
    }

    fn __str__(&self) -> String {
        self.inner.render()
    }

    fn __repr__(&self) -> String {
        format!(
            "<Report {:?}: cells {} -> {}, {} rounds>",
            self.inner.module, self.inner.cells_before, self.inner.cells_after, self.inner.rounds
        )
    }
}

/// Outcome of an equivalence check. Truthy exactly when the designs are
/// proven equivalent.
#[pyclass(module = "muxopt_py")]
struct Verdict {
    kind: &'static str,
    detail: Option<String>,
}

#[pymethods]
impl Verdict {
    /// "equivalent", "inequivalent", or "undecided".
    #[getter]
    fn kind(&self) -> &'static str {
        self.kind
    }

    /// True only for a proven-equivalent pair.
    #[getter]
    fn equivalent(&self) -> bool {
        self.kind == "equivalent"
    }

    /// Counterexample or give-up description; None when equivalent.
    #[getter]
    fn detail(&self) -> Option<&str> {
        self.detail.as_deref()
    }

    fn __bool__(&self) -> bool {
        self.equivalent()
    }

    fn __repr__(&self) -> String {
        match &self.detail {
            None => format!("<Verdict {}>", self.kind),
            Some(d) => format!("<Verdict {}: {d}>", self.kind),
        }
    }
}

/// Check two designs for combinational equivalence over their shared
/// observables. `method` is "auto", "sim", or "sat"; `max_inputs` bounds
/// the joint input count the exhaustive path accepts.
#[pyfunction]
#[pyo3(signature = (golden, revised, method="auto", max_inputs=20))]
fn check_equiv(
    golden: &Design,
    revised: &Design,
    method: &str,
    max_inputs: usize,
) -> PyResult<Verdict> {
    let method = match method {
        "auto" => EquivMethod::Auto,
        "sim" => EquivMethod::Sim,
        "sat" => EquivMethod::Sat,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown method {other:?}; expected auto, sim, or sat"
            )))
        }
    };
    let verdict = aig::check_equiv(
        &golden.inner.netlist,
        &revised.inner.netlist,
        method,
        max_inputs,
    )
    .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(match verdict {
        EquivVerdict::Equivalent => Verdict {
            kind: "equivalent",
            detail: None,
        },
        EquivVerdict::Inequivalent(cex) => Verdict {
            kind: "inequivalent",
            detail: Some(format_cex(&cex)),
        },
        EquivVerdict::Undecided { output } => Verdict {
            kind: "undecided",
            detail: Some(format!("equivalence of {output} undecided")),
        },
    })
}

#[pymodule]
fn muxopt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Design>()?;
    m.add_class::<Report>()?;
    m.add_class::<Verdict>()?;
    m.add_function(wrap_pyfunction!(check_equiv, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
