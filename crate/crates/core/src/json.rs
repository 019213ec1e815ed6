//! Yosys JSON netlist reader and writer.
//!
//! The input schema is the `write_json` output of Yosys: a top-level
//! `modules` map whose entries carry `ports`, `cells` and `netnames`.
//! Signal bits are integers (net ids) or the strings `"0"`, `"1"`, `"x"`.
//! Unknown cell types are preserved verbatim and excluded from analysis.
//!
//! Writing is deterministic: objects are emitted in sorted key order, so
//! equal netlists serialize to identical bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::netlist::{
    Cell, CellKind, Const, NetName, Netlist, NetlistError, PortDir, SigBit, SigSpec,
};

#[derive(Debug, Deserialize)]
struct JsonDesign {
    #[serde(default)]
    creator: Option<String>,
    modules: BTreeMap<String, JsonModule>,
}

#[derive(Debug, Deserialize)]
struct JsonModule {
    #[serde(default)]
    attributes: BTreeMap<String, Value>,
    #[serde(default)]
    ports: BTreeMap<String, JsonPort>,
    #[serde(default)]
    cells: BTreeMap<String, JsonCell>,
    #[serde(default)]
    netnames: BTreeMap<String, JsonNetName>,
}

#[derive(Debug, Deserialize)]
struct JsonPort {
    direction: String,
    bits: Vec<JsonBit>,
}

#[derive(Debug, Deserialize)]
struct JsonCell {
    #[serde(rename = "type")]
    ty: String,
    #[serde(default)]
    parameters: BTreeMap<String, Value>,
    #[serde(default)]
    attributes: BTreeMap<String, Value>,
    #[serde(default)]
    port_directions: BTreeMap<String, String>,
    #[serde(default)]
    connections: BTreeMap<String, Vec<JsonBit>>,
}

#[derive(Debug, Deserialize)]
struct JsonNetName {
    #[serde(default)]
    attributes: BTreeMap<String, Value>,
    bits: Vec<JsonBit>,
}

/// One bit in the JSON encoding: a net id or a constant string.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
enum JsonBit {
    Net(u32),
    Const(String),
}

fn bit_from_json(bit: &JsonBit) -> Result<SigBit, NetlistError> {
    match bit {
        JsonBit::Net(n) => Ok(SigBit::Net(*n)),
        JsonBit::Const(s) => match s.as_str() {
            "0" => Ok(SigBit::Const(Const::Zero)),
            "1" => Ok(SigBit::Const(Const::One)),
            // Yosys also emits "z"; treat it as unknown.
            "x" | "z" => Ok(SigBit::Const(Const::X)),
            other => Err(NetlistError::Schema(format!(
                "unrecognized constant bit {other:?}"
            ))),
        },
    }
}

fn bit_to_json(bit: &SigBit) -> JsonBit {
    match bit {
        SigBit::Net(n) => JsonBit::Net(*n),
        SigBit::Const(Const::Zero) => JsonBit::Const("0".to_string()),
        SigBit::Const(Const::One) => JsonBit::Const("1".to_string()),
        SigBit::Const(Const::X) => JsonBit::Const("x".to_string()),
    }
}

fn sig_from_json(bits: &[JsonBit]) -> Result<SigSpec, NetlistError> {
    bits.iter()
        .map(bit_from_json)
        .collect::<Result<Vec<_>, _>>()
        .map(SigSpec)
}

fn dir_from_str(s: &str) -> Result<PortDir, NetlistError> {
    match s {
        "input" => Ok(PortDir::Input),
        "output" => Ok(PortDir::Output),
        "inout" => Ok(PortDir::InOut),
        other => Err(NetlistError::Schema(format!(
            "unrecognized port direction {other:?}"
        ))),
    }
}

fn dir_to_str(d: PortDir) -> &'static str {
    match d {
        PortDir::Input => "input",
        PortDir::Output => "output",
        PortDir::InOut => "inout",
    }
}

/// Parsed design: the selected module plus everything needed to write the
/// file back out unchanged apart from that module.
pub struct Design {
    pub netlist: Netlist,
    creator: Option<String>,
    /// Raw JSON of the modules we do not touch, keyed by name.
    other_modules: BTreeMap<String, Value>,
    /// Cell attributes by cell name, kept for round trips.
    cell_attributes: BTreeMap<String, BTreeMap<String, Value>>,
}

/// Parse a Yosys JSON design. With `module_name` unset the design must
/// contain exactly one module.
pub fn parse_design(text: &str, module_name: Option<&str>) -> Result<Design, NetlistError> {
    let raw: Value = serde_json::from_str(text)?;
    let design: JsonDesign = serde_json::from_str(text)?;

    let name = match module_name {
        Some(n) => {
            if !design.modules.contains_key(n) {
                return Err(NetlistError::NoSuchModule(n.to_string()));
            }
            n.to_string()
        }
        None => {
            // Prefer a module with the Yosys "top" attribute when several exist.
            let tops: Vec<&String> = design
                .modules
                .iter()
                .filter(|(_, m)| m.attributes.get("top").map(param_truthy).unwrap_or(false))
                .map(|(n, _)| n)
                .collect();
            match (design.modules.len(), tops.as_slice()) {
                (0, _) => return Err(NetlistError::Schema("design has no modules".into())),
                (1, _) => design.modules.keys().next().unwrap().clone(),
                (_, [one]) => (*one).clone(),
                (n, _) => return Err(NetlistError::AmbiguousModule(n)),
            }
        }
    };

    let module = design.modules.get(&name).unwrap();
    let mut netlist = Netlist::new(name.clone());
    netlist.attributes = module.attributes.clone();

    for (pname, port) in &module.ports {
        netlist.add_port(pname.clone(), dir_from_str(&port.direction)?, sig_from_json(&port.bits)?);
    }

    let mut cell_attributes = BTreeMap::new();
    for (cname, cell) in &module.cells {
        let mut connections = BTreeMap::new();
        for (pname, bits) in &cell.connections {
            connections.insert(pname.clone(), sig_from_json(bits)?);
        }
        let mut port_directions = BTreeMap::new();
        for (pname, d) in &cell.port_directions {
            port_directions.insert(pname.clone(), dir_from_str(d)?);
        }
        if !cell.attributes.is_empty() {
            cell_attributes.insert(cname.clone(), cell.attributes.clone());
        }
        netlist.add_cell(Cell {
            name: cname.clone(),
            kind: CellKind::from_type_name(&cell.ty),
            connections,
            parameters: cell.parameters.clone(),
            port_directions,
        });
    }

    for (nname, nn) in &module.netnames {
        netlist.netnames.push(NetName {
            name: nname.clone(),
            bits: sig_from_json(&nn.bits)?,
            attributes: nn.attributes.clone(),
        });
    }

    netlist.validate()?;

    let mut other_modules = BTreeMap::new();
    if let Value::Object(top) = &raw {
        if let Some(Value::Object(mods)) = top.get("modules") {
            for (mname, m) in mods {
                if *mname != name {
                    other_modules.insert(mname.clone(), m.clone());
                }
            }
        }
    }

    Ok(Design {
        netlist,
        creator: design.creator,
        other_modules,
        cell_attributes,
    })
}

fn param_truthy(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.as_i64().map(|i| i != 0).unwrap_or(true),
        Value::String(s) => s.contains('1'),
        Value::Bool(b) => *b,
        _ => false,
    }
}

/// Parameters Yosys always writes for the kinds we synthesize. Cells read
/// from a file keep their original parameter set instead.
fn default_parameters(cell: &Cell) -> BTreeMap<String, Value> {
    let mut p = BTreeMap::new();
    let width = |port: &str| cell.port(port).map(|s| s.width()).unwrap_or(0) as i64;
    let mut set = |k: &str, v: i64| {
        p.insert(k.to_string(), Value::from(v));
    };
    match cell.kind {
        CellKind::Mux => {
            set("WIDTH", width("Y"));
        }
        CellKind::Pmux => {
            set("WIDTH", width("Y"));
            set("S_WIDTH", width("S"));
        }
        CellKind::Eq | CellKind::LogicAnd | CellKind::LogicOr => {
            set("A_SIGNED", 0);
            set("A_WIDTH", width("A"));
            set("B_SIGNED", 0);
            set("B_WIDTH", width("B"));
            set("Y_WIDTH", 1);
        }
        CellKind::And | CellKind::Or | CellKind::Xor => {
            set("A_SIGNED", 0);
            set("A_WIDTH", width("A"));
            set("B_SIGNED", 0);
            set("B_WIDTH", width("B"));
            set("Y_WIDTH", width("Y"));
        }
        CellKind::Not => {
            set("A_SIGNED", 0);
            set("A_WIDTH", width("A"));
            set("Y_WIDTH", width("Y"));
        }
        CellKind::LogicNot
        | CellKind::ReduceOr
        | CellKind::ReduceAnd
        | CellKind::ReduceBool => {
            set("A_SIGNED", 0);
            set("A_WIDTH", width("A"));
            set("Y_WIDTH", 1);
        }
        CellKind::Dff => {
            set("WIDTH", width("Q"));
            set("CLK_POLARITY", 1);
        }
        CellKind::Opaque(_) => {}
    }
    p
}

fn known_port_directions(cell: &Cell) -> BTreeMap<String, String> {
    let mut dirs = BTreeMap::new();
    for (p, _) in cell.outputs() {
        dirs.insert(p.to_string(), "output".to_string());
    }
    for (p, _) in &cell.connections {
        dirs.entry(p.clone()).or_insert_with(|| "input".to_string());
    }
    dirs
}

/// Serialize a design back to Yosys JSON. Cells inherit their parsed
/// parameters and attributes; synthesized cells get defaults.
pub fn write_design(design: &Design) -> String {
    let nl = &design.netlist;
    let mut module = serde_json::Map::new();
    module.insert(
        "attributes".to_string(),
        Value::Object(nl.attributes.clone().into_iter().collect()),
    );

    let mut ports = serde_json::Map::new();
    for port in &nl.ports {
        let mut obj = serde_json::Map::new();
        obj.insert("direction".into(), Value::from(dir_to_str(port.dir)));
        obj.insert(
            "bits".into(),
            serde_json::to_value(port.bits.bits().iter().map(bit_to_json).collect::<Vec<_>>())
                .unwrap(),
        );
        ports.insert(port.name.clone(), Value::Object(obj));
    }
    module.insert("ports".into(), Value::Object(ports));

    let mut cells = serde_json::Map::new();
    for (_, cell) in nl.cells() {
        let mut obj = serde_json::Map::new();
        obj.insert("hide_name".into(), Value::from(0));
        obj.insert("type".into(), Value::from(cell.kind.type_name()));
        let params = if cell.parameters.is_empty() && !cell.kind.is_opaque() {
            default_parameters(cell)
        } else {
            cell.parameters.clone()
        };
        obj.insert(
            "parameters".into(),
            Value::Object(params.into_iter().collect()),
        );
        let attrs = design
            .cell_attributes
            .get(&cell.name)
            .cloned()
            .unwrap_or_default();
        obj.insert(
            "attributes".into(),
            Value::Object(attrs.into_iter().collect()),
        );
        let dirs: BTreeMap<String, String> = if cell.port_directions.is_empty() {
            known_port_directions(cell)
        } else {
            cell.port_directions
                .iter()
                .map(|(p, d)| (p.clone(), dir_to_str(*d).to_string()))
                .collect()
        };
        obj.insert("port_directions".into(), serde_json::to_value(dirs).unwrap());
        let conns: BTreeMap<String, Vec<JsonBit>> = cell
            .connections
            .iter()
            .map(|(p, s)| (p.clone(), s.bits().iter().map(bit_to_json).collect()))
            .collect();
        obj.insert("connections".into(), serde_json::to_value(conns).unwrap());
        cells.insert(cell.name.clone(), Value::Object(obj));
    }
    module.insert("cells".into(), Value::Object(cells));

    let mut netnames = serde_json::Map::new();
    for nn in &nl.netnames {
        let mut obj = serde_json::Map::new();
        obj.insert(
            "attributes".into(),
            Value::Object(nn.attributes.clone().into_iter().collect()),
        );
        obj.insert(
            "bits".into(),
            serde_json::to_value(nn.bits.bits().iter().map(bit_to_json).collect::<Vec<_>>())
                .unwrap(),
        );
        netnames.insert(nn.name.clone(), Value::Object(obj));
    }
    module.insert("netnames".into(), Value::Object(netnames));

    let mut modules = serde_json::Map::new();
    for (name, m) in &design.other_modules {
        modules.insert(name.clone(), m.clone());
    }
    modules.insert(nl.name.clone(), Value::Object(module));

    let mut top = serde_json::Map::new();
    top.insert(
        "creator".into(),
        Value::from(design.creator.clone().unwrap_or_else(|| "muxopt".to_string())),
    );
    top.insert("modules".into(), Value::Object(modules));

    let mut out = serde_json::to_string_pretty(&Value::Object(top)).unwrap();
    out.push('\n');
    out
}

/// Wrap a bare netlist in a single-module design for serialization.
pub fn design_from_netlist(netlist: Netlist) -> Design {
    Design {
        netlist,
        creator: None,
        other_modules: BTreeMap::new(),
        cell_attributes: BTreeMap::new(),
    }
}
