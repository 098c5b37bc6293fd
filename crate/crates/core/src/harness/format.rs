//! JSON instance documents.
//!
//! Every document carries `version` and `kind`. Diagrams list each index's
//! elements and generating relations (closed on reading) and each step as an
//! element-name map; maps add per-index component maps. Modules store step
//! matrices row-major; barcodes store `[birth, death]` pairs with `"inf"`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::barcode::{Barcode, Interval};
use crate::ext::ExtNat;
use crate::field::{FieldMatrix, Prime};
use crate::module::PersistenceModule;
use crate::persistence::{PersistenceError, PersistencePoset, PersistencePosetMap};
use crate::poset::{FinitePoset, MonotoneMap};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{context}: {message}")]
    Validation { context: String, message: String },
    #[error("unsupported version {0}")]
    Version(u32),
    #[error("expected a {expected} document, found {found}")]
    WrongKind { expected: &'static str, found: &'static str },
}

fn invalid(context: impl Into<String>, message: impl ToString) -> FormatError {
    FormatError::Validation { context: context.into(), message: message.to_string() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetDoc {
    pub elements: Vec<String>,
    #[serde(default)]
    pub relations: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramBody {
    #[serde(rename = "T")]
    pub t: usize,
    pub posets: Vec<PosetDoc>,
    /// Step `i` as a map from names in `P_i` to names in `P_{i+1}`; when
    /// omitted, steps are inclusions by name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure_maps: Option<Vec<BTreeMap<String, String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramDoc {
    pub version: u32,
    #[serde(flatten)]
    pub diagram: DiagramBody,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDoc {
    pub version: u32,
    pub source: DiagramBody,
    pub target: DiagramBody,
    pub components: Vec<BTreeMap<String, String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDoc {
    pub version: u32,
    pub prime: u64,
    pub dims: Vec<usize>,
    /// Step `i` as `dims[i+1]` rows of `dims[i]` entries.
    pub steps: Vec<Vec<Vec<u64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarcodeDoc {
    pub version: u32,
    #[serde(rename = "T")]
    pub t: usize,
    pub intervals: Vec<(usize, ExtNat)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Document {
    PosetDiagram(DiagramDoc),
    Map(MapDoc),
    Module(ModuleDoc),
    Barcode(BarcodeDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::PosetDiagram(_) => "poset-diagram",
            Document::Map(_) => "map",
            Document::Module(_) => "module",
            Document::Barcode(_) => "barcode",
        }
    }

    fn version(&self) -> u32 {
        match self {
            Document::PosetDiagram(d) => d.version,
            Document::Map(d) => d.version,
            Document::Module(d) => d.version,
            Document::Barcode(d) => d.version,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }
}

/// A validated document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Diagram(PersistencePoset),
    Map(PersistencePosetMap),
    Module(PersistenceModule),
    Barcode(Barcode),
}

pub fn parse_document(text: &str) -> Result<Document, FormatError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| FormatError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.version() != FORMAT_VERSION {
        return Err(FormatError::Version(doc.version()));
    }
    Ok(doc)
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    validate(&parse_document(text)?)
}

pub fn validate(doc: &Document) -> Result<Instance, FormatError> {
    match doc {
        Document::PosetDiagram(d) => Ok(Instance::Diagram(diagram_from(&d.diagram, "")?)),
        Document::Map(m) => Ok(Instance::Map(map_from(m)?)),
        Document::Module(m) => Ok(Instance::Module(module_from(m)?)),
        Document::Barcode(b) => Ok(Instance::Barcode(barcode_from(b)?)),
    }
}

fn diagram_from(body: &DiagramBody, prefix: &str) -> Result<PersistencePoset, FormatError> {
    if body.posets.len() != body.t + 1 {
        return Err(invalid(
            format!("{prefix}posets"),
            format!("T = {} needs {} posets, found {}", body.t, body.t + 1, body.posets.len()),
        ));
    }
    let posets = body
        .posets
        .iter()
        .enumerate()
        .map(|(i, p)| {
            FinitePoset::new(
                p.elements.iter().cloned(),
                p.relations.iter().map(|(a, b)| (a.clone(), b.clone())),
            )
            .map_err(|e| invalid(format!("{prefix}posets[{i}]"), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let steps = match &body.structure_maps {
        None => (0..body.t)
            .map(|i| {
                posets[i]
                    .elements()
                    .iter()
                    .map(|e| posets[i + 1].id(e).map_err(|err| invalid(format!("{prefix}structure_maps[{i}]"), err)))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?,
        Some(maps) => {
            if maps.len() != body.t {
                return Err(invalid(
                    format!("{prefix}structure_maps"),
                    format!("T = {} needs {} maps, found {}", body.t, body.t, maps.len()),
                ));
            }
            maps.iter()
                .enumerate()
                .map(|(i, m)| assignment(&posets[i], &posets[i + 1], m, &format!("{prefix}structure_maps[{i}]")))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    PersistencePoset::new(posets, steps).map_err(|e| match e {
        PersistenceError::NonMonotoneStep { step, source } => invalid(format!("{prefix}structure_maps[{step}]"), source),
        other => invalid(format!("{prefix}diagram"), other),
    })
}

fn assignment(
    dom: &FinitePoset,
    cod: &FinitePoset,
    map: &BTreeMap<String, String>,
    context: &str,
) -> Result<Vec<usize>, FormatError> {
    if let Some(extra) = map.keys().find(|k| dom.index_of(k).is_none()) {
        return Err(invalid(context, format!("unknown element `{extra}`")));
    }
    dom.elements()
        .iter()
        .map(|e| {
            let image = map.get(e).ok_or_else(|| invalid(context, format!("element `{e}` has no image")))?;
            cod.id(image).map_err(|err| invalid(format!("{context} element `{e}`"), err))
        })
        .collect()
}

fn map_from(doc: &MapDoc) -> Result<PersistencePosetMap, FormatError> {
    let source = diagram_from(&doc.source, "source.")?;
    let target = diagram_from(&doc.target, "target.")?;
    let t = source.stabilization().max(target.stabilization());
    if doc.components.len() != t + 1 {
        return Err(invalid(
            "components",
            format!("expected {} components, found {}", t + 1, doc.components.len()),
        ));
    }
    let components = doc
        .components
        .iter()
        .enumerate()
        .map(|(i, m)| assignment(source.poset(i), target.poset(i), m, &format!("components[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    PersistencePosetMap::new(source, target, components).map_err(|e| match e {
        PersistenceError::NonCommutingSquare { index, element } => invalid(
            format!("square at index {index}"),
            format!("does not commute at element `{element}`"),
        ),
        PersistenceError::InvalidComponent { index, source } => invalid(format!("components[{index}]"), source),
        other => invalid("map", other),
    })
}

fn module_from(doc: &ModuleDoc) -> Result<PersistenceModule, FormatError> {
    let p = Prime::new(doc.prime).map_err(|e| invalid("prime", e))?;
    if doc.dims.is_empty() {
        return Err(invalid("dims", "a module needs at least one space"));
    }
    if doc.steps.len() + 1 != doc.dims.len() {
        return Err(invalid(
            "steps",
            format!("{} spaces need {} steps, found {}", doc.dims.len(), doc.dims.len() - 1, doc.steps.len()),
        ));
    }
    let steps = doc
        .steps
        .iter()
        .enumerate()
        .map(|(i, rows)| {
            if rows.len() != doc.dims[i + 1] {
                return Err(invalid(
                    format!("steps[{i}]"),
                    format!("expected {} rows, found {}", doc.dims[i + 1], rows.len()),
                ));
            }
            FieldMatrix::from_rows(p, doc.dims[i], rows).map_err(|e| invalid(format!("steps[{i}]"), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    PersistenceModule::new(p, doc.dims.clone(), steps).map_err(|e| invalid("module", e))
}

fn barcode_from(doc: &BarcodeDoc) -> Result<Barcode, FormatError> {
    let intervals = doc
        .intervals
        .iter()
        .enumerate()
        .map(|(k, &(b, d))| Interval::new(b, d).map_err(|e| invalid(format!("intervals[{k}]"), e)))
        .collect::<Result<Vec<_>, _>>()?;
    Barcode::new(doc.t, intervals).map_err(|e| invalid("intervals", e))
}

fn poset_doc(p: &FinitePoset) -> PosetDoc {
    PosetDoc {
        elements: p.elements().to_vec(),
        relations: p
            .covers()
            .into_iter()
            .map(|(a, b)| (p.name(a).to_string(), p.name(b).to_string()))
            .collect(),
    }
}

fn name_map(m: &MonotoneMap) -> BTreeMap<String, String> {
    (0..m.dom().len())
        .map(|x| (m.dom().name(x).to_string(), m.cod().name(m.apply(x)).to_string()))
        .collect()
}

fn diagram_body(x: &PersistencePoset) -> DiagramBody {
    DiagramBody {
        t: x.stabilization(),
        posets: x.posets().iter().map(|p| poset_doc(p)).collect(),
        structure_maps: Some(x.steps().iter().map(name_map).collect()),
    }
}

pub fn emit_diagram(x: &PersistencePoset) -> Document {
    Document::PosetDiagram(DiagramDoc { version: FORMAT_VERSION, diagram: diagram_body(x) })
}

pub fn emit_map(f: &PersistencePosetMap) -> Document {
    Document::Map(MapDoc {
        version: FORMAT_VERSION,
        source: diagram_body(f.source()),
        target: diagram_body(f.target()),
        components: f.components().iter().map(name_map).collect(),
    })
}

pub fn emit_module(m: &PersistenceModule) -> Document {
    Document::Module(ModuleDoc {
        version: FORMAT_VERSION,
        prime: m.prime().get() as u64,
        dims: m.dims().to_vec(),
        steps: m.steps().iter().map(FieldMatrix::to_rows).collect(),
    })
}

pub fn emit_barcode(b: &Barcode) -> Document {
    Document::Barcode(BarcodeDoc {
        version: FORMAT_VERSION,
        t: b.stabilization(),
        intervals: b.intervals().iter().map(|iv| (iv.birth, iv.death)).collect(),
    })
}

pub fn emit_instance(x: &Instance) -> Document {
    match x {
        Instance::Diagram(d) => emit_diagram(d),
        Instance::Map(f) => emit_map(f),
        Instance::Module(m) => emit_module(m),
        Instance::Barcode(b) => emit_barcode(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::tests::arb_filtration;
    use proptest::prelude::*;

    #[test]
    fn minimal_diagram() {
        let text = r#"{"version": 1, "kind": "poset-diagram", "T": 0, "posets": [{"elements": ["x"]}]}"#;
        let Instance::Diagram(x) = parse_instance(text).unwrap() else { panic!("not a diagram") };
        assert_eq!(x, PersistencePoset::constant(FinitePoset::antichain(["x"])));
    }

    #[test]
    fn relation_cycle_is_named() {
        let text = r#"{"version": 1, "kind": "poset-diagram", "T": 0,
            "posets": [{"elements": ["a", "b"], "relations": [["a", "b"], ["b", "a"]]}]}"#;
        let err = parse_instance(text).unwrap_err();
        assert!(matches!(&err, FormatError::Validation { context, .. } if context == "posets[0]"));
        assert!(err.to_string().contains("cycle"), "{err}");
    }

    #[test]
    fn non_commuting_square_is_named() {
        let text = r#"{"version": 1, "kind": "map",
            "source": {"T": 1, "posets": [{"elements": ["x"]}, {"elements": ["x"]}]},
            "target": {"T": 1, "posets": [{"elements": ["a", "b"]}, {"elements": ["a", "b"]}],
                       "structure_maps": [{"a": "a", "b": "b"}]},
            "components": [{"x": "a"}, {"x": "b"}]}"#;
        let err = parse_instance(text).unwrap_err();
        assert_eq!(err.to_string(), "square at index 0: does not commute at element `x`");
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_document("{\n  \"version\": 1,\n  \"kind\": \"map\",,\n}").unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 3, .. }), "{err:?}");
        let err = parse_document(r#"{"version": 7, "kind": "barcode", "T": 0, "intervals": []}"#).unwrap_err();
        assert_eq!(err, FormatError::Version(7));
    }

    #[test]
    fn module_and_barcode_documents() {
        let text = r#"{"version": 1, "kind": "module", "prime": 2, "dims": [1, 2, 1],
            "steps": [[[1], [0]], [[1, 1]]]}"#;
        let Instance::Module(m) = parse_instance(text).unwrap() else { panic!() };
        assert_eq!(m.rank(0, 2), 1);
        assert_eq!(validate(&emit_module(&m)).unwrap(), Instance::Module(m));
        let bad = r#"{"version": 1, "kind": "module", "prime": 4, "dims": [1], "steps": []}"#;
        assert!(parse_instance(bad).unwrap_err().to_string().starts_with("prime:"));
        let text = r#"{"version": 1, "kind": "barcode", "T": 3, "intervals": [[0, "inf"], [1, 2]]}"#;
        let Instance::Barcode(b) = parse_instance(text).unwrap() else { panic!() };
        assert_eq!(b.len(), 2);
        assert_eq!(parse_instance(&emit_barcode(&b).to_json()).unwrap(), Instance::Barcode(b));
    }

    proptest! {
        #[test]
        fn diagrams_round_trip(x in arb_filtration(6, 4)) {
            let text = emit_diagram(&x).to_json();
            prop_assert_eq!(parse_instance(&text).unwrap(), Instance::Diagram(x));
        }
    }
}
