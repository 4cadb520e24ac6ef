//! The document formats: `.space`, `.morph` and `.report`.
//!
//! Documents are self-contained JSON with a canonical byte form: object
//! keys sorted, strata sorted by id, LF newlines, reals printed with 12
//! significant digits. Parsing returns model values or a diagnostic naming
//! the failing schema rule; serializing twice is byte-identical.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};

use crate::diag::Report;
use crate::expr::Expr;
use crate::group::{CocycleGroup, LinkIso};
use crate::id::{ChartId, StratumId, Token};
use crate::morphism::{BasicModel, BasicModelMorphism, MorphismKinds, RadialKind, StratMorphism};
use crate::poset::{StratPoset, Stratum};
use crate::space::{PresentedSpace, SmoothFactor, StratSpaceExpr};
use crate::tube::{ChartKind, ChartRecord, TMStructure, Tube};

pub const SPACE_FORMAT: &str = "space";
pub const MORPH_FORMAT: &str = "morph";
pub const REPORT_FORMAT: &str = "report";
pub const VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DocError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema rule {rule} violated: {detail}")]
    Schema { rule: String, detail: String },
    #[error("dangling id {0}")]
    DanglingId(String),
}

fn schema(rule: &str, detail: impl Into<String>) -> DocError {
    DocError::Schema {
        rule: rule.to_string(),
        detail: detail.into(),
    }
}

/// A parsed `.space` document.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceDocument {
    Expr(StratSpaceExpr),
    Presented {
        space: PresentedSpace,
        nesting: BTreeSet<(StratumId, StratumId)>,
        families: BTreeMap<StratumId, u32>,
    },
}

impl SpaceDocument {
    /// The presented space plus its declared structure. Expression
    /// documents are normalized; authored documents are taken as written.
    pub fn resolve(&self) -> Result<(PresentedSpace, TMStructure), crate::space::SpaceError> {
        match self {
            SpaceDocument::Expr(expr) => {
                let space = crate::space::present(expr)?;
                let tm = TMStructure::canonical(&space);
                Ok((space, tm))
            }
            SpaceDocument::Presented {
                space,
                nesting,
                families,
            } => {
                let mut tm = TMStructure::canonical(space);
                tm.nesting.extend(nesting.iter().cloned());
                tm.families.extend(families.iter().map(|(k, v)| (k.clone(), *v)));
                Ok((space.clone(), tm))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// canonical writer
// ---------------------------------------------------------------------------

/// Formats a real with 12 significant digits, canonically.
fn fmt_real(x: f64) -> String {
    format!("{:.11e}", x)
}

fn write_value(out: &mut String, value: &Value, indent: usize) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&fmt_real(n.as_f64().unwrap_or(0.0)));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string encodes"));
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent + 1));
                write_value(out, item, indent + 1);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            // serde_json without preserve_order keeps keys sorted already
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent + 1));
                out.push_str(&serde_json::to_string(key).expect("key encodes"));
                out.push_str(": ");
                write_value(out, item, indent + 1);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
    }
}

/// The canonical byte form of a document value.
pub fn canonical_bytes(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

// ---------------------------------------------------------------------------
// stratum id grammar
// ---------------------------------------------------------------------------

fn parse_token(text: &str) -> Result<(Token, usize), DocError> {
    let bad = |d: &str| schema("stratum-id", format!("{d} in {text:?}"));
    if let Some(rest) = text.strip_prefix("atom:") {
        let end = rest.find(['/', ')', ';']).unwrap_or(rest.len());
        return Ok((Token::Atom(rest[..end].to_string()), 5 + end));
    }
    if let Some(rest) = text.strip_prefix("times:") {
        let end = rest.find(['/', ')', ';']).unwrap_or(rest.len());
        return Ok((Token::Times(rest[..end].to_string()), 6 + end));
    }
    if let Some(rest) = text.strip_prefix("part:") {
        let end = rest.find(['/', ')', ';']).unwrap_or(rest.len());
        let k = rest[..end]
            .parse::<u32>()
            .map_err(|_| bad("bad part index"))?;
        return Ok((Token::Part(k), 5 + end));
    }
    if let Some(rest) = text.strip_prefix("anon:") {
        let end = rest.find(['/', ')', ';']).unwrap_or(rest.len());
        let k = rest[..end]
            .parse::<u32>()
            .map_err(|_| bad("bad anon index"))?;
        return Ok((Token::Anon(k), 5 + end));
    }
    if text.starts_with("vertex") {
        return Ok((Token::Vertex, 6));
    }
    if text.starts_with("pole+") {
        return Ok((Token::Pole(true), 5));
    }
    if text.starts_with("pole-") {
        return Ok((Token::Pole(false), 5));
    }
    if text.starts_with("copy+") {
        return Ok((Token::CopyPlus, 5));
    }
    if text.starts_with("copy-") {
        return Ok((Token::CopyMinus, 5));
    }
    if text.starts_with("unbent") {
        return Ok((Token::Unbent, 6));
    }
    if let Some(rest) = text.strip_prefix("body(") {
        let (inner, used) = parse_id_prefix(rest)?;
        if !rest[used..].starts_with(')') {
            return Err(bad("unclosed body("));
        }
        return Ok((Token::Body(inner), 5 + used + 1));
    }
    if let Some(rest) = text.strip_prefix("swept(") {
        let (inner, used) = parse_id_prefix(rest)?;
        if !rest[used..].starts_with(')') {
            return Err(bad("unclosed swept("));
        }
        return Ok((Token::Swept(inner), 6 + used + 1));
    }
    if let Some(rest) = text.strip_prefix("fiber(") {
        let (base, used) = parse_id_prefix(rest)?;
        if !rest[used..].starts_with(';') {
            return Err(bad("fiber( wants two ids"));
        }
        let rest2 = &rest[used + 1..];
        let (link, used2) = parse_id_prefix(rest2)?;
        if !rest2[used2..].starts_with(')') {
            return Err(bad("unclosed fiber("));
        }
        return Ok((Token::Fiber(base, link), 6 + used + 1 + used2 + 1));
    }
    Err(bad("unknown token"))
}

fn parse_id_prefix(text: &str) -> Result<(StratumId, usize), DocError> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    loop {
        let (token, used) = parse_token(&text[pos..])?;
        tokens.push(token);
        pos += used;
        if text[pos..].starts_with('/') {
            pos += 1;
        } else {
            break;
        }
    }
    Ok((StratumId(tokens), pos))
}

/// Parses the textual stratum id grammar, the inverse of `Display`.
pub fn parse_stratum_id(text: &str) -> Result<StratumId, DocError> {
    let (id, used) = parse_id_prefix(text)?;
    if used != text.len() {
        return Err(schema(
            "stratum-id",
            format!("trailing input {:?}", &text[used..]),
        ));
    }
    Ok(id)
}

// ---------------------------------------------------------------------------
// encoding
// ---------------------------------------------------------------------------

fn expr_space_to_value(expr: &StratSpaceExpr) -> Value {
    match expr {
        StratSpaceExpr::Smooth(f) => json!({
            "kind": "smooth", "label": f.label, "dim": f.dim, "compact": f.compact,
        }),
        StratSpaceExpr::Product(f, inner) => json!({
            "kind": "product",
            "factor": {"label": f.label, "dim": f.dim, "compact": f.compact},
            "of": expr_space_to_value(inner),
        }),
        StratSpaceExpr::Cone(inner) => json!({
            "kind": "cone", "of": expr_space_to_value(inner),
        }),
        StratSpaceExpr::Disjoint(parts) => json!({
            "kind": "disjoint",
            "parts": parts.iter().map(expr_space_to_value).collect::<Vec<_>>(),
        }),
    }
}

fn link_iso_to_value(iso: &LinkIso) -> Value {
    let mut obj = Map::new();
    obj.insert(
        "strata".into(),
        Value::Object(
            iso.stratum_map
                .iter()
                .map(|(a, b)| (a.to_string(), Value::String(b.to_string())))
                .collect(),
        ),
    );
    if !iso.sample_perms.is_empty() {
        obj.insert(
            "samples".into(),
            Value::Object(
                iso.sample_perms
                    .iter()
                    .map(|(s, p)| {
                        (
                            s.to_string(),
                            Value::Array(p.iter().map(|&i| json!(i)).collect()),
                        )
                    })
                    .collect(),
            ),
        );
    }
    if !iso.link_actions.is_empty() {
        obj.insert(
            "links".into(),
            Value::Object(
                iso.link_actions
                    .iter()
                    .map(|(s, a)| (s.to_string(), link_iso_to_value(a)))
                    .collect(),
            ),
        );
    }
    Value::Object(obj)
}

fn tube_to_value(tube: &Tube) -> Value {
    json!({
        "charts": tube.charts.iter().map(|c| json!({
            "id": c.chart_id.0,
            "kind": match c.kind {
                ChartKind::PseudomanifoldChart => "pseudomanifold",
                ChartKind::BundleChart => "bundle",
            },
        })).collect::<Vec<_>>(),
        "group": tube.group.elements.iter().map(link_iso_to_value).collect::<Vec<_>>(),
        "transitions": Value::Object(tube.transitions.iter().map(|((a, b), g)| {
            (format!("{}|{}", a.0, b.0), json!(g))
        }).collect()),
        "footprint": Value::Object(tube.footprint_map.iter().map(|(r, w)| {
            (r.to_string(), Value::String(w.to_string()))
        }).collect()),
        "family": tube.family.map(|f| json!(f)).unwrap_or(Value::Null),
    })
}

fn presented_to_value(space: &PresentedSpace) -> Value {
    let mut strata: Vec<&Stratum> = space.poset.strata().collect();
    strata.sort_by_key(|s| s.id.to_string());
    let mut covers: Vec<(String, String)> = space
        .poset
        .covers()
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    covers.sort();
    json!({
        "compact": space.compact,
        "dim": space.dim,
        "strata": strata.iter().map(|s| json!({
            "id": s.id.to_string(), "dim": s.dim, "label": s.label,
        })).collect::<Vec<_>>(),
        "order": covers.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
        "links": Value::Object(space.links.iter().map(|(s, l)| {
            (s.to_string(), presented_to_value(l))
        }).collect()),
        "tubes": Value::Object(space.tubes.iter().map(|(s, t)| {
            (s.to_string(), tube_to_value(t))
        }).collect()),
    })
}

/// Encodes a space document; presented form unless an expression is given.
pub fn space_document_to_value(doc: &SpaceDocument) -> Value {
    match doc {
        SpaceDocument::Expr(expr) => json!({
            "format": SPACE_FORMAT, "version": VERSION,
            "expr": expr_space_to_value(expr),
        }),
        SpaceDocument::Presented {
            space,
            nesting,
            families,
        } => {
            let mut obj = Map::new();
            obj.insert("format".into(), json!(SPACE_FORMAT));
            obj.insert("version".into(), json!(VERSION));
            obj.insert("presented".into(), presented_to_value(space));
            if !nesting.is_empty() || !families.is_empty() {
                obj.insert(
                    "tm".into(),
                    json!({
                        "nesting": nesting.iter().map(|(a, b)| {
                            json!([a.to_string(), b.to_string()])
                        }).collect::<Vec<_>>(),
                        "families": Value::Object(families.iter().map(|(s, f)| {
                            (s.to_string(), json!(f))
                        }).collect()),
                    }),
                );
            }
            Value::Object(obj)
        }
    }
}

/// Canonical text of a presented space with its structure.
pub fn serialize_space(space: &PresentedSpace, tm: &TMStructure) -> String {
    let doc = SpaceDocument::Presented {
        space: crate::unbend::space_with_tubes(space, tm),
        nesting: tm.nesting.clone(),
        families: tm.families.clone(),
    };
    canonical_bytes(&space_document_to_value(&doc))
}

/// Canonical text of an expression document.
pub fn serialize_expr(expr: &StratSpaceExpr) -> String {
    canonical_bytes(&space_document_to_value(&SpaceDocument::Expr(expr.clone())))
}

// ---------------------------------------------------------------------------
// decoding
// ---------------------------------------------------------------------------

fn as_object<'v>(value: &'v Value, rule: &str) -> Result<&'v Map<String, Value>, DocError> {
    value
        .as_object()
        .ok_or_else(|| schema(rule, "expected an object"))
}

fn get<'v>(obj: &'v Map<String, Value>, key: &str, rule: &str) -> Result<&'v Value, DocError> {
    obj.get(key)
        .ok_or_else(|| schema(rule, format!("missing key {key:?}")))
}

fn as_str<'v>(value: &'v Value, rule: &str) -> Result<&'v str, DocError> {
    value
        .as_str()
        .ok_or_else(|| schema(rule, "expected a string"))
}

fn as_u32(value: &Value, rule: &str) -> Result<u32, DocError> {
    value
        .as_u64()
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| schema(rule, "expected a small nonnegative integer"))
}

fn as_bool(value: &Value, rule: &str) -> Result<bool, DocError> {
    value
        .as_bool()
        .ok_or_else(|| schema(rule, "expected a boolean"))
}

fn expr_space_from_value(value: &Value) -> Result<StratSpaceExpr, DocError> {
    let obj = as_object(value, "expr")?;
    let kind = as_str(get(obj, "kind", "expr")?, "expr")?;
    match kind {
        "smooth" => Ok(StratSpaceExpr::Smooth(smooth_from_value(value)?)),
        "product" => Ok(StratSpaceExpr::Product(
            smooth_from_value(get(obj, "factor", "expr.product")?)?,
            Box::new(expr_space_from_value(get(obj, "of", "expr.product")?)?),
        )),
        "cone" => Ok(StratSpaceExpr::Cone(Box::new(expr_space_from_value(get(
            obj, "of", "expr.cone",
        )?)?))),
        "disjoint" => {
            let parts = get(obj, "parts", "expr.disjoint")?
                .as_array()
                .ok_or_else(|| schema("expr.disjoint", "parts must be an array"))?;
            if parts.is_empty() {
                return Err(schema("expr.disjoint", "parts must be nonempty"));
            }
            Ok(StratSpaceExpr::Disjoint(
                parts
                    .iter()
                    .map(expr_space_from_value)
                    .collect::<Result<Vec<_>, _>>()?,
            ))
        }
        other => Err(schema("expr", format!("unknown kind {other:?}"))),
    }
}

fn smooth_from_value(value: &Value) -> Result<SmoothFactor, DocError> {
    let obj = as_object(value, "smooth")?;
    Ok(SmoothFactor {
        label: as_str(get(obj, "label", "smooth")?, "smooth")?.to_string(),
        dim: as_u32(get(obj, "dim", "smooth")?, "smooth")?,
        compact: as_bool(get(obj, "compact", "smooth")?, "smooth")?,
    })
}

fn link_iso_from_value(value: &Value) -> Result<LinkIso, DocError> {
    let obj = as_object(value, "link-iso")?;
    let mut stratum_map = BTreeMap::new();
    for (a, b) in as_object(get(obj, "strata", "link-iso")?, "link-iso")? {
        stratum_map.insert(
            parse_stratum_id(a)?,
            parse_stratum_id(as_str(b, "link-iso")?)?,
        );
    }
    let mut sample_perms = BTreeMap::new();
    if let Some(samples) = obj.get("samples") {
        for (s, perm) in as_object(samples, "link-iso.samples")? {
            let perm = perm
                .as_array()
                .ok_or_else(|| schema("link-iso.samples", "expected an array"))?
                .iter()
                .map(|v| {
                    v.as_u64()
                        .and_then(|x| u8::try_from(x).ok())
                        .ok_or_else(|| schema("link-iso.samples", "bad index"))
                })
                .collect::<Result<Vec<u8>, _>>()?;
            sample_perms.insert(parse_stratum_id(s)?, perm);
        }
    }
    let mut link_actions = BTreeMap::new();
    if let Some(links) = obj.get("links") {
        for (s, a) in as_object(links, "link-iso.links")? {
            link_actions.insert(parse_stratum_id(s)?, link_iso_from_value(a)?);
        }
    }
    Ok(LinkIso {
        stratum_map,
        sample_perms,
        link_actions,
    })
}

fn tube_from_value(base: &StratumId, link: PresentedSpace, value: &Value) -> Result<Tube, DocError> {
    let obj = as_object(value, "tube")?;
    let charts = get(obj, "charts", "tube")?
        .as_array()
        .ok_or_else(|| schema("tube.charts", "expected an array"))?
        .iter()
        .map(|c| {
            let c = as_object(c, "tube.charts")?;
            Ok(ChartRecord {
                chart_id: ChartId::new(as_str(get(c, "id", "tube.charts")?, "tube.charts")?),
                base_stratum: base.clone(),
                kind: match as_str(get(c, "kind", "tube.charts")?, "tube.charts")? {
                    "pseudomanifold" => ChartKind::PseudomanifoldChart,
                    "bundle" => ChartKind::BundleChart,
                    other => {
                        return Err(schema("tube.charts", format!("unknown kind {other:?}")))
                    }
                },
            })
        })
        .collect::<Result<Vec<_>, DocError>>()?;
    let elements = get(obj, "group", "tube")?
        .as_array()
        .ok_or_else(|| schema("tube.group", "expected an array"))?
        .iter()
        .map(link_iso_from_value)
        .collect::<Result<Vec<_>, _>>()?;
    let mut transitions = BTreeMap::new();
    for (key, g) in as_object(get(obj, "transitions", "tube")?, "tube.transitions")? {
        let (a, b) = key
            .split_once('|')
            .ok_or_else(|| schema("tube.transitions", "key must be \"a|b\""))?;
        let index = g
            .as_u64()
            .ok_or_else(|| schema("tube.transitions", "expected a group index"))?
            as usize;
        if index >= elements.len() {
            return Err(schema("tube.transitions", "group index out of range"));
        }
        transitions.insert((ChartId::new(a), ChartId::new(b)), index);
    }
    let mut footprint_map = BTreeMap::new();
    for (r, w) in as_object(get(obj, "footprint", "tube")?, "tube.footprint")? {
        footprint_map.insert(parse_stratum_id(r)?, parse_stratum_id(as_str(w, "tube.footprint")?)?);
    }
    let family = match get(obj, "family", "tube")? {
        Value::Null => None,
        v => Some(as_u32(v, "tube.family")?),
    };
    Ok(Tube {
        base: base.clone(),
        link,
        charts,
        group: CocycleGroup { elements },
        transitions,
        footprint_map,
        family,
    })
}

fn presented_from_value(value: &Value) -> Result<PresentedSpace, DocError> {
    let obj = as_object(value, "presented")?;
    let compact = as_bool(get(obj, "compact", "presented")?, "presented")?;
    let dim = as_u32(get(obj, "dim", "presented")?, "presented")?;
    let mut strata = Vec::new();
    for s in get(obj, "strata", "presented")?
        .as_array()
        .ok_or_else(|| schema("presented.strata", "expected an array"))?
    {
        let s = as_object(s, "presented.strata")?;
        strata.push(Stratum {
            id: parse_stratum_id(as_str(get(s, "id", "presented.strata")?, "presented.strata")?)?,
            dim: as_u32(get(s, "dim", "presented.strata")?, "presented.strata")?,
            label: as_str(get(s, "label", "presented.strata")?, "presented.strata")?.to_string(),
        });
    }
    let known: BTreeSet<StratumId> = strata.iter().map(|s| s.id.clone()).collect();
    let mut pairs = Vec::new();
    for pair in get(obj, "order", "presented")?
        .as_array()
        .ok_or_else(|| schema("presented.order", "expected an array"))?
    {
        let pair = pair
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| schema("presented.order", "expected [a, b] pairs"))?;
        let a = parse_stratum_id(as_str(&pair[0], "presented.order")?)?;
        let b = parse_stratum_id(as_str(&pair[1], "presented.order")?)?;
        for id in [&a, &b] {
            if !known.contains(id) {
                return Err(DocError::DanglingId(id.to_string()));
            }
        }
        pairs.push((a, b));
    }
    let poset = StratPoset::from_pairs(strata, &pairs)
        .map_err(|e| schema("NotAPartialOrder", e.to_string()))?;
    let mut links = BTreeMap::new();
    for (s, l) in as_object(get(obj, "links", "presented")?, "presented.links")? {
        let id = parse_stratum_id(s)?;
        if !known.contains(&id) {
            return Err(DocError::DanglingId(id.to_string()));
        }
        links.insert(id, presented_from_value(l)?);
    }
    let mut tubes = BTreeMap::new();
    for (s, t) in as_object(get(obj, "tubes", "presented")?, "presented.tubes")? {
        let id = parse_stratum_id(s)?;
        if !known.contains(&id) {
            return Err(DocError::DanglingId(id.to_string()));
        }
        let link = links
            .get(&id)
            .cloned()
            .ok_or_else(|| schema("presented.tubes", format!("{id} has a tube but no link")))?;
        tubes.insert(id.clone(), tube_from_value(&id, link, t)?);
    }
    Ok(PresentedSpace {
        poset,
        links,
        tubes,
        compact,
        dim,
    })
}

/// Parses a `.space` document.
pub fn parse_space(text: &str) -> Result<SpaceDocument, DocError> {
    let value: Value = serde_json::from_str(text).map_err(|e| DocError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = as_object(&value, "document")?;
    let format = as_str(get(obj, "format", "document")?, "document")?;
    if format != SPACE_FORMAT {
        return Err(schema("document", format!("format {format:?} is not a space")));
    }
    match (obj.get("expr"), obj.get("presented")) {
        (Some(expr), None) => {
            let expr = expr_space_from_value(expr)?;
            validate_expr(&expr)?;
            Ok(SpaceDocument::Expr(expr))
        }
        (None, Some(presented)) => {
            let space = presented_from_value(presented)?;
            let mut nesting = BTreeSet::new();
            let mut families = BTreeMap::new();
            if let Some(tm) = obj.get("tm") {
                let tm = as_object(tm, "tm")?;
                if let Some(list) = tm.get("nesting") {
                    for pair in list
                        .as_array()
                        .ok_or_else(|| schema("tm.nesting", "expected an array"))?
                    {
                        let pair = pair
                            .as_array()
                            .filter(|p| p.len() == 2)
                            .ok_or_else(|| schema("tm.nesting", "expected [inner, outer]"))?;
                        nesting.insert((
                            parse_stratum_id(as_str(&pair[0], "tm.nesting")?)?,
                            parse_stratum_id(as_str(&pair[1], "tm.nesting")?)?,
                        ));
                    }
                }
                if let Some(map) = tm.get("families") {
                    for (s, f) in as_object(map, "tm.families")? {
                        families.insert(parse_stratum_id(s)?, as_u32(f, "tm.families")?);
                    }
                }
            }
            Ok(SpaceDocument::Presented {
                space,
                nesting,
                families,
            })
        }
        (Some(_), Some(_)) => Err(schema("document", "both expr and presented given")),
        (None, None) => Err(schema("document", "neither expr nor presented given")),
    }
}

/// The expression-level well-formedness rules, checked at parse time so a
/// bad document is named after its rule.
fn validate_expr(expr: &StratSpaceExpr) -> Result<(), DocError> {
    fn compactness(expr: &StratSpaceExpr) -> bool {
        match expr {
            StratSpaceExpr::Smooth(f) => f.compact,
            StratSpaceExpr::Product(f, inner) => f.compact && compactness(inner),
            StratSpaceExpr::Cone(_) => false,
            StratSpaceExpr::Disjoint(parts) => parts.iter().all(compactness),
        }
    }
    match expr {
        StratSpaceExpr::Smooth(_) => Ok(()),
        StratSpaceExpr::Product(_, inner) => validate_expr(inner),
        StratSpaceExpr::Cone(inner) => {
            validate_expr(inner)?;
            if !compactness(inner) {
                return Err(schema("expr.cone", "cone over a non-compact space"));
            }
            Ok(())
        }
        StratSpaceExpr::Disjoint(parts) => {
            for p in parts {
                validate_expr(p)?;
            }
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// morphism documents
// ---------------------------------------------------------------------------

fn expr_to_value(expr: &Expr) -> Value {
    match expr {
        Expr::Const(c) => json!({"op": "const", "value": c}),
        Expr::U(i) => json!({"op": "u", "index": i}),
        Expr::T => json!({"op": "t"}),
        Expr::L => json!({"op": "l"}),
        Expr::Add(a, b) => json!({"op": "add", "lhs": expr_to_value(a), "rhs": expr_to_value(b)}),
        Expr::Mul(a, b) => json!({"op": "mul", "lhs": expr_to_value(a), "rhs": expr_to_value(b)}),
        Expr::Neg(a) => json!({"op": "neg", "arg": expr_to_value(a)}),
        Expr::Abs(a) => json!({"op": "abs", "arg": expr_to_value(a)}),
        Expr::Sgn(a) => json!({"op": "sgn", "arg": expr_to_value(a)}),
        Expr::Exp(a) => json!({"op": "exp", "arg": expr_to_value(a)}),
        Expr::Sin(a) => json!({"op": "sin", "arg": expr_to_value(a)}),
        Expr::Cos(a) => json!({"op": "cos", "arg": expr_to_value(a)}),
        Expr::Apply(name, a) => json!({"op": "apply", "name": name, "arg": expr_to_value(a)}),
    }
}

fn expr_from_value(value: &Value) -> Result<Expr, DocError> {
    let obj = as_object(value, "coord-expr")?;
    let op = as_str(get(obj, "op", "coord-expr")?, "coord-expr")?;
    let arg = |key: &str| -> Result<Expr, DocError> {
        expr_from_value(get(obj, key, "coord-expr")?)
    };
    let node = match op {
        "const" => Expr::Const(
            get(obj, "value", "coord-expr")?
                .as_f64()
                .ok_or_else(|| schema("coord-expr", "const wants a number"))?,
        ),
        "u" => Expr::U(
            get(obj, "index", "coord-expr")?
                .as_u64()
                .ok_or_else(|| schema("coord-expr", "u wants an index"))? as usize,
        ),
        "t" => Expr::T,
        "l" => Expr::L,
        "add" => Expr::add(arg("lhs")?, arg("rhs")?),
        "mul" => Expr::mul(arg("lhs")?, arg("rhs")?),
        "neg" => Expr::neg(arg("arg")?),
        "abs" => Expr::abs(arg("arg")?),
        "sgn" => Expr::sgn(arg("arg")?),
        "exp" => Expr::Exp(Box::new(arg("arg")?)),
        "sin" => Expr::Sin(Box::new(arg("arg")?)),
        "cos" => Expr::Cos(Box::new(arg("arg")?)),
        "apply" => Expr::Apply(
            as_str(get(obj, "name", "coord-expr")?, "coord-expr")?.to_string(),
            Box::new(arg("arg")?),
        ),
        other => return Err(schema("coord-expr", format!("unknown op {other:?}"))),
    };
    node.kind().map_err(|e| schema("coord-expr", e.to_string()))?;
    Ok(node)
}

fn model_to_value(model: &BasicModel) -> Value {
    json!({
        "base_dim": model.base_dim,
        "radial": match model.radial { RadialKind::Cone => "cone", RadialKind::Line => "line" },
        "link": presented_to_value(&model.link),
    })
}

fn model_from_value(value: &Value) -> Result<BasicModel, DocError> {
    let obj = as_object(value, "model")?;
    Ok(BasicModel {
        base_dim: as_u32(get(obj, "base_dim", "model")?, "model")?,
        radial: match as_str(get(obj, "radial", "model")?, "model")? {
            "cone" => RadialKind::Cone,
            "line" => RadialKind::Line,
            other => return Err(schema("model", format!("unknown radial {other:?}"))),
        },
        link: presented_from_value(get(obj, "link", "model")?)?,
    })
}

fn local_to_value(key: &(StratumId, ChartId, ChartId), local: &BasicModelMorphism) -> Value {
    json!({
        "stratum": key.0.to_string(),
        "chart_from": key.1.0,
        "chart_to": key.2.0,
        "domain": model_to_value(&local.domain),
        "codomain": model_to_value(&local.codomain),
        "a1": local.a1.iter().map(expr_to_value).collect::<Vec<_>>(),
        "a2": expr_to_value(&local.a2),
        "a3": expr_to_value(&local.a3),
        "actions": Value::Object(local.actions.iter().map(|(n, a)| {
            (n.clone(), link_iso_to_value(a))
        }).collect()),
    })
}

/// A parsed `.morph` document: the morphism plus its self-contained domain
/// and codomain space documents.
#[derive(Debug, Clone, PartialEq)]
pub struct MorphDocument {
    pub domain: SpaceDocument,
    pub codomain: SpaceDocument,
    pub morphism: StratMorphism,
}

pub fn morph_document_to_value(doc: &MorphDocument) -> Value {
    let m = &doc.morphism;
    json!({
        "format": MORPH_FORMAT, "version": VERSION,
        "domain": space_document_to_value(&doc.domain),
        "codomain": space_document_to_value(&doc.codomain),
        "stratum_map": Value::Object(m.stratum_map.iter().map(|(a, b)| {
            (a.to_string(), Value::String(b.to_string()))
        }).collect()),
        "kinds": json!({
            "embedding": m.kinds.embedding,
            "tube_morphism": m.kinds.tube_morphism,
            "thom_mather": m.kinds.thom_mather,
        }),
        "locals": m.locals.iter().map(|(k, l)| local_to_value(k, l)).collect::<Vec<_>>(),
        "link_isos": Value::Object(m.link_isos.iter().map(|(s, h)| {
            (s.to_string(), link_iso_to_value(h))
        }).collect()),
    })
}

pub fn serialize_morphism(doc: &MorphDocument) -> String {
    canonical_bytes(&morph_document_to_value(doc))
}

pub fn parse_morphism(text: &str) -> Result<MorphDocument, DocError> {
    let value: Value = serde_json::from_str(text).map_err(|e| DocError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = as_object(&value, "document")?;
    let format = as_str(get(obj, "format", "document")?, "document")?;
    if format != MORPH_FORMAT {
        return Err(schema("document", format!("format {format:?} is not a morphism")));
    }
    let domain = parse_space_value(get(obj, "domain", "morph")?)?;
    let codomain = parse_space_value(get(obj, "codomain", "morph")?)?;
    let mut stratum_map = BTreeMap::new();
    for (a, b) in as_object(get(obj, "stratum_map", "morph")?, "morph.stratum_map")? {
        stratum_map.insert(parse_stratum_id(a)?, parse_stratum_id(as_str(b, "morph")?)?);
    }
    let kinds_obj = as_object(get(obj, "kinds", "morph")?, "morph.kinds")?;
    let kinds = MorphismKinds {
        embedding: as_bool(get(kinds_obj, "embedding", "morph.kinds")?, "morph.kinds")?,
        tube_morphism: as_bool(
            get(kinds_obj, "tube_morphism", "morph.kinds")?,
            "morph.kinds",
        )?,
        thom_mather: as_bool(get(kinds_obj, "thom_mather", "morph.kinds")?, "morph.kinds")?,
    };
    let mut locals = BTreeMap::new();
    for l in get(obj, "locals", "morph")?
        .as_array()
        .ok_or_else(|| schema("morph.locals", "expected an array"))?
    {
        let lobj = as_object(l, "morph.locals")?;
        let key = (
            parse_stratum_id(as_str(get(lobj, "stratum", "morph.locals")?, "morph.locals")?)?,
            ChartId::new(as_str(get(lobj, "chart_from", "morph.locals")?, "morph.locals")?),
            ChartId::new(as_str(get(lobj, "chart_to", "morph.locals")?, "morph.locals")?),
        );
        let mut actions = BTreeMap::new();
        for (n, a) in as_object(get(lobj, "actions", "morph.locals")?, "morph.locals")? {
            actions.insert(n.clone(), link_iso_from_value(a)?);
        }
        locals.insert(
            key,
            BasicModelMorphism {
                domain: model_from_value(get(lobj, "domain", "morph.locals")?)?,
                codomain: model_from_value(get(lobj, "codomain", "morph.locals")?)?,
                a1: get(lobj, "a1", "morph.locals")?
                    .as_array()
                    .ok_or_else(|| schema("morph.locals", "a1 must be an array"))?
                    .iter()
                    .map(expr_from_value)
                    .collect::<Result<Vec<_>, _>>()?,
                a2: expr_from_value(get(lobj, "a2", "morph.locals")?)?,
                a3: expr_from_value(get(lobj, "a3", "morph.locals")?)?,
                actions,
            },
        );
    }
    let mut link_isos = BTreeMap::new();
    for (s, h) in as_object(get(obj, "link_isos", "morph")?, "morph.link_isos")? {
        link_isos.insert(parse_stratum_id(s)?, link_iso_from_value(h)?);
    }
    Ok(MorphDocument {
        domain,
        codomain,
        morphism: StratMorphism {
            stratum_map,
            locals,
            kinds,
            link_isos,
        },
    })
}

fn parse_space_value(value: &Value) -> Result<SpaceDocument, DocError> {
    // the embedded space documents reuse the top-level schema
    let text = serde_json::to_string(value).expect("value re-encodes");
    parse_space(&text)
}

// ---------------------------------------------------------------------------
// report documents
// ---------------------------------------------------------------------------

pub fn report_to_value(tool: &str, report: &Report) -> Value {
    json!({
        "format": REPORT_FORMAT, "version": VERSION,
        "tool": tool,
        "ok": report.is_clean(),
        "violations": report.violations.iter().map(|v| json!({
            "code": v.code(),
            "detail": format!("{v:?}"),
        })).collect::<Vec<_>>(),
    })
}

pub fn serialize_report(tool: &str, report: &Report) -> String {
    canonical_bytes(&report_to_value(tool, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{cone_over, smooth_space, suspend};
    use crate::tube::separate_tubes;

    fn s1() -> PresentedSpace {
        smooth_space(&SmoothFactor::new("S1", 1, true))
    }

    #[test]
    fn stratum_id_grammar_round_trips() {
        let ids = [
            StratumId::atom("S1"),
            StratumId::vertex(),
            StratumId::body(&StratumId::swept(&StratumId::atom("S1"))),
            StratumId::vertex().prefixed(Token::Part(3)),
            StratumId::fiber(&StratumId::vertex(), &StratumId::atom("S1")),
            StratumId::body(&StratumId::atom("S1")).prefixed(Token::Unbent),
            StratumId(vec![Token::Anon(7)]),
        ];
        for id in ids {
            let text = id.to_string();
            assert_eq!(parse_stratum_id(&text).unwrap(), id, "{text}");
        }
        assert!(parse_stratum_id("mystery:3").is_err());
    }

    #[test]
    fn space_documents_round_trip_structurally() {
        let space = cone_over(&suspend(&s1()).unwrap()).unwrap();
        let tm = separate_tubes(&space, &TMStructure::canonical(&space));
        let text = serialize_space(&space, &tm);
        let doc = parse_space(&text).unwrap();
        let (space2, tm2) = doc.resolve().unwrap();
        assert_eq!(crate::unbend::space_with_tubes(&space, &tm), space2);
        assert_eq!(tm.families, tm2.families);
        assert_eq!(tm.nesting, tm2.nesting);
        // canonical bytes are stable under re-serialization
        let text2 = serialize_space(&space2, &tm2);
        assert_eq!(text, text2);
    }

    #[test]
    fn expression_documents_round_trip() {
        let expr = StratSpaceExpr::product(
            SmoothFactor::new("U", 1, false),
            StratSpaceExpr::cone(StratSpaceExpr::smooth("S1", 1, true)),
        );
        let text = serialize_expr(&expr);
        let doc = parse_space(&text).unwrap();
        assert_eq!(doc, SpaceDocument::Expr(expr));
        assert_eq!(serialize_expr(match &doc {
            SpaceDocument::Expr(e) => e,
            _ => unreachable!(),
        }), text);
    }

    #[test]
    fn cone_over_non_compact_is_a_schema_error() {
        let text = serialize_expr(&StratSpaceExpr::cone(StratSpaceExpr::smooth(
            "U", 1, false,
        )));
        let err = parse_space(&text).unwrap_err();
        assert!(matches!(err, DocError::Schema { ref rule, .. } if rule == "expr.cone"));
    }

    #[test]
    fn order_cycles_are_schema_errors() {
        let text = r##"{
          "format": "space", "version": 1,
          "presented": {
            "compact": true, "dim": 1,
            "strata": [
              {"id": "atom:a", "dim": 0, "label": "a"},
              {"id": "atom:b", "dim": 1, "label": "b"}
            ],
            "order": [["atom:a", "atom:b"], ["atom:b", "atom:a"]],
            "links": {}, "tubes": {}
          }
        }"##;
        let err = parse_space(text).unwrap_err();
        assert!(matches!(err, DocError::Schema { ref rule, .. } if rule == "NotAPartialOrder"));
    }

    #[test]
    fn dangling_ids_are_reported() {
        let text = r##"{
          "format": "space", "version": 1,
          "presented": {
            "compact": true, "dim": 1,
            "strata": [{"id": "atom:a", "dim": 0, "label": "a"}],
            "order": [["atom:a", "atom:zz"]],
            "links": {}, "tubes": {}
          }
        }"##;
        assert!(matches!(
            parse_space(text).unwrap_err(),
            DocError::DanglingId(_)
        ));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_space("{ not json").unwrap_err();
        assert!(matches!(err, DocError::Syntax { line: 1, .. }));
    }

    #[test]
    fn morphism_documents_round_trip() {
        let space = cone_over(&s1()).unwrap();
        let tm = separate_tubes(&space, &TMStructure::canonical(&space));
        let g = crate::group::sample_shift_group(s1().poset.ids(), 4).elements[1].clone();
        let phi =
            crate::morphism::cocycle_morphism(&space, &StratumId::vertex(), "g", &g).unwrap();
        let doc = MorphDocument {
            domain: SpaceDocument::Presented {
                space: crate::unbend::space_with_tubes(&space, &tm),
                nesting: tm.nesting.clone(),
                families: tm.families.clone(),
            },
            codomain: SpaceDocument::Presented {
                space: crate::unbend::space_with_tubes(&space, &tm),
                nesting: tm.nesting,
                families: tm.families,
            },
            morphism: phi,
        };
        let text = serialize_morphism(&doc);
        let parsed = parse_morphism(&text).unwrap();
        assert_eq!(parsed, doc);
        assert_eq!(serialize_morphism(&parsed), text);
    }

    #[test]
    fn reals_print_with_twelve_significant_digits() {
        assert_eq!(fmt_real(0.5), "5.00000000000e-1");
        assert_eq!(fmt_real(-1.0), "-1.00000000000e0");
        let expr = Expr::constant(0.1 + 0.2);
        let v = expr_to_value(&expr);
        let text = canonical_bytes(&v);
        assert!(text.contains("3.00000000000e-1"), "{text}");
    }
}
