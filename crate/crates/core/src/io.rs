//! Problem files, JSON output and error records.
//!
//! Input schema:
//!
//! ```json
//! {"group": {"kind": "SO3" | "circle" | "finite", "generators": [{"axis": [x,y,z], "angle_deg": a}, ...]},
//!  "base_lattice": [{"kind": "C", "n": 4}, ...],
//!  "order": [[i, j], ...],
//!  "action": "SO3_on_R3"}
//! ```
//!
//! `order` and `action` are optional. An `order` pair `[i, j]` states
//! `base_lattice[i] < base_lattice[j]`.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::lattice::{build_lattice, IsotropyLattice};
use crate::lift::{check_realizable, AmbientGroup, LiftError};
use crate::oracle::ConcreteAction;
use crate::rotation::{axis_angle_of, close_group, normalize, perpendicular_basis, Rotation, Vec3, DEFAULT_GROUP_CAP};
use crate::subgroup::{g_class_of, ConcreteSubgroup};
use crate::tag::{ClassTag, DEFAULT_N_CAP};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IoError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {message}")]
    Validation { path: String, message: String },
}

impl IoError {
    pub fn code(&self) -> &'static str {
        match self {
            IoError::Schema { .. } => "schema_error",
            IoError::Validation { .. } => "validation_error",
        }
    }

    pub fn path(&self) -> &str {
        match self {
            IoError::Schema { path, .. } | IoError::Validation { path, .. } => path,
        }
    }

    fn schema(path: impl Into<String>, message: impl Into<String>) -> IoError {
        IoError::Schema { path: path.into(), message: message.into() }
    }

    fn validation(path: impl Into<String>, message: impl Into<String>) -> IoError {
        IoError::Validation { path: path.into(), message: message.into() }
    }
}

/// Machine-readable error record `{"error":{"code","path","message"}}`.
pub fn error_record(code: &str, path: &str, message: &str) -> String {
    json!({"error": {"code": code, "path": path, "message": message}}).to_string()
}

/// Size limits applied while parsing.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub n_cap: u32,
    pub group_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { n_cap: DEFAULT_N_CAP, group_cap: DEFAULT_GROUP_CAP }
    }
}

/// Rounds to 12 significant digits and clears negative zero.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return 0.0;
    }
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn vec_json(v: Vec3) -> Value {
    let c = |x: f64| if x.abs() < 1e-12 { 0.0 } else { round_sig(x) };
    json!([c(v[0]), c(v[1]), c(v[2])])
}

/// `{"axis":[x,y,z],"angle_deg":a}`; the identity is written as a zero turn about z.
pub fn rotation_json(r: &Rotation) -> Value {
    match axis_angle_of(r).axis_angle() {
        None => json!({"axis": vec_json([0.0, 0.0, 1.0]), "angle_deg": 0.0}),
        Some(aa) => json!({"axis": vec_json(aa.axis), "angle_deg": round_sig(aa.angle.to_degrees())}),
    }
}

pub fn subgroup_json(s: &ConcreteSubgroup) -> Value {
    let class = g_class_of(s).ok();
    match s {
        ConcreteSubgroup::Finite(f) => json!({
            "type": "finite",
            "class": class,
            "order": f.order(),
            "elements": f.elements().iter().skip(1).map(rotation_json).collect::<Vec<_>>(),
        }),
        ConcreteSubgroup::Circle { axis } => json!({"type": "circle", "class": class, "axis": vec_json(*axis)}),
        ConcreteSubgroup::OrthCircle { axis, flip_phase } => {
            let (e1, e2) = perpendicular_basis(*axis);
            let (s, c) = flip_phase.sin_cos();
            let flip = [c * e1[0] + s * e2[0], c * e1[1] + s * e2[1], c * e1[2] + s * e2[2]];
            json!({"type": "orth_circle", "class": class, "axis": vec_json(*axis), "flip_axis": vec_json(flip)})
        }
        ConcreteSubgroup::Full => json!({"type": "full", "class": class}),
    }
}

pub fn lattice_json(l: &IsotropyLattice) -> Value {
    l.to_json_value()
}

/// One generator record as written in the input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorRecord {
    pub axis: Vec3,
    pub angle_deg: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupSpec {
    So3,
    Circle,
    Finite(Vec<GeneratorRecord>),
}

/// A validated problem file.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub group: GroupSpec,
    pub ambient: AmbientGroup,
    pub base_lattice: Vec<ClassTag>,
    pub declared_order: Option<Vec<(usize, usize)>>,
    pub action: Option<ConcreteAction>,
    lattice: IsotropyLattice,
}

impl PartialEq for ProblemSpec {
    fn eq(&self, other: &ProblemSpec) -> bool {
        self.group == other.group
            && self.base_lattice == other.base_lattice
            && self.declared_order == other.declared_order
            && self.action == other.action
    }
}

impl ProblemSpec {
    /// The base lattice, validated.
    pub fn lattice(&self) -> &IsotropyLattice {
        &self.lattice
    }

    pub fn to_json_value(&self) -> Value {
        let mut group = Map::new();
        match &self.group {
            GroupSpec::So3 => {
                group.insert("kind".into(), json!("SO3"));
            }
            GroupSpec::Circle => {
                group.insert("kind".into(), json!("circle"));
            }
            GroupSpec::Finite(gens) => {
                group.insert("kind".into(), json!("finite"));
                group.insert(
                    "generators".into(),
                    gens.iter().map(|g| json!({"axis": g.axis, "angle_deg": g.angle_deg})).collect(),
                );
            }
        }
        let mut out = Map::new();
        out.insert("group".into(), Value::Object(group));
        out.insert("base_lattice".into(), serde_json::to_value(&self.base_lattice).expect("tags serialize"));
        if let Some(order) = &self.declared_order {
            out.insert("order".into(), order.iter().map(|&(i, j)| json!([i, j])).collect());
        }
        if let Some(action) = &self.action {
            out.insert("action".into(), json!(action.to_string()));
        }
        Value::Object(out)
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }
}

pub fn parse_spec(text: &str) -> Result<ProblemSpec, IoError> {
    parse_spec_with(text, &Limits::default())
}

pub fn parse_spec_with(text: &str, limits: &Limits) -> Result<ProblemSpec, IoError> {
    let root: Value = serde_json::from_str(text).map_err(|e| IoError::schema("$", format!("invalid JSON: {e}")))?;
    let obj = root.as_object().ok_or_else(|| IoError::schema("$", "expected an object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "group" | "base_lattice" | "order" | "action") {
            return Err(IoError::schema(format!("$.{key}"), "unknown field"));
        }
    }

    let group_value = obj.get("group").ok_or_else(|| IoError::schema("$.group", "missing field"))?;
    let (group, ambient) = parse_group(group_value, limits)?;

    let base_value = obj.get("base_lattice").ok_or_else(|| IoError::schema("$.base_lattice", "missing field"))?;
    let base_items = base_value.as_array().ok_or_else(|| IoError::schema("$.base_lattice", "expected an array"))?;
    let mut base_lattice = Vec::with_capacity(base_items.len());
    for (i, item) in base_items.iter().enumerate() {
        let path = format!("$.base_lattice[{i}]");
        let tag: ClassTag = serde_json::from_value(item.clone()).map_err(|e| IoError::schema(&path, e.to_string()))?;
        let tag = tag.check_cap(limits.n_cap).map_err(|e| IoError::validation(&path, e.to_string()))?;
        if base_lattice.contains(&tag) {
            return Err(IoError::validation(&path, format!("duplicate class {tag}")));
        }
        base_lattice.push(tag);
    }
    if base_lattice.is_empty() {
        return Err(IoError::validation("$.base_lattice", "the base lattice must contain at least one class"));
    }
    let lattice = build_lattice(base_lattice.iter().copied())
        .map_err(|e| IoError::validation("$.base_lattice", e.to_string()))?;
    check_realizable(&ambient, &lattice).map_err(|e| match e {
        LiftError::NotRealizableInG { class, .. } => {
            let i = base_lattice.iter().position(|t| *t == class).unwrap_or(0);
            IoError::validation(format!("$.base_lattice[{i}]"), e.to_string())
        }
        other => IoError::validation("$.group", other.to_string()),
    })?;

    let declared_order = match obj.get("order") {
        None | Some(Value::Null) => None,
        Some(v) => Some(parse_order(v, &base_lattice, &lattice)?),
    };

    let action = match obj.get("action") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => {
            Some(s.parse::<ConcreteAction>().map_err(|e| IoError::validation("$.action", e.to_string()))?)
        }
        Some(_) => return Err(IoError::schema("$.action", "expected a string")),
    };

    Ok(ProblemSpec { group, ambient, base_lattice, declared_order, action, lattice })
}

fn parse_group(value: &Value, limits: &Limits) -> Result<(GroupSpec, AmbientGroup), IoError> {
    let obj = value.as_object().ok_or_else(|| IoError::schema("$.group", "expected an object"))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| IoError::schema("$.group.kind", "expected a string"))?;
    match kind {
        "SO3" => Ok((GroupSpec::So3, AmbientGroup::So3)),
        "circle" => Ok((GroupSpec::Circle, AmbientGroup::Circle)),
        "finite" => {
            let gens = obj
                .get("generators")
                .and_then(Value::as_array)
                .ok_or_else(|| IoError::schema("$.group.generators", "expected an array"))?;
            let mut records = Vec::with_capacity(gens.len());
            let mut rotations = Vec::with_capacity(gens.len());
            for (i, g) in gens.iter().enumerate() {
                let path = format!("$.group.generators[{i}]");
                let record = parse_generator(g, &path)?;
                let axis = normalize(record.axis).ok_or_else(|| IoError::validation(format!("{path}.axis"), "zero axis"))?;
                rotations.push(Rotation::about(axis, record.angle_deg.to_radians()));
                records.push(record);
            }
            let group = close_group(&rotations, limits.group_cap)
                .map_err(|e| IoError::validation("$.group.generators", e.to_string()))?;
            let ambient = AmbientGroup::Finite(group);
            ambient.class().map_err(|e| IoError::validation("$.group.generators", e.to_string()))?;
            Ok((GroupSpec::Finite(records), ambient))
        }
        other => Err(IoError::schema("$.group.kind", format!("unknown group kind {other:?}"))),
    }
}

fn parse_generator(value: &Value, path: &str) -> Result<GeneratorRecord, IoError> {
    let axis_value = value
        .get("axis")
        .and_then(Value::as_array)
        .ok_or_else(|| IoError::schema(format!("{path}.axis"), "expected an array of three numbers"))?;
    let nums: Option<Vec<f64>> = axis_value.iter().map(Value::as_f64).collect();
    let axis = match nums.as_deref() {
        Some(&[x, y, z]) => [x, y, z],
        _ => return Err(IoError::schema(format!("{path}.axis"), "expected an array of three numbers")),
    };
    let angle_deg = value
        .get("angle_deg")
        .and_then(Value::as_f64)
        .ok_or_else(|| IoError::schema(format!("{path}.angle_deg"), "expected a number"))?;
    Ok(GeneratorRecord { axis, angle_deg })
}

fn parse_order(value: &Value, base: &[ClassTag], lattice: &IsotropyLattice) -> Result<Vec<(usize, usize)>, IoError> {
    let items = value.as_array().ok_or_else(|| IoError::schema("$.order", "expected an array of index pairs"))?;
    let mut pairs = Vec::with_capacity(items.len());
    for (k, item) in items.iter().enumerate() {
        let path = format!("$.order[{k}]");
        let idx: Option<Vec<u64>> = item.as_array().map(|a| a.iter().filter_map(Value::as_u64).collect());
        let (i, j) = match idx.as_deref() {
            Some(&[i, j]) if item.as_array().map(Vec::len) == Some(2) => (i as usize, j as usize),
            _ => return Err(IoError::schema(&path, "expected a pair of indices")),
        };
        if i >= base.len() || j >= base.len() {
            return Err(IoError::validation(&path, "index out of range"));
        }
        pairs.push((i, j));
    }
    let as_tags: Vec<(ClassTag, ClassTag)> = pairs.iter().map(|&(i, j)| (base[i], base[j])).collect();
    lattice
        .check_declared_order(&as_tags)
        .map_err(|e| IoError::validation("$.order", e.to_string()))?;
    Ok(pairs)
}
