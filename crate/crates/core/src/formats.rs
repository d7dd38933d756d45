//! JSON encodings. Readers accept exactly the documented keys and reject
//! anything else; writers emit keys in sorted order.
//!
//! | value | shape |
//! |---|---|
//! | rack | `{"size": n, "table": [[a^b]]}` |
//! | group | `{"size": n, "mult": [[a·b]]}` |
//! | module | `{"rack", "flavor", "groups", "phi": {"x,y": M}, "psi": {"y,x": M}}` or `{"kind": …}` |
//! | factor set | `{"module": ref, "sigma": {"x,y": coords}}` |
//! | section | `{"s": {"x": coords}}` |
//! | dynamical cocycle | `{"rack": ref, "s_size": k, "alpha": {"x,y": [[α(s,t)]]}}` |
//!
//! A rack or module reference is either an inline object, a path to a JSON
//! file (relative to the referring file), or `"catalog:NAME"`.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::abelian::AbelianError;
use crate::catalog;
use crate::ext_group::{BruteForceOrders, ExtResult};
use crate::extension::{DynamicalCocycle, ExtensionError, FactorSet};
use crate::rack::{FinGroup, FinRack, RackError};
use crate::rack_module::{Flavor, ModuleError, RackModule};
use crate::{AbGroup, Element, Hom, Int, Matrix};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Rack(#[from] RackError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

fn schema<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Schema(msg.into()))
}

/// Reads and parses a JSON file.
pub fn read_json(path: &Path) -> Result<Value, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn object<'a>(v: &'a Value, what: &str, required: &[&str], optional: &[&str]) -> Result<&'a Map<String, Value>, FormatError> {
    let Some(obj) = v.as_object() else {
        return schema(format!("{what}: expected an object"));
    };
    for k in obj.keys() {
        if !required.contains(&k.as_str()) && !optional.contains(&k.as_str()) {
            return schema(format!("{what}: unexpected key {k:?}"));
        }
    }
    for k in required {
        if !obj.contains_key(*k) {
            return schema(format!("{what}: missing key {k:?}"));
        }
    }
    Ok(obj)
}

fn index(v: &Value, what: &str) -> Result<usize, FormatError> {
    match v.as_u64().and_then(|u| usize::try_from(u).ok()) {
        Some(u) => Ok(u),
        None => schema(format!("{what}: expected a non-negative integer, found {v}")),
    }
}

fn int(v: &Value, what: &str) -> Result<Int, FormatError> {
    if let Some(i) = v.as_i64() {
        return Ok(Int::from(i));
    }
    if let Some(u) = v.as_u64() {
        return Ok(Int::from(u));
    }
    if let Some(s) = v.as_str() {
        if let Ok(i) = s.parse::<BigInt>() {
            return Ok(i);
        }
    }
    schema(format!("{what}: expected an integer, found {v}"))
}

/// Integers as JSON numbers when they fit in `i64`, otherwise as decimal strings.
pub fn int_json(i: &Int) -> Value {
    match i.to_i64() {
        Some(v) => json!(v),
        None => json!(i.to_string()),
    }
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, FormatError> {
    match v.as_array() {
        Some(a) => Ok(a),
        None => schema(format!("{what}: expected an array")),
    }
}

fn index_table(v: &Value, what: &str) -> Result<Vec<Vec<usize>>, FormatError> {
    array(v, what)?.iter().map(|row| array(row, what)?.iter().map(|e| index(e, what)).collect()).collect()
}

fn ints(v: &Value, what: &str) -> Result<Vec<Int>, FormatError> {
    array(v, what)?.iter().map(|e| int(e, what)).collect()
}

fn ints_json(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

fn matrix(v: &Value, rows: usize, cols: usize, what: &str) -> Result<Matrix, FormatError> {
    let data: Vec<Vec<Int>> = array(v, what)?.iter().map(|r| ints(r, what)).collect::<Result<_, _>>()?;
    if data.len() != rows || data.iter().any(|r| r.len() != cols) {
        return schema(format!("{what}: expected a {rows}x{cols} matrix"));
    }
    Ok(Matrix::from_rows(data, cols)?)
}

fn matrix_json(m: &Matrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| ints_json(r)).collect())
}

fn pair_key(a: usize, b: usize) -> String {
    format!("{a},{b}")
}

/// Entries of a `{"a,b": …}` map; every pair must be present exactly once.
fn pair_map<'a>(v: &'a Value, n: usize, what: &str) -> Result<HashMap<(usize, usize), &'a Value>, FormatError> {
    let Some(obj) = v.as_object() else {
        return schema(format!("{what}: expected an object keyed by \"a,b\""));
    };
    let mut out = HashMap::new();
    for (k, val) in obj {
        let parts: Vec<&str> = k.split(',').collect();
        let parsed = match parts.as_slice() {
            [a, b] => a.trim().parse::<usize>().ok().zip(b.trim().parse::<usize>().ok()),
            _ => None,
        };
        match parsed {
            Some((a, b)) if a < n && b < n && pair_key(a, b) == *k => {
                out.insert((a, b), val);
            }
            _ => return schema(format!("{what}: bad key {k:?}")),
        }
    }
    for a in 0..n {
        for b in 0..n {
            if !out.contains_key(&(a, b)) {
                return schema(format!("{what}: missing key \"{a},{b}\""));
            }
        }
    }
    Ok(out)
}

fn element_map<'a>(v: &'a Value, n: usize, what: &str) -> Result<Vec<&'a Value>, FormatError> {
    let Some(obj) = v.as_object() else {
        return schema(format!("{what}: expected an object keyed by element"));
    };
    let mut out = vec![None; n];
    for (k, val) in obj {
        match k.parse::<usize>() {
            Ok(x) if x < n && x.to_string() == *k => out[x] = Some(val),
            _ => return schema(format!("{what}: bad key {k:?}")),
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(x, v)| v.map_or_else(|| schema(format!("{what}: missing key \"{x}\"")), Ok))
        .collect()
}

fn coords(v: &Value, g: &AbGroup, what: &str) -> Result<Element, FormatError> {
    let c = ints(v, what)?;
    if c.len() != g.rank() {
        return schema(format!("{what}: expected {} coordinates", g.rank()));
    }
    Ok(g.reduce(c))
}

/// Resolves a reference against `base_dir`: inline value, file path, or `catalog:NAME`.
enum Reference {
    Inline(Value, Option<PathBuf>),
    Catalog(String),
}

fn resolve(v: &Value, base_dir: Option<&Path>) -> Result<Reference, FormatError> {
    match v {
        Value::String(s) => {
            if let Some(name) = s.strip_prefix("catalog:") {
                return Ok(Reference::Catalog(name.to_string()));
            }
            let path = match base_dir {
                Some(d) => d.join(s),
                None => PathBuf::from(s),
            };
            let value = read_json(&path)?;
            Ok(Reference::Inline(value, path.parent().map(Path::to_path_buf)))
        }
        Value::Object(_) => Ok(Reference::Inline(v.clone(), base_dir.map(Path::to_path_buf))),
        _ => schema("reference must be an object, a file path or \"catalog:NAME\""),
    }
}

pub fn rack_from_json(v: &Value) -> Result<FinRack, FormatError> {
    let obj = object(v, "rack", &["size", "table"], &[])?;
    let n = index(&obj["size"], "rack.size")?;
    let table = index_table(&obj["table"], "rack.table")?;
    if table.len() != n {
        return schema(format!("rack.table has {} rows for size {n}", table.len()));
    }
    Ok(FinRack::from_table(&table)?)
}

pub fn rack_to_json(r: &FinRack) -> Value {
    json!({ "size": r.size(), "table": r.table() })
}

pub fn rack_ref(v: &Value, base_dir: Option<&Path>) -> Result<FinRack, FormatError> {
    match resolve(v, base_dir)? {
        Reference::Inline(v, _) => rack_from_json(&v),
        Reference::Catalog(name) => catalog::rack(&name).map_or_else(|| schema(format!("no catalog rack {name:?}")), Ok),
    }
}

pub fn group_from_json(v: &Value) -> Result<FinGroup, FormatError> {
    let obj = object(v, "group", &["size", "mult"], &[])?;
    let n = index(&obj["size"], "group.size")?;
    let mult = index_table(&obj["mult"], "group.mult")?;
    if mult.len() != n {
        return schema(format!("group.mult has {} rows for size {n}", mult.len()));
    }
    Ok(FinGroup::from_table(&mult)?)
}

pub fn group_to_json(g: &FinGroup) -> Value {
    json!({ "size": g.size(), "mult": g.table() })
}

fn flavor(v: &Value) -> Result<Flavor, FormatError> {
    match v.as_str() {
        Some("rack") => Ok(Flavor::Rack),
        Some("quandle") => Ok(Flavor::Quandle),
        _ => schema(format!("flavor must be \"rack\" or \"quandle\", found {v}")),
    }
}

fn abgroup(v: &Value, what: &str) -> Result<AbGroup, FormatError> {
    Ok(AbGroup::new(ints(v, what)?)?)
}

/// Module from JSON, explicit or by `"kind"` shorthand:
///
/// * `{"kind": "trivial", "rack", "group": [moduli]}`
/// * `{"kind": "dihedral", "rack", "moduli": [per orbit]}`
/// * `{"kind": "alexander", "rack", "orbits": [{"n": n, "h": [h_0, h_1, …]}]}`
/// * `{"kind": "asx", "rack", "group": [moduli], "action": [M_x], "quandle_variant": bool}`
///
/// Every shorthand also takes an optional `"flavor"`.
pub fn module_from_json(v: &Value, base_dir: Option<&Path>) -> Result<RackModule, FormatError> {
    if v.get("kind").is_some() {
        return module_shorthand(v, base_dir);
    }
    let obj = object(v, "module", &["rack", "flavor", "groups", "phi", "psi"], &[])?;
    let base = rack_ref(&obj["rack"], base_dir)?;
    let n = base.size();
    let fl = flavor(&obj["flavor"])?;
    let groups: Vec<AbGroup> =
        array(&obj["groups"], "module.groups")?.iter().map(|g| abgroup(g, "module.groups")).collect::<Result<_, _>>()?;
    if groups.len() != n {
        return schema(format!("module.groups has {} entries for {n} elements", groups.len()));
    }
    let phi_raw = pair_map(&obj["phi"], n, "module.phi")?;
    let psi_raw = pair_map(&obj["psi"], n, "module.psi")?;
    let mut phi = HashMap::new();
    let mut psi = HashMap::new();
    for x in 0..n {
        for y in 0..n {
            let target = groups[base.op(x, y)].rank();
            let what = format!("module.phi[\"{x},{y}\"]");
            phi.insert((x, y), matrix(phi_raw[&(x, y)], target, groups[x].rank(), &what)?);
            let what = format!("module.psi[\"{y},{x}\"]");
            psi.insert((y, x), matrix(psi_raw[&(y, x)], target, groups[y].rank(), &what)?);
        }
    }
    Ok(RackModule::from_matrices(base, fl, groups, |x, y| phi[&(x, y)].clone(), |y, x| psi[&(y, x)].clone())?)
}

fn module_shorthand(v: &Value, base_dir: Option<&Path>) -> Result<RackModule, FormatError> {
    let kind = v["kind"].as_str().unwrap_or_default();
    let (required, optional): (&[&str], &[&str]) = match kind {
        "trivial" => (&["kind", "rack", "group"], &["flavor"]),
        "dihedral" => (&["kind", "rack", "moduli"], &["flavor"]),
        "alexander" => (&["kind", "rack", "orbits"], &["flavor"]),
        "asx" => (&["kind", "rack", "group", "action"], &["flavor", "quandle_variant"]),
        _ => return schema(format!("module.kind must be trivial, dihedral, alexander or asx, found {}", v["kind"])),
    };
    let obj = object(v, "module", required, optional)?;
    let base = rack_ref(&obj["rack"], base_dir)?;
    let m = match kind {
        "trivial" => RackModule::trivial(&base, &abgroup(&obj["group"], "module.group")?),
        "dihedral" => RackModule::dihedral(&base, &ints(&obj["moduli"], "module.moduli")?)?,
        "alexander" => {
            let data = array(&obj["orbits"], "module.orbits")?
                .iter()
                .map(|o| {
                    let o = object(o, "module.orbits[]", &["n", "h"], &[])?;
                    Ok((int(&o["n"], "module.orbits[].n")?, ints(&o["h"], "module.orbits[].h")?))
                })
                .collect::<Result<Vec<_>, FormatError>>()?;
            RackModule::alexander(&base, &data)?
        }
        _ => {
            let g = abgroup(&obj["group"], "module.group")?;
            let action = array(&obj["action"], "module.action")?
                .iter()
                .map(|a| Ok(Hom::new(g.clone(), g.clone(), matrix(a, g.rank(), g.rank(), "module.action[]")?)?))
                .collect::<Result<Vec<_>, FormatError>>()?;
            let variant = match obj.get("quandle_variant") {
                None => false,
                Some(b) => b.as_bool().map_or_else(|| schema("module.quandle_variant must be a boolean"), Ok)?,
            };
            RackModule::asx(&base, &g, &action, variant)?
        }
    };
    match obj.get("flavor") {
        Some(f) => Ok(m.with_flavor(flavor(f)?)?),
        None => Ok(m),
    }
}

pub fn module_ref(v: &Value, base_dir: Option<&Path>) -> Result<RackModule, FormatError> {
    match resolve(v, base_dir)? {
        Reference::Inline(v, dir) => module_from_json(&v, dir.as_deref()),
        Reference::Catalog(name) => {
            catalog::module(&name).map_or_else(|| schema(format!("no catalog module {name:?}")), |c| Ok(c.module))
        }
    }
}

/// Explicit encoding with the base rack inline.
pub fn module_to_json(m: &RackModule) -> Value {
    let r = m.base();
    let n = r.size();
    let mut phi = Map::new();
    let mut psi = Map::new();
    for x in 0..n {
        for y in 0..n {
            phi.insert(pair_key(x, y), matrix_json(m.phi(x, y).matrix()));
            psi.insert(pair_key(y, x), matrix_json(m.psi(y, x).matrix()));
        }
    }
    json!({
        "rack": rack_to_json(r),
        "flavor": m.flavor().to_string(),
        "groups": m.groups().iter().map(|g| ints_json(g.moduli())).collect::<Vec<_>>(),
        "phi": phi,
        "psi": psi,
    })
}

/// Factor set over `m`. The `"module"` entry must be present; when it
/// resolves to a module it must equal `m`.
pub fn factor_set_from_json(m: &RackModule, v: &Value, base_dir: Option<&Path>) -> Result<FactorSet, FormatError> {
    let obj = object(v, "factor set", &["module", "sigma"], &[])?;
    if !obj["module"].is_null() && module_ref(&obj["module"], base_dir)? != *m {
        return schema("factor set refers to a different module");
    }
    let r = m.base();
    let raw = pair_map(&obj["sigma"], r.size(), "sigma")?;
    let n = r.size();
    let values = (0..n * n)
        .map(|p| {
            let (x, y) = (p / n, p % n);
            coords(raw[&(x, y)], m.group(r.op(x, y)), &format!("sigma[\"{x},{y}\"]"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FactorSet::new(m, values)?)
}

pub fn factor_set_to_json(s: &FactorSet, module: &Value) -> Value {
    let n = s.size();
    let sigma: Map<String, Value> =
        (0..n * n).map(|p| (pair_key(p / n, p % n), ints_json(s.get(p / n, p % n)))).collect();
    json!({ "module": module, "sigma": sigma })
}

/// `υ_x ∈ A_x` for every element.
pub fn section_from_json(m: &RackModule, v: &Value) -> Result<Vec<Element>, FormatError> {
    let obj = object(v, "section", &["s"], &[])?;
    element_map(&obj["s"], m.base().size(), "section.s")?
        .into_iter()
        .enumerate()
        .map(|(x, val)| coords(val, m.group(x), &format!("section.s[\"{x}\"]")))
        .collect()
}

pub fn section_to_json(upsilon: &[Element]) -> Value {
    let s: Map<String, Value> = upsilon.iter().enumerate().map(|(x, u)| (x.to_string(), ints_json(u))).collect();
    json!({ "s": s })
}

pub fn dynamical_from_json(v: &Value, base_dir: Option<&Path>) -> Result<DynamicalCocycle, FormatError> {
    let obj = object(v, "dynamical cocycle", &["rack", "s_size", "alpha"], &[])?;
    let base = rack_ref(&obj["rack"], base_dir)?;
    let n = base.size();
    let k = index(&obj["s_size"], "s_size")?;
    let raw = pair_map(&obj["alpha"], n, "alpha")?;
    let alpha = (0..n * n)
        .map(|p| index_table(raw[&(p / n, p % n)], &format!("alpha[\"{},{}\"]", p / n, p % n)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DynamicalCocycle::new(&base, k, &alpha)?)
}

fn order_json(o: &Option<Int>) -> Value {
    o.as_ref().map_or(Value::Null, int_json)
}

/// `orders` entries are `null` when the group is infinite.
pub fn ext_result_to_json(e: &ExtResult, module: &Value) -> Value {
    json!({
        "flavor": e.flavor.to_string(),
        "free_rank": e.free_rank,
        "torsion": ints_json(&e.torsion),
        "orders": { "Z": order_json(&e.z_order), "B": order_json(&e.b_order), "Ext": order_json(&e.ext_order) },
        "representatives": e.representatives.iter().map(|s| factor_set_to_json(s, module)).collect::<Vec<_>>(),
    })
}

pub fn brute_force_to_json(b: &BruteForceOrders) -> Value {
    json!({ "Z": b.z, "B": b.b, "Ext": b.ext })
}

pub fn orbits_json(r: &FinRack) -> Value {
    json!(r.orbits())
}

/// Sorted-key map from `(key, value)` pairs.
pub fn sorted(entries: impl IntoIterator<Item = (String, Value)>) -> Value {
    Value::Object(entries.into_iter().collect::<BTreeMap<_, _>>().into_iter().collect())
}
