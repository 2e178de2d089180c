//! JSON reading and writing for function sets, instances and gadgets.
//!
//! Domain values are 1-based on the outside. Function indices (`"f"`,
//! gadget signatures) and gadget edge ids are 0-based. Scalars are exact
//! strings such as `"3/7"` or `"1/2+2/3i"`.

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::csp::{CFSet, Constraint, LabeledInstance};
use crate::error::{Error, Result};
use crate::holant::{Gadget, Signature, Vertex};
use crate::perm::Permutation;
use crate::scalar::Scalar;
use crate::tensor::ConstraintFunction;

fn err(path: &str, message: impl Into<String>) -> Error {
    Error::Json { path: path.to_string(), message: message.into() }
}

/// Parses JSON text, reporting syntax errors by line and column.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| err(&format!("line {}, column {}", e.line(), e.column()), e.to_string()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn field<'a>(obj: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    obj.as_object()
        .ok_or_else(|| err(path, "expected an object"))?
        .get(key)
        .ok_or_else(|| err(path, format!("missing field {key:?}")))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| err(path, "expected a non-negative integer"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

fn as_scalar(v: &Value, path: &str) -> Result<Scalar> {
    match v {
        Value::String(s) => s.parse().map_err(|e: Error| err(path, e.to_string())),
        Value::Number(n) if n.is_i64() => Ok(Scalar::from_int(n.as_i64().expect("checked"))),
        _ => Err(err(path, "expected a scalar string such as \"3/7\"")),
    }
}

fn usize_list(v: &Value, path: &str) -> Result<Vec<usize>> {
    as_array(v, path)?.iter().enumerate().map(|(i, x)| as_usize(x, &format!("{path}[{i}]"))).collect()
}

fn function_at(v: &Value, path: &str) -> Result<ConstraintFunction> {
    let q = as_usize(field(v, "q", path)?, &format!("{path}.q"))?;
    let arity = as_usize(field(v, "arity", path)?, &format!("{path}.arity"))?;
    let entries_path = format!("{path}.entries");
    let entries = as_array(field(v, "entries", path)?, &entries_path)?
        .iter()
        .enumerate()
        .map(|(i, x)| as_scalar(x, &format!("{entries_path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    ConstraintFunction::new(q, arity, entries).map_err(|e| err(path, e.to_string()))
}

/// `{"q", "arity", "entries"}`.
pub fn parse_function_str(text: &str) -> Result<ConstraintFunction> {
    function_at(&parse_json(text)?, "$")
}

/// `{"q"?, "functions": [..], "weights"?: [..]}`, a bare array of functions,
/// or a single function object.
pub fn parse_function_set_str(text: &str) -> Result<CFSet> {
    set_at(&parse_json(text)?, "$")
}

fn set_at(v: &Value, path: &str) -> Result<CFSet> {
    let (list, list_path) = match v {
        Value::Array(_) => (v, path.to_string()),
        Value::Object(o) if o.contains_key("entries") => {
            let f = function_at(v, path)?;
            return CFSet::unweighted(vec![f]).map_err(|e| err(path, e.to_string()));
        }
        _ => (field(v, "functions", path)?, format!("{path}.functions")),
    };
    let functions = as_array(list, &list_path)?
        .iter()
        .enumerate()
        .map(|(i, f)| function_at(f, &format!("{list_path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let declared = match v.get("q") {
        Some(q) => Some(as_usize(q, &format!("{path}.q"))?),
        None => None,
    };
    let q = match (declared, functions.first()) {
        (Some(q), _) => q,
        (None, Some(f)) => f.q(),
        (None, None) => return Err(err(path, "an empty function list needs \"q\"")),
    };
    for (i, f) in functions.iter().enumerate() {
        if f.q() != q {
            return Err(err(&format!("{list_path}[{i}].q"), format!("domain size {} differs from {q}", f.q())));
        }
    }
    let weights = match v.get("weights") {
        None | Some(Value::Null) => None,
        Some(w) => {
            let wp = format!("{path}.weights");
            let list = as_array(w, &wp)?
                .iter()
                .enumerate()
                .map(|(i, x)| as_scalar(x, &format!("{wp}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            if list.len() != q {
                return Err(err(&wp, format!("expected {q} weights, found {}", list.len())));
            }
            if let Some(i) = list.iter().position(Scalar::is_zero) {
                return Err(err(&format!("{wp}[{i}]"), "domain weights must be nonzero"));
            }
            Some(list)
        }
    };
    CFSet::new(q, functions, weights).map_err(|e| err(path, e.to_string()))
}

/// `{"k", "variables", "labels", "constraints": [{"f", "vars"}]}`. With a
/// set at hand, function indices and tuple lengths are checked too.
pub fn parse_instance_str(text: &str, set: Option<&CFSet>) -> Result<LabeledInstance> {
    let v = parse_json(text)?;
    let names: Vec<String> = as_array(field(&v, "variables", "$")?, "$.variables")?
        .iter()
        .enumerate()
        .map(|(i, x)| x.as_str().map(str::to_string).ok_or_else(|| err(&format!("$.variables[{i}]"), "expected a name")))
        .collect::<Result<_>>()?;
    let index_of = |name: &Value, path: &str| -> Result<usize> {
        let s = name.as_str().ok_or_else(|| err(path, "expected a variable name"))?;
        names.iter().position(|n| n == s).ok_or_else(|| err(path, format!("unknown variable {s:?}")))
    };
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(err(&format!("$.variables[{i}]"), format!("variable {n:?} is listed twice")));
        }
    }
    let mut labels = vec![];
    for (i, x) in as_array(field(&v, "labels", "$")?, "$.labels")?.iter().enumerate() {
        let p = format!("$.labels[{i}]");
        let u = index_of(x, &p)?;
        if labels.contains(&u) {
            return Err(err(&p, format!("variable {:?} cannot be labeled more than once", names[u])));
        }
        labels.push(u);
    }
    if let Some(k) = v.get("k") {
        let k = as_usize(k, "$.k")?;
        if k != labels.len() {
            return Err(err("$.k", format!("k = {k} but {} labels are listed", labels.len())));
        }
    }
    let mut constraints = vec![];
    for (i, c) in as_array(field(&v, "constraints", "$")?, "$.constraints")?.iter().enumerate() {
        let p = format!("$.constraints[{i}]");
        let f = as_usize(field(c, "f", &p)?, &format!("{p}.f"))?;
        let vars = as_array(field(c, "vars", &p)?, &format!("{p}.vars"))?
            .iter()
            .enumerate()
            .map(|(h, x)| index_of(x, &format!("{p}.vars[{h}]")))
            .collect::<Result<Vec<_>>>()?;
        if let Some(set) = set {
            if f >= set.len() {
                return Err(err(&format!("{p}.f"), format!("function {f} does not exist; the set has {}", set.len())));
            }
            let arity = set.function(f).arity();
            if vars.len() != arity {
                return Err(err(&format!("{p}.vars"), format!("{} variables for a function of arity {arity}", vars.len())));
            }
        }
        constraints.push(Constraint::new(f, vars));
    }
    LabeledInstance::new(names, constraints, labels).map_err(|e| err("$", e.to_string()))
}

/// `{"q", "functions", "vertices": [{"signature": "eq" | index, "edges"}],
/// "edges", "outputs", "inputs"}`.
pub fn parse_gadget_str(text: &str) -> Result<Gadget> {
    let v = parse_json(text)?;
    let q = as_usize(field(&v, "q", "$")?, "$.q")?;
    let functions = match v.get("functions") {
        None => vec![],
        Some(list) => as_array(list, "$.functions")?
            .iter()
            .enumerate()
            .map(|(i, f)| function_at(f, &format!("$.functions[{i}]")))
            .collect::<Result<Vec<_>>>()?,
    };
    let edges = as_usize(field(&v, "edges", "$")?, "$.edges")?;
    let mut vertices = vec![];
    for (i, x) in as_array(field(&v, "vertices", "$")?, "$.vertices")?.iter().enumerate() {
        let p = format!("$.vertices[{i}]");
        let sp = format!("{p}.signature");
        let signature = match field(x, "signature", &p)? {
            Value::String(s) if s == "eq" => Signature::Eq,
            other => {
                let j = as_usize(other, &sp).map_err(|_| err(&sp, "expected \"eq\" or a function index"))?;
                let f = functions.get(j).ok_or_else(|| err(&sp, format!("function {j} does not exist")))?;
                let es = usize_list(field(x, "edges", &p)?, &format!("{p}.edges"))?;
                if es.len() != f.arity() {
                    return Err(err(&format!("{p}.edges"), format!("{} edges for a function of arity {}", es.len(), f.arity())));
                }
                vertices.push(Vertex::func(j, es));
                continue;
            }
        };
        vertices.push(Vertex { signature, edges: usize_list(field(x, "edges", &p)?, &format!("{p}.edges"))? });
    }
    let outputs = usize_list(field(&v, "outputs", "$")?, "$.outputs")?;
    let inputs = usize_list(field(&v, "inputs", "$")?, "$.inputs")?;
    Gadget::new(q, functions, vertices, edges, outputs, inputs).map_err(|e| err("$", e.to_string()))
}

pub fn parse_function_set(path: &Path) -> Result<CFSet> {
    parse_function_set_str(&read(path)?)
}

pub fn parse_instance(path: &Path, set: Option<&CFSet>) -> Result<LabeledInstance> {
    parse_instance_str(&read(path)?, set)
}

pub fn parse_gadget(path: &Path) -> Result<Gadget> {
    parse_gadget_str(&read(path)?)
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    Value::String(s.to_string())
}

pub fn function_to_json(f: &ConstraintFunction) -> Value {
    json!({"q": f.q(), "arity": f.arity(), "entries": f.entries().iter().map(scalar_to_json).collect::<Vec<_>>()})
}

pub fn function_set_to_json(set: &CFSet) -> Value {
    let mut obj = Map::new();
    obj.insert("q".into(), json!(set.q()));
    obj.insert("functions".into(), Value::Array(set.functions().iter().map(function_to_json).collect()));
    if let Some(w) = set.weights() {
        obj.insert("weights".into(), Value::Array(w.iter().map(scalar_to_json).collect()));
    }
    Value::Object(obj)
}

pub fn instance_to_json(inst: &LabeledInstance) -> Value {
    let names = inst.names();
    json!({
        "k": inst.k(),
        "variables": names,
        "labels": inst.labels().iter().map(|&v| names[v].clone()).collect::<Vec<_>>(),
        "constraints": inst.constraints().iter().map(|c| json!({
            "f": c.function,
            "vars": c.vars.iter().map(|&v| names[v].clone()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn gadget_to_json(g: &Gadget) -> Value {
    json!({
        "q": g.q(),
        "functions": g.functions().iter().map(function_to_json).collect::<Vec<_>>(),
        "vertices": g.vertices().iter().map(|v| json!({
            "signature": match v.signature { Signature::Eq => json!("eq"), Signature::Fn(j) => json!(j) },
            "edges": v.edges,
        })).collect::<Vec<_>>(),
        "edges": g.edge_count(),
        "outputs": g.outputs(),
        "inputs": g.inputs(),
    })
}

/// Parses `"1=2,2=1"` (label = value, both 1-based) into a 0-based pin map
/// for all `k` labels.
pub fn parse_pins(text: &str, k: usize, q: usize) -> Result<Vec<usize>> {
    let mut pins = vec![None; k];
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || Error::Parse(format!("malformed pin {part:?}; expected label=value"));
        let (a, b) = part.split_once('=').ok_or_else(bad)?;
        let label: usize = a.trim().parse().map_err(|_| bad())?;
        let value: usize = b.trim().parse().map_err(|_| bad())?;
        if label == 0 || label > k {
            return Err(Error::Parse(format!("label {label} out of range 1..={k}")));
        }
        if value == 0 || value > q {
            return Err(Error::DomainOutOfRange { value, q });
        }
        if pins[label - 1].replace(value - 1).is_some() {
            return Err(Error::Parse(format!("label {label} pinned twice")));
        }
    }
    pins.iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| Error::Parse(format!("label {} is not pinned", i + 1))))
        .collect()
}

/// One-line form with 1-based images, e.g. `[2, 1, 3]`.
pub fn permutation_one_line(sigma: &Permutation) -> String {
    let images: Vec<String> = sigma.images().iter().map(|i| (i + 1).to_string()).collect();
    format!("[{}]", images.join(", "))
}

pub fn permutation_to_json(sigma: &Permutation) -> Value {
    json!({
        "images": sigma.images().iter().map(|i| i + 1).collect::<Vec<_>>(),
        "cycles": sigma.cycle_string(),
    })
}
