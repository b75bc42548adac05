//! JSON file formats for fans, divisors, pairs, curve instances, graded
//! semigroups and traces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::adjoint::{CurveAlgebraInstance, GradedSemigroup};
use crate::arith::{Rat, Scalar};
use crate::divisor::{Ghost, TDivisor, ToricPair};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::mmp::Trace;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn from_text(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn int(v: &Value) -> Result<i64> {
    match v {
        Value::Number(n) => n.as_i64().ok_or_else(|| parse_err(format!("not an integer: {n}"))),
        Value::String(s) => s.trim().parse().map_err(|_| parse_err(format!("not an integer: {s:?}"))),
        other => Err(parse_err(format!("expected an integer, got {other}"))),
    }
}

fn index(v: &Value) -> Result<usize> {
    usize::try_from(int(v)?).map_err(|_| parse_err("negative index"))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(format!("{what} must be an array")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| parse_err(format!("missing field {key:?}")))
}

pub fn scalar_from_json(v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => Scalar::parse(s),
        Value::Number(_) => Ok(Scalar::int(int(v)?)),
        Value::Object(o) => {
            let rat = |k: &str| -> Result<Rat> {
                match o.get(k) {
                    None => Ok(Rat::zero()),
                    Some(Value::String(s)) => s.parse(),
                    Some(x) => Ok(Rat::from_int(int(x)?)),
                }
            };
            let root = o.get("root").map(int).transpose()?.unwrap_or(1);
            let root = u32::try_from(root).map_err(|_| parse_err(format!("bad root {root}")))?;
            if !crate::arith::is_squarefree_root(root) {
                return Err(parse_err(format!("sqrt({root}) is not a square-free root")));
            }
            Ok(Scalar::quadratic(rat("a")?, rat("b")?, root))
        }
        other => Err(parse_err(format!("expected a scalar, got {other}"))),
    }
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    if s.is_rational() {
        Value::String(s.to_string())
    } else {
        json!({"a": s.rational_part().to_string(), "b": s.irrational_part().to_string(), "root": s.root()})
    }
}

fn check_roots<'a>(coeffs: impl IntoIterator<Item = &'a Scalar>) -> Result<()> {
    let mut root = None;
    for c in coeffs {
        if c.is_rational() {
            continue;
        }
        match root {
            None => root = Some(c.root()),
            Some(r) if r != c.root() => {
                return Err(parse_err(format!("coefficients mix sqrt({r}) and sqrt({})", c.root())))
            }
            _ => {}
        }
    }
    Ok(())
}

// fan

pub fn fan_to_json(fan: &Fan) -> Value {
    let s = |v: &[i64]| -> Vec<String> { v.iter().map(|x| x.to_string()).collect() };
    json!({
        "rank": fan.rank(),
        "rays": fan.rays().iter().map(|r| s(r)).collect::<Vec<_>>(),
        "max_cones": fan.cones(),
    })
}

pub fn fan_from_json(v: &Value) -> Result<Fan> {
    let rank = index(field(v, "rank")?)?;
    let rays = array(field(v, "rays")?, "rays")?
        .iter()
        .map(|r| array(r, "ray")?.iter().map(int).collect::<Result<Vec<i64>>>())
        .collect::<Result<Vec<_>>>()?;
    let cones = array(field(v, "max_cones")?, "max_cones")?
        .iter()
        .map(|c| array(c, "cone")?.iter().map(index).collect::<Result<Vec<usize>>>())
        .collect::<Result<Vec<_>>>()?;
    Fan::new(rank, rays, cones)
}

pub fn read_fan(text: &str) -> Result<Fan> {
    fan_from_json(&from_text(text)?)
}

pub fn write_fan(fan: &Fan) -> String {
    pretty(&fan_to_json(fan))
}

// divisors

pub fn divisor_to_json(d: &TDivisor) -> Value {
    let mut coeffs = Map::new();
    for (i, c) in d.coeffs().iter().enumerate() {
        if !c.is_zero() {
            coeffs.insert(i.to_string(), scalar_to_json(c));
        }
    }
    json!({ "coeffs": coeffs })
}

/// Sparse divisor on `n` rays.
pub fn divisor_from_json(v: &Value, n: usize) -> Result<TDivisor> {
    let coeffs = field(v, "coeffs")?
        .as_object()
        .ok_or_else(|| parse_err("coeffs must be an object"))?;
    let mut d = TDivisor::zero(n);
    for (k, c) in coeffs {
        let i: usize = k.parse().map_err(|_| parse_err(format!("bad ray index {k:?}")))?;
        if i >= n {
            return Err(Error::Invalid(format!("ray index {i} out of range for {n} rays")));
        }
        d.set(i, scalar_from_json(c)?);
    }
    check_roots(d.coeffs())?;
    Ok(d)
}

pub fn read_divisor(text: &str, n: usize) -> Result<TDivisor> {
    divisor_from_json(&from_text(text)?, n)
}

pub fn write_divisor(d: &TDivisor) -> String {
    pretty(&divisor_to_json(d))
}

// pairs

pub fn pair_to_json(p: &ToricPair) -> Value {
    json!({
        "fan": fan_to_json(&p.fan),
        "boundary": divisor_to_json(&p.boundary),
        "ghosts": p.ghosts.iter().map(|g| json!({
            "class": divisor_to_json(&g.class),
            "weight": scalar_to_json(&g.weight),
        })).collect::<Vec<_>>(),
    })
}

pub fn pair_from_json(v: &Value) -> Result<ToricPair> {
    let fan = fan_from_json(field(v, "fan")?)?;
    let n = fan.num_rays();
    let boundary = match v.get("boundary") {
        Some(b) => divisor_from_json(b, n)?,
        None => TDivisor::zero(n),
    };
    let ghosts = match v.get("ghosts") {
        Some(g) => array(g, "ghosts")?
            .iter()
            .map(|g| {
                Ok(Ghost {
                    class: divisor_from_json(field(g, "class")?, n)?,
                    weight: scalar_from_json(field(g, "weight")?)?,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        None => vec![],
    };
    check_roots(
        boundary
            .coeffs()
            .iter()
            .chain(ghosts.iter().flat_map(|g| g.class.coeffs().iter().chain([&g.weight]))),
    )?;
    ToricPair::new(fan, boundary, ghosts)
}

/// A pair file, or a bare fan file read as the pair with zero boundary.
pub fn read_pair(text: &str) -> Result<ToricPair> {
    let v = from_text(text)?;
    if v.get("fan").is_some() {
        pair_from_json(&v)
    } else {
        Ok(ToricPair::plain(fan_from_json(&v)?))
    }
}

pub fn write_pair(p: &ToricPair) -> String {
    pretty(&pair_to_json(p))
}

// curve instances and semigroups

pub fn read_curve_instance(text: &str) -> Result<CurveAlgebraInstance> {
    let v = from_text(text)?;
    let m = array(field(&v, "m")?, "m")?.iter().map(int).collect::<Result<Vec<_>>>()?;
    let b = scalar_from_json(field(&v, "b")?)?;
    let d = v.get("d").map(scalar_from_json).transpose()?;
    CurveAlgebraInstance::new(m, b, d)
}

pub fn write_curve_instance(inst: &CurveAlgebraInstance) -> String {
    let mut v = json!({"m": inst.m, "b": scalar_to_json(&inst.b)});
    if let Some(d) = &inst.d {
        v["d"] = scalar_to_json(d);
    }
    pretty(&v)
}

/// `{"numerical": [..]}`, `{"cone": [u, v]}`, `{"irrational_slope": s}`
/// or `{"table": [[point, ..], ..]}`.
pub fn read_semigroup(text: &str) -> Result<GradedSemigroup> {
    let v = from_text(text)?;
    let alg = if let Some(g) = v.get("numerical") {
        GradedSemigroup::Numerical(
            array(g, "numerical")?
                .iter()
                .map(|x| index(x).map(|x| x as u64))
                .collect::<Result<_>>()?,
        )
    } else if let Some(c) = v.get("cone") {
        let c = array(c, "cone")?;
        if c.len() != 2 {
            return Err(parse_err("cone needs two rays"));
        }
        let ray = |r: &Value| -> Result<[i64; 2]> {
            let r = array(r, "ray")?;
            if r.len() != 2 {
                return Err(parse_err("cone rays are plane vectors"));
            }
            Ok([int(&r[0])?, int(&r[1])?])
        };
        GradedSemigroup::Cone { u: ray(&c[0])?, v: ray(&c[1])? }
    } else if let Some(s) = v.get("irrational_slope") {
        GradedSemigroup::IrrationalCone { slope: scalar_from_json(s)? }
    } else if let Some(t) = v.get("table") {
        let t = array(t, "table")?
            .iter()
            .map(|deg| {
                array(deg, "degree")?
                    .iter()
                    .map(|p| array(p, "point")?.iter().map(int).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        GradedSemigroup::table(t)
    } else {
        return Err(parse_err("unknown algebra file"));
    };
    alg.validate()?;
    Ok(alg)
}

// traces

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub kind: String,
    pub wall: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub removed_ray: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<String>,
    pub ray: Vec<usize>,
    pub action: ActionRecord,
    pub model_hash: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub steps: Vec<StepRecord>,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t_final: Option<String>,
    pub final_hash: String,
    /// Extra report fields, written in key order.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub extra: BTreeMap<String, String>,
}

impl TraceRecord {
    pub fn from_trace(trace: &Trace) -> TraceRecord {
        TraceRecord {
            steps: trace
                .steps
                .iter()
                .map(|s| StepRecord {
                    step: s.index,
                    t: s.t.as_ref().map(|t| t.to_string()),
                    ray: s.wall_rays.clone(),
                    action: ActionRecord {
                        kind: s.action.kind.to_string(),
                        wall: s.wall_rays.clone(),
                        removed_ray: s.action.removed_ray,
                    },
                    model_hash: s.model_hash.clone(),
                })
                .collect(),
            outcome: trace.outcome.to_string(),
            t_final: trace.t_final.as_ref().map(|t| t.to_string()),
            final_hash: trace.last.pair.fan.canonical_hash(),
            extra: BTreeMap::new(),
        }
    }

    /// Concatenate several traces (the stages of a pipeline) into one
    /// record, renumbering the steps.
    pub fn from_stages<'a>(stages: impl IntoIterator<Item = &'a Trace>) -> TraceRecord {
        let mut out: Option<TraceRecord> = None;
        for t in stages {
            let r = TraceRecord::from_trace(t);
            match &mut out {
                None => out = Some(r),
                Some(o) => {
                    let base = o.steps.len();
                    o.steps.extend(r.steps.into_iter().map(|mut s| {
                        s.step += base;
                        s
                    }));
                    o.outcome = r.outcome;
                    o.t_final = r.t_final;
                    o.final_hash = r.final_hash;
                }
            }
        }
        out.unwrap_or(TraceRecord {
            steps: vec![],
            outcome: "MinimalModel".into(),
            t_final: None,
            final_hash: String::new(),
            extra: BTreeMap::new(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace records serialize");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<TraceRecord> {
        serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))
    }
}
