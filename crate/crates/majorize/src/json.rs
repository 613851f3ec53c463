//! JSON schemas for the library types: parsing with field-level
//! diagnostics, and emission as `serde_json::Value`.

use std::fmt;
use std::io;

use majorize_core::classical::StochasticMap;
use majorize_core::linalg::{CMatrix, CVector, C64};
use majorize_core::locc::{BipartitePureState, Instrument, LoccProtocol, Outcome, Party, Round};
use majorize_core::quantum::{Density, FactorKind, FactorModel, KrausChannel};
use majorize_core::stepfn::{DiscreteMeasureSpace, LorenzCurve, StepFunction, WeightedVector};
use serde::Serialize;
use serde_json::{json, Map, Value};

/// Input problem located at a JSON path such as `matrix[1][0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "field `{}`: {}", self.field, self.message)
        }
    }
}

pub type Parsed<T> = Result<T, FieldError>;

fn err<T>(field: &str, message: impl Into<String>) -> Parsed<T> {
    Err(FieldError { field: field.to_string(), message: message.into() })
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn index(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

fn core_err<T>(field: &str, e: majorize_core::Error) -> Parsed<T> {
    err(field, e.to_string())
}

fn object<'a>(v: &'a Value, path: &str) -> Parsed<&'a Map<String, Value>> {
    v.as_object().map_or_else(|| err(path, "expected an object"), Ok)
}

fn array<'a>(v: &'a Value, path: &str) -> Parsed<&'a Vec<Value>> {
    v.as_array().map_or_else(|| err(path, "expected an array"), Ok)
}

fn field<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Parsed<&'a Value> {
    obj.get(key).map_or_else(|| err(&join(path, key), "missing"), Ok)
}

pub fn number(v: &Value, path: &str) -> Parsed<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => err(path, "expected a finite number"),
    }
}

pub fn count(v: &Value, path: &str) -> Parsed<usize> {
    v.as_u64().map_or_else(|| err(path, "expected a nonnegative integer"), |n| Ok(n as usize))
}

fn numbers(v: &Value, path: &str) -> Parsed<Vec<f64>> {
    array(v, path)?.iter().enumerate().map(|(i, x)| number(x, &index(path, i))).collect()
}

/// A number or a `[re, im]` pair.
fn complex(v: &Value, path: &str) -> Parsed<C64> {
    if let Some(pair) = v.as_array() {
        if pair.len() != 2 {
            return err(path, "expected [re, im]");
        }
        return Ok(C64::new(number(&pair[0], &index(path, 0))?, number(&pair[1], &index(path, 1))?));
    }
    Ok(C64::new(number(v, path)?, 0.0))
}

pub fn cmatrix(v: &Value, path: &str) -> Parsed<CMatrix> {
    let rows = array(v, path)?;
    if rows.is_empty() {
        return err(path, "matrix has no rows");
    }
    let mut entries = Vec::new();
    let mut ncols = None;
    for (i, row) in rows.iter().enumerate() {
        let rp = index(path, i);
        let row = array(row, &rp)?;
        match ncols {
            None => ncols = Some(row.len()),
            Some(n) if n != row.len() => return err(&rp, format!("row has {} entries, expected {n}", row.len())),
            _ => {}
        }
        for (j, x) in row.iter().enumerate() {
            entries.push(complex(x, &index(&rp, j))?);
        }
    }
    let ncols = ncols.unwrap_or(0);
    if ncols == 0 {
        return err(path, "matrix has no columns");
    }
    Ok(CMatrix::from_row_slice(rows.len(), ncols, &entries))
}

fn real_matrix(v: &Value, path: &str) -> Parsed<Vec<Vec<f64>>> {
    array(v, path)?.iter().enumerate().map(|(i, row)| numbers(row, &index(path, i))).collect()
}

/// `[[value, width], ...]`.
pub fn step_function(v: &Value, path: &str) -> Parsed<StepFunction> {
    let mut pairs = Vec::new();
    for (i, p) in array(v, path)?.iter().enumerate() {
        let pp = index(path, i);
        let pair = array(p, &pp)?;
        if pair.len() != 2 {
            return err(&pp, "expected [value, width]");
        }
        pairs.push((number(&pair[0], &index(&pp, 0))?, number(&pair[1], &index(&pp, 1))?));
    }
    StepFunction::new(pairs).or_else(|e| core_err(path, e))
}

/// `{"kind": "I", "n": 3, "trace_unit": w}`, or just the kind string.
pub fn factor(v: &Value, path: &str, dim: Option<usize>) -> Parsed<FactorModel> {
    let (kind, obj) = match v {
        Value::String(s) => (s.as_str(), None),
        Value::Object(o) => {
            let kind = field(o, path, "kind")?;
            (kind.as_str().map_or_else(|| err(&join(path, "kind"), "expected a string"), Ok)?, Some(o))
        }
        _ => return err(path, "expected a factor object or kind string"),
    };
    let model = match kind {
        "I" => {
            let n = match obj.and_then(|o| o.get("n")) {
                Some(n) => count(n, &join(path, "n"))?,
                None => dim.map_or_else(|| err(&join(path, "n"), "missing"), Ok)?,
            };
            if n == 0 {
                return err(&join(path, "n"), "must be positive");
            }
            FactorModel::type_i(n)
        }
        "Iinf" => FactorModel::type_i_inf(),
        "II1" => FactorModel::type_ii1(),
        "IIinf" => FactorModel::type_ii_inf(),
        other => return err(&join(path, "kind"), format!("unknown factor kind {other:?} (expected I, Iinf, II1 or IIinf)")),
    };
    match obj.and_then(|o| o.get("trace_unit")) {
        Some(w) => {
            let w = number(w, &join(path, "trace_unit"))?;
            model.with_trace_unit(w).or_else(|e| core_err(&join(path, "trace_unit"), e))
        }
        None => Ok(model),
    }
}

pub fn factor_json(f: &FactorModel) -> Value {
    let kind = match f.kind() {
        FactorKind::TypeI(n) => return json!({"kind": "I", "n": n, "trace_unit": f.trace_unit()}),
        FactorKind::TypeIInf => "Iinf",
        FactorKind::TypeII1 => "II1",
        FactorKind::TypeIIInf => "IIinf",
    };
    json!({"kind": kind, "trace_unit": f.trace_unit()})
}

/// `{"matrix": ..., "trace_unit"?, "factor"?}` or `{"scale": ..., "factor"?}`.
pub fn density(v: &Value, path: &str) -> Parsed<Density> {
    let obj = object(v, path)?;
    if let Some(m) = obj.get("matrix") {
        let m = cmatrix(m, &join(path, "matrix"))?;
        let mut model = match obj.get("factor") {
            Some(f) => factor(f, &join(path, "factor"), Some(m.nrows()))?,
            None => FactorModel::type_i(m.nrows()),
        };
        if let Some(w) = obj.get("trace_unit") {
            let w = number(w, &join(path, "trace_unit"))?;
            model = model.with_trace_unit(w).or_else(|e| core_err(&join(path, "trace_unit"), e))?;
        }
        return Density::from_matrix(m, model).or_else(|e| core_err(&join(path, "matrix"), e));
    }
    if let Some(s) = obj.get("scale") {
        let scale = step_function(s, &join(path, "scale"))?;
        let model = match obj.get("factor") {
            Some(f) => factor(f, &join(path, "factor"), None)?,
            None => FactorModel::type_ii_inf(),
        };
        return Density::from_scale(scale, model).or_else(|e| core_err(&join(path, "scale"), e));
    }
    err(path, "expected a `matrix` or `scale` field")
}

/// Plain array of values on unit atoms, or
/// `{"values": [...], "masses"?: [...], "infinite_tail"?: bool}`.
pub fn weighted_vector(v: &Value, path: &str) -> Parsed<WeightedVector> {
    if v.is_array() {
        let values = numbers(v, path)?;
        return WeightedVector::unit(&values).or_else(|e| core_err(path, e));
    }
    let obj = object(v, path)?;
    let vp = join(path, "values");
    let values = numbers(field(obj, path, "values")?, &vp)?;
    let masses = match obj.get("masses") {
        Some(m) => {
            let mp = join(path, "masses");
            let masses = numbers(m, &mp)?;
            if masses.len() != values.len() {
                return err(&mp, format!("{} masses for {} values", masses.len(), values.len()));
            }
            masses
        }
        None => vec![1.0; values.len()],
    };
    let mut space = DiscreteMeasureSpace::with_masses(&masses).or_else(|e| core_err(&join(path, "masses"), e))?;
    if let Some(t) = obj.get("infinite_tail") {
        let tail = t.as_bool().map_or_else(|| err(&join(path, "infinite_tail"), "expected a boolean"), Ok)?;
        if tail {
            space = space.with_infinite_tail();
        }
    }
    WeightedVector::new(space, values).or_else(|e| core_err(&vp, e))
}

fn dims(v: &Value, path: &str) -> Parsed<(usize, usize)> {
    let d = array(v, path)?;
    if d.len() != 2 {
        return err(path, "expected [d_A, d_B]");
    }
    let (a, b) = (count(&d[0], &index(path, 0))?, count(&d[1], &index(path, 1))?);
    if a == 0 || b == 0 {
        return err(path, "dimensions must be positive");
    }
    Ok((a, b))
}

/// `{"schmidt": [[c, i, j], ...], "dims"?}`, `{"vector": [...], "dims"}` or
/// `{"scale": [[v, w], ...], "factors"?: [A, B]}`.
pub fn state(v: &Value, path: &str) -> Parsed<BipartitePureState> {
    let obj = object(v, path)?;
    let explicit_dims = obj.get("dims").map(|d| dims(d, &join(path, "dims"))).transpose()?;
    let state = if let Some(s) = obj.get("schmidt") {
        let sp = join(path, "schmidt");
        let mut triples = Vec::new();
        for (k, t) in array(s, &sp)?.iter().enumerate() {
            let tp = index(&sp, k);
            let t = array(t, &tp)?;
            if t.len() != 3 {
                return err(&tp, "expected [coefficient, i, j]");
            }
            triples.push((number(&t[0], &index(&tp, 0))?, count(&t[1], &index(&tp, 1))?, count(&t[2], &index(&tp, 2))?));
        }
        if triples.is_empty() {
            return err(&sp, "no Schmidt terms");
        }
        let (da, db) = explicit_dims.unwrap_or_else(|| {
            let d = triples.iter().map(|t| t.1.max(t.2)).max().unwrap_or(0) + 1;
            (d, d)
        });
        BipartitePureState::from_schmidt_triples(&triples, da, db).or_else(|e| core_err(&sp, e))?
    } else if let Some(vec) = obj.get("vector") {
        let vp = join(path, "vector");
        let entries = array(vec, &vp)?.iter().enumerate().map(|(i, x)| complex(x, &index(&vp, i))).collect::<Parsed<Vec<_>>>()?;
        let Some((da, db)) = explicit_dims else { return err(&join(path, "dims"), "missing (required with `vector`)") };
        BipartitePureState::from_vector(&CVector::from_vec(entries), da, db).or_else(|e| core_err(&vp, e))?
    } else if let Some(s) = obj.get("scale") {
        let scale = step_function(s, &join(path, "scale"))?;
        let (fa, fb) = match obj.get("factors") {
            Some(f) => {
                let fp = join(path, "factors");
                let f = array(f, &fp)?;
                if f.len() != 2 {
                    return err(&fp, "expected [factor_A, factor_B]");
                }
                (factor(&f[0], &index(&fp, 0), None)?, factor(&f[1], &index(&fp, 1), None)?)
            }
            None => (FactorModel::type_ii_inf(), FactorModel::type_ii_inf()),
        };
        return BipartitePureState::from_scale(scale, fa, fb).or_else(|e| core_err(&join(path, "scale"), e));
    } else {
        return err(path, "expected a `schmidt`, `vector` or `scale` field");
    };
    match obj.get("factors") {
        Some(f) => {
            let fp = join(path, "factors");
            let f = array(f, &fp)?;
            if f.len() != 2 {
                return err(&fp, "expected [factor_A, factor_B]");
            }
            let (da, db) = state.dims().expect("finite state");
            let fa = factor(&f[0], &index(&fp, 0), Some(da))?;
            let fb = factor(&f[1], &index(&fp, 1), Some(db))?;
            state.with_factors(fa, fb).or_else(|e| core_err(&fp, e))
        }
        None => Ok(state),
    }
}

pub fn stochastic_map(v: &Value, path: &str) -> Parsed<StochasticMap> {
    let obj = object(v, path)?;
    let src = numbers(field(obj, path, "source_masses")?, &join(path, "source_masses"))?;
    let tgt = numbers(field(obj, path, "target_masses")?, &join(path, "target_masses"))?;
    let m = real_matrix(field(obj, path, "matrix")?, &join(path, "matrix"))?;
    StochasticMap::new(src, tgt, m).or_else(|e| core_err(&join(path, "matrix"), e))
}

pub fn channel(v: &Value, path: &str) -> Parsed<KrausChannel> {
    let obj = object(v, path)?;
    let dim_in = count(field(obj, path, "dim_in")?, &join(path, "dim_in"))?;
    let dim_out = count(field(obj, path, "dim_out")?, &join(path, "dim_out"))?;
    let kp = join(path, "kraus");
    let mut kraus = Vec::new();
    for (i, k) in array(field(obj, path, "kraus")?, &kp)?.iter().enumerate() {
        let ip = index(&kp, i);
        let k = cmatrix(k, &ip)?;
        if k.shape() != (dim_out, dim_in) {
            return err(&ip, format!("Kraus operator is {}x{}, expected {dim_out}x{dim_in}", k.nrows(), k.ncols()));
        }
        kraus.push(k);
    }
    Ok(KrausChannel { kraus, dim_in, dim_out })
}

fn labels(v: &Value, path: &str) -> Parsed<Vec<String>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, s)| s.as_str().map(str::to_string).map_or_else(|| err(&index(path, i), "expected a string"), Ok))
        .collect()
}

pub fn protocol(v: &Value, path: &str) -> Parsed<LoccProtocol> {
    let obj = object(v, path)?;
    let dims = dims(field(obj, path, "dims")?, &join(path, "dims"))?;
    let rp = join(path, "rounds");
    let mut rounds = Vec::new();
    for (r, round) in array(field(obj, path, "rounds")?, &rp)?.iter().enumerate() {
        let rp = index(&rp, r);
        let ro = object(round, &rp)?;
        let party = match field(ro, &rp, "party")?.as_str() {
            Some("A") => Party::A,
            Some("B") => Party::B,
            _ => return err(&join(&rp, "party"), "expected \"A\" or \"B\""),
        };
        let ip = join(&rp, "instruments");
        let mut instruments = Vec::new();
        for (i, inst) in array(field(ro, &rp, "instruments")?, &ip)?.iter().enumerate() {
            let ip = index(&ip, i);
            let io = object(inst, &ip)?;
            let condition = match io.get("condition") {
                Some(c) => labels(c, &join(&ip, "condition"))?,
                None => Vec::new(),
            };
            let op = join(&ip, "outcomes");
            let mut outcomes = Vec::new();
            for (o, out) in array(field(io, &ip, "outcomes")?, &op)?.iter().enumerate() {
                let op = index(&op, o);
                let oo = object(out, &op)?;
                let label = field(oo, &op, "label")?
                    .as_str()
                    .map_or_else(|| err(&join(&op, "label"), "expected a string"), Ok)?
                    .to_string();
                let kp = join(&op, "kraus");
                let kraus = array(field(oo, &op, "kraus")?, &kp)?
                    .iter()
                    .enumerate()
                    .map(|(k, m)| cmatrix(m, &index(&kp, k)))
                    .collect::<Parsed<Vec<_>>>()?;
                outcomes.push(Outcome { label, kraus });
            }
            instruments.push(Instrument { condition, outcomes });
        }
        rounds.push(Round { party, instruments });
    }
    let protocol = LoccProtocol { dims, rounds };
    protocol.validate().or_else(|e| core_err(&rp, e))?;
    Ok(protocol)
}

pub fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn floats(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| float(x)).collect())
}

pub fn step_function_json(s: &StepFunction) -> Value {
    Value::Array(s.pieces().iter().map(|p| json!([float(p.value), float(p.width)])).collect())
}

pub fn lorenz_json(l: &LorenzCurve) -> Value {
    Value::Array(l.knots().iter().map(|&(t, y)| json!([float(t), float(y)])).collect())
}

pub fn cmatrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([float(m[(i, j)].re), float(m[(i, j)].im)])).collect()))
            .collect(),
    )
}

pub fn cvector_json(v: &CVector) -> Value {
    Value::Array(v.iter().map(|z| json!([float(z.re), float(z.im)])).collect())
}

pub fn stochastic_map_json(t: &StochasticMap) -> Value {
    json!({
        "source_masses": floats(t.source_masses()),
        "target_masses": floats(t.target_masses()),
        "matrix": Value::Array(t.matrix().iter().map(|r| floats(r)).collect()),
    })
}

pub fn channel_json(c: &KrausChannel) -> Value {
    json!({
        "dim_in": c.dim_in,
        "dim_out": c.dim_out,
        "kraus": Value::Array(c.kraus.iter().map(cmatrix_json).collect()),
    })
}

pub fn protocol_json(p: &LoccProtocol) -> Value {
    let rounds: Vec<Value> = p
        .rounds
        .iter()
        .map(|r| {
            let instruments: Vec<Value> = r
                .instruments
                .iter()
                .map(|i| {
                    let outcomes: Vec<Value> = i
                        .outcomes
                        .iter()
                        .map(|o| json!({"label": o.label, "kraus": Value::Array(o.kraus.iter().map(cmatrix_json).collect())}))
                        .collect();
                    json!({"condition": i.condition, "outcomes": outcomes})
                })
                .collect();
            let party = match r.party {
                Party::A => "A",
                Party::B => "B",
            };
            json!({"party": party, "instruments": instruments})
        })
        .collect();
    json!({"dims": [p.dims.0, p.dims.1], "rounds": rounds})
}

/// JSON formatter printing every float with 17 significant digits, so that
/// emitted values parse back to the same `f64`.
struct RoundTripFormatter;

impl serde_json::ser::Formatter for RoundTripFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, RoundTripFormatter);
    v.serialize(&mut ser).expect("serializing a Value into memory cannot fail");
    let mut s = String::from_utf8(buf).expect("serde_json emits UTF-8");
    s.push('\n');
    s
}

/// Float in the same 17-digit form, for CSV and text output.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2f64.sqrt(), 1e-300, 12345.678] {
            let s = to_string(&json!([float(x)]));
            let back: Value = serde_json::from_str(&s).unwrap();
            assert_eq!(back[0].as_f64().unwrap(), x);
        }
    }

    #[test]
    fn errors_name_the_field() {
        let v: Value = serde_json::from_str(r#"{"matrix": [[1, 0], [0, "x"]]}"#).unwrap();
        let e = density(&v, "").unwrap_err();
        assert_eq!(e.field, "matrix[1][1]");
        let v: Value = serde_json::from_str(r#"{"schmidt": [[0.5, 0]]}"#).unwrap();
        assert_eq!(state(&v, "").unwrap_err().field, "schmidt[0]");
        let v: Value = serde_json::from_str(r#"{"vector": [1, 0, 0, 0]}"#).unwrap();
        assert_eq!(state(&v, "").unwrap_err().field, "dims");
    }

    #[test]
    fn complex_entries() {
        let v: Value = serde_json::from_str(r#"[[1, [0, -0.5]], [[0, 0.5], 2]]"#).unwrap();
        let m = cmatrix(&v, "m").unwrap();
        assert_eq!(m[(0, 1)], C64::new(0.0, -0.5));
        assert_eq!(m[(1, 1)], C64::new(2.0, 0.0));
    }
}
