//! JSON encoding of analysis results.

use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::analysis::{BoundReport, NewtonPolygon, StarAnalysis, Thm444Report};
use crate::cyclo::CycloElem;
use crate::error::Error;
use crate::scalar::{Scalar, Valuation};

pub fn rational(r: &BigRational) -> Value {
    json!({"num": r.numer().to_string(), "den": r.denom().to_string()})
}

pub fn rationals(rs: &[BigRational]) -> Value {
    Value::Array(rs.iter().map(rational).collect())
}

pub fn valuation(v: &Valuation) -> Value {
    match v {
        Valuation::Finite(r) => json!({"kind": "finite", "value": rational(r)}),
        Valuation::Infinite => json!({"kind": "infinite"}),
        Valuation::AtLeast(r) => json!({"kind": "at_least", "value": rational(r)}),
    }
}

pub fn valuations(vs: &[Valuation]) -> Value {
    Value::Array(vs.iter().map(valuation).collect())
}

/// Coordinates of an `O_m` element in the `π`-power basis, as strings.
pub fn cyclo_coords<C: Scalar + std::fmt::Display>(x: &CycloElem<C>) -> Value {
    Value::Array(x.coords().iter().map(|c| Value::String(c.to_string())).collect())
}

pub fn polygon(np: &NewtonPolygon) -> Value {
    json!({
        "vertices": np.vertices.iter().map(|(i, v)| json!({"index": i, "value": rational(v)})).collect::<Vec<_>>(),
        "slopes": rationals(&np.slopes),
    })
}

fn opt_rational(r: &Option<BigRational>) -> Value {
    r.as_ref().map(rational).unwrap_or(Value::Null)
}

/// Bound entries, divided by `unit` so they read in `q`-units.
pub fn bounds(b: &BoundReport, unit: &BigRational) -> Value {
    let scale = |r: &BigRational| r / unit;
    json!({
        "units": "q",
        "entries": b.entries.iter().map(|e| json!({
            "k": e.k,
            "lower": rational(&scale(&e.lower)),
            "upper": opt_rational(&e.upper.as_ref().map(scale)),
            "observed": opt_rational(&e.observed.as_ref().map(scale)),
            "lower_ok": e.lower_ok,
            "upper_ok": e.upper_ok,
        })).collect::<Vec<_>>(),
        "forced_vertices": b.forced,
        "max_gap": rational(&scale(&b.max_gap)),
        "gap_ok": b.gap_ok,
        "pass": b.pass,
    })
}

pub fn thm444(t: &Thm444Report) -> Value {
    json!({
        "points": t.points.iter().map(|c| json!({
            "index": c.index,
            "expected": rational(&c.expected),
            "observed": opt_rational(&c.observed),
            "ok": c.ok,
        })).collect::<Vec<_>>(),
        "windows": t.windows.iter().map(|w| json!({
            "window": w.window,
            "lo": rational(&w.lo),
            "hi": rational(&w.hi),
            "slopes_at_lo": w.at_lo,
            "slopes_inside": w.inside,
            "ok": w.ok,
        })).collect::<Vec<_>>(),
        "stray_slopes": t.stray,
        "pass": t.pass,
    })
}

pub fn star_analysis(a: &StarAnalysis, unit: &BigRational) -> Value {
    json!({
        "m_chi": a.m_chi,
        "degree": a.degree,
        "l_star_valuations_pi": valuations(&a.star_valuations),
        "polygon_q": polygon(&a.polygon),
        "functional_equation": a.functional_eq,
        "bounds": bounds(&a.bounds, unit),
        "thm444": a.thm444.as_ref().map(thm444).unwrap_or(Value::Null),
        "uniformity": opt_rational(&a.uniformity),
        "pass": a.pass(),
    })
}

pub fn error(e: &Error) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), json!(e.kind()));
    m.insert("message".into(), json!(e.to_string()));
    m.insert("exit_code".into(), json!(e.exit_code()));
    if let Some((i, j)) = e.location() {
        m.insert("location".into(), json!({"i": i, "j": j}));
    }
    if let Error::RelevantSetMismatch(xs) = e {
        m.insert(
            "coefficients".into(),
            Value::Array(xs.iter().map(|(i, j)| json!({"i": i, "j": j})).collect()),
        );
    }
    json!({ "error": Value::Object(m) })
}

pub fn checks(list: &[(&str, bool)]) -> Value {
    Value::Array(list.iter().map(|(n, ok)| json!({"name": n, "pass": ok})).collect())
}
