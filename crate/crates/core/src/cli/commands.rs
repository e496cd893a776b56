//! Command implementations. Each returns a JSON report and a pass flag.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::render::{render_polygon, Format, Polyline};
use super::report::{self, rational, rationals, valuations};
use super::spec::{spec_hash, SpecFile};
use crate::analysis::{self, LAnalysis, NewtonPolygon, StarAnalysis};
use crate::cyclo::make_cyclo;
use crate::dwork;
use crate::error::{Error, Result};
use crate::lfun;
use crate::scalar::{rat_int, Valuation};
use crate::tower::TowerSpec;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub pass: bool,
    /// extra files: (name, contents)
    pub files: Vec<(String, String)>,
}

#[derive(Clone, Copy, Debug)]
pub struct DworkOptions {
    pub dim: Option<usize>,
    pub prec: Option<u32>,
    pub max_dim: usize,
    pub trace_prec: u32,
}

impl Default for DworkOptions {
    fn default() -> Self {
        DworkOptions {
            dim: None,
            prec: None,
            max_dim: 512,
            trace_prec: 8,
        }
    }
}

fn envelope(command: &str, spec: &TowerSpec) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("spec_hash".into(), json!(spec_hash(spec)));
    m.insert("spec".into(), serde_json::to_value(SpecFile::from_tower(spec)).unwrap());
    m
}

fn finish(mut m: serde_json::Map<String, Value>, checks: &[(&str, bool)], files: Vec<(String, String)>) -> Outcome {
    let pass = checks.iter().all(|c| c.1);
    m.insert("checks".into(), report::checks(checks));
    m.insert("pass".into(), json!(pass));
    Outcome {
        report: Value::Object(m),
        pass,
        files,
    }
}

fn check_m_chi(m_chi: u32) -> Result<()> {
    if m_chi == 0 {
        return Err(Error::InvalidArgument("m_chi must be at least 1".into()));
    }
    Ok(())
}

pub fn euler_feasible(spec: &TowerSpec, m_chi: u32) -> bool {
    let deg = spec.degree_l(m_chi).max(1) as usize;
    lfun::enumeration_cost(spec.q(), deg) <= lfun::ENUMERATION_LIMIT
}

pub fn info(spec: &TowerSpec, m_chi_max: u32) -> Result<Outcome> {
    check_m_chi(m_chi_max)?;
    let inv = spec.invariants();
    let st = spec.stability_constants();
    let mut m = envelope("info", spec);
    m.insert(
        "invariants".into(),
        json!({
            "delta": rational(&inv.delta),
            "m": inv.m,
            "d_m": inv.d_m,
            "genus_stable": inv.genus_stable,
            "w": rational(&inv.w),
            "c": rational(&inv.c_thm_b),
        }),
    );
    let conductors: serde_json::Map<String, Value> =
        (1..=m_chi_max).map(|k| (k.to_string(), json!(spec.conductor(k)))).collect();
    let degrees: serde_json::Map<String, Value> =
        (1..=m_chi_max).map(|k| (k.to_string(), json!(spec.degree_l(k)))).collect();
    m.insert("conductor".into(), Value::Object(conductors));
    m.insert("degree_l".into(), Value::Object(degrees));
    m.insert(
        "stability".into(),
        json!({
            "delta_x": st.delta_x.iter().map(|(&(i, j), d)| json!({"i": i, "j": j, "delta": rational(d)})).collect::<Vec<_>>(),
            "relevant": st.relevant.iter().map(|&(i, j)| json!({"i": i, "j": j})).collect::<Vec<_>>(),
            "n": st.n,
            "m_prime": st.m_prime,
            "higher_levels_can_matter": spec.higher_levels_can_matter(),
        }),
    );
    let levels = spec.level_bounds();
    m.insert(
        "level_bounds".into(),
        Value::Array(
            levels
                .iter()
                .map(|l| json!({"level": l.level, "degree": l.degree, "bound": rational(&l.bound), "holds": l.holds}))
                .collect(),
        ),
    );
    m.insert(
        "paths".into(),
        Value::Object(
            (1..=m_chi_max)
                .map(|k| (k.to_string(), json!(if euler_feasible(spec, k) { "euler" } else { "dwork" })))
                .collect(),
        ),
    );
    Ok(finish(m, &[("genus_stable", inv.genus_stable)], Vec::new()))
}

fn l_analysis_json(spec: &TowerSpec, an: &LAnalysis) -> Value {
    let unit = spec.units_per_q(an.m_chi);
    let vq: Vec<Valuation> = an.valuations.iter().map(|v| v.scale(&(BigRational::one() / &unit))).collect();
    json!({
        "m_chi": an.m_chi,
        "degree": an.degree,
        "coefficients": an.l.coeffs.iter().map(report::cyclo_coords).collect::<Vec<_>>(),
        "valuations_pi": valuations(&an.valuations),
        "valuations_q": valuations(&vq),
        "l_star_coefficients": an.l_star.coeffs.iter().map(report::cyclo_coords).collect::<Vec<_>>(),
        "l_star_valuations_pi": valuations(&an.l_star.valuations()),
        "polygon_q": report::polygon(&an.polygon),
        "functional_equation": an.functional_eq,
        "integral": an.integral,
        "leading_valuation": an.leading_ok,
        "bounds": report::bounds(&an.bounds, &unit),
        "thm444": an.thm444.as_ref().map(report::thm444).unwrap_or(Value::Null),
        "uniformity": an.uniformity.as_ref().map(rational).unwrap_or(Value::Null),
        "pass": an.pass(),
    })
}

fn euler_parameters(spec: &TowerSpec, m_chi: u32) -> Value {
    json!({
        "path": "euler",
        "census_max_degree": spec.degree_l(m_chi).max(1),
        "frobenius_precision_digits": m_chi,
        "enumeration_limit": lfun::ENUMERATION_LIMIT.to_string(),
        "precision": "exact",
    })
}

fn l_checks(an: &LAnalysis) -> Vec<(&'static str, bool)> {
    vec![
        ("functional_equation", an.functional_eq),
        ("integral", an.integral),
        ("leading_valuation", an.leading_ok),
        ("bounds", an.bounds.pass),
        ("thm444", an.thm444.as_ref().is_none_or(|t| t.pass)),
    ]
}

pub fn lfun_cmd(spec: &TowerSpec, m_chi: u32) -> Result<Outcome> {
    check_m_chi(m_chi)?;
    let ls = analysis::l_and_l_star(spec, m_chi)?;
    let an = analysis::analyze_l(spec, ls.0, ls.1)?;
    let mut m = envelope("lfun", spec);
    m.insert("parameters".into(), euler_parameters(spec, m_chi));
    m.insert("l".into(), l_analysis_json(spec, &an));
    Ok(finish(m, &l_checks(&an), Vec::new()))
}

fn dwork_parameters(r: &dwork::DworkResult, opts: &DworkOptions, ceiling: u64) -> Value {
    json!({
        "path": "dwork",
        "dimension": r.dim,
        "dimensions_tried": r.dims_tried,
        "initial_dimension": opts.dim,
        "max_dimension": opts.max_dim,
        "precision_digits": r.prec,
        "precision_ceiling_pi": ceiling,
        "truncation_error_floor_pi": rationals(&r.error_floor),
        "stabilization": {"stable": r.stable, "certified": r.certified},
        "leak_pi": report::valuation(&r.leak),
    })
}

pub fn dwork_cmd(spec: &TowerSpec, m_chi: u32, opts: &DworkOptions) -> Result<Outcome> {
    check_m_chi(m_chi)?;
    let cctx = make_cyclo(spec.p(), m_chi);
    let r = dwork::l_star_dwork(spec, &cctx, opts.dim, opts.prec, opts.max_dim)?;
    let ceiling = r.prec as u64 * cctx.phi() as u64;
    let an = analysis::analyze_l_star(spec, m_chi, r.l_star_vals.clone())?;
    let c_np = analysis::newton_polygon(&analysis::points_of(&r.c_star_vals));
    let mut m = envelope("dwork", spec);
    m.insert("parameters".into(), dwork_parameters(&r, opts, ceiling));
    m.insert("c_star_valuations_pi".into(), valuations(&r.c_star_vals));
    m.insert(
        "c_star_polygon_pi".into(),
        match &c_np {
            Ok(np) => report::polygon(np),
            Err(e) => report::error(e),
        },
    );
    m.insert(
        "l_star_coefficients".into(),
        Value::Array(r.l_star.iter().map(report::cyclo_coords).collect()),
    );
    let unit = spec.units_per_q(m_chi);
    m.insert("analysis".into(), report::star_analysis(&an, &unit));

    let mut checks = vec![
        ("stable", r.stable),
        ("certified", r.certified),
        ("analysis", an.pass()),
    ];
    // trace formula, when the exponential sums can be enumerated
    let kmax = 3usize;
    if lfun::enumeration_cost(spec.q(), kmax) <= lfun::ENUMERATION_LIMIT {
        let sums = (1..=kmax)
            .map(|k| lfun::exp_sum(spec, &cctx, k))
            .collect::<Result<Vec<_>>>()?;
        let tc = dwork::trace_formula_check(spec, &cctx, kmax, opts.trace_prec, &sums)?;
        let ok = tc.iter().all(|t| t.holds);
        m.insert(
            "trace_formula".into(),
            Value::Array(
                tc.iter()
                    .map(|t| json!({"k": t.k, "dimension": t.dim, "precision_digits": t.prec, "difference_pi": report::valuation(&t.difference), "holds": t.holds}))
                    .collect(),
            ),
        );
        checks.push(("trace_formula", ok));
    }
    if euler_feasible(spec, m_chi) {
        let exact = lfun::l_star(spec, &cctx)?.valuations();
        let agree = cross_path_agree(&exact, &r.l_star_vals, &rat_int(ceiling as i64));
        m.insert(
            "cross_path".into(),
            json!({"euler_l_star_valuations_pi": valuations(&exact), "agree": agree}),
        );
        checks.push(("cross_path", agree));
    }
    Ok(finish(m, &checks, Vec::new()))
}

/// Exact values agree with the Dwork ones wherever the latter are below
/// the precision ceiling; saturated Dwork entries must be saturated exactly.
pub fn cross_path_agree(exact: &[Valuation], dw: &[Valuation], ceiling: &BigRational) -> bool {
    exact.len() == dw.len()
        && exact.iter().zip(dw).all(|(e, d)| match d {
            Valuation::Finite(v) if v < ceiling => e.finite() == Some(v),
            _ => e.finite().is_none_or(|v| v >= ceiling),
        })
}

#[derive(Clone, Debug)]
enum Computed {
    Euler(Box<LAnalysis>),
    Dwork(Box<StarAnalysis>, Box<dwork::DworkResult>),
}

impl Computed {
    fn polygon(&self) -> &NewtonPolygon {
        match self {
            Computed::Euler(a) => &a.polygon,
            Computed::Dwork(a, _) => &a.polygon,
        }
    }

    fn pass(&self) -> bool {
        match self {
            Computed::Euler(a) => a.pass(),
            Computed::Dwork(a, r) => a.pass() && r.stable && r.certified,
        }
    }

    fn uniformity(&self) -> Option<&BigRational> {
        match self {
            Computed::Euler(a) => a.uniformity.as_ref(),
            Computed::Dwork(a, _) => a.uniformity.as_ref(),
        }
    }

    fn bounds(&self) -> &analysis::BoundReport {
        match self {
            Computed::Euler(a) => &a.bounds,
            Computed::Dwork(a, _) => &a.bounds,
        }
    }

    fn to_json(&self, spec: &TowerSpec, m_chi: u32, opts: &DworkOptions) -> Value {
        match self {
            Computed::Euler(a) => json!({
                "parameters": euler_parameters(spec, m_chi),
                "l": l_analysis_json(spec, a),
            }),
            Computed::Dwork(a, r) => {
                let ceiling = r.prec as u64 * make_cyclo(spec.p(), m_chi).phi() as u64;
                json!({
                    "parameters": dwork_parameters(r, opts, ceiling),
                    "analysis": report::star_analysis(a, &spec.units_per_q(m_chi)),
                })
            }
        }
    }
}

fn compute(spec: &TowerSpec, m_chi: u32, opts: &DworkOptions) -> Result<Computed> {
    if euler_feasible(spec, m_chi) {
        let (l, ls) = analysis::l_and_l_star(spec, m_chi)?;
        Ok(Computed::Euler(Box::new(analysis::analyze_l(spec, l, ls)?)))
    } else {
        let cctx = make_cyclo(spec.p(), m_chi);
        let r = dwork::l_star_dwork(spec, &cctx, opts.dim, opts.prec, opts.max_dim)?;
        let a = analysis::analyze_l_star(spec, m_chi, r.l_star_vals.clone())?;
        Ok(Computed::Dwork(Box::new(a), Box::new(r)))
    }
}

pub fn verify(spec: &TowerSpec, m_chi_max: u32, opts: &DworkOptions) -> Result<Outcome> {
    check_m_chi(m_chi_max)?;
    let results = (1..=m_chi_max)
        .into_par_iter()
        .map(|k| compute(spec, k, opts))
        .collect::<Result<Vec<_>>>()?;
    let inv = spec.invariants();
    let p = spec.p();
    let mut m = envelope("verify", spec);
    let mut rows = Vec::new();
    let mut all_ok = true;
    for (n, r) in results.iter().enumerate() {
        let k = n as u32 + 1;
        all_ok &= r.pass();
        let mut row = r.to_json(spec, k, opts);
        row["m_chi"] = json!(k);
        row["pass"] = json!(r.pass());
        rows.push(row);
    }
    m.insert("conductors".into(), Value::Array(rows));

    // slope stability applies when only level 0 is present
    let mut stability_ok = true;
    if spec.levels().keys().all(|&i| i == 0) && m_chi_max >= 2 {
        let base = &results[0].polygon().slopes;
        let mut out = Vec::new();
        for (n, r) in results.iter().enumerate().skip(1) {
            let (ok, predicted) = analysis::check_stability(base, &r.polygon().slopes, p, n as u32);
            stability_ok &= ok;
            out.push(json!({"m_chi": n + 1, "predicted": rationals(&predicted), "holds": ok}));
        }
        m.insert("stability".into(), json!({"base_m_chi": 1, "checks": out}));
    }

    // uniformity: bound 2/p^e for e = m_chi - m - 1, plus the observed trend
    let mut unif_ok = true;
    let mut stats = Vec::new();
    let mut prev: Option<BigRational> = None;
    let mut decreasing = true;
    for (n, r) in results.iter().enumerate() {
        let k = n as u32 + 1;
        let Some(u) = r.uniformity() else { continue };
        let mut row = json!({"m_chi": k, "stat": rational(u)});
        if k > inv.m {
            let bound = rat_int(2) / rat_int(p.pow(k - inv.m - 1) as i64);
            let ok = *u <= bound;
            unif_ok &= ok;
            row["bound"] = rational(&bound);
            row["holds"] = json!(ok);
            if let Some(pv) = &prev {
                decreasing &= u < pv;
            }
            prev = Some(u.clone());
        }
        stats.push(row);
    }
    m.insert("uniformity".into(), json!({"stats": stats, "strictly_decreasing": decreasing}));
    Ok(finish(
        m,
        &[
            ("conductors", all_ok),
            ("stability", stability_ok),
            ("uniformity_bound", unif_ok),
        ],
        Vec::new(),
    ))
}

pub fn compare(a: &TowerSpec, b: &TowerSpec, m_chi: u32) -> Result<Outcome> {
    check_m_chi(m_chi)?;
    let r = analysis::compare_om2(a, b, m_chi)?;
    let mut m = envelope("compare", a);
    m.insert("other_spec_hash".into(), json!(spec_hash(b)));
    m.insert("other_spec".into(), serde_json::to_value(SpecFile::from_tower(b)).unwrap());
    m.insert(
        "parameters".into(),
        json!({"m_chi": m_chi, "range": r.range, "product_terms": r.range + 2, "precision": "exact"}),
    );
    m.insert(
        "relevant".into(),
        Value::Array(r.relevant.iter().map(|&(i, j)| json!({"i": i, "j": j})).collect()),
    );
    m.insert("c_star_polygon_pi".into(), report::polygon(&r.polygon_a));
    m.insert("other_c_star_polygon_pi".into(), report::polygon(&r.polygon_b));
    m.insert("identical".into(), json!(r.identical));
    Ok(finish(m, &[("identical", r.identical)], Vec::new()))
}

/// Polygon of `L*` with the bound polylines, all in `q`-units.
pub fn plot(spec: &TowerSpec, m_chi: u32, formats: &[Format], opts: &DworkOptions) -> Result<Outcome> {
    check_m_chi(m_chi)?;
    let c = compute(spec, m_chi, opts)?;
    let unit = spec.units_per_q(m_chi);
    let star: Vec<Valuation> = match &c {
        Computed::Euler(a) => a.l_star.valuations(),
        Computed::Dwork(a, _) => a.star_valuations.clone(),
    };
    let np = analysis::newton_polygon(&analysis::points_of(&star))?.rescale(&unit);
    let b = c.bounds();
    let lower: Polyline = b.entries.iter().map(|e| (e.k, &e.lower / &unit)).collect();
    let upper: Polyline = b
        .entries
        .iter()
        .filter_map(|e| e.upper.as_ref().map(|u| (e.k, u / &unit)))
        .collect();
    let mut overlays = vec![("lower", lower)];
    if !upper.is_empty() {
        overlays.push(("upper", upper));
    }
    let mut files = Vec::new();
    for f in formats {
        let (ext, fmt) = match f {
            Format::Svg => ("svg", *f),
            Format::Ascii => ("txt", *f),
        };
        files.push((format!("polygon_m{m_chi}.{ext}"), render_polygon(&np.vertices, &overlays, fmt)));
    }
    let mut m = envelope("plot", spec);
    m.insert("m_chi".into(), json!(m_chi));
    m.insert("polygon_q".into(), report::polygon(&np));
    m.insert("files".into(), json!(files.iter().map(|f| f.0.clone()).collect::<Vec<_>>()));
    let nonempty = !np.vertices.is_empty() && !BigRational::is_zero(&unit);
    Ok(finish(m, &[("polygon", nonempty), ("bounds", b.pass)], files))
}
