//! One JSON report per task.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use hypmirror_core::arrangement::{
    check_simple_real, check_smooth, check_unimodular, circuits, real_chambers, HypertoricData,
    SmoothFailure,
};
use hypmirror_core::mirror::{
    build_atlas_from, generating_functions, kahler_first, mirror_equations, period_support,
    verify_atlas, verify_volume_form, Atlas, CheckResult, Transition,
};
use hypmirror_core::multiplicative::{verify_phi_with, Phi};
use hypmirror_core::symbolic::{LaurentPoly, Var};
use hypmirror_core::tropical::{admissible, TropicalArrangement};

use crate::config::Faults;

pub fn rat(r: &BigRational) -> String {
    r.to_string()
}

fn int(x: &BigInt) -> Value {
    x.to_i64()
        .map_or_else(|| Value::String(x.to_string()), Value::from)
}

fn ints(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

/// A report plus whether its verifications passed.
pub struct TaskReport {
    pub value: Value,
    pub failures: Vec<String>,
}

impl TaskReport {
    fn ok(value: Value) -> Self {
        TaskReport {
            value,
            failures: Vec::new(),
        }
    }
}

pub fn check_report(h: &HypertoricData) -> TaskReport {
    let uni = check_unimodular(h);
    let simple = check_simple_real(h);
    let smooth = check_smooth(h);
    let certificate = match &smooth.certificate {
        None => Value::Null,
        Some(SmoothFailure::ExcessIntersection(s)) => json!({"excess_intersection": one_based(s)}),
        Some(SmoothFailure::NotBasis(s, det)) => {
            json!({"not_basis": one_based(s), "det": int(det)})
        }
    };
    TaskReport::ok(json!({
        "order": one_based(&h.order),
        "normalized_u": h.u.iter().map(|r| ints(r)).collect::<Vec<_>>(),
        "unimodular": {
            "verdict": uni.unimodular,
            "witness": uni.witness.map(|(s, det)| json!({"subset": one_based(&s), "det": int(&det)})),
        },
        "simple": {
            "verdict": simple.simple,
            "violation": simple.violation.map(|v| one_based(&v)),
        },
        "smooth": {
            "verdict": smooth.verdict.to_string(),
            "certificate": certificate,
        },
    }))
}

pub fn circuits_report(h: &HypertoricData) -> Result<TaskReport, String> {
    let cs = circuits(h).map_err(|e| e.to_string())?;
    let list: Vec<Value> = cs
        .iter()
        .map(|c| {
            json!({
                "support": one_based(&c.support),
                "plus": one_based(&c.plus),
                "minus": one_based(&c.minus),
                "beta": ints(&c.beta),
                "distinguished": c.distinguished.map(|k| k + 1),
                "parameter": kahler_first(&c.parameter),
            })
        })
        .collect();
    Ok(TaskReport::ok(json!({ "circuits": list })))
}

pub fn chambers_report(h: &HypertoricData, arr: &TropicalArrangement) -> TaskReport {
    let tropical: Vec<Value> = arr
        .chambers
        .iter()
        .map(|c| json!({"label": c.to_string(), "witness": c.witness.iter().map(rat).collect::<Vec<_>>()}))
        .collect();
    let real: Vec<Value> = real_chambers(h)
        .iter()
        .map(|c| {
            json!({
                "signs": c.signs.iter().map(|s| s.to_string()).collect::<String>(),
                "witness": c.witness.iter().map(rat).collect::<Vec<_>>(),
            })
        })
        .collect();
    TaskReport::ok(json!({"tropical": tropical, "real": real}))
}

pub fn strata_report(h: &HypertoricData, arr: &TropicalArrangement) -> TaskReport {
    let list: Vec<Value> = arr
        .strata
        .iter()
        .map(|s| {
            let ties: BTreeMap<String, Vec<usize>> = s
                .ties
                .iter()
                .map(|(j, v)| ((j + 1).to_string(), v.clone()))
                .collect();
            let adjacent: Vec<String> = arr
                .adjacent_chambers(s)
                .iter()
                .map(|c| {
                    format!(
                        "({})",
                        c.iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    )
                })
                .collect();
            json!({
                "name": s.name(),
                "dimension": s.dimension,
                "ties": ties,
                "admissible": admissible(s, h),
                "adjacent_chambers": adjacent,
            })
        })
        .collect();
    TaskReport::ok(json!({ "strata": list }))
}

fn numeric(poly: &LaurentPoly, values: &BTreeMap<Var, BigRational>) -> String {
    poly.eval_partial(values).to_string()
}

pub fn mirror_report(
    h: &HypertoricData,
    arr: &TropicalArrangement,
    values: Option<&BTreeMap<Var, BigRational>>,
) -> Result<TaskReport, String> {
    let eqs = mirror_equations(h);
    let mut gfs = Vec::new();
    for c in &arr.chambers {
        for j in 1..=h.d {
            let (u, v) = generating_functions(h, &c.h, j).map_err(|e| e.to_string())?;
            gfs.push(
                json!({"chamber": c.to_string(), "j": j, "u": u.to_string(), "v": v.to_string()}),
            );
        }
    }
    let mut value = json!({
        "equations": eqs.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "generating_functions": gfs,
    });
    if let Some(values) = values {
        let num: Vec<String> = eqs
            .iter()
            .map(|e| format!("u{j}*v{j} = {}", numeric(&e.rhs(), values), j = e.j))
            .collect();
        value["numeric_equations"] = json!(num);
    }
    Ok(TaskReport::ok(value))
}

fn transition_value(atlas: &Atlas, t: &Transition) -> Value {
    let images: BTreeMap<String, String> = t
        .images
        .iter()
        .map(|(v, w)| (v.to_string(), w.display(&atlas.data)))
        .collect();
    json!({"source": t.source.to_string(), "target": t.target.to_string(), "images": images})
}

pub fn build_faulty_atlas(
    h: &HypertoricData,
    arr: &TropicalArrangement,
    faults: &Faults,
) -> Result<Atlas, String> {
    let mut atlas = build_atlas_from(h, arr.clone()).map_err(|e| e.to_string())?;
    for &i in &faults.flip_delta {
        if i >= atlas.chamber_transitions.len() {
            return Err(format!(
                "/faults/flipDelta: transition {i} out of range ({} transitions)",
                atlas.chamber_transitions.len()
            ));
        }
        atlas.flip_delta(i);
    }
    Ok(atlas)
}

pub fn atlas_report(atlas: &Atlas) -> TaskReport {
    let charts: Vec<Value> = atlas
        .charts
        .iter()
        .map(|c| {
            json!({
                "id": c.id.to_string(),
                "kind": format!("{:?}", c.kind).to_lowercase(),
                "name": c.name,
                "variables": c.variables.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "relations": c.relations.iter().map(|(l, r)| format!("{l} = {r}")).collect::<Vec<_>>(),
            })
        })
        .collect();
    TaskReport::ok(json!({
        "charts": charts,
        "transitions": atlas.chamber_transitions.iter().map(|t| transition_value(atlas, t)).collect::<Vec<_>>(),
        "embeddings": atlas.embeddings.iter().map(|t| transition_value(atlas, t)).collect::<Vec<_>>(),
        "non_admissible": atlas.non_admissible.iter().map(|&i| atlas.arrangement.strata[i].name()).collect::<Vec<_>>(),
    }))
}

fn check_value(c: &CheckResult) -> Value {
    json!({"passed": c.passed, "checked": c.checked, "failures": c.failures})
}

pub fn verify_report(atlas: &Atlas) -> TaskReport {
    let report = verify_atlas(atlas);
    let volume = verify_volume_form(atlas);
    let mut failed: Vec<String> = report
        .checks()
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.to_string())
        .collect();
    if !volume.passed() {
        failed.push("volume_form".to_string());
    }
    let signs: BTreeMap<String, Value> = volume
        .entries
        .iter()
        .map(|e| {
            (
                format!("{} -> {}", e.source, e.target),
                e.sign.map_or(Value::Null, Value::from),
            )
        })
        .collect();
    let volume_failures: Vec<String> = volume
        .entries
        .iter()
        .filter(|e| e.sign.is_none())
        .map(|e| format!("{} -> {}: residual {}", e.source, e.target, e.residual))
        .collect();
    let symplectic: Vec<Value> = volume
        .entries
        .iter()
        .filter(|e| !e.symplectic_residual.is_zero())
        .map(|e| json!({"transition": format!("{} -> {}", e.source, e.target), "residual": e.symplectic_residual.to_string()}))
        .collect();
    let value = json!({
        "inverse": check_value(&report.inverse),
        "cocycle": check_value(&report.cocycle),
        "compatibility": check_value(&report.compatibility),
        "descent": check_value(&report.descent),
        "volume_form": {
            "passed": volume.passed(),
            "checked": volume.entries.len(),
            "signs": signs,
            "failures": volume_failures,
        },
        "symplectic_form": {
            "transitions": volume.entries.len(),
            "nonzero_residuals": symplectic,
        },
        "failed_checks": failed,
        "passed": failed.is_empty(),
    });
    TaskReport {
        value,
        failures: failed,
    }
}

pub fn multiplicative_report(h: &HypertoricData, faults: &Faults) -> TaskReport {
    let phi = match Phi::new(h) {
        Ok(p) => p,
        Err(e) => {
            return TaskReport {
                value: json!({"error": e.to_string(), "passed": false}),
                failures: vec!["phi".to_string()],
            }
        }
    };
    let mut phi = phi;
    for &i in &faults.phi_sign {
        if (1..=h.d).contains(&i) {
            phi.perturb_sign(i);
        }
    }
    let pi: Vec<Value> = phi.pi.entries.to_rows().iter().map(|r| ints(r)).collect();
    let generators: Vec<Value> = (0..h.d)
        .map(|i| {
            json!({
                "i": i + 1,
                "z": phi.generators.bold_z[i].to_string(),
                "w": phi.generators.bold_w[i].to_string(),
                "sign": phi.signs[i],
            })
        })
        .collect();
    match verify_phi_with(h, &phi) {
        Ok(report) => {
            let equations: Vec<Value> = report
                .equations
                .iter()
                .map(|e| {
                    json!({
                        "i": e.i,
                        "lhs": e.lhs.to_string(),
                        "rhs": e.rhs.to_string(),
                        "residual": e.residual.to_string(),
                    })
                })
                .collect();
            let cancellations: Vec<Value> = report
                .cancellations
                .iter()
                .map(|(l, r)| json!({"l": l, "residual": r.to_string()}))
                .collect();
            let passed = report.passed();
            TaskReport {
                value: json!({
                    "pi": pi,
                    "totally_unimodular": phi.pi.totally_unimodular,
                    "generators": generators,
                    "equations": equations,
                    "cancellations": cancellations,
                    "passed": passed,
                }),
                failures: if passed {
                    Vec::new()
                } else {
                    vec!["verify_phi".to_string()]
                },
            }
        }
        Err(e) => TaskReport {
            value: json!({"pi": pi, "error": e.to_string(), "passed": false}),
            failures: vec!["verify_phi".to_string()],
        },
    }
}

pub fn periods_report(
    h: &HypertoricData,
    values: Option<&BTreeMap<Var, BigRational>>,
) -> TaskReport {
    let support: Vec<Value> = period_support(h)
        .iter()
        .map(|p| {
            let mut v = json!({"hyperplane": p.k + 1, "equation": p.to_string()});
            if let Some(values) = values {
                let m = LaurentPoly::monomial(p.monomial.clone());
                v["numeric"] = json!(format!("{} = -1", numeric(&m, values)));
            }
            v
        })
        .collect();
    TaskReport::ok(json!({
        "support": support,
        "form": "1 + Z_k = 0",
        "note": "the support is the union of the zero loci of the wall factors 1 + Z_k; the variant q_i Z_i^lambda_i = -1 does not match these factors and is not used",
    }))
}
