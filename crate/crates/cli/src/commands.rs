//! The subcommands. Each returns a JSON document and a pass flag.

use num_rational::BigRational;
use serde_json::{json, Value};

use iwasawa_core::iwasawa::{
    build_modulus, check_p_divides, chi_series, common_twist, interpolation_checks, run_norm_chain, Job, Level,
    ModulusData,
};
use iwasawa_core::numberfield::{Character, FieldData, FieldElem, IdealHNF};
use iwasawa_core::shintani::{
    brute_force_residues, certify_cover, cone_decomposition, l_value, twisted_values, untwist, TraceScaling,
};
use iwasawa_core::{Error, Result};

use crate::config::{parse_character, parse_modulus, RunConfig};

pub struct Outcome {
    pub json: Value,
    pub pass: bool,
}

/// Exact rational as `"numerator/denominator"`.
pub fn rat_json(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn elem_json(x: &FieldElem) -> Value {
    json!([rat_json(&x.a), rat_json(&x.b)])
}

fn field_json(k: &FieldData) -> Value {
    json!({"D": k.d, "degree": k.n, "disc": k.disc, "eps0": elem_json(&k.eps0)})
}

fn character_json(spec: Option<&str>, chi: &Character) -> Value {
    json!({"selector": spec.unwrap_or("trivial"), "order": chi.order, "values": chi.values})
}

pub fn decompose(cfg: &RunConfig, progress: &dyn Fn(&str)) -> Result<Outcome> {
    let k = cfg.field()?;
    let f = parse_modulus(&k, cfg.f.as_deref(), None)?;
    let dec = cone_decomposition(&k, &f, &f, TraceScaling::None)?;
    let cover = certify_cover(&k, &dec, 200, 1)?;
    let pass = cover.failures.is_empty();
    progress(&format!("cover: {}", if pass { "pass" } else { "FAIL" }));
    let cones: Vec<Value> = dec
        .cones
        .iter()
        .map(|c| json!({"basis": c.basis.iter().map(elem_json).collect::<Vec<_>>(), "open": c.open}))
        .collect();
    Ok(Outcome {
        json: json!({
            "field": field_json(&k),
            "modulus": f.to_string(),
            "unit": elem_json(&dec.unit),
            "unit_exponent": dec.unit_exp,
            "scale": dec.scale.to_string(),
            "cones": cones,
            "cover": {"samples": cover.samples, "failures": cover.failures, "result": if pass { "pass" } else { "fail" }},
            "pass": pass,
        }),
        pass,
    })
}

pub fn residues(cfg: &RunConfig, progress: &dyn Fn(&str)) -> Result<Outcome> {
    let k = cfg.field()?;
    let f = parse_modulus(&k, cfg.f.as_deref(), cfg.p)?;
    let md = build_modulus(&k, &f, TraceScaling::None)?;
    progress(&format!("{} ray classes mod {f}", md.len()));
    let mut pass = true;
    let mut classes = vec![];
    for (i, cc) in md.classes.iter().enumerate() {
        let mut cones = vec![];
        for lat in &cc.lattices {
            let set = lat.materialize();
            // the brute-force scan is only affordable for small parallelotopes
            let checked = if set.coords.len() <= 400 {
                let cone = iwasawa_core::shintani::Cone { basis: lat.basis.clone(), open: lat.open.clone() };
                let ok = brute_force_residues(&k, &cc.rep, &f, &cone)? == set.coords;
                pass &= ok;
                Some(ok)
            } else {
                None
            };
            cones.push(json!({
                "cone": lat.cone,
                "basis": lat.basis.iter().map(elem_json).collect::<Vec<_>>(),
                "residues": set.coords.iter().map(|x| x.iter().map(rat_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "brute_force_match": checked,
            }));
        }
        classes.push(json!({"class": i, "rep": cc.rep.to_string(), "cones": cones}));
    }
    Ok(Outcome { json: json!({"field": field_json(&k), "modulus": f.to_string(), "classes": classes, "pass": pass}), pass })
}

/// Untwisted partial values `ζ_f(a⁻¹, 1−m)` for every class.
pub fn partial_values(k: &FieldData, md: &ModulusData, twist: Option<u64>, m: u32) -> Result<(u64, Vec<BigRational>)> {
    let tw = common_twist(k, &[md], 0, twist)?;
    let lats: Vec<_> = md.classes.iter().map(|c| c.lattices.clone()).collect();
    let tv = twisted_values(k, &md.rcd, &tw, m, &lats)?;
    Ok((tw.c_int, untwist(k, &md.rcd, &tw, m, &tv)?))
}

pub fn zeta(cfg: &RunConfig, progress: &dyn Fn(&str)) -> Result<Outcome> {
    let k = cfg.field()?;
    let f = parse_modulus(&k, cfg.f.as_deref(), None)?;
    let md = build_modulus(&k, &f, TraceScaling::None)?;
    let ms = if cfg.m.is_empty() { vec![1] } else { cfg.m.clone() };
    let chi = cfg.chi.as_deref().map(|s| parse_character(&k, &md.rcd, Some(s), 2)).transpose()?;
    let mut rows = vec![];
    let mut totals = vec![];
    for &m in &ms {
        if m == 0 {
            return Err(Error::Invalid("--m must be at least 1".into()));
        }
        let (c, vals) = partial_values(&k, &md, cfg.twist, m)?;
        progress(&format!("m = {m}: twist prime {c}"));
        for (i, v) in vals.iter().enumerate() {
            rows.push(json!({"class": i, "rep": md.classes[i].rep.to_string(), "m": m, "s": 1 - m as i64, "value": rat_json(v)}));
        }
        let mut t = json!({"m": m, "s": 1 - m as i64, "twist": c});
        if cfg.dedekind {
            let total: BigRational = vals.iter().sum();
            t["dedekind"] = json!(rat_json(&total));
        }
        if let Some(chi) = &chi {
            let l = l_value(&md.rcd, chi, &vals).extract_rational()?;
            t["l_value"] = json!(rat_json(&l));
        }
        totals.push(t);
    }
    Ok(Outcome {
        json: json!({"field": field_json(&k), "modulus": f.to_string(), "values": rows, "totals": totals, "pass": true}),
        pass: true,
    })
}

fn level(cfg: &RunConfig) -> Result<Level> {
    let p = cfg.prime()?;
    let ell = cfg.ell.unwrap_or(1);
    let h = cfg.h.unwrap_or(ell + 2);
    Level::new(p, h, ell, cfg.n.unwrap_or(4))
}

struct Prepared {
    k: FieldData,
    f: IdealHNF,
    md: ModulusData,
    chi: Character,
    lv: Level,
}

fn prepare(cfg: &RunConfig, progress: &dyn Fn(&str)) -> Result<Prepared> {
    let k = cfg.field()?;
    let lv = level(cfg)?;
    let f = parse_modulus(&k, cfg.f.as_deref(), Some(lv.p))?;
    check_p_divides(&k, &f, lv.p)?;
    let md = build_modulus(&k, &f, TraceScaling::None)?;
    progress(&format!("{} ray classes mod {f}", md.len()));
    let chi = parse_character(&k, &md.rcd, cfg.chi.as_deref(), lv.p - 1)?;
    if !chi.even {
        return Err(Error::OddCharacter);
    }
    Ok(Prepared { k, f, md, chi, lv })
}

fn job_json(cmd: &str, pr: &Prepared, twist: u64) -> Value {
    json!({"command": cmd, "field": field_json(&pr.k), "p": pr.lv.p, "modulus": pr.f.to_string(), "twist": twist, "u": pr.lv.u})
}

fn level_json(lv: &Level) -> Value {
    json!({"h": lv.h, "ell": lv.ell, "N": lv.prec})
}

pub fn series(cfg: &RunConfig, progress: &dyn Fn(&str)) -> Result<Outcome> {
    let pr = prepare(cfg, progress)?;
    let tw = common_twist(&pr.k, &[&pr.md], pr.lv.p, cfg.twist)?;
    let z = chi_series(&pr.k, &pr.md, &pr.chi, &tw, &pr.lv)?;
    let checks = interpolation_checks(&pr.k, &pr.md, &pr.chi, &tw, &pr.lv, &z, &cfg.m)?;
    let mu = z.mu();
    let pass = mu == Some(0);
    Ok(Outcome {
        json: json!({
            "job": job_json("series", &pr, tw.c_int),
            "character": character_json(cfg.chi.as_deref(), &pr.chi),
            "level": level_json(&pr.lv),
            "coefficients": z.t_coefficients(),
            "group_ring_coefficients": z.coeffs,
            "mu": mu,
            "norm_chain": Value::Null,
            "interpolation_checks": checks,
            "pass": pass,
        }),
        pass,
    })
}

pub fn mu(cfg: &RunConfig, progress: &dyn Fn(&str)) -> Result<Outcome> {
    let pr = prepare(cfg, progress)?;
    let job = Job { field: pr.k.clone(), f: pr.f.clone(), chi: pr.chi.clone(), level: pr.lv, twist_prime: cfg.twist };
    let rep = run_norm_chain(&job, &pr.md, progress)?;
    let checks = if cfg.m.is_empty() {
        vec![]
    } else {
        let tw = common_twist(&pr.k, &[&pr.md], pr.lv.p, Some(rep.twist))?;
        interpolation_checks(&pr.k, &pr.md, &pr.chi, &tw, &pr.lv, &rep.z, &cfg.m)?
    };
    let doubling_ok = rep.doubling.iter().all(|d| d.lu_mode && d.masses_reflect && d.bijection);
    let pass = rep.chain.z == Some(0) && rep.chain.all_equal() && rep.y_matches_z && doubling_ok;
    Ok(Outcome {
        json: json!({
            "job": job_json("mu", &pr, rep.twist),
            "character": character_json(cfg.chi.as_deref(), &pr.chi),
            "level": level_json(&pr.lv),
            "coefficients": rep.z.t_coefficients(),
            "mu": rep.chain.z,
            "norm_chain": rep.chain,
            "interpolation_checks": checks,
            "details": {
                "classes": rep.classes_f,
                "classes_raised": rep.classes_raised,
                "witness": rep.z.witness(),
                "y_matches_z": rep.y_matches_z,
                "gamma_matches_y": rep.gamma_matches_y,
                "sinnott": {"lhs": rep.sinnott_lhs, "rhs": rep.sinnott_rhs},
                "doubling": rep.doubling,
                "epsilon_invariant": rep.epsilon_invariant,
            },
            "pass": pass,
        }),
        pass,
    })
}
