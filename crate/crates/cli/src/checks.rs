//! Invariant checks shared by `selftest` and the acceptance run.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use iwasawa_core::iwasawa::{
    build_modulus, chi_series, class_masses, common_twist, conjugated_mass, interpolation_checks,
    kubota_leopoldt, run_norm_chain, InterpolationCheck, IwasawaPoly, Job, Level, ModulusData,
    NormReport,
};
use iwasawa_core::measures::{
    alpha_jx, cyclo_valuation, gamma_poly, limit_form, mahler_coefficients, rational_function_value,
    sinnott_comparison, ExponentMode, FiniteLevelMeasure,
};
use iwasawa_core::numberfield::{make_field, FieldData, FieldElem, IdealHNF};
use iwasawa_core::padic::{pow_u64, LuTable, PadicInt};
use iwasawa_core::shintani::{
    brute_force_residues, certify_cover, cone_decomposition, reflection_pairing, twisted_values, untwist, Cone,
    ResidueLattice, TraceScaling,
};
use iwasawa_core::cyclotomic::{root_of_unity, CycloElem};
use iwasawa_core::Result;

use crate::commands::{partial_values, rat_json};
use crate::config::{parse_character, parse_modulus};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Run `f`, timing it; errors count as failures.
pub fn run_check(name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let t = Instant::now();
    let (pass, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Check { name: name.to_string(), pass, detail, seconds: t.elapsed().as_secs_f64() }
}

/// `ζ_K(−1)` summed over the narrow classes of the unit ideal.
pub fn dedekind_minus_one(d: i64) -> Result<BigRational> {
    let k = make_field(d)?;
    let md = build_modulus(&k, &IdealHNF::unit(k.n), TraceScaling::None)?;
    let (_, vals) = partial_values(&k, &md, None, 2)?;
    Ok(vals.iter().sum())
}

/// K = Q, f = (5): `ζ_f(a⁻¹, 0) = 1/2 − a*/5` with `a* ∈ [1,4]`, `a·a* ≡ 1 mod 5`; re-twisting
/// the untwisted values reproduces the twisted ones.
pub fn hurwitz() -> Result<(bool, String)> {
    let q = make_field(1)?;
    let f = IdealHNF::from_int(&q, 5);
    let md = build_modulus(&q, &f, TraceScaling::None)?;
    let tw = common_twist(&q, &[&md], 0, None)?;
    let lats: Vec<_> = md.classes.iter().map(|c| c.lattices.clone()).collect();
    let tv = twisted_values(&q, &md.rcd, &tw, 1, &lats)?;
    let z = untwist(&q, &md.rcd, &tw, 1, &tv)?;
    let mut ok = true;
    let mut rows = vec![];
    for (i, cc) in md.classes.iter().enumerate() {
        let a = cc.generator.a.to_integer().to_i64().unwrap().rem_euclid(5);
        let inv = (1..5).find(|k| (k * a) % 5 == 1).unwrap();
        let want = BigRational::new(BigInt::one(), BigInt::from(2)) - BigRational::new(BigInt::from(inv), BigInt::from(5));
        ok &= z[i] == want;
        rows.push(format!("a={a}: {}", rat_json(&z[i])));
    }
    let cc = md.rcd.class_of_ideal(&q, &tw.c_ideal).unwrap();
    let nc = BigRational::from_integer(BigInt::from(tw.c_int));
    for a in 0..md.len() {
        ok &= &nc * &z[md.rcd.mul_table[a][cc]] - &z[a] == tv[a];
    }
    Ok((ok, rows.join(", ")))
}

fn sqrt5_setup() -> Result<(FieldData, ModulusData)> {
    let k = make_field(5)?;
    let f = parse_modulus(&k, Some("sqrt5"), None)?;
    let md = build_modulus(&k, &f, TraceScaling::None)?;
    Ok((k, md))
}

/// Agreement exponents of `Z_h(χ_0, u^{1−m} − 1)` with the exact twisted values,
/// K = Q(√5), p = 5, f = (√5), series level ℓ = h.
pub fn interpolation_runs(hs: &[u32], ms: &[u32], prec: u32) -> Result<Vec<(u32, Vec<InterpolationCheck>)>> {
    let (k, md) = sqrt5_setup()?;
    let chi = iwasawa_core::numberfield::Character::trivial(md.len());
    let tw = common_twist(&k, &[&md], 5, None)?;
    hs.iter()
        .map(|&h| {
            let lv = Level::new(5, h, h, prec)?;
            let z = chi_series(&k, &md, &chi, &tw, &lv)?;
            Ok((h, interpolation_checks(&k, &md, &chi, &tw, &lv, &z, ms)?))
        })
        .collect()
}

/// One entry of the μ test matrix.
#[derive(Clone, Debug)]
pub struct MatrixEntry {
    pub label: &'static str,
    pub d: i64,
    pub p: u64,
    pub f: &'static str,
    pub chi: &'static str,
}

pub fn matrix() -> Vec<MatrixEntry> {
    vec![
        MatrixEntry { label: "Q(sqrt5), p=5, f=(sqrt5), trivial", d: 5, p: 5, f: "sqrt5", chi: "trivial" },
        MatrixEntry { label: "Q(sqrt5), p=3, f=(3), trivial", d: 5, p: 3, f: "3", chi: "trivial" },
        MatrixEntry { label: "Q(sqrt5), p=3, f=(3sqrt5), quadratic", d: 5, p: 3, f: "3*sqrt5", chi: "quad" },
        MatrixEntry { label: "Q, p=5, f=(5), quadratic", d: 1, p: 5, f: "5", chi: "quad5" },
    ]
}

pub fn run_entry(e: &MatrixEntry, lv: Level, progress: &dyn Fn(&str)) -> Result<NormReport> {
    let k = make_field(e.d)?;
    let f = parse_modulus(&k, Some(e.f), None)?;
    let md = build_modulus(&k, &f, TraceScaling::None)?;
    let chi = parse_character(&k, &md.rcd, Some(e.chi), 2)?;
    let job = Job { field: k, f, chi, level: lv, twist_prime: None };
    run_norm_chain(&job, &md, progress)
}

/// Shintani series and the Kubota–Leopoldt series for Q, p = 5, χ quadratic mod 5, twist c = 7.
/// Returns `(Z, KL)`; the two agree as `KL = −Z`.
pub fn kl_pair(lv: Level) -> Result<(IwasawaPoly, IwasawaPoly)> {
    let q = make_field(1)?;
    let f = IdealHNF::from_int(&q, 5);
    let md = build_modulus(&q, &f, TraceScaling::None)?;
    let chi = parse_character(&q, &md.rcd, Some("quad5"), 2)?;
    let tw = common_twist(&q, &[&md], 5, Some(7))?;
    let z = chi_series(&q, &md, &chi, &tw, &lv)?;
    let kl = kubota_leopoldt(&q, &md.rcd, &chi, 5, 7, &lv)?;
    Ok((z, kl))
}

fn coefficient_multiset(poly: &IwasawaPoly, p: u64, mode: ExponentMode) -> Vec<u64> {
    let mut v: Vec<u64> = match mode {
        ExponentMode::Angle => {
            poly.coeffs.iter().enumerate().filter(|(k, _)| *k as u64 % p == 1).map(|(_, &b)| b).collect()
        }
        _ => poly.coeffs.clone(),
    };
    v.sort_unstable();
    v
}

/// Coefficient multisets of the `L_u` and `⟨·⟩` transforms agree on random unit-supported measures.
pub fn permutation_suite(trials: usize, seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ok = true;
    for t in 0..trials {
        let p = [3u64, 5, 7][t % 3];
        let (ell, n, h) = (2u32, 5u32, 3u32);
        let u = 1 + p;
        let mut mu = FiniteLevelMeasure::zero(1, p, h, PadicInt::zero(p, n), "random");
        for i in 0..mu.masses.len() {
            if i as u64 % p != 0 {
                mu.masses[i] = PadicInt::from_u64(p, n, rng.gen_range(0..pow_u64(p, n)));
            }
        }
        let a = gamma_poly(&mu, u, ell, ExponentMode::Lu, 0)?;
        let b = gamma_poly(&mu, u, ell, ExponentMode::Angle, 0)?;
        ok &= coefficient_multiset(&a, p, ExponentMode::Lu) == coefficient_multiset(&b, p, ExponentMode::Angle);
    }
    Ok((ok, format!("{trials} random measures")))
}

/// The transform of `w·δ_a` is `w·(1+T)^{L_u(a)}`.
pub fn dirac_case() -> Result<(bool, String)> {
    let (p, ell, n) = (5u64, 2u32, 6u32);
    let lu = LuTable::new(p, ell, 1 + p);
    let mut ok = true;
    for a in [1u64, 2, 7, 13, 24, 101] {
        let w = PadicInt::from_u64(p, n, 3 * a + 5);
        let mu = FiniteLevelMeasure::dirac(1, p, 3, &[a % 125], w, PadicInt::zero(p, n));
        let g = gamma_poly(&mu, 1 + p, ell, ExponentMode::Lu, 0)?;
        let k = lu.get(a % 125).unwrap() as usize;
        ok &= g.coeffs.iter().enumerate().all(|(i, &b)| b == if i == k { w.value() } else { 0 });
    }
    Ok((ok, "six Diracs at level 3".into()))
}

/// Valuation equality on α-measures (d = 1, unit-restricted) and their products (d = 2,
/// restricted to unit coordinate sums), also after scaling by powers of p.
pub fn sinnott_toys() -> Result<(bool, String)> {
    let (c, p, h, ell, n) = (7u64, 5u64, 3u32, 1u32, 5u32);
    let u = 1 + p;
    let mut ok = true;
    let mut seen = vec![];
    let scale = |m: &FiniteLevelMeasure<BigRational>, k: u32| {
        let mut m = m.clone();
        let s = BigRational::from_integer(BigInt::from(p).pow(k));
        for x in m.masses.iter_mut() {
            *x = &*x * &s;
        }
        m
    };
    for b in 1..c {
        for e in [1u64, 3] {
            let a = alpha_jx(&[b], c, e, p, h)?.restrict_units();
            for k in 0..2 {
                let s = sinnott_comparison(&scale(&a, k).reduce(n)?, u, ell)?;
                ok &= s.equal();
                seen.push(s.lhs);
            }
        }
    }
    for (b1, b2) in [(1u64, 2u64), (3, 5), (2, 2), (6, 1)] {
        let a1 = alpha_jx(&[b1], c, 1, p, h)?;
        let a2 = alpha_jx(&[b2], c, 0, p, h)?;
        let m = a1.product(&a2)?.restrict_unit_sum();
        for k in 0..2 {
            let s = sinnott_comparison(&scale(&m, k).reduce(n)?, u, ell)?;
            ok &= s.equal();
            seen.push(s.lhs);
        }
    }
    seen.sort();
    seen.dedup();
    Ok((ok, format!("{} d=1 and 8 d=2 measures, μ values {seen:?}", 2 * 2 * (c - 1))))
}

/// Cover certification of the unit-ideal and f = (3) decompositions.
pub fn covers(ds: &[i64]) -> Result<(bool, String)> {
    let mut ok = true;
    for &d in ds {
        let k = make_field(d)?;
        for f in [IdealHNF::unit(2), IdealHNF::from_int(&k, 3)] {
            let dec = cone_decomposition(&k, &f, &f, TraceScaling::None)?;
            ok &= certify_cover(&k, &dec, 200, d as u64)?.failures.is_empty();
        }
    }
    Ok((ok, format!("D in {ds:?}, f in {{1, 3}}")))
}

/// Residue lattices against a direct scan of the parallelotopes.
pub fn residue_completeness() -> Result<(bool, String)> {
    let mut ok = true;
    let mut count = 0;
    for (d, g) in [(5, "sqrt5"), (5, "3"), (2, "2,1"), (13, "3"), (1, "5")] {
        let k = make_field(d)?;
        let f = parse_modulus(&k, Some(g), None)?;
        let md = build_modulus(&k, &f, TraceScaling::None)?;
        for cc in md.classes.iter().take(6) {
            for lat in cc.lattices.iter().take(3) {
                let cone = Cone { basis: lat.basis.clone(), open: lat.open.clone() };
                ok &= brute_force_residues(&k, &cc.rep, &f, &cone)? == lat.materialize().coords;
                count += 1;
            }
        }
    }
    Ok((ok, format!("{count} lattices")))
}

/// Residues of `a` and of `γa` (cones `γ·C`) pair off by `x ↦ −x mod 1`, `γ = f_int p^r − 1`.
pub fn reflection_bijection() -> Result<(bool, String)> {
    let k = make_field(5)?;
    let f = parse_modulus(&k, Some("25*sqrt5"), None)?;
    let md = build_modulus(&k, &f, TraceScaling::None)?;
    let mut ok = true;
    let mut count = 0;
    for r in [10u32, 20] {
        let gamma = f.min_positive_integer() * BigInt::from(5).pow(r) - BigInt::one();
        let g = FieldElem::from_bigint(gamma, BigInt::zero());
        for cc in md.classes.iter().take(10) {
            let ga = cc.rep.scale(&k, &g);
            for lat in &cc.lattices {
                let cone = Cone { basis: lat.basis.iter().map(|v| k.mul(&g, v)).collect(), open: lat.open.clone() };
                let lg = ResidueLattice::new(&k, &ga, &f, &cone, lat.cone)?;
                ok &= reflection_pairing(lat, &lg).is_ok();
                count += 1;
            }
        }
    }
    Ok((ok, format!("{count} cone pairs")))
}

/// Coarsening the level-h α-masses gives the level-(h−1) masses.
pub fn refinement() -> Result<(bool, String)> {
    let (c, p) = (7u64, 5u64);
    let mut ok = true;
    for zexp in [vec![3u64], vec![2, 5], vec![1, 6]] {
        for e in 0..c {
            for h in 1..=2 {
                let fine = alpha_jx(&zexp, c, e, p, h + 1)?;
                let coarse = alpha_jx(&zexp, c, e, p, h)?;
                ok &= fine.coarsen()?.masses == coarse.masses;
            }
        }
    }
    Ok((ok, "d in {1,2}, levels 1..3".into()))
}

fn rq(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Mahler coefficients of polynomials, the closed form of their Amice transforms,
/// and p-adic convergence of the level-h limit form.
pub fn mahler() -> Result<(bool, String)> {
    let z = root_of_unity(3, 1);
    let one = CycloElem::one(3);
    let inv = (&one - &z).invert()?;
    let mut ok = mahler_coefficients(&[rq(1)], 3) == vec![rq(1), rq(0), rq(0), rq(0)];
    ok &= mahler_coefficients(&[rq(0), rq(1)], 2) == vec![rq(0), rq(1), rq(0)];
    ok &= mahler_coefficients(&[rq(0), rq(0), rq(1)], 3) == vec![rq(0), rq(1), rq(2), rq(0)];
    ok &= rational_function_value(&mahler_coefficients(&[rq(1)], 3), &z)? == inv;
    ok &= rational_function_value(&mahler_coefficients(&[rq(0), rq(1)], 2), &z)? == &z * &(&inv * &inv);
    let want = &(&z * &(&one + &z)) * &(&inv * &(&inv * &inv));
    ok &= rational_function_value(&mahler_coefficients(&[rq(0), rq(0), rq(1)], 4), &z)? == want;
    let f = [rq(1), rq(-2), rq(3)];
    let exact = rational_function_value(&mahler_coefficients(&f, 4), &z)?;
    let mut vals = vec![];
    for h in 1..=4u32 {
        let v = cyclo_valuation(&(&limit_form(&f, &z, 5, h)? - &exact), 5).unwrap_or(i64::MAX);
        ok &= v >= h as i64;
        vals.push(v);
    }
    Ok((ok, format!("limit-form valuations {vals:?}")))
}

/// Class masses at `25√5` recomputed with every residue moved by a random `ε ∈ E_+(f)`.
pub fn epsilon_invariance() -> Result<(bool, String)> {
    let k = make_field(5)?;
    let f = parse_modulus(&k, Some("25*sqrt5"), None)?;
    let md = build_modulus(&k, &f, TraceScaling::AtLeast { p: 5, rho: 3 })?;
    let tw = common_twist(&k, &[&md], 5, None)?;
    let masses = class_masses(&k, &md, &tw)?;
    let mut ok = true;
    let n = md.len().min(12);
    for a in 0..n {
        for seed in 0..2 {
            ok &= conjugated_mass(&k, &md, a, &tw, 100 * a as u64 + seed)? == masses[a];
        }
    }
    Ok((ok, format!("{n} classes, 2 seeds each")))
}

/// The structural and measure-level checks, in a fixed order.
pub fn selftest_suite() -> Vec<Check> {
    vec![
        run_check("dedekind D=5", || Ok(dedekind_minus_one(5).map(|v| (rat_json(&v) == "1/30", rat_json(&v)))?)),
        run_check("dedekind D=2", || Ok(dedekind_minus_one(2).map(|v| (rat_json(&v) == "1/12", rat_json(&v)))?)),
        run_check("hurwitz f=(5)", hurwitz),
        run_check("cover certification", || covers(&[2, 3, 5, 13])),
        run_check("residue completeness", residue_completeness),
        run_check("reflection bijection", reflection_bijection),
        run_check("refinement consistency", refinement),
        run_check("mahler identities", mahler),
        run_check("epsilon-conjugation invariance", epsilon_invariance),
        run_check("gamma permutation (20 random)", || permutation_suite(20, 11)),
        run_check("gamma dirac", dirac_case),
        run_check("sinnott toys", sinnott_toys),
        run_check("kubota-leopoldt agreement", || {
            let (z, kl) = kl_pair(Level::new(5, 3, 1, 4)?)?;
            let a = kl.agreement(&z.scale(&-PadicInt::one(5, 4)))?;
            Ok((a >= 4, format!("agreement exponent {a}")))
        }),
    ]
}

/// Offset with `|Z_h(1−m) − ζ|_p ≤ p^{−(h−κ₀)}` for the Q(√5), p = 5, f = (√5) series.
pub const KAPPA0: i64 = -1;

/// Interpolation bound at every h, and strict growth of the agreement exponent with h.
pub fn interpolation(hs: &[u32]) -> Result<(bool, String)> {
    let runs = interpolation_runs(hs, &[4, 8], 10)?;
    let mut ok = true;
    let mut rows = vec![];
    for m in [4u32, 8] {
        let exps: Vec<u32> = runs
            .iter()
            .map(|(_, cs)| cs.iter().find(|c| c.m == m).map(|c| c.padic_agreement_exponent).unwrap_or(0))
            .collect();
        for (i, (h, _)) in runs.iter().enumerate() {
            ok &= exps[i] as i64 >= *h as i64 - KAPPA0;
            if i > 0 {
                ok &= exps[i] > exps[i - 1];
            }
        }
        rows.push(format!("m={m}: exponents {exps:?} at h={hs:?}"));
    }
    Ok((ok, rows.join("; ")))
}

/// μ = 0, norm-chain equality and the doubling check for one matrix entry.
pub fn entry_checks(e: &MatrixEntry, progress: &dyn Fn(&str)) -> Result<(bool, bool, String)> {
    let rep = run_entry(e, Level::new(e.p, 3, 1, 4)?, progress)?;
    let mu_ok = rep.chain.z == Some(0);
    let chain_ok = rep.chain.all_equal()
        && rep.y_matches_z
        && rep.gamma_matches_y
        && !rep.doubling.is_empty()
        && rep.doubling.iter().all(|d| d.lu_mode && d.masses_reflect && d.bijection && d.norms);
    let detail = format!(
        "{}: c={}, mu Z/Y/X/GammaG = {:?}/{:?}/{:?}/{:?}, doubling r={:?}",
        e.label,
        rep.twist,
        rep.chain.z,
        rep.chain.y,
        rep.chain.x,
        rep.chain.gamma_g,
        rep.doubling.iter().map(|d| d.r).collect::<Vec<_>>()
    );
    Ok((mu_ok, chain_ok, detail))
}

/// Everything, including the μ matrix and interpolation; the `selftest` command.
pub fn full_selftest(progress: &dyn Fn(&str)) -> Vec<Check> {
    let mut out = vec![];
    for c in selftest_suite() {
        progress(&format!("{}: {}", c.name, if c.pass { "pass" } else { "FAIL" }));
        out.push(c);
    }
    let c = run_check("interpolation Q(sqrt5) p=5", || interpolation(&[2, 3, 4]));
    progress(&format!("{}: {}", c.name, if c.pass { "pass" } else { "FAIL" }));
    out.push(c);
    for e in matrix() {
        let c = run_check(&format!("mu and norm chain, {}", e.label), || {
            let (a, b, d) = entry_checks(&e, progress)?;
            Ok((a && b, d))
        });
        progress(&format!("{}: {}", c.name, if c.pass { "pass" } else { "FAIL" }));
        out.push(c);
    }
    out
}
