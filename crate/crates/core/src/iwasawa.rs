//! Iwasawa series built from Shintani measures: partial series Z, the class sums
//! Y and X at the raised modulus, the Dirac measure B*, and a Kubota–Leopoldt oracle.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::measures::{alpha_table, gamma_poly, ExponentMode, FiniteLevelMeasure};
use crate::numberfield::{
    prime_ideals_above, ray_class_data, Character, FieldData, FieldElem, IdealHNF, RayClassData,
};
use crate::padic::{
    add_mod, angle, bigint_mod, embed_root, inv_mod, mul_mod, pow_u64, q_of, teichmuller, vq, LuTable, PadicInt,
};
use crate::shintani::{
    choose_twist, cone_decomposition, enumerate_residues, reflection_pairing, twisted_partial_zeta, Cone,
    ResidueLattice, TraceScaling, TwistData,
};
use crate::{Error, Result};

/// An element of `(Z/p^n)[T]/((1+T)^S − 1)` in the basis `(1+T)^k`, `0 ≤ k < S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IwasawaPoly {
    pub p: u64,
    pub n: u32,
    pub ell: u32,
    pub coeffs: Vec<u64>,
}

impl IwasawaPoly {
    pub fn zero(p: u64, n: u32, ell: u32, slots: u64) -> Self {
        IwasawaPoly { p, n, ell, coeffs: vec![0; slots as usize] }
    }

    pub fn modulus(&self) -> u64 {
        pow_u64(self.p, self.n)
    }

    pub fn slots(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add_at(&mut self, k: usize, v: u64) {
        let m = self.modulus();
        let i = k % self.coeffs.len();
        self.coeffs[i] = add_mod(self.coeffs[i], v % m, m);
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if (self.p, self.n, self.coeffs.len()) != (o.p, o.n, o.coeffs.len()) {
            return Err(Error::NotCompatible("series of different shape".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        let mut r = self.clone();
        for (k, v) in o.coeffs.iter().enumerate() {
            r.add_at(k, *v);
        }
        Ok(r)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&-PadicInt::one(self.p, self.n)))
    }

    pub fn scale(&self, c: &PadicInt) -> Self {
        let m = self.modulus();
        let cv = c.value() % m;
        let coeffs = self.coeffs.iter().map(|&v| mul_mod(v, cv, m)).collect();
        IwasawaPoly { coeffs, ..self.clone() }
    }

    /// Multiply by `(1+T)^k`.
    pub fn shift(&self, k: i64) -> Self {
        let s = self.coeffs.len() as i64;
        let mut coeffs = vec![0; s as usize];
        for (i, v) in self.coeffs.iter().enumerate() {
            coeffs[(i as i64 + k).rem_euclid(s) as usize] = *v;
        }
        IwasawaPoly { coeffs, ..self.clone() }
    }

    /// Reindex `k ↦ s0 − k`.
    pub fn reflect(&self, s0: i64) -> Self {
        let s = self.coeffs.len() as i64;
        let mut coeffs = vec![0; s as usize];
        for (i, v) in self.coeffs.iter().enumerate() {
            coeffs[(s0 - i as i64).rem_euclid(s) as usize] = *v;
        }
        IwasawaPoly { coeffs, ..self.clone() }
    }

    /// Image modulo `(1+T)^{S/p} − 1`.
    pub fn coarsen(&self) -> Result<Self> {
        let s = self.coeffs.len();
        if s % self.p as usize != 0 || self.ell == 0 {
            return Err(Error::Invalid("cannot coarsen below level 0".into()));
        }
        let mut r = IwasawaPoly::zero(self.p, self.n, self.ell - 1, (s / self.p as usize) as u64);
        for (k, v) in self.coeffs.iter().enumerate() {
            r.add_at(k, *v);
        }
        Ok(r)
    }

    fn val(&self, v: u64) -> Option<u32> {
        (v % self.modulus() != 0).then(|| PadicInt::from_u64(self.p, self.n, v).valuation())
    }

    /// Least p-adic valuation of a coefficient; `None` when every coefficient vanishes mod `p^n`.
    ///
    /// The binomial change of basis to powers of T is unitriangular, so this is also μ of the
    /// T-expansion.
    pub fn mu(&self) -> Option<u32> {
        self.coeffs.iter().filter_map(|&v| self.val(v)).min()
    }

    /// First index attaining `mu`.
    pub fn witness(&self) -> Option<usize> {
        let mu = self.mu()?;
        self.coeffs.iter().position(|&v| self.val(v) == Some(mu))
    }

    /// `v_p(self − o)` over all coefficients, capped at the working precision.
    pub fn agreement(&self, o: &Self) -> Result<u32> {
        Ok(self.sub(o)?.mu().unwrap_or(self.n))
    }

    /// Value at `1 + T = u^s`.
    pub fn evaluate_at(&self, u: &PadicInt, s: i64) -> Result<PadicInt> {
        let x = u.truncate(self.n).pow_signed(s)?;
        let mut acc = PadicInt::zero(self.p, self.n);
        let mut xk = PadicInt::one(self.p, self.n);
        for &c in &self.coeffs {
            acc = acc + PadicInt::from_u64(self.p, self.n, c) * xk;
            xk = xk * x;
        }
        Ok(acc)
    }

    /// Coefficients of `T^i`, `i < S`.
    pub fn t_coefficients(&self) -> Vec<u64> {
        let m = self.modulus();
        let s = self.coeffs.len();
        let mut out = vec![0u64; s];
        // row k of Pascal's triangle, updated in place
        let mut row = vec![0u64; s];
        row[0] = 1;
        for k in 0..s {
            if k > 0 {
                for i in (1..=k).rev() {
                    row[i] = add_mod(row[i], row[i - 1], m);
                }
            }
            let a = self.coeffs[k];
            if a != 0 {
                for i in 0..=k {
                    out[i] = add_mod(out[i], mul_mod(a, row[i], m), m);
                }
            }
        }
        out
    }
}

/// Working level: measures at `p^h`, series modulo `(1+T)^{p^ℓ} − 1` and `p^prec`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Level {
    pub p: u64,
    pub h: u32,
    pub ell: u32,
    pub prec: u32,
    pub u: u64,
}

impl Level {
    pub fn new(p: u64, h: u32, ell: u32, prec: u32) -> Result<Self> {
        if !crate::numberfield::is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        if prec == 0 || (prec as f64) * (p as f64).log2() > 60.0 {
            return Err(Error::Invalid(format!("precision {p}^{prec} out of range")));
        }
        let u = if p == 2 { 5 } else { 1 + p };
        Ok(Level { p, h, ell, prec, u })
    }

    pub fn u_padic(&self) -> PadicInt {
        PadicInt::from_u64(self.p, self.prec, self.u)
    }

    pub fn lu_table(&self) -> LuTable {
        LuTable::new(self.p, self.ell, self.u)
    }

    fn pm(&self, v: u64) -> PadicInt {
        PadicInt::from_u64(self.p, self.prec, v)
    }
}

/// Every prime above p divides f.
pub fn check_p_divides(field: &FieldData, f: &IdealHNF, p: u64) -> Result<()> {
    for pr in prime_ideals_above(field, p) {
        if !f.is_subset(&pr) {
            return Err(Error::NotCompatible(format!("f = {f} is not divisible by {pr} above {p}")));
        }
    }
    Ok(())
}

/// Cones and residues of one ray class.
#[derive(Clone, Debug)]
pub struct ClassCones {
    pub rep: IdealHNF,
    pub generator: FieldElem,
    pub norm: BigInt,
    pub lattices: Vec<ResidueLattice>,
}

#[derive(Clone, Debug)]
pub struct ModulusData {
    pub f: IdealHNF,
    pub rcd: RayClassData,
    pub inverse: Vec<usize>,
    pub classes: Vec<ClassCones>,
}

impl ModulusData {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn all_lattices(&self) -> Vec<&ResidueLattice> {
        self.classes.iter().flat_map(|c| c.lattices.iter()).collect()
    }
}

/// A totally positive associate of `g`, if one exists.
pub fn positive_associate(field: &FieldData, g: &FieldElem) -> Option<FieldElem> {
    if field.n == 1 {
        return Some(if g.a.is_negative() { field.neg(g) } else { g.clone() });
    }
    let e = &field.eps0;
    [FieldElem::one(), FieldElem::int(-1, 0), e.clone(), field.neg(e)]
        .iter()
        .map(|u| field.mul(g, u))
        .find(|x| field.is_totally_positive(x))
}

pub fn build_modulus(field: &FieldData, f: &IdealHNF, scaling: TraceScaling) -> Result<ModulusData> {
    let rcd = ray_class_data(field, f)?;
    let dec0 = cone_decomposition(field, f, &IdealHNF::unit(field.n), TraceScaling::None)?;
    let classes = (0..rcd.len())
        .into_par_iter()
        .map(|i| {
            let rep = rcd.reps[i].clone();
            let generator = rcd.rep_gens[i].clone();
            let base = positive_associate(field, &generator).unwrap_or_else(FieldElem::one);
            let dec = dec0.rebase(field, &base, &rep.mul(field, f), scaling)?;
            let lattices = enumerate_residues(field, &dec, &rep)?;
            Ok(ClassCones { norm: rep.norm_int(), rep, generator, lattices })
        })
        .collect::<Result<Vec<_>>>()?;
    let e = rcd.identity();
    let inverse = (0..rcd.len())
        .into_par_iter()
        .map(|a| (0..rcd.len()).find(|&b| rcd.mul_table[a][b] == e).unwrap())
        .collect();
    Ok(ModulusData { f: f.clone(), rcd, inverse, classes })
}

/// Smallest admissible twist prime for every lattice in `mods`, or the forced one.
pub fn common_twist(field: &FieldData, mods: &[&ModulusData], p: u64, forced: Option<u64>) -> Result<TwistData> {
    let lats: Vec<&ResidueLattice> = mods.iter().flat_map(|m| m.all_lattices()).collect();
    let f = &mods[0].f;
    let tw = match forced {
        Some(c) => {
            let mut exclude: Vec<u64> = (2..c).collect();
            exclude.push(p);
            choose_twist(field, f, &lats, &exclude, c)?
        }
        None => choose_twist(field, f, &lats, &[p], 500)?,
    };
    for m in &mods[1..] {
        if !tw.c_ideal.is_coprime(field, &m.f) {
            return Err(Error::NotCompatible(format!("twist {} meets {}", tw.c_ideal, m.f)));
        }
    }
    Ok(tw)
}

/// `χ(class)` in `Z/p^prec`.
pub fn chi_padic(chi: &Character, class: usize, p: u64, prec: u32) -> Result<PadicInt> {
    match chi.order {
        1 | 2 => {
            let s = chi.sign_value(class)?;
            Ok(if s == 1 { PadicInt::one(p, prec) } else { -PadicInt::one(p, prec) })
        }
        o if (p - 1) % o == 0 => embed_root(p, prec, o, chi.values[class] as i64),
        o => Err(Error::CharacterOrderUnsupported(o)),
    }
}

/// The character of `to` obtained by composing with the projection to `from`.
pub fn pullback_character(field: &FieldData, from: &RayClassData, chi: &Character, to: &RayClassData) -> Result<Character> {
    let values = to
        .rep_gens
        .iter()
        .map(|g| {
            from.class_of_element(field, g)
                .map(|c| chi.values[c])
                .ok_or_else(|| Error::NotCompatible(format!("{g} is not a unit mod {}", from.modulus)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Character { values, order: chi.order, even: chi.even })
}

fn vp_big(x: &BigInt, p: u64) -> u32 {
    if x.is_zero() {
        u32::MAX
    } else {
        crate::padic::val_int(x, p)
    }
}

/// The box exponents `L_u(N(y)) mod p^ℓ` must be constant on every box of level h.
pub fn check_constancy(field: &FieldData, lats: &[ResidueLattice], lv: &Level) -> Result<()> {
    let need = lv.ell + vq(lv.p);
    for lat in lats {
        let ok = if field.n == 1 {
            let v = lat.basis[0].a.to_integer();
            lv.h.saturating_add(vp_big(&v, lv.p)) >= need
        } else {
            let mut g = BigInt::zero();
            for v in &lat.basis {
                for b in field.integral_basis() {
                    g = g.gcd(&field.trace(&field.mul(&b, v)).to_integer());
                }
            }
            let (v1, v2) = (&lat.basis[0], &lat.basis[1]);
            let gn = field
                .norm(v1)
                .to_integer()
                .gcd(&field.norm(v2).to_integer())
                .gcd(&field.trace(&field.mul(v1, &field.conj(v2))).to_integer());
            let lin = lv.h.saturating_add(vp_big(&g, lv.p));
            let quad = (2 * lv.h).saturating_add(vp_big(&gn, lv.p));
            lin.min(quad) >= need
        };
        if !ok {
            return Err(Error::Invalid(format!(
                "h = {} too small: L_u(N y) mod {}^{} is not constant on boxes of cone {}",
                lv.h, lv.p, lv.ell, lat.cone
            )));
        }
    }
    Ok(())
}

fn reduce_table(table: &[BigRational], p: u64, prec: u32) -> Result<Vec<PadicInt>> {
    table.iter().map(|r| PadicInt::from_rational(r, p, prec)).collect()
}

/// `ω(N a) (1+T)^{−L_u(N a)}` scaled by `(−1)^n`, the class prefactor of Z.
fn class_prefactor(field: &FieldData, norm: &BigInt, lv: &Level, table: &LuTable) -> Result<(PadicInt, i64)> {
    let w = teichmuller(&PadicInt::from_bigint(lv.p, lv.prec, norm));
    let w = if field.n % 2 == 1 { -w } else { w };
    let l = table.get_signed(norm).ok_or_else(|| Error::DomainError(format!("L_u({norm})")))?;
    Ok((w, -(l as i64)))
}

/// `Z(a⁻¹, T)` for the class `class` of `md`, from the α-masses at level h.
pub fn partial_series(
    field: &FieldData,
    md: &ModulusData,
    class: usize,
    twist: &TwistData,
    lv: &Level,
) -> Result<IwasawaPoly> {
    let cc = &md.classes[class];
    check_constancy(field, &cc.lattices, lv)?;
    let (p, h, prec) = (lv.p, lv.h, lv.prec);
    let big_m = q_of(p) * pow_u64(p, lv.ell);
    let table = lv.lu_table();
    let slots = pow_u64(p, lv.ell) as usize;
    let c = twist.c_int;
    let side = pow_u64(p, h);
    let n = field.n;
    let (t, s) = (field.t.rem_euclid(big_m as i64) as u64, field.s.rem_euclid(big_m as i64) as u64);
    let norm_mod = |a: u64, b: u64| -> u64 {
        if n == 1 {
            a
        } else {
            let x = add_mod(mul_mod(a, a, big_m), mul_mod(t, mul_mod(a, b, big_m), big_m), big_m);
            (x + big_m - mul_mod(s, mul_mod(b, b, big_m), big_m)) % big_m
        }
    };
    let mut poly = IwasawaPoly::zero(p, prec, lv.ell, slots as u64);
    for lat in &cc.lattices {
        let tw = twist.lattice_twist(field, lat)?;
        let g = reduce_table(&alpha_table(&tw.zexp, c, p, h)?, p, prec)?;
        let vco: Vec<(u64, u64)> = lat
            .basis
            .iter()
            .map(|v| {
                let (a, b) = v.int_coords();
                (bigint_mod(&a, big_m), bigint_mod(&b, big_m))
            })
            .collect();
        let zexp: Vec<u64> = tw.zexp.clone();
        let residues = lat.numerators();
        let counts = residues
            .par_iter()
            .map(|x| -> Result<Vec<u64>> {
                let (a0, b0) = lat.element(field, x).int_coords();
                let (a0, b0) = (bigint_mod(&a0, big_m), bigint_mod(&b0, big_m));
                let e = tw.e_of(x);
                let mut cnt = vec![0u64; c as usize * slots];
                let inner = if n == 2 { side } else { 1 };
                let (mut ya, mut yb, mut ge) = (a0, b0, e);
                for _ in 0..side {
                    let (mut za, mut zb, mut gz) = (ya, yb, ge);
                    for _ in 0..inner {
                        let nm = norm_mod(za, zb);
                        let k = table
                            .get(nm)
                            .ok_or_else(|| Error::DomainError(format!("N(y) ≡ {nm} is not a unit")))?;
                        cnt[gz as usize * slots + k as usize] += 1;
                        if n == 2 {
                            za = (za + vco[1].0) % big_m;
                            zb = (zb + vco[1].1) % big_m;
                            gz = (gz + zexp[1]) % c;
                        }
                    }
                    ya = (ya + vco[0].0) % big_m;
                    yb = (yb + vco[0].1) % big_m;
                    ge = (ge + zexp[0]) % c;
                }
                Ok(cnt)
            })
            .collect::<Result<Vec<_>>>()?;
        for cnt in counts {
            for (i, &k) in cnt.iter().enumerate() {
                if k != 0 {
                    let (gi, slot) = (i / slots, i % slots);
                    poly.add_at(slot, (lv.pm(k) * g[gi]).value());
                }
            }
        }
    }
    let (w, sh) = class_prefactor(field, &cc.norm, lv, &table)?;
    Ok(poly.scale(&w).shift(sh))
}

/// `Σ_a χ(a⁻¹) Z(a⁻¹, T)`.
pub fn chi_series(
    field: &FieldData,
    md: &ModulusData,
    chi: &Character,
    twist: &TwistData,
    lv: &Level,
) -> Result<IwasawaPoly> {
    let parts = (0..md.len()).map(|a| partial_series(field, md, a, twist, lv)).collect::<Result<Vec<_>>>()?;
    let mut acc = IwasawaPoly::zero(lv.p, lv.prec, lv.ell, pow_u64(lv.p, lv.ell));
    for (a, z) in parts.iter().enumerate() {
        let x = chi_padic(chi, md.inverse[a], lv.p, lv.prec)?;
        acc = acc.add(&z.scale(&x))?;
    }
    Ok(acc)
}

/// Cache of `G_0` tables keyed by the cone exponents.
#[derive(Default)]
pub struct AlphaCache {
    tables: Mutex<HashMap<(Vec<u64>, u64, u32), std::sync::Arc<Vec<BigRational>>>>,
}

impl AlphaCache {
    pub fn get(&self, zexp: &[u64], c: u64, p: u64, h: u32) -> Result<std::sync::Arc<Vec<BigRational>>> {
        let key = (zexp.to_vec(), c, if h == 0 { 0 } else { p as u32 * 1000 + h });
        if let Some(t) = self.tables.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let t = std::sync::Arc::new(alpha_table(zexp, c, p, h)?);
        self.tables.lock().unwrap().insert(key, t.clone());
        Ok(t)
    }
}

fn lattices_mass(field: &FieldData, lats: &[ResidueLattice], twist: &TwistData, cache: &AlphaCache) -> Result<BigRational> {
    let mut total = BigRational::zero();
    for lat in lats {
        let tw = twist.lattice_twist(field, lat)?;
        let g0 = cache.get(&tw.zexp, twist.c_int, 2, 0)?;
        for (e, k) in tw.histogram(lat).iter().enumerate() {
            if *k != 0 {
                total += &g0[e] * BigInt::from(*k);
            }
        }
    }
    Ok(total)
}

/// Total α-mass `M_a` of every class (the twisted partial value at s = 0).
pub fn class_masses(field: &FieldData, md: &ModulusData, twist: &TwistData) -> Result<Vec<BigRational>> {
    let cache = AlphaCache::default();
    md.classes.par_iter().map(|cc| lattices_mass(field, &cc.lattices, twist, &cache)).collect()
}

fn mass_weights(md: &ModulusData, chi: &Character, masses: &[BigRational], lv: &Level) -> Result<Vec<PadicInt>> {
    (0..md.len())
        .map(|a| {
            let x = chi_padic(chi, md.inverse[a], lv.p, lv.prec)?;
            let w = teichmuller(&PadicInt::from_bigint(lv.p, lv.prec, &md.classes[a].norm));
            Ok(x * w * PadicInt::from_rational(&masses[a], lv.p, lv.prec)?)
        })
        .collect()
}

/// `Y(χ, T) = Σ_a χ(a⁻¹) ω(Na) M_a (1+T)^{−L_u(Na)}`.
pub fn y_series(md: &ModulusData, chi: &Character, masses: &[BigRational], lv: &Level) -> Result<IwasawaPoly> {
    let table = lv.lu_table();
    let ws = mass_weights(md, chi, masses, lv)?;
    let mut poly = IwasawaPoly::zero(lv.p, lv.prec, lv.ell, pow_u64(lv.p, lv.ell));
    let slots = poly.slots() as i64;
    for (cc, w) in md.classes.iter().zip(&ws) {
        let l = table.get_signed(&cc.norm).ok_or_else(|| Error::DomainError(format!("L_u({})", cc.norm)))?;
        poly.add_at((-(l as i64)).rem_euclid(slots) as usize, w.value());
    }
    Ok(poly)
}

/// Every cone generator at the raised modulus has `v_p(Tr v) ≥ ℓ + 1`.
pub fn check_trace_normalization(field: &FieldData, md: &ModulusData, lv: &Level) -> Result<()> {
    for cc in &md.classes {
        for lat in &cc.lattices {
            for v in &lat.basis {
                let t = field.trace(v).to_integer();
                if vp_big(&t, lv.p) < lv.ell + 1 {
                    return Err(Error::TraceNormalizationFailed(format!("v_{}(Tr {v}) < {}", lv.p, lv.ell + 1)));
                }
            }
        }
    }
    Ok(())
}

/// `X(χ, T) = (1+T)^{n p^ℓ} Σ_a χ(a⁻¹) ω(Na) M_a (1+T)^{−⟨Na⟩}`, exponents read mod `p^{ℓ+1}`.
pub fn x_series(
    field: &FieldData,
    md: &ModulusData,
    chi: &Character,
    masses: &[BigRational],
    lv: &Level,
) -> Result<IwasawaPoly> {
    check_trace_normalization(field, md, lv)?;
    let ws = mass_weights(md, chi, masses, lv)?;
    let slots = pow_u64(lv.p, lv.ell + 1);
    let mut poly = IwasawaPoly::zero(lv.p, lv.prec, lv.ell + 1, slots);
    for (cc, w) in md.classes.iter().zip(&ws) {
        let a = angle(&PadicInt::from_bigint(lv.p, lv.ell + 1, &cc.norm)).value();
        poly.add_at(((slots - a) % slots) as usize, w.value());
    }
    Ok(poly.shift((field.n as u64 * pow_u64(lv.p, lv.ell)) as i64))
}

/// Diracs at `(−Na, a_ℓ p^ℓ, …, a_ℓ p^ℓ) mod p^{ℓ+1}` with weight `χ(a⁻¹) ω(Na) M_a`.
pub fn b_star(
    field: &FieldData,
    md: &ModulusData,
    chi: &Character,
    masses: &[BigRational],
    lv: &Level,
) -> Result<FiniteLevelMeasure<PadicInt>> {
    let ws = mass_weights(md, chi, masses, lv)?;
    let h = lv.ell + 1;
    let side = pow_u64(lv.p, h);
    let pl = pow_u64(lv.p, lv.ell);
    let zero = PadicInt::zero(lv.p, lv.prec);
    let mut m = FiniteLevelMeasure::zero(field.n + 1, lv.p, h, zero, "B*");
    for (cc, w) in md.classes.iter().zip(&ws) {
        let na = PadicInt::from_bigint(lv.p, h, &cc.norm);
        let al = teichmuller(&na).value() % side;
        let mut pt = vec![(side - na.value()) % side];
        pt.extend(std::iter::repeat(mul_mod(al, pl, side)).take(field.n));
        let i = m.index(&pt);
        m.masses[i] = m.masses[i] + *w;
    }
    Ok(m)
}

/// `L_u(1 − n p^ℓ) mod p^ℓ`.
pub fn gamma_offset(field: &FieldData, lv: &Level) -> Result<i64> {
    let t = BigInt::one() - BigInt::from(field.n as u64 * pow_u64(lv.p, lv.ell));
    Ok(lv.lu_table().get_signed(&t).ok_or(Error::DomainError("L_u(1 − n p^ℓ)".into()))? as i64)
}

/// Mass of a class after moving each residue and its cone by a random `ε ∈ E_+(f)`.
pub fn conjugated_mass(
    field: &FieldData,
    md: &ModulusData,
    class: usize,
    twist: &TwistData,
    seed: u64,
) -> Result<BigRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cache = AlphaCache::default();
    let eps = &md.rcd.eplus_gen;
    let c = twist.c_int;
    let mut total = BigRational::zero();
    for lat in &md.classes[class].lattices {
        for x in lat.numerators() {
            let j: i64 = rng.gen_range(-2..=2);
            let e = field.pow_signed(eps, j)?;
            let y = field.mul(&e, &lat.element(field, &x));
            let ex = twist.b_of(field, &y)?.mod_floor(&BigInt::from(c)).to_u64().unwrap();
            let zexp = lat
                .basis
                .iter()
                .map(|v| Ok(twist.b_of(field, &field.mul(&e, v))?.mod_floor(&BigInt::from(c)).to_u64().unwrap()))
                .collect::<Result<Vec<u64>>>()?;
            total += &cache.get(&zexp, c, 2, 0)?[ex as usize];
        }
    }
    Ok(total)
}

/// Result of comparing `G^{(γ)}` with `2G` for `γ = f_int p^r − 1`.
#[derive(Clone, Debug, Serialize)]
pub struct DoublingCheck {
    pub r: u64,
    pub gamma: String,
    /// `M_{γa} = (−1)^n M_a` for every class
    pub masses_reflect: bool,
    /// residues of `a` and `γa` pair off by `x ↦ −x mod 1`
    pub bijection: bool,
    /// `N(γa) = γ^n N(a)` for every class
    pub norms: bool,
    pub lu_mode: bool,
    pub plain_mode: bool,
}

pub fn doubling_check(
    field: &FieldData,
    md: &ModulusData,
    chi: &Character,
    masses: &[BigRational],
    twist: &TwistData,
    lv: &Level,
    r: u64,
) -> Result<DoublingCheck> {
    let p = lv.p;
    let f_int = md.f.min_positive_integer();
    let gamma = &f_int * BigInt::from(p).pow(r as u32) - BigInt::one();
    if (&gamma % BigInt::from(twist.c_int)).is_zero() {
        return Err(Error::NotCompatible(format!("γ = {gamma} lies in the twist prime")));
    }
    let g = FieldElem::from_bigint(gamma.clone(), BigInt::zero());
    let cache = AlphaCache::default();
    let per_class = md
        .classes
        .par_iter()
        .map(|cc| -> Result<(BigRational, BigInt, bool)> {
            let ga = cc.rep.scale(field, &g);
            let mut lats = vec![];
            let mut bij = true;
            for lat in &cc.lattices {
                let cone = Cone { basis: lat.basis.iter().map(|v| field.mul(&g, v)).collect(), open: lat.open.clone() };
                let lg = ResidueLattice::new(field, &ga, &md.f, &cone, lat.cone)?;
                bij &= reflection_pairing(lat, &lg).is_ok();
                lats.push(lg);
            }
            Ok((lattices_mass(field, &lats, twist, &cache)?, ga.norm_int(), bij))
        })
        .collect::<Result<Vec<_>>>()?;
    let sign = if field.n % 2 == 1 { -BigRational::one() } else { BigRational::one() };
    let gn = gamma.pow(field.n as u32);
    let masses_reflect = per_class.iter().zip(masses).all(|((mg, _, _), m)| *mg == &sign * m);
    let norms = per_class.iter().zip(&md.classes).all(|((_, ng, _), cc)| *ng == &gn * &cc.norm);
    let bijection = per_class.iter().all(|x| x.2);

    let table = lv.lu_table();
    let slots = pow_u64(p, lv.ell);
    let mut ok = [true, true];
    for (mode, flag) in ok.iter_mut().enumerate() {
        let exponent = |nm: &BigInt| -> Result<u64> {
            Ok(if mode == 0 {
                let l = table.get_signed(nm).ok_or_else(|| Error::DomainError(format!("L_u({nm})")))?;
                (slots - l as u64 % slots) % slots
            } else {
                (slots - bigint_mod(nm, slots)) % slots
            })
        };
        let mut g1 = IwasawaPoly::zero(p, lv.prec, lv.ell, slots);
        let mut g2 = g1.clone();
        for (a, cc) in md.classes.iter().enumerate() {
            let x = chi_padic(chi, md.inverse[a], p, lv.prec)?;
            let w = x * teichmuller(&PadicInt::from_bigint(p, lv.prec, &cc.norm))
                * PadicInt::from_rational(&masses[a], p, lv.prec)?;
            let (mg, ng, _) = &per_class[a];
            let wg = x * teichmuller(&PadicInt::from_bigint(p, lv.prec, ng)) * PadicInt::from_rational(mg, p, lv.prec)?;
            let k = exponent(&cc.norm)? as usize;
            g1.add_at(k, (w + w).value());
            g2.add_at(k, w.value());
            g2.add_at(exponent(ng)? as usize, wg.value());
        }
        *flag = g1 == g2;
    }
    Ok(DoublingCheck {
        r,
        gamma: gamma.to_string(),
        masses_reflect,
        bijection,
        norms,
        lu_mode: ok[0],
        plain_mode: ok[1],
    })
}

/// Regularized Kubota–Leopoldt series for K = Q:
/// `Σ_{a mod F p^h} χω⁻¹(a) E_{1,c}(a) (1+T)^{L_u(a)}`, `E_{1,c}(a) = B_1({a/M}) − c B_1({c⁻¹a/M})`.
pub fn kubota_leopoldt(
    field: &FieldData,
    rcd: &RayClassData,
    chi: &Character,
    conductor: u64,
    c: u64,
    lv: &Level,
) -> Result<IwasawaPoly> {
    if field.n != 1 {
        return Err(Error::UnsupportedDegree(field.n));
    }
    let p = lv.p;
    let m = conductor * pow_u64(p, lv.h);
    if m % (q_of(p) * pow_u64(p, lv.ell)) != 0 {
        return Err(Error::Invalid("level too small for the L_u buckets".into()));
    }
    let cinv = inv_mod(c % m, m).ok_or_else(|| Error::NotCompatible(format!("{c} is not prime to {m}")))?;
    let table = lv.lu_table();
    let slots = pow_u64(p, lv.ell);
    let mut poly = IwasawaPoly::zero(p, lv.prec, lv.ell, slots);
    let half = BigRational::new(BigInt::from(c as i64 - 1), BigInt::from(2));
    for a in 1..m {
        if a.gcd(&m) != 1 || a.gcd(&conductor) != 1 {
            continue;
        }
        let class = rcd
            .class_of_element(field, &FieldElem::int(a as i64, 0))
            .ok_or_else(|| Error::NotCompatible(format!("{a} not a unit mod {conductor}")))?;
        let x = chi_padic(chi, class, p, lv.prec)?;
        let w = teichmuller(&PadicInt::from_u64(p, lv.prec, a)).inv()?;
        let ap = mul_mod(cinv, a, m);
        let e = BigRational::new(BigInt::from(a as i128 - c as i128 * ap as i128), BigInt::from(m)) + &half;
        let k = table.get(a).ok_or_else(|| Error::DomainError(format!("L_u({a})")))?;
        poly.add_at(k as usize, (x * w * PadicInt::from_rational(&e, p, lv.prec)?).value());
    }
    Ok(poly)
}

/// One interpolation comparison at `s = 1 − m`.
#[derive(Clone, Debug, Serialize)]
pub struct InterpolationCheck {
    pub m: u32,
    pub lhs: String,
    pub rhs: String,
    pub padic_agreement_exponent: u32,
}

/// `Z(χ, u^{1−m} − 1)` against `Σ_a χ(a⁻¹) ζ_f(a⁻¹, c, 1−m)` for each m.
pub fn interpolation_checks(
    field: &FieldData,
    md: &ModulusData,
    chi: &Character,
    twist: &TwistData,
    lv: &Level,
    series: &IwasawaPoly,
    ms: &[u32],
) -> Result<Vec<InterpolationCheck>> {
    let mut out = vec![];
    for &m in ms {
        let lhs = series.evaluate_at(&lv.u_padic(), 1 - m as i64)?;
        let vals = md
            .classes
            .par_iter()
            .map(|cc| twisted_partial_zeta(field, &cc.rep, twist, m, &cc.lattices))
            .collect::<Result<Vec<_>>>()?;
        let mut rhs_p = PadicInt::zero(lv.p, lv.prec);
        let mut rhs_q = BigRational::zero();
        for (a, v) in vals.iter().enumerate() {
            let x = chi_padic(chi, md.inverse[a], lv.p, lv.prec)?;
            rhs_p = rhs_p + x * PadicInt::from_rational(v, lv.p, lv.prec)?;
            if chi.order <= 2 {
                rhs_q += v * BigInt::from(chi.sign_value(md.inverse[a])?);
            }
        }
        let rhs = if chi.order <= 2 { crate::cyclotomic::rat_string(&rhs_q) } else { rhs_p.value().to_string() };
        let d = lhs - rhs_p;
        let exp = if d.is_zero() { lv.prec } else { d.valuation() };
        out.push(InterpolationCheck { m, lhs: lhs.value().to_string(), rhs, padic_agreement_exponent: exp });
    }
    Ok(out)
}

/// The μ-invariants along the chain Z → Y → X → Γ(B*).
#[derive(Clone, Debug, Serialize)]
pub struct NormChain {
    #[serde(rename = "Z")]
    pub z: Option<u32>,
    #[serde(rename = "Y")]
    pub y: Option<u32>,
    #[serde(rename = "X")]
    pub x: Option<u32>,
    #[serde(rename = "GammaG")]
    pub gamma_g: Option<u32>,
}

impl NormChain {
    pub fn all_equal(&self) -> bool {
        self.z == self.y && self.y == self.x && self.x == self.gamma_g
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub twist: u64,
    pub classes_f: usize,
    pub classes_raised: usize,
    pub z: IwasawaPoly,
    pub chain: NormChain,
    /// `Y = (−1)^n Z` coefficientwise mod `p^N`
    pub y_matches_z: bool,
    /// `Γ(B*)` is Y under `k ↦ s0 − k`
    pub gamma_matches_y: bool,
    pub sinnott_lhs: Option<u32>,
    pub sinnott_rhs: Option<i64>,
    pub doubling: Vec<DoublingCheck>,
    pub epsilon_invariant: bool,
}

impl NormReport {
    pub fn mu_zero(&self) -> bool {
        self.chain.z == Some(0)
    }
}

/// Everything needed to run the norm chain for one character.
#[derive(Clone, Debug)]
pub struct Job {
    pub field: FieldData,
    pub f: IdealHNF,
    pub chi: Character,
    pub level: Level,
    pub twist_prime: Option<u64>,
}

/// Build the modulus data at f and at `p^{ℓ+1} f`, pick a common twist, and run the chain.
pub fn run_norm_chain(job: &Job, md_f: &ModulusData, progress: &dyn Fn(&str)) -> Result<NormReport> {
    let field = &job.field;
    let lv = &job.level;
    if !job.chi.even {
        return Err(Error::OddCharacter);
    }
    check_p_divides(field, &job.f, lv.p)?;
    let raised = job.f.scale(field, &FieldElem::int(pow_u64(lv.p, lv.ell + 1) as i64, 0));
    progress(&format!("raised modulus {raised}"));
    let md_l = build_modulus(field, &raised, TraceScaling::AtLeast { p: lv.p, rho: lv.ell + 2 })?;
    progress(&format!("{} classes mod f, {} at the raised modulus", md_f.len(), md_l.len()));
    let twist = common_twist(field, &[md_f, &md_l], lv.p, job.twist_prime)?;
    progress(&format!("twist prime {}", twist.c_int));
    let z = chi_series(field, md_f, &job.chi, &twist, lv)?;
    let chi_l = pullback_character(field, &md_f.rcd, &job.chi, &md_l.rcd)?;
    let masses = class_masses(field, &md_l, &twist)?;
    progress("class masses done");
    let y = y_series(&md_l, &chi_l, &masses, lv)?;
    let sign = if field.n % 2 == 1 { -PadicInt::one(lv.p, lv.prec) } else { PadicInt::one(lv.p, lv.prec) };
    let y_matches_z = y == z.scale(&sign);
    let x = x_series(field, &md_l, &chi_l, &masses, lv)?;
    let bs = b_star(field, &md_l, &chi_l, &masses, lv)?;
    let gam = gamma_poly(&bs, lv.u, lv.ell, ExponentMode::Lu, 0)?;
    let gamma_matches_y = gam == y.reflect(gamma_offset(field, lv)?);
    let rhs = gamma_poly(&bs.tilde(), lv.u, lv.ell + 1, ExponentMode::Plain, 0)?;
    let vp1 = crate::padic::val_int(&BigInt::from(lv.p - 1), lv.p) as i64;
    let sinnott_rhs = rhs.mu().map(|v| v as i64 - vp1);
    progress("Y, X, B* done");
    let phi = twist.c_int - 1;
    let doubling = [phi, 2 * phi]
        .iter()
        .map(|&r| doubling_check(field, &md_l, &chi_l, &masses, &twist, lv, r))
        .collect::<Result<Vec<_>>>()?;
    progress("doubling checks done");
    let mut epsilon_invariant = true;
    for a in 0..md_l.len().min(6) {
        epsilon_invariant &= conjugated_mass(field, &md_l, a, &twist, 17 + a as u64)? == masses[a];
    }
    Ok(NormReport {
        twist: twist.c_int,
        classes_f: md_f.len(),
        classes_raised: md_l.len(),
        chain: NormChain { z: z.mu(), y: y.mu(), x: x.mu(), gamma_g: gam.mu() },
        z,
        y_matches_z,
        gamma_matches_y,
        sinnott_lhs: gam.mu(),
        sinnott_rhs,
        doubling,
        epsilon_invariant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{list_even_characters, make_field};

    #[test]
    fn poly_basics() {
        let mut a = IwasawaPoly::zero(5, 3, 1, 5);
        a.add_at(1, 5);
        a.add_at(3, 125 + 2);
        assert_eq!(a.coeffs, vec![0, 5, 0, 2, 0]);
        assert_eq!(a.mu(), Some(0));
        assert_eq!(a.witness(), Some(3));
        let b = a.shift(3);
        assert_eq!(b.coeffs, vec![0, 2, 0, 0, 5]);
        assert_eq!(b.shift(-3), a);
        assert_eq!(a.reflect(0).reflect(0), a);
        assert_eq!(a.sub(&a).unwrap().mu(), None);
        // (1+T)^3 = 1 + 3T + 3T² + T³ ; plus 5(1+T)
        let t = a.t_coefficients();
        assert_eq!(t, vec![7, 11, 6, 2, 0]);
        let u = PadicInt::from_u64(5, 3, 6);
        let v = a.evaluate_at(&u, 1).unwrap();
        assert_eq!(v.value(), (5 * 6 + 2 * 216) % 125);
        assert_eq!(a.coarsen().unwrap().coeffs, vec![7]);
    }

    #[test]
    fn q_series_matches_kubota_leopoldt() {
        let k = make_field(1).unwrap();
        let f = IdealHNF::from_int(&k, 5);
        let lv = Level::new(5, 3, 1, 4).unwrap();
        let md = build_modulus(&k, &f, TraceScaling::None).unwrap();
        let chi = list_even_characters(&md.rcd, 2).into_iter().find(|c| c.order == 2).unwrap();
        let tw = common_twist(&k, &[&md], 5, Some(7)).unwrap();
        let z = chi_series(&k, &md, &chi, &tw, &lv).unwrap();
        let kl = kubota_leopoldt(&k, &md.rcd, &chi, 5, 7, &lv).unwrap();
        assert_eq!(kl, z.scale(&-PadicInt::one(5, 4)));
    }
}
