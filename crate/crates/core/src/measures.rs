//! Finite-level p-adic measures on Z_p^d: box masses, restriction, twists,
//! reflections, Γ-transforms to Iwasawa polynomials, and Mahler expansions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cyclotomic::{inv_one_minus_root, root_of_unity, CycloElem};
use crate::shintani::trace_table;
use crate::iwasawa::IwasawaPoly;
use crate::padic::{angle, pow_u64, q_of, val_rational, vq, LuTable, PadicInt};
use crate::{Error, Result};

/// Values a measure can take on boxes.
pub trait Mass: Clone + Send + Sync + PartialEq + std::fmt::Debug {
    fn is_null(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    /// `None` for zero.
    fn val(&self, p: u64) -> Option<i64>;
}

impl Mass for BigRational {
    fn is_null(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn val(&self, p: u64) -> Option<i64> {
        (!self.is_zero()).then(|| val_rational(self, p))
    }
}

impl Mass for PadicInt {
    fn is_null(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        *self + *o
    }
    fn val(&self, _p: u64) -> Option<i64> {
        (!self.is_zero()).then(|| self.valuation() as i64)
    }
}

/// A measure known through its masses on the boxes `r + p^h Z_p^d`, `r ∈ [0, p^h)^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteLevelMeasure<T: Mass> {
    pub d: usize,
    pub p: u64,
    pub h: u32,
    pub masses: Vec<T>,
    pub zero: T,
    pub tag: String,
}

/// Exponent used by the Γ-transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExponentMode {
    /// `L_u(s) mod p^ℓ`
    Lu,
    /// `⟨s⟩ mod p^{ℓ+1}`
    Angle,
    /// `s mod p^ℓ`
    Plain,
}

impl<T: Mass> FiniteLevelMeasure<T> {
    pub fn zero(d: usize, p: u64, h: u32, zero: T, tag: &str) -> Self {
        let size = pow_u64(p, h).pow(d as u32) as usize;
        FiniteLevelMeasure { d, p, h, masses: vec![zero.clone(); size], zero, tag: tag.to_string() }
    }

    pub fn side(&self) -> u64 {
        pow_u64(self.p, self.h)
    }

    pub fn index(&self, r: &[u64]) -> usize {
        let s = self.side();
        r.iter().fold(0u64, |acc, &x| acc * s + x % s) as usize
    }

    pub fn point(&self, mut idx: usize) -> Vec<u64> {
        let s = self.side() as usize;
        let mut r = vec![0u64; self.d];
        for k in (0..self.d).rev() {
            r[k] = (idx % s) as u64;
            idx /= s;
        }
        r
    }

    pub fn dirac(d: usize, p: u64, h: u32, at: &[u64], weight: T, zero: T) -> Self {
        let mut m = Self::zero(d, p, h, zero, "dirac");
        let i = m.index(at);
        m.masses[i] = weight;
        m
    }

    pub fn from_fn<F: Fn(&[u64]) -> T>(d: usize, p: u64, h: u32, zero: T, tag: &str, f: F) -> Self {
        let mut m = Self::zero(d, p, h, zero, tag);
        for i in 0..m.masses.len() {
            let r = m.point(i);
            m.masses[i] = f(&r);
        }
        m
    }

    pub fn total(&self) -> T {
        self.masses.iter().fold(self.zero.clone(), |a, b| a.plus(b))
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if (self.d, self.p, self.h) != (o.d, o.p, o.h) {
            return Err(Error::NotCompatible("measures of different shape".into()));
        }
        let mut r = self.clone();
        for (x, y) in r.masses.iter_mut().zip(&o.masses) {
            *x = x.plus(y);
        }
        Ok(r)
    }

    /// Masses of the level `h − 1` boxes.
    pub fn coarsen(&self) -> Result<Self> {
        if self.h == 0 {
            return Err(Error::Invalid("cannot coarsen level 0".into()));
        }
        let mut out = Self::zero(self.d, self.p, self.h - 1, self.zero.clone(), &self.tag);
        let s = out.side();
        for (i, m) in self.masses.iter().enumerate() {
            if m.is_null() {
                continue;
            }
            let r: Vec<u64> = self.point(i).iter().map(|x| x % s).collect();
            let j = out.index(&r);
            out.masses[j] = out.masses[j].plus(m);
        }
        Ok(out)
    }

    /// Zero every box with a coordinate divisible by p.
    pub fn restrict_units(&self) -> Self {
        let mut out = self.clone();
        for i in 0..out.masses.len() {
            if self.point(i).iter().any(|x| x % self.p == 0) {
                out.masses[i] = self.zero.clone();
            }
        }
        out
    }

    /// `(α∘a)(r) = α(a·r)`.
    pub fn twist(&self, a: &[u64]) -> Result<Self> {
        if a.len() != self.d || a.iter().any(|x| x % self.p == 0) {
            return Err(Error::NonUnitTwist(format!("{a:?}")));
        }
        let s = self.side();
        let mut out = self.clone();
        for i in 0..out.masses.len() {
            let r: Vec<u64> = self.point(i).iter().zip(a).map(|(x, y)| (*x as u128 * *y as u128 % s as u128) as u64).collect();
            out.masses[i] = self.masses[self.index(&r)].clone();
        }
        Ok(out)
    }

    /// Negate the coordinates in the bitmask `subset`.
    pub fn reflect(&self, subset: u32) -> Self {
        let s = self.side();
        let mut out = self.clone();
        for i in 0..out.masses.len() {
            let r: Vec<u64> = self
                .point(i)
                .iter()
                .enumerate()
                .map(|(k, &x)| if subset >> k & 1 == 1 { (s - x) % s } else { x })
                .collect();
            out.masses[i] = self.masses[self.index(&r)].clone();
        }
        out
    }

    /// `Σ_I α∘κ_I` over all subsets.
    pub fn tilde(&self) -> Self {
        let mut acc = self.clone();
        for subset in 1..(1u32 << self.d) {
            acc = acc.add(&self.reflect(subset)).unwrap();
        }
        acc.tag = format!("tilde({})", self.tag);
        acc
    }

    /// Minimum valuation over boxes (`None` for the zero measure).
    pub fn norm_valuation(&self) -> Option<i64> {
        self.masses.iter().filter_map(|m| m.val(self.p)).min()
    }
}

/// Sign vector of the reflection κ_I: +1 off I, −1 on I.
pub fn reflection_signs(d: usize, subset: u32) -> Vec<i8> {
    (0..d).map(|k| if subset >> k & 1 == 1 { -1 } else { 1 }).collect()
}

pub fn measure_norm<T: Mass>(mu: &FiniteLevelMeasure<T>) -> Option<i64> {
    mu.norm_valuation()
}

impl FiniteLevelMeasure<BigRational> {
    pub fn reduce(&self, n: u32) -> Result<FiniteLevelMeasure<PadicInt>> {
        let masses = self.masses.iter().map(|m| PadicInt::from_rational(m, self.p, n)).collect::<Result<Vec<_>>>()?;
        Ok(FiniteLevelMeasure {
            d: self.d,
            p: self.p,
            h: self.h,
            masses,
            zero: PadicInt::zero(self.p, n),
            tag: self.tag.clone(),
        })
    }

    /// Product measure on Z_p^{d1+d2}.
    pub fn product(&self, o: &Self) -> Result<Self> {
        if (self.p, self.h) != (o.p, o.h) {
            return Err(Error::NotCompatible("product of measures at different levels".into()));
        }
        let d = self.d + o.d;
        Ok(Self::from_fn(d, self.p, self.h, BigRational::zero(), "product", |r| {
            &self.masses[self.index(&r[..self.d])] * &o.masses[o.index(&r[self.d..])]
        }))
    }

    /// Zero the boxes whose coordinate sum is divisible by p.
    pub fn restrict_unit_sum(&self) -> Self {
        let mut out = self.clone();
        for i in 0..out.masses.len() {
            if self.point(i).iter().sum::<u64>() % self.p == 0 {
                out.masses[i] = BigRational::zero();
            }
        }
        out
    }
}

/// Masses `Σ_δ ζ_c^{δ(e + Σ b_k r_k)} ∏_k 1/(1 − ζ_c^{δ b_k p^h})` of one residue, c prime.
pub fn alpha_jx(zexp: &[u64], c: u64, e: u64, p: u64, h: u32) -> Result<FiniteLevelMeasure<BigRational>> {
    let table = alpha_table(zexp, c, p, h)?;
    let d = zexp.len();
    Ok(FiniteLevelMeasure::from_fn(d, p, h, BigRational::zero(), "alpha", |r| {
        let y = r.iter().zip(zexp).fold(e, |acc, (ri, b)| (acc + ri % c * b) % c);
        table[y as usize].clone()
    }))
}

/// `G_h(y) = Tr(ζ_c^y ∏_k 1/(1 − ζ_c^{b_k p^h}))` for every `y mod c`.
pub fn alpha_table(zexp: &[u64], c: u64, p: u64, h: u32) -> Result<Vec<BigRational>> {
    let ph = crate::padic::pow_mod(p % c, h as u64, c);
    let mut w = CycloElem::one(c);
    for &b in zexp {
        w = &w * &inv_one_minus_root(c, (b * ph % c) as i64)?;
    }
    Ok(trace_table(&w))
}

/// Total mass `Σ_δ ∏_k ζ^{δ x_k b_k}/(1 − ζ^{δ b_k})` written as `G_0(e)`.
pub fn alpha_total(zexp: &[u64], c: u64, e: u64) -> Result<BigRational> {
    Ok(alpha_table(zexp, c, 2, 0)?[e as usize % c as usize].clone())
}

/// Γ-transform: bucket each box by the exponent of its representative coordinate sum.
pub fn gamma_poly(
    mu: &FiniteLevelMeasure<PadicInt>,
    u: u64,
    ell: u32,
    mode: ExponentMode,
    tau: u32,
) -> Result<IwasawaPoly> {
    let p = mu.p;
    let n = mu.zero.precision();
    let need = match mode {
        ExponentMode::Lu => ell + tau + vq(p),
        ExponentMode::Angle => ell + 1 + tau,
        ExponentMode::Plain => ell,
    };
    if mu.h < need {
        return Err(Error::Invalid(format!("level h = {} below {need} required for constancy", mu.h)));
    }
    let slots = match mode {
        ExponentMode::Angle => pow_u64(p, ell + 1),
        _ => pow_u64(p, ell),
    };
    let table = LuTable::new(p, ell, u);
    let ptau = pow_u64(p, tau);
    let mut poly = IwasawaPoly::zero(p, n, ell, slots);
    for (i, m) in mu.masses.iter().enumerate() {
        if m.is_zero() {
            continue;
        }
        let s: u64 = mu.point(i).iter().sum();
        let k = match mode {
            ExponentMode::Plain => s % slots,
            _ => {
                if s == 0 || s % ptau != 0 || (s / ptau) % p == 0 {
                    return Err(Error::SupportViolation(format!("box {:?} has coordinate sum {s}", mu.point(i))));
                }
                let s1 = s / ptau;
                match mode {
                    ExponentMode::Lu => table.get(s1 % q_of(p).saturating_mul(slots).max(1)).unwrap() as u64,
                    _ => angle(&PadicInt::from_u64(p, ell + 1, s1)).value(),
                }
            }
        };
        poly.add_at(k as usize, m.value());
    }
    Ok(poly)
}

/// μ of the `L_u` transform next to the minimal valuation of the plain transform of `μ̃`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SinnottComparison {
    pub lhs: Option<u32>,
    pub rhs: Option<i64>,
}

impl SinnottComparison {
    pub fn equal(&self) -> bool {
        self.lhs.map(|v| v as i64) == self.rhs
    }
}

pub fn sinnott_comparison(mu: &FiniteLevelMeasure<PadicInt>, u: u64, ell: u32) -> Result<SinnottComparison> {
    let lhs = gamma_poly(mu, u, ell, ExponentMode::Lu, 0)?.mu();
    let vp1 = crate::padic::val_int(&BigInt::from(mu.p - 1), mu.p) as i64;
    let rhs = gamma_poly(&mu.tilde(), u, ell + 1, ExponentMode::Plain, 0)?.mu().map(|v| v as i64 - vp1);
    Ok(SinnottComparison { lhs, rhs })
}

/// `λ_n = Σ_k (−1)^{n−k} C(n,k) f(k)` for a polynomial `f` given by its coefficients.
pub fn mahler_coefficients(f: &[BigRational], degree_bound: usize) -> Vec<BigRational> {
    let eval = |t: i64| {
        f.iter().rev().fold(BigRational::zero(), |acc, c| acc * BigInt::from(t) + c)
    };
    let vals: Vec<BigRational> = (0..=degree_bound as i64).map(eval).collect();
    let mut out = vec![];
    for n in 0..=degree_bound {
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for k in 0..=n {
            if k > 0 {
                binom = binom * BigInt::from((n - k + 1) as i64) / BigInt::from(k as i64);
            }
            let term = &vals[k] * &binom;
            if (n - k) % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        out.push(acc);
    }
    out
}

/// `Σ_k λ_k z^k / (1 − z)^{k+1}`.
pub fn rational_function_value(lambda: &[BigRational], z: &CycloElem) -> Result<CycloElem> {
    let m = z.conductor();
    let inv = (&CycloElem::one(m) - z).invert()?;
    let mut acc = CycloElem::zero(m);
    let mut zk = CycloElem::one(m);
    let mut ik = inv.clone();
    for l in lambda {
        acc = &acc + &(&zk * &ik).scale(l);
        zk = &zk * z;
        ik = &ik * &inv;
    }
    Ok(acc)
}

/// `(Σ_{n<p^h} f(n) z^n) / (1 − z^{p^h})`.
pub fn limit_form(f: &[BigRational], z: &CycloElem, p: u64, h: u32) -> Result<CycloElem> {
    let m = z.conductor();
    let ph = pow_u64(p, h);
    let mut acc = CycloElem::zero(m);
    let mut zn = CycloElem::one(m);
    for n in 0..ph {
        let v = f.iter().rev().fold(BigRational::zero(), |acc, c| acc * BigInt::from(n) + c);
        acc = &acc + &zn.scale(&v);
        zn = &zn * z;
    }
    let den = (&CycloElem::one(m) - &zn).invert()?;
    Ok(&acc * &den)
}

/// Minimum p-adic valuation of the power-basis coordinates (∞ → None).
pub fn cyclo_valuation(x: &CycloElem, p: u64) -> Option<i64> {
    x.coeffs().iter().filter(|c| !c.is_zero()).map(|c| val_rational(c, p)).min()
}

/// Box masses of a 1-dimensional measure from its Amice transform `F(T) = z^e / (1 − z(1+T))`,
/// via `(1/p^h) Σ_{γ^{p^h}=1} γ^{−a} F(γ − 1)` in Q(ζ_{c p^h}).
pub fn masses_from_transform(c: u64, b: u64, e: u64, p: u64, h: u32) -> Result<Vec<CycloElem>> {
    let ph = pow_u64(p, h);
    let m = c * ph;
    let z = root_of_unity(m, (b * ph) as i64);
    let ze = root_of_unity(m, (e * ph) as i64);
    let mut vals = vec![];
    for j in 0..ph {
        let g = root_of_unity(m, (j * c) as i64);
        let f = &ze * &(&CycloElem::one(m) - &(&z * &g)).invert()?;
        vals.push(f);
    }
    let scale = BigRational::new(BigInt::one(), BigInt::from(ph));
    Ok((0..ph)
        .map(|a| {
            let mut acc = CycloElem::zero(m);
            for (j, f) in vals.iter().enumerate() {
                acc = &acc + &(f * &root_of_unity(m, -((a * j as u64 * c) as i64)));
            }
            acc.scale(&scale)
        })
        .collect())
}
