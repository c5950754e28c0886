//! Fixed-precision p-adic integers and the functions ω, ⟨·⟩, log and L_u.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `q = 4` for `p = 2`, `q = p` otherwise.
pub fn q_of(p: u64) -> u64 {
    if p == 2 {
        4
    } else {
        p
    }
}

/// `v_p(q)`.
pub fn vq(p: u64) -> u32 {
    if p == 2 {
        2
    } else {
        1
    }
}

/// `p^e`, panicking on overflow of `u64`.
pub fn pow_u64(p: u64, e: u32) -> u64 {
    p.checked_pow(e).expect("p-adic modulus overflows u64")
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}

pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    add_mod(a, m - b % m, m)
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

/// Reduce an integer of any size modulo `m`.
pub fn bigint_mod(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

/// `v_p(x)` for a nonzero integer.
pub fn val_int(x: &BigInt, p: u64) -> u32 {
    assert!(!x.is_zero());
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (qt, r) = y.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        y = qt;
        v += 1;
    }
}

/// `v_p(r)` for a nonzero rational.
pub fn val_rational(r: &BigRational, p: u64) -> i64 {
    val_int(r.numer(), p) as i64 - val_int(r.denom(), p) as i64
}

/// The unique residue modulo `p^n` congruent to the p-integral rational `r`.
pub fn reduce_mod_pn(r: &BigRational, p: u64, n: u32) -> Result<u64> {
    let m = pow_u64(p, n);
    let den = bigint_mod(r.denom(), m);
    if den % p == 0 {
        return Err(Error::PAdicPole(r.to_string()));
    }
    let num = bigint_mod(r.numer(), m);
    Ok(mul_mod(num, inv_mod(den, m).unwrap(), m))
}

/// A p-adic integer known modulo `p^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicInt {
    p: u64,
    n: u32,
    value: u64,
}

impl PadicInt {
    pub fn new(p: u64, n: u32, value: i128) -> Self {
        let m = pow_u64(p, n) as i128;
        PadicInt { p, n, value: value.rem_euclid(m) as u64 }
    }

    pub fn from_u64(p: u64, n: u32, value: u64) -> Self {
        PadicInt { p, n, value: value % pow_u64(p, n) }
    }

    pub fn from_bigint(p: u64, n: u32, x: &BigInt) -> Self {
        PadicInt { p, n, value: bigint_mod(x, pow_u64(p, n)) }
    }

    pub fn from_rational(r: &BigRational, p: u64, n: u32) -> Result<Self> {
        Ok(PadicInt { p, n, value: reduce_mod_pn(r, p, n)? })
    }

    pub fn zero(p: u64, n: u32) -> Self {
        PadicInt { p, n, value: 0 }
    }

    pub fn one(p: u64, n: u32) -> Self {
        Self::from_u64(p, n, 1)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        pow_u64(self.p, self.n)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_unit(&self) -> bool {
        self.n > 0 && self.value % self.p != 0
    }

    /// `min(n, v_p(self))`.
    pub fn valuation(&self) -> u32 {
        if self.value == 0 {
            return self.n;
        }
        let mut v = 0;
        let mut x = self.value;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        v
    }

    pub fn truncate(&self, n: u32) -> Self {
        let n = n.min(self.n);
        Self::from_u64(self.p, n, self.value)
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::DivisionByZero);
        }
        let m = self.modulus();
        Ok(PadicInt { p: self.p, n: self.n, value: inv_mod(self.value, m).unwrap() })
    }

    pub fn pow(&self, e: u64) -> Self {
        PadicInt { p: self.p, n: self.n, value: pow_mod(self.value, e, self.modulus()) }
    }

    /// Signed exponent; negative powers require a unit.
    pub fn pow_signed(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }

    fn check(&self, other: &Self) -> (u64, u32) {
        assert_eq!(self.p, other.p, "mixing p-adic integers for different primes");
        (self.p, self.n.min(other.n))
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.value, self.p, self.n)
    }
}

impl Add for PadicInt {
    type Output = PadicInt;
    fn add(self, o: PadicInt) -> PadicInt {
        let (p, n) = self.check(&o);
        let m = pow_u64(p, n);
        PadicInt { p, n, value: add_mod(self.value % m, o.value % m, m) }
    }
}

impl Sub for PadicInt {
    type Output = PadicInt;
    fn sub(self, o: PadicInt) -> PadicInt {
        let (p, n) = self.check(&o);
        let m = pow_u64(p, n);
        PadicInt { p, n, value: sub_mod(self.value % m, o.value % m, m) }
    }
}

impl Mul for PadicInt {
    type Output = PadicInt;
    fn mul(self, o: PadicInt) -> PadicInt {
        let (p, n) = self.check(&o);
        let m = pow_u64(p, n);
        PadicInt { p, n, value: mul_mod(self.value, o.value, m) }
    }
}

impl Neg for PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        let m = self.modulus();
        PadicInt { p: self.p, n: self.n, value: (m - self.value) % m }
    }
}

/// Teichmüller representative; zero for non-units.
pub fn teichmuller(a: &PadicInt) -> PadicInt {
    let (p, n) = (a.p, a.n);
    if !a.is_unit() {
        return PadicInt::zero(p, n);
    }
    if p == 2 {
        let m = a.modulus();
        return if a.value % 4 == 1 || n == 1 {
            PadicInt::one(p, n)
        } else {
            PadicInt { p, n, value: m - 1 }
        };
    }
    let mut x = *a;
    loop {
        let y = x.pow(p);
        if y == x {
            return x;
        }
        x = y;
    }
}

/// `⟨a⟩ = a / ω(a)` for units, zero otherwise.
pub fn angle(a: &PadicInt) -> PadicInt {
    if !a.is_unit() {
        return PadicInt::zero(a.p, a.n);
    }
    *a * teichmuller(a).inv().unwrap()
}

fn ilog(p: u64, mut k: u64) -> u32 {
    let mut e = 0;
    while k >= p {
        k /= p;
        e += 1;
    }
    e
}

fn val_u64(mut k: u64, p: u64) -> u32 {
    let mut v = 0;
    while k % p == 0 {
        k /= p;
        v += 1;
    }
    v
}

/// Iwasawa logarithm of `w ≡ 1 mod q`, summed until every dropped term vanishes mod `p^n`.
pub fn iwasawa_log(w: &PadicInt) -> Result<PadicInt> {
    let (p, n) = (w.p, w.n);
    let q = q_of(p);
    if n == 0 {
        return Ok(*w);
    }
    if w.value % q.min(w.modulus()) != 1 % q.min(w.modulus()) {
        return Err(Error::DomainError(format!("log argument {} is not 1 mod q", w)));
    }
    let x = PadicInt { p, n, value: (w.value + w.modulus() - 1) % w.modulus() };
    if x.is_zero() {
        return Ok(PadicInt::zero(p, n));
    }
    let vx = x.valuation() as u64;
    // k·v(x) − v_p(k) is non-decreasing, so stop at the first k where it reaches n.
    let mut kmax = 1u64;
    while kmax * vx < n as u64 + ilog(p, kmax) as u64 {
        kmax += 1;
    }
    let extra = ilog(p, kmax);
    let big_m = BigInt::from(p).pow(n + extra);
    let xb = BigInt::from(x.value);
    let mut xk = BigInt::one();
    let mut acc = PadicInt::zero(p, n);
    for k in 1..=kmax {
        xk = (&xk * &xb) % &big_m;
        let v = val_u64(k, p);
        let unit = k / pow_u64(p, v);
        let num = &xk / BigInt::from(p).pow(v);
        let term = PadicInt::from_bigint(p, n, &num) * PadicInt::from_u64(p, n, unit).inv().unwrap();
        acc = if k % 2 == 1 { acc + term } else { acc - term };
    }
    Ok(acc)
}

/// The default topological generator of `1 + q Z_p`.
pub fn default_u(p: u64, n: u32) -> PadicInt {
    if p == 2 {
        PadicInt::from_u64(p, n, 5)
    } else {
        PadicInt::from_u64(p, n, 1 + p)
    }
}

/// `L_u(a) = −log⟨a⟩ / log u` with the convention `log p = 0` for non-units.
///
/// `L_u(t) mod p^m` depends on `t mod q p^m`, so the result carries precision `n − v_p(a) − v_p(q)`.
pub fn ell_u(a: &PadicInt, u: &PadicInt) -> Result<PadicInt> {
    let p = a.p;
    let n = a.n.min(u.n);
    let e = vq(p);
    let q = q_of(p);
    if n <= e || u.value % q != 1 || (u.value + u.modulus() - 1) % pow_u64(p, e + 1) == 0 {
        return Err(Error::BadGenerator(u.to_string()));
    }
    if a.is_zero() {
        return Err(Error::DomainError("L_u(0)".into()));
    }
    let v = a.valuation();
    if v + e >= n {
        return Err(Error::DomainError(format!("{} has too little precision for L_u", a)));
    }
    let m = n - v;
    let unit_part = PadicInt::from_u64(p, m, a.value / pow_u64(p, v));
    let la = iwasawa_log(&angle(&unit_part))?;
    let lu = iwasawa_log(&PadicInt::from_u64(p, m, u.value))?;
    let pe = pow_u64(p, e);
    let out = m - e;
    let la_r = PadicInt::from_u64(p, out, la.value / pe);
    let lu_r = PadicInt::from_u64(p, out, lu.value / pe);
    Ok(-(la_r * lu_r.inv()?))
}

/// `ω(g)^{k(p−1)/c}` for the least primitive root `g` modulo `p`.
pub fn embed_root(p: u64, n: u32, c: u64, k: i64) -> Result<PadicInt> {
    if c == 0 || (p - 1) % c != 0 {
        return Err(Error::NotCompatible(format!("{} does not divide p-1 = {}", c, p - 1)));
    }
    let g = primitive_root(p);
    let w = teichmuller(&PadicInt::from_u64(p, n, g));
    let e = k.rem_euclid(c as i64) as u64 * ((p - 1) / c);
    Ok(w.pow(e))
}

/// Least primitive root modulo an odd prime (1 for p = 2).
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let phi = p - 1;
    let mut fac = vec![];
    let mut m = phi;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            fac.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        fac.push(m);
    }
    (2..p).find(|&g| fac.iter().all(|&f| pow_mod(g, phi / f, p) != 1)).unwrap()
}

/// Table of `L_u(t) mod p^ell` for every residue `t mod q p^ell`, built from powers of `u`.
///
/// Non-units map to `None`. This is the discrete-log form of `ell_u`.
#[derive(Clone, Debug)]
pub struct LuTable {
    pub p: u64,
    pub ell: u32,
    pub modulus: u64,
    pub level_mod: u64,
    values: Vec<u32>,
}

impl LuTable {
    pub fn new(p: u64, ell: u32, u: u64) -> Self {
        let level_mod = pow_u64(p, ell);
        let modulus = q_of(p) * level_mod;
        let mut values = vec![u32::MAX; modulus as usize];
        // units of Z/qp^ell are ±ω·u^k; ⟨t⟩ = u^k  =>  L_u(t) = −k
        let mut roots = vec![];
        for t in 1..modulus {
            if t % p != 0 {
                let w = teichmuller(&PadicInt::from_u64(p, ell + vq(p), t));
                if !roots.contains(&w.value()) {
                    roots.push(w.value());
                }
            }
        }
        let mut uk = 1u64;
        for k in 0..level_mod {
            let lu = ((level_mod - k % level_mod) % level_mod) as u32;
            for &w in &roots {
                values[mul_mod(uk, w, modulus) as usize] = lu;
            }
            uk = mul_mod(uk, u, modulus);
        }
        LuTable { p, ell, modulus, level_mod, values }
    }

    /// `L_u(t) mod p^ell` for an integer `t` (log p = 0 convention).
    pub fn get(&self, t: u64) -> Option<u32> {
        if t == 0 {
            return None;
        }
        let mut t = t;
        while t % self.p == 0 {
            t /= self.p;
        }
        let v = self.values[(t % self.modulus) as usize];
        (v != u32::MAX).then_some(v)
    }

    pub fn get_signed(&self, t: &BigInt) -> Option<u32> {
        if t.is_zero() {
            return None;
        }
        let mut a = t.abs();
        let pb = BigInt::from(self.p);
        while (&a % &pb).is_zero() {
            a /= &pb;
        }
        // L_u(−t) = L_u(t)
        self.get(bigint_mod(&a, self.modulus))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller(&PadicInt::one(5, 3)).value(), 1);
        let w = teichmuller(&PadicInt::from_u64(5, 3, 2));
        assert_eq!(w.value(), 57);
        assert_eq!((w * w).value(), 124);
        assert_eq!(teichmuller(&PadicInt::from_u64(5, 3, 5)).value(), 0);
        assert_eq!(teichmuller(&PadicInt::from_u64(2, 5, 7)).value(), 31);
    }

    #[test]
    fn angle_examples() {
        let m1 = PadicInt::new(5, 3, -1);
        assert_eq!(angle(&m1).value(), 1);
        let a2 = angle(&PadicInt::from_u64(5, 3, 2));
        assert_eq!(a2.value(), mul_mod(2, inv_mod(57, 125).unwrap(), 125));
        assert_eq!(a2.value() % 5, 1);
        assert_eq!(angle(&PadicInt::from_u64(5, 3, 6)).value(), 6);
    }

    fn exp_series(x: &PadicInt) -> PadicInt {
        // exp(x) for v(x) ≥ 1, p odd: terms x^k/k! vanish once k − v(k!) ≥ n
        let (p, n) = (x.prime(), x.precision());
        let extra = 10;
        let m = BigInt::from(p).pow(n + extra);
        let mut acc = BigRational::zero();
        let mut xk = BigInt::one();
        let mut fact = BigInt::one();
        for k in 0..(4 * n as u64 + 20) {
            if k > 0 {
                xk = (&xk * BigInt::from(x.value())) % &m;
                fact *= BigInt::from(k);
            }
            acc += BigRational::new(xk.clone(), fact.clone());
        }
        PadicInt::from_rational(&acc, p, n).unwrap()
    }

    #[test]
    fn log_examples() {
        assert!(iwasawa_log(&PadicInt::one(5, 3)).unwrap().is_zero());
        let l = iwasawa_log(&PadicInt::from_u64(5, 3, 6)).unwrap();
        assert_eq!(l.valuation(), 1);
        assert_eq!(exp_series(&l).value(), 6);
        let w = PadicInt::from_u64(5, 6, 26);
        let l1 = iwasawa_log(&w).unwrap();
        let l2 = iwasawa_log(&(w * w)).unwrap();
        assert_eq!(l2, l1 + l1);
        assert!(iwasawa_log(&PadicInt::from_u64(5, 3, 2)).is_err());
    }

    #[test]
    fn ell_u_examples() {
        let u = default_u(5, 6);
        assert!(ell_u(&PadicInt::one(5, 6), &u).unwrap().is_zero());
        assert_eq!(ell_u(&u, &u).unwrap(), PadicInt::new(5, 5, -1));
        for k in 0..6u64 {
            let uk = u.pow(k);
            assert_eq!(ell_u(&uk, &u).unwrap(), PadicInt::new(5, 5, -(k as i128)));
        }
        assert!(ell_u(&PadicInt::from_u64(5, 6, 2), &PadicInt::from_u64(5, 6, 26)).is_err());
    }

    #[test]
    fn embed_root_examples() {
        assert_eq!(embed_root(5, 4, 1, 3).unwrap().value(), 1);
        assert_eq!(embed_root(5, 3, 4, 1).unwrap().value(), 57);
        let z = embed_root(11, 5, 5, 2).unwrap();
        assert_eq!(z.pow(5).value(), 1);
        assert!(embed_root(5, 3, 3, 1).is_err());
    }

    #[test]
    fn reduce_examples() {
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(reduce_mod_pn(&half, 5, 2).unwrap(), 13);
        assert_eq!(reduce_mod_pn(&BigRational::zero(), 5, 2).unwrap(), 0);
        let fifth = BigRational::new(1.into(), 5.into());
        assert!(matches!(reduce_mod_pn(&fifth, 5, 2), Err(Error::PAdicPole(_))));
    }

    #[test]
    fn lu_table_agrees_with_log() {
        for &(p, ell) in &[(3u64, 2u32), (5, 2), (7, 1)] {
            let t = LuTable::new(p, ell, 1 + p);
            let u = default_u(p, ell + 1);
            for a in 1..t.modulus {
                if a % p == 0 {
                    continue;
                }
                let l = ell_u(&PadicInt::from_u64(p, ell + 1, a), &u).unwrap();
                assert_eq!(t.get(a).unwrap() as u64, l.value() % pow_u64(p, ell));
            }
        }
    }

    #[test]
    fn lu_is_bijective_on_one_units() {
        // isometry: 1 + qZ/qp^ell -> Z/p^ell is a bijection
        let (p, ell) = (5u64, 3u32);
        let t = LuTable::new(p, ell, 6);
        let mut seen = vec![false; t.level_mod as usize];
        let mut x = 1;
        while x < t.modulus {
            let v = t.get(x).unwrap() as usize;
            assert!(!seen[v]);
            seen[v] = true;
            x += p;
        }
        assert!(seen.iter().all(|&b| b));
    }

    proptest! {
        #[test]
        fn lu_additive(a in 1u64..3125, b in 1u64..3125) {
            prop_assume!(a % 5 != 0 && b % 5 != 0);
            let u = default_u(5, 5);
            let pa = PadicInt::from_u64(5, 5, a);
            let pb = PadicInt::from_u64(5, 5, b);
            let lab = ell_u(&(pa * pb), &u).unwrap();
            prop_assert_eq!(lab, ell_u(&pa, &u).unwrap() + ell_u(&pb, &u).unwrap());
        }

        #[test]
        fn teichmuller_idempotent(a in 1u64..15625) {
            let x = PadicInt::from_u64(5, 6, a);
            let w = teichmuller(&x);
            prop_assert_eq!(teichmuller(&w), w);
            if x.is_unit() {
                prop_assert_eq!(w.pow(4).value(), 1);
                prop_assert_eq!(w.value() % 5, a % 5);
            }
        }

        #[test]
        fn lu_depends_on_q_p_ell(a in 1u64..100000, k in 0u64..20) {
            prop_assume!(a % 3 != 0);
            let (p, ell) = (3u64, 2u32);
            let u = default_u(p, 8);
            let b = a + k * 27;
            let la = ell_u(&PadicInt::from_u64(p, 8, a), &u).unwrap().value() % 9;
            let lb = ell_u(&PadicInt::from_u64(p, 8, b), &u).unwrap().value() % 9;
            prop_assert_eq!(la, lb);
            let _ = ell;
        }

        #[test]
        fn reduce_is_ring_hom(a in -500i64..500, b in 1i64..500, c in -500i64..500, d in 1i64..500) {
            prop_assume!(b % 7 != 0 && d % 7 != 0);
            let r1 = BigRational::new(a.into(), b.into());
            let r2 = BigRational::new(c.into(), d.into());
            let x = PadicInt::from_rational(&r1, 7, 4).unwrap();
            let y = PadicInt::from_rational(&r2, 7, 4).unwrap();
            prop_assert_eq!(PadicInt::from_rational(&(&r1 + &r2), 7, 4).unwrap(), x + y);
            prop_assert_eq!(PadicInt::from_rational(&(&r1 * &r2), 7, 4).unwrap(), x * y);
        }
    }
}
