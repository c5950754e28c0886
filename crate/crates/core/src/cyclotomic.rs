//! Exact arithmetic in Q(ζ_M) modulo the M-th cyclotomic polynomial, and truncated
//! multivariate power series with cyclotomic coefficients.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use crate::padic::reduce_mod_pn;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `"n/d"` (or `"n"` for integers).
pub fn rat_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Invalid(format!("not a rational: {s}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

pub fn euler_phi(mut m: u64) -> u64 {
    let mut r = m;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            while m % d == 0 {
                m /= d;
            }
            r -= r / d;
        }
        d += 1;
    }
    if m > 1 {
        r -= r / m;
    }
    r
}

pub fn mobius(mut m: u64) -> i64 {
    let mut r = 1;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return 0;
            }
            r = -r;
        }
        d += 1;
    }
    if m > 1 {
        r = -r;
    }
    r
}

/// Integer coefficients (low degree first) of the M-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(m: u64) -> Vec<i64> {
    // Φ_M = ∏_{d|M} (x^d − 1)^{μ(M/d)}
    let mut num: Vec<i64> = vec![1];
    let mut den: Vec<i64> = vec![1];
    for d in 1..=m {
        if m % d != 0 {
            continue;
        }
        let mu = mobius(m / d);
        if mu == 0 {
            continue;
        }
        let mut f = vec![0i64; d as usize + 1];
        f[0] = -1;
        f[d as usize] = 1;
        if mu == 1 {
            num = poly_mul_i(&num, &f);
        } else {
            den = poly_mul_i(&den, &f);
        }
    }
    poly_div_exact_i(&num, &den)
}

fn poly_mul_i(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut r = vec![0i64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    r
}

fn poly_div_exact_i(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let lb = *b.last().unwrap();
    let mut q = vec![0i64; a.len() - db];
    for i in (0..q.len()).rev() {
        let c = rem[i + db] / lb;
        q[i] = c;
        for j in 0..=db {
            rem[i + j] -= c * b[j];
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

/// Precomputed data for Q(ζ_M).
#[derive(Debug)]
pub struct CycloRing {
    pub m: u64,
    pub phi: usize,
    pub poly: Vec<i64>,
    /// `powers[k]` = coordinates of ζ^k in the power basis, for `0 ≤ k < M`.
    powers: Vec<Vec<i64>>,
    /// `Tr(ζ^k)` for `0 ≤ k < M` (Ramanujan sums).
    traces: Vec<i64>,
}

impl CycloRing {
    fn build(m: u64) -> Self {
        assert!(m >= 1);
        let poly = cyclotomic_polynomial(m);
        let phi = poly.len() - 1;
        let mut powers = Vec::with_capacity(m as usize);
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        for _ in 0..m {
            powers.push(cur.clone());
            // multiply by ζ
            let top = cur[phi - 1];
            let mut next = vec![0i64; phi];
            for i in (1..phi).rev() {
                next[i] = cur[i - 1];
            }
            for i in 0..phi {
                next[i] -= top * poly[i];
            }
            cur = next;
        }
        if phi == 1 && m <= 2 {
            // Q(ζ_1) = Q(ζ_2) = Q
            powers = (0..m).map(|k| vec![if m == 2 && k == 1 { -1 } else { 1 }]).collect();
        }
        let traces = (0..m)
            .map(|k| {
                let g = (k as u64).gcd(&m);
                let d = m / g;
                mobius(d) * (euler_phi(m) / euler_phi(d)) as i64
            })
            .collect();
        CycloRing { m, phi, poly, powers, traces }
    }
}

/// Shared ring for conductor `m`.
pub fn ring(m: u64) -> Arc<CycloRing> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CycloRing>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut g = cache.lock().unwrap();
    g.entry(m).or_insert_with(|| Arc::new(CycloRing::build(m))).clone()
}

/// An element of Q(ζ_M) in the canonical power basis `1, ζ, …, ζ^{φ(M)−1}`.
#[derive(Clone)]
pub struct CycloElem {
    ring: Arc<CycloRing>,
    coeffs: Vec<BigRational>,
}

impl PartialEq for CycloElem {
    fn eq(&self, o: &Self) -> bool {
        self.ring.m == o.ring.m && self.coeffs == o.coeffs
    }
}
impl Eq for CycloElem {}

impl fmt::Debug for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = vec![];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match i {
                0 => rat_string(c),
                1 => format!("({})*z{}", rat_string(c), self.ring.m),
                _ => format!("({})*z{}^{}", rat_string(c), self.ring.m, i),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl CycloElem {
    pub fn zero(m: u64) -> Self {
        let r = ring(m);
        let coeffs = vec![BigRational::zero(); r.phi];
        CycloElem { ring: r, coeffs }
    }

    pub fn one(m: u64) -> Self {
        Self::from_rational(m, BigRational::one())
    }

    pub fn from_rational(m: u64, q: BigRational) -> Self {
        let mut e = Self::zero(m);
        e.coeffs[0] = q;
        e
    }

    /// Coefficients must have length φ(M).
    pub fn from_coeffs(m: u64, coeffs: Vec<BigRational>) -> Self {
        let r = ring(m);
        assert_eq!(coeffs.len(), r.phi);
        CycloElem { ring: r, coeffs }
    }

    pub fn conductor(&self) -> u64 {
        self.ring.m
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn reduce(ring: &Arc<CycloRing>, long: Vec<BigRational>) -> Vec<BigRational> {
        let phi = ring.phi;
        let mut out: Vec<BigRational> = long.iter().take(phi).cloned().collect();
        out.resize(phi, BigRational::zero());
        for (k, c) in long.into_iter().enumerate().skip(phi) {
            if c.is_zero() {
                continue;
            }
            let row = &ring.powers[k % ring.m as usize];
            for (i, &x) in row.iter().enumerate() {
                if x != 0 {
                    out[i] += &c * BigInt::from(x);
                }
            }
        }
        out
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        CycloElem { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut r = Self::one(self.ring.m);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = &r * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against Φ_M.
    pub fn invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f: Vec<BigRational> = self.coeffs.clone();
        let g: Vec<BigRational> = self.ring.poly.iter().map(|&x| rat_int(x)).collect();
        let (d, s) = poly_ext_gcd(&f, &g);
        // d is a nonzero constant because Φ_M is irreducible
        if d.len() != 1 {
            return Err(Error::DivisionByZero);
        }
        let inv_d = d[0].recip();
        let long: Vec<BigRational> = s.iter().map(|c| c * &inv_d).collect();
        let mut long = long;
        if long.len() < self.ring.phi {
            long.resize(self.ring.phi, BigRational::zero());
        }
        Ok(CycloElem { ring: self.ring.clone(), coeffs: Self::reduce(&self.ring, long) })
    }

    /// Galois action ζ ↦ ζ^t.
    pub fn galois(&self, t: u64) -> Self {
        let m = self.ring.m;
        let mut out = vec![BigRational::zero(); self.ring.phi];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, &x) in self.ring.powers[((i as u64 * t) % m) as usize].iter().enumerate() {
                if x != 0 {
                    out[j] += c * BigInt::from(x);
                }
            }
        }
        CycloElem { ring: self.ring.clone(), coeffs: out }
    }

    /// Trace from Q(ζ_M) to Q.
    pub fn trace(&self) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc += c * BigInt::from(self.ring.traces[i]);
            }
        }
        acc
    }

    /// The constant term, provided every other coordinate vanishes.
    pub fn extract_rational(&self) -> Result<BigRational> {
        if self.coeffs.iter().skip(1).any(|c| !c.is_zero()) {
            return Err(Error::NotRational(self.to_string()));
        }
        Ok(self.coeffs[0].clone())
    }

    /// Image under Q(ζ_M) → Q(ζ_{M'}) for `M | M'`.
    pub fn embed(&self, m2: u64) -> Self {
        let m = self.ring.m;
        assert_eq!(m2 % m, 0);
        let step = m2 / m;
        let mut out = CycloElem::zero(m2);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out = &out + &root_of_unity(m2, (i as u64 * step) as i64).scale(c);
        }
        out
    }
}

/// ζ_M^k.
pub fn root_of_unity(m: u64, k: i64) -> CycloElem {
    let r = ring(m);
    let idx = k.rem_euclid(m as i64) as u64;
    let coeffs = r.powers[idx as usize].iter().map(|&x| rat_int(x)).collect();
    CycloElem { ring: r, coeffs }
}

/// `1/(1 − ζ_M^k)` for `ζ_M^k ≠ 1`, using `1/(1−ξ) = −(1/d) Σ_{j<d} j ξ^j` for ξ of order d.
pub fn inv_one_minus_root(m: u64, k: i64) -> Result<CycloElem> {
    let k = k.rem_euclid(m as i64) as u64;
    if k == 0 {
        return Err(Error::DivisionByZero);
    }
    let d = m / k.gcd(&m);
    let r = ring(m);
    let mut acc = vec![BigInt::zero(); r.phi];
    for j in 1..d {
        let row = &r.powers[((j * k) % m) as usize];
        for (i, &x) in row.iter().enumerate() {
            if x != 0 {
                acc[i] += BigInt::from(j as i64 * x);
            }
        }
    }
    let den = BigInt::from(-(d as i64));
    let coeffs = acc.into_iter().map(|a| BigRational::new(a, den.clone())).collect();
    Ok(CycloElem { ring: r, coeffs })
}

impl<'a> Add<&'a CycloElem> for &'a CycloElem {
    type Output = CycloElem;
    fn add(self, o: &CycloElem) -> CycloElem {
        assert_eq!(self.ring.m, o.ring.m);
        CycloElem {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a CycloElem> for &'a CycloElem {
    type Output = CycloElem;
    fn sub(self, o: &CycloElem) -> CycloElem {
        assert_eq!(self.ring.m, o.ring.m);
        CycloElem {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CycloElem {
    type Output = CycloElem;
    fn neg(self) -> CycloElem {
        CycloElem { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

impl<'a> Mul<&'a CycloElem> for &'a CycloElem {
    type Output = CycloElem;
    fn mul(self, o: &CycloElem) -> CycloElem {
        assert_eq!(self.ring.m, o.ring.m);
        let phi = self.ring.phi;
        let mut long = vec![BigRational::zero(); 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    long[i + j] += a * b;
                }
            }
        }
        CycloElem { ring: self.ring.clone(), coeffs: CycloElem::reduce(&self.ring, long) }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<CycloElem> for CycloElem {
            type Output = CycloElem;
            fn $m(self, o: CycloElem) -> CycloElem {
                (&self).$m(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

fn trim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let mut b = b.to_vec();
    trim(&mut b);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (vec![BigRational::zero()], r);
    }
    let lead_inv = b[db].recip();
    let mut q = vec![BigRational::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = &r[i + db] * &lead_inv;
        if !c.is_zero() {
            for j in 0..=db {
                let t = &c * &b[j];
                r[i + j] -= t;
            }
        }
        q[i] = c;
    }
    r.truncate(db.max(1));
    trim(&mut r);
    (q, r)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    r
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut r = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        r[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        r[i] -= y;
    }
    trim(&mut r);
    r
}

/// Returns `(d, s)` with `s·a ≡ d mod b`, `d = gcd(a, b)`.
fn poly_ext_gcd(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r0 = a.to_vec();
    trim(&mut r0);
    let mut r1 = b.to_vec();
    trim(&mut r1);
    let mut s0 = vec![BigRational::one()];
    let mut s1 = vec![BigRational::zero()];
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = poly_divrem(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    (r0, s0)
}

/// A multivariate power series truncated above a total degree.
#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    pub m: u64,
    pub nvars: usize,
    pub max_total_degree: u32,
    pub coeffs: BTreeMap<Vec<u32>, CycloElem>,
}

impl TruncatedSeries {
    pub fn zero(m: u64, nvars: usize, deg: u32) -> Self {
        TruncatedSeries { m, nvars, max_total_degree: deg, coeffs: BTreeMap::new() }
    }

    pub fn constant(c: CycloElem, nvars: usize, deg: u32) -> Self {
        let mut s = Self::zero(c.conductor(), nvars, deg);
        if !c.is_zero() {
            s.coeffs.insert(vec![0; nvars], c);
        }
        s
    }

    /// `Σ_i a_i y_i`.
    pub fn linear(m: u64, a: &[BigRational], deg: u32) -> Self {
        let mut s = Self::zero(m, a.len(), deg);
        if deg == 0 {
            return s;
        }
        for (i, ai) in a.iter().enumerate() {
            if !ai.is_zero() {
                let mut e = vec![0; a.len()];
                e[i] = 1;
                s.coeffs.insert(e, CycloElem::from_rational(m, ai.clone()));
            }
        }
        s
    }

    fn insert_add(&mut self, e: Vec<u32>, c: CycloElem) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&e) {
            Some(v) => {
                *v = &*v + &c;
                if v.is_zero() {
                    self.coeffs.remove(&e);
                }
            }
            None => {
                self.coeffs.insert(e, c);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.coeffs {
            r.insert_add(e.clone(), c.clone());
        }
        r
    }

    pub fn scale(&self, c: &CycloElem) -> Self {
        let mut r = Self::zero(self.m, self.nvars, self.max_total_degree);
        for (e, v) in &self.coeffs {
            r.insert_add(e.clone(), v * c);
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let deg = self.max_total_degree.min(o.max_total_degree);
        let mut r = Self::zero(self.m, self.nvars, deg);
        for (e1, c1) in &self.coeffs {
            let d1: u32 = e1.iter().sum();
            for (e2, c2) in &o.coeffs {
                let d2: u32 = e2.iter().sum();
                if d1 + d2 > deg {
                    continue;
                }
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.insert_add(e, c1 * c2);
            }
        }
        r
    }

    fn constant_term(&self) -> CycloElem {
        self.coeffs.get(&vec![0; self.nvars]).cloned().unwrap_or_else(|| CycloElem::zero(self.m))
    }

    /// `exp(A)` for a series without constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::DomainError("exp of a series with a constant term".into()));
        }
        let deg = self.max_total_degree;
        let mut result = Self::constant(CycloElem::one(self.m), self.nvars, deg);
        let mut term = result.clone();
        for k in 1..=deg {
            term = term.mul(self).scale(&CycloElem::from_rational(self.m, rat(1, k as i64)));
            result = result.add(&term);
        }
        Ok(result)
    }

    /// `1/A` for a series with invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.constant_term();
        let c0i = c0.invert()?;
        // 1/A = c0⁻¹ Σ (1 − A/c0)^k
        let deg = self.max_total_degree;
        let one = Self::constant(CycloElem::one(self.m), self.nvars, deg);
        let u = one.add(&self.scale(&(-&c0i)));
        let mut result = one.clone();
        let mut term = one;
        for _ in 1..=deg {
            term = term.mul(&u);
            result = result.add(&term);
        }
        Ok(result.scale(&c0i))
    }

    pub fn coefficient(&self, target: &[u32]) -> Result<CycloElem> {
        series_coefficient(self, target)
    }
}

/// Stored coefficient at `target`; error if it lies above the truncation degree.
pub fn series_coefficient(f: &TruncatedSeries, target: &[u32]) -> Result<CycloElem> {
    if target.len() != f.nvars || target.iter().sum::<u32>() > f.max_total_degree {
        return Err(Error::TruncationExceeded(format!("{:?}", target)));
    }
    Ok(f.coeffs.get(target).cloned().unwrap_or_else(|| CycloElem::zero(f.m)))
}

/// Univariate expansion of `exp(−x t) / (1 − w exp(−t))` up to `t^deg`,
/// given `inv = 1/(1 − w exp(−t))` already expanded.
pub fn shift_by_exp(inv: &[CycloElem], x: &BigRational, deg: usize) -> Vec<CycloElem> {
    // e^{−x t} coefficients
    let mut ex = Vec::with_capacity(deg + 1);
    let mut c = BigRational::one();
    for k in 0..=deg {
        if k > 0 {
            c = -(&c * x) / BigInt::from(k as i64);
        }
        ex.push(c.clone());
    }
    let m = inv[0].conductor();
    (0..=deg)
        .map(|k| {
            let mut acc = CycloElem::zero(m);
            for i in 0..=k {
                if !ex[k - i].is_zero() {
                    acc = &acc + &inv[i].scale(&ex[k - i]);
                }
            }
            acc
        })
        .collect()
}

/// Univariate expansion of `1/(1 − w e^{−t})` up to `t^deg`; needs `w ≠ 1`.
pub fn geometric_kernel(w: &CycloElem, deg: usize) -> Result<Vec<CycloElem>> {
    let m = w.conductor();
    // g(t) = 1 − w e^{−t}: g_0 = 1 − w, g_j = −w (−1)^j / j!
    let mut g = Vec::with_capacity(deg + 1);
    g.push(&CycloElem::one(m) - w);
    let mut fact = BigInt::one();
    for j in 1..=deg {
        fact *= BigInt::from(j as i64);
        let sign = if j % 2 == 0 { -1 } else { 1 };
        g.push(w.scale(&BigRational::new(BigInt::from(sign), fact.clone())));
    }
    let g0i = g[0].invert()?;
    let mut h: Vec<CycloElem> = vec![g0i.clone()];
    for i in 1..=deg {
        let mut acc = CycloElem::zero(m);
        for j in 1..=i {
            acc = &acc + &(&g[j] * &h[i - j]);
        }
        h.push(-&(&acc * &g0i));
    }
    Ok(h)
}

impl TruncatedSeries {
    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }
}

pub fn bigint_abs_u64(x: &BigInt) -> Option<u64> {
    use num_traits::ToPrimitive;
    x.abs().to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn root_examples() {
        let i = root_of_unity(4, 1);
        assert_eq!(&i * &i, CycloElem::from_rational(4, rat_int(-1)));
        let s = &root_of_unity(3, 1) + &root_of_unity(3, 2);
        assert_eq!(s, CycloElem::from_rational(3, rat_int(-1)));
        assert_eq!(root_of_unity(5, 7), root_of_unity(5, 2));
        assert_eq!(root_of_unity(7, 0), CycloElem::one(7));
        assert_eq!(root_of_unity(9, 1).pow(9), CycloElem::one(9));
    }

    #[test]
    fn invert_examples() {
        let x = &CycloElem::one(3) - &root_of_unity(3, 1);
        let expect = (&CycloElem::from_rational(3, rat_int(2)) + &root_of_unity(3, 1)).scale(&rat(1, 3));
        assert_eq!(x.invert().unwrap(), expect);
        let m1 = CycloElem::from_rational(5, rat_int(-1));
        assert_eq!(m1.invert().unwrap(), m1);
        assert_eq!(root_of_unity(5, 2).invert().unwrap(), root_of_unity(5, 3));
        assert_eq!(CycloElem::zero(5).invert(), Err(Error::DivisionByZero));
    }

    #[test]
    fn closed_form_inverse_matches_euclid() {
        for m in [3u64, 4, 5, 6, 9, 11, 12, 15] {
            for k in 1..m as i64 {
                let direct = (&CycloElem::one(m) - &root_of_unity(m, k)).invert().unwrap();
                assert_eq!(inv_one_minus_root(m, k).unwrap(), direct, "m={m} k={k}");
            }
        }
    }

    #[test]
    fn extract_examples() {
        let s = &root_of_unity(3, 1) + &root_of_unity(3, 2);
        assert_eq!(s.extract_rational().unwrap(), rat_int(-1));
        assert_eq!(CycloElem::from_rational(7, rat(1, 2)).extract_rational().unwrap(), rat(1, 2));
        let mut acc = CycloElem::zero(5);
        for d in 1..5 {
            let z = root_of_unity(5, d);
            acc = &acc + &(&z * &(&CycloElem::one(5) - &z).invert().unwrap());
        }
        assert_eq!(acc.extract_rational().unwrap(), rat_int(-2));
        assert!(matches!(root_of_unity(5, 1).extract_rational(), Err(Error::NotRational(_))));
    }

    #[test]
    fn trace_is_sum_of_conjugates() {
        for m in [5u64, 8, 9, 12] {
            let x = &root_of_unity(m, 1).scale(&rat(3, 2)) + &root_of_unity(m, 3);
            let mut acc = CycloElem::zero(m);
            for t in 1..m {
                if t.gcd(&m) == 1 {
                    acc = &acc + &x.galois(t);
                }
            }
            assert_eq!(acc.extract_rational().unwrap(), x.trace());
        }
    }

    #[test]
    fn series_examples() {
        let x = rat(3, 7);
        let lin = TruncatedSeries::linear(5, &[-x.clone(), -x.clone()], 4);
        let f = lin.exp().unwrap();
        assert_eq!(series_coefficient(&f, &[1, 1]).unwrap(), CycloElem::from_rational(5, &x * &x));
        let z = root_of_unity(5, 1);
        let e = TruncatedSeries::linear(5, &[rat_int(-1)], 3).exp().unwrap();
        let g = TruncatedSeries::constant(CycloElem::one(5), 1, 3).add(&e.scale(&(-&z)));
        let ginv = g.inverse().unwrap();
        let one_minus = &CycloElem::one(5) - &z;
        assert_eq!(series_coefficient(&ginv, &[0]).unwrap(), one_minus.invert().unwrap());
        let expect = -&(&z * &(&one_minus * &one_minus).invert().unwrap());
        assert_eq!(series_coefficient(&ginv, &[1]).unwrap(), expect);
        assert!(series_coefficient(&ginv, &[4]).is_err());
        let k = geometric_kernel(&z, 3).unwrap();
        for d in 0..=3u32 {
            assert_eq!(k[d as usize], series_coefficient(&ginv, &[d]).unwrap());
        }
    }

    fn small_elem(m: u64, v: &[i64]) -> CycloElem {
        let phi = ring(m).phi;
        CycloElem::from_coeffs(m, (0..phi).map(|i| rat(v[i % v.len()], 1 + (i as i64 % 3))).collect())
    }

    proptest! {
        #[test]
        fn ring_axioms(a in prop::collection::vec(-5i64..5, 6), b in prop::collection::vec(-5i64..5, 6),
                       c in prop::collection::vec(-5i64..5, 6), m in prop::sample::select(vec![5u64, 7, 9, 12])) {
            let (x, y, z) = (small_elem(m, &a), small_elem(m, &b), small_elem(m, &c));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            if !x.is_zero() {
                prop_assert_eq!(&x * &x.invert().unwrap(), CycloElem::one(m));
            }
        }

        #[test]
        fn galois_stable_delta_sums(k in 1i64..11, e in 0i64..11) {
            // Σ_δ ζ^{δe}/(1 − ζ^{δk}) is fixed by every ζ ↦ ζ^t
            let c = 11u64;
            let mut acc = CycloElem::zero(c);
            for d in 1..c as i64 {
                acc = &acc + &(&root_of_unity(c, d * e) * &inv_one_minus_root(c, d * k).unwrap());
            }
            for t in 2..c {
                prop_assert_eq!(acc.galois(t), acc.clone());
            }
            prop_assert!(acc.extract_rational().is_ok());
        }

        #[test]
        fn exp_additive(a in -4i64..4, b in -4i64..4, c in -4i64..4, d in -4i64..4) {
            let deg = 5;
            let s1 = TruncatedSeries::linear(3, &[rat_int(a), rat(b, 2)], deg);
            let s2 = TruncatedSeries::linear(3, &[rat(c, 3), rat_int(d)], deg);
            let lhs = s1.exp().unwrap().mul(&s2.exp().unwrap());
            let rhs = s1.add(&s2).exp().unwrap();
            let diff = lhs.add(&rhs.scale(&CycloElem::from_rational(3, rat_int(-1))));
            prop_assert!(diff.is_zero());
        }
    }
}
