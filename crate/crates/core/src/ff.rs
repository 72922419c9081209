//! Finite fields `F_{p^m}` with deterministic moduli.
//!
//! An element is stored as its integer code `c_0 + c_1 p + ... + c_{m-1} p^{m-1}`, where the
//! `c_i` are the coefficients of its residue in `F_p[x]/(f)` written in the canonical root
//! `θ` of the modulus `f`. Numeric order of codes is the canonical element order: it compares
//! coefficient vectors from `θ^{m-1}` down to the constant term.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};

/// Default bound on `p^m` for field construction.
pub const DEFAULT_MAX_FIELD: u64 = 1 << 20;

/// Largest field for which a full addition table is precomputed.
const ADD_TABLE_LIMIT: u32 = 1 << 10;

/// A field element, identified by its canonical code.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Fq(pub(crate) u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Shared handle to an immutable field context.
pub type Field = Arc<FieldCtx>;

/// The field `F_{p^m}` together with its arithmetic tables.
pub struct FieldCtx {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus, constant term first, length `m + 1`.
    modulus: Vec<u32>,
    generator: Fq,
    exp: Vec<u32>,
    log: Vec<u32>,
    add: Option<Vec<u32>>,
    neg: Vec<u32>,
    compatible: OnceLock<Fq>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({}^{}, modulus {:?})", self.p, self.m, self.modulus_high_first())
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m
    }
}
impl Eq for FieldCtx {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn field_cache() -> &'static Mutex<HashMap<(u32, u32), Field>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Field>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Builds `F_{p^m}` with the default size bound.
pub fn make_field(p: u64, m: u32) -> Result<Field> {
    make_field_bounded(p, m, DEFAULT_MAX_FIELD)
}

/// Builds `F_{p^m}`; the modulus is the lexicographically least monic irreducible of degree `m`.
pub fn make_field_bounded(p: u64, m: u32, max_order: u64) -> Result<Field> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m == 0 {
        return Err(Error::InvalidInput("extension degree must be at least 1".into()));
    }
    let q = (p as u128).checked_pow(m).unwrap_or(u128::MAX);
    if q > max_order as u128 || q > u32::MAX as u128 {
        return Err(Error::BoundExceeded { what: "field", size: q, bound: max_order as u128 });
    }
    let key = (p as u32, m);
    if let Some(f) = field_cache().lock().unwrap().get(&key) {
        return Ok(f.clone());
    }
    let field = Arc::new(FieldCtx::build(p as u32, m));
    field_cache().lock().unwrap().insert(key, field.clone());
    Ok(field)
}

impl FieldCtx {
    fn build(p: u32, m: u32) -> Self {
        let q = p.pow(m);
        let modulus = least_irreducible(p, m);
        let mut ctx = FieldCtx {
            p,
            m,
            q,
            modulus,
            generator: Fq::ONE,
            exp: Vec::new(),
            log: Vec::new(),
            add: None,
            neg: Vec::new(),
            compatible: OnceLock::new(),
        };
        ctx.neg = (0..q).map(|a| ctx.neg_digits(a)).collect();
        if p != 2 && m > 1 && q <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = ctx.add_digits(a, b);
                }
            }
            ctx.add = Some(table);
        }
        // least generator in canonical order
        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let gen = (1..q)
            .find(|&c| factors.iter().all(|&l| ctx.slow_pow(c, order / l) != 1))
            .expect("multiplicative group is cyclic");
        ctx.generator = Fq(gen);
        let mut exp = Vec::with_capacity((q - 1) as usize);
        let mut log = vec![0u32; q as usize];
        let mut acc = 1u32;
        for i in 0..(q - 1) {
            exp.push(acc);
            log[acc as usize] = i;
            acc = ctx.slow_mul(acc, gen);
        }
        ctx.exp = exp;
        ctx.log = log;
        ctx
    }

    pub(crate) fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut d = vec![0u32; self.m as usize];
        for slot in d.iter_mut() {
            *slot = a % self.p;
            a /= self.p;
        }
        d
    }

    fn from_digits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        let (mut out, mut scale) = (0u32, 1u32);
        for _ in 0..self.m {
            out += ((a % self.p + b % self.p) % self.p) * scale;
            a /= self.p;
            b /= self.p;
            scale = scale.wrapping_mul(self.p);
        }
        out
    }

    fn neg_digits(&self, mut a: u32) -> u32 {
        let (mut out, mut scale) = (0u32, 1u32);
        for _ in 0..self.m {
            out += ((self.p - a % self.p) % self.p) * scale;
            a /= self.p;
            scale = scale.wrapping_mul(self.p);
        }
        out
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let da = self.digits(a);
        let db = self.digits(b);
        let m = self.m as usize;
        let mut prod = vec![0u64; 2 * m];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for k in (m..2 * m).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..m {
                let sub = c * self.modulus[i] as u64 % p;
                prod[k - m + i] = (prod[k - m + i] + p - sub) % p;
            }
        }
        let low: Vec<u32> = prod[..m].iter().map(|&c| c as u32).collect();
        self.from_digits(&low)
    }

    fn slow_pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1u32);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// `"p^m"`.
    pub fn name(&self) -> String {
        format!("{}^{}", self.p, self.m)
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Modulus coefficients from the leading term down to the constant term.
    pub fn modulus_high_first(&self) -> Vec<u32> {
        self.modulus.iter().rev().copied().collect()
    }

    pub fn zero(&self) -> Fq {
        Fq::ZERO
    }

    pub fn one(&self) -> Fq {
        Fq::ONE
    }

    /// Element with the given code; errors if out of range.
    pub fn elem(&self, code: u32) -> Result<Fq> {
        if code < self.q {
            Ok(Fq(code))
        } else {
            Err(Error::InvalidInput(format!("{code} is not an element of F_{}", self.name())))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> Fq {
        Fq(v.rem_euclid(self.p as i64) as u32)
    }

    /// The canonical root `θ` of the modulus (code `p`, or `0` for a prime field).
    pub fn theta(&self) -> Fq {
        if self.m == 1 {
            Fq::ZERO
        } else {
            Fq(self.p)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.q).map(Fq)
    }

    pub fn units(&self) -> impl Iterator<Item = Fq> {
        (1..self.q).map(Fq)
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.p == 2 {
            Fq(a.0 ^ b.0)
        } else if self.m == 1 {
            let s = a.0 + b.0;
            Fq(if s >= self.p { s - self.p } else { s })
        } else if let Some(t) = &self.add {
            Fq(t[(a.0 * self.q + b.0) as usize])
        } else {
            Fq(self.add_digits(a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        Fq(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a.0 == 0 || b.0 == 0 {
            return Fq::ZERO;
        }
        let n = self.q - 1;
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        Fq(self.exp[(if s >= n { s - n } else { s }) as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Fq) -> Option<Fq> {
        if a.0 == 0 {
            return None;
        }
        let n = self.q - 1;
        Some(Fq(self.exp[((n - self.log[a.0 as usize]) % n) as usize]))
    }

    pub fn div(&self, a: Fq, b: Fq) -> Option<Fq> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Fq, e: u64) -> Fq {
        if e == 0 {
            return Fq::ONE;
        }
        if a.0 == 0 {
            return Fq::ZERO;
        }
        let n = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64 * (e % n) % n;
        Fq(self.exp[l as usize])
    }

    /// Discrete logarithm to the base of [`mult_generator`](Self::mult_generator).
    pub fn log(&self, a: Fq) -> Option<u32> {
        (a.0 != 0).then(|| self.log[a.0 as usize])
    }

    /// Least element (canonical order) of multiplicative order `q - 1`.
    pub fn mult_generator(&self) -> Fq {
        self.generator
    }

    /// Multiplicative order of a unit.
    pub fn mult_order(&self, a: Fq) -> Option<u64> {
        let l = self.log(a)? as u64;
        let n = (self.q - 1) as u64;
        Some(n / gcd(l, n))
    }

    fn check_subdegree(&self, r: u32) -> Result<()> {
        if r == 0 || self.m % r != 0 {
            Err(Error::DegreeMismatch { r, m: self.m })
        } else {
            Ok(())
        }
    }

    /// `x^{p^r}`, the Frobenius relative to the subfield of degree `r`.
    pub fn frobenius(&self, r: u32, x: Fq) -> Result<Fq> {
        self.check_subdegree(r)?;
        Ok(self.frobenius_unchecked(r, x))
    }

    pub(crate) fn frobenius_unchecked(&self, r: u32, x: Fq) -> Fq {
        self.pow(x, (self.p as u64).pow(r))
    }

    /// Product of the Galois conjugates of `x` over the degree-`r` subfield.
    pub fn norm(&self, r: u32, x: Fq) -> Result<Fq> {
        self.check_subdegree(r)?;
        let sub = (self.p as u64).pow(r);
        let e = ((self.q as u64) - 1) / (sub - 1);
        Ok(self.pow(x, e))
    }

    /// Whether `x` lies in the subfield of order `p^r`.
    pub fn in_subfield(&self, r: u32, x: Fq) -> Result<bool> {
        Ok(self.frobenius(r, x)? == x)
    }

    /// Brute-force coset decomposition of `k* / (k*)^n`.
    pub fn power_class_count(&self, n: u64) -> Result<PowerClassGroup> {
        if n == 0 {
            return Err(Error::InvalidInput("exponent must be at least 1".into()));
        }
        let powers: Vec<Fq> = {
            let mut seen = vec![false; self.q as usize];
            let mut v = Vec::new();
            for x in self.units() {
                let y = self.pow(x, n);
                if !seen[y.0 as usize] {
                    seen[y.0 as usize] = true;
                    v.push(y);
                }
            }
            v
        };
        let mut assigned = vec![false; self.q as usize];
        let mut reps = Vec::new();
        for x in self.units() {
            if assigned[x.0 as usize] {
                continue;
            }
            reps.push(x);
            for &h in &powers {
                assigned[self.mul(x, h).0 as usize] = true;
            }
        }
        Ok(PowerClassGroup { field: self.name(), n, size: reps.len(), reps })
    }
}

/// Coset representatives of `k* / (k*)^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerClassGroup {
    pub field: String,
    pub n: u64,
    pub reps: Vec<Fq>,
    pub size: usize,
}

/// Free-function form of [`FieldCtx::power_class_count`].
pub fn power_class_count(ctx: &FieldCtx, n: u64) -> Result<PowerClassGroup> {
    ctx.power_class_count(n)
}

/// The field `F_{p^{m r}}` containing `base`.
pub fn extension(base: &FieldCtx, r: u32) -> Result<Field> {
    if r == 0 {
        return Err(Error::InvalidInput("extension degree must be at least 1".into()));
    }
    make_field(base.p as u64, base.m * r)
}

/// A fixed field embedding `src -> dst`.
///
/// The canonical root of `src`'s modulus is sent to the least root (canonical order) of the
/// same polynomial in `dst`.
#[derive(Clone)]
pub struct Embedding {
    src: Field,
    dst: Field,
    image: Vec<Fq>,
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Embedding({} -> {})", self.src.name(), self.dst.name())
    }
}

impl Embedding {
    pub fn new(src: &Field, dst: &Field) -> Result<Self> {
        if src.p != dst.p {
            return Err(Error::IncompatibleFields(format!(
                "characteristics {} and {} differ",
                src.p, dst.p
            )));
        }
        if dst.m % src.m != 0 {
            return Err(Error::IncompatibleFields(format!(
                "degree {} does not divide {}",
                src.m, dst.m
            )));
        }
        let gamma = compatible_generator(src)?;
        let beta = dst.norm(src.m, compatible_generator(dst)?)?;
        let mut image = vec![Fq::ZERO; src.q as usize];
        let (mut x, mut y) = (Fq::ONE, Fq::ONE);
        for _ in 0..src.q - 1 {
            image[x.0 as usize] = y;
            x = src.mul(x, gamma);
            y = dst.mul(y, beta);
        }
        Ok(Embedding { src: src.clone(), dst: dst.clone(), image })
    }

    #[inline]
    pub fn apply(&self, x: Fq) -> Fq {
        self.image[x.0 as usize]
    }

    pub fn src(&self) -> &Field {
        &self.src
    }

    pub fn dst(&self) -> &Field {
        &self.dst
    }

    /// Inverse image of `y`, when `y` lies in the embedded subfield.
    pub fn preimage(&self, y: Fq) -> Option<Fq> {
        self.image.iter().position(|&v| v == y).map(|i| Fq(i as u32))
    }
}

/// Minimal polynomial over the prime field, constant term first.
fn prime_minpoly(k: &FieldCtx, x: Fq) -> Vec<u32> {
    let mut conjugates = vec![x];
    let mut y = k.frobenius_unchecked(1, x);
    while y != x {
        conjugates.push(y);
        y = k.frobenius_unchecked(1, y);
    }
    let mut poly = vec![Fq::ONE];
    for c in conjugates {
        let mut next = vec![Fq::ZERO; poly.len() + 1];
        for (i, &a) in poly.iter().enumerate() {
            next[i + 1] = k.add(next[i + 1], a);
            next[i] = k.sub(next[i], k.mul(a, c));
        }
        poly = next;
    }
    poly.into_iter().map(Fq::code).collect()
}

/// Primitive element whose norms to every subfield form a compatible system.
///
/// Embeddings send the generator of the subfield to the norm of the generator of the
/// larger field, so embeddings along any tower compose consistently.
pub fn compatible_generator(k: &Field) -> Result<Fq> {
    if let Some(&g) = k.compatible.get() {
        return Ok(g);
    }
    let mut targets = Vec::new();
    for l in prime_factors(k.m as u64) {
        let d = k.m / l as u32;
        let sub = make_field_bounded(k.p as u64, d, u64::MAX)?;
        targets.push((d, prime_minpoly(&sub, compatible_generator(&sub)?)));
    }
    let order = (k.q - 1) as u64;
    let g = (1..k.q)
        .map(Fq)
        .filter(|&c| k.mult_order(c) == Some(order))
        .find(|&c| {
            targets
                .iter()
                .all(|(d, target)| prime_minpoly(k, k.pow(c, order / ((k.p as u64).pow(*d) - 1))) == *target)
        })
        .ok_or_else(|| Error::Internal("no compatible generator".into()))?;
    Ok(*k.compatible.get_or_init(|| g))
}

/// Embeds a single element `x` of `src` into `dst`.
pub fn embed(src: &Field, dst: &Field, x: Fq) -> Result<Fq> {
    if x.0 >= src.q {
        return Err(Error::InvalidInput(format!("{x} is not an element of F_{}", src.name())));
    }
    Ok(Embedding::new(src, dst)?.apply(x))
}

// --- polynomials over F_p used only to find moduli ---

fn fp_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fp_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let df = f.len() - 1;
    let lead_inv = mod_inv(f[df], p);
    while r.len() > df {
        let k = r.len() - 1;
        let c = r[k] * lead_inv % p;
        for i in 0..=df {
            let idx = k - df + i;
            r[idx] = (r[idx] + p - c * f[i] % p) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    fp_rem(&prod, f, p)
}

fn fp_powmod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = fp_rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mulmod(&acc, &b, f, p);
        }
        b = fp_mulmod(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    fp_trim(&mut x);
    fp_trim(&mut y);
    while !y.is_empty() {
        let r = fp_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn mod_inv(a: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let (mut b, mut e) = (a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Irreducibility of a monic polynomial over `F_p` (coefficients constant first).
pub(crate) fn is_irreducible_fp(f: &[u32], p: u32) -> bool {
    let p = p as u64;
    let f: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let m = f.len() - 1;
    if m == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let mut h = x.clone();
    for _ in 1..=m / 2 {
        h = fp_powmod(&h, p, &f, p);
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let g = fp_gcd(&f, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn least_irreducible(p: u32, m: u32) -> Vec<u32> {
    let count = p.pow(m);
    for code in 0..count {
        let mut f: Vec<u32> = Vec::with_capacity(m as usize + 1);
        let mut c = code;
        for _ in 0..m {
            f.push(c % p);
            c /= p;
        }
        f.push(1);
        if is_irreducible_fp(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Irreducibility by exhaustive root/factor search over all monic lower-degree divisors.
    fn irreducible_by_trial(f: &[u32], p: u32) -> bool {
        let m = f.len() - 1;
        let f64s: Vec<u64> = f.iter().map(|&c| c as u64).collect();
        for d in 1..=m / 2 {
            for code in 0..p.pow(d as u32) {
                let mut g: Vec<u64> = Vec::new();
                let mut c = code;
                for _ in 0..d {
                    g.push((c % p) as u64);
                    c /= p;
                }
                g.push(1);
                if fp_rem(&f64s, &g, p as u64).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn prime_field_modulus_is_x() {
        let f = make_field(2, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.order(), 2);
    }

    #[test]
    fn f4_modulus() {
        let f = make_field(2, 2).unwrap();
        assert_eq!(f.modulus_high_first(), vec![1, 1, 1]);
    }

    #[test]
    fn f9_modulus_is_lex_least_irreducible() {
        // oracle: enumerate monic quadratics over F_3 in lex order, first irreducible by trial division
        let mut expected = None;
        'outer: for c1 in 0..3u32 {
            for c0 in 0..3u32 {
                if irreducible_by_trial(&[c0, c1, 1], 3) {
                    expected = Some(vec![1, c1, c0]);
                    break 'outer;
                }
            }
        }
        let f = make_field(3, 2).unwrap();
        assert_eq!(Some(f.modulus_high_first()), expected);
        assert_eq!(f.modulus_high_first(), vec![1, 0, 1]);
    }

    #[test]
    fn moduli_pass_trial_division() {
        for (p, m) in [(2, 3), (2, 4), (3, 3), (5, 2), (7, 2), (2, 6)] {
            let f = make_field(p, m).unwrap();
            assert!(irreducible_by_trial(f.modulus(), p as u32), "{p}^{m}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(make_field(4, 1).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(make_field(2, 21), Err(Error::BoundExceeded { .. })));
    }

    #[test]
    fn generators() {
        assert_eq!(make_field(2, 1).unwrap().mult_generator(), Fq(1));
        assert_eq!(make_field(5, 1).unwrap().mult_generator(), Fq(2));
        let f4 = make_field(2, 2).unwrap();
        let g = f4.mult_generator();
        // brute-force order
        let mut x = g;
        let mut k = 1;
        while x != Fq::ONE {
            x = f4.mul(x, g);
            k += 1;
        }
        assert_eq!(k, 3);
    }

    #[test]
    fn field_axioms_small() {
        for (p, m) in [(2, 2), (3, 2), (5, 1), (2, 3)] {
            let f = make_field(p, m).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), Fq::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Fq::ONE);
                }
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.slow_mul(a.0, b.0).into_fq());
                    for c in f.elements() {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    trait IntoFq {
        fn into_fq(self) -> Fq;
    }
    impl IntoFq for u32 {
        fn into_fq(self) -> Fq {
            Fq(self)
        }
    }

    #[test]
    fn frobenius_on_f4() {
        let f = make_field(2, 2).unwrap();
        assert_eq!(f.frobenius(1, Fq(2)).unwrap(), Fq(3));
        assert_eq!(f.frobenius(1, Fq(3)).unwrap(), Fq(2));
        for x in f.elements() {
            let y = f.frobenius(1, x).unwrap();
            assert_eq!(f.frobenius(1, y).unwrap(), x);
        }
        assert!(matches!(f.frobenius(3, Fq(1)), Err(Error::DegreeMismatch { .. })));
    }

    #[test]
    fn frobenius_fixed_field_and_cycle_length() {
        let f = make_field(2, 4).unwrap();
        for r in [1u32, 2] {
            let fixed = f.elements().filter(|&x| f.frobenius(r, x).unwrap() == x).count();
            assert_eq!(fixed, 2usize.pow(r));
            for x in f.elements() {
                let mut y = x;
                for _ in 0..(4 / r) {
                    y = f.frobenius(r, y).unwrap();
                }
                assert_eq!(y, x);
            }
        }
    }

    #[test]
    fn power_classes() {
        let f7 = make_field(7, 1).unwrap();
        assert_eq!(f7.power_class_count(1).unwrap().size, 1);
        assert_eq!(f7.power_class_count(3).unwrap().size, 3);
        let f4 = make_field(2, 2).unwrap();
        assert_eq!(f4.power_class_count(2).unwrap().size, 1);
        for (p, m) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
            let f = make_field(p, m).unwrap();
            for n in 1..=12u64 {
                let pc = f.power_class_count(n).unwrap();
                assert_eq!(pc.size as u64, gcd(n, f.order() as u64 - 1));
                // every unit in exactly one coset: x/rep is an n-th power for exactly one rep
                for x in f.units() {
                    let hits = pc
                        .reps
                        .iter()
                        .filter(|&&r| {
                            let t = f.div(x, r).unwrap();
                            f.units().any(|y| f.pow(y, n) == t)
                        })
                        .count();
                    assert_eq!(hits, 1);
                }
            }
        }
    }

    #[test]
    fn norm_f9_over_f3() {
        let f9 = make_field(3, 2).unwrap();
        assert_eq!(f9.norm(1, Fq::ONE).unwrap(), Fq::ONE);
        let mut image = std::collections::BTreeSet::new();
        let mut kernel = 0;
        for x in f9.units() {
            let n = f9.norm(1, x).unwrap();
            assert!(f9.in_subfield(1, n).unwrap());
            image.insert(n);
            if n == Fq::ONE {
                kernel += 1;
            }
        }
        assert_eq!(image.len(), 2);
        assert_eq!(kernel, 4);
    }

    #[test]
    fn embeddings() {
        let f2 = make_field(2, 1).unwrap();
        let f4 = make_field(2, 2).unwrap();
        let f16 = make_field(2, 4).unwrap();
        assert_eq!(embed(&f2, &f4, Fq::ZERO).unwrap(), Fq::ZERO);
        assert_eq!(embed(&f2, &f4, Fq::ONE).unwrap(), Fq::ONE);
        let e = Embedding::new(&f4, &f16).unwrap();
        for x in f4.elements() {
            let y = e.apply(x);
            assert_eq!(f16.pow(y, 4), y);
            for z in f4.elements() {
                assert_eq!(e.apply(f4.add(x, z)), f16.add(y, e.apply(z)));
                assert_eq!(e.apply(f4.mul(x, z)), f16.mul(y, e.apply(z)));
            }
        }
        let f3 = make_field(3, 1).unwrap();
        assert!(Embedding::new(&f3, &f4).is_err());
        let f8 = make_field(2, 3).unwrap();
        assert!(Embedding::new(&f4, &f8).is_err());
    }
}
