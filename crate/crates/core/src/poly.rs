//! Dense univariate polynomials over a [`FieldCtx`].

use serde::Serialize;

use crate::ff::{FieldCtx, Fq};

/// Coefficients constant term first, without trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Poly(Vec<Fq>);

impl Poly {
    pub fn new(mut coeffs: Vec<Fq>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn one() -> Self {
        Poly(vec![Fq::ONE])
    }

    pub fn constant(c: Fq) -> Self {
        Poly::new(vec![c])
    }

    /// The monic linear polynomial `x - a`.
    pub fn linear(k: &FieldCtx, a: Fq) -> Self {
        Poly(vec![k.neg(a), Fq::ONE])
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Fq {
        self.0.last().copied().unwrap_or(Fq::ZERO)
    }

    pub fn coeff(&self, i: usize) -> Fq {
        self.0.get(i).copied().unwrap_or(Fq::ZERO)
    }

    pub fn add(&self, other: &Poly, k: &FieldCtx) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::new((0..n).map(|i| k.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Poly, k: &FieldCtx) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::new((0..n).map(|i| k.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn scale(&self, c: Fq, k: &FieldCtx) -> Poly {
        Poly::new(self.0.iter().map(|&a| k.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, k: &FieldCtx) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fq::ZERO; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, e: u32, k: &FieldCtx) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| acc.mul(self, k))
    }

    /// Euclidean division; panics on division by zero.
    pub fn div_rem(&self, d: &Poly, k: &FieldCtx) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = k.inv(d.lead()).expect("nonzero leading coefficient");
        let mut r = self.0.clone();
        let mut quo = vec![Fq::ZERO; self.0.len().saturating_sub(dd)];
        while r.len() > dd {
            let top = r.len() - 1;
            let c = k.mul(*r.last().unwrap(), lead_inv);
            let shift = top - dd;
            quo[shift] = c;
            for (i, &dc) in d.0.iter().enumerate() {
                r[shift + i] = k.sub(r[shift + i], k.mul(c, dc));
            }
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        (Poly::new(quo), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly, k: &FieldCtx) -> Poly {
        self.div_rem(d, k).1
    }

    pub fn monic(&self, k: &FieldCtx) -> Poly {
        match k.inv(self.lead()) {
            Some(li) => self.scale(li, k),
            None => Poly::zero(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly, k: &FieldCtx) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, k);
            a = b;
            b = r;
        }
        a.monic(k)
    }

    pub fn derivative(&self, k: &FieldCtx) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| k.mul(k.from_int(i as i64), c))
                .collect(),
        )
    }

    pub fn eval(&self, x: Fq, k: &FieldCtx) -> Fq {
        self.0.iter().rev().fold(Fq::ZERO, |acc, &c| k.add(k.mul(acc, x), c))
    }

    /// Squarefree test over a perfect field: `gcd(f, f') = 1`.
    pub fn is_squarefree(&self, k: &FieldCtx) -> bool {
        self.gcd(&self.derivative(k), k).degree() == Some(0)
    }

    /// Irreducibility by trial division with all monic polynomials of degree at most `deg / 2`.
    /// Intended for the small degrees used in torus typing.
    pub fn is_irreducible(&self, k: &FieldCtx) -> bool {
        let Some(d) = self.degree() else { return false };
        if d == 0 {
            return false;
        }
        for e in 1..=d / 2 {
            let count = (k.order() as u64).pow(e as u32);
            for code in 0..count {
                let mut c = code;
                let mut coeffs = Vec::with_capacity(e + 1);
                for _ in 0..e {
                    coeffs.push(Fq((c % k.order() as u64) as u32));
                    c /= k.order() as u64;
                }
                coeffs.push(Fq::ONE);
                if self.rem(&Poly(coeffs), k).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Degrees of the irreducible factors (with multiplicity), sorted descending.
    pub fn factor_degrees(&self, k: &FieldCtx) -> Vec<usize> {
        let mut rest = self.monic(k);
        let mut out = Vec::new();
        let mut e = 1usize;
        while rest.degree().unwrap_or(0) > 0 {
            if e > rest.degree().unwrap() {
                out.push(rest.degree().unwrap());
                break;
            }
            let count = (k.order() as u64).pow(e as u32);
            let mut found = false;
            for code in 0..count {
                let mut c = code;
                let mut coeffs = Vec::with_capacity(e + 1);
                for _ in 0..e {
                    coeffs.push(Fq((c % k.order() as u64) as u32));
                    c /= k.order() as u64;
                }
                coeffs.push(Fq::ONE);
                let g = Poly(coeffs);
                let (quo, r) = rest.div_rem(&g, k);
                if r.is_zero() {
                    out.push(e);
                    rest = quo;
                    found = true;
                    break;
                }
            }
            if !found {
                e += 1;
            }
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }
}
