//! Square matrices over finite fields.
//!
//! Canonical forms, conjugacy tests in `GL_n` and `SL_n`, transporter spaces, the
//! multiplicative Jordan decomposition, and the explicit element constructors used by the
//! experiments (regular unipotents `u_β`, Heisenberg elements `h(t)`, and the regular
//! representation of an extension field on itself).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{make_field, Embedding, Field, FieldCtx, Fq};
use crate::poly::Poly;

/// Enumerate a linear space exhaustively when it has at most this many elements.
const ENUMERATION_LIMIT: u64 = 1 << 16;
/// Enumeration limit for determinant images of centralizer units.
const DET_ENUMERATION_LIMIT: u64 = 1 << 20;
const RANDOM_TRIES: usize = 4096;
const RNG_SEED: u64 = 0x7a63_6c61_7373;

/// Square matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    n: usize,
    e: Vec<Fq>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `[a,b;c,d]`, row-major with canonical element codes.
impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ";")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.e[i * self.n + j])?;
            }
        }
        write!(f, "]")
    }
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.n))?;
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// Parses the literal syntax without validating entries against a field.
impl FromStr for Mat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse { token: s.to_string(), reason: reason.to_string() };
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| bad("matrix literal must be enclosed in brackets"))?;
        let rows: Vec<Vec<u32>> = body
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|x| x.trim().parse::<u32>().map_err(|_| bad("entries must be element codes")))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(bad("matrix literal must be square"));
        }
        Ok(Mat { n, e: rows.into_iter().flatten().map(Fq).collect() })
    }
}

impl Mat {
    pub fn zero(n: usize) -> Self {
        Mat { n, e: vec![Fq::ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Fq::ONE)
    }

    pub fn scalar(n: usize, c: Fq) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.e[i * n + i] = c;
        }
        m
    }

    pub fn diag(d: &[Fq]) -> Self {
        let n = d.len();
        let mut m = Self::zero(n);
        for (i, &c) in d.iter().enumerate() {
            m.e[i * n + i] = c;
        }
        m
    }

    /// Builds from row-major entries; `entries.len()` must be a perfect square.
    pub fn from_entries(entries: Vec<Fq>) -> Result<Self> {
        let n = (entries.len() as f64).sqrt().round() as usize;
        if n * n != entries.len() {
            return Err(Error::InvalidInput("entry count is not a perfect square".into()));
        }
        Ok(Mat { n, e: entries })
    }

    pub(crate) fn from_vec(n: usize, e: Vec<Fq>) -> Self {
        debug_assert_eq!(e.len(), n * n);
        Mat { n, e }
    }

    pub fn from_rows(rows: &[&[u32]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("rows must have length n".into()));
        }
        Ok(Mat { n, e: rows.iter().flat_map(|r| r.iter().map(|&c| Fq(c))).collect() })
    }

    /// Checks that every entry is an element of `k`.
    pub fn validate(&self, k: &FieldCtx) -> Result<()> {
        match self.e.iter().find(|x| x.code() >= k.order()) {
            Some(x) => Err(Error::InvalidInput(format!("{x} is not an element of F_{}", k.name()))),
            None => Ok(()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Fq] {
        &self.e
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fq {
        self.e[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fq) {
        self.e[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Fq] {
        &self.e[i * self.n..(i + 1) * self.n]
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == if i == j { Fq::ONE } else { Fq::ZERO }))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn mul(&self, rhs: &Mat, k: &FieldCtx) -> Mat {
        let n = self.n;
        let mut out = vec![Fq::ZERO; n * n];
        for i in 0..n {
            for l in 0..n {
                let a = self.e[i * n + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.e[l * n + j];
                    if !b.is_zero() {
                        out[i * n + j] = k.add(out[i * n + j], k.mul(a, b));
                    }
                }
            }
        }
        Mat { n, e: out }
    }

    pub fn add(&self, rhs: &Mat, k: &FieldCtx) -> Mat {
        Mat { n: self.n, e: self.e.iter().zip(&rhs.e).map(|(&a, &b)| k.add(a, b)).collect() }
    }

    pub fn sub(&self, rhs: &Mat, k: &FieldCtx) -> Mat {
        Mat { n: self.n, e: self.e.iter().zip(&rhs.e).map(|(&a, &b)| k.sub(a, b)).collect() }
    }

    pub fn scale(&self, c: Fq, k: &FieldCtx) -> Mat {
        Mat { n: self.n, e: self.e.iter().map(|&a| k.mul(a, c)).collect() }
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        Mat { n, e: (0..n * n).map(|idx| self.e[(idx % n) * n + idx / n]).collect() }
    }

    pub fn pow(&self, mut e: u64, k: &FieldCtx) -> Mat {
        let mut acc = Mat::identity(self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, k);
            }
            base = base.mul(&base, k);
            e >>= 1;
        }
        acc
    }

    /// `x A x^{-1}`.
    pub fn conjugate_by(&self, x: &Mat, k: &FieldCtx) -> Result<Mat> {
        let xi = x.inverse(k).ok_or(Error::Singular)?;
        Ok(x.mul(self, k).mul(&xi, k))
    }

    /// Applies a field map entry-wise.
    pub fn map(&self, f: impl Fn(Fq) -> Fq) -> Mat {
        Mat { n: self.n, e: self.e.iter().map(|&x| f(x)).collect() }
    }

    pub fn embed(&self, emb: &Embedding) -> Mat {
        self.map(|x| emb.apply(x))
    }

    /// Entry-wise `x -> x^{p^r}`.
    pub fn frobenius(&self, k: &FieldCtx, r: u32) -> Result<Mat> {
        if r == 0 || k.m() % r != 0 {
            return Err(Error::DegreeMismatch { r, m: k.m() });
        }
        Ok(self.map(|x| k.frobenius_unchecked(r, x)))
    }

    /// Determinant and inverse by Gaussian elimination.
    pub fn det_inv(&self, k: &FieldCtx) -> (Fq, Option<Mat>) {
        let n = self.n;
        let mut a = self.e.clone();
        let mut inv = Mat::identity(n).e;
        let mut det = Fq::ONE;
        for c in 0..n {
            let Some(piv) = (c..n).find(|&r| !a[r * n + c].is_zero()) else {
                return (Fq::ZERO, None);
            };
            if piv != c {
                for j in 0..n {
                    a.swap(piv * n + j, c * n + j);
                    inv.swap(piv * n + j, c * n + j);
                }
                det = k.neg(det);
            }
            let pv = a[c * n + c];
            det = k.mul(det, pv);
            let pinv = k.inv(pv).unwrap();
            for j in 0..n {
                a[c * n + j] = k.mul(a[c * n + j], pinv);
                inv[c * n + j] = k.mul(inv[c * n + j], pinv);
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a[r * n + c];
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] = k.sub(a[r * n + j], k.mul(f, a[c * n + j]));
                    inv[r * n + j] = k.sub(inv[r * n + j], k.mul(f, inv[c * n + j]));
                }
            }
        }
        (det, Some(Mat { n, e: inv }))
    }

    pub fn det(&self, k: &FieldCtx) -> Fq {
        match self.n {
            0 => Fq::ONE,
            1 => self.e[0],
            2 => k.sub(k.mul(self.e[0], self.e[3]), k.mul(self.e[1], self.e[2])),
            3 => {
                let e = &self.e;
                let t1 = k.mul(e[0], k.sub(k.mul(e[4], e[8]), k.mul(e[5], e[7])));
                let t2 = k.mul(e[1], k.sub(k.mul(e[3], e[8]), k.mul(e[5], e[6])));
                let t3 = k.mul(e[2], k.sub(k.mul(e[3], e[7]), k.mul(e[4], e[6])));
                k.add(k.sub(t1, t2), t3)
            }
            _ => self.det_inv(k).0,
        }
    }

    pub fn inverse(&self, k: &FieldCtx) -> Option<Mat> {
        self.det_inv(k).1
    }

    pub fn rank(&self, k: &FieldCtx) -> usize {
        let rows: Vec<Vec<Fq>> = (0..self.n).map(|i| self.row(i).to_vec()).collect();
        rref(rows, self.n, k).1.len()
    }

    /// Characteristic polynomial via reduction to upper Hessenberg form.
    pub fn charpoly(&self, k: &FieldCtx) -> Poly {
        let n = self.n;
        let mut h = self.clone();
        for c in 0..n.saturating_sub(2) {
            let Some(piv) = (c + 1..n).find(|&r| !h.get(r, c).is_zero()) else { continue };
            if piv != c + 1 {
                for j in 0..n {
                    h.e.swap(piv * n + j, (c + 1) * n + j);
                }
                for i in 0..n {
                    h.e.swap(i * n + piv, i * n + c + 1);
                }
            }
            let pinv = k.inv(h.get(c + 1, c)).unwrap();
            for i in c + 2..n {
                let u = k.mul(h.get(i, c), pinv);
                if u.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = k.sub(h.get(i, j), k.mul(u, h.get(c + 1, j)));
                    h.set(i, j, v);
                }
                for r in 0..n {
                    let v = k.add(h.get(r, c + 1), k.mul(u, h.get(r, i)));
                    h.set(r, c + 1, v);
                }
            }
        }
        let mut ps: Vec<Poly> = vec![Poly::one()];
        for kk in 0..n {
            let mut next = Poly::linear(k, h.get(kk, kk)).mul(&ps[kk], k);
            let mut prod = Fq::ONE;
            for i in (0..kk).rev() {
                prod = k.mul(prod, h.get(i + 1, i));
                let c = k.mul(h.get(i, kk), prod);
                if !c.is_zero() {
                    next = next.sub(&ps[i].scale(c, k), k);
                }
            }
            ps.push(next);
        }
        ps.pop().unwrap()
    }

    /// Non-constant invariant factors in divisibility order, from the Smith form of `xI - A`.
    pub fn invariant_factors(&self, k: &FieldCtx) -> Vec<Poly> {
        smith_invariant_factors(self, k)
    }

    pub fn minpoly(&self, k: &FieldCtx) -> Poly {
        self.invariant_factors(k).pop().unwrap_or_else(Poly::one)
    }

    /// Evaluates a polynomial at the matrix.
    pub fn eval_poly(&self, f: &Poly, k: &FieldCtx) -> Mat {
        let mut acc = Mat::zero(self.n);
        for &c in f.coeffs().iter().rev() {
            acc = acc.mul(self, k).add(&Mat::scalar(self.n, c), k);
        }
        acc
    }

    /// Multiplicative order of an invertible matrix.
    pub fn order(&self, k: &FieldCtx) -> Result<u64> {
        if self.det(k).is_zero() {
            return Err(Error::Singular);
        }
        // |GL_n(F_q)| bounds every element order; the loop ends well before that in practice
        let mut x = self.clone();
        let mut ord = 1u64;
        while !x.is_identity() {
            x = x.mul(self, k);
            ord += 1;
            if ord > 1 << 32 {
                return Err(Error::Internal("element order search did not terminate".into()));
            }
        }
        Ok(ord)
    }
}

/// Row-reduces; returns the reduced rows and the pivot columns.
fn rref(mut rows: Vec<Vec<Fq>>, ncols: usize, k: &FieldCtx) -> (Vec<Vec<Fq>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, piv);
        let pinv = k.inv(rows[r][c]).unwrap();
        for x in rows[r].iter_mut() {
            *x = k.mul(*x, pinv);
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c];
            for j in 0..ncols {
                let v = k.sub(rows[i][j], k.mul(f, rows[r][j]));
                rows[i][j] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Rank of a list of vectors of length `ncols`.
pub(crate) fn vector_rank(rows: Vec<Vec<Fq>>, ncols: usize, k: &FieldCtx) -> usize {
    rref(rows, ncols, k).1.len()
}

/// Basis of the right kernel of the system `rows`.
pub(crate) fn nullspace(rows: Vec<Vec<Fq>>, ncols: usize, k: &FieldCtx) -> Vec<Vec<Fq>> {
    let (red, pivots) = rref(rows, ncols, k);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Fq::ZERO; ncols];
            v[f] = Fq::ONE;
            for (row, &pc) in red.iter().zip(&pivots) {
                v[pc] = k.neg(row[f]);
            }
            v
        })
        .collect()
}

fn smith_invariant_factors(a: &Mat, k: &FieldCtx) -> Vec<Poly> {
    let n = a.n;
    let mut m: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = k.neg(a.get(i, j));
                    if i == j {
                        Poly::new(vec![c, Fq::ONE])
                    } else {
                        Poly::constant(c)
                    }
                })
                .collect()
        })
        .collect();
    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize, usize)> = None;
            for (i, row) in m.iter().enumerate().skip(t) {
                for (j, p) in row.iter().enumerate().skip(t) {
                    if let Some(d) = p.degree() {
                        if best.is_none_or(|b| d < b.2) {
                            best = Some((i, j, d));
                        }
                    }
                }
            }
            let Some((bi, bj, _)) = best else { break };
            m.swap(t, bi);
            for row in m.iter_mut() {
                row.swap(t, bj);
            }
            let pivot = m[t][t].clone();
            let mut clean = true;
            for i in t + 1..n {
                if m[i][t].is_zero() {
                    continue;
                }
                let (quo, r) = m[i][t].div_rem(&pivot, k);
                for j in t..n {
                    let v = m[i][j].sub(&quo.mul(&m[t][j], k), k);
                    m[i][j] = v;
                }
                clean &= r.is_zero();
            }
            for j in t + 1..n {
                if m[t][j].is_zero() {
                    continue;
                }
                let (quo, r) = m[t][j].div_rem(&pivot, k);
                for row in m.iter_mut().skip(t) {
                    let v = row[j].sub(&quo.mul(&row[t], k), k);
                    row[j] = v;
                }
                clean &= r.is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..n).find(|&i| (t + 1..n).any(|j| !m[i][j].rem(&pivot, k).is_zero()));
            match bad {
                Some(i) => {
                    for j in t..n {
                        let v = m[t][j].add(&m[i][j], k);
                        m[t][j] = v;
                    }
                }
                None => break,
            }
        }
    }
    (0..n)
        .map(|i| m[i][i].monic(k))
        .filter(|p| p.degree().unwrap_or(0) > 0)
        .collect()
}

/// Companion matrix of a monic polynomial: ones on the subdiagonal, negated coefficients in
/// the last column.
pub fn companion(f: &Poly, k: &FieldCtx) -> Mat {
    let d = f.degree().unwrap_or(0);
    let mut m = Mat::zero(d);
    for i in 1..d {
        m.set(i, i - 1, Fq::ONE);
    }
    for i in 0..d {
        m.set(i, d - 1, k.neg(f.coeff(i)));
    }
    m
}

fn block_diag(blocks: &[Mat]) -> Mat {
    let n = blocks.iter().map(|b| b.n).sum();
    let mut m = Mat::zero(n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.n {
            for j in 0..b.n {
                m.set(off + i, off + j, b.get(i, j));
            }
        }
        off += b.n;
    }
    m
}

/// Rational canonical form together with a transform `T` with `T A T^{-1} = form`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalForm {
    pub form: Mat,
    pub transform: Mat,
    pub invariant_factors: Vec<Poly>,
}

pub fn rcf(a: &Mat, k: &FieldCtx) -> RationalForm {
    let factors = a.invariant_factors(k);
    let blocks: Vec<Mat> = factors.iter().map(|f| companion(f, k)).collect();
    let form = block_diag(&blocks);
    let transform = transporter_space(&form, a, k)
        .find_invertible(k)
        .expect("a matrix is similar to its rational canonical form");
    RationalForm { form, transform, invariant_factors: factors }
}

/// The space `{X : X B = A X}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransporterSpace {
    pub n: usize,
    pub basis: Vec<Mat>,
    pub dim: usize,
}

fn intertwining_rows(a: &Mat, b: &Mat, k: &FieldCtx, rows: &mut Vec<Vec<Fq>>) {
    let n = a.n;
    for i in 0..n {
        for j in 0..n {
            let mut row = vec![Fq::ZERO; n * n];
            for l in 0..n {
                // (X B)_{ij} contributes B_{lj} X_{il}
                let u = i * n + l;
                row[u] = k.add(row[u], b.get(l, j));
                // (A X)_{ij} contributes A_{il} X_{lj}
                let v = l * n + j;
                row[v] = k.sub(row[v], a.get(i, l));
            }
            rows.push(row);
        }
    }
}

pub fn transporter_space(a: &Mat, b: &Mat, k: &FieldCtx) -> TransporterSpace {
    common_transporter(&[(a.clone(), b.clone())], k)
}

/// `{X : X B_i = A_i X for all i}`; with `A_i = B_i` this is the commutant of the set.
pub fn common_transporter(pairs: &[(Mat, Mat)], k: &FieldCtx) -> TransporterSpace {
    let n = pairs.first().map_or(0, |p| p.0.n);
    let mut rows = Vec::new();
    for (a, b) in pairs {
        intertwining_rows(a, b, k, &mut rows);
    }
    let basis: Vec<Mat> = nullspace(rows, n * n, k).into_iter().map(|v| Mat { n, e: v }).collect();
    TransporterSpace { n, dim: basis.len(), basis }
}

/// The centralizer algebra `{X : X A = A X}`.
pub fn centralizer_algebra(a: &Mat, k: &FieldCtx) -> TransporterSpace {
    transporter_space(a, a, k)
}

impl TransporterSpace {
    /// Number of elements, `q^dim`, saturating.
    pub fn size(&self, k: &FieldCtx) -> u128 {
        (k.order() as u128).checked_pow(self.dim as u32).unwrap_or(u128::MAX)
    }

    /// The element with coefficient vector `coeffs` in the basis.
    pub fn combination(&self, coeffs: &[Fq], k: &FieldCtx) -> Mat {
        let mut acc = Mat::zero(self.n);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if !c.is_zero() {
                acc = acc.add(&b.scale(*c, k), k);
            }
        }
        acc
    }

    /// Visits every element, in lexicographic order of coefficient vectors (first basis
    /// coefficient most significant). Stops early when `f` returns `false`.
    pub fn for_each(&self, k: &FieldCtx, mut f: impl FnMut(&Mat) -> bool) {
        let q = k.order();
        let mut coeffs = vec![Fq::ZERO; self.dim];
        let mut current = Mat::zero(self.n);
        loop {
            if !f(&current) {
                return;
            }
            // odometer increment from the least significant coefficient
            let mut pos = self.dim;
            loop {
                if pos == 0 {
                    return;
                }
                pos -= 1;
                let old = coeffs[pos];
                let new = Fq((old.code() + 1) % q);
                coeffs[pos] = new;
                let delta = k.sub(new, old);
                current = current.add(&self.basis[pos].scale(delta, k), k);
                if new.code() != 0 {
                    break;
                }
            }
        }
    }

    /// An invertible element: the first in enumeration order for small spaces, otherwise a
    /// seeded random search.
    pub fn find_invertible(&self, k: &FieldCtx) -> Option<Mat> {
        if self.dim == 0 {
            return None;
        }
        if self.size(k) <= ENUMERATION_LIMIT as u128 {
            let mut found = None;
            self.for_each(k, |x| {
                if x.det(k).is_zero() {
                    true
                } else {
                    found = Some(x.clone());
                    false
                }
            });
            return found;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
        (0..RANDOM_TRIES).find_map(|_| {
            let coeffs: Vec<Fq> = (0..self.dim).map(|_| Fq(rng.gen_range(0..k.order()))).collect();
            let x = self.combination(&coeffs, k);
            (!x.det(k).is_zero()).then_some(x)
        })
    }

    /// For each determinant value attained by an invertible element, one element attaining it.
    pub fn unit_determinants(&self, k: &FieldCtx) -> HashMap<Fq, Mat> {
        let mut out: HashMap<Fq, Mat> = HashMap::new();
        let target = (k.order() - 1) as usize;
        if self.size(k) <= DET_ENUMERATION_LIMIT as u128 {
            self.for_each(k, |x| {
                let d = x.det(k);
                if !d.is_zero() {
                    out.entry(d).or_insert_with(|| x.clone());
                }
                out.len() < target
            });
            return out;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
        for _ in 0..RANDOM_TRIES {
            let coeffs: Vec<Fq> = (0..self.dim).map(|_| Fq(rng.gen_range(0..k.order()))).collect();
            let x = self.combination(&coeffs, k);
            let d = x.det(k);
            if !d.is_zero() {
                out.entry(d).or_insert(x);
            }
        }
        // close the determinant image under products
        loop {
            let snapshot: Vec<(Fq, Mat)> = out.iter().map(|(d, m)| (*d, m.clone())).collect();
            let mut grew = false;
            for (d1, m1) in &snapshot {
                for (d2, m2) in &snapshot {
                    let d = k.mul(*d1, *d2);
                    if !out.contains_key(&d) {
                        out.insert(d, m1.mul(m2, k));
                        grew = true;
                    }
                }
            }
            if !grew {
                return out;
            }
        }
    }
}

/// An invertible `X` with `X B X^{-1} = A`, or `None` when `A` and `B` are not similar.
pub fn gl_conjugate_test(a: &Mat, b: &Mat, k: &FieldCtx) -> Option<Mat> {
    if a.n != b.n || a.invariant_factors(k) != b.invariant_factors(k) {
        return None;
    }
    if a == b {
        return Some(Mat::identity(a.n));
    }
    transporter_space(a, b, k).find_invertible(k)
}

/// An `X` of determinant one with `X B X^{-1} = A`, or `None` when no such `X` exists.
///
/// One `GL`-witness `X_0` is corrected by a unit of the centralizer algebra of `B` whose
/// determinant cancels `det X_0`; a correction exists iff `det X_0` lies in the determinant
/// image of those units.
pub fn sl_conjugate_test(a: &Mat, b: &Mat, k: &FieldCtx) -> Result<Option<Mat>> {
    if a.det(k) != Fq::ONE || b.det(k) != Fq::ONE {
        return Err(Error::Precondition("sl_conjugate_test needs determinant-one inputs".into()));
    }
    let Some(x0) = gl_conjugate_test(a, b, k) else { return Ok(None) };
    let d0 = x0.det(k);
    if d0 == Fq::ONE {
        return Ok(Some(x0));
    }
    let wanted = k.inv(d0).unwrap();
    let units = centralizer_algebra(b, k).unit_determinants(k);
    Ok(units.get(&wanted).map(|y| x0.mul(y, k)))
}

/// Semisimple and unipotent parts of an invertible matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JordanPair {
    pub semisimple: Mat,
    pub unipotent: Mat,
}

/// Multiplicative Jordan decomposition through the order of `g`: with `ord(g) = p^a t`,
/// `g_s = g^e` where `e ≡ 0 (mod p^a)` and `e ≡ 1 (mod t)`, and `g_u = g g_s^{-1}`.
pub fn jordan_decomposition(g: &Mat, k: &FieldCtx) -> Result<JordanPair> {
    let ord = g.order(k)?;
    let p = k.p() as u64;
    let (mut pa, mut t) = (1u64, ord);
    while t % p == 0 {
        t /= p;
        pa *= p;
    }
    let e = if t == 1 {
        0
    } else {
        // pa * (pa^{-1} mod t)
        let inv = (1..t).find(|&y| (pa % t) * y % t == 1).expect("p^a is a unit mod t");
        (pa * inv) % ord
    };
    let semisimple = g.pow(e, k);
    let unipotent = g.pow((ord + 1 - e) % ord, k);
    Ok(JordanPair { semisimple, unipotent })
}

pub fn is_semisimple(g: &Mat, k: &FieldCtx) -> bool {
    g.minpoly(k).is_squarefree(k)
}

pub fn is_unipotent(g: &Mat, k: &FieldCtx) -> bool {
    let f = g.minpoly(k);
    let d = f.degree().unwrap_or(0) as u32;
    f == Poly::linear(k, Fq::ONE).pow(d, k)
}

/// Minimal polynomial equals characteristic polynomial.
pub fn is_regular(g: &Mat, k: &FieldCtx) -> bool {
    g.invariant_factors(k).len() == 1
}

/// Squarefree characteristic polynomial.
pub fn is_regular_semisimple(g: &Mat, k: &FieldCtx) -> bool {
    g.charpoly(k).is_squarefree(k)
}

/// `u_β`: ones on the diagonal, first superdiagonal `(β, 1, ..., 1)`, zeros elsewhere.
pub fn regular_unipotent(n: usize, beta: Fq, k: &FieldCtx) -> Result<Mat> {
    if beta.is_zero() {
        return Err(Error::InvalidInput("β must be nonzero".into()));
    }
    if beta.code() >= k.order() {
        return Err(Error::InvalidInput(format!("{beta} is not an element of F_{}", k.name())));
    }
    let mut m = Mat::identity(n);
    for i in 0..n.saturating_sub(1) {
        m.set(i, i + 1, if i == 0 { beta } else { Fq::ONE });
    }
    Ok(m)
}

/// `h(t) = [1,t,0;0,1,1;0,0,1]`.
pub fn heisenberg_element(t: Fq, k: &FieldCtx) -> Result<Mat> {
    if t.is_zero() {
        return Err(Error::InvalidInput("t must be nonzero".into()));
    }
    if t.code() >= k.order() {
        return Err(Error::InvalidInput(format!("{t} is not an element of F_{}", k.name())));
    }
    let mut m = Mat::identity(3);
    m.set(0, 1, t);
    m.set(1, 2, Fq::ONE);
    Ok(m)
}

/// Left regular representation of an extension `K` on itself over a subfield `k`, in the
/// power basis `1, θ, ..., θ^{n-1}` of the canonical root `θ` of `K`'s modulus.
pub struct WeilRestriction {
    big: Field,
    base: Field,
    n: usize,
    prime: Field,
    /// Inverse of the change of basis from `F_p` digits to coordinates `(i, k)`.
    coords: Mat,
}

impl WeilRestriction {
    pub fn new(base: &Field, big: &Field) -> Result<Self> {
        let emb = Embedding::new(base, big)?;
        let (r, m) = (base.m() as usize, big.m() as usize);
        let n = m / r;
        let prime = make_field(big.p() as u64, 1)?;
        let psi = base.theta();
        let theta = big.theta();
        let mut cols = Mat::zero(m);
        for i in 0..n {
            for kk in 0..r {
                let b = big.mul(emb.apply(base.pow(psi, kk as u64)), big.pow(theta, i as u64));
                for (d, digit) in big.digits(b.code()).into_iter().enumerate() {
                    cols.set(d, i * r + kk, Fq(digit));
                }
            }
        }
        let coords = cols
            .inverse(&prime)
            .ok_or_else(|| Error::Internal("power basis is not a basis".into()))?;
        Ok(WeilRestriction { big: big.clone(), base: base.clone(), n, prime, coords })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Coordinates of `y` in the power basis, as elements of the base field.
    pub fn coordinates(&self, y: Fq) -> Vec<Fq> {
        let digits: Vec<Fq> = self.big.digits(y.code()).into_iter().map(Fq).collect();
        let m = digits.len();
        let c: Vec<Fq> = (0..m)
            .map(|row| {
                (0..m).fold(Fq::ZERO, |acc, j| {
                    self.prime.add(acc, self.prime.mul(self.coords.get(row, j), digits[j]))
                })
            })
            .collect();
        let r = self.base.m() as usize;
        let p = self.base.p();
        (0..self.n)
            .map(|i| Fq((0..r).rev().fold(0u32, |acc, kk| acc * p + c[i * r + kk].code())))
            .collect()
    }

    /// Matrix over the base field of multiplication by `x`.
    pub fn embed(&self, x: Fq) -> Result<Mat> {
        if x.is_zero() {
            return Err(Error::InvalidInput("only units embed into GL_n".into()));
        }
        let mut m = Mat::zero(self.n);
        let theta = self.big.theta();
        for j in 0..self.n {
            let y = self.big.mul(x, self.big.pow(theta, j as u64));
            for (i, c) in self.coordinates(y).into_iter().enumerate() {
                m.set(i, j, c);
            }
        }
        Ok(m)
    }
}

/// One-shot form of [`WeilRestriction::embed`].
pub fn weil_embed(base: &Field, big: &Field, x: Fq) -> Result<Mat> {
    WeilRestriction::new(base, big)?.embed(x)
}
