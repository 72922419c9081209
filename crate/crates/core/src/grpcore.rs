//! Explicit finite matrix groups.
//!
//! A [`GroupTable`] stores every element of a finite matrix group as a sorted array of
//! integer keys (the row-major base-`q` encoding of the matrix), so element ids follow the
//! canonical order and the least id of any set is its canonical representative.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{is_prime, make_field, Embedding, Field, FieldCtx, Fq};
use crate::matfq::{centralizer_algebra, common_transporter, Mat, TransporterSpace};

/// Default bound on group orders.
pub const DEFAULT_MAX_GROUP: u64 = 2_000_000;
/// Enumerate candidate matrices directly when there are at most this many.
const SCAN_LIMIT: u128 = 8_000_000;
/// Enumerate a centralizer algebra instead of scanning the group when it is at most this big.
const ALGEBRA_LIMIT: u128 = 1 << 22;
/// Candidates tried before a subgroup-conjugacy search switches to normalizer cosets.
const LAZY_NORMALIZER_AFTER: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Gl,
    Sl,
    BorelGl,
    BorelSl,
    UnipotentFull,
    Heisenberg,
    Dihedral,
}

/// A matrix group family that can be instantiated over any finite field.
///
/// For `Dihedral`, `n` is the polygon size `m` and the matrices are `2 x 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub n: usize,
    pub allow_bad_characteristic: bool,
}

impl FamilySpec {
    fn of(kind: FamilyKind, n: usize) -> Self {
        FamilySpec { kind, n, allow_bad_characteristic: false }
    }

    pub fn gl(n: usize) -> Self {
        Self::of(FamilyKind::Gl, n)
    }

    pub fn sl(n: usize) -> Self {
        Self::of(FamilyKind::Sl, n)
    }

    pub fn borel_gl(n: usize) -> Self {
        Self::of(FamilyKind::BorelGl, n)
    }

    pub fn borel_sl(n: usize) -> Self {
        Self::of(FamilyKind::BorelSl, n)
    }

    pub fn unipotent(n: usize) -> Self {
        Self::of(FamilyKind::UnipotentFull, n)
    }

    pub fn heisenberg() -> Self {
        Self::of(FamilyKind::Heisenberg, 3)
    }

    pub fn dihedral(m: usize) -> Self {
        Self::of(FamilyKind::Dihedral, m)
    }

    /// Lifts the characteristic guard.
    pub fn with_override(mut self) -> Self {
        self.allow_bad_characteristic = true;
        self
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        match self.kind {
            FamilyKind::Dihedral => 2,
            FamilyKind::Heisenberg => 3,
            _ => self.n,
        }
    }

    pub fn is_reductive(&self) -> bool {
        matches!(self.kind, FamilyKind::Gl | FamilyKind::Sl)
    }

    pub fn name(&self) -> String {
        match self.kind {
            FamilyKind::Gl => format!("gl:{}", self.n),
            FamilyKind::Sl => format!("sl:{}", self.n),
            FamilyKind::BorelGl => format!("borel-gl:{}", self.n),
            FamilyKind::BorelSl => format!("borel-sl:{}", self.n),
            FamilyKind::UnipotentFull => format!("unipotent:{}", self.n),
            FamilyKind::Heisenberg => "u3".to_string(),
            FamilyKind::Dihedral => format!("dihedral:{}", self.n),
        }
    }

    /// Rejects `SL`-type families in characteristic dividing `n` unless overridden.
    pub fn check_guard(&self, k: &FieldCtx) -> Result<()> {
        let guarded = matches!(self.kind, FamilyKind::Sl | FamilyKind::BorelSl);
        if guarded && !self.allow_bad_characteristic && self.n % k.p() as usize == 0 {
            return Err(Error::CharacteristicGuard { family: self.name(), p: k.p(), n: self.n });
        }
        Ok(())
    }

    /// Membership of an arbitrary matrix over `k`.
    pub fn contains(&self, x: &Mat, k: &FieldCtx) -> bool {
        if x.n() != self.dim() {
            return false;
        }
        match self.kind {
            FamilyKind::Gl => !x.det(k).is_zero(),
            FamilyKind::Sl => x.det(k) == Fq::ONE,
            FamilyKind::BorelGl => x.is_upper_triangular() && !x.det(k).is_zero(),
            FamilyKind::BorelSl => x.is_upper_triangular() && x.det(k) == Fq::ONE,
            FamilyKind::UnipotentFull | FamilyKind::Heisenberg => {
                x.is_upper_triangular() && (0..x.n()).all(|i| x.get(i, i) == Fq::ONE)
            }
            FamilyKind::Dihedral => {
                let m = self.n as u64;
                let (a, b, c, d) = (x.get(0, 0), x.get(0, 1), x.get(1, 0), x.get(1, 1));
                let in_mu = |t: Fq| !t.is_zero() && k.pow(t, m) == Fq::ONE;
                let rotation = b.is_zero() && c.is_zero() && in_mu(a) && k.mul(a, d) == Fq::ONE;
                let reflection = a.is_zero() && d.is_zero() && in_mu(b) && k.mul(b, c) == Fq::ONE;
                rotation || reflection
            }
        }
    }

    /// Closed-form order over `F_q`.
    pub fn predicted_order(&self, q: u64) -> u128 {
        let q = q as u128;
        let n = self.n as u32;
        let tri = n * n.saturating_sub(1) / 2;
        match self.kind {
            FamilyKind::Gl => (0..n).map(|i| q.pow(n) - q.pow(i)).product(),
            FamilyKind::Sl => (0..n).map(|i| q.pow(n) - q.pow(i)).product::<u128>() / (q - 1),
            FamilyKind::BorelGl => (q - 1).pow(n) * q.pow(tri),
            FamilyKind::BorelSl => (q - 1).pow(n.saturating_sub(1)) * q.pow(tri),
            FamilyKind::UnipotentFull => q.pow(tri),
            FamilyKind::Heisenberg => q.pow(3),
            FamilyKind::Dihedral => 2 * self.n as u128,
        }
    }

    /// Generators over `k`.
    pub fn generators(&self, k: &FieldCtx) -> Result<Vec<Mat>> {
        let n = self.dim();
        let omega = k.mult_generator();
        let transvection = |i: usize, j: usize, c: Fq| {
            let mut x = Mat::identity(n);
            x.set(i, j, c);
            x
        };
        let additive: Vec<Fq> = (0..k.m()).map(|e| k.pow(k.theta(), e as u64)).collect();
        let mut gens = Vec::new();
        let push_transvections = |gens: &mut Vec<Mat>, upper_only: bool| {
            for i in 0..n {
                for j in 0..n {
                    if i == j || (upper_only && j < i) {
                        continue;
                    }
                    for &c in &additive {
                        gens.push(transvection(i, j, c));
                    }
                }
            }
        };
        let diag_with = |entries: &[(usize, Fq)]| {
            let mut d = vec![Fq::ONE; n];
            for &(i, c) in entries {
                d[i] = c;
            }
            Mat::diag(&d)
        };
        match self.kind {
            FamilyKind::Gl => {
                gens.push(diag_with(&[(0, omega)]));
                push_transvections(&mut gens, false);
            }
            FamilyKind::Sl => push_transvections(&mut gens, false),
            FamilyKind::BorelGl => {
                for i in 0..n {
                    gens.push(diag_with(&[(i, omega)]));
                }
                push_transvections(&mut gens, true);
            }
            FamilyKind::BorelSl => {
                let inv = k.inv(omega).unwrap();
                for i in 0..n.saturating_sub(1) {
                    gens.push(diag_with(&[(i, omega), (i + 1, inv)]));
                }
                push_transvections(&mut gens, true);
            }
            FamilyKind::UnipotentFull | FamilyKind::Heisenberg => push_transvections(&mut gens, true),
            FamilyKind::Dihedral => {
                let m = self.n as u32;
                if m < 3 || (k.order() - 1) % m != 0 {
                    return Err(Error::InvalidInput(format!(
                        "F_{} has no element of order {m}; dihedral:{m} needs m >= 3 and m | q-1",
                        k.name()
                    )));
                }
                let zeta = k.pow(omega, ((k.order() - 1) / m) as u64);
                gens.push(Mat::diag(&[zeta, k.inv(zeta).unwrap()]));
                let mut s = Mat::zero(2);
                s.set(0, 1, Fq::ONE);
                s.set(1, 0, Fq::ONE);
                gens.push(s);
            }
        }
        gens.retain(|g| !g.is_identity());
        Ok(gens)
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// `gl:2`, `sl:3`, `borel-gl:2`, `borel-sl:2`, `unipotent:4`, `u3`, `dihedral:7`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse { token: s.to_string(), reason: reason.to_string() };
        if s == "u3" {
            return Ok(FamilySpec::heisenberg());
        }
        let (kind, n) = s.split_once(':').ok_or_else(|| bad("expected <kind>:<n>"))?;
        let n: usize = n.parse().map_err(|_| bad("dimension must be an integer"))?;
        if n == 0 {
            return Err(bad("dimension must be positive"));
        }
        Ok(match kind {
            "gl" => FamilySpec::gl(n),
            "sl" => FamilySpec::sl(n),
            "borel-gl" => FamilySpec::borel_gl(n),
            "borel-sl" => FamilySpec::borel_sl(n),
            "unipotent" => FamilySpec::unipotent(n),
            "dihedral" if n >= 3 => FamilySpec::dihedral(n),
            "dihedral" => return Err(bad("dihedral size must be at least 3")),
            _ => return Err(bad("unknown family kind")),
        })
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Smallest prime power `q` with `m | q - 1`.
pub fn dihedral_field_order(m: usize) -> (u64, u32) {
    let mut q = 2u64;
    loop {
        if (q - 1) % m as u64 == 0 {
            if let Some(pm) = prime_power(q) {
                return pm;
            }
        }
        q += 1;
    }
}

/// `q = p^m` decomposition, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut rest, mut m) = (q, 0u32);
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1 && is_prime(p)).then_some((p, m))
}

/// A group family together with its field, as written on the command line:
/// `gl:2@3^1`, `sl:3@2^2`, `borel-gl:2@2^1`, `borel-sl:2@3^1`, `unipotent:4@2^1`, `u3@5^1`,
/// `dihedral:7`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    pub family: FamilySpec,
    pub p: u64,
    pub m: u32,
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse { token: s.to_string(), reason: reason.to_string() };
        if let Some(m) = s.strip_prefix("dihedral:") {
            let m: usize = m.parse().map_err(|_| bad("dihedral size must be an integer"))?;
            if m < 3 {
                return Err(bad("dihedral size must be at least 3"));
            }
            let (p, e) = dihedral_field_order(m);
            return Ok(GroupSpec { family: FamilySpec::dihedral(m), p, m: e });
        }
        let (fam, field) = s.split_once('@').ok_or_else(|| bad("expected <family>@<p>^<m>"))?;
        let (p, m) = field.split_once('^').ok_or_else(|| bad("field must be written p^m"))?;
        let p: u64 = p.parse().map_err(|_| bad("field characteristic must be an integer"))?;
        let m: u32 = m.parse().map_err(|_| bad("field degree must be an integer"))?;
        let family: FamilySpec = fam.parse()?;
        if family.kind == FamilyKind::Dihedral {
            return Err(bad("dihedral groups carry their own field"));
        }
        Ok(GroupSpec { family, p, m })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family.kind {
            FamilyKind::Dihedral => write!(f, "{}", self.family.name()),
            _ => write!(f, "{}@{}^{}", self.family.name(), self.p, self.m),
        }
    }
}

impl GroupSpec {
    pub fn field(&self) -> Result<Field> {
        make_field(self.p, self.m)
    }

    pub fn instantiate(&self, max_order: u64) -> Result<GroupTable> {
        instantiate_bounded(self.family, &self.field()?, max_order)
    }
}

/// Minimal interface shared by concrete and abstract finite groups; elements are ids in
/// `0..order()`.
pub trait GroupOps {
    fn order(&self) -> usize;
    fn mul(&self, a: u32, b: u32) -> u32;
    fn inv(&self, a: u32) -> u32;
    fn identity(&self) -> u32;
    fn generators(&self) -> Vec<u32>;
}

/// An explicit finite group of matrices.
pub struct GroupTable {
    family: Option<FamilySpec>,
    field: Field,
    n: usize,
    keys: Vec<u64>,
    gens: Vec<u32>,
    identity: u32,
    inverses: OnceLock<Vec<u32>>,
}

impl fmt::Debug for GroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupTable({}, order {})", self.name(), self.order())
    }
}

fn encode(x: &Mat, q: u64) -> u64 {
    x.entries().iter().fold(0u64, |acc, e| acc * q + e.code() as u64)
}

fn decode(mut key: u64, n: usize, q: u64) -> Mat {
    let mut e = vec![Fq::ZERO; n * n];
    for slot in e.iter_mut().rev() {
        *slot = Fq((key % q) as u32);
        key /= q;
    }
    Mat::from_vec(n, e)
}

fn key_space(q: u64, n: usize) -> Option<u128> {
    (q as u128).checked_pow((n * n) as u32).filter(|&s| s <= u64::MAX as u128)
}

/// Instantiates a family with the default order bound.
pub fn instantiate(family: FamilySpec, k: &Field) -> Result<GroupTable> {
    instantiate_bounded(family, k, DEFAULT_MAX_GROUP)
}

pub fn instantiate_bounded(family: FamilySpec, k: &Field, max_order: u64) -> Result<GroupTable> {
    family.check_guard(k)?;
    let q = k.order() as u64;
    let predicted = family.predicted_order(q);
    if predicted > max_order as u128 {
        return Err(Error::BoundExceeded { what: "group order", size: predicted, bound: max_order as u128 });
    }
    let n = family.dim();
    let space = key_space(q, n)
        .ok_or(Error::BoundExceeded { what: "matrix key space", size: u128::MAX, bound: u64::MAX as u128 })?;
    let gen_mats = family.generators(k)?;
    let positions: Vec<usize> = match family.kind {
        FamilyKind::Gl | FamilyKind::Sl => (0..n * n).collect(),
        FamilyKind::Dihedral => vec![],
        _ => (0..n).flat_map(|i| (i..n).map(move |j| i * n + j)).collect(),
    };
    let candidates = (q as u128).checked_pow(positions.len() as u32).unwrap_or(u128::MAX);
    let table = if family.kind != FamilyKind::Dihedral && candidates <= SCAN_LIMIT {
        let keys = scan_positions(&family, k, n, &positions);
        GroupTable::from_sorted_keys(Some(family), k.clone(), n, keys, &gen_mats)
    } else {
        let mut t = closure_generate_bounded(k, n, &gen_mats, max_order)?;
        t.family = Some(family);
        t
    };
    let _ = space;
    if table.order() as u128 != predicted {
        return Err(Error::Internal(format!(
            "{} over F_{} has {} elements, expected {predicted}",
            family.name(),
            k.name(),
            table.order()
        )));
    }
    Ok(table)
}

/// Enumerates every matrix supported on `positions` (identity elsewhere for triangular
/// families) in increasing key order and keeps the members of `family`.
fn scan_positions(family: &FamilySpec, k: &FieldCtx, n: usize, positions: &[usize]) -> Vec<u64> {
    let q = k.order();
    let mut e = vec![Fq::ZERO; n * n];
    let mut keys = Vec::new();
    loop {
        let x = Mat::from_vec(n, e.clone());
        if family.contains(&x, k) {
            keys.push(encode(&x, q as u64));
        }
        let mut pos = positions.len();
        loop {
            if pos == 0 {
                return keys;
            }
            pos -= 1;
            let slot = &mut e[positions[pos]];
            *slot = Fq((slot.code() + 1) % q);
            if slot.code() != 0 {
                break;
            }
        }
    }
}

/// Closure of a set of invertible matrices.
pub fn closure_generate(k: &Field, gens: &[Mat]) -> Result<GroupTable> {
    let n = gens.first().map_or(1, Mat::n);
    closure_generate_bounded(k, n, gens, DEFAULT_MAX_GROUP)
}

pub fn closure_generate_bounded(k: &Field, n: usize, gens: &[Mat], max_order: u64) -> Result<GroupTable> {
    let q = k.order() as u64;
    key_space(q, n).ok_or(Error::BoundExceeded { what: "matrix key space", size: u128::MAX, bound: u64::MAX as u128 })?;
    for g in gens {
        if g.n() != n || g.det(k).is_zero() {
            return Err(Error::InvalidInput(format!("generator {g} is not an invertible {n}x{n} matrix")));
        }
        g.validate(k)?;
    }
    let id = Mat::identity(n);
    let mut seen: HashSet<u64> = HashSet::from([encode(&id, q)]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(g, k);
            if seen.insert(encode(&y, q)) {
                if seen.len() as u64 > max_order {
                    return Err(Error::BoundExceeded {
                        what: "group order",
                        size: seen.len() as u128,
                        bound: max_order as u128,
                    });
                }
                queue.push_back(y);
            }
        }
    }
    let mut keys: Vec<u64> = seen.into_iter().collect();
    keys.sort_unstable();
    Ok(GroupTable::from_sorted_keys(None, k.clone(), n, keys, gens))
}

impl GroupTable {
    fn from_sorted_keys(family: Option<FamilySpec>, field: Field, n: usize, keys: Vec<u64>, gens: &[Mat]) -> Self {
        let q = field.order() as u64;
        let identity = keys.binary_search(&encode(&Mat::identity(n), q)).expect("identity") as u32;
        let mut t = GroupTable { family, field, n, keys, gens: Vec::new(), identity, inverses: OnceLock::new() };
        let mut gen_ids: Vec<u32> = gens.iter().map(|g| t.id_of(g).expect("generator in group")).collect();
        gen_ids.sort_unstable();
        gen_ids.dedup();
        t.gens = gen_ids;
        t
    }

    pub fn family(&self) -> Option<FamilySpec> {
        self.family
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Matrix dimension.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.keys.len()
    }

    pub fn name(&self) -> String {
        match self.family {
            Some(f) if f.kind == FamilyKind::Dihedral => f.name(),
            Some(f) => format!("{}@{}^{}", f.name(), self.field.p(), self.field.m()),
            None => format!("closure@{}^{}", self.field.p(), self.field.m()),
        }
    }

    pub fn element(&self, id: u32) -> Mat {
        decode(self.keys[id as usize], self.n, self.field.order() as u64)
    }

    pub fn id_of(&self, x: &Mat) -> Option<u32> {
        if x.n() != self.n || x.validate(&self.field).is_err() {
            return None;
        }
        self.keys.binary_search(&encode(x, self.field.order() as u64)).ok().map(|i| i as u32)
    }

    pub fn contains(&self, x: &Mat) -> bool {
        self.id_of(x).is_some()
    }

    pub fn ids(&self) -> impl Iterator<Item = u32> {
        0..self.keys.len() as u32
    }

    pub fn gens(&self) -> &[u32] {
        &self.gens
    }

    fn lookup(&self, x: &Mat) -> u32 {
        self.id_of(x).expect("product of group elements lies in the group")
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.lookup(&self.element(a).mul(&self.element(b), &self.field))
    }

    pub fn inv(&self, a: u32) -> u32 {
        if let Some(t) = self.inverses.get() {
            return t[a as usize];
        }
        self.lookup(&self.element(a).inverse(&self.field).expect("group elements are invertible"))
    }

    /// Inverse table, built on first use.
    pub fn inverse_table(&self) -> &[u32] {
        self.inverses.get_or_init(|| {
            self.ids()
                .map(|a| self.lookup(&self.element(a).inverse(&self.field).expect("invertible")))
                .collect()
        })
    }

    /// `x g x^{-1}`.
    pub fn conj(&self, x: u32, g: u32) -> u32 {
        let xm = self.element(x);
        let xi = xm.inverse(&self.field).expect("invertible");
        self.lookup(&xm.mul(&self.element(g), &self.field).mul(&xi, &self.field))
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn is_abelian(&self) -> bool {
        let gens: Vec<Mat> = self.gens.iter().map(|&g| self.element(g)).collect();
        gens.iter().all(|a| gens.iter().all(|b| a.mul(b, &self.field) == b.mul(a, &self.field)))
    }

    pub fn element_order(&self, id: u32) -> u64 {
        self.element(id).order(&self.field).expect("group elements are invertible")
    }

    pub fn whole(&self) -> Subgroup {
        let s = Subgroup::from_sorted(self.ids().collect());
        let _ = s.gens.set(self.gens.clone());
        s
    }

    /// Maps every element of `self` into `big` along a field embedding.
    pub fn embed_into(&self, big: &GroupTable, emb: &Embedding) -> Result<Vec<u32>> {
        self.ids()
            .map(|a| {
                big.id_of(&self.element(a).embed(emb)).ok_or_else(|| {
                    Error::InvalidInput(format!("{} does not embed into {}", self.name(), big.name()))
                })
            })
            .collect()
    }
}

impl GroupOps for GroupTable {
    fn order(&self) -> usize {
        GroupTable::order(self)
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        GroupTable::mul(self, a, b)
    }
    fn inv(&self, a: u32) -> u32 {
        GroupTable::inv(self, a)
    }
    fn identity(&self) -> u32 {
        self.identity
    }
    fn generators(&self) -> Vec<u32> {
        self.gens.clone()
    }
}

/// A subgroup, as a sorted list of ids of its parent.
#[derive(Clone, Debug)]
pub struct Subgroup {
    members: Vec<u32>,
    gens: OnceLock<Vec<u32>>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for Subgroup {}

impl Serialize for Subgroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.members.serialize(s)
    }
}

impl Subgroup {
    fn from_sorted(members: Vec<u32>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Subgroup { members, gens: OnceLock::new() }
    }

    /// Subgroup generated by the given ids.
    pub fn generated(g: &GroupTable, gens: &[u32]) -> Self {
        let members = closure_ids(g, gens);
        let s = Subgroup::from_sorted(members);
        let mut gs = gens.to_vec();
        gs.sort_unstable();
        gs.dedup();
        let _ = s.gens.set(gs);
        s
    }

    /// Validates that `ids` is closed and returns it as a subgroup.
    pub fn from_ids(g: &GroupTable, mut ids: Vec<u32>) -> Result<Self> {
        ids.sort_unstable();
        ids.dedup();
        if ids.is_empty() || g.order() % ids.len() != 0 {
            return Err(Error::InvalidInput("subset size does not divide the group order".into()));
        }
        let s = Subgroup::from_sorted(ids);
        if closure_ids(g, s.gens(g)) != s.members {
            return Err(Error::InvalidInput("subset is not closed under multiplication".into()));
        }
        Ok(s)
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn contains(&self, id: u32) -> bool {
        self.members.binary_search(&id).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    /// Generators, chosen greedily in id order on first use.
    pub fn gens(&self, g: &GroupTable) -> &[u32] {
        self.gens.get_or_init(|| {
            let mut gens = Vec::new();
            let mut span: HashSet<u32> = HashSet::from([g.identity()]);
            for &m in &self.members {
                if !span.contains(&m) {
                    gens.push(m);
                    span = closure_ids(g, &gens).into_iter().collect();
                    if span.len() == self.members.len() {
                        break;
                    }
                }
            }
            gens
        })
    }

    pub fn gen_mats(&self, g: &GroupTable) -> Vec<Mat> {
        self.gens(g).iter().map(|&x| g.element(x)).collect()
    }

    pub fn is_abelian(&self, g: &GroupTable) -> bool {
        let gens = self.gen_mats(g);
        let k = g.field();
        gens.iter().all(|a| gens.iter().all(|b| a.mul(b, k) == b.mul(a, k)))
    }

    /// Order of the center of the subgroup itself.
    pub fn center_order(&self, g: &GroupTable) -> usize {
        let gens = self.gen_mats(g);
        let k = g.field();
        self.members
            .iter()
            .filter(|&&x| {
                let xm = g.element(x);
                gens.iter().all(|s| s.mul(&xm, k) == xm.mul(s, k))
            })
            .count()
    }

    /// Multiset of element orders.
    pub fn element_orders(&self, g: &GroupTable) -> BTreeMap<u64, usize> {
        let mut out = BTreeMap::new();
        for &x in &self.members {
            *out.entry(g.element_order(x)).or_insert(0) += 1;
        }
        out
    }

    /// `x H x^{-1}`.
    pub fn conjugate(&self, g: &GroupTable, x: u32) -> Subgroup {
        let k = g.field();
        let xm = g.element(x);
        let xi = xm.inverse(k).expect("invertible");
        let mut members: Vec<u32> =
            self.members.iter().map(|&h| g.lookup(&xm.mul(&g.element(h), k).mul(&xi, k))).collect();
        members.sort_unstable();
        Subgroup::from_sorted(members)
    }

    /// Intersection of two subgroups of the same parent.
    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        Subgroup::from_sorted(self.members.iter().copied().filter(|&x| other.contains(x)).collect())
    }
}

fn closure_ids(g: &GroupTable, gens: &[u32]) -> Vec<u32> {
    let k = g.field();
    let gen_mats: Vec<Mat> = gens.iter().map(|&s| g.element(s)).collect();
    let mut seen: HashSet<u32> = HashSet::from([g.identity()]);
    let mut queue = VecDeque::from([Mat::identity(g.dim())]);
    while let Some(x) = queue.pop_front() {
        for s in &gen_mats {
            let y = x.mul(s, k);
            if seen.insert(g.lookup(&y)) {
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<u32> = seen.into_iter().collect();
    out.sort_unstable();
    out
}

/// Conjugacy classes, with conjugator witnesses.
pub struct ClassMap {
    class_of: Vec<u32>,
    reps: Vec<u32>,
    members: Vec<Vec<u32>>,
    /// `(previous element, generator index)` along the search tree; the root points to itself.
    parent: Vec<(u32, u16)>,
    gen_mats: Vec<Mat>,
}

/// One conjugacy class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassRecord {
    pub rep: u32,
    pub size: usize,
}

pub fn conjugacy_classes(g: &GroupTable) -> ClassMap {
    ClassMap::new(g)
}

impl ClassMap {
    pub fn new(g: &GroupTable) -> Self {
        let k = g.field();
        let gen_mats: Vec<Mat> = g.gens().iter().map(|&s| g.element(s)).collect();
        let gen_invs: Vec<Mat> = gen_mats.iter().map(|s| s.inverse(k).unwrap()).collect();
        let order = g.order();
        let mut class_of = vec![u32::MAX; order];
        let mut parent = vec![(0u32, 0u16); order];
        let (mut reps, mut members) = (Vec::new(), Vec::new());
        for start in 0..order as u32 {
            if class_of[start as usize] != u32::MAX {
                continue;
            }
            let c = reps.len() as u32;
            reps.push(start);
            class_of[start as usize] = c;
            parent[start as usize] = (start, u16::MAX);
            let mut list = vec![start];
            let mut head = 0;
            while head < list.len() {
                let x = list[head];
                head += 1;
                let xm = g.element(x);
                for (i, (s, si)) in gen_mats.iter().zip(&gen_invs).enumerate() {
                    let y = g.lookup(&s.mul(&xm, k).mul(si, k));
                    if class_of[y as usize] == u32::MAX {
                        class_of[y as usize] = c;
                        parent[y as usize] = (x, i as u16);
                        list.push(y);
                    }
                }
            }
            list.sort_unstable();
            members.push(list);
        }
        ClassMap { class_of, reps, members, parent, gen_mats }
    }

    pub fn count(&self) -> usize {
        self.reps.len()
    }

    pub fn class_of(&self, id: u32) -> usize {
        self.class_of[id as usize] as usize
    }

    /// Representatives (least id of each class), in increasing order.
    pub fn reps(&self) -> &[u32] {
        &self.reps
    }

    pub fn members(&self, class: usize) -> &[u32] {
        &self.members[class]
    }

    pub fn records(&self) -> Vec<ClassRecord> {
        self.reps.iter().zip(&self.members).map(|(&rep, m)| ClassRecord { rep, size: m.len() }).collect()
    }

    /// `x` with `x · rep · x^{-1} = id`, where `rep` is the representative of `id`'s class.
    pub fn witness(&self, g: &GroupTable, id: u32) -> Mat {
        let k = g.field();
        let mut w = Mat::identity(g.dim());
        let mut cur = id;
        loop {
            let (prev, gen) = self.parent[cur as usize];
            if gen == u16::MAX {
                return w;
            }
            w = w.mul(&self.gen_mats[gen as usize], k);
            cur = prev;
        }
    }

    /// `x` with `x h x^{-1} = g`, when `g` and `h` are conjugate.
    pub fn conjugator(&self, grp: &GroupTable, g: u32, h: u32) -> Option<Mat> {
        if self.class_of(g) != self.class_of(h) {
            return None;
        }
        let k = grp.field();
        let wg = self.witness(grp, g);
        let wh = self.witness(grp, h);
        Some(wg.mul(&wh.inverse(k).unwrap(), k))
    }
}

fn scan_commutant(g: &GroupTable, set: &[Mat]) -> Vec<u32> {
    let k = g.field();
    g.ids()
        .filter(|&x| {
            let xm = g.element(x);
            set.iter().all(|s| s.mul(&xm, k) == xm.mul(s, k))
        })
        .collect()
}

fn units_in_algebra(g: &GroupTable, family: &FamilySpec, alg: &TransporterSpace) -> Vec<u32> {
    let k = g.field();
    let mut out = Vec::new();
    alg.for_each(k, |x| {
        if family.contains(x, k) {
            out.push(g.lookup(x));
        }
        true
    });
    out.sort_unstable();
    out
}

/// Elements of `g` commuting with every matrix in `set`.
pub fn commutant_in(g: &GroupTable, set: &[Mat]) -> Subgroup {
    let k = g.field();
    if let Some(family) = g.family() {
        let pairs: Vec<(Mat, Mat)> = set.iter().map(|s| (s.clone(), s.clone())).collect();
        let alg = if pairs.is_empty() { None } else { Some(common_transporter(&pairs, k)) };
        if let Some(alg) = alg {
            let size = alg.size(k);
            if size <= ALGEBRA_LIMIT && size <= g.order() as u128 {
                return Subgroup::from_sorted(units_in_algebra(g, &family, &alg));
            }
        } else {
            return g.whole();
        }
    }
    Subgroup::from_sorted(scan_commutant(g, set))
}

/// `Z(g)`.
pub fn centralizer(g: &GroupTable, id: u32) -> Subgroup {
    if id == g.identity() {
        return g.whole();
    }
    let x = g.element(id);
    if let Some(family) = g.family() {
        let k = g.field();
        let alg = centralizer_algebra(&x, k);
        let size = alg.size(k);
        if size <= ALGEBRA_LIMIT && size <= g.order() as u128 {
            return Subgroup::from_sorted(units_in_algebra(g, &family, &alg));
        }
    }
    Subgroup::from_sorted(scan_commutant(g, &[x]))
}

/// Centralizer of a set of ids.
pub fn centralizer_of_set(g: &GroupTable, ids: &[u32]) -> Subgroup {
    let mats: Vec<Mat> = ids.iter().map(|&x| g.element(x)).collect();
    commutant_in(g, &mats)
}

pub fn center(g: &GroupTable) -> Subgroup {
    centralizer_of_set(g, g.gens())
}

/// `N(H) = {x : x H x^{-1} = H}`.
pub fn normalizer(g: &GroupTable, h: &Subgroup) -> Subgroup {
    let k = g.field();
    let gens = h.gen_mats(g);
    let members = g
        .ids()
        .filter(|&x| {
            let xm = g.element(x);
            let xi = xm.inverse(k).unwrap();
            gens.iter().all(|s| g.id_of(&xm.mul(s, k).mul(&xi, k)).is_some_and(|y| h.contains(y)))
        })
        .collect();
    Subgroup::from_sorted(members)
}

/// Cheap conjugacy invariants of a subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgroupFingerprint {
    pub order: usize,
    pub abelian: bool,
    pub center_order: usize,
    pub element_orders: BTreeMap<u64, usize>,
}

pub fn fingerprint(g: &GroupTable, h: &Subgroup) -> SubgroupFingerprint {
    SubgroupFingerprint {
        order: h.order(),
        abelian: h.is_abelian(g),
        center_order: h.center_order(g),
        element_orders: h.element_orders(g),
    }
}

/// `x` with `x H1 x^{-1} = H2`, or `None`.
pub fn subgroups_conjugate(g: &GroupTable, h1: &Subgroup, h2: &Subgroup) -> Option<u32> {
    if h1 == h2 {
        return Some(g.identity());
    }
    if h1.order() != h2.order()
        || h1.is_abelian(g) != h2.is_abelian(g)
        || h1.center_order(g) != h2.center_order(g)
        || h1.element_orders(g) != h2.element_orders(g)
    {
        return None;
    }
    let k = g.field();
    let gens = h1.gen_mats(g);
    let maps_into = |x: u32| {
        let xm = g.element(x);
        let xi = xm.inverse(k).unwrap();
        gens.iter().all(|s| h2.contains(g.lookup(&xm.mul(s, k).mul(&xi, k))))
    };
    let order = g.order() as u32;
    let head = order.min(LAZY_NORMALIZER_AFTER as u32);
    if let Some(x) = (0..head).find(|&x| maps_into(x)) {
        return Some(x);
    }
    if head == order {
        return None;
    }
    // every element of x·N(H1) acts on H1 like x, so one candidate per coset suffices
    let norm = normalizer(g, h1);
    let mut visited = vec![false; g.order()];
    let mark = |visited: &mut Vec<bool>, x: u32| {
        let xm = g.element(x);
        for &nn in norm.members() {
            visited[g.lookup(&xm.mul(&g.element(nn), k)) as usize] = true;
        }
    };
    for x in 0..head {
        if !visited[x as usize] {
            mark(&mut visited, x);
        }
    }
    for x in head..order {
        if visited[x as usize] {
            continue;
        }
        if maps_into(x) {
            return Some(x);
        }
        mark(&mut visited, x);
    }
    None
}

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyTable {
    size: usize,
    table: Vec<u32>,
    identity: u32,
    inverse: Vec<u32>,
    gens: Vec<u32>,
}

impl CayleyTable {
    /// Builds from a row-major `size x size` table, validating the group axioms that the
    /// callers rely on (identity and inverses).
    pub fn from_table(size: usize, table: Vec<u32>) -> Result<Self> {
        if table.len() != size * size || size == 0 {
            return Err(Error::InvalidInput("table must be size x size".into()));
        }
        let identity = (0..size as u32)
            .find(|&e| (0..size as u32).all(|x| table[e as usize * size + x as usize] == x))
            .ok_or_else(|| Error::InvalidInput("table has no identity".into()))?;
        let inverse: Vec<u32> = (0..size as u32)
            .map(|x| {
                (0..size as u32)
                    .find(|&y| table[x as usize * size + y as usize] == identity)
                    .ok_or_else(|| Error::InvalidInput("element without inverse".into()))
            })
            .collect::<Result<_>>()?;
        let mut t = CayleyTable { size, table, identity, inverse, gens: Vec::new() };
        t.gens = t.greedy_gens();
        Ok(t)
    }

    /// The subgroup `H` of `g` as an abstract group; element `i` is `H.members()[i]`.
    pub fn from_subgroup(g: &GroupTable, h: &Subgroup) -> Self {
        let k = g.field();
        let mats: Vec<Mat> = h.members().iter().map(|&x| g.element(x)).collect();
        let pos = |x: &Mat| h.members().binary_search(&g.lookup(x)).expect("closed subgroup") as u32;
        let table = mats.iter().flat_map(|a| mats.iter().map(|b| pos(&a.mul(b, k))).collect::<Vec<_>>()).collect();
        CayleyTable::from_table(h.order(), table).expect("subgroups are groups")
    }

    /// The cyclic group `Z/n`, element `i` standing for the `i`-th power of a generator.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).flat_map(|a| (0..n).map(move |b| ((a + b) % n) as u32)).collect();
        CayleyTable::from_table(n, table).expect("cyclic group")
    }

    fn greedy_gens(&self) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut span = vec![false; self.size];
        span[self.identity as usize] = true;
        let mut count = 1;
        for x in 0..self.size as u32 {
            if span[x as usize] {
                continue;
            }
            gens.push(x);
            // recompute the closure
            span = vec![false; self.size];
            span[self.identity as usize] = true;
            let mut queue = vec![self.identity];
            while let Some(a) = queue.pop() {
                for &s in &gens {
                    let b = self.mul(a, s);
                    if !span[b as usize] {
                        span[b as usize] = true;
                        queue.push(b);
                    }
                }
            }
            count = span.iter().filter(|&&b| b).count();
            if count == self.size {
                break;
            }
        }
        debug_assert_eq!(count, self.size);
        gens
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.size + b as usize]
    }

    pub fn element_order(&self, a: u32) -> u64 {
        let mut x = a;
        let mut n = 1;
        while x != self.identity {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    pub fn is_abelian(&self) -> bool {
        self.gens.iter().all(|&a| self.gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Number of conjugacy classes.
    pub fn class_count(&self) -> usize {
        let mut seen = vec![false; self.size];
        let mut count = 0;
        for start in 0..self.size as u32 {
            if seen[start as usize] {
                continue;
            }
            count += 1;
            seen[start as usize] = true;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &s in &self.gens {
                    let y = self.mul(self.mul(s, x), self.inverse[s as usize]);
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        stack.push(y);
                    }
                }
            }
        }
        count
    }
}

impl GroupOps for CayleyTable {
    fn order(&self) -> usize {
        self.size
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        CayleyTable::mul(self, a, b)
    }
    fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }
    fn identity(&self) -> u32 {
        self.identity
    }
    fn generators(&self) -> Vec<u32> {
        self.gens.clone()
    }
}

/// A subgroup viewed as a group in its own right; element `i` is `members()[i]`.
pub struct SubgroupView<'a> {
    parent: &'a GroupTable,
    sub: &'a Subgroup,
}

impl<'a> SubgroupView<'a> {
    pub fn new(parent: &'a GroupTable, sub: &'a Subgroup) -> Self {
        SubgroupView { parent, sub }
    }

    pub fn parent(&self) -> &GroupTable {
        self.parent
    }

    pub fn subgroup(&self) -> &Subgroup {
        self.sub
    }

    /// Parent id of local element `i`.
    pub fn parent_id(&self, i: u32) -> u32 {
        self.sub.members[i as usize]
    }

    /// Local index of a parent id.
    pub fn local(&self, id: u32) -> Option<u32> {
        self.sub.members.binary_search(&id).ok().map(|i| i as u32)
    }
}

impl GroupOps for SubgroupView<'_> {
    fn order(&self) -> usize {
        self.sub.order()
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        let c = self.parent.mul(self.parent_id(a), self.parent_id(b));
        self.local(c).expect("closed subgroup")
    }
    fn inv(&self, a: u32) -> u32 {
        self.local(self.parent.inv(self.parent_id(a))).expect("closed subgroup")
    }
    fn identity(&self) -> u32 {
        self.local(self.parent.identity()).expect("subgroups contain the identity")
    }
    fn generators(&self) -> Vec<u32> {
        self.sub.gens(self.parent).iter().map(|&g| self.local(g).unwrap()).collect()
    }
}

/// `N / D` with `D` normal in `N`.
#[derive(Clone, Debug)]
pub struct QuotientGroup {
    /// Least id of each coset; coset `i` is the element `i` of `table`.
    pub coset_reps: Vec<u32>,
    coset_of: HashMap<u32, u32>,
    pub table: CayleyTable,
}

impl QuotientGroup {
    pub fn order(&self) -> usize {
        self.coset_reps.len()
    }

    /// Coset index of an element of the numerator.
    pub fn coset_of(&self, id: u32) -> Option<u32> {
        self.coset_of.get(&id).copied()
    }
}

pub fn quotient(g: &GroupTable, num: &Subgroup, den: &Subgroup) -> Result<QuotientGroup> {
    if !den.is_subset_of(num) {
        return Err(Error::InvalidInput("denominator is not contained in the numerator".into()));
    }
    let k = g.field();
    let den_gens = den.gen_mats(g);
    for &x in num.gens(g) {
        let xm = g.element(x);
        let xi = xm.inverse(k).unwrap();
        if !den_gens.iter().all(|d| den.contains(g.lookup(&xm.mul(d, k).mul(&xi, k)))) {
            return Err(Error::NotNormal);
        }
    }
    let mut coset_of: HashMap<u32, u32> = HashMap::with_capacity(num.order());
    let mut coset_reps = Vec::new();
    let den_mats: Vec<Mat> = den.members().iter().map(|&d| g.element(d)).collect();
    for &x in num.members() {
        if coset_of.contains_key(&x) {
            continue;
        }
        let c = coset_reps.len() as u32;
        coset_reps.push(x);
        let xm = g.element(x);
        for d in &den_mats {
            coset_of.insert(g.lookup(&xm.mul(d, k)), c);
        }
    }
    let size = coset_reps.len();
    let table = coset_reps
        .iter()
        .flat_map(|&a| coset_reps.iter().map(|&b| coset_of[&g.mul(a, b)]).collect::<Vec<_>>())
        .collect();
    let table = CayleyTable::from_table(size, table)?;
    Ok(QuotientGroup { coset_reps, coset_of, table })
}

pub fn element_order(g: &GroupTable, id: u32) -> u64 {
    g.element_order(id)
}

/// Applies a field map entrywise to every element; used for Frobenius actions on groups
/// defined over a subfield.
pub fn entrywise_map(g: &GroupTable, f: impl Fn(Fq) -> Fq) -> Result<Vec<u32>> {
    g.ids()
        .map(|a| {
            g.id_of(&g.element(a).map(&f))
                .ok_or_else(|| Error::NotAutomorphism("entrywise map leaves the group".into()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfq::{heisenberg_element, regular_unipotent};

    fn group(s: &str) -> GroupTable {
        s.parse::<GroupSpec>().unwrap().instantiate(DEFAULT_MAX_GROUP).unwrap()
    }

    #[test]
    fn group_spec_parsing() {
        let s: GroupSpec = "gl:2@3^1".parse().unwrap();
        assert_eq!(s.family, FamilySpec::gl(2));
        assert_eq!((s.p, s.m), (3, 1));
        assert_eq!(s.to_string(), "gl:2@3^1");
        let d: GroupSpec = "dihedral:7".parse().unwrap();
        assert_eq!((d.p, d.m), (2, 3));
        assert_eq!("dihedral:5".parse::<GroupSpec>().unwrap().p, 11);
        assert_eq!("u3@5^1".parse::<GroupSpec>().unwrap().family, FamilySpec::heisenberg());
        for bad in ["gl2@3^1", "gl:x@3^1", "foo:2@3^1", "gl:2@3", "dihedral:2", "gl:0@2^1"] {
            assert!(bad.parse::<GroupSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn instantiate_orders() {
        assert_eq!(group("gl:2@2^1").order(), 6);
        assert_eq!(group("borel-gl:2@2^1").order(), 2);
        assert_eq!(group("u3@5^1").order(), 125);
        assert_eq!(group("sl:2@3^1").order(), 24);
        assert_eq!(group("gl:2@3^1").order(), 48);
        assert_eq!(group("sl:3@2^2").order(), 60480);
        assert_eq!(group("borel-sl:2@3^1").order(), 6);
        assert_eq!(group("dihedral:5").order(), 10);
        assert_eq!(group("unipotent:4@2^1").order(), 64);
    }

    #[test]
    fn bounds_and_guard() {
        let f2 = make_field(2, 1).unwrap();
        assert!(matches!(instantiate(FamilySpec::gl(9), &f2), Err(Error::BoundExceeded { .. })));
        assert!(matches!(instantiate(FamilySpec::sl(2), &f2), Err(Error::CharacteristicGuard { .. })));
        assert_eq!(instantiate(FamilySpec::sl(2).with_override(), &f2).unwrap().order(), 6);
    }

    #[test]
    fn closure_matches_scan() {
        let f3 = make_field(3, 1).unwrap();
        let gens = FamilySpec::sl(2).generators(&f3).unwrap();
        let c = closure_generate(&f3, &gens).unwrap();
        assert_eq!(c.order(), 24);
        let s = instantiate(FamilySpec::sl(2), &f3).unwrap();
        assert!(c.ids().all(|i| c.element(i) == s.element(i)));
        let triv = closure_generate(&f3, &[Mat::identity(2)]).unwrap();
        assert_eq!(triv.order(), 1);
    }

    #[test]
    fn classes_of_small_groups() {
        let g = group("gl:2@2^1");
        let cm = conjugacy_classes(&g);
        let mut sizes: Vec<usize> = cm.records().iter().map(|r| r.size).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 3]);
        assert_eq!(conjugacy_classes(&group("sl:2@3^1")).count(), 7);
        assert_eq!(conjugacy_classes(&group("gl:2@3^1")).count(), 8);
        let b = group("borel-gl:2@2^1");
        assert_eq!(conjugacy_classes(&b).count(), 2);
    }

    #[test]
    fn class_witnesses() {
        let g = group("sl:2@5^1");
        let cm = conjugacy_classes(&g);
        let k = g.field();
        for id in g.ids().step_by(7) {
            let rep = cm.reps()[cm.class_of(id)];
            let w = cm.witness(&g, id);
            assert_eq!(g.element(rep).conjugate_by(&w, k).unwrap(), g.element(id));
        }
    }

    #[test]
    fn centralizer_examples() {
        let g = group("sl:2@3^1");
        assert_eq!(centralizer(&g, g.identity()).order(), 24);
        let k = g.field();
        let u = g.id_of(&regular_unipotent(2, Fq(1), k).unwrap()).unwrap();
        let z = centralizer(&g, u);
        assert_eq!(z.order(), 6);
        for &x in z.members() {
            let m = g.element(x);
            assert_eq!(m.get(1, 0), Fq::ZERO);
            assert_eq!(m.get(0, 0), m.get(1, 1));
        }
        let h = group("u3@5^1");
        let t = h.id_of(&heisenberg_element(Fq(1), h.field()).unwrap()).unwrap();
        assert_eq!(centralizer(&h, t).order(), 25);
    }

    #[test]
    fn centers() {
        assert_eq!(center(&group("gl:2@3^1")).order(), 2);
        assert_eq!(center(&group("u3@5^1")).order(), 5);
        assert_eq!(center(&group("dihedral:5")).order(), 1);
        assert_eq!(center(&group("sl:3@2^2")).order(), 3);
    }

    #[test]
    fn normalizer_of_split_torus() {
        let g = group("gl:2@3^1");
        let k = g.field();
        let d = g.id_of(&Mat::diag(&[Fq(1), Fq(2)])).unwrap();
        let t = centralizer(&g, d);
        assert_eq!(t.order(), 4);
        let n = normalizer(&g, &t);
        assert_eq!(n.order(), 8);
        let w = quotient(&g, &n, &t).unwrap();
        assert_eq!(w.order(), 2);
        assert!(t.is_subset_of(&n));
        let _ = k;
        assert_eq!(normalizer(&g, &g.whole()).order(), 48);
    }

    #[test]
    fn quotient_errors_and_trivial() {
        let g = group("gl:2@2^1");
        let whole = g.whole();
        assert_eq!(quotient(&g, &whole, &whole).unwrap().order(), 1);
        let s = Subgroup::generated(&g, &[g.id_of(&"[0,1;1,0]".parse().unwrap()).unwrap()]);
        assert_eq!(quotient(&g, &whole, &s).unwrap_err(), Error::NotNormal);
    }

    #[test]
    fn subgroup_conjugacy() {
        let g = group("gl:2@3^1");
        let d = g.id_of(&Mat::diag(&[Fq(1), Fq(2)])).unwrap();
        let t = centralizer(&g, d);
        assert_eq!(subgroups_conjugate(&g, &t, &t), Some(g.identity()));
        let x = g.id_of(&"[1,1;0,1]".parse().unwrap()).unwrap();
        let t2 = t.conjugate(&g, x);
        let w = subgroups_conjugate(&g, &t, &t2).unwrap();
        assert_eq!(t.conjugate(&g, w), t2);
        let aniso = g.id_of(&"[0,1;1,1]".parse().unwrap()).unwrap();
        let ta = centralizer(&g, aniso);
        assert_eq!(ta.order(), 8);
        assert_eq!(subgroups_conjugate(&g, &t, &ta), None);
    }

    #[test]
    fn cayley_tables() {
        let c = CayleyTable::cyclic(6);
        assert_eq!(c.class_count(), 6);
        assert_eq!(c.element_order(1), 6);
        let g = group("gl:2@2^1");
        let t = CayleyTable::from_subgroup(&g, &g.whole());
        assert_eq!(t.class_count(), 3);
        assert!(!t.is_abelian());
    }

    #[test]
    fn element_orders() {
        let f4 = make_field(2, 2).unwrap();
        let g = instantiate(FamilySpec::sl(3), &f4).unwrap();
        assert_eq!(element_order(&g, g.identity()), 1);
        let u = g.id_of(&regular_unipotent(3, Fq(2), &f4).unwrap()).unwrap();
        assert_eq!(element_order(&g, u), 4);
    }

    #[test]
    fn family_functoriality() {
        let f2 = make_field(2, 1).unwrap();
        let f4 = make_field(2, 2).unwrap();
        let e = Embedding::new(&f2, &f4).unwrap();
        for fam in [FamilySpec::gl(2), FamilySpec::borel_gl(2), FamilySpec::heisenberg()] {
            let small = instantiate(fam, &f2).unwrap();
            let big = instantiate(fam, &f4).unwrap();
            let img = small.embed_into(&big, &e).unwrap();
            for a in small.ids() {
                for b in small.ids() {
                    assert_eq!(img[small.mul(a, b) as usize], big.mul(img[a as usize], img[b as usize]));
                }
            }
        }
    }
}
