//! Brute-force oracles shared by the integration targets. They use only element tables and
//! raw arithmetic, never the class, centralizer or z-class engines under test.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use zclass_core::grpcore::{prime_power, GroupTable, Subgroup};
use zclass_core::{make_field, Field, FieldCtx, Fq, Mat};

pub fn field(q: u64) -> Field {
    let (p, m) = prime_power(q).expect("prime power");
    make_field(p, m).unwrap()
}

pub fn el(k: &FieldCtx, code: u32) -> Fq {
    k.elem(code).unwrap()
}

pub fn mat(k: &FieldCtx, literal: &str) -> Mat {
    let m: Mat = literal.parse().unwrap();
    m.validate(k).unwrap();
    m
}

pub fn set_of(s: &Subgroup) -> BTreeSet<u32> {
    s.members().iter().copied().collect()
}

pub fn id(g: &GroupTable, x: &Mat) -> u32 {
    g.id_of(x).unwrap_or_else(|| panic!("{x} is not in {}", g.name()))
}

pub fn conj(g: &GroupTable, x: u32, a: u32) -> u32 {
    g.mul(g.mul(x, a), g.inv(x))
}

pub fn conj_set(g: &GroupTable, x: u32, s: &BTreeSet<u32>) -> BTreeSet<u32> {
    s.iter().map(|&a| conj(g, x, a)).collect()
}

pub fn bf_centralizer(g: &GroupTable, a: u32) -> BTreeSet<u32> {
    g.ids().filter(|&y| g.mul(a, y) == g.mul(y, a)).collect()
}

pub fn bf_center(g: &GroupTable) -> BTreeSet<u32> {
    g.ids().filter(|&a| g.ids().all(|y| g.mul(a, y) == g.mul(y, a))).collect()
}

pub fn bf_class(g: &GroupTable, a: u32) -> BTreeSet<u32> {
    g.ids().map(|x| conj(g, x, a)).collect()
}

/// Conjugacy classes, ordered by least member.
pub fn bf_classes(g: &GroupTable) -> Vec<BTreeSet<u32>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for a in g.ids() {
        if seen.contains(&a) {
            continue;
        }
        let c = bf_class(g, a);
        seen.extend(c.iter().copied());
        out.push(c);
    }
    out
}

pub fn bf_normalizer(g: &GroupTable, h: &BTreeSet<u32>) -> BTreeSet<u32> {
    g.ids().filter(|&x| conj_set(g, x, h) == *h).collect()
}

/// Some `x` with `x a x^{-1} = b` as sets.
pub fn bf_sets_conjugate(g: &GroupTable, a: &BTreeSet<u32>, b: &BTreeSet<u32>) -> Option<u32> {
    if a.len() != b.len() {
        return None;
    }
    g.ids().find(|&x| conj_set(g, x, a) == *b)
}

/// Classes meeting `keep`, grouped by conjugacy of centralizers; returns the groups of class indices.
pub fn bf_zclasses(g: &GroupTable, keep: impl Fn(u32) -> bool) -> Vec<Vec<usize>> {
    let classes: Vec<BTreeSet<u32>> = bf_classes(g).into_iter().filter(|c| keep(*c.first().unwrap())).collect();
    let cents: Vec<BTreeSet<u32>> = classes.iter().map(|c| bf_centralizer(g, *c.first().unwrap())).collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..classes.len() {
        match blocks.iter_mut().find(|b| bf_sets_conjugate(g, &cents[b[0]], &cents[i]).is_some()) {
            Some(b) => b.push(i),
            None => blocks.push(vec![i]),
        }
    }
    blocks
}

pub fn bf_z_equivalent(g: &GroupTable, a: u32, b: u32) -> bool {
    bf_sets_conjugate(g, &bf_centralizer(g, a), &bf_centralizer(g, b)).is_some()
}

/// Determinant by permutation expansion.
pub fn leibniz_det(k: &FieldCtx, a: &Mat) -> Fq {
    let n = a.n();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Fq::default();
    permute(&mut perm, 0, &mut |p| {
        let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let mut term = k.one();
        for (i, &j) in p.iter().enumerate() {
            term = k.mul(term, a.get(i, j));
        }
        total = if inversions % 2 == 0 { k.add(total, term) } else { k.sub(total, term) };
    });
    total
}

fn permute(p: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize])) {
    if i == p.len() {
        f(p);
        return;
    }
    for j in i..p.len() {
        p.swap(i, j);
        permute(p, i + 1, f);
        p.swap(i, j);
    }
}

/// Every `n x n` matrix over `k`.
pub fn all_matrices(k: &FieldCtx, n: usize) -> impl Iterator<Item = Mat> + '_ {
    let q = k.order() as u64;
    let count = q.pow((n * n) as u32);
    (0..count).map(move |mut code| {
        let entries = (0..n * n)
            .map(|_| {
                let c = (code % q) as u32;
                code /= q;
                k.elem(c).unwrap()
            })
            .collect();
        Mat::from_entries(entries).unwrap()
    })
}

/// Integer partitions of `n`.
pub fn partitions(n: usize) -> usize {
    let mut ways = vec![0usize; n + 1];
    ways[0] = 1;
    for part in 1..=n {
        for total in part..=n {
            ways[total] += ways[total - part];
        }
    }
    ways[n]
}

/// Monic polynomial over `F_p` (constant first) divisible by no monic polynomial of lower positive degree.
pub fn irreducible_by_trial(f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    (1..=m / 2).all(|d| (0..p.pow(d as u32)).all(|code| !divides(&monic_from_code(code, d, p), f, p)))
}

pub fn monic_from_code(mut code: u32, d: usize, p: u32) -> Vec<u32> {
    let mut g: Vec<u32> = (0..d)
        .map(|_| {
            let c = code % p;
            code /= p;
            c
        })
        .collect();
    g.push(1);
    g
}

fn divides(g: &[u32], f: &[u32], p: u32) -> bool {
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let p = p as u64;
    let d = g.len() - 1;
    while r.len() > d {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - d;
        for (i, &c) in g.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p * p - lead * c as u64 % p) % p;
        }
        r.pop();
    }
    r.iter().all(|&c| c == 0)
}

/// Multiplicative order by repeated multiplication.
pub fn bf_order(k: &FieldCtx, x: Fq) -> u64 {
    let (mut y, mut n) = (x, 1);
    while y != k.one() {
        y = k.mul(y, x);
        n += 1;
    }
    n
}

/// Size of `k^* / (k^*)^n` by counting cosets of the image of `x -> x^n`.
pub fn bf_power_classes(k: &FieldCtx, n: u64) -> usize {
    let image: BTreeSet<Fq> = k.units().map(|x| (0..n).fold(k.one(), |acc, _| k.mul(acc, x))).collect();
    (k.order() as usize - 1) / image.len()
}

/// Twisted classes of a table group under the map `frob`, by full orbit enumeration.
pub fn bf_twisted_class_count(g: &GroupTable, frob: &[u32]) -> usize {
    let mut seen = BTreeSet::new();
    let mut count = 0;
    for a in g.ids() {
        if seen.insert(a) {
            count += 1;
            for b in g.ids() {
                seen.insert(g.mul(g.mul(g.inv(b), a), frob[b as usize]));
            }
        }
    }
    count
}

pub fn histogram<T: Ord>(items: impl IntoIterator<Item = T>) -> BTreeMap<T, usize> {
    let mut h = BTreeMap::new();
    for x in items {
        *h.entry(x).or_insert(0) += 1;
    }
    h
}

/// Every group the property suites run over; all have at most `10^5` elements.
pub fn property_groups() -> Vec<GroupTable> {
    use zclass_core::grpcore::{instantiate, FamilySpec, GroupSpec};
    let mut out: Vec<GroupTable> = [
        (FamilySpec::gl(2), 2u64),
        (FamilySpec::gl(2), 3),
        (FamilySpec::gl(2), 4),
        (FamilySpec::gl(2), 5),
        (FamilySpec::gl(3), 2),
        (FamilySpec::sl(2), 3),
        (FamilySpec::sl(2), 5),
        (FamilySpec::sl(2), 7),
        (FamilySpec::sl(3).with_override(), 3),
        (FamilySpec::borel_gl(2), 2),
        (FamilySpec::borel_gl(2), 4),
        (FamilySpec::borel_sl(2), 3),
        (FamilySpec::borel_sl(2), 9),
        (FamilySpec::unipotent(3), 2),
        (FamilySpec::unipotent(4), 2),
        (FamilySpec::heisenberg(), 5),
        (FamilySpec::heisenberg(), 7),
        (FamilySpec::borel_gl(1), 7),
    ]
    .into_iter()
    .map(|(f, q)| instantiate(f, &field(q)).unwrap())
    .collect();
    for m in [3, 4, 5, 7] {
        out.push(format!("dihedral:{m}").parse::<GroupSpec>().unwrap().instantiate(1 << 20).unwrap());
    }
    out
}
