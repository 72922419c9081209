//! First cohomology of a cyclic Frobenius action, computed as twisted conjugacy
//! `a ~ b^{-1} a F(b)`.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{gcd, make_field_bounded, Embedding, Fq, DEFAULT_MAX_FIELD};
use crate::grpcore::{
    centralizer, entrywise_map, normalizer, prime_power, quotient, CayleyTable, GroupOps, GroupTable, Subgroup,
    SubgroupView,
};
use crate::matfq::Mat;

/// A finite group with an automorphism `F` of order dividing `r`.
pub struct TwistedGroup<'a, A: GroupOps> {
    group: &'a A,
    frob: Vec<u32>,
    r: u32,
}

impl<'a, A: GroupOps> TwistedGroup<'a, A> {
    /// `frob[i]` is the image of element `i`.
    pub fn new(group: &'a A, frob: Vec<u32>, r: u32) -> Result<Self> {
        let n = group.order();
        if frob.len() != n {
            return Err(Error::NotAutomorphism(format!("map has {} images for {} elements", frob.len(), n)));
        }
        if r == 0 {
            return Err(Error::InvalidInput("automorphism order must be at least 1".into()));
        }
        let mut hit = vec![false; n];
        for &y in &frob {
            if y as usize >= n || std::mem::replace(&mut hit[y as usize], true) {
                return Err(Error::NotAutomorphism("map is not a bijection".into()));
            }
        }
        for s in group.generators() {
            for b in 0..n as u32 {
                if frob[group.mul(s, b) as usize] != group.mul(frob[s as usize], frob[b as usize]) {
                    return Err(Error::NotAutomorphism(format!("map is not multiplicative at ({s}, {b})")));
                }
            }
        }
        for a in 0..n as u32 {
            let mut x = a;
            for _ in 0..r {
                x = frob[x as usize];
            }
            if x != a {
                return Err(Error::NotAutomorphism(format!("F^{r} moves element {a}")));
            }
        }
        Ok(TwistedGroup { group, frob, r })
    }

    /// The trivial action.
    pub fn untwisted(group: &'a A) -> Self {
        TwistedGroup { group, frob: (0..group.order() as u32).collect(), r: 1 }
    }

    pub fn group(&self) -> &A {
        self.group
    }

    pub fn frob(&self, a: u32) -> u32 {
        self.frob[a as usize]
    }

    pub fn degree(&self) -> u32 {
        self.r
    }

    /// `b^{-1} a F(b)`.
    pub fn act(&self, a: u32, b: u32) -> u32 {
        let g = self.group;
        g.mul(g.mul(g.inv(b), a), self.frob(b))
    }

    /// `c F(c) ... F^{r-1}(c)`.
    pub fn twisted_norm(&self, c: u32) -> u32 {
        let g = self.group;
        let (mut acc, mut x) = (g.identity(), c);
        for _ in 0..self.r {
            acc = g.mul(acc, x);
            x = self.frob(x);
        }
        acc
    }

    /// The set `{b^{-1} F(b)}` of twisted-trivial elements.
    pub fn coboundaries(&self) -> Vec<bool> {
        let mut hit = vec![false; self.group.order()];
        for b in 0..self.group.order() as u32 {
            hit[self.act(self.group.identity(), b) as usize] = true;
        }
        hit
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistedClassSet {
    /// Least element of each class.
    pub reps: Vec<u32>,
    pub class_of: Vec<u32>,
    pub size: usize,
    pub realizing_degree: u32,
}

impl TwistedClassSet {
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.size];
        for &c in &self.class_of {
            sizes[c as usize] += 1;
        }
        sizes
    }
}

pub fn twisted_classes<A: GroupOps>(t: &TwistedGroup<'_, A>) -> TwistedClassSet {
    let n = t.group.order();
    let gens = t.group.generators();
    let mut class_of = vec![u32::MAX; n];
    let mut reps = Vec::new();
    for a in 0..n as u32 {
        if class_of[a as usize] != u32::MAX {
            continue;
        }
        let c = reps.len() as u32;
        reps.push(a);
        class_of[a as usize] = c;
        let mut queue = VecDeque::from([a]);
        while let Some(x) = queue.pop_front() {
            for &s in &gens {
                let y = t.act(x, s);
                if class_of[y as usize] == u32::MAX {
                    class_of[y as usize] = c;
                    queue.push_back(y);
                }
            }
        }
    }
    TwistedClassSet { size: reps.len(), reps, class_of, realizing_degree: t.r }
}

/// The value of a 1-cocycle on the Frobenius generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cocycle {
    pub value: u32,
}

pub fn cocycle_check<A: GroupOps>(t: &TwistedGroup<'_, A>, c: Cocycle) -> bool {
    t.twisted_norm(c.value) == t.group.identity()
}

/// Twisted classes of `T` whose image under `inclusion` is twisted-trivial in `ambient`.
pub fn kernel_under_map<A: GroupOps, B: GroupOps>(
    t: &TwistedGroup<'_, A>,
    ambient: &TwistedGroup<'_, B>,
    inclusion: &[u32],
) -> Result<Vec<u32>> {
    let n = t.group.order();
    if inclusion.len() != n {
        return Err(Error::InvalidInput("inclusion must map every element".into()));
    }
    if inclusion[t.group.identity() as usize] != ambient.group.identity() {
        return Err(Error::InvalidInput("inclusion does not preserve the identity".into()));
    }
    for a in 0..n as u32 {
        if inclusion[t.frob(a) as usize] != ambient.frob(inclusion[a as usize]) {
            return Err(Error::NotAutomorphism(format!("inclusion is not Frobenius-equivariant at {a}")));
        }
    }
    for s in t.group.generators() {
        for b in 0..n as u32 {
            let lhs = inclusion[t.group.mul(s, b) as usize];
            if lhs != ambient.group.mul(inclusion[s as usize], inclusion[b as usize]) {
                return Err(Error::InvalidInput("inclusion is not a homomorphism".into()));
            }
        }
    }
    let trivial = ambient.coboundaries();
    let classes = twisted_classes(t);
    Ok(classes.reps.into_iter().filter(|&c| trivial[inclusion[c as usize] as usize]).collect())
}

/// `H^1` of `μ_n` under `x ↦ x^q`, computed three ways.
#[derive(Clone, Debug, Serialize)]
pub struct MuReport {
    pub coefficients: String,
    pub q: u64,
    pub n: u64,
    /// Order of `μ_n` over the algebraic closure (the prime-to-`p` part of `n`).
    pub effective_order: u64,
    pub frobenius_power: u64,
    pub realizing_degree: u32,
    pub class_count: usize,
    pub inflation_count: usize,
    /// Count obtained inside the multiplicative group of `F_{q^r}`, when that field fits.
    pub field_count: Option<usize>,
    pub gcd: u64,
    pub power_class_count: usize,
    pub reps: Vec<u32>,
}

impl MuReport {
    pub fn agrees(&self) -> bool {
        let c = self.class_count;
        c == self.inflation_count
            && c as u64 == self.gcd
            && c == self.power_class_count
            && self.field_count.is_none_or(|f| f == c)
    }
}

fn multiplicative_order(q: u64, n: u64) -> u32 {
    if n == 1 {
        return 1;
    }
    let (mut x, mut r) = (q % n, 1);
    while x != 1 {
        x = x * q % n;
        r += 1;
    }
    r
}

fn cyclic_frobenius(n: u64, q: u64) -> Vec<u32> {
    (0..n).map(|a| (a * q % n) as u32).collect()
}

pub fn h1_mu_n(q: u64, n: u64) -> Result<MuReport> {
    let (p, m) = prime_power(q).ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))?;
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let mut eff = n;
    while eff % p == 0 {
        eff /= p;
    }
    let r = multiplicative_order(q % eff.max(1), eff);
    let model = CayleyTable::cyclic(eff as usize);
    let frob = cyclic_frobenius(eff, q);
    let classes = twisted_classes(&TwistedGroup::new(&model, frob.clone(), r)?);
    let inflation = twisted_classes(&TwistedGroup::new(&model, frob, 2 * r)?);

    let base = make_field_bounded(p, m, DEFAULT_MAX_FIELD)?;
    let field_count = match (m as u64).checked_mul(r as u64).and_then(|d| u32::try_from(d).ok()) {
        Some(deg) if (q as f64).powi(r as i32) <= DEFAULT_MAX_FIELD as f64 => {
            let big = make_field_bounded(p, deg, DEFAULT_MAX_FIELD)?;
            Embedding::new(&base, &big)?;
            let roots: Vec<Fq> = big.units().filter(|&x| big.pow(x, eff) == Fq::ONE).collect();
            let index = |x: Fq| roots.binary_search(&x).expect("roots of unity are closed") as u32;
            let table = roots.iter().flat_map(|&a| roots.iter().map(move |&b| (a, b))).map(|(a, b)| index(big.mul(a, b))).collect();
            let group = CayleyTable::from_table(roots.len(), table)?;
            let f = roots.iter().map(|&x| index(big.frobenius_unchecked(m, x))).collect();
            Some(twisted_classes(&TwistedGroup::new(&group, f, r)?).size)
        }
        _ => None,
    };
    Ok(MuReport {
        coefficients: format!("mu_{n}"),
        q,
        n,
        effective_order: eff,
        frobenius_power: q,
        realizing_degree: r,
        class_count: classes.size,
        inflation_count: inflation.size,
        field_count,
        gcd: gcd(n, q - 1),
        power_class_count: base.power_class_count(n)?.size,
        reps: classes.reps,
    })
}

/// The Frobenius `x ↦ x^{p^base_degree}` acting entrywise on `big`.
pub fn frobenius_action(big: &GroupTable, base_degree: u32) -> Result<Vec<u32>> {
    let k = big.field().clone();
    if base_degree == 0 || k.m() % base_degree != 0 {
        return Err(Error::DegreeMismatch { r: base_degree, m: k.m() });
    }
    entrywise_map(big, |x| k.frobenius_unchecked(base_degree, x))
}

/// Twisted group of `big` under the Frobenius over its degree-`base_degree` subfield.
pub fn frobenius_twist(big: &GroupTable, base_degree: u32) -> Result<TwistedGroup<'_, GroupTable>> {
    let r = big.field().m() / base_degree.max(1);
    TwistedGroup::new(big, frobenius_action(big, base_degree)?, r)
}

/// The cocycle `a^{-1} F(a)` attached to a form `a Z a^{-1}` of a subgroup `Z`.
#[derive(Clone, Debug, Serialize)]
pub struct FormCocycle {
    pub value: Mat,
    pub normalizes: bool,
    pub cocycle_ok: bool,
    /// Whether the value lies in `Z` itself.
    pub in_subgroup: bool,
    /// For a value in `Z`: whether it is twisted-trivial within `Z`.
    pub trivial_in_subgroup: Option<bool>,
    /// Twisted class of the value's image in `N(Z) / Z`.
    pub weyl_class: u32,
    pub weyl_class_count: usize,
    pub trivial: bool,
}

/// `Z` must be stable under the entrywise Frobenius over the degree-`base_degree` subfield,
/// and so must `a Z a^{-1}`.
pub fn cocycle_of_form(big: &GroupTable, base_degree: u32, z: &Subgroup, a: &Mat) -> Result<FormCocycle> {
    let k = big.field().clone();
    let frob = frobenius_action(big, base_degree)?;
    let stable = |s: &Subgroup| s.members().iter().all(|&x| s.contains(frob[x as usize]));
    if !stable(z) {
        return Err(Error::Precondition("the subgroup is not defined over the base field".into()));
    }
    let ai = big.id_of(a).ok_or_else(|| Error::InvalidInput(format!("{a} is not in {}", big.name())))?;
    let h = z.conjugate(big, ai);
    if !stable(&h) {
        return Err(Error::Precondition("the conjugated subgroup is not Frobenius-stable".into()));
    }
    let c = big.mul(big.inv(ai), frob[ai as usize]);
    let n = normalizer(big, z);
    let normalizes = n.contains(c);
    let twisted = TwistedGroup::new(big, frob.clone(), k.m() / base_degree)?;
    let cocycle_ok = cocycle_check(&twisted, Cocycle { value: c });
    let quot = quotient(big, &n, z)?;
    let qf: Vec<u32> = quot
        .coset_reps
        .iter()
        .map(|&x| quot.coset_of(frob[x as usize]).ok_or(Error::Internal("normalizer not Frobenius-stable".into())))
        .collect::<Result<_>>()?;
    let qt = TwistedGroup::new(&quot.table, qf, twisted.degree())?;
    let classes = twisted_classes(&qt);
    let trivial_in_subgroup = z.contains(c).then(|| {
        let view = SubgroupView::new(big, z);
        let local: Vec<u32> = z.members().iter().map(|&x| view.local(frob[x as usize]).unwrap()).collect();
        let tz = TwistedGroup { group: &view, frob: local, r: twisted.degree() };
        tz.coboundaries()[view.local(c).unwrap() as usize]
    });
    let weyl_class = classes.class_of[quot.coset_of(c).expect("c normalizes Z") as usize];
    Ok(FormCocycle {
        value: big.element(c),
        normalizes,
        cocycle_ok,
        in_subgroup: z.contains(c),
        trivial_in_subgroup,
        weyl_class,
        weyl_class_count: classes.size,
        trivial: weyl_class == classes.class_of[quot.table.identity() as usize],
    })
}

/// Number of `G(F_q)`-classes of `F_q`-forms of `Z_G(g)` realized over `big`: twisted classes
/// of `N(Z(g))` that become trivial in `big`.
pub fn subgroup_form_count(big: &GroupTable, base_degree: u32, g: &Mat) -> Result<usize> {
    let gi = big.id_of(g).ok_or_else(|| Error::InvalidInput(format!("{g} is not in {}", big.name())))?;
    let z = centralizer(big, gi);
    let n = normalizer(big, &z);
    let ambient = frobenius_twist(big, base_degree)?;
    let view = SubgroupView::new(big, &n);
    let local_frob: Vec<u32> = n
        .members()
        .iter()
        .map(|&x| view.local(ambient.frob(x)).ok_or(Error::Precondition("the element is not defined over the base field".into())))
        .collect::<Result<_>>()?;
    let t = TwistedGroup::new(&view, local_frob, ambient.degree())?;
    Ok(kernel_under_map(&t, &ambient, n.members())?.len())
}

/// Twisted classes of `N(T)/T` for a subgroup `T` of `big`, under the Frobenius over the
/// degree-`base_degree` subfield.
pub fn weyl_twisted_classes(big: &GroupTable, base_degree: u32, t: &Subgroup) -> Result<TwistedClassSet> {
    let frob = frobenius_action(big, base_degree)?;
    let n = normalizer(big, t);
    let quot = quotient(big, &n, t)?;
    let qf: Vec<u32> = quot
        .coset_reps
        .iter()
        .map(|&x| quot.coset_of(frob[x as usize]).ok_or(Error::Precondition("the subgroup is not Frobenius-stable".into())))
        .collect::<Result<_>>()?;
    let r = big.field().m() / base_degree;
    Ok(twisted_classes(&TwistedGroup::new(&quot.table, qf, r)?))
}

/// A conjugator `a` over the splitting field with `a^{-1} x a` diagonal, for a regular
/// semisimple `x` defined over the degree-`base_degree` subfield and split over `big`: columns
/// are eigenvectors ordered by the Frobenius orbits of the eigenvalues.
pub fn eigenbasis(big: &GroupTable, base_degree: u32, x: &Mat) -> Result<Mat> {
    let k = big.field();
    let n = x.n();
    let mut eigen: Vec<Fq> = k.elements().filter(|&l| x.charpoly(k).eval(l, k).is_zero()).collect();
    if eigen.len() != n {
        return Err(Error::Precondition(format!("{x} is not regular semisimple and split over F_{}", k.name())));
    }
    let mut ordered = Vec::with_capacity(n);
    while let Some(&l) = eigen.first() {
        let mut y = l;
        loop {
            ordered.push(y);
            eigen.retain(|&e| e != y);
            y = k.frobenius_unchecked(base_degree, y);
            if y == l {
                break;
            }
        }
    }
    let mut cols: Vec<Vec<Fq>> = Vec::with_capacity(n);
    for &l in &ordered {
        let shifted = x.sub(&Mat::scalar(n, l), k);
        let rows: Vec<Vec<Fq>> = (0..n).map(|i| shifted.row(i).to_vec()).collect();
        let ns = crate::matfq::nullspace(rows, n, k);
        let v = ns.into_iter().next().ok_or(Error::Internal("eigenvalue without eigenvector".into()))?;
        cols.push(v);
    }
    let mut a = Mat::zero(n);
    for (j, v) in cols.iter().enumerate() {
        for i in 0..n {
            a.set(i, j, v[i]);
        }
    }
    if a.inverse(k).is_none() {
        return Err(Error::Internal("eigenvectors are dependent".into()));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grpcore::{conjugacy_classes, GroupSpec, DEFAULT_MAX_GROUP};
    use crate::matfq::{gl_conjugate_test, regular_unipotent};

    fn group(s: &str) -> GroupTable {
        s.parse::<GroupSpec>().unwrap().instantiate(DEFAULT_MAX_GROUP).unwrap()
    }

    #[test]
    fn untwisted_is_conjugacy() {
        for s in ["gl:2@2^1", "sl:2@3^1", "dihedral:5"] {
            let g = group(s);
            assert_eq!(twisted_classes(&TwistedGroup::untwisted(&g)).size, conjugacy_classes(&g).count(), "{s}");
        }
        assert_eq!(twisted_classes(&TwistedGroup::untwisted(&CayleyTable::cyclic(1))).size, 1);
    }

    #[test]
    fn mu12_over_f7() {
        let c = CayleyTable::cyclic(12);
        let t = TwistedGroup::new(&c, cyclic_frobenius(12, 7), 2).unwrap();
        assert_eq!(twisted_classes(&t).size, 6);
        let rep = h1_mu_n(7, 12).unwrap();
        assert_eq!(rep.class_count, 6);
        assert!(rep.agrees());
    }

    #[test]
    fn rejects_non_automorphisms() {
        let c = CayleyTable::cyclic(4);
        assert!(TwistedGroup::new(&c, vec![0, 0, 0, 0], 1).is_err());
        assert!(TwistedGroup::new(&c, vec![0, 2, 1, 3], 2).is_err());
        assert!(TwistedGroup::new(&c, vec![0, 3, 2, 1], 1).is_err());
        assert!(TwistedGroup::new(&c, vec![0, 3, 2, 1], 2).is_ok());
    }

    #[test]
    fn cocycle_examples() {
        let c = CayleyTable::cyclic(8);
        let t = TwistedGroup::new(&c, cyclic_frobenius(8, 3), 2).unwrap();
        assert!(cocycle_check(&t, Cocycle { value: 0 }));
        // additive: c + 3c = 4c
        assert!(cocycle_check(&t, Cocycle { value: 2 }));
        assert!(!cocycle_check(&t, Cocycle { value: 1 }));
    }

    #[test]
    fn h1_examples() {
        assert_eq!(h1_mu_n(5, 2).unwrap().class_count, 2);
        assert_eq!(h1_mu_n(4, 3).unwrap().class_count, 3);
        assert_eq!(h1_mu_n(9, 1).unwrap().class_count, 1);
        let r = h1_mu_n(8, 11).unwrap();
        assert!(r.field_count.is_none() && r.agrees());
        assert!(h1_mu_n(6, 2).is_err());
    }

    #[test]
    fn kernels() {
        let g = group("gl:2@3^1");
        let t = TwistedGroup::untwisted(&g);
        let ids: Vec<u32> = g.ids().collect();
        assert_eq!(kernel_under_map(&t, &t, &ids).unwrap(), vec![g.identity()]);
        let big = group("gl:2@3^2");
        let amb = frobenius_twist(&big, 1).unwrap();
        let triv = Subgroup::generated(&big, &[]);
        let view = SubgroupView::new(&big, &triv);
        let tt = TwistedGroup::new(&view, vec![0], 2).unwrap();
        assert_eq!(kernel_under_map(&tt, &amb, triv.members()).unwrap().len(), 1);
        assert!(kernel_under_map(&tt, &amb, &[1]).is_err());
    }

    #[test]
    fn nonsplit_torus_cocycle() {
        let big = group("gl:2@3^2");
        let aniso: Mat = "[0,1;1,1]".parse().unwrap();
        let a = eigenbasis(&big, 1, &aniso).unwrap();
        let k = big.field();
        assert!(a.inverse(k).unwrap().mul(&aniso, k).mul(&a, k).is_diagonal());
        let t = centralizer(&big, big.id_of(&Mat::diag(&[Fq(1), Fq(2)])).unwrap());
        let fc = cocycle_of_form(&big, 1, &t, &a).unwrap();
        assert!(fc.normalizes && fc.cocycle_ok && !fc.in_subgroup && !fc.trivial);
        assert_eq!(fc.weyl_class_count, 2);
        let rational = cocycle_of_form(&big, 1, &t, &Mat::identity(2)).unwrap();
        assert!(rational.trivial && rational.in_subgroup);
        assert_eq!(subgroup_form_count(&big, 1, &Mat::diag(&[Fq(1), Fq(2)])).unwrap(), 2);
    }

    #[test]
    fn unipotent_form_cocycle() {
        let big = group("sl:2@5^2");
        let k = big.field().clone();
        let emb = Embedding::new(&crate::ff::make_field(5, 1).unwrap(), &k).unwrap();
        let f5 = emb.src().clone();
        let u1 = regular_unipotent(2, Fq(1), &f5).unwrap().embed(&emb);
        let u2 = regular_unipotent(2, Fq(2), &f5).unwrap().embed(&emb);
        let z = centralizer(&big, big.id_of(&u1).unwrap());
        let a = crate::matfq::sl_conjugate_test(&u2, &u1, &k).unwrap().unwrap();
        let fc = cocycle_of_form(&big, 1, &z, &a).unwrap();
        assert!(fc.normalizes && fc.cocycle_ok && fc.in_subgroup);
        assert_eq!(fc.trivial_in_subgroup, Some(false));
        assert!(gl_conjugate_test(&u1, &u2, &k).is_some());
    }
}
