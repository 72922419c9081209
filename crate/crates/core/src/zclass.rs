//! z-classes: elements whose centralizers are conjugate.
//!
//! [`ZEngine`] partitions an explicit group. For `GL_n` and `SL_n` over fields too large to
//! tabulate, [`structural_z_equivalent`] decides z-equivalence from the polynomial algebras
//! `K[g]`, which determine the centralizers as soon as those span their commutant algebras.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{extension, Embedding, Field, FieldCtx, Fq};
use crate::galh1;
use crate::grpcore::{
    centralizer, centralizer_of_set, instantiate_bounded, ClassMap, FamilyKind, FamilySpec, GroupTable, Subgroup,
    DEFAULT_MAX_GROUP,
};
use crate::matfq::{
    centralizer_algebra, gl_conjugate_test, sl_conjugate_test, vector_rank, Mat, TransporterSpace,
};

const FINGERPRINT_ORDER_LIMIT: usize = 1 << 16;
const ALGEBRA_COUNT_LIMIT: u128 = 1 << 24;
const SPAN_ENUMERATION_LIMIT: u128 = 1 << 20;
const SPAN_SAMPLES: usize = 8192;
const RNG_SEED: u64 = 0x5a_c1a5;

/// Invariants of a z-class used for reporting and as cheap prefilters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZFingerprint {
    pub centralizer_order: usize,
    pub abelian: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element_orders: Option<BTreeMap<u64, usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZBlock {
    /// Least element of the block.
    pub rep: u32,
    pub rep_matrix: Mat,
    /// Representatives of the conjugacy classes in the block.
    pub classes: Vec<u32>,
    /// Number of group elements in the block.
    pub size: usize,
    pub centralizer_order: usize,
    pub fingerprint: ZFingerprint,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZPartition {
    pub group: String,
    pub zclass_count: usize,
    pub blocks: Vec<ZBlock>,
    #[serde(skip)]
    block_of_class: BTreeMap<u32, usize>,
}

impl ZPartition {
    /// Block index of a conjugacy class, by class representative.
    pub fn block_of_class(&self, class_rep: u32) -> Option<usize> {
        self.block_of_class.get(&class_rep).copied()
    }

    /// Number of conjugacy classes covered.
    pub fn class_count(&self) -> usize {
        self.block_of_class.len()
    }
}

/// Conjugacy classes and centralizers of one group, with the z-class computations on top.
pub struct ZEngine<'g> {
    group: &'g GroupTable,
    classes: ClassMap,
    centralizers: RefCell<HashMap<u32, Subgroup>>,
}

impl<'g> ZEngine<'g> {
    pub fn new(group: &'g GroupTable) -> Self {
        ZEngine { group, classes: ClassMap::new(group), centralizers: RefCell::new(HashMap::new()) }
    }

    pub fn group(&self) -> &GroupTable {
        self.group
    }

    pub fn classes(&self) -> &ClassMap {
        &self.classes
    }

    /// `Z(g)`, cached.
    pub fn centralizer(&self, id: u32) -> Subgroup {
        if let Some(z) = self.centralizers.borrow().get(&id) {
            return z.clone();
        }
        let z = centralizer(self.group, id);
        self.centralizers.borrow_mut().insert(id, z.clone());
        z
    }

    fn class_centralizer_order(&self, class: usize) -> usize {
        self.group.order() / self.classes.members(class).len()
    }

    fn fingerprint(&self, z: &Subgroup) -> ZFingerprint {
        ZFingerprint {
            centralizer_order: z.order(),
            abelian: z.is_abelian(self.group),
            element_orders: (z.order() <= FINGERPRINT_ORDER_LIMIT).then(|| z.element_orders(self.group)),
        }
    }

    /// z-partition of the classes whose representative satisfies `filter` (all classes when
    /// `None`).
    pub fn z_partition(&self, filter: Option<&dyn Fn(&Mat) -> bool>) -> ZPartition {
        let selected: BTreeSet<usize> = (0..self.classes.count())
            .filter(|&c| filter.is_none_or(|f| f(&self.group.element(self.classes.reps()[c]))))
            .collect();
        self.z_partition_on(&selected)
    }

    /// z-partition restricted to the given class indices.
    pub fn z_partition_on(&self, selected: &BTreeSet<usize>) -> ZPartition {
        let g = self.group;
        let mut block_of: HashMap<usize, usize> = HashMap::new();
        let mut blocks = Vec::new();
        for &c in selected {
            if block_of.contains_key(&c) {
                continue;
            }
            let h = self.classes.reps()[c];
            let zh = self.centralizer(h);
            // y in C_G(Z(h)) has Z(y) ⊇ Z(h), with equality iff the orders agree
            let cz = centralizer_of_set(g, zh.gens(g));
            let b = blocks.len();
            let mut members = BTreeSet::new();
            for &y in cz.members() {
                let cy = self.classes.class_of(y);
                if selected.contains(&cy) && !block_of.contains_key(&cy) && self.class_centralizer_order(cy) == zh.order() {
                    block_of.insert(cy, b);
                    members.insert(cy);
                }
            }
            let classes: Vec<u32> = members.iter().map(|&cy| self.classes.reps()[cy]).collect();
            let size = members.iter().map(|&cy| self.classes.members(cy).len()).sum();
            blocks.push(ZBlock {
                rep: h,
                rep_matrix: g.element(h),
                classes,
                size,
                centralizer_order: zh.order(),
                fingerprint: self.fingerprint(&zh),
            });
        }
        let block_of_class = block_of.iter().map(|(&c, &b)| (self.classes.reps()[c], b)).collect();
        ZPartition { group: g.name(), zclass_count: blocks.len(), blocks, block_of_class }
    }

    /// `x` with `x Z(a) x^{-1} = Z(b)`, or `None` when `a` and `b` are not z-equivalent.
    pub fn z_equivalent(&self, a: u32, b: u32) -> Option<Mat> {
        let g = self.group;
        let (za, zb) = (self.centralizer(a), self.centralizer(b));
        if za == zb {
            return Some(Mat::identity(g.dim()));
        }
        if za.order() != zb.order() {
            return None;
        }
        let ca = self.classes.class_of(a);
        let cz = centralizer_of_set(g, zb.gens(g));
        let y = cz.members().iter().copied().find(|&y| self.classes.class_of(y) == ca)?;
        self.classes.conjugator(g, y, a)
    }
}

/// z-partition of a whole group, or of the classes meeting `filter`.
pub fn z_partition(g: &GroupTable, filter: Option<&dyn Fn(&Mat) -> bool>) -> ZPartition {
    ZEngine::new(g).z_partition(filter)
}

/// Whether `Z_G(x)` spans the commutant algebra of `x`, for `G = GL_n(k)` or `SL_n(k)`.
pub fn centralizer_spans_commutant(family: &FamilySpec, k: &FieldCtx, x: &Mat) -> bool {
    let n = x.n();
    if family.kind == FamilyKind::Gl && k.order() as usize >= n + 2 {
        // a + λ is a unit for all but at most n values of λ, so a is a combination of two units
        return true;
    }
    let alg = centralizer_algebra(x, k);
    let target = alg.dim;
    let mut basis: Vec<Vec<Fq>> = Vec::new();
    let mut consider = |m: &Mat| {
        if family.contains(m, k) {
            let mut rows = basis.clone();
            rows.push(m.entries().to_vec());
            if vector_rank(rows, n * n, k) > basis.len() {
                basis.push(m.entries().to_vec());
            }
        }
        basis.len() < target
    };
    if alg.size(k) <= SPAN_ENUMERATION_LIMIT {
        alg.for_each(k, &mut consider);
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
        for _ in 0..SPAN_SAMPLES {
            let coeffs: Vec<Fq> = (0..alg.dim).map(|_| Fq(rng.gen_range(0..k.order()))).collect();
            if !consider(&alg.combination(&coeffs, k)) {
                break;
            }
        }
    }
    basis.len() == target
}

fn is_scalar(x: &Mat) -> bool {
    x.is_diagonal() && (1..x.n()).all(|i| x.get(i, i) == x.get(0, 0))
}

/// Enumerates the polynomial algebra `k[h]` in a fixed order.
fn polynomial_algebra(h: &Mat, k: &FieldCtx) -> TransporterSpace {
    let d = h.minpoly(k).degree().unwrap_or(0);
    let mut basis = Vec::with_capacity(d);
    let mut p = Mat::identity(h.n());
    for _ in 0..d {
        basis.push(p.clone());
        p = p.mul(h, k);
    }
    TransporterSpace { n: h.n(), dim: d, basis }
}

/// z-equivalence in `GL_n(k)` or `SL_n(k)` without an element table.
///
/// When `Z(g)` and `Z(h)` span their commutant algebras, `x Z(g) x^{-1} = Z(h)` holds iff
/// `x k[g] x^{-1} = k[h]`, i.e. iff some `h'` with `k[h'] = k[h]` is conjugate to `g`. Returns
/// `x` with `x Z(g) x^{-1} = Z(h)`.
pub fn structural_z_equivalent(family: &FamilySpec, k: &FieldCtx, g: &Mat, h: &Mat) -> Result<Option<Mat>> {
    if !family.is_reductive() {
        return Err(Error::Precondition(format!("structural z-test needs GL or SL, got {}", family.name())));
    }
    if !family.contains(g, k) || !family.contains(h, k) {
        return Err(Error::InvalidInput("elements are not in the group".into()));
    }
    match (is_scalar(g), is_scalar(h)) {
        (true, true) => return Ok(Some(Mat::identity(g.n()))),
        (true, false) | (false, true) => return Ok(None),
        _ => {}
    }
    for x in [g, h] {
        if !centralizer_spans_commutant(family, k, x) {
            return Err(Error::Precondition(format!("the centralizer of {x} does not span its commutant over F_{}", k.name())));
        }
    }
    let (mg, mh) = (g.minpoly(k), h.minpoly(k));
    if mg.degree() != mh.degree()
        || centralizer_algebra(g, k).dim != centralizer_algebra(h, k).dim
        || mg.factor_degrees(k) != mh.factor_degrees(k)
    {
        return Ok(None);
    }
    let alg = polynomial_algebra(h, k);
    if alg.size(k) > ALGEBRA_COUNT_LIMIT {
        return Err(Error::BoundExceeded { what: "polynomial algebra", size: alg.size(k), bound: ALGEBRA_COUNT_LIMIT });
    }
    let cg = g.charpoly(k);
    let det_g = g.det(k);
    let d = mg.degree();
    let mut found: Option<Result<Option<Mat>>> = None;
    alg.for_each(k, |cand| {
        if cand.det(k) != det_g || cand.charpoly(k) != cg || cand.minpoly(k).degree() != d {
            return true;
        }
        let witness = match family.kind {
            FamilyKind::Sl => match sl_conjugate_test(cand, g, k) {
                Ok(w) => w,
                Err(e) => {
                    found = Some(Err(e));
                    return false;
                }
            },
            _ => gl_conjugate_test(cand, g, k),
        };
        match witness {
            Some(x) => {
                found = Some(Ok(Some(x)));
                false
            }
            None => true,
        }
    });
    found.unwrap_or(Ok(None))
}

/// Decides z-equivalence in `family` over `k`, by element table when it fits, otherwise
/// structurally.
fn z_equivalent_over(family: &FamilySpec, k: &Field, g: &Mat, h: &Mat, max_group: u64) -> Result<(bool, &'static str)> {
    match instantiate_bounded(*family, k, max_group) {
        Ok(big) => {
            let (a, b) = (lookup(&big, g)?, lookup(&big, h)?);
            Ok((ZEngine::new(&big).z_equivalent(a, b).is_some(), "table"))
        }
        Err(Error::BoundExceeded { .. }) if family.is_reductive() => {
            Ok((structural_z_equivalent(family, k, g, h)?.is_some(), "structural"))
        }
        Err(e) => Err(e),
    }
}

fn lookup(g: &GroupTable, x: &Mat) -> Result<u32> {
    g.id_of(x).ok_or_else(|| Error::InvalidInput(format!("{x} is not an element of {}", g.name())))
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub g: Mat,
    pub h: Mat,
    pub base_equivalent: bool,
    pub extension_equivalent: bool,
    pub changed: bool,
    pub method: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub family: String,
    pub base_field: String,
    pub extension_field: String,
    pub rows: Vec<ProbeRow>,
}

/// Compares z-equivalence over `F_q` and over `F_{q^r}` for each pair.
pub fn base_change_probe(family: FamilySpec, base: &Field, r: u32, pairs: &[(Mat, Mat)]) -> Result<ProbeReport> {
    base_change_probe_bounded(family, base, r, pairs, DEFAULT_MAX_GROUP)
}

pub fn base_change_probe_bounded(
    family: FamilySpec,
    base: &Field,
    r: u32,
    pairs: &[(Mat, Mat)],
    max_group: u64,
) -> Result<ProbeReport> {
    let small = instantiate_bounded(family, base, max_group)?;
    let engine = ZEngine::new(&small);
    let big_field = extension(base, r)?;
    let emb = Embedding::new(base, &big_field)?;
    let big = match instantiate_bounded(family, &big_field, max_group) {
        Ok(t) => Some(t),
        Err(Error::BoundExceeded { .. }) if family.is_reductive() => None,
        Err(e) => return Err(e),
    };
    let big_engine = big.as_ref().map(ZEngine::new);
    let mut rows = Vec::new();
    for (g, h) in pairs {
        let base_equivalent = engine.z_equivalent(lookup(&small, g)?, lookup(&small, h)?).is_some();
        let (ge, he) = (g.embed(&emb), h.embed(&emb));
        let (extension_equivalent, method) = match (&big, &big_engine) {
            (Some(t), Some(e)) => (e.z_equivalent(lookup(t, &ge)?, lookup(t, &he)?).is_some(), "table"),
            _ => (structural_z_equivalent(&family, &big_field, &ge, &he)?.is_some(), "structural"),
        };
        rows.push(ProbeRow {
            g: g.clone(),
            h: h.clone(),
            base_equivalent,
            extension_equivalent,
            changed: base_equivalent != extension_equivalent,
            method,
        });
    }
    Ok(ProbeReport {
        family: family.name(),
        base_field: base.name(),
        extension_field: big_field.name(),
        rows,
    })
}

/// Base-field classes and z-classes that land in the class (z-class) of `g` over `F_{q^r}`.
#[derive(Clone, Debug, Serialize)]
pub struct FormSet {
    pub base_element: Mat,
    pub degree: u32,
    pub fused_class_reps: Vec<Mat>,
    pub fused_zclass_reps: Vec<Mat>,
    pub class_count: usize,
    pub zclass_count: usize,
    /// Frobenius-twisted forms of the centralizer subgroup, when the extension group fits.
    pub subgroup_form_count: Option<usize>,
}

/// Conjugacy of two elements over the extension.
fn conjugate_over(family: &FamilySpec, k: &FieldCtx, a: &Mat, b: &Mat, big: Option<(&GroupTable, &ClassMap)>) -> Result<bool> {
    match family.kind {
        FamilyKind::Gl => Ok(gl_conjugate_test(a, b, k).is_some()),
        FamilyKind::Sl => Ok(sl_conjugate_test(a, b, k)?.is_some()),
        _ => {
            let (t, cm) = big.ok_or(Error::BoundExceeded {
                what: "extension group order",
                size: 0,
                bound: DEFAULT_MAX_GROUP as u128,
            })?;
            Ok(cm.class_of(lookup(t, a)?) == cm.class_of(lookup(t, b)?))
        }
    }
}

pub fn fusion_count(family: FamilySpec, base: &Field, r: u32, g: &Mat) -> Result<FormSet> {
    fusion_count_bounded(family, base, r, g, DEFAULT_MAX_GROUP)
}

pub fn fusion_count_bounded(family: FamilySpec, base: &Field, r: u32, g: &Mat, max_group: u64) -> Result<FormSet> {
    let small = instantiate_bounded(family, base, max_group)?;
    lookup(&small, g)?;
    let engine = ZEngine::new(&small);
    let big_field = extension(base, r)?;
    let emb = Embedding::new(base, &big_field)?;
    let big = match instantiate_bounded(family, &big_field, max_group) {
        Ok(t) => Some(t),
        Err(Error::BoundExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let big_engine = big.as_ref().map(ZEngine::new);
    let big_ref = big.as_ref().zip(big_engine.as_ref().map(|e| e.classes()));
    let ge = g.embed(&emb);
    let cg = g.charpoly(base);

    let mut fused_class_reps = Vec::new();
    for &rep in engine.classes().reps() {
        let y = small.element(rep);
        if y.charpoly(base) == cg && conjugate_over(&family, &big_field, &y.embed(&emb), &ge, big_ref)? {
            fused_class_reps.push(y);
        }
    }

    let scalars: Vec<Fq> = big_field
        .units()
        .filter(|&c| family.contains(&Mat::scalar(ge.n(), c), &big_field))
        .filter(|&c| family.kind != FamilyKind::Dihedral && c != Fq::ONE)
        .collect();
    let partition = engine.z_partition(None);
    let mut fused_zclass_reps = Vec::new();
    for block in &partition.blocks {
        let ye = block.rep_matrix.embed(&emb);
        let in_fiber = if conjugate_over(&family, &big_field, &ye, &ge, big_ref)? {
            true
        } else if scalars.iter().any(|&c| {
            let shifted = ge.scale(c, &big_field);
            ye.charpoly(&big_field) == shifted.charpoly(&big_field)
                && conjugate_over(&family, &big_field, &ye, &shifted, big_ref).unwrap_or(false)
        }) {
            true
        } else if let (Some(t), Some(e)) = (&big, &big_engine) {
            e.z_equivalent(lookup(t, &ye)?, lookup(t, &ge)?).is_some()
        } else {
            structural_z_equivalent(&family, &big_field, &ye, &ge)?.is_some()
        };
        if in_fiber {
            fused_zclass_reps.push(block.rep_matrix.clone());
        }
    }

    let subgroup_form_count = match &big {
        Some(t) => Some(galh1::subgroup_form_count(t, base.m(), &ge)?),
        None => None,
    };
    Ok(FormSet {
        base_element: g.clone(),
        degree: r,
        class_count: fused_class_reps.len(),
        zclass_count: fused_zclass_reps.len(),
        fused_class_reps,
        fused_zclass_reps,
        subgroup_form_count,
    })
}

/// Centralizer orders of a fixed element over a tower of extensions, and the fitted growth
/// exponent `d` in `|Z| ≈ q^{d r}`.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthDegree {
    pub element: Mat,
    pub degrees: Vec<u32>,
    pub orders: Vec<u128>,
    pub slopes: Vec<f64>,
    pub fitted: Option<u32>,
    pub stable: bool,
}

/// `|Z_{G(k)}(x)|` by enumerating the commutant algebra of `x`.
pub fn centralizer_order_structural(family: &FamilySpec, k: &FieldCtx, x: &Mat) -> Result<u128> {
    let alg = centralizer_algebra(x, k);
    let size = alg.size(k);
    if size > ALGEBRA_COUNT_LIMIT {
        return Err(Error::BoundExceeded { what: "centralizer algebra", size, bound: ALGEBRA_COUNT_LIMIT });
    }
    let mut count = 0u128;
    alg.for_each(k, |m| {
        if family.contains(m, k) {
            count += 1;
        }
        true
    });
    Ok(count)
}

pub fn growth_degree(family: FamilySpec, base: &Field, g: &Mat, degrees: &[u32]) -> Result<GrowthDegree> {
    if degrees.is_empty() || degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("degrees must be a non-empty increasing list".into()));
    }
    let mut orders = Vec::new();
    for &r in degrees {
        let k = extension(base, r)?;
        let emb = Embedding::new(base, &k)?;
        let x = g.embed(&emb);
        if !family.contains(&x, &k) {
            return Err(Error::InvalidInput(format!("{g} is not in {}", family.name())));
        }
        orders.push(centralizer_order_structural(&family, &k, &x)?);
    }
    let logq = (base.order() as f64).ln();
    let slopes: Vec<f64> = degrees
        .windows(2)
        .zip(orders.windows(2))
        .map(|(d, o)| ((o[1] as f64).ln() - (o[0] as f64).ln()) / logq / (d[1] - d[0]) as f64)
        .collect();
    let rounded: Vec<i64> = slopes.iter().map(|s| s.round() as i64).collect();
    let stable = rounded.len() >= 2 && rounded[rounded.len() - 1] == rounded[rounded.len() - 2];
    let fitted = if stable { u32::try_from(rounded[rounded.len() - 1]).ok() } else { None };
    Ok(GrowthDegree { element: g.clone(), degrees: degrees.to_vec(), orders, slopes, fitted, stable })
}

/// Partition of the seed list at one extension degree; `labels[i]` is the least seed index in
/// seed `i`'s block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelPartition {
    pub degree: u32,
    pub labels: Vec<usize>,
    pub block_count: usize,
    pub method: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct Stabilization {
    pub levels: Vec<LevelPartition>,
    /// First degree whose partition equals the partition at the next degree of the tower.
    pub stable_degree: Option<u32>,
    pub block_count: Option<usize>,
}

pub(crate) fn canonical_labels(n: usize, same: impl Fn(usize, usize) -> Result<bool>) -> Result<Vec<usize>> {
    let mut labels: Vec<usize> = (0..n).collect();
    for i in 0..n {
        if labels[i] != i {
            continue;
        }
        for j in i + 1..n {
            if labels[j] == j && same(i, j)? {
                labels[j] = i;
            }
        }
    }
    Ok(labels)
}

pub(crate) fn block_count(labels: &[usize]) -> usize {
    labels.iter().enumerate().filter(|(i, &l)| *i == l).count()
}

/// z-partition of the seeds over `F_{q^r}` for `r = 1, 2, 4, ...` up to `max_r`, stopping at
/// the first pair of consecutive agreeing partitions.
pub fn geometric_stabilize(family: FamilySpec, base: &Field, seeds: &[Mat], max_r: u32) -> Result<Stabilization> {
    geometric_stabilize_bounded(family, base, seeds, max_r, DEFAULT_MAX_GROUP)
}

pub fn geometric_stabilize_bounded(
    family: FamilySpec,
    base: &Field,
    seeds: &[Mat],
    max_r: u32,
    max_group: u64,
) -> Result<Stabilization> {
    let mut levels: Vec<LevelPartition> = Vec::new();
    let mut r = 1u32;
    while r <= max_r {
        let k = extension(base, r)?;
        let emb = Embedding::new(base, &k)?;
        let embedded: Vec<Mat> = seeds.iter().map(|s| s.embed(&emb)).collect();
        let mut level = seed_partition_bounded(family, &k, &embedded, max_group)?;
        level.degree = r;
        if let Some(prev) = levels.last() {
            if prev.labels == level.labels {
                let (d, b) = (prev.degree, prev.block_count);
                levels.push(level);
                return Ok(Stabilization { levels, stable_degree: Some(d), block_count: Some(b) });
            }
        }
        levels.push(level);
        r *= 2;
    }
    Ok(Stabilization { levels, stable_degree: None, block_count: None })
}

/// z-partition of a list of elements of `family` over `k`. Uses the structural test for
/// `GL`/`SL` over fields with at least `n + 2` elements or groups above the bound, and the
/// element table otherwise.
pub fn seed_partition(family: FamilySpec, k: &Field, seeds: &[Mat]) -> Result<LevelPartition> {
    seed_partition_bounded(family, k, seeds, DEFAULT_MAX_GROUP)
}

pub fn seed_partition_bounded(family: FamilySpec, k: &Field, seeds: &[Mat], max_group: u64) -> Result<LevelPartition> {
    let structural_labels = || {
        canonical_labels(seeds.len(), |i, j| Ok(structural_z_equivalent(&family, k, &seeds[i], &seeds[j])?.is_some()))
    };
    let structural = family.is_reductive() && k.order() as usize >= family.dim() + 2;
    let (labels, method) = if structural {
        (structural_labels()?, "structural")
    } else {
        match instantiate_bounded(family, k, max_group) {
            Ok(t) => {
                let ids: Vec<u32> = seeds.iter().map(|x| lookup(&t, x)).collect::<Result<_>>()?;
                let engine = ZEngine::new(&t);
                let selected: BTreeSet<usize> = ids.iter().map(|&i| engine.classes().class_of(i)).collect();
                let part = engine.z_partition_on(&selected);
                let block_of = |i: usize| part.block_of_class(engine.classes().reps()[engine.classes().class_of(ids[i])]);
                (canonical_labels(seeds.len(), |i, j| Ok(block_of(i) == block_of(j)))?, "table")
            }
            Err(Error::BoundExceeded { .. }) if family.is_reductive() => (structural_labels()?, "structural"),
            Err(e) => return Err(e),
        }
    };
    Ok(LevelPartition { degree: k.m(), block_count: block_count(&labels), labels, method })
}

/// Whether `x` and `y` are z-equivalent in `family` over `k`.
pub fn z_equivalent_in(family: FamilySpec, k: &Field, x: &Mat, y: &Mat) -> Result<bool> {
    Ok(z_equivalent_over(&family, k, x, y, DEFAULT_MAX_GROUP)?.0)
}
