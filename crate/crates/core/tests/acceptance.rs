//! The ten acceptance criteria. Each prints one `criterion N: PASS|FAIL` line; the test fails if
//! any criterion fails its exact check or its time limit.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use serde_json::{json, Value};
use zclass_core::ff::gcd;
use zclass_core::galh1::h1_mu_n;
use zclass_core::grpcore::{
    center, centralizer, conjugacy_classes, instantiate, normalizer, quotient, subgroups_conjugate, FamilySpec, Subgroup,
};
use zclass_core::matfq::{heisenberg_element, is_regular, is_regular_semisimple, is_unipotent, jordan_decomposition};
use zclass_core::paperlab::{run_experiment, unipotent_forms, weyl_class_count, Params, Verdict};
use zclass_core::zclass::{geometric_stabilize, z_partition, ZEngine};
use zclass_core::{GroupTable, Mat};

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn experiment(id: &str, params: Params) -> Result<Value, String> {
    let e = run_experiment(id, &params).map_err(|err| format!("{id} {params}: {err}"))?;
    check(e.verdict == Verdict::Pass, || format!("{id} {params}: verdict {} computed {}", e.verdict, e.computed))?;
    Ok(e.computed)
}

fn field_of(q: u64) -> Params {
    Params::new().with("q", q)
}

fn gl2_census() -> Outcome {
    for (q, expected) in [(2u64, 3usize), (3, 4), (5, 4)] {
        let g = instantiate(FamilySpec::gl(2), &field(q)).unwrap();
        let computed = z_partition(&g, None).zclass_count;
        let oracle = bf_zclasses(&g, |_| true).len();
        check(computed == expected && oracle == expected, || format!("GL_2(F_{q}): {computed} z-classes, oracle {oracle}"))?;
    }
    let k = field(3);
    let g = instantiate(FamilySpec::gl(2), &k).unwrap();
    let seeds: Vec<Mat> = conjugacy_classes(&g).reps().iter().map(|&r| g.element(r)).collect();
    let st = geometric_stabilize(FamilySpec::gl(2), &k, &seeds, 2).map_err(|e| e.to_string())?;
    let top = st.levels.last().unwrap();
    check(top.degree == 2 && top.block_count == 3, || format!("GL_2(F_9) seed blocks {}", top.block_count))?;
    Ok("3, 4, 4 z-classes; 3 blocks over F_9".into())
}

/// Regular-unipotent classes and their z-classes in `g`, by brute force.
fn unipotent_oracle(g: &GroupTable) -> (usize, usize) {
    let k = g.field().clone();
    let keep = |x: u32| {
        let m = g.element(x);
        is_unipotent(&m, &k) && is_regular(&m, &k)
    };
    let classes = bf_classes(g).into_iter().filter(|c| keep(*c.first().unwrap())).count();
    (classes, bf_zclasses(g, keep).len())
}

fn sl2_unipotents() -> Outcome {
    for q in [3u64, 5, 7] {
        let c = experiment("E2", field_of(q))?;
        check(c["rational_classes"] == json!(2) && c["zclasses"] == json!(1), || format!("q={q}: {c}"))?;
        let oracle = unipotent_oracle(&instantiate(FamilySpec::sl(2), &field(q)).unwrap());
        check(oracle == (2, 1), || format!("q={q}: brute force {oracle:?}"))?;
    }
    Ok("2 classes, 1 z-class for q = 3, 5, 7".into())
}

fn sl3_unipotents() -> Outcome {
    for q in [2u64, 3, 4] {
        let expected = gcd(3, q - 1);
        let c = experiment("E3", field_of(q))?;
        check(c["rational_classes"] == json!(expected) && c["zclasses"] == json!(expected), || format!("q={q}: {c}"))?;
        if q <= 3 {
            let family = if q == 3 { FamilySpec::sl(3).with_override() } else { FamilySpec::sl(3) };
            let oracle = unipotent_oracle(&instantiate(family, &field(q)).unwrap());
            check(oracle == (expected as usize, expected as usize), || format!("q={q}: brute force {oracle:?}"))?;
        }
    }
    Ok("counts 1, 1, 3 for q = 2, 3, 4".into())
}

fn torus_classification() -> Outcome {
    let weyl2 = weyl_class_count(2).map_err(|e| e.to_string())?;
    let weyl3 = weyl_class_count(3).map_err(|e| e.to_string())?;
    check(weyl2 == partitions(2) && weyl3 == partitions(3), || format!("Weyl classes {weyl2}, {weyl3}"))?;
    for q in [3u64, 4, 5] {
        let c = experiment("E5", Params::new().with("n", 2).with("q", q))?;
        check(c["zclasses"] == json!(2), || format!("GL_2(F_{q}): {c}"))?;
        let g = instantiate(FamilySpec::gl(2), &field(q)).unwrap();
        let k = g.field().clone();
        let oracle = bf_zclasses(&g, |x| is_regular_semisimple(&g.element(x), &k)).len();
        check(oracle == 2, || format!("GL_2(F_{q}) brute force {oracle}"))?;
    }
    let c = experiment("E5", Params::new().with("n", 3).with("q", 5))?;
    check(c["zclasses"] == json!(3), || format!("GL_3(F_5): {c}"))?;
    let g = instantiate(FamilySpec::gl(3), &field(5)).unwrap();
    let torus = Subgroup::from_ids(&g, g.ids().filter(|&i| g.element(i).is_diagonal()).collect()).unwrap();
    let weyl = quotient(&g, &normalizer(&g, &torus), &torus).unwrap();
    let classes = weyl.table.class_count();
    check(weyl.order() == 6 && classes == partitions(3), || format!("N(T)/T in GL_3(F_5): order {}, {classes} classes", weyl.order()))?;
    Ok("2 z-classes for GL_2(F_3,4,5), 3 for GL_3(F_5)".into())
}

fn theta_failure() -> Outcome {
    for which in ["gl2/F2", "sl2/F3"] {
        let c = experiment("E6", Params::new().with("which", which))?;
        check(c["base_equivalent"] == json!(true) && c["extension_equivalent"] == json!(false), || format!("{which}: {c}"))?;
        if which == "gl2/F2" {
            check(c["growth_degree"] == json!(2), || format!("{which}: {c}"))?;
        }
    }
    Ok("both Borel examples change status; growth degree 2".into())
}

fn heisenberg() -> Outcome {
    for q in [5u64, 7] {
        let c = experiment("E7", field_of(q))?;
        check(c["distinct_zclasses"] == json!(q - 1), || format!("q={q}: {c}"))?;
        let k = field(q);
        let g = instantiate(FamilySpec::heisenberg(), &k).unwrap();
        let ids: Vec<u32> = k.units().map(|t| id(&g, &heisenberg_element(t, &k).unwrap())).collect();
        let cents: Vec<BTreeSet<u32>> = ids.iter().map(|&h| bf_centralizer(&g, h)).collect();
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                check(bf_sets_conjugate(&g, &cents[i], &cents[j]).is_none(), || format!("q={q}: h({i}) ~ h({j})"))?;
            }
        }
    }
    Ok("q - 1 distinct z-classes for q = 5, 7".into())
}

fn cohomology_triple() -> Outcome {
    let c = experiment("E12", Params::new())?;
    check(c["disagreements"] == json!(0), || c.to_string())?;
    let mut checked = 0;
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        let k = field(q);
        for n in 1..=12u64 {
            let rep = h1_mu_n(q, n).map_err(|e| e.to_string())?;
            let size = k.power_class_count(n).unwrap().size;
            check(rep.class_count == size && size as u64 == gcd(n, q - 1) && rep.agrees(), || format!("(n={n}, q={q}): {rep:?}"))?;
            if (2..=3).contains(&n) && n % k.p() as u64 != 0 {
                let (_, labels) = unipotent_forms(n as usize, &k).unwrap();
                let classes = labels.iter().enumerate().filter(|(i, l)| i == *l).count();
                check(classes == size, || format!("(n={n}, q={q}): {classes} unipotent classes vs {size}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("84 tuples agree; {checked} unipotent cross-checks"))
}

fn cocycle_soundness() -> Outcome {
    for q in [3u64, 5] {
        let c = experiment("E11", Params::new().with("q", q))?;
        let expected = json!({
            "fiber": 2, "subgroup_forms": 2, "weyl_bound": 2, "within_bound": true,
            "cocycle_ok": true, "outside_torus": true, "nontrivial_weyl_image": true,
        });
        for (key, v) in expected.as_object().unwrap() {
            check(c.get(key) == Some(v), || format!("q={q}: {key} = {:?}", c.get(key)))?;
        }
    }
    Ok("fiber 2 = Weyl bound for q = 3, 5".into())
}

fn property_suites() -> Outcome {
    let mut violations: Vec<String> = Vec::new();
    let groups = property_groups();
    for g in &groups {
        let k = g.field().clone();
        let engine = ZEngine::new(g);
        let classes = engine.classes();
        let part = engine.z_partition(None);
        let mut covered = BTreeSet::new();
        for block in &part.blocks {
            let union: usize = block.classes.iter().map(|&c| classes.members(classes.class_of(c)).len()).sum();
            if union != block.size || !block.classes.iter().all(|&c| covered.insert(c)) {
                violations.push(format!("{}: block {} is not a union of classes", g.name(), block.rep));
            }
        }
        if covered.len() != classes.count() {
            violations.push(format!("{}: blocks miss classes", g.name()));
        }
        let idb = part.block_of_class(classes.reps()[classes.class_of(g.identity())]).unwrap();
        let id_members: BTreeSet<u32> =
            part.blocks[idb].classes.iter().flat_map(|&c| classes.members(classes.class_of(c)).iter().copied()).collect();
        if id_members != set_of(&center(g)) {
            violations.push(format!("{}: identity z-class is not the center", g.name()));
        }
        if (part.zclass_count == 1) != g.is_abelian() {
            violations.push(format!("{}: abelian iff single z-class fails", g.name()));
        }
        for x in g.ids() {
            let j = jordan_decomposition(&g.element(x), &k).unwrap();
            let zs = centralizer(g, id(g, &j.semisimple));
            let zu = centralizer(g, id(g, &j.unipotent));
            if centralizer(g, x) != zs.intersect(&zu) {
                violations.push(format!("{}: Z(g) != Z(g_s) & Z(g_u) at {}", g.name(), g.element(x)));
            }
        }
        for c in 0..classes.count() {
            if classes.members(c).len() * centralizer(g, classes.reps()[c]).order() != g.order() {
                violations.push(format!("{}: orbit-stabilizer fails for class {c}", g.name()));
            }
        }
    }
    let conj_groups: Vec<GroupTable> = vec![
        instantiate(FamilySpec::gl(2), &field(2)).unwrap(),
        instantiate(FamilySpec::gl(2), &field(3)).unwrap(),
        instantiate(FamilySpec::sl(2), &field(3)).unwrap(),
        "dihedral:5".parse::<zclass_core::GroupSpec>().unwrap().instantiate(1 << 20).unwrap(),
    ];
    let mut pairs = 0;
    for g in &conj_groups {
        let mut subgroups: Vec<Subgroup> = Vec::new();
        for a in g.ids() {
            for s in [Subgroup::generated(g, &[a]), centralizer(g, a)] {
                if !subgroups.contains(&s) {
                    subgroups.push(s);
                }
            }
        }
        for h1 in &subgroups {
            for h2 in &subgroups {
                pairs += 1;
                let found = subgroups_conjugate(g, h1, h2).is_some();
                if found != bf_sets_conjugate(g, &set_of(h1), &set_of(h2)).is_some() {
                    violations.push(format!("{}: subgroups_conjugate disagrees", g.name()));
                }
            }
        }
    }
    check(violations.is_empty(), || format!("{} violations, first: {}", violations.len(), violations[0]))?;
    Ok(format!("0 violations over {} groups and {pairs} subgroup pairs", groups.len()))
}

fn curious_example() -> Outcome {
    for n in [2usize, 3] {
        let c = experiment("E8", Params::new().with("n", n).with("q", 2))?;
        check(c["torus_order"] == json!(1) && c["centralizers_equal_to_torus"] == json!(0), || format!("n={n}: {c}"))?;
        let g = instantiate(FamilySpec::sl(n).with_override(), &field(2)).unwrap();
        let torus: BTreeSet<u32> = g.ids().filter(|&i| g.element(i).is_diagonal()).collect();
        check(torus == BTreeSet::from([g.identity()]), || format!("n={n}: torus {torus:?}"))?;
        let hits = g.ids().filter(|&h| bf_centralizer(&g, h) == torus).count();
        check(hits == 0, || format!("n={n}: {hits} centralizers equal the torus"))?;
    }
    Ok("trivial torus is no centralizer in SL_2(F_2), SL_3(F_2)".into())
}

fn main() -> ExitCode {
    let criteria: [(u32, Option<u64>, fn() -> Outcome); 10] = [
        (1, Some(30), gl2_census),
        (2, Some(30), sl2_unipotents),
        (3, Some(60), sl3_unipotents),
        (4, Some(60), torus_classification),
        (5, Some(5), theta_failure),
        (6, Some(5), heisenberg),
        (7, Some(5), cohomology_triple),
        (8, Some(30), cocycle_soundness),
        (9, None, property_suites),
        (10, Some(5), curious_example),
    ];
    let mut failed = Vec::new();
    for (n, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let within = limit.is_none_or(|s| elapsed <= Duration::from_secs(s));
        let limit = limit.map_or("none".to_string(), |s| format!("{s} s"));
        let (verdict, detail) = match (&outcome, within) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; exceeded {limit}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        println!("criterion {n}: {verdict} ({} ms, limit {limit}) {detail}", elapsed.as_millis());
        if verdict == "FAIL" {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
