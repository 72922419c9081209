//! Command-line front end.

mod report;

use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use zclass_core::galh1::{frobenius_twist, h1_mu_n, twisted_classes};
use zclass_core::grpcore::{centralizer, center, prime_power, GroupSpec, GroupTable};
use zclass_core::matfq::{
    gl_conjugate_test, heisenberg_element, is_regular, is_regular_semisimple, is_semisimple, is_unipotent,
    regular_unipotent, sl_conjugate_test,
};
use zclass_core::paperlab::{self, Params, Verdict};
use zclass_core::zclass::{base_change_probe_bounded, ZEngine};
use zclass_core::{make_field, Error, FamilySpec, FieldCtx, Mat};

use report::{Format, Report};

#[derive(Parser, Debug)]
#[command(name = "zclass-kit", version, about = "z-classes of finite matrix groups")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Suppress the runtime footer.
    #[arg(long, global = true)]
    no_footer: bool,
    /// Largest group that may be tabulated.
    #[arg(long, env = "ZK_MAX_GROUP", default_value_t = zclass_core::grpcore::DEFAULT_MAX_GROUP, global = true)]
    max_group: u64,
    /// Largest field that may be constructed.
    #[arg(long, env = "ZK_MAX_FIELD", default_value_t = zclass_core::ff::DEFAULT_MAX_FIELD, global = true)]
    max_field: u64,
    /// Allow SL-type families in characteristic dividing n.
    #[arg(long, global = true)]
    allow_bad_characteristic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Filter {
    All,
    Semisimple,
    Unipotent,
    Regular,
    RegularSemisimple,
    RegularUnipotent,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// z-partition of a group, e.g. `gl:2@3^1`.
    Zclasses {
        group: String,
        #[arg(long, value_enum, default_value_t = Filter::All)]
        filter: Filter,
    },
    /// Centralizer of an element.
    Centralizer { group: String, element: String },
    /// Conjugacy test; the witness `x` satisfies `x e2 x^-1 = e1`.
    Conjtest {
        group: String,
        e1: String,
        e2: String,
        /// Test conjugacy in SL_n instead of GL_n.
        #[arg(long)]
        sl: bool,
    },
    /// z-equivalence over F_q and over F_{q^r} for pairs written `e1~e2`.
    Probe {
        family: String,
        q: u64,
        r: u32,
        #[arg(required = true)]
        pairs: Vec<String>,
    },
    /// Twisted-conjugacy classes: of mu_n under x -> x^q, or of a group under Frobenius.
    H1 {
        #[arg(long, requires = "q", conflicts_with = "group")]
        mu: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, requires = "frobenius")]
        group: Option<String>,
        /// Degree of the fixed subfield of the Frobenius.
        #[arg(long)]
        frobenius: Option<u32>,
    },
    /// Runs one catalogued experiment with `key=value` parameters.
    Experiment { id: String, params: Vec<String> },
    /// Runs an experiment suite: smoke, paper or full.
    Verify { suite: String },
    /// Lists the experiment catalog.
    Experiments,
}

struct Settings {
    max_group: u64,
    max_field: u64,
    allow_bad: bool,
}

impl Settings {
    fn group(&self, spec: &str) -> anyhow::Result<GroupTable> {
        let mut spec: GroupSpec = spec.parse()?;
        self.check_field(spec.p.pow(spec.m))?;
        if self.allow_bad {
            spec.family = spec.family.with_override();
        }
        Ok(spec.instantiate(self.max_group)?)
    }

    fn check_field(&self, q: u64) -> anyhow::Result<()> {
        if q > self.max_field {
            return Err(Error::BoundExceeded { what: "field order", size: q as u128, bound: self.max_field as u128 }.into());
        }
        Ok(())
    }

    fn field(&self, q: u64) -> anyhow::Result<zclass_core::Field> {
        let (p, m) = prime_power(q).ok_or_else(|| Error::Parse { token: q.to_string(), reason: "not a prime power".into() })?;
        self.check_field(q)?;
        Ok(make_field(p, m)?)
    }
}

/// Matrix literal `[a,b;c,d]`, `u_beta:β`, `h:t` or `identity`; field elements by code.
fn parse_element(spec: &str, n: usize, k: &FieldCtx) -> anyhow::Result<Mat> {
    let code = |s: &str| -> anyhow::Result<zclass_core::Fq> {
        let v: u32 = s.parse().map_err(|_| Error::Parse { token: spec.to_string(), reason: "expected an element code".into() })?;
        Ok(k.elem(v)?)
    };
    let m = if let Some(b) = spec.strip_prefix("u_beta:") {
        regular_unipotent(n, code(b)?, k)?
    } else if let Some(t) = spec.strip_prefix("h:") {
        heisenberg_element(code(t)?, k)?
    } else if spec == "identity" {
        Mat::identity(n)
    } else {
        let m: Mat = spec.parse()?;
        m.validate(k)?;
        m
    };
    if m.n() != n {
        return Err(Error::Parse { token: spec.to_string(), reason: format!("expected a {n}x{n} matrix") }.into());
    }
    Ok(m)
}

fn element_in(g: &GroupTable, spec: &str) -> anyhow::Result<(u32, Mat)> {
    let m = parse_element(spec, g.dim(), g.field())?;
    let id = g.id_of(&m).ok_or_else(|| Error::Parse { token: spec.to_string(), reason: format!("not an element of {}", g.name()) })?;
    Ok((id, m))
}

fn zclasses(s: &Settings, group: &str, filter: Filter) -> anyhow::Result<Report> {
    let g = s.group(group)?;
    let k = g.field().clone();
    let engine = ZEngine::new(&g);
    let pred: Box<dyn Fn(&Mat) -> bool> = match filter {
        Filter::All => Box::new(|_| true),
        Filter::Semisimple => Box::new(move |x| is_semisimple(x, &k)),
        Filter::Unipotent => Box::new(move |x| is_unipotent(x, &k)),
        Filter::Regular => Box::new(move |x| is_regular(x, &k)),
        Filter::RegularSemisimple => Box::new(move |x| is_regular_semisimple(x, &k)),
        Filter::RegularUnipotent => Box::new(move |x| is_unipotent(x, &k) && is_regular(x, &k)),
    };
    let part = engine.z_partition(Some(&*pred));
    let mut r = Report::new(
        format!("z-classes of {}", part.group),
        &["block", "rep", "classes", "size", "centralizer_order", "abelian_centralizer"],
    );
    for (i, b) in part.blocks.iter().enumerate() {
        r.row(vec![
            i.to_string(),
            b.rep_matrix.to_string(),
            b.classes.len().to_string(),
            b.size.to_string(),
            b.centralizer_order.to_string(),
            b.fingerprint.abelian.to_string(),
        ]);
    }
    r.json = serde_json::to_value(&part)?;
    Ok(r)
}

fn centralizer_cmd(s: &Settings, group: &str, element: &str) -> anyhow::Result<Report> {
    let g = s.group(group)?;
    let (id, m) = element_in(&g, element)?;
    let z = centralizer(&g, id);
    let gens = z.gen_mats(&g);
    let abelian = z.is_abelian(&g);
    let center_order = center(&g).order();
    let mut r = Report::new(format!("centralizer of {m} in {}", g.name()), &["property", "value"]);
    r.row(vec!["order".into(), z.order().to_string()]);
    r.row(vec!["index".into(), (g.order() / z.order()).to_string()]);
    r.row(vec!["abelian".into(), abelian.to_string()]);
    r.row(vec!["group_center_order".into(), center_order.to_string()]);
    for x in &gens {
        r.row(vec!["generator".into(), x.to_string()]);
    }
    r.json = json!({
        "group": g.name(),
        "element": m,
        "order": z.order(),
        "abelian": abelian,
        "group_center_order": center_order,
        "generators": gens,
    });
    Ok(r)
}

fn conjtest(s: &Settings, group: &str, e1: &str, e2: &str, sl: bool) -> anyhow::Result<Report> {
    let spec: GroupSpec = group.parse()?;
    let k = s.field(spec.p.pow(spec.m))?;
    let n = spec.family.dim();
    let (a, b) = (parse_element(e1, n, &k)?, parse_element(e2, n, &k)?);
    for (tok, x) in [(e1, &a), (e2, &b)] {
        if !spec.family.contains(x, &k) {
            bail!(Error::Parse { token: tok.to_string(), reason: format!("not an element of {}", spec.family.name()) });
        }
    }
    let in_sl = sl || spec.family == FamilySpec::sl(n);
    let witness = if in_sl { sl_conjugate_test(&a, &b, &k)? } else { gl_conjugate_test(&a, &b, &k) };
    let ambient = if in_sl { format!("SL_{n}(F_{})", k.name()) } else { format!("GL_{n}(F_{})", k.name()) };
    let mut r = Report::new(format!("conjugacy in {ambient}"), &["e1", "e2", "conjugate", "witness"]);
    r.row(vec![
        a.to_string(),
        b.to_string(),
        witness.is_some().to_string(),
        witness.as_ref().map_or("-".into(), Mat::to_string),
    ]);
    r.json = json!({ "ambient": ambient, "e1": a, "e2": b, "conjugate": witness.is_some(), "witness": witness });
    Ok(r)
}

fn probe(s: &Settings, family: &str, q: u64, r: u32, pairs: &[String]) -> anyhow::Result<Report> {
    let mut family: FamilySpec = family.parse()?;
    if s.allow_bad {
        family = family.with_override();
    }
    let k = s.field(q)?;
    s.check_field(q.checked_pow(r).unwrap_or(u64::MAX))?;
    let n = family.dim();
    let parsed = pairs
        .iter()
        .map(|p| {
            let (x, y) = p
                .split_once('~')
                .ok_or_else(|| Error::Parse { token: p.clone(), reason: "pairs are written e1~e2".into() })?;
            Ok((parse_element(x, n, &k)?, parse_element(y, n, &k)?))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let rep = base_change_probe_bounded(family, &k, r, &parsed, s.max_group)?;
    let mut out = Report::new(
        format!("{} over {} and {}", rep.family, rep.base_field, rep.extension_field),
        &["g", "h", "base", "extension", "changed", "method"],
    );
    for row in &rep.rows {
        out.row(vec![
            row.g.to_string(),
            row.h.to_string(),
            row.base_equivalent.to_string(),
            row.extension_equivalent.to_string(),
            row.changed.to_string(),
            row.method.to_string(),
        ]);
    }
    out.json = serde_json::to_value(&rep)?;
    Ok(out)
}

fn h1(s: &Settings, mu: Option<u64>, q: Option<u64>, group: Option<String>, frob: Option<u32>) -> anyhow::Result<Report> {
    let mut r = Report::new(String::new(), &["coefficients", "frobenius_power", "realizing_degree", "class_count"]);
    match (mu, group) {
        (Some(n), None) => {
            let q = q.context("--mu needs --q")?;
            s.check_field(q)?;
            let rep = h1_mu_n(q, n)?;
            r.title = format!("H1 of mu_{n} under x -> x^{q}");
            r.row(vec![rep.coefficients.clone(), q.to_string(), rep.realizing_degree.to_string(), rep.class_count.to_string()]);
            r.json = json!({
                "coefficients": rep.coefficients,
                "frobenius_power": q,
                "realizing_degree": rep.realizing_degree,
                "class_count": rep.class_count,
                "reps": rep.reps,
                "gcd": rep.gcd,
                "power_class_count": rep.power_class_count,
                "field_count": rep.field_count,
                "inflation_count": rep.inflation_count,
                "agrees": rep.agrees(),
            });
        }
        (None, Some(spec)) => {
            let d = frob.context("--group needs --frobenius")?;
            let g = s.group(&spec)?;
            let t = frobenius_twist(&g, d)?;
            let classes = twisted_classes(&t);
            let power = (g.field().p() as u64).pow(d);
            let reps: Vec<Mat> = classes.reps.iter().map(|&x| g.element(x)).collect();
            r.title = format!("twisted classes of {} under x -> x^{power}", g.name());
            r.row(vec![g.name(), power.to_string(), classes.realizing_degree.to_string(), classes.size.to_string()]);
            r.json = json!({
                "coefficients": g.name(),
                "frobenius_power": power,
                "realizing_degree": classes.realizing_degree,
                "class_count": classes.size,
                "reps": reps,
            });
        }
        _ => bail!(Error::Parse { token: "h1".into(), reason: "give either --mu and --q or --group and --frobenius".into() }),
    }
    Ok(r)
}

fn experiment_report(title: String, exps: &[paperlab::Experiment]) -> Report {
    let mut r = Report::new(title, &["id", "name", "params", "predicted", "computed", "verdict"]);
    for e in exps {
        r.row(vec![
            e.id.clone(),
            e.name.clone(),
            e.params.to_string(),
            e.predicted.as_ref().map_or("-".into(), |p| p.value.to_string()),
            e.computed.to_string(),
            e.verdict.to_string(),
        ]);
    }
    r
}

fn run(cli: &Cli) -> anyhow::Result<(Report, bool)> {
    let s = Settings { max_group: cli.max_group, max_field: cli.max_field, allow_bad: cli.allow_bad_characteristic };
    Ok(match &cli.command {
        Command::Zclasses { group, filter } => (zclasses(&s, group, *filter)?, true),
        Command::Centralizer { group, element } => (centralizer_cmd(&s, group, element)?, true),
        Command::Conjtest { group, e1, e2, sl } => (conjtest(&s, group, e1, e2, *sl)?, true),
        Command::Probe { family, q, r, pairs } => (probe(&s, family, *q, *r, pairs)?, true),
        Command::H1 { mu, q, group, frobenius } => (h1(&s, *mu, *q, group.clone(), *frobenius)?, true),
        Command::Experiment { id, params } => {
            let e = paperlab::run_experiment(id, &Params::parse(params)?)?;
            let mut r = experiment_report(format!("experiment {}", e.id), std::slice::from_ref(&e));
            r.json = serde_json::to_value(&e)?;
            (r, e.verdict != Verdict::Fail)
        }
        Command::Verify { suite } => {
            let summary = paperlab::verify_suite(suite)?;
            let mut r = experiment_report(
                format!("suite {}: {} passed, {} failed, {} report-only", suite, summary.passed, summary.failed, summary.report_only),
                &summary.experiments,
            );
            r.json = serde_json::to_value(&summary)?;
            r.json["ok"] = json!(summary.ok());
            (r, summary.ok())
        }
        Command::Experiments => {
            let mut r = Report::new("experiment catalog".into(), &["id", "name", "defaults"]);
            for e in paperlab::catalog() {
                let d: Vec<String> = e.defaults.iter().map(|(k, v)| format!("{k}={v}")).collect();
                r.row(vec![e.id.into(), e.name.into(), d.join(" ")]);
            }
            r.json = json!(paperlab::catalog()
                .iter()
                .map(|e| json!({ "id": e.id, "name": e.name, "defaults": e.defaults.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect::<std::collections::BTreeMap<_, _>>() }))
                .collect::<Vec<_>>());
            (r, true)
        }
    })
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::BoundExceeded { .. }) => 3,
        Some(Error::Parse { .. } | Error::InvalidInput(_) | Error::CharacteristicGuard { .. } | Error::NotPrime(_)) => 2,
        Some(Error::DegreeMismatch { .. } | Error::IncompatibleFields(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let start = Instant::now();
    match run(&cli) {
        Ok((report, ok)) => {
            print!("{}", report.render(cli.format));
            if !cli.no_footer {
                eprintln!("runtime: {:.1} ms", start.elapsed().as_secs_f64() * 1e3);
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
