use std::thread;

use fmpartners_core::autoeq::{verify_closure, GAMMA0_CONVENTION};
use fmpartners_core::fm::CaseIReason;
use fmpartners_core::lattice::points_of_exact_order;
use fmpartners_core::modmath::mod_inverse;
use fmpartners_core::{
    classify_case, compute_h_bruteforce, euler_phi, factorize, fm_partners, gamma0_member,
    lift_residue, roots_n2_plus_1, roots_n2_plus_n_plus_1, subgroup_closure, subgroup_member,
    verify_lemma_fe, CurveClass, HGroup, IntMatrix2, Subgroup, TorsionPoint,
};
use serde_json::{json, Value};

use crate::input::{InputError, InputResult};
use crate::report::Report;

/// A finished command: its report and whether every assertion held.
pub struct Outcome {
    pub report: Report,
    pub passed: bool,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Outcome {
            report,
            passed: true,
        }
    }
}

fn positive_modulus(m: u64) -> InputResult<u64> {
    if m == 0 {
        return Err(InputError("modulus must be positive".into()));
    }
    Ok(m)
}

/// A point `(x, y)` with `0 ≤ x, y < m` of exact order `m`.
pub fn exact_point(c: CurveClass, m: u64, (x, y): (i64, i64)) -> InputResult<TorsionPoint> {
    positive_modulus(m)?;
    let in_range = |v: i64| v >= 0 && (v as u64) < m;
    if !in_range(x) || !in_range(y) {
        return Err(InputError(format!(
            "point ({x},{y}) out of range: coordinates must lie in [0, {m})"
        )));
    }
    let p = TorsionPoint::new(c, m, x, y)?;
    p.require_exact_order()?;
    Ok(p)
}

fn input_block(c: CurveClass, p: &TorsionPoint) -> Value {
    json!({
        "class": c,
        "m": p.modulus(),
        "point": [p.x(), p.y()],
    })
}

fn witnesses(h: &HGroup) -> Value {
    h.witnesses
        .iter()
        .map(|w| json!({"unit": w.unit, "multiplier": w.multiplier}))
        .collect()
}

fn reason_name(r: CaseIReason) -> &'static str {
    match r {
        CaseIReason::GenericClass => "generic_class",
        CaseIReason::NoCongruenceRoot => "no_congruence_root",
        CaseIReason::OutsideCyclicSubgroup => "outside_cyclic_subgroup",
    }
}

pub fn partners(c: CurveClass, m: u64, point: (i64, i64)) -> InputResult<Outcome> {
    let a = exact_point(c, m, point)?;
    let set = fm_partners(c, &a)?;
    let classes: Value = set
        .classes
        .iter()
        .map(|cl| {
            json!({
                "label": cl.label,
                "members": cl.members,
                "representative": cl.representative,
            })
        })
        .collect();
    let mut r = Report::new("partners");
    r.set("input", input_block(c, &a))
        .set("phi", set.phi)
        .set("h", set.h.elements())
        .set("h_order", set.h.order())
        .set("witnesses", witnesses(&set.h))
        .set("cardinality", set.cardinality())
        .set("classes", classes)
        .set("small_m_guard", set.small_m_guard);
    Ok(Outcome::ok(r))
}

pub fn classify(c: CurveClass, m: u64, point: (i64, i64)) -> InputResult<Outcome> {
    let a = exact_point(c, m, point)?;
    let brute = compute_h_bruteforce(c, &a)?;
    let mut r = Report::new("classify");
    r.set("input", input_block(c, &a))
        .set("j_invariant", c.j_invariant())
        .set("h_bruteforce", brute.elements());
    if m <= 3 {
        r.set("case", Value::Null)
            .set("note", "lemma not applicable (m <= 3)");
        return Ok(Outcome::ok(r));
    }
    let report = classify_case(c, &a)?;
    let agree = report.h.elements() == brute.elements();
    r.set("case", report.case.to_string())
        .set("reason", report.reason.map(reason_name))
        .set("roots", report.roots.clone())
        .set("n", report.n)
        .set("generator", report.generator.map(|g| vec![g.x(), g.y()]))
        .set("multiple", report.multiple)
        .set("h", report.h.elements())
        .set("agree", agree);
    Ok(Outcome {
        report: r,
        passed: agree,
    })
}

pub fn hgroup(c: CurveClass, m: u64, point: (i64, i64)) -> InputResult<Outcome> {
    let a = exact_point(c, m, point)?;
    let h = compute_h_bruteforce(c, &a)?;
    let mut r = Report::new("hgroup");
    r.set("input", input_block(c, &a))
        .set("h", h.elements())
        .set("order", h.order())
        .set("index", euler_phi(m) / h.order() as u64)
        .set("witnesses", witnesses(&h));
    let mut passed = true;
    if c.is_cm() {
        let t = verify_lemma_fe(c, &a)?;
        passed = t.passed();
        let g = t.dual_kernel.generator;
        let basis: Vec<Vec<String>> = t
            .overlattice
            .basis()
            .iter()
            .map(|v| v.iter().map(|q| q.to_string()).collect())
            .collect();
        let checks: Value = t
            .checks
            .iter()
            .map(|ch| json!({"name": ch.name, "passed": ch.passed}))
            .collect();
        r.set(
            "dual",
            json!({
                "overlattice_basis": basis,
                "overlattice_determinant": t.overlattice.determinant().to_string(),
                "index": t.index,
                "cm_stable": t.cm_stable,
                "kernel_generator": [g.x(), g.y()],
                "kernel_value": t.dual_kernel_value.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
                "h": t.h_target.elements(),
                "checks": checks,
                "passed": passed,
            }),
        );
    }
    Ok(Outcome { report: r, passed })
}

pub fn roots(m: u64, class: Option<CurveClass>) -> InputResult<Outcome> {
    positive_modulus(m)?;
    if class == Some(CurveClass::Generic) {
        return Err(InputError(
            "the generic class has no CM congruence; use square or hexagonal".into(),
        ));
    }
    let block = |roots: Vec<u64>, poly: &str| {
        json!({
            "polynomial": poly,
            "roots": roots,
            "count": roots.len(),
            "solvable": !roots.is_empty(),
        })
    };
    let factors: Value = factorize(m)
        .factors()
        .iter()
        .map(|&(p, e)| json!({"prime": p, "exponent": e}))
        .collect();
    let mut r = Report::new("roots");
    r.set("m", m).set("factorization", factors);
    if class != Some(CurveClass::Hexagonal) {
        r.set("square", block(roots_n2_plus_1(m), "n^2+1"));
    }
    if class != Some(CurveClass::Square) {
        r.set("hexagonal", block(roots_n2_plus_n_plus_1(m), "n^2+n+1"));
    }
    Ok(Outcome::ok(r))
}

#[derive(Debug, Clone)]
struct Counterexample {
    class: CurveClass,
    m: u64,
    point: (u64, u64),
    detail: String,
}

#[derive(Debug, Default)]
struct Tally {
    checked: usize,
    failures: Vec<Counterexample>,
}

impl Tally {
    fn record(&mut self, ok: bool, fail: impl FnOnce() -> Counterexample) {
        self.checked += 1;
        if !ok {
            self.failures.push(fail());
        }
    }

    fn absorb(&mut self, other: Tally) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
    }
}

const SECTIONS: [&str; 4] = ["trichotomy", "cardinality", "transfer", "small_m"];

fn verify_one(c: CurveClass, m: u64) -> [Tally; 4] {
    let mut t: [Tally; 4] = Default::default();
    for a in points_of_exact_order(c, m) {
        let cx = |detail: String| Counterexample {
            class: c,
            m,
            point: a.coords(),
            detail,
        };
        let brute = compute_h_bruteforce(c, &a);
        if m >= 4 {
            match (&brute, classify_case(c, &a)) {
                (Ok(h), Ok(rep)) => {
                    let ok = h.elements() == rep.h.elements() && matches!(h.order(), 2 | 4 | 6);
                    t[0].record(ok, || {
                        cx(format!(
                            "brute {:?} vs case {} {:?}",
                            h.elements(),
                            rep.case,
                            rep.h.elements()
                        ))
                    });
                }
                (b, r) => t[0].record(false, || {
                    cx(format!("{:?} / {:?}", b.as_ref().err(), r.err()))
                }),
            }
            match (&brute, fm_partners(c, &a)) {
                (Ok(h), Ok(p)) => {
                    let ok = (p.cardinality() * h.order()) as u64 == euler_phi(m);
                    t[1].record(ok, || {
                        cx(format!(
                            "{} x {} != phi = {}",
                            p.cardinality(),
                            h.order(),
                            euler_phi(m)
                        ))
                    });
                }
                (_, r) => t[1].record(false, || cx(format!("{:?}", r.err()))),
            }
        } else {
            let ok = matches!(fm_partners(c, &a), Ok(p) if p.cardinality() == 1);
            t[3].record(ok, || cx("partner set is not a singleton".into()));
        }
        if c.is_cm() {
            match verify_lemma_fe(c, &a) {
                Ok(rep) => {
                    let failed: Vec<&str> = rep.failures().map(|ch| ch.name).collect();
                    t[2].record(failed.is_empty(), || {
                        cx(format!("failed checks: {}", failed.join(", ")))
                    });
                }
                Err(e) => t[2].record(false, || cx(e.to_string())),
            }
        }
    }
    t
}

const MAX_LISTED: usize = 20;

pub fn verify(
    min_m: u64,
    max_m: u64,
    classes: &[CurveClass],
    threads: usize,
) -> InputResult<Outcome> {
    positive_modulus(min_m)?;
    if max_m < min_m {
        return Err(InputError(format!(
            "empty range: --min-m {min_m} > --max-m {max_m}"
        )));
    }
    if classes.is_empty() {
        return Err(InputError("no curve classes selected".into()));
    }
    let mut jobs: Vec<(CurveClass, u64)> = classes
        .iter()
        .flat_map(|&c| (min_m..=max_m).map(move |m| (c, m)))
        .collect();
    // large moduli first keeps the workers balanced
    jobs.sort_by_key(|&(c, m)| (std::cmp::Reverse(m), c));
    let threads = threads.max(1).min(jobs.len());

    let mut totals: [Tally; 4] = Default::default();
    thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let mine: Vec<(CurveClass, u64)> =
                    jobs.iter().copied().skip(w).step_by(threads).collect();
                s.spawn(move || {
                    let mut acc: [Tally; 4] = Default::default();
                    for (c, m) in mine {
                        for (a, t) in acc.iter_mut().zip(verify_one(c, m)) {
                            a.absorb(t);
                        }
                    }
                    acc
                })
            })
            .collect();
        for h in handles {
            for (a, t) in totals.iter_mut().zip(h.join().expect("worker panicked")) {
                a.absorb(t);
            }
        }
    });

    let mut passed = true;
    let mut sections = Vec::new();
    for (name, mut t) in SECTIONS.iter().zip(totals) {
        t.failures.sort_by_key(|a| (a.class, a.m, a.point));
        passed &= t.failures.is_empty();
        let listed: Vec<Value> = t
            .failures
            .iter()
            .take(MAX_LISTED)
            .map(|f| {
                json!({
                    "class": f.class,
                    "m": f.m,
                    "point": [f.point.0, f.point.1],
                    "detail": f.detail,
                })
            })
            .collect();
        sections.push(json!({
            "name": name,
            "checked": t.checked,
            "failed": t.failures.len(),
            "passed": t.failures.is_empty(),
            "counterexamples": listed,
        }));
    }
    let mut r = Report::new("verify");
    r.set(
        "input",
        json!({"min_m": min_m, "max_m": max_m, "classes": classes}),
    )
    .set("sections", sections)
    .set("passed", passed);
    Ok(Outcome { report: r, passed })
}

pub enum HSpec {
    Residues(Vec<u64>),
    FromPoint(CurveClass, u64, i64, i64),
}

pub struct AutoeqArgs {
    pub m: Option<u64>,
    pub h: HSpec,
    pub matrix: IntMatrix2,
    pub lift: bool,
    pub closure_samples: usize,
    pub seed: u64,
}

pub fn autoeq(args: AutoeqArgs) -> InputResult<Outcome> {
    let (m, h, source): (u64, Subgroup, Value) = match args.h {
        HSpec::Residues(rs) => {
            let m = positive_modulus(
                args.m
                    .ok_or_else(|| InputError("--m is required with explicit residues".into()))?,
            )?;
            let reduced: Vec<u64> = rs.iter().map(|r| r % m).collect();
            if let Some(&bad) = reduced.iter().find(|&&r| mod_inverse(r, m).is_none()) {
                return Err(InputError(format!("residue {bad} is not coprime to {m}")));
            }
            (
                m,
                subgroup_closure(m, &reduced)?,
                json!({"residues": reduced}),
            )
        }
        HSpec::FromPoint(c, pm, x, y) => {
            if let Some(m) = args.m {
                if m != pm {
                    return Err(InputError(format!(
                        "--m {m} disagrees with the point modulus {pm}"
                    )));
                }
            }
            let a = exact_point(c, pm, (x, y))?;
            let h = compute_h_bruteforce(c, &a)?;
            (pm, h.subgroup, json!({"point": input_block(c, &a)}))
        }
    };
    let mat = args.matrix;
    let residue = mat.residue(m);
    let mut r = Report::new("autoeq");
    r.set("m", m)
        .set("convention", GAMMA0_CONVENTION)
        .set("h_source", source)
        .set("h", h.elements())
        .set(
            "matrix",
            json!({"c": mat.c, "a": mat.a, "d": mat.d, "b": mat.b}),
        )
        .set(
            "det",
            i64::try_from(mat.det())
                .map_or_else(|_| Value::from(mat.det().to_string()), Value::from),
        )
        .set("gamma0", gamma0_member(&mat, m))
        .set("residue", residue)
        .set("member", subgroup_member(&mat, m, &h));
    if args.lift {
        let l = lift_residue(residue, m)?;
        r.set("lift", json!({"c": l.c, "a": l.a, "d": l.d, "b": l.b}));
    }
    let mut passed = true;
    if args.closure_samples > 0 {
        let c = verify_closure(m, &h, args.closure_samples, args.seed);
        passed = c.passed();
        r.set(
            "closure",
            json!({
                "seed": args.seed,
                "products_checked": c.products_checked,
                "inverses_checked": c.inverses_checked,
                "failures": c.failures.len(),
                "passed": passed,
            }),
        );
    }
    Ok(Outcome { report: r, passed })
}
