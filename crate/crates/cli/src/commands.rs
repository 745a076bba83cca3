use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hassett_core::arith::{q, Rational};
use hassett_core::chamber::{
    default_cache_path, enumerate_chambers, load_cache, save_cache, Chamber, ChamberSet, ChamberType,
    Classification, Weight,
};
use hassett_core::dp5::{
    contraction_dag, identify_surface, surviving_minus_one_curves, table1_minus_one_count, ContractionPlan,
};
use hassett_core::git::{
    classify_configuration, d_set_of, is_typical, match_chamber, strictly_semistable_points, CollisionPattern,
    GitWeight,
};
use hassett_core::intersection::{all_vital_curves, intersect, pair, BoundaryIndex, VitalCurve};
use hassett_core::lc::{build_l, discrepancy_sym, identify_lc_model, verify_eq1, LcInput};
use hassett_core::marks::MarkSet;
use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::report::{to_value, RunReport};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or unusable paths; exit status 2.
    #[error("{0}")]
    Input(String),
    /// A library computation failed; exit status 1.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

fn failure(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

pub const CHAMBER_RANGE: std::ops::RangeInclusive<usize> = 4..=7;

/// Chambers for `n`, through the cache at `cache` or `$MODULI_CACHE_DIR`.
/// Cache status goes to stderr so reports do not depend on it.
pub fn load_chambers(n: usize, cache: Option<&Path>) -> Result<ChamberSet, CliError> {
    if !CHAMBER_RANGE.contains(&n) {
        return Err(CliError::Input(format!("n = {n} outside 4..=7")));
    }
    let path: Option<PathBuf> = cache.map(Path::to_path_buf).or_else(|| default_cache_path(n));
    if let Some(p) = &path {
        if p.exists() {
            match load_cache(n, p) {
                Ok(set) => {
                    eprintln!("cache: loaded {}", p.display());
                    return Ok(set);
                }
                Err(e) => eprintln!("cache: {e}; recomputing"),
            }
        }
    }
    let set = enumerate_chambers(n).map_err(failure)?;
    if let Some(p) = &path {
        save_cache(&set, p).map_err(|e| CliError::Input(format!("cannot write cache: {e}")))?;
        eprintln!("cache: wrote {}", p.display());
    }
    Ok(set)
}

fn five() -> Result<ChamberSet, CliError> {
    load_chambers(5, None)
}

fn type_letter(c: &Chamber) -> Option<String> {
    c.type_of().ok().map(|t| t.letter().to_string())
}

fn chamber_json(c: &Chamber) -> Value {
    let mut m = Map::new();
    m.insert("id".into(), json!(c.id));
    m.insert("signs".into(), json!(c.sign_string()));
    m.insert("representative".into(), to_value(c.representative.entries()));
    m.insert("d_set".into(), to_value(&c.d_set));
    m.insert("d".into(), json!(c.d_value()));
    if let Some(t) = type_letter(c) {
        m.insert("type".into(), json!(t));
    }
    Value::Object(m)
}

fn type_histogram(set: &ChamberSet) -> Result<BTreeMap<String, usize>, CliError> {
    Ok(set
        .count_by_type()
        .map_err(failure)?
        .into_iter()
        .map(|(t, k)| (t.letter().to_string(), k))
        .collect())
}

pub fn chambers(n: usize, count_only: bool, by_type: bool, cache: Option<&Path>) -> Result<RunReport, CliError> {
    if by_type && n != 5 {
        return Err(CliError::Input("--by-type requires n = 5".into()));
    }
    let set = load_chambers(n, cache)?;
    let mut report = RunReport::new("chambers", n)
        .input("n", n)
        .input("count_only", count_only)
        .input("by_type", by_type);
    let mut results = Map::new();
    results.insert("total".into(), json!(set.len()));
    if !count_only {
        let by_d: BTreeMap<String, usize> =
            set.count_by_d_value().into_iter().map(|(d, k)| (d.to_string(), k)).collect();
        results.insert("by_d_value".into(), to_value(by_d));
    }
    if by_type {
        results.insert("by_type".into(), to_value(type_histogram(&set)?));
    } else if !count_only {
        results.insert("chambers".into(), Value::Array(set.chambers.iter().map(chamber_json).collect()));
    }
    report.results = Value::Object(results);
    Ok(report)
}

pub fn classify(weights: &str, cache: Option<&Path>) -> Result<RunReport, CliError> {
    let w = Weight::parse(weights).map_err(input)?;
    let n = w.n();
    let set = load_chambers(n, cache)?;
    let mut report = RunReport::new("classify", n).input("weights", w.entries());
    report.results = match set.classify(&w).map_err(failure)? {
        Classification::Chamber(id) => {
            let c = &set.chambers[id];
            let mut m = Map::new();
            m.insert("status".into(), json!("chamber"));
            m.insert("chamber".into(), chamber_json(c));
            if n == 5 {
                m.insert("surface".into(), to_value(identify_surface(c).map_err(failure)?));
            }
            Value::Object(m)
        }
        Classification::OnWall(walls) => json!({"status": "on_wall", "walls": walls}),
    };
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Intersections,
    Eq1,
    Theorem,
    Table1,
    Section5,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Intersections => "intersections",
            Suite::Eq1 => "eq1",
            Suite::Theorem => "theorem",
            Suite::Table1 => "table1",
            Suite::Section5 => "section5",
        }
    }
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    claim: &'static str,
    passed: bool,
    detail: Value,
}

impl Check {
    fn new(name: impl Into<String>, claim: &'static str, passed: bool, detail: Value) -> Self {
        Check {
            name: name.into(),
            claim,
            passed,
            detail,
        }
    }
}

pub fn verify(suite: Suite, alpha: Option<Rational>, beta: Option<Rational>) -> Result<RunReport, CliError> {
    let mut report = RunReport::new("verify", 5).input("suite", suite.name());
    if let Some(a) = &alpha {
        report = report.input("alpha", a);
    }
    if let Some(b) = &beta {
        report = report.input("beta", b);
    }
    let checks = match suite {
        Suite::Intersections => verify_intersections()?,
        Suite::Eq1 => verify_eq1_suite(alpha, beta)?,
        Suite::Theorem => verify_theorem(alpha, beta)?,
        Suite::Table1 => verify_table1()?,
        Suite::Section5 => verify_section5(alpha)?,
    };
    let failed = checks.iter().filter(|c| !c.passed).count();
    report.passed = failed == 0;
    report.results = json!({
        "checks": checks,
        "passed": checks.len() - failed,
        "failed": failed,
    });
    Ok(report)
}

/// The five-marking vital curve whose two-element block is `d`.
fn curve_with_doubleton(curves: &[VitalCurve], d: MarkSet) -> &VitalCurve {
    curves
        .iter()
        .find(|c| c.doubleton() == Some(d))
        .expect("every pair is the doubleton of one curve")
}

fn verify_intersections() -> Result<Vec<Check>, CliError> {
    let rows = BoundaryIndex::all(5).map_err(failure)?;
    let curves = all_vital_curves(5).map_err(failure)?;
    let mut matrix = Vec::new();
    let mut matches = true;
    for j in &rows {
        let mut row = Vec::new();
        for i in &rows {
            let c = curve_with_doubleton(&curves, i.subset());
            let v = intersect(j, c).map_err(failure)?;
            let expected = if i == j {
                q(-1, 1)
            } else if i.subset().is_disjoint(j.subset()) {
                q(1, 1)
            } else {
                q(0, 1)
            };
            matches &= v == expected;
            row.push(v);
        }
        matrix.push(row);
    }
    let mut checks = vec![Check::new(
        "pairing_matrix",
        "D_J . C_I equals Petersen adjacency minus identity",
        matches,
        json!({"rows": rows, "matrix": matrix}),
    )];

    let d45 = MarkSet::of(&[4, 5]);
    let c = curve_with_doubleton(&curves, d45);
    let own = intersect(&BoundaryIndex::of(5, &[4, 5]).map_err(failure)?, c).map_err(failure)?;
    checks.push(Check::new(
        "self_pairing",
        "D_{4,5} . C({1}{2}{3}{4,5}) = -1",
        own == q(-1, 1),
        json!({"curve": c, "value": own}),
    ));
    let mut sum = Rational::zero();
    for j in rows.iter().filter(|j| j.subset().is_disjoint(d45)) {
        sum += intersect(j, c).map_err(failure)?;
    }
    checks.push(Check::new(
        "neighbour_sum",
        "sum of D_J . C over the three J disjoint from {4,5} is 3",
        sum == q(3, 1),
        json!({"value": sum}),
    ));

    for n in 4..=7 {
        let mut pairs = 0usize;
        let mut error = None;
        'outer: for j in BoundaryIndex::all(n).map_err(failure)? {
            for c in all_vital_curves(n).map_err(failure)? {
                match intersect(&j, &c) {
                    Ok(_) => pairs += 1,
                    Err(e) => {
                        error = Some(e.to_string());
                        break 'outer;
                    }
                }
            }
        }
        checks.push(Check::new(
            format!("anchor_independence_n{n}"),
            "every boundary/curve pairing is independent of the anchor marking",
            error.is_none(),
            json!({"pairs": pairs, "error": error}),
        ));
    }
    Ok(checks)
}

fn eq1_samples(alpha: Option<Rational>, beta: Option<Rational>) -> Vec<(Rational, Rational)> {
    if alpha.is_none() && beta.is_none() {
        let b = q(2, 3);
        return vec![
            (q(1, 1), q(3, 5)),
            (q(1, 1), q(3, 4)),
            (q(3, 1) * b.clone() - q(1, 1), b),
            (q(0, 1), q(3, 5)),
            (q(1, 2), q(3, 4)),
        ];
    }
    vec![(alpha.unwrap_or_else(|| q(1, 1)), beta.unwrap_or_else(|| q(3, 4)))]
}

fn verify_eq1_suite(alpha: Option<Rational>, beta: Option<Rational>) -> Result<Vec<Check>, CliError> {
    let set = five()?;
    let mut checks = Vec::new();
    for (a, b) in eq1_samples(alpha, beta) {
        let sign_ok = !(a.clone() - q(3, 1) * b.clone() + q(1, 1)).is_negative();
        let mut holds = 0usize;
        let mut effective = 0usize;
        let mut flags_ok = true;
        let mut failing = Vec::new();
        for c in &set.chambers {
            let r = verify_eq1(&LcInput::uniform(c, &a, b.clone()).map_err(failure)?).map_err(failure)?;
            if r.holds {
                holds += 1;
            } else {
                failing.push(c.id);
            }
            if r.effective {
                effective += 1;
            }
            flags_ok &= r.effective == (c.d_set.is_empty() || sign_ok);
        }
        checks.push(Check::new(
            format!("eq1 alpha={a} beta={b}"),
            "pullback identity holds on every chamber; residual effective iff alpha - 3 beta + 1 >= 0",
            failing.is_empty() && flags_ok,
            json!({
                "chambers": set.len(),
                "holds": holds,
                "effective": effective,
                "failing": failing,
                "alpha_minus_3beta_plus_1_nonnegative": sign_ok,
            }),
        ));
    }
    Ok(checks)
}

fn verify_theorem(alpha: Option<Rational>, beta: Option<Rational>) -> Result<Vec<Check>, CliError> {
    let half = q(1, 2);
    if let Some(b) = &beta {
        if *b <= half {
            return Err(CliError::Input(format!("--beta {b} must exceed 1/2")));
        }
    }
    let set = five()?;
    let a = alpha.unwrap_or_else(|| q(1, 1));
    let betas = match &beta {
        Some(b) => vec![b.clone()],
        None => vec![q(3, 5), q(3, 4), q(1, 1)],
    };
    let mut checks = Vec::new();
    for b in betas {
        let mut certified = 0usize;
        let mut in_range = 0usize;
        let mut boundary = 0usize;
        let mut failing = Vec::new();
        for c in &set.chambers {
            let v = identify_lc_model(&LcInput::uniform(c, &a, b.clone()).map_err(failure)?).map_err(failure)?;
            if v.certified() {
                certified += 1;
            } else {
                failing.push(c.id);
            }
            in_range += usize::from(v.in_range);
            boundary += usize::from(v.boundary);
        }
        checks.push(Check::new(
            format!("certificates beta={b}"),
            "L(beta) pairs to zero exactly on curves with doubleton in D and positively elsewhere",
            failing.is_empty(),
            json!({
                "alpha": a,
                "chambers": set.len(),
                "certified": certified,
                "in_range": in_range,
                "boundary": boundary,
                "failing": failing,
            }),
        ));
    }
    if beta.is_none() {
        let curves = all_vital_curves(5).map_err(failure)?;
        let mut zero = true;
        let mut negative = true;
        for c in &set.chambers {
            let at_half = build_l(c, &half).map_err(failure)?;
            let low = build_l(c, &q(1, 3)).map_err(failure)?;
            for cv in &curves {
                zero &= pair(&at_half, cv).map_err(failure)?.is_zero();
            }
            let mut any = false;
            for cv in &curves {
                any |= pair(&low, cv).map_err(failure)?.is_negative();
            }
            negative &= any;
        }
        checks.push(Check::new(
            "vanishing beta=1/2",
            "L(1/2) pairs to zero with every curve",
            zero,
            Value::Null,
        ));
        checks.push(Check::new(
            "negative beta=1/3",
            "L(1/3) has a negative pairing on every chamber",
            negative,
            Value::Null,
        ));
    }
    Ok(checks)
}

fn verify_table1() -> Result<Vec<Check>, CliError> {
    let set = five()?;
    let mut groups: BTreeMap<ChamberType, Vec<&Chamber>> = BTreeMap::new();
    for c in &set.chambers {
        groups.entry(c.type_of().map_err(failure)?).or_default().push(c);
    }
    let mut checks = Vec::new();
    for (t, members) in groups {
        let mut observed = Vec::new();
        let mut ok = true;
        let mut surface = None;
        for c in &members {
            let plan = ContractionPlan::of_chamber(c).map_err(failure)?;
            let survivors = surviving_minus_one_curves(&plan).count;
            let s = identify_surface(c).map_err(failure)?;
            ok &= s.degree == 5 + c.d_value()
                && table1_minus_one_count(s.degree, s.deg8_kind) == Some(survivors);
            if !observed.contains(&survivors) {
                observed.push(survivors);
            }
            surface.get_or_insert(s);
        }
        ok &= observed.len() == 1;
        checks.push(Check::new(
            format!("type {}", t.letter()),
            "surviving (-1)-curves match the del Pezzo count for the degree",
            ok,
            json!({"chambers": members.len(), "surface": surface, "survivors": observed}),
        ));
    }
    Ok(checks)
}

const DISCREPANCY_CASES: [(usize, usize, usize); 4] = [(7, 3, 1), (9, 3, 1), (9, 4, 1), (9, 4, 2)];

fn verify_section5(alpha: Option<Rational>) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for (n, k, l) in DISCREPANCY_CASES {
        let lo = q(2, k as i64 + 2);
        let hi = q(2, k as i64 + 1);
        let alphas: Vec<Rational> = match &alpha {
            Some(a) if *a > lo && *a <= hi => vec![a.clone()],
            Some(_) => continue,
            None => (1..=5).map(|i| lo.clone() + (hi.clone() - lo.clone()) * q(i, 5)).collect(),
        };
        for a in alphas {
            let d = discrepancy_sym(n, k, l, &a).map_err(failure)?;
            checks.push(Check::new(
                format!("discrepancy n={n} k={k} l={l} alpha={a}"),
                "discrepancy is supported on contracted levels with nonnegative coefficients",
                d.exceptional && d.effective,
                to_value(&d.levels),
            ));
        }
        let end = discrepancy_sym(n, k, l, &hi).map_err(failure)?;
        let top = end.levels.iter().find(|c| c.level == k).map(|c| c.derived.clone());
        checks.push(Check::new(
            format!("endpoint n={n} k={k} l={l}"),
            "coefficient at level k vanishes at alpha = 2/(k+1)",
            top.as_ref().is_some_and(Rational::is_zero),
            json!({"alpha": hi, "coefficient": top}),
        ));
    }
    if checks.is_empty() {
        return Err(CliError::Input("--alpha lies outside every (2/(k+2), 2/(k+1)] range".into()));
    }
    Ok(checks)
}

pub fn git(weights: &str, semistable: bool, match_five: bool) -> Result<RunReport, CliError> {
    let w = GitWeight::parse(weights).map_err(input)?;
    let pairs = strictly_semistable_points(&w);
    let mut report = RunReport::new("git", w.n())
        .input("weights", weights.split(',').map(str::trim).collect::<Vec<_>>())
        .input("semistable", semistable)
        .input("match", match_five);
    let mut results = Map::new();
    results.insert("normalized".into(), to_value(&w));
    results.insert("typical".into(), json!(is_typical(&w)));
    results.insert("semistable_pair_count".into(), json!(pairs.len()));
    let distinct = classify_configuration(&w, &CollisionPattern::distinct(w.n())).map_err(failure)?;
    results.insert("distinct_points".into(), to_value(distinct));
    if semistable {
        results.insert("semistable_pairs".into(), to_value(&pairs));
    }
    if match_five {
        let set = five()?;
        let id = match_chamber(&w, &set).map_err(input)?;
        let c = &set.chambers[id];
        results.insert("d_set".into(), to_value(d_set_of(&w).map_err(failure)?));
        results.insert("chamber".into(), chamber_json(c));
        results.insert("surface".into(), to_value(identify_surface(c).map_err(failure)?));
    }
    report.results = Value::Object(results);
    Ok(report)
}

pub fn dag(n: usize, dot: Option<&Path>) -> Result<RunReport, CliError> {
    if n != 5 {
        return Err(CliError::Input(format!("dag requires n = 5, got n = {n}")));
    }
    let set = five()?;
    let dag = contraction_dag(&set).map_err(failure)?;
    if let Some(p) = dot {
        std::fs::write(p, dag.to_dot()).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display())))?;
    }
    let sinks = dag.sinks();
    let mut sink_types: BTreeMap<String, usize> = BTreeMap::new();
    for s in &sinks {
        if let Some(t) = type_letter(&set.chambers[*s]) {
            *sink_types.entry(t).or_default() += 1;
        }
    }
    let root = set.find_by_d_set(&[]).map(|c| c.id);
    let mut report = RunReport::new("dag", 5).input("n", n);
    if let Some(p) = dot {
        report = report.input("dot", p.display().to_string());
    }
    report.results = json!({
        "vertices": dag.vertices.len(),
        "edges": dag.edges.len(),
        "sinks": sinks,
        "sink_types": sink_types,
        "type_a_out_degree": root.map(|r| dag.out_degree(r)),
    });
    Ok(report)
}
