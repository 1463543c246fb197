//! One function per command; each maps the selected instances to JSON results.

use std::collections::BTreeMap;

use asymlab::covering::{self, CenterSource};
use asymlab::duality::{self, Functional, PolarBall};
use asymlab::geometry::BallSample;
use asymlab::quasimetric::QuasiMetric;
use asymlab::sequences::{self, SequencePrefix};
use asymlab::{LinOperator, NormChoice};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bundle::{Bundle, Points};
use crate::error::{CliError, CliResult};
use crate::{suite, Command, InstanceResult};

pub const DEFAULT_SWEEP: [f64; 4] = [0.25, 0.5, 1.0, 2.0];

#[derive(Debug, Clone)]
pub struct Context {
    pub seed: u64,
    pub tol: f64,
    pub epsilons: Vec<f64>,
    pub grid_density: usize,
}

impl Context {
    fn require_eps(&self, cmd: Command) -> CliResult<&[f64]> {
        if self.epsilons.is_empty() {
            return Err(CliError::Usage(format!("{} needs at least one --epsilon", cmd.name())));
        }
        Ok(&self.epsilons)
    }
}

pub struct Output {
    pub results: Vec<InstanceResult>,
    /// Present for commands with a tabular form.
    pub csv: Option<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

/// A mathematical failure inside one instance is part of the report, not an
/// operational error.
fn or_error(r: asymlab::Result<Value>) -> Value {
    r.unwrap_or_else(|e| json!({ "error": e.to_string() }))
}

/// Instances of one section in id order, narrowed by `--id`.
fn select<'a, T: Sync>(map: &'a BTreeMap<String, T>, id: Option<&str>) -> CliResult<Vec<(&'a String, &'a T)>> {
    match id {
        None => Ok(map.iter().collect()),
        Some(id) => map
            .get_key_value(id)
            .map(|kv| vec![kv])
            .ok_or_else(|| CliError::Unresolved(format!("no instance `{id}` for this command"))),
    }
}

fn run_each<T: Sync>(items: Vec<(&String, &T)>, f: impl Fn(&T) -> CliResult<Value> + Sync) -> CliResult<Vec<InstanceResult>> {
    items
        .into_par_iter()
        .map(|(id, item)| Ok(InstanceResult { id: id.clone(), result: f(item)? }))
        .collect()
}

pub fn dispatch(
    cmd: Command,
    bundle: Option<&Bundle>,
    id: Option<&str>,
    trials: Option<usize>,
    ctx: &Context,
) -> CliResult<Output> {
    if cmd == Command::PropertySuite {
        let summaries = suite::run(ctx.seed, ctx.tol, trials);
        let results = summaries
            .iter()
            .map(|s| InstanceResult { id: s.check.to_string(), result: to_value(s) })
            .filter(|r| id.is_none_or(|id| id == r.id))
            .collect::<Vec<_>>();
        if let (Some(id), true) = (id, results.is_empty()) {
            return Err(CliError::Unresolved(format!("no check `{id}`")));
        }
        return Ok(Output { results, csv: None });
    }
    let b = bundle.ok_or_else(|| CliError::Usage("--input is required for this command".into()))?;
    let results = match cmd {
        Command::ValidateNorm => validate_norm(b, id)?,
        Command::Eval => run_each(select(&b.point_sets, id)?, |p| Ok(eval(p)))?,
        Command::OpNorm => run_each(select(&b.operators, id)?, |a| Ok(op_norm(a)))?,
        Command::CheckBounded => run_each(select(&b.operators, id)?, |a| {
            let (bounded, beta) = a.is_bounded(NormChoice::Base, NormChoice::Base);
            Ok(json!({ "bounded": bounded, "beta": beta }))
        })?,
        Command::CheckCompact => run_each(select(&b.operators, id)?, |a| Ok(check_compact(a, ctx)))?,
        Command::BuildNet => {
            let eps = ctx.require_eps(cmd)?;
            run_each(select(&b.point_sets, id)?, |p| Ok(build_net(p, eps)))?
        }
        Command::CoverVsNet => return cover_vs_net(b, id, ctx),
        Command::ClassifySequence => {
            let eps = ctx.require_eps(cmd)?;
            run_each(select(&b.sequences, id)?, |s| Ok(classify(s, eps)))?
        }
        Command::Polar => run_each(select(&b.norms, id)?, |p| {
            Ok(or_error(PolarBall::new(p, ctx.tol).map(|pb| json!({ "vertices": pb.vertices }))))
        })?,
        Command::DualOp => run_each(select(&b.operators, id)?, |a| Ok(dual_op(a, &b.functionals, ctx)))?,
        Command::SchauderCheck => {
            let eps = ctx.require_eps(cmd)?;
            run_each(select(&b.operators, id)?, |a| Ok(schauder(a, eps, ctx)))?
        }
        Command::PropertySuite => unreachable!("handled above"),
    };
    Ok(Output { results, csv: None })
}

fn validate_norm(b: &Bundle, id: Option<&str>) -> CliResult<Vec<InstanceResult>> {
    let norms = match id {
        Some(id) if !b.norms.contains_key(id) => Vec::new(),
        _ => select(&b.norms, id)?,
    };
    let tables = match id {
        Some(id) if !b.tabular.contains_key(id) => Vec::new(),
        _ => select(&b.tabular, id)?,
    };
    if let (Some(id), true, true) = (id, norms.is_empty(), tables.is_empty()) {
        return Err(CliError::Unresolved(format!("no norm or table `{id}`")));
    }
    let mut out = run_each(norms, |p| Ok(to_value(&p.validate())))?;
    out.extend(run_each(tables, |t| {
        Ok(json!({ "valid": true, "points": t.len(), "strict": t.is_strict(), "triangle_check": t.triangle_check() }))
    })?);
    out.sort_by(|x, y| x.id.cmp(&y.id));
    Ok(out)
}

fn label_of(p: &Points) -> impl Fn(&usize) -> Value + '_ {
    move |i| match p {
        Points::Labels { metric, .. } => json!(metric.labels()[*i]),
        Points::Vectors { .. } => json!(i),
    }
}

fn eval(p: &Points) -> Value {
    match p {
        Points::Vectors { metric, points, .. } => {
            let norm = &metric.norm;
            let conj = norm.conjugate();
            let rows: Vec<Value> = points
                .iter()
                .map(|x| {
                    let p = norm.eval(x).expect("dimension checked at load");
                    let pbar = conj.eval(x).expect("dimension checked at load");
                    json!({ "x": x, "p": p, "pbar": pbar, "ps": p.max(pbar) })
                })
                .collect();
            json!({ "points": rows })
        }
        Points::Labels { metric, points, .. } => {
            let labels: Vec<Value> = points.iter().map(label_of(p)).collect();
            let matrix: Vec<Vec<f64>> =
                points.iter().map(|x| points.iter().map(|y| metric.dist(x, y)).collect()).collect();
            json!({ "labels": labels, "distances": matrix })
        }
    }
}

fn op_norm(a: &LinOperator) -> Value {
    json!({
        "report": a.norm_report(),
        "attainment": a.op_norm_detail(NormChoice::Base, NormChoice::Base),
    })
}

fn check_compact(a: &LinOperator, ctx: &Context) -> Value {
    let verdict = a.is_compact(NormChoice::Base, NormChoice::Base);
    let mut out = to_value(&verdict);
    if verdict.compact && !ctx.epsilons.is_empty() {
        let sample = BallSample::standard(a.domain(), ctx.seed);
        let nets: Vec<Value> = ctx.epsilons.iter().map(|&e| or_error(verdict.net(a, &sample, e).map(|n| to_value(&n)))).collect();
        out["nets"] = Value::Array(nets);
    }
    out
}

fn net_entry<M: QuasiMetric>(
    m: &M,
    points: &[M::Point],
    pool: Option<&[M::Point]>,
    eps: f64,
    show: impl Fn(&M::Point) -> Value,
) -> Value {
    let source = pool.map_or(CenterSource::Set, CenterSource::Pool);
    let greedy = covering::greedy_net(m, points, eps, source, false).map(|c| {
        json!({
            "size": c.len(),
            "centers": c.centers.iter().map(&show).collect::<Vec<_>>(),
            "assignment": c.assignment,
            "max_distance": c.max_distance,
        })
    });
    let exact = (points.len() <= covering::NET_EXACT_LIMIT).then(|| {
        or_error(covering::min_net(m, points, eps).map(|c| {
            json!({ "size": c.len(), "centers": c.centers.iter().map(&show).collect::<Vec<_>>(), "assignment": c.assignment })
        }))
    });
    json!({ "epsilon": eps, "greedy": or_error(greedy), "exact": exact })
}

fn build_net(p: &Points, eps: &[f64]) -> Value {
    let nets: Vec<Value> = match p {
        Points::Vectors { metric, points, pool, .. } => {
            eps.iter().map(|&e| net_entry(metric, points, pool.as_deref(), e, |x| json!(x))).collect()
        }
        Points::Labels { metric, points, pool, .. } => {
            eps.iter().map(|&e| net_entry(metric, points, pool.as_deref(), e, label_of(p))).collect()
        }
    };
    json!({ "nets": nets })
}

fn cover_vs_net(b: &Bundle, id: Option<&str>, ctx: &Context) -> CliResult<Output> {
    let eps: &[f64] = if ctx.epsilons.is_empty() { &DEFAULT_SWEEP } else { &ctx.epsilons };
    let rows = |p: &Points| -> CliResult<Vec<covering::SweepRow>> {
        let rows = match p {
            Points::Vectors { metric, points, .. } => covering::sweep(metric, points, eps),
            Points::Labels { metric, points, .. } => covering::sweep(metric, points, eps),
        };
        rows.map_err(|e| CliError::Malformed(e.to_string()))
    };
    let per_set: Vec<(String, Vec<covering::SweepRow>)> = select(&b.point_sets, id)?
        .into_par_iter()
        .map(|(id, p)| Ok((id.clone(), rows(p)?)))
        .collect::<CliResult<_>>()?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record(["id", "epsilon", "net_size_greedy", "net_size_exact", "cover_size_exact"]).map_err(io)?;
    let opt = |v: Option<usize>| v.map(|n| n.to_string()).unwrap_or_default();
    for (id, rows) in &per_set {
        for r in rows {
            w.write_record([
                id.clone(),
                r.epsilon.to_string(),
                r.net_size_greedy.to_string(),
                opt(r.net_size_exact),
                opt(r.cover_size_exact),
            ])
            .map_err(io)?;
        }
    }
    let csv = String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.into_error()))?).expect("csv is utf-8");
    let results = per_set.into_iter().map(|(id, rows)| InstanceResult { id, result: json!({ "rows": rows }) }).collect();
    Ok(Output { results, csv: Some(csv) })
}

fn classify_entry<M: QuasiMetric>(m: &M, points: &[M::Point], pool: Option<&[M::Point]>, eps: f64) -> Value
where
    M::Point: PartialEq,
{
    or_error((|| {
        let mut s = SequencePrefix::new(m, points.to_vec())?;
        if let Some(pool) = pool {
            s = s.with_pool(pool.to_vec());
        }
        let report = sequences::classify(&s, eps)?;
        let violations = sequences::check_chain(&report);
        Ok(json!({ "report": report, "chain_violations": violations }))
    })())
}

fn classify(p: &Points, eps: &[f64]) -> Value {
    let runs: Vec<Value> = match p {
        Points::Vectors { metric, points, pool, .. } => {
            eps.iter().map(|&e| classify_entry(metric, points, pool.as_deref(), e)).collect()
        }
        Points::Labels { metric, points, pool, .. } => {
            eps.iter().map(|&e| classify_entry(metric, points, pool.as_deref(), e)).collect()
        }
    };
    json!({ "runs": runs })
}

fn dual_op(a: &LinOperator, functionals: &BTreeMap<String, Functional>, ctx: &Context) -> Value {
    let images: BTreeMap<&String, Value> = functionals
        .iter()
        .filter(|(_, psi)| psi.dim() == a.codomain().dim())
        .map(|(id, psi)| {
            let v = or_error((|| {
                let image = duality::dual_operator(a, psi)?;
                Ok(json!({
                    "image": image.covector,
                    "norm": duality::func_norm(psi, a.codomain())?,
                    "image_norm": duality::func_norm(&image, a.domain())?,
                }))
            })());
            (id, v)
        })
        .collect();
    let eps: &[f64] = if ctx.epsilons.is_empty() { &[1.0] } else { &ctx.epsilons };
    let radii: Vec<Value> = eps
        .iter()
        .map(|&e| match duality::dual_continuity_radius(a, e) {
            Ok(r) => json!({ "epsilon": e, "delta": r }),
            Err(asymlab::Error::Unbounded) => json!({ "epsilon": e, "delta": "unbounded" }),
            Err(err) => json!({ "epsilon": e, "error": err.to_string() }),
        })
        .collect();
    json!({ "functionals": images, "continuity": radii })
}

fn schauder(a: &LinOperator, eps: &[f64], ctx: &Context) -> Value {
    let verdict = a.is_compact(NormChoice::Base, NormChoice::Base);
    if !verdict.compact {
        return json!({ "rejected": "not compact", "witness": verdict.witness_ray });
    }
    let runs: Vec<Value> = eps
        .iter()
        .map(|&e| or_error(duality::schauder_certificate(a, e, ctx.grid_density, ctx.tol).map(|r| to_value(&r))))
        .collect();
    json!({ "runs": runs })
}

