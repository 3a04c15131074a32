use std::fmt::Write as _;
use std::io::Write;

use serde_json::{json, Value};
use tdesign::graph::{census, census_closed_form, Census, CensusSource, OrbitInvariant, CENSUS_MAX_M};
use tdesign::markov::{
    lambda_q0_bound, lambda_q1, mixing_report, mixing_time_bound, q0_structure_check, q1_closed_form, q_empirical,
    singular_check_r, spectral_report, tv_curve, w1, w2, w2_eigenvalue_numer, ChainKind, TransitionMatrix,
};
use tdesign::sampler::{sample_batch, SamplerConfig, StepRule};
use tdesign::FieldContext;

use crate::{CliError, Format, Options, Outcome};

/// Resolves `--format` against what a subcommand can emit.
pub fn format(opts: &Options, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
    let f = opts.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Usage(format!("format {f:?} is not available here; choose one of {allowed:?}")))
    }
}

fn bits_row(bits: u32, width: usize) -> String {
    (0..width).map(|j| if (bits >> j) & 1 == 1 { '1' } else { '0' }).collect()
}

fn to_json_value(text: &str) -> Value {
    serde_json::from_str(text).expect("library emits valid JSON")
}

fn write_json(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(|e| CliError::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

pub fn field_info(opts: &Options, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let fmt = format(opts, Format::Text, &[Format::Text, Format::Json])?;
    let ctx = opts.context()?;
    let m = ctx.m();
    let rows = |b: &tdesign::bitmat::BitMatrix| b.rows().iter().map(|&r| bits_row(r, m)).collect::<Vec<_>>();
    let table: Vec<(String, Option<u32>, u32, String)> = ctx
        .elements()
        .map(|x| (x.to_string(), ctx.log(x), ctx.trace(x), bits_row(ctx.dual_coords(x), m)))
        .collect();
    match fmt {
        Format::Json => {
            let elements: Vec<Value> = table
                .iter()
                .map(|(e, log, tr, dual)| json!({ "element": e, "log": log, "trace": tr, "dual": dual }))
                .collect();
            let doc = json!({
                "m": m,
                "polynomial": format!("{:#x}", ctx.polynomial()),
                "order": ctx.order(),
                "gram": rows(ctx.gram()),
                "gram_inverse": rows(ctx.gram_inv()),
                "companion": rows(&ctx.companion()),
                "elements": elements,
            });
            write_json(out, &doc)?;
        }
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "m = {m}");
            let _ = writeln!(s, "polynomial = {:#x}", ctx.polynomial());
            let _ = writeln!(s, "order = {}", ctx.order());
            for (name, mat) in [("W", ctx.gram()), ("W^-1", ctx.gram_inv()), ("A_alpha", &ctx.companion())] {
                let _ = writeln!(s, "{name} =");
                for r in rows(mat) {
                    let _ = writeln!(s, "  {r}");
                }
            }
            let _ = writeln!(s, "{:<8} {:>5} {:>5}  dual", "element", "log", "trace");
            for (e, log, tr, dual) in &table {
                let log = log.map_or("-".to_string(), |l| l.to_string());
                let _ = writeln!(s, "{e:<8} {log:>5} {tr:>5}  {dual}");
            }
            out.write_all(s.as_bytes())?;
        }
    }
    Ok(Outcome::default())
}

fn census_json(c: &Census) -> Value {
    let orbits: Vec<Value> =
        c.orbits.iter().map(|(inv, n)| json!({ "invariant": inv.to_string(), "pairs": n })).collect();
    json!({
        "m": c.m,
        "polynomial": format!("{:#x}", c.polynomial),
        "source": match c.source {
            CensusSource::Enumeration => "enumeration",
            CensusSource::ClosedForm => "closed-form",
        },
        "vertices": c.vertices,
        "srg": [c.srg.n, c.srg.t, c.srg.lambda, c.srg.mu],
        "edges": c.edges,
        "type1_edges": c.type1_edges,
        "type2_edges": c.type2_edges,
        "non_edges": c.non_edges,
        "orbits": orbits,
    })
}

pub fn graph_census(opts: &Options, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let fmt = format(opts, Format::Text, &[Format::Text, Format::Json])?;
    let ctx = opts.context()?;
    let c = if ctx.m() <= CENSUS_MAX_M { census(&ctx)? } else { census_closed_form(&ctx) };
    let closed = census_closed_form(&ctx);
    let mut outcome = Outcome::default();
    if c.orbits != closed.orbits || c.edges != closed.edges {
        outcome.failures.push("enumerated census differs from the closed form".into());
    }
    match fmt {
        Format::Json => write_json(out, &census_json(&c))?,
        _ => out.write_all(c.to_text().as_bytes())?,
    }
    Ok(outcome)
}

struct ChainData {
    q1_closed: TransitionMatrix<OrbitInvariant>,
    q1: TransitionMatrix<OrbitInvariant>,
    q0: TransitionMatrix<OrbitInvariant>,
}

fn chain_data(ctx: &FieldContext) -> Result<ChainData, CliError> {
    Ok(ChainData {
        q1_closed: q1_closed_form(ctx),
        q1: q_empirical(ctx, ChainKind::NonEdges)?,
        q0: q_empirical(ctx, ChainKind::Edges)?,
    })
}

fn matrix_text(s: &mut String, name: &str, q: &TransitionMatrix<OrbitInvariant>) {
    let _ = writeln!(s, "{name} = (1/{}) *", q.denominator());
    let labels: Vec<String> = q.states().iter().map(ToString::to_string).collect();
    let width = labels.iter().map(String::len).max().unwrap_or(0);
    for (i, label) in labels.iter().enumerate() {
        let row: Vec<String> = q.row(i).iter().map(|x| format!("{x:>4}")).collect();
        let _ = writeln!(s, "  {label:<width$} [{}]", row.join(""));
    }
}

pub fn chain(opts: &Options, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let fmt = format(opts, Format::Text, &[Format::Text, Format::Json, Format::Csv])?;
    let ctx = opts.context()?;
    let data = chain_data(&ctx)?;
    let structure = q0_structure_check(&ctx, &data.q0);
    let q1_matches = data.q1.rational_eq(&data.q1_closed);
    let w1_ok = data.q0.is_left_eigenvector(&w1(&ctx), data.q0.denominator());
    let w2_ok = data.q0.is_left_eigenvector(&w2(&ctx), w2_eigenvalue_numer(&ctx));
    let mut outcome = Outcome::default();
    if !q1_matches {
        outcome.failures.push("Q1 empirical differs from the closed form".into());
    }
    outcome.failures.extend(structure.mismatches.iter().cloned());
    if !w1_ok {
        outcome.failures.push("w1 is not stationary for Q0".into());
    }
    if !w2_ok {
        outcome.failures.push("w2 is not a left eigenvector of Q0".into());
    }
    match fmt {
        Format::Json => {
            let doc = json!({
                "m": ctx.m(),
                "polynomial": format!("{:#x}", ctx.polynomial()),
                "q1_closed_form": to_json_value(&data.q1_closed.to_json()),
                "q1_empirical": to_json_value(&data.q1.to_json()),
                "q0_empirical": to_json_value(&data.q0.to_json()),
                "r": structure.r,
                "r_row_sums": structure.r_row_sums,
                "r_col_sums": structure.r_col_sums,
                "checks": {
                    "q1_matches_closed_form": q1_matches,
                    "q0_structure": structure.passed(),
                    "w1_stationary": w1_ok,
                    "w2_eigenvector": w2_ok,
                },
            });
            write_json(out, &doc)?;
        }
        Format::Csv => {
            let mut s = String::from("matrix,from,to,numerator,denominator\n");
            for (name, q) in [("q1_closed_form", &data.q1_closed), ("q1_empirical", &data.q1), ("q0_empirical", &data.q0)] {
                for (i, from) in q.states().iter().enumerate() {
                    for (j, to) in q.states().iter().enumerate() {
                        let _ = writeln!(s, "{name},{from},{to},{},{}", q.numerator(i, j), q.denominator());
                    }
                }
            }
            out.write_all(s.as_bytes())?;
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "m = {}, polynomial = {:#x}", ctx.m(), ctx.polynomial());
            matrix_text(&mut s, "Q1", &data.q1);
            let _ = writeln!(s, "Q1 equals closed form: {q1_matches}");
            matrix_text(&mut s, "Q0", &data.q0);
            match structure.r_constant() {
                Some(k) => {
                    let _ = writeln!(s, "R = {k}*J({}x{})", structure.m2, structure.m1);
                }
                None => {
                    let _ = writeln!(s, "R =");
                    for row in &structure.r {
                        let _ = writeln!(s, "  {row:?}");
                    }
                }
            }
            let _ = writeln!(s, "R row sums = {:?}", structure.r_row_sums);
            let _ = writeln!(s, "R column sums = {:?}", structure.r_col_sums);
            let _ = writeln!(s, "Q0 block structure: {}", if structure.passed() { "ok" } else { "mismatch" });
            let _ = writeln!(s, "w1 Q0 = w1: {w1_ok}");
            let _ = writeln!(s, "w2 Q0 = ({}/{}) w2: {w2_ok}", w2_eigenvalue_numer(&ctx), data.q0.denominator());
            out.write_all(s.as_bytes())?;
        }
    }
    Ok(outcome)
}

pub fn spectra(opts: &Options, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let fmt = format(opts, Format::Json, &[Format::Json, Format::Text])?;
    let ctx = opts.context()?;
    let m = ctx.m();
    let eps = opts.epsilon();
    let data = chain_data(&ctx)?;
    let q0 = spectral_report(&data.q0)?;
    let q1 = spectral_report(&data.q1)?;
    let mixing = mixing_report(m, eps, Some((q0.lambda2, q0.gap)))?;
    let sv = singular_check_r(&q0_structure_check(&ctx, &data.q0).r, m);
    let n = ctx.order() as usize;
    let q1_mult = q1.multiplicity(lambda_q1(m), 1e-10);
    let mut outcome = Outcome::default();
    if q0.lambda2 >= lambda_q0_bound(m) {
        outcome.failures.push(format!("lambda2(Q0) = {} is not below {}", q0.lambda2, lambda_q0_bound(m)));
    }
    if q1_mult != n / 2 - 1 {
        outcome.failures.push(format!("lambda_Q1 has multiplicity {q1_mult}, expected {}", n / 2 - 1));
    }
    if !sv.within_bound {
        outcome.failures.push(format!("sigma_max(R) = {} exceeds {}", sv.sigma_max, sv.bound));
    }
    match fmt {
        Format::Json => {
            let doc = json!({
                "m": m,
                "polynomial": format!("{:#x}", ctx.polynomial()),
                "epsilon": eps,
                "q0": q0,
                "q1": q1,
                "lambda_q1": lambda_q1(m),
                "lambda_q0_bound": lambda_q0_bound(m),
                "mixing": mixing,
                "r_singular": sv,
            });
            write_json(out, &doc)?;
        }
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "m = {m}, polynomial = {:#x}, epsilon = {eps}", ctx.polynomial());
            for (name, rep) in [("Q0", &q0), ("Q1", &q1)] {
                let _ = writeln!(s, "{name}: lambda2 = {:.12}, lambda_min = {:.12}, gap = {:.12}", rep.lambda2, rep.lambda_min, rep.gap);
                let eig: Vec<String> = rep.eigenvalues.iter().map(|x| format!("{x:.9}")).collect();
                let _ = writeln!(s, "  eigenvalues = [{}]", eig.join(", "));
            }
            let _ = writeln!(s, "lambda_Q1 = {:.12} (multiplicity {q1_mult})", lambda_q1(m));
            let _ = writeln!(s, "lambda_Q0 bound = {:.12}", lambda_q0_bound(m));
            let _ = writeln!(s, "sigma_max(R) = {:.9}, 3*sqrt(2)*N = {:.9}", sv.sigma_max, sv.bound);
            let _ = writeln!(s, "mixing time bound = {}", mixing.t_bound);
            let _ = writeln!(s, "mixing time, large-N gap = {}", mixing.t_asymptotic);
            if let Some(t) = mixing.t_numerical {
                let _ = writeln!(s, "mixing time, numerical gap = {t}");
            }
            out.write_all(s.as_bytes())?;
        }
    }
    Ok(outcome)
}

pub fn convergence(opts: &Options, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let fmt = format(opts, Format::Csv, &[Format::Csv, Format::Json])?;
    let ctx = opts.context()?;
    let m = ctx.m();
    let eps = opts.epsilon();
    let horizon = match opts.steps {
        Some(t) => t,
        None => mixing_time_bound(m, eps)?,
    } as usize;
    let threshold = eps / (ctx.order() as f64).powi(3);
    let data = chain_data(&ctx)?;
    let mut outcome = Outcome::default();
    let mut curves = Vec::new();
    for (name, q) in [("edges", &data.q0), ("nonedges", &data.q1)] {
        let rep = spectral_report(q)?;
        let dense = q.to_dmatrix();
        for (s, state) in q.states().iter().enumerate() {
            let mut start = vec![0.0; q.len()];
            start[s] = 1.0;
            let tv = tv_curve(&dense, &start, &rep.stationary, horizon);
            if opts.steps.is_none() && tv[horizon] >= threshold {
                outcome.failures.push(format!("{name} from {state}: TV({horizon}) = {:e} >= {threshold:e}", tv[horizon]));
            }
            curves.push((name, state.to_string(), tv));
        }
    }
    match fmt {
        Format::Json => {
            let list: Vec<Value> =
                curves.iter().map(|(chain, start, tv)| json!({ "chain": chain, "start": start, "tv": tv })).collect();
            let doc = json!({ "m": m, "epsilon": eps, "horizon": horizon, "threshold": threshold, "curves": list });
            write_json(out, &doc)?;
        }
        _ => {
            let mut s = String::from("chain,start,t,tv\n");
            for (chain, start, tv) in &curves {
                for (t, x) in tv.iter().enumerate() {
                    let _ = writeln!(s, "{chain},{start},{t},{x:e}");
                }
            }
            out.write_all(s.as_bytes())?;
        }
    }
    Ok(outcome)
}

/// Samples per parallel batch when streaming.
const SAMPLE_CHUNK: u64 = 4096;

pub fn sampler_config(opts: &Options, default_count: u64) -> SamplerConfig {
    SamplerConfig::new(opts.m, opts.step_rule(), opts.seed, opts.count.unwrap_or(default_count))
}

pub fn sample(opts: &Options, out: &mut dyn Write) -> Result<Outcome, CliError> {
    format(opts, Format::Json, &[Format::Json])?;
    let ctx = opts.context()?;
    let config = sampler_config(opts, 10);
    if let StepRule::Epsilon(eps) = config.steps {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(tdesign::Error::Epsilon(eps).into());
        }
    }
    let mut start = 0;
    while start < config.count {
        let end = (start + SAMPLE_CHUNK).min(config.count);
        for s in sample_batch(&ctx, &config, start..end)? {
            writeln!(out, "{}", s.to_json_line())?;
        }
        start = end;
    }
    Ok(Outcome::default())
}
