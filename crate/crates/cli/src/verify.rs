//! The `verify` subcommand: dense-unitary oracle checks for `m ≤ 3` plus
//! pair-mixing statistics of the configured sampler.

use std::io::Write;

use serde_json::json;
use tdesign::bitmat::BitMatrix;
use tdesign::graph::{classify_pair, PauliPair};
use tdesign::kerdock::PslElement;
use tdesign::pauli::{generator, Generator, PauliIndex, Transvection};
use tdesign::sampler::{pair_statistics_for_config, sample_batch, StepRule};
use tdesign::unitary::{
    conjugation_check, ensemble_from_samples, frame_potential, frame_potential_margin, generator_unitary, kerdock_ensemble,
    psl_unitary, transvection_unitary, UNITARY_MAX_M,
};
use tdesign::FieldContext;

use crate::commands::{format, sampler_config};
use crate::{CliError, Format, Options, Outcome};

const DEFAULT_COUNT: u64 = 100_000;
/// Realized samples checked one by one by conjugation.
const REALIZED: usize = 1000;
/// Samples realized as dense unitaries for the frame-potential estimate.
const FRAME_SAMPLES: u64 = 2000;

struct Check {
    name: String,
    passed: bool,
    detail: String,
}

fn all_generators(m: usize) -> Vec<Generator> {
    let mut gens = vec![Generator::Omega];
    gens.extend((1..=m).map(Generator::PartialOmega));
    for bits in 0u32..(1 << (m * m)) {
        let rows = (0..m).map(|i| (bits >> (i * m)) & ((1 << m) - 1)).collect();
        let q = BitMatrix::from_rows(rows, m).expect("m x m");
        if q.is_symmetric() {
            gens.push(Generator::Shear(q.clone()));
        }
        if q.rank() == m {
            gens.push(Generator::Linear(q));
        }
    }
    gens
}

/// Runs `f` over `items`, keeping the first failure.
fn first_failure<T>(items: impl IntoIterator<Item = T>, mut f: impl FnMut(&T) -> Result<(), String>) -> (usize, Option<String>) {
    let mut n = 0;
    for item in items {
        n += 1;
        if let Err(e) = f(&item) {
            return (n, Some(e));
        }
    }
    (n, None)
}

fn conjugation_checks(ctx: &FieldContext, checks: &mut Vec<Check>) -> Result<(), CliError> {
    let m = ctx.m();
    let mut record = |name: &str, (n, err): (usize, Option<String>)| {
        checks.push(Check {
            name: name.into(),
            passed: err.is_none(),
            detail: err.unwrap_or_else(|| format!("{n} unitaries conjugate correctly")),
        });
    };
    record(
        "generators",
        first_failure(all_generators(m), |g| {
            let u = generator_unitary(m, g).map_err(|e| e.to_string())?;
            conjugation_check(&u, &generator(m, g).map_err(|e| e.to_string())?).map_err(|e| format!("{g:?}: {e}"))
        }),
    );
    record(
        "transvections",
        first_failure(Transvection::all(ctx), |h| {
            let u = transvection_unitary(ctx, h).map_err(|e| e.to_string())?;
            conjugation_check(&u, &h.matrix(ctx)).map_err(|e| format!("{:?}: {e}", h.as_pauli()))
        }),
    );
    record(
        "psl",
        first_failure(PslElement::all(ctx), |g| {
            let u = psl_unitary(ctx, g).map_err(|e| e.to_string())?;
            conjugation_check(&u, &g.to_symplectic(ctx)).map_err(|e| format!("{:?}: {e}", g.entries()))
        }),
    );
    Ok(())
}

fn probe_pairs(ctx: &FieldContext) -> Vec<PauliPair> {
    let first = PauliIndex::from_code(1, ctx.m());
    let find = |edge: bool| {
        PauliIndex::nonzero(ctx)
            .filter(|q| *q != first)
            .map(|q| PauliPair::new(first, q).expect("distinct vertices"))
            .find(|p| classify_pair(ctx, p).map(|k| k.is_edge()) == Ok(edge))
            .expect("every vertex has neighbours and non-neighbours")
    };
    vec![find(true), find(false)]
}

pub fn verify(opts: &Options, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let fmt = format(opts, Format::Text, &[Format::Text, Format::Json])?;
    let ctx = opts.context()?;
    let m = ctx.m();
    if m > UNITARY_MAX_M {
        return Err(CliError::Usage(format!("verify supports m <= {UNITARY_MAX_M}")));
    }
    let config = sampler_config(opts, DEFAULT_COUNT);
    let t = config.step_count()?;
    let mut checks = Vec::new();
    conjugation_checks(&ctx, &mut checks)?;

    let realized = sample_batch(&ctx, &config, 0..config.count.min(FRAME_SAMPLES))?;
    let ensemble = ensemble_from_samples(&ctx, &realized)?;
    let (n, err) = first_failure(ensemble.unitaries().iter().zip(&realized).take(REALIZED), |(u, s)| {
        conjugation_check(u, &s.composed).map_err(|e| format!("sample {}: {e}", s.index))
    });
    checks.push(Check {
        name: "samples".into(),
        passed: err.is_none(),
        detail: err.unwrap_or_else(|| format!("{n} realized samples match their composed matrices")),
    });

    if m == 2 {
        let fp = frame_potential(&kerdock_ensemble(&ctx)?, 2);
        checks.push(Check {
            name: "kerdock_f2".into(),
            passed: (fp.value - 2.0).abs() <= 1e-8,
            detail: format!("F_2 = {:.12} over {} unitaries", fp.value, fp.samples),
        });
    }

    let eps = match config.steps {
        StepRule::Epsilon(e) => Some(e),
        StepRule::Steps(_) => None,
    };
    if ensemble.len() >= 2 {
        let fp = frame_potential(&ensemble, 3);
        let (passed, range) = match eps {
            Some(e) => {
                let delta = frame_potential_margin(m, 3, e, &fp);
                (fp.value >= 6.0 - 1e-6 && fp.value <= 6.0 + delta, format!("[6, {:.6}]", 6.0 + delta))
            }
            None => (fp.value >= 6.0 - 1e-6, "[6, inf)".into()),
        };
        checks.push(Check {
            name: "frame_potential_f3".into(),
            passed,
            detail: format!("F_3 = {:.6} from {} samples, accepted range {range}", fp.value, ensemble.len()),
        });
    }

    let stats = pair_statistics_for_config(&ctx, &config, &probe_pairs(&ctx))?;
    for p in &stats.probes {
        let limit = eps.map(|e| e + 4.0 * p.mc_sigma);
        let passed = p.escaped == 0 && limit.map_or(true, |l| p.tv <= l);
        checks.push(Check {
            name: format!("mixing_{}", serde_json::to_value(p.class).expect("serializable").as_str().unwrap_or("probe")),
            passed,
            detail: format!(
                "probe {}: TV = {:.6}, sigma = {:.6}, limit = {}, {} samples",
                p.probe,
                p.tv,
                p.mc_sigma,
                limit.map_or("none".to_string(), |l| format!("{l:.6}")),
                stats.samples
            ),
        });
    }

    match fmt {
        Format::Json => {
            let list: Vec<_> =
                checks.iter().map(|c| json!({ "check": c.name, "passed": c.passed, "detail": c.detail })).collect();
            let doc = json!({ "m": m, "steps": t, "seed": config.seed, "checks": list });
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(|e| CliError::Io(e.into()))?;
            writeln!(out)?;
        }
        _ => {
            writeln!(out, "m = {m}, t = {t}, seed = {}", config.seed)?;
            for c in &checks {
                writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
            }
        }
    }
    Ok(Outcome { failures: checks.into_iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect() })
}
