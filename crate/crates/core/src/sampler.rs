//! Sampling of approximate 3-design elements: `t` uniform transvections, then
//! a uniform `PSL(2, 2^m)` element through `θ`, then a uniform Pauli.
//!
//! Sample `i` of a stream draws from its own ChaCha substream `(seed, i)`, so
//! sequential and parallel generation produce identical samples.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2m::{FieldContext, FieldElement};
use crate::graph::PauliPair;
use crate::kerdock::PslElement;
use crate::markov::mixing_time_bound;
use crate::pauli::{binary_form, PauliIndex, SymplecticMatrix, Transvection};

/// Number of transvections for an `ε`-approximate design: the orbit-chain
/// mixing bound, which already targets `ε / N³`.
pub fn steps_for_epsilon(m: usize, eps: f64) -> Result<u64> {
    mixing_time_bound(m, eps)
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepRule {
    Epsilon(f64),
    Steps(u64),
}

/// How the PSL factor is drawn. `Identity` exists for tests that need the
/// bare transvection walk or a pure Pauli ensemble.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PslMode {
    #[default]
    Uniform,
    Identity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub m: usize,
    pub steps: StepRule,
    pub seed: u64,
    pub count: u64,
    #[serde(default)]
    pub psl_mode: PslMode,
}

impl SamplerConfig {
    pub fn new(m: usize, steps: StepRule, seed: u64, count: u64) -> Self {
        SamplerConfig { m, steps, seed, count, psl_mode: PslMode::Uniform }
    }

    /// Resolved number of transvections per sample.
    pub fn step_count(&self) -> Result<u64> {
        match self.steps {
            StepRule::Epsilon(eps) => steps_for_epsilon(self.m, eps),
            StepRule::Steps(t) => Ok(t),
        }
    }

    fn check(&self, ctx: &FieldContext) -> Result<u64> {
        if ctx.m() != self.m {
            return Err(Error::Dimension(format!("config m = {} but field m = {}", self.m, ctx.m())));
        }
        self.step_count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignSample {
    pub index: u64,
    pub transvections: Vec<Transvection>,
    pub psl: PslElement,
    /// Uniform over all `N²` indices, identity included.
    pub pauli: PauliIndex,
    /// `Z_{h₁} ⋯ Z_{h_t} · θ(psl)`.
    pub composed: SymplecticMatrix,
}

/// Rows of `Z_{h₁} ⋯ Z_{h_t} · θ(g)`, computed by pushing each unit vector
/// through the factors in order.
fn compose(ctx: &FieldContext, transvections: &[Transvection], psl: &PslElement) -> SymplecticMatrix {
    let m = ctx.m();
    let hs: Vec<u32> = transvections.iter().map(|h| h.to_binary(ctx)).collect();
    let theta = psl.to_symplectic(ctx);
    let rows = (0..2 * m)
        .map(|i| {
            let x = hs.iter().fold(1u32 << i, |x, &h| Transvection::apply_binary(h, x, m));
            theta.apply_binary(x)
        })
        .collect();
    SymplecticMatrix::new(crate::bitmat::BitMatrix::from_rows(rows, 2 * m).expect("2m <= 32"))
        .expect("products of symplectic matrices are symplectic")
}

fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws one sample from a caller-owned stream.
pub fn sample<R: Rng + ?Sized>(ctx: &FieldContext, t: u64, psl_mode: PslMode, index: u64, rng: &mut R) -> DesignSample {
    let transvections: Vec<Transvection> = (0..t).map(|_| Transvection::sample(ctx, rng)).collect();
    let psl = match psl_mode {
        PslMode::Uniform => PslElement::sample(ctx, rng),
        PslMode::Identity => PslElement::identity(),
    };
    let n2 = ctx.order() * ctx.order();
    let pauli = PauliIndex::from_code(rng.gen_range(0..n2), ctx.m());
    let composed = compose(ctx, &transvections, &psl);
    DesignSample { index, transvections, psl, pauli, composed }
}

/// Sample `index` of the stream defined by `config`.
pub fn sample_at(ctx: &FieldContext, config: &SamplerConfig, index: u64) -> Result<DesignSample> {
    let t = config.check(ctx)?;
    Ok(sample(ctx, t, config.psl_mode, index, &mut substream(config.seed, index)))
}

/// The `count` samples of `config`, generated lazily in index order.
pub fn sample_stream<'a>(ctx: &'a FieldContext, config: &'a SamplerConfig) -> Result<impl Iterator<Item = DesignSample> + 'a> {
    let t = config.check(ctx)?;
    Ok((0..config.count).map(move |i| sample(ctx, t, config.psl_mode, i, &mut substream(config.seed, i))))
}

/// Samples `range` of the stream in parallel; equal to the sequential stream.
pub fn sample_batch(ctx: &FieldContext, config: &SamplerConfig, range: std::ops::Range<u64>) -> Result<Vec<DesignSample>> {
    let t = config.check(ctx)?;
    Ok(range.into_par_iter().map(|i| sample(ctx, t, config.psl_mode, i, &mut substream(config.seed, i))).collect())
}

#[derive(Serialize, Deserialize)]
struct SampleLine {
    index: u64,
    transvections: Vec<[FieldElement; 2]>,
    psl: PslElement,
    pauli: [FieldElement; 2],
    composed: Vec<String>,
}

impl DesignSample {
    /// One JSON object on a single line.
    pub fn to_json_line(&self) -> String {
        let line = SampleLine {
            index: self.index,
            transvections: self.transvections.iter().map(|h| [h.h1(), h.h2()]).collect(),
            psl: self.psl,
            pauli: [self.pauli.a, self.pauli.b],
            composed: self.composed.to_hex_rows(),
        };
        serde_json::to_string(&line).expect("serializable")
    }

    /// Parses a line and checks that `composed` matches the factors.
    pub fn from_json_line(ctx: &FieldContext, text: &str) -> Result<DesignSample> {
        let line: SampleLine = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let transvections = line.transvections.iter().map(|[a, b]| Transvection::new(*a, *b)).collect::<Result<Vec<_>>>()?;
        let e = line.psl.entries();
        let psl = PslElement::new(ctx, e[0], e[1], e[2], e[3])?;
        let rows: Vec<&str> = line.composed.iter().map(String::as_str).collect();
        let composed = SymplecticMatrix::from_hex_rows(&rows)?;
        if composed != compose(ctx, &transvections, &psl) {
            return Err(Error::Parse(format!("sample {}: composed matrix does not match its factors", line.index)));
        }
        Ok(DesignSample { index: line.index, transvections, psl, pauli: PauliIndex::new(line.pauli[0], line.pauli[1]), composed })
    }

    /// Applies the factors one at a time, as a cross-check of `composed`.
    pub fn apply_sequentially(&self, ctx: &FieldContext, p: &PauliIndex) -> PauliIndex {
        let q = self.transvections.iter().fold(*p, |q, h| h.apply(ctx, &q));
        self.psl.apply(ctx, &q)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeClass {
    Vertices,
    Edges,
    NonEdges,
}

/// Empirical image distribution of one probe.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeStatistics {
    pub probe: String,
    pub class: ProbeClass,
    /// Size `K` of the class the images should be uniform over.
    pub support: u64,
    /// Distinct images seen.
    pub observed: u64,
    /// Images that left the class (always zero for symplectic samples).
    pub escaped: u64,
    pub tv: f64,
    /// `½·sqrt(K(1 − 1/K)/S)`, an upper bound on the expected TV of `S`
    /// exactly uniform draws.
    pub mc_sigma: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairStatistics {
    pub samples: u64,
    pub probes: Vec<ProbeStatistics>,
}

impl PairStatistics {
    pub fn probe(&self, class: ProbeClass) -> Option<&ProbeStatistics> {
        self.probes.iter().find(|p| p.class == class)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("probe,class,support,observed,escaped,samples,tv,mc_sigma\n");
        for p in &self.probes {
            let class = match p.class {
                ProbeClass::Vertices => "vertices",
                ProbeClass::Edges => "edges",
                ProbeClass::NonEdges => "nonedges",
            };
            s.push_str(&format!(
                "{},{class},{},{},{},{},{},{}\n",
                p.probe, p.support, p.observed, p.escaped, self.samples, p.tv, p.mc_sigma
            ));
        }
        s
    }
}

/// Streams samples and tallies where each probe lands. The first vertex of
/// the first probe pair doubles as the vertex probe.
pub fn pair_statistics<I>(ctx: &FieldContext, samples: I, probes: &[PauliPair]) -> Result<PairStatistics>
where
    I: IntoIterator<Item = DesignSample>,
{
    let mut acc = PairAccumulator::new(ctx, probes)?;
    for s in samples {
        acc.add(&s.composed);
    }
    Ok(acc.finish())
}

/// Parallel variant of [`pair_statistics`] over a whole sampler stream,
/// merging per-worker histograms. Independent of the thread count.
pub fn pair_statistics_for_config(ctx: &FieldContext, config: &SamplerConfig, probes: &[PauliPair]) -> Result<PairStatistics> {
    let t = config.check(ctx)?;
    const CHUNK: u64 = 1 << 14;
    let chunks = config.count.div_ceil(CHUNK);
    let merged = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = PairAccumulator::new(ctx, probes)?;
            for i in c * CHUNK..((c + 1) * CHUNK).min(config.count) {
                let s = sample(ctx, t, config.psl_mode, i, &mut substream(config.seed, i));
                acc.add(&s.composed);
            }
            Ok(acc)
        })
        .try_reduce(
            || PairAccumulator::new(ctx, probes).expect("validated above"),
            |mut a, b| {
                a.merge(b);
                Ok(a)
            },
        )?;
    Ok(merged.finish())
}

/// Dense tallies for small image spaces, a map beyond that.
enum Histogram {
    Dense(Vec<u64>),
    Sparse(HashMap<usize, u64>),
}

impl Histogram {
    fn new(slots: usize) -> Self {
        if slots <= 1 << 16 {
            Histogram::Dense(vec![0; slots])
        } else {
            Histogram::Sparse(HashMap::new())
        }
    }

    fn bump(&mut self, slot: usize, by: u64) {
        match self {
            Histogram::Dense(v) => v[slot] += by,
            Histogram::Sparse(h) => *h.entry(slot).or_default() += by,
        }
    }

    fn merge(&mut self, other: Histogram) {
        for (slot, c) in other.nonzero() {
            self.bump(slot, c);
        }
    }

    fn nonzero(self) -> Box<dyn Iterator<Item = (usize, u64)>> {
        match self {
            Histogram::Dense(v) => Box::new(v.into_iter().enumerate().filter(|&(_, c)| c > 0)),
            Histogram::Sparse(h) => Box::new(h.into_iter()),
        }
    }
}

struct Probe {
    label: String,
    class: ProbeClass,
    x: u32,
    y: Option<u32>,
    histogram: Histogram,
}

struct PairAccumulator {
    m: usize,
    samples: u64,
    probes: Vec<Probe>,
}

impl PairAccumulator {
    fn new(ctx: &FieldContext, pairs: &[PauliPair]) -> Result<Self> {
        let m = ctx.m();
        let n2 = 1usize << (2 * m);
        let first = pairs.first().ok_or(Error::DegeneratePair("no probe pairs"))?;
        let mut probes = vec![Probe {
            label: format!("{}:{}", first.first.a, first.first.b),
            class: ProbeClass::Vertices,
            x: first.first.to_binary(ctx),
            y: None,
            histogram: Histogram::new(n2),
        }];
        for p in pairs {
            let pair = PauliPair::new(p.first, p.second)?;
            let (x, y) = (pair.first.to_binary(ctx), pair.second.to_binary(ctx));
            let class = if binary_form(x, y, m) == 0 { ProbeClass::Edges } else { ProbeClass::NonEdges };
            probes.push(Probe { label: pair.to_string(), class, x, y: Some(y), histogram: Histogram::new(n2 * n2) });
        }
        Ok(PairAccumulator { m, samples: 0, probes })
    }

    fn add(&mut self, f: &SymplecticMatrix) {
        let shift = 2 * self.m;
        self.samples += 1;
        for p in &mut self.probes {
            let fx = f.apply_binary(p.x) as usize;
            let slot = match p.y {
                Some(y) => fx << shift | f.apply_binary(y) as usize,
                None => fx,
            };
            p.histogram.bump(slot, 1);
        }
    }

    fn merge(&mut self, other: PairAccumulator) {
        self.samples += other.samples;
        for (a, b) in self.probes.iter_mut().zip(other.probes) {
            a.histogram.merge(b.histogram);
        }
    }

    fn finish(self) -> PairStatistics {
        let m = self.m;
        let mask = (1usize << (2 * m)) - 1;
        let n2 = 1u64 << (2 * m);
        let s = self.samples;
        let probes = self
            .probes
            .into_iter()
            .map(|p| {
                let in_class = |slot: usize| match p.class {
                    ProbeClass::Vertices => slot != 0,
                    _ => {
                        let (x, y) = ((slot >> (2 * m)) as u32, (slot & mask) as u32);
                        let commuting = binary_form(x, y, m) == 0;
                        x != 0 && y != 0 && x != y && commuting == (p.class == ProbeClass::Edges)
                    }
                };
                let support = match p.class {
                    ProbeClass::Vertices => n2 - 1,
                    ProbeClass::Edges => (n2 - 1) * (n2 / 2 - 2),
                    ProbeClass::NonEdges => (n2 - 1) * (n2 / 2),
                };
                let uniform = 1.0 / support as f64;
                let mut tv = 0.0;
                let mut escaped = 0;
                let mut observed = 0;
                let mut observed_in_class = 0;
                for (slot, c) in p.histogram.nonzero() {
                    let freq = c as f64 / s.max(1) as f64;
                    observed += 1;
                    if in_class(slot) {
                        observed_in_class += 1;
                        tv += (freq - uniform).abs();
                    } else {
                        tv += freq;
                        escaped += c;
                    }
                }
                tv += (support - observed_in_class) as f64 * uniform;
                let k = support as f64;
                ProbeStatistics {
                    probe: p.label,
                    class: p.class,
                    support,
                    observed,
                    escaped,
                    tv: 0.5 * tv,
                    mc_sigma: 0.5 * (k * (1.0 - 1.0 / k) / s.max(1) as f64).sqrt(),
                }
            })
            .collect();
        PairStatistics { samples: s, probes }
    }
}
