//! The directed Pauli graph on nonzero Pauli indices, its edge taxonomy and
//! the orbit invariants of ordered pairs under `PSL(2, 2^m)`.
//!
//! An ordered pair `(p, q)` with `p = (a, b)`, `q = (c, d)` is read as the
//! field matrix `(a b; c d)`. `θ(g)` multiplies this matrix on the right by a
//! determinant-1 matrix, so the determinant `ad + bc` is invariant. Its trace
//! is the commutation bit: non-edges have `Tr(det) = 1`, type-1 edges have
//! `det = 0` (both rows in one Kerdock class) and type-2 edges have a nonzero
//! determinant of trace 0.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2m::{FieldContext, FieldElement};
use crate::kerdock::PslElement;
use crate::pauli::PauliIndex;

/// Largest `m` for which all ordered pairs are enumerated.
pub const CENSUS_MAX_M: usize = 6;
/// Largest `m` for the adjacency-matrix SRG check and explicit orbit search.
pub const ENUMERATION_MAX_M: usize = 5;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Type1,
    Type2,
    NonEdge,
}

impl EdgeKind {
    pub fn is_edge(self) -> bool {
        self != EdgeKind::NonEdge
    }

    pub fn name(self) -> &'static str {
        match self {
            EdgeKind::Type1 => "type1",
            EdgeKind::Type2 => "type2",
            EdgeKind::NonEdge => "nonedge",
        }
    }

    fn from_name(s: &str) -> Result<Self> {
        match s {
            "type1" => Ok(EdgeKind::Type1),
            "type2" => Ok(EdgeKind::Type2),
            "nonedge" => Ok(EdgeKind::NonEdge),
            other => Err(Error::Parse(format!("unknown edge kind {other:?}"))),
        }
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Complete `PSL(2, 2^m)` invariant of an ordered pair.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbitInvariant {
    pub kind: EdgeKind,
    pub value: FieldElement,
}

impl fmt::Display for OrbitInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.value)
    }
}

impl std::str::FromStr for OrbitInvariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s.split_once(':').ok_or_else(|| Error::Parse(format!("invariant {s:?}")))?;
        Ok(OrbitInvariant { kind: EdgeKind::from_name(kind.trim())?, value: value.parse()? })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliPair {
    pub first: PauliIndex,
    pub second: PauliIndex,
}

impl PauliPair {
    pub fn new(first: PauliIndex, second: PauliIndex) -> Result<Self> {
        let pair = PauliPair { first, second };
        pair.validate()?;
        Ok(pair)
    }

    fn validate(&self) -> Result<()> {
        if self.first.is_identity() || self.second.is_identity() {
            Err(Error::DegeneratePair("identity Pauli is not a vertex"))
        } else if self.first == self.second {
            Err(Error::DegeneratePair("repeated vertex"))
        } else {
            Ok(())
        }
    }

    /// `(a b; c d)` as a row-major array.
    pub fn matrix(&self) -> [FieldElement; 4] {
        [self.first.a, self.first.b, self.second.a, self.second.b]
    }

    pub fn determinant(&self, ctx: &FieldContext) -> FieldElement {
        ctx.add(ctx.mul(self.first.a, self.second.b), ctx.mul(self.first.b, self.second.a))
    }

    pub fn map(&self, f: impl Fn(&PauliIndex) -> PauliIndex) -> PauliPair {
        PauliPair { first: f(&self.first), second: f(&self.second) }
    }

    /// A fixed member of the orbit with the given invariant:
    /// `((1, 0), (0, x))` for determinant `x`, `((s, 0), (1, 0))` for type-1 ratio `s`.
    pub fn representative(inv: &OrbitInvariant) -> Result<PauliPair> {
        let z = FieldElement::ZERO;
        match inv.kind {
            EdgeKind::Type1 => PauliPair::new(PauliIndex::new(inv.value, z), PauliIndex::new(FieldElement::ONE, z)),
            _ => PauliPair::new(PauliIndex::new(FieldElement::ONE, z), PauliIndex::new(z, inv.value)),
        }
    }

    /// Dense index of an ordered pair of distinct vertices in `0..(N²-1)(N²-2)`.
    pub fn code(&self, ctx: &FieldContext) -> usize {
        let v = vertex_count(ctx);
        let i = self.first.code(ctx.m()) as usize - 1;
        let j = self.second.code(ctx.m()) as usize - 1;
        i * (v - 1) + if j > i { j - 1 } else { j }
    }

    pub fn from_code(ctx: &FieldContext, code: usize) -> PauliPair {
        let v = vertex_count(ctx);
        let i = code / (v - 1);
        let mut j = code % (v - 1);
        if j >= i {
            j += 1;
        }
        PauliPair {
            first: PauliIndex::from_code(i as u32 + 1, ctx.m()),
            second: PauliIndex::from_code(j as u32 + 1, ctx.m()),
        }
    }
}

impl fmt::Display for PauliPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}|{}:{}", self.first.a, self.first.b, self.second.a, self.second.b)
    }
}

fn vertex_count(ctx: &FieldContext) -> usize {
    let n = ctx.order() as usize;
    n * n - 1
}

pub fn ordered_pair_count(ctx: &FieldContext) -> usize {
    let v = vertex_count(ctx);
    v * (v - 1)
}

/// Edge kind of a validated pair, without re-checking the pair.
fn kind_of(ctx: &FieldContext, det: FieldElement) -> EdgeKind {
    if ctx.trace(det) == 1 {
        EdgeKind::NonEdge
    } else if det.is_zero() {
        EdgeKind::Type1
    } else {
        EdgeKind::Type2
    }
}

pub fn classify_pair(ctx: &FieldContext, pair: &PauliPair) -> Result<EdgeKind> {
    pair.validate()?;
    Ok(kind_of(ctx, pair.determinant(ctx)))
}

pub fn orbit_invariant(ctx: &FieldContext, pair: &PauliPair) -> Result<OrbitInvariant> {
    pair.validate()?;
    Ok(invariant_unchecked(ctx, pair))
}

fn invariant_unchecked(ctx: &FieldContext, pair: &PauliPair) -> OrbitInvariant {
    let det = pair.determinant(ctx);
    let kind = kind_of(ctx, det);
    let value = match kind {
        EdgeKind::Type1 => {
            let (p, q) = (pair.first, pair.second);
            // Rows are proportional; c and d cannot both vanish for a vertex.
            if q.a.is_zero() {
                ctx.div(p.b, q.b)
            } else {
                ctx.div(p.a, q.a)
            }
            .expect("nonzero vertex")
        }
        _ => det,
    };
    OrbitInvariant { kind, value }
}

/// Parameters `(n, t, λ, μ)` of a strongly regular graph.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrgParameters {
    pub n: u64,
    pub t: u64,
    pub lambda: u64,
    pub mu: u64,
}

impl fmt::Display for SrgParameters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.n, self.t, self.lambda, self.mu)
    }
}

/// `(N² - 1, N²/2 - 2, N²/4 - 3, N²/4 - 1)`.
pub fn srg_parameters(m: usize) -> Result<SrgParameters> {
    if m < 2 || m > 31 {
        return Err(Error::DegreeOutOfRange(m));
    }
    let n2 = 1u64 << (2 * m);
    Ok(SrgParameters { n: n2 - 1, t: n2 / 2 - 2, lambda: n2 / 4 - 3, mu: n2 / 4 - 1 })
}

/// Builds the commutation graph and measures its parameters, failing if the
/// degree, λ or μ is not constant.
pub fn srg_from_enumeration(ctx: &FieldContext) -> Result<SrgParameters> {
    if ctx.m() > ENUMERATION_MAX_M {
        return Err(Error::TooLarge { what: "adjacency enumeration", m: ctx.m(), cap: ENUMERATION_MAX_M });
    }
    let v = vertex_count(ctx);
    let words = v.div_ceil(64);
    let vertices: Vec<PauliIndex> = PauliIndex::nonzero(ctx).collect();
    let adj: Vec<Vec<u64>> = vertices
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut row = vec![0u64; words];
            for (j, q) in vertices.iter().enumerate() {
                if i != j && crate::pauli::symplectic_inner(ctx, p, q) == 0 {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            row
        })
        .collect();
    let connected = |i: usize, j: usize| (adj[i][j / 64] >> (j % 64)) & 1 == 1;
    let common = |i: usize, j: usize| adj[i].iter().zip(&adj[j]).map(|(x, y)| u64::from((x & y).count_ones())).sum::<u64>();

    let degrees: std::collections::BTreeSet<u64> =
        adj.iter().map(|r| r.iter().map(|w| u64::from(w.count_ones())).sum()).collect();
    let (lambdas, mus) = (0..v)
        .into_par_iter()
        .map(|i| {
            let mut l = std::collections::BTreeSet::new();
            let mut u = std::collections::BTreeSet::new();
            for j in (i + 1)..v {
                if connected(i, j) {
                    l.insert(common(i, j));
                } else {
                    u.insert(common(i, j));
                }
            }
            (l, u)
        })
        .reduce(Default::default, |(mut l1, mut u1), (l2, u2)| {
            l1.extend(l2);
            u1.extend(u2);
            (l1, u1)
        });
    let single = |set: &std::collections::BTreeSet<u64>, name: &str| match set.iter().collect::<Vec<_>>().as_slice() {
        [x] => Ok(**x),
        other => Err(Error::Irregular(format!("{name} takes values {other:?}"))),
    };
    Ok(SrgParameters {
        n: v as u64,
        t: single(&degrees, "degree")?,
        lambda: single(&lambdas, "lambda")?,
        mu: single(&mus, "mu")?,
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CensusSource {
    Enumeration,
    ClosedForm,
}

/// Counts of ordered pairs by kind and by orbit invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub m: usize,
    pub polynomial: u32,
    pub source: CensusSource,
    pub vertices: u64,
    pub srg: SrgParameters,
    pub edges: u64,
    pub type1_edges: u64,
    pub type2_edges: u64,
    pub non_edges: u64,
    /// Number of ordered pairs carrying each invariant.
    pub orbits: BTreeMap<OrbitInvariant, u64>,
}

/// Exhaustive census over all ordered pairs of distinct vertices.
pub fn census(ctx: &FieldContext) -> Result<Census> {
    if ctx.m() > CENSUS_MAX_M {
        return Err(Error::TooLarge { what: "exhaustive census", m: ctx.m(), cap: CENSUS_MAX_M });
    }
    let n = ctx.order() as usize;
    let slot = |inv: &OrbitInvariant| {
        let k = match inv.kind {
            EdgeKind::Type1 => 0,
            EdgeKind::Type2 => 1,
            EdgeKind::NonEdge => 2,
        };
        k * n + inv.value.bits() as usize
    };
    let vertices: Vec<PauliIndex> = PauliIndex::nonzero(ctx).collect();
    let counts = vertices
        .par_iter()
        .fold(
            || vec![0u64; 3 * n],
            |mut acc, p| {
                for q in vertices.iter().filter(|q| *q != p) {
                    let inv = invariant_unchecked(ctx, &PauliPair { first: *p, second: *q });
                    acc[slot(&inv)] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; 3 * n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let kinds = [EdgeKind::Type1, EdgeKind::Type2, EdgeKind::NonEdge];
    let orbits: BTreeMap<OrbitInvariant, u64> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (OrbitInvariant { kind: kinds[i / n], value: FieldElement::from_bits((i % n) as u32) }, c))
        .collect();
    Ok(assemble(ctx, CensusSource::Enumeration, orbits))
}

/// Census from the closed forms alone, available for every supported `m`.
pub fn census_closed_form(ctx: &FieldContext) -> Census {
    let n = u64::from(ctx.order());
    let v = n * n - 1;
    let mut orbits = BTreeMap::new();
    for x in ctx.elements().filter(|x| !x.is_zero()) {
        if ctx.trace(x) == 1 {
            orbits.insert(OrbitInvariant { kind: EdgeKind::NonEdge, value: x }, v * n);
        } else {
            orbits.insert(OrbitInvariant { kind: EdgeKind::Type2, value: x }, v * n);
        }
        if x != FieldElement::ONE {
            orbits.insert(OrbitInvariant { kind: EdgeKind::Type1, value: x }, v);
        }
    }
    assemble(ctx, CensusSource::ClosedForm, orbits)
}

fn assemble(ctx: &FieldContext, source: CensusSource, orbits: BTreeMap<OrbitInvariant, u64>) -> Census {
    let total = |k: EdgeKind| orbits.iter().filter(|(i, _)| i.kind == k).map(|(_, c)| c).sum::<u64>();
    let (type1_edges, type2_edges, non_edges) = (total(EdgeKind::Type1), total(EdgeKind::Type2), total(EdgeKind::NonEdge));
    let n = u64::from(ctx.order());
    Census {
        m: ctx.m(),
        polynomial: ctx.polynomial(),
        source,
        vertices: n * n - 1,
        srg: srg_parameters(ctx.m()).expect("supported degree"),
        edges: type1_edges + type2_edges,
        type1_edges,
        type2_edges,
        non_edges,
        orbits,
    }
}

/// Closed-form totals `(edges, type-1, type-2, non-edges)` over ordered pairs.
pub fn expected_edge_counts(m: usize) -> (u64, u64, u64, u64) {
    let n = 1u64 << m;
    let v = n * n - 1;
    (v * (n * n - 4) / 2, v * (n - 2), n * v * (n - 2) / 2, v * n * n / 2)
}

impl Census {
    pub fn orbit_count(&self, kind: EdgeKind) -> usize {
        self.orbits.keys().filter(|i| i.kind == kind).count()
    }

    /// Key-value text: one `key = value` per line, orbit rows as
    /// `orbit.<kind>.<hex> = <pairs>`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let source = match self.source {
            CensusSource::Enumeration => "enumeration",
            CensusSource::ClosedForm => "closed-form",
        };
        let _ = writeln!(s, "m = {}", self.m);
        let _ = writeln!(s, "polynomial = {:#x}", self.polynomial);
        let _ = writeln!(s, "source = {source}");
        let _ = writeln!(s, "vertices = {}", self.vertices);
        let _ = writeln!(s, "srg = {}", self.srg);
        let _ = writeln!(s, "edges = {}", self.edges);
        let _ = writeln!(s, "type1_edges = {}", self.type1_edges);
        let _ = writeln!(s, "type2_edges = {}", self.type2_edges);
        let _ = writeln!(s, "non_edges = {}", self.non_edges);
        for kind in [EdgeKind::NonEdge, EdgeKind::Type2, EdgeKind::Type1] {
            let _ = writeln!(s, "orbits.{kind} = {}", self.orbit_count(kind));
        }
        for (inv, count) in &self.orbits {
            let _ = writeln!(s, "orbit.{}.{} = {count}", inv.kind, inv.value);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Census> {
        let mut fields = BTreeMap::new();
        let mut orbits = BTreeMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse(format!("line {line:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            if let Some(rest) = k.strip_prefix("orbit.") {
                let (kind, value) = rest.split_once('.').ok_or_else(|| Error::Parse(format!("key {k:?}")))?;
                let inv = OrbitInvariant { kind: EdgeKind::from_name(kind)?, value: value.parse()? };
                orbits.insert(inv, parse_u64(v)?);
            } else {
                fields.insert(k.to_string(), v.to_string());
            }
        }
        let get = |k: &str| fields.get(k).ok_or_else(|| Error::Parse(format!("missing key {k}")));
        let num = |k: &str| get(k).and_then(|v| parse_u64(v));
        let srg_text = get("srg")?;
        let srg_vals: Vec<u64> = srg_text
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .map(|x| parse_u64(x.trim()))
            .collect::<Result<_>>()?;
        let [n, t, lambda, mu] = srg_vals[..] else {
            return Err(Error::Parse(format!("srg {srg_text:?}")));
        };
        let source = match get("source")?.as_str() {
            "enumeration" => CensusSource::Enumeration,
            "closed-form" => CensusSource::ClosedForm,
            other => return Err(Error::Parse(format!("source {other:?}"))),
        };
        Ok(Census {
            m: num("m")? as usize,
            polynomial: crate::gf2m::parse_hex(get("polynomial")?)?,
            source,
            vertices: num("vertices")?,
            srg: SrgParameters { n, t, lambda, mu },
            edges: num("edges")?,
            type1_edges: num("type1_edges")?,
            type2_edges: num("type2_edges")?,
            non_edges: num("non_edges")?,
            orbits,
        })
    }
}

fn parse_u64(s: &str) -> Result<u64> {
    s.parse().map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

/// Generators of `PSL(2, 2^m)`: translations by `α^i` for `i < m`, the
/// diagonal element `diag(α, α⁻¹)` and the swap.
pub fn psl_generators(ctx: &FieldContext) -> Vec<PslElement> {
    let mut gens: Vec<PslElement> = (0..ctx.m() as u64).map(|i| PslElement::translation(ctx.alpha_pow(i))).collect();
    gens.push(PslElement::diagonal(ctx, ctx.alpha_pow(1)).expect("α is nonzero"));
    gens.push(PslElement::swap());
    gens
}

/// One orbit of the group action on ordered pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairOrbit {
    pub invariant: OrbitInvariant,
    pub size: u64,
    pub representative: PauliPair,
}

/// Orbits of ordered pairs under `θ(PSL(2, 2^m))`, found by union-find over
/// the generator action. Fails if an orbit mixes invariants or two orbits
/// share one.
pub fn psl_orbits(ctx: &FieldContext) -> Result<Vec<PairOrbit>> {
    if ctx.m() > ENUMERATION_MAX_M {
        return Err(Error::TooLarge { what: "orbit enumeration", m: ctx.m(), cap: ENUMERATION_MAX_M });
    }
    let total = ordered_pair_count(ctx);
    let gens = psl_generators(ctx);
    let images: Vec<Vec<u32>> = gens
        .par_iter()
        .map(|g| {
            (0..total).map(|c| PauliPair::from_code(ctx, c).map(|p| g.apply(ctx, p)).code(ctx) as u32).collect()
        })
        .collect();
    let mut parent: Vec<u32> = (0..total as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            let up = parent[parent[x as usize] as usize];
            parent[x as usize] = up;
            x = up;
        }
        x
    }
    for img in &images {
        for (c, &d) in img.iter().enumerate() {
            let (rc, rd) = (find(&mut parent, c as u32), find(&mut parent, d));
            if rc != rd {
                parent[rc.max(rd) as usize] = rc.min(rd);
            }
        }
    }
    let mut orbits: BTreeMap<u32, PairOrbit> = BTreeMap::new();
    for c in 0..total {
        let root = find(&mut parent, c as u32);
        let pair = PauliPair::from_code(ctx, c);
        let inv = invariant_unchecked(ctx, &pair);
        let entry = orbits.entry(root).or_insert(PairOrbit { invariant: inv, size: 0, representative: pair });
        if entry.invariant != inv {
            return Err(Error::Irregular(format!("orbit mixes invariants {} and {inv}", entry.invariant)));
        }
        entry.size += 1;
    }
    let mut list: Vec<PairOrbit> = orbits.into_values().collect();
    list.sort_by_key(|o| o.invariant);
    if let Some(w) = list.windows(2).find(|w| w[0].invariant == w[1].invariant) {
        return Err(Error::Irregular(format!("invariant {} labels two orbits", w[0].invariant)));
    }
    Ok(list)
}

/// Some `g` with `θ(g)` carrying `from` to `to`, by exhaustive search.
pub fn find_mapping(ctx: &FieldContext, from: &PauliPair, to: &PauliPair) -> Option<PslElement> {
    PslElement::all(ctx).find(|g| from.map(|p| g.apply(ctx, p)) == *to)
}
