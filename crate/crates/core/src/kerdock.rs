//! The Kerdock set, maximal commutative Pauli subgroups and `PSL(2, 2^m)`
//! acting on them through the symplectic embedding `θ`.
//!
//! Subgroup `z ∈ F` of the Kerdock partition is `E([I | P_z])` with
//! `P_z = A_{z²} W`, i.e. the Paulis `(a, a z²)`; the last class `∞` is
//! `E([0 | I])`, the Paulis `(0, b)`.
//!
//! `θ(g)` for `g = (α β; γ δ)` sends `(a, b)` to `(aδ² + bγ², aβ² + bα²)`.
//! Row vectors act on the right, so `θ(g)θ(h) = θ(hg)`, and on subgroup labels
//! `θ(g)` acts as the Möbius map of `g⁻¹`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bitmat::BitMatrix;
use crate::error::{Error, Result};
use crate::gf2m::{FieldContext, FieldElement};
use crate::pauli::{PauliIndex, SymplecticMatrix};

/// `P_z = A_{z²} W`, a symmetric matrix; differences of distinct members are invertible.
pub fn kerdock_matrix(ctx: &FieldContext, z: FieldElement) -> BitMatrix {
    ctx.mul_matrix(ctx.square(z)).mul(ctx.gram()).expect("m x m product")
}

/// A point of the projective line `F ∪ {∞}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubgroupLabel {
    Finite(FieldElement),
    Infinity,
}

impl fmt::Display for SubgroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupLabel::Finite(z) => write!(f, "{z}"),
            SubgroupLabel::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for SubgroupLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "inf" {
            Ok(SubgroupLabel::Infinity)
        } else {
            s.parse().map(SubgroupLabel::Finite)
        }
    }
}

impl Serialize for SubgroupLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SubgroupLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

impl SubgroupLabel {
    /// All `N + 1` labels: field elements in coefficient order, then `∞`.
    pub fn all(ctx: &FieldContext) -> impl Iterator<Item = SubgroupLabel> {
        ctx.elements().map(SubgroupLabel::Finite).chain(std::iter::once(SubgroupLabel::Infinity))
    }
}

/// Slope `b / a` of the line through `p`, or `∞` when `a = 0`.
pub fn classify_subgroup(ctx: &FieldContext, p: &PauliIndex) -> Result<SubgroupLabel> {
    if p.is_identity() {
        return Err(Error::IdentityPauli);
    }
    Ok(if p.a.is_zero() {
        SubgroupLabel::Infinity
    } else {
        SubgroupLabel::Finite(ctx.div(p.b, p.a)?)
    })
}

/// The `z` with `p ∈ E([I | P_z])`, i.e. the square root of the slope.
pub fn kerdock_label(ctx: &FieldContext, p: &PauliIndex) -> Result<SubgroupLabel> {
    Ok(match classify_subgroup(ctx, p)? {
        SubgroupLabel::Finite(s) => SubgroupLabel::Finite(ctx.sqrt(s)),
        SubgroupLabel::Infinity => SubgroupLabel::Infinity,
    })
}

/// `f(z) = (β + δz) / (α + γz)` on the projective line.
pub fn mobius_action(ctx: &FieldContext, g: &PslElement, label: SubgroupLabel) -> SubgroupLabel {
    let (num, den) = match label {
        SubgroupLabel::Finite(z) => (ctx.add(g.beta, ctx.mul(g.delta, z)), ctx.add(g.alpha, ctx.mul(g.gamma, z))),
        SubgroupLabel::Infinity => (g.delta, g.gamma),
    };
    if den.is_zero() {
        SubgroupLabel::Infinity
    } else {
        SubgroupLabel::Finite(ctx.div(num, den).expect("nonzero denominator"))
    }
}

/// `(α β; γ δ)` over GF(2^m) with `αδ + βγ = 1`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[FieldElement; 4]", from = "[FieldElement; 4]")]
pub struct PslElement {
    alpha: FieldElement,
    beta: FieldElement,
    gamma: FieldElement,
    delta: FieldElement,
}

impl From<PslElement> for [FieldElement; 4] {
    fn from(g: PslElement) -> Self {
        [g.alpha, g.beta, g.gamma, g.delta]
    }
}

/// No field context is available here, so the determinant is unchecked;
/// validate with [`PslElement::new`] when the input is untrusted.
impl From<[FieldElement; 4]> for PslElement {
    fn from(v: [FieldElement; 4]) -> Self {
        PslElement { alpha: v[0], beta: v[1], gamma: v[2], delta: v[3] }
    }
}

impl fmt::Debug for PslElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.alpha, self.beta, self.gamma, self.delta)
    }
}

impl PslElement {
    pub fn new(
        ctx: &FieldContext,
        alpha: FieldElement,
        beta: FieldElement,
        gamma: FieldElement,
        delta: FieldElement,
    ) -> Result<Self> {
        let g = PslElement { alpha, beta, gamma, delta };
        let det = g.determinant(ctx);
        if det != FieldElement::ONE {
            return Err(Error::Determinant(det));
        }
        Ok(g)
    }

    pub fn identity() -> Self {
        PslElement { alpha: FieldElement::ONE, beta: FieldElement::ZERO, gamma: FieldElement::ZERO, delta: FieldElement::ONE }
    }

    /// `(0 1; 1 0)`, acting as `z ↦ 1/z`.
    pub fn swap() -> Self {
        PslElement { alpha: FieldElement::ZERO, beta: FieldElement::ONE, gamma: FieldElement::ONE, delta: FieldElement::ZERO }
    }

    /// `(1 x; 0 1)`, acting as `z ↦ z + x`.
    pub fn translation(x: FieldElement) -> Self {
        PslElement { alpha: FieldElement::ONE, beta: x, gamma: FieldElement::ZERO, delta: FieldElement::ONE }
    }

    /// `(s 0; 0 s⁻¹)`, acting as `z ↦ z / s²`.
    pub fn diagonal(ctx: &FieldContext, s: FieldElement) -> Result<Self> {
        Ok(PslElement { alpha: s, beta: FieldElement::ZERO, gamma: FieldElement::ZERO, delta: ctx.inv(s)? })
    }

    pub fn alpha(&self) -> FieldElement {
        self.alpha
    }

    pub fn beta(&self) -> FieldElement {
        self.beta
    }

    pub fn gamma(&self) -> FieldElement {
        self.gamma
    }

    pub fn delta(&self) -> FieldElement {
        self.delta
    }

    pub fn entries(&self) -> [FieldElement; 4] {
        (*self).into()
    }

    pub fn determinant(&self, ctx: &FieldContext) -> FieldElement {
        ctx.add(ctx.mul(self.alpha, self.delta), ctx.mul(self.beta, self.gamma))
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, ctx: &FieldContext, rhs: &PslElement) -> PslElement {
        let dot = |x: FieldElement, y: FieldElement, u: FieldElement, v: FieldElement| ctx.add(ctx.mul(x, y), ctx.mul(u, v));
        PslElement {
            alpha: dot(self.alpha, rhs.alpha, self.beta, rhs.gamma),
            beta: dot(self.alpha, rhs.beta, self.beta, rhs.delta),
            gamma: dot(self.gamma, rhs.alpha, self.delta, rhs.gamma),
            delta: dot(self.gamma, rhs.beta, self.delta, rhs.delta),
        }
    }

    /// In characteristic 2 with determinant 1 the inverse is `(δ β; γ α)`.
    pub fn inverse(&self) -> PslElement {
        PslElement { alpha: self.delta, beta: self.beta, gamma: self.gamma, delta: self.alpha }
    }

    /// `|PSL(2, 2^m)| = (N + 1) N (N - 1)`.
    pub fn group_order(ctx: &FieldContext) -> u64 {
        let n = u64::from(ctx.order());
        (n + 1) * n * (n - 1)
    }

    /// Decodes `0 ≤ index < |PSL|`. The first column `(α, γ)` is the nonzero
    /// pair with code `index / N + 1`; the free entry (`δ` if `γ ≠ 0`, else
    /// `β`) is `index % N`.
    pub fn from_index(ctx: &FieldContext, index: u64) -> Result<PslElement> {
        if index >= Self::group_order(ctx) {
            return Err(Error::Parse(format!("PSL index {index} out of range")));
        }
        let n = u64::from(ctx.order());
        let col = PauliIndex::from_code((index / n + 1) as u32, ctx.m());
        let free = ctx.element((index % n) as u32);
        let (alpha, gamma) = (col.a, col.b);
        let (beta, delta) = if gamma.is_zero() {
            (free, ctx.inv(alpha)?)
        } else {
            (ctx.div(ctx.add(FieldElement::ONE, ctx.mul(alpha, free)), gamma)?, free)
        };
        Ok(PslElement { alpha, beta, gamma, delta })
    }

    pub fn index(&self, ctx: &FieldContext) -> u64 {
        let n = u64::from(ctx.order());
        let col = u64::from(PauliIndex::new(self.alpha, self.gamma).code(ctx.m()));
        let free = if self.gamma.is_zero() { self.beta } else { self.delta };
        (col - 1) * n + u64::from(free.bits())
    }

    /// All group elements in index order.
    pub fn all(ctx: &FieldContext) -> impl Iterator<Item = PslElement> + '_ {
        (0..Self::group_order(ctx)).map(move |i| Self::from_index(ctx, i).expect("index in range"))
    }

    /// Uniform over the group.
    pub fn sample<R: Rng + ?Sized>(ctx: &FieldContext, rng: &mut R) -> PslElement {
        Self::from_index(ctx, rng.gen_range(0..Self::group_order(ctx))).expect("index in range")
    }

    /// `θ(g) = [[A_{δ²}, A_{β²}W], [W⁻¹A_{γ²}, A_{α²}ᵀ]]`.
    pub fn to_symplectic(&self, ctx: &FieldContext) -> SymplecticMatrix {
        let a = |z: FieldElement| ctx.mul_matrix(ctx.square(z));
        let w = ctx.gram();
        let top_right = a(self.beta).mul(w).expect("m x m");
        let bottom_left = ctx.gram_inv().mul(&a(self.gamma)).expect("m x m");
        let f = BitMatrix::from_blocks(&a(self.delta), &top_right, &bottom_left, &a(self.alpha).transpose())
            .expect("m x m blocks");
        SymplecticMatrix::new(f).expect("θ(g) is symplectic for determinant-1 g")
    }

    /// Field-level action of `θ(g)`: `(a, b) ↦ (aδ² + bγ², aβ² + bα²)`.
    pub fn apply(&self, ctx: &FieldContext, p: &PauliIndex) -> PauliIndex {
        let sq = |z| ctx.square(z);
        PauliIndex::new(
            ctx.add(ctx.mul(p.a, sq(self.delta)), ctx.mul(p.b, sq(self.gamma))),
            ctx.add(ctx.mul(p.a, sq(self.beta)), ctx.mul(p.b, sq(self.alpha))),
        )
    }
}

pub fn psl_to_symplectic(ctx: &FieldContext, g: &PslElement) -> SymplecticMatrix {
    g.to_symplectic(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{is_symplectic, symplectic_inner};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::{HashMap, HashSet};

    fn ctx(m: usize) -> FieldContext {
        FieldContext::new(m, None).unwrap()
    }

    #[test]
    fn kerdock_matrix_examples() {
        let c = ctx(3);
        assert!(kerdock_matrix(&c, FieldElement::ZERO).is_zero());
        assert_eq!(&kerdock_matrix(&c, FieldElement::ONE), c.gram());
        for x in c.elements() {
            assert!(kerdock_matrix(&c, x).is_symmetric());
            for z in c.elements().filter(|&z| z != x) {
                let diff = kerdock_matrix(&c, x).add(&kerdock_matrix(&c, z)).unwrap();
                assert_eq!(diff.rank(), 3, "P_x + P_z singular for x={x}, z={z}");
            }
        }
    }

    #[test]
    fn classify_examples() {
        let c = ctx(3);
        let a = |i| c.alpha_pow(i);
        let z = FieldElement::ZERO;
        assert_eq!(classify_subgroup(&c, &PauliIndex::new(a(1), a(3))).unwrap(), SubgroupLabel::Finite(a(2)));
        assert_eq!(classify_subgroup(&c, &PauliIndex::new(z, a(1))).unwrap(), SubgroupLabel::Infinity);
        assert_eq!(classify_subgroup(&c, &PauliIndex::new(a(1), z)).unwrap(), SubgroupLabel::Finite(z));
        assert_eq!(classify_subgroup(&c, &PauliIndex::IDENTITY), Err(Error::IdentityPauli));
    }

    #[test]
    fn kerdock_label_matches_matrix_membership() {
        let c = ctx(3);
        for p in PauliIndex::nonzero(&c) {
            match kerdock_label(&c, &p).unwrap() {
                SubgroupLabel::Finite(z) => {
                    let pz = kerdock_matrix(&c, z);
                    assert_eq!(pz.left_mul_vec(p.a.bits()), c.dual_coords(p.b));
                }
                SubgroupLabel::Infinity => assert!(p.a.is_zero()),
            }
        }
    }

    #[test]
    fn classes_partition_and_commute() {
        for m in 2..=4 {
            let c = ctx(m);
            let mut classes: HashMap<SubgroupLabel, Vec<PauliIndex>> = HashMap::new();
            for p in PauliIndex::nonzero(&c) {
                classes.entry(classify_subgroup(&c, &p).unwrap()).or_default().push(p);
            }
            assert_eq!(classes.len() as u32, c.order() + 1);
            for members in classes.values() {
                assert_eq!(members.len() as u32, c.order() - 1);
                for p in members {
                    for q in members {
                        assert_eq!(symplectic_inner(&c, p, q), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn theta_examples() {
        let c = ctx(3);
        assert_eq!(PslElement::identity().to_symplectic(&c), SymplecticMatrix::identity(3));
        let [a, b, cc, d] = PslElement::swap().to_symplectic(&c).matrix().blocks().unwrap();
        assert!(a.is_zero() && d.is_zero());
        assert_eq!(&b, c.gram());
        assert_eq!(&cc, c.gram_inv());
        assert!(PslElement::new(&c, FieldElement::ONE, FieldElement::ONE, FieldElement::ONE, FieldElement::ONE).is_err());
    }

    #[test]
    fn theta_block_form_matches_field_action() {
        let c = ctx(3);
        for g in PslElement::all(&c) {
            let f = g.to_symplectic(&c);
            assert!(is_symplectic(f.matrix()));
            for p in PauliIndex::nonzero(&c) {
                assert_eq!(f.apply(&c, &p), g.apply(&c, &p));
            }
        }
    }

    #[test]
    fn mobius_examples() {
        let c = ctx(3);
        let alpha = c.alpha_pow(1);
        assert_eq!(mobius_action(&c, &PslElement::swap(), SubgroupLabel::Finite(alpha)), SubgroupLabel::Finite(c.alpha_pow(6)));
        assert_eq!(mobius_action(&c, &PslElement::swap(), SubgroupLabel::Finite(FieldElement::ZERO)), SubgroupLabel::Infinity);
        assert_eq!(mobius_action(&c, &PslElement::swap(), SubgroupLabel::Infinity), SubgroupLabel::Finite(FieldElement::ZERO));
        for l in SubgroupLabel::all(&c) {
            assert_eq!(mobius_action(&c, &PslElement::identity(), l), l);
        }
        let x = c.alpha_pow(4);
        let t = PslElement::translation(x);
        for z in c.elements() {
            assert_eq!(mobius_action(&c, &t, SubgroupLabel::Finite(z)), SubgroupLabel::Finite(c.add(z, x)));
        }
        assert_eq!(mobius_action(&c, &t, SubgroupLabel::Infinity), SubgroupLabel::Infinity);
    }

    #[test]
    fn index_round_trip_and_order() {
        let c = ctx(2);
        let all: Vec<_> = PslElement::all(&c).collect();
        assert_eq!(all.len(), 60);
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), 60);
        for (i, g) in all.iter().enumerate() {
            assert_eq!(g.determinant(&c), FieldElement::ONE);
            assert_eq!(g.index(&c), i as u64);
        }
    }

    #[test]
    fn group_laws() {
        let c = ctx(2);
        let all: Vec<_> = PslElement::all(&c).collect();
        for g in &all {
            assert_eq!(g.mul(&c, &g.inverse()), PslElement::identity());
            for h in &all {
                assert_eq!(g.mul(&c, h).determinant(&c), FieldElement::ONE);
            }
        }
    }

    #[test]
    fn sampling_is_valid() {
        let c = ctx(3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            assert_eq!(PslElement::sample(&c, &mut rng).determinant(&c), FieldElement::ONE);
        }
    }

    #[test]
    fn serde_round_trip() {
        let c = ctx(3);
        let g = PslElement::from_index(&c, 77).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert!(json.starts_with("[\"0x"));
        assert_eq!(serde_json::from_str::<PslElement>(&json).unwrap(), g);
        assert_eq!("inf".parse::<SubgroupLabel>().unwrap(), SubgroupLabel::Infinity);
        assert_eq!(serde_json::to_string(&SubgroupLabel::Finite(c.alpha_pow(2))).unwrap(), "\"0x4\"");
    }
}
