//! Pauli operators modulo phase, binary symplectic matrices and transvections.
//!
//! A Pauli `±E(a, b)` is indexed by the field pair `(a, b)` and has the binary
//! form `[⌈a⌉ | ⌊b⌋]`: primal coordinates of `a` in bits `0..m`, dual
//! coordinates of `b` in bits `m..2m`. With that layout the commutation form
//! `Tr(ad + bc)` is the plain binary symplectic form with
//! `Ω = [[0, I], [I, 0]]`.
//!
//! Row vectors act on the right throughout: `x ↦ xF`, so in a product `F₁F₂`
//! the factor `F₁` acts first.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitmat::{col_mask, parity, BitMatrix};
use crate::error::{Error, Result};
use crate::gf2m::{FieldContext, FieldElement};

#[derive(Copy, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliIndex {
    pub a: FieldElement,
    pub b: FieldElement,
}

impl PauliIndex {
    pub const IDENTITY: PauliIndex = PauliIndex { a: FieldElement::ZERO, b: FieldElement::ZERO };

    pub const fn new(a: FieldElement, b: FieldElement) -> Self {
        PauliIndex { a, b }
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Dense index `a | b << m`, a bijection onto `0..N²` (not the binary form).
    pub fn code(&self, m: usize) -> u32 {
        self.a.bits() | (self.b.bits() << m)
    }

    pub fn from_code(code: u32, m: usize) -> Self {
        let mask = col_mask(m);
        PauliIndex::new(FieldElement::from_bits(code & mask), FieldElement::from_bits(code >> m))
    }

    /// Binary form `[⌈a⌉ | ⌊b⌋]`.
    pub fn to_binary(&self, ctx: &FieldContext) -> u32 {
        self.a.bits() | (ctx.dual_coords(self.b) << ctx.m())
    }

    pub fn from_binary(ctx: &FieldContext, x: u32) -> Self {
        let m = ctx.m();
        PauliIndex::new(FieldElement::from_bits(x & col_mask(m)), ctx.from_dual(x >> m))
    }

    /// All `N² - 1` non-identity indices in code order.
    pub fn nonzero(ctx: &FieldContext) -> impl Iterator<Item = PauliIndex> {
        let m = ctx.m();
        let n2 = ctx.order() * ctx.order();
        (1..n2).map(move |c| PauliIndex::from_code(c, m))
    }
}

impl fmt::Debug for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// `Tr(ad + bc)`: 0 when the two Paulis commute, 1 when they anticommute.
pub fn symplectic_inner(ctx: &FieldContext, p: &PauliIndex, q: &PauliIndex) -> u32 {
    ctx.trace(ctx.add(ctx.mul(p.a, q.b), ctx.mul(p.b, q.a)))
}

/// Binary symplectic form `x Ω yᵀ` on `2m`-bit words.
#[inline]
pub fn binary_form(x: u32, y: u32, m: usize) -> u32 {
    parity(x & swap_halves(y, m))
}

#[inline]
fn swap_halves(y: u32, m: usize) -> u32 {
    ((y & col_mask(m)) << m) | (y >> m)
}

/// A `2m × 2m` binary matrix with `FΩFᵀ = Ω`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymplecticMatrix {
    inner: BitMatrix,
}

/// `FΩFᵀ = Ω`, checked row pair by row pair.
pub fn is_symplectic(f: &BitMatrix) -> bool {
    if !f.is_square() || f.ncols() % 2 != 0 {
        return false;
    }
    let m = f.ncols() / 2;
    let rows = f.rows();
    (0..2 * m).all(|i| {
        (i..2 * m).all(|j| {
            let expected = u32::from(j == i + m);
            binary_form(rows[i], rows[j], m) == expected
        })
    })
}

impl SymplecticMatrix {
    pub fn new(f: BitMatrix) -> Result<Self> {
        if is_symplectic(&f) {
            Ok(SymplecticMatrix { inner: f })
        } else {
            Err(Error::NotSymplectic)
        }
    }

    pub(crate) fn new_unchecked(f: BitMatrix) -> Self {
        debug_assert!(is_symplectic(&f));
        SymplecticMatrix { inner: f }
    }

    pub fn identity(m: usize) -> Self {
        SymplecticMatrix { inner: BitMatrix::identity(2 * m) }
    }

    pub fn omega(m: usize) -> Self {
        let rows = (0..2 * m).map(|i| 1u32 << ((i + m) % (2 * m))).collect();
        SymplecticMatrix { inner: BitMatrix::from_rows(rows, 2 * m).expect("2m <= 32") }
    }

    pub fn m(&self) -> usize {
        self.inner.ncols() / 2
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.inner
    }

    pub fn rows(&self) -> &[u32] {
        self.inner.rows()
    }

    pub fn apply_binary(&self, x: u32) -> u32 {
        self.inner.left_mul_vec(x)
    }

    /// Image of a Pauli under conjugation, `[⌈a⌉, ⌊b⌋] F`.
    pub fn apply(&self, ctx: &FieldContext, p: &PauliIndex) -> PauliIndex {
        PauliIndex::from_binary(ctx, self.apply_binary(p.to_binary(ctx)))
    }

    /// Product `self · rhs`: `self` acts first on row vectors.
    pub fn compose(&self, rhs: &SymplecticMatrix) -> Result<SymplecticMatrix> {
        if self.m() != rhs.m() {
            return Err(Error::Dimension(format!("composing m = {} with m = {}", self.m(), rhs.m())));
        }
        Ok(SymplecticMatrix { inner: self.inner.mul(&rhs.inner)? })
    }

    /// `F⁻¹ = [[Dᵀ, Bᵀ], [Cᵀ, Aᵀ]]`.
    pub fn inverse(&self) -> SymplecticMatrix {
        let [a, b, c, d] = self.inner.blocks().expect("square even matrix");
        let inv = BitMatrix::from_blocks(&d.transpose(), &b.transpose(), &c.transpose(), &a.transpose())
            .expect("blocks share a shape");
        SymplecticMatrix { inner: inv }
    }

    /// Rows as hex words, one per line.
    pub fn to_hex_rows(&self) -> Vec<String> {
        self.rows().iter().map(|r| format!("{r:#x}")).collect()
    }

    pub fn from_hex_rows(rows: &[&str]) -> Result<SymplecticMatrix> {
        let words = rows.iter().map(|r| crate::gf2m::parse_hex(r)).collect::<Result<Vec<_>>>()?;
        let n = words.len();
        SymplecticMatrix::new(BitMatrix::from_rows(words, n)?)
    }
}

impl fmt::Debug for SymplecticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symplectic{:?}", self.inner)
    }
}

/// Table-1 style generators of `Sp(2m, F_2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    /// `Ω`, realized by `H^{⊗m}`.
    Omega,
    /// `diag(Q, Q⁻ᵀ)` for invertible `Q`.
    Linear(BitMatrix),
    /// `[[I, P], [0, I]]` for symmetric `P`.
    Shear(BitMatrix),
    /// Partial swap `G_t` exchanging the first `t` coordinate pairs.
    PartialOmega(usize),
}

pub fn generator(m: usize, kind: &Generator) -> Result<SymplecticMatrix> {
    let id = BitMatrix::identity(m);
    let zero = BitMatrix::zeros(m, m);
    let check_shape = |q: &BitMatrix| {
        if q.nrows() != m || q.ncols() != m {
            Err(Error::Dimension(format!("expected {m}x{m} parameter")))
        } else {
            Ok(())
        }
    };
    let f = match kind {
        Generator::Omega => return Ok(SymplecticMatrix::omega(m)),
        Generator::Linear(q) => {
            check_shape(q)?;
            let q_inv = q.inverse().ok_or(Error::Singular)?;
            BitMatrix::from_blocks(q, &zero, &zero, &q_inv.transpose())?
        }
        Generator::Shear(p) => {
            check_shape(p)?;
            if !p.is_symmetric() {
                return Err(Error::Asymmetric);
            }
            BitMatrix::from_blocks(&id, p, &zero, &id)?
        }
        Generator::PartialOmega(t) => {
            if *t < 1 || *t > m {
                return Err(Error::GeneratorIndex { t: *t, m });
            }
            let mut upper = BitMatrix::zeros(m, m);
            let mut lower = BitMatrix::zeros(m, m);
            for i in 0..m {
                if i < *t {
                    upper.set(i, i, true);
                } else {
                    lower.set(i, i, true);
                }
            }
            BitMatrix::from_blocks(&lower, &upper, &upper, &lower)?
        }
    };
    Ok(SymplecticMatrix::new_unchecked(f))
}

/// Symplectic transvection `x ↦ x + ⟨x, h⟩h` with `h = [⌈h₁⌉, ⌊h₂⌋]`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transvection {
    h1: FieldElement,
    h2: FieldElement,
}

impl fmt::Debug for Transvection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z({}, {})", self.h1, self.h2)
    }
}

impl Transvection {
    pub fn new(h1: FieldElement, h2: FieldElement) -> Result<Self> {
        if h1.is_zero() && h2.is_zero() {
            return Err(Error::ZeroTransvection);
        }
        Ok(Transvection { h1, h2 })
    }

    pub fn h1(&self) -> FieldElement {
        self.h1
    }

    pub fn h2(&self) -> FieldElement {
        self.h2
    }

    pub fn as_pauli(&self) -> PauliIndex {
        PauliIndex::new(self.h1, self.h2)
    }

    pub fn from_binary(ctx: &FieldContext, h: u32) -> Result<Self> {
        let p = PauliIndex::from_binary(ctx, h);
        Transvection::new(p.a, p.b)
    }

    pub fn to_binary(&self, ctx: &FieldContext) -> u32 {
        self.as_pauli().to_binary(ctx)
    }

    /// `Z_h = I + Ωhᵀh`.
    pub fn matrix(&self, ctx: &FieldContext) -> SymplecticMatrix {
        let m = ctx.m();
        let h = self.to_binary(ctx);
        let rows = (0..2 * m)
            .map(|i| {
                let coeff = (h >> ((i + m) % (2 * m))) & 1;
                (1u32 << i) ^ if coeff == 1 { h } else { 0 }
            })
            .collect();
        SymplecticMatrix::new_unchecked(BitMatrix::from_rows(rows, 2 * m).expect("2m <= 32"))
    }

    /// Field-level fast path: `(a, b) + Tr(a h₂ + b h₁)(h₁, h₂)`.
    #[inline]
    pub fn apply(&self, ctx: &FieldContext, p: &PauliIndex) -> PauliIndex {
        let t = ctx.trace(ctx.add(ctx.mul(p.a, self.h2), ctx.mul(p.b, self.h1)));
        if t == 1 {
            PauliIndex::new(ctx.add(p.a, self.h1), ctx.add(p.b, self.h2))
        } else {
            *p
        }
    }

    /// Binary fast path on `[⌈a⌉ | ⌊b⌋]` words, given the binary form of `h`.
    #[inline]
    pub fn apply_binary(h: u32, x: u32, m: usize) -> u32 {
        if binary_form(x, h, m) == 1 {
            x ^ h
        } else {
            x
        }
    }

    /// The transvection `Z_{hF}` with `F⁻¹ Z_h F = Z_{hF}`.
    pub fn conjugate(&self, ctx: &FieldContext, f: &SymplecticMatrix) -> Transvection {
        let h = f.apply_binary(self.to_binary(ctx));
        Transvection::from_binary(ctx, h).expect("symplectic maps are injective")
    }

    /// Uniform over the `N² - 1` nonzero vectors.
    pub fn sample<R: Rng + ?Sized>(ctx: &FieldContext, rng: &mut R) -> Transvection {
        let n2 = ctx.order() * ctx.order();
        let p = PauliIndex::from_code(rng.gen_range(1..n2), ctx.m());
        Transvection { h1: p.a, h2: p.b }
    }

    pub fn all(ctx: &FieldContext) -> impl Iterator<Item = Transvection> {
        PauliIndex::nonzero(ctx).map(|p| Transvection { h1: p.a, h2: p.b })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(m: usize) -> FieldContext {
        FieldContext::new(m, None).unwrap()
    }

    #[test]
    fn inner_product_examples() {
        let c = ctx(3);
        let a = |i| c.alpha_pow(i);
        let z = FieldElement::ZERO;
        assert_eq!(symplectic_inner(&c, &PauliIndex::new(a(1), z), &PauliIndex::new(z, a(2))), 1);
        assert_eq!(symplectic_inner(&c, &PauliIndex::new(a(1), z), &PauliIndex::new(FieldElement::ONE, a(1))), 0);
        for p in PauliIndex::nonzero(&c) {
            assert_eq!(symplectic_inner(&c, &p, &p), 0);
        }
    }

    #[test]
    fn binary_form_matches_trace_form() {
        let c = ctx(3);
        for p in PauliIndex::nonzero(&c) {
            for q in PauliIndex::nonzero(&c) {
                assert_eq!(binary_form(p.to_binary(&c), q.to_binary(&c), 3), symplectic_inner(&c, &p, &q));
            }
        }
    }

    #[test]
    fn is_symplectic_examples() {
        assert!(is_symplectic(SymplecticMatrix::omega(2).matrix()));
        assert!(is_symplectic(&BitMatrix::identity(4)));

        // A lone off-diagonal bit in the A block is not symplectic; the
        // matching Q^{-T} correction in the D block makes it L_Q.
        let mut f = BitMatrix::identity(4);
        f.set(0, 1, true);
        assert!(!is_symplectic(&f));
        f.set(3, 2, true);
        assert!(is_symplectic(&f));

        // A single bit at (0, m) is T_P with symmetric P = E_00.
        let mut g = BitMatrix::identity(4);
        g.set(0, 2, true);
        assert!(is_symplectic(&g));
        // (0, m+1) makes P = E_01, which is not symmetric.
        let mut h = BitMatrix::identity(4);
        h.set(0, 3, true);
        assert!(!is_symplectic(&h));
    }

    #[test]
    fn omega_swaps_blocks() {
        let c = ctx(3);
        let om = SymplecticMatrix::omega(3);
        for p in PauliIndex::nonzero(&c) {
            let q = om.apply(&c, &p);
            assert_eq!(q.a.bits(), c.dual_coords(p.b));
            assert_eq!(c.dual_coords(q.b), p.a.bits());
        }
        assert_eq!(om.apply(&c, &PauliIndex::IDENTITY), PauliIndex::IDENTITY);
    }

    #[test]
    fn generators() {
        let c = ctx(3);
        assert_eq!(generator(3, &Generator::Shear(BitMatrix::zeros(3, 3))).unwrap(), SymplecticMatrix::identity(3));
        assert_eq!(generator(3, &Generator::PartialOmega(3)).unwrap(), SymplecticMatrix::omega(3));

        let a = c.companion();
        let l = generator(3, &Generator::Linear(a.clone())).unwrap();
        let [ba, bb, bc, bd] = l.matrix().blocks().unwrap();
        assert_eq!(ba, a);
        assert!(bb.is_zero() && bc.is_zero());
        assert_eq!(bd, a.inverse().unwrap().transpose());

        let singular = BitMatrix::from_bits(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
        assert_eq!(generator(3, &Generator::Linear(singular)), Err(Error::Singular));
        assert_eq!(generator(3, &Generator::Shear(a)), Err(Error::Asymmetric));
        assert!(generator(3, &Generator::PartialOmega(0)).is_err());
        for t in 1..=3 {
            assert!(is_symplectic(generator(3, &Generator::PartialOmega(t)).unwrap().matrix()));
        }
    }

    #[test]
    fn transvection_examples() {
        let c = ctx(3);
        let alpha = c.alpha_pow(1);
        let h = Transvection::new(alpha, FieldElement::ONE).unwrap();
        let p = PauliIndex::new(FieldElement::ONE, FieldElement::ZERO);
        let expected = PauliIndex::new(c.add(FieldElement::ONE, alpha), FieldElement::ONE);
        assert_eq!(h.apply(&c, &p), expected);
        assert_eq!(h.matrix(&c).apply(&c, &p), expected);
        assert_eq!(h.apply(&c, &PauliIndex::IDENTITY), PauliIndex::IDENTITY);
        assert_eq!(Transvection::new(FieldElement::ZERO, FieldElement::ZERO), Err(Error::ZeroTransvection));
    }

    #[test]
    fn transvection_fixes_orthogonal_vectors_m2() {
        let c = ctx(2);
        let h = Transvection::new(FieldElement::ONE, FieldElement::ZERO).unwrap();
        let z = h.matrix(&c);
        for p in PauliIndex::nonzero(&c) {
            if symplectic_inner(&c, &p, &h.as_pauli()) == 0 {
                assert_eq!(z.apply(&c, &p), p);
            }
        }
    }

    #[test]
    fn transvection_involution() {
        let c = ctx(3);
        for h in Transvection::all(&c) {
            let z = h.matrix(&c);
            assert_eq!(z.compose(&z).unwrap(), SymplecticMatrix::identity(3));
        }
    }

    #[test]
    fn conjugate_identity_cases() {
        let c = ctx(3);
        for h in Transvection::all(&c) {
            assert_eq!(h.conjugate(&c, &SymplecticMatrix::identity(3)), h);
            assert_eq!(h.conjugate(&c, &h.matrix(&c)), h);
        }
    }

    #[test]
    fn inverse_block_formula() {
        let c = ctx(3);
        let f = generator(3, &Generator::Linear(c.companion()))
            .unwrap()
            .compose(&Transvection::new(c.alpha_pow(2), c.alpha_pow(5)).unwrap().matrix(&c))
            .unwrap()
            .compose(&generator(3, &Generator::PartialOmega(1)).unwrap())
            .unwrap();
        assert_eq!(f.compose(&f.inverse()).unwrap(), SymplecticMatrix::identity(3));
        assert_eq!(SymplecticMatrix::identity(3).compose(&f).unwrap(), f);
        assert!(SymplecticMatrix::identity(2).compose(&f).is_err());
    }

    #[test]
    fn sampling_never_zero_and_covers_support() {
        let c = ctx(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..2000 {
            let h = Transvection::sample(&c, &mut rng);
            assert!(!h.as_pauli().is_identity());
            seen.insert(h);
        }
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn hex_rows_round_trip() {
        let c = ctx(3);
        let z = Transvection::new(c.alpha_pow(1), FieldElement::ONE).unwrap().matrix(&c);
        let hex = z.to_hex_rows();
        let refs: Vec<&str> = hex.iter().map(String::as_str).collect();
        assert_eq!(SymplecticMatrix::from_hex_rows(&refs).unwrap(), z);
    }
}
