//! Arithmetic in GF(2^m) with primal and dual coordinates.
//!
//! Elements are stored by their primal coordinates: bit `i` of the word is the
//! coefficient of `α^i`, where `α` is a root of the context's primitive
//! polynomial. Polynomials use the same little-endian layout, so
//! `x³ + x + 1` is `0xB`.
//!
//! The trace form `Tr(ab)` is the bilinear form `⌈a⌉ W ⌈b⌉ᵀ` with the Gram
//! matrix `W_ij = Tr(α^{i+j})`; dual coordinates are `⌊a⌋ = ⌈a⌉ W`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bitmat::{parity, vec_mul, BitMatrix};
use crate::error::{Error, Result};

pub const MIN_DEGREE: usize = 2;
pub const MAX_DEGREE: usize = 16;

/// Default primitive polynomial for each degree, indexed by `m - 2`.
pub const DEFAULT_POLYNOMIALS: [u32; 15] = [
    0x7,     // x^2 + x + 1
    0xB,     // x^3 + x + 1
    0x13,    // x^4 + x + 1
    0x25,    // x^5 + x^2 + 1
    0x43,    // x^6 + x + 1
    0x89,    // x^7 + x^3 + 1
    0x11D,   // x^8 + x^4 + x^3 + x^2 + 1
    0x211,   // x^9 + x^4 + 1
    0x409,   // x^10 + x^3 + 1
    0x805,   // x^11 + x^2 + 1
    0x1053,  // x^12 + x^6 + x^4 + x + 1
    0x201B,  // x^13 + x^4 + x^3 + x + 1
    0x4443,  // x^14 + x^10 + x^6 + x + 1
    0x8003,  // x^15 + x + 1
    0x1100B, // x^16 + x^12 + x^3 + x + 1
];

pub fn default_polynomial(m: usize) -> Option<u32> {
    (MIN_DEGREE..=MAX_DEGREE).contains(&m).then(|| DEFAULT_POLYNOMIALS[m - MIN_DEGREE])
}

/// An element of GF(2^m) in primal coordinates.
///
/// Serialized as a hex string such as `"0x5"`.
#[derive(Copy, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub const fn from_bits(bits: u32) -> Self {
        FieldElement(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

impl FromStr for FieldElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_hex(s).map(FieldElement)
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn parse_hex(s: &str) -> Result<u32> {
    let t = s.trim();
    let digits = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
    u32::from_str_radix(digits, 16).map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

/// Immutable arithmetic environment for GF(2^m).
#[derive(Clone)]
pub struct FieldContext {
    m: usize,
    poly: u32,
    order: u32,
    // exp[i] = α^i for 0 <= i < 2(N-1), so products skip the reduction mod N-1.
    exp: Vec<u32>,
    log: Vec<u32>,
    trace_mask: u32,
    gram: BitMatrix,
    gram_inv: BitMatrix,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldContext").field("m", &self.m).field("poly", &format_args!("{:#x}", self.poly)).finish()
    }
}

fn poly_degree(p: u32) -> Option<usize> {
    (p != 0).then(|| 31 - p.leading_zeros() as usize)
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b).expect("nonzero divisor");
    while let Some(da) = poly_degree(a) {
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Smallest nontrivial factor of `poly`, found by trial division up to half its degree.
fn find_factor(poly: u32) -> Option<u32> {
    let deg = poly_degree(poly)?;
    (1..=deg / 2).flat_map(|d| (1u32 << d)..(1u32 << (d + 1))).find(|&q| poly_rem(poly, q) == 0)
}

impl FieldContext {
    /// Builds GF(2^m) from `poly`, or from the default table when `poly` is `None`.
    pub fn new(m: usize, poly: Option<u32>) -> Result<Self> {
        if !(MIN_DEGREE..=MAX_DEGREE).contains(&m) {
            return Err(Error::DegreeOutOfRange(m));
        }
        let poly = poly.unwrap_or(DEFAULT_POLYNOMIALS[m - MIN_DEGREE]);
        if poly_degree(poly) != Some(m) {
            return Err(Error::PolynomialDegree { poly, m });
        }
        if let Some(factor) = find_factor(poly) {
            return Err(Error::Reducible { poly, factor });
        }

        let n = 1u32 << m;
        let group = n - 1;
        let mut exp = Vec::with_capacity(2 * group as usize);
        let mut log = vec![0u32; n as usize];
        let mut x = 1u32;
        let mut order = 0;
        loop {
            if order > 0 && x == 1 {
                break;
            }
            log[x as usize] = order;
            exp.push(x);
            order += 1;
            x <<= 1;
            if x & n != 0 {
                x ^= poly;
            }
            if order > group {
                break;
            }
        }
        if order != group {
            return Err(Error::NotPrimitive { poly, order, expected: group });
        }
        exp.extend_from_within(..);

        let mut ctx = FieldContext {
            m,
            poly,
            order: n,
            exp,
            log,
            trace_mask: 0,
            gram: BitMatrix::zeros(m, m),
            gram_inv: BitMatrix::zeros(m, m),
        };
        for i in 0..m {
            let t = ctx.trace_frobenius(FieldElement(1 << i));
            ctx.trace_mask |= t << i;
        }
        let gram_rows = (0..m)
            .map(|i| {
                (0..m).fold(0u32, |acc, j| {
                    acc | (ctx.trace(ctx.mul(FieldElement(1 << i), FieldElement(1 << j))) << j)
                })
            })
            .collect();
        ctx.gram = BitMatrix::from_rows(gram_rows, m)?;
        ctx.gram_inv = ctx.gram.inverse().ok_or(Error::Singular)?;
        Ok(ctx)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Field size `N = 2^m`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn polynomial(&self) -> u32 {
        self.poly
    }

    /// The Gram matrix `W`.
    pub fn gram(&self) -> &BitMatrix {
        &self.gram
    }

    pub fn gram_inv(&self) -> &BitMatrix {
        &self.gram_inv
    }

    pub fn element(&self, bits: u32) -> FieldElement {
        debug_assert!(bits < self.order);
        FieldElement(bits)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order).map(FieldElement)
    }

    /// `α^i`, with `i` taken modulo `N - 1`.
    pub fn alpha_pow(&self, i: u64) -> FieldElement {
        FieldElement(self.exp[(i % u64::from(self.order - 1)) as usize])
    }

    /// Discrete logarithm base `α`; `None` for zero.
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        (!a.is_zero()).then(|| self.log[a.0 as usize])
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 ^ b.0)
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        FieldElement(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let l = self.log[a.0 as usize];
        Ok(FieldElement(self.exp[((self.order - 1 - l) % (self.order - 1)) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let l = u64::from(self.log[a.0 as usize]);
        self.alpha_pow(l * (e % u64::from(self.order - 1)))
    }

    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// Unique square root, `a^(N/2)`.
    pub fn sqrt(&self, a: FieldElement) -> FieldElement {
        self.pow(a, u64::from(self.order / 2))
    }

    /// Absolute trace, read off the precomputed traces of the primal basis.
    #[inline]
    pub fn trace(&self, a: FieldElement) -> u32 {
        parity(a.0 & self.trace_mask)
    }

    /// `Tr(x) = x + x² + … + x^(2^(m-1))` evaluated in the field.
    pub fn trace_frobenius(&self, a: FieldElement) -> u32 {
        let mut acc = FieldElement::ZERO;
        let mut x = a;
        for _ in 0..self.m {
            acc = self.add(acc, x);
            x = self.mul(x, x);
        }
        debug_assert!(acc.0 <= 1, "trace must land in F_2");
        acc.0
    }

    /// Dual coordinates `⌊a⌋ = ⌈a⌉ W`.
    #[inline]
    pub fn dual_coords(&self, a: FieldElement) -> u32 {
        vec_mul(a.0, self.gram.rows())
    }

    /// Inverse of [`dual_coords`](Self::dual_coords).
    #[inline]
    pub fn from_dual(&self, dual: u32) -> FieldElement {
        FieldElement(vec_mul(dual, self.gram_inv.rows()))
    }

    /// Matrix `A_z` of multiplication by `z`: `⌈xz⌉ = ⌈x⌉ A_z`.
    pub fn mul_matrix(&self, z: FieldElement) -> BitMatrix {
        let rows = (0..self.m).map(|i| self.mul(FieldElement(1 << i), z).0).collect();
        BitMatrix::from_rows(rows, self.m).expect("field products fit in m bits")
    }

    /// Companion matrix `A = A_α` of the defining polynomial.
    pub fn companion(&self) -> BitMatrix {
        self.mul_matrix(self.alpha_pow(1))
    }
}
