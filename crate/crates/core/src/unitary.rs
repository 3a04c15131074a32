//! Dense unitary realizations for small `m`, used as an independent oracle for
//! the binary symplectic layer, and frame potentials of finite ensembles.
//!
//! Qubit `i` carries bit `i` of a binary vector `v`; the first tensor factor
//! is the most significant, so `e_v` is basis vector number `rev(v)` with the
//! `m` bits reversed. `D(a, b) e_v = (-1)^{v·⌊b⌋} e_{v + ⌈a⌉}` and
//! `E(a, b) = i^{Tr(ab)} D(a, b)` is Hermitian. Functions that take binary
//! words instead of a field context also work for `m = 1`.

use std::collections::{HashMap, VecDeque};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitmat::{col_mask, parity, BitMatrix};
use crate::error::{Error, Result};
use crate::gf2m::FieldContext;
use crate::kerdock::PslElement;
use crate::pauli::{generator, Generator, PauliIndex, SymplecticMatrix, Transvection};
use crate::sampler::DesignSample;

pub const UNITARY_MAX_M: usize = 3;
/// Entrywise tolerance of [`conjugation_check`].
pub const CONJUGATION_TOLERANCE: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct DenseUnitary {
    m: usize,
    mat: DMatrix<Complex64>,
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 || m > UNITARY_MAX_M {
        Err(Error::TooLarge { what: "dense unitaries", m, cap: UNITARY_MAX_M })
    } else {
        Ok(())
    }
}

fn basis(v: u32, m: usize) -> usize {
    (v.reverse_bits() >> (32 - m)) as usize
}

impl DenseUnitary {
    pub fn identity(m: usize) -> Result<Self> {
        check_m(m)?;
        let n = 1 << m;
        Ok(DenseUnitary { m, mat: DMatrix::identity(n, n) })
    }

    /// Wraps a matrix after checking `UU† = I` to `1e-10`.
    pub fn from_matrix(m: usize, mat: DMatrix<Complex64>) -> Result<Self> {
        check_m(m)?;
        let u = DenseUnitary { m, mat };
        if u.mat.nrows() != 1 << m || u.mat.ncols() != 1 << m {
            return Err(Error::Dimension(format!("expected {0}x{0}", 1 << m)));
        }
        if !u.is_unitary(1e-10) {
            return Err(Error::Dimension("matrix is not unitary".into()));
        }
        Ok(u)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let n = self.mat.nrows();
        let p = &self.mat * self.mat.adjoint();
        (&p - DMatrix::<Complex64>::identity(n, n)).iter().all(|z| z.norm() <= tol)
    }

    /// `self · rhs` as matrices.
    pub fn mul(&self, rhs: &DenseUnitary) -> DenseUnitary {
        DenseUnitary { m: self.m, mat: &self.mat * &rhs.mat }
    }

    pub fn adjoint(&self) -> DenseUnitary {
        DenseUnitary { m: self.m, mat: self.mat.adjoint() }
    }

    pub fn scale(&self, z: Complex64) -> DenseUnitary {
        DenseUnitary { m: self.m, mat: &self.mat * z }
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// Entries as `re,im` pairs, one matrix row per line.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for i in 0..self.mat.nrows() {
            let row: Vec<String> = (0..self.mat.ncols()).map(|j| format!("{},{}", self.mat[(i, j)].re, self.mat[(i, j)].im)).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// `D` or `E` for the binary word `[⌈a⌉ | ⌊b⌋]`.
pub fn pauli_unitary_binary(m: usize, x: u32, hermitian: bool) -> Result<DenseUnitary> {
    check_m(m)?;
    let n = 1usize << m;
    let a = x & col_mask(m);
    let b = x >> m;
    let phase = if hermitian && parity(a & b) == 1 { I } else { Complex64::new(1.0, 0.0) };
    let mut mat = DMatrix::zeros(n, n);
    for v in 0..n as u32 {
        let sign = if parity(v & b) == 1 { -1.0 } else { 1.0 };
        mat[(basis(v ^ a, m), basis(v, m))] = phase * sign;
    }
    Ok(DenseUnitary { m, mat })
}

pub fn pauli_unitary(ctx: &FieldContext, p: &PauliIndex, hermitian: bool) -> Result<DenseUnitary> {
    pauli_unitary_binary(ctx.m(), p.to_binary(ctx), hermitian)
}

fn hadamard_on(m: usize, qubits: usize) -> DenseUnitary {
    let n = 1usize << m;
    let low = col_mask(qubits);
    let scale = (0.5f64).sqrt().powi(qubits as i32);
    let mat = DMatrix::from_fn(n, n, |r, c| {
        let (u, v) = (basis(r as u32, m) as u32, basis(c as u32, m) as u32);
        if (u ^ v) & !low != 0 {
            Complex64::new(0.0, 0.0)
        } else if parity(u & v & low) == 1 {
            Complex64::new(-scale, 0.0)
        } else {
            Complex64::new(scale, 0.0)
        }
    });
    DenseUnitary { m, mat }
}

/// Unitary realizing a generator: `H^{⊗m}`, `ℓ_Q: e_v ↦ e_{vQ}`,
/// `t_P = diag(i^{vPvᵀ mod 4})`, or `H^{⊗t} ⊗ I`.
pub fn generator_unitary(m: usize, kind: &Generator) -> Result<DenseUnitary> {
    check_m(m)?;
    generator(m, kind)?;
    let n = 1usize << m;
    Ok(match kind {
        Generator::Omega => hadamard_on(m, m),
        Generator::PartialOmega(t) => hadamard_on(m, *t),
        Generator::Linear(q) => {
            let mut mat = DMatrix::zeros(n, n);
            for v in 0..n as u32 {
                mat[(basis(q.left_mul_vec(v), m), basis(v, m))] = Complex64::new(1.0, 0.0);
            }
            DenseUnitary { m, mat }
        }
        Generator::Shear(p) => {
            let mut mat = DMatrix::zeros(n, n);
            for v in 0..n as u32 {
                let quad: u32 = (0..m)
                    .filter(|&j| (v >> j) & 1 == 1)
                    .map(|j| (p.row(j) & v).count_ones())
                    .sum();
                mat[(basis(v, m), basis(v, m))] = I.powu(quad % 4);
            }
            DenseUnitary { m, mat }
        }
    })
}

/// `(I + i E(h)) / √2`.
pub fn transvection_unitary_binary(m: usize, h: u32) -> Result<DenseUnitary> {
    if h == 0 {
        return Err(Error::ZeroTransvection);
    }
    let e = pauli_unitary_binary(m, h, true)?;
    let n = 1usize << m;
    let mat = (DMatrix::<Complex64>::identity(n, n) + &e.mat * I) * Complex64::new(0.5f64.sqrt(), 0.0);
    Ok(DenseUnitary { m, mat })
}

pub fn transvection_unitary(ctx: &FieldContext, h: &Transvection) -> Result<DenseUnitary> {
    transvection_unitary_binary(ctx.m(), h.to_binary(ctx))
}

/// Generator factors of `θ(g)`, first-acting factor first.
///
/// For `γ ≠ 0`: `T_{A²_{δ/γ}W} · L_{A_γ^{-2}} · Ω · L_{W⁻¹} · T_{A²_{α/γ}W}`.
/// For `γ = 0`: `L_{A_δ²} · T_{A²_{β/δ}W}`.
pub fn psl_factors(ctx: &FieldContext, g: &PslElement) -> Result<Vec<Generator>> {
    let shear = |z| Generator::Shear(ctx.mul_matrix(ctx.square(z)).mul(ctx.gram()).expect("m x m"));
    let lin = |z| Generator::Linear(ctx.mul_matrix(ctx.square(z)));
    Ok(if g.gamma().is_zero() {
        vec![lin(g.delta()), shear(ctx.div(g.beta(), g.delta())?)]
    } else {
        vec![
            shear(ctx.div(g.delta(), g.gamma())?),
            lin(ctx.inv(g.gamma())?),
            Generator::Omega,
            Generator::Linear(ctx.gram_inv().clone()),
            shear(ctx.div(g.alpha(), g.gamma())?),
        ]
    })
}

/// Product of generator unitaries; the first-acting factor is rightmost.
pub fn psl_unitary(ctx: &FieldContext, g: &PslElement) -> Result<DenseUnitary> {
    let mut u = DenseUnitary::identity(ctx.m())?;
    for f in psl_factors(ctx, g)? {
        u = generator_unitary(ctx.m(), &f)?.mul(&u);
    }
    Ok(u)
}

/// Checks `U E(x) U† = ±E(xF)` for every nonzero `x`; reports the first
/// failing `x` (binary word) and its residual.
pub fn conjugation_check(u: &DenseUnitary, f: &SymplecticMatrix) -> Result<()> {
    let m = u.m;
    if f.m() != m {
        return Err(Error::Dimension(format!("unitary on {m} qubits, matrix for m = {}", f.m())));
    }
    let ud = u.mat.adjoint();
    for x in 1..(1u32 << (2 * m)) {
        let lhs = &u.mat * &pauli_unitary_binary(m, x, true)?.mat * &ud;
        let target = pauli_unitary_binary(m, f.apply_binary(x), true)?.mat;
        let plus = (&lhs - &target).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let minus = (&lhs + &target).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let residual = plus.min(minus);
        if !(residual <= CONJUGATION_TOLERANCE) {
            return Err(Error::Conjugation { pauli: x, residual });
        }
    }
    Ok(())
}

/// Unitaries with probability weights.
#[derive(Clone, Debug)]
pub struct Ensemble {
    unitaries: Vec<DenseUnitary>,
    weights: Vec<f64>,
}

impl Ensemble {
    pub fn uniform(unitaries: Vec<DenseUnitary>) -> Result<Self> {
        let w = 1.0 / unitaries.len().max(1) as f64;
        let n = unitaries.len();
        Self::weighted(unitaries, vec![w; n])
    }

    pub fn weighted(unitaries: Vec<DenseUnitary>, weights: Vec<f64>) -> Result<Self> {
        if unitaries.is_empty() || unitaries.len() != weights.len() {
            return Err(Error::Dimension("ensemble needs one weight per unitary".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::Dimension("weights must be non-negative and sum to 1".into()));
        }
        if unitaries.iter().any(|u| u.m != unitaries[0].m) {
            return Err(Error::Dimension("mixed qubit counts".into()));
        }
        Ok(Ensemble { unitaries, weights })
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub fn unitaries(&self) -> &[DenseUnitary] {
        &self.unitaries
    }
}

/// Frame potential estimate with its sampling spread.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FramePotential {
    pub k: u32,
    pub samples: usize,
    /// `Σ_{i,j} w_i w_j |tr(U_i† U_j)|^{2k}`, diagonal included.
    pub value: f64,
    /// The same sum over `i ≠ j` only, renormalized: an unbiased estimate
    /// of the ensemble's frame potential when the unitaries are i.i.d. draws.
    pub off_diagonal: f64,
    /// Standard error of `off_diagonal` under i.i.d. sampling.
    pub standard_error: f64,
}

/// `F_k` of a weighted ensemble. For an exact `k`-design with `N ≥ k` the
/// value is `k!`; it is never smaller.
pub fn frame_potential(ensemble: &Ensemble, k: u32) -> FramePotential {
    let flat: Vec<Vec<Complex64>> = ensemble.unitaries.iter().map(|u| u.mat.iter().copied().collect()).collect();
    let w = &ensemble.weights;
    let s = flat.len();
    let term = |i: usize, j: usize| -> f64 {
        let tr: Complex64 = flat[i].iter().zip(&flat[j]).map(|(a, b)| a.conj() * b).sum();
        tr.norm_sqr().powi(k as i32)
    };
    // Per row: weighted sum over j > i, unweighted sums over j != i for the
    // spread estimate (filled symmetrically afterwards).
    let rows: Vec<(f64, Vec<(usize, f64)>)> = (0..s)
        .into_par_iter()
        .map(|i| {
            let mut upper = 0.0;
            let mut terms = Vec::with_capacity(s - i - 1);
            for j in (i + 1)..s {
                let t = term(i, j);
                upper += w[j] * t;
                terms.push((j, t));
            }
            (w[i] * upper, terms)
        })
        .collect();
    let diag: f64 = (0..s).map(|i| w[i] * w[i] * term(i, i)).sum();
    let upper: f64 = rows.iter().map(|(u, _)| u).sum();
    let value = diag + 2.0 * upper;

    let mut row_sums = vec![0.0; s];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for (i, (_, terms)) in rows.iter().enumerate() {
        for &(j, t) in terms {
            row_sums[i] += t;
            row_sums[j] += t;
            sum += t;
            sum_sq += t * t;
        }
    }
    let pairs = (s * s.saturating_sub(1) / 2).max(1) as f64;
    let mean = sum / pairs;
    let var_pair = (sum_sq / pairs - mean * mean).max(0.0);
    let row_means: Vec<f64> = row_sums.iter().map(|r| r / (s.saturating_sub(1)).max(1) as f64).collect();
    let var_row = row_means.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / s.max(2).saturating_sub(1) as f64;
    let sf = s as f64;
    let standard_error = (4.0 * var_row / sf + 2.0 * var_pair / (sf * sf)).sqrt();
    FramePotential { k, samples: s, value, off_diagonal: mean, standard_error }
}

/// Upper margin `δ(ε, S) = N^{2k} ε² + N^{2k} / S + 4·SE` for a frame
/// potential estimate from `S` samples of an `ε`-approximate design.
///
/// The first term bounds the excess frame potential of the ensemble itself
/// through the moment-operator norm; the second is the expected bias of the
/// diagonal `i = j` terms; the third covers sampling noise.
pub fn frame_potential_margin(m: usize, k: u32, eps: f64, fp: &FramePotential) -> f64 {
    let nk = ((1u64 << m) as f64).powi(2 * k as i32);
    nk * eps * eps + nk / fp.samples as f64 + 4.0 * fp.standard_error
}

/// Caches per-`m` generator unitaries to realize many samples cheaply.
pub struct UnitaryFactory<'a> {
    ctx: &'a FieldContext,
    transvections: Vec<DenseUnitary>,
    paulis: Vec<DenseUnitary>,
    psl: HashMap<u64, DenseUnitary>,
}

impl<'a> UnitaryFactory<'a> {
    pub fn new(ctx: &'a FieldContext) -> Result<Self> {
        check_m(ctx.m())?;
        let n2 = 1u32 << (2 * ctx.m());
        let transvections = (1..n2).map(|h| transvection_unitary_binary(ctx.m(), h)).collect::<Result<_>>()?;
        let paulis = (0..n2).map(|x| pauli_unitary_binary(ctx.m(), x, false)).collect::<Result<_>>()?;
        Ok(UnitaryFactory { ctx, transvections, paulis, psl: HashMap::new() })
    }

    fn psl(&mut self, g: &PslElement) -> Result<&DenseUnitary> {
        let key = g.index(self.ctx);
        if !self.psl.contains_key(&key) {
            let u = psl_unitary(self.ctx, g)?;
            self.psl.insert(key, u);
        }
        Ok(&self.psl[&key])
    }

    /// `D(pauli) · U_θ · U_{Z_t} ⋯ U_{Z_1}`, whose conjugation action is the
    /// sample's `composed` matrix.
    pub fn realize(&mut self, sample: &DesignSample) -> Result<DenseUnitary> {
        let ctx = self.ctx;
        let mut u = DenseUnitary::identity(ctx.m())?;
        for h in &sample.transvections {
            u = self.transvections[h.to_binary(ctx) as usize - 1].mul(&u);
        }
        let theta = self.psl(&sample.psl)?.clone();
        Ok(self.paulis[sample.pauli.to_binary(ctx) as usize].mul(&theta.mul(&u)))
    }
}

/// Uniform ensemble of the realized samples.
pub fn ensemble_from_samples(ctx: &FieldContext, samples: &[DesignSample]) -> Result<Ensemble> {
    let mut factory = UnitaryFactory::new(ctx)?;
    let unitaries = samples.iter().map(|s| factory.realize(s)).collect::<Result<Vec<_>>>()?;
    Ensemble::uniform(unitaries)
}

/// Every `PSL(2, 2^m)` unitary times every Pauli `D(a, b)`.
pub fn kerdock_ensemble(ctx: &FieldContext) -> Result<Ensemble> {
    let n2 = 1u32 << (2 * ctx.m());
    let paulis = (0..n2).map(|x| pauli_unitary_binary(ctx.m(), x, false)).collect::<Result<Vec<_>>>()?;
    let mut unitaries = Vec::new();
    for g in PslElement::all(ctx) {
        let u = psl_unitary(ctx, &g)?;
        unitaries.extend(paulis.iter().map(|p| p.mul(&u)));
    }
    Ensemble::uniform(unitaries)
}

fn phase_key(u: &DenseUnitary) -> Vec<(i64, i64)> {
    let pivot = u.mat.iter().find(|z| z.norm() > 1e-6).copied().expect("nonzero unitary");
    let phase = pivot.conj() / pivot.norm();
    u.mat.iter().map(|z| z * phase).map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64)).collect()
}

/// The Clifford group on `m` qubits modulo global phase, by breadth-first
/// search over Hadamard, phase and CNOT gates: 24 elements for `m = 1`,
/// 11520 for `m = 2`.
pub fn clifford_group(m: usize) -> Result<Vec<DenseUnitary>> {
    if m > 2 {
        return Err(Error::TooLarge { what: "Clifford group enumeration", m, cap: 2 });
    }
    check_m(m)?;
    let mut gates = Vec::new();
    for q in 0..m {
        let mut swap_to_front = BitMatrix::identity(m);
        if q != 0 {
            swap_to_front = BitMatrix::from_rows((0..m).map(|i| 1 << if i == 0 { q } else if i == q { 0 } else { i }).collect(), m)?;
        }
        let perm = generator_unitary(m, &Generator::Linear(swap_to_front))?;
        let h = hadamard_on(m, 1);
        gates.push(perm.mul(&h).mul(&perm));
        let mut p = BitMatrix::zeros(m, m);
        p.set(q, q, true);
        gates.push(generator_unitary(m, &Generator::Shear(p))?);
        for target in (0..m).filter(|&t| t != q) {
            let mut cnot = BitMatrix::identity(m);
            cnot.set(q, target, true);
            gates.push(generator_unitary(m, &Generator::Linear(cnot))?);
        }
    }
    let id = DenseUnitary::identity(m)?;
    let mut seen = HashMap::new();
    seen.insert(phase_key(&id), ());
    let mut group = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(u) = queue.pop_front() {
        for g in &gates {
            let v = g.mul(&u);
            if seen.insert(phase_key(&v), ()).is_none() {
                group.push(v.clone());
                queue.push_back(v);
            }
        }
    }
    Ok(group)
}
