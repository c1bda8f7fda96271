//! Value domains the shared traversal is generic over.
//!
//! The recursion only ever needs a commutative semiring with a few extras:
//! multiplication by an integer (inclusion–exclusion weights), multiplication
//! by a single formal-variable power (the counting slots), and — for the
//! transformed form — scaling by field scalars and powers of a root of unity.
//!
//! Three instantiations:
//! * [`BigSym`] — sparse multivariate polynomials over arbitrary-precision
//!   integers (exact mode).
//! * [`FpSym`] — sparse multivariate polynomials over a prime field, with a
//!   root of unity for the residue transform (used by tests to compare the
//!   two recursion forms symbolically).
//! * [`FpEval`] — plain field scalars: each slot is pre-substituted with a
//!   fixed base value, so a value is the full polynomial evaluated at one
//!   point (evaluated mode).

use neo_algebra::{
    mod_add, mod_inv, mod_mul, mod_pow, root_of_unity, AlgebraError, BigIntOps, FpOps, SparsePoly,
};
use num_bigint::BigInt;

pub trait Algebra {
    type V: Clone + std::fmt::Debug;
    fn zero(&self) -> Self::V;
    fn one(&self) -> Self::V;
    fn is_zero(&self, v: &Self::V) -> bool;
    fn add_assign(&self, a: &mut Self::V, b: &Self::V);
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V;
    /// Multiply by an integer (possibly negative).
    fn scale_i64(&self, a: &mut Self::V, c: i64);
    /// Multiply by the `slot`-th formal variable raised to `e`.
    fn mul_mono(&self, a: &mut Self::V, slot: usize, e: u32);
    /// Short human/trace rendering of a value.
    fn describe(&self, v: &Self::V) -> String;
}

/// Extra structure needed by the transformed (root-of-unity) recursion.
pub trait QAlgebra: Algebra {
    fn p_phi(&self) -> u32;
    /// `omega^e` as a field scalar, for any signed exponent.
    fn omega_pow(&self, e: i64) -> u64;
    fn scale_field(&self, a: &mut Self::V, c: u64);
    fn field_add(&self, a: u64, b: u64) -> u64;
    /// `(p_phi^ncat)^{-1}` in the field.
    fn inv_pcat(&self, ncat: usize) -> Result<u64, AlgebraError>;
}

// ---------------------------------------------------------------------------
// Exact symbolic values
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct BigSym {
    pub nslots: usize,
}

impl Algebra for BigSym {
    type V = SparsePoly<BigInt>;

    fn zero(&self) -> Self::V {
        SparsePoly::zero(self.nslots)
    }
    fn one(&self) -> Self::V {
        SparsePoly::constant(&BigIntOps, self.nslots, 1)
    }
    fn is_zero(&self, v: &Self::V) -> bool {
        v.is_zero()
    }
    fn add_assign(&self, a: &mut Self::V, b: &Self::V) {
        a.add_assign(&BigIntOps, b);
    }
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V {
        a.mul(&BigIntOps, b)
    }
    fn scale_i64(&self, a: &mut Self::V, c: i64) {
        a.scale(&BigIntOps, c);
    }
    fn mul_mono(&self, a: &mut Self::V, slot: usize, e: u32) {
        a.mul_mono(slot, e);
    }
    fn describe(&self, v: &Self::V) -> String {
        format!("terms={}", v.terms.len())
    }
}

// ---------------------------------------------------------------------------
// Symbolic values over a prime field
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct FpSym {
    pub p: u64,
    pub p_phi: u32,
    pub nslots: usize,
    omega: u64,
    omega_inv: u64,
}

impl FpSym {
    pub fn new(p: u64, p_phi: u32, nslots: usize) -> Result<Self, AlgebraError> {
        let omega = root_of_unity(p, p_phi as u64)?;
        let omega_inv = mod_inv(omega, p)?;
        Ok(FpSym {
            p,
            p_phi,
            nslots,
            omega,
            omega_inv,
        })
    }

    fn ops(&self) -> FpOps {
        FpOps { p: self.p }
    }
}

impl Algebra for FpSym {
    type V = SparsePoly<u64>;

    fn zero(&self) -> Self::V {
        SparsePoly::zero(self.nslots)
    }
    fn one(&self) -> Self::V {
        SparsePoly::constant(&self.ops(), self.nslots, 1)
    }
    fn is_zero(&self, v: &Self::V) -> bool {
        v.is_zero()
    }
    fn add_assign(&self, a: &mut Self::V, b: &Self::V) {
        a.add_assign(&self.ops(), b);
    }
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V {
        a.mul(&self.ops(), b)
    }
    fn scale_i64(&self, a: &mut Self::V, c: i64) {
        a.scale(&self.ops(), c);
    }
    fn mul_mono(&self, a: &mut Self::V, slot: usize, e: u32) {
        a.mul_mono(slot, e);
    }
    fn describe(&self, v: &Self::V) -> String {
        format!("terms={}", v.terms.len())
    }
}

impl QAlgebra for FpSym {
    fn p_phi(&self) -> u32 {
        self.p_phi
    }
    fn omega_pow(&self, e: i64) -> u64 {
        omega_pow_impl(self.omega, self.omega_inv, self.p, self.p_phi, e)
    }
    fn scale_field(&self, a: &mut Self::V, c: u64) {
        if c == 0 {
            a.terms.clear();
            return;
        }
        let old = std::mem::take(&mut a.terms);
        for (k, v) in old {
            let s = mod_mul(v, c, self.p);
            if s != 0 {
                a.terms.insert(k, s);
            }
        }
    }
    fn field_add(&self, a: u64, b: u64) -> u64 {
        mod_add(a, b, self.p)
    }
    fn inv_pcat(&self, ncat: usize) -> Result<u64, AlgebraError> {
        mod_inv(mod_pow(self.p_phi as u64, ncat as u64, self.p), self.p)
    }
}

// ---------------------------------------------------------------------------
// Evaluated values
// ---------------------------------------------------------------------------

/// Field scalars with every slot substituted by a fixed base value; the
/// evaluated mode runs the whole recursion on these.
#[derive(Debug, Clone)]
pub struct FpEval {
    pub p: u64,
    pub p_phi: u32,
    /// value substituted for the `slot`-th formal variable
    pub slot_base: Vec<u64>,
    omega: u64,
    omega_inv: u64,
}

impl FpEval {
    pub fn new(p: u64, p_phi: u32, slot_base: Vec<u64>) -> Result<Self, AlgebraError> {
        let omega = root_of_unity(p, p_phi as u64)?;
        let omega_inv = mod_inv(omega, p)?;
        Ok(FpEval {
            p,
            p_phi,
            slot_base,
            omega,
            omega_inv,
        })
    }
}

impl Algebra for FpEval {
    type V = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, v: &u64) -> bool {
        *v == 0
    }
    fn add_assign(&self, a: &mut u64, b: &u64) {
        *a = mod_add(*a, *b, self.p);
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mod_mul(*a, *b, self.p)
    }
    fn scale_i64(&self, a: &mut u64, c: i64) {
        *a = mod_mul(*a, neo_algebra::mod_i64(c, self.p), self.p);
    }
    fn mul_mono(&self, a: &mut u64, slot: usize, e: u32) {
        if e > 0 {
            *a = mod_mul(*a, mod_pow(self.slot_base[slot], e as u64, self.p), self.p);
        }
    }
    fn describe(&self, v: &u64) -> String {
        v.to_string()
    }
}

impl QAlgebra for FpEval {
    fn p_phi(&self) -> u32 {
        self.p_phi
    }
    fn omega_pow(&self, e: i64) -> u64 {
        omega_pow_impl(self.omega, self.omega_inv, self.p, self.p_phi, e)
    }
    fn scale_field(&self, a: &mut u64, c: u64) {
        *a = mod_mul(*a, c, self.p);
    }
    fn field_add(&self, a: u64, b: u64) -> u64 {
        mod_add(a, b, self.p)
    }
    fn inv_pcat(&self, ncat: usize) -> Result<u64, AlgebraError> {
        mod_inv(mod_pow(self.p_phi as u64, ncat as u64, self.p), self.p)
    }
}

fn omega_pow_impl(omega: u64, omega_inv: u64, p: u64, p_phi: u32, e: i64) -> u64 {
    let m = p_phi as i64;
    let r = ((e % m) + m) % m;
    if e >= 0 {
        mod_pow(omega, r as u64, p)
    } else {
        // omega^e = (omega^{-1})^{-e}; use the reduced positive exponent of -e
        let r_neg = (((-e) % m) + m) % m;
        mod_pow(omega_inv, r_neg as u64, p)
    }
}
