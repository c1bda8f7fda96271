//! Finite-field and exact-integer algebra underpinning the model checker:
//! 64-bit modular arithmetic, prime plans, roots of unity, discrete Fourier
//! transforms over function spaces `D -> Z_r`, Chinese-remainder coefficient
//! reconstruction, zeta/Moebius subset transforms, inclusion-exclusion
//! coefficients, and sparse multivariate polynomials.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("no {r}-th root of unity modulo {p} ({r} does not divide {p}-1)")]
    NoRoot { p: u64, r: u64 },
    #[error("no inverse of {0} modulo {1}")]
    NoInverse(u64, u64),
    #[error("prime plan search exceeded the sanity cap")]
    PlanOverflow,
    #[error("degree bound {degree} too high for plan (smallest prime {prime})")]
    DegreeTooHigh { degree: u64, prime: u64 },
    #[error("allowance exceeds expectation at position {0}")]
    BadAllow(usize),
}

// ---------------------------------------------------------------------------
// Modular arithmetic
// ---------------------------------------------------------------------------

#[inline]
pub fn mod_add(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b; // a,b < p <= 2^63, no overflow
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn mod_sub(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn mod_mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, p);
        }
        base = mod_mul(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime `p` via Fermat's little theorem.
pub fn mod_inv(a: u64, p: u64) -> Result<u64, AlgebraError> {
    if a % p == 0 {
        return Err(AlgebraError::NoInverse(a, p));
    }
    Ok(mod_pow(a, p - 2, p))
}

/// Reduce a signed value into `[0, p)`.
#[inline]
pub fn mod_i64(v: i64, p: u64) -> u64 {
    let r = v.rem_euclid(p as i64);
    r as u64
}

// ---------------------------------------------------------------------------
// Primality
// ---------------------------------------------------------------------------

/// Deterministic primality test for u64: trial division below 10^6,
/// Miller-Rabin with a known-complete base set above.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    if n < 1_000_000 {
        let mut d = 41u64;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 2;
        }
        return true;
    }
    // write n-1 = 2^s * d
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factors of `n` (distinct), by trial division. Intended for `n - 1`
/// of plan primes, which stay far below 2^40.
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut fs = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            fs.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        fs.push(n);
    }
    fs
}

/// Smallest generator of the multiplicative group of F_p.
pub fn group_generator(p: u64) -> u64 {
    let factors = distinct_prime_factors(p - 1);
    'cand: for g in 2..p {
        for &q in &factors {
            if mod_pow(g, (p - 1) / q, p) == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    1 // p = 2
}

/// Smallest element of multiplicative order exactly `r` in F_p.
pub fn root_of_unity(p: u64, r: u64) -> Result<u64, AlgebraError> {
    if r == 0 || (p - 1) % r != 0 {
        return Err(AlgebraError::NoRoot { p, r });
    }
    if r == 1 {
        return Ok(1);
    }
    let factors = distinct_prime_factors(r);
    'cand: for w in 2..p {
        if mod_pow(w, r, p) != 1 {
            continue;
        }
        for &q in &factors {
            if mod_pow(w, r / q, p) == 1 {
                continue 'cand;
            }
        }
        return Ok(w);
    }
    Err(AlgebraError::NoRoot { p, r })
}

// ---------------------------------------------------------------------------
// Prime plan
// ---------------------------------------------------------------------------

/// A set of primes supporting the transformed recursion: each admits a
/// `p_phi`-th root of unity, each exceeds the packed degree bound + 1, and
/// their product exceeds `2^coefficient_bound_bits` so a coefficient is
/// pinned down exactly by its residues.
#[derive(Debug, Clone)]
pub struct PrimePlan {
    pub p_phi: u64,
    pub degree_bound: u64,
    pub primes: Vec<u64>,
    /// smallest p_phi-th root of unity per prime
    pub omegas: Vec<u64>,
    /// smallest generator of F_p* per prime
    pub generators: Vec<u64>,
}

impl PrimePlan {
    pub fn modulus_product(&self) -> BigInt {
        let mut m = BigInt::one();
        for &p in &self.primes {
            m *= BigInt::from(p);
        }
        m
    }
}

pub fn find_prime_plan(
    p_phi: u64,
    degree_bound: u64,
    coefficient_bound_bits: u64,
) -> Result<PrimePlan, AlgebraError> {
    assert!(p_phi >= 1);
    let mut plan = PrimePlan {
        p_phi,
        degree_bound,
        primes: Vec::new(),
        omegas: Vec::new(),
        generators: Vec::new(),
    };
    let bound = BigInt::one() << coefficient_bound_bits;
    let mut product = BigInt::one();
    // start at the first candidate = 1 mod p_phi above degree_bound + 1
    let lo = degree_bound + 2;
    let mut cand = if p_phi == 1 {
        lo
    } else {
        let k = lo.saturating_sub(1).div_ceil(p_phi).max(1);
        k * p_phi + 1
    };
    let cap = 1u64 << 62;
    while product <= bound {
        while !is_prime(cand) || cand <= degree_bound + 1 {
            cand = if p_phi == 1 { cand + 1 } else { cand + p_phi };
            if cand > cap || plan.primes.len() > 10_000 {
                return Err(AlgebraError::PlanOverflow);
            }
        }
        plan.omegas.push(root_of_unity(cand, p_phi)?);
        plan.generators.push(group_generator(cand));
        plan.primes.push(cand);
        product *= BigInt::from(cand);
        cand = if p_phi == 1 { cand + 1 } else { cand + p_phi };
    }
    Ok(plan)
}

// ---------------------------------------------------------------------------
// DFT over function spaces D -> Z_r
// ---------------------------------------------------------------------------

/// Values a DFT can act on: closed under addition and scaling by a field
/// element of F_p. Implemented by field scalars and by sparse polynomials
/// with F_p coefficients (the transform extends to those by linearity).
pub trait OmegaModule: Clone {
    fn om_zero(&self) -> Self;
    fn om_add_assign(&mut self, other: &Self, p: u64);
    fn om_scale(&self, c: u64, p: u64) -> Self;
}

impl OmegaModule for u64 {
    fn om_zero(&self) -> Self {
        0
    }
    fn om_add_assign(&mut self, other: &Self, p: u64) {
        *self = mod_add(*self, *other, p);
    }
    fn om_scale(&self, c: u64, p: u64) -> Self {
        mod_mul(*self, c, p)
    }
}

/// Dense table of a function `(D -> Z_r) -> T`, indexed in mixed radix: the
/// function q is stored at `sum_i q(z_i) * r^i` for a fixed enumeration of D.
pub fn dft_table_size(dlen: usize, r: u64) -> usize {
    (r as usize).pow(dlen as u32)
}

fn dot_mod_r(dlen: usize, r: u64, mut qi: usize, mut yi: usize) -> u64 {
    let r = r as usize;
    let mut acc = 0usize;
    for _ in 0..dlen {
        acc += (qi % r) * (yi % r);
        qi /= r;
        yi /= r;
    }
    (acc % r) as u64
}

/// `DFT(h)(y) = sum_q omega^{q . y} h(q)` where `q . y = sum_z q(z) y(z)`
/// (mod r). `h` is a dense table over all `r^|D|` functions.
pub fn dft<T: OmegaModule>(dlen: usize, r: u64, p: u64, h: &[T]) -> Result<Vec<T>, AlgebraError> {
    transform(dlen, r, p, h, false)
}

/// `DFT^{-1}(h)(y) = r^{-|D|} sum_q omega^{-q . y} h(q)`.
pub fn inverse_dft<T: OmegaModule>(
    dlen: usize,
    r: u64,
    p: u64,
    h: &[T],
) -> Result<Vec<T>, AlgebraError> {
    transform(dlen, r, p, h, true)
}

fn transform<T: OmegaModule>(
    dlen: usize,
    r: u64,
    p: u64,
    h: &[T],
    inverse: bool,
) -> Result<Vec<T>, AlgebraError> {
    let size = dft_table_size(dlen, r);
    assert_eq!(h.len(), size);
    let omega = root_of_unity(p, r)?;
    let omega = if inverse { mod_inv(omega, p)? } else { omega };
    // powers of omega, indexed by exponent mod r
    let mut pw = vec![1u64; r as usize];
    for i in 1..r as usize {
        pw[i] = mod_mul(pw[i - 1], omega, p);
    }
    let scale = if inverse {
        let rinv = mod_inv(r % p, p)?; // NoInverse when p | r
        mod_pow(rinv, dlen as u64, p)
    } else {
        1
    };
    let mut out = Vec::with_capacity(size);
    for y in 0..size {
        let mut acc = h[0].om_zero();
        for (q, hq) in h.iter().enumerate() {
            let e = dot_mod_r(dlen, r, q, y);
            let term = hq.om_scale(pw[e as usize], p);
            acc.om_add_assign(&term, p);
        }
        out.push(acc.om_scale(scale, p));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// CRT coefficient reconstruction
// ---------------------------------------------------------------------------

/// Recover the `k`-th coefficient of a hidden univariate polynomial from
/// point evaluations modulo each plan prime.
///
/// Per prime, the residue is `q_k = -sum_{j=0}^{p-2} P(alpha^j) alpha^{-jk}`
/// where `alpha` generates F_p*: summing a geometric series kills every
/// monomial whose degree differs from `k` mod p-1, which is all of them since
/// the degree stays below p-1. The residues are then combined by the Chinese
/// remainder theorem and mapped to the balanced range `(-M/2, M/2]` so that
/// signed coefficients are recovered exactly.
pub fn crt_reconstruct_coefficient(
    k: u64,
    evaluator: &mut dyn FnMut(usize, u64) -> u64,
    plan: &PrimePlan,
) -> Result<BigInt, AlgebraError> {
    let min_prime = *plan.primes.iter().min().expect("plan has primes");
    if plan.degree_bound >= min_prime - 1 {
        return Err(AlgebraError::DegreeTooHigh {
            degree: plan.degree_bound,
            prime: min_prime,
        });
    }
    let mut residues = Vec::with_capacity(plan.primes.len());
    for (i, &p) in plan.primes.iter().enumerate() {
        let alpha = plan.generators[i];
        let alpha_mk = mod_inv(mod_pow(alpha, k % (p - 1), p), p)?;
        let mut point = 1u64; // alpha^j
        let mut twist = 1u64; // alpha^{-jk}
        let mut acc = 0u64;
        for _ in 0..p - 1 {
            let v = evaluator(i, point);
            acc = mod_add(acc, mod_mul(v, twist, p), p);
            point = mod_mul(point, alpha, p);
            twist = mod_mul(twist, alpha_mk, p);
        }
        residues.push(mod_sub(0, acc, p));
    }
    Ok(crt_combine(&residues, &plan.primes))
}

/// Combine residues into the balanced representative modulo the product.
pub fn crt_combine(residues: &[u64], primes: &[u64]) -> BigInt {
    let mut m = BigInt::one();
    let mut x = BigInt::zero();
    for (&r, &p) in residues.iter().zip(primes) {
        // x' = x + m * t where t = (r - x) * m^{-1} mod p
        let p_big = BigInt::from(p);
        let x_mod_p = ((&x % &p_big) + &p_big) % &p_big;
        let x_mod_p: u64 = x_mod_p.try_into().unwrap();
        let m_mod_p: u64 = (((&m % &p_big) + &p_big) % &p_big).try_into().unwrap();
        let t = mod_mul(
            mod_sub(r % p, x_mod_p % p, p),
            mod_inv(m_mod_p, p).expect("plan primes are distinct"),
            p,
        );
        x += &m * BigInt::from(t);
        m *= p_big;
    }
    // balanced range
    if &x * 2 > m {
        x -= &m;
    }
    x
}

// ---------------------------------------------------------------------------
// Subset transforms and inclusion-exclusion
// ---------------------------------------------------------------------------

/// In-place zeta transform over the subset lattice of a `|U|`-bit universe:
/// afterwards `vals[Y] = sum_{X subseteq Y} old_vals[X]`.
pub fn zeta_transform_in_place<T>(bits: usize, vals: &mut [T], add: impl Fn(&mut T, &T)) {
    assert_eq!(vals.len(), 1 << bits);
    for b in 0..bits {
        let bit = 1usize << b;
        for s in 0..vals.len() {
            if s & bit != 0 {
                let (lo, hi) = vals.split_at_mut(s);
                add(&mut hi[0], &lo[s ^ bit]);
            }
        }
    }
}

/// In-place Moebius transform: the inverse of the zeta transform.
pub fn mobius_transform_in_place<T>(bits: usize, vals: &mut [T], sub: impl Fn(&mut T, &T)) {
    assert_eq!(vals.len(), 1 << bits);
    for b in 0..bits {
        let bit = 1usize << b;
        for s in 0..vals.len() {
            if s & bit != 0 {
                let (lo, hi) = vals.split_at_mut(s);
                sub(&mut hi[0], &lo[s ^ bit]);
            }
        }
    }
}

pub fn zeta_transform(bits: usize, g: &[i64]) -> Vec<i64> {
    let mut v = g.to_vec();
    zeta_transform_in_place(bits, &mut v, |a, b| *a += *b);
    v
}

pub fn mobius_transform(bits: usize, g: &[i64]) -> Vec<i64> {
    let mut v = g.to_vec();
    mobius_transform_in_place(bits, &mut v, |a, b| *a -= *b);
    v
}

pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Inclusion-exclusion weight of a forget step: product over the category
/// positions of `(-1)^{E-A} * binom(E, A)`.
pub fn incexc_coeff(e: &[u32], a: &[u32]) -> Result<i64, AlgebraError> {
    let mut acc = 1i64;
    for (i, (&ei, &ai)) in e.iter().zip(a).enumerate() {
        if ai > ei {
            return Err(AlgebraError::BadAllow(i));
        }
        let c = binom(ei as u64, ai as u64) as i64;
        acc *= if (ei - ai) % 2 == 1 { -c } else { c };
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Sparse multivariate polynomials
// ---------------------------------------------------------------------------

/// Coefficient arithmetic with context (big integers need none; field
/// elements need the modulus).
pub trait CoeffOps {
    type C: Clone + Eq + std::fmt::Debug;
    fn c_zero(&self) -> Self::C;
    fn c_add(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn c_mul(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn c_from_i64(&self, v: i64) -> Self::C;
    fn c_is_zero(&self, a: &Self::C) -> bool;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BigIntOps;

impl CoeffOps for BigIntOps {
    type C = BigInt;
    fn c_zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn c_add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn c_mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn c_from_i64(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }
    fn c_is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FpOps {
    pub p: u64,
}

impl CoeffOps for FpOps {
    type C = u64;
    fn c_zero(&self) -> u64 {
        0
    }
    fn c_add(&self, a: &u64, b: &u64) -> u64 {
        mod_add(*a, *b, self.p)
    }
    fn c_mul(&self, a: &u64, b: &u64) -> u64 {
        mod_mul(*a, *b, self.p)
    }
    fn c_from_i64(&self, v: i64) -> u64 {
        mod_i64(v, self.p)
    }
    fn c_is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

/// Sparse multivariate polynomial: monomial exponent vector -> coefficient.
/// The exponent vector length (`nslots`) is fixed per instance; BTreeMap
/// keys give deterministic iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly<C> {
    pub nslots: usize,
    pub terms: BTreeMap<Vec<u32>, C>,
}

impl<C: Clone + Eq + std::fmt::Debug> SparsePoly<C> {
    pub fn zero(nslots: usize) -> Self {
        SparsePoly {
            nslots,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant<O: CoeffOps<C = C>>(ops: &O, nslots: usize, v: i64) -> Self {
        let mut p = Self::zero(nslots);
        let c = ops.c_from_i64(v);
        if !ops.c_is_zero(&c) {
            p.terms.insert(vec![0; nslots], c);
        }
        p
    }

    pub fn monomial<O: CoeffOps<C = C>>(ops: &O, nslots: usize, exps: Vec<u32>, v: i64) -> Self {
        assert_eq!(exps.len(), nslots);
        let mut p = Self::zero(nslots);
        let c = ops.c_from_i64(v);
        if !ops.c_is_zero(&c) {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_assign<O: CoeffOps<C = C>>(&mut self, ops: &O, other: &Self) {
        assert_eq!(self.nslots, other.nslots);
        for (k, v) in &other.terms {
            match self.terms.get_mut(k) {
                Some(c) => {
                    let s = ops.c_add(c, v);
                    if ops.c_is_zero(&s) {
                        self.terms.remove(k);
                    } else {
                        *c = s;
                    }
                }
                None => {
                    self.terms.insert(k.clone(), v.clone());
                }
            }
        }
    }

    pub fn mul<O: CoeffOps<C = C>>(&self, ops: &O, other: &Self) -> Self {
        assert_eq!(self.nslots, other.nslots);
        let mut out = Self::zero(self.nslots);
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                let key: Vec<u32> = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                let prod = ops.c_mul(va, vb);
                match out.terms.get_mut(&key) {
                    Some(c) => {
                        let s = ops.c_add(c, &prod);
                        if ops.c_is_zero(&s) {
                            out.terms.remove(&key);
                        } else {
                            *c = s;
                        }
                    }
                    None => {
                        if !ops.c_is_zero(&prod) {
                            out.terms.insert(key, prod);
                        }
                    }
                }
            }
        }
        out
    }

    /// Multiply by an integer scalar.
    pub fn scale<O: CoeffOps<C = C>>(&mut self, ops: &O, v: i64) {
        let c = ops.c_from_i64(v);
        if ops.c_is_zero(&c) {
            self.terms.clear();
            return;
        }
        let old = std::mem::take(&mut self.terms);
        for (k, cv) in old {
            let s = ops.c_mul(&cv, &c);
            if !ops.c_is_zero(&s) {
                self.terms.insert(k, s);
            }
        }
    }

    /// Multiply by a single variable power: slot exponent += e.
    pub fn mul_mono(&mut self, slot: usize, e: u32) {
        if e == 0 {
            return;
        }
        let old = std::mem::take(&mut self.terms);
        for (mut k, c) in old {
            k[slot] += e;
            self.terms.insert(k, c);
        }
    }

    pub fn coeff<'a>(&'a self, exps: &[u32]) -> Option<&'a C> {
        self.terms.get(exps)
    }

    pub fn max_degree_per_slot(&self) -> Vec<u32> {
        let mut m = vec![0u32; self.nslots];
        for k in self.terms.keys() {
            for (mi, &ki) in m.iter_mut().zip(k) {
                *mi = (*mi).max(ki);
            }
        }
        m
    }
}

impl SparsePoly<BigInt> {
    /// Evaluate modulo `p` at a point given per slot.
    pub fn eval_mod(&self, point: &[u64], p: u64) -> u64 {
        let mut acc = 0u64;
        for (k, c) in &self.terms {
            let mut t = (((c % BigInt::from(p)) + BigInt::from(p)) % BigInt::from(p))
                .try_into()
                .unwrap_or(0u64);
            for (slot, &e) in k.iter().enumerate() {
                if e > 0 {
                    t = mod_mul(t, mod_pow(point[slot], e as u64, p), p);
                }
            }
            acc = mod_add(acc, t, p);
        }
        acc
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

/// Sparse polynomials over F_p transform linearly under the DFT.
impl OmegaModule for SparsePoly<u64> {
    fn om_zero(&self) -> Self {
        SparsePoly::zero(self.nslots)
    }
    fn om_add_assign(&mut self, other: &Self, p: u64) {
        self.add_assign(&FpOps { p }, other);
    }
    fn om_scale(&self, c: u64, p: u64) -> Self {
        let ops = FpOps { p };
        let mut out = SparsePoly::zero(self.nslots);
        for (k, v) in &self.terms {
            let s = ops.c_mul(v, &c);
            if s != 0 {
                out.terms.insert(k.clone(), s);
            }
        }
        out
    }
}
