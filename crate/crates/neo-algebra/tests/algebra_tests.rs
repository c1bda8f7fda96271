use neo_algebra::*;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

#[test]
fn prime_plan_small() {
    let plan = find_prime_plan(2, 10, 4).unwrap();
    assert_eq!(plan.primes, vec![13, 17]);
    for (&p, &w) in plan.primes.iter().zip(&plan.omegas) {
        assert_eq!(mod_pow(w, 2, p), 1);
        assert_ne!(w, 1);
    }
    // p_phi = 1: omega = 1 for every prime
    let plan1 = find_prime_plan(1, 3, 8).unwrap();
    assert!(plan1.omegas.iter().all(|&w| w == 1));
    assert!(plan1.primes.iter().all(|&p| p > 4 && is_prime(p)));
    let prod: u64 = plan1.primes.iter().product();
    assert!(prod > 256);
}

#[test]
fn roots_of_unity() {
    assert_eq!(root_of_unity(5, 4).unwrap(), 2);
    assert_eq!(root_of_unity(13, 1).unwrap(), 1);
    assert_eq!(root_of_unity(7, 3).unwrap(), 2);
    assert!(matches!(
        root_of_unity(7, 5),
        Err(AlgebraError::NoRoot { p: 7, r: 5 })
    ));
}

#[test]
fn primality_and_generators() {
    assert!(is_prime(2) && is_prime(13) && is_prime(1_000_003));
    assert!(!is_prime(1) && !is_prime(91) && !is_prime(1_000_001));
    // 3 generates F_7*
    assert_eq!(group_generator(7), 3);
    for p in [5u64, 13, 17, 101] {
        let g = group_generator(p);
        let mut seen = std::collections::HashSet::new();
        let mut x = 1;
        for _ in 0..p - 1 {
            seen.insert(x);
            x = mod_mul(x, g, p);
        }
        assert_eq!(seen.len(), (p - 1) as usize);
    }
}

#[test]
fn dft_empty_domain_is_identity() {
    let h = vec![42u64 % 13];
    assert_eq!(dft(0, 3, 13, &h).unwrap(), h);
}

#[test]
fn dft_of_zero_indicator_is_constant_one() {
    for (dlen, r, p) in [(1usize, 2u64, 5u64), (2, 3, 7), (2, 4, 13)] {
        let size = dft_table_size(dlen, r);
        let mut h = vec![0u64; size];
        h[0] = 1; // indicator of the all-zero function
        let t = dft(dlen, r, p, &h).unwrap();
        assert!(t.iter().all(|&v| v == 1));
    }
}

#[test]
fn dft_round_trip() {
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    for dlen in 0..=3usize {
        for r in 1..=4u64 {
            for p in [5u64, 13, 17] {
                if (p - 1) % r != 0 {
                    continue;
                }
                let size = dft_table_size(dlen, r);
                let h: Vec<u64> = (0..size).map(|_| rng.gen_range(0..p)).collect();
                let t = dft(dlen, r, p, &h).unwrap();
                assert_eq!(inverse_dft(dlen, r, p, &t).unwrap(), h);
                let ti = inverse_dft(dlen, r, p, &h).unwrap();
                assert_eq!(dft(dlen, r, p, &ti).unwrap(), h);
            }
        }
    }
}

/// Convolution theorem: the mod-r convolution of t functions equals
/// DFT^{-1} of the pointwise product of their DFTs.
#[test]
fn dft_convolution() {
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    for t in 1..=3usize {
        for (dlen, r, p) in [(1usize, 2u64, 13u64), (2, 2, 5), (1, 3, 7), (2, 4, 17)] {
            let size = dft_table_size(dlen, r);
            let hs: Vec<Vec<u64>> = (0..t)
                .map(|_| (0..size).map(|_| rng.gen_range(0..p)).collect())
                .collect();
            // direct convolution over y^1 + ... + y^t = y (pointwise mod r)
            let mut conv = vec![0u64; size];
            let mut idx = vec![0usize; t];
            loop {
                // target index: pointwise sum of digits mod r
                let mut y = 0usize;
                for digit_pos in (0..dlen).rev() {
                    let rr = r as usize;
                    let pw = rr.pow(digit_pos as u32);
                    let s: usize = idx.iter().map(|&i| (i / pw) % rr).sum();
                    y = y * rr + s % rr;
                }
                let prod = idx
                    .iter()
                    .enumerate()
                    .fold(1u64, |acc, (i, &q)| mod_mul(acc, hs[i][q], p));
                conv[y] = mod_add(conv[y], prod, p);
                // next multi-index
                let mut i = 0;
                loop {
                    if i == t {
                        break;
                    }
                    idx[i] += 1;
                    if idx[i] < size {
                        break;
                    }
                    idx[i] = 0;
                    i += 1;
                }
                if i == t {
                    break;
                }
            }
            // transformed route
            let mut prod_t = vec![1u64; size];
            for h in &hs {
                let th = dft(dlen, r, p, h).unwrap();
                for (a, b) in prod_t.iter_mut().zip(&th) {
                    *a = mod_mul(*a, *b, p);
                }
            }
            let back = inverse_dft(dlen, r, p, &prod_t).unwrap();
            assert_eq!(back, conv, "t={t} dlen={dlen} r={r} p={p}");
        }
    }
}

#[test]
fn zeta_mobius_inverse_and_cover_product() {
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    for bits in 0..=4usize {
        let n = 1usize << bits;
        let g: Vec<i64> = (0..n).map(|_| rng.gen_range(-10..10)).collect();
        assert_eq!(mobius_transform(bits, &zeta_transform(bits, &g)), g);
        // zeta of indicator(emptyset) is constant 1
        let mut ind = vec![0i64; n];
        ind[0] = 1;
        assert!(zeta_transform(bits, &ind).iter().all(|&v| v == 1));
        // cover product: (g1 *c g2)(Y) = sum over A,B with A u B = Y
        let g2: Vec<i64> = (0..n).map(|_| rng.gen_range(-10..10)).collect();
        let mut direct = vec![0i64; n];
        for a in 0..n {
            for b in 0..n {
                direct[a | b] += g[a] * g2[b];
            }
        }
        let za = zeta_transform(bits, &g);
        let zb = zeta_transform(bits, &g2);
        let pointwise: Vec<i64> = za.iter().zip(&zb).map(|(x, y)| x * y).collect();
        assert_eq!(mobius_transform(bits, &pointwise), direct);
    }
}

#[test]
fn incexc_examples() {
    assert_eq!(incexc_coeff(&[3], &[1]).unwrap(), 3);
    assert_eq!(incexc_coeff(&[2, 5, 0], &[2, 5, 0]).unwrap(), 1);
    let s: i64 = (0..=2).map(|a| incexc_coeff(&[2], &[a]).unwrap()).sum();
    assert_eq!(s, 0);
    assert!(matches!(
        incexc_coeff(&[1], &[2]),
        Err(AlgebraError::BadAllow(0))
    ));
}

#[test]
fn crt_reconstructs_linear_polynomial() {
    // P(x) = 3x + 2 hidden behind its evaluator, primes {5, 7}
    let plan = PrimePlan {
        p_phi: 1,
        degree_bound: 1,
        primes: vec![5, 7],
        omegas: vec![1, 1],
        generators: vec![group_generator(5), group_generator(7)],
    };
    let mut eval = |i: usize, x: u64| {
        let p = plan.primes[i];
        mod_add(mod_mul(3, x, p), 2, p)
    };
    assert_eq!(
        crt_reconstruct_coefficient(1, &mut eval, &plan).unwrap(),
        BigInt::from(3)
    );
    assert_eq!(
        crt_reconstruct_coefficient(0, &mut eval, &plan).unwrap(),
        BigInt::from(2)
    );
    // zero polynomial
    let mut zero_eval = |_: usize, _: u64| 0u64;
    for k in 0..=1 {
        assert_eq!(
            crt_reconstruct_coefficient(k, &mut zero_eval, &plan).unwrap(),
            BigInt::from(0)
        );
    }
    // degree too high
    let bad = PrimePlan {
        degree_bound: 4,
        ..plan.clone()
    };
    let mut e = |_: usize, _: u64| 0u64;
    assert!(matches!(
        crt_reconstruct_coefficient(0, &mut e, &bad),
        Err(AlgebraError::DegreeTooHigh { .. })
    ));
}

#[test]
fn crt_random_polynomials() {
    let mut rng = ChaCha12Rng::seed_from_u64(99);
    for trial in 0..100 {
        let deg = rng.gen_range(0..=30u64);
        let nterms = rng.gen_range(1..=6usize);
        let mut coeffs = std::collections::BTreeMap::<u64, i64>::new();
        for _ in 0..nterms {
            coeffs.insert(rng.gen_range(0..=deg), rng.gen_range(-1000..1000));
        }
        let plan = find_prime_plan(1, deg, 24).unwrap();
        let mut eval = |i: usize, x: u64| {
            let p = plan.primes[i];
            let mut acc = 0u64;
            for (&d, &c) in &coeffs {
                acc = mod_add(acc, mod_mul(mod_i64(c, p), mod_pow(x, d, p), p), p);
            }
            acc
        };
        for k in 0..=deg {
            let want = BigInt::from(*coeffs.get(&k).unwrap_or(&0));
            let got = crt_reconstruct_coefficient(k, &mut eval, &plan).unwrap();
            assert_eq!(got, want, "trial {trial} k {k}");
        }
    }
}

#[test]
fn sparse_poly_arithmetic() {
    let ops = BigIntOps;
    // (x + 2)(x - 2) = x^2 - 4 over slots [x, y]
    let mut a = SparsePoly::monomial(&ops, 2, vec![1, 0], 1);
    a.add_assign(&ops, &SparsePoly::constant(&ops, 2, 2));
    let mut b = SparsePoly::monomial(&ops, 2, vec![1, 0], 1);
    b.add_assign(&ops, &SparsePoly::constant(&ops, 2, -2));
    let prod = a.mul(&ops, &b);
    assert_eq!(prod.coeff(&[2, 0]), Some(&BigInt::from(1)));
    assert_eq!(prod.coeff(&[0, 0]), Some(&BigInt::from(-4)));
    assert_eq!(prod.coeff(&[1, 0]), None); // cancelled
    assert_eq!(prod.terms.len(), 2);
    // evaluation matches mod p
    assert_eq!(prod.eval_mod(&[3, 9], 11), (9 - 4) % 11);
    // scale and mul_mono
    let mut c = prod.clone();
    c.scale(&ops, 3);
    c.mul_mono(1, 2);
    assert_eq!(c.coeff(&[2, 2]), Some(&BigInt::from(3)));
    assert_eq!(c.max_degree_per_slot(), vec![2, 2]);
}

#[test]
fn dft_extends_to_polynomials_by_linearity() {
    // transform a table of F_p polynomials and compare coefficientwise with
    // transforming each coefficient's scalar table separately
    let (dlen, r, p) = (1usize, 2u64, 5u64);
    let ops = FpOps { p };
    let h: Vec<SparsePoly<u64>> = vec![
        SparsePoly::monomial(&ops, 1, vec![0], 3),
        SparsePoly::monomial(&ops, 1, vec![1], 2),
    ];
    let t = dft(dlen, r, p, &h).unwrap();
    let const_table: Vec<u64> = vec![3, 0];
    let lin_table: Vec<u64> = vec![0, 2];
    let tc = dft(dlen, r, p, &const_table).unwrap();
    let tl = dft(dlen, r, p, &lin_table).unwrap();
    for y in 0..2 {
        assert_eq!(t[y].coeff(&[0]).copied().unwrap_or(0), tc[y]);
        assert_eq!(t[y].coeff(&[1]).copied().unwrap_or(0), tl[y]);
    }
}
