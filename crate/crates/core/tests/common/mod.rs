#![allow(dead_code)]

use nonarch::localfield::{Base, Field, FieldConfig, FieldKind, Scalar};
use nonarch::psl2::{self, Mat2, Order};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn qp(p: u32) -> Field {
    Field::new(FieldConfig::padic(p)).unwrap()
}

pub fn laurent(p: u32, f: u32) -> Field {
    Field::new(FieldConfig::laurent(p, f)).unwrap()
}

/// A small pool covering both kinds, `f > 1`, and a split extension.
pub fn field_pool() -> Vec<Field> {
    let q5s = {
        let base = qp(5);
        let d = base.int(6).x;
        Field::new(FieldConfig::padic(5).with_ext(d, 1)).unwrap()
    };
    vec![qp(2), qp(3), qp(5), qp(7), q5s, laurent(5, 1), laurent(3, 2), laurent(2, 2)]
}

/// `p`-adic valuation of a rational by trial division.
pub fn rational_valuation(x: &BigRational, p: u32) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let count = |n: &BigInt| {
        let mut n = n.abs();
        let mut c = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            c += 1;
        }
        c
    };
    Some(count(x.numer()) - count(x.denom()))
}

fn unit_int(rng: &mut ChaCha8Rng, p: u32) -> i64 {
    loop {
        let u: i64 = rng.gen_range(1..40);
        if u % p as i64 != 0 {
            return if rng.gen_bool(0.5) { u } else { -u };
        }
    }
}

fn unit_poly(k: &Field, rng: &mut ChaCha8Rng) -> Scalar {
    let q = k.q() as u32;
    let mut acc = k.from_base(k.base_digit(rng.gen_range(1..q)));
    let mut t = k.one();
    for _ in 0..rng.gen_range(0..3) {
        t = k.mul(&t, &k.pi_pow(1));
        acc = k.add(&acc, &k.mul(&t, &k.from_base(k.base_digit(rng.gen_range(0..q)))));
    }
    acc
}

/// A random unit of the base domain (no extension part).
pub fn random_base_unit(k: &Field, rng: &mut ChaCha8Rng) -> Scalar {
    match k.kind() {
        FieldKind::Padic => {
            let p = k.p();
            k.rational(unit_int(rng, p), unit_int(rng, p).abs()).unwrap()
        }
        FieldKind::Laurent => k.div(&unit_poly(k, rng), &unit_poly(k, rng)).unwrap(),
    }
}

/// A random unit, including an extension part when the field has one.
pub fn random_unit(k: &Field, rng: &mut ChaCha8Rng) -> Scalar {
    let u = random_base_unit(k, rng);
    if k.ext().is_none() || rng.gen_bool(0.5) {
        return u;
    }
    loop {
        let y = random_base_unit(k, rng);
        let v = k.add(&u, &k.mul(&y, &k.sqrt_d().unwrap()));
        if k.valuation(&v) == Some(0) {
            return v;
        }
    }
}

/// Nonzero scalar with valuation uniform in `lo..=hi`.
pub fn random_scalar(k: &Field, rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Scalar {
    let e = rng.gen_range(lo..=hi);
    k.mul(&random_unit(k, rng), &k.pi_pow(e))
}

/// Determinant-one matrix whose nonzero entries have valuations in `[-2, 2]`.
pub fn random_sl2(k: &Field, rng: &mut ChaCha8Rng) -> Mat2 {
    loop {
        let a = random_scalar(k, rng, -2, 2);
        let b = random_scalar(k, rng, -2, 2);
        let c = random_scalar(k, rng, -2, 2);
        let d = k.div(&k.add(&k.one(), &k.mul(&b, &c)), &a).unwrap();
        if k.valuation(&d).is_none_or(|v| (-2..=2).contains(&v)) {
            return Mat2::new(k, a, b, c, d).unwrap();
        }
    }
}

/// Conjugate of a companion matrix of finite order greater than one.
pub fn random_finite_order(k: &Field, rng: &mut ChaCha8Rng) -> (Mat2, u64) {
    loop {
        let t = match k.kind() {
            FieldKind::Padic => k.int(rng.gen_range(-1..=1)),
            FieldKind::Laurent => k.from_base(k.base_digit(rng.gen_range(0..k.q() as u32))),
        };
        let x = Mat2::companion(k, &t);
        if let Order::Finite(n) = psl2::element_order(k, &x) {
            if n > 1 {
                let c = random_sl2(k, rng);
                return (x.conjugate_by(k, &c), n);
            }
        }
    }
}

pub fn base_q(x: &Base) -> &BigRational {
    match x {
        Base::Q(r) => r,
        Base::F(_) => panic!("not a rational"),
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}
