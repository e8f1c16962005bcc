//! `SL_2` representatives of `PSL_2(K)` elements: products, traces, commutators,
//! translation lengths and finite orders.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localfield::{Field, FieldKind, Scalar};

/// A determinant-one matrix, considered up to sign.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Elliptic,
    Hyperbolic,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Elliptic => write!(f, "elliptic"),
            Tag::Hyperbolic => write!(f, "hyperbolic"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IsometryClass {
    pub tag: Tag,
    pub length: u64,
}

/// Order in `PSL_2(K)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u64> {
        match self {
            Order::Finite(n) => Some(n),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

impl Mat2 {
    /// Checks `ad - bc = 1` exactly.
    pub fn new(k: &Field, a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Mat2> {
        for x in [&a, &b, &c, &d] {
            k.check(x)?;
        }
        let m = Mat2 { a, b, c, d };
        if m.det(k) != k.one() {
            return Err(Error::DeterminantNotOne);
        }
        Ok(m)
    }

    /// Row-major scalar strings.
    pub fn parse(k: &Field, rows: [[&str; 2]; 2]) -> Result<Mat2> {
        let p = |s: &str| k.parse_scalar(s);
        Mat2::new(k, p(rows[0][0])?, p(rows[0][1])?, p(rows[1][0])?, p(rows[1][1])?)
    }

    pub fn identity(k: &Field) -> Mat2 {
        Mat2 { a: k.one(), b: k.zero(), c: k.zero(), d: k.one() }
    }

    /// `diag(x, x^-1)`.
    pub fn diag(k: &Field, x: &Scalar) -> Result<Mat2> {
        Ok(Mat2 { a: x.clone(), b: k.zero(), c: k.zero(), d: k.inv(x)? })
    }

    /// `[[0, -1], [1, t]]`, of trace `t`.
    pub fn companion(k: &Field, t: &Scalar) -> Mat2 {
        Mat2 { a: k.zero(), b: k.int(-1), c: k.one(), d: t.clone() }
    }

    pub fn det(&self, k: &Field) -> Scalar {
        k.sub(&k.mul(&self.a, &self.d), &k.mul(&self.b, &self.c))
    }

    pub fn trace(&self, k: &Field) -> Scalar {
        k.add(&self.a, &self.d)
    }

    pub fn mul(&self, k: &Field, o: &Mat2) -> Mat2 {
        let dot = |x: &Scalar, y: &Scalar, z: &Scalar, w: &Scalar| {
            k.add(&k.mul(x, y), &k.mul(z, w))
        };
        Mat2 {
            a: dot(&self.a, &o.a, &self.b, &o.c),
            b: dot(&self.a, &o.b, &self.b, &o.d),
            c: dot(&self.c, &o.a, &self.d, &o.c),
            d: dot(&self.c, &o.b, &self.d, &o.d),
        }
    }

    /// Adjugate; the inverse for determinant one.
    pub fn inv(&self, k: &Field) -> Mat2 {
        Mat2 { a: self.d.clone(), b: k.neg(&self.b), c: k.neg(&self.c), d: self.a.clone() }
    }

    pub fn neg(&self, k: &Field) -> Mat2 {
        Mat2 { a: k.neg(&self.a), b: k.neg(&self.b), c: k.neg(&self.c), d: k.neg(&self.d) }
    }

    pub fn pow(&self, k: &Field, e: i64) -> Mat2 {
        let mut base = if e < 0 { self.inv(k) } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Mat2::identity(k);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(k, &base);
            }
            base = base.mul(k, &base);
            e >>= 1;
        }
        acc
    }

    /// `A B A^-1 B^-1`.
    pub fn commutator(&self, k: &Field, b: &Mat2) -> Mat2 {
        self.mul(k, b).mul(k, &self.inv(k)).mul(k, &b.inv(k))
    }

    pub fn conjugate_by(&self, k: &Field, c: &Mat2) -> Mat2 {
        c.mul(k, self).mul(k, &c.inv(k))
    }

    /// The representative of `{M, -M}` whose first nonzero entry is positive.
    pub fn canonical(&self, k: &Field) -> Mat2 {
        let first = [&self.a, &self.b, &self.c, &self.d].into_iter().find(|x| !k.is_zero(x));
        match first {
            Some(x) if !k.is_positive(x) => self.neg(k),
            _ => self.clone(),
        }
    }

    /// Equality in `PSL_2`.
    pub fn proj_eq(&self, k: &Field, o: &Mat2) -> bool {
        self == o || *self == o.neg(k)
    }

    /// `M = +-I`.
    pub fn is_identity(&self, k: &Field) -> bool {
        k.is_zero(&self.b) && k.is_zero(&self.c) && self.a == self.d && {
            let one = k.one();
            self.a == one || self.a == k.neg(&one)
        }
    }

    pub fn entries(&self) -> [&Scalar; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// `[[a, b], [c, d]]` with scalars in the input grammar.
    pub fn format(&self, k: &Field) -> String {
        let [a, b, c, d] = self.entries().map(|x| k.format_scalar(x));
        format!("[[{a}, {b}], [{c}, {d}]]")
    }

    /// Row-major scalar strings.
    pub fn to_strings(&self, k: &Field) -> [[String; 2]; 2] {
        [
            [k.format_scalar(&self.a), k.format_scalar(&self.b)],
            [k.format_scalar(&self.c), k.format_scalar(&self.d)],
        ]
    }
}

/// `-2 min(0, v(tr A))`.
pub fn translation_length(k: &Field, m: &Mat2) -> u64 {
    match k.valuation(&m.trace(k)) {
        Some(v) if v < 0 => (-2 * v) as u64,
        _ => 0,
    }
}

pub fn classify(k: &Field, m: &Mat2) -> IsometryClass {
    let length = translation_length(k, m);
    let tag = if length > 0 { Tag::Hyperbolic } else { Tag::Elliptic };
    IsometryClass { tag, length }
}

/// Largest finite order that can occur in `PSL_2(K)` short of the sporadic cases.
pub fn order_bound(k: &Field) -> u64 {
    let mut bound = (k.q() + 1).max(5);
    if k.kind() == FieldKind::Padic && (k.p() == 2 || k.p() == 3) {
        bound = bound.max(k.p() as u64);
    }
    bound
}

/// Smallest `n` with `A^n = +-I` among the admissible candidates, else infinite.
pub fn element_order(k: &Field, m: &Mat2) -> Order {
    if translation_length(k, m) > 0 {
        return Order::Infinite;
    }
    let bound = order_bound(k);
    let mut acc = m.clone();
    for n in 1..=bound {
        if acc.is_identity(k) {
            return Order::Finite(n);
        }
        acc = acc.mul(k, m);
    }
    Order::Infinite
}

/// `tr A = 0`, for `A != +-I`.
pub fn is_involution(k: &Field, m: &Mat2) -> Result<bool> {
    if m.is_identity(k) {
        return Err(Error::Precondition { expected: "non-identity", found: m.format(k) });
    }
    Ok(k.is_zero(&m.trace(k)))
}
