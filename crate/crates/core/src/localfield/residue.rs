//! The finite residue field `F_q`, `q = p^f`.
//!
//! Elements are encoded as `u32` in `[0, q)`: the base-`p` digits of the code are the
//! coefficients of the element as a polynomial in the generator `g` (a root of the
//! configured irreducible modulus). For `f = 1` the code is simply the residue mod `p`.

use crate::error::{Error, Result};

/// Largest residue field handled when `f > 1` (arithmetic is table driven).
pub const MAX_TABLE_Q: u32 = 1024;

/// Conway-style irreducible moduli for the small extension fields, low degree first,
/// monic (the leading 1 is included).
const BUILTIN_MODULI: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (3, 2, &[1, 0, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 2, &[2, 0, 1]),
];

#[derive(Clone, Debug)]
pub struct ResidueField {
    p: u32,
    f: u32,
    q: u32,
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

#[derive(Clone, Debug)]
struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
    neg: Vec<u32>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl ResidueField {
    /// Builds `F_{p^f}`. `modulus` is a monic irreducible of degree `f` over `F_p`
    /// (low degree first); when omitted a built-in or searched modulus is used.
    pub fn new(p: u32, f: u32, modulus: Option<Vec<u32>>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if f == 0 {
            return Err(Error::InvalidField("residue degree must be positive".into()));
        }
        if p >= 1 << 31 {
            return Err(Error::InvalidField(format!("prime {p} is too large")));
        }
        let q = (p as u64)
            .checked_pow(f)
            .filter(|&q| f == 1 || q <= MAX_TABLE_Q as u64)
            .ok_or_else(|| {
                Error::InvalidField(format!("residue field {p}^{f} exceeds {MAX_TABLE_Q}"))
            })? as u32;
        if f == 1 {
            return Ok(Self { p, f, q, modulus: vec![0, 1], tables: None });
        }
        let modulus = match modulus {
            Some(m) => {
                let m: Vec<u32> = m.into_iter().map(|c| c % p).collect();
                if m.len() != f as usize + 1 || m[f as usize] != 1 {
                    return Err(Error::InvalidField(format!(
                        "residue modulus must be monic of degree {f}"
                    )));
                }
                if !is_irreducible(&m, p) {
                    return Err(Error::InvalidField("residue modulus is reducible".into()));
                }
                m
            }
            None => BUILTIN_MODULI
                .iter()
                .find(|(bp, bf, _)| *bp == p && *bf == f)
                .map(|(_, _, m)| m.to_vec())
                .unwrap_or_else(|| search_irreducible(p, f)),
        };
        let mut field = Self { p, f, q, modulus, tables: None };
        field.tables = Some(field.build_tables());
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn f(&self) -> u32 {
        self.f
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn decode(&self, x: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.f as usize);
        let mut x = x;
        for _ in 0..self.f {
            out.push(x % self.p);
            x /= self.p;
        }
        out
    }

    fn encode(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn slow_add(&self, x: u32, y: u32) -> u32 {
        let (a, b) = (self.decode(x), self.decode(y));
        let s: Vec<u32> = a.iter().zip(&b).map(|(u, v)| (u + v) % self.p).collect();
        self.encode(&s)
    }

    fn slow_mul(&self, x: u32, y: u32) -> u32 {
        let (a, b) = (self.decode(x), self.decode(y));
        let p = self.p as u64;
        let f = self.f as usize;
        let mut prod = vec![0u64; 2 * f];
        for (i, &u) in a.iter().enumerate() {
            for (j, &v) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u as u64 * v as u64) % p;
            }
        }
        for deg in (f..2 * f).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (k, &m) in self.modulus[..f].iter().enumerate() {
                let idx = deg - f + k;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
        }
        let digits: Vec<u32> = prod[..f].iter().map(|&c| c as u32).collect();
        self.encode(&digits)
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        let mut inv = vec![0; q];
        let mut neg = vec![0; q];
        for x in 0..q {
            for y in 0..q {
                add[x * q + y] = self.slow_add(x as u32, y as u32);
                mul[x * q + y] = self.slow_mul(x as u32, y as u32);
                if mul[x * q + y] == 1 {
                    inv[x] = y as u32;
                }
                if add[x * q + y] == 0 {
                    neg[x] = y as u32;
                }
            }
        }
        Tables { add, mul, inv, neg }
    }

    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, x: u32, y: u32) -> u32 {
        match &self.tables {
            Some(t) => t.add[(x * self.q + y) as usize],
            None => ((x as u64 + y as u64) % self.p as u64) as u32,
        }
    }

    pub fn neg(&self, x: u32) -> u32 {
        match &self.tables {
            Some(t) => t.neg[x as usize],
            None => (self.p - x) % self.p,
        }
    }

    pub fn sub(&self, x: u32, y: u32) -> u32 {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        match &self.tables {
            Some(t) => t.mul[(x * self.q + y) as usize],
            None => (x as u64 * y as u64 % self.p as u64) as u32,
        }
    }

    pub fn inv(&self, x: u32) -> Option<u32> {
        if x == 0 {
            return None;
        }
        match &self.tables {
            Some(t) => Some(t.inv[x as usize]),
            None => Some(self.pow(x, self.p as u64 - 2)),
        }
    }

    pub fn pow(&self, x: u32, mut e: u64) -> u32 {
        let mut base = x;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, x: u32) -> Option<u64> {
        if x == 0 {
            return None;
        }
        let n = self.q as u64 - 1;
        let mut order = n;
        for d in divisors(n) {
            if self.pow(x, d) == 1 {
                order = d;
                break;
            }
        }
        Some(order)
    }

    /// Square roots of `x`, in increasing code order.
    pub fn sqrts(&self, x: u32) -> Vec<u32> {
        (0..self.q).filter(|&r| self.mul(r, r) == x).collect()
    }

    /// Roots in `F_q` of a polynomial with residue coefficients (low degree first).
    pub fn roots(&self, poly: &[u32]) -> Vec<u32> {
        (0..self.q)
            .filter(|&r| poly.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, r), c)) == 0)
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }

    /// Renders an element; `g` names the generator when `f > 1`.
    pub fn format(&self, x: u32) -> String {
        if self.f == 1 {
            return x.to_string();
        }
        let digits = self.decode(x);
        let terms: Vec<String> = digits
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "g".to_string(),
                (1, c) => format!("{c}*g"),
                (i, 1) => format!("g^{i}"),
                (i, c) => format!("{c}*g^{i}"),
            })
            .collect();
        match terms.len() {
            0 => "0".into(),
            1 => terms[0].clone(),
            _ => format!("({})", terms.join(" + ")),
        }
    }

    /// The generator `g` of `F_q` over `F_p` (only meaningful for `f > 1`).
    pub fn generator(&self) -> u32 {
        if self.f == 1 {
            0
        } else {
            self.p
        }
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).take_while(|d| d * d <= n).filter(|d| n.is_multiple_of(*d)).collect();
    let upper: Vec<u64> = out.iter().rev().map(|d| n / d).filter(|&e| e * e != n).collect();
    out.extend(upper);
    out
}

fn poly_mod_p_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = num.iter().map(|&c| c as u64).collect();
    let dl = den.len();
    let lead_inv = {
        let l = den[dl - 1] as u64;
        let mut acc = 1u64;
        let mut b = l;
        let mut e = p as u64 - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        acc
    };
    while r.len() >= dl {
        let c = r[r.len() - 1] * lead_inv % p as u64;
        let shift = r.len() - dl;
        for (i, &d) in den.iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p as u64 - c) * d as u64) % p as u64;
        }
        r.pop();
        while r.last() == Some(&0) {
            r.pop();
        }
    }
    r.into_iter().map(|c| c as u32).collect()
}

fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut cand: Vec<u32> = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                cand.push((c % p as u64) as u32);
                c /= p as u64;
            }
            cand.push(1);
            if poly_mod_p_rem(m, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn search_irreducible(p: u32, f: u32) -> Vec<u32> {
    let count = (p as u64).pow(f);
    for code in 0..count {
        let mut cand = Vec::with_capacity(f as usize + 1);
        let mut c = code;
        for _ in 0..f {
            cand.push((c % p as u64) as u32);
            c /= p as u64;
        }
        cand.push(1);
        if is_irreducible(&cand, p) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
