//! Dense polynomials over the residue field `F_q`, and reduced rational functions
//! in `t` built from them.

use super::residue::ResidueField;

/// Coefficients low degree first, no trailing zeros (the zero polynomial is empty).
pub type Poly = Vec<u32>;

pub fn trim(p: &mut Poly) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

pub fn add(k: &ResidueField, a: &[u32], b: &[u32]) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n)
        .map(|i| k.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
        .collect();
    trim(&mut out);
    out
}

pub fn neg(k: &ResidueField, a: &[u32]) -> Poly {
    a.iter().map(|&c| k.neg(c)).collect()
}

pub fn sub(k: &ResidueField, a: &[u32], b: &[u32]) -> Poly {
    add(k, a, &neg(k, b))
}

pub fn mul(k: &ResidueField, a: &[u32], b: &[u32]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = k.add(out[i + j], k.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

pub fn scale(k: &ResidueField, a: &[u32], c: u32) -> Poly {
    let mut out: Poly = a.iter().map(|&x| k.mul(x, c)).collect();
    trim(&mut out);
    out
}

/// Euclidean division; `b` must be nonzero.
pub fn divrem(k: &ResidueField, a: &[u32], b: &[u32]) -> (Poly, Poly) {
    assert!(!b.is_empty(), "polynomial division by zero");
    let lead_inv = k.inv(*b.last().unwrap()).unwrap();
    let mut rem: Poly = a.to_vec();
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quo = vec![0; rem.len() - b.len() + 1];
    while rem.len() >= b.len() && !rem.is_empty() {
        let shift = rem.len() - b.len();
        let c = k.mul(*rem.last().unwrap(), lead_inv);
        quo[shift] = c;
        for (i, &y) in b.iter().enumerate() {
            rem[shift + i] = k.sub(rem[shift + i], k.mul(c, y));
        }
        trim(&mut rem);
    }
    trim(&mut quo);
    (quo, rem)
}

pub fn monic(k: &ResidueField, a: &[u32]) -> (Poly, u32) {
    match a.last() {
        None => (Vec::new(), 0),
        Some(&l) => (scale(k, a, k.inv(l).unwrap()), l),
    }
}

pub fn gcd(k: &ResidueField, a: &[u32], b: &[u32]) -> Poly {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    while !y.is_empty() {
        let (_, r) = divrem(k, &x, &y);
        x = y;
        y = r;
    }
    monic(k, &x).0
}

/// Order of vanishing at `t = 0`.
pub fn ord0(a: &[u32]) -> Option<usize> {
    a.iter().position(|&c| c != 0)
}

pub fn eval(k: &ResidueField, a: &[u32], x: u32) -> u32 {
    a.iter().rev().fold(0, |acc, &c| k.add(k.mul(acc, x), c))
}

/// Exact square root of a polynomial, when one exists (odd characteristic only).
pub fn sqrt(k: &ResidueField, a: &[u32]) -> Option<Poly> {
    if a.is_empty() {
        return Some(Vec::new());
    }
    if k.p() == 2 || (a.len() - 1) % 2 == 1 {
        return None;
    }
    let deg = (a.len() - 1) / 2;
    let lead = *k.sqrts(*a.last().unwrap()).first()?;
    // Solve r^2 = a from the top coefficient down.
    let mut r = vec![0u32; deg + 1];
    r[deg] = lead;
    let two_lead_inv = k.inv(k.add(lead, lead))?;
    for i in (0..deg).rev() {
        // coefficient of t^{deg + i} in r^2 must match a
        let pos = deg + i;
        let acc = ((i + 1)..deg).fold(0, |acc, j| k.add(acc, k.mul(r[j], r[pos - j])));
        r[i] = k.mul(k.sub(a[pos], acc), two_lead_inv);
    }
    trim(&mut r);
    if mul(k, &r, &r) == a {
        Some(r)
    } else {
        None
    }
}

/// A rational function `num / den` over `F_q` in lowest terms with monic `den`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: Vec::new(), den: vec![1] }
    }

    pub fn constant(c: u32) -> Self {
        let mut num = vec![c];
        trim(&mut num);
        RatFunc { num, den: vec![1] }
    }

    /// `c * t^e`.
    pub fn monomial(c: u32, e: i64) -> Self {
        if c == 0 {
            return Self::zero();
        }
        if e >= 0 {
            let mut num = vec![0; e as usize + 1];
            num[e as usize] = c;
            RatFunc { num, den: vec![1] }
        } else {
            let mut den = vec![0; (-e) as usize + 1];
            den[(-e) as usize] = 1;
            RatFunc { num: vec![c], den }
        }
    }

    pub fn new(k: &ResidueField, num: Poly, den: Poly) -> Self {
        assert!(!den.is_empty(), "rational function with zero denominator");
        if num.is_empty() {
            return Self::zero();
        }
        let g = gcd(k, &num, &den);
        let (n, _) = divrem(k, &num, &g);
        let (d, _) = divrem(k, &den, &g);
        let (d, lead) = monic(k, &d);
        let n = scale(k, &n, k.inv(lead).unwrap());
        RatFunc { num: n, den: d }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn add(&self, other: &Self, k: &ResidueField) -> Self {
        if self.den == other.den {
            return Self::new(k, add(k, &self.num, &other.num), self.den.clone());
        }
        let num = add(k, &mul(k, &self.num, &other.den), &mul(k, &other.num, &self.den));
        Self::new(k, num, mul(k, &self.den, &other.den))
    }

    pub fn neg(&self, k: &ResidueField) -> Self {
        RatFunc { num: neg(k, &self.num), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self, k: &ResidueField) -> Self {
        self.add(&other.neg(k), k)
    }

    pub fn mul(&self, other: &Self, k: &ResidueField) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::new(k, mul(k, &self.num, &other.num), mul(k, &self.den, &other.den))
    }

    pub fn inv(&self, k: &ResidueField) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::new(k, self.den.clone(), self.num.clone()))
    }

    /// The `t`-adic valuation; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        let n = ord0(&self.num)? as i64;
        let d = ord0(&self.den).unwrap() as i64;
        Some(n - d)
    }

    /// Whether the denominator is a pure power of `t` (a Laurent polynomial).
    pub fn laurent_shift(&self) -> Option<usize> {
        let d = self.den.len() - 1;
        (self.den[..d].iter().all(|&c| c == 0)).then_some(d)
    }
}
