//! Exact scalar arithmetic for the working local field.
//!
//! Two coefficient domains are supported: `Q` embedded in `Q_p`, and `F_q(t)` embedded
//! in `F_q((t))`. Either may carry a split quadratic extension `x + y*s` with
//! `s^2 = d`, where `d` is a unit whose residue is a nonzero square; `s` is pinned to
//! one of the two `pi`-adic square roots by its residue. Every equality and sign test is
//! exact; `pi`-adic digit expansions are only produced on demand (valuations, residues,
//! tree-vertex normal forms, Hensel lifts).

mod parse;
pub mod poly;
pub mod residue;

use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use poly::RatFunc;
pub use residue::ResidueField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Padic,
    Laurent,
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Padic => write!(f, "padic"),
            FieldKind::Laurent => write!(f, "laurent"),
        }
    }
}

/// An element of the base coefficient domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    Q(BigRational),
    F(RatFunc),
}

/// `x + y*s`; `y` is zero when the field has no quadratic extension.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    pub x: Base,
    pub y: Base,
}

/// Split quadratic extension datum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadExt {
    pub d: Base,
    pub chosen_root_residue: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldConfig {
    pub kind: FieldKind,
    pub p: u32,
    pub f: u32,
    pub residue_modulus: Option<Vec<u32>>,
    pub ext: Option<QuadExt>,
    pub hensel_precision: usize,
}

pub const DEFAULT_PRECISION: usize = 20;

impl FieldConfig {
    pub fn padic(p: u32) -> Self {
        FieldConfig {
            kind: FieldKind::Padic,
            p,
            f: 1,
            residue_modulus: None,
            ext: None,
            hensel_precision: DEFAULT_PRECISION,
        }
    }

    pub fn laurent(p: u32, f: u32) -> Self {
        FieldConfig { kind: FieldKind::Laurent, f, ..Self::padic(p) }
    }

    pub fn with_ext(mut self, d: Base, chosen_root_residue: u32) -> Self {
        self.ext = Some(QuadExt { d, chosen_root_residue });
        self
    }

    /// `q = p^f`.
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.f)
    }

    pub fn is_qp(&self) -> bool {
        self.kind == FieldKind::Padic
    }

    /// Short label such as `Q_5` or `F_9((t))`.
    pub fn label(&self) -> String {
        let base = match self.kind {
            FieldKind::Padic => format!("Q_{}", self.p),
            FieldKind::Laurent => format!("F_{}((t))", self.q()),
        };
        match &self.ext {
            None => base,
            Some(e) => match ResidueField::new(self.p, self.f, self.residue_modulus.clone()) {
                Ok(k) => format!("{base}[s^2 = {}]", parse::format_base_plain(&e.d, &k)),
                Err(_) => base,
            },
        }
    }
}

/// A truncated expansion in the uniformiser: `value mod p^prec` or the first `prec`
/// coefficients of a power series in `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Series {
    Int { value: BigInt, prec: usize },
    Pow(Vec<u32>),
}

impl Series {
    pub(crate) fn prec(&self) -> usize {
        match self {
            Series::Int { prec, .. } => *prec,
            Series::Pow(c) => c.len(),
        }
    }
}

/// Uniformiser digits `d_0 + d_1 pi + ...` of a Hensel lift. For `Q_p` digits lie in
/// `0..p`; for `F_q((t))` they are residue-field codes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Digits(pub Vec<u32>);

impl Digits {
    pub fn truncate(&self, m: usize) -> Digits {
        Digits(self.0[..m.min(self.0.len())].to_vec())
    }

    /// The integer `sum d_i p^i` (meaningful for `Q_p`).
    pub fn to_integer(&self, p: u32) -> BigInt {
        self.0
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, &d| acc * BigInt::from(p) + BigInt::from(d))
    }
}

struct Inner {
    cfg: FieldConfig,
    k: ResidueField,
    sqrt_cache: RwLock<Option<Series>>,
}

/// The working local field. Cheap to clone; shareable across threads.
#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.inner.cfg.label())
    }
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(big(n))
}

fn vp_int(n: &BigInt, p: u32) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

impl Field {
    pub fn new(cfg: FieldConfig) -> Result<Self> {
        if cfg.kind == FieldKind::Padic && cfg.f != 1 {
            return Err(Error::InvalidField(
                "p-adic fields are modelled as Q_p exactly (f = 1)".into(),
            ));
        }
        if cfg.hensel_precision == 0 {
            return Err(Error::InvalidField("precision must be positive".into()));
        }
        let k = ResidueField::new(cfg.p, cfg.f, cfg.residue_modulus.clone())?;
        let mut cfg = cfg;
        if cfg.kind == FieldKind::Laurent && cfg.f > 1 {
            cfg.residue_modulus = Some(k.modulus().to_vec());
        }
        let no_ext = FieldConfig { ext: None, ..cfg.clone() };
        let field = Field {
            inner: Arc::new(Inner { cfg: no_ext, k: k.clone(), sqrt_cache: RwLock::new(None) }),
        };
        let Some(ext) = cfg.ext.clone() else {
            return Ok(field);
        };
        field.check_base(&ext.d)?;
        if cfg.p == 2 {
            return Err(Error::InvalidField(
                "quadratic extensions need odd residue characteristic".into(),
            ));
        }
        if field.base_val(&ext.d) != Some(0) {
            return Err(Error::InvalidField("extension radicand must be a unit".into()));
        }
        if field.base_is_square(&ext.d) {
            return Err(Error::InvalidField("extension radicand is already a square".into()));
        }
        let rd = field.base_residue(&ext.d)?;
        if ext.chosen_root_residue >= k.q() || k.mul(ext.chosen_root_residue, ext.chosen_root_residue) != rd
        {
            return Err(Error::InvalidField(format!(
                "chosen root residue {} does not square to the residue of d ({})",
                ext.chosen_root_residue,
                k.format(rd)
            )));
        }
        Ok(Field { inner: Arc::new(Inner { cfg, k, sqrt_cache: RwLock::new(None) }) })
    }

    pub fn config(&self) -> &FieldConfig {
        &self.inner.cfg
    }
    pub fn residue_field(&self) -> &ResidueField {
        &self.inner.k
    }
    pub fn kind(&self) -> FieldKind {
        self.inner.cfg.kind
    }
    pub fn p(&self) -> u32 {
        self.inner.cfg.p
    }
    pub fn q(&self) -> u64 {
        self.inner.k.q() as u64
    }
    pub fn is_qp(&self) -> bool {
        self.inner.cfg.is_qp()
    }
    pub fn ext(&self) -> Option<&QuadExt> {
        self.inner.cfg.ext.as_ref()
    }
    pub fn precision(&self) -> usize {
        self.inner.cfg.hensel_precision
    }

    // ---- base domain -------------------------------------------------------------

    pub fn base_int(&self, n: i64) -> Base {
        match self.kind() {
            FieldKind::Padic => Base::Q(rat(n)),
            FieldKind::Laurent => Base::F(RatFunc::constant(self.inner.k.from_int(n))),
        }
    }

    pub fn base_zero(&self) -> Base {
        self.base_int(0)
    }

    /// The uniformiser raised to `e`.
    pub fn base_pi_pow(&self, e: i64) -> Base {
        match self.kind() {
            FieldKind::Padic => {
                let pe = num_traits::pow(big(self.p() as i64), e.unsigned_abs() as usize);
                Base::Q(if e >= 0 {
                    BigRational::from_integer(pe)
                } else {
                    BigRational::new(BigInt::one(), pe)
                })
            }
            FieldKind::Laurent => Base::F(RatFunc::monomial(1, e)),
        }
    }

    /// A residue-field element viewed as a constant (Teichmuller-free representative:
    /// the integer `0..p` for `Q_p`, the constant for `F_q((t))`).
    pub fn base_digit(&self, d: u32) -> Base {
        match self.kind() {
            FieldKind::Padic => Base::Q(rat(d as i64)),
            FieldKind::Laurent => Base::F(RatFunc::constant(d)),
        }
    }

    pub fn base_is_zero(&self, a: &Base) -> bool {
        match a {
            Base::Q(r) => r.is_zero(),
            Base::F(r) => r.is_zero(),
        }
    }

    pub fn base_add(&self, a: &Base, b: &Base) -> Base {
        match (a, b) {
            (Base::Q(x), Base::Q(y)) => Base::Q(x + y),
            (Base::F(x), Base::F(y)) => Base::F(x.add(y, &self.inner.k)),
            _ => panic!("mixed coefficient domains"),
        }
    }

    pub fn base_neg(&self, a: &Base) -> Base {
        match a {
            Base::Q(x) => Base::Q(-x),
            Base::F(x) => Base::F(x.neg(&self.inner.k)),
        }
    }

    pub fn base_sub(&self, a: &Base, b: &Base) -> Base {
        self.base_add(a, &self.base_neg(b))
    }

    pub fn base_mul(&self, a: &Base, b: &Base) -> Base {
        match (a, b) {
            (Base::Q(x), Base::Q(y)) => Base::Q(x * y),
            (Base::F(x), Base::F(y)) => Base::F(x.mul(y, &self.inner.k)),
            _ => panic!("mixed coefficient domains"),
        }
    }

    pub fn base_inv(&self, a: &Base) -> Result<Base> {
        match a {
            Base::Q(x) if x.is_zero() => Err(Error::DivisionByZero),
            Base::Q(x) => Ok(Base::Q(x.recip())),
            Base::F(x) => x.inv(&self.inner.k).map(Base::F).ok_or(Error::DivisionByZero),
        }
    }

    /// Valuation; `None` stands for `+inf`.
    pub fn base_val(&self, a: &Base) -> Option<i64> {
        match a {
            Base::Q(x) if x.is_zero() => None,
            Base::Q(x) => Some(vp_int(x.numer(), self.p()) - vp_int(x.denom(), self.p())),
            Base::F(x) => x.valuation(),
        }
    }

    pub fn base_is_square(&self, a: &Base) -> bool {
        match a {
            Base::Q(x) => is_perfect_square(&(x.numer() * x.denom())),
            Base::F(x) => {
                let k = &self.inner.k;
                poly::sqrt(k, &poly::mul(k, &x.num, &x.den)).is_some()
            }
        }
    }

    /// An exact square root inside the base domain, if one exists.
    pub fn base_sqrt_exact(&self, a: &Base) -> Option<Base> {
        match a {
            Base::Q(x) => {
                if x.is_negative() {
                    return None;
                }
                let (n, d) = (x.numer().sqrt(), x.denom().sqrt());
                (&n * &n == *x.numer() && &d * &d == *x.denom())
                    .then(|| Base::Q(BigRational::new(n, d)))
            }
            Base::F(x) => {
                let k = &self.inner.k;
                let n = poly::sqrt(k, &x.num)?;
                let d = poly::sqrt(k, &x.den)?;
                Some(Base::F(RatFunc::new(k, n, d)))
            }
        }
    }

    fn base_positive(&self, a: &Base) -> bool {
        match a {
            Base::Q(x) => x.is_positive(),
            Base::F(x) => match x.num.last() {
                None => false,
                Some(&lc) => lc <= self.inner.k.neg(lc),
            },
        }
    }

    pub fn base_residue(&self, a: &Base) -> Result<u32> {
        match self.base_val(a) {
            None => Ok(0),
            Some(v) if v < 0 => Err(Error::NegativeValuation(v)),
            Some(_) => Ok(self.series_digits(&self.base_series(a, 1))[0]),
        }
    }

    pub fn check_base(&self, a: &Base) -> Result<()> {
        match (self.kind(), a) {
            (FieldKind::Padic, Base::Q(_)) => Ok(()),
            (FieldKind::Laurent, Base::F(r)) => {
                let k = &self.inner.k;
                let in_range = r.num.iter().chain(&r.den).all(|&c| c < k.q());
                let reduced = !r.den.is_empty()
                    && r.den.last() == Some(&1)
                    && r.num.last() != Some(&0)
                    && (r.num.is_empty() || poly::gcd(k, &r.num, &r.den) == vec![1]);
                if in_range && reduced {
                    Ok(())
                } else {
                    Err(Error::Malformed(format!("{r:?} is not a reduced element of F_q(t)")))
                }
            }
            _ => Err(Error::Malformed(format!(
                "coefficient domain does not match {} field",
                self.kind()
            ))),
        }
    }

    // ---- truncated expansions -----------------------------------------------------

    fn p_pow(&self, k: usize) -> BigInt {
        num_traits::pow(big(self.p() as i64), k)
    }

    /// Expansion of a base element of nonnegative valuation to `prec` digits.
    pub(crate) fn base_series(&self, a: &Base, prec: usize) -> Series {
        match a {
            Base::Q(x) => {
                let m = self.p_pow(prec);
                if x.is_zero() {
                    return Series::Int { value: BigInt::zero(), prec };
                }
                let inv = mod_inverse(&x.denom().mod_floor(&m), &m)
                    .expect("series of an element of negative valuation");
                Series::Int { value: (x.numer() * inv).mod_floor(&m), prec }
            }
            Base::F(x) => {
                let k = &self.inner.k;
                let inv = power_series_inverse(k, &x.den, prec);
                let mut out = vec![0; prec];
                for (i, &a) in x.num.iter().enumerate().take(prec) {
                    if a == 0 {
                        continue;
                    }
                    for j in 0..(prec - i) {
                        out[i + j] = k.add(out[i + j], k.mul(a, inv[j]));
                    }
                }
                Series::Pow(out)
            }
        }
    }

    pub(crate) fn series_from_digits(&self, digits: &[u32]) -> Series {
        match self.kind() {
            FieldKind::Padic => Series::Int {
                value: Digits(digits.to_vec()).to_integer(self.p()),
                prec: digits.len(),
            },
            FieldKind::Laurent => Series::Pow(digits.to_vec()),
        }
    }

    pub(crate) fn series_digits(&self, s: &Series) -> Vec<u32> {
        match s {
            Series::Int { value, prec } => {
                let p = big(self.p() as i64);
                let mut v = value.clone();
                (0..*prec)
                    .map(|_| {
                        let (q, r) = v.div_mod_floor(&p);
                        v = q;
                        r.to_u32().unwrap()
                    })
                    .collect()
            }
            Series::Pow(c) => c.clone(),
        }
    }

    pub(crate) fn series_truncate(&self, s: &Series, prec: usize) -> Series {
        match s {
            Series::Int { value, .. } => {
                Series::Int { value: value.mod_floor(&self.p_pow(prec)), prec }
            }
            Series::Pow(c) => Series::Pow(c[..prec].to_vec()),
        }
    }

    pub(crate) fn series_add(&self, a: &Series, b: &Series) -> Series {
        match (a, b) {
            (Series::Int { value: x, prec }, Series::Int { value: y, .. }) => {
                Series::Int { value: (x + y).mod_floor(&self.p_pow(*prec)), prec: *prec }
            }
            (Series::Pow(x), Series::Pow(y)) => {
                let k = &self.inner.k;
                Series::Pow(x.iter().zip(y).map(|(&u, &v)| k.add(u, v)).collect())
            }
            _ => unreachable!(),
        }
    }

    pub(crate) fn series_neg(&self, a: &Series) -> Series {
        match a {
            Series::Int { value, prec } => {
                Series::Int { value: (-value).mod_floor(&self.p_pow(*prec)), prec: *prec }
            }
            Series::Pow(x) => Series::Pow(x.iter().map(|&u| self.inner.k.neg(u)).collect()),
        }
    }

    pub(crate) fn series_mul(&self, a: &Series, b: &Series) -> Series {
        match (a, b) {
            (Series::Int { value: x, prec }, Series::Int { value: y, .. }) => {
                Series::Int { value: (x * y).mod_floor(&self.p_pow(*prec)), prec: *prec }
            }
            (Series::Pow(x), Series::Pow(y)) => {
                let k = &self.inner.k;
                let n = x.len();
                let mut out = vec![0; n];
                for (i, &u) in x.iter().enumerate() {
                    if u == 0 {
                        continue;
                    }
                    for j in 0..(n - i) {
                        out[i + j] = k.add(out[i + j], k.mul(u, y[j]));
                    }
                }
                Series::Pow(out)
            }
            _ => unreachable!(),
        }
    }

    /// Inverse of a unit series.
    pub(crate) fn series_inv(&self, a: &Series) -> Option<Series> {
        match a {
            Series::Int { value, prec } => {
                let m = self.p_pow(*prec);
                mod_inverse(value, &m).map(|v| Series::Int { value: v, prec: *prec })
            }
            Series::Pow(x) => {
                if x.first().copied().unwrap_or(0) == 0 {
                    return None;
                }
                Some(Series::Pow(power_series_inverse(&self.inner.k, x, x.len())))
            }
        }
    }

    /// Index of the first nonzero digit, or `None` if the series vanishes to its precision.
    pub(crate) fn series_order(&self, a: &Series) -> Option<usize> {
        match a {
            Series::Int { value, .. } if value.is_zero() => None,
            Series::Int { value, .. } => Some(vp_int(value, self.p()) as usize),
            Series::Pow(x) => x.iter().position(|&c| c != 0),
        }
    }

    /// The chosen square root of the extension radicand, to `prec` digits.
    pub(crate) fn sqrt_series(&self, prec: usize) -> Series {
        let ext = self.ext().expect("field has no quadratic extension");
        if let Some(s) = self.inner.sqrt_cache.read().unwrap().as_ref() {
            if s.prec() >= prec {
                return self.series_truncate(s, prec);
            }
        }
        let target = prec.max(32);
        let d = self.base_series(&ext.d, target);
        let unit = self.series_from_digits(&{
            let mut one = vec![0; target];
            one[0] = 1;
            one
        });
        let zero = self.series_from_digits(&vec![0; target]);
        // lambda^2 - d
        let coeffs = vec![self.series_neg(&d), zero, unit];
        let lifted = self
            .lift_series(&coeffs, ext.chosen_root_residue, target)
            .expect("split radicand has a simple residue root");
        *self.inner.sqrt_cache.write().unwrap() = Some(lifted.clone());
        self.series_truncate(&lifted, prec)
    }

    fn eval_series(&self, coeffs: &[Series], x: &Series) -> Series {
        let mut acc = coeffs.last().unwrap().clone();
        for c in coeffs.iter().rev().skip(1) {
            acc = self.series_add(&self.series_mul(&acc, x), c);
        }
        acc
    }

    /// Newton iteration on series coefficients, starting from the residue root `r0`.
    pub(crate) fn lift_series(&self, coeffs: &[Series], r0: u32, prec: usize) -> Result<Series> {
        let k = &self.inner.k;
        let residues: Vec<u32> = coeffs.iter().map(|c| self.series_digits(c)[0]).collect();
        if poly::eval(k, &residues, r0) != 0 {
            return Err(Error::ResidueNonRoot);
        }
        let deriv: Vec<Series> = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| {
                let mut digits = vec![0; prec];
                digits[0] = k.from_int(i as i64);
                self.series_mul(c, &self.series_from_digits(&digits))
            })
            .collect();
        let dres: Vec<u32> = deriv.iter().map(|c| self.series_digits(c)[0]).collect();
        if deriv.is_empty() || poly::eval(k, &dres, r0) == 0 {
            return Err(Error::NonSimpleRoot);
        }
        let mut digits = vec![0; prec];
        digits[0] = r0;
        let mut r = self.series_from_digits(&digits);
        for _ in 0..=prec {
            let fr = self.eval_series(coeffs, &r);
            if self.series_order(&fr).is_none() {
                return Ok(r);
            }
            let dr = self.eval_series(&deriv, &r);
            let step = self.series_mul(&fr, &self.series_inv(&dr).ok_or(Error::NonSimpleRoot)?);
            r = self.series_add(&r, &self.series_neg(&step));
        }
        unreachable!("Newton iteration converges for simple roots")
    }

    // ---- scalars -----------------------------------------------------------------

    pub fn from_base(&self, x: Base) -> Scalar {
        Scalar { y: self.base_zero(), x }
    }

    pub fn int(&self, n: i64) -> Scalar {
        self.from_base(self.base_int(n))
    }

    pub fn zero(&self) -> Scalar {
        self.int(0)
    }

    pub fn one(&self) -> Scalar {
        self.int(1)
    }

    pub fn rational(&self, num: i64, den: i64) -> Result<Scalar> {
        let d = self.base_inv(&self.base_int(den))?;
        Ok(self.from_base(self.base_mul(&self.base_int(num), &d)))
    }

    pub fn pi_pow(&self, e: i64) -> Scalar {
        self.from_base(self.base_pi_pow(e))
    }

    /// The generator `s` of the quadratic extension.
    pub fn sqrt_d(&self) -> Result<Scalar> {
        if self.ext().is_none() {
            return Err(Error::Malformed("field has no quadratic extension".into()));
        }
        Ok(Scalar { x: self.base_zero(), y: self.base_int(1) })
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        self.base_is_zero(&a.x) && self.base_is_zero(&a.y)
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar { x: self.base_add(&a.x, &b.x), y: self.base_add(&a.y, &b.y) }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar { x: self.base_sub(&a.x, &b.x), y: self.base_sub(&a.y, &b.y) }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        Scalar { x: self.base_neg(&a.x), y: self.base_neg(&a.y) }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        let ay = !self.base_is_zero(&a.y);
        let by = !self.base_is_zero(&b.y);
        if !ay && !by {
            return self.from_base(self.base_mul(&a.x, &b.x));
        }
        let d = &self.ext().expect("irrational scalar without extension").d;
        let mut x = self.base_mul(&a.x, &b.x);
        if ay && by {
            x = self.base_add(&x, &self.base_mul(d, &self.base_mul(&a.y, &b.y)));
        }
        let y = self.base_add(&self.base_mul(&a.x, &b.y), &self.base_mul(&a.y, &b.x));
        Scalar { x, y }
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar> {
        if self.base_is_zero(&a.y) {
            return Ok(self.from_base(self.base_inv(&a.x)?));
        }
        let d = &self.ext().unwrap().d;
        let norm = self.base_sub(
            &self.base_mul(&a.x, &a.x),
            &self.base_mul(d, &self.base_mul(&a.y, &a.y)),
        );
        let ninv = self.base_inv(&norm)?;
        Ok(Scalar {
            x: self.base_mul(&a.x, &ninv),
            y: self.base_neg(&self.base_mul(&a.y, &ninv)),
        })
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Scalar, e: u64) -> Scalar {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn check(&self, a: &Scalar) -> Result<()> {
        self.check_base(&a.x)?;
        self.check_base(&a.y)?;
        if self.ext().is_none() && !self.base_is_zero(&a.y) {
            return Err(Error::Malformed("irrational part without a quadratic extension".into()));
        }
        Ok(())
    }

    /// Sign convention used to pick a canonical representative of `{A, -A}`.
    pub fn is_positive(&self, a: &Scalar) -> bool {
        if !self.base_is_zero(&a.x) {
            self.base_positive(&a.x)
        } else {
            self.base_positive(&a.y)
        }
    }

    /// Valuation; `None` stands for `+inf`.
    pub fn valuation(&self, a: &Scalar) -> Option<i64> {
        let vx = self.base_val(&a.x);
        let vy = self.base_val(&a.y);
        match (vx, vy) {
            (None, None) => None,
            (Some(v), None) | (None, Some(v)) => Some(v),
            (Some(u), Some(v)) if u != v => Some(u.min(v)),
            (Some(_), Some(v)) => {
                let d = &self.ext().unwrap().d;
                // w = x / y is a unit; v(w + s) <= v(w^2 - d) because w - s is integral.
                let w = self.base_mul(&a.x, &self.base_inv(&a.y).unwrap());
                let norm = self.base_sub(&self.base_mul(&w, &w), d);
                let bound = self.base_val(&norm).expect("radicand is not a square") as usize;
                let prec = bound + 1;
                let sum = self.series_add(&self.base_series(&w, prec), &self.sqrt_series(prec));
                let j = self.series_order(&sum).expect("valuation bounded by the norm");
                Some(v + j as i64)
            }
        }
    }

    /// Digits of `a` at uniformiser positions `lo..hi`, returned as `(lo, digits)`, where
    /// `lo` is the smallest component valuation. All digits below `lo` vanish.
    pub fn expand(&self, a: &Scalar, hi: i64) -> (i64, Vec<u32>) {
        let lo = match (self.base_val(&a.x), self.base_val(&a.y)) {
            (None, None) => return (hi, Vec::new()),
            (Some(u), None) | (None, Some(u)) => u,
            (Some(u), Some(v)) => u.min(v),
        };
        if hi <= lo {
            return (hi, Vec::new());
        }
        let prec = (hi - lo) as usize;
        let shift = self.base_pi_pow(-lo);
        let xs = self.base_series(&self.base_mul(&a.x, &shift), prec);
        let mut total = xs;
        if !self.base_is_zero(&a.y) {
            let ys = self.base_series(&self.base_mul(&a.y, &shift), prec);
            total = self.series_add(&total, &self.series_mul(&ys, &self.sqrt_series(prec)));
        }
        (lo, self.series_digits(&total))
    }

    /// Image in the residue field.
    pub fn residue(&self, a: &Scalar) -> Result<u32> {
        match self.valuation(a) {
            None => Ok(0),
            Some(v) if v < 0 => Err(Error::NegativeValuation(v)),
            Some(v) if v > 0 => Ok(0),
            Some(_) => {
                let (lo, digits) = self.expand(a, 1);
                let idx = (0 - lo) as usize;
                Ok(digits[idx])
            }
        }
    }

    /// `sum d_i pi^(lo + i)` as an exact base element.
    pub fn base_from_digits(&self, lo: i64, digits: &[u32]) -> Base {
        match self.kind() {
            FieldKind::Padic => {
                let n = Digits(digits.to_vec()).to_integer(self.p());
                let scale = self.base_pi_pow(lo);
                self.base_mul(&Base::Q(BigRational::from_integer(n)), &scale)
            }
            FieldKind::Laurent => {
                let mut num = digits.to_vec();
                poly::trim(&mut num);
                let f = RatFunc { num, den: vec![1] };
                self.base_mul(&Base::F(f), &self.base_pi_pow(lo))
            }
        }
    }

    // ---- Hensel lifting --------------------------------------------------------------

    fn scalar_series(&self, a: &Scalar, prec: usize) -> Result<Series> {
        if let Some(v) = self.valuation(a) {
            if v < 0 {
                return Err(Error::NegativeValuation(v));
            }
        }
        let (lo, digits) = self.expand(a, prec as i64);
        let mut out = vec![0; prec];
        for (i, &d) in digits.iter().enumerate() {
            let pos = lo + i as i64;
            if pos >= 0 {
                out[pos as usize] = d;
            }
        }
        Ok(self.series_from_digits(&out))
    }

    /// Lifts the simple residue root `r0` of `poly` (coefficients low degree first, all
    /// of nonnegative valuation) to a root modulo `pi^n`.
    pub fn hensel_lift(&self, poly: &[Scalar], r0: u32, n: usize) -> Result<Digits> {
        if n == 0 {
            return Ok(Digits(Vec::new()));
        }
        let coeffs = poly.iter().map(|c| self.scalar_series(c, n)).collect::<Result<Vec<_>>>()?;
        let root = self.lift_series(&coeffs, r0, n)?;
        Ok(Digits(self.series_digits(&root)))
    }

    /// Number of roots of `poly` in the residue ring `O / pi^k`, found by extending roots
    /// one digit at a time.
    pub fn count_ring_roots(&self, poly: &[Scalar], k: usize) -> Result<usize> {
        if k == 0 {
            return Ok(1);
        }
        let coeffs = poly.iter().map(|c| self.scalar_series(c, k)).collect::<Result<Vec<_>>>()?;
        let q = self.inner.k.q();
        let mut roots: Vec<Vec<u32>> = vec![Vec::new()];
        for j in 1..=k {
            let trunc: Vec<Series> = coeffs.iter().map(|c| self.series_truncate(c, j)).collect();
            roots = roots
                .into_iter()
                .flat_map(|r| {
                    (0..q).map(move |d| {
                        let mut r = r.clone();
                        r.push(d);
                        r
                    })
                })
                .filter(|r| {
                    let x = self.series_from_digits(r);
                    self.series_order(&self.eval_series(&trunc, &x)).is_none()
                })
                .collect();
        }
        Ok(roots.len())
    }

    /// A primitive `n`-th root of unity to `prec` digits, if `K` contains one.
    pub fn primitive_root_of_unity(&self, n: u64, prec: usize) -> Result<Option<Digits>> {
        if n.is_multiple_of(self.p() as u64) {
            return Err(Error::OrderDivisibleByP(n));
        }
        let k = &self.inner.k;
        if !(k.q() as u64 - 1).is_multiple_of(n) {
            return Ok(None);
        }
        let zeta0 = k.elements().find(|&x| k.mult_order(x) == Some(n)).unwrap();
        if self.kind() == FieldKind::Laurent {
            let mut d = vec![0; prec];
            if prec > 0 {
                d[0] = zeta0;
            }
            return Ok(Some(Digits(d)));
        }
        // lambda^n - 1
        let mut poly = vec![self.zero(); n as usize + 1];
        poly[0] = self.int(-1);
        poly[n as usize] = self.one();
        self.hensel_lift(&poly, zeta0, prec).map(Some)
    }

    /// Digits of a series product, for tests and oracles on lifted values.
    pub fn digits_pow(&self, a: &Digits, e: u64) -> Digits {
        let s = self.series_from_digits(&a.0);
        let mut acc = {
            let mut one = vec![0; a.0.len()];
            if !one.is_empty() {
                one[0] = 1;
            }
            self.series_from_digits(&one)
        };
        for _ in 0..e {
            acc = self.series_mul(&acc, &s);
        }
        Digits(self.series_digits(&acc))
    }

    pub fn parse_scalar(&self, text: &str) -> Result<Scalar> {
        parse::parse_scalar(self, text)
    }

    pub fn format_scalar(&self, a: &Scalar) -> String {
        parse::format_scalar(self, a)
    }

    pub fn format_base(&self, a: &Base) -> String {
        parse::format_base_plain(a, &self.inner.k)
    }
}

fn power_series_inverse(k: &ResidueField, den: &[u32], prec: usize) -> Vec<u32> {
    let d0_inv = k.inv(den[0]).expect("power series inverse of a non-unit");
    let mut inv = vec![0; prec];
    if prec == 0 {
        return inv;
    }
    inv[0] = d0_inv;
    for n in 1..prec {
        let mut acc = 0;
        for i in 1..=n.min(den.len().saturating_sub(1)) {
            acc = k.add(acc, k.mul(den[i], inv[n - i]));
        }
        inv[n] = k.neg(k.mul(d0_inv, acc));
    }
    inv
}
