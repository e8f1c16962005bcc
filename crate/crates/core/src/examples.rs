//! The congruence menu of possible discrete groups for a residue field size `q`, and exact
//! generator pairs realising each entry.
//!
//! Irrational parameters are carried by a single split quadratic extension. Over `Q_p` this
//! realises every entry whose parameters need at most one square root; the rest (cyclic
//! orders from 7 on, `S_4`, `A_5`, dihedral groups beyond `D_3`, two-level radicals) are
//! reported as [`Error::Unrealizable`]. Over `F_q((t))` all parameters are residue-field
//! constants and every menu entry is realised.

use std::fmt;

use crate::decide::{Case, Isomorphism};
use crate::error::{Error, Result};
use crate::groupkit::{self, FiniteGroupId, GroupTag};
use crate::localfield::{Base, Field, FieldConfig, FieldKind, ResidueField, Scalar};
use crate::psl2::Mat2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MenuEntry {
    pub case: Case,
    pub iso: Isomorphism,
    /// The congruence (or special case) admitting the entry.
    pub witness: String,
}

#[derive(Clone, Debug)]
pub struct CongruenceMenu {
    pub field: FieldConfig,
    pub entries: Vec<MenuEntry>,
}

impl CongruenceMenu {
    pub fn by_case(&self, case: Case) -> impl Iterator<Item = &MenuEntry> {
        self.entries.iter().filter(move |e| e.case == case)
    }

    pub fn contains(&self, case: Case, iso: &Isomorphism) -> bool {
        self.entries.iter().any(|e| e.case == case && e.iso == *iso)
    }

    pub fn specs(&self) -> Vec<ExampleSpec> {
        self.entries
            .iter()
            .map(|e| ExampleSpec { case: e.case, expected: e.iso, field: self.field.clone() })
            .collect()
    }
}

impl fmt::Display for CongruenceMenu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for case in Case::ALL {
            let items: Vec<String> = self.by_case(case).map(|e| e.iso.to_string()).collect();
            writeln!(f, "({case}) {}", items.join(", "))?;
        }
        Ok(())
    }
}

fn pm(q: u64, m: u64) -> Option<String> {
    if q % m == 1 % m {
        Some(format!("q = 1 mod {m}"))
    } else if (q + 1).is_multiple_of(m) {
        Some(format!("q = -1 mod {m}"))
    } else {
        None
    }
}

fn one_mod(q: u64, m: u64) -> Option<String> {
    (q % m == 1 % m).then(|| format!("q = 1 mod {m}"))
}

/// Why `C_n` is admissible, if it is.
fn cyclic_witness(cfg: &FieldConfig, n: u64) -> Option<String> {
    let q = cfg.q();
    let p = cfg.p as u64;
    pm(q, 2 * n)
        .or_else(|| if q.is_multiple_of(2) { pm(q, n).map(|w| format!("q even, {w}")) } else { None })
        .or_else(|| (cfg.is_qp() && n == p && (p == 2 || p == 3)).then(|| format!("K = Q_{p}, n = p")))
}

/// The entries of every case for the residue field of `cfg` (any extension is ignored).
/// Over fields other than `Q_p`, entries that would contain elements of order `p` are left
/// out: those fall outside the procedure's hypotheses.
pub fn congruence_menu(cfg: &FieldConfig) -> CongruenceMenu {
    let cfg = FieldConfig { ext: None, ..cfg.clone() };
    let q = cfg.q();
    let p = cfg.p as u64;
    let qp = cfg.is_qp();
    let order_p = |order: u64| !qp && order.is_multiple_of(p);
    let mut entries = Vec::new();
    let mut push = |case, iso, witness: String| entries.push(MenuEntry { case, iso, witness });
    let id = |tag| FiniteGroupId::new(tag);

    let cyclic: Vec<(u64, String)> = (2..=q + 1)
        .filter_map(|n| cyclic_witness(&cfg, n).map(|w| (n, w)))
        .filter(|(n, _)| !order_p(*n))
        .collect();

    // (a)
    for (n, w) in &cyclic {
        push(Case::A, Isomorphism::Finite(id(GroupTag::Cyclic(*n))), w.clone());
    }
    for n in 2..=q + 1 {
        let w = pm(q, 2 * n)
            .or_else(|| (qp && p == 2 && n == 3).then(|| "K = Q_2, n = 3".to_string()));
        if let Some(w) = w {
            if !order_p(2 * n) {
                push(Case::A, Isomorphism::Finite(id(GroupTag::Dihedral(n))), w);
            }
        }
    }
    let a4 = if p > 3 {
        Some(format!("p = {p} > 3"))
    } else {
        (qp && p == 3).then(|| "K = Q_3".to_string())
    };
    if let (Some(w), false) = (a4, order_p(12)) {
        push(Case::A, Isomorphism::Finite(id(GroupTag::A4)), w);
    }
    if let (Some(w), false) = (pm(q, 8), order_p(24)) {
        push(Case::A, Isomorphism::Finite(id(GroupTag::S4)), w);
    }
    if let (Some(w), false) = (pm(q, 10), order_p(60)) {
        push(Case::A, Isomorphism::Finite(id(GroupTag::A5)), w);
    }

    // (b)
    push(Case::B, Isomorphism::FreeRank2, "always".into());

    // (c), (d)
    for (i, (n, wn)) in cyclic.iter().enumerate() {
        for (m, wm) in &cyclic[i..] {
            push(Case::C, Isomorphism::FreeProduct(*n, *m), format!("{wn}; {wm}"));
        }
    }
    for (n, w) in &cyclic {
        push(Case::D, Isomorphism::CyclicFreeZ(*n), w.clone());
    }

    // (e)
    push(Case::E, Isomorphism::InfiniteCyclic, "always".into());
    for n in 2..=q {
        let w = one_mod(q, 2 * n)
            .or_else(|| if q.is_multiple_of(2) { one_mod(q, n).map(|w| format!("q even, {w}")) } else { None });
        if let (Some(w), false) = (w, order_p(n)) {
            push(Case::E, Isomorphism::Direct(n), w);
        }
    }

    // (f), (g)
    let mut dihedral_odd = Vec::new();
    if q % 4 == 1 {
        for m in (3..=q + 1).step_by(2) {
            if let Some(w) = pm(q, 2 * m) {
                if !order_p(2 * m) {
                    dihedral_odd.push((m, format!("q = 1 mod 4, {w}")));
                }
            }
        }
    }
    let a4_fg = one_mod(q, 6).filter(|_| !order_p(12));
    for (m, w) in &dihedral_odd {
        push(Case::F, Isomorphism::Hnn(id(GroupTag::Dihedral(*m))), w.clone());
    }
    if let Some(w) = &a4_fg {
        push(Case::F, Isomorphism::Hnn(id(GroupTag::A4)), w.clone());
    }
    for (m, w) in &dihedral_odd {
        let g0 = id(GroupTag::Dihedral(*m));
        push(Case::G, Isomorphism::Amalgam { g0, edge: 2 }, w.clone());
    }
    if let Some(w) = &a4_fg {
        push(Case::G, Isomorphism::Amalgam { g0: id(GroupTag::A4), edge: 3 }, w.clone());
    }
    if let (Some(w), false) = (one_mod(q, 8), order_p(24)) {
        push(Case::G, Isomorphism::Amalgam { g0: id(GroupTag::S4), edge: 4 }, w);
    }
    if !order_p(60) {
        if q % 30 == 1 || q % 30 == 19 {
            let w = format!("q = {} mod 30", q % 30);
            push(Case::G, Isomorphism::Amalgam { g0: id(GroupTag::A5), edge: 3 }, w);
        }
        if let Some(w) = one_mod(q, 10) {
            push(Case::G, Isomorphism::Amalgam { g0: id(GroupTag::A5), edge: 5 }, w);
        }
    }
    CongruenceMenu { field: cfg, entries }
}

/// A requested example: the case, the expected isomorphism type, and the base field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExampleSpec {
    pub case: Case,
    pub expected: Isomorphism,
    pub field: FieldConfig,
}

/// A realised example. `field` may carry a quadratic extension added for the parameters.
#[derive(Clone, Debug)]
pub struct Example {
    pub spec: ExampleSpec,
    pub field: Field,
    pub a: Mat2,
    pub b: Mat2,
    /// The chosen parameters (`t`, `s`, `lambda`, ...) rendered in the scalar grammar.
    pub params: Vec<(String, String)>,
}

/// `x + y sqrt(r)` over the base domain, before a carrier field is chosen.
#[derive(Clone, Debug)]
struct Pre {
    x: Base,
    y: Base,
    r: Option<Base>,
}

impl Pre {
    fn base(x: Base, zero: Base) -> Pre {
        Pre { x, y: zero, r: None }
    }
}

fn unrealizable(what: impl Into<String>) -> Error {
    Error::Unrealizable(what.into())
}

/// Builds the smallest field carrying all radicands, returning it with the values.
///
/// Even uniformiser powers are pulled out of each radicand; the remaining units must agree
/// up to squares, be split (nonzero square residue) and live in odd residue characteristic.
fn realize(cfg: &FieldConfig, pres: &[Pre]) -> Result<(Field, Vec<Scalar>)> {
    let base = Field::new(FieldConfig { ext: None, ..cfg.clone() })?;
    enum Root {
        None,
        Exact(Base),
        Multiple(Base),
    }
    let mut carrier: Option<Base> = None;
    let mut roots = Vec::new();
    for pre in pres {
        let Some(r) = &pre.r else {
            roots.push(Root::None);
            continue;
        };
        let v = base.base_val(r).ok_or_else(|| unrealizable("zero radicand"))?;
        if v % 2 != 0 {
            return Err(unrealizable("ramified radicand"));
        }
        let unit = base.base_mul(r, &base.base_pi_pow(-v));
        let c = base.base_pi_pow(v / 2);
        if let Some(e) = base.base_sqrt_exact(&unit) {
            roots.push(Root::Exact(base.base_mul(&c, &e)));
            continue;
        }
        match &carrier {
            None => {
                carrier = Some(unit);
                roots.push(Root::Multiple(c));
            }
            Some(d) => {
                let ratio = base.base_mul(&unit, &base.base_inv(d)?);
                let g = base
                    .base_sqrt_exact(&ratio)
                    .ok_or_else(|| unrealizable("parameters need two independent square roots"))?;
                roots.push(Root::Multiple(base.base_mul(&c, &g)));
            }
        }
    }
    let field = match carrier {
        None => base.clone(),
        Some(d) => {
            if cfg.p == 2 {
                return Err(unrealizable("quadratic parameters over a field of residue characteristic 2"));
            }
            let res = base.base_residue(&d)?;
            let root = *base
                .residue_field()
                .sqrts(res)
                .first()
                .ok_or_else(|| unrealizable("non-split discriminant"))?;
            Field::new(FieldConfig { ext: None, ..cfg.clone() }.with_ext(d, root))?
        }
    };
    let values = pres
        .iter()
        .zip(roots)
        .map(|(pre, root)| {
            let x = field.from_base(pre.x.clone());
            let y = field.from_base(pre.y.clone());
            let sq = match root {
                Root::None => return x,
                Root::Exact(e) => field.from_base(e),
                Root::Multiple(c) => field.mul(&field.from_base(c), &field.sqrt_d().unwrap()),
            };
            field.add(&x, &field.mul(&y, &sq))
        })
        .collect();
    Ok((field, values))
}

// ---- residue-field searches (F_q((t)) parameters) -------------------------------------

/// Multiplicative order of `[[0, -1], [1, t]]` in `SL_2(F_q)`.
fn sl_order(k: &ResidueField, t: u32) -> Option<u64> {
    let m = [0, k.neg(1), 1, t];
    let mul = |x: [u32; 4], y: [u32; 4]| {
        [
            k.add(k.mul(x[0], y[0]), k.mul(x[1], y[2])),
            k.add(k.mul(x[0], y[1]), k.mul(x[1], y[3])),
            k.add(k.mul(x[2], y[0]), k.mul(x[3], y[2])),
            k.add(k.mul(x[2], y[1]), k.mul(x[3], y[3])),
        ]
    };
    let mut acc = m;
    for n in 1..=2 * (k.q() as u64 + 1) {
        if acc == [1, 0, 0, 1] {
            return Some(n);
        }
        acc = mul(acc, m);
    }
    None
}

fn psl_of_sl(q: u64, n: u64) -> u64 {
    if q % 2 == 1 && n.is_multiple_of(2) {
        n / 2
    } else {
        n
    }
}

/// Smallest residue code `t` with `[[0, -1], [1, t]]` of exact `SL_2` order `n`.
fn trace_with_sl_order(k: &ResidueField, n: u64) -> Option<u32> {
    k.elements().find(|&t| sl_order(k, t) == Some(n))
}

fn trace_with_psl_order(k: &ResidueField, n: u64) -> Option<u32> {
    let q = k.q() as u64;
    k.elements().find(|&t| sl_order(k, t).map(|o| psl_of_sl(q, o)) == Some(n))
}

// ---- trace parameters ------------------------------------------------------------------

/// A trace giving `PSL_2` order `n`: `zeta + zeta^-1` for a primitive `2n`-th root.
fn cyclic_trace(base: &Field, n: u64) -> Result<Pre> {
    let zero = base.base_zero();
    if base.kind() == FieldKind::Laurent {
        let t = trace_with_psl_order(base.residue_field(), n)
            .ok_or_else(|| unrealizable(format!("no element of order {n} over F_{}", base.q())))?;
        return Ok(Pre::base(base.base_digit(t), zero));
    }
    let half = base.base_inv(&base.base_int(2))?;
    Ok(match n {
        2 => Pre::base(zero, base.base_zero()),
        3 => Pre::base(base.base_int(-1), zero),
        4 => Pre { x: zero, y: base.base_int(1), r: Some(base.base_int(2)) },
        5 => Pre { x: half.clone(), y: half, r: Some(base.base_int(5)) },
        6 => Pre { x: zero, y: base.base_int(1), r: Some(base.base_int(3)) },
        _ => return Err(unrealizable(format!("order {n} needs a trace of degree > 2 over Q"))),
    })
}

fn comp(k: &Field, t: &Scalar) -> Mat2 {
    Mat2::companion(k, t)
}

fn fmt_params(k: &Field, items: &[(&str, &Scalar)]) -> Vec<(String, String)> {
    items.iter().map(|(n, v)| (n.to_string(), k.format_scalar(v))).collect()
}

fn check_det(k: &Field, m: &Mat2) -> Result<()> {
    if m.det(k) == k.one() {
        Ok(())
    } else {
        Err(Error::DeterminantNotOne)
    }
}

/// `X = [[0, -1], [1, t_X]]` and an involution `Y` with `tr(XY) = tau` generating `expected`.
fn triangle(cfg: &FieldConfig, tx: u64, tau: u64, expected: FiniteGroupId) -> Result<Example> {
    let base = Field::new(cfg.clone())?;
    let found = |field: Field, x: Mat2, y: Mat2| -> Result<Option<Example>> {
        let c = groupkit::closure_with_cap(&field, &[x.clone(), y.clone()], groupkit::default_cap(&field));
        if !c.is_finite() || groupkit::identify_finite_group(&field, &c.elements)? != expected {
            return Ok(None);
        }
        let params = fmt_params(&field, &[("tr(X)", &x.trace(&field)), ("tr(XY)", &x.mul(&field, &y).trace(&field))]);
        let spec = ExampleSpec {
            case: Case::A,
            expected: Isomorphism::Finite(expected),
            field: cfg.clone(),
        };
        Ok(Some(Example { spec, field, a: x, b: y, params }))
    };
    if base.kind() == FieldKind::Laurent {
        let k = base.residue_field();
        let (t, s) = (
            trace_with_psl_order(k, tx).ok_or_else(|| unrealizable("no trace"))?,
            trace_with_psl_order(k, tau).ok_or_else(|| unrealizable("no trace"))?,
        );
        for beta in k.elements() {
            for alpha in k.elements() {
                let gamma = k.sub(k.sub(beta, k.mul(t, alpha)), s);
                if k.sub(k.neg(k.mul(alpha, alpha)), k.mul(beta, gamma)) != 1 {
                    continue;
                }
                let c = |v: u32| base.from_base(base.base_digit(v));
                let x = comp(&base, &c(t));
                let y = Mat2 { a: c(alpha), b: c(beta), c: c(gamma), d: c(k.neg(alpha)) };
                if let Some(ex) = found(base.clone(), x, y)? {
                    return Ok(ex);
                }
            }
        }
        return Err(unrealizable(format!("no generating pair for {expected}")));
    }
    let t = cyclic_trace(&base, tx)?;
    let s = cyclic_trace(&base, tau)?;
    if t.r.is_some() || s.r.is_some() {
        return Err(unrealizable(format!("{expected} needs nested square roots over Q")));
    }
    let (t, s) = (t.x, s.x);
    let four = base.base_int(4);
    for b in (0..=40i64).map(|i| if i % 2 == 0 { i / 2 } else { -(i + 1) / 2 }) {
        let beta = base.base_int(b);
        // 4 alpha^2 - 4 t beta alpha + 4 (beta^2 - tau beta + 1) = 0
        let disc = base.base_sub(
            &base.base_add(
                &base.base_mul(&base.base_sub(&base.base_mul(&t, &t), &four), &base.base_mul(&beta, &beta)),
                &base.base_mul(&four, &base.base_mul(&s, &beta)),
            ),
            &four,
        );
        if base.base_is_zero(&disc) {
            continue;
        }
        let half = base.base_inv(&base.base_int(2))?;
        let alpha = Pre { x: base.base_mul(&half, &base.base_mul(&t, &beta)), y: half, r: Some(disc) };
        let Ok((field, vals)) = realize(cfg, &[alpha]) else {
            continue;
        };
        let k = &field;
        let alpha = &vals[0];
        let (tf, sf, bf) = (k.from_base(t.clone()), k.from_base(s.clone()), k.from_base(beta));
        let gamma = k.sub(&k.sub(&bf, &k.mul(&tf, alpha)), &sf);
        let y = Mat2 { a: alpha.clone(), b: bf, c: gamma, d: k.neg(alpha) };
        check_det(k, &y)?;
        if let Some(ex) = found(field.clone(), comp(k, &tf), y)? {
            return Ok(ex);
        }
    }
    Err(unrealizable(format!("no split discriminant found for {expected}")))
}

fn finite_example(cfg: &FieldConfig, id: FiniteGroupId) -> Result<Example> {
    match id.tag {
        GroupTag::Cyclic(n) => {
            let base = Field::new(cfg.clone())?;
            let (field, vals) = realize(cfg, &[cyclic_trace(&base, n)?])?;
            let x = comp(&field, &vals[0]);
            let params = fmt_params(&field, &[("t", &vals[0])]);
            let spec = ExampleSpec { case: Case::A, expected: Isomorphism::Finite(id), field: cfg.clone() };
            Ok(Example { spec, a: x.clone(), b: x.pow(&field, 2), field, params })
        }
        GroupTag::Dihedral(n) => triangle(cfg, 2, n, id),
        GroupTag::A4 => triangle(cfg, 3, 3, id),
        GroupTag::S4 => triangle(cfg, 4, 3, id),
        GroupTag::A5 => triangle(cfg, 5, 3, id),
    }
}

/// `s` for the (f)/(g) template: the trace of `ABAB^-1`.
fn fg_parameters(base: &Field, g0: &FiniteGroupId, case: Case, edge: u64) -> Result<(Base, Base)> {
    let zero = base.base_zero();
    let one = base.base_int(1);
    if base.kind() == FieldKind::Padic {
        return match (g0.tag, case) {
            (GroupTag::Dihedral(3), Case::F) => Ok((zero, one)),
            (GroupTag::Dihedral(3), Case::G) => Ok((zero, base.base_int(-1))),
            (GroupTag::A4, Case::F) => Ok((one.clone(), one)),
            (GroupTag::A4, Case::G) => Ok((one, zero)),
            _ => Err(unrealizable(format!("{g0} template needs irrational t or s over Q"))),
        };
    }
    let k = base.residue_field();
    let digit = |n: u64| -> Result<Base> {
        trace_with_sl_order(k, n)
            .map(|c| base.base_digit(c))
            .ok_or_else(|| unrealizable(format!("no SL_2 element of order {n} over F_{}", k.q())))
    };
    match (g0.tag, case) {
        (GroupTag::Dihedral(m), Case::F) => Ok((zero, digit(2 * m)?)),
        (GroupTag::Dihedral(m), Case::G) => Ok((zero, digit(m)?)),
        (GroupTag::A4, Case::F) => Ok((one.clone(), one)),
        (GroupTag::A4, Case::G) => Ok((one, zero)),
        (GroupTag::S4, Case::G) => Ok((digit(8)?, one)),
        (GroupTag::A5, Case::G) if edge == 5 => Ok((digit(10)?, one)),
        (GroupTag::A5, Case::G) => Ok((one, digit(10)?)),
        _ => Err(Error::Unavailable(format!("no ({case}) template for {g0}"))),
    }
}

/// `A = [[a, 1], [a(t-a) - 1, t - a]]`, `B = diag(pi, pi^-1)` with `tr A = t` and
/// `tr(ABAB^-1) = s`, solving `(a^2 - a t + 1)(2 - pi^2 - pi^-2) + t^2 - 2 = s` for `a`.
fn fg_example(spec: &ExampleSpec, g0: FiniteGroupId, edge: u64) -> Result<Example> {
    let cfg = &spec.field;
    let base = Field::new(cfg.clone())?;
    let (t, s) = fg_parameters(&base, &g0, spec.case, edge)?;
    let k = &base;
    let pi2 = k.base_pi_pow(2);
    let pim2 = k.base_pi_pow(-2);
    let two = k.base_int(2);
    let denom = k.base_sub(&k.base_sub(&two, &pi2), &pim2);
    let t2 = k.base_mul(&t, &t);
    let numer = k.base_add(&k.base_sub(&s, &t2), &two);
    let r = k.base_mul(&numer, &k.base_inv(&denom)?);
    let quarter = k.base_inv(&k.base_int(4))?;
    let d = k.base_add(&k.base_sub(&k.base_mul(&t2, &quarter), &k.base_int(1)), &r);
    let half = k.base_inv(&two)?;
    let a = Pre { x: k.base_mul(&t, &half), y: k.base_int(1), r: Some(d) };
    let (field, vals) = realize(cfg, &[a])?;
    let f = &field;
    let a = &vals[0];
    let tf = f.from_base(t);
    let tma = f.sub(&tf, a);
    let am = Mat2 { a: a.clone(), b: f.one(), c: f.sub(&f.mul(a, &tma), &f.one()), d: tma };
    let bm = Mat2::diag(f, &f.pi_pow(1))?;
    check_det(f, &am)?;
    let sf = f.from_base(s);
    let params = fmt_params(f, &[("t", &tf), ("s", &sf), ("a", a)]);
    Ok(Example { spec: spec.clone(), field, a: am, b: bm, params })
}

/// A constant `lambda` of order `2n` (`n` for even `q`), so `diag(lambda, lambda^-1)` has
/// order `n` in `PSL_2`.
fn lambda(base: &Field, n: u64) -> Result<Pre> {
    let zero = base.base_zero();
    if n == 1 {
        return Ok(Pre::base(base.base_int(1), zero));
    }
    if base.kind() == FieldKind::Laurent {
        let k = base.residue_field();
        let want = if k.q().is_multiple_of(2) { n } else { 2 * n };
        let l = k
            .elements()
            .find(|&x| k.mult_order(x) == Some(want))
            .ok_or_else(|| unrealizable(format!("no root of unity of order {want}")))?;
        return Ok(Pre::base(base.base_digit(l), zero));
    }
    let half = base.base_inv(&base.base_int(2))?;
    match n {
        2 => Ok(Pre { x: zero, y: base.base_int(1), r: Some(base.base_int(-1)) }),
        3 => Ok(Pre { x: half.clone(), y: half, r: Some(base.base_int(-3)) }),
        _ => Err(unrealizable(format!("a primitive {}-th root of unity has degree > 2 over Q", 2 * n))),
    }
}

/// Builds the generator pair for `spec`.
pub fn make_example(spec: &ExampleSpec) -> Result<Example> {
    let cfg = FieldConfig { ext: None, ..spec.field.clone() };
    let spec = &ExampleSpec { field: cfg.clone(), ..spec.clone() };
    if !congruence_menu(&cfg).contains(spec.case, &spec.expected) {
        return Err(Error::Unavailable(format!(
            "case ({}) {} does not occur for {}",
            spec.case,
            spec.expected,
            cfg.label()
        )));
    }
    let base = Field::new(cfg.clone())?;
    let done = |field: Field, a: Mat2, b: Mat2, params| {
        Ok(Example { spec: spec.clone(), field, a, b, params })
    };
    match (spec.case, spec.expected) {
        (Case::A, Isomorphism::Finite(id)) => {
            let ex = finite_example(&cfg, id)?;
            Ok(Example { spec: spec.clone(), ..ex })
        }
        (Case::B, Isomorphism::FreeRank2) => {
            let k = &base;
            let a = Mat2::diag(k, &k.pi_pow(1))?;
            let pinv = k.pi_pow(-1);
            let c = Mat2 {
                a: k.one(),
                b: k.neg(&k.mul(&k.add(&k.one(), &k.pi_pow(1)), &pinv)),
                c: k.one(),
                d: k.neg(&pinv),
            };
            check_det(k, &c)?;
            let b = a.conjugate_by(k, &c);
            done(base.clone(), a, b, vec![])
        }
        (Case::C, Isomorphism::FreeProduct(n, m)) => {
            let (field, v) = realize(&cfg, &[cyclic_trace(&base, n)?, cyclic_trace(&base, m)?])?;
            let k = &field;
            let a = comp(k, &v[0]);
            let b = Mat2 { a: k.zero(), b: k.neg(&k.pi_pow(-1)), c: k.pi_pow(1), d: v[1].clone() };
            let params = fmt_params(k, &[("t", &v[0]), ("s", &v[1])]);
            done(field, a, b, params)
        }
        (Case::D, Isomorphism::CyclicFreeZ(n)) => {
            let (field, v) = realize(&cfg, &[cyclic_trace(&base, n)?])?;
            let k = &field;
            let a = Mat2 { a: k.zero(), b: k.pi_pow(2), c: k.neg(&k.pi_pow(-2)), d: v[0].clone() };
            let b = Mat2 {
                a: k.pi_pow(2),
                b: k.sub(&k.pi_pow(1), &k.one()),
                c: k.one(),
                d: k.pi_pow(-1),
            };
            let params = fmt_params(k, &[("t", &v[0])]);
            done(field, a, b, params)
        }
        (Case::E, iso @ (Isomorphism::InfiniteCyclic | Isomorphism::Direct(_))) => {
            let n = if let Isomorphism::Direct(n) = iso { n } else { 1 };
            let (field, v) = realize(&cfg, &[lambda(&base, n)?])?;
            let k = &field;
            let a = Mat2::diag(k, &v[0])?;
            let b = Mat2::diag(k, &k.pi_pow(-1))?;
            let params = fmt_params(k, &[("lambda", &v[0])]);
            done(field, a, b, params)
        }
        (Case::F, Isomorphism::Hnn(g0)) => fg_example(spec, g0, 0),
        (Case::G, Isomorphism::Amalgam { g0, edge }) => fg_example(spec, g0, edge),
        (case, iso) => Err(Error::Unavailable(format!("case ({case}) cannot be {iso}"))),
    }
}

/// Every menu entry for `cfg` with its realisation attempt.
pub fn menu_examples(cfg: &FieldConfig) -> Vec<(ExampleSpec, Result<Example>)> {
    congruence_menu(cfg).specs().into_iter().map(|s| {
        let ex = make_example(&s);
        (s, ex)
    }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(menu: &CongruenceMenu, case: Case) -> Vec<String> {
        menu.by_case(case).map(|e| e.iso.to_string()).collect()
    }

    #[test]
    fn menu_q5() {
        let m = congruence_menu(&FieldConfig::padic(5));
        assert_eq!(names(&m, Case::A), ["C2", "C3", "D2", "D3", "A4"]);
        assert_eq!(names(&m, Case::F), ["HNN(D3)"]);
        assert_eq!(names(&m, Case::G), ["D3 *_C2 D2"]);
        assert_eq!(names(&m, Case::E), ["Z", "C2 x Z"]);
    }

    #[test]
    fn menu_q7_and_q2() {
        let m = congruence_menu(&FieldConfig::padic(7));
        assert!(names(&m, Case::A).contains(&"S4".to_string()));
        assert!(names(&m, Case::F).contains(&"HNN(A4)".to_string()));
        let m2 = congruence_menu(&FieldConfig::padic(2));
        assert_eq!(names(&m2, Case::A), ["C2", "C3", "D3"]);
    }

    #[test]
    fn menu_laurent_q9_drops_order_three() {
        let m = congruence_menu(&FieldConfig::laurent(3, 2));
        assert_eq!(names(&m, Case::A), ["C2", "C4", "C5", "D2", "D4", "D5"]);
        assert_eq!(names(&m, Case::F), ["HNN(D5)"]);
        assert_eq!(names(&m, Case::G), ["D5 *_C2 D2"]);
    }

    #[test]
    fn case_g_over_q5_uses_the_expected_radicand() {
        let spec = ExampleSpec {
            case: Case::G,
            expected: "D3 *_C2 D2".parse().unwrap(),
            field: FieldConfig::padic(5),
        };
        let ex = make_example(&spec).unwrap();
        let ext = ex.field.ext().unwrap();
        assert_eq!(ex.field.format_base(&ext.d), "-601/576");
        assert_eq!(ext.chosen_root_residue, 2);
    }

    #[test]
    fn unrealizable_is_reported() {
        let spec = ExampleSpec {
            case: Case::A,
            expected: "S4".parse().unwrap(),
            field: FieldConfig::padic(7),
        };
        assert!(matches!(make_example(&spec), Err(Error::Unrealizable(_))));
        let spec = ExampleSpec {
            case: Case::A,
            expected: "A5".parse().unwrap(),
            field: FieldConfig::padic(5),
        };
        assert!(matches!(make_example(&spec), Err(Error::Unavailable(_))));
    }
}
