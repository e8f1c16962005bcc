//! The fourteen-step discreteness decision procedure for `G = <A, B>`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::groupkit::{self, FiniteGroupId, GroupTag};
use crate::localfield::{Field, FieldKind};
use crate::psl2::{self, Mat2, Order};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Case {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Case {
    pub const ALL: [Case; 7] = [Case::A, Case::B, Case::C, Case::D, Case::E, Case::F, Case::G];

    pub fn letter(self) -> char {
        (b'a' + self as u8) as char
    }

    pub fn from_letter(c: char) -> Option<Case> {
        Case::ALL.into_iter().find(|x| x.letter() == c)
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Isomorphism {
    Finite(FiniteGroupId),
    FreeRank2,
    /// `C_n * C_m` with `n <= m`.
    FreeProduct(u64, u64),
    /// `C_n * Z`.
    CyclicFreeZ(u64),
    InfiniteCyclic,
    /// `C_n x Z`.
    Direct(u64),
    Hnn(FiniteGroupId),
    /// `G_0 *_{C_m} D_m`.
    Amalgam { g0: FiniteGroupId, edge: u64 },
}

impl fmt::Display for Isomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Isomorphism::Finite(id) => write!(f, "{id}"),
            Isomorphism::FreeRank2 => f.write_str("F2"),
            Isomorphism::FreeProduct(n, m) => write!(f, "C{n} * C{m}"),
            Isomorphism::CyclicFreeZ(n) => write!(f, "C{n} * Z"),
            Isomorphism::InfiniteCyclic => f.write_str("Z"),
            Isomorphism::Direct(n) => write!(f, "C{n} x Z"),
            Isomorphism::Hnn(id) => write!(f, "HNN({id})"),
            Isomorphism::Amalgam { g0, edge } => write!(f, "{g0} *_C{edge} D{edge}"),
        }
    }
}

impl FromStr for Isomorphism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Document(format!("unknown isomorphism type '{s}'"));
        let cyc = |t: &str| -> Result<u64> {
            t.strip_prefix('C').and_then(|n| n.parse().ok()).ok_or_else(bad)
        };
        let s = s.trim();
        if s == "F2" {
            return Ok(Isomorphism::FreeRank2);
        }
        if s == "Z" {
            return Ok(Isomorphism::InfiniteCyclic);
        }
        if let Some(inner) = s.strip_prefix("HNN(").and_then(|r| r.strip_suffix(')')) {
            return FiniteGroupId::parse(inner).map(Isomorphism::Hnn).ok_or_else(bad);
        }
        if let Some((g0, rest)) = s.split_once(" *_") {
            let (edge, d) = rest.split_once(' ').ok_or_else(bad)?;
            let edge = cyc(edge)?;
            if d != format!("D{edge}") {
                return Err(bad());
            }
            let g0 = FiniteGroupId::parse(g0).ok_or_else(bad)?;
            return Ok(Isomorphism::Amalgam { g0, edge });
        }
        if let Some((l, r)) = s.split_once(" * ") {
            return if r == "Z" {
                Ok(Isomorphism::CyclicFreeZ(cyc(l)?))
            } else {
                Ok(Isomorphism::FreeProduct(cyc(l)?, cyc(r)?))
            };
        }
        if let Some(l) = s.strip_suffix(" x Z") {
            return Ok(Isomorphism::Direct(cyc(l)?));
        }
        FiniteGroupId::parse(s).map(Isomorphism::Finite).ok_or_else(bad)
    }
}

/// One line of the step trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub step: u8,
    pub decision: String,
    /// Named quantities, already rendered (`l(X)`, traces, orders, ...).
    pub scalars: Vec<(String, String)>,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub discrete: bool,
    pub case: Option<Case>,
    pub isomorphism: Option<Isomorphism>,
    pub reduced_pair: (Mat2, Mat2),
    pub step_trace: Vec<Step>,
    pub caveats: Vec<String>,
}

impl Verdict {
    /// `true:case (x)` or `false`.
    pub fn verdict_string(&self) -> String {
        match self.case {
            Some(c) => format!("true:case ({c})"),
            None => "false".into(),
        }
    }

    /// The step at which the procedure returned.
    pub fn final_step(&self) -> u8 {
        self.step_trace.last().map(|s| s.step).unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DecideOptions {
    /// Closure cap; `None` uses [`groupkit::default_cap`].
    pub cap: Option<usize>,
}

pub const NO_ORDER_P_CAVEAT: &str = "non-Q_p field: no-order-p hypothesis assumed";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionExit {
    /// `m > l(Y) - l(X)`.
    LengthGap,
    /// `l(X) = 0`.
    Elliptic,
}

/// Steps 2 to 4: shorten `(X, Y)` until `l(X) = 0` or no product shortens `Y`.
pub fn reduce_hyperbolic_pair(
    k: &Field,
    a: &Mat2,
    b: &Mat2,
) -> (Mat2, Mat2, ReductionExit) {
    let mut trace = Vec::new();
    let (x, y, exit) = reduce_traced(k, a.clone(), b.clone(), &mut trace);
    (x, y, exit)
}

fn lstr(n: u64) -> String {
    n.to_string()
}

fn reduce_traced(
    k: &Field,
    mut x: Mat2,
    mut y: Mat2,
    trace: &mut Vec<Step>,
) -> (Mat2, Mat2, ReductionExit) {
    let l = |m: &Mat2| psl2::translation_length(k, m);
    loop {
        let (lx, ly) = (l(&x), l(&y));
        if lx > ly {
            std::mem::swap(&mut x, &mut y);
            trace.push(Step {
                step: 3,
                decision: "swap X and Y".into(),
                scalars: vec![("l(X)".into(), lstr(ly)), ("l(Y)".into(), lstr(lx))],
            });
        } else {
            trace.push(Step {
                step: 3,
                decision: "keep order".into(),
                scalars: vec![("l(X)".into(), lstr(lx)), ("l(Y)".into(), lstr(ly))],
            });
        }
        let (lx, ly) = (l(&x), l(&y));
        if lx == 0 {
            return (x, y, ReductionExit::Elliptic);
        }
        let xy = x.mul(k, &y);
        let xiy = x.inv(k).mul(k, &y);
        let (lp, lm) = (l(&xy), l(&xiy));
        let m = lp.min(lm);
        let scalars = vec![
            ("l(XY)".into(), lstr(lp)),
            ("l(X^-1Y)".into(), lstr(lm)),
            ("m".into(), lstr(m)),
            ("l(Y)-l(X)".into(), lstr(ly - lx)),
        ];
        if m <= ly - lx {
            let (next, name) = if lp == m { (xy, "XY") } else { (xiy, "X^-1Y") };
            trace.push(Step { step: 4, decision: format!("(i) replace Y by {name}"), scalars });
            y = next.canonical(k);
        } else {
            trace.push(Step { step: 4, decision: "(ii) return true:case (b)".into(), scalars });
            return (x, y, ReductionExit::LengthGap);
        }
    }
}

struct Run<'a> {
    k: &'a Field,
    trace: Vec<Step>,
    laurent: bool,
}

impl Run<'_> {
    fn push(&mut self, step: u8, decision: impl Into<String>, scalars: Vec<(&str, String)>) {
        let scalars = scalars.into_iter().map(|(a, b)| (a.to_string(), b)).collect();
        self.trace.push(Step { step, decision: decision.into(), scalars });
    }

    fn check_order(&self, what: &str, n: u64) -> Result<()> {
        if self.laurent && n.is_multiple_of(self.k.p() as u64) {
            return Err(Error::ContractViolation(format!(
                "{what} has order divisible by p = {} over {}",
                self.k.p(),
                self.k.config().label()
            )));
        }
        Ok(())
    }

    fn tr(&self, m: &Mat2) -> String {
        self.k.format_scalar(&m.trace(self.k))
    }
}

/// Runs the procedure. Over `F_q((t))` the caller asserts that `G` has no elements of
/// order `p`; any detected one is reported as [`Error::ContractViolation`].
pub fn decide(k: &Field, a: &Mat2, b: &Mat2, opts: &DecideOptions) -> Result<Verdict> {
    let cap = opts.cap.unwrap_or_else(|| groupkit::default_cap(k));
    let laurent = k.kind() == FieldKind::Laurent;
    let mut run = Run { k, trace: Vec::new(), laurent };
    let caveats = if laurent { vec![NO_ORDER_P_CAVEAT.to_string()] } else { Vec::new() };
    let l = |m: &Mat2| psl2::translation_length(k, m);
    let done = |run: Run, case: Option<Case>, iso: Option<Isomorphism>, x: Mat2, y: Mat2| {
        Ok(Verdict {
            discrete: case.is_some(),
            case,
            isomorphism: iso,
            reduced_pair: (x, y),
            step_trace: run.trace,
            caveats: caveats.clone(),
        })
    };

    // (1)
    let g = groupkit::closure_with_cap(k, &[a.clone(), b.clone()], cap);
    if let Some(order) = g.order() {
        run.check_order("G", order as u64)?;
        let id = groupkit::identify_finite_group(k, &g.elements)?;
        run.push(1, "G finite: return true:case (a)", vec![("|G|", order.to_string())]);
        return done(run, Some(Case::A), Some(Isomorphism::Finite(id)), a.clone(), b.clone());
    }
    run.push(1, "G infinite", vec![("cap", cap.to_string())]);

    // (2) - (4)
    run.push(2, "set X = A, Y = B", vec![]);
    let (x, mut y, exit) = reduce_traced(k, a.clone(), b.clone(), &mut run.trace);
    if exit == ReductionExit::LengthGap {
        return done(run, Some(Case::B), Some(Isomorphism::FreeRank2), x, y);
    }

    // (5)
    let n = match psl2::element_order(k, &x) {
        Order::Infinite => {
            run.push(5, "X elliptic of infinite order: return false", vec![("tr(X)", run.tr(&x))]);
            return done(run, None, None, x, y);
        }
        Order::Finite(n) => n,
    };
    run.check_order("X", n)?;
    run.push(5, "X has finite order", vec![("n", n.to_string())]);

    // (6)
    let ly = l(&y);
    let best = (1..n).map(|i| (l(&x.pow(k, i as i64).mul(k, &y)), i)).min();
    match best {
        Some((li, i)) if li < ly => {
            y = x.pow(k, i as i64).mul(k, &y).canonical(k);
            run.push(6, format!("replace Y by X^{i}Y"), vec![("i", i.to_string()), ("l(Y)", lstr(li))]);
        }
        _ => run.push(6, "Y unchanged", vec![("l(Y)", lstr(ly))]),
    }

    // (7)
    if l(&y) == 0 {
        let oy = psl2::element_order(k, &y);
        let lxy = l(&x.mul(k, &y));
        let scalars = vec![("ord(Y)", oy.to_string()), ("l(XY)", lstr(lxy))];
        if let Order::Finite(m) = oy {
            run.check_order("Y", m)?;
            if lxy > 0 {
                run.push(7, "return true:case (c)", scalars);
                let iso = Isomorphism::FreeProduct(n.min(m), n.max(m));
                return done(run, Some(Case::C), Some(iso), x, y);
            }
        }
        run.push(7, "return false", scalars);
        return done(run, None, None, x, y);
    }
    run.push(7, "Y hyperbolic", vec![("l(Y)", lstr(l(&y)))]);

    // (8)
    let comm = x.commutator(k, &y);
    let lc = l(&comm);
    if lc > 0 {
        run.push(8, "return true:case (d)", vec![("l([X,Y])", lstr(lc))]);
        return done(run, Some(Case::D), Some(Isomorphism::CyclicFreeZ(n)), x, y);
    }
    run.push(8, "[X,Y] elliptic", vec![("tr([X,Y])", run.tr(&comm))]);

    // (9)
    let oc = psl2::element_order(k, &comm);
    match oc {
        Order::Infinite => {
            run.push(9, "[X,Y] of infinite order: return false", vec![("tr([X,Y])", run.tr(&comm))]);
            return done(run, None, None, x, y);
        }
        Order::Finite(c) => {
            run.check_order("[X,Y]", c)?;
            run.push(9, "[X,Y] has finite order", vec![("ord([X,Y])", c.to_string())]);
        }
    }

    // (10)
    if comm.is_identity(k) {
        run.push(10, "[X,Y] trivial: return true:case (e)", vec![("n", n.to_string())]);
        let iso = if n == 1 { Isomorphism::InfiniteCyclic } else { Isomorphism::Direct(n) };
        return done(run, Some(Case::E), Some(iso), x, y);
    }
    run.push(10, "[X,Y] nontrivial", vec![]);

    // (11)
    let y2 = y.mul(k, &y);
    let lc2 = l(&x.commutator(k, &y2));
    if lc2 == 0 {
        run.push(11, "l([X,Y^2]) = 0: return false", vec![("l([X,Y^2])", lstr(lc2))]);
        return done(run, None, None, x, y);
    }
    run.push(11, "l([X,Y^2]) > 0", vec![("l([X,Y^2])", lstr(lc2))]);

    // (12)
    let conj = y.mul(k, &x).mul(k, &y.inv(k));
    let g0 = groupkit::closure_with_cap(k, &[x.clone(), conj], cap);
    let Some(order0) = g0.order() else {
        run.push(12, "G0 infinite: return false", vec![("cap", cap.to_string())]);
        return done(run, None, None, x, y);
    };
    run.check_order("G0", order0 as u64)?;
    let id0 = groupkit::identify_finite_group(k, &g0.elements)?;
    run.push(12, "G0 finite", vec![("G0", id0.to_string()), ("|G0|", order0.to_string())]);

    // (13)
    match groupkit::find_double_involution(k, &g0.elements, &y) {
        None => {
            run.push(13, "no g with g, gY involutions: return true:case (f)", vec![]);
            done(run, Some(Case::F), Some(Isomorphism::Hnn(id0)), x, y)
        }
        Some(g) => {
            let gs = g.format(k);
            run.push(13, "found g with g, gY involutions", vec![("g", gs)]);
            // (14)
            run.push(14, "return true:case (g)", vec![("edge", format!("C{n}"))]);
            let iso = Isomorphism::Amalgam { g0: id0, edge: n };
            done(run, Some(Case::G), Some(iso), x, y)
        }
    }
}

/// Decides many pairs over the same field.
pub fn decide_batch(
    k: &Field,
    pairs: &[(Mat2, Mat2)],
    opts: &DecideOptions,
    exec: Exec,
) -> Vec<Result<Verdict>> {
    exec.map(pairs, |(a, b)| decide(k, a, b, opts))
}

/// The amalgam pairings the classification allows in case (g).
pub fn amalgam_allowed(g0: &FiniteGroupId, edge: u64) -> bool {
    match g0.tag {
        GroupTag::Dihedral(m) => m % 2 == 1 && edge == 2,
        GroupTag::A4 => edge == 3,
        GroupTag::S4 => edge == 4,
        GroupTag::A5 => edge == 3 || edge == 5,
        GroupTag::Cyclic(_) => false,
    }
}
