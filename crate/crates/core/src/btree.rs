//! The Bruhat-Tits tree `T_q`: vertices as homothety classes of lattices, the `PSL_2`
//! action, and brute-force probes over balls.
//!
//! A vertex is stored in Hermite form `[[pi^m, u], [0, 1]]` (columns span the lattice),
//! with `u` kept as its uniformiser digits below position `m`. The children of `(m, u)`
//! are `(m + 1, u + r pi^m)` for the `q` digit representatives `r`; its parent is
//! `(m - 1, u mod pi^(m-1))`.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::localfield::{Field, FieldKind, Scalar};
use crate::psl2::{self, Mat2, Order, Tag};

/// Default largest probe radius.
pub const DEFAULT_MAX_RADIUS: u32 = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeVertex {
    m: i64,
    lo: i64,
    digits: Vec<u32>,
}

impl TreeVertex {
    /// The class of the standard lattice.
    pub fn base() -> Self {
        TreeVertex { m: 0, lo: 0, digits: Vec::new() }
    }

    fn normalized(m: i64, lo: i64, mut digits: Vec<u32>) -> Self {
        let keep = (m - lo).clamp(0, digits.len() as i64) as usize;
        digits.truncate(keep);
        while digits.last() == Some(&0) {
            digits.pop();
        }
        let lead = digits.iter().take_while(|&&d| d == 0).count();
        if lead == digits.len() {
            return TreeVertex { m, lo: 0, digits: Vec::new() };
        }
        digits.drain(..lead);
        TreeVertex { m, lo: lo + lead as i64, digits }
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    /// The class of the lattice spanned by the columns of `n` (any invertible matrix).
    pub fn from_matrix(k: &Field, n: &Mat2) -> Result<Self> {
        let det = n.det(k);
        let vdet = k.valuation(&det).ok_or(Error::DivisionByZero)?;
        let (v1, v2) = (k.valuation(&n.c), k.valuation(&n.d));
        // pivot on the column whose bottom entry has the smaller valuation
        let use_first = match (v1, v2) {
            (Some(a), Some(b)) => a < b,
            (Some(_), None) => true,
            _ => false,
        };
        let (top, bot, vbot) =
            if use_first { (&n.a, &n.c, v1.unwrap()) } else { (&n.b, &n.d, v2.unwrap()) };
        let m = vdet - 2 * vbot;
        let u = k.div(top, bot)?;
        let (lo, digits) = k.expand(&u, m);
        Ok(Self::normalized(m, lo, digits))
    }

    /// The Hermite-form representative `[[pi^m, u], [0, 1]]`.
    pub fn matrix(&self, k: &Field) -> Mat2 {
        let u = k.from_base(k.base_from_digits(self.lo, &self.digits));
        Mat2 { a: k.pi_pow(self.m), b: u, c: k.zero(), d: k.one() }
    }

    /// The `q + 1` neighbours: children in digit order, then the parent.
    pub fn neighbors(&self, k: &Field) -> Vec<TreeVertex> {
        let q = k.residue_field().q();
        let mut out = Vec::with_capacity(q as usize + 1);
        for r in 0..q {
            out.push(self.child(r));
        }
        out.push(self.parent());
        out
    }

    fn child(&self, r: u32) -> TreeVertex {
        if r == 0 {
            return TreeVertex { m: self.m + 1, ..self.clone() };
        }
        if self.digits.is_empty() {
            return TreeVertex { m: self.m + 1, lo: self.m, digits: vec![r] };
        }
        let mut digits = self.digits.clone();
        let pos = (self.m - self.lo) as usize;
        digits.resize(pos, 0);
        digits.push(r);
        TreeVertex { m: self.m + 1, lo: self.lo, digits }
    }

    fn parent(&self) -> TreeVertex {
        Self::normalized(self.m - 1, self.lo, self.digits.clone())
    }

    /// Short label such as `(m=1, u=3)`.
    pub fn label(&self, k: &Field) -> String {
        let u = k.base_from_digits(self.lo, &self.digits);
        format!("(m={}, u={})", self.m, k.format_base(&u))
    }
}

fn min_entry_val(k: &Field, n: &Mat2) -> i64 {
    n.entries().iter().filter_map(|x| k.valuation(x)).min().expect("nonzero matrix")
}

/// `v(det N) - 2 min v(N_ij)` for `N = M_u^-1 M_w`, computed on adjugates.
pub fn vertex_distance(k: &Field, u: &TreeVertex, w: &TreeVertex) -> u64 {
    let n = u.matrix(k).inv(k).mul(k, &w.matrix(k));
    (u.m + w.m - 2 * min_entry_val(k, &n)) as u64
}

pub fn apply(k: &Field, a: &Mat2, v: &TreeVertex) -> TreeVertex {
    TreeVertex::from_matrix(k, &a.mul(k, &v.matrix(k))).expect("determinant-one action")
}

/// `d(v, A v)`.
pub fn displacement(k: &Field, a: &Mat2, v: &TreeVertex) -> u64 {
    let mv = v.matrix(k);
    let n = mv.inv(k).mul(k, &a.mul(k, &mv));
    (2 * v.m - 2 * min_entry_val(k, &n)) as u64
}

/// A ball, stored sphere by sphere in breadth-first order.
#[derive(Clone, Debug)]
pub struct BallProbe {
    pub center: TreeVertex,
    pub radius: u32,
    pub spheres: Vec<Vec<TreeVertex>>,
}

impl BallProbe {
    pub fn vertices(&self) -> impl Iterator<Item = &TreeVertex> {
        self.spheres.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.spheres.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `1 + (q+1)(q^r - 1)/(q - 1)`.
    pub fn expected_size(q: u64, r: u32) -> u64 {
        1 + (q + 1) * (q.pow(r) - 1) / (q - 1)
    }
}

fn next_sphere(
    k: &Field,
    prev: &[TreeVertex],
    cur: &[TreeVertex],
    exec: Exec,
) -> Vec<TreeVertex> {
    let back: HashSet<&TreeVertex> = prev.iter().collect();
    exec.flat_map(cur, |v| v.neighbors(k).into_iter().filter(|w| !back.contains(w)).collect())
}

pub fn ball(k: &Field, center: &TreeVertex, radius: u32, exec: Exec) -> BallProbe {
    let mut spheres = vec![vec![center.clone()]];
    for r in 0..radius as usize {
        let prev: &[TreeVertex] = if r == 0 { &[] } else { &spheres[r - 1] };
        let next = next_sphere(k, prev, &spheres[r], exec);
        spheres.push(next);
    }
    BallProbe { center: center.clone(), radius, spheres }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Displacement {
    /// Minimum of `d(v, A v)` over the probed ball.
    pub min: u64,
    /// Radius actually probed.
    pub radius: u32,
    /// The minimum at `radius` equals the minimum at `radius - 1`; otherwise `min` is only
    /// an upper bound for the translation length.
    pub stable: bool,
}

/// Probes `ball(base, r)` for `r = 0, 1, ...` and stops at the first radius whose minimum
/// displacement equals the previous one, or at `max_radius`.
///
/// Displacement on a tree is `l(A) + 2 d(v, Min(A))`, so the ball minimum drops by two per
/// radius until the probe reaches `Min(A)` and is constant afterwards: one repeat certifies it.
pub fn displacement_oracle(k: &Field, a: &Mat2, max_radius: u32, exec: Exec) -> Displacement {
    let sphere_min = |s: &[TreeVertex]| {
        exec.map(s, |v| displacement(k, a, v)).into_iter().min().unwrap_or(u64::MAX)
    };
    let mut prev: Vec<TreeVertex> = Vec::new();
    let mut cur = vec![TreeVertex::base()];
    let mut best = sphere_min(&cur);
    for r in 1..=max_radius {
        let next = next_sphere(k, &prev, &cur, exec);
        let m = best.min(sphere_min(&next));
        if m == best {
            return Displacement { min: best, radius: r, stable: true };
        }
        best = m;
        prev = cur;
        cur = next;
    }
    Displacement { min: best, radius: max_radius, stable: false }
}

/// Greedy descent of `v -> d(v, A v)` from `start`; ends on `Fix(A)` or `Ax(A)`.
pub fn descend(k: &Field, a: &Mat2, start: &TreeVertex) -> TreeVertex {
    let mut v = start.clone();
    let mut f = displacement(k, a, &v);
    loop {
        let better = v
            .neighbors(k)
            .into_iter()
            .map(|w| (displacement(k, a, &w), w))
            .filter(|(g, _)| *g < f)
            .min_by(|x, y| x.0.cmp(&y.0));
        match better {
            Some((g, w)) => {
                f = g;
                v = w;
            }
            None => return v,
        }
    }
}

fn require_finite_elliptic(k: &Field, a: &Mat2) -> Result<u64> {
    if psl2::classify(k, a).tag == Tag::Hyperbolic {
        return Err(Error::Precondition { expected: "elliptic", found: "hyperbolic".into() });
    }
    match psl2::element_order(k, a) {
        Order::Finite(n) => Ok(n),
        Order::Infinite => Err(Error::Precondition {
            expected: "finite order",
            found: "elliptic of infinite order".into(),
        }),
    }
}

/// Roots of `lambda^2 - tr(A) lambda + 1` in `O / pi^k`. The characteristic polynomial is
/// a conjugacy invariant, so this is the count for a conjugate of `A` fixing the base.
pub fn fixed_vertices_at_distance(k: &Field, a: &Mat2, dist: usize) -> Result<usize> {
    require_finite_elliptic(k, a)?;
    let poly = [k.one(), k.neg(&a.trace(k)), k.one()];
    k.count_ring_roots(&poly, dist)
}

/// Fixed vertices at exact distance `dist` from `center`, by enumeration.
pub fn fixed_vertices_brute(
    k: &Field,
    a: &Mat2,
    center: &TreeVertex,
    dist: u32,
    exec: Exec,
) -> usize {
    let b = ball(k, center, dist, exec);
    let sphere = &b.spheres[dist as usize];
    exec.map(sphere, |v| displacement(k, a, v) == 0).into_iter().filter(|&x| x).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixShape {
    TwoAdjacent,
    SingleVertex,
    BiInfiniteRay,
}

impl std::fmt::Display for FixShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FixShape::TwoAdjacent => "two-adjacent",
            FixShape::SingleVertex => "single-vertex",
            FixShape::BiInfiniteRay => "bi-infinite-ray",
        })
    }
}

/// Shape of `Fix(A)` from the congruence class of `q` modulo the order.
pub fn fix_shape(k: &Field, a: &Mat2) -> Result<FixShape> {
    let n = require_finite_elliptic(k, a)?;
    if n == 1 {
        return Err(Error::Precondition { expected: "non-identity", found: "identity".into() });
    }
    let p = k.p() as u64;
    if n % p == 0 {
        if k.kind() == FieldKind::Padic && n == p && (p == 2 || p == 3) {
            return Ok(FixShape::TwoAdjacent);
        }
        return Err(Error::OrderDivisibleByP(n));
    }
    let q = k.q();
    let modulus = if q % 2 == 1 { 2 * n } else { n };
    if q % modulus == 1 {
        Ok(FixShape::BiInfiniteRay)
    } else if (q + 1).is_multiple_of(modulus) {
        Ok(FixShape::SingleVertex)
    } else {
        Err(Error::Precondition {
            expected: "an order allowed by the residue field",
            found: format!("order {n} with q = {q}"),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Intersection {
    Empty,
    Path(u32),
    ExceedsR,
}

impl std::fmt::Display for Intersection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Intersection::Empty => f.write_str("empty"),
            Intersection::Path(n) => write!(f, "path({n})"),
            Intersection::ExceedsR => f.write_str("exceeds-R"),
        }
    }
}

/// Start of the intersection probe: the projection onto `Fix(A)` of a point of `Ax(B)`.
/// It lies in `Fix(A) ∩ Ax(B)` whenever that set is nonempty.
pub fn probe_center(k: &Field, a: &Mat2, b: &Mat2) -> TreeVertex {
    let on_axis = descend(k, b, &TreeVertex::base());
    descend(k, a, &on_axis)
}

/// `Fix(A) ∩ Ax(B)` within `ball(probe_center, radius)`.
pub fn fix_ax_intersection(
    k: &Field,
    a: &Mat2,
    b: &Mat2,
    radius: u32,
    exec: Exec,
) -> Result<Intersection> {
    require_finite_elliptic(k, a)?;
    let lb = psl2::translation_length(k, b);
    if lb == 0 {
        return Err(Error::Precondition { expected: "hyperbolic", found: "elliptic".into() });
    }
    let center = probe_center(k, a, b);
    let probe = ball(k, &center, radius, exec);
    let hits: Vec<Vec<bool>> = probe
        .spheres
        .iter()
        .map(|s| exec.map(s, |v| displacement(k, a, v) == 0 && displacement(k, b, v) == lb))
        .collect();
    let count: usize = hits.iter().flatten().filter(|&&h| h).count();
    if count == 0 {
        return Ok(Intersection::Empty);
    }
    if hits[radius as usize].iter().any(|&h| h) {
        return Ok(Intersection::ExceedsR);
    }
    Ok(Intersection::Path(count as u32 - 1))
}

/// Graphviz rendering of `ball(center, radius)`, with `Fix(A)` and `Ax(B)` highlighted.
pub fn dot_dump(
    k: &Field,
    a: Option<&Mat2>,
    b: Option<&Mat2>,
    center: &TreeVertex,
    radius: u32,
    exec: Exec,
) -> String {
    let probe = ball(k, center, radius, exec);
    let verts: Vec<TreeVertex> = probe.vertices().cloned().collect();
    let lb = b.map(|b| psl2::translation_length(k, b));
    let marks = exec.map(&verts, |v| {
        let fixed = a.map(|a| displacement(k, a, v) == 0).unwrap_or(false);
        let axis = match (b, lb) {
            (Some(b), Some(l)) if l > 0 => displacement(k, b, v) == l,
            _ => false,
        };
        (fixed, axis)
    });
    let index: std::collections::HashMap<&TreeVertex, usize> =
        verts.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut out = String::from("graph ball {\n  node [shape=circle, fontsize=9];\n");
    for (i, v) in verts.iter().enumerate() {
        let (fixed, axis) = marks[i];
        let color = match (fixed, axis) {
            (true, true) => "purple",
            (true, false) => "red",
            (false, true) => "blue",
            _ => "black",
        };
        let _ = writeln!(out, "  v{i} [label=\"{}\", color={color}];", v.label(k));
    }
    for (r, sphere) in probe.spheres.iter().enumerate().skip(1) {
        let prev: HashSet<&TreeVertex> = probe.spheres[r - 1].iter().collect();
        for v in sphere {
            for w in v.neighbors(k) {
                if prev.contains(&w) {
                    let _ = writeln!(out, "  v{} -- v{};", index[&w], index[v]);
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Diagonal test helper: the class of `diag(x, 1)`.
pub fn diagonal_vertex(k: &Field, x: &Scalar) -> Result<TreeVertex> {
    let n = Mat2 { a: x.clone(), b: k.zero(), c: k.zero(), d: k.one() };
    TreeVertex::from_matrix(k, &n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::FieldConfig;

    fn q(p: u32) -> Field {
        Field::new(FieldConfig::padic(p)).unwrap()
    }

    #[test]
    fn distances() {
        let k = q(5);
        let base = TreeVertex::base();
        let v = diagonal_vertex(&k, &k.pi_pow(-1)).unwrap();
        assert_eq!(vertex_distance(&k, &base, &v), 1);
        assert_eq!(vertex_distance(&k, &v, &v), 0);
        let b = Mat2::diag(&k, &k.pi_pow(1)).unwrap();
        let w = apply(&k, &b, &base);
        assert_eq!(vertex_distance(&k, &base, &w), 2);
        assert_eq!(displacement(&k, &b, &base), 2);
        let s = Mat2::parse(&k, [["0", "-1"], ["1", "0"]]).unwrap();
        assert_eq!(apply(&k, &s, &base), base);
        assert_eq!(apply(&k, &Mat2::identity(&k), &w), w);
    }

    #[test]
    fn neighbours_are_adjacent_and_distinct() {
        let k = q(3);
        let v = TreeVertex::normalized(2, -1, vec![1, 2]);
        let ns = v.neighbors(&k);
        assert_eq!(ns.len(), 4);
        let set: HashSet<_> = ns.iter().collect();
        assert_eq!(set.len(), 4);
        for w in &ns {
            assert_eq!(vertex_distance(&k, &v, w), 1);
            assert!(w.neighbors(&k).contains(&v));
        }
    }

    #[test]
    fn ball_sizes() {
        for (p, r) in [(2, 4), (3, 3), (5, 2)] {
            let k = q(p);
            let b = ball(&k, &TreeVertex::base(), r, Exec::Sequential);
            assert_eq!(b.len() as u64, BallProbe::expected_size(p as u64, r));
            let set: HashSet<_> = b.vertices().collect();
            assert_eq!(set.len(), b.len());
        }
        let k = Field::new(FieldConfig::laurent(3, 2)).unwrap();
        let b = ball(&k, &TreeVertex::base(), 2, Exec::Parallel);
        assert_eq!(b.len() as u64, BallProbe::expected_size(9, 2));
    }

    #[test]
    fn oracle_examples() {
        let k = q(5);
        let b = Mat2::diag(&k, &k.pi_pow(1)).unwrap();
        let d = displacement_oracle(&k, &b, 2, Exec::Sequential);
        assert_eq!(d, Displacement { min: 2, radius: 1, stable: true });
        let i = displacement_oracle(&k, &Mat2::identity(&k), 3, Exec::Sequential);
        assert_eq!(i.min, 0);
        let s = Mat2::parse(&k, [["0", "-1"], ["1", "0"]]).unwrap();
        assert_eq!(displacement_oracle(&k, &s, 1, Exec::Sequential).min, 0);
    }

    #[test]
    fn root_counts() {
        let s5 = Mat2::parse(&q(5), [["0", "-1"], ["1", "0"]]).unwrap();
        assert_eq!(fixed_vertices_at_distance(&q(5), &s5, 1), Ok(2));
        let s3 = Mat2::parse(&q(3), [["0", "-1"], ["1", "0"]]).unwrap();
        assert_eq!(fixed_vertices_at_distance(&q(3), &s3, 1), Ok(0));
        let r3 = Mat2::parse(&q(3), [["0", "-1"], ["1", "1"]]).unwrap();
        assert_eq!(fixed_vertices_at_distance(&q(3), &r3, 1), Ok(1));
        assert_eq!(fixed_vertices_at_distance(&q(3), &r3, 2), Ok(0));
        let b = Mat2::diag(&q(5), &q(5).pi_pow(1)).unwrap();
        assert!(fixed_vertices_at_distance(&q(5), &b, 1).is_err());
    }

    #[test]
    fn shapes() {
        let s = |k: &Field| Mat2::parse(k, [["0", "-1"], ["1", "0"]]).unwrap();
        let r = |k: &Field| Mat2::parse(k, [["0", "-1"], ["1", "1"]]).unwrap();
        assert_eq!(fix_shape(&q(5), &s(&q(5))), Ok(FixShape::BiInfiniteRay));
        assert_eq!(fix_shape(&q(5), &r(&q(5))), Ok(FixShape::SingleVertex));
        assert_eq!(fix_shape(&q(2), &s(&q(2))), Ok(FixShape::TwoAdjacent));
        assert_eq!(fix_shape(&q(3), &r(&q(3))), Ok(FixShape::TwoAdjacent));
    }

    #[test]
    fn dot_output_mentions_every_vertex() {
        let k = q(2);
        let s = Mat2::parse(&k, [["0", "-1"], ["1", "0"]]).unwrap();
        let dot = dot_dump(&k, Some(&s), None, &TreeVertex::base(), 2, Exec::Sequential);
        assert_eq!(dot.matches("label=").count(), 10);
        assert_eq!(dot.matches(" -- ").count(), 9);
        assert!(dot.contains("color=red"));
    }
}
