//! Finite closures in `PSL_2(K)`, identification against the finite-subgroup list, and the
//! double-involution search.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localfield::{Field, FieldKind};
use crate::psl2::Mat2;

/// `max(60, q + 1) + 1`: no finite subgroup of `PSL_2(K)` is larger than `max(60, q + 1)`.
pub fn default_cap(k: &Field) -> usize {
    60.max(k.q() as usize + 1) + 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureStatus {
    Finite,
    ExceedsCap(usize),
}

#[derive(Clone, Debug)]
pub struct ClosureResult {
    pub status: ClosureStatus,
    /// Canonical elements in discovery order; the identity comes first.
    pub elements: Vec<Mat2>,
    /// The generator word (indices into the generator list) reaching each element.
    pub words: Vec<Vec<usize>>,
    /// Number of matrix products evaluated.
    pub products: usize,
}

impl ClosureResult {
    pub fn is_finite(&self) -> bool {
        self.status == ClosureStatus::Finite
    }

    pub fn order(&self) -> Option<usize> {
        self.is_finite().then_some(self.elements.len())
    }
}

/// Breadth-first right-multiplication closure; stops once more than `cap` elements are
/// known. Positive words suffice since every element of a finite group has finite order.
pub fn closure_with_cap(k: &Field, gens: &[Mat2], cap: usize) -> ClosureResult {
    let id = Mat2::identity(k).canonical(k);
    let gens: Vec<Mat2> = gens.iter().map(|g| g.canonical(k)).collect();
    let mut seen: HashSet<Mat2> = HashSet::from([id.clone()]);
    let mut elements = vec![id];
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);
    let mut products = 0;
    while let Some(i) = queue.pop_front() {
        for (j, g) in gens.iter().enumerate() {
            let h = elements[i].mul(k, g).canonical(k);
            products += 1;
            if seen.insert(h.clone()) {
                let mut w = words[i].clone();
                w.push(j);
                elements.push(h);
                words.push(w);
                queue.push_back(elements.len() - 1);
                if elements.len() > cap {
                    return ClosureResult {
                        status: ClosureStatus::ExceedsCap(cap),
                        elements,
                        words,
                        products,
                    };
                }
            }
        }
    }
    ClosureResult { status: ClosureStatus::Finite, elements, words, products }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupTag {
    Cyclic(u64),
    Dihedral(u64),
    A4,
    S4,
    A5,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteGroupId {
    pub tag: GroupTag,
    pub order: u64,
}

impl FiniteGroupId {
    pub fn new(tag: GroupTag) -> Self {
        let order = match tag {
            GroupTag::Cyclic(n) => n,
            GroupTag::Dihedral(n) => 2 * n,
            GroupTag::A4 => 12,
            GroupTag::S4 => 24,
            GroupTag::A5 => 60,
        };
        FiniteGroupId { tag, order }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let tag = match s {
            "A4" => GroupTag::A4,
            "S4" => GroupTag::S4,
            "A5" => GroupTag::A5,
            _ => {
                let n: u64 = s.get(1..)?.parse().ok()?;
                match s.as_bytes().first()? {
                    b'C' if n >= 1 => GroupTag::Cyclic(n),
                    b'D' if n >= 2 => GroupTag::Dihedral(n),
                    _ => return None,
                }
            }
        };
        Some(Self::new(tag))
    }
}

impl fmt::Display for FiniteGroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tag {
            GroupTag::Cyclic(n) => write!(f, "C{n}"),
            GroupTag::Dihedral(n) => write!(f, "D{n}"),
            GroupTag::A4 => f.write_str("A4"),
            GroupTag::S4 => f.write_str("S4"),
            GroupTag::A5 => f.write_str("A5"),
        }
    }
}

fn cyclic_allowed(q: u64, n: u64, qp_special: bool) -> bool {
    let pm = |m: u64| q % m == 1 || (q + 1).is_multiple_of(m);
    n == 1 || pm(2 * n) || (q.is_multiple_of(2) && pm(n)) || qp_special
}

/// Whether the finite-subgroup classification admits `id` over `k`.
pub fn allowed_by_classification(k: &Field, id: &FiniteGroupId) -> bool {
    let q = k.q();
    let p = k.p() as u64;
    let qp = k.kind() == FieldKind::Padic;
    let pm = |m: u64| q % m == 1 || (q + 1).is_multiple_of(m);
    match id.tag {
        GroupTag::Cyclic(n) => cyclic_allowed(q, n, qp && n == p && (p == 2 || p == 3)),
        GroupTag::Dihedral(n) => pm(2 * n) || (qp && p == 2 && n == 3),
        GroupTag::A4 => p > 3 || (qp && p == 3),
        GroupTag::S4 => pm(8),
        GroupTag::A5 => pm(10),
    }
}

fn element_orders(k: &Field, elements: &[Mat2]) -> Vec<u64> {
    elements
        .iter()
        .map(|g| {
            let mut acc = g.clone();
            let mut n = 1;
            while !acc.is_identity(k) {
                acc = acc.mul(k, g);
                n += 1;
                assert!(n <= elements.len() as u64, "element order exceeds group order");
            }
            n
        })
        .collect()
}

/// Identifies a closed finite set of canonical elements.
pub fn identify_finite_group(k: &Field, elements: &[Mat2]) -> Result<FiniteGroupId> {
    let canon: Vec<Mat2> = elements.iter().map(|g| g.canonical(k)).collect();
    let set: HashSet<&Mat2> = canon.iter().collect();
    if set.len() != canon.len() || !set.contains(&Mat2::identity(k).canonical(k)) {
        return Err(Error::NotClosed);
    }
    for g in &canon {
        if !set.contains(&g.inv(k).canonical(k)) {
            return Err(Error::NotClosed);
        }
        for h in &canon {
            if !set.contains(&g.mul(k, h).canonical(k)) {
                return Err(Error::NotClosed);
            }
        }
    }
    let n = canon.len() as u64;
    let orders = element_orders(k, &canon);
    let abelian = canon
        .iter()
        .all(|g| canon.iter().all(|h| g.mul(k, h).proj_eq(k, &h.mul(k, g))));
    let has_order = |m: u64| orders.contains(&m);
    let unclassified = Err(Error::UnclassifiedGroup(n as usize));
    if abelian {
        if has_order(n) {
            return Ok(FiniteGroupId::new(GroupTag::Cyclic(n)));
        }
        if n == 4 {
            return Ok(FiniteGroupId::new(GroupTag::Dihedral(2)));
        }
        return unclassified;
    }
    if n.is_multiple_of(2) && has_order(n / 2) {
        // an element r of order n/2 and an involution s outside <r> with s r s = r^-1
        let i = orders.iter().position(|&o| o == n / 2).unwrap();
        let r = &canon[i];
        let cyclic: HashSet<Mat2> =
            (0..n / 2).map(|e| r.pow(k, e as i64).canonical(k)).collect();
        let inverting = canon.iter().zip(&orders).any(|(s, &o)| {
            o == 2 && !cyclic.contains(s) && s.mul(k, r).mul(k, s).proj_eq(k, &r.inv(k))
        });
        if inverting {
            return Ok(FiniteGroupId::new(GroupTag::Dihedral(n / 2)));
        }
        return unclassified;
    }
    let mut profile: HashMap<u64, usize> = HashMap::new();
    for &o in &orders {
        *profile.entry(o).or_default() += 1;
    }
    let expect = |pairs: &[(u64, usize)]| {
        pairs.iter().all(|(o, c)| profile.get(o) == Some(c))
            && profile.len() == pairs.len()
    };
    match n {
        12 if expect(&[(1, 1), (2, 3), (3, 8)]) => Ok(FiniteGroupId::new(GroupTag::A4)),
        24 if expect(&[(1, 1), (2, 9), (3, 8), (4, 6)]) => Ok(FiniteGroupId::new(GroupTag::S4)),
        60 if expect(&[(1, 1), (2, 15), (3, 20), (5, 24)]) => {
            Ok(FiniteGroupId::new(GroupTag::A5))
        }
        _ => unclassified,
    }
}

/// First `g != 1` (in the given order) with `tr g = 0` and `tr gY = 0`.
pub fn find_double_involution(k: &Field, g0: &[Mat2], y: &Mat2) -> Option<Mat2> {
    g0.iter()
        .filter(|g| !g.is_identity(k))
        .find(|g| k.is_zero(&g.trace(k)) && k.is_zero(&g.mul(k, y).trace(k)))
        .cloned()
}
