//! Permutations acting on the right and groups of them via a
//! deterministic Schreier–Sims chain.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::caps::Caps;
use crate::error::{cap_exceeded, Error, Result};

/// `p^(xy) = (p^x)^y`: `x.then(y)` applies `x` first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            if y >= n || seen[y] {
                return Err(Error::Domain("image list is not a permutation".into()));
            }
            seen[y] = true;
        }
        Ok(Permutation {
            images: images.into_iter().map(|y| y as u32).collect(),
        })
    }

    /// Unchecked; callers guarantee a bijection.
    pub(crate) fn from_images_u32(images: Vec<u32>) -> Self {
        Permutation { images }
    }

    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        for c in cycles {
            for (i, &a) in c.iter().enumerate() {
                let b = c[(i + 1) % c.len()];
                if a >= n || b >= n {
                    return Err(Error::Domain("cycle point out of range".into()));
                }
                images[a] = b;
            }
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, p: usize) -> usize {
        self.images[p] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.images.iter().map(|&y| y as usize)
    }

    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: self.images.iter().map(|&y| other.images[y as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &y) in self.images.iter().enumerate() {
            inv[y as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    /// `x^-1 self x`.
    pub fn conjugate_by(&self, x: &Permutation) -> Permutation {
        let mut out = vec![0u32; self.images.len()];
        for (i, &y) in self.images.iter().enumerate() {
            out[x.images[i] as usize] = x.images[y as usize];
        }
        Permutation { images: out }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &y)| i as u32 == y)
    }

    pub fn first_moved(&self) -> Option<usize> {
        self.images.iter().enumerate().position(|(i, &y)| i as u32 != y)
    }

    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.images.len()];
        let mut ord = 1u64;
        for s in 0..self.images.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0u64;
            let mut p = s;
            while !seen[p] {
                seen[p] = true;
                p = self.images[p] as usize;
                len += 1;
            }
            ord = ord / crate::group::gcd(ord, len) * len;
        }
        ord
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for s in 0..self.images.len() {
            if seen[s] || self.images[s] as usize == s {
                continue;
            }
            let mut c = Vec::new();
            let mut p = s;
            while !seen[p] {
                seen[p] = true;
                c.push(p);
                p = self.images[p] as usize;
            }
            out.push(c);
        }
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs = self.cycles();
        if cs.is_empty() {
            return write!(f, "()");
        }
        for c in cs {
            let s: Vec<String> = c.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", s.join(","))?;
        }
        Ok(())
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.images.serialize(s)
    }
}

#[derive(Debug, Clone)]
struct Level {
    base: usize,
    gens: Vec<Permutation>,
    /// `transversal[p]` maps the base point to `p`.
    transversal: HashMap<usize, Permutation>,
    orbit: Vec<usize>,
}

impl Level {
    fn new(base: usize, degree: usize) -> Self {
        let mut transversal = HashMap::new();
        transversal.insert(base, Permutation::identity(degree));
        Level {
            base,
            gens: Vec::new(),
            transversal,
            orbit: vec![base],
        }
    }
}

/// A permutation group with a stabilizer chain.
#[derive(Debug, Clone)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Permutation>,
    levels: Vec<Level>,
}

impl PermutationGroup {
    pub fn trivial(degree: usize) -> Self {
        PermutationGroup {
            degree,
            generators: Vec::new(),
            levels: Vec::new(),
        }
    }

    pub fn new(degree: usize, gens: &[Permutation]) -> Result<Self> {
        Self::with_base_prefix(degree, gens, &[])
    }

    /// Chain whose base starts with `prefix`; later base points are the
    /// smallest points moved by the element that needs them.
    pub fn with_base_prefix(degree: usize, gens: &[Permutation], prefix: &[usize]) -> Result<Self> {
        for g in gens {
            if g.degree() != degree {
                return Err(Error::Domain(format!(
                    "generator of degree {} in group of degree {degree}",
                    g.degree()
                )));
            }
        }
        if prefix.iter().any(|&p| p >= degree) {
            return Err(Error::Domain("base point out of range".into()));
        }
        let mut grp = PermutationGroup {
            degree,
            generators: Vec::new(),
            levels: prefix.iter().map(|&b| Level::new(b, degree)).collect(),
        };
        for g in gens {
            if !g.is_identity() {
                grp.generators.push(g.clone());
                grp.insert(0, g.clone());
            }
        }
        Ok(grp)
    }

    fn strip(&self, from: usize, g: &Permutation) -> (Permutation, usize) {
        let mut h = g.clone();
        for (i, lvl) in self.levels.iter().enumerate().skip(from) {
            let b = h.apply(lvl.base);
            match lvl.transversal.get(&b) {
                Some(u) => h = h.then(&u.inverse()),
                None => return (h, i),
            }
        }
        (h, self.levels.len())
    }

    fn insert(&mut self, i: usize, g: Permutation) {
        let (res, j) = self.strip(i, &g);
        if j == self.levels.len() && res.is_identity() {
            return;
        }
        if i == self.levels.len() {
            let b = g.first_moved().expect("nonidentity");
            self.levels.push(Level::new(b, self.degree));
        }
        self.levels[i].gens.push(g.clone());
        let old_len = self.levels[i].orbit.len();
        let mut schreier = Vec::new();
        for k in 0..old_len {
            let b = self.levels[i].orbit[k];
            let u = &self.levels[i].transversal[&b];
            let c = g.apply(b);
            let ub = u.then(&g);
            match self.levels[i].transversal.get(&c) {
                Some(uc) => schreier.push(ub.then(&uc.inverse())),
                None => {
                    self.levels[i].transversal.insert(c, ub);
                    self.levels[i].orbit.push(c);
                }
            }
        }
        let mut k = old_len;
        while k < self.levels[i].orbit.len() {
            let b = self.levels[i].orbit[k];
            let u = self.levels[i].transversal[&b].clone();
            for s in self.levels[i].gens.clone() {
                let c = s.apply(b);
                let us = u.then(&s);
                match self.levels[i].transversal.get(&c) {
                    Some(uc) => schreier.push(us.then(&uc.inverse())),
                    None => {
                        self.levels[i].transversal.insert(c, us);
                        self.levels[i].orbit.push(c);
                    }
                }
            }
            k += 1;
        }
        for h in schreier {
            if !h.is_identity() {
                self.insert(i + 1, h);
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn strong_generators(&self) -> Vec<Permutation> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for l in &self.levels {
            for g in &l.gens {
                if seen.insert(g.clone()) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    /// Orbit lengths along the chain.
    pub fn basic_orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (res, j) = self.strip(0, g);
        j == self.levels.len() && res.is_identity()
    }

    pub fn is_trivial(&self) -> bool {
        self.levels.iter().all(|l| l.orbit.len() == 1)
    }

    /// Orbit of `p` under the generators, in discovery order.
    pub fn orbit(&self, p: usize) -> Vec<usize> {
        orbit_of(&self.generators, self.degree, p)
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        orbits_of(&self.generators, self.degree)
    }

    /// Every element; fails if the order exceeds `cap`.
    pub fn elements(&self, cap: usize) -> Result<Vec<Permutation>> {
        let ord = self.order();
        if ord > BigUint::from(cap) {
            return Err(cap_exceeded("permutation group enumeration", cap as u64, ord));
        }
        let mut out = vec![Permutation::identity(self.degree)];
        for lvl in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * lvl.orbit.len());
            for h in &out {
                for b in &lvl.orbit {
                    next.push(h.then(&lvl.transversal[b]));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Pointwise stabilizer of `points`, rebuilt with them as base prefix.
    pub fn pointwise_stabilizer(&self, points: &[usize]) -> Result<PermutationGroup> {
        let chain = Self::with_base_prefix(self.degree, &self.strong_generators(), points)?;
        let k = points.len();
        let mut gens = Vec::new();
        for l in chain.levels.iter().skip(k) {
            for g in &l.gens {
                if points.iter().all(|&p| g.apply(p) == p) && !gens.contains(g) {
                    gens.push(g.clone());
                }
            }
        }
        let mut sub = Self::new(self.degree, &gens)?;
        sub.generators = gens;
        Ok(sub)
    }

    /// Subgroup generated by a list of members.
    pub fn from_elements(degree: usize, elems: &[Permutation]) -> Result<Self> {
        let mut grp = Self::trivial(degree);
        for e in elems {
            if !grp.contains(e) {
                grp.generators.push(e.clone());
                grp.insert(0, e.clone());
            }
        }
        Ok(grp)
    }

    pub fn is_subgroup_of(&self, other: &PermutationGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }
}

pub(crate) fn orbit_of(gens: &[Permutation], degree: usize, p: usize) -> Vec<usize> {
    let mut seen = vec![false; degree];
    seen[p] = true;
    let mut orbit = vec![p];
    let mut k = 0;
    while k < orbit.len() {
        let q = orbit[k];
        for g in gens {
            let r = g.apply(q);
            if !seen[r] {
                seen[r] = true;
                orbit.push(r);
            }
        }
        k += 1;
    }
    orbit
}

pub(crate) fn orbits_of(gens: &[Permutation], degree: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; degree];
    let mut out = Vec::new();
    for p in 0..degree {
        if !seen[p] {
            let o = orbit_of(gens, degree, p);
            for &q in &o {
                seen[q] = true;
            }
            out.push(o);
        }
    }
    out
}

/// `Nor_G(H)`, by filtering the elements of `G`.
pub fn normalizer_bounded(g: &PermutationGroup, h: &PermutationGroup, caps: &Caps) -> Result<PermutationGroup> {
    if !h.is_subgroup_of(g) {
        return Err(Error::Precondition("H is not a subgroup of G".into()));
    }
    let elems = g.elements(caps.perm_elements)?;
    let keep: Vec<Permutation> = elems
        .into_iter()
        .filter(|x| h.generators().iter().all(|s| h.contains(&s.conjugate_by(x))))
        .collect();
    PermutationGroup::from_elements(g.degree(), &keep)
}

/// `Core_G(H)`: the largest normal subgroup of `G` inside `H`.
pub fn core_bounded(g: &PermutationGroup, h: &PermutationGroup, caps: &Caps) -> Result<PermutationGroup> {
    if !h.is_subgroup_of(g) {
        return Err(Error::Precondition("H is not a subgroup of G".into()));
    }
    let mut k: HashSet<Permutation> = h.elements(caps.perm_elements)?.into_iter().collect();
    loop {
        let next: HashSet<Permutation> = k
            .iter()
            .filter(|x| g.generators().iter().all(|s| k.contains(&x.conjugate_by(s))))
            .cloned()
            .collect();
        if next.len() == k.len() {
            break;
        }
        k = next;
    }
    let mut elems: Vec<Permutation> = k.into_iter().collect();
    elems.sort();
    PermutationGroup::from_elements(g.degree(), &elems)
}

/// A transitive group `X` with point stabilizer `T` and point set `Ω`.
#[derive(Debug, Clone)]
pub struct ActionTriple {
    pub group: PermutationGroup,
    pub stabilizer: PermutationGroup,
}

impl ActionTriple {
    pub fn new(group: PermutationGroup, stabilizer: PermutationGroup) -> Result<Self> {
        if !stabilizer.is_subgroup_of(&group) {
            return Err(Error::Precondition("stabilizer is not a subgroup".into()));
        }
        Ok(ActionTriple { group, stabilizer })
    }

    pub fn degree(&self) -> usize {
        self.group.degree()
    }
}

/// Whether a bijection `φ` of the point sets conjugates `X1` onto `X2` and
/// `T1` onto `T2`. Backtracking over `φ`, pruned by generator consistency.
pub fn triples_equivalent(a: &ActionTriple, b: &ActionTriple, caps: &Caps) -> Result<bool> {
    let n = a.degree();
    if b.degree() != n {
        return Ok(false);
    }
    if a.group.order() != b.group.order() || a.stabilizer.order() != b.stabilizer.order() {
        return Ok(false);
    }
    let mut oa: Vec<usize> = a.group.orbits().iter().map(|o| o.len()).collect();
    let mut ob: Vec<usize> = b.group.orbits().iter().map(|o| o.len()).collect();
    oa.sort_unstable();
    ob.sort_unstable();
    if oa != ob {
        return Ok(false);
    }
    let x2 = b.group.elements(caps.perm_elements)?;
    let t2 = b.stabilizer.elements(caps.perm_elements)?;
    let mut search = Bijection {
        n,
        phi: vec![usize::MAX; n],
        used: vec![false; n],
        constraints: vec![(a.group.generators().to_vec(), x2), (a.stabilizer.generators().to_vec(), t2)],
        nodes: 0,
        cap: caps.search_nodes,
    };
    search.run(0)
}

struct Bijection {
    n: usize,
    phi: Vec<usize>,
    used: Vec<bool>,
    constraints: Vec<(Vec<Permutation>, Vec<Permutation>)>,
    nodes: usize,
    cap: usize,
}

impl Bijection {
    fn consistent(&self) -> bool {
        for (gens, targets) in &self.constraints {
            for g in gens {
                let ok = targets.iter().any(|y| {
                    (0..self.n).all(|p| {
                        let q = g.apply(p);
                        self.phi[p] == usize::MAX || self.phi[q] == usize::MAX || y.apply(self.phi[p]) == self.phi[q]
                    })
                });
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, p: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(cap_exceeded("bijection search nodes", self.cap as u64, self.nodes));
        }
        if !self.consistent() {
            return Ok(false);
        }
        if p == self.n {
            return Ok(true);
        }
        for q in 0..self.n {
            if self.used[q] {
                continue;
            }
            self.phi[p] = q;
            self.used[q] = true;
            if self.run(p + 1)? {
                return Ok(true);
            }
            self.used[q] = false;
            self.phi[p] = usize::MAX;
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, c: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, c).unwrap()
    }

    fn sym(n: usize) -> PermutationGroup {
        let mut gens = vec![cyc(n, &[&(0..n).collect::<Vec<_>>()])];
        if n > 1 {
            gens.push(cyc(n, &[&[0, 1]]));
        }
        PermutationGroup::new(n, &gens).unwrap()
    }

    #[test]
    fn right_action_composition() {
        let x = cyc(3, &[&[0, 1]]);
        let y = cyc(3, &[&[1, 2]]);
        let xy = x.then(&y);
        assert_eq!(xy.apply(0), y.apply(x.apply(0)));
        assert_eq!(xy.apply(0), 2);
        assert!(x.then(&x.inverse()).is_identity());
        let c = y.conjugate_by(&x);
        for p in 0..3 {
            assert_eq!(c.apply(p), x.inverse().then(&y).then(&x).apply(p));
        }
        assert_eq!(cyc(5, &[&[0, 1, 2], &[3, 4]]).order(), 6);
    }

    #[test]
    fn symmetric_group_orders() {
        for n in 1..=8usize {
            let f: u64 = (1..=n as u64).product();
            assert_eq!(sym(n).order(), BigUint::from(f));
        }
    }

    #[test]
    fn enumeration_matches_order_and_membership() {
        let g = PermutationGroup::new(6, &[cyc(6, &[&[0, 1, 2]]), cyc(6, &[&[3, 4, 5]]), cyc(6, &[&[0, 3], &[1, 4], &[2, 5]])]).unwrap();
        assert_eq!(g.order(), BigUint::from(18u32));
        let el = g.elements(100).unwrap();
        assert_eq!(el.len(), 18);
        let set: HashSet<_> = el.iter().cloned().collect();
        assert_eq!(set.len(), 18);
        assert!(el.iter().all(|e| g.contains(e)));
        assert!(!g.contains(&cyc(6, &[&[0, 1]])));
        assert!(matches!(sym(9).elements(1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn base_prefix_is_respected() {
        let g = PermutationGroup::with_base_prefix(5, sym(5).generators(), &[4, 2]).unwrap();
        assert_eq!(&g.base()[..2], &[4, 2]);
        assert_eq!(g.order(), BigUint::from(120u32));
        let st = g.pointwise_stabilizer(&[4, 2]).unwrap();
        assert_eq!(st.order(), BigUint::from(6u32));
        assert!(st.generators().iter().all(|s| s.apply(4) == 4 && s.apply(2) == 2));
    }

    #[test]
    fn normalizer_and_core_in_s4() {
        let s4 = sym(4);
        let caps = Caps::default();
        let c3 = PermutationGroup::new(4, &[cyc(4, &[&[0, 1, 2]])]).unwrap();
        assert_eq!(normalizer_bounded(&s4, &c3, &caps).unwrap().order(), BigUint::from(6u32));
        let v4 = PermutationGroup::new(4, &[cyc(4, &[&[0, 1], &[2, 3]]), cyc(4, &[&[0, 2], &[1, 3]])]).unwrap();
        assert_eq!(normalizer_bounded(&s4, &v4, &caps).unwrap().order(), BigUint::from(24u32));
        let d8 = PermutationGroup::new(4, &[cyc(4, &[&[0, 1, 2, 3]]), cyc(4, &[&[0, 2]])]).unwrap();
        assert_eq!(core_bounded(&s4, &d8, &caps).unwrap().order(), BigUint::from(4u32));
        assert_eq!(core_bounded(&s4, &c3, &caps).unwrap().order(), BigUint::one());
        assert!(matches!(normalizer_bounded(&c3, &v4, &caps), Err(Error::Precondition(_))));
    }

    #[test]
    fn equivalent_triples() {
        let caps = Caps::default();
        let s3 = sym(3);
        let t1 = PermutationGroup::new(3, &[cyc(3, &[&[1, 2]])]).unwrap();
        let t2 = PermutationGroup::new(3, &[cyc(3, &[&[0, 1]])]).unwrap();
        let a = ActionTriple::new(s3.clone(), t1).unwrap();
        let b = ActionTriple::new(s3.clone(), t2).unwrap();
        assert!(triples_equivalent(&a, &b, &caps).unwrap());
        let c = ActionTriple::new(s3, PermutationGroup::trivial(3)).unwrap();
        assert!(!triples_equivalent(&a, &c, &caps).unwrap());
        // C4 and V4 regular on four points
        let c4 = PermutationGroup::new(4, &[cyc(4, &[&[0, 1, 2, 3]])]).unwrap();
        let v4 = PermutationGroup::new(4, &[cyc(4, &[&[0, 1], &[2, 3]]), cyc(4, &[&[0, 2], &[1, 3]])]).unwrap();
        let x = ActionTriple::new(c4, PermutationGroup::trivial(4)).unwrap();
        let y = ActionTriple::new(v4, PermutationGroup::trivial(4)).unwrap();
        assert!(!triples_equivalent(&x, &y, &caps).unwrap());
    }
}
