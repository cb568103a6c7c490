//! Finite abelian groups in invariant-factor form, their subgroups,
//! automorphisms and holomorph.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{cap_exceeded, Error, Result};

/// Elements are indices `0..order`, lexicographic in the invariant-factor
/// coordinates (first coordinate most significant). The identity is 0.
pub type Element = usize;

/// A subset of a group, one bit per element index.
pub type ElementSet = FixedBitSet;

/// Upper limit on group orders the crate will index.
pub const MAX_ORDER: u64 = 1 << 26;

/// A group as the user typed it, e.g. `C2xC4`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupSpec {
    pub factors: Vec<i64>,
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::Parse("empty group spec".into()));
        }
        let mut factors = Vec::new();
        for part in t.split(['x', 'X', '*']) {
            let p = part.trim();
            let digits = p
                .strip_prefix('C')
                .or_else(|| p.strip_prefix('c'))
                .ok_or_else(|| Error::Parse(format!("expected C<n>, got {p:?}")))?;
            let n: i64 = digits
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad cyclic order {digits:?}")))?;
            factors.push(n);
        }
        Ok(GroupSpec { factors })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|d| format!("C{d}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

#[derive(Debug, Clone)]
pub struct AbelianGroup {
    factors: Vec<u64>,
    strides: Vec<usize>,
    order: usize,
    neg: Vec<Element>,
    input: Vec<u64>,
    input_images: Vec<Element>,
}

impl PartialEq for AbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
    }
}
impl Eq for AbelianGroup {}

pub(crate) fn prime_powers(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl AbelianGroup {
    /// Builds the group `C_{n1} x ... x C_{nk}` and normalizes it to invariant
    /// factors `d1 | d2 | ... | dm`. Factors equal to 1 are dropped.
    pub fn new(input: &[i64]) -> Result<Self> {
        let mut pos = Vec::with_capacity(input.len());
        for &n in input {
            if n <= 0 {
                return Err(Error::InvalidFactor(n));
            }
            pos.push(n as u64);
        }
        let mut order: u64 = 1;
        for &n in &pos {
            order = order
                .checked_mul(n)
                .filter(|&o| o <= MAX_ORDER)
                .ok_or_else(|| cap_exceeded("group order", MAX_ORDER, "overflow"))?;
        }

        // (prime, power, input index) for every nontrivial p-part
        let mut parts: Vec<(u64, u64, usize)> = Vec::new();
        for (k, &n) in pos.iter().enumerate() {
            for (p, e) in prime_powers(n) {
                parts.push((p, p.pow(e), k));
            }
        }
        let mut primes: Vec<u64> = parts.iter().map(|t| t.0).collect();
        primes.sort_unstable();
        primes.dedup();
        let rank = primes
            .iter()
            .map(|&p| parts.iter().filter(|t| t.0 == p).count())
            .max()
            .unwrap_or(0);

        // slot[j] collects the p-parts of the j-th invariant factor counted from the largest
        let mut factors_desc = vec![1u64; rank];
        let mut placement: Vec<(usize, u64, usize)> = Vec::new(); // (input idx, q, slot from top)
        for &p in &primes {
            let mut ps: Vec<(u64, usize)> = parts
                .iter()
                .filter(|t| t.0 == p)
                .map(|t| (t.1, t.2))
                .collect();
            ps.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)));
            for (j, &(q, k)) in ps.iter().enumerate() {
                factors_desc[j] *= q;
                placement.push((k, q, j));
            }
        }
        let factors: Vec<u64> = factors_desc.iter().rev().copied().collect();
        let mut g = Self::from_invariant_factors(factors);
        g.input = pos.clone();

        // m[k][slot]: product of the p-parts of input k placed in that slot
        let mut m = vec![vec![1u64; rank]; pos.len()];
        for (k, q, j) in placement {
            m[k][rank - 1 - j] *= q;
        }
        let images = m
            .iter()
            .map(|row| {
                let c: Vec<u64> = row.iter().zip(&g.factors).map(|(&q, &d)| if q == 1 { 0 } else { d / q }).collect();
                g.index(&c)
            })
            .collect();
        g.input_images = images;
        Ok(g)
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        Self::new(&spec.factors)
    }

    fn from_invariant_factors(factors: Vec<u64>) -> Self {
        let k = factors.len();
        let mut strides = vec![1usize; k];
        for i in (0..k.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1] as usize;
        }
        let order = factors.iter().product::<u64>() as usize;
        let mut g = AbelianGroup {
            factors,
            strides,
            order,
            neg: Vec::new(),
            input: Vec::new(),
            input_images: Vec::new(),
        };
        g.neg = (0..order).map(|x| g.compute_neg(x)).collect();
        g.input = g.factors.clone();
        g.input_images = g.generators();
        g
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Cyclic factors of the presentation the group was built from.
    pub fn input_factors(&self) -> &[u64] {
        &self.input
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn identity(&self) -> Element {
        0
    }

    pub fn spec(&self) -> GroupSpec {
        GroupSpec {
            factors: self.factors.iter().map(|&d| d as i64).collect(),
        }
    }

    pub fn coords(&self, x: Element) -> Vec<u64> {
        self.factors
            .iter()
            .zip(&self.strides)
            .map(|(&d, &s)| ((x / s) as u64) % d)
            .collect()
    }

    pub fn index(&self, coords: &[u64]) -> Element {
        coords
            .iter()
            .zip(&self.factors)
            .zip(&self.strides)
            .map(|((&c, &d), &s)| (c % d) as usize * s)
            .sum()
    }

    pub fn add(&self, a: Element, b: Element) -> Element {
        let mut out = 0;
        for (&d, &s) in self.factors.iter().zip(&self.strides) {
            let d = d as usize;
            let ca = (a / s) % d;
            let cb = (b / s) % d;
            let c = ca + cb;
            out += if c >= d { c - d } else { c } * s;
        }
        out
    }

    fn compute_neg(&self, a: Element) -> Element {
        let mut out = 0;
        for (&d, &s) in self.factors.iter().zip(&self.strides) {
            let d = d as usize;
            let c = (a / s) % d;
            out += ((d - c) % d) * s;
        }
        out
    }

    pub fn neg(&self, a: Element) -> Element {
        self.neg[a]
    }

    pub fn sub(&self, a: Element, b: Element) -> Element {
        self.add(a, self.neg[b])
    }

    pub fn scale(&self, k: i64, a: Element) -> Element {
        let mut out = 0;
        for (&d, &s) in self.factors.iter().zip(&self.strides) {
            let c = ((a / s) as u64 % d) as i128;
            let v = (c * k as i128).rem_euclid(d as i128) as usize;
            out += v * s;
        }
        out
    }

    pub fn element_order(&self, a: Element) -> u64 {
        self.coords(a)
            .iter()
            .zip(&self.factors)
            .fold(1, |acc, (&c, &d)| lcm(acc, d / gcd(c, d)))
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.order
    }

    /// Standard generators, one per invariant factor.
    pub fn generators(&self) -> Vec<Element> {
        self.strides.clone()
    }

    /// Images of the generators of the input presentation.
    pub fn input_generators(&self) -> &[Element] {
        &self.input_images
    }

    /// Maps a tuple given in the input presentation to an element.
    pub fn from_input_coords(&self, coords: &[i64]) -> Result<Element> {
        if coords.len() != self.input_images.len() {
            return Err(Error::Domain(format!(
                "expected {} coordinates, got {}",
                self.input_images.len(),
                coords.len()
            )));
        }
        Ok(coords
            .iter()
            .zip(&self.input_images)
            .fold(0, |acc, (&c, &g)| self.add(acc, self.scale(c, g))))
    }

    pub fn format_element(&self, x: Element) -> String {
        let c: Vec<String> = self.coords(x).iter().map(|v| v.to_string()).collect();
        format!("({})", c.join(","))
    }

    pub fn empty_set(&self) -> ElementSet {
        FixedBitSet::with_capacity(self.order)
    }

    pub fn set_of(&self, elems: impl IntoIterator<Item = Element>) -> ElementSet {
        let mut s = self.empty_set();
        for x in elems {
            s.insert(x);
        }
        s
    }

    pub fn translate_set(&self, s: &ElementSet, u: Element) -> ElementSet {
        self.set_of(s.ones().map(|x| self.add(x, u)))
    }

    pub fn negate_set(&self, s: &ElementSet) -> ElementSet {
        self.set_of(s.ones().map(|x| self.neg[x]))
    }

    pub fn is_inverse_closed(&self, s: &ElementSet) -> bool {
        s.ones().all(|x| s.contains(self.neg[x]))
    }

    /// `I(G)`: elements with `2x = 0`, identity included.
    pub fn involutions(&self) -> ElementSet {
        self.set_of(self.elements().filter(|&x| self.neg[x] == x))
    }

    pub fn is_involution(&self, z: Element) -> bool {
        z != 0 && self.neg[z] == z
    }

    pub fn is_square(&self, z: Element) -> bool {
        self.elements().any(|x| self.add(x, x) == z)
    }

    /// `c(T) = (|T| + |I(T)|)/2` for an inverse-closed `T`.
    pub fn c_value(&self, t: &ElementSet) -> Result<u32> {
        if !self.is_inverse_closed(t) {
            return Err(Error::NotInverseClosed);
        }
        let inv = t.ones().filter(|&x| self.neg[x] == x).count();
        Ok(((t.count_ones(..) + inv) / 2) as u32)
    }

    /// `c(G)`.
    pub fn c(&self) -> u32 {
        let inv = self.elements().filter(|&x| self.neg[x] == x).count();
        ((self.order + inv) / 2) as u32
    }

    /// Number of inverse-closed subsets of the whole group, `2^{c(G)}`.
    pub fn count_inverse_closed(&self) -> BigUint {
        BigUint::from(1u8) << self.c()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "C1");
        }
        write!(f, "{}", self.spec())
    }
}

/// All abelian groups of order `n`, one per isomorphism type.
pub fn abelian_groups_of_order(n: u64) -> Vec<AbelianGroup> {
    fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in (1..=n.min(max)).rev() {
            for mut rest in partitions(n - first, first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    if n == 0 {
        return Vec::new();
    }
    let mut acc: Vec<Vec<i64>> = vec![vec![]];
    for (p, e) in prime_powers(n) {
        let mut next = Vec::new();
        for a in &acc {
            for part in partitions(e, e) {
                let mut f = a.clone();
                f.extend(part.iter().map(|&k| p.pow(k) as i64));
                next.push(f);
            }
        }
        acc = next;
    }
    let mut groups: Vec<AbelianGroup> = acc
        .iter()
        .map(|f| AbelianGroup::new(f).expect("valid factors"))
        .collect();
    groups.sort_by(|a, b| a.factors.cmp(&b.factors));
    groups
}

pub fn abelian_groups_up_to(n: u64) -> Vec<AbelianGroup> {
    (1..=n).flat_map(abelian_groups_of_order).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    members: ElementSet,
    generators: Vec<Element>,
}

impl Subgroup {
    pub fn generated_by(g: &AbelianGroup, gens: &[Element]) -> Self {
        let mut members = g.empty_set();
        members.insert(0);
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = g.add(x, s);
                if !members.contains(y) {
                    members.insert(y);
                    queue.push_back(y);
                }
            }
        }
        Subgroup {
            members,
            generators: gens.to_vec(),
        }
    }

    pub fn trivial(g: &AbelianGroup) -> Self {
        Self::generated_by(g, &[])
    }

    pub fn whole(g: &AbelianGroup) -> Self {
        Self::generated_by(g, &g.generators())
    }

    /// Accepts a member set; fails unless it is a subgroup.
    pub fn from_members(g: &AbelianGroup, members: ElementSet) -> Result<Self> {
        if !members.contains(0) || members.ones().any(|a| members.ones().any(|b| !members.contains(g.sub(a, b)))) {
            return Err(Error::Precondition("set is not a subgroup".into()));
        }
        let mut gens = Vec::new();
        let mut span = Subgroup::trivial(g);
        for x in members.ones() {
            if !span.contains(x) {
                gens.push(x);
                span = Subgroup::generated_by(g, &gens);
            }
        }
        Ok(Subgroup {
            members,
            generators: gens,
        })
    }

    pub fn members(&self) -> &ElementSet {
        &self.members
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn contains(&self, x: Element) -> bool {
        self.members.contains(x)
    }

    /// Cosets `x + H`, listed by smallest representative.
    pub fn cosets(&self, g: &AbelianGroup) -> Vec<ElementSet> {
        let mut seen = g.empty_set();
        let mut out = Vec::new();
        for x in g.elements() {
            if seen.contains(x) {
                continue;
            }
            let c = g.translate_set(&self.members, x);
            seen.union_with(&c);
            out.push(c);
        }
        out
    }
}

/// Every subgroup of `g`, each listed once, sorted by order then members.
pub fn subgroups(g: &AbelianGroup, caps: &Caps) -> Result<Vec<Subgroup>> {
    if g.order() > caps.group_order {
        return Err(cap_exceeded("subgroup enumeration: group order", caps.group_order as u64, g.order()));
    }
    let mut seen: HashSet<ElementSet> = HashSet::new();
    let mut out = Vec::new();
    let triv = Subgroup::trivial(g);
    seen.insert(triv.members.clone());
    let mut queue = VecDeque::from([triv]);
    while let Some(h) = queue.pop_front() {
        let mut covered = h.members.clone();
        for x in g.elements() {
            if covered.contains(x) {
                continue;
            }
            let mut gens = h.generators.clone();
            gens.push(x);
            let k = Subgroup::generated_by(g, &gens);
            covered.union_with(&g.translate_set(&h.members, x));
            if seen.insert(k.members.clone()) {
                if seen.len() > caps.listing {
                    return Err(cap_exceeded("subgroup listing", caps.listing as u64, seen.len()));
                }
                queue.push_back(k);
            }
        }
        out.push(h);
    }
    out.sort_by(|a, b| {
        a.order()
            .cmp(&b.order())
            .then_with(|| a.members.ones().cmp(b.members.ones()))
    });
    Ok(out)
}

/// An automorphism stored as its full table and inverse table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupAutomorphism {
    map: Vec<Element>,
    inv: Vec<Element>,
}

impl GroupAutomorphism {
    pub fn identity(g: &AbelianGroup) -> Self {
        let map: Vec<Element> = g.elements().collect();
        GroupAutomorphism {
            inv: map.clone(),
            map,
        }
    }

    /// `x -> -x`.
    pub fn negation(g: &AbelianGroup) -> Self {
        GroupAutomorphism {
            map: g.neg.clone(),
            inv: g.neg.clone(),
        }
    }

    /// Multiplication by a unit `k` of `Z/exp`.
    pub fn scalar(g: &AbelianGroup, k: i64) -> Result<Self> {
        if gcd(k.rem_euclid(g.exponent() as i64) as u64, g.exponent()) != 1 {
            return Err(Error::Domain(format!("{k} is not a unit mod {}", g.exponent())));
        }
        Self::from_generator_images(g, &g.generators().iter().map(|&e| g.scale(k, e)).collect::<Vec<_>>())
    }

    /// The homomorphism sending the standard generators to `images`,
    /// rejected unless it is bijective.
    pub fn from_generator_images(g: &AbelianGroup, images: &[Element]) -> Result<Self> {
        if images.len() != g.rank() {
            return Err(Error::Domain("wrong number of generator images".into()));
        }
        for (&y, &d) in images.iter().zip(g.factors()) {
            if g.scale(d as i64, y) != 0 {
                return Err(Error::Domain("generator image order does not divide factor".into()));
            }
        }
        let map = extend_linear(g, images);
        let mut inv = vec![usize::MAX; g.order()];
        for (x, &y) in map.iter().enumerate() {
            if inv[y] != usize::MAX {
                return Err(Error::Domain("generator images do not give a bijection".into()));
            }
            inv[y] = x;
        }
        Ok(GroupAutomorphism { map, inv })
    }

    pub fn apply(&self, x: Element) -> Element {
        self.map[x]
    }

    pub fn apply_inverse(&self, x: Element) -> Element {
        self.inv[x]
    }

    pub fn table(&self) -> &[Element] {
        &self.map
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &GroupAutomorphism) -> Self {
        let map: Vec<Element> = self.map.iter().map(|&y| other.map[y]).collect();
        let inv: Vec<Element> = other.inv.iter().map(|&y| self.inv[y]).collect();
        GroupAutomorphism { map, inv }
    }

    pub fn inverse(&self) -> Self {
        GroupAutomorphism {
            map: self.inv.clone(),
            inv: self.map.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &y)| i == y)
    }

    pub fn image_of_set(&self, g: &AbelianGroup, s: &ElementSet) -> ElementSet {
        g.set_of(s.ones().map(|x| self.map[x]))
    }
}

fn extend_linear(g: &AbelianGroup, images: &[Element]) -> Vec<Element> {
    let mut map = vec![0; g.order()];
    // walk elements in index order; x = prev + e_i for the last nonzero coordinate
    for x in 1..g.order() {
        let c = g.coords(x);
        let i = c.iter().rposition(|&v| v != 0).expect("nonzero");
        let prev = x - g.strides[i];
        map[x] = g.add(map[prev], images[i]);
    }
    map
}

/// `Aut(G)`, enumerated by backtracking over generator images.
pub fn automorphisms(g: &AbelianGroup, caps: &Caps) -> Result<Vec<GroupAutomorphism>> {
    if g.order() > caps.group_order {
        return Err(cap_exceeded("automorphism enumeration: group order", caps.group_order as u64, g.order()));
    }
    let k = g.rank();
    let mut by_order: Vec<Vec<Element>> = Vec::with_capacity(k);
    for &d in g.factors() {
        by_order.push(g.elements().filter(|&y| g.element_order(y) == d).collect());
    }
    let mut out = Vec::new();
    let mut images = Vec::with_capacity(k);
    let span = Subgroup::trivial(g).members;
    extend_aut(g, &by_order, &mut images, &span, &mut out, caps)?;
    Ok(out)
}

fn extend_aut(
    g: &AbelianGroup,
    by_order: &[Vec<Element>],
    images: &mut Vec<Element>,
    span: &ElementSet,
    out: &mut Vec<GroupAutomorphism>,
    caps: &Caps,
) -> Result<()> {
    let i = images.len();
    if i == g.rank() {
        if out.len() >= caps.listing {
            return Err(cap_exceeded("automorphism listing", caps.listing as u64, "more"));
        }
        out.push(GroupAutomorphism::from_generator_images(g, images)?);
        return Ok(());
    }
    let d = g.factors()[i];
    for &y in &by_order[i] {
        // <y> must meet the span trivially
        let mut t = y;
        let mut ok = true;
        for _ in 1..d {
            if span.contains(t) {
                ok = false;
                break;
            }
            t = g.add(t, y);
        }
        if !ok {
            continue;
        }
        let mut next = span.clone();
        let mut t = y;
        for _ in 1..d {
            for x in span.ones() {
                next.insert(g.add(x, t));
            }
            t = g.add(t, y);
        }
        images.push(y);
        extend_aut(g, by_order, images, &next, out, caps)?;
        images.pop();
    }
    Ok(())
}

/// An element of `Hol(G)` acting by `x -> twist(x + translation)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HolomorphElement {
    pub translation: Element,
    pub twist: Arc<GroupAutomorphism>,
}

impl HolomorphElement {
    pub fn new(translation: Element, twist: GroupAutomorphism) -> Self {
        HolomorphElement {
            translation,
            twist: Arc::new(twist),
        }
    }

    pub fn apply(&self, g: &AbelianGroup, x: Element) -> Element {
        self.twist.apply(g.add(x, self.translation))
    }

    /// `self` first, then `other`.
    pub fn then(&self, g: &AbelianGroup, other: &HolomorphElement) -> HolomorphElement {
        let t = g.add(self.translation, self.twist.apply_inverse(other.translation));
        HolomorphElement {
            translation: t,
            twist: Arc::new(self.twist.then(&other.twist)),
        }
    }

    pub fn image_of_set(&self, g: &AbelianGroup, s: &ElementSet) -> ElementSet {
        g.set_of(s.ones().map(|x| self.apply(g, x)))
    }
}

/// `Hol(G)` with translations varying fastest.
pub fn holomorph(g: &AbelianGroup, caps: &Caps) -> Result<Vec<HolomorphElement>> {
    let auts = automorphisms(g, caps)?;
    let n = auts.len().saturating_mul(g.order());
    if n > caps.listing {
        return Err(cap_exceeded("holomorph listing", caps.listing as u64, n));
    }
    let mut out = Vec::with_capacity(n);
    for a in auts {
        let a = Arc::new(a);
        for t in g.elements() {
            out.push(HolomorphElement {
                translation: t,
                twist: a.clone(),
            });
        }
    }
    Ok(out)
}

/// `{x : x^α = x}`.
pub fn fixed_points(g: &AbelianGroup, alpha: &HolomorphElement) -> ElementSet {
    g.set_of(g.elements().filter(|&x| alpha.apply(g, x) == x))
}

pub fn automorphism_fixed_points(g: &AbelianGroup, tau: &GroupAutomorphism) -> ElementSet {
    g.set_of(g.elements().filter(|&x| tau.apply(x) == x))
}

/// Whether `set` is a coset `x + H` of the subgroup with members `h`.
pub fn is_coset_of(g: &AbelianGroup, set: &ElementSet, h: &ElementSet) -> bool {
    match set.ones().next() {
        None => false,
        Some(x) => g.translate_set(h, x) == *set,
    }
}

/// Count of inverse-closed sets fixed by translation by an involution `z`,
/// next to the closed-form value `2^{r/4 + |I(G)|/2}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilizedCount {
    #[serde(serialize_with = "crate::bigser::serialize")]
    pub brute: BigUint,
    /// `4 * log2(brute)`.
    pub brute_exponent_quarters: u64,
    /// `4 * (r/4 + |I(G)|/2) = r + 2|I(G)|`.
    pub formula_exponent_quarters: u64,
    pub z_is_square: bool,
}

impl StabilizedCount {
    pub fn matches_formula(&self) -> bool {
        self.brute_exponent_quarters == self.formula_exponent_quarters
    }

    /// The closed form, when it is an integer.
    pub fn formula(&self) -> Option<BigUint> {
        self.formula_exponent_quarters.is_multiple_of(4)
            .then(|| BigUint::from(1u8) << (self.formula_exponent_quarters / 4))
    }
}

/// Brute force over all subsets; limited to order 24.
pub fn stabilized_count(g: &AbelianGroup, z: Element) -> Result<StabilizedCount> {
    if !g.is_involution(z) {
        return Err(Error::NotInvolution);
    }
    let r = g.order();
    if r > 24 {
        return Err(cap_exceeded("stabilized_count brute force: group order", 24, r));
    }
    let neg: Vec<u32> = (0..r).map(|x| g.neg(x) as u32).collect();
    let shift: Vec<u32> = (0..r).map(|x| g.add(x, z) as u32).collect();
    let mut count: u64 = 0;
    for mask in 0u64..(1u64 << r) {
        let ok = (0..r).all(|x| {
            if mask >> x & 1 == 0 {
                return true;
            }
            mask >> neg[x] & 1 == 1 && mask >> shift[x] & 1 == 1
        });
        if ok {
            count += 1;
        }
    }
    let m = 63 - count.leading_zeros() as u64;
    debug_assert_eq!(1u64 << m, count);
    let inv = g.involutions().count_ones(..) as u64;
    Ok(StabilizedCount {
        brute: BigUint::from(count),
        brute_exponent_quarters: 4 * m,
        formula_exponent_quarters: r as u64 + 2 * inv,
        z_is_square: g.is_square(z),
    })
}
