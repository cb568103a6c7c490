//! Stability verdicts for Cayley graphs of abelian groups and the
//! `S1 ⊇ S2`, `S3`, `S3'`, `S4`, `S5` membership tests.

use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use serde::Serialize;

use crate::autgrp::automorphism_group;
use crate::caps::Caps;
use crate::census::InverseClosedSets;
use crate::error::{Error, Result};
use crate::graph::{cayley_graph, cover_translation, double_cover, ConnectionSet};
use crate::group::{automorphisms, AbelianGroup, Element, ElementSet, GroupAutomorphism, Subgroup};
use crate::perm::{normalizer_bounded, Permutation, PermutationGroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    Yes,
    No,
    Indeterminate,
}

impl Tri {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Tri::Yes
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Tri::Yes => "yes",
            Tri::No => "no",
            Tri::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrivialReason {
    Disconnected,
    BipartiteWithNontrivialAut,
    Twins,
}

impl TrivialReason {
    pub fn as_str(self) -> &'static str {
        match self {
            TrivialReason::Disconnected => "disconnected",
            TrivialReason::BipartiteWithNontrivialAut => "bipartite-with-nontrivial-aut",
            TrivialReason::Twins => "twins",
        }
    }
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::bigser::serialize(v, s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityRecord {
    pub group: String,
    pub set: Vec<Element>,
    pub set_hex: String,
    #[serde(serialize_with = "ser_big")]
    pub aut_order: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub cover_aut_order: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub b_order: BigUint,
    pub connected: bool,
    pub bipartite: bool,
    pub twin_free: bool,
    pub stable: bool,
    /// `Aut(D(Γ)) = (R(G) ⋊ <ι>) × C2`.
    pub good: bool,
    pub in_s1: bool,
    pub in_s2: bool,
    /// Set for exponent-2 groups, where `ι` is trivial and the `S2` target is `|B| = r`.
    pub exponent_two: bool,
    pub in_s3: Tri,
    pub in_s3prime: bool,
    pub in_s4: Tri,
    pub in_s5: Tri,
    pub trivial_instability_reasons: Vec<TrivialReason>,
}

impl StabilityRecord {
    pub fn nontrivially_unstable(&self) -> bool {
        !self.stable && self.trivial_instability_reasons.is_empty()
    }

    pub fn has_indeterminate(&self) -> bool {
        [self.in_s3, self.in_s4, self.in_s5].contains(&Tri::Indeterminate)
    }

    pub const CSV_HEADER: [&'static str; 18] = [
        "group",
        "set_hex",
        "aut_order",
        "cover_aut_order",
        "b_order",
        "connected",
        "bipartite",
        "twin_free",
        "stable",
        "good",
        "in_s1",
        "in_s2",
        "exponent_two",
        "in_s3prime",
        "reasons",
        "in_s3",
        "in_s4",
        "in_s5",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        let reasons: Vec<&str> = self.trivial_instability_reasons.iter().map(|r| r.as_str()).collect();
        vec![
            self.group.clone(),
            self.set_hex.clone(),
            self.aut_order.to_string(),
            self.cover_aut_order.to_string(),
            self.b_order.to_string(),
            self.connected.to_string(),
            self.bipartite.to_string(),
            self.twin_free.to_string(),
            self.stable.to_string(),
            self.good.to_string(),
            self.in_s1.to_string(),
            self.in_s2.to_string(),
            self.exponent_two.to_string(),
            self.in_s3prime.to_string(),
            reasons.join(";"),
            self.in_s3.as_str().to_string(),
            self.in_s4.as_str().to_string(),
            self.in_s5.as_str().to_string(),
        ]
    }
}

/// Per-group data reused across many connection sets.
#[derive(Debug, Clone)]
pub struct Classifier {
    group: AbelianGroup,
    caps: Caps,
    auts: Vec<GroupAutomorphism>,
    translations: Vec<Permutation>,
    iota: Permutation,
    r_group: PermutationGroup,
    n0_order: usize,
}

/// `ι` on the double cover.
pub fn cover_negation(g: &AbelianGroup) -> Permutation {
    let r = g.order();
    let im: Vec<usize> = (0..2 * r).map(|v| if v < r { g.neg(v) } else { r + g.neg(v - r) }).collect();
    Permutation::from_images(im).expect("negation is a bijection")
}

impl Classifier {
    pub fn new(group: &AbelianGroup, caps: &Caps) -> Result<Self> {
        let r = group.order();
        if 2 * r > caps.graph_vertices {
            return Err(crate::error::cap_exceeded("double cover vertices", caps.graph_vertices as u64, 2 * r));
        }
        let auts = automorphisms(group, caps)?;
        let translations: Vec<Permutation> = group.generators().iter().map(|&e| cover_translation(group, e)).collect();
        let iota = cover_negation(group);
        let r_group = PermutationGroup::new(2 * r, &translations)?;
        let n0_order = if group.exponent() > 2 { 2 * r } else { r };
        Ok(Classifier {
            group: group.clone(),
            caps: *caps,
            auts,
            translations,
            iota,
            r_group,
            n0_order,
        })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    /// `|R(G) ⋊ <ι>|`.
    pub fn n0_order(&self) -> usize {
        self.n0_order
    }

    pub fn automorphisms(&self) -> &[GroupAutomorphism] {
        &self.auts
    }

    /// `R(G)` acting diagonally on the cover.
    pub fn regular_group(&self) -> &PermutationGroup {
        &self.r_group
    }

    /// `B(S)`: automorphisms of the cover fixing `G+` setwise.
    pub fn b_group(&self, s: &ConnectionSet) -> Result<PermutationGroup> {
        let cover = double_cover(&cayley_graph(&self.group, s));
        self.b_group_of_cover(&cover)
    }

    fn b_group_of_cover(&self, cover: &crate::graph::LabeledGraph) -> Result<PermutationGroup> {
        let r = self.group.order();
        let blocks = vec![(0..r).collect::<Vec<_>>(), (r..2 * r).collect()];
        let b = automorphism_group(cover, Some(&blocks), &self.caps)?;
        if !self.translations.iter().all(|t| b.contains(t)) || !b.contains(&self.iota) {
            return Err(Error::Invariant("R(G) or ι missing from B(S)".into()));
        }
        Ok(b)
    }

    pub fn classify(&self, s: &ConnectionSet) -> Result<StabilityRecord> {
        let g = &self.group;
        let gamma = cayley_graph(g, s);
        let connected = gamma.is_connected();
        let bipartite = gamma.is_bipartite();
        let twin_free = gamma.is_twin_free();
        let aut = automorphism_group(&gamma, None, &self.caps)?;
        let cover = double_cover(&gamma);
        let a = automorphism_group(&cover, None, &self.caps)?;
        let b = self.b_group_of_cover(&cover)?;
        let aut_order = aut.order();
        let cover_aut_order = a.order();
        let b_order = b.order();
        let stable = cover_aut_order == &aut_order * 2u32;
        let good = cover_aut_order == BigUint::from(2 * self.n0_order);

        let mut reasons = Vec::new();
        if !connected {
            reasons.push(TrivialReason::Disconnected);
        }
        if bipartite && aut_order > BigUint::from(1u32) {
            reasons.push(TrivialReason::BipartiteWithNontrivialAut);
        }
        if !twin_free {
            reasons.push(TrivialReason::Twins);
        }

        let in_s1 = connected && !bipartite && twin_free;
        let in_s2 = in_s1 && b_order == BigUint::from(self.n0_order);
        let in_s3 = if in_s1 && !in_s2 { self.s3_normalizer(s, &b)? } else { Tri::No };
        let in_s3prime = in_s1 && self.s3prime_raw(s);
        let (in_s4, in_s5) = if in_s1 && !in_s2 {
            self.s4_s5(&b)?
        } else {
            (Tri::No, Tri::No)
        };
        Ok(StabilityRecord {
            group: g.to_string(),
            set: s.elements(),
            set_hex: s.to_hex(),
            aut_order,
            cover_aut_order,
            b_order,
            connected,
            bipartite,
            twin_free,
            stable,
            good,
            in_s1,
            in_s2,
            exponent_two: g.exponent() <= 2,
            in_s3,
            in_s3prime,
            in_s4,
            in_s5,
            trivial_instability_reasons: reasons,
        })
    }

    /// Whether `Nor_B(R(G))` is strictly larger than `R(G) ⋊ <ι>`.
    ///
    /// Filters the elements of `B` when it is small enough; otherwise tests
    /// the maps `v+ -> τ(v)+`, `v- -> (τ(v)+c)-` for membership in `B`.
    pub fn s3_normalizer(&self, _s: &ConnectionSet, b: &PermutationGroup) -> Result<Tri> {
        if b.order() <= BigUint::from(self.caps.perm_elements) {
            let nor = normalizer_bounded(b, &self.r_group, &self.caps)?;
            return Ok(Tri::from_bool(nor.order() > BigUint::from(self.n0_order)));
        }
        let count = self.normalizer_twists_in(b);
        Ok(Tri::from_bool(count * self.group.order() > self.n0_order))
    }

    /// Number of pairs `(c, τ)` whose cover map lies in `b`.
    pub fn normalizer_twists_in(&self, b: &PermutationGroup) -> usize {
        let g = &self.group;
        let r = g.order();
        let mut count = 0;
        for tau in &self.auts {
            for c in g.elements() {
                let im: Vec<u32> = (0..2 * r)
                    .map(|v| {
                        if v < r {
                            tau.apply(v) as u32
                        } else {
                            (r + g.add(tau.apply(v - r), c)) as u32
                        }
                    })
                    .collect();
                if b.contains(&Permutation::from_images_u32(im)) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Some `x -> τ(x + t)` other than the identity and `ι` maps `S` onto itself.
    pub fn s3prime_raw(&self, s: &ConnectionSet) -> bool {
        let g = &self.group;
        let elems = s.elements();
        for tau in &self.auts {
            let trivial_twist = tau.is_identity() || (0..g.order()).all(|x| tau.apply(x) == g.neg(x));
            for t in g.elements() {
                if t == 0 && trivial_twist {
                    continue;
                }
                if elems.iter().all(|&x| s.contains(tau.apply(g.add(x, t)))) {
                    return true;
                }
            }
        }
        false
    }

    /// `S4`/`S5` witnesses among the groups `<R(G), b>` for `b ∈ B`.
    ///
    /// Both witnesses are generated by `R(G)` and one more element, and a
    /// subgroup strictly between `R(G)` and `X` contains such a group, so
    /// the scan decides both memberships once `B` is enumerable.
    pub fn s4_s5(&self, b: &PermutationGroup) -> Result<(Tri, Tri)> {
        if b.order() > BigUint::from(self.caps.perm_elements) {
            return Ok((Tri::Indeterminate, Tri::Indeterminate));
        }
        let r = self.group.order();
        let elems = b.elements(self.caps.perm_elements)?;
        let m = elems.len();
        let index: HashMap<&Permutation, usize> = elems.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let r_elems = self.r_group.elements(self.caps.perm_elements)?;
        let r_idx: Vec<usize> = r_elems.iter().map(|p| index[p]).collect();
        let mut r_set = FixedBitSet::with_capacity(m);
        for &i in &r_idx {
            r_set.insert(i);
        }
        let n0 = PermutationGroup::new(2 * r, &[self.translations.clone(), vec![self.iota.clone()]].concat())?;
        let mut n0_set = FixedBitSet::with_capacity(m);
        for p in n0.elements(self.caps.perm_elements)? {
            n0_set.insert(index[&p]);
        }

        let mut family: Vec<FixedBitSet> = Vec::new();
        let mut seen: HashSet<FixedBitSet> = HashSet::new();
        let mut covered = r_set.clone();
        for i in 0..m {
            if covered.contains(i) {
                continue;
            }
            let x = closure(&elems, &index, &r_set, &self.translations, &elems[i]);
            // generators of the same group over R: the double coset R b R
            for &a in &r_idx {
                let ab = elems[a].then(&elems[i]);
                for &c in &r_idx {
                    covered.insert(index[&ab.then(&elems[c])]);
                }
            }
            if seen.insert(x.clone()) {
                family.push(x);
            }
        }
        family.sort_by_key(|x| x.count_ones(..));

        let gens_r = &self.translations;
        let normalizer_in = |x: &FixedBitSet| -> FixedBitSet {
            let mut out = FixedBitSet::with_capacity(m);
            for k in x.ones() {
                if gens_r.iter().all(|t| r_set.contains(index[&t.conjugate_by(&elems[k])])) {
                    out.insert(k);
                }
            }
            out
        };
        let mut s4 = false;
        let mut s5 = false;
        for x in &family {
            let between: Vec<&FixedBitSet> = family
                .iter()
                .filter(|y| y.count_ones(..) < x.count_ones(..) && y.is_subset(x))
                .collect();
            let nor = normalizer_in(x);
            if between.is_empty() && nor == r_set {
                s4 = true;
            }
            if self.n0_order > r
                && x.count_ones(..) > self.n0_order
                && nor == n0_set
                && between.len() == 1
                && *between[0] == n0_set
            {
                s5 = true;
            }
            if s4 && s5 {
                break;
            }
        }
        Ok((Tri::from_bool(s4), Tri::from_bool(s5)))
    }
}

fn closure(
    elems: &[Permutation],
    index: &HashMap<&Permutation, usize>,
    r_set: &FixedBitSet,
    r_gens: &[Permutation],
    b: &Permutation,
) -> FixedBitSet {
    let mut set = r_set.clone();
    let mut queue: Vec<usize> = r_set.ones().collect();
    let mut k = 0;
    while k < queue.len() {
        let x = &elems[queue[k]];
        for s in r_gens.iter().chain(std::iter::once(b)) {
            let y = index[&x.then(s)];
            if !set.contains(y) {
                set.insert(y);
                queue.push(y);
            }
        }
        k += 1;
    }
    set
}

pub fn b_group(g: &AbelianGroup, s: &ConnectionSet, caps: &Caps) -> Result<PermutationGroup> {
    Classifier::new(g, caps)?.b_group(s)
}

pub fn classify(g: &AbelianGroup, s: &ConnectionSet, caps: &Caps) -> Result<StabilityRecord> {
    Classifier::new(g, caps)?.classify(s)
}

pub fn s3prime_membership(g: &AbelianGroup, s: &ConnectionSet, caps: &Caps) -> Result<bool> {
    Ok(Classifier::new(g, caps)?.s3prime_raw(s))
}

pub fn s4_s5_membership(g: &AbelianGroup, b: &PermutationGroup, caps: &Caps) -> Result<(Tri, Tri)> {
    Classifier::new(g, caps)?.s4_s5(b)
}

/// A subgroup `N` with cyclic quotient of order `b` and the labeling
/// `O_j = N + γ_j`.
#[derive(Debug, Clone)]
pub struct SigmaContext {
    group: AbelianGroup,
    subgroup: Subgroup,
    b: usize,
    gammas: Vec<Element>,
    label: Vec<usize>,
}

impl SigmaContext {
    pub fn new(g: &AbelianGroup, n: &Subgroup) -> Result<Self> {
        let r = g.order();
        if !r.is_multiple_of(n.order()) {
            return Err(Error::Precondition("not a subgroup of this group".into()));
        }
        let b = r / n.order();
        if b < 2 {
            return Err(Error::Precondition("quotient must have order at least 2".into()));
        }
        let quotient_order = |x: Element| {
            let mut k = 1;
            let mut y = x;
            while !n.contains(y) {
                y = g.add(y, x);
                k += 1;
            }
            k
        };
        let gen = g
            .elements()
            .find(|&x| quotient_order(x) == b)
            .ok_or_else(|| Error::Precondition("quotient is not cyclic".into()))?;
        let mut gammas = Vec::with_capacity(b);
        let mut label = vec![usize::MAX; r];
        let mut t = 0;
        for i in 0..b {
            let coset = g.translate_set(n.members(), t);
            gammas.push(coset.ones().next().expect("nonempty coset"));
            for x in coset.ones() {
                label[x] = i;
            }
            t = g.add(t, gen);
        }
        Ok(SigmaContext {
            group: g.clone(),
            subgroup: n.clone(),
            b,
            gammas,
            label,
        })
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn gammas(&self) -> &[Element] {
        &self.gammas
    }

    /// `j` with `x ∈ O_j`.
    pub fn label_of(&self, x: Element) -> usize {
        self.label[x]
    }

    pub fn coset(&self, j: usize) -> ElementSet {
        self.group.set_of(self.group.elements().filter(|&x| self.label[x] == j))
    }

    /// `S ∩ (S + u) ∩ O_j`.
    pub fn sigma(&self, s: &ElementSet, u: Element, j: usize) -> Result<ElementSet> {
        if j >= self.b {
            return Err(Error::Domain(format!("residue {j} out of range 0..{}", self.b)));
        }
        let g = &self.group;
        Ok(g.set_of(s.ones().filter(|&x| self.label[x] == j && s.contains(g.sub(x, u)))))
    }

    /// Counts inverse-closed `S` with `|σ(S,u,j)| = |σ(S,v,j)|` for every
    /// `j ∉ {0, i}`, against the bound `2^{c - 2b/25 + 1}`.
    pub fn psi_census(&self, i: usize, u: Element, v: Element, caps: &Caps) -> Result<PsiReport> {
        let g = &self.group;
        if i == 0 || i >= self.b {
            return Err(Error::Domain("i must be a nonzero residue".into()));
        }
        if u == v || self.label[u] != i || self.label[v] != i {
            return Err(Error::Precondition("u and v must be distinct elements of O_i".into()));
        }
        let sets = InverseClosedSets::new(g);
        let c = sets.c();
        if c > caps.exhaustive_c {
            return Err(crate::error::cap_exceeded("inverse-closed sets (log2)", caps.exhaustive_c as u64, c));
        }
        let js: Vec<usize> = (1..self.b).filter(|&j| j != i).collect();
        let mut count: u64 = 0;
        for k in 0..sets.len_u64() {
            let s = sets.bits(k);
            let mut ok = true;
            for &j in &js {
                let a = self.sigma(&s, u, j)?.count_ones(..);
                let bb = self.sigma(&s, v, j)?.count_ones(..);
                if a != bb {
                    ok = false;
                    break;
                }
            }
            if ok {
                count += 1;
            }
        }
        let b = self.b as u64;
        let exp25 = 25 * c as i64 - 2 * b as i64 + 25;
        let holds = if exp25 < 0 {
            count == 0
        } else {
            BigUint::from(count).pow(25) <= BigUint::from(1u8) << exp25 as u64
        };
        Ok(PsiReport {
            count,
            total: 1u64 << c,
            c,
            b: self.b,
            bound_log2: c as f64 - 2.0 * b as f64 / 25.0 + 1.0,
            vacuous: exp25 >= 25 * c as i64,
            holds,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiReport {
    pub count: u64,
    pub total: u64,
    pub c: u32,
    pub b: usize,
    /// `c - 2b/25 + 1`.
    pub bound_log2: f64,
    /// The bound is at least the number of sets.
    pub vacuous: bool,
    /// `count <= 2^{c - 2b/25 + 1}`, decided exactly.
    pub holds: bool,
}
