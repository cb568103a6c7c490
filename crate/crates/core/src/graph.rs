//! Loop-permitting simple graphs, Cayley graphs, the double cover and
//! bi-coset graphs.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::{AbelianGroup, Element, ElementSet};
use crate::perm::{Permutation, PermutationGroup};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledGraph {
    n: usize,
    adj: Vec<FixedBitSet>,
}

impl LabeledGraph {
    pub fn empty(n: usize) -> Self {
        LabeledGraph {
            n,
            adj: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Adds `u ~ v`; `u == v` adds a loop.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.adj[v].contains(v)
    }

    pub fn row(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].ones()
    }

    /// Loop counted once.
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    /// Edges `u <= v`, loops included.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in self.adj[u].ones().filter(|&v| v >= u) {
                out.push((u, v));
            }
        }
        out
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut k = 0;
            while k < comp.len() {
                let u = comp[k];
                for v in self.adj[u].ones() {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
                k += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// The empty graph on zero vertices counts as connected.
    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn is_bipartite(&self) -> bool {
        let mut side = vec![u8::MAX; self.n];
        for s in 0..self.n {
            if side[s] != u8::MAX {
                continue;
            }
            side[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for v in self.adj[u].ones() {
                    if side[v] == u8::MAX {
                        side[v] = 1 - side[u];
                        queue.push_back(v);
                    } else if side[v] == side[u] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Classes of identical adjacency rows, loops included, ordered by first vertex.
    pub fn twin_classes(&self) -> Vec<Vec<usize>> {
        let mut by_row: HashMap<&FixedBitSet, usize> = HashMap::new();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for v in 0..self.n {
            match by_row.get(&self.adj[v]) {
                Some(&k) => out[k].push(v),
                None => {
                    by_row.insert(&self.adj[v], out.len());
                    out.push(vec![v]);
                }
            }
        }
        out
    }

    pub fn is_twin_free(&self) -> bool {
        self.twin_classes().len() == self.n
    }

    /// `Γ^π`: vertex `v` becomes `π(v)`.
    pub fn relabel(&self, pi: &Permutation) -> LabeledGraph {
        let mut g = Self::empty(self.n);
        for (u, v) in self.edges() {
            g.add_edge(pi.apply(u), pi.apply(v));
        }
        g
    }

    pub fn is_automorphism(&self, pi: &Permutation) -> bool {
        (0..self.n).all(|u| {
            let pu = pi.apply(u);
            self.adj[u].count_ones(..) == self.adj[pu].count_ones(..) && self.adj[u].ones().all(|v| self.adj[pu].contains(pi.apply(v)))
        })
    }

    /// One line per vertex: `v: n1 n2 ...`.
    pub fn to_adjacency_text(&self) -> String {
        let mut s = String::new();
        for v in 0..self.n {
            let ns: Vec<String> = self.adj[v].ones().map(|u| u.to_string()).collect();
            let _ = writeln!(s, "{v}: {}", ns.join(" "));
        }
        s
    }

    /// graph6 encoding; `None` when the graph has loops.
    pub fn to_graph6(&self) -> Option<String> {
        if (0..self.n).any(|v| self.has_loop(v)) {
            return None;
        }
        let mut out = Vec::new();
        let n = self.n;
        if n < 63 {
            out.push(n as u8 + 63);
        } else if n < 258048 {
            out.push(126);
            for shift in [12, 6, 0] {
                out.push(((n >> shift) & 63) as u8 + 63);
            }
        } else {
            return None;
        }
        let mut acc = 0u8;
        let mut k = 0;
        for j in 1..n {
            for i in 0..j {
                acc = acc << 1 | self.has_edge(i, j) as u8;
                k += 1;
                if k == 6 {
                    out.push(acc + 63);
                    acc = 0;
                    k = 0;
                }
            }
        }
        if k > 0 {
            out.push((acc << (6 - k)) + 63);
        }
        Some(String::from_utf8(out).expect("ascii"))
    }
}

/// An inverse-closed subset of a group, identity allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConnectionSet {
    members: ElementSet,
}

impl ConnectionSet {
    pub fn new(g: &AbelianGroup, members: ElementSet) -> Result<Self> {
        if members.len() != g.order() {
            return Err(Error::Domain("set size does not match group order".into()));
        }
        if !g.is_inverse_closed(&members) {
            return Err(Error::NotInverseClosed);
        }
        Ok(ConnectionSet { members })
    }

    pub fn from_elements(g: &AbelianGroup, elems: &[Element]) -> Result<Self> {
        if let Some(&x) = elems.iter().find(|&&x| x >= g.order()) {
            return Err(Error::Domain(format!("element index {x} out of range")));
        }
        Self::new(g, g.set_of(elems.iter().copied()))
    }

    pub fn members(&self) -> &ElementSet {
        &self.members
    }

    pub fn contains(&self, x: Element) -> bool {
        self.members.contains(x)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn elements(&self) -> Vec<Element> {
        self.members.ones().collect()
    }

    /// Hex bitmask with element 0 as the least significant bit.
    pub fn to_hex(&self) -> String {
        let n = self.members.len();
        let digits = n.div_ceil(4).max(1);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut v = 0;
            for b in 0..4 {
                let i = d * 4 + b;
                if i < n && self.members.contains(i) {
                    v |= 1 << b;
                }
            }
            s.push(char::from_digit(v, 16).expect("hex digit"));
        }
        s
    }
}

/// `x ~ y` iff `y - x ∈ S`.
pub fn cayley_graph(g: &AbelianGroup, s: &ConnectionSet) -> LabeledGraph {
    let n = g.order();
    let mut gr = LabeledGraph::empty(n);
    let elems = s.elements();
    for x in 0..n {
        for &t in &elems {
            gr.adj[x].insert(g.add(x, t));
        }
    }
    gr
}

/// `Γ × K2` with `v+ = v` and `v- = n + v`.
pub fn double_cover(gr: &LabeledGraph) -> LabeledGraph {
    let n = gr.n;
    let mut d = LabeledGraph::empty(2 * n);
    for (u, v) in gr.edges() {
        d.add_edge(u, n + v);
        d.add_edge(v, n + u);
    }
    d
}

/// Data for `BiCos(X, H, K; D)`.
#[derive(Debug, Clone)]
pub struct BiCosetSpec {
    pub group: PermutationGroup,
    pub h: PermutationGroup,
    pub k: PermutationGroup,
    pub d: Vec<Permutation>,
}

struct Cosets {
    index: HashMap<Permutation, usize>,
    count: usize,
}

/// Right cosets `Hx`, numbered by increasing minimal member.
fn right_cosets(elems: &[Permutation], h: &[Permutation]) -> Cosets {
    let mut sorted = elems.to_vec();
    sorted.sort();
    let mut index = HashMap::new();
    let mut count = 0;
    for x in sorted {
        if index.contains_key(&x) {
            continue;
        }
        for y in h {
            index.insert(y.then(&x), count);
        }
        count += 1;
    }
    Cosets { index, count }
}

/// Vertices: the `H`-cosets, then the `K`-cosets. `Hx ~ Ky` iff `y x^-1 ∈ D`.
pub fn bicoset_graph(spec: &BiCosetSpec, caps: &Caps) -> Result<LabeledGraph> {
    let (graph, _, _) = bicoset_parts(spec, caps)?;
    Ok(graph)
}

fn bicoset_parts(spec: &BiCosetSpec, caps: &Caps) -> Result<(LabeledGraph, Cosets, Cosets)> {
    if !spec.h.is_subgroup_of(&spec.group) || !spec.k.is_subgroup_of(&spec.group) {
        return Err(Error::Precondition("H and K must be subgroups of X".into()));
    }
    let elems = spec.group.elements(caps.perm_elements)?;
    let he = spec.h.elements(caps.perm_elements)?;
    let ke = spec.k.elements(caps.perm_elements)?;
    let d: HashSet<Permutation> = spec.d.iter().cloned().collect();
    for x in &d {
        if !spec.group.contains(x) {
            return Err(Error::Precondition("D is not a subset of X".into()));
        }
        let closed = spec.k.generators().iter().all(|k| d.contains(&k.then(x)))
            && spec.h.generators().iter().all(|h| d.contains(&x.then(h)));
        if !closed {
            return Err(Error::Precondition("D is not a union of (K,H) double cosets".into()));
        }
    }
    let hc = right_cosets(&elems, &he);
    let kc = right_cosets(&elems, &ke);
    let mut hrep = vec![None; hc.count];
    for x in &elems {
        let i = hc.index[x];
        if hrep[i].is_none() {
            hrep[i] = Some(x.clone());
        }
    }
    let mut graph = LabeledGraph::empty(hc.count + kc.count);
    for x in hrep.iter().flatten() {
        let xi = x.inverse();
        let hx = hc.index[x];
        for y in &elems {
            // y x^-1, composing right to left in the right-action convention
            if d.contains(&y.then(&xi)) {
                graph.add_edge(hx, hc.count + kc.index[y]);
            }
        }
    }
    Ok((graph, hc, kc))
}

/// Outcome of rebuilding `D(Cay(G,S))` as a bi-coset graph of `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiCosetCheck {
    pub isomorphic: bool,
    pub inverse_symmetric: bool,
}

/// `R(g)` acting on the double cover.
pub fn cover_translation(g: &AbelianGroup, t: Element) -> Permutation {
    let r = g.order();
    let mut im = Vec::with_capacity(2 * r);
    for side in 0..2 {
        for v in 0..r {
            im.push(side * r + g.add(v, t));
        }
    }
    Permutation::from_images(im).expect("translation is a bijection")
}

/// Builds `BiCos(X, X_{0+}, X_{0-}; Y)` and checks the vertex map
/// `(0+)^x -> Hx`, `(0-)^x -> Kx` is an isomorphism onto `D(Cay(G,S))`.
/// Also checks `K R(g) H ⊆ Y` iff `K R(-g) H ⊆ Y` for every `g`.
pub fn verify_bicoset_isomorphism(
    g: &AbelianGroup,
    s: &ConnectionSet,
    x: &PermutationGroup,
    caps: &Caps,
) -> Result<BiCosetCheck> {
    let r = g.order();
    let cover = double_cover(&cayley_graph(g, s));
    if x.degree() != 2 * r {
        return Err(Error::Precondition("X must act on the 2r cover vertices".into()));
    }
    let mut orbits = x.orbits();
    orbits.iter_mut().for_each(|o| o.sort_unstable());
    let plus: Vec<usize> = (0..r).collect();
    let minus: Vec<usize> = (r..2 * r).collect();
    if orbits.len() != 2 || orbits[0] != plus || orbits[1] != minus {
        return Err(Error::Precondition("X must have orbits exactly G+ and G-".into()));
    }
    for gen in x.generators() {
        if !cover.is_automorphism(gen) {
            return Err(Error::Precondition("X is not a group of cover automorphisms".into()));
        }
    }
    let elems = x.elements(caps.perm_elements)?;
    let h_el: Vec<Permutation> = elems.iter().filter(|p| p.apply(0) == 0).cloned().collect();
    let k_el: Vec<Permutation> = elems.iter().filter(|p| p.apply(r) == r).cloned().collect();
    let y: Vec<Permutation> = elems.iter().filter(|p| cover.has_edge(0, p.apply(r))).cloned().collect();
    let spec = BiCosetSpec {
        group: x.clone(),
        h: PermutationGroup::from_elements(2 * r, &h_el)?,
        k: PermutationGroup::from_elements(2 * r, &k_el)?,
        d: y.clone(),
    };
    let (bic, hc, kc) = bicoset_parts(&spec, caps)?;

    let mut phi = vec![usize::MAX; 2 * r];
    for p in &elems {
        let a = p.apply(0);
        if phi[a] == usize::MAX {
            phi[a] = hc.index[p];
        }
        let b = p.apply(r);
        if phi[b] == usize::MAX {
            phi[b] = hc.count + kc.index[p];
        }
    }
    let image: HashSet<usize> = phi.iter().copied().collect();
    let mut isomorphic = bic.n() == 2 * r && image.len() == 2 * r;
    if isomorphic {
        'outer: for u in 0..2 * r {
            for v in 0..2 * r {
                if cover.has_edge(u, v) != bic.has_edge(phi[u], phi[v]) {
                    isomorphic = false;
                    break 'outer;
                }
            }
        }
    }

    // Y passed the double-coset closure test, so K t H ⊆ Y iff t ∈ Y.
    let yset: HashSet<Permutation> = y.into_iter().collect();
    let contained = |t: &Permutation| -> bool { yset.contains(t) };
    let inverse_symmetric = g
        .elements()
        .all(|e| contained(&cover_translation(g, e)) == contained(&cover_translation(g, g.neg(e))));
    Ok(BiCosetCheck {
        isomorphic,
        inverse_symmetric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: i64, s: &[usize]) -> (AbelianGroup, LabeledGraph) {
        let g = AbelianGroup::new(&[n]).unwrap();
        let cs = ConnectionSet::from_elements(&g, s).unwrap();
        let gr = cayley_graph(&g, &cs);
        (g, gr)
    }

    #[test]
    fn cayley_examples() {
        let (_, c4) = cyc(4, &[1, 3]);
        assert_eq!(c4.edges(), vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert!(c4.is_connected() && c4.is_bipartite());
        assert_eq!(c4.twin_classes(), vec![vec![0, 2], vec![1, 3]]);
        let (_, c5) = cyc(5, &[1, 4]);
        assert!(c5.is_connected() && !c5.is_bipartite() && c5.is_twin_free());
        let (_, e3) = cyc(3, &[]);
        assert!(!e3.is_connected() && e3.is_bipartite());
        assert_eq!(e3.twin_classes(), vec![vec![0, 1, 2]]);
        let (_, l) = cyc(3, &[0]);
        assert!(!l.is_bipartite());
        assert!(ConnectionSet::from_elements(&AbelianGroup::new(&[5]).unwrap(), &[1]).is_err());
    }

    #[test]
    fn double_cover_examples() {
        let one = LabeledGraph::empty(1);
        assert_eq!(double_cover(&one).edges(), vec![]);
        let mut lp = LabeledGraph::empty(1);
        lp.add_edge(0, 0);
        assert_eq!(double_cover(&lp).edges(), vec![(0, 1)]);
        let (_, c5) = cyc(5, &[1, 4]);
        let d = double_cover(&c5);
        assert!(d.is_connected() && d.is_bipartite());
        assert!((0..10).all(|v| d.degree(v) == 2));
    }

    #[test]
    fn graph6_small() {
        // K3 is "Bw", path on 3 vertices 0-1-2 is "Bg"
        let k3 = LabeledGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(k3.to_graph6().unwrap(), "Bw");
        let p3 = LabeledGraph::from_edges(3, &[(0, 1), (1, 2)]);
        assert_eq!(p3.to_graph6().unwrap(), "Bg");
        let mut l = LabeledGraph::empty(2);
        l.add_edge(1, 1);
        assert!(l.to_graph6().is_none());
        assert_eq!(k3.to_adjacency_text(), "0: 1 2\n1: 0 2\n2: 0 1\n");
    }

    #[test]
    fn hex_masks() {
        let g = AbelianGroup::new(&[5]).unwrap();
        let s = ConnectionSet::from_elements(&g, &[1, 4]).unwrap();
        assert_eq!(s.to_hex(), "12");
    }

    fn c2_as_perms() -> PermutationGroup {
        PermutationGroup::new(2, &[Permutation::from_cycles(2, &[&[0, 1]]).unwrap()]).unwrap()
    }

    #[test]
    fn bicoset_examples() {
        let caps = Caps::default();
        let x = c2_as_perms();
        let all = x.elements(10).unwrap();
        let triv = PermutationGroup::trivial(2);
        let full = BiCosetSpec {
            group: x.clone(),
            h: triv.clone(),
            k: triv.clone(),
            d: all.clone(),
        };
        let g = bicoset_graph(&full, &caps).unwrap();
        assert_eq!(g.edges().len(), 4);
        let matching = BiCosetSpec {
            d: vec![Permutation::identity(2)],
            ..full.clone()
        };
        let g = bicoset_graph(&matching, &caps).unwrap();
        assert_eq!(g.edges(), vec![(0, 2), (1, 3)]);
        let single = BiCosetSpec {
            group: x.clone(),
            h: x.clone(),
            k: x.clone(),
            d: all,
        };
        assert_eq!(bicoset_graph(&single, &caps).unwrap().edges(), vec![(0, 1)]);
        let bad = BiCosetSpec {
            group: x.clone(),
            h: x.clone(),
            k: triv,
            d: vec![Permutation::identity(2)],
        };
        assert!(matches!(bicoset_graph(&bad, &caps), Err(Error::Precondition(_))));
    }

    fn dihedral_on_cover(g: &AbelianGroup) -> PermutationGroup {
        let r = g.order();
        let mut gens: Vec<Permutation> = g.generators().iter().map(|&e| cover_translation(g, e)).collect();
        let mut iota = Vec::new();
        for side in 0..2 {
            for v in 0..r {
                iota.push(side * r + g.neg(v));
            }
        }
        gens.push(Permutation::from_images(iota).unwrap());
        PermutationGroup::new(2 * r, &gens).unwrap()
    }

    #[test]
    fn bicoset_isomorphism_examples() {
        let caps = Caps::default();
        for (n, s) in [(5, vec![1, 4]), (6, vec![1, 5])] {
            let g = AbelianGroup::new(&[n]).unwrap();
            let cs = ConnectionSet::from_elements(&g, &s).unwrap();
            let x = dihedral_on_cover(&g);
            let check = verify_bicoset_isomorphism(&g, &cs, &x, &caps).unwrap();
            assert!(check.isomorphic && check.inverse_symmetric);
        }
        let g = AbelianGroup::new(&[5]).unwrap();
        let cs = ConnectionSet::from_elements(&g, &[1, 4]).unwrap();
        let iota_only = PermutationGroup::new(10, &[dihedral_on_cover(&g).generators()[1].clone()]).unwrap();
        assert!(matches!(
            verify_bicoset_isomorphism(&g, &cs, &iota_only, &caps),
            Err(Error::Precondition(_))
        ));
    }
}
