//! Graph automorphism groups and canonical labeling by
//! individualization and equitable refinement.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, VecDeque};
use std::hash::{Hash, Hasher};

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::One;

use crate::caps::Caps;
use crate::error::{cap_exceeded, Error, Result};
use crate::graph::LabeledGraph;
use crate::perm::{orbit_of, orbits_of, Permutation, PermutationGroup};

/// A graph with an initial vertex coloring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    pub graph: LabeledGraph,
    pub colors: Vec<usize>,
}

impl ColoredGraph {
    pub fn uncolored(graph: LabeledGraph) -> Self {
        let colors = vec![0; graph.n()];
        ColoredGraph { graph, colors }
    }

    /// Vertices of block `i` get color `i + 1`, the rest color 0.
    pub fn with_blocks(graph: LabeledGraph, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut colors = vec![0; graph.n()];
        for (i, b) in blocks.iter().enumerate() {
            for &v in b {
                if v >= graph.n() || colors[v] != 0 {
                    return Err(Error::Domain("blocks must be disjoint vertex sets".into()));
                }
                colors[v] = i + 1;
            }
        }
        Ok(ColoredGraph { graph, colors })
    }
}

/// Canonical adjacency bytes and the relabeling that produces them.
///
/// Layout: vertex count as little-endian `u32`, then the `n*n` adjacency
/// bits of the relabeled graph row by row, most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalForm {
    pub bytes: Vec<u8>,
    pub relabeling: Permutation,
}

#[derive(Clone)]
struct Node {
    lab: Vec<usize>,
    /// Cell length at each cell start, 0 elsewhere.
    len_at: Vec<usize>,
    /// Start of the cell holding each vertex.
    cell_of: Vec<usize>,
    ncells: usize,
    trace: Vec<u64>,
    fixed: Vec<usize>,
}

impl Node {
    fn is_discrete(&self) -> bool {
        self.ncells == self.lab.len()
    }

    /// First largest nontrivial cell as `(start, len)`.
    fn target(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        let mut s = 0;
        while s < self.lab.len() {
            let l = self.len_at[s];
            if l > 1 && best.is_none_or(|b| l > b.1) {
                best = Some((s, l));
            }
            s += l;
        }
        best
    }
}

struct Refiner<'a> {
    g: &'a LabeledGraph,
    n: usize,
}

impl<'a> Refiner<'a> {
    fn root(&self, colors: &[usize]) -> Node {
        let n = self.n;
        let mut lab: Vec<usize> = (0..n).collect();
        lab.sort_by_key(|&v| (colors[v], self.g.has_loop(v), v));
        let mut len_at = vec![0; n];
        let mut cell_of = vec![0; n];
        let mut ncells = 0;
        let mut s = 0;
        let mut starts = Vec::new();
        let mut h = DefaultHasher::new();
        while s < n {
            let key = (colors[lab[s]], self.g.has_loop(lab[s]));
            let mut e = s + 1;
            while e < n && (colors[lab[e]], self.g.has_loop(lab[e])) == key {
                e += 1;
            }
            len_at[s] = e - s;
            for &v in &lab[s..e] {
                cell_of[v] = s;
            }
            (key, e - s).hash(&mut h);
            starts.push(s);
            ncells += 1;
            s = e;
        }
        let mut node = Node {
            lab,
            len_at,
            cell_of,
            ncells,
            trace: Vec::new(),
            fixed: Vec::new(),
        };
        let seed = h.finish();
        self.refine(&mut node, starts, seed);
        node
    }

    fn individualize(&self, parent: &Node, v: usize) -> Node {
        let mut node = parent.clone();
        let s = node.cell_of[v];
        let l = node.len_at[s];
        let pos = s + node.lab[s..s + l].iter().position(|&x| x == v).expect("vertex in its cell");
        node.lab.swap(s, pos);
        node.len_at[s] = 1;
        node.len_at[s + 1] = l - 1;
        for &x in &node.lab[s + 1..s + l] {
            node.cell_of[x] = s + 1;
        }
        node.ncells += 1;
        node.fixed.push(v);
        let mut h = DefaultHasher::new();
        (s, l).hash(&mut h);
        self.refine(&mut node, vec![s], h.finish());
        node
    }

    fn refine(&self, node: &mut Node, initial: Vec<usize>, seed: u64) {
        let n = self.n;
        let mut h = DefaultHasher::new();
        seed.hash(&mut h);
        let mut in_queue = vec![false; n];
        let mut queue = VecDeque::new();
        for s in initial {
            in_queue[s] = true;
            queue.push_back(s);
        }
        let mut count = vec![0u32; n];
        while let Some(w) = queue.pop_front() {
            in_queue[w] = false;
            if node.is_discrete() {
                break;
            }
            let wl = node.len_at[w];
            let mut touched: Vec<usize> = Vec::new();
            for &x in &node.lab[w..w + wl] {
                for u in self.g.row(x).ones() {
                    if count[u] == 0 {
                        touched.push(u);
                    }
                    count[u] += 1;
                }
            }
            let mut cells: Vec<usize> = touched.iter().map(|&u| node.cell_of[u]).collect();
            cells.sort_unstable();
            cells.dedup();
            for s in cells {
                let l = node.len_at[s];
                if l == 1 {
                    continue;
                }
                let seg = &mut node.lab[s..s + l];
                seg.sort_by_key(|&v| (count[v], v));
                let first = count[seg[0]];
                if count[seg[l - 1]] == first {
                    (w, s, first).hash(&mut h);
                    continue;
                }
                let mut frags: Vec<(usize, usize, u32)> = Vec::new();
                let mut a = 0;
                while a < l {
                    let c = count[seg[a]];
                    let mut b = a + 1;
                    while b < l && count[seg[b]] == c {
                        b += 1;
                    }
                    frags.push((s + a, b - a, c));
                    a = b;
                }
                (w, s, &frags).hash(&mut h);
                let was_queued = in_queue[s];
                let largest = frags
                    .iter()
                    .enumerate()
                    .max_by(|x, y| x.1 .1.cmp(&y.1 .1).then(y.0.cmp(&x.0)))
                    .map(|(i, _)| i)
                    .expect("fragments");
                for (i, &(fs, fl, _)) in frags.iter().enumerate() {
                    node.len_at[fs] = fl;
                    for k in fs..fs + fl {
                        node.cell_of[node.lab[k]] = fs;
                    }
                    if i > 0 {
                        node.ncells += 1;
                    }
                    let push = if was_queued { i > 0 } else { i != largest };
                    if push && !in_queue[fs] {
                        in_queue[fs] = true;
                        queue.push_back(fs);
                    }
                }
            }
            for u in touched {
                count[u] = 0;
            }
        }
        node.ncells.hash(&mut h);
        node.trace.push(h.finish());
    }
}

fn leaf_map(from: &Node, to: &Node) -> Permutation {
    let n = from.lab.len();
    let mut im = vec![0; n];
    for i in 0..n {
        im[from.lab[i]] = to.lab[i];
    }
    Permutation::from_images(im).expect("leaf labelings are bijections")
}

struct AutSearch<'a> {
    refiner: Refiner<'a>,
    path: Vec<Node>,
    gens: Vec<Permutation>,
}

impl<'a> AutSearch<'a> {
    fn new(cg: &'a ColoredGraph) -> Self {
        let refiner = Refiner {
            g: &cg.graph,
            n: cg.graph.n(),
        };
        let mut path = vec![refiner.root(&cg.colors)];
        while let Some((s, _)) = path.last().expect("root").target() {
            let node = path.last().expect("root");
            let v = node.lab[s];
            let child = refiner.individualize(node, v);
            path.push(child);
        }
        AutSearch {
            refiner,
            path,
            gens: Vec::new(),
        }
    }

    fn run(&mut self) -> BigUint {
        let n = self.refiner.n;
        let mut order = BigUint::one();
        for k in (0..self.path.len() - 1).rev() {
            let (s, l) = self.path[k].target().expect("internal node");
            let v = self.path[k + 1].fixed[k];
            let mut cell: Vec<usize> = self.path[k].lab[s..s + l].to_vec();
            cell.sort_unstable();
            for w in cell {
                if w == v {
                    continue;
                }
                let orbit = orbit_of(&self.gens, n, v);
                if orbit.contains(&w) {
                    continue;
                }
                let child = self.refiner.individualize(&self.path[k], w);
                if let Some(gamma) = self.find_equivalent(child, k + 1) {
                    self.gens.push(gamma);
                }
            }
            order *= BigUint::from(orbit_of(&self.gens, n, v).len());
        }
        order
    }

    fn find_equivalent(&self, node: Node, d: usize) -> Option<Permutation> {
        let reference = &self.path[d];
        if node.trace.last() != reference.trace.last() || node.ncells != reference.ncells {
            return None;
        }
        if node.is_discrete() {
            let gamma = leaf_map(self.path.last().expect("leaf"), &node);
            return self.refiner.g.is_automorphism(&gamma).then_some(gamma);
        }
        let (s, l) = node.target()?;
        if reference.target() != Some((s, l)) {
            return None;
        }
        let fixing: Vec<Permutation> = self
            .gens
            .iter()
            .filter(|g| node.fixed.iter().all(|&p| g.apply(p) == p))
            .cloned()
            .collect();
        let mut cell: Vec<usize> = node.lab[s..s + l].to_vec();
        cell.sort_unstable();
        let mut done = FixedBitSet::with_capacity(self.refiner.n);
        for w in cell {
            if done.contains(w) {
                continue;
            }
            for p in orbit_of(&fixing, self.refiner.n, w) {
                done.insert(p);
            }
            let child = self.refiner.individualize(&node, w);
            if let Some(gamma) = self.find_equivalent(child, d + 1) {
                return Some(gamma);
            }
        }
        None
    }
}

fn check_size(g: &LabeledGraph, caps: &Caps) -> Result<()> {
    if g.n() > caps.graph_vertices {
        return Err(cap_exceeded("graph vertices", caps.graph_vertices as u64, g.n()));
    }
    Ok(())
}

/// Automorphisms preserving every block in `fixed_blocks` setwise.
pub fn automorphism_group(g: &LabeledGraph, fixed_blocks: Option<&[Vec<usize>]>, caps: &Caps) -> Result<PermutationGroup> {
    let cg = match fixed_blocks {
        Some(b) => ColoredGraph::with_blocks(g.clone(), b)?,
        None => ColoredGraph::uncolored(g.clone()),
    };
    colored_automorphism_group(&cg, caps)
}

pub fn colored_automorphism_group(cg: &ColoredGraph, caps: &Caps) -> Result<PermutationGroup> {
    check_size(&cg.graph, caps)?;
    let n = cg.graph.n();
    if n == 0 {
        return Ok(PermutationGroup::trivial(0));
    }
    let mut search = AutSearch::new(cg);
    let order = search.run();
    for gamma in &search.gens {
        if !cg.graph.is_automorphism(gamma) || (0..n).any(|v| cg.colors[gamma.apply(v)] != cg.colors[v]) {
            return Err(Error::Invariant("search produced a non-automorphism".into()));
        }
    }
    let grp = PermutationGroup::new(n, &search.gens)?;
    if grp.order() != order {
        return Err(Error::Invariant(format!(
            "automorphism group order mismatch: search {order}, chain {}",
            grp.order()
        )));
    }
    Ok(grp)
}

/// Canonical labeling: the least `(trace, adjacency bytes)` over the leaves
/// of the search tree, pruned by automorphism orbits.
pub fn canonical_form(g: &LabeledGraph, caps: &Caps) -> Result<CanonicalForm> {
    check_size(g, caps)?;
    let n = g.n();
    if n == 0 {
        return Ok(CanonicalForm {
            bytes: 0u32.to_le_bytes().to_vec(),
            relabeling: Permutation::identity(0),
        });
    }
    let aut = automorphism_group(g, None, caps)?;
    let cg = ColoredGraph::uncolored(g.clone());
    let refiner = Refiner { g, n };
    let mut canon = Canonizer {
        refiner: &refiner,
        aut: &aut,
        best: None,
        orbit_cache: HashMap::new(),
    };
    let root = refiner.root(&cg.colors);
    canon.visit(root)?;
    let (_, bytes, lab) = canon.best.expect("at least one leaf");
    let mut im = vec![0; n];
    for (i, &v) in lab.iter().enumerate() {
        im[v] = i;
    }
    Ok(CanonicalForm {
        bytes,
        relabeling: Permutation::from_images(im)?,
    })
}

fn adjacency_bytes(g: &LabeledGraph, lab: &[usize]) -> Vec<u8> {
    let n = lab.len();
    let mut out = (n as u32).to_le_bytes().to_vec();
    let mut acc = 0u8;
    let mut k = 0;
    for &u in lab {
        let row = g.row(u);
        for &v in lab {
            acc = acc << 1 | row.contains(v) as u8;
            k += 1;
            if k == 8 {
                out.push(acc);
                acc = 0;
                k = 0;
            }
        }
    }
    if k > 0 {
        out.push(acc << (8 - k));
    }
    out
}

type Best = (Vec<u64>, Vec<u8>, Vec<usize>);

struct Canonizer<'a, 'g> {
    refiner: &'a Refiner<'g>,
    aut: &'a PermutationGroup,
    best: Option<Best>,
    orbit_cache: HashMap<Vec<usize>, Vec<Vec<usize>>>,
}

impl Canonizer<'_, '_> {
    fn stabilizer_orbits(&mut self, fixed: &[usize]) -> Result<Vec<Vec<usize>>> {
        if let Some(o) = self.orbit_cache.get(fixed) {
            return Ok(o.clone());
        }
        let st = self.aut.pointwise_stabilizer(fixed)?;
        let o = orbits_of(st.generators(), self.refiner.n);
        self.orbit_cache.insert(fixed.to_vec(), o.clone());
        Ok(o)
    }

    fn visit(&mut self, node: Node) -> Result<()> {
        if let Some((bt, _, _)) = &self.best {
            let k = node.trace.len().min(bt.len());
            if node.trace[..k] > bt[..k] {
                return Ok(());
            }
        }
        if node.is_discrete() {
            let bytes = adjacency_bytes(self.refiner.g, &node.lab);
            let better = match &self.best {
                None => true,
                Some((bt, bb, _)) => (&node.trace, &bytes) < (bt, bb),
            };
            if better {
                self.best = Some((node.trace.clone(), bytes, node.lab.clone()));
            }
            return Ok(());
        }
        let (s, l) = node.target().expect("nondiscrete");
        let orbits = self.stabilizer_orbits(&node.fixed)?;
        let mut orbit_id = vec![usize::MAX; self.refiner.n];
        for (i, o) in orbits.iter().enumerate() {
            for &p in o {
                orbit_id[p] = i;
            }
        }
        let mut cell: Vec<usize> = node.lab[s..s + l].to_vec();
        cell.sort_unstable();
        let mut seen = FixedBitSet::with_capacity(orbits.len());
        for w in cell {
            if seen.contains(orbit_id[w]) {
                continue;
            }
            seen.insert(orbit_id[w]);
            let child = self.refiner.individualize(&node, w);
            self.visit(child)?;
        }
        Ok(())
    }
}

/// `{a ∈ A : block^a = block}` via Schreier generators on the orbit of
/// the block.
pub fn setwise_stabilizer_of_block(a: &PermutationGroup, block: &[usize], caps: &Caps) -> Result<PermutationGroup> {
    let n = a.degree();
    let mut start = FixedBitSet::with_capacity(n);
    for &p in block {
        if p >= n {
            return Err(Error::Domain("block point out of range".into()));
        }
        start.insert(p);
    }
    let gens = a.generators();
    let mut index: HashMap<FixedBitSet, usize> = HashMap::new();
    let mut sets = vec![start.clone()];
    let mut reps = vec![Permutation::identity(n)];
    index.insert(start, 0);
    let mut schreier: Vec<Permutation> = Vec::new();
    let mut k = 0;
    while k < sets.len() {
        for s in gens {
            let mut img = FixedBitSet::with_capacity(n);
            for p in sets[k].ones() {
                img.insert(s.apply(p));
            }
            let u = reps[k].then(s);
            match index.get(&img) {
                Some(&j) => {
                    let h = u.then(&reps[j].inverse());
                    if !h.is_identity() && !schreier.contains(&h) {
                        schreier.push(h);
                    }
                }
                None => {
                    if sets.len() >= caps.listing {
                        return Err(cap_exceeded("block orbit", caps.listing as u64, "more"));
                    }
                    index.insert(img.clone(), sets.len());
                    sets.push(img);
                    reps.push(u);
                }
            }
        }
        k += 1;
    }
    let mut out = PermutationGroup::trivial(n);
    let mut kept = Vec::new();
    for h in schreier {
        if !out.contains(&h) {
            kept.push(h);
            out = PermutationGroup::new(n, &kept)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::AbelianGroup;
    use crate::graph::{cayley_graph, double_cover, ConnectionSet};

    fn cycle(n: usize) -> LabeledGraph {
        LabeledGraph::from_edges(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    fn order(g: &LabeledGraph) -> BigUint {
        automorphism_group(g, None, &Caps::default()).unwrap().order()
    }

    #[test]
    fn examples() {
        assert_eq!(order(&cycle(5)), BigUint::from(10u32));
        assert_eq!(order(&LabeledGraph::empty(4)), BigUint::from(24u32));
        assert_eq!(order(&cycle(10)), BigUint::from(20u32));
        let g = AbelianGroup::new(&[5]).unwrap();
        let cs = ConnectionSet::from_elements(&g, &[1, 4]).unwrap();
        assert_eq!(order(&double_cover(&cayley_graph(&g, &cs))), BigUint::from(20u32));
        // Petersen graph
        let mut p = LabeledGraph::empty(10);
        for i in 0..5 {
            p.add_edge(i, (i + 1) % 5);
            p.add_edge(i, i + 5);
            p.add_edge(i + 5, (i + 2) % 5 + 5);
        }
        assert_eq!(order(&p), BigUint::from(120u32));
    }

    #[test]
    fn loops_are_invariants() {
        let mut g = LabeledGraph::empty(3);
        g.add_edge(0, 0);
        assert_eq!(order(&g), BigUint::from(2u32));
    }

    #[test]
    fn blocks_restrict() {
        let c = cycle(10);
        let blocks = vec![vec![0, 2, 4, 6, 8], vec![1, 3, 5, 7, 9]];
        let b = automorphism_group(&c, Some(&blocks), &Caps::default()).unwrap();
        assert_eq!(b.order(), BigUint::from(10u32));
    }

    #[test]
    fn canonical_examples() {
        let caps = Caps::default();
        let six = cycle(6);
        let tri = LabeledGraph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        assert_ne!(canonical_form(&six, &caps).unwrap().bytes, canonical_form(&tri, &caps).unwrap().bytes);
        let g = AbelianGroup::new(&[7]).unwrap();
        let a = cayley_graph(&g, &ConnectionSet::from_elements(&g, &[1, 6]).unwrap());
        let b = cayley_graph(&g, &ConnectionSet::from_elements(&g, &[2, 5]).unwrap());
        assert_ne!(a, b);
        assert_eq!(canonical_form(&a, &caps).unwrap().bytes, canonical_form(&b, &caps).unwrap().bytes);
        let cf = canonical_form(&six, &caps).unwrap();
        let relabeled = six.relabel(&cf.relabeling);
        assert_eq!(adjacency_bytes(&relabeled, &(0..6).collect::<Vec<_>>()), cf.bytes);
    }

    #[test]
    fn block_stabilizer_examples() {
        let caps = Caps::default();
        let a = automorphism_group(&cycle(10), None, &caps).unwrap();
        let b = setwise_stabilizer_of_block(&a, &[0, 2, 4, 6, 8], &caps).unwrap();
        assert_eq!(b.order(), BigUint::from(10u32));
        let s4 = automorphism_group(&LabeledGraph::empty(4), None, &caps).unwrap();
        assert_eq!(setwise_stabilizer_of_block(&s4, &[0, 1], &caps).unwrap().order(), BigUint::from(4u32));
        let k2 = automorphism_group(&LabeledGraph::from_edges(2, &[(0, 1)]), None, &caps).unwrap();
        assert_eq!(setwise_stabilizer_of_block(&k2, &[0], &caps).unwrap().order(), BigUint::one());
    }

    #[test]
    fn size_cap() {
        let caps = Caps {
            graph_vertices: 3,
            ..Caps::default()
        };
        assert!(matches!(automorphism_group(&cycle(4), None, &caps), Err(Error::CapExceeded { .. })));
    }
}
