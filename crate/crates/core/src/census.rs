//! Exhaustive and sampled enumeration of inverse-closed connection sets,
//! with per-bucket counts, invariant cross-checks and unlabeled summaries.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use num_bigint::BigUint;
use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::autgrp::{automorphism_group, canonical_form};
use crate::caps::Caps;
use crate::error::{cap_exceeded, Error, Result};
use crate::graph::{cayley_graph, double_cover, ConnectionSet};
use crate::group::{automorphisms, AbelianGroup, Element, ElementSet, GroupAutomorphism};
use crate::stability::{Classifier, StabilityRecord, Tri};

/// Sets per work unit; fixed so results do not depend on the worker count.
pub const SHARD_SIZE: u64 = 256;

/// The inverse-closed subsets of `G`, indexed by bitmasks over `ι`-orbits.
///
/// Orbits are listed by increasing least element: `{x}` for involutions
/// (and 0), `{x, -x}` otherwise. Bit `i` of an index selects orbit `i`.
#[derive(Debug, Clone)]
pub struct InverseClosedSets {
    group: AbelianGroup,
    orbits: Vec<Vec<Element>>,
    orbit_of: Vec<usize>,
}

impl InverseClosedSets {
    pub fn new(g: &AbelianGroup) -> Self {
        let r = g.order();
        let mut orbit_of = vec![usize::MAX; r];
        let mut orbits = Vec::new();
        for x in g.elements() {
            if orbit_of[x] != usize::MAX {
                continue;
            }
            let y = g.neg(x);
            orbit_of[x] = orbits.len();
            orbit_of[y] = orbits.len();
            orbits.push(if x == y { vec![x] } else { vec![x, y] });
        }
        InverseClosedSets {
            group: g.clone(),
            orbits,
            orbit_of,
        }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn orbits(&self) -> &[Vec<Element>] {
        &self.orbits
    }

    /// `c(G)`.
    pub fn c(&self) -> u32 {
        self.orbits.len() as u32
    }

    /// `2^c`; panics when `c >= 64`.
    pub fn len_u64(&self) -> u64 {
        assert!(self.c() < 64, "index space does not fit in u64");
        1u64 << self.c()
    }

    pub fn total(&self) -> BigUint {
        BigUint::from(1u8) << self.c()
    }

    pub fn bits(&self, k: u64) -> ElementSet {
        let mut s = self.group.empty_set();
        for (i, orb) in self.orbits.iter().enumerate().take(64) {
            if k >> i & 1 == 1 {
                for &x in orb {
                    s.insert(x);
                }
            }
        }
        s
    }

    pub fn set(&self, k: u64) -> ConnectionSet {
        ConnectionSet::new(&self.group, self.bits(k)).expect("orbit unions are inverse-closed")
    }

    /// Index of an inverse-closed set; `None` otherwise or when `c >= 64`.
    pub fn index_of(&self, s: &ElementSet) -> Option<u64> {
        if self.c() >= 64 || s.len() != self.group.order() || !self.group.is_inverse_closed(s) {
            return None;
        }
        Some(s.ones().fold(0u64, |k, x| k | 1 << self.orbit_of[x]))
    }

    /// Union of the orbits whose bit is set in the random words.
    pub fn from_random<R: Rng>(&self, rng: &mut R) -> ConnectionSet {
        let mut s = self.group.empty_set();
        let mut word = 0u64;
        for (i, orb) in self.orbits.iter().enumerate() {
            if i % 64 == 0 {
                word = rng.next_u64();
            }
            if word >> (i % 64) & 1 == 1 {
                for &x in orb {
                    s.insert(x);
                }
            }
        }
        ConnectionSet::new(&self.group, s).expect("orbit unions are inverse-closed")
    }

    pub fn iter(&self) -> impl Iterator<Item = ConnectionSet> + '_ {
        (0..self.len_u64()).map(|k| self.set(k))
    }
}

/// Every inverse-closed subset once, in index order.
pub fn iterate_inverse_closed(g: &AbelianGroup, caps: &Caps) -> Result<impl Iterator<Item = ConnectionSet>> {
    let sets = InverseClosedSets::new(g);
    if sets.c() > caps.exhaustive_c {
        return Err(cap_exceeded("inverse-closed sets (log2)", caps.exhaustive_c as u64, sets.c()));
    }
    Ok((0..sets.len_u64()).map(move |k| sets.set(k)))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CensusCounts {
    pub examined: u64,
    pub disconnected: u64,
    pub connected_bipartite: u64,
    pub not_twin_free: u64,
    pub s1: u64,
    pub s2: u64,
    pub s3: u64,
    pub s3_indeterminate: u64,
    pub s3prime: u64,
    pub s4: u64,
    pub s4_indeterminate: u64,
    pub s5: u64,
    pub s5_indeterminate: u64,
    pub stable: u64,
    pub unstable: u64,
    pub nontrivially_unstable: u64,
    /// Sets whose stability could not be decided within the caps.
    pub indeterminate: u64,
    /// Sets with at least one indeterminate `S3`/`S4`/`S5` field.
    pub hierarchy_indeterminate: u64,
    pub good: u64,
    /// `(S1 - S2) - S3` members with determinate `S4`/`S5` fields.
    pub residual_determinate: u64,
    pub violations: Violations,
}

/// Records contradicting a structural fact about the classification.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Violations {
    pub s2_outside_s1: u64,
    pub s2_unstable: u64,
    pub s2_wrong_cover_order: u64,
    pub s3_outside_s3prime: u64,
    pub residual_outside_s4_s5: u64,
    pub cover_disconnected: u64,
    pub cover_order_not_twice_b: u64,
}

impl Violations {
    pub fn total(&self) -> u64 {
        self.s2_outside_s1
            + self.s2_unstable
            + self.s2_wrong_cover_order
            + self.s3_outside_s3prime
            + self.residual_outside_s4_s5
            + self.cover_disconnected
            + self.cover_order_not_twice_b
    }

    fn merge(&mut self, o: &Violations) {
        self.s2_outside_s1 += o.s2_outside_s1;
        self.s2_unstable += o.s2_unstable;
        self.s2_wrong_cover_order += o.s2_wrong_cover_order;
        self.s3_outside_s3prime += o.s3_outside_s3prime;
        self.residual_outside_s4_s5 += o.residual_outside_s4_s5;
        self.cover_disconnected += o.cover_disconnected;
        self.cover_order_not_twice_b += o.cover_order_not_twice_b;
    }
}

impl CensusCounts {
    pub fn merge(&mut self, o: &CensusCounts) {
        self.examined += o.examined;
        self.disconnected += o.disconnected;
        self.connected_bipartite += o.connected_bipartite;
        self.not_twin_free += o.not_twin_free;
        self.s1 += o.s1;
        self.s2 += o.s2;
        self.s3 += o.s3;
        self.s3_indeterminate += o.s3_indeterminate;
        self.s3prime += o.s3prime;
        self.s4 += o.s4;
        self.s4_indeterminate += o.s4_indeterminate;
        self.s5 += o.s5;
        self.s5_indeterminate += o.s5_indeterminate;
        self.stable += o.stable;
        self.unstable += o.unstable;
        self.nontrivially_unstable += o.nontrivially_unstable;
        self.indeterminate += o.indeterminate;
        self.hierarchy_indeterminate += o.hierarchy_indeterminate;
        self.good += o.good;
        self.residual_determinate += o.residual_determinate;
        self.violations.merge(&o.violations);
    }

    fn record(&mut self, rec: &StabilityRecord, n0_order: usize, cover_connected: bool) {
        let two = BigUint::from(2u8);
        self.examined += 1;
        self.disconnected += !rec.connected as u64;
        self.connected_bipartite += (rec.connected && rec.bipartite) as u64;
        self.not_twin_free += !rec.twin_free as u64;
        self.s1 += rec.in_s1 as u64;
        self.s2 += rec.in_s2 as u64;
        self.s3 += rec.in_s3.is_yes() as u64;
        self.s3_indeterminate += (rec.in_s3 == Tri::Indeterminate) as u64;
        self.s3prime += rec.in_s3prime as u64;
        self.s4 += rec.in_s4.is_yes() as u64;
        self.s4_indeterminate += (rec.in_s4 == Tri::Indeterminate) as u64;
        self.s5 += rec.in_s5.is_yes() as u64;
        self.s5_indeterminate += (rec.in_s5 == Tri::Indeterminate) as u64;
        self.stable += rec.stable as u64;
        self.unstable += !rec.stable as u64;
        self.nontrivially_unstable += rec.nontrivially_unstable() as u64;
        self.hierarchy_indeterminate += rec.has_indeterminate() as u64;
        self.good += rec.good as u64;

        let v = &mut self.violations;
        if rec.in_s2 {
            v.s2_outside_s1 += !rec.in_s1 as u64;
            v.s2_unstable += !rec.stable as u64;
            v.s2_wrong_cover_order += (rec.cover_aut_order != BigUint::from(2 * n0_order)) as u64;
        }
        v.s3_outside_s3prime += (rec.in_s3.is_yes() && !rec.in_s3prime) as u64;
        if rec.in_s1 && !rec.in_s2 && rec.in_s3 == Tri::No {
            let determinate = rec.in_s4 != Tri::Indeterminate && rec.in_s5 != Tri::Indeterminate;
            let either = rec.in_s4.is_yes() || rec.in_s5.is_yes();
            if determinate || either {
                self.residual_determinate += 1;
            }
            v.residual_outside_s4_s5 += (determinate && !either) as u64;
        }
        if rec.connected && !rec.bipartite {
            v.cover_disconnected += !cover_connected as u64;
            v.cover_order_not_twice_b += (rec.cover_aut_order != &rec.b_order * &two) as u64;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CensusMode {
    Exhaustive,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketProportion {
    pub bucket: &'static str,
    pub count: u64,
    pub proportion: f64,
    /// 95% normal-approximation half-width; zero for exhaustive runs.
    pub half_width: f64,
}

/// A measured bucket proportion against a `2^{exponent}` bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub bucket: &'static str,
    pub count: u64,
    pub bound_log2: f64,
    /// The bound is at least 1.
    pub vacuous: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub group: String,
    pub order: usize,
    pub c: u32,
    #[serde(serialize_with = "crate::bigser::serialize")]
    pub total: BigUint,
    pub mode: CensusMode,
    pub counts: CensusCounts,
    pub proportions: Vec<BucketProportion>,
    pub bound_checks: Vec<BoundCheck>,
    pub elapsed_ms: u64,
}

impl CensusReport {
    /// The report with timing zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> CensusReport {
        CensusReport {
            elapsed_ms: 0,
            ..self.clone()
        }
    }

    pub fn has_indeterminate(&self) -> bool {
        self.counts.indeterminate > 0 || self.counts.hierarchy_indeterminate > 0
    }

    pub const CSV_HEADER: [&'static str; 5] = ["group", "bucket", "count", "proportion", "half_width"];

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.proportions
            .iter()
            .map(|p| {
                vec![
                    self.group.clone(),
                    p.bucket.to_string(),
                    p.count.to_string(),
                    format!("{:.9}", p.proportion),
                    format!("{:.9}", p.half_width),
                ]
            })
            .collect()
    }
}

fn bucket_list(c: &CensusCounts) -> Vec<(&'static str, u64)> {
    vec![
        ("examined", c.examined),
        ("disconnected", c.disconnected),
        ("connected-bipartite", c.connected_bipartite),
        ("not-twin-free", c.not_twin_free),
        ("s1", c.s1),
        ("s2", c.s2),
        ("s3", c.s3),
        ("s3-indeterminate", c.s3_indeterminate),
        ("s3prime", c.s3prime),
        ("s4", c.s4),
        ("s4-indeterminate", c.s4_indeterminate),
        ("s5", c.s5),
        ("s5-indeterminate", c.s5_indeterminate),
        ("stable", c.stable),
        ("unstable", c.unstable),
        ("nontrivially-unstable", c.nontrivially_unstable),
        ("indeterminate", c.indeterminate),
        ("good", c.good),
    ]
}

fn proportions(c: &CensusCounts, sampled: bool) -> Vec<BucketProportion> {
    let n = c.examined;
    bucket_list(c)
        .into_iter()
        .map(|(bucket, count)| {
            let p = if n == 0 { 0.0 } else { count as f64 / n as f64 };
            let half_width = if sampled && n > 0 { 1.96 * (p * (1.0 - p) / n as f64).sqrt() } else { 0.0 };
            BucketProportion {
                bucket,
                count,
                proportion: p,
                half_width,
            }
        })
        .collect()
}

/// Exponents of the bucket bounds that need no `δ`.
pub fn bucket_bound_exponents(r: usize) -> Vec<(&'static str, f64)> {
    let r_f = r as f64;
    let l = r_f.log2();
    vec![
        ("disconnected", -r_f / 4.0 + l * l),
        ("connected-bipartite", -r_f / 4.0 + l * l),
        ("not-twin-free", -r_f / 6.0 + l + 1.0),
        ("outside-s1", -r_f / 6.0 + l * l + 2.0),
        ("s3", -r_f / 24.0 + l * l + l + 2.0),
        ("s5", -r_f / 5.0 + 2.0 * l * l + 5.0 * l),
    ]
}

fn bound_checks(r: usize, c: u32, counts: &CensusCounts) -> Vec<BoundCheck> {
    let outside_s1 = counts.examined - counts.s1;
    bucket_bound_exponents(r)
        .into_iter()
        .map(|(bucket, e)| {
            let count = match bucket {
                "disconnected" => counts.disconnected,
                "connected-bipartite" => counts.connected_bipartite,
                "not-twin-free" => counts.not_twin_free,
                "outside-s1" => outside_s1,
                "s3" => counts.s3,
                _ => counts.s5,
            };
            let holds = count == 0 || (count as f64).log2() - c as f64 <= e;
            BoundCheck {
                bucket,
                count,
                bound_log2: e,
                vacuous: e >= 0.0,
                holds,
            }
        })
        .collect()
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))
}

struct ShardResult {
    counts: CensusCounts,
    records: Vec<StabilityRecord>,
}

fn classify_into(
    cl: &Classifier,
    s: &ConnectionSet,
    out: &mut ShardResult,
    keep: bool,
) -> Result<()> {
    match cl.classify(s) {
        Ok(rec) => {
            let cover_connected = !(rec.connected && !rec.bipartite)
                || double_cover(&cayley_graph(cl.group(), s)).is_connected();
            out.counts.record(&rec, cl.n0_order(), cover_connected);
            if keep {
                out.records.push(rec);
            }
            Ok(())
        }
        Err(Error::CapExceeded { .. }) => {
            out.counts.examined += 1;
            out.counts.indeterminate += 1;
            Ok(())
        }
        Err(e) => Err(e),
    }
}

fn finish(
    g: &AbelianGroup,
    c: u32,
    mode: CensusMode,
    shards: Vec<ShardResult>,
    start: Instant,
) -> (CensusReport, Vec<StabilityRecord>) {
    let mut counts = CensusCounts::default();
    let mut records = Vec::new();
    for sh in shards {
        counts.merge(&sh.counts);
        records.extend(sh.records);
    }
    let sampled = matches!(mode, CensusMode::MonteCarlo { .. });
    let checks = if sampled { Vec::new() } else { bound_checks(g.order(), c, &counts) };
    let report = CensusReport {
        group: g.to_string(),
        order: g.order(),
        c,
        total: BigUint::from(1u8) << c,
        proportions: proportions(&counts, sampled),
        bound_checks: checks,
        mode,
        counts,
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    (report, records)
}

/// Classifies every inverse-closed set.
pub fn exhaustive_census(g: &AbelianGroup, caps: &Caps, workers: usize) -> Result<CensusReport> {
    Ok(exhaustive_census_records(g, caps, workers, false)?.0)
}

/// As `exhaustive_census`, optionally keeping every record in index order.
pub fn exhaustive_census_records(
    g: &AbelianGroup,
    caps: &Caps,
    workers: usize,
    keep: bool,
) -> Result<(CensusReport, Vec<StabilityRecord>)> {
    let start = Instant::now();
    let sets = InverseClosedSets::new(g);
    if sets.c() > caps.exhaustive_c {
        return Err(cap_exceeded("inverse-closed sets (log2)", caps.exhaustive_c as u64, sets.c()));
    }
    let cl = Classifier::new(g, caps)?;
    let n = sets.len_u64();
    let shard_count = n.div_ceil(SHARD_SIZE);
    let shards = pool(workers)?.install(|| {
        (0..shard_count)
            .into_par_iter()
            .map(|sh| {
                let mut out = ShardResult {
                    counts: CensusCounts::default(),
                    records: Vec::new(),
                };
                for k in sh * SHARD_SIZE..((sh + 1) * SHARD_SIZE).min(n) {
                    classify_into(&cl, &sets.set(k), &mut out, keep)?;
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let (report, records) = finish(g, sets.c(), CensusMode::Exhaustive, shards, start);
    if report.counts.examined != n {
        return Err(Error::Invariant("examined count differs from 2^c".into()));
    }
    Ok((report, records))
}

/// Uniform sampling with replacement; shard `i` draws from stream `i` of
/// a generator seeded by `seed`.
pub fn monte_carlo_census(g: &AbelianGroup, samples: u64, seed: u64, caps: &Caps, workers: usize) -> Result<CensusReport> {
    Ok(monte_carlo_census_records(g, samples, seed, caps, workers, false)?.0)
}

pub fn monte_carlo_census_records(
    g: &AbelianGroup,
    samples: u64,
    seed: u64,
    caps: &Caps,
    workers: usize,
    keep: bool,
) -> Result<(CensusReport, Vec<StabilityRecord>)> {
    let start = Instant::now();
    let sets = InverseClosedSets::new(g);
    let cl = Classifier::new(g, caps)?;
    let shard_count = samples.div_ceil(SHARD_SIZE);
    let shards = pool(workers)?.install(|| {
        (0..shard_count)
            .into_par_iter()
            .map(|sh| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(sh);
                let mut out = ShardResult {
                    counts: CensusCounts::default(),
                    records: Vec::new(),
                };
                for _ in sh * SHARD_SIZE..((sh + 1) * SHARD_SIZE).min(samples) {
                    let s = sets.from_random(&mut rng);
                    classify_into(&cl, &s, &mut out, keep)?;
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(finish(g, sets.c(), CensusMode::MonteCarlo { samples, seed }, shards, start))
}

/// Automorphisms generating `Aut(G)`, picked greedily from `auts`.
pub fn automorphism_generators(g: &AbelianGroup, auts: &[GroupAutomorphism]) -> Vec<GroupAutomorphism> {
    let id = GroupAutomorphism::identity(g);
    let mut gens: Vec<GroupAutomorphism> = Vec::new();
    let mut span: HashSet<Vec<Element>> = HashSet::from([id.table().to_vec()]);
    for a in auts {
        if span.contains(a.table()) {
            continue;
        }
        gens.push(a.clone());
        let mut queue: Vec<GroupAutomorphism> = vec![id.clone()];
        span = HashSet::from([id.table().to_vec()]);
        while let Some(x) = queue.pop() {
            for s in &gens {
                let y = x.then(s);
                if span.insert(y.table().to_vec()) {
                    queue.push(y);
                }
            }
        }
    }
    gens
}

fn find(parent: &mut [u64], mut x: u64) -> u64 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

/// Orbits of `Hol(G)` acting on connection sets by conjugating the
/// regular representation. Translations act trivially, so these are the
/// `Aut(G)`-orbits. Each orbit lists set indices ascending; orbits are
/// ordered by least index.
pub fn hol_orbits(g: &AbelianGroup, caps: &Caps) -> Result<Vec<Vec<u64>>> {
    let sets = InverseClosedSets::new(g);
    if sets.c() > caps.exhaustive_c {
        return Err(cap_exceeded("inverse-closed sets (log2)", caps.exhaustive_c as u64, sets.c()));
    }
    let gens = automorphism_generators(g, &automorphisms(g, caps)?);
    // each generator permutes the ι-orbits, so it acts on indices bitwise
    let orbit_maps: Vec<Vec<usize>> = gens
        .iter()
        .map(|a| {
            sets.orbits()
                .iter()
                .map(|o| {
                    let img = a.apply(o[0]);
                    sets.orbits().iter().position(|p| p.contains(&img)).expect("automorphisms commute with negation")
                })
                .collect()
        })
        .collect();
    let n = sets.len_u64();
    let mut parent: Vec<u64> = (0..n).collect();
    for k in 0..n {
        for m in &orbit_maps {
            let mut img = 0u64;
            for (i, &j) in m.iter().enumerate() {
                img |= (k >> i & 1) << j;
            }
            let (a, b) = (find(&mut parent, k), find(&mut parent, img));
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        }
    }
    let mut by_root: HashMap<u64, usize> = HashMap::new();
    let mut out: Vec<Vec<u64>> = Vec::new();
    for k in 0..n {
        let root = find(&mut parent, k);
        let slot = *by_root.entry(root).or_insert_with(|| {
            out.push(Vec::new());
            out.len() - 1
        });
        out[slot].push(k);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnlabeledReport {
    pub group: String,
    pub labeled_sets: u64,
    /// Distinct isomorphism classes of `Cay(G,S)`.
    pub unlabeled: u64,
    /// Sets with `|Aut(D)| = 2|R(G) ⋊ <ι>|`.
    pub good_sets: u64,
    /// Isomorphism classes of good Cayley graphs.
    pub good_unlabeled: u64,
    pub hol_orbits: u64,
    pub good_hol_orbits: u64,
    pub hol_order: u64,
    /// `good_unlabeled · |Hol(G)| >= good_sets`.
    pub good_bound_holds: bool,
    /// On good sets, isomorphism classes and `Hol(G)`-orbits are the same partition.
    pub good_classes_coincide: bool,
}

/// Groups every `Cay(G,S)` by canonical form and compares with `Hol(G)`-orbits.
pub fn unlabeled_census(g: &AbelianGroup, caps: &Caps, workers: usize) -> Result<UnlabeledReport> {
    let sets = InverseClosedSets::new(g);
    let orbits = hol_orbits(g, caps)?;
    let cl = Classifier::new(g, caps)?;
    let n = sets.len_u64();
    let target = BigUint::from(2 * cl.n0_order());
    let per_set: Vec<(Vec<u8>, bool)> = pool(workers)?.install(|| {
        (0..n)
            .into_par_iter()
            .map(|k| {
                let gamma = cayley_graph(g, &sets.set(k));
                let form = canonical_form(&gamma, caps)?.bytes;
                let good = automorphism_group(&double_cover(&gamma), None, caps)?.order() == target;
                Ok((form, good))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let forms: HashSet<&Vec<u8>> = per_set.iter().map(|p| &p.0).collect();
    let good_forms: HashSet<&Vec<u8>> = per_set.iter().filter(|p| p.1).map(|p| &p.0).collect();
    let good_sets = per_set.iter().filter(|p| p.1).count() as u64;
    let mut pairs: HashSet<(usize, &Vec<u8>)> = HashSet::new();
    let mut good_orbits = 0u64;
    for (i, orb) in orbits.iter().enumerate() {
        if per_set[orb[0] as usize].1 {
            good_orbits += 1;
            for &k in orb {
                pairs.insert((i, &per_set[k as usize].0));
            }
        }
    }
    let hol_order = (g.order() * automorphisms(g, caps)?.len()) as u64;
    let good_unlabeled = good_forms.len() as u64;
    Ok(UnlabeledReport {
        group: g.to_string(),
        labeled_sets: n,
        unlabeled: forms.len() as u64,
        good_sets,
        good_unlabeled,
        hol_orbits: orbits.len() as u64,
        good_hol_orbits: good_orbits,
        hol_order,
        good_bound_holds: good_unlabeled * hol_order >= good_sets,
        good_classes_coincide: pairs.len() as u64 == good_orbits && good_orbits == good_unlabeled,
    })
}
