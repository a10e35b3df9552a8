//! Discrepancy and mixing checks, weak chromatic numbers, injectivity radius,
//! diameter and bipartiteness of finite complexes.
//!
//! Discrepancies are exact rationals; bounds involving square roots are
//! compared in floating point with an absolute slack of `1e-12`.

use std::collections::{HashMap, VecDeque};

use num_rational::Ratio;

use crate::complex::PartiteHypergraph;
use crate::error::{param, Error, Result};
use crate::quotient::CayleyGraph;
use crate::rng::SplitMix64;

pub type Q = Ratio<i128>;

pub const SLACK: f64 = 1e-12;
/// Largest number of subset families `prod 2^{|V_i|}` for exhaustive checks.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 24;

pub fn to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

fn qabs(x: Q) -> Q {
    if x < Q::from_integer(0) {
        -x
    } else {
        x
    }
}

fn frac(a: usize, b: usize) -> Q {
    Q::new(a as i128, b as i128)
}

/// Facets of a fully partite hypergraph in per-type local coordinates, with
/// the cotype walls of each type.
#[derive(Clone, Debug)]
pub struct TypedFacets {
    pub d: usize,
    /// global vertex ids of each type
    pub parts: Vec<Vec<u32>>,
    /// `facets[f][i]` = local index of the type-`i` vertex of facet `f`
    pub facets: Vec<Vec<u32>>,
    /// `wall_of[i][f]` = index of the cotype-`i` wall of facet `f`
    pub wall_of: Vec<Vec<u32>>,
    /// `walls[i][w]` = local indices (type order, with type `i` skipped) of wall `w`
    pub walls: Vec<Vec<Vec<u32>>>,
}

impl TypedFacets {
    pub fn new(h: &PartiteHypergraph) -> Result<TypedFacets> {
        if !h.is_fully_partite() {
            return Err(Error::Precondition("needs a type function mod d".into()));
        }
        let d = h.d();
        let t = h.types().expect("checked");
        let parts: Vec<Vec<u32>> = (0..d as u32).map(|i| h.vertices_of_type(i)).collect();
        let mut local = vec![0u32; h.n()];
        for p in &parts {
            for (k, &v) in p.iter().enumerate() {
                local[v as usize] = k as u32;
            }
        }
        let facets: Vec<Vec<u32>> = h
            .facets()
            .iter()
            .map(|f| {
                let mut row = vec![0u32; d];
                for &v in f {
                    row[t[v as usize] as usize] = local[v as usize];
                }
                row
            })
            .collect();
        let mut wall_of = Vec::with_capacity(d);
        let mut walls = Vec::with_capacity(d);
        for i in 0..d {
            let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
            let mut list = Vec::new();
            let mut of = Vec::with_capacity(facets.len());
            for f in &facets {
                let key: Vec<u32> = (0..d).filter(|&j| j != i).map(|j| f[j]).collect();
                let w = *index.entry(key.clone()).or_insert_with(|| {
                    list.push(key);
                    list.len() as u32 - 1
                });
                of.push(w);
            }
            wall_of.push(of);
            walls.push(list);
        }
        Ok(TypedFacets { d, parts, facets, wall_of, walls })
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    /// `(k_i, l_i)` per type when every `B_i` is biregular.
    pub fn type_regularity(&self) -> Option<Vec<(usize, usize)>> {
        let mut out = Vec::with_capacity(self.d);
        for i in 0..self.d {
            let mut k = vec![0usize; self.parts[i].len()];
            let mut l = vec![0usize; self.walls[i].len()];
            for (f, row) in self.facets.iter().enumerate() {
                k[row[i] as usize] += 1;
                l[self.wall_of[i][f] as usize] += 1;
            }
            let ki = *k.first()?;
            let li = *l.first()?;
            if ki == 0 || k.iter().any(|&x| x != ki) || l.iter().any(|&x| x != li) {
                return None;
            }
            out.push((ki, li));
        }
        Some(out)
    }

    fn count(&self, member: &[Vec<bool>], skip: Option<usize>) -> usize {
        self.facets
            .iter()
            .filter(|row| (0..self.d).all(|j| Some(j) == skip || member[j][row[j] as usize]))
            .count()
    }
}

fn masks(tf: &TypedFacets, w: &[Vec<u32>]) -> Result<Vec<Vec<bool>>> {
    if w.len() != tf.d {
        return param(format!("expected {} subsets, got {}", tf.d, w.len()));
    }
    let mut out = Vec::with_capacity(tf.d);
    for (i, wi) in w.iter().enumerate() {
        let mut m = vec![false; tf.parts[i].len()];
        for v in wi {
            let k = tf.parts[i]
                .binary_search(v)
                .map_err(|_| Error::Precondition(format!("vertex {v} is not of type {i}")))?;
            m[k] = true;
        }
        out.push(m);
    }
    Ok(out)
}

/// `| |E(W)|/|E| - prod |W_i|/|V_i| |`, exactly.
pub fn discrepancy(h: &PartiteHypergraph, w: &[Vec<u32>]) -> Result<Q> {
    let tf = TypedFacets::new(h)?;
    let m = masks(&tf, w)?;
    Ok(disc_from_masks(&tf, &m))
}

fn sizes_of(m: &[Vec<bool>]) -> Vec<usize> {
    m.iter().map(|x| x.iter().filter(|&&b| b).count()).collect()
}

fn disc_from_masks(tf: &TypedFacets, m: &[Vec<bool>]) -> Q {
    let e = tf.facets.len();
    if e == 0 {
        return Q::from_integer(0);
    }
    let ws = sizes_of(m);
    let mut prod = Q::from_integer(1);
    for (i, &s) in ws.iter().enumerate() {
        prod *= frac(s, tf.parts[i].len());
    }
    qabs(frac(tf.count(m, None), e) - prod)
}

/// Outcome of one subset family.
#[derive(Clone, Debug)]
pub struct FamilyCheck {
    pub sizes: Vec<usize>,
    pub edges: usize,
    pub disc: Q,
    /// `sum_{i < d-1} ~lambda(B_i) sqrt(|W_i|/|V_i|)`
    pub cor38_bound: f64,
    pub cor38_pass: bool,
    /// `disc_{H_i}(W) = disc_H(W with W_i := V_i)` for every `i`
    pub wall_identity: bool,
    /// `disc_H <= disc_{B_i} + |W_i|/|V_i| disc_{H_i}` for every `i`
    pub reduction_holds: bool,
}

fn check_family(tf: &TypedFacets, m: &[Vec<bool>], lambdas: &[f64]) -> FamilyCheck {
    let d = tf.d;
    let e = tf.facets.len();
    let sizes = sizes_of(m);
    let parts = tf.part_sizes();
    let edges = tf.count(m, None);
    let disc = disc_from_masks(tf, m);
    let cor38_bound: f64 =
        (0..d - 1).map(|i| lambdas[i] * (sizes[i] as f64 / parts[i] as f64).sqrt()).sum();
    let cor38_pass = to_f64(&disc) <= cor38_bound + SLACK;
    let mut wall_identity = true;
    let mut reduction_holds = true;
    for i in 0..d {
        let nw = tf.walls[i].len();
        // walls of cotype i inside W
        let inside: Vec<bool> = tf.walls[i]
            .iter()
            .map(|w| {
                let mut k = 0;
                (0..d).filter(|&j| j != i).all(|j| {
                    let ok = m[j][w[k] as usize];
                    k += 1;
                    ok
                })
            })
            .collect();
        let ei = inside.iter().filter(|&&b| b).count();
        let mut prod_rest = Q::from_integer(1);
        for j in (0..d).filter(|&j| j != i) {
            prod_rest *= frac(sizes[j], parts[j]);
        }
        let disc_hi = qabs(frac(ei, nw) - prod_rest);
        let with_full = qabs(frac(tf.count(m, Some(i)), e) - prod_rest);
        if disc_hi != with_full {
            wall_identity = false;
        }
        let wi = frac(sizes[i], parts[i]);
        let disc_bi = qabs(frac(edges, e) - wi * frac(ei, nw));
        if disc > disc_bi + wi * disc_hi {
            reduction_holds = false;
        }
    }
    FamilyCheck { sizes, edges, disc, cor38_bound, cor38_pass, wall_identity, reduction_holds }
}

#[derive(Clone, Debug)]
pub enum SubsetMode {
    Exhaustive,
    Sampled { seed: u64, samples: usize },
}

#[derive(Clone, Debug)]
pub struct DiscrepancyReport {
    pub mode: SubsetMode,
    pub families: usize,
    pub max_disc: Q,
    /// largest `disc / bound` over families with a positive bound
    pub max_ratio: f64,
    pub cor38_failures: usize,
    pub wall_identity_failures: usize,
    pub reduction_failures: usize,
    /// `2d / sqrt(q)` when the hypergraph is a building quotient
    pub thm13_bound: Option<f64>,
    pub thm13_failures: usize,
    pub lambdas: Vec<f64>,
}

impl DiscrepancyReport {
    pub fn pass(&self) -> bool {
        self.cor38_failures == 0
            && self.wall_identity_failures == 0
            && self.reduction_failures == 0
            && self.thm13_failures == 0
    }
}

/// Checks the hypergraph mixing inequality over subset families, given
/// `~lambda(B_i)` for every type (only the first `d - 1` enter the bound).
pub fn hypergraph_mixing_check(
    h: &PartiteHypergraph,
    lambdas: &[f64],
    mode: SubsetMode,
    q: Option<u64>,
) -> Result<DiscrepancyReport> {
    let tf = TypedFacets::new(h)?;
    let d = tf.d;
    if tf.type_regularity().is_none() {
        return Err(Error::Precondition("hypergraph is not type-regular".into()));
    }
    if lambdas.len() + 1 < d {
        return param(format!("need at least {} normalized eigenvalues", d - 1));
    }
    let parts = tf.part_sizes();
    let thm13_bound = q.map(|q| 2.0 * d as f64 / (q as f64).sqrt());
    let mut report = DiscrepancyReport {
        mode: mode.clone(),
        families: 0,
        max_disc: Q::from_integer(0),
        max_ratio: 0.0,
        cor38_failures: 0,
        wall_identity_failures: 0,
        reduction_failures: 0,
        thm13_bound,
        thm13_failures: 0,
        lambdas: lambdas.to_vec(),
    };
    let record = |c: FamilyCheck, report: &mut DiscrepancyReport| {
        report.families += 1;
        if c.disc > report.max_disc {
            report.max_disc = c.disc;
        }
        if c.cor38_bound > 0.0 {
            report.max_ratio = report.max_ratio.max(to_f64(&c.disc) / c.cor38_bound);
        }
        report.cor38_failures += usize::from(!c.cor38_pass);
        report.wall_identity_failures += usize::from(!c.wall_identity);
        report.reduction_failures += usize::from(!c.reduction_holds);
        if let Some(b) = thm13_bound {
            report.thm13_failures += usize::from(to_f64(&c.disc) > b + SLACK);
        }
    };
    match mode {
        SubsetMode::Exhaustive => {
            let total_bits: usize = parts.iter().sum();
            if total_bits >= 64 || (1u64 << total_bits) > EXHAUSTIVE_LIMIT {
                return Err(Error::Parameter(format!(
                    "exhaustive mode needs 2^{total_bits} families, above the limit 2^24; use sampled mode"
                )));
            }
            for code in 0u64..(1u64 << total_bits) {
                let mut m = Vec::with_capacity(d);
                let mut shift = 0;
                for &s in &parts {
                    m.push((0..s).map(|k| code >> (shift + k) & 1 == 1).collect::<Vec<bool>>());
                    shift += s;
                }
                record(check_family(&tf, &m, lambdas), &mut report);
            }
        }
        SubsetMode::Sampled { seed, samples } => {
            let mut rng = SplitMix64::new(seed);
            for _ in 0..samples {
                let m: Vec<Vec<bool>> = parts
                    .iter()
                    .map(|&s| {
                        let p = rng.next_f64();
                        (0..s).map(|_| rng.next_f64() < p).collect()
                    })
                    .collect();
                record(check_family(&tf, &m, lambdas), &mut report);
            }
        }
    }
    Ok(report)
}

/// A biregular bipartite graph with sides `side[v] = true` (`V_1`) and false (`V_2`).
#[derive(Clone, Debug)]
pub struct BipartiteView<'a> {
    pub adj: &'a [Vec<u32>],
    pub side: &'a [bool],
    pub k1: usize,
    pub k2: usize,
    pub n1: usize,
    pub n2: usize,
}

impl<'a> BipartiteView<'a> {
    pub fn new(adj: &'a [Vec<u32>], side: &'a [bool]) -> Result<Self> {
        let mut k1 = None;
        let mut k2 = None;
        for (v, ns) in adj.iter().enumerate() {
            if ns.iter().any(|&w| side[w as usize] == side[v]) {
                return Err(Error::Precondition(format!("edge inside one side at vertex {v}")));
            }
            let slot = if side[v] { &mut k1 } else { &mut k2 };
            match *slot {
                None => *slot = Some(ns.len()),
                Some(k) if k == ns.len() => {}
                Some(_) => return Err(Error::Precondition("graph is not biregular".into())),
            }
        }
        let n1 = side.iter().filter(|&&s| s).count();
        let n2 = side.len() - n1;
        match (k1, k2) {
            (Some(k1), Some(k2)) if k1 > 0 && k2 > 0 => Ok(BipartiteView { adj, side, k1, k2, n1, n2 }),
            _ => Err(Error::Precondition("both sides need positive degree".into())),
        }
    }

    pub fn edge_count(&self) -> usize {
        self.k1 * self.n1
    }
}

#[derive(Clone, Debug)]
pub struct MixingCheck {
    pub s: usize,
    pub t: usize,
    pub e_st: usize,
    pub disc: Q,
    pub cor34_bound: f64,
    pub cor34_pass: bool,
    /// `| |E(S,T)| - sqrt(k1 k2)|S||T|/sqrt(|V1||V2|) |`
    pub lemma32_lhs: f64,
    /// `lambda sqrt(|S||T|)`
    pub lemma32_bound: f64,
    pub lemma32_pass: bool,
}

/// Both forms of the bipartite mixing inequality for `S in V_1`, `T in V_2`
/// (`lambda` is the unnormalized second eigenvalue).
pub fn bipartite_mixing_check(g: &BipartiteView, lambda: f64, s: &[u32], t: &[u32]) -> Result<MixingCheck> {
    let mut in_t = vec![false; g.adj.len()];
    for &v in t {
        if g.side[v as usize] {
            return Err(Error::Precondition(format!("vertex {v} of T is not in V_2")));
        }
        in_t[v as usize] = true;
    }
    let mut e_st = 0;
    for &v in s {
        if !g.side[v as usize] {
            return Err(Error::Precondition(format!("vertex {v} of S is not in V_1")));
        }
        e_st += g.adj[v as usize].iter().filter(|&&w| in_t[w as usize]).count();
    }
    Ok(mixing_values(g, lambda, s.len(), t.len(), e_st))
}

fn mixing_values(g: &BipartiteView, lambda: f64, s: usize, t: usize, e_st: usize) -> MixingCheck {
    let e = g.edge_count();
    let disc = qabs(frac(e_st, e) - frac(s, g.n1) * frac(t, g.n2));
    let lt = lambda / ((g.k1 * g.k2) as f64).sqrt();
    let cor34_bound = lt * ((s as f64 / g.n1 as f64) * (t as f64 / g.n2 as f64)).sqrt();
    let main = ((g.k1 * g.k2) as f64).sqrt() * (s * t) as f64 / ((g.n1 * g.n2) as f64).sqrt();
    let lemma32_lhs = (e_st as f64 - main).abs();
    let lemma32_bound = lambda * ((s * t) as f64).sqrt();
    MixingCheck {
        s,
        t,
        e_st,
        cor34_pass: to_f64(&disc) <= cor34_bound + SLACK,
        disc,
        cor34_bound,
        // the unnormalized form is compared at the scale of |E|
        lemma32_pass: lemma32_lhs <= lemma32_bound + SLACK * e as f64,
        lemma32_lhs,
        lemma32_bound,
    }
}

#[derive(Clone, Debug)]
pub struct MixingSummary {
    pub seed: u64,
    pub samples: usize,
    pub cor34_failures: usize,
    pub lemma32_failures: usize,
    pub max_disc: Q,
    pub max_ratio: f64,
}

impl MixingSummary {
    pub fn pass(&self) -> bool {
        self.cor34_failures == 0 && self.lemma32_failures == 0
    }
}

/// Seeded random `(S, T)` pairs: each sample draws a density per side and
/// includes every vertex independently with that probability.
pub fn bipartite_mixing_sampled(g: &BipartiteView, lambda: f64, seed: u64, samples: usize) -> MixingSummary {
    let mut rng = SplitMix64::new(seed);
    let n = g.adj.len();
    let mut in_t = vec![false; n];
    let mut out = MixingSummary {
        seed,
        samples,
        cor34_failures: 0,
        lemma32_failures: 0,
        max_disc: Q::from_integer(0),
        max_ratio: 0.0,
    };
    for _ in 0..samples {
        let (ps, pt) = (rng.next_f64(), rng.next_f64());
        let mut s = Vec::new();
        let mut t_count = 0;
        for v in 0..n {
            let x = rng.next_f64();
            if g.side[v] {
                if x < ps {
                    s.push(v);
                }
                in_t[v] = false;
            } else {
                in_t[v] = x < pt;
                t_count += usize::from(in_t[v]);
            }
        }
        let e_st: usize = s.iter().map(|&v| g.adj[v].iter().filter(|&&w| in_t[w as usize]).count()).sum();
        let c = mixing_values(g, lambda, s.len(), t_count, e_st);
        out.cor34_failures += usize::from(!c.cor34_pass);
        out.lemma32_failures += usize::from(!c.lemma32_pass);
        if c.disc > out.max_disc {
            out.max_disc = c.disc;
        }
        if c.cor34_bound > 0.0 {
            out.max_ratio = out.max_ratio.max(to_f64(&c.disc) / c.cor34_bound);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColoringMode {
    Exact,
    Greedy,
}

#[derive(Clone, Debug)]
pub struct ColoringResult {
    pub colors: Vec<u32>,
    pub count: usize,
    pub mode: ColoringMode,
    /// exact mode: search nodes spent proving that `count - 1` colors fail
    pub refutation_nodes: Option<u64>,
}

pub const MAX_EXACT_VERTICES: usize = 60;

/// Whether no facet is monochromatic.
pub fn is_weak_coloring(h: &PartiteHypergraph, colors: &[u32]) -> bool {
    colors.len() == h.n() && h.facets().iter().all(|f| f.iter().any(|&v| colors[v as usize] != colors[f[0] as usize]))
}

fn incident_facets(h: &PartiteHypergraph) -> Vec<Vec<usize>> {
    let mut inc = vec![Vec::new(); h.n()];
    for (k, f) in h.facets().iter().enumerate() {
        for &v in f {
            inc[v as usize].push(k);
        }
    }
    inc
}

fn search_order(h: &PartiteHypergraph, inc: &[Vec<usize>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..h.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(inc[v].len()), v));
    order
}

fn completes_mono(h: &PartiteHypergraph, inc: &[Vec<usize>], colors: &[Option<u32>], v: usize, c: u32) -> bool {
    inc[v].iter().any(|&k| {
        h.facets()[k].iter().all(|&w| w as usize == v || colors[w as usize] == Some(c))
    })
}

fn greedy(h: &PartiteHypergraph, inc: &[Vec<usize>], order: &[usize]) -> Vec<u32> {
    let mut colors: Vec<Option<u32>> = vec![None; h.n()];
    for &v in order {
        let c = (0..).find(|&c| !completes_mono(h, inc, &colors, v, c)).expect("some color is free");
        colors[v] = Some(c);
    }
    colors.into_iter().map(|c| c.unwrap_or(0)).collect()
}

/// Tries to color with `c` colors; `Ok(None)` when the search is exhausted.
fn try_colors(
    h: &PartiteHypergraph,
    inc: &[Vec<usize>],
    order: &[usize],
    c: u32,
    nodes: &mut u64,
    budget: u64,
) -> Result<Option<Vec<u32>>> {
    fn rec(
        h: &PartiteHypergraph,
        inc: &[Vec<usize>],
        order: &[usize],
        pos: usize,
        used: u32,
        c: u32,
        colors: &mut Vec<Option<u32>>,
        nodes: &mut u64,
        budget: u64,
    ) -> Result<bool> {
        if pos == order.len() {
            return Ok(true);
        }
        *nodes += 1;
        if *nodes > budget {
            return Err(Error::Resource { what: "coloring search nodes".into(), count: *nodes as usize });
        }
        let v = order[pos];
        // a fresh color is only tried once: colors above `used` are interchangeable
        for col in 0..c.min(used + 1) {
            if completes_mono(h, inc, colors, v, col) {
                continue;
            }
            colors[v] = Some(col);
            if rec(h, inc, order, pos + 1, used.max(col + 1), c, colors, nodes, budget)? {
                return Ok(true);
            }
            colors[v] = None;
        }
        Ok(false)
    }
    let mut colors = vec![None; h.n()];
    if rec(h, inc, order, 0, 0, c, &mut colors, nodes, budget)? {
        Ok(Some(colors.into_iter().map(|x| x.unwrap_or(0)).collect()))
    } else {
        Ok(None)
    }
}

/// Weak chromatic number (no monochromatic facet). Exact mode runs a
/// backtracking search with facet pruning, vertices by decreasing facet
/// degree; `budget` caps the number of search nodes.
pub fn chromatic_number(h: &PartiteHypergraph, mode: ColoringMode, budget: u64) -> Result<ColoringResult> {
    let inc = incident_facets(h);
    let order = search_order(h, &inc);
    let g = greedy(h, &inc, &order);
    let gcount = if h.n() == 0 { 0 } else { *g.iter().max().unwrap() as usize + 1 };
    if mode == ColoringMode::Greedy {
        return Ok(ColoringResult { colors: g, count: gcount, mode, refutation_nodes: None });
    }
    if h.n() > MAX_EXACT_VERTICES {
        return param(format!("exact coloring is limited to {MAX_EXACT_VERTICES} vertices"));
    }
    let lower = if h.facets().is_empty() { gcount.min(1) } else { 2 };
    let mut nodes = 0u64;
    let mut last_fail_nodes = None;
    for c in lower..gcount {
        let before = nodes;
        match try_colors(h, &inc, &order, c as u32, &mut nodes, budget) {
            Ok(Some(colors)) => {
                return Ok(ColoringResult { colors, count: c, mode, refutation_nodes: last_fail_nodes });
            }
            Ok(None) => last_fail_nodes = Some(nodes - before),
            Err(Error::Resource { .. }) => {
                return Err(Error::Resource {
                    what: format!("coloring search (chromatic number between {c} and {gcount})"),
                    count: nodes as usize,
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ColoringResult { colors: g, count: gcount, mode, refutation_nodes: last_fail_nodes })
}

#[derive(Clone, Copy, Debug)]
pub struct ChromaticBounds {
    /// `q^{1/(2d)} / 2`
    pub half_form: f64,
    /// `(2d)^{-1/d} q^{1/(2d)}`
    pub proof_form: f64,
    /// `(sum_{i<d-1} ~lambda(B_i))^{-1/d}` from measured eigenvalues
    pub empirical: Option<f64>,
}

impl ChromaticBounds {
    pub fn is_vacuous(&self) -> bool {
        self.half_form.max(self.proof_form).max(self.empirical.unwrap_or(0.0)) <= 1.0
    }
}

/// Lower bounds on the chromatic number of a non-partite quotient of
/// injectivity radius at least 2; `lambdas` are `~lambda(B_i)` of its `d`-cover.
pub fn chromatic_lower_bound(
    q: u64,
    d: usize,
    partite_index: u32,
    injectivity_radius: usize,
    lambdas: &[f64],
) -> Result<ChromaticBounds> {
    if partite_index != 1 {
        return Err(Error::Precondition(format!(
            "the chromatic bound applies to non-partite quotients; r = {partite_index}"
        )));
    }
    if injectivity_radius < 2 {
        return Err(Error::Precondition(format!(
            "the chromatic bound needs injectivity radius at least 2; measured {injectivity_radius}"
        )));
    }
    let qf = q as f64;
    let df = d as f64;
    let root = qf.powf(1.0 / (2.0 * df));
    let empirical = if lambdas.len() + 1 >= d {
        let s: f64 = lambdas.iter().take(d - 1).sum();
        (s > 0.0).then(|| s.powf(-1.0 / df))
    } else {
        None
    };
    Ok(ChromaticBounds { half_form: 0.5 * root, proof_form: (2.0 * df).powf(-1.0 / df) * root, empirical })
}

/// Cumulative ball sizes `|B(r)|`, `r = 0..=rmax`, of the `(q+1)`-regular tree.
pub fn tree_ball_sizes(q: u64, rmax: usize) -> Vec<u64> {
    let mut out = vec![1u64];
    let mut sphere = 1u64;
    for r in 1..=rmax {
        sphere = if r == 1 { q + 1 } else { sphere.saturating_mul(q) };
        out.push(out[r - 1].saturating_add(sphere));
    }
    out
}

/// Cumulative ball sizes around vertex `src` (neighbour lists may repeat).
pub fn ball_sizes(adj: &dyn Fn(usize) -> Vec<u32>, n: usize, src: usize, rmax: usize) -> Vec<u64> {
    let dist = bfs(adj, n, src, Some(rmax));
    let mut out = vec![0u64; rmax + 1];
    for d in dist.into_iter().flatten() {
        out[d] += 1;
    }
    for r in 1..=rmax {
        out[r] += out[r - 1];
    }
    out
}

fn bfs(adj: &dyn Fn(usize) -> Vec<u32>, n: usize, src: usize, limit: Option<usize>) -> Vec<Option<usize>> {
    let mut dist = vec![None; n];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].expect("queued");
        if limit.is_some_and(|l| dv >= l) {
            continue;
        }
        for w in adj(v) {
            if dist[w as usize].is_none() {
                dist[w as usize] = Some(dv + 1);
                queue.push_back(w as usize);
            }
        }
    }
    dist
}

/// Length of the shortest cycle through `src` (1 for a loop, 2 for parallel
/// edges); equal to the girth on vertex-transitive graphs.
pub fn shortest_cycle_through(adj: &dyn Fn(usize) -> Vec<u32>, n: usize, src: usize) -> Option<usize> {
    let mut dist: Vec<Option<usize>> = vec![None; n];
    let mut parent: Vec<usize> = vec![usize::MAX; n];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    let mut best: Option<usize> = None;
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].expect("queued");
        if best.is_some_and(|b| 2 * dv + 1 >= b) {
            break;
        }
        let mut skipped_parent = false;
        for w in adj(v) {
            let w = w as usize;
            if w == v {
                best = Some(best.map_or(1, |b| b.min(1)));
                continue;
            }
            if w == parent[v] && !skipped_parent {
                skipped_parent = true;
                continue;
            }
            match dist[w] {
                None => {
                    dist[w] = Some(dv + 1);
                    parent[w] = v;
                    queue.push_back(w);
                }
                Some(dw) => {
                    let len = dv + dw + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}

#[derive(Clone, Debug)]
pub struct RadiusReport {
    /// largest `r` with `|B_X(r)| = |B_building(r)|`
    pub radius: usize,
    pub quotient_sizes: Vec<u64>,
    pub building_sizes: Vec<u64>,
    /// `log_q |X| / (2(d-1)(d^2-1)) - 1/2`
    pub log_bound: f64,
    /// `deg f / d`
    pub degree_bound: f64,
    /// lower bound `2r + 1` on the minimal displacement
    pub displacement_lower: usize,
    /// exact minimal displacement, known for `d = 2` (the girth)
    pub displacement: Option<usize>,
}

impl RadiusReport {
    pub fn meets_log_bound(&self) -> bool {
        self.radius as f64 >= self.log_bound.ceil() - SLACK
    }

    pub fn meets_degree_bound(&self) -> bool {
        let dist = self.displacement.unwrap_or(self.displacement_lower) as f64;
        dist >= self.degree_bound - SLACK
    }
}

/// Injectivity radius of a Cayley quotient by comparing balls around the
/// identity with building balls (`building_sizes[r] = |B(r)|`).
pub fn injectivity_radius(g: &CayleyGraph, building_sizes: &[u64], q: u64, e: u32) -> Result<RadiusReport> {
    let adj = |v: usize| g.neighbors(v).to_vec();
    injectivity_radius_of(&adj, g.n, g.d, building_sizes, q, e)
}

/// As [`injectivity_radius`] for any vertex-transitive graph given by
/// neighbour lists, measured around vertex 0.
pub fn injectivity_radius_of(
    adj: &dyn Fn(usize) -> Vec<u32>,
    n: usize,
    d: usize,
    building_sizes: &[u64],
    q: u64,
    e: u32,
) -> Result<RadiusReport> {
    if n == 0 {
        return param("empty graph");
    }
    let rmax = building_sizes.len().saturating_sub(1);
    let quotient_sizes = ball_sizes(adj, n, 0, rmax);
    if let Some(r) = (0..=rmax).find(|&r| quotient_sizes[r] > building_sizes[r]) {
        return Err(Error::Consistency(format!(
            "quotient ball of radius {r} has {} vertices, more than the building's {}",
            quotient_sizes[r], building_sizes[r]
        )));
    }
    let radius = match (0..=rmax).find(|&r| quotient_sizes[r] != building_sizes[r]) {
        Some(0) => return Err(Error::Consistency("balls of radius 0 differ".into())),
        Some(r) => r - 1,
        None => {
            return Err(Error::Precondition(format!(
                "balls agree up to the oracle radius {rmax}; extend the building oracle"
            )))
        }
    };
    let df = d as f64;
    let log_bound = (n as f64).ln() / (q as f64).ln() / (2.0 * (df - 1.0) * (df * df - 1.0)) - 0.5;
    let displacement = if d == 2 { shortest_cycle_through(adj, n, 0) } else { None };
    Ok(RadiusReport {
        radius,
        quotient_sizes,
        building_sizes: building_sizes.to_vec(),
        log_bound,
        degree_bound: e as f64 / df,
        displacement_lower: 2 * radius + 1,
        displacement,
    })
}

/// Exact diameter: one BFS when the graph is vertex-transitive, all sources otherwise.
pub fn diameter(adj: &[Vec<u32>], vertex_transitive: bool) -> Result<usize> {
    let n = adj.len();
    if n == 0 {
        return Ok(0);
    }
    let f = |v: usize| adj[v].clone();
    let sources: Vec<usize> = if vertex_transitive { vec![0] } else { (0..n).collect() };
    let mut best = 0;
    for s in sources {
        let dist = bfs(&f, n, s, None);
        for d in &dist {
            match d {
                None => return Err(Error::Domain("graph is disconnected".into())),
                Some(d) => best = best.max(*d),
            }
        }
    }
    Ok(best)
}

/// `log |X| / log(lambda_1 / lambda_2)`.
pub fn diameter_bound(n: usize, lambda1: f64, lambda2: f64) -> f64 {
    (n as f64).ln() / (lambda1 / lambda2).ln()
}

#[derive(Clone, Debug)]
pub enum Bipartiteness {
    /// a proper 2-coloring
    Bipartite(Vec<bool>),
    /// an odd closed walk `v_0, v_1, .., v_0`
    OddWalk(Vec<u32>),
}

/// BFS 2-coloring of a connected graph, with an odd closed walk on failure.
pub fn bipartiteness_check(adj: &[Vec<u32>]) -> Bipartiteness {
    let n = adj.len();
    if n == 0 {
        return Bipartiteness::Bipartite(vec![]);
    }
    let mut dist: Vec<Option<usize>> = vec![None; n];
    let mut parent = vec![u32::MAX; n];
    dist[0] = Some(0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            let w = w as usize;
            match dist[w] {
                None => {
                    dist[w] = Some(dist[v].unwrap() + 1);
                    parent[w] = v as u32;
                    queue.push_back(w);
                }
                Some(dw) if dw % 2 == dist[v].unwrap() % 2 => {
                    let path = |mut x: usize| {
                        let mut p = vec![x as u32];
                        while x != 0 {
                            x = parent[x] as usize;
                            p.push(x as u32);
                        }
                        p
                    };
                    // 0 -> .. -> v -> w -> .. -> 0
                    let mut walk: Vec<u32> = path(v).into_iter().rev().collect();
                    walk.extend(path(w));
                    return Bipartiteness::OddWalk(walk);
                }
                Some(_) => {}
            }
        }
    }
    Bipartiteness::Bipartite(dist.iter().map(|d| d.is_some_and(|x| x % 2 == 0)).collect())
}

/// Whether `walk` is a closed walk of odd length in the graph.
pub fn is_odd_closed_walk(adj: &[Vec<u32>], walk: &[u32]) -> bool {
    walk.len() >= 2
        && walk.first() == walk.last()
        && (walk.len() - 1) % 2 == 1
        && walk.windows(2).all(|p| adj[p[0] as usize].contains(&p[1]))
}

/// Seeded corpus of type-regular fully partite hypergraphs with `d` in
/// `{2, 3}` and at most `max_vertices` vertices: offset constructions over
/// cyclic groups, Latin squares and complete multipartite hypergraphs.
pub fn type_regular_corpus(seed: u64, count: usize, max_vertices: usize) -> Vec<PartiteHypergraph> {
    let mut rng = SplitMix64::new(seed);
    let mut out: Vec<PartiteHypergraph> = Vec::new();
    let push = |h: PartiteHypergraph, out: &mut Vec<PartiteHypergraph>| {
        let ok = TypedFacets::new(&h).ok().and_then(|tf| tf.type_regularity()).is_some();
        if ok && !h.facets().is_empty() && !out.contains(&h) {
            out.push(h);
        }
    };
    // complete multipartite
    for sizes in [vec![2usize, 2, 2], vec![1, 2, 3], vec![3, 4], vec![2, 5], vec![4, 4, 4]] {
        if sizes.iter().sum::<usize>() <= max_vertices {
            push(complete_multipartite(&sizes), &mut out);
        }
    }
    // cyclic Latin squares of order 2..4
    for m in 2..=4usize {
        if 3 * m <= max_vertices {
            let facets: Vec<Vec<u32>> = (0..m)
                .flat_map(|a| (0..m).map(move |b| (a, b)))
                .map(|(a, b)| vec![a as u32, (m + b) as u32, (2 * m + (a + b) % m) as u32])
                .collect();
            let types = (0..3 * m).map(|v| (v / m) as u32).collect();
            push(PartiteHypergraph::new(3, 3 * m, 3, Some(types), facets).unwrap(), &mut out);
        }
    }
    let mut attempts = 0;
    while out.len() < count && attempts < 100_000 {
        attempts += 1;
        let d = if rng.coin() { 2 } else { 3 };
        let m = 2 + rng.below(if d == 2 { 5 } else { 3 }) as usize;
        // part sizes are divisors of m
        let divisors: Vec<usize> = (1..=m).filter(|k| m % k == 0 && *k > 1).collect();
        let sizes: Vec<usize> = (0..d).map(|_| divisors[rng.below(divisors.len() as u64) as usize]).collect();
        let total: usize = sizes.iter().sum();
        if total > max_vertices {
            continue;
        }
        let offsets = 1 + rng.below(3) as usize;
        let tuples: Vec<Vec<usize>> =
            (0..offsets).map(|_| (0..d - 1).map(|_| rng.below(m as u64) as usize).collect()).collect();
        let base: Vec<usize> = sizes.iter().scan(0, |acc, &s| {
            let b = *acc;
            *acc += s;
            Some(b)
        }).collect();
        let mut facets = Vec::new();
        for x in 0..m {
            for t in &tuples {
                let mut f = vec![(base[0] + x % sizes[0]) as u32];
                for j in 1..d {
                    f.push((base[j] + (x + t[j - 1]) % sizes[j]) as u32);
                }
                facets.push(f);
            }
        }
        let types: Vec<u32> = (0..d).flat_map(|j| std::iter::repeat(j as u32).take(sizes[j])).collect();
        if let Ok(h) = PartiteHypergraph::new(d, total, d as u32, Some(types), facets) {
            push(h, &mut out);
        }
    }
    out
}

/// Every transversal of the parts is a facet.
pub fn complete_multipartite(sizes: &[usize]) -> PartiteHypergraph {
    let d = sizes.len();
    let base: Vec<usize> = sizes.iter().scan(0, |acc, &s| {
        let b = *acc;
        *acc += s;
        Some(b)
    }).collect();
    let mut facets: Vec<Vec<u32>> = vec![vec![]];
    for j in 0..d {
        let (start, len) = (base[j], sizes[j]);
        facets = facets
            .into_iter()
            .flat_map(|f| {
                (0..len).map(move |k| {
                    let mut g = f.clone();
                    g.push((start + k) as u32);
                    g
                })
            })
            .collect();
    }
    let n = sizes.iter().sum();
    let types = (0..d).flat_map(|j| std::iter::repeat(j as u32).take(sizes[j])).collect();
    PartiteHypergraph::new(d, n, d as u32, Some(types), facets).expect("valid construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::clique_complex;

    fn cycle(n: u32) -> Vec<Vec<u32>> {
        (0..n)
            .map(|v| {
                let mut ns = vec![(v + 1) % n, (v + n - 1) % n];
                ns.sort_unstable();
                ns
            })
            .collect()
    }

    fn c6() -> PartiteHypergraph {
        let types: Vec<u32> = (0..6).map(|v| v % 2).collect();
        clique_complex(&cycle(6), 2, Some((types, 2))).unwrap().0
    }

    #[test]
    fn discrepancy_examples() {
        let h = c6();
        assert_eq!(discrepancy(&h, &[vec![0, 2, 4], vec![1, 3, 5]]).unwrap(), Q::from_integer(0));
        assert_eq!(discrepancy(&h, &[vec![0], vec![1]]).unwrap(), Q::new(1, 18));
        assert!(discrepancy(&h, &[vec![1], vec![1]]).is_err());
        let k = complete_multipartite(&[2, 3, 2]);
        assert_eq!(discrepancy(&k, &[vec![0], vec![2, 3], vec![6]]).unwrap(), Q::from_integer(0));
    }

    #[test]
    fn bipartite_mixing_examples() {
        let adj = cycle(6);
        let side: Vec<bool> = (0..6).map(|v| v % 2 == 0).collect();
        let g = BipartiteView::new(&adj, &side).unwrap();
        let c = bipartite_mixing_check(&g, 1.0, &[0], &[1]).unwrap();
        assert_eq!(c.disc, Q::new(1, 18));
        assert!((c.cor34_bound - 1.0 / 6.0).abs() < 1e-15);
        assert!(c.cor34_pass && c.lemma32_pass);
        let c = bipartite_mixing_check(&g, 1.0, &[], &[1]).unwrap();
        assert_eq!(c.disc, Q::from_integer(0));
        assert!(c.cor34_pass);
        let s = bipartite_mixing_sampled(&g, 1.0, 3, 500);
        assert!(s.pass());
    }

    #[test]
    fn complete_tripartite_exhaustive() {
        let h = complete_multipartite(&[2, 2, 2]);
        let r = hypergraph_mixing_check(&h, &[0.0, 0.0, 0.0], SubsetMode::Exhaustive, None).unwrap();
        assert_eq!(r.families, 64);
        assert_eq!(r.max_disc, Q::from_integer(0));
        assert!(r.pass());
    }

    #[test]
    fn coloring_examples() {
        let single = PartiteHypergraph::new(3, 3, 1, None, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(chromatic_number(&single, ColoringMode::Exact, 1_000_000).unwrap().count, 2);
        let k5: Vec<Vec<u32>> = (0..5u32).flat_map(|a| (a + 1..5).map(move |b| vec![a, b])).collect();
        let k5 = PartiteHypergraph::new(2, 5, 1, None, k5).unwrap();
        let r = chromatic_number(&k5, ColoringMode::Exact, 1_000_000).unwrap();
        assert_eq!(r.count, 5);
        assert!(is_weak_coloring(&k5, &r.colors));
        let lat = complete_multipartite(&[3, 3, 3]);
        assert_eq!(chromatic_number(&lat, ColoringMode::Exact, 1_000_000).unwrap().count, 2);
        let g = chromatic_number(&lat, ColoringMode::Greedy, 0).unwrap();
        assert!(is_weak_coloring(&lat, &g.colors));
    }

    #[test]
    fn chromatic_bounds() {
        let b = chromatic_lower_bound(81, 2, 1, 2, &[]).unwrap();
        assert!((b.half_form - 1.5).abs() < 1e-12);
        let b = chromatic_lower_bound(3, 3, 1, 2, &[]).unwrap();
        assert!((b.half_form - 0.5 * 3f64.powf(1.0 / 6.0)).abs() < 1e-12);
        assert!(b.is_vacuous());
        assert!(chromatic_lower_bound(81, 2, 2, 2, &[]).is_err());
        assert!(chromatic_lower_bound(81, 2, 1, 1, &[]).is_err());
    }

    #[test]
    fn graph_metrics() {
        let c = cycle(6);
        assert_eq!(diameter(&c, true).unwrap(), 3);
        let k4: Vec<Vec<u32>> = (0..4u32).map(|v| (0..4).filter(|&w| w != v).collect()).collect();
        assert_eq!(diameter(&k4, false).unwrap(), 1);
        assert!(diameter(&[vec![], vec![]], false).is_err());
        assert!(matches!(bipartiteness_check(&c), Bipartiteness::Bipartite(_)));
        let c5 = cycle(5);
        match bipartiteness_check(&c5) {
            Bipartiteness::OddWalk(w) => assert!(is_odd_closed_walk(&c5, &w)),
            _ => panic!("C5 is not bipartite"),
        }
        assert!(matches!(bipartiteness_check(&[vec![]]), Bipartiteness::Bipartite(_)));
        let f = |v: usize| c5[v].clone();
        assert_eq!(shortest_cycle_through(&f, 5, 0), Some(5));
        assert_eq!(tree_ball_sizes(3, 3), vec![1, 5, 17, 53]);
    }

    #[test]
    fn corpus_is_type_regular() {
        let corpus = type_regular_corpus(11, 50, 12);
        assert!(corpus.len() >= 50);
        for h in &corpus {
            assert!(h.n() <= 12);
            assert!(TypedFacets::new(h).unwrap().type_regularity().is_some());
        }
        assert!(corpus.iter().any(|h| h.d() == 2) && corpus.iter().any(|h| h.d() == 3));
    }
}
