//! The Cartwright-Steger lattice: an explicit representation of the cyclic
//! algebra, the generating sets `Sigma_i`, and balls of the building around
//! the standard vertex.
//!
//! The algebra over `K(y)` is `sum L z^j` with `L = F_{q^d}`, `z u = u^q z`
//! and `z^d = 1 + y`. It does not split over `F_q(y)`, so matrices are taken
//! over `L(y)`: left multiplication on the right `L(y)`-module with basis
//! `1, z, .., z^{d-1}`. Since `L((y))` is unramified over `F_q((y))`, relative
//! positions of vertices computed there agree with those in the building of
//! `PGL_d(F_q((y)))`, and the standard lattice is the vertex fixed by the
//! maximal order.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::complex::cliques_of_size;
use crate::error::{param, Error, Result};
use crate::gf::{prime_power, Fe, Field, Poly};
use crate::laurent::{RatFun, RelPosition, ValMatrix};

/// Number of `i`-dimensional subspaces of `F_q^d`.
pub fn gaussian_binomial(d: u32, i: u32, q: u64) -> u64 {
    if i > d {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for j in 0..i {
        num *= (q as u128).pow(d - j) - 1;
        den *= (q as u128).pow(j + 1) - 1;
    }
    (num / den) as u64
}

/// Number of complete flags of `F_q^d`.
pub fn flag_count(d: u32, q: u64) -> u64 {
    (1..=d).map(|i| (q.pow(i) - 1) / (q - 1)).product()
}

/// Splits `q = p^m` with `p` odd.
pub(crate) fn odd_prime_power(q: u64) -> Result<(u32, u32)> {
    match prime_power(q) {
        None => param(format!("q = {q} is not a prime power")),
        Some((2, _)) => param(format!("q = {q} is even; only odd q is supported")),
        Some(pm) => Ok(pm),
    }
}

pub struct CsAlgebraRep {
    d: usize,
    q: u64,
    /// `q = p^m`
    m: u32,
    field: Arc<Field>,
    normal_element: Fe,
    xi_matrices: Vec<ValMatrix>,
    z_matrix: ValMatrix,
    b_matrix: ValMatrix,
}

impl CsAlgebraRep {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn normal_element(&self) -> Fe {
        self.normal_element
    }

    pub fn xi_matrix(&self, i: usize) -> &ValMatrix {
        &self.xi_matrices[i % self.d]
    }

    pub fn z_matrix(&self) -> &ValMatrix {
        &self.z_matrix
    }

    pub fn b_matrix(&self) -> &ValMatrix {
        &self.b_matrix
    }

    /// `x -> x^q`, iterated `j` times.
    pub fn phi_pow(&self, x: Fe, j: usize) -> Fe {
        let j = (j % self.d) as u32;
        self.field.frobenius_pow(x, self.m * j)
    }

    /// Image of `u in F_{q^d}`: `diag(phi^{-j}(u))`.
    pub fn unit_matrix(&self, u: Fe) -> ValMatrix {
        let d = self.d;
        ValMatrix::diagonal((0..d).map(|j| RatFun::constant(self.phi_pow(u, d - j))).collect())
    }

    /// Vertex type of `g x_0`: valuation of the determinant mod `d`.
    pub fn vertex_type(&self, g: &ValMatrix) -> Result<u32> {
        let v = g
            .determinant(&self.field)
            .valuation()
            .ok_or_else(|| Error::Domain("singular matrix".into()))?;
        Ok(v.rem_euclid(self.d as i64) as u32)
    }

    /// Checks `z^d = (1+y) I`, `z xi_i = xi_{i+1} z` and that `det b` has valuation 1.
    pub fn check_relations(&self) -> Result<()> {
        let f = &*self.field;
        let mut zd = ValMatrix::identity(self.d);
        for _ in 0..self.d {
            zd = zd.mul(&self.z_matrix, f);
        }
        let one_plus_y = RatFun::from_poly(Poly::from_ints(&[1, 1], f));
        if zd != ValMatrix::identity(self.d).scale(&one_plus_y, f) {
            return Err(Error::Consistency("z^d != 1 + y".into()));
        }
        for i in 0..self.d {
            let lhs = self.z_matrix.mul(self.xi_matrix(i), f);
            let rhs = self.xi_matrix(i + 1).mul(&self.z_matrix, f);
            if lhs != rhs {
                return Err(Error::Consistency(format!("z xi_{i} != xi_{} z", (i + 1) % self.d)));
            }
        }
        if self.b_matrix.determinant(f).valuation() != Some(1) {
            return Err(Error::Consistency("det b does not have valuation 1".into()));
        }
        Ok(())
    }
}

/// Representation over `F_{q^d}(y)`, using the field `F_{q^d}` itself.
pub fn build_cs_rep(d: usize, q: u64) -> Result<CsAlgebraRep> {
    let (p, m) = odd_prime_power(q)?;
    if d < 2 {
        return param("d must be at least 2");
    }
    let field = Arc::new(Field::new(p, m * d as u32)?);
    build_cs_rep_in(d, q, field)
}

/// Representation with entries in a given field containing `F_{q^d}`.
pub fn build_cs_rep_in(d: usize, q: u64, field: Arc<Field>) -> Result<CsAlgebraRep> {
    let (p, m) = odd_prime_power(q)?;
    if d < 2 {
        return param("d must be at least 2");
    }
    if field.characteristic() != p || !field.has_subfield(m * d as u32) {
        return param(format!("{field:?} does not contain F_{q}^{d}"));
    }
    let f = &*field;
    let normal_element = f.find_normal_element(m, d as u32)?;
    let mut rep = CsAlgebraRep {
        d,
        q,
        m,
        field: field.clone(),
        normal_element,
        xi_matrices: Vec::new(),
        z_matrix: ValMatrix::zero(d),
        b_matrix: ValMatrix::zero(d),
    };
    rep.xi_matrices = (0..d).map(|i| rep.unit_matrix(rep.phi_pow(normal_element, i))).collect();
    let mut z = ValMatrix::zero(d);
    for j in 0..d - 1 {
        z.set(j + 1, j, RatFun::one());
    }
    z.set(0, d - 1, RatFun::from_poly(Poly::from_ints(&[1, 1], f)));
    let z_inv = z.inverse(f)?;
    rep.b_matrix = ValMatrix::identity(d).sub(&z_inv, f);
    rep.z_matrix = z;
    rep.check_relations()?;
    Ok(rep)
}

/// One element of `Sigma_i`.
#[derive(Clone, Debug)]
pub struct Generator {
    /// projective canonical form
    pub matrix: ValMatrix,
    /// the product of `b_u` matrices itself; entries lie in `L[y, 1/(1+y)]`,
    /// so it can be reduced at any `y = alpha` with `alpha != -1`
    pub raw: ValMatrix,
    /// indices into `Sigma_1` whose product (left to right) is this element
    pub word: Vec<usize>,
    /// type offset `i`
    pub level: usize,
}

pub struct GeneratorSet {
    d: usize,
    q: u64,
    field: Arc<Field>,
    /// `levels[i - 1]` is `Sigma_i`
    levels: Vec<Vec<Generator>>,
}

impl GeneratorSet {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// `Sigma_i` for `1 <= i <= d - 1`.
    pub fn sigma(&self, i: usize) -> &[Generator] {
        &self.levels[i - 1]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    /// All of `Sigma`, ordered by level.
    pub fn all(&self) -> impl Iterator<Item = &Generator> {
        self.levels.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `b_u = u b u^{-1}` for `u = g^j`, `0 <= j < (q^d-1)/(q-1)`, `g` a generator
/// of `F_{q^d}^*`; these run over `F_{q^d}^* / F_q^*`.
pub fn build_sigma1(rep: &CsAlgebraRep) -> Result<Vec<ValMatrix>> {
    let f = &*rep.field;
    let qd = rep.q.pow(rep.d as u32);
    let count = (qd - 1) / (rep.q - 1);
    let step = (f.size() as u64 - 1) / (qd - 1);
    let g = f.exp(step);
    let mut out = Vec::with_capacity(count as usize);
    for j in 0..count {
        let u = f.pow(g, j);
        let bu = rep.unit_matrix(u).mul(&rep.b_matrix, f).mul(&rep.unit_matrix(f.inv(u)), f);
        out.push(bu);
    }
    Ok(out)
}

/// `Sigma_i` as the distinct products `s b` with `s in Sigma_{i-1}`, `b in
/// Sigma_1`, sitting at position `(0,..,0,1,..,1)` (`i` ones) from `x_0`.
///
/// Every type-`i` neighbour `x` of `x_0` has a type-`(i-1)` neighbour `x'` in
/// a common facet, and `gamma_{x'}^{-1} gamma_x` then lies in `Sigma_1`, so
/// the search is complete; a count mismatch is reported as an error.
pub fn enumerate_sigma(rep: &CsAlgebraRep, sigma1: &[ValMatrix]) -> Result<GeneratorSet> {
    let f = &*rep.field;
    let d = rep.d;
    let mut levels: Vec<Vec<Generator>> = Vec::new();
    let first: Vec<Generator> = sigma1
        .iter()
        .enumerate()
        .map(|(j, m)| {
            Ok(Generator { matrix: m.projective_canonical(f)?, raw: m.clone(), word: vec![j], level: 1 })
        })
        .collect::<Result<_>>()?;
    levels.push(first);
    for i in 2..d {
        let target = RelPosition::neighbor(d, i);
        let mut seen: HashMap<ValMatrix, ()> = HashMap::new();
        let mut next = Vec::new();
        for s in &levels[i - 2] {
            for (j, b) in sigma1.iter().enumerate() {
                let raw = s.raw.mul(b, f);
                if raw.rel_position(f)? != target {
                    continue;
                }
                let canon = raw.projective_canonical(f)?;
                if seen.insert(canon.clone(), ()).is_some() {
                    continue;
                }
                let mut word = s.word.clone();
                word.push(j);
                next.push(Generator { matrix: canon, raw, word, level: i });
            }
        }
        levels.push(next);
    }
    let set = GeneratorSet { d, q: rep.q, field: rep.field.clone(), levels };
    for i in 1..d {
        let expect = gaussian_binomial(d as u32, i as u32, rep.q);
        let got = set.sigma(i).len() as u64;
        if got != expect {
            return Err(Error::Consistency(format!("|Sigma_{i}| = {got}, expected {expect}")));
        }
    }
    let mut all: HashMap<&ValMatrix, ()> = HashMap::new();
    for g in set.all() {
        if all.insert(&g.matrix, ()).is_some() {
            return Err(Error::Consistency("Sigma_i are not disjoint".into()));
        }
    }
    Ok(set)
}

/// Representation, `Sigma_1` and all `Sigma_i` for `(d, q)`.
pub fn generators(d: usize, q: u64) -> Result<GeneratorSet> {
    let rep = build_cs_rep(d, q)?;
    let s1 = build_sigma1(&rep)?;
    enumerate_sigma(&rep, &s1)
}

#[derive(Clone, Debug)]
pub struct BallVertex {
    pub matrix: ValMatrix,
    pub depth: usize,
    pub relpos: RelPosition,
    /// type relative to the center
    pub vtype: u32,
}

pub struct BuildingBall {
    d: usize,
    q: u64,
    radius: usize,
    pub vertices: Vec<BallVertex>,
    /// sorted neighbour indices inside the ball
    pub adjacency: Vec<Vec<u32>>,
    /// sorted vertex tuples of the `d`-cliques
    pub facets: Vec<Vec<u32>>,
}

impl BuildingBall {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertex counts per depth `0..=radius`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius + 1];
        for v in &self.vertices {
            out[v.depth] += 1;
        }
        out
    }

    /// Text export: `index depth (relpos) matrix` per vertex, then
    /// `facet i j ..` lines.
    pub fn export(&self, f: &Field) -> String {
        let mut s = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "{i} {} {} {}", v.depth, v.relpos, v.matrix.format(f));
        }
        for fc in &self.facets {
            let parts: Vec<String> = fc.iter().map(u32::to_string).collect();
            let _ = writeln!(s, "facet {}", parts.join(" "));
        }
        s
    }
}

/// Ball of radius `radius` around `x_0`, by breadth-first search over right
/// multiplication by `Sigma`. Edges between boundary vertices are included,
/// so the 1-skeleton is the induced subgraph. Fails once the ball would
/// exceed `max_vertices`.
pub fn building_ball(gens: &GeneratorSet, radius: usize, max_vertices: usize) -> Result<BuildingBall> {
    let f = &*gens.field;
    let d = gens.d;
    let center = ValMatrix::identity(d);
    let mut index: HashMap<ValMatrix, u32> = HashMap::new();
    let mut vertices = vec![BallVertex {
        matrix: center.clone(),
        depth: 0,
        relpos: RelPosition::origin(d),
        vtype: 0,
    }];
    index.insert(center, 0);
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new()];
    let mut head = 0;
    while head < vertices.len() {
        let (g, depth, vtype) = {
            let v = &vertices[head];
            (v.matrix.clone(), v.depth, v.vtype)
        };
        let mut nbrs = Vec::with_capacity(gens.len());
        for s in gens.all() {
            let h = g.mul(&s.matrix, f).projective_canonical(f)?;
            if let Some(&j) = index.get(&h) {
                nbrs.push(j);
                continue;
            }
            if depth == radius {
                continue;
            }
            if vertices.len() >= max_vertices {
                return Err(Error::Resource { what: "building ball vertices".into(), count: vertices.len() });
            }
            let relpos = h.rel_position(f)?;
            let j = vertices.len() as u32;
            index.insert(h.clone(), j);
            vertices.push(BallVertex {
                matrix: h,
                depth: depth + 1,
                relpos,
                vtype: (vtype + s.level as u32) % d as u32,
            });
            adjacency.push(Vec::new());
            nbrs.push(j);
        }
        nbrs.sort_unstable();
        nbrs.dedup();
        adjacency[head] = nbrs;
        head += 1;
    }
    let facets = cliques_of_size(&adjacency, d);
    Ok(BuildingBall { d, q: gens.q, radius, vertices, adjacency, facets })
}

#[derive(Clone, Debug)]
pub struct LocalStructureReport {
    pub facets_at_center: usize,
    pub expected_facets: u64,
    /// `(wall, number of facets containing it)` for walls through the center
    pub wall_degrees: Vec<(Vec<u32>, usize)>,
    pub expected_wall_degree: usize,
    /// neighbours of the center per type offset `1..d`
    pub neighbors_by_type: Vec<usize>,
    pub expected_neighbors_by_type: Vec<u64>,
}

impl LocalStructureReport {
    pub fn walls_ok(&self) -> bool {
        !self.wall_degrees.is_empty() && self.wall_degrees.iter().all(|(_, c)| *c == self.expected_wall_degree)
    }

    pub fn ok(&self) -> bool {
        self.walls_ok()
            && self.facets_at_center as u64 == self.expected_facets
            && self.neighbors_by_type.iter().zip(&self.expected_neighbors_by_type).all(|(a, b)| *a as u64 == *b)
    }
}

/// Star of the center: facet count against the flag count, walls against
/// `q + 1`, neighbour types against the Gaussian binomials.
pub fn verify_local_structure(ball: &BuildingBall) -> Result<LocalStructureReport> {
    if ball.radius < 2 {
        return Err(Error::Precondition("local structure needs a ball of radius at least 2".into()));
    }
    let d = ball.d;
    let star: Vec<&Vec<u32>> = ball.facets.iter().filter(|f| f[0] == 0).collect();
    let mut walls: HashMap<Vec<u32>, usize> = HashMap::new();
    for fc in &star {
        for drop in 0..d {
            let w: Vec<u32> = fc.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, &v)| v).collect();
            if w.contains(&0) {
                walls.entry(w).or_insert(0);
            }
        }
    }
    for fc in &ball.facets {
        for drop in 0..d {
            let w: Vec<u32> = fc.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, &v)| v).collect();
            if let Some(c) = walls.get_mut(&w) {
                *c += 1;
            }
        }
    }
    let mut wall_degrees: Vec<(Vec<u32>, usize)> = walls.into_iter().collect();
    wall_degrees.sort();
    let mut neighbors_by_type = vec![0usize; d - 1];
    for &j in &ball.adjacency[0] {
        let t = ball.vertices[j as usize].vtype as usize;
        if t == 0 {
            return Err(Error::Consistency("center has a neighbour of its own type".into()));
        }
        neighbors_by_type[t - 1] += 1;
    }
    Ok(LocalStructureReport {
        facets_at_center: star.len(),
        expected_facets: flag_count(d as u32, ball.q),
        wall_degrees,
        expected_wall_degree: ball.q as usize + 1,
        neighbors_by_type,
        expected_neighbors_by_type: (1..d).map(|i| gaussian_binomial(d as u32, i as u32, ball.q)).collect(),
    })
}
