//! Congruence quotients `Lambda / Lambda(f)`: reduction at `y = alpha`, the
//! partite index, the polynomial search, group closure and the type-restoring
//! `d`-cover.
//!
//! All arithmetic happens in one field `K = F_{q^{lcm(d,e)}}` containing both
//! the splitting field `F_{q^d}` of the algebra and the residue field
//! `F_{q^e}`. The image of `Lambda` in `PGL_d(K)` is conjugate to a subgroup
//! of `PGL_d(F_{q^e})`, so orders and Cayley graphs are unaffected.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_integer::Integer;

use crate::cslattice::{build_cs_rep_in, build_sigma1, enumerate_sigma, odd_prime_power, GeneratorSet};
use crate::error::{param, Error, Result};
use crate::gf::{Fe, Field, Poly};
use crate::laurent::ValMatrix;

pub const DEFAULT_GROUP_BUDGET: usize = 5_000_000;

/// `|PSL_d(F_s)|`.
pub fn psl_order(d: u32, s: u64) -> u128 {
    let s = s as u128;
    let mut n = s.pow(d * (d - 1) / 2);
    for i in 2..=d {
        n *= s.pow(i) - 1;
    }
    n / (d as u128).gcd(&(s - 1))
}

/// Reduction `y -> alpha` of the algebra over `R = F_q[y, 1/y, 1/(1+y)]`.
pub struct CongruenceMap {
    d: usize,
    q: u64,
    e: u32,
    field: Arc<Field>,
    f: Poly,
    alpha: Fe,
}

impl CongruenceMap {
    /// The working field for `(d, q, e)`.
    pub fn working_field(d: usize, q: u64, e: u32) -> Result<Arc<Field>> {
        let (p, m) = odd_prime_power(q)?;
        let l = (d as u32).lcm(&e);
        Ok(Arc::new(Field::new(p, m * l)?))
    }

    /// Map for a given monic `f` of degree `e`, irreducible over `F_q`, with
    /// coefficients given in `field` (which must be the working field).
    pub fn new(d: usize, q: u64, f: Poly, field: Arc<Field>) -> Result<CongruenceMap> {
        let (_, m) = odd_prime_power(q)?;
        let e = f.degree().unwrap_or(0) as u32;
        if d < 2 {
            return param("d must be at least 2");
        }
        if e < 2 {
            return param("the congruence polynomial must have degree at least 2");
        }
        if !field.has_subfield(m * (d as u32).lcm(&e)) {
            return param("working field does not contain F_{q^d} and F_{q^e}");
        }
        if !f.is_monic() || !f.coeffs().iter().all(|&c| field.in_subfield(c, m)) {
            return param("f must be monic with coefficients in F_q");
        }
        let neg_one = field.neg(field.one());
        if f.eval(field.zero(), &field).is_zero() || f.eval(neg_one, &field).is_zero() {
            return param("f must not vanish at 0 or -1");
        }
        let alpha = field
            .subfield_elements(m * e)?
            .into_iter()
            .find(|&a| f.eval(a, &field).is_zero())
            .ok_or_else(|| Error::Parameter("f has no root in F_{q^e}; it is reducible".into()))?;
        if field.minimal_polynomial(alpha, m)? != f {
            return param("f is reducible over F_q");
        }
        Ok(CongruenceMap { d, q, e, field, f, alpha })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn poly(&self) -> &Poly {
        &self.f
    }

    pub fn alpha(&self) -> Fe {
        self.alpha
    }

    /// `q^e`.
    pub fn residue_size(&self) -> u64 {
        self.q.pow(self.e)
    }

    /// Generators for `(d, q)` with entries in the working field.
    pub fn generators(&self) -> Result<GeneratorSet> {
        let rep = build_cs_rep_in(self.d, self.q, self.field.clone())?;
        let s1 = build_sigma1(&rep)?;
        enumerate_sigma(&rep, &s1)
    }
}

/// Whether `x in F_s^*` is a `d`-th power.
fn is_dth_power(x: Fe, d: u64, s: u64, f: &Field) -> bool {
    f.pow(x, (s - 1) / d.gcd(&(s - 1))) == f.one()
}

/// Least `r | d` with `(alpha/(1+alpha))^r` a `d`-th power in `F_{q^e}^*`.
pub fn partite_index(cmap: &CongruenceMap) -> u32 {
    let f = &*cmap.field;
    let d = cmap.d as u64;
    let s = cmap.residue_size();
    let x = f.div(cmap.alpha, f.add(f.one(), cmap.alpha));
    (1..=d)
        .filter(|r| d % r == 0)
        .find(|&r| is_dth_power(f.pow(x, r), d, s, f))
        .unwrap_or(d as u64) as u32
}

/// Deterministic search for a congruence polynomial of degree `e` with the
/// given partite index.
///
/// For `target_r = 1`, `beta` runs over `F_{q^e}^*` (as a subfield of the
/// working field, in its lexicographic order), skipping `beta^d = 1`, and the
/// first `alpha = beta^d / (1 - beta^d)` generating `F_{q^e}` is taken. For
/// other `r`, monic irreducible polynomials of degree `e` are scanned in
/// lexicographic coefficient order.
pub fn search_polynomial(q: u64, d: usize, e: u32, target_r: u32) -> Result<CongruenceMap> {
    let (_, m) = odd_prime_power(q)?;
    if e < 2 {
        return param("e must be at least 2");
    }
    if d < 2 {
        return param("d must be at least 2");
    }
    if target_r == 0 || d as u32 % target_r != 0 {
        return param(format!("partite index {target_r} does not divide d = {d}"));
    }
    let field = CongruenceMap::working_field(d, q, e)?;
    let f = &*field;
    let elems = f.subfield_elements(m * e)?;
    if target_r == 1 {
        for &beta in &elems {
            if beta.is_zero() {
                continue;
            }
            let bd = f.pow(beta, d as u64);
            if bd == f.one() {
                continue;
            }
            let alpha = f.div(bd, f.sub(f.one(), bd));
            let mp = f.minimal_polynomial(alpha, m)?;
            if mp.degree() == Some(e as usize) {
                let cmap = CongruenceMap::new(d, q, mp, field.clone())?;
                debug_assert_eq!(partite_index(&cmap), 1);
                return Ok(cmap);
            }
        }
    } else {
        let mut polys: Vec<Poly> = Vec::new();
        for &a in &elems {
            let mp = f.minimal_polynomial(a, m)?;
            if mp.degree() == Some(e as usize) {
                polys.push(mp);
            }
        }
        polys.sort_by_key(|p| p.lex_key(f));
        polys.dedup();
        for mp in polys {
            let cmap = CongruenceMap::new(d, q, mp, field.clone())?;
            if partite_index(&cmap) == target_r {
                return Ok(cmap);
            }
        }
    }
    Err(Error::NotFound(format!("no degree-{e} polynomial over F_{q} with partite index {target_r} for d = {d}")))
}

/// An element of `PGL_d(K)` whose first nonzero entry (row-major) is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjMatrix {
    d: usize,
    entries: Vec<Fe>,
}

impl ProjMatrix {
    pub fn identity(d: usize) -> ProjMatrix {
        let mut entries = vec![Fe::ZERO; d * d];
        for i in 0..d {
            entries[i * d + i] = Fe::ONE;
        }
        ProjMatrix { d, entries }
    }

    /// Canonicalizes; fails on the zero matrix. Invertibility is checked separately.
    pub fn canonical(d: usize, mut entries: Vec<Fe>, f: &Field) -> Result<ProjMatrix> {
        let lead = entries
            .iter()
            .copied()
            .find(|x| !x.is_zero())
            .ok_or_else(|| Error::Domain("zero matrix".into()))?;
        if lead != Fe::ONE {
            let c = f.inv(lead);
            for x in entries.iter_mut() {
                *x = f.mul(*x, c);
            }
        }
        Ok(ProjMatrix { d, entries })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[Fe] {
        &self.entries
    }

    pub fn mul(&self, o: &ProjMatrix, f: &Field) -> ProjMatrix {
        let d = self.d;
        let mut out = vec![Fe::ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let t = f.mul(a, o.entries[k * d + j]);
                    out[i * d + j] = f.add(out[i * d + j], t);
                }
            }
        }
        ProjMatrix::canonical(d, out, f).expect("product of invertible matrices")
    }

    pub fn determinant(&self, f: &Field) -> Fe {
        let d = self.d;
        let mut rows: Vec<Vec<Fe>> = (0..d).map(|i| self.entries[i * d..(i + 1) * d].to_vec()).collect();
        crate::gf::determinant(&mut rows, f)
    }

    pub fn format(&self, f: &Field) -> String {
        self.entries.iter().map(|&x| f.format(x)).collect::<Vec<_>>().join(";")
    }
}

/// Entrywise evaluation at `y = alpha`, then projective canonicalization.
pub fn reduce_mod_f(m: &ValMatrix, cmap: &CongruenceMap) -> Result<ProjMatrix> {
    let f = &*cmap.field;
    let entries = m.entries().iter().map(|e| e.eval(cmap.alpha, f)).collect::<Result<Vec<_>>>()?;
    let pm = ProjMatrix::canonical(m.dim(), entries, f)?;
    if pm.determinant(f).is_zero() {
        return Err(Error::Domain("reduction is singular".into()));
    }
    Ok(pm)
}

/// Packs canonical matrices into `u128` keys.
#[derive(Clone, Copy, Debug)]
struct Packer {
    bits: u32,
    len: usize,
}

impl Packer {
    fn new(d: usize, f: &Field) -> Result<Packer> {
        let bits = 32 - (f.size() - 1).leading_zeros();
        if (d * d) as u32 * bits > 128 {
            return param(format!("{d}x{d} matrices over a field of order {} do not fit a 128-bit key", f.size()));
        }
        Ok(Packer { bits, len: d * d })
    }

    fn pack(&self, xs: &[Fe]) -> u128 {
        xs.iter().fold(0u128, |acc, x| (acc << self.bits) | x.0 as u128)
    }

    fn unpack(&self, mut key: u128) -> Vec<Fe> {
        let mask = (1u128 << self.bits) - 1;
        let mut out = vec![Fe::ZERO; self.len];
        for i in (0..self.len).rev() {
            out[i] = Fe((key & mask) as u32);
            key >>= self.bits;
        }
        out
    }
}

/// A Cayley graph of a finite quotient with generators labelled by their type
/// offset. `adj[v * degree + k]` is `v` times generator `k`.
#[derive(Clone, Debug)]
pub struct CayleyGraph {
    pub d: usize,
    pub n: usize,
    pub degree: usize,
    pub adj: Vec<u32>,
    pub gen_levels: Vec<u32>,
    /// vertex types modulo `type_modulus`, when that modulus exceeds 1
    pub types: Option<Vec<u32>>,
    pub type_modulus: u32,
}

impl CayleyGraph {
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v * self.degree..(v + 1) * self.degree]
    }

    /// Undirected edges as sorted `(u, v, level)` with `u < v`, where `level`
    /// is the type of a generator taking `u` to `v`; parallel edges collapse.
    pub fn edges(&self) -> Vec<(u32, u32, u32)> {
        let mut out = Vec::with_capacity(self.n * self.degree / 2);
        for v in 0..self.n {
            for (k, &w) in self.neighbors(v).iter().enumerate() {
                if (v as u32) < w {
                    out.push((v as u32, w, self.gen_levels[k]));
                }
            }
        }
        out.sort_unstable();
        out.dedup_by_key(|e| (e.0, e.1));
        out
    }

    /// Sorted simple-graph neighbour lists (loops dropped).
    pub fn simple_adjacency(&self) -> Vec<Vec<u32>> {
        (0..self.n)
            .map(|v| {
                let mut ns: Vec<u32> = self.neighbors(v).iter().copied().filter(|&w| w as usize != v).collect();
                ns.sort_unstable();
                ns.dedup();
                ns
            })
            .collect()
    }
}

pub struct GroupTable {
    pub graph: CayleyGraph,
    pub partite_index: u32,
    pub predicted_order: u128,
    packer: Packer,
    keys: Vec<u128>,
    d: usize,
    q: u64,
    e: u32,
}

impl GroupTable {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn element(&self, i: usize) -> ProjMatrix {
        ProjMatrix { d: self.d, entries: self.packer.unpack(self.keys[i]) }
    }

    /// Header `d q e r order`, then `index matrix` lines.
    pub fn export(&self, f: &Field) -> String {
        let mut s = format!("{} {} {} {} {}\n", self.d, self.q, self.e, self.partite_index, self.len());
        for i in 0..self.len() {
            let _ = writeln!(s, "{i} {}", self.element(i).format(f));
        }
        s
    }

    /// Edge list `u,v,type` with a header line.
    pub fn export_edges(&self) -> String {
        let mut s = String::from("u,v,type\n");
        for (u, v, t) in self.graph.edges() {
            let _ = writeln!(s, "{u},{v},{t}");
        }
        s
    }
}

/// Order the image of `Lambda` must have: `|PSL_d(q^e)| * r`.
pub fn predicted_order(cmap: &CongruenceMap) -> u128 {
    psl_order(cmap.d as u32, cmap.residue_size()) * partite_index(cmap) as u128
}

/// Breadth-first closure of the reduced generators from the identity.
pub fn generate_group(gens: &GeneratorSet, cmap: &CongruenceMap, budget: usize) -> Result<GroupTable> {
    if !Arc::ptr_eq(gens.field(), cmap.field()) {
        return param("generators must be built over the congruence map's working field");
    }
    let f = &*cmap.field;
    let d = cmap.d;
    let r = partite_index(cmap);
    let predicted = predicted_order(cmap);
    if predicted > budget as u128 {
        return Err(Error::Resource {
            what: format!("group of predicted order {predicted} exceeds the budget {budget}"),
            count: 0,
        });
    }
    let packer = Packer::new(d, f)?;
    let images: Vec<ProjMatrix> = gens.all().map(|g| reduce_mod_f(&g.raw, cmap)).collect::<Result<_>>()?;
    let gen_levels: Vec<u32> = gens.all().map(|g| g.level as u32).collect();
    let degree = images.len();
    let id = ProjMatrix::identity(d);
    let mut index: HashMap<u128, u32> = HashMap::with_capacity(predicted as usize);
    let mut keys = vec![packer.pack(&id.entries)];
    index.insert(keys[0], 0);
    let mut types: Vec<u32> = vec![0];
    let mut adj: Vec<u32> = Vec::with_capacity(predicted as usize * degree);
    let mut head = 0;
    while head < keys.len() {
        let g = ProjMatrix { d, entries: packer.unpack(keys[head]) };
        let tg = types[head];
        for (k, s) in images.iter().enumerate() {
            let h = g.mul(s, f);
            let key = packer.pack(&h.entries);
            let th = (tg + gen_levels[k]) % r;
            let j = match index.get(&key) {
                Some(&j) => {
                    if types[j as usize] != th {
                        return Err(Error::Consistency(format!(
                            "type labels mod {r} are inconsistent at element {j}"
                        )));
                    }
                    j
                }
                None => {
                    if keys.len() >= budget {
                        return Err(Error::Resource { what: "group elements".into(), count: keys.len() });
                    }
                    let j = keys.len() as u32;
                    keys.push(key);
                    types.push(th);
                    index.insert(key, j);
                    j
                }
            };
            adj.push(j);
        }
        head += 1;
    }
    if keys.len() as u128 != predicted {
        return Err(Error::Consistency(format!(
            "group has {} elements, expected |PSL_{d}({})| * {r} = {predicted}",
            keys.len(),
            cmap.residue_size()
        )));
    }
    let n = keys.len();
    Ok(GroupTable {
        graph: CayleyGraph {
            d,
            n,
            degree,
            adj,
            gen_levels,
            types: (r > 1).then_some(types),
            type_modulus: r,
        },
        partite_index: r,
        predicted_order: predicted,
        packer,
        keys,
        d,
        q: cmap.q,
        e: cmap.e,
    })
}

/// The type-restoring cover of a non-partite quotient: vertex `g * d + t`
/// stands for `(g, t)` and `(g, t) sigma_i = (g sigma_i, t + i)`.
pub struct CoverTable {
    pub graph: CayleyGraph,
    pub base_len: usize,
}

impl CoverTable {
    pub fn project(&self, v: usize) -> usize {
        v / self.graph.d
    }
}

pub fn cover_group(base: &GroupTable) -> Result<CoverTable> {
    if base.partite_index != 1 {
        return Err(Error::Precondition(format!(
            "the d-cover needs a non-partite quotient (r = 1), got r = {}",
            base.partite_index
        )));
    }
    let g = &base.graph;
    let d = g.d;
    let n = g.n * d;
    let mut adj = Vec::with_capacity(n * g.degree);
    for v in 0..g.n {
        for t in 0..d {
            for (k, &w) in g.neighbors(v).iter().enumerate() {
                adj.push(w * d as u32 + (t as u32 + g.gen_levels[k]) % d as u32);
            }
        }
    }
    Ok(CoverTable {
        graph: CayleyGraph {
            d,
            n,
            degree: g.degree,
            adj,
            gen_levels: g.gen_levels.clone(),
            types: Some((0..n).map(|v| (v % d) as u32).collect()),
            type_modulus: d as u32,
        },
        base_len: g.n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::RatFun;

    #[test]
    fn orders() {
        assert_eq!(psl_order(2, 9), 360);
        assert_eq!(psl_order(2, 81), 265_680);
        assert_eq!(psl_order(3, 9), 42_456_960);
        assert_eq!(psl_order(2, 3), 12);
    }

    #[test]
    fn search_small() {
        let c1 = search_polynomial(3, 2, 2, 1).unwrap();
        assert_eq!(partite_index(&c1), 1);
        let c2 = search_polynomial(3, 2, 2, 2).unwrap();
        assert_eq!(partite_index(&c2), 2);
        assert_ne!(c1.poly(), c2.poly());
        assert!(search_polynomial(3, 2, 2, 3).is_err());
        assert!(search_polynomial(3, 2, 1, 1).is_err());
    }

    #[test]
    fn r2_scan_matches_quadratic_residues() {
        // independent: monic irreducible quadratics over F_3 with root alpha,
        // r = 2 iff alpha/(1+alpha) is a non-square in F_9
        let c2 = search_polynomial(3, 2, 2, 2).unwrap();
        let f = &**c2.field();
        let x = f.div(c2.alpha(), f.add(f.one(), c2.alpha()));
        let squares: std::collections::HashSet<Fe> =
            f.subfield_elements(2).unwrap().into_iter().map(|a| f.mul(a, a)).collect();
        assert!(!squares.contains(&x));
    }

    #[test]
    fn coprime_power_map_forces_r1() {
        // d = 3, q = 5, e = 2: gcd(3, 24) = 3; d = 3, q = 3, e = 2: gcd(3, 8) = 1
        let field = CongruenceMap::working_field(3, 3, 2).unwrap();
        let f = &*field;
        let m = 1;
        for a in f.subfield_elements(2).unwrap() {
            let mp = f.minimal_polynomial(a, m).unwrap();
            if mp.degree() == Some(2) {
                let cmap = CongruenceMap::new(3, 3, mp, field.clone()).unwrap();
                assert_eq!(partite_index(&cmap), 1);
            }
        }
    }

    #[test]
    fn reduction_basics() {
        let cmap = search_polynomial(3, 2, 2, 2).unwrap();
        let f = &**cmap.field();
        let id = ValMatrix::identity(2);
        assert_eq!(reduce_mod_f(&id, &cmap).unwrap(), ProjMatrix::identity(2));
        let y = RatFun::from_poly(Poly::y());
        assert_eq!(reduce_mod_f(&id.scale(&y, f), &cmap).unwrap(), ProjMatrix::identity(2));
        let gens = cmap.generators().unwrap();
        let s: Vec<_> = gens.all().collect();
        for a in &s {
            for b in &s {
                let lhs = reduce_mod_f(&a.raw.mul(&b.raw, f), &cmap).unwrap();
                let rhs = reduce_mod_f(&a.raw, &cmap).unwrap().mul(&reduce_mod_f(&b.raw, &cmap).unwrap(), f);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn user_polynomial_validation() {
        let field = CongruenceMap::working_field(2, 3, 2).unwrap();
        let f = &*field;
        // y^2 + 1 is irreducible over F_3; y^2 - 1 is not; y^2 + y vanishes at 0
        assert!(CongruenceMap::new(2, 3, Poly::from_ints(&[1, 0, 1], f), field.clone()).is_ok());
        assert!(CongruenceMap::new(2, 3, Poly::from_ints(&[-1, 0, 1], f), field.clone()).is_err());
        assert!(CongruenceMap::new(2, 3, Poly::from_ints(&[0, 1, 1], f), field.clone()).is_err());
        assert!(CongruenceMap::new(2, 3, Poly::from_ints(&[1, 1], f), field.clone()).is_err());
    }

    #[test]
    fn pgl2_9_and_psl2_9() {
        for (r, n) in [(2, 720), (1, 360)] {
            let cmap = search_polynomial(3, 2, 2, r).unwrap();
            let gens = cmap.generators().unwrap();
            let g = generate_group(&gens, &cmap, 10_000).unwrap();
            assert_eq!(g.len(), n);
            assert_eq!(g.partite_index, r);
            assert_eq!(g.graph.degree, 4);
            assert_eq!(g.graph.types.is_some(), r > 1);
            let text = g.export(cmap.field());
            assert!(text.starts_with(&format!("2 3 2 {r} {n}\n")));
            if r == 1 {
                let c = cover_group(&g).unwrap();
                assert_eq!(c.graph.n, 2 * n);
                let fiber: Vec<u32> = (0..2).map(|t| c.graph.types.as_ref().unwrap()[t]).collect();
                assert_eq!(fiber, vec![0, 1]);
                for v in 0..c.graph.n {
                    for &w in c.graph.neighbors(v) {
                        assert_ne!(c.project(v), c.project(w as usize));
                    }
                }
            } else {
                assert!(cover_group(&g).is_err());
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let cmap = search_polynomial(3, 2, 2, 2).unwrap();
        let gens = cmap.generators().unwrap();
        assert!(matches!(generate_group(&gens, &cmap, 100), Err(Error::Resource { .. })));
    }

    #[test]
    fn packing_round_trip() {
        let f = Field::new(3, 6).unwrap();
        let p = Packer::new(3, &f).unwrap();
        let xs: Vec<Fe> = (0..9).map(|i| f.exp(i * 77)).collect();
        assert_eq!(p.unpack(p.pack(&xs)), xs);
        let big = Field::new(3, 12).unwrap();
        assert!(Packer::new(4, &big).is_err());
    }
}
