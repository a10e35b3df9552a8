//! Spectra of graph operators: dense eigendecomposition for small inputs, a
//! thick-restart Lanczos solver for the second eigenvalue of large sparse
//! graphs, the two-step Hecke row check on building balls, and closed-form
//! eigenvalue bounds.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::Ratio;
use rayon::prelude::*;

use crate::complex::{BipartiteIncidence, MultiGraph};
use crate::cslattice::BuildingBall;
use crate::error::{Error, Result};
use crate::laurent::RelPosition;
use crate::quotient::CayleyGraph;
use crate::rng::SplitMix64;

pub const DENSE_THRESHOLD: usize = 4096;
pub const EIGEN_TOL: f64 = 1e-6;

/// A linear operator on `R^n` applied without forming its matrix.
pub trait Operator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn is_symmetric(&self) -> bool {
        true
    }
}

/// Sparse symmetric matrix in compressed rows; parallel edges add up.
#[derive(Clone, Debug)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseSym {
    /// From weighted rows; symmetry is the caller's contract, checked by [`check_symmetry`].
    pub fn from_rows(rows: Vec<Vec<(u32, f64)>>) -> SparseSym {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut r in rows {
            r.sort_by_key(|&(c, _)| c);
            let mut merged: Vec<(u32, f64)> = Vec::with_capacity(r.len());
            for (c, v) in r {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            for (c, v) in merged {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        SparseSym { n, row_ptr, cols, vals }
    }

    pub fn from_adjacency(adj: &[Vec<u32>]) -> SparseSym {
        Self::from_rows(adj.iter().map(|ns| ns.iter().map(|&w| (w, 1.0)).collect()).collect())
    }

    /// Cayley graph with multiplicities (one unit per generator).
    pub fn from_cayley(g: &CayleyGraph) -> SparseSym {
        Self::from_rows((0..g.n).map(|v| g.neighbors(v).iter().map(|&w| (w, 1.0)).collect()).collect())
    }

    /// The bipartite graph `B_i` on `left ++ right`.
    pub fn from_incidence(b: &BipartiteIncidence) -> SparseSym {
        let nl = b.left.len() as u32;
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); b.left.len() + b.right.len()];
        for &(a, w) in &b.edges {
            rows[a as usize].push((nl + w, 1.0));
            rows[(nl + w) as usize].push((a, 1.0));
        }
        Self::from_rows(rows)
    }

    pub fn from_multigraph(m: &MultiGraph) -> SparseSym {
        Self::from_rows(m.rows.iter().map(|r| r.iter().map(|&(w, c)| (w, c as f64)).collect()).collect())
    }

    pub fn row(&self, v: usize) -> impl Iterator<Item = (u32, f64)> + '_ {
        let (a, b) = (self.row_ptr[v], self.row_ptr[v + 1]);
        self.cols[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for v in 0..self.n {
            for (w, x) in self.row(v) {
                m[(v, w as usize)] += x;
            }
        }
        m
    }
}

impl Operator for SparseSym {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(v, out)| {
            *out = self.row(v).map(|(w, a)| a * x[w as usize]).sum();
        });
    }
}

/// Dense operator; symmetry is read off the matrix.
pub struct DenseOp(pub DMatrix<f64>);

impl Operator for DenseOp {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        for (i, out) in y.iter_mut().enumerate() {
            *out = (0..n).map(|j| self.0[(i, j)] * x[j]).sum();
        }
    }

    fn is_symmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..i).all(|j| (self.0[(i, j)] - self.0[(j, i)]).abs() <= 1e-12))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Largest `|<Av,w> - <v,Aw>|` over seeded random probes, relative to `|v||w||A|`-scale.
pub fn check_symmetry(op: &dyn Operator, probes: usize, seed: u64) -> f64 {
    let n = op.dim();
    let mut rng = SplitMix64::new(seed);
    let mut worst: f64 = 0.0;
    let (mut av, mut aw) = (vec![0.0; n], vec![0.0; n]);
    for _ in 0..probes {
        let v: Vec<f64> = (0..n).map(|_| rng.next_f64() - 0.5).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.next_f64() - 0.5).collect();
        op.apply(&v, &mut av);
        op.apply(&w, &mut aw);
        let scale = norm(&av).max(norm(&aw)).max(1.0) * norm(&v).max(norm(&w)).max(1.0);
        worst = worst.max((dot(&av, &w) - dot(&v, &aw)).abs() / scale);
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Dense,
    Iterative,
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    /// descending
    pub eigenvalues: Vec<f64>,
    pub method: Method,
    pub residual: f64,
}

impl Spectrum {
    /// CSV `index,eigenvalue`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,eigenvalue\n");
        for (i, x) in self.eigenvalues.iter().enumerate() {
            let _ = writeln!(s, "{i},{x:.12}");
        }
        s
    }
}

fn densify(op: &dyn Operator) -> DMatrix<f64> {
    let n = op.dim();
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
        e[j] = 0.0;
    }
    m
}

/// Full eigendecomposition: eigenvalues descending with matching eigenvector columns.
pub fn dense_eigen(op: &dyn Operator, threshold: usize) -> Result<(Spectrum, DMatrix<f64>)> {
    let n = op.dim();
    if n > threshold {
        return Err(Error::Precondition(format!("dimension {n} exceeds the dense threshold {threshold}")));
    }
    if !op.is_symmetric() {
        return Err(Error::Precondition("dense spectrum needs a symmetric operator".into()));
    }
    let a = densify(op);
    if (0..n).any(|i| (0..i).any(|j| (a[(i, j)] - a[(j, i)]).abs() > 1e-12)) {
        return Err(Error::Precondition("operator matrix is not symmetric".into()));
    }
    if n == 0 {
        return Ok((Spectrum { eigenvalues: vec![], method: Method::Dense, residual: 0.0 }, a));
    }
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    let recon = &vectors * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(values.clone())) * vectors.transpose();
    let residual = (&recon - &a).norm() / a.norm().max(1.0);
    if residual > 1e-9 {
        return Err(Error::Numeric { msg: "dense eigendecomposition does not reconstruct".into(), residual });
    }
    Ok((Spectrum { eigenvalues: values, method: Method::Dense, residual }, vectors))
}

pub fn dense_spectrum(op: &dyn Operator) -> Result<Spectrum> {
    Ok(dense_eigen(op, DENSE_THRESHOLD)?.0)
}

/// Multiset symmetry `{l} = {-l}`: returns the verdict at `1e-8` and the worst mismatch.
pub fn spectrum_symmetry_check(spec: &Spectrum) -> (bool, f64) {
    let mut v = spec.eigenvalues.clone();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let worst = (0..n).map(|i| (v[i] + v[n - 1 - i]).abs()).fold(0.0, f64::max);
    (worst <= 1e-8, worst)
}

#[derive(Clone, Debug)]
pub struct LanczosConfig {
    pub max_basis: usize,
    pub keep: usize,
    pub max_restarts: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig { max_basis: 60, keep: 25, max_restarts: 2000, tol: EIGEN_TOL, seed: 0x5EED }
    }
}

#[derive(Clone, Debug)]
pub struct SecondEigen {
    /// largest `|lambda|` on the complement of the excluded vectors
    pub value: f64,
    /// signed Ritz value attaining it
    pub signed: f64,
    pub residual: f64,
    pub matvecs: usize,
}

fn orthonormalize(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let c = dot(u, &w);
                axpy(-c, u, &mut w);
            }
        }
        let nw = norm(&w);
        if nw > 1e-12 {
            w.iter_mut().for_each(|x| *x /= nw);
            out.push(w);
        }
    }
    out
}

fn project_out(basis: &[Vec<f64>], w: &mut [f64]) {
    for _ in 0..2 {
        for u in basis {
            let c = dot(u, w);
            axpy(-c, u, w);
        }
    }
}

/// Largest eigenvalue modulus of a symmetric operator on the orthogonal
/// complement of `exclude`, by thick-restart Lanczos with full
/// reorthogonalization. Converged when the Ritz residual is below `tol`.
pub fn second_eigenvalue(op: &dyn Operator, exclude: &[Vec<f64>], cfg: &LanczosConfig) -> Result<SecondEigen> {
    if !op.is_symmetric() {
        return Err(Error::Precondition("second eigenvalue needs a symmetric operator".into()));
    }
    let n = op.dim();
    let ex = orthonormalize(exclude);
    let room = n.saturating_sub(ex.len());
    if room == 0 {
        return Ok(SecondEigen { value: 0.0, signed: 0.0, residual: 0.0, matvecs: 0 });
    }
    let m = cfg.max_basis.min(room).max(1);
    let keep = cfg.keep.min(m.saturating_sub(1));
    let mut rng = SplitMix64::new(cfg.seed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.next_f64() - 0.5).collect();
    project_out(&ex, &mut start);
    let ns = norm(&start);
    if ns < 1e-12 {
        return Err(Error::Numeric { msg: "start vector vanished after deflation".into(), residual: ns });
    }
    start.iter_mut().for_each(|x| *x /= ns);

    let mut basis: Vec<Vec<f64>> = vec![start];
    let mut h = DMatrix::<f64>::zeros(m, m);
    let mut k = 0usize;
    let mut matvecs = 0usize;
    let mut w = vec![0.0; n];
    let mut best = (0.0f64, 0.0f64, f64::INFINITY);
    for _restart in 0..=cfg.max_restarts {
        let mut size = m;
        let mut beta = 0.0;
        for j in k..m {
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            project_out(&ex, &mut w);
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let c = dot(v, &w);
                    axpy(-c, v, &mut w);
                    if i <= j {
                        h[(i, j)] += c;
                    }
                }
            }
            for i in 0..j {
                h[(j, i)] = h[(i, j)];
            }
            beta = norm(&w);
            if beta < 1e-10 * h[(j, j)].abs().max(1.0) {
                size = j + 1;
                break;
            }
            if j + 1 < m {
                h[(j + 1, j)] = beta;
                h[(j, j + 1)] = 0.0;
                basis.push(w.iter().map(|x| x / beta).collect());
            }
        }
        let invariant = size < m || basis.len() >= room;
        let sub = h.view((0, 0), (size, size)).clone_owned();
        let sub = (&sub + sub.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sub);
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()));
        let top = order[0];
        let theta = eig.eigenvalues[top];
        let res = if invariant { 0.0 } else { beta * eig.eigenvectors[(size - 1, top)].abs() };
        best = (theta.abs(), theta, res);
        if invariant || res <= cfg.tol {
            return Ok(SecondEigen { value: theta.abs(), signed: theta, residual: res, matvecs });
        }
        // restart with the `keep` Ritz vectors of largest modulus plus the residual direction
        let f: Vec<f64> = w.iter().map(|x| x / beta).collect();
        let mut new_basis: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut new_h = DMatrix::<f64>::zeros(m, m);
        for (slot, &idx) in order.iter().take(keep).enumerate() {
            let y = eig.eigenvectors.column(idx);
            let mut v = vec![0.0; n];
            for (c, b) in basis.iter().enumerate() {
                axpy(y[c], b, &mut v);
            }
            new_basis.push(v);
            new_h[(slot, slot)] = eig.eigenvalues[idx];
        }
        new_basis.push(f);
        basis = new_basis;
        h = new_h;
        k = keep;
    }
    Err(Error::Numeric { msg: format!("Lanczos did not converge (estimate {})", best.0), residual: best.2 })
}

/// Top eigenvector pair of a `(k1, k2)`-biregular bipartite graph:
/// `sqrt(k1) 1_{V1} + sqrt(k2) 1_{V2}` and its sign-flipped partner.
/// `side[v]` is true on `V1` (vertices of degree `k1`).
pub fn biregular_top_pair(side: &[bool], k1: f64, k2: f64) -> [Vec<f64>; 2] {
    let (a, b) = (k1.sqrt(), k2.sqrt());
    [
        side.iter().map(|&s| if s { a } else { b }).collect(),
        side.iter().map(|&s| if s { a } else { -b }).collect(),
    ]
}

/// `lambda / sqrt(k1 k2)` for a biregular graph given its degree sequence
/// on each side.
pub fn normalized_lambda(left_degrees: &[usize], right_degrees: &[usize], lambda: f64) -> Result<f64> {
    let constant = |v: &[usize]| {
        let first = *v.first()?;
        v.iter().all(|&x| x == first).then_some(first)
    };
    match (constant(left_degrees), constant(right_degrees)) {
        (Some(k1), Some(k2)) if k1 > 0 && k2 > 0 => Ok(lambda / ((k1 * k2) as f64).sqrt()),
        _ => Err(Error::Precondition("normalized eigenvalue needs a biregular graph".into())),
    }
}

/// `lambda(B)` and `~lambda(B)` for a vertex-wall incidence graph.
pub fn incidence_lambda(b: &BipartiteIncidence, cfg: &LanczosConfig) -> Result<(f64, f64)> {
    let (k1, k2) = b
        .biregularity()
        .ok_or_else(|| Error::Precondition("incidence graph is not biregular".into()))?;
    let op = SparseSym::from_incidence(b);
    let side: Vec<bool> = (0..op.dim()).map(|v| v < b.left.len()).collect();
    let ex = biregular_top_pair(&side, k1 as f64, k2 as f64);
    let lambda = if op.dim() <= DENSE_THRESHOLD.min(2000) {
        lambda_dense(&op, &ex)?
    } else {
        second_eigenvalue(&op, &ex, cfg)?.value
    };
    Ok((lambda, lambda / ((k1 * k2) as f64).sqrt()))
}

/// Largest `|lambda|` of the operator compressed to the complement of
/// `exclude`, from a dense decomposition.
pub fn lambda_dense(op: &dyn Operator, exclude: &[Vec<f64>]) -> Result<f64> {
    let n = op.dim();
    let ex = orthonormalize(exclude);
    if ex.len() >= n {
        return Ok(0.0);
    }
    let a = densify(op);
    let mut p = DMatrix::<f64>::identity(n, n);
    for u in &ex {
        let uv = nalgebra::DVector::from_column_slice(u);
        p -= &uv * uv.transpose();
    }
    let c = &p * a * &p;
    let (spec, _) = dense_eigen(&DenseOp((&c + c.transpose()) * 0.5), n)?;
    // the compressed operator has `ex.len()` spurious zeros; they never exceed the true maximum
    Ok(spec.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

#[derive(Clone, Debug)]
pub struct HeckeReport {
    pub q: u64,
    /// facets through the center, one cotype-0 wall each
    pub walls_at_center: usize,
    pub self_weight: Ratio<i64>,
    /// weight per reached vertex, grouped by relative position
    pub weights: BTreeMap<RelPosition, Vec<Ratio<i64>>>,
    /// `|{y : relpos(x0, y) = (0,1,..,1,2)}|` counted in the ball
    pub class_size: usize,
    pub offending: Vec<RelPosition>,
}

impl HeckeReport {
    pub fn ok(&self) -> bool {
        self.offending.is_empty()
    }
}

/// Row of the normalized two-step operator through cotype-0 walls at the
/// center (which has type 0): compares it with
/// `1/(q+1) delta + q/(q+1) uniform(class (0,1,..,1,2))` exactly.
pub fn hecke_row_check(ball: &BuildingBall) -> Result<HeckeReport> {
    if ball.radius() < 2 {
        return Err(Error::Precondition("the Hecke row check needs a ball of radius at least 2".into()));
    }
    let d = ball.d();
    let q = ball.q() as i64;
    let star: Vec<&Vec<u32>> = ball.facets.iter().filter(|f| f[0] == 0).collect();
    let k = star.len();
    if k == 0 {
        return Err(Error::Precondition("center has no facets".into()));
    }
    // facets containing each wall of the center's star, keyed by the wall
    let mut completions: BTreeMap<Vec<u32>, Vec<u32>> = BTreeMap::new();
    for f in &star {
        completions.insert(f[1..].to_vec(), Vec::new());
    }
    for f in &ball.facets {
        for drop in 0..d {
            let v = f[drop];
            if ball.vertices[v as usize].vtype != 0 {
                continue;
            }
            let w: Vec<u32> = f.iter().copied().filter(|&x| x != v).collect();
            if let Some(list) = completions.get_mut(&w) {
                list.push(v);
            }
        }
    }
    let mut count: BTreeMap<u32, i64> = BTreeMap::new();
    for list in completions.values() {
        for &y in list {
            *count.entry(y).or_insert(0) += 1;
        }
    }
    let denom = k as i64 * (q + 1);
    let self_weight = Ratio::new(*count.get(&0).unwrap_or(&0), denom);
    let target = RelPosition::wall_partner(d);
    let class_size = ball.vertices.iter().filter(|v| v.relpos == target).count();
    let mut weights: BTreeMap<RelPosition, Vec<Ratio<i64>>> = BTreeMap::new();
    for (&y, &c) in &count {
        if y == 0 {
            continue;
        }
        weights.entry(ball.vertices[y as usize].relpos.clone()).or_default().push(Ratio::new(c, denom));
    }
    let mut offending = Vec::new();
    if self_weight != Ratio::new(1, q + 1) {
        offending.push(RelPosition::origin(d));
    }
    for pos in weights.keys() {
        if *pos != target {
            offending.push(pos.clone());
        }
    }
    let uniform = Ratio::new(q, q + 1) / Ratio::from_integer(class_size.max(1) as i64);
    let on_class = weights.get(&target).map_or(0, Vec::len);
    let class_ok = class_size > 0
        && on_class == class_size
        && weights.get(&target).is_some_and(|ws| ws.iter().all(|&w| w == uniform));
    if !class_ok {
        offending.push(target);
    }
    Ok(HeckeReport { q: q as u64, walls_at_center: k, self_weight, weights, class_size, offending })
}

/// The bound `q^{-n/2} (n(q-1)+q+1)/(q+1)` with its cruder form `(n+1) q^{-n/2}`.
#[derive(Clone, Copy, Debug)]
pub struct XiBound {
    pub rational_factor: Ratio<u64>,
    pub value: f64,
    pub crude: f64,
}

pub fn xi_pgl2(n: u32, q: u64) -> XiBound {
    let rational_factor = Ratio::new(n as u64 * (q - 1) + q + 1, q + 1);
    let scale = (q as f64).powf(-(n as f64) / 2.0);
    let value = *rational_factor.numer() as f64 / *rational_factor.denom() as f64 * scale;
    let crude = (n as f64 + 1.0) * scale;
    assert!(value <= crude * (1.0 + 1e-12), "xi bound exceeds its crude form");
    XiBound { rational_factor, value, crude }
}

/// `(a_d - a_1 + 1) q^{-(a_d - a_1)/2}`.
pub fn oh_bound(a: &RelPosition, q: u64) -> f64 {
    let n = a.distance() as f64;
    (n + 1.0) * (q as f64).powf(-n / 2.0)
}

#[derive(Clone, Copy, Debug)]
pub struct LambdaBound {
    /// `sqrt(1/(q+1) + q/(q+1) * 3/q)`
    pub exact: f64,
    /// `2 / sqrt(q)`
    pub simplified: f64,
}

impl LambdaBound {
    /// The simplified bound says nothing when it exceeds 1.
    pub fn is_vacuous(&self) -> bool {
        self.simplified > 1.0
    }
}

pub fn lambda_theoretical_bound(q: u64) -> LambdaBound {
    let qf = q as f64;
    let exact = (1.0 / (qf + 1.0) + qf / (qf + 1.0) * oh_bound(&RelPosition::wall_partner(3), q)).sqrt();
    let simplified = 2.0 / qf.sqrt();
    assert!(exact <= simplified * (1.0 + 1e-12), "bound ordering violated");
    LambdaBound { exact, simplified }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cslattice::{building_ball, generators};

    fn cycle(n: u32) -> Vec<Vec<u32>> {
        (0..n)
            .map(|v| {
                let mut ns = vec![(v + 1) % n, (v + n - 1) % n];
                ns.sort_unstable();
                ns
            })
            .collect()
    }

    fn complete_bipartite(a: u32, b: u32) -> Vec<Vec<u32>> {
        (0..a + b).map(|v| if v < a { (a..a + b).collect() } else { (0..a).collect() }).collect()
    }

    #[test]
    fn dense_examples() {
        let s = dense_spectrum(&SparseSym::from_adjacency(&complete_bipartite(2, 3))).unwrap();
        assert!((s.eigenvalues[0] - 6f64.sqrt()).abs() < 1e-12);
        assert!(s.eigenvalues[1].abs() < 1e-12);
        let s = dense_spectrum(&SparseSym::from_adjacency(&cycle(6))).unwrap();
        let expect = [2.0, 1.0, 1.0, -1.0, -1.0, -2.0];
        for (a, b) in s.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(spectrum_symmetry_check(&s).0);
        let z = dense_spectrum(&DenseOp(DMatrix::zeros(1, 1))).unwrap();
        assert_eq!(z.eigenvalues, vec![0.0]);
        assert!(dense_spectrum(&DenseOp(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]))).is_err());
        let tri = dense_spectrum(&SparseSym::from_adjacency(&[vec![1, 2], vec![0, 2], vec![0, 1]])).unwrap();
        assert!(!spectrum_symmetry_check(&tri).0);
        let empty = Spectrum { eigenvalues: vec![], method: Method::Dense, residual: 0.0 };
        assert!(spectrum_symmetry_check(&empty).0);
    }

    #[test]
    fn second_eigenvalue_examples() {
        let cfg = LanczosConfig::default();
        let op = SparseSym::from_adjacency(&cycle(6));
        let side: Vec<bool> = (0..6).map(|v| v % 2 == 0).collect();
        let ex = biregular_top_pair(&side, 2.0, 2.0);
        let l = second_eigenvalue(&op, &ex, &cfg).unwrap();
        assert!((l.value - 1.0).abs() < 1e-6);
        assert!((lambda_dense(&op, &ex).unwrap() - 1.0).abs() < 1e-9);
        assert!((normalized_lambda(&[2, 2, 2], &[2, 2, 2], l.value).unwrap() - 0.5).abs() < 1e-6);
        let op = SparseSym::from_adjacency(&complete_bipartite(4, 4));
        let side: Vec<bool> = (0..8).map(|v| v < 4).collect();
        let ex = biregular_top_pair(&side, 4.0, 4.0);
        assert!(second_eigenvalue(&op, &ex, &cfg).unwrap().value < 1e-6);
        assert!(normalized_lambda(&[1, 2], &[1], 1.0).is_err());
    }

    #[test]
    fn lanczos_agrees_with_dense_on_a_larger_graph() {
        // circulant graph on 400 vertices, connections +-1, +-7, +-30
        let n = 400u32;
        let adj: Vec<Vec<u32>> = (0..n)
            .map(|v| {
                let mut ns: Vec<u32> = [1, 7, 30].iter().flat_map(|&s| [(v + s) % n, (v + n - s) % n]).collect();
                ns.sort_unstable();
                ns
            })
            .collect();
        let op = SparseSym::from_adjacency(&adj);
        let ones = vec![vec![1.0; n as usize]];
        let it = second_eigenvalue(&op, &ones, &LanczosConfig::default()).unwrap();
        let de = lambda_dense(&op, &ones).unwrap();
        assert!((it.value - de).abs() < 1e-6, "{} vs {}", it.value, de);
        assert!(check_symmetry(&op, 5, 1) < 1e-12);
    }

    #[test]
    fn hecke_row_d3() {
        let gens = generators(3, 3).unwrap();
        let ball = building_ball(&gens, 2, 10_000).unwrap();
        let rep = hecke_row_check(&ball).unwrap();
        assert!(rep.ok(), "{:?}", rep.offending);
        assert_eq!(rep.self_weight, Ratio::new(1, 4));
        assert_eq!(rep.walls_at_center, 52);
        assert_eq!(rep.class_size, 156);
    }

    #[test]
    fn hecke_row_d2() {
        let gens = generators(2, 5).unwrap();
        let ball = building_ball(&gens, 2, 10_000).unwrap();
        let rep = hecke_row_check(&ball).unwrap();
        assert!(rep.ok());
        assert_eq!(rep.self_weight, Ratio::new(1, 6));
        assert_eq!(rep.class_size, 30);
    }

    #[test]
    fn closed_forms() {
        assert!((xi_pgl2(0, 3).value - 1.0).abs() < 1e-12);
        let x = xi_pgl2(1, 3);
        assert!((x.value - 1.5 / 3f64.sqrt()).abs() < 1e-12);
        let x = xi_pgl2(2, 3);
        assert!((x.value - 2.0 / 3.0).abs() < 1e-12 && (x.crude - 1.0).abs() < 1e-12);
        assert!((oh_bound(&RelPosition::origin(3), 9) - 1.0).abs() < 1e-12);
        assert!((oh_bound(&RelPosition::wall_partner(4), 9) - 1.0 / 3.0).abs() < 1e-12);
        assert!((oh_bound(&RelPosition::neighbor(3, 1), 4) - 1.0).abs() < 1e-12);
        let b = lambda_theoretical_bound(9);
        assert!((b.exact - 0.4f64.sqrt()).abs() < 1e-12 && (b.simplified - 2.0 / 3.0).abs() < 1e-12);
        assert!(lambda_theoretical_bound(3).is_vacuous());
    }
}
