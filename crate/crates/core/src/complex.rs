//! Pure simplicial complexes stored as `d`-uniform hypergraphs with an
//! optional type function, their walls, the vertex-wall incidence graphs and
//! the two-step multigraphs.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{param, Error, Result};
use crate::quotient::CayleyGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartiteHypergraph {
    d: usize,
    n: usize,
    /// modulus of the type function; 1 when there is none
    r: u32,
    types: Option<Vec<u32>>,
    facets: Vec<Vec<u32>>,
}

impl PartiteHypergraph {
    /// Validates and normalizes: facets are sorted tuples, listed in
    /// lexicographic order without repetition.
    pub fn new(d: usize, n: usize, r: u32, types: Option<Vec<u32>>, facets: Vec<Vec<u32>>) -> Result<Self> {
        if d < 2 {
            return param("facets need at least 2 vertices");
        }
        if r == 0 || d as u32 % r != 0 {
            return param(format!("type modulus {r} does not divide d = {d}"));
        }
        if let Some(t) = &types {
            if t.len() != n {
                return param(format!("{} type labels for {n} vertices", t.len()));
            }
            if t.iter().any(|&x| x >= r) {
                return param(format!("type labels must lie in 0..{r}"));
            }
        } else if r > 1 {
            return param("a type modulus above 1 needs type labels");
        }
        let mut fs = Vec::with_capacity(facets.len());
        for mut f in facets {
            f.sort_unstable();
            if f.len() != d {
                return param(format!("facet {f:?} does not have {d} vertices"));
            }
            if f.windows(2).any(|w| w[0] == w[1]) {
                return param(format!("facet {f:?} repeats a vertex"));
            }
            if f.iter().any(|&v| v as usize >= n) {
                return param(format!("facet {f:?} has a vertex outside 0..{n}"));
            }
            if let (Some(t), true) = (&types, r as usize == d) {
                let mut seen = vec![false; d];
                for &v in &f {
                    let x = t[v as usize] as usize;
                    if seen[x] {
                        return param(format!("types are not one-to-one on facet {f:?}"));
                    }
                    seen[x] = true;
                }
            }
            fs.push(f);
        }
        fs.sort_unstable();
        fs.dedup();
        Ok(PartiteHypergraph { d, n, r, types, facets: fs })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn types(&self) -> Option<&[u32]> {
        self.types.as_deref()
    }

    pub fn facets(&self) -> &[Vec<u32>] {
        &self.facets
    }

    /// Whether the type function is defined mod `d` (one-to-one on facets).
    pub fn is_fully_partite(&self) -> bool {
        self.types.is_some() && self.r as usize == self.d
    }

    pub fn vertices_of_type(&self, i: u32) -> Vec<u32> {
        match &self.types {
            Some(t) => (0..self.n as u32).filter(|&v| t[v as usize] == i).collect(),
            None => Vec::new(),
        }
    }

    /// 1-skeleton as sorted neighbour lists.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n];
        for f in &self.facets {
            for (a, &u) in f.iter().enumerate() {
                for &v in &f[a + 1..] {
                    adj[u as usize].push(v);
                    adj[v as usize].push(u);
                }
            }
        }
        for ns in adj.iter_mut() {
            ns.sort_unstable();
            ns.dedup();
        }
        adj
    }

    /// Number of facets through each vertex.
    pub fn facet_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for f in &self.facets {
            for &v in f {
                deg[v as usize] += 1;
            }
        }
        deg
    }

    pub fn to_rcx(&self) -> String {
        let mut s = format!("RCX d={} n={} r={}\n", self.d, self.n, self.r);
        if let Some(t) = &self.types {
            let parts: Vec<String> = t.iter().map(u32::to_string).collect();
            let _ = writeln!(s, "types: {}", parts.join(" "));
        }
        for f in &self.facets {
            let parts: Vec<String> = f.iter().map(u32::to_string).collect();
            let _ = writeln!(s, "{}", parts.join(" "));
        }
        s
    }

    pub fn from_rcx(text: &str) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines.next().ok_or_else(|| perr(1, "empty input".into()))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("RCX") {
            return Err(perr(ln, "expected header 'RCX d=<d> n=<n> r=<r>'".into()));
        }
        let mut get = |key: &str| -> Result<usize> {
            let tok = fields.next().ok_or_else(|| perr(ln, format!("missing {key}=")))?;
            tok.strip_prefix(key)
                .and_then(|v| v.strip_prefix('='))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| perr(ln, format!("bad header field '{tok}'")))
        };
        let d = get("d")?;
        let n = get("n")?;
        let r = get("r")? as u32;
        let mut types = None;
        let mut facets = Vec::new();
        for (ln, l) in lines {
            if let Some(rest) = l.strip_prefix("types:") {
                if types.is_some() || !facets.is_empty() {
                    return Err(perr(ln, "types line must directly follow the header".into()));
                }
                let t = rest
                    .split_whitespace()
                    .map(|x| x.parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| perr(ln, format!("bad type label: {e}")))?;
                types = Some(t);
                continue;
            }
            let f = l
                .split_whitespace()
                .map(|x| x.parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| perr(ln, format!("bad vertex index: {e}")))?;
            if f.len() != d {
                return Err(perr(ln, format!("facet has {} vertices, expected {d}", f.len())));
            }
            if let Some(&v) = f.iter().find(|&&v| v as usize >= n) {
                return Err(perr(ln, format!("vertex {v} out of range 0..{n}")));
            }
            facets.push(f);
        }
        PartiteHypergraph::new(d, n, r, types, facets).map_err(|e| perr(0, e.to_string()))
    }
}

pub fn write_complex(h: &PartiteHypergraph, path: &Path) -> Result<()> {
    std::fs::write(path, h.to_rcx())?;
    Ok(())
}

pub fn read_complex(path: &Path) -> Result<PartiteHypergraph> {
    PartiteHypergraph::from_rcx(&std::fs::read_to_string(path)?)
}

/// All `k`-cliques as sorted tuples, in lexicographic order, by ordered
/// expansion over sorted adjacency lists.
pub fn cliques_of_size(adj: &[Vec<u32>], k: usize) -> Vec<Vec<u32>> {
    fn extend(adj: &[Vec<u32>], cur: &mut Vec<u32>, cand: &[u32], k: usize, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for (pos, &v) in cand.iter().enumerate() {
            if cand.len() - pos + cur.len() < k {
                break;
            }
            let rest: Vec<u32> =
                cand[pos + 1..].iter().copied().filter(|w| adj[v as usize].binary_search(w).is_ok()).collect();
            cur.push(v);
            extend(adj, cur, &rest, k, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for v in 0..adj.len() as u32 {
        let cand: Vec<u32> = adj[v as usize].iter().copied().filter(|&w| w > v).collect();
        let mut cur = vec![v];
        extend(adj, &mut cur, &cand, k, &mut out);
    }
    out
}

/// Sizes of all maximal cliques (Bron-Kerbosch with pivoting), as a histogram.
pub fn maximal_clique_sizes(adj: &[Vec<u32>]) -> BTreeMap<usize, usize> {
    fn bk(adj: &[Vec<u32>], rsize: usize, p: Vec<u32>, x: Vec<u32>, hist: &mut BTreeMap<usize, usize>) {
        if p.is_empty() {
            if x.is_empty() {
                *hist.entry(rsize).or_insert(0) += 1;
            }
            return;
        }
        let nb = |v: u32, w: &u32| adj[v as usize].binary_search(w).is_ok();
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| p.iter().filter(|w| nb(u, w)).count())
            .expect("p is nonempty");
        let mut p = p;
        let mut x = x;
        let branch: Vec<u32> = p.iter().copied().filter(|w| !nb(pivot, w)).collect();
        for v in branch {
            let np: Vec<u32> = p.iter().copied().filter(|w| nb(v, w)).collect();
            let nx: Vec<u32> = x.iter().copied().filter(|w| nb(v, w)).collect();
            bk(adj, rsize + 1, np, nx, hist);
            p.retain(|&w| w != v);
            x.push(v);
        }
    }
    let mut hist = BTreeMap::new();
    // each vertex seeds the maximal cliques whose smallest vertex it is
    for v in 0..adj.len() as u32 {
        let p: Vec<u32> = adj[v as usize].iter().copied().filter(|&w| w > v).collect();
        let x: Vec<u32> = adj[v as usize].iter().copied().filter(|&w| w < v).collect();
        bk(adj, 1, p, x, &mut hist);
    }
    hist
}

#[derive(Clone, Debug)]
pub struct PurityReport {
    /// maximal clique size -> number of maximal cliques
    pub maximal_cliques: BTreeMap<usize, usize>,
    pub d: usize,
}

impl PurityReport {
    pub fn is_pure(&self) -> bool {
        self.maximal_cliques.keys().all(|&s| s == self.d)
    }
}

/// The `d`-clique complex of a simple graph, with an optional type function
/// `(labels, modulus)`. Impurity is reported, not an error.
pub fn clique_complex(
    adj: &[Vec<u32>],
    d: usize,
    types: Option<(Vec<u32>, u32)>,
) -> Result<(PartiteHypergraph, PurityReport)> {
    for (v, ns) in adj.iter().enumerate() {
        if ns.windows(2).any(|w| w[0] >= w[1]) || ns.binary_search(&(v as u32)).is_ok() {
            return param(format!("adjacency of vertex {v} is not a sorted simple list"));
        }
        if ns.iter().any(|&w| adj.get(w as usize).is_none_or(|m| m.binary_search(&(v as u32)).is_err())) {
            return param(format!("adjacency of vertex {v} is not symmetric"));
        }
    }
    let facets = cliques_of_size(adj, d);
    let (t, r) = match types {
        Some((t, r)) => (Some(t), r),
        None => (None, 1),
    };
    let h = PartiteHypergraph::new(d, adj.len(), r, t, facets)?;
    let report = PurityReport { maximal_cliques: maximal_clique_sizes(adj), d };
    Ok((h, report))
}

/// Cayley complex of a quotient or cover.
pub fn cayley_complex(g: &CayleyGraph) -> Result<(PartiteHypergraph, PurityReport)> {
    let types = g.types.clone().map(|t| (t, g.type_modulus));
    clique_complex(&g.simple_adjacency(), g.d, types)
}

/// Vertex-versus-wall graph for one type.
#[derive(Clone, Debug)]
pub struct BipartiteIncidence {
    /// type-`i` vertices (global indices)
    pub left: Vec<u32>,
    /// cotype-`i` walls as sorted vertex tuples
    pub right: Vec<Vec<u32>>,
    /// `(left index, right index)`, one per facet, in facet order
    pub edges: Vec<(u32, u32)>,
}

impl BipartiteIncidence {
    pub fn left_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.left.len()];
        for &(a, _) in &self.edges {
            deg[a as usize] += 1;
        }
        deg
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.right.len()];
        for &(_, b) in &self.edges {
            deg[b as usize] += 1;
        }
        deg
    }

    /// `(k, l)` when both sides are regular.
    pub fn biregularity(&self) -> Option<(usize, usize)> {
        let constant = |v: Vec<usize>| {
            let first = *v.first()?;
            v.iter().all(|&x| x == first).then_some(first)
        };
        Some((constant(self.left_degrees())?, constant(self.right_degrees())?))
    }
}

/// Walls of cotype `i` (facets minus their type-`i` vertex) and the incidence
/// graph between type-`i` vertices and those walls.
pub fn walls_and_incidence(h: &PartiteHypergraph, i: u32) -> Result<BipartiteIncidence> {
    if !h.is_fully_partite() {
        return Err(Error::Precondition("walls of a given cotype need a type function mod d".into()));
    }
    if i as usize >= h.d {
        return param(format!("type {i} out of range"));
    }
    let t = h.types().expect("checked");
    let left = h.vertices_of_type(i);
    let left_index: HashMap<u32, u32> = left.iter().enumerate().map(|(k, &v)| (v, k as u32)).collect();
    let mut wall_index: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut right = Vec::new();
    let mut edges = Vec::with_capacity(h.facets.len());
    for f in &h.facets {
        let vi = *f.iter().find(|&&v| t[v as usize] == i).expect("types are one-to-one on facets");
        let wall: Vec<u32> = f.iter().copied().filter(|&v| v != vi).collect();
        let b = *wall_index.entry(wall.clone()).or_insert_with(|| {
            right.push(wall);
            right.len() as u32 - 1
        });
        edges.push((left_index[&vi], b));
    }
    Ok(BipartiteIncidence { left, right, edges })
}

/// `N N^t` in counting form: weight of `(u, v)` is the number of walls
/// adjacent to both; the diagonal holds the loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    /// sorted `(neighbour, multiplicity)` per left vertex
    pub rows: Vec<Vec<(u32, u64)>>,
}

impl MultiGraph {
    pub fn loops(&self, v: usize) -> u64 {
        self.rows[v].iter().find(|&&(w, _)| w as usize == v).map_or(0, |&(_, c)| c)
    }

    pub fn row_sum(&self, v: usize) -> u64 {
        self.rows[v].iter().map(|&(_, c)| c).sum()
    }
}

pub fn two_step_multigraph(b: &BipartiteIncidence) -> MultiGraph {
    let mut by_wall: Vec<Vec<u32>> = vec![Vec::new(); b.right.len()];
    for &(a, w) in &b.edges {
        by_wall[w as usize].push(a);
    }
    let mut rows: Vec<BTreeMap<u32, u64>> = vec![BTreeMap::new(); b.left.len()];
    for members in &by_wall {
        for &u in members {
            for &v in members {
                *rows[u as usize].entry(v).or_insert(0) += 1;
            }
        }
    }
    MultiGraph { rows: rows.into_iter().map(|r| r.into_iter().collect()).collect() }
}
