use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use ramcx::analysis::{
    bipartite_mixing_sampled, bipartiteness_check, chromatic_lower_bound, chromatic_number, diameter, diameter_bound,
    hypergraph_mixing_check, injectivity_radius_of, tree_ball_sizes, BipartiteView, Bipartiteness, ColoringMode,
    RadiusReport, SubsetMode, MAX_EXACT_VERTICES,
};
use ramcx::complex::{cayley_complex, read_complex, walls_and_incidence, write_complex};
use ramcx::cslattice::{building_ball, gaussian_binomial, generators as cs_generators, verify_local_structure};
use ramcx::quotient::{cover_group, generate_group, partite_index, predicted_order, search_polynomial, CongruenceMap};
use ramcx::spectra::{
    dense_spectrum, hecke_row_check, incidence_lambda, lambda_theoretical_bound, oh_bound, second_eigenvalue,
    spectrum_symmetry_check, xi_pgl2, LanczosConfig, SparseSym,
};
use ramcx::{PartiteHypergraph, Poly, RelPosition};

use crate::report::{num, Report};
use crate::{AnalyzeArgs, BallArgs, BoundsArgs, BuildArgs, Check, GeneratorsArgs};

const EIGEN_SLACK: f64 = 1e-6;
const BOUND_SLACK: f64 = 1e-12;

pub fn generators(a: &GeneratorsArgs) -> Result<Report> {
    let mut rep = Report::new();
    rep.info("config", format!("command=generators d={} q={}", a.d, a.q));
    let gens = cs_generators(a.d, a.q)?;
    let f = gens.field();
    rep.info("field", format!("F_{}^{} modulus {}", f.characteristic(), f.degree(), format!("{:?}", f.modulus())));
    for (i, size) in gens.sizes().into_iter().enumerate() {
        let level = i + 1;
        let want = gaussian_binomial(a.d as u32, level as u32, a.q);
        rep.check(&format!("generator-count level={level}"), size, want, size as u64 == want);
        let mut expected = vec![0i64; a.d - level];
        expected.extend(std::iter::repeat(1).take(level));
        let bad = gens
            .sigma(level)
            .iter()
            .filter(|g| g.matrix.rel_position(f).map(|p| p.as_slice() != expected).unwrap_or(true))
            .count();
        rep.check(
            &format!("generator-relpos level={level}"),
            format!("{bad} off"),
            RelPosition::from_raw(&expected),
            bad == 0,
        );
    }
    if let Some(path) = &a.out {
        let mut s = String::new();
        for g in gens.all() {
            let word: Vec<String> = g.word.iter().map(usize::to_string).collect();
            s.push_str(&format!("{} {} {}\n", g.level, word.join(","), g.matrix.format(f)));
        }
        fs::write(path, s).with_context(|| format!("writing {}", path.display()))?;
        rep.info("written", path.display());
    }
    Ok(rep)
}

pub fn build(a: &BuildArgs) -> Result<Report> {
    let mut rep = Report::new();
    rep.info(
        "config",
        format!(
            "command=build d={} q={} e={} r={} poly={} budget={} force={}",
            a.d,
            a.q,
            a.e,
            a.r,
            a.poly.as_deref().unwrap_or("search"),
            a.budget,
            a.force
        ),
    );
    let cmap = match &a.poly {
        Some(text) => {
            let field = CongruenceMap::working_field(a.d, a.q, a.e)?;
            let poly = Poly::parse(text, &field)?;
            CongruenceMap::new(a.d, a.q, poly, field)?
        }
        None => search_polynomial(a.q, a.d, a.e, a.r)?,
    };
    let r = partite_index(&cmap);
    let order = predicted_order(&cmap);
    let f = cmap.field().clone();
    rep.info("congruence-polynomial", cmap.poly().format(&f));
    rep.info("partite-index", r);
    rep.info("predicted-order", order);
    let budget = if order > a.budget as u128 {
        if !a.force {
            bail!(
                "the quotient has {order} elements, above the budget {}; pass --force (or a larger --budget) to enumerate it anyway",
                a.budget
            );
        }
        log::warn!("enumerating {order} group elements; this needs several GiB of memory");
        usize::try_from(order).map_err(|_| anyhow!("order {order} does not fit in memory"))?
    } else {
        a.budget
    };
    let group = generate_group(&cmap.generators()?, &cmap, budget)?;
    rep.info("vertices", group.len());
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let (h, purity) = cayley_complex(&group.graph)?;
    if !purity.is_pure() {
        log::warn!("Cayley complex is impure: maximal cliques {:?}", purity.maximal_cliques);
    }
    rep.info("facets", h.facets().len());
    write_complex(&h, &a.out.join("complex.rcx"))?;
    fs::write(a.out.join("group.txt"), group.export(&f))?;
    fs::write(a.out.join("edges.csv"), group.export_edges())?;
    let mut meta = format!(
        "d={}\nq={}\ne={}\nr={r}\norder={}\npoly={}\n",
        a.d,
        a.q,
        a.e,
        group.len(),
        cmap.poly().format(&f)
    );
    if r == 1 {
        let cover = cover_group(&group)?;
        let (hc, _) = cayley_complex(&cover.graph)?;
        write_complex(&hc, &a.out.join("cover.rcx"))?;
        rep.info("cover-vertices", cover.graph.n);
        meta.push_str("cover=cover.rcx\n");
    }
    fs::write(a.out.join("meta.txt"), meta)?;
    rep.check("group-order", group.len(), order, group.len() as u128 == order);
    rep.info("written", a.out.display());
    Ok(rep)
}

struct Meta {
    d: usize,
    q: u64,
    e: u32,
    r: u32,
}

fn read_meta(dir: &Path) -> Result<Meta> {
    let path = dir.join("meta.txt");
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let kv: BTreeMap<&str, &str> = text.lines().filter_map(|l| l.split_once('=')).collect();
    let get = |k: &str| -> Result<&str> { kv.get(k).copied().ok_or_else(|| anyhow!("{} lacks '{k}'", path.display())) };
    Ok(Meta {
        d: get("d")?.trim().parse()?,
        q: get("q")?.trim().parse()?,
        e: get("e")?.trim().parse()?,
        r: get("r")?.trim().parse()?,
    })
}

struct GraphSpectrum {
    top: f64,
    second: f64,
    how: String,
}

struct Analysis<'a> {
    args: &'a AnalyzeArgs,
    meta: Meta,
    h: PartiteHypergraph,
    cover: Option<PartiteHypergraph>,
    adj: Vec<Vec<u32>>,
    bip: Bipartiteness,
    spectrum: Option<GraphSpectrum>,
    typed_lambdas: Option<Vec<(f64, f64)>>,
    radius: Option<std::result::Result<RadiusReport, String>>,
    cfg: LanczosConfig,
}

impl Analysis<'_> {
    fn graph_spectrum(&mut self, rep: &mut Report) -> Result<&GraphSpectrum> {
        if self.spectrum.is_none() {
            let op = SparseSym::from_adjacency(&self.adj);
            let n = self.adj.len();
            let bipartite = matches!(self.bip, Bipartiteness::Bipartite(_));
            let s = if n <= self.args.dense_threshold {
                let spec = dense_spectrum(&op)?;
                if bipartite {
                    let (ok, worst) = spectrum_symmetry_check(&spec);
                    rep.check("spectrum-symmetry", format!("{worst:.3e}"), "1e-8", ok);
                }
                if let Some(path) = &self.args.spectrum_csv {
                    fs::write(path, spec.to_csv())?;
                }
                let ev = &spec.eigenvalues;
                let hi = if bipartite { n - 1 } else { n };
                let second = ev[1..hi].iter().fold(0.0f64, |m, x| m.max(x.abs()));
                GraphSpectrum { top: ev[0], second, how: "dense".into() }
            } else {
                let k = self.adj[0].len();
                if self.adj.iter().any(|r| r.len() != k) {
                    bail!("iterative spectrum expects a regular graph");
                }
                let mut ex = vec![vec![1.0; n]];
                if let Bipartiteness::Bipartite(col) = &self.bip {
                    ex.push(col.iter().map(|&c| if c { 1.0 } else { -1.0 }).collect());
                }
                let se = second_eigenvalue(&op, &ex, &self.cfg)?;
                GraphSpectrum {
                    top: k as f64,
                    second: se.value,
                    how: format!("lanczos residual={:.3e} matvecs={}", se.residual, se.matvecs),
                }
            };
            self.spectrum = Some(s);
        }
        Ok(self.spectrum.as_ref().expect("set above"))
    }

    /// The complex carrying a type function mod d: the input or its cover.
    fn typed(&self) -> Option<&PartiteHypergraph> {
        if self.h.is_fully_partite() {
            Some(&self.h)
        } else {
            self.cover.as_ref().filter(|c| c.is_fully_partite())
        }
    }

    fn lambdas(&mut self) -> Result<Option<&Vec<(f64, f64)>>> {
        if self.typed_lambdas.is_none() {
            let Some(t) = self.typed() else { return Ok(None) };
            let ls = (0..t.d() as u32)
                .map(|i| Ok(incidence_lambda(&walls_and_incidence(t, i)?, &self.cfg)?))
                .collect::<Result<Vec<_>>>()?;
            self.typed_lambdas = Some(ls);
        }
        Ok(self.typed_lambdas.as_ref())
    }

    fn radius(&mut self) -> Result<&std::result::Result<RadiusReport, String>> {
        if self.radius.is_none() {
            let Meta { d, q, e, .. } = self.meta;
            let n = self.adj.len();
            let sizes = if d == 2 {
                let mut rmax = 1;
                while tree_ball_sizes(q, rmax)[rmax] <= n as u64 {
                    rmax += 1;
                }
                tree_ball_sizes(q, rmax)
            } else {
                let ball = building_ball(&cs_generators(d, q)?, self.args.ball_radius, 5_000_000)?;
                ball.sphere_sizes()
                    .iter()
                    .scan(0u64, |acc, &s| {
                        *acc += s as u64;
                        Some(*acc)
                    })
                    .collect()
            };
            let adj = &self.adj;
            let f = |v: usize| adj[v].clone();
            self.radius = Some(injectivity_radius_of(&f, n, d, &sizes, q, e).map_err(|e| e.to_string()));
        }
        Ok(self.radius.as_ref().expect("set above"))
    }
}

pub fn analyze(a: &AnalyzeArgs) -> Result<Report> {
    let meta = read_meta(&a.input)?;
    let h = read_complex(&a.input.join("complex.rcx"))?;
    let cover_path = a.input.join("cover.rcx");
    let cover = if cover_path.exists() { Some(read_complex(&cover_path)?) } else { None };
    let want = |c: Check| a.checks.contains(&c) || a.checks.contains(&Check::All);
    let adj = h.adjacency();
    let bip = bipartiteness_check(&adj);
    let cfg = LanczosConfig { seed: a.seed, ..LanczosConfig::default() };
    let mut rep = Report::new();
    rep.info(
        "config",
        format!(
            "command=analyze d={} q={} e={} r={} vertices={} facets={} checks={:?} seed={} samples={} dense_threshold={} color_budget={} ball_radius={}",
            meta.d,
            meta.q,
            meta.e,
            meta.r,
            h.n(),
            h.facets().len(),
            a.checks,
            a.seed,
            a.samples,
            a.dense_threshold,
            a.color_budget,
            a.ball_radius
        ),
    );
    let mut an = Analysis {
        args: a,
        meta,
        h,
        cover,
        adj,
        bip,
        spectrum: None,
        typed_lambdas: None,
        radius: None,
        cfg,
    };
    let (d, q) = (an.meta.d, an.meta.q);

    if want(Check::Spectra) {
        rep.section("spectra");
        let degree = an.adj.first().map_or(0, Vec::len);
        let s = an.graph_spectrum(&mut rep)?;
        let (top, second, how) = (s.top, s.second, s.how.clone());
        rep.info("spectrum-method", how);
        rep.check("top-eigenvalue", num(top), degree, (top - degree as f64).abs() <= EIGEN_SLACK);
        if d == 2 {
            let bound = 2.0 * (q as f64).sqrt();
            rep.check("ramanujan-bound", num(second), num(bound), second <= bound + EIGEN_SLACK);
        } else {
            rep.info("second-eigenvalue", num(second));
        }
        match an.lambdas()?.cloned() {
            None => rep.skip("normalized-wall-eigenvalues", "no complex with a type function mod d"),
            Some(ls) => {
                for (i, (l, lt)) in ls.iter().enumerate() {
                    rep.info(&format!("wall-graph-eigenvalue type={i}"), format!("lambda={} normalized={}", num(*l), num(*lt)));
                    if d == 2 {
                        let bound = 2.0 * (q as f64).sqrt() / (q as f64 + 1.0);
                        rep.check(&format!("normalized-ramanujan-bound type={i}"), num(*lt), num(bound), *lt <= bound + EIGEN_SLACK);
                    } else {
                        let bound = lambda_theoretical_bound(q).exact;
                        rep.check(&format!("wall-walk-bound type={i}"), num(*lt), num(bound), *lt <= bound + EIGEN_SLACK);
                    }
                }
            }
        }
    }

    if want(Check::Mixing) {
        rep.section("mixing");
        match an.lambdas()?.cloned() {
            None => rep.skip("mixing", "no complex with a type function mod d"),
            Some(ls) => {
                let t = an.typed().expect("lambdas imply a typed complex").clone();
                rep.info("mixing-target", if an.h.is_fully_partite() { "input complex" } else { "cover" });
                if d == 2 {
                    let tadj = t.adjacency();
                    let side: Vec<bool> = t.types().expect("typed").iter().map(|&x| x == 0).collect();
                    let view = BipartiteView::new(&tadj, &side)?;
                    let s = bipartite_mixing_sampled(&view, ls[0].0, a.seed, a.samples);
                    rep.check(
                        "bipartite-mixing-normalized",
                        format!("failures={} max_ratio={}", s.cor34_failures, num(s.max_ratio)),
                        format!("samples={} seed={}", s.samples, s.seed),
                        s.cor34_failures == 0,
                    );
                    rep.check(
                        "bipartite-mixing-edge-count",
                        format!("failures={}", s.lemma32_failures),
                        format!("samples={} seed={}", s.samples, s.seed),
                        s.lemma32_failures == 0,
                    );
                }
                let lt: Vec<f64> = ls.iter().map(|x| x.1).collect();
                let mode = if t.n() <= 24 {
                    SubsetMode::Exhaustive
                } else {
                    SubsetMode::Sampled { seed: a.seed, samples: a.samples }
                };
                let r = hypergraph_mixing_check(&t, &lt, mode, Some(q))?;
                rep.info("hypergraph-mixing-mode", format!("{:?} families={}", r.mode, r.families));
                rep.check(
                    "hypergraph-mixing",
                    format!("failures={} max_disc={} max_ratio={}", r.cor38_failures, num(ramcx::analysis::to_f64(&r.max_disc)), num(r.max_ratio)),
                    "sum of normalized wall eigenvalues",
                    r.cor38_failures == 0,
                );
                rep.check(
                    "wall-reduction-identity",
                    format!("failures={}", r.wall_identity_failures + r.reduction_failures),
                    "exact",
                    r.wall_identity_failures == 0 && r.reduction_failures == 0,
                );
                rep.check(
                    "colorful-mixing",
                    format!("failures={}", r.thm13_failures),
                    num(r.thm13_bound.unwrap_or(f64::NAN)),
                    r.thm13_failures == 0,
                );
            }
        }
    }

    if want(Check::Color) {
        rep.section("color");
        match &an.bip {
            Bipartiteness::Bipartite(_) => rep.info("bipartite", "true"),
            Bipartiteness::OddWalk(w) => rep.info("bipartite", format!("false odd-closed-walk-length={}", w.len() - 1)),
        }
        let exact = an.h.n() <= MAX_EXACT_VERTICES;
        let mode = if exact { ColoringMode::Exact } else { ColoringMode::Greedy };
        let col = chromatic_number(&an.h, mode, a.color_budget)?;
        rep.info("chromatic-number", format!("{} ({})", col.count, if exact { "exact" } else { "greedy upper bound" }));
        let radius = match an.radius()? {
            Ok(r) => Some(r.radius),
            Err(e) => {
                rep.skip("chromatic-lower-bound", format!("injectivity radius unavailable: {e}"));
                None
            }
        };
        if let Some(radius) = radius {
            let lt: Vec<f64> = an.lambdas()?.map(|v| v.iter().map(|x| x.1).collect()).unwrap_or_default();
            match chromatic_lower_bound(q, d, an.meta.r, radius, &lt) {
                Ok(b) => {
                    let best = b.half_form.max(b.proof_form).max(b.empirical.unwrap_or(0.0));
                    rep.info(
                        "chromatic-bounds",
                        format!(
                            "half={} proof={} empirical={}",
                            num(b.half_form),
                            num(b.proof_form),
                            b.empirical.map_or("none".into(), num)
                        ),
                    );
                    rep.check("chromatic-lower-bound", col.count, num(best), col.count as f64 >= best - BOUND_SLACK);
                }
                Err(e) => rep.skip("chromatic-lower-bound", e),
            }
        }
    }

    if want(Check::Radius) {
        rep.section("radius");
        match an.radius()?.clone() {
            Err(e) => rep.skip("injectivity-radius", e),
            Ok(r) => {
                rep.info("injectivity-radius", r.radius);
                rep.info("ball-sizes quotient", format!("{:?}", r.quotient_sizes));
                rep.info("ball-sizes building", format!("{:?}", r.building_sizes));
                rep.check("injectivity-log-bound", r.radius, r.log_bound.ceil(), r.meets_log_bound());
                let disp = r.displacement.map_or(format!(">={}", r.displacement_lower), |x| x.to_string());
                rep.check("displacement-degree-bound", disp, num(r.degree_bound), r.meets_degree_bound());
            }
        }
    }

    if want(Check::Diameter) {
        rep.section("diameter");
        let diam = diameter(&an.adj, true)?;
        let n = an.adj.len();
        let s = an.graph_spectrum(&mut rep)?;
        let bound = diameter_bound(n, s.top, s.second);
        rep.check("diameter-spectral-bound", diam, num(bound), diam as f64 <= bound + BOUND_SLACK);
    }
    if let Some(path) = &a.out {
        fs::write(path, rep.text())?;
    }
    Ok(rep)
}

pub fn ball(a: &BallArgs) -> Result<Report> {
    let mut rep = Report::new();
    rep.info("config", format!("command=ball d={} q={} radius={} max_vertices={}", a.d, a.q, a.radius, a.max_vertices));
    let gens = cs_generators(a.d, a.q)?;
    let ball = building_ball(&gens, a.radius, a.max_vertices)?;
    rep.info("vertices", ball.len());
    rep.info("sphere-sizes", format!("{:?}", ball.sphere_sizes()));
    rep.info("facets", ball.facets.len());
    if a.radius >= 2 {
        let ls = verify_local_structure(&ball)?;
        rep.check("facets-at-center", ls.facets_at_center, ls.expected_facets, ls.facets_at_center as u64 == ls.expected_facets);
        let degs: std::collections::BTreeSet<usize> = ls.wall_degrees.iter().map(|w| w.1).collect();
        rep.check("wall-degree", format!("{degs:?}"), ls.expected_wall_degree, ls.walls_ok());
        rep.check(
            "neighbors-by-type",
            format!("{:?}", ls.neighbors_by_type),
            format!("{:?}", ls.expected_neighbors_by_type),
            ls.ok(),
        );
        let hk = hecke_row_check(&ball)?;
        rep.check(
            "two-step-wall-row",
            format!("self={} class_size={} offending={}", hk.self_weight, hk.class_size, hk.offending.len()),
            format!("self=1/{} uniform on {}", a.q + 1, RelPosition::wall_partner(a.d)),
            hk.ok(),
        );
    } else {
        rep.skip("local-structure", "needs radius >= 2");
    }
    if let Some(path) = &a.out {
        fs::write(path, ball.export(gens.field()))?;
        rep.info("written", path.display());
    }
    Ok(rep)
}

pub fn bounds(a: &BoundsArgs) -> Result<Report> {
    let mut rep = Report::new();
    rep.info("config", format!("command=bounds q={:?} d={:?}", a.q, a.d));
    for &q in &a.q {
        if q < 3 || q % 2 == 0 {
            bail!("q must be an odd prime power, got {q}");
        }
        rep.section(&format!("q={q}"));
        for n in 1..=4 {
            let x = xi_pgl2(n, q);
            rep.info(&format!("xi-pgl2 n={n}"), format!("{} crude={}", num(x.value), num(x.crude)));
        }
        let lb = lambda_theoretical_bound(q);
        rep.info(
            "wall-walk-bound",
            format!("exact={} simplified={} vacuous={}", num(lb.exact), num(lb.simplified), lb.is_vacuous()),
        );
        for &d in &a.d {
            rep.info(&format!("oh-bound d={d}"), num(oh_bound(&RelPosition::wall_partner(d), q)));
            let c = chromatic_lower_bound(q, d, 1, 2, &[])?;
            rep.info(
                &format!("chromatic-lower-bound d={d}"),
                format!("half={} proof={} vacuous={}", num(c.half_form), num(c.proof_form), c.is_vacuous()),
            );
            rep.info(&format!("colorful-mixing-bound d={d}"), num(2.0 * d as f64 / (q as f64).sqrt()));
        }
    }
    Ok(rep)
}
