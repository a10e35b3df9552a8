//! End-to-end checks on small congruence quotients and synthetic complexes.

use ramcx::analysis::{
    chromatic_lower_bound, chromatic_number, complete_multipartite, discrepancy, injectivity_radius, is_weak_coloring,
    tree_ball_sizes, type_regular_corpus, ColoringMode, TypedFacets,
};
use ramcx::complex::{cayley_complex, read_complex, two_step_multigraph, walls_and_incidence, write_complex};
use ramcx::quotient::{cover_group, generate_group, search_polynomial, GroupTable, DEFAULT_GROUP_BUDGET};
use ramcx::spectra::{Operator, 
    biregular_top_pair, dense_eigen, dense_spectrum, incidence_lambda, second_eigenvalue, LanczosConfig, SparseSym,
    DENSE_THRESHOLD,
};

fn group(q: u64, d: usize, e: u32, r: u32) -> GroupTable {
    let c = search_polynomial(q, d, e, r).unwrap();
    generate_group(&c.generators().unwrap(), &c, DEFAULT_GROUP_BUDGET).unwrap()
}

#[test]
fn incidence_graphs_have_the_predicted_top_pair() {
    let mut hs = type_regular_corpus(5, 20, 12);
    hs.push(complete_multipartite(&[2, 3, 4]));
    for h in &hs {
        for i in 0..h.d() as u32 {
            let b = walls_and_incidence(h, i).unwrap();
            let (k1, k2) = b.biregularity().unwrap();
            let op = SparseSym::from_incidence(&b);
            let (spec, vecs) = dense_eigen(&op, DENSE_THRESHOLD).unwrap();
            let top = ((k1 * k2) as f64).sqrt();
            assert!((spec.eigenvalues[0] - top).abs() < 1e-6);
            // the top eigenspace may be larger when B is disconnected; project the
            // predicted vector onto it
            let side: Vec<bool> = (0..op.dim()).map(|v| v < b.left.len()).collect();
            let [want, _] = biregular_top_pair(&side, k1 as f64, k2 as f64);
            let norm = want.iter().map(|x| x * x).sum::<f64>().sqrt();
            let mut captured = 0.0;
            for c in 0..op.dim() {
                if (spec.eigenvalues[c] - top).abs() > 1e-6 {
                    continue;
                }
                let dot: f64 = (0..op.dim()).map(|r| vecs[(r, c)] * want[r]).sum();
                captured += (dot / norm).powi(2);
            }
            assert!(captured.sqrt() >= 1.0 - 1e-6, "cosine {captured}");

            // nonzero spectrum of N N^t = squares of the nonzero spectrum of B
            let nnt = dense_spectrum(&SparseSym::from_multigraph(&two_step_multigraph(&b))).unwrap();
            let mut squares: Vec<f64> =
                spec.eigenvalues.iter().filter(|&&x| x > 1e-7).map(|x| x * x).collect();
            let mut nz: Vec<f64> = nnt.eigenvalues.iter().copied().filter(|&x| x > 1e-7).collect();
            squares.sort_by(f64::total_cmp);
            nz.sort_by(f64::total_cmp);
            assert_eq!(squares.len(), nz.len());
            for (a, c) in squares.iter().zip(&nz) {
                assert!((a - c).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn lanczos_agrees_with_dense_on_quotients() {
    let pgl = group(3, 2, 2, 2);
    let op = SparseSym::from_cayley(&pgl.graph);
    let spec = dense_spectrum(&op).unwrap();
    let n = spec.eigenvalues.len();
    let dense = spec.eigenvalues[1].abs().max(spec.eigenvalues[n - 2].abs());
    let side: Vec<bool> = pgl.graph.types.as_ref().unwrap().iter().map(|&t| t == 0).collect();
    let ex = biregular_top_pair(&side, 4.0, 4.0);
    let it = second_eigenvalue(&op, &ex, &LanczosConfig::default()).unwrap();
    assert!((it.value - dense).abs() < 1e-6, "{} vs {}", it.value, dense);

    let (h, purity) = cayley_complex(&pgl.graph).unwrap();
    assert!(purity.is_pure());
    let b = walls_and_incidence(&h, 0).unwrap();
    let (lam, lt) = incidence_lambda(&b, &LanczosConfig::default()).unwrap();
    assert!((lam - dense).abs() < 1e-6);
    assert!((lt - dense / 4.0).abs() < 1e-6);
}

#[test]
fn cayley_complexes_are_type_regular_with_q_plus_one_walls() {
    let pgl = group(3, 2, 2, 2);
    let (h, _) = cayley_complex(&pgl.graph).unwrap();
    let reg = TypedFacets::new(&h).unwrap().type_regularity().unwrap();
    assert_eq!(reg, vec![(4, 4), (4, 4)]);
    let dir = tempfile_dir();
    let path = dir.join("pgl.rcx");
    write_complex(&h, &path).unwrap();
    assert_eq!(read_complex(&path).unwrap(), h);
    std::fs::remove_dir_all(&dir).unwrap();
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("ramcx-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn cover_projects_facets_and_colour_classes_leave_no_facets() {
    let psl = group(3, 2, 2, 1);
    let cover = cover_group(&psl).unwrap();
    let (base, _) = cayley_complex(&psl.graph).unwrap();
    let (top, _) = cayley_complex(&cover.graph).unwrap();
    // injectivity radius 2 is needed for facets to map onto facets
    let radius = injectivity_radius(&psl.graph, &tree_ball_sizes(3, 8), 3, 2).unwrap();
    assert!(radius.radius >= 2);
    for f in top.facets() {
        let mut img: Vec<u32> = f.iter().map(|&v| cover.project(v as usize) as u32).collect();
        img.sort_unstable();
        img.dedup();
        assert_eq!(img.len(), f.len());
        assert!(base.facets().binary_search(&img).is_ok());
    }

    // a weak colouring of the base, lifted: the largest class W gives empty E(W_0, W_1)
    let col = chromatic_number(&base, ColoringMode::Greedy, 0).unwrap();
    assert!(is_weak_coloring(&base, &col.colors));
    let mut sizes = vec![0usize; col.count];
    for &c in &col.colors {
        sizes[c as usize] += 1;
    }
    let best = (0..col.count).max_by_key(|&c| sizes[c]).unwrap() as u32;
    let types = cover.graph.types.as_ref().unwrap();
    let w: Vec<Vec<u32>> = (0..2u32)
        .map(|t| {
            (0..cover.graph.n as u32)
                .filter(|&v| types[v as usize] == t && col.colors[cover.project(v as usize)] == best)
                .collect()
        })
        .collect();
    assert!(w.iter().all(|wi| wi.len() == sizes[best as usize]));
    let frac = num_rational::Ratio::new(sizes[best as usize] as i128, psl.len() as i128);
    assert_eq!(discrepancy(&top, &w).unwrap(), frac * frac);

    // the lower bounds are then consistent with the colouring found
    let b = walls_and_incidence(&top, 0).unwrap();
    let (_, lt) = incidence_lambda(&b, &LanczosConfig::default()).unwrap();
    let bounds = chromatic_lower_bound(3, 2, 1, radius.radius, &[lt, lt]).unwrap();
    assert!(bounds.empirical.unwrap() <= col.count as f64);
    assert!(bounds.half_form <= col.count as f64);
    assert!(chromatic_lower_bound(3, 2, 1, 1, &[lt]).is_err());
}

#[test]
fn cover_of_a_partite_quotient_is_refused() {
    let pgl = group(3, 2, 2, 2);
    assert!(cover_group(&pgl).is_err());
}
