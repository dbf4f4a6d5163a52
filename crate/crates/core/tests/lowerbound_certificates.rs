use outlierlab::lowerbound::{
    lemma_target, lower_bound_certificate, q_neighborhood, sample_lumped_rayleigh, CertificateParams, NbhdOptions,
    SyntheticTree, TwoPointMagnitude,
};
use outlierlab::graphcomb::graph_from_matrix;
use outlierlab::sampler::{sample_erdos_renyi, SeedSpec};
use outlierlab::spectral::extreme_eigenvalues;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn lemma_instance_at_large_degree() {
    let t = SyntheticTree {
        root_degree: 440,
        root_weight_sq: 1.0,
        q: 5,
        degrees: (190..=200).collect(),
        xi: TwoPointMagnitude { a_sq: 0.5, b_sq: 1.5, p_a: 0.5 },
        d_tilde: 200.0,
    };
    let target = lemma_target(t.row_norm_sq(), t.d_tilde, 0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let trials = 100;
    let hits = (0..trials).filter(|_| sample_lumped_rayleigh(&t, &mut rng).unwrap() >= target).count();
    assert!(hits * 10 >= trials * 9, "{hits}/{trials} above {target}");
}

#[test]
fn interlacing_on_sparse_graphs() {
    let n = 4000;
    for (i, np) in [2.0, 5.0, 12.0].into_iter().enumerate() {
        let m = sample_erdos_renyi(n, np / n as f64, SeedSpec::new(5, i as u64)).unwrap();
        let p = CertificateParams::for_density(np, 2);
        let cert = lower_bound_certificate(&m, &p).unwrap();
        let spec = extreme_eigenvalues(&m, 2, 1e-10, 500).unwrap();
        assert!(cert.interlaces(spec.abs_kth(2), 1e-8), "np={np}: {} > {}", cert.bound(), spec.abs_kth(2));
    }
}

/// The radius-1 ball around a vertex of a sparse graph is a star unless two
/// of its neighbors are adjacent.
#[test]
fn sparse_balls_are_trees() {
    let n = 100_000;
    let np = 20.0;
    let m = sample_erdos_renyi(n, np / n as f64, SeedSpec::new(9, 0)).unwrap();
    let g = graph_from_matrix(&m);
    let opts = NbhdOptions { require_full_depth: true, degree_range: None };
    let ok = (0..100).filter(|&v| q_neighborhood(&g, v * 997, 1, opts).is_ok()).count();
    assert!(ok >= 80, "{ok}/100");
}
