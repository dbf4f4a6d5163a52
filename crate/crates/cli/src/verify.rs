//! The verification gate: every exact property suite, one table row each.

use std::fmt::Write as _;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use outlierlab::dyck::{
    binomial_alpha_recursion_holds, binomial_sum_check, catalan, count_returns, dyck_count_returns,
    dyck_sequence_bound_check, enumerate_dyck, toy_norm_bound, DyckConstraints,
};
use outlierlab::graphcomb::fuzz::{
    distinct_entry_matrix, random_closed_walk, random_connected_graph, random_tangle_free_graph,
};
use outlierlab::graphcomb::{
    classify_walk, cycle_edges, cycle_intervals, edge, graph_from_matrix, is_connected, max_r_separated, Edge, Graph,
};
use outlierlab::lowerbound::{lower_bound_certificate, CertificateParams};
use outlierlab::majorizers::{
    build_net, classify, dominates, standard_majorizer, standard_norm_bracket, Majorizer, MajorizerNet,
};
use outlierlab::pathenc::{
    check_injectivity, encode, enumerate_closed_paths, path_weight, structure_weight_bound, verify_structure_props,
};
use outlierlab::sampler::{make_distribution, sample_erdos_renyi, AtomKind, DistKind, SeedSpec};
use outlierlab::spectral::extreme_eigenvalues;

use crate::error::CliError;
use crate::precancel::{evaluate, fixed_instances, random_instance};

pub const SUITES: [&str; 6] = ["dyck", "graphcomb", "pathenc", "majorizers", "precancel", "interlacing"];

/// Return-count formula under test; replaceable for mutation testing.
pub type DyckFormula = fn(u64, u64) -> BigUint;

pub fn reference_dyck_formula(k: u64, u: u64) -> BigUint {
    dyck_count_returns(k, u).expect("1 <= u <= k")
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub master_seed: u64,
    /// `None` runs every suite.
    pub suites: Option<Vec<String>>,
    pub dyck_formula: DyckFormula,
}

impl VerifyOptions {
    pub fn new(master_seed: u64) -> Self {
        VerifyOptions { master_seed, suites: None, dyck_formula: reference_dyck_formula }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteResult {
    pub name: String,
    pub checks: usize,
    /// First failures, capped at [`MAX_WITNESSES`].
    pub failures: Vec<String>,
    pub failure_count: usize,
}

const MAX_WITNESSES: usize = 5;

impl SuiteResult {
    fn new(name: &str) -> Self {
        SuiteResult { name: name.to_string(), ..Default::default() }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < MAX_WITNESSES {
                self.failures.push(witness());
            }
        }
    }

    fn merge(&mut self, other: SuiteResult) {
        self.checks += other.checks;
        self.failure_count += other.failure_count;
        for f in other.failures {
            if self.failures.len() < MAX_WITNESSES {
                self.failures.push(f);
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.failure_count == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub results: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.results.iter().all(SuiteResult::ok)
    }

    pub fn failed_suites(&self) -> Vec<&str> {
        self.results.iter().filter(|r| !r.ok()).map(|r| r.name.as_str()).collect()
    }

    /// Fixed-width table; no timings, so the output is reproducible.
    pub fn render(&self) -> String {
        let mut out = format!("{:<12} {:>9} {:>9}  status\n", "suite", "checks", "failures");
        for r in &self.results {
            let status = if r.ok() { "ok" } else { "FAILED" };
            let _ = writeln!(out, "{:<12} {:>9} {:>9}  {status}", r.name, r.checks, r.failure_count);
            for w in &r.failures {
                let _ = writeln!(out, "    {w}");
            }
        }
        out
    }
}

pub fn verify_all(opts: &VerifyOptions) -> Result<VerifyReport, CliError> {
    let selected: Vec<&str> = match &opts.suites {
        None => SUITES.to_vec(),
        Some(list) => {
            for s in list {
                if !SUITES.contains(&s.as_str()) {
                    return Err(CliError::Config(format!("unknown suite `{s}`; known: {}", SUITES.join(", "))));
                }
            }
            SUITES.iter().copied().filter(|s| list.iter().any(|l| l == s)).collect()
        }
    };
    let seed = |tag: u64| SeedSpec::new(opts.master_seed, 0).derive(tag);
    let results = selected
        .into_iter()
        .map(|name| match name {
            "dyck" => Ok(dyck_suite(opts.dyck_formula)),
            "graphcomb" => Ok(graphcomb_suite(seed(1))),
            "pathenc" => pathenc_suite(seed(2)),
            "majorizers" => majorizer_suite(seed(3)),
            "precancel" => Ok(precancel_suite(seed(4))),
            "interlacing" => interlacing_suite(seed(5)),
            _ => unreachable!("filtered against SUITES"),
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(VerifyReport { results })
}

pub fn dyck_suite(formula: DyckFormula) -> SuiteResult {
    let mut r = SuiteResult::new("dyck");
    for k in 1..=10usize {
        let all = enumerate_dyck(k, DyckConstraints::default()).expect("k <= 12");
        let mut hist = vec![0u64; k + 1];
        for p in &all {
            hist[count_returns(p)] += 1;
        }
        for u in 1..=k {
            let want = formula(k as u64, u as u64);
            r.check(BigUint::from(hist[u]) == want, || format!("N_u: k={k} u={u}: enumerated {} != formula {want}", hist[u]));
        }
    }
    for k in 1..=30u64 {
        let sum: BigUint = (1..=k).map(|u| formula(k, u)).sum();
        r.check(sum == catalan(k), || format!("catalan: k={k}: sum {sum} != {}", catalan(k)));
    }
    for p in 1..=40 {
        for l in [1.1, 1.5, 2.0, 3.0, 10.0] {
            let (lhs, rhs, ok) = binomial_sum_check(p, l).expect("grid inside domain");
            r.check(ok, || format!("binomial sum: p={p} L={l}: {lhs} > {rhs}"));
            r.check(binomial_alpha_recursion_holds(p, l), || format!("alpha recursion: p={p} L={l}"));
        }
    }
    for p in 1..=8 {
        for s in 1..=p {
            let (count, bound, ok) = dyck_sequence_bound_check(s, p).expect("p <= 10");
            r.check(ok, || format!("dyck sequences: s={s} p={p}: {count} > {bound}"));
        }
    }
    for d in [1.0, 2.0, 4.0, 8.0] {
        for ratio in [1.0, 1.5, 2.0, 4.0, 10.0] {
            for k in 1..=40 {
                let (sum, closed, ok) = toy_norm_bound(d, d * ratio, k).expect("grid inside domain");
                r.check(ok, || format!("toy bound: d={d} dt={} k={k}: {sum} > {closed}", d * ratio));
            }
        }
    }
    r
}

/// Connected subgraph grown by BFS from `root`: the first `size` vertices
/// reached and the tree edges used to reach them.
fn bfs_subgraph(g: &Graph, root: usize, size: usize) -> (Vec<usize>, Vec<Edge>) {
    let mut seen = vec![false; g.n()];
    seen[root] = true;
    let mut verts = vec![root];
    let mut edges = Vec::new();
    let mut i = 0;
    while i < verts.len() && verts.len() < size {
        let v = verts[i];
        for &w in g.neighbors(v) {
            if !seen[w] && verts.len() < size {
                seen[w] = true;
                verts.push(w);
                edges.push(edge(v, w));
            }
        }
        i += 1;
    }
    (verts, edges)
}

pub fn graphcomb_suite(seed: SeedSpec) -> SuiteResult {
    let mut r = SuiteResult::new("graphcomb");
    let mut rng = seed.rng();
    for trial in 0..100 {
        let n = rng.gen_range(4..=14);
        let extra = rng.gen_range(0..=(25 - (n - 1)).min(8));
        let g = random_connected_graph(n, extra, &mut rng);
        let e = g.num_edges();
        for radius in 1..=3 {
            let net = max_r_separated(&g, radius).expect("connected");
            let dist = all_distances(&g);
            let separated = net.iter().all(|&a| net.iter().all(|&b| a == b || dist[a][b] > radius));
            let maximal = (0..n).all(|v| net.iter().any(|&a| dist[a][v] <= radius));
            r.check(separated && maximal, || format!("net: trial {trial} r={radius}: separated={separated} maximal={maximal}"));
            r.check(net.len() as f64 <= 2.0 * e as f64 / radius as f64, || {
                format!("net size: trial {trial} r={radius}: {} > 2*{e}/{radius}", net.len())
            });
        }
        let root = rng.gen_range(0..n);
        let (sv, se) = bfs_subgraph(&g, root, rng.gen_range(1..=n));
        let in_sub = |v: usize| sv.contains(&v);
        let mut s: Vec<Edge> = cycle_edges(&g)
            .into_iter()
            .filter(|&(a, b)| (in_sub(a) || in_sub(b)) && !se.contains(&edge(a, b)))
            .collect();
        s.truncate(20);
        match outlierlab::graphcomb::find_removable_half(&g, &sv, &se, &s) {
            Ok(half) => {
                let ok = half.len() >= s.len().div_ceil(2)
                    && half.iter().all(|e| s.contains(e))
                    && is_connected(&g.without_edges(&half));
                r.check(ok, || format!("removable half: trial {trial}: |S'|={} of |S|={}", half.len(), s.len()));
            }
            Err(err) => r.check(false, || format!("removable half: trial {trial}: {err}")),
        }
    }
    // Special vertices on walks over tangle-free graphs.
    for trial in 0..60 {
        let g = random_tangle_free_graph(10, 13, 2, &mut rng);
        let start = rng.gen_range(0..g.n());
        let k = rng.gen_range(3..=12);
        let Some(p) = random_closed_walk(&g, start, k, &mut rng) else { continue };
        let steps = p.steps();
        let rep = classify_walk(steps);
        let walk_edges: std::collections::BTreeSet<Edge> = steps.windows(2).map(|w| edge(w[0], w[1])).collect();
        let gp = Graph::from_edges(g.n(), &walk_edges.into_iter().collect::<Vec<_>>()).expect("walk edges are simple");
        for iv in cycle_intervals(&gp) {
            let inside = |list: &[(usize, usize)]| {
                let mut vs: Vec<usize> =
                    list.iter().map(|&(v, _)| v).filter(|v| iv.interior().contains(v)).collect();
                vs.dedup();
                vs.len()
            };
            let (sp, co) = (inside(&rep.splitting), inside(&rep.completion));
            r.check(sp <= 1, || format!("splitting: walk {steps:?}: {sp} inside interval {:?}", iv.vertices));
            r.check(co <= 1, || format!("completion: walk {steps:?}: {co} inside interval {:?}", iv.vertices));
        }
        for t in 1..=steps.len() - 1 {
            let prefix = classify_walk(&steps[..=t]);
            let cut = |l: &[(usize, usize)]| l.iter().copied().filter(|&(_, d)| d <= t).collect::<Vec<_>>();
            let same = prefix.meeting == cut(&rep.meeting)
                && prefix.splitting == cut(&rep.splitting)
                && prefix.completion == cut(&rep.completion);
            r.check(same, || format!("replay: trial {trial} walk {steps:?} prefix {t}"));
        }
    }
    let l = 5;
    for trial in 0..40 {
        let g = random_tangle_free_graph(16, 20, l, &mut rng);
        let bound = 6.0 + 16.0 * g.num_edges() as f64 / l as f64;
        let mut cdeg = vec![0usize; g.n()];
        for (a, b) in cycle_edges(&g) {
            cdeg[a] += 1;
            cdeg[b] += 1;
        }
        for (v, &d) in cdeg.iter().enumerate().filter(|(_, &d)| d >= 3) {
            r.check(d as f64 <= bound, || format!("meeting degree: trial {trial} vertex {v}: {d} > {bound}"));
        }
        r.checks += 1;
    }
    r
}

fn all_distances(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.n())
        .map(|s| {
            let mut d = vec![usize::MAX; g.n()];
            d[s] = 0;
            let mut q = std::collections::VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &w in g.neighbors(v) {
                    if d[w] == usize::MAX {
                        d[w] = d[v] + 1;
                        q.push_back(w);
                    }
                }
            }
            d
        })
        .collect()
}

pub const PATHENC_GRAPHS: usize = 50;
pub const PATHENC_MAX_K: usize = 4;

/// Exhaustive encoding checks on one graph for every length up to `2 max_k`.
fn pathenc_graph(g: &Graph, seed: u64, net: &MajorizerNet) -> Result<SuiteResult, CliError> {
    let mut r = SuiteResult::new("pathenc");
    let mut rng = SeedSpec::new(seed, 0).rng();
    let m = distinct_entry_matrix(g, &mut rng);
    let y = Majorizer::new(vec![0.7, 0.5, 0.3])?;
    let mg = graph_from_matrix(&m);
    for k in 1..=PATHENC_MAX_K {
        let paths = enumerate_closed_paths(&mg, k);
        let rep = check_injectivity(&paths, &m, &y, net)?;
        r.check(rep.ok(), || {
            let (a, b) = &rep.collisions[0];
            format!("injectivity: {:?} and {:?} collide", a.steps(), b.steps())
        });
        for p in &paths {
            let ds = encode(p, &m, &y, net)?;
            let s = verify_structure_props(p, &ds);
            r.check(s.ok(), || format!("structure: {:?}: {}", p.steps(), s.violations.join("; ")));
            let bound = structure_weight_bound(&ds, &y, 1.0);
            let w = path_weight(p, &m).abs();
            r.check(w <= bound * (1.0 + 1e-12), || format!("weight: {:?}: {w} > {bound}", p.steps()));
        }
    }
    Ok(r)
}

pub fn pathenc_suite(seed: SeedSpec) -> Result<SuiteResult, CliError> {
    let net = build_net(2.0, 16.0, 10, 0.5)?;
    let mut rng = seed.rng();
    let graphs: Vec<(Graph, u64)> = (0..PATHENC_GRAPHS)
        .map(|_| {
            let n = rng.gen_range(6..=10);
            (random_tangle_free_graph(n, 12, 2, &mut rng), rng.gen())
        })
        .collect();
    let parts = graphs.par_iter().map(|(g, s)| pathenc_graph(g, *s, &net)).collect::<Result<Vec<_>, _>>()?;
    let mut r = SuiteResult::new("pathenc");
    for p in parts {
        r.merge(p);
    }
    Ok(r)
}

/// Parameter sets `(h, gamma, s, eps)` for the coverage fuzz.
pub const NET_PARAMS: [(f64, f64, usize, f64); 3] = [(4.0, 100.0, 50, 0.5), (2.0, 16.0, 8, 0.5), (8.0, 400.0, 100, 0.25)];
pub const ADVERSARIAL_PER_SET: usize = 1000;

/// Inputs in `R(h, gamma, s)` aimed at the net's rounding edges: spikes at
/// `h`, flat plateaus at the norm limit, dyadic staircases, values just above
/// ladder rungs, values at the flat-tail threshold, and uniform noise.
pub fn adversarial_vector<R: Rng + ?Sized>(net: &MajorizerNet, rng: &mut R) -> Vec<f64> {
    let p = net.params();
    let (h, gamma, s) = (p.h, p.gamma, p.s);
    let nnz = rng.gen_range(0..=s);
    let mut x: Vec<f64> = match rng.gen_range(0..6) {
        0 => vec![h; nnz.min((gamma / h).floor() as usize)],
        1 => vec![(gamma / nnz.max(1) as f64).min(h); nnz],
        2 => (0..nnz).map(|i| h / f64::from(1u32 << (i / 3).min(30))).collect(),
        3 => {
            let ladder = net.ladder();
            (0..nnz)
                .map(|_| (ladder[rng.gen_range(0..ladder.len())] * (1.0 + 1e-12)).min(h))
                .collect()
        }
        4 => {
            let tail = p.eps / 2.0 * gamma / s as f64;
            (0..nnz).map(|_| if rng.gen() { tail } else { tail * (1.0 - 1e-12) }).collect()
        }
        _ => (0..nnz).map(|_| rng.gen_range(0.0..=h)).collect(),
    };
    let norm: f64 = x.iter().sum();
    if norm > gamma {
        x.iter_mut().for_each(|v| *v *= gamma / norm * (1.0 - 1e-15));
    }
    x.shuffle(rng);
    x
}

pub fn majorizer_suite(seed: SeedSpec) -> Result<SuiteResult, CliError> {
    let mut r = SuiteResult::new("majorizers");
    let mut rng = seed.rng();
    for (h, gamma, s, eps) in NET_PARAMS {
        let net = build_net(h, gamma, s, eps)?;
        let limit = (1.0 + eps) * gamma;
        for _ in 0..ADVERSARIAL_PER_SET {
            let x = adversarial_vector(&net, &mut rng);
            match classify(&x, &net) {
                Ok(y) => {
                    let ok = dominates(&y, &x) && y.norm1() <= limit * (1.0 + 1e-12);
                    r.check(ok, || format!("net ({h},{gamma},{s},{eps}): |y|_1 = {} for x = {x:?}", y.norm1()));
                }
                Err(e) => r.check(false, || format!("net ({h},{gamma},{s},{eps}): {e}")),
            }
        }
    }
    let dists = [
        DistKind::Atom(AtomKind::Rademacher),
        DistKind::Atom(AtomKind::UniformSymmetric),
        DistKind::Smoothed { base: AtomKind::Rademacher, width: 0.05 },
    ];
    for kind in dists {
        for h in [kind.natural_bound_sq(), 4.0] {
            let dist = make_distribution(kind, h)?;
            for kappa in [2.0, 5.0, 10.0, 37.5, 100.0, 1000.0] {
                for tau in [0.05, 0.1, 0.5, 1.0] {
                    let y = standard_majorizer(&dist, h, kappa, tau)?;
                    let (lo, hi) = standard_norm_bracket(h, kappa, tau);
                    let norm = y.norm1();
                    r.check(lo <= norm && norm <= hi, || format!("bracket: {kind:?} h={h} kappa={kappa} tau={tau}: {norm} not in [{lo}, {hi}]"));
                }
            }
        }
    }
    Ok(r)
}

pub fn precancel_suite(seed: SeedSpec) -> SuiteResult {
    let mut r = SuiteResult::new("precancel");
    let mut rng = seed.rng();
    let mut instances = fixed_instances();
    instances.extend((0..20).map(|_| random_instance(5, &mut rng)));
    let mut nontrivial = 0;
    for (i, inst) in instances.into_iter().enumerate() {
        let row = evaluate(i.to_string(), inst);
        nontrivial += usize::from(!row.instance.s.is_empty() && row.lhs.abs() > 1e-9);
        r.check(row.ok(), || format!("instance {i}: {} != {}", row.lhs, row.rhs));
    }
    r.check(nontrivial > 0, || "every instance with nonempty S has both sides zero".into());
    r
}

/// Certificates that exist must interlace; a sample without enough
/// separated tree balls yields no certificate and is skipped, but at least
/// one certificate per density is required.
pub fn interlacing_suite(seed: SeedSpec) -> Result<SuiteResult, CliError> {
    let mut r = SuiteResult::new("interlacing");
    let n = 2000;
    for (i, np) in [1.5, 3.0, 6.0].into_iter().enumerate() {
        let mut certified = 0;
        for k in 1..=2 {
            for rep in 0..2 {
                let m = sample_erdos_renyi(n, np / n as f64, seed.derive((i * 4 + (k - 1) * 2 + rep) as u64))?;
                let Ok(cert) = lower_bound_certificate(&m, &CertificateParams::for_density(np, k)) else { continue };
                certified += 1;
                let lam = extreme_eigenvalues(&m, k, 1e-10, 2000)?.abs_kth(k);
                r.check(cert.interlaces(lam, 1e-8), || {
                    format!("np={np} k={k}: certificate {} > |lambda_k| {lam}", cert.bound())
                });
            }
        }
        r.check(certified > 0, || format!("np={np}: no certificate in any sample"));
    }
    Ok(r)
}
