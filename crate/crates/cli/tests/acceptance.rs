//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use raag_cli::{run_to, Command, InputSource, RunConfig};
use raag_core::autgrp::{automorphisms, enumerate_graphs, VertexPermutation};
use raag_core::charclose::{is_characteristic_vertex_set, is_transvection_free_graph, v_char};
use raag_core::graph::Composition;
use raag_core::io::from_graph6;
use raag_core::lcslin::{
    check_autnottrans_theorem, det_exact, has_eigenvalue_one, induced_matrix, p_matrix, SignedAut,
};
use raag_core::lyndon::{closed_form_le, enumerate_lyndon, lyndon_ranks};
use raag_core::{Graph, VertexSet};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn classes(max_n: usize) -> Vec<Graph> {
    (1..=max_n)
        .flat_map(|n| enumerate_graphs(n).unwrap())
        .collect()
}

fn random_graph(rng: &mut StdRng, n: usize) -> Graph {
    let p = rng.gen_range(0.1..0.9);
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|_| rng.gen_bool(p))
        .collect();
    Graph::from_edges(n, &edges).unwrap()
}

fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Full sweep through the batch runner, with every certificate audited.
fn full_sweep() -> Outcome {
    let cfg = RunConfig::new(
        Command::Enumerate {
            max_n: 7,
            certify: true,
        },
        InputSource::None,
    );
    let mut buf = Vec::new();
    let summary = run_to(&cfg, &mut buf).map_err(|e| e.to_string())?;
    let text = String::from_utf8(buf).map_err(|e| e.to_string())?;
    let mut mismatched = 0;
    let mut records = 0;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        ensure(v["schema"] == 1, || "record without schema 1".into())?;
        if v["kind"] != "certificate" {
            continue;
        }
        records += 1;
        let g = from_graph6(v["graph6"].as_str().unwrap_or_default()).map_err(|e| e.to_string())?;
        let expected = if g.is_complete() {
            "NOT_RINF_ABELIAN"
        } else {
            "RINF"
        };
        if v["certificate"]["verdict"] != expected
            || !v["audit_issues"].as_array().is_some_and(|a| a.is_empty())
        {
            mismatched += 1;
        }
    }
    let rinf = summary.verdicts.get("RINF").copied().unwrap_or(0);
    let abelian = summary
        .verdicts
        .get("NOT_RINF_ABELIAN")
        .copied()
        .unwrap_or(0);
    let counts: Vec<usize> = summary.classes_by_n.values().copied().collect();
    ensure(counts == [1, 2, 4, 11, 34, 156, 1044], || {
        format!("class counts {counts:?}")
    })?;
    ensure(records == 1252 && summary.graphs == 1252, || {
        format!("{records} records")
    })?;
    ensure(rinf == 1245 && abelian == 7, || {
        format!("RINF {rinf}, NOT_RINF_ABELIAN {abelian}")
    })?;
    ensure(summary.undecided() == 0, || {
        format!("{} undecided", summary.undecided())
    })?;
    ensure(summary.audit_failures == 0, || {
        format!("{} audit failures", summary.audit_failures)
    })?;
    ensure(mismatched == 0, || {
        format!("{mismatched} records with wrong verdict or audit issues")
    })?;
    Ok(format!(
        "1252 classes: {rinf} RINF, {abelian} NOT_RINF_ABELIAN, 0 UNDECIDED, all audited; root rules {:?}",
        summary.root_rules
    ))
}

fn lyndon_closed_forms() -> Outcome {
    let mut graphs = classes(5);
    ensure(graphs.len() == 52, || {
        format!("{} classes on at most 5 vertices", graphs.len())
    })?;
    let mut rng = StdRng::seed_from_u64(0x1e3);
    for _ in 0..200 {
        let n = rng.gen_range(6..=7);
        graphs.push(random_graph(&mut rng, n));
    }
    for g in &graphs {
        for l in 1..=3 {
            let closed = closed_form_le(g, l).map_err(|e| e.to_string())?;
            let brute = enumerate_lyndon(g, l).map_err(|e| e.to_string())?;
            let a: BTreeSet<_> = closed.into_iter().collect();
            let b: BTreeSet<_> = brute.into_iter().collect();
            ensure(a == b, || {
                format!("{g} length {l}: {} vs {} elements", a.len(), b.len())
            })?;
        }
    }
    Ok(format!("{} graphs, lengths 1-3", graphs.len()))
}

fn l2_rank_law() -> Outcome {
    let graphs = classes(7);
    for g in &graphs {
        let rank = enumerate_lyndon(g, 2).map_err(|e| e.to_string())?.len();
        let expected = binom2(g.n()) - g.edge_count();
        ensure(rank == expected, || {
            format!("{g}: rank {rank}, expected {expected}")
        })?;
    }
    Ok(format!("{} classes", graphs.len()))
}

fn mobius(mut n: usize) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of aperiodic necklaces of length `l` over `q` letters.
fn necklaces(q: usize, l: usize) -> usize {
    let sum: i64 = (1..=l)
        .filter(|d| l.is_multiple_of(*d))
        .map(|d| mobius(d) * (q as i64).pow((l / d) as u32))
        .sum();
    (sum / l as i64) as usize
}

fn free_lie_ranks() -> Outcome {
    let mut rows = Vec::new();
    for q in 2..=3 {
        let ranks = lyndon_ranks(&Graph::edgeless(q).unwrap(), 5).map_err(|e| e.to_string())?;
        let oracle: Vec<usize> = (1..=5).map(|l| necklaces(q, l)).collect();
        ensure(ranks == oracle, || {
            format!("q={q}: {ranks:?} vs {oracle:?}")
        })?;
        rows.push(format!("{q} generators {ranks:?}"));
    }
    Ok(rows.join(", "))
}

fn autcheck() -> Outcome {
    let mut graphs = 0;
    let mut total = 0;
    for g in classes(6).into_iter().filter(|g| !g.is_complete()) {
        let report = check_autnottrans_theorem(&g).map_err(|e| e.to_string())?;
        let expected = automorphisms(&g).map_err(|e| e.to_string())?.len() << g.n();
        ensure(report.total == expected, || {
            format!(
                "{g}: {} signed automorphisms, expected {expected}",
                report.total
            )
        })?;
        ensure(report.failures.is_empty(), || {
            format!("{g}: {} without witness", report.failures.len())
        })?;
        graphs += 1;
        total += report.total;
    }
    for n in 1..=4 {
        let g = Graph::complete(n).unwrap();
        let inv = SignedAut::new(&g, VertexPermutation::identity(n), vec![-1; n])
            .map_err(|e| e.to_string())?;
        let m = induced_matrix(&g, &inv, 1).map_err(|e| e.to_string())?;
        ensure(!has_eigenvalue_one(&m).map_err(|e| e.to_string())?, || {
            format!("K{n}: inversion has a level-1 witness")
        })?;
        let det = det_exact(&m.identity_minus().map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        ensure(det.to_string() == (1u64 << n).to_string(), || {
            format!("K{n}: det(I - M) = {det}")
        })?;
    }
    Ok(format!("{graphs} non-complete classes, {total} signed automorphisms, no failures; inversions on K1-K4 have no level-1 witness"))
}

fn p_matrix_identity() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x9e7);
    for _ in 0..1000 {
        let k = rng.gen_range(1..=12);
        let signs: Vec<i8> = (0..k)
            .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
            .collect();
        let p = p_matrix(&signs).map_err(|e| e.to_string())?;
        let det = det_exact(&p.identity_minus().map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let product: i64 = signs.iter().map(|&s| s as i64).product();
        ensure(det.to_string() == (1 - product).to_string(), || {
            format!("{signs:?}: det {det}")
        })?;
    }
    Ok("1000 sign vectors".into())
}

fn is_disjoint_cliques(g: &Graph) -> bool {
    g.components().iter().all(|c| g.induced(c).is_complete())
}

fn srg_trichotomy() -> Outcome {
    let mut family: Vec<Graph> = classes(7)
        .into_iter()
        .filter(|g| g.srg_parameters().is_some())
        .collect();
    let found = family.len();
    family.push(Graph::petersen());
    for size in 2..=3 {
        for parts in 2..=3 {
            family.push(Graph::complete_multipartite(&vec![size; parts]).unwrap());
        }
    }
    let mut tally = [0; 3];
    for g in &family {
        let p = g
            .srg_parameters()
            .ok_or_else(|| format!("{g} is not strongly regular"))?;
        ensure((p.n - p.k - 1) * p.mu == p.k * (p.k - p.lambda - 1), || {
            format!("{g}: parameter identity")
        })?;
        let cliques = is_disjoint_cliques(g);
        let multipartite = is_disjoint_cliques(&g.complement());
        let free = is_transvection_free_graph(g);
        let holding = [cliques, multipartite, free].iter().filter(|b| **b).count();
        ensure(holding == 1, || format!("{g}: {holding} branches hold"))?;
        ensure(cliques == (p.lambda + 1 == p.k), || {
            format!("{g}: clique branch mismatch")
        })?;
        ensure(multipartite == (p.mu == p.k), || {
            format!("{g}: multipartite branch mismatch")
        })?;
        let branch = if cliques {
            0
        } else if multipartite {
            1
        } else {
            2
        };
        tally[branch] += 1;
    }
    Ok(format!(
        "{} graphs ({found} among small classes): {} disjoint cliques, {} multipartite, {} transvection-free",
        family.len(),
        tally[0],
        tally[1],
        tally[2]
    ))
}

/// Connected, non-regular, with the non-maximal-degree vertices inducing a clique.
fn is_mba_oracle(g: &Graph) -> bool {
    let deg = g.degrees();
    let d = deg.iter().copied().max().unwrap_or(0);
    let low: Vec<usize> = (0..g.n()).filter(|&v| deg[v] < d).collect();
    g.is_connected()
        && !low.is_empty()
        && low
            .iter()
            .all(|&a| low.iter().all(|&b| a == b || g.has_edge(a, b)))
}

fn mba_battery() -> Outcome {
    let mut found = BTreeSet::new();
    for g in classes(7) {
        let params = g.mba_parameters();
        ensure(params.is_some() == is_mba_oracle(&g), || {
            format!("{g}: MBA detection disagrees")
        })?;
        let Some(p) = params else { continue };
        let (n, k, d, e) = (p.n, p.k, p.d, g.edge_count());
        ensure(n >= 5, || format!("{g}: n = {n}"))?;
        ensure(n < 2 * k, || format!("{g}: n >= 2k"))?;
        ensure(k + d > n, || format!("{g}: k + d < n + 1"))?;
        // d <= n - k/(2k - n), cleared of the denominator.
        ensure(d * (2 * k - n) + k <= n * (2 * k - n), || {
            format!("{g}: degree bound")
        })?;
        ensure(binom2(n) <= e + k * (n - d - 1), || {
            format!("{g}: edge lower bound")
        })?;
        ensure(2 * e <= n * (d - 1) + k, || {
            format!("{g}: edge upper bound")
        })?;
        if k == (n + 2) / 2 {
            ensure(n % 2 == 0, || format!("{g}: k = ceil((n+1)/2) with n odd"))?;
        }
        found.insert((n, k, d));
    }
    for want in [(5, 4, 3), (6, 4, 4), (7, 5, 4)] {
        ensure(found.contains(&want), || {
            format!("no MBA graph with (n,k,d) = {want:?}")
        })?;
    }
    Ok(format!("parameters found {found:?}"))
}

fn characteristic_properties() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xc4a);
    for _ in 0..500 {
        let n = rng.gen_range(1..=7);
        let g = random_graph(&mut rng, n);
        let v = rng.gen_range(0..n);
        let s = v_char(&g, v).map_err(|e| e.to_string())?;
        ensure(s.contains(v), || format!("{g}: closure of {v} misses it"))?;
        ensure(
            is_characteristic_vertex_set(&g, &s).map_err(|e| e.to_string())?,
            || format!("{g}: v={v} not characteristic"),
        )?;
        for a in automorphisms(&g).map_err(|e| e.to_string())? {
            ensure(a.is_automorphism_of(&g), || {
                format!("{g}: bad automorphism")
            })?;
            let image = VertexSet::from_indices(n, s.iter().map(|u| a.apply(u)));
            ensure(image == s, || format!("{g}: v={v} not invariant"))?;
        }
        for u in s.iter() {
            for w in 0..n {
                let dominates = w != u && g.link(u).is_subset(&g.star(w));
                ensure(!dominates || s.contains(w), || {
                    format!("{g}: {w} dominates {u} but is missing")
                })?;
            }
        }
    }
    let free: Vec<Graph> = classes(6)
        .into_iter()
        .filter(is_transvection_free_graph)
        .collect();
    let mut checked = 0;
    for a in &free {
        ensure(is_transvection_free_graph(&a.complement()), || {
            format!("{a}: complement")
        })?;
        for b in &free {
            for mode in [Composition::DisjointUnion, Composition::SimplicialJoin] {
                let c = a.compose(b, mode).map_err(|e| e.to_string())?;
                ensure(is_transvection_free_graph(&c), || {
                    format!("{a} with {b}: {mode:?}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "500 random pairs; {} transvection-free graphs, {checked} compositions",
        free.len()
    ))
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("1 certified sweep up to 7 vertices", full_sweep),
        ("2 Lyndon closed forms", lyndon_closed_forms),
        ("3 L2 rank law", l2_rank_law),
        ("4 free Lie ranks vs necklaces", free_lie_ranks),
        ("5 signed automorphism witnesses", autcheck),
        ("6 P-matrix determinant", p_matrix_identity),
        ("7 SRG trichotomy", srg_trichotomy),
        ("8 MBA constraint battery", mba_battery),
        ("9 characteristic closures", characteristic_properties),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} ({secs:.1}s): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
