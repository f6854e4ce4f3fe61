//! `ctxpool verify`: oracle suites runnable outside the test harness.

use std::fs;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ctxpool::cnf::{cnf_train_exhaustive, cnf_train_optimized, MetricMode, SizeRange, TrainConfig};
use ctxpool::oracle::{
    brute_force_cnf, generate_synthetic, naive_neighborhoods, naive_relevance, random_graph,
    verify_product_identities, RandomGraphSpec, SyntheticSpec,
};
use ctxpool::relevance::{rel_precision, rel_recall, MetricKind};
use ctxpool::{KnowledgeGraph, RelationId, RelationSet};

use crate::{io_err, CliError, CliResult, Provenance, Suite, VerifyArgs};

fn small_graph(seed: u64, max_entities: usize, max_relations: usize) -> KnowledgeGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let num_entities = rng.gen_range(1..=max_entities.max(1));
    let num_relations = rng.gen_range(1..=max_relations.max(1));
    let num_triples = rng.gen_range(0..=3 * num_entities);
    random_graph(&RandomGraphSpec {
        num_entities,
        num_relations,
        num_triples,
        seed,
    })
}

fn metrics(a: &VerifyArgs) -> Result<String, String> {
    let max_entities = a.max_entities.unwrap_or(50);
    let mut checked = 0usize;
    for seed in a.seed..a.seed + a.seeds {
        let g = small_graph(seed, max_entities, a.max_relations);
        let nrs = naive_neighborhoods(&g);
        let ids = g.num_relation_ids() as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..a.queries {
            let nr: RelationSet = if rng.gen_bool(0.5) {
                let ne: Vec<RelationId> =
                    nrs[rng.gen_range(0..nrs.len())].iter().copied().collect();
                ne.into_iter().filter(|_| rng.gen_bool(0.5)).collect()
            } else {
                let k = rng.gen_range(0..=3);
                (0..k).map(|_| RelationId(rng.gen_range(0..ids))).collect()
            };
            let r = RelationId(rng.gen_range(0..ids));
            for (indexed, kind) in [
                (rel_precision(&g, &nr, r), MetricKind::Precision),
                (rel_recall(&g, &nr, r), MetricKind::Recall),
            ] {
                let naive = naive_relevance(&g, &nr, r, kind);
                if indexed != naive {
                    return Err(format!(
                        "graph seed {seed}: {kind:?} of {nr:?} for {r}: indexed {indexed}, naive {naive}"
                    ));
                }
            }
            checked += 1;
        }
    }
    Ok(format!(
        "metrics: {checked} queries on {} graphs agree",
        a.seeds
    ))
}

fn cnf(a: &VerifyArgs) -> Result<String, String> {
    let max_entities = a.max_entities.unwrap_or(30);
    let modes = [MetricMode::Precision, MetricMode::Recall, MetricMode::Both];
    let sizes = [
        SizeRange::new(1, 2),
        SizeRange::new(1, 4),
        SizeRange::new(4, 6),
    ];
    let mut configs = 0usize;
    for seed in a.seed..a.seed + a.seeds {
        let g = small_graph(seed, max_entities, a.max_relations);
        for mode in modes {
            for t in [0.1, 0.3, 0.5, 0.9] {
                for s in sizes {
                    let cfg = TrainConfig::exhaustive(mode, t, t, Some(s));
                    let ex = cnf_train_exhaustive(&g, &cfg).map_err(|e| e.to_string())?;
                    for r in g.relation_ids() {
                        let reference = brute_force_cnf(&g, r, &cfg).map_err(|e| e.to_string())?;
                        if ex.family(r) != reference.as_slice() {
                            return Err(format!(
                                "graph seed {seed}: {mode} threshold {t} sizes {s}: family of {r} differs from brute force"
                            ));
                        }
                    }
                    configs += 1;
                }
                let singles = cnf_train_exhaustive(
                    &g,
                    &TrainConfig::exhaustive(mode, t, t, Some(SizeRange::new(1, 2))),
                )
                .map_err(|e| e.to_string())?;
                let op = cnf_train_optimized(&g, &TrainConfig::optimized(mode, t, t))
                    .map_err(|e| e.to_string())?;
                for r in g.relation_ids() {
                    let mut lhs: Vec<_> = singles
                        .family(r)
                        .iter()
                        .map(|s| (s.relations.as_slice()[0], s.precision, s.recall))
                        .collect();
                    lhs.sort_by_key(|x| x.0);
                    let rhs: Vec<_> = op
                        .entry(r)
                        .iter()
                        .map(|s| (s.relation, s.precision, s.recall))
                        .collect();
                    if lhs != rhs {
                        return Err(format!(
                            "graph seed {seed}: {mode} threshold {t}: optimized entry of {r} differs from singleton family"
                        ));
                    }
                }
            }
        }
    }
    Ok(format!(
        "cnf: {configs} exhaustive configurations and all singleton checks on {} graphs agree",
        a.seeds
    ))
}

pub(crate) fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let prov = Provenance::new(&format!("verify {:?}", a.suite).to_lowercase());
    let outcome = match a.suite {
        Suite::Metrics => metrics(&a),
        Suite::Cnf => cnf(&a),
        Suite::Theorem => {
            if !(0.0..=1.0).contains(&a.prob) {
                return Err(CliError::Usage("--prob must lie in [0, 1]".into()));
            }
            let spec = SyntheticSpec::uniform(a.entities, a.relations, a.prob, a.seed);
            let sg = generate_synthetic(&spec)?;
            let rep = verify_product_identities(&sg, a.set_size, a.samples, a.seed)?;
            if let Some(path) = &a.tsv {
                fs::write(path, rep.to_tsv(&sg.graph)).map_err(|e| ctxpool::Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
            }
            let tol = a
                .tolerance
                .unwrap_or(if a.set_size == 2 { 0.02 } else { 0.03 });
            let text = format!("{}tolerance: {tol}\n", rep.to_text());
            if !rep.samples.is_empty() && rep.within(tol) {
                Ok(text)
            } else {
                Err(text)
            }
        }
    };
    match outcome {
        Ok(msg) => write!(out, "{}{}\nPASS\n", prov.render(), msg.trim_end()).map_err(io_err),
        Err(msg) => {
            write!(out, "{}{}\nFAIL\n", prov.render(), msg.trim_end()).map_err(io_err)?;
            Err(CliError::Verification(
                format!("{:?} suite failed", a.suite).to_lowercase(),
            ))
        }
    }
}
