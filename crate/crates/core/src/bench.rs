//! Wall-clock comparison of the two family trainers on the same graph.

use std::fmt::Write as _;
use std::time::Instant;

use crate::cnf::{
    cnf_train_exhaustive, cnf_train_optimized, ExhaustiveCnf, OptimizedCnf, TrainConfig,
};
use crate::error::Result;
use crate::kg::KnowledgeGraph;

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub dataset: String,
    pub exhaustive_config: TrainConfig,
    pub optimized_config: TrainConfig,
    pub exhaustive_train_seconds: f64,
    pub optimized_train_seconds: f64,
    /// Total sets kept by the exhaustive trainer.
    pub exhaustive_sets: usize,
    /// Total relations kept by the optimized trainer.
    pub optimized_entries: usize,
    pub threads: usize,
}

impl BenchReport {
    pub fn speedup(&self) -> f64 {
        self.exhaustive_train_seconds / self.optimized_train_seconds.max(f64::MIN_POSITIVE)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let cfg = |c: &TrainConfig| {
            let sizes = c
                .set_sizes
                .map(|r| r.to_string())
                .unwrap_or_else(|| "all".into());
            format!(
                "metric={} threshold_pre={} threshold_rec={} set_sizes={}",
                c.metric, c.threshold_pre, c.threshold_rec, sizes
            )
        };
        let _ = writeln!(s, "dataset:            {}", self.dataset);
        let _ = writeln!(s, "threads:            {}", self.threads);
        let _ = writeln!(s, "exhaustive config:  {}", cfg(&self.exhaustive_config));
        let _ = writeln!(s, "optimized config:   {}", cfg(&self.optimized_config));
        let _ = writeln!(
            s,
            "exhaustive train:   {:.3} s ({} sets)",
            self.exhaustive_train_seconds, self.exhaustive_sets
        );
        let _ = writeln!(
            s,
            "optimized train:    {:.3} s ({} relations)",
            self.optimized_train_seconds, self.optimized_entries
        );
        let _ = writeln!(s, "speedup:            {:.2}x", self.speedup());
        let _ = writeln!(s, "note: times cover family training only, single run");
        s
    }
}

/// Output of [`run_bench`] together with the trained families.
pub struct BenchRun {
    pub report: BenchReport,
    pub exhaustive: ExhaustiveCnf,
    pub optimized: OptimizedCnf,
}

/// Times both trainers once each on `g`.
pub fn run_bench(
    g: &KnowledgeGraph,
    dataset: &str,
    exhaustive_config: &TrainConfig,
    optimized_config: &TrainConfig,
) -> Result<BenchRun> {
    let t = Instant::now();
    let exhaustive = cnf_train_exhaustive(g, exhaustive_config)?;
    let exhaustive_train_seconds = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let optimized = cnf_train_optimized(g, optimized_config)?;
    let optimized_train_seconds = t.elapsed().as_secs_f64();

    let report = BenchReport {
        dataset: dataset.to_owned(),
        exhaustive_config: exhaustive_config.clone(),
        optimized_config: optimized_config.clone(),
        exhaustive_train_seconds,
        optimized_train_seconds,
        exhaustive_sets: g.relation_ids().map(|r| exhaustive.family(r).len()).sum(),
        optimized_entries: g.relation_ids().map(|r| optimized.entry(r).len()).sum(),
        threads: rayon::current_num_threads(),
    };
    Ok(BenchRun {
        report,
        exhaustive,
        optimized,
    })
}
