#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use ctxpool::cnf::Cnf;
use ctxpool::pooling::{node_selector, ContextGraph};
use ctxpool::{EntityId, KnowledgeGraph};

/// Every edge of `cg` exists in `g`.
pub fn subgraph_violations(g: &KnowledgeGraph, cg: &ContextGraph) -> Vec<String> {
    cg.union
        .iter()
        .filter(|t| !g.contains_triple(t))
        .map(|t| format!("edge {t:?} not in source graph"))
        .collect()
}

/// Every entity touched by the union is reachable from the head within `hops`
/// steps over union edges.
pub fn connectivity_violations(cg: &ContextGraph) -> Vec<String> {
    let mut adj: BTreeMap<EntityId, Vec<EntityId>> = BTreeMap::new();
    for t in &cg.union {
        adj.entry(t.head).or_default().push(t.tail);
    }
    let h = cg.query.0;
    let mut depth = BTreeMap::from([(h, 0usize)]);
    let mut queue = VecDeque::from([h]);
    while let Some(e) = queue.pop_front() {
        let d = depth[&e];
        if d == cg.hops {
            continue;
        }
        for &n in adj.get(&e).into_iter().flatten() {
            if let std::collections::btree_map::Entry::Vacant(e) = depth.entry(n) {
                e.insert(d + 1);
                queue.push_back(n);
            }
        }
    }
    cg.entities()
        .into_iter()
        .filter(|e| !depth.contains_key(e))
        .map(|e| format!("entity {e} unreachable within {} hops", cg.hops))
        .collect()
}

/// Each layer-l edge is labeled with a relation the selector admits for some
/// frontier pair at its head, and each head was on that frontier.
pub fn admissibility_violations(g: &KnowledgeGraph, cnf: &Cnf, cg: &ContextGraph) -> Vec<String> {
    let mut out = Vec::new();
    for l in 1..=cg.hops {
        let frontier = cg.frontier_before(g, l);
        let mut by_entity: BTreeMap<EntityId, Vec<_>> = BTreeMap::new();
        for &(e, via) in &frontier {
            by_entity.entry(e).or_default().push(via);
        }
        let mut selected = BTreeMap::new();
        for t in &cg.layers[l - 1] {
            let Some(vias) = by_entity.get(&t.head) else {
                out.push(format!("hop {l} edge {t:?} starts outside the frontier"));
                continue;
            };
            let ok = vias.iter().any(|&via| {
                selected
                    .entry((t.head, via))
                    .or_insert_with(|| node_selector(cnf, g, t.head, via).unwrap())
                    .contains(t.relation)
            });
            if !ok {
                out.push(format!("hop {l} edge {t:?} carries an unselected relation"));
            }
        }
    }
    out
}

/// The union for fewer hops is contained in the union for more hops.
pub fn monotone_violations(shorter: &ContextGraph, longer: &ContextGraph) -> Vec<String> {
    let missing: BTreeSet<_> = shorter.union.difference(&longer.union).collect();
    if missing.is_empty() {
        Vec::new()
    } else {
        vec![format!(
            "{} edges of the {}-hop graph missing from the {}-hop graph",
            missing.len(),
            shorter.hops,
            longer.hops
        )]
    }
}

pub fn all_violations(g: &KnowledgeGraph, cnf: &Cnf, cg: &ContextGraph) -> Vec<String> {
    let mut v = subgraph_violations(g, cg);
    v.extend(connectivity_violations(cg));
    v.extend(admissibility_violations(g, cnf, cg));
    v
}
