//! Seeded random networks, joints, covers and evidence for property tests
//! and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cover::Cover;
use crate::model::{BayesianNetwork, Cpt, Evidence, Variable};
use crate::oracle::{JointTable, DEFAULT_CELL_BUDGET};

/// A random probability vector with every entry at least `floor`.
pub fn random_distribution<R: Rng>(rng: &mut R, card: usize, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..card).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let slack = 1.0 - floor * card as f64;
    raw.iter().map(|r| floor + slack * r / total).collect()
}

/// A random DAG over `nodes` variables with domains of size 2 to
/// `max_card`, at most `max_parents` parents each, and random CPTs. Node `i`
/// only takes parents among `0..i`.
pub fn random_network<R: Rng>(rng: &mut R, nodes: usize, max_card: usize, max_parents: usize) -> BayesianNetwork {
    let vars: Vec<Variable> = (0..nodes)
        .map(|i| {
            let card = rng.gen_range(2..=max_card.max(2));
            let values: Vec<String> = (0..card).map(|v| format!("v{v}")).collect();
            Variable::new(format!("x{i}"), &values)
        })
        .collect();
    let cpts = (0..nodes)
        .map(|i| {
            let mut candidates: Vec<usize> = (0..i).collect();
            candidates.shuffle(rng);
            let k = rng.gen_range(0..=max_parents.min(i));
            let mut parents: Vec<usize> = candidates.into_iter().take(k).collect();
            parents.sort_unstable();
            let rows: usize = parents.iter().map(|&p| vars[p].card()).product();
            let table = (0..rows)
                .flat_map(|_| random_distribution(rng, vars[i].card(), 0.01))
                .collect();
            Cpt::new(parents, table)
        })
        .collect();
    BayesianNetwork::new(vars, cpts).expect("generated shapes are consistent")
}

/// Shape of a random joint over a hypothesis `h` and binary findings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointSpec {
    pub hypotheses: usize,
    pub findings: usize,
    /// Fraction of finding CPT entries forced to zero.
    pub zero_fraction: f64,
}

/// A joint `P(h, u_0, ..., u_{m-1})` with structure that similarity networks
/// can exploit.
///
/// `h` is a root with a prior bounded away from zero. Each finding has `h`
/// and up to two earlier findings as parents. For every finding the
/// hypotheses are grouped into one to three classes that share CPT rows, so
/// a finding can be unrelated to `h` within a cell, and a parent can be
/// ignored by some classes, giving hypothesis-specific independence. Zeros
/// are injected per class row, which keeps every row normalized.
pub fn random_joint<R: Rng>(rng: &mut R, spec: &JointSpec) -> (BayesianNetwork, JointTable) {
    let k = spec.hypotheses;
    let hvalues: Vec<String> = (0..k).map(|i| format!("h{i}")).collect();
    let mut vars = vec![Variable::new("h", &hvalues)];
    vars.extend((0..spec.findings).map(|i| Variable::binary(format!("u{i}"))));
    let mut cpts = vec![Cpt::new(Vec::new(), random_distribution(rng, k, 0.05))];

    let mut class_rows: Vec<Vec<f64>> = Vec::new();
    let mut layouts = Vec::new();
    for i in 0..spec.findings {
        let node = i + 1;
        let classes = rng.gen_range(1..=3.min(k));
        let class_of: Vec<usize> = (0..k).map(|_| rng.gen_range(0..classes)).collect();
        let mut earlier: Vec<usize> = (1..node).collect();
        earlier.shuffle(rng);
        let mut parents: Vec<usize> = earlier.into_iter().take(rng.gen_range(0..=2)).collect();
        parents.sort_unstable();
        // which classes ignore each parent
        let ignores: Vec<Vec<bool>> = (0..classes)
            .map(|_| parents.iter().map(|_| rng.gen_bool(0.3)).collect())
            .collect();
        let configs = 1usize << parents.len();
        let start = class_rows.len();
        for _ in 0..classes * configs {
            class_rows.push(random_distribution(rng, 2, 0.02));
        }
        layouts.push((class_of, parents, ignores, configs, start));
    }
    let zeros = (spec.zero_fraction * class_rows.len() as f64).round() as usize;
    let mut targets: Vec<usize> = (0..class_rows.len()).collect();
    targets.shuffle(rng);
    for &r in targets.iter().take(zeros) {
        let hit = rng.gen_range(0..2);
        class_rows[r][hit] = 0.0;
        class_rows[r][1 - hit] = 1.0;
    }

    for (class_of, parents, ignores, configs, start) in layouts {
        let mut table = Vec::with_capacity(k * configs * 2);
        for &c in class_of.iter() {
            for config in 0..configs {
                // clear the bits of ignored parents so those rows coincide
                let mut effective = config;
                for (b, &ignored) in ignores[c].iter().enumerate() {
                    if ignored {
                        effective &= !(1 << (parents.len() - 1 - b));
                    }
                }
                table.extend_from_slice(&class_rows[start + c * configs + effective]);
            }
        }
        let mut all = vec![0];
        all.extend(parents);
        cpts.push(Cpt::new(all, table));
    }
    let bn = BayesianNetwork::new(vars, cpts).expect("generated shapes are consistent");
    let t = JointTable::from_network(&bn, DEFAULT_CELL_BUDGET).expect("small joints fit");
    (bn, t)
}

/// A random connected cover of `domain`: cells grow a spanning structure
/// from a random first cell, each new cell sharing at least one covered
/// value; occasionally an extra overlapping cell is added.
pub fn random_cover<R: Rng>(rng: &mut R, domain: &[String]) -> Cover {
    let n = domain.len();
    let mut pending: Vec<usize> = (0..n).collect();
    pending.shuffle(rng);
    let mut covered: Vec<usize> = Vec::new();
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let first = rng.gen_range(1..=n.min(3));
    covered.extend(pending.drain(..first));
    cells.push(covered.clone());
    while !pending.is_empty() {
        let anchor = covered[rng.gen_range(0..covered.len())];
        let take = rng.gen_range(1..=pending.len().min(2));
        let fresh: Vec<usize> = pending.drain(..take).collect();
        let mut cell = vec![anchor];
        cell.extend(&fresh);
        covered.extend(fresh);
        cells.push(cell);
    }
    if n >= 3 && rng.gen_bool(0.3) {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(rng);
        cells.push(all.into_iter().take(rng.gen_range(2..=n)).collect());
    }
    cells.shuffle(rng);
    let cells = cells
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            c.dedup();
            c.into_iter().map(|i| domain[i].clone()).collect()
        })
        .collect();
    Cover { cells }
}

/// Observes each of `variables` with probability one half, at a uniformly
/// chosen value.
pub fn random_evidence<R: Rng>(rng: &mut R, variables: &[Variable]) -> Evidence {
    let mut e = Evidence::new();
    for v in variables {
        if rng.gen_bool(0.5) {
            e.insert(v.name.clone(), v.values[rng.gen_range(0..v.card())].clone());
        }
    }
    e
}

/// A uniformly random permutation of the names of `variables`.
pub fn random_order<R: Rng>(rng: &mut R, variables: &[Variable]) -> Vec<String> {
    let mut names: Vec<String> = variables.iter().map(|v| v.name.clone()).collect();
    names.shuffle(rng);
    names
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn covers_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 1..7 {
            let domain: Vec<String> = (0..k).map(|i| format!("h{i}")).collect();
            for _ in 0..50 {
                let cover = random_cover(&mut rng, &domain);
                assert!(cover.validate(&domain).is_empty(), "{cover:?}");
            }
        }
    }

    #[test]
    fn joints_are_normalized_and_positive_without_zeros() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = JointSpec {
            hypotheses: 4,
            findings: 4,
            zero_fraction: 0.0,
        };
        for _ in 0..20 {
            let (bn, t) = random_joint(&mut rng, &spec);
            assert!(bn.validate().is_empty());
            assert!(crate::oracle::strictly_positive(&t));
        }
    }

    #[test]
    fn zero_injection_keeps_priors_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spec = JointSpec {
            hypotheses: 4,
            findings: 4,
            zero_fraction: 0.2,
        };
        let (bn, t) = random_joint(&mut rng, &spec);
        assert!(bn.validate().is_empty());
        let prior = t.posterior("h", &Evidence::new()).unwrap();
        assert!(prior.probabilities.iter().all(|&p| p > 0.0));
    }

    #[test]
    fn random_networks_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            assert!(random_network(&mut rng, 6, 3, 3).validate().is_empty());
        }
    }
}
