//! Posterior computation for strictly positive distributions.
//!
//! Each local network yields `alpha_ij = P(h_i | evidence, h in A_j)`. Within
//! a cell the ratios `alpha_aj / alpha_bj` equal the ratios of the global
//! posteriors, and a connected cover chains those ratios into a single
//! distribution over all hypotheses.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::infer::infer;
use crate::model::{Evidence, PosteriorVector, Warning};
use crate::simnet::SimilarityNetwork;
use crate::{EPS_CONSIST, EPS_ZERO};

/// Local posteriors of one cover cell, aligned with `hypotheses`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellAlphas {
    pub hypotheses: Vec<String>,
    pub alphas: Vec<f64>,
}

impl CellAlphas {
    pub fn get(&self, h: &str) -> Option<f64> {
        self.hypotheses.iter().position(|v| v == h).map(|i| self.alphas[i])
    }
}

/// `alpha_ij` for every cell `j` and hypothesis `h_i` in it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaTable {
    pub cells: Vec<CellAlphas>,
}

impl AlphaTable {
    pub fn get(&self, h: &str, cell: usize) -> Option<f64> {
        self.cells.get(cell).and_then(|c| c.get(h))
    }

    /// Smallest entry, or `None` for an empty table.
    pub fn min(&self) -> Option<f64> {
        self.cells
            .iter()
            .flat_map(|c| c.alphas.iter().copied())
            .reduce(f64::min)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyViolation {
    pub pair: (String, String),
    pub cells: (usize, usize),
    pub ratios: (f64, f64),
    pub discrepancy: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub violations: Vec<ConsistencyViolation>,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "consistent");
        }
        for v in &self.violations {
            writeln!(
                f,
                "{}/{}: ratio {:.9} in cell {} vs {:.9} in cell {} (log discrepancy {:.3e})",
                v.pair.0, v.pair.1, v.ratios.0, v.cells.0, v.ratios.1, v.cells.1, v.discrepancy
            )?;
        }
        Ok(())
    }
}

/// Result of [`infer_posterior_strict_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct StrictAnswer {
    pub posterior: PosteriorVector,
    pub alphas: AlphaTable,
    pub warnings: Vec<Warning>,
    /// Joint-table cells spanned by the local networks inference ran on.
    pub cells_touched: u128,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StrictOptions {
    /// Zero chains ratios from the first cell in declaration order; any other
    /// value picks a seeded root and neighbour order for the spanning tree.
    pub tree_seed: u64,
}

/// Runs inference in every local network on the evidence it depicts.
///
/// Evidence on variables a local network omits is dropped for that network.
/// A local network in which the remaining evidence is impossible cannot
/// provide ratios, so this fails with [`Error::NotStrictlyPositive`].
pub fn compute_alphas(sn: &SimilarityNetwork, evidence: &Evidence) -> Result<AlphaTable> {
    sn.check_evidence(evidence)?;
    let h = sn.hypothesis();
    let mut cells = Vec::with_capacity(sn.locals.len());
    for local in &sn.locals {
        let bn = &local.network;
        let filtered = evidence.filtered(|v| bn.contains(v));
        let post = match infer(bn, h, &filtered) {
            Err(Error::ZeroProbabilityEvidence) => return Err(Error::NotStrictlyPositive),
            other => other?,
        };
        let alphas = local
            .cell
            .iter()
            .map(|v| {
                post.get(v).ok_or_else(|| Error::UnknownValue {
                    variable: h.to_string(),
                    value: v.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        cells.push(CellAlphas {
            hypotheses: local.cell.clone(),
            alphas,
        });
    }
    Ok(AlphaTable { cells })
}

/// `P(h | evidence)` from the local networks of a strictly positive model.
pub fn infer_posterior_strict(sn: &SimilarityNetwork, evidence: &Evidence) -> Result<PosteriorVector> {
    infer_posterior_strict_with(sn, evidence, &StrictOptions::default()).map(|a| a.posterior)
}

pub fn infer_posterior_strict_with(
    sn: &SimilarityNetwork,
    evidence: &Evidence,
    options: &StrictOptions,
) -> Result<StrictAnswer> {
    let violations = sn.cover.validate(sn.model.hypotheses());
    if !violations.is_empty() {
        return Err(Error::InvalidCover(violations));
    }
    let alphas = compute_alphas(sn, evidence)?;
    if alphas.min().is_some_and(|m| m <= EPS_ZERO) {
        return Err(Error::NotStrictlyPositive);
    }
    let log_q = solve_ratios(&sn.cover, sn.model.hypotheses(), &alphas, options.tree_seed)?;
    let top = log_q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_q.iter().map(|l| (l - top).exp()).collect();
    let posterior = PosteriorVector::from_weights(
        sn.hypothesis().to_string(),
        sn.model.hypotheses().to_vec(),
        weights,
    )
    .ok_or(Error::NotStrictlyPositive)?;

    let dropped = sn.undepicted_evidence(evidence);
    let warnings = if dropped.is_empty() {
        Vec::new()
    } else {
        vec![Warning::DroppedEvidence { variables: dropped }]
    };
    Ok(StrictAnswer {
        posterior,
        alphas,
        warnings,
        cells_touched: sn.locals.iter().map(|l| l.network.state_space()).sum(),
    })
}

/// `P(h)`, obtained by inference without evidence.
pub fn recover_prior(sn: &SimilarityNetwork) -> Result<PosteriorVector> {
    infer_posterior_strict(sn, &Evidence::new())
}

// Unnormalized log-posteriors, one per domain value, from ratio chaining over
// a spanning tree of the cell-adjacency graph. Every cell equation is then
// checked against the solution, which catches inconsistent cycles too.
fn solve_ratios(cover: &Cover, domain: &[String], alphas: &AlphaTable, seed: u64) -> Result<Vec<f64>> {
    let n = cover.len();
    let pos = |h: &str| domain.iter().position(|v| v == h).expect("cover values are in the domain");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root = if seed == 0 { 0 } else { rng.gen_range(0..n) };
    let mut log_q = vec![f64::NAN; domain.len()];
    let mut visited = vec![false; n];
    let mut queue = std::collections::VecDeque::from([root]);
    visited[root] = true;
    let cell = &alphas.cells[root];
    for (h, a) in cell.hypotheses.iter().zip(&cell.alphas) {
        log_q[pos(h)] = a.ln();
    }
    while let Some(c) = queue.pop_front() {
        let mut next: Vec<usize> = (0..n).filter(|&d| !visited[d] && cover.adjacent(c, d)).collect();
        if seed != 0 {
            next.shuffle(&mut rng);
        }
        for d in next {
            visited[d] = true;
            let cell = &alphas.cells[d];
            let witness = domain
                .iter()
                .find(|v| cover.cells[c].contains(v) && cover.cells[d].contains(v))
                .expect("adjacent cells share a hypothesis");
            let anchor = log_q[pos(witness)] - cell.get(witness).expect("witness in cell").ln();
            for (h, a) in cell.hypotheses.iter().zip(&cell.alphas) {
                let k = pos(h);
                if log_q[k].is_nan() {
                    log_q[k] = anchor + a.ln();
                }
            }
            queue.push_back(d);
        }
    }
    if log_q.iter().any(|l| l.is_nan()) {
        return Err(Error::InvalidCover(cover.validate(domain)));
    }
    for (j, cell) in alphas.cells.iter().enumerate() {
        let (h0, a0) = (&cell.hypotheses[0], cell.alphas[0]);
        for (h, a) in cell.hypotheses.iter().zip(&cell.alphas).skip(1) {
            let local = a.ln() - a0.ln();
            let solved = log_q[pos(h)] - log_q[pos(h0)];
            if (local - solved).abs() > EPS_CONSIST {
                return Err(Error::Inconsistent(format!(
                    "cell {j}: log P({h})/P({h0}) is {local:.9} locally but {solved:.9} overall"
                )));
            }
        }
    }
    Ok(log_q)
}

/// Compares `alpha_aj / alpha_bj` across every pair of cells that both
/// contain `h_a` and `h_b`. Pairs involving a zero entry have no ratio and
/// are skipped.
pub fn check_consistency(a: &AlphaTable, cover: &Cover) -> ConsistencyReport {
    let mut violations = Vec::new();
    let values: Vec<&String> = {
        let mut seen: Vec<&String> = Vec::new();
        for c in &cover.cells {
            for v in c {
                if !seen.contains(&v) {
                    seen.push(v);
                }
            }
        }
        seen
    };
    for (i, ha) in values.iter().enumerate() {
        for hb in &values[i + 1..] {
            let ratios: Vec<(usize, f64)> = (0..cover.len())
                .filter_map(|j| {
                    let (x, y) = (a.get(ha, j)?, a.get(hb, j)?);
                    (x > EPS_ZERO && y > EPS_ZERO).then(|| (j, x / y))
                })
                .collect();
            for (k, &(j1, r1)) in ratios.iter().enumerate() {
                for &(j2, r2) in &ratios[k + 1..] {
                    let discrepancy = (r1.ln() - r2.ln()).abs();
                    if discrepancy > EPS_CONSIST {
                        violations.push(ConsistencyViolation {
                            pair: ((*ha).clone(), (*hb).clone()),
                            cells: (j1, j2),
                            ratios: (r1, r2),
                            discrepancy,
                        });
                    }
                }
            }
        }
    }
    ConsistencyReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::NetworkBuilder;
    use crate::simnet::{DiscreteModel, Kind, LocalNetwork};
    use crate::{HypothesisEvent, Variable};

    fn plus_y() -> Evidence {
        Evidence::from_pairs(&[("y", "+y")])
    }

    #[test]
    fn toy3_alphas_are_one_zero_one() {
        let a = compute_alphas(&fixtures::toy3(), &plus_y()).unwrap();
        assert!((a.get("h1", 0).unwrap() - 1.0).abs() < 1e-12);
        assert!(a.get("h2", 1).unwrap().abs() < 1e-12);
        assert!((a.get("h3", 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn toy3_is_refused() {
        assert!(matches!(
            infer_posterior_strict(&fixtures::toy3(), &plus_y()),
            Err(Error::NotStrictlyPositive)
        ));
    }

    #[test]
    fn toy3p_posterior() {
        let post = infer_posterior_strict(&fixtures::toy3p(), &plus_y()).unwrap();
        let oracle = fixtures::toy3p_joint().posterior("h", &plus_y()).unwrap();
        assert!(post.max_abs_diff(&oracle) < 1e-12);
        assert!((post.get("h1").unwrap() - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn no_evidence_alphas_are_local_priors() {
        let sn = fixtures::sb();
        let a = compute_alphas(&sn, &Evidence::new()).unwrap();
        // spy:visitor = 0.05:0.2 within the first cell
        assert!((a.get("spy", 0).unwrap() - 0.2).abs() < 1e-12);
        assert!((a.get("visitor", 0).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn evidence_outside_a_local_network_is_ignored_there() {
        let sn = fixtures::sb();
        let with_l = compute_alphas(&sn, &Evidence::from_pairs(&[("l", "yes")])).unwrap();
        let without = compute_alphas(&sn, &Evidence::new()).unwrap();
        assert_eq!(with_l.cells[0], without.cells[0]);
        assert_ne!(with_l.cells[2], without.cells[2]);
    }

    #[test]
    fn sb_prior_is_recovered() {
        let prior = recover_prior(&fixtures::sb()).unwrap();
        let oracle = fixtures::sb_joint().posterior("h", &Evidence::new()).unwrap();
        assert!(prior.max_abs_diff(&oracle) < 1e-9);
    }

    fn two_cell_priors() -> SimilarityNetwork {
        let h = Variable::new("h", &["h1", "h2", "h3"]);
        let local = |cell: &[&str], p: &[f64]| LocalNetwork {
            cell: cell.iter().map(|s| s.to_string()).collect(),
            network: NetworkBuilder::new()
                .variable("h", cell)
                .cpt("h", &[], &[p])
                .context(HypothesisEvent::new("h", cell))
                .build()
                .unwrap(),
        };
        SimilarityNetwork {
            model: DiscreteModel {
                variables: vec![h],
                hypothesis: "h".into(),
            },
            cover: fixtures::toy3_cover(),
            locals: vec![local(&["h1", "h2"], &[0.5, 0.5]), local(&["h2", "h3"], &[0.25, 0.75])],
            kind: Kind::Unspecified,
        }
    }

    #[test]
    fn hand_built_priors_chain_to_one_fifth() {
        let prior = recover_prior(&two_cell_priors()).unwrap();
        let expected = [0.2, 0.2, 0.6];
        for (p, e) in prior.probabilities.iter().zip(expected) {
            assert!((p - e).abs() < 1e-15, "{p} vs {e}");
        }
    }

    #[test]
    fn spanning_tree_choice_does_not_matter() {
        let sn = fixtures::sb();
        let ev = Evidence::from_pairs(&[("g", "female")]);
        let base = infer_posterior_strict_with(&sn, &ev, &StrictOptions::default()).unwrap();
        for seed in 1..6 {
            let other = infer_posterior_strict_with(&sn, &ev, &StrictOptions { tree_seed: seed }).unwrap();
            assert!(base.posterior.max_abs_diff(&other.posterior) < 1e-12);
        }
    }

    #[test]
    fn computed_alphas_are_consistent() {
        let sn = fixtures::sb();
        let a = compute_alphas(&sn, &Evidence::from_pairs(&[("g", "male")])).unwrap();
        assert!(check_consistency(&a, &sn.cover).is_consistent());
    }

    #[test]
    fn conflicting_ratios_are_reported() {
        let cover = Cover::new(&[&["h1", "h2"][..], &["h1", "h2", "h3"][..]]);
        let a = AlphaTable {
            cells: vec![
                CellAlphas {
                    hypotheses: vec!["h1".into(), "h2".into()],
                    alphas: vec![2.0 / 3.0, 1.0 / 3.0],
                },
                CellAlphas {
                    hypotheses: vec!["h1".into(), "h2".into(), "h3".into()],
                    alphas: vec![0.6, 0.2, 0.2],
                },
            ],
        };
        let report = check_consistency(&a, &cover);
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!(v.pair, ("h1".to_string(), "h2".to_string()));
        assert!((v.discrepancy - (3f64.ln() - 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn chain_cover_without_overlap_is_consistent() {
        let sn = fixtures::toy3p();
        let a = compute_alphas(&sn, &plus_y()).unwrap();
        assert!(check_consistency(&a, &sn.cover).is_consistent());
    }

    #[test]
    fn inconsistent_cycle_is_refused() {
        let mut sn = two_cell_priors();
        sn.cover = Cover::new(&[&["h1", "h2"][..], &["h2", "h3"][..], &["h1", "h3"][..]]);
        let extra = LocalNetwork {
            cell: vec!["h1".into(), "h3".into()],
            network: NetworkBuilder::new()
                .variable("h", &["h1", "h3"])
                .cpt("h", &[], &[&[0.5, 0.5]])
                .context(HypothesisEvent::new("h", &["h1", "h3"]))
                .build()
                .unwrap(),
        };
        sn.locals.push(extra);
        assert!(matches!(recover_prior(&sn), Err(Error::Inconsistent(_))));
    }
}
