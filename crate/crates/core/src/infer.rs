//! Exact inference on a single Bayesian network.
//!
//! Enumeration over all completions of the evidence is the reference
//! implementation. Variable elimination is available as a faster path and is
//! property-tested against enumeration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{for_each_assignment, BayesianNetwork, Evidence, PosteriorVector};
use crate::EPS_ZERO;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    Enumeration,
    VariableElimination,
}

/// Work performed by one likelihood computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub lookups: u64,
    pub multiplications: u64,
    pub additions: u64,
}

impl std::ops::AddAssign for OpCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.lookups += rhs.lookups;
        self.multiplications += rhs.multiplications;
        self.additions += rhs.additions;
    }
}

/// Exact `P(query | evidence)` by enumeration.
pub fn infer(bn: &BayesianNetwork, query: &str, evidence: &Evidence) -> Result<PosteriorVector> {
    infer_with(bn, query, evidence, Strategy::Enumeration)
}

pub fn infer_with(
    bn: &BayesianNetwork,
    query: &str,
    evidence: &Evidence,
    strategy: Strategy,
) -> Result<PosteriorVector> {
    let q = bn.require_node(query)?;
    let observed = bn.evidence_indices(evidence)?;
    if observed.iter().any(|&(i, _)| i == q) {
        return Err(Error::Malformed(format!("query `{query}` is also observed")));
    }
    let weights = match strategy {
        Strategy::Enumeration => enumerate_query(bn, q, &observed),
        Strategy::VariableElimination => eliminate_query(bn, q, &observed),
    };
    let total: f64 = weights.iter().sum();
    if total <= EPS_ZERO {
        return Err(Error::ZeroProbabilityEvidence);
    }
    Ok(PosteriorVector::new(
        query.to_string(),
        bn.node(q).values.clone(),
        weights.into_iter().map(|w| w / total).collect(),
    ))
}

fn enumerate_query(bn: &BayesianNetwork, q: usize, observed: &[(usize, usize)]) -> Vec<f64> {
    let n = bn.len();
    let mut assignment = vec![0usize; n];
    let mut fixed = vec![false; n];
    for &(i, v) in observed {
        assignment[i] = v;
        fixed[i] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
    let cards: Vec<usize> = free.iter().map(|&i| bn.node(i).card()).collect();
    let mut weights = vec![0.0; bn.node(q).card()];
    for_each_assignment(&cards, |a| {
        for (k, &i) in free.iter().enumerate() {
            assignment[i] = a[k];
        }
        weights[assignment[q]] += bn.joint_of(&assignment);
    });
    weights
}

/// `P(evidence)` under the network's joint; 0 when the evidence is impossible.
pub fn evidence_likelihood(bn: &BayesianNetwork, evidence: &Evidence) -> Result<f64> {
    evidence_likelihood_counted(bn, evidence).map(|(p, _)| p)
}

/// Like [`evidence_likelihood`], also reporting the table lookups,
/// multiplications and additions performed.
///
/// Only the evidence nodes and their ancestors are enumerated; every other
/// node sums out to one.
pub fn evidence_likelihood_counted(
    bn: &BayesianNetwork,
    evidence: &Evidence,
) -> Result<(f64, OpCounts)> {
    let observed = bn.evidence_indices(evidence)?;
    if observed.is_empty() {
        return Ok((1.0, OpCounts::default()));
    }
    let n = bn.len();
    let mut relevant = vec![false; n];
    let mut stack: Vec<usize> = observed.iter().map(|&(i, _)| i).collect();
    while let Some(i) = stack.pop() {
        if !relevant[i] {
            relevant[i] = true;
            stack.extend_from_slice(bn.parents(i));
        }
    }
    let members: Vec<usize> = (0..n).filter(|&i| relevant[i]).collect();
    let mut assignment = vec![0usize; n];
    let mut fixed = vec![false; n];
    for &(i, v) in &observed {
        assignment[i] = v;
        fixed[i] = true;
    }
    let free: Vec<usize> = members.iter().copied().filter(|&i| !fixed[i]).collect();
    let cards: Vec<usize> = free.iter().map(|&i| bn.node(i).card()).collect();

    let mut counts = OpCounts::default();
    let mut total = 0.0;
    let mut terms = 0u64;
    for_each_assignment(&cards, |a| {
        for (k, &i) in free.iter().enumerate() {
            assignment[i] = a[k];
        }
        let mut product = 1.0;
        for (k, &i) in members.iter().enumerate() {
            let p = bn.local_prob(i, &assignment);
            product = if k == 0 { p } else { product * p };
        }
        counts.lookups += members.len() as u64;
        counts.multiplications += members.len() as u64 - 1;
        total += product;
        terms += 1;
    });
    counts.additions = terms.saturating_sub(1);
    Ok((total, counts))
}

/// Dense factor over a set of nodes; the last variable varies fastest.
#[derive(Clone, Debug)]
struct Factor {
    vars: Vec<usize>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl Factor {
    fn index(&self, full: &[usize]) -> usize {
        self.vars
            .iter()
            .zip(&self.cards)
            .fold(0, |acc, (&v, &c)| acc * c + full[v])
    }

    fn product(&self, other: &Factor, card_of: &[usize], scratch: &mut [usize]) -> Factor {
        let mut vars: Vec<usize> = self.vars.iter().chain(&other.vars).copied().collect();
        vars.sort_unstable();
        vars.dedup();
        let cards: Vec<usize> = vars.iter().map(|&v| card_of[v]).collect();
        let mut values = Vec::with_capacity(cards.iter().product());
        for_each_assignment(&cards, |a| {
            for (k, &v) in vars.iter().enumerate() {
                scratch[v] = a[k];
            }
            values.push(self.values[self.index(scratch)] * other.values[other.index(scratch)]);
        });
        Factor { vars, cards, values }
    }

    fn sum_out(&self, var: usize, scratch: &mut [usize]) -> Factor {
        let pos = self.vars.iter().position(|&v| v == var).expect("variable in factor");
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(pos);
        cards.remove(pos);
        let out = Factor {
            vars,
            cards,
            values: Vec::new(),
        };
        let mut values = vec![0.0; out.cards.iter().product()];
        for_each_assignment(&self.cards, |a| {
            for (k, &v) in self.vars.iter().enumerate() {
                scratch[v] = a[k];
            }
            values[out.index(scratch)] += self.values[self.index(scratch)];
        });
        Factor { values, ..out }
    }
}

fn eliminate_query(bn: &BayesianNetwork, q: usize, observed: &[(usize, usize)]) -> Vec<f64> {
    let n = bn.len();
    let card_of = bn.cards();
    let mut evidence = vec![None; n];
    for &(i, v) in observed {
        evidence[i] = Some(v);
    }
    let mut scratch = vec![0usize; n];

    // CPT factors with evidence variables sliced away.
    let mut factors: Vec<Factor> = (0..n)
        .map(|i| {
            let scope: Vec<usize> = bn.parents(i).iter().copied().chain(std::iter::once(i)).collect();
            let vars: Vec<usize> = scope.iter().copied().filter(|&v| evidence[v].is_none()).collect();
            let cards: Vec<usize> = vars.iter().map(|&v| card_of[v]).collect();
            let mut full = vec![0usize; n];
            for &(e, v) in observed {
                full[e] = v;
            }
            let mut values = Vec::with_capacity(cards.iter().product());
            for_each_assignment(&cards, |a| {
                for (k, &v) in vars.iter().enumerate() {
                    full[v] = a[k];
                }
                values.push(bn.local_prob(i, &full));
            });
            Factor { vars, cards, values }
        })
        .collect();

    let mut remaining: Vec<usize> = (0..n).filter(|&v| v != q && evidence[v].is_none()).collect();
    while !remaining.is_empty() {
        // min-degree: fewest distinct neighbours in the current interaction graph
        let (pos, &var) = remaining
            .iter()
            .enumerate()
            .min_by_key(|&(_, &v)| {
                let mut nb: Vec<usize> = factors
                    .iter()
                    .filter(|f| f.vars.contains(&v))
                    .flat_map(|f| f.vars.iter().copied())
                    .filter(|&u| u != v)
                    .collect();
                nb.sort_unstable();
                nb.dedup();
                (nb.len(), v)
            })
            .expect("nonempty");
        remaining.remove(pos);
        let (touching, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.vars.contains(&var));
        factors = rest;
        if let Some(first) = touching.first() {
            let mut acc = first.clone();
            for f in &touching[1..] {
                acc = acc.product(f, &card_of, &mut scratch);
            }
            factors.push(acc.sum_out(var, &mut scratch));
        }
    }

    let mut acc = Factor {
        vars: vec![],
        cards: vec![],
        values: vec![1.0],
    };
    for f in &factors {
        acc = acc.product(f, &card_of, &mut scratch);
    }
    if acc.vars.is_empty() {
        // query disconnected from every factor cannot happen: its own CPT mentions it
        unreachable!("query variable eliminated");
    }
    acc.values
}
