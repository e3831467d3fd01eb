//! Hypothesis-specific Bayesian multinets: one network of the depicted
//! variables per hypothesis value, plus a prior over the hypotheses.
//!
//! Conversion copies each node's parameters from the nearest local network
//! that depicts it; inference weights per-hypothesis evidence likelihoods by
//! the prior. Neither step needs the distribution to be strictly positive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infer::{evidence_likelihood_counted, OpCounts};
use crate::model::{for_each_assignment, BayesianNetwork, Cpt, Evidence, PosteriorVector, Variable, Warning};
use crate::oracle::JointTable;
use crate::reverse::reorient;
use crate::simnet::{Kind, SimilarityNetwork};
use crate::strict::recover_prior;
use crate::EPS_ZERO;

/// A Bayesian network of the depicted variables given `h = hypothesis`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComprehensiveNetwork {
    pub hypothesis: String,
    pub network: BayesianNetwork,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Multinet {
    /// The hypothesis variable with its full domain.
    pub hypothesis: Variable,
    pub prior: PosteriorVector,
    /// One network per hypothesis value, in domain order.
    pub networks: Vec<ComprehensiveNetwork>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConvertOptions {
    /// Treat a network of unspecified kind as type 1.
    pub assume_type1: bool,
    /// Allow type-2 input. The result is not known to be correct; use it
    /// only to compare against an oracle.
    pub experimental_type2: bool,
}

/// Result of [`infer_multinet`].
#[derive(Clone, Debug, PartialEq)]
pub struct MultinetAnswer {
    pub posterior: PosteriorVector,
    /// `P(evidence | h_i)` per hypothesis, in domain order.
    pub likelihoods: Vec<f64>,
    pub work: Vec<OpCounts>,
    pub warnings: Vec<Warning>,
}

/// Work `infer_multinet` spends on one hypothesis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisWork {
    pub hypothesis: String,
    #[serde(flatten)]
    pub counts: OpCounts,
}

impl Multinet {
    pub fn network(&self, h: &str) -> Option<&BayesianNetwork> {
        self.networks
            .iter()
            .find(|c| c.hypothesis == h)
            .map(|c| &c.network)
    }

    /// The depicted variables, shared by every network.
    pub fn variables(&self) -> &[Variable] {
        self.networks
            .first()
            .map(|c| c.network.nodes())
            .unwrap_or(&[])
    }

    /// Dense `P(h, v)` with `h` first, for inference by summation.
    pub fn joint_table(&self, budget: u64) -> Result<JointTable> {
        let cards: Vec<usize> = self.variables().iter().map(Variable::card).collect();
        let per: u128 = cards.iter().map(|&c| c as u128).product();
        let size = per * self.hypothesis.card() as u128;
        if size > budget as u128 {
            return Err(Error::CellBudgetExceeded {
                cells: size,
                budget,
            });
        }
        let mut cells = Vec::with_capacity(size as usize);
        for (c, p) in self.networks.iter().zip(&self.prior.probabilities) {
            for_each_assignment(&cards, |a| cells.push(p * c.network.joint_of(a)));
        }
        let mut variables = vec![self.hypothesis.clone()];
        variables.extend(self.variables().iter().cloned());
        JointTable::new(variables, cells)
    }
}

/// Converts a type-1 similarity network to a multinet.
///
/// `order` lists the depicted variables, optionally preceded by the
/// hypothesis. Every local network is first reoriented to follow `order`.
/// Then for each hypothesis `h_i` and depicted `v`, the nearest cell `A_m`
/// depicting `v` is found from the cells containing `h_i`; `v` gets its
/// parents in `D_m` minus `h`, and the rows of `D_m` at the hypothesis
/// shared by the last two cells of the path (or at `h_i` itself when a cell
/// containing it depicts `v`).
pub fn convert<S: AsRef<str>>(
    sn: &SimilarityNetwork,
    order: &[S],
    options: &ConvertOptions,
) -> Result<Multinet> {
    match sn.kind {
        Kind::Type1 => {}
        Kind::Unspecified if options.assume_type1 => {}
        Kind::Type2 if options.experimental_type2 => {}
        Kind::Type2 => {
            return Err(Error::Unsupported(
                "conversion of type-2 similarity networks is an unproven conjecture".into(),
            ))
        }
        Kind::Unspecified => {
            return Err(Error::Unsupported(
                "network kind is unspecified; convert only type-1 networks".into(),
            ))
        }
    }
    let issues = sn.validate();
    if !issues.is_empty() {
        return Err(Error::Malformed(
            issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
        ));
    }
    let h = sn.hypothesis();
    let depicted = sn.depicted_variables();
    let order: Vec<&str> = {
        let mut o: Vec<&str> = order.iter().map(AsRef::as_ref).collect();
        if o.first() == Some(&h) {
            o.remove(0);
        }
        o
    };
    if let Some(bad) = order.iter().find(|v| !depicted.iter().any(|d| d == *v)) {
        return Err(Error::InvalidOrder(format!("`{bad}` is not a depicted variable")));
    }
    if order.len() != depicted.len() {
        return Err(Error::InvalidOrder(
            "order must list the hypothesis first, then every depicted variable once".into(),
        ));
    }

    let locals = sn
        .locals
        .iter()
        .map(|l| {
            let local_order: Vec<&str> = std::iter::once(h)
                .chain(order.iter().copied().filter(|v| l.network.contains(v)))
                .collect();
            let bn = reorient(&l.network, &local_order)?;
            check_follows(&bn, &local_order)?;
            Ok(bn)
        })
        .collect::<Result<Vec<_>>>()?;

    let domain = sn.model.hypotheses();
    let nodes: Vec<Variable> = order
        .iter()
        .map(|v| sn.model.variable(v).expect("depicted variables are declared").clone())
        .collect();
    let mut networks = Vec::with_capacity(domain.len());
    for hi in domain {
        let starts: Vec<usize> = sn.cover.cells_containing(hi).collect();
        let mut cpts = Vec::with_capacity(order.len());
        for v in &order {
            let path = sn.cover.path_from_any(&starts, |j| locals[j].contains(v))?;
            let witnesses = sn.cover.connecting_hypotheses(&path, domain)?;
            let hm = witnesses.last().unwrap_or(hi);
            let dm = &locals[*path.last().expect("paths are nonempty")];
            cpts.push(copy_rows(dm, h, v, hm, &order)?);
        }
        let network = BayesianNetwork::new(nodes.clone(), cpts)?;
        networks.push(ComprehensiveNetwork {
            hypothesis: hi.clone(),
            network,
        });
    }
    let prior = recover_prior(sn)?;
    Ok(Multinet {
        hypothesis: sn.model.hypothesis_variable().clone(),
        prior,
        networks,
    })
}

fn check_follows(bn: &BayesianNetwork, order: &[&str]) -> Result<()> {
    let rank = |i: usize| order.iter().position(|v| *v == bn.node(i).name);
    for child in 0..bn.len() {
        for &p in bn.parents(child) {
            if rank(p) >= rank(child) {
                return Err(Error::InvalidOrder(format!(
                    "after reorientation `{}` still precedes its parent `{}`",
                    bn.node(child).name,
                    bn.node(p).name
                )));
            }
        }
    }
    Ok(())
}

// Parents of `v` in `dm` without `h`, and the rows of its CPT at `h = hm`,
// re-indexed to the multinet node order.
fn copy_rows(dm: &BayesianNetwork, h: &str, v: &str, hm: &str, order: &[&str]) -> Result<Cpt> {
    let vi = dm.require_node(v)?;
    let hi = dm.node_index(h);
    let parents = dm.parents(vi);
    let card = dm.node(vi).card();
    let kept: Vec<usize> = parents.iter().copied().filter(|&p| Some(p) != hi).collect();
    let kept_cards: Vec<usize> = kept.iter().map(|&p| dm.node(p).card()).collect();
    let hm_index = match hi {
        Some(k) => Some(dm.node(k).require_index(hm)?),
        None => None,
    };
    let mut full = vec![0usize; dm.len()];
    if let (Some(k), Some(x)) = (hi, hm_index) {
        full[k] = x;
    }
    let table = &dm.cpt(vi).table;
    let mut rows = Vec::with_capacity(kept_cards.iter().product::<usize>() * card);
    for_each_assignment(&kept_cards, |a| {
        for (&p, &x) in kept.iter().zip(a) {
            full[p] = x;
        }
        let r = dm.row_index(vi, &full);
        rows.extend_from_slice(&table[r * card..(r + 1) * card]);
    });
    let remapped = kept
        .iter()
        .map(|&p| {
            let name = &dm.node(p).name;
            order
                .iter()
                .position(|o| o == name)
                .ok_or_else(|| Error::UnknownVariable(name.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Cpt::new(remapped, rows))
}

/// `P(h | evidence)` by Bayes rule over per-hypothesis likelihoods.
pub fn infer_multinet(mn: &Multinet, evidence: &Evidence) -> Result<MultinetAnswer> {
    let (filtered, warnings) = filter_evidence(mn, evidence)?;
    let mut likelihoods = Vec::with_capacity(mn.networks.len());
    let mut work = Vec::with_capacity(mn.networks.len());
    for c in &mn.networks {
        let (beta, counts) = evidence_likelihood_counted(&c.network, &filtered)?;
        likelihoods.push(beta);
        work.push(counts);
    }
    let weights: Vec<f64> = mn
        .prior
        .probabilities
        .iter()
        .zip(&likelihoods)
        .map(|(p, b)| p * b)
        .collect();
    if weights.iter().sum::<f64>() <= EPS_ZERO {
        return Err(Error::ImpossibleEvidence);
    }
    let posterior = PosteriorVector::from_weights(
        mn.hypothesis.name.clone(),
        mn.hypothesis.values.clone(),
        weights,
    )
    .ok_or(Error::ImpossibleEvidence)?;
    Ok(MultinetAnswer {
        posterior,
        likelihoods,
        work,
        warnings,
    })
}

/// Lookups, multiplications and additions `infer_multinet` performs for each
/// hypothesis.
pub fn count_operations(mn: &Multinet, evidence: &Evidence) -> Result<Vec<HypothesisWork>> {
    let (filtered, _) = filter_evidence(mn, evidence)?;
    mn.networks
        .iter()
        .map(|c| {
            let (_, counts) = evidence_likelihood_counted(&c.network, &filtered)?;
            Ok(HypothesisWork {
                hypothesis: c.hypothesis.clone(),
                counts,
            })
        })
        .collect()
}

fn filter_evidence(mn: &Multinet, evidence: &Evidence) -> Result<(Evidence, Vec<Warning>)> {
    if evidence.contains(&mn.hypothesis.name) {
        return Err(Error::Malformed(format!(
            "the hypothesis `{}` cannot be observed",
            mn.hypothesis.name
        )));
    }
    let vars = mn.variables();
    let known = |name: &str| vars.iter().any(|v| v.name == name);
    let dropped: Vec<String> = evidence
        .iter()
        .map(|(k, _)| k)
        .filter(|k| !known(k))
        .map(str::to_string)
        .collect();
    let warnings = if dropped.is_empty() {
        Vec::new()
    } else {
        vec![Warning::DroppedEvidence { variables: dropped }]
    };
    Ok((evidence.filtered(known), warnings))
}
