//! Similarity networks: a connected cover of the hypothesis values plus one
//! local Bayesian network per cover cell.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::model::{for_each_assignment, BayesianNetwork, Cpt, Evidence, HypothesisEvent, Variable};
use crate::oracle::{self, EventFilter, JointTable};
use crate::EPS_ZERO;

/// Inclusion rule a similarity network was built with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Variables related to `h` given the cell.
    Type1,
    /// Variables mutually relevant to `h` given the cell.
    Type2,
    #[default]
    Unspecified,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Type1 => "type1",
            Kind::Type2 => "type2",
            Kind::Unspecified => "unspecified",
        })
    }
}

/// Variable declarations with one distinguished hypothesis variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteModel {
    pub variables: Vec<Variable>,
    pub hypothesis: String,
}

impl DiscreteModel {
    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn hypothesis_variable(&self) -> &Variable {
        self.variable(&self.hypothesis)
            .expect("hypothesis variable is declared")
    }

    pub fn hypotheses(&self) -> &[String] {
        &self.hypothesis_variable().values
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalNetwork {
    pub cell: Vec<String>,
    pub network: BayesianNetwork,
}

impl LocalNetwork {
    /// Nondistinguished nodes of this local network.
    pub fn depicted<'a>(&'a self, hypothesis: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.network
            .nodes()
            .iter()
            .map(|v| v.name.as_str())
            .filter(move |&n| n != hypothesis)
    }
}

/// One problem found while validating a similarity network.
#[derive(Clone, Debug, PartialEq)]
pub struct Issue {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityNetwork {
    pub model: DiscreteModel,
    pub cover: Cover,
    pub locals: Vec<LocalNetwork>,
    pub kind: Kind,
}

impl SimilarityNetwork {
    pub fn hypothesis(&self) -> &str {
        &self.model.hypothesis
    }

    /// Union of nondistinguished nodes over all local networks, in model
    /// declaration order.
    pub fn depicted_variables(&self) -> Vec<String> {
        self.model
            .variables
            .iter()
            .map(|v| v.name.clone())
            .filter(|name| {
                name != self.hypothesis() && self.locals.iter().any(|l| l.network.contains(name))
            })
            .collect()
    }

    /// Evidence variables that appear in no local network.
    pub fn undepicted_evidence(&self, evidence: &Evidence) -> Vec<String> {
        let depicted = self.depicted_variables();
        evidence
            .iter()
            .map(|(k, _)| k)
            .filter(|k| !depicted.iter().any(|d| d == k))
            .map(str::to_string)
            .collect()
    }

    /// Every observed variable is declared with a valid value, and the
    /// hypothesis itself is not observed.
    pub fn check_evidence(&self, evidence: &Evidence) -> Result<()> {
        for (name, value) in evidence.iter() {
            if name == self.hypothesis() {
                return Err(Error::Malformed(format!(
                    "the hypothesis `{name}` cannot be observed"
                )));
            }
            let var = self
                .model
                .variable(name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
            var.require_index(value)?;
        }
        Ok(())
    }

    /// Checks the cover and every local network; empty means valid.
    pub fn validate(&self) -> Vec<Issue> {
        let mut issues = Vec::new();
        let Some(hvar) = self.model.variable(&self.model.hypothesis) else {
            return vec![Issue {
                location: "model".into(),
                message: format!("hypothesis `{}` is not declared", self.model.hypothesis),
            }];
        };
        for v in self.cover.validate(&hvar.values) {
            issues.push(Issue {
                location: "cover".into(),
                message: v.to_string(),
            });
        }
        if self.locals.len() != self.cover.len() {
            issues.push(Issue {
                location: "local_networks".into(),
                message: format!(
                    "{} local networks for {} cover cells",
                    self.locals.len(),
                    self.cover.len()
                ),
            });
        }
        for (j, local) in self.locals.iter().enumerate() {
            let location = format!("local network {j} {{{}}}", local.cell.join(","));
            let mut push = |message: String| {
                issues.push(Issue {
                    location: location.clone(),
                    message,
                })
            };
            if let Some(cell) = self.cover.cells.get(j) {
                if !same_set(cell, &local.cell) {
                    push(format!("hypotheses {:?} differ from cover cell {:?}", local.cell, cell));
                }
            }
            let bn = &local.network;
            match bn.node_index(&hvar.name) {
                None => push("hypothesis node missing".into()),
                Some(h) => {
                    if !same_set(&bn.node(h).values, &local.cell) {
                        push(format!(
                            "hypothesis domain {:?} differs from cell {:?}",
                            bn.node(h).values,
                            local.cell
                        ));
                    }
                }
            }
            match bn.context() {
                Some(ctx) if ctx.variable == hvar.name && same_set(&ctx.allowed, &local.cell) => {}
                _ => push("context does not match the cell".into()),
            }
            for node in bn.nodes() {
                if node.name == hvar.name {
                    continue;
                }
                match self.model.variable(&node.name) {
                    None => push(format!("node `{}` is not declared in the model", node.name)),
                    Some(decl) if decl.values != node.values => {
                        push(format!("node `{}` has a domain different from its declaration", node.name))
                    }
                    Some(_) => {}
                }
            }
            for v in bn.validate() {
                push(v.to_string());
            }
        }
        issues
    }
}

fn same_set(a: &[String], b: &[String]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

/// Builds the type-1 or type-2 similarity network of `t` for `cover`.
///
/// For each cell the node set is `h` plus every variable related (type 1) or
/// mutually relevant (type 2) to `h` given the cell; the local network is the
/// minimal Bayesian network of the conditioned marginal along `order`.
pub fn build_similarity_network<S: AsRef<str>>(
    t: &JointTable,
    hypothesis: &str,
    cover: &Cover,
    kind: Kind,
    order: &[S],
) -> Result<SimilarityNetwork> {
    let h = t.require_var(hypothesis)?;
    let hvar = t.variables()[h].clone();
    let violations = cover.validate(&hvar.values);
    if !violations.is_empty() {
        return Err(Error::InvalidCover(violations));
    }
    if kind == Kind::Unspecified {
        return Err(Error::Unsupported("construction needs type 1 or type 2".into()));
    }
    let n = t.variables().len();
    let positions: Vec<usize> = order
        .iter()
        .map(|name| t.require_var(name.as_ref()))
        .collect::<Result<_>>()?;
    let mut sorted = positions.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if positions.len() != n || sorted.len() != n {
        return Err(Error::InvalidOrder("order must list every variable once".into()));
    }
    if positions[0] != h {
        return Err(Error::InvalidOrder("the hypothesis must come first".into()));
    }

    let mut locals = Vec::with_capacity(cover.len());
    for cell in &cover.cells {
        let tc = t.condition(&EventFilter::new(hypothesis, cell))?;
        let included: Vec<usize> = positions
            .iter()
            .copied()
            .filter(|&u| u != h)
            .filter(|&u| match kind {
                Kind::Type1 => !oracle::unrelated_in(&tc, u, h),
                _ => !oracle::irrelevant_in(&tc, u, h),
            })
            .collect();
        let scope: Vec<usize> = positions
            .iter()
            .copied()
            .filter(|&u| u == h || included.contains(&u))
            .collect();
        let marginal = tc.marginal(&scope);
        let network = minimal_network(&marginal)
            .with_context(HypothesisEvent::new(hypothesis, cell));
        locals.push(LocalNetwork {
            cell: cell.clone(),
            network,
        });
    }
    Ok(SimilarityNetwork {
        model: DiscreteModel {
            variables: t.variables().to_vec(),
            hypothesis: hypothesis.to_string(),
        },
        cover: cover.clone(),
        locals,
        kind,
    })
}

/// Minimal Bayesian network of `t` along its variable order.
///
/// Each node's parents are the smallest subset of its predecessors that
/// renders it independent of the remaining predecessors; equal-size
/// candidates are tried in lexicographic order of position. Rows for
/// zero-probability parent configurations condition on the largest
/// positive-probability sub-configuration instead.
pub fn minimal_network(t: &JointTable) -> BayesianNetwork {
    let n = t.variables().len();
    let mut cpts = Vec::with_capacity(n);
    for x in 0..n {
        let preds: Vec<usize> = (0..x).collect();
        let parents = (0..=preds.len())
            .flat_map(|size| combinations(&preds, size))
            .find(|s| {
                let rest: Vec<usize> = preds.iter().copied().filter(|p| !s.contains(p)).collect();
                oracle::independent(t, &[x], &rest, s)
            })
            .expect("the full predecessor set always qualifies");
        cpts.push(conditional_table(t, x, &parents));
    }
    BayesianNetwork::new(t.variables().to_vec(), cpts).expect("shapes are consistent by construction")
}

fn conditional_table(t: &JointTable, x: usize, parents: &[usize]) -> Cpt {
    let vars = t.variables();
    let card = vars[x].card();
    let pcards: Vec<usize> = parents.iter().map(|&p| vars[p].card()).collect();
    let mut scope = parents.to_vec();
    scope.push(x);
    let joint = t.marginal(&scope);
    let mut table = Vec::with_capacity(joint.len());
    for_each_assignment(&pcards, |config| {
        let row = row_of(&joint, config, card);
        let mass: f64 = row.iter().sum();
        if mass > EPS_ZERO {
            table.extend(row.iter().map(|p| p / mass));
            return;
        }
        let fallback = (0..parents.len())
            .rev()
            .flat_map(|size| combinations(&(0..parents.len()).collect::<Vec<_>>(), size))
            .find_map(|keep| {
                let sub: Vec<usize> = keep.iter().map(|&k| parents[k]).chain([x]).collect();
                let m = t.marginal(&sub);
                let cfg: Vec<usize> = keep.iter().map(|&k| config[k]).collect();
                let r = row_of(&m, &cfg, card);
                let s: f64 = r.iter().sum();
                (s > EPS_ZERO).then(|| r.iter().map(|p| p / s).collect::<Vec<_>>())
            });
        match fallback {
            Some(r) => table.extend(r),
            None => table.extend(std::iter::repeat_n(1.0 / card as f64, card)),
        }
    });
    Cpt::new(parents.to_vec(), table)
}

// Cells of `m` (parents..., child) for one parent configuration.
fn row_of(m: &JointTable, config: &[usize], card: usize) -> Vec<f64> {
    let vars = m.variables();
    let base = config
        .iter()
        .zip(vars)
        .fold(0, |acc, (&c, v)| acc * v.card() + c);
    m.cells()[base * card..(base + 1) * card].to_vec()
}

/// All `k`-subsets of `items`, lexicographic by position.
pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(items: &[usize], k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - current.len() {
                break;
            }
            current.push(items[i]);
            rec(items, k, i + 1, current, out);
            current.pop();
        }
    }
    rec(items, k, 0, &mut current, &mut out);
    out
}
