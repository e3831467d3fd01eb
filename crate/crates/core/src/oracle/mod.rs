//! Dense joint-probability tables: the brute-force ground truth that every
//! structured computation in this crate is checked against.

mod relations;

pub use relations::{
    check_transitivity, is_conditionally_independent, is_mutually_irrelevant, is_unrelated,
    strictly_positive,
};
pub(crate) use relations::{independent, irrelevant_in, unrelated_in};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{for_each_assignment, BayesianNetwork, Evidence, PosteriorVector, Variable};
use crate::{EPS_NORM, EPS_ZERO};

/// Largest table materialized unless a caller asks otherwise.
pub const DEFAULT_CELL_BUDGET: u64 = 1 << 24;

/// A restriction of one variable to a nonempty subset of its values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventFilter {
    pub variable: String,
    pub allowed: Vec<String>,
}

impl EventFilter {
    pub fn new<S: Into<String>, V: AsRef<str>>(variable: S, allowed: &[V]) -> Self {
        EventFilter {
            variable: variable.into(),
            allowed: allowed.iter().map(|v| v.as_ref().to_string()).collect(),
        }
    }
}

/// Probability of every full assignment of `variables`, last variable fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTable {
    variables: Vec<Variable>,
    cells: Vec<f64>,
}

impl JointTable {
    /// Checks shape, non-negativity and normalization.
    pub fn new(variables: Vec<Variable>, cells: Vec<f64>) -> Result<Self> {
        let expected: usize = variables.iter().map(Variable::card).product();
        if cells.len() != expected {
            return Err(Error::Malformed(format!(
                "joint table has {} cells, expected {expected}",
                cells.len()
            )));
        }
        if cells.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::Malformed("joint table has a negative or non-finite cell".into()));
        }
        let sum: f64 = cells.iter().sum();
        if (sum - 1.0).abs() > EPS_NORM {
            return Err(Error::Malformed(format!("joint table sums to {sum}")));
        }
        Ok(JointTable { variables, cells })
    }

    /// Materializes the product-rule joint of `bn`.
    pub fn from_network(bn: &BayesianNetwork, budget: u64) -> Result<Self> {
        let size = bn.state_space();
        if size > budget as u128 {
            return Err(Error::CellBudgetExceeded {
                cells: size,
                budget,
            });
        }
        let mut cells = Vec::with_capacity(size as usize);
        for_each_assignment(&bn.cards(), |a| cells.push(bn.joint_of(a)));
        Ok(JointTable {
            variables: bn.nodes().to_vec(),
            cells,
        })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cards(&self) -> Vec<usize> {
        self.variables.iter().map(Variable::card).collect()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub(crate) fn require_var(&self, name: &str) -> Result<usize> {
        self.var_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn index_of(&self, assignment: &[usize]) -> usize {
        self.variables
            .iter()
            .zip(assignment)
            .fold(0, |acc, (v, &a)| acc * v.card() + a)
    }

    pub fn cell(&self, assignment: &[usize]) -> f64 {
        self.cells[self.index_of(assignment)]
    }

    /// Cell addressed by labels; every variable must be assigned.
    pub fn cell_by_labels(&self, full: &Evidence) -> Result<f64> {
        let mut a = Vec::with_capacity(self.variables.len());
        for v in &self.variables {
            let label = full.get(&v.name).ok_or_else(|| Error::Unassigned(v.name.clone()))?;
            a.push(v.require_index(label)?);
        }
        Ok(self.cell(&a))
    }

    /// Marginal over `vars` (table indices), in the order given.
    pub fn marginal(&self, vars: &[usize]) -> JointTable {
        let variables: Vec<Variable> = vars.iter().map(|&i| self.variables[i].clone()).collect();
        let mut cells = vec![0.0; variables.iter().map(Variable::card).product()];
        let mut k = 0;
        for_each_assignment(&self.cards(), |a| {
            let idx = vars
                .iter()
                .fold(0, |acc, &i| acc * self.variables[i].card() + a[i]);
            cells[idx] += self.cells[k];
            k += 1;
        });
        JointTable { variables, cells }
    }

    pub fn marginal_by_name<S: AsRef<str>>(&self, vars: &[S]) -> Result<JointTable> {
        let idx = vars
            .iter()
            .map(|v| self.require_var(v.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.marginal(&idx))
    }

    /// Probability that a partial assignment holds.
    pub fn probability(&self, evidence: &Evidence) -> Result<f64> {
        let observed = self.evidence_indices(evidence)?;
        let mut total = 0.0;
        let mut k = 0;
        for_each_assignment(&self.cards(), |a| {
            if observed.iter().all(|&(i, v)| a[i] == v) {
                total += self.cells[k];
            }
            k += 1;
        });
        Ok(total)
    }

    fn evidence_indices(&self, evidence: &Evidence) -> Result<Vec<(usize, usize)>> {
        evidence
            .iter()
            .map(|(name, label)| {
                let i = self.require_var(name)?;
                Ok((i, self.variables[i].require_index(label)?))
            })
            .collect()
    }

    /// Renormalizes over assignments consistent with `e`, restricting the
    /// filtered variable's domain to the allowed values.
    pub fn condition(&self, e: &EventFilter) -> Result<JointTable> {
        let var = self.require_var(&e.variable)?;
        if e.allowed.is_empty() {
            return Err(Error::Malformed("empty event".into()));
        }
        for label in &e.allowed {
            self.variables[var].require_index(label)?;
        }
        let restricted = self.variables[var].restricted(&e.allowed);
        let keep: Vec<usize> = restricted
            .values
            .iter()
            .map(|l| self.variables[var].index_of(l).expect("checked above"))
            .collect();

        let mut variables = self.variables.clone();
        variables[var] = restricted;
        let mut cells = vec![0.0; variables.iter().map(Variable::card).product()];
        let mut total = 0.0;
        let mut k = 0;
        let mut out = vec![0usize; variables.len()];
        for_each_assignment(&self.cards(), |a| {
            if let Some(pos) = keep.iter().position(|&v| v == a[var]) {
                out.copy_from_slice(a);
                out[var] = pos;
                let idx = variables.iter().zip(&out).fold(0, |acc, (v, &x)| acc * v.card() + x);
                cells[idx] = self.cells[k];
                total += self.cells[k];
            }
            k += 1;
        });
        if total <= EPS_ZERO {
            return Err(Error::ZeroProbabilityEvent);
        }
        for c in &mut cells {
            *c /= total;
        }
        Ok(JointTable { variables, cells })
    }

    /// Exact `P(query | evidence)` by summation over the table.
    pub fn posterior(&self, query: &str, evidence: &Evidence) -> Result<PosteriorVector> {
        let q = self.require_var(query)?;
        let observed = self.evidence_indices(evidence)?;
        if observed.iter().any(|&(i, _)| i == q) {
            return Err(Error::Malformed(format!("query `{query}` is also observed")));
        }
        let mut weights = vec![0.0; self.variables[q].card()];
        let mut k = 0;
        for_each_assignment(&self.cards(), |a| {
            if observed.iter().all(|&(i, v)| a[i] == v) {
                weights[a[q]] += self.cells[k];
            }
            k += 1;
        });
        let total: f64 = weights.iter().sum();
        if total <= EPS_ZERO {
            return Err(Error::ZeroProbabilityEvidence);
        }
        Ok(PosteriorVector::new(
            query.to_string(),
            self.variables[q].values.clone(),
            weights.into_iter().map(|w| w / total).collect(),
        ))
    }
}
