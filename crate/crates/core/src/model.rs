//! Discrete variables, evidence and DAG-structured Bayesian networks.
//!
//! Node values are addressed by index into each node's own domain. A local
//! network may restrict the hypothesis variable to a subset of its declared
//! values; that restriction is simply a shorter domain on the node, so CPT
//! rows stay normalized.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::EPS_NORM;

/// A named discrete variable with an ordered domain of value labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub values: Vec<String>,
}

impl Variable {
    pub fn new<S: Into<String>, V: AsRef<str>>(name: S, values: &[V]) -> Self {
        Variable {
            name: name.into(),
            values: values.iter().map(|v| v.as_ref().to_string()).collect(),
        }
    }

    /// A binary variable with values `"0"` and `"1"`.
    pub fn binary<S: Into<String>>(name: S) -> Self {
        Variable::new(name, &["0", "1"])
    }

    pub fn card(&self) -> usize {
        self.values.len()
    }

    pub fn index_of(&self, value: &str) -> Option<usize> {
        self.values.iter().position(|v| v == value)
    }

    pub(crate) fn require_index(&self, value: &str) -> Result<usize> {
        self.index_of(value).ok_or_else(|| Error::UnknownValue {
            variable: self.name.clone(),
            value: value.to_string(),
        })
    }

    /// Same variable with its domain cut down to `allowed`, keeping declared order.
    pub fn restricted(&self, allowed: &[String]) -> Variable {
        Variable {
            name: self.name.clone(),
            values: self
                .values
                .iter()
                .filter(|v| allowed.contains(v))
                .cloned()
                .collect(),
        }
    }
}

/// Observed values, keyed by variable name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Evidence(BTreeMap<String, String>);

impl Evidence {
    pub fn new() -> Self {
        Evidence(BTreeMap::new())
    }

    pub fn from_pairs<K: AsRef<str>, V: AsRef<str>>(pairs: &[(K, V)]) -> Self {
        Evidence(
            pairs
                .iter()
                .map(|(k, v)| (k.as_ref().to_string(), v.as_ref().to_string()))
                .collect(),
        )
    }

    pub fn insert<K: Into<String>, V: Into<String>>(&mut self, var: K, value: V) {
        self.0.insert(var.into(), value.into());
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(String::as_str)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Keeps only the assignments whose variable satisfies `keep`.
    pub fn filtered<F: Fn(&str) -> bool>(&self, keep: F) -> Evidence {
        Evidence(
            self.0
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }
}

/// A non-fatal note attached to an inference result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// Observed variables that no network depicts; they were ignored.
    DroppedEvidence { variables: Vec<String> },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::DroppedEvidence { variables } => write!(
                f,
                "evidence on {} is not depicted by any network and was ignored",
                variables.join(", ")
            ),
        }
    }
}

/// The event "h draws its value from `allowed`".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisEvent {
    pub variable: String,
    pub allowed: Vec<String>,
}

impl HypothesisEvent {
    pub fn new<S: Into<String>, V: AsRef<str>>(variable: S, allowed: &[V]) -> Self {
        HypothesisEvent {
            variable: variable.into(),
            allowed: allowed.iter().map(|v| v.as_ref().to_string()).collect(),
        }
    }
}

/// Conditional probability table of one node.
///
/// Rows are laid out in mixed radix over the parent domains with the first
/// parent most significant; each row holds one probability per child value.
/// Missing rows (only produced when parsing incomplete files) are NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpt {
    pub parents: Vec<usize>,
    pub table: Vec<f64>,
}

impl Cpt {
    pub fn new(parents: Vec<usize>, table: Vec<f64>) -> Self {
        Cpt { parents, table }
    }

    pub fn row(&self, row: usize, card: usize) -> &[f64] {
        &self.table[row * card..(row + 1) * card]
    }
}

/// A structural or numeric problem found by [`BayesianNetwork::validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Cycle { nodes: Vec<String> },
    ParentMismatch { node: String },
    TableShape { node: String, expected: usize, found: usize },
    MissingRow { node: String, row: String },
    NotNormalized { node: String, row: String, sum: f64 },
    NegativeEntry { node: String, row: String },
    DomainMismatch { node: String, detail: String },
    HypothesisNotRoot { node: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cycle { nodes } => write!(f, "directed cycle through {}", nodes.join(", ")),
            Violation::ParentMismatch { node } => {
                write!(f, "CPT parents of `{node}` differ from its graph parents")
            }
            Violation::TableShape { node, expected, found } => write!(
                f,
                "CPT of `{node}` has {found} entries, expected {expected}"
            ),
            Violation::MissingRow { node, row } => {
                write!(f, "CPT of `{node}` is missing row [{row}]")
            }
            Violation::NotNormalized { node, row, sum } => write!(
                f,
                "CPT row [{row}] of `{node}` sums to {sum} (tolerance {EPS_NORM:e})"
            ),
            Violation::NegativeEntry { node, row } => {
                write!(f, "CPT row [{row}] of `{node}` has a negative entry")
            }
            Violation::DomainMismatch { node, detail } => {
                write!(f, "domain mismatch at `{node}`: {detail}")
            }
            Violation::HypothesisNotRoot { node } => {
                write!(f, "hypothesis node `{node}` has parents")
            }
        }
    }
}

/// A DAG over discrete nodes with one CPT per node.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesianNetwork {
    nodes: Vec<Variable>,
    edges: Vec<(usize, usize)>,
    cpts: Vec<Cpt>,
    context: Option<HypothesisEvent>,
}

impl BayesianNetwork {
    /// Builds a network whose edges are read off the CPT parent lists.
    pub fn new(nodes: Vec<Variable>, cpts: Vec<Cpt>) -> Result<Self> {
        if nodes.len() != cpts.len() {
            return Err(Error::Malformed(format!(
                "{} nodes but {} CPTs",
                nodes.len(),
                cpts.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for v in &nodes {
            if !seen.insert(v.name.as_str()) {
                return Err(Error::Malformed(format!("duplicate node `{}`", v.name)));
            }
        }
        let mut edges = Vec::new();
        for (child, cpt) in cpts.iter().enumerate() {
            let mut rows = 1usize;
            for &p in &cpt.parents {
                if p >= nodes.len() || p == child {
                    return Err(Error::Malformed(format!(
                        "bad parent index {p} for `{}`",
                        nodes[child].name
                    )));
                }
                rows *= nodes[p].card();
                edges.push((p, child));
            }
            let expected = rows * nodes[child].card();
            if cpt.table.len() != expected {
                return Err(Error::Malformed(format!(
                    "CPT of `{}` has {} entries, expected {expected}",
                    nodes[child].name,
                    cpt.table.len()
                )));
            }
        }
        edges.sort_unstable();
        Ok(BayesianNetwork {
            nodes,
            edges,
            cpts,
            context: None,
        })
    }

    /// Assembles a network without any checks; pair with [`validate`](Self::validate).
    pub fn from_parts(
        nodes: Vec<Variable>,
        edges: Vec<(usize, usize)>,
        cpts: Vec<Cpt>,
        context: Option<HypothesisEvent>,
    ) -> Self {
        BayesianNetwork {
            nodes,
            edges,
            cpts,
            context,
        }
    }

    pub fn with_context(mut self, context: HypothesisEvent) -> Self {
        self.context = Some(context);
        self
    }

    pub fn nodes(&self) -> &[Variable] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Variable {
        &self.nodes[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn cpt(&self, i: usize) -> &Cpt {
        &self.cpts[i]
    }

    pub fn context(&self) -> Option<&HypothesisEvent> {
        self.context.as_ref()
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|v| v.name == name)
    }

    pub(crate) fn require_node(&self, name: &str) -> Result<usize> {
        self.node_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.node_index(name).is_some()
    }

    /// CPT parents of node `i`.
    pub fn parents(&self, i: usize) -> &[usize] {
        &self.cpts[i].parents
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&c| self.cpts[c].parents.contains(&i))
            .collect()
    }

    pub fn cards(&self) -> Vec<usize> {
        self.nodes.iter().map(Variable::card).collect()
    }

    /// Number of cells in the joint state space.
    pub fn state_space(&self) -> u128 {
        self.nodes.iter().map(|v| v.card() as u128).product()
    }

    /// Row of node `i`'s CPT selected by a full assignment.
    pub fn row_index(&self, i: usize, assignment: &[usize]) -> usize {
        self.cpts[i]
            .parents
            .iter()
            .fold(0, |acc, &p| acc * self.nodes[p].card() + assignment[p])
    }

    /// The CPT entry for node `i` under a full assignment.
    pub fn local_prob(&self, i: usize, assignment: &[usize]) -> f64 {
        let card = self.nodes[i].card();
        self.cpts[i].table[self.row_index(i, assignment) * card + assignment[i]]
    }

    /// Product-rule joint of a full assignment given as value indices.
    pub fn joint_of(&self, assignment: &[usize]) -> f64 {
        (0..self.nodes.len())
            .map(|i| self.local_prob(i, assignment))
            .product()
    }

    /// Product-rule joint of a full assignment given by labels.
    pub fn joint_probability(&self, full: &Evidence) -> Result<f64> {
        let mut assignment = vec![0; self.nodes.len()];
        for (i, var) in self.nodes.iter().enumerate() {
            let label = full
                .get(&var.name)
                .ok_or_else(|| Error::Unassigned(var.name.clone()))?;
            assignment[i] = var.require_index(label)?;
        }
        for (name, _) in full.iter() {
            self.require_node(name)?;
        }
        Ok(self.joint_of(&assignment))
    }

    /// Maps evidence to `(node, value)` index pairs; every variable must be a node.
    pub fn evidence_indices(&self, evidence: &Evidence) -> Result<Vec<(usize, usize)>> {
        evidence
            .iter()
            .map(|(name, label)| {
                let i = self.require_node(name)?;
                Ok((i, self.nodes[i].require_index(label)?))
            })
            .collect()
    }

    /// A topological order of the CPT-parent graph, or `None` on a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        topo_sort(self.nodes.len(), self.cpts.iter().enumerate().flat_map(|(c, cpt)| {
            cpt.parents.iter().map(move |&p| (p, c))
        }))
    }

    /// Human-readable label of a CPT row of node `i`.
    pub fn row_label(&self, i: usize, row: usize) -> String {
        let parents = &self.cpts[i].parents;
        let mut labels = vec![String::new(); parents.len()];
        let mut rest = row;
        for (k, &p) in parents.iter().enumerate().rev() {
            let card = self.nodes[p].card();
            labels[k] = self.nodes[p].values[rest % card].clone();
            rest /= card;
        }
        labels.join("|")
    }

    /// Checks every structural and numeric invariant; an empty report means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        let n = self.nodes.len();

        if let Some(order) = topo_sort(n, self.edges.iter().copied()) {
            debug_assert_eq!(order.len(), n);
        } else {
            let stuck = stuck_nodes(n, &self.edges);
            report.push(Violation::Cycle {
                nodes: stuck.into_iter().map(|i| self.nodes[i].name.clone()).collect(),
            });
        }

        for (i, var) in self.nodes.iter().enumerate() {
            let cpt = &self.cpts[i];
            let mut graph: Vec<usize> = self
                .edges
                .iter()
                .filter(|&&(_, c)| c == i)
                .map(|&(p, _)| p)
                .collect();
            graph.sort_unstable();
            graph.dedup();
            let mut declared = cpt.parents.clone();
            declared.sort_unstable();
            if graph != declared {
                report.push(Violation::ParentMismatch {
                    node: var.name.clone(),
                });
            }
            let rows: usize = cpt.parents.iter().map(|&p| self.nodes[p].card()).product();
            let card = var.card();
            if cpt.table.len() != rows * card {
                report.push(Violation::TableShape {
                    node: var.name.clone(),
                    expected: rows * card,
                    found: cpt.table.len(),
                });
                continue;
            }
            for r in 0..rows {
                let row = cpt.row(r, card);
                if row.iter().any(|p| p.is_nan()) {
                    report.push(Violation::MissingRow {
                        node: var.name.clone(),
                        row: self.row_label(i, r),
                    });
                    continue;
                }
                if row.iter().any(|&p| p < 0.0) {
                    report.push(Violation::NegativeEntry {
                        node: var.name.clone(),
                        row: self.row_label(i, r),
                    });
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > EPS_NORM {
                    report.push(Violation::NotNormalized {
                        node: var.name.clone(),
                        row: self.row_label(i, r),
                        sum,
                    });
                }
            }
        }

        if let Some(ctx) = &self.context {
            match self.node_index(&ctx.variable) {
                None => report.push(Violation::DomainMismatch {
                    node: ctx.variable.clone(),
                    detail: "context variable is not a node".into(),
                }),
                Some(h) => {
                    let domain: BTreeSet<&String> = self.nodes[h].values.iter().collect();
                    let allowed: BTreeSet<&String> = ctx.allowed.iter().collect();
                    if domain != allowed {
                        report.push(Violation::DomainMismatch {
                            node: ctx.variable.clone(),
                            detail: format!(
                                "node domain {:?} differs from context {:?}",
                                self.nodes[h].values, ctx.allowed
                            ),
                        });
                    }
                    if !self.cpts[h].parents.is_empty() {
                        report.push(Violation::HypothesisNotRoot {
                            node: ctx.variable.clone(),
                        });
                    }
                }
            }
        }
        report
    }
}

/// Kahn's algorithm; ties resolved by lowest index.
pub(crate) fn topo_sort<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (p, c) in edges {
        indeg[c] += 1;
        out[p].push(c);
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&i) = ready.iter().next() {
        ready.remove(&i);
        order.push(i);
        for &c in &out[i] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.insert(c);
            }
        }
    }
    (order.len() == n).then_some(order)
}

// Nodes on a cycle: repeatedly strip sources and sinks.
fn stuck_nodes(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut alive = vec![true; n];
    loop {
        let mut changed = false;
        for i in 0..n {
            if !alive[i] {
                continue;
            }
            let has_in = edges.iter().any(|&(p, c)| c == i && alive[p]);
            let has_out = edges.iter().any(|&(p, c)| p == i && alive[c]);
            if !has_in || !has_out {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..n).filter(|&i| alive[i]).collect()
}

/// Convenience builder addressing nodes and parents by name.
///
/// ```
/// use simnet_core::NetworkBuilder;
/// let bn = NetworkBuilder::new()
///     .variable("h", &["h1", "h2"])
///     .variable("y", &["+y", "-y"])
///     .cpt("h", &[], &[&[0.5, 0.5]])
///     .cpt("y", &["h"], &[&[0.8, 0.2], &[0.3, 0.7]])
///     .build()
///     .unwrap();
/// assert_eq!(bn.len(), 2);
/// ```
#[derive(Default)]
pub struct NetworkBuilder {
    nodes: Vec<Variable>,
    cpts: BTreeMap<String, (Vec<String>, Vec<f64>)>,
    context: Option<HypothesisEvent>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn variable<V: AsRef<str>>(mut self, name: &str, values: &[V]) -> Self {
        self.nodes.push(Variable::new(name, values));
        self
    }

    pub fn node(mut self, var: Variable) -> Self {
        self.nodes.push(var);
        self
    }

    pub fn cpt(mut self, node: &str, parents: &[&str], rows: &[&[f64]]) -> Self {
        self.cpts.insert(
            node.to_string(),
            (
                parents.iter().map(|s| s.to_string()).collect(),
                rows.iter().flat_map(|r| r.iter().copied()).collect(),
            ),
        );
        self
    }

    pub fn context(mut self, ctx: HypothesisEvent) -> Self {
        self.context = Some(ctx);
        self
    }

    pub fn build(self) -> Result<BayesianNetwork> {
        let index = |name: &str| {
            self.nodes
                .iter()
                .position(|v| v.name == name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))
        };
        let mut cpts = Vec::with_capacity(self.nodes.len());
        for var in &self.nodes {
            let (parents, table) = self
                .cpts
                .get(&var.name)
                .ok_or_else(|| Error::Malformed(format!("no CPT for `{}`", var.name)))?;
            let parents = parents.iter().map(|p| index(p)).collect::<Result<Vec<_>>>()?;
            cpts.push(Cpt::new(parents, table.clone()));
        }
        let bn = BayesianNetwork::new(self.nodes, cpts)?;
        Ok(match self.context {
            Some(ctx) => bn.with_context(ctx),
            None => bn,
        })
    }
}

/// A distribution over one variable's values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorVector {
    pub variable: String,
    pub values: Vec<String>,
    pub probabilities: Vec<f64>,
}

impl PosteriorVector {
    pub fn new(variable: String, values: Vec<String>, probabilities: Vec<f64>) -> Self {
        PosteriorVector {
            variable,
            values,
            probabilities,
        }
    }

    /// Normalizes non-negative weights; `None` if their sum is not positive.
    pub fn from_weights(variable: String, values: Vec<String>, weights: Vec<f64>) -> Option<Self> {
        let total: f64 = weights.iter().sum();
        if total <= 0.0 || !total.is_finite() {
            return None;
        }
        Some(PosteriorVector {
            variable,
            values,
            probabilities: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn get(&self, value: &str) -> Option<f64> {
        self.values
            .iter()
            .position(|v| v == value)
            .map(|i| self.probabilities[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values
            .iter()
            .map(String::as_str)
            .zip(self.probabilities.iter().copied())
    }

    /// Largest absolute difference, matching entries by label. Infinite if the
    /// label sets differ.
    pub fn max_abs_diff(&self, other: &PosteriorVector) -> f64 {
        if self.values.len() != other.values.len() {
            return f64::INFINITY;
        }
        self.iter()
            .map(|(v, p)| other.get(v).map_or(f64::INFINITY, |q| (p - q).abs()))
            .fold(0.0, f64::max)
    }

    pub fn is_normalized(&self) -> bool {
        self.probabilities.iter().all(|&p| p >= 0.0)
            && (self.probabilities.iter().sum::<f64>() - 1.0).abs() <= EPS_NORM
    }
}

impl fmt::Display for PosteriorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.values.iter().map(String::len).max().unwrap_or(0);
        for (v, p) in self.iter() {
            writeln!(f, "P({} = {:<width$}) = {:.12}", self.variable, v, p)?;
        }
        Ok(())
    }
}

/// Calls `f` on every assignment of a mixed-radix space, last position fastest.
pub(crate) fn for_each_assignment<F: FnMut(&[usize])>(cards: &[usize], mut f: F) {
    if cards.contains(&0) {
        return;
    }
    let mut a = vec![0usize; cards.len()];
    loop {
        f(&a);
        let mut k = cards.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            a[k] += 1;
            if a[k] < cards[k] {
                break;
            }
            a[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node() -> BayesianNetwork {
        NetworkBuilder::new()
            .variable("h", &["h1", "h2"])
            .variable("y", &["+y", "-y"])
            .cpt("h", &[], &[&[0.5, 0.5]])
            .cpt("y", &["h"], &[&[0.8, 0.2], &[0.1, 0.9]])
            .build()
            .unwrap()
    }

    #[test]
    fn well_formed_network_validates() {
        assert!(two_node().validate().is_empty());
    }

    #[test]
    fn two_cycle_is_reported_once() {
        let nodes = vec![Variable::binary("a"), Variable::binary("b")];
        let cpts = vec![
            Cpt::new(vec![1], vec![0.5; 4]),
            Cpt::new(vec![0], vec![0.5; 4]),
        ];
        let bn = BayesianNetwork::from_parts(nodes, vec![(0, 1), (1, 0)], cpts, None);
        let report = bn.validate();
        let cycles: Vec<_> = report
            .iter()
            .filter(|v| matches!(v, Violation::Cycle { .. }))
            .collect();
        assert_eq!(cycles.len(), 1);
        assert_eq!(report.len(), 1);
    }

    #[test]
    fn unnormalized_row_is_reported() {
        let nodes = vec![Variable::binary("x")];
        let bn = BayesianNetwork::from_parts(nodes, vec![], vec![Cpt::new(vec![], vec![0.5, 0.6])], None);
        let report = bn.validate();
        assert_eq!(report.len(), 1);
        assert!(matches!(report[0], Violation::NotNormalized { .. }));
        assert!(report[0].to_string().contains("1e-9"));
    }

    #[test]
    fn missing_row_and_parent_mismatch() {
        let nodes = vec![Variable::binary("a"), Variable::binary("b")];
        let cpts = vec![
            Cpt::new(vec![], vec![0.5, 0.5]),
            Cpt::new(vec![0], vec![0.5, 0.5, f64::NAN, f64::NAN]),
        ];
        let bn = BayesianNetwork::from_parts(nodes, vec![], cpts, None);
        let report = bn.validate();
        assert!(report.contains(&Violation::ParentMismatch { node: "b".into() }));
        assert!(report.contains(&Violation::MissingRow {
            node: "b".into(),
            row: "1".into()
        }));
    }

    #[test]
    fn context_domain_is_checked() {
        let bn = two_node().with_context(HypothesisEvent::new("h", &["h1", "h3"]));
        let report = bn.validate();
        assert!(matches!(report[0], Violation::DomainMismatch { .. }));
    }

    #[test]
    fn joint_probability_is_product_of_entries() {
        let bn = two_node();
        let p = bn
            .joint_probability(&Evidence::from_pairs(&[("h", "h1"), ("y", "+y")]))
            .unwrap();
        assert_eq!(p, 0.5 * 0.8);
        let single = NetworkBuilder::new()
            .variable("x", &["a", "b"])
            .cpt("x", &[], &[&[0.25, 0.75]])
            .build()
            .unwrap();
        let p = single
            .joint_probability(&Evidence::from_pairs(&[("x", "b")]))
            .unwrap();
        assert_eq!(p, 0.75);
    }

    #[test]
    fn joint_probability_rejects_partial_or_foreign_assignments() {
        let bn = two_node();
        assert!(matches!(
            bn.joint_probability(&Evidence::from_pairs(&[("h", "h1")])),
            Err(Error::Unassigned(_))
        ));
        assert!(matches!(
            bn.joint_probability(&Evidence::from_pairs(&[("h", "h9"), ("y", "+y")])),
            Err(Error::UnknownValue { .. })
        ));
    }

    #[test]
    fn zero_entry_zeroes_the_joint() {
        let bn = NetworkBuilder::new()
            .variable("h", &["h1", "h2"])
            .variable("y", &["+y", "-y"])
            .cpt("h", &[], &[&[0.5, 0.5]])
            .cpt("y", &["h"], &[&[0.8, 0.2], &[0.0, 1.0]])
            .build()
            .unwrap();
        let p = bn
            .joint_probability(&Evidence::from_pairs(&[("h", "h2"), ("y", "+y")]))
            .unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn odometer_visits_every_cell_once() {
        let mut seen = Vec::new();
        for_each_assignment(&[2, 3], |a| seen.push(a.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], vec![0, 1]);
        assert_eq!(seen[5], vec![1, 2]);
    }
}
