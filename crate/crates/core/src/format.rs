//! JSON file formats for similarity networks, joint tables, multinets and
//! evidence.
//!
//! CPT rows are keyed by the `|`-joined parent values (the empty string for
//! a root). Probabilities are written as JSON numbers in shortest
//! round-trip form; decimal strings are accepted on input as well.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::model::{for_each_assignment, BayesianNetwork, Cpt, Evidence, HypothesisEvent, PosteriorVector, Variable};
use crate::multinet::{ComprehensiveNetwork, Multinet};
use crate::oracle::JointTable;
use crate::simnet::{DiscreteModel, Kind, LocalNetwork, SimilarityNetwork};

/// A probability as read from a file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Prob {
    Number(f64),
    Text(String),
}

impl Prob {
    fn value(&self) -> Result<f64> {
        match self {
            Prob::Number(x) => Ok(*x),
            Prob::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::Malformed(format!("`{s}` is not a probability"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CptFile {
    pub parents: Vec<String>,
    pub rows: BTreeMap<String, Vec<Prob>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub nodes: Vec<String>,
    pub edges: Vec<[String; 2]>,
    pub cpts: BTreeMap<String, CptFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalNetworkFile {
    pub hypotheses: Vec<String>,
    #[serde(flatten)]
    pub network: NetworkFile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub variables: Vec<Variable>,
    pub hypothesis: String,
    pub cover: Vec<Vec<String>>,
    #[serde(default)]
    pub kind: Kind,
    pub local_networks: Vec<LocalNetworkFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointCell {
    pub assignment: BTreeMap<String, String>,
    pub probability: Prob,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointFile {
    pub variables: Vec<Variable>,
    pub cells: Vec<JointCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultinetFile {
    pub hypothesis: String,
    /// Declarations of the hypothesis and every depicted variable.
    pub variables: Vec<Variable>,
    pub prior: BTreeMap<String, Prob>,
    pub networks: BTreeMap<String, NetworkFile>,
}

fn network_to_file(bn: &BayesianNetwork) -> NetworkFile {
    let name = |i: usize| bn.node(i).name.clone();
    let mut cpts = BTreeMap::new();
    for i in 0..bn.len() {
        let card = bn.node(i).card();
        let cpt = bn.cpt(i);
        let rows = (0..cpt.table.len() / card)
            .map(|r| {
                (
                    bn.row_label(i, r),
                    cpt.row(r, card).iter().map(|&p| Prob::Number(p)).collect(),
                )
            })
            .collect();
        cpts.insert(
            name(i),
            CptFile {
                parents: cpt.parents.iter().map(|&p| name(p)).collect(),
                rows,
            },
        );
    }
    NetworkFile {
        nodes: (0..bn.len()).map(name).collect(),
        edges: bn.edges().iter().map(|&(p, c)| [name(p), name(c)]).collect(),
        cpts,
    }
}

// Rebuilds a network without numeric validation; missing rows become NaN so
// that `validate` reports them.
fn network_from_file(
    file: &NetworkFile,
    declare: impl Fn(&str) -> Result<Variable>,
    context: Option<HypothesisEvent>,
) -> Result<BayesianNetwork> {
    let nodes = file
        .nodes
        .iter()
        .map(|n| declare(n))
        .collect::<Result<Vec<_>>>()?;
    let index = |name: &str| {
        file.nodes
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Malformed(format!("`{name}` is not a node of this network")))
    };
    if let Some(extra) = file.cpts.keys().find(|k| index(k).is_err()) {
        return Err(Error::Malformed(format!("CPT given for unknown node `{extra}`")));
    }
    let mut cpts = Vec::with_capacity(nodes.len());
    let mut from_cpts = Vec::new();
    for (i, var) in nodes.iter().enumerate() {
        let cpt = file
            .cpts
            .get(&var.name)
            .ok_or_else(|| Error::Malformed(format!("no CPT for `{}`", var.name)))?;
        let parents = cpt
            .parents
            .iter()
            .map(|p| index(p))
            .collect::<Result<Vec<_>>>()?;
        from_cpts.extend(parents.iter().map(|&p| (p, i)));
        let pcards: Vec<usize> = parents.iter().map(|&p| nodes[p].card()).collect();
        let mut table = Vec::new();
        let mut used = 0;
        let mut problem = None;
        for_each_assignment(&pcards, |a| {
            let key = parents
                .iter()
                .zip(a)
                .map(|(&p, &x)| nodes[p].values[x].as_str())
                .collect::<Vec<_>>()
                .join("|");
            match cpt.rows.get(&key) {
                Some(row) if row.len() == var.card() => {
                    used += 1;
                    for p in row {
                        match p.value() {
                            Ok(x) => table.push(x),
                            Err(e) => {
                                problem.get_or_insert(e);
                                table.push(f64::NAN);
                            }
                        }
                    }
                }
                Some(row) => {
                    problem.get_or_insert(Error::Malformed(format!(
                        "row `{key}` of `{}` has {} entries, expected {}",
                        var.name,
                        row.len(),
                        var.card()
                    )));
                }
                None => table.extend(std::iter::repeat_n(f64::NAN, var.card())),
            }
        });
        if let Some(e) = problem {
            return Err(e);
        }
        if used != cpt.rows.len() {
            return Err(Error::Malformed(format!(
                "CPT of `{}` has rows for parent values outside their domains",
                var.name
            )));
        }
        cpts.push(Cpt::new(parents, table));
    }
    let mut edges = file
        .edges
        .iter()
        .map(|[p, c]| Ok((index(p)?, index(c)?)))
        .collect::<Result<Vec<_>>>()?;
    edges.sort_unstable();
    from_cpts.sort_unstable();
    if edges != from_cpts {
        return Err(Error::Malformed(
            "edge list does not match the CPT parent lists".into(),
        ));
    }
    Ok(BayesianNetwork::from_parts(nodes, edges, cpts, context))
}

impl ModelFile {
    pub fn from_network(sn: &SimilarityNetwork) -> Self {
        ModelFile {
            variables: sn.model.variables.clone(),
            hypothesis: sn.model.hypothesis.clone(),
            cover: sn.cover.cells.clone(),
            kind: sn.kind,
            local_networks: sn
                .locals
                .iter()
                .map(|l| LocalNetworkFile {
                    hypotheses: l.cell.clone(),
                    network: network_to_file(&l.network),
                })
                .collect(),
        }
    }

    /// Resolves names and rebuilds the networks. Structural problems that
    /// `SimilarityNetwork::validate` can describe are left for it to report.
    pub fn to_network(&self) -> Result<SimilarityNetwork> {
        let model = DiscreteModel {
            variables: self.variables.clone(),
            hypothesis: self.hypothesis.clone(),
        };
        let hvar = model
            .variable(&self.hypothesis)
            .ok_or_else(|| Error::UnknownVariable(self.hypothesis.clone()))?
            .clone();
        let mut locals = Vec::with_capacity(self.local_networks.len());
        for l in &self.local_networks {
            for v in &l.hypotheses {
                hvar.require_index(v)?;
            }
            let declare = |name: &str| -> Result<Variable> {
                let decl = model
                    .variable(name)
                    .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
                Ok(if name == hvar.name {
                    decl.restricted(&l.hypotheses)
                } else {
                    decl.clone()
                })
            };
            let context = HypothesisEvent::new(hvar.name.clone(), &l.hypotheses);
            locals.push(LocalNetwork {
                cell: l.hypotheses.clone(),
                network: network_from_file(&l.network, declare, Some(context))?,
            });
        }
        Ok(SimilarityNetwork {
            model,
            cover: Cover {
                cells: self.cover.clone(),
            },
            locals,
            kind: self.kind,
        })
    }
}

impl JointFile {
    pub fn from_table(t: &JointTable) -> Self {
        let vars = t.variables();
        let mut cells = Vec::with_capacity(t.len());
        let mut k = 0;
        for_each_assignment(&t.cards(), |a| {
            cells.push(JointCell {
                assignment: vars
                    .iter()
                    .zip(a)
                    .map(|(v, &x)| (v.name.clone(), v.values[x].clone()))
                    .collect(),
                probability: Prob::Number(t.cells()[k]),
            });
            k += 1;
        });
        JointFile {
            variables: vars.to_vec(),
            cells,
        }
    }

    /// Missing assignments have probability zero.
    pub fn to_table(&self) -> Result<JointTable> {
        let cards: Vec<usize> = self.variables.iter().map(Variable::card).collect();
        let size: usize = cards.iter().product();
        let mut cells = vec![0.0; size];
        let mut seen = vec![false; size];
        for cell in &self.cells {
            if cell.assignment.len() != self.variables.len() {
                return Err(Error::Malformed(
                    "every joint cell must assign every variable".into(),
                ));
            }
            let mut idx = 0;
            for v in &self.variables {
                let label = cell
                    .assignment
                    .get(&v.name)
                    .ok_or_else(|| Error::Unassigned(v.name.clone()))?;
                idx = idx * v.card() + v.require_index(label)?;
            }
            if seen[idx] {
                return Err(Error::Malformed("joint cell listed twice".into()));
            }
            seen[idx] = true;
            cells[idx] = cell.probability.value()?;
        }
        JointTable::new(self.variables.clone(), cells)
    }
}

impl MultinetFile {
    pub fn from_multinet(mn: &Multinet) -> Self {
        let mut variables = vec![mn.hypothesis.clone()];
        variables.extend(mn.variables().iter().cloned());
        MultinetFile {
            hypothesis: mn.hypothesis.name.clone(),
            variables,
            prior: mn
                .prior
                .iter()
                .map(|(v, p)| (v.to_string(), Prob::Number(p)))
                .collect(),
            networks: mn
                .networks
                .iter()
                .map(|c| (c.hypothesis.clone(), network_to_file(&c.network)))
                .collect(),
        }
    }

    pub fn to_multinet(&self) -> Result<Multinet> {
        let hvar = self
            .variables
            .iter()
            .find(|v| v.name == self.hypothesis)
            .ok_or_else(|| Error::UnknownVariable(self.hypothesis.clone()))?
            .clone();
        let declare = |name: &str| -> Result<Variable> {
            self.variables
                .iter()
                .find(|v| v.name == name && name != hvar.name)
                .cloned()
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))
        };
        let mut probabilities = Vec::with_capacity(hvar.card());
        let mut networks = Vec::with_capacity(hvar.card());
        for h in &hvar.values {
            let p = self
                .prior
                .get(h)
                .ok_or_else(|| Error::Malformed(format!("no prior for `{h}`")))?;
            probabilities.push(p.value()?);
            let file = self
                .networks
                .get(h)
                .ok_or_else(|| Error::Malformed(format!("no network for `{h}`")))?;
            let network = network_from_file(file, declare, None)?;
            let issues = network.validate();
            if !issues.is_empty() {
                return Err(Error::Malformed(format!("network for `{h}`: {}", issues[0])));
            }
            networks.push(ComprehensiveNetwork {
                hypothesis: h.clone(),
                network,
            });
        }
        if self.prior.len() != hvar.card() || self.networks.len() != hvar.card() {
            return Err(Error::Malformed("prior or networks name unknown hypotheses".into()));
        }
        let prior = PosteriorVector::new(hvar.name.clone(), hvar.values.clone(), probabilities);
        if !prior.is_normalized() {
            return Err(Error::Malformed("prior is not normalized".into()));
        }
        let nodes = networks.first().map(|c| c.network.nodes().to_vec());
        if networks.iter().any(|c| Some(c.network.nodes().to_vec()) != nodes) {
            return Err(Error::Malformed("networks must share one node list".into()));
        }
        Ok(Multinet {
            hypothesis: hvar,
            prior,
            networks,
        })
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
}

fn render<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("file types always serialize");
    s.push('\n');
    s
}

pub fn parse_model(text: &str) -> Result<SimilarityNetwork> {
    parse::<ModelFile>(text)?.to_network()
}

pub fn model_to_string(sn: &SimilarityNetwork) -> String {
    render(&ModelFile::from_network(sn))
}

pub fn parse_joint(text: &str) -> Result<JointTable> {
    parse::<JointFile>(text)?.to_table()
}

pub fn joint_to_string(t: &JointTable) -> String {
    render(&JointFile::from_table(t))
}

pub fn parse_multinet(text: &str) -> Result<Multinet> {
    parse::<MultinetFile>(text)?.to_multinet()
}

pub fn multinet_to_string(mn: &Multinet) -> String {
    render(&MultinetFile::from_multinet(mn))
}

pub fn parse_evidence(text: &str) -> Result<Evidence> {
    parse(text)
}

pub fn evidence_to_string(e: &Evidence) -> String {
    render(e)
}
