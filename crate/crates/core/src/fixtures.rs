//! Small named models used by tests, documentation and the command line.
//!
//! * `toy3`: three equally likely hypotheses and one binary finding `y`
//!   with `P(+y | h) = (0.8, 0, 0.4)`; cover `{h1,h2}, {h2,h3}`.
//! * `toy3p`: as `toy3` with `P(+y | h2) = 0.2`, so strictly positive.
//! * `sb`: the secured building. Hypotheses spy, visitor, worker and
//!   executive; findings gender `g`, badge `b` and limousine `l`.
//! * `mc3`: a Markov chain `x -> y -> z` whose two transition matrices
//!   multiply to a matrix with identical rows.

use crate::cover::Cover;
use crate::model::{BayesianNetwork, NetworkBuilder};
use crate::oracle::{JointTable, DEFAULT_CELL_BUDGET};
use crate::simnet::{build_similarity_network, Kind, SimilarityNetwork};

fn joint(bn: &BayesianNetwork) -> JointTable {
    JointTable::from_network(bn, DEFAULT_CELL_BUDGET).expect("fixture fits the default budget")
}

fn toy(p_h2: f64) -> BayesianNetwork {
    NetworkBuilder::new()
        .variable("h", &["h1", "h2", "h3"])
        .variable("y", &["+y", "-y"])
        .cpt("h", &[], &[&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]])
        .cpt("y", &["h"], &[&[0.8, 0.2], &[p_h2, 1.0 - p_h2], &[0.4, 0.6]])
        .build()
        .expect("toy fixture is well formed")
}

pub fn toy3_cover() -> Cover {
    Cover::new(&[&["h1", "h2"][..], &["h2", "h3"][..]])
}

pub fn toy3_network() -> BayesianNetwork {
    toy(0.0)
}

pub fn toy3_joint() -> JointTable {
    joint(&toy3_network())
}

pub fn toy3() -> SimilarityNetwork {
    build_similarity_network(&toy3_joint(), "h", &toy3_cover(), Kind::Type1, &["h", "y"])
        .expect("toy3 builds")
}

pub fn toy3p_network() -> BayesianNetwork {
    toy(0.2)
}

pub fn toy3p_joint() -> JointTable {
    joint(&toy3p_network())
}

pub fn toy3p() -> SimilarityNetwork {
    build_similarity_network(&toy3p_joint(), "h", &toy3_cover(), Kind::Type1, &["h", "y"])
        .expect("toy3p builds")
}

/// The secured building as one Bayesian network `h -> g`, `{h, g} -> b`,
/// `h -> l`.
///
/// Spies are mostly men and always wear badges, visitors never do, and
/// female workers wear badges more often than male workers. Executives share
/// the workers' gender and badge distribution; only executives arrive by
/// limousine.
pub fn sb_network() -> BayesianNetwork {
    NetworkBuilder::new()
        .variable("h", &["spy", "visitor", "worker", "executive"])
        .variable("g", &["male", "female"])
        .variable("b", &["yes", "no"])
        .variable("l", &["yes", "no"])
        .cpt("h", &[], &[&[0.05, 0.2, 0.6, 0.15]])
        .cpt("g", &["h"], &[&[0.9, 0.1], &[0.5, 0.5], &[0.6, 0.4], &[0.6, 0.4]])
        .cpt(
            "b",
            &["h", "g"],
            &[
                &[1.0, 0.0],
                &[1.0, 0.0],
                &[0.0, 1.0],
                &[0.0, 1.0],
                &[0.7, 0.3],
                &[0.9, 0.1],
                &[0.7, 0.3],
                &[0.9, 0.1],
            ],
        )
        .cpt("l", &["h"], &[&[0.0, 1.0], &[0.0, 1.0], &[0.0, 1.0], &[0.6, 0.4]])
        .build()
        .expect("sb fixture is well formed")
}

pub fn sb_joint() -> JointTable {
    joint(&sb_network())
}

pub fn sb_cover() -> Cover {
    Cover::new(&[
        &["spy", "visitor"][..],
        &["visitor", "worker"][..],
        &["worker", "executive"][..],
    ])
}

pub fn sb() -> SimilarityNetwork {
    build_similarity_network(&sb_joint(), "h", &sb_cover(), Kind::Type1, &["h", "g", "b", "l"])
        .expect("sb builds")
}

/// `P(x) = (0.4, 0.6)`; the rows of `P(y | x)` are linearly independent and
/// so are the columns of `P(z | y)`, yet every row of their product is
/// `(0.59, 0.41)`.
pub fn mc3_network() -> BayesianNetwork {
    NetworkBuilder::new()
        .variable("x", &["x0", "x1"])
        .variable("y", &["y0", "y1", "y2"])
        .variable("z", &["z0", "z1"])
        .cpt("x", &[], &[&[0.4, 0.6]])
        .cpt("y", &["x"], &[&[0.2, 0.3, 0.5], &[0.5, 0.3, 0.2]])
        .cpt("z", &["y"], &[&[0.8, 0.2], &[0.1, 0.9], &[0.8, 0.2]])
        .build()
        .expect("mc3 fixture is well formed")
}

pub fn mc3_joint() -> JointTable {
    joint(&mc3_network())
}
