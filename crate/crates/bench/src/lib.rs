//! Inputs shared by the criterion benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use simnet_core::bench::{generate, BenchParams};
use simnet_core::synth;
use simnet_core::{convert, BayesianNetwork, ConvertOptions, Evidence, JointTable, Multinet, SimilarityNetwork};

/// The synthetic path-cover model in every representation the modes use.
pub struct ModelCase {
    pub network: SimilarityNetwork,
    pub multinet: Multinet,
    pub joint: JointTable,
    pub evidence: Evidence,
}

pub fn model_case(hypotheses: usize, vars_per_local: usize, total: usize) -> ModelCase {
    let params = BenchParams {
        hypotheses,
        vars_per_local,
        total,
        seed: 1,
    };
    let (network, evidence) = generate(&params).expect("benchmark parameters are valid");
    let multinet = convert(&network, &network.depicted_variables(), &ConvertOptions::default())
        .expect("generated models are type 1");
    let joint = multinet
        .joint_table(u64::MAX)
        .expect("benchmark joints fit in memory");
    ModelCase {
        network,
        multinet,
        joint,
        evidence,
    }
}

/// A random network with a query node and evidence on about half the rest.
pub fn network_case(nodes: usize, seed: u64) -> (BayesianNetwork, String, Evidence) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bn = synth::random_network(&mut rng, nodes, 2, 3);
    let query = bn.node(rng.gen_range(0..nodes)).name.clone();
    let evidence = synth::random_evidence(&mut rng, bn.nodes()).filtered(|v| v != query);
    (bn, query, evidence)
}
