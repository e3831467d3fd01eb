//! Synthetic similarity networks for comparing local and global inference
//! work.
//!
//! The model has `H` hypotheses `h0, ..., h{H-1}` and `n` binary findings
//! `u0, ..., u{n-1}`, conditionally independent given `h`. The cover is the
//! path `{h0,h1}, {h1,h2}, ...`, so there are `H - 1` cells. Finding `u_v`
//! changes its parameter between `h_j` and `h_{j+1}` exactly when
//! `v = (j*c + t) mod n` for some `t < c`; each cell therefore depicts `c`
//! findings and its local network spans `2 * 2^c` joint cells. Global
//! inference materializes `P(h, depicted findings)`, which has
//! `H * 2^d` cells where `d = min(n, (H-1)*c)`.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::model::{Evidence, HypothesisEvent, NetworkBuilder, PosteriorVector, Variable};
use crate::multinet::{convert, ConvertOptions};
use crate::simnet::{DiscreteModel, Kind, LocalNetwork, SimilarityNetwork};
use crate::strict::{infer_posterior_strict_with, StrictOptions};
use crate::synth::random_distribution;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BenchParams {
    pub hypotheses: usize,
    pub vars_per_local: usize,
    pub total: usize,
    pub seed: u64,
}

impl BenchParams {
    pub fn cells(&self) -> usize {
        self.hypotheses - 1
    }

    fn check(&self) -> Result<()> {
        if self.hypotheses < 2 {
            return Err(Error::Unsupported("at least two hypotheses are needed".into()));
        }
        if self.vars_per_local == 0 || self.vars_per_local > self.total {
            return Err(Error::Unsupported(
                "findings per local network must be between 1 and the total".into(),
            ));
        }
        if self.total > 40 {
            return Err(Error::Unsupported("at most 40 findings".into()));
        }
        Ok(())
    }

    /// Findings whose parameter changes between `h_j` and `h_{j+1}`.
    pub fn changing(&self, j: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.vars_per_local)
            .map(|t| (j * self.vars_per_local + t) % self.total)
            .collect();
        v.sort_unstable();
        v
    }

    pub fn depicted(&self) -> usize {
        self.total.min(self.cells() * self.vars_per_local)
    }

    /// Joint cells spanned by all local networks.
    pub fn expected_sinet_cells(&self) -> u128 {
        self.cells() as u128 * 2 * (1u128 << self.vars_per_local)
    }

    /// Cells of the global table over `h` and the depicted findings.
    pub fn expected_global_cells(&self) -> u128 {
        self.hypotheses as u128 * (1u128 << self.depicted())
    }
}

/// The benchmark model and a full observation of its depicted findings.
pub fn generate(params: &BenchParams) -> Result<(SimilarityNetwork, Evidence)> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (hn, n) = (params.hypotheses, params.total);
    let hvalues: Vec<String> = (0..hn).map(|i| format!("h{i}")).collect();
    let prior = random_distribution(&mut rng, hn, 0.05);

    // p[v][i] = P(u_v = 1 | h_i)
    let mut p: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(0.1..0.9)]).collect();
    for j in 0..params.cells() {
        let changing = params.changing(j);
        for (v, row) in p.iter_mut().enumerate() {
            let last = row[j];
            let next = if changing.contains(&v) {
                loop {
                    let x = rng.gen_range(0.1..0.9);
                    if (x - last).abs() > 0.1 {
                        break x;
                    }
                }
            } else {
                last
            };
            row.push(next);
        }
    }

    let mut locals = Vec::with_capacity(params.cells());
    let mut cells = Vec::with_capacity(params.cells());
    for j in 0..params.cells() {
        let cell = [hvalues[j].clone(), hvalues[j + 1].clone()];
        let mass = prior[j] + prior[j + 1];
        let mut builder = NetworkBuilder::new()
            .variable("h", &cell)
            .cpt("h", &[], &[&[prior[j] / mass, prior[j + 1] / mass]]);
        let names: Vec<String> = params.changing(j).iter().map(|v| format!("u{v}")).collect();
        for (name, v) in names.iter().zip(params.changing(j)) {
            let (a, b) = (p[v][j], p[v][j + 1]);
            builder = builder
                .variable(name, &["0", "1"])
                .cpt(name, &["h"], &[&[1.0 - a, a], &[1.0 - b, b]]);
        }
        let network = builder.context(HypothesisEvent::new("h", &cell)).build()?;
        locals.push(LocalNetwork {
            cell: cell.to_vec(),
            network,
        });
        cells.push(cell.to_vec());
    }
    let mut variables = vec![Variable::new("h", &hvalues)];
    variables.extend((0..n).map(|v| Variable::binary(format!("u{v}"))));
    let sn = SimilarityNetwork {
        model: DiscreteModel {
            variables,
            hypothesis: "h".into(),
        },
        cover: Cover { cells },
        locals,
        kind: Kind::Type1,
    };
    let mut evidence = Evidence::new();
    for name in sn.depicted_variables() {
        evidence.insert(name, if rng.gen_bool(0.5) { "1" } else { "0" });
    }
    Ok((sn, evidence))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeRun {
    pub cells_touched: u128,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub params: BenchParams,
    pub sinet: ModeRun,
    /// `None` when the global table exceeds the cell budget.
    pub global: Option<ModeRun>,
    pub expected_sinet_cells: u128,
    pub expected_global_cells: u128,
    /// Largest difference between the two posteriors.
    pub max_abs_diff: Option<f64>,
}

impl BenchReport {
    /// Global over local cell touches.
    pub fn ratio(&self) -> Option<f64> {
        self.global
            .as_ref()
            .map(|g| g.cells_touched as f64 / self.sinet.cells_touched as f64)
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, Duration)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed()))
}

/// Generates the model and answers the same query locally and globally.
pub fn run(params: &BenchParams, budget: u64) -> Result<BenchReport> {
    let (sn, evidence) = generate(params)?;
    let (strict, sinet_time) =
        timed(|| infer_posterior_strict_with(&sn, &evidence, &StrictOptions::default()))?;
    let expected_global = params.expected_global_cells();
    let global = if expected_global <= budget as u128 {
        let order: Vec<String> = sn.depicted_variables();
        let ((post, cells), time) = timed(|| -> Result<(PosteriorVector, usize)> {
            let mn = convert(&sn, &order, &ConvertOptions::default())?;
            let t = mn.joint_table(budget)?;
            Ok((t.posterior("h", &evidence)?, t.len()))
        })?;
        Some((post, cells, time))
    } else {
        None
    };
    Ok(BenchReport {
        params: *params,
        sinet: ModeRun {
            cells_touched: strict.cells_touched,
            seconds: sinet_time.as_secs_f64(),
        },
        max_abs_diff: global.as_ref().map(|(p, _, _)| p.max_abs_diff(&strict.posterior)),
        global: global.map(|(_, cells, time)| ModeRun {
            cells_touched: cells as u128,
            seconds: time.as_secs_f64(),
        }),
        expected_sinet_cells: params.expected_sinet_cells(),
        expected_global_cells: expected_global,
    })
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        writeln!(
            f,
            "hypotheses {}  local networks {}  findings {} ({} per local)  seed {}",
            p.hypotheses,
            p.cells(),
            p.total,
            p.vars_per_local,
            p.seed
        )?;
        writeln!(f, "{:<8} {:>14} {:>14} {:>12}", "mode", "cells", "expected", "seconds")?;
        writeln!(
            f,
            "{:<8} {:>14} {:>14} {:>12.6}",
            "sinet", self.sinet.cells_touched, self.expected_sinet_cells, self.sinet.seconds
        )?;
        match &self.global {
            Some(g) => writeln!(
                f,
                "{:<8} {:>14} {:>14} {:>12.6}",
                "global", g.cells_touched, self.expected_global_cells, g.seconds
            )?,
            None => writeln!(
                f,
                "{:<8} {:>14} {:>14} {:>12}",
                "global", "-", self.expected_global_cells, "skipped (budget)"
            )?,
        }
        if let Some(r) = self.ratio() {
            writeln!(f, "ratio    {r:.3}")?;
        }
        if let Some(d) = self.max_abs_diff {
            writeln!(f, "max posterior difference {d:.3e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_CELL_BUDGET;

    fn params(hypotheses: usize, c: usize, n: usize) -> BenchParams {
        BenchParams {
            hypotheses,
            vars_per_local: c,
            total: n,
            seed: 1,
        }
    }

    #[test]
    fn counts_match_the_analysis() {
        let p = params(9, 6, 16);
        assert_eq!(p.expected_sinet_cells(), 1024);
        assert_eq!(p.expected_global_cells(), 9 * 65536);
        let r = run(&p, DEFAULT_CELL_BUDGET).unwrap();
        assert_eq!(r.sinet.cells_touched, 1024);
        assert_eq!(r.global.as_ref().unwrap().cells_touched, 9 * 65536);
        assert!(r.max_abs_diff.unwrap() < 1e-9);
    }

    #[test]
    fn generated_model_is_its_own_type1_network() {
        let p = params(4, 2, 4);
        let (sn, _) = generate(&p).unwrap();
        assert!(sn.validate().is_empty());
        let mn = convert(&sn, &sn.depicted_variables(), &ConvertOptions::default()).unwrap();
        let t = mn.joint_table(DEFAULT_CELL_BUDGET).unwrap();
        let cover = sn.cover.clone();
        let order: Vec<String> = t.variables().iter().map(|v| v.name.clone()).collect();
        let rebuilt = crate::build_similarity_network(&t, "h", &cover, Kind::Type1, &order).unwrap();
        for (a, b) in rebuilt.locals.iter().zip(&sn.locals) {
            let names = |l: &LocalNetwork| -> Vec<String> {
                l.network.nodes().iter().map(|v| v.name.clone()).collect()
            };
            assert_eq!(names(a), names(b));
        }
    }

    #[test]
    fn one_cell_with_everything_has_ratio_one() {
        let r = run(&params(2, 5, 5), DEFAULT_CELL_BUDGET).unwrap();
        assert_eq!(r.ratio(), Some(1.0));
    }

    #[test]
    fn same_seed_same_counts() {
        let a = run(&params(5, 3, 8), DEFAULT_CELL_BUDGET).unwrap();
        let b = run(&params(5, 3, 8), DEFAULT_CELL_BUDGET).unwrap();
        assert_eq!(a.sinet.cells_touched, b.sinet.cells_touched);
        assert_eq!(a.global.unwrap().cells_touched, b.global.unwrap().cells_touched);
        assert_eq!(generate(&params(5, 3, 8)).unwrap(), generate(&params(5, 3, 8)).unwrap());
    }

    #[test]
    fn budget_skips_global_mode() {
        let r = run(&params(9, 6, 16), 1000).unwrap();
        assert!(r.global.is_none());
        assert!(r.to_string().contains("skipped (budget)"));
    }
}
