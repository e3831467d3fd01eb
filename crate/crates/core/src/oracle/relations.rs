//! Independence, mutual relevance and relatedness decided by exhaustive
//! enumeration over a joint table. Everything here is exponential on purpose.

use super::{EventFilter, JointTable};
use crate::error::Result;
use crate::model::for_each_assignment;
use crate::{EPS_CI, EPS_ZERO};

/// `I(X, Y | Z)`: for every `z` with `P(z) > 0`, `P(x,y|z) = P(x|z) P(y|z)`.
pub fn is_conditionally_independent<S: AsRef<str>>(
    t: &JointTable,
    x: &[S],
    y: &[S],
    z: &[S],
) -> Result<bool> {
    let idx = |set: &[S]| -> Result<Vec<usize>> {
        set.iter().map(|s| t.require_var(s.as_ref())).collect()
    };
    Ok(independent(t, &idx(x)?, &idx(y)?, &idx(z)?))
}

#[allow(clippy::needless_range_loop)]
pub(crate) fn independent(t: &JointTable, x: &[usize], y: &[usize], z: &[usize]) -> bool {
    if x.is_empty() || y.is_empty() {
        return true;
    }
    let scope: Vec<usize> = x.iter().chain(y).chain(z).copied().collect();
    let m = t.marginal(&scope);
    let card = |set: &[usize]| -> usize { set.iter().map(|&i| t.variables()[i].card()).product() };
    let (nx, ny, nz) = (card(x), card(y), card(z));
    let cell = |a: usize, b: usize, c: usize| m.cells()[(a * ny + b) * nz + c];

    let mut px = vec![0.0; nx];
    let mut py = vec![0.0; ny];
    for c in 0..nz {
        px.iter_mut().for_each(|p| *p = 0.0);
        py.iter_mut().for_each(|p| *p = 0.0);
        let mut pz = 0.0;
        for a in 0..nx {
            for b in 0..ny {
                let p = cell(a, b, c);
                px[a] += p;
                py[b] += p;
                pz += p;
            }
        }
        if pz <= EPS_ZERO {
            continue;
        }
        for a in 0..nx {
            for b in 0..ny {
                let joint = cell(a, b, c) / pz;
                let product = (px[a] / pz) * (py[b] / pz);
                if (joint - product).abs() > EPS_CI {
                    return false;
                }
            }
        }
    }
    true
}

fn conditioned(t: &JointTable, e: Option<&EventFilter>) -> Result<JointTable> {
    match e {
        Some(e) => t.condition(e),
        None => Ok(t.clone()),
    }
}

/// Mutual irrelevance of `a` and `b` given event `e`: `I({a}, {b} | Z)` holds
/// for every subset `Z` of the remaining variables.
pub fn is_mutually_irrelevant(
    t: &JointTable,
    a: &str,
    b: &str,
    e: Option<&EventFilter>,
) -> Result<bool> {
    let tc = conditioned(t, e)?;
    let (i, j) = (tc.require_var(a)?, tc.require_var(b)?);
    Ok(irrelevant_in(&tc, i, j))
}

pub(crate) fn irrelevant_in(t: &JointTable, i: usize, j: usize) -> bool {
    let others: Vec<usize> = (0..t.variables().len()).filter(|&k| k != i && k != j).collect();
    (0u64..1 << others.len()).all(|mask| {
        let z: Vec<usize> = subset(&others, mask);
        independent(t, &[i], &[j], &z)
    })
}

/// Unrelatedness of `a` and `b` given `e`: some bipartition of all variables
/// separating them factorizes the conditioned table.
pub fn is_unrelated(t: &JointTable, a: &str, b: &str, e: Option<&EventFilter>) -> Result<bool> {
    let tc = conditioned(t, e)?;
    let (i, j) = (tc.require_var(a)?, tc.require_var(b)?);
    Ok(unrelated_in(&tc, i, j))
}

pub(crate) fn unrelated_in(t: &JointTable, i: usize, j: usize) -> bool {
    let others: Vec<usize> = (0..t.variables().len()).filter(|&k| k != i && k != j).collect();
    (0u64..1 << others.len()).any(|mask| {
        let mut left = vec![i];
        let mut right = vec![j];
        for (bit, &k) in others.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                left.push(k);
            } else {
                right.push(k);
            }
        }
        factorizes(t, &left, &right)
    })
}

/// Does `P(U1, U2) = P(U1) P(U2)` hold cell by cell?
pub(crate) fn factorizes(t: &JointTable, left: &[usize], right: &[usize]) -> bool {
    let ml = t.marginal(left);
    let mr = t.marginal(right);
    let vars = t.variables();
    let mut k = 0;
    let mut ok = true;
    for_each_assignment(&t.cards(), |a| {
        if !ok {
            return;
        }
        let il = left.iter().fold(0, |acc, &v| acc * vars[v].card() + a[v]);
        let ir = right.iter().fold(0, |acc, &v| acc * vars[v].card() + a[v]);
        if (t.cells()[k] - ml.cells()[il] * mr.cells()[ir]).abs() > EPS_CI {
            ok = false;
        }
        k += 1;
    });
    ok
}

/// Triples `(u_i, u_j, u_k)` with `relevant(u_i,u_j)`, `relevant(u_j,u_k)` but
/// not `relevant(u_i,u_k)`. Each unordered endpoint pair is reported once,
/// in table order.
pub fn check_transitivity(
    t: &JointTable,
    e: Option<&EventFilter>,
) -> Result<Vec<(String, String, String)>> {
    let tc = conditioned(t, e)?;
    let n = tc.variables().len();
    let skip = e.and_then(|e| tc.var_index(&e.variable));
    let vars: Vec<usize> = (0..n).filter(|&k| Some(k) != skip).collect();
    let mut relevant = vec![vec![false; n]; n];
    for (p, &a) in vars.iter().enumerate() {
        for &b in &vars[p + 1..] {
            let r = !irrelevant_in(&tc, a, b);
            relevant[a][b] = r;
            relevant[b][a] = r;
        }
    }
    let name = |k: usize| tc.variables()[k].name.clone();
    let mut out = Vec::new();
    for (p, &a) in vars.iter().enumerate() {
        for &c in &vars[p + 1..] {
            if relevant[a][c] {
                continue;
            }
            for &b in &vars {
                if b != a && b != c && relevant[a][b] && relevant[b][c] {
                    out.push((name(a), name(b), name(c)));
                }
            }
        }
    }
    Ok(out)
}

/// Every cell exceeds the zero tolerance.
pub fn strictly_positive(t: &JointTable) -> bool {
    t.cells().iter().all(|&p| p > EPS_ZERO)
}

fn subset(items: &[usize], mask: u64) -> Vec<usize> {
    items
        .iter()
        .enumerate()
        .filter(|(bit, _)| mask >> bit & 1 == 1)
        .map(|(_, &k)| k)
        .collect()
}
