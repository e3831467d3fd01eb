//! Joint-preserving arc reversal and reorientation to a target node order.

use crate::error::{Error, Result};
use crate::model::{for_each_assignment, BayesianNetwork, Cpt};

/// Reverses `parent -> child`, giving both endpoints the union of their former
/// parent sets. The joint distribution is unchanged.
pub fn arc_reverse(bn: &BayesianNetwork, parent: &str, child: &str) -> Result<BayesianNetwork> {
    let x = bn.require_node(parent)?;
    let y = bn.require_node(child)?;
    if !bn.parents(y).contains(&x) {
        return Err(Error::NoSuchEdge {
            parent: parent.into(),
            child: child.into(),
        });
    }
    if has_indirect_path(bn, x, y) {
        return Err(Error::WouldCreateCycle {
            parent: parent.into(),
            child: child.into(),
        });
    }
    Ok(reverse_unchecked(bn, x, y))
}

// Is there a directed path x ~> y other than the edge itself?
fn has_indirect_path(bn: &BayesianNetwork, x: usize, y: usize) -> bool {
    let mut seen = vec![false; bn.len()];
    let mut stack: Vec<usize> = bn.children(x).into_iter().filter(|&c| c != y).collect();
    while let Some(i) = stack.pop() {
        if i == y {
            return true;
        }
        if !seen[i] {
            seen[i] = true;
            stack.extend(bn.children(i));
        }
    }
    false
}

fn reverse_unchecked(bn: &BayesianNetwork, x: usize, y: usize) -> BayesianNetwork {
    let nodes = bn.nodes().to_vec();
    let cards = bn.cards();

    // shared context: everything x or y conditioned on, minus the pair itself
    let mut shared: Vec<usize> = bn
        .parents(x)
        .iter()
        .chain(bn.parents(y))
        .copied()
        .filter(|&p| p != x && p != y)
        .collect();
    shared.sort_unstable();
    shared.dedup();

    let mut y_parents = shared.clone();
    let mut x_parents = shared.clone();
    x_parents.push(y);
    x_parents.sort_unstable();

    let (cx, cy) = (cards[x], cards[y]);
    let shared_cards: Vec<usize> = shared.iter().map(|&p| cards[p]).collect();
    let rows: usize = shared_cards.iter().product();
    let mut y_table = vec![0.0; rows * cy];
    let mut x_table = vec![0.0; rows * cy * cx];

    let mut full = vec![0usize; nodes.len()];
    let row_in = |parents: &[usize], full: &[usize]| -> usize {
        parents.iter().fold(0, |acc, &p| acc * cards[p] + full[p])
    };
    for_each_assignment(&shared_cards, |a| {
        for (k, &p) in shared.iter().enumerate() {
            full[p] = a[k];
        }
        let r = row_in(&shared, &full);
        for vy in 0..cy {
            full[y] = vy;
            let mut weights = vec![0.0; cx];
            for (vx, w) in weights.iter_mut().enumerate() {
                full[x] = vx;
                *w = bn.local_prob(x, &full) * bn.local_prob(y, &full);
            }
            let marginal: f64 = weights.iter().sum();
            y_table[r * cy + vy] = marginal;
            let xr = row_in(&x_parents, &full);
            for (vx, w) in weights.iter().enumerate() {
                x_table[xr * cx + vx] = if marginal > 0.0 {
                    w / marginal
                } else {
                    1.0 / cx as f64
                };
            }
        }
    });

    y_parents.sort_unstable();
    let mut cpts: Vec<Cpt> = bn.cpts().to_vec();
    cpts[y] = Cpt::new(y_parents, y_table);
    cpts[x] = Cpt::new(x_parents, x_table);
    let rebuilt = BayesianNetwork::new(nodes, cpts).expect("reversal keeps CPT shapes consistent");
    match bn.context() {
        Some(ctx) => rebuilt.with_context(ctx.clone()),
        None => rebuilt,
    }
}

/// Returns a joint-equivalent network in which every edge points from earlier
/// to later in `order`.
///
/// Violating edges are reversed one at a time: the parent latest in `order`
/// goes first, and among its violating children the one earliest in the
/// current topological order, which never closes a cycle.
pub fn reorient<S: AsRef<str>>(bn: &BayesianNetwork, order: &[S]) -> Result<BayesianNetwork> {
    let n = bn.len();
    if order.len() != n {
        return Err(Error::InvalidOrder(format!(
            "order has {} entries for {} nodes",
            order.len(),
            n
        )));
    }
    let mut rank = vec![usize::MAX; n];
    for (k, name) in order.iter().enumerate() {
        let i = bn.require_node(name.as_ref())?;
        if rank[i] != usize::MAX {
            return Err(Error::InvalidOrder(format!("`{}` listed twice", name.as_ref())));
        }
        rank[i] = k;
    }

    let mut current = bn.clone();
    loop {
        let violating: Vec<(usize, usize)> = (0..n)
            .flat_map(|c| current.parents(c).iter().map(move |&p| (p, c)))
            .filter(|&(p, c)| rank[p] > rank[c])
            .collect();
        let Some(&(x, _)) = violating.iter().max_by_key(|&&(p, _)| rank[p]) else {
            return Ok(current);
        };
        let topo = current
            .topological_order()
            .ok_or_else(|| Error::Malformed("network has a directed cycle".into()))?;
        let mut topo_pos = vec![0usize; n];
        for (k, &i) in topo.iter().enumerate() {
            topo_pos[i] = k;
        }
        let y = violating
            .iter()
            .filter(|&&(p, _)| p == x)
            .map(|&(_, c)| c)
            .min_by_key(|&c| topo_pos[c])
            .expect("x has a violating child");
        debug_assert!(!has_indirect_path(&current, x, y));
        current = reverse_unchecked(&current, x, y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Evidence, NetworkBuilder};

    fn assert_same_joint(a: &BayesianNetwork, b: &BayesianNetwork) {
        let cards = a.cards();
        for_each_assignment(&cards, |asg| {
            let mut ev = Evidence::new();
            for (i, &v) in asg.iter().enumerate() {
                ev.insert(a.node(i).name.clone(), a.node(i).values[v].clone());
            }
            let pa = a.joint_probability(&ev).unwrap();
            let pb = b.joint_probability(&ev).unwrap();
            assert!((pa - pb).abs() <= 1e-12 * pa.abs().max(1e-300), "{pa} vs {pb}");
        });
    }

    #[test]
    fn reversing_a_chain_preserves_the_joint() {
        let bn = NetworkBuilder::new()
            .variable("x", &["0", "1"])
            .variable("y", &["0", "1"])
            .cpt("x", &[], &[&[0.5, 0.5]])
            .cpt("y", &["x"], &[&[0.9, 0.1], &[0.35, 0.65]])
            .build()
            .unwrap();
        let r = arc_reverse(&bn, "x", "y").unwrap();
        assert_eq!(r.parents(0), &[1]);
        assert!(r.parents(1).is_empty());
        assert!(r.validate().is_empty());
        assert_same_joint(&bn, &r);
    }

    #[test]
    fn reversing_into_a_v_structure_adds_the_spouse() {
        let bn = NetworkBuilder::new()
            .variable("a", &["0", "1"])
            .variable("b", &["0", "1"])
            .variable("c", &["0", "1"])
            .cpt("a", &[], &[&[0.3, 0.7]])
            .cpt("b", &[], &[&[0.6, 0.4]])
            .cpt("c", &["a", "b"], &[&[0.1, 0.9], &[0.5, 0.5], &[0.8, 0.2], &[0.25, 0.75]])
            .build()
            .unwrap();
        let r = arc_reverse(&bn, "a", "c").unwrap();
        assert_eq!(r.parents(0), &[1, 2]);
        assert_eq!(r.parents(2), &[1]);
        assert_same_joint(&bn, &r);
    }

    #[test]
    fn reversal_across_an_indirect_path_is_refused() {
        let bn = NetworkBuilder::new()
            .variable("a", &["0", "1"])
            .variable("x", &["0", "1"])
            .variable("b", &["0", "1"])
            .cpt("a", &[], &[&[0.5, 0.5]])
            .cpt("x", &["a"], &[&[0.5, 0.5], &[0.1, 0.9]])
            .cpt("b", &["a", "x"], &[&[0.5, 0.5], &[0.2, 0.8], &[0.7, 0.3], &[0.4, 0.6]])
            .build()
            .unwrap();
        assert!(matches!(
            arc_reverse(&bn, "a", "b"),
            Err(Error::WouldCreateCycle { .. })
        ));
        assert!(matches!(arc_reverse(&bn, "b", "a"), Err(Error::NoSuchEdge { .. })));
    }

    #[test]
    fn consistent_network_is_a_fixed_point() {
        let bn = crate::fixtures::toy3p_network();
        let r = reorient(&bn, &["h", "y"]).unwrap();
        assert_eq!(r, bn);
    }

    #[test]
    fn chain_is_inverted_by_bayes_rule() {
        let bn = NetworkBuilder::new()
            .variable("x", &["0", "1"])
            .variable("y", &["0", "1"])
            .cpt("y", &[], &[&[0.2, 0.8]])
            .cpt("x", &["y"], &[&[0.5, 0.5], &[0.25, 0.75]])
            .build()
            .unwrap();
        let r = reorient(&bn, &["x", "y"]).unwrap();
        assert!(r.parents(0).is_empty());
        assert_eq!(r.parents(1), &[0]);
        // P(x=0) = 0.2*0.5 + 0.8*0.25 = 0.3
        assert!((r.cpt(0).table[0] - 0.3).abs() < 1e-15);
        // P(y=0 | x=0) = 0.1 / 0.3
        assert!((r.cpt(1).table[0] - 0.1 / 0.3).abs() < 1e-15);
        assert_same_joint(&bn, &r);
    }
}
