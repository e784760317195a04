//! Precedence orders on finitely many events, interval realizations, and
//! exhaustive order enumeration.
//!
//! Events here are anonymous indices `0..n`; the protocol-specific naming
//! lives in [`crate::executions`]. The temporal reading is the interval one:
//! each event occupies a span of time, and `x < y` means the span of `x` ends
//! before the span of `y` begins. Orders arising that way are exactly the
//! strict partial orders satisfying the interval-order axiom (whenever
//! `a < b` and `c < d` and `c` does not precede `b`, then `a < d`), and
//! [`realize_intervals`] reconstructs a witness assignment of spans for any
//! such order.
//!
//! Two exhaustive generators feed the verification sweeps:
//! [`enumerate_two_chain_orders`] produces every interval order extending two
//! disjoint chains of length `k` (all temporal arrangements of two sequential
//! processes), and [`enumerate_strict_partial_orders`] produces *all* labeled
//! strict partial orders on `n` points, which serves as a brute-force oracle
//! for the order-theoretic claims.

use std::collections::BTreeSet;

use itertools::Itertools;
use thiserror::Error;

/// Errors from order construction and realization.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("event index {0} is out of range for {1} events")]
    EventOutOfRange(usize, usize),
    #[error("precedence relation is cyclic")]
    Cyclic,
    #[error("relation is not a strict partial order")]
    NotStrictPartialOrder,
    #[error("order violates the interval-order axiom")]
    NotIntervalOrder,
    #[error("malformed action sequence: {0}")]
    BadActionSequence(String),
}

/// One endpoint action of an event's time span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Begin(usize),
    End(usize),
}

/// A strict partial order on events `0..n`, transitively closed by
/// construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precedence {
    n: usize,
    pairs: BTreeSet<(usize, usize)>,
}

/// Does the raw pair set describe a strict partial order on `0..n`?
///
/// Unlike [`Precedence::new`], nothing is repaired here: a missing
/// transitive pair or a reflexive pair simply makes the answer `false`.
pub fn is_strict_partial_order(n: usize, pairs: &BTreeSet<(usize, usize)>) -> bool {
    for &(a, b) in pairs {
        if a >= n || b >= n || a == b {
            return false;
        }
        for &(c, d) in pairs {
            if b == c && !pairs.contains(&(a, d)) {
                return false;
            }
        }
    }
    true
}

impl Precedence {
    /// Build from generating pairs: indices are range-checked, the relation
    /// is closed under transitivity, and a cycle is an error.
    pub fn new(
        n: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, OrderError> {
        let mut matrix = vec![false; n * n];
        for (a, b) in pairs {
            if a >= n {
                return Err(OrderError::EventOutOfRange(a, n));
            }
            if b >= n {
                return Err(OrderError::EventOutOfRange(b, n));
            }
            matrix[a * n + b] = true;
        }
        // Warshall closure.
        for k in 0..n {
            for i in 0..n {
                if matrix[i * n + k] {
                    for j in 0..n {
                        if matrix[k * n + j] {
                            matrix[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            if matrix[i * n + i] {
                return Err(OrderError::Cyclic);
            }
        }
        let closed = (0..n)
            .cartesian_product(0..n)
            .filter(|&(i, j)| matrix[i * n + j])
            .collect();
        Ok(Precedence { n, pairs: closed })
    }

    /// Accept an already-closed relation verbatim, or refuse it.
    pub fn from_closed(n: usize, pairs: BTreeSet<(usize, usize)>) -> Result<Self, OrderError> {
        if !is_strict_partial_order(n, &pairs) {
            return Err(OrderError::NotStrictPartialOrder);
        }
        Ok(Precedence { n, pairs })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.pairs.contains(&(a, b))
    }

    /// Neither `a < b` nor `b < a`.
    pub fn concurrent(&self, a: usize, b: usize) -> bool {
        !self.lt(a, b) && !self.lt(b, a)
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    /// Does the order satisfy the interval-order axiom?
    pub fn is_russell_wiener(&self) -> bool {
        for &(a, b) in &self.pairs {
            for &(c, d) in &self.pairs {
                if !self.lt(c, b) && !self.lt(a, d) {
                    return false;
                }
            }
        }
        true
    }

    /// Brute-force search for an induced 2+2: four distinct events with
    /// `a < b`, `c < d`, and all four cross pairs incomparable. Its absence
    /// is the classical equivalent of [`Self::is_russell_wiener`].
    pub fn has_induced_two_plus_two(&self) -> bool {
        for &(a, b) in &self.pairs {
            for &(c, d) in &self.pairs {
                if a != c
                    && a != d
                    && b != c
                    && b != d
                    && self.concurrent(a, c)
                    && self.concurrent(a, d)
                    && self.concurrent(b, c)
                    && self.concurrent(b, d)
                {
                    return true;
                }
            }
        }
        false
    }
}

/// Derive the precedence order from a linear record of begin/end actions:
/// `x < y` exactly when the end of `x` occurs before the begin of `y`.
///
/// The sequence must mention each of the `num_events` events exactly twice,
/// begin before end.
pub fn order_from_action_sequence(
    num_events: usize,
    actions: &[Action],
) -> Result<Precedence, OrderError> {
    if actions.len() != 2 * num_events {
        return Err(OrderError::BadActionSequence(format!(
            "expected {} actions for {} events, got {}",
            2 * num_events,
            num_events,
            actions.len()
        )));
    }
    let mut begin = vec![None; num_events];
    let mut end = vec![None; num_events];
    for (pos, &action) in actions.iter().enumerate() {
        let (slot, what, x) = match action {
            Action::Begin(x) => (&mut begin, "begin", x),
            Action::End(x) => (&mut end, "end", x),
        };
        if x >= num_events {
            return Err(OrderError::EventOutOfRange(x, num_events));
        }
        if slot[x].is_some() {
            return Err(OrderError::BadActionSequence(format!(
                "event {x} has more than one {what} action"
            )));
        }
        slot[x] = Some(pos);
    }
    for x in 0..num_events {
        let (b, e) = (begin[x], end[x]);
        match (b, e) {
            (Some(b), Some(e)) if b < e => {}
            (Some(_), Some(_)) => {
                return Err(OrderError::BadActionSequence(format!(
                    "event {x} ends before it begins"
                )))
            }
            _ => {
                return Err(OrderError::BadActionSequence(format!(
                    "event {x} is missing a begin or end action"
                )))
            }
        }
    }
    let mut pairs = BTreeSet::new();
    for x in 0..num_events {
        for y in 0..num_events {
            if end[x].unwrap() < begin[y].unwrap() {
                pairs.insert((x, y));
            }
        }
    }
    // Endpoint-derived relations are transitively closed and acyclic already.
    Precedence::from_closed(num_events, pairs)
}

/// An assignment of discrete time spans `[left, right]` to events, realizing
/// an interval order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalRealization {
    pub intervals: Vec<(i64, i64)>,
}

impl IntervalRealization {
    /// The precedence order induced by the spans: `x < y` exactly when
    /// `right(x) < left(y)`.
    pub fn induced_order(&self) -> Precedence {
        let n = self.intervals.len();
        let pairs = (0..n)
            .cartesian_product(0..n)
            .filter(|&(x, y)| self.intervals[x].1 < self.intervals[y].0)
            .collect();
        // Interval-induced relations are strict partial orders by
        // construction, so this cannot fail.
        Precedence::from_closed(n, pairs).expect("interval-induced order is a strict partial order")
    }
}

/// Construct time spans realizing `p`, or report that `p` is not an interval
/// order.
///
/// The construction uses the classical characterization: in an interval
/// order the predecessor sets are totally ordered by inclusion, so ranking
/// them yields left endpoints, and each right endpoint stretches to just
/// before the smallest left endpoint among the event's successors.
pub fn realize_intervals(p: &Precedence) -> Result<IntervalRealization, OrderError> {
    if !p.is_russell_wiener() {
        return Err(OrderError::NotIntervalOrder);
    }
    let n = p.len();
    let preds: Vec<BTreeSet<usize>> = (0..n)
        .map(|x| (0..n).filter(|&y| p.lt(y, x)).collect())
        .collect();
    let mut distinct: Vec<&BTreeSet<usize>> = preds.iter().collect();
    distinct.sort_by_key(|s| s.len());
    distinct.dedup();
    let rank = |s: &BTreeSet<usize>| -> i64 {
        distinct
            .iter()
            .position(|t| *t == s)
            .expect("every predecessor set is ranked") as i64
    };
    let max_rank = distinct.len() as i64 - 1;
    let left: Vec<i64> = (0..n).map(|x| rank(&preds[x])).collect();
    let intervals = (0..n)
        .map(|x| {
            let right = (0..n)
                .filter(|&y| p.lt(x, y))
                .map(|y| left[y] - 1)
                .min()
                .unwrap_or(max_rank);
            (left[x], right)
        })
        .collect();
    Ok(IntervalRealization { intervals })
}

/// Result of [`enumerate_two_chain_orders`]: the distinct orders plus the
/// number of raw endpoint interleavings that produced them.
#[derive(Debug, Clone)]
pub struct TwoChainEnumeration {
    pub orders: Vec<Precedence>,
    pub interleavings: u64,
}

/// Every interval order on `2k` events that extends two disjoint chains:
/// events `0..k` form one chain in index order, events `k..2k` the other.
///
/// Generation is by brute force over all interleavings of the two processes'
/// begin/end action strings, deduplicated; since every finite interval order
/// has a span realization with all endpoints distinct, this hits exactly the
/// realizable temporal arrangements.
pub fn enumerate_two_chain_orders(k: usize) -> TwoChainEnumeration {
    let chain_actions = |offset: usize| -> Vec<Action> {
        (0..k)
            .flat_map(|i| [Action::Begin(offset + i), Action::End(offset + i)])
            .collect()
    };
    let first = chain_actions(0);
    let second = chain_actions(k);
    let total = 4 * k;
    let mut seen = BTreeSet::new();
    let mut interleavings = 0u64;
    for positions in (0..total).combinations(2 * k) {
        interleavings += 1;
        let position_set: BTreeSet<usize> = positions.iter().copied().collect();
        let mut actions = Vec::with_capacity(total);
        let (mut i, mut j) = (0, 0);
        for pos in 0..total {
            if position_set.contains(&pos) {
                actions.push(first[i]);
                i += 1;
            } else {
                actions.push(second[j]);
                j += 1;
            }
        }
        let order = order_from_action_sequence(2 * k, &actions)
            .expect("interleaved chain actions form a valid sequence");
        seen.insert(order);
    }
    TwoChainEnumeration {
        orders: seen.into_iter().collect(),
        interleavings,
    }
}

/// All labeled strict partial orders on `0..n`, built recursively: each
/// order on `n` points arises uniquely from an order on `n-1` points by
/// choosing the new point's predecessor set (downward closed) and successor
/// set (upward closed, disjoint, with every predecessor below every
/// successor).
///
/// This is the brute-force oracle against which the interval-order routines
/// are cross-checked; it is exact but only feasible for small `n`.
pub fn enumerate_strict_partial_orders(n: usize) -> Vec<Precedence> {
    let mut orders: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new()];
    for k in 0..n {
        let mut next = Vec::new();
        for order in &orders {
            let subsets = 1u32 << k;
            for dmask in 0..subsets {
                if !closed_downward(order, k, dmask) {
                    continue;
                }
                for umask in 0..subsets {
                    if dmask & umask != 0 {
                        continue;
                    }
                    if !closed_upward(order, k, umask) {
                        continue;
                    }
                    if !cross_related(order, k, dmask, umask) {
                        continue;
                    }
                    let mut extended = order.clone();
                    for d in bits(dmask, k) {
                        extended.insert((d, k));
                    }
                    for u in bits(umask, k) {
                        extended.insert((k, u));
                    }
                    next.push(extended);
                }
            }
        }
        orders = next;
    }
    orders
        .into_iter()
        .map(|pairs| {
            Precedence::from_closed(n, pairs).expect("recursive construction preserves closure")
        })
        .collect()
}

fn bits(mask: u32, width: usize) -> impl Iterator<Item = usize> {
    (0..width).filter(move |i| mask & (1 << i) != 0)
}

fn closed_downward(order: &BTreeSet<(usize, usize)>, width: usize, mask: u32) -> bool {
    bits(mask, width).all(|d| {
        (0..width).all(|y| !order.contains(&(y, d)) || mask & (1 << y) != 0)
    })
}

fn closed_upward(order: &BTreeSet<(usize, usize)>, width: usize, mask: u32) -> bool {
    bits(mask, width).all(|u| {
        (0..width).all(|y| !order.contains(&(u, y)) || mask & (1 << y) != 0)
    })
}

fn cross_related(order: &BTreeSet<(usize, usize)>, width: usize, dmask: u32, umask: u32) -> bool {
    bits(dmask, width).all(|d| bits(umask, width).all(|u| order.contains(&(d, u))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_plus_two() -> Precedence {
        Precedence::from_closed(4, [(0, 1), (2, 3)].into_iter().collect()).unwrap()
    }

    #[test]
    fn raw_relation_validation() {
        let missing_transitive: BTreeSet<_> = [(0, 1), (1, 2)].into_iter().collect();
        assert!(!is_strict_partial_order(3, &missing_transitive));
        let closed: BTreeSet<_> = [(0, 1), (1, 2), (0, 2)].into_iter().collect();
        assert!(is_strict_partial_order(3, &closed));
        let reflexive: BTreeSet<_> = [(0, 0)].into_iter().collect();
        assert!(!is_strict_partial_order(1, &reflexive));
    }

    #[test]
    fn construction_closes_transitively() {
        let p = Precedence::new(3, [(0, 1), (1, 2)]).unwrap();
        assert!(p.lt(0, 2));
        assert!(is_strict_partial_order(3, p.pairs()));
    }

    #[test]
    fn cycles_are_rejected() {
        assert_eq!(Precedence::new(2, [(0, 1), (1, 0)]), Err(OrderError::Cyclic));
        assert_eq!(
            Precedence::new(1, [(0, 0)]).unwrap_err(),
            OrderError::Cyclic
        );
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert_eq!(
            Precedence::new(2, [(0, 5)]),
            Err(OrderError::EventOutOfRange(5, 2))
        );
    }

    #[test]
    fn chain_is_interval_order_and_two_plus_two_is_not() {
        let chain = Precedence::new(3, [(0, 1), (1, 2)]).unwrap();
        assert!(chain.is_russell_wiener());
        assert!(!chain.has_induced_two_plus_two());
        let p = two_plus_two();
        assert!(!p.is_russell_wiener());
        assert!(p.has_induced_two_plus_two());
    }

    #[test]
    fn action_sequence_overlap_and_separation() {
        use Action::*;
        // Fully overlapping events: no precedence.
        let p = order_from_action_sequence(2, &[Begin(0), Begin(1), End(0), End(1)]).unwrap();
        assert!(p.concurrent(0, 1));
        assert!(p.pairs().is_empty());
        // Strictly separated events.
        let p = order_from_action_sequence(2, &[Begin(0), End(0), Begin(1), End(1)]).unwrap();
        assert!(p.lt(0, 1));
        assert!(!p.lt(1, 0));
    }

    #[test]
    fn action_sequence_rejects_malformed_input() {
        use Action::*;
        assert!(matches!(
            order_from_action_sequence(2, &[Begin(0), End(0)]),
            Err(OrderError::BadActionSequence(_))
        ));
        assert!(matches!(
            order_from_action_sequence(1, &[Begin(0), Begin(0)]),
            Err(OrderError::BadActionSequence(_))
        ));
        assert!(matches!(
            order_from_action_sequence(1, &[End(0), Begin(0)]),
            Err(OrderError::BadActionSequence(_))
        ));
        assert!(matches!(
            order_from_action_sequence(1, &[Begin(3), End(0)]),
            Err(OrderError::EventOutOfRange(3, 1))
        ));
    }

    #[test]
    fn realization_of_chain_and_antichain() {
        let chain = Precedence::new(3, [(0, 1), (1, 2)]).unwrap();
        let r = realize_intervals(&chain).unwrap();
        assert_eq!(r.intervals, vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(r.induced_order(), chain);

        let antichain = Precedence::new(2, []).unwrap();
        let r = realize_intervals(&antichain).unwrap();
        assert_eq!(r.intervals, vec![(0, 0), (0, 0)]);
        assert_eq!(r.induced_order(), antichain);
    }

    #[test]
    fn realization_refuses_non_interval_orders() {
        assert_eq!(
            realize_intervals(&two_plus_two()),
            Err(OrderError::NotIntervalOrder)
        );
    }

    #[test]
    fn two_chain_orders_of_length_one() {
        let e = enumerate_two_chain_orders(1);
        assert_eq!(e.interleavings, 6);
        // x before y, y before x, or overlapping.
        assert_eq!(e.orders.len(), 3);
        for order in &e.orders {
            assert!(order.is_russell_wiener());
        }
    }

    #[test]
    fn two_chain_orders_respect_both_chains() {
        let k = 3;
        let e = enumerate_two_chain_orders(k);
        assert_eq!(e.interleavings, 924); // C(12, 6)
        for order in &e.orders {
            assert!(order.is_russell_wiener());
            assert!(!order.has_induced_two_plus_two());
            for i in 0..k {
                for j in (i + 1)..k {
                    assert!(order.lt(i, j), "first chain must stay ordered");
                    assert!(order.lt(k + i, k + j), "second chain must stay ordered");
                }
            }
        }
    }

    #[test]
    fn two_chain_order_realizations_round_trip() {
        for k in 1..=3 {
            for order in enumerate_two_chain_orders(k).orders {
                let r = realize_intervals(&order).unwrap();
                assert_eq!(r.induced_order(), order);
            }
        }
    }

    #[test]
    fn two_chain_order_count_at_length_four_is_frozen() {
        let e = enumerate_two_chain_orders(4);
        assert_eq!(e.interleavings, 12870); // C(16, 8)
        assert_eq!(e.orders.len(), 1107);
    }

    /// The interleaving generator produces exactly the interval orders
    /// extending both chains — checked as set equality against the
    /// brute-force enumeration of all labeled strict partial orders.
    #[test]
    fn two_chain_orders_match_the_brute_force_oracle() {
        for k in 1..=2usize {
            let direct: BTreeSet<Precedence> =
                enumerate_two_chain_orders(k).orders.into_iter().collect();
            let oracle: BTreeSet<Precedence> = enumerate_strict_partial_orders(2 * k)
                .into_iter()
                .filter(|p| {
                    let chains = (0..k).all(|i| {
                        ((i + 1)..k).all(|j| p.lt(i, j) && p.lt(k + i, k + j))
                    });
                    chains && p.is_russell_wiener()
                })
                .collect();
            assert_eq!(direct, oracle, "k = {k}");
        }
    }

    #[test]
    fn labeled_order_counts_match_the_known_sequence() {
        let expected = [1usize, 1, 3, 19, 219, 4231];
        for (n, &want) in expected.iter().enumerate() {
            assert_eq!(enumerate_strict_partial_orders(n).len(), want, "n = {n}");
        }
    }

    #[test]
    fn interval_axiom_matches_two_plus_two_freeness_on_all_small_orders() {
        for n in 0..=5 {
            for p in enumerate_strict_partial_orders(n) {
                assert_eq!(
                    p.is_russell_wiener(),
                    !p.has_induced_two_plus_two(),
                    "disagreement on {:?}",
                    p
                );
            }
        }
    }

    #[test]
    fn realization_round_trips_on_every_small_interval_order() {
        for n in 0..=4 {
            for p in enumerate_strict_partial_orders(n) {
                if p.is_russell_wiener() {
                    let r = realize_intervals(&p).unwrap();
                    assert_eq!(r.induced_order(), p);
                } else {
                    assert_eq!(realize_intervals(&p), Err(OrderError::NotIntervalOrder));
                }
            }
        }
    }
}
