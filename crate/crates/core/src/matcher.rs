//! Optimal spike pairing between a reference and an observed train.
//!
//! A dynamic program aligns the two spike-time sequences of one neuron.
//! Matching spike `k` of the reference to spike `l` of the observation
//! costs their absolute temporal difference; leaving a spike unmatched
//! costs `a_cap`. The recursion over the cost matrix is
//!
//! ```text
//! cost[k][l] = min( cost[k-1][l-1] + |t_k - t_l|,   // pair k with l
//!                   cost[k-1][l]   + a_cap,         // leave k unpaired
//!                   cost[k][l-1]   + a_cap,         // leave l unpaired
//!                   cost[k-1][l-1] + 2 * a_cap )    // leave both unpaired
//! ```
//!
//! with bases `cost[k][0] = k * a_cap` and `cost[0][l] = l * a_cap`.
//! The fourth argument is dominated by applying the second and third in
//! sequence and never changes the optimum; it is kept for fidelity to the
//! recursion as stated. Backtracking from `(n, m)` recovers the pair set.
//!
//! A pair with temporal difference above `2 * a_cap` is never chosen by an
//! optimal solution — pairing would cost more than leaving both spikes
//! unpaired — so no explicit pairing window is applied.

use crate::error::{Error, Result};
use crate::raster::Raster;

/// Strictly increasing spike times of a single neuron.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeTimes(Vec<usize>);

impl SpikeTimes {
    /// Validate that `times` is strictly increasing.
    pub fn new(times: Vec<usize>) -> Result<Self> {
        for (pos, pair) in times.windows(2).enumerate() {
            if pair[1] <= pair[0] {
                return Err(Error::UnsortedSpikeTimes { neuron: 0, position: pos + 1 });
            }
        }
        Ok(SpikeTimes(times))
    }

    /// Extract one neuron's spike times from a raster (sorted by construction).
    pub fn from_raster(raster: &Raster, neuron: usize) -> Self {
        SpikeTimes(raster.spike_times(neuron))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Outcome of pairing one neuron's reference and observed trains.
///
/// `pairs` holds 0-based `(ref_index, obs_index)` pairs, ascending in both
/// components (the alignment is order-preserving). `total_cost` equals the
/// sum of temporal differences over pairs plus `a_cap` per unpaired spike.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingResult {
    pub pairs: Vec<(usize, usize)>,
    pub unpaired_ref: Vec<usize>,
    pub unpaired_obs: Vec<usize>,
    pub total_cost: u64,
}

/// Pair spikes optimally under the `a_cap` cost cap.
///
/// Tie-breaking during backtracking uses fixed argument precedence:
/// pair > skip-ref > skip-obs > skip-both. Ties can change which pairs are
/// reported but never `total_cost`.
pub fn pair_spikes(reference: &SpikeTimes, observed: &SpikeTimes, a_cap: u64) -> Result<PairingResult> {
    if a_cap == 0 {
        return Err(Error::InvalidParam { name: "a_cap", reason: "must be positive".into() });
    }
    let rt = reference.as_slice();
    let ot = observed.as_slice();
    let (n, m) = (rt.len(), ot.len());
    let width = m + 1;

    // cost matrix, 1-based in both spike indices
    let mut cost = vec![0u64; (n + 1) * width];
    for l in 0..=m {
        cost[l] = l as u64 * a_cap;
    }
    for k in 1..=n {
        cost[k * width] = k as u64 * a_cap;
        for l in 1..=m {
            let d = rt[k - 1].abs_diff(ot[l - 1]) as u64;
            let pair = cost[(k - 1) * width + (l - 1)] + d;
            let skip_ref = cost[(k - 1) * width + l] + a_cap;
            let skip_obs = cost[k * width + (l - 1)] + a_cap;
            let skip_both = cost[(k - 1) * width + (l - 1)] + 2 * a_cap;
            cost[k * width + l] = pair.min(skip_ref).min(skip_obs).min(skip_both);
        }
    }

    let mut pairs = Vec::new();
    let mut unpaired_ref = Vec::new();
    let mut unpaired_obs = Vec::new();
    let (mut k, mut l) = (n, m);
    while k > 0 && l > 0 {
        let here = cost[k * width + l];
        let d = rt[k - 1].abs_diff(ot[l - 1]) as u64;
        if here == cost[(k - 1) * width + (l - 1)] + d {
            pairs.push((k - 1, l - 1));
            k -= 1;
            l -= 1;
        } else if here == cost[(k - 1) * width + l] + a_cap {
            unpaired_ref.push(k - 1);
            k -= 1;
        } else if here == cost[k * width + (l - 1)] + a_cap {
            unpaired_obs.push(l - 1);
            l -= 1;
        } else {
            unpaired_ref.push(k - 1);
            unpaired_obs.push(l - 1);
            k -= 1;
            l -= 1;
        }
    }
    unpaired_ref.extend((0..k).rev());
    unpaired_obs.extend((0..l).rev());

    pairs.reverse();
    unpaired_ref.reverse();
    unpaired_obs.reverse();

    Ok(PairingResult { pairs, unpaired_ref, unpaired_obs, total_cost: cost[n * width + m] })
}

/// Pair every neuron of two same-shape rasters independently.
pub fn unpaired_report(reference: &Raster, observed: &Raster, a_cap: u64) -> Result<Vec<PairingResult>> {
    if reference.n_neurons() != observed.n_neurons() || reference.n_steps() != observed.n_steps() {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", reference.n_neurons(), reference.n_steps()),
            found: format!("{}x{}", observed.n_neurons(), observed.n_steps()),
        });
    }
    (0..reference.n_neurons())
        .map(|i| {
            pair_spikes(
                &SpikeTimes::from_raster(reference, i),
                &SpikeTimes::from_raster(observed, i),
                a_cap,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use proptest::prelude::*;

    fn times(ts: &[usize]) -> SpikeTimes {
        SpikeTimes::new(ts.to_vec()).unwrap()
    }

    /// Minimum cost over all monotone partial matchings, by enumerating the
    /// k-subsets of each side and matching them in order. Independent of the
    /// DP recursion.
    fn brute_force_cost(rt: &[usize], ot: &[usize], a_cap: u64) -> u64 {
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                if cur.len() == k {
                    out.push(cur.clone());
                    return;
                }
                for i in start..n {
                    cur.push(i);
                    rec(i + 1, n, k, cur, out);
                    cur.pop();
                }
            }
            let mut out = Vec::new();
            rec(0, n, k, &mut Vec::new(), &mut out);
            out
        }
        let (n, m) = (rt.len(), ot.len());
        let mut best = (n + m) as u64 * a_cap;
        for k in 1..=n.min(m) {
            for a in subsets(n, k) {
                for b in subsets(m, k) {
                    let matched: u64 = a
                        .iter()
                        .zip(&b)
                        .map(|(&ka, &lb)| rt[ka].abs_diff(ot[lb]) as u64)
                        .sum();
                    let cost = matched + (n + m - 2 * k) as u64 * a_cap;
                    best = best.min(cost);
                }
            }
        }
        best
    }

    #[test]
    fn empty_trains_cost_zero() {
        let r = pair_spikes(&times(&[]), &times(&[]), 15).unwrap();
        assert_eq!(r.total_cost, 0);
        assert!(r.pairs.is_empty() && r.unpaired_ref.is_empty() && r.unpaired_obs.is_empty());
    }

    #[test]
    fn identical_single_spikes_pair_for_free() {
        let r = pair_spikes(&times(&[5]), &times(&[5]), 15).unwrap();
        assert_eq!(r.pairs, vec![(0, 0)]);
        assert_eq!(r.total_cost, 0);
    }

    #[test]
    fn far_spikes_both_unpaired() {
        // pairing would cost 95; leaving both unpaired costs 2 * 15 = 30
        let r = pair_spikes(&times(&[5]), &times(&[100]), 15).unwrap();
        assert_eq!(r.total_cost, 30);
        assert_eq!(r.unpaired_ref, vec![0]);
        assert_eq!(r.unpaired_obs, vec![0]);
        assert!(r.pairs.is_empty());
    }

    #[test]
    fn near_pair_plus_unpaired_ref() {
        let r = pair_spikes(&times(&[10, 20]), &times(&[12]), 15).unwrap();
        assert_eq!(r.pairs, vec![(0, 0)]);
        assert_eq!(r.unpaired_ref, vec![1]);
        assert_eq!(r.total_cost, 17);
        assert_eq!(brute_force_cost(&[10, 20], &[12], 15), 17);
    }

    #[test]
    fn zero_a_cap_rejected() {
        assert!(pair_spikes(&times(&[1]), &times(&[2]), 0).is_err());
    }

    #[test]
    fn unsorted_times_rejected() {
        assert!(SpikeTimes::new(vec![3, 3]).is_err());
        assert!(SpikeTimes::new(vec![5, 2]).is_err());
    }

    #[test]
    fn cost_identity_holds() {
        let reference = times(&[2, 9, 14, 40, 41]);
        let observed = times(&[1, 16, 45, 99]);
        let r = pair_spikes(&reference, &observed, 15).unwrap();
        let paired: u64 = r
            .pairs
            .iter()
            .map(|&(k, l)| reference.as_slice()[k].abs_diff(observed.as_slice()[l]) as u64)
            .sum();
        let unpaired = (r.unpaired_ref.len() + r.unpaired_obs.len()) as u64;
        assert_eq!(r.total_cost, paired + 15 * unpaired);
        // pairs + unpaired partition both sides
        assert_eq!(r.pairs.len() + r.unpaired_ref.len(), reference.len());
        assert_eq!(r.pairs.len() + r.unpaired_obs.len(), observed.len());
    }

    #[test]
    fn matches_brute_force_on_random_pairs() {
        let mut rng = SeededRng::new(0xACE);
        for _ in 0..300 {
            let gen = |rng: &mut SeededRng| {
                let k = rng.index(7);
                let mut ts: Vec<usize> = (0..k).map(|_| rng.index(120)).collect();
                ts.sort_unstable();
                ts.dedup();
                ts
            };
            let rt = gen(&mut rng);
            let ot = gen(&mut rng);
            let dp = pair_spikes(&times(&rt), &times(&ot), 15).unwrap();
            assert_eq!(dp.total_cost, brute_force_cost(&rt, &ot, 15), "ref {rt:?} obs {ot:?}");
        }
    }

    #[test]
    fn appending_far_spike_adds_exactly_a_cap() {
        let base = times(&[10, 30, 55]);
        let c0 = pair_spikes(&base, &base, 15).unwrap().total_cost;
        assert_eq!(c0, 0);
        let longer = times(&[10, 30, 55, 500]);
        let c1 = pair_spikes(&longer, &base, 15).unwrap().total_cost;
        assert_eq!(c1, 15);
    }

    #[test]
    fn report_on_identical_rasters_is_all_paired() {
        let r = Raster::from_spike_times(&[(0, 3), (1, 7), (2, 1), (2, 8)], 3, 10).unwrap();
        let rep = unpaired_report(&r, &r, 15).unwrap();
        for pr in rep {
            assert_eq!(pr.total_cost, 0);
            assert!(pr.unpaired_ref.is_empty() && pr.unpaired_obs.is_empty());
        }
    }

    #[test]
    fn report_against_silence_charges_a_cap_per_spike() {
        let r = Raster::from_spike_times(&[(0, 3), (1, 7), (2, 1), (2, 8)], 3, 10).unwrap();
        let silent = Raster::zeros(3, 10).unwrap();
        let rep = unpaired_report(&r, &silent, 15).unwrap();
        let total: u64 = rep.iter().map(|p| p.total_cost).sum();
        assert_eq!(total, 15 * 4);
        assert!(rep.iter().all(|p| p.unpaired_obs.is_empty()));
    }

    #[test]
    fn report_shape_mismatch_rejected() {
        let a = Raster::zeros(3, 10).unwrap();
        let b = Raster::zeros(4, 10).unwrap();
        assert!(unpaired_report(&a, &b, 15).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_total_cost(
            a in proptest::collection::btree_set(0usize..200, 0..8),
            b in proptest::collection::btree_set(0usize..200, 0..8),
        ) {
            let ta = times(&a.iter().copied().collect::<Vec<_>>());
            let tb = times(&b.iter().copied().collect::<Vec<_>>());
            let fwd = pair_spikes(&ta, &tb, 15).unwrap();
            let rev = pair_spikes(&tb, &ta, 15).unwrap();
            prop_assert_eq!(fwd.total_cost, rev.total_cost);
        }

        #[test]
        fn pairs_are_monotone_and_partition(
            a in proptest::collection::btree_set(0usize..200, 0..8),
            b in proptest::collection::btree_set(0usize..200, 0..8),
        ) {
            let ta = times(&a.iter().copied().collect::<Vec<_>>());
            let tb = times(&b.iter().copied().collect::<Vec<_>>());
            let r = pair_spikes(&ta, &tb, 15).unwrap();
            for w in r.pairs.windows(2) {
                prop_assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1);
            }
            let mut ref_seen: Vec<usize> = r.pairs.iter().map(|p| p.0).chain(r.unpaired_ref.iter().copied()).collect();
            ref_seen.sort_unstable();
            prop_assert_eq!(ref_seen, (0..ta.len()).collect::<Vec<_>>());
            let mut obs_seen: Vec<usize> = r.pairs.iter().map(|p| p.1).chain(r.unpaired_obs.iter().copied()).collect();
            obs_seen.sort_unstable();
            prop_assert_eq!(obs_seen, (0..tb.len()).collect::<Vec<_>>());
        }
    }
}
