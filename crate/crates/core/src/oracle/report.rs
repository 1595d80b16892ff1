use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tolerance::Tolerance;

/// Upper bound on the number of pure profiles any enumeration will visit.
pub const MAX_PROFILES: u128 = 1 << 22;

/// Exhaustive analysis of a finite normal-form game.
///
/// Profiles are numbered in lexicographic order of the strategy vector, with
/// player 1 as the most significant digit. Payoffs are stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    counts: Vec<usize>,
    payoffs: Vec<f64>,
    nash: Vec<usize>,
    optimal: Vec<usize>,
    maximin: Vec<f64>,
    minimax: Vec<f64>,
    tolerance: Tolerance,
}

pub(crate) fn profile_count(counts: &[usize], what: &'static str) -> Result<usize> {
    let mut total: u128 = 1;
    for &n in counts {
        total = total.saturating_mul(n as u128);
    }
    if total > MAX_PROFILES {
        return Err(Error::TooLarge {
            what,
            size: total,
            limit: MAX_PROFILES,
        });
    }
    Ok(total as usize)
}

impl EquilibriumReport {
    /// Tabulates `payoff` over every profile and analyses the table.
    pub fn from_fn<F>(counts: Vec<usize>, tolerance: Tolerance, mut payoff: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Result<Vec<f64>>,
    {
        let m = counts.len();
        if m == 0 || counts.contains(&0) {
            return Err(Error::InvalidProfile(
                "every player needs a strategy".into(),
            ));
        }
        let n = profile_count(&counts, "pure profiles")?;
        let mut payoffs = Vec::with_capacity(n * m);
        let mut digits = vec![0usize; m];
        for _ in 0..n {
            let v = payoff(&digits)?;
            if v.len() != m {
                return Err(Error::DimensionMismatch {
                    what: "profile payoff",
                    expected: m,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("profile payoff"));
            }
            payoffs.extend_from_slice(&v);
            for k in (0..m).rev() {
                digits[k] += 1;
                if digits[k] < counts[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        Ok(Self::analyze(counts, payoffs, tolerance))
    }

    fn analyze(counts: Vec<usize>, payoffs: Vec<f64>, tol: Tolerance) -> Self {
        let m = counts.len();
        let n = payoffs.len() / m;
        let mut nash_ok = vec![true; n];
        let mut guarded = vec![true; n];
        let mut maximin = vec![0.0; m];
        let mut minimax = vec![0.0; m];
        let mut stride = n;
        for k in 0..m {
            let nk = counts[k];
            stride /= nk;
            let others = n / nk;
            // best[o]: k's best reply value against opponents o
            // worst[s]: the least k can get when playing s
            let mut best = vec![f64::NEG_INFINITY; others];
            let mut worst = vec![f64::INFINITY; nk];
            for idx in 0..n {
                let (o, s) = split(idx, stride, nk);
                let v = payoffs[idx * m + k];
                best[o] = best[o].max(v);
                worst[s] = worst[s].min(v);
            }
            for idx in 0..n {
                let (o, s) = split(idx, stride, nk);
                let v = payoffs[idx * m + k];
                if tol.gt(best[o], v) {
                    nash_ok[idx] = false;
                }
                if tol.gt(v, worst[s]) {
                    guarded[idx] = false;
                }
            }
            maximin[k] = worst.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            minimax[k] = best.iter().copied().fold(f64::INFINITY, f64::min);
        }
        let nash: Vec<usize> = (0..n).filter(|&i| nash_ok[i]).collect();
        let optimal = nash.iter().copied().filter(|&i| guarded[i]).collect();
        EquilibriumReport {
            counts,
            payoffs,
            nash,
            optimal,
            maximin,
            minimax,
            tolerance: tol,
        }
    }

    pub fn players(&self) -> usize {
        self.counts.len()
    }

    pub fn strategy_counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn profile_count(&self) -> usize {
        self.payoffs.len() / self.counts.len()
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tolerance
    }

    pub fn payoff(&self, index: usize) -> &[f64] {
        let m = self.players();
        &self.payoffs[index * m..(index + 1) * m]
    }

    /// Strategy vector of a profile index.
    pub fn profile(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.players()];
        for k in (0..self.players()).rev() {
            out[k] = index % self.counts[k];
            index /= self.counts[k];
        }
        out
    }

    pub fn index_of(&self, profile: &[usize]) -> Option<usize> {
        if profile.len() != self.players() {
            return None;
        }
        let mut index = 0;
        for (&s, &n) in profile.iter().zip(&self.counts) {
            if s >= n {
                return None;
            }
            index = index * n + s;
        }
        Some(index)
    }

    /// Pure Nash profiles, ascending.
    pub fn nash(&self) -> &[usize] {
        &self.nash
    }

    /// Nash profiles at which no opponent deviation pushes any player below
    /// their equilibrium payoff.
    pub fn optimal(&self) -> &[usize] {
        &self.optimal
    }

    pub fn is_nash(&self, index: usize) -> bool {
        self.nash.binary_search(&index).is_ok()
    }

    pub fn is_optimal(&self, index: usize) -> bool {
        self.optimal.binary_search(&index).is_ok()
    }

    /// `max_{s_k} min_{s_-k} V_k`.
    pub fn maximin(&self) -> &[f64] {
        &self.maximin
    }

    /// `min_{s_-k} max_{s_k} V_k`.
    pub fn minimax(&self) -> &[f64] {
        &self.minimax
    }

    /// Maximin and minimax agree for every player.
    pub fn has_value(&self) -> bool {
        self.maximin
            .iter()
            .zip(&self.minimax)
            .all(|(&lo, &hi)| self.tolerance.eq(lo, hi))
    }

    /// Number of payoff vectors among `profiles` that differ beyond tolerance.
    pub fn distinct_payoffs(&self, profiles: &[usize]) -> usize {
        let mut reps: Vec<&[f64]> = Vec::new();
        for &i in profiles {
            let v = self.payoff(i);
            let seen = reps
                .iter()
                .any(|r| r.iter().zip(v).all(|(&a, &b)| self.tolerance.eq(a, b)));
            if !seen {
                reps.push(v);
            }
        }
        reps.len()
    }
}

/// Splits a profile index into (opponents index, own strategy).
fn split(idx: usize, stride: usize, nk: usize) -> (usize, usize) {
    let s = (idx / stride) % nk;
    let o = (idx / (stride * nk)) * stride + idx % stride;
    (o, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matching_pennies() -> EquilibriumReport {
        EquilibriumReport::from_fn(vec![2, 2], Tolerance::DEFAULT, |s| {
            let v = if s[0] == s[1] { 1.0 } else { -1.0 };
            Ok(vec![v, -v])
        })
        .unwrap()
    }

    #[test]
    fn pennies_have_no_pure_equilibrium() {
        let r = matching_pennies();
        assert!(r.nash().is_empty());
        assert_eq!(r.maximin(), [-1.0, -1.0]);
        assert_eq!(r.minimax(), [1.0, 1.0]);
        assert!(!r.has_value());
    }

    #[test]
    fn profile_numbering_is_lexicographic() {
        let r = EquilibriumReport::from_fn(vec![2, 3], Tolerance::DEFAULT, |s| {
            Ok(vec![s[0] as f64, s[1] as f64])
        })
        .unwrap();
        assert_eq!(r.profile(4), [1, 1]);
        assert_eq!(r.payoff(4), [1.0, 1.0]);
        assert_eq!(r.index_of(&[1, 2]), Some(5));
        assert_eq!(r.index_of(&[2, 0]), None);
        // both prefer their largest strategy
        assert_eq!(r.nash(), [5]);
        assert_eq!(r.optimal(), [5]);
    }

    #[test]
    fn nash_without_guarantee() {
        // coordination: (0,0) and (1,1) are Nash; the opponent can ruin either
        let r = EquilibriumReport::from_fn(vec![2, 2], Tolerance::DEFAULT, |s| {
            let v = if s[0] == s[1] { 1.0 } else { 0.0 };
            Ok(vec![v, v])
        })
        .unwrap();
        assert_eq!(r.nash(), [0, 3]);
        assert!(r.optimal().is_empty());
        assert_eq!(r.distinct_payoffs(r.nash()), 1);
    }

    #[test]
    fn guard_on_profile_count() {
        let err =
            EquilibriumReport::from_fn(vec![2; 30], Tolerance::DEFAULT, |_| Ok(vec![0.0; 30]));
        assert!(matches!(err, Err(Error::TooLarge { .. })));
    }
}
