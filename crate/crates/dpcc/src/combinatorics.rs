//! Exact integer arithmetic and colexicographic subset indexing.
//!
//! Subsets of `{1..n}` of fixed cardinality `t` are ordered colexicographically:
//! sorted tuples compared from the largest element down. Ranks are contiguous in
//! `[0, C(n,t))` and rank/unrank are exact inverses.

use num::{BigRational, BigUint, One, Zero};

use crate::{Error, Result};

/// `C(n, k)` as an arbitrary-precision integer. Returns 0 when `k < 0` or `k > n`.
///
/// The zero convention matters: rate formulas contain terms like `C(NK-N, t+1)`
/// that must vanish once `t+1` exceeds `NK-N`.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 1..=k {
        // exact at every step: the running value is C(n-k+i, i)
        acc = acc * (n - k + i) / i;
    }
    acc
}

/// `C(n, k)` as a machine integer, `None` on overflow. Used for indexing, where
/// subpacketizations must fit in memory anyway.
pub fn binomial_usize(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc.checked_mul((n - k) as u128 + i)? / i;
    }
    usize::try_from(acc).ok()
}

/// Exact rational from integer numerator and denominator.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Rational from two big unsigned integers.
pub fn ratio_big(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Canonical index of a `t`-subset of `{1..n}` under colexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsetIndex {
    pub n: usize,
    pub t: usize,
    pub rank: usize,
}

/// Colex rank of a sorted subset of `{1..n}`.
pub fn rank_subset(n: usize, subset: &[usize]) -> Result<SubsetIndex> {
    let t = subset.len();
    let mut prev = 0usize;
    let mut rank = 0usize;
    for (i, &a) in subset.iter().enumerate() {
        if a <= prev || a > n {
            return Err(Error::BadSubset(format!(
                "element {a} at position {i} (universe {n})"
            )));
        }
        prev = a;
        rank += binomial_usize(a - 1, i + 1)
            .ok_or_else(|| Error::Overflow(format!("C({}, {})", a - 1, i + 1)))?;
    }
    Ok(SubsetIndex { n, t, rank })
}

/// Sorted subset with the given colex rank. Inverse of [`rank_subset`].
pub fn unrank_subset(n: usize, t: usize, rank: usize) -> Result<Vec<usize>> {
    let total = binomial_usize(n, t).ok_or_else(|| Error::Overflow(format!("C({n}, {t})")))?;
    if rank >= total {
        return Err(Error::RankOutOfRange { n, t, rank });
    }
    let mut rank = rank;
    let mut out = vec![0usize; t];
    let mut upper = n;
    for i in (1..=t).rev() {
        // largest a with C(a-1, i) <= rank
        let mut a = i;
        for cand in (i..=upper).rev() {
            if binomial_usize(cand - 1, i).expect("bounded by C(n,t)") <= rank {
                a = cand;
                break;
            }
        }
        rank -= binomial_usize(a - 1, i).expect("bounded by C(n,t)");
        out[i - 1] = a;
        upper = a - 1;
    }
    Ok(out)
}

/// Iterator over all `t`-subsets of `{1..n}` in colexicographic order.
pub struct ColexSubsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl ColexSubsets {
    pub fn new(n: usize, t: usize) -> Self {
        let current = if t <= n {
            Some((1..=t).collect())
        } else {
            None
        };
        ColexSubsets { n, current }
    }
}

impl Iterator for ColexSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.take()?;
        let t = cur.len();
        // colex successor: bump the smallest element that has room before its
        // successor, reset everything below it
        let mut next = None;
        for i in 0..t {
            let cap = if i + 1 < t { cur[i + 1] } else { self.n + 1 };
            if cur[i] + 1 < cap {
                let mut s = cur.clone();
                s[i] += 1;
                for (j, slot) in s.iter_mut().enumerate().take(i) {
                    *slot = j + 1;
                }
                next = Some(s);
                break;
            }
        }
        self.current = next;
        Some(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::ToPrimitive;
    use proptest::prelude::*;

    #[test]
    fn binomial_small() {
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
        assert_eq!(binomial(2, 3), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(5, -1), BigUint::zero());
    }

    /// Pascal-triangle oracle, independent of the multiplicative formula.
    fn pascal_row(n: usize) -> Vec<u64> {
        let mut row = vec![1u64];
        for _ in 0..n {
            let mut next = vec![1u64];
            for w in row.windows(2) {
                next.push(w[0] + w[1]);
            }
            next.push(1);
            row = next;
        }
        row
    }

    #[test]
    fn binomial_matches_pascal_oracle() {
        assert_eq!(pascal_row(20)[10], 184756);
        assert_eq!(binomial(20, 10).to_u64(), Some(184756));
        for n in 0..=20u64 {
            let row = pascal_row(n as usize);
            for k in 0..=n {
                assert_eq!(binomial(n, k as i64).to_u64(), Some(row[k as usize]));
            }
        }
    }

    #[test]
    fn pascal_identity_up_to_64() {
        for n in 1..=64u64 {
            for k in 0..=n as i64 {
                assert_eq!(
                    binomial(n, k),
                    binomial(n - 1, k) + binomial(n - 1, k - 1),
                    "n={n} k={k}"
                );
            }
        }
    }

    /// Enumeration oracle: all t-subsets in colex order via sorting.
    fn colex_oracle(n: usize, t: usize) -> Vec<Vec<usize>> {
        let mut all: Vec<Vec<usize>> = (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == t)
            .map(|m| (1..=n).filter(|i| m >> (i - 1) & 1 == 1).collect())
            .collect();
        all.sort_by(|a, b| {
            let ra: Vec<usize> = a.iter().rev().cloned().collect();
            let rb: Vec<usize> = b.iter().rev().cloned().collect();
            ra.cmp(&rb)
        });
        all
    }

    #[test]
    fn rank_matches_colex_enumeration() {
        let oracle = colex_oracle(4, 2);
        assert_eq!(rank_subset(4, &[1, 2]).unwrap().rank, 0);
        assert_eq!(rank_subset(4, &[3, 4]).unwrap().rank, 5);
        assert_eq!(rank_subset(4, &[1, 4]).unwrap().rank, 3);
        for (r, s) in oracle.iter().enumerate() {
            assert_eq!(rank_subset(4, s).unwrap().rank, r);
            assert_eq!(&unrank_subset(4, 2, r).unwrap(), s);
        }
    }

    #[test]
    fn unrank_edge_cases() {
        assert_eq!(unrank_subset(4, 2, 0).unwrap(), vec![1, 2]);
        assert_eq!(unrank_subset(4, 4, 0).unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(unrank_subset(4, 0, 0).unwrap(), Vec::<usize>::new());
        assert!(matches!(
            unrank_subset(4, 2, 6),
            Err(Error::RankOutOfRange { .. })
        ));
    }

    #[test]
    fn rank_rejects_bad_subsets() {
        assert!(rank_subset(4, &[2, 2]).is_err());
        assert!(rank_subset(4, &[1, 5]).is_err());
        assert!(rank_subset(4, &[3, 1]).is_err());
    }

    #[test]
    fn roundtrip_exhaustive_up_to_12() {
        for n in 0..=12 {
            for t in 0..=n {
                let total = binomial_usize(n, t).unwrap();
                for rank in 0..total {
                    let s = unrank_subset(n, t, rank).unwrap();
                    assert_eq!(rank_subset(n, &s).unwrap().rank, rank);
                }
            }
        }
    }

    #[test]
    fn colex_iterator_agrees_with_unrank() {
        for n in 0..=8 {
            for t in 0..=n {
                let subsets: Vec<_> = ColexSubsets::new(n, t).collect();
                assert_eq!(subsets.len(), binomial_usize(n, t).unwrap());
                for (r, s) in subsets.iter().enumerate() {
                    assert_eq!(&unrank_subset(n, t, r).unwrap(), s);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn rational_inverse(a in 1i64..1000, b in 1i64..1000) {
            let x = ratio(a, b);
            prop_assert_eq!(&x * ratio(b, a), ratio(1, 1));
        }

        #[test]
        fn roundtrip_random(n in 1usize..20, t_frac in 0.0f64..1.0, r_frac in 0.0f64..1.0) {
            let t = (t_frac * n as f64) as usize;
            let total = binomial_usize(n, t).unwrap();
            let rank = ((r_frac * total as f64) as usize).min(total - 1);
            let s = unrank_subset(n, t, rank).unwrap();
            prop_assert_eq!(rank_subset(n, &s).unwrap().rank, rank);
        }
    }
}
