//! Finitely recognizable sets of naturals: membership is arbitrary below a
//! threshold `d` and periodic with period `p` from `d` on.

use std::collections::BTreeSet;

/// A set sigma of natural numbers with `n ∈ sigma ⟺ n + p ∈ sigma` for all
/// `n ≥ d`. After `normalize`, `d` and `p` are the minimal such parameters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinRecSet {
    /// members below the threshold
    pub low_members: BTreeSet<u32>,
    /// threshold d
    pub d: u32,
    /// period p >= 1
    pub p: u32,
    /// residues mod p whose members are in the set from d on
    pub high_residues: BTreeSet<u32>,
}

impl FinRecSet {
    pub fn new(low: impl IntoIterator<Item = u32>, d: u32, p: u32, high: impl IntoIterator<Item = u32>) -> Self {
        assert!(p >= 1, "period must be at least 1");
        let low_members: BTreeSet<u32> = low.into_iter().filter(|&x| x < d).collect();
        let high_residues: BTreeSet<u32> = high.into_iter().map(|r| r % p).collect();
        let mut s = FinRecSet {
            low_members,
            d,
            p,
            high_residues,
        };
        s.normalize();
        s
    }

    pub fn contains(&self, n: u32) -> bool {
        if n < self.d {
            self.low_members.contains(&n)
        } else {
            self.high_residues.contains(&(n % self.p))
        }
    }

    /// Shrink `p` to the minimal period of the tail and `d` to the minimal
    /// threshold; membership is unchanged.
    pub fn normalize(&mut self) {
        // minimal period: the smallest divisor p' of p under which the
        // residue indicator is invariant (any period of a p-periodic word on
        // Z_p that is realized must divide p: shifts by gcd are generated)
        for cand in 1..=self.p {
            if self.p % cand != 0 {
                continue;
            }
            let ok = (0..self.p)
                .all(|r| self.high_residues.contains(&r) == self.high_residues.contains(&((r + cand) % self.p)));
            if ok {
                self.high_residues = self
                    .high_residues
                    .iter()
                    .map(|&r| r % cand)
                    .collect();
                self.p = cand;
                break;
            }
        }
        // minimal threshold: pull values whose membership already agrees with
        // the periodic tail out of the explicit low part
        while self.d > 0 {
            let n = self.d - 1;
            let low = self.low_members.contains(&n);
            let tail = self.high_residues.contains(&(n % self.p));
            if low != tail {
                break;
            }
            self.low_members.remove(&n);
            self.d = n;
        }
    }

    // --- builtins -------------------------------------------------------

    /// {n : n >= k}
    pub fn geq(k: u32) -> Self {
        FinRecSet::new([], k, 1, [0])
    }

    /// {k}
    pub fn eq(k: u32) -> Self {
        FinRecSet::new([k], k + 1, 1, [])
    }

    /// {0, ..., k}
    pub fn leq(k: u32) -> Self {
        FinRecSet::new(0..=k, k + 1, 1, [])
    }

    /// {n : n mod p in residues}
    pub fn modular(p: u32, residues: impl IntoIterator<Item = u32>) -> Self {
        FinRecSet::new([], 0, p, residues)
    }

    /// finite set
    pub fn finite(members: impl IntoIterator<Item = u32>) -> Self {
        let ms: BTreeSet<u32> = members.into_iter().collect();
        let d = ms.iter().next_back().map_or(0, |&m| m + 1);
        FinRecSet::new(ms, d, 1, [])
    }
}

/// Membership of a capped degree count: once a vertex has at least `d_phi`
/// qualifying edges, only the count's residue mod `p_phi` matters, and the
/// truth value is that of `residue + d_phi * p_phi`.
pub fn sigma_member_high(sigma: &FinRecSet, residue: u32, d_phi: u32, p_phi: u32) -> bool {
    debug_assert!(residue < p_phi.max(1));
    sigma.contains(residue + d_phi * p_phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_union_evens_from_four() {
        // {3} ∪ {even i >= 4}: d = 4, p = 2
        let s = FinRecSet::new([3], 4, 2, [0]);
        assert_eq!(s.d, 4);
        assert_eq!(s.p, 2);
        assert!(s.contains(3) && s.contains(4) && s.contains(6));
        assert!(!s.contains(0) && !s.contains(2) && !s.contains(5));
        assert!(sigma_member_high(&s, 0, 4, 2)); // 8 in sigma
        assert!(!sigma_member_high(&s, 1, 4, 2)); // 9 not in sigma
    }

    #[test]
    fn builtins_minimal() {
        let g1 = FinRecSet::geq(1);
        assert_eq!((g1.d, g1.p), (1, 1));
        assert!(!g1.contains(0) && g1.contains(1) && g1.contains(100));
        assert!(sigma_member_high(&g1, 0, 1, 1));

        let e2 = FinRecSet::eq(2);
        assert_eq!((e2.d, e2.p), (3, 1));
        assert!(e2.contains(2) && !e2.contains(3) && !e2.contains(1));

        let even = FinRecSet::modular(2, [0]);
        assert!(even.contains(0) && !even.contains(1) && even.contains(4));

        // redundant representation collapses
        let all = FinRecSet::new([0, 1, 2], 3, 4, [0, 1, 2, 3]);
        assert_eq!((all.d, all.p), (0, 1));
        assert!(all.contains(7));
    }

    #[test]
    fn normalize_is_idempotent_and_preserves_membership() {
        let raw = FinRecSet {
            low_members: [1, 4].into(),
            d: 6,
            p: 6,
            high_residues: [0, 2, 3, 5].into(),
        };
        let mut s = raw.clone();
        s.normalize();
        let mut s2 = s.clone();
        s2.normalize();
        assert_eq!(s, s2);
        for n in 0..(raw.d + 2 * raw.p) {
            let want = if n < raw.d {
                raw.low_members.contains(&n)
            } else {
                raw.high_residues.contains(&(n % raw.p))
            };
            assert_eq!(s.contains(n), want, "n = {n}");
        }
    }
}
