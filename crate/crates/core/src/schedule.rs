//! Branching and block schedules for the rainbow trees.
//!
//! * pairs: `b_0 = 1`, `b_l` the least power of two `>= 2^(l+3) (|sigma| + l)`.
//!   Level `l` nodes have `b_(l+1)` children, so level `l` holds at most
//!   `b_bar(l) = b_0 b_1 ... b_l` nodes.
//! * quadruples: `c_k` the least power of two `>= 2^(k+3) C(k, 2)`; `c_0 = c_1 = 1`.
//!   A node `tau` branches `c_(|sigma| + |tau|)` ways.
//! * blocks: `h(k) = k` for `k <= 2`, else `h(k-1)` plus the least power of two
//!   `>= 2^(k-1) (k-1)(k-2)/2`. Block `k` is `[h(k), h(k+1))`.

use serde::{Deserialize, Serialize};

use crate::tuple::binomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    PairsB,
    QuadrupleC,
    BlockH,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSchedule {
    pub kind: ScheduleKind,
    pub sigma_len: usize,
    pub depth: usize,
    /// `b_0..=b_(depth+1)`, `c_0..=c_(sigma_len+depth)` or `h(0)..=h(depth)`.
    pub values: Vec<u64>,
}

/// Least power of two `>= x`; `1` for `x = 0`.
pub fn pow2_ceil(x: u128) -> u128 {
    x.max(1).next_power_of_two()
}

fn clamp64(x: u128) -> u64 {
    u64::try_from(x).unwrap_or(u64::MAX)
}

pub fn pair_branching(sigma_len: usize, l: usize) -> u64 {
    if l == 0 {
        return 1;
    }
    clamp64(pow2_ceil((1u128 << (l + 3).min(120)) * (sigma_len + l) as u128))
}

pub fn quadruple_branching(k: usize) -> u64 {
    clamp64(pow2_ceil((1u128 << (k + 3).min(120)) * binomial(k, 2) as u128))
}

pub fn block_boundaries(depth: usize) -> Vec<u64> {
    let mut h: Vec<u64> = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        let v = if k <= 2 {
            k as u64
        } else {
            let need = (1u128 << (k - 1).min(120)) * ((k - 1) * (k - 2) / 2) as u128;
            h[k - 1].saturating_add(clamp64(pow2_ceil(need)))
        };
        h.push(v);
    }
    h
}

pub fn compute_schedule(kind: ScheduleKind, sigma_len: usize, depth: usize) -> BoundSchedule {
    let values = match kind {
        ScheduleKind::PairsB => (0..=depth + 1).map(|l| pair_branching(sigma_len, l)).collect(),
        ScheduleKind::QuadrupleC => (0..=sigma_len + depth).map(quadruple_branching).collect(),
        ScheduleKind::BlockH => block_boundaries(depth),
    };
    BoundSchedule {
        kind,
        sigma_len,
        depth,
        values,
    }
}

impl BoundSchedule {
    /// Children per node at `level` (tree kinds only).
    pub fn branching(&self, level: usize) -> u64 {
        match self.kind {
            ScheduleKind::PairsB => self
                .values
                .get(level + 1)
                .copied()
                .unwrap_or_else(|| pair_branching(self.sigma_len, level + 1)),
            ScheduleKind::QuadrupleC => self
                .values
                .get(self.sigma_len + level)
                .copied()
                .unwrap_or_else(|| quadruple_branching(self.sigma_len + level)),
            ScheduleKind::BlockH => {
                let h = block_boundaries(level + 1);
                h[level + 1] - h[level]
            }
        }
    }

    /// Maximum number of nodes at `level`: the product of the branchings above it.
    pub fn capacity(&self, level: usize) -> u128 {
        (0..level).fold(1u128, |acc, j| acc.saturating_mul(self.branching(j) as u128))
    }

    /// `b_l` for the pairs schedule.
    pub fn b(&self, l: usize) -> u64 {
        pair_branching(self.sigma_len, l)
    }

    /// `b_bar(l) = b_0 b_1 ... b_l`, the level-`l` capacity of the pairs tree.
    pub fn b_bar(&self, l: usize) -> u128 {
        (0..=l).fold(1u128, |acc, i| acc.saturating_mul(self.b(i) as u128))
    }

    /// `h(k)`.
    pub fn h(&self, k: usize) -> u64 {
        block_boundaries(k)[k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_schedule_values() {
        // 2^4 * 1 = 16, 2^5 * 2 = 64, 2^6 * 3 = 192 -> 256.
        let s = compute_schedule(ScheduleKind::PairsB, 0, 3);
        assert_eq!(s.values, vec![1, 16, 64, 256, pair_branching(0, 4)]);
        assert_eq!(s.b_bar(2), 1024);
        assert_eq!(s.capacity(2), 1024);
        assert_eq!(s.capacity(1), 16);
        assert_eq!(s.branching(0), 16);
        // sigma_len 2: 2^4 * 3 = 48 -> 64.
        assert_eq!(pair_branching(2, 1), 64);
    }

    #[test]
    fn block_schedule_values() {
        let s = compute_schedule(ScheduleKind::BlockH, 0, 6);
        assert_eq!(s.values, vec![0, 1, 2, 6, 38, 166, 678]);
        assert_eq!(s.h(5), 166);
        assert_eq!(s.branching(2), 4);
        assert_eq!(s.capacity(3), 4);
    }

    #[test]
    fn quadruple_schedule_values() {
        let s = compute_schedule(ScheduleKind::QuadrupleC, 2, 2);
        assert_eq!(s.values, vec![1, 1, 32, 256, quadruple_branching(4)]);
        assert_eq!(s.branching(0), 32);
        assert_eq!(s.branching(1), 256);
        // 2^7 * 6 = 768 -> 1024.
        assert_eq!(quadruple_branching(4), 1024);
    }

    #[test]
    fn branchings_are_powers_of_two() {
        for sigma_len in 0..6 {
            for l in 1..12 {
                assert!(pair_branching(sigma_len, l).is_power_of_two());
                let b = pair_branching(sigma_len, l) as u128;
                assert!(b >= (1u128 << (l + 3)) * (sigma_len + l) as u128);
                assert!(b < 2 * (1u128 << (l + 3)) * (sigma_len + l) as u128);
            }
        }
        for k in 0..12 {
            assert!(quadruple_branching(k).is_power_of_two());
        }
    }
}
