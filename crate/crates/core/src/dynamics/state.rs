use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::characters::SignaturePartition;
use crate::chebyshev_jacobi::HalfInt;
use crate::error::{Error, Result};

/// A level (n, a) of the branching graph. Levels are totally ordered by
/// 2n + a, which is the same as ordering by the flat row m = 2n + a - 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelIndex {
    pub n: usize,
    pub a: HalfInt,
}

impl LevelIndex {
    pub fn new(n: usize, a: HalfInt) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("level n must be positive".into()));
        }
        Ok(Self { n, a })
    }

    pub fn from_row(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("row m must be positive".into()));
        }
        let a = if m % 2 == 1 { HalfInt::MinusHalf } else { HalfInt::PlusHalf };
        Ok(Self { n: m.div_ceil(2), a })
    }

    pub fn row(self) -> usize {
        2 * self.n - 1 + self.a.bit() as usize
    }

    pub fn distance(self, other: LevelIndex) -> usize {
        self.row().abs_diff(other.row())
    }

    pub fn next(self) -> LevelIndex {
        Self::from_row(self.row() + 1).expect("row >= 2")
    }

    pub fn prev(self) -> Option<LevelIndex> {
        Self::from_row(self.row() - 1).ok()
    }

    /// The relation (n0, a0) <= (n1, a1).
    pub fn precedes_eq(self, other: LevelIndex) -> bool {
        self.row() <= other.row()
    }

    pub fn parse(s: &str) -> Result<Self> {
        let (n, a) = s
            .split_once(',')
            .ok_or_else(|| Error::InvalidParameter(format!("level {s:?} must look like n,a")))?;
        let n = n
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad level index {n:?}")))?;
        Self::new(n, HalfInt::parse(a)?)
    }
}

impl PartialOrd for LevelIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LevelIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.row().cmp(&other.row())
    }
}

impl fmt::Display for LevelIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.a)
    }
}

/// (x, n, a) -> (y, m) = (2x + a + 1/2, 2n + a - 1/2).
pub fn iota(x: u64, level: LevelIndex) -> (u64, usize) {
    (2 * x + level.a.bit() as u64, level.row())
}

pub fn iota_inv(y: u64, m: usize) -> Result<(u64, LevelIndex)> {
    let level = LevelIndex::from_row(m)?;
    let bit = level.a.bit() as u64;
    if y % 2 != bit {
        return Err(Error::Domain(format!("y = {y} has the wrong parity for row {m}")));
    }
    Ok(((y - bit) / 2, level))
}

/// Particles y^m_k, k = 1..floor((m+1)/2), on rows m = 1..M.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParticleConfig {
    rows: Vec<Vec<i64>>,
}

pub fn packed_config(levels: usize) -> ParticleConfig {
    let rows = (1..=levels as i64)
        .map(|m| (1..=(m + 1) / 2).map(|k| m - 2 * k + 1).collect())
        .collect();
    ParticleConfig { rows }
}

impl ParticleConfig {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let c = Self { rows };
        c.validate()?;
        Ok(c)
    }

    pub fn levels(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// Row m, 1-based.
    pub fn row(&self, m: usize) -> &[i64] {
        &self.rows[m - 1]
    }

    /// y^m_k with 1-based m and k; None when the particle does not exist.
    pub fn get(&self, m: usize, k: usize) -> Option<i64> {
        if m == 0 || k == 0 {
            return None;
        }
        self.rows.get(m - 1).and_then(|r| r.get(k - 1)).copied()
    }

    pub(crate) fn set(&mut self, m: usize, k: usize, y: i64) {
        self.rows[m - 1][k - 1] = y;
    }

    pub fn particle_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_occupied(&self, y: i64, m: usize) -> bool {
        m >= 1 && m <= self.rows.len() && self.rows[m - 1].contains(&y)
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_rows(1, self.rows.len())
    }

    /// Checks rows lo..=hi and the interlacing between them and their neighbours.
    pub fn validate_rows(&self, lo: usize, hi: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let lo = lo.max(1);
        let hi = hi.min(self.rows.len());
        for m in lo..=hi {
            let r = &self.rows[m - 1];
            if r.len() != m.div_ceil(2) {
                return bad(format!("row {m} has {} particles, expected {}", r.len(), m.div_ceil(2)));
            }
            for (k, &y) in r.iter().enumerate() {
                if y < 0 || (y + m as i64) % 2 != 1 {
                    return bad(format!("y^{m}_{} = {y} has wrong sign or parity", k + 1));
                }
                if k > 0 && r[k - 1] <= y {
                    return bad(format!("row {m} is not strictly decreasing"));
                }
            }
        }
        for m in lo.saturating_sub(1).max(1)..=hi {
            if m + 1 > self.rows.len() {
                break;
            }
            let (low, up) = (&self.rows[m - 1], &self.rows[m]);
            for (k, &y) in low.iter().enumerate() {
                let below_ok = up.get(k + 1).is_none_or(|&z| z < y);
                if !(below_ok && y < up[k]) {
                    return bad(format!("interlacing broken between rows {m} and {} at k = {}", m + 1, k + 1));
                }
            }
        }
        Ok(())
    }

    pub fn to_path(&self) -> PathConfig {
        let levels = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let level = LevelIndex::from_row(i + 1).unwrap();
                let bit = level.a.bit();
                let n = level.n as i64;
                let parts = r
                    .iter()
                    .enumerate()
                    .map(|(k, &y)| ((y - bit) / 2 - n + k as i64 + 1) as u64)
                    .collect();
                SignaturePartition::new(parts).expect("valid configuration")
            })
            .collect();
        PathConfig { levels }
    }

    pub fn from_path(path: &PathConfig) -> ParticleConfig {
        let rows = path
            .levels
            .iter()
            .enumerate()
            .map(|(i, lam)| {
                let level = LevelIndex::from_row(i + 1).unwrap();
                let n = level.n as i64;
                lam.parts()
                    .iter()
                    .enumerate()
                    .map(|(k, &l)| 2 * (l as i64 + n - 1 - k as i64) + level.a.bit())
                    .collect()
            })
            .collect();
        ParticleConfig { rows }
    }
}

/// lambda < mu in the branching graph: lambda on a level directly below mu.
pub fn precedes(lam: &SignaturePartition, mu: &SignaturePartition) -> bool {
    let (l, u) = (lam.parts(), mu.parts());
    if !(u.len() == l.len() || u.len() == l.len() + 1) {
        return false;
    }
    l.iter()
        .enumerate()
        .all(|(i, &li)| li <= u[i] && u.get(i + 1).is_none_or(|&nx| nx <= li))
}

/// Multiplicity of lambda inside mu: 2 on an SO(2N+1) -> SO(2N) edge with
/// lambda_N > 0, otherwise 1 along an edge and 0 off the graph.
pub fn kappa(lam: &SignaturePartition, mu: &SignaturePartition) -> u32 {
    if !precedes(lam, mu) {
        return 0;
    }
    if lam.len() == mu.len() && lam.parts().last().copied().unwrap_or(0) > 0 {
        2
    } else {
        1
    }
}

/// lambda^{(1),-1/2} < lambda^{(1),+1/2} < ... < lambda^{(N),a}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathConfig {
    levels: Vec<SignaturePartition>,
}

impl PathConfig {
    pub fn new(levels: Vec<SignaturePartition>) -> Result<Self> {
        let p = Self { levels };
        if !p.is_valid() {
            return Err(Error::InvalidParameter("partitions do not form a path".into()));
        }
        Ok(p)
    }

    pub(crate) fn from_unchecked(levels: Vec<SignaturePartition>) -> Self {
        Self { levels }
    }

    pub fn is_valid(&self) -> bool {
        self.levels.iter().enumerate().all(|(i, l)| l.len() == (i + 2) / 2)
            && self.levels.windows(2).all(|w| precedes(&w[0], &w[1]))
    }

    pub fn packed(top: LevelIndex) -> Self {
        let levels = (1..=top.row()).map(|m| SignaturePartition::zero(m.div_ceil(2))).collect();
        Self { levels }
    }

    pub fn top(&self) -> LevelIndex {
        LevelIndex::from_row(self.levels.len()).expect("nonempty path")
    }

    pub fn levels(&self) -> &[SignaturePartition] {
        &self.levels
    }

    pub fn level(&self, l: LevelIndex) -> &SignaturePartition {
        &self.levels[l.row() - 1]
    }

    pub fn max_part(&self) -> u64 {
        self.levels.iter().map(SignaturePartition::first).max().unwrap_or(0)
    }

    /// All paths ending at level `top` with every part <= bound; fails once
    /// more than `cap` paths have been produced.
    pub fn enumerate(top: LevelIndex, bound: u64, cap: usize) -> Result<Vec<PathConfig>> {
        let rows = top.row();
        let mut out = Vec::new();
        let mut cur: Vec<SignaturePartition> = Vec::with_capacity(rows);
        fn above(lam: &[u64], grow: bool, bound: u64) -> Vec<Vec<u64>> {
            let len = if grow { lam.len() + 1 } else { lam.len() };
            let mut acc = vec![Vec::with_capacity(len)];
            for i in 0..len {
                let lo = if i < lam.len() { lam[i] } else { 0 };
                let hi = if i == 0 { bound } else { lam[i - 1] };
                let mut next = Vec::new();
                for v in &acc {
                    for x in lo..=hi {
                        let mut w = v.clone();
                        w.push(x);
                        next.push(w);
                    }
                }
                acc = next;
            }
            acc
        }
        fn rec(
            rows: usize,
            bound: u64,
            cap: usize,
            cur: &mut Vec<SignaturePartition>,
            out: &mut Vec<PathConfig>,
        ) -> Result<()> {
            if cur.len() == rows {
                if out.len() >= cap {
                    return Err(Error::StateCap { count: out.len() + 1, cap });
                }
                out.push(PathConfig { levels: cur.clone() });
                return Ok(());
            }
            let m = cur.len() + 1;
            let candidates = match cur.last() {
                None => (0..=bound).map(|x| vec![x]).collect(),
                Some(lam) => above(lam.parts(), m % 2 == 1, bound),
            };
            for c in candidates {
                cur.push(SignaturePartition::new(c).expect("nonincreasing by construction"));
                rec(rows, bound, cap, cur, out)?;
                cur.pop();
            }
            Ok(())
        }
        rec(rows, bound, cap, &mut cur, &mut out)?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sp(v: &[u64]) -> SignaturePartition {
        SignaturePartition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn level_order_and_rows() {
        let l = |n, a| LevelIndex::new(n, a).unwrap();
        let seq = [
            l(1, HalfInt::MinusHalf),
            l(1, HalfInt::PlusHalf),
            l(2, HalfInt::MinusHalf),
            l(2, HalfInt::PlusHalf),
        ];
        for (i, w) in seq.windows(2).enumerate() {
            assert!(w[0] < w[1]);
            assert_eq!(w[0].row(), i + 1);
            assert_eq!(w[0].next(), w[1]);
            assert_eq!(w[0].distance(w[1]), 1);
        }
        assert_eq!(seq[0].distance(seq[3]), 3);
        assert_eq!(LevelIndex::from_row(7).unwrap(), l(4, HalfInt::MinusHalf));
        assert!(LevelIndex::new(0, HalfInt::PlusHalf).is_err());
    }

    #[test]
    fn packed_rows() {
        let p = packed_config(4);
        assert_eq!(p.row(1), &[0]);
        assert_eq!(p.row(2), &[1]);
        assert_eq!(p.row(4), &[3, 1]);
        assert!(p.validate().is_ok());
        let path = p.to_path();
        assert!(path.is_valid());
        assert!(path.levels().iter().all(|l| l.parts().iter().all(|&x| x == 0)));
        assert_eq!(ParticleConfig::from_path(&path), p);
    }

    #[test]
    fn iota_examples() {
        let l1m = LevelIndex::new(1, HalfInt::MinusHalf).unwrap();
        let l1p = LevelIndex::new(1, HalfInt::PlusHalf).unwrap();
        assert_eq!(iota(0, l1m), (0, 1));
        assert_eq!(iota(2, l1p), (5, 2));
        assert!(iota_inv(4, 2).is_err());
        for x in 0..10 {
            for n in 1..6 {
                for a in HalfInt::BOTH {
                    let lev = LevelIndex::new(n, a).unwrap();
                    let (y, m) = iota(x, lev);
                    assert_eq!(iota_inv(y, m).unwrap(), (x, lev));
                }
            }
        }
    }

    #[test]
    fn interlacing_detects_violations() {
        let ok = ParticleConfig::new(vec![vec![2], vec![3], vec![4, 0]]).unwrap();
        assert_eq!(ok.to_path().levels()[2].parts(), &[1, 0]);
        assert!(ParticleConfig::new(vec![vec![2], vec![1]]).is_err());
        assert!(ParticleConfig::new(vec![vec![1]]).is_err());
        assert!(ParticleConfig::new(vec![vec![2], vec![3], vec![2, 0]]).is_err());
    }

    #[test]
    fn precedence_patterns() {
        assert!(precedes(&sp(&[1]), &sp(&[2])));
        assert!(!precedes(&sp(&[3]), &sp(&[2])));
        assert!(precedes(&sp(&[2]), &sp(&[3, 1])));
        assert!(!precedes(&sp(&[0]), &sp(&[3, 1])));
        assert_eq!(kappa(&sp(&[1]), &sp(&[2])), 2);
        assert_eq!(kappa(&sp(&[0]), &sp(&[2])), 1);
        assert_eq!(kappa(&sp(&[2]), &sp(&[3, 1])), 1);
    }

    #[test]
    fn enumeration_respects_cap() {
        let top = LevelIndex::new(2, HalfInt::MinusHalf).unwrap();
        let all = PathConfig::enumerate(top, 3, 1_000_000).unwrap();
        assert!(all.iter().all(|p| p.is_valid() && p.max_part() <= 3));
        let mut brute = 0;
        for a in 0..=3u64 {
            for b in 0..=3u64 {
                for c in 0..=3u64 {
                    for d in 0..=c {
                        let p = PathConfig::new(vec![sp(&[a]), sp(&[b]), sp(&[c, d])]);
                        brute += p.is_ok() as usize;
                    }
                }
            }
        }
        assert_eq!(all.len(), brute);
        assert!(matches!(PathConfig::enumerate(top, 3, 5), Err(Error::StateCap { .. })));
    }

    proptest! {
        #[test]
        fn path_particle_round_trip(seed in any::<u64>(), t in 0.0f64..3.0) {
            let (cfg, _) = crate::dynamics::simulate(t, 6, seed).unwrap();
            let path = cfg.to_path();
            prop_assert!(path.is_valid());
            prop_assert_eq!(ParticleConfig::from_path(&path), cfg);
        }
    }
}
