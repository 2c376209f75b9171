use std::collections::HashMap;

use super::state::{LevelIndex, PathConfig};
use crate::characters::SignaturePartition;
use crate::chebyshev_jacobi::HalfInt;
use crate::error::{Error, Result};

pub const DEFAULT_STATE_CAP: usize = 200_000;

/// Generator of the growth process on paths ending at a fixed level, restricted
/// to paths whose parts are all <= `bound`. The diagonal carries the full exit
/// rate, so mass that would leave the truncated set is lost; rows where that
/// happens are flagged in `boundary`.
#[derive(Debug, Clone)]
pub struct TruncatedGenerator {
    pub top: LevelIndex,
    pub bound: u64,
    pub states: Vec<PathConfig>,
    pub off: Vec<Vec<(usize, f64)>>,
    pub diag: Vec<f64>,
    pub boundary: Vec<bool>,
    index: HashMap<PathConfig, usize>,
}

impl TruncatedGenerator {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, p: &PathConfig) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn rate(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        self.off[i].iter().filter(|e| e.0 == j).map(|e| e.1).sum()
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.diag[i] + self.off[i].iter().map(|e| e.1).sum::<f64>()
    }

    /// Distribution concentrated on one path.
    pub fn delta(&self, p: &PathConfig) -> Result<Vec<f64>> {
        let i = self
            .index_of(p)
            .ok_or_else(|| Error::InvalidParameter("path outside the truncated state space".into()))?;
        let mut v = vec![0.0; self.len()];
        v[i] = 1.0;
        Ok(v)
    }
}

fn with_part(path: &PathConfig, changes: &[(usize, usize, u64)]) -> PathConfig {
    let mut levels: Vec<Vec<u64>> = path.levels().iter().map(|l| l.parts().to_vec()).collect();
    for &(row, k, v) in changes {
        levels[row][k] = v;
    }
    let levels = levels
        .into_iter()
        .map(|v| SignaturePartition::new(v).unwrap_or_else(|_| SignaturePartition::zero(0)))
        .collect();
    PathConfig::from_unchecked(levels)
}

/// All transitions out of `path` in partition coordinates, with their rates.
/// A move raises (or lowers) one part on a run of consecutive levels; the part
/// index is fixed for raises and shifts by one per level for lowerings.
/// Candidates that are not paths are dropped, which is how blocking and the
/// maximal push come out.
fn moves(path: &PathConfig) -> Vec<(PathConfig, f64)> {
    let lv = path.levels();
    let rows = lv.len();
    let mut out = Vec::new();
    for r0 in 0..rows {
        let level0 = LevelIndex::from_row(r0 + 1).unwrap();
        for k in 0..level0.n {
            let v = lv[r0].parts()[k];
            // raise lambda_k on rows r0..=r1
            let mut changes = Vec::new();
            for (r, part) in lv.iter().enumerate().skip(r0) {
                if part.parts()[k] != v {
                    break;
                }
                changes.push((r, k, v + 1));
                let cand = with_part(path, &changes);
                if cand.is_valid() {
                    let wall = level0.a == HalfInt::MinusHalf && k + 1 == level0.n && v == 0;
                    out.push((cand, if wall { 1.0 } else { 0.5 }));
                }
            }
            // lower lambda_{k+d} on rows r0 + d
            if v == 0 {
                continue;
            }
            let mut changes = Vec::new();
            for (d, part) in lv.iter().enumerate().skip(r0).map(|(r, p)| (r - r0, p)) {
                if part.parts().get(k + d) != Some(&v) {
                    break;
                }
                changes.push((r0 + d, k + d, v - 1));
                let cand = with_part(path, &changes);
                if cand.is_valid() {
                    out.push((cand, 0.5));
                }
            }
        }
    }
    out
}

pub fn truncated_generator(n: usize, a: HalfInt, bound: u64) -> Result<TruncatedGenerator> {
    truncated_generator_capped(n, a, bound, DEFAULT_STATE_CAP)
}

pub fn truncated_generator_capped(n: usize, a: HalfInt, bound: u64, cap: usize) -> Result<TruncatedGenerator> {
    let top = LevelIndex::new(n, a)?;
    let states = PathConfig::enumerate(top, bound, cap)?;
    let index: HashMap<PathConfig, usize> = states.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let mut off = Vec::with_capacity(states.len());
    let mut diag = Vec::with_capacity(states.len());
    let mut boundary = Vec::with_capacity(states.len());
    for p in &states {
        let mut row: Vec<(usize, f64)> = Vec::new();
        let mut exit = 0.0;
        let mut leaked = false;
        for (q, r) in moves(p) {
            exit += r;
            match index.get(&q) {
                Some(&j) => match row.iter_mut().find(|e| e.0 == j) {
                    Some(e) => e.1 += r,
                    None => row.push((j, r)),
                },
                None => leaked = true,
            }
        }
        row.sort_by_key(|e| e.0);
        off.push(row);
        diag.push(-exit);
        boundary.push(leaked);
    }
    Ok(TruncatedGenerator { top, bound, states, off, diag, boundary, index })
}

#[derive(Debug, Clone)]
pub struct ExpmResult {
    pub dist: Vec<f64>,
    /// Initial mass minus final mass: what escaped through the truncation.
    pub defect: f64,
}

/// initial * e^{tQ} by uniformization: with q >= max exit rate,
/// e^{tQ} = sum_j Poisson(qt; j) (I + Q/q)^j.
pub fn expm_oracle(gen: &TruncatedGenerator, t: f64, initial: &[f64], tol: f64) -> Result<ExpmResult> {
    if initial.len() != gen.len() {
        return Err(Error::InvalidParameter("initial distribution has the wrong length".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time {t} must be >= 0")));
    }
    let mass0: f64 = initial.iter().sum();
    let q = gen.diag.iter().fold(0.0f64, |m, d| m.max(-d));
    if t == 0.0 || q == 0.0 {
        return Ok(ExpmResult { dist: initial.to_vec(), defect: 0.0 });
    }
    let lam = q * t;
    let jmax = (lam + 12.0 * lam.sqrt() + 60.0).ceil() as usize;
    let mut v = initial.to_vec();
    let mut out = vec![0.0; v.len()];
    let mut logw = -lam;
    let mut cum = 0.0;
    for j in 0..=jmax {
        if j > 0 {
            let mut nv = vec![0.0; v.len()];
            for (i, &vi) in v.iter().enumerate() {
                if vi == 0.0 {
                    continue;
                }
                nv[i] += vi * (1.0 + gen.diag[i] / q);
                for &(k, r) in &gen.off[i] {
                    nv[k] += vi * r / q;
                }
            }
            v = nv;
            logw += lam.ln() - (j as f64).ln();
        }
        let w = logw.exp();
        cum += w;
        for (o, x) in out.iter_mut().zip(&v) {
            *o += w * x;
        }
        if 1.0 - cum < 1e-17 && j as f64 > lam {
            break;
        }
    }
    let defect = mass0 - out.iter().sum::<f64>();
    if defect > tol {
        return Err(Error::MassDefect { defect, tol });
    }
    Ok(ExpmResult { dist: out, defect })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bottom_level_law;

    fn sp(v: &[u64]) -> SignaturePartition {
        SignaturePartition::new(v.to_vec()).unwrap()
    }

    fn one(v: u64) -> PathConfig {
        PathConfig::new(vec![sp(&[v])]).unwrap()
    }

    #[test]
    fn single_level_rates() {
        let g = truncated_generator(1, HalfInt::MinusHalf, 3).unwrap();
        assert_eq!(g.len(), 4);
        let i = |v| g.index_of(&one(v)).unwrap();
        assert_eq!(g.rate(i(0), i(1)), 1.0);
        for k in 1..=2 {
            assert_eq!(g.rate(i(k), i(k + 1)), 0.5);
            assert_eq!(g.rate(i(k), i(k - 1)), 0.5);
        }
        for k in 0..=2 {
            assert!(g.row_sum(i(k)).abs() < 1e-15);
            assert!(!g.boundary[i(k)]);
        }
        assert!(g.boundary[i(3)]);
        let d = g.delta(&one(2)).unwrap();
        assert_eq!(expm_oracle(&g, 0.0, &d, 0.0).unwrap().dist, d);
    }

    #[test]
    fn two_level_rates_follow_particle_picture() {
        let g = truncated_generator(1, HalfInt::PlusHalf, 4).unwrap();
        let p = |a, b| PathConfig::new(vec![sp(&[a]), sp(&[b])]).unwrap();
        let i = |q: &PathConfig| g.index_of(q).unwrap();
        // bottom particle at the wall pushes the upper one at rate 1
        assert_eq!(g.rate(i(&p(0, 0)), i(&p(1, 1))), 1.0);
        assert_eq!(g.rate(i(&p(0, 0)), i(&p(0, 1))), 0.5);
        // upper one alone: right at 1/2, left blocked
        assert_eq!(g.rate(i(&p(1, 1)), i(&p(1, 2))), 0.5);
        assert_eq!(g.rate(i(&p(1, 2)), i(&p(1, 1))), 0.5);
        // bottom left move drags nothing when the upper part is larger
        assert_eq!(g.rate(i(&p(1, 2)), i(&p(0, 2))), 0.5);
        assert_eq!(g.rate(i(&p(1, 1)), i(&p(0, 1))), 0.5);
        for k in 0..g.len() {
            if !g.boundary[k] {
                assert!(g.row_sum(k).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bottom_level_is_bessel() {
        let g = truncated_generator(1, HalfInt::MinusHalf, 30).unwrap();
        let r = expm_oracle(&g, 0.5, &g.delta(&one(0)).unwrap(), 1e-8).unwrap();
        assert!(r.defect >= -1e-15 && r.defect < 1e-12);
        for k in 0..=3 {
            let p = r.dist[g.index_of(&one(k)).unwrap()];
            assert!((p - bottom_level_law(k, 0.5)).abs() < 1e-13);
        }
    }

    #[test]
    fn leaks_are_reported() {
        let g = truncated_generator(1, HalfInt::MinusHalf, 3).unwrap();
        let d = g.delta(&one(0)).unwrap();
        let e = expm_oracle(&g, 4.0, &d, 1e-8).unwrap_err();
        assert!(matches!(e, Error::MassDefect { .. }));
        let r = expm_oracle(&g, 4.0, &d, 1.0).unwrap();
        assert!(r.defect > 0.0);
    }

    #[test]
    fn state_cap_is_enforced() {
        assert!(matches!(
            truncated_generator_capped(3, HalfInt::MinusHalf, 10, 1000),
            Err(Error::StateCap { .. })
        ));
    }
}
