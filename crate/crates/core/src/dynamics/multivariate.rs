use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::{LevelIndex, PathConfig};
use super::transitions::{link, transition_t, Phi};
use crate::characters::SignaturePartition;
use crate::chebyshev_jacobi::QuadratureSpec;
use crate::error::{Error, Result};

pub type PathDistribution = BTreeMap<PathConfig, f64>;

const ZERO_TOL: f64 = 1e-15;

/// Partitions nu with |nu_i - lam_i| <= 1 for every i.
pub fn band_neighbors(lam: &SignaturePartition) -> Vec<SignaturePartition> {
    let mut acc: Vec<Vec<u64>> = vec![Vec::new()];
    for &l in lam.parts() {
        let mut next = Vec::with_capacity(acc.len() * 3);
        for v in &acc {
            for x in l.saturating_sub(1)..=l + 1 {
                if v.last().is_none_or(|&p| p >= x) {
                    let mut w = v.clone();
                    w.push(x);
                    next.push(w);
                }
            }
        }
        acc = next;
    }
    acc.into_iter().map(|v| SignaturePartition::new(v).unwrap()).collect()
}

fn require_linear(phi: &Phi) -> Result<()> {
    if !phi.is_banded() {
        return Err(Error::InvalidParameter("the sequential update needs a linear phi".into()));
    }
    Ok(())
}

fn clean(w: f64, what: &str) -> Result<f64> {
    if w < -1e-12 {
        return Err(Error::Degenerate(format!("negative weight {w:e} in {what}")));
    }
    Ok(if w.abs() < ZERO_TOL { 0.0 } else { w })
}

/// Conditional law of the new state on `level` given its old state `x` and the
/// new state `below` of the level underneath (None on the bottom level).
fn conditional(
    level: LevelIndex,
    phi: &Phi,
    x: &SignaturePartition,
    below: Option<&SignaturePartition>,
) -> Result<Vec<(SignaturePartition, f64)>> {
    let q = QuadratureSpec::default();
    let mut out = Vec::new();
    let mut total = 0.0;
    for z in band_neighbors(x) {
        let mut w = clean(transition_t(level.n, level.a, phi, x, &z, &q)?, "T")?;
        if w == 0.0 {
            continue;
        }
        if let Some(b) = below {
            w *= link(level, &z, b)?;
        }
        if w > 0.0 {
            total += w;
            out.push((z, w));
        }
    }
    if !(total > 0.0) {
        return Err(Error::ForbiddenTransition(format!(
            "conditional denominator vanishes at level {level} from {:?}",
            x.parts()
        )));
    }
    for (_, w) in &mut out {
        *w /= total;
    }
    Ok(out)
}

/// Exact one-step law of the sequential update started from `path`.
pub fn step_distribution(path: &PathConfig, phi: &Phi) -> Result<PathDistribution> {
    require_linear(phi)?;
    let rows = path.levels().len();
    let mut out = PathDistribution::new();
    fn rec(
        path: &PathConfig,
        phi: &Phi,
        rows: usize,
        cur: &mut Vec<SignaturePartition>,
        w: f64,
        out: &mut PathDistribution,
    ) -> Result<()> {
        let m = cur.len();
        if m == rows {
            *out.entry(PathConfig::from_unchecked(cur.clone())).or_insert(0.0) += w;
            return Ok(());
        }
        let level = LevelIndex::from_row(m + 1)?;
        for (z, p) in conditional(level, phi, &path.levels()[m], cur.last())? {
            cur.push(z);
            rec(path, phi, rows, cur, w * p, out)?;
            cur.pop();
        }
        Ok(())
    }
    rec(path, phi, rows, &mut Vec::with_capacity(rows), 1.0, &mut out)?;
    Ok(out)
}

/// One sequential-update step: the bottom level moves by T, each higher level
/// by the conditional law of the middle point of T followed by the link.
pub fn multivariate_step<R: Rng>(path: &PathConfig, phi: &Phi, rng: &mut R) -> Result<PathConfig> {
    require_linear(phi)?;
    let mut levels: Vec<SignaturePartition> = Vec::with_capacity(path.levels().len());
    for (i, x) in path.levels().iter().enumerate() {
        let level = LevelIndex::from_row(i + 1)?;
        let cond = conditional(level, phi, x, levels.last())?;
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = cond.len() - 1;
        for (j, (_, p)) in cond.iter().enumerate() {
            acc += p;
            if u < acc {
                pick = j;
                break;
            }
        }
        levels.push(cond[pick].0.clone());
    }
    Ok(PathConfig::from_unchecked(levels))
}

pub fn multivariate_step_seeded(
    n: usize,
    a: crate::chebyshev_jacobi::HalfInt,
    phi: &Phi,
    path: &PathConfig,
    seed: u64,
) -> Result<PathConfig> {
    let top = LevelIndex::new(n, a)?;
    if path.top() != top || !path.is_valid() {
        return Err(Error::InvalidParameter(format!("path must be a valid path ending at level {top}")));
    }
    multivariate_step(path, phi, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Pushes a distribution on paths through `steps` sequential updates.
pub fn evolve_distribution(init: &PathDistribution, phi: &Phi, steps: usize) -> Result<PathDistribution> {
    let mut cur = init.clone();
    for _ in 0..steps {
        let mut next = PathDistribution::new();
        for (p, w) in &cur {
            for (q, v) in step_distribution(p, phi)? {
                *next.entry(q).or_insert(0.0) += w * v;
            }
        }
        cur = next;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev_jacobi::HalfInt;
    use crate::dynamics::transitions::transition_t;

    fn sp(v: &[u64]) -> SignaturePartition {
        SignaturePartition::new(v.to_vec()).unwrap()
    }

    /// Product formula with the denominator taken from link-then-T.
    fn brute_force(path: &PathConfig, phi: &Phi) -> PathDistribution {
        let q = QuadratureSpec::default();
        let rows = path.levels().len();
        let mut cands: Vec<Vec<SignaturePartition>> = vec![Vec::new()];
        for x in path.levels() {
            let mut next = Vec::new();
            for c in &cands {
                for z in band_neighbors(x) {
                    let mut d = c.clone();
                    d.push(z);
                    next.push(d);
                }
            }
            cands = next;
        }
        let mut out = PathDistribution::new();
        for ys in cands {
            let y = PathConfig::from_unchecked(ys);
            if !y.is_valid() {
                continue;
            }
            let xs = path.levels();
            let yl = y.levels();
            let l1 = LevelIndex::from_row(1).unwrap();
            let mut w = transition_t(l1.n, l1.a, phi, &xs[0], &yl[0], &q).unwrap();
            for k in 1..rows {
                let lev = LevelIndex::from_row(k + 1).unwrap();
                let low = LevelIndex::from_row(k).unwrap();
                let num = transition_t(lev.n, lev.a, phi, &xs[k], &yl[k], &q).unwrap() * link(lev, &yl[k], &yl[k - 1]).unwrap();
                let bound = xs[k].first() + 1;
                let den: f64 = SignaturePartition::enumerate(low.n, bound)
                    .iter()
                    .map(|z| {
                        let l = link(lev, &xs[k], z).unwrap();
                        if l == 0.0 {
                            0.0
                        } else {
                            l * transition_t(low.n, low.a, phi, z, &yl[k - 1], &q).unwrap()
                        }
                    })
                    .sum();
                w = if den > 0.0 { w * num / den } else { 0.0 };
            }
            if w.abs() > 1e-15 {
                out.insert(y, w);
            }
        }
        out
    }

    #[test]
    fn identity_phi_keeps_path() {
        let path = PathConfig::new(vec![sp(&[1]), sp(&[2]), sp(&[2, 0])]).unwrap();
        let d = step_distribution(&path, &Phi::identity()).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d[&path] - 1.0).abs() < 1e-15);
        let next = multivariate_step_seeded(2, HalfInt::MinusHalf, &Phi::identity(), &path, 9).unwrap();
        assert_eq!(next, path);
    }

    #[test]
    fn one_level_law_is_transition_row() {
        let q = QuadratureSpec::default();
        let phi = Phi::lazy(0.3);
        let path = PathConfig::new(vec![sp(&[2])]).unwrap();
        let d = step_distribution(&path, &phi).unwrap();
        for (p, w) in &d {
            let t = transition_t(1, HalfInt::MinusHalf, &phi, &sp(&[2]), &p.levels()[0], &q).unwrap();
            assert!((t - w).abs() < 1e-15);
        }
        assert_eq!(d.len(), 3);
    }

    #[test]
    fn sequential_law_matches_product_formula() {
        let phi = Phi::lazy(0.25);
        let starts = [
            PathConfig::packed(LevelIndex::new(2, HalfInt::MinusHalf).unwrap()),
            PathConfig::packed(LevelIndex::new(2, HalfInt::PlusHalf).unwrap()),
            PathConfig::new(vec![sp(&[1]), sp(&[2]), sp(&[2, 1]), sp(&[3, 1])]).unwrap(),
        ];
        for s in &starts {
            let seq = step_distribution(s, &phi).unwrap();
            let brute = brute_force(s, &phi);
            let total: f64 = seq.values().sum();
            assert!((total - 1.0).abs() < 1e-13);
            assert_eq!(seq.len(), brute.len(), "{s:?}");
            for (p, w) in &seq {
                assert!(p.is_valid());
                assert!((w - brute[p]).abs() < 1e-13, "{p:?}: {w} vs {}", brute[p]);
            }
        }
    }

    #[test]
    fn sampled_steps_follow_exact_law() {
        let phi = Phi::lazy(0.25);
        let start = PathConfig::packed(LevelIndex::new(2, HalfInt::MinusHalf).unwrap());
        let exact = step_distribution(&start, &phi).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 40_000;
        let mut counts: BTreeMap<PathConfig, usize> = BTreeMap::new();
        for _ in 0..n {
            *counts.entry(multivariate_step(&start, &phi, &mut rng).unwrap()).or_insert(0) += 1;
        }
        for (p, &c) in &counts {
            let pr = exact[p];
            let se = (pr * (1.0 - pr) / n as f64).sqrt();
            assert!(((c as f64 / n as f64) - pr).abs() < 4.0 * se + 1e-12, "{p:?}");
        }
    }

    #[test]
    fn non_linear_phi_is_rejected() {
        let start = PathConfig::packed(LevelIndex::new(1, HalfInt::MinusHalf).unwrap());
        assert!(step_distribution(&start, &Phi::exp(0.5)).is_err());
    }
}
