use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use wallgrowth::characters::FTable;
use wallgrowth::dynamics::link;
use wallgrowth::kernel::{correlation, eval_k, eval_k_hole, series_oracle};
use wallgrowth::special::bessel_i;
use wallgrowth::{CharacterParams, ContourSpec, HalfInt, KernelEvaluator, KernelPoint, LevelIndex, PathConfig, QuadratureSpec};

const M: HalfInt = HalfInt::MinusHalf;
const P: HalfInt = HalfInt::PlusHalf;

fn pt(n: usize, a: HalfInt, s: u64) -> KernelPoint {
    KernelPoint::new(n, a, s).unwrap()
}

/// Law of every path up to `top` with parts <= bound: the central measure at
/// the top level pushed down through the links.
fn path_law(w: &CharacterParams, top: LevelIndex, bound: u64) -> Vec<(PathConfig, f64)> {
    let table = FTable::new(w, top.n, top.a, bound + top.n as u64 + 1, &QuadratureSpec::new(400).unwrap());
    PathConfig::enumerate(top, bound, 2_000_000)
        .unwrap()
        .into_par_iter()
        .map(|p| {
            let lv = p.levels();
            let mut mass = table.measure(&lv[lv.len() - 1]).unwrap();
            for r in (2..=lv.len()).rev() {
                mass *= link(LevelIndex::from_row(r).unwrap(), &lv[r - 1], &lv[r - 2]).unwrap();
            }
            (p, mass)
        })
        .collect()
}

fn occupied(path: &PathConfig, p: KernelPoint) -> bool {
    let lam = path.level(p.level).parts();
    let n = lam.len() as u64;
    lam.iter().enumerate().any(|(k, &l)| l + n - 1 - k as u64 == p.s)
}

fn brute_rho(law: &[(PathConfig, f64)], pts: &[KernelPoint], hole: bool) -> f64 {
    law.iter().filter(|(p, _)| pts.iter().all(|&q| occupied(p, q) != hole)).map(|e| e.1).sum()
}

#[test]
fn bessel_diagonal_and_packed_indicator() {
    let g = 2.5;
    let om = CharacterParams::plancherel(g).unwrap();
    for s in 0..8 {
        let w = if s > 0 { 2.0 } else { 1.0 };
        let want = (-g).exp() * w * bessel_i(s, g);
        let p = pt(1, M, s);
        assert!((eval_k(&om, p, p, ContourSpec::default()).unwrap() - want).abs() < 1e-8);
    }
    let ev = KernelEvaluator::new(&CharacterParams::trivial(), ContourSpec::default()).unwrap();
    for n in 1..=10 {
        for a in HalfInt::BOTH {
            for s in 0..=12u64 {
                let p = pt(n, a, s);
                let want = if (s as usize) < n { 1.0 } else { 0.0 };
                assert!((ev.eval(p, p).unwrap().value - want).abs() < 1e-8, "{p}");
            }
        }
    }
}

#[test]
fn routes_and_radii_agree() {
    let pts = [pt(1, M, 0), pt(2, P, 3), pt(4, M, 1), pt(6, P, 7), pt(9, M, 12), pt(10, P, 4)];
    for g in [1.0, 3.0] {
        let om = CharacterParams::plancherel(g).unwrap();
        let evs: Vec<KernelEvaluator> = [ContourSpec::ellipse(1.2), ContourSpec::ellipse(1.5), ContourSpec::ellipse(2.0)]
            .into_iter()
            .map(|c| KernelEvaluator::new(&om, c).unwrap())
            .collect();
        let circ = KernelEvaluator::new(&om, ContourSpec::circle(256)).unwrap();
        for &p1 in &pts {
            for &p2 in &pts {
                let base = evs[1].eval(p1, p2).unwrap().value;
                for ev in [&evs[0], &evs[2], &circ] {
                    let v = ev.eval(p1, p2).unwrap().value;
                    assert!((v - base).abs() < 1e-8, "{g} {p1} {p2} {:?}: {v} vs {base}", ev.spec());
                }
                if p1.level >= p2.level {
                    let s = series_oracle(&om, p1, p2, 200).unwrap();
                    assert!((s - base).abs() < 1e-8, "{g} {p1} {p2}: series {s} vs {base}");
                }
            }
        }
    }
}

#[test]
fn doubling_the_nodes_changes_little() {
    let om = CharacterParams::new(vec![0.3], vec![0.2], 2.0).unwrap();
    let pts = [pt(1, P, 2), pt(3, M, 0), pt(5, P, 6), pt(8, M, 9)];
    for spec in [ContourSpec::default(), ContourSpec::circle(256)] {
        let a = KernelEvaluator::new(&om, spec).unwrap();
        let b = KernelEvaluator::new(&om, spec.doubled()).unwrap();
        for &p1 in &pts {
            for &p2 in &pts {
                let (x, y) = (a.eval(p1, p2).unwrap().value, b.eval(p1, p2).unwrap().value);
                assert!((x - y).abs() < 1e-8, "{spec:?} {p1} {p2}: {x} {y}");
            }
        }
    }
}

#[test]
fn densities_sum_to_particle_count() {
    for (g, levels) in [(4.0, vec![1usize, 3, 6]), (1.0, vec![2, 5])] {
        let ev = KernelEvaluator::new(&CharacterParams::plancherel(g).unwrap(), ContourSpec::default()).unwrap();
        for &n in &levels {
            for a in HalfInt::BOTH {
                let total: f64 = (0..=40u64).into_par_iter().map(|s| ev.eval(pt(n, a, s), pt(n, a, s)).unwrap().value).sum();
                assert!((total - n as f64).abs() < 1e-6, "{g} ({n},{a}): {total}");
            }
        }
    }
}

#[test]
fn correlations_match_the_exact_path_measure() {
    let top = LevelIndex::new(2, M).unwrap();
    for om in [CharacterParams::plancherel(0.9).unwrap(), CharacterParams::new(vec![0.3], vec![0.2], 0.5).unwrap()] {
        let law = path_law(&om, top, 18);
        let mass: f64 = law.iter().map(|e| e.1).sum();
        assert!((mass - 1.0).abs() < 1e-10, "{mass}");
        let ev = KernelEvaluator::new(&om, ContourSpec::default()).unwrap();
        let levels = [(1, M), (1, P), (2, M)];
        let mut singles = Vec::new();
        for &(n, a) in &levels {
            for s in 0..6 {
                singles.push(pt(n, a, s));
            }
        }
        for &p in &singles {
            let k = ev.correlation(&[p], false).unwrap();
            assert!((k - brute_rho(&law, &[p], false)).abs() < 1e-9, "{p}");
        }
        let sets = [
            vec![pt(1, M, 1), pt(1, P, 2)],
            vec![pt(1, P, 0), pt(1, M, 0)],
            vec![pt(2, M, 0), pt(1, M, 2)],
            vec![pt(2, M, 1), pt(2, M, 3)],
            vec![pt(1, M, 1), pt(2, M, 2), pt(1, P, 1)],
            vec![pt(2, M, 0), pt(2, M, 2), pt(1, P, 1), pt(1, M, 0)],
        ];
        for set in &sets {
            for hole in [false, true] {
                let k = ev.correlation(set, hole).unwrap();
                let b = brute_rho(&law, set, hole);
                assert!((k - b).abs() < 1e-9, "{set:?} hole={hole}: {k} vs {b}");
                assert!((-1e-6..=1.0 + 1e-6).contains(&k));
            }
        }
    }
}

#[test]
fn hole_kernel_is_delta_minus_kernel() {
    let om = CharacterParams::plancherel(1.7).unwrap();
    let ev = KernelEvaluator::new(&om, ContourSpec::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let mut draw = || pt(rng.random_range(1..=5), if rng.random_bool(0.5) { M } else { P }, rng.random_range(0..8));
        let (p1, p2) = (draw(), draw());
        let k = ev.eval(p1, p2).unwrap().value;
        let h = ev.eval_hole(p1, p2).unwrap().value;
        let d = if p1 == p2 { 1.0 } else { 0.0 };
        assert!((k + h - d).abs() < 1e-12, "{p1} {p2}");
    }
    let (p, q) = (pt(2, P, 1), pt(1, M, 3));
    assert_eq!(eval_k_hole(&om, p, q, ContourSpec::default()).unwrap(), -eval_k(&om, p, q, ContourSpec::default()).unwrap());
}

#[test]
fn hole_correlations_are_inclusion_exclusion() {
    let om = CharacterParams::plancherel(2.2).unwrap();
    let ev = KernelEvaluator::new(&om, ContourSpec::default()).unwrap();
    let windows = [
        vec![pt(1, M, 0), pt(1, M, 1), pt(1, M, 2)],
        vec![pt(3, P, 1), pt(3, P, 2), pt(2, M, 2), pt(4, M, 5)],
        vec![pt(2, P, 0), pt(2, M, 3)],
    ];
    for w in &windows {
        let holes = ev.correlation(w, true).unwrap();
        let mut alt = 0.0;
        for mask in 0u32..(1 << w.len()) {
            let sub: Vec<KernelPoint> = (0..w.len()).filter(|i| mask >> i & 1 == 1).map(|i| w[i]).collect();
            let sign = if sub.len() % 2 == 0 { 1.0 } else { -1.0 };
            alt += sign * ev.correlation(&sub, false).unwrap();
        }
        assert!((holes - alt).abs() < 1e-8, "{w:?}: {holes} vs {alt}");
    }
}

#[test]
fn determinants_ignore_the_gauge() {
    let om = CharacterParams::plancherel(1.2).unwrap();
    let ev = KernelEvaluator::new(&om, ContourSpec::default()).unwrap();
    let pts = [pt(1, M, 1), pt(2, P, 0), pt(3, M, 2), pt(2, M, 4)];
    let k = ev.matrix(&pts, false).unwrap();
    let f = |p: KernelPoint| 2f64.powi(p.level.n as i32);
    let g = nalgebra::DMatrix::from_fn(4, 4, |i, j| f(pts[i]) / f(pts[j]) * k[(i, j)]);
    assert!((g.determinant() - k.determinant()).abs() < 1e-10);
    assert!((correlation(&om, &pts, ContourSpec::default(), false).unwrap() - k.determinant()).abs() < 1e-14);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn ellipse_matches_series(g in 0.1f64..3.0, n1 in 1usize..5, dn in 0usize..3, s1 in 0u64..6, s2 in 0u64..6, b1 in 0i64..2, b2 in 0i64..2) {
            let om = CharacterParams::plancherel(g).unwrap();
            let p1 = pt(n1 + dn, HalfInt::from_bit(b1), s1);
            let p2 = pt(n1, HalfInt::from_bit(b2), s2);
            prop_assume!(p1.level >= p2.level);
            let k = eval_k(&om, p1, p2, ContourSpec::default()).unwrap();
            let s = series_oracle(&om, p1, p2, 200).unwrap();
            prop_assert!((k - s).abs() < 1e-9, "{} vs {}", k, s);
        }

        #[test]
        fn diagonal_is_a_probability(g in 0.0f64..5.0, n in 1usize..6, s in 0u64..12, b in 0i64..2) {
            let om = CharacterParams::plancherel(g).unwrap();
            let p = pt(n, HalfInt::from_bit(b), s);
            let k = eval_k(&om, p, p, ContourSpec::default()).unwrap();
            prop_assert!((-1e-9..=1.0 + 1e-9).contains(&k));
        }
    }
}
