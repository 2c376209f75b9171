use crate::chebyshev_jacobi::HalfInt;

/// q (q-1) ... (q-m+1) / m! for any integer q.
pub(crate) fn gbinom(q: i64, m: i64) -> f64 {
    if m < 0 {
        return 0.0;
    }
    let mut v = 1.0;
    for i in 0..m {
        v *= (q - i) as f64 / (i + 1) as f64;
    }
    v
}

/// (1/2 pi i) of the integral of z^p (z-1)^q over a loop winding once around
/// 0, and around 1 as well when `around_one`.
pub(crate) fn monomial_residue(p: i64, q: i64, around_one: bool) -> f64 {
    let mut r = 0.0;
    let m = -1 - p;
    if m >= 0 {
        let sign = if (q + m).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        r += sign * gbinom(q, m);
    }
    if around_one && q < 0 {
        r += gbinom(p, -1 - q);
    }
    r
}

/// j(z) dz is the x-measure in circle coordinates, x = (z + 1/z)/2, as
/// z^p (z-1)^q / (2i).
pub(crate) fn measure_exponents(a: HalfInt, s: u64) -> (i64, i64) {
    match a {
        HalfInt::MinusHalf => (-(s as i64) - 1, 0),
        HalfInt::PlusHalf => (-(s as i64) - 2, 1),
    }
}

/// J_s((z + 1/z)/2) as a sum of c z^p (z-1)^q.
pub(crate) fn j_terms(a: HalfInt, s: u64) -> [(f64, i64, i64); 2] {
    let s = s as i64;
    match a {
        HalfInt::MinusHalf => [(0.5, s, 0), (0.5, -s, 0)],
        HalfInt::PlusHalf => [(1.0, s + 1, -1), (-1.0, -s, -1)],
    }
}

/// The loop integral of j(z) J_{s2}(x) (x-1)^k dz, done by residues.
/// For k >= 0 it equals the real integral of J_{s1} J_{s2} (x-1)^k against
/// the weight of a1, whatever `around_one` is.
pub(crate) fn single_loop_integral(a1: HalfInt, s1: u64, a2: HalfInt, s2: u64, k: i64, around_one: bool) -> f64 {
    // (x-1)^k = 2^{-k} z^{-k} (z-1)^{2k}
    let (pj, qj) = measure_exponents(a1, s1);
    let scale = 2f64.powi(-(k as i32));
    let mut acc = 0.0;
    for (c, p, q) in j_terms(a2, s2) {
        acc += c * monomial_residue(pj + p - k, qj + q + 2 * k, around_one);
    }
    // 2 pi i from the residues over the 2i inside j
    std::f64::consts::PI * scale * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev_jacobi::{eval_j, theta_rule};

    #[test]
    fn generalized_binomials() {
        assert_eq!(gbinom(5, 2), 10.0);
        assert_eq!(gbinom(2, 5), 0.0);
        assert_eq!(gbinom(-2, 3), -4.0);
        assert_eq!(gbinom(7, 0), 1.0);
    }

    #[test]
    fn residues_match_quadrature() {
        let rule = theta_rule(200);
        for a1 in HalfInt::BOTH {
            for a2 in HalfInt::BOTH {
                for s1 in 0..6 {
                    for s2 in 0..6 {
                        for k in 0..4 {
                            let q = rule.integrate(a1, |x, _| {
                                eval_j(a1, s1, x).unwrap() * eval_j(a2, s2, x).unwrap() * (x - 1.0).powi(k as i32)
                            });
                            for around in [false, true] {
                                let r = single_loop_integral(a1, s1, a2, s2, k, around);
                                assert!((r - q).abs() < 1e-11 * (1.0 + q.abs()), "{a1} {s1} {a2} {s2} {k}: {r} {q}");
                            }
                        }
                    }
                }
            }
        }
    }
}
