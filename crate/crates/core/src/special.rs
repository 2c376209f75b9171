//! Small closed-form oracles shared by tests and the verification suites.

/// Modified Bessel function I_k(t) from its power series.
pub fn bessel_i(k: u64, t: f64) -> f64 {
    let half = 0.5 * t;
    let mut term = 1.0;
    for j in 1..=k {
        term *= half / j as f64;
    }
    let mut sum = term;
    let q = half * half;
    for m in 1..500u64 {
        term *= q / (m as f64 * (k + m) as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// Law of lambda_1 on the bottom level under the Plancherel measure:
/// e^{-t} W(k) I_k(t), W(0) = 1 and W(k) = 2 otherwise.
pub fn bottom_level_law(k: u64, t: f64) -> f64 {
    let w = if k == 0 { 1.0 } else { 2.0 };
    (-t).exp() * w * bessel_i(k, t)
}

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for j in 0..k {
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_known_values() {
        assert!((bessel_i(0, 1.0) - 1.2660658777520082).abs() < 1e-15);
        assert!((bessel_i(1, 2.0) - 1.5906368546373291).abs() < 1e-14);
        assert!((bessel_i(3, 0.5) - 0.002645111968990).abs() < 1e-14);
    }

    #[test]
    fn bottom_law_sums_to_one() {
        for &t in &[0.1, 0.5, 2.0, 4.0] {
            let s: f64 = (0..80).map(|k| bottom_level_law(k, t)).sum();
            assert!((s - 1.0).abs() < 1e-13);
        }
    }
}
