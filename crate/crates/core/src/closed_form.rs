//! Closed-form mean-field steady states for regular and complete bipartite
//! graphs, written in the curing rate `s = 1/τ`.

/// k-regular graph: `y(s) = 1 − s/k` for `s < k`, else 0.
pub fn regular_fraction(k: u32, s: f64) -> f64 {
    let k = f64::from(k);
    if s >= k {
        0.0
    } else {
        1.0 - s / k
    }
}

/// Complete bipartite graph `K_{M,N}`:
///
/// ```text
/// y(s) = (MN − s²)(M + N + 2s) / ((M + N)(M + s)(N + s))
/// ```
///
/// for `s < √(MN)`, else 0.
pub fn bipartite_fraction(m: u32, n: u32, s: f64) -> f64 {
    let (m, n) = (f64::from(m), f64::from(n));
    if s >= (m * n).sqrt() {
        return 0.0;
    }
    (m * n - s * s) * (m + n + 2.0 * s) / ((m + n) * (m + s) * (n + s))
}

/// Same fraction in the spreading-rate form, `τ = 1/s`:
///
/// ```text
/// y = (MNτ² − 1)((M + N)τ + 2) / (τ (M + N)(Mτ + 1)(Nτ + 1))
/// ```
pub fn bipartite_fraction_tau(m: u32, n: u32, tau: f64) -> f64 {
    let (m, n) = (f64::from(m), f64::from(n));
    if tau * tau * m * n <= 1.0 {
        return 0.0;
    }
    (m * n * tau * tau - 1.0) * ((m + n) * tau + 2.0) / (tau * (m + n) * (m * tau + 1.0) * (n * tau + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms_agree() {
        for (m, n) in [(2, 8), (10, 90), (7, 7), (1, 30)] {
            for s in [0.05, 0.3, 1.0, 2.5] {
                let a = bipartite_fraction(m, n, s);
                let b = bipartite_fraction_tau(m, n, 1.0 / s);
                assert!((a - b).abs() < 1e-12, "K_{m},{n} s={s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn balanced_bipartite_is_regular() {
        for s in [0.0, 0.5, 3.0, 6.0, 9.0] {
            assert!((bipartite_fraction(6, 6, s) - regular_fraction(6, s)).abs() < 1e-14);
        }
    }

    #[test]
    fn endpoints() {
        assert_eq!(bipartite_fraction(2, 8, 0.0), 1.0);
        assert_eq!(bipartite_fraction(2, 8, 4.0), 0.0);
        assert_eq!(regular_fraction(3, 3.0), 0.0);
        assert_eq!(regular_fraction(3, 0.0), 1.0);
    }
}
