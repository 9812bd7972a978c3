use serde::Serialize;

/// Connected labeled graphs on `n` vertices, `n = 1..=20` (OEIS A001187).
pub const CONNECTED_LABELED_GRAPHS: [f64; 20] = [
    1.0,
    1.0,
    4.0,
    38.0,
    728.0,
    26704.0,
    1866256.0,
    251548592.0,
    66296291072.0,
    34496488594816.0,
    3.5641657548953344e16,
    7.3354596206766622208e19,
    3.01272202649664088951808e23,
    2.471648811030443735290891264e27,
    4.0527680937730480234609755344896e31,
    1.328578958335783201008338986845427712e36,
    8.7089689052447182841791388989051400978432e40,
    1.1416413520434522308788674285713247919244640256e46,
    2.992938411601818037370034280152893935458466172698624e51,
    1.569215570739406346256547210377768575765884983264804405248e57,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coverage {
    pub sample_count: usize,
    /// `None` when `n_v` is outside the stored table.
    pub decision_space_size: Option<f64>,
    pub coverage_percent: Option<f64>,
}

/// Share of the connected labeled graphs on `n_v` vertices covered by
/// `sample_count` samples.
pub fn coverage(n_v: usize, sample_count: usize) -> Coverage {
    let size = n_v
        .checked_sub(1)
        .and_then(|i| CONNECTED_LABELED_GRAPHS.get(i))
        .copied();
    Coverage {
        sample_count,
        decision_space_size: size,
        coverage_percent: size.map(|s| 100.0 * sample_count as f64 / s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn table_matches_recurrence() {
        // c(n) = 2^C(n,2) − Σ_{k<n} C(n−1, k−1) c(k) 2^C(n−k, 2)
        let mut c = vec![0.0f64; 21];
        for n in 1..=20usize {
            let total = 2f64.powi((n * (n - 1) / 2) as i32);
            let disconnected: f64 = (1..n)
                .map(|k| {
                    binom(n - 1, k - 1) * c[k] * 2f64.powi(((n - k) * (n - k - 1) / 2) as i32)
                })
                .sum();
            c[n] = total - disconnected;
            let stored = CONNECTED_LABELED_GRAPHS[n - 1];
            assert!(((c[n] - stored) / stored).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn coverage_examples() {
        let c = coverage(10, 259);
        assert!((c.coverage_percent.unwrap() - 7.508e-10).abs() < 1e-12);
        let c = coverage(20, 642);
        assert!((c.coverage_percent.unwrap() / 4.09e-53 - 1.0).abs() < 1e-3);
        assert_eq!(coverage(10, 0).coverage_percent, Some(0.0));
        assert_eq!(coverage(21, 5).decision_space_size, None);
        assert_eq!(coverage(0, 5).coverage_percent, None);
    }
}
