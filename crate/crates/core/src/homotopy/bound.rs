use serde::{Deserialize, Serialize};

/// Upper bound on the number of complex critical points of `log g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlDegreeBound {
    pub degrees: Vec<u32>,
    pub n: usize,
    pub bound: u64,
}

/// Coefficient of `z^n` in `(1-z)^n / (∏(1 - d_i z) · (1 - 2z))`, expanded
/// as an exact integer power series truncated at order `n`.
pub fn ml_degree_bound(degrees: &[u32], n: usize) -> MlDegreeBound {
    // numerator (1-z)^n
    let mut series: Vec<i128> = (0..=n).map(|j| binomial(n, j) * if j % 2 == 0 { 1 } else { -1 }).collect();
    let mut divide = |r: i128| {
        // multiply by 1/(1 - r z) = Σ r^j z^j, i.e. a running sum
        for j in 1..=n {
            series[j] += r * series[j - 1];
        }
    };
    for &d in degrees {
        divide(i128::from(d));
    }
    divide(2);
    MlDegreeBound {
        degrees: degrees.to_vec(),
        n,
        bound: u64::try_from(series[n]).expect("bound is a nonnegative count"),
    }
}

fn binomial(n: usize, k: usize) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i as i128 + 1))
}
