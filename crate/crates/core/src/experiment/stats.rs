use statrs::distribution::{Binomial, DiscreteCDF};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Equal-tailed acceptance region `[lo, hi]` of success counts that holds at
/// least `level` of the Binomial(trials, p) mass.
pub fn binomial_acceptance(trials: u64, p: f64, level: f64) -> (u64, u64) {
    let p = p.clamp(0.0, 1.0);
    if p == 0.0 {
        return (0, 0);
    }
    if p == 1.0 {
        return (trials, trials);
    }
    let dist = Binomial::new(p, trials).expect("p in (0, 1)");
    let tail = (1.0 - level) / 2.0;
    (dist.inverse_cdf(tail), dist.inverse_cdf(1.0 - tail))
}
