//! Monte Carlo checks of the trimean limit laws for exponential samples.

use hurst_core::{
    general_trimean_in_place, gtlme_asymptotics, gtme_asymptotics, optimal_gtlme_weights,
    optimal_gtme_weights, AsymptoticSummary, TrimeanWeights,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

const N: usize = 4096;
const REPS: usize = 2000;
const LAMBDA: f64 = 3.0;

fn moments(w: TrimeanWeights, log: bool, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exp = Exp::new(1.0 / LAMBDA).unwrap();
    let mut buf = vec![0.0; N];
    let stats: Vec<f64> = (0..REPS)
        .map(|_| {
            for x in buf.iter_mut() {
                let v: f64 = exp.sample(&mut rng);
                *x = if log { v.ln() } else { v };
            }
            general_trimean_in_place(&mut buf, w).unwrap()
        })
        .collect();
    let r = REPS as f64;
    let mean = stats.iter().sum::<f64>() / r;
    let var = stats.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (r - 1.0);
    (mean, var)
}

fn check(w: TrimeanWeights, log: bool, summary: AsymptoticSummary, seed: u64) {
    let (mean, var) = moments(w, log, seed);
    let (centre, scale2) = if log {
        (LAMBDA.ln() + summary.c, 1.0)
    } else {
        (summary.c * LAMBDA, LAMBDA * LAMBDA)
    };
    let limit_var = summary.f * scale2 / N as f64;
    let se_mean = (limit_var / REPS as f64).sqrt();
    assert!(
        (mean - centre).abs() < 4.0 * se_mean,
        "{w:?} log={log}: mean {mean} vs {centre}"
    );
    // sd of a sample variance is about var·√(2/(R−1)), ≈ 3.2% here.
    assert!(
        (var / limit_var - 1.0).abs() < 0.1,
        "{w:?} log={log}: var {var} vs {limit_var}"
    );
}

#[test]
fn exponential_trimeans_converge() {
    for (i, w) in [
        TrimeanWeights::TUKEY,
        TrimeanWeights::GASTWIRTH,
        optimal_gtme_weights(),
    ]
    .into_iter()
    .enumerate()
    {
        check(w, false, gtme_asymptotics(w), 10 + i as u64);
    }
}

#[test]
fn log_exponential_trimeans_converge() {
    for (i, w) in [
        TrimeanWeights::TUKEY,
        TrimeanWeights::GASTWIRTH,
        optimal_gtlme_weights(1e-9).unwrap(),
    ]
    .into_iter()
    .enumerate()
    {
        check(w, true, gtlme_asymptotics(w), 20 + i as u64);
    }
}
