use mfunc::charfun::{decay_profile, CharFnParams};
use mfunc::euler::EulerProductSpec;
use std::sync::Arc;

fn main() {
    let primes = Arc::new(mfunc::arith::sieve_primes(10_000).unwrap());
    let spec = EulerProductSpec::zeta_with_primes(primes);
    let nd: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(64);
    let dirs: Vec<f64> = (0..nd)
        .map(|k| std::f64::consts::TAU * k as f64 / nd as f64)
        .collect();
    // probe each decade (1e1,1e2], (1e2,1e3], (1e3,1e4] at 8 log-spaced radii
    let probes = 8usize;
    for sigma in [0.75, 0.9, 1.0, 1.2] {
        println!("sigma = {sigma}");
        for n in 1..=10usize {
            let curve = spec.local_curve(n, sigma).unwrap();
            let mut envelopes = Vec::new();
            for decade in [1e2, 1e3, 1e4] {
                let radii: Vec<f64> = (0..probes)
                    .map(|i| decade * 10f64.powf(-(1.0 - (i as f64 + 1.0) / probes as f64)))
                    .collect();
                let prof =
                    decay_profile(&curve, &radii, &dirs, &CharFnParams::default()).unwrap();
                let env = prof
                    .rows
                    .iter()
                    .map(|r| r.normalized)
                    .fold(0.0f64, f64::max);
                envelopes.push(env);
            }
            let ratio = envelopes.iter().fold(0.0f64, |a, &b| a.max(b))
                / envelopes.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            let qs: Vec<String> = envelopes.iter().map(|q| format!("{q:.4}")).collect();
            println!(
                "  p = {:4}  env-ratio = {:8.3}  envelopes = {:?}",
                curve.prime(),
                ratio,
                qs
            );
        }
    }
}
