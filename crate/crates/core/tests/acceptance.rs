//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use zeroset::adversary::{find_separated_peaks, flatten_perturbation, refine_interpolant, sampled_distance};
use zeroset::certifier::{
    certify, enumerate_cubes, holder_lower_bound, miranda_verify, resolve_depth, theory_lower_bound,
    CertifyOptions,
};
use zeroset::driver::{fit_slope, run_sweep, Column, SweepConfig};
use zeroset::extremal::ExtremalFunction;
use zeroset::funcrep::{count_zero_components, sup_distance, SampledFunction};
use zeroset::modulus::ModulusSpec;
use zeroset::{FnField, VectorField};

type Outcome = Result<String, String>;

fn pow2(e: i32) -> f64 {
    (e as f64).exp2()
}

fn ftilde() -> ExtremalFunction {
    ExtremalFunction::scalar(ModulusSpec::lipschitz())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn depth_bands() -> Outcome {
    let beta = ModulusSpec::lipschitz();
    for j in 6..=10 {
        let n = resolve_depth(&beta, 1, pow2(-j));
        ensure(n == 1, || format!("eps=2^-{j}: depth {n}, want 1"))?;
    }
    for j in 11..=16 {
        let n = resolve_depth(&beta, 1, pow2(-j));
        ensure(n == 2, || format!("eps=2^-{j}: depth {n}, want 2"))?;
    }
    Ok("depth 1 on 2^-6..2^-10, depth 2 on 2^-11..2^-16".into())
}

fn certified_counts() -> Outcome {
    let f = ftilde();
    let none = CertifyOptions::default();
    let a = certify(&f, pow2(-7), &none).map_err(err)?;
    ensure(a.certified_count == 2, || format!("eps=2^-7: {}", a.certified_count))?;
    let b = certify(&f, pow2(-12), &none).map_err(err)?;
    ensure(b.certified_count == 18 && b.paper_bound == 16, || {
        format!("eps=2^-12: count {} paper {}", b.certified_count, b.paper_bound)
    })?;
    Ok("2 at 2^-7, 18 (deepest level 16) at 2^-12".into())
}

fn empirical_soundness() -> Outcome {
    let f = ftilde();
    let beta = ModulusSpec::lipschitz();
    let reference = f.sample(pow2(-16)).map_err(err)?;
    let knots: Vec<f64> = (0..=1024).map(|i| i as f64 * pow2(-10)).collect();
    let budget = pow2(-7);
    let passed = (0..100u64)
        .into_par_iter()
        .map(|seed| -> Result<bool, String> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let amp = budget - pow2(-13);
            let values: Vec<f64> = knots
                .iter()
                .map(|&x| f.eval(&[x]).unwrap()[0] + rng.gen_range(-amp..=amp))
                .collect();
            let h = SampledFunction::new(vec![knots.clone()], 1, values).map_err(err)?;
            let dist = sup_distance(&h, &reference).map_err(err)?;
            if dist > budget {
                return Err(format!("trial {seed}: generated h at distance {dist}"));
            }
            let mut ok = true;
            for cube in enumerate_cubes(1, 1).map_err(err)? {
                ok &= miranda_verify(&h, &cube, &[], &beta, 0).map_err(err)?;
            }
            ok &= count_zero_components(&h).map_err(err)?.component_count() >= 2;
            Ok(ok)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|&b| b)
        .count();
    ensure(passed == 100, || format!("{passed}/100 trials"))?;
    Ok("100/100 trials".into())
}

fn envelope_ordering() -> Outcome {
    let records = run_sweep(&SweepConfig::new(1.0, 1.0, 1, 1, 0, 6, 16)).map_err(err)?;
    for r in records.iter().filter(|r| r.n0 >= 1) {
        ensure(r.theory_lb <= r.certified_lb as f64, || {
            format!("eps={:e}: theory {} > certified {}", r.eps, r.theory_lb, r.certified_lb)
        })?;
    }
    // gamma eps = 2^-11, so Psi = 2^-11 and 16/Psi = 2^15
    let reference = pow2(15) * (-4.0 * 11f64.sqrt()).exp2();
    let got = theory_lower_bound(&ModulusSpec::lipschitz(), pow2(-12), 1, 0, 2.0).map_err(err)?;
    let rel = (got.value - reference).abs() / reference;
    ensure(rel <= 1e-9, || format!("spot value {} vs {reference}", got.value))?;
    Ok(format!("{} rows ordered, spot {:.10}", records.len(), got.value))
}

fn adversary_distances() -> Outcome {
    let f = ftilde();
    let mut worst: f64 = 0.0;
    for j in 6..=8 {
        let eps = pow2(-j);
        let flat = flatten_perturbation(&f, eps, 1.0).map_err(err)?;
        let d = sampled_distance(&f, &flat.function, pow2(-16)).map_err(err)?;
        ensure(d <= eps + 1e-10, || format!("flatten at 2^-{j}: {d}"))?;
        let peaks = find_separated_peaks(&f, eps, 1.0).map_err(err)?;
        let refined = refine_interpolant(&f, eps, &peaks).map_err(err)?;
        let d2 = sampled_distance(&f, &refined.function, pow2(-16)).map_err(err)?;
        ensure(d2 <= eps / 4.0 + 2e-12 + 1e-10, || format!("refine at 2^-{j}: {d2}"))?;
        worst = worst.max(d / eps).max(d2 / (eps / 4.0));
    }
    Ok(format!("worst distance/budget ratio {worst:.6}"))
}

fn sandwich() -> Outcome {
    let f = ftilde();
    let eps = pow2(-7);
    let cert = certify(&f, eps, &CertifyOptions::default()).map_err(err)?;
    let peaks = find_separated_peaks(&f, eps, 1.0).map_err(err)?;
    let refined = refine_interpolant(&f, eps, &peaks).map_err(err)?;
    let zeros = count_zero_components(&refined.function).map_err(err)?.component_count();
    ensure(cert.certified_count == 2 && 2 <= zeros, || {
        format!("certified {} zeros {zeros}", cert.certified_count)
    })?;
    Ok(format!("2 <= {zeros}"))
}

fn modulus_admission() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (alpha, lambda) in [(1.0, 1.0), (0.5, 1.0), (1.0, 3.0)] {
        let beta = ModulusSpec::power(lambda, alpha).map_err(err)?;
        let f = ExtremalFunction::scalar(beta.clone());
        for i in 0..10_000 {
            let x: f64 = rng.gen_range(0.0..1.0);
            // half the pairs at log-uniform separations, half uniform
            let y = if i % 2 == 0 {
                let delta = pow2(-30) * rng.gen_range(0.0f64..30.0).exp2();
                if rng.gen_bool(0.5) { x + delta } else { x - delta }.clamp(0.0, 1.0)
            } else {
                rng.gen_range(0.0..1.0)
            };
            let diff = (f.eval(&[x]).map_err(err)?[0] - f.eval(&[y]).map_err(err)?[0]).abs();
            let bound = beta.eval((x - y).abs()).map_err(err)?;
            ensure(diff <= bound + 1e-12, || {
                format!("alpha={alpha} lambda={lambda}: |f(x)-f(y)|={diff} > {bound} at x={x}, y={y}")
            })?;
        }
    }
    Ok("3 x 10^4 pairs".into())
}

fn closed_form_inverse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let lambda = rng.gen_range(0.25..4.0);
        let alpha = rng.gen_range(0.2..=1.0);
        let eps = pow2(-rng.gen_range(4..=30));
        let closed = holder_lower_bound(lambda, alpha, eps, 1, 0, 2.0).map_err(err)?;
        let beta = ModulusSpec::power(lambda, alpha).map_err(err)?;
        let generic = theory_lower_bound(&beta, eps, 1, 0, 2.0).map_err(err)?.value;
        let rel = (closed - generic).abs() / closed.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        ensure(rel <= 1e-10, || format!("lambda={lambda} alpha={alpha} eps={eps}: {closed} vs {generic}"))?;
    }
    Ok(format!("worst relative gap {worst:.2e}"))
}

fn slope_property() -> Outcome {
    let mut notes = Vec::new();
    for (alpha, d, m, p) in [(1.0, 1, 1, 0), (0.5, 1, 1, 0), (1.0, 2, 2, 0)] {
        let records = run_sweep(&SweepConfig::new(alpha, 1.0, d, m, p, 6, 20)).map_err(err)?;
        let expected = -((m - p) as f64) / alpha;
        let ub = fit_slope(&records, Column::TheoryUb).map_err(err)?;
        ensure((ub - expected).abs() <= 1e-9, || format!("theory_ub slope {ub}, want {expected}"))?;
        let lb = fit_slope(&records, Column::TheoryLb).map_err(err)?;
        ensure(lb >= expected + 0.05, || format!("theory_lb slope {lb} not above {expected} + 0.05"))?;
        notes.push(format!("{expected}: lb {lb:.3}"));
    }
    Ok(notes.join(", "))
}

fn miranda_oracle() -> Outcome {
    let beta = ModulusSpec::lipschitz();
    let f = ExtremalFunction::new(beta.clone(), 2, 2, 0).map_err(err)?;
    let coarse: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
    let results = (0..20u64)
        .into_par_iter()
        .map(|seed| -> Result<(usize, bool), String> {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let amp = pow2(-9) * rng.gen_range(0.0..1.0);
            let noise: Vec<f64> = (0..17 * 17 * 2).map(|_| rng.gen_range(-amp..=amp)).collect();
            let wiggle =
                SampledFunction::new(vec![coarse.clone(), coarse.clone()], 2, noise).map_err(err)?;
            let h = FnField::new(2, 2, |x| {
                let a = f.eval(x).unwrap();
                let b = wiggle.evaluate(x).unwrap();
                vec![a[0] + b[0], a[1] + b[1]]
            });
            let mut passed = 0;
            for n in 1..=2 {
                for cube in enumerate_cubes(n, 2).map_err(err)? {
                    if !miranda_verify(&h, &cube, &[], &beta, 0).map_err(err)? {
                        continue;
                    }
                    passed += 1;
                    let b = cube.bounds_f64();
                    let mut signs = [[false; 2]; 2];
                    for i in 0..=64 {
                        for k in 0..=64 {
                            let x = [
                                b[0].0 + (b[0].1 - b[0].0) * i as f64 / 64.0,
                                b[1].0 + (b[1].1 - b[1].0) * k as f64 / 64.0,
                            ];
                            let v = h.eval(&x).map_err(err)?;
                            for c in 0..2 {
                                signs[c][0] |= v[c] >= 0.0;
                                signs[c][1] |= v[c] <= 0.0;
                            }
                        }
                    }
                    if !signs.iter().all(|s| s[0] && s[1]) {
                        return Ok((passed, false));
                    }
                }
            }
            Ok((passed, true))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let good = results.iter().filter(|r| r.1).count();
    let cubes: usize = results.iter().map(|r| r.0).sum();
    ensure(good == 20, || format!("{good}/20 perturbations"))?;
    ensure(cubes > 0, || "no cube passed the face check".into())?;
    Ok(format!("20/20, {cubes} verified cubes checked"))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("depth bands", Duration::from_secs(1), depth_bands),
        ("certified counts", Duration::from_secs(1), certified_counts),
        ("empirical soundness", Duration::from_secs(30), empirical_soundness),
        ("envelope ordering", Duration::from_secs(5), envelope_ordering),
        ("adversary distance contracts", Duration::from_secs(10), adversary_distances),
        ("sandwich", Duration::from_secs(5), sandwich),
        ("modulus admission", Duration::from_secs(10), modulus_admission),
        ("closed-form inverse", Duration::from_secs(1), closed_form_inverse),
        ("slope property", Duration::from_secs(5), slope_property),
        ("miranda oracle equivalence", Duration::from_secs(60), miranda_oracle),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let verdict = match outcome {
            Ok(detail) if took <= *limit => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; took {took:?}, limit {limit:?}")),
            Err(why) => ("FAIL", why),
        };
        if verdict.0 == "FAIL" {
            failed += 1;
        }
        println!("[{}] {:>2} {name} ({:.3} s): {}", verdict.0, i + 1, took.as_secs_f64(), verdict.1);
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
