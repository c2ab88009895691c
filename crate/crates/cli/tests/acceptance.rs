//! Acceptance gate. Each criterion prints one `[PASS]`/`[FAIL]` line on stderr,
//! written past the test harness's output capture.

use std::io::Write;
use std::time::Instant;

use calab::exact::{is_balanced_up_to, is_surjective, verify_uniform_invariance};
use calab::gilman::{
    classify_gilman, estimate_class_ratio, propagation_reaches, shift_ratio_closed_form, Direction, GilmanClass,
    GilmanParams,
};
use calab::kurka::{certify_blocking, classify_kurka, BlockingStatus, KurkaClass, KurkaParams};
use calab::spectral::{
    correlation_decay, cycle_spectrum, default_threshold, eigenvalue_scan, orbit_cycle, rationality_verdict,
    shift_spectrum_check, wiener_sum, AlphaGrid, Observable, NOISE_FLOOR_C,
};
use calab::{wolfram_rule, Alphabet, BernoulliMeasure, Cylinder, FiniteWord, LocalRule, PeriodicConfig, SeedStream};
use calab_cli::{run, ExperimentConfig, Task};

type Check = Result<String, String>;

fn report(id: u32, name: &str, outcome: Check) {
    let line = match &outcome {
        Ok(detail) => format!("[PASS] criterion {id:>2} {name}: {detail}"),
        Err(why) => format!("[FAIL] criterion {id:>2} {name}: {why}"),
    };
    let _ = writeln!(std::io::stderr(), "{line}");
    if let Err(why) = outcome {
        panic!("criterion {id} failed: {why}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn eca(n: u32) -> LocalRule {
    wolfram_rule(n).unwrap()
}

fn uniform() -> BernoulliMeasure {
    BernoulliMeasure::uniform(Alphabet::BINARY)
}

fn word(s: &str) -> FiniteWord {
    s.parse().unwrap()
}

fn step(rule: &LocalRule, cells: &[u8]) -> Vec<u8> {
    let n = cells.len() as i64;
    let r = rule.radius() as i64;
    let k = rule.k();
    (0..n)
        .map(|i| {
            let idx = (-r..=r).fold(0, |acc, d| acc * k + cells[(i + d).rem_euclid(n) as usize] as usize);
            rule.table()[idx]
        })
        .collect()
}

#[test]
fn criterion_01_surjectivity_matches_balance_oracle() {
    let start = Instant::now();
    let outcome = (|| {
        let mut surjective = 0;
        for n in 0..256 {
            let rule = eca(n);
            let decided = is_surjective(&rule).map_err(|e| e.to_string())?.surjective;
            let oracle = is_balanced_up_to(&rule, 8).map_err(|e| e.to_string())?;
            ensure(decided == oracle, || format!("rule {n}: subset construction {decided}, balance {oracle}"))?;
            surjective += decided as usize;
        }
        let secs = start.elapsed().as_secs_f64();
        ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
        Ok(format!("256/256 agree, {surjective} surjective, {secs:.2}s"))
    })();
    report(1, "surjectivity oracle agreement", outcome);
}

#[test]
fn criterion_02_invariance_iff_surjective() {
    let outcome = (|| {
        for n in 0..256 {
            let rule = eca(n);
            let inv = verify_uniform_invariance(&rule, 6).map_err(|e| e.to_string())?;
            let surj = is_surjective(&rule).map_err(|e| e.to_string())?.surjective;
            ensure(inv == surj, || format!("rule {n}: invariant {inv}, surjective {surj}"))?;
        }
        Ok("256/256 agree at L=6".to_string())
    })();
    report(2, "invariance equivalence", outcome);
}

#[test]
fn criterion_03_kurka_controls() {
    let outcome = (|| {
        let identity = eca(204);
        for w in ["0", "1"] {
            let cert = certify_blocking(&identity, &word(w), 1, 0, 32).map_err(|e| e.to_string())?;
            ensure(cert.is_certified(), || format!("rule 204: `{w}` not certified at T=32"))?;
        }

        let shift = eca(170);
        let mut refuted = 0;
        for len in 1..=6 {
            for w in FiniteWord::all_of_length(len, 2) {
                for p in 0..len {
                    let cert = certify_blocking(&shift, &w, 1, p, len + 2).map_err(|e| e.to_string())?;
                    let cx = cert.counterexample.as_ref();
                    let ok = cert.status == BlockingStatus::Refuted
                        && cx.is_some_and(|c| c.step <= len + 2 && c.replay(&shift, p, 1));
                    ensure(ok, || format!("rule 170: `{w}` at p={p} not refuted by T={}", len + 2))?;
                    refuted += 1;
                }
            }
        }

        let not = eca(51);
        for w in ["0", "1"] {
            let cert = certify_blocking(&not, &word(w), 1, 0, 32).map_err(|e| e.to_string())?;
            ensure(cert.is_certified(), || format!("rule 51: `{w}` not certified"))?;
        }
        let verdict = classify_kurka(&not, &KurkaParams::default()).map_err(|e| e.to_string())?;
        ensure(verdict.has_blocking_word(), || "rule 51 classified sensitive".into())?;
        let radius0 = LocalRule::new(Alphabet::BINARY, 0, vec![1, 0]).unwrap();
        let verdict = classify_kurka(&radius0, &KurkaParams::default()).map_err(|e| e.to_string())?;
        ensure(verdict.class == KurkaClass::Equicontinuous, || "radius-0 rule not reported equicontinuous".into())?;
        Ok(format!("204 certified, {refuted} rule-170 candidates refuted, 51 certified"))
    })();
    report(3, "Kůrka controls", outcome);
}

#[test]
fn criterion_04_gilman_controls() {
    let outcome = (|| {
        let params = GilmanParams {
            t_grid: (0..=16).collect(),
            propagation_horizon: 64,
            propagation_samples: 10_000,
            ..GilmanParams::default()
        };
        let root = SeedStream::new(4, 0);
        let v = classify_gilman(&eca(204), &params, &root.substream(204)).map_err(|e| e.to_string())?;
        ensure(v.class == GilmanClass::A, || format!("rule 204 class {:?}", v.class))?;

        for (n, dir) in [(170u32, Direction::Left), (90, Direction::Both)] {
            let v = classify_gilman(&eca(n), &params, &root.substream(n as u64)).map_err(|e| e.to_string())?;
            ensure(v.class == GilmanClass::C && v.direction == Some(dir), || {
                format!("rule {n}: class {:?} direction {:?}", v.class, v.direction)
            })?;
            let sides: Vec<_> = match dir {
                Direction::Left => vec![&v.left_profile],
                _ => vec![&v.left_profile, &v.right_profile],
            };
            for est in sides.into_iter().flatten() {
                ensure(est.p_hat >= 0.99 && est.ci.lo >= 0.98, || {
                    format!("rule {n} t={} {:?}: p_hat {} ci_lo {}", est.t, est.direction, est.p_hat, est.ci.lo)
                })?;
            }
            if n == 170 {
                ensure(v.left_profile.iter().all(|e| e.p_hat == 1.0), || "rule 170 left p_hat < 1".into())?;
                ensure(v.right_profile.iter().filter(|e| e.t >= 1).all(|e| e.p_hat == 0.0), || {
                    "rule 170 right p_hat > 0".into()
                })?;
            }
        }

        let mut checked = 0;
        for n in [170u32, 90, 30, 110, 45, 150] {
            let reaches = propagation_reaches(&eca(n), 0, 1, 16, 64, 2000, 1 << 12, &root.substream(1000 + n as u64))
                .map_err(|e| e.to_string())?;
            for (i, r) in reaches.iter().enumerate() {
                for dir in [Direction::Left, Direction::Right, Direction::Both] {
                    for t in 0..16 {
                        ensure(!r.affects(t + 1, dir) || r.affects(t, dir), || {
                            format!("rule {n} sample {i} {dir:?}: reaches t={} but not t={t}", t + 1)
                        })?;
                        checked += 1;
                    }
                }
            }
        }
        Ok(format!("204 A, 170 C-left, 90 C-both; {checked} monotonicity checks, 0 violations"))
    })();
    report(4, "Gilman controls", outcome);
}

#[test]
fn criterion_05_ratio_matches_shift_closed_form() {
    let outcome = (|| {
        let shift = eca(170);
        let estimate = |seed: u64, n: usize| {
            let stream = SeedStream::new(seed, 0);
            let x = uniform().sample_config(1 << 12, &stream.substream(0)).unwrap();
            estimate_class_ratio(&shift, &x, 1, n, 16, 10_000, &stream.substream(n as u64)).map_err(|e| e.to_string())
        };
        let mut parts = Vec::new();
        for n in [2usize, 4, 8, 16] {
            let exact = shift_ratio_closed_form(Alphabet::BINARY, 1, n, 16);
            let est = estimate(0, n)?;
            ensure(est.ci.contains(exact), || {
                format!("n={n}: closed form {exact} outside [{}, {}]", est.ci.lo, est.ci.hi)
            })?;
            // A 95% interval misses about one seed in twenty; more than 4 misses in 20 is evidence of bias.
            let mut misses = 0;
            for seed in 1..=20 {
                misses += !estimate(seed, n)?.ci.contains(exact) as usize;
            }
            ensure(misses <= 4, || format!("n={n}: closed form outside the CI for {misses}/20 seeds"))?;
            parts.push(format!("n={n} {:.3e}~{exact:.3e} ({misses}/20 misses)", est.ratio_hat));
        }
        Ok(parts.join(", "))
    })();
    report(5, "ratio oracle", outcome);
}

#[test]
fn criterion_06_rule_51_has_atom_at_one_half() {
    let outcome = (|| {
        let g = Observable::letter_at_zero(&uniform());
        let grid = AlphaGrid::uniform(1024).unwrap();
        let half = grid.values().iter().position(|&a| a == 0.5).unwrap();
        for horizon in [2usize, 64, 1024] {
            let scan = eigenvalue_scan(&eca(51), &uniform(), &g, &grid, horizon, 100, 1 << 12, &SeedStream::new(6, 0))
                .map_err(|e| e.to_string())?;
            ensure(scan.atom_mass[half] == 0.25, || format!("T={horizon}: mass {}", scan.atom_mass[half]))?;
            if horizon == 1024 {
                let verdict = rationality_verdict(&scan, default_threshold(horizon), 64).map_err(|e| e.to_string())?;
                ensure(verdict.pass, || format!("verdict FAIL at {:?}", verdict.offending))?;
                let matches: Vec<_> = verdict.atoms.iter().filter_map(|a| a.matched.clone()).collect();
                ensure(matches == ["1/2"], || format!("matched {matches:?}"))?;
            }
        }
        Ok("atom_mass(1/2) = 0.25 exactly; PASS with match 1/2".to_string())
    })();
    report(6, "spectral positive control", outcome);
}

/// `T · max_{α≠0} E|S_T(α)|²` for i.i.d. fair coins centered to ±1/2, by direct summation.
fn iid_noise_floor(horizon: usize, orbits: usize, points: usize) -> f64 {
    let measure = uniform();
    let mut mass = vec![0.0; points];
    for o in 0..orbits {
        let mut rng = SeedStream::new(7, 1).substream(o as u64).rng();
        let values: Vec<f64> = measure
            .sample_letters(horizon, &mut rng)
            .into_iter()
            .map(|b| b as f64 - 0.5)
            .collect();
        for (j, acc) in mass.iter_mut().enumerate() {
            let (mut re, mut im) = (0.0, 0.0);
            for (n, v) in values.iter().enumerate() {
                let angle = -std::f64::consts::TAU * ((n * j) % points) as f64 / points as f64;
                re += v * angle.cos();
                im += v * angle.sin();
            }
            *acc += (re * re + im * im) / (horizon * horizon) as f64;
        }
    }
    mass[1..].iter().map(|m| m / orbits as f64).fold(0.0, f64::max) * horizon as f64
}

#[test]
fn criterion_07_no_irrational_atoms_for_90_and_170() {
    let outcome = (|| {
        let (horizon, orbits, period, points) = (1usize << 10, 100, 1usize << 12, 1024);
        let c_hat = iid_noise_floor(horizon, orbits, points);
        ensure(c_hat <= NOISE_FLOOR_C && NOISE_FLOOR_C <= 25.0, || {
            format!("calibrated floor c={c_hat:.3} exceeds frozen {NOISE_FLOOR_C}")
        })?;
        let threshold = default_threshold(horizon);
        let g = Observable::letter_at_zero(&uniform());
        let grid = AlphaGrid::uniform(points).unwrap();
        let stream = SeedStream::new(7, 0);
        let scans = [
            ("90", eigenvalue_scan(&eca(90), &uniform(), &g, &grid, horizon, orbits, period, &stream)),
            ("170", shift_spectrum_check(&uniform(), &g, &grid, horizon, orbits, period, &stream)),
        ];
        let mut parts = vec![format!("c_hat={c_hat:.3}, threshold={threshold:.5}")];
        for (name, scan) in scans {
            let scan = scan.map_err(|e| e.to_string())?;
            ensure(scan.guard < 0.05, || format!("rule {name}: cycle guard {}", scan.guard))?;
            let worst = scan.atom_mass[1..].iter().copied().fold(0.0, f64::max);
            ensure(worst <= threshold && worst <= 25.0 / horizon as f64, || {
                format!("rule {name}: off-zero atom {worst} above {threshold}")
            })?;
            let verdict = rationality_verdict(&scan, threshold, 64).map_err(|e| e.to_string())?;
            ensure(verdict.pass, || format!("rule {name}: FAIL at {:?}", verdict.offending))?;
            parts.push(format!("rule {name} max off-zero {:.2}/T", worst * horizon as f64));
        }
        Ok(parts.join(", "))
    })();
    report(7, "spectral negative control", outcome);
}

#[test]
fn criterion_08_cycle_spectra_and_dft_oracle() {
    let outcome = (|| {
        let g = Observable::letter_at_zero(&uniform());
        let mut orbits = 0;
        let mut checks = 0;
        let stream = SeedStream::new(8, 0);
        for i in 0..48u64 {
            let mut rng = stream.substream(i).rng();
            let pick = uniform().sample_letters(8, &mut rng);
            let n = pick.iter().fold(0u32, |acc, &b| acc * 2 + b as u32);
            let period = 3 + (i as usize % 10);
            let rule = eca(n);
            let x = uniform().sample_config(period, &stream.substream(1000 + i)).unwrap();
            let (tau, q) = orbit_cycle(&rule, &x, 1 << 13)
                .map_err(|e| e.to_string())?
                .ok_or_else(|| format!("rule {n} N={period}: no cycle found"))?;

            let mut orbit = vec![x.cells().to_vec()];
            while orbit.len() <= tau + q {
                orbit.push(step(&rule, orbit.last().unwrap()));
            }
            ensure(orbit[tau] == orbit[tau + q], || format!("rule {n}: reported cycle does not close"))?;
            ensure(
                (0..tau + q).all(|a| (a + 1..=tau + q).all(|b| orbit[a] != orbit[b] || (a, b) == (tau, tau + q))),
                || format!("rule {n} N={period}: ({tau}, {q}) is not the first repeat"),
            )?;

            let spec = cycle_spectrum(q).map_err(|e| e.to_string())?;
            ensure(spec.frequencies.len() == q, || "wrong number of frequencies".into())?;
            for (p, f) in spec.frequencies.iter().enumerate() {
                ensure((q as u64).is_multiple_of(*f.denom()) && *f.numer() * q as u64 == p as u64 * f.denom(), || {
                    format!("frequency {f} is not {p}/{q}")
                })?;
            }

            let start = PeriodicConfig::new(Alphabet::BINARY, orbit[tau].clone()).unwrap();
            let cycle: Vec<f64> = orbit[tau..tau + q].iter().map(|c| c[0] as f64 - 0.5).collect();
            for p in 0..q {
                let alpha = p as f64 / q as f64;
                let (mut re, mut im) = (0.0, 0.0);
                for (t, v) in cycle.iter().enumerate() {
                    let angle = -std::f64::consts::TAU * ((t * p) % q) as f64 / q as f64;
                    re += v * angle.cos();
                    im += v * angle.sin();
                }
                let (re, im) = (re / q as f64, im / q as f64);
                let s = wiener_sum(&rule, &start, &g, alpha, 4 * q).map_err(|e| e.to_string())?;
                ensure((s.re - re).abs() <= 1e-12 && (s.im - im).abs() <= 1e-12, || {
                    format!("rule {n} q={q} p={p}: wiener {s} vs DFT {re}+{im}i")
                })?;
                checks += 1;
            }
            orbits += 1;
        }
        Ok(format!("{orbits} orbits, {checks} DFT comparisons within 1e-12"))
    })();
    report(8, "cycle spectra", outcome);
}

#[test]
fn criterion_09_rule_90_correlations_vanish() {
    let outcome = (|| {
        let rule = eca(90);
        let n_cells = 12;
        let total = 1usize << n_cells;
        let mut joint = vec![0usize; 33];
        for bits in 0..total {
            let mut cells: Vec<u8> = (0..n_cells).map(|i| ((bits >> i) & 1) as u8).collect();
            let x0 = cells[0];
            for count in joint.iter_mut().skip(1) {
                cells = step(&rule, &cells);
                if x0 == 1 && cells[0] == 1 {
                    *count += 1;
                }
            }
        }
        for (n, &count) in joint.iter().enumerate().skip(1) {
            ensure(4 * count == total, || format!("N=12, n={n}: joint {count}/{total} != 1/4"))?;
        }

        let one = Cylinder::new(word("1"), 0);
        let est = correlation_decay(&rule, &uniform(), &one, &one, 32, 10_000, 1 << 12, &SeedStream::new(9, 0))
            .map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for c in est.iter().skip(1) {
            ensure(c.estimate.abs() <= 4.0 * c.sigma, || {
                format!("n={}: {} beyond 4 sigma ({})", c.n, c.estimate, c.sigma)
            })?;
            worst = worst.max(c.estimate.abs() / c.sigma);
        }
        Ok(format!("exact zero for n=1..32 at N=12; Monte Carlo max |z|={worst:.2}"))
    })();
    report(9, "correlation decay", outcome);
}

#[test]
fn criterion_10_full_runs_are_deterministic() {
    let outcome = (|| {
        let config = ExperimentConfig {
            rule: "eca:90".into(),
            task: Task::Full,
            seed: 10,
            ..ExperimentConfig::default()
        };
        let results = |c: &ExperimentConfig| -> Result<String, String> {
            let report = run(c).map_err(|e| format!("{e:#}"))?;
            let mut json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
            json.as_object_mut().unwrap().remove("timings");
            Ok(serde_json::to_string(&json).unwrap())
        };
        let a = results(&config)?;
        let b = results(&config)?;
        ensure(a == b, || "two runs with seed 10 differ".into())?;
        let other = results(&ExperimentConfig { seed: 11, ..config.clone() })?;
        ensure(a != other, || "seed has no effect".into())?;
        Ok(format!("{} bytes identical across runs", a.len()))
    })();
    report(10, "determinism", outcome);
}
