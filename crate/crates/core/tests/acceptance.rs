//! Acceptance suite: every release gate runs here, one criterion at a time,
//! printing one PASS/FAIL line each (run with `--nocapture` to see them on
//! success). The criteria run sequentially inside a single test so wall
//! clock measurements are never contended by sibling tests and the heavy
//! fixtures are built once.

use std::time::Instant;

use epmp_core::{
    arnoldi_factorize, cooling_step, deflate_hotelling, epmp_parallel, epmp_sequential,
    generate_planted, hessenberg_qr_eig, matvec, metropolis_decide, parallel_matvec,
    partition_rows, power_method, ritz_values, run_benchmark, scaling_fit, seeded_unit_vector,
    BenchmarkRecord, DenseMatrix, EpmpConfig, Method, SaDecision, Spectrum,
};

/// Annealing schedule used by the gates: hot enough and slow enough that the
/// early worse-accept window reliably clears the small-eigenvalue cluster of
/// the planted recipe.
fn tuned_cfg(seed: u64) -> EpmpConfig {
    EpmpConfig {
        seed,
        t0: 5.0,
        alpha: 0.999,
        res_tol: 1e-6,
        ..EpmpConfig::default()
    }
}

fn planted_gapped(n: usize, lambda2: f64, seed: u64) -> (Spectrum, DenseMatrix) {
    let s = Spectrum::gapped(n, 10.0, lambda2, seed).expect("spectrum");
    let a = generate_planted(n, &s, seed + 1).expect("planted matrix");
    (s, a)
}

enum Status {
    Pass,
    Warn,
    Fail,
}

struct Report {
    lines: Vec<(usize, &'static str, Status, String, f64)>,
}

impl Report {
    fn new() -> Self {
        Self { lines: Vec::new() }
    }

    fn run(
        &mut self,
        id: usize,
        name: &'static str,
        criterion: impl FnOnce() -> Result<String, String>,
    ) {
        let start = Instant::now();
        let outcome = criterion();
        let secs = start.elapsed().as_secs_f64();
        let (status, detail) = match outcome {
            Ok(d) => (Status::Pass, d),
            Err(d) => (Status::Fail, d),
        };
        self.push(id, name, status, detail, secs);
    }

    fn push(&mut self, id: usize, name: &'static str, status: Status, detail: String, secs: f64) {
        let tag = match status {
            Status::Pass => "PASS",
            Status::Warn => "WARN",
            Status::Fail => "FAIL",
        };
        println!("criterion {id:02} [{name}]: {tag} ({secs:.2}s) {detail}");
        self.lines.push((id, name, status, detail, secs));
    }

    fn finish(self) {
        let failures: Vec<String> = self
            .lines
            .iter()
            .filter(|(_, _, s, _, _)| matches!(s, Status::Fail))
            .map(|(id, name, _, detail, _)| format!("criterion {id:02} [{name}]: {detail}"))
            .collect();
        assert!(failures.is_empty(), "acceptance failures:\n{}", failures.join("\n"));
    }
}

#[test]
fn acceptance() {
    let mut report = Report::new();

    // 1. Paper-scale wall-clock numbers (12.108 s .. 834.432 s on a 2000s
    // four-node cluster) are hardware context, not assertions; the
    // property-based criteria below substitute for them.
    report.run(1, "paper timings are context only", || {
        Ok("published cluster timings recorded for comparison, never asserted".into())
    });

    // 2. Oracle correctness on planted spectra.
    report.run(2, "oracle recovers planted spectra", || {
        let start = Instant::now();
        let mut worst: f64 = 0.0;
        for n in [10usize, 50, 200] {
            let (s, a) = planted_gapped(n, 5.0, 100 + n as u64);
            let eigs = hessenberg_qr_eig(&a).map_err(|e| e.to_string())?;
            let mut got: Vec<f64> = eigs.iter().map(|e| e.0).collect();
            let mut want = s.values().to_vec();
            got.sort_by(|a, b| b.partial_cmp(a).unwrap());
            want.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for (g, w) in got.iter().zip(&want) {
                worst = worst.max((g - w).abs());
            }
        }
        let secs = start.elapsed().as_secs_f64();
        if worst > 1e-8 {
            return Err(format!("max eigenvalue error {worst:.3e} > 1e-8"));
        }
        if secs >= 10.0 {
            return Err(format!("runtime {secs:.2}s >= 10s"));
        }
        Ok(format!("n in {{10, 50, 200}}: max error {worst:.3e}, {secs:.2}s"))
    });

    let (_, a200) = planted_gapped(200, 5.0, 300);

    // 3. Solver correctness on the 200x200 planted matrix.
    report.run(3, "solvers recover lambda1 = 10", || {
        let cfg = tuned_cfg(2025);
        let mut details = Vec::new();
        let runs: Vec<(&str, Box<dyn Fn() -> epmp_core::Result<epmp_core::EigenEstimate>>)> = vec![
            ("power", Box::new(|| power_method(&a200, &cfg))),
            ("epmp_seq", Box::new(|| epmp_sequential(&a200, &cfg))),
            ("epmp_par(p=2)", Box::new(|| epmp_parallel(&a200, &cfg, 2))),
            ("epmp_par(p=4)", Box::new(|| epmp_parallel(&a200, &cfg, 4))),
        ];
        for (name, solve) in runs {
            let start = Instant::now();
            let e = solve().map_err(|e| format!("{name}: {e}"))?;
            let secs = start.elapsed().as_secs_f64();
            if !e.converged {
                return Err(format!("{name}: did not converge (residual {:.3e})", e.residual));
            }
            let rel = (e.lambda - 10.0).abs() / 10.0;
            if rel > 1e-6 {
                return Err(format!("{name}: |lambda-10|/10 = {rel:.3e} > 1e-6"));
            }
            if e.residual > 1e-6 {
                return Err(format!("{name}: residual {:.3e} > 1e-6", e.residual));
            }
            if secs >= 5.0 {
                return Err(format!("{name}: {secs:.2}s >= 5s"));
            }
            details.push(format!("{name} {} iters", e.iterations));
        }
        Ok(details.join(", "))
    });

    // 4. Hard-gap regime lambda2/lambda1 = 0.99; the power-method iteration
    // count is logged for comparison, not asserted against.
    report.run(4, "hard gap converges within 20000 iterations", || {
        let (_, hard) = planted_gapped(200, 9.9, 400);
        let mut cfg = tuned_cfg(2026);
        cfg.max_iter = 20_000;
        let e = epmp_sequential(&hard, &cfg).map_err(|e| e.to_string())?;
        if !e.converged || e.residual > 1e-6 {
            return Err(format!(
                "converged={} residual={:.3e} after {} iterations",
                e.converged, e.residual, e.iterations
            ));
        }
        if (e.lambda - 10.0).abs() > 1e-4 {
            return Err(format!("lambda {} misses 10 by more than 1e-4", e.lambda));
        }
        let p = power_method(&hard, &cfg).map_err(|e| e.to_string())?;
        Ok(format!(
            "epmp {} iters (residual {:.2e}); power-method comparison: {} iters, converged={}",
            e.iterations, e.residual, p.iterations, p.converged
        ))
    });

    // 5. Bit-exact parallelism: matvec for every p at n = 128, full solves
    // across worker counts.
    report.run(5, "parallel results are bit-identical", || {
        let start = Instant::now();
        let n = 128;
        let a = {
            let s = Spectrum::gapped(n, 10.0, 5.0, 500).map_err(|e| e.to_string())?;
            generate_planted(n, &s, 501).map_err(|e| e.to_string())?
        };
        let v = seeded_unit_vector(n, 502).map_err(|e| e.to_string())?;
        let reference = matvec(&a, &v).map_err(|e| e.to_string())?;
        for p in 1..=n {
            let plan = partition_rows(n, p).map_err(|e| e.to_string())?;
            let blocks = epmp_core::distribute_rows(&a, &plan).map_err(|e| e.to_string())?;
            let y = parallel_matvec(&plan, &blocks, &v).map_err(|e| e.to_string())?;
            if y != reference {
                return Err(format!("matvec differs from sequential at p = {p}"));
            }
        }

        let cfg = tuned_cfg(42);
        let seq = epmp_sequential(&a200, &cfg).map_err(|e| e.to_string())?;
        for p in [1usize, 2, 4, 7] {
            let par = epmp_parallel(&a200, &cfg, p).map_err(|e| e.to_string())?;
            if par != seq {
                return Err(format!("solve estimate differs from sequential at p = {p}"));
            }
        }
        let secs = start.elapsed().as_secs_f64();
        if secs >= 60.0 {
            return Err(format!("{secs:.1}s >= 60s"));
        }
        Ok(format!(
            "matvec p=1..=128 and solves p in {{1,2,4,7}} bit-identical, {secs:.1}s"
        ))
    });

    // 6 + 7 share one benchmark sweep so the 4096 matrix is generated once.
    let bench_dims = [512usize, 1024, 2048, 4096];
    let sweep_start = Instant::now();
    let bench_records: Result<Vec<BenchmarkRecord>, String> = run_benchmark(
        &bench_dims,
        &[Method::EpmpSeq, Method::EpmpPar],
        2,
        &tuned_cfg(7000),
        4,
    )
    .map_err(|e| e.to_string());
    println!(
        "  (shared sweep for criteria 06/07: dims {{512,1024,2048,4096}}, \
         EPMP_SEQ + EPMP_PAR, warm-up + 2 reps, {:.1}s)",
        sweep_start.elapsed().as_secs_f64()
    );

    // 6. Scaling slope: the published-table fixture and the desk sweep.
    report.run(6, "log-log scaling slope is quadratic", || {
        let table_dims = [5000usize, 10000, 20000, 30000, 40000];
        let table_secs = [12.108, 45.554, 200.66, 404.836, 834.432];
        let fixture: Vec<BenchmarkRecord> = table_dims
            .iter()
            .zip(table_secs)
            .map(|(&dim, s)| BenchmarkRecord {
                dim,
                method: Method::EpmpSeq,
                workers: 1,
                reps: 12,
                mean_seconds: Some(s),
                stddev_seconds: Some(0.0),
                iterations_mean: None,
                converged_fraction: None,
            })
            .collect();
        let table_fit = scaling_fit(&fixture, Method::EpmpSeq).map_err(|e| e.to_string())?;
        if table_fit.slope < 1.9 || table_fit.slope > 2.2 {
            return Err(format!(
                "published-table fixture slope {:.4} outside [1.9, 2.2]",
                table_fit.slope
            ));
        }

        let records = bench_records.as_ref().map_err(|e| e.clone())?;
        for r in records {
            if r.converged_fraction != Some(1.0) {
                return Err(format!(
                    "dim {} {} converged_fraction {:?} != 1",
                    r.dim, r.method, r.converged_fraction
                ));
            }
        }
        let fit = scaling_fit(records, Method::EpmpSeq).map_err(|e| e.to_string())?;
        if fit.slope < 1.7 || fit.slope > 2.3 {
            return Err(format!(
                "desk slope {:.4} outside [1.7, 2.3] (r^2 = {:.4})",
                fit.slope, fit.r_squared
            ));
        }
        Ok(format!(
            "table fixture slope {:.3}; desk slope {:.3} (r^2 = {:.3})",
            table_fit.slope, fit.slope, fit.r_squared
        ))
    });

    // 7. Parallel benefit at n = 4096 with 4 workers. Hardware-sensitive:
    // on fewer than 4 cores a failure downgrades to a warning.
    {
        let start = Instant::now();
        let cores = std::thread::available_parallelism().map_or(1, |p| p.get());
        let outcome = (|| -> Result<(f64, f64), String> {
            let records = bench_records.as_ref().map_err(|e| e.clone())?;
            let mean = |m: Method| {
                records
                    .iter()
                    .find(|r| r.dim == 4096 && r.method == m)
                    .and_then(|r| r.mean_seconds)
                    .ok_or_else(|| format!("no usable record for {m} at 4096"))
            };
            Ok((mean(Method::EpmpSeq)?, mean(Method::EpmpPar)?))
        })();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Err(e) => report.push(7, "parallel beats sequential at n=4096", Status::Fail, e, secs),
            Ok((seq, par)) => {
                let detail =
                    format!("seq {:.3}s vs par {:.3}s with 4 workers on {cores} core(s)", seq, par);
                if par <= seq {
                    report.push(7, "parallel beats sequential at n=4096", Status::Pass, detail, secs);
                } else if cores < 4 {
                    report.push(
                        7,
                        "parallel beats sequential at n=4096",
                        Status::Warn,
                        format!("{detail}; downgraded to warning on < 4 cores"),
                        secs,
                    );
                } else {
                    report.push(7, "parallel beats sequential at n=4096", Status::Fail, detail, secs);
                }
            }
        }
    }

    // 8. Arnoldi on the 200x200 planted matrix.
    report.run(8, "arnoldi ritz extraction", || {
        let q1 = seeded_unit_vector(200, 800).map_err(|e| e.to_string())?;
        let fact = arnoldi_factorize(&a200, &q1, 30).map_err(|e| e.to_string())?;
        let top = ritz_values(&fact).map_err(|e| e.to_string())?[0];
        if (top.0 - 10.0).abs() > 1e-8 {
            return Err(format!("top Ritz value {} misses 10 by more than 1e-8", top.0));
        }

        // Relation residual ||A Q_k - Q H||_F via naive loops.
        let n = 200;
        let rows = fact.h_rows();
        let mut sum = 0.0;
        for col in 0..fact.steps() {
            for i in 0..n {
                let mut aq = 0.0;
                for j in 0..n {
                    aq += a200.get(i, j) * fact.basis()[col][j];
                }
                let mut qh = 0.0;
                for j in 0..rows {
                    qh += fact.basis()[j][i] * fact.h(j, col);
                }
                let d = aq - qh;
                sum += d * d;
            }
        }
        let rel_residual = sum.sqrt();
        let bound = 1e-8 * a200.frobenius_norm();
        if rel_residual > bound {
            return Err(format!("relation residual {rel_residual:.3e} > {bound:.3e}"));
        }

        let mut max_upper = 0.0f64;
        for i in 0..fact.steps() {
            for j in 0..rows {
                if j + 1 < i {
                    max_upper = max_upper.max(fact.h(j, i).abs());
                }
            }
        }
        if max_upper > 1e-10 {
            return Err(format!("H not tridiagonal: max off-band {max_upper:.3e} > 1e-10"));
        }
        Ok(format!(
            "top Ritz {:.12}, relation residual {rel_residual:.2e}, off-band max {max_upper:.2e}",
            top.0
        ))
    });

    // 9. SA machinery: empirical Metropolis rates and the cooling sequence.
    report.run(9, "metropolis rates and cooling schedule", || {
        use rand::{Rng, SeedableRng};
        let mut details = Vec::new();
        for ratio in [0.1f64, std::f64::consts::LN_2, 3.0] {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(900);
            let t = 1.0;
            let draws = 100_000u32;
            let mut accepted = 0u32;
            for _ in 0..draws {
                let r: f64 = rng.random();
                if metropolis_decide(1.0 + ratio * t, 1.0, t, r).map_err(|e| e.to_string())?
                    == SaDecision::AcceptWorse
                {
                    accepted += 1;
                }
            }
            let freq = f64::from(accepted) / f64::from(draws);
            let expect = (-ratio).exp();
            if (freq - expect).abs() > 0.01 {
                return Err(format!(
                    "gap/T = {ratio:.3}: empirical {freq:.4} vs exp {expect:.4} beyond 0.01"
                ));
            }
            details.push(format!("{ratio:.3}:{freq:.4}~{expect:.4}"));
        }

        let (t0, alpha) = (2.0f64, 0.9f64);
        let mut t = t0;
        let mut mirror = t0;
        for step in 0..300 {
            t = cooling_step(t, alpha);
            mirror *= alpha;
            if t != mirror {
                return Err(format!("cooling diverged from mirrored product at step {step}"));
            }
        }
        Ok(format!("accept-worse rates {}; 300 cooling steps exact", details.join(" ")))
    });

    // 10. Deflation then re-solve recovers lambda2 = 5.
    report.run(10, "deflation exposes the second eigenvalue", || {
        let mut cfg = tuned_cfg(1000);
        cfg.res_tol = 1e-10;
        let top = power_method(&a200, &cfg).map_err(|e| e.to_string())?;
        if !top.converged {
            return Err("first solve did not converge".into());
        }
        let deflated =
            deflate_hotelling(&a200, top.lambda, &top.eigenvector).map_err(|e| e.to_string())?;
        let second = power_method(&deflated, &cfg).map_err(|e| e.to_string())?;
        if !second.converged {
            return Err("second solve did not converge".into());
        }
        if (second.lambda - 5.0).abs() > 1e-6 {
            return Err(format!("lambda2 {} misses 5 by more than 1e-6", second.lambda));
        }
        Ok(format!("lambda1 {:.10}, lambda2 {:.10}", top.lambda, second.lambda))
    });

    report.finish();
}
