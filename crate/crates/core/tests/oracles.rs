//! Independent reference computations checked against the library.

use nmsse::ansatz::solve_ansatz;
use nmsse::bath::{
    girsanov_shift, memory_kernel, sample_coherent, synthesize_noise, BathConfig, BathSample,
    GirsanovKernel, NoiseKind, NoisePath,
};
use nmsse::models::{
    bloch_from_exact, bloch_from_state, exact_evolve, reduced_density_from_exact, DensityMatrix,
    SystemModel,
};
use nmsse::rng::{standard_normal, trajectory_rng};
use nmsse::sse::{step_actual, step_linear, ExpectationHistory, SystemState, Unraveling};
use nmsse::TimeGrid;
use num_complex::Complex64;

mod common;
use common::{
    c, explicit_actual_coherent, explicit_actual_quadrature, explicit_linear, random_state,
};

#[test]
fn girsanov_matches_fine_quadrature() {
    // Piecewise-constant 8-step history on [0, 8 dt); the coarse left-endpoint
    // sum is compared with the same rule refined 100x, which converges to the
    // integral of α*(t − s) h(s).
    let bath = BathConfig::two_mode(1.0, 2.0).unwrap();
    let dt = 1e-2;
    let grid = TimeGrid::new(dt, 9).unwrap();
    let hist = [
        c(0.3, -0.1),
        c(0.5, 0.2),
        c(-0.7, 0.0),
        c(0.1, 0.9),
        c(0.0, -0.4),
        c(0.8, 0.8),
        c(-0.2, 0.3),
        c(0.6, -0.5),
    ];
    let mut history = ExpectationHistory::new();
    for &h in &hist {
        history.push(h);
    }
    let path = NoisePath {
        grid,
        values: vec![c(0.0, 0.0); grid.len()],
        kind: NoiseKind::Coherent,
    };
    let kernel = GirsanovKernel::Coherent(bath.clone());
    let i = 8;
    let ti = grid.t(i);
    let shift = girsanov_shift(&path, &history, &kernel, i).unwrap();

    let direct: Complex64 = (0..i)
        .map(|j| memory_kernel(&bath, ti - grid.t(j)).conj() * hist[j] * dt)
        .sum();
    assert!((shift - direct).norm() < 1e-13, "{shift} vs {direct}");

    let sub = 100;
    let fine_dt = dt / sub as f64;
    let mut fine = c(0.0, 0.0);
    for j in 0..i * sub {
        let s = j as f64 * fine_dt;
        fine += memory_kernel(&bath, ti - s).conj() * hist[j / sub] * fine_dt;
    }
    // |α'| ≤ Σ g²|Ω| = 4, so each coarse cell differs by at most |h|·4·dt²/2.
    let bound: f64 = hist.iter().map(|h| h.norm() * 4.0 * dt * dt / 2.0).sum();
    assert!((shift - fine).norm() <= bound, "{} > {bound}", (shift - fine).norm());
}

#[test]
fn ansatz_matches_its_defining_integral() {
    let (g, delta) = (1.0, 2.0);
    let grid = TimeGrid::covering(1e-4, 3.0).unwrap();
    let dt = grid.dt();
    let sol = solve_ansatz(g, delta, grid).unwrap();
    let bath = BathConfig::two_mode(g, delta).unwrap();
    // f(t, s) = exp(∫_s^t F), from ∂_t f = f F and f(s, s) = 1.
    let mut cum = vec![c(0.0, 0.0); grid.len()];
    for k in 1..grid.len() {
        cum[k] = cum[k - 1] + 0.5 * dt * (sol.f_total[k] + sol.f_total[k - 1]);
    }
    let mut rng = trajectory_rng(7, 0);
    for _ in 0..10 {
        let i = 1000 + (rand::Rng::random::<u64>(&mut rng) % (grid.len() as u64 - 1000)) as usize;
        let ti = grid.t(i);
        let integrand = |k: usize| memory_kernel(&bath, ti - grid.t(k)) * (cum[i] - cum[k]).exp();
        let mut f = 0.5 * (integrand(0) + integrand(i));
        for k in 1..i {
            f += integrand(k);
        }
        f *= dt;
        assert!(
            (f - sol.f_total[i]).norm() < 1e-6,
            "t = {ti}: {f} vs {}",
            sol.f_total[i]
        );
    }
}

#[test]
fn ansatz_is_even_in_detuning() {
    let grid = TimeGrid::covering(1e-3, 3.0).unwrap();
    let a = solve_ansatz(1.0, 2.0, grid).unwrap();
    let b = solve_ansatz(1.0, -2.0, grid).unwrap();
    for i in 0..grid.len() {
        assert!((a.f_total[i] - b.f_total[i]).norm() <= 1e-12 * (1.0 + a.f_total[i].norm()));
    }
}

#[test]
fn generic_steppers_equal_explicit_amplitude_equations() {
    let model = SystemModel::two_level_atom();
    let mut rng = trajectory_rng(11, 3);
    let start = std::time::Instant::now();
    let mut worst = 0.0f64;
    for unraveling in [Unraveling::Coherent, Unraveling::Quadrature] {
        for _ in 0..100 {
            let (ce, cb) = random_state(&mut rng);
            let f = c(standard_normal(&mut rng), standard_normal(&mut rng));
            let drive = match unraveling {
                Unraveling::Quadrature => c(standard_normal(&mut rng), 0.0),
                _ => c(standard_normal(&mut rng), standard_normal(&mut rng)),
            };
            let state = SystemState::new(vec![ce, cb]);

            let lin = step_linear(&state, &model, unraveling, f, drive, 1.0);
            let (de, db) = explicit_linear(ce, f, drive);
            worst = worst
                .max((lin.amplitudes[0] - ce - de).norm())
                .max((lin.amplitudes[1] - cb - db).norm());

            let act = step_actual(&state, &model, unraveling, f, drive, 1.0).unwrap();
            let (de, db) = match unraveling {
                Unraveling::Quadrature => explicit_actual_quadrature(ce, cb, f, drive),
                _ => explicit_actual_coherent(ce, cb, f, drive),
            };
            worst = worst
                .max((act.amplitudes[0] - ce - de).norm())
                .max((act.amplitudes[1] - cb - db).norm());
        }
    }
    assert!(worst <= 1e-12, "max difference {worst:e}");
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn exact_solution_resonant_closed_form() {
    let grid = TimeGrid::covering(1e-4, 3.0).unwrap();
    let start = std::time::Instant::now();
    let amps = exact_evolve(1.0, 0.0, grid);
    let elapsed = start.elapsed().as_secs_f64();
    for (i, a) in amps.iter().enumerate() {
        let want = (2f64.sqrt() * grid.t(i)).cos();
        assert!((a.c2 - want).norm() < 1e-6);
    }
    assert!(elapsed < 1.0);
}

#[test]
fn exact_solution_invariants() {
    let grid = TimeGrid::covering(1e-4, 3.0).unwrap();
    let amps = exact_evolve(1.0, 2.0, grid);
    assert_eq!(bloch_from_exact(&amps[0]), bloch_from_state(&[c(1.0, 0.0), c(0.0, 0.0)]));
    for a in amps.iter().step_by(97) {
        assert!((a.norm_sqr() - 1.0).abs() < 1e-10);
        let b = bloch_from_exact(a);
        let rho = reduced_density_from_exact(a);
        let rebuilt = DensityMatrix::from_bloch(&b);
        assert!((&rho.0 - &rebuilt.0).max_abs() < 1e-12);
    }
}

#[test]
fn coherent_noise_correlations() {
    // Ẽ[z(t) z*(s)] = 2g² cos(Δ(t−s)) and Ẽ[z(t) z(s)] = 0 for the two-mode
    // bath; each estimate must sit within 5 standard errors.
    let bath = BathConfig::two_mode(1.0, 2.0).unwrap();
    let grid = TimeGrid::covering(1e-2, 3.0).unwrap();
    let n = 10_000u64;
    let mut rng = trajectory_rng(3, 0);
    let pairs: Vec<(usize, usize)> = (0..10)
        .map(|_| {
            let a = (rand::Rng::random::<u64>(&mut rng) % grid.len() as u64) as usize;
            let b = (rand::Rng::random::<u64>(&mut rng) % grid.len() as u64) as usize;
            (a, b)
        })
        .collect();
    let mut cross = vec![Vec::with_capacity(n as usize); pairs.len()];
    let mut same = vec![Vec::with_capacity(n as usize); pairs.len()];
    for k in 0..n {
        let mut r = trajectory_rng(5, k);
        let s = BathSample::Coherent(sample_coherent(&bath, &mut r));
        let path = synthesize_noise(&bath, &s, grid).unwrap();
        for (p, &(a, b)) in pairs.iter().enumerate() {
            cross[p].push(path.values[a] * path.values[b].conj());
            same[p].push(path.values[a] * path.values[b]);
        }
    }
    let check = |xs: &[Complex64], want: Complex64| {
        let m = xs.len() as f64;
        let mean: Complex64 = xs.iter().sum::<Complex64>() / m;
        for part in [|z: Complex64| z.re, |z: Complex64| z.im] {
            let mu = part(mean);
            let var = xs.iter().map(|&z| (part(z) - mu).powi(2)).sum::<f64>() / (m - 1.0);
            let se = (var / m).sqrt();
            assert!((mu - part(want)).abs() <= 5.0 * se + 1e-12, "{mu} vs {}", part(want));
        }
    };
    for (p, &(a, b)) in pairs.iter().enumerate() {
        let tau = grid.t(a) - grid.t(b);
        check(&cross[p], c(2.0 * (2.0 * tau).cos(), 0.0));
        check(&same[p], c(0.0, 0.0));
    }
}
