//! Acceptance suite: one PASS/FAIL line per criterion, with timings. Runs
//! without the libtest harness so the lines always reach stdout.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use quasisym_core::convexity::{
    find_pk, gamma_coefficients, pi_coefficients, qp_coefficients, qp_eval, scan_profile, CertificateMode,
    GammaTriple,
};
use quasisym_core::nonlin::{bundle_for, solve_g, LinearSource, NonlinearitySpec, SourceKind};
use quasisym_core::planar::{
    reflection_diagnostics, solve_planar, symmetry_metrics, GridField, PlanarControls, PlanarProblemSpec,
};
use quasisym_core::radial::{
    morse_index, morse_index_for_potential, nodal_report, solve_radial, solve_radial_for_spec, MorseOptions,
    RadialControls, RadialDomain, RadialProblemSpec,
};
use quasisym_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// (p, k) with 2 < k + 1 < p < 20.
fn random_pk(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let k = rng.gen_range(1.0 + 1e-9..18.0);
    let p = rng.gen_range(k + 1.0 + 1e-9..20.0);
    (p, k)
}

fn gamma_identities() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (p, k) = random_pk(&mut rng);
        let g = gamma_coefficients(p, k);
        worst = worst
            .max(rel(g.gamma1, GammaTriple::gamma1_factored(p, k)))
            .max(rel(g.gamma2, GammaTriple::gamma2_factored(p, k)));
    }
    Ok(Outcome {
        pass: worst <= 1e-12,
        detail: format!("max rel err {worst:.2e} over 1000 (p,k)"),
    })
}

fn qp_expansion() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (p, k) = random_pk(&mut rng);
        let pi = pi_coefficients(p, k);
        let q = qp_coefficients(p, k);
        for _ in 0..100 {
            let s = 10.0 * (1.0 - rng.gen::<f64>());
            worst = worst.max(rel(pi.eval_factored(k, s), qp_eval(&q, k, s)));
        }
    }
    let q = qp_coefficients(5.0, 2.0);
    let anchor = (q.c3, q.c2, q.c1, q.c0) == (0.0, 32.0, 160.0, 240.0) && qp_eval(&q, 2.0, 1.0) == 432.0;
    Ok(Outcome {
        pass: worst <= 1e-10 && anchor,
        detail: format!("max rel err {worst:.2e} over 100x100 samples; anchor (p=5,k=2) {anchor}"),
    })
}

fn bridge_identity() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for k in [2.0, 3.0] {
        for p in [5.0, 7.0, 9.0] {
            let spec = NonlinearitySpec::power(k, p, 3)?;
            let b = bundle_for(spec, 5.0, 1e-12)?;
            for i in 0..50 {
                let s = 0.1 + 4.9 * i as f64 / 49.0;
                let t = b.g().eval(s)?;
                let a = 1.0 + t.powf(k);
                let lhs = 4.0 * a.powi(5) * b.h_eval(&[0.0], s, 3)?;
                let rhs = t.powf(p - 3.0) * qp_eval(&qp_coefficients(p, k), k, t);
                worst = worst.max(rel(lhs, rhs));
            }
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-8,
        detail: format!("max rel err {worst:.2e} over 6 (k,p) x 50 points"),
    })
}

fn sign_profiles() -> Result<Outcome> {
    let scan = |k: f64, p: f64, order: u32, hi: f64| -> Result<f64> {
        let b = bundle_for(NonlinearitySpec::power(k, p, 3)?, hi, 1e-12)?;
        Ok(scan_profile(&b, order, (1e-3, hi), 2000)?.min)
    };
    let fig1 = scan(3.0, 3.0, 2, 2.0)?;
    let fig2 = scan(2.0, 3.2, 3, 10.0)?;
    let fig3a = scan(2.0, 5.0, 3, 10.0)?;
    let fig3b = scan(2.0, 7.0, 3, 10.0)?;
    Ok(Outcome {
        pass: fig1 < 0.0 && fig2 < 0.0 && fig3a > 0.0 && fig3b > 0.0,
        detail: format!(
            "min h''(k=p=3) {fig1:.3e}; min h'''(k=2,p=3.2) {fig2:.3e}; min h'''(k=2,p=5) {fig3a:.3e}; min h'''(k=2,p=7) {fig3b:.3e}"
        ),
    })
}

fn threshold() -> Result<Outcome> {
    let pk = find_pk(2.0, CertificateMode::Sharp, 1e-3)?;
    Ok(Outcome {
        pass: (pk - 5.0).abs() <= 1e-3 && pk < 11.0,
        detail: format!("p_2 = {pk:.6}"),
    })
}

fn transform() -> Result<Outcome> {
    let g = solve_g(&NonlinearitySpec::power(2.0, 3.0, 3)?, 20.0, 1e-12)?;
    let mut worst = 0.0f64;
    let mut odd = 0.0f64;
    for i in 1..=100 {
        let gv = 4.0 * i as f64 / 100.0;
        let s = 0.5 * (gv * (1.0 + gv * gv).sqrt() + gv.asinh());
        worst = worst.max((g.eval(s)? - gv).abs());
        odd = odd.max((g.eval(-s)? + g.eval(s)?).abs());
    }
    Ok(Outcome {
        pass: worst <= 1e-8 && odd <= 1e-12,
        detail: format!("closed-form err {worst:.2e}; oddness err {odd:.2e}"),
    })
}

fn ball(radius: f64, nodes: usize) -> RadialProblemSpec {
    RadialProblemSpec {
        domain: RadialDomain::Ball { radius },
        dim: 3,
        target_nodes: nodes,
    }
}

fn grid(m: usize) -> RadialControls {
    RadialControls {
        grid_intervals: m,
        ..Default::default()
    }
}

fn radial_solver() -> Result<Outcome> {
    let lin = solve_radial(&ball(PI, 0), &LinearSource { lambda: 1.0 }, &grid(2000))?;
    let alpha = lin.parameter.value();
    let sinc_err = lin
        .grid
        .iter()
        .zip(&lin.v)
        .skip(1)
        .fold(0.0f64, |m, (r, v)| m.max((v - alpha * r.sin() / r).abs()))
        / alpha;
    let lin_res = lin.semilinear_residual_fourth_order;

    let spec = NonlinearitySpec::power(2.0, 5.0, 3)?;
    let b = bundle_for(spec, 20.0, 1e-12)?;
    let coarse = solve_radial(&ball(1.0, 0), &b, &grid(500))?;
    let fine = solve_radial(&ball(1.0, 0), &b, &grid(1000))?;
    let (s0, s1) = (coarse.semilinear_residual_fourth_order, fine.semilinear_residual_fourth_order);
    let (q0, q1) = (coarse.quasilinear_residual_fourth_order, fine.quasilinear_residual_fourth_order);
    let positive = fine.v[..fine.v.len() - 1].iter().all(|v| *v > 0.0);
    // second-order stencils, reported for reference
    let (ls, lq) = (coarse.semilinear_residual, coarse.quasilinear_residual);
    let (hs, hq) = (fine.semilinear_residual, fine.quasilinear_residual);
    Ok(Outcome {
        pass: lin_res <= 1e-8
            && sinc_err <= 1e-8
            && positive
            && s1 <= 1e-5
            && q1 <= 1e-5
            && s0 / s1 >= 4.0
            && q0 / q1 >= 4.0,
        detail: format!(
            "sinc residual {lin_res:.2e}, profile err {sinc_err:.2e}; k=2,p=5 M=500/1000 semi {s0:.2e}/{s1:.2e} (x{:.1}) quasi {q0:.2e}/{q1:.2e} (x{:.1}); 3-point stencils semi x{:.2} quasi x{:.2}",
            s0 / s1,
            q0 / q1,
            ls / hs,
            lq / hq
        ),
    })
}

fn morse() -> Result<Outcome> {
    let m = 2000;
    let radii: Vec<f64> = (0..=m).map(|i| PI * i as f64 / m as f64).collect();
    let oracle = morse_index_for_potential(&RadialDomain::Ball { radius: PI }, 3, &radii, &vec![2.0; m + 1], None)?;
    // Dirichlet eigenvalues on the ball of radius π are (j_{l+1/2,n}/π)²; below 2 only j_{1/2,1} = π qualifies
    let bessel_zeros = [(0usize, PI), (0, 2.0 * PI), (1, 4.493409457909064), (2, 5.763459196894550)];
    let expected_l0 = bessel_zeros.iter().filter(|(l, j)| *l == 0 && (j / PI).powi(2) < 2.0).count();
    let expected_l1 = bessel_zeros.iter().filter(|(l, j)| *l == 1 && (j / PI).powi(2) < 2.0).count();
    let oracle_ok = oracle.index == 1
        && oracle.modes[0].negative == expected_l0
        && oracle.modes.get(1).map(|x| x.negative) == Some(expected_l1);

    let spec = NonlinearitySpec::power(2.0, 5.0, 3)?;
    let b = bundle_for(spec, 20.0, 1e-12)?;
    let counts = |m: usize| -> Result<Vec<(usize, usize)>> {
        let sol = solve_radial(&ball(1.0, 0), &b, &grid(m))?;
        let rep = morse_index(&sol, &b, &MorseOptions::default())?;
        Ok(rep.modes.iter().map(|x| (x.l, x.negative)).collect())
    };
    let (c0, c1) = (counts(2000)?, counts(4000)?);
    Ok(Outcome {
        pass: oracle_ok && c0 == c1,
        detail: format!("-Δ-2 index {} modes {:?}; k=2,p=5 modes M=2000 {c0:?} M=4000 {c1:?}", oracle.index, oracle.modes.iter().map(|x| x.negative).collect::<Vec<_>>()),
    })
}

fn nodal() -> Result<Outcome> {
    let spec = NonlinearitySpec::power(2.0, 5.0, 3)?.with_source(SourceKind::OddPower);
    let battery = [
        (RadialDomain::Ball { radius: 1.0 }, 1usize),
        (RadialDomain::Ball { radius: 1.0 }, 2),
        (RadialDomain::Annulus { inner: 1.0, outer: 2.0 }, 1),
    ];
    let window = quasisym_core::nonlin::validate_growth(&spec).in_nodal_window();
    let mut pass = window;
    let mut lines = Vec::new();
    for (domain, nodes) in battery {
        let problem = RadialProblemSpec {
            domain,
            dim: 3,
            target_nodes: nodes,
        };
        let (sol, b) = solve_radial_for_spec(&problem, spec, &RadialControls::default(), None, 1e-12)?;
        let m = morse_index(&sol, &b, &MorseOptions::default())?;
        let r = nodal_report(&sol, &m, 3);
        pass &= r.satisfied && !m.possibly_truncated;
        let name = if domain.is_ball() { "ball" } else { "annulus" };
        lines.push(format!("{name}/{nodes}: nod {} <= {:.2} (m={})", r.nod_u, r.bound, r.morse_index));
    }
    Ok(Outcome {
        pass,
        detail: lines.join("; "),
    })
}

fn planar() -> Result<Outcome> {
    let spec = NonlinearitySpec::power(2.0, 5.0, 2)?;
    let b = bundle_for(spec, 200.0, 1e-12)?;
    let rect = |n1: usize, n2: usize| PlanarProblemSpec {
        half_width: 1.0,
        height: 1.0,
        n1,
        n2,
    };
    let controls = PlanarControls::default();
    let coarse = solve_planar(&rect(128, 64), &b, &controls)?;
    let fine = solve_planar(&rect(256, 128), &b, &controls)?;
    let dev = |f: &quasisym_core::planar::PlanarField| -> Result<f64> {
        Ok(symmetry_metrics(&GridField::from_planar(f), 16)?.even_deviation)
    };
    let (d0, d1) = (dev(&coarse)?, dev(&fine)?);
    let refl = reflection_diagnostics(&coarse, &b, 1e-6)?;
    let fd_ok = refl.slope_discrepancy <= 1e-6f64.max(10.0 * refl.residual);
    let usable = coarse.converged && !coarse.trivial && fine.converged && !fine.trivial;
    Ok(Outcome {
        pass: usable
            && d0 <= 1e-5
            && d1 <= d0.max(1e-12)
            && fd_ok
            && refl.slope_holds == Some(true)
            && refl.energy_holds == Some(true),
        detail: format!(
            "even dev 128x64 {d0:.2e}, 256x128 {d1:.2e}; residual {:.2e}; slope fd gap {:.2e}, max positive {:.2e}; energy max {:.2e} (tol {:.2e})",
            refl.residual, refl.slope_discrepancy, refl.slope_max_positive, refl.energy_max, refl.quadrature_tol
        ),
    })
}

type Check = fn() -> Result<Outcome>;

fn main() -> ExitCode {
    let criteria: [(&str, Check, Duration); 10] = [
        ("coefficient identities", gamma_identities, Duration::from_secs(1)),
        ("Q_p expansion", qp_expansion, Duration::from_secs(1)),
        ("bridge identity", bridge_identity, Duration::from_secs(5)),
        ("h derivative sign profiles", sign_profiles, Duration::from_secs(5)),
        ("threshold p_k", threshold, Duration::from_secs(1)),
        ("transform g", transform, Duration::from_secs(1)),
        ("radial solver", radial_solver, Duration::from_secs(30)),
        ("Morse index", morse, Duration::from_secs(60)),
        ("nodal bound", nodal, Duration::from_secs(120)),
        ("planar symmetry", planar, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed < *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {name} [{:.2}s / {}s] {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

