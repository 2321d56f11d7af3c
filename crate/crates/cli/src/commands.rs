use std::fs;
use std::path::Path;

use quasisym_core::convexity::{
    certify_h_convex, certify_hprime_convex, default_pk_ceiling, find_pk, scan_profile, CertificateMode,
};
use quasisym_core::format::{self, write_atomic};
use quasisym_core::nonlin::{
    bundle_for, solve_g, validate_growth, DerivativeBundle, Diffusion, NonlinearitySpec, SourceKind, Weight,
};
use quasisym_core::planar::{
    planar_warnings, reflection_diagnostics, solve_planar, symmetry_metrics, GridField, PlanarControls, PlanarField,
    PlanarProblemSpec,
};
use quasisym_core::radial::{
    morse_index, nodal_report, solve_radial_for_spec, MorseOptions, RadialControls, RadialDomain, RadialProblemSpec,
    RadialSolution, ShootingParameter,
};
use quasisym_core::report::to_json;
use quasisym_core::{Error, Result};
use serde_json::json;

use crate::cli::*;

const DEFAULT_G_TOL: f64 = 1e-12;
/// g-table half-width for planar runs without `--table-smax`.
const PLANAR_TABLE_SMAX: f64 = 200.0;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Certify(a) => certify(a),
        Command::FindPk(a) => find_pk_cmd(a),
        Command::Scan(a) => scan(a),
        Command::TabulateG(a) => tabulate_g(a),
        Command::SolveRadial(a) => solve_radial_cmd(a),
        Command::Morse(a) => morse(a),
        Command::NodalCheck(a) => nodal_check(a),
        Command::SolvePlanar(a) => solve_planar_cmd(a),
        Command::Diagnose(a) => diagnose(a),
        Command::GrowthCheck(a) => growth_check(a),
    }
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    if let Some(path) = out {
        write_atomic(path, contents)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Flag, then solution-file descriptor, then default.
struct Resolved {
    spec: NonlinearitySpec,
    table_smax: Option<f64>,
    g_tol: f64,
}

fn descriptor_f64(desc: &[(String, String)], key: &str) -> Result<Option<f64>> {
    format::descriptor_value(desc, key)
        .map(|v| {
            v.parse::<f64>()
                .map_err(|_| Error::Parse(format!("descriptor `{key}={v}` is not a number")))
        })
        .transpose()
}

fn resolve_spec(a: &SpecArgs, desc: &[(String, String)], dim: usize) -> Result<Resolved> {
    let diffusion = match (a.const_a, a.k) {
        (Some(c), _) => Diffusion::Constant { c },
        (None, Some(k)) => Diffusion::Power { k },
        (None, None) => match (descriptor_f64(desc, "const-a")?, descriptor_f64(desc, "k")?) {
            (Some(c), _) => Diffusion::Constant { c },
            (None, Some(k)) => Diffusion::Power { k },
            (None, None) => Diffusion::Power { k: 2.0 },
        },
    };
    let p = match a.p {
        Some(p) => p,
        None => descriptor_f64(desc, "p")?.ok_or_else(|| Error::InvalidInput("missing --p".into()))?,
    };
    let source = match a.fsign {
        Some(s) => s,
        None => match format::descriptor_value(desc, "fsign") {
            Some(s) => s.parse()?,
            None => SourceKind::PositivePart,
        },
    };
    let psi = match a.psi {
        Some(w) => w,
        None => match format::descriptor_value(desc, "psi") {
            Some(s) => s.parse()?,
            None => Weight::Constant { value: 1.0 },
        },
    };
    let table_smax = match a.table_smax {
        Some(s) => Some(s),
        None => descriptor_f64(desc, "table-smax")?,
    };
    let g_tol = match a.g_tol {
        Some(t) => t,
        None => descriptor_f64(desc, "g-tol")?.unwrap_or(DEFAULT_G_TOL),
    };
    Ok(Resolved {
        spec: NonlinearitySpec::new(diffusion, p, psi, source, dim)?,
        table_smax,
        g_tol,
    })
}

/// Descriptor pairs that let a later command rebuild the same nonlinearity.
fn spec_pairs(spec: &NonlinearitySpec, table_smax: f64, g_tol: f64) -> Vec<(String, String)> {
    let mut out = Vec::new();
    match spec.diffusion {
        Diffusion::Power { k } => out.push(("k".to_string(), k.to_string())),
        Diffusion::Constant { c } => out.push(("const-a".to_string(), c.to_string())),
    }
    out.push(("p".into(), spec.p.to_string()));
    out.push(("fsign".into(), spec.source.to_string()));
    out.push(("psi".into(), spec.psi.to_string()));
    out.push(("table-smax".into(), table_smax.to_string()));
    out.push(("g-tol".into(), format!("{g_tol:e}")));
    out
}

fn certify(a: CertifyArgs) -> Result<()> {
    let mode = CertificateMode::from(a.mode);
    let h = certify_h_convex(a.p, a.k);
    let hp = certify_hprime_convex(a.p, a.k, mode)?;
    println!("p={} k={} mode={}", a.p, a.k, mode_name(mode));
    println!(
        "gamma=({}, {}, {})",
        hp.gamma.gamma1, hp.gamma.gamma2, hp.gamma.gamma3
    );
    println!("q=({}, {}, {}, {}) in powers X^3..X^0 of X = s^k", hp.q.c3, hp.q.c2, hp.q.c1, hp.q.c0);
    println!("h_convex={} ({})", h.certified, h.reason);
    println!("certified={} ({})", hp.certified, hp.reason);
    let doc = json!({ "h_convex": h, "hprime_convex": hp });
    emit(a.out.as_deref(), &to_json(&doc))
}

fn mode_name(m: CertificateMode) -> &'static str {
    match m {
        CertificateMode::Sharp => "sharp",
        CertificateMode::Sufficient => "sufficient",
    }
}

fn find_pk_cmd(a: FindPkArgs) -> Result<()> {
    let mode = CertificateMode::from(a.mode);
    let pk = find_pk(a.k, mode, a.tol)?;
    let ceiling = default_pk_ceiling(a.k);
    println!("k={} mode={} tol={}", a.k, mode_name(mode), a.tol);
    println!("p_k={pk}");
    let doc = json!({ "k": a.k, "mode": mode, "tol": a.tol, "p_k": pk, "ceiling": ceiling });
    emit(a.out.as_deref(), &to_json(&doc))
}

fn scan(a: ScanArgs) -> Result<()> {
    let r = resolve_spec(&a.spec, &[], 3)?;
    let table = r.table_smax.unwrap_or(a.smax.max(1.0));
    let bundle = bundle_for(r.spec, table, r.g_tol)?;
    let prof = scan_profile(&bundle, a.order, (a.smin, a.smax), a.samples)?;
    println!("order={} samples={} range=[{}, {}]", a.order, a.samples, a.smin, a.smax);
    println!("min={} at s={}", format::num(prof.min), format::num(prof.argmin));
    println!("max={}", format::num(prof.max));
    emit(a.out.as_deref(), &prof.to_csv())
}

fn tabulate_g(a: TabulateArgs) -> Result<()> {
    let diffusion = match (a.const_a, a.k) {
        (Some(c), _) => Diffusion::Constant { c },
        (None, k) => Diffusion::Power { k: k.unwrap_or(2.0) },
    };
    // p, ψ and the source do not enter g
    let spec = NonlinearitySpec::new(diffusion, 2.0, Weight::Constant { value: 1.0 }, SourceKind::PositivePart, 3)?;
    let g = solve_g(&spec, a.smax, a.g_tol)?;
    println!("nodes={} spacing={} g(smax)={}", g.nodes().len(), g.spacing(), format::num(g.range()));
    emit(a.out.as_deref(), &g.to_csv())
}

fn solve_radial_cmd(a: SolveRadialArgs) -> Result<()> {
    let r = resolve_spec(&a.spec, &[], a.dim)?;
    let domain = match a.domain {
        DomainArg::Ball => RadialDomain::Ball { radius: a.radius },
        DomainArg::Annulus => RadialDomain::Annulus {
            inner: a.inner,
            outer: a.outer,
        },
    };
    let problem = RadialProblemSpec {
        domain,
        dim: a.dim,
        target_nodes: a.nodes,
    };
    let controls = RadialControls {
        ode_tol: a.ode_tol,
        bc_tol: a.bc_tol,
        max_bisections: a.max_bisections,
        grid_intervals: a.grid,
        initial_parameter: a.initial,
    };
    let (sol, bundle) = solve_radial_for_spec(&problem, r.spec, &controls, r.table_smax, r.g_tol)?;
    let growth = validate_growth(&r.spec);
    match sol.parameter {
        ShootingParameter::CenterValue(x) => println!("alpha={}", format::num(x)),
        ShootingParameter::InnerSlope(x) => println!("beta={}", format::num(x)),
    }
    println!("interior_zeros={} grid={}", sol.interior_zeros, a.grid);
    println!(
        "residual semilinear={} quasilinear={}",
        format::num(sol.semilinear_residual),
        format::num(sol.quasilinear_residual)
    );
    println!(
        "residual4 semilinear={} quasilinear={}",
        format::num(sol.semilinear_residual_fourth_order),
        format::num(sol.quasilinear_residual_fourth_order)
    );
    println!("table_smax={} in_nodal_window={}", bundle.g().s_max(), growth.in_nodal_window());
    emit(
        a.out.as_deref(),
        &sol.to_csv(&spec_pairs(&r.spec, bundle.g().s_max(), r.g_tol)),
    )
}

fn load_radial(path: &Path, spec: &SpecArgs) -> Result<(RadialSolution, DerivativeBundle, NonlinearitySpec)> {
    let (sol, desc) = RadialSolution::from_csv(&read_file(path)?)?;
    let r = resolve_spec(spec, &desc, sol.dim)?;
    let max_v = sol.v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let table = r.table_smax.unwrap_or_else(|| (1.5 * max_v).max(quasisym_core::nonlin::DEFAULT_S_MAX));
    let bundle = bundle_for(r.spec, table, r.g_tol)?;
    Ok((sol, bundle, r.spec))
}

fn morse(a: MorseArgs) -> Result<()> {
    let (sol, bundle, _) = load_radial(&a.solution, &a.spec)?;
    let opts = MorseOptions {
        l_max: a.l_max,
        modes_grid: a.modes_grid,
    };
    let report = morse_index(&sol, &bundle, &opts)?;
    println!("morse_index={}", report.index);
    for m in &report.modes {
        println!("l={} multiplicity={} negative={}", m.l, m.multiplicity, m.negative);
    }
    if report.possibly_truncated || report.borderline {
        println!(
            "caveat: possibly_truncated={} borderline={}",
            report.possibly_truncated, report.borderline
        );
    }
    emit(a.csv.as_deref(), &report.to_csv())?;
    emit(a.out.as_deref(), &to_json(&report))
}

fn nodal_check(a: NodalArgs) -> Result<()> {
    let (sol, bundle, spec) = load_radial(&a.solution, &a.spec)?;
    let opts = MorseOptions {
        l_max: a.l_max,
        modes_grid: a.modes_grid,
    };
    let report = morse_index(&sol, &bundle, &opts)?;
    let nodal = nodal_report(&sol, &report, sol.dim);
    let growth = validate_growth(&spec);
    println!("nod_u={} morse_index={} bound={}", nodal.nod_u, nodal.morse_index, nodal.bound);
    println!("satisfied={} in_nodal_window={}", nodal.satisfied, growth.in_nodal_window());
    if nodal.morse_caveat {
        println!("caveat: Morse count may be incomplete");
    }
    let doc = json!({
        "nodal": nodal,
        "in_nodal_window": growth.in_nodal_window(),
        "growth": growth,
        "morse": report,
    });
    emit(a.out.as_deref(), &to_json(&doc))
}

fn solve_planar_cmd(a: SolvePlanarArgs) -> Result<()> {
    let r = resolve_spec(&a.spec, &[], 2)?;
    let table = r.table_smax.unwrap_or(PLANAR_TABLE_SMAX);
    let bundle = bundle_for(r.spec, table, r.g_tol)?;
    let problem = PlanarProblemSpec {
        half_width: a.half_width,
        height: a.height,
        n1: a.n1,
        n2: a.n2,
    };
    let controls = PlanarControls {
        tol: a.tol,
        max_iterations: a.max_iterations,
        seed_tilt: a.tilt,
    };
    let mut field = solve_planar(&problem, &bundle, &controls)?;
    field.warnings.extend(planar_warnings(&r.spec));
    println!(
        "converged={} trivial={} iterations={} seeds={}",
        field.converged, field.trivial, field.iterations, field.seeds_tried
    );
    println!("residual={} max_abs_u={}", format::num(field.residual), format::num(field.max_abs_u()));
    for w in &field.warnings {
        println!("warning: {w}");
    }
    emit(a.out.as_deref(), &field.to_csv(&spec_pairs(&r.spec, table, r.g_tol)))
}

fn diagnose(a: DiagnoseArgs) -> Result<()> {
    let text = read_file(&a.solution)?;
    let is_planar = text
        .lines()
        .filter(|l| l.starts_with('#'))
        .any(|l| l.trim_start_matches('#').trim_start().starts_with("mesh"));
    let doc = if is_planar {
        let (field, desc) = PlanarField::from_csv(&text)?;
        let r = resolve_spec(&a.spec, &desc, 2)?;
        let table = r.table_smax.unwrap_or(PLANAR_TABLE_SMAX);
        let bundle = bundle_for(r.spec, table, r.g_tol)?;
        let refl = reflection_diagnostics(&field, &bundle, a.solution_tol)?;
        let sym = symmetry_metrics(&GridField::from_planar(&field), a.directions)?;
        println!("kind=planar label={}", refl.label);
        println!("residual={} quadrature_tol={}", format::num(refl.residual), format::num(refl.quadrature_tol));
        println!(
            "slope_discrepancy={} slope_max_positive={} energy_max={}",
            format::num(refl.slope_discrepancy),
            format::num(refl.slope_max_positive),
            format::num(refl.energy_max)
        );
        println!(
            "slope_holds={} reflection_gap_holds={} energy_holds={}",
            verdict(refl.slope_holds),
            verdict(refl.reflection_gap_holds),
            verdict(refl.energy_holds)
        );
        println!("c1_fraction={} c2_fraction={}", refl.c1_fraction, refl.c2_fraction);
        println!("even_deviation={}", format::num(sym.even_deviation));
        json!({ "kind": "planar", "reflection": refl, "symmetry": sym })
    } else {
        let (sol, _) = RadialSolution::from_csv(&text)?;
        let sym = symmetry_metrics(&GridField::from_radial(&sol, a.half_nodes), a.directions)?;
        println!("kind=radial");
        println!(
            "even_deviation={} foliated_schwarz_deviation={}",
            format::num(sym.even_deviation),
            format::num(sym.foliated_schwarz_deviation)
        );
        json!({ "kind": "radial", "symmetry": sym })
    };
    emit(a.out.as_deref(), &to_json(&doc))
}

fn verdict(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "n/a",
    }
}

fn growth_check(a: GrowthArgs) -> Result<()> {
    let spec = NonlinearitySpec::power(a.k, a.p, a.dim)?;
    let g = validate_growth(&spec);
    println!("k={} p={} N={}", g.k, g.p, g.dim);
    println!("bound={}", g.bound);
    println!("subcritical={}", g.subcritical);
    println!(
        "p_gt_k_plus_1={} p_gt_half_k={} in_nodal_window={}",
        g.p_gt_k_plus_1,
        g.p_gt_half_k,
        g.in_nodal_window()
    );
    emit(a.out.as_deref(), &to_json(&g))
}
