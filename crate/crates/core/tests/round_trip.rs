use quasisym_core::nonlin::{bundle_for, NonlinearitySpec};
use quasisym_core::planar::{solve_planar, PlanarControls, PlanarField, PlanarProblemSpec};
use quasisym_core::radial::{
    morse_index, solve_radial, MorseOptions, RadialControls, RadialDomain, RadialProblemSpec, RadialSolution,
};

#[test]
fn radial_csv_preserves_profile_and_morse_counts() {
    let spec = NonlinearitySpec::power(2.0, 5.0, 3).unwrap();
    let b = bundle_for(spec, 20.0, 1e-12).unwrap();
    let problem = RadialProblemSpec {
        domain: RadialDomain::Ball { radius: 1.0 },
        dim: 3,
        target_nodes: 0,
    };
    let controls = RadialControls {
        grid_intervals: 400,
        ..Default::default()
    };
    let sol = solve_radial(&problem, &b, &controls).unwrap();
    let text = sol.to_csv(&[("p".into(), "5".into())]);
    let (back, desc) = RadialSolution::from_csv(&text).unwrap();
    assert_eq!(back.domain, sol.domain);
    assert_eq!(back.grid.len(), sol.grid.len());
    assert_eq!(back.interior_zeros, sol.interior_zeros);
    assert!(desc.iter().any(|(k, v)| k == "p" && v == "5"));
    for (a, c) in back.v.iter().zip(&sol.v) {
        assert!((a - c).abs() <= 1e-11 * c.abs().max(1e-300));
    }
    // the written file is a fixed point
    assert_eq!(back.to_csv(&[("p".into(), "5".into())]), text);

    let m0 = morse_index(&sol, &b, &MorseOptions::default()).unwrap();
    let m1 = morse_index(&back, &b, &MorseOptions::default()).unwrap();
    assert_eq!(m0.index, m1.index);
    for (x, y) in m0.modes.iter().zip(&m1.modes) {
        assert_eq!(x.negative, y.negative);
        assert!((x.lambda_min[0] - y.lambda_min[0]).abs() <= 1e-8 * x.lambda_min[0].abs().max(1.0));
    }
}

#[test]
fn planar_csv_preserves_mesh_and_flags() {
    let b = bundle_for(NonlinearitySpec::power(2.0, 5.0, 2).unwrap(), 200.0, 1e-12).unwrap();
    let problem = PlanarProblemSpec {
        half_width: 1.0,
        height: 0.5,
        n1: 16,
        n2: 8,
    };
    let field = solve_planar(&problem, &b, &PlanarControls::default()).unwrap();
    let text = field.to_csv(&[]);
    let (back, _) = PlanarField::from_csv(&text).unwrap();
    assert_eq!(back.problem, problem);
    assert!(back.converged && !back.trivial);
    assert_eq!(back.to_csv(&[]), text);
}
