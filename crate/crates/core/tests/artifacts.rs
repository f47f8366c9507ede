use becfano::config::{from_json, from_toml};
use becfano::io::{read_grid_csv, validate_spectrum_csv, write_grid_csv, write_spectrum_csv};
use becfano::model::{normalize, SystemParams};
use becfano::response::ResponseMode;
use becfano::sweep::{
    preset, run_spectra, run_sweep, Axis, Observable, Param, PresetOutput, StabilityPolicy,
    SweepSpec,
};

fn csv_of(out: &PresetOutput) -> String {
    let mut buf = Vec::new();
    match out {
        PresetOutput::Spectra(s) => write_spectrum_csv(&mut buf, s).unwrap(),
        PresetOutput::Grid(r) => write_grid_csv(&mut buf, r).unwrap(),
    }
    String::from_utf8(buf).unwrap()
}

#[test]
fn presets_are_bit_identical_across_runs() {
    for name in ["fig2a", "fig7", "fig8"] {
        let p = preset(name).unwrap();
        assert_eq!(
            csv_of(&p.run().unwrap()),
            csv_of(&p.run().unwrap()),
            "{name}"
        );
    }
}

#[test]
fn every_preset_has_a_valid_shape() {
    for name in ["fig2a", "fig3a", "fig5b", "fig6", "fig7"] {
        let text = csv_of(&preset(name).unwrap().run().unwrap());
        assert!(validate_spectrum_csv(&text).unwrap() >= 2001, "{name}");
    }
    let text = csv_of(&preset("fig4a").unwrap().run().unwrap());
    let g = read_grid_csv(&text).unwrap();
    assert_eq!((g.axis1.len(), g.axis2.len()), (201, 201));
    assert_eq!(g.corner, "detuning\\delta_bar");
}

#[test]
fn unstable_points_are_gaps_by_default() {
    let spec = SweepSpec::new(
        SystemParams::figure_base(1.0, 0.1),
        Axis::linspace(Param::DeltaBar, -0.2, 0.2, 41).unwrap(),
        Observable::Mu,
    );
    assert_eq!(spec.stability, StabilityPolicy::Gap);
    let set = run_spectra(&spec).unwrap();
    assert!(set.blocks[0].spectrum.rows.iter().all(Option::is_none));
    assert_eq!(set.provenance.unstable_points, 41);

    let mut buf = Vec::new();
    write_spectrum_csv(&mut buf, &set).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",,,,,,,")));
}

#[test]
fn printed_and_solver_modes_differ() {
    let mut spec = SweepSpec::new(
        SystemParams::figure_base(0.8, 0.02),
        Axis::linspace(Param::DeltaBar, -0.3, 0.3, 31).unwrap(),
        Observable::Mu,
    );
    let solver = run_sweep(&spec).unwrap();
    spec.mode = ResponseMode::Printed;
    let printed = run_sweep(&spec).unwrap();
    assert_ne!(solver.values, printed.values);
    assert_eq!(printed.provenance.mode, ResponseMode::Printed);
}

#[test]
fn toml_and_json_describe_the_same_system() {
    let s = from_toml(
        "[cavity]\nkappa_hz = 2e3\ndetuning_wb = 0.9\n[condensate]\ng_wb = 0.03\nu_eff_wb = 10\n",
        &[],
    )
    .unwrap();
    let json = serde_json::to_string(&s.params).unwrap();
    let back = from_json(&json, &[]).unwrap();
    assert_eq!(back.params, s.params);
    let (a, _) = normalize(&s.params).unwrap();
    let (b, _) = normalize(&back.params).unwrap();
    assert_eq!(a, b);
    assert!((a.kappa - 0.2).abs() < 1e-15);
}
