use std::fs::File;

use phasezeros::diagram::{build_phase_diagram, DiagramOptions};
use phasezeros::io::{
    emit_svg, load_model, model_to_json, read_numeric_csv, read_zeros_csv, write_curve_csv, write_zeros_csv,
    CURVE_COLUMNS,
};
use phasezeros::model::{finite_volume, presets, Grid, Perturbation, Rect};
use phasezeros::zeros::{find_zeros_region, DEFAULT_MAX_DEPTH};

#[test]
fn model_file_to_zero_table_and_back() {
    let dir = tempfile::tempdir().unwrap();
    let model_path = dir.path().join("m2.json");
    std::fs::write(&model_path, model_to_json(&presets::two_phase(1, 2))).unwrap();
    let model = load_model(&model_path).unwrap();
    assert_eq!(model, presets::two_phase(1, 2));

    let fvm = finite_volume(&model, 100, 1, 1.0, 1.0, &Perturbation::None, 0.0).unwrap();
    let zs = find_zeros_region(&fvm, Rect::new(-0.1, 0.1, 0.0, 0.2), DEFAULT_MAX_DEPTH).unwrap();
    let csv_path = dir.path().join("zeros.csv");
    write_zeros_csv(File::create(&csv_path).unwrap(), &zs.zeros).unwrap();
    let back = read_zeros_csv(File::open(&csv_path).unwrap()).unwrap();
    assert_eq!(back, zs.zeros);
}

#[test]
fn curve_table_round_trips() {
    let m3 = presets::three_phase(&[1, 1, 1]);
    let d = build_phase_diagram(&m3, &Grid::new(m3.domain(), 21, 21), &DiagramOptions::for_model(&m3));
    for curve in &d.curves {
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, curve).unwrap();
        let (header, rows) = read_numeric_csv(buf.as_slice()).unwrap();
        assert_eq!(header, CURVE_COLUMNS);
        assert_eq!(rows.len(), curve.samples.len());
        for (r, s) in rows.iter().zip(&curve.samples) {
            assert_eq!(r[..], [s.t, s.z.re, s.z.im, s.v_m.re, s.v_m.im, s.v_n.re, s.v_n.im]);
        }
    }
}

#[test]
fn svg_is_deterministic() {
    let m3 = presets::three_phase(&[1, 1, 2]);
    let render = || {
        let d = build_phase_diagram(&m3, &Grid::new(m3.domain(), 21, 21), &DiagramOptions::for_model(&m3));
        emit_svg(&d, &[], m3.domain(), m3.domain()).unwrap()
    };
    assert_eq!(render(), render());
}
