use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use homsurf::families::{gen_cmc_control, gen_example31, gen_example32, Example31Params, Example32Params};
use homsurf::reconstruction::{
    export_mesh, integrate_surface, path_independence_check, read_mesh_json, verify_reconstruction, MeshFormat, Seed,
};
use homsurf::{AmbientChart, ConformalGrid, FundamentalField, SpaceParams};

fn grid(h: f64, n: usize) -> ConformalGrid {
    ConformalGrid::new(0.0, 0.0, h, h, n, n).unwrap()
}

fn ex31(kappa: f64, h: f64, n: usize) -> FundamentalField {
    let p = Example31Params { kappa, a: 1.0, b: 1.0 };
    gen_example31(&p, grid(h, n)).unwrap()
}

fn ex32(delta: i32, h: f64, n: usize) -> FundamentalField {
    let mut p = Example32Params::new(delta, FRAC_PI_2 + 0.2, 1.0);
    p.step = h;
    gen_example32(&p, grid(h, n)).unwrap()
}

fn families(h: f64, n: usize) -> Vec<(&'static str, FundamentalField)> {
    vec![
        ("rotational k=-1", ex31(-1.0, h, n)),
        ("rotational k=1", ex31(1.0, h, n)),
        ("q=1 delta=1", ex32(1, h, n)),
        ("q=1 delta=-1", ex32(-1, h, n)),
        ("cylinder", gen_cmc_control(&SpaceParams::new(0.0, 1.0).unwrap(), 0.2, grid(h, n)).unwrap()),
    ]
}

#[test]
fn drift_stays_small_without_corrections() {
    for (name, d) in families(5e-3, 61) {
        let m = integrate_surface(&d, &AmbientChart::new(d.space), &Seed::default()).unwrap();
        assert!(m.max_drift <= 1e-6, "{name}: {}", m.max_drift);
        assert_eq!(m.reorthonormalizations, 0, "{name}");
    }
}

#[test]
fn round_trip_deviations_shrink_with_the_step() {
    for delta in [1, -1] {
        let devs: Vec<f64> = [(1e-2, 25), (5e-3, 49), (2.5e-3, 97)]
            .iter()
            .map(|&(h, n)| {
                let d = ex32(delta, h, n);
                let m = integrate_surface(&d, &AmbientChart::new(d.space), &Seed::default()).unwrap();
                let v = verify_reconstruction(&m, &d).unwrap();
                v.metric_relative.max(v.normal_vertical).max(v.tangent_vertical)
            })
            .collect();
        for w in devs.windows(2) {
            let r = w[0] / w[1];
            assert!((3.2..=20.0).contains(&r), "delta {delta}: {devs:?}");
        }
    }
}

#[test]
fn rotational_height_gradient_matches_a() {
    for kappa in [-1.0, 1.0] {
        let d = ex31(kappa, 5e-3, 101);
        let m = integrate_surface(&d, &AmbientChart::new(d.space), &Seed::default()).unwrap();
        let v = verify_reconstruction(&m, &d).unwrap();
        assert!(v.height_gradient.unwrap() <= 1e-3, "{v:?}");
        assert!(v.within(1e-3), "{v:?}");
        let gap = path_independence_check(&d, &AmbientChart::new(d.space), &Seed::default()).unwrap();
        assert!(gap.total() <= 1e-6, "{gap:?}");
    }
}

#[test]
fn recovered_data_are_constant_along_rotation_rows() {
    // H and p come from second differences of chart coordinates, which are not
    // equivariant under the rotations; their spread along a row falls at third
    // order, so the check runs on a small patch at a fine step
    for (name, d) in [("rotational", ex31(-1.0, 2.5e-4, 201)), ("q=1", ex32(1, 1e-3, 101))] {
        let m = integrate_surface(&d, &AmbientChart::new(d.space), &Seed::default()).unwrap();
        let r = m.recovered.as_ref().unwrap();
        let g = m.grid;
        let mut worst: f64 = 0.0;
        for f in [&r.lambda, &r.u, &r.h, &r.p, &r.a] {
            for i in 0..g.ns {
                let first = f.get(i, 0);
                for j in 1..g.nt {
                    worst = worst.max((f.get(i, j) - first).norm());
                }
            }
        }
        assert!(worst <= 1e-8, "{name}: variation along t {worst:e}");
    }
}

#[test]
fn report_is_unchanged_by_a_fiber_translation() {
    let d = ex32(-1, 5e-3, 61);
    let chart = AmbientChart::new(d.space);
    let base = verify_reconstruction(&integrate_surface(&d, &chart, &Seed::default()).unwrap(), &d).unwrap();
    let seed = Seed {
        point: [0.0, 0.0, 2.5],
        angle: 0.0,
    };
    let moved = verify_reconstruction(&integrate_surface(&d, &chart, &seed).unwrap(), &d).unwrap();
    let pairs = [
        (base.metric_relative, moved.metric_relative),
        (base.normal_vertical, moved.normal_vertical),
        (base.tangent_vertical, moved.tangent_vertical),
        (base.mean_curvature, moved.mean_curvature),
        (base.hopf, moved.hopf),
    ];
    for (a, b) in pairs {
        assert!((a - b).abs() <= 1e-12, "{a:e} vs {b:e}");
    }
}

#[test]
fn faults_show_up_in_the_corner_gap() {
    let d = ex32(1, 5e-3, 61);
    let chart = AmbientChart::new(d.space);
    let clean = path_independence_check(&d, &chart, &Seed::default()).unwrap().total();
    for size in [1e-4, 1e-3] {
        let mut bad = d.clone();
        // on the first column, which both boundary paths share only at the seed
        let v = bad.h.get(0, 31);
        bad.h.set(0, 31, v + Complex64::new(size, 0.0));
        let gap = path_independence_check(&bad, &chart, &Seed::default()).unwrap().total();
        assert!(gap > 100.0 * clean && gap < 100.0 * size, "fault {size:e}: gap {gap:e}, clean {clean:e}");
    }
}

#[test]
fn exports_round_trip() {
    let d = ex32(1, 5e-3, 21);
    let m = integrate_surface(&d, &AmbientChart::new(d.space), &Seed::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("m.json");
    export_mesh(&m, MeshFormat::Json, &json).unwrap();
    let back = read_mesh_json(&json).unwrap();
    for (p, q) in m.points.iter().zip(back.points()) {
        assert_eq!(p.as_slice(), q.as_slice());
    }
    for (p, q) in m.normals.iter().zip(back.normals()) {
        assert_eq!(p.as_slice(), q.as_slice());
    }
    let csv = dir.path().join("m.csv");
    export_mesh(&m, MeshFormat::Csv, &csv).unwrap();
    let rows = std::fs::read_to_string(&csv).unwrap().lines().count();
    assert_eq!(rows, m.grid.ns * m.grid.nt + 1);
    let obj = dir.path().join("m.obj");
    export_mesh(&m, MeshFormat::Obj, &obj).unwrap();
    let text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("vn ")).count(), m.grid.len());
    assert!(export_mesh(&m, MeshFormat::Obj, &dir.path().join("missing/m.obj")).is_err());
}
