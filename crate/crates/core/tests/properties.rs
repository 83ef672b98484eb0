//! Invariants of the closed forms, the decomposition and the file formats.

use std::f64::consts::TAU;

use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use roomgain::closedform::{tm_powers, ToyModel};
use roomgain::geometry::{decompose, enclosure_check, Layout, Point};
use roomgain::io::{heatmap_csv, parse_layout, read_heatmap_csv, LayoutDocument};
use roomgain::oracle::suite::preset_params;
use roomgain::{evaluate_grid, evaluate_point};
use roomgain::fom::GridOptions;

const PRESETS: [&str; 4] = ["1ghz-75", "1ghz-90", "1ghz-100", "28ghz-100"];

fn config() -> ProptestConfig {
    ProptestConfig { cases: 256, rng_seed: RngSeed::Fixed(0x726f_6f6d), failure_persistence: None, ..ProptestConfig::default() }
}

fn star(n_min: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((0.0..1.0f64, 1.0..9.0f64), n_min..12).prop_map(|vs| {
        let n = vs.len();
        vs.iter()
            .enumerate()
            .map(|(i, (u, r))| {
                let a = TAU * (i as f64 + 0.1 + 0.8 * u) / n as f64;
                Point::new(r * a.cos(), r * a.sin())
            })
            .collect()
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(config())]

    /// Every direction from the kernel of a star polygon meets a wall, and
    /// the toy-model spans tile the full circle.
    #[test]
    fn star_polygons_are_enclosed(vs in star(5), px in -0.3..0.3f64, py in -0.3..0.3f64) {
        let layout = Layout::from_polygon("star", &vs).unwrap();
        let probe = Point::new(px, py);
        prop_assume!(layout.nearest_wall(probe).unwrap().1 > 0.1);
        let d = decompose(&layout, probe, 0.05).unwrap();
        prop_assert!(enclosure_check(&d), "covered {}", d.covered);
        prop_assert!(d.gaps.is_empty());
        let total: f64 = d.spans.iter().map(|s| s.width()).sum();
        prop_assert!((total - TAU).abs() < 1e-9);
    }

    /// Rotating and translating the whole plan leaves the figures of merit unchanged.
    #[test]
    fn rigid_motion_invariance(
        vs in star(5),
        preset in 0..PRESETS.len(),
        angle in 0.0..TAU,
        (tx, ty) in (-50.0..50.0f64, -50.0..50.0f64),
    ) {
        let layout = Layout::from_polygon("star", &vs).unwrap();
        let probe = Point::new(0.0, 0.0);
        prop_assume!(layout.nearest_wall(probe).unwrap().1 > 0.1);
        let (c, s) = (angle.cos(), angle.sin());
        let mv = |p: &Point| Point::new(c * p.x - s * p.y + tx, s * p.x + c * p.y + ty);
        let moved = Layout::from_polygon("star", &vs.iter().map(mv).collect::<Vec<_>>()).unwrap();
        let p = preset_params(PRESETS[preset]);
        let (_, a) = evaluate_point(&layout, probe, &p, 0.05).unwrap();
        let (_, b) = evaluate_point(&moved, mv(&probe), &p, 0.05).unwrap();
        prop_assert!(rel(b.g_i, a.g_i) < 1e-9 && rel(b.g_p, a.g_p) < 1e-9, "{a:?} vs {b:?}");
    }

    /// Splitting a toy model at an interior angle splits each power additively.
    #[test]
    fn toy_model_powers_are_additive(
        preset in 0..PRESETS.len(),
        d0 in 0.05..200.0f64,
        (a, b) in (-1.5..1.5f64, -1.5..1.5f64),
        u in 0.01..0.99f64,
    ) {
        let (tl, tr) = (a.min(b), a.max(b));
        prop_assume!(tr - tl > 1e-3);
        let p = preset_params(PRESETS[preset]);
        let radii = p.coverage_radii();
        let m = tl + u * (tr - tl);
        let whole = tm_powers(&ToyModel::new(d0, tl, tr).unwrap(), &p, &radii).unwrap();
        let l = tm_powers(&ToyModel::new(d0, tl, m).unwrap(), &p, &radii).unwrap();
        let r = tm_powers(&ToyModel::new(d0, m, tr).unwrap(), &p, &radii).unwrap();
        for (w, x, y) in [(whole.p_l, l.p_l, r.p_l), (whole.i_l, l.i_l, r.i_l), (whole.p_n, l.p_n, r.p_n), (whole.i_n, l.i_n, r.i_n)] {
            prop_assert!((w - x - y).abs() <= 1e-10 * (x.abs() + y.abs()) + 1e-300, "{w} vs {x} + {y}");
            prop_assert!(x >= 0.0 && y >= 0.0);
        }
    }

    /// Indoor SINR equals open-space SINR times both gains.
    #[test]
    fn sinr_identity(w in 2.0..30.0f64, ar in 1.0..4.0f64, u in 0.05..0.95f64, v in 0.05..0.95f64, preset in 0..PRESETS.len()) {
        let h = w / ar;
        let layout = Layout::rectangle(w, h).unwrap();
        let probe = Point::new(u * w, v * h);
        prop_assume!(layout.nearest_wall(probe).unwrap().1 > 0.06);
        let (_, f) = evaluate_point(&layout, probe, &preset_params(PRESETS[preset]), 0.05).unwrap();
        prop_assert!(rel(f.gamma_b, f.g_i * f.g_p * f.gamma_o) < 1e-12);
    }

    /// Layout documents survive a JSON round trip exactly.
    #[test]
    fn layout_json_round_trip(vs in star(5), extra in prop::collection::vec((-9.0..9.0f64, -9.0..9.0f64, -9.0..9.0f64, -9.0..9.0f64), 0..4)) {
        let mut walls: Vec<_> = Layout::from_polygon("star", &vs).unwrap().walls().to_vec();
        for (k, (ax, ay, bx, by)) in extra.into_iter().enumerate() {
            walls.push(roomgain::WallSegment::new(50 + k as u32, Point::new(ax, ay), Point::new(bx, by)));
        }
        let rooms = Layout::from_polygon("star", &vs).unwrap().rooms().to_vec();
        let layout = Layout::new(walls, rooms).unwrap();
        let doc = LayoutDocument::from_layout(&layout, None);
        let text = doc.to_json();
        let back = parse_layout(&text).unwrap();
        prop_assert_eq!(back.walls(), layout.walls());
        prop_assert_eq!(back.rooms(), layout.rooms());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..config() })]

    /// Heatmap CSV reproduces every evaluated value bit for bit.
    #[test]
    fn heatmap_csv_round_trip(w in 1.0..6.0f64, h in 1.0..6.0f64, res in 0.2..0.8f64, preset in 0..PRESETS.len()) {
        let layout = Layout::rectangle(w, h).unwrap();
        let g = evaluate_grid(&layout, &preset_params(PRESETS[preset]), &GridOptions { resolution: res, ..Default::default() }).unwrap();
        let rows = read_heatmap_csv(&heatmap_csv(&g)).unwrap();
        for (row, cell) in rows.iter().zip(&g.cells) {
            prop_assert_eq!(row.g_i_linear.map(f64::to_bits), cell.map(|c| c.g_i.to_bits()));
            prop_assert_eq!(row.g_p_linear.map(f64::to_bits), cell.map(|c| c.g_p.to_bits()));
            prop_assert_eq!(row.gamma_b_db.map(f64::to_bits), cell.map(|c| c.gamma_b_db().to_bits()));
        }
    }
}
