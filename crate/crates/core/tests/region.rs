use pdl_capacity::channel::{classify, ChannelParams};
use pdl_capacity::closedform::{n_threshold, w_n};
use pdl_capacity::region::{boundary, convergence_report, curve_distance, scan, RayAxis};

#[test]
fn nesting_holds_cellwise() {
    let grid = scan(41, &[2, 3, 10]).unwrap();
    for c in &grid.cells {
        let s: Vec<bool> = c.verdicts.iter().map(|v| v.superadditive).collect();
        assert!(!s[0] || s[1], "n=2 but not n=3 at ({}, {})", c.p_h, c.p_v);
        assert!(!s[1] || s[2], "n=3 but not n=10 at ({}, {})", c.p_h, c.p_v);
    }
}

#[test]
fn verdicts_follow_the_report_logic() {
    let grid = scan(17, &[2, 4]).unwrap();
    for c in &grid.cells {
        for v in &c.verdicts {
            let expected = !c.classification.is_antidegradable() && v.w_n > 0.0 && v.benefit > 0.0;
            assert_eq!(v.superadditive, expected);
        }
    }
}

#[test]
fn two_use_boundary_is_exactly_the_antidiagonal() {
    let curve = boundary(2, 50).unwrap();
    let dev = curve
        .points
        .iter()
        .map(|p| (p.p_h + p.p_v - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(dev < 1e-9, "{dev}");
}

#[test]
fn three_use_boundary_crosses_the_antidiagonal() {
    let p = ChannelParams::new(0.7, 0.3).unwrap();
    assert!(w_n(p, 3).unwrap() > 0.0);
    let curve = boundary(3, 60).unwrap();
    let above = curve.points.iter().any(|p| p.p_h + p.p_v > 1.0 + 1e-3 && p.p_h < 1.0 && p.p_v < 1.0);
    assert!(above);
}

#[test]
fn boundary_points_are_bracketed_roots() {
    for n in [3u64, 10, 100] {
        let curve = boundary(n, 24).unwrap();
        for p in &curve.points {
            let at = |t: f64| {
                let q = match p.axis {
                    RayAxis::Horizontal => ChannelParams::new(t, p.p_v),
                    RayAxis::Vertical => ChannelParams::new(p.p_h, t),
                };
                w_n(q.unwrap(), n).unwrap()
            };
            let (a, b) = p.bracket;
            assert_ne!(at(a) > 0.0, at(b) > 0.0);
            let t = match p.axis {
                RayAxis::Horizontal => p.p_h,
                RayAxis::Vertical => p.p_v,
            };
            assert!(a <= t && t <= b);
        }
    }
}

#[test]
fn boundaries_are_mirror_images() {
    let curve = boundary(10, 30).unwrap();
    let horizontal: Vec<_> = curve.points.iter().filter(|p| p.axis == RayAxis::Horizontal).collect();
    let vertical: Vec<_> = curve.points.iter().filter(|p| p.axis == RayAxis::Vertical).collect();
    assert_eq!(horizontal.len(), vertical.len());
    for (h, v) in horizontal.iter().zip(&vertical) {
        assert_eq!((h.p_h, h.p_v), (v.p_v, v.p_h));
    }
}

#[test]
fn curve_distance_shrinks_with_block_length() {
    let distances: Vec<f64> = [3u64, 10, 100, 1000, 10_000]
        .iter()
        .map(|&n| curve_distance(&boundary(n, 100).unwrap()))
        .collect();
    for w in distances.windows(2) {
        assert!(w[1] <= w[0], "{distances:?}");
    }
}

#[test]
fn convergence_report_rows() {
    let rows = convergence_report(&[2, 3, 10, 100]).unwrap();
    assert!(rows[0].baseline && rows.iter().skip(1).all(|r| !r.baseline));
    for r in &rows {
        assert_eq!(r.n0_samples.len(), 3);
        let s = &r.n0_samples[0];
        assert_eq!(s.n0, n_threshold(ChannelParams::new(0.7, 0.2).unwrap()).unwrap());
    }
    for w in rows[1..].windows(2) {
        assert!(w[1].curve_distance <= w[0].curve_distance);
        assert!(w[1].hausdorff <= w[0].hausdorff);
    }
    assert!(convergence_report(&[]).is_err());
    assert!(convergence_report(&[10, 3]).is_err());
}

#[test]
fn w_n_positive_region_grows_into_the_neither_region() {
    // away from the corners the sign settles on the non-antidegradable side
    for (h, v) in [(0.7, 0.2), (0.8, 0.3), (0.6, 0.1)] {
        let p = ChannelParams::new(h, v).unwrap();
        assert!(!classify(p).is_antidegradable());
        assert!(w_n(p, 10_000).unwrap() > 0.0);
    }
    let p = ChannelParams::new(0.7, 0.6).unwrap();
    assert!(w_n(p, 10_000).unwrap() < 0.0);
}
