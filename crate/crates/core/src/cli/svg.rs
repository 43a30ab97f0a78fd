//! Self-contained 800×800 SVG renderings of region maps and boundary curves.
//!
//! The plot has `p_h` to the right and `p_v` upward.

use std::fmt::Write;

use crate::channel::Classification;
use crate::region::{BoundaryCurve, RegionGrid};

pub const SIZE: f64 = 800.0;

const CONTOUR_COLORS: [&str; 6] = ["#000000", "#1f3b99", "#7a1fa2", "#b35900", "#006d5b", "#8c1c13"];

fn fill(class: Classification) -> &'static str {
    match class {
        Classification::Antidegradable => "#9fd89f",
        Classification::Degradable => "#f2a1a1",
        Classification::Both => "#f5e08a",
        Classification::Neither => "#d9d9d9",
    }
}

fn x(p_h: f64) -> f64 {
    p_h * SIZE
}

fn y(p_v: f64) -> f64 {
    SIZE - p_v * SIZE
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n\
         <title>{title}</title>\n"
    )
}

/// Filled cells per classification plus one `w_n = 0` contour per block
/// length, drawn along the cell edges that separate `w_n > 0` from `w_n <= 0`.
pub fn region_map(grid: &RegionGrid) -> String {
    let res = grid.resolution;
    let cell = SIZE / res as f64;
    let mut s = header("classification and w_n > 0 regions");

    // one rect per horizontal run of equal classification
    s += "<g stroke=\"none\">\n";
    for j in 0..res {
        let mut i = 0;
        while i < res {
            let class = grid.cell(i, j).classification;
            let start = i;
            while i < res && grid.cell(i, j).classification == class {
                i += 1;
            }
            let _ = writeln!(
                s,
                "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" style=\"fill:{}\" class=\"{}\"/>",
                start as f64 * cell,
                SIZE - (j + 1) as f64 * cell,
                (i - start) as f64 * cell,
                cell,
                fill(class),
                class.as_str(),
            );
        }
    }
    s += "</g>\n";

    for (k, &n) in grid.n_list.iter().enumerate() {
        let positive = |i: usize, j: usize| grid.cell(i, j).verdicts[k].w_n > 0.0;
        let mut d = String::new();
        for i in 0..res {
            for j in 0..res {
                // edge to the right neighbour (vertical segment)
                if i + 1 < res && positive(i, j) != positive(i + 1, j) {
                    let xe = (i + 1) as f64 * cell;
                    let _ = write!(
                        d,
                        "M{:.3} {:.3}L{:.3} {:.3}",
                        xe,
                        SIZE - j as f64 * cell,
                        xe,
                        SIZE - (j + 1) as f64 * cell
                    );
                }
                // edge to the upper neighbour (horizontal segment)
                if j + 1 < res && positive(i, j) != positive(i, j + 1) {
                    let ye = SIZE - (j + 1) as f64 * cell;
                    let _ = write!(
                        d,
                        "M{:.3} {:.3}L{:.3} {:.3}",
                        i as f64 * cell,
                        ye,
                        (i + 1) as f64 * cell,
                        ye
                    );
                }
            }
        }
        let _ = writeln!(
            s,
            "<path class=\"contour\" data-n=\"{n}\" style=\"fill:none;stroke:{};stroke-width:2\" d=\"{d}\"/>",
            CONTOUR_COLORS[k % CONTOUR_COLORS.len()]
        );
    }
    s += "</svg>\n";
    s
}

/// Boundary points over the outline of the limiting region.
pub fn boundary_plot(curve: &BoundaryCurve) -> String {
    let mut s = header(&format!("w_{} = 0", curve.n));
    s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"800\" style=\"fill:#ffffff;stroke:#000000\"/>\n";
    for (x0, y0) in [(0.5, 0.0), (0.0, 0.5)] {
        let _ = writeln!(
            s,
            "<rect class=\"limit\" x=\"{:.3}\" y=\"{:.3}\" width=\"400\" height=\"400\" style=\"fill:#eeeeee;stroke:#888888\"/>",
            x(x0),
            y(y0 + 0.5)
        );
    }
    s += "<g style=\"fill:#1f3b99\">\n";
    for p in &curve.points {
        let _ = writeln!(s, "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"1.5\"/>", x(p.p_h), y(p.p_v));
    }
    s += "</g>\n</svg>\n";
    s
}
