//! Parameter-plane scans: classification maps, superadditivity regions for a
//! list of block lengths, `w_n = 0` boundary curves, and how fast those curves
//! approach the limiting region `0 < p_min < 1/2 < p_maj < 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{classify, ChannelParams, Classification};
use crate::closedform::{n_threshold, solve_q1, superadditivity_report_with, w_n};
use crate::error::{Error, Result};

pub const MAX_RESOLUTION: usize = 2000;
/// Samples per ray used to bracket sign changes of `w_n`.
pub const RAY_SAMPLES: usize = 256;
pub const ROOT_VALUE_TOL: f64 = 1e-12;
pub const ROOT_WIDTH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellVerdict {
    pub n: u64,
    pub w_n: f64,
    pub benefit: f64,
    pub superadditive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCell {
    pub i: usize,
    pub j: usize,
    pub p_h: f64,
    pub p_v: f64,
    pub classification: Classification,
    pub verdicts: Vec<CellVerdict>,
}

/// Cell `(i, j)` sits at `((i + ½)/res, (j + ½)/res)`, so no cell center lands
/// on `0`, `½` or `1`. Cells are stored row-major in `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionGrid {
    pub resolution: usize,
    pub n_list: Vec<u64>,
    pub cells: Vec<RegionCell>,
}

impl RegionGrid {
    pub fn cell(&self, i: usize, j: usize) -> &RegionCell {
        &self.cells[i * self.resolution + j]
    }
}

pub fn cell_center(index: usize, resolution: usize) -> f64 {
    (index as f64 + 0.5) / resolution as f64
}

fn check_n_list(n_list: &[u64]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::validation("n list is empty"));
    }
    if n_list.contains(&0) {
        return Err(Error::validation("block lengths must be >= 1"));
    }
    Ok(())
}

/// Classification and superadditivity verdicts on a `res x res` grid.
pub fn scan(resolution: usize, n_list: &[u64]) -> Result<RegionGrid> {
    if !(2..=MAX_RESOLUTION).contains(&resolution) {
        return Err(Error::validation(format!(
            "resolution {resolution} outside [2, {MAX_RESOLUTION}]"
        )));
    }
    check_n_list(n_list)?;
    let cells = (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / resolution, idx % resolution);
            let params = ChannelParams::new(cell_center(i, resolution), cell_center(j, resolution))?;
            let solution = solve_q1(params);
            let verdicts = n_list
                .iter()
                .map(|&n| {
                    let r = superadditivity_report_with(params, &solution, n)?;
                    Ok(CellVerdict {
                        n,
                        w_n: r.w_n,
                        benefit: r.benefit,
                        superadditive: r.superadditive,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RegionCell {
                i,
                j,
                p_h: params.p_h(),
                p_v: params.p_v(),
                classification: classify(params),
                verdicts,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionGrid {
        resolution,
        n_list: n_list.to_vec(),
        cells,
    })
}

/// Axis along which a ray varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RayAxis {
    /// `p_v` fixed, `p_h` varies.
    Horizontal,
    /// `p_h` fixed, `p_v` varies.
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub p_h: f64,
    pub p_v: f64,
    pub axis: RayAxis,
    /// Coordinates (along the ray) of the two samples with opposite signs of
    /// `w_n` that bracketed this root.
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub n: u64,
    /// Horizontal-ray roots by increasing `p_v`, then vertical-ray roots by
    /// increasing `p_h`; within a ray, by increasing coordinate.
    pub points: Vec<BoundaryPoint>,
}

fn ray_samples() -> Vec<f64> {
    let mut t: Vec<f64> = (1..RAY_SAMPLES).map(|i| i as f64 / RAY_SAMPLES as f64).collect();
    t.insert(0, 1e-9);
    t.push(1.0 - 1e-9);
    t
}

fn on_ray(axis: RayAxis, fixed: f64, t: f64) -> ChannelParams {
    let (h, v) = match axis {
        RayAxis::Horizontal => (t, fixed),
        RayAxis::Vertical => (fixed, t),
    };
    ChannelParams::new(h, v).expect("ray coordinates lie in [0, 1]")
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid.abs() < ROOT_VALUE_TOL || hi - lo < ROOT_WIDTH_TOL {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
}

fn roots_on_ray(n: u64, axis: RayAxis, fixed: f64, samples: &[f64]) -> Result<Vec<BoundaryPoint>> {
    let f = |t: f64| w_n(on_ray(axis, fixed, t), n).expect("n >= 1");
    let values: Vec<f64> = samples.iter().map(|&t| f(t)).collect();
    let mut points = Vec::new();
    for k in 0..samples.len() - 1 {
        let (a, b) = (values[k], values[k + 1]);
        if (a > 0.0) == (b > 0.0) {
            continue;
        }
        let t = if a == 0.0 {
            samples[k]
        } else {
            bisect(f, samples[k], samples[k + 1], a)
        };
        let p = on_ray(axis, fixed, t);
        points.push(BoundaryPoint {
            p_h: p.p_h(),
            p_v: p.p_v(),
            axis,
            bracket: (samples[k], samples[k + 1]),
        });
    }
    Ok(points)
}

/// Zero set of `w_n`, located by bisection along `ray_count` horizontal and
/// `ray_count` vertical rays through the unit square.
///
/// Rays without a sign change contribute no points.
pub fn boundary(n: u64, ray_count: usize) -> Result<BoundaryCurve> {
    if n < 2 {
        return Err(Error::validation(format!("boundary needs n >= 2, got {n}")));
    }
    if ray_count == 0 {
        return Err(Error::validation("ray count must be positive"));
    }
    let samples = ray_samples();
    let rays: Vec<(RayAxis, f64)> = [RayAxis::Horizontal, RayAxis::Vertical]
        .iter()
        .flat_map(|&axis| (0..ray_count).map(move |r| (axis, cell_center(r, ray_count))))
        .collect();
    let per_ray = rays
        .par_iter()
        .map(|&(axis, fixed)| roots_on_ray(n, axis, fixed, &samples))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryCurve {
        n,
        points: per_ray.into_iter().flatten().collect(),
    })
}

/// Distance from `(x, y)` to the boundary of the axis-aligned rectangle
/// `[x0, x1] x [y0, y1]`.
fn distance_to_rect_boundary(x: f64, y: f64, (x0, x1, y0, y1): (f64, f64, f64, f64)) -> f64 {
    let inside = (x0..=x1).contains(&x) && (y0..=y1).contains(&y);
    if inside {
        (x - x0).min(x1 - x).min(y - y0).min(y1 - y)
    } else {
        let dx = (x0 - x).max(0.0).max(x - x1);
        let dy = (y0 - y).max(0.0).max(y - y1);
        dx.hypot(dy)
    }
}

/// Distance to the boundary of the limiting region
/// `{0 < p_v < ½ < p_h < 1} ∪ {0 < p_h < ½ < p_v < 1}`.
pub fn distance_to_limit_boundary(p_h: f64, p_v: f64) -> f64 {
    distance_to_rect_boundary(p_h, p_v, (0.5, 1.0, 0.0, 0.5))
        .min(distance_to_rect_boundary(p_h, p_v, (0.0, 0.5, 0.5, 1.0)))
}

/// Largest distance from a point of the `w_n = 0` curve to the limiting
/// region boundary.
pub fn curve_distance(curve: &BoundaryCurve) -> f64 {
    curve
        .points
        .iter()
        .map(|p| distance_to_limit_boundary(p.p_h, p.p_v))
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two point sets (infinite if either is empty).
pub fn hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let directed = |from: &[(f64, f64)], to: &[(f64, f64)]| {
        from.par_iter()
            .map(|&(x, y)| {
                to.iter()
                    .map(|&(u, v)| (x - u).hypot(y - v))
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| 0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// Centers of mask cells that touch a cell outside the mask or the grid edge.
fn mask_boundary(mask: &[bool], res: usize) -> Vec<(f64, f64)> {
    let at = |i: isize, j: isize| {
        i >= 0 && j >= 0 && (i as usize) < res && (j as usize) < res && mask[i as usize * res + j as usize]
    };
    let mut out = Vec::new();
    for i in 0..res {
        for j in 0..res {
            if !mask[i * res + j] {
                continue;
            }
            let (ii, jj) = (i as isize, j as isize);
            if !(at(ii - 1, jj) && at(ii + 1, jj) && at(ii, jj - 1) && at(ii, jj + 1)) {
                out.push((cell_center(i, res), cell_center(j, res)));
            }
        }
    }
    out
}

/// Hausdorff distance between the boundary of `{w_n > 0, not antidegradable}`
/// and the boundary of the neither-degradable-nor-antidegradable region,
/// both rasterized on a `res x res` cell grid.
pub fn region_hausdorff(n: u64, res: usize) -> Result<f64> {
    if n == 0 || res < 2 {
        return Err(Error::validation("region_hausdorff needs n >= 1 and res >= 2"));
    }
    let cells: Vec<(bool, bool)> = (0..res * res)
        .into_par_iter()
        .map(|idx| {
            let p = ChannelParams::new(cell_center(idx / res, res), cell_center(idx % res, res))
                .expect("cell centers lie in (0, 1)");
            let class = classify(p);
            let positive = !class.is_antidegradable() && w_n(p, n).expect("n >= 1") > 0.0;
            (positive, class == Classification::Neither)
        })
        .collect();
    let positive: Vec<bool> = cells.iter().map(|c| c.0).collect();
    let neither: Vec<bool> = cells.iter().map(|c| c.1).collect();
    Ok(hausdorff(&mask_boundary(&positive, res), &mask_boundary(&neither, res)))
}

/// Parameter points whose `n₀` is carried in every convergence row.
pub const N0_SAMPLE_POINTS: [(f64, f64); 3] = [(0.7, 0.2), (0.9, 0.1), (0.6, 0.4)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct N0Sample {
    pub p_h: f64,
    pub p_v: f64,
    pub n0: f64,
    /// Sign of the exact `w_n` at this row's `n`.
    pub w_n_positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: u64,
    /// `n = 2` has a straight-line boundary and only serves as a reference row.
    pub baseline: bool,
    pub curve_distance: f64,
    pub hausdorff: f64,
    pub n0_samples: Vec<N0Sample>,
}

/// Rays per axis and raster resolution used by [`convergence_report`].
pub const CONVERGENCE_RAYS: usize = 200;
pub const CONVERGENCE_RASTER: usize = 200;

/// Distances between the `w_n = 0` boundary and the limiting region for each
/// `n` in an ascending list.
pub fn convergence_report(n_list: &[u64]) -> Result<Vec<ConvergenceRow>> {
    check_n_list(n_list)?;
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::validation("n list must be strictly ascending"));
    }
    if n_list[0] < 2 {
        return Err(Error::validation("convergence report needs n >= 2"));
    }
    n_list
        .iter()
        .map(|&n| {
            let curve = boundary(n, CONVERGENCE_RAYS)?;
            let n0_samples = N0_SAMPLE_POINTS
                .iter()
                .map(|&(h, v)| {
                    let p = ChannelParams::new(h, v)?;
                    Ok(N0Sample {
                        p_h: h,
                        p_v: v,
                        n0: n_threshold(p)?,
                        w_n_positive: w_n(p, n)? > 0.0,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ConvergenceRow {
                n,
                baseline: n == 2,
                curve_distance: curve_distance(&curve),
                hausdorff: region_hausdorff(n, CONVERGENCE_RASTER)?,
                n0_samples,
            })
        })
        .collect()
}
