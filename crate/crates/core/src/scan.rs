//! Deterministic minimization over a real abscissa grid times a torus grid.
//!
//! Scans reduce with strict improvement in enumeration order, which makes the
//! result independent of chunking. Torus points are canonicalized under
//! complex conjugation (an evaluation at angles θ is performed at the
//! lexicographically smaller of θ and -θ mod 1): for conjugation-symmetric
//! objectives this leaves values unchanged and guarantees that a scan
//! restricted to the fundamental half-torus reproduces the full scan bit for
//! bit.

use serde::Serialize;

use crate::error::Error;
use crate::Result;

/// Closed abscissa window `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaWindow {
    pub lo: f64,
    pub hi: f64,
}

impl SigmaWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInput(format!(
                "empty or non-finite sigma window [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }
}

/// Grid resolution and refinement controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    /// Points along the abscissa (>= 2).
    pub sigma_points: usize,
    /// Points per torus axis (>= 2).
    pub torus_points: usize,
    /// Local refinement passes around the incumbent argmin.
    pub refine_passes: usize,
    /// Enumerate only the fundamental half of the first torus axis.
    pub half_torus: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            sigma_points: 33,
            torus_points: 32,
            refine_passes: 1,
            half_torus: false,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sigma_points < 2 || self.torus_points < 2 {
            return Err(Error::InvalidInput(
                "grid needs at least 2 points per axis".into(),
            ));
        }
        Ok(())
    }
}

/// A scanned point: abscissa plus canonical torus angles in cycles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub sigma: f64,
    pub angles: Vec<f64>,
}

/// Minimum found by a scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanMinimum {
    pub value: f64,
    pub point: ScanPoint,
}

/// One evaluated base-grid sample, for CSV export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSample {
    pub sigma: f64,
    pub angles: Vec<f64>,
    pub value: f64,
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + i as f64 * step).collect()
}

/// Reduce angles (in cycles) to the conjugation fundamental domain: the
/// lexicographically smaller of θ and its mirror (1 - θ mod 1).
pub fn canonical_angles(angles: &[f64]) -> Vec<f64> {
    let mirror: Vec<f64> = angles
        .iter()
        .map(|&t| if t == 0.0 { 0.0 } else { 1.0 - t })
        .collect();
    if mirror.as_slice() < angles {
        mirror
    } else {
        angles.to_vec()
    }
}

fn angles_of_indices(indices: &[usize], n: usize) -> Vec<f64> {
    indices.iter().map(|&k| k as f64 / n as f64).collect()
}

/// Index-level canonicalization: the lexicographically smaller of `k` and its
/// mirror `(n - k) mod n`. Grid points must be canonicalized on indices, not
/// on angle floats, so that mirrored points produce bitwise-identical angles.
fn canonical_indices(indices: &[usize], n: usize) -> Vec<usize> {
    let mirror: Vec<usize> = indices.iter().map(|&k| (n - k) % n).collect();
    if mirror.as_slice() < indices {
        mirror
    } else {
        indices.to_vec()
    }
}

/// Minimize `eval(σ, canonical angles)` over the grid, then locally refine.
/// `q` is the torus dimension. Base-grid samples are appended to `samples`
/// when provided.
pub fn grid_scan<F>(
    window: SigmaWindow,
    grid: GridSpec,
    q: usize,
    mut eval: F,
    mut samples: Option<&mut Vec<ScanSample>>,
) -> Result<ScanMinimum>
where
    F: FnMut(f64, &[f64]) -> f64,
{
    grid.validate()?;
    let sigmas = linspace(window.lo, window.hi, grid.sigma_points);
    let n = grid.torus_points;
    let first_axis_end = if grid.half_torus { n / 2 + 1 } else { n };

    let mut best: Option<ScanMinimum> = None;
    let mut indices = vec![0usize; q];
    for &sigma in &sigmas {
        loop {
            let angles = angles_of_indices(&canonical_indices(&indices, n), n);
            let value = eval(sigma, &angles);
            if let Some(ref mut rows) = samples {
                rows.push(ScanSample {
                    sigma,
                    angles: angles.clone(),
                    value,
                });
            }
            if best.as_ref().is_none_or(|b| value < b.value) {
                best = Some(ScanMinimum {
                    value,
                    point: ScanPoint { sigma, angles },
                });
            }
            // Odometer with the first axis outermost so the half-torus
            // enumeration is a per-sigma prefix of the full one.
            let mut axis = q;
            loop {
                if axis == 0 {
                    break;
                }
                axis -= 1;
                indices[axis] += 1;
                let end = if axis == 0 { first_axis_end } else { n };
                if indices[axis] < end {
                    break;
                }
                indices[axis] = 0;
            }
            if indices.iter().all(|&k| k == 0) {
                break;
            }
        }
    }

    let mut best = best.ok_or_else(|| Error::InvalidInput("empty scan grid".into()))?;

    // Local refinement: re-center a shrinking window on the incumbent.
    let mut sigma_halfwidth = if grid.sigma_points > 1 {
        (window.hi - window.lo) / (grid.sigma_points - 1) as f64
    } else {
        0.0
    };
    let mut angle_halfwidth = 1.0 / n as f64;
    for _ in 0..grid.refine_passes {
        let center: ScanPoint = best.point.clone();
        let lo = (center.sigma - sigma_halfwidth).max(window.lo);
        let hi = (center.sigma + sigma_halfwidth).min(window.hi);
        let sigmas = if lo < hi {
            linspace(lo, hi, grid.sigma_points)
        } else {
            vec![center.sigma]
        };
        let offsets = linspace(-angle_halfwidth, angle_halfwidth, grid.torus_points);
        let mut local = vec![0usize; q];
        for &sigma in &sigmas {
            loop {
                let raw: Vec<f64> = local
                    .iter()
                    .enumerate()
                    .map(|(j, &k)| (center.angles[j] + offsets[k]).rem_euclid(1.0))
                    .collect();
                let angles = canonical_angles(&raw);
                let value = eval(sigma, &angles);
                if value < best.value {
                    best = ScanMinimum {
                        value,
                        point: ScanPoint { sigma, angles },
                    };
                }
                let mut axis = q;
                loop {
                    if axis == 0 {
                        break;
                    }
                    axis -= 1;
                    local[axis] += 1;
                    if local[axis] < grid.torus_points {
                        break;
                    }
                    local[axis] = 0;
                }
                if local.iter().all(|&k| k == 0) {
                    break;
                }
            }
        }
        sigma_halfwidth *= 2.0 / (grid.sigma_points.max(2) - 1) as f64;
        angle_halfwidth *= 2.0 / (grid.torus_points - 1) as f64;
    }
    Ok(best)
}
