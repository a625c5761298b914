//! Incremental spatial index answering exact spherical-cap range queries.
//!
//! The sphere is cut into latitude bands of roughly equal height, and each
//! band into longitude cells of roughly equal area. A query collects the
//! cells whose bounding box can meet the cap and then filters every
//! candidate by exact angular distance, so results never depend on the grid.
//! A dot-product test settles candidates far from the boundary.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::sphere::{angular_distance, AngularRadius, SpherePoint};

/// Padding applied to cell bounds so rounding never drops a candidate.
const PAD: f64 = 1e-9;
/// Width of the band around `cos r` where the dot-product test defers to the
/// exact angular distance. Covers rounding and the unit-norm tolerance.
const DOT_MARGIN: f64 = 1e-9;
/// Keeps the cell count bounded for very small requested cell sizes.
const MIN_CELL: f64 = 1e-3;

#[derive(Debug, Clone)]
struct Band {
    cell_width: f64,
    cells: Vec<Vec<(VertexId, SpherePoint)>>,
}

#[derive(Debug, Clone)]
pub struct CapIndex {
    band_height: f64,
    bands: Vec<Band>,
    points: Vec<Option<SpherePoint>>,
    len: usize,
}

impl CapIndex {
    /// An index whose cells have an edge of roughly `cell_size` radians.
    ///
    /// Generation queries a single radius `r`; a cell edge close to `r`
    /// makes each query touch a handful of cells.
    pub fn new(cell_size: f64) -> Self {
        let h = if cell_size.is_finite() {
            cell_size.clamp(MIN_CELL, PI)
        } else {
            PI
        };
        let band_count = (PI / h).ceil().max(1.0) as usize;
        let band_height = PI / band_count as f64;
        let bands = (0..band_count)
            .map(|b| {
                let lo = b as f64 * band_height;
                let hi = lo + band_height;
                let area = (lo.cos() - hi.cos()) * TAU;
                let k = (area / (band_height * band_height)).ceil().max(1.0) as usize;
                Band {
                    cell_width: TAU / k as f64,
                    cells: vec![Vec::new(); k],
                }
            })
            .collect();
        Self {
            band_height,
            bands,
            points: Vec::new(),
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn point(&self, id: VertexId) -> Option<&SpherePoint> {
        self.points.get(id).and_then(Option::as_ref)
    }

    fn band_of(&self, colatitude: f64) -> usize {
        ((colatitude / self.band_height) as usize).min(self.bands.len() - 1)
    }

    pub fn insert(&mut self, id: VertexId, p: SpherePoint) -> Result<()> {
        if self.point(id).is_some() {
            return Err(Error::DuplicateVertex(id));
        }
        if self.points.len() <= id {
            self.points.resize(id + 1, None);
        }
        self.points[id] = Some(p);
        let b = self.band_of(p.colatitude());
        let band = &mut self.bands[b];
        let cell = ((p.longitude() / band.cell_width) as usize).min(band.cells.len() - 1);
        band.cells[cell].push((id, p));
        self.len += 1;
        Ok(())
    }

    /// Calls `f` for every indexed id within angular distance `radius` of
    /// `center` (closed ball). Visit order is deterministic for a given
    /// insertion history but is not sorted.
    pub fn for_each_in_cap<F: FnMut(VertexId, &SpherePoint)>(
        &self,
        center: &SpherePoint,
        radius: AngularRadius,
        mut f: F,
    ) {
        if self.len == 0 {
            return;
        }
        let r = radius.value();
        let cos_r = r.cos();
        let theta = center.colatitude();
        let phi = center.longitude();
        let lo = theta - r - PAD;
        let hi = theta + r + PAD;
        // A cap holding a pole spans every longitude in the bands it meets.
        let half_width = if lo <= 0.0 || hi >= PI {
            PI
        } else {
            let ratio = r.sin() / theta.sin();
            if ratio >= 1.0 {
                PI
            } else {
                ratio.asin() + PAD
            }
        };
        let first = self.band_of(lo.max(0.0));
        let last = self.band_of(hi.min(PI));
        for band in &self.bands[first..=last] {
            let k = band.cells.len();
            let mut visit = |cell: &Vec<(VertexId, SpherePoint)>| {
                for (id, p) in cell {
                    let d = p.dot(center);
                    let inside = if d > cos_r + DOT_MARGIN {
                        true
                    } else if d < cos_r - DOT_MARGIN {
                        false
                    } else {
                        angular_distance(p, center) <= r
                    };
                    if inside {
                        f(*id, p);
                    }
                }
            };
            if half_width >= PI {
                band.cells.iter().for_each(&mut visit);
                continue;
            }
            let start = ((phi - half_width) / band.cell_width).floor() as i64;
            let end = ((phi + half_width) / band.cell_width).floor() as i64;
            if end - start + 1 >= k as i64 {
                band.cells.iter().for_each(&mut visit);
            } else {
                for j in start..=end {
                    visit(&band.cells[j.rem_euclid(k as i64) as usize]);
                }
            }
        }
    }

    /// Ids within `radius` of `center`, ascending.
    pub fn query_cap(&self, center: &SpherePoint, radius: AngularRadius) -> Vec<VertexId> {
        let mut out = Vec::new();
        self.for_each_in_cap(center, radius, |id, _| out.push(id));
        out.sort_unstable();
        out
    }
}
