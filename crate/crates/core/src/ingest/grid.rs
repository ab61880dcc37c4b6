use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::IngestError;

/// Mean Earth radius in meters.
const EARTH_RADIUS_M: f64 = 6_371_008.8;

pub const DEFAULT_SIDE_M: f64 = 2000.0;

fn default_side() -> f64 {
    DEFAULT_SIDE_M
}

/// Lower-left corner of one square area, meters from the map origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub area_id: String,
    pub x_min: f64,
    pub y_min: f64,
}

/// Latitude/longitude of the map origin `(x = 0, y = 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoOrigin {
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct GridFile {
    #[serde(default = "default_side")]
    side_m: f64,
    areas: Vec<Area>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    geo_origin: Option<GeoOrigin>,
}

/// Fixed-size square areas partitioning part of the map. Boxes are
/// half-open: `[x_min, x_min + side) × [y_min, y_min + side)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaGrid {
    side_m: f64,
    areas: Vec<Area>,
    geo_origin: Option<GeoOrigin>,
}

impl AreaGrid {
    pub fn new(side_m: f64, areas: Vec<Area>) -> Result<Self, IngestError> {
        if !(side_m > 0.0 && side_m.is_finite()) {
            return Err(IngestError::InvalidGrid(format!("side length must be positive, got {side_m}")));
        }
        let mut seen = HashSet::new();
        for area in &areas {
            if !seen.insert(area.area_id.as_str()) {
                return Err(IngestError::InvalidGrid(format!("duplicate area id {}", area.area_id)));
            }
            if !(area.x_min.is_finite() && area.y_min.is_finite()) {
                return Err(IngestError::InvalidGrid(format!("non-finite corner for {}", area.area_id)));
            }
        }
        for (i, a) in areas.iter().enumerate() {
            for b in &areas[i + 1..] {
                let overlap_x = (a.x_min - b.x_min).abs() < side_m;
                let overlap_y = (a.y_min - b.y_min).abs() < side_m;
                if overlap_x && overlap_y {
                    return Err(IngestError::InvalidGrid(format!(
                        "areas {} and {} overlap",
                        a.area_id, b.area_id
                    )));
                }
            }
        }
        Ok(Self {
            side_m,
            areas,
            geo_origin: None,
        })
    }

    pub fn with_geo_origin(mut self, origin: GeoOrigin) -> Self {
        self.geo_origin = Some(origin);
        self
    }

    /// Row-major `cols × rows` block of areas named `A1`, `A2`, ... starting
    /// from the top-left cell, with the map origin at the bottom-left corner.
    pub fn square_block(cols: usize, rows: usize, side_m: f64) -> Result<Self, IngestError> {
        let mut areas = Vec::with_capacity(cols * rows);
        for row in 0..rows {
            for col in 0..cols {
                areas.push(Area {
                    area_id: format!("A{}", row * cols + col + 1),
                    x_min: col as f64 * side_m,
                    y_min: (rows - 1 - row) as f64 * side_m,
                });
            }
        }
        Self::new(side_m, areas)
    }

    /// The nine 2 km areas of the reference study, with an origin that
    /// places the reference landmarks in their listed areas.
    pub fn cologne() -> Self {
        Self::square_block(3, 3, DEFAULT_SIDE_M)
            .expect("static grid is valid")
            .with_geo_origin(GeoOrigin {
                lat: 50.936,
                lon: 6.980,
            })
    }

    pub fn from_json(text: &str) -> Result<Self, IngestError> {
        let file: GridFile = serde_json::from_str(text).map_err(|e| IngestError::InvalidGrid(e.to_string()))?;
        let grid = Self::new(file.side_m, file.areas)?;
        Ok(match file.geo_origin {
            Some(origin) => grid.with_geo_origin(origin),
            None => grid,
        })
    }

    pub fn to_json(&self) -> String {
        let file = GridFile {
            side_m: self.side_m,
            areas: self.areas.clone(),
            geo_origin: self.geo_origin,
        };
        serde_json::to_string_pretty(&file).expect("grid serializes")
    }

    pub fn side_m(&self) -> f64 {
        self.side_m
    }

    pub fn areas(&self) -> &[Area] {
        &self.areas
    }

    pub fn len(&self) -> usize {
        self.areas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.areas.is_empty()
    }

    pub fn area_id(&self, index: usize) -> &str {
        &self.areas[index].area_id
    }

    pub fn index_of(&self, area_id: &str) -> Option<usize> {
        self.areas.iter().position(|a| a.area_id == area_id)
    }

    /// Index of the area containing the point, if any.
    pub fn locate(&self, x: f64, y: f64) -> Option<usize> {
        self.areas.iter().position(|a| {
            x >= a.x_min && x < a.x_min + self.side_m && y >= a.y_min && y < a.y_min + self.side_m
        })
    }

    pub fn geo_origin(&self) -> Option<GeoOrigin> {
        self.geo_origin
    }

    /// Equirectangular projection about the grid centroid latitude.
    pub fn project(&self, lat: f64, lon: f64) -> Result<(f64, f64), IngestError> {
        let origin = self.geo_origin.ok_or(IngestError::MissingGeoOrigin)?;
        let n = self.areas.len().max(1) as f64;
        let centroid_y = self.areas.iter().map(|a| a.y_min + self.side_m / 2.0).sum::<f64>() / n;
        let centroid_lat = origin.lat + (centroid_y / EARTH_RADIUS_M).to_degrees();
        let x = EARTH_RADIUS_M * (lon - origin.lon).to_radians() * centroid_lat.to_radians().cos();
        let y = EARTH_RADIUS_M * (lat - origin.lat).to_radians();
        Ok((x, y))
    }
}
