//! Versioned JSON floor-plan documents.

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::geometry::{Layout, Point, Room, WallSegment};

pub const LAYOUT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallDoc {
    pub id: u32,
    pub ax: f64,
    pub ay: f64,
    pub bx: f64,
    pub by: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomDoc {
    pub id: String,
    /// Vertex loop `[[x, y], ...]`, not repeating the first vertex.
    pub vertices: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

/// On-disk floor plan. Coordinates are in metres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutDocument {
    pub version: u32,
    pub units: String,
    pub walls: Vec<WallDoc>,
    #[serde(default)]
    pub rooms: Vec<RoomDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<LayoutMetadata>,
}

impl LayoutDocument {
    /// Checks version and units, then builds a validated [`Layout`].
    pub fn to_layout(&self) -> Result<Layout, IoError> {
        if self.version != LAYOUT_VERSION {
            return Err(IoError::schema("version", format!(
                "unsupported layout version {} (expected {LAYOUT_VERSION})",
                self.version
            )));
        }
        if self.units != "meters" {
            return Err(IoError::schema("units", format!("units must be \"meters\", got {:?}", self.units)));
        }
        let walls = self
            .walls
            .iter()
            .map(|w| WallSegment::new(w.id, Point::new(w.ax, w.ay), Point::new(w.bx, w.by)))
            .collect();
        let rooms = self
            .rooms
            .iter()
            .map(|r| Room { id: r.id.clone(), vertices: r.vertices.iter().map(|&[x, y]| Point::new(x, y)).collect() })
            .collect();
        Ok(Layout::new(walls, rooms)?)
    }

    pub fn from_layout(layout: &Layout, metadata: Option<LayoutMetadata>) -> Self {
        Self {
            version: LAYOUT_VERSION,
            units: "meters".into(),
            walls: layout
                .walls()
                .iter()
                .map(|w| WallDoc { id: w.id, ax: w.a.x, ay: w.a.y, bx: w.b.x, by: w.b.y })
                .collect(),
            rooms: layout
                .rooms()
                .iter()
                .map(|r| RoomDoc { id: r.id.clone(), vertices: r.vertices.iter().map(|p| [p.x, p.y]).collect() })
                .collect(),
            metadata,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout documents always serialize")
    }
}

/// Parses document text, reporting the field path and line of any schema
/// violation.
pub fn parse_layout_document(text: &str) -> Result<LayoutDocument, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(IoError::from_json_path)
}

pub fn parse_layout(text: &str) -> Result<Layout, IoError> {
    parse_layout_document(text)?.to_layout()
}
