//! Layouts shipped with the crate, addressable by name.

use super::layout_doc::{parse_layout_document, LayoutDocument};
use super::IoError;
use crate::geometry::Layout;

pub const FIXTURE_NAMES: [&str; 3] = ["rect-5x10", "l-shape", "office-a1"];

fn text(name: &str) -> Option<&'static str> {
    match name {
        "rect-5x10" => Some(include_str!("../../fixtures/rect-5x10.json")),
        "l-shape" => Some(include_str!("../../fixtures/l-shape.json")),
        "office-a1" => Some(include_str!("../../fixtures/office-a1.json")),
        _ => None,
    }
}

pub fn fixture_document(name: &str) -> Result<LayoutDocument, IoError> {
    let text = text(name).ok_or_else(|| IoError::UnknownFixture {
        name: name.into(),
        available: FIXTURE_NAMES.iter().map(|s| s.to_string()).collect(),
    })?;
    parse_layout_document(text)
}

pub fn fixture(name: &str) -> Result<Layout, IoError> {
    fixture_document(name)?.to_layout()
}
