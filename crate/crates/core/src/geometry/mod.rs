//! Domains, cross-sections, Kelvin inversions and MSS classification.

mod domain;
mod kelvin;
pub mod polygon;
mod section;

pub use domain::{ConeSection, DomainKind, DomainSpec, Frame};
pub use kelvin::{
    kelvin_point, kelvin_pullback, kelvin_pullback_at, signed_reflection, KelvinField,
};
pub use polygon::Polygon;
pub use section::{
    classify_mss, cross_section, direction_grid, polygon_segments_inside, radial_extent,
    section_included, CrossSection, MssClassification, MssTag, DIRECTION_GRID,
};
