//! File formats: JSON curve-network input, MSH 4.1 and JSON mesh output,
//! report serialization and SVG rendering.

mod input;
mod mesh_json;
mod msh;
mod svg;

pub use input::{network_from_document, parse_input, parse_input_str, InputDocument, SegmentDoc, RegionDoc};
pub use mesh_json::{mesh_from_document, read_mesh_json, write_mesh_json, MeshDocument};
pub use msh::write_msh;
pub use svg::{render_linear_svg, render_reconstruction_svg, render_svg, ColorBy};
