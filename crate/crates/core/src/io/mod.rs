//! Model files, CSV tables and SVG plots.

mod model_file;
mod svg;
mod tables;

pub use model_file::{load_model, model_to_json, parse_model};
pub use svg::{emit_svg, AsymptoteOverlay, SvgPlot};
pub use tables::{
    fmt_f64, read_numeric_csv, read_zeros_csv, write_curve_csv, write_density_csv, write_matches_csv,
    write_points_csv, write_zeros_csv, CURVE_COLUMNS, DENSITY_COLUMNS, MATCH_COLUMNS, ZERO_COLUMNS,
};
