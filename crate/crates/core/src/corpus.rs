//! Grid diagrams shipped with the library.

use crate::error::Result;
use crate::grid::{parse_grid, GridDiagram};

/// `(name, text)` for every built-in diagram. The two trefoil grids are
/// different diagrams of the same knot.
pub const CORPUS: &[(&str, &str)] = &[
    ("unknot-2", include_str!("../corpus/unknot-2.grid")),
    ("unknot-3", include_str!("../corpus/unknot-3.grid")),
    ("trefoil-5a", include_str!("../corpus/trefoil-5a.grid")),
    ("trefoil-5b", include_str!("../corpus/trefoil-5b.grid")),
    ("figure8-7", include_str!("../corpus/figure8-7.grid")),
];

pub fn corpus_text(name: &str) -> Option<&'static str> {
    CORPUS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn corpus_grid(name: &str) -> Option<Result<GridDiagram>> {
    corpus_text(name).map(parse_grid)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    CORPUS.iter().map(|(n, _)| *n)
}
