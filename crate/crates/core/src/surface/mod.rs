//! Closed surface groups: words, pants decompositions and Fuchsian holonomy
//! built from Fenchel-Nielsen coordinates.

pub mod holonomy;
pub mod pants;
pub mod word;

pub use holonomy::{curve_length, holonomy_from_fn, validate_rep, FuchsianRep, RepDiagnostics};
pub use pants::{CurveRole, FenchelNielsen, PantsCurve, PantsGraph, PantsNode};
pub use word::{CurveClass, Letter, Word};
pub mod marked;
pub use marked::MarkedSurface;
pub mod doc;
pub use doc::SurfaceDoc;
