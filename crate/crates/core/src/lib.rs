pub mod error;
pub mod moebius;
pub mod scalar;
pub mod surface;
pub mod laminations;
pub mod earthquake;
pub mod solvers;
pub mod duality;
pub mod harness;

pub use error::{Error, Result};
pub use scalar::BigReal;

pub type Isometry = moebius::Isometry2<f64>;
pub type BigIsometry = moebius::Isometry2<BigReal>;
pub type Minkowski = moebius::MinkowskiVec<f64>;
pub type Rep = surface::FuchsianRep<f64>;
pub type BigRep = surface::FuchsianRep<BigReal>;
