//! Exact truncated-series computations for the AKNS hierarchy: the basic
//! matrix resolvent and its recursion, the tau-structure, wave functions
//! of types A and B, and k-point correlation functions by three routes.
//!
//! Every type is generic over a base field `Q: Scalar`. The aliases below
//! fix `Q` to arbitrary-precision rationals, which is what the command-line
//! tool and the tests use.

pub mod correlators;
pub mod diffpoly;
pub mod eps;
pub mod error;
pub mod mat2;
pub mod multi;
pub mod report;
pub mod resolvent;
pub mod scalar;
pub mod waves;
pub mod xi;
pub mod xjet;

pub use correlators::{CorrelatorTable, CycleClassSet, Source};
pub use diffpoly::{DiffPoly, InitialData, JetVar, Species};
pub use eps::EpsLaurent;
pub use error::{Error, Fault, Result};
pub use mat2::Mat2;
pub use multi::{MultiSeries, Region};
pub use report::{Check, Report};
pub use resolvent::{FlowTable, MRData, OmegaTable};
pub use scalar::{Arith, DiffAlgebra, Ring, Scalar};
pub use waves::{ATable, WavePair};
pub use xi::XiSeries;
pub use xjet::XJet;

pub type Rational = num_rational::BigRational;
pub type Eps = EpsLaurent<Rational>;
pub type Jet = XJet<Rational>;
pub type Poly = DiffPoly<Rational>;
pub type Data = InitialData<Rational>;
pub type JetSeries = XiSeries<Jet>;
pub type Table = CorrelatorTable<Jet>;
