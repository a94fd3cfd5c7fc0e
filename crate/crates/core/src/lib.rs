//! Right spectrum and S-spectrum of quaternionic matrices and of finite
//! sections of operators on quaternionic sequence spaces.

pub mod gallery;
pub mod numerics;
pub mod qmat;
pub mod quat;
pub mod spectral;

pub use gallery::{OperatorSpec, TrendReport};
pub use qmat::{ComplexAdjoint, QMatrix, RealOp};
pub use quat::{Quaternion, SimilaritySphere, UnitQuaternion};
pub use spectral::{SpectralConfig, SpectrumReport};
