//! Index transforms generated by Mellin and Laplace operators.
//!
//! Functions enter as Mellin images on a vertical line ([`mellin::MellinImage`]).
//! Each transform family ([`kernels::TransformFamily`]) provides its forward
//! kernel by quadrature and, where one exists, in closed form, along with its
//! inversion kernel and its Mellin–Barnes representation. [`transforms`]
//! builds the forward operators, inversion integrals, norm bounds and the
//! modified Kontorovich–Lebedev pair on top of the engines in [`quad`].

pub mod complexfn;
pub mod error;
pub mod kernels;
pub mod mellin;
pub mod quad;
pub mod transforms;

pub use error::{Error, Result, TailDiagnostic};
