//! Explicit minimum-storage regenerating (MSR) codes with two and three
//! parities.
//!
//! Three families of (A, S)-sets are built from perfect matchings on boolean
//! and ternary cubes, certified by [`verify::full`], and run through the
//! encode / repair / reconstruct engine in [`msr`].
//!
//! ```
//! use msr_core::{construct::build_r2, gf::Field, msr::CodeSpec};
//!
//! let set = build_r2(2, &Field::new(3, 1).unwrap()).unwrap();
//! let code = CodeSpec::new(set).unwrap();
//! assert_eq!((code.k(), code.n(), code.ell()), (4, 6, 4));
//! ```

pub mod aset;
pub mod construct;
pub mod error;
pub mod gf;
pub mod linalg;
pub mod matchings;
pub mod msr;
pub mod par;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
