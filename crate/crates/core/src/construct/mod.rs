//! The three explicit families and field-size selection.

pub mod r2;
pub mod r3;
pub mod r3plus;

use crate::aset::{ASSet, Variant};
use crate::error::{Error, Result};
use crate::gf::{prime_power, prime_powers, Felt, Field};
use crate::linalg::{unit, Mat};
use crate::par::Exec;
use crate::verify;

pub use r2::build_r2;
pub use r3::build_r3;
pub use r3plus::build_r3plus;

/// Largest field order tried during automatic selection.
pub const MAX_Q: u64 = 1024;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// Field-size policy for [`construct`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum QChoice {
    /// Smallest admissible q, escalating on failure, optionally restricted to one parity.
    Auto(Option<Parity>),
    /// Exactly this q; no escalation.
    Fixed(u64),
}

/// `c · P⁻¹ A P`.
pub(crate) fn conjugate(p: &Mat, a: &Mat, c: Felt) -> Result<Mat> {
    Ok(p.invert()?.mul(a)?.mul(p)?.scale(c))
}

/// Block diagonal matrix of companion blocks of x^r − 1, so that e_i·C = e_{i−1 mod r}.
pub(crate) fn companion_blocks(field: &Field, ell: usize, r: usize) -> Mat {
    let mut a = Mat::zeros(field, ell, ell);
    for b in 0..ell / r {
        for i in 0..r {
            a.set(b * r + i, b * r + (i + r - 1) % r, Felt::ONE);
        }
    }
    a
}

pub(crate) fn units(ell: usize, idx: &[usize]) -> Vec<Vec<Felt>> {
    idx.iter().map(|&i| unit(ell, i)).collect()
}

/// Runs the full verifier and turns a failed certificate into an error.
pub(crate) fn certify(set: ASSet) -> Result<ASSet> {
    let cert = verify::full(&set, Exec::default())?;
    if cert.passed {
        Ok(set)
    } else {
        Err(Error::VerificationFailed(cert.failure_summary()))
    }
}

/// Candidate field orders for a family, ascending, each satisfying the family's bound.
pub fn candidates(variant: Variant, m: usize, parity: Option<Parity>) -> Vec<u64> {
    let parity_ok = |q: u64| match parity {
        None => true,
        Some(Parity::Odd) => q % 2 == 1,
        Some(Parity::Even) => q % 2 == 0,
    };
    let m = m as u64;
    prime_powers(2, MAX_Q)
        .into_iter()
        .filter(|&q| parity_ok(q))
        .filter(|&q| {
            let (p, _) = prime_power(q).expect("prime power");
            let third = (q - 1) % 3 == 0 && p != 3;
            match variant {
                Variant::R2AccessOptimal => q > m,
                Variant::R3AccessOptimal => third && if q % 2 == 1 { q > 6 * m } else { q > 3 * m },
                Variant::R3Long => third && q > 42 * m + 1,
                Variant::Custom => false,
            }
        })
        .collect()
}

fn build(variant: Variant, m: usize, field: &Field) -> Result<ASSet> {
    match variant {
        Variant::R2AccessOptimal => build_r2(m, field),
        Variant::R3AccessOptimal => build_r3(m, field),
        Variant::R3Long => build_r3plus(m, field),
        Variant::Custom => Err(Error::Parse("custom sets are not constructed".into())),
    }
}

fn escalates(e: &Error) -> bool {
    matches!(
        e,
        Error::FieldTooSmall { .. }
            | Error::NoValidH(_)
            | Error::Infeasible { .. }
            | Error::VerificationFailed(_)
            | Error::NoModulusAvailable { .. }
    )
}

/// Builds and certifies a set, choosing q per `choice`.
pub fn construct(variant: Variant, m: usize, choice: QChoice) -> Result<ASSet> {
    match choice {
        QChoice::Fixed(q) => build(variant, m, &Field::of_order(q)?),
        QChoice::Auto(parity) => {
            let mut last = Error::FieldTooSmall { q: MAX_Q as u32, m };
            for q in candidates(variant, m, parity) {
                match Field::of_order(q).and_then(|f| build(variant, m, &f)) {
                    Ok(set) => return Ok(set),
                    Err(e) if escalates(&e) => last = e,
                    Err(e) => return Err(e),
                }
            }
            Err(last)
        }
    }
}
