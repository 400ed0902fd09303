//! Two parities, access-optimal: 2m pairs of 2^m × 2^m matrices over GF(q), q ≥ m + 1.

use super::{certify, conjugate, units};
use crate::aset::{ASPair, ASSet, Label, Variant};
use crate::error::{Error, Result};
use crate::gf::{Felt, Field};
use crate::linalg::{Mat, Subspace};
use crate::matchings::{matchings_r2, Matching};
use crate::par::{self, Exec};

/// `diag(A⁺(λ), −A⁺(λ))` where A⁺(λ) is made of 2×2 blocks `[[0, λ], [λ, 0]]`.
pub fn matrix_a_lambda(field: &Field, ell: usize, lambda: Felt) -> Result<Mat> {
    if ell == 0 || ell % 4 != 0 {
        return Err(Error::BadLength(ell));
    }
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    let mut a = Mat::zeros(field, ell, ell);
    for t in 0..ell / 2 {
        let v = if t < ell / 4 { lambda } else { field.neg(lambda) };
        a.set(2 * t, 2 * t + 1, v);
        a.set(2 * t + 1, 2 * t, v);
    }
    Ok(a)
}

/// `(P_Z, P_Z')`: rows `z_i, z_i' − z_i` and `z_i', z_i + z_i'` interleaved.
pub fn change_matrices(field: &Field, z: &Matching) -> Result<(Mat, Mat)> {
    if z.r != 2 {
        return Err(Error::UnsupportedR(z.r));
    }
    let ell = z.ell;
    let mut pz = Mat::zeros(field, ell, ell);
    let mut pzp = Mat::zeros(field, ell, ell);
    let minus = field.neg(Felt::ONE);
    for i in 0..z.edges() {
        let (a, b) = (z.colors[0][i], z.colors[1][i]);
        pz.set(2 * i, a, Felt::ONE);
        pz.set(2 * i + 1, b, Felt::ONE);
        pz.set(2 * i + 1, a, minus);
        pzp.set(2 * i, b, Felt::ONE);
        pzp.set(2 * i + 1, a, Felt::ONE);
        pzp.set(2 * i + 1, b, Felt::ONE);
    }
    Ok((pz, pzp))
}

/// The two pairs contributed by one matching with eigenvalue scale λ.
pub fn pair_from_matching(field: &Field, z: &Matching, index: usize, lambda: Felt) -> Result<[ASPair; 2]> {
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    let a = matrix_a_lambda(field, z.ell, lambda)?;
    let (pz, pzp) = change_matrices(field, z)?;
    let make = |p: &Mat, color: usize| -> Result<ASPair> {
        Ok(ASPair {
            a: conjugate(p, &a, Felt::ONE)?,
            s: Subspace::from_vectors(field, z.ell, &units(z.ell, &z.colors[color]))?,
            label: Label { matching: index, color },
        })
    };
    Ok([make(&pz, 0)?, make(&pzp, 1)?])
}

/// One λ per matching. Odd q pairs them as `λ_{2t} = −λ_{2t+1}`.
pub fn assign_lambdas_r2(field: &Field, m: usize) -> Result<Vec<Felt>> {
    let q = field.q();
    if (q as usize) < m + 1 {
        return Err(Error::FieldTooSmall { q, m });
    }
    let nonzero = field.nonzero();
    if field.p() == 2 {
        return Ok(nonzero[..m].to_vec());
    }
    let mut used = vec![false; q as usize];
    let next_free =
        |used: &[bool]| nonzero.iter().copied().find(|x| !used[x.0 as usize]).ok_or(Error::FieldTooSmall { q, m });
    let mut out = Vec::with_capacity(m);
    while out.len() + 1 < m {
        let a = next_free(&used)?;
        let b = field.neg(a);
        used[a.0 as usize] = true;
        used[b.0 as usize] = true;
        out.extend([a, b]);
    }
    if out.len() < m {
        out.push(next_free(&used)?);
    }
    Ok(out)
}

/// Builds the set without running the verifier.
pub fn build_r2_unchecked(m: usize, field: &Field) -> Result<ASSet> {
    let lambdas = assign_lambdas_r2(field, m)?;
    let ms = matchings_r2(m)?;
    let pairs = par::map(Exec::default(), m, |i| pair_from_matching(field, &ms[i], i, lambdas[i]))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(ASSet {
        variant: Variant::R2AccessOptimal,
        m,
        r: 2,
        ell: 1 << m,
        field: field.clone(),
        pairs: pairs.into_iter().flatten().collect(),
        h: None,
        lambda_base: Vec::new(),
    })
}

/// Builds and certifies the set.
pub fn build_r2(m: usize, field: &Field) -> Result<ASSet> {
    certify(build_r2_unchecked(m, field)?)
}
