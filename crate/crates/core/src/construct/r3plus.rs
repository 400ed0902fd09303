//! Three parities, longer code: four pairs per matching (k = 4m) over GF(q)
//! with 3 | q − 1 and q linear in m. The fourth repair subspace of each
//! matching is spanned by edge sums, so this family is not access-optimal.

use super::r3::matrix_a_r3;
use super::{certify, conjugate, units};
use crate::aset::{ASPair, ASSet, Label, Variant, STAR};
use crate::error::{Error, Result};
use crate::gf::{CubeRoots, Felt, Field};
use crate::linalg::{unit, Mat, Subspace};
use crate::matchings::{matchings_r3, Matching};
use crate::par::{self, Exec};

/// Rows `u + v + w`, `u + γ₂v + γ₁w`, `u + γ₁v + γ₂w`.
pub fn block_n3(field: &Field, roots: &CubeRoots, u: &[Felt], v: &[Felt], w: &[Felt]) -> Mat {
    let row = |cv: Felt, cw: Felt| {
        let mut out = u.to_vec();
        field.add_scaled(&mut out, v, cv);
        field.add_scaled(&mut out, w, cw);
        out
    };
    let rows = vec![row(Felt::ONE, Felt::ONE), row(roots.g2, roots.g1), row(roots.g1, roots.g2)];
    Mat::from_rows(field, u.len(), &rows).expect("equal-length inputs")
}

/// Eigenvalue scales `(λ, λh, λh², λh³)` of the four matrices of one matching.
pub fn quad_lambdas(field: &Field, lambda: Felt, h: Felt) -> [Felt; 4] {
    let mut out = [lambda; 4];
    for t in 1..4 {
        out[t] = field.mul(out[t - 1], h);
    }
    out
}

/// The four pairs of one matching, labelled Z, Z', Z'', Z*.
pub fn quad_from_matching(field: &Field, z: &Matching, index: usize, lambda: Felt, h: Felt) -> Result<[ASPair; 4]> {
    if lambda.is_zero() || h.is_zero() {
        return Err(Error::ZeroLambda);
    }
    if z.r != 3 {
        return Err(Error::UnsupportedR(z.r));
    }
    let roots = field.cube_roots()?;
    let ell = z.ell;
    let a = matrix_a_r3(field, ell)?;
    let lambdas = quad_lambdas(field, lambda, h);
    let neg = |v: &[Felt]| v.iter().map(|&x| field.neg(x)).collect::<Vec<_>>();

    let mut blocks: [Vec<Vec<Felt>>; 4] = Default::default();
    let mut sums = Vec::with_capacity(z.edges());
    for i in 0..z.edges() {
        let z0 = unit(ell, z.colors[0][i]);
        let z1 = unit(ell, z.colors[1][i]);
        let z2 = unit(ell, z.colors[2][i]);
        let mut s = z0.clone();
        field.add_scaled(&mut s, &z1, Felt::ONE);
        field.add_scaled(&mut s, &z2, Felt::ONE);
        let parts = [
            block_n3(field, &roots, &s, &neg(&z1), &neg(&z2)),
            block_n3(field, &roots, &neg(&z2), &neg(&z0), &s),
            block_n3(field, &roots, &neg(&z1), &s, &neg(&z0)),
            block_n3(field, &roots, &z0, &z2, &z1),
        ];
        for (b, p) in blocks.iter_mut().zip(parts) {
            b.extend(p.row_vecs());
        }
        sums.push(s);
    }
    let make = |color: usize| -> Result<ASPair> {
        let p = Mat::from_rows(field, ell, &blocks[color])?;
        let s = if color == STAR {
            Subspace::from_vectors(field, ell, &sums)?
        } else {
            Subspace::from_vectors(field, ell, &units(ell, &z.colors[color]))?
        };
        Ok(ASPair { a: conjugate(&p, &a, lambdas[color])?, s, label: Label { matching: index, color } })
    };
    Ok([make(0)?, make(1)?, make(2)?, make(STAR)?])
}

// L = (A_a² − A_c²)(A_a − A_c)⁻¹ − (A_a² − A_b²)(A_a − A_b)⁻¹ is invertible exactly when
// the block Vandermonde matrix on (a, b, c) is, given invertible differences.
fn schur_invertible(sq: &[Mat], lin: &[Mat], a: usize, b: usize, c: usize) -> Result<bool> {
    let term = |x: usize| -> Result<Option<Mat>> {
        match lin[a].sub(&lin[x])?.invert() {
            Ok(inv) => Ok(Some(sq[a].sub(&sq[x])?.mul(&inv)?)),
            Err(Error::Singular) => Ok(None),
            Err(e) => Err(e),
        }
    };
    match (term(c)?, term(b)?) {
        (Some(tc), Some(tb)) => Ok(tc.sub(&tb)?.is_invertible()),
        _ => Ok(false),
    }
}

/// True when h gives a single matching (with λ = 1) all four Vandermonde conditions.
pub fn h_is_valid(field: &Field, m: usize, h: Felt) -> Result<bool> {
    if h.is_zero() || [6, 12, 18].iter().any(|&e| field.pow(h, e) == Felt::ONE) {
        return Ok(false);
    }
    let z = &matchings_r3(m)?[0];
    let quad = quad_from_matching(field, z, 0, Felt::ONE, h)?;
    let lin: Vec<Mat> = quad.iter().map(|p| p.a.clone()).collect();
    let sq = lin.iter().map(|a| a.mul(a)).collect::<Result<Vec<_>>>()?;
    for (a, b, c) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
        if !schur_invertible(&sq, &lin, a, b, c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The canonically first valid h.
pub fn find_h(field: &Field, m: usize) -> Result<Felt> {
    if field.p() == 3 {
        return Err(Error::BadCharacteristic(3));
    }
    field.cube_roots()?;
    for h in field.nonzero() {
        if h_is_valid(field, m, h)? {
            return Ok(h);
        }
    }
    Err(Error::NoValidH(field.q()))
}

/// One base λ per matching such that sixth powers of the four scaled
/// eigenvalues of different matchings never collide.
pub fn assign_lambda_families(field: &Field, m: usize, h: Felt) -> Result<Vec<Felt>> {
    let h6 = field.pow(h, 6);
    let h6_inv = field.inv(h6)?;
    let mut feasible = field.nonzero();
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let Some(&lambda) = feasible.first() else {
            return Err(Error::Infeasible { q: field.q(), m });
        };
        out.push(lambda);
        let base = field.pow(lambda, 6);
        let mut banned = vec![base];
        let (mut up, mut down) = (base, base);
        for _ in 0..3 {
            up = field.mul(up, h6);
            down = field.mul(down, h6_inv);
            banned.extend([up, down]);
        }
        feasible.retain(|&e| !banned.contains(&field.pow(e, 6)));
    }
    Ok(out)
}

pub fn build_r3plus_unchecked(m: usize, field: &Field) -> Result<ASSet> {
    let h = find_h(field, m)?;
    let lambdas = assign_lambda_families(field, m, h)?;
    let ms = matchings_r3(m)?;
    let quads = par::map(Exec::default(), m, |i| quad_from_matching(field, &ms[i], i, lambdas[i], h))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(ASSet {
        variant: Variant::R3Long,
        m,
        r: 3,
        ell: 3usize.pow(m as u32),
        field: field.clone(),
        pairs: quads.into_iter().flatten().collect(),
        h: Some(h),
        lambda_base: lambdas,
    })
}

pub fn build_r3plus(m: usize, field: &Field) -> Result<ASSet> {
    certify(build_r3plus_unchecked(m, field)?)
}
