//! Three parities, access-optimal: 3m pairs of 3^m × 3^m matrices over GF(q)
//! with 3 | q − 1, and q ≥ 6m + 1 (odd q) or q ≥ 3m + 1 (even q).

use super::{certify, companion_blocks, conjugate, units};
use crate::aset::{ASPair, ASSet, Label, Variant};
use crate::error::{Error, Result};
use crate::gf::{CubeRoots, Felt, Field};
use crate::linalg::{unit, Mat, Subspace};
use crate::matchings::{matchings_r3, Matching};
use crate::par::{self, Exec};

/// Per-characteristic constants for the three change matrices.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ConstantChoice {
    pub alpha: [Felt; 3],
    pub beta: [Felt; 3],
}

pub(crate) fn is_power_of(mut n: usize, b: usize) -> bool {
    if n < b {
        return false;
    }
    while n % b == 0 {
        n /= b;
    }
    n == 1
}

/// Block diagonal of ℓ/3 companion blocks of x³ − 1.
pub fn matrix_a_r3(field: &Field, ell: usize) -> Result<Mat> {
    if !is_power_of(ell, 3) {
        return Err(Error::BadLength(ell));
    }
    Ok(companion_blocks(field, ell, 3))
}

fn combo(field: &Field, terms: &[(Felt, &[Felt])]) -> Vec<Felt> {
    let mut out = vec![Felt::ZERO; terms[0].1.len()];
    for &(c, v) in terms {
        field.add_scaled(&mut out, v, c);
    }
    out
}

/// Rows `u`, `u − αγ₁/(γ₁−1)·v + β/(γ₁−1)·w`, `u + α/(γ₁−1)·v − βγ₁/(γ₁−1)·w`.
pub fn block_n(
    field: &Field,
    roots: &CubeRoots,
    alpha: Felt,
    beta: Felt,
    u: &[Felt],
    v: &[Felt],
    w: &[Felt],
) -> Result<Mat> {
    if alpha.is_zero() || beta.is_zero() {
        return Err(Error::ZeroConstant);
    }
    let d = field.inv(field.sub(roots.g1, Felt::ONE))?;
    let ag = field.mul(field.mul(alpha, roots.g1), d);
    let bg = field.mul(field.mul(beta, roots.g1), d);
    let a = field.mul(alpha, d);
    let b = field.mul(beta, d);
    let rows = vec![
        u.to_vec(),
        combo(field, &[(Felt::ONE, u), (field.neg(ag), v), (b, w)]),
        combo(field, &[(Felt::ONE, u), (a, v), (field.neg(bg), w)]),
    ];
    Mat::from_rows(field, u.len(), &rows)
}

/// `(α, α', α'', β, β', β'')` chosen by the characteristic.
pub fn constants_for_char(field: &Field) -> Result<ConstantChoice> {
    if field.p() == 3 {
        return Err(Error::BadCharacteristic(3));
    }
    let c = field.cube_roots()?;
    let one = Felt::ONE;
    let choice = match field.p() {
        2 => ConstantChoice { alpha: [one, c.g1, c.g1], beta: [one, c.g2, one] },
        7 => ConstantChoice { alpha: [c.g2, one, one], beta: [one, c.g1, one] },
        _ => ConstantChoice { alpha: [one; 3], beta: [one; 3] },
    };
    let nine = field.from_int(9);
    let [a, a1, a2] = choice.alpha;
    let [b, b1, b2] = choice.beta;
    debug_assert!(
        field.mul(a2, b) != nine && field.mul(a1, b2) != nine && field.mul(a, b1) != nine,
        "constant products must avoid 9"
    );
    Ok(choice)
}

/// The three pairs of one matching, all scaled by λ.
pub fn triple_from_matching(
    field: &Field,
    z: &Matching,
    index: usize,
    lambda: Felt,
    c: &ConstantChoice,
) -> Result<[ASPair; 3]> {
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    if z.r != 3 {
        return Err(Error::UnsupportedR(z.r));
    }
    let roots = field.cube_roots()?;
    let ell = z.ell;
    let a = matrix_a_r3(field, ell)?;
    let make = |color: usize| -> Result<ASPair> {
        // Color t uses (z^(t), z^(t+1), z^(t+2)) in cyclic order.
        let mut blocks = Vec::with_capacity(ell);
        for i in 0..z.edges() {
            let u = unit(ell, z.colors[color][i]);
            let v = unit(ell, z.colors[(color + 1) % 3][i]);
            let w = unit(ell, z.colors[(color + 2) % 3][i]);
            blocks.extend(block_n(field, &roots, c.alpha[color], c.beta[color], &u, &v, &w)?.row_vecs());
        }
        let p = Mat::from_rows(field, ell, &blocks)?;
        Ok(ASPair {
            a: conjugate(&p, &a, lambda)?,
            s: Subspace::from_vectors(field, ell, &units(ell, &z.colors[color]))?,
            label: Label { matching: index, color },
        })
    };
    Ok([make(0)?, make(1)?, make(2)?])
}

/// m nonzero elements with pairwise distinct sixth powers, greedily in canonical order.
pub fn assign_lambdas_r3(field: &Field, m: usize) -> Result<Vec<Felt>> {
    let q = field.q();
    let m64 = m as u32;
    let big_enough = if q % 2 == 1 { q > 6 * m64 } else { q > 3 * m64 };
    if !big_enough {
        return Err(Error::FieldTooSmall { q, m });
    }
    if (q - 1) % 3 != 0 {
        return Err(Error::NoOrder3Roots(q));
    }
    let mut out: Vec<Felt> = Vec::with_capacity(m);
    let mut sixth: Vec<Felt> = Vec::with_capacity(m);
    for x in field.nonzero() {
        if out.len() == m {
            break;
        }
        let s = field.pow(x, 6);
        if !sixth.contains(&s) {
            out.push(x);
            sixth.push(s);
        }
    }
    if out.len() < m {
        return Err(Error::FieldTooSmall { q, m });
    }
    Ok(out)
}

pub fn build_r3_unchecked(m: usize, field: &Field) -> Result<ASSet> {
    if field.p() == 3 {
        return Err(Error::BadCharacteristic(3));
    }
    let lambdas = assign_lambdas_r3(field, m)?;
    let c = constants_for_char(field)?;
    let ms = matchings_r3(m)?;
    let pairs = par::map(Exec::default(), m, |i| triple_from_matching(field, &ms[i], i, lambdas[i], &c))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(ASSet {
        variant: Variant::R3AccessOptimal,
        m,
        r: 3,
        ell: 3usize.pow(m as u32),
        field: field.clone(),
        pairs: pairs.into_iter().flatten().collect(),
        h: None,
        lambda_base: Vec::new(),
    })
}

pub fn build_r3(m: usize, field: &Field) -> Result<ASSet> {
    certify(build_r3_unchecked(m, field)?)
}
