//! Certification of the subspace condition: independence, invariance and
//! nonsingularity, plus access-optimality and intersection audits.

use std::time::Instant;

use serde::Serialize;

use crate::aset::ASSet;
use crate::error::{Error, Result};
use crate::linalg::{Mat, Subspace};
use crate::par::{self, Exec};

/// A square block submatrix of the parity block matrix: block rows are pair
/// indices, block columns are powers of the encoding matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Submatrix {
    pub rows: Vec<usize>,
    pub powers: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceCheck {
    pub subspace: usize,
    pub matrix: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonsingularCheck {
    pub submatrix: Submatrix,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionAudit {
    pub i: usize,
    pub j: usize,
    pub cross_matching: bool,
    pub measured: usize,
    /// ℓ/r² for subspaces from different matchings.
    pub expected: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub passed: bool,
    pub independence: Vec<bool>,
    pub invariance: Vec<InvarianceCheck>,
    pub nonsingular: Vec<NonsingularCheck>,
    pub access_optimal: Vec<bool>,
    pub intersection_audit: Vec<IntersectionAudit>,
    /// Wall-clock seconds; left out of JSON so outputs stay reproducible.
    #[serde(skip)]
    pub timing: f64,
}

impl Certificate {
    /// Short description of the first failing checks.
    pub fn failure_summary(&self) -> String {
        let mut out = Vec::new();
        for (i, ok) in self.independence.iter().enumerate() {
            if !ok {
                out.push(format!("independence of pair {i}"));
            }
        }
        for c in self.invariance.iter().filter(|c| !c.ok) {
            out.push(format!("S_{} not invariant under A_{}", c.subspace, c.matrix));
        }
        for c in self.nonsingular.iter().filter(|c| !c.ok) {
            out.push(format!("singular block rows {:?} powers {:?}", c.submatrix.rows, c.submatrix.powers));
        }
        let n = out.len();
        out.truncate(5);
        if n > 5 {
            out.push(format!("and {} more", n - 5));
        }
        if out.is_empty() {
            "none".into()
        } else {
            out.join("; ")
        }
    }

    /// True when every cross-matching intersection has dimension ℓ/r².
    pub fn intersections_as_expected(&self) -> bool {
        self.intersection_audit.iter().all(|a| a.expected.map_or(true, |e| e == a.measured))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// `S_i + S_iA_i + … + S_iA_i^{r−1}` is the whole space, per pair.
pub fn check_independence(set: &ASSet, exec: Exec) -> Vec<bool> {
    par::map_items(exec, &set.pairs, |p| {
        let mut parts = vec![p.s.basis().clone()];
        for t in 1..set.r {
            let next = parts[t - 1].mul(&p.a).expect("square pair matrix");
            parts.push(next);
        }
        let refs: Vec<&Mat> = parts.iter().collect();
        Mat::vstack(&refs).map(|m| m.rank() == set.ell).unwrap_or(false)
    })
}

/// `S_i·A_j = S_i` for every ordered pair i ≠ j.
pub fn check_invariance(set: &ASSet, exec: Exec) -> Vec<InvarianceCheck> {
    let k = set.k();
    let ordered: Vec<(usize, usize)> =
        (0..k).flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    par::map_items(exec, &ordered, |&(i, j)| {
        let s = &set.pairs[i].s;
        let ok = s.image_mul(&set.pairs[j].a).map(|img| &img == s).unwrap_or(false);
        InvarianceCheck { subspace: i, matrix: j, ok }
    })
}

fn combos(k: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            rec(i + 1, k, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, size, &mut Vec::new(), &mut out);
    out
}

/// Every square block submatrix is invertible. For r = 2 this is A_i and
/// A_i − A_j; for r = 3 it is A_i, A_i², A_j − A_i, A_j² − A_i² and the full
/// 3ℓ × 3ℓ block Vandermonde matrix of every triple.
pub fn check_nonsingular(set: &ASSet, exec: Exec) -> Result<Vec<NonsingularCheck>> {
    let k = set.k();
    let ell = set.ell;
    let sub = |rows: Vec<usize>, powers: Vec<usize>| Submatrix { rows, powers };
    let mut jobs: Vec<Submatrix> = Vec::new();
    match set.r {
        1 => {}
        2 => {
            jobs.extend((0..k).map(|i| sub(vec![i], vec![1])));
            jobs.extend(combos(k, 2).into_iter().map(|c| sub(c, vec![0, 1])));
        }
        3 => {
            for i in 0..k {
                jobs.push(sub(vec![i], vec![1]));
                jobs.push(sub(vec![i], vec![2]));
            }
            for c in combos(k, 2) {
                jobs.push(sub(c.clone(), vec![0, 1]));
                jobs.push(sub(c, vec![0, 2]));
            }
            jobs.extend(combos(k, 3).into_iter().map(|c| sub(c, vec![0, 1, 2])));
        }
        r => return Err(Error::UnsupportedR(r)),
    }
    let squares: Vec<Mat> =
        if set.r == 3 { par::map_items(exec, &set.pairs, |p| p.a.mul(&p.a).expect("square")) } else { Vec::new() };
    let power = |i: usize, e: usize| -> &Mat {
        match e {
            1 => &set.pairs[i].a,
            2 => &squares[i],
            _ => unreachable!("identity handled separately"),
        }
    };
    let id = Mat::identity(&set.field, ell);
    Ok(par::map_items(exec, &jobs, |s| {
        let ok = match (s.rows.len(), s.powers.as_slice()) {
            (1, [e]) => power(s.rows[0], *e).is_invertible(),
            // [I X; I Y] is invertible exactly when Y − X is.
            (2, [0, e]) => power(s.rows[1], *e).sub(power(s.rows[0], *e)).map(|d| d.is_invertible()).unwrap_or(false),
            _ => {
                let grid: Vec<Vec<&Mat>> = s.rows.iter().map(|&i| vec![&id, &set.pairs[i].a, &squares[i]]).collect();
                Mat::block(&grid).map(|m| m.is_invertible()).unwrap_or(false)
            }
        };
        NonsingularCheck { submatrix: s.clone(), ok }
    }))
}

/// Whether each repair subspace has a unit-vector basis.
pub fn check_access_optimal(set: &ASSet) -> Vec<bool> {
    set.pairs.iter().map(|p| p.s.is_unit_vector_basis()).collect()
}

/// Intersection dimension of every pair of repair subspaces.
pub fn audit_intersections(set: &ASSet, exec: Exec) -> Vec<IntersectionAudit> {
    let pairs = combos(set.k(), 2);
    let expected = set.ell / (set.r * set.r);
    par::map_items(exec, &pairs, |c| {
        let (i, j) = (c[0], c[1]);
        let (a, b): (&Subspace, &Subspace) = (&set.pairs[i].s, &set.pairs[j].s);
        let cross = set.pairs[i].label.matching != set.pairs[j].label.matching;
        IntersectionAudit {
            i,
            j,
            cross_matching: cross,
            measured: a.intersection_dim(b).unwrap_or(usize::MAX),
            expected: cross.then_some(expected),
        }
    })
}

/// Runs every check.
pub fn full(set: &ASSet, exec: Exec) -> Result<Certificate> {
    let start = Instant::now();
    set.validate()?;
    let nonsingular = check_nonsingular(set, exec)?;
    let independence = check_independence(set, exec);
    let invariance = check_invariance(set, exec);
    let passed = independence.iter().all(|&b| b) && invariance.iter().all(|c| c.ok) && nonsingular.iter().all(|c| c.ok);
    Ok(Certificate {
        passed,
        independence,
        invariance,
        nonsingular,
        access_optimal: check_access_optimal(set),
        intersection_audit: audit_intersections(set, exec),
        timing: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aset::{ASPair, Label, Variant};
    use crate::construct::{build_r2, build_r3, build_r3plus};
    use crate::gf::{Felt, Field};

    fn gf(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn built_sets_pass() {
        let c = full(&build_r2(2, &gf(3)).unwrap(), Exec::Sequential).unwrap();
        assert!(c.passed);
        assert!(c.independence.iter().all(|&b| b));
        let c = full(&build_r3(1, &gf(7)).unwrap(), Exec::Sequential).unwrap();
        assert!(c.passed);
        assert_eq!(c.invariance.len(), 6);
    }

    #[test]
    fn eigenvector_span_is_not_independent() {
        let mut set = build_r2(2, &gf(3)).unwrap();
        // p_0 + p_1 of P_Z are eigenvectors of A_Z; their span is A_Z-invariant.
        let a = &set.pairs[0].a;
        let f = set.field.clone();
        let probe = Mat::identity(&f, 4);
        let mut eig = Vec::new();
        for v in probe.row_vecs() {
            let av = a.vec_mul(&v).unwrap();
            let sum: Vec<Felt> = v.iter().zip(&av).map(|(&x, &y)| f.add(x, y)).collect();
            if sum.iter().any(|x| !x.is_zero()) {
                eig.push(sum);
            }
        }
        let s = Subspace::from_vectors(&f, 4, &eig).unwrap();
        assert_eq!(s.dim(), 2);
        set.pairs[0].s = s;
        assert!(!check_independence(&set, Exec::Sequential)[0]);
    }

    #[test]
    fn degenerate_r1() {
        let f = gf(5);
        let set = ASSet {
            variant: Variant::Custom,
            m: 1,
            r: 1,
            ell: 3,
            field: f.clone(),
            pairs: vec![ASPair {
                a: Mat::identity(&f, 3),
                s: Subspace::of_units(&f, 3, &[0, 1, 2]),
                label: Label { matching: 0, color: 0 },
            }],
            h: None,
            lambda_base: vec![],
        };
        assert_eq!(check_independence(&set, Exec::Sequential), vec![true]);
        assert!(check_invariance(&set, Exec::Sequential).is_empty());
    }

    #[test]
    fn random_subspace_breaks_invariance() {
        let mut set = build_r3(1, &gf(7)).unwrap();
        let f = set.field.clone();
        set.pairs[0].s = Subspace::from_vectors(&f, 3, &[vec![Felt(1), Felt(3), Felt(5)]]).unwrap();
        assert!(check_invariance(&set, Exec::Sequential).iter().any(|c| !c.ok));
    }

    #[test]
    fn r3plus_check_counts() {
        let set = build_r3plus(1, &gf(67)).unwrap();
        let checks = check_nonsingular(&set, Exec::Sequential).unwrap();
        let count = |n: usize| checks.iter().filter(|c| c.submatrix.rows.len() == n).count();
        assert_eq!((count(1), count(2), count(3)), (8, 12, 4));
        assert!(checks.iter().all(|c| c.ok));
        let access = check_access_optimal(&set);
        assert_eq!(access, vec![true, true, true, false]);
    }

    #[test]
    fn duplicated_matrix_is_singular() {
        let mut set = build_r2(2, &gf(3)).unwrap();
        set.pairs[1].a = set.pairs[0].a.clone();
        let checks = check_nonsingular(&set, Exec::Sequential).unwrap();
        assert!(checks.iter().any(|c| !c.ok && c.submatrix.rows == vec![0, 1]));
    }

    #[test]
    fn unsupported_r() {
        let mut set = build_r2(2, &gf(3)).unwrap();
        set.r = 4;
        assert_eq!(check_nonsingular(&set, Exec::Sequential), Err(Error::UnsupportedR(4)));
    }

    #[test]
    fn transposed_matrix_fails() {
        let mut set = build_r2(3, &gf(4)).unwrap();
        set.pairs[2].a = set.pairs[2].a.transpose();
        let c = full(&set, Exec::Sequential).unwrap();
        assert!(!c.passed);
        assert_ne!(c.failure_summary(), "none");
    }

    #[test]
    fn intersection_examples() {
        let c = full(&build_r2(4, &gf(5)).unwrap(), Exec::Parallel).unwrap();
        assert!(c.intersection_audit.iter().filter(|a| a.cross_matching).all(|a| a.measured == 4));
        assert!(c.intersection_audit.iter().filter(|a| !a.cross_matching).all(|a| a.measured == 0));
        let c = full(&build_r3(2, &gf(13)).unwrap(), Exec::Parallel).unwrap();
        assert!(c.intersections_as_expected());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let set = build_r3(2, &gf(13)).unwrap();
        let a = full(&set, Exec::Sequential).unwrap();
        let b = full(&set, Exec::Parallel).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
