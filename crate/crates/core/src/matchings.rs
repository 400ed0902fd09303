//! Boolean and ternary cubes and the explicit perfect matchings built from them.
//!
//! Vertex i is the digit string of i with digit 0 leftmost (most significant).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A perfect colored matching of an r-uniform hypergraph on `ell` vertices.
/// Edge j is `{colors[0][j], …, colors[r-1][j]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub r: usize,
    pub ell: usize,
    pub colors: Vec<Vec<usize>>,
}

impl Matching {
    pub fn edges(&self) -> usize {
        self.ell / self.r
    }

    pub fn edge(&self, j: usize) -> Vec<usize> {
        self.colors.iter().map(|c| c[j]).collect()
    }

    /// Color of every vertex.
    pub fn color_of(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.ell];
        for (c, set) in self.colors.iter().enumerate() {
            for &v in set {
                out[v] = c;
            }
        }
        out
    }

    /// True when the color sets partition the vertex set into equal parts.
    pub fn is_partition(&self) -> bool {
        if self.colors.len() != self.r || self.colors.iter().any(|c| c.len() * self.r != self.ell) {
            return false;
        }
        let mut seen = vec![false; self.ell];
        for &v in self.colors.iter().flatten() {
            if v >= self.ell || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }
}

fn digit(v: usize, i: usize, m: usize, base: usize) -> usize {
    v / base.pow((m - 1 - i) as u32) % base
}

fn cube(m: usize, base: usize, constraints: &[(usize, usize)]) -> Result<Vec<usize>> {
    for (n, &(i, b)) in constraints.iter().enumerate() {
        if i >= m || b >= base {
            return Err(Error::BadIndex(format!("constraint ({i}, {b}) outside a {m}-digit base-{base} cube")));
        }
        if constraints[..n].iter().any(|&(j, _)| j == i) {
            return Err(Error::BadIndex(format!("digit {i} constrained twice")));
        }
    }
    Ok((0..base.pow(m as u32)).filter(|&v| constraints.iter().all(|&(i, b)| digit(v, i, m, base) == b)).collect())
}

/// Vertices of the m-bit cube whose bits match every `(index, bit)` pair.
pub fn boolean_cube(m: usize, constraints: &[(usize, usize)]) -> Result<Vec<usize>> {
    cube(m, 2, constraints)
}

/// Vertices of the m-digit ternary cube with digit i equal to b.
pub fn ternary_cube(m: usize, i: usize, b: usize) -> Result<Vec<usize>> {
    cube(m, 3, &[(i, b)])
}

fn concat(a: Vec<usize>, b: Vec<usize>) -> Vec<usize> {
    a.into_iter().chain(b).collect()
}

/// The m matchings on 2^m vertices used by the two-parity construction.
pub fn matchings_r2(m: usize) -> Result<Vec<Matching>> {
    if m < 2 {
        return Err(Error::TooSmall(m));
    }
    let c = |cs: &[(usize, usize)]| boolean_cube(m, cs).expect("valid constraints");
    let ell = 1 << m;
    let mut out = Vec::with_capacity(m);
    for t in 0..m / 2 {
        let (a, b) = (2 * t, 2 * t + 1);
        out.push(Matching {
            r: 2,
            ell,
            colors: vec![
                concat(c(&[(a, 0), (b, 0)]), c(&[(a, 0), (b, 1)])),
                concat(c(&[(a, 1), (b, 0)]), c(&[(a, 1), (b, 1)])),
            ],
        });
        out.push(Matching {
            r: 2,
            ell,
            colors: vec![
                concat(c(&[(a, 0), (b, 0)]), c(&[(a, 1), (b, 0)])),
                concat(c(&[(a, 0), (b, 1)]), c(&[(a, 1), (b, 1)])),
            ],
        });
    }
    if m % 2 == 1 {
        out.push(Matching { r: 2, ell, colors: vec![c(&[(m - 1, 0)]), c(&[(m - 1, 1)])] });
    }
    Ok(out)
}

/// The m matchings on 3^m vertices: matching i splits on digit i.
pub fn matchings_r3(m: usize) -> Result<Vec<Matching>> {
    if m < 1 {
        return Err(Error::TooSmall(m));
    }
    let ell = 3usize.pow(m as u32);
    Ok((0..m)
        .map(|i| Matching { r: 3, ell, colors: (0..3).map(|b| ternary_cube(m, i, b).expect("valid digit")).collect() })
        .collect())
}

/// Every edge of x is monochromatic in y and every edge of y is monochromatic in x.
pub fn pairing_condition(x: &Matching, y: &Matching) -> bool {
    if x.r != y.r || x.ell != y.ell {
        return false;
    }
    let mono = |a: &Matching, b: &Matching| {
        let col = b.color_of();
        (0..a.edges()).all(|j| {
            let e = a.edge(j);
            e.iter().all(|&v| col[v] == col[e[0]])
        })
    };
    mono(x, y) && mono(y, x)
}
