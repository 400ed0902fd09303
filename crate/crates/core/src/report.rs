//! Comparison rows (ℓ, k, access, q) for built codes, next to static
//! metadata for earlier MSR constructions.

use serde::Serialize;

use crate::aset::ASSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub code: String,
    pub r: usize,
    pub m: usize,
    pub ell: usize,
    pub k: usize,
    pub n: usize,
    pub q: u32,
    pub access_optimal: bool,
    /// Systematic nodes whose repair reads exactly ℓ/r symbols per helper.
    pub access_optimal_nodes: usize,
    pub max_access_per_helper: usize,
}

impl ReportRow {
    pub fn from_set(set: &ASSet) -> ReportRow {
        let support: Vec<usize> = set.pairs.iter().map(|p| p.s.basis().support_columns().len()).collect();
        let optimal = support.iter().filter(|&&s| s == set.ell / set.r).count();
        ReportRow {
            code: set.variant.name().to_string(),
            r: set.r,
            m: set.m,
            ell: set.ell,
            k: set.k(),
            n: set.n(),
            q: set.q(),
            access_optimal: optimal == set.k(),
            access_optimal_nodes: optimal,
            max_access_per_helper: support.into_iter().max().unwrap_or(0),
        }
    }
}

/// Earlier constructions as formulas in m; not built here.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PriorRow {
    pub code: &'static str,
    pub r: usize,
    pub ell: &'static str,
    pub k: &'static str,
    pub access: &'static str,
    pub q: &'static str,
}

pub const PRIOR: &[PriorRow] = &[
    PriorRow { code: "subspace framework", r: 2, ell: "2^m", k: "2m", access: "m nodes", q: "even m+1" },
    PriorRow { code: "long MDS", r: 2, ell: "2^m", k: "3m", access: "2m nodes", q: "2m+1" },
    PriorRow { code: "access-optimal MSR", r: 2, ell: "2^m", k: "2m", access: "yes", q: "2m+1" },
    PriorRow { code: "zigzag", r: 2, ell: "2^m", k: "m+1", access: "yes", q: "3" },
    PriorRow { code: "long MDS", r: 3, ell: "3^m", k: "4m", access: "3m nodes", q: "m^2 3^(m+1)+1" },
    PriorRow { code: "access-optimal MSR", r: 3, ell: "3^m", k: "3m", access: "yes", q: "C(3m+3,3) 3^(m+1)" },
    PriorRow { code: "zigzag", r: 3, ell: "3^m", k: "m+1", access: "yes", q: "4" },
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub prior: Vec<PriorRow>,
}

impl Report {
    pub fn new(sets: &[ASSet]) -> Report {
        let rs: Vec<usize> = sets.iter().map(|s| s.r).collect();
        Report {
            rows: sets.iter().map(ReportRow::from_set).collect(),
            prior: PRIOR.iter().filter(|p| rs.contains(&p.r)).cloned().collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn table(&self) -> String {
        let mut out = format!("{:<20} {:>2} {:>8} {:>5} {:>10} {:>20}\n", "code", "r", "ell", "k", "access", "q");
        for row in &self.rows {
            let access =
                if row.access_optimal { "yes".to_string() } else { format!("{} nodes", row.access_optimal_nodes) };
            out.push_str(&format!(
                "{:<20} {:>2} {:>8} {:>5} {:>10} {:>20}\n",
                row.code, row.r, row.ell, row.k, access, row.q
            ));
        }
        for p in &self.prior {
            out.push_str(&format!(
                "{:<20} {:>2} {:>8} {:>5} {:>10} {:>20}\n",
                format!("[{}]", p.code),
                p.r,
                p.ell,
                p.k,
                p.access,
                p.q
            ));
        }
        out
    }
}
