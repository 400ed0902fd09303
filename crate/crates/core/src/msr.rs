//! Systematic encoding, reconstruction from any k nodes, and exact repair of a
//! systematic node by projection onto its repair subspace.
//!
//! Node columns are column vectors: parity t holds `Σ_i A_i^t · C_i`.

use std::sync::OnceLock;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::aset::{ASSet, Variant};
use crate::error::{Error, Result};
use crate::gf::{Felt, Field};
use crate::linalg::Mat;
use crate::par::{self, Exec};

/// β = ℓ/r symbols per helper and the total over k + r − 1 helpers.
pub fn bandwidth_budget(ell: usize, k: usize, r: usize) -> (usize, usize) {
    (ell / r, (k + r - 1) * ell / r)
}

/// Precomputed interference matrices for repairing one systematic node.
#[derive(Clone, Debug)]
pub struct RepairPlan {
    pub failed: usize,
    pub projector: Mat,
    // interference[i][t] with Ŝ_j·A_i^t = M·Ŝ_j; empty for i = j.
    interference: Vec<Vec<Mat>>,
    system_inv: Mat,
    pub accessed: usize,
}

/// A code built from a certified (A, S)-set.
pub struct CodeSpec {
    aset: ASSet,
    powers: Vec<Vec<Mat>>,
    plans: Vec<OnceLock<Result<RepairPlan>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeArray {
    pub columns: Vec<Vec<Felt>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairTranscript {
    pub failed: usize,
    pub projector: Mat,
    /// `(helper node, Ŝ_j · its column)` for every surviving node.
    pub payloads: Vec<(usize, Vec<Felt>)>,
    pub symbols_sent: usize,
    pub symbols_accessed: Vec<usize>,
    pub recovered: Vec<Felt>,
}

fn hex_encode(field: &Field, v: &[Felt]) -> String {
    let w = field.hex_width();
    v.iter().map(|x| format!("{:0w$x}", x.0)).collect()
}

fn hex_decode(field: &Field, s: &str) -> Result<Vec<Felt>> {
    let w = field.hex_width();
    if !s.is_ascii() || s.len() % w != 0 {
        return Err(Error::Parse(format!("hex column length {} is not a multiple of {w}", s.len())));
    }
    (0..s.len() / w)
        .map(|i| {
            let v = u32::from_str_radix(&s[i * w..(i + 1) * w], 16).map_err(|e| Error::Parse(e.to_string()))?;
            field.elem(v)
        })
        .collect()
}

impl NodeArray {
    pub fn to_hex(&self, field: &Field) -> Vec<String> {
        self.columns.iter().map(|c| hex_encode(field, c)).collect()
    }

    pub fn from_hex(field: &Field, cols: &[String]) -> Result<NodeArray> {
        Ok(NodeArray { columns: cols.iter().map(|c| hex_decode(field, c)).collect::<Result<_>>()? })
    }
}

#[derive(Serialize)]
struct TranscriptJson<'a> {
    failed: usize,
    projector: Vec<Vec<u32>>,
    payloads: Vec<(usize, String)>,
    symbols_sent: usize,
    symbols_accessed: &'a [usize],
    recovered: String,
}

impl RepairTranscript {
    pub fn to_json(&self, field: &Field) -> String {
        let wire = TranscriptJson {
            failed: self.failed,
            projector: self.projector.to_grid(),
            payloads: self.payloads.iter().map(|(i, p)| (*i, hex_encode(field, p))).collect(),
            symbols_sent: self.symbols_sent,
            symbols_accessed: &self.symbols_accessed,
            recovered: hex_encode(field, &self.recovered),
        };
        serde_json::to_string_pretty(&wire).expect("plain data serializes")
    }
}

impl CodeSpec {
    pub fn new(aset: ASSet) -> Result<CodeSpec> {
        aset.validate()?;
        if aset.pairs.is_empty() {
            return Err(Error::BadLength(0));
        }
        let powers = aset
            .pairs
            .iter()
            .map(|p| (0..aset.r as u64).map(|t| p.a.pow(t)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let plans = (0..aset.k()).map(|_| OnceLock::new()).collect();
        Ok(CodeSpec { aset, powers, plans })
    }

    pub fn aset(&self) -> &ASSet {
        &self.aset
    }

    pub fn field(&self) -> &Field {
        &self.aset.field
    }

    pub fn k(&self) -> usize {
        self.aset.k()
    }

    pub fn r(&self) -> usize {
        self.aset.r
    }

    pub fn ell(&self) -> usize {
        self.aset.ell
    }

    pub fn n(&self) -> usize {
        self.k() + self.r()
    }

    pub fn q(&self) -> u32 {
        self.aset.q()
    }

    pub fn variant(&self) -> Variant {
        self.aset.variant
    }

    /// File size B = kℓ symbols.
    pub fn file_size(&self) -> usize {
        self.k() * self.ell()
    }

    pub fn access_optimal(&self) -> bool {
        self.aset.pairs.iter().all(|p| p.s.is_unit_vector_basis())
    }

    pub fn bandwidth_budget(&self) -> (usize, usize) {
        bandwidth_budget(self.ell(), self.k(), self.r())
    }

    pub fn encode(&self, file: &[Felt]) -> Result<NodeArray> {
        if file.len() != self.file_size() {
            return Err(Error::LengthMismatch { expected: self.file_size(), got: file.len() });
        }
        let ell = self.ell();
        let f = self.field();
        let mut columns: Vec<Vec<Felt>> = file.chunks(ell).map(<[Felt]>::to_vec).collect();
        for t in 0..self.r() {
            let mut parity = vec![Felt::ZERO; ell];
            for (powers, column) in self.powers.iter().zip(&columns) {
                let part = powers[t].mul_vec(column)?;
                f.add_scaled(&mut parity, &part, Felt::ONE);
            }
            columns.push(parity);
        }
        Ok(NodeArray { columns })
    }

    /// Recovers the file from exactly k distinct nodes.
    pub fn reconstruct(&self, nodes: &[(usize, Vec<Felt>)]) -> Result<Vec<Felt>> {
        let (k, ell, f) = (self.k(), self.ell(), self.field());
        if nodes.len() != k {
            return Err(Error::BadSubset(format!("need {k} nodes, got {}", nodes.len())));
        }
        let mut known: Vec<Option<&[Felt]>> = vec![None; k];
        let mut parities = Vec::new();
        let mut seen = vec![false; self.n()];
        for (idx, col) in nodes {
            if *idx >= self.n() || seen[*idx] {
                return Err(Error::BadSubset(format!("node {idx} is out of range or repeated")));
            }
            if col.len() != ell {
                return Err(Error::LengthMismatch { expected: ell, got: col.len() });
            }
            seen[*idx] = true;
            if *idx < k {
                known[*idx] = Some(col);
            } else {
                parities.push((*idx - k, col.as_slice()));
            }
        }
        parities.sort_by_key(|p| p.0);
        let missing: Vec<usize> = (0..k).filter(|&i| known[i].is_none()).collect();
        let mut file = vec![Felt::ZERO; k * ell];
        for (i, c) in known.iter().enumerate() {
            if let Some(c) = c {
                file[i * ell..(i + 1) * ell].copy_from_slice(c);
            }
        }
        if missing.is_empty() {
            return Ok(file);
        }
        let mut rhs = Vec::with_capacity(missing.len() * ell);
        for &(t, col) in &parities {
            let mut v = col.to_vec();
            for (i, c) in known.iter().enumerate() {
                if let Some(c) = c {
                    f.sub_scaled(&mut v, &self.powers[i][t].mul_vec(c)?, Felt::ONE);
                }
            }
            rhs.extend(v);
        }
        let grid: Vec<Vec<&Mat>> =
            parities.iter().map(|&(t, _)| missing.iter().map(|&i| &self.powers[i][t]).collect()).collect();
        let sol = Mat::block(&grid)?.solve(&rhs)?;
        for (n, &i) in missing.iter().enumerate() {
            file[i * ell..(i + 1) * ell].copy_from_slice(&sol[n * ell..(n + 1) * ell]);
        }
        Ok(file)
    }

    /// Canonical echelon basis of S_j.
    pub fn make_projector(&self, j: usize) -> Result<Mat> {
        if j >= self.k() {
            return Err(Error::BadIndex(format!("node {j} is not systematic (k = {})", self.k())));
        }
        Ok(self.aset.pairs[j].s.basis().clone())
    }

    fn build_plan(&self, j: usize) -> Result<RepairPlan> {
        let projector = self.make_projector(j)?;
        let s = &self.aset.pairs[j].s;
        let f = self.field();
        let mut interference = Vec::with_capacity(self.k());
        for i in 0..self.k() {
            if i == j {
                interference.push(Vec::new());
                continue;
            }
            let mut per_t = Vec::with_capacity(self.r());
            for t in 0..self.r() {
                let img = projector.mul(&self.powers[i][t])?;
                let rows = img
                    .row_vecs()
                    .iter()
                    .map(|row| s.coords(row).ok_or(Error::InterferenceSolveFailed(j)))
                    .collect::<Result<Vec<_>>>()?;
                per_t.push(Mat::from_rows(f, s.dim(), &rows)?);
            }
            interference.push(per_t);
        }
        let stacked = self.powers[j].iter().map(|p| projector.mul(p)).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&Mat> = stacked.iter().collect();
        let system_inv = Mat::vstack(&refs)?.invert()?;
        let accessed = projector.support_columns().len();
        Ok(RepairPlan { failed: j, projector, interference, system_inv, accessed })
    }

    /// The cached repair plan for node j.
    pub fn plan(&self, j: usize) -> Result<&RepairPlan> {
        if j >= self.k() {
            return Err(Error::BadIndex(format!("node {j} is not systematic (k = {})", self.k())));
        }
        self.plans[j].get_or_init(|| self.build_plan(j)).as_ref().map_err(Clone::clone)
    }

    /// Repairs systematic node j from the other n − 1 nodes.
    pub fn repair(&self, store: &NodeArray, j: usize) -> Result<RepairTranscript> {
        let plan = self.plan(j)?;
        let (k, ell, f) = (self.k(), self.ell(), self.field());
        if store.columns.len() != self.n() {
            return Err(Error::LengthMismatch { expected: self.n(), got: store.columns.len() });
        }
        let mut payloads = Vec::with_capacity(self.n() - 1);
        for (i, col) in store.columns.iter().enumerate() {
            if i != j {
                if col.len() != ell {
                    return Err(Error::LengthMismatch { expected: ell, got: col.len() });
                }
                payloads.push((i, plan.projector.mul_vec(col)?));
            }
        }
        let payload = |i: usize| &payloads[if i < j { i } else { i - 1 }].1;
        let mut rhs = Vec::with_capacity(ell);
        for t in 0..self.r() {
            let mut clean = payload(k + t).clone();
            for i in (0..k).filter(|&i| i != j) {
                f.sub_scaled(&mut clean, &plan.interference[i][t].mul_vec(payload(i))?, Felt::ONE);
            }
            rhs.extend(clean);
        }
        let recovered = plan.system_inv.mul_vec(&rhs)?;
        let per_helper = payloads.iter().map(|(_, p)| p.len()).sum();
        Ok(RepairTranscript {
            failed: j,
            projector: plan.projector.clone(),
            symbols_accessed: vec![plan.accessed; payloads.len()],
            symbols_sent: per_helper,
            payloads,
            recovered,
        })
    }

    pub fn random_file(&self, rng: &mut impl Rng) -> Vec<Felt> {
        let q = self.q();
        (0..self.file_size()).map(|_| Felt(rng.random_range(0..q))).collect()
    }
}

/// Per-node repair metering from a simulation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeRow {
    pub node: usize,
    pub label: String,
    pub symbols_sent: usize,
    pub accessed_per_helper: usize,
    pub budget_total: usize,
    pub budget_per_helper: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimulationReport {
    pub variant: Variant,
    pub seed: u64,
    pub trials: usize,
    pub repairs: usize,
    pub repair_failures: usize,
    pub reconstructs: usize,
    pub reconstruct_failures: usize,
    pub exhaustive_subsets: bool,
    pub nodes: Vec<NodeRow>,
    pub passed: bool,
}

impl SimulationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn table(&self) -> String {
        let mut out =
            format!("{:<6} {:<7} {:>6} {:>8} {:>8} {:>6}\n", "node", "label", "sent", "budget", "access", "exact");
        for r in &self.nodes {
            out.push_str(&format!(
                "{:<6} {:<7} {:>6} {:>8} {:>8} {:>6}\n",
                r.node, r.label, r.symbols_sent, r.budget_total, r.accessed_per_helper, r.exact
            ));
        }
        out.push_str(&format!(
            "repairs {}/{} exact, reconstructs {}/{} exact\n",
            self.repairs - self.repair_failures,
            self.repairs,
            self.reconstructs - self.reconstruct_failures,
            self.reconstructs
        ));
        out
    }
}

/// All k-subsets of {0, …, n−1} when n ≤ 7, otherwise `count` random ones.
pub fn node_subsets(n: usize, k: usize, count: usize, rng: &mut impl Rng) -> (Vec<Vec<usize>>, bool) {
    if n <= 7 {
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == k {
                out.push((0..n).filter(|&i| mask >> i & 1 == 1).collect());
            }
        }
        (out, true)
    } else {
        let out = (0..count)
            .map(|_| {
                let mut s = sample(rng, n, k).into_vec();
                s.sort_unstable();
                s
            })
            .collect();
        (out, false)
    }
}

struct TrialOutcome {
    sent: Vec<usize>,
    accessed: Vec<usize>,
    exact: Vec<bool>,
    reconstructs: usize,
    reconstruct_failures: usize,
    exhaustive: bool,
}

fn run_trial(spec: &CodeSpec, seed: u64, trial: usize) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let file = spec.random_file(&mut rng);
    let store = spec.encode(&file)?;
    let mut out = TrialOutcome {
        sent: Vec::new(),
        accessed: Vec::new(),
        exact: Vec::new(),
        reconstructs: 0,
        reconstruct_failures: 0,
        exhaustive: false,
    };
    for j in 0..spec.k() {
        let t = spec.repair(&store, j)?;
        out.exact.push(t.recovered == store.columns[j]);
        out.sent.push(t.symbols_sent);
        out.accessed.push(t.symbols_accessed.iter().copied().max().unwrap_or(0));
    }
    let (subsets, exhaustive) = node_subsets(spec.n(), spec.k(), 50, &mut rng);
    out.exhaustive = exhaustive;
    for s in subsets {
        let nodes: Vec<(usize, Vec<Felt>)> = s.iter().map(|&i| (i, store.columns[i].clone())).collect();
        out.reconstructs += 1;
        if spec.reconstruct(&nodes).map(|f| f != file).unwrap_or(true) {
            out.reconstruct_failures += 1;
        }
    }
    Ok(out)
}

/// Encode random files, repair every systematic node and reconstruct from
/// k-subsets. Trial t draws from stream t of a ChaCha generator seeded by `seed`.
pub fn simulate(spec: &CodeSpec, trials: usize, seed: u64, exec: Exec) -> Result<SimulationReport> {
    let outcomes = par::map(exec, trials, |t| run_trial(spec, seed, t)).into_iter().collect::<Result<Vec<_>>>()?;
    let (beta, total) = spec.bandwidth_budget();
    let nodes: Vec<NodeRow> = (0..spec.k())
        .map(|j| NodeRow {
            node: j,
            label: spec.aset().pairs[j].label.to_string(),
            symbols_sent: outcomes.iter().map(|o| o.sent[j]).max().unwrap_or(total),
            accessed_per_helper: outcomes.iter().map(|o| o.accessed[j]).max().unwrap_or(0),
            budget_total: total,
            budget_per_helper: beta,
            exact: outcomes.iter().all(|o| o.exact[j]),
        })
        .collect();
    let repairs = trials * spec.k();
    let repair_failures = outcomes.iter().map(|o| o.exact.iter().filter(|&&e| !e).count()).sum();
    let reconstructs = outcomes.iter().map(|o| o.reconstructs).sum();
    let reconstruct_failures = outcomes.iter().map(|o| o.reconstruct_failures).sum();
    let bandwidth_ok = outcomes.iter().all(|o| o.sent.iter().all(|&s| s == total));
    Ok(SimulationReport {
        variant: spec.variant(),
        seed,
        trials,
        repairs,
        repair_failures,
        reconstructs,
        reconstruct_failures,
        exhaustive_subsets: outcomes.first().map_or(true, |o| o.exhaustive),
        nodes,
        passed: repair_failures == 0 && reconstruct_failures == 0 && bandwidth_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_r2, build_r3, build_r3plus};
    use crate::linalg::unit;

    fn spec(set: ASSet) -> CodeSpec {
        CodeSpec::new(set).unwrap()
    }

    fn gf(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn budget_examples() {
        assert_eq!(bandwidth_budget(4, 4, 2), (2, 10));
        assert_eq!(bandwidth_budget(3, 3, 3), (1, 5));
        assert_eq!(bandwidth_budget(9, 8, 3), (3, 30));
    }

    #[test]
    fn encode_zero_and_unit() {
        let c = spec(build_r2(2, &gf(3)).unwrap());
        let zero = c.encode(&[Felt(0); 16]).unwrap();
        assert!(zero.columns.iter().flatten().all(|x| x.is_zero()));
        let mut file = vec![Felt(0); 16];
        file[0] = Felt(1);
        let nodes = c.encode(&file).unwrap();
        assert_eq!(nodes.columns[4], unit(4, 0));
        // A_1 · e_0 is the first column of A_1.
        let a = &c.aset().pairs[0].a;
        let col: Vec<Felt> = (0..4).map(|i| a.get(i, 0)).collect();
        assert_eq!(nodes.columns[5], col);
        assert!(matches!(c.encode(&file[..3]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn reconstruct_examples() {
        let c = spec(build_r2(2, &gf(3)).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let file = c.random_file(&mut rng);
        let nodes = c.encode(&file).unwrap();
        let pick = |idx: &[usize]| idx.iter().map(|&i| (i, nodes.columns[i].clone())).collect::<Vec<_>>();
        assert_eq!(c.reconstruct(&pick(&[0, 1, 2, 3])).unwrap(), file);
        assert_eq!(c.reconstruct(&pick(&[0, 1, 4, 5])).unwrap(), file);
        assert!(matches!(c.reconstruct(&pick(&[0, 1, 2])), Err(Error::BadSubset(_))));
        assert!(matches!(c.reconstruct(&pick(&[0, 1, 2, 2])), Err(Error::BadSubset(_))));
    }

    #[test]
    fn projector_examples() {
        let c = spec(build_r2(2, &gf(3)).unwrap());
        let p = c.make_projector(0).unwrap();
        assert_eq!(p.row_vecs(), vec![unit(4, 0), unit(4, 1)]);
        assert!(matches!(c.make_projector(4), Err(Error::BadIndex(_))));
        let c = spec(build_r3plus(1, &gf(67)).unwrap());
        let p = c.make_projector(3).unwrap();
        assert_eq!(p.row(0).iter().filter(|x| !x.is_zero()).count(), 3);
    }

    #[test]
    fn repair_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = spec(build_r2(2, &gf(3)).unwrap());
        let file = c.random_file(&mut rng);
        let nodes = c.encode(&file).unwrap();
        let t = c.repair(&nodes, 1).unwrap();
        assert_eq!(t.recovered, nodes.columns[1]);
        assert_eq!(t.symbols_sent, 10);

        let c = spec(build_r3(1, &gf(7)).unwrap());
        let nodes = c.encode(&c.random_file(&mut rng)).unwrap();
        let t = c.repair(&nodes, 0).unwrap();
        assert_eq!(t.recovered, nodes.columns[0]);
        assert_eq!(t.symbols_sent, 5);
        assert!(t.symbols_accessed.iter().all(|&a| a == 1));

        let c = spec(build_r3plus(1, &gf(67)).unwrap());
        let nodes = c.encode(&c.random_file(&mut rng)).unwrap();
        let t = c.repair(&nodes, 3).unwrap();
        assert_eq!(t.recovered, nodes.columns[3]);
        assert!(t.symbols_accessed.iter().all(|&a| a == 3));
        assert!(matches!(c.repair(&nodes, 4), Err(Error::BadIndex(_))));
    }

    #[test]
    fn broken_invariance_is_reported() {
        let mut set = build_r2(2, &gf(3)).unwrap();
        set.pairs[1].a = set.pairs[1].a.transpose();
        let c = spec(set);
        let nodes = c.encode(&[Felt(1); 16]).unwrap();
        assert!(c.repair(&nodes, 0).is_err());
    }

    #[test]
    fn hex_roundtrip() {
        let f = gf(1024);
        let a = NodeArray { columns: vec![vec![Felt(0), Felt(1023), Felt(17)]] };
        let hex = a.to_hex(&f);
        assert_eq!(hex, vec!["0003ff011".to_string()]);
        assert_eq!(NodeArray::from_hex(&f, &hex).unwrap(), a);
        assert!(NodeArray::from_hex(&f, &["12".into()]).is_err());
    }

    #[test]
    fn simulation_is_deterministic() {
        let c = spec(build_r2(2, &gf(3)).unwrap());
        let a = simulate(&c, 5, 42, Exec::Sequential).unwrap();
        let b = simulate(&c, 5, 42, Exec::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.passed);
        assert_eq!(a.reconstructs, 5 * 15);
    }
}
