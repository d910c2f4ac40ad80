//! Signatures, Maya diagrams, interlacing relations and the bijection
//! between perfect matchings and interlaced signature chains.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lattice::{Color, Graph};

/// Nonincreasing integer tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    parts: Vec<i64>,
}

impl Signature {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("signature parts must be nonincreasing"));
        }
        Ok(Signature { parts })
    }

    pub fn zeros(len: usize) -> Self {
        Signature { parts: vec![0; len] }
    }

    pub fn empty() -> Self {
        Signature { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.parts.last().map_or(true, |&p| p >= 0)
    }

    /// |μ| = Σ μ_i
    pub fn size(&self) -> i64 {
        self.parts.iter().sum()
    }

    /// Particle positions λ_i + ℓ − i, decreasing, 0-based.
    pub fn positions(&self) -> Vec<i64> {
        let l = self.len() as i64;
        self.parts.iter().enumerate().map(|(i, &p)| p + l - 1 - i as i64).collect()
    }

    pub fn from_positions(mut positions: Vec<i64>) -> Result<Self> {
        positions.sort_unstable_by(|a, b| b.cmp(a));
        let l = positions.len() as i64;
        let parts: Vec<i64> = positions
            .iter()
            .enumerate()
            .map(|(i, &p)| p - (l - 1 - i as i64))
            .collect();
        Signature::new(parts)
    }
}

/// ω = (Ω_N − N, …, Ω_1 − 1), the signature of the boundary row.
pub fn signature_from_boundary(omega: &[u64], n: usize) -> Result<Signature> {
    if omega.len() != n || omega.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("Ω must be strictly increasing of length N"));
    }
    let parts = (0..n)
        .map(|k| omega[n - 1 - k] as i64 - (n - k) as i64)
        .collect();
    Signature::new(parts)
}

/// λ ≺ μ: Young diagrams differ by a horizontal strip
/// (μ_1 ≥ λ_1 ≥ μ_2 ≥ λ_2 ≥ …). Lengths may differ by at most one.
pub fn interlaces(lambda: &Signature, mu: &Signature) -> Result<bool> {
    let (ll, lm) = (lambda.len(), mu.len());
    if ll + 1 != lm && ll != lm {
        return Err(Error::invalid("interlacing needs ℓ(λ) ∈ {ℓ(μ), ℓ(μ)−1}"));
    }
    for i in 0..ll {
        if lambda.parts[i] > mu.parts[i] {
            return Ok(false);
        }
        if i + 1 < lm && lambda.parts[i] < mu.parts[i + 1] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// λ ≺′ μ: Young diagrams differ by a vertical strip
/// (λ_i ≤ μ_i ≤ λ_i + 1 for every row); equal lengths.
pub fn cointerlaces(lambda: &Signature, mu: &Signature) -> Result<bool> {
    if lambda.len() != mu.len() {
        return Err(Error::invalid("cointerlacing needs equal lengths"));
    }
    Ok(lambda
        .parts
        .iter()
        .zip(&mu.parts)
        .all(|(&l, &m)| m == l || m == l + 1))
}

/// Finite Maya diagram; `true` cells are black particles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MayaDiagram {
    pub cells: Vec<bool>,
}

impl MayaDiagram {
    pub fn black_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Position with as many cells on the left as there are black particles.
    pub fn origin(&self) -> usize {
        self.black_count()
    }
}

/// Encode λ (ℓ parts, all in [0, m]) as a Maya diagram of length ℓ + m with
/// black particles at positions λ_i + ℓ − i.
pub fn signature_to_maya(lambda: &Signature, m: u64) -> Result<MayaDiagram> {
    if !lambda.is_nonnegative() {
        return Err(Error::invalid("maya encoding needs a non-negative signature"));
    }
    if lambda.parts.first().map_or(false, |&p| p as u64 > m) {
        return Err(Error::invalid("largest part exceeds the box bound m"));
    }
    let mut cells = vec![false; lambda.len() + m as usize];
    for p in lambda.positions() {
        cells[p as usize] = true;
    }
    Ok(MayaDiagram { cells })
}

pub fn maya_to_signature(maya: &MayaDiagram) -> Signature {
    let positions: Vec<i64> = maya
        .cells
        .iter()
        .enumerate()
        .filter(|(_, &c)| c)
        .map(|(i, _)| i as i64)
        .collect();
    Signature::from_positions(positions).expect("positions are distinct")
}

/// Perfect matching, stored as a sorted set of edge ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    pub edge_ids: Vec<usize>,
}

impl Matching {
    pub fn new(mut edge_ids: Vec<usize>) -> Self {
        edge_ids.sort_unstable();
        Matching { edge_ids }
    }

    pub fn weight(&self, g: &Graph) -> f64 {
        self.edge_ids.iter().map(|&e| g.edges[e].weight).product()
    }

    pub fn ln_weight(&self, g: &Graph) -> f64 {
        self.edge_ids.iter().map(|&e| g.edges[e].weight.ln()).sum()
    }

    pub fn ne_sw_count(&self, g: &Graph) -> usize {
        self.edge_ids
            .iter()
            .filter(|&&e| g.edges[e].kind == crate::lattice::Direction::NeSw)
            .count()
    }

    /// Ids of NE-SW edges joining the given pair of adjacent rows.
    pub fn ne_sw_between(&self, g: &Graph, lower_row: usize) -> usize {
        self.edge_ids
            .iter()
            .filter(|&&e| {
                g.edges[e].kind == crate::lattice::Direction::NeSw && g.edges[e].rows.0 == lower_row
            })
            .count()
    }

    pub fn validate_perfect(&self, g: &Graph) -> Result<()> {
        let mut covered = vec![0usize; g.vertices.len()];
        for &e in &self.edge_ids {
            covered[g.edges[e].white] += 1;
            covered[g.edges[e].black] += 1;
        }
        for v in &g.vertices {
            let want = if v.is_virtual { 0 } else { 1 };
            if covered[v.id] != want {
                return Err(Error::invalid(format!(
                    "vertex {} covered {} times",
                    v.id, covered[v.id]
                )));
            }
        }
        Ok(())
    }
}

/// The sequence (μ^(N), ν^(N), μ^(N−1), …, ν^(1), μ^(0)), stored top-down in
/// the paper's order. Row k of the graph corresponds to `sigs[k−1]`; this is
/// the single place where that offset lives.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignatureChain {
    sigs: Vec<Signature>,
    n: usize,
}

impl SignatureChain {
    pub fn from_row_signatures(sigs: Vec<Signature>) -> Result<Self> {
        if sigs.len() % 2 == 0 {
            return Err(Error::invalid("chain must have 2N+1 signatures"));
        }
        let n = sigs.len() / 2;
        Ok(SignatureChain { sigs, n })
    }

    pub fn n_pairs(&self) -> usize {
        self.n
    }

    /// μ^{(i)}, the signature of white row 2(N−i)+1.
    pub fn mu(&self, i: usize) -> &Signature {
        &self.sigs[2 * (self.n - i)]
    }

    /// ν^{(i)}, the signature of black row 2(N−i)+2.
    pub fn nu(&self, i: usize) -> &Signature {
        &self.sigs[2 * (self.n - i) + 1]
    }

    /// Signature of graph row k (1-based).
    pub fn row(&self, k: usize) -> &Signature {
        &self.sigs[k - 1]
    }

    pub fn rows(&self) -> &[Signature] {
        &self.sigs
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        let n = g.n_pairs();
        if self.n != n {
            return Err(Error::invalid("chain length does not match the graph"));
        }
        let omega = signature_from_boundary(&g.spec.omega, n)?;
        if self.mu(n) != &omega {
            return Err(Error::invalid("μ^(N) must equal ω"));
        }
        if !self.mu(0).is_empty() {
            return Err(Error::invalid("μ^(0) must be empty"));
        }
        for i in 1..=n {
            if self.mu(i).len() != i || self.nu(i).len() != i {
                return Err(Error::invalid("ℓ(μ^(i)) = ℓ(ν^(i)) = i violated"));
            }
            if !cointerlaces(self.mu(i), self.nu(i))? {
                return Err(Error::invalid("μ^(i) ≺′ ν^(i) violated"));
            }
            if !interlaces(self.mu(i - 1), self.nu(i))? {
                return Err(Error::invalid("μ^(i−1) ≺ ν^(i) violated"));
            }
            // level index in row order: μ^(i) sits at rows 2(N−i)+1, 2(N−i)+2
            let level = n - i + 1;
            if g.spec.a_at(level) == 1 && self.mu(i) != self.nu(i) {
                return Err(Error::invalid("hexagon level must keep μ = ν"));
            }
        }
        Ok(())
    }
}

fn row_maya(g: &Graph, matched_up: &[Option<bool>], k: usize) -> MayaDiagram {
    let cells = g
        .row(k)
        .iter()
        .map(|&v| {
            if g.vertices[v].is_virtual {
                false
            } else {
                let up = matched_up[v].expect("perfect matching covers vertex");
                // white V-vertices match upward; black V-vertices match downward
                match g.vertices[v].color {
                    Color::White => up,
                    Color::Black => !up,
                }
            }
        })
        .collect();
    MayaDiagram { cells }
}

/// Maya diagrams of every row of a perfect matching (Construction of the
/// bijection: Λ-vertices ↦ white particles, V-vertices ↦ black).
pub fn matching_row_mayas(g: &Graph, m: &Matching) -> Result<Vec<MayaDiagram>> {
    m.validate_perfect(g)?;
    let mut matched_up: Vec<Option<bool>> = vec![None; g.vertices.len()];
    for &e in &m.edge_ids {
        let edge = &g.edges[e];
        let (lo, _) = edge.rows;
        // lower endpoint matches up, upper endpoint matches down
        let (lower, upper) = if g.vertices[edge.white].row == lo {
            (edge.white, edge.black)
        } else {
            (edge.black, edge.white)
        };
        matched_up[lower] = Some(true);
        matched_up[upper] = Some(false);
    }
    Ok((1..=2 * g.n_pairs() + 1).map(|k| row_maya(g, &matched_up, k)).collect())
}

/// Encode a perfect matching as the chain of row signatures.
pub fn matching_to_chain(g: &Graph, m: &Matching) -> Result<SignatureChain> {
    let sigs = matching_row_mayas(g, m)?.iter().map(maya_to_signature).collect();
    let chain = SignatureChain::from_row_signatures(sigs)?;
    chain.validate(g)?;
    Ok(chain)
}

/// Inverse of [`matching_to_chain`]: rebuild the edge set from the row
/// signatures. Pairings between adjacent rows are forced non-crossing.
pub fn chain_to_matching(g: &Graph, chain: &SignatureChain) -> Result<Matching> {
    chain.validate(g)?;
    let n = g.n_pairs();
    let mut edges = Vec::new();

    // x2 coordinates of black (true) or white (false) particles in row k
    let particle_x2 = |k: usize, black: bool| -> Vec<i64> {
        let sig = chain.row(k);
        let row = g.row(k);
        let mut flags = vec![false; row.len()];
        for p in sig.positions() {
            flags[p as usize] = true;
        }
        row.iter()
            .zip(flags)
            .filter(|&(&v, f)| f == black && !g.vertices[v].is_virtual)
            .map(|(&v, _)| g.vertices[v].x2)
            .collect()
    };

    let mut pair_rows = |lower: usize, black_particles: bool| -> Result<()> {
        let lo = particle_x2(lower, black_particles);
        let hi = particle_x2(lower + 1, black_particles);
        if lo.len() != hi.len() {
            return Err(Error::invalid("particle counts between adjacent rows disagree"));
        }
        for (wx, bx) in lo.iter().zip(&hi) {
            if (wx - bx).abs() != 1 {
                return Err(Error::invalid("chain does not describe a nearest-neighbor pairing"));
            }
            let va = g.row(lower).iter().find(|&&v| g.vertices[v].x2 == *wx).copied().unwrap();
            let vb = g.row(lower + 1).iter().find(|&&v| g.vertices[v].x2 == *bx).copied().unwrap();
            let e = g
                .edge_between(va, vb)
                .ok_or_else(|| Error::invalid("required edge is missing from the graph"))?;
            edges.push(e);
        }
        Ok(())
    };

    for s in 1..=n {
        // V-edges join the black particles of rows 2s−1 and 2s
        pair_rows(2 * s - 1, true)?;
        // Λ-edges join the white particles of rows 2s and 2s+1
        pair_rows(2 * s, false)?;
    }
    let matching = Matching::new(edges);
    matching.validate_perfect(g)?;
    Ok(matching)
}

/// Counting measure m(λ): atoms (λ_i + ℓ − i)/ℓ, mass 1/ℓ each.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingMeasure {
    pub atoms: Vec<f64>,
}

pub fn counting_measure(lambda: &Signature) -> CountingMeasure {
    let l = lambda.len() as f64;
    CountingMeasure {
        atoms: lambda
            .parts
            .iter()
            .enumerate()
            .map(|(i, &p)| (p as f64 + l - 1.0 - i as f64) / l)
            .collect(),
    }
}

impl CountingMeasure {
    pub fn moment(&self, j: u32) -> f64 {
        if self.atoms.is_empty() {
            return 0.0;
        }
        self.atoms.iter().map(|&a| a.powi(j as i32)).sum::<f64>() / self.atoms.len() as f64
    }

    /// Empirical CDF at x.
    pub fn cdf(&self, x: f64) -> f64 {
        if self.atoms.is_empty() {
            return 0.0;
        }
        self.atoms.iter().filter(|&&a| a <= x).count() as f64 / self.atoms.len() as f64
    }
}

/// Enumerate all signatures λ ≺ ν (one part shorter).
pub fn interlacing_predecessors(nu: &Signature) -> Vec<Signature> {
    let l = nu.len();
    if l == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0i64; l - 1];
    fn rec(nu: &[i64], i: usize, cur: &mut Vec<i64>, out: &mut Vec<Signature>) {
        if i == cur.len() {
            out.push(Signature::new(cur.clone()).unwrap());
            return;
        }
        let hi = nu[i];
        let lo = nu[i + 1];
        let cap = if i == 0 { hi } else { cur[i - 1].min(hi) };
        for v in lo..=cap {
            cur[i] = v;
            rec(nu, i + 1, cur, out);
        }
    }
    rec(nu.parts(), 0, &mut cur, &mut out);
    out
}

/// Enumerate all signatures λ ≻′ μ (vertical strip above μ, same length).
pub fn cointerlacing_successors(mu: &Signature) -> Vec<Signature> {
    let l = mu.len();
    let mut out = Vec::new();
    let mut cur = vec![0i64; l];
    fn rec(mu: &[i64], i: usize, cur: &mut Vec<i64>, out: &mut Vec<Signature>) {
        if i == cur.len() {
            out.push(Signature::new(cur.clone()).unwrap());
            return;
        }
        for add in 0..=1i64 {
            let v = mu[i] + add;
            if i > 0 && v > cur[i - 1] {
                continue;
            }
            cur[i] = v;
            rec(mu, i + 1, cur, out);
        }
    }
    if l == 0 {
        out.push(Signature::empty());
        return out;
    }
    rec(mu.parts(), 0, &mut cur, &mut out);
    out
}

/// t(i) = #(I1 ∩ {1..i−1}) from the remark bounding chain parts.
pub fn t_bound(g: &Graph, i: usize) -> usize {
    (1..i).filter(|&k| g.spec.a_at(k) == 1).count()
}

/// Pushforward helper used by tests: map from matchings to chains must be
/// injective; collisions indicate a bijection bug.
pub fn assert_distinct_chains(chains: &[SignatureChain]) -> Result<()> {
    let mut seen: HashMap<&SignatureChain, usize> = HashMap::new();
    for (i, c) in chains.iter().enumerate() {
        if let Some(j) = seen.insert(c, i) {
            return Err(Error::invalid(format!("chains {j} and {i} coincide")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, LatticeSpec, PeriodicWeights};
    use proptest::prelude::*;

    #[test]
    fn boundary_signature_examples() {
        let w = signature_from_boundary(&[1, 3, 6], 3).unwrap();
        assert_eq!(w.parts(), &[3, 1, 0]);
        let w = signature_from_boundary(&[1, 2, 3, 4, 5], 5).unwrap();
        assert_eq!(w.parts(), &[0, 0, 0, 0, 0]);
        let w = signature_from_boundary(&[1, 3, 5, 6], 4).unwrap();
        assert_eq!(w.parts(), &[2, 2, 1, 0]);
    }

    #[test]
    fn interlacing_examples() {
        let l = Signature::new(vec![2, 0]).unwrap();
        let nu = Signature::new(vec![3, 2, 0]).unwrap();
        assert!(interlaces(&l, &nu).unwrap());

        let mu = Signature::new(vec![3, 1, 0]).unwrap();
        let la = Signature::new(vec![4, 2, 0]).unwrap();
        assert!(cointerlaces(&mu, &la).unwrap());
        let lb = Signature::new(vec![5, 1, 0]).unwrap();
        assert!(!cointerlaces(&mu, &lb).unwrap());

        assert!(interlaces(&Signature::empty(), &Signature::new(vec![4]).unwrap()).unwrap());
        assert!(interlaces(&Signature::new(vec![7]).unwrap(), &Signature::empty()).is_err());
    }

    #[test]
    fn maya_examples() {
        let l = Signature::zeros(3);
        let m = signature_to_maya(&l, 2).unwrap();
        assert_eq!(m.cells, vec![true, true, true, false, false]);
        assert_eq!(m.origin(), 3);

        let l = Signature::new(vec![3, 1, 0]).unwrap();
        let m = signature_to_maya(&l, 3).unwrap();
        let pos: Vec<usize> =
            m.cells.iter().enumerate().filter(|(_, &c)| c).map(|(i, _)| i).collect();
        assert_eq!(pos, vec![0, 2, 5]);
        assert_eq!(maya_to_signature(&m), l);

        // 6 parts in a 6×6 box give the 12-cell diagram
        let l = Signature::new(vec![5, 4, 4, 4, 2, 0]).unwrap();
        let m = signature_to_maya(&l, 6).unwrap();
        assert_eq!(m.cells.len(), 12);
        assert_eq!(m.black_count(), 6);
        assert_eq!(maya_to_signature(&m), l);

        assert!(signature_to_maya(&Signature::new(vec![4]).unwrap(), 3).is_err());
    }

    #[test]
    fn counting_measure_examples() {
        let m = counting_measure(&Signature::zeros(2));
        assert_eq!(m.atoms, vec![0.5, 0.0]);
        let m = counting_measure(&Signature::new(vec![3, 1, 0]).unwrap());
        let want = [5.0 / 3.0, 2.0 / 3.0, 0.0];
        for (a, w) in m.atoms.iter().zip(want) {
            assert!((a - w).abs() < 1e-15);
        }
    }

    #[test]
    fn staircase_counting_measure_tends_to_uniform() {
        // λ = ((M−1)(N−1), …, 0) with N = 100, M = 2
        let n = 100usize;
        let parts: Vec<i64> = (0..n).map(|i| (n - 1 - i) as i64).collect();
        let m = counting_measure(&Signature::new(parts).unwrap());
        let sup = (0..=200)
            .map(|i| {
                let x = 2.0 * i as f64 / 200.0;
                (m.cdf(x) - (x / 2.0).clamp(0.0, 1.0)).abs()
            })
            .fold(0.0f64, f64::max);
        assert!(sup <= 2.0 / n as f64 + 1e-12, "sup = {sup}");
    }

    fn unique_matching_spec() -> LatticeSpec {
        LatticeSpec::new(vec![1], vec![1], PeriodicWeights::uniform(1, &[])).unwrap()
    }

    #[test]
    fn n1_bijection_roundtrip() {
        let g = build_lattice(&unique_matching_spec()).unwrap();
        let m = Matching::new(vec![0]);
        let chain = matching_to_chain(&g, &m).unwrap();
        assert_eq!(chain.mu(1).parts(), &[0]);
        assert_eq!(chain.nu(1).parts(), &[0]);
        assert!(chain.mu(0).is_empty());
        let back = chain_to_matching(&g, &chain).unwrap();
        assert_eq!(back, m);
    }

    proptest! {
        #[test]
        fn maya_roundtrip(parts in proptest::collection::vec(0i64..8, 0..6), extra in 0u64..4) {
            let mut p = parts.clone();
            p.sort_unstable_by(|a, b| b.cmp(a));
            let sig = Signature::new(p).unwrap();
            let bound = sig.parts().first().copied().unwrap_or(0) as u64 + extra;
            let maya = signature_to_maya(&sig, bound).unwrap();
            prop_assert_eq!(maya_to_signature(&maya), sig);
        }

        #[test]
        fn interlacing_enumerations_agree(parts in proptest::collection::vec(0i64..5, 1..5)) {
            let mut p = parts.clone();
            p.sort_unstable_by(|a, b| b.cmp(a));
            let nu = Signature::new(p).unwrap();
            for lambda in interlacing_predecessors(&nu) {
                prop_assert!(interlaces(&lambda, &nu).unwrap());
            }
            let mu = nu.clone();
            for lambda in cointerlacing_successors(&mu) {
                prop_assert!(cointerlaces(&mu, &lambda).unwrap());
            }
        }
    }
}
