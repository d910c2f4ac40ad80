//! Empirical statistics over sampled matchings: height fields with their
//! two independent computations, per-row counting measures, GUE-corner
//! rescaling, and law-of-large-numbers comparisons against the analytic
//! density.

use crate::error::{Error, Result};
use crate::lattice::{Direction, Graph};
use crate::limitshape::{BoundaryMeasureSpec, DensityProfile};
use crate::signatures::{counting_measure, matching_row_mayas, CountingMeasure, Matching, SignatureChain};
use crate::stats;

/// Height function on the face lattice, stored per row line: `rows[k−1][i]`
/// is the height at slot i of row k (left-aligned, slots 0..=len_k).
#[derive(Debug, Clone)]
pub struct HeightField {
    pub rows: Vec<Vec<i64>>,
}

impl HeightField {
    pub fn value(&self, row: usize, slot: usize) -> i64 {
        self.rows[row - 1][slot]
    }

    pub fn row_len(&self, row: usize) -> usize {
        self.rows[row - 1].len() - 1
    }
}

/// h(i, j) = 2j − 1 + 2·#{■ left of i} − 2·#{□ left of i} along row 2j,
/// cross-checked against the edge-crossing local rules.
pub fn height_field(g: &Graph, m: &Matching) -> Result<HeightField> {
    let mayas = matching_row_mayas(g, m)?;
    let mut rows = Vec::with_capacity(mayas.len());
    for (k0, maya) in mayas.iter().enumerate() {
        let k = k0 + 1;
        let mut vals = Vec::with_capacity(maya.cells.len() + 1);
        let mut blacks = 0i64;
        for i in 0..=maya.cells.len() {
            vals.push(k as i64 - 1 + 2 * (2 * blacks - i as i64));
            if i < maya.cells.len() && maya.cells[i] {
                blacks += 1;
            }
        }
        rows.push(vals);
    }
    let field = HeightField { rows };
    verify_height_local_rules(g, m, &field)?;
    Ok(field)
}

/// Check the Maya-count heights against the domino local rules on the
/// ambient square lattice: every diagonal step between face points crosses
/// one edge slot of the square lattice and changes h by ±(1 − 4·1{e ∈ M}),
/// sign + when the white side is on the left of the upward step. Slots
/// where the graph has no edge (fused hexagon diagonals, boundary slots)
/// are never matched and contribute ±1.
fn verify_height_local_rules(g: &Graph, m: &Matching, field: &HeightField) -> Result<()> {
    let in_matching: std::collections::HashSet<usize> = m.edge_ids.iter().copied().collect();
    let mut at = std::collections::HashMap::new();
    for v in &g.vertices {
        if !v.is_virtual {
            at.insert((v.row, v.x2), v.id);
        }
    }
    for k in 1..=2 * g.n_pairs() {
        if g.rows[k].is_empty() || g.rows[k + 1].is_empty() {
            continue;
        }
        let lk = g.left_x2(k) - 1;
        let lk1 = g.left_x2(k + 1) - 1;
        let len_k = field.rows[k - 1].len() as i64;
        let len_k1 = field.rows[k].len() as i64;
        for i in 0..len_k {
            let p2 = lk + 2 * i;
            for dx in [1i64, -1i64] {
                let q2 = p2 + dx;
                let i1 = q2 - lk1;
                if i1 % 2 != 0 {
                    continue;
                }
                let i1 = i1 / 2;
                if !(0..len_k1).contains(&i1) {
                    continue;
                }
                // the crossed slot joins (p2 ± 1, k) to (p2, k+1)
                let lower_x2 = if dx > 0 { p2 + 1 } else { p2 - 1 };
                let matched = match (at.get(&(k, lower_x2)), at.get(&(k + 1, p2))) {
                    (Some(&a), Some(&b)) => {
                        g.edge_between(a, b).map_or(false, |e| in_matching.contains(&e))
                    }
                    _ => false,
                };
                let white_is_lower = k % 2 == 1;
                let white_left = match (dx > 0, white_is_lower) {
                    (true, true) => false,
                    (true, false) => true,
                    (false, true) => true,
                    (false, false) => false,
                };
                let base: i64 = if matched { -3 } else { 1 };
                let expect = if white_left { base } else { -base };
                let dh = field.rows[k][i1 as usize] - field.rows[k - 1][i as usize];
                if dh != expect {
                    return Err(Error::numeric(format!(
                        "height mismatch at row {k} slot {i}: Δh = {dh}, local rule gives {expect}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Counting measure of the signature on row k of a chain.
pub fn empirical_row_measure(chain: &SignatureChain, k: usize) -> CountingMeasure {
    counting_measure(chain.row(k))
}

/// Centering and scale entering the GUE-corner rescaling. ψ₁, ψ₂ are the
/// first two moments of the boundary measure m_ω.
///
/// The centering carries +1/2 where the paper's display has −1/2: the
/// matrix-dimension shift Tr(P·(N−k)Id)/√N contributes +√N Σv_i, which the
/// displayed identity drops; with −1/2 even the deterministic Ω = (1..N)
/// case (b ≡ N−l) would be mis-centered.
#[derive(Debug, Clone, Copy)]
pub struct GueParams {
    pub a: f64,
    pub b: f64,
}

pub fn gue_params(boundary: &BoundaryMeasureSpec, w: &crate::lattice::PeriodicWeights) -> GueParams {
    let psi1 = boundary.moment(1);
    let psi2 = boundary.moment(2);
    let n = w.n as f64;
    let mut lin = 0.0;
    let mut sq = 0.0;
    for &y in w.y.values() {
        lin += y / (1.0 + y) / n;
        sq += y / ((1.0 + y) * (1.0 + y)) / n;
    }
    GueParams { a: psi1 + 0.5 + lin, b: psi2 - psi1 * psi1 - 1.0 / 12.0 + sq }
}

/// Normalization of the corner statistic. `SqrtB` divides the centered
/// positions by √(N B), under which GUE_k is normalized as the eigenvalue
/// law ∝ ∏(ε_i−ε_j)² e^{−Σε²/2} (k = 1: standard normal). `VarB` is the
/// paper's literal display (divide by B un-rooted), kept for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GueScale {
    SqrtB,
    VarB,
}

/// b_{kl} = λ^k_l + N − l from the k-th white row counted from the top.
pub fn corner_positions(chain: &SignatureChain, k: usize) -> Vec<i64> {
    let n = chain.n_pairs();
    let mu = chain.mu(k);
    mu.parts()
        .iter()
        .enumerate()
        .map(|(l0, &p)| p + n as i64 - (l0 as i64 + 1))
        .collect()
}

pub fn rescale_corners(
    raw: &[i64],
    n: usize,
    params: GueParams,
    scale: GueScale,
) -> Vec<f64> {
    let nf = n as f64;
    let denom = match scale {
        GueScale::SqrtB => (nf * params.b).sqrt(),
        GueScale::VarB => nf.sqrt() * params.b,
    };
    raw.iter().map(|&b| (b as f64 - nf * params.a) / denom).collect()
}

/// Rescaled corner samples with summary statistics.
#[derive(Debug, Clone)]
pub struct CornerStatistics {
    pub k: usize,
    pub params: GueParams,
    pub scale: GueScale,
    /// one rescaled vector (decreasing) per replica
    pub samples: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct RepulsionReport {
    pub delta: f64,
    pub empirical: f64,
    pub independent_ref: f64,
    pub gue_ref: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone)]
pub struct GueReport {
    pub k: usize,
    pub replicas: usize,
    pub params: GueParams,
    pub scale: GueScale,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    /// KS distance of the pooled k=1 statistic to the standard normal
    pub ks_to_normal: Option<f64>,
    pub repulsion: Option<RepulsionReport>,
}

pub fn corner_statistics(
    chains: &[SignatureChain],
    k: usize,
    boundary: &BoundaryMeasureSpec,
    w: &crate::lattice::PeriodicWeights,
    scale: GueScale,
) -> Result<CornerStatistics> {
    if chains.is_empty() {
        return Err(Error::invalid("need at least one replica"));
    }
    let n = chains[0].n_pairs();
    if k > n {
        return Err(Error::invalid("k exceeds the number of rows"));
    }
    let params = gue_params(boundary, w);
    if params.b <= 0.0 {
        return Err(Error::invalid("degenerate boundary: B ≤ 0 (deterministic corner)"));
    }
    let samples = chains
        .iter()
        .map(|c| rescale_corners(&corner_positions(c, k), n, params, scale))
        .collect();
    Ok(CornerStatistics { k, params, scale, samples })
}

/// P(|ε₁ − ε₂| < δ) for GUE_2 with density ∝ (ε₁−ε₂)² e^{−(ε₁²+ε₂²)/2}:
/// the gap s = ε₁−ε₂ has density ∝ s² e^{−s²/4} on s > 0.
pub fn gue2_gap_cdf(delta: f64) -> f64 {
    let f = |s: f64| s * s * (-s * s / 4.0).exp();
    let quad = |hi: f64| {
        let n = 4000;
        let h = hi / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let a = i as f64 * h;
            acc += h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
        }
        acc
    };
    quad(delta) / quad(20.0)
}

pub fn gue_corner_test(stats_in: &CornerStatistics) -> GueReport {
    let k = stats_in.k;
    let replicas = stats_in.samples.len();
    let mut mean = vec![0.0; k];
    let mut variance = vec![0.0; k];
    for l in 0..k {
        let xs: Vec<f64> = stats_in.samples.iter().map(|s| s[l]).collect();
        mean[l] = stats::mean(&xs);
        variance[l] = stats::variance(&xs);
    }
    let ks_to_normal = (k == 1).then(|| {
        let xs: Vec<f64> = stats_in.samples.iter().map(|s| s[0]).collect();
        stats::ks_statistic(&xs, stats::std_normal_cdf)
    });
    let repulsion = (k == 2).then(|| {
        let delta = 0.5;
        let gaps: Vec<f64> = stats_in.samples.iter().map(|s| (s[0] - s[1]).abs()).collect();
        let hit = gaps.iter().filter(|&&g| g < delta).count() as f64;
        let empirical = hit / replicas as f64;
        // independent N(0,1) pair: |X−Y| ~ |N(0,2)|
        let independent_ref = 2.0 * stats::std_normal_cdf(delta / (2.0f64).sqrt()) - 1.0;
        let std_err = (independent_ref * (1.0 - independent_ref) / replicas as f64).sqrt();
        RepulsionReport {
            delta,
            empirical,
            independent_ref,
            gue_ref: gue2_gap_cdf(delta),
            std_err,
        }
    });
    GueReport {
        k,
        replicas,
        params: stats_in.params,
        scale: stats_in.scale,
        mean,
        variance,
        ks_to_normal,
        repulsion,
    }
}

/// Sup and L¹ distance between sampled rescaled heights and the limit
/// shape over an interior grid.
#[derive(Debug, Clone)]
pub struct LlnReport {
    pub sup_err: f64,
    pub l1_err: f64,
    /// (χ, κ, mean empirical h/N, limit 𝐡)
    pub points: Vec<(f64, f64, f64, f64)>,
}

pub fn height_lln_report(
    g: &Graph,
    fields: &[HeightField],
    profiles: &[DensityProfile],
    chis: &[f64],
) -> Result<LlnReport> {
    if fields.is_empty() {
        return Err(Error::invalid("need at least one sampled height field"));
    }
    let n = g.n_pairs();
    let mut points = Vec::new();
    let mut sup = 0.0f64;
    let mut l1 = 0.0f64;
    for profile in profiles {
        let kappa = profile.kappa;
        let t = (kappa * n as f64).round() as usize;
        let row = 2 * t + 1;
        if row > 2 * n + 1 {
            continue;
        }
        for &chi in chis {
            let slot = (chi * n as f64).round() as usize;
            if slot + 1 >= fields[0].rows[row - 1].len() {
                continue;
            }
            let emp = stats::mean(
                &fields
                    .iter()
                    .map(|f| f.rows[row - 1][slot] as f64 / n as f64)
                    .collect::<Vec<_>>(),
            );
            let theory = crate::limitshape::limit_height_from_profile(chi, kappa, profile);
            let err = (emp - theory).abs();
            sup = sup.max(err);
            l1 += err;
            points.push((chi, kappa, emp, theory));
        }
    }
    if points.is_empty() {
        return Err(Error::invalid("grid produced no interior points"));
    }
    let l1 = l1 / points.len() as f64;
    Ok(LlnReport { sup_err: sup, l1_err: l1, points })
}
