//! Kasteleyn–Percus machinery: a sign-twisted weighted bipartite adjacency
//! matrix whose determinant is the matching partition function, an exact
//! Boltzmann sampler driven by conditional edge probabilities, and a
//! brute-force enumerator used as the oracle in tests.

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::Graph;
use crate::signatures::{signature_from_boundary, Matching};

/// Signed weighted bipartite adjacency matrix with vertex orderings.
#[derive(Debug, Clone)]
pub struct KasteleynSystem {
    /// vertex ids of the matchable whites, row order
    pub whites: Vec<usize>,
    /// vertex ids of the blacks, column order
    pub blacks: Vec<usize>,
    /// K[w][b] = sign·weight on edges, 0 otherwise
    pub mat: Vec<Vec<f64>>,
    /// per-edge sign in {−1, +1}
    pub signs: Vec<i8>,
    white_of: Vec<Option<usize>>,
    black_of: Vec<Option<usize>>,
}

/// log-domain absolute determinant.
#[derive(Debug, Clone, Copy)]
pub struct LogDet {
    pub sign: i8,
    pub ln_abs: f64,
}

impl LogDet {
    pub fn value(&self) -> f64 {
        self.sign as f64 * self.ln_abs.exp()
    }
}

fn required_sign_product(degree: usize) -> i8 {
    // clockwise-odd convention: product is −1 for faces of degree ≡ 0 mod 4
    if (degree / 2) % 2 == 0 {
        -1
    } else {
        1
    }
}

fn face_sign_defect(g: &Graph, signs: &[i8]) -> Option<usize> {
    for (fi, f) in g.faces.iter().enumerate() {
        let p: i8 = f.edges.iter().map(|&e| signs[e]).product();
        if p != required_sign_product(f.degree()) {
            return Some(fi);
        }
    }
    None
}

/// Assign Kasteleyn signs by a spanning tree of the dual graph: non-tree
/// edges stay +1, each bounded face fixes its dual-tree edge leaves-first.
fn assign_signs(g: &Graph) -> Result<Vec<i8>> {
    let nf = g.faces.len();
    let mut signs = vec![1i8; g.edges.len()];
    if nf == 0 {
        return Ok(signs);
    }
    // sides[e] = dual nodes of edge e (0 = outer, f+1 = bounded face f)
    let mut sides: Vec<Vec<usize>> = vec![Vec::new(); g.edges.len()];
    for (fi, f) in g.faces.iter().enumerate() {
        for &e in &f.edges {
            sides[e].push(fi + 1);
        }
    }
    for s in sides.iter_mut() {
        while s.len() < 2 {
            s.push(0);
        }
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nf + 1];
    for (e, s) in sides.iter().enumerate() {
        if s[0] != s[1] {
            adj[s[0]].push((s[1], e));
            adj[s[1]].push((s[0], e));
        }
    }
    let mut parent_edge: Vec<Option<usize>> = vec![None; nf + 1];
    let mut order = Vec::new();
    let mut seen = vec![false; nf + 1];
    seen[0] = true;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &(v, e) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent_edge[v] = Some(e);
                order.push(v);
                queue.push_back(v);
            }
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::invalid("dual graph is disconnected"));
    }
    for &node in order.iter().rev() {
        let f = &g.faces[node - 1];
        let pe = parent_edge[node].expect("non-root face has a parent edge");
        let rest: i8 = f.edges.iter().filter(|&&e| e != pe).map(|&e| signs[e]).product();
        signs[pe] = required_sign_product(f.degree()) * rest;
    }
    if let Some(fi) = face_sign_defect(g, &signs) {
        return Err(Error::numeric(format!("face {fi} violates the Kasteleyn sign condition")));
    }
    Ok(signs)
}

pub fn build_kasteleyn(g: &Graph) -> Result<KasteleynSystem> {
    let whites: Vec<usize> = g
        .vertices
        .iter()
        .filter(|v| v.color == crate::lattice::Color::White && !v.is_virtual)
        .map(|v| v.id)
        .collect();
    let blacks: Vec<usize> = g
        .vertices
        .iter()
        .filter(|v| v.color == crate::lattice::Color::Black)
        .map(|v| v.id)
        .collect();
    if whites.len() != blacks.len() {
        return Err(Error::invalid("unbalanced color classes; malformed spec"));
    }
    let signs = assign_signs(g)?;
    let mut white_of = vec![None; g.vertices.len()];
    let mut black_of = vec![None; g.vertices.len()];
    for (i, &w) in whites.iter().enumerate() {
        white_of[w] = Some(i);
    }
    for (i, &b) in blacks.iter().enumerate() {
        black_of[b] = Some(i);
    }
    let n = whites.len();
    let mut mat = vec![vec![0.0; n]; n];
    for e in &g.edges {
        let wi = white_of[e.white].unwrap();
        let bi = black_of[e.black].unwrap();
        mat[wi][bi] = signs[e.id] as f64 * e.weight;
    }
    Ok(KasteleynSystem { whites, blacks, mat, signs, white_of, black_of })
}

impl KasteleynSystem {
    pub fn size(&self) -> usize {
        self.whites.len()
    }

    pub fn white_index(&self, vertex: usize) -> Option<usize> {
        self.white_of[vertex]
    }

    pub fn black_index(&self, vertex: usize) -> Option<usize> {
        self.black_of[vertex]
    }

    /// Check the face sign condition; used by tests as the negative control.
    pub fn verify_signs(&self, g: &Graph) -> Result<()> {
        match face_sign_defect(g, &self.signs) {
            None => Ok(()),
            Some(fi) => Err(Error::numeric(format!("face {fi} violates the sign condition"))),
        }
    }
}

/// |det K| in the log domain; the absolute value equals Z.
pub fn partition_function_kasteleyn(k: &KasteleynSystem) -> Result<LogDet> {
    let (sign, ln_abs) = crate::schur::det_ln(k.mat.clone());
    if sign == 0 {
        return Err(Error::numeric("singular Kasteleyn matrix: no perfect matching"));
    }
    Ok(LogDet { sign, ln_abs })
}

fn invert(mat: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = mat.len();
    let mut a: Vec<Vec<f64>> = mat.iter().map(|r| {
        let mut row = r.clone();
        row.extend(std::iter::repeat(0.0).take(n));
        row
    }).collect();
    for i in 0..n {
        a[i][n + i] = 1.0;
    }
    for col in 0..n {
        let (piv, mx) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if mx == 0.0 {
            return Err(Error::numeric("singular matrix during inversion"));
        }
        a.swap(piv, col);
        let p = a[col][col];
        for c in 0..2 * n {
            a[col][c] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col];
            if f == 0.0 {
                continue;
            }
            for c in 0..2 * n {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
        }
    }
    // result transposed so inv[b][w] indexes like K⁻¹
    let mut inv = vec![vec![0.0; n]; n];
    for r in 0..n {
        for c in 0..n {
            inv[c][r] = a[r][n + c];
        }
    }
    Ok(inv)
}

/// Exact Boltzmann sampler: edges in id order, P(e ∈ M) = K[w][b]·K⁻¹[b][w];
/// inclusion removes both endpoints, exclusion zeroes the entry. The inverse
/// is refreshed every 64 rank-1 updates to bound error growth.
pub fn sample_exact<R: Rng>(sys: &KasteleynSystem, g: &Graph, rng: &mut R) -> Result<Matching> {
    let n = sys.size();
    let mut kmat = sys.mat.clone();
    let mut inv = invert(&kmat)?;
    let mut active_w = vec![true; n];
    let mut active_b = vec![true; n];
    let mut chosen = Vec::with_capacity(n);
    let mut updates = 0usize;

    let clamp = |p: f64| -> Result<f64> {
        if (-1e-9..=1.0 + 1e-9).contains(&p) {
            Ok(p.clamp(0.0, 1.0))
        } else {
            Err(Error::numeric(format!("conditional probability {p} out of range")))
        }
    };

    for e in &g.edges {
        let wi = sys.white_of[e.white].expect("edge endpoints are matchable");
        let bi = sys.black_of[e.black].expect("edge endpoints are matchable");
        if !active_w[wi] || !active_b[bi] {
            continue;
        }
        let kwb = kmat[wi][bi];
        if kwb == 0.0 {
            continue;
        }
        let mut p = kwb * inv[bi][wi];
        if clamp(p).is_err() {
            inv = invert_active(&kmat, &active_w, &active_b, n)?;
            p = kwb * inv[bi][wi];
        }
        let p = clamp(p)?;
        let include = rng.gen::<f64>() < p;
        if include {
            chosen.push(e.id);
            let pivot = inv[bi][wi];
            if pivot.abs() < 1e-300 {
                return Err(Error::numeric("degenerate pivot on inclusion"));
            }
            for b2 in 0..n {
                if !active_b[b2] || b2 == bi {
                    continue;
                }
                let f = inv[b2][wi] / pivot;
                if f == 0.0 {
                    continue;
                }
                for w2 in 0..n {
                    if active_w[w2] && w2 != wi {
                        inv[b2][w2] -= f * inv[bi][w2];
                    }
                }
            }
            active_w[wi] = false;
            active_b[bi] = false;
            // keep the matrix invertible for later refreshes
            for b2 in 0..n {
                kmat[wi][b2] = 0.0;
            }
            for w2 in 0..n {
                kmat[w2][bi] = 0.0;
            }
            kmat[wi][bi] = 1.0;
        } else {
            let denom = 1.0 - p;
            if denom < 1e-12 {
                return Err(Error::numeric("excluded an effectively forced edge"));
            }
            let f = kwb / denom;
            let col: Vec<f64> = (0..n).map(|b2| inv[b2][wi]).collect();
            let row: Vec<f64> = (0..n).map(|w2| inv[bi][w2]).collect();
            for b2 in 0..n {
                if !active_b[b2] {
                    continue;
                }
                let cb = col[b2];
                if cb == 0.0 {
                    continue;
                }
                for w2 in 0..n {
                    if active_w[w2] {
                        inv[b2][w2] += f * cb * row[w2];
                    }
                }
            }
            kmat[wi][bi] = 0.0;
        }
        updates += 1;
        if updates % 64 == 0 {
            inv = invert(&kmat)?;
        }
    }

    let m = Matching::new(chosen);
    m.validate_perfect(g)?;
    let omega = signature_from_boundary(&g.spec.omega, g.n_pairs())?;
    if m.ne_sw_count(g) as i64 != omega.size() {
        return Err(Error::numeric("sample violates the NE-SW edge count identity"));
    }
    Ok(m)
}

fn invert_active(kmat: &[Vec<f64>], aw: &[bool], ab: &[bool], n: usize) -> Result<Vec<Vec<f64>>> {
    // refresh path: the matched pairs were unit-ized in kmat, so a full
    // inversion restores the conditioned inverse on the active block
    let _ = (aw, ab, n);
    invert(kmat)
}

/// Exhaustive enumeration by recursive vertex pairing with forced-edge
/// propagation; errors out when the count exceeds `cap`.
pub fn enumerate_matchings(g: &Graph, cap: usize) -> Result<Vec<Matching>> {
    let nv = g.vertices.len();
    let mut need: Vec<bool> = g.vertices.iter().map(|v| !v.is_virtual).collect();
    let mut edge_alive = vec![true; g.edges.len()];
    let mut out: Vec<Matching> = Vec::new();
    let mut current: Vec<usize> = Vec::new();

    fn other(g: &Graph, e: usize, v: usize) -> usize {
        let edge = &g.edges[e];
        if edge.white == v {
            edge.black
        } else {
            edge.white
        }
    }

    fn avail_degree(g: &Graph, v: usize, edge_alive: &[bool], need: &[bool]) -> usize {
        g.incident_edges(v)
            .iter()
            .filter(|&&e| edge_alive[e] && need[other(g, e, v)])
            .count()
    }

    fn rec(
        g: &Graph,
        need: &mut Vec<bool>,
        edge_alive: &mut Vec<bool>,
        current: &mut Vec<usize>,
        out: &mut Vec<Matching>,
        cap: usize,
    ) -> Result<()> {
        // pick the uncovered vertex with the fewest available edges
        let mut best: Option<(usize, usize)> = None;
        for v in 0..need.len() {
            if !need[v] {
                continue;
            }
            let d = avail_degree(g, v, edge_alive, need);
            if d == 0 {
                return Ok(()); // dead branch
            }
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((v, d));
                if d == 1 {
                    break;
                }
            }
        }
        let Some((v, _)) = best else {
            if out.len() >= cap {
                return Err(Error::CapExceeded { cap });
            }
            out.push(Matching::new(current.clone()));
            return Ok(());
        };
        let edges: Vec<usize> = g
            .incident_edges(v)
            .iter()
            .copied()
            .filter(|&e| edge_alive[e] && need[other(g, e, v)])
            .collect();
        for e in edges {
            let u = other(g, e, v);
            need[v] = false;
            need[u] = false;
            let killed: Vec<usize> = g
                .incident_edges(v)
                .iter()
                .chain(g.incident_edges(u))
                .copied()
                .filter(|&e2| edge_alive[e2])
                .collect();
            for &e2 in &killed {
                edge_alive[e2] = false;
            }
            current.push(e);
            rec(g, need, edge_alive, current, out, cap)?;
            current.pop();
            for &e2 in &killed {
                edge_alive[e2] = true;
            }
            need[v] = true;
            need[u] = true;
        }
        Ok(())
    }

    if nv == 0 {
        out.push(Matching::new(Vec::new()));
        return Ok(out);
    }
    rec(g, &mut need, &mut edge_alive, &mut current, &mut out, cap)?;
    Ok(out)
}

/// Σ of matching weights from an enumeration; the brute-force Z.
pub fn partition_function_enumerated(g: &Graph, cap: usize) -> Result<f64> {
    Ok(enumerate_matchings(g, cap)?.iter().map(|m| m.weight(g)).sum())
}
