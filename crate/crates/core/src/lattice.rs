//! Construction of the contracting square-hexagon lattice as an explicit
//! vertex/edge/face graph.
//!
//! Rows are indexed `1..=2N+1` from the bottom. Row `k` sits at ordinate
//! `k/2`; odd rows are white, even rows black. Vertices live on the
//! half-integer grid and we store doubled abscissae (`x2 = 2x`) so all
//! coordinates stay integral. Hexagon-row verticals are drawn NW-SE, which
//! embeds the whole graph in the square lattice with purely diagonal edges.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};

/// 1×n periodic edge weights: `x_i` on NE-SW edges joining row 2i to 2i+1,
/// `y_i` on NE-SW edges joining row 2i−1 to 2i (present only when a_i = 0).
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicWeights {
    /// period length n
    pub n: usize,
    /// x_1..x_n
    pub x: Vec<f64>,
    /// y_i for the period indices i with a_i = 0, keyed 1..=n
    pub y: BTreeMap<usize, f64>,
}

impl PeriodicWeights {
    pub fn uniform(n: usize, i2: &[usize]) -> Self {
        PeriodicWeights {
            n,
            x: vec![1.0; n],
            y: i2.iter().map(|&i| (i, 1.0)).collect(),
        }
    }

    /// x_i for a 1-based global row-pair index.
    pub fn x_at(&self, i: usize) -> f64 {
        self.x[(i - 1) % self.n]
    }

    /// y_i for a 1-based global row-pair index; `None` when i ∉ I2.
    pub fn y_at(&self, i: usize) -> Option<f64> {
        self.y.get(&((i - 1) % self.n + 1)).copied()
    }

    /// c_i = 1/y_i keyed by period index.
    pub fn c(&self) -> BTreeMap<usize, f64> {
        self.y.iter().map(|(&i, &y)| (i, 1.0 / y)).collect()
    }

    /// Distinct values γ_1 < … < γ_m of the c_i with multiplicities n_j.
    pub fn gammas(&self) -> Vec<(f64, usize)> {
        let mut cs: Vec<f64> = self.y.values().map(|&y| 1.0 / y).collect();
        cs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out: Vec<(f64, usize)> = Vec::new();
        for c in cs {
            match out.last_mut() {
                Some((g, mult)) if (c - *g).abs() <= 1e-12 * g.abs().max(1.0) => *mult += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }

    /// r = Card({1..n} ∩ I1) = n − Card({1..n} ∩ I2).
    pub fn r(&self) -> usize {
        self.n - self.y.len()
    }

    fn validate(&self, a_period: &[u8]) -> Result<()> {
        if self.n == 0 || self.x.len() != self.n {
            return Err(Error::invalid("x must have length n ≥ 1"));
        }
        if a_period.len() != self.n {
            return Err(Error::invalid("a-pattern period must equal weight period n"));
        }
        if self.x.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::invalid("all x_i must be positive"));
        }
        let i2: BTreeSet<usize> = (1..=self.n).filter(|&i| a_period[i - 1] == 0).collect();
        let keys: BTreeSet<usize> = self.y.keys().copied().collect();
        if keys != i2 {
            return Err(Error::invalid(format!(
                "y must be defined exactly on I2 ∩ {{1..n}} = {i2:?}, got {keys:?}"
            )));
        }
        if self.y.values().any(|&y| !(y > 0.0) || !y.is_finite()) {
            return Err(Error::invalid("all y_i must be positive"));
        }
        Ok(())
    }
}

/// Finite graph description: N rows of pairs, boundary Ω, periodic a-pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    /// N: number of row pairs
    pub n_rows: usize,
    /// Ω_1 < … < Ω_N with Ω_1 = 1
    pub omega: Vec<u64>,
    /// one period a_1..a_n of the binary sequence
    pub a_period: Vec<u8>,
    pub weights: PeriodicWeights,
}

impl LatticeSpec {
    pub fn new(omega: Vec<u64>, a_period: Vec<u8>, weights: PeriodicWeights) -> Result<Self> {
        let spec = LatticeSpec {
            n_rows: omega.len(),
            omega,
            a_period,
            weights,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Uniform weights, Ω = (1, 1+M, 1+2M, …): the boundary whose counting
    /// measure tends to the uniform measure on [0, M].
    pub fn staircase(n_rows: usize, m_step: u64, a_period: Vec<u8>, weights: PeriodicWeights) -> Result<Self> {
        let omega = (0..n_rows as u64).map(|k| 1 + m_step * k).collect();
        Self::new(omega, a_period, weights)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rows == 0 || self.omega.len() != self.n_rows {
            return Err(Error::invalid("need N ≥ 1 boundary positions"));
        }
        if self.omega[0] != 1 {
            return Err(Error::invalid("Ω_1 must equal 1"));
        }
        if self.omega.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("Ω must be strictly increasing"));
        }
        if self.a_period.iter().any(|&a| a > 1) {
            return Err(Error::invalid("a-pattern must be binary"));
        }
        self.weights.validate(&self.a_period)?;
        Ok(())
    }

    /// a_i for a 1-based index.
    pub fn a_at(&self, i: usize) -> u8 {
        self.a_period[(i - 1) % self.a_period.len()]
    }

    /// m = Ω_N − N.
    pub fn m_cols(&self) -> u64 {
        self.omega[self.n_rows - 1] - self.n_rows as u64
    }
}

/// I1 = {k ≤ N : a_k = 1}, I2 = {k ≤ N : a_k = 0}.
pub fn classify_rows(spec: &LatticeSpec) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let mut i1 = BTreeSet::new();
    let mut i2 = BTreeSet::new();
    for k in 1..=spec.n_rows {
        if spec.a_at(k) == 1 {
            i1.insert(k);
        } else {
            i2.insert(k);
        }
    }
    (i1, i2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    White,
    Black,
}

/// Geometric class of an edge in the square-lattice embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// up-right diagonal (carries x- or y-weights)
    NeSw,
    /// up-left diagonal, weight 1
    NwSe,
    /// hexagon-row vertical, drawn NW-SE, weight 1
    Vertical,
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub id: usize,
    /// doubled abscissa
    pub x2: i64,
    /// row index 1..=2N+1
    pub row: usize,
    pub color: Color,
    /// Λ-placeholder in the boundary row; carries no edges
    pub is_virtual: bool,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub id: usize,
    pub white: usize,
    pub black: usize,
    pub kind: Direction,
    pub weight: f64,
    /// (lower row, upper row)
    pub rows: (usize, usize),
}

impl Edge {
    /// V-edges go up from an odd (white) row; Λ-edges go up from an even row.
    pub fn is_v_edge(&self) -> bool {
        self.rows.0 % 2 == 1
    }
}

#[derive(Debug, Clone)]
pub struct Face {
    /// vertex cycle, clockwise as traced
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Face {
    pub fn degree(&self) -> usize {
        self.edges.len()
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    pub spec: LatticeSpec,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    /// vertex ids per row (1-based rows; index 0 unused), sorted by x2
    pub rows: Vec<Vec<usize>>,
    /// bounded faces
    pub faces: Vec<Face>,
    adjacency: Vec<Vec<usize>>,
    edge_lookup: HashMap<(usize, usize), usize>,
}

impl Graph {
    pub fn n_pairs(&self) -> usize {
        self.spec.n_rows
    }

    pub fn row(&self, k: usize) -> &[usize] {
        &self.rows[k]
    }

    pub fn left_x2(&self, k: usize) -> i64 {
        self.rows[k].first().map(|&v| self.vertices[v].x2).unwrap_or(0)
    }

    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Edge between a white and a black vertex, if present.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edge_lookup.get(&key).copied()
    }

    pub fn white_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.color == Color::White && !v.is_virtual).count()
    }

    pub fn black_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.color == Color::Black).count()
    }
}

/// Build the contracting square-hexagon lattice R(Ω, ǎ).
pub fn build_lattice(spec: &LatticeSpec) -> Result<Graph> {
    spec.validate()?;
    let n = spec.n_rows;
    let omega_set: BTreeSet<u64> = spec.omega.iter().copied().collect();
    let omega_n = spec.omega[n - 1];

    let mut vertices: Vec<Vertex> = Vec::new();
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); 2 * n + 2];

    // Boundary row: actual vertices at Ω_k − 1/2, virtual Λ-placeholders in
    // the gaps so Construction applies uniformly.
    for p in 1..=omega_n {
        let id = vertices.len();
        vertices.push(Vertex {
            id,
            x2: 2 * p as i64 - 1,
            row: 1,
            color: Color::White,
            is_virtual: !omega_set.contains(&p),
        });
        rows[1].push(id);
    }

    // Even rows keep every whole-plane vertex with a neighbor inside the span
    // of the row below; odd rows keep vertices with both lower neighbors.
    for s in 1..=n {
        let below = &rows[2 * s - 1];
        let lo = vertices[below[0]].x2;
        let hi = vertices[below[below.len() - 1]].x2;
        let (lo2, hi2) = if spec.a_at(s) == 1 {
            (lo - 1, hi - 1)
        } else {
            (lo - 1, hi + 1)
        };
        let mut x2 = lo2;
        while x2 <= hi2 {
            let id = vertices.len();
            vertices.push(Vertex { id, x2, row: 2 * s, color: Color::Black, is_virtual: false });
            rows[2 * s].push(id);
            x2 += 2;
        }

        let mut x2 = lo2 + 1;
        while x2 <= hi2 - 1 {
            let id = vertices.len();
            vertices.push(Vertex { id, x2, row: 2 * s + 1, color: Color::White, is_virtual: false });
            rows[2 * s + 1].push(id);
            x2 += 2;
        }
    }

    // Edges, row-major bottom-to-top, left-to-right. Downstream determinism
    // (sampling order, SVG z-order) keys off these ids.
    let mut edges: Vec<Edge> = Vec::new();
    let mut edge_lookup = HashMap::new();
    let mut by_pos: HashMap<(usize, i64), usize> = HashMap::new();
    for v in &vertices {
        if !v.is_virtual {
            by_pos.insert((v.row, v.x2), v.id);
        }
    }
    let push_edge = |edges: &mut Vec<Edge>,
                         lookup: &mut HashMap<(usize, usize), usize>,
                         white: usize,
                         black: usize,
                         kind: Direction,
                         weight: f64,
                         rows: (usize, usize)| {
        let id = edges.len();
        edges.push(Edge { id, white, black, kind, weight, rows });
        let key = if white < black { (white, black) } else { (black, white) };
        lookup.insert(key, id);
    };

    for s in 1..=n {
        // white row 2s−1 → black row 2s
        for &w in &rows[2 * s - 1] {
            if vertices[w].is_virtual {
                continue;
            }
            let wx = vertices[w].x2;
            if spec.a_at(s) == 1 {
                let b = by_pos.get(&(2 * s, wx - 1)).copied().ok_or_else(|| {
                    Error::invalid("hexagon row is missing the vertical neighbor")
                })?;
                push_edge(&mut edges, &mut edge_lookup, w, b, Direction::Vertical, 1.0, (2 * s - 1, 2 * s));
            } else {
                let y = spec.weights.y_at(s).expect("a_s = 0 row has a y-weight");
                if let Some(&b) = by_pos.get(&(2 * s, wx - 1)) {
                    push_edge(&mut edges, &mut edge_lookup, w, b, Direction::NwSe, 1.0, (2 * s - 1, 2 * s));
                }
                if let Some(&b) = by_pos.get(&(2 * s, wx + 1)) {
                    push_edge(&mut edges, &mut edge_lookup, w, b, Direction::NeSw, y, (2 * s - 1, 2 * s));
                }
            }
        }
        // black row 2s → white row 2s+1
        for &b in &rows[2 * s] {
            let bx = vertices[b].x2;
            if let Some(&w) = by_pos.get(&(2 * s + 1, bx - 1)) {
                push_edge(&mut edges, &mut edge_lookup, w, b, Direction::NwSe, 1.0, (2 * s, 2 * s + 1));
            }
            if let Some(&w) = by_pos.get(&(2 * s + 1, bx + 1)) {
                push_edge(&mut edges, &mut edge_lookup, w, b, Direction::NeSw, spec.weights.x_at(s), (2 * s, 2 * s + 1));
            }
        }
    }

    let mut adjacency = vec![Vec::new(); vertices.len()];
    for e in &edges {
        adjacency[e.white].push(e.id);
        adjacency[e.black].push(e.id);
    }

    let mut graph = Graph {
        spec: spec.clone(),
        vertices,
        edges,
        rows,
        faces: Vec::new(),
        adjacency,
        edge_lookup,
    };
    graph.faces = trace_faces(&graph)?;
    Ok(graph)
}

/// Trace bounded faces from the planar rotation system. Bounded faces come
/// out clockwise (negative shoelace area) under this rule.
fn trace_faces(g: &Graph) -> Result<Vec<Face>> {
    // CCW neighbor order around a vertex: NE, NW, SW, SE.
    let dir_rank = |from: &Vertex, to: &Vertex| -> usize {
        let dx = to.x2 - from.x2;
        let dy = to.row as i64 - from.row as i64;
        match (dx > 0, dy > 0) {
            (true, true) => 0,
            (false, true) => 1,
            (false, false) => 2,
            (true, false) => 3,
        }
    };
    let other = |e: &Edge, v: usize| if e.white == v { e.black } else { e.white };

    let mut rotations: Vec<Vec<usize>> = vec![Vec::new(); g.vertices.len()];
    for (v, adj) in g.adjacency.iter().enumerate() {
        let mut list = adj.clone();
        list.sort_by_key(|&e| dir_rank(&g.vertices[v], &g.vertices[other(&g.edges[e], v)]));
        rotations[v] = list;
    }

    // half-edge (tail, edge) directed tail → head
    let mut seen: HashMap<(usize, usize), bool> = HashMap::new();
    let mut faces = Vec::new();
    for e0 in 0..g.edges.len() {
        for &tail0 in &[g.edges[e0].white, g.edges[e0].black] {
            if seen.contains_key(&(tail0, e0)) {
                continue;
            }
            let mut cycle_vertices = Vec::new();
            let mut cycle_edges = Vec::new();
            let (mut tail, mut e) = (tail0, e0);
            loop {
                seen.insert((tail, e), true);
                let head = other(&g.edges[e], tail);
                cycle_vertices.push(tail);
                cycle_edges.push(e);
                // next half-edge: successor of the reverse edge in CCW order
                let rot = &rotations[head];
                let pos = rot.iter().position(|&x| x == e).unwrap();
                let ne = rot[(pos + 1) % rot.len()];
                tail = head;
                e = ne;
                if (tail, e) == (tail0, e0) {
                    break;
                }
            }
            // shoelace over doubled coordinates; pendant back-and-forth cancels
            let mut area2 = 0i64;
            for i in 0..cycle_vertices.len() {
                let a = &g.vertices[cycle_vertices[i]];
                let b = &g.vertices[cycle_vertices[(i + 1) % cycle_vertices.len()]];
                area2 += a.x2 * b.row as i64 - b.x2 * a.row as i64;
            }
            if area2 < 0 {
                let mut uniq: Vec<usize> = cycle_edges.clone();
                uniq.sort_unstable();
                uniq.dedup();
                if uniq.len() != cycle_edges.len() {
                    return Err(Error::invalid("bounded face with a pendant edge"));
                }
                faces.push(Face { vertices: cycle_vertices, edges: cycle_edges });
            }
        }
    }
    Ok(faces)
}
