//! CS decomposition of projector pairs, basis alignment, component
//! analysis, and joint normal forms.
//!
//! For two projectors P, Q there is an orthonormal basis in which both are
//! block-diagonal with 1-dimensional blocks (entries 0 or 1) and
//! 2-dimensional blocks of the canonical form
//!
//! ```text
//! P-block = 1/2 [[1-c, -s], [-s, 1+c]],   Q-block = 1/2 [[1-c, s], [s, 1+c]]
//! ```
//!
//! with c in (-1, 1) and s = sqrt(1 - c^2) > 0. The decomposition here
//! works through D = P - Q and S = P + Q - I, which satisfy D^2 + S^2 = I
//! and DS + SD = 0: an eigenvector v of D with eigenvalue s in (0, 1)
//! pairs with w = Sv/||Sv|| (eigenvalue -s), and g1 = (v-w)/sqrt(2),
//! g2 = -(v+w)/sqrt(2) is the canonical block basis with c = sqrt(1-s^2).
//! This yields c >= 0 and s >= 0 for every reported 2-dimensional block,
//! which is the sign canonicalization used throughout.

use crate::bell::Strategy;
use crate::symmat::{eig_sym, positive_eigenspace_projector, Basis, Projector, SymMatrix};
use crate::{Error, Result};
use std::fmt;

const ONE_EIGENVALUE_TOL: f64 = 1e-12;
const ZERO_EIGENVALUE_TOL: f64 = 1e-8;
/// 2-dim blocks with c >= 1 - SPLIT_TOL degenerate into two 1-dim blocks.
const SPLIT_TOL: f64 = 1e-9;
const BOUNDARY_TOL: f64 = 1e-9;

/// One block of a joint decomposition.
#[derive(Clone, Debug, PartialEq)]
pub enum Block {
    /// 1-dimensional block: P and Q each carry a 0 or 1 there.
    One {
        pos: usize,
        label_p: u8,
        label_q: u8,
    },
    /// 2-dimensional block with principal-angle cosine `c`, `s = sqrt(1-c^2)`.
    Two { pos: (usize, usize), c: f64, s: f64 },
}

/// Joint block-diagonalization of a projector pair.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub dim: usize,
    pub basis: Basis,
    pub blocks: Vec<Block>,
}

impl BlockDecomposition {
    /// Blocks placed at their positions, in the basis frame (identity
    /// coordinates).
    pub fn block_matrix_p(&self) -> SymMatrix {
        self.block_matrix(true)
    }

    pub fn block_matrix_q(&self) -> SymMatrix {
        self.block_matrix(false)
    }

    fn block_matrix(&self, p_side: bool) -> SymMatrix {
        let mut m = SymMatrix::zeros(self.dim);
        for b in &self.blocks {
            match *b {
                Block::One {
                    pos,
                    label_p,
                    label_q,
                } => {
                    let l = if p_side { label_p } else { label_q };
                    m.set_sym(pos, pos, l as f64);
                }
                Block::Two { pos: (u, v), c, s } => {
                    let off = if p_side { -s / 2.0 } else { s / 2.0 };
                    m.set_sym(u, u, (1.0 - c) / 2.0);
                    m.set_sym(v, v, (1.0 + c) / 2.0);
                    m.set_sym(u, v, off);
                }
            }
        }
        m
    }

    /// P expressed back in the original frame.
    pub fn reconstruct_p(&self) -> SymMatrix {
        self.basis
            .conjugate_up(&self.block_matrix_p())
            .expect("dims agree")
    }

    pub fn reconstruct_q(&self) -> SymMatrix {
        self.basis
            .conjugate_up(&self.block_matrix_q())
            .expect("dims agree")
    }

    /// Sum of c^2 over 2-dim blocks plus the number of (1,1) labels;
    /// equals Tr(PQ) up to numerical error.
    pub fn expected_trace_product(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| match *b {
                Block::One {
                    label_p, label_q, ..
                } => {
                    if label_p == 1 && label_q == 1 {
                        1.0
                    } else {
                        0.0
                    }
                }
                Block::Two { c, .. } => c * c,
            })
            .sum()
    }

    /// Diagonal of P + Q in the decomposition frame: `1 -/+ c` on 2-dim
    /// block coordinates, `label_p + label_q` on 1-dim ones.
    pub fn sum_diagonal(&self) -> Vec<f64> {
        let mut diag = vec![0.0; self.dim];
        for b in &self.blocks {
            match *b {
                Block::One {
                    pos,
                    label_p,
                    label_q,
                } => {
                    diag[pos] = (label_p + label_q) as f64;
                }
                Block::Two { pos: (u, v), c, .. } => {
                    diag[u] = 1.0 - c;
                    diag[v] = 1.0 + c;
                }
            }
        }
        diag
    }
}

fn qform(m: &SymMatrix, v: &[f64]) -> f64 {
    let n = m.dim();
    let mut acc = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += m.get(i, j) * v[j];
        }
        acc += v[i] * row;
    }
    acc
}

fn round_label(x: f64) -> u8 {
    u8::from(x > 0.5)
}

enum Draft {
    One {
        v: Vec<f64>,
        lp: u8,
        lq: u8,
    },
    Two {
        g1: Vec<f64>,
        g2: Vec<f64>,
        c: f64,
        s: f64,
    },
}

/// Joint block-diagonalization of two projectors of equal dimension.
///
/// Blocks are ordered 2-dim first by descending c, then 1-dim blocks by
/// (label_p, label_q) descending; positions are assigned sequentially in
/// that order, so 2-dim blocks always occupy adjacent basis columns.
pub fn cs_decompose(p: &SymMatrix, q: &SymMatrix) -> Result<BlockDecomposition> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    for (m, which) in [(p, "P"), (q, "Q")] {
        let defect = m.idempotence_defect();
        if defect > 1e-8 {
            return Err(Error::NotProjector {
                which: which.into(),
                detail: format!("||M^2 - M||_F = {defect:.3e}"),
            });
        }
    }
    let dim = p.dim();
    let d = p.sub(q)?;
    let s_mat = p.add(q)?.sub(&SymMatrix::identity(dim))?;
    let spec = eig_sym(&d);

    let mut drafts: Vec<Draft> = Vec::new();
    let mut partners: Vec<Vec<f64>> = Vec::new();
    let mut rest_idx: Vec<usize> = Vec::new();

    for (k, &mu) in spec.eigenvalues.iter().enumerate() {
        if mu >= 1.0 - ONE_EIGENVALUE_TOL {
            let v = spec.basis.column(k).to_vec();
            let lp = round_label(qform(p, &v));
            let lq = round_label(qform(q, &v));
            drafts.push(Draft::One { v, lp, lq });
        } else if mu > ZERO_EIGENVALUE_TOL {
            let v = spec.basis.column(k);
            // Partner eigenvector with eigenvalue -mu.
            let mut w = vec![0.0; dim];
            for i in 0..dim {
                let mut acc = 0.0;
                for j in 0..dim {
                    acc += s_mat.get(i, j) * v[j];
                }
                w[i] = acc;
            }
            let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in w.iter_mut() {
                *x /= nw;
            }
            let inv_sqrt2 = 0.5f64.sqrt();
            let mut g1: Vec<f64> = v.iter().zip(&w).map(|(a, b)| (a - b) * inv_sqrt2).collect();
            let mut g2: Vec<f64> = v
                .iter()
                .zip(&w)
                .map(|(a, b)| -(a + b) * inv_sqrt2)
                .collect();
            if let Some(first) = g1.iter().find(|x| x.abs() > 1e-9) {
                if *first < 0.0 {
                    for x in g1.iter_mut() {
                        *x = -*x;
                    }
                    for x in g2.iter_mut() {
                        *x = -*x;
                    }
                }
            }
            let c = (1.0 - mu * mu).max(0.0).sqrt();
            if c >= 1.0 - SPLIT_TOL {
                // Principal-angle degeneracy: split into two 1-dim blocks.
                let lp1 = round_label(qform(p, &g1));
                let lq1 = round_label(qform(q, &g1));
                let lp2 = round_label(qform(p, &g2));
                let lq2 = round_label(qform(q, &g2));
                drafts.push(Draft::One {
                    v: g1,
                    lp: lp1,
                    lq: lq1,
                });
                drafts.push(Draft::One {
                    v: g2,
                    lp: lp2,
                    lq: lq2,
                });
            } else {
                drafts.push(Draft::Two { g1, g2, c, s: mu });
            }
            partners.push(w);
        } else {
            rest_idx.push(k);
        }
    }

    // Vectors not used above span the kernel-of-D part plus the partner
    // images; remove the partner span, then split what is left by S.
    let mut z_cols: Vec<Vec<f64>> = Vec::new();
    let mut neg_ones: Vec<Vec<f64>> = Vec::new();
    for &k in &rest_idx {
        let mu = spec.eigenvalues[k];
        if mu <= -(1.0 - ONE_EIGENVALUE_TOL) {
            let v = spec.basis.column(k).to_vec();
            neg_ones.push(v);
            continue;
        }
        let mut v = spec.basis.column(k).to_vec();
        for basis_set in [&partners, &z_cols] {
            for w in basis_set {
                let dot: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
                for i in 0..dim {
                    v[i] -= dot * w[i];
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.5 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            z_cols.push(v);
        }
    }
    for v in neg_ones {
        let lp = round_label(qform(p, &v));
        let lq = round_label(qform(q, &v));
        drafts.push(Draft::One { v, lp, lq });
    }
    if !z_cols.is_empty() {
        // S restricted to the D-kernel squares to the identity; its
        // eigenvectors are the joint 1-dim blocks there.
        let z = z_cols.len();
        let mut s_hat = SymMatrix::zeros(z);
        for a in 0..z {
            let mut sv = vec![0.0; dim];
            for i in 0..dim {
                let mut acc = 0.0;
                for j in 0..dim {
                    acc += s_mat.get(i, j) * z_cols[a][j];
                }
                sv[i] = acc;
            }
            for b in a..z {
                let dot: f64 = sv.iter().zip(&z_cols[b]).map(|(x, y)| x * y).sum();
                s_hat.set_sym(a, b, dot);
            }
        }
        let sub = eig_sym(&s_hat);
        for k in 0..z {
            let y = sub.basis.column(k);
            let mut g = vec![0.0; dim];
            for (a, col) in z_cols.iter().enumerate() {
                for i in 0..dim {
                    g[i] += y[a] * col[i];
                }
            }
            if let Some(first) = g.iter().find(|x| x.abs() > 1e-9) {
                if *first < 0.0 {
                    for x in g.iter_mut() {
                        *x = -*x;
                    }
                }
            }
            let lp = round_label(qform(p, &g));
            let lq = round_label(qform(q, &g));
            drafts.push(Draft::One { v: g, lp, lq });
        }
    }

    // Order: 2-dim blocks by descending c, then 1-dim by labels descending.
    let mut twos: Vec<(Vec<f64>, Vec<f64>, f64, f64)> = Vec::new();
    let mut ones: Vec<(Vec<f64>, u8, u8)> = Vec::new();
    for d in drafts {
        match d {
            Draft::Two { g1, g2, c, s } => twos.push((g1, g2, c, s)),
            Draft::One { v, lp, lq } => ones.push((v, lp, lq)),
        }
    }
    twos.sort_by(|a, b| b.2.total_cmp(&a.2));
    ones.sort_by(|a, b| (b.1, b.2).cmp(&(a.1, a.2)));

    let mut blocks = Vec::new();
    let mut columns = Vec::new();
    let mut pos = 0;
    for (g1, g2, c, s) in twos {
        blocks.push(Block::Two {
            pos: (pos, pos + 1),
            c,
            s,
        });
        columns.push(g1);
        columns.push(g2);
        pos += 2;
    }
    for (v, lp, lq) in ones {
        blocks.push(Block::One {
            pos,
            label_p: lp,
            label_q: lq,
        });
        columns.push(v);
        pos += 1;
    }
    if pos != dim {
        return Err(Error::Domain(format!(
            "cs decomposition assembled {pos} of {dim} coordinates"
        )));
    }
    let basis = Basis::from_columns(dim, columns)?;
    Ok(BlockDecomposition { dim, basis, blocks })
}

/// Permutation maximizing `sum_j a[pi[j]] * b[j]` (descending-sort
/// matching). `pi[j]` is the index into `a` matched with `b[j]`.
pub fn align_bases(a: &[f64], b: &[f64]) -> Vec<usize> {
    assert_eq!(a.len(), b.len(), "align_bases needs equal lengths");
    let mut ia: Vec<usize> = (0..a.len()).collect();
    ia.sort_by(|&i, &j| a[j].total_cmp(&a[i]).then(i.cmp(&j)));
    let mut ib: Vec<usize> = (0..b.len()).collect();
    ib.sort_by(|&i, &j| b[j].total_cmp(&b[i]).then(i.cmp(&j)));
    let mut pi = vec![0usize; a.len()];
    for k in 0..a.len() {
        pi[ib[k]] = ia[k];
    }
    pi
}

// ---------------------------------------------------------------------------
// Component graph
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    Chain,
    Cycle,
}

/// Connected component of the block graph; `vertices` are listed in
/// traversal order (chains end-to-end, cycles starting from their
/// smallest vertex along its A-edge).
#[derive(Clone, Debug)]
pub struct Component {
    pub kind: ComponentKind,
    pub vertices: Vec<usize>,
}

struct SideMaps {
    edge_of: Vec<Option<usize>>, // vertex -> partner via this side's 2-dim block
    one_at: Vec<Option<(u8, u8)>>,
}

fn side_maps(dec: &BlockDecomposition) -> Result<SideMaps> {
    let mut edge_of = vec![None; dec.dim];
    let mut one_at = vec![None; dec.dim];
    for b in &dec.blocks {
        match *b {
            Block::One {
                pos,
                label_p,
                label_q,
            } => {
                if one_at[pos].is_some() || edge_of[pos].is_some() {
                    return Err(Error::InconsistentBases(format!(
                        "position {pos} covered twice"
                    )));
                }
                one_at[pos] = Some((label_p, label_q));
            }
            Block::Two { pos: (u, v), .. } => {
                if edge_of[u].is_some() || edge_of[v].is_some() {
                    return Err(Error::InconsistentBases(format!(
                        "positions {u},{v} covered twice"
                    )));
                }
                edge_of[u] = Some(v);
                edge_of[v] = Some(u);
            }
        }
    }
    for pos in 0..dec.dim {
        if edge_of[pos].is_none() && one_at[pos].is_none() {
            return Err(Error::InconsistentBases(format!(
                "position {pos} uncovered"
            )));
        }
    }
    Ok(SideMaps { edge_of, one_at })
}

/// Connected components of the graph whose vertices are basis indices and
/// whose edges are the 2-dim blocks of both decompositions. Chains have
/// two 1-dim endpoints; cycles consist of 2-dim blocks only.
pub fn block_components(
    dec_a: &BlockDecomposition,
    dec_b: &BlockDecomposition,
) -> Result<Vec<Component>> {
    if dec_a.dim != dec_b.dim {
        return Err(Error::DimensionMismatch {
            left: dec_a.dim,
            right: dec_b.dim,
        });
    }
    if dec_a.basis.max_abs_diff(&dec_b.basis) > 1e-8 {
        return Err(Error::InconsistentBases(
            "block_components requires decompositions over a common basis".into(),
        ));
    }
    let a = side_maps(dec_a)?;
    let b = side_maps(dec_b)?;
    let dim = dec_a.dim;

    let mut seen = vec![false; dim];
    let mut comps = Vec::new();
    for start in 0..dim {
        if seen[start] {
            continue;
        }
        // Gather the component by undirected reachability first.
        let mut stack = vec![start];
        let mut members = Vec::new();
        seen[start] = true;
        while let Some(v) = stack.pop() {
            members.push(v);
            for next in [a.edge_of[v], b.edge_of[v]].into_iter().flatten() {
                if !seen[next] {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
        members.sort_unstable();
        let is_cycle = members
            .iter()
            .all(|&v| a.edge_of[v].is_some() && b.edge_of[v].is_some());
        let vertices = if is_cycle {
            let v0 = members[0];
            let mut order = vec![v0];
            let mut cur = a.edge_of[v0].expect("cycle vertex has A edge");
            let mut use_b = true;
            while cur != v0 {
                order.push(cur);
                let next = if use_b {
                    b.edge_of[cur]
                } else {
                    a.edge_of[cur]
                }
                .expect("cycle vertex has both edges");
                cur = next;
                use_b = !use_b;
            }
            order
        } else {
            // Chain: endpoints lack an edge on at least one side.
            let endpoints: Vec<usize> = members
                .iter()
                .copied()
                .filter(|&v| a.edge_of[v].is_none() || b.edge_of[v].is_none())
                .collect();
            if endpoints.len() == 1 && members.len() == 1 {
                vec![members[0]]
            } else if endpoints.len() == 2 {
                // Prefer starting at a B-side 1-dim endpoint (chain-odd
                // components are always read from their B end).
                let b_one_ends: Vec<usize> = endpoints
                    .iter()
                    .copied()
                    .filter(|&v| b.one_at[v].is_some())
                    .collect();
                let start_v = if b_one_ends.len() == 1 {
                    b_one_ends[0]
                } else {
                    *endpoints.iter().min().expect("two endpoints")
                };
                let mut order = vec![start_v];
                // First step follows the side that has an edge here.
                let mut use_a = a.edge_of[start_v].is_some();
                let mut cur = start_v;
                loop {
                    let next = if use_a {
                        a.edge_of[cur]
                    } else {
                        b.edge_of[cur]
                    };
                    match next {
                        Some(n) => {
                            order.push(n);
                            cur = n;
                            use_a = !use_a;
                        }
                        None => break,
                    }
                }
                order
            } else {
                return Err(Error::InconsistentBases(format!(
                    "chain component with {} endpoints",
                    endpoints.len()
                )));
            }
        };
        comps.push(Component {
            kind: if is_cycle {
                ComponentKind::Cycle
            } else {
                ComponentKind::Chain
            },
            vertices,
        });
    }
    comps.sort_by_key(|c| c.vertices.iter().copied().min().unwrap_or(0));
    Ok(comps)
}

// ---------------------------------------------------------------------------
// Normal forms
// ---------------------------------------------------------------------------

/// Branch of the joint normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    ChainEven,
    ChainOdd,
    ChainEvenExchanged,
    ChainOddExchanged,
    Cyclic,
}

impl Branch {
    pub fn is_exchanged(self) -> bool {
        matches!(self, Branch::ChainEvenExchanged | Branch::ChainOddExchanged)
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Branch::ChainEven => "chain-even",
            Branch::ChainOdd => "chain-odd",
            Branch::ChainEvenExchanged => "chain-even-exchanged",
            Branch::ChainOddExchanged => "chain-odd-exchanged",
            Branch::Cyclic => "cyclic",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chain-even" => Ok(Branch::ChainEven),
            "chain-odd" => Ok(Branch::ChainOdd),
            "chain-even-exchanged" => Ok(Branch::ChainEvenExchanged),
            "chain-odd-exchanged" => Ok(Branch::ChainOddExchanged),
            "cyclic" => Ok(Branch::Cyclic),
            other => Err(Error::InvalidSpec(format!("unknown branch `{other}`"))),
        }
    }
}

/// Branch tag, dimension, and the free (odd-indexed) coefficient vector.
///
/// Chain branches constrain the boundary entries to {-1, +1}: those encode
/// the 0/1 labels of the two 1-dimensional blocks via (1-c)/2. Cyclic
/// specs have one free coefficient per 2-dim block pair, all in [-1, 1],
/// and require even dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormSpec {
    pub branch: Branch,
    pub dim: usize,
    pub coeffs: Vec<f64>,
}

impl NormalFormSpec {
    pub fn new(branch: Branch, dim: usize, mut coeffs: Vec<f64>) -> Result<Self> {
        let expect_len = Self::coeff_len(branch, dim)?;
        if coeffs.len() != expect_len {
            return Err(Error::InvalidSpec(format!(
                "{branch} with dim {dim} needs {expect_len} coefficients, got {}",
                coeffs.len()
            )));
        }
        let boundary: &[usize] = match branch {
            Branch::Cyclic => &[],
            _ => &[0, expect_len - 1],
        };
        for (i, c) in coeffs.iter_mut().enumerate() {
            if boundary.contains(&i) {
                if (c.abs() - 1.0).abs() > BOUNDARY_TOL {
                    return Err(Error::InvalidSpec(format!(
                        "boundary coefficient {i} = {c} must be -1 or +1"
                    )));
                }
                *c = c.signum();
            } else {
                if c.abs() > 1.0 + BOUNDARY_TOL {
                    return Err(Error::InvalidSpec(format!(
                        "coefficient {i} = {c} outside [-1, 1]"
                    )));
                }
                *c = c.clamp(-1.0, 1.0);
            }
        }
        Ok(Self {
            branch,
            dim,
            coeffs,
        })
    }

    pub fn coeff_len(branch: Branch, dim: usize) -> Result<usize> {
        match branch {
            Branch::ChainEven | Branch::ChainEvenExchanged => {
                if dim < 2 || dim % 2 != 0 {
                    return Err(Error::InvalidSpec(format!(
                        "{branch} requires even dim >= 2, got {dim}"
                    )));
                }
                Ok(dim / 2 + 1)
            }
            Branch::ChainOdd | Branch::ChainOddExchanged => {
                if dim % 2 != 1 {
                    return Err(Error::InvalidSpec(format!(
                        "{branch} requires odd dim, got {dim}"
                    )));
                }
                Ok((dim + 3) / 2)
            }
            Branch::Cyclic => {
                if dim < 2 || dim % 2 != 0 {
                    return Err(Error::InvalidSpec(format!(
                        "cyclic requires even dim >= 2, got {dim}"
                    )));
                }
                Ok(dim / 2)
            }
        }
    }

    /// Cyclic spec with every coefficient sqrt(3)/2; attains value 1/4.
    pub fn cyclic_optimal(dim: usize) -> Result<Self> {
        let c = 3.0f64.sqrt() / 2.0;
        Self::new(Branch::Cyclic, dim, vec![c; dim / 2])
    }
}

/// The coefficient maximizing `c*tau + sqrt(1-c^2)/2` for
/// `tau = (x + y)/2`: `c = 2 tau (4 tau^2 + 1)^(-1/2)`, with optimum
/// value `sqrt(4 tau^2 + 1)/2`.
pub fn optimal_even_coefficient(x: f64, y: f64) -> f64 {
    let tau = (x + y) / 2.0;
    2.0 * tau / (4.0 * tau * tau + 1.0).sqrt()
}

fn sqrt1m(c: f64) -> f64 {
    (1.0 - c * c).max(0.0).sqrt()
}

struct ChainParts {
    a1: SymMatrix,
    a2: SymMatrix,
    b1: SymMatrix,
    b2: SymMatrix,
}

fn write_a_block(a1: &mut SymMatrix, a2: &mut SymMatrix, row: usize, c: f64) {
    let s = sqrt1m(c);
    for m in [&mut *a1, &mut *a2] {
        m.set_sym(row, row, (1.0 - c) / 2.0);
        m.set_sym(row + 1, row + 1, (1.0 + c) / 2.0);
    }
    a1.set_sym(row, row + 1, -s / 2.0);
    a2.set_sym(row, row + 1, s / 2.0);
}

/// B-side 2-dim block: P1(-c)/P2(-c) on rows (row, row+1).
fn write_b_block(b1: &mut SymMatrix, b2: &mut SymMatrix, row: usize, c: f64) {
    let s = sqrt1m(c);
    for m in [&mut *b1, &mut *b2] {
        m.set_sym(row, row, (1.0 + c) / 2.0);
        m.set_sym(row + 1, row + 1, (1.0 - c) / 2.0);
    }
    b1.set_sym(row, row + 1, -s / 2.0);
    b2.set_sym(row, row + 1, s / 2.0);
}

fn chain_even_parts(dim: usize, o: &[f64]) -> ChainParts {
    let nb = dim / 2;
    let mut a1 = SymMatrix::zeros(dim);
    let mut a2 = SymMatrix::zeros(dim);
    for i in 0..nb {
        write_a_block(
            &mut a1,
            &mut a2,
            2 * i,
            optimal_even_coefficient(o[i], o[i + 1]),
        );
    }
    let mut b1 = SymMatrix::zeros(dim);
    let mut b2 = SymMatrix::zeros(dim);
    b1.set_sym(0, 0, (1.0 - o[0]) / 2.0);
    b2.set_sym(0, 0, (1.0 - o[0]) / 2.0);
    for i in 1..nb {
        write_b_block(&mut b1, &mut b2, 2 * i - 1, o[i]);
    }
    b1.set_sym(dim - 1, dim - 1, (1.0 + o[nb]) / 2.0);
    b2.set_sym(dim - 1, dim - 1, (1.0 + o[nb]) / 2.0);
    ChainParts { a1, a2, b1, b2 }
}

fn chain_odd_parts(dim: usize, o: &[f64]) -> ChainParts {
    let m = (dim - 1) / 2;
    let mut a1 = SymMatrix::zeros(dim);
    let mut a2 = SymMatrix::zeros(dim);
    for i in 0..m {
        write_a_block(
            &mut a1,
            &mut a2,
            2 * i,
            optimal_even_coefficient(o[i], o[i + 1]),
        );
    }
    let alpha = (1.0 - o[m + 1]) / 2.0;
    a1.set_sym(dim - 1, dim - 1, alpha);
    a2.set_sym(dim - 1, dim - 1, alpha);
    let mut b1 = SymMatrix::zeros(dim);
    let mut b2 = SymMatrix::zeros(dim);
    b1.set_sym(0, 0, (1.0 - o[0]) / 2.0);
    b2.set_sym(0, 0, (1.0 - o[0]) / 2.0);
    for i in 1..=m {
        write_b_block(&mut b1, &mut b2, 2 * i - 1, o[i]);
    }
    ChainParts { a1, a2, b1, b2 }
}

fn cyclic_parts(dim: usize, o: &[f64]) -> ChainParts {
    let m = dim / 2;
    let mut a1 = SymMatrix::zeros(dim);
    let mut a2 = SymMatrix::zeros(dim);
    for i in 0..m {
        let tau_pair = (o[i], o[(i + 1) % m]);
        write_a_block(
            &mut a1,
            &mut a2,
            2 * i,
            optimal_even_coefficient(tau_pair.0, tau_pair.1),
        );
    }
    let mut b1 = SymMatrix::zeros(dim);
    let mut b2 = SymMatrix::zeros(dim);
    for j in 1..m {
        write_b_block(&mut b1, &mut b2, 2 * j - 1, o[j]);
    }
    // Wrap block on ordered coordinates (dim-1, 0).
    let c = o[0];
    let s = sqrt1m(c);
    for m in [&mut b1, &mut b2] {
        m.set_sym(dim - 1, dim - 1, (1.0 + c) / 2.0);
        m.set_sym(0, 0, (1.0 - c) / 2.0);
    }
    b1.set_sym(0, dim - 1, -s / 2.0);
    b2.set_sym(0, dim - 1, s / 2.0);
    ChainParts { a1, a2, b1, b2 }
}

/// Builds the strategy described by a normal-form spec, with uniform
/// Schmidt weights. A3 and B3 are the exact best responses: the positive
/// eigenspace projectors of B2 - B1 and A2 - A1.
pub fn build_normal_form(spec: &NormalFormSpec) -> Result<Strategy> {
    let spec = NormalFormSpec::new(spec.branch, spec.dim, spec.coeffs.clone())?;
    let parts = match spec.branch {
        Branch::ChainEven | Branch::ChainEvenExchanged => chain_even_parts(spec.dim, &spec.coeffs),
        Branch::ChainOdd | Branch::ChainOddExchanged => chain_odd_parts(spec.dim, &spec.coeffs),
        Branch::Cyclic => cyclic_parts(spec.dim, &spec.coeffs),
    };
    let a3 = positive_eigenspace_projector(&parts.b2.sub(&parts.b1)?);
    let b3 = positive_eigenspace_projector(&parts.a2.sub(&parts.a1)?);
    let a = [
        Projector::with_name(parts.a1, "A1")?,
        Projector::with_name(parts.a2, "A2")?,
        a3,
    ];
    let b = [
        Projector::with_name(parts.b1, "B1")?,
        Projector::with_name(parts.b2, "B2")?,
        b3,
    ];
    let base = Strategy::with_uniform(spec.dim, a, b)?;
    if spec.branch.is_exchanged() {
        Ok(base.swap_parties())
    } else {
        Ok(base)
    }
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

/// Outcome of reading one component back into a spec.
#[derive(Clone, Debug)]
pub enum ComponentSpec {
    Normal(NormalFormSpec),
    NonNormal { reason: String },
}

#[derive(Clone, Debug)]
pub struct ComponentReport {
    pub kind: ComponentKind,
    pub vertices: Vec<usize>,
    pub spec: ComponentSpec,
}

#[derive(Clone, Debug)]
pub struct NormalizeReport {
    pub aligned: Strategy,
    pub old_value: f64,
    pub new_value: f64,
    /// new_value - old_value. Non-negative up to numerics for seesaw
    /// fixed points.
    pub delta: f64,
    pub components: Vec<ComponentReport>,
}

fn lex_max(candidates: Vec<Vec<f64>>) -> Vec<f64> {
    candidates
        .into_iter()
        .max_by(|a, b| {
            for (x, y) in a.iter().zip(b.iter()) {
                match x.total_cmp(y) {
                    std::cmp::Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            std::cmp::Ordering::Equal
        })
        .expect("non-empty candidate set")
}

fn canonical_chain_coeffs(coeffs: Vec<f64>) -> Vec<f64> {
    let reversed: Vec<f64> = coeffs.iter().rev().map(|c| -c).collect();
    lex_max(vec![coeffs, reversed])
}

fn canonical_cycle_coeffs(coeffs: Vec<f64>) -> Vec<f64> {
    let m = coeffs.len();
    let mut candidates = Vec::with_capacity(2 * m);
    for r in 0..m {
        let rot: Vec<f64> = (0..m).map(|i| coeffs[(i + r) % m]).collect();
        let refl: Vec<f64> = rot.iter().rev().map(|c| -c).collect();
        candidates.push(rot);
        candidates.push(refl);
    }
    lex_max(candidates)
}

fn snap_boundary(x: f64) -> Result<f64> {
    let c = 1.0 - 2.0 * x;
    if (c.abs() - 1.0).abs() > 1e-6 {
        return Err(Error::NonNormalComponent(format!(
            "1-dim block value {x} is not 0 or 1"
        )));
    }
    Ok(c.signum())
}

struct ExtractCtx<'a> {
    a_edges: &'a SideMaps,
    b_edges: &'a SideMaps,
    a1_diag: &'a [f64],
    b1_diag: &'a [f64],
}

fn extract_component(comp: &Component, ctx: &ExtractCtx) -> Result<NormalFormSpec> {
    let n = comp.vertices.len();
    let vs = &comp.vertices;
    match comp.kind {
        ComponentKind::Cycle => {
            if n % 2 != 0 {
                return Err(Error::NonNormalComponent(format!(
                    "odd cycle of length {n}"
                )));
            }
            // B-edges connect vs[2i+1] -> vs[2i+2]; read the coefficient at
            // the vertex shared with the preceding A-edge.
            let mut coeffs = Vec::with_capacity(n / 2);
            for i in 0..n / 2 {
                let v = vs[2 * i + 1];
                coeffs.push((2.0 * ctx.b1_diag[v] - 1.0).clamp(-1.0, 1.0));
            }
            NormalFormSpec::new(Branch::Cyclic, n, canonical_cycle_coeffs(coeffs))
        }
        ComponentKind::Chain => {
            let first = vs[0];
            let last = vs[n - 1];
            let first_b_one = ctx.b_edges.one_at[first].is_some();
            let first_a_one = ctx.a_edges.one_at[first].is_some();
            let last_b_one = ctx.b_edges.one_at[last].is_some();
            let last_a_one = ctx.a_edges.one_at[last].is_some();
            for v in vs {
                for (maps, side) in [(ctx.a_edges, "A"), (ctx.b_edges, "B")] {
                    if let Some((lp, lq)) = maps.one_at[*v] {
                        if lp != lq {
                            return Err(Error::NonNormalComponent(format!(
                                "{side}-side 1-dim block at {v} has mismatched labels ({lp},{lq})"
                            )));
                        }
                    }
                }
            }
            if n == 1 {
                // Both sides 1-dimensional: a d'=1 chain-odd piece.
                let c1 = snap_boundary(ctx.b1_diag[first])?;
                let c2 = snap_boundary(ctx.a1_diag[first])?;
                return NormalFormSpec::new(Branch::ChainOdd, 1, vec![c1, c2]);
            }
            if first_b_one && last_b_one {
                if n % 2 != 0 {
                    return Err(Error::NonNormalComponent(format!(
                        "B-terminated chain of odd length {n}"
                    )));
                }
                let mut coeffs = Vec::with_capacity(n / 2 + 1);
                coeffs.push(snap_boundary(ctx.b1_diag[first])?);
                for i in 0..n / 2 - 1 {
                    let v = vs[2 * i + 1];
                    coeffs.push((2.0 * ctx.b1_diag[v] - 1.0).clamp(-1.0, 1.0));
                }
                coeffs.push(-snap_boundary(ctx.b1_diag[last])?);
                NormalFormSpec::new(Branch::ChainEven, n, canonical_chain_coeffs(coeffs))
            } else if first_a_one && last_a_one {
                if n % 2 != 0 {
                    return Err(Error::NonNormalComponent(format!(
                        "A-terminated chain of odd length {n}"
                    )));
                }
                let mut coeffs = Vec::with_capacity(n / 2 + 1);
                coeffs.push(snap_boundary(ctx.a1_diag[first])?);
                for i in 0..n / 2 - 1 {
                    let v = vs[2 * i + 1];
                    coeffs.push((2.0 * ctx.a1_diag[v] - 1.0).clamp(-1.0, 1.0));
                }
                coeffs.push(-snap_boundary(ctx.a1_diag[last])?);
                NormalFormSpec::new(
                    Branch::ChainEvenExchanged,
                    n,
                    canonical_chain_coeffs(coeffs),
                )
            } else if first_b_one && last_a_one {
                if n % 2 != 1 {
                    return Err(Error::NonNormalComponent(format!(
                        "mixed-terminated chain of even length {n}"
                    )));
                }
                let mut coeffs = Vec::with_capacity((n + 3) / 2);
                coeffs.push(snap_boundary(ctx.b1_diag[first])?);
                for i in 0..(n - 1) / 2 {
                    let v = vs[2 * i + 1];
                    coeffs.push((2.0 * ctx.b1_diag[v] - 1.0).clamp(-1.0, 1.0));
                }
                coeffs.push(snap_boundary(ctx.a1_diag[last])?);
                NormalFormSpec::new(Branch::ChainOdd, n, coeffs)
            } else {
                Err(Error::NonNormalComponent(
                    "chain endpoints do not match any branch".into(),
                ))
            }
        }
    }
}

/// Aligns the CS frames of (A1, A2) and (B1, B2), recomputes A3/B3 as
/// exact best responses, and reads the component structure back into
/// normal-form specs. Reports the value change; for seesaw fixed points
/// it is non-negative up to numerics.
pub fn normalize(s: &Strategy) -> Result<NormalizeReport> {
    if !s.has_uniform_schmidt() {
        return Err(Error::InvalidSchmidt(
            "normalize requires uniform weights".into(),
        ));
    }
    use crate::bell::{i3322_value, OperatorLabel as L};
    let old_value = i3322_value(s).value;
    let dim = s.dim();

    let da = cs_decompose(s.operator(L::A1).matrix(), s.operator(L::A2).matrix())?;
    let db = cs_decompose(s.operator(L::B1).matrix(), s.operator(L::B2).matrix())?;
    let alpha = da.sum_diagonal();
    let beta = db.sum_diagonal();
    let perm = align_bases(&alpha, &beta);

    let a1n = da.block_matrix_p();
    let a2n = da.block_matrix_q();
    let b1_src = db.block_matrix_p();
    let b2_src = db.block_matrix_q();
    let mut b1n = SymMatrix::zeros(dim);
    let mut b2n = SymMatrix::zeros(dim);
    for i in 0..dim {
        for j in i..dim {
            // beta position j lands at alpha position perm[j]
            let (pi, pj) = (perm[i], perm[j]);
            let (lo, hi) = if pi <= pj { (pi, pj) } else { (pj, pi) };
            b1n.set_sym(lo, hi, b1_src.get(i, j));
            b2n.set_sym(lo, hi, b2_src.get(i, j));
        }
    }

    let a3n = positive_eigenspace_projector(&b2n.sub(&b1n)?);
    let b3n = positive_eigenspace_projector(&a2n.sub(&a1n)?);
    let aligned = Strategy::with_uniform(
        dim,
        [
            Projector::with_name(a1n.clone(), "A1")?,
            Projector::with_name(a2n.clone(), "A2")?,
            a3n,
        ],
        [
            Projector::with_name(b1n.clone(), "B1")?,
            Projector::with_name(b2n.clone(), "B2")?,
            b3n,
        ],
    )?;
    let new_value = i3322_value(&aligned).value;

    let dec_a_aligned = BlockDecomposition {
        dim,
        basis: Basis::identity(dim),
        blocks: da.blocks.clone(),
    };
    let mapped_blocks: Vec<Block> = db
        .blocks
        .iter()
        .map(|b| match *b {
            Block::One {
                pos,
                label_p,
                label_q,
            } => Block::One {
                pos: perm[pos],
                label_p,
                label_q,
            },
            Block::Two { pos: (u, v), c, s } => Block::Two {
                pos: (perm[u], perm[v]),
                c,
                s,
            },
        })
        .collect();
    let dec_b_aligned = BlockDecomposition {
        dim,
        basis: Basis::identity(dim),
        blocks: mapped_blocks,
    };
    let comps = block_components(&dec_a_aligned, &dec_b_aligned)?;

    let a_maps = side_maps(&dec_a_aligned)?;
    let b_maps = side_maps(&dec_b_aligned)?;
    let a1_diag = a1n.diagonal();
    let b1_diag = b1n.diagonal();
    let ctx = ExtractCtx {
        a_edges: &a_maps,
        b_edges: &b_maps,
        a1_diag: &a1_diag,
        b1_diag: &b1_diag,
    };
    let components = comps
        .into_iter()
        .map(|comp| {
            let spec = match extract_component(&comp, &ctx) {
                Ok(spec) => ComponentSpec::Normal(spec),
                Err(e) => ComponentSpec::NonNormal {
                    reason: e.to_string(),
                },
            };
            ComponentReport {
                kind: comp.kind,
                vertices: comp.vertices,
                spec,
            }
        })
        .collect();

    Ok(NormalizeReport {
        aligned,
        old_value,
        new_value,
        delta: new_value - old_value,
        components,
    })
}
