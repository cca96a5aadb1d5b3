//! Sparse symmetric `L D Lᵀ` without pivoting, organised as independent
//! skyline blocks (one per face) coupled through a small dense separator
//! (the junction degrees of freedom), which is eliminated last by a dense
//! Bunch–Kaufman factorization of its Schur complement.
//!
//! Within a block the rows are ordered by breadth-first levels so that the
//! skyline envelope stays close to one ring or one column of the mesh.

use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{LoopTag, YSurface};
use crate::quadform::Reducer;
use crate::sparse::CsrMatrix;

use super::dense::BunchKaufman;

/// Dimensions below this are factored densely.
pub const DENSE_LIMIT: usize = 2000;

/// Partition and ordering of the unknowns for [`BlockLdl`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPlan {
    /// Each block lists its unknowns in elimination order.
    pub blocks: Vec<Vec<usize>>,
    /// Unknowns eliminated last, through the dense Schur complement.
    pub separator: Vec<usize>,
}

impl LinearPlan {
    /// One block ordered from a pseudo-peripheral unknown.
    pub fn single(a: &CsrMatrix) -> Self {
        let adj = a.adjacency();
        let n = a.dim();
        let members: Vec<usize> = (0..n).collect();
        let block_of = vec![0; n];
        let order = bfs_order(&adj, &block_of, 0, &members, &[pseudo_peripheral(&adj, &block_of, 0, 0)]);
        Self { blocks: vec![order], separator: vec![] }
    }

    /// One block per face of the reduced unknowns, with the junction unknowns
    /// as separator. Blocks touching the separator are ordered so that the
    /// unknowns next to it come last; the others start from the first
    /// truncation loop of their face.
    pub fn for_surface(surface: &YSurface, reducer: &Reducer, a: &CsrMatrix) -> Self {
        let n = reducer.reduced_dim();
        assert_eq!(a.dim(), n);
        let adj = a.adjacency();
        let nf = surface.faces.len();
        let sep_id = nf;
        let block_of: Vec<usize> =
            (0..n).map(|p| if reducer.on_junction[p] { sep_id } else { reducer.face_of[p] }).collect();
        let separator: Vec<usize> = (0..n).filter(|&p| block_of[p] == sep_id).collect();

        let offsets = surface.node_offsets();
        let mut reduced_of = vec![usize::MAX; reducer.full_dim()];
        for (p, &g) in reducer.representative.iter().enumerate() {
            reduced_of[g] = p;
        }

        let mut blocks = Vec::new();
        for (fi, face) in surface.faces.iter().enumerate() {
            let members: Vec<usize> = (0..n).filter(|&p| block_of[p] == fi).collect();
            if members.is_empty() {
                continue;
            }
            let near_sep: Vec<usize> = members
                .iter()
                .copied()
                .filter(|&p| adj[p].iter().any(|&q| block_of[q] == sep_id))
                .collect();
            let order = if !near_sep.is_empty() {
                let mut o = bfs_order(&adj, &block_of, fi, &members, &near_sep);
                o.reverse();
                o
            } else {
                let mut seeds = Vec::new();
                if let Some(lp) = face.boundary_loops.iter().find(|l| l.tag == LoopTag::Truncation) {
                    let on_loop: std::collections::HashSet<usize> = lp.node_ids.iter().copied().collect();
                    for t in &face.elements {
                        if t.iter().any(|v| on_loop.contains(v)) {
                            for &v in t {
                                let p = reduced_of[offsets[fi] + v];
                                if p != usize::MAX && block_of[p] == fi {
                                    seeds.push(p);
                                }
                            }
                        }
                    }
                    seeds.sort_unstable();
                    seeds.dedup();
                }
                if seeds.is_empty() {
                    seeds.push(pseudo_peripheral(&adj, &block_of, fi, members[0]));
                }
                bfs_order(&adj, &block_of, fi, &members, &seeds)
            };
            blocks.push(order);
        }
        Self { blocks, separator }
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum::<usize>() + self.separator.len()
    }
}

/// Breadth-first order of `members` (all with `block_of == id`), seeded by
/// `seeds`; unreached components are appended from their smallest unknown.
fn bfs_order(adj: &[Vec<usize>], block_of: &[usize], id: usize, members: &[usize], seeds: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut order = Vec::with_capacity(members.len());
    let mut queue = VecDeque::new();
    let mut visit = |start: &[usize], seen: &mut Vec<bool>, order: &mut Vec<usize>| {
        for &s in start {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(p) = queue.pop_front() {
            order.push(p);
            for &q in &adj[p] {
                if block_of[q] == id && !seen[q] {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
    };
    visit(seeds, &mut seen, &mut order);
    for &m in members {
        if !seen[m] {
            visit(&[m], &mut seen, &mut order);
        }
    }
    order
}

/// George–Liu style search for an endpoint of a long breadth-first path.
fn pseudo_peripheral(adj: &[Vec<usize>], block_of: &[usize], id: usize, start: usize) -> usize {
    let mut node = start;
    let mut ecc = 0;
    for _ in 0..8 {
        let levels = bfs_levels(adj, block_of, id, node);
        let depth = *levels.iter().filter(|&&l| l != usize::MAX).max().unwrap_or(&0);
        if depth <= ecc && ecc > 0 {
            break;
        }
        ecc = depth;
        node = (0..adj.len())
            .filter(|&p| levels[p] == depth)
            .min_by_key(|&p| adj[p].iter().filter(|&&q| block_of[q] == id).count())
            .unwrap_or(node);
    }
    node
}

fn bfs_levels(adj: &[Vec<usize>], block_of: &[usize], id: usize, start: usize) -> Vec<usize> {
    let mut level = vec![usize::MAX; adj.len()];
    level[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        for &q in &adj[p] {
            if block_of[q] == id && level[q] == usize::MAX {
                level[q] = level[p] + 1;
                queue.push_back(q);
            }
        }
    }
    level
}

#[derive(Debug, Clone)]
struct SkylineBlock {
    dofs: Vec<usize>,
    first: Vec<usize>,
    offset: Vec<usize>,
    /// Row `i` holds `L_{i,first..i}` followed by `D_i`.
    values: Vec<f64>,
    /// First row of `Y = L⁻¹ A_BS` that can be nonzero.
    y_start: usize,
    /// Rows `y_start..` of `Y`, row-major with one column per separator unknown.
    y: Vec<f64>,
}

impl SkylineBlock {
    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.values[self.offset[i]..self.offset[i + 1]]
    }

    fn diag(&self, i: usize) -> f64 {
        self.values[self.offset[i + 1] - 1]
    }

    fn len(&self) -> usize {
        self.dofs.len()
    }

    /// In place `x ← L⁻¹ x`.
    fn forward(&self, x: &mut [f64]) {
        for i in 0..self.len() {
            let f = self.first[i];
            let row = self.row(i);
            let s: f64 = row[..row.len() - 1].iter().zip(&x[f..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
    }

    /// In place `x ← L⁻ᵀ x`.
    fn backward(&self, x: &mut [f64]) {
        for i in (0..self.len()).rev() {
            let f = self.first[i];
            let v = x[i];
            if v != 0.0 {
                let row = self.row(i);
                for (xk, l) in x[f..i].iter_mut().zip(&row[..row.len() - 1]) {
                    *xk -= l * v;
                }
            }
        }
    }
}

/// Block `L D Lᵀ` factorization; see the module documentation.
#[derive(Debug, Clone)]
pub struct BlockLdl {
    n: usize,
    blocks: Vec<SkylineBlock>,
    separator: Vec<usize>,
    schur: Option<BunchKaufman>,
}

impl BlockLdl {
    pub fn factor(a: &CsrMatrix, plan: &LinearPlan) -> Result<Self> {
        let n = a.dim();
        if plan.dim() != n {
            return Err(crate::error::argument("ordering plan does not match the matrix dimension"));
        }
        const SEP: usize = usize::MAX;
        let mut block_of = vec![SEP - 1; n];
        let mut local = vec![0usize; n];
        for (b, dofs) in plan.blocks.iter().enumerate() {
            for (i, &p) in dofs.iter().enumerate() {
                block_of[p] = b;
                local[p] = i;
            }
        }
        for (i, &p) in plan.separator.iter().enumerate() {
            block_of[p] = SEP;
            local[p] = i;
        }
        if block_of.iter().any(|&b| b == SEP - 1) {
            return Err(crate::error::argument("ordering plan does not cover every unknown"));
        }
        let ns = plan.separator.len();

        let mut blocks = Vec::with_capacity(plan.blocks.len());
        for (b, dofs) in plan.blocks.iter().enumerate() {
            let m = dofs.len();
            let mut first: Vec<usize> = (0..m).collect();
            let mut y_start = m;
            for (i, &p) in dofs.iter().enumerate() {
                for (q, _) in a.row(p) {
                    if block_of[q] == b && local[q] < first[i] {
                        first[i] = local[q];
                    } else if block_of[q] == SEP {
                        y_start = y_start.min(i);
                    }
                }
            }
            let mut offset = Vec::with_capacity(m + 1);
            offset.push(0);
            for i in 0..m {
                offset.push(offset[i] + i - first[i] + 1);
            }
            let mut values = vec![0.0; offset[m]];
            let mut y = vec![0.0; (m - y_start) * ns];
            for (i, &p) in dofs.iter().enumerate() {
                for (q, v) in a.row(p) {
                    if block_of[q] == b && local[q] <= i {
                        values[offset[i] + local[q] - first[i]] += v;
                    } else if block_of[q] == SEP {
                        y[(i - y_start) * ns + local[q]] += v;
                    }
                }
            }
            let mut blk = SkylineBlock { dofs: dofs.clone(), first, offset, values, y_start, y };
            factor_skyline(&mut blk)?;
            // Y = L⁻¹ A_BS, rows before y_start vanish
            for i in y_start..m {
                let f = blk.first[i].max(y_start);
                let row = &blk.values[blk.offset[i]..blk.offset[i + 1]];
                let (lo, hi) = blk.y.split_at_mut((i - y_start) * ns);
                let yi = &mut hi[..ns];
                for k in f..i {
                    let l = row[k - blk.first[i]];
                    if l != 0.0 {
                        let yk = &lo[(k - y_start) * ns..(k - y_start + 1) * ns];
                        for (a, b) in yi.iter_mut().zip(yk) {
                            *a -= l * b;
                        }
                    }
                }
            }
            blocks.push(blk);
        }

        let schur = if ns > 0 {
            let mut s = DMatrix::zeros(ns, ns);
            for (i, &p) in plan.separator.iter().enumerate() {
                for (q, v) in a.row(p) {
                    if block_of[q] == SEP {
                        s[(i, local[q])] += v;
                    }
                }
            }
            for blk in &blocks {
                for i in blk.y_start..blk.len() {
                    let yi = &blk.y[(i - blk.y_start) * ns..(i - blk.y_start + 1) * ns];
                    let d = blk.diag(i);
                    for (c, &yc) in yi.iter().enumerate() {
                        if yc == 0.0 {
                            continue;
                        }
                        let w = yc / d;
                        for (r, &yr) in yi.iter().enumerate() {
                            s[(r, c)] -= w * yr;
                        }
                    }
                }
            }
            Some(BunchKaufman::factor(&s))
        } else {
            None
        };
        Ok(Self { n, blocks, separator: plan.separator.clone(), schur })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored factor entries (a measure of the work per solve).
    pub fn stored_entries(&self) -> usize {
        self.blocks.iter().map(|b| b.values.len() + b.y.len()).sum::<usize>() + self.separator.len().pow(2)
    }

    /// `(negative, zero, positive)`, additive over the blocks and the Schur
    /// complement.
    pub fn inertia(&self) -> (usize, usize, usize) {
        let (mut neg, mut zero, mut pos) = self.schur.as_ref().map_or((0, 0, 0), |s| s.inertia());
        for blk in &self.blocks {
            for i in 0..blk.len() {
                let d = blk.diag(i);
                if d < 0.0 {
                    neg += 1;
                } else if d > 0.0 {
                    pos += 1;
                } else {
                    zero += 1;
                }
            }
        }
        (neg, zero, pos)
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(b.len(), self.n);
        let ns = self.separator.len();
        let mut rhs_s: Vec<f64> = self.separator.iter().map(|&p| b[p]).collect();
        let mut zs = Vec::with_capacity(self.blocks.len());
        for blk in &self.blocks {
            let mut z: Vec<f64> = blk.dofs.iter().map(|&p| b[p]).collect();
            blk.forward(&mut z);
            for i in blk.y_start..blk.len() {
                let w = z[i] / blk.diag(i);
                if w != 0.0 {
                    let yi = &blk.y[(i - blk.y_start) * ns..(i - blk.y_start + 1) * ns];
                    for (r, &y) in rhs_s.iter_mut().zip(yi) {
                        *r -= y * w;
                    }
                }
            }
            zs.push(z);
        }
        let xs = match &self.schur {
            Some(s) => s.solve(&rhs_s)?,
            None => vec![],
        };
        let mut x = vec![0.0; self.n];
        for (&p, &v) in self.separator.iter().zip(&xs) {
            x[p] = v;
        }
        for (blk, mut z) in self.blocks.iter().zip(zs) {
            for i in blk.y_start..blk.len() {
                let yi = &blk.y[(i - blk.y_start) * ns..(i - blk.y_start + 1) * ns];
                z[i] -= yi.iter().zip(&xs).map(|(a, b)| a * b).sum::<f64>();
            }
            for (i, zi) in z.iter_mut().enumerate() {
                *zi /= blk.diag(i);
            }
            blk.backward(&mut z);
            for (&p, v) in blk.dofs.iter().zip(z) {
                x[p] = v;
            }
        }
        Ok(x)
    }
}

fn factor_skyline(blk: &mut SkylineBlock) -> Result<()> {
    let m = blk.len();
    let mut g = Vec::new();
    for i in 0..m {
        let fi = blk.first[i];
        let (before, rest) = blk.values.split_at_mut(blk.offset[i]);
        let row = &mut rest[..i - fi + 1];
        g.clear();
        g.extend_from_slice(&row[..i - fi]);
        // g_j = a_ij − Σ_k g_k L_jk, L_ij = g_j / D_j
        for j in fi..i {
            let fj = blk.first[j];
            let lo = fi.max(fj);
            let rj = &before[blk.offset[j]..blk.offset[j + 1]];
            let s: f64 = g[lo - fi..j - fi].iter().zip(&rj[lo - fj..j - fj]).map(|(a, b)| a * b).sum();
            g[j - fi] -= s;
            row[j - fi] = g[j - fi] / rj[j - fj];
        }
        let d = row[i - fi] - g.iter().zip(&row[..i - fi]).map(|(a, b)| a * b).sum::<f64>();
        if d == 0.0 || !d.is_finite() {
            return Err(Error::Breakdown { index: blk.dofs[i], value: d });
        }
        row[i - fi] = d;
    }
    Ok(())
}

/// Dense or blocked factorization depending on the dimension.
#[derive(Debug, Clone)]
pub enum Factorization {
    Dense(BunchKaufman),
    Blocked(BlockLdl),
}

impl Factorization {
    /// Factors `a`; `plan` is used (or built) only for the blocked path.
    pub fn new(a: &CsrMatrix, plan: Option<&LinearPlan>) -> Result<Self> {
        if a.dim() < DENSE_LIMIT {
            Ok(Self::Dense(BunchKaufman::factor(&a.to_dense())))
        } else {
            let owned;
            let plan = match plan {
                Some(p) => p,
                None => {
                    owned = LinearPlan::single(a);
                    &owned
                }
            };
            Ok(Self::Blocked(BlockLdl::factor(a, plan)?))
        }
    }

    pub fn inertia(&self) -> (usize, usize, usize) {
        match self {
            Self::Dense(f) => f.inertia(),
            Self::Blocked(f) => f.inertia(),
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match self {
            Self::Dense(f) => f.solve(b),
            Self::Blocked(f) => f.solve(b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_flat_ycone, make_ycatenoid, Resolution};
    use crate::quadform::reduced_index_form;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn shifted(k: &CsrMatrix, m: &CsrMatrix, sigma: f64) -> CsrMatrix {
        CsrMatrix::linear_combination(&[(1.0, k), (-sigma, m)])
    }

    #[test]
    fn blocked_matches_dense_on_ycone() {
        let s = make_flat_ycone(1.0, 2.0, Resolution::new(0.2)).unwrap();
        let red = reduced_index_form(&s).unwrap();
        let plan = LinearPlan::for_surface(&s, &red.reducer, &red.form);
        assert!(!plan.separator.is_empty());
        assert_eq!(plan.blocks.len(), 3);
        for sigma in [-1.0, 3.0, 40.0] {
            let a = shifted(&red.form, &red.mass, sigma);
            let blocked = BlockLdl::factor(&a, &plan).unwrap();
            let dense = BunchKaufman::factor(&a.to_dense());
            assert_eq!(blocked.inertia(), dense.inertia(), "sigma {sigma}");
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let b: Vec<f64> = (0..a.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = blocked.solve(&b).unwrap();
            let r = a.mul_vec(&x);
            let err = r.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            assert!(err < 1e-9, "residual {err}");
        }
    }

    #[test]
    fn blocked_matches_dense_on_ycatenoid() {
        let s = make_ycatenoid(1.0, 2.0, Resolution::new(0.25)).unwrap();
        let red = reduced_index_form(&s).unwrap();
        let plan = LinearPlan::for_surface(&s, &red.reducer, &red.form);
        for sigma in [-0.5, 0.7, 5.0] {
            let a = shifted(&red.form, &red.mass, sigma);
            let blocked = BlockLdl::factor(&a, &plan).unwrap();
            assert_eq!(blocked.inertia(), BunchKaufman::factor(&a.to_dense()).inertia());
            let single = BlockLdl::factor(&a, &LinearPlan::single(&a)).unwrap();
            assert_eq!(single.inertia(), blocked.inertia());
        }
    }

    #[test]
    fn zero_pivot_reports_breakdown() {
        let a = CsrMatrix::from_dense(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let plan = LinearPlan { blocks: vec![vec![0, 1]], separator: vec![] };
        match BlockLdl::factor(&a, &plan) {
            Err(Error::Breakdown { index, .. }) => assert_eq!(index, 0),
            other => panic!("expected breakdown, got {other:?}"),
        }
    }
}
