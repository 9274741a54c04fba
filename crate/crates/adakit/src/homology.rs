//! Minimal projective resolutions, projective/injective/global dimension and
//! Ext spaces. Minimality comes from the cover construction (kernels land in
//! radicals), it is never assumed.

use crate::algebra::{AlgElem, BoundAlgebra};
use crate::matrix::Matrix;
use crate::rep::{hom_dim, projective_cover, Cover, RepError, Representation};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HomologyError {
    #[error("resolution truncated at degree {0} before the requested degree")]
    Truncated(usize),
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// A homological dimension: exact value or a cap marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    Finite(usize),
    AtLeast(usize),
}

impl Dim {
    pub fn finite(&self) -> Option<usize> {
        match self {
            Dim::Finite(d) => Some(*d),
            Dim::AtLeast(_) => None,
        }
    }

    pub fn lower_bound(&self) -> usize {
        match self {
            Dim::Finite(d) | Dim::AtLeast(d) => *d,
        }
    }

    /// Known to be <= bound.
    pub fn at_most(&self, bound: usize) -> bool {
        matches!(self, Dim::Finite(d) if *d <= bound)
    }

    /// Known to be >= bound.
    pub fn at_least(&self, bound: usize) -> bool {
        self.lower_bound() >= bound
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dim::Finite(d) => write!(f, "{}", d),
            Dim::AtLeast(d) => write!(f, ">={}", d),
        }
    }
}

pub const DEFAULT_PD_CAP: usize = 12;

/// Length of the minimal projective resolution, or AtLeast(cap).
pub fn proj_dim(m: &Representation, cap: usize) -> Result<Dim, RepError> {
    if m.is_zero() {
        return Ok(Dim::Finite(0));
    }
    let mut current = m.clone();
    for d in 0..=cap {
        let cov = projective_cover(&current)?;
        if cov.kernel.is_zero() {
            return Ok(Dim::Finite(d));
        }
        current = cov.kernel;
    }
    Ok(Dim::AtLeast(cap))
}

/// Injective dimension via duality over the opposite algebra.
pub fn inj_dim(m: &Representation, cap: usize) -> Result<Dim, RepError> {
    if m.is_zero() {
        return Ok(Dim::Finite(0));
    }
    let op = m.alg.op();
    proj_dim(&m.dual(&op), cap)
}

/// Global dimension: maximum of pd over the simples.
pub fn global_dimension(alg: &Arc<BoundAlgebra>, cap: usize) -> Result<Dim, RepError> {
    let mut best = 0usize;
    for x in 0..alg.quiver.n_vertices() {
        match proj_dim(&Representation::simple(alg, x), cap)? {
            Dim::AtLeast(_) => return Ok(Dim::AtLeast(cap)),
            Dim::Finite(v) => best = best.max(v),
        }
    }
    Ok(Dim::Finite(best))
}

/// Covers of the iterated syzygies: covers[j] resolves the j-th syzygy, so
/// covers[j].proj is the degree-j term. Stops early when a kernel vanishes.
pub fn resolution_covers(m: &Representation, len: usize) -> Result<Vec<Cover>, RepError> {
    let mut covers = Vec::new();
    let mut current = m.clone();
    for _ in 0..=len {
        if current.is_zero() {
            break;
        }
        let cov = projective_cover(&current)?;
        let next = cov.kernel.clone();
        covers.push(cov);
        current = next;
    }
    Ok(covers)
}

fn copies_of(cov: &Cover) -> Vec<usize> {
    cov.summands
        .iter()
        .flat_map(|&(v, mult)| std::iter::repeat(v).take(mult))
        .collect()
}

/// Row offset of the generator of copy `l` (vertex `copies[l]`) inside the
/// vertex space of the direct sum of projectives.
fn generator_row(alg: &BoundAlgebra, copies: &[usize], l: usize) -> usize {
    let y = copies[l];
    let mut off = 0;
    for &x in &copies[..l] {
        off += alg.pair_basis(x, y).len();
    }
    // the trivial path has the smallest global index in its class
    off
}

/// Reads the differential P_from -> P_to off as element matrices:
/// result[l][k] is the element of e_{to[k]} A e_{from[l]} through which
/// generator l hits copy k.
pub fn differential_elements(
    alg: &BoundAlgebra,
    copies_from: &[usize],
    copies_to: &[usize],
    d: &crate::rep::ModuleMap,
) -> Vec<Vec<AlgElem>> {
    let mut out = Vec::with_capacity(copies_from.len());
    for (l, &y) in copies_from.iter().enumerate() {
        let row_idx = generator_row(alg, copies_from, l);
        let row = d.mats[y].row(row_idx);
        let mut per_copy = Vec::with_capacity(copies_to.len());
        let mut col = 0;
        for &x in copies_to {
            let mut coords = vec![alg.field.zero(); alg.dim()];
            for &b in alg.pair_basis(x, y) {
                coords[b] = row[col].clone();
                col += 1;
            }
            per_copy.push(coords);
        }
        debug_assert_eq!(col, d.mats[y].cols);
        out.push(per_copy);
    }
    out
}

/// dim Ext^i(M, N): apply Hom(-, N) to the minimal projective resolution of M
/// and take cohomology of the induced complex of hom spaces.
pub fn ext_dim(
    i: usize,
    m: &Representation,
    n: &Representation,
    cap: usize,
) -> Result<usize, HomologyError> {
    if i > cap {
        return Err(HomologyError::Truncated(cap));
    }
    if i == 0 {
        return Ok(hom_dim(m, n)?);
    }
    if m.is_zero() || n.is_zero() {
        return Ok(0);
    }
    let alg = m.alg.clone();
    let field = alg.field;
    let covers = resolution_covers(m, i)?;
    if covers.len() <= i {
        return Ok(0); // the resolution terminated below degree i
    }
    let copies: Vec<Vec<usize>> = covers.iter().map(copies_of).collect();
    let space_dim = |j: usize| -> usize {
        if j >= copies.len() {
            0
        } else {
            copies[j].iter().map(|&v| n.dims[v]).sum()
        }
    };
    // induced map C^j -> C^{j+1}
    let induced = |j: usize| -> Matrix {
        let rows = space_dim(j);
        let cols = space_dim(j + 1);
        if rows == 0 || cols == 0 {
            return Matrix::zeros(rows, cols, field);
        }
        let d = covers[j + 1].map.compose(&covers[j].kernel_incl);
        let elems = differential_elements(&alg, &copies[j + 1], &copies[j], &d);
        let mut out = Matrix::zeros(rows, cols, field);
        let mut col_off = 0;
        for (l, &y) in copies[j + 1].iter().enumerate() {
            let mut row_off = 0;
            for (k, &x) in copies[j].iter().enumerate() {
                let block = n.elem_action(&elems[l][k], x, y);
                for r in 0..block.rows {
                    for c in 0..block.cols {
                        let v = &out.get(row_off + r, col_off + c).clone() + block.get(r, c);
                        out.set(row_off + r, col_off + c, v);
                    }
                }
                row_off += n.dims[x];
            }
            col_off += n.dims[y];
        }
        out
    };
    let delta_i = induced(i);
    let delta_prev = induced(i - 1);
    let rank_i = delta_i.rank();
    let rank_prev = delta_prev.rank();
    Ok(space_dim(i) - rank_i - rank_prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_algebra, full_subcategory};
    use crate::quiver::parse_spec;

    const EX22B: &str = "field Q\nvertex 1 2 3 4 5\narrow b1 2 1\narrow b2 3 2\narrow b3 4 3\narrow b4 5 4\nrel rad2\n";
    const KRON: &str = "field Q\nvertex 1 2\narrow a 1 2\narrow b 1 2\n";

    fn alg(text: &str) -> Arc<BoundAlgebra> {
        let (q, r, f) = parse_spec(text).unwrap();
        build_algebra(q, r, f).unwrap()
    }

    #[test]
    fn chain_dimensions() {
        let a = alg(EX22B);
        let s5 = Representation::simple(&a, 4);
        assert_eq!(proj_dim(&s5, 12).unwrap(), Dim::Finite(4));
        for x in 0..5 {
            let p = Representation::proj_std(&a, x);
            assert_eq!(proj_dim(&p, 12).unwrap(), Dim::Finite(0));
        }
        let s3 = Representation::simple(&a, 2);
        assert_eq!(inj_dim(&s3, 12).unwrap(), Dim::Finite(2));
    }

    #[test]
    fn global_dimensions() {
        assert_eq!(global_dimension(&alg(EX22B), 12).unwrap(), Dim::Finite(4));
        assert_eq!(
            global_dimension(&alg("field Q\nvertex 1\n"), 12).unwrap(),
            Dim::Finite(0)
        );
        assert_eq!(global_dimension(&alg(KRON), 12).unwrap(), Dim::Finite(1));
    }

    #[test]
    fn pd_bounded_by_gd_and_symmetric() {
        let a = alg(EX22B);
        let gd = global_dimension(&a, 12).unwrap().finite().unwrap();
        for x in 0..5 {
            for m in [
                Representation::simple(&a, x),
                Representation::proj_std(&a, x),
                Representation::inj_std(&a, x),
            ] {
                let pd = proj_dim(&m, 12).unwrap().finite().unwrap();
                assert!(pd <= gd);
            }
        }
        // gd(A) = gd(A^op) via injective dimensions of simples
        let op = a.op();
        let gd_op = global_dimension(&op, 12).unwrap().finite().unwrap();
        assert_eq!(gd, gd_op);
    }

    #[test]
    fn ext_dimensions() {
        let a = alg(EX22B);
        let s2 = Representation::simple(&a, 1);
        let s1 = Representation::simple(&a, 0);
        // degree zero is a hom space
        assert_eq!(
            ext_dim(0, &s2, &s2, 8).unwrap(),
            hom_dim(&s2, &s2).unwrap()
        );
        // the arrow 2 -> 1 carries a one-dimensional extension
        assert_eq!(ext_dim(1, &s2, &s1, 8).unwrap(), 1);
        assert_eq!(ext_dim(1, &s1, &s2, 8).unwrap(), 0);

        // over the {1,2,3} subcategory the simple S_3 is rigid in degrees 1, 2
        let sub = full_subcategory(&a, &[0, 1, 2]).unwrap().algebra;
        let s3 = Representation::simple(&sub, 2);
        assert_eq!(ext_dim(1, &s3, &s3, 8).unwrap(), 0);
        assert_eq!(ext_dim(2, &s3, &s3, 8).unwrap(), 0);
    }

    #[test]
    fn ext_vanishes_beyond_pd() {
        let a = alg(EX22B);
        let s5 = Representation::simple(&a, 4);
        let s1 = Representation::simple(&a, 0);
        assert_eq!(ext_dim(5, &s5, &s1, 8).unwrap(), 0);
        // Ext^4(S_5, S_1) is the top of the length-4 resolution
        assert_eq!(ext_dim(4, &s5, &s1, 8).unwrap(), 1);
    }

    #[test]
    fn truncation_is_reported() {
        let a = alg(EX22B);
        let s5 = Representation::simple(&a, 4);
        assert!(matches!(
            ext_dim(9, &s5, &s5, 8),
            Err(HomologyError::Truncated(8))
        ));
    }
}
