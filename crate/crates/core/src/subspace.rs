//! Subspaces of 𝔽_q^n stored by a reduced row-echelon generator matrix.
//!
//! Vectors are residue vectors in [0, q). Characters of 𝔽_q^n are exponent
//! vectors of the same shape, and γ_e(v) = 1 exactly when e·v ≡ 0 (mod q).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, ApcError, Result};
use crate::group::GroupSpec;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    pub q: usize,
    pub n: usize,
    /// RREF rows; pivots[i] is the leading column of basis[i].
    pub basis: Vec<Vec<usize>>,
    pub pivots: Vec<usize>,
}

fn inv_mod(a: usize, q: usize) -> usize {
    // q is prime, so a^(q-2) is the inverse.
    let mut result = 1usize;
    let mut base = a % q;
    let mut e = q - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % q;
        }
        base = base * base % q;
        e >>= 1;
    }
    result
}

/// Row reduction over ℤ/q in place; returns pivot columns of the nonzero rows.
fn rref(q: usize, n: usize, rows: &mut Vec<Vec<usize>>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] % q != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = inv_mod(rows[r][col], q);
        for v in rows[r].iter_mut() {
            *v = *v * inv % q;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let f = rows[i][col];
                for c in 0..n {
                    rows[i][c] = (rows[i][c] + q * q - f * rows[r][c] % q) % q;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

impl Subspace {
    pub fn from_generators(q: usize, n: usize, gens: &[Vec<usize>]) -> Result<Self> {
        if q < 2 {
            return invalid("field order must be at least 2");
        }
        if gens.iter().any(|g| g.len() != n) {
            return invalid("generator length does not match dimension");
        }
        let mut rows: Vec<Vec<usize>> = gens.iter().map(|g| g.iter().map(|&x| x % q).collect()).collect();
        let pivots = rref(q, n, &mut rows);
        Ok(Subspace { q, n, basis: rows, pivots })
    }

    pub fn full(q: usize, n: usize) -> Self {
        let gens: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| usize::from(i == j)).collect()).collect();
        Subspace { q, n, basis: gens, pivots: (0..n).collect() }
    }

    pub fn zero(q: usize, n: usize) -> Self {
        Subspace { q, n, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.n - self.basis.len()
    }

    pub fn size(&self) -> usize {
        self.q.pow(self.dim() as u32)
    }

    /// {v : e·v ≡ 0 for every row e}.
    pub fn null_space(q: usize, n: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let mut r: Vec<Vec<usize>> = rows.iter().map(|x| x.iter().map(|&v| v % q).collect()).collect();
        if r.iter().any(|x| x.len() != n) {
            return invalid("row length does not match dimension");
        }
        let pivots = rref(q, n, &mut r);
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut gens = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![0usize; n];
            v[f] = 1;
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = (q - r[i][f]) % q;
            }
            gens.push(v);
        }
        Self::from_generators(q, n, &gens)
    }

    /// V^⊥ = {e : e·v ≡ 0 ∀v ∈ V}.
    pub fn annihilator(&self) -> Self {
        Self::null_space(self.q, self.n, &self.basis).expect("basis rows have length n")
    }

    pub fn contains(&self, v: &[usize]) -> bool {
        let c = self.coords_unchecked(v);
        self.combine(&c) == v.iter().map(|&x| x % self.q).collect::<Vec<_>>()
    }

    /// Coefficients c with v = Σ c_i basis_i; valid only when v ∈ V.
    fn coords_unchecked(&self, v: &[usize]) -> Vec<usize> {
        self.pivots.iter().map(|&p| v[p] % self.q).collect()
    }

    pub fn coords(&self, v: &[usize]) -> Result<Vec<usize>> {
        if !self.contains(v) {
            return Err(ApcError::InvalidArgument("vector is not in the subspace".into()));
        }
        Ok(self.coords_unchecked(v))
    }

    pub fn combine(&self, c: &[usize]) -> Vec<usize> {
        let mut v = vec![0usize; self.n];
        for (ci, row) in c.iter().zip(&self.basis) {
            for (x, &r) in v.iter_mut().zip(row) {
                *x = (*x + ci * r) % self.q;
            }
        }
        v
    }

    /// Members as canonical indices of 𝔽_q^n.
    pub fn members(&self, g: &GroupSpec) -> Vec<usize> {
        let d = self.dim();
        let mut out = Vec::with_capacity(self.size());
        let mut c = vec![0usize; d];
        loop {
            out.push(g.index_of_unsigned(&self.combine(&c)));
            let mut i = d;
            loop {
                if i == 0 {
                    out.sort_unstable();
                    return out;
                }
                i -= 1;
                c[i] += 1;
                if c[i] < self.q {
                    break;
                }
                c[i] = 0;
            }
        }
    }

    /// Image of a subspace of 𝔽_q^{dim V} (given in V's coordinates) inside 𝔽_q^n.
    pub fn push_forward(&self, inner: &Subspace) -> Result<Subspace> {
        if inner.n != self.dim() || inner.q != self.q {
            return invalid("inner subspace does not live in this subspace's coordinates");
        }
        let gens: Vec<Vec<usize>> = inner.basis.iter().map(|c| self.combine(c)).collect();
        Subspace::from_generators(self.q, self.n, &gens)
    }
}

/// Every subspace of 𝔽_q^n with codimension at most `max_codim`, ordered by
/// codimension and then by the RREF of its annihilator.
pub fn subspaces_up_to_codim(q: usize, n: usize, max_codim: usize, cap: usize) -> Result<Vec<Subspace>> {
    let mut out = Vec::new();
    for k in 0..=max_codim.min(n) {
        for rows in rref_matrices(q, n, k, cap.saturating_sub(out.len()))? {
            out.push(Subspace::null_space(q, n, &rows)?);
        }
    }
    Ok(out)
}

/// All k × n reduced row-echelon matrices of rank k over 𝔽_q.
fn rref_matrices(q: usize, n: usize, k: usize, cap: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    let mut out = Vec::new();
    if k == 0 {
        out.push(Vec::new());
        return Ok(out);
    }
    let mut piv: Vec<usize> = (0..k).collect();
    loop {
        // free slots: (row, col) with col > pivot[row] and col not a pivot
        let slots: Vec<(usize, usize)> =
            (0..k).flat_map(|i| ((piv[i] + 1)..n).filter(|c| !piv.contains(c)).map(move |c| (i, c))).collect();
        let count = q.checked_pow(slots.len() as u32).unwrap_or(usize::MAX);
        if out.len().saturating_add(count) > cap {
            return Err(ApcError::ResourceLimit(format!("more than {cap} subspaces requested")));
        }
        let mut vals = vec![0usize; slots.len()];
        loop {
            let mut m = vec![vec![0usize; n]; k];
            for (i, &p) in piv.iter().enumerate() {
                m[i][p] = 1;
            }
            for (&(i, c), &v) in slots.iter().zip(&vals) {
                m[i][c] = v;
            }
            out.push(m);
            let mut j = slots.len();
            let mut done = true;
            while j > 0 {
                j -= 1;
                vals[j] += 1;
                if vals[j] < q {
                    done = false;
                    break;
                }
                vals[j] = 0;
            }
            if done {
                break;
            }
        }
        // next pivot combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if piv[i] < n - k + i {
                piv[i] += 1;
                for j in i + 1..k {
                    piv[j] = piv[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperplane_count_f3_cubed() {
        let v = subspaces_up_to_codim(3, 3, 1, 1000).unwrap();
        assert_eq!(v.len(), 1 + 13);
        assert!(v[1..].iter().all(|s| s.codim() == 1 && s.size() == 9));
    }

    #[test]
    fn null_space_is_orthogonal() {
        let rows = vec![vec![1, 2, 0, 1], vec![0, 1, 1, 2]];
        let v = Subspace::null_space(3, 4, &rows).unwrap();
        assert_eq!(v.dim(), 2);
        for b in &v.basis {
            for r in &rows {
                let dot: usize = b.iter().zip(r).map(|(x, y)| x * y).sum();
                assert_eq!(dot % 3, 0);
            }
        }
        assert_eq!(v.annihilator().dim(), 2);
    }

    #[test]
    fn members_and_coords() {
        let g = GroupSpec::power(3, 3).unwrap();
        let v = Subspace::from_generators(3, 3, &[vec![1, 1, 0]]).unwrap();
        let m = v.members(&g);
        assert_eq!(m.len(), 3);
        for &x in &m {
            let r = g.residues(x);
            assert!(v.contains(&r));
            assert_eq!(v.combine(&v.coords(&r).unwrap()), r);
        }
    }

    #[test]
    fn subspace_counts_f3_squared() {
        // 1 + 4 lines + 1 point
        assert_eq!(subspaces_up_to_codim(3, 2, 2, 100).unwrap().len(), 6);
    }
}
