//! # Banded linear algebra for the radial solvers
//!
//! The discrete kinetic form on a radial mesh is Σ_i w_i (Df)_i² with a
//! three-point derivative stencil D, so its stiffness matrix K = DᵀWD is
//! symmetric positive semidefinite and pentadiagonal. Everything the
//! solvers need reduces to
//!
//! * assembling K as three bands and applying it,
//! * solving the shifted systems (M + τK)x = b arising from semi-implicit
//!   gradient-flow steps (symmetric positive definite, LDLᵀ without
//!   pivoting), and
//! * solving the bordered Newton systems for constrained critical points,
//!   whose (1,1) block K + diag(...) is banded but indefinite near a
//!   ground state — those go through a general banded LU with partial
//!   pivoting plus a dense Schur complement for the mass-constraint
//!   borders.

use thiserror::Error;

use crate::grid::Grid;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is numerically singular at pivot {0}")]
    Singular(usize),
    #[error("bordered system has a singular constraint block")]
    SingularSchur,
}

/// Pentadiagonal symmetric matrix stored as three bands:
/// `d[i] = A[i][i]`, `e[i] = A[i][i+1]`, `f[i] = A[i][i+2]`.
#[derive(Debug, Clone)]
pub struct SymBanded {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
    pub f: Vec<f64>,
}

impl SymBanded {
    pub fn zeros(n: usize) -> Self {
        Self { d: vec![0.0; n], e: vec![0.0; n.saturating_sub(1)], f: vec![0.0; n.saturating_sub(2)] }
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// y = A x.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n {
            let mut s = self.d[i] * x[i];
            if i >= 1 {
                s += self.e[i - 1] * x[i - 1];
            }
            if i >= 2 {
                s += self.f[i - 2] * x[i - 2];
            }
            if i + 1 < n {
                s += self.e[i] * x[i + 1];
            }
            if i + 2 < n {
                s += self.f[i] * x[i + 2];
            }
            y[i] = s;
        }
    }
}

/// Assemble the stiffness matrix K = DᵀWD of the grid's derivative stencil
/// against its quadrature weights, so that xᵀKx = Σ_i w_i (Dx)_i² and
/// kinetic(f) = fᵀKf.
pub fn assemble_stiffness(grid: &Grid) -> SymBanded {
    let m = grid.len();
    let mut k = SymBanded::zeros(m);
    for j in 0..m {
        let (start, c) = grid.stencil_row(j);
        let w = grid.w[j];
        if w == 0.0 || c == [0.0; 3] {
            continue;
        }
        for a in 0..3 {
            for b in a..3 {
                let (ia, ib) = (start + a, start + b);
                let val = w * c[a] * c[b];
                match ib - ia {
                    0 => k.d[ia] += val,
                    1 => k.e[ia] += val,
                    2 => k.f[ia] += val,
                    _ => unreachable!(),
                }
            }
        }
    }
    k
}

/// Solve (diag(m) + τK) x = b with the last unknown pinned to zero
/// (Dirichlet truncation). The matrix is SPD for τ > 0 on the unpinned
/// block apart from the first row, whose quadrature weight vanishes; the
/// stiffness coupling keeps the pivot positive there.
///
/// Factorization is banded LDLᵀ; cost is O(n) per call.
pub fn solve_shifted_pinned(
    mass: &[f64],
    k: &SymBanded,
    tau: f64,
    b: &[f64],
    x: &mut [f64],
) -> Result<(), LinalgError> {
    let n = mass.len();
    debug_assert_eq!(k.len(), n);
    debug_assert_eq!(b.len(), n);
    debug_assert_eq!(x.len(), n);
    // effective system over 0..n-1 with the last row made trivial
    let nn = n - 1;
    let mut a0: Vec<f64> = (0..nn).map(|i| mass[i] + tau * k.d[i]).collect();
    let mut a1: Vec<f64> = (0..nn.saturating_sub(1)).map(|i| tau * k.e[i]).collect();
    let mut a2: Vec<f64> = (0..nn.saturating_sub(2)).map(|i| tau * k.f[i]).collect();

    // in-place LDLᵀ with bandwidth 2: a0 -> D, a1/a2 -> L bands
    for i in 0..nn {
        let mut di = a0[i];
        if i >= 1 {
            di -= a1[i - 1] * a1[i - 1] * a0[i - 1];
        }
        if i >= 2 {
            di -= a2[i - 2] * a2[i - 2] * a0[i - 2];
        }
        if !(di.abs() > 0.0) || !di.is_finite() {
            return Err(LinalgError::Singular(i));
        }
        a0[i] = di;
        if i + 1 < nn {
            let mut v = a1[i];
            if i >= 1 {
                v -= a2[i - 1] * a1[i - 1] * a0[i - 1];
            }
            a1[i] = v / di;
        }
        if i + 2 < nn {
            a2[i] /= di;
        }
    }
    // forward substitution L z = b
    let mut z = vec![0.0; nn];
    for i in 0..nn {
        let mut s = b[i];
        if i >= 1 {
            s -= a1[i - 1] * z[i - 1];
        }
        if i >= 2 {
            s -= a2[i - 2] * z[i - 2];
        }
        z[i] = s;
    }
    // diagonal
    for i in 0..nn {
        z[i] /= a0[i];
    }
    // backward Lᵀ x = z
    for i in (0..nn).rev() {
        let mut s = z[i];
        if i + 1 < nn {
            s -= a1[i] * x[i + 1];
        }
        if i + 2 < nn {
            s -= a2[i] * x[i + 2];
        }
        x[i] = s;
    }
    x[n - 1] = 0.0;
    Ok(())
}

/// General banded matrix with `kl` subdiagonals and `ku` superdiagonals,
/// stored column-major LAPACK-style with `kl` extra rows of fill space for
/// partial pivoting: entry (i, j) lives at `ab[j·ldab + kl + ku + i − j]`.
#[derive(Debug, Clone)]
pub struct Banded {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    ldab: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
    factored: bool,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self { n, kl, ku, ldab, ab: vec![0.0; n * ldab], ipiv: vec![0; n], factored: false }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + self.kl + self.ku + i - j
    }

    /// Add `v` to entry (i, j); (i, j) must be inside the band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(!self.factored, "matrix already factored");
        debug_assert!(j <= i + self.ku && i <= j + self.kl, "({i},{j}) outside band");
        let at = self.idx(i, j);
        self.ab[at] += v;
    }

    /// Overwrite entry (i, j).
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(!self.factored, "matrix already factored");
        debug_assert!(j <= i + self.ku && i <= j + self.kl, "({i},{j}) outside band");
        let at = self.idx(i, j);
        self.ab[at] = v;
    }

    /// LU factorization with partial pivoting (banded dgbtrf analogue).
    pub fn factor(&mut self) -> Result<(), LinalgError> {
        let (n, kl, ku, ldab) = (self.n, self.kl, self.ku, self.ldab);
        let kv = kl + ku; // superdiagonal extent after fill
        for k in 0..n {
            let km = kl.min(n - 1 - k);
            // pivot search in column k, rows k..k+km
            let mut p = 0;
            let mut best = self.ab[k * ldab + kl + ku].abs();
            for i in 1..=km {
                let v = self.ab[k * ldab + kl + ku + i].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            self.ipiv[k] = k + p;
            let piv = self.ab[k * ldab + kl + ku + p];
            if piv == 0.0 || !piv.is_finite() {
                return Err(LinalgError::Singular(k));
            }
            let jhi = (k + kv).min(n - 1);
            if p != 0 {
                for j in k..=jhi {
                    let a = j * ldab + kl + ku + k - j;
                    self.ab.swap(a, a + p);
                }
            }
            let pivot = self.ab[k * ldab + kl + ku];
            for i in 1..=km {
                let at = k * ldab + kl + ku + i;
                let l = self.ab[at] / pivot;
                self.ab[at] = l;
                if l != 0.0 {
                    for j in k + 1..=jhi {
                        let col = j * ldab + kl + ku - j;
                        self.ab[col + k + i] -= l * self.ab[col + k];
                    }
                }
            }
        }
        self.factored = true;
        Ok(())
    }

    /// Solve A x = b in place after [`Banded::factor`].
    pub fn solve(&self, b: &mut [f64]) {
        assert!(self.factored, "factor() must run first");
        let (n, kl, ku, ldab) = (self.n, self.kl, self.ku, self.ldab);
        let kv = kl + ku;
        // forward: apply L (with row swaps)
        for k in 0..n {
            let pk = self.ipiv[k];
            if pk != k {
                b.swap(k, pk);
            }
            let km = kl.min(n - 1 - k);
            let bk = b[k];
            if bk != 0.0 {
                for i in 1..=km {
                    b[k + i] -= self.ab[k * ldab + kl + ku + i] * bk;
                }
            }
        }
        // backward: U x = y
        for k in (0..n).rev() {
            let jhi = (k + kv).min(n - 1);
            let mut s = b[k];
            let col0 = kl + ku;
            for j in k + 1..=jhi {
                s -= self.ab[j * ldab + col0 + k - j] * b[j];
            }
            b[k] = s / self.ab[k * ldab + col0];
        }
    }
}

/// Solve the bordered (saddle) system
///
/// ```text
///   [ A   B ] [x]   [r]
///   [ Bᵀ  0 ] [y] = [c]
/// ```
///
/// with banded A (already assembled, not factored) and a thin dense border
/// B (one column per constraint), by block elimination: factor A once,
/// solve against r and each border column, then a dense k×k Schur system.
pub fn solve_bordered(
    a: &mut Banded,
    borders: &[Vec<f64>],
    r: &[f64],
    c: &[f64],
    x: &mut [f64],
    y: &mut [f64],
) -> Result<(), LinalgError> {
    let n = a.n;
    let k = borders.len();
    debug_assert_eq!(c.len(), k);
    a.factor()?;
    let mut z = r.to_vec();
    a.solve(&mut z);
    let mut wcols: Vec<Vec<f64>> = Vec::with_capacity(k);
    for bcol in borders {
        let mut w = bcol.clone();
        a.solve(&mut w);
        wcols.push(w);
    }
    // Schur: S y = Bᵀ z − c, with S = Bᵀ W
    let mut s = vec![0.0; k * k];
    let mut rhs = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            s[i * k + j] = dot(&borders[i], &wcols[j]);
        }
        rhs[i] = dot(&borders[i], &z) - c[i];
    }
    solve_dense_small(&mut s, &mut rhs, k)?;
    y[..k].copy_from_slice(&rhs[..k]);
    for i in 0..n {
        let mut xi = z[i];
        for j in 0..k {
            xi -= wcols[j][i] * rhs[j];
        }
        x[i] = xi;
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting for the tiny Schur systems.
fn solve_dense_small(a: &mut [f64], b: &mut [f64], n: usize) -> Result<(), LinalgError> {
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if a[i * n + k].abs() > a[p * n + k].abs() {
                p = i;
            }
        }
        if a[p * n + k] == 0.0 {
            return Err(LinalgError::SingularSchur);
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            b.swap(k, p);
        }
        for i in k + 1..n {
            let l = a[i * n + k] / a[k * n + k];
            for j in k..n {
                a[i * n + j] -= l * a[k * n + j];
            }
            b[i] -= l * b[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in k + 1..n {
            s -= a[k * n + j] * b[j];
        }
        b[k] = s / a[k * n + k];
    }
    Ok(())
}
