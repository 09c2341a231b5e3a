//! Fixed-dimension matrix kernels for two-qubit work.
//!
//! Everything here is sized at compile time: complex 2×2 and 4×4 matrices
//! for single-qubit effects and two-qubit states, real 3×3 matrices for
//! Pauli correlation tables, and a symmetric 3×3 eigensolver. No heap, no
//! generic BLAS; the dimensions never change, so the closed forms and the
//! tiny Jacobi sweeps below are both faster and easier to audit than a
//! general-purpose library.
//!
//! ## Conventions
//!
//! - `Complex64` everywhere; matrices are row-major nested arrays behind a
//!   public `e` field.
//! - Pauli indices are 0, 1, 2 for x, y, z.
//! - Eigenvalues are reported in descending order.
//! - Tolerances follow the crate-wide contract: construction-time checks
//!   at `1e-12`, PSD slack `1e-10`, Jacobi off-diagonal target `1e-13`
//!   (scaled by the Frobenius norm above unit scale).

// Index loops mirror the written-out matrix formulas; iterator chains
// would obscure which entry is which.
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

use crate::{Error, Result};

/// Shorthand for a complex scalar.
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Shorthand for a real scalar as a complex number.
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Dot product of real 3-vectors.
pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Euclidean norm of a real 3-vector.
pub fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// Unit vector along `a`. Errors on vectors shorter than `1e-12`.
pub fn normalize3(a: [f64; 3]) -> Result<[f64; 3]> {
    let n = norm3(a);
    if n < 1e-12 {
        return Err(Error::Domain(format!("cannot normalize near-zero vector (norm {n:e})")));
    }
    Ok([a[0] / n, a[1] / n, a[2] / n])
}

/// Complex 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat2 {
    /// Entries `e[row][col]`.
    pub e: [[Complex64; 2]; 2],
}

/// Complex 4×4 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat4 {
    /// Entries `e[row][col]`.
    pub e: [[Complex64; 4]; 4],
}

/// Real 3×3 matrix, row-major. Carrier for Pauli correlation tables,
/// which are real but not symmetric in general.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3 {
    /// Entries `e[row][col]`.
    pub e: [[f64; 3]; 3],
}

/// Real symmetric 3×3 matrix. Symmetry holds exactly by construction:
/// only one triangle is ever supplied and the mirror is copied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym3 {
    e: [[f64; 3]; 3],
}

/// Descending eigensystem of a [`Sym3`]. `vectors[i]` is the unit
/// eigenvector paired with `values[i]`; the basis is right-handed up to
/// the sign canonicalization described at [`eig_sym3`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenBasis3 {
    /// Eigenvalues, descending.
    pub values: [f64; 3],
    /// Unit eigenvectors, `vectors[i]` matching `values[i]`.
    pub vectors: [[f64; 3]; 3],
}

impl CMat2 {
    /// All-zero matrix.
    pub fn zero() -> Self {
        CMat2 { e: [[cr(0.0); 2]; 2] }
    }

    /// Identity matrix.
    pub fn identity() -> Self {
        let mut m = Self::zero();
        m.e[0][0] = cr(1.0);
        m.e[1][1] = cr(1.0);
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] = self.e[j][i].conj();
            }
        }
        m
    }

    /// Matrix trace.
    pub fn trace(&self) -> Complex64 {
        self.e[0][0] + self.e[1][1]
    }

    /// Entry-wise scaling by a real factor.
    pub fn scale(&self, t: f64) -> Self {
        let mut m = *self;
        for row in m.e.iter_mut() {
            for v in row.iter_mut() {
                *v *= t;
            }
        }
        m
    }

    /// Largest absolute deviation from the conjugate transpose.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.e[i][j] - self.e[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Determinant evaluated with the Hermitian-specific formula
    /// `re(m00)·re(m11) - |m01|^2`, which keeps the result exactly real.
    /// Only meaningful on Hermitian inputs.
    pub fn det_hermitian(&self) -> f64 {
        self.e[0][0].re * self.e[1][1].re - self.e[0][1].norm_sqr()
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.e[i][j] - other.e[i][j]).norm());
            }
        }
        worst
    }
}

impl std::ops::Add for CMat2 {
    type Output = CMat2;
    fn add(self, rhs: CMat2) -> CMat2 {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] += rhs.e[i][j];
            }
        }
        m
    }
}

impl std::ops::Sub for CMat2 {
    type Output = CMat2;
    fn sub(self, rhs: CMat2) -> CMat2 {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] -= rhs.e[i][j];
            }
        }
        m
    }
}

impl std::ops::Mul for CMat2 {
    type Output = CMat2;
    fn mul(self, rhs: CMat2) -> CMat2 {
        let mut m = CMat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = cr(0.0);
                for k in 0..2 {
                    acc += self.e[i][k] * rhs.e[k][j];
                }
                m.e[i][j] = acc;
            }
        }
        m
    }
}

impl CMat4 {
    /// All-zero matrix.
    pub fn zero() -> Self {
        CMat4 { e: [[cr(0.0); 4]; 4] }
    }

    /// Identity matrix.
    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.e[i][i] = cr(1.0);
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.e[i][j] = self.e[j][i].conj();
            }
        }
        m
    }

    /// Matrix trace.
    pub fn trace(&self) -> Complex64 {
        self.e[0][0] + self.e[1][1] + self.e[2][2] + self.e[3][3]
    }

    /// Entry-wise scaling by a real factor.
    pub fn scale(&self, t: f64) -> Self {
        let mut m = *self;
        for row in m.e.iter_mut() {
            for v in row.iter_mut() {
                *v *= t;
            }
        }
        m
    }

    /// Largest absolute deviation from the conjugate transpose.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.e[i][j] - self.e[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.e[i][j] - other.e[i][j]).norm());
            }
        }
        worst
    }
}

impl std::ops::Add for CMat4 {
    type Output = CMat4;
    fn add(self, rhs: CMat4) -> CMat4 {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.e[i][j] += rhs.e[i][j];
            }
        }
        m
    }
}

impl std::ops::Sub for CMat4 {
    type Output = CMat4;
    fn sub(self, rhs: CMat4) -> CMat4 {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.e[i][j] -= rhs.e[i][j];
            }
        }
        m
    }
}

impl std::ops::Mul for CMat4 {
    type Output = CMat4;
    fn mul(self, rhs: CMat4) -> CMat4 {
        let mut m = CMat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = cr(0.0);
                for k in 0..4 {
                    acc += self.e[i][k] * rhs.e[k][j];
                }
                m.e[i][j] = acc;
            }
        }
        m
    }
}

impl Mat3 {
    /// All-zero matrix.
    pub fn zero() -> Self {
        Mat3 { e: [[0.0; 3]; 3] }
    }

    /// Matrix-vector product `M v`.
    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, row) in self.e.iter().enumerate() {
            out[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
        }
        out
    }

    /// Transposed product `M^T v`.
    pub fn mul_vec_t(&self, v: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for j in 0..3 {
            out[j] = self.e[0][j] * v[0] + self.e[1][j] * v[1] + self.e[2][j] * v[2];
        }
        out
    }

    /// Gram matrix `M M^T`, symmetric by construction.
    pub fn gram_mmt(&self) -> Sym3 {
        let mut upper = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                upper[i][j] = dot3(self.e[i], self.e[j]);
            }
        }
        Sym3::from_upper(upper)
    }
}

impl Sym3 {
    /// Builds from the upper triangle of `upper`; the strict lower
    /// triangle of the argument is ignored and mirrored over.
    pub fn from_upper(upper: [[f64; 3]; 3]) -> Self {
        let mut e = upper;
        for i in 0..3 {
            for j in 0..i {
                e[i][j] = e[j][i];
            }
        }
        Sym3 { e }
    }

    /// Diagonal matrix.
    pub fn diagonal(d: [f64; 3]) -> Self {
        let mut e = [[0.0; 3]; 3];
        for i in 0..3 {
            e[i][i] = d[i];
        }
        Sym3 { e }
    }

    /// Entry accessor.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.e[i][j]
    }

    /// Full row-major copy of the entries.
    pub fn entries(&self) -> [[f64; 3]; 3] {
        self.e
    }
}

/// σ_x, σ_y, σ_z for `i` = 0, 1, 2.
pub fn pauli(i: usize) -> CMat2 {
    let mut m = CMat2::zero();
    match i {
        0 => {
            m.e[0][1] = cr(1.0);
            m.e[1][0] = cr(1.0);
        }
        1 => {
            m.e[0][1] = c(0.0, -1.0);
            m.e[1][0] = c(0.0, 1.0);
        }
        2 => {
            m.e[0][0] = cr(1.0);
            m.e[1][1] = cr(-1.0);
        }
        _ => panic!("pauli index must be 0, 1, or 2"),
    }
    m
}

/// `r · σ`, the Pauli vector contracted with a real 3-vector.
pub fn sigma_axis(r: [f64; 3]) -> CMat2 {
    let mut m = CMat2::zero();
    m.e[0][0] = cr(r[2]);
    m.e[1][1] = cr(-r[2]);
    m.e[0][1] = c(r[0], -r[1]);
    m.e[1][0] = c(r[0], r[1]);
    m
}

/// Kronecker product; block `(i, j)` of the result is `a[i][j] · b`.
pub fn kron(a: &CMat2, b: &CMat2) -> CMat4 {
    let mut m = CMat4::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.e[2 * i + k][2 * j + l] = a.e[i][j] * b.e[k][l];
                }
            }
        }
    }
    m
}

/// Descending eigenvalues of a Hermitian 2×2 matrix, by closed form.
fn eigvals2_herm(m: &CMat2) -> (f64, f64) {
    let a = m.e[0][0].re;
    let d = m.e[1][1].re;
    let disc = ((a - d) * (a - d) + 4.0 * m.e[0][1].norm_sqr()).sqrt();
    (0.5 * (a + d + disc), 0.5 * (a + d - disc))
}

/// Descending eigensystem of a Hermitian 2×2 matrix. Eigenvectors are
/// unit-norm; of the two closed-form nullspace expressions the better
/// conditioned one is taken for each eigenvalue.
fn eig2_herm(m: &CMat2) -> ([f64; 2], [[Complex64; 2]; 2]) {
    let (mu0, mu1) = eigvals2_herm(m);
    let a = m.e[0][0].re;
    let d = m.e[1][1].re;
    let b = m.e[0][1];
    if b.norm() == 0.0 {
        // Already diagonal; order columns by eigenvalue.
        return if a >= d {
            ([mu0, mu1], [[cr(1.0), cr(0.0)], [cr(0.0), cr(1.0)]])
        } else {
            ([mu0, mu1], [[cr(0.0), cr(1.0)], [cr(1.0), cr(0.0)]])
        };
    }
    // (m - mu)v = 0 admits v ∝ (b, mu - a) and v ∝ (mu - d, b*);
    // pick the larger residual diagonal gap to avoid a degenerate row.
    let vec_for = |mu: f64| -> [Complex64; 2] {
        let (v0, v1) =
            if (mu - a).abs() >= (mu - d).abs() { (b, cr(mu - a)) } else { (cr(mu - d), b.conj()) };
        let n = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
        [v0 / n, v1 / n]
    };
    let v0 = vec_for(mu0);
    // Orthogonal complement of (x, y) in C^2 is (-y*, x*).
    let v1 = [-v0[1].conj(), v0[0].conj()];
    ([mu0, mu1], [v0, v1])
}

/// Principal square root of a Hermitian PSD 2×2 matrix.
///
/// Uses the Cayley-Hamilton closed form
/// `X = (m + sqrt(det m) I) / sqrt(tr m + 2 sqrt(det m))`, with the
/// determinant evaluated in the exactly-real Hermitian form; eigenvalues
/// in `[-1e-10, 0)` are treated as rounding and clamped to the PSD cone.
/// Falls back to an explicit eigendecomposition when the closed-form
/// denominator falls below `1e-12` (the near-zero matrix).
///
/// Errors with [`Error::NotPsd`] when an eigenvalue sits below `-1e-10`.
pub fn sqrt_psd2(m: &CMat2) -> Result<CMat2> {
    let (_, mu_min) = eigvals2_herm(m);
    if mu_min < -1e-10 {
        return Err(Error::NotPsd(mu_min));
    }
    let det = m.det_hermitian().max(0.0);
    let tr = m.trace().re;
    let den_sq = tr + 2.0 * det.sqrt();
    if den_sq < 1e-12 {
        // Near-zero matrix: the quotient form loses all precision, the
        // spectral form does not.
        let (mu, v) = eig2_herm(m);
        let mut x = CMat2::zero();
        for (k, vk) in v.iter().enumerate() {
            let s = mu[k].max(0.0).sqrt();
            for i in 0..2 {
                for j in 0..2 {
                    x.e[i][j] += vk[i] * vk[j].conj() * s;
                }
            }
        }
        return Ok(x);
    }
    let den = den_sq.sqrt();
    let mut x = m.scale(1.0 / den);
    let shift = det.sqrt() / den;
    x.e[0][0] += cr(shift);
    x.e[1][1] += cr(shift);
    Ok(x)
}

/// Moore-Penrose square-root inverse `m^{-1/2}` of a Hermitian PSD 2×2
/// matrix: eigenvalues below `1e-12` of the largest one are treated as
/// zero and excluded from inversion (mapped to 0).
///
/// Errors with [`Error::NotPsd`] when an eigenvalue sits below `-1e-10`.
pub fn pinv_sqrt2(m: &CMat2) -> Result<CMat2> {
    let (mu, v) = eig2_herm(m);
    if mu[1] < -1e-10 {
        return Err(Error::NotPsd(mu[1]));
    }
    let cutoff = 1e-12 * mu[0].max(0.0);
    let mut x = CMat2::zero();
    for (k, vk) in v.iter().enumerate() {
        if mu[k] <= cutoff || mu[k] <= 0.0 {
            continue;
        }
        let s = 1.0 / mu[k].sqrt();
        for i in 0..2 {
            for j in 0..2 {
                x.e[i][j] += vk[i] * vk[j].conj() * s;
            }
        }
    }
    Ok(x)
}

/// Orthogonal projector onto the support (range) of a Hermitian PSD 2×2
/// matrix, with the same `1e-12` relative rank cutoff as [`pinv_sqrt2`].
pub fn support_proj2(m: &CMat2) -> Result<CMat2> {
    let (mu, v) = eig2_herm(m);
    if mu[1] < -1e-10 {
        return Err(Error::NotPsd(mu[1]));
    }
    let cutoff = 1e-12 * mu[0].max(0.0);
    let mut p = CMat2::zero();
    for (k, vk) in v.iter().enumerate() {
        if mu[k] <= cutoff || mu[k] <= 0.0 {
            continue;
        }
        for i in 0..2 {
            for j in 0..2 {
                p.e[i][j] += vk[i] * vk[j].conj();
            }
        }
    }
    Ok(p)
}

/// One cyclic-Jacobi diagonalization pass over a real symmetric matrix.
/// Returns eigenvalues (unsorted) and the accumulated rotation, whose
/// column `k` is the eigenvector for eigenvalue `k`.
fn jacobi_sym<const N: usize>(mut a: [[f64; N]; N]) -> Result<([f64; N], [[f64; N]; N])> {
    let mut v = [[0.0; N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let fro = {
        let mut s = 0.0;
        for row in &a {
            for x in row {
                s += x * x;
            }
        }
        s.sqrt()
    };
    let tol = 1e-13 * fro.max(1.0);
    let off = |a: &[[f64; N]; N]| -> f64 {
        let mut s = 0.0;
        for p in 0..N {
            for q in (p + 1)..N {
                s += a[p][q] * a[p][q];
            }
        }
        (2.0 * s).sqrt()
    };
    for _sweep in 0..50 {
        if off(&a) <= tol {
            // Diagonal reached; columns of v are the eigenvectors.
            let mut values = [0.0; N];
            for (i, value) in values.iter_mut().enumerate() {
                *value = a[i][i];
            }
            return Ok((values, v));
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let cos = 1.0 / (t * t + 1.0).sqrt();
                let sin = t * cos;
                let tau = sin / (1.0 + cos);
                a[p][p] -= t * apq;
                a[q][q] += t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for r in 0..N {
                    if r != p && r != q {
                        let arp = a[r][p];
                        let arq = a[r][q];
                        a[r][p] = arp - sin * (arq + tau * arp);
                        a[p][r] = a[r][p];
                        a[r][q] = arq + sin * (arp - tau * arq);
                        a[q][r] = a[r][q];
                    }
                }
                for row in v.iter_mut() {
                    let vrp = row[p];
                    let vrq = row[q];
                    row[p] = vrp - sin * (vrq + tau * vrp);
                    row[q] = vrq + sin * (vrp - tau * vrq);
                }
            }
        }
    }
    Err(Error::NoConvergence(off(&a)))
}

/// Canonical replacement axes tried, in order, when an eigenspace leaves
/// a basis choice free: z first (the sharp arm in every strategy here),
/// then x, then y.
pub const CANONICAL_AXES: [[f64; 3]; 3] = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];

/// Descending eigensystem of a real symmetric 3×3 matrix by cyclic
/// Jacobi rotations (off-diagonal tolerance `1e-13`, at most 50 sweeps).
///
/// Degenerate eigenvalues (gap below `1e-10`) leave the eigenbasis of
/// their block arbitrary; to make the output deterministic, the block
/// basis is rebuilt by projecting the canonical axes `e_z, e_x, e_y` (in
/// that fixed order) onto the block and orthonormalizing. Finally every
/// eigenvector's sign is fixed: its first component larger than `1e-12`
/// in magnitude is made positive.
pub fn eig_sym3(s: &Sym3) -> Result<EigenBasis3> {
    let (raw_values, raw_vectors) = jacobi_sym::<3>(s.e)?;
    // Sort descending, carrying eigenvector columns along.
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| raw_values[j].partial_cmp(&raw_values[i]).unwrap());
    let mut values = [0.0; 3];
    let mut vectors = [[0.0; 3]; 3];
    for (slot, &src) in order.iter().enumerate() {
        values[slot] = raw_values[src];
        for r in 0..3 {
            vectors[slot][r] = raw_vectors[r][src];
        }
    }
    // Partition into degenerate blocks of adjacent eigenvalues.
    let mut start = 0;
    while start < 3 {
        let mut end = start + 1;
        while end < 3 && (values[end - 1] - values[end]).abs() < 1e-10 {
            end += 1;
        }
        if end - start > 1 {
            rebuild_degenerate_block(&mut vectors, start, end);
        }
        start = end;
    }
    for vec in vectors.iter_mut() {
        canonical_sign(vec);
    }
    Ok(EigenBasis3 { values, vectors })
}

/// Replaces `vectors[start..end]` (an orthonormal basis of a degenerate
/// eigenspace) by the projections of the canonical axes onto that space,
/// Gram-Schmidt orthonormalized in canonical order.
fn rebuild_degenerate_block(vectors: &mut [[f64; 3]; 3], start: usize, end: usize) {
    let dim = end - start;
    let block: Vec<[f64; 3]> = vectors[start..end].to_vec();
    let project = |x: [f64; 3]| -> [f64; 3] {
        let mut out = [0.0; 3];
        for b in &block {
            let w = dot3(*b, x);
            for r in 0..3 {
                out[r] += w * b[r];
            }
        }
        out
    };
    let mut rebuilt: Vec<[f64; 3]> = Vec::with_capacity(dim);
    for axis in CANONICAL_AXES {
        if rebuilt.len() == dim {
            break;
        }
        let mut u = project(axis);
        for prev in &rebuilt {
            let w = dot3(*prev, u);
            for r in 0..3 {
                u[r] -= w * prev[r];
            }
        }
        let n = norm3(u);
        if n > 1e-8 {
            rebuilt.push([u[0] / n, u[1] / n, u[2] / n]);
        }
    }
    // The canonical axes span R^3, so their projections span the block;
    // the loop above can only fall short through pathological rounding.
    debug_assert_eq!(rebuilt.len(), dim);
    for (k, u) in rebuilt.into_iter().enumerate() {
        vectors[start + k] = u;
    }
}

/// Flips `v` so its first component of magnitude above `1e-12` is positive.
fn canonical_sign(v: &mut [f64; 3]) {
    for x in *v {
        if x.abs() > 1e-12 {
            if x < 0.0 {
                for y in v.iter_mut() {
                    *y = -*y;
                }
            }
            return;
        }
    }
}

/// Smallest eigenvalue of a Hermitian 4×4 matrix.
///
/// The matrix `A + iB` is embedded as the real symmetric 8×8 block matrix
/// `[[A, -B], [B, A]]`, whose spectrum is that of the Hermitian matrix
/// with every eigenvalue doubled in multiplicity, and diagonalized with
/// the same cyclic Jacobi core as [`eig_sym3`].
pub fn min_eig_herm4(m: &CMat4) -> Result<f64> {
    let mut s = [[0.0; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            s[i][j] = m.e[i][j].re;
            s[i + 4][j + 4] = m.e[i][j].re;
            s[i][j + 4] = -m.e[i][j].im;
            s[i + 4][j] = m.e[i][j].im;
        }
    }
    let (values, _) = jacobi_sym::<8>(s)?;
    Ok(values.into_iter().fold(f64::INFINITY, f64::min))
}
