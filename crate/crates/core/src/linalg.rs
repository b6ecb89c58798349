//! Dense complex linear algebra over the truncated Fock space.
//!
//! The matrices in this crate are tiny (at most D^2 x D^2 with D <= 16), so
//! everything here is a straightforward dense implementation: partial-pivot
//! LU, scaling-and-squaring Pade matrix exponential, and a Jacobi eigensolver
//! for Hermitian matrices via the real symmetric embedding.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::scalar::{re, Real, C};

pub fn identity<T: Real>(dim: usize) -> Array2<C<T>> {
    Array2::from_diag_elem(dim, re(T::one()))
}

/// Conjugate transpose.
pub fn dagger<T: Real>(a: &ArrayView2<C<T>>) -> Array2<C<T>> {
    a.t().mapv(|z| z.conj())
}

/// Max elementwise |a - a†|.
pub fn hermiticity_deviation<T: Real>(a: &ArrayView2<C<T>>) -> T {
    let mut dev = T::zero();
    let n = a.nrows();
    for i in 0..n {
        for j in 0..n {
            let d = (a[[i, j]] - a[[j, i]].conj()).norm();
            if d > dev {
                dev = d;
            }
        }
    }
    dev
}

pub fn trace<T: Real>(a: &ArrayView2<C<T>>) -> C<T> {
    a.diag().iter().copied().sum()
}

pub fn frobenius_norm<T: Real>(a: &ArrayView2<C<T>>) -> T {
    a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Maximum absolute column sum.
fn norm_1<T: Real>(a: &ArrayView2<C<T>>) -> T {
    let mut best = T::zero();
    for col in a.columns() {
        let s = col.iter().map(|z| z.norm()).sum::<T>();
        if s > best {
            best = s;
        }
    }
    best
}

/// Kronecker product (row-major convention: `(A⊗B)[(i*p+k),(j*q+l)] = A[i,j] B[k,l]`).
pub fn kron<T: Real>(a: &ArrayView2<C<T>>, b: &ArrayView2<C<T>>) -> Array2<C<T>> {
    let (m, n) = a.dim();
    let (p, q) = b.dim();
    let mut out = Array2::zeros((m * p, n * q));
    for i in 0..m {
        for j in 0..n {
            let aij = a[[i, j]];
            for k in 0..p {
                for l in 0..q {
                    out[[i * p + k, j * q + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Partial-pivot LU factorization of a square complex matrix.
pub struct LuFactor<T: Real> {
    lu: Array2<C<T>>,
    perm: Vec<usize>,
}

impl<T: Real> LuFactor<T> {
    pub fn new(a: &ArrayView2<C<T>>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: a.ncols(),
            });
        }
        let mut lu = a.to_owned();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = norm_1(&lu.view()).max(T::one());
        let tiny = T::epsilon() * scale * T::of(n as f64);
        for k in 0..n {
            let mut p = k;
            let mut best = lu[[k, k]].norm();
            for i in (k + 1)..n {
                let v = lu[[i, k]].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= tiny {
                return Err(Error::SingularMatrix { pivot: k });
            }
            if p != k {
                perm.swap(k, p);
                for j in 0..n {
                    let tmp = lu[[k, j]];
                    lu[[k, j]] = lu[[p, j]];
                    lu[[p, j]] = tmp;
                }
            }
            let pivot = lu[[k, k]];
            for i in (k + 1)..n {
                let f = lu[[i, k]] / pivot;
                lu[[i, k]] = f;
                for j in (k + 1)..n {
                    let lkj = lu[[k, j]];
                    lu[[i, j]] = lu[[i, j]] - f * lkj;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve_vec(&self, b: &ArrayView1<C<T>>) -> Array1<C<T>> {
        let n = self.perm.len();
        let mut x = Array1::zeros(n);
        for i in 0..n {
            x[i] = b[self.perm[i]];
        }
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc = acc - self.lu[[i, j]] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc = acc - self.lu[[i, j]] * x[j];
            }
            x[i] = acc / self.lu[[i, i]];
        }
        x
    }

    pub fn solve_mat(&self, b: &ArrayView2<C<T>>) -> Array2<C<T>> {
        let n = self.perm.len();
        let m = b.ncols();
        let mut out = Array2::zeros((n, m));
        for j in 0..m {
            let col = self.solve_vec(&b.column(j));
            out.column_mut(j).assign(&col);
        }
        out
    }
}

/// Solve `a x = b` for a single right-hand side.
pub fn lu_solve<T: Real>(a: &ArrayView2<C<T>>, b: &ArrayView1<C<T>>) -> Result<Array1<C<T>>> {
    Ok(LuFactor::new(a)?.solve_vec(b))
}

/// Matrix exponential by scaling-and-squaring with a [6/6] Pade approximant.
pub fn expm<T: Real>(a: &ArrayView2<C<T>>) -> Array2<C<T>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    let theta = T::of(0.25);
    let norm = norm_1(a);
    let mut s: i32 = 0;
    if norm > theta {
        s = (norm / theta).log2().ceil().to_i32().unwrap_or(0).max(0);
    }
    let scale = re(T::of(0.5).powi(s));
    let a_s = a.mapv(|z| z * scale);

    // Pade [6/6]: c_0 = 1, c_{k+1} = c_k (6-k) / ((12-k)(k+1))
    let mut c = [T::zero(); 7];
    c[0] = T::one();
    for k in 0..6 {
        c[k + 1] = c[k] * T::of((6 - k) as f64) / T::of(((12 - k) * (k + 1)) as f64);
    }

    let a2 = a_s.dot(&a_s);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let eye = identity::<T>(n);
    // even part V = c0 I + c2 A² + c4 A⁴ + c6 A⁶, odd part U = A (c1 I + c3 A² + c5 A⁴)
    let v = eye.mapv(|z| z * re(c[0]))
        + a2.mapv(|z| z * re(c[2]))
        + a4.mapv(|z| z * re(c[4]))
        + a6.mapv(|z| z * re(c[6]));
    let u_inner =
        eye.mapv(|z| z * re(c[1])) + a2.mapv(|z| z * re(c[3])) + a4.mapv(|z| z * re(c[5]));
    let u = a_s.dot(&u_inner);

    let num = &v + &u;
    let den = &v - &u;
    let lu = LuFactor::new(&den.view()).expect("Pade denominator is singular");
    let mut f = lu.solve_mat(&num.view());
    for _ in 0..s {
        f = f.dot(&f);
    }
    f
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Uses the real symmetric embedding `[[B, -C], [C, B]]` of `A = B + iC`,
/// whose spectrum is that of `A` with every eigenvalue doubled, and a cyclic
/// Jacobi sweep on the embedded matrix.
pub fn hermitian_eigenvalues<T: Real>(a: &ArrayView2<C<T>>) -> Vec<T> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigenvalues require a square matrix");
    let m = 2 * n;
    let mut s = vec![T::zero(); m * m];
    for i in 0..n {
        for j in 0..n {
            let z = (a[[i, j]] + a[[j, i]].conj()) * re(T::of(0.5));
            s[i * m + j] = z.re;
            s[(i + n) * m + (j + n)] = z.re;
            s[(i + n) * m + j] = z.im;
            s[i * m + (j + n)] = -z.im;
        }
    }
    jacobi_symmetric(&mut s, m);
    let mut eig: Vec<T> = (0..m).map(|i| s[i * m + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("NaN eigenvalue"));
    eig.into_iter().step_by(2).collect()
}

/// Cyclic Jacobi diagonalization of a real symmetric matrix in place.
fn jacobi_symmetric<T: Real>(s: &mut [T], n: usize) {
    let max_sweeps = 50;
    for _ in 0..max_sweeps {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += s[p * n + q] * s[p * n + q];
            }
        }
        let scale = (0..n)
            .map(|i| s[i * n + i].abs())
            .fold(T::one(), |a, b| a.max(b));
        if off.sqrt() <= T::epsilon() * scale * T::of(n as f64) {
            return;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = s[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = s[p * n + p];
                let aqq = s[q * n + q];
                let tau = (aqq - app) / (T::of(2.0) * apq);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let skp = s[k * n + p];
                    let skq = s[k * n + q];
                    s[k * n + p] = c * skp - sn * skq;
                    s[k * n + q] = sn * skp + c * skq;
                }
                for k in 0..n {
                    let spk = s[p * n + k];
                    let sqk = s[q * n + k];
                    s[p * n + k] = c * spk - sn * sqk;
                    s[q * n + k] = sn * spk + c * sqk;
                }
            }
        }
    }
}
