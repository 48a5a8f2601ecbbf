// Copyright 2026 The lqrlr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Real Schur decomposition `A = Z·T·Zᵀ` by Householder reduction to
//! Hessenberg form followed by Francis double-shift QR (EISPACK `hqr2`
//! lineage, without the eigenvector back-substitution).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

/// Quasi-upper-triangular `t` with 1×1 blocks for real eigenvalues and 2×2
/// blocks (non-zero subdiagonal) for complex pairs; `z` orthogonal.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub t: Matrix,
    pub z: Matrix,
    pub eigenvalues: Vec<Eigenvalue>,
}

impl SchurForm {
    /// Diagonal blocks as `(start, size)` with size 1 or 2.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        diagonal_blocks(&self.t)
    }

    pub fn spectral_abscissa(&self) -> f64 {
        abscissa(&self.eigenvalues)
    }
}

pub(crate) fn diagonal_blocks(t: &Matrix) -> Vec<(usize, usize)> {
    let n = t.rows();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            blocks.push((i, 2));
            i += 2;
        } else {
            blocks.push((i, 1));
            i += 1;
        }
    }
    blocks
}

fn abscissa(eigs: &[Eigenvalue]) -> f64 {
    eigs.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max)
}

pub fn real_schur(a: &Matrix) -> Result<SchurForm> {
    decompose(a, true)
}

pub fn eigenvalues(a: &Matrix) -> Result<Vec<Eigenvalue>> {
    Ok(decompose(a, false)?.eigenvalues)
}

/// `max Re λ(M)`.
pub fn spectral_abscissa(a: &Matrix) -> Result<f64> {
    Ok(abscissa(&eigenvalues(a)?))
}

fn decompose(a: &Matrix, want_z: bool) -> Result<SchurForm> {
    assert!(a.is_square(), "Schur form of non-square matrix");
    let n = a.rows();
    if !a.is_finite() {
        return Err(Error::EigenConvergence { dim: n });
    }
    let mut h = a.clone();
    let mut z = Matrix::identity(n);
    if n == 0 {
        return Ok(SchurForm {
            t: h,
            z,
            eigenvalues: Vec::new(),
        });
    }
    hessenberg(&mut h, &mut z, want_z);
    let eigenvalues = francis_qr(&mut h, &mut z, want_z)?;
    Ok(SchurForm {
        t: h,
        z,
        eigenvalues,
    })
}

fn hessenberg(h: &mut Matrix, v: &mut Matrix, want_v: bool) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    let mut f = vec![0.0; n];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[(i, m - 1)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = libm::sqrt(hh);
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;
        // H = (I - u uᵀ/h) H (I - u uᵀ/h)
        let cols = h.cols();
        let data = h.as_mut_slice();
        f.iter_mut().for_each(|x| *x = 0.0);
        for i in m..=high {
            let oi = ort[i];
            let row = &data[i * cols..(i + 1) * cols];
            for (fj, &hij) in f[m..n].iter_mut().zip(&row[m..n]) {
                *fj += oi * hij;
            }
        }
        for i in m..=high {
            let oi = ort[i] / hh;
            let row = &mut data[i * cols..(i + 1) * cols];
            for (hij, &fj) in row[m..n].iter_mut().zip(&f[m..n]) {
                *hij -= fj * oi;
            }
        }
        for i in 0..=high {
            let row = &mut data[i * cols..(i + 1) * cols];
            let g = dot(&ort[m..=high], &row[m..=high]) / hh;
            for (hij, &oj) in row[m..=high].iter_mut().zip(&ort[m..=high]) {
                *hij -= g * oj;
            }
        }
        ort[m] *= scale;
        h[(m, m - 1)] = scale * g;
    }

    if want_v {
        for m in (1..high).rev() {
            if h[(m, m - 1)] == 0.0 {
                continue;
            }
            for i in (m + 1)..=high {
                ort[i] = h[(i, m - 1)];
            }
            let sub = h[(m, m - 1)];
            let cols = v.cols();
            let data = v.as_mut_slice();
            f.iter_mut().for_each(|x| *x = 0.0);
            for i in m..=high {
                let oi = ort[i];
                for (fj, &vij) in f[m..=high].iter_mut().zip(&data[i * cols + m..=i * cols + high]) {
                    *fj += oi * vij;
                }
            }
            for fj in &mut f[m..=high] {
                // Double division avoids possible underflow.
                *fj = (*fj / ort[m]) / sub;
            }
            for i in m..=high {
                let oi = ort[i];
                for (vij, &fj) in data[i * cols + m..=i * cols + high].iter_mut().zip(&f[m..=high]) {
                    *vij += fj * oi;
                }
            }
        }
    }
    // The Householder vectors were parked below the subdiagonal.
    for i in 2..n {
        for j in 0..(i - 1) {
            h[(i, j)] = 0.0;
        }
    }
}

const MAX_ITER_PER_EIGENVALUE: usize = 60;

#[allow(clippy::many_single_char_names, unused_assignments)]
fn francis_qr(h: &mut Matrix, v: &mut Matrix, want_v: bool) -> Result<Vec<Eigenvalue>> {
    let nn = h.rows();
    let mut eig = vec![Eigenvalue { re: 0.0, im: 0.0 }; nn];
    let low = 0usize;
    let high = nn - 1;
    let eps = f64::EPSILON;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut w, mut x, mut y);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }

    // `n` is signed: the active window shrinks past zero at the end.
    let mut n = nn as isize - 1;
    let mut iter = 0usize;
    while n >= low as isize {
        let nu = n as usize;
        let mut l = nu;
        while l > low {
            s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].abs() < eps * s {
                h[(l, l - 1)] = 0.0;
                break;
            }
            l -= 1;
        }

        if l == nu {
            h[(nu, nu)] += exshift;
            eig[nu] = Eigenvalue {
                re: h[(nu, nu)],
                im: 0.0,
            };
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) / 2.0;
            q = p * p + w;
            z = libm::sqrt(q.abs());
            h[(nu, nu)] += exshift;
            h[(nu - 1, nu - 1)] += exshift;
            x = h[(nu, nu)];
            if q >= 0.0 {
                // Real pair: rotate the block to upper triangular.
                z = if p >= 0.0 { p + z } else { p - z };
                let first = x + z;
                let second = if z != 0.0 { x - w / z } else { first };
                eig[nu - 1] = Eigenvalue { re: first, im: 0.0 };
                eig[nu] = Eigenvalue { re: second, im: 0.0 };
                x = h[(nu, nu - 1)];
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = libm::sqrt(p * p + q * q);
                p /= r;
                q /= r;
                for j in (nu - 1)..nn {
                    z = h[(nu - 1, j)];
                    h[(nu - 1, j)] = q * z + p * h[(nu, j)];
                    h[(nu, j)] = q * h[(nu, j)] - p * z;
                }
                for i in 0..=nu {
                    z = h[(i, nu - 1)];
                    h[(i, nu - 1)] = q * z + p * h[(i, nu)];
                    h[(i, nu)] = q * h[(i, nu)] - p * z;
                }
                if want_v {
                    for i in low..=high {
                        z = v[(i, nu - 1)];
                        v[(i, nu - 1)] = q * z + p * v[(i, nu)];
                        v[(i, nu)] = q * v[(i, nu)] - p * z;
                    }
                }
                h[(nu, nu - 1)] = 0.0;
            } else {
                eig[nu - 1] = Eigenvalue { re: x + p, im: z };
                eig[nu] = Eigenvalue { re: x + p, im: -z };
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[(nu, nu)];
            y = 0.0;
            w = 0.0;
            if l < nu {
                y = h[(nu - 1, nu - 1)];
                w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            }
            // Wilkinson's exceptional shift.
            if iter == 10 {
                exshift += x;
                for i in low..=nu {
                    h[(i, i)] -= x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            // MATLAB's exceptional shift.
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = libm::sqrt(s);
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=nu {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            if iter > MAX_ITER_PER_EIGENVALUE {
                return Err(Error::EigenConvergence { dim: nn });
            }

            // Look for two consecutive small subdiagonal elements.
            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[(m, m - 1)].abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nu {
                h[(i, i - 2)] = 0.0;
                if i > m + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }

            // Double QR step on rows l..=n and columns m..=n.
            for k in m..nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = libm::sqrt(p * p + q * q + r * r);
                if p < 0.0 {
                    s = -s;
                }
                if s == 0.0 {
                    continue;
                }
                if k != m {
                    h[(k, k - 1)] = -s * x;
                } else if l != m {
                    h[(k, k - 1)] = -h[(k, k - 1)];
                }
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;

                let hd = h.as_mut_slice();
                {
                    let (top, rest) = hd[k * nn..].split_at_mut(nn);
                    let (mid, rest) = rest.split_at_mut(nn);
                    if notlast {
                        let bottom = &mut rest[..nn];
                        for j in k..nn {
                            p = top[j] + q * mid[j] + r * bottom[j];
                            bottom[j] -= p * z;
                            top[j] -= p * x;
                            mid[j] -= p * y;
                        }
                    } else {
                        for j in k..nn {
                            p = top[j] + q * mid[j];
                            top[j] -= p * x;
                            mid[j] -= p * y;
                        }
                    }
                }
                for i in 0..=nu.min(k + 3) {
                    let row = &mut hd[i * nn + k..i * nn + nn];
                    column_reflect(row, notlast, x, y, z, q, r);
                }
                if want_v {
                    let vd = v.as_mut_slice();
                    for i in low..=high {
                        let row = &mut vd[i * nn + k..i * nn + nn];
                        column_reflect(row, notlast, x, y, z, q, r);
                    }
                }
            }
        }
    }
    // Bulge chasing can leave roundoff below the first subdiagonal.
    for i in 2..nn {
        for j in 0..(i - 1) {
            h[(i, j)] = 0.0;
        }
    }
    Ok(eig)
}

/// Applies the 3-element reflector to `row[0..3]` (or `row[0..2]`).
#[inline]
fn column_reflect(row: &mut [f64], notlast: bool, x: f64, y: f64, z: f64, q: f64, r: f64) {
    let mut p = x * row[0] + y * row[1];
    if notlast {
        p += z * row[2];
        row[2] -= p * r;
    }
    row[0] -= p;
    row[1] -= p * q;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_schur(a: &Matrix) -> SchurForm {
        let f = real_schur(a).unwrap();
        let recon = f.z.matmul(&f.t).matmul_tr(&f.z);
        assert!((&recon - a).frobenius_norm() <= 1e-12 * (1.0 + a.frobenius_norm()));
        let zz = f.z.tr_matmul(&f.z);
        assert!((&zz - &Matrix::identity(a.rows())).max_abs() < 1e-12);
        for (start, size) in f.blocks() {
            if size == 2 {
                assert!(f.eigenvalues[start].im != 0.0);
            }
        }
        f
    }

    #[test]
    fn scalar_and_empty() {
        assert_eq!(spectral_abscissa(&Matrix::from_rows(&[[-1.0]])).unwrap(), -1.0);
        assert_eq!(eigenvalues(&Matrix::zeros(0, 0)).unwrap(), []);
    }

    #[test]
    fn rotation_has_complex_pair() {
        let a = Matrix::from_rows(&[[0.0, -2.0], [2.0, 0.0]]);
        let f = check_schur(&a);
        assert_eq!(f.blocks(), [(0, 2)]);
        assert!(f.eigenvalues[0].re.abs() < 1e-15);
        assert!((f.eigenvalues[0].im.abs() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn companion_matrix_roots() {
        // Roots 1, 2, 3, 4: λ⁴ - 10λ³ + 35λ² - 50λ + 24.
        let a = Matrix::from_rows(&[
            [10.0, -35.0, 50.0, -24.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ]);
        let f = check_schur(&a);
        let mut re: Vec<f64> = f.eigenvalues.iter().map(|e| e.re).collect();
        re.sort_by(f64::total_cmp);
        for (got, want) in re.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((got - want).abs() < 1e-9, "{re:?}");
        }
    }

    #[test]
    fn mixed_blocks_reconstruct() {
        let a = Matrix::from_rows(&[
            [1.0, 2.0, 0.0, 3.0, -1.0],
            [-2.0, 1.0, 4.0, 0.0, 0.5],
            [0.0, 1.0, -1.0, 2.0, 0.0],
            [1.0, 0.0, 0.0, 0.5, 2.0],
            [0.3, -1.0, 2.0, 1.0, 0.0],
        ]);
        check_schur(&a);
    }
}
