//! Dense symmetric matrices in working precision and a cyclic Jacobi
//! eigensolver.
//!
//! Jacobi is slow compared to tridiagonal QR but it is simple to get right in
//! arbitrary-precision arithmetic and computes small eigenvalues to high
//! relative accuracy, which is what the error tables need. Matrices here
//! rarely exceed a hundred rows.

use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::precision::{to_decimal, BigReal, Precision};

/// Symmetric matrix storing only the upper triangle, row-packed.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    precision: Precision,
    upper: Vec<BigReal>,
}

#[inline]
fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl SymMatrix {
    pub fn zeros(n: usize, precision: Precision) -> Self {
        Self {
            n,
            precision,
            upper: vec![precision.zero(); n * (n + 1) / 2],
        }
    }

    /// Builds the matrix from `entry(i, j)` evaluated for `i <= j` only.
    /// Rows are distributed over `exec`; each entry is a pure function of its
    /// indices, so the result does not depend on the schedule.
    pub fn from_upper_fn<F>(n: usize, precision: Precision, exec: Exec, entry: F) -> Self
    where
        F: Fn(usize, usize) -> BigReal + Sync + Send,
    {
        let rows = par::map_range(exec, n, |i| {
            (i..n)
                .map(|j| crate::precision::round_to(&entry(i, j), precision))
                .collect::<Vec<_>>()
        });
        Self {
            n,
            precision,
            upper: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>], precision: Precision) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self::from_upper_fn(
            n,
            precision,
            Exec::Sequential,
            |i, j| precision.from_f64(rows[i][j]),
        ))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn get(&self, i: usize, j: usize) -> &BigReal {
        &self.upper[packed_index(self.n, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigReal) {
        let idx = packed_index(self.n, i, j);
        self.upper[idx] = crate::precision::round_to(&value, self.precision);
    }

    pub fn trace(&self) -> BigReal {
        let mut t = self.precision.zero();
        for i in 0..self.n {
            t += self.get(i, i);
        }
        t
    }

    pub fn frobenius_norm(&self) -> BigReal {
        let bits = self.precision.bits();
        let mut acc = Float::new(bits);
        for i in 0..self.n {
            for j in i..self.n {
                let sq = Float::with_val(bits, self.get(i, j).square_ref());
                if i == j {
                    acc += sq;
                } else {
                    acc += sq * 2u32;
                }
            }
        }
        acc.sqrt()
    }

    /// Matrix-vector product `M v`.
    pub fn mul_vec(&self, v: &[BigReal]) -> Vec<BigReal> {
        let bits = self.precision.bits();
        (0..self.n)
            .map(|i| {
                let mut acc = Float::new(bits);
                for (j, vj) in v.iter().enumerate() {
                    acc += Float::with_val(bits, self.get(i, j) * vj);
                }
                acc
            })
            .collect()
    }

    /// Plain-text dump, one row per line, full-precision decimal strings.
    pub fn write_rows<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| to_decimal(self.get(i, j))).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct JacobiOptions {
    /// Relative stopping tolerance on the off-diagonal Frobenius norm.
    /// Defaults to `2^(16 - precision)`.
    pub tol: Option<BigReal>,
    pub max_sweeps: usize,
    pub vectors: bool,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        Self {
            tol: None,
            max_sweeps: 100,
            vectors: false,
        }
    }
}

impl JacobiOptions {
    pub fn with_vectors() -> Self {
        Self {
            vectors: true,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<BigReal>,
    /// `vectors[j]` is the unit eigenvector of `values[j]`.
    pub vectors: Option<Vec<Vec<BigReal>>>,
    pub sweeps: usize,
}

/// Default relative tolerance `2^(16 - bits)`.
pub fn default_tolerance(prec: Precision) -> BigReal {
    prec.epsilon() * 65536u32
}

/// Cyclic-by-row Jacobi rotations until the off-diagonal norm drops below
/// `tol * ||M||_F`.
pub fn jacobi_eigen(m: &SymMatrix, opts: &JacobiOptions) -> Result<Eigen> {
    let n = m.n;
    let prec = m.precision;
    let bits = prec.bits();
    let tol = opts.tol.clone().unwrap_or_else(|| default_tolerance(prec));
    if tol <= 0 {
        return Err(Error::InvalidArgument(
            "jacobi tolerance must be positive".into(),
        ));
    }
    let norm = m.frobenius_norm();
    let threshold = Float::with_val(bits, &tol * &norm);
    let eps = prec.epsilon();

    // Dense square storage; only entries with i <= j are read or written.
    let mut a: Vec<Float> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push(if i <= j {
                m.get(i, j).clone()
            } else {
                Float::new(bits)
            });
        }
    }
    let at = |i: usize, j: usize| if i <= j { i * n + j } else { j * n + i };
    let mut v: Option<Vec<Float>> = opts.vectors.then(|| {
        (0..n * n)
            .map(|idx| Float::with_val(bits, u32::from(idx / n == idx % n)))
            .collect()
    });

    let mut theta = Float::new(bits);
    let mut t = Float::new(bits);
    let mut c = Float::new(bits);
    let mut s = Float::new(bits);
    let mut tau = Float::new(bits);
    let mut h = Float::new(bits);
    let mut t1 = Float::new(bits);
    let mut t2 = Float::new(bits);
    let mut off = Float::new(bits);
    let mut tmp = Float::new(bits);

    let off_norm = |a: &[Float], off: &mut Float, tmp: &mut Float| {
        off.assign(0);
        for i in 0..n {
            for j in (i + 1)..n {
                tmp.assign(a[i * n + j].square_ref());
                *off += &*tmp;
            }
        }
        *off *= 2u32;
        off.sqrt_mut();
    };

    for sweep in 0..=opts.max_sweeps {
        off_norm(&a, &mut off, &mut tmp);
        if off <= threshold {
            return Ok(finish(a, v, n, sweep));
        }
        if sweep == opts.max_sweeps {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = at(p, q);
                if a[apq].is_zero() {
                    continue;
                }
                // Drop elements that can no longer change either diagonal entry.
                tmp.assign(a[apq].abs_ref());
                t1.assign(a[p * n + p].abs_ref());
                t1 *= &eps;
                t2.assign(a[q * n + q].abs_ref());
                t2 *= &eps;
                if sweep > 3 && tmp < t1 && tmp < t2 {
                    a[apq].assign(0);
                    continue;
                }

                // theta = (a_qq - a_pp) / (2 a_pq)
                theta.assign(&a[q * n + q] - &a[p * n + p]);
                t1.assign(&a[apq] * 2u32);
                theta /= &t1;
                // t = sgn(theta) / (|theta| + sqrt(theta^2 + 1))
                t.assign(theta.square_ref());
                t += 1u32;
                t.sqrt_mut();
                t1.assign(theta.abs_ref());
                t += &t1;
                t.recip_mut();
                if theta.is_sign_negative() {
                    t.neg_assign();
                }
                // c = 1/sqrt(t^2 + 1), s = t c, tau = s / (1 + c)
                c.assign(t.square_ref());
                c += 1u32;
                c.sqrt_mut();
                c.recip_mut();
                s.assign(&t * &c);
                tau.assign(&c + 1u32);
                tau.recip_mut();
                tau *= &s;

                h.assign(&t * &a[apq]);
                a[p * n + p] -= &h;
                a[q * n + q] += &h;
                a[apq].assign(0);

                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let (rp, rq) = (at(r, p), at(r, q));
                    rotate_pair(&mut a, rp, rq, &s, &tau, &mut t1, &mut t2);
                }
                if let Some(v) = v.as_mut() {
                    for r in 0..n {
                        rotate_pair(v, r * n + p, r * n + q, &s, &tau, &mut t1, &mut t2);
                    }
                }
            }
        }
    }
    off_norm(&a, &mut off, &mut tmp);
    Err(Error::NoConvergence {
        sweeps: opts.max_sweeps,
        residual: crate::precision::to_sci(&Float::with_val(bits, &off / &norm), 6),
    })
}

/// g' = g - s (h + g tau),  h' = h + s (g - h tau)
#[inline]
fn rotate_pair(
    a: &mut [Float],
    ig: usize,
    ih: usize,
    s: &Float,
    tau: &Float,
    t1: &mut Float,
    t2: &mut Float,
) {
    t1.assign(&a[ig] * tau);
    *t1 += &a[ih];
    *t1 *= s;
    t2.assign(&a[ih] * tau);
    rug::ops::SubFrom::sub_from(&mut *t2, &a[ig]);
    *t2 *= s;
    a[ig] -= &*t1;
    a[ih] += &*t2;
}

trait NegAssign {
    fn neg_assign(&mut self);
}

impl NegAssign for Float {
    fn neg_assign(&mut self) {
        rug::ops::NegAssign::neg_assign(self);
    }
}

fn finish(a: Vec<Float>, v: Option<Vec<Float>>, n: usize, sweeps: usize) -> Eigen {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].partial_cmp(&a[j * n + j]).unwrap());
    let values = order.iter().map(|&i| a[i * n + i].clone()).collect();
    let vectors = v.map(|v| {
        order
            .iter()
            .map(|&col| (0..n).map(|r| v[r * n + col].clone()).collect())
            .collect()
    });
    Eigen {
        values,
        vectors,
        sweeps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prec() -> Precision {
        Precision::new(128).unwrap()
    }

    fn close(a: &BigReal, b: &BigReal, tol: f64) -> bool {
        (a.clone() - b).abs().to_f64() <= tol * b.to_f64().abs().max(1.0)
    }

    #[test]
    fn packed_layout() {
        let mut m = SymMatrix::zeros(3, prec());
        m.set(0, 2, prec().int(5));
        m.set(2, 1, prec().int(7));
        assert_eq!(*m.get(2, 0), 5);
        assert_eq!(*m.get(1, 2), 7);
        assert_eq!(m.trace(), 0);
    }

    #[test]
    fn two_by_two() {
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]], prec()).unwrap();
        let e = jacobi_eigen(&m, &JacobiOptions::default()).unwrap();
        assert!(close(&e.values[0], &prec().int(1), 1e-35));
        assert!(close(&e.values[1], &prec().int(3), 1e-35));
    }

    #[test]
    fn diagonal_is_fixed_point() {
        let m = SymMatrix::from_rows(
            &[
                vec![3.0, 0.0, 0.0],
                vec![0.0, -1.0, 0.0],
                vec![0.0, 0.0, 2.0],
            ],
            prec(),
        )
        .unwrap();
        let e = jacobi_eigen(&m, &JacobiOptions::default()).unwrap();
        assert_eq!(e.sweeps, 0);
        assert_eq!(e.values, vec![prec().int(-1), prec().int(2), prec().int(3)]);
    }

    #[test]
    fn tridiagonal_three() {
        // characteristic polynomial (2-λ)((2-λ)² - 2) => 2-√2, 2, 2+√2
        let m = SymMatrix::from_rows(
            &[
                vec![2.0, -1.0, 0.0],
                vec![-1.0, 2.0, -1.0],
                vec![0.0, -1.0, 2.0],
            ],
            prec(),
        )
        .unwrap();
        let e = jacobi_eigen(&m, &JacobiOptions::with_vectors()).unwrap();
        let sqrt2 = prec().int(2).sqrt();
        let expect = [
            prec().int(2) - sqrt2.clone(),
            prec().int(2),
            prec().int(2) + sqrt2,
        ];
        for (got, want) in e.values.iter().zip(&expect) {
            assert!(close(got, want, 1e-35), "{got} vs {want}");
        }
        let vecs = e.vectors.unwrap();
        for (lambda, v) in e.values.iter().zip(&vecs) {
            let mv = m.mul_vec(v);
            for (x, y) in mv.iter().zip(v) {
                let r = x.clone() - Float::with_val(128, lambda * y);
                assert!(r.abs().to_f64() < 1e-33);
            }
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let m = SymMatrix::from_rows(
            &[
                vec![1.0, 0.5, 0.2],
                vec![0.5, 2.0, 0.3],
                vec![0.2, 0.3, 3.0],
            ],
            prec(),
        )
        .unwrap();
        let opts = JacobiOptions {
            max_sweeps: 1,
            ..JacobiOptions::default()
        };
        match jacobi_eigen(&m, &opts) {
            Err(Error::NoConvergence { sweeps, .. }) => assert_eq!(sweeps, 1),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn empty_and_single() {
        let e = jacobi_eigen(&SymMatrix::zeros(0, prec()), &JacobiOptions::default()).unwrap();
        assert!(e.values.is_empty());
        let m = SymMatrix::from_rows(&[vec![4.5]], prec()).unwrap();
        let e = jacobi_eigen(&m, &JacobiOptions::with_vectors()).unwrap();
        assert_eq!(e.values[0], 4.5);
        assert_eq!(e.vectors.unwrap()[0][0], 1);
    }
}
