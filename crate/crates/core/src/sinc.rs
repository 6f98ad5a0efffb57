//! Sinc collocation on the uniform mesh `x_n = nh`, `n = -N..=N`.
//!
//! `N` counts mesh points per half-axis, so the mesh covers `[-Nh, Nh]` and
//! the optimal spacing `h_S` gives a half-width `N h_S = L_S`, the same length
//! that drives the trigonometric basis.
//!
//! The Hamiltonian is `-D² + diag V(x_n)` with the exact sinc
//! second-derivative matrix
//!
//! ```text
//! -D²_nn = π²/(3h²),   -D²_nm = 2(-1)^{n-m} / (h²(n-m)²)
//! ```
//!
//! For even potentials the mesh reflection `n → -n` commutes with the matrix,
//! which then splits into an even block of size N+1 and an odd block of size
//! N. Solving the two blocks is equivalent to solving the full matrix and is
//! roughly four times cheaper.

use rug::ops::Pow;
use rug::Float;

use crate::eigen::{jacobi_eigen, JacobiOptions, SymMatrix};
use crate::error::{Error, Result};
use crate::lengths::{schwartz_b, schwartz_spacing};
use crate::par::{self, Exec};
use crate::potentials::Potential;
use crate::precision::{pow_ratio, round_to, BigReal, Precision};
use crate::trigbasis::Parity;

/// `S_m(h, x) = sin(π(x - mh)/h) / (π(x - mh)/h)`, equal to 1 at `x = mh`.
pub fn sinc_eval(m: i64, h: &BigReal, x: &BigReal) -> BigReal {
    let bits = x.prec().max(h.prec());
    let mh = Float::with_val(bits, h * m);
    let t = Float::with_val(bits, x - &mh) / h * Float::with_val(bits, rug::float::Constant::Pi);
    if t.is_zero() {
        return Float::with_val(bits, 1);
    }
    Float::with_val(bits, t.sin_ref()) / t
}

/// Little sinc function `s_k(h, N, x)` on the box `[-L, L]`, `L = Nh/2`.
///
/// `N` must be even and `|k| <= N/2 - 1`. Inside the box the only removable
/// singularity is at `x = kh`, where the first ratio tends to `2N + 1`.
pub fn lsf_eval(k: i64, h: &BigReal, n: u32, x: &BigReal) -> Result<BigReal> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "LSF order N must be even and >= 2, got {n}"
        )));
    }
    if k.unsigned_abs() > (n / 2 - 1) as u64 {
        return Err(Error::InvalidArgument(format!(
            "LSF index |k| must be <= N/2 - 1 = {}, got {k}",
            n / 2 - 1
        )));
    }
    if *h <= 0 {
        return Err(Error::InvalidArgument(
            "mesh spacing h must be positive".into(),
        ));
    }
    let bits = x.prec().max(h.prec());
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let kh = Float::with_val(bits, h * k);
    let two_n = Float::with_val(bits, 2 * n);
    // (1 + 1/(2N)) π/h  and  π/(2Nh)
    let outer = Float::with_val(bits, &pi / h)
        * (Float::with_val(bits, 1) + Float::with_val(bits, two_n.recip_ref()));
    let inner = Float::with_val(bits, &pi / h) / &two_n;

    let minus = Float::with_val(bits, x - &kh);
    let first = if minus.is_zero() {
        Float::with_val(bits, 2 * n + 1)
    } else {
        let num = Float::with_val(bits, &outer * &minus).sin();
        num / Float::with_val(bits, &inner * &minus).sin()
    };
    let plus = Float::with_val(bits, x + &kh);
    let second =
        Float::with_val(bits, &outer * &plus).cos() / Float::with_val(bits, &inner * &plus).cos();
    Ok((first - second) / two_n)
}

/// `Σ_m ψ_m S_m(h, x)` with samples indexed from `-N` to `N`.
pub fn sinc_interpolate(samples: &[BigReal], h: &BigReal, x: &BigReal) -> Result<BigReal> {
    if samples.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(
            "sinc interpolation needs an odd number of samples (-N..=N)".into(),
        ));
    }
    let half = (samples.len() / 2) as i64;
    let mut acc = Float::new(x.prec());
    for (i, psi) in samples.iter().enumerate() {
        acc += sinc_eval(i as i64 - half, h, x) * psi;
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct MeshSpec {
    pub h: BigReal,
    /// Points per half-axis.
    pub n: usize,
}

impl MeshSpec {
    pub fn new(h: BigReal, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "sinc mesh needs N >= 2, got {n}"
            )));
        }
        if h <= 0 {
            return Err(Error::InvalidArgument(
                "mesh spacing h must be positive".into(),
            ));
        }
        Ok(MeshSpec { h, n })
    }

    /// Optimal spacing for the leading monomial `β x^k`, rescaled by
    /// `β^{-1/(k+2)}` like every other length.
    pub fn auto(pot: &Potential, n: usize, prec: Precision) -> Result<Self> {
        let mut h = schwartz_spacing(pot.leading_exponent(), n, prec)?;
        if *pot.leading_coefficient() != 1 {
            h *= pot.length_scale(prec);
        }
        MeshSpec::new(h, n)
    }

    pub fn half_width(&self) -> BigReal {
        Float::with_val(self.h.prec(), &self.h * self.n as u64)
    }

    pub fn point(&self, i: i64) -> BigReal {
        Float::with_val(self.h.prec(), &self.h * i)
    }
}

/// `-D²_nm` as a function of `d = n - m`.
fn kinetic(d: i64, h2: &Float, pi2_over_3: &Float) -> Float {
    let bits = h2.prec();
    if d == 0 {
        return Float::with_val(bits, pi2_over_3 / h2);
    }
    let sign: i32 = if d % 2 == 0 { 2 } else { -2 };
    Float::with_val(bits, sign) / (Float::with_val(bits, h2 * (d * d)))
}

struct Assembly {
    h2: Float,
    pi2_over_3: Float,
    diag_potential: Vec<Float>,
}

impl Assembly {
    fn new(pot: &Potential, mesh: &MeshSpec, prec: Precision) -> Self {
        let wp = prec.guarded();
        let h = round_to(&mesh.h, wp);
        let pi = wp.pi();
        let pi2_over_3 = Float::with_val(wp.bits(), pi.square_ref()) / 3u32;
        let diag_potential = (0..=mesh.n as i64)
            .map(|i| pot.evaluate(&Float::with_val(wp.bits(), &h * i)))
            .collect();
        Assembly {
            h2: Float::with_val(wp.bits(), h.square_ref()),
            pi2_over_3,
            diag_potential,
        }
    }

    fn full(&self, i: i64, j: i64) -> Float {
        let mut t = kinetic(i - j, &self.h2, &self.pi2_over_3);
        if i == j {
            t += &self.diag_potential[i.unsigned_abs() as usize];
        }
        t
    }
}

/// Full `(2N+1)×(2N+1)` collocation matrix, rows ordered `-N..=N`.
pub fn collocation_matrix(pot: &Potential, mesh: &MeshSpec, exec: Exec) -> SymMatrix {
    let prec = crate::precision::precision_of(&mesh.h);
    let asm = Assembly::new(pot, mesh, prec);
    let n = mesh.n as i64;
    SymMatrix::from_upper_fn(2 * mesh.n + 1, prec, exec, |i, j| {
        asm.full(i as i64 - n, j as i64 - n)
    })
}

/// Reflection-symmetric block. Even: basis `e_0`, `(e_i + e_{-i})/√2`,
/// `i = 1..=N`. Odd: `(e_i - e_{-i})/√2`, `i = 1..=N`.
pub fn collocation_block(
    pot: &Potential,
    mesh: &MeshSpec,
    parity: Parity,
    exec: Exec,
) -> SymMatrix {
    let prec = crate::precision::precision_of(&mesh.h);
    let asm = Assembly::new(pot, mesh, prec);
    let wp = prec.guarded();
    let sqrt2 = Float::with_val(wp.bits(), 2).sqrt();
    match parity {
        Parity::Even => SymMatrix::from_upper_fn(mesh.n + 1, prec, exec, |i, j| {
            let (i, j) = (i as i64, j as i64);
            match (i, j) {
                (0, 0) => asm.full(0, 0),
                (0, j) => asm.full(0, j) * &sqrt2,
                _ => asm.full(i, j) + asm.full(i, -j),
            }
        }),
        Parity::Odd => SymMatrix::from_upper_fn(mesh.n, prec, exec, |i, j| {
            let (i, j) = (i as i64 + 1, j as i64 + 1);
            asm.full(i, j) - asm.full(i, -j)
        }),
    }
}

#[derive(Clone, Debug)]
pub struct SincSolution {
    pub h: BigReal,
    pub n: usize,
    /// Ascending eigenvalues.
    pub values: Vec<BigReal>,
    pub sweeps: usize,
}

/// Eigenvalues of the collocation Hamiltonian. `parity = None` returns the
/// whole spectrum of the `2N+1` mesh.
pub fn collocation_solve(
    pot: &Potential,
    mesh: &MeshSpec,
    parity: Option<Parity>,
    exec: Exec,
) -> Result<SincSolution> {
    let opts = JacobiOptions::default();
    let sectors: Vec<Parity> = match parity {
        Some(p) => vec![p],
        None => vec![Parity::Even, Parity::Odd],
    };
    let solved = par::map_slice(exec, &sectors, |&p| {
        jacobi_eigen(&collocation_block(pot, mesh, p, Exec::Sequential), &opts)
    });
    let mut values = Vec::new();
    let mut sweeps = 0;
    for eig in solved {
        let eig = eig?;
        sweeps = sweeps.max(eig.sweeps);
        values.extend(eig.values);
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(SincSolution {
        h: mesh.h.clone(),
        n: mesh.n,
        values,
        sweeps,
    })
}

/// Heuristic error estimates for `x^k` on a mesh of half-width `Nh`.
#[derive(Clone, Debug)]
pub struct ErrorModel {
    /// `ε_T = exp(-a (Nh)^p)`, domain truncation.
    pub truncation: BigReal,
    /// `ε_A = exp(-b h^{-q})`, mesh resolution.
    pub approximation: BigReal,
}

/// Diagnostic only; these are asymptotic estimates, not bounds.
pub fn error_model(k: u32, n: usize, h: &BigReal) -> Result<ErrorModel> {
    let prec = crate::precision::precision_of(h);
    let b = schwartz_b(k, prec)?;
    let bits = prec.bits();
    let kk = k as i64;
    let a = Float::with_val(bits, 2) / (k + 2);
    let width = Float::with_val(bits, h * n as u64);
    let truncation = (-(a * pow_ratio(&width, kk + 2, 2))).exp();
    let approximation = (-(b * pow_ratio(h, -(kk + 2), kk))).exp();
    Ok(ErrorModel {
        truncation,
        approximation,
    })
}

/// `exp(-a x^p)` tail for a bound state: the harmonic ground state
/// `exp(-x²/2)` is the `k = 2` instance.
pub fn asymptotic_envelope(k: u32, x: &BigReal) -> BigReal {
    let bits = x.prec();
    let a = Float::with_val(bits, 2) / (k + 2);
    let xp = Float::with_val(bits, x.abs_ref()).pow(Float::with_val(bits, k + 2) / 2u32);
    (-(a * xp)).exp()
}
