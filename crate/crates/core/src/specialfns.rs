//! Riemann and Hurwitz zeta functions at even integer order, Bernoulli
//! numbers, and exact factorial ratios.

use std::sync::OnceLock;

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::{round_to, BigReal, Precision};

/// Largest Bernoulli index kept in the exact table. The Euler–Maclaurin
/// tail of [`hurwitz_zeta`] uses up to `B_{2*MAX_EM_ORDER}`.
pub const BERNOULLI_MAX: usize = 160;
const MAX_EM_ORDER: usize = BERNOULLI_MAX / 2;

fn bernoulli_table() -> &'static [Rational] {
    static TABLE: OnceLock<Vec<Rational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // B_m = -1/(m+1) Σ_{j<m} C(m+1, j) B_j
        let mut b: Vec<Rational> = Vec::with_capacity(BERNOULLI_MAX + 1);
        b.push(Rational::from(1));
        for m in 1..=BERNOULLI_MAX {
            if m > 1 && m % 2 == 1 {
                b.push(Rational::new());
                continue;
            }
            let mut acc = Rational::new();
            let mut binom = Integer::from(1);
            for (j, bj) in b.iter().enumerate() {
                if *bj != 0 {
                    acc += Rational::from(bj * &binom);
                }
                binom *= (m + 1 - j) as u32;
                binom /= (j + 1) as u32;
            }
            b.push(-acc / (m as u32 + 1));
        }
        b
    })
}

/// Exact Bernoulli number `B_n` (with `B_1 = -1/2`).
pub fn bernoulli(n: usize) -> Result<Rational> {
    bernoulli_table().get(n).cloned().ok_or_else(|| {
        Error::InvalidArgument(format!("B_{n} exceeds the table (max {BERNOULLI_MAX})"))
    })
}

fn check_even_order(s: u32) -> Result<()> {
    if s < 2 || !s.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "zeta order must be an even integer >= 2, got {s}"
        )));
    }
    Ok(())
}

/// `ζ(s) = |B_s| (2π)^s / (2 s!)` for even `s >= 2`.
pub fn zeta_even(s: u32, prec: Precision) -> Result<BigReal> {
    check_even_order(s)?;
    let b = bernoulli(s as usize)?.abs();
    let wp = prec.plus(32);
    let two_pi = wp.pi() * 2u32;
    let mut value = Float::with_val(wp.bits(), rug::ops::Pow::pow(&two_pi, s));
    value *= wp.rational(&b);
    value /= Float::with_val(wp.bits(), Integer::from(Integer::factorial(s))) * 2u32;
    Ok(round_to(&value, prec))
}

/// Hurwitz zeta `ζ(s, a) = Σ_{n>=0} (n+a)^{-s}` for even `s >= 2`, `a > 0`.
///
/// The first `M` terms are summed directly and the remainder is taken from
/// the Euler–Maclaurin expansion at `x = a + M`, adding Bernoulli terms until
/// one drops below `2^-prec` of the running value. For real `s > 1` the
/// truncation error is bounded by the first omitted term. If the expansion
/// starts growing before it converges, `M` is doubled.
pub fn hurwitz_zeta(s: u32, shift: &Rational, prec: Precision) -> Result<BigReal> {
    check_even_order(s)?;
    if *shift <= 0 {
        return Err(Error::InvalidArgument(format!(
            "Hurwitz shift must be positive, got {shift}"
        )));
    }
    let wp = prec.plus(32);
    let bits = wp.bits();
    let a = wp.rational(shift);
    let eps = wp.epsilon();
    let mut direct_terms = usize::max(32, bits as usize / 2);

    loop {
        let mut sum = Float::new(bits);
        let mut base = Float::new(bits);
        let mut term = Float::new(bits);
        for n in 0..direct_terms {
            base.assign_sum(&a, n as u32);
            term.assign_pow_recip(&base, s);
            sum += &term;
        }

        // x = a + M
        let mut x = a.clone();
        x += direct_terms as u32;
        let x_inv = Float::with_val(bits, x.recip_ref());
        let x_inv2 = Float::with_val(bits, x_inv.square_ref());
        // x^{1-s}/(s-1) + x^{-s}/2
        let mut x_pow_neg_s = Float::new(bits);
        x_pow_neg_s.assign_pow_recip(&x, s);
        let mut tail = Float::with_val(bits, &x_pow_neg_s * &x) / (s - 1);
        tail += Float::with_val(bits, &x_pow_neg_s / 2u32);

        // Running factor (s)_{2j-1} x^{-s-2j+1} / (2j)!, starting at j = 1.
        let mut factor = Float::with_val(bits, &x_pow_neg_s * &x_inv) * s;
        factor /= 2u32;
        let mut previous = None::<Float>;
        let mut converged = false;
        for j in 1..=MAX_EM_ORDER {
            let b2j = bernoulli(2 * j)?;
            let correction = Float::with_val(bits, &factor * &b2j);
            let magnitude = Float::with_val(bits, correction.abs_ref());
            let total = Float::with_val(bits, &sum + &tail);
            if magnitude <= Float::with_val(bits, &eps * &total) {
                tail += &correction;
                converged = true;
                break;
            }
            if let Some(prev) = &previous {
                if magnitude >= *prev {
                    break;
                }
            }
            tail += &correction;
            previous = Some(magnitude);
            // (s)_{2j+1}/(s)_{2j-1} = (s+2j-1)(s+2j);  (2j)!/(2j+2)! = 1/((2j+1)(2j+2))
            let jj = 2 * j as u32;
            factor *= (s + jj - 1) * (s + jj);
            factor /= (jj + 1) * (jj + 2);
            factor *= &x_inv2;
        }
        if converged {
            sum += &tail;
            return Ok(round_to(&sum, prec));
        }
        direct_terms *= 2;
    }
}

trait PowRecip {
    fn assign_pow_recip(&mut self, base: &Float, s: u32);
    fn assign_sum(&mut self, a: &Float, n: u32);
}

impl PowRecip for Float {
    fn assign_pow_recip(&mut self, base: &Float, s: u32) {
        use rug::Assign;
        self.assign(rug::ops::Pow::pow(base, s));
        self.recip_mut();
    }

    fn assign_sum(&mut self, a: &Float, n: u32) {
        use rug::Assign;
        self.assign(a + n);
    }
}

/// `k! / (k-m)!` exactly.
pub fn descending_factorial(k: u32, m: u32) -> Result<Integer> {
    if m > k {
        return Err(Error::InvalidArgument(format!(
            "descending factorial needs m <= k, got k={k}, m={m}"
        )));
    }
    Ok(((k - m + 1)..=k).fold(Integer::from(1), |acc, i| acc * i))
}
