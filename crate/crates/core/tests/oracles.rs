//! Library results checked against independent computations: closed forms,
//! brute-force sums, quadrature and other bases.

mod common;

use optbasis::eigen::{jacobi_eigen, JacobiOptions};
use optbasis::hobasis::{self, HoBasisSpec};
use optbasis::lengths::{length_for_rule, LengthRule};
use optbasis::potentials::sextic_qes_ground;
use optbasis::sinc::{collocation_solve, MeshSpec};
use optbasis::specialfns::{hurwitz_zeta, zeta_even};
use optbasis::trigbasis::{d_coefficient, Parity};
use optbasis::{solve, Exec, Potential, Problem, Sector};
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

use common::{cosine_moment_quadrature, prec};

fn rel(a: &Float, b: &Float) -> f64 {
    (Float::with_val(a.prec(), a - b) / b).abs().to_f64()
}

#[test]
fn quadratic_moments_have_closed_form() {
    // (1/π) ∫_0^π x² cos(sx) dx = 2(-1)^s / s² for s >= 1.
    let p = prec(128);
    for s in 1..60u32 {
        let got = d_coefficient(2, s, p).unwrap();
        let sign = if s % 2 == 0 { 2 } else { -2 };
        let want = Float::with_val(128, sign) / (s * s);
        assert!(rel(&got, &want) < 1e-35, "s={s}");
    }
    let d0 = d_coefficient(6, 0, p).unwrap();
    let want = Float::with_val(128, Constant::Pi).pow(6u32) / 7u32;
    assert!(rel(&d0, &want) < 1e-35);
}

#[test]
fn riemann_values_at_small_even_orders() {
    let p = prec(200);
    let pi = Float::with_val(200, Constant::Pi);
    let z2 = Float::with_val(200, pi.clone().pow(2u32)) / 6u32;
    let z4 = Float::with_val(200, pi.clone().pow(4u32)) / 90u32;
    let z6 = Float::with_val(200, pi.pow(6u32)) / 945u32;
    assert!(rel(&zeta_even(2, p).unwrap(), &z2) < 1e-55);
    assert!(rel(&zeta_even(4, p).unwrap(), &z4) < 1e-55);
    assert!(rel(&zeta_even(6, p).unwrap(), &z6) < 1e-55);
}

#[test]
fn hurwitz_matches_brute_force_sum() {
    // Direct sum of 4000 terms plus three Euler-Maclaurin tail terms; the
    // neglected remainder is of order s³ (a+M)^{-s-3}/720.
    let p = prec(128);
    for s in [4u32, 6, 10, 20] {
        for (num, den) in [(1u32, 2u32), (3, 2), (7, 2), (11, 1), (61, 2)] {
            let a = Float::with_val(128, num) / den;
            let m = 4000u32;
            let mut sum = Float::new(128);
            for j in 0..m {
                sum += Float::with_val(128, &a + j).pow(s).recip();
            }
            let end = Float::with_val(128, &a + m);
            sum += Float::with_val(128, end.clone().pow(s - 1)).recip() / (s - 1);
            sum += Float::with_val(128, end.clone().pow(s)).recip() / 2u32;
            sum += Float::with_val(128, end.pow(s + 1)).recip() * s / 12u32;
            let got = hurwitz_zeta(s, &Rational::from((num, den)), p).unwrap();
            assert!(rel(&got, &sum) < 1e-20, "s={s} a={num}/{den}");
        }
    }
}

#[test]
fn one_function_energy_matches_quadrature() {
    // With N=1 the even block is the single number π²/(4L²) + (L/π)^k (D_1 + D_0).
    let p = prec(128);
    for k in [2u32, 4, 6, 8] {
        let l = length_for_rule(LengthRule::Op2, k, 1, p)
            .unwrap()
            .length
            .to_f64();
        let pi = std::f64::consts::PI;
        let want = pi * pi / (4.0 * l * l)
            + (l / pi).powi(k as i32)
                * (cosine_moment_quadrature(k, 1) + cosine_moment_quadrature(k, 0));
        let report = solve(
            &Problem::trig(Potential::monomial(k).unwrap(), 1, LengthRule::Op2, p)
                .sector(Sector::Even),
        )
        .unwrap();
        let got = report.level(0).unwrap().to_f64();
        assert!((got - want).abs() < 1e-11 * want, "k={k}: {got} vs {want}");
    }
}

#[test]
fn harmonic_spectrum_is_odd_integers() {
    let p = prec(256);
    let report = solve(&Problem::trig(
        Potential::monomial(2).unwrap(),
        30,
        LengthRule::Schwartz,
        p,
    ))
    .unwrap();
    for level in 0..6 {
        let e = report.level(level).unwrap();
        let want = Float::with_val(256, 2 * level as u32 + 1);
        assert!(rel(e, &want) < 1e-30, "level {level}: {e}");
    }
}

#[test]
fn sextic_closed_form_ground_state() {
    let p = prec(128);
    let r = |v: i32| Rational::from(v);
    let g = sextic_qes_ground(&r(-2), &r(2), &r(1), p).unwrap();
    assert_eq!(g.energy, 1);
    assert_eq!(g.b2, -1);
    assert_eq!(g.b4, 1);
    assert!(sextic_qes_ground(&r(0), &r(2), &r(1), p).is_none());
}

#[test]
fn one_level_frequencies_are_cube_roots() {
    let p = prec(128);
    let zero = Rational::new();
    let one = Rational::from(1);
    let pms = hobasis::pms_frequency(&zero, &one, 1, p).unwrap();
    let op = hobasis::op_frequency(&zero, &one, 1, p).unwrap();
    assert!(rel(&pms, &Float::with_val(128, 9).cbrt()) < 1e-36);
    assert!(rel(&op, &Float::with_val(128, 6).cbrt()) < 1e-36);
}

#[test]
fn three_bases_agree_on_the_quartic_at_moderate_size() {
    let p = prec(128);
    let pot = Potential::monomial(4).unwrap();
    let trig =
        solve(&Problem::trig(pot.clone(), 10, LengthRule::Op2, p).sector(Sector::Even)).unwrap();
    let trig = trig.level(0).unwrap();

    let mesh = MeshSpec::auto(&pot, 20, p).unwrap();
    let sinc = &collocation_solve(&pot, &mesh, Some(Parity::Even), Exec::Sequential)
        .unwrap()
        .values[0];

    let (w2, lam) = (Rational::new(), Rational::from(1));
    let omega = hobasis::pms_frequency(&w2, &lam, 10, p).unwrap();
    let spec = HoBasisSpec::new(omega, 10, w2.clone(), lam.clone()).unwrap();
    let raw = &jacobi_eigen(
        &hobasis::assemble_ho(&spec, Parity::Even, Exec::Sequential),
        &JacobiOptions::default(),
    )
    .unwrap()
    .values[0];
    let ho = hobasis::to_unit_convention(raw, &w2, &lam);

    assert!(rel(trig, sinc) < 1e-10, "trig {trig} sinc {sinc}");
    assert!(rel(trig, &ho) < 1e-10, "trig {trig} ho {ho}");
}

#[test]
fn oscillator_basis_reproduces_its_own_oscillator() {
    let w2 = Rational::from(2);
    let lam = Rational::from((1, 1_000_000_000));
    let omega = Float::with_val(128, 2).sqrt();
    let spec = HoBasisSpec::new(omega, 8, w2, lam).unwrap();
    let e = jacobi_eigen(
        &hobasis::assemble_ho(&spec, Parity::Even, Exec::Sequential),
        &JacobiOptions::default(),
    )
    .unwrap();
    let want = Float::with_val(128, 2).sqrt() / 2u32;
    assert!(rel(&e.values[0], &want) < 1e-8);
}
