//! Exact slope theory for norms over discretely valued fields.
//!
//! Norm values are kept as rational exponents of the base `q` of the
//! valuation (`p` for the `p`-adic rationals, `e` for `Q(T)`), and `ln q`
//! is applied only when reporting real numbers.
//!
//! Every [`UltraNormExpr`] reduces exactly to a [`DiagonalNorm`], and any two
//! diagonal norms admit a common orthogonal basis, so orthogonality constants,
//! slopes and degrees are all computed without error.

mod expr;
pub mod field;
pub mod matrix;
mod norm;
mod ops;

pub use expr::UltraNormExpr;
pub use field::{PAdic, Poly, RatFunc, TAdic, ValuedField};
pub use matrix::Mat;
pub use norm::{max_norm, quotient_map, simultaneous_basis, CommonBasis, DiagonalNorm, Exponent};
pub use ops::{
    certified_alpha, degree_ultra, eps_orthogonalize, exponent_to_f64, flag_basis, slopes_ultra, tensor_alpha,
    to_log, truncate_ultra, AlphaCertificate, UltraSlopes, UltraTruncation,
};

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use num_rational::BigRational;

    fn e(n: i64) -> Exponent {
        Exponent::from_integer(n)
    }

    fn cols(f: &PAdic, c: &[&[i64]]) -> Mat<BigRational> {
        Mat::from_columns(&c.iter().map(|v| v.iter().map(|&x| f.from_int(x)).collect()).collect::<Vec<_>>())
    }

    fn diag(f: &PAdic, basis: &[&[i64]], exps: &[i64]) -> UltraNormExpr<PAdic> {
        DiagonalNorm::new(f, cols(f, basis), exps.iter().map(|&x| e(x)).collect()).unwrap().into()
    }

    /// Exponent of `max_i |λ_i| ‖b_i‖`, straight from the definition.
    fn max_weighted(f: &PAdic, lambda: &[BigRational], norms: &[Exponent]) -> Option<Exponent> {
        lambda
            .iter()
            .zip(norms)
            .filter_map(|(l, &n)| f.valuation(l).map(|v| n - e(v)))
            .max()
    }

    fn probe_alpha(f: &PAdic, cert: &AlphaCertificate<BigRational>, norm: &UltraNormExpr<PAdic>, n: usize, seed: u64) -> bool {
        let mut rng = crate::random::rng(seed);
        let r = cert.basis.ncols();
        let norms: Vec<Exponent> =
            (0..r).map(|i| norm.eval(f, &cert.basis.column(i)).unwrap().unwrap()).collect();
        (0..n).all(|_| {
            let lambda: Vec<BigRational> = (0..r).map(|_| f.random_elem(&mut rng)).collect();
            let Some(m) = max_weighted(f, &lambda, &norms) else { return true };
            let x = matrix::mat_vec(f, &cert.basis, &lambda);
            norm.eval(f, &x).unwrap().unwrap() >= cert.alpha_exponent + m
        })
    }

    #[test]
    fn field_axioms_hold_on_random_triples() {
        let f = PAdic::new(3);
        let mut rng = crate::random::rng(1);
        for _ in 0..1000 {
            let (a, b) = (f.random_elem(&mut rng), f.random_elem(&mut rng));
            let abs = |x: &BigRational| f.valuation(x).map(|v| -v);
            if let (Some(va), Some(vb)) = (abs(&a), abs(&b)) {
                assert_eq!(abs(&f.mul(&a, &b)), Some(va + vb));
                if let Some(vs) = abs(&f.add(&a, &b)) {
                    assert!(vs <= va.max(vb));
                }
            }
        }
        let t = TAdic;
        for _ in 0..300 {
            let (a, b) = (t.random_elem(&mut rng), t.random_elem(&mut rng));
            if let (Some(va), Some(vb)) = (t.valuation(&a), t.valuation(&b)) {
                assert_eq!(t.valuation(&t.mul(&a, &b)), Some(va + vb));
                if let Some(vs) = t.valuation(&t.add(&a, &b)) {
                    assert!(vs >= va.min(vb));
                }
                let back = t.mul(&t.div(&a, &b).unwrap(), &b);
                assert_eq!(back, a);
            }
        }
    }

    #[test]
    fn own_basis_is_orthogonal() {
        let f = PAdic::new(5);
        let n = diag(&f, &[&[1, 2], &[3, 1]], &[1, -2]);
        let d = n.normalize(&f).unwrap();
        let cert = certified_alpha(&f, d.basis(), &n).unwrap();
        assert!(cert.is_orthogonal());
    }

    #[test]
    fn alpha_of_skew_bases_under_trivial_norm() {
        let f = PAdic::new(2);
        let trivial: UltraNormExpr<PAdic> = DiagonalNorm::trivial(&f, 2).into();
        let c = certified_alpha(&f, &cols(&f, &[&[1, 0], &[1, 1]]), &trivial).unwrap();
        assert_eq!(c.alpha_exponent, e(0));

        let p = 7;
        let f = PAdic::new(p);
        let trivial: UltraNormExpr<PAdic> = DiagonalNorm::trivial(&f, 2).into();
        let basis = cols(&f, &[&[1, 0], &[1, p as i64]]);
        let c = certified_alpha(&f, &basis, &trivial).unwrap();
        assert_eq!(c.alpha_exponent, e(-1));
        assert!(probe_alpha(&f, &c, &trivial, 1000, 3));
        // λ = (1, -1) attains α.
        let x = matrix::mat_vec(&f, &basis, &[f.one(), f.from_int(-1)]);
        assert_eq!(trivial.eval(&f, &x).unwrap(), Some(e(-1)));
    }

    #[test]
    fn singular_basis_is_rejected() {
        let f = PAdic::new(3);
        let trivial: UltraNormExpr<PAdic> = DiagonalNorm::trivial(&f, 2).into();
        let err = certified_alpha(&f, &cols(&f, &[&[1, 2], &[2, 4]]), &trivial).unwrap_err();
        assert_eq!(err, crate::Error::Singular);
    }

    #[test]
    fn flags_are_orthogonalized_exactly() {
        let f = PAdic::new(3);
        let one: UltraNormExpr<PAdic> = DiagonalNorm::trivial(&f, 1).into();
        let c = eps_orthogonalize(&f, &one, &cols(&f, &[&[6]]), Exponent::new(1, 3)).unwrap();
        assert!(c.is_orthogonal());

        let n = diag(&f, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], &[2, 0, 1]);
        let id = cols(&f, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let c = eps_orthogonalize(&f, &n, &id, Exponent::new(1, 3)).unwrap();
        assert!(c.is_orthogonal());
        assert_eq!(c.basis, id);

        let m = diag(&f, &[&[1, 1, 0], &[0, 3, 1], &[2, 0, 9]], &[0, 1, -1]).max(diag(&f, &[&[1, 0, 1], &[0, 1, 4], &[5, 0, 1]], &[1, 0, 2]));
        let flag = cols(&f, &[&[1, 2, 3], &[4, 0, 1], &[1, 1, 1]]);
        let c = eps_orthogonalize(&f, &m, &flag, Exponent::new(1, 3)).unwrap();
        let recheck = certified_alpha(&f, &c.basis, &m).unwrap();
        assert_eq!(recheck.alpha_exponent, c.alpha_exponent);
        assert!(c.alpha(f.log_base()) >= 1.0 - 1.0 / 3.0);
        // Leading spans agree with the flag.
        for k in 1..=3 {
            let mut joined = flag.columns()[..k].to_vec();
            joined.extend(c.basis.columns()[..k].iter().cloned());
            assert_eq!(matrix::rank(&f, &Mat::from_columns(&joined)), k);
        }
        assert!(probe_alpha(&f, &c, &m, 1000, 9));
    }

    #[test]
    fn degrees_follow_the_product_formula() {
        let f = PAdic::new(5);
        let phi = diag(&f, &[&[1, 2], &[0, 1]], &[0, 0]);
        assert_eq!(degree_ultra(&f, &phi, &phi).unwrap(), e(0));
        assert_eq!(degree_ultra(&f, &phi, &phi.clone().scale(Exponent::new(3, 2))).unwrap(), e(3));
        let psi = diag(&f, &[&[1, 2], &[0, 1]], &[2, -1]);
        let d = degree_ultra(&f, &phi, &psi).unwrap();
        assert_eq!(d, e(1));
        assert!((to_log(&f, d) - 5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn slopes_of_common_and_scaled_pairs() {
        let f = PAdic::new(2);
        let b: &[&[i64]] = &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 3]];
        let phi = diag(&f, b, &[0, 0, 0]);
        let psi = diag(&f, b, &[0, 3, 1]);
        let s = slopes_ultra(&f, &phi, &psi, Exponent::new(1, 4)).unwrap();
        assert_eq!(s.exponents, vec![e(3), e(1), e(0)]);
        assert_eq!(s.alpha_exponent, e(0));
        let l2 = 2f64.ln();
        for (x, y) in s.profile.slopes().iter().zip([3.0 * l2, l2, 0.0]) {
            assert!((x - y).abs() < 1e-15);
        }
        let s = slopes_ultra(&f, &phi, &phi.clone().scale(e(-2)), Exponent::new(1, 4)).unwrap();
        assert_eq!(s.exponents, vec![e(-2); 3]);
    }

    /// Degree of `(φ|W, ψ|W)` for a subspace spanned by columns.
    fn sub_degree(f: &PAdic, phi: &UltraNormExpr<PAdic>, psi: &UltraNormExpr<PAdic>, w: &Mat<BigRational>) -> Exponent {
        degree_ultra(f, &phi.clone().restrict(w.clone()), &psi.clone().restrict(w.clone())).unwrap()
    }

    #[test]
    fn slopes_match_exhaustive_pattern_subspaces() {
        // P(i) is the largest degree of a rank-i subspace. Pattern subspaces
        // are spanned by i columns of either basis or of the common basis;
        // none may beat the slope sum and the common basis attains it.
        let f = PAdic::new(3);
        let phi = diag(&f, &[&[1, 3, 0], &[0, 1, 9], &[1, 0, 1]], &[0, 2, -1]);
        let psi = diag(&f, &[&[2, 0, 1], &[1, 1, 0], &[0, 3, 1]], &[1, 0, 1]);
        let s = slopes_ultra(&f, &phi, &psi, Exponent::new(1, 3)).unwrap();
        let pool: Vec<Vec<BigRational>> = [phi.normalize(&f).unwrap(), psi.normalize(&f).unwrap()]
            .iter()
            .flat_map(|d| d.basis().columns())
            .chain(cols(&f, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1], &[1, -1, 0]]).columns())
            .collect();
        let mut partial = e(0);
        for i in 1..=3 {
            partial += s.exponents[i - 1];
            let lead = Mat::from_columns(&s.basis.columns()[..i]);
            assert_eq!(sub_degree(&f, &phi, &psi, &lead), partial);
            let n = pool.len();
            let mut idx: Vec<usize> = (0..i).collect();
            loop {
                let w = Mat::from_columns(&idx.iter().map(|&j| pool[j].clone()).collect::<Vec<_>>());
                if matrix::rank(&f, &w) == i {
                    assert!(sub_degree(&f, &phi, &psi, &w) <= partial);
                }
                let Some(pos) = (0..i).rev().find(|&k| idx[k] < n - i + k) else { break };
                idx[pos] += 1;
                for k in pos + 1..i {
                    idx[k] = idx[k - 1] + 1;
                }
            }
        }
    }

    #[test]
    fn truncation_is_exact() {
        let f = PAdic::new(2);
        let b: &[&[i64]] = &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]];
        let phi = diag(&f, b, &[0, 0, 0]);
        let psi = diag(&f, b, &[2, 0, -1]);
        let t = truncate_ultra(&f, &phi, &psi, e(0)).unwrap();
        assert_eq!((t.degree, t.slope_sum), (e(2), e(2)));
        let t = truncate_ultra(&f, &phi, &psi, e(-5)).unwrap();
        assert_eq!(t.degree, degree_ultra(&f, &phi, &psi).unwrap());

        let phi = diag(&f, &[&[1, 1, 0], &[0, 1, 2], &[3, 0, 1]], &[0, 1, 0]);
        let psi = diag(&f, &[&[1, 0, 1], &[1, 1, 0], &[0, 5, 1]], &[2, -1, 0]);
        for a in [-2, -1, 0, 1, 2] {
            let t = truncate_ultra(&f, &phi, &psi, Exponent::new(a, 2)).unwrap();
            assert_eq!(t.degree, t.slope_sum);
        }
    }

    #[test]
    fn tensor_certificates_multiply() {
        let f = PAdic::new(3);
        let trivial: UltraNormExpr<PAdic> = DiagonalNorm::trivial(&f, 2).into();
        let skew = certified_alpha(&f, &cols(&f, &[&[1, 0], &[1, 3]]), &trivial).unwrap();
        let n = diag(&f, &[&[1, 1], &[0, 1]], &[1, 0]);
        let orth = certified_alpha(&f, n.normalize(&f).unwrap().basis(), &n).unwrap();
        let t = tensor_alpha(&f, &orth, &orth);
        assert!(t.is_orthogonal());
        assert!(certified_alpha(&f, &t.basis, &n.clone().tensor(n.clone())).unwrap().is_orthogonal());
        let t = tensor_alpha(&f, &skew, &orth);
        assert_eq!(t.alpha_exponent, skew.alpha_exponent);
        let product = trivial.clone().tensor(n.clone());
        let recheck = certified_alpha(&f, &t.basis, &product).unwrap();
        assert!(recheck.alpha_exponent >= t.alpha_exponent);
        let sq = tensor_alpha(&f, &skew, &skew);
        assert_eq!(sq.alpha_exponent, e(-2));
        let recheck = certified_alpha(&f, &sq.basis, &trivial.clone().tensor(trivial.clone())).unwrap();
        assert!(recheck.alpha_exponent >= sq.alpha_exponent);
    }

    #[test]
    fn quotient_and_restriction_add_up() {
        let f = PAdic::new(5);
        let phi = diag(&f, &[&[1, 5, 0], &[0, 1, 25], &[2, 0, 1]], &[0, 1, 3]);
        let psi = diag(&f, &[&[1, 0, 1], &[0, 1, 1], &[1, 1, 0]], &[-1, 2, 0]);
        let w = cols(&f, &[&[1, 2, 0], &[0, 1, 7]]);
        let sub = sub_degree(&f, &phi, &psi, &w);
        let quo = degree_ultra(&f, &phi.clone().quotient(w.clone()), &psi.clone().quotient(w.clone())).unwrap();
        assert_eq!(sub + quo, degree_ultra(&f, &phi, &psi).unwrap());
        // Quotient norms are distances to the subspace.
        let qmap = quotient_map(&f, &w).unwrap();
        let quot = phi.clone().quotient(w.clone());
        let mut rng = crate::random::rng(4);
        for _ in 0..200 {
            let x: Vec<BigRational> = (0..3).map(|_| f.random_elem(&mut rng)).collect();
            let lam: Vec<BigRational> = (0..2).map(|_| f.random_elem(&mut rng)).collect();
            let shifted = matrix::axpy(&f, &x, &f.one(), &matrix::mat_vec(&f, &w, &lam));
            let qx = quot.eval(&f, &matrix::mat_vec(&f, &qmap, &x)).unwrap();
            let full = phi.eval(&f, &shifted).unwrap();
            assert!(qx <= full);
        }
    }

    #[test]
    fn dual_involution_preserves_alpha() {
        let f = PAdic::new(3);
        let n = diag(&f, &[&[1, 1], &[0, 3]], &[0, 1]);
        let basis = cols(&f, &[&[1, 2], &[1, 9]]);
        let a = certified_alpha(&f, &basis, &n).unwrap();
        let dual_basis = matrix::inverse(&f, &basis).unwrap().transpose();
        let b = certified_alpha(&f, &dual_basis, &n.clone().dual()).unwrap();
        assert_eq!(a.alpha_exponent, b.alpha_exponent);
    }

    #[test]
    fn ultrametric_inequality_on_expressions() {
        let f = PAdic::new(2);
        let n = diag(&f, &[&[1, 1], &[0, 1]], &[0, 1])
            .max(diag(&f, &[&[1, 2], &[1, 0]], &[1, -1]).scale(Exponent::new(1, 3)))
            .tensor(diag(&f, &[&[1]], &[0]));
        let mut rng = crate::random::rng(11);
        for _ in 0..1000 {
            let x: Vec<BigRational> = (0..2).map(|_| f.random_elem(&mut rng)).collect();
            let y: Vec<BigRational> = (0..2).map(|_| f.random_elem(&mut rng)).collect();
            let s = matrix::axpy(&f, &x, &f.from_int(-1), &y);
            let (a, b, c) = (n.eval(&f, &x).unwrap(), n.eval(&f, &y).unwrap(), n.eval(&f, &s).unwrap());
            if let Some(c) = c {
                assert!(Some(c) <= a.max(b));
            }
        }
    }

    #[test]
    fn function_field_backend() {
        let t = TAdic;
        let tt = t.uniformizer();
        let basis = Mat::from_columns(&[vec![t.one(), t.zero()], vec![t.one(), tt.clone()]]);
        let trivial: UltraNormExpr<TAdic> = DiagonalNorm::trivial(&t, 2).into();
        let c = certified_alpha(&t, &basis, &trivial).unwrap();
        assert_eq!(c.alpha_exponent, e(-1));
        assert!((c.alpha(t.log_base()) - (-1f64).exp()).abs() < 1e-15);
        let psi = DiagonalNorm::new(&t, basis, vec![e(1), e(0)]).unwrap().into();
        let s = slopes_ultra(&t, &trivial, &psi, Exponent::new(1, 2)).unwrap();
        assert_eq!(s.exponents.iter().copied().sum::<Exponent>(), degree_ultra(&t, &trivial, &psi).unwrap());
    }
}
