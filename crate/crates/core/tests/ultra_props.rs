use num_rational::BigRational;
use okspec_core::random;
use okspec_core::ultra::{
    degree_ultra, matrix, slopes_ultra, truncate_ultra, DiagonalNorm, Exponent, Mat, PAdic, UltraNormExpr, ValuedField,
};
use proptest::prelude::*;

fn basis(f: &PAdic, entries: &[i64], r: usize) -> Option<Mat<BigRational>> {
    let m = Mat::from_fn(r, r, |i, j| f.from_int(entries[i * r + j]));
    (!f.is_zero(&matrix::det(f, &m))).then_some(m)
}

fn exps(v: &[i64]) -> Vec<Exponent> {
    v.iter().map(|&x| Exponent::new(x, 3)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn truncated_degree_sums_capped_slopes(
        p in prop::sample::select(vec![2u64, 3, 5]),
        r in 1usize..5,
        entries in prop::collection::vec(-5i64..=5, 16),
        shifts in prop::collection::vec(-6i64..=6, 8),
        a in -6i64..=6,
    ) {
        let f = PAdic::new(p);
        let Some(b) = basis(&f, &entries, r) else { return Ok(()) };
        let phi: UltraNormExpr<PAdic> = DiagonalNorm::new(&f, b.clone(), exps(&shifts[..r])).unwrap().into();
        let psi: UltraNormExpr<PAdic> = DiagonalNorm::new(&f, b, exps(&shifts[4..4 + r])).unwrap().into();
        let t = truncate_ultra(&f, &phi, &psi, Exponent::new(a, 3)).unwrap();
        prop_assert_eq!(t.degree, t.slope_sum);
        let s = slopes_ultra(&f, &phi, &psi, Exponent::new(1, 2)).unwrap();
        prop_assert_eq!(s.exponents.iter().copied().sum::<Exponent>(), degree_ultra(&f, &phi, &psi).unwrap());
        prop_assert!(s.exponents.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn ultrametric_inequality(seed: u64, p in prop::sample::select(vec![2u64, 5]), shifts in prop::collection::vec(-4i64..=4, 3)) {
        let f = PAdic::new(p);
        let entries = [1, 2, 0, 0, 1, 3, 1, 0, 1];
        let n: UltraNormExpr<PAdic> = DiagonalNorm::new(&f, basis(&f, &entries, 3).unwrap(), exps(&shifts)).unwrap().into();
        let n = n.clone().max(n.dual().scale(Exponent::new(1, 2)));
        let mut rng = random::rng(seed);
        let x: Vec<BigRational> = (0..3).map(|_| f.random_elem(&mut rng)).collect();
        let y: Vec<BigRational> = (0..3).map(|_| f.random_elem(&mut rng)).collect();
        let s = matrix::axpy(&f, &x, &f.one(), &y);
        if let Some(c) = n.eval(&f, &s).unwrap() {
            prop_assert!(Some(c) <= n.eval(&f, &x).unwrap().max(n.eval(&f, &y).unwrap()));
        }
    }
}
