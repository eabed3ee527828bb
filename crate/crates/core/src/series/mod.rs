//! Complete and partial linear series of `O(1)` on the projective line and
//! plane, with sup and L² norms induced by continuous metrics.

mod energy;
mod backend;
mod grid;
mod norms;
mod pipeline;
mod values;
mod weight;

pub use backend::{sub_series, Backend, GradedPiece, Section, SubSeries, Variety};
pub use energy::{okounkov_energy, value_tables, OkounkovEnergy};
pub use grid::{chart_point, gauss_legendre, ChartCoords, QuadratureMeasure, SampleGrid};
pub use norms::{
    l2_gram, multiply, submultiplicativity_audit, sup_norm_oracle, sup_norm_oracles, SubmultiplicativityAudit, SupNorm,
    L2_REFINEMENT_TOL, SUP_REFINEMENT_TOL,
};
pub use pipeline::{analyze_level, level_norms, Discretization, LevelNorms, LevelResult, NormKind, SURROGATE_DESIGN_TOL};
pub use values::{gr_quotient_values, quotient_values, schwarz_constant, PieceNorm, QuotientValues};
pub use weight::{chordal_distance, distortion_bound, MetricWeight};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::HermitianForm;
    use crate::linalg::{CMat, C64};
    use crate::norms::EllipsoidOptions;
    use crate::okounkov::{delta_body, BodyOptions, MonomialOrder, OrderKind};
    use alloc::vec;
    use alloc::vec::Vec;

    fn fs() -> MetricWeight {
        MetricWeight::FubiniStudy
    }

    fn bumped() -> MetricWeight {
        fs().bump(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)], 0.1, 1.0).unwrap()
    }

    fn lex1() -> MonomialOrder {
        MonomialOrder::new(OrderKind::Lex, 1)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let gl = gauss_legendre(12);
        assert!((gl.iter().map(|p| p.1).sum::<f64>() - 1.0).abs() < 1e-14);
        for k in 0..24 {
            let v: f64 = gl.iter().map(|&(x, w)| w * x.powi(k)).sum();
            assert!((v - 1.0 / (k + 1) as f64).abs() < 1e-14, "{k}");
        }
    }

    #[test]
    fn fubini_study_sup_norms_of_monomials() {
        let grid = SampleGrid::default_for(Variety::P1);
        let b = Backend::new(Variety::P1, 6);
        let s = sup_norm_oracle(&b, &fs(), &grid).unwrap();
        assert!((s.monomial_norms[0] - 1.0).abs() < 1e-12);
        let b2 = Backend::new(Variety::P1, 2);
        let s2 = sup_norm_oracle(&b2, &fs(), &grid).unwrap();
        // Oracle: max over r of r / (1 + r^2) by a dense radial scan.
        let scan = (0..=1_000_000).map(|i| {
            let r = 3.0 * i as f64 / 1e6;
            r / (1.0 + r * r)
        });
        let oracle = scan.fold(0.0, f64::max);
        assert!((s2.monomial_norms[1] - oracle).abs() < 1e-9);
        assert!((oracle - 0.5).abs() < 1e-12);
    }

    #[test]
    fn max_log_monomials_have_norm_one() {
        let grid = SampleGrid::default_for(Variety::P1);
        let s = sup_norm_oracle(&Backend::new(Variety::P1, 5), &MetricWeight::MaxLog, &grid).unwrap();
        assert!(s.monomial_norms.iter().all(|&v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn weights_are_log_homogeneous() {
        let grid = SampleGrid::default_for(Variety::P2);
        for w in [fs(), MetricWeight::MaxLog, fs().dilated(0.3).max(MetricWeight::MaxLog)] {
            assert!(w.homogeneity_defect(grid.points()) < 1e-12);
        }
        let b = fs().bump(vec![C64::new(1.0, 0.0); 3], 0.2, 0.7).unwrap();
        assert!(b.homogeneity_defect(grid.points()) < 1e-12);
    }

    #[test]
    fn l2_gram_symmetries() {
        let b = Backend::new(Variety::P1, 5);
        let q = QuadratureMeasure::default_for(Variety::P1, 5);
        let g = l2_gram(&b, &fs(), &q).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert!(g.gram()[(i, j)].norm() < 1e-8);
                }
            }
        }
        // Lowering the weight by c (metric times e^c) scales the Gram by e^{2nc}.
        let c = 0.37;
        let h = l2_gram(&b, &fs().dilated(c), &q).unwrap();
        let f = (2.0 * 5.0 * c).exp();
        assert!(crate::linalg::max_abs(&(h.gram() - g.gram().map(|z| z * f))) < 1e-12 * f);
    }

    #[test]
    fn l2_gram_matches_dense_quadrature() {
        let n = 2;
        let g = l2_gram(&Backend::new(Variety::P1, n), &fs(), &QuadratureMeasure::default_for(Variety::P1, n)).unwrap();
        // ∫ |z^k|^2 / (1 + |z|^2)^n dμ = ∫_0^1 t^k (1 - t)^{n - k} dt with t = r^2 / (1 + r^2).
        let m = 1_000_000;
        for k in 0..=n {
            let v: f64 =
                (0..m).map(|i| (i as f64 + 0.5) / m as f64).map(|t| t.powi(k as i32) * (1.0 - t).powi((n - k) as i32)).sum::<f64>()
                    / m as f64;
            assert!((g.gram()[(k, k)].re - v).abs() < 1e-8, "{k}");
        }
    }

    #[test]
    fn plane_gram_is_diagonal_with_beta_entries() {
        let n = 3;
        let b = Backend::new(Variety::P2, n);
        let g = l2_gram(&b, &fs(), &QuadratureMeasure::default_for(Variety::P2, n)).unwrap();
        let fact = |k: i64| (1..=k).product::<i64>() as f64;
        for (i, a) in b.basis().iter().enumerate() {
            let c = n as i64 - a[0] - a[1];
            // Dirichlet integral a_0! a_1! a_2! 2! / (n + 2)!.
            let expect = fact(a[0]) * fact(a[1]) * fact(c) * 2.0 / fact(n as i64 + 2);
            assert!((g.gram()[(i, i)].re - expect).abs() < 1e-10);
            for j in 0..b.rank() {
                if i != j {
                    assert!(g.gram()[(i, j)].norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn quotient_values_of_invariant_and_trivial_norms() {
        // Rotation-invariant weight: the quotient norm of z^k is its own norm.
        let b = Backend::new(Variety::P1, 4);
        let piece = b.full_piece(&lex1());
        let g = l2_gram(&b, &fs(), &QuadratureMeasure::default_for(Variety::P1, 4)).unwrap();
        let v = gr_quotient_values(&piece, &g).unwrap();
        for k in 0..5 {
            assert!((v[k] + 0.5 * g.gram()[(k, k)].re.ln()).abs() < 1e-9);
        }
        // Level one, max-log weight and uniform measure on the unit circle.
        let b1 = Backend::new(Variety::P1, 1);
        let m = 64;
        let mut gram = CMat::zeros(2, 2);
        for i in 0..m {
            let x = [C64::new(1.0, 0.0), C64::from_polar(1.0, 2.0 * core::f64::consts::PI * i as f64 / m as f64)];
            let f = MetricWeight::MaxLog.factor(&x, 1);
            let e: Vec<C64> = b1.eval_monomials(&x).iter().map(|z| z * f).collect();
            for a in 0..2 {
                for c in 0..2 {
                    gram[(a, c)] += e[a].conj() * e[c] / m as f64;
                }
            }
        }
        let v = gr_quotient_values(&b1.full_piece(&lex1()), &HermitianForm::complex(gram).unwrap()).unwrap();
        assert!(v.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn quotient_values_match_projection_residuals() {
        let mut rng = crate::random::rng(4);
        let g = HermitianForm::complex(crate::random::hpd(&mut rng, 5, crate::ScalarKind::Complex)).unwrap();
        let piece = Backend::new(Variety::P1, 4).full_piece(&lex1());
        let v = gr_quotient_values(&piece, &g).unwrap();
        for k in 0..5 {
            // Residual^2 = G_kk - g^* G_W^{-1} g with W the later sections.
            let later: Vec<usize> = (k + 1..5).collect();
            let gm = g.gram();
            let res2 = if later.is_empty() {
                gm[(k, k)].re
            } else {
                let gw = CMat::from_fn(later.len(), later.len(), |i, j| gm[(later[i], later[j])]);
                let col = CMat::from_fn(later.len(), 1, |i, _| gm[(later[i], k)]);
                let inv = gw.try_inverse().unwrap();
                (gm[(k, k)] - (col.adjoint() * inv * &col)[(0, 0)]).re
            };
            assert!((v[k] + 0.5 * res2.ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn distortion_bounds() {
        let grid = SampleGrid::default_for(Variety::P1);
        assert_eq!(distortion_bound(&fs(), &fs(), grid.points(), 7), 0.0);
        assert!((distortion_bound(&fs(), &fs().dilated(-0.25), grid.points(), 8) - 2.0).abs() < 1e-12);
        // Oracle: the bump peaks at its center, which a fine scan of the real
        // axis locates.
        let d = distortion_bound(&fs(), &bumped(), grid.points(), 10);
        let scan = (0..=200_000)
            .map(|i| {
                let x = [C64::new(1.0, 0.0), C64::new(-2.0 + 4.0 * i as f64 / 2e5, 0.0)];
                10.0 * (fs().weight(&x) - bumped().weight(&x)).abs()
            })
            .fold(0.0, f64::max);
        assert!((scan - 1.0).abs() < 1e-9);
        assert!(d <= scan + 1e-12 && d > 0.99 * scan);
    }

    #[test]
    fn sup_norms_are_submultiplicative() {
        let grid = SampleGrid::default_for(Variety::P1);
        let a = submultiplicativity_audit(&bumped(), &grid, 3, 4, 300, 1);
        assert!(a.passed(), "{a:?}");
        let grid2 = SampleGrid::default_for(Variety::P2);
        let a = submultiplicativity_audit(&fs(), &grid2, 2, 2, 50, 2);
        assert!(a.passed(), "{a:?}");
    }

    #[test]
    fn sub_series_examples() {
        let order = lex1();
        let one = Section::one(1);
        let s = sub_series(Variety::P1, &one, 1, 5, &order).unwrap();
        for piece in &s.pieces {
            assert_eq!(piece, &Backend::new(Variety::P1, piece.n).full_piece(&order));
        }
        let z = Section::new(1, 1, &[(vec![1], 1)]).unwrap();
        let s = sub_series(Variety::P1, &z, 2, 8, &order).unwrap();
        for (k, piece) in s.pieces.iter().enumerate() {
            let k = k as i64 + 1;
            let expect: Vec<Vec<i64>> = (k..=2 * k).map(|e| vec![e]).collect();
            assert_eq!(piece.exponents, expect);
        }
        let body = delta_body(&s.sample().unwrap(), &BodyOptions::default()).unwrap();
        assert_eq!(body.body.volume, 0.5);
        let mut ends: Vec<f64> = body.body.vertices.iter().map(|v| v[0]).collect();
        ends.sort_by(f64::total_cmp);
        assert_eq!(ends, vec![0.5, 1.0]);
        // A generator with several terms: leading exponents come from the echelon form.
        let g = Section::new(1, 1, &[(vec![0], 1), (vec![1], 3)]).unwrap();
        let s = sub_series(Variety::P1, &g, 1, 3, &order).unwrap();
        assert_eq!(s.pieces[2].exponents, vec![vec![0]]);
        assert!(sub_series(Variety::P1, &Section::new(1, 1, &[]).unwrap(), 1, 2, &order).is_err());
    }

    #[test]
    fn control_case_gives_a_dirac_law() {
        let order = lex1();
        let c = 0.2;
        for kind in [NormKind::Sup, NormKind::L2] {
            let norms = level_norms(Variety::P1, 6, &fs(), &fs().dilated(c), kind, &order, &Discretization::default()).unwrap();
            let r = analyze_level(&norms, &EllipsoidOptions::default()).unwrap();
            for &mu in r.slopes.slopes() {
                assert!((mu / 6.0 - c).abs() < 1e-6, "{kind:?} {mu}");
            }
            let sum: f64 = r.phi_values.iter().zip(&r.psi_values).map(|(a, b)| a - b).sum();
            assert!((sum - r.slopes.degree()).abs() < 1e-8);
        }
    }

    #[test]
    fn schwarz_constant_is_bounded() {
        let order = lex1();
        let mut levels = Vec::new();
        for n in [1, 2, 4, 8, 16, 32, 40] {
            let norms = level_norms(Variety::P1, n, &bumped(), &fs(), NormKind::L2, &order, &Discretization::default()).unwrap();
            let r = analyze_level(&norms, &EllipsoidOptions::default()).unwrap();
            levels.push((n, r.phi_values));
        }
        let c = schwarz_constant(&levels);
        assert!(c.is_finite() && c < 0.5, "{c}");
    }

    #[test]
    fn okounkov_energy_matches_mean_slopes() {
        let order = lex1();
        let run = |psi: &MetricWeight| -> Vec<LevelResult> {
            [8, 16, 32]
                .into_iter()
                .map(|n| {
                    let norms = level_norms(Variety::P1, n, &fs(), psi, NormKind::L2, &order, &Discretization::default()).unwrap();
                    analyze_level(&norms, &EllipsoidOptions::default()).unwrap()
                })
                .collect()
        };
        let e = okounkov_energy(&run(&fs().dilated(0.2)), 1, 256, 1).unwrap();
        assert!((e.estimate - 0.2).abs() < 1e-9, "{e:?}");
        assert_eq!(e.levels, vec![16, 32]);
        let results = run(&bumped());
        let e = okounkov_energy(&results, 1, 256, 1).unwrap();
        let mean = results.last().unwrap().mean_slope();
        assert!((e.estimate - mean).abs() < 1e-3, "{} vs {mean}", e.estimate);
    }
}
