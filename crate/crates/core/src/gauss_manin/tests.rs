use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Scalar {
    Scalar::rational(n, d)
}

fn int(n: i64) -> Scalar {
    Scalar::from_int(n)
}

/// Coefficients of a product of univariate polynomials.
fn poly_product(factors: &[Vec<i64>]) -> Vec<i64> {
    let mut out = vec![1i64];
    for f in factors {
        let mut next = vec![0; out.len() + f.len() - 1];
        for (i, a) in out.iter().enumerate() {
            for (j, b) in f.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        out = next;
    }
    out
}

/// ((1/2)_k / k!)² for k < len.
fn hypergeometric_half(len: usize) -> Vec<Scalar> {
    let mut c = Scalar::one();
    let mut out = Vec::new();
    for k in 0..len {
        out.push(c.clone() * c.clone());
        c = c * q(2 * k as i64 + 1, 2 * (k as i64 + 1));
    }
    out
}

/// Periods of the Hesse pencil at t = 0: two subseries of Σ c_j t^j with
/// c_{j+3} = c_j (j+1)² / ((j+2)(j+3)).
fn hesse_periods(len: usize) -> [Vec<Scalar>; 2] {
    let build = |start: usize| {
        let mut v = vec![Scalar::zero(); len];
        let mut c = Scalar::one();
        let mut j = start;
        while j < len {
            v[j] = c.clone();
            c = c * q(((j + 1) * (j + 1)) as i64, ((j + 2) * (j + 3)) as i64);
            j += 3;
        }
        v
    };
    [build(0), build(1)]
}

fn xyz(e: &[u32]) -> Vec<u32> {
    e.to_vec()
}

#[test]
fn fermat_jacobian_dimensions() {
    let cubic = fermat(2, 3, 1).unwrap();
    let expect: Vec<usize> = poly_product(&[vec![1, 1], vec![1, 1], vec![1, 1]]).into_iter().map(|x| x as usize).collect();
    assert_eq!(cubic.jacobian_dims().unwrap(), expect);
    assert_eq!(cubic.jacobian_dims().unwrap(), vec![1, 3, 3, 1]);
    let quartic = fermat(3, 4, 1).unwrap();
    let dims = quartic.jacobian_dims().unwrap();
    let oracle = poly_product(&[vec![1, 1, 1], vec![1, 1, 1], vec![1, 1, 1], vec![1, 1, 1]]);
    assert_eq!(dims[4] as i64, oracle[4]);
    assert_eq!(dims[4], 19);
    assert_eq!(dims[0], 1);
    assert_eq!(cubic.pole_dims(), vec![1, 1]);
    assert_eq!(quartic.pole_dims(), vec![1, 19, 1]);
}

#[test]
fn singular_fibre_rejected() {
    // the nodal cubic y²z = x³ + x²z
    let err = HypersurfaceFamily::parse(2, 3, "y^2*z - x^3 - x^2*z", 2).unwrap_err();
    assert!(matches!(err, Error::NotSmooth(_)));
    // Legendre at λ = 0
    let err = HypersurfaceFamily::parse(2, 3, "y^2*z - x*(x-z)*(x-t*z)", 2).unwrap_err();
    assert!(matches!(err, Error::NotSmooth(_)));
}

#[test]
fn inhomogeneous_input_rejected() {
    assert!(HypersurfaceFamily::parse(2, 3, "x^3 + y^2 + z^3", 2).is_err());
}

#[test]
fn standard_numerators_are_unchanged() {
    let fam = fermat(2, 3, 2).unwrap();
    // xyz/f² on the Fermat cubic is already reduced
    let c = fam.monomial_class(2, &xyz(&[1, 1, 1]), 2).unwrap();
    let b = fam.basis.iter().position(|(k, m)| *k == 2 && *m == vec![1, 1, 1]).unwrap();
    assert_eq!(c.at(0)[b], Scalar::one());
    assert_eq!(c.pole_order(&fam), 2);
    let one = fam.monomial_class(1, &[0, 0, 0], 2).unwrap();
    assert_eq!(one, fam.basis_class(0, 2));
}

#[test]
fn jacobian_numerator_drops_pole_order() {
    let fam = fermat(2, 3, 1).unwrap();
    // x²·y / f² = (1/3) y·∂ₓf / f² ≡ (1/3)(1/1)·∂ₓ(y) / f = 0
    let c = fam.monomial_class(2, &[2, 1, 0], 1).unwrap();
    assert!(c.is_zero());
    // x³/f² = (1/3)x·∂ₓf/f² ≡ (1/3)·1/f
    let c = fam.monomial_class(2, &[3, 0, 0], 1).unwrap();
    assert_eq!(c.pole_order(&fam), 1);
    assert_eq!(c.at(0)[0], q(1, 3));
}

/// Re-expand each reduction step and check P_k + incoming = Σ A_j ∂_j f + R_k.
fn resubstitute(fam: &HypersurfaceFamily, rep: &Representative, order: usize) {
    let (class, trace) = fam.reduce(rep, order).unwrap();
    let reduced = fam.representative(&class);
    let top = rep.terms.keys().chain(trace.steps.keys()).max().copied().unwrap_or(0);
    let mut incoming = MultiPoly::zero(fam.nvars());
    for k in (1..=top).rev() {
        let mut lhs = rep.terms.get(&k).cloned().unwrap_or_else(|| MultiPoly::zero(fam.nvars()));
        lhs = &lhs + &incoming;
        let mut rhs = reduced.terms.get(&k).cloned().unwrap_or_else(|| MultiPoly::zero(fam.nvars()));
        incoming = MultiPoly::zero(fam.nvars());
        if let Some(a) = trace.steps.get(&k) {
            for (j, aj) in a.iter().enumerate() {
                rhs = &rhs + &(aj * &fam.f.derivative(j + 1));
                incoming = &incoming + &aj.derivative(j + 1).scale(&q(1, k as i64 - 1));
            }
        }
        assert_eq!(truncate(&lhs, order), truncate(&rhs, order), "pole order {k}");
    }
    assert!(incoming.is_zero());
}

#[test]
fn reduction_resubstitutes_and_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for fam in [legendre(3).unwrap(), hesse_cubic(3).unwrap()] {
        for _ in 0..5 {
            let mut terms = BTreeMap::new();
            for k in 1..=3usize {
                let d = numerator_degree(k, 3, 2).unwrap();
                let mut monos = Vec::new();
                weighted_monomials(&[1, 1, 1], d, &mut |m| monos.push(m.to_vec()));
                let mut p = MultiPoly::zero(4);
                for m in monos {
                    for s in 0..3u32 {
                        let mut e = vec![s];
                        e.extend(&m);
                        if rng.gen_bool(0.3) {
                            p.add_term(e, int(rng.gen_range(-3..=3)));
                        }
                    }
                }
                terms.insert(k, p);
            }
            let rep = Representative { terms };
            resubstitute(&fam, &rep, 3);
            let (c, _) = fam.reduce(&rep, 3).unwrap();
            let (again, trace) = fam.reduce(&fam.representative(&c), 3).unwrap();
            assert_eq!(again, c);
            assert!(trace.steps.is_empty());
        }
    }
}

#[test]
fn constant_family_differentiates_coefficients() {
    let fam = fermat(2, 3, 4).unwrap();
    let mut c = CohomologyClass::zero(2, 4);
    c.coeffs[0] = vec![int(1), int(2), int(3), int(4)];
    c.coeffs[1] = vec![int(0), int(5), int(0), int(-1)];
    let d = fam.gm_connect(&c).unwrap();
    assert_eq!(d.coeffs[0], vec![int(2), int(6), int(12)]);
    assert_eq!(d.coeffs[1], vec![int(5), int(0), int(-3)]);
    let w = fam.horizontal_lift(&fam.basis_class(1, 4), 4).unwrap();
    assert_eq!(w, fam.basis_class(1, 4));
}

#[test]
fn gm_connect_needs_precision() {
    let fam = legendre(1).unwrap();
    assert!(matches!(fam.gm_connect(&fam.basis_class(0, 1)), Err(Error::TruncationOrderExceeded(_))));
}

fn random_class(fam: &HypersurfaceFamily, m: usize, rng: &mut ChaCha8Rng) -> CohomologyClass {
    let mut c = CohomologyClass::zero(fam.basis.len(), m);
    for s in c.coeffs.iter_mut() {
        for x in s.iter_mut() {
            *x = q(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        }
    }
    c
}

#[test]
fn leibniz_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for fam in [legendre(4).unwrap(), hesse_cubic(4).unwrap()] {
        for _ in 0..10 {
            let w = random_class(&fam, 4, &mut rng);
            let a: Vec<Scalar> = (0..4).map(|_| int(rng.gen_range(-3..=3))).collect();
            let lhs = fam.gm_connect(&w.scale_series(&a)).unwrap();
            let da = series_derivative(&a);
            let rhs = fam.gm_connect(&w).unwrap().scale_series(&a).add(&w.scale_series(&da).truncate(3)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn dwork_pole_jump() {
    let fam = dwork_quartic(2).unwrap();
    let omega = fam.basis_class(0, 2);
    assert_eq!(fam.basis[0], (1, vec![0, 0, 0, 0]));
    let d = fam.gm_connect(&omega).unwrap();
    // ∇(Ω/f) = −∂_t f·Ω/f² = 4xyzw·Ω/f², and xyzw is standard
    let b = fam.basis.iter().position(|(k, m)| *k == 2 && *m == vec![1, 1, 1, 1]).unwrap();
    let at0 = d.at(0);
    for (i, x) in at0.iter().enumerate() {
        assert_eq!(*x, if i == b { int(4) } else { Scalar::zero() });
    }
    assert_eq!(d.pole_order(&fam), 2);
}

#[test]
fn legendre_picard_fuchs_annihilates_the_period() {
    let fam = legendre(12).unwrap();
    let pf = picard_fuchs(&fam, &fam.basis_class(0, 12), 2).unwrap();
    assert_eq!(pf.order, 2);
    let op = pf.operator.expect("rational coefficients").shift(&int(1)).normalized();
    // λ(1 − λ)D² + (1 − 2λ)D − 1/4, normalized by the λ² coefficient −1
    let expect = PolyOperator { coeffs: vec![vec![q(1, 4)], vec![int(-1), int(2)], vec![int(0), int(-1), int(1)]] };
    assert_eq!(op, expect);
    let y = hypergeometric_half(15);
    let residual = op.apply_to_series(&y);
    assert!(residual.len() >= 13);
    assert!(residual.iter().all(|x| x.is_zero()));
}

#[test]
fn hesse_picard_fuchs_annihilates_both_periods() {
    let fam = hesse_cubic(12).unwrap();
    let pf = picard_fuchs(&fam, &fam.basis_class(0, 12), 2).unwrap();
    assert_eq!(pf.order, 2);
    let op = pf.operator.expect("rational coefficients");
    for y in hesse_periods(16) {
        assert!(op.apply_to_series(&y).iter().all(|x| x.is_zero()));
    }
}

#[test]
fn horizontal_class_has_first_order_operator() {
    let fam = fermat(2, 3, 4).unwrap();
    let pf = picard_fuchs(&fam, &fam.basis_class(0, 4), 2).unwrap();
    assert_eq!(pf.order, 1);
    assert!(pf.series[0].iter().all(|x| x.is_zero()));
    let h = fam.algebraic_class(1, 4).unwrap();
    assert_eq!(picard_fuchs(&fam, &h, 2).unwrap().order, 1);
}

#[test]
fn horizontal_lift_is_flat_and_unique() {
    for fam in [legendre(5).unwrap(), hesse_cubic(5).unwrap()] {
        let v0 = fam.basis_class(0, 1);
        assert_eq!(fam.horizontal_lift(&v0, 1).unwrap(), v0);
        let w = fam.horizontal_lift(&v0, 5).unwrap();
        assert!(fam.gm_connect(&w).unwrap().is_zero());
        assert_eq!(w.at(0), v0.at(0));
        // the recurrence in a reversed basis order
        let gamma = fam.connection_matrix(5).unwrap();
        let nb = fam.basis.len();
        let perm: Vec<usize> = (0..nb).rev().collect();
        let mut c = vec![vec![Scalar::zero(); 5]; nb];
        for (new, &old) in perm.iter().enumerate() {
            c[new][0] = v0.coeffs[old][0].clone();
        }
        for s in 0..4 {
            for a in 0..nb {
                let mut acc = Scalar::zero();
                for b in 0..nb {
                    for u in 0..=s {
                        acc = acc + gamma[perm[b]].coeffs[perm[a]][u].clone() * c[b][s - u].clone();
                    }
                }
                c[a][s + 1] = -(acc * q(1, s as i64 + 1));
            }
        }
        for (new, &old) in perm.iter().enumerate() {
            assert_eq!(c[new], w.coeffs[old]);
        }
    }
}

#[test]
fn legendre_lift_matches_operator_recurrence() {
    let m = 3;
    let fam = legendre(8).unwrap();
    let omega = fam.basis_class(0, 8);
    let pf = picard_fuchs(&fam, &omega, 2).unwrap();
    let (b0, b1) = (&pf.series[0], &pf.series[1]);
    // w = αω + β∇ω with α' = b₀β, β' = b₁β − α, α(0) = 1, β(0) = 0
    let mut alpha = vec![Scalar::zero(); m];
    let mut beta = vec![Scalar::zero(); m];
    alpha[0] = Scalar::one();
    for s in 0..m - 1 {
        let conv = |x: &[Scalar], y: &[Scalar]| (0..=s).fold(Scalar::zero(), |acc, u| acc + x[u].clone() * y[s - u].clone());
        let inv = q(1, s as i64 + 1);
        alpha[s + 1] = conv(b0, &beta) * inv.clone();
        beta[s + 1] = (conv(b1, &beta) - alpha[s].clone()) * inv;
    }
    let nabla = fam.gm_connect(&omega).unwrap().truncate(m);
    let expect = omega.truncate(m).scale_series(&alpha).add(&nabla.scale_series(&beta)).unwrap();
    let w = fam.horizontal_lift(&fam.basis_class(0, 1), m).unwrap();
    assert_eq!(w, expect);
    assert!(!w.at(1).iter().all(|x| x.is_zero()));
}

#[test]
fn obstructions() {
    let fam = dwork_quartic(2).unwrap();
    let omega = fam.basis_class(0, 1);
    let rep = bloch_obstruction(&omega, &fam, 2, 2).unwrap();
    assert!(!rep.vanishes);
    assert!(rep.sign_relation);
    assert!(!hodge_type_check(&omega, &fam, 2, 2).unwrap());
    assert!(hodge_type_check(&omega, &fam, 0, 2).unwrap());
    let h = fam.algebraic_class(1, 1).unwrap();
    let rep = bloch_obstruction(&h, &fam, 1, 2).unwrap();
    assert!(rep.vanishes && rep.sign_relation);
    assert!(hodge_type_check(&h, &fam, 1, 2).unwrap());
    // a pole-order-2 class is not in F²
    let eta = fam.basis_class(1, 1);
    assert!(matches!(bloch_obstruction(&eta, &fam, 2, 2), Err(Error::NotInFiltration(_))));

    let leg = legendre(3).unwrap();
    let rep = bloch_obstruction(&leg.basis_class(0, 1), &leg, 1, 2).unwrap();
    assert!(!rep.vanishes && rep.sign_relation);
    let constant = fermat(2, 3, 3).unwrap();
    for m in 2..=3 {
        let rep = bloch_obstruction(&constant.basis_class(0, 1), &constant, 1, m).unwrap();
        assert!(rep.vanishes && rep.sign_relation);
    }
}
