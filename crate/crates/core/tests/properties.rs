//! Invariants checked on randomly generated inputs.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use obslab::chern::{whitney_additivity_check, ChernVector, FormalRing};
use obslab::deformation::trace::{random_complex, random_homotopy, random_split_triple, super_trace, ChainEndo};
use obslab::derham::Form;
use obslab::divided_powers::{PdAlgebra, PdDescriptor};
use obslab::exact::poly::{monomials_of_degree, MonomialOrder, MultiPoly};
use obslab::exact::scalar::{binomial, factorial, BaseRing, Scalar};
use obslab::exact::Ideal;
use obslab::gauss_manin::{legendre, series_mul, CohomologyClass};
use obslab::hochschild::{evaluation_matrix, hkr_homology_dims, kunneth_hh, GradedAlgebra, GradedDims, HodgeDatum};

fn q(n: i64) -> Scalar {
    Scalar::rational(n, 1)
}

/// A polynomial in `nvars` variables of degree ≤ `deg` with the given coefficients.
fn poly(nvars: usize, deg: u32, coeffs: &[i64]) -> MultiPoly {
    let monos: Vec<_> = (0..=deg).flat_map(|d| monomials_of_degree(nvars, d)).collect();
    MultiPoly::from_terms(nvars, monos.into_iter().zip(coeffs.iter()).map(|(m, &c)| (m, q(c))))
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, n)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn normal_form_is_linear_and_multiplicative(f in coeffs(10), g in coeffs(10), a in coeffs(10), b in coeffs(10)) {
        let (f, g) = (poly(3, 2, &f), poly(3, 2, &g));
        let gens: Vec<MultiPoly> = [poly(3, 2, &a), poly(3, 2, &b)].into_iter().filter(|p| !p.is_zero()).collect();
        let ideal = Ideal::computed(3, gens, MonomialOrder::Grevlex).unwrap();
        let nf = |p: &MultiPoly| ideal.normal_form(p).unwrap();
        prop_assert_eq!(nf(&(&f + &g)), &nf(&f) + &nf(&g));
        prop_assert_eq!(nf(&(&f * &g)), nf(&(&nf(&f) * &nf(&g))));
        prop_assert_eq!(nf(&nf(&f)), nf(&f));
        for h in ideal.generators() {
            prop_assert!(ideal.contains(&(h * &f)).unwrap());
        }
    }

    #[test]
    fn euler_characteristic_matches_ranks(seed in any::<u64>(), p in prop::sample::select(vec![0u64, 2, 3, 5])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ring = if p == 0 { BaseRing::Rationals } else { BaseRing::fp(p) };
        let c = random_complex(ring, -1, 4, 4, &mut rng);
        prop_assert_eq!(c.euler_characteristic(ring).unwrap(), c.euler_characteristic_of_ranks());
        let cone = c.cone_of_identity();
        for i in cone.lo()..=cone.hi() {
            prop_assert_eq!(cone.field_cohomology(i).unwrap().0, 0);
        }
    }

    #[test]
    fn trace_is_additive_and_homotopy_invariant(seed in any::<u64>(), p in prop::sample::select(vec![0u64, 5])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ring = if p == 0 { BaseRing::Rationals } else { BaseRing::fp(p) };
        let t = random_split_triple(ring, 3, 3, &mut rng).unwrap();
        prop_assert_eq!(super_trace(&t.g), super_trace(&t.f) + super_trace(&t.h));
        let h = random_homotopy(ring, &t.g.complex, &mut rng);
        prop_assert_eq!(super_trace(&t.g.add_homotopy(&h).unwrap()), super_trace(&t.g));
        let id = ChainEndo::identity(t.g.complex.clone());
        prop_assert_eq!(super_trace(&id.shift().unwrap()), -super_trace(&id));
    }

    #[test]
    fn divided_power_axioms(c in prop::collection::vec(0i64..5, 4), n in 1u32..4, m in 1u32..4) {
        let desc: PdDescriptor = serde_json::from_value(serde_json::json!(
            {"base": {"p": 5, "n": 1}, "pd_gens": ["z", "w"], "trunc": {"z": 7, "w": 5}}
        )).unwrap();
        let a = PdAlgebra::from_descriptor(&desc).unwrap();
        let parse = |s: &str| a.parse(s).unwrap();
        // an element of the PD ideal: c0·z + c1·w + c2·z^[2] + c3·z·w
        let x = [parse("z"), parse("w"), parse("z^[2]"), a.mul(&parse("z"), &parse("w"))]
            .iter()
            .zip(&c)
            .fold(a.zero(), |acc, (e, &k)| a.add(&acc, &a.scale(&BaseRing::fp(5).int(k), e)));
        let gn = a.gamma(n, &x).unwrap();
        let gm = a.gamma(m, &x).unwrap();
        let gnm = a.gamma(n + m, &x).unwrap();
        let b = BaseRing::fp(5).bigint(&binomial((n + m) as u64, n as u64));
        prop_assert!(a.equal(&a.mul(&gn, &gm), &a.scale(&b, &gnm)));
        let fact = BaseRing::fp(5).bigint(&factorial(n as u64));
        prop_assert!(a.equal(&a.scale(&fact, &gn), &a.pow(&x, n)));
    }

    #[test]
    fn de_rham_leibniz_and_square_zero(f in coeffs(10), g in coeffs(10), s in 0u32..8, t in 0u32..8) {
        let omega = Form::term(poly(3, 2, &f), s);
        let eta = Form::term(poly(3, 2, &g), t);
        let lhs = omega.wedge(&eta).d();
        let sign = if omega.degree().unwrap_or(0).is_multiple_of(2) { q(1) } else { q(-1) };
        let rhs = omega.d().wedge(&eta).add(&omega.wedge(&eta.d()).scale(&sign));
        prop_assert_eq!(lhs, rhs);
        prop_assert!(omega.d().d().is_zero());
    }

    #[test]
    fn whitney_additivity_on_random_roots(a in coeffs(6), b in coeffs(6)) {
        let ring = FormalRing::roots(&["a", "b", "c"], 5);
        let lin = |c: &[i64]| MultiPoly::from_terms(3, (0..3).map(|i| {
            let mut e = vec![0; 3];
            e[i] = 1;
            (e, q(c[i]))
        }));
        let u = ChernVector::from_roots(ring.clone(), &[lin(&a[..3]), lin(&a[3..])]).unwrap();
        let v = ChernVector::from_roots(ring, &[lin(&b[..3])]).unwrap();
        prop_assert!(whitney_additivity_check(&u, &v, 5).unwrap());
    }

    #[test]
    fn hkr_totals_and_euler(d in 0usize..4, raw in prop::collection::vec(0u64..4, 16)) {
        // the maximum over each orbit of Serre duality and conjugation is symmetric
        let at = |p: usize, q: usize| raw[p * 4 + q];
        let h: Vec<Vec<u64>> = (0..=d)
            .map(|p| (0..=d).map(|q| at(p, q).max(at(q, p)).max(at(d - p, d - q)).max(at(d - q, d - p))).collect())
            .collect();
        let hd = HodgeDatum { dim: d, h, calabi_yau: false, conjugation: true };
        prop_assert!(hd.validate().is_ok());
        let hh = hkr_homology_dims(&hd);
        prop_assert_eq!(hh.total(), hd.total());
        prop_assert_eq!(hh.euler(), hd.euler());
    }

    #[test]
    fn kunneth_convolution_is_commutative_and_associative(
        a in prop::collection::vec(0u64..5, 1..5), b in prop::collection::vec(0u64..5, 1..5), c in prop::collection::vec(0u64..5, 1..5),
        sa in -3i64..3, sb in -3i64..3, sc in -3i64..3,
    ) {
        let (a, b, c) = (GradedDims::new(sa, a), GradedDims::new(sb, b), GradedDims::new(sc, c));
        prop_assert_eq!(kunneth_hh(&a, &b), kunneth_hh(&b, &a));
        prop_assert_eq!(kunneth_hh(&kunneth_hh(&a, &b), &c), kunneth_hh(&a, &kunneth_hh(&b, &c)));
        prop_assert_eq!(kunneth_hh(&a, &b).total(), a.total() * b.total());
    }

    #[test]
    fn unital_algebras_act_injectively(seed in any::<u64>(), dims in prop::collection::vec(0u64..3, 1..4)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = vec![1u64];
        d.extend(dims);
        let gd = GradedDims::new(0, d);
        let a = GradedAlgebra::random_unital(BaseRing::Rationals, &gd, &mut rng).unwrap();
        prop_assert!(a.find_unit().unwrap().is_some());
        // a ↦ (m ↦ a·m) restricted to the unit is already injective
        prop_assert_eq!(evaluation_matrix(&a).rank().unwrap(), a.dim());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn gauss_manin_leibniz(a in coeffs(4), c in coeffs(2), d in coeffs(2)) {
        let fam = legendre(4).unwrap();
        let order = 4;
        let omega = fam.basis_class(0, order).scale_series(&c.iter().map(|&k| q(k)).chain([q(0), q(0)]).collect::<Vec<_>>())
            .add(&fam.basis_class(1, order).scale_series(&d.iter().map(|&k| q(k)).chain([q(0), q(0)]).collect::<Vec<_>>()))
            .unwrap();
        let series: Vec<Scalar> = a.iter().map(|&k| q(k)).collect();
        let deriv: Vec<Scalar> = (1..order).map(|s| series[s].clone() * q(s as i64)).chain([q(0)]).collect();
        let lhs = fam.gm_connect(&omega.scale_series(&series)).unwrap();
        let rhs = fam.gm_connect(&omega).unwrap().scale_series(&series[..order - 1])
            .add(&omega.scale_series(&deriv).truncate(order - 1)).unwrap();
        prop_assert_eq!(lhs, rhs);
        // scalar multiplication agrees with the series product
        let prod = series_mul(&series, &series, order);
        prop_assert_eq!(omega.scale_series(&series).scale_series(&series), omega.scale_series(&prod));
    }
}

#[test]
fn zero_class_is_flat() {
    let fam = legendre(3).unwrap();
    let z = CohomologyClass::zero(fam.basis.len(), 3);
    assert!(fam.gm_connect(&z).unwrap().is_zero());
}
