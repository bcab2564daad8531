use super::{Alternating, DifferentialForm, Multivector, VectorField};
use crate::error::{Error, Result};
use crate::poly::{integer, Polynomial};

pub fn wedge(a: &DifferentialForm, b: &DifferentialForm) -> Result<DifferentialForm> {
    a.chart().ensure_same(b.chart())?;
    Ok(DifferentialForm(a.0.wedge(&b.0)))
}

/// Exterior derivative. A top-degree input yields the zero form of degree
/// `k + 1`.
pub fn d(a: &DifferentialForm) -> DifferentialForm {
    let chart = a.chart();
    let mut out = Alternating::zero(chart, a.degree() + 1);
    for (key, coeff) in &a.0.coeffs {
        for l in coeff.support() {
            if key.contains(&l) {
                continue;
            }
            let mut idx = Vec::with_capacity(key.len() + 1);
            idx.push(l);
            idx.extend_from_slice(key);
            out.add_term(idx, coeff.partial_index(l));
        }
    }
    DifferentialForm(out)
}

/// Interior product `i_X a`, with `X` in the first slot.
pub fn contract(a: &DifferentialForm, x: &VectorField) -> Result<DifferentialForm> {
    a.chart().ensure_same(x.chart())?;
    x.expect_degree(1)?;
    if a.degree() == 0 {
        return Err(Error::ContractScalar);
    }
    Ok(DifferentialForm(a.0.insert_first(&x.0.dense())))
}

/// Bundle map of a bivector: `sharp(pi, alpha)^j = sum_i pi^{ij} alpha_i`.
pub fn sharp(pi: &Multivector, alpha: &DifferentialForm) -> Result<VectorField> {
    pi.chart().ensure_same(alpha.chart())?;
    pi.expect_degree(2)?;
    if alpha.degree() != 1 {
        return Err(Error::DegreeMismatch {
            expected: 1,
            found: alpha.degree(),
        });
    }
    Ok(Multivector(pi.0.insert_first(&alpha.0.dense())))
}

/// Lie derivative by the Cartan formula `L_X = i_X d + d i_X`.
pub fn lie_derivative(x: &VectorField, a: &DifferentialForm) -> Result<DifferentialForm> {
    a.chart().ensure_same(x.chart())?;
    x.expect_degree(1)?;
    let via_d = contract(&d(a), x)?;
    if a.degree() == 0 {
        return Ok(via_d);
    }
    via_d.try_add(&d(&contract(a, x)?))
}

/// Jacobi-Lie bracket `[X, Y]^k = sum_i (X^i d_i Y^k - Y^i d_i X^k)`.
pub fn commutator(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    x.chart().ensure_same(y.chart())?;
    let xs = x.components()?;
    let ys = y.components()?;
    let chart = x.chart();
    let comps: Vec<Polynomial> = (0..chart.dim())
        .map(|k| {
            let mut acc = Polynomial::zero(chart);
            for i in 0..chart.dim() {
                if !xs[i].is_zero() {
                    acc = &acc + &(&xs[i] * &ys[k].partial_index(i));
                }
                if !ys[i].is_zero() {
                    acc = &acc - &(&ys[i] * &xs[k].partial_index(i));
                }
            }
            acc
        })
        .collect();
    Multivector::vector_field(chart, &comps)
}

/// The Schouten square `[pi, pi]` of a bivector.
pub fn schouten_square(pi: &Multivector) -> Result<Multivector> {
    let p = pi.matrix()?;
    let chart = pi.chart();
    let dim = chart.dim();
    // derivative table dp[l][i][j] = d_l pi^{ij}
    let dp: Vec<Vec<Vec<Polynomial>>> = (0..dim)
        .map(|l| {
            p.iter()
                .map(|row| row.iter().map(|c| c.partial_index(l)).collect())
                .collect()
        })
        .collect();
    let cyc = |i: usize, j: usize, k: usize| {
        let mut acc = Polynomial::zero(chart);
        for l in 0..dim {
            if !p[i][l].is_zero() && !dp[l][j][k].is_zero() {
                acc = &acc + &(&p[i][l] * &dp[l][j][k]);
            }
        }
        acc
    };
    let two = Polynomial::constant(chart, integer(2));
    let mut out = Alternating::zero(chart, 3);
    for i in 0..dim {
        for j in i + 1..dim {
            for k in j + 1..dim {
                let sum = &(&cyc(i, j, k) + &cyc(j, k, i)) + &cyc(k, i, j);
                out.add_term(vec![i, j, k], &two * &sum);
            }
        }
    }
    Ok(Multivector(out))
}

/// Full evaluation `a(X_1, ..., X_k)`.
pub fn apply_form(a: &DifferentialForm, args: &[VectorField]) -> Result<Polynomial> {
    if args.len() != a.degree() {
        return Err(Error::ArityMismatch {
            degree: a.degree(),
            given: args.len(),
        });
    }
    let mut acc = a.clone();
    for x in args {
        acc = contract(&acc, x)?;
    }
    Ok(acc.0.scalar())
}

/// Full evaluation of a k-vector on k one-forms, `m(alpha_1, ..., alpha_k)`.
pub fn apply_multivector(m: &Multivector, args: &[DifferentialForm]) -> Result<Polynomial> {
    if args.len() != m.degree() {
        return Err(Error::ArityMismatch {
            degree: m.degree(),
            given: args.len(),
        });
    }
    let mut acc = m.0.clone();
    for alpha in args {
        m.chart().ensure_same(alpha.chart())?;
        if alpha.degree() != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: alpha.degree(),
            });
        }
        acc = acc.insert_first(&alpha.0.dense());
    }
    Ok(acc.scalar())
}

/// Directional derivative `X(f) = sum_i X^i df/dx_i`.
pub fn apply_vf(x: &VectorField, f: &Polynomial) -> Result<Polynomial> {
    x.chart().ensure_same(f.chart())?;
    x.expect_degree(1)?;
    let mut acc = Polynomial::zero(f.chart());
    for (key, coeff) in x.terms() {
        acc = &acc + &(coeff * &f.partial_index(key[0]));
    }
    Ok(acc)
}

/// For a 2-form on a three-coordinate chart, the `p` with
/// `dB = p dx1 ^ dx2 ^ dx3`.
pub fn divergence_of_2form(b: &DifferentialForm) -> Result<Polynomial> {
    let dim = b.chart().dim();
    if dim != 3 {
        return Err(Error::WrongChartSize {
            expected: 3,
            found: dim,
        });
    }
    if b.degree() != 2 {
        return Err(Error::DegreeMismatch {
            expected: 2,
            found: b.degree(),
        });
    }
    Ok(d(b).coefficient(&[0, 1, 2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_form, parse_multivector, parse_polynomial};
    use crate::poly::{rational, Chart};
    use proptest::prelude::*;

    fn c6() -> Chart {
        Chart::phase_space(3)
    }
    fn form(s: &str) -> DifferentialForm {
        parse_form(&c6(), s).unwrap()
    }
    fn mv(s: &str) -> Multivector {
        parse_multivector(&c6(), s).unwrap()
    }
    fn poly(s: &str) -> Polynomial {
        parse_polynomial(&c6(), s).unwrap()
    }

    #[test]
    fn wedge_examples() {
        let dx1 = form("dx1");
        assert!(wedge(&dx1, &dx1).unwrap().is_zero());
        let a = wedge(&dx1, &form("dx2")).unwrap();
        let b = wedge(&form("dx2"), &dx1).unwrap();
        assert_eq!(a, b.neg());
        // overflow past the top degree gives an explicit zero
        let top = form("dx1^dx2^dx3^dp1^dp2^dp3");
        let over = wedge(&top, &dx1).unwrap();
        assert!(over.is_zero());
        assert_eq!(over.degree(), 7);
    }

    #[test]
    fn d_examples() {
        let b = form("x2^2*dx2^dx3 + x1*x2*dx1^dx3");
        assert_eq!(d(&b).to_string(), "-x1*dx1^dx2^dx3");
        assert_eq!(d(&form("x1*dx2")).to_string(), "dx1^dx2");
        let one = form("x1*x2^2*p3*dx1 + p1*dp2 - 3*x3*dp3");
        assert!(d(&d(&one)).is_zero());
        let top = form("x1*dx1^dx2^dx3^dp1^dp2^dp3");
        assert!(d(&top).is_zero());
        assert_eq!(d(&top).degree(), 7);
    }

    #[test]
    fn contract_examples() {
        let phi = form("-x1*dx1^dx2^dx3");
        let r = contract(&phi, &mv("@x3")).unwrap();
        assert_eq!(r.to_string(), "-x1*dx1^dx2");
        assert_eq!(
            contract(&DifferentialForm::function(&poly("x1")), &mv("@x1")).unwrap_err(),
            Error::ContractScalar
        );
        // first-slot convention on the example hamiltonian fields
        let ha = mv("@x3 + x2^2*@p2 + x1*x2*@p1");
        let hb = mv("@x1 - x1*x2*@p3");
        let w = contract(&contract(&phi, &ha).unwrap(), &hb).unwrap();
        assert_eq!(w.to_string(), "-x1*dx2");
        let w_rev = contract(&contract(&phi, &hb).unwrap(), &ha).unwrap();
        assert_eq!(w_rev.to_string(), "x1*dx2");
    }

    #[test]
    fn sharp_examples() {
        let pi_b = mv("@x1^@p1 + @x2^@p2 + @x3^@p3 + x2^2*@p2^@p3 + x1*x2*@p1^@p3");
        assert_eq!(sharp(&pi_b, &form("x1*dx2")).unwrap().to_string(), "x1*@p2");
        assert!(sharp(&pi_b, &DifferentialForm::zero(&c6(), 1)).unwrap().is_zero());
        let canonical = mv("@x1^@p1 + @x2^@p2 + @x3^@p3");
        assert_eq!(sharp(&canonical, &form("dp1")).unwrap().to_string(), "-@x1");
        assert!(matches!(
            sharp(&pi_b, &form("dx1^dx2")),
            Err(Error::DegreeMismatch { expected: 1, found: 2 })
        ));
        // footnote route alpha(pi~(beta)) = pi(alpha, beta) is the negative
        let alpha = form("dp1");
        let beta = form("x1*dx2 + dp3");
        let lhs = apply_multivector(&pi_b, &[alpha.clone(), beta.clone()]).unwrap();
        let rhs = apply_form(&alpha, &[sharp(&pi_b, &beta).unwrap()]).unwrap();
        assert_eq!(lhs, -rhs);
    }

    #[test]
    fn lie_derivative_examples() {
        let h_f = mv("x1*@x2 - x2*@x1 + p1*@p2 - p2*@p1");
        let omega = form("-dx1^dp1 - dx2^dp2 - dx3^dp3 + x2^2*dx2^dx3 + x1*x2*dx1^dx3");
        assert_eq!(
            lie_derivative(&h_f, &omega).unwrap().to_string(),
            "x1^2*dx1^dx3 + x1*x2*dx2^dx3"
        );
        assert_eq!(
            lie_derivative(&mv("@x1"), &form("x1*dx2")).unwrap().to_string(),
            "dx2"
        );
        let closed = form("x1*dp1 + p2*dx3");
        let closed = d(&closed);
        let x = mv("p1*@x1 + x3^2*@p2");
        assert_eq!(
            lie_derivative(&x, &closed).unwrap(),
            d(&contract(&closed, &x).unwrap())
        );
    }

    #[test]
    fn commutator_examples() {
        assert!(commutator(&mv("@x1"), &mv("@x2")).unwrap().is_zero());
        assert_eq!(
            commutator(&mv("x1*@x2"), &mv("@x1")).unwrap().to_string(),
            "-@x2"
        );
        let ha = mv("@x3 + x2^2*@p2 + x1*x2*@p1");
        let hb = mv("@x1 - x1*x2*@p3");
        assert_eq!(commutator(&ha, &hb).unwrap().to_string(), "-x2*@p1");
    }

    #[test]
    fn schouten_examples() {
        let pi_b = mv("@x1^@p1 + @x2^@p2 + @x3^@p3 + x2^2*@p2^@p3 + x1*x2*@p1^@p3");
        assert_eq!(
            schouten_square(&pi_b).unwrap().to_string(),
            "2*x1*@p1^@p2^@p3"
        );
        assert!(schouten_square(&mv("@x1^@p1 + @x2^@p2 + @x3^@p3"))
            .unwrap()
            .is_zero());
        assert!(schouten_square(&mv("3*@x1^@x2 - 1/2*@p1^@x3 + 7*@p2^@p3"))
            .unwrap()
            .is_zero());
        assert!(matches!(
            schouten_square(&mv("@x1")),
            Err(Error::DegreeMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn apply_form_examples() {
        let phi = form("-x1*dx1^dx2^dx3");
        let (e1, e2, e3) = (mv("@x1"), mv("@x2"), mv("@x3"));
        let v = apply_form(&phi, &[e1.clone(), e2.clone(), e3.clone()]).unwrap();
        assert_eq!(v, poly("-x1"));
        let swapped = apply_form(&phi, &[e2.clone(), e1.clone(), e3]).unwrap();
        assert_eq!(swapped, poly("x1"));
        assert_eq!(
            apply_form(&form("dx1^dp1"), &[mv("@x1"), mv("@p1")]).unwrap(),
            poly("1")
        );
        assert!(matches!(
            apply_form(&phi, &[e1, e2]),
            Err(Error::ArityMismatch { degree: 3, given: 2 })
        ));
    }

    #[test]
    fn apply_vf_examples() {
        let f = poly("x1*p2 - x2*p1");
        assert_eq!(apply_vf(&mv("x1*@p2"), &f).unwrap(), poly("x1^2"));
        assert!(apply_vf(&mv("x1*@p2 + @x3"), &poly("17/3")).unwrap().is_zero());
        assert_eq!(apply_vf(&mv("@x1"), &poly("x1^2")).unwrap(), poly("2*x1"));
    }

    #[test]
    fn divergence_examples() {
        let base = Chart::configuration(3);
        let b = parse_form(&base, "x2^2*dx2^dx3 + x1*x2*dx1^dx3").unwrap();
        assert_eq!(
            divergence_of_2form(&b).unwrap(),
            parse_polynomial(&base, "-x1").unwrap()
        );
        let closed = parse_form(&base, "dx1^dx2").unwrap();
        assert!(divergence_of_2form(&closed).unwrap().is_zero());
        let b3 = parse_form(&base, "x3*dx1^dx2").unwrap();
        assert_eq!(divergence_of_2form(&b3).unwrap(), Polynomial::one(&base));
        assert!(matches!(
            divergence_of_2form(&form("dx1^dx2")),
            Err(Error::WrongChartSize { expected: 3, found: 6 })
        ));
    }

    // ---- property tests on random forms ----

    fn rand_poly() -> impl Strategy<Value = Polynomial> {
        let term = (-3i64..=3, proptest::collection::vec(0u32..=2, 6));
        proptest::collection::vec(term, 0..3).prop_map(|ts| {
            ts.into_iter().fold(Polynomial::zero(&c6()), |acc, (n, e)| {
                &acc + &Polynomial::monomial(&c6(), rational(n, 1), e).unwrap()
            })
        })
    }

    fn rand_alt(degree: usize) -> impl Strategy<Value = Alternating> {
        let term = (rand_poly(), proptest::sample::subsequence((0..6).collect::<Vec<_>>(), degree));
        proptest::collection::vec(term, 0..4).prop_map(move |ts| {
            let mut a = Alternating::zero(&c6(), degree);
            for (c, idx) in ts {
                a.add_term(idx, c);
            }
            a
        })
    }

    fn rand_form(degree: usize) -> impl Strategy<Value = DifferentialForm> {
        rand_alt(degree).prop_map(DifferentialForm)
    }

    fn rand_vf() -> impl Strategy<Value = VectorField> {
        rand_alt(1).prop_map(Multivector)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn d_squared_vanishes(
            a0 in rand_form(0), a1 in rand_form(1), a2 in rand_form(2),
            a3 in rand_form(3), a4 in rand_form(4), a5 in rand_form(5)
        ) {
            for a in [a0, a1, a2, a3, a4, a5] {
                prop_assert!(d(&d(&a)).is_zero());
            }
        }

        #[test]
        fn wedge_is_graded_commutative(a in rand_form(1), b in rand_form(2), c in rand_form(1)) {
            prop_assert_eq!(wedge(&a, &b).unwrap(), wedge(&b, &a).unwrap());
            prop_assert_eq!(wedge(&a, &c).unwrap(), wedge(&c, &a).unwrap().neg());
            prop_assert_eq!(
                wedge(&wedge(&a, &b).unwrap(), &c).unwrap(),
                wedge(&a, &wedge(&b, &c).unwrap()).unwrap()
            );
        }

        #[test]
        fn d_is_a_graded_derivation(a in rand_form(1), b in rand_form(2)) {
            let lhs = d(&wedge(&a, &b).unwrap());
            let rhs = wedge(&d(&a), &b).unwrap()
                .try_sub(&wedge(&a, &d(&b)).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn contraction_is_nilpotent(a in rand_form(3), x in rand_vf()) {
            let once = contract(&a, &x).unwrap();
            prop_assert!(contract(&once, &x).unwrap().is_zero());
        }

        #[test]
        fn lie_derivative_is_a_derivation(x in rand_vf(), a in rand_form(1), b in rand_form(2)) {
            let lhs = lie_derivative(&x, &wedge(&a, &b).unwrap()).unwrap();
            let rhs = wedge(&lie_derivative(&x, &a).unwrap(), &b).unwrap()
                .try_add(&wedge(&a, &lie_derivative(&x, &b).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn apply_form_is_antisymmetric_and_matches_contraction(
            a in rand_form(3), x in rand_vf(), y in rand_vf(), z in rand_vf()
        ) {
            let v = apply_form(&a, &[x.clone(), y.clone(), z.clone()]).unwrap();
            let swapped = apply_form(&a, &[y.clone(), x.clone(), z.clone()]).unwrap();
            prop_assert_eq!(&v, &-&swapped);
            let via = apply_form(&contract(&a, &x).unwrap(), &[y, z]).unwrap();
            prop_assert_eq!(v, via);
        }

        #[test]
        fn commutator_is_antisymmetric_and_jacobi(x in rand_vf(), y in rand_vf(), z in rand_vf()) {
            prop_assert_eq!(commutator(&x, &y).unwrap(), commutator(&y, &x).unwrap().neg());
            let j = commutator(&commutator(&x, &y).unwrap(), &z).unwrap()
                .try_add(&commutator(&commutator(&y, &z).unwrap(), &x).unwrap()).unwrap()
                .try_add(&commutator(&commutator(&z, &x).unwrap(), &y).unwrap()).unwrap();
            prop_assert!(j.is_zero());
        }
    }
}
