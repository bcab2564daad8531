//! Almost Lie algebras given by structure constants and their linear
//! almost-Poisson structures on the dual.
//!
//! Indices are 0-based in the API. The JSON exchange format uses 1-based
//! indices: `{"d": 3, "c": [[k, i, j, value], ...]}` lists entries
//! `c[k][i][j]` literally, so both `(k, i, j)` and `(k, j, i)` must appear.
//! Values are integers or rational strings such as `"-1/2"`.

use std::str::FromStr;

use num_traits::{One, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exterior::{apply_multivector, DifferentialForm, Multivector};
use crate::poly::{integer, Chart, Polynomial, Rational};

/// Bracket `[e_i, e_j] = sum_k c[k][i][j] e_k`, antisymmetric but not
/// necessarily satisfying the Jacobi identity.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    d: usize,
    c: Vec<Vec<Vec<Rational>>>,
}

impl StructureConstants {
    pub fn new(table: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        let d = table.len();
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        for plane in &table {
            if plane.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: plane.len() });
            }
            if let Some(row) = plane.iter().find(|r| r.len() != d) {
                return Err(Error::DimensionMismatch { expected: d, found: row.len() });
            }
        }
        for (k, plane) in table.iter().enumerate() {
            for (i, row) in plane.iter().enumerate() {
                for (j, c) in row.iter().enumerate().skip(i) {
                    if *c != -plane[j][i].clone() {
                        return Err(Error::NotAntisymmetric { k, i, j });
                    }
                }
            }
        }
        Ok(Self { d, c: table })
    }

    pub fn abelian(d: usize) -> Self {
        Self::new(vec![vec![vec![Rational::zero(); d]; d]; d]).expect("zero table")
    }

    /// `so(3)`: `c[k][i][j] = eps_{ijk}`.
    pub fn so3() -> Self {
        let mut s = Self::abelian(3);
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            s.c[k][i][j] = integer(1);
            s.c[k][j][i] = integer(-1);
        }
        s
    }

    /// Builds the table from literal 0-based entries `(k, i, j, value)`.
    pub fn from_entries(d: usize, entries: &[(usize, usize, usize, Rational)]) -> Result<Self> {
        let mut table = vec![vec![vec![Rational::zero(); d]; d]; d];
        let mut seen = std::collections::BTreeSet::new();
        for (k, i, j, v) in entries {
            for &idx in [k, i, j] {
                if idx >= d {
                    return Err(Error::IndexOutOfRange { index: idx, dim: d });
                }
            }
            if !seen.insert((*k, *i, *j)) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate entry for c[{}][{}][{}]",
                    k + 1,
                    i + 1,
                    j + 1
                )));
            }
            table[*k][*i][*j] = v.clone();
        }
        Self::new(table)
    }

    /// Adds `value` to `c[k][i][j]` and subtracts it from `c[k][j][i]`.
    pub fn perturbed(&self, k: usize, i: usize, j: usize, value: &Rational) -> Result<Self> {
        for idx in [k, i, j] {
            self.check_index(idx)?;
        }
        if i == j {
            return Err(Error::InvalidParameter("perturbation needs i != j".into()));
        }
        let mut next = self.clone();
        next.c[k][i][j] = &next.c[k][i][j] + value;
        next.c[k][j][i] = &next.c[k][j][i] - value;
        Ok(next)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `c[k][i][j]`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> &Rational {
        &self.c[k][i][j]
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.d {
            return Err(Error::IndexOutOfRange { index, dim: self.d });
        }
        Ok(())
    }

    /// Coefficients of `[e_i, e_j]`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Result<Vec<Rational>> {
        self.check_index(i)?;
        self.check_index(j)?;
        Ok((0..self.d).map(|k| self.c[k][i][j].clone()).collect())
    }

    /// `[u, v]` for coefficient vectors.
    pub fn bracket(&self, u: &[Rational], v: &[Rational]) -> Result<Vec<Rational>> {
        for w in [u, v] {
            if w.len() != self.d {
                return Err(Error::DimensionMismatch { expected: self.d, found: w.len() });
            }
        }
        let mut out = vec![Rational::zero(); self.d];
        for (i, ui) in u.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, vj) in v.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                for (k, slot) in out.iter_mut().enumerate() {
                    *slot += ui * vj * &self.c[k][i][j];
                }
            }
        }
        Ok(out)
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(src).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let bad = |m: &str| Error::Parse { line: 1, column: 1, message: m.to_string() };
        let d = value
            .get("d")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("expected integer field \"d\""))? as usize;
        let rows = value
            .get("c")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("expected array field \"c\""))?;
        let mut entries = Vec::with_capacity(rows.len());
        for row in rows {
            let row = row
                .as_array()
                .filter(|r| r.len() == 4)
                .ok_or_else(|| bad("each entry must be [k, i, j, value]"))?;
            let mut idx = [0usize; 3];
            for (slot, v) in idx.iter_mut().zip(row) {
                let one_based = v
                    .as_u64()
                    .filter(|&x| x >= 1)
                    .ok_or_else(|| bad("indices are positive integers (1-based)"))?;
                *slot = one_based as usize - 1;
            }
            let value = match &row[3] {
                Value::Number(n) => n
                    .as_i64()
                    .map(integer)
                    .ok_or_else(|| bad("numeric values must be integers; use \"p/q\" strings"))?,
                Value::String(s) => Rational::from_str(s.trim())
                    .map_err(|_| bad(&format!("invalid rational `{s}`")))?,
                _ => return Err(bad("value must be an integer or a rational string")),
            };
            entries.push((idx[0], idx[1], idx[2], value));
        }
        Self::from_entries(d, &entries)
    }

    pub fn to_json(&self) -> Value {
        let mut rows = Vec::new();
        for k in 0..self.d {
            for i in 0..self.d {
                for j in 0..self.d {
                    let v = &self.c[k][i][j];
                    if v.is_zero() {
                        continue;
                    }
                    let value = v
                        .to_integer()
                        .to_i64()
                        .filter(|_| v.denom().is_one())
                        .map(Value::from)
                        .unwrap_or_else(|| Value::from(v.to_string()));
                    rows.push(serde_json::json!([k + 1, i + 1, j + 1, value]));
                }
            }
        }
        serde_json::json!({ "d": self.d, "c": rows })
    }
}

/// `[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]` in the basis.
pub fn algebra_jacobi_defect(
    s: &StructureConstants,
    i: usize,
    j: usize,
    k: usize,
) -> Result<Vec<Rational>> {
    let basis = |m: usize| -> Result<Vec<Rational>> {
        s.check_index(m)?;
        Ok((0..s.d).map(|l| if l == m { Rational::one() } else { Rational::zero() }).collect())
    };
    let (ei, ej, ek) = (basis(i)?, basis(j)?, basis(k)?);
    let a = s.bracket(&s.bracket(&ei, &ej)?, &ek)?;
    let b = s.bracket(&s.bracket(&ej, &ek)?, &ei)?;
    let c = s.bracket(&s.bracket(&ek, &ei)?, &ej)?;
    Ok(a.iter().zip(&b).zip(&c).map(|((x, y), z)| x + y + z).collect())
}

/// `pi^{ij}(c) = sum_k c[k][i][j] c_k` on the dual chart `c1..cd`.
pub fn lie_poisson(s: &StructureConstants) -> Multivector {
    let chart = Chart::dual(s.d);
    let mut matrix = vec![vec![Polynomial::zero(&chart); s.d]; s.d];
    for (i, row) in matrix.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = pair_linear(&chart, &s.bracket_basis(i, j).expect("in range"));
        }
    }
    Multivector::bivector_from_matrix(&chart, &matrix).expect("square matrix")
}

/// The linear function `sum_l v_l c_l` on the dual chart.
pub fn pair_linear(chart: &Chart, v: &[Rational]) -> Polynomial {
    v.iter().enumerate().fold(Polynomial::zero(chart), |acc, (l, x)| {
        &acc + &Polynomial::coordinate(chart, l).scale(x)
    })
}

/// `{f, g}(c) = c([df(c), dg(c)])`.
pub fn dual_bracket(s: &StructureConstants, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
    let pi = lie_poisson(s);
    pi.chart().ensure_same(f.chart())?;
    pi.chart().ensure_same(g.chart())?;
    apply_multivector(&pi, &[DifferentialForm::exact(f), DifferentialForm::exact(g)])
}

pub fn dual_jacobi_defect(
    s: &StructureConstants,
    f: &Polynomial,
    g: &Polynomial,
    h: &Polynomial,
) -> Result<Polynomial> {
    let br = |a: &Polynomial, b: &Polynomial| dual_bracket(s, a, b);
    let a = br(&br(f, g)?, h)?;
    let b = br(&br(g, h)?, f)?;
    let c = br(&br(h, f)?, g)?;
    Ok(&(&a + &b) + &c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_multivector, parse_polynomial};
    use crate::poly::rational;
    use proptest::prelude::*;

    fn coords(d: usize) -> Vec<Polynomial> {
        let chart = Chart::dual(d);
        (0..d).map(|i| Polynomial::coordinate(&chart, i)).collect()
    }

    /// Oracle: the triple bracket expanded index by index.
    fn brute_defect(s: &StructureConstants, i: usize, j: usize, k: usize) -> Vec<Rational> {
        let d = s.dim();
        let mut out = vec![Rational::zero(); d];
        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
            for m in 0..d {
                for (l, slot) in out.iter_mut().enumerate() {
                    *slot += s.get(m, a, b) * s.get(l, m, c);
                }
            }
        }
        out
    }

    #[test]
    fn algebra_defect_examples() {
        let so3 = StructureConstants::so3();
        assert!(algebra_jacobi_defect(&so3, 0, 1, 2).unwrap().iter().all(Zero::is_zero));
        let ab = StructureConstants::abelian(4);
        assert!(algebra_jacobi_defect(&ab, 0, 1, 3).unwrap().iter().all(Zero::is_zero));
        let pert = so3.perturbed(0, 0, 1, &integer(1)).unwrap();
        let defect = algebra_jacobi_defect(&pert, 0, 1, 2).unwrap();
        assert!(defect.iter().any(|x| !x.is_zero()));
        assert_eq!(defect, brute_defect(&pert, 0, 1, 2));
        assert_eq!(
            algebra_jacobi_defect(&so3, 0, 1, 3).unwrap_err(),
            Error::IndexOutOfRange { index: 3, dim: 3 }
        );
    }

    #[test]
    fn lie_poisson_examples() {
        let chart = Chart::dual(3);
        let expected = parse_multivector(&chart, "c3*@c1^@c2 + c1*@c2^@c3 + c2*@c3^@c1").unwrap();
        assert_eq!(lie_poisson(&StructureConstants::so3()), expected);
        assert!(lie_poisson(&StructureConstants::abelian(3)).is_zero());
        let two = StructureConstants::from_entries(
            2,
            &[(0, 0, 1, integer(1)), (0, 1, 0, integer(-1))],
        )
        .unwrap();
        assert_eq!(lie_poisson(&two).to_string(), "c1*@c1^@c2");
    }

    #[test]
    fn antisymmetry_is_enforced() {
        let err = StructureConstants::from_entries(3, &[(0, 1, 2, integer(1))]).unwrap_err();
        assert_eq!(err, Error::NotAntisymmetric { k: 0, i: 1, j: 2 });
        let diag = StructureConstants::from_entries(2, &[(0, 1, 1, integer(1))]).unwrap_err();
        assert_eq!(diag, Error::NotAntisymmetric { k: 0, i: 1, j: 1 });
    }

    #[test]
    fn dual_defect_examples() {
        let so3 = StructureConstants::so3();
        let c = coords(3);
        assert!(dual_jacobi_defect(&so3, &c[0], &c[1], &c[2]).unwrap().is_zero());
        let pert = so3.perturbed(0, 0, 1, &integer(1)).unwrap();
        let lhs = dual_jacobi_defect(&pert, &c[0], &c[1], &c[2]).unwrap();
        let rhs = pair_linear(&Chart::dual(3), &brute_defect(&pert, 0, 1, 2));
        assert!(!lhs.is_zero());
        assert_eq!(lhs, rhs);
        let f = parse_polynomial(&Chart::dual(3), "c1^2*c2 - c3").unwrap();
        let g = parse_polynomial(&Chart::dual(3), "c2*c3 + 2").unwrap();
        assert!(dual_jacobi_defect(&pert, &f, &f, &g).unwrap().is_zero());
        let foreign = parse_polynomial(&Chart::dual(2), "c1").unwrap();
        assert!(matches!(
            dual_jacobi_defect(&so3, &foreign, &f, &g),
            Err(Error::ChartMismatch { .. })
        ));
    }

    #[test]
    fn linear_brackets_reproduce_the_algebra() {
        let pert = StructureConstants::so3().perturbed(2, 0, 2, &rational(3, 2)).unwrap();
        let c = coords(3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(
                    dual_bracket(&pert, &c[i], &c[j]).unwrap(),
                    pair_linear(&Chart::dual(3), &pert.bracket_basis(i, j).unwrap())
                );
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let pert = StructureConstants::so3().perturbed(0, 0, 1, &rational(1, 2)).unwrap();
        let text = pert.to_json().to_string();
        assert_eq!(StructureConstants::from_json(&text).unwrap(), pert);
        let src = r#"{"d": 2, "c": [[1, 1, 2, 1], [1, 2, 1, -1]]}"#;
        let two = StructureConstants::from_json(src).unwrap();
        assert_eq!(two.get(0, 0, 1), &integer(1));
        let err = StructureConstants::from_json(r#"{"d": 2, "c": [[1, 1, 2, 1]]}"#).unwrap_err();
        assert_eq!(err, Error::NotAntisymmetric { k: 0, i: 0, j: 1 });
        assert!(matches!(
            StructureConstants::from_json(r#"{"d": 2, "c": [[0, 1, 2, 1]]}"#),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            StructureConstants::from_json("{\"d\": 2,\n \"c\": [}"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    fn rand_constants() -> impl Strategy<Value = StructureConstants> {
        proptest::collection::vec((0usize..3, 0usize..3, 0usize..3, -2i64..=2), 1..5).prop_map(
            |ps| {
                ps.into_iter().fold(StructureConstants::so3(), |s, (k, i, j, v)| {
                    if i == j {
                        s
                    } else {
                        s.perturbed(k, i, j, &integer(v)).unwrap()
                    }
                })
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn dual_defect_matches_algebra_defect(s in rand_constants()) {
            let c = coords(3);
            for (i, j, k) in [(0, 1, 2), (0, 0, 1), (1, 2, 2)] {
                let dual = dual_jacobi_defect(&s, &c[i], &c[j], &c[k]).unwrap();
                let alg = algebra_jacobi_defect(&s, i, j, k).unwrap();
                prop_assert_eq!(&alg, &brute_defect(&s, i, j, k));
                prop_assert_eq!(dual, pair_linear(&Chart::dual(3), &alg));
            }
        }

        #[test]
        fn lifted_bracket_is_leibniz(s in rand_constants(), a in 0usize..3, b in 0usize..3) {
            let c = coords(3);
            let f = &c[a] * &c[b];
            let g = &c[(a + 1) % 3] + &(&c[b] * &c[b]);
            let h = &c[(b + 2) % 3] * &c[a];
            let lhs = dual_bracket(&s, &f, &(&g * &h)).unwrap();
            let rhs = &(&dual_bracket(&s, &f, &g).unwrap() * &h) + &(&g * &dual_bracket(&s, &f, &h).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
