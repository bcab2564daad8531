//! Seeded random inputs for integration and acceptance tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twistkit::exterior::{DifferentialForm, Multivector};
use twistkit::liealg::StructureConstants;
use twistkit::poly::{integer, rational, Chart, Polynomial};

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Nonzero small rational.
    pub fn coefficient(&mut self) -> twistkit::poly::Rational {
        let num = *[-3i64, -2, -1, 1, 2, 3].choose(&mut self.rng).expect("nonempty");
        let den = *[1i64, 1, 1, 2, 3].choose(&mut self.rng).expect("nonempty");
        rational(num, den)
    }

    /// Random exponent vector of total degree at most `max_degree`,
    /// supported on the given coordinates.
    fn exponents(&mut self, dim: usize, coords: &[usize], max_degree: u32) -> Vec<u32> {
        let mut e = vec![0u32; dim];
        let degree = self.rng.gen_range(0..=max_degree);
        for _ in 0..degree {
            e[*coords.choose(&mut self.rng).expect("nonempty")] += 1;
        }
        e
    }

    /// Random polynomial in the listed coordinates.
    pub fn polynomial_in(
        &mut self,
        chart: &Chart,
        coords: &[usize],
        max_degree: u32,
        max_terms: usize,
    ) -> Polynomial {
        let terms = self.rng.gen_range(1..=max_terms);
        (0..terms).fold(Polynomial::zero(chart), |acc, _| {
            let e = self.exponents(chart.dim(), coords, max_degree);
            let c = self.coefficient();
            &acc + &Polynomial::monomial(chart, c, e).expect("valid exponents")
        })
    }

    pub fn polynomial(&mut self, chart: &Chart, max_degree: u32, max_terms: usize) -> Polynomial {
        let all: Vec<usize> = (0..chart.dim()).collect();
        self.polynomial_in(chart, &all, max_degree, max_terms)
    }

    /// Random polynomial that is not zero.
    pub fn nonzero_polynomial(&mut self, chart: &Chart, max_degree: u32, max_terms: usize) -> Polynomial {
        loop {
            let p = self.polynomial(chart, max_degree, max_terms);
            if !p.is_zero() {
                return p;
            }
        }
    }

    /// Random k-form with each basis element present with probability 1/2.
    pub fn form(&mut self, chart: &Chart, degree: usize, max_degree: u32) -> DifferentialForm {
        let mut acc = DifferentialForm::zero(chart, degree);
        for idx in subsets(chart.dim(), degree) {
            if self.rng.gen_bool(0.5) {
                let c = self.polynomial(chart, max_degree, 2);
                acc = acc
                    .try_add(&DifferentialForm::term(&c, &idx).expect("in range"))
                    .expect("same chart");
            }
        }
        acc
    }

    /// Random magnetic 2-form on `x1..xn` with coefficients of degree at
    /// most `max_degree`; never zero.
    pub fn magnetic_field(&mut self, n: usize, max_degree: u32) -> DifferentialForm {
        let chart = Chart::configuration(n);
        loop {
            let b = self.form(&chart, 2, max_degree);
            if !b.is_zero() {
                return b;
            }
        }
    }

    pub fn vector_field(&mut self, chart: &Chart, max_degree: u32) -> Multivector {
        let comps: Vec<Polynomial> = (0..chart.dim())
            .map(|_| {
                if self.rng.gen_bool(0.6) {
                    self.polynomial(chart, max_degree, 2)
                } else {
                    Polynomial::zero(chart)
                }
            })
            .collect();
        Multivector::vector_field(chart, &comps).expect("dimensions agree")
    }

    /// `so(3)` with `count` random antisymmetric perturbations; retried
    /// until the Jacobi identity fails.
    pub fn perturbed_so3(&mut self, count: usize) -> StructureConstants {
        loop {
            let mut s = StructureConstants::so3();
            for _ in 0..count {
                let k = self.rng.gen_range(0..3);
                let i = self.rng.gen_range(0..3);
                let j = (i + self.rng.gen_range(1..3)) % 3;
                let v = integer(self.rng.gen_range(1..=3) * if self.rng.gen_bool(0.5) { 1 } else { -1 });
                s = s.perturbed(k, i, j, &v).expect("valid indices");
            }
            let jacobi_fails = (0..3).any(|i| {
                (0..3).any(|j| {
                    (0..3).any(|k| {
                        twistkit::liealg::algebra_jacobi_defect(&s, i, j, k)
                            .expect("in range")
                            .iter()
                            .any(|x| *x != integer(0))
                    })
                })
            });
            if jacobi_fails {
                return s;
            }
        }
    }

    /// Point with coordinates in `[-r, r]`.
    pub fn point(&mut self, dim: usize, r: f64) -> Vec<f64> {
        (0..dim).map(|_| self.rng.gen_range(-r..=r)).collect()
    }
}

/// Strictly increasing index tuples of length `k` below `n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}
