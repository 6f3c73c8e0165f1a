use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, to_f64, Real};

/// Constant in `|P(z)| ≤ |16 z|^d`.
pub const GROWTH_BASE: f64 = 16.0;
/// Pinned constant for the derivative, `|P′(z)| ≤ |32 z|^d`.
pub const DERIVATIVE_GROWTH_BASE: f64 = 32.0;

/// `Σ c_k T_k` with a sampled bound on `sup_{[-1,1]} |P|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevPoly<T> {
    coeffs: Vec<T>,
    degree: usize,
    sup_bound_on_i0: T,
}

impl<T: Real> ChebyshevPoly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        let degree = coeffs.len() - 1;
        let mut p = Self { coeffs, degree, sup_bound_on_i0: T::zero() };
        p.sup_bound_on_i0 = p.sampled_sup();
        p
    }

    /// `T_k`.
    pub fn basis(k: usize) -> Self {
        let mut c = vec![T::zero(); k + 1];
        c[k] = T::one();
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn sup_bound_on_i0(&self) -> T {
        self.sup_bound_on_i0
    }

    /// Max of `|P|` over the `10d`-point Chebyshev–Gauss grid together with
    /// the `20d + 1` Chebyshev extrema (endpoints included).
    fn sampled_sup(&self) -> T {
        let d = self.degree.max(1);
        let mut best = T::zero();
        let g = 10 * d;
        for j in 0..g {
            let x = (T::PI() * (from_usize::<T>(j) + lit(0.5)) / from_usize(g)).cos();
            best = best.max(self.eval(x).abs());
        }
        let e = 20 * d;
        for j in 0..=e {
            let x = (T::PI() * from_usize::<T>(j) / from_usize(e)).cos();
            best = best.max(self.eval(x).abs());
        }
        best
    }

    /// Clenshaw recurrence on the real line.
    pub fn eval(&self, x: T) -> T {
        let two: T = lit(2.0);
        let (mut b1, mut b2) = (T::zero(), T::zero());
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = two * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + self.coeffs[0]
    }

    /// Clenshaw recurrence at a complex point.
    pub fn eval_complex(&self, z: Complex<T>) -> Complex<T> {
        let two: T = lit(2.0);
        let zero = Complex::new(T::zero(), T::zero());
        let (mut b1, mut b2) = (zero, zero);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = z * b1 * two - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        z * b1 - b2 + self.coeffs[0]
    }

    /// Coefficients of `P′` in the same basis.
    pub fn derivative(&self) -> Self {
        let d = self.degree;
        if d == 0 {
            return Self::new(vec![T::zero()]);
        }
        let mut out = vec![T::zero(); d + 1];
        for k in (1..=d).rev() {
            let next = if k < d { out[k + 1] } else { T::zero() };
            out[k - 1] = next + lit::<T>(2.0) * from_usize(k) * self.coeffs[k];
        }
        out[0] = out[0] / lit(2.0);
        out.truncate(d);
        Self::new(out)
    }

    /// `c · P`.
    pub fn scaled(&self, c: T) -> Self {
        Self::new(self.coeffs.iter().map(|&v| v * c).collect())
    }
}

/// Evaluates `P(z)` by Clenshaw's recurrence.
pub fn cheb_eval<T: Real>(p: &ChebyshevPoly<T>, z: Complex<T>) -> Complex<T> {
    p.eval_complex(z)
}

/// Outcome of a growth-bound comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthCheck {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// Compares `|P(z)|` with `|16 z|^d`, or `|P′(z)|` with `|32 z|^d` when
/// `derivative` is set.
pub fn growth_bound_check<T: Real>(p: &ChebyshevPoly<T>, z: Complex<T>, derivative: bool) -> Result<GrowthCheck> {
    // a relative slack for the sampled sup
    let slack: T = T::one() + T::epsilon().sqrt();
    if p.sup_bound_on_i0() > slack {
        return Err(Error::PolynomialNotNormalized(format!(
            "sup on [-1,1] is {}",
            p.sup_bound_on_i0()
        )));
    }
    if z.norm() < T::one() {
        return Err(Error::PolynomialNotNormalized(format!("|z| = {} < 1", z.norm())));
    }
    let d = p.degree() as i32;
    let (lhs, base) = if derivative {
        (p.derivative().eval_complex(z).norm(), DERIVATIVE_GROWTH_BASE)
    } else {
        (p.eval_complex(z).norm(), GROWTH_BASE)
    };
    let lhs = to_f64(lhs);
    let rhs = (base * to_f64(z.norm())).powi(d);
    Ok(GrowthCheck { holds: lhs <= rhs, lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    /// Monomial coefficients of `T_k`, exact in integers.
    fn monomials(d: usize) -> Vec<Vec<i128>> {
        let mut t = vec![vec![1i128], vec![0, 1]];
        for k in 2..=d {
            let mut next = vec![0i128; k + 1];
            for (i, &c) in t[k - 1].iter().enumerate() {
                next[i + 1] += 2 * c;
            }
            for (i, &c) in t[k - 2].iter().enumerate() {
                next[i] -= c;
            }
            t.push(next);
        }
        t
    }

    #[test]
    fn basis_values() {
        let t3 = ChebyshevPoly::<f64>::basis(3);
        assert!((t3.eval(0.5) + 1.0).abs() < 1e-15);
        assert!((ChebyshevPoly::<f64>::basis(2).eval(2.0) - 7.0).abs() < 1e-14);
        assert!((t3.sup_bound_on_i0() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn clenshaw_matches_power_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let table = monomials(20);
        for d in 0..=20 {
            let c: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p = ChebyshevPoly::new(c.clone());
            for z in [C::new(1.0, 1.0), C::new(-0.3, 0.7), C::new(2.0, -0.5)] {
                let mut mono = vec![0.0f64; d + 1];
                for (k, &ck) in c.iter().enumerate() {
                    for (i, &m) in table[k].iter().enumerate() {
                        mono[i] += ck * m as f64;
                    }
                }
                let naive = mono.iter().rev().fold(C::new(0.0, 0.0), |acc, &m| acc * z + m);
                let fast = cheb_eval(&p, z);
                let scale = (1.0 + z.norm()).powi(d as i32);
                assert!((naive - fast).norm() <= 1e-10 * scale, "d={d} z={z}");
            }
        }
    }

    #[test]
    fn derivative_of_t3() {
        // T₃′ = 12x² − 3 = 3T₀ + 6T₂
        let d = ChebyshevPoly::<f64>::basis(3).derivative();
        assert_eq!(d.degree(), 2);
        assert!((d.coeffs()[0] - 3.0).abs() < 1e-14);
        assert!(d.coeffs()[1].abs() < 1e-14);
        assert!((d.coeffs()[2] - 6.0).abs() < 1e-14);
    }

    #[test]
    fn growth_examples() {
        let t3 = ChebyshevPoly::<f64>::basis(3);
        let g = growth_bound_check(&t3, C::new(2.0, 0.0), false).unwrap();
        assert!(g.holds && (g.lhs - 26.0).abs() < 1e-12 && (g.rhs - 32768.0).abs() < 1e-9);
        let one = ChebyshevPoly::new(vec![1.0]);
        let g = growth_bound_check(&one, C::new(0.0, 5.0), false).unwrap();
        assert!(g.holds && g.lhs == 1.0 && g.rhs == 1.0);
        assert!(matches!(
            growth_bound_check(&t3.scaled(2.0), C::new(2.0, 0.0), false),
            Err(Error::PolynomialNotNormalized(_))
        ));
        assert!(growth_bound_check(&t3, C::new(0.5, 0.0), false).is_err());
    }

    #[test]
    fn randomized_growth_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut violations = 0;
        for _ in 0..1000 {
            let d = rng.gen_range(0..=24);
            let c: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let raw = ChebyshevPoly::new(c);
            if raw.sup_bound_on_i0() == 0.0 {
                continue;
            }
            let p = raw.scaled(1.0 / raw.sup_bound_on_i0());
            let z = C::from_polar(rng.gen_range(1.0..10.0), rng.gen_range(0.0..std::f64::consts::TAU));
            for deriv in [false, true] {
                if !growth_bound_check(&p, z, deriv).unwrap().holds {
                    violations += 1;
                }
            }
        }
        assert_eq!(violations, 0);
    }

    #[test]
    fn serializes() {
        let p = ChebyshevPoly::new(vec![0.5, -0.25, 0.125]);
        let s = serde_json::to_string(&p).unwrap();
        let q: ChebyshevPoly<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }

    proptest! {
        #[test]
        fn sup_bound_dominates_grid(c in proptest::collection::vec(-1.0f64..1.0, 1..30)) {
            let p = ChebyshevPoly::new(c);
            let d = p.degree().max(1);
            for j in 0..10 * d {
                let x = (std::f64::consts::PI * (j as f64 + 0.5) / (10 * d) as f64).cos();
                prop_assert!(p.eval(x).abs() <= p.sup_bound_on_i0());
            }
        }

        #[test]
        fn real_and_complex_agree(c in proptest::collection::vec(-1.0f64..1.0, 1..30), x in -1.0f64..1.0) {
            let p = ChebyshevPoly::new(c);
            let z = p.eval_complex(C::new(x, 0.0));
            prop_assert!((z.re - p.eval(x)).abs() < 1e-12 && z.im == 0.0);
        }
    }
}
