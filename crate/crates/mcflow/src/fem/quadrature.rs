//! Symmetric Gaussian quadrature on the reference triangle.
//!
//! Weights are normalized to sum to one, so an integral over a facet of
//! area `|T|` is `|T| * sum_i w_i f(p_i)`.  All stored rules have positive
//! weights; a requested degree without its own table entry is served by the
//! next stronger rule.

use crate::{Error, Result};

/// A positive-weight rule with a known degree of exactness.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    degree: usize,
    points: Vec<([f64; 3], f64)>,
}

impl QuadratureRule {
    /// Degree up to which the rule integrates bivariate polynomials exactly.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Barycentric points with their (area-normalized) weights.
    pub fn points(&self) -> &[([f64; 3], f64)] {
        &self.points
    }
}

fn orbit3(a: f64, b: f64, w: f64, out: &mut Vec<([f64; 3], f64)>) {
    out.push(([a, b, b], w));
    out.push(([b, a, b], w));
    out.push(([b, b, a], w));
}

fn orbit6(a: f64, b: f64, c: f64, w: f64, out: &mut Vec<([f64; 3], f64)>) {
    out.push(([a, b, c], w));
    out.push(([a, c, b], w));
    out.push(([b, a, c], w));
    out.push(([b, c, a], w));
    out.push(([c, a, b], w));
    out.push(([c, b, a], w));
}

/// Returns a rule exact at least to the requested `degree` (1..=8).
pub fn quadrature_rule(degree: usize) -> Result<QuadratureRule> {
    if degree == 0 || degree > 8 {
        return Err(Error::UnsupportedDegree { degree });
    }
    let third = 1.0 / 3.0;
    let rule = match degree {
        1 => QuadratureRule {
            degree: 1,
            points: vec![([third, third, third], 1.0)],
        },
        2 => QuadratureRule {
            degree: 2,
            points: vec![
                ([0.5, 0.5, 0.0], third),
                ([0.0, 0.5, 0.5], third),
                ([0.5, 0.0, 0.5], third),
            ],
        },
        3 | 4 => {
            let mut points = Vec::with_capacity(6);
            orbit3(0.108103018168070, 0.445948490915965, 0.223381589678011, &mut points);
            orbit3(0.816847572980459, 0.091576213509771, 0.109951743655322, &mut points);
            QuadratureRule { degree: 4, points }
        }
        5 => {
            let s15 = 15f64.sqrt();
            let mut points = vec![([third, third, third], 9.0 / 40.0)];
            let a = (6.0 - s15) / 21.0;
            orbit3(1.0 - 2.0 * a, a, (155.0 - s15) / 1200.0, &mut points);
            let b = (6.0 + s15) / 21.0;
            orbit3(1.0 - 2.0 * b, b, (155.0 + s15) / 1200.0, &mut points);
            QuadratureRule { degree: 5, points }
        }
        6 => {
            let mut points = Vec::with_capacity(12);
            orbit3(0.501426509658179, 0.249286745170910, 0.116786275726379, &mut points);
            orbit3(0.873821971016996, 0.063089014491502, 0.050844906370207, &mut points);
            orbit6(
                0.053145049844817,
                0.310352451033784,
                0.636502499121399,
                0.082851075618374,
                &mut points,
            );
            QuadratureRule { degree: 6, points }
        }
        _ => {
            let mut points = vec![([third, third, third], 0.144315607677787)];
            orbit3(0.081414823414554, 0.459292588292723, 0.095091634267285, &mut points);
            orbit3(0.658861384496480, 0.170569307751760, 0.103217370534718, &mut points);
            orbit3(0.898905543365938, 0.050547228317031, 0.032458497623198, &mut points);
            orbit6(
                0.008394777409958,
                0.263112829634638,
                0.728492392955404,
                0.027230314174435,
                &mut points,
            );
            QuadratureRule { degree: 8, points }
        }
    };
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact integral of x^a y^b over the unit right triangle, normalized
    /// by the triangle area: 2 a! b! / (a + b + 2)!.
    fn monomial_integral(a: u32, b: u32) -> f64 {
        let fact = |n: u32| (1..=n as u64).product::<u64>() as f64;
        2.0 * fact(a) * fact(b) / fact(a + b + 2)
    }

    fn check_exactness(rule: &QuadratureRule, degree: usize, tol: f64) {
        for a in 0..=degree as u32 {
            for b in 0..=(degree as u32 - a) {
                let approx: f64 = rule
                    .points()
                    .iter()
                    .map(|([_, l1, l2], w)| w * l1.powi(a as i32) * l2.powi(b as i32))
                    .sum();
                let exact = monomial_integral(a, b);
                assert!(
                    (approx - exact).abs() <= tol,
                    "degree {degree}: x^{a} y^{b}: {approx} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn centroid_rule() {
        let rule = quadrature_rule(1).unwrap();
        assert_eq!(rule.len(), 1);
        assert_eq!(rule.points()[0].1, 1.0);
        check_exactness(&rule, 1, 1e-15);
    }

    #[test]
    fn edge_midpoint_rule() {
        let rule = quadrature_rule(2).unwrap();
        assert_eq!(rule.len(), 3);
        for (_, w) in rule.points() {
            assert!((w - 1.0 / 3.0).abs() < 1e-16);
        }
        check_exactness(&rule, 2, 1e-15);
    }

    #[test]
    fn all_rules_match_monomial_table() {
        for degree in 1..=8 {
            let rule = quadrature_rule(degree).unwrap();
            assert!(rule.degree() >= degree);
            assert!(rule.points().iter().all(|(_, w)| *w > 0.0));
            let wsum: f64 = rule.points().iter().map(|(_, w)| w).sum();
            assert!((wsum - 1.0).abs() < 1e-14);
            check_exactness(&rule, rule.degree(), 1e-14);
        }
    }

    #[test]
    fn unsupported_degrees_error() {
        assert!(matches!(
            quadrature_rule(9),
            Err(Error::UnsupportedDegree { degree: 9 })
        ));
        assert!(matches!(
            quadrature_rule(0),
            Err(Error::UnsupportedDegree { degree: 0 })
        ));
    }
}
