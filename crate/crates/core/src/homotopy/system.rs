use crate::morse::MorseFunction;
use crate::poly::Polynomial;

/// `∇ log g = 0` with denominators cleared: equation `i` is
/// `q·∏f_j · ∂_i log g`, a polynomial of degree at most `Σ d_j + 1`.
#[derive(Clone, Debug)]
pub struct CriticalSystem {
    pub equations: Vec<Polynomial>,
    pub bezout: u64,
}

impl CriticalSystem {
    pub fn degrees(&self) -> Vec<u32> {
        self.equations.iter().map(Polynomial::degree_or_zero).collect()
    }
}

pub fn assemble_critical_system(m: &MorseFunction) -> CriticalSystem {
    let n = m.nvars();
    let fs = m.arrangement().polys();
    let q = m.denominator();
    let k = fs.len();
    // prefix[j] = f_0 ⋯ f_{j-1}, suffix[j] = f_j ⋯ f_{k-1}
    let mut prefix = vec![Polynomial::constant(n, 1.0)];
    for f in fs {
        let next = prefix.last().unwrap() * f;
        prefix.push(next);
    }
    let mut suffix = vec![Polynomial::constant(n, 1.0); k + 1];
    for j in (0..k).rev() {
        suffix[j] = &fs[j] * &suffix[j + 1];
    }
    let all = &prefix[k];
    let others: Vec<Polynomial> = (0..k).map(|j| &prefix[j] * &suffix[j + 1]).collect();
    let q_others: Vec<Polynomial> = others.iter().map(|o| o * q).collect();
    let t = f64::from(m.t());
    let equations: Vec<Polynomial> = (0..n)
        .map(|i| {
            let mut eq = (&q.derivative(i).expect("index in range") * all).scale(-t);
            for (j, f) in fs.iter().enumerate() {
                let dfi = f.derivative(i).expect("index in range");
                if dfi.is_zero() {
                    continue;
                }
                eq = eq + (&dfi * &q_others[j]).scale(f64::from(m.s()[j]));
            }
            eq
        })
        .collect();
    let bezout = equations
        .iter()
        .map(|e| u64::from(e.degree_or_zero()))
        .product();
    CriticalSystem { equations, bezout }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Arrangement;

    #[test]
    fn ellipsoid_degrees() {
        let arr = Arrangement::parse(
            &[
                "x^2 + y^2 + z^2 - 1",
                "x^2 + y^2 + z^2 - 4",
                "100x^2 + 100y^2 + z^2 - 9",
            ],
            &["x", "y", "z"],
        )
        .unwrap();
        let m = MorseFunction::build(arr, 2, None, None).unwrap();
        let cs = assemble_critical_system(&m);
        assert_eq!(cs.degrees(), vec![7, 7, 7]);
        assert_eq!(cs.bezout, 343);
    }

    #[test]
    fn single_line_by_hand() {
        let arr = Arrangement::parse(&["x + 1"], &["x"]).unwrap();
        let m = MorseFunction::build(arr, 9, None, None).unwrap();
        let cs = assemble_critical_system(&m);
        let q = m.denominator();
        let x1 = Polynomial::parse("x + 1", &["x"]).unwrap();
        let want = q - &(&x1 * &q.derivative(0).unwrap());
        assert_eq!(cs.bezout, 2);
        for (mono, c) in cs.equations[0].terms() {
            assert!((c - want.coefficient(mono.exponents())).abs() < 1e-12);
        }
        assert_eq!(cs.equations[0].num_terms(), want.num_terms());
    }

    #[test]
    fn discriminant_degrees() {
        let arr = Arrangement::parse(
            &[
                "y",
                "x^6 + y^6 + x*y",
                "x - 1",
                "x^2 + y^2 + 1",
            ],
            &["x", "y"],
        )
        .unwrap();
        let m = MorseFunction::build(arr, 4, None, None).unwrap();
        let cs = assemble_critical_system(&m);
        assert_eq!(cs.degrees(), vec![11, 11]);
        assert_eq!(cs.bezout, 121);
    }

    #[test]
    fn vanishes_exactly_at_gradient_zero() {
        // away from the hypersurfaces, eq_i / (q ∏ f) must equal ∂_i log g
        let arr = Arrangement::parse(&["x^2 + y - 1", "x - y + 2"], &["x", "y"]).unwrap();
        let m = MorseFunction::build(arr, 11, None, None).unwrap();
        let cs = assemble_critical_system(&m);
        let x = [0.37, -1.2];
        let lg = m.eval_log_g(&x, false).unwrap();
        let scale = m.denominator().eval(&x).unwrap()
            * m.arrangement()
                .polys()
                .iter()
                .map(|f| f.eval(&x).unwrap())
                .product::<f64>();
        for i in 0..2 {
            let v = cs.equations[i].eval(&x).unwrap() / scale;
            assert!((v - lg.grad[i]).abs() < 1e-12 * (1.0 + v.abs()));
        }
    }
}
