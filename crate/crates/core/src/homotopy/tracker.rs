//! Total-degree path tracker in projective coordinates.
//!
//! The target system `F` is homogenised with a leading variable `x_0` and
//! tracked on a random affine patch `a·X = 1`, so paths heading to infinity
//! stay bounded and simply end with `x_0 → 0`.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, Lu};
use crate::poly::Polynomial;

type C = Complex64;

/// Homogeneous polynomial system compiled for fast evaluation of values and
/// Jacobians at complex points. All polynomials share one monomial table.
#[derive(Clone, Debug)]
pub(crate) struct CompiledSystem {
    nh: usize,
    degrees: Vec<u32>,
    monos: Vec<Vec<u32>>,
    max_exp: Vec<u32>,
    eqs: Vec<Vec<(usize, f64)>>,
    jac: Vec<Vec<Vec<(usize, f64)>>>,
}

impl CompiledSystem {
    /// `polys` must be homogeneous in the same `nh` variables. Each equation
    /// is rescaled to unit largest coefficient.
    pub fn new(polys: &[Polynomial]) -> Self {
        let nh = polys[0].nvars();
        let mut table: std::collections::HashMap<Vec<u32>, usize> = Default::default();
        let mut monos: Vec<Vec<u32>> = Vec::new();
        let mut intern = |e: &[u32], monos: &mut Vec<Vec<u32>>| -> usize {
            if let Some(&i) = table.get(e) {
                return i;
            }
            monos.push(e.to_vec());
            table.insert(e.to_vec(), monos.len() - 1);
            monos.len() - 1
        };
        let mut eqs = Vec::new();
        let mut jac = Vec::new();
        let mut degrees = Vec::new();
        for p in polys {
            debug_assert!(p.is_homogeneous());
            let scale = 1.0 / p.max_coefficient();
            let p = p.scale(scale);
            degrees.push(p.degree_or_zero());
            eqs.push(
                p.terms()
                    .map(|(m, c)| (intern(m.exponents(), &mut monos), c))
                    .collect(),
            );
            let row = (0..nh)
                .map(|v| {
                    p.derivative(v)
                        .expect("index in range")
                        .terms()
                        .map(|(m, c)| (intern(m.exponents(), &mut monos), c))
                        .collect()
                })
                .collect();
            jac.push(row);
        }
        let mut max_exp = vec![0; nh];
        for m in &monos {
            for (mx, &e) in max_exp.iter_mut().zip(m) {
                *mx = (*mx).max(e);
            }
        }
        CompiledSystem {
            nh,
            degrees,
            monos,
            max_exp,
            eqs,
            jac,
        }
    }

    pub fn len(&self) -> usize {
        self.eqs.len()
    }

    fn monomial_values(&self, x: &[C]) -> Vec<C> {
        let pw: Vec<Vec<C>> = (0..self.nh)
            .map(|v| {
                let mut row = Vec::with_capacity(self.max_exp[v] as usize + 1);
                let mut acc = C::new(1.0, 0.0);
                row.push(acc);
                for _ in 0..self.max_exp[v] {
                    acc *= x[v];
                    row.push(acc);
                }
                row
            })
            .collect();
        self.monos
            .iter()
            .map(|m| {
                let mut acc = C::new(1.0, 0.0);
                for (v, &e) in m.iter().enumerate() {
                    if e > 0 {
                        acc *= pw[v][e as usize];
                    }
                }
                acc
            })
            .collect()
    }

    /// Values and row-major Jacobian (`len × nh`).
    pub fn eval(&self, x: &[C], with_jac: bool) -> (Vec<C>, Vec<C>) {
        let mv = self.monomial_values(x);
        let dot = |terms: &[(usize, f64)]| -> C {
            terms.iter().fold(C::new(0.0, 0.0), |acc, &(i, c)| acc + mv[i] * c)
        };
        let vals = self.eqs.iter().map(|e| dot(e)).collect();
        let mut jac = Vec::new();
        if with_jac {
            jac.reserve(self.eqs.len() * self.nh);
            for row in &self.jac {
                for d in row {
                    jac.push(dot(d));
                }
            }
        }
        (vals, jac)
    }

    /// Largest of `|F_i(x)| / max(Σ|c_α||x^α|, ‖x‖_∞^{d_i})`. The second
    /// term keeps the ratio meaningful when every term vanishes.
    pub fn relative_residual(&self, x: &[C]) -> f64 {
        let ax: Vec<C> = x.iter().map(|v| C::new(v.norm(), 0.0)).collect();
        let xn = linalg::norm_inf(x);
        let mv = self.monomial_values(x);
        let amv = self.monomial_values(&ax);
        self.eqs
            .iter()
            .zip(&self.degrees)
            .map(|(e, &d)| {
                let v = e.iter().fold(C::new(0.0, 0.0), |acc, &(i, c)| acc + mv[i] * c);
                let s: f64 = e.iter().map(|&(i, c)| c.abs() * amv[i].re).sum();
                v.norm() / s.max(xn.powi(d as i32))
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathStatus {
    Converged,
    Diverged,
    Failed,
}

/// Outcome of tracking one start solution. `end` holds affine coordinates
/// when the endpoint is finite.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathTrackRecord {
    pub start: Vec<[f64; 2]>,
    pub end: Option<Vec<[f64; 2]>>,
    pub status: PathStatus,
    pub steps: usize,
    /// Homotopy parameter reached; 1 unless the path stalled.
    pub tau: f64,
    pub newton_residual: f64,
    /// ∞-norm condition number of the target Jacobian at the endpoint.
    pub condition: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct TrackerSettings {
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
    pub corrector_iters: usize,
    pub corrector_tol: f64,
    /// Level at which a corrector that stops contracting is taken to have
    /// hit the evaluation noise floor rather than left the basin.
    pub corrector_floor: f64,
    pub final_residual: f64,
    pub divergence_norm: f64,
    pub singular_condition: f64,
}

impl Default for TrackerSettings {
    fn default() -> Self {
        TrackerSettings {
            initial_step: 0.01,
            max_step: 0.05,
            min_step: 1e-14,
            max_steps: 50_000,
            corrector_iters: 3,
            corrector_tol: 1e-10,
            corrector_floor: 1e-8,
            final_residual: 1e-10,
            divergence_norm: 1e10,
            singular_condition: 1e8,
        }
    }
}

/// `H(X, τ) = (1-τ)·γ·G(X) + τ·F(X)` plus the patch row.
pub(crate) struct Homotopy<'a> {
    target: &'a CompiledSystem,
    gamma: C,
    start_consts: Vec<C>,
    patch: Vec<C>,
    pub settings: TrackerSettings,
}

enum Corrected {
    Ok(Vec<C>),
    Fail,
}

impl<'a> Homotopy<'a> {
    pub fn new(target: &'a CompiledSystem, rng: &mut ChaCha8Rng) -> Self {
        let unit = |rng: &mut ChaCha8Rng| C::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let gamma = unit(rng);
        let start_consts = (0..target.len()).map(|_| unit(rng)).collect();
        let mut patch: Vec<C> = (0..target.nh)
            .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let pn = linalg::norm2(&patch);
        for p in &mut patch {
            *p /= pn;
        }
        Homotopy {
            target,
            gamma,
            start_consts,
            patch,
            settings: TrackerSettings::default(),
        }
    }

    #[cfg(test)]
    pub fn bezout(&self) -> u64 {
        self.target.degrees.iter().map(|&d| u64::from(d)).product()
    }

    /// The `index`-th start solution in mixed-radix order over the degrees.
    pub fn start_solution(&self, mut index: u64) -> Vec<C> {
        let n = self.target.len();
        let mut x = vec![C::new(1.0, 0.0); n + 1];
        for i in 0..n {
            let d = u64::from(self.target.degrees[i]);
            let k = index % d;
            index /= d;
            let root = self.start_consts[i].powf(1.0 / d as f64);
            let w = C::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64);
            x[i + 1] = root * w;
        }
        self.normalize(x)
    }

    fn normalize(&self, mut x: Vec<C>) -> Vec<C> {
        let s: C = self.patch.iter().zip(&x).map(|(a, b)| a * b).sum();
        for v in &mut x {
            *v /= s;
        }
        x
    }

    /// `(H, H_X, H_τ)` with `H_X` row-major `(n+1) × (n+1)`.
    fn eval(&self, x: &[C], tau: f64) -> (Vec<C>, Vec<C>, Vec<C>) {
        let n = self.target.len();
        let nh = n + 1;
        let (f, fj) = self.target.eval(x, true);
        let mut h = vec![C::new(0.0, 0.0); nh];
        let mut hx = vec![C::new(0.0, 0.0); nh * nh];
        let mut ht = vec![C::new(0.0, 0.0); nh];
        let s = self.gamma * (1.0 - tau);
        for i in 0..n {
            let d = self.target.degrees[i] as i32;
            let xi = x[i + 1];
            let x0 = x[0];
            let xi_d1 = xi.powi(d - 1);
            let x0_d1 = x0.powi(d - 1);
            let g = xi_d1 * xi - self.start_consts[i] * x0_d1 * x0;
            h[i] = s * g + f[i] * tau;
            ht[i] = f[i] - self.gamma * g;
            for v in 0..nh {
                hx[i * nh + v] = fj[i * nh + v] * tau;
            }
            hx[i * nh + i + 1] += s * xi_d1 * f64::from(d);
            hx[i * nh] -= s * self.start_consts[i] * x0_d1 * f64::from(d);
        }
        let pv: C = self.patch.iter().zip(x).map(|(a, b)| a * b).sum();
        h[n] = pv - 1.0;
        hx[n * nh..].copy_from_slice(&self.patch);
        (h, hx, ht)
    }

    fn velocity(&self, x: &[C], tau: f64) -> Option<Vec<C>> {
        let nh = x.len();
        let (_, hx, ht) = self.eval(x, tau);
        let rhs: Vec<C> = ht.iter().map(|v| -v).collect();
        linalg::solve(hx, nh, &rhs).ok()
    }

    fn correct(&self, mut x: Vec<C>, tau: f64, first_bound: f64) -> Corrected {
        let nh = x.len();
        let set = &self.settings;
        let mut last = f64::INFINITY;
        for it in 0..set.corrector_iters {
            let (h, hx, _) = self.eval(&x, tau);
            let Ok(lu) = Lu::factor(hx, nh) else {
                return Corrected::Fail;
            };
            let rhs: Vec<C> = h.iter().map(|v| -v).collect();
            let dx = lu.solve(&rhs);
            let dn = linalg::norm_inf(&dx);
            if it == 0 && dn > first_bound {
                return Corrected::Fail;
            }
            let scale = 1.0 + linalg::norm_inf(&x);
            if dn > 0.5 * last && dn > set.corrector_tol * scale {
                // stagnation far below the step size is rounding noise;
                // anything larger means the iterate is outside the quadratic
                // basin and the next path may be closer
                if last <= set.corrector_floor * scale && dn <= set.corrector_floor * scale {
                    return Corrected::Ok(x);
                }
                return Corrected::Fail;
            }
            last = dn;
            for (a, b) in x.iter_mut().zip(&dx) {
                *a += b;
            }
            if dn <= set.corrector_tol * (1.0 + linalg::norm_inf(&x)) {
                return Corrected::Ok(x);
            }
        }
        if last <= set.corrector_floor * (1.0 + linalg::norm_inf(&x)) {
            return Corrected::Ok(x);
        }
        Corrected::Fail
    }

    /// Condition number of `H_X` that does not depend on the patch: the
    /// point is normalised, rows are equilibrated and the patch row is
    /// replaced by `conj(X̂)`.
    fn projective_condition(&self, x: &[C], tau: f64) -> f64 {
        let nh = x.len();
        let norm = linalg::norm2(x);
        let xh: Vec<C> = x.iter().map(|v| v / norm).collect();
        let (_, mut hx, _) = self.eval(&xh, tau);
        for r in 0..nh - 1 {
            let row = &mut hx[r * nh..(r + 1) * nh];
            let scale = linalg::norm_inf(row);
            if scale == 0.0 {
                return f64::INFINITY;
            }
            for v in row.iter_mut() {
                *v /= scale;
            }
        }
        for (dst, v) in hx[(nh - 1) * nh..].iter_mut().zip(&xh) {
            *dst = v.conj();
        }
        linalg::condition_inf(&hx, nh)
    }

    fn refine_target(&self, mut x: Vec<C>) -> Vec<C> {
        let nh = x.len();
        let mut last = f64::INFINITY;
        for _ in 0..12 {
            let (h, hx, _) = self.eval(&x, 1.0);
            let Ok(lu) = Lu::factor(hx, nh) else { break };
            let rhs: Vec<C> = h.iter().map(|v| -v).collect();
            let dx = lu.solve(&rhs);
            let dn = linalg::norm_inf(&dx);
            if dn > last {
                break;
            }
            for (a, b) in x.iter_mut().zip(&dx) {
                *a += b;
            }
            last = dn;
            if dn <= 1e-15 * (1.0 + linalg::norm_inf(&x)) {
                break;
            }
        }
        x
    }

    pub fn track(&self, start: Vec<C>) -> PathTrackRecord {
        let set = &self.settings;
        let encode = |v: &[C]| v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>();
        let start_enc = encode(&start[1..]);
        let mut x = start;
        let mut tau = 0.0f64;
        let mut h = set.initial_step;
        let mut streak = 0;
        let mut steps = 0;
        let fail = |steps, tau, cond: f64, status| PathTrackRecord {
            start: start_enc.clone(),
            end: None,
            status,
            steps,
            tau,
            newton_residual: f64::NAN,
            condition: cond,
        };
        while tau < 1.0 {
            if steps >= set.max_steps {
                return fail(steps, tau, f64::NAN, PathStatus::Failed);
            }
            steps += 1;
            let step = h.min(1.0 - tau);
            let t1 = if step >= 1.0 - tau { 1.0 } else { tau + step };
            let predicted = self.rk4(&x, tau, t1 - tau);
            let outcome = match predicted {
                Some(xp) => {
                    let motion = xp
                        .iter()
                        .zip(&x)
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max);
                    let bound = 0.1 * motion + 1e-9 * (1.0 + linalg::norm_inf(&xp));
                    self.correct(xp, t1, bound)
                }
                None => Corrected::Fail,
            };
            match outcome {
                Corrected::Ok(xn) => {
                    x = xn;
                    tau = t1;
                    streak += 1;
                    if streak >= 4 {
                        h = (h * 1.5).min(set.max_step);
                        streak = 0;
                    }
                }
                Corrected::Fail => {
                    streak = 0;
                    h *= 0.5;
                    if h < set.min_step {
                        // a stall with an ill-conditioned Jacobian is a path
                        // running into a singular endpoint or infinity
                        let cond = self.projective_condition(&x, tau);
                        let status = if tau > 0.999 || tau > 0.9 && cond > 1e6 {
                            PathStatus::Diverged
                        } else {
                            PathStatus::Failed
                        };
                        return fail(steps, tau, cond, status);
                    }
                }
            }
        }
        self.finish(x, steps, &start_enc)
    }

    /// Newton refinement at `τ = 1` and classification of the endpoint.
    fn finish(&self, x: Vec<C>, steps: usize, start_enc: &[[f64; 2]]) -> PathTrackRecord {
        let set = &self.settings;
        let x = self.refine_target(x);
        let residual = self.target.relative_residual(&x);
        let cond = self.projective_condition(&x, 1.0);
        let xn = linalg::norm_inf(&x);
        let affine_norm = if x[0].norm() == 0.0 {
            f64::INFINITY
        } else {
            x[1..].iter().map(|v| (v / x[0]).norm_sqr()).sum::<f64>().sqrt()
        };
        let at_infinity = x[0].norm() <= 1e-14 * xn || affine_norm > set.divergence_norm;
        let mut record = PathTrackRecord {
            start: start_enc.to_vec(),
            end: None,
            status: PathStatus::Diverged,
            steps,
            tau: 1.0,
            newton_residual: residual,
            condition: cond,
        };
        if at_infinity || cond > set.singular_condition {
            return record;
        }
        let affine: Vec<C> = x[1..].iter().map(|v| v / x[0]).collect();
        record.end = Some(affine.iter().map(|c| [c.re, c.im]).collect());
        record.status = if residual < set.final_residual {
            PathStatus::Converged
        } else {
            PathStatus::Failed
        };
        record
    }

    fn rk4(&self, x: &[C], tau: f64, h: f64) -> Option<Vec<C>> {
        let axpy = |a: &[C], s: f64, b: &[C]| -> Vec<C> {
            a.iter().zip(b).map(|(u, v)| u + v * s).collect()
        };
        let k1 = self.velocity(x, tau)?;
        let k2 = self.velocity(&axpy(x, h / 2.0, &k1), tau + h / 2.0)?;
        let k3 = self.velocity(&axpy(x, h / 2.0, &k2), tau + h / 2.0)?;
        let k4 = self.velocity(&axpy(x, h, &k3), tau + h)?;
        Some(
            (0..x.len())
                .map(|i| x[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn track_all(polys: &[Polynomial], seed: u64) -> Vec<PathTrackRecord> {
        let homog: Vec<Polynomial> = polys.iter().map(Polynomial::homogenize).collect();
        let sys = CompiledSystem::new(&homog);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = Homotopy::new(&sys, &mut rng);
        (0..h.bezout()).map(|i| h.track(h.start_solution(i))).collect()
    }

    #[test]
    fn univariate_quadratic() {
        // (x - 2)(x + 3)
        let p = Polynomial::parse("x^2 + x - 6", &["x"]).unwrap();
        let recs = track_all(&[p], 7);
        assert_eq!(recs.len(), 2);
        let mut roots: Vec<f64> = recs
            .iter()
            .map(|r| {
                assert_eq!(r.status, PathStatus::Converged);
                let e = r.end.as_ref().unwrap();
                assert!(e[0][1].abs() < 1e-12);
                e[0][0]
            })
            .collect();
        roots.sort_by(f64::total_cmp);
        assert!((roots[0] + 3.0).abs() < 1e-12 && (roots[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_conics_with_solutions_at_infinity() {
        // parallel-ish conics: x^2 + y^2 = 4 and x^2 + y^2 - x = 1 meet in 2
        // finite points; the other two intersections are at infinity
        let vars = ["x", "y"];
        let a = Polynomial::parse("x^2 + y^2 - 4", &vars).unwrap();
        let b = Polynomial::parse("x^2 + y^2 - x - 1", &vars).unwrap();
        let recs = track_all(&[a, b], 3);
        let conv: Vec<_> = recs
            .iter()
            .filter(|r| r.status == PathStatus::Converged)
            .collect();
        let div = recs.iter().filter(|r| r.status == PathStatus::Diverged).count();
        assert_eq!(conv.len(), 2);
        assert_eq!(div, 2);
        for r in conv {
            let e = r.end.as_ref().unwrap();
            assert!((e[0][0] - 3.0).abs() < 1e-10);
        }
    }
}
