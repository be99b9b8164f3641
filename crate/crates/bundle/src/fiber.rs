//! Fiber integration over `ℙ^{r−1}` in closed form.
//!
//! On `ℙ(E)` the form `dd^c log|α|²_h` splits into the Fubini–Study form of `h(x)` along the
//! fiber and, after the Schur complement, the horizontal Levi form
//! `Σ_ab(α) = α*K_ab α / α*hα` with `K_ab = ∂_a∂̄_b h − (∂̄_b h) h⁻¹ (∂_a h)`.
//! Integrating `(dd^c ψ)^{k+r−1}` over a fiber then reduces to an average over the unit sphere:
//! `s_k[I,J] = (k+r−1)!/(r−1)! · E_γ det Σ̃[I,J](γ)` with `Σ̃_ab(γ) = γ*L⁻¹K_ab L⁻*γ`, `h = LL*`.
//! The integrand is a polynomial of bidegree `(k,k)` in `γ`, so a small product rule over the
//! simplex of moduli and the torus of phases is exact.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segre_grid::field::IndexTable;

use crate::error::BundleError;
use crate::jet::MatrixJet;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// How fiber averages are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiberQuadrature {
    /// Product Gauss–Legendre × trapezoid rule, exact for the degrees in use.
    Exact,
    /// Stratified sampling of the sphere with a fixed seed.
    MonteCarlo { samples: usize, seed: u64 },
}

/// Points `γ` on the unit sphere of `ℂ^r` with weights summing to 1.
#[derive(Clone, Debug)]
pub struct FiberRule {
    pub r: usize,
    pub points: Vec<Vec<Complex64>>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre nodes and weights on `[0, 1]` (Golub–Welsch).
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1);
    let mut jacobi = DMatrix::<f64>::zeros(q, q);
    for i in 1..q {
        let k = i as f64;
        let b = k / (4.0 * k * k - 1.0).sqrt();
        jacobi[(i - 1, i)] = b;
        jacobi[(i, i - 1)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> =
        (0..q).map(|i| (0.5 * (eig.eigenvalues[i] + 1.0), eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

impl FiberRule {
    pub fn new(quadrature: FiberQuadrature, r: usize, max_degree: usize) -> Result<Self, BundleError> {
        if r == 0 {
            return Err(BundleError::InvalidMetric("rank must be positive".into()));
        }
        match quadrature {
            FiberQuadrature::Exact => Ok(Self::exact(r, max_degree)),
            FiberQuadrature::MonteCarlo { samples, seed } => {
                if samples == 0 {
                    return Err(BundleError::Budget("Monte-Carlo fiber rule needs samples".into()));
                }
                Ok(Self::monte_carlo(r, samples, seed))
            }
        }
    }

    /// Exact for integrands of bidegree up to `(k, k)` in `γ`.
    pub fn exact(r: usize, k: usize) -> Self {
        if r == 1 {
            return FiberRule { r, points: vec![vec![Complex64::new(1.0, 0.0)]], weights: vec![1.0] };
        }
        let q = (k + r).div_ceil(2).max(1);
        let (gx, gw) = gauss_legendre(q);
        let na = k + 1;
        let m = r - 1;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut ui = vec![0usize; m];
        let mut ti = vec![0usize; m];
        loop {
            let u: Vec<f64> = ui.iter().map(|&i| gx[i]).collect();
            let wu: f64 = ui.iter().map(|&i| gw[i]).product();
            let theta: Vec<f64> = ti.iter().map(|&i| 2.0 * std::f64::consts::PI * i as f64 / na as f64).collect();
            let (g, jac) = sphere_point(&u, &theta);
            points.push(g);
            weights.push(wu * jac / (na as f64).powi(m as i32));
            if !advance(&mut ti, na) && !advance(&mut ui, q) {
                break;
            }
        }
        FiberRule { r, points, weights }
    }

    /// Latin-hypercube samples of the simplex coordinates and phases.
    pub fn monte_carlo(r: usize, samples: usize, seed: u64) -> Self {
        if r == 1 {
            return Self::exact(1, 0);
        }
        let m = r - 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let strata: Vec<Vec<usize>> = (0..2 * m)
            .map(|_| {
                let mut s: Vec<usize> = (0..samples).collect();
                for i in (1..samples).rev() {
                    s.swap(i, rng.gen_range(0..=i));
                }
                s
            })
            .collect();
        let mut points = Vec::with_capacity(samples);
        let mut weights = Vec::with_capacity(samples);
        for j in 0..samples {
            let mut coord = |c: usize| (strata[c][j] as f64 + rng.gen::<f64>()) / samples as f64;
            let u: Vec<f64> = (0..m).map(&mut coord).collect();
            let theta: Vec<f64> = (m..2 * m).map(|c| 2.0 * std::f64::consts::PI * coord(c)).collect();
            let (g, jac) = sphere_point(&u, &theta);
            points.push(g);
            weights.push(jac / samples as f64);
        }
        FiberRule { r, points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Odometer step; false after wrapping around.
fn advance(idx: &mut [usize], base: usize) -> bool {
    for i in idx.iter_mut() {
        *i += 1;
        if *i < base {
            return true;
        }
        *i = 0;
    }
    false
}

/// `γ` from conical simplex coordinates and phases, with the density factor of the uniform
/// measure on the simplex, `(r−1)! ∏ (1−u_i)^{r−1−i}`.
fn sphere_point(u: &[f64], theta: &[f64]) -> (Vec<Complex64>, f64) {
    let m = u.len();
    let mut rest = 1.0;
    let mut p = Vec::with_capacity(m + 1);
    let mut jac = 1.0;
    for (i, &ui) in u.iter().enumerate() {
        p.push(rest * ui);
        jac *= (1.0 - ui).powi((m - 1 - i) as i32);
        rest *= 1.0 - ui;
    }
    let fact: f64 = (1..=m).map(|k| k as f64).product();
    let mut g = Vec::with_capacity(m + 1);
    g.push(Complex64::new(rest.max(0.0).sqrt(), 0.0));
    for (pi, &t) in p.iter().zip(theta) {
        g.push(Complex64::from_polar(pi.max(0.0).sqrt(), t));
    }
    (g, fact * jac)
}

/// Segre coefficients at one point, in `FormField` storage order per degree: the diagonal
/// pairs `(I, I)` followed by the upper pairs `(I, J)`, `I < J`.
#[derive(Clone, Debug)]
pub struct SegreCoefficients {
    pub degrees: Vec<Vec<Complex64>>,
}

/// Evaluates `s_0, …, s_K` from metric jets.
#[derive(Clone, Debug)]
pub struct SegreEvaluator {
    n: usize,
    r: usize,
    max_degree: usize,
    rule: FiberRule,
    tables: Vec<IndexTable>,
    /// `(k+r−1)!/(r−1)!`.
    factors: Vec<f64>,
}

/// Scratch space reused across nodes.
#[derive(Clone, Debug)]
pub struct Workspace {
    kt: Vec<DMatrix<Complex64>>,
    sigma: Vec<Complex64>,
    sub: Vec<Complex64>,
}

impl SegreEvaluator {
    pub fn new(n: usize, r: usize, max_degree: usize, quadrature: FiberQuadrature) -> Result<Self, BundleError> {
        if max_degree > n {
            return Err(BundleError::BidegreeMismatch { expected: n, found: max_degree });
        }
        let rule = FiberRule::new(quadrature, r, max_degree)?;
        let tables = (0..=max_degree).map(|k| IndexTable::new(n, k)).collect();
        let factors = (0..=max_degree).map(|k| (r..k + r).map(|j| j as f64).product()).collect();
        Ok(SegreEvaluator { n, r, max_degree, rule, tables, factors })
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn table(&self, k: usize) -> &IndexTable {
        &self.tables[k]
    }

    pub fn rule(&self) -> &FiberRule {
        &self.rule
    }

    pub fn workspace(&self) -> Workspace {
        Workspace { kt: vec![DMatrix::zeros(self.r, self.r); self.n * self.n], sigma: vec![ZERO; self.n * self.n], sub: vec![ZERO; self.n * self.n] }
    }

    /// Output buffers sized for every degree.
    pub fn coefficients(&self) -> SegreCoefficients {
        SegreCoefficients { degrees: self.tables.iter().map(|t| vec![ZERO; t.len() + t.n_off()]).collect() }
    }

    /// Fills `out` with `s_k` at the point of `jet`, or fails when `h` is not positive definite.
    pub fn eval(&self, jet: &MatrixJet, ws: &mut Workspace, out: &mut SegreCoefficients) -> Result<(), BundleError> {
        let n = self.n;
        let chol = jet.h.clone().cholesky().ok_or_else(|| BundleError::Degenerate("metric is not positive definite".into()))?;
        // h⁻¹ ∂_a h.
        let solved: Vec<DMatrix<Complex64>> = jet.d.iter().map(|d| chol.solve(d)).collect();
        let l = chol.l();
        for a in 0..n {
            for b in 0..n {
                let k = &jet.dd[a * n + b] - jet.d[b].adjoint() * &solved[a];
                // L⁻¹ K L⁻*.
                let left = l.solve_lower_triangular(&k).expect("triangular factor is invertible");
                let both = l.solve_lower_triangular(&left.adjoint()).expect("triangular factor is invertible").adjoint();
                ws.kt[a * n + b] = both;
            }
        }
        for v in out.degrees.iter_mut() {
            v.fill(ZERO);
        }
        out.degrees[0][0] = Complex64::new(1.0, 0.0);
        for (g, &w) in self.rule.points.iter().zip(&self.rule.weights) {
            for ab in 0..n * n {
                let m = &ws.kt[ab];
                let mut acc = ZERO;
                for i in 0..self.r {
                    let mut row = ZERO;
                    for j in 0..self.r {
                        row += m[(i, j)] * g[j];
                    }
                    acc += g[i].conj() * row;
                }
                ws.sigma[ab] = acc;
            }
            for k in 1..=self.max_degree {
                let t = &self.tables[k];
                let len = t.len();
                for p in 0..len {
                    for q in p..len {
                        let det = minor_det(&ws.sigma, n, &t.lists[p], &t.lists[q], &mut ws.sub);
                        let slot = if p == q { p } else { len + t.off_slot(p, q) };
                        out.degrees[k][slot] += det * w;
                    }
                }
            }
        }
        for (k, v) in out.degrees.iter_mut().enumerate().skip(1) {
            let f = self.factors[k];
            for c in v.iter_mut() {
                *c *= f;
            }
        }
        Ok(())
    }
}

/// Determinant of the submatrix of the row-major `n × n` matrix `m` on rows `rows`, columns
/// `cols` (length at most 3).
fn minor_det(m: &[Complex64], n: usize, rows: &[usize], cols: &[usize], sub: &mut [Complex64]) -> Complex64 {
    let k = rows.len();
    for (i, &a) in rows.iter().enumerate() {
        for (j, &b) in cols.iter().enumerate() {
            sub[i * k + j] = m[a * n + b];
        }
    }
    match k {
        0 => Complex64::new(1.0, 0.0),
        1 => sub[0],
        2 => sub[0] * sub[3] - sub[1] * sub[2],
        3 => {
            sub[0] * (sub[4] * sub[8] - sub[5] * sub[7]) - sub[1] * (sub[3] * sub[8] - sub[5] * sub[6])
                + sub[2] * (sub[3] * sub[7] - sub[4] * sub[6])
        }
        _ => unreachable!("base dimension is at most 3"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_moment(rule: &FiberRule, f: impl Fn(&[Complex64]) -> f64) -> f64 {
        rule.points.iter().zip(&rule.weights).map(|(g, w)| w * f(g)).sum()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(4);
        for deg in 0..8 {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            assert!((s - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "degree {deg}");
        }
    }

    #[test]
    fn exact_rule_reproduces_sphere_moments() {
        // E|γ_1|^{2a}|γ_2|^{2b}... = a! b! (r−1)! / (a+b+r−1)! on S^{2r−1}.
        let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
        for r in 1..=3 {
            let rule = FiberRule::exact(r, 3);
            let w: f64 = rule.weights.iter().sum();
            assert!((w - 1.0).abs() < 1e-13);
            for a in 0..=3usize {
                let b = 3 - a;
                if r == 1 && b > 0 {
                    continue;
                }
                let m = sphere_moment(&rule, |g| g[0].norm_sqr().powi(a as i32) * g[r - 1].norm_sqr().powi(if r == 1 { 0 } else { b as i32 }));
                let expect = if r == 1 { 1.0 } else { fact(a) * fact(b) * fact(r - 1) / fact(a + b + r - 1) };
                assert!((m - expect).abs() < 1e-12, "r={r} a={a}: {m} vs {expect}");
            }
            if r > 1 {
                let off = sphere_moment(&rule, |g| (g[0] * g[1].conj()).re);
                assert!(off.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn monte_carlo_rule_is_deterministic_and_normalized() {
        let a = FiberRule::monte_carlo(2, 256, 7);
        let b = FiberRule::monte_carlo(2, 256, 7);
        assert_eq!(a.points, b.points);
        let total: f64 = a.weights.iter().sum();
        assert!((total - 1.0).abs() < 0.05);
        let m = sphere_moment(&a, |g| g[0].norm_sqr());
        assert!((m - 0.5).abs() < 0.02);
    }

    #[test]
    fn split_rank_two_metric() {
        // h = diag(|x1|²+ε, |x2|²+ε) at x = 0: s1 = diag(1/ε, 1/ε), s2 = 1/ε².
        let eps = 0.5;
        let mut jet = MatrixJet::zeros(2, 2);
        jet.h[(0, 0)] = Complex64::new(eps, 0.0);
        jet.h[(1, 1)] = Complex64::new(eps, 0.0);
        jet.dd[0][(0, 0)] = Complex64::new(1.0, 0.0);
        jet.dd[3][(1, 1)] = Complex64::new(1.0, 0.0);
        let ev = SegreEvaluator::new(2, 2, 2, FiberQuadrature::Exact).unwrap();
        let mut ws = ev.workspace();
        let mut out = ev.coefficients();
        ev.eval(&jet, &mut ws, &mut out).unwrap();
        assert!((out.degrees[1][0].re - 1.0 / eps).abs() < 1e-12);
        assert!((out.degrees[1][1].re - 1.0 / eps).abs() < 1e-12);
        assert!(out.degrees[1][2].norm() < 1e-12);
        assert!((out.degrees[2][0].re - 1.0 / (eps * eps)).abs() < 1e-12);
    }
}
