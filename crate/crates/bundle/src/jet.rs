//! Second-order jets `h, ∂_a h, ∂_a∂̄_b h` of metric matrices at a point, computed from exact
//! polynomial derivatives.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};
use segre_core::gauss::rat_to_f64;
use segre_core::poly::real_analytic_vars;
use segre_core::{NumPoly, Polynomial, QasDescriptor};

use crate::metric::{HermitianPolyMatrix, SingularMetric};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Jet of an `r × r` Hermitian matrix function at a point of `ℂ^n`.
///
/// `dd[a * n + b]` holds `∂_a∂̄_b h`; the antiholomorphic derivative is `∂̄_b h = (∂_b h)*`.
#[derive(Clone, Debug)]
pub struct MatrixJet {
    pub n: usize,
    pub r: usize,
    pub h: DMatrix<Complex64>,
    pub d: Vec<DMatrix<Complex64>>,
    pub dd: Vec<DMatrix<Complex64>>,
}

impl MatrixJet {
    pub fn zeros(n: usize, r: usize) -> Self {
        MatrixJet { n, r, h: DMatrix::zeros(r, r), d: vec![DMatrix::zeros(r, r); n], dd: vec![DMatrix::zeros(r, r); n * n] }
    }

    pub fn fill_zero(&mut self) {
        self.h.fill(ZERO);
        self.d.iter_mut().for_each(|m| m.fill(ZERO));
        self.dd.iter_mut().for_each(|m| m.fill(ZERO));
    }

    /// `self += c·other` on the entries selected by `mask(i, j)`.
    pub fn add_scaled_masked(&mut self, c: f64, other: &MatrixJet, mask: impl Fn(usize, usize) -> bool) {
        for i in 0..self.r {
            for j in 0..self.r {
                if !mask(i, j) {
                    continue;
                }
                self.h[(i, j)] += other.h[(i, j)] * c;
                for (m, o) in self.d.iter_mut().zip(&other.d) {
                    m[(i, j)] += o[(i, j)] * c;
                }
                for (m, o) in self.dd.iter_mut().zip(&other.dd) {
                    m[(i, j)] += o[(i, j)] * c;
                }
            }
        }
    }
}

/// A real-analytic polynomial with its first and mixed second derivatives, ready to evaluate.
#[derive(Clone, Debug)]
struct ScalarJet {
    n: usize,
    p: NumPoly,
    d: Vec<NumPoly>,
    db: Vec<NumPoly>,
    dd: Vec<NumPoly>,
}

/// Values of a scalar jet: `(f, ∂_a f, ∂̄_b f, ∂_a∂̄_b f)`.
#[derive(Clone, Debug)]
struct ScalarJetValue {
    v: Complex64,
    d: Vec<Complex64>,
    db: Vec<Complex64>,
    dd: Vec<Complex64>,
}

impl ScalarJet {
    fn new(n: usize, p: &Polynomial) -> Self {
        let d: Vec<Polynomial> = (0..n).map(|a| p.derivative(a)).collect();
        let db: Vec<Polynomial> = (0..n).map(|b| p.derivative(n + b)).collect();
        let mut dd = Vec::with_capacity(n * n);
        for da in &d {
            for b in 0..n {
                dd.push(da.derivative(n + b).to_numeric());
            }
        }
        ScalarJet { n, p: p.to_numeric(), d: d.iter().map(Polynomial::to_numeric).collect(), db: db.iter().map(Polynomial::to_numeric).collect(), dd }
    }

    fn is_zero(&self) -> bool {
        self.p.is_zero() && self.d.iter().all(NumPoly::is_zero) && self.db.iter().all(NumPoly::is_zero)
    }

    /// `zz` holds `x` followed by `x̄`.
    fn eval(&self, zz: &[Complex64]) -> ScalarJetValue {
        ScalarJetValue {
            v: self.p.eval(zz),
            d: self.d.iter().map(|q| q.eval(zz)).collect(),
            db: self.db.iter().map(|q| q.eval(zz)).collect(),
            dd: self.dd.iter().map(|q| q.eval(zz)).collect(),
        }
    }

    fn zero_value(&self) -> ScalarJetValue {
        ScalarJetValue { v: ZERO, d: vec![ZERO; self.n], db: vec![ZERO; self.n], dd: vec![ZERO; self.n * self.n] }
    }
}

#[derive(Clone, Debug)]
struct CompiledHermitian {
    r: usize,
    entries: Vec<ScalarJet>,
}

impl CompiledHermitian {
    fn new(h: &HermitianPolyMatrix) -> Self {
        let n = h.dim();
        let entries = h.entries().iter().flat_map(|row| row.iter().map(|p| ScalarJet::new(n, p))).collect();
        CompiledHermitian { r: h.size(), entries }
    }

    fn jet_into(&self, zz: &[Complex64], out: &mut MatrixJet, offset: usize) {
        let n = out.n;
        for i in 0..self.r {
            for j in 0..self.r {
                let e = &self.entries[i * self.r + j];
                if e.is_zero() {
                    continue;
                }
                let v = e.eval(zz);
                let (pi, pj) = (offset + i, offset + j);
                out.h[(pi, pj)] = v.v;
                for a in 0..n {
                    out.d[a][(pi, pj)] = v.d[a];
                    for b in 0..n {
                        out.dd[a * n + b][(pi, pj)] = v.dd[a * n + b];
                    }
                }
            }
        }
    }
}

/// A diagonal weight `e^φ = (Σ|f_j|²)^c · e^b`.
#[derive(Clone, Debug)]
struct CompiledWeight {
    n: usize,
    /// `(Σ|f_j|²)^c` as a polynomial when `c` is a positive integer.
    power: Option<ScalarJet>,
    /// `Σ|f_j|²` and `c` otherwise.
    base: Option<(ScalarJet, f64)>,
    smooth: Option<ScalarJet>,
}

impl CompiledWeight {
    fn new(q: &QasDescriptor) -> Self {
        let n = q.dim();
        let vars = real_analytic_vars(n);
        let smooth = if q.smooth_part().is_zero() { None } else { Some(ScalarJet::new(n, q.smooth_part())) };
        if q.generators().is_empty() {
            return CompiledWeight { n, power: None, base: None, smooth };
        }
        let mut sum = Polynomial::zero(&vars);
        for f in q.generators() {
            let fr = f.embed(&vars).expect("holomorphic variables embed");
            let fb = segre_core::form::conjugate_poly(n, &fr);
            sum = &sum + &(&fr * &fb);
        }
        let c = q.exponent();
        if c.denom().is_one() {
            let e = c.numer().to_u32().expect("integer exponent fits");
            CompiledWeight { n, power: Some(ScalarJet::new(n, &sum.pow(e))), base: None, smooth }
        } else {
            CompiledWeight { n, power: None, base: Some((ScalarJet::new(n, &sum), rat_to_f64(c))), smooth }
        }
    }

    fn eval(&self, zz: &[Complex64]) -> ScalarJetValue {
        let n = self.n;
        let one = ScalarJetValue { v: Complex64::new(1.0, 0.0), d: vec![ZERO; n], db: vec![ZERO; n], dd: vec![ZERO; n * n] };
        let q = if let Some(p) = &self.power {
            p.eval(zz)
        } else if let Some((s, c)) = &self.base {
            let sv = s.eval(zz);
            let p = sv.v.re;
            if p <= 0.0 {
                s.zero_value()
            } else {
                // Chain rule for P^c.
                let f0 = p.powf(*c);
                let f1 = c * p.powf(c - 1.0);
                let f2 = c * (c - 1.0) * p.powf(c - 2.0);
                let mut out = ScalarJetValue { v: Complex64::new(f0, 0.0), d: vec![ZERO; n], db: vec![ZERO; n], dd: vec![ZERO; n * n] };
                for a in 0..n {
                    out.d[a] = sv.d[a] * f1;
                    out.db[a] = sv.db[a] * f1;
                }
                for a in 0..n {
                    for b in 0..n {
                        out.dd[a * n + b] = sv.dd[a * n + b] * f1 + sv.d[a] * sv.db[b] * f2;
                    }
                }
                out
            }
        } else {
            one.clone()
        };
        let e = match &self.smooth {
            None => one,
            Some(b) => {
                let bv = b.eval(zz);
                let ev = bv.v.re.exp();
                let mut out = ScalarJetValue { v: Complex64::new(ev, 0.0), d: vec![ZERO; n], db: vec![ZERO; n], dd: vec![ZERO; n * n] };
                for a in 0..n {
                    out.d[a] = bv.d[a] * ev;
                    out.db[a] = bv.db[a] * ev;
                }
                for a in 0..n {
                    for c in 0..n {
                        out.dd[a * n + c] = (bv.dd[a * n + c] + bv.d[a] * bv.db[c]) * ev;
                    }
                }
                out
            }
        };
        // Product rule for q·e.
        let mut out = ScalarJetValue { v: q.v * e.v, d: vec![ZERO; n], db: vec![ZERO; n], dd: vec![ZERO; n * n] };
        for a in 0..n {
            out.d[a] = q.d[a] * e.v + q.v * e.d[a];
            out.db[a] = q.db[a] * e.v + q.v * e.db[a];
        }
        for a in 0..n {
            for b in 0..n {
                out.dd[a * n + b] = q.dd[a * n + b] * e.v + q.d[a] * e.db[b] + q.db[b] * e.d[a] + q.v * e.dd[a * n + b];
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Smooth(CompiledHermitian),
    Morphism { m: usize, g: Vec<NumPoly>, dg: Vec<Vec<NumPoly>>, target: Option<CompiledHermitian> },
    Diagonal(Vec<CompiledWeight>),
    Sum(Vec<CompiledMetric>),
}

/// A metric compiled for repeated jet evaluation.
#[derive(Clone, Debug)]
pub struct CompiledMetric {
    n: usize,
    r: usize,
    kind: Kind,
    /// Block index of every fiber coordinate and whether that block is regularized.
    blocks: Vec<usize>,
    regularized: Vec<bool>,
}

impl CompiledMetric {
    pub fn new(metric: &SingularMetric, n: usize) -> Self {
        let r = metric.rank();
        let kind = match metric {
            SingularMetric::Smooth(h) => Kind::Smooth(CompiledHermitian::new(h)),
            SingularMetric::MorphismInduced { g, target } => {
                let m = g.len();
                let flat: Vec<&Polynomial> = g.iter().flatten().collect();
                Kind::Morphism {
                    m,
                    g: flat.iter().map(|p| p.to_numeric()).collect(),
                    dg: (0..n).map(|a| flat.iter().map(|p| p.derivative(a).to_numeric()).collect()).collect(),
                    target: target.as_ref().map(CompiledHermitian::new),
                }
            }
            SingularMetric::DiagonalQas(w) => Kind::Diagonal(w.iter().map(CompiledWeight::new).collect()),
            SingularMetric::DirectSum(parts) => Kind::Sum(parts.iter().map(|p| CompiledMetric::new(p, n)).collect()),
        };
        let (blocks, regularized) = match metric {
            SingularMetric::DirectSum(parts) => {
                let mut b = Vec::new();
                let mut reg = Vec::new();
                for (k, p) in parts.iter().enumerate() {
                    b.extend(std::iter::repeat(k).take(p.rank()));
                    reg.push(!p.is_smooth_kind());
                }
                (b, reg)
            }
            _ => (vec![0; r], vec![true]),
        };
        CompiledMetric { n, r, kind, blocks, regularized }
    }

    pub fn smooth(h: &HermitianPolyMatrix) -> Self {
        Self::new(&SingularMetric::Smooth(h.clone()), h.dim())
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn base_dim(&self) -> usize {
        self.n
    }

    /// Whether `h₀` contributes to entry `(i, j)` of the regularization `h + ε·h₀`.
    pub fn regularizes(&self, i: usize, j: usize) -> bool {
        self.blocks[i] == self.blocks[j] && self.regularized[self.blocks[i]]
    }

    pub fn jet_into(&self, x: &[Complex64], out: &mut MatrixJet) {
        let mut zz = x.to_vec();
        zz.extend(x.iter().map(|c| c.conj()));
        out.fill_zero();
        self.jet_block(&zz, out, 0);
    }

    /// Jet of `h + ε·h₀`.
    pub fn regularized_jet_into(&self, x: &[Complex64], eps: f64, reference: &CompiledMetric, scratch: &mut MatrixJet, out: &mut MatrixJet) {
        self.jet_into(x, out);
        if eps > 0.0 {
            reference.jet_into(x, scratch);
            out.add_scaled_masked(eps, scratch, |i, j| self.regularizes(i, j));
        }
    }

    fn jet_block(&self, zz: &[Complex64], out: &mut MatrixJet, offset: usize) {
        let n = self.n;
        match &self.kind {
            Kind::Smooth(h) => h.jet_into(zz, out, offset),
            Kind::Morphism { m, g, dg, target } => {
                let (m, r) = (*m, self.r);
                let x = &zz[..n];
                let gv = DMatrix::from_fn(m, r, |i, j| g[i * r + j].eval(x));
                let dgv: Vec<DMatrix<Complex64>> = dg.iter().map(|da| DMatrix::from_fn(m, r, |i, j| da[i * r + j].eval(x))).collect();
                let (h, d, dd) = match target {
                    None => {
                        let h = gv.adjoint() * &gv;
                        let d: Vec<_> = dgv.iter().map(|da| gv.adjoint() * da).collect();
                        let mut dd = Vec::with_capacity(n * n);
                        for a in 0..n {
                            for b in 0..n {
                                dd.push(dgv[b].adjoint() * &dgv[a]);
                            }
                        }
                        (h, d, dd)
                    }
                    Some(t) => {
                        let mut tj = MatrixJet::zeros(n, m);
                        t.jet_into(zz, &mut tj, 0);
                        let ga = gv.adjoint();
                        let h = &ga * &tj.h * &gv;
                        let d: Vec<_> = (0..n).map(|a| &ga * &tj.d[a] * &gv + &ga * &tj.h * &dgv[a]).collect();
                        let mut dd = Vec::with_capacity(n * n);
                        for a in 0..n {
                            for b in 0..n {
                                let gba = dgv[b].adjoint();
                                let tdb = tj.d[b].adjoint();
                                dd.push(&ga * &tj.dd[a * n + b] * &gv + &gba * &tj.d[a] * &gv + &ga * &tdb * &dgv[a] + &gba * &tj.h * &dgv[a]);
                            }
                        }
                        (h, d, dd)
                    }
                };
                out.h.view_mut((offset, offset), (r, r)).copy_from(&h);
                for a in 0..n {
                    out.d[a].view_mut((offset, offset), (r, r)).copy_from(&d[a]);
                }
                for (k, m) in dd.iter().enumerate() {
                    out.dd[k].view_mut((offset, offset), (r, r)).copy_from(m);
                }
            }
            Kind::Diagonal(ws) => {
                for (j, w) in ws.iter().enumerate() {
                    let v = w.eval(zz);
                    let p = offset + j;
                    out.h[(p, p)] = v.v;
                    for a in 0..n {
                        out.d[a][(p, p)] = v.d[a];
                        for b in 0..n {
                            out.dd[a * n + b][(p, p)] = v.dd[a * n + b];
                        }
                    }
                }
            }
            Kind::Sum(parts) => {
                let mut off = offset;
                for p in parts {
                    p.jet_block(zz, out, off);
                    off += p.r;
                }
            }
        }
    }

    /// `h(x)` only.
    pub fn value(&self, x: &[Complex64]) -> DMatrix<Complex64> {
        let mut jet = MatrixJet::zeros(self.n, self.r);
        self.jet_into(x, &mut jet);
        jet.h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use segre_core::gauss::rat;
    use segre_core::parse::{parse_holomorphic, parse_real_analytic};

    fn numeric_jet(m: &CompiledMetric, x: &[Complex64]) -> MatrixJet {
        // Finite differences of h for comparison.
        let n = m.base_dim();
        let r = m.rank();
        let step = 1e-4;
        let mut out = MatrixJet::zeros(n, r);
        out.h = m.value(x);
        let shifted = |a: usize, dz: Complex64| {
            let mut y = x.to_vec();
            y[a] += dz;
            m.value(&y)
        };
        for a in 0..n {
            let dx = (shifted(a, Complex64::new(step, 0.0)) - shifted(a, Complex64::new(-step, 0.0))) / Complex64::new(2.0 * step, 0.0);
            let dy = (shifted(a, Complex64::new(0.0, step)) - shifted(a, Complex64::new(0.0, -step))) / Complex64::new(2.0 * step, 0.0);
            out.d[a] = (dx - dy * Complex64::new(0.0, 1.0)) * Complex64::new(0.5, 0.0);
        }
        out
    }

    #[test]
    fn weight_jets_match_finite_differences() {
        let q = QasDescriptor::new(1, rat(3, 2), vec![parse_holomorphic("x1^2+1", 1).unwrap()], parse_real_analytic("x1*xb1", 1).unwrap()).unwrap();
        let m = CompiledMetric::new(&SingularMetric::DiagonalQas(vec![q]), 1);
        let x = [Complex64::new(0.3, -0.2)];
        let mut jet = MatrixJet::zeros(1, 1);
        m.jet_into(&x, &mut jet);
        let fd = numeric_jet(&m, &x);
        assert!((jet.h[(0, 0)] - fd.h[(0, 0)]).norm() < 1e-12);
        assert!((jet.d[0][(0, 0)] - fd.d[0][(0, 0)]).norm() < 1e-6);
    }

    #[test]
    fn morphism_with_target_matches_finite_differences() {
        let g = vec![vec![parse_holomorphic("x1", 2).unwrap(), parse_holomorphic("x2^2", 2).unwrap()], vec![parse_holomorphic("1", 2).unwrap(), parse_holomorphic("x1*x2", 2).unwrap()]];
        let p = |s: &str| parse_real_analytic(s, 2).unwrap();
        let t = HermitianPolyMatrix::new(2, vec![vec![p("2+x1*xb1"), p("x2")], vec![p("xb2"), p("1")]]).unwrap();
        let m = CompiledMetric::new(&SingularMetric::MorphismInduced { g, target: Some(t) }, 2);
        let x = [Complex64::new(0.3, -0.2), Complex64::new(-0.1, 0.4)];
        let mut jet = MatrixJet::zeros(2, 2);
        m.jet_into(&x, &mut jet);
        let fd = numeric_jet(&m, &x);
        for a in 0..2 {
            assert!((&jet.d[a] - &fd.d[a]).norm() < 1e-6);
        }
        // Mixed second derivatives by differencing the first ones.
        let step = 1e-4;
        for a in 0..2 {
            for b in 0..2 {
                let dbar = |y: &[Complex64]| {
                    let mut j = MatrixJet::zeros(2, 2);
                    m.jet_into(y, &mut j);
                    j.d[a].clone()
                };
                let mut yp = x.to_vec();
                let mut ym = x.to_vec();
                yp[b] += step;
                ym[b] -= step;
                let dx = (dbar(&yp) - dbar(&ym)) / Complex64::new(2.0 * step, 0.0);
                let mut yp = x.to_vec();
                let mut ym = x.to_vec();
                yp[b] += Complex64::new(0.0, step);
                ym[b] -= Complex64::new(0.0, step);
                let dy = (dbar(&yp) - dbar(&ym)) / Complex64::new(2.0 * step, 0.0);
                let dbar_b = (dx + dy * Complex64::new(0.0, 1.0)) * Complex64::new(0.5, 0.0);
                assert!((&jet.dd[a * 2 + b] - &dbar_b).norm() < 1e-6, "({a},{b})");
            }
        }
    }
}
