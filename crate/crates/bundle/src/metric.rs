//! Hermitian metrics on the trivial bundle `ℂ^r × ℂ^n`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use segre_core::form::conjugate_poly;
use segre_core::poly::{holomorphic_vars, real_analytic_vars};
use segre_core::{GaussRational, Polynomial, QasDescriptor};
use segre_grid::GridChart;

use crate::error::BundleError;
use crate::jet::{CompiledMetric, MatrixJet};

/// A Hermitian matrix whose entries are real-analytic polynomials in `x1..xn, xb1..xbn`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianPolyMatrix {
    dim: usize,
    entries: Vec<Vec<Polynomial>>,
}

impl HermitianPolyMatrix {
    pub fn new(dim: usize, entries: Vec<Vec<Polynomial>>) -> Result<Self, BundleError> {
        let r = entries.len();
        if r == 0 || entries.iter().any(|row| row.len() != r) {
            return Err(BundleError::InvalidMetric("matrix must be square and non-empty".into()));
        }
        let vars = real_analytic_vars(dim);
        for (i, row) in entries.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if p.vars() != vars.as_slice() {
                    return Err(BundleError::InvalidMetric(format!("entry ({i},{j}) is not in the real-analytic variables")));
                }
                if conjugate_poly(dim, p) != entries[j][i] {
                    return Err(BundleError::InvalidMetric(format!("entries ({i},{j}) and ({j},{i}) are not conjugate")));
                }
            }
        }
        Ok(HermitianPolyMatrix { dim, entries })
    }

    pub fn identity(dim: usize, r: usize) -> Self {
        Self::diagonal(dim, &vec![GaussRational::from_int(1); r])
    }

    /// A constant diagonal matrix; entries must be real.
    pub fn diagonal(dim: usize, values: &[GaussRational]) -> Self {
        let vars = real_analytic_vars(dim);
        let r = values.len();
        let entries = (0..r)
            .map(|i| (0..r).map(|j| if i == j { Polynomial::constant(&vars, values[i].clone()) } else { Polynomial::zero(&vars) }).collect())
            .collect();
        HermitianPolyMatrix { dim, entries }
    }

    /// Block-diagonal sum.
    pub fn block_diagonal(blocks: &[HermitianPolyMatrix]) -> Result<Self, BundleError> {
        let dim = blocks.first().map(|b| b.dim).ok_or_else(|| BundleError::InvalidMetric("no blocks".into()))?;
        if blocks.iter().any(|b| b.dim != dim) {
            return Err(BundleError::InvalidMetric("blocks over different bases".into()));
        }
        let vars = real_analytic_vars(dim);
        let r: usize = blocks.iter().map(|b| b.size()).sum();
        let mut entries = vec![vec![Polynomial::zero(&vars); r]; r];
        let mut off = 0;
        for b in blocks {
            for i in 0..b.size() {
                for j in 0..b.size() {
                    entries[off + i][off + j] = b.entries[i][j].clone();
                }
            }
            off += b.size();
        }
        Ok(HermitianPolyMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<Polynomial>] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, p)| if i == j { p.is_one() } else { p.is_zero() }))
    }

    /// Pulls every entry back along `x = τ(t)`, where `images` are polynomials in one variable.
    pub fn pullback(&self, images: &[Polynomial]) -> Result<Self, BundleError> {
        let real_images = real_images(self.dim, images)?;
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(|p| p.compose(&real_images).map_err(BundleError::from)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        HermitianPolyMatrix::new(1, entries)
    }
}

/// Images of `x1..xn, xb1..xbn` under `x = τ(t)` as real-analytic polynomials in `t, tb`.
pub(crate) fn real_images(dim: usize, images: &[Polynomial]) -> Result<Vec<Polynomial>, BundleError> {
    if images.len() != dim {
        return Err(BundleError::InvalidMetric(format!("curve has {} components for a base of dimension {dim}", images.len())));
    }
    let rv = real_analytic_vars(1);
    let mut out = Vec::with_capacity(2 * dim);
    for p in images {
        out.push(p.embed(&rv)?);
    }
    for p in images {
        out.push(conjugate_poly(1, &p.embed(&rv)?));
    }
    Ok(out)
}

/// A possibly singular Hermitian metric on a trivial bundle of rank `r`.
#[derive(Clone, Debug, PartialEq)]
pub enum SingularMetric {
    /// `|α|² = α* H(x) α` with polynomial entries.
    Smooth(HermitianPolyMatrix),
    /// `|α|² = |g(x)α|²_{h_F}` for an `m × r` holomorphic matrix `g` (rows index the target).
    MorphismInduced { g: Vec<Vec<Polynomial>>, target: Option<HermitianPolyMatrix> },
    /// `|α|² = Σ e^{φ_j}|α_j|²` with quasi-plurisubharmonic weights `φ_j`.
    DiagonalQas(Vec<QasDescriptor>),
    /// Orthogonal direct sum; smooth summands are not regularized.
    DirectSum(Vec<SingularMetric>),
}

impl SingularMetric {
    pub fn rank(&self) -> usize {
        match self {
            SingularMetric::Smooth(h) => h.size(),
            SingularMetric::MorphismInduced { g, .. } => g.first().map_or(0, |row| row.len()),
            SingularMetric::DiagonalQas(w) => w.len(),
            SingularMetric::DirectSum(parts) => parts.iter().map(|p| p.rank()).sum(),
        }
    }

    /// Checks shapes and variables against a base of dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<(), BundleError> {
        match self {
            SingularMetric::Smooth(h) => {
                if h.dim() != dim {
                    return Err(BundleError::InvalidMetric("smooth metric over a different base".into()));
                }
            }
            SingularMetric::MorphismInduced { g, target } => {
                let r = self.rank();
                if g.is_empty() || r == 0 || g.iter().any(|row| row.len() != r) {
                    return Err(BundleError::InvalidMetric("g must be a non-empty rectangular matrix".into()));
                }
                let hv = holomorphic_vars(dim);
                if g.iter().flatten().any(|p| p.vars() != hv.as_slice()) {
                    return Err(BundleError::InvalidMetric("entries of g must be holomorphic polynomials in x1..xn".into()));
                }
                if let Some(t) = target {
                    if t.dim() != dim || t.size() != g.len() {
                        return Err(BundleError::InvalidMetric("target metric does not match the rows of g".into()));
                    }
                }
            }
            SingularMetric::DiagonalQas(w) => {
                if w.is_empty() || w.iter().any(|q| q.dim() != dim) {
                    return Err(BundleError::InvalidMetric("weights must be non-empty and over the base".into()));
                }
            }
            SingularMetric::DirectSum(parts) => {
                if parts.is_empty() {
                    return Err(BundleError::InvalidMetric("empty direct sum".into()));
                }
                for p in parts {
                    p.validate(dim)?;
                }
            }
        }
        Ok(())
    }

    pub fn is_smooth_kind(&self) -> bool {
        matches!(self, SingularMetric::Smooth(_))
    }

    /// Restriction along a curve `x = τ(t)`, giving a metric over a one-dimensional base.
    pub fn pullback(&self, dim: usize, images: &[Polynomial]) -> Result<SingularMetric, BundleError> {
        let t_vars = holomorphic_vars(1);
        Ok(match self {
            SingularMetric::Smooth(h) => SingularMetric::Smooth(h.pullback(images)?),
            SingularMetric::MorphismInduced { g, target } => SingularMetric::MorphismInduced {
                g: g.iter()
                    .map(|row| row.iter().map(|p| p.compose(images).and_then(|q| q.embed(&t_vars)).map_err(BundleError::from)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<_, _>>()?,
                target: target.as_ref().map(|t| t.pullback(images)).transpose()?,
            },
            SingularMetric::DiagonalQas(weights) => {
                let real = real_images(dim, images)?;
                SingularMetric::DiagonalQas(
                    weights
                        .iter()
                        .map(|q| {
                            let gens: Vec<Polynomial> = q
                                .generators()
                                .iter()
                                .map(|f| f.compose(images).and_then(|p| p.embed(&t_vars)))
                                .collect::<Result<_, _>>()?;
                            if !gens.is_empty() && gens.iter().all(|p| p.is_zero()) {
                                return Err(BundleError::Unsupported("a diagonal weight is identically singular on the curve".into()));
                            }
                            let smooth = q.smooth_part().compose(&real)?;
                            QasDescriptor::new(1, q.exponent().clone(), gens, smooth).map_err(BundleError::from)
                        })
                        .collect::<Result<_, _>>()?,
                )
            }
            SingularMetric::DirectSum(parts) => SingularMetric::DirectSum(parts.iter().map(|p| p.pullback(dim, images)).collect::<Result<_, _>>()?),
        })
    }
}

/// A trivialized bundle over a grid chart with a smooth reference metric `h₀`.
#[derive(Clone, Debug)]
pub struct BundleSpec {
    pub base_dim: usize,
    pub rank: usize,
    pub chart: GridChart,
    pub reference: HermitianPolyMatrix,
}

impl BundleSpec {
    pub fn new(chart: GridChart, rank: usize, reference: Option<HermitianPolyMatrix>) -> Result<Self, BundleError> {
        let base_dim = chart.dim();
        if rank == 0 {
            return Err(BundleError::InvalidMetric("rank must be positive".into()));
        }
        let reference = reference.unwrap_or_else(|| HermitianPolyMatrix::identity(base_dim, rank));
        if reference.size() != rank || reference.dim() != base_dim {
            return Err(BundleError::InvalidMetric("reference metric has the wrong shape".into()));
        }
        let spec = BundleSpec { base_dim, rank, chart, reference };
        spec.check_reference()?;
        Ok(spec)
    }

    /// Spot-checks positive definiteness of `h₀` on a sub-lattice of nodes.
    fn check_reference(&self) -> Result<(), BundleError> {
        let compiled = CompiledMetric::smooth(&self.reference);
        let mut jet = MatrixJet::zeros(self.base_dim, self.rank);
        let n = self.chart.n_nodes();
        let stride = (n / 257).max(1);
        for node in (0..n).step_by(stride) {
            let x = self.chart.point(node);
            compiled.jet_into(&x, &mut jet);
            if !is_positive_definite(&jet.h) {
                return Err(BundleError::InvalidMetric(format!("reference metric is not positive definite at {x:?}")));
            }
        }
        Ok(())
    }
}

pub(crate) fn is_positive_definite(h: &DMatrix<Complex64>) -> bool {
    h.iter().all(|c| c.re.is_finite() && c.im.is_finite()) && nalgebra::Cholesky::new(h.clone()).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use segre_core::parse::{parse_holomorphic, parse_real_analytic};

    #[test]
    fn hermitian_validation() {
        let p = |s: &str| parse_real_analytic(s, 1).unwrap();
        assert!(HermitianPolyMatrix::new(1, vec![vec![p("1"), p("x1")], vec![p("xb1"), p("2")]]).is_ok());
        assert!(HermitianPolyMatrix::new(1, vec![vec![p("1"), p("x1")], vec![p("x1"), p("2")]]).is_err());
    }

    #[test]
    fn pullback_of_morphism() {
        let g = vec![
            vec![parse_holomorphic("x1", 2).unwrap(), parse_holomorphic("0", 2).unwrap()],
            vec![parse_holomorphic("0", 2).unwrap(), parse_holomorphic("x2", 2).unwrap()],
        ];
        let m = SingularMetric::MorphismInduced { g, target: None };
        let curve = vec![parse_holomorphic("x1", 1).unwrap(), parse_holomorphic("x1", 1).unwrap()];
        let SingularMetric::MorphismInduced { g, .. } = m.pullback(2, &curve).unwrap() else { panic!() };
        assert_eq!(g[1][1], parse_holomorphic("x1", 1).unwrap());
    }
}
