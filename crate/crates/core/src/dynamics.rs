//! Friedkin-Johnsen opinion dynamics on a [`Digraph`].
//!
//! With Laplacian `L = D - A`, the expressed opinions evolve as
//! `z'_i = (s_i + sum_{j in N(i)} z_j) / (1 + d_i)` and converge to
//! `z = (I + L)^{-1} s`. The inverse `Omega = (I + L)^{-1}` is row stochastic
//! and its column means are the structure centralities `rho`, which weigh each
//! internal opinion in the average equilibrium opinion:
//! `mean(z) = sum_j rho_j s_j`.

use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Digraph;

/// Largest n for which dense O(n^3) factorizations are attempted by default.
pub const DEFAULT_DENSE_CAP: usize = 20_000;
pub const DEFAULT_ITER_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 1_000_000;

/// Per-node internal opinions, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct OpinionVector(Vec<f64>);

impl OpinionVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::InvalidOpinions(format!(
                "s[{i}] = {v} lies outside [0, 1]"
            )));
        }
        Ok(Self(values))
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `1 - s`, the vector for which OpinionMin is equivalent to OpinionMax on `s`.
    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|v| 1.0 - v).collect())
    }

    /// Copy of `self` with the listed entries overwritten by `value`.
    pub fn with_values_at(&self, nodes: &[usize], value: f64) -> Result<Self> {
        let mut out = self.0.clone();
        for &i in nodes {
            if i >= out.len() {
                return Err(Error::DimensionMismatch {
                    expected: out.len(),
                    actual: i + 1,
                });
            }
            out[i] = value;
        }
        Self::new(out)
    }

    pub fn check_len(&self, g: &Digraph) -> Result<()> {
        if self.len() != g.n() {
            return Err(Error::DimensionMismatch {
                expected: g.n(),
                actual: self.len(),
            });
        }
        Ok(())
    }

    /// Parses one real per line. Blank lines and `#` comments are skipped.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut values = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: "<stream>".into(),
                source,
            })?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let v: f64 = t.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("{t:?} is not a real number"),
            })?;
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("opinion {v} lies outside [0, 1]"),
                });
            }
            values.push(v);
        }
        Self::new(values)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(std::io::BufReader::new(file))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.0 {
            writeln!(out, "{v}").unwrap();
        }
        out
    }
}

impl TryFrom<Vec<f64>> for OpinionVector {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<OpinionVector> for Vec<f64> {
    fn from(s: OpinionVector) -> Self {
        s.0
    }
}

/// Expressed opinions `z`, either at equilibrium or from an iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressedOpinions {
    pub values: Vec<f64>,
    pub converged: bool,
    /// Number of FJ steps taken; `None` for the direct solve.
    pub iterations: Option<usize>,
}

impl ExpressedOpinions {
    pub fn average(&self) -> f64 {
        average_opinion(&self.values)
    }

    /// CSV with header `node,z`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,z\n");
        for (i, z) in self.values.iter().enumerate() {
            writeln!(out, "{i},{z}").unwrap();
        }
        out
    }
}

/// How to reach the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EquilibriumMethod {
    /// LU factorization of `I + L`.
    Solve,
    /// Repeated FJ steps from `z(0) = s`.
    Iterate { tol: f64, max_iters: usize },
}

impl EquilibriumMethod {
    pub fn iterate() -> Self {
        Self::Iterate {
            tol: DEFAULT_ITER_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

/// One synchronous FJ update.
pub fn step_opinions(g: &Digraph, s: &OpinionVector, z: &[f64]) -> Result<Vec<f64>> {
    s.check_len(g)?;
    if z.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            actual: z.len(),
        });
    }
    let mut next = vec![0.0; g.n()];
    step_into(g, s.as_slice(), z, &mut next);
    Ok(next)
}

fn step_into(g: &Digraph, s: &[f64], z: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let nbrs = g.out_neighbors(i);
        let sum: f64 = nbrs.iter().map(|&j| z[j as usize]).sum();
        *o = (s[i] + sum) / (1 + nbrs.len()) as f64;
    }
}

/// Equilibrium expressed opinions `z = (I + L)^{-1} s`.
///
/// The iterative method stops once the step change, scaled by the maximum
/// out-degree, drops below `tol`. The FJ map is a max-norm contraction with
/// factor `dmax / (1 + dmax)`, so the reported iterate is then within `tol`
/// of the fixed point.
pub fn equilibrium(
    g: &Digraph,
    s: &OpinionVector,
    method: EquilibriumMethod,
) -> Result<ExpressedOpinions> {
    s.check_len(g)?;
    match method {
        EquilibriumMethod::Solve => {
            let solver = EquilibriumSolver::new(g, usize::MAX)?;
            Ok(ExpressedOpinions {
                values: solver.solve(s)?,
                converged: true,
                iterations: None,
            })
        }
        EquilibriumMethod::Iterate { tol, max_iters } => {
            if !(tol > 0.0) {
                return Err(Error::InvalidParameter(format!("tol must be > 0, got {tol}")));
            }
            let scale = g.max_out_degree().max(1) as f64;
            let mut z = s.as_slice().to_vec();
            let mut next = vec![0.0; g.n()];
            let mut change = f64::INFINITY;
            for it in 1..=max_iters {
                step_into(g, s.as_slice(), &z, &mut next);
                change = z
                    .iter()
                    .zip(&next)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                std::mem::swap(&mut z, &mut next);
                if change * scale < tol {
                    return Ok(ExpressedOpinions {
                        values: z,
                        converged: true,
                        iterations: Some(it),
                    });
                }
            }
            Err(Error::NotConverged {
                iterations: max_iters,
                last_change: change,
                last: z,
            })
        }
    }
}

/// Arithmetic mean of the expressed opinions; `NaN` for an empty slice.
pub fn average_opinion(z: &[f64]) -> f64 {
    z.iter().sum::<f64>() / z.len() as f64
}

/// Dense `I + L`, or its transpose.
fn system_matrix(g: &Digraph, transpose: bool) -> DMatrix<f64> {
    let n = g.n();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = 1.0 + g.out_degree(i) as f64;
        for &j in g.out_neighbors(i) {
            let (r, c) = if transpose { (j as usize, i) } else { (i, j as usize) };
            m[(r, c)] = -1.0;
        }
    }
    m
}

fn check_cap(g: &Digraph, cap: usize) -> Result<()> {
    if g.n() > cap {
        return Err(Error::SizeCapExceeded { n: g.n(), cap });
    }
    Ok(())
}

/// A factorized `I + L`, reusable across opinion vectors on the same graph.
pub struct EquilibriumSolver {
    n: usize,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl EquilibriumSolver {
    pub fn new(g: &Digraph, cap: usize) -> Result<Self> {
        check_cap(g, cap)?;
        Ok(Self {
            n: g.n(),
            lu: system_matrix(g, false).lu(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn solve(&self, s: &OpinionVector) -> Result<Vec<f64>> {
        if s.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: s.len(),
            });
        }
        let rhs = DVector::from_column_slice(s.as_slice());
        let z = self.lu.solve(&rhs).ok_or(Error::Singular)?;
        Ok(z.iter().copied().collect())
    }

    /// Average equilibrium opinion `g(z)` for internal opinions `s`.
    pub fn average_opinion(&self, s: &OpinionVector) -> Result<f64> {
        Ok(average_opinion(&self.solve(s)?))
    }
}

/// Dense `Omega = (I + L)^{-1}`.
#[derive(Debug, Clone)]
pub struct FundamentalMatrix {
    entries: DMatrix<f64>,
}

impl FundamentalMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.entries.row_iter().map(|r| r.sum()).collect()
    }

    /// Column means of `Omega`.
    pub fn column_means(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.entries.column_iter().map(|c| c.sum() / n).collect()
    }

    /// `Omega * s`.
    pub fn apply(&self, s: &OpinionVector) -> Vec<f64> {
        let v = &self.entries * DVector::from_column_slice(s.as_slice());
        v.iter().copied().collect()
    }
}

pub fn fundamental_matrix(g: &Digraph, cap: usize) -> Result<FundamentalMatrix> {
    check_cap(g, cap)?;
    let n = g.n();
    let lu = system_matrix(g, false).lu();
    let entries = lu.solve(&DMatrix::identity(n, n)).ok_or(Error::Singular)?;
    Ok(FundamentalMatrix { entries })
}

/// Where a centrality vector came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CentralitySource {
    Exact,
    Sampled { samples: usize },
}

/// Structure centralities `rho` (or their estimate).
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector {
    pub values: Vec<f64>,
    pub source: CentralitySource,
}

impl CentralityVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// CSV with header `node,rho`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,rho\n");
        for (i, r) in self.values.iter().enumerate() {
            writeln!(out, "{i},{r}").unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CentralityMode {
    /// Column means of the full inverse.
    Dense,
    /// One solve of `(I + L)^T x = (1/n) 1`.
    #[default]
    SingleSolve,
}

/// Exact structure centrality `rho_j = (1/n) sum_i omega_ij`.
pub fn structure_centrality_exact(
    g: &Digraph,
    mode: CentralityMode,
    cap: usize,
) -> Result<CentralityVector> {
    check_cap(g, cap)?;
    let n = g.n();
    let values = match mode {
        CentralityMode::Dense => fundamental_matrix(g, cap)?.column_means(),
        CentralityMode::SingleSolve => {
            let rhs = DVector::from_element(n, 1.0 / n as f64);
            let x = system_matrix(g, true)
                .lu()
                .solve(&rhs)
                .ok_or(Error::Singular)?;
            x.iter().copied().collect()
        }
    };
    Ok(CentralityVector {
        values,
        source: CentralitySource::Exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc01() -> Digraph {
        Digraph::from_arcs(2, &[(0, 1)]).unwrap()
    }

    fn two_cycle() -> Digraph {
        Digraph::from_arcs(2, &[(0, 1), (1, 0)]).unwrap()
    }

    fn ov(v: &[f64]) -> OpinionVector {
        OpinionVector::new(v.to_vec()).unwrap()
    }

    /// Inverse of a 2x2 matrix by the adjugate formula.
    fn inverse_2x2(a: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        [
            [a[1][1] / det, -a[0][1] / det],
            [-a[1][0] / det, a[0][0] / det],
        ]
    }

    #[test]
    fn opinions_outside_unit_interval_rejected() {
        assert!(OpinionVector::new(vec![0.5, 1.5]).is_err());
        assert!(OpinionVector::new(vec![-0.1]).is_err());
        assert!(OpinionVector::new(vec![f64::NAN]).is_err());
        assert!(OpinionVector::parse("0.1\n\n# x\n1\n".as_bytes()).is_ok());
        assert!(matches!(
            OpinionVector::parse("0.1\n2\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn step_examples() {
        let g = Digraph::empty(1);
        assert_eq!(step_opinions(&g, &ov(&[0.7]), &[0.0]).unwrap(), vec![0.7]);

        assert_eq!(
            step_opinions(&arc01(), &ov(&[1.0, 0.0]), &[0.0, 0.0]).unwrap(),
            vec![0.5, 0.0]
        );
        assert_eq!(
            step_opinions(&two_cycle(), &ov(&[1.0, 0.0]), &[1.0, 0.0]).unwrap(),
            vec![0.5, 0.5]
        );
        assert!(matches!(
            step_opinions(&arc01(), &ov(&[1.0]), &[0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn equilibrium_examples() {
        let g = Digraph::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let z = equilibrium(&g, &OpinionVector::zeros(3), EquilibriumMethod::Solve).unwrap();
        assert!(z.values.iter().all(|&v| v == 0.0));

        let z = equilibrium(&Digraph::empty(1), &ov(&[0.3]), EquilibriumMethod::Solve).unwrap();
        assert_eq!(z.values, vec![0.3]);

        let inv = inverse_2x2([[2.0, -1.0], [0.0, 1.0]]);
        let expected = [inv[0][0] * 1.0 + inv[0][1] * 0.0, inv[1][0] * 1.0];
        for method in [EquilibriumMethod::Solve, EquilibriumMethod::iterate()] {
            let z = equilibrium(&arc01(), &ov(&[1.0, 0.0]), method).unwrap();
            assert!((z.values[0] - expected[0]).abs() < 1e-9);
            assert!((z.values[1] - expected[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn iterate_reports_non_convergence() {
        let g = two_cycle();
        let method = EquilibriumMethod::Iterate {
            tol: 1e-14,
            max_iters: 2,
        };
        match equilibrium(&g, &ov(&[1.0, 0.0]), method) {
            Err(Error::NotConverged { iterations, last, .. }) => {
                assert_eq!(iterations, 2);
                assert_eq!(last.len(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
        let bad = EquilibriumMethod::Iterate {
            tol: 0.0,
            max_iters: 10,
        };
        assert!(equilibrium(&g, &ov(&[1.0, 0.0]), bad).is_err());
    }

    #[test]
    fn average_examples() {
        assert_eq!(average_opinion(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(average_opinion(&[1.0, 1.0]), 1.0);
        assert_eq!(average_opinion(&[0.5, 0.0]), 0.25);
    }

    #[test]
    fn fundamental_matrix_examples() {
        let omega = fundamental_matrix(&Digraph::empty(1), DEFAULT_DENSE_CAP).unwrap();
        assert_eq!(omega.get(0, 0), 1.0);

        for (g, a) in [
            (arc01(), [[2.0, -1.0], [0.0, 1.0]]),
            (two_cycle(), [[2.0, -1.0], [-1.0, 2.0]]),
        ] {
            let omega = fundamental_matrix(&g, DEFAULT_DENSE_CAP).unwrap();
            let inv = inverse_2x2(a);
            for i in 0..2 {
                for j in 0..2 {
                    assert!((omega.get(i, j) - inv[i][j]).abs() < 1e-12);
                }
            }
        }
        // Hand values: [[1/2, 1/2], [0, 1]] and [[2/3, 1/3], [1/3, 2/3]].
        let omega = fundamental_matrix(&two_cycle(), DEFAULT_DENSE_CAP).unwrap();
        assert!((omega.get(0, 0) - 2.0 / 3.0).abs() < 1e-12);
        assert!((omega.get(1, 0) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn size_cap_refuses() {
        let g = Digraph::empty(5);
        assert!(matches!(
            fundamental_matrix(&g, 4),
            Err(Error::SizeCapExceeded { n: 5, cap: 4 })
        ));
        assert!(structure_centrality_exact(&g, CentralityMode::Dense, 4).is_err());
        assert!(EquilibriumSolver::new(&g, 4).is_err());
    }

    #[test]
    fn centrality_examples() {
        let rho = structure_centrality_exact(&Digraph::empty(1), CentralityMode::Dense, 10).unwrap();
        assert_eq!(rho.values, vec![1.0]);

        for mode in [CentralityMode::Dense, CentralityMode::SingleSolve] {
            let rho = structure_centrality_exact(&arc01(), mode, 10).unwrap();
            assert!((rho.values[0] - 0.25).abs() < 1e-12);
            assert!((rho.values[1] - 0.75).abs() < 1e-12);
            assert!((rho.sum() - 1.0).abs() < 1e-12);
            assert_eq!(rho.source, CentralitySource::Exact);
        }
    }

    #[test]
    fn csv_exports() {
        let z = ExpressedOpinions {
            values: vec![0.5, 0.0],
            converged: true,
            iterations: None,
        };
        assert_eq!(z.to_csv(), "node,z\n0,0.5\n1,0\n");
        let rho = CentralityVector {
            values: vec![0.25, 0.75],
            source: CentralitySource::Exact,
        };
        assert_eq!(rho.to_csv(), "node,rho\n0,0.25\n1,0.75\n");
    }
}
