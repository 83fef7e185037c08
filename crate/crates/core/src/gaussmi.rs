//! Jointly Gaussian covariance algebra and mutual information.
//!
//! Variables are proper complex Gaussians, so `h(X) = log det(pi e K)` and
//! every mutual information is a ratio of determinants in base 2.
//! Deterministic relations inside one argument set are handled by restricting
//! to the support; a deterministic relation across the two sets means the
//! information is unbounded and is reported as [`Error::SingularConditioning`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};

type C64 = Complex64;

/// Relative eigenvalue floor for rank decisions.
pub const EIG_FLOOR: f64 = 1e-12;
/// Pivot threshold below which the Cholesky fast path defers to eigendecomposition.
const CHOL_FLOOR: f64 = 1e-9;
/// Largest variable count handled on the stack.
const MAXN: usize = 12;

/// Covariance of a jointly Gaussian vector with named components.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSystem {
    labels: Vec<String>,
    cov: DMatrix<C64>,
}

impl GaussianSystem {
    /// Wrap a user covariance after checking it is Hermitian and PSD.
    pub fn from_cov(labels: Vec<String>, cov: DMatrix<C64>) -> Result<Self> {
        let n = labels.len();
        if cov.nrows() != n || cov.ncols() != n {
            return Err(Error::InvalidArgument("covariance shape does not match labels".into()));
        }
        if n > MAXN {
            return Err(Error::InvalidArgument(format!("at most {MAXN} variables supported")));
        }
        let scale = scale_of(cov.iter().copied(), n);
        for i in 0..n {
            for j in 0..n {
                if (cov[(i, j)] - cov[(j, i)].conj()).norm() > 1e-12 * scale {
                    return Err(Error::NonPsd);
                }
            }
        }
        let eig = cov.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|&l| l < -1e-9 * scale) {
            return Err(Error::NonPsd);
        }
        Ok(GaussianSystem { labels, cov })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn cov(&self) -> &DMatrix<C64> {
        &self.cov
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Covariance entry `E[X_i X_j^*]` by name.
    pub fn covariance(&self, x: &str, y: &str) -> Result<C64> {
        Ok(self.cov[(self.index(x)?, self.index(y)?)])
    }

    /// Debug dump: labels plus `[re, im]` pairs row by row.
    pub fn to_json(&self) -> serde_json::Value {
        let n = self.labels.len();
        let rows: Vec<Vec<[f64; 2]>> =
            (0..n).map(|i| (0..n).map(|j| [self.cov[(i, j)].re, self.cov[(i, j)].im]).collect()).collect();
        json!({ "labels": self.labels, "cov": rows })
    }

    fn flat(&self) -> Vec<C64> {
        let n = self.labels.len();
        let mut v = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                v.push(self.cov[(i, j)]);
            }
        }
        v
    }
}

/// One step of a linear Gaussian model.
#[derive(Debug, Clone)]
pub enum Assignment {
    /// Fresh Gaussian independent of everything declared before.
    Source { name: String, variance: f64 },
    /// Fresh jointly Gaussian group with the given covariance.
    Correlated { names: Vec<String>, cov: Vec<Vec<C64>> },
    /// Linear combination of previously declared variables.
    Linear { name: String, terms: Vec<(C64, String)> },
}

/// Build a system from an ordered list of assignments.
pub fn build_system(assignments: &[Assignment]) -> Result<GaussianSystem> {
    let mut b = SystemBuilder::new();
    for a in assignments {
        match a {
            Assignment::Source { name, variance } => {
                b.source(name, *variance)?;
            }
            Assignment::Correlated { names, cov } => {
                let names: Vec<&str> = names.iter().map(String::as_str).collect();
                b.correlated(&names, cov)?;
            }
            Assignment::Linear { name, terms } => {
                let terms: Vec<(C64, &str)> = terms.iter().map(|(c, s)| (*c, s.as_str())).collect();
                b.combine(name, &terms)?;
            }
        }
    }
    Ok(b.build())
}

/// Incremental construction of a linear Gaussian model over independent sources.
#[derive(Debug, Clone, Default)]
pub struct SystemBuilder {
    labels: Vec<String>,
    rows: Vec<Vec<C64>>,
    n_src: usize,
}

impl SystemBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_new(&self, name: &str) -> Result<()> {
        if self.labels.iter().any(|l| l == name) {
            return Err(Error::InvalidArgument(format!("variable `{name}` declared twice")));
        }
        if self.labels.len() >= MAXN {
            return Err(Error::InvalidArgument(format!("at most {MAXN} variables supported")));
        }
        Ok(())
    }

    fn row(&self, name: &str) -> Result<&Vec<C64>> {
        self.labels
            .iter()
            .position(|l| l == name)
            .map(|i| &self.rows[i])
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    fn push_sources(&mut self, k: usize) {
        self.n_src += k;
        for r in &mut self.rows {
            r.resize(self.n_src, C64::new(0.0, 0.0));
        }
    }

    /// Declare an independent `N(0, variance)` variable.
    pub fn source(&mut self, name: &str, variance: f64) -> Result<&mut Self> {
        self.check_new(name)?;
        if !(variance >= 0.0) || !variance.is_finite() {
            return Err(Error::NonPsd);
        }
        self.push_sources(1);
        let mut row = vec![C64::new(0.0, 0.0); self.n_src];
        row[self.n_src - 1] = C64::new(variance.sqrt(), 0.0);
        self.labels.push(name.to_string());
        self.rows.push(row);
        Ok(self)
    }

    /// Declare a jointly Gaussian group independent of earlier variables.
    pub fn correlated(&mut self, names: &[&str], cov: &[Vec<C64>]) -> Result<&mut Self> {
        let k = names.len();
        for n in names {
            self.check_new(n)?;
        }
        if cov.len() != k || cov.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidArgument("group covariance shape mismatch".into()));
        }
        let m = DMatrix::from_fn(k, k, |i, j| cov[i][j]);
        let scale = scale_of(m.iter().copied(), k);
        for i in 0..k {
            for j in 0..k {
                if !m[(i, j)].re.is_finite() || (m[(i, j)] - m[(j, i)].conj()).norm() > 1e-12 * scale {
                    return Err(Error::NonPsd);
                }
            }
        }
        let eig = m.symmetric_eigen();
        if eig.eigenvalues.iter().any(|&l| l < -1e-9 * scale) {
            return Err(Error::NonPsd);
        }
        let base = self.n_src;
        self.push_sources(k);
        for (i, n) in names.iter().enumerate() {
            let mut row = vec![C64::new(0.0, 0.0); self.n_src];
            for s in 0..k {
                let l = eig.eigenvalues[s].max(0.0).sqrt();
                row[base + s] = eig.eigenvectors[(i, s)] * l;
            }
            self.labels.push(n.to_string());
            self.rows.push(row);
        }
        Ok(self)
    }

    /// Declare `name = sum_k coef_k * var_k`.
    pub fn combine(&mut self, name: &str, terms: &[(C64, &str)]) -> Result<&mut Self> {
        self.check_new(name)?;
        let mut row = vec![C64::new(0.0, 0.0); self.n_src];
        for (c, v) in terms {
            let src = self.row(v)?;
            for (r, s) in row.iter_mut().zip(src) {
                *r += c * s;
            }
        }
        self.labels.push(name.to_string());
        self.rows.push(row);
        Ok(self)
    }

    /// Real-coefficient shorthand for [`SystemBuilder::combine`].
    pub fn combine_real(&mut self, name: &str, terms: &[(f64, &str)]) -> Result<&mut Self> {
        let t: Vec<(C64, &str)> = terms.iter().map(|(c, v)| (C64::new(*c, 0.0), *v)).collect();
        self.combine(name, &t)
    }

    pub fn build(&self) -> GaussianSystem {
        let n = self.labels.len();
        let cov = DMatrix::from_fn(n, n, |i, j| {
            self.rows[i].iter().zip(&self.rows[j]).map(|(x, y)| x * y.conj()).sum::<C64>()
        });
        GaussianSystem { labels: self.labels.clone(), cov }
    }
}

/// `I(A; B | C)` in bits.
pub fn mutual_info(sys: &GaussianSystem, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
    let idx = |s: &[&str]| s.iter().map(|n| sys.index(n)).collect::<Result<Vec<_>>>();
    let (ia, ib, ic) = (idx(a)?, idx(b)?, idx(c)?);
    mi_flat(&sys.flat(), sys.labels.len(), &ia, &ib, &ic)
}

/// Row-major covariance of variables given as coefficient rows over unit-variance independent sources.
pub fn cov_from_rows(rows: &[Vec<C64>]) -> Vec<C64> {
    let n = rows.len();
    let mut cov = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let v: C64 = rows[i].iter().zip(&rows[j]).map(|(x, y)| x * y.conj()).sum();
            cov[i * n + j] = v;
            cov[j * n + i] = v.conj();
        }
    }
    cov
}

/// `I(A; B | C)` on a row-major `n x n` covariance given by index sets.
pub fn mi_flat(cov: &[C64], n: usize, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let scale = scale_of(cov.iter().copied(), n);
    let ab: Vec<usize> = a.iter().chain(b).copied().collect();
    let s = conditional(cov, n, &ab, c, scale)?;
    let na = a.len();
    let k = ab.len();
    let ia: Vec<usize> = (0..na).collect();
    let ib: Vec<usize> = (na..k).collect();
    let sa = s.gather(&ia);
    let sb = s.gather(&ib);
    let thr = CHOL_FLOOR * scale;
    if let (Some(la), Some(lb), Some(lab)) = (sa.logdet_pd(thr), sb.logdet_pd(thr), s.logdet_pd(thr)) {
        return Ok(((la + lb - lab) / std::f64::consts::LN_2).max(0.0));
    }
    // Restrict each side to its support, then require the joint to be nonsingular.
    let floor = EIG_FLOOR * scale;
    let (ta, la) = support(&sa, floor);
    let (tb, lb) = support(&sb, floor);
    if ta.ncols() == 0 || tb.ncols() == 0 {
        return Ok(0.0);
    }
    let full = s.to_dmatrix();
    let mut t = DMatrix::<C64>::zeros(k, ta.ncols() + tb.ncols());
    t.view_mut((0, 0), (na, ta.ncols())).copy_from(&ta);
    t.view_mut((na, ta.ncols()), (k - na, tb.ncols())).copy_from(&tb);
    let joint = t.adjoint() * full * &t;
    let eig = joint.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= floor) {
        return Err(Error::SingularConditioning);
    }
    let lab: f64 = eig.eigenvalues.iter().map(|l| l.ln()).sum();
    Ok(((la + lb - lab) / std::f64::consts::LN_2).max(0.0))
}

fn scale_of(it: impl Iterator<Item = C64>, n: usize) -> f64 {
    let diag_max = it.enumerate().filter(|(i, _)| n > 0 && i % (n + 1) == 0).map(|(_, v)| v.re.abs()).fold(0.0, f64::max);
    diag_max.max(1.0)
}

/// Orthonormal basis of the eigenvectors above `floor` and the log pseudo-determinant.
fn support(m: &Small, floor: f64) -> (DMatrix<C64>, f64) {
    let eig = m.to_dmatrix().symmetric_eigen();
    let keep: Vec<usize> = (0..m.n).filter(|&i| eig.eigenvalues[i] > floor).collect();
    let mut t = DMatrix::<C64>::zeros(m.n, keep.len());
    let mut ld = 0.0;
    for (c, &i) in keep.iter().enumerate() {
        t.set_column(c, &eig.eigenvectors.column(i));
        ld += eig.eigenvalues[i].ln();
    }
    (t, ld)
}

/// Covariance of the `x` components conditioned on the `c` components.
fn conditional(cov: &[C64], n: usize, x: &[usize], c: &[usize], scale: f64) -> Result<Small> {
    let kxx = Small::gather_from(cov, n, x, x);
    if c.is_empty() {
        return Ok(kxx);
    }
    let kcc = Small::gather_from(cov, n, c, c);
    let kcx = Small::gather_from(cov, n, c, x);
    if let Some(l) = kcc.cholesky(CHOL_FLOOR * scale) {
        // W = L^{-1} K_cx, S = K_xx - W^H W
        let w = l.forward_solve(&kcx);
        let mut s = kxx;
        for i in 0..x.len() {
            for j in 0..x.len() {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..c.len() {
                    acc += w.get(r, i).conj() * w.get(r, j);
                }
                s.set(i, j, s.get(i, j) - acc);
            }
        }
        s.hermitize();
        return Ok(s);
    }
    let eig = kcc.to_dmatrix().symmetric_eigen();
    let floor = EIG_FLOOR * scale;
    let mut pinv = DMatrix::<C64>::zeros(c.len(), c.len());
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l > floor {
            let v = eig.eigenvectors.column(k);
            pinv += (&v * v.adjoint()) * C64::new(1.0 / l, 0.0);
        }
    }
    let kcx_m = kcx.to_dmatrix();
    let corr = kcx_m.adjoint() * pinv * &kcx_m;
    let mut s = kxx;
    for i in 0..x.len() {
        for j in 0..x.len() {
            s.set(i, j, s.get(i, j) - corr[(i, j)]);
        }
    }
    s.hermitize();
    Ok(s)
}

/// Small dense complex matrix on the stack.
#[derive(Clone, Copy)]
struct Small {
    n: usize,
    m: usize,
    d: [C64; MAXN * MAXN],
}

impl Small {
    fn zeros(n: usize, m: usize) -> Self {
        Small { n, m, d: [C64::new(0.0, 0.0); MAXN * MAXN] }
    }

    fn get(&self, i: usize, j: usize) -> C64 {
        self.d[i * MAXN + j]
    }

    fn set(&mut self, i: usize, j: usize, v: C64) {
        self.d[i * MAXN + j] = v;
    }

    fn gather_from(cov: &[C64], n: usize, rows: &[usize], cols: &[usize]) -> Self {
        let mut s = Small::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                s.set(i, j, cov[r * n + c]);
            }
        }
        s
    }

    fn gather(&self, idx: &[usize]) -> Self {
        let mut s = Small::zeros(idx.len(), idx.len());
        for (i, &r) in idx.iter().enumerate() {
            for (j, &c) in idx.iter().enumerate() {
                s.set(i, j, self.get(r, c));
            }
        }
        s
    }

    fn hermitize(&mut self) {
        for i in 0..self.n {
            let d = self.get(i, i);
            self.set(i, i, C64::new(d.re, 0.0));
            for j in (i + 1)..self.n {
                let v = (self.get(i, j) + self.get(j, i).conj()) * 0.5;
                self.set(i, j, v);
                self.set(j, i, v.conj());
            }
        }
    }

    /// Lower Cholesky factor if every pivot exceeds `thr`.
    fn cholesky(&self, thr: f64) -> Option<Small> {
        let n = self.n;
        let mut l = Small::zeros(n, n);
        for j in 0..n {
            let mut d = self.get(j, j).re;
            for k in 0..j {
                d -= l.get(j, k).norm_sqr();
            }
            if !(d > thr) {
                return None;
            }
            let djj = d.sqrt();
            l.set(j, j, C64::new(djj, 0.0));
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k).conj();
                }
                l.set(i, j, s / djj);
            }
        }
        Some(l)
    }

    fn logdet_pd(&self, thr: f64) -> Option<f64> {
        let l = self.cholesky(thr)?;
        Some((0..self.n).map(|i| 2.0 * l.get(i, i).re.ln()).sum())
    }

    /// Solve `L W = B` for lower-triangular `self`.
    fn forward_solve(&self, b: &Small) -> Small {
        let mut w = Small::zeros(b.n, b.m);
        for col in 0..b.m {
            for i in 0..self.n {
                let mut s = b.get(i, col);
                for k in 0..i {
                    s -= self.get(i, k) * w.get(k, col);
                }
                w.set(i, col, s / self.get(i, i));
            }
        }
        w
    }

    fn to_dmatrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.n, self.m, |i, j| self.get(i, j))
    }
}
