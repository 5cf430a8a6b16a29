use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::BinaryCode;

/// Default number of ITQ alternations.
pub const ITQ_ITERATIONS: usize = 50;

/// Eigenvalues at or below this fraction of the largest count as zero.
const RANK_TOLERANCE: f64 = 1e-10;

/// Fitted iterative quantization: centering, PCA to `c` dimensions, then an
/// orthogonal rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct ItqModel {
    pub(crate) mean: Vec<f64>,
    /// `d × c`, orthonormal columns.
    pub(crate) basis: DMatrix<f64>,
    /// `c × c`, orthogonal.
    pub(crate) rotation: DMatrix<f64>,
    pub(crate) iterations: usize,
    /// `‖B − V R‖_F` before each rotation update and after the last one.
    pub(crate) loss_history: Vec<f64>,
    /// `basis · rotation`.
    projection: DMatrix<f64>,
}

impl ItqModel {
    pub(crate) fn from_parts(
        mean: Vec<f64>,
        basis: DMatrix<f64>,
        rotation: DMatrix<f64>,
        iterations: usize,
        loss_history: Vec<f64>,
    ) -> Result<Self> {
        let (d, c) = basis.shape();
        if mean.len() != d {
            return Err(Error::shape(d, mean.len()));
        }
        if rotation.shape() != (c, c) {
            return Err(Error::shape(c * c, rotation.len()));
        }
        let projection = &basis * &rotation;
        Ok(ItqModel {
            mean,
            basis,
            rotation,
            iterations,
            loss_history,
            projection,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn bits(&self) -> usize {
        self.rotation.nrows()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn rotation(&self) -> &DMatrix<f64> {
        &self.rotation
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn loss_history(&self) -> &[f64] {
        &self.loss_history
    }
}

/// Top-`c` principal directions of already centered data (rows are
/// samples), from the eigendecomposition of the scatter matrix. Each column
/// is signed so its largest-magnitude entry is positive.
pub fn pca_top_c(centered: &DMatrix<f64>, c: usize) -> Result<DMatrix<f64>> {
    let (n, d) = centered.shape();
    if c == 0 || c > n.min(d) {
        return Err(Error::DegenerateData(format!(
            "cannot extract {c} principal directions from {n} samples of dimension {d}"
        )));
    }
    if centered.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let scatter = centered.transpose() * centered;
    let eig = SymmetricEigen::new(scatter);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let largest = eig.eigenvalues[order[0]].max(0.0);
    let weakest = eig.eigenvalues[order[c - 1]];
    if largest == 0.0 || weakest <= RANK_TOLERANCE * largest {
        return Err(Error::DegenerateData(format!(
            "data rank is below {c}; use fewer bits"
        )));
    }
    let mut basis = DMatrix::zeros(d, c);
    for (j, &k) in order[..c].iter().enumerate() {
        let col = eig.eigenvectors.column(k);
        let pivot = col.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        basis.set_column(j, &(col * sign));
    }
    Ok(basis)
}

fn to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let d = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != d) {
        return Err(Error::shape(d, bad.len()));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    Ok(DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]))
}

fn sign_matrix(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.map(|x| if x >= 0.0 { 1.0 } else { -1.0 })
}

/// Fits ITQ with `c` bits on the rows of `vectors`.
pub fn itq_fit(vectors: &[Vec<f64>], c: usize, iterations: usize) -> Result<ItqModel> {
    super::check_bits(c)?;
    let x = to_matrix(vectors)?;
    let (n, d) = x.shape();
    if n <= c {
        return Err(Error::DegenerateData(format!("{n} training vectors cannot support {c} bits")));
    }
    let mean: Vec<f64> = (0..d).map(|j| x.column(j).mean()).collect();
    let centered = DMatrix::from_fn(n, d, |i, j| x[(i, j)] - mean[j]);
    let basis = pca_top_c(&centered, c)?;
    let v = &centered * &basis;

    let mut rotation = DMatrix::identity(c, c);
    let mut loss_history = Vec::with_capacity(iterations + 1);
    for _ in 0..iterations {
        let vr = &v * &rotation;
        let b = sign_matrix(&vr);
        loss_history.push((&b - &vr).norm());
        // orthogonal Procrustes: argmin_R ‖B − V R‖ is U Wᵀ for Vᵀ B = U Σ Wᵀ
        let svd = (v.transpose() * &b).svd(true, true);
        let (u, wt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
        rotation = u * wt;
    }
    let vr = &v * &rotation;
    loss_history.push((sign_matrix(&vr) - &vr).norm());
    debug_assert!(
        loss_history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-9),
        "quantization loss increased: {loss_history:?}"
    );
    ItqModel::from_parts(mean, basis, rotation, iterations, loss_history)
}

/// Bit `i` is set iff `((vector − mean) · basis · rotation)_i >= 0`.
pub fn itq_hash(model: &ItqModel, vector: &[f64]) -> Result<BinaryCode> {
    super::check_input(vector, model.dim())?;
    let c = model.bits();
    let mut code = BinaryCode::zeros(c)?;
    for k in 0..c {
        let p: f64 = (0..model.dim())
            .map(|j| (vector[j] - model.mean[j]) * model.projection[(j, k)])
            .sum();
        code.set(k, p >= 0.0);
    }
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(rng: &mut impl Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
        (0..n).map(|_| (0..d).map(|_| StandardNormal.sample(rng)).collect()).collect()
    }

    fn orthonormality_error(m: &DMatrix<f64>) -> f64 {
        (m.transpose() * m - DMatrix::identity(m.ncols(), m.ncols())).amax()
    }

    /// Cyclic Jacobi eigensolver for small symmetric matrices.
    fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = a.len();
        let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect()).collect();
        for _ in 0..100 {
            let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
            if off < 1e-26 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    for row in v.iter_mut() {
                        let (vp, vq) = (row[p], row[q]);
                        row[p] = c * vp - s * vq;
                        row[q] = s * vp + c * vq;
                    }
                }
            }
        }
        ((0..n).map(|i| a[i][i]).collect(), v)
    }

    fn residual(x: &DMatrix<f64>, basis: &DMatrix<f64>) -> f64 {
        (x - x * basis * basis.transpose()).norm_squared()
    }

    #[test]
    fn pca_matches_brute_force_eigensolver() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rows = gaussian(&mut rng, 10, 6);
        let x = to_matrix(&rows).unwrap();
        let mean: Vec<f64> = (0..6).map(|j| x.column(j).mean()).collect();
        let centered = DMatrix::from_fn(10, 6, |i, j| x[(i, j)] - mean[j]);
        let scatter = centered.transpose() * &centered;
        let (vals, vecs) = jacobi_eigen((0..6).map(|i| (0..6).map(|j| scatter[(i, j)]).collect()).collect());
        let mut order: Vec<usize> = (0..6).collect();
        order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        for c in 1..=5 {
            let ours = pca_top_c(&centered, c).unwrap();
            assert!(orthonormality_error(&ours) < 1e-6);
            let theirs = DMatrix::from_fn(6, c, |i, j| vecs[i][order[j]]);
            assert!((residual(&centered, &ours) - residual(&centered, &theirs)).abs() < 1e-8);
        }
    }

    #[test]
    fn pca_isotropic_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = to_matrix(&gaussian(&mut rng, 200, 2)).unwrap();
        let b = pca_top_c(&x, 2).unwrap();
        assert!(orthonormality_error(&b) < 1e-12);
        assert!((b.determinant().abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pca_line_in_three_dimensions() {
        let dir = [1.0, -2.0, 0.5];
        let norm = (1.0f64 + 4.0 + 0.25).sqrt();
        let rows: Vec<Vec<f64>> = (-5..=5).map(|t| dir.iter().map(|a| a * t as f64 * 0.3).collect()).collect();
        let b = pca_top_c(&to_matrix(&rows).unwrap(), 1).unwrap();
        let cos: f64 = (0..3).map(|i| b[(i, 0)] * dir[i] / norm).sum();
        assert!(cos.abs().min(1.0).acos() < 1e-6);
        assert!(matches!(
            pca_top_c(&to_matrix(&rows).unwrap(), 2),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn zero_iterations_is_pca_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rows = gaussian(&mut rng, 40, 6);
        let m = itq_fit(&rows, 4, 0).unwrap();
        assert_eq!(m.rotation, DMatrix::identity(4, 4));
        assert_eq!(m.loss_history.len(), 1);
        for r in &rows {
            let centered: Vec<f64> = r.iter().zip(&m.mean).map(|(a, b)| a - b).collect();
            let code = itq_hash(&m, r).unwrap();
            for k in 0..4 {
                let p: f64 = (0..6).map(|j| centered[j] * m.basis[(j, k)]).sum();
                assert_eq!(code.bit(k), p >= 0.0);
            }
        }
    }

    #[test]
    fn centered_corners_reach_zero_loss() {
        let rows: Vec<Vec<f64>> = [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, 1.0], [-1.0, -1.0]]
            .iter()
            .map(|p| p.to_vec())
            .collect();
        let m = itq_fit(&rows, 2, 50).unwrap();
        assert!(*m.loss_history.last().unwrap() < 1e-9, "{:?}", m.loss_history);
    }

    #[test]
    fn mean_hashes_to_all_ones() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows = gaussian(&mut rng, 30, 5);
        let m = itq_fit(&rows, 3, 10).unwrap();
        let mean = m.mean.clone();
        assert_eq!(itq_hash(&m, &mean).unwrap().count_ones(), 3);
    }

    #[test]
    fn invariant_to_offset() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows = gaussian(&mut rng, 50, 6);
        let offset = [3.0, -1.0, 0.5, 10.0, 0.0, -7.0];
        let shifted: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().zip(&offset).map(|(a, b)| a + b).collect()).collect();
        let a = itq_fit(&rows, 4, 20).unwrap();
        let b = itq_fit(&shifted, 4, 20).unwrap();
        for (r, s) in rows.iter().zip(&shifted) {
            assert_eq!(itq_hash(&a, r).unwrap(), itq_hash(&b, s).unwrap());
        }
    }

    #[test]
    fn rejects_degenerate_input() {
        let rows = vec![vec![1.0, 2.0, 3.0]; 3];
        assert!(matches!(itq_fit(&rows, 3, 5), Err(Error::DegenerateData(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rows = gaussian(&mut rng, 10, 4);
        assert!(matches!(itq_fit(&rows, 5, 5), Err(Error::DegenerateData(_))));
        let m = itq_fit(&rows, 2, 5).unwrap();
        assert!(matches!(itq_hash(&m, &[0.0; 3]), Err(Error::ShapeMismatch { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn loss_is_nonincreasing_and_rotation_orthogonal(seed in any::<u64>(), d in 4usize..12, c in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows = gaussian(&mut rng, 60, d);
            let m = itq_fit(&rows, c, 50).unwrap();
            prop_assert_eq!(m.loss_history.len(), 51);
            for w in m.loss_history.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-9 * w[0].max(1.0));
            }
            prop_assert!(orthonormality_error(&m.rotation) < 1e-6);
            prop_assert!(orthonormality_error(&m.basis) < 1e-6);
        }
    }
}
