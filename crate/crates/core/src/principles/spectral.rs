use crate::error::Result;
use crate::gallery::GalleryOperator;
use crate::lattice::DenseMatrix;
use crate::numerics::{eigenpair_near, gap_estimate, EigenPair};

const SIMPLICITY_CONDITION: f64 = 1e8;

/// Eigentriple at `λ₀`, the rank-1 spectral projection and the distance to
/// the rest of the real spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub pair: EigenPair,
    /// `P = v ψᵀ` with `ψᵀ v = 1`.
    pub projection: DenseMatrix,
    pub gap: f64,
    pub left_neighbour: Option<f64>,
    pub right_neighbour: Option<f64>,
    /// Geometric simplicity passed and `‖ψ‖‖v‖ / |ψᵀv|` is moderate.
    pub simple: bool,
}

impl SpectralData {
    pub fn lambda0(&self) -> f64 {
        self.pair.value
    }

    /// Real points that a scan must stay away from.
    pub fn known_dips(&self) -> impl Iterator<Item = f64> + '_ {
        core::iter::once(self.pair.value).chain(self.left_neighbour).chain(self.right_neighbour)
    }
}

pub fn spectral_data_for(matrix: &DenseMatrix, shift: f64) -> Result<SpectralData> {
    let pair = eigenpair_near(matrix, shift)?;
    let v = pair.right_vector.as_slice();
    let psi = pair.left_vector.as_slice();
    let projection = DenseMatrix::from_fn(v.len(), |i, j| v[i] * psi[j]);
    let norm = |x: &[f64]| libm::sqrt(x.iter().map(|a| a * a).sum());
    let condition = norm(v) * norm(psi);
    let gap = gap_estimate(matrix, pair.value);
    Ok(SpectralData {
        projection,
        gap: gap.gap,
        left_neighbour: gap.left,
        right_neighbour: gap.right,
        simple: condition < SIMPLICITY_CONDITION,
        pair,
    })
}

pub fn build_spectral_data(op: &GalleryOperator) -> Result<SpectralData> {
    spectral_data_for(&op.matrix, op.lambda0)
}
