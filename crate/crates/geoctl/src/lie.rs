//! Matrix-level so(1,4): Cartan decomposition, the identification of the
//! symmetric component with ℍ, the six rotation-block matrices realizing
//! so(4) = su(2) ⊕ su(2) as left/right quaternion multiplication,
//! bracket-closure rank, and the restricted-root decomposition.
//!
//! Two realizations are used, each where it is convenient: the diagonal
//! metric `diag(1,-1,-1,-1,-1)` for everything tied to the sphere, and the
//! anti-diagonal metric for root-space computations. No conversion between
//! them is provided.

use nalgebra::{DMatrix, Matrix4, Matrix5, SMatrix};

use crate::error::{Error, Result};
use crate::linalg;
use crate::quaternion::Quaternion;
use crate::tol::{ALGEBRAIC_TOL, PIVOT_TOL};

type M5 = Matrix5<f64>;
type M4 = Matrix4<f64>;

fn metric_diag() -> M5 {
    M5::from_diagonal(&nalgebra::Vector5::new(1.0, -1.0, -1.0, -1.0, -1.0))
}

fn metric_antidiag() -> M5 {
    let mut j = M5::zeros();
    j[(0, 0)] = -1.0;
    j[(1, 1)] = -1.0;
    j[(2, 2)] = -1.0;
    j[(3, 4)] = 1.0;
    j[(4, 3)] = 1.0;
    j
}

fn membership_residual(metric: &M5, m: &M5) -> f64 {
    (metric * m + m.transpose() * metric).amax()
}

/// Element of so(1,4) in the diagonal-metric realization: block form
/// `[[0, β], [βᵗ, γ]]` with γ skew. Serializes as a row-major array of 25
/// reals; membership is re-checked on deserialization.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(into = "Vec<f64>", try_from = "Vec<f64>")]
pub struct So14Matrix(M5);

impl From<So14Matrix> for Vec<f64> {
    fn from(m: So14Matrix) -> Vec<f64> {
        m.to_row_major()
    }
}

impl TryFrom<Vec<f64>> for So14Matrix {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        So14Matrix::from_row_major(&values)
    }
}

impl So14Matrix {
    pub fn try_new(m: M5) -> Result<Self> {
        let residual = membership_residual(&metric_diag(), &m);
        if !residual.is_finite() || residual > ALGEBRAIC_TOL {
            return Err(Error::NotInAlgebra { residual });
        }
        Ok(So14Matrix(m))
    }

    pub(crate) fn unchecked(m: M5) -> Self {
        So14Matrix(m)
    }

    pub fn zero() -> Self {
        So14Matrix(M5::zeros())
    }

    pub fn matrix(&self) -> &M5 {
        &self.0
    }

    pub fn membership_residual(&self) -> f64 {
        membership_residual(&metric_diag(), &self.0)
    }

    /// Matrix commutator; the algebra is closed under it.
    pub fn bracket(&self, other: &So14Matrix) -> So14Matrix {
        So14Matrix(self.0 * other.0 - other.0 * self.0)
    }

    pub fn scale(&self, s: f64) -> So14Matrix {
        So14Matrix(self.0 * s)
    }

    pub fn add(&self, other: &So14Matrix) -> So14Matrix {
        So14Matrix(self.0 + other.0)
    }

    pub fn sub(&self, other: &So14Matrix) -> So14Matrix {
        So14Matrix(self.0 - other.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Row-major flattening, the serialization order for matrices.
    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(25);
        for r in 0..5 {
            for c in 0..5 {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    pub fn from_row_major(values: &[f64]) -> Result<Self> {
        if values.len() != 25 {
            return Err(Error::InvalidArgument(format!(
                "expected 25 entries, got {}",
                values.len()
            )));
        }
        let m = M5::from_row_slice(values);
        So14Matrix::try_new(m)
    }
}

/// Splitting along the involution θ(X) = -Xᵗ: the rotation block is the
/// +1 eigenspace, the symmetric block the -1 eigenspace.
#[derive(Clone, Debug)]
pub struct CartanSplit {
    pub k_part: So14Matrix,
    pub s_part: So14Matrix,
}

pub fn theta(m: &So14Matrix) -> So14Matrix {
    So14Matrix::unchecked(-m.matrix().transpose())
}

pub fn cartan_split(m: &So14Matrix) -> CartanSplit {
    let a = m.matrix();
    let k = (a - a.transpose()) * 0.5;
    let s = (a + a.transpose()) * 0.5;
    CartanSplit {
        k_part: So14Matrix::unchecked(k),
        s_part: So14Matrix::unchecked(s),
    }
}

/// Inner product -⟨X, θY⟩ with ⟨X,Y⟩ = tr(XY); positive definite on the
/// whole algebra.
pub fn b_theta(a: &So14Matrix, b: &So14Matrix) -> f64 {
    (a.matrix() * b.matrix().transpose()).trace()
}

/// Embeds a quaternion as the symmetric-block element `[[0, β], [βᵗ, 0]]`
/// with β = (w, x, y, z).
pub fn embed_symmetric(q: Quaternion) -> So14Matrix {
    let beta = q.as_array();
    let mut m = M5::zeros();
    for (i, &b) in beta.iter().enumerate() {
        m[(0, i + 1)] = b;
        m[(i + 1, 0)] = b;
    }
    So14Matrix::unchecked(m)
}

/// Inverse of [`embed_symmetric`]; fails when the rotation block is nonzero.
pub fn extract_symmetric(m: &So14Matrix) -> Result<Quaternion> {
    let a = m.matrix();
    let mut residual: f64 = 0.0;
    for r in 1..5 {
        for c in 1..5 {
            residual = residual.max(a[(r, c)].abs());
        }
    }
    for i in 1..5 {
        residual = residual.max((a[(0, i)] - a[(i, 0)]).abs());
    }
    if residual > ALGEBRAIC_TOL {
        return Err(Error::NotSymmetricPart { residual });
    }
    Ok(Quaternion::new(a[(0, 1)], a[(0, 2)], a[(0, 3)], a[(0, 4)]))
}

fn a2() -> nalgebra::Matrix2<f64> {
    nalgebra::Matrix2::new(0.0, -1.0, 1.0, 0.0)
}

fn b2() -> nalgebra::Matrix2<f64> {
    nalgebra::Matrix2::new(0.0, 1.0, 1.0, 0.0)
}

fn c2() -> nalgebra::Matrix2<f64> {
    nalgebra::Matrix2::new(-1.0, 0.0, 0.0, 1.0)
}

fn block4(
    ul: nalgebra::Matrix2<f64>,
    ur: nalgebra::Matrix2<f64>,
    ll: nalgebra::Matrix2<f64>,
    lr: nalgebra::Matrix2<f64>,
) -> M4 {
    let mut m = M4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&ul);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&ur);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&ll);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&lr);
    m
}

fn rotation_block(g: M4) -> So14Matrix {
    let mut m = M5::zeros();
    m.fixed_view_mut::<4, 4>(1, 1).copy_from(&g);
    So14Matrix::unchecked(m)
}

/// The six so(4) elements whose adjoint action on the symmetric block is
/// right resp. left multiplication by 𝐢, 𝐣, 𝐤:
/// `[right[a], S] = S·eₐ` and `[left[a], S] = eₐ·S` under the quaternion
/// identification, exactly, with integer entries.
#[derive(Clone, Debug)]
pub struct GammaBasis {
    pub right: [So14Matrix; 3],
    pub left: [So14Matrix; 3],
}

pub fn gamma_basis() -> GammaBasis {
    let z = nalgebra::Matrix2::zeros();
    let i2 = nalgebra::Matrix2::identity();
    let right_i = block4(a2(), z, z, -a2());
    let right_j = block4(z, -i2, i2, z);
    let right_k = block4(z, a2(), a2(), z);
    let left_i = block4(a2(), z, z, a2());
    let left_j = block4(z, c2(), -c2(), z);
    let left_k = block4(z, -b2(), b2(), z);
    GammaBasis {
        right: [
            rotation_block(right_i),
            rotation_block(right_j),
            rotation_block(right_k),
        ],
        left: [
            rotation_block(left_i),
            rotation_block(left_j),
            rotation_block(left_k),
        ],
    }
}

/// 10-element basis: the four symmetric embeds followed by the six
/// rotation-block elements (right family, then left).
pub fn so14_basis() -> Vec<So14Matrix> {
    let g = gamma_basis();
    let mut basis = vec![
        embed_symmetric(Quaternion::ONE),
        embed_symmetric(Quaternion::I),
        embed_symmetric(Quaternion::J),
        embed_symmetric(Quaternion::K),
    ];
    basis.extend(g.right);
    basis.extend(g.left);
    basis
}

/// Dimension of the Lie algebra generated by the given elements, plus a
/// spanning set. Returns 10 exactly when the rank condition holds.
pub fn larc_closure(generators: &[So14Matrix]) -> Result<(usize, Vec<So14Matrix>)> {
    if generators.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    let gens: Vec<DMatrix<f64>> = generators
        .iter()
        .map(|g| DMatrix::from_column_slice(5, 5, g.matrix().as_slice()))
        .collect();
    let (rank, basis) = linalg::bracket_closure(&gens, 10, PIVOT_TOL);
    let basis = basis
        .into_iter()
        .map(|m| So14Matrix::unchecked(SMatrix::from_column_slice(m.as_slice())))
        .collect();
    Ok((rank, basis))
}

pub fn larc_rank(generators: &[So14Matrix]) -> Result<usize> {
    larc_closure(generators).map(|(rank, _)| rank)
}

/// Element of so(1,4) in the anti-diagonal realization used for root-space
/// work.
#[derive(Clone, Debug, PartialEq)]
pub struct J14Matrix(M5);

impl J14Matrix {
    pub fn try_new(m: M5) -> Result<Self> {
        let residual = membership_residual(&metric_antidiag(), &m);
        if !residual.is_finite() || residual > ALGEBRAIC_TOL {
            return Err(Error::NotInAlgebra { residual });
        }
        Ok(J14Matrix(m))
    }

    pub fn matrix(&self) -> &M5 {
        &self.0
    }

    pub fn membership_residual(&self) -> f64 {
        membership_residual(&metric_antidiag(), &self.0)
    }

    pub fn bracket(&self, other: &J14Matrix) -> J14Matrix {
        J14Matrix(self.0 * other.0 - other.0 * self.0)
    }
}

/// diag(0,0,0,α,-α), spanning the maximal abelian subspace of the
/// symmetric part in the anti-diagonal realization.
pub fn cartan_element(alpha: f64) -> J14Matrix {
    let mut m = M5::zeros();
    m[(3, 3)] = alpha;
    m[(4, 4)] = -alpha;
    J14Matrix(m)
}

/// Restricted-root decomposition: the ad-eigenspaces of the Cartan element
/// with eigenvalues +α, -α and 0. Both root spaces have dimension 3 (the
/// root multiplicity) and the centralizer has dimension 4.
#[derive(Clone, Debug)]
pub struct RootSpaceDecomp {
    pub g_plus: Vec<J14Matrix>,
    pub g_minus: Vec<J14Matrix>,
    pub g_zero: Vec<J14Matrix>,
}

pub fn root_space_decomposition() -> RootSpaceDecomp {
    let mut g_plus = Vec::new();
    let mut g_minus = Vec::new();
    for i in 0..3 {
        // Column block paired with its transposed row.
        let mut p = M5::zeros();
        p[(i, 4)] = 1.0;
        p[(3, i)] = 1.0;
        g_plus.push(J14Matrix(p));

        let mut m = M5::zeros();
        m[(i, 3)] = 1.0;
        m[(4, i)] = 1.0;
        g_minus.push(J14Matrix(m));
    }
    let mut g_zero = Vec::new();
    for (r, c) in [(0, 1), (0, 2), (1, 2)] {
        let mut m = M5::zeros();
        m[(r, c)] = 1.0;
        m[(c, r)] = -1.0;
        g_zero.push(J14Matrix(m));
    }
    g_zero.push(cartan_element(1.0));
    RootSpaceDecomp {
        g_plus,
        g_minus,
        g_zero,
    }
}
