#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pfchan/errors.hpp"

namespace pfchan {

using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Numerical cutoffs shared across the library. eig_zero separates zero from
/// nonzero eigenvalues/singular values (absolute, inputs are O(1)-normalized),
/// entry_zero is the entrywise cutoff, residual bounds equation defects.
struct Tolerance {
    double eig_zero = 1e-9;
    double entry_zero = 1e-9;
    double residual = 1e-8;
};

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
inline double max_abs(const RMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
inline double max_abs_diff(const Mat& a, const Mat& b) { return max_abs(Mat(a - b)); }
inline double max_imag(const Mat& m) { return m.size() == 0 ? 0.0 : m.imag().cwiseAbs().maxCoeff(); }

bool is_hermitian(const Mat& m, double residual);

struct EigResult {
    RVec eigenvalues;  // sorted descending
    Mat eigenvectors;  // orthonormal columns, column q pairs with eigenvalues[q]
};

/// Hermitian eigendecomposition. Entrywise-real inputs take a real symmetric
/// solver path so their eigenvectors come out entrywise real. Eigenvector
/// phases are canonicalized and ties in the eigenvalue ordering are broken by
/// lexicographic comparison of rounded eigenvector entries, so the output is
/// deterministic for a given input.
EigResult hermitian_eig(const Mat& m, const Tolerance& tol = {});

/// True iff the minimum eigenvalue is >= -tol.eig_zero. Throws NotHermitian.
bool is_psd(const Mat& m, const Tolerance& tol = {});

/// Count of eigenvalues strictly above tol.eig_zero (input must be Hermitian).
Index psd_rank(const Mat& m, const Tolerance& tol = {});

/// Gram vectors of a PSD matrix m: vectors g_0..g_{n-1} of length rank(m)
/// with <g_i, g_j> = m_ij (conjugate-linear in the first slot). Entrywise-real
/// inputs produce entrywise-real vectors.
std::vector<CVec> gram_vectors(const Mat& m, const Tolerance& tol = {});

/// Column-stacking vectorization: entry (r, c) of an R x C matrix lands at
/// index c*R + r. Linear and invertible given the shape.
CVec vec(const Mat& m);
Mat unvec(const CVec& v, Index rows, Index cols);

/// Rank of the column span of `vectors` (singular values > tol.eig_zero).
/// `near_cutoff` is set when the smallest kept singular value is within 10x
/// of the cutoff, flagging a numerically fragile rank decision.
Index family_rank(const std::vector<CVec>& vectors, const Tolerance& tol, bool* near_cutoff = nullptr);

} // namespace pfchan
