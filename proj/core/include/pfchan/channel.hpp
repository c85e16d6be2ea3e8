#pragma once

#include <vector>

#include "pfchan/numerics.hpp"

namespace pfchan {

/// A completely positive map on M_n, stored as Kraus operators plus the
/// cached Choi matrix J = sum_ij E_ij (x) Phi(E_ij).
///
/// Block indexing convention, used everywhere: the row block index is the
/// first tensor factor, i.e. J[(i,k),(j,l)] = Phi(E_ij)_{kl} with composite
/// row index i*n+k and column index j*n+l. Under the column-stacking vec of
/// numerics.hpp this is exactly J = sum_q vec(K_q) vec(K_q)^*.
class Channel {
public:
    /// Build from Kraus operators (all square, same size). Trace preservation
    /// sum_i K_i^* K_i = I is verified unless require_trace_preserving is
    /// false; general CP maps are allowed behind that explicit flag, but the
    /// PF decision procedures reject them.
    static Channel from_kraus(std::vector<Mat> kraus, const Tolerance& tol = {},
                              bool require_trace_preserving = true);

    /// Build from a Choi matrix: j must be n^2 x n^2 and PSD. Kraus operators
    /// are sqrt(lambda_q) * unvec(eigenvector_q) over eigenvalues above
    /// tol.eig_zero, sorted as in hermitian_eig, hence deterministic and
    /// linearly independent with count = rank(j). Entrywise-real j yields
    /// entrywise-real Kraus operators.
    static Channel from_choi(const Mat& j, Index n, const Tolerance& tol = {},
                             bool require_trace_preserving = true);

    Index dim() const { return n_; }
    const std::vector<Mat>& kraus() const { return kraus_; }
    const Mat& choi() const { return choi_; }
    bool trace_preserving() const { return trace_preserving_; }

    /// Phi(x) = sum_i K_i x K_i^*.
    Mat apply(const Mat& x) const;

    Index choi_rank(const Tolerance& tol = {}) const;
    bool choi_is_real(double entry_zero) const { return max_imag(choi_) <= entry_zero; }

    /// True when the stored Kraus list is entrywise real and linearly
    /// independent (count equal to the Choi rank).
    bool has_canonical_real_kraus(const Tolerance& tol = {}) const;

private:
    Channel() = default;
    Index n_ = 0;
    std::vector<Mat> kraus_;
    Mat choi_;
    bool trace_preserving_ = false;
};

/// Re-expresses the channel over real, linearly independent Kraus operators
/// obtained from the eigenvectors of the (real) Choi matrix. The Choi matrix
/// is unchanged. Throws ChoiNotReal when J has a complex entry, in which case
/// the channel cannot be positively factorizable at all.
Channel canonical_real_kraus(const Channel& ch, const Tolerance& tol = {});

/// Kraus list of the composition outer . inner: products S_l K_i ordered with
/// the outer index l slow, matching compose_witnesses.
std::vector<Mat> compose_kraus(const Channel& outer, const Channel& inner);

/// Kraus list {sqrt(lambda) K_i} u {sqrt(1-lambda) S_j} of the convex
/// combination lambda*a + (1-lambda)*b, matching convex_combine_witnesses.
std::vector<Mat> convex_combine_kraus(const Channel& a, const Channel& b, double lambda);

} // namespace pfchan
