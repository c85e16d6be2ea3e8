#pragma once

#include <string>
#include <vector>

#include "pfchan/channel.hpp"
#include "pfchan/cones.hpp"
#include "pfchan/pf.hpp"

namespace pfchan {

/// Real PSD matrix with unit diagonal. Gram vectors (length = rank) are
/// computed at construction.
class CorrelationMatrix {
public:
    explicit CorrelationMatrix(RMat entries, const Tolerance& tol = {});

    Index size() const { return c_.rows(); }
    const RMat& entries() const { return c_; }
    Index rank() const { return gram_.empty() ? 0 : gram_.front().size(); }
    /// Gram vectors w_1..w_n with <w_i, w_j> = c_ij.
    const std::vector<RVec>& gram() const { return gram_; }

private:
    RMat c_;
    std::vector<RVec> gram_;
};

/// The Schur product channel S_C(X) = X o C, with diagonal Kraus operators
/// sqrt(lambda_q) diag(v_q) from the eigenpairs of C.
Channel schur_channel(const CorrelationMatrix& c, const Tolerance& tol = {});

/// NC(K) of the Schur channel: the dual cone of cone{w_1..w_n} in R^rank.
/// Subject to the dual_cone dimension cap (rank <= 8).
PolyhedralCone schur_nc_cone(const CorrelationMatrix& c, const Tolerance& tol = {});

/// Checks a witness against the structure that a Schur factorization must
/// have: Z block-diagonal (off-diagonal blocks vanish), diagonal blocks Z_k
/// PSD with tau(Z_k^2) = 1, and tau(Z_i Z_j) = c_ij for all pairs. A witness
/// whose projection to block-diagonal form differs from itself is rejected.
bool schur_pf_witness_check(const CorrelationMatrix& c, const PFWitness& w,
                            const Tolerance& tol = {});

/// The five unit vectors v_0..v_4 in R^3 whose Gram matrix is the pentagon
/// correlation matrix, and that matrix itself.
std::vector<RVec> pentagon_vectors();
RMat pentagon_gram();

/// Executable replay of the pentagon obstruction: (a) the Gram matrix of
/// v_0..v_4 reproduces the closed-form entries {1, 2/sqrt(6), 1/2, 1/3, 0},
/// (b) each v_i is orthogonal to exactly v_{i+2}, v_{i+3} (mod 5) which span
/// its orthocomplement, (c) v_1 expands over the basis {v_0,v_2,v_3} and v_0
/// over {v_1,v_3,v_4} with unique coefficients, and (d) the two leading
/// coefficients coincide (a = alpha) while <v_0,v_1> != 1 -- so positive
/// operators with this Gram matrix would be forced equal yet non-equal.
/// All four checks are reported with residuals.
struct PentagonReport {
    struct Check {
        std::string name;
        bool pass = false;
        double residual = 0.0;
        std::string detail;
    };
    std::vector<Check> checks;
    bool all_pass = false;
    double a = 0.0;      // leading coefficient of v_1 over {v_0,v_2,v_3}
    double alpha = 0.0;  // leading coefficient of v_0 over {v_1,v_3,v_4}
    RMat gram;           // reconstructed 5x5 Gram matrix
};

PentagonReport pentagon_counterexample_replay(const Tolerance& tol = {});

} // namespace pfchan
