#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pfchan/channel.hpp"
#include "pfchan/cones.hpp"
#include "pfchan/upb.hpp"

namespace pfchan {

/// Finite-dimensional positive-factorization certificate. The witness
/// algebra is a weighted direct sum of full matrix blocks
///   A = M_{b_1} (+) ... (+) M_{b_r},   tau(X) = sum_s p_s tr(X_s)/b_s,
/// which covers the two families the library constructs and is closed under
/// the composition/convex-combination witness builders: "abelian" means all
/// blocks are 1x1 (ops diagonal, tau weighted by p), "block" means a single
/// full block (normalized matrix trace).
///
/// ops[q] pairs with kraus[q]; the factorization operator is
/// Z = sum_q K_q (x) A_q, whose (i,j) block is z_block(i,j). The paired
/// Kraus list is stored because combinators produce witnesses against Kraus
/// lists that need not be linearly independent (e.g. products under
/// composition); verification only needs tau(A_p^* A_q) = delta_pq.
struct PFWitness {
    Index n = 0;                      // channel dimension
    std::vector<Index> block_dims;    // b_1..b_r
    RVec block_weights;               // p_1..p_r, nonnegative, summing to 1
    std::vector<Mat> ops;             // Hermitian m x m, block-diagonal
    std::vector<Mat> kraus;           // paired Kraus operators, n x n

    Index m() const;
    bool abelian() const;
    bool single_block() const;
    std::string kind() const;  // "abelian" | "block" | "mixed"

    /// tau on the witness algebra (x must be m x m).
    std::complex<double> trace(const Mat& x) const;

    /// Z(i,j) = sum_q (K_q)_{ij} A_q.
    Mat z_block(Index i, Index j) const;
};

/// Checks dimensions, hermiticity, block structure and weights; throws
/// InvalidWitness / DimensionMismatch on structural defects. Cheap; does not
/// verify the factorization identity.
void validate_witness_structure(const PFWitness& w, const Tolerance& tol = {});

struct WitnessReport {
    bool ok = false;
    double map_residual = 0.0;              // max over matrix units
    double trace_orthonormality_defect = 0.0;
    double min_block_eigenvalue = 0.0;      // over all Z(i,j)
    std::string failure;                    // empty when ok
};

/// Full witness verification: trace-orthonormality of the ops, positivity of
/// every block Z(i,j), and the reproduction identity
/// (id (x) tau)(Z (E_ij (x) I) Z^*) = Phi(E_ij) on all n^2 matrix units.
WitnessReport verify_witness(const Channel& ch, const PFWitness& w, const Tolerance& tol = {});

/// Vectors v_1..v_m in R^d with weights p forming a resolution
/// sum_s p_s v_s v_s^T = I_d / d. When every v_s lies in NC(K) this is
/// exactly the data of an abelian factorization.
struct Frame {
    std::vector<RVec> vectors;
    RVec weights;
};

/// Builds the diagonal witness (A_i)_{jj} = sqrt(d) v_j[i] over the
/// channel's stored Kraus list. Throws FrameNotResolution if the resolution
/// identity fails, FrameNotInCone (reporting the vector index and violating
/// entry) if some v_s is outside NC(K).
PFWitness abelian_witness_from_frame(const Channel& ch, const Frame& f, const Tolerance& tol = {});

enum class Verdict { pf, not_pf, unknown };

struct Certificate {
    enum class Type {
        none,
        choi_not_real,        // complex Choi entry (not PF by realness)
        negative_choi_entry,  // J entry below -entry_zero
        empty_nc_cone,        // NC(K) = {0}
        non_cpsd_gram,        // Gram-vector certificate on the Choi support
        budget_exhausted,     // search gave up (verdict unknown)
    };
    Type type = Type::none;
    Index row = -1, col = -1;   // composite Choi indices where applicable
    double value = 0.0;
    std::vector<Index> support;     // Choi indices the Gram certificate refers to
    NonCpsdCertificate gram;        // details for non_cpsd_gram
    std::string detail;
};

struct PFDecision {
    Verdict verdict = Verdict::unknown;
    std::optional<PFWitness> witness;
    std::vector<Mat> nonneg_kraus;  // certified entrywise-nonnegative Kraus list
    Certificate certificate;
    double witness_residual = 0.0;
};

/// Exact decision for Choi rank 2: PF iff J has no entry below -entry_zero.
/// On the PF side the 2D cone NC(K) is guaranteed to contain a rotated
/// orthant; its bisector +-45 degrees gives an orthonormal frame and hence a
/// verified abelian witness. Throws WrongRank unless the Choi rank is 2.
PFDecision decide_rank2(const Channel& ch, const Tolerance& tol = {});

struct CpSearchBudget {
    int restarts = 50;
    int iterations = 500;
    /// The nonnegative factorization may need more vectors than rank(J);
    /// restarts cycle the column count from rank to rank + extra_columns.
    int extra_columns = 4;
};

/// Semi-decision of "J(Phi) is a completely positive matrix", equivalently
/// abelian positive factorizability. Yes answers carry an entrywise
/// nonnegative Kraus list L with sum vec(L_i)vec(L_i)^T = J plus a verified
/// abelian witness. No answers carry a certificate: a negative Choi entry or
/// a non-CPSD Gram certificate on the support of J (which rules out all of
/// PF, not just the abelian case). Unknown means the seeded search budget
/// was exhausted; the question remains open for that input.
PFDecision is_cp_choi(const Channel& ch, const Tolerance& tol = {},
                      const CpSearchBudget& budget = {}, std::uint64_t seed = 0);

/// Witness for the composition (outer o inner) built on the algebra
/// (inner algebra) (x) (outer algebra), paired with compose_kraus(outer,
/// inner). Dimension m_inner * m_outer.
PFWitness compose_witnesses(const PFWitness& outer, const PFWitness& inner,
                            const Tolerance& tol = {});

/// Witness for lambda*a + (1-lambda)*b on the direct-sum algebra with trace
/// lambda*tau_a (+) (1-lambda)*tau_b, paired with convex_combine_kraus.
PFWitness convex_combine_witnesses(const PFWitness& a, const PFWitness& b, double lambda,
                                   const Tolerance& tol = {});

/// True iff sum_i y_i A_i is PSD: membership of y in the spectrahedron D(A).
bool spectrahedron_contains(const PFWitness& w, const RVec& y, const Tolerance& tol = {});

/// The joint numerical range point (x^* A_1 x, ..., x^* A_d x) for a unit
/// vector x in C^m. For a witness of a channel this point lies in NC(K).
RVec numerical_range_point(const PFWitness& w, const CVec& x, const Tolerance& tol = {});

} // namespace pfchan
