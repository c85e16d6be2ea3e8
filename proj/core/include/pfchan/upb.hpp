#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pfchan/numerics.hpp"

namespace pfchan {

/// Candidate unextendible product basis: paired families {u_i} in C^{d1},
/// {v_i} in C^{d2} whose products u_i (x) v_i are mutually orthogonal.
struct UPBCandidate {
    Index d1 = 0;
    Index d2 = 0;
    std::vector<CVec> us;
    std::vector<CVec> vs;

    Index size() const { return static_cast<Index>(us.size()); }
};

/// Throws unless all vectors are unit within tol.residual and every pair
/// (i, j), i != j, satisfies <u_i,u_j><v_i,v_j> = 0 within tol.entry_zero.
void validate_upb_candidate(const UPBCandidate& upb, const Tolerance& tol = {});

/// Orthogonality pattern of one vector family: an edge (i,j) iff
/// <u_i, u_j> = 0 within tolerance.
struct OrthGraph {
    Index n = 0;
    std::vector<std::pair<Index, Index>> edges;  // i < j, sorted

    bool has_edge(Index i, Index j) const;
    Index degree(Index i) const;
    /// N[i]: the neighbours of i plus i itself, ascending.
    std::vector<Index> closed_neighborhood(Index i) const;
    OrthGraph complement() const;
};

OrthGraph orth_graph(const std::vector<CVec>& vectors, const Tolerance& tol = {});

/// Exact unextendibility decision by enumerating all 2^n partitions
/// S u S^c of the index set: the candidate is extendible iff some partition
/// leaves both {u_i}_{i in S} short of spanning C^{d1} and {v_j}_{j in S^c}
/// short of spanning C^{d2}. Refuses n > 20 rather than approximating.
struct ExtendResult {
    bool unextendible = false;
    // Populated when extendible: x (x) y is orthogonal to every u_i (x) v_i,
    // with x orthogonal to {u_i : i in subset} and y to the complement.
    CVec x, y;
    std::vector<Index> subset;
};

ExtendResult is_unextendible(const UPBCandidate& upb, const Tolerance& tol = {});

/// Checks that every index subset of size n-d+1 spans C^d, in both families
/// (d1 = d2 = d required). Reports the first violating subset otherwise.
struct SpanCheck {
    bool ok = false;
    char family = 'u';  // which family violated
    std::vector<Index> violating_subset;
};

SpanCheck span_condition(const UPBCandidate& upb, const Tolerance& tol = {});

/// True iff g stays connected after removing any k-1 vertices (exhaustive
/// over subsets). Graphs on one or zero vertices count as connected.
bool vertex_connectivity_check(const OrthGraph& g, Index k);

/// Searches for an index pair certifying that the Gram matrix of `vectors`
/// is not CPSD: {u_i, u_j} independent, <u_i,u_j> != 0 (so the basis
/// expansions below genuinely collide), and both closed neighborhoods N[i],
/// N[j] of the orthogonality graph are linearly independent of size equal to
/// the family's span dimension. The certificate carries the expansion
/// coefficients of u_i over the N[j] basis and of u_j over the N[i] basis.
///
/// The "not CPSD" conclusion is asserted only when the Gram matrix is also
/// DNN (PSD and entrywise nonnegative); otherwise the hypotheses are
/// reported but the matrix is flagged as not DNN anyway.
struct NonCpsdCertificate {
    bool found = false;
    Index i = -1, j = -1;
    std::vector<Index> neighborhood_i, neighborhood_j;
    CVec coeffs_over_nj;  // u_i = sum_{k in N[j]} c_k u_k
    CVec coeffs_over_ni;  // u_j = sum_{k in N[i]} d_k u_k
    bool gram_dnn = false;
    bool near_degenerate_warning = false;
};

NonCpsdCertificate non_cpsd_certificate(const std::vector<CVec>& vectors,
                                        const Tolerance& tol = {});

/// The full lemma chain for a minimal-size candidate (n = 2d-1): degree and
/// vertex-connectivity bounds, the span condition, existence of an
/// orthogonal pair, and the non-CPSD certificate. Evaluation stops at the
/// first failing step; later steps are reported as skipped.
struct UPBGramReport {
    struct Step {
        std::string name;
        bool pass = false;
        bool skipped = false;
        std::string detail;
    };
    std::vector<Step> steps;
    bool all_pass = false;
    NonCpsdCertificate certificate;
};

UPBGramReport minimal_upb_gram_check(const UPBCandidate& upb, const Tolerance& tol = {});

} // namespace pfchan
