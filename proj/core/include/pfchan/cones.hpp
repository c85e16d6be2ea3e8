#pragma once

#include <optional>
#include <vector>

#include "pfchan/channel.hpp"
#include "pfchan/numerics.hpp"

namespace pfchan {

/// Finitely generated cone in R^d. Generators are normalized to unit length
/// and deduplicated at construction; an empty generator list is the cone {0}.
class PolyhedralCone {
public:
    PolyhedralCone(Index dim, std::vector<RVec> generators, const Tolerance& tol = {});

    Index dim() const { return dim_; }
    const std::vector<RVec>& generators() const { return generators_; }
    bool is_trivial() const { return generators_.empty(); }

    bool has_dual_cache() const { return dual_generators_.has_value(); }
    const std::vector<RVec>& dual_generators() const;

private:
    friend PolyhedralCone dual_cone(const PolyhedralCone&, const Tolerance&);
    Index dim_;
    std::vector<RVec> generators_;
    std::optional<std::vector<RVec>> dual_generators_;
};

/// Dual cone {y : <y,g> >= 0 for all generators g}, returned by its own
/// generator description (extreme rays plus a spanning pair per lineality
/// direction). Computed by enumerating (d-1)-subsets of the generators as
/// candidate facets, so the dimension is capped: throws DimensionTooLarge
/// for d > 8. The result carries the input generators as its dual cache,
/// since (C*)* = C for finitely generated C.
PolyhedralCone dual_cone(const PolyhedralCone& c, const Tolerance& tol = {});

/// Membership via the halfspace description: v is in C iff <h,v> >= 0 for
/// every generator h of C*. Uses the dual cache when present, otherwise
/// computes the dual (subject to the same dimension cap).
bool cone_contains(const PolyhedralCone& c, const RVec& v, const Tolerance& tol = {});

/// Cone equality as mutual generator membership (generator lists are not
/// canonical, so list comparison would be meaningless).
bool cones_equal(const PolyhedralCone& a, const PolyhedralCone& b, const Tolerance& tol = {});

enum class ConeKind2D { zero, ray, sector, halfplane, line, full };

/// Boundary rays of a planar cone. `sector` and `ray` carry the two extreme
/// rays in counterclockwise order (equal for a single ray); the degenerate
/// kinds zero/halfplane/line/full carry what boundary data exists (the
/// halfplane reports its two boundary directions, the line one direction).
struct Rays2D {
    ConeKind2D kind = ConeKind2D::zero;
    RVec u1, u2;
};

Rays2D extreme_rays_2d(const PolyhedralCone& c, const Tolerance& tol = {});

/// The generators w_ij of NC(K)^*: w_ij[q] = (K_q)_ij over the channel's
/// real linearly independent Kraus family, indexed row-major by (i,j).
/// Their pairwise inner products are exactly the Choi entries,
/// <w_ki, w_lj> = J[(i,k),(j,l)].
struct GramFamily {
    enum class Source { choi, correlation };
    Index n = 0;  // vectors are indexed by (i,j) in [n]x[n]
    Index d = 0;  // common vector length (Kraus count)
    std::vector<RVec> vectors;
    Source source = Source::choi;

    const RVec& w(Index i, Index j) const { return vectors[static_cast<size_t>(i * n + j)]; }
};

/// Computes the w_ij family for a channel. The channel must admit real
/// linearly independent Kraus operators: the stored list is used when it
/// already qualifies (so hand-given real Kraus keep their basis), otherwise
/// the canonical real form is derived first. Throws ChoiNotReal when the
/// Choi matrix has complex entries.
GramFamily nc_generators_dual(const Channel& ch, const Tolerance& tol = {});

/// Membership of v in NC(K) = {v : sum_q v_q K_q entrywise nonnegative},
/// against the channel's stored Kraus list. On failure reports the most
/// violating entry of K(v) (value = its real part).
struct NCMembership {
    bool member = false;
    Index row = -1;
    Index col = -1;
    double value = 0.0;
};

NCMembership nc_membership(const Channel& ch, const RVec& v, const Tolerance& tol = {});

/// Necessary-condition screen for positive factorizability: true iff
/// NC(K)^* is contained in NC(K), tested by nc_membership of every w_ij
/// generator. By the Barker-Foran theorem this holds iff NC(K) contains a
/// self-dual cone; false certifies the channel is not PF. (The condition is
/// necessary; the library never treats it as sufficient.)
bool contains_self_dual_test(const Channel& ch, const Tolerance& tol = {});

/// The channel in the form contains_self_dual_test/nc_generators_dual work
/// with: stored Kraus list if already real and linearly independent, else
/// the canonical real form.
Channel ensure_real_kraus(const Channel& ch, const Tolerance& tol = {});

} // namespace pfchan
