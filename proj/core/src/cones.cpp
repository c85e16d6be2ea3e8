#include "pfchan/cones.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pfchan {

namespace {

constexpr Index kDualDimensionCap = 8;

bool nearly_equal(const RVec& a, const RVec& b, double tol) {
    return (a - b).cwiseAbs().maxCoeff() <= tol;
}

void push_unique(std::vector<RVec>& rays, const RVec& candidate, double tol) {
    for (const RVec& r : rays)
        if (nearly_equal(r, candidate, tol)) return;
    rays.push_back(candidate);
}

// Enumerates size-k subsets of [0,m) in lexicographic order.
bool next_subset(std::vector<Index>& s, Index m) {
    const Index k = static_cast<Index>(s.size());
    Index i = k - 1;
    while (i >= 0 && s[static_cast<size_t>(i)] == m - k + i) --i;
    if (i < 0) return false;
    ++s[static_cast<size_t>(i)];
    for (Index j = i + 1; j < k; ++j)
        s[static_cast<size_t>(j)] = s[static_cast<size_t>(j - 1)] + 1;
    return true;
}

RVec rot90(const RVec& v) {
    RVec out(2);
    out << -v[1], v[0];
    return out;
}

} // namespace

PolyhedralCone::PolyhedralCone(Index dim, std::vector<RVec> generators, const Tolerance& tol)
    : dim_(dim) {
    if (dim <= 0) throw DimensionMismatch("PolyhedralCone: dimension must be positive");
    for (RVec& g : generators) {
        if (g.size() != dim)
            throw DimensionMismatch("PolyhedralCone: generator length " +
                                    std::to_string(g.size()) + " != dim " + std::to_string(dim));
        double norm = g.norm();
        if (norm <= tol.entry_zero) continue;  // zero generators add nothing
        RVec unit = g / norm;
        push_unique(generators_, unit, 10 * tol.entry_zero);
    }
}

const std::vector<RVec>& PolyhedralCone::dual_generators() const {
    if (!dual_generators_)
        throw InvariantViolation("PolyhedralCone: dual description not cached");
    return *dual_generators_;
}

PolyhedralCone dual_cone(const PolyhedralCone& c, const Tolerance& tol) {
    const Index d = c.dim();
    if (d > kDualDimensionCap)
        throw DimensionTooLarge("dual_cone: dimension " + std::to_string(d) +
                                " exceeds cap " + std::to_string(kDualDimensionCap));

    std::vector<RVec> rays;
    const auto& gens = c.generators();
    const Index m = static_cast<Index>(gens.size());

    if (m == 0) {
        // Dual of {0} is all of R^d.
        for (Index i = 0; i < d; ++i) {
            RVec e = RVec::Zero(d);
            e[i] = 1.0;
            rays.push_back(e);
            rays.push_back(-e);
        }
    } else {
        RMat a(m, d);
        for (Index i = 0; i < m; ++i) a.row(i) = gens[static_cast<size_t>(i)];

        // Split off the lineality space L = null(A); the dual is L plus a
        // pointed cone inside row(A).
        Eigen::JacobiSVD<RMat> svd(a, Eigen::ComputeFullV);
        Index row_rank = 0;
        for (Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()[i] > tol.eig_zero) ++row_rank;
        const Index k = row_rank;

        RMat basis = svd.matrixV().leftCols(k);       // orthonormal basis of row(A)
        RMat lineality = svd.matrixV().rightCols(d - k);
        RMat at = a * basis;                          // constraints in row(A) coordinates

        auto keep_if_feasible = [&](const RVec& z) {
            RVec trial = z / z.norm();
            if ((at * trial).minCoeff() >= -tol.entry_zero)
                push_unique(rays, RVec(basis * trial), 10 * tol.entry_zero);
            if ((at * (-trial)).minCoeff() >= -tol.entry_zero)
                push_unique(rays, RVec(basis * (-trial)), 10 * tol.entry_zero);
        };

        if (k == 1) {
            RVec z(1);
            z << 1.0;
            keep_if_feasible(z);
        } else {
            // An extreme ray of the pointed part satisfies k-1 linearly
            // independent active constraints; enumerate candidate facets.
            std::vector<Index> subset(static_cast<size_t>(k - 1));
            for (Index i = 0; i < k - 1; ++i) subset[static_cast<size_t>(i)] = i;
            do {
                RMat rows(k - 1, k);
                for (Index i = 0; i < k - 1; ++i)
                    rows.row(i) = at.row(subset[static_cast<size_t>(i)]);
                Eigen::JacobiSVD<RMat> sub(rows, Eigen::ComputeFullV);
                Index r = 0;
                for (Index i = 0; i < sub.singularValues().size(); ++i)
                    if (sub.singularValues()[i] > tol.eig_zero) ++r;
                if (r != k - 1) continue;
                keep_if_feasible(sub.matrixV().col(k - 1));
            } while (next_subset(subset, m));
        }

        for (Index i = 0; i < d - k; ++i) {
            RVec l = lineality.col(i);
            push_unique(rays, l, 10 * tol.entry_zero);
            push_unique(rays, RVec(-l), 10 * tol.entry_zero);
        }
    }

    PolyhedralCone out(d, std::move(rays), tol);
    out.dual_generators_ = c.generators();
    return out;
}

bool cone_contains(const PolyhedralCone& c, const RVec& v, const Tolerance& tol) {
    if (v.size() != c.dim())
        throw DimensionMismatch("cone_contains: vector length does not match cone dimension");
    if (v.norm() <= tol.entry_zero) return true;
    const std::vector<RVec>* halfspaces;
    PolyhedralCone dual(1, {});
    if (c.has_dual_cache()) {
        halfspaces = &c.dual_generators();
    } else {
        dual = dual_cone(c, tol);
        halfspaces = &dual.generators();
    }
    RVec unit = v / v.norm();
    for (const RVec& h : *halfspaces)
        if (h.dot(unit) < -tol.entry_zero) return false;
    return true;
}

bool cones_equal(const PolyhedralCone& a, const PolyhedralCone& b, const Tolerance& tol) {
    if (a.dim() != b.dim()) return false;
    for (const RVec& g : a.generators())
        if (!cone_contains(b, g, tol)) return false;
    for (const RVec& g : b.generators())
        if (!cone_contains(a, g, tol)) return false;
    return true;
}

Rays2D extreme_rays_2d(const PolyhedralCone& c, const Tolerance& tol) {
    if (c.dim() != 2)
        throw DimensionMismatch("extreme_rays_2d: cone must live in R^2");
    Rays2D out;
    const auto& dirs = c.generators();
    if (dirs.empty()) {
        out.kind = ConeKind2D::zero;
        return out;
    }

    bool collinear = true;
    bool both_signs = false;
    for (const RVec& u : dirs) {
        double cross = dirs.front()[0] * u[1] - dirs.front()[1] * u[0];
        if (std::abs(cross) > tol.entry_zero) collinear = false;
        if (dirs.front().dot(u) < 0) both_signs = true;
    }
    if (collinear) {
        out.kind = both_signs ? ConeKind2D::line : ConeKind2D::ray;
        out.u1 = dirs.front();
        out.u2 = both_signs ? RVec(-dirs.front()) : dirs.front();
        return out;
    }

    // Look for a halfplane containing every direction; its inner normal
    // orients the angular sweep.
    std::optional<RVec> normal;
    for (const RVec& u : dirs) {
        for (const RVec& cand : {RVec(rot90(u)), RVec(-rot90(u))}) {
            bool ok = true;
            for (const RVec& w : dirs)
                if (cand.dot(w) < -tol.entry_zero) { ok = false; break; }
            if (ok) { normal = cand; break; }
        }
        if (normal) break;
    }
    if (!normal) {
        out.kind = ConeKind2D::full;
        return out;
    }

    RVec ref(2);
    ref << (*normal)[1], -(*normal)[0];  // (ref, normal) right-handed
    double lo = 1e300, hi = -1e300;
    for (const RVec& u : dirs) {
        double theta = std::atan2(normal->dot(u), ref.dot(u));
        if (theta < lo) { lo = theta; out.u1 = u; }
        if (theta > hi) { hi = theta; out.u2 = u; }
    }
    out.kind = (hi - lo >= M_PI - 1e-12) ? ConeKind2D::halfplane : ConeKind2D::sector;
    return out;
}

Channel ensure_real_kraus(const Channel& ch, const Tolerance& tol) {
    if (ch.has_canonical_real_kraus(tol)) return ch;
    return canonical_real_kraus(ch, tol);
}

GramFamily nc_generators_dual(const Channel& ch, const Tolerance& tol) {
    Channel c = ensure_real_kraus(ch, tol);
    GramFamily fam;
    fam.n = c.dim();
    fam.d = static_cast<Index>(c.kraus().size());
    fam.source = GramFamily::Source::choi;
    fam.vectors.reserve(static_cast<size_t>(fam.n * fam.n));
    for (Index i = 0; i < fam.n; ++i) {
        for (Index j = 0; j < fam.n; ++j) {
            RVec w(fam.d);
            for (Index q = 0; q < fam.d; ++q)
                w[q] = c.kraus()[static_cast<size_t>(q)](i, j).real();
            fam.vectors.push_back(std::move(w));
        }
    }
    return fam;
}

NCMembership nc_membership(const Channel& ch, const RVec& v, const Tolerance& tol) {
    const Index d = static_cast<Index>(ch.kraus().size());
    if (v.size() != d)
        throw DimensionMismatch("nc_membership: vector length " + std::to_string(v.size()) +
                                " != Kraus count " + std::to_string(d));
    Mat kv = Mat::Zero(ch.dim(), ch.dim());
    for (Index q = 0; q < d; ++q) kv += v[q] * ch.kraus()[static_cast<size_t>(q)];

    NCMembership res;
    res.member = true;
    double worst = 0.0;
    for (Index i = 0; i < kv.rows(); ++i) {
        for (Index j = 0; j < kv.cols(); ++j) {
            double violation = std::max(-kv(i, j).real(), std::abs(kv(i, j).imag()));
            if (violation > tol.entry_zero && violation > worst) {
                worst = violation;
                res.member = false;
                res.row = i;
                res.col = j;
                res.value = kv(i, j).real();
            }
        }
    }
    return res;
}

bool contains_self_dual_test(const Channel& ch, const Tolerance& tol) {
    Channel c = ensure_real_kraus(ch, tol);
    GramFamily fam = nc_generators_dual(c, tol);
    for (const RVec& w : fam.vectors)
        if (!nc_membership(c, w, tol).member) return false;
    return true;
}

} // namespace pfchan
