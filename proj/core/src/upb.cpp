#include "pfchan/upb.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace pfchan {

namespace {

Mat stack_columns(const std::vector<CVec>& vectors, const std::vector<Index>& which) {
    if (which.empty()) return Mat(vectors.empty() ? 0 : vectors.front().size(), 0);
    Mat m(vectors.front().size(), static_cast<Index>(which.size()));
    for (size_t c = 0; c < which.size(); ++c)
        m.col(static_cast<Index>(c)) = vectors[static_cast<size_t>(which[c])];
    return m;
}

Index subfamily_rank(const std::vector<CVec>& vectors, const std::vector<Index>& which,
                     const Tolerance& tol, bool* near_cutoff = nullptr) {
    if (near_cutoff) *near_cutoff = false;
    if (which.empty()) return 0;
    Mat m = stack_columns(vectors, which);
    Eigen::JacobiSVD<Mat> svd(m);
    Index r = 0;
    const auto& sv = svd.singularValues();
    for (Index i = 0; i < sv.size(); ++i)
        if (sv[i] > tol.eig_zero) ++r;
    if (near_cutoff && r > 0 && sv[r - 1] <= 10.0 * tol.eig_zero) *near_cutoff = true;
    return r;
}

// Unit vector orthogonal to the span of the selected columns, or empty if
// the span is the full space.
CVec orthogonal_complement_vector(Index dim, const std::vector<CVec>& vectors,
                                  const std::vector<Index>& which, const Tolerance& tol) {
    if (which.empty()) {
        CVec e = CVec::Zero(dim);
        e[0] = 1.0;
        return e;
    }
    Mat m = stack_columns(vectors, which);
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU);
    Index r = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > tol.eig_zero) ++r;
    if (r >= dim) return CVec();
    return svd.matrixU().col(dim - 1);
}

bool next_subset_indices(std::vector<Index>& s, Index m) {
    const Index k = static_cast<Index>(s.size());
    Index i = k - 1;
    while (i >= 0 && s[static_cast<size_t>(i)] == m - k + i) --i;
    if (i < 0) return false;
    ++s[static_cast<size_t>(i)];
    for (Index j = i + 1; j < k; ++j)
        s[static_cast<size_t>(j)] = s[static_cast<size_t>(j - 1)] + 1;
    return true;
}

} // namespace

void validate_upb_candidate(const UPBCandidate& upb, const Tolerance& tol) {
    if (upb.us.size() != upb.vs.size())
        throw DimensionMismatch("UPB candidate: families have different sizes");
    if (upb.us.empty())
        throw DimensionMismatch("UPB candidate: empty families");
    for (const CVec& u : upb.us)
        if (u.size() != upb.d1)
            throw DimensionMismatch("UPB candidate: u-vector length != d1");
    for (const CVec& v : upb.vs)
        if (v.size() != upb.d2)
            throw DimensionMismatch("UPB candidate: v-vector length != d2");
    for (size_t i = 0; i < upb.us.size(); ++i) {
        if (std::abs(upb.us[i].norm() - 1.0) > tol.residual ||
            std::abs(upb.vs[i].norm() - 1.0) > tol.residual)
            throw NotUnitVector("UPB candidate: vector " + std::to_string(i) +
                                " is not unit length");
    }
    for (size_t i = 0; i < upb.us.size(); ++i) {
        for (size_t j = i + 1; j < upb.us.size(); ++j) {
            std::complex<double> p = upb.us[i].dot(upb.us[j]) * upb.vs[i].dot(upb.vs[j]);
            if (std::abs(p) > tol.entry_zero)
                throw InvalidWitness("UPB candidate: products " + std::to_string(i) + "," +
                                     std::to_string(j) + " are not orthogonal (|<u><v>| = " +
                                     std::to_string(std::abs(p)) + ")");
        }
    }
}

bool OrthGraph::has_edge(Index i, Index j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(i, j));
}

Index OrthGraph::degree(Index i) const {
    Index deg = 0;
    for (const auto& [a, b] : edges)
        if (a == i || b == i) ++deg;
    return deg;
}

std::vector<Index> OrthGraph::closed_neighborhood(Index i) const {
    std::vector<Index> out;
    for (Index j = 0; j < n; ++j)
        if (j == i || has_edge(i, j)) out.push_back(j);
    return out;
}

OrthGraph OrthGraph::complement() const {
    OrthGraph g;
    g.n = n;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            if (!has_edge(i, j)) g.edges.emplace_back(i, j);
    return g;
}

OrthGraph orth_graph(const std::vector<CVec>& vectors, const Tolerance& tol) {
    OrthGraph g;
    g.n = static_cast<Index>(vectors.size());
    for (const CVec& v : vectors)
        if (v.norm() <= tol.entry_zero)
            throw ZeroVector("orth_graph: zero vector in family");
    for (Index i = 0; i < g.n; ++i)
        for (Index j = i + 1; j < g.n; ++j)
            if (std::abs(vectors[static_cast<size_t>(i)].dot(vectors[static_cast<size_t>(j)])) <=
                tol.entry_zero)
                g.edges.emplace_back(i, j);
    return g;
}

ExtendResult is_unextendible(const UPBCandidate& upb, const Tolerance& tol) {
    const Index n = upb.size();
    if (n > 20)
        throw TooManyVectors("is_unextendible: n = " + std::to_string(n) +
                             " exceeds the exact-enumeration cap of 20");
    validate_upb_candidate(upb, tol);

    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<Index> s, sc;
        for (Index i = 0; i < n; ++i)
            ((mask >> i) & 1u) ? s.push_back(i) : sc.push_back(i);
        if (subfamily_rank(upb.us, s, tol) >= upb.d1) continue;
        if (subfamily_rank(upb.vs, sc, tol) >= upb.d2) continue;

        ExtendResult res;
        res.unextendible = false;
        res.subset = s;
        res.x = orthogonal_complement_vector(upb.d1, upb.us, s, tol);
        res.y = orthogonal_complement_vector(upb.d2, upb.vs, sc, tol);
        if (res.x.size() == 0 || res.y.size() == 0)
            throw InvariantViolation("is_unextendible: rank said deficient but no "
                                     "complement vector found");
        return res;
    }
    ExtendResult res;
    res.unextendible = true;
    return res;
}

SpanCheck span_condition(const UPBCandidate& upb, const Tolerance& tol) {
    if (upb.d1 != upb.d2)
        throw DimensionMismatch("span_condition: requires d1 == d2");
    const Index d = upb.d1;
    const Index n = upb.size();
    const Index k = n - d + 1;
    SpanCheck out;
    out.ok = true;
    if (k <= 0) return out;  // no subsets to check
    if (k > n) {
        out.ok = false;
        return out;
    }
    for (int family = 0; family < 2; ++family) {
        const auto& vecs = family == 0 ? upb.us : upb.vs;
        std::vector<Index> subset(static_cast<size_t>(k));
        for (Index i = 0; i < k; ++i) subset[static_cast<size_t>(i)] = i;
        do {
            if (subfamily_rank(vecs, subset, tol) < d) {
                out.ok = false;
                out.family = family == 0 ? 'u' : 'v';
                out.violating_subset = subset;
                return out;
            }
        } while (next_subset_indices(subset, n));
    }
    return out;
}

bool vertex_connectivity_check(const OrthGraph& g, Index k) {
    if (k <= 0) return true;
    const Index n = g.n;
    const Index remove = k - 1;
    if (remove > n) return true;  // no such subsets exist

    auto connected_without = [&](const std::vector<bool>& removed) {
        std::vector<Index> alive;
        for (Index i = 0; i < n; ++i)
            if (!removed[static_cast<size_t>(i)]) alive.push_back(i);
        if (alive.size() <= 1) return true;
        std::vector<bool> seen(static_cast<size_t>(n), false);
        std::vector<Index> stack{alive.front()};
        seen[static_cast<size_t>(alive.front())] = true;
        size_t count = 1;
        while (!stack.empty()) {
            Index v = stack.back();
            stack.pop_back();
            for (Index w : alive) {
                if (!seen[static_cast<size_t>(w)] && g.has_edge(v, w)) {
                    seen[static_cast<size_t>(w)] = true;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count == alive.size();
    };

    if (remove == 0) {
        std::vector<bool> removed(static_cast<size_t>(n), false);
        return connected_without(removed);
    }
    std::vector<Index> subset(static_cast<size_t>(remove));
    for (Index i = 0; i < remove; ++i) subset[static_cast<size_t>(i)] = i;
    do {
        std::vector<bool> removed(static_cast<size_t>(n), false);
        for (Index i : subset) removed[static_cast<size_t>(i)] = true;
        if (!connected_without(removed)) return false;
    } while (next_subset_indices(subset, n));
    return true;
}

NonCpsdCertificate non_cpsd_certificate(const std::vector<CVec>& vectors,
                                        const Tolerance& tol) {
    NonCpsdCertificate out;
    if (vectors.empty()) return out;

    std::vector<CVec> unit;
    unit.reserve(vectors.size());
    for (const CVec& v : vectors) {
        double norm = v.norm();
        if (norm <= tol.entry_zero)
            throw ZeroVector("non_cpsd_certificate: zero vector in family");
        unit.push_back(v / norm);
    }

    const Index n = static_cast<Index>(unit.size());
    Mat gram(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            gram(i, j) = unit[static_cast<size_t>(i)].dot(unit[static_cast<size_t>(j)]);

    out.gram_dnn = true;
    for (Index i = 0; i < n && out.gram_dnn; ++i)
        for (Index j = 0; j < n; ++j)
            if (gram(i, j).real() < -tol.entry_zero ||
                std::abs(gram(i, j).imag()) > tol.entry_zero) {
                out.gram_dnn = false;
                break;
            }

    bool near = false;
    std::vector<Index> all(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i;
    const Index d = subfamily_rank(unit, all, tol, &near);
    out.near_degenerate_warning = near;

    OrthGraph g = orth_graph(unit, tol);

    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (i == j) continue;
            // A zero inner product would put each vector inside the other's
            // closed neighborhood basis, making the expansion trivial and the
            // contradiction vacuous; require a genuinely non-orthogonal pair.
            if (std::abs(gram(i, j)) <= tol.entry_zero) continue;
            if (subfamily_rank(unit, {i, j}, tol) < 2) continue;

            std::vector<Index> ni = g.closed_neighborhood(i);
            std::vector<Index> nj = g.closed_neighborhood(j);
            if (static_cast<Index>(ni.size()) != d || static_cast<Index>(nj.size()) != d)
                continue;
            bool near_i = false, near_j = false;
            if (subfamily_rank(unit, ni, tol, &near_i) < d) continue;
            if (subfamily_rank(unit, nj, tol, &near_j) < d) continue;

            Mat basis_j = stack_columns(unit, nj);
            Mat basis_i = stack_columns(unit, ni);
            out.found = true;
            out.i = i;
            out.j = j;
            out.neighborhood_i = ni;
            out.neighborhood_j = nj;
            out.coeffs_over_nj = basis_j.colPivHouseholderQr().solve(unit[static_cast<size_t>(i)]);
            out.coeffs_over_ni = basis_i.colPivHouseholderQr().solve(unit[static_cast<size_t>(j)]);
            out.near_degenerate_warning = near || near_i || near_j;
            return out;
        }
    }
    return out;
}

UPBGramReport minimal_upb_gram_check(const UPBCandidate& upb, const Tolerance& tol) {
    if (upb.d1 != upb.d2)
        throw WrongSize("minimal_upb_gram_check: requires d1 == d2");
    const Index d = upb.d1;
    const Index n = upb.size();
    if (n != 2 * d - 1)
        throw WrongSize("minimal_upb_gram_check: expected n = 2d-1 = " +
                        std::to_string(2 * d - 1) + ", got n = " + std::to_string(n));

    UPBGramReport report;
    bool failed = false;
    auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        UPBGramReport::Step step;
        step.name = name;
        step.skipped = failed;
        step.pass = !failed && pass;
        step.detail = detail;
        report.steps.push_back(step);
        if (!failed && !pass) failed = true;
    };

    bool valid = true;
    std::string valid_detail = "unit norms and product orthogonality hold";
    try {
        validate_upb_candidate(upb, tol);
    } catch (const Error& e) {
        valid = false;
        valid_detail = e.what();
    }
    add("product_orthogonality", valid, valid_detail);

    OrthGraph gu = failed ? OrthGraph{} : orth_graph(upb.us, tol);
    OrthGraph gv = failed ? OrthGraph{} : orth_graph(upb.vs, tol);

    {
        bool pass = !failed;
        std::string detail;
        if (!failed) {
            Index min_u = n, min_v = n;
            for (Index i = 0; i < n; ++i) {
                min_u = std::min(min_u, gu.degree(i));
                min_v = std::min(min_v, gv.degree(i));
            }
            pass = min_u >= n - d && min_v >= n - d;
            detail = "minimum degrees " + std::to_string(min_u) + "/" + std::to_string(min_v) +
                     ", required >= " + std::to_string(n - d);
        }
        add("alon_lovasz_degree", pass, detail);
    }
    {
        bool pass = !failed && vertex_connectivity_check(gu, n - d) &&
                    vertex_connectivity_check(gv, n - d);
        add("alon_lovasz_connectivity", pass,
            "both orthogonality graphs " + std::to_string(n - d) + "-vertex-connected");
    }
    {
        bool pass = !failed;
        std::string detail = "all subsets of size " + std::to_string(n - d + 1) + " span";
        if (!failed) {
            SpanCheck sc = span_condition(upb, tol);
            pass = sc.ok;
            if (!sc.ok) {
                detail = "family ";
                detail += sc.family;
                detail += " has a non-spanning subset {";
                for (size_t t = 0; t < sc.violating_subset.size(); ++t)
                    detail += (t ? "," : "") + std::to_string(sc.violating_subset[t]);
                detail += "}";
            }
        }
        add("span_condition", pass, detail);
    }
    {
        bool pass = !failed && !gu.edges.empty();
        add("orthogonal_pair_exists", pass,
            pass ? "orthogonality graph has an edge" : "no orthogonal pair");
    }
    {
        bool pass = !failed;
        std::string detail;
        if (!failed) {
            report.certificate = non_cpsd_certificate(upb.us, tol);
            pass = report.certificate.found;
            if (pass) {
                detail = "pair (" + std::to_string(report.certificate.i) + "," +
                         std::to_string(report.certificate.j) + ") with full-rank closed "
                         "neighborhoods; Gram matrix is " +
                         (report.certificate.gram_dnn ? "DNN and not CPSD"
                                                      : "not DNN (no CPSD claim needed)");
            } else {
                detail = "no qualifying pair";
            }
        }
        add("sikora_certificate", pass, detail);
    }

    report.all_pass = !failed;
    return report;
}

} // namespace pfchan
