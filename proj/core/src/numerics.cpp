#include "pfchan/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace pfchan {

bool is_hermitian(const Mat& m, double residual) {
    if (m.rows() != m.cols()) return false;
    return max_abs_diff(m, m.adjoint()) <= residual;
}

namespace {

// Make the largest-magnitude entry of each eigenvector real and positive.
// Keeps eigenvectors of real symmetric inputs real (sign flip only) and pins
// the free phase so repeated runs emit identical output.
void canonicalize_phases(Mat& vectors, double entry_zero) {
    for (Index c = 0; c < vectors.cols(); ++c) {
        Index pivot = 0;
        double best = -1.0;
        for (Index r = 0; r < vectors.rows(); ++r) {
            double a = std::abs(vectors(r, c));
            if (a > best + entry_zero) {
                best = a;
                pivot = r;
            }
        }
        std::complex<double> p = vectors(pivot, c);
        if (std::abs(p) > entry_zero) vectors.col(c) *= std::conj(p) / std::abs(p);
    }
}

// Lexicographic comparison of rounded eigenvector entries (re then im),
// used only to order equal-eigenvalue columns deterministically.
bool lex_less(const Mat& vecs, Index a, Index b) {
    constexpr double scale = 1e12;
    for (Index r = 0; r < vecs.rows(); ++r) {
        double ra = std::round(vecs(r, a).real() * scale);
        double rb = std::round(vecs(r, b).real() * scale);
        if (ra != rb) return ra < rb;
        double ia = std::round(vecs(r, a).imag() * scale);
        double ib = std::round(vecs(r, b).imag() * scale);
        if (ia != ib) return ia < ib;
    }
    return false;
}

} // namespace

EigResult hermitian_eig(const Mat& m, const Tolerance& tol) {
    if (m.rows() != m.cols())
        throw NotHermitian("hermitian_eig: matrix is not square");
    if (!is_hermitian(m, tol.residual))
        throw NotHermitian("hermitian_eig: matrix is not Hermitian within tolerance " +
                           std::to_string(tol.residual));

    EigResult out;
    if (max_imag(m) <= tol.entry_zero) {
        // Real symmetric path: guarantees entrywise-real eigenvectors.
        RMat sym = 0.5 * (m.real() + m.real().transpose());
        Eigen::SelfAdjointEigenSolver<RMat> solver(sym);
        if (solver.info() != Eigen::Success)
            throw InvariantViolation("hermitian_eig: real symmetric solver failed");
        out.eigenvalues = solver.eigenvalues();
        out.eigenvectors = solver.eigenvectors().cast<std::complex<double>>();
    } else {
        Mat herm = 0.5 * (m + m.adjoint());
        Eigen::SelfAdjointEigenSolver<Mat> solver(herm);
        if (solver.info() != Eigen::Success)
            throw InvariantViolation("hermitian_eig: complex Hermitian solver failed");
        out.eigenvalues = solver.eigenvalues();
        out.eigenvectors = solver.eigenvectors();
    }

    canonicalize_phases(out.eigenvectors, tol.entry_zero);

    std::vector<Index> order(static_cast<size_t>(out.eigenvalues.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (out.eigenvalues[a] != out.eigenvalues[b])
            return out.eigenvalues[a] > out.eigenvalues[b];
        return lex_less(out.eigenvectors, a, b);
    });

    EigResult sorted;
    sorted.eigenvalues.resize(out.eigenvalues.size());
    sorted.eigenvectors.resize(out.eigenvectors.rows(), out.eigenvectors.cols());
    for (Index i = 0; i < out.eigenvalues.size(); ++i) {
        sorted.eigenvalues[i] = out.eigenvalues[order[static_cast<size_t>(i)]];
        sorted.eigenvectors.col(i) = out.eigenvectors.col(order[static_cast<size_t>(i)]);
    }
    return sorted;
}

bool is_psd(const Mat& m, const Tolerance& tol) {
    EigResult eig = hermitian_eig(m, tol);
    if (eig.eigenvalues.size() == 0) return true;
    return eig.eigenvalues.minCoeff() >= -tol.eig_zero;
}

Index psd_rank(const Mat& m, const Tolerance& tol) {
    EigResult eig = hermitian_eig(m, tol);
    Index r = 0;
    for (Index i = 0; i < eig.eigenvalues.size(); ++i)
        if (eig.eigenvalues[i] > tol.eig_zero) ++r;
    return r;
}

std::vector<CVec> gram_vectors(const Mat& m, const Tolerance& tol) {
    EigResult eig = hermitian_eig(m, tol);
    if (eig.eigenvalues.size() > 0 && eig.eigenvalues.minCoeff() < -tol.eig_zero)
        throw NotPSD("gram_vectors: minimum eigenvalue " +
                     std::to_string(eig.eigenvalues.minCoeff()) + " below -eig_zero");

    Index r = 0;
    while (r < eig.eigenvalues.size() && eig.eigenvalues[r] > tol.eig_zero) ++r;

    // m_ij = sum_q lambda_q V_iq conj(V_jq), so g_i = sqrt(lambda) .* conj(row i)
    // satisfies <g_i, g_j> = m_ij under the conjugate-first inner product.
    std::vector<CVec> out;
    out.reserve(static_cast<size_t>(m.rows()));
    for (Index i = 0; i < m.rows(); ++i) {
        CVec g(r);
        for (Index q = 0; q < r; ++q)
            g[q] = std::sqrt(eig.eigenvalues[q]) * std::conj(eig.eigenvectors(i, q));
        out.push_back(std::move(g));
    }
    return out;
}

CVec vec(const Mat& m) {
    return Eigen::Map<const CVec>(m.data(), m.size());
}

Mat unvec(const CVec& v, Index rows, Index cols) {
    if (v.size() != rows * cols)
        throw DimensionMismatch("unvec: vector length " + std::to_string(v.size()) +
                                " != " + std::to_string(rows) + "x" + std::to_string(cols));
    return Eigen::Map<const Mat>(v.data(), rows, cols);
}

Index family_rank(const std::vector<CVec>& vectors, const Tolerance& tol, bool* near_cutoff) {
    if (near_cutoff) *near_cutoff = false;
    if (vectors.empty()) return 0;
    Mat stacked(vectors.front().size(), static_cast<Index>(vectors.size()));
    for (size_t c = 0; c < vectors.size(); ++c) {
        if (vectors[c].size() != stacked.rows())
            throw DimensionMismatch("family_rank: vectors have mixed lengths");
        stacked.col(static_cast<Index>(c)) = vectors[c];
    }
    Eigen::JacobiSVD<Mat> svd(stacked);
    Index r = 0;
    const auto& sv = svd.singularValues();
    for (Index i = 0; i < sv.size(); ++i)
        if (sv[i] > tol.eig_zero) ++r;
    if (near_cutoff && r > 0 && sv[r - 1] <= 10.0 * tol.eig_zero) *near_cutoff = true;
    return r;
}

} // namespace pfchan
