#include "pfchan/schur.hpp"

#include <cmath>
#include <string>

namespace pfchan {

CorrelationMatrix::CorrelationMatrix(RMat entries, const Tolerance& tol) : c_(std::move(entries)) {
    if (c_.rows() != c_.cols() || c_.rows() == 0)
        throw NotCorrelation("correlation matrix must be square and nonempty");
    if ((c_ - c_.transpose()).cwiseAbs().maxCoeff() > tol.residual)
        throw NotCorrelation("correlation matrix must be symmetric");
    for (Index i = 0; i < c_.rows(); ++i)
        if (std::abs(c_(i, i) - 1.0) > tol.residual)
            throw NotCorrelation("correlation matrix diagonal entry " + std::to_string(i) +
                                 " is " + std::to_string(c_(i, i)) + ", expected 1");
    Mat complex_c = c_.cast<std::complex<double>>();
    if (!is_psd(complex_c, tol))
        throw NotCorrelation("correlation matrix is not positive semidefinite");
    std::vector<CVec> g = gram_vectors(complex_c, tol);
    gram_.reserve(g.size());
    for (const CVec& v : g) gram_.push_back(v.real());
}

Channel schur_channel(const CorrelationMatrix& c, const Tolerance& tol) {
    const Index n = c.size();
    EigResult eig = hermitian_eig(c.entries().cast<std::complex<double>>(), tol);
    std::vector<Mat> kraus;
    for (Index q = 0; q < eig.eigenvalues.size(); ++q) {
        if (eig.eigenvalues[q] <= tol.eig_zero) break;
        Mat k = Mat::Zero(n, n);
        for (Index i = 0; i < n; ++i)
            k(i, i) = std::sqrt(eig.eigenvalues[q]) * eig.eigenvectors(i, q);
        kraus.push_back(std::move(k));
    }
    return Channel::from_kraus(std::move(kraus), tol);
}

PolyhedralCone schur_nc_cone(const CorrelationMatrix& c, const Tolerance& tol) {
    PolyhedralCone gram_cone(std::max<Index>(c.rank(), 1), c.gram(), tol);
    return dual_cone(gram_cone, tol);
}

bool schur_pf_witness_check(const CorrelationMatrix& c, const PFWitness& w,
                            const Tolerance& tol) {
    validate_witness_structure(w, tol);
    const Index n = c.size();
    if (w.n != n)
        throw InvalidWitness("schur_pf_witness_check: witness dimension " +
                             std::to_string(w.n) + " != correlation size " + std::to_string(n));

    // The factorization of a Schur map forces Z(i,j) = 0 off the diagonal.
    std::vector<Mat> diag_blocks;
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            Mat z = w.z_block(i, j);
            if (i == j) {
                diag_blocks.push_back(std::move(z));
            } else if (max_abs(z) > tol.entry_zero) {
                return false;  // projecting to block-diagonal form would change Z
            }
        }
    }
    for (Index i = 0; i < n; ++i) {
        if (!is_hermitian(diag_blocks[static_cast<size_t>(i)], tol.residual)) return false;
        if (!is_psd(diag_blocks[static_cast<size_t>(i)], tol)) return false;
    }
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            std::complex<double> t =
                w.trace(diag_blocks[static_cast<size_t>(i)] * diag_blocks[static_cast<size_t>(j)]);
            if (std::abs(t - std::complex<double>(c.entries()(i, j), 0.0)) > tol.residual)
                return false;
        }
    }
    return true;
}

std::vector<RVec> pentagon_vectors() {
    const double s2 = 1.0 / std::sqrt(2.0);
    const double s3 = 1.0 / std::sqrt(3.0);
    std::vector<RVec> v(5, RVec(3));
    v[0] << s3, s3, s3;
    v[1] << 0.0, s2, s2;
    v[2] << -s2, 0.0, s2;
    v[3] << 0.0, -s2, s2;
    v[4] << s3, -s3, s3;
    return v;
}

RMat pentagon_gram() {
    const double q = 2.0 / std::sqrt(6.0);
    RMat w(5, 5);
    w << 1.0, q, 0.0, 0.0, 1.0 / 3.0,
         q, 1.0, 0.5, 0.0, 0.0,
         0.0, 0.5, 1.0, 0.5, 0.0,
         0.0, 0.0, 0.5, 1.0, q,
         1.0 / 3.0, 0.0, 0.0, q, 1.0;
    return w;
}

PentagonReport pentagon_counterexample_replay(const Tolerance& tol) {
    PentagonReport report;
    const std::vector<RVec> v = pentagon_vectors();
    const RMat expected = pentagon_gram();

    RMat gram(5, 5);
    for (Index i = 0; i < 5; ++i)
        for (Index j = 0; j < 5; ++j) gram(i, j) = v[static_cast<size_t>(i)].dot(v[static_cast<size_t>(j)]);
    report.gram = gram;

    {
        PentagonReport::Check c;
        c.name = "gram_matches_closed_form";
        c.residual = (gram - expected).cwiseAbs().maxCoeff();
        c.pass = c.residual <= tol.eig_zero;
        c.detail = "max |<v_i,v_j> - W_ij| = " + std::to_string(c.residual);
        report.checks.push_back(c);
    }
    {
        PentagonReport::Check c;
        c.name = "orthocomplement_pattern";
        double worst = 0.0;
        bool spans = true;
        for (Index i = 0; i < 5; ++i) {
            const RVec& p = v[static_cast<size_t>((i + 2) % 5)];
            const RVec& q = v[static_cast<size_t>((i + 3) % 5)];
            worst = std::max({worst, std::abs(v[static_cast<size_t>(i)].dot(p)),
                              std::abs(v[static_cast<size_t>(i)].dot(q))});
            RMat pq(3, 2);
            pq.col(0) = p;
            pq.col(1) = q;
            Eigen::JacobiSVD<RMat> svd(pq);
            if (svd.singularValues()(1) <= tol.eig_zero) spans = false;
        }
        c.residual = worst;
        c.pass = spans && worst <= tol.eig_zero;
        c.detail = "each {v_i}-perp is spanned by {v_{i+2}, v_{i+3}} (mod 5)";
        report.checks.push_back(c);
    }
    {
        PentagonReport::Check c;
        c.name = "basis_expansions";
        RMat basis1(3, 3), basis2(3, 3);
        basis1.col(0) = v[0];
        basis1.col(1) = v[2];
        basis1.col(2) = v[3];
        basis2.col(0) = v[1];
        basis2.col(1) = v[3];
        basis2.col(2) = v[4];
        Eigen::FullPivLU<RMat> lu1(basis1), lu2(basis2);
        bool invertible = lu1.isInvertible() && lu2.isInvertible();
        RVec coeff1 = lu1.solve(v[1]);  // v_1 = a v_0 + b v_2 + c v_3
        RVec coeff2 = lu2.solve(v[0]);  // v_0 = alpha v_1 + beta v_3 + gamma v_4
        double res1 = (basis1 * coeff1 - v[1]).cwiseAbs().maxCoeff();
        double res2 = (basis2 * coeff2 - v[0]).cwiseAbs().maxCoeff();
        report.a = coeff1[0];
        report.alpha = coeff2[0];
        c.residual = std::max(res1, res2);
        c.pass = invertible && c.residual <= tol.eig_zero;
        c.detail = "a = " + std::to_string(report.a) + ", alpha = " + std::to_string(report.alpha);
        report.checks.push_back(c);
    }
    {
        PentagonReport::Check c;
        c.name = "forced_contradiction";
        // The factorization argument forces a = alpha (both would equal
        // tau(A_0 A_1)) and then A_0 = A_1, impossible since <v_0,v_1> != 1.
        double coeff_gap = std::abs(report.a - report.alpha);
        double overlap = gram(0, 1);
        c.residual = coeff_gap;
        c.pass = coeff_gap <= tol.eig_zero && std::abs(report.a) > tol.eig_zero &&
                 std::abs(overlap - 1.0) > tol.eig_zero;
        c.detail = "a = alpha = " + std::to_string(report.a) + " while <v_0,v_1> = " +
                   std::to_string(overlap) + " != 1";
        report.checks.push_back(c);
    }

    report.all_pass = true;
    for (const auto& c : report.checks) report.all_pass = report.all_pass && c.pass;
    return report;
}

} // namespace pfchan
