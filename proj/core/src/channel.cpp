#include "pfchan/channel.hpp"

#include <cmath>
#include <string>

namespace pfchan {

namespace {

Mat choi_from_kraus(const std::vector<Mat>& kraus, Index n) {
    Mat j = Mat::Zero(n * n, n * n);
    for (const Mat& k : kraus) {
        CVec v = vec(k);
        j.noalias() += v * v.adjoint();
    }
    return j;
}

void check_trace_preserving(const std::vector<Mat>& kraus, Index n, const Tolerance& tol) {
    Mat acc = Mat::Zero(n, n);
    for (const Mat& k : kraus) acc.noalias() += k.adjoint() * k;
    double defect = max_abs_diff(acc, Mat::Identity(n, n));
    if (defect > tol.residual)
        throw NotTracePreserving("sum K_i^* K_i deviates from identity by " +
                                 std::to_string(defect));
}

} // namespace

Channel Channel::from_kraus(std::vector<Mat> kraus, const Tolerance& tol,
                            bool require_trace_preserving) {
    if (kraus.empty())
        throw DimensionMismatch("from_kraus: empty Kraus list");
    const Index n = kraus.front().rows();
    for (const Mat& k : kraus)
        if (k.rows() != n || k.cols() != n)
            throw DimensionMismatch("from_kraus: Kraus operators must all be " +
                                    std::to_string(n) + "x" + std::to_string(n));
    Channel ch;
    ch.n_ = n;
    ch.trace_preserving_ = true;
    if (require_trace_preserving) {
        check_trace_preserving(kraus, n, tol);
    } else {
        Mat acc = Mat::Zero(n, n);
        for (const Mat& k : kraus) acc.noalias() += k.adjoint() * k;
        ch.trace_preserving_ = max_abs_diff(acc, Mat::Identity(n, n)) <= tol.residual;
    }
    ch.choi_ = choi_from_kraus(kraus, n);
    ch.kraus_ = std::move(kraus);
    return ch;
}

Channel Channel::from_choi(const Mat& j, Index n, const Tolerance& tol,
                           bool require_trace_preserving) {
    if (j.rows() != n * n || j.cols() != n * n)
        throw DimensionMismatch("from_choi: expected " + std::to_string(n * n) + "x" +
                                std::to_string(n * n) + " Choi matrix");
    EigResult eig = hermitian_eig(j, tol);
    if (eig.eigenvalues.size() > 0 && eig.eigenvalues.minCoeff() < -tol.eig_zero)
        throw NotPSD("from_choi: Choi matrix has eigenvalue " +
                     std::to_string(eig.eigenvalues.minCoeff()));

    std::vector<Mat> kraus;
    for (Index q = 0; q < eig.eigenvalues.size(); ++q) {
        if (eig.eigenvalues[q] <= tol.eig_zero) break;  // sorted descending
        CVec col = std::sqrt(eig.eigenvalues[q]) * eig.eigenvectors.col(q);
        kraus.push_back(unvec(col, n, n));
    }
    if (kraus.empty()) kraus.push_back(Mat::Zero(n, n));  // the zero CP map

    if (require_trace_preserving) check_trace_preserving(kraus, n, tol);

    Channel ch;
    ch.n_ = n;
    ch.kraus_ = std::move(kraus);
    ch.choi_ = j;
    ch.trace_preserving_ = true;
    if (!require_trace_preserving) {
        Mat acc = Mat::Zero(n, n);
        for (const Mat& k : ch.kraus_) acc.noalias() += k.adjoint() * k;
        ch.trace_preserving_ = max_abs_diff(acc, Mat::Identity(n, n)) <= tol.residual;
    }
    return ch;
}

Mat Channel::apply(const Mat& x) const {
    if (x.rows() != n_ || x.cols() != n_)
        throw DimensionMismatch("apply: input must be " + std::to_string(n_) + "x" +
                                std::to_string(n_));
    Mat out = Mat::Zero(n_, n_);
    for (const Mat& k : kraus_) out.noalias() += k * x * k.adjoint();
    return out;
}

Index Channel::choi_rank(const Tolerance& tol) const {
    return psd_rank(choi_, tol);
}

bool Channel::has_canonical_real_kraus(const Tolerance& tol) const {
    for (const Mat& k : kraus_)
        if (max_imag(k) > tol.entry_zero) return false;
    std::vector<CVec> cols;
    cols.reserve(kraus_.size());
    for (const Mat& k : kraus_) cols.push_back(vec(k));
    return family_rank(cols, tol) == static_cast<Index>(kraus_.size()) &&
           static_cast<Index>(kraus_.size()) == choi_rank(tol);
}

Channel canonical_real_kraus(const Channel& ch, const Tolerance& tol) {
    if (!ch.choi_is_real(tol.entry_zero)) {
        double worst = max_imag(ch.choi());
        throw ChoiNotReal("canonical_real_kraus: Choi matrix has imaginary entry of "
                          "magnitude " + std::to_string(worst) +
                          "; the channel is not positively factorizable");
    }
    Mat real_choi = ch.choi().real().cast<std::complex<double>>();
    Channel out = Channel::from_choi(real_choi, ch.dim(), tol, ch.trace_preserving());
    double drift = max_abs_diff(out.choi(), ch.choi());
    if (drift > tol.residual)
        throw InvariantViolation("canonical_real_kraus: Choi drifted by " +
                                 std::to_string(drift));
    return out;
}

std::vector<Mat> compose_kraus(const Channel& outer, const Channel& inner) {
    if (outer.dim() != inner.dim())
        throw DimensionMismatch("compose_kraus: channel dimensions differ");
    std::vector<Mat> out;
    out.reserve(outer.kraus().size() * inner.kraus().size());
    for (const Mat& s : outer.kraus())
        for (const Mat& k : inner.kraus())
            out.push_back(s * k);
    return out;
}

std::vector<Mat> convex_combine_kraus(const Channel& a, const Channel& b, double lambda) {
    if (a.dim() != b.dim())
        throw DimensionMismatch("convex_combine_kraus: channel dimensions differ");
    if (!(lambda > 0.0 && lambda < 1.0))
        throw LambdaOutOfRange("convex_combine_kraus: lambda must lie in (0,1)");
    std::vector<Mat> out;
    out.reserve(a.kraus().size() + b.kraus().size());
    for (const Mat& k : a.kraus()) out.push_back(std::sqrt(lambda) * k);
    for (const Mat& s : b.kraus()) out.push_back(std::sqrt(1.0 - lambda) * s);
    return out;
}

} // namespace pfchan
