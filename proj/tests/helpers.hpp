#pragma once

#include <random>
#include <vector>

#include "pfchan/channel.hpp"
#include "pfchan/numerics.hpp"

namespace pfchan::testing {

inline Mat matrix_unit(Index n, Index i, Index j) {
    Mat e = Mat::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

inline Mat random_gaussian_complex(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = std::complex<double>(gauss(rng), gauss(rng));
    return m;
}

inline RMat random_gaussian_real(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    RMat m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = gauss(rng);
    return m;
}

// Kraus operators cut from a Haar-ish random isometry (nd x n), so the
// channel is trace preserving by construction.
inline std::vector<Mat> random_kraus(Index n, Index d, std::mt19937_64& rng) {
    Mat g = random_gaussian_complex(n * d, n, rng);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = Mat(qr.householderQ()).leftCols(n);
    std::vector<Mat> out;
    for (Index i = 0; i < d; ++i) out.push_back(q.block(i * n, 0, n, n));
    return out;
}

inline std::vector<Mat> random_real_kraus(Index n, Index d, std::mt19937_64& rng) {
    RMat g = random_gaussian_real(n * d, n, rng);
    Eigen::HouseholderQR<RMat> qr(g);
    RMat q = RMat(qr.householderQ()).leftCols(n);
    std::vector<Mat> out;
    for (Index i = 0; i < d; ++i)
        out.push_back(q.block(i * n, 0, n, n).cast<std::complex<double>>());
    return out;
}

inline Channel random_channel(Index n, Index d, std::mt19937_64& rng) {
    return Channel::from_kraus(random_kraus(n, d, rng));
}

inline Channel random_real_channel(Index n, Index d, std::mt19937_64& rng) {
    return Channel::from_kraus(random_real_kraus(n, d, rng));
}

inline Channel random_rank2_real_channel(Index n, std::mt19937_64& rng) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        Channel ch = random_real_channel(n, 2, rng);
        if (ch.choi_rank() == 2) return ch;
    }
    throw std::runtime_error("random_rank2_real_channel: generator failed");
}

// Independent Choi construction: evaluate Phi(E_ij) and place it as block
// (i, j). Cross-checks the vec-outer-product route used by the library.
inline Mat choi_blockwise_oracle(const Channel& ch) {
    const Index n = ch.dim();
    Mat j = Mat::Zero(n * n, n * n);
    for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b)
            j.block(a * n, b * n, n, n) = ch.apply(matrix_unit(n, a, b));
    return j;
}

// Lawson-Hanson nonnegative least squares, used as an oracle for cone
// membership: v lies in cone{g_i} iff min_x>=0 ||G x - v|| is ~zero.
inline double nnls_residual(const std::vector<RVec>& gens, const RVec& v) {
    const Index d = v.size();
    const Index m = static_cast<Index>(gens.size());
    if (m == 0) return v.norm();
    RMat g(d, m);
    for (Index c = 0; c < m; ++c) g.col(c) = gens[static_cast<size_t>(c)];

    RVec x = RVec::Zero(m);
    std::vector<bool> passive(static_cast<size_t>(m), false);
    for (int outer = 0; outer < 20 * static_cast<int>(m) + 40; ++outer) {
        RVec w = g.transpose() * (v - g * x);
        int best = -1;
        double best_w = 1e-10;
        for (Index i = 0; i < m; ++i)
            if (!passive[static_cast<size_t>(i)] && w[i] > best_w) {
                best_w = w[i];
                best = static_cast<int>(i);
            }
        if (best < 0) break;
        passive[static_cast<size_t>(best)] = true;

        for (int inner = 0; inner < 20 * static_cast<int>(m) + 40; ++inner) {
            std::vector<Index> p;
            for (Index i = 0; i < m; ++i)
                if (passive[static_cast<size_t>(i)]) p.push_back(i);
            RMat gp(d, static_cast<Index>(p.size()));
            for (size_t c = 0; c < p.size(); ++c) gp.col(static_cast<Index>(c)) = g.col(p[c]);
            RVec z = gp.colPivHouseholderQr().solve(v);
            bool all_pos = true;
            for (Index i = 0; i < z.size(); ++i)
                if (z[i] <= 1e-12) { all_pos = false; break; }
            if (all_pos) {
                x.setZero();
                for (size_t c = 0; c < p.size(); ++c) x[p[c]] = z[static_cast<Index>(c)];
                break;
            }
            double alpha = 1.0;
            for (size_t c = 0; c < p.size(); ++c) {
                if (z[static_cast<Index>(c)] <= 1e-12) {
                    double xi = x[p[c]];
                    double denom = xi - z[static_cast<Index>(c)];
                    if (denom > 0) alpha = std::min(alpha, xi / denom);
                }
            }
            for (size_t c = 0; c < p.size(); ++c) {
                x[p[c]] += alpha * (z[static_cast<Index>(c)] - x[p[c]]);
                if (x[p[c]] <= 1e-12) {
                    x[p[c]] = 0.0;
                    passive[static_cast<size_t>(p[c])] = false;
                }
            }
        }
    }
    return (g * x - v).norm();
}

inline std::vector<Mat> werner_holevo_kraus() {
    const double a = 1.0 / std::sqrt(2.0);
    Mat k1 = Mat::Zero(3, 3), k2 = Mat::Zero(3, 3), k3 = Mat::Zero(3, 3);
    k1(1, 2) = a;
    k1(2, 1) = -a;
    k2(0, 2) = -a;
    k2(2, 0) = a;
    k3(0, 1) = a;
    k3(1, 0) = -a;
    return {k1, k2, k3};
}

inline Channel werner_holevo() { return Channel::from_kraus(werner_holevo_kraus()); }

inline Channel depolarizing(Index n) {
    std::vector<Mat> kraus;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            kraus.push_back(matrix_unit(n, i, j) / std::sqrt(static_cast<double>(n)));
    return Channel::from_kraus(std::move(kraus));
}

inline Mat permutation_matrix(const std::vector<Index>& sigma) {
    const Index n = static_cast<Index>(sigma.size());
    Mat p = Mat::Zero(n, n);
    for (Index i = 0; i < n; ++i) p(sigma[static_cast<size_t>(i)], i) = 1.0;
    return p;
}

inline std::vector<Index> random_permutation(Index n, std::mt19937_64& rng) {
    std::vector<Index> sigma(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) sigma[static_cast<size_t>(i)] = i;
    std::shuffle(sigma.begin(), sigma.end(), rng);
    return sigma;
}

// Mixture of permutation channels sum_s q_s P_s X P_s^T with random weights.
inline Channel random_permutation_mixture(Index n, Index count, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.2, 1.0);
    std::vector<double> q;
    std::vector<Mat> kraus;
    double total = 0.0;
    for (Index s = 0; s < count; ++s) {
        q.push_back(unif(rng));
        total += q.back();
    }
    for (Index s = 0; s < count; ++s)
        kraus.push_back(std::sqrt(q[static_cast<size_t>(s)] / total) *
                        permutation_matrix(random_permutation(n, rng)));
    return Channel::from_kraus(std::move(kraus));
}

} // namespace pfchan::testing
