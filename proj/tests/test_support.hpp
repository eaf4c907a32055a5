#ifndef SSAE_TEST_SUPPORT_HPP
#define SSAE_TEST_SUPPORT_HPP

// Seeded generators and independent oracles shared by the test suites.
// The oracles use plain scalar loops and never call into the library's
// numerical paths.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "ssae/synth.hpp"

namespace ssae::testing {

using Mat = Matrix<double>;
using Vec = Vector<double>;

inline Mat random_matrix(std::mt19937_64& rng, Index rows, Index cols, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Mat m(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) m(r, c) = g(rng);
    return m;
}

inline ConceptSet random_set(std::mt19937_64& rng, Index k, double p = 0.5) {
    std::bernoulli_distribution coin(p);
    ConceptSet s;
    for (Index c = 0; c < k; ++c)
        if (coin(rng)) s.push_back(c);
    return s;
}

inline RealizationSet random_realizations(std::mt19937_64& rng, Index k, Index n, double p = 0.5) {
    std::vector<ConceptSet> sets;
    for (Index i = 0; i < n; ++i) sets.push_back(random_set(rng, k, p));
    return RealizationSet::from_sets(std::move(sets));
}

/// Random model with every |Yc| entry in [0.2, 1.2] and random signs
/// (kept positive for relu so no coordinate sits on the kink).
inline SsaeModel<double> random_model(std::mt19937_64& rng, Index d, Index k, Index n_dim,
                                      Activation act, bool encoder = false) {
    SsaeModel<double> m;
    m.design = SparseDesign(d, k);
    m.N = n_dim;
    m.activation = act;
    m.w2 = random_matrix(rng, n_dim, d * k, 1.0 / std::sqrt(double(d * k)));
    std::uniform_real_distribution<double> mag(0.2, 1.2);
    std::bernoulli_distribution sign(0.5);
    m.yc.resize(d, k);
    for (Index c = 0; c < k; ++c)
        for (Index r = 0; r < d; ++r)
            m.yc(r, c) = mag(rng) * ((act == Activation::identity && sign(rng)) ? -1.0 : 1.0);
    if (encoder) m.w1 = random_matrix(rng, d * k, n_dim, 1.0 / std::sqrt(double(n_dim)));
    return m;
}

inline Mat loop_matmul(const Mat& a, const Mat& b) {
    Mat c(a.rows(), b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (Index p = 0; p < a.cols(); ++p) s += a(i, p) * b(p, j);
            c(i, j) = s;
        }
    return c;
}

inline double loop_sum_sq(const Mat& a) {
    double s = 0.0;
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return s;
}

/// Loss by scalar loops straight from the definition.
inline double loop_loss(const SsaeModel<double>& m, const Mat& x, const RealizationSet& real) {
    const Index d = m.design.d, n = real.size();
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        for (Index r = 0; r < m.N; ++r) {
            double pred = 0.0;
            for (Index k : real.set(i))
                for (Index j = 0; j < d; ++j) {
                    double y = m.yc(j, k);
                    if (m.activation == Activation::relu && y < 0.0) y = 0.0;
                    pred += m.w2(r, k * d + j) * y;
                }
            const double e = x(r, i) - pred;
            total += e * e;
        }
    }
    return total / double(n);
}

inline double loop_encoder_loss(const SsaeModel<double>& m, const Mat& x, const RealizationSet& real) {
    const Index d = m.design.d, n = real.size(), dk = m.design.latent_dim();
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        std::vector<double> h(static_cast<std::size_t>(dk), 0.0);
        for (Index k : real.set(i))
            for (Index j = 0; j < d; ++j) {
                double s = 0.0;
                for (Index c = 0; c < m.N; ++c) s += (*m.w1)(k * d + j, c) * x(c, i);
                h[std::size_t(k * d + j)] = s;
            }
        for (Index r = 0; r < m.N; ++r) {
            double pred = 0.0;
            for (Index q = 0; q < dk; ++q) pred += m.w2(r, q) * h[std::size_t(q)];
            const double e = x(r, i) - pred;
            total += e * e;
        }
    }
    return total / double(n);
}

/// Central difference of f with respect to every entry of `param`.
inline Mat central_differences(Mat& param, const std::function<double()>& f, double h) {
    Mat g(param.rows(), param.cols());
    for (Index i = 0; i < param.size(); ++i) {
        const double saved = param.data()[i];
        param.data()[i] = saved + h;
        const double up = f();
        param.data()[i] = saved - h;
        const double down = f();
        param.data()[i] = saved;
        g.data()[i] = (up - down) / (2.0 * h);
    }
    return g;
}

inline double max_rel_diff(const Mat& a, const Mat& b, double floor) {
    double worst = 0.0;
    for (Index i = 0; i < a.size(); ++i) {
        const double denom = std::max({std::abs(a.data()[i]), std::abs(b.data()[i]), floor});
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]) / denom);
    }
    return worst;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
    static int counter = 0;
    auto p = std::filesystem::temp_directory_path() /
             ("ssae_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace ssae::testing

#endif  // SSAE_TEST_SUPPORT_HPP
