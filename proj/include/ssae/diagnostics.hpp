#ifndef SSAE_DIAGNOSTICS_HPP
#define SSAE_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ssae/compose.hpp"

namespace ssae {

/// ||a - b|| / max(||b||, 1e-12)
template <typename A, typename B>
double relative_error(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return double((a - b).norm()) / std::max(double(b.norm()), 1e-12);
}

/// Inner products between the tied concept sub-vectors: G = Yc^T Yc.
template <typename Scalar>
Matrix<Scalar> concept_gram(const SsaeModel<Scalar>& model) {
    return model.yc.transpose() * model.yc;
}

template <typename Scalar>
struct CosineMatrix {
    Matrix<Scalar> cosine;
    std::vector<Index> zero_norm;  // columns with no direction; their off-diagonal cosines are 0
};

/// Normalized Gram matrix of the columns of `vectors`.
template <typename Derived>
auto column_cosine(const Eigen::MatrixBase<Derived>& vectors) -> CosineMatrix<typename Derived::Scalar> {
    using Scalar = typename Derived::Scalar;
    const Matrix<Scalar> gram = vectors.transpose() * vectors;
    const Index k = gram.rows();
    CosineMatrix<Scalar> out;
    out.cosine = Matrix<Scalar>::Zero(k, k);
    for (Index a = 0; a < k; ++a) {
        if (!(gram(a, a) > Scalar(0))) out.zero_norm.push_back(a);
        out.cosine(a, a) = Scalar(1);
    }
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) {
            if (a == b || !(gram(a, a) > Scalar(0)) || !(gram(b, b) > Scalar(0))) continue;
            out.cosine(a, b) = gram(a, b) / (std::sqrt(gram(a, a)) * std::sqrt(gram(b, b)));
        }
    return out;
}

template <typename Scalar>
CosineMatrix<Scalar> concept_cosine(const SsaeModel<Scalar>& model) {
    return column_cosine(model.yc);
}

/// Columns are decode({k}) for every concept k.
template <typename Scalar>
Matrix<Scalar> singleton_decodes(const SsaeModel<Scalar>& model) {
    Matrix<Scalar> out(model.N, model.design.K);
    for (Index k = 0; k < model.design.K; ++k)
        out.col(k) = decode(model, LatentCode(model.design, {k}));
    return out;
}

/// Cosine between the embedding-space images of the concept blocks.
template <typename Scalar>
CosineMatrix<Scalar> decoded_cosine(const SsaeModel<Scalar>& model) {
    return column_cosine(singleton_decodes(model));
}

struct GroupRmse {
    ConceptSet concepts;
    Index members = 0;
    double rmse = 0.0;
};

struct ReconErrors {
    std::vector<double> per_sample;
    std::vector<GroupRmse> per_group;  // ordered by first occurrence
};

/// Per-sample RMSE and RMSE pooled over samples sharing a concept set.
template <typename Scalar, typename Derived>
ReconErrors recon_errors(const SsaeModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                         const RealizationSet& real) {
    ReconErrors out;
    out.per_sample = sample_rmse(model, x, real);
    std::map<ConceptSet, std::size_t> slot;
    std::vector<double> sum_sq;
    for (Index i = 0; i < real.size(); ++i) {
        auto [it, fresh] = slot.emplace(real.set(i), out.per_group.size());
        if (fresh) {
            out.per_group.push_back({real.set(i), 0, 0.0});
            sum_sq.push_back(0.0);
        }
        const double e = out.per_sample[static_cast<std::size_t>(i)];
        sum_sq[it->second] += e * e;
        out.per_group[it->second].members += 1;
    }
    for (std::size_t g = 0; g < out.per_group.size(); ++g)
        out.per_group[g].rmse = std::sqrt(sum_sq[g] / double(out.per_group[g].members));
    return out;
}

using ConceptPair = std::pair<Index, Index>;

struct HoldoutScore {
    ConceptPair pair;
    double relative_error = 0.0;
};

/// Relative error of decode({k1, k2}) against the additive target truth_k1 + truth_k2.
template <typename Scalar, typename Derived>
std::vector<HoldoutScore> holdout_eval(const SsaeModel<Scalar>& model,
                                       const Eigen::MatrixBase<Derived>& truth,
                                       const std::vector<ConceptPair>& pairs) {
    if (truth.rows() != model.N || truth.cols() != model.design.K)
        throw DataError("holdout_eval: truth is " + shape_of(truth) + ", expected " +
                        shape_string(model.N, model.design.K));
    std::vector<HoldoutScore> out;
    for (const auto& [k1, k2] : pairs) {
        for (Index k : {k1, k2})
            if (k < 0 || k >= model.design.K)
                throw DataError("holdout_eval: concept index " + std::to_string(k) + " out of range");
        const Vector<Scalar> got = decode(model, LatentCode(model.design, {k1, k2}));
        const Vector<Scalar> want = truth.col(k1) + truth.col(k2);
        out.push_back({{k1, k2}, relative_error(got, want)});
    }
    return out;
}

struct GradcheckOptions {
    double h = 1e-6;
    double tolerance = 1e-6;
    // Denominator floor of the relative error, so coordinates whose true
    // gradient is ~0 are judged on absolute error.
    double floor = 1e-2;
    Index max_coordinates = 10000;
    std::uint64_t seed = 0;
    std::optional<Index> corrupt_coordinate;  // adds 1e-3 to that analytic entry
};

struct GradcheckResult {
    bool pass = true;
    double max_relative_error = 0.0;
    std::string worst_parameter;
    Index worst_row = -1;
    Index worst_col = -1;
    Index worst_flat = -1;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
    Index checked = 0;
    Index total = 0;
};

/// Central finite differences against the analytic gradients of the model's variant.
///
/// Coordinates are W2 followed by Yc (decoder-only) or W1 (masked encoder),
/// each flattened column-major. Above `max_coordinates` a seeded random
/// subset is checked.
template <typename Scalar, typename Derived>
GradcheckResult gradcheck(const SsaeModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x_in,
                          const RealizationSet& real, const GradcheckOptions& opt = {}) {
    const Matrix<Scalar> x = x_in;
    const bool encoder = model.has_encoder();
    if (!encoder && model.activation == Activation::relu) {
        const Scalar nearest = model.yc.cwiseAbs().minCoeff();
        if (!(nearest > Scalar(10 * opt.h)))
            throw NumericalError("gradcheck: a tied latent entry lies within 10h of the relu kink "
                                 "(min |Yc| = " + std::to_string(double(nearest)) +
                                 "); re-initialize with another seed");
    }

    Matrix<Scalar> g_w2, g_latent;
    Mask mask;
    if (encoder) {
        mask = build_mask(model.design, real);
        auto g = encoder_gradients(model, x, mask);
        g_w2 = std::move(g.w2);
        g_latent = std::move(g.w1);
    } else {
        auto g = gradients(model, x, real);
        g_w2 = std::move(g.w2);
        g_latent = std::move(g.yc);
    }
    const Index n_w2 = g_w2.size();
    const Index total = n_w2 + g_latent.size();
    if (opt.corrupt_coordinate) {
        const Index c = *opt.corrupt_coordinate;
        if (c < 0 || c >= total) throw UsageError("gradcheck: corrupt coordinate out of range");
        (c < n_w2 ? g_w2.data()[c] : g_latent.data()[c - n_w2]) += Scalar(1e-3);
    }

    std::vector<Index> coords(static_cast<std::size_t>(total));
    std::iota(coords.begin(), coords.end(), Index(0));
    if (total > opt.max_coordinates) {
        auto rng = detail::make_engine(opt.seed, 3);
        std::shuffle(coords.begin(), coords.end(), rng);
        coords.resize(static_cast<std::size_t>(opt.max_coordinates));
        std::sort(coords.begin(), coords.end());
    }

    SsaeModel<Scalar> probe = model;
    auto eval = [&]() -> double {
        return encoder ? double(encoder_loss(probe, x, mask)) : double(loss(probe, x, real));
    };

    GradcheckResult res;
    res.total = total;
    for (Index c : coords) {
        const bool in_w2 = c < n_w2;
        Matrix<Scalar>& param = in_w2 ? probe.w2 : (encoder ? *probe.w1 : probe.yc);
        const Index flat = in_w2 ? c : c - n_w2;
        Scalar& entry = param.data()[flat];
        const Scalar saved = entry;
        entry = saved + Scalar(opt.h);
        const double up = eval();
        entry = saved - Scalar(opt.h);
        const double down = eval();
        entry = saved;
        const double numeric = (up - down) / (2.0 * opt.h);
        const double analytic = double(in_w2 ? g_w2.data()[flat] : g_latent.data()[flat]);
        const double denom = std::max({std::abs(analytic), std::abs(numeric), opt.floor});
        const double rel = std::abs(analytic - numeric) / denom;
        ++res.checked;
        if (rel > res.max_relative_error || res.worst_flat < 0) {
            res.max_relative_error = std::max(rel, res.max_relative_error);
            res.worst_parameter = in_w2 ? "W2" : (encoder ? "W1" : "Yc");
            res.worst_row = flat % param.rows();
            res.worst_col = flat / param.rows();
            res.worst_flat = c;
            res.worst_analytic = analytic;
            res.worst_numeric = numeric;
        }
    }
    res.pass = res.max_relative_error < opt.tolerance;
    return res;
}

}  // namespace ssae

#endif  // SSAE_DIAGNOSTICS_HPP
