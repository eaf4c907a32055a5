#ifndef SSAE_SYNTH_HPP
#define SSAE_SYNTH_HPP

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ssae/diagnostics.hpp"

namespace ssae {

/// Parameters of an additive ground-truth world.
struct SynthSpec {
    Index N = 64;
    Index K = 8;
    Index d = 4;
    Index n = 200;
    double noise_sigma = 0.0;
    Index min_concepts = 1;
    Index max_concepts = 3;
    std::vector<ConceptPair> holdout_pairs;
    std::uint64_t seed = 0;

    void validate() const {
        if (N < 1) throw UsageError("synth: embedding dimension must be >= 1");
        if (K < 1) throw UsageError("synth: concept count must be >= 1");
        if (d < 1) throw UsageError("synth: latent dimension must be >= 1");
        if (n < 1) throw UsageError("synth: sample count must be >= 1");
        if (!(noise_sigma >= 0.0)) throw UsageError("synth: noise sigma must be >= 0");
        if (min_concepts < 0 || min_concepts > max_concepts || max_concepts > K)
            throw UsageError("synth: need 0 <= min_concepts <= max_concepts <= K");
        for (const auto& [a, b] : holdout_pairs)
            if (a < 0 || a >= K || b < 0 || b >= K || a == b)
                throw UsageError("synth: invalid holdout pair " + std::to_string(a) + ":" +
                                 std::to_string(b));
    }
};

template <typename Scalar = double>
struct SynthDataset {
    Matrix<Scalar> x;      // N x n
    RealizationSet real;
    Matrix<Scalar> truth;  // N x K, unit-norm columns
    SynthSpec spec;
};

namespace detail {

inline bool holds_holdout(const ConceptSet& s, const std::vector<ConceptPair>& pairs) {
    for (const auto& [a, b] : pairs)
        if (std::binary_search(s.begin(), s.end(), a) && std::binary_search(s.begin(), s.end(), b))
            return true;
    return false;
}

inline std::string sample_id(Index i, Index n) {
    std::string digits = std::to_string(i);
    const std::size_t width = std::to_string(std::max<Index>(n - 1, 0)).size();
    return "s" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

}  // namespace detail

/// Samples X = truth * B + noise with B drawn to avoid every holdout pair.
///
/// Set sizes are uniform on [min_concepts, max_concepts] and members uniform
/// among subsets of that size. The realization set is redrawn until B has
/// full row rank, at most 100 times.
template <typename Scalar = double>
SynthDataset<Scalar> generate(const SynthSpec& spec) {
    spec.validate();
    auto rng = detail::make_engine(spec.seed, 10);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SynthDataset<Scalar> ds;
    ds.spec = spec;
    ds.truth.resize(spec.N, spec.K);
    for (Index k = 0; k < spec.K; ++k) {
        Vector<double> v(spec.N);
        double norm = 0.0;
        while (!(norm > 0.0)) {
            for (Index r = 0; r < spec.N; ++r) v(r) = gauss(rng);
            norm = v.norm();
        }
        ds.truth.col(k) = (v / norm).template cast<Scalar>();
    }

    const SparseDesign design(spec.d, spec.K);
    std::uniform_int_distribution<Index> size_dist(spec.min_concepts, spec.max_concepts);
    std::vector<Index> pool(static_cast<std::size_t>(spec.K));
    bool full_rank = false;
    for (int attempt = 0; attempt < 100 && !full_rank; ++attempt) {
        std::vector<ConceptSet> sets;
        sets.reserve(static_cast<std::size_t>(spec.n));
        for (Index i = 0; i < spec.n; ++i) {
            ConceptSet s;
            for (int tries = 0;; ++tries) {
                if (tries == 10000)
                    throw UsageError("synth: holdout pairs exclude every admissible concept set");
                const Index size = size_dist(rng);
                std::iota(pool.begin(), pool.end(), Index(0));
                // Partial Fisher-Yates: first `size` entries are a uniform subset.
                for (Index p = 0; p < size; ++p) {
                    std::uniform_int_distribution<Index> pick(p, spec.K - 1);
                    std::swap(pool[std::size_t(p)], pool[std::size_t(pick(rng))]);
                }
                s.assign(pool.begin(), pool.begin() + size);
                std::sort(s.begin(), s.end());
                if (!detail::holds_holdout(s, spec.holdout_pairs)) break;
            }
            sets.push_back(std::move(s));
        }
        std::vector<std::string> ids;
        for (Index i = 0; i < spec.n; ++i) ids.push_back(detail::sample_id(i, spec.n));
        ds.real = RealizationSet(std::move(ids), std::move(sets));
        full_rank = dependent_rows(membership_matrix<double>(design, ds.real)).empty();
    }
    if (!full_rank)
        throw NumericalError("synth: membership matrix stayed rank deficient after 100 draws; "
                             "increase the sample count");

    const Matrix<Scalar> b = membership_matrix<Scalar>(design, ds.real);
    ds.x = ds.truth * b;
    if (spec.noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);
        for (Index c = 0; c < ds.x.cols(); ++c)
            for (Index r = 0; r < ds.x.rows(); ++r) ds.x(r, c) += Scalar(noise(rng));
    }
    return ds;
}

/// Per-concept relative error between decode({k}) and truth column k.
template <typename Scalar, typename Derived>
std::vector<double> recovery_error(const SsaeModel<Scalar>& model, const Eigen::MatrixBase<Derived>& truth) {
    if (truth.rows() != model.N || truth.cols() != model.design.K)
        throw DataError("recovery_error: truth is " + shape_of(truth) + ", expected " +
                        shape_string(model.N, model.design.K));
    const Matrix<Scalar> decoded = singleton_decodes(model);
    std::vector<double> out;
    for (Index k = 0; k < model.design.K; ++k)
        out.push_back(relative_error(decoded.col(k), truth.col(k)));
    return out;
}

/// A model whose singleton decodes equal the columns of `vectors` exactly.
///
/// Block k of W2 is vectors.col(k) in its first column and zero elsewhere;
/// the tied latent is all ones, so both activations decode identically.
template <typename Derived>
auto planted_model(const Eigen::MatrixBase<Derived>& vectors, Index d, Activation activation = Activation::relu)
    -> SsaeModel<typename Derived::Scalar> {
    using Scalar = typename Derived::Scalar;
    SsaeModel<Scalar> m;
    m.design = SparseDesign(d, vectors.cols());
    m.N = vectors.rows();
    m.activation = activation;
    m.w2 = Matrix<Scalar>::Zero(m.N, m.design.latent_dim());
    for (Index k = 0; k < m.design.K; ++k) m.w2.col(k * d) = vectors.col(k);
    m.yc = Matrix<Scalar>::Ones(d, m.design.K);
    return m;
}

}  // namespace ssae

#endif  // SSAE_SYNTH_HPP
