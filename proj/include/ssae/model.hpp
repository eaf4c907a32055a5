#ifndef SSAE_MODEL_HPP
#define SSAE_MODEL_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ssae/design.hpp"

namespace ssae {

enum class Activation { relu, identity };
enum class Variant { decoder_only, masked_encoder };
enum class OptimizerKind { adam, sgd };

inline const char* to_string(Activation a) { return a == Activation::relu ? "relu" : "identity"; }
inline const char* to_string(Variant v) {
    return v == Variant::decoder_only ? "decoder-only" : "masked-encoder";
}
inline const char* to_string(OptimizerKind o) { return o == OptimizerKind::adam ? "adam" : "sgd"; }

/// Supervised sparse auto-encoder.
///
/// `yc` is the compact tied latent: column k holds the d values shared by
/// every sample that contains concept k. The full latent matrix is never
/// stored; `expand_latent` materializes it for a given realization set.
/// `w1` is present only for the masked-encoder variant.
template <typename Scalar>
struct SsaeModel {
    SparseDesign design;
    Index N = 0;
    Matrix<Scalar> w2;  // N x dK
    Matrix<Scalar> yc;  // d x K
    Activation activation = Activation::relu;
    std::optional<Matrix<Scalar>> w1;  // dK x N

    bool has_encoder() const { return w1.has_value(); }

    void validate() const {
        const Index dk = design.latent_dim();
        if (w2.rows() != N || w2.cols() != dk)
            throw DataError("model: decoder is " + shape_of(w2) + ", expected " +
                            shape_string(N, dk));
        if (yc.rows() != design.d || yc.cols() != design.K)
            throw DataError("model: tied latent is " + shape_of(yc) + ", expected " +
                            shape_string(design.d, design.K));
        if (w1 && (w1->rows() != dk || w1->cols() != N))
            throw DataError("model: encoder is " + shape_of(*w1) + ", expected " +
                            shape_string(dk, N));
    }
};

struct TrainConfig {
    Index epochs = 1000;
    Index batch_size = 0;  // 0 = full batch
    double learning_rate = 1e-3;
    OptimizerKind optimizer = OptimizerKind::adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double init_scale_w2 = 1.0;
    double init_scale_y = 1.0;
    std::uint64_t seed = 0;
    Variant variant = Variant::decoder_only;
    Activation activation = Activation::relu;
};

struct TrainReport {
    double initial_loss = 0.0;
    std::vector<double> epoch_loss;
    std::vector<double> final_rmse;
    double duration_seconds = 0.0;
    std::vector<double> w2_norm;
    std::vector<double> latent_norm;  // ||Yc|| or ||W1|| depending on variant
    Index steps = 0;
};

namespace detail {

// Independent streams derived from one user seed.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

}  // namespace detail

template <typename Derived>
auto activate(const Eigen::MatrixBase<Derived>& y, Activation a) -> Matrix<typename Derived::Scalar> {
    using Scalar = typename Derived::Scalar;
    if (a == Activation::identity) return y;
    return y.cwiseMax(Scalar(0));
}

// Subgradient of relu at 0 is 0.
template <typename Scalar>
Scalar activation_slope(Scalar v, Activation a) {
    if (a == Activation::identity) return Scalar(1);
    return v > Scalar(0) ? Scalar(1) : Scalar(0);
}

template <typename Scalar = double>
SsaeModel<Scalar> init_model(const SparseDesign& design, Index n_dim, const TrainConfig& config) {
    if (n_dim < 1) throw DataError("init_model: embedding dimension must be >= 1");
    if (!(config.init_scale_y > 0.0))
        throw UsageError("init_model: init_scale_y must be > 0 (a zero or negative tied latent "
                         "leaves relu blocks dead)");
    if (!(config.init_scale_w2 > 0.0)) throw UsageError("init_model: init_scale_w2 must be > 0");

    SsaeModel<Scalar> m;
    m.design = design;
    m.N = n_dim;
    m.activation = config.activation;
    const Index dk = design.latent_dim();

    auto rng = detail::make_engine(config.seed, 1);
    std::normal_distribution<double> w2_dist(0.0, config.init_scale_w2 / std::sqrt(double(dk)));
    std::uniform_real_distribution<double> y_dist(0.5 * config.init_scale_y,
                                                  1.5 * config.init_scale_y);

    m.w2.resize(n_dim, dk);
    for (Index c = 0; c < dk; ++c)
        for (Index r = 0; r < n_dim; ++r) m.w2(r, c) = Scalar(w2_dist(rng));
    m.yc.resize(design.d, design.K);
    for (Index c = 0; c < design.K; ++c)
        for (Index r = 0; r < design.d; ++r) m.yc(r, c) = Scalar(y_dist(rng));

    if (config.variant == Variant::masked_encoder) {
        std::normal_distribution<double> w1_dist(0.0, config.init_scale_w2 / std::sqrt(double(n_dim)));
        Matrix<Scalar> w1(dk, n_dim);
        for (Index c = 0; c < n_dim; ++c)
            for (Index r = 0; r < dk; ++r) w1(r, c) = Scalar(w1_dist(rng));
        m.w1 = std::move(w1);
    }
    return m;
}

/// Tied expansion: block k of column i is yc.col(k) when k is in S_i, else zero.
template <typename Scalar>
Matrix<Scalar> expand_latent(const SsaeModel<Scalar>& model, const RealizationSet& real) {
    validate_realizations(model.design, real);
    const Index d = model.design.d;
    Matrix<Scalar> y = Matrix<Scalar>::Zero(model.design.latent_dim(), real.size());
    for (Index i = 0; i < real.size(); ++i)
        for (Index k : real.set(i)) y.block(k * d, i, d, 1) = model.yc.col(k);
    return y;
}

template <typename Scalar, typename Derived>
Matrix<Scalar> reconstruct(const SsaeModel<Scalar>& model, const Eigen::MatrixBase<Derived>& y) {
    if (y.rows() != model.design.latent_dim())
        throw DataError("reconstruct: latent has " + std::to_string(y.rows()) + " rows, model expects " +
                        std::to_string(model.design.latent_dim()));
    return matmul(model.w2, activate(y, model.activation));
}

namespace detail {

template <typename Scalar, typename Derived>
void check_data(const SsaeModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                const RealizationSet& real, const char* what) {
    if (x.rows() != model.N || x.cols() != real.size())
        throw DataError(std::string(what) + ": X is " + shape_of(x) + ", expected " +
                        shape_string(model.N, real.size()));
}

}  // namespace detail

/// Mean squared reconstruction error (1/n) ||X - W2 sigma(Y)||_F^2.
template <typename Scalar, typename Derived>
Scalar loss(const SsaeModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
            const RealizationSet& real) {
    detail::check_data(model, x, real, "loss");
    if (real.size() == 0) return Scalar(0);
    const Matrix<Scalar> residual = x - reconstruct(model, expand_latent(model, real));
    return frobenius_sq(residual) / Scalar(real.size());
}

template <typename Scalar>
struct DecoderGradients {
    Matrix<Scalar> w2;  // N x dK
    Matrix<Scalar> yc;  // d x K
    Scalar loss{};
};

/// Analytic gradients of `loss` with respect to W2 and the tied latent.
///
/// The tied gradient for concept k sums, in ascending sample order, the
/// back-propagated residual over every sample that contains k.
template <typename Scalar, typename Derived>
DecoderGradients<Scalar> gradients(const SsaeModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                                   const RealizationSet& real) {
    detail::check_data(model, x, real, "gradients");
    const Index n = real.size();
    const Index d = model.design.d;
    DecoderGradients<Scalar> g;
    g.yc = Matrix<Scalar>::Zero(d, model.design.K);
    if (n == 0) {
        g.w2 = Matrix<Scalar>::Zero(model.N, model.design.latent_dim());
        return g;
    }
    const Matrix<Scalar> hidden = activate(expand_latent(model, real), model.activation);
    const Matrix<Scalar> residual = x - model.w2 * hidden;
    const Scalar coef = Scalar(-2) / Scalar(n);
    g.loss = frobenius_sq(residual) / Scalar(n);
    g.w2 = coef * (residual * hidden.transpose());

    const Matrix<Scalar> back = model.w2.transpose() * residual;
    for (Index i = 0; i < n; ++i)
        for (Index k : real.set(i)) g.yc.col(k) += back.block(k * d, i, d, 1);
    for (Index k = 0; k < model.design.K; ++k)
        for (Index j = 0; j < d; ++j)
            g.yc(j, k) *= coef * activation_slope(model.yc(j, k), model.activation);
    return g;
}

template <typename Scalar, typename Derived>
Matrix<Scalar> encoder_forward(const SsaeModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                               const Mask& mask) {
    if (!model.w1) throw UsageError("encoder_forward: model has no encoder");
    if (x.rows() != model.N) throw DataError("encoder_forward: X is " + shape_of(x) +
                                             ", expected " + std::to_string(model.N) + " rows");
    if (mask.rows() != model.design.latent_dim() || mask.cols() != x.cols())
        throw DataError("encoder_forward: mask is " + shape_string(mask.rows(), mask.cols()) +
                        ", expected " + shape_string(model.design.latent_dim(), x.cols()));
    return (*model.w1 * x).cwiseProduct(mask.cast<Scalar>());
}

/// (1/n) ||X - W2 ((W1 X) .* M)||_F^2. No activation is applied in this variant.
template <typename Scalar, typename Derived>
Scalar encoder_loss(const SsaeModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                    const Mask& mask) {
    if (x.cols() == 0) return Scalar(0);
    const Matrix<Scalar> residual = x - model.w2 * encoder_forward(model, x, mask);
    return frobenius_sq(residual) / Scalar(x.cols());
}

template <typename Scalar>
struct EncoderGradients {
    Matrix<Scalar> w2;  // N x dK
    Matrix<Scalar> w1;  // dK x N
    Scalar loss{};
};

template <typename Scalar, typename Derived>
EncoderGradients<Scalar> encoder_gradients(const SsaeModel<Scalar>& model,
                                           const Eigen::MatrixBase<Derived>& x, const Mask& mask) {
    const Matrix<Scalar> hidden = encoder_forward(model, x, mask);
    EncoderGradients<Scalar> g;
    const Index n = x.cols();
    if (n == 0) {
        g.w2 = Matrix<Scalar>::Zero(model.w2.rows(), model.w2.cols());
        g.w1 = Matrix<Scalar>::Zero(model.w1->rows(), model.w1->cols());
        return g;
    }
    const Matrix<Scalar> residual = x - model.w2 * hidden;
    const Scalar coef = Scalar(-2) / Scalar(n);
    g.loss = frobenius_sq(residual) / Scalar(n);
    g.w2 = coef * (residual * hidden.transpose());
    const Matrix<Scalar> back = (model.w2.transpose() * residual).cwiseProduct(mask.cast<Scalar>());
    g.w1 = coef * (back * x.transpose());
    return g;
}

/// Loss for whichever variant the model carries.
template <typename Scalar, typename Derived>
Scalar variant_loss(const SsaeModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                    const RealizationSet& real) {
    if (model.has_encoder()) {
        detail::check_data(model, x, real, "loss");
        return encoder_loss(model, x, build_mask(model.design, real));
    }
    return loss(model, x, real);
}

namespace detail {

template <typename Scalar>
class ParamOptimizer {
public:
    ParamOptimizer(const TrainConfig& c, Index rows, Index cols)
        : config_(c), m_(Matrix<Scalar>::Zero(rows, cols)), v_(Matrix<Scalar>::Zero(rows, cols)) {}

    void step(Matrix<Scalar>& param, const Matrix<Scalar>& grad, Index t) {
        const Scalar lr = Scalar(config_.learning_rate);
        if (config_.optimizer == OptimizerKind::sgd) {
            param -= lr * grad;
            return;
        }
        const Scalar b1 = Scalar(config_.beta1), b2 = Scalar(config_.beta2);
        m_ = b1 * m_ + (Scalar(1) - b1) * grad;
        v_ = b2 * v_ + (Scalar(1) - b2) * grad.cwiseAbs2();
        const Scalar c1 = Scalar(1) - std::pow(b1, Scalar(t));
        const Scalar c2 = Scalar(1) - std::pow(b2, Scalar(t));
        const Scalar eps = Scalar(config_.epsilon);
        param.array() -= lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps);
    }

private:
    const TrainConfig& config_;
    Matrix<Scalar> m_;
    Matrix<Scalar> v_;
};

template <typename Scalar>
Matrix<Scalar> select_columns(const Matrix<Scalar>& x, const std::vector<Index>& cols) {
    Matrix<Scalar> out(x.rows(), static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) out.col(Index(c)) = x.col(cols[c]);
    return out;
}

}  // namespace detail

/// Per-sample RMSE ||x_i - xhat_i||_2 / sqrt(N) for the model's variant.
template <typename Scalar, typename Derived>
std::vector<double> sample_rmse(const SsaeModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                                const RealizationSet& real) {
    detail::check_data(model, x, real, "sample_rmse");
    const Matrix<Scalar> xhat =
        model.has_encoder() ? Matrix<Scalar>(model.w2 * encoder_forward(model, x, build_mask(model.design, real)))
                            : reconstruct(model, expand_latent(model, real));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(real.size()));
    for (Index i = 0; i < real.size(); ++i)
        out.push_back(double((x.col(i) - xhat.col(i)).norm() / std::sqrt(Scalar(model.N))));
    return out;
}

/// Mini-batch gradient training of a copy of `model`.
///
/// Batches are drawn from a per-epoch seeded shuffle; with a single batch
/// covering all samples no shuffle happens, so full-batch and batch_size = n
/// are the same computation. The decoder-only variant updates W2 and the tied
/// latent; the masked-encoder variant updates W2 and W1.
template <typename Scalar, typename Derived>
std::pair<SsaeModel<Scalar>, TrainReport> train(SsaeModel<Scalar> model,
                                                const Eigen::MatrixBase<Derived>& x_in,
                                                const RealizationSet& real,
                                                const TrainConfig& config) {
    model.validate();
    const Matrix<Scalar> x = x_in;
    detail::check_data(model, x, real, "train");
    validate_realizations(model.design, real);
    const Index n = real.size();
    if (n == 0) throw DataError("train: no samples");
    if (!(config.learning_rate >= 0.0)) throw UsageError("train: learning rate must be >= 0");
    if (config.batch_size < 0 || config.batch_size > n)
        throw UsageError("train: batch size " + std::to_string(config.batch_size) +
                         " must be in [0, " + std::to_string(n) + "]");
    const bool encoder = config.variant == Variant::masked_encoder;
    if (encoder && !model.has_encoder())
        throw UsageError("train: masked-encoder variant needs a model with an encoder");
    if (!encoder && model.has_encoder())
        throw UsageError("train: decoder-only variant given a model with an encoder");

    const auto start = std::chrono::steady_clock::now();
    const Index batch = config.batch_size == 0 ? n : config.batch_size;
    const bool shuffle = batch < n;

    TrainReport report;
    report.initial_loss = double(variant_loss(model, x, real));

    detail::ParamOptimizer<Scalar> opt_w2(config, model.w2.rows(), model.w2.cols());
    detail::ParamOptimizer<Scalar> opt_latent(config, encoder ? model.w1->rows() : model.yc.rows(),
                                              encoder ? model.w1->cols() : model.yc.cols());
    auto rng = detail::make_engine(config.seed, 2);
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index(0));

    Index t = 0;
    for (Index epoch = 0; epoch < config.epochs; ++epoch) {
        if (shuffle) std::shuffle(order.begin(), order.end(), rng);
        Index step_in_epoch = 0;
        for (Index first = 0; first < n; first += batch, ++step_in_epoch) {
            ++t;
            const Index count = std::min(batch, n - first);
            Scalar batch_loss;
            auto fail = [&] {
                throw NumericalError("train: non-finite loss or parameters at epoch " +
                                     std::to_string(epoch) + ", step " + std::to_string(step_in_epoch));
            };
            if (!shuffle) {
                if (encoder) {
                    auto g = encoder_gradients(model, x, build_mask(model.design, real));
                    batch_loss = g.loss;
                    if (!std::isfinite(double(batch_loss))) fail();
                    opt_w2.step(model.w2, g.w2, t);
                    opt_latent.step(*model.w1, g.w1, t);
                } else {
                    auto g = gradients(model, x, real);
                    batch_loss = g.loss;
                    if (!std::isfinite(double(batch_loss))) fail();
                    opt_w2.step(model.w2, g.w2, t);
                    opt_latent.step(model.yc, g.yc, t);
                }
            } else {
                const std::vector<Index> cols(order.begin() + first, order.begin() + first + count);
                const Matrix<Scalar> xb = detail::select_columns(x, cols);
                const RealizationSet rb = real.select(cols);
                if (encoder) {
                    auto g = encoder_gradients(model, xb, build_mask(model.design, rb));
                    batch_loss = g.loss;
                    if (!std::isfinite(double(batch_loss))) fail();
                    opt_w2.step(model.w2, g.w2, t);
                    opt_latent.step(*model.w1, g.w1, t);
                } else {
                    auto g = gradients(model, xb, rb);
                    batch_loss = g.loss;
                    if (!std::isfinite(double(batch_loss))) fail();
                    opt_w2.step(model.w2, g.w2, t);
                    opt_latent.step(model.yc, g.yc, t);
                }
            }
            if (!all_finite(model.w2) || !all_finite(encoder ? *model.w1 : model.yc)) fail();
        }
        const double epoch_loss = double(variant_loss(model, x, real));
        if (!std::isfinite(epoch_loss))
            throw NumericalError("train: non-finite loss at end of epoch " + std::to_string(epoch));
        report.epoch_loss.push_back(epoch_loss);
        report.w2_norm.push_back(double(model.w2.norm()));
        report.latent_norm.push_back(double(encoder ? model.w1->norm() : model.yc.norm()));
    }
    report.steps = t;
    report.final_rmse = sample_rmse(model, x, real);
    report.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(model), std::move(report)};
}

}  // namespace ssae

#endif  // SSAE_MODEL_HPP
