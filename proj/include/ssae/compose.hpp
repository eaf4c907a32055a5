#ifndef SSAE_COMPOSE_HPP
#define SSAE_COMPOSE_HPP

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "ssae/model.hpp"

namespace ssae {

/// A sparse latent vector, represented by its active concept set alone.
///
/// Edits only ever assign learned tied values or zero to whole blocks, so
/// the set is a lossless representation: given a model, block k of the
/// materialized vector is yc.col(k) when k is active and zero otherwise.
class LatentCode {
public:
    LatentCode() = default;
    LatentCode(SparseDesign design, ConceptSet active)
        : design_(design), active_(normalize_set(std::move(active))) {
        for (Index k : active_)
            if (k < 0 || k >= design_.K)
                throw DataError("latent code: concept index " + std::to_string(k) +
                                " outside [0, " + std::to_string(design_.K) + ")");
    }

    const SparseDesign& design() const { return design_; }
    const ConceptSet& active() const { return active_; }
    bool empty() const { return active_.empty(); }

    bool is_active(Index k) const { return std::binary_search(active_.begin(), active_.end(), k); }

    friend bool operator==(const LatentCode&, const LatentCode&) = default;

private:
    SparseDesign design_;
    ConceptSet active_;
};

inline LatentCode code_from_set(const ConceptSet& s, const SparseDesign& design) {
    return LatentCode(design, s);
}

namespace detail {

inline void check_concept(const LatentCode& code, Index k, const char* op) {
    if (k < 0 || k >= code.design().K)
        throw DataError(std::string(op) + ": concept index " + std::to_string(k) + " outside [0, " +
                        std::to_string(code.design().K) + ")");
}

}  // namespace detail

/// Zero block k1 and activate block k2. swap(k, k) is the identity.
inline LatentCode swap(const LatentCode& code, Index k1, Index k2) {
    detail::check_concept(code, k1, "swap");
    detail::check_concept(code, k2, "swap");
    if (!code.is_active(k1))
        throw UsageError("swap: concept " + std::to_string(k1) + " is not active");
    if (k1 == k2) return code;
    ConceptSet s;
    for (Index k : code.active())
        if (k != k1) s.push_back(k);
    s.push_back(k2);
    return LatentCode(code.design(), std::move(s));
}

inline LatentCode remove(const LatentCode& code, Index k) {
    detail::check_concept(code, k, "remove");
    if (!code.is_active(k)) throw UsageError("remove: concept " + std::to_string(k) + " is not active");
    ConceptSet s;
    for (Index a : code.active())
        if (a != k) s.push_back(a);
    return LatentCode(code.design(), std::move(s));
}

inline LatentCode insert(const LatentCode& code, Index k) {
    detail::check_concept(code, k, "insert");
    if (code.is_active(k)) throw UsageError("insert: concept " + std::to_string(k) + " is already active");
    ConceptSet s = code.active();
    s.push_back(k);
    return LatentCode(code.design(), std::move(s));
}

template <typename Scalar>
Vector<Scalar> materialize(const SsaeModel<Scalar>& model, const LatentCode& code) {
    if (!(model.design == code.design()))
        throw DataError("latent code design (d=" + std::to_string(code.design().d) + ", K=" +
                        std::to_string(code.design().K) + ") does not match model (d=" +
                        std::to_string(model.design.d) + ", K=" + std::to_string(model.design.K) + ")");
    const Index d = model.design.d;
    Vector<Scalar> y = Vector<Scalar>::Zero(model.design.latent_dim());
    for (Index k : code.active()) y.segment(k * d, d) = model.yc.col(k);
    return y;
}

/// Embedding W2 sigma(y) of a latent code.
template <typename Scalar>
Vector<Scalar> decode(const SsaeModel<Scalar>& model, const LatentCode& code) {
    const Vector<Scalar> y = materialize(model, code);
    return model.w2 * activate(y, model.activation);
}

template <typename Scalar>
struct Composition {
    LatentCode code;
    Vector<Scalar> embedding;
    bool seen_in_training = false;  // the pair co-occurred in some training sample
};

/// Code {k1, k2}, optionally merged into `base`, together with its decode.
///
/// A pair that co-occurred in training is still composed; the result is
/// flagged so generalization claims can be filtered on it.
template <typename Scalar>
Composition<Scalar> compose_unseen(const SsaeModel<Scalar>& model, const RealizationSet& real,
                                   Index k1, Index k2, const ConceptSet& base = {}) {
    LatentCode code(model.design, base);
    ConceptSet active = code.active();
    active.push_back(k1);
    active.push_back(k2);
    code = LatentCode(model.design, std::move(active));
    Composition<Scalar> out{code, decode(model, code), !check_composability(real, k1, k2)};
    return out;
}

}  // namespace ssae

#endif  // SSAE_COMPOSE_HPP
