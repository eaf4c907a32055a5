#ifndef SSAE_DESIGN_HPP
#define SSAE_DESIGN_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ssae/numerics.hpp"

namespace ssae {

using ConceptSet = std::vector<Index>;  // sorted, unique

/// Ordered concept names; a name's position is its latent block.
class ConceptDictionary {
public:
    ConceptDictionary() = default;

    explicit ConceptDictionary(std::vector<std::string> names) : names_(std::move(names)) {
        if (names_.empty()) throw DataError("concept dictionary is empty");
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i].empty())
                throw DataError("concept " + std::to_string(i) + " has an empty name");
            if (!index_.emplace(names_[i], static_cast<Index>(i)).second)
                throw DataError("duplicate concept name '" + names_[i] + "'");
        }
    }

    Index size() const { return static_cast<Index>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(Index k) const { return names_.at(static_cast<std::size_t>(k)); }

    bool contains(const std::string& name) const { return index_.count(name) != 0; }

    Index index_of(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw DataError("unknown concept '" + name + "'");
        return it->second;
    }

    static ConceptDictionary numbered(Index k) {
        std::vector<std::string> names;
        for (Index i = 0; i < k; ++i) names.push_back("c" + std::to_string(i));
        return ConceptDictionary(std::move(names));
    }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, Index> index_;
};

inline ConceptSet normalize_set(ConceptSet s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

/// Per-sample concept sets, in the column order of the embedding matrix.
struct RealizationSet {
    std::vector<std::string> sample_ids;
    std::vector<ConceptSet> concept_sets;

    RealizationSet() = default;

    RealizationSet(std::vector<std::string> ids, std::vector<ConceptSet> sets)
        : sample_ids(std::move(ids)), concept_sets(std::move(sets)) {
        if (sample_ids.size() != concept_sets.size())
            throw DataError("realization set: " + std::to_string(sample_ids.size()) + " ids but " +
                            std::to_string(concept_sets.size()) + " concept sets");
        for (auto& s : concept_sets) s = normalize_set(std::move(s));
    }

    /// Ids default to "s0", "s1", ...
    static RealizationSet from_sets(std::vector<ConceptSet> sets) {
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < sets.size(); ++i) ids.push_back("s" + std::to_string(i));
        return RealizationSet(std::move(ids), std::move(sets));
    }

    Index size() const { return static_cast<Index>(concept_sets.size()); }

    const ConceptSet& set(Index i) const { return concept_sets[static_cast<std::size_t>(i)]; }

    bool contains(Index i, Index k) const {
        const auto& s = set(i);
        return std::binary_search(s.begin(), s.end(), k);
    }

    /// Sub-realization holding `columns`, in that order.
    RealizationSet select(const std::vector<Index>& columns) const {
        RealizationSet out;
        out.sample_ids.reserve(columns.size());
        out.concept_sets.reserve(columns.size());
        for (Index c : columns) {
            out.sample_ids.push_back(sample_ids[static_cast<std::size_t>(c)]);
            out.concept_sets.push_back(set(c));
        }
        return out;
    }
};

/// Latent layout: K contiguous blocks of d rows, block k at rows [k*d, k*d + d).
struct SparseDesign {
    Index d = 1;
    Index K = 1;

    SparseDesign() = default;
    SparseDesign(Index d_, Index k_) : d(d_), K(k_) {
        if (d < 1) throw DataError("latent sub-vector dimension d must be >= 1");
        if (K < 1) throw DataError("concept count K must be >= 1");
    }

    Index latent_dim() const { return d * K; }

    Index row_index(Index k, Index j) const {
        if (k < 0 || k >= K || j < 0 || j >= d)
            throw DataError("row_index: (k=" + std::to_string(k) + ", j=" + std::to_string(j) +
                            ") outside " + std::to_string(K) + " concepts x " + std::to_string(d) +
                            " rows");
        return k * d + j;
    }

    friend bool operator==(const SparseDesign&, const SparseDesign&) = default;
};

inline Index row_index(const SparseDesign& design, Index k, Index j) {
    return design.row_index(k, j);
}

using Mask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

inline void validate_realizations(const SparseDesign& design, const RealizationSet& real) {
    for (Index i = 0; i < real.size(); ++i)
        for (Index k : real.set(i))
            if (k < 0 || k >= design.K)
                throw DataError("sample '" + real.sample_ids[static_cast<std::size_t>(i)] +
                                "' references concept index " + std::to_string(k) + " but K = " +
                                std::to_string(design.K));
}

inline Mask build_mask(const SparseDesign& design, const RealizationSet& real) {
    validate_realizations(design, real);
    Mask mask = Mask::Zero(design.latent_dim(), real.size());
    for (Index i = 0; i < real.size(); ++i)
        for (Index k : real.set(i)) mask.block(k * design.d, i, design.d, 1).setOnes();
    return mask;
}

template <typename Scalar = double>
Matrix<Scalar> membership_matrix(const SparseDesign& design, const RealizationSet& real) {
    validate_realizations(design, real);
    Matrix<Scalar> b = Matrix<Scalar>::Zero(design.K, real.size());
    for (Index i = 0; i < real.size(); ++i)
        for (Index k : real.set(i)) b(k, i) = Scalar(1);
    return b;
}

/// True iff no sample holds both k1 and k2 (the pair is an unseen combination).
inline bool check_composability(const RealizationSet& real, Index k1, Index k2) {
    for (Index i = 0; i < real.size(); ++i)
        if (real.contains(i, k1) && real.contains(i, k2)) return false;
    return true;
}

}  // namespace ssae

#endif  // SSAE_DESIGN_HPP
