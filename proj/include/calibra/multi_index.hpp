#pragma once

#include <algorithm>
#include <compare>
#include <initializer_list>
#include <string>
#include <vector>

#include "calibra/errors.hpp"

namespace calibra {

/// Strictly increasing tuple of 1-based coordinate indices, the basis label
/// for Lambda^k(R^n)^*. The empty tuple labels the degree-0 basis element.
class MultiIndex {
public:
    MultiIndex() = default;

    MultiIndex(std::initializer_list<int> indices) : indices_(indices) { validate_increasing(); }

    explicit MultiIndex(std::vector<int> indices) : indices_(std::move(indices)) {
        validate_increasing();
    }

    int size() const { return static_cast<int>(indices_.size()); }
    int operator[](int i) const { return indices_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& indices() const { return indices_; }

    bool contains(int idx) const {
        return std::binary_search(indices_.begin(), indices_.end(), idx);
    }

    bool within_dimension(int dim) const {
        return indices_.empty() || (indices_.front() >= 1 && indices_.back() <= dim);
    }

    /// Tuple with the entry at position `pos` removed.
    MultiIndex erased(int pos) const {
        std::vector<int> out(indices_);
        out.erase(out.begin() + pos);
        return MultiIndex(std::move(out));
    }

    auto operator<=>(const MultiIndex&) const = default;

    std::string to_string() const {
        std::string s = "(";
        for (std::size_t i = 0; i < indices_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(indices_[i]);
        }
        return s + ")";
    }

private:
    void validate_increasing() const {
        for (std::size_t i = 1; i < indices_.size(); ++i) {
            if (indices_[i - 1] >= indices_[i]) {
                throw PreconditionError("MultiIndex entries must be strictly increasing: " +
                                        to_string());
            }
        }
        if (!indices_.empty() && indices_.front() < 1) {
            throw PreconditionError("MultiIndex entries are 1-based: " + to_string());
        }
    }

    std::vector<int> indices_;
};

/// Merge two strictly increasing tuples. Returns the permutation sign of the
/// sorted interleaving, or 0 if the tuples share an index.
inline int merge_multi_indices(const MultiIndex& a, const MultiIndex& b, MultiIndex& out) {
    std::vector<int> merged;
    merged.reserve(static_cast<std::size_t>(a.size() + b.size()));
    int inversions = 0;
    int ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] == b[ib]) return 0;
        if (a[ia] < b[ib]) {
            merged.push_back(a[ia++]);
        } else {
            // b[ib] jumps over the remaining entries of a
            inversions += a.size() - ia;
            merged.push_back(b[ib++]);
        }
    }
    while (ia < a.size()) merged.push_back(a[ia++]);
    while (ib < b.size()) merged.push_back(b[ib++]);
    out = MultiIndex(std::move(merged));
    return (inversions % 2 == 0) ? 1 : -1;
}

/// All strictly increasing k-tuples in [1, dim], in lexicographic order.
inline std::vector<MultiIndex> all_multi_indices(int dim, int k) {
    std::vector<MultiIndex> out;
    if (k < 0 || k > dim) return out;
    std::vector<int> cur(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i + 1;
    while (true) {
        out.emplace_back(cur);
        int pos = k - 1;
        while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == dim - (k - 1 - pos)) --pos;
        if (pos < 0) break;
        ++cur[static_cast<std::size_t>(pos)];
        for (int i = pos + 1; i < k; ++i)
            cur[static_cast<std::size_t>(i)] = cur[static_cast<std::size_t>(i - 1)] + 1;
    }
    return out;
}

/// Complement of `idx` in [1, dim] together with the sign of the permutation
/// (idx, complement) of (1, ..., dim).
inline int complement_multi_index(const MultiIndex& idx, int dim, MultiIndex& out) {
    std::vector<int> comp;
    comp.reserve(static_cast<std::size_t>(dim - idx.size()));
    for (int i = 1; i <= dim; ++i) {
        if (!idx.contains(i)) comp.push_back(i);
    }
    // inversions between idx block and complement block
    long inversions = 0;
    for (int a = 0; a < idx.size(); ++a) {
        for (int c : comp) {
            if (c < idx[a]) ++inversions;
        }
    }
    out = MultiIndex(std::move(comp));
    return (inversions % 2 == 0) ? 1 : -1;
}

} // namespace calibra
