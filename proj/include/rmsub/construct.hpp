#ifndef RMSUB_CONSTRUCT_HPP
#define RMSUB_CONSTRUCT_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rmsub/gf2.hpp"

namespace rmsub {

inline std::uint64_t binom(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Dimension of RM(m,r): sum of C(m,i) for i <= r.
inline std::size_t rm_dimension(std::size_t m, std::size_t r) {
    std::size_t k = 0;
    for (std::size_t i = 0; i <= r; ++i) k += std::size_t(binom(m, i));
    return k;
}

/// Row i of F^{⊗m} has support {j : j & ~i == 0}, hence weight 2^{popcount(i)}.
/// RM(m,r) keeps the rows of weight >= 2^{m-r}, i.e. popcount(i) >= m-r.
inline std::vector<std::size_t> rm_row_indices(std::size_t m, std::size_t r) {
    if (r > m) throw std::invalid_argument("rm_row_indices: need r <= m");
    const std::size_t n = std::size_t(1) << m;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
        if (std::size_t(std::popcount(std::uint64_t(i))) >= m - r) idx.push_back(i);
    // canonical order: descending weight, then ascending row index
    std::stable_sort(idx.begin(), idx.end(), [](std::size_t a, std::size_t b) {
        return std::popcount(std::uint64_t(a)) > std::popcount(std::uint64_t(b));
    });
    return idx;
}

/// Candidate extra rows for a subcode between RM(m,r-1) and RM(m,r):
/// the C(m,r) rows of weight exactly 2^{m-r}, ascending row index.
inline std::vector<std::size_t> extra_row_candidates(std::size_t m, std::size_t r) {
    if (r == 0 || r > m) throw std::invalid_argument("extra_row_candidates: need 1 <= r <= m");
    const std::size_t n = std::size_t(1) << m;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
        if (std::size_t(std::popcount(std::uint64_t(i))) == m - r) idx.push_back(i);
    return idx;
}

inline BinVector kernel_power_row(std::size_t m, std::size_t row_index) {
    const std::size_t n = std::size_t(1) << m;
    BinVector v(n);
    for (std::size_t j = 0; j < n; ++j)
        if ((j & ~row_index) == 0) v.set(j, true);
    return v;
}

inline BinMatrix rm_generator(std::size_t m, std::size_t r) {
    if (r > m) throw std::invalid_argument("rm_generator: need 0 <= r <= m");
    const auto idx = rm_row_indices(m, r);
    BinMatrix gen(idx.size(), std::size_t(1) << m);
    for (std::size_t i = 0; i < idx.size(); ++i) gen.set_row(i, kernel_power_row(m, idx[i]));
    return gen;
}

/// (m, k, extra_rows) pinning an RM subcode between RM(m,r-1) and RM(m,r).
/// extra_rows are absolute row indices of F^{⊗m} with weight 2^{m-r}.
struct GeneratorSpec {
    std::size_t m = 0;
    std::size_t k = 0;
    std::vector<std::size_t> extra_rows;  // sorted ascending

    /// Order r such that k_l < k <= k_u.
    std::size_t order() const {
        for (std::size_t r = 0; r <= m; ++r)
            if (k <= rm_dimension(m, r)) return r;
        throw std::invalid_argument("GeneratorSpec: k exceeds 2^m");
    }
    std::size_t k_lower() const {
        const std::size_t r = order();
        return r == 0 ? 0 : rm_dimension(m, r - 1);
    }
    std::size_t k_upper() const { return rm_dimension(m, order()); }

    void validate() const {
        if (k == 0 || k > (std::size_t(1) << m))
            throw std::invalid_argument("GeneratorSpec: need 1 <= k <= 2^m");
        const std::size_t r = order();
        if (r == 0) {
            if (!extra_rows.empty())
                throw std::invalid_argument("GeneratorSpec: order-0 code takes no extra rows");
            return;
        }
        if (extra_rows.size() != k - k_lower())
            throw std::invalid_argument("GeneratorSpec: |extra_rows| must equal k - k_l");
        const auto candidates = extra_row_candidates(m, r);
        for (std::size_t e : extra_rows) {
            if (!std::binary_search(candidates.begin(), candidates.end(), e))
                throw std::invalid_argument("GeneratorSpec: extra row outside the weight-2^{m-r} set");
        }
        if (!std::is_sorted(extra_rows.begin(), extra_rows.end()) ||
            std::adjacent_find(extra_rows.begin(), extra_rows.end()) != extra_rows.end())
            throw std::invalid_argument("GeneratorSpec: extra_rows must be sorted and distinct");
    }
};

inline void to_json(nlohmann::json& j, const GeneratorSpec& s) {
    j = nlohmann::json{{"m", s.m}, {"k", s.k}, {"extra_rows", s.extra_rows}};
}
inline void from_json(const nlohmann::json& j, GeneratorSpec& s) {
    j.at("m").get_to(s.m);
    j.at("k").get_to(s.k);
    j.at("extra_rows").get_to(s.extra_rows);
}

/// Base rows of RM(m,r-1) first (canonical order), then the selected extras.
inline BinMatrix subcode_generator(const GeneratorSpec& spec) {
    spec.validate();
    const std::size_t r = spec.order();
    std::vector<std::size_t> idx =
        r == 0 ? rm_row_indices(spec.m, 0) : rm_row_indices(spec.m, r - 1);
    if (r > 0)
        for (std::size_t e : spec.extra_rows) idx.push_back(e);
    BinMatrix gen(idx.size(), std::size_t(1) << spec.m);
    for (std::size_t i = 0; i < idx.size(); ++i)
        gen.set_row(i, kernel_power_row(spec.m, idx[i]));
    return gen;
}

namespace detail {

/// Project a packed row of length 2^mm onto cosets of span{zq}: output bit for
/// coset tau = XOR of the two member bits; cosets ordered by their minimum member.
inline BinVector project_row_1d(const BinVector& row, std::size_t mm, std::size_t zq) {
    const std::size_t n = std::size_t(1) << mm;
    BinVector out(n / 2);
    std::size_t t = 0;
    for (std::size_t z = 0; z < n; ++z) {
        if (z < (z ^ zq)) {
            out.set(t, row.get(z) ^ row.get(z ^ zq));
            ++t;
        }
    }
    return out;
}

/// Ranks of all bottom-layer projected generators after r-1 levels of 1-D
/// projections (full tree). For r=1 the single "bottom node" is gen itself.
inline void bottom_ranks_rec(const BinMatrix& gen, std::size_t mm, std::size_t depth,
                             std::vector<std::size_t>& out) {
    if (depth == 0) {
        out.push_back(gf2_rank(gen));
        return;
    }
    const std::size_t n = std::size_t(1) << mm;
    for (std::size_t zq = 1; zq < n; ++zq) {
        BinMatrix proj(gen.rows(), n / 2);
        for (std::size_t i = 0; i < gen.rows(); ++i)
            proj.set_row(i, project_row_1d(gen.row(i), mm, zq));
        bottom_ranks_rec(proj, mm - 1, depth - 1, out);
    }
}

}  // namespace detail

inline std::vector<std::size_t> bottom_layer_ranks(const GeneratorSpec& spec) {
    const std::size_t r = std::max<std::size_t>(spec.order(), 1);
    std::vector<std::size_t> ranks;
    detail::bottom_ranks_rec(subcode_generator(spec), spec.m, r - 1, ranks);
    return ranks;
}

/// L = sum over bottom-layer nodes of 2^{R_t}, plus the best-Q0 view at the
/// top layer (per direct child, that child's whole-subtree contribution).
struct ComplexityScore {
    std::uint64_t full_L = 0;
    std::vector<std::uint64_t> child_contributions;  // top-layer children, plan order

    std::uint64_t best_subset_L(std::size_t q0) const {
        std::vector<std::uint64_t> c = child_contributions;
        std::sort(c.begin(), c.end());
        q0 = std::min(q0, c.size());
        return std::accumulate(c.begin(), c.begin() + std::ptrdiff_t(q0), std::uint64_t(0));
    }
};

inline ComplexityScore complexity_score(const GeneratorSpec& spec) {
    const std::size_t r = std::max<std::size_t>(spec.order(), 1);
    ComplexityScore score;
    if (r == 1) {
        const std::size_t R = gf2_rank(subcode_generator(spec));
        score.full_L = std::uint64_t(1) << R;
        score.child_contributions = {score.full_L};
        return score;
    }
    const BinMatrix gen = subcode_generator(spec);
    const std::size_t n = std::size_t(1) << spec.m;
    for (std::size_t zq = 1; zq < n; ++zq) {
        BinMatrix proj(gen.rows(), n / 2);
        for (std::size_t i = 0; i < gen.rows(); ++i)
            proj.set_row(i, detail::project_row_1d(gen.row(i), spec.m, zq));
        std::vector<std::size_t> ranks;
        detail::bottom_ranks_rec(proj, spec.m - 1, r - 2, ranks);
        std::uint64_t contrib = 0;
        for (std::size_t R : ranks) contrib += std::uint64_t(1) << R;
        score.child_contributions.push_back(contrib);
        score.full_L += contrib;
    }
    return score;
}

enum class SearchObjective { min_full_L, max_full_L, min_subset_L };

struct SearchOptions {
    std::size_t q0 = 0;                    // for min_subset_L
    std::size_t exhaustive_cap = 1000000;  // max selections to enumerate exhaustively
    std::optional<std::size_t> random_budget;  // required when over cap
    std::uint64_t seed = 0;
};

namespace detail {

template <typename Visit>
void for_each_combination(std::size_t n, std::size_t k, Visit&& visit) {
    std::vector<std::size_t> c(k);
    std::iota(c.begin(), c.end(), 0);
    if (k == 0) { visit(c); return; }
    while (true) {
        visit(c);
        std::size_t i = k;
        while (i > 0 && c[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++c[i - 1];
        for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
    }
}

}  // namespace detail

/// Argmin/argmax over extra-row selections. Exhaustive when the selection count
/// fits the cap, otherwise seeded uniform sampling with the given budget.
/// Ties break toward the lexicographically smallest extra_rows; the exhaustive
/// enumeration visits selections in that order, so first-strict-improvement wins.
inline GeneratorSpec search_selection(std::size_t m, std::size_t k, SearchObjective obj,
                                      const SearchOptions& opt = {}) {
    GeneratorSpec probe{m, k, {}};
    const std::size_t r = probe.order();
    if (r == 0) return GeneratorSpec{m, k, {}};
    const auto candidates = extra_row_candidates(m, r);
    const std::size_t need = k - probe.k_lower();
    const std::uint64_t total = binom(candidates.size(), need);

    auto evaluate = [&](const std::vector<std::size_t>& picks) {
        GeneratorSpec s{m, k, {}};
        for (std::size_t p : picks) s.extra_rows.push_back(candidates[p]);
        std::sort(s.extra_rows.begin(), s.extra_rows.end());
        const ComplexityScore c = complexity_score(s);
        std::uint64_t v;
        switch (obj) {
            case SearchObjective::min_full_L: v = c.full_L; break;
            case SearchObjective::max_full_L: v = c.full_L; break;
            case SearchObjective::min_subset_L:
                if (opt.q0 == 0) throw std::invalid_argument("search_selection: min_subset_L needs q0");
                v = c.best_subset_L(opt.q0);
                break;
            default: throw std::logic_error("unreachable");
        }
        return std::pair<std::uint64_t, GeneratorSpec>(v, std::move(s));
    };

    const bool maximize = obj == SearchObjective::max_full_L;
    std::optional<std::uint64_t> best;
    GeneratorSpec best_spec;
    auto consider = [&](const std::vector<std::size_t>& picks) {
        auto [v, s] = evaluate(picks);
        const bool better = !best || (maximize ? v > *best : v < *best) ||
                            (v == *best && s.extra_rows < best_spec.extra_rows);
        if (better) { best = v; best_spec = std::move(s); }
    };

    if (total <= opt.exhaustive_cap) {
        detail::for_each_combination(candidates.size(), need, consider);
    } else {
        if (!opt.random_budget)
            throw std::length_error("search_selection: selection count over cap; supply a random budget");
        std::mt19937_64 rng(opt.seed);
        std::vector<std::size_t> pool(candidates.size());
        for (std::size_t t = 0; t < *opt.random_budget; ++t) {
            std::iota(pool.begin(), pool.end(), 0);
            for (std::size_t i = 0; i < need; ++i) {
                std::uniform_int_distribution<std::size_t> d(i, pool.size() - 1);
                std::swap(pool[i], pool[d(rng)]);
            }
            std::vector<std::size_t> picks(pool.begin(), pool.begin() + std::ptrdiff_t(need));
            consider(picks);
        }
    }
    return best_spec;
}

/// full_L for every selection, in lexicographic pick order. Used by the
/// extreme-value checks and small-scale studies; caller must respect the cap.
inline std::vector<std::uint64_t> enumerate_selection_scores(std::size_t m, std::size_t k) {
    GeneratorSpec probe{m, k, {}};
    const std::size_t r = probe.order();
    const auto candidates = extra_row_candidates(m, r);
    const std::size_t need = k - probe.k_lower();
    std::vector<std::uint64_t> out;
    detail::for_each_combination(candidates.size(), need, [&](const std::vector<std::size_t>& picks) {
        GeneratorSpec s{m, k, {}};
        for (std::size_t p : picks) s.extra_rows.push_back(candidates[p]);
        out.push_back(complexity_score(s).full_L);
    });
    return out;
}

}  // namespace rmsub

#endif  // RMSUB_CONSTRUCT_HPP
