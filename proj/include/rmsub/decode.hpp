#ifndef RMSUB_DECODE_HPP
#define RMSUB_DECODE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rmsub/gf2.hpp"
#include "rmsub/projection.hpp"
#include "rmsub/prune.hpp"

namespace rmsub {

/// Saturation LLR used for hard->soft embeddings and infinite-LLR limits.
inline constexpr double kSatLlr = 30.0;

struct DecodeResult {
    BinVector codeword;
    LlrVector final_llr;  // soft decoders only
    std::size_t iterations_used = 0;
};

/// Hard threshold: positive -> 0, negative -> 1, ties -> 0.
inline BinVector hard_decision(const LlrVector& l) {
    BinVector v(l.size());
    for (std::size_t i = 0; i < l.size(); ++i)
        if (l[i] < 0) v.set(i, true);
    return v;
}

/// In-place Walsh-Hadamard transform, O(n log n) butterflies.
inline void fht(std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fht: length must be a power of two");
    for (std::size_t h = 1; h < n; h <<= 1)
        for (std::size_t i = 0; i < n; i += h << 1)
            for (std::size_t j = i; j < i + h; ++j) {
                const double a = v[j], b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
}

/// MAP decoding of RM(m,1) through the FHT: the transform coefficient at mask
/// h is the correlation with the codeword z -> <h,z>; the sign resolves the
/// all-ones component. Ties break toward the lower mask with positive sign.
inline DecodeResult fht_map_rm1(const LlrVector& l, std::size_t m) {
    const std::size_t n = std::size_t(1) << m;
    if (l.size() != n) throw std::invalid_argument("fht_map_rm1: length must be 2^m");
    std::vector<double> w = l;
    fht(w);
    std::size_t best_h = 0;
    double best = -1.0;
    bool best_neg = false;
    for (std::size_t h = 0; h < n; ++h) {
        if (std::abs(w[h]) > best) {
            best = std::abs(w[h]);
            best_h = h;
            best_neg = w[h] < 0;
        }
    }
    DecodeResult res;
    res.codeword = BinVector(n);
    for (std::size_t z = 0; z < n; ++z) {
        const bool bit = (std::popcount(std::uint64_t(best_h & z)) & 1) ^ int(best_neg);
        res.codeword.set(z, bit);
    }
    res.iterations_used = 1;
    return res;
}

/// Correlation scores <l, 1-2c> for every codebook row.
inline std::vector<double> codeword_scores(const LlrVector& l, const BinMatrix& codebook) {
    if (codebook.cols() != l.size())
        throw std::invalid_argument("codeword_scores: length mismatch");
    double total = 0;
    for (double v : l) total += v;
    std::vector<double> s(codebook.rows());
    for (std::size_t i = 0; i < codebook.rows(); ++i) {
        double on = 0;
        for (std::size_t j = 0; j < codebook.cols(); ++j)
            if (codebook.get(i, j)) on += l[j];
        s[i] = total - 2.0 * on;
    }
    return s;
}

/// Codeword maximizing <l, 1-2c>; ties break toward the lowest row index.
inline DecodeResult map_decode(const LlrVector& l, const BinMatrix& codebook) {
    const auto s = codeword_scores(l, codebook);
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] > s[best]) best = i;
    DecodeResult res;
    res.codeword = codebook.row(best);
    res.iterations_used = 1;
    return res;
}

namespace detail {

/// MAP over a bottom node's precomputed ±1 codebook; returns the row index.
inline std::size_t map_index_node(const LlrVector& l, const PlanNode& node) {
    const std::size_t np = node.length();
    const std::size_t count = std::size_t(1) << node.rank;
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < count; ++i) {
        const double* row = node.codebook_pm.data() + i * np;
        double s = 0;
        for (std::size_t j = 0; j < np; ++j) s += l[j] * row[j];
        if (s > best_score) { best_score = s; best = i; }
    }
    return best;
}

}  // namespace detail

inline BinVector map_decode_node(const LlrVector& l, const PlanNode& node) {
    return node.cb.codebook.row(detail::map_index_node(l, node));
}

/// Max-log information-bit LLRs (the first half of the soft-MAP step).
/// Columns of U that are constant over the codebook get LLR 0.
inline LlrVector info_bit_llrs(const LlrVector& l, const BinMatrix& codebook,
                               const BinMatrix& U) {
    if (U.rows() != codebook.rows())
        throw std::invalid_argument("info_bit_llrs: codebook/U row mismatch");
    const auto s = codeword_scores(l, codebook);
    LlrVector out(U.cols(), 0.0);
    for (std::size_t i = 0; i < U.cols(); ++i) {
        double max0 = -std::numeric_limits<double>::infinity();
        double max1 = -std::numeric_limits<double>::infinity();
        for (std::size_t row = 0; row < U.rows(); ++row)
            (U.get(row, i) ? max1 : max0) = std::max(U.get(row, i) ? max1 : max0, s[row]);
        if (std::isinf(max0) || std::isinf(max1)) continue;  // fixed column
        out[i] = max0 - max1;
    }
    return out;
}

/// Soft-MAP on a bottom plan node: max-log information-bit LLRs, then min-sum
/// re-encoding along the generator columns. Columns with no information-bit
/// participation are deterministically 0 and get +sat.
inline LlrVector soft_map(const LlrVector& l_p, const PlanNode& node) {
    if (!node.is_bottom) throw std::invalid_argument("soft_map: not a bottom-layer node");
    const std::size_t np = node.length();
    const std::size_t count = std::size_t(1) << node.rank;

    // per-pivot maxima of the correlation scores, split by the pivot's bit
    std::vector<double> max0(node.rank, -std::numeric_limits<double>::infinity());
    std::vector<double> max1(node.rank, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < count; ++i) {
        const double* row = node.codebook_pm.data() + i * np;
        double s = 0;
        for (std::size_t j = 0; j < np; ++j) s += l_p[j] * row[j];
        for (std::size_t b = 0; b < node.rank; ++b) {
            if ((i >> b) & 1u) max1[b] = std::max(max1[b], s);
            else max0[b] = std::max(max0[b], s);
        }
    }
    std::vector<double> l_inf(node.rank);
    for (std::size_t b = 0; b < node.rank; ++b) l_inf[b] = max0[b] - max1[b];

    LlrVector l_enc(np);
    for (std::size_t j = 0; j < np; ++j) {
        const auto& dj = node.delta[j];
        if (dj.empty()) { l_enc[j] = kSatLlr; continue; }
        double sign = 1.0;
        double mag = std::numeric_limits<double>::infinity();
        for (std::uint16_t b : dj) {
            const double v = l_inf[b];
            if (v < 0) sign = -sign;
            mag = std::min(mag, std::abs(v));
        }
        l_enc[j] = sign * mag;
    }
    return l_enc;
}

namespace detail {

inline std::vector<std::size_t> retained_indices(const PlanNode& node,
                                                 const NodeProfile& prof) {
    if (prof.mode == PruneMode::subset) {
        if (prof.subset.empty()) throw std::invalid_argument("pruning profile: empty subset");
        return prof.subset;
    }
    std::vector<std::size_t> all(node.num_children());
    std::iota(all.begin(), all.end(), 0);
    return all;
}

}  // namespace detail

/// Hard aggregation: each retained projection votes on the sign of the LLR at
/// the partner coordinate, weighted by its decoded coset bit.
inline LlrVector aggregate_hard(const LlrVector& l, const std::vector<BinVector>& decisions,
                                const PlanNode& node, const NodeProfile& prof) {
    const auto retained = detail::retained_indices(node, prof);
    if (decisions.size() != retained.size())
        throw std::invalid_argument("aggregate_hard: one decision per retained projection");
    const std::size_t n = l.size();
    LlrVector out(n, 0.0);
    for (std::size_t qi = 0; qi < retained.size(); ++qi) {
        const std::size_t q = retained[qi];
        const std::size_t zq = q + 1;
        const auto& coset_of = node.child_coset_of[q];
        for (std::size_t z = 0; z < n; ++z) {
            const double vote = decisions[qi].get(coset_of[z]) ? -1.0 : 1.0;
            out[z] += vote * l[z ^ zq];
        }
    }
    const double inv = 1.0 / double(retained.size());
    for (double& v : out) v *= inv;
    return out;
}

/// Soft aggregation (tanh rule). Weighted mode replaces the uniform average
/// with per-projection weights over all Q children.
inline LlrVector aggregate_soft(const LlrVector& l, const std::vector<LlrVector>& soft,
                                const PlanNode& node, const NodeProfile& prof) {
    const std::size_t n = l.size();
    LlrVector out(n, 0.0);
    if (prof.mode == PruneMode::weighted) {
        prof.validate(node.num_children());
        if (soft.size() != node.num_children())
            throw std::invalid_argument("aggregate_soft: weighted mode needs all projections");
        for (std::size_t q = 0; q < soft.size(); ++q) {
            const double wq = prof.weights[q];
            if (wq == 0.0) continue;
            const std::size_t zq = q + 1;
            const auto& coset_of = node.child_coset_of[q];
            for (std::size_t z = 0; z < n; ++z)
                out[z] += wq * std::tanh(soft[q][coset_of[z]] / 2.0) * l[z ^ zq];
        }
        return out;
    }
    const auto retained = detail::retained_indices(node, prof);
    if (soft.size() != retained.size())
        throw std::invalid_argument("aggregate_soft: one soft decision per retained projection");
    for (std::size_t qi = 0; qi < retained.size(); ++qi) {
        const std::size_t q = retained[qi];
        const std::size_t zq = q + 1;
        const auto& coset_of = node.child_coset_of[q];
        for (std::size_t z = 0; z < n; ++z)
            out[z] += std::tanh(soft[qi][coset_of[z]] / 2.0) * l[z ^ zq];
    }
    const double inv = 1.0 / double(retained.size());
    for (double& v : out) v *= inv;
    return out;
}

/// Log-sum aggregation: per projection the exact LLR of the bit pair under
/// independence, which is the boxplus of the soft decision and the partner LLR.
inline LlrVector aggregate_logsum(const LlrVector& l, const std::vector<LlrVector>& soft,
                                  const PlanNode& node, const NodeProfile& prof) {
    const auto retained = detail::retained_indices(node, prof);
    if (soft.size() != retained.size())
        throw std::invalid_argument("aggregate_logsum: one soft decision per retained projection");
    const std::size_t n = l.size();
    LlrVector out(n, 0.0);
    for (std::size_t qi = 0; qi < retained.size(); ++qi) {
        const std::size_t q = retained[qi];
        const std::size_t zq = q + 1;
        const auto& coset_of = node.child_coset_of[q];
        for (std::size_t z = 0; z < n; ++z)
            out[z] += llr_boxplus(soft[qi][coset_of[z]], l[z ^ zq]);
    }
    const double inv = 1.0 / double(retained.size());
    for (double& v : out) v *= inv;
    return out;
}

enum class AggregationRule { soft, logsum };

namespace detail {

inline LlrVector project_onto_child(const LlrVector& l, std::size_t zq) {
    const std::size_t n = l.size();
    LlrVector out;
    out.reserve(n / 2);
    for (std::size_t z = 0; z < n; ++z)
        if (z < (z ^ zq)) out.push_back(llr_boxplus(l[z], l[z ^ zq]));
    return out;
}

inline BinVector subrpa_node(const LlrVector& l, const PlanNode& node,
                             const PruningProfile& profile, std::vector<std::size_t>& path,
                             std::size_t n_max, std::size_t* root_iters) {
    if (node.is_bottom) return map_decode_node(l, node);
    const NodeProfile& prof = profile.resolve(path);
    if (prof.mode == PruneMode::weighted)
        throw std::invalid_argument("subrpa: weighted profiles require the soft decoder");
    const auto retained = retained_indices(node, prof);

    LlrVector cur = l;
    BinVector prev_hard = hard_decision(cur);
    std::size_t iters = 0;
    for (std::size_t it = 0; it < n_max; ++it) {
        std::vector<BinVector> decisions;
        decisions.reserve(retained.size());
        for (std::size_t q : retained) {
            path.push_back(q);
            decisions.push_back(subrpa_node(project_onto_child(cur, q + 1),
                                            node.children[q], profile, path, n_max, nullptr));
            path.pop_back();
        }
        cur = aggregate_hard(cur, decisions, node, prof);
        ++iters;
        BinVector h = hard_decision(cur);
        if (h == prev_hard) break;
        prev_hard = std::move(h);
    }
    if (root_iters) *root_iters = iters;
    return hard_decision(cur);
}

inline LlrVector soft_subrpa_node(const LlrVector& l, const PlanNode& node,
                                  const PruningProfile& profile,
                                  std::vector<std::size_t>& path, std::size_t n_max,
                                  AggregationRule rule, std::size_t* root_iters) {
    if (node.is_bottom) return soft_map(l, node);
    const NodeProfile& prof = profile.resolve(path);
    const bool weighted = prof.mode == PruneMode::weighted;
    if (weighted && rule != AggregationRule::soft)
        throw std::invalid_argument("soft_subrpa: weighted mode uses the tanh rule");
    const auto retained = weighted ? [&] {
        std::vector<std::size_t> all(node.num_children());
        std::iota(all.begin(), all.end(), 0);
        return all;
    }() : retained_indices(node, prof);

    LlrVector cur = l;
    BinVector prev_hard = hard_decision(cur);
    std::size_t iters = 0;
    for (std::size_t it = 0; it < n_max; ++it) {
        std::vector<LlrVector> soft;
        soft.reserve(retained.size());
        for (std::size_t q : retained) {
            path.push_back(q);
            soft.push_back(soft_subrpa_node(project_onto_child(cur, q + 1), node.children[q],
                                            profile, path, n_max, rule, nullptr));
            path.pop_back();
        }
        cur = rule == AggregationRule::soft ? aggregate_soft(cur, soft, node, prof)
                                            : aggregate_logsum(cur, soft, node, prof);
        ++iters;
        BinVector h = hard_decision(cur);
        if (h == prev_hard) break;
        prev_hard = std::move(h);
    }
    if (root_iters) *root_iters = iters;
    return cur;
}

}  // namespace detail

/// Recursive projection-aggregation with hard MAP decisions at the bottom.
inline DecodeResult subrpa_decode(const LlrVector& l, const DecodingPlan& plan,
                                  const PruningProfile& profile, std::size_t n_max) {
    std::vector<std::size_t> path;
    DecodeResult res;
    if (plan.root.is_bottom) {
        res.codeword = map_decode_node(l, plan.root);
        res.iterations_used = 1;
        return res;
    }
    std::size_t iters = 0;
    res.codeword = detail::subrpa_node(l, plan.root, profile, path, n_max, &iters);
    res.iterations_used = iters;
    return res;
}

/// Soft-decision variant: soft-MAP at the bottom, tanh or log-sum aggregation.
inline DecodeResult soft_subrpa_decode(const LlrVector& l, const DecodingPlan& plan,
                                       const PruningProfile& profile, std::size_t n_max,
                                       AggregationRule rule = AggregationRule::soft) {
    std::vector<std::size_t> path;
    DecodeResult res;
    if (plan.root.is_bottom) {
        res.final_llr = soft_map(l, plan.root);
        res.codeword = hard_decision(res.final_llr);
        res.iterations_used = 1;
        return res;
    }
    std::size_t iters = 0;
    res.final_llr = detail::soft_subrpa_node(l, plan.root, profile, path, n_max, rule, &iters);
    res.codeword = hard_decision(res.final_llr);
    res.iterations_used = iters;
    return res;
}

/// Exact MAP for order-<=2 RM subcodes: enumerate the cosets of RM(m,1) inside
/// the code (one per extra-row message, Gray order) and solve each coset with
/// one FHT. Equivalent to map_decode over the full 2^k codebook.
class CosetFhtMap {
public:
    explicit CosetFhtMap(const GeneratorSpec& spec) : m_(spec.m), n_(std::size_t(1) << spec.m) {
        spec.validate();
        const std::size_t r = spec.order();
        if (r < 1 || r > 2) throw std::invalid_argument("CosetFhtMap: order must be 1 or 2");
        if (r == 2) {
            for (std::size_t e : spec.extra_rows) {
                std::vector<std::size_t> support;
                for (std::size_t j = 0; j < n_; ++j)
                    if ((j & ~e) == 0) support.push_back(j);
                extra_support_.push_back(std::move(support));
            }
        }
        if (r == 1 && spec.k < rm_dimension(spec.m, r))
            throw std::invalid_argument("CosetFhtMap: order-<=1 input must be a full RM code");
    }

    BinVector decode(const LlrVector& l) const {
        if (l.size() != n_) throw std::invalid_argument("CosetFhtMap: length mismatch");
        const std::size_t E = extra_support_.size();
        std::vector<double> flipped = l;  // l with signs flipped by the current extra codeword
        std::vector<double> w(n_);
        std::uint64_t cur_gray = 0;
        std::size_t best_h = 0;
        bool best_neg = false;
        std::uint64_t best_gray = 0;
        double best = -1.0;

        const std::uint64_t cosets = std::uint64_t(1) << E;
        for (std::uint64_t u = 0; u < cosets; ++u) {
            const std::uint64_t gray = u ^ (u >> 1);
            const std::uint64_t diff = gray ^ cur_gray;
            if (diff) {
                const auto bit = std::size_t(std::countr_zero(diff));
                for (std::size_t j : extra_support_[bit]) flipped[j] = -flipped[j];
                cur_gray = gray;
            }
            w.assign(flipped.begin(), flipped.end());
            fht(w);
            for (std::size_t h = 0; h < n_; ++h) {
                if (std::abs(w[h]) > best) {
                    best = std::abs(w[h]);
                    best_h = h;
                    best_neg = w[h] < 0;
                    best_gray = gray;
                }
            }
        }

        BinVector c(n_);
        for (std::size_t z = 0; z < n_; ++z)
            c.set(z, (std::popcount(std::uint64_t(best_h & z)) & 1) ^ int(best_neg));
        for (std::size_t b = 0; b < E; ++b)
            if ((best_gray >> b) & 1u)
                for (std::size_t j : extra_support_[b]) c.flip(j);
        return c;
    }

private:
    std::size_t m_, n_;
    std::vector<std::vector<std::size_t>> extra_support_;
};

}  // namespace rmsub

#endif  // RMSUB_DECODE_HPP
