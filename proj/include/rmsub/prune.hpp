#ifndef RMSUB_PRUNE_HPP
#define RMSUB_PRUNE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "rmsub/projection.hpp"

namespace rmsub {

enum class PruneMode { full, subset, weighted };

struct NodeProfile {
    PruneMode mode = PruneMode::full;
    std::vector<std::size_t> subset;  // retained projection indices (0-based child index)
    std::vector<double> weights;      // weighted mode: w_q in [0,1], sum 1
    std::size_t q0 = 0;

    void validate(std::size_t num_children) const {
        if (mode == PruneMode::subset) {
            if (subset.empty()) throw std::invalid_argument("NodeProfile: empty subset");
            std::vector<std::size_t> s = subset;
            std::sort(s.begin(), s.end());
            if (std::adjacent_find(s.begin(), s.end()) != s.end() || s.back() >= num_children)
                throw std::invalid_argument("NodeProfile: subset indices invalid or duplicated");
        } else if (mode == PruneMode::weighted) {
            if (weights.size() != num_children)
                throw std::invalid_argument("NodeProfile: weight vector length mismatch");
            double sum = 0;
            for (double w : weights) {
                if (w < -1e-9 || w > 1.0 + 1e-9)
                    throw std::invalid_argument("NodeProfile: weight outside [0,1]");
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-6)
                throw std::invalid_argument("NodeProfile: weights must sum to 1");
        }
    }
};

/// Per plan-node pruning decisions, keyed by the path of child indices from
/// the root. Nodes without an entry decode with the full projection set.
struct PruningProfile {
    std::map<std::vector<std::size_t>, NodeProfile> nodes;

    static PruningProfile full() { return {}; }

    const NodeProfile& resolve(const std::vector<std::size_t>& path) const {
        static const NodeProfile kFull{};
        auto it = nodes.find(path);
        return it == nodes.end() ? kFull : it->second;
    }
};

inline void to_json(nlohmann::json& j, const PruningProfile& p) {
    j = nlohmann::json::array();
    for (const auto& [path, np] : p.nodes) {
        nlohmann::json e;
        e["node_path"] = path;
        e["subset"] = np.subset;
        e["weights"] = np.weights;
        e["Q0"] = np.q0;
        e["mode"] = np.mode == PruneMode::full     ? "full"
                    : np.mode == PruneMode::subset ? "subset"
                                                   : "weighted";
        j.push_back(std::move(e));
    }
}

inline void from_json(const nlohmann::json& j, PruningProfile& p) {
    p.nodes.clear();
    for (const auto& e : j) {
        NodeProfile np;
        std::vector<std::size_t> path = e.at("node_path").get<std::vector<std::size_t>>();
        e.at("subset").get_to(np.subset);
        if (e.contains("weights")) e.at("weights").get_to(np.weights);
        if (e.contains("Q0")) np.q0 = e.at("Q0").get<std::size_t>();
        const std::string mode = e.value("mode", "subset");
        np.mode = mode == "full" ? PruneMode::full
                  : mode == "weighted" ? PruneMode::weighted
                                       : PruneMode::subset;
        p.nodes[std::move(path)] = std::move(np);
    }
}

enum class RankDirection { min, max };

namespace detail {

inline void select_by_rank_rec(const PlanNode& node, std::vector<std::size_t>& path,
                               std::size_t q0, RankDirection dir, PruningProfile& out) {
    if (node.is_bottom) return;
    // rank-based pruning applies where children carry ranks (the bottom layer)
    if (node.children.front().is_bottom) {
        if (q0 > node.children.size())
            throw std::invalid_argument("select_by_rank: Q_0 exceeds projection count");
        std::vector<std::size_t> idx(node.children.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return dir == RankDirection::min ? node.children[a].rank < node.children[b].rank
                                             : node.children[a].rank > node.children[b].rank;
        });
        NodeProfile np;
        np.mode = PruneMode::subset;
        np.q0 = q0;
        np.subset.assign(idx.begin(), idx.begin() + std::ptrdiff_t(q0));
        std::sort(np.subset.begin(), np.subset.end());
        out.nodes[path] = std::move(np);
        return;
    }
    for (std::size_t q = 0; q < node.children.size(); ++q) {
        path.push_back(q);
        select_by_rank_rec(node.children[q], path, q0, dir, out);
        path.pop_back();
    }
}

}  // namespace detail

/// Retain the Q_0 projections of smallest (min) or largest (max) bottom-layer
/// rank; ties break toward the lower z_q. Non-bottom levels stay full.
inline PruningProfile select_by_rank(const DecodingPlan& plan, std::size_t q0,
                                     RankDirection dir) {
    PruningProfile out;
    std::vector<std::size_t> path;
    detail::select_by_rank_rec(plan.root, path, q0, dir, out);
    return out;
}

/// Uniform random Q_0-subset at every non-bottom node, seeded.
inline PruningProfile select_random(const DecodingPlan& plan, std::size_t q0,
                                    std::uint64_t seed) {
    PruningProfile out;
    std::mt19937_64 rng(seed);
    std::vector<std::pair<std::vector<std::size_t>, const PlanNode*>> stack{{{}, &plan.root}};
    while (!stack.empty()) {
        auto [path, node] = stack.back();
        stack.pop_back();
        if (node->is_bottom) continue;
        if (q0 > node->children.size())
            throw std::invalid_argument("select_random: Q_0 exceeds projection count");
        std::vector<std::size_t> idx(node->children.size());
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < q0; ++i) {
            std::uniform_int_distribution<std::size_t> d(i, idx.size() - 1);
            std::swap(idx[i], idx[d(rng)]);
        }
        NodeProfile np;
        np.mode = PruneMode::subset;
        np.q0 = q0;
        np.subset.assign(idx.begin(), idx.begin() + std::ptrdiff_t(q0));
        std::sort(np.subset.begin(), np.subset.end());
        out.nodes[path] = std::move(np);
        for (std::size_t q = 0; q < node->children.size(); ++q) {
            auto child_path = path;
            child_path.push_back(q);
            stack.emplace_back(std::move(child_path), &node->children[q]);
        }
    }
    return out;
}

/// Differentiable top-k mask: entropic-regularized transport between the
/// (affinely normalized) scores and a two-bin keep/drop target, solved by
/// Sinkhorn fixed-point iteration in the log domain. Returns gamma in [0,1]^Q
/// with sum(gamma) = Q_0; as epsilon -> 0 it approaches the top-Q_0 indicator.
inline std::vector<double> soft_topk(const std::vector<double>& w, std::size_t q0,
                                     double epsilon) {
    if (epsilon <= 0) throw std::invalid_argument("soft_topk: epsilon must be positive");
    const std::size_t Q = w.size();
    if (q0 > Q) throw std::invalid_argument("soft_topk: Q_0 exceeds vector length");
    if (q0 == 0) return std::vector<double>(Q, 0.0);
    if (q0 == Q) return std::vector<double>(Q, 1.0);

    const double lo = *std::min_element(w.begin(), w.end());
    const double hi = *std::max_element(w.begin(), w.end());
    if (hi - lo < 1e-300) return std::vector<double>(Q, double(q0) / double(Q));

    // scores normalized to [0,1]; anchors at 1 (keep) and 0 (drop)
    // With two target bins the row-normalized plan is a logistic in a single
    // dual variable d: gamma_i = sigma(t_i + d) with t_i = (2 x_i - 1)/epsilon.
    // Alternating (Sinkhorn) scaling stalls once gamma saturates, so the
    // column-marginal fixed point sum_i gamma_i = Q_0 is solved for d directly
    // by bisection; the row marginals hold by construction.
    std::vector<double> t(Q);
    for (std::size_t i = 0; i < Q; ++i)
        t[i] = (2.0 * (w[i] - lo) / (hi - lo) - 1.0) / epsilon;

    auto sigma = [](double z) {
        return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    };
    auto keep_mass = [&](double d) {
        double s = 0;
        for (std::size_t i = 0; i < Q; ++i) s += sigma(t[i] + d);
        return s;
    };

    const double t_min = *std::min_element(t.begin(), t.end());
    const double t_max = *std::max_element(t.begin(), t.end());
    double d_lo = -t_max - 50.0, d_hi = -t_min + 50.0;  // keep_mass ~0 resp. ~Q
    const double target = double(q0);
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (d_lo + d_hi);
        (keep_mass(mid) < target ? d_lo : d_hi) = mid;
        if (d_hi - d_lo < 1e-14 * std::max(1.0, std::abs(d_lo))) break;
    }
    const double d = 0.5 * (d_lo + d_hi);
    if (std::abs(keep_mass(d) - target) > 1e-9)
        throw std::runtime_error("soft_topk: marginal fixed point did not converge");

    std::vector<double> gamma(Q);
    for (std::size_t i = 0; i < Q; ++i) gamma[i] = sigma(t[i] + d);
    return gamma;
}

}  // namespace rmsub

#endif  // RMSUB_PRUNE_HPP
