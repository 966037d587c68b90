#ifndef RMSUB_PROJECTION_HPP
#define RMSUB_PROJECTION_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "rmsub/construct.hpp"
#include "rmsub/gf2.hpp"

namespace rmsub {

using LlrVector = std::vector<double>;

/// Subspace of F_2^m given by s independent basis vectors (integer masks).
/// Decoders use s=1, where the basis is the single nonzero z_q.
struct Subspace {
    std::size_t m = 0;
    std::vector<std::size_t> basis;

    std::size_t dim() const { return basis.size(); }

    /// All 2^s elements of the span.
    std::vector<std::size_t> span() const {
        std::vector<std::size_t> el{0};
        for (std::size_t b : basis) {
            const std::size_t sz = el.size();
            for (std::size_t i = 0; i < sz; ++i) el.push_back(el[i] ^ b);
        }
        return el;
    }

    void validate() const {
        if (basis.empty()) throw std::invalid_argument("Subspace: need s >= 1");
        auto el = span();
        std::sort(el.begin(), el.end());
        if (el.front() != 0 || std::adjacent_find(el.begin(), el.end()) != el.end() ||
            el.back() >= (std::size_t(1) << m))
            throw std::invalid_argument("Subspace: basis not independent or out of range");
    }
};

/// Partition of F_2^m into the 2^{m-s} cosets z + B, ordered by minimum member.
struct CosetMap {
    std::size_t n_cosets = 0;
    std::vector<std::uint32_t> coset_of;            // per z, its coset index
    std::vector<std::vector<std::size_t>> members;  // per coset, its 2^s points

    static CosetMap build(const Subspace& B) {
        B.validate();
        const std::size_t n = std::size_t(1) << B.m;
        const auto sp = B.span();
        CosetMap cm;
        cm.coset_of.assign(n, std::uint32_t(-1));
        for (std::size_t z = 0; z < n; ++z) {
            if (cm.coset_of[z] != std::uint32_t(-1)) continue;
            const auto idx = std::uint32_t(cm.members.size());
            std::vector<std::size_t> mem;
            for (std::size_t b : sp) mem.push_back(z ^ b);
            std::sort(mem.begin(), mem.end());
            for (std::size_t p : mem) cm.coset_of[p] = idx;
            cm.members.push_back(std::move(mem));
        }
        cm.n_cosets = cm.members.size();
        return cm;
    }
};

/// The 2^m - 1 one-dimensional subspaces, ordered by the integer value of z_q.
inline std::vector<Subspace> one_dim_subspaces(std::size_t m) {
    if (m < 1) throw std::invalid_argument("one_dim_subspaces: need m >= 1");
    std::vector<Subspace> out;
    for (std::size_t zq = 1; zq < (std::size_t(1) << m); ++zq)
        out.push_back(Subspace{m, {zq}});
    return out;
}

/// Coset-wise XOR of the channel hard output.
inline BinVector project_hard(const BinVector& y, const Subspace& B) {
    if (y.size() != (std::size_t(1) << B.m))
        throw std::invalid_argument("project_hard: length must be 2^m");
    const CosetMap cm = CosetMap::build(B);
    BinVector out(cm.n_cosets);
    for (std::size_t t = 0; t < cm.n_cosets; ++t) {
        bool acc = false;
        for (std::size_t z : cm.members[t]) acc ^= y.get(z);
        out.set(t, acc);
    }
    return out;
}

/// Boxplus of two LLRs: the LLR of the XOR of the two underlying bits.
/// Stable form of ln(e^{a+b}+1) - ln(e^a+e^b).
inline double llr_boxplus(double a, double b) {
    constexpr double kClamp = 1.0 - 1e-12;
    double t = std::tanh(a / 2.0) * std::tanh(b / 2.0);
    if (t > kClamp) t = kClamp;
    if (t < -kClamp) t = -kClamp;
    return 2.0 * std::atanh(t);
}

/// Coset-wise LLR combination for a 1-D subspace.
inline LlrVector project_llr(const LlrVector& l, const Subspace& B) {
    if (B.dim() != 1) throw std::invalid_argument("project_llr: 1-D subspaces only");
    if (l.size() != (std::size_t(1) << B.m))
        throw std::invalid_argument("project_llr: length must be 2^m");
    for (double v : l)
        if (!std::isfinite(v)) throw std::invalid_argument("project_llr: non-finite LLR");
    const std::size_t zq = B.basis[0];
    const std::size_t n = l.size();
    LlrVector out;
    out.reserve(n / 2);
    for (std::size_t z = 0; z < n; ++z)
        if (z < (z ^ zq)) out.push_back(llr_boxplus(l[z], l[z ^ zq]));
    return out;
}

/// Merge generator columns within each coset (GF(2) column sums).
inline BinMatrix project_generator(const BinMatrix& gen, const Subspace& B) {
    if (gen.cols() != (std::size_t(1) << B.m))
        throw std::invalid_argument("project_generator: column count must be 2^m");
    const CosetMap cm = CosetMap::build(B);
    BinMatrix out(gen.rows(), cm.n_cosets);
    for (std::size_t i = 0; i < gen.rows(); ++i)
        for (std::size_t t = 0; t < cm.n_cosets; ++t) {
            bool acc = false;
            for (std::size_t z : cm.members[t]) acc ^= gen.get(i, z);
            out.set(i, t, acc);
        }
    return out;
}

/// Node of the precomputed recursive projection tree. Children are the full
/// set of 1-D projections at this level (pruning is applied at decode time).
struct PlanNode {
    std::size_t m_local = 0;  // code length is 2^m_local
    std::size_t depth = 0;    // 0 at the root
    BinMatrix gen;
    // child q projects onto span{z_q} with z_q = q+1 (integer order)
    std::vector<std::vector<std::uint32_t>> child_coset_of;
    std::vector<PlanNode> children;
    bool is_bottom = false;
    // bottom-layer payload
    std::size_t rank = 0;
    Codebook cb;
    std::vector<double> codebook_pm;            // 2^rank x n', entries 1-2c
    std::vector<std::vector<std::uint16_t>> delta;  // per column, pivot indices with a 1

    std::size_t length() const { return std::size_t(1) << m_local; }
    std::size_t num_children() const { return length() - 1; }
};

struct DecodingPlan {
    GeneratorSpec spec;
    std::size_t order = 0;  // r; the tree has r-1 levels of projections
    PlanNode root;
};

namespace detail {

inline void build_node(PlanNode& node, std::size_t bottom_depth, std::size_t cap) {
    if (node.depth == bottom_depth) {
        node.is_bottom = true;
        node.cb = enumerate_codebook(node.gen, cap);
        node.rank = node.cb.rank;
        const std::size_t count = std::size_t(1) << node.rank;
        const std::size_t np = node.length();
        node.codebook_pm.resize(count * np);
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t j = 0; j < np; ++j)
                node.codebook_pm[i * np + j] = node.cb.codebook.get(i, j) ? -1.0 : 1.0;
        node.delta.resize(np);
        for (std::size_t j = 0; j < np; ++j)
            for (std::size_t b = 0; b < node.rank; ++b)
                if (node.gen.get(node.cb.pivot_rows[b], j))
                    node.delta[j].push_back(std::uint16_t(b));
        return;
    }
    const std::size_t n = node.length();
    node.children.reserve(n - 1);
    node.child_coset_of.reserve(n - 1);
    for (std::size_t zq = 1; zq < n; ++zq) {
        const Subspace B{node.m_local, {zq}};
        const CosetMap cm = CosetMap::build(B);
        PlanNode child;
        child.m_local = node.m_local - 1;
        child.depth = node.depth + 1;
        child.gen = project_generator(node.gen, B);
        node.child_coset_of.push_back(cm.coset_of);
        node.children.push_back(std::move(child));
        build_node(node.children.back(), bottom_depth, cap);
    }
}

}  // namespace detail

/// Full projection tree down to depth r-1, with bottom-layer codebooks,
/// information patterns, and per-column parity structure precomputed.
inline DecodingPlan build_plan(const GeneratorSpec& spec,
                               std::size_t cap = kDefaultEnumerationCap) {
    spec.validate();
    DecodingPlan plan;
    plan.spec = spec;
    plan.order = std::max<std::size_t>(spec.order(), 1);
    plan.root.m_local = spec.m;
    plan.root.depth = 0;
    plan.root.gen = subcode_generator(spec);
    detail::build_node(plan.root, plan.order - 1, cap);
    return plan;
}

inline std::size_t count_bottom_nodes(const PlanNode& node) {
    if (node.is_bottom) return 1;
    std::size_t c = 0;
    for (const auto& ch : node.children) c += count_bottom_nodes(ch);
    return c;
}

/// Ranks of the direct children (bottom layer of an order-2 plan).
inline std::vector<std::size_t> child_ranks(const PlanNode& node) {
    std::vector<std::size_t> r;
    for (const auto& ch : node.children) r.push_back(ch.rank);
    return r;
}

namespace detail {

inline nlohmann::json node_summary(const PlanNode& node) {
    nlohmann::json j;
    j["length"] = node.length();
    if (node.is_bottom) {
        j["rank"] = node.rank;
    } else {
        nlohmann::json kids = nlohmann::json::array();
        for (std::size_t q = 0; q < node.children.size(); ++q) {
            nlohmann::json kj = node_summary(node.children[q]);
            kj["z_q"] = q + 1;
            kids.push_back(std::move(kj));
        }
        j["projections"] = std::move(kids);
    }
    return j;
}

}  // namespace detail

/// Per-node subspace and rank profile, for CLI inspection.
inline nlohmann::json plan_summary(const DecodingPlan& plan) {
    nlohmann::json j;
    j["spec"] = plan.spec;
    j["order"] = plan.order;
    j["bottom_nodes"] = count_bottom_nodes(plan.root);
    j["tree"] = detail::node_summary(plan.root);
    return j;
}

}  // namespace rmsub

#endif  // RMSUB_PROJECTION_HPP
