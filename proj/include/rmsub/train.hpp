#ifndef RMSUB_TRAIN_HPP
#define RMSUB_TRAIN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "rmsub/channel.hpp"
#include "rmsub/decode.hpp"
#include "rmsub/prune.hpp"

namespace rmsub {

struct TrainConfig {
    std::size_t batch_size = 128;
    double training_snr_db = 0.0;  // SNR := 1/(2 sigma^2), in dB
    std::size_t iterations = 2000;
    double learning_rate = 0.01;
    double topk_epsilon = 0.01;
    std::size_t q0 = 0;
    std::uint64_t seed = 1;
    double spsa_delta = 0.05;  // perturbation size of the gradient estimator

    void validate() const {
        if (batch_size == 0 || q0 == 0 || learning_rate < 0 || topk_epsilon <= 0 ||
            spsa_delta <= 0 || !std::isfinite(training_snr_db))
            throw std::invalid_argument("TrainConfig: invalid parameter");
    }
};

namespace detail {

inline void collect_weight_nodes(const PlanNode& node, std::vector<std::size_t>& path,
                                 std::vector<std::pair<std::vector<std::size_t>, std::size_t>>& out) {
    if (node.is_bottom) return;
    out.emplace_back(path, node.num_children());
    for (std::size_t q = 0; q < node.children.size(); ++q) {
        path.push_back(q);
        collect_weight_nodes(node.children[q], path, out);
        path.pop_back();
    }
}

inline std::vector<double> softmax(const std::vector<double>& theta) {
    const double mx = *std::max_element(theta.begin(), theta.end());
    std::vector<double> w(theta.size());
    double sum = 0;
    for (std::size_t i = 0; i < theta.size(); ++i) sum += (w[i] = std::exp(theta[i] - mx));
    for (double& v : w) v /= sum;
    return w;
}

inline double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace detail

/// Gradient search for projection weights: soft-subRPA with weighted
/// aggregation masked by the differentiable top-k, sigmoid cross-entropy loss
/// against the transmitted codeword, Adam updates. The descent direction comes
/// from simultaneous-perturbation (SPSA) estimates of the smoothed loss, which
/// avoids hand-deriving the reverse-mode pass while remaining unbiased for it.
/// Returns a profile carrying both the weight vectors and the top-Q_0 subsets.
inline PruningProfile train_weights(const DecodingPlan& plan, const TrainConfig& cfg) {
    cfg.validate();
    // simplex parameterization: w = softmax(theta), per weight-bearing node
    std::vector<std::pair<std::vector<std::size_t>, std::size_t>> nodes;
    std::vector<std::size_t> path;
    detail::collect_weight_nodes(plan.root, path, nodes);
    if (nodes.empty()) throw std::invalid_argument("train_weights: plan has no projections");

    std::vector<std::vector<double>> theta;
    for (const auto& [p, q] : nodes) {
        if (cfg.q0 > q) throw std::invalid_argument("train_weights: Q_0 exceeds projection count");
        theta.emplace_back(q, 0.0);  // w_0 = (1/Q, ..., 1/Q)
    }

    const double snr = std::pow(10.0, cfg.training_snr_db / 10.0);
    const double sigma = std::sqrt(1.0 / (2.0 * snr));
    const BinMatrix& gen = plan.root.gen;
    const std::size_t k = gen.rows();
    std::mt19937_64 rng(cfg.seed);

    auto make_profile = [&](const std::vector<std::vector<double>>& th) {
        PruningProfile prof;
        for (std::size_t ni = 0; ni < nodes.size(); ++ni) {
            const std::vector<double> w = detail::softmax(th[ni]);
            const std::vector<double> gamma = soft_topk(w, cfg.q0, cfg.topk_epsilon);
            std::vector<double> u(w.size());
            double sum = 0;
            for (std::size_t i = 0; i < w.size(); ++i) sum += (u[i] = gamma[i] * w[i]);
            for (double& v : u) v /= sum;
            NodeProfile np;
            np.mode = PruneMode::weighted;
            np.weights = std::move(u);
            np.q0 = cfg.q0;
            prof.nodes[nodes[ni].first] = std::move(np);
        }
        return prof;
    };

    struct Sample {
        BinVector codeword;
        LlrVector llr;
    };
    auto batch_loss = [&](const PruningProfile& prof, const std::vector<Sample>& batch) {
        double loss = 0;
        for (const auto& s : batch) {
            const DecodeResult res = soft_subrpa_decode(s.llr, plan, prof, 3);
            double item = 0;
            for (std::size_t j = 0; j < res.final_llr.size(); ++j) {
                const double sgn = s.codeword.get(j) ? -1.0 : 1.0;
                item += detail::softplus(-sgn * res.final_llr[j]);
            }
            loss += item / double(res.final_llr.size());
        }
        return loss / double(batch.size());
    };

    // Adam state
    std::vector<std::vector<double>> m_adam, v_adam;
    for (const auto& t : theta) {
        m_adam.emplace_back(t.size(), 0.0);
        v_adam.emplace_back(t.size(), 0.0);
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;

    for (std::size_t it = 1; it <= cfg.iterations; ++it) {
        std::vector<Sample> batch(cfg.batch_size);
        for (auto& s : batch) {
            BinVector msg(k);
            for (std::size_t i = 0; i < k; ++i) msg.set(i, rng() & 1u);
            s.codeword = gf2_matvec(gen, msg);
            s.llr = awgn_llr(s.codeword, sigma, rng);
        }
        // Rademacher simultaneous perturbation, shared batch for both probes
        std::vector<std::vector<double>> delta = theta, plus = theta, minus = theta;
        for (std::size_t ni = 0; ni < theta.size(); ++ni)
            for (std::size_t i = 0; i < theta[ni].size(); ++i) {
                delta[ni][i] = (rng() & 1u) ? 1.0 : -1.0;
                plus[ni][i] = theta[ni][i] + cfg.spsa_delta * delta[ni][i];
                minus[ni][i] = theta[ni][i] - cfg.spsa_delta * delta[ni][i];
            }
        const double lp = batch_loss(make_profile(plus), batch);
        const double lm = batch_loss(make_profile(minus), batch);
        if (!std::isfinite(lp) || !std::isfinite(lm)) {
            std::ostringstream msg;
            msg << "train_weights: non-finite loss at iteration " << it << " (L+ = " << lp
                << ", L- = " << lm << ", snr_db = " << cfg.training_snr_db << ")";
            throw std::runtime_error(msg.str());
        }
        const double scale = (lp - lm) / (2.0 * cfg.spsa_delta);
        for (std::size_t ni = 0; ni < theta.size(); ++ni)
            for (std::size_t i = 0; i < theta[ni].size(); ++i) {
                const double g = scale * delta[ni][i];
                m_adam[ni][i] = beta1 * m_adam[ni][i] + (1 - beta1) * g;
                v_adam[ni][i] = beta2 * v_adam[ni][i] + (1 - beta2) * g * g;
                const double mh = m_adam[ni][i] / (1 - std::pow(beta1, double(it)));
                const double vh = v_adam[ni][i] / (1 - std::pow(beta2, double(it)));
                theta[ni][i] -= cfg.learning_rate * mh / (std::sqrt(vh) + adam_eps);
            }
    }

    // final profile: converged weights plus the fixed top-Q_0 subsets
    PruningProfile out;
    for (std::size_t ni = 0; ni < nodes.size(); ++ni) {
        const std::vector<double> w = detail::softmax(theta[ni]);
        std::vector<std::size_t> idx(w.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
        NodeProfile np;
        np.mode = PruneMode::weighted;
        np.weights = w;
        np.q0 = cfg.q0;
        np.subset.assign(idx.begin(), idx.begin() + std::ptrdiff_t(cfg.q0));
        std::sort(np.subset.begin(), np.subset.end());
        out.nodes[nodes[ni].first] = std::move(np);
    }
    return out;
}

/// The trained profile restricted to its subsets, for pruned inference.
inline PruningProfile as_subset_profile(const PruningProfile& trained) {
    PruningProfile out;
    for (const auto& [p, np] : trained.nodes) {
        NodeProfile s;
        s.mode = PruneMode::subset;
        s.subset = np.subset;
        s.q0 = np.q0;
        out.nodes[p] = std::move(s);
    }
    return out;
}

}  // namespace rmsub

#endif  // RMSUB_TRAIN_HPP
