#ifndef RMSUB_SIM_HPP
#define RMSUB_SIM_HPP

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rmsub/channel.hpp"
#include "rmsub/decode.hpp"
#include "rmsub/prune.hpp"

namespace rmsub {

enum class DecoderKind { map, subrpa, soft_subrpa, soft_subrpa_logsum };

inline std::string decoder_name(DecoderKind d) {
    switch (d) {
        case DecoderKind::map: return "map";
        case DecoderKind::subrpa: return "subrpa";
        case DecoderKind::soft_subrpa: return "soft-subrpa";
        case DecoderKind::soft_subrpa_logsum: return "soft-subrpa-logsum";
    }
    return "?";
}

struct SimPoint {
    double ebn0_db = 0, snr_db = 0, sigma = 0;
    std::uint64_t trials = 0, block_errors = 0, bit_errors = 0;
    double seconds = 0;

    double bler() const { return trials ? double(block_errors) / double(trials) : 0.0; }
    double ber(std::size_t n) const {
        return trials ? double(bit_errors) / (double(trials) * double(n)) : 0.0;
    }
    /// Monte-Carlo standard error of the BLER estimate.
    double bler_se() const {
        if (!trials) return 0.0;
        const double p = bler();
        return std::sqrt(std::max(p * (1.0 - p), 1e-300) / double(trials));
    }
};

struct SimReport {
    GeneratorSpec spec;
    std::string decoder;
    std::string pruning;
    std::size_t q0 = 0;
    std::uint64_t seed = 0;
    std::vector<SimPoint> points;
};

inline constexpr const char* kCsvHeader =
    "ebn0_db,snr_db,sigma,decoder,pruning,q0,trials,block_errors,bler,bit_errors,ber,seconds";

inline void write_csv(std::ostream& os, const std::vector<SimReport>& reports,
                      bool with_header = true) {
    if (with_header) os << kCsvHeader << "\n";
    for (const auto& rep : reports) {
        const std::size_t n = std::size_t(1) << rep.spec.m;
        for (const auto& p : rep.points) {
            os << p.ebn0_db << ',' << p.snr_db << ',' << p.sigma << ',' << rep.decoder << ','
               << rep.pruning << ',' << rep.q0 << ',' << p.trials << ',' << p.block_errors << ','
               << p.bler() << ',' << p.bit_errors << ',' << p.ber(n) << ',' << p.seconds << "\n";
        }
    }
}

struct SimOptions {
    std::size_t n_max = 3;
    std::uint64_t max_block_errors = 0;  // 0 = run all trials
    std::size_t threads = 0;             // 0 = RMSUB_THREADS or hardware default
};

namespace detail {

inline std::size_t worker_count(std::size_t requested) {
    if (requested) return requested;
    if (const char* env = std::getenv("RMSUB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return std::size_t(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

struct TrialCounts {
    std::uint64_t blocks = 0, bits = 0;
};

/// Runs trials [begin, end) of one grid point; per-trial RNG streams make the
/// result independent of the partitioning.
template <typename DecodeFn>
TrialCounts run_trials(const BinMatrix& gen, double sigma, std::uint64_t seed,
                       std::uint64_t point, std::uint64_t begin, std::uint64_t end,
                       DecodeFn&& decode) {
    TrialCounts counts;
    const std::size_t k = gen.rows();
    for (std::uint64_t t = begin; t < end; ++t) {
        std::mt19937_64 rng = trial_rng(seed, point, t);
        BinVector msg(k);
        for (std::size_t i = 0; i < k; ++i) msg.set(i, rng() & 1u);
        const BinVector cw = gf2_matvec(gen, msg);
        const LlrVector l = awgn_llr(cw, sigma, rng);
        const BinVector dec = decode(l);
        std::size_t bit_err = 0;
        for (std::size_t j = 0; j < cw.size(); ++j) bit_err += dec.get(j) != cw.get(j);
        if (bit_err) {
            ++counts.blocks;
            counts.bits += bit_err;
        }
    }
    return counts;
}

template <typename DecodeFn>
SimPoint run_point(const BinMatrix& gen, double ebn0_db, std::size_t n, std::size_t k,
                   std::uint64_t trials, std::uint64_t seed, std::uint64_t point,
                   const SimOptions& opt, DecodeFn&& decode) {
    const ChannelConfig ch = ChannelConfig::awgn_from_ebn0_db(ebn0_db, n, k);
    SimPoint sp;
    sp.ebn0_db = ebn0_db;
    sp.snr_db = ch.snr_db();
    sp.sigma = ch.sigma;
    const auto t0 = std::chrono::steady_clock::now();

    const std::size_t workers = worker_count(opt.threads);
    std::uint64_t done = 0;
    const std::uint64_t batch = opt.max_block_errors ? std::max<std::uint64_t>(workers * 256, 1024)
                                                     : trials;
    while (done < trials) {
        const std::uint64_t chunk_end = std::min(trials, done + batch);
        if (workers <= 1 || chunk_end - done < 2 * workers) {
            const TrialCounts c = run_trials(gen, ch.sigma, seed, point, done, chunk_end, decode);
            sp.block_errors += c.blocks;
            sp.bit_errors += c.bits;
        } else {
            std::vector<TrialCounts> parts(workers);
            std::vector<std::thread> pool;
            const std::uint64_t span = chunk_end - done;
            for (std::size_t w = 0; w < workers; ++w) {
                const std::uint64_t b = done + span * w / workers;
                const std::uint64_t e = done + span * (w + 1) / workers;
                pool.emplace_back([&, w, b, e] {
                    parts[w] = run_trials(gen, ch.sigma, seed, point, b, e, decode);
                });
            }
            for (auto& th : pool) th.join();
            for (const auto& c : parts) {
                sp.block_errors += c.blocks;
                sp.bit_errors += c.bits;
            }
        }
        done = chunk_end;
        if (opt.max_block_errors && sp.block_errors >= opt.max_block_errors) break;
    }
    sp.trials = done;
    sp.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sp;
}

}  // namespace detail

/// Monte-Carlo BLER/BER over an Eb/N0 grid. Paired comparisons across decoders
/// come for free: the per-trial RNG stream depends only on (seed, point, trial).
inline SimReport run_bler(const DecodingPlan& plan, DecoderKind decoder,
                          const PruningProfile& profile, const std::vector<double>& ebn0_grid,
                          std::uint64_t trials, std::uint64_t seed, const SimOptions& opt = {},
                          const std::string& pruning_label = "full", std::size_t q0 = 0) {
    const std::size_t n = std::size_t(1) << plan.spec.m;
    const std::size_t k = plan.spec.k;
    const BinMatrix gen = plan.root.gen;

    SimReport rep;
    rep.spec = plan.spec;
    rep.decoder = decoder_name(decoder);
    rep.pruning = pruning_label;
    rep.q0 = q0;
    rep.seed = seed;

    std::optional<CosetFhtMap> fast_map;
    std::optional<Codebook> cb;
    if (decoder == DecoderKind::map) {
        if (plan.order <= 2 && (plan.order != 1 || k == rm_dimension(plan.spec.m, 1)))
            fast_map.emplace(plan.spec);
        else
            cb.emplace(enumerate_codebook(gen));
    }

    auto decode = [&](const LlrVector& l) -> BinVector {
        switch (decoder) {
            case DecoderKind::map:
                return fast_map ? fast_map->decode(l) : map_decode(l, cb->codebook).codeword;
            case DecoderKind::subrpa:
                return subrpa_decode(l, plan, profile, opt.n_max).codeword;
            case DecoderKind::soft_subrpa:
                return soft_subrpa_decode(l, plan, profile, opt.n_max, AggregationRule::soft)
                    .codeword;
            case DecoderKind::soft_subrpa_logsum:
                return soft_subrpa_decode(l, plan, profile, opt.n_max, AggregationRule::logsum)
                    .codeword;
        }
        throw std::logic_error("unreachable");
    };

    for (std::size_t p = 0; p < ebn0_grid.size(); ++p)
        rep.points.push_back(
            detail::run_point(gen, ebn0_grid[p], n, k, trials, seed, p, opt, decode));
    return rep;
}

/// Time-sharing baseline: an RM(m,2) block in alpha portion of the time and an
/// RM(m,1) block in the rest, both MAP-decoded; the TS block errs if either
/// constituent errs. Eb/N0 is referenced to the effective rate.
inline SimReport time_sharing_bler(std::size_t m, double alpha,
                                   const std::vector<double>& ebn0_grid, std::uint64_t trials,
                                   std::uint64_t seed, const SimOptions& opt = {}) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("time_sharing_bler: alpha must lie in [0,1]");
    const std::size_t n = std::size_t(1) << m;
    const std::size_t k2 = rm_dimension(m, 2), k1 = rm_dimension(m, 1);
    const double k_eff = alpha * double(k2) + (1.0 - alpha) * double(k1);

    GeneratorSpec spec2{m, k2, extra_row_candidates(m, 2)};
    GeneratorSpec spec1{m, k1, extra_row_candidates(m, 1)};
    const BinMatrix gen2 = subcode_generator(spec2);
    const BinMatrix gen1 = subcode_generator(spec1);
    const CosetFhtMap map2(spec2);

    SimReport rep;
    rep.spec = GeneratorSpec{m, std::size_t(std::lround(k_eff)), {}};
    rep.decoder = "map";
    rep.pruning = "time-sharing";
    rep.seed = seed;

    for (std::size_t p = 0; p < ebn0_grid.size(); ++p) {
        const double ebn0 = std::pow(10.0, ebn0_grid[p] / 10.0);
        const double sigma = std::sqrt(double(n) / (2.0 * k_eff * ebn0));
        SimPoint sp;
        sp.ebn0_db = ebn0_grid[p];
        sp.sigma = sigma;
        sp.snr_db = 10.0 * std::log10(1.0 / (2.0 * sigma * sigma));
        const auto t0 = std::chrono::steady_clock::now();
        for (std::uint64_t t = 0; t < trials; ++t) {
            std::mt19937_64 rng = trial_rng(seed, p, t);
            BinVector msg2(k2), msg1(k1);
            for (std::size_t i = 0; i < k2; ++i) msg2.set(i, rng() & 1u);
            for (std::size_t i = 0; i < k1; ++i) msg1.set(i, rng() & 1u);
            const BinVector cw2 = gf2_matvec(gen2, msg2);
            const BinVector cw1 = gf2_matvec(gen1, msg1);
            const LlrVector l2 = awgn_llr(cw2, sigma, rng);
            const LlrVector l1 = awgn_llr(cw1, sigma, rng);
            std::size_t bit_err = 0;
            const BinVector d2 = map2.decode(l2);
            for (std::size_t j = 0; j < n; ++j) bit_err += d2.get(j) != cw2.get(j);
            const BinVector d1 = fht_map_rm1(l1, m).codeword;
            for (std::size_t j = 0; j < n; ++j) bit_err += d1.get(j) != cw1.get(j);
            if (bit_err) {
                ++sp.block_errors;
                sp.bit_errors += bit_err;
            }
            sp.trials = t + 1;
            if (opt.max_block_errors && sp.block_errors >= opt.max_block_errors &&
                (t + 1) % 1024 == 0)
                break;
        }
        sp.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.points.push_back(sp);
    }
    return rep;
}

/// Alpha hitting a target rate k_target/2^m by mixing RM(m,2) and RM(m,1).
inline double time_sharing_alpha(std::size_t m, std::size_t k_target) {
    const double k2 = double(rm_dimension(m, 2)), k1 = double(rm_dimension(m, 1));
    const double alpha = (double(k_target) - k1) / (k2 - k1);
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("time_sharing_alpha: rate target unreachable");
    return alpha;
}

/// Log-linear interpolation of the Eb/N0 at which a BLER curve crosses the
/// target; the grid must bracket the target somewhere.
inline double ebn0_at_bler(const std::vector<SimPoint>& points, double target) {
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double b0 = points[i - 1].bler(), b1 = points[i].bler();
        if (b0 >= target && b1 <= target && b0 > 0 && b1 > 0 && b0 != b1) {
            const double t = (std::log(target) - std::log(b0)) / (std::log(b1) - std::log(b0));
            return points[i - 1].ebn0_db + t * (points[i].ebn0_db - points[i - 1].ebn0_db);
        }
    }
    throw std::runtime_error("ebn0_at_bler: target BLER not bracketed by the grid");
}

}  // namespace rmsub

#endif  // RMSUB_SIM_HPP
