#ifndef RMSUB_CHANNEL_HPP
#define RMSUB_CHANNEL_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "rmsub/gf2.hpp"
#include "rmsub/projection.hpp"

namespace rmsub {

enum class ChannelKind { awgn, bsc };

/// SNR := 1/(2 sigma^2); Eb/N0 := n/(2 k sigma^2).
struct ChannelConfig {
    ChannelKind kind = ChannelKind::awgn;
    double sigma = 1.0;      // awgn noise std-dev
    double crossover = 0.0;  // bsc flip probability

    static ChannelConfig awgn_from_sigma(double sigma) {
        if (sigma <= 0) throw std::invalid_argument("ChannelConfig: sigma must be positive");
        return {ChannelKind::awgn, sigma, 0.0};
    }
    static ChannelConfig awgn_from_snr_db(double snr_db) {
        const double snr = std::pow(10.0, snr_db / 10.0);
        return awgn_from_sigma(std::sqrt(1.0 / (2.0 * snr)));
    }
    static ChannelConfig awgn_from_ebn0_db(double ebn0_db, std::size_t n, std::size_t k) {
        const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
        return awgn_from_sigma(std::sqrt(double(n) / (2.0 * double(k) * ebn0)));
    }
    static ChannelConfig bsc(double p) {
        if (p < 0 || p > 0.5) throw std::invalid_argument("ChannelConfig: need 0 <= p <= 1/2");
        return {ChannelKind::bsc, 1.0, p};
    }

    double snr_db() const { return 10.0 * std::log10(1.0 / (2.0 * sigma * sigma)); }
    double ebn0_db(std::size_t n, std::size_t k) const {
        return 10.0 * std::log10(double(n) / (2.0 * double(k) * sigma * sigma));
    }
};

/// BPSK + AWGN: y = (1-2c) + N(0, sigma^2), l = 2y/sigma^2.
inline LlrVector awgn_llr(const BinVector& c, double sigma, std::mt19937_64& rng) {
    if (sigma <= 0) throw std::invalid_argument("awgn_llr: sigma must be positive");
    std::normal_distribution<double> noise(0.0, sigma);
    LlrVector l(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) {
        const double s = c.get(j) ? -1.0 : 1.0;
        l[j] = 2.0 * (s + noise(rng)) / (sigma * sigma);
    }
    return l;
}

inline BinVector bsc_output(const BinVector& c, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution flip(p);
    BinVector y(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) y.set(j, c.get(j) ^ flip(rng));
    return y;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Counter-based per-trial stream: identical across decoders and independent
/// of scheduling, so paired-seed comparisons and threading are bit-exact.
inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t point, std::uint64_t trial) {
    std::uint64_t s = detail::splitmix64(seed);
    s = detail::splitmix64(s ^ (point * 0x9e3779b97f4a7c15ULL));
    s = detail::splitmix64(s ^ trial);
    return std::mt19937_64(s);
}

}  // namespace rmsub

#endif  // RMSUB_CHANNEL_HPP
