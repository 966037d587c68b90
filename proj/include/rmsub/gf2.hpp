#ifndef RMSUB_GF2_HPP
#define RMSUB_GF2_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmsub {

/// Dense GF(2) vector. Entries are 0/1; storage is packed 64-bit words.
class BinVector {
public:
    BinVector() = default;
    explicit BinVector(std::size_t len) : len_(len), words_((len + 63) / 64, 0) {}

    static BinVector from_bits(const std::vector<int>& bits) {
        BinVector v(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) v.set(i, bits[i] != 0);
        return v;
    }

    std::size_t size() const { return len_; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool b) {
        const std::uint64_t mask = std::uint64_t(1) << (i & 63);
        if (b) words_[i >> 6] |= mask; else words_[i >> 6] &= ~mask;
    }
    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t(1) << (i & 63); }

    void xor_with(const BinVector& other) {
        if (other.len_ != len_) throw std::invalid_argument("BinVector::xor_with: length mismatch");
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    }

    std::size_t weight() const {
        std::size_t c = 0;
        for (auto w : words_) c += std::size_t(std::popcount(w));
        return c;
    }

    bool operator==(const BinVector& o) const { return len_ == o.len_ && words_ == o.words_; }
    bool operator!=(const BinVector& o) const { return !(*this == o); }

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    std::size_t len_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Dense GF(2) matrix, row-major, rows packed into 64-bit words.
class BinMatrix {
public:
    BinMatrix() = default;
    BinMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_((cols + 63) / 64), words_(rows * stride_, 0) {
        if (rows == 0 || cols == 0) throw std::invalid_argument("BinMatrix: empty dimensions");
    }

    static BinMatrix from_rows(const std::vector<std::vector<int>>& r) {
        BinMatrix m(r.size(), r.at(0).size());
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (r[i].size() != m.cols_) throw std::invalid_argument("BinMatrix::from_rows: ragged rows");
            for (std::size_t j = 0; j < m.cols_; ++j) m.set(i, j, r[i][j] != 0);
        }
        return m;
    }

    static BinMatrix identity(std::size_t n) {
        BinMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t stride() const { return stride_; }

    bool get(std::size_t i, std::size_t j) const {
        return (words_[i * stride_ + (j >> 6)] >> (j & 63)) & 1u;
    }
    void set(std::size_t i, std::size_t j, bool b) {
        const std::uint64_t mask = std::uint64_t(1) << (j & 63);
        std::uint64_t& w = words_[i * stride_ + (j >> 6)];
        if (b) w |= mask; else w &= ~mask;
    }

    const std::uint64_t* row_words(std::size_t i) const { return words_.data() + i * stride_; }
    std::uint64_t* row_words(std::size_t i) { return words_.data() + i * stride_; }

    void row_xor(std::size_t dst, std::size_t src) {
        std::uint64_t* d = row_words(dst);
        const std::uint64_t* s = row_words(src);
        for (std::size_t w = 0; w < stride_; ++w) d[w] ^= s[w];
    }

    BinVector row(std::size_t i) const {
        BinVector v(cols_);
        for (std::size_t j = 0; j < cols_; ++j) v.set(j, get(i, j));
        return v;
    }
    void set_row(std::size_t i, const BinVector& v) {
        if (v.size() != cols_) throw std::invalid_argument("BinMatrix::set_row: length mismatch");
        for (std::size_t j = 0; j < cols_; ++j) set(i, j, v.get(j));
    }

    std::size_t row_weight(std::size_t i) const {
        std::size_t c = 0;
        const std::uint64_t* r = row_words(i);
        for (std::size_t w = 0; w < stride_; ++w) c += std::size_t(std::popcount(r[w]));
        return c;
    }

    BinMatrix transpose() const {
        BinMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (get(i, j)) t.set(j, i, true);
        return t;
    }

    bool operator==(const BinMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && words_ == o.words_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0, stride_ = 0;
    std::vector<std::uint64_t> words_;
};

/// base^{⊗m}; dimensions (rows^m, cols^m).
inline BinMatrix kronecker_power(const BinMatrix& base, std::size_t m) {
    if (m < 1) throw std::invalid_argument("kronecker_power: m must be >= 1");
    std::size_t r = 1, c = 1;
    for (std::size_t i = 0; i < m; ++i) {
        if (r > (std::size_t(1) << 40) / base.rows() || c > (std::size_t(1) << 40) / base.cols())
            throw std::overflow_error("kronecker_power: dimensions overflow");
        r *= base.rows();
        c *= base.cols();
    }
    BinMatrix out = base;
    for (std::size_t step = 1; step < m; ++step) {
        BinMatrix next(out.rows() * base.rows(), out.cols() * base.cols());
        for (std::size_t i = 0; i < out.rows(); ++i)
            for (std::size_t j = 0; j < out.cols(); ++j)
                if (out.get(i, j))
                    for (std::size_t bi = 0; bi < base.rows(); ++bi)
                        for (std::size_t bj = 0; bj < base.cols(); ++bj)
                            if (base.get(bi, bj))
                                next.set(i * base.rows() + bi, j * base.cols() + bj, true);
        out = std::move(next);
    }
    return out;
}

/// The 2x2 kernel [[1,0],[1,1]] whose Kronecker powers generate RM codes.
inline BinMatrix rm_kernel() { return BinMatrix::from_rows({{1, 0}, {1, 1}}); }

struct RrefResult {
    std::size_t rank = 0;
    BinMatrix rref;
    std::vector<std::size_t> pivot_rows;  // lexicographically-first independent row subset
};

/// Gaussian elimination over GF(2). pivot_rows is the greedy scan in row order:
/// a row joins the pivot set iff it is independent of all earlier pivot rows.
inline RrefResult rank_and_rref(const BinMatrix& mat) {
    const std::size_t stride = mat.stride();
    RrefResult res;
    res.rref = BinMatrix(mat.rows(), mat.cols());

    // echelon rows with their pivot columns, in pivot-column order
    std::vector<std::vector<std::uint64_t>> basis;
    std::vector<std::size_t> pivot_cols;
    std::vector<std::uint64_t> tmp(stride);

    auto first_set = [&](const std::vector<std::uint64_t>& w) -> std::size_t {
        for (std::size_t k = 0; k < stride; ++k)
            if (w[k]) return k * 64 + std::size_t(std::countr_zero(w[k]));
        return mat.cols();
    };

    for (std::size_t i = 0; i < mat.rows(); ++i) {
        const std::uint64_t* r = mat.row_words(i);
        std::copy(r, r + stride, tmp.begin());
        for (std::size_t b = 0; b < basis.size(); ++b) {
            const std::size_t pc = pivot_cols[b];
            if ((tmp[pc >> 6] >> (pc & 63)) & 1u)
                for (std::size_t w = 0; w < stride; ++w) tmp[w] ^= basis[b][w];
        }
        const std::size_t pc = first_set(tmp);
        if (pc < mat.cols()) {
            // back-substitute into existing basis rows to keep them fully reduced
            for (std::size_t b = 0; b < basis.size(); ++b)
                if ((basis[b][pc >> 6] >> (pc & 63)) & 1u)
                    for (std::size_t w = 0; w < stride; ++w) basis[b][w] ^= tmp[w];
            basis.push_back(tmp);
            pivot_cols.push_back(pc);
            res.pivot_rows.push_back(i);
        }
    }
    res.rank = basis.size();

    // emit RREF sorted by pivot column, zero rows last
    std::vector<std::size_t> order(basis.size());
    for (std::size_t b = 0; b < order.size(); ++b) order[b] = b;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pivot_cols[a] < pivot_cols[b]; });
    for (std::size_t out = 0; out < order.size(); ++out) {
        std::uint64_t* dst = res.rref.row_words(out);
        std::copy(basis[order[out]].begin(), basis[order[out]].end(), dst);
    }
    return res;
}

/// Rank only (cheaper call sites; same elimination).
inline std::size_t gf2_rank(const BinMatrix& mat) { return rank_and_rref(mat).rank; }

struct Codebook {
    BinMatrix codebook;       // 2^rank x cols, all distinct
    BinMatrix info_patterns;  // 2^rank x rows(gen); non-pivot coordinates fixed to 0
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_rows;
};

inline constexpr std::size_t kDefaultEnumerationCap = std::size_t(1) << 20;

/// Row space of gen, listed as 2^rank rows, together with the message-pattern
/// matrix U satisfying U*gen = codebook row-for-row. Message index i toggles
/// pivot row b of gen iff bit b of i is set.
inline Codebook enumerate_codebook(const BinMatrix& gen,
                                   std::size_t cap = kDefaultEnumerationCap) {
    RrefResult rr = rank_and_rref(gen);
    const std::size_t R = rr.rank;
    if (R >= 63 || (std::size_t(1) << R) > cap)
        throw std::length_error("enumerate_codebook: 2^rank exceeds enumeration cap");
    const std::size_t count = std::size_t(1) << R;

    Codebook cb;
    cb.rank = R;
    cb.pivot_rows = rr.pivot_rows;
    cb.codebook = BinMatrix(count, gen.cols());
    cb.info_patterns = BinMatrix(count, gen.rows());
    const std::size_t stride = gen.stride();
    for (std::size_t idx = 0; idx < count; ++idx) {
        std::uint64_t* dst = cb.codebook.row_words(idx);
        for (std::size_t b = 0; b < R; ++b) {
            if ((idx >> b) & 1u) {
                const std::uint64_t* src = gen.row_words(rr.pivot_rows[b]);
                for (std::size_t w = 0; w < stride; ++w) dst[w] ^= src[w];
                cb.info_patterns.set(idx, rr.pivot_rows[b], true);
            }
        }
    }
    return cb;
}

inline BinVector gf2_matvec(const BinMatrix& mat, const BinVector& vec) {
    if (vec.size() != mat.rows())
        throw std::invalid_argument("gf2_matvec: vector length must equal row count");
    BinVector out(mat.cols());
    for (std::size_t i = 0; i < mat.rows(); ++i) {
        if (vec.get(i)) {
            for (std::size_t j = 0; j < mat.cols(); ++j)
                if (mat.get(i, j)) out.flip(j);
        }
    }
    return out;
}

inline std::size_t hamming_weight(const BinVector& v) { return v.weight(); }

}  // namespace rmsub

#endif  // RMSUB_GF2_HPP
