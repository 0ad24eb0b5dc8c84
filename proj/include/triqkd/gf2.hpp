#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace triqkd {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Vector over GF(2). Bits are word-packed (bit i lives in word i/64, bit i%64);
// the packing is internal, all external text formats are explicit 0/1 strings.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t len) : len_(len), words_((len + 63) / 64, 0) {}

    static BitVector from_string(std::string_view s);
    static BitVector unit(std::size_t len, std::size_t i);

    // numeric value interpreted MSB-first (bit 0 is the highest-order bit);
    // lexicographic order on the 0/1 string equals numeric order on the index
    static BitVector from_index(std::size_t len, std::uint64_t index);
    std::uint64_t to_index() const;

    std::size_t size() const { return len_; }
    bool empty() const { return len_ == 0; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v) {
        std::uint64_t m = 1ull << (i & 63);
        if (v) words_[i >> 6] |= m; else words_[i >> 6] &= ~m;
    }
    void flip(std::size_t i) { words_[i >> 6] ^= 1ull << (i & 63); }

    BitVector& operator+=(const BitVector& o);
    BitVector operator+(const BitVector& o) const {
        BitVector r = *this;
        r += o;
        return r;
    }

    bool operator==(const BitVector& o) const { return len_ == o.len_ && words_ == o.words_; }
    bool operator!=(const BitVector& o) const { return !(*this == o); }
    bool operator<(const BitVector& o) const;  // by length, then MSB-first lexicographic

    bool is_zero() const;
    std::size_t weight() const;

    std::string to_string() const;
    std::string to_hex() const;  // MSB-first nibbles, zero-padded at the tail

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    std::size_t len_ = 0;
    std::vector<std::uint64_t> words_;

    friend int inner_product(const BitVector& u, const BitVector& v);
};

int inner_product(const BitVector& u, const BitVector& v);
BitVector concat(const BitVector& u, const BitVector& v);

// cc: two copies of c back to back
BitVector doubled(const BitVector& c);

// e'_i = e_i + e_{n+i}; inverse direction of doubling, kills doubled vectors
BitVector fold(const BitVector& e);

// Dense GF(2) matrix, stored as one BitVector per row.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows, BitVector(cols)) {}

    static BitMatrix identity(std::size_t n);
    static BitMatrix from_rows(std::vector<BitVector> rows);
    static BitMatrix from_string(std::string_view s);  // newline-separated rows

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const { return data_[r].get(c); }
    void set(std::size_t r, std::size_t c, bool v) { data_[r].set(c, v); }

    const BitVector& row(std::size_t r) const { return data_[r]; }
    BitVector& row(std::size_t r) { return data_[r]; }

    BitVector operator*(const BitVector& v) const;  // mat-vec over GF(2)

    bool operator==(const BitMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    BitMatrix transposed() const;
    std::string to_string() const;  // newline-separated 0/1 rows

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<BitVector> data_;
};

struct RowReduction {
    BitMatrix reduced;
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_cols;
};

// Full Gauss-Jordan (reduced row echelon form); pivot bookkeeping is
// deterministic, which the subcode selection relies on.
RowReduction row_reduce(const BitMatrix& m);

std::size_t rank(const BitMatrix& m);

// Basis of {v : Mv = 0}, one vector per free column, ordered by column index.
std::vector<BitVector> kernel_basis(const BitMatrix& m);

// Unique x with A x = b when A has full column rank; nullopt when inconsistent.
// Free coordinates, if any, are set to zero.
std::optional<BitVector> solve(const BitMatrix& a, const BitVector& b);

// Each row h becomes hh.
BitMatrix doubled_rows(const BitMatrix& m);

}  // namespace triqkd
