#include "triqkd/gf2.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace triqkd {

BitVector BitVector::from_string(std::string_view s) {
    BitVector v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1') {
            v.set(i, true);
        } else if (s[i] != '0') {
            throw std::invalid_argument("BitVector::from_string: expected 0/1, got '" +
                                        std::string(1, s[i]) + "'");
        }
    }
    return v;
}

BitVector BitVector::unit(std::size_t len, std::size_t i) {
    if (i >= len) throw DimensionError("BitVector::unit: index out of range");
    BitVector v(len);
    v.set(i, true);
    return v;
}

BitVector BitVector::from_index(std::size_t len, std::uint64_t index) {
    if (len > 63) throw DimensionError("BitVector::from_index: length exceeds 63");
    BitVector v(len);
    for (std::size_t i = 0; i < len; ++i) {
        if ((index >> (len - 1 - i)) & 1u) v.set(i, true);
    }
    return v;
}

std::uint64_t BitVector::to_index() const {
    if (len_ > 63) throw DimensionError("BitVector::to_index: length exceeds 63");
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < len_; ++i) {
        idx = (idx << 1) | static_cast<std::uint64_t>(get(i));
    }
    return idx;
}

BitVector& BitVector::operator+=(const BitVector& o) {
    if (len_ != o.len_) throw DimensionError("BitVector: length mismatch in +");
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    return *this;
}

bool BitVector::operator<(const BitVector& o) const {
    if (len_ != o.len_) return len_ < o.len_;
    for (std::size_t i = 0; i < len_; ++i) {
        bool a = get(i), b = o.get(i);
        if (a != b) return b;  // 0 sorts before 1
    }
    return false;
}

bool BitVector::is_zero() const {
    for (auto w : words_)
        if (w) return false;
    return true;
}

std::size_t BitVector::weight() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

std::string BitVector::to_string() const {
    std::string s(len_, '0');
    for (std::size_t i = 0; i < len_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

std::string BitVector::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve((len_ + 3) / 4);
    for (std::size_t i = 0; i < len_; i += 4) {
        unsigned nib = 0;
        for (std::size_t j = 0; j < 4 && i + j < len_; ++j) {
            nib |= static_cast<unsigned>(get(i + j)) << (3 - j);
        }
        s.push_back(digits[nib]);
    }
    return s;
}

int inner_product(const BitVector& u, const BitVector& v) {
    if (u.size() != v.size()) throw DimensionError("inner_product: length mismatch");
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < u.words_.size(); ++w) acc ^= u.words_[w] & v.words_[w];
    return std::popcount(acc) & 1;
}

BitVector concat(const BitVector& u, const BitVector& v) {
    BitVector r(u.size() + v.size());
    for (std::size_t i = 0; i < u.size(); ++i) r.set(i, u.get(i));
    for (std::size_t i = 0; i < v.size(); ++i) r.set(u.size() + i, v.get(i));
    return r;
}

BitVector doubled(const BitVector& c) { return concat(c, c); }

BitVector fold(const BitVector& e) {
    if (e.size() % 2 != 0) throw DimensionError("fold: vector length must be even");
    std::size_t n = e.size() / 2;
    BitVector r(n);
    for (std::size_t i = 0; i < n; ++i) r.set(i, e.get(i) != e.get(n + i));
    return r;
}

BitMatrix BitMatrix::identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

BitMatrix BitMatrix::from_rows(std::vector<BitVector> rows) {
    BitMatrix m;
    m.rows_ = rows.size();
    m.cols_ = rows.empty() ? 0 : rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != m.cols_) throw DimensionError("BitMatrix::from_rows: ragged rows");
    }
    m.data_ = std::move(rows);
    return m;
}

BitMatrix BitMatrix::from_string(std::string_view s) {
    std::vector<BitVector> rows;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t end = s.find('\n', start);
        if (end == std::string_view::npos) end = s.size();
        std::string_view line = s.substr(start, end - start);
        if (!line.empty()) rows.push_back(BitVector::from_string(line));
        if (end == s.size()) break;
        start = end + 1;
    }
    return from_rows(std::move(rows));
}

BitVector BitMatrix::operator*(const BitVector& v) const {
    if (cols_ != v.size()) throw DimensionError("BitMatrix: mat-vec dimension mismatch");
    BitVector r(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        if (inner_product(data_[i], v)) r.set(i, true);
    }
    return r;
}

BitMatrix BitMatrix::transposed() const {
    BitMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (get(i, j)) t.set(j, i, true);
    return t;
}

std::string BitMatrix::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < rows_; ++i) {
        if (i) os << '\n';
        os << data_[i].to_string();
    }
    return os.str();
}

RowReduction row_reduce(const BitMatrix& m) {
    RowReduction rr;
    rr.reduced = m;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t pivot = r;
        while (pivot < m.rows() && !rr.reduced.get(pivot, c)) ++pivot;
        if (pivot == m.rows()) continue;
        if (pivot != r) std::swap(rr.reduced.row(pivot), rr.reduced.row(r));
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i != r && rr.reduced.get(i, c)) rr.reduced.row(i) += rr.reduced.row(r);
        }
        rr.pivot_cols.push_back(c);
        ++r;
    }
    rr.rank = r;
    return rr;
}

std::size_t rank(const BitMatrix& m) { return row_reduce(m).rank; }

std::vector<BitVector> kernel_basis(const BitMatrix& m) {
    RowReduction rr = row_reduce(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : rr.pivot_cols) is_pivot[c] = true;

    std::vector<BitVector> basis;
    basis.reserve(m.cols() - rr.rank);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        if (is_pivot[j]) continue;
        BitVector v(m.cols());
        v.set(j, true);
        for (std::size_t p = 0; p < rr.pivot_cols.size(); ++p) {
            if (rr.reduced.get(p, j)) v.set(rr.pivot_cols[p], true);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<BitVector> solve(const BitMatrix& a, const BitVector& b) {
    if (a.rows() != b.size()) throw DimensionError("solve: dimension mismatch");
    std::vector<BitVector> aug;
    aug.reserve(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        BitVector r = concat(a.row(i), BitVector(1));
        r.set(a.cols(), b.get(i));
        aug.push_back(std::move(r));
    }
    RowReduction rr = row_reduce(BitMatrix::from_rows(std::move(aug)));

    BitVector x(a.cols());
    for (std::size_t p = 0; p < rr.pivot_cols.size(); ++p) {
        if (rr.pivot_cols[p] == a.cols()) return std::nullopt;  // 0 = 1 row
        x.set(rr.pivot_cols[p], rr.reduced.get(p, a.cols()));
    }
    return x;
}

BitMatrix doubled_rows(const BitMatrix& m) {
    if (m.rows() == 0) return BitMatrix(0, 2 * m.cols());
    std::vector<BitVector> rows;
    rows.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(doubled(m.row(i)));
    return BitMatrix::from_rows(std::move(rows));
}

}  // namespace triqkd
