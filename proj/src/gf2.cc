#include "hdcoop/gf2.hpp"

#include <stdexcept>

namespace hdcoop::gf2 {

BitVector zeros(int n) { return BitVector(static_cast<size_t>(n), 0); }

BitVector xor_of(const BitVector& a, const BitVector& b) {
  BitVector r = a;
  xor_into(r, b);
  return r;
}

void xor_into(BitVector& acc, const BitVector& b) {
  if (acc.size() != b.size()) throw std::invalid_argument("gf2: length mismatch in xor");
  for (size_t i = 0; i < acc.size(); ++i) acc[i] ^= b[i];
}

bool is_zero(const BitVector& v) {
  for (auto b : v)
    if (b) return false;
  return true;
}

std::string to_hex(const BitVector& v) {
  if (v.empty()) return "-";
  static const char* digits = "0123456789abcdef";
  std::string out;
  size_t lead = (4 - v.size() % 4) % 4;
  int nib = 0, cnt = static_cast<int>(lead);
  for (auto b : v) {
    nib = (nib << 1) | (b & 1);
    if (++cnt == 4) {
      out += digits[nib];
      nib = 0;
      cnt = 0;
    }
  }
  return out;
}

BitMatrix::BitMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), words_((cols + 63) / 64) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("gf2: negative dimension");
  data_.assign(static_cast<size_t>(rows) * words_, 0);
}

BitMatrix BitMatrix::identity(int n) {
  BitMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

BitMatrix BitMatrix::from_columns(int rows, const std::vector<BitVector>& cols) {
  BitMatrix m(rows, static_cast<int>(cols.size()));
  for (int c = 0; c < m.cols_; ++c) {
    if (static_cast<int>(cols[c].size()) != rows)
      throw std::invalid_argument("gf2: column length mismatch");
    for (int r = 0; r < rows; ++r)
      if (cols[c][r]) m.set(r, c, true);
  }
  return m;
}

bool BitMatrix::get(int r, int c) const { return (row_ptr(r)[c >> 6] >> (c & 63)) & 1u; }

void BitMatrix::set(int r, int c, bool v) {
  auto& w = row_ptr(r)[c >> 6];
  std::uint64_t bit = std::uint64_t{1} << (c & 63);
  w = v ? (w | bit) : (w & ~bit);
}

BitVector BitMatrix::row(int r) const {
  BitVector v(cols_);
  for (int c = 0; c < cols_; ++c) v[c] = get(r, c);
  return v;
}

BitVector BitMatrix::column(int c) const {
  BitVector v(rows_);
  for (int r = 0; r < rows_; ++r) v[r] = get(r, c);
  return v;
}

BitVector BitMatrix::apply(const BitVector& x) const {
  if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("gf2: apply dimension mismatch");
  std::vector<std::uint64_t> packed(words_, 0);
  for (int c = 0; c < cols_; ++c)
    if (x[c]) packed[c >> 6] |= std::uint64_t{1} << (c & 63);
  BitVector y(rows_, 0);
  for (int r = 0; r < rows_; ++r) {
    std::uint64_t acc = 0;
    const auto* rp = row_ptr(r);
    for (int w = 0; w < words_; ++w) acc ^= rp[w] & packed[w];
    y[r] = __builtin_parityll(acc);
  }
  return y;
}

BitMatrix BitMatrix::operator*(const BitMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("gf2: multiply dimension mismatch");
  BitMatrix out(rows_, o.cols_);
  for (int r = 0; r < rows_; ++r) {
    auto* dst = out.row_ptr(r);
    for (int k = 0; k < cols_; ++k) {
      if (!get(r, k)) continue;
      const auto* src = o.row_ptr(k);
      for (int w = 0; w < out.words_; ++w) dst[w] ^= src[w];
    }
  }
  return out;
}

BitMatrix BitMatrix::operator^(const BitMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("gf2: add dimension mismatch");
  BitMatrix out = *this;
  for (size_t i = 0; i < data_.size(); ++i) out.data_[i] ^= o.data_[i];
  return out;
}

bool BitMatrix::operator==(const BitMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

BitMatrix BitMatrix::transpose() const {
  BitMatrix t(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      if (get(r, c)) t.set(c, r, true);
  return t;
}

BitMatrix BitMatrix::hstack(const BitMatrix& o) const {
  if (rows_ != o.rows_) throw std::invalid_argument("gf2: hstack row mismatch");
  BitMatrix out(rows_, cols_ + o.cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c)
      if (get(r, c)) out.set(r, c, true);
    for (int c = 0; c < o.cols_; ++c)
      if (o.get(r, c)) out.set(r, cols_ + c, true);
  }
  return out;
}

BitMatrix BitMatrix::vstack(const BitMatrix& o) const {
  if (cols_ != o.cols_) throw std::invalid_argument("gf2: vstack column mismatch");
  BitMatrix out(rows_ + o.rows_, cols_);
  std::copy(data_.begin(), data_.end(), out.data_.begin());
  std::copy(o.data_.begin(), o.data_.end(), out.data_.begin() + data_.size());
  return out;
}

BitMatrix BitMatrix::columns(int first, int count) const {
  if (first < 0 || count < 0 || first + count > cols_) throw std::invalid_argument("gf2: column range");
  BitMatrix out(rows_, count);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < count; ++c)
      if (get(r, first + c)) out.set(r, c, true);
  return out;
}

BitMatrix shift_matrix(int n, int k) {
  if (n < 0 || k < 0) throw std::invalid_argument("gf2: negative shift parameters");
  BitMatrix m(n, n);
  for (int i = k; i < n; ++i) m.set(i, i - k, true);
  return m;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(std::vector<std::uint64_t>& d, int rows, int cols, int words, int limit_cols) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < limit_cols && r < rows; ++c) {
    int w = c >> 6;
    std::uint64_t bit = std::uint64_t{1} << (c & 63);
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (d[static_cast<size_t>(i) * words + w] & bit) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != r)
      for (int k = 0; k < words; ++k)
        std::swap(d[static_cast<size_t>(p) * words + k], d[static_cast<size_t>(r) * words + k]);
    for (int i = 0; i < rows; ++i) {
      if (i == r || !(d[static_cast<size_t>(i) * words + w] & bit)) continue;
      for (int k = 0; k < words; ++k) d[static_cast<size_t>(i) * words + k] ^= d[static_cast<size_t>(r) * words + k];
    }
    pivots.push_back(c);
    ++r;
  }
  (void)cols;
  return pivots;
}

}  // namespace

int rank(const BitMatrix& a) {
  auto d = a.data_;
  return static_cast<int>(rref(d, a.rows_, a.cols_, a.words_, a.cols_).size());
}

std::optional<BitVector> solve(const BitMatrix& a, const BitVector& b) {
  if (static_cast<int>(b.size()) != a.rows_) throw std::invalid_argument("gf2: solve dimension mismatch");
  BitMatrix aug(a.rows_, a.cols_ + 1);
  for (int r = 0; r < a.rows_; ++r) {
    for (int c = 0; c < a.cols_; ++c)
      if (a.get(r, c)) aug.set(r, c, true);
    if (b[r]) aug.set(r, a.cols_, true);
  }
  auto d = aug.data_;
  auto piv = rref(d, aug.rows_, aug.cols_, aug.words_, aug.cols_);
  if (!piv.empty() && piv.back() == a.cols_) return std::nullopt;
  BitVector x(a.cols_, 0);
  int last = a.cols_;
  for (size_t i = 0; i < piv.size(); ++i) {
    const auto* rp = d.data() + i * aug.words_;
    x[piv[i]] = (rp[last >> 6] >> (last & 63)) & 1u;
  }
  return x;
}

std::optional<BitMatrix> inverse(const BitMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("gf2: inverse of non-square matrix");
  int n = a.rows();
  BitMatrix aug = a.hstack(BitMatrix::identity(n));
  auto d = aug.data_;
  auto piv = rref(d, n, 2 * n, aug.words_, n);
  if (static_cast<int>(piv.size()) != n) return std::nullopt;
  BitMatrix inv(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      int cc = n + c;
      if ((d[static_cast<size_t>(r) * aug.words_ + (cc >> 6)] >> (cc & 63)) & 1u) inv.set(r, c, true);
    }
  return inv;
}

std::vector<BitVector> kernel(const BitMatrix& a) {
  auto d = a.data_;
  auto piv = rref(d, a.rows_, a.cols_, a.words_, a.cols_);
  std::vector<bool> is_piv(a.cols_, false);
  for (int c : piv) is_piv[c] = true;
  std::vector<BitVector> basis;
  for (int f = 0; f < a.cols_; ++f) {
    if (is_piv[f]) continue;
    BitVector x(a.cols_, 0);
    x[f] = 1;
    for (size_t i = 0; i < piv.size(); ++i) {
      const auto* rp = d.data() + i * a.words_;
      if ((rp[f >> 6] >> (f & 63)) & 1u) x[piv[i]] = 1;
    }
    basis.push_back(std::move(x));
  }
  return basis;
}

}  // namespace hdcoop::gf2
