#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hdcoop::gf2 {

// Entry 0 is the top signal level.
using BitVector = std::vector<std::uint8_t>;

BitVector zeros(int n);
BitVector xor_of(const BitVector& a, const BitVector& b);
void xor_into(BitVector& acc, const BitVector& b);
bool is_zero(const BitVector& v);
std::string to_hex(const BitVector& v);  // top level is the most significant bit

class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(int rows, int cols);

  static BitMatrix identity(int n);
  static BitMatrix from_columns(int rows, const std::vector<BitVector>& cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool get(int r, int c) const;
  void set(int r, int c, bool v);

  BitVector row(int r) const;
  BitVector column(int c) const;
  BitVector apply(const BitVector& x) const;
  BitMatrix operator*(const BitMatrix& o) const;
  BitMatrix operator^(const BitMatrix& o) const;
  bool operator==(const BitMatrix& o) const;

  BitMatrix transpose() const;
  BitMatrix hstack(const BitMatrix& o) const;
  BitMatrix vstack(const BitMatrix& o) const;
  BitMatrix columns(int first, int count) const;

 private:
  friend int rank(const BitMatrix&);
  friend std::optional<BitVector> solve(const BitMatrix&, const BitVector&);
  friend std::vector<BitVector> kernel(const BitMatrix&);
  friend std::optional<BitMatrix> inverse(const BitMatrix&);

  int rows_ = 0, cols_ = 0, words_ = 0;
  std::vector<std::uint64_t> data_;
  std::uint64_t* row_ptr(int r) { return data_.data() + static_cast<size_t>(r) * words_; }
  const std::uint64_t* row_ptr(int r) const {
    return data_.data() + static_cast<size_t>(r) * words_;
  }
};

// k-th power of the n x n lower shift: drops the bottom k bits, zero-fills the top.
BitMatrix shift_matrix(int n, int k);

int rank(const BitMatrix& a);

// Some x with a*x = b, free variables set to zero; nullopt if inconsistent.
std::optional<BitVector> solve(const BitMatrix& a, const BitVector& b);

std::optional<BitMatrix> inverse(const BitMatrix& a);

// Basis of {x : a*x = 0}.
std::vector<BitVector> kernel(const BitMatrix& a);

}  // namespace hdcoop::gf2
