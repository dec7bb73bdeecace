#include <doctest.h>

#include <random>
#include <set>

#include "hdcoop/gf2.hpp"

using namespace hdcoop::gf2;

namespace {

BitMatrix random_matrix(int r, int c, std::mt19937_64& rng) {
  BitMatrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m.set(i, j, rng() & 1u);
  return m;
}

BitVector from_index(int n, unsigned x) {
  BitVector v(n);
  for (int j = 0; j < n; ++j) v[j] = (x >> j) & 1u;
  return v;
}

int brute_rank(const BitMatrix& a) {
  std::set<BitVector> images;
  for (unsigned x = 0; x < (1u << a.cols()); ++x) images.insert(a.apply(from_index(a.cols(), x)));
  int r = 0;
  while ((1u << r) < images.size()) ++r;
  return r;
}

}  // namespace

TEST_SUITE("gf2") {
  TEST_CASE("lower shift moves levels down") {
    CHECK(shift_matrix(3, 1).apply({1, 0, 1}) == BitVector{0, 1, 0});
    CHECK(shift_matrix(3, 1).apply({1, 1, 0}) == BitVector{0, 1, 1});
    for (int n = 0; n <= 6; ++n) CHECK(shift_matrix(n, 0) == BitMatrix::identity(n));
    CHECK(shift_matrix(2, 2) == BitMatrix(2, 2));
    CHECK(shift_matrix(4, 9) == BitMatrix(4, 4));
  }

  TEST_CASE("shift powers compose") {
    for (int n = 1; n <= 7; ++n)
      for (int a = 0; a <= n + 1; ++a)
        for (int b = 0; b <= n + 1; ++b) CHECK(shift_matrix(n, a) * shift_matrix(n, b) == shift_matrix(n, a + b));
  }

  TEST_CASE("rank of identity, shift and random matrices") {
    for (int n = 0; n <= 9; ++n) CHECK(rank(BitMatrix::identity(n)) == n);
    CHECK(rank(shift_matrix(4, 2)) == 2);
    std::mt19937_64 rng(7);
    for (int t = 0; t < 60; ++t) {
      int r = 1 + static_cast<int>(rng() % 8), c = 1 + static_cast<int>(rng() % 10);
      auto a = random_matrix(r, c, rng);
      CHECK(rank(a) == brute_rank(a));
      CHECK(rank(a) == rank(a.transpose()));
    }
    auto a = random_matrix(6, 4, rng);
    CHECK(rank(a) == brute_rank(a));
  }

  TEST_CASE("solve") {
    BitVector b{1, 0, 1, 1};
    CHECK(solve(BitMatrix::identity(4), b) == b);
    CHECK_FALSE(solve(BitMatrix(3, 3), BitVector{0, 1, 0}).has_value());
    CHECK(solve(BitMatrix(3, 3), BitVector{0, 0, 0}) == BitVector{0, 0, 0});

    std::mt19937_64 rng(11);
    int full = 0;
    while (full < 20) {
      auto a = random_matrix(5, 5, rng);
      if (rank(a) != 5) continue;
      ++full;
      auto x0 = from_index(5, static_cast<unsigned>(rng() % 32));
      auto rhs = a.apply(x0);
      auto x = solve(a, rhs);
      REQUIRE(x.has_value());
      CHECK(a.apply(*x) == rhs);
      int hits = 0;
      for (unsigned y = 0; y < 32; ++y) hits += a.apply(from_index(5, y)) == rhs;
      CHECK(hits == 1);
      CHECK(*x == x0);
    }
    for (int t = 0; t < 100; ++t) {
      auto a = random_matrix(4, 6, rng);
      auto rhs = from_index(4, static_cast<unsigned>(rng() % 16));
      auto x = solve(a, rhs);
      bool exists = false;
      for (unsigned y = 0; y < 64; ++y) exists |= a.apply(from_index(6, y)) == rhs;
      CHECK(x.has_value() == exists);
      if (x) CHECK(a.apply(*x) == rhs);
    }
  }

  TEST_CASE("inverse and kernel") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 40; ++t) {
      auto a = random_matrix(6, 6, rng);
      auto inv = inverse(a);
      CHECK(inv.has_value() == (rank(a) == 6));
      if (inv) CHECK(a * *inv == BitMatrix::identity(6));
      auto k = kernel(a);
      CHECK(static_cast<int>(k.size()) == 6 - rank(a));
      for (const auto& z : k) CHECK(is_zero(a.apply(z)));
    }
  }

  TEST_CASE("stacking and hex") {
    auto a = BitMatrix::identity(2).hstack(BitMatrix(2, 1));
    CHECK(a.cols() == 3);
    CHECK(a.vstack(a).rows() == 4);
    CHECK(a.columns(1, 2).column(0) == BitVector{0, 1});
    CHECK(to_hex({1, 0, 0, 0, 0, 0, 0, 0}) == "80");
    CHECK(xor_of({1, 1, 0}, {0, 1, 1}) == BitVector{1, 0, 1});
  }
}
