#pragma once

#include <stdexcept>
#include <vector>

namespace hdcoop {

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <class T>
struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  T value{};
  std::vector<T> x;
};

// maximize c.x subject to A x <= b, x >= 0. Dense tableau, Bland's rule.
// eps = 0 gives exact arithmetic for exact number types.
template <class T>
LpResult<T> simplex_max(const std::vector<std::vector<T>>& A, const std::vector<T>& b,
                        const std::vector<T>& c, const T& eps = T(0)) {
  const int m = static_cast<int>(A.size());
  const int n = static_cast<int>(c.size());
  if (static_cast<int>(b.size()) != m) throw std::invalid_argument("simplex: rhs size");
  const int art = n + m;
  const int ncol = n + m + 1;
  std::vector<std::vector<T>> t(m, std::vector<T>(ncol + 1, T(0)));
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(A[i].size()) != n) throw std::invalid_argument("simplex: row size");
    for (int j = 0; j < n; ++j) t[i][j] = A[i][j];
    t[i][n + i] = T(1);
    t[i][art] = T(-1);
    t[i][ncol] = b[i];
    basis[i] = n + i;
  }
  std::vector<bool> allowed(ncol, true);

  auto pivot = [&](int r, int col) {
    T p = t[r][col];
    for (auto& v : t[r]) v /= p;
    for (int i = 0; i < m; ++i) {
      if (i == r || t[i][col] == T(0)) continue;
      T f = t[i][col];
      for (int j = 0; j <= ncol; ++j) t[i][j] -= f * t[r][j];
    }
    basis[r] = col;
  };

  // 0 optimal, 1 unbounded
  auto run = [&](const std::vector<T>& obj) -> int {
    for (int guard = 0; guard < 100000; ++guard) {
      int enter = -1;
      for (int j = 0; j < ncol && enter < 0; ++j) {
        if (!allowed[j]) continue;
        T r = obj[j];
        for (int i = 0; i < m; ++i)
          if (obj[basis[i]] != T(0) && t[i][j] != T(0)) r -= obj[basis[i]] * t[i][j];
        if (r > eps) enter = j;
      }
      if (enter < 0) return 0;
      int leave = -1;
      T best{};
      for (int i = 0; i < m; ++i) {
        if (!(t[i][enter] > eps)) continue;
        T ratio = t[i][ncol] / t[i][enter];
        if (leave < 0 || ratio < best || (!(best < ratio) && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return 1;
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex: iteration guard exceeded");
  };

  int worst = -1;
  for (int i = 0; i < m; ++i)
    if (t[i][ncol] < -eps && (worst < 0 || t[i][ncol] < t[worst][ncol])) worst = i;
  if (worst >= 0) {
    pivot(worst, art);
    std::vector<T> phase1(ncol, T(0));
    phase1[art] = T(-1);
    run(phase1);
    for (int i = 0; i < m; ++i)
      if (basis[i] == art && t[i][ncol] > eps) return {LpStatus::Infeasible, T(0), {}};
    for (int i = 0; i < m; ++i) {
      if (basis[i] != art) continue;
      for (int j = 0; j < ncol; ++j)
        if (j != art && (t[i][j] > eps || t[i][j] < -eps)) {
          pivot(i, j);
          break;
        }
    }
  }
  allowed[art] = false;
  for (int i = 0; i < m; ++i) t[i][art] = T(0);

  std::vector<T> obj(ncol, T(0));
  for (int j = 0; j < n; ++j) obj[j] = c[j];
  if (run(obj) == 1) return {LpStatus::Unbounded, T(0), {}};
  LpResult<T> res;
  res.status = LpStatus::Optimal;
  res.x.assign(n, T(0));
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) res.x[basis[i]] = t[i][ncol];
  res.value = T(0);
  for (int j = 0; j < n; ++j) res.value += c[j] * res.x[j];
  return res;
}

}  // namespace hdcoop
