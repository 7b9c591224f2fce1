#pragma once

#include <optional>
#include <vector>

#include "prefstab/rational.hpp"

namespace prefstab {

using Vec = std::vector<Rational>;
using Mat = std::vector<Vec>;

struct LinSolveResult {
  bool consistent = false;
  bool unique = false;
  Vec solution;  // one solution when consistent (free variables set to 0)
  int rank = 0;
};

// Gaussian elimination over the rationals; A is m x n, b is m.
inline LinSolveResult solve_linear(Mat a, Vec b) {
  const int m = static_cast<int>(a.size());
  const int n = m == 0 ? 0 : static_cast<int>(a[0].size());
  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < n && row < m; ++col) {
    int pr = -1;
    for (int r = row; r < m; ++r)
      if (a[r][col] != 0) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    std::swap(a[pr], a[row]);
    std::swap(b[pr], b[row]);
    Rational inv = a[row][col];
    for (int c = col; c < n; ++c) a[row][c] /= inv;
    b[row] /= inv;
    for (int r = 0; r < m; ++r) {
      if (r == row || a[r][col] == 0) continue;
      Rational f = a[r][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[row][c];
      b[r] -= f * b[row];
    }
    pivot_col.push_back(col);
    ++row;
  }
  LinSolveResult res;
  res.rank = row;
  for (int r = row; r < m; ++r)
    if (b[r] != 0) return res;  // inconsistent
  res.consistent = true;
  res.unique = (res.rank == n);
  res.solution.assign(n, Rational(0));
  for (int r = 0; r < row; ++r) res.solution[pivot_col[r]] = b[r];
  return res;
}

// maximize c.x  s.t.  eq rows: a.x = rhs,  le rows: a.x <= rhs,  x >= 0
struct LinearProgram {
  int nvars = 0;
  Vec objective;
  std::vector<std::pair<Vec, Rational>> eq;
  std::vector<std::pair<Vec, Rational>> le;
};

struct LpResult {
  enum Status { kOptimal, kInfeasible, kUnbounded } status = kInfeasible;
  Rational value;
  Vec solution;
};

namespace detail {

// Dense tableau simplex with Bland's rule (terminates on exact arithmetic).
class SimplexTableau {
 public:
  SimplexTableau(int rows, int cols) : t_(rows, Vec(cols, Rational(0))) {}
  Vec& operator[](int r) { return t_[r]; }
  const Vec& operator[](int r) const { return t_[r]; }
  int rows() const { return static_cast<int>(t_.size()); }
  int cols() const { return t_.empty() ? 0 : static_cast<int>(t_[0].size()); }

 private:
  Mat t_;
};

}  // namespace detail

inline LpResult solve_lp(const LinearProgram& lp) {
  const int n = lp.nvars;
  const int n_slack = static_cast<int>(lp.le.size());
  const int m = static_cast<int>(lp.eq.size()) + n_slack;
  const int n_art = m;
  const int total = n + n_slack + n_art;

  // Tableau: m constraint rows + 1 cost row; columns: vars, rhs.
  detail::SimplexTableau t(m + 1, total + 1);
  std::vector<int> basis(m);

  int r = 0;
  auto load_row = [&](const Vec& coeffs, const Rational& rhs, int slack_idx) {
    for (int j = 0; j < n; ++j) t[r][j] = coeffs[j];
    if (slack_idx >= 0) t[r][n + slack_idx] = 1;
    t[r][total] = rhs;
    if (t[r][total] < 0)
      for (int j = 0; j <= total; ++j) t[r][j] = -t[r][j];
    t[r][n + n_slack + r] = 1;  // artificial
    basis[r] = n + n_slack + r;
    ++r;
  };
  for (auto& [coeffs, rhs] : lp.eq) load_row(coeffs, rhs, -1);
  for (int i = 0; i < n_slack; ++i) load_row(lp.le[i].first, lp.le[i].second, i);

  auto pivot = [&](int pr, int pc) {
    Rational inv = t[pr][pc];
    for (int j = 0; j <= total; ++j) t[pr][j] /= inv;
    for (int i = 0; i <= m; ++i) {
      if (i == pr || t[i][pc] == 0) continue;
      Rational f = t[i][pc];
      for (int j = 0; j <= total; ++j) t[i][j] -= f * t[pr][j];
    }
    basis[pr] = pc;
  };

  // cost_row: minimize, stored as reduced costs; Bland: entering = smallest
  // column with negative reduced cost.
  auto run = [&](int active_cols) -> bool {  // false = unbounded
    for (;;) {
      int pc = -1;
      for (int j = 0; j < active_cols; ++j)
        if (t[m][j] < 0) {
          pc = j;
          break;
        }
      if (pc < 0) return true;
      int pr = -1;
      for (int i = 0; i < m; ++i) {
        if (t[i][pc] <= 0) continue;
        if (pr < 0) {
          pr = i;
          continue;
        }
        Rational cur = t[i][total] / t[i][pc];
        Rational best = t[pr][total] / t[pr][pc];
        if (cur < best || (cur == best && basis[i] < basis[pr])) pr = i;
      }
      if (pr < 0) return false;
      pivot(pr, pc);
    }
  };

  // Phase 1: minimize sum of artificials.
  for (int j = 0; j <= total; ++j) t[m][j] = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= total; ++j) t[m][j] -= t[i][j];
  for (int i = 0; i < n_art; ++i) t[m][n + n_slack + i] = 0;
  run(total);
  LpResult res;
  if (-t[m][total] != 0) {
    res.status = LpResult::kInfeasible;
    return res;
  }
  // Drive any artificial still in the basis out (or drop a redundant row).
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n + n_slack) continue;
    int pc = -1;
    for (int j = 0; j < n + n_slack; ++j)
      if (t[i][j] != 0) {
        pc = j;
        break;
      }
    if (pc >= 0) pivot(i, pc);
  }

  // Phase 2: maximize objective == minimize -objective.
  for (int j = 0; j <= total; ++j) t[m][j] = 0;
  for (int j = 0; j < n; ++j) t[m][j] = -lp.objective[j];
  for (int i = 0; i < m; ++i) {
    if (basis[i] >= n || t[m][basis[i]] == 0) continue;
    Rational f = t[m][basis[i]];
    for (int j = 0; j <= total; ++j) t[m][j] -= f * t[i][j];
  }
  if (!run(n + n_slack)) {
    res.status = LpResult::kUnbounded;
    return res;
  }
  res.status = LpResult::kOptimal;
  res.solution.assign(n, Rational(0));
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) res.solution[basis[i]] = t[i][total];
  res.value = t[m][total];
  return res;
}

// Vertices of { w in simplex(dim) : rows.w <= rhs }, exact and deduplicated.
// Intended for small dimensions (action sets of desk-scale games).
inline std::vector<Vec> polytope_vertices(int dim, const std::vector<std::pair<Vec, Rational>>& ineqs) {
  // Constraints: sum w = 1 (always tight), w_i >= 0, ineqs.
  // A vertex makes dim-1 additional independent constraints tight.
  std::vector<std::pair<Vec, Rational>> tight_candidates;
  for (int i = 0; i < dim; ++i) {
    Vec row(dim, Rational(0));
    row[i] = 1;
    tight_candidates.push_back({row, Rational(0)});  // w_i = 0
  }
  for (auto& iq : ineqs) tight_candidates.push_back(iq);

  std::vector<Vec> verts;
  const int k = static_cast<int>(tight_candidates.size());
  std::vector<int> pick;
  auto feasible = [&](const Vec& w) {
    for (auto& x : w)
      if (x < 0) return false;
    for (auto& [row, rhs] : ineqs) {
      Rational lhs = 0;
      for (int i = 0; i < dim; ++i) lhs += row[i] * w[i];
      if (lhs > rhs) return false;
    }
    return true;
  };
  std::vector<int> idx(dim - 1);
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == dim - 1) {
      Mat a;
      Vec b;
      Vec ones(dim, Rational(1));
      a.push_back(ones);
      b.push_back(1);
      for (int i : idx) {
        a.push_back(tight_candidates[i].first);
        b.push_back(tight_candidates[i].second);
      }
      auto sol = solve_linear(a, b);
      if (!sol.consistent || !sol.unique) return;
      if (!feasible(sol.solution)) return;
      for (auto& v : verts)
        if (v == sol.solution) return;
      verts.push_back(sol.solution);
      return;
    }
    for (int i = start; i < k; ++i) {
      idx[depth] = i;
      self(self, i + 1, depth + 1);
    }
  };
  if (dim == 1) {
    Vec w{Rational(1)};
    if (feasible(w)) verts.push_back(w);
  } else {
    rec(rec, 0, 0);
  }
  return verts;
}

}  // namespace prefstab
