#include "opmaj/finite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace opmaj {

namespace {

void check_square(const Mat& a) {
  if (a.empty()) fail(Kind::InvalidInput, "empty matrix");
  for (const auto& row : a) {
    if (row.size() != a.size()) fail(Kind::InvalidInput, "matrix is not square");
  }
}

}  // namespace

Mat mat_id(std::size_t n) {
  Mat u(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) u[i][i] = 1.0;
  return u;
}

Mat mat_mul(const Mat& a, const Mat& b) {
  if (a.empty() || b.empty() || a[0].size() != b.size())
    fail(Kind::InvalidInput, "matrix shape mismatch");
  std::size_t n = a.size(), m = b[0].size(), k = b.size();
  Mat c(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      double ail = a[i][l];
      if (ail == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) c[i][j] += ail * b[l][j];
    }
  return c;
}

Mat mat_transpose(const Mat& a) {
  if (a.empty()) fail(Kind::InvalidInput, "empty matrix");
  std::size_t n = a.size(), m = a[0].size();
  Mat t(m, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) t[j][i] = a[i][j];
  return t;
}

std::vector<double> mat_vec(const Mat& a, const std::vector<double>& v) {
  if (a.empty() || a[0].size() != v.size())
    fail(Kind::InvalidInput, "matrix shape mismatch");
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += a[i][j] * v[j];
  return out;
}

std::vector<double> mat_diag(const Mat& a) {
  check_square(a);
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i][i];
  return d;
}

Mat sym_conj(const Mat& u, const std::vector<double>& d) {
  check_square(u);
  if (u.size() != d.size()) fail(Kind::InvalidInput, "matrix shape mismatch");
  std::size_t n = u.size();
  Mat a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += u[i][k] * d[k] * u[j][k];
      a[i][j] = s;
    }
  return a;
}

EigOut jacobi_eig(const Mat& A0) {
  check_square(A0);
  std::size_t n = A0.size();
  double scale = 1.0;
  for (const auto& row : A0)
    for (double v : row) scale = std::max(scale, std::fabs(v));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::fabs(A0[i][j] - A0[j][i]) > 1e-9 * scale)
        fail(Kind::InvalidInput, "matrix is not symmetric");
  Mat A = A0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = 0.5 * (A[i][j] + A[j][i]);
      A[i][j] = A[j][i] = v;
    }
  Mat V = mat_id(n);
  double fro = 0.0;
  for (const auto& row : A)
    for (double v : row) fro += v * v;
  fro = std::sqrt(fro);
  double stop = 1e-12 * std::max(1.0, fro);
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * A[i][j] * A[i][j];
    if (std::sqrt(off) < stop) break;
    if (sweep == 199) fail(Kind::InternalInvariantViolation, "eigensolver did not converge");
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = A[p][q];
        if (apq == 0.0) continue;
        double theta = (A[q][q] - A[p][p]) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        double app = A[p][p], aqq = A[q][q];
        A[p][p] = app - t * apq;
        A[q][q] = aqq + t * apq;
        A[p][q] = A[q][p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          double akp = A[k][p], akq = A[k][q];
          A[k][p] = A[p][k] = c * akp - s * akq;
          A[k][q] = A[q][k] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = V[k][p], vkq = V[k][q];
          V[k][p] = c * vkp - s * vkq;
          V[k][q] = s * vkp + c * vkq;
        }
      }
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return A[a][a] > A[b][b]; });
  EigOut out;
  out.eigvals.resize(n);
  out.V.assign(n, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    out.eigvals[k] = A[idx[k]][idx[k]];
    for (std::size_t r = 0; r < n; ++r) out.V[r][k] = V[r][idx[k]];
  }
  return out;
}

bool vec_majorizes_f(const std::vector<double>& x, const std::vector<double>& y,
                     double tol) {
  if (x.size() != y.size() || x.empty())
    fail(Kind::InvalidInput, "vector length mismatch");
  std::vector<double> xs = x, ys = y;
  std::sort(xs.rbegin(), xs.rend());
  std::sort(ys.rbegin(), ys.rend());
  double sx = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    if (sx > sy + tol) return false;
  }
  return std::fabs(sx - sy) <= tol;
}

bool schur_check(const Mat& A, double tol) {
  EigOut e = jacobi_eig(A);
  return vec_majorizes_f(mat_diag(A), e.eigvals, tol);
}

double kyfan_U(const Mat& A, long long k) {
  EigOut e = jacobi_eig(A);
  if (k < 1 || k > (long long)e.eigvals.size())
    fail(Kind::OutOfRange, "rank bound outside 1..n");
  double s = 0.0;
  for (long long i = 0; i < k; ++i) s += e.eigvals[(std::size_t)i];
  return s;
}

Mat pinch(const Mat& A, const std::vector<std::vector<int>>& blocks) {
  check_square(A);
  std::size_t n = A.size();
  std::vector<int> label(n, -1);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int i : blocks[b]) {
      if (i < 0 || (std::size_t)i >= n || label[(std::size_t)i] != -1)
        fail(Kind::InvalidInput, "blocks must partition the index set");
      label[(std::size_t)i] = (int)b;
    }
  for (std::size_t i = 0; i < n; ++i)
    if (label[i] == -1) fail(Kind::InvalidInput, "blocks must partition the index set");
  Mat B(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (label[i] == label[j]) B[i][j] = A[i][j];
  return B;
}

HornOut horn_construct(const std::vector<Rat>& x, const std::vector<Rat>& y) {
  if (x.size() != y.size() || x.empty())
    fail(Kind::InvalidInput, "vector length mismatch");
  if (!vec_majorizes(x, y))
    fail(Kind::NotMajorized, "diagonal is not majorized by the spectrum");
  std::size_t n = x.size();
  constexpr std::size_t npos = (std::size_t)-1;
  std::vector<std::size_t> ox(n);
  std::iota(ox.begin(), ox.end(), 0);
  std::stable_sort(ox.begin(), ox.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
  std::vector<Rat> cur = y;
  std::vector<char> active(n, 1);
  std::vector<std::size_t> frozen(n, npos);
  Mat U = mat_id(n);
  HornOut out;
  for (std::size_t k = 0; k < n; ++k) {
    const Rat& tau = x[ox[k]];
    std::size_t peq = npos;
    for (std::size_t p = 0; p < n; ++p)
      if (active[p] && cur[p] == tau) {
        peq = p;
        break;
      }
    if (peq != npos) {
      frozen[ox[k]] = peq;
      active[peq] = 0;
      continue;
    }
    // Smallest active value above the target and largest below it. Both
    // exist while the remaining targets stay majorized by the active values.
    std::size_t pi = npos, pj = npos;
    for (std::size_t p = 0; p < n; ++p) {
      if (!active[p]) continue;
      if (cur[p] > tau && (pi == npos || cur[p] < cur[pi])) pi = p;
      if (cur[p] < tau && (pj == npos || cur[p] > cur[pj])) pj = p;
    }
    if (pi == npos || pj == npos)
      fail(Kind::InternalInvariantViolation, "no straddle pair for target");
    Rat t = (tau - cur[pj]) / (cur[pi] - cur[pj]);
    double c = std::sqrt(rat_dbl(t));
    double s = std::sqrt(rat_dbl(Rat(1) - t));
    for (std::size_t col = 0; col < n; ++col) {
      double rp = U[pi][col], rq = U[pj][col];
      U[pi][col] = c * rp + s * rq;
      U[pj][col] = -s * rp + c * rq;
    }
    out.rots.push_back(RotStep{(int)pi, (int)pj, t});
    cur[pj] = cur[pi] + cur[pj] - tau;
    cur[pi] = tau;
    frozen[ox[k]] = pi;
    active[pi] = 0;
  }
  out.U.assign(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) out.U[i] = U[frozen[i]];
  return out;
}

RatMat ttransform_chain(const std::vector<Rat>& x, const std::vector<Rat>& y) {
  if (x.size() != y.size() || x.empty())
    fail(Kind::InvalidInput, "vector length mismatch");
  if (!vec_majorizes(x, y))
    fail(Kind::NotMajorized, "target is not majorized");
  std::size_t n = x.size();
  std::vector<std::size_t> px(n), py(n);
  std::iota(px.begin(), px.end(), 0);
  std::iota(py.begin(), py.end(), 0);
  std::stable_sort(px.begin(), px.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
  std::stable_sort(py.begin(), py.end(),
                   [&](std::size_t a, std::size_t b) { return y[a] > y[b]; });
  std::vector<Rat> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[px[i]];
    ys[i] = y[py[i]];
  }
  RatMat Dacc(n, std::vector<Rat>(n, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) Dacc[i][i] = 1;
  std::vector<Rat> v = ys;
  for (std::size_t step = 0; v != xs; ++step) {
    if (step >= n)
      fail(Kind::InternalInvariantViolation, "averaging chain did not terminate");
    long long j = -1, l = -1;
    for (std::size_t i = 0; i < n; ++i)
      if (v[i] > xs[i]) j = (long long)i;
    for (std::size_t i = (std::size_t)(j + 1); i < n; ++i)
      if (v[i] < xs[i]) {
        l = (long long)i;
        break;
      }
    if (j < 0 || l < 0)
      fail(Kind::InternalInvariantViolation, "no averaging pair");
    Rat delta = std::min(v[(std::size_t)j] - xs[(std::size_t)j],
                         xs[(std::size_t)l] - v[(std::size_t)l]);
    Rat lam = Rat(1) - delta / (v[(std::size_t)j] - v[(std::size_t)l]);
    Rat vj = v[(std::size_t)j], vl = v[(std::size_t)l];
    v[(std::size_t)j] = lam * vj + (Rat(1) - lam) * vl;
    v[(std::size_t)l] = (Rat(1) - lam) * vj + lam * vl;
    for (std::size_t col = 0; col < n; ++col) {
      Rat rj = Dacc[(std::size_t)j][col], rl = Dacc[(std::size_t)l][col];
      Dacc[(std::size_t)j][col] = lam * rj + (Rat(1) - lam) * rl;
      Dacc[(std::size_t)l][col] = (Rat(1) - lam) * rj + lam * rl;
    }
  }
  std::vector<std::size_t> inv_px(n);
  for (std::size_t i = 0; i < n; ++i) inv_px[px[i]] = i;
  RatMat D(n, std::vector<Rat>(n, Rat(0)));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t k = 0; k < n; ++k) D[a][py[k]] = Dacc[inv_px[a]][k];
  for (std::size_t a = 0; a < n; ++a) {
    Rat s = 0;
    for (std::size_t k = 0; k < n; ++k) s += D[a][k] * y[k];
    if (s != x[a])
      fail(Kind::InternalInvariantViolation, "averaging chain does not map y to x");
  }
  if (!is_doubly_stochastic(D))
    fail(Kind::InternalInvariantViolation, "averaging chain is not doubly stochastic");
  return D;
}

bool is_doubly_stochastic(const RatMat& D) {
  if (D.empty()) fail(Kind::InvalidInput, "empty matrix");
  std::size_t n = D.size();
  for (const auto& row : D)
    if (row.size() != n) fail(Kind::InvalidInput, "matrix is not square");
  for (std::size_t i = 0; i < n; ++i) {
    Rat rs = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (D[i][j] < 0) return false;
      rs += D[i][j];
    }
    if (rs != 1) return false;
  }
  for (std::size_t j = 0; j < n; ++j) {
    Rat cs = 0;
    for (std::size_t i = 0; i < n; ++i) cs += D[i][j];
    if (cs != 1) return false;
  }
  return true;
}

bool is_doubly_stochastic_f(const Mat& D, double tol) {
  if (D.empty()) fail(Kind::InvalidInput, "empty matrix");
  std::size_t n = D.size();
  for (const auto& row : D)
    if (row.size() != n) fail(Kind::InvalidInput, "matrix is not square");
  for (std::size_t i = 0; i < n; ++i) {
    double rs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (D[i][j] < -tol) return false;
      rs += D[i][j];
    }
    if (std::fabs(rs - 1.0) > tol) return false;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double cs = 0.0;
    for (std::size_t i = 0; i < n; ++i) cs += D[i][j];
    if (std::fabs(cs - 1.0) > tol) return false;
  }
  return true;
}

namespace {

bool kuhn_augment(std::size_t i, const std::vector<std::vector<char>>& allowed,
                  std::vector<long long>& match_col, std::vector<char>& used) {
  std::size_t n = allowed.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (!allowed[i][j] || used[j]) continue;
    used[j] = 1;
    if (match_col[j] < 0 ||
        kuhn_augment((std::size_t)match_col[j], allowed, match_col, used)) {
      match_col[j] = (long long)i;
      return true;
    }
  }
  return false;
}

std::optional<std::vector<int>> perfect_matching(
    const std::vector<std::vector<char>>& allowed) {
  std::size_t n = allowed.size();
  std::vector<long long> match_col(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<char> used(n, 0);
    if (!kuhn_augment(i, allowed, match_col, used)) return std::nullopt;
  }
  std::vector<int> perm(n, -1);
  for (std::size_t j = 0; j < n; ++j) perm[(std::size_t)match_col[j]] = (int)j;
  return perm;
}

// Null vector of M (rows x cols) with strictly more columns than rank, via
// reduced row echelon form; the first free column is set to one.
std::optional<std::vector<Rat>> rat_null_vector(RatMat M) {
  std::size_t R = M.size(), C = M[0].size();
  std::vector<long long> pivot_row_of_col(C, -1);
  std::size_t row = 0;
  for (std::size_t col = 0; col < C && row < R; ++col) {
    std::size_t pr = row;
    while (pr < R && M[pr][col] == 0) ++pr;
    if (pr == R) continue;
    std::swap(M[row], M[pr]);
    Rat piv = M[row][col];
    for (std::size_t c2 = col; c2 < C; ++c2) M[row][c2] /= piv;
    for (std::size_t r2 = 0; r2 < R; ++r2) {
      if (r2 == row || M[r2][col] == 0) continue;
      Rat f = M[r2][col];
      for (std::size_t c2 = col; c2 < C; ++c2) M[r2][c2] -= f * M[row][c2];
    }
    pivot_row_of_col[col] = (long long)row;
    ++row;
  }
  long long fc = -1;
  for (std::size_t c = 0; c < C; ++c)
    if (pivot_row_of_col[c] < 0) {
      fc = (long long)c;
      break;
    }
  if (fc < 0) return std::nullopt;
  std::vector<Rat> v(C, Rat(0));
  v[(std::size_t)fc] = 1;
  for (std::size_t c = 0; c < C; ++c)
    if (pivot_row_of_col[c] >= 0)
      v[c] = -M[(std::size_t)pivot_row_of_col[c]][(std::size_t)fc];
  return v;
}

std::optional<std::vector<double>> dbl_null_vector(Mat M) {
  std::size_t R = M.size(), C = M[0].size();
  std::vector<long long> pivot_row_of_col(C, -1);
  std::size_t row = 0;
  for (std::size_t col = 0; col < C && row < R; ++col) {
    std::size_t pr = row;
    for (std::size_t r2 = row; r2 < R; ++r2)
      if (std::fabs(M[r2][col]) > std::fabs(M[pr][col])) pr = r2;
    if (std::fabs(M[pr][col]) < 1e-10) continue;
    std::swap(M[row], M[pr]);
    double piv = M[row][col];
    for (std::size_t c2 = col; c2 < C; ++c2) M[row][c2] /= piv;
    for (std::size_t r2 = 0; r2 < R; ++r2) {
      if (r2 == row || M[r2][col] == 0.0) continue;
      double f = M[r2][col];
      for (std::size_t c2 = col; c2 < C; ++c2) M[r2][c2] -= f * M[row][c2];
    }
    pivot_row_of_col[col] = (long long)row;
    ++row;
  }
  long long fc = -1;
  for (std::size_t c = 0; c < C; ++c)
    if (pivot_row_of_col[c] < 0) {
      fc = (long long)c;
      break;
    }
  if (fc < 0) return std::nullopt;
  std::vector<double> v(C, 0.0);
  v[(std::size_t)fc] = 1.0;
  for (std::size_t c = 0; c < C; ++c)
    if (pivot_row_of_col[c] >= 0)
      v[c] = -M[(std::size_t)pivot_row_of_col[c]][(std::size_t)fc];
  return v;
}

// Affine dependency rows: one row per matrix entry plus a row of ones, so a
// null vector lambda has sum zero and sum lambda_i P_i = 0.
template <typename Term, typename Cell>
std::vector<std::vector<Cell>> dependency_rows(const std::vector<Term>& terms,
                                               std::size_t n, Cell one, Cell zero) {
  std::size_t m = terms.size();
  std::vector<std::vector<Cell>> M(n * n + 1, std::vector<Cell>(m, zero));
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t i = 0; i < n; ++i)
      M[i * n + (std::size_t)terms[c].perm[i]][c] = one;
    M[n * n][c] = one;
  }
  return M;
}

}  // namespace

std::vector<BirkTerm> birkhoff_decompose(const RatMat& D0) {
  if (!is_doubly_stochastic(D0))
    fail(Kind::InvalidInput, "matrix is not doubly stochastic");
  std::size_t n = D0.size();
  RatMat D = D0;
  std::vector<BirkTerm> terms;
  Rat remaining = 1;
  std::size_t guard = n * n + 2;
  while (remaining > 0) {
    if (terms.size() > guard)
      fail(Kind::InternalInvariantViolation, "decomposition did not terminate");
    std::vector<Rat> vals;
    for (const auto& row : D)
      for (const Rat& e : row)
        if (e > 0) vals.push_back(e);
    if (vals.empty())
      fail(Kind::InternalInvariantViolation, "positive mass without positive entries");
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    // Largest entry threshold still admitting a perfect matching: the kept
    // coefficient is maximal, so every step zeroes at least one entry.
    long long lo = 0, hi = (long long)vals.size() - 1, best = -1;
    std::vector<int> best_perm;
    while (lo <= hi) {
      long long mid = (lo + hi) / 2;
      std::vector<std::vector<char>> allowed(n, std::vector<char>(n, 0));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          allowed[i][j] = D[i][j] >= vals[(std::size_t)mid] ? 1 : 0;
      auto pm = perfect_matching(allowed);
      if (pm) {
        best = mid;
        best_perm = *pm;
        lo = mid + 1;
      } else {
        hi = mid - 1;
      }
    }
    if (best < 0) fail(Kind::DecompositionFailed, "support has no perfect matching");
    Rat coeff = D[0][(std::size_t)best_perm[0]];
    for (std::size_t i = 1; i < n; ++i)
      coeff = std::min(coeff, D[i][(std::size_t)best_perm[i]]);
    for (std::size_t i = 0; i < n; ++i) D[i][(std::size_t)best_perm[i]] -= coeff;
    remaining -= coeff;
    terms.push_back(BirkTerm{coeff, best_perm});
  }
  for (const auto& row : D)
    for (const Rat& e : row)
      if (e != 0) fail(Kind::InternalInvariantViolation, "nonzero residue");
  std::size_t bound = (n - 1) * (n - 1) + 1;
  while (terms.size() > bound) {
    RatMat M = dependency_rows(terms, n, Rat(1), Rat(0));
    auto lam = rat_null_vector(std::move(M));
    if (!lam)
      fail(Kind::InternalInvariantViolation, "missing affine dependency");
    bool has_neg = std::any_of(lam->begin(), lam->end(),
                               [](const Rat& v) { return v < 0; });
    if (!has_neg)
      for (Rat& v : *lam) v = -v;
    bool found = false;
    Rat tstar = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if ((*lam)[i] >= 0) continue;
      Rat cand = terms[i].coeff / -(*lam)[i];
      if (!found || cand < tstar) {
        tstar = cand;
        found = true;
      }
    }
    if (!found)
      fail(Kind::InternalInvariantViolation, "dependency without negative part");
    std::vector<BirkTerm> next;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      Rat c = terms[i].coeff + tstar * (*lam)[i];
      if (c < 0)
        fail(Kind::InternalInvariantViolation, "negative coefficient after reduction");
      if (c > 0) next.push_back(BirkTerm{c, terms[i].perm});
    }
    if (next.size() >= terms.size())
      fail(Kind::InternalInvariantViolation, "reduction made no progress");
    terms = std::move(next);
  }
  return terms;
}

std::vector<BirkTermF> birkhoff_decompose_f(const Mat& D0, double tol) {
  if (!is_doubly_stochastic_f(D0, tol))
    fail(Kind::InvalidInput, "matrix is not doubly stochastic");
  std::size_t n = D0.size();
  Mat D = D0;
  for (auto& row : D)
    for (double& e : row)
      if (e < 1e-12) e = 0.0;
  std::vector<BirkTermF> terms;
  double remaining = 1.0;
  std::size_t guard = n * n + 2;
  while (remaining > 1e-9) {
    if (terms.size() > guard)
      fail(Kind::DecompositionFailed, "decomposition did not terminate");
    std::vector<double> vals;
    for (const auto& row : D)
      for (double e : row)
        if (e > 0.0) vals.push_back(e);
    if (vals.empty()) break;
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    long long lo = 0, hi = (long long)vals.size() - 1, best = -1;
    std::vector<int> best_perm;
    while (lo <= hi) {
      long long mid = (lo + hi) / 2;
      std::vector<std::vector<char>> allowed(n, std::vector<char>(n, 0));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          allowed[i][j] = D[i][j] >= vals[(std::size_t)mid] ? 1 : 0;
      auto pm = perfect_matching(allowed);
      if (pm) {
        best = mid;
        best_perm = *pm;
        lo = mid + 1;
      } else {
        hi = mid - 1;
      }
    }
    if (best < 0) fail(Kind::DecompositionFailed, "support has no perfect matching");
    double coeff = D[0][(std::size_t)best_perm[0]];
    for (std::size_t i = 1; i < n; ++i)
      coeff = std::min(coeff, D[i][(std::size_t)best_perm[i]]);
    for (std::size_t i = 0; i < n; ++i) {
      double& e = D[i][(std::size_t)best_perm[i]];
      e -= coeff;
      if (e < 1e-12) e = 0.0;
    }
    remaining -= coeff;
    terms.push_back(BirkTermF{coeff, best_perm});
  }
  std::size_t bound = (n - 1) * (n - 1) + 1;
  while (terms.size() > bound) {
    Mat M = dependency_rows(terms, n, 1.0, 0.0);
    auto lam = dbl_null_vector(std::move(M));
    if (!lam) break;
    bool has_neg = std::any_of(lam->begin(), lam->end(),
                               [](double v) { return v < 0.0; });
    if (!has_neg)
      for (double& v : *lam) v = -v;
    bool found = false;
    double tstar = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if ((*lam)[i] >= 0.0) continue;
      double cand = terms[i].coeff / -(*lam)[i];
      if (!found || cand < tstar) {
        tstar = cand;
        found = true;
      }
    }
    if (!found) break;
    std::vector<BirkTermF> next;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      double c = terms[i].coeff + tstar * (*lam)[i];
      if (c > 1e-14) next.push_back(BirkTermF{c, terms[i].perm});
    }
    if (next.size() >= terms.size()) break;
    terms = std::move(next);
  }
  return terms;
}

double sigma_max(const Mat& C) {
  if (C.empty() || C[0].empty()) fail(Kind::InvalidInput, "empty matrix");
  std::size_t r = C.size(), c = C[0].size();
  for (const auto& row : C)
    if (row.size() != c) fail(Kind::InvalidInput, "ragged matrix");
  Mat B(c, std::vector<double>(c, 0.0));
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < r; ++k) s += C[k][i] * C[k][j];
      B[i][j] = s;
    }
  EigOut e = jacobi_eig(B);
  return std::sqrt(std::max(0.0, e.eigvals[0]));
}

ContractOut contractive_construct(const std::vector<Rat>& f,
                                  const std::vector<Rat>& g, const Rat& eps) {
  if (f.empty() || g.empty()) fail(Kind::InvalidInput, "empty vectors");
  if (eps <= 0) fail(Kind::InvalidInput, "eps must be positive");
  for (const Rat& v : f)
    if (v < 0) fail(Kind::RequiresPositive, "contraction needs nonnegative vectors");
  for (const Rat& v : g)
    if (v < 0) fail(Kind::RequiresPositive, "contraction needs nonnegative vectors");
  if (!vec_submajorizes(f, g))
    fail(Kind::NotSubmajorized, "target is not weakly majorized");
  ContractOut out;
  out.pad = truncate_balanced(profile_of_vector(f), profile_of_vector(g), eps);
  out.horn = horn_construct(out.pad.x, out.pad.y);
  auto slots_desc = [](const std::vector<Rat>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    std::vector<long long> slot(v.size());
    for (std::size_t s = 0; s < idx.size(); ++s) slot[idx[s]] = (long long)s;
    return slot;
  };
  out.fslots = slots_desc(f);
  out.gslots = slots_desc(g);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (out.pad.x[(std::size_t)out.fslots[i]] != f[i] + eps)
      fail(Kind::InternalInvariantViolation, "slot map out of step with padding");
  for (std::size_t j = 0; j < g.size(); ++j)
    if (out.pad.y[(std::size_t)out.gslots[j]] != g[j] + eps)
      fail(Kind::InternalInvariantViolation, "slot map out of step with padding");
  out.C.assign(f.size(), std::vector<double>(g.size()));
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      out.C[i][j] =
          out.horn.U[(std::size_t)out.fslots[i]][(std::size_t)out.gslots[j]];
  out.realized.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
      s += out.C[i][j] * out.C[i][j] * rat_dbl(g[j]);
    out.realized[i] = s;
  }
  return out;
}

}  // namespace opmaj
