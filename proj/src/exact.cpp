#include "exact.hpp"

namespace exact {

ZMat ZMat::identity(int n) {
  ZMat I(n, n);
  for (int i = 0; i < n; ++i) I.at(i, i) = 1;
  return I;
}

ZMat mul(const ZMat& A, const ZMat& B) {
  if (A.cols != B.rows) throw torwalk::error("exact: dimension mismatch in mul");
  ZMat C(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      const Int& aik = A.at(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < B.cols; ++j) C.at(i, j) += aik * B.at(k, j);
    }
  return C;
}

ZVec mul(const ZMat& A, const ZVec& v) {
  if (A.cols != int(v.size())) throw torwalk::error("exact: dimension mismatch in mul");
  ZVec r(A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) r[i] += A.at(i, j) * v[j];
  return r;
}

ZMat transpose(const ZMat& A) {
  ZMat T(A.cols, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) T.at(j, i) = A.at(i, j);
  return T;
}

ZMat pow(const ZMat& A, unsigned long e) {
  ZMat r = ZMat::identity(A.rows), b = A;
  while (e) {
    if (e & 1) r = mul(r, b);
    e >>= 1;
    if (e) b = mul(b, b);
  }
  return r;
}

bool is_zero(const ZVec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

Int det(const ZMat& A) {
  if (A.rows != A.cols) throw torwalk::error("exact: det of non-square matrix");
  int n = A.rows;
  if (n == 0) return 1;
  ZMat M = A;
  Int prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (M.at(k, k) == 0) {
      int p = -1;
      for (int i = k + 1; i < n; ++i)
        if (M.at(i, k) != 0) { p = i; break; }
      if (p < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(M.at(k, j), M.at(p, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        Int t = M.at(i, j) * M.at(k, k) - M.at(i, k) * M.at(k, j);
        mpz_divexact(M.at(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
    prev = M.at(k, k);
  }
  return sign > 0 ? M.at(n - 1, n - 1) : Int(-M.at(n - 1, n - 1));
}

ZMat adjugate(const ZMat& A) {
  int n = A.rows;
  if (n != A.cols) throw torwalk::error("exact: adjugate of non-square matrix");
  if (n == 1) {
    ZMat r(1, 1);
    r.at(0, 0) = 1;
    return r;
  }
  ZMat adj(n, n);
  ZMat minorM(n - 1, n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int mi = 0;
      for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        int mj = 0;
        for (int c = 0; c < n; ++c) {
          if (c == j) continue;
          minorM.at(mi, mj) = A.at(r, c);
          ++mj;
        }
        ++mi;
      }
      Int m = det(minorM);
      adj.at(j, i) = ((i + j) % 2 == 0) ? m : Int(-m);
    }
  return adj;
}

ZMat hnf_rows(const ZMat& A, ZMat* U) {
  ZMat H = A;
  ZMat T = ZMat::identity(A.rows);
  int m = H.rows, n = H.cols;
  auto swap_rows = [&](int i, int j) {
    for (int c = 0; c < n; ++c) std::swap(H.at(i, c), H.at(j, c));
    for (int c = 0; c < m; ++c) std::swap(T.at(i, c), T.at(j, c));
  };
  auto addmul_row = [&](int dst, int src, const Int& f) {
    for (int c = 0; c < n; ++c) H.at(dst, c) += f * H.at(src, c);
    for (int c = 0; c < m; ++c) T.at(dst, c) += f * T.at(src, c);
  };
  auto negate_row = [&](int i) {
    for (int c = 0; c < n; ++c) H.at(i, c) = -H.at(i, c);
    for (int c = 0; c < m; ++c) T.at(i, c) = -T.at(i, c);
  };

  int row = 0;
  for (int col = 0; col < n && row < m; ++col) {
    // Euclid on entries of this column below `row`
    while (true) {
      int piv = -1;
      for (int i = row; i < m; ++i)
        if (H.at(i, col) != 0) {
          if (piv < 0 || cmp(abs(H.at(i, col)), abs(H.at(piv, col))) < 0) piv = i;
        }
      if (piv < 0) break;
      if (piv != row) swap_rows(row, piv);
      bool clean = true;
      for (int i = row + 1; i < m; ++i) {
        if (H.at(i, col) == 0) continue;
        Int f = H.at(i, col) / H.at(row, col);  // truncated division
        addmul_row(i, row, -f);
        if (H.at(i, col) != 0) clean = false;
      }
      if (clean) break;
    }
    if (H.at(row, col) == 0) continue;
    if (H.at(row, col) < 0) negate_row(row);
    // reduce entries above the pivot into [0, pivot)
    for (int i = 0; i < row; ++i) {
      Int f;
      mpz_fdiv_q(f.get_mpz_t(), H.at(i, col).get_mpz_t(), H.at(row, col).get_mpz_t());
      if (f != 0) addmul_row(i, row, -f);
    }
    ++row;
  }
  if (U) *U = T;
  return H;
}

int rank(const ZMat& A) {
  ZMat H = hnf_rows(A);
  int r = 0;
  for (int i = 0; i < H.rows; ++i) {
    bool nz = false;
    for (int j = 0; j < H.cols; ++j)
      if (H.at(i, j) != 0) { nz = true; break; }
    if (nz) ++r;
  }
  return r;
}

Snf snf(const ZMat& A) {
  ZMat S = A;
  int m = S.rows, n = S.cols;
  ZMat U = ZMat::identity(m), V = ZMat::identity(n);

  auto row_op = [&](int dst, int src, const Int& f) {
    for (int c = 0; c < n; ++c) S.at(dst, c) += f * S.at(src, c);
    for (int c = 0; c < m; ++c) U.at(dst, c) += f * U.at(src, c);
  };
  auto col_op = [&](int dst, int src, const Int& f) {
    for (int r = 0; r < m; ++r) S.at(r, dst) += f * S.at(r, src);
    for (int r = 0; r < n; ++r) V.at(r, dst) += f * V.at(r, src);
  };
  auto swap_rows = [&](int i, int j) {
    for (int c = 0; c < n; ++c) std::swap(S.at(i, c), S.at(j, c));
    for (int c = 0; c < m; ++c) std::swap(U.at(i, c), U.at(j, c));
  };
  auto swap_cols = [&](int i, int j) {
    for (int r = 0; r < m; ++r) std::swap(S.at(r, i), S.at(r, j));
    for (int r = 0; r < n; ++r) std::swap(V.at(r, i), V.at(r, j));
  };

  int t = 0;
  while (t < m && t < n) {
    // find a nonzero pivot with minimal absolute value
    int pi = -1, pj = -1;
    for (int i = t; i < m; ++i)
      for (int j = t; j < n; ++j)
        if (S.at(i, j) != 0 &&
            (pi < 0 || cmp(abs(S.at(i, j)), abs(S.at(pi, pj))) < 0)) {
          pi = i;
          pj = j;
        }
    if (pi < 0) break;
    if (pi != t) swap_rows(t, pi);
    if (pj != t) swap_cols(t, pj);

    bool again = false;
    for (int i = t + 1; i < m; ++i)
      if (S.at(i, t) != 0) {
        Int f = S.at(i, t) / S.at(t, t);
        row_op(i, t, -f);
        if (S.at(i, t) != 0) again = true;
      }
    for (int j = t + 1; j < n; ++j)
      if (S.at(t, j) != 0) {
        Int f = S.at(t, j) / S.at(t, t);
        col_op(j, t, -f);
        if (S.at(t, j) != 0) again = true;
      }
    if (again) continue;

    // ensure divisibility: pivot must divide every remaining entry
    bool fixed = true;
    for (int i = t + 1; i < m && fixed; ++i)
      for (int j = t + 1; j < n && fixed; ++j)
        if (S.at(i, j) % S.at(t, t) != 0) {
          row_op(t, i, 1);
          fixed = false;
        }
    if (!fixed) continue;
    ++t;
  }
  Snf out;
  for (int i = 0; i < t; ++i) {
    Int d = S.at(i, i);
    if (d < 0) {
      d = -d;
      for (int c = 0; c < n; ++c) V.at(c, i) *= -1;  // flip sign via V column
    }
    out.diag.push_back(d);
  }
  out.U = U;
  out.V = V;
  return out;
}

std::optional<QVec> solve(const ZMat& A, const QVec& b) {
  if (A.rows != int(b.size())) throw torwalk::error("exact: dimension mismatch in solve");
  int m = A.rows, n = A.cols;
  QMat M(m, n + 1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) M.at(i, j) = Rat(A.at(i, j));
    M.at(i, n) = b[i];
  }
  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < n && row < m; ++col) {
    int p = -1;
    for (int i = row; i < m; ++i)
      if (M.at(i, col) != 0) { p = i; break; }
    if (p < 0) continue;
    if (p != row)
      for (int j = 0; j <= n; ++j) std::swap(M.at(row, j), M.at(p, j));
    Rat inv = 1 / M.at(row, col);
    for (int j = col; j <= n; ++j) M.at(row, j) *= inv;
    for (int i = 0; i < m; ++i) {
      if (i == row || M.at(i, col) == 0) continue;
      Rat f = M.at(i, col);
      for (int j = col; j <= n; ++j) M.at(i, j) -= f * M.at(row, j);
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (int i = row; i < m; ++i)
    if (M.at(i, n) != 0) return std::nullopt;  // inconsistent
  QVec x(n, Rat(0));
  for (size_t k = 0; k < pivot_col.size(); ++k) x[pivot_col[k]] = M.at(int(k), n);
  return x;
}

bool integer_solvable(const ZMat& A, const ZVec& b) {
  if (A.rows != int(b.size())) throw torwalk::error("exact: dimension mismatch");
  auto s = snf(A);
  ZVec ub = mul(s.U, b);
  for (size_t i = 0; i < ub.size(); ++i) {
    if (i < s.diag.size()) {
      if (ub[i] % s.diag[i] != 0) return false;
    } else {
      if (ub[i] != 0) return false;
    }
  }
  return true;
}

std::vector<Int> charpoly(const ZMat& A) {
  int n = A.rows;
  if (n != A.cols) throw torwalk::error("exact: charpoly of non-square matrix");
  // Faddeev-LeVerrier: M_0 = I, c_n = 1; M_k = A M_{k-1} + c_{n-k+1} I
  std::vector<Int> c(n + 1);
  c[n] = 1;
  ZMat M = ZMat::identity(n);
  for (int k = 1; k <= n; ++k) {
    ZMat AM = mul(A, M);
    Int tr = 0;
    for (int i = 0; i < n; ++i) tr += AM.at(i, i);
    Int ck;
    mpz_divexact_ui(ck.get_mpz_t(), tr.get_mpz_t(), (unsigned long)k);
    c[n - k] = -ck;
    M = AM;
    for (int i = 0; i < n; ++i) M.at(i, i) += c[n - k];
  }
  return c;
}

bool poly_divides(const std::vector<Int>& q, const std::vector<Int>& p) {
  if (q.empty() || q.back() == 0) throw torwalk::error("exact: bad divisor polynomial");
  std::vector<Rat> r(p.size());
  for (size_t i = 0; i < p.size(); ++i) r[i] = Rat(p[i]);
  int dq = int(q.size()) - 1;
  int dr = int(r.size()) - 1;
  while (dr >= 0 && r[dr] == 0) --dr;
  Rat lead(q[dq]);
  while (dr >= dq) {
    Rat f = r[dr] / lead;
    for (int i = 0; i <= dq; ++i) r[dr - dq + i] -= f * Rat(q[i]);
    while (dr >= 0 && r[dr] == 0) --dr;
  }
  return dr < 0;
}

Rat qmat_det(const QMat& A) {
  if (A.rows != A.cols) throw torwalk::error("exact: det of non-square matrix");
  int n = A.rows;
  QMat M = A;
  Rat d(1);
  for (int k = 0; k < n; ++k) {
    int p = -1;
    for (int i = k; i < n; ++i)
      if (M.at(i, k) != 0) { p = i; break; }
    if (p < 0) return Rat(0);
    if (p != k) {
      for (int j = k; j < n; ++j) std::swap(M.at(k, j), M.at(p, j));
      d = -d;
    }
    d *= M.at(k, k);
    Rat inv = 1 / M.at(k, k);
    for (int i = k + 1; i < n; ++i) {
      if (M.at(i, k) == 0) continue;
      Rat f = M.at(i, k) * inv;
      for (int j = k; j < n; ++j) M.at(i, j) -= f * M.at(k, j);
    }
  }
  return d;
}

QVec qvec_from(const ZVec& v) {
  QVec r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = Rat(v[i]);
  return r;
}

Rat mod1(const Rat& x) {
  Int fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  Rat r = x - Rat(fl);
  return r;
}

}  // namespace exact
