#ifndef TORWALK_EXACT_HPP
#define TORWALK_EXACT_HPP

// Small dense exact linear algebra over GMP integers/rationals.
// Matrices here are tiny (d <= 5 in practice); everything is O(d^3)
// schoolbook with exact arithmetic.

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace torwalk {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace torwalk

namespace exact {

using Int = mpz_class;
using Rat = mpq_class;
using ZVec = std::vector<Int>;
using QVec = std::vector<Rat>;

struct ZMat {
  int rows = 0, cols = 0;
  std::vector<Int> a;

  ZMat() = default;
  ZMat(int r, int c) : rows(r), cols(c), a(size_t(r) * c) {}

  Int& at(int i, int j) { return a[size_t(i) * cols + j]; }
  const Int& at(int i, int j) const { return a[size_t(i) * cols + j]; }

  static ZMat identity(int n);
  bool operator==(const ZMat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

struct QMat {
  int rows = 0, cols = 0;
  std::vector<Rat> a;

  QMat() = default;
  QMat(int r, int c) : rows(r), cols(c), a(size_t(r) * c) {}

  Rat& at(int i, int j) { return a[size_t(i) * cols + j]; }
  const Rat& at(int i, int j) const { return a[size_t(i) * cols + j]; }
};

ZMat mul(const ZMat& A, const ZMat& B);
ZVec mul(const ZMat& A, const ZVec& v);
ZMat transpose(const ZMat& A);
ZMat pow(const ZMat& A, unsigned long e);
bool is_zero(const ZVec& v);

// exact determinant (Bareiss fraction-free elimination)
Int det(const ZMat& A);

// adjugate: adj(A) * A = det(A) * I
ZMat adjugate(const ZMat& A);

// Row-style Hermite normal form: returns H = U*A with U unimodular.
// H is in row echelon form, nonzero rows first, pivots positive, entries
// above each pivot reduced into [0, pivot). If U != nullptr it receives
// the transform.
ZMat hnf_rows(const ZMat& A, ZMat* U = nullptr);

int rank(const ZMat& A);

// Smith normal form: U*A*V = diag(s1,...,sk) with s1 | s2 | ... | sk > 0.
struct Snf {
  std::vector<Int> diag;  // nonzero invariant factors
  ZMat U, V;              // unimodular
};
Snf snf(const ZMat& A);

// Solve A*x = b exactly over Q (A with full column rank).
// Returns nullopt when the system is inconsistent.
std::optional<QVec> solve(const ZMat& A, const QVec& b);

// does A*x = b admit an integer solution? (via Smith normal form)
bool integer_solvable(const ZMat& A, const ZVec& b);

// characteristic polynomial det(xI - A), coefficients low to high degree
// (Faddeev-LeVerrier; divisions are exact)
std::vector<Int> charpoly(const ZMat& A);

// does the rational polynomial q divide p exactly? (coefficients low->high)
bool poly_divides(const std::vector<Int>& q, const std::vector<Int>& p);

Rat qmat_det(const QMat& A);
QVec qvec_from(const ZVec& v);

// reduce a rational into [0,1)
Rat mod1(const Rat& x);

}  // namespace exact

#endif
