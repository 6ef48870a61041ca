#include "zlattice.hpp"

#include <algorithm>

namespace zlattice {

using exact::QMat;

static ZMat rows_from_vectors(const std::vector<ZVec>& vectors) {
  if (vectors.empty()) throw zero_lattice_error();
  size_t d = vectors[0].size();
  for (const auto& v : vectors)
    if (v.size() != d) throw torwalk::error("zlattice: inconsistent ambient dimension");
  ZMat G(int(vectors.size()), int(d));
  for (size_t i = 0; i < vectors.size(); ++i)
    for (size_t j = 0; j < d; ++j) G.at(int(i), int(j)) = vectors[i][j];
  return G;
}

IntLattice lattice_from_generators(const std::vector<ZVec>& vectors) {
  ZMat G = rows_from_vectors(vectors);
  bool all_zero = true;
  for (const auto& x : G.a)
    if (x != 0) { all_zero = false; break; }
  if (all_zero) throw zero_lattice_error();

  ZMat H = exact::hnf_rows(G);
  int d = G.cols;
  int r = 0;
  for (int i = 0; i < H.rows; ++i) {
    bool nz = false;
    for (int j = 0; j < d; ++j)
      if (H.at(i, j) != 0) { nz = true; break; }
    if (nz) ++r;
  }

  IntLattice L;
  L.ambient_dim = d;
  L.rank = r;
  L.basis = ZMat(d, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < d; ++j) L.basis.at(j, i) = H.at(i, j);

  if (r == d) {
    L.reduction = ZMat::identity(d);
  } else {
    // unimodular row reduction of the basis maps its column span onto the
    // span of the first r coordinate axes
    ZMat U;
    exact::hnf_rows(L.basis, &U);
    L.reduction = U;
  }
  return L;
}

std::optional<Int> lattice_index(const IntLattice& L) {
  if (L.rank != L.ambient_dim) return std::nullopt;
  Int d = exact::det(L.basis);
  return abs(d);
}

bool contains(const IntLattice& L, const ZVec& v) {
  if (int(v.size()) != L.ambient_dim)
    throw torwalk::error("zlattice: dimension mismatch in contains");
  auto x = exact::solve(L.basis, exact::qvec_from(v));
  if (!x) return false;
  for (const auto& c : *x)
    if (c.get_den() != 1) return false;
  return true;
}

Int quotient_cyclic_order(const IntLattice& L, const IntLattice& D) {
  if (L.ambient_dim != D.ambient_dim)
    throw torwalk::error("zlattice: dimension mismatch in quotient");
  if (L.rank != L.ambient_dim || D.rank != D.ambient_dim) throw rank_deficient_error();
  int d = L.ambient_dim;

  // express D's basis in L-coordinates; integral iff D <= L
  ZMat M(d, d);
  for (int j = 0; j < d; ++j) {
    QVec col(d);
    for (int i = 0; i < d; ++i) col[i] = Rat(D.basis.at(i, j));
    auto x = exact::solve(L.basis, col);
    if (!x) throw not_a_sublattice_error();
    for (int i = 0; i < d; ++i) {
      if ((*x)[i].get_den() != 1) throw not_a_sublattice_error();
      M.at(i, j) = (*x)[i].get_num();
    }
  }
  auto s = exact::snf(M);
  Int order = 1;
  for (const auto& f : s.diag) order *= f;
  // cyclic iff all invariant factors but the last are 1
  for (size_t i = 0; i + 1 < s.diag.size(); ++i)
    if (s.diag[i] != 1) throw not_cyclic_error();
  return order;
}

AnnulatorGroup annulator(const IntLattice& L) {
  if (L.rank != L.ambient_dim) throw rank_deficient_error();
  int d = L.ambient_dim;

  // solve B^T t in Z^d over the rationals: with U B^T V = S the annulator is
  // generated mod 1 by the columns of V * S^{-1}
  ZMat Bt = exact::transpose(L.basis);
  auto s = exact::snf(Bt);

  std::vector<QVec> gens;
  std::vector<long> ords;
  for (int i = 0; i < d; ++i) {
    if (s.diag[i] == 1) continue;
    QVec g(d);
    for (int r = 0; r < d; ++r) {
      Rat q(s.V.at(r, i), s.diag[i]);
      q.canonicalize();
      g[r] = exact::mod1(q);
    }
    gens.push_back(g);
    ords.push_back(s.diag[i].get_si());
  }

  AnnulatorGroup G;
  G.order = abs(exact::det(L.basis));
  // enumerate all combinations k_i * g_i, k_i in [0, s_i)
  std::vector<long> k(gens.size(), 0);
  while (true) {
    QVec p(d, Rat(0));
    for (size_t i = 0; i < gens.size(); ++i)
      for (int r = 0; r < d; ++r) p[r] += k[i] * gens[i][r];
    for (int r = 0; r < d; ++r) p[r] = exact::mod1(p[r]);
    G.points.push_back(p);
    size_t i = 0;
    for (; i < k.size(); ++i) {
      if (++k[i] < ords[i]) break;
      k[i] = 0;
    }
    if (i == k.size()) break;
  }
  if (Int(long(G.points.size())) != G.order)
    throw torwalk::error("zlattice: annulator enumeration mismatch");
  std::sort(G.points.begin(), G.points.end(),
            [](const QVec& a, const QVec& b) {
              for (size_t i = 0; i < a.size(); ++i) {
                int c = cmp(a[i], b[i]);
                if (c != 0) return c < 0;
              }
              return false;
            });
  return G;
}

SupportReduction reduce_support(const std::vector<ZVec>& vectors) {
  IntLattice L = lattice_from_generators(vectors);
  SupportReduction out;
  out.reduced_dim = L.rank;
  if (L.rank == L.ambient_dim) {
    out.transform = ZMat::identity(L.ambient_dim);
    out.reduced_vectors = vectors;
    return out;
  }
  out.transform = L.reduction;
  for (const auto& v : vectors) {
    ZVec w = exact::mul(out.transform, v);
    for (size_t i = out.reduced_dim; i < w.size(); ++i)
      if (w[i] != 0) throw torwalk::error("zlattice: reduction failed");
    w.resize(out.reduced_dim);
    out.reduced_vectors.push_back(w);
  }
  return out;
}

Rat dot(const ZVec& v, const QVec& t) {
  Rat s(0);
  for (size_t i = 0; i < v.size(); ++i) s += Rat(v[i]) * t[i];
  return s;
}

}  // namespace zlattice
