#include "toralact.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace toralact {

using cplx = std::complex<double>;
static constexpr double kPi = 3.14159265358979323846;

ToralAction action_from_generators(const std::vector<ZMat>& matrices, ActionKind kind) {
  if (matrices.empty()) throw torwalk::error("toralact: no generators");
  int rho = matrices[0].rows;
  for (const auto& m : matrices)
    if (m.rows != rho || m.cols != rho)
      throw torwalk::error("toralact: generators must be square and equal-sized");
  for (size_t i = 0; i < matrices.size(); ++i)
    for (size_t j = i + 1; j < matrices.size(); ++j)
      if (!(exact::mul(matrices[i], matrices[j]) == exact::mul(matrices[j], matrices[i])))
        throw non_commuting_error(int(i), int(j));

  ToralAction a;
  a.rho = rho;
  a.d = int(matrices.size());
  a.kind = kind;
  a.gens = matrices;
  for (const auto& m : matrices) {
    Int dt = exact::det(m);
    if (dt == 0) throw singular_error();
    if (kind == ActionKind::Automorphism && abs(dt) != 1) throw not_unimodular_error();
    a.dets.push_back(dt);
    ZMat mt = exact::transpose(m);
    a.dual_gens.push_back(mt);
    a.dual_adj.push_back(exact::adjugate(mt));
  }
  return a;
}

// cyclotomic polynomials of degree <= 4, coefficients low -> high
static const std::vector<std::vector<long>>& cyclotomics() {
  static std::vector<std::vector<long>> cs = {
      {-1, 1},            // m=1
      {1, 1},             // m=2
      {1, 1, 1},          // m=3
      {1, 0, 1},          // m=4
      {1, 1, 1, 1, 1},    // m=5
      {1, -1, 1},         // m=6
      {1, 0, 0, 0, 1},    // m=8
      {1, -1, 1, -1, 1},  // m=10
      {1, 0, -1, 0, 1},   // m=12
  };
  return cs;
}

// does N/delta have a root-of-unity eigenvalue? (exact, via scaled cyclotomics)
static bool has_unit_root_eigenvalue(const ZMat& N, const Int& delta) {
  auto cp = exact::charpoly(N);
  int rho = N.rows;
  for (const auto& phi : cyclotomics()) {
    int deg = int(phi.size()) - 1;
    if (deg > rho) continue;
    // delta^deg Phi(x/delta): coefficient j is phi[j] * delta^{deg-j}
    std::vector<Int> scaled(phi.size());
    Int pw = 1;
    for (int j = deg; j >= 0; --j) {
      scaled[j] = Int(phi[j]) * pw;
      pw *= delta;
    }
    if (exact::poly_divides(scaled, cp)) return true;
  }
  return false;
}

// numerator matrix and denominator of the dual (A^T)^l, exact
static void power_matrix(const ToralAction& a, const std::vector<long>& l, ZMat& num,
                         Int& den) {
  num = ZMat::identity(a.rho);
  den = 1;
  for (int i = 0; i < a.d; ++i) {
    long e = l[i];
    if (e > 0) {
      num = exact::mul(num, exact::pow(a.dual_gens[i], (unsigned long)e));
    } else if (e < 0) {
      num = exact::mul(num, exact::pow(a.dual_adj[i], (unsigned long)(-e)));
      Int dp;
      mpz_pow_ui(dp.get_mpz_t(), a.dets[i].get_mpz_t(), (unsigned long)(-e));
      den *= dp;
    }
  }
}

ErgodicityCertificate check_total_ergodicity(const ToralAction& a, int search_bound) {
  ErgodicityCertificate cert;

  if (a.rho == 1) {
    // scalar endomorphisms q_i: the dual action is free iff prod q_i^{l_i} = 1
    // only at l = 0, i.e. the prime-exponent vectors of |q_i| are independent
    bool all_big = true;
    for (const auto& q : a.dets) all_big = all_big && abs(q) >= 2;
    if (all_big) {
      std::vector<Int> plist;
      std::vector<std::vector<long>> rows(a.d);
      for (int i = 0; i < a.d; ++i) {
        Int q = abs(a.dets[i]);
        for (Int p = 2; q > 1; ++p) {
          if (p * p > q) p = q;  // remaining factor is prime
          while (q % p == 0) {
            size_t idx = 0;
            for (; idx < plist.size(); ++idx)
              if (plist[idx] == p) break;
            if (idx == plist.size()) {
              plist.push_back(p);
              for (auto& r : rows) r.resize(plist.size(), 0);
            }
            for (auto& r : rows) r.resize(plist.size(), 0);
            ++rows[i][idx];
            q /= p;
          }
        }
      }
      for (auto& r : rows) r.resize(plist.size(), 0);
      ZMat E(a.d, int(plist.size()));
      for (int i = 0; i < a.d; ++i)
        for (size_t j = 0; j < plist.size(); ++j) E.at(i, int(j)) = rows[i][j];
      if (exact::rank(E) == a.d) {
        cert.pass = true;
        cert.method = "multiplicative-determinants";
        return cert;
      }
    }
  }

  // bounded search: every A^l with 0 < ||l||_inf <= bound must avoid
  // root-of-unity eigenvalues (l and -l share them; scan half the box)
  cert.method = "cyclotomic-search";
  cert.bound = search_bound;
  std::vector<long> l(a.d, -search_bound);
  while (true) {
    bool is_zero = true, positive_side = false;
    for (int i = a.d - 1; i >= 0; --i)
      if (l[i] != 0) {
        is_zero = false;
        positive_side = l[i] > 0;
        break;
      }
    if (!is_zero && positive_side) {
      ZMat num;
      Int den;
      power_matrix(a, l, num, den);
      if (has_unit_root_eigenvalue(num, den)) {
        cert.pass = false;
        cert.witness = l;
        return cert;
      }
    }
    int i = 0;
    for (; i < a.d; ++i) {
      if (++l[i] <= search_bound) break;
      l[i] = -search_bound;
    }
    if (i == a.d) break;
  }
  cert.pass = true;
  return cert;
}

std::optional<ZVec> dual_apply(const ToralAction& a, const std::vector<long>& n,
                               const ZVec& k) {
  ZMat num;
  Int den;
  power_matrix(a, n, num, den);
  ZVec v = exact::mul(num, k);
  if (den != 1) {
    for (auto& x : v) {
      if (x % den != 0) return std::nullopt;
      x /= den;
    }
  }
  return v;
}

void TrigPoly::validate_real() const {
  for (const auto& [k, c] : coeffs) {
    bool zero = true;
    for (long x : k) zero = zero && x == 0;
    if (zero) throw torwalk::error("toralact: zero-mean polynomial has no constant term");
    std::vector<long> mk(k.size());
    for (size_t i = 0; i < k.size(); ++i) mk[i] = -k[i];
    auto it = coeffs.find(mk);
    if (it == coeffs.end() || std::abs(std::conj(it->second) - c) > 1e-14)
      throw torwalk::error("toralact: real polynomial needs c(-k) = conj(c(k))");
  }
}

double TrigPoly::norm_c() const {
  double s = 0;
  for (const auto& [k, c] : coeffs) s += std::abs(c);
  return s;
}

double TrigPoly::norm_l2_sq() const {
  double s = 0;
  for (const auto& [k, c] : coeffs) s += std::norm(c);
  return s;
}

double TrigPoly::eval(const std::vector<double>& x) const {
  cplx s(0, 0);
  for (const auto& [k, c] : coeffs) {
    double ph = 0;
    for (size_t i = 0; i < k.size(); ++i) ph += k[i] * x[i];
    s += c * std::polar(1.0, 2 * kPi * ph);
  }
  return s.real();
}

TrigPoly cosine_poly(int rho, const std::vector<long>& k) {
  TrigPoly f;
  f.rho = rho;
  std::vector<long> mk(k.size());
  for (size_t i = 0; i < k.size(); ++i) mk[i] = -k[i];
  f.coeffs[k] = cplx(0.5, 0.0);
  f.coeffs[mk] += cplx(0.5, 0.0);
  return f;
}

OrbitDecomposition orbit_decompose(const ToralAction& a, const std::vector<ZVec>& charset,
                                   int bound) {
  size_t m = charset.size();
  std::map<ZVec, size_t> index;
  for (size_t i = 0; i < m; ++i) index[charset[i]] = i;

  // union-find with offsets: chi_i = A^{off_i} chi_{root(i)}
  std::vector<size_t> parent(m);
  std::vector<std::vector<long>> off(m, std::vector<long>(a.d, 0));
  for (size_t i = 0; i < m; ++i) parent[i] = i;
  std::function<size_t(size_t)> find = [&](size_t x) -> size_t {
    if (parent[x] == x) return x;
    size_t r = find(parent[x]);
    for (int i = 0; i < a.d; ++i) off[x][i] += off[parent[x]][i];
    parent[x] = r;
    return r;
  };
  auto merge = [&](size_t from, size_t to, const std::vector<long>& n) {
    // relation: chi_to = A^n chi_from
    size_t rf = find(from), rt = find(to);
    if (rf == rt) {
      for (int i = 0; i < a.d; ++i)
        if (off[to][i] != off[from][i] + n[i]) throw ambiguous_orbit_error();
      return;
    }
    parent[rt] = rf;
    for (int i = 0; i < a.d; ++i) off[rt][i] = off[from][i] + n[i] - off[to][i];
  };

  std::vector<long> l(a.d, -bound);
  while (true) {
    bool is_zero = true;
    for (long x : l) is_zero = is_zero && x == 0;
    if (!is_zero) {
      ZMat num;
      Int den;
      power_matrix(a, l, num, den);
      for (size_t i = 0; i < m; ++i) {
        ZVec v = exact::mul(num, charset[i]);
        bool integral = true;
        if (den != 1)
          for (auto& x : v) {
            if (x % den != 0) {
              integral = false;
              break;
            }
            x /= den;
          }
        if (!integral) continue;
        auto it = index.find(v);
        if (it != index.end()) merge(i, it->second, l);
      }
    }
    int i = 0;
    for (; i < a.d; ++i) {
      if (++l[i] <= bound) break;
      l[i] = -bound;
    }
    if (i == a.d) break;
  }

  OrbitDecomposition out;
  out.bound = bound;
  std::map<size_t, std::vector<size_t>> classes;
  for (size_t i = 0; i < m; ++i) classes[find(i)].push_back(i);
  for (const auto& [root, members] : classes) {
    size_t rep = members[0];
    for (size_t i : members)
      if (charset[i] < charset[rep]) rep = i;
    Orbit orb;
    orb.representative = charset[rep];
    for (size_t i : members) {
      std::vector<long> rel(a.d);
      for (int dd = 0; dd < a.d; ++dd) rel[dd] = off[i][dd] - off[rep][dd];
      orb.members[rel] = charset[i];
    }
    out.orbits.push_back(orb);
  }
  return out;
}

SpectralDensity spectral_density(const ToralAction& a, const TrigPoly& f, int bound) {
  f.validate_real();
  std::vector<ZVec> charset;
  std::vector<cplx> cs;
  for (const auto& [k, c] : f.coeffs) {
    ZVec z(k.size());
    for (size_t i = 0; i < k.size(); ++i) z[i] = k[i];
    charset.push_back(z);
    cs.push_back(c);
  }
  auto dec = orbit_decompose(a, charset, bound);
  std::map<ZVec, cplx> coeff_of;
  for (size_t i = 0; i < charset.size(); ++i) coeff_of[charset[i]] = cs[i];

  SpectralDensity sd;
  sd.d = a.d;
  for (const auto& orb : dec.orbits) {
    std::map<std::vector<long>, cplx> amps;
    for (const auto& [offv, member] : orb.members) amps[offv] = coeff_of[member];
    sd.orbit_amps.push_back(amps);
  }
  return sd;
}

double SpectralDensity::eval(const std::vector<double>& t) const {
  double total = 0;
  for (const auto& amps : orbit_amps) {
    cplx g(0, 0);
    for (const auto& [l, c] : amps) {
      double ph = 0;
      for (size_t i = 0; i < l.size(); ++i) ph += l[i] * t[i];
      g += c * std::polar(1.0, 2 * kPi * ph);
    }
    total += std::norm(g);
  }
  return total;
}

double SpectralDensity::fourier(const std::vector<long>& n) const {
  cplx total(0, 0);
  for (const auto& amps : orbit_amps) {
    std::vector<long> shifted(n.size());
    for (const auto& [l, c] : amps) {
      for (size_t i = 0; i < n.size(); ++i) shifted[i] = l[i] + n[i];
      auto it = amps.find(shifted);
      if (it != amps.end()) total += it->second * std::conj(c);
    }
  }
  return total.real();
}

std::vector<std::vector<long>> SpectralDensity::fourier_support() const {
  std::set<std::vector<long>> supp;
  for (const auto& amps : orbit_amps)
    for (const auto& [l1, c1] : amps)
      for (const auto& [l2, c2] : amps) {
        std::vector<long> diff(l1.size());
        for (size_t i = 0; i < l1.size(); ++i) diff[i] = l1[i] - l2[i];
        supp.insert(diff);
      }
  return {supp.begin(), supp.end()};
}

// midpoint quadrature of w * phi_f over T^dim
static double density_integral(const rwalk::StepDistribution& nu, const SpectralDensity& sd,
                               int N) {
  int d = nu.dim;
  size_t total = 1;
  for (int i = 0; i < d; ++i) total *= size_t(N);
  std::vector<int> idx(d, 0);
  std::vector<double> t(d);
  long double acc = 0;
  for (size_t c = 0;; ++c) {
    for (int i = 0; i < d; ++i) t[i] = (idx[i] + 0.5) / N;
    cplx z = rwalk::psi(nu, t);
    double den = std::norm(1.0 - z);
    if (den > 1e-28) acc += (1.0 - std::norm(z)) / den * sd.eval(t);
    if (c + 1 == total) break;
    int i = 0;
    for (; i < d; ++i) {
      if (++idx[i] < N) break;
      idx[i] = 0;
    }
  }
  return double(acc / total);
}

double variance_against(const rwalk::KernelMeasure& kernel, const SpectralDensity& sd,
                        int start_N, double tol, int max_N) {
  double total = 0;
  std::vector<double> t(kernel.dim);
  for (const auto& [p, w] : kernel.atoms) {
    for (int i = 0; i < kernel.dim; ++i) t[i] = p[i].get_d();
    total += w * sd.eval(t);
  }
  if (kernel.circle) {
    // phi_f restricted to base + s*direction is a 1-d trig polynomial;
    // midpoint in s is exact once N exceeds twice the largest frequency
    long maxfreq = 8;
    for (const auto& diff : sd.fourier_support()) {
      long f = 0;
      for (size_t i = 0; i < diff.size(); ++i)
        f += diff[i] * kernel.circle->direction[i].get_si();
      maxfreq = std::max(maxfreq, std::labs(f));
    }
    int N = 64;
    while (N < 2 * maxfreq + 8) N *= 2;
    for (const auto& [base, w] : kernel.circle->bases) {
      long double acc = 0;
      for (int j = 0; j < N; ++j) {
        double s = (j + 0.5) / N;
        for (int i = 0; i < kernel.dim; ++i)
          t[i] = base[i].get_d() + s * kernel.circle->direction[i].get_d();
        acc += sd.eval(t);
      }
      total += w * double(acc / N);
    }
  }
  if (kernel.has_density) {
    double prev = density_integral(kernel.density_walk, sd, start_N);
    double prev_rich = 0;
    bool have = false;
    double value = prev;
    for (int N = 2 * start_N; N <= max_N; N *= 2) {
      double cur = density_integral(kernel.density_walk, sd, N);
      double rich = 2 * cur - prev;
      value = rich;
      if (have && std::abs(rich - prev_rich) < tol) break;
      prev = cur;
      prev_rich = rich;
      have = true;
    }
    total += value / kernel.density_norm;
  }
  return total;
}

CoboundaryReport coboundary_obstruction(const ToralAction& a, const TrigPoly& f, int bound) {
  auto sd = spectral_density(a, f, bound);
  CoboundaryReport r;
  r.phi_at_zero = sd.eval(std::vector<double>(a.d, 0.0));
  r.is_mixed_coboundary_obstructed = std::abs(r.phi_at_zero) <= 1e-10;
  return r;
}

// --- gallery ---

static ZMat zmat(int n, std::initializer_list<long> entries) {
  ZMat m(n, n);
  int i = 0;
  for (long e : entries) {
    m.a[i] = e;
    ++i;
  }
  return m;
}

std::vector<std::string> gallery_names() {
  return {"t3-units-a", "t3-units-b", "t4-companion", "t4-blocks", "t3-rw",
          "t1-multiplicative", "t1-baryc-235"};
}

GalleryEntry example_gallery(const std::string& name) {
  using exact::Rat;
  using rwalk::StepDistribution;
  GalleryEntry e;
  e.name = name;
  if (name == "t3-units-a" || name == "t3-rw") {
    ZMat A1 = zmat(3, {-3, -3, 1, 10, 9, -3, -30, -26, 9});
    ZMat A2 = zmat(3, {11, 1, -1, -10, -1, 1, 10, 2, -1});
    e.action = action_from_generators({A1, A2}, ActionKind::Automorphism);
    e.note = "fundamental-unit pair for x^3 - 12x - 10 acting on T^3";
    if (name == "t3-rw") {
      StepDistribution nu;
      nu.dim = 2;
      nu.steps = {{2, 1}, {1, -2}, {-3, 1}};
      nu.weights = {Rat(1, 3), Rat(1, 3), Rat(1, 3)};
      for (auto& w : nu.weights) w.canonicalize();
      e.walk = nu;
      e.composed = {zmat(3, {29, 23, -8, -80, -67, 23, 230, 196, -67}),
                    zmat(3, {-13, -11, 4, 40, 35, -11, -110, -92, 35}),
                    zmat(3, {107, 16, -7, -70, 23, 16, 160, 122, 23})};
      e.note = "B1 = A1^2 A2, B2 = A1 A2^-2, B3 = A1^-3 A2 driving the 2-d walk";
    }
  } else if (name == "t3-units-b") {
    ZMat A1 = zmat(3, {-59, -245, 85, 170, 706, -245, -490, -2035, 706});
    ZMat A2 = zmat(3, {161, 4, -18, -36, -1, 4, 8, 0, -1});
    e.action = action_from_generators({A1, A2}, ActionKind::Automorphism);
    e.note = "fundamental-unit pair for x^3 - 9x - 2 acting on T^3";
  } else if (name == "t4-companion") {
    ZMat A = zmat(4, {0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, -1, -5, -7, -5});
    ZMat B = A;
    for (int i = 0; i < 4; ++i) B.at(i, i) += 1;
    e.action = action_from_generators({A, B}, ActionKind::Automorphism);
    e.note = "companion matrix of x^4 + 5x^3 + 7x^2 + 5x + 1 and its shift by I";
  } else if (name == "t4-blocks") {
    // block construction diag(M1^p, M2^q): free, but elements with one zero
    // block exponent fix characters supported on the other block, so the
    // ergodicity certificate reports a witness
    ZMat M1 = zmat(2, {0, 1, 1, 1});
    ZMat M2 = zmat(2, {1, 1, 1, 2});
    ZMat A1(4, 4), A2(4, 4);
    ZMat M2sq = exact::mul(M2, M2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        A1.at(i, j) = M1.at(i, j);
        A2.at(i, j) = M1.at(i, j);
        A1.at(2 + i, 2 + j) = M2.at(i, j);
        A2.at(2 + i, 2 + j) = M2sq.at(i, j);
      }
    e.action = action_from_generators({A1, A2}, ActionKind::Automorphism);
    e.note = "free block action that fails total ergodicity";
  } else if (name == "t1-multiplicative" || name == "t1-baryc-235") {
    e.action = action_from_generators({zmat(1, {2}), zmat(1, {3}), zmat(1, {5})},
                                      ActionKind::Endomorphism);
    e.note = "x -> 2x, 3x, 5x mod 1";
    if (name == "t1-baryc-235") {
      StepDistribution nu;
      nu.dim = 3;
      nu.steps = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {0, 1, 1}};
      nu.weights = {Rat(1, 8), Rat(2, 8), Rat(1, 8), Rat(3, 8), Rat(1, 8)};
      for (auto& w : nu.weights) w.canonicalize();
      e.walk = nu;
      e.note = "barycenter (f(2x) + 2 f(3x) + f(5x) + 3 f(6x) + f(15x))/8";
    }
  } else {
    throw unknown_gallery_error(name);
  }
  return e;
}

}  // namespace toralact
