#include "rwalk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "pointkey.hpp"

namespace rwalk {

using cplx = std::complex<double>;
using exact::ZMat;

static constexpr double kPi = 3.14159265358979323846;

void StepDistribution::validate() const {
  if (dim < 1) throw torwalk::error("rwalk: dimension must be positive");
  if (steps.empty()) throw torwalk::error("rwalk: at least one step required");
  if (steps.size() != weights.size())
    throw torwalk::error("rwalk: steps/weights size mismatch");
  Rat total(0);
  for (const auto& w : weights) {
    if (w <= 0) throw torwalk::error("rwalk: weights must be positive");
    total += w;
  }
  if (total != 1) throw torwalk::error("rwalk: weights must sum to 1 exactly");
  std::set<std::vector<long>> seen;
  for (const auto& s : steps) {
    if (int(s.size()) != dim) throw torwalk::error("rwalk: step dimension mismatch");
    if (!seen.insert(s).second) throw torwalk::error("rwalk: duplicate step");
  }
}

static ZVec to_zvec(const std::vector<long>& v) {
  ZVec z(v.size());
  for (size_t i = 0; i < v.size(); ++i) z[i] = v[i];
  return z;
}

WalkAnalysis analyze(const StepDistribution& nu) {
  nu.validate();
  WalkAnalysis an;
  an.nu = nu;
  int d = nu.dim;
  size_t J = nu.count();

  std::vector<ZVec> gens;
  for (const auto& s : nu.steps) gens.push_back(to_zvec(s));
  an.L = zlattice::lattice_from_generators(gens);
  if (an.L.rank < d) throw not_reduced_error();
  an.d_w = d;

  if (J == 1) {
    an.D.ambient_dim = d;
    an.D.rank = 0;
    an.D.basis = ZMat(d, 0);
    an.D.reduction = ZMat::identity(d);
  } else {
    std::vector<ZVec> diffs;
    for (size_t j = 1; j < J; ++j) {
      ZVec v(d);
      for (int i = 0; i < d; ++i) v[i] = Int(nu.steps[j][i]) - Int(nu.steps[0][i]);
      diffs.push_back(v);
    }
    an.D = zlattice::lattice_from_generators(diffs);
  }
  an.d0_w = an.D.rank;

  an.mean.assign(d, Rat(0));
  for (size_t j = 0; j < J; ++j)
    for (int i = 0; i < d; ++i) an.mean[i] += nu.weights[j] * Rat(nu.steps[j][i]);
  an.centered = true;
  for (const auto& m : an.mean)
    if (m != 0) an.centered = false;

  an.lambda = QMat(d, d);
  for (size_t j = 0; j < J; ++j)
    for (int u = 0; u < d; ++u)
      for (int v = 0; v < d; ++v)
        an.lambda.at(u, v) += nu.weights[j] * Rat(nu.steps[j][u]) * Rat(nu.steps[j][v]);
  for (int u = 0; u < d; ++u)
    for (int v = 0; v < d; ++v) an.lambda.at(u, v) -= an.mean[u] * an.mean[v];
  an.lambda_det = exact::qmat_det(an.lambda);

  if (an.d0_w > 0 && an.d0_w < d) {
    // lambda maps span(D) into itself; solve lambda * B = B * M column-wise
    an.lambda0_in_dbasis = QMat(an.d0_w, an.d0_w);
    for (int j = 0; j < an.d0_w; ++j) {
      QVec rhs(d, Rat(0));
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) rhs[i] += an.lambda.at(i, k) * Rat(an.D.basis.at(k, j));
      auto col = exact::solve(an.D.basis, rhs);
      if (!col) throw torwalk::error("rwalk: difference span not lambda-invariant");
      for (int i = 0; i < an.d0_w; ++i) an.lambda0_in_dbasis.at(i, j) = (*col)[i];
    }
  }

  if (J == 1)
    an.classification = WalkClass::Deterministic;
  else if (an.centered && d == 1)
    an.classification = WalkClass::RecurrentD1;
  else if (an.centered && d == 2)
    an.classification = WalkClass::RecurrentD2;
  else
    an.classification = WalkClass::Transient;

  an.gamma = zlattice::annulator(an.L);

  if (an.d0_w == d) {
    an.a0 = *zlattice::lattice_index(an.D);
    an.quotient_v = zlattice::quotient_cyclic_order(an.L, an.D);
    an.gamma1_discrete = zlattice::annulator(an.D);
    an.has_circle_component = false;
  } else {
    an.quotient_v = 0;
    an.has_circle_component = true;
    if (an.d0_w == 0) {
      // deterministic in dimension 1: Gamma_1 is the whole circle
      an.a0 = 1;
      an.gamma1_discrete.order = 1;
      an.gamma1_discrete.points = {QVec(d, Rat(0))};
      an.circle_direction = ZVec(d);
      an.circle_direction[0] = 1;
    } else {
      // rank d-1: split off the circle via the support reduction of D
      std::vector<ZVec> dgens;
      for (int c = 0; c < an.D.rank; ++c) {
        ZVec v(d);
        for (int i = 0; i < d; ++i) v[i] = an.D.basis.at(i, c);
        dgens.push_back(v);
      }
      auto red = zlattice::reduce_support(dgens);
      auto Dred = zlattice::lattice_from_generators(red.reduced_vectors);
      an.a0 = *zlattice::lattice_index(Dred);
      auto Gred = zlattice::annulator(Dred);
      ZMat Ct = exact::transpose(red.transform);
      an.gamma1_discrete.order = Gred.order;
      for (const auto& gp : Gred.points) {
        QVec lift(d, Rat(0));
        for (int i = 0; i < d; ++i) {
          Rat s(0);
          for (int k = 0; k < an.d0_w; ++k) s += Rat(Ct.at(i, k)) * gp[k];
          lift[i] = exact::mod1(s);
        }
        an.gamma1_discrete.points.push_back(lift);
      }
      an.circle_direction = ZVec(d);
      for (int i = 0; i < d; ++i) an.circle_direction[i] = red.transform.at(d - 1, i);
    }
  }
  return an;
}

cplx psi(const StepDistribution& nu, const std::vector<double>& t) {
  cplx s(0, 0);
  for (size_t j = 0; j < nu.count(); ++j) {
    double ph = 0;
    for (int i = 0; i < nu.dim; ++i) ph += nu.steps[j][i] * t[i];
    s += nu.weights[j].get_d() * std::polar(1.0, 2 * kPi * ph);
  }
  return s;
}

bool psi_is_one(const StepDistribution& nu, const QVec& t) {
  for (const auto& s : nu.steps)
    if (zlattice::dot(to_zvec(s), t).get_den() != 1) return false;
  return true;
}

bool psi_modulus_one(const StepDistribution& nu, const QVec& t) {
  for (size_t j = 1; j < nu.count(); ++j) {
    ZVec diff(nu.dim);
    for (int i = 0; i < nu.dim; ++i) diff[i] = Int(nu.steps[j][i]) - Int(nu.steps[0][i]);
    if (zlattice::dot(diff, t).get_den() != 1) return false;
  }
  return true;
}

// --- exact distribution ---

std::vector<long> ExactDist::unpack(unsigned long long key) const {
  return pointkey::unpack(key, dim);
}

Rat ExactDist::prob(const std::vector<long>& point) const {
  auto it = numer.find(pointkey::pack(point));
  if (it == numer.end()) return Rat(0);
  Rat r(it->second, denom);
  r.canonicalize();
  return r;
}

double ExactDist::prob_d(const std::vector<long>& point) const {
  return prob(point).get_d();
}

ExactDist exact_distribution(const StepDistribution& nu, long n, size_t support_cap) {
  nu.validate();
  ExactDist out;
  out.dim = nu.dim;
  out.n = n;

  Int den = 1;
  for (const auto& w : nu.weights) den = lcm(den, Int(w.get_den()));
  std::vector<Int> a(nu.count());
  for (size_t j = 0; j < nu.count(); ++j) {
    Rat q = nu.weights[j] * Rat(den);
    a[j] = q.get_num();  // q has denominator 1
  }

  std::unordered_map<unsigned long long, Int> cur;
  cur[pointkey::pack(std::vector<long>(nu.dim, 0))] = 1;
  std::vector<long> pt(nu.dim), npt(nu.dim);
  for (long step = 0; step < n; ++step) {
    std::unordered_map<unsigned long long, Int> next;
    next.reserve(cur.size() * 2);
    for (const auto& [key, c] : cur) {
      auto p = pointkey::unpack(key, nu.dim);
      for (size_t j = 0; j < nu.count(); ++j) {
        for (int i = 0; i < nu.dim; ++i) npt[i] = p[i] + nu.steps[j][i];
        next[pointkey::pack(npt)] += a[j] * c;
      }
    }
    if (next.size() > support_cap) throw box_cap_error();
    cur = std::move(next);
  }
  Int denn;
  mpz_pow_ui(denn.get_mpz_t(), den.get_mpz_t(), (unsigned long)n);
  out.denom = denn;
  out.numer = std::move(cur);
  return out;
}

// --- grid machinery ---
//
// Iterates the integer grid {j/N : j in [0,N)^d} with incremental phase
// bookkeeping: each odometer tick on axis i shifts every step dot product by
// step[i] mod N (a rollover from N-1 to 0 is congruent to +1).

namespace {

struct GridTables {
  int d, N, J;
  std::vector<cplx> ex;           // ex[m] = e^{2 pi i m / N}
  std::vector<double> pj;         // step weights
  std::vector<std::vector<int>> cstep;  // cstep[j][i] = step_j[i] mod N
  std::vector<int> cp;            // p[i] mod N

  GridTables(const StepDistribution& nu, const std::vector<long>& p, int N_) {
    d = nu.dim;
    N = N_;
    J = int(nu.count());
    ex.resize(N);
    for (int m = 0; m < N; ++m) ex[m] = std::polar(1.0, 2 * kPi * m / N);
    pj.resize(J);
    cstep.assign(J, std::vector<int>(d));
    for (int j = 0; j < J; ++j) {
      pj[j] = nu.weights[j].get_d();
      for (int i = 0; i < d; ++i) cstep[j][i] = int(((nu.steps[j][i] % N) + N) % N);
    }
    cp.resize(d);
    for (int i = 0; i < d; ++i) cp[i] = int(((p[i] % N) + N) % N);
  }
};

// calls f(z = Psi(j/N), dot_p = <p,j> mod N) for every grid point
template <class F>
void scan_grid(const GridTables& g, F&& f) {
  std::vector<int> idx(g.d, 0);
  std::vector<int> dots(g.J, 0);
  int dotp = 0;
  size_t total = 1;
  for (int i = 0; i < g.d; ++i) total *= size_t(g.N);
  for (size_t c = 0;; ++c) {
    cplx z(0, 0);
    for (int j = 0; j < g.J; ++j) z += g.pj[j] * g.ex[dots[j]];
    f(z, dotp);
    if (c + 1 == total) break;
    int i = 0;
    while (true) {
      // every tick (increment or rollover) adds the axis coefficient
      for (int j = 0; j < g.J; ++j) {
        dots[j] += g.cstep[j][i];
        if (dots[j] >= g.N) dots[j] -= g.N;
      }
      dotp += g.cp[i];
      if (dotp >= g.N) dotp -= g.N;
      if (++idx[i] < g.N) break;
      idx[i] = 0;
      ++i;
    }
  }
}

cplx cpow_int(cplx z, long e) {
  cplx r(1, 0);
  while (e) {
    if (e & 1) r *= z;
    e >>= 1;
    if (e) z *= z;
  }
  return r;
}

// sum_{k=1}^{K} z^k
cplx geom_sum(cplx z, long K) {
  cplx om = 1.0 - z;
  if (std::abs(om) < 1e-9)
    return double(K) + (z - 1.0) * (double(K) * (K + 1) / 2.0);
  return z * (1.0 - cpow_int(z, K)) / om;
}

// sum_{k=1}^{n-1} (n-k) z^k
cplx weighted_geom_sum(cplx z, long n) {
  double nd = double(n);
  cplx om = 1.0 - z;
  if (std::abs(om) < 5e-8) {
    // Taylor around z=1; the closed form cancels catastrophically there
    double s1 = nd * (nd - 1) / 2;                        // sum (n-k)
    double s2 = (nd * nd * nd - nd) / 6;                  // sum (n-k) k
    double sq = (nd - 1) * nd * (2 * nd - 1) / 6;         // sum k^2, k<n
    double cb = (nd - 1) * nd / 2 * ((nd - 1) * nd / 2);  // sum k^3, k<n
    double w2 = nd * (sq - nd * (nd - 1) / 2.0) - (cb - sq);  // sum (n-k)k(k-1)
    cplx dz = z - 1.0;
    return s1 + dz * s2 + dz * dz * (w2 / 2.0);
  }
  cplx zn = cpow_int(z, n);
  cplx s1 = (z - zn) / om;
  cplx s2 = z * (1.0 - nd * zn / z + (nd - 1) * zn) / (om * om);
  return nd * s1 - s2;
}

double grid_volume(int d, int N) {
  double v = 1;
  for (int i = 0; i < d; ++i) v *= N;
  return v;
}

}  // namespace

double lambda_max(const WalkAnalysis& an) {
  int d = an.d_w;
  std::vector<double> L(size_t(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) L[size_t(i) * d + j] = an.lambda.at(i, j).get_d();
  std::vector<double> v(d, 1.0), w(d);
  double lam = 0;
  for (int it = 0; it < 200; ++it) {
    double nrm = 0;
    for (int i = 0; i < d; ++i) {
      w[i] = 0;
      for (int j = 0; j < d; ++j) w[i] += L[size_t(i) * d + j] * v[j];
      nrm += w[i] * w[i];
    }
    nrm = std::sqrt(nrm);
    if (nrm == 0) return 0;
    for (int i = 0; i < d; ++i) v[i] = w[i] / nrm;
    lam = nrm;
  }
  return lam;
}

static double wrap_tail(const StepDistribution& nu, long k, const std::vector<long>& p, int N) {
  // Gaussian estimate of sum_{m != 0} P(Z_k = p + N m); heuristic, reported
  // alongside grid values, never silently absorbed
  auto an = analyze(nu);
  double lm = lambda_max(an);
  double mean_norm = 0;
  for (const auto& m : an.mean) mean_norm += m.get_d() * m.get_d();
  mean_norm = std::sqrt(mean_norm);
  double pn = 0;
  for (long x : p) pn = std::max(pn, double(std::labs(x)));
  double r = N / 2.0 - pn - k * mean_norm;
  if (r <= 0) return 1.0;
  return 2.0 * nu.dim * std::exp(-r * r / (2.0 * k * lm));
}

GridValue grid_return_prob(const StepDistribution& nu, long k, const std::vector<long>& p, int N) {
  GridTables g(nu, p, N);
  long double acc = 0;
  scan_grid(g, [&](cplx z, int dotp) {
    cplx zk = cpow_int(z, k);
    acc += zk.real() * g.ex[dotp].real() + zk.imag() * g.ex[dotp].imag();  // Re(z^k e^{-i th})
  });
  GridValue out;
  out.value = double(acc / grid_volume(nu.dim, N));
  out.wrap_bound = wrap_tail(nu, std::max(k, 1L), p, N);
  return out;
}

std::vector<double> grid_return_probs(const StepDistribution& nu, long n_max,
                                      const std::vector<long>& p, int N) {
  GridTables g(nu, p, N);
  size_t total = size_t(grid_volume(nu.dim, N));
  if (total > (1u << 24))
    throw torwalk::error("grid_return_probs: grid too large for the per-k sweep");
  std::vector<cplx> z(total), run(total, cplx(1, 0));
  std::vector<float> cph(total), sph(total);
  size_t c = 0;
  scan_grid(g, [&](cplx zz, int dotp) {
    z[c] = zz;
    cph[c] = float(g.ex[dotp].real());
    sph[c] = float(g.ex[dotp].imag());
    ++c;
  });
  std::vector<double> out(n_max + 1);
  out[0] = (p == std::vector<long>(nu.dim, 0)) ? 1.0 : 0.0;
  double vol = grid_volume(nu.dim, N);
  for (long k = 1; k <= n_max; ++k) {
    long double acc = 0;
    for (size_t i = 0; i < total; ++i) {
      run[i] *= z[i];
      acc += run[i].real() * cph[i] + run[i].imag() * sph[i];
    }
    out[k] = double(acc / vol);
  }
  return out;
}

std::vector<double> grid_return_prob_multi(const StepDistribution& nu, long k,
                                           const std::vector<std::vector<long>>& ps, int N) {
  if (ps.empty()) return {};
  size_t m = ps.size();
  // one scan; per-p phase dots maintained alongside the step dots
  GridTables g(nu, ps[0], N);
  std::vector<std::vector<int>> cps(m, std::vector<int>(nu.dim));
  for (size_t t = 0; t < m; ++t)
    for (int i = 0; i < nu.dim; ++i) cps[t][i] = int(((ps[t][i] % N) + N) % N);
  std::vector<int> dots(m, 0);
  std::vector<long double> acc(m, 0);

  std::vector<int> idx(nu.dim, 0);
  std::vector<int> sdots(g.J, 0);
  size_t total = 1;
  for (int i = 0; i < nu.dim; ++i) total *= size_t(N);
  for (size_t c = 0;; ++c) {
    cplx z(0, 0);
    for (int j = 0; j < g.J; ++j) z += g.pj[j] * g.ex[sdots[j]];
    cplx zk = cpow_int(z, k);
    for (size_t t = 0; t < m; ++t)
      acc[t] += zk.real() * g.ex[dots[t]].real() + zk.imag() * g.ex[dots[t]].imag();
    if (c + 1 == total) break;
    int i = 0;
    while (true) {
      for (int j = 0; j < g.J; ++j) {
        sdots[j] += g.cstep[j][i];
        if (sdots[j] >= N) sdots[j] -= N;
      }
      for (size_t t = 0; t < m; ++t) {
        dots[t] += cps[t][i];
        if (dots[t] >= N) dots[t] -= N;
      }
      if (++idx[i] < N) break;
      idx[i] = 0;
      ++i;
    }
  }
  std::vector<double> out(m);
  double vol = grid_volume(nu.dim, N);
  for (size_t t = 0; t < m; ++t) out[t] = double(acc[t] / vol);
  return out;
}

GridValue green_sum(const StepDistribution& nu, const std::vector<long>& p, long K, int N) {
  auto an = analyze(nu);
  if (an.classification == WalkClass::RecurrentD1 || an.classification == WalkClass::RecurrentD2)
    throw not_transient_error();

  GridTables g(nu, p, N);
  long double acc = 0;
  scan_grid(g, [&](cplx z, int dotp) {
    cplx G = geom_sum(z, K);
    acc += 2.0 * g.ex[dotp].real() * G.real();  // P(Z_k=p) + P(Z_k=-p) pairing
  });
  GridValue out;
  bool is_zero = true;
  for (long x : p) is_zero = is_zero && x == 0;
  out.value = double(acc / grid_volume(nu.dim, N)) + (is_zero ? 1.0 : 0.0);

  // LLT tail for centered walks, d >= 3; drift tails decay exponentially
  if (an.centered && an.d_w >= 3) {
    double v = double(an.quotient_v.get_d());
    double dens = an.a0.get_d() / std::sqrt(an.lambda_det.get_d());
    double tail = 2.0 / v * dens * std::pow(2 * kPi, -an.d_w / 2.0) * 2.0 / (an.d_w - 2) *
                  std::pow(double(K), -(an.d_w - 2) / 2.0);
    if (zlattice::contains(an.L, to_zvec(p))) out.tail_estimate = tail;
  }
  out.value += out.tail_estimate;

  double wb = 0;
  for (long k = 1; k <= K; ++k) wb += wrap_tail(nu, k, p, N);
  out.wrap_bound = wb;
  return out;
}

GridValue expected_self_intersections(const StepDistribution& nu, long n,
                                      const std::vector<long>& p, int N) {
  GridTables g(nu, p, N);
  long double acc = 0;
  scan_grid(g, [&](cplx z, int dotp) {
    cplx W = weighted_geom_sum(z, n);
    acc += 2.0 * g.ex[dotp].real() * W.real();
  });
  GridValue out;
  bool is_zero = true;
  for (long x : p) is_zero = is_zero && x == 0;
  out.value = double(acc / grid_volume(nu.dim, N)) + (is_zero ? double(n) : 0.0);
  double wb = 0;
  for (long k = 1; k < n; ++k) wb += double(n - k) * wrap_tail(nu, k, p, N);
  out.wrap_bound = wb;
  return out;
}

Rat expected_self_intersections_exact(const StepDistribution& nu, long n,
                                      const std::vector<long>& p) {
  // n 1_{p=0} + sum_{k<n} (n-k) [P(Z_k=p) + P(Z_k=-p)] by stepwise convolution
  bool is_zero = true;
  for (long x : p) is_zero = is_zero && x == 0;
  Rat total = is_zero ? Rat(n) : Rat(0);
  std::vector<long> mp(p.size());
  for (size_t i = 0; i < p.size(); ++i) mp[i] = -p[i];
  for (long k = 1; k < n; ++k) {
    auto dist = exact_distribution(nu, k);
    total += Rat(n - k) * (dist.prob(p) + dist.prob(mp));
  }
  return total;
}

double w_density(const StepDistribution& nu, const std::vector<double>& t) {
  cplx z = psi(nu, t);
  double den = std::norm(1.0 - z);
  if (den < 1e-24) throw singularity_error();
  return (1.0 - std::norm(z)) / den;
}

// midpoint tensor quadrature of w on the grid {(2j+1)/(2N)}; power-of-two N
// keeps every node off the rational annulator points
static double cw_midpoint(const StepDistribution& nu, int N) {
  int d = nu.dim;
  int J = int(nu.count());
  int M = 2 * N;
  std::vector<cplx> ex(M);
  for (int m = 0; m < M; ++m) ex[m] = std::polar(1.0, kPi * m / N);
  std::vector<double> pj(J);
  std::vector<std::vector<int>> cs(J, std::vector<int>(d));
  std::vector<int> dots(J, 0);
  for (int j = 0; j < J; ++j) {
    pj[j] = nu.weights[j].get_d();
    for (int i = 0; i < d; ++i) cs[j][i] = int((((2 * nu.steps[j][i]) % M) + M) % M);
    int init = 0;
    for (int i = 0; i < d; ++i) init += int(((nu.steps[j][i] % M) + M) % M);
    dots[j] = init % M;
  }
  std::vector<int> idx(d, 0);
  size_t total = 1;
  for (int i = 0; i < d; ++i) total *= size_t(N);
  long double acc = 0;
  for (size_t c = 0;; ++c) {
    cplx z(0, 0);
    for (int j = 0; j < J; ++j) z += pj[j] * ex[dots[j]];
    double den = std::norm(1.0 - z);
    if (den > 1e-28) acc += (1.0 - std::norm(z)) / den;
    if (c + 1 == total) break;
    int i = 0;
    while (true) {
      for (int j = 0; j < J; ++j) {
        dots[j] += cs[j][i];
        if (dots[j] >= M) dots[j] -= M;
      }
      if (++idx[i] < N) break;
      idx[i] = 0;
      ++i;
    }
  }
  return double(acc / total);
}

double c_w(const StepDistribution& nu, int start_N, double tol, int max_N) {
  auto an = analyze(nu);
  if (an.classification == WalkClass::RecurrentD1 || an.classification == WalkClass::RecurrentD2)
    throw not_transient_error();
  double prev = cw_midpoint(nu, start_N);
  double prev_rich = 0;
  bool have_rich = false;
  for (int N = 2 * start_N; N <= max_N; N *= 2) {
    double cur = cw_midpoint(nu, N);
    double rich = 2 * cur - prev;  // first-order term from the w singularity
    if (have_rich && std::abs(rich - prev_rich) < tol) return rich;
    prev = cur;
    prev_rich = rich;
    have_rich = true;
  }
  return prev_rich;
}

Rat K_constant(const WalkAnalysis& an) {
  if (an.classification == WalkClass::RecurrentD1 ||
      an.classification == WalkClass::RecurrentD2)
    throw not_transient_error();
  if (an.d_w > 1) return Rat(0);
  Rat m = an.mean[0];
  if (m == 0) return Rat(0);
  Rat k = 1 / abs(m);
  return k;
}

double KernelMeasure::atom_mass() const {
  double s = 0;
  for (const auto& [p, w] : atoms) s += w;
  if (circle)
    for (const auto& [p, w] : circle->bases) s += w;
  return s;
}

KernelMeasure gamma1_measure(const WalkAnalysis& an) {
  KernelMeasure k;
  k.dim = an.d_w;
  k.norm_kind = KernelMeasure::Normalization::Cn;
  k.C = 1;
  if (!an.has_circle_component) {
    double w = 1.0 / an.gamma1_discrete.order.get_d();
    for (const auto& p : an.gamma1_discrete.points) k.atoms.push_back({p, w});
  } else {
    KernelMeasure::Circle c;
    c.direction = an.circle_direction;
    double w = 1.0 / an.gamma1_discrete.order.get_d();
    for (const auto& p : an.gamma1_discrete.points) c.bases.push_back({p, w});
    k.circle = c;
  }
  return k;
}

KernelMeasure limit_kernel(const WalkAnalysis& an) {
  KernelMeasure k;
  k.dim = an.d_w;
  switch (an.classification) {
    case WalkClass::RecurrentD1: {
      k.norm_kind = KernelMeasure::Normalization::PathDependentVn;
      k.C = std::numeric_limits<double>::quiet_NaN();
      double w = 1.0 / an.gamma.order.get_d();
      for (const auto& p : an.gamma.points) k.atoms.push_back({p, w});
      break;
    }
    case WalkClass::RecurrentD2: {
      k.norm_kind = KernelMeasure::Normalization::CnLogN;
      // E V_n ~ C n log n with C = Card(Gamma) det(Lambda)^{-1/2} / pi.
      // Via a0 this is pi^{-1} a0 det^{-1/2} / Card(L/D): the printed form
      // without the quotient-order divisor holds only for strictly
      // aperiodic walks.
      k.C = an.gamma.order.get_d() / std::sqrt(an.lambda_det.get_d()) / kPi;
      double w = 1.0 / an.gamma.order.get_d();
      for (const auto& p : an.gamma.points) k.atoms.push_back({p, w});
      break;
    }
    case WalkClass::Deterministic: {
      k.norm_kind = KernelMeasure::Normalization::Cn;
      k.C = 1.0;
      double w = 1.0 / an.gamma.order.get_d();
      for (const auto& p : an.gamma.points) k.atoms.push_back({p, w});
      break;
    }
    case WalkClass::Transient: {
      k.norm_kind = KernelMeasure::Normalization::Cn;
      double cw = c_w(an.nu);
      if (an.d_w == 1) {
        double K = K_constant(an).get_d();
        k.C = cw + K;
        k.has_density = true;
        k.density_walk = an.nu;
        k.density_norm = cw + K;
        double w = K / (cw + K) / an.gamma.order.get_d();
        for (const auto& p : an.gamma.points) k.atoms.push_back({p, w});
      } else {
        k.C = cw;
        k.has_density = true;
        k.density_walk = an.nu;
        k.density_norm = cw;
      }
      break;
    }
  }
  return k;
}

double llt_main_term(const WalkAnalysis& an, long n, const std::vector<long>& k) {
  int d = an.d_w;
  if (an.d0_w < d) throw degenerate_walk_error();
  ZVec off(d);
  for (int i = 0; i < d; ++i) off[i] = Int(k[i]) - Int(n) * Int(an.nu.steps[0][i]);
  if (!zlattice::contains(an.D, off)) return 0.0;

  // z = (k - n mean)/sqrt(n); quadratic form <Lambda^{-1} z, z>
  std::vector<double> z(d);
  for (int i = 0; i < d; ++i) z[i] = (k[i] - double(n) * an.mean[i].get_d());
  // solve Lambda y = z in doubles (d <= 4)
  std::vector<double> A(size_t(d) * (d + 1));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) A[size_t(i) * (d + 1) + j] = an.lambda.at(i, j).get_d();
    A[size_t(i) * (d + 1) + d] = z[i];
  }
  for (int c = 0; c < d; ++c) {
    int piv = c;
    for (int i = c + 1; i < d; ++i)
      if (std::abs(A[size_t(i) * (d + 1) + c]) > std::abs(A[size_t(piv) * (d + 1) + c])) piv = i;
    if (std::abs(A[size_t(piv) * (d + 1) + c]) < 1e-300) throw degenerate_walk_error();
    if (piv != c)
      for (int j = 0; j <= d; ++j) std::swap(A[size_t(c) * (d + 1) + j], A[size_t(piv) * (d + 1) + j]);
    for (int i = 0; i < d; ++i) {
      if (i == c) continue;
      double f = A[size_t(i) * (d + 1) + c] / A[size_t(c) * (d + 1) + c];
      for (int j = c; j <= d; ++j) A[size_t(i) * (d + 1) + j] -= f * A[size_t(c) * (d + 1) + j];
    }
  }
  double q = 0;
  for (int i = 0; i < d; ++i) q += z[i] * (A[size_t(i) * (d + 1) + d] / A[size_t(i) * (d + 1) + i]);
  double detl = an.lambda_det.get_d();
  return an.a0.get_d() / std::sqrt(detl) * std::pow(2 * kPi * n, -d / 2.0) *
         std::exp(-q / (2.0 * n));
}

std::optional<Progression> step_progression(const WalkAnalysis& an, const std::vector<long>& k) {
  if (!zlattice::contains(an.L, to_zvec(k))) return std::nullopt;
  if (an.d0_w == an.d_w) {
    long v = an.quotient_v.get_si();
    ZVec l1 = to_zvec(an.nu.steps[0]);
    for (long n = 0; n < v; ++n) {
      ZVec off(an.d_w);
      for (int i = 0; i < an.d_w; ++i) off[i] = Int(k[i]) - Int(n) * l1[i];
      if (zlattice::contains(an.D, off)) {
        Progression pr;
        pr.offset = n;
        pr.period = v;
        return pr;
      }
    }
    throw torwalk::error("rwalk: no admissible time found (unexpected)");
  }
  // rank-deficient D: at most one admissible n; solve [basis(D) | l1] x = k
  int d = an.d_w;
  ZMat M(d, an.D.rank + 1);
  for (int c = 0; c < an.D.rank; ++c)
    for (int i = 0; i < d; ++i) M.at(i, c) = an.D.basis.at(i, c);
  for (int i = 0; i < d; ++i) M.at(i, an.D.rank) = an.nu.steps[0][i];
  auto sol = exact::solve(M, exact::qvec_from(to_zvec(k)));
  if (!sol) return std::nullopt;
  Rat nr = (*sol)[an.D.rank];
  if (nr.get_den() != 1 || nr < 0) return std::nullopt;
  long n = nr.get_num().get_si();
  ZVec off(d);
  for (int i = 0; i < d; ++i) off[i] = Int(k[i]) - Int(n) * Int(an.nu.steps[0][i]);
  if (!zlattice::contains(an.D, off)) return std::nullopt;
  Progression pr;
  pr.offset = n;
  pr.period = 0;  // single admissible time
  return pr;
}

StepDistribution barycenter_symmetrize(const StepDistribution& nu) {
  nu.validate();
  std::map<std::vector<long>, Rat> acc;
  for (size_t i = 0; i < nu.count(); ++i)
    for (size_t j = 0; j < nu.count(); ++j) {
      std::vector<long> diff(nu.dim);
      for (int k = 0; k < nu.dim; ++k) diff[k] = nu.steps[i][k] - nu.steps[j][k];
      acc[diff] += nu.weights[i] * nu.weights[j];
    }
  StepDistribution out;
  out.dim = nu.dim;
  for (const auto& [s, w] : acc) {
    out.steps.push_back(s);
    out.weights.push_back(w);
  }
  return out;
}

}  // namespace rwalk
