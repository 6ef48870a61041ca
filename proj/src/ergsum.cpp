#include "ergsum.hpp"

#include <cmath>
#include <set>

namespace ergsum {

using exact::Int;
using u128 = unsigned __int128;
static constexpr double kTwoPi = 6.28318530717958647692;

static std::uint64_t mod_pow(std::uint64_t b, std::uint64_t e, std::uint64_t q) {
  u128 r = 1, base = b % q;
  while (e) {
    if (e & 1) r = (r * base) % q;
    base = (base * base) % q;
    e >>= 1;
  }
  return std::uint64_t(r);
}

static std::uint64_t mod_of(const Int& x, std::uint64_t q) {
  Int r;
  mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), q);
  return r.get_ui();
}

static void check_modulus(const ToralAction& action, std::uint64_t q) {
  if (q < 3) throw bad_modulus_error();
  Int qz = Int((unsigned long)q);
  // q must be an odd prime coprime to every determinant
  if (mpz_probab_prime_p(qz.get_mpz_t(), 30) == 0) throw bad_modulus_error();
  for (const auto& d : action.dets)
    if (mod_of(d, q) == 0) throw bad_modulus_error();
}

ModularPoints sample_points(const ToralAction& action, std::uint64_t q, size_t count,
                            std::uint64_t seed) {
  check_modulus(action, q);
  ModularPoints pts;
  pts.q = q;
  pts.rho = action.rho;
  pts.coords.resize(count * size_t(action.rho));
  // unbiased draws: reject the top sliver of the 64-bit range
  std::uint64_t limit = q * (~0ULL / q);
  for (size_t i = 0; i < count * size_t(action.rho); ++i) {
    std::uint64_t u;
    std::uint64_t attempt = 0;
    do {
      u = pathsim::rng_u64(seed, 0x706f696e74ULL ^ i, attempt++);
    } while (u >= limit);
    pts.coords[i] = u % q;
  }
  return pts;
}

ModContext::ModContext(const ToralAction& action, std::uint64_t q_) {
  check_modulus(action, q_);
  q = q_;
  rho = action.rho;
  for (int g = 0; g < action.d; ++g) {
    std::vector<std::uint64_t> M(size_t(rho) * rho), Minv(size_t(rho) * rho);
    for (int i = 0; i < rho; ++i)
      for (int j = 0; j < rho; ++j) M[size_t(i) * rho + j] = mod_of(action.gens[g].at(i, j), q);
    // inverse = adjugate / det mod q
    exact::ZMat adj = exact::adjugate(action.gens[g]);
    std::uint64_t dinv = mod_pow(mod_of(action.dets[g], q), q - 2, q);
    for (int i = 0; i < rho; ++i)
      for (int j = 0; j < rho; ++j)
        Minv[size_t(i) * rho + j] = std::uint64_t((u128(mod_of(adj.at(i, j), q)) * dinv) % q);
    gen.push_back(M);
    gen_inv.push_back(Minv);
  }
}

void ModContext::apply(const std::vector<std::uint64_t>& M, std::uint64_t* y) const {
  std::uint64_t out[8];
  for (int i = 0; i < rho; ++i) {
    u128 acc = 0;
    const std::uint64_t* row = M.data() + size_t(i) * rho;
    for (int j = 0; j < rho; ++j) acc += u128(row[j]) * y[j];
    out[i] = std::uint64_t(acc % q);
  }
  for (int i = 0; i < rho; ++i) y[i] = out[i];
}

std::vector<std::uint64_t> ModContext::power(const std::vector<long>& l) const {
  std::vector<std::uint64_t> M(size_t(rho) * rho, 0);
  for (int i = 0; i < rho; ++i) M[size_t(i) * rho + i] = 1;
  std::vector<std::uint64_t> col(rho, 0);
  for (size_t g = 0; g < gen.size(); ++g) {
    const auto& G = l[g] >= 0 ? gen[g] : gen_inv[g];
    for (long rep = 0; rep < std::labs(l[g]); ++rep) {
      // M <- G * M, column by column
      for (int j = 0; j < rho; ++j) {
        for (int i = 0; i < rho; ++i) col[i] = M[size_t(i) * rho + j];
        apply(G, col.data());
        for (int i = 0; i < rho; ++i) M[size_t(i) * rho + j] = col[i];
      }
    }
  }
  return M;
}

// real trig polynomial prepared for modular evaluation: half support with
// doubled coefficients, frequency rows reduced mod q
struct TrigEval {
  std::uint64_t q;
  int rho;
  int terms;
  std::vector<std::uint64_t> freq;  // terms x rho, entries mod q
  std::vector<double> ca, cb;       // f = sum ca cos(2 pi s/q) + cb sin(2 pi s/q)

  TrigEval(const TrigPoly& f, std::uint64_t q_, int rho_) : q(q_), rho(rho_) {
    f.validate_real();
    std::set<std::vector<long>> used;
    for (const auto& [k, c] : f.coeffs) {
      if (used.count(k)) continue;
      std::vector<long> mk(k.size());
      for (size_t i = 0; i < k.size(); ++i) mk[i] = -k[i];
      used.insert(k);
      used.insert(mk);
      for (size_t i = 0; i < k.size(); ++i) {
        long r = k[i] % long(q);
        if (r < 0) r += long(q);
        freq.push_back(std::uint64_t(r));
      }
      ca.push_back(2.0 * c.real());
      cb.push_back(-2.0 * c.imag());
    }
    terms = int(ca.size());
  }

  double operator()(const std::uint64_t* y) const {
    double s = 0;
    for (int t = 0; t < terms; ++t) {
      u128 acc = 0;
      const std::uint64_t* row = freq.data() + size_t(t) * rho;
      for (int i = 0; i < rho; ++i) acc += u128(row[i]) * y[i];
      double th = kTwoPi * double(std::uint64_t(acc % q)) / double(q);
      s += ca[t] * std::cos(th) + cb[t] * std::sin(th);
    }
    return s;
  }
};

std::vector<double> quenched_sums(const ToralAction& action, const TrigPoly& f,
                                  const StepDistribution& nu,
                                  const std::vector<std::uint8_t>& step_indices,
                                  ModularPoints& points) {
  if (nu.dim != action.d)
    throw torwalk::error("ergsum: walk dimension must match the action dimension");
  if (action.kind == toralact::ActionKind::Endomorphism)
    for (const auto& s : nu.steps)
      for (long x : s)
        if (x < 0) throw endomorphism_negative_power_error();

  ModContext ctx(action, points.q);
  std::vector<std::vector<std::uint64_t>> step_mats;
  for (const auto& s : nu.steps) step_mats.push_back(ctx.power(s));
  TrigEval fe(f, points.q, action.rho);

  size_t m = points.count();
  std::vector<double> sums(m, 0.0);
  // evaluate first, then advance: S = sum_{k=0}^{n-1} f(y_k), y_0 = x
  for (size_t i = 0; i < m; ++i) sums[i] += fe(&points.coords[i * size_t(action.rho)]);
  for (std::uint8_t sidx : step_indices) {
    const auto& M = step_mats[sidx];
    for (size_t i = 0; i < m; ++i) {
      std::uint64_t* y = &points.coords[i * size_t(action.rho)];
      ctx.apply(M, y);
      sums[i] += fe(y);
    }
  }
  return sums;
}

std::vector<std::complex<double>> rotated_rectangle_sums(const ToralAction& action,
                                                         const TrigPoly& f,
                                                         const std::vector<long>& rect,
                                                         const std::vector<double>& theta,
                                                         const ModularPoints& points) {
  if (int(rect.size()) != action.d || int(theta.size()) != action.d)
    throw torwalk::error("ergsum: rectangle/theta dimension mismatch");
  ModContext ctx(action, points.q);
  TrigEval fe(f, points.q, action.rho);
  int rho = action.rho;
  size_t m = points.count();
  std::vector<std::complex<double>> sums(m, {0.0, 0.0});

  // nested orbit walk: axis i keeps a saved base point, axis 0 innermost
  std::vector<std::uint64_t> y(rho, 0);
  std::vector<std::vector<std::uint64_t>> base(action.d + 1,
                                               std::vector<std::uint64_t>(size_t(rho)));
  for (size_t p = 0; p < m; ++p) {
    for (int i = 0; i < rho; ++i) base[action.d][i] = points.coords[p * size_t(rho) + i];
    std::vector<long> l(action.d, 0);
    for (int ax = action.d - 1; ax >= 0; --ax) base[ax] = base[action.d];
    std::complex<double> total(0, 0);
    while (true) {
      double ph = 0;
      for (int i = 0; i < action.d; ++i) ph += l[i] * theta[i];
      total += std::polar(1.0, kTwoPi * ph) * fe(base[0].data());
      // advance the odometer
      int ax = 0;
      for (; ax < action.d; ++ax) {
        if (++l[ax] < rect[ax]) {
          for (int i = 0; i < rho; ++i) y[i] = base[ax][i];
          ctx.apply(ctx.gen[ax], y.data());
          base[ax] = std::vector<std::uint64_t>(y.begin(), y.end());
          for (int b = ax - 1; b >= 0; --b) base[b] = base[ax];
          break;
        }
        l[ax] = 0;
      }
      if (ax == action.d) break;
    }
    sums[p] = total;
  }
  return sums;
}

static bool symmetrization_is_trivial(const StepDistribution& nu) {
  auto sym = rwalk::barycenter_symmetrize(nu);
  for (const auto& s : sym.steps)
    for (long x : s)
      if (x != 0) return false;
  return true;
}

static std::pair<rwalk::StepDistribution, std::vector<std::optional<std::vector<long>>>>
reduce_for_barycenter(const StepDistribution& nu,
                      const std::vector<std::vector<long>>& offsets) {
  auto sym = rwalk::barycenter_symmetrize(nu);
  std::vector<exact::ZVec> gens;
  for (const auto& s : sym.steps) {
    exact::ZVec z(s.size());
    for (size_t i = 0; i < s.size(); ++i) z[i] = s[i];
    gens.push_back(z);
  }
  auto red = zlattice::reduce_support(gens);
  rwalk::StepDistribution out;
  out.dim = red.reduced_dim;
  for (size_t j = 0; j < red.reduced_vectors.size(); ++j) {
    std::vector<long> s(red.reduced_dim);
    for (int i = 0; i < red.reduced_dim; ++i) s[i] = red.reduced_vectors[j][i].get_si();
    out.steps.push_back(s);
    out.weights.push_back(sym.weights[j]);
  }
  // map offsets through the reduction; off-span offsets carry no mass
  std::vector<std::optional<std::vector<long>>> mapped;
  for (const auto& off : offsets) {
    exact::ZVec z(off.size());
    for (size_t i = 0; i < off.size(); ++i) z[i] = off[i];
    exact::ZVec w = exact::mul(red.transform, z);
    bool inside = true;
    for (size_t i = red.reduced_dim; i < w.size(); ++i) inside = inside && w[i] == 0;
    if (!inside) {
      mapped.push_back(std::nullopt);
      continue;
    }
    std::vector<long> r(red.reduced_dim);
    for (int i = 0; i < red.reduced_dim; ++i) r[i] = w[i].get_si();
    mapped.push_back(r);
  }
  return {out, mapped};
}

BarycenterNorm barycenter_norm_sq(const ToralAction& action, const TrigPoly& f,
                                  const StepDistribution& nu, long n, int grid_N,
                                  int orbit_bound) {
  auto sd = toralact::spectral_density(action, f, orbit_bound);
  auto supp = sd.fourier_support();
  BarycenterNorm out;
  out.orbit_count = int(sd.orbit_amps.size());
  out.bound = orbit_bound;
  if (n == 0 || symmetrization_is_trivial(nu)) {
    // P is an isometry when the symmetrized walk is concentrated at 0
    out.value = sd.fourier(std::vector<long>(action.d, 0));
    return out;
  }
  auto [red, mapped] = reduce_for_barycenter(nu, supp);
  std::vector<std::vector<long>> ps;
  std::vector<size_t> which;
  for (size_t i = 0; i < supp.size(); ++i)
    if (mapped[i]) {
      ps.push_back(*mapped[i]);
      which.push_back(i);
    }
  auto probs = rwalk::grid_return_prob_multi(red, n, ps, grid_N);
  double total = 0;
  for (size_t j = 0; j < ps.size(); ++j) total += probs[j] * sd.fourier(supp[which[j]]);
  out.value = total;
  return out;
}

BarycenterNorm barycenter_norm_sq_exact(const ToralAction& action, const TrigPoly& f,
                                        const StepDistribution& nu, long n,
                                        int orbit_bound) {
  auto sd = toralact::spectral_density(action, f, orbit_bound);
  auto supp = sd.fourier_support();
  BarycenterNorm out;
  out.orbit_count = int(sd.orbit_amps.size());
  out.bound = orbit_bound;
  if (n == 0 || symmetrization_is_trivial(nu)) {
    out.value = sd.fourier(std::vector<long>(action.d, 0));
    return out;
  }
  auto [red, mapped] = reduce_for_barycenter(nu, supp);
  auto dist = rwalk::exact_distribution(red, n);
  double total = 0;
  for (size_t i = 0; i < supp.size(); ++i)
    if (mapped[i]) total += dist.prob_d(*mapped[i]) * sd.fourier(supp[i]);
  out.value = total;
  return out;
}

double eval_at_point(const TrigPoly& f, const ModularPoints& points, size_t index) {
  TrigEval fe(f, points.q, points.rho);
  return fe(&points.coords[index * size_t(points.rho)]);
}

}  // namespace ergsum
