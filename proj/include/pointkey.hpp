#ifndef TORWALK_POINTKEY_HPP
#define TORWALK_POINTKEY_HPP

// Integer lattice points packed into a 64-bit key for hash maps.
// Coordinates get 64/d bits each (signed, offset binary).

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pointkey {

inline int bits_per_coord(int dim) { return dim <= 1 ? 62 : 64 / dim; }

inline unsigned long long pack(const long* p, int dim) {
  int b = bits_per_coord(dim);
  long lo = -(1L << (b - 1)), hi = (1L << (b - 1)) - 1;
  unsigned long long key = 0;
  for (int i = 0; i < dim; ++i) {
    if (p[i] < lo || p[i] > hi) throw std::overflow_error("pointkey: coordinate out of range");
    key = (key << b) | (unsigned long long)(p[i] - lo);
  }
  return key;
}

inline unsigned long long pack(const std::vector<long>& p) {
  return pack(p.data(), int(p.size()));
}

inline std::vector<long> unpack(unsigned long long key, int dim) {
  int b = bits_per_coord(dim);
  long lo = -(1L << (b - 1));
  unsigned long long mask = (b == 64) ? ~0ULL : ((1ULL << b) - 1);
  std::vector<long> p(dim);
  for (int i = dim - 1; i >= 0; --i) {
    p[i] = long(key & mask) + lo;
    key >>= b;
  }
  return p;
}

// splitmix64 finalizer, also used as the hash for packed keys
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

struct Hash {
  size_t operator()(unsigned long long k) const { return size_t(mix(k)); }
};

}  // namespace pointkey

#endif
