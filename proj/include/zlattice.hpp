#ifndef TORWALK_ZLATTICE_HPP
#define TORWALK_ZLATTICE_HPP

// Exact integer-lattice algebra: canonical sublattice bases, group indices,
// membership, cyclic quotients and annulator subgroups of T^d.

#include "exact.hpp"

namespace zlattice {

using exact::Int;
using exact::QVec;
using exact::Rat;
using exact::ZMat;
using exact::ZVec;

struct zero_lattice_error : torwalk::error {
  zero_lattice_error() : torwalk::error("ZeroLattice: all generators are zero") {}
};
struct not_a_sublattice_error : torwalk::error {
  not_a_sublattice_error() : torwalk::error("NotASublattice: D is not contained in L") {}
};
struct rank_deficient_error : torwalk::error {
  rank_deficient_error() : torwalk::error("RankDeficient: lattice is not full rank") {}
};
struct not_cyclic_error : torwalk::error {
  not_cyclic_error() : torwalk::error("quotient group is not cyclic") {}
};

struct IntLattice {
  int ambient_dim = 0;
  int rank = 0;
  // Canonical basis, columns are the Hermite-normal-form generators
  // (d x rank). Pivots positive, entries above pivots reduced mod pivot.
  ZMat basis;
  // Unimodular C with C*basis supported on the first `rank` coordinates
  // (identity when rank == ambient_dim).
  ZMat reduction;
};

struct AnnulatorGroup {
  std::vector<QVec> points;  // rational points of [0,1)^d, a group mod 1
  Int order;
};

// Canonical lattice from a generating set (column HNF basis).
IntLattice lattice_from_generators(const std::vector<ZVec>& vectors);

// |det(basis)| for full-rank lattices, nullopt (infinite index) otherwise.
std::optional<Int> lattice_index(const IntLattice& L);

// exact membership test
bool contains(const IntLattice& L, const ZVec& v);

// Card(L/D) for full-rank D <= L; verifies the quotient is cyclic.
Int quotient_cyclic_order(const IntLattice& L, const IntLattice& D);

// Annulator {t in T^d : <v,t> in Z for all v in L} of a full-rank lattice,
// enumerated exactly via the Smith normal form of basis^T.
AnnulatorGroup annulator(const IntLattice& L);

struct SupportReduction {
  ZMat transform;                 // unimodular C, maps span onto first r axes
  int reduced_dim = 0;            // r
  std::vector<ZVec> reduced_vectors;  // images truncated to r coordinates
};
SupportReduction reduce_support(const std::vector<ZVec>& vectors);

// <v,t> for integer v and rational t
Rat dot(const ZVec& v, const QVec& t);

}  // namespace zlattice

#endif
