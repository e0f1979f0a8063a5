#pragma once

#include "dqc/rng.hpp"
#include "dqc/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dqc {

enum class BasisKind { spin_chain, half_filling_fermions };

// Occupation patterns are M-bit words, site 1 on the most significant bit,
// so ascending word order coincides with lexicographic order of the
// site-1..site-M bit strings.
struct BasisDescriptor {
  BasisKind kind = BasisKind::spin_chain;
  int sites = 0;
  Index dim = 0;
  std::vector<std::uint32_t> occupation_table;  // fermions only

  static BasisDescriptor spin_chain(int sites);
  static BasisDescriptor half_filling(int sites);

  Index index_of(std::uint32_t pattern) const;
  std::uint32_t pattern_of(Index index) const;
  bool contains(std::uint32_t pattern) const;
};

struct DisorderRealization {
  std::vector<double> values;  // h_l in [-1, 1], one per site
  std::uint64_t seed = 0;
};

struct JumpTerm {
  Matrix op;
  double rate;
};

struct LindbladModel {
  Matrix hamiltonian;
  std::vector<JumpTerm> jumps;
  BasisDescriptor basis;
  std::string label;

  Index dim() const { return hamiltonian.rows(); }
  void validate() const;
};

// Spin-1/2 chain with no unitary part and one two-site jump operator per
// bond; eta and kappa must be +/-1.
LindbladModel build_integrable_chain(int sites, int eta, int kappa,
                                     double gamma);

// Counter-based per-site draws: same seed gives the same realization no
// matter the evaluation order.
DisorderRealization sample_disorder(int sites, std::uint64_t seed);

// Disordered interacting fermion chain in its half-filling sector, with a
// pair dissipator on every bond.
LindbladModel build_mbl_chain(int sites, double disorder_strength, double j,
                              double u, double gamma,
                              const DisorderRealization& disorder);

// |101010...> with site 1 occupied.
PureState neel_state(const BasisDescriptor& basis);

// (G + G^T)/2 with i.i.d. standard normal G; Hermitian by construction.
Matrix sample_goe_observable(Index dim, std::uint64_t seed);

// Matrix of c_a^dag c_b on the half-filling basis, Jordan-Wigner signs
// with site-ordered strings.
Matrix fermion_bilinear(const BasisDescriptor& basis, int a, int b);

}  // namespace dqc
