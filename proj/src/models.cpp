#include "dqc/models.hpp"

#include "dqc/linalg.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace dqc {

namespace {

// Bit position of site l (1-based) in an M-site pattern.
inline int site_pos(int sites, int l) { return sites - l; }

inline bool occupied(std::uint32_t pattern, int sites, int l) {
  return (pattern >> site_pos(sites, l)) & 1u;
}

// Parity of the occupation of sites 1..l-1 (the Jordan-Wigner string).
inline int jw_sign(std::uint32_t pattern, int sites, int l) {
  const int pos = site_pos(sites, l);
  const std::uint32_t above = pattern >> (pos + 1);
  return (std::popcount(above) & 1) ? -1 : 1;
}

}  // namespace

BasisDescriptor BasisDescriptor::spin_chain(int sites) {
  if (sites < 1 || sites > 20) {
    throw DimensionError("spin chain size out of range");
  }
  BasisDescriptor b;
  b.kind = BasisKind::spin_chain;
  b.sites = sites;
  b.dim = Index{1} << sites;
  return b;
}

BasisDescriptor BasisDescriptor::half_filling(int sites) {
  if (sites < 2 || sites % 2 != 0 || sites > 24) {
    throw DimensionError("half-filling basis needs an even site count");
  }
  BasisDescriptor b;
  b.kind = BasisKind::half_filling_fermions;
  b.sites = sites;
  const std::uint32_t full = (1u << sites) - 1u;
  for (std::uint32_t p = 0; p <= full; ++p) {
    if (std::popcount(p) == sites / 2) b.occupation_table.push_back(p);
  }
  b.dim = static_cast<Index>(b.occupation_table.size());
  return b;
}

Index BasisDescriptor::index_of(std::uint32_t pattern) const {
  if (kind == BasisKind::spin_chain) {
    if (pattern >= (1u << sites)) {
      throw DimensionError("pattern outside spin basis");
    }
    return static_cast<Index>(pattern);
  }
  const auto it = std::lower_bound(occupation_table.begin(),
                                   occupation_table.end(), pattern);
  if (it == occupation_table.end() || *it != pattern) {
    throw DimensionError("pattern outside half-filling basis");
  }
  return static_cast<Index>(it - occupation_table.begin());
}

std::uint32_t BasisDescriptor::pattern_of(Index index) const {
  if (index < 0 || index >= dim) {
    throw DimensionError("basis index out of range");
  }
  if (kind == BasisKind::spin_chain) return static_cast<std::uint32_t>(index);
  return occupation_table[static_cast<std::size_t>(index)];
}

bool BasisDescriptor::contains(std::uint32_t pattern) const {
  if (kind == BasisKind::spin_chain) return pattern < (1u << sites);
  return std::binary_search(occupation_table.begin(), occupation_table.end(),
                            pattern);
}

void LindbladModel::validate() const {
  const Index n = dim();
  if (hamiltonian.cols() != n) {
    throw DimensionError("Hamiltonian must be square");
  }
  if (!is_hermitian(hamiltonian)) {
    throw NumericError("Hamiltonian is not Hermitian");
  }
  for (const auto& j : jumps) {
    if (j.op.rows() != n || j.op.cols() != n) {
      throw DimensionError("jump operator dimension mismatch");
    }
    if (!(j.rate > 0.0)) {
      throw NumericError("jump rate must be positive");
    }
  }
}

LindbladModel build_integrable_chain(int sites, int eta, int kappa,
                                     double gamma) {
  if (sites < 2 || sites > 10) {
    throw DimensionError("integrable chain size out of configured budget");
  }
  if ((eta != 1 && eta != -1) || (kappa != 1 && kappa != -1)) {
    throw Error("eta and kappa must be +1 or -1");
  }
  if (!(gamma > 0.0)) {
    throw Error("gamma must be positive");
  }

  // Two-site block in the ordered product basis {|00>, |01>, |10>, |11>}.
  Matrix pair = Matrix::Zero(4, 4);
  pair(0, 0) = static_cast<double>(eta);
  pair(1, 2) = 1.0;
  pair(2, 1) = 1.0;
  pair(3, 3) = static_cast<double>(kappa);

  LindbladModel model;
  model.basis = BasisDescriptor::spin_chain(sites);
  model.hamiltonian = Matrix::Zero(model.basis.dim, model.basis.dim);
  for (int l = 1; l <= sites - 1; ++l) {
    const Index left = Index{1} << (l - 1);
    const Index right = Index{1} << (sites - l - 1);
    Matrix embedded =
        kron(kron(Matrix::Identity(left, left), pair),
             Matrix::Identity(right, right));
    model.jumps.push_back({std::move(embedded), gamma});
  }

  std::ostringstream label;
  label << "integrable[M=" << sites << ",eta=" << eta << ",kappa=" << kappa
        << ",gamma=" << gamma << "]";
  model.label = label.str();
  model.validate();
  return model;
}

DisorderRealization sample_disorder(int sites, std::uint64_t seed) {
  DisorderRealization d;
  d.seed = seed;
  d.values.reserve(sites);
  for (int l = 1; l <= sites; ++l) {
    const std::uint64_t word = rng::derive(seed, rng::Purpose::disorder,
                                           {static_cast<std::uint64_t>(l)});
    d.values.push_back(2.0 * rng::to_unit(word) - 1.0);
  }
  return d;
}

Matrix fermion_bilinear(const BasisDescriptor& basis, int a, int b) {
  if (basis.kind != BasisKind::half_filling_fermions) {
    throw DimensionError("fermion_bilinear needs a fermionic basis");
  }
  const int sites = basis.sites;
  if (a < 1 || a > sites || b < 1 || b > sites) {
    throw DimensionError("site index out of range");
  }
  Matrix out = Matrix::Zero(basis.dim, basis.dim);
  for (Index col = 0; col < basis.dim; ++col) {
    const std::uint32_t n = basis.pattern_of(col);
    if (!occupied(n, sites, b)) continue;
    const int sign_b = jw_sign(n, sites, b);
    const std::uint32_t mid = n ^ (1u << site_pos(sites, b));
    if (occupied(mid, sites, a)) continue;
    const int sign_a = jw_sign(mid, sites, a);
    const std::uint32_t fin = mid | (1u << site_pos(sites, a));
    out(basis.index_of(fin), col) += sign_a * sign_b;
  }
  return out;
}

LindbladModel build_mbl_chain(int sites, double disorder_strength, double j,
                              double u, double gamma,
                              const DisorderRealization& disorder) {
  if (sites < 2 || sites % 2 != 0) {
    throw DimensionError("mbl chain needs an even number of sites");
  }
  if (static_cast<int>(disorder.values.size()) != sites) {
    throw DimensionError("disorder realization size mismatch");
  }
  if (!(gamma > 0.0)) {
    throw Error("gamma must be positive");
  }

  LindbladModel model;
  model.basis = BasisDescriptor::half_filling(sites);
  const Index dim = model.basis.dim;

  std::vector<Matrix> number_ops;
  number_ops.reserve(sites);
  for (int l = 1; l <= sites; ++l) {
    number_ops.push_back(fermion_bilinear(model.basis, l, l));
  }

  Matrix h = Matrix::Zero(dim, dim);
  for (int l = 1; l <= sites; ++l) {
    h += disorder_strength * disorder.values[l - 1] * number_ops[l - 1];
  }
  for (int l = 1; l <= sites - 1; ++l) {
    const Matrix hop = fermion_bilinear(model.basis, l, l + 1);
    h -= j * (hop + hop.adjoint());
    h += u * (number_ops[l - 1] * number_ops[l]);
  }
  model.hamiltonian = std::move(h);

  // (c_l^dag + c_{l+1}^dag)(c_l - c_{l+1}) expanded in number-conserving
  // bilinears.
  for (int l = 1; l <= sites - 1; ++l) {
    Matrix op = number_ops[l - 1] - number_ops[l];
    op -= fermion_bilinear(model.basis, l, l + 1);
    op += fermion_bilinear(model.basis, l + 1, l);
    model.jumps.push_back({std::move(op), gamma});
  }

  std::ostringstream label;
  label << "mbl[M=" << sites << ",W=" << disorder_strength << ",J=" << j
        << ",U=" << u << ",gamma=" << gamma << ",seed=" << disorder.seed
        << "]";
  model.label = label.str();
  model.validate();
  return model;
}

PureState neel_state(const BasisDescriptor& basis) {
  std::uint32_t pattern = 0;
  for (int l = 1; l <= basis.sites; l += 2) {
    pattern |= 1u << site_pos(basis.sites, l);
  }
  if (!basis.contains(pattern)) {
    throw DimensionError("alternating pattern not representable in basis");
  }
  return PureState::basis_state(basis.dim, basis.index_of(pattern));
}

Matrix sample_goe_observable(Index dim, std::uint64_t seed) {
  rng::Stream stream(rng::derive(seed, rng::Purpose::observable, {}));
  Matrix g(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) {
      g(i, j) = stream.normal();
    }
  }
  return 0.5 * (g + g.transpose());
}

}  // namespace dqc
