#pragma once

#include "dqc/liouville.hpp"
#include "dqc/types.hpp"

#include <cstdint>
#include <vector>

namespace dqc {

struct NeighborTriple {
  Complex value;
  Complex nn;
  Complex nnn;
};

// Nearest and next-to-nearest neighbors on the complex plane, Euclidean
// metric, ties broken toward the smaller index. The default implementation
// buckets points on a grid; the quadratic scan is the reference it must
// match exactly.
std::vector<NeighborTriple> neighbor_triples(const std::vector<Complex>& values);
std::vector<NeighborTriple> neighbor_triples_brute(
    const std::vector<Complex>& values);

struct CsrSample {
  Complex z;
  Index source_index = 0;
  double nn_distance = 0.0;
  double nnn_distance = 0.0;
  bool degenerate = false;
};

// z_k = (nn - value) / (nnn - value). Samples whose denominator falls below
// 1e-12 of the spectral diameter are flagged degenerate and excluded from
// the statistics; if every sample degenerates the spectrum has no usable
// ratios and an error is raised.
std::vector<CsrSample> csr_values(const std::vector<Complex>& values);
std::vector<CsrSample> csr_values(const Spectrum& spectrum);

struct CsrHistogram {
  int bins = 0;              // B x B cells over [-1,1]^2
  std::vector<double> density;  // row-major, index = iy * bins + ix
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;
};

CsrHistogram csr_histogram(const std::vector<CsrSample>& samples, int bins);

struct Marginal {
  std::vector<double> edges;    // size bins + 1
  std::vector<double> density;  // size bins, integrates to one
};

// Marginals are binned directly on (r, theta) of the samples, which avoids
// the bias of re-integrating square cells across the disc boundary.
Marginal radial_marginal(const std::vector<CsrSample>& samples, int bins);
Marginal angular_marginal(const std::vector<CsrSample>& samples, int bins);

// Density of Re z inside the stripe |Im z| <= halfwidth, normalized over
// the stripe. Throws if the stripe is empty.
Marginal real_axis_section(const std::vector<CsrSample>& samples,
                           double halfwidth, int bins);

struct SummaryStats {
  std::int64_t n_samples = 0;
  std::int64_t n_degenerate = 0;
  double mean_r = 0.0;
  double mean_cos_theta = 0.0;
};

SummaryStats summary_stats(const std::vector<CsrSample>& samples);

// Eigenvalues of an n x n matrix with i.i.d. complex Gaussian entries scaled
// by 1/sqrt(2n); the bulk fills the unit disc.
Spectrum sample_ginue(int n, std::uint64_t seed);

// n i.i.d. points uniform on the unit square; the spectrum of a diagonal
// random matrix.
Spectrum sample_poisson_points(int n, std::uint64_t seed);

// Mass a uniform distribution on the unit disc assigns to the disk
// |z - center| <= radius (circle-intersection area over pi).
double uniform_disc_mass(Complex center, double radius);

// Fraction of non-degenerate samples inside the disk |z - center| <= radius.
double disk_mass_fraction(const std::vector<CsrSample>& samples, Complex center,
                          double radius);

}  // namespace dqc
