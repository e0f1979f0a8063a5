#include "dqc/csr.hpp"

#include "dqc/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dqc {

namespace {

struct Candidate {
  double dist_sq = std::numeric_limits<double>::infinity();
  std::size_t index = 0;
};

inline bool better(double dist_sq, std::size_t index, const Candidate& c) {
  return dist_sq < c.dist_sq || (dist_sq == c.dist_sq && index < c.index);
}

inline void offer(double dist_sq, std::size_t index, Candidate& best,
                  Candidate& second) {
  if (better(dist_sq, index, best)) {
    second = best;
    best = {dist_sq, index};
  } else if (better(dist_sq, index, second)) {
    second = {dist_sq, index};
  }
}

}  // namespace

std::vector<NeighborTriple> neighbor_triples_brute(
    const std::vector<Complex>& values) {
  const std::size_t n = values.size();
  if (n < 3) {
    throw Error("neighbor triples need at least three eigenvalues");
  }
  std::vector<NeighborTriple> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Candidate best, second;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      offer(std::norm(values[j] - values[k]), j, best, second);
    }
    out[k] = {values[k], values[best.index], values[second.index]};
  }
  return out;
}

std::vector<NeighborTriple> neighbor_triples(
    const std::vector<Complex>& values) {
  const std::size_t n = values.size();
  if (n < 3) {
    throw Error("neighbor triples need at least three eigenvalues");
  }
  if (n < 64) return neighbor_triples_brute(values);

  double min_re = values[0].real(), max_re = values[0].real();
  double min_im = values[0].imag(), max_im = values[0].imag();
  for (const Complex& v : values) {
    min_re = std::min(min_re, v.real());
    max_re = std::max(max_re, v.real());
    min_im = std::min(min_im, v.imag());
    max_im = std::max(max_im, v.imag());
  }

  const int grid = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n))));
  const double span_re = std::max(max_re - min_re, 1e-300);
  const double span_im = std::max(max_im - min_im, 1e-300);
  const double cell_re = span_re / grid;
  const double cell_im = span_im / grid;
  const double min_cell = std::min(cell_re, cell_im);

  auto cell_of = [&](const Complex& v) {
    int cx = static_cast<int>((v.real() - min_re) / cell_re);
    int cy = static_cast<int>((v.imag() - min_im) / cell_im);
    cx = std::clamp(cx, 0, grid - 1);
    cy = std::clamp(cy, 0, grid - 1);
    return std::pair<int, int>{cx, cy};
  };

  std::vector<std::vector<std::size_t>> buckets(
      static_cast<std::size_t>(grid) * grid);
  for (std::size_t k = 0; k < n; ++k) {
    const auto [cx, cy] = cell_of(values[k]);
    buckets[static_cast<std::size_t>(cy) * grid + cx].push_back(k);
  }

  std::vector<NeighborTriple> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto [cx, cy] = cell_of(values[k]);
    Candidate best, second;
    for (int ring = 0; ring < 2 * grid; ++ring) {
      // Cells in ring r are at least (r-1) * min_cell away; once that
      // exceeds the current second-best distance the search is complete.
      if (second.dist_sq < std::numeric_limits<double>::infinity()) {
        const double bound = (ring - 1) * min_cell;
        if (ring >= 1 && bound > 0.0 && bound * bound > second.dist_sq) break;
      }
      const int x_lo = std::max(0, cx - ring), x_hi = std::min(grid - 1, cx + ring);
      const int y_lo = std::max(0, cy - ring), y_hi = std::min(grid - 1, cy + ring);
      for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
          if (std::max(std::abs(x - cx), std::abs(y - cy)) != ring) continue;
          for (std::size_t j : buckets[static_cast<std::size_t>(y) * grid + x]) {
            if (j == k) continue;
            offer(std::norm(values[j] - values[k]), j, best, second);
          }
        }
      }
    }
    out[k] = {values[k], values[best.index], values[second.index]};
  }
  return out;
}

std::vector<CsrSample> csr_values(const std::vector<Complex>& values) {
  const auto triples = neighbor_triples(values);

  double min_re = values[0].real(), max_re = values[0].real();
  double min_im = values[0].imag(), max_im = values[0].imag();
  for (const Complex& v : values) {
    min_re = std::min(min_re, v.real());
    max_re = std::max(max_re, v.real());
    min_im = std::min(min_im, v.imag());
    max_im = std::max(max_im, v.imag());
  }
  const double diameter = std::hypot(max_re - min_re, max_im - min_im);
  const double floor = 1e-12 * diameter;

  std::vector<CsrSample> samples(triples.size());
  std::int64_t usable = 0;
  for (std::size_t k = 0; k < triples.size(); ++k) {
    const auto& t = triples[k];
    CsrSample& s = samples[k];
    s.source_index = static_cast<Index>(k);
    s.nn_distance = std::abs(t.nn - t.value);
    s.nnn_distance = std::abs(t.nnn - t.value);
    if (s.nnn_distance < floor || s.nnn_distance == 0.0) {
      s.degenerate = true;
      s.z = 0.0;
      continue;
    }
    s.z = (t.nn - t.value) / (t.nnn - t.value);
    ++usable;
  }
  if (usable == 0) {
    throw DegenerateSpectrumError(
        "all spacing ratios degenerate; spectrum has no usable triples");
  }
  return samples;
}

std::vector<CsrSample> csr_values(const Spectrum& spectrum) {
  return csr_values(spectrum.eigenvalues);
}

CsrHistogram csr_histogram(const std::vector<CsrSample>& samples, int bins) {
  if (bins < 2) {
    throw Error("histogram needs at least two bins per axis");
  }
  CsrHistogram hist;
  hist.bins = bins;
  hist.counts.assign(static_cast<std::size_t>(bins) * bins, 0);
  hist.density.assign(static_cast<std::size_t>(bins) * bins, 0.0);

  auto bin_of = [bins](double x) {
    const int b = static_cast<int>((x + 1.0) / 2.0 * bins);
    return std::clamp(b, 0, bins - 1);
  };
  for (const auto& s : samples) {
    if (s.degenerate) continue;
    const int ix = bin_of(s.z.real());
    const int iy = bin_of(s.z.imag());
    ++hist.counts[static_cast<std::size_t>(iy) * bins + ix];
    ++hist.total;
  }
  if (hist.total == 0) {
    throw Error("histogram has no non-degenerate samples");
  }
  const double cell_area = (2.0 / bins) * (2.0 / bins);
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    hist.density[i] =
        static_cast<double>(hist.counts[i]) / (cell_area * hist.total);
  }
  return hist;
}

namespace {

Marginal bin_1d(const std::vector<double>& values, double lo, double hi,
                int bins) {
  Marginal m;
  m.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) {
    m.edges[b] = lo + (hi - lo) * b / bins;
  }
  m.density.assign(bins, 0.0);
  std::int64_t total = 0;
  for (double v : values) {
    if (v < lo || v > hi) continue;
    int b = static_cast<int>((v - lo) / (hi - lo) * bins);
    b = std::clamp(b, 0, bins - 1);
    m.density[b] += 1.0;
    ++total;
  }
  if (total == 0) {
    throw Error("empty sample set for one-dimensional density");
  }
  const double bin_width = (hi - lo) / bins;
  for (double& d : m.density) d /= total * bin_width;
  return m;
}

}  // namespace

Marginal radial_marginal(const std::vector<CsrSample>& samples, int bins) {
  std::vector<double> radii;
  radii.reserve(samples.size());
  for (const auto& s : samples) {
    if (!s.degenerate) radii.push_back(std::abs(s.z));
  }
  return bin_1d(radii, 0.0, 1.0, bins);
}

Marginal angular_marginal(const std::vector<CsrSample>& samples, int bins) {
  std::vector<double> angles;
  angles.reserve(samples.size());
  for (const auto& s : samples) {
    if (!s.degenerate) angles.push_back(std::arg(s.z));
  }
  return bin_1d(angles, -std::numbers::pi, std::numbers::pi, bins);
}

Marginal real_axis_section(const std::vector<CsrSample>& samples,
                           double halfwidth, int bins) {
  if (!(halfwidth > 0.0)) {
    throw Error("stripe halfwidth must be positive");
  }
  std::vector<double> re;
  for (const auto& s : samples) {
    if (s.degenerate) continue;
    if (std::abs(s.z.imag()) <= halfwidth) re.push_back(s.z.real());
  }
  if (re.empty()) {
    throw Error("empty stripe section");
  }
  return bin_1d(re, -1.0, 1.0, bins);
}

SummaryStats summary_stats(const std::vector<CsrSample>& samples) {
  SummaryStats st;
  double sum_r = 0.0, sum_cos = 0.0;
  for (const auto& s : samples) {
    if (s.degenerate) {
      ++st.n_degenerate;
      continue;
    }
    sum_r += std::abs(s.z);
    sum_cos += std::cos(std::arg(s.z));
    ++st.n_samples;
  }
  if (st.n_samples == 0) {
    throw Error("summary statistics need at least one non-degenerate sample");
  }
  st.mean_r = sum_r / st.n_samples;
  st.mean_cos_theta = sum_cos / st.n_samples;
  return st;
}

Spectrum sample_ginue(int n, std::uint64_t seed) {
  if (n < 3) {
    throw Error("ensemble sample needs n >= 3");
  }
  rng::Stream stream(rng::derive(seed, rng::Purpose::ensemble, {1}));
  const double scale = 1.0 / std::sqrt(2.0 * n);
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      m(i, j) = Complex(stream.normal(), stream.normal()) * scale;
    }
  }
  Eigen::ComplexEigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericError("eigensolver failed on GinUE sample");
  }
  Spectrum out;
  out.source_label = "ginue[n=" + std::to_string(n) + "]";
  out.hilbert_dim = 0;
  out.eigenvalues.assign(es.eigenvalues().data(),
                         es.eigenvalues().data() + n);
  return out;
}

Spectrum sample_poisson_points(int n, std::uint64_t seed) {
  if (n < 3) {
    throw Error("ensemble sample needs n >= 3");
  }
  rng::Stream stream(rng::derive(seed, rng::Purpose::ensemble, {2}));
  Spectrum out;
  out.source_label = "poisson[n=" + std::to_string(n) + "]";
  out.hilbert_dim = 0;
  out.eigenvalues.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double re = stream.uniform01();
    const double im = stream.uniform01();
    out.eigenvalues.emplace_back(re, im);
  }
  return out;
}

double uniform_disc_mass(Complex center, double radius) {
  if (radius <= 0.0) return 0.0;
  const double d = std::abs(center);
  if (d >= 1.0 + radius) return 0.0;
  if (d + radius <= 1.0) return radius * radius;  // fully inside, area/pi
  if (d + 1.0 <= radius) return 1.0;              // unit disc swallowed
  // Lens area of circles (0,1) and (center,radius), divided by pi.
  const double r1 = 1.0, r2 = radius;
  const double a1 = r1 * r1 *
                    std::acos((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1));
  const double a2 = r2 * r2 *
                    std::acos((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2));
  const double k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
  const double lens = a1 + a2 - 0.5 * std::sqrt(std::max(0.0, k));
  return lens / std::numbers::pi;
}

double disk_mass_fraction(const std::vector<CsrSample>& samples, Complex center,
                          double radius) {
  std::int64_t inside = 0, total = 0;
  for (const auto& s : samples) {
    if (s.degenerate) continue;
    ++total;
    if (std::abs(s.z - center) <= radius) ++inside;
  }
  if (total == 0) {
    throw Error("disk mass fraction needs non-degenerate samples");
  }
  return static_cast<double>(inside) / static_cast<double>(total);
}

}  // namespace dqc
