#include "mploc/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mploc/errors.hpp"

namespace mploc {

std::size_t SpectralData::index(const Config& x) const {
  auto idx = cube.index_of(x);
  if (!idx) throw RegionError("site " + x.to_string() + " is outside " + cube.to_string());
  return *idx;
}

double SpectralData::distance_to_spectrum(double E) const {
  return mploc::distance_to_spectrum(eigenvalues, E);
}

double distance_to_spectrum(const Eigen::VectorXd& sorted, double E) {
  if (sorted.size() == 0) return std::numeric_limits<double>::infinity();
  const double* begin = sorted.data();
  const double* end = begin + sorted.size();
  const double* it = std::lower_bound(begin, end, E);
  double best = std::numeric_limits<double>::infinity();
  if (it != end) best = std::min(best, *it - E);
  if (it != begin) best = std::min(best, E - *(it - 1));
  return best;
}

namespace {

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      if (std::abs(vectors(r, c)) > 1e-10) {
        if (vectors(r, c) < 0.0) vectors.col(c) *= -1.0;
        break;
      }
    }
  }
}

}  // namespace

SpectralData diagonalize(const MultiParticleCube& cube, const Eigen::MatrixXd& matrix) {
  check_site_cap(cube);
  const auto n = matrix.rows();
  if (matrix.cols() != n || static_cast<std::size_t>(n) != cube.size())
    throw DimensionError("matrix does not match cube " + cube.to_string());
  SpectralData s{cube, Eigen::VectorXd(n), matrix};
  if (n == 0) return s;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(n),
                                         s.eigenvectors.data(), static_cast<lapack_int>(n),
                                         s.eigenvalues.data());
  if (info != 0) throw Error("dsyevd failed with info " + std::to_string(info));
  fix_signs(s.eigenvectors);
  return s;
}

SpectralData diagonalize(const AssembledHamiltonian& H) { return diagonalize(H.cube, H.matrix); }

Eigen::VectorXd eigenvalues_only(const AssembledHamiltonian& H) {
  check_site_cap(H.cube);
  const auto n = H.matrix.rows();
  Eigen::VectorXd w(n);
  if (n == 0) return w;
  const auto kd = static_cast<Eigen::Index>(H.bandwidth());
  lapack_int info = 0;
  if (4 * kd < n) {
    Eigen::MatrixXd band = Eigen::MatrixXd::Zero(kd + 1, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = std::max<Eigen::Index>(0, j - kd); i <= j; ++i) band(kd + i - j, j) = H.matrix(i, j);
    info = LAPACKE_dsbev(LAPACK_COL_MAJOR, 'N', 'U', static_cast<lapack_int>(n), static_cast<lapack_int>(kd),
                         band.data(), static_cast<lapack_int>(kd + 1), w.data(), nullptr, 1);
  } else {
    Eigen::MatrixXd a = H.matrix;
    info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', static_cast<lapack_int>(n), a.data(),
                          static_cast<lapack_int>(n), w.data());
  }
  if (info != 0) throw Error("eigenvalue routine failed with info " + std::to_string(info));
  return w;
}

double green(const SpectralData& spec, double E, std::size_t x, std::size_t y) {
  const double eta = spec.distance_to_spectrum(E);
  if (!(eta > kSpectrumTolerance))
    throw ResonanceError("energy " + std::to_string(E) + " is on the spectrum of " + spec.cube.to_string(), eta);
  const auto xi = static_cast<Eigen::Index>(x);
  const auto yi = static_cast<Eigen::Index>(y);
  double g = 0.0;
  for (Eigen::Index j = 0; j < spec.eigenvalues.size(); ++j)
    g += spec.eigenvectors(xi, j) * spec.eigenvectors(yi, j) / (spec.eigenvalues(j) - E);
  return g;
}

double green(const SpectralData& spec, double E, const Config& x, const Config& y) {
  return green(spec, E, spec.index(x), spec.index(y));
}

Eigen::VectorXd resolvent_column(const AssembledHamiltonian& H, double E, std::size_t y) {
  const auto n = H.matrix.rows();
  if (static_cast<Eigen::Index>(y) >= n) throw RegionError("resolvent column index out of range");
  const auto kl = static_cast<Eigen::Index>(std::min<std::size_t>(H.bandwidth(), static_cast<std::size_t>(std::max<Eigen::Index>(n - 1, 0))));
  const Eigen::Index ldab = 2 * kl + kl + 1;
  Eigen::MatrixXd band = Eigen::MatrixXd::Zero(ldab, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, j - kl);
    const Eigen::Index hi = std::min<Eigen::Index>(n - 1, j + kl);
    for (Eigen::Index i = lo; i <= hi; ++i) band(2 * kl + i - j, j) = H.matrix(i, j) - (i == j ? E : 0.0);
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(static_cast<Eigen::Index>(y)) = 1.0;
  std::vector<lapack_int> pivots(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, static_cast<lapack_int>(n), static_cast<lapack_int>(kl),
                                        static_cast<lapack_int>(kl), 1, band.data(), static_cast<lapack_int>(ldab),
                                        pivots.data(), rhs.data(), static_cast<lapack_int>(n));
  if (info > 0) throw ResonanceError("H - E is singular on " + H.cube.to_string(), 0.0);
  if (info < 0) throw Error("dgbsv failed with info " + std::to_string(info));
  return rhs;
}

double correlator(const SpectralData& spec, std::size_t x, std::size_t y, const Interval& I) {
  const auto xi = static_cast<Eigen::Index>(x);
  const auto yi = static_cast<Eigen::Index>(y);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < spec.eigenvalues.size(); ++j)
    if (I.contains(spec.eigenvalues(j))) sum += std::abs(spec.eigenvectors(xi, j) * spec.eigenvectors(yi, j));
  return sum;
}

double correlator(const SpectralData& spec, const Config& x, const Config& y, const Interval& I) {
  return correlator(spec, spec.index(x), spec.index(y), I);
}

SpectralData tensor_eigenpairs(std::span<const SpectralData> parts) {
  if (parts.empty()) throw ParameterError("tensor product needs at least one part");
  Config center = parts.front().cube.center();
  std::vector<int> sides(parts.front().cube.sides().begin(), parts.front().cube.sides().end());
  std::size_t total = parts.front().cube.size();
  for (std::size_t p = 1; p < parts.size(); ++p) {
    center = center.join(parts[p].cube.center());
    sides.insert(sides.end(), parts[p].cube.sides().begin(), parts[p].cube.sides().end());
    if (total > site_cap() / std::max<std::size_t>(parts[p].cube.size(), 1))
      throw ResourceError("tensor product of " + std::to_string(parts.size()) + " parts exceeds the site cap");
    total *= parts[p].cube.size();
  }
  MultiParticleCube cube(center, sides);
  check_site_cap(cube);

  Eigen::VectorXd values = parts.front().eigenvalues;
  Eigen::MatrixXd vectors = parts.front().eigenvectors;
  for (std::size_t p = 1; p < parts.size(); ++p) {
    const auto& part = parts[p];
    const auto na = values.size();
    const auto nb = part.eigenvalues.size();
    Eigen::VectorXd v(na * nb);
    Eigen::MatrixXd w(vectors.rows() * part.eigenvectors.rows(), na * nb);
    for (Eigen::Index a = 0; a < na; ++a) {
      for (Eigen::Index b = 0; b < nb; ++b) {
        const Eigen::Index col = a * nb + b;
        v(col) = values(a) + part.eigenvalues(b);
        for (Eigen::Index r = 0; r < vectors.rows(); ++r)
          w.col(col).segment(r * part.eigenvectors.rows(), part.eigenvectors.rows()) =
              vectors(r, a) * part.eigenvectors.col(b);
      }
    }
    values = std::move(v);
    vectors = std::move(w);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
  SpectralData out{cube, Eigen::VectorXd(values.size()), Eigen::MatrixXd(vectors.rows(), vectors.cols())};
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.eigenvalues(static_cast<Eigen::Index>(k)) = values(order[k]);
    out.eigenvectors.col(static_cast<Eigen::Index>(k)) = vectors.col(order[k]);
  }
  return out;
}

double combes_thomas_bound(double eta, int nu, int distance) {
  return 2.0 / eta * std::exp(-eta * distance / (12.0 * nu));
}

CombesThomasReport combes_thomas_check(const SpectralData& spec, double E, int nu) {
  const double eta = spec.distance_to_spectrum(E);
  if (!(eta > 0.0 && eta <= 1.0))
    throw PreconditionError("Combes-Thomas check needs dist(E, spectrum) in (0, 1], got " + std::to_string(eta));
  if (nu < 1) throw ParameterError("lattice dimension nu must be >= 1");

  const Eigen::VectorXd inv = (spec.eigenvalues.array() - E).inverse().matrix();
  const Eigen::MatrixXd G = spec.eigenvectors * inv.asDiagonal() * spec.eigenvectors.transpose();
  const auto sites = spec.cube.sites();
  CombesThomasReport report{eta, 0.0, sites.front(), sites.front()};
  for (std::size_t x = 0; x < sites.size(); ++x) {
    for (std::size_t y = x; y < sites.size(); ++y) {
      const int dist = sup_distance(sites[x], sites[y]);
      const double ratio = std::abs(G(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y))) /
                           combes_thomas_bound(eta, nu, dist);
      if (ratio > report.max_violation_ratio) {
        report.max_violation_ratio = ratio;
        report.worst_x = sites[x];
        report.worst_y = sites[y];
      }
    }
  }
  return report;
}

PiGreenReconstruction pi_green_decomposition(const MultiParticleCube& cube, const DisorderRealization& realization,
                                             const InteractionSpec& interaction, double E, const Config& x,
                                             const Config& y) {
  PiGreenReconstruction out;
  const auto full = assemble(cube, realization, interaction);
  const auto xi = cube.index_of(x);
  const auto yi = cube.index_of(y);
  if (!xi || !yi) throw RegionError("Green function endpoints must lie in " + cube.to_string());

  if (cube.n() == 1) {
    out.direct = resolvent_column(full, E, *yi)(static_cast<Eigen::Index>(*xi));
    out.via_first_factor = out.direct;
    out.via_second_factor = out.direct;
    return out;
  }

  out.split = classify_interactivity(cube, interaction.r0);
  if (out.split.kind != Interactivity::partially)
    throw DecompositionError("cube " + cube.to_string() + " is fully interactive");

  const auto first = diagonalize(assemble(cube.restrict_to(out.split.first), realization, interaction));
  const auto second = diagonalize(assemble(cube.restrict_to(out.split.second), realization, interaction));
  for (Eigen::Index i = 0; i < first.eigenvalues.size(); ++i) {
    const double eta = second.distance_to_spectrum(E - first.eigenvalues(i));
    if (!(eta > kSpectrumTolerance))
      throw ResonanceError("energy " + std::to_string(E) + " is on the product spectrum", eta);
  }
  out.direct = resolvent_column(full, E, *yi)(static_cast<Eigen::Index>(*xi));

  const std::size_t x1 = first.index(x.select(out.split.first));
  const std::size_t y1 = first.index(y.select(out.split.first));
  const std::size_t x2 = second.index(x.select(out.split.second));
  const std::size_t y2 = second.index(y.select(out.split.second));

  double via_first = 0.0;
  for (Eigen::Index i = 0; i < first.eigenvalues.size(); ++i) {
    const double weight = first.eigenvectors(static_cast<Eigen::Index>(x1), i) *
                          first.eigenvectors(static_cast<Eigen::Index>(y1), i);
    via_first += weight * green(second, E - first.eigenvalues(i), x2, y2);
  }
  double via_second = 0.0;
  for (Eigen::Index j = 0; j < second.eigenvalues.size(); ++j) {
    const double weight = second.eigenvectors(static_cast<Eigen::Index>(x2), j) *
                          second.eigenvectors(static_cast<Eigen::Index>(y2), j);
    via_second += weight * green(first, E - second.eigenvalues(j), x1, y1);
  }
  out.via_first_factor = via_first;
  out.via_second_factor = via_second;
  return out;
}

}  // namespace mploc
