#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "mploc/lattice.hpp"
#include "mploc/model.hpp"

namespace mploc {

// Eigenpairs of an assembled Hamiltonian. Eigenvalues ascend; eigenvector
// columns are orthonormal with their first non-negligible entry positive.
struct SpectralData {
  MultiParticleCube cube;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  std::size_t index(const Config& x) const;
  double distance_to_spectrum(double E) const;
};

// Energies closer than this to an eigenvalue count as on the spectrum.
inline constexpr double kSpectrumTolerance = 1e-12;

double distance_to_spectrum(const Eigen::VectorXd& sorted_eigenvalues, double E);

SpectralData diagonalize(const AssembledHamiltonian& H);
SpectralData diagonalize(const MultiParticleCube& cube, const Eigen::MatrixXd& matrix);

// Eigenvalues only; uses a banded reduction when the matrix is narrow.
Eigen::VectorXd eigenvalues_only(const AssembledHamiltonian& H);

// G(x, y; E) = sum_j psi_j(x) psi_j(y) / (lambda_j - E).
double green(const SpectralData& spec, double E, const Config& x, const Config& y);
double green(const SpectralData& spec, double E, std::size_t x, std::size_t y);

// Column (H - E)^{-1} e_y by banded LU with partial pivoting.
Eigen::VectorXd resolvent_column(const AssembledHamiltonian& H, double E, std::size_t y);

// Upsilon(x, y, I) = sum over eigenvalues in I of |psi_j(x) psi_j(y)|.
double correlator(const SpectralData& spec, const Config& x, const Config& y, const Interval& I);
double correlator(const SpectralData& spec, std::size_t x, std::size_t y, const Interval& I);

// Eigenpairs of the Kronecker sum of the parts; the product cube joins the
// parts' particles in order.
SpectralData tensor_eigenpairs(std::span<const SpectralData> parts);

struct CombesThomasReport {
  double eta = 0.0;
  double max_violation_ratio = 0.0;
  Config worst_x;
  Config worst_y;
};

// 2 eta^{-1} exp(-eta |x - y| / (12 nu)).
double combes_thomas_bound(double eta, int nu, int distance);

// Scans all site pairs; eta must lie in (0, 1].
CombesThomasReport combes_thomas_check(const SpectralData& spec, double E, int nu);

struct PiGreenReconstruction {
  InteractivityClass split;
  double direct = 0.0;            // linear solve on the full cube
  double via_first_factor = 0.0;  // sum over first-factor eigenpairs
  double via_second_factor = 0.0; // sum over second-factor eigenpairs
};

// G(x, y; E) on a partially interactive cube computed three ways. For a
// single particle all three entries are the direct value.
PiGreenReconstruction pi_green_decomposition(const MultiParticleCube& cube,
                                             const DisorderRealization& realization,
                                             const InteractionSpec& interaction, double E,
                                             const Config& x, const Config& y);

}  // namespace mploc
