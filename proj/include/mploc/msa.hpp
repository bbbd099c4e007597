#pragma once

// Multi-scale analysis verdicts: singular/non-singular and resonant cubes,
// complete non-resonance, singular subcube packings, the fixed-energy
// recursion ledger and the variable-energy interval cover.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mploc/lattice.hpp"
#include "mploc/model.hpp"
#include "mploc/spectral.hpp"

namespace mploc {

struct StrictCheck {
  bool strict = false;
  std::vector<std::string> violations;
};

struct MsaParams {
  int N = 2;
  int d = 1;
  int n = 2;
  double m = 0.01;
  double p = 2.0;
  double theta = 0.1;
  double alpha = 1.5;
  int L0 = 8;
  double resonance_exponent = 0.5;
  int J_threshold = -1;  // negative -> kappa(n) + 5

  void validate() const;
  int J() const;
  // L_{k+1} = floor(L_k^alpha).
  int scale(int k) const;
  double p_k(int k) const;
  StrictCheck strict_check() const;

  bool operator==(const MsaParams&) const = default;
};

// m (1 + L^{-1/8})^{N - n + 1}.
double gamma(double m, int L, int n, int N);
// exp(-L^exponent).
double resonance_threshold(int L, double exponent = 0.5);

struct CubeVerdict {
  bool ns = false;
  bool resonant = false;
  std::optional<bool> cnr;
  double max_boundary_green = 0.0;
  double gamma_threshold = 0.0;  // exp(-gamma L)
  double eta = 0.0;
};

// Cube must have equal sides; the center is the point u of the definition.
CubeVerdict classify_cube(const AssembledHamiltonian& H, double E, const MsaParams& params);
CubeVerdict classify_cube(const SpectralData& spec, double E, const MsaParams& params);

// F_u(E): max over the internal boundary of |G(u, v; E)|; infinity on the
// spectrum.
double boundary_green_max(const SpectralData& spec, double E);
std::vector<double> boundary_green_profile(const SpectralData& spec, std::span<const double> energies);

struct CnrResult {
  bool cnr = true;
  std::optional<MultiParticleCube> offender;
};

// Scans subcubes of side ceil(L^{1/alpha})..L (largest first, centers in
// lexicographic order on the given stride) for a resonant one.
CnrResult is_cnr(const MultiParticleCube& cube, double E, const MsaParams& params,
                 const DisorderRealization& realization, const InteractionSpec& interaction, int stride = 1);

struct SingularCount {
  int pi = 0;
  int fi = 0;
  // True when a packing count stopped early above the J threshold.
  bool exceeded = false;
};

// Largest subset of points with pairwise max-norm distance > min_distance.
// Stops once the best size exceeds cap (the returned size is then cap + 1).
int max_separated_packing(const std::vector<Config>& points, int min_distance, int cap);

SingularCount count_singular_subcubes(const MultiParticleCube& big, int small_side, double E,
                                      const MsaParams& params, const DisorderRealization& realization,
                                      const InteractionSpec& interaction, int stride = 1);

struct RecursionInputs {
  double P_k = 0.0;
  double Q_next = 0.0;
  double S_next = 0.0;
  std::optional<double> P_next;
};

struct RecursionRecord {
  int k = 0;
  int L_k = 0;
  int L_next = 0;
  double P_k = 0.0;
  double Q_next = 0.0;
  double S_next = 0.0;
  double rhs_bound = 0.0;
  double paper_target = 0.0;
  std::optional<double> P_next;
  std::optional<bool> holds;
};

struct RecursionLedger {
  std::vector<RecursionRecord> records;
};

// (3^{2nd}/2) L^{2nd} P^2 + Q + S.
double recursion_rhs(int n, int d, int L_next, double P_k, double Q_next, double S_next);

const RecursionRecord& recursion_step(RecursionLedger& ledger, int k, const MsaParams& params,
                                      const RecursionInputs& inputs);

struct CoverParameters {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

// a = L^{-p_k/5}, b = L^{-4 p_k/5}, c = 3^{Nd/2} L^{-p_k/5}.
CoverParameters cover_parameters(int L, double p_k, int N, int d);

struct CoverResult {
  CoverParameters params;
  bool condition_holds = false;  // b <= min(a c^2 / |C|, c)
  double condition_bound = 0.0;
  std::size_t grid_points = 0;
  std::vector<double> bad_energies;
  std::vector<Interval> cover;
  std::vector<double> uncovered;
};

CoverResult energy_interval_cover(const SpectralData& spec, const MsaParams& params, int k, const Interval& I,
                                  double grid_step);

nlohmann::json verdict_to_json(const CubeVerdict& v, const MultiParticleCube& cube, double E, double m,
                               double h);

}  // namespace mploc
