#pragma once

#include <string>
#include <vector>

#include "mbhom/config.hpp"
#include "mbhom/homsolve.hpp"

namespace mbh {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string to_csv() const;
};

// Published coefficient sets for CELL_A.
RationalBranch1D published_branch_1d(int order_label);
TensorBranch2D published_branch_2d();
MultibandModel2D published_two_band_2d();

// Frequency used to normalize omega: midgap of normalization_cell, else of cell.
double reference_omega0(const RunConfig& cfg);

// Homogenized media selected by the approximation block.
HomogenizedMedium approximation_1d(const RunConfig& cfg, const UnitCell& cell);
HomogenizedMedium approximation_2d(const RunConfig& cfg, const UnitCell& cell);
HomogenizedMedium two_band_1d(const RunConfig& cfg, const UnitCell& cell);
HomogenizedMedium two_band_2d(const RunConfig& cfg, const UnitCell& cell);
// Medium on the incidence side: treatment = classical or artificial_laminate.
HomogenizedMedium incidence_medium(const RunConfig& cfg, const UnitCell& cell);

Table cmd_dispersion(const RunConfig& cfg, int threads = 1);
json cmd_fit(const RunConfig& cfg);
Table cmd_scatter1d(const RunConfig& cfg, int threads = 1);
Table cmd_scatter2d(const RunConfig& cfg, int threads = 1);
Table cmd_field(const RunConfig& cfg, int threads = 1);
Table cmd_multiband(const RunConfig& cfg, int threads = 1);
Table cmd_nonlocal(const RunConfig& cfg, int threads = 1);

// Serialized output of a verb: CSV text, or JSON text for `fit`.
std::string run_command(const std::string& verb, const RunConfig& cfg, int threads = 1);

}  // namespace mbh
