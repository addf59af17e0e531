#pragma once

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "mbhom/finescale.hpp"
#include "mbhom/ratfit.hpp"

namespace mbh {

struct ClassicalMedium {
  double modulus = 1.0;
  double density = 1.0;
};

using MediumModel =
    std::variant<ClassicalMedium, RationalBranch1D, TensorBranch2D, MultibandModel1D, MultibandModel2D>;

enum class Provenance { fitted, published_table, classical_limit };
std::string to_string(Provenance p);

struct HomogenizedMedium {
  MediumModel model;
  Provenance provenance = Provenance::fitted;
  // When positive, the operator is multiplied by (1 - omega^2 / lift_omega_b^2).
  // This is how a classical medium is written in two-band variables.
  double lift_omega_b = 0.0;
  // Two-band 2-d only: take the higher natural from C_22pq instead of the
  // major-symmetrized tensor (the Lagrangian is then not symmetric).
  bool literal_naturals = false;

  static HomogenizedMedium classical(double modulus, double density);
  bool two_band() const;
  std::string kind() const;
};

// Time-harmonic Lagrangian sum_ab c_ab d^a f conj(d^b f) along the normal
// coordinate at fixed omega and tangential wavenumber k1.
struct NormalOperator {
  Eigen::MatrixXd c;
  int order() const { return static_cast<int>(c.rows()) - 1; }
  // Coefficients p_j of the characteristic polynomial in K = k^2.
  std::vector<double> char_poly() const;
  double char_value(cplx k) const;
};

NormalOperator normal_operator(const HomogenizedMedium& medium, double omega, double k1 = 0.0);

enum class ModeKind { propagating_plus, propagating_minus, evanescent_plus, evanescent_minus };

struct Mode {
  cplx k;                      // field factor exp(-i k x)
  ModeKind kind;
  double group_velocity = 0.0; // propagating modes only
  bool plus() const { return kind == ModeKind::propagating_plus || kind == ModeKind::evanescent_plus; }
  bool propagating() const {
    return kind == ModeKind::propagating_plus || kind == ModeKind::propagating_minus;
  }
};

enum class OutgoingRule { group_velocity, flux };

struct ModeSet {
  std::vector<cplx> ksq;   // characteristic roots in k^2
  std::vector<Mode> modes; // both signs of every root
  std::vector<Mode> plus() const;
  std::vector<Mode> minus() const;
};

ModeSet char_roots(const HomogenizedMedium& medium, double omega, double k1 = 0.0,
                   OutgoingRule rule = OutgoingRule::group_velocity);

// (e_0..e_{n-1}, Q_0..Q_{n-1}) of a unit-amplitude mode at its reference point.
Eigen::VectorXcd mode_traces(const NormalOperator& op, cplx k, int essentials);

// Time-averaged flux -1/2 Re sum_m Q_m conj(i omega e_m) of a trace vector
// laid out as in mode_traces.
double energy_flux_hom(const NormalOperator& op, const Eigen::VectorXcd& traces, double omega);
// Time-averaged energy density of a unit-amplitude propagating mode.
double energy_density_hom(const HomogenizedMedium& medium, double omega, double k1, double k);

enum class Pairing {
  natural_one_sided,  // extra conditions: higher-order naturals vanish on the richer side
  essential           // extra conditions: continuity of the higher derivatives
};

struct Region {
  HomogenizedMedium medium;
  double length = std::numeric_limits<double>::infinity();
};

struct InterfaceStack {
  std::vector<Region> regions;  // first and last semi-infinite; incidence from the first
  double omega = 1.0;
  double k1 = 0.0;
  Pairing pairing = Pairing::natural_one_sided;
  OutgoingRule outgoing = OutgoingRule::group_velocity;
  bool lift_classical = true;
  int incident_mode = 0;        // index among right-going propagating modes, by |k|
  std::vector<double> interfaces() const;
};

struct RegionModes {
  NormalOperator op;
  std::vector<Mode> modes;
  std::vector<double> reference;  // x where each mode has unit amplitude factor
  std::vector<int> unknown;       // column of each mode's amplitude
};

struct InterfaceSystem {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd rhs;
  std::vector<RegionModes> regions;
  Mode incident;
  std::vector<std::string> row_labels;
  double condition = 1.0;
};

// Effective media after applying the classical lift.
std::vector<HomogenizedMedium> effective_media(const InterfaceStack& stack);
InterfaceSystem assemble_interface_system(const InterfaceStack& stack);

struct HomScatteringSolution : ScatteringSolution {
  InterfaceStack stack;
  InterfaceSystem system;
  Eigen::VectorXcd amplitudes;
  double omega_used = 0.0;   // omega after any tie-breaking perturbation
};

HomScatteringSolution solve_scattering_hom(const InterfaceStack& stack);

// e_m and Q_m of the total field at x from inside region r.
Eigen::VectorXcd field_traces(const HomScatteringSolution& sol, int region, double x, int essentials);
std::vector<cplx> displacement_field_hom(const HomScatteringSolution& sol, const std::vector<double>& x);
// Largest residual over all imposed interface conditions.
double continuity_residual(const HomScatteringSolution& sol);

}  // namespace mbh
