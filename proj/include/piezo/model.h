#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace piezo {

/// Raised when physical or geometric inputs violate a model invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One rectangular layer of the composite, spanning z3 in [h_a, h_b] and
/// z2 in [-g_b, g_b] along a beam of length `length`.
struct LayerGeometry {
  double length = 1.0;
  double half_width = 0.1;
  double lower_face = 0.0;
  double upper_face = 0.01;

  void Validate() const;
};

struct MaterialParams {
  double substrate_density = 5000.0;     // rho_s  [kg/m^3]
  double substrate_stiffness = 1.0e5;    // C11,s  [N/m^2]
  double piezo_density = 7600.0;         // rho_p  [kg/m^3]
  double piezo_stiffness = 140.0e5;      // C11,p  [N/m^2]
  double coupling = 1.0e-3;              // gamma  [C/m^2]
  double impermittivity = 1.0e6;         // beta   [m/F]
  double permeability = 1.2e6;           // mu     [H/m]

  void Validate() const;
};

/// Cross-section area and first/second moments of one layer.
struct SectionProps {
  double area = 0.0;           // A   [m^2]
  double second_moment = 0.0;  // I   [m^4]
  double first_moment = 0.0;   // I_0 [m^3]
};

/// Lumped coefficients of the composite PDE.
struct CompositeParams {
  double rho_a = 0.0;   // [kg/m]
  double rho_i = 0.0;   // [kg m]
  double rho_i0 = 0.0;  // [kg]
  double c_a = 0.0;     // [N]
  double c_i = 0.0;     // [N m^2]
  double c_i0 = 0.0;    // [N m]
  double piezo_area = 0.0;          // A_p [m^2]
  double piezo_first_moment = 0.0;  // I_0 [m^3]
  double piezo_thickness = 0.0;     // h_b - h_a of the piezo layer [m]
  double impermittivity = 0.0;
  double permeability = 0.0;
  double coupling = 0.0;
  double half_width = 0.0;
  double length = 0.0;

  /// rho_A rho_I - rho_I0^2; positive for a definite mass form.
  double MassDeterminant() const { return rho_a * rho_i - rho_i0 * rho_i0; }
  /// C_A C_I - C_I0^2; positive for a definite stiffness form.
  double StiffnessDeterminant() const { return c_a * c_i - c_i0 * c_i0; }

  void Validate() const;
};

/// Entries a_ij of the first-order operator acting on
/// x = (v, w_z, Phi, v_t, w_zt, Phi_t).
struct OperatorCoefficients {
  double a41 = 0.0, a42 = 0.0, a46 = 0.0;
  double a51 = 0.0, a52 = 0.0, a56 = 0.0;
  double a63 = 0.0, a64 = 0.0, a65 = 0.0;
};

SectionProps section_props(const LayerGeometry& geom);

/// Piezo and substrate must share length and half-width. The coupling terms
/// rho_I0 and C_I0 use the piezo layer's first moment only.
CompositeParams composite_params(const MaterialParams& materials,
                                 const LayerGeometry& piezo,
                                 const LayerGeometry& substrate);

OperatorCoefficients operator_coefficients(const CompositeParams& params);

/// Pointwise state (v_z, w_zz, Phi_z, v_t, w_zt, Phi_t).
using PointState = Eigen::Matrix<double, 6, 1>;

/// Integrand of the total energy at one point [J/m].
double continuous_energy_density(const PointState& s,
                                 const CompositeParams& params);

/// Symmetric W with density = 1/2 s^T W s, recovered from
/// continuous_energy_density by polarization.
Eigen::Matrix<double, 6, 6> energy_density_matrix(const CompositeParams& params);

/// Reference parameters; piezo on z3 in [0, 0.01], substrate on
/// z3 in [-0.01, 0].
struct PhysicalSetup {
  MaterialParams material;
  LayerGeometry piezo{1.0, 0.1, 0.0, 0.01};
  LayerGeometry substrate{1.0, 0.1, -0.01, 0.0};

  CompositeParams Composite() const {
    return composite_params(material, piezo, substrate);
  }
};

/// Stable 64-bit FNV-1a hash of the full-precision parameter text.
std::string param_hash(const PhysicalSetup& setup);

}  // namespace piezo
