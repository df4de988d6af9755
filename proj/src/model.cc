#include "piezo/model.h"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

namespace piezo {

namespace {

std::string Describe(const char* what, double value) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (got " << value << ")";
  return os.str();
}

}  // namespace

void LayerGeometry::Validate() const {
  if (!(length > 0.0)) throw ValidationError(Describe("length must be > 0", length));
  if (!(half_width > 0.0)) {
    throw ValidationError(Describe("half-width g_b must be > 0", half_width));
  }
  if (!(upper_face > lower_face)) {
    throw ValidationError(
        Describe("upper face h_b must exceed lower face h_a; h_b - h_a",
                 upper_face - lower_face));
  }
}

void MaterialParams::Validate() const {
  const std::pair<const char*, double> positive[] = {
      {"substrate density rho_s must be > 0", substrate_density},
      {"substrate stiffness C11_s must be > 0", substrate_stiffness},
      {"piezo density rho_p must be > 0", piezo_density},
      {"piezo stiffness C11_p must be > 0", piezo_stiffness},
      {"impermittivity beta must be > 0", impermittivity},
      {"permeability mu must be > 0", permeability},
  };
  for (const auto& [what, value] : positive) {
    if (!(value > 0.0)) throw ValidationError(Describe(what, value));
  }
  if (!(coupling >= 0.0)) {
    throw ValidationError(Describe("coupling gamma must be >= 0", coupling));
  }
}

void CompositeParams::Validate() const {
  if (!(MassDeterminant() > 0.0)) {
    throw ValidationError(Describe(
        "mass form not positive definite: rho_A rho_I - rho_I0^2",
        MassDeterminant()));
  }
  if (!(StiffnessDeterminant() > 0.0)) {
    throw ValidationError(Describe(
        "stiffness form not positive definite: C_A C_I - C_I0^2",
        StiffnessDeterminant()));
  }
  if (!(piezo_area > 0.0) || !(impermittivity > 0.0) || !(permeability > 0.0)) {
    throw ValidationError("electromagnetic coefficients must be positive");
  }
}

SectionProps section_props(const LayerGeometry& geom) {
  geom.Validate();
  const double gb = geom.half_width;
  const double ha = geom.lower_face;
  const double hb = geom.upper_face;
  SectionProps s;
  s.area = 2.0 * gb * (hb - ha);
  s.second_moment = 2.0 / 3.0 * gb * (hb * hb * hb - ha * ha * ha);
  s.first_moment = gb * (hb * hb - ha * ha);
  return s;
}

CompositeParams composite_params(const MaterialParams& materials,
                                 const LayerGeometry& piezo,
                                 const LayerGeometry& substrate) {
  materials.Validate();
  const SectionProps p = section_props(piezo);
  const SectionProps s = section_props(substrate);
  if (piezo.length != substrate.length) {
    throw ValidationError(Describe("layers must share the beam length; difference",
                                   piezo.length - substrate.length));
  }
  if (piezo.half_width != substrate.half_width) {
    throw ValidationError(Describe("layers must share the half-width g_b; difference",
                                   piezo.half_width - substrate.half_width));
  }

  CompositeParams c;
  c.rho_a = materials.piezo_density * p.area + materials.substrate_density * s.area;
  c.rho_i = materials.piezo_density * p.second_moment +
            materials.substrate_density * s.second_moment;
  c.rho_i0 = materials.piezo_density * p.first_moment;
  c.c_a = materials.piezo_stiffness * p.area + materials.substrate_stiffness * s.area;
  c.c_i = materials.piezo_stiffness * p.second_moment +
          materials.substrate_stiffness * s.second_moment;
  c.c_i0 = materials.piezo_stiffness * p.first_moment;
  c.piezo_area = p.area;
  c.piezo_first_moment = p.first_moment;
  c.piezo_thickness = piezo.upper_face - piezo.lower_face;
  c.impermittivity = materials.impermittivity;
  c.permeability = materials.permeability;
  c.coupling = materials.coupling;
  c.half_width = piezo.half_width;
  c.length = piezo.length;
  c.Validate();
  return c;
}

OperatorCoefficients operator_coefficients(const CompositeParams& p) {
  p.Validate();
  const double det = p.MassDeterminant();
  const double g = p.coupling;
  const double beta = p.impermittivity;
  const double ap = p.piezo_area;
  const double i0 = p.piezo_first_moment;

  OperatorCoefficients a;
  a.a41 = (p.rho_i * p.c_a - p.rho_i0 * p.c_i0) / det;
  a.a42 = (p.rho_i * p.c_i0 - p.rho_i0 * p.c_i) / det;
  a.a46 = g * (p.rho_i * ap - p.rho_i0 * i0) / det;
  a.a51 = (p.rho_a * p.c_i0 - p.rho_i0 * p.c_a) / det;
  a.a52 = (p.rho_a * p.c_i - p.rho_i0 * p.c_i0) / det;
  a.a56 = g * (p.rho_a * i0 - p.rho_i0 * ap) / det;
  a.a63 = beta / p.permeability;
  a.a64 = g * beta;
  a.a65 = g * beta * i0 / ap;
  return a;
}

double continuous_energy_density(const PointState& s, const CompositeParams& p) {
  const double vz = s[0], wzz = s[1], phiz = s[2];
  const double vt = s[3], wzt = s[4], phit = s[5];
  const double kinetic = p.rho_a * vt * vt + p.rho_i * wzt * wzt -
                         2.0 * p.rho_i0 * vt * wzt +
                         p.piezo_area / p.impermittivity * phit * phit;
  const double potential = p.c_a * vz * vz + p.c_i * wzz * wzz -
                           2.0 * p.c_i0 * vz * wzz +
                           p.piezo_area / p.permeability * phiz * phiz;
  return 0.5 * (kinetic + potential);
}

Eigen::Matrix<double, 6, 6> energy_density_matrix(const CompositeParams& params) {
  Eigen::Matrix<double, 6, 6> w;
  const auto unit = [](int i) { return PointState::Unit(i); };
  for (int i = 0; i < 6; ++i) {
    w(i, i) = 2.0 * continuous_energy_density(unit(i), params);
  }
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) {
      const double both = continuous_energy_density(unit(i) + unit(j), params);
      w(i, j) = both - 0.5 * (w(i, i) + w(j, j));
      w(j, i) = w(i, j);
    }
  }
  return w;
}

std::string param_hash(const PhysicalSetup& setup) {
  char buf[1024];
  const auto& m = setup.material;
  const auto& a = setup.piezo;
  const auto& b = setup.substrate;
  std::snprintf(buf, sizeof(buf),
                "%.17g %.17g %.17g %.17g %.17g %.17g %.17g|%.17g %.17g %.17g "
                "%.17g|%.17g %.17g %.17g %.17g",
                m.substrate_density, m.substrate_stiffness, m.piezo_density,
                m.piezo_stiffness, m.coupling, m.impermittivity, m.permeability,
                a.length, a.half_width, a.lower_face, a.upper_face, b.length,
                b.half_width, b.lower_face, b.upper_face);
  std::uint64_t h = 14695981039346656037ULL;
  for (const char* c = buf; *c != '\0'; ++c) {
    h ^= static_cast<unsigned char>(*c);
    h *= 1099511628211ULL;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace piezo
