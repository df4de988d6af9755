#include "piezo/state_space.h"

#include <stdexcept>

namespace piezo {

std::string to_string(Scheme s) { return s == Scheme::kFem ? "fem" : "mfem"; }

std::string to_string(FemVariant v) {
  return v == FemVariant::kStandard ? "standard" : "paper";
}

std::string to_string(OutputMap m) {
  return m == OutputMap::kEnergyAdjoint ? "energy" : "transpose";
}

std::string to_string(StateOrdering o) {
  return o == StateOrdering::kFieldBlocks ? "field-blocks" : "element-stacked";
}

Scheme parse_scheme(const std::string& text) {
  if (text == "fem" || text == "FEM") return Scheme::kFem;
  if (text == "mfem" || text == "MFEM") return Scheme::kMfem;
  throw ValidationError("unknown scheme '" + text + "' (expected fem or mfem)");
}

FemVariant parse_variant(const std::string& text) {
  if (text == "standard") return FemVariant::kStandard;
  if (text == "paper") return FemVariant::kPaper;
  throw ValidationError("unknown variant '" + text +
                        "' (expected standard or paper)");
}

OutputMap parse_output_map(const std::string& text) {
  if (text == "energy") return OutputMap::kEnergyAdjoint;
  if (text == "transpose") return OutputMap::kTranspose;
  throw ValidationError("unknown output map '" + text +
                        "' (expected energy or transpose)");
}

std::string StateSpaceModel::Provenance() const {
  std::string p = to_string(scheme) + ":N=" + std::to_string(order);
  if (scheme == Scheme::kFem) p += ":" + to_string(variant);
  return p + ":" + param_hash(setup);
}

void StateSpaceModel::Validate() const {
  const Eigen::Index n = A.rows();
  if (n == 0 || A.cols() != n) throw ValidationError("A must be square and non-empty");
  if (B.size() != n || C.size() != n) {
    throw ValidationError("B and C must have length " + std::to_string(n));
  }
  if (E.rows() != n || E.cols() != n) {
    throw ValidationError("E must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !E.allFinite()) {
    throw ValidationError("model contains non-finite entries");
  }
  if (n != 6 * order) {
    throw ValidationError("state dimension " + std::to_string(n) +
                          " does not equal 6N with N=" + std::to_string(order));
  }
}

void set_output(StateSpaceModel& model, OutputMap map) {
  model.output = map;
  if (map == OutputMap::kEnergyAdjoint) {
    model.C = (model.E * model.B).transpose();
  } else {
    model.C = model.B.transpose();
  }
}

double relative_skew_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& E) {
  const double scale = E.norm() * A.norm();
  if (scale == 0.0) return 0.0;
  return (E * A + A.transpose() * E).norm() / scale;
}

}  // namespace piezo
