#include <string>

#include "gconvex/errors.hpp"
#include "gconvex/ot_dual.hpp"

namespace gcx::ot {

using gcx::to_json;

namespace {

const Json& require(const Json& j, const std::string& path, const char* field) {
  if (!j.is_object() || !j.contains(field)) {
    throw InputError("missing field '" + path + field + "'");
  }
  return j.at(field);
}

SampleMeasure measure_from_json(const Json& j, const std::string& name) {
  const Json& pj = require(j, name + ".", "points");
  const Json& wj = require(j, name + ".", "weights");
  const std::string pfield = name + ".points";
  const std::string wfield = name + ".weights";
  if (!pj.is_array() || pj.empty()) throw InputError("field '" + pfield + "' must be a nonempty array");
  if (!wj.is_array() || wj.size() != pj.size()) {
    throw InputError("field '" + wfield + "' must be an array with one weight per point");
  }
  const Point first = point_from_json(pj[0], pfield.c_str());
  Eigen::MatrixXd points(static_cast<Eigen::Index>(pj.size()), first.size());
  Eigen::VectorXd weights(static_cast<Eigen::Index>(wj.size()));
  for (std::size_t k = 0; k < pj.size(); ++k) {
    const Point p = point_from_json(pj[k], pfield.c_str());
    if (p.size() != first.size()) throw InputError("field '" + pfield + "' mixes dimensions");
    points.row(static_cast<Eigen::Index>(k)) = p.transpose();
    if (!wj[k].is_number()) throw InputError("field '" + wfield + "' must hold numbers");
    weights[static_cast<Eigen::Index>(k)] = wj[k].get<double>();
  }
  try {
    return SampleMeasure(std::move(points), std::move(weights));
  } catch (const InputError& e) {
    throw InputError("field '" + name + "': " + e.what());
  }
}

Json measure_json(const SampleMeasure& m) {
  Json points = Json::array();
  for (std::size_t k = 0; k < m.size(); ++k) points.push_back(to_json(m.point(k)));
  Json weights = Json::array();
  for (Eigen::Index k = 0; k < m.weights().size(); ++k) weights.push_back(m.weights()[k]);
  return Json{{"points", std::move(points)}, {"weights", std::move(weights)}};
}

Box bounding_box(const SampleMeasure& m) {
  return Box(m.points().colwise().minCoeff().transpose(), m.points().colwise().maxCoeff().transpose());
}

}  // namespace

Instance instance_from_json(const Json& j) {
  SampleMeasure mu = measure_from_json(require(j, "", "mu"), "mu");
  SampleMeasure eta = measure_from_json(require(j, "", "eta"), "eta");
  const Json& kj = require(j, "", "kernel");
  std::string kind;
  Box x_box = bounding_box(mu);
  Box y_box = bounding_box(eta);
  if (kj.is_string()) {
    kind = kj.get<std::string>();
  } else if (kj.is_object()) {
    const Json& name = require(kj, "kernel.", "kind");
    if (!name.is_string()) throw InputError("field 'kernel.kind' must be a string");
    kind = name.get<std::string>();
    if (kj.contains("x_box")) x_box = box_from_json(kj.at("x_box"));
    if (kj.contains("y_box")) y_box = box_from_json(kj.at("y_box"));
  } else {
    throw InputError("field 'kernel' must be a kind name or an object");
  }
  switch (kernel_kind_from_string(kind)) {
    case KernelKind::Bilinear:
      return Instance{std::move(mu), std::move(eta), Kernel::bilinear(x_box, y_box)};
    case KernelKind::NegSquaredDistance:
      return Instance{std::move(mu), std::move(eta), Kernel::neg_squared_distance(x_box, y_box)};
    case KernelKind::Custom:
      break;
  }
  throw UnsupportedError("custom kernels cannot be loaded from a file");
}

Json to_json(const Instance& instance) {
  return Json{{"mu", measure_json(instance.mu)},
              {"eta", measure_json(instance.eta)},
              {"kernel",
               {{"kind", std::string(to_string(instance.kernel.kind()))},
                {"x_box", to_json(instance.kernel.x_box())},
                {"y_box", to_json(instance.kernel.y_box())}}}};
}

Json solution_json(const DualSolution& solution, const TransportAssignment& assignment) {
  Json potentials = Json::array();
  for (Eigen::Index i = 0; i < solution.potential.potentials().size(); ++i) {
    potentials.push_back(solution.potential.potentials()[i]);
  }
  Json j{{"value", solution.value},
         {"potentials", std::move(potentials)},
         {"assignment", assignment.target},
         {"primal_value", assignment.objective},
         {"converged", solution.converged},
         {"iterations", solution.iterations}};
  if (!solution.warnings.empty()) j["warnings"] = solution.warnings;
  return j;
}

}  // namespace gcx::ot
