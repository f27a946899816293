#include "gconvex/gcf_io.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gconvex/errors.hpp"

namespace gcx {

namespace {

const Json& require(const Json& j, const char* field) {
  if (!j.is_object() || !j.contains(field)) {
    throw InputError(std::string("missing field '") + field + "'");
  }
  return j.at(field);
}

double potential_from_json(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  if (!j.is_number()) throw InputError("field 'potentials' must hold numbers or \"inf\"");
  return j.get<double>();
}

}  // namespace

Json to_json(const Point& p) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p[i]);
  return a;
}

Point point_from_json(const Json& j, const char* field) {
  if (!j.is_array() || j.empty()) {
    throw InputError(std::string("field '") + field + "' must be a nonempty array of numbers");
  }
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw InputError(std::string("field '") + field + "' must be a nonempty array of numbers");
    }
    p[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return p;
}

Json to_json(const Box& box) {
  return Json{{"lower", to_json(box.lower())}, {"upper", to_json(box.upper())}};
}

Box box_from_json(const Json& j) {
  return Box(point_from_json(require(j, "lower"), "lower"),
             point_from_json(require(j, "upper"), "upper"));
}

Json to_json(const FiniteGCF& f) {
  Json support = Json::array();
  for (const auto& y : f.support()) support.push_back(to_json(y));
  Json potentials = Json::array();
  for (Eigen::Index i = 0; i < f.potentials().size(); ++i) {
    const double r = f.potentials()[i];
    if (std::isinf(r)) {
      potentials.push_back("inf");
    } else {
      potentials.push_back(r);
    }
  }
  Json j{{"dim", f.dim()},
         {"kernel_kind", std::string(to_string(f.kernel().kind()))},
         {"support", std::move(support)},
         {"potentials", std::move(potentials)},
         {"domain", to_json(f.domain())},
         {"support_box", to_json(f.support_box())}};
  if (f.kernel().is_transposed()) j["kernel_transposed"] = true;
  return j;
}

FiniteGCF finite_gcf_from_json(const Json& j, const std::optional<Kernel>& custom_kernel) {
  const Box domain = box_from_json(require(j, "domain"));
  const Box support_box = j.contains("support_box") ? box_from_json(j.at("support_box")) : domain;
  const auto dim = require(j, "dim").get<std::size_t>();
  if (dim != domain.dim()) throw InputError("field 'dim' disagrees with 'domain'");

  const KernelKind kind = kernel_kind_from_string(require(j, "kernel_kind").get<std::string>());
  const bool transposed = j.value("kernel_transposed", false);
  std::optional<Kernel> kernel;
  switch (kind) {
    case KernelKind::Bilinear:
      kernel = transposed ? Kernel::bilinear(support_box, domain).transposed()
                          : Kernel::bilinear(domain, support_box);
      break;
    case KernelKind::NegSquaredDistance:
      kernel = transposed ? Kernel::neg_squared_distance(support_box, domain).transposed()
                          : Kernel::neg_squared_distance(domain, support_box);
      break;
    case KernelKind::Custom:
      if (!custom_kernel) throw UnsupportedError("custom kernels must be supplied by the caller");
      if (!(custom_kernel->x_box() == domain) || !(custom_kernel->y_box() == support_box)) {
        throw InputError("supplied custom kernel boxes disagree with the file");
      }
      kernel = *custom_kernel;
      break;
  }

  const Json& sj = require(j, "support");
  const Json& pj = require(j, "potentials");
  if (!sj.is_array() || !pj.is_array()) throw InputError("'support' and 'potentials' must be arrays");
  PointSet support;
  for (const auto& p : sj) support.push_back(point_from_json(p, "support"));
  Eigen::VectorXd r(static_cast<Eigen::Index>(pj.size()));
  for (std::size_t i = 0; i < pj.size(); ++i) r[static_cast<Eigen::Index>(i)] = potential_from_json(pj[i]);
  return FiniteGCF(std::move(*kernel), std::move(support), std::move(r));
}

}  // namespace gcx
