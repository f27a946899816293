#pragma once

#include <optional>

#include <json.hpp>

#include "gconvex/finite_gcf.hpp"

namespace gcx {

using Json = nlohmann::json;

Json to_json(const Point& p);
Point point_from_json(const Json& j, const char* field = "point");
Json to_json(const Box& box);
Box box_from_json(const Json& j);

/// {dim, kernel_kind, support, potentials, domain: {lower, upper},
///  support_box: {lower, upper}}. +inf potentials are written as "inf".
/// Doubles round-trip exactly.
Json to_json(const FiniteGCF& f);

/// Custom kernels cannot be reconstructed from JSON; pass the kernel to use
/// via `custom_kernel` (its boxes must match the file).
FiniteGCF finite_gcf_from_json(const Json& j, const std::optional<Kernel>& custom_kernel = {});

}  // namespace gcx
