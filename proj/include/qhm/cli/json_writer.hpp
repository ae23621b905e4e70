#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qhm/operator_core.hpp"

namespace qhm::cli {

using Json = nlohmann::ordered_json;

/// Two-space indented JSON. Floating point values are printed with %.17g,
/// non-finite ones as null. Key order is insertion order.
std::string emit_json(const Json& value);

/// Writes through a sibling temporary file and renames it over the target.
void write_atomic(const std::filesystem::path& path, std::string_view content);

Json complex_json(std::complex<double> z);
Json complex_list_json(const Vector& values);

/// Finite doubles as numbers, anything else as null.
Json number_or_null(double x);

}  // namespace qhm::cli
