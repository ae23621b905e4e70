#pragma once

// On-disk operator description, JSON with a required "format": 1 field.
//
//   {"format": 1, "kind": "dense", "dim": 2, "label": "A",
//    "entries": [[1, 0], [1, 0], [0, 0], [2, 0]]}        row-major [re, im]
//   {"format": 1, "kind": "samsonov", "d": -1, "b": 1, "box_length": 40, "n": 200}

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "qhm/halfline.hpp"
#include "qhm/operator_core.hpp"

namespace qhm::cli {

inline constexpr int kOperatorFileFormat = 1;

enum class OperatorKind { Dense, Samsonov };

struct OperatorFile {
  OperatorKind kind = OperatorKind::Dense;
  std::optional<Operator> dense;
  std::optional<HalfLineSpec> samsonov;

  /// The dense operator, or the discretized H for a samsonov spec.
  Operator primary_operator() const;
};

/// Throws Error(ParseError) on any schema violation and InvalidSpec /
/// InvalidOperator when the content is well-formed but unusable.
OperatorFile parse_operator_file(const nlohmann::ordered_json& doc);
OperatorFile load_operator_file(const std::filesystem::path& path);

nlohmann::ordered_json operator_to_json(const Operator& op);

}  // namespace qhm::cli
