#include "qhm/cli/operator_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qhm::cli {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

const Json& require(const Json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) fail(std::string("missing field \"") + key + "\"");
  return *it;
}

double require_number(const Json& doc, const char* key) {
  const Json& v = require(doc, key);
  if (!v.is_number()) fail(std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

Index require_count(const Json& doc, const char* key) {
  const Json& v = require(doc, key);
  if (!v.is_number_integer() || v.get<long long>() <= 0)
    fail(std::string("field \"") + key + "\" must be a positive integer");
  return static_cast<Index>(v.get<long long>());
}

Operator parse_dense(const Json& doc) {
  const Index dim = require_count(doc, "dim");
  // 4096^2 entries is already far beyond desk scale
  if (dim > 4096) fail("dim " + std::to_string(dim) + " is too large");
  const Json& entries = require(doc, "entries");
  if (!entries.is_array()) fail("\"entries\" must be an array of [re, im] pairs");
  if (static_cast<Index>(entries.size()) != dim * dim) {
    std::ostringstream msg;
    msg << "\"entries\" has " << entries.size() << " pairs, expected dim^2 = " << dim * dim;
    fail(msg.str());
  }
  Matrix m(dim, dim);
  for (Index k = 0; k < dim * dim; ++k) {
    const Json& e = entries[static_cast<size_t>(k)];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      fail("entry " + std::to_string(k) + " is not a [re, im] pair of numbers");
    m(k / dim, k % dim) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  std::string label;
  if (const auto it = doc.find("label"); it != doc.end()) {
    if (!it->is_string()) fail("\"label\" must be a string");
    label = it->get<std::string>();
  }
  return Operator(std::move(m), std::move(label));
}

HalfLineSpec parse_samsonov(const Json& doc) {
  HalfLineSpec spec;
  spec.d = require_number(doc, "d");
  spec.b = require_number(doc, "b");
  spec.box_length = HalfLineSpec::default_box_length(spec.d);
  if (doc.contains("box_length")) spec.box_length = require_number(doc, "box_length");
  if (doc.contains("n")) spec.n = require_count(doc, "n");
  spec.validate();
  return spec;
}

}  // namespace

Operator OperatorFile::primary_operator() const {
  if (kind == OperatorKind::Dense) return *dense;
  return build_pair(*samsonov).H;
}

OperatorFile parse_operator_file(const Json& doc) {
  if (!doc.is_object()) fail("operator file must be a JSON object");
  const Json& format = require(doc, "format");
  if (!format.is_number_integer() || format.get<long long>() != kOperatorFileFormat)
    fail("unsupported \"format\", expected " + std::to_string(kOperatorFileFormat));
  const Json& kind = require(doc, "kind");
  if (!kind.is_string()) fail("\"kind\" must be a string");

  OperatorFile out;
  const auto k = kind.get<std::string>();
  if (k == "dense") {
    out.kind = OperatorKind::Dense;
    out.dense = parse_dense(doc);
  } else if (k == "samsonov") {
    out.kind = OperatorKind::Samsonov;
    out.samsonov = parse_samsonov(doc);
  } else {
    fail("unknown kind \"" + k + "\"");
  }
  return out;
}

OperatorFile load_operator_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(path.string() + ": " + e.what());
  }
  return parse_operator_file(doc);
}

Json operator_to_json(const Operator& op) {
  Json entries = Json::array();
  const Matrix& m = op.matrix();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) entries.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
  Json out;
  out["format"] = kOperatorFileFormat;
  out["kind"] = "dense";
  out["dim"] = op.dim();
  out["label"] = op.label();
  out["entries"] = std::move(entries);
  return out;
}

}  // namespace qhm::cli
