#include "qhm/cli/json_writer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace qhm::cli {

namespace {

void emit(const Json& v, std::string& out, int depth) {
  const std::string pad(static_cast<size_t>(2 * depth + 2), ' ');
  const std::string close_pad(static_cast<size_t>(2 * depth), ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += ": ";
        emit(it.value(), out, depth + 1);
      }
      out += '\n';
      out += close_pad;
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line; [re, im] pairs and eigenvalue lists read better that way
      const bool flat = std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_primitive(); });
      const bool short_nested = std::all_of(v.begin(), v.end(), [](const Json& e) {
        return e.is_array() && std::all_of(e.begin(), e.end(), [](const Json& x) { return x.is_primitive(); });
      });
      if (flat || short_nested) {
        out += '[';
        bool first = true;
        for (const auto& e : v) {
          if (!first) out += ", ";
          first = false;
          emit(e, out, depth + 1);
        }
        out += ']';
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        emit(e, out, depth + 1);
      }
      out += '\n';
      out += close_pad;
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = v.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out += buf;
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string emit_json(const Json& value) {
  std::string out;
  emit(value, out, 0);
  out += '\n';
  return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot rename onto " + path.string());
  }
}

Json complex_json(std::complex<double> z) { return Json::array({number_or_null(z.real()), number_or_null(z.imag())}); }

Json complex_list_json(const Vector& values) {
  Json out = Json::array();
  for (Index i = 0; i < values.size(); ++i) out.push_back(complex_json(values(i)));
  return out;
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace qhm::cli
