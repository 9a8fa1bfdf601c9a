#include "dimsim/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dimsim/errors.hpp"

#ifndef DIMSIM_VERSION
#define DIMSIM_VERSION "0.0.0"
#endif

namespace dimsim {
namespace {

void dump(const nlohmann::json& j, int indent, int level, std::string& out) {
  const auto newline = [&](int lvl) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * lvl), ' ');
  };
  switch (j.type()) {
    case nlohmann::json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_number(x) : "null";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        newline(level + 1);
        dump(v, indent, level + 1, out);
      }
      newline(level);
      out += ']';
      return;
    }
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(level + 1);
        out += nlohmann::json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump(it.value(), indent, level + 1, out);
      }
      newline(level);
      out += '}';
      return;
    }
    default:
      out += j.dump();
  }
}

std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\n\r") == std::string::npos) return f;
  std::string q = "\"";
  for (char c : f) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dump_json(const nlohmann::json& j, int indent) {
  std::string out;
  dump(j, indent, 0, out);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, dump_json(j) + "\n"); }

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("malformed JSON in " + path.string() + ": " + e.what());
  }
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> fields) {
  if (fields.size() != header_.size()) throw InvalidArgument("CSV row has the wrong number of fields");
  rows_.push_back(std::move(fields));
}

std::string CsvTable::str() const {
  std::ostringstream os;
  const auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) os << (k ? "," : "") << csv_field(fields[k]);
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

void to_json(nlohmann::json& j, const RunManifest& m) {
  j = nlohmann::json{{"command", m.command},
                     {"methods", m.methods},
                     {"problem", m.problem},
                     {"parameters", m.parameters},
                     {"h_list", m.h_list},
                     {"outputs", m.outputs},
                     {"nondeterministic_outputs", m.nondeterministic_outputs},
                     {"seed", m.seed},
                     {"tool_version", m.tool_version},
                     {"args", m.args}};
}

void from_json(const nlohmann::json& j, RunManifest& m) {
  try {
    m.command = j.at("command").get<std::string>();
    m.args = j.at("args").get<std::vector<std::string>>();
    m.methods = j.value("methods", std::vector<std::string>{});
    m.problem = j.value("problem", std::string{});
    m.parameters = j.value("parameters", nlohmann::json::object());
    m.h_list = j.value("h_list", std::vector<double>{});
    m.outputs = j.value("outputs", std::vector<std::string>{});
    m.nondeterministic_outputs = j.value("nondeterministic_outputs", std::vector<std::string>{});
    m.seed = j.value("seed", std::uint64_t{0});
    m.tool_version = j.value("tool_version", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed run manifest: ") + e.what());
  }
}

const char* tool_version() { return DIMSIM_VERSION; }

}  // namespace dimsim
