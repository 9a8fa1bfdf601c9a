#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dimsim {

/// x with 17 significant digits ("%.17g"); non-finite values print as
/// nan, inf, -inf.
std::string format_number(double x);

/// JSON text with every floating-point number printed via format_number.
/// Non-finite numbers become null; object keys come out sorted.
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// Creates missing parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// RFC 4180 CSV: header row, comma separated, fields quoted when needed,
/// CRLF-free (LF line endings).
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> fields);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Everything needed to rerun a CLI invocation. `args` are the command-line
/// arguments without the program name and without --out; `outputs` are file
/// names relative to the output directory.
struct RunManifest {
  std::string command;
  std::vector<std::string> methods;
  std::string problem;
  nlohmann::json parameters = nlohmann::json::object();
  std::vector<double> h_list;
  std::vector<std::string> outputs;
  std::vector<std::string> nondeterministic_outputs;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::vector<std::string> args;
};

void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

const char* tool_version();

}  // namespace dimsim
