#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "jjchain/kinetics.hpp"

namespace jjchain {

/// Column-major-agnostic numeric table with a fixed column order.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::size_t column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

enum class TableFormat { csv, json };

/// %.17g, so every finite double survives a text round-trip.
std::string format_double(double x);

std::string table_to_csv(const Table& t);
Table table_from_csv(const std::string& text);
nlohmann::json table_to_json(const Table& t);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

void write_table(const std::filesystem::path& path, const Table& t, TableFormat format);
Table read_csv(const std::filesystem::path& path);

nlohmann::json state_to_json(const KineticState& s);
KineticState state_from_json(const nlohmann::json& j);

struct RunManifest {
  std::string command;
  std::string config_digest;
  std::string versions;
  std::vector<std::string> outputs;
  double wall_time_s = 0.0;

  nlohmann::json to_json() const;
};

inline constexpr const char* kToolVersion = "jjchain 0.1.0";

}  // namespace jjchain
