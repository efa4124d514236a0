#include "jjchain/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "jjchain/errors.hpp"

namespace jjchain {

using nlohmann::json;

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw ValidationError("row width does not match the table header");
  rows.push_back(std::move(row));
}

std::size_t Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ValidationError("table has no column '" + name + "'");
}

std::vector<double> Table::column(const std::string& name) const {
  const std::size_t c = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string table_to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += t.columns[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

Table table_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Table t;
  if (!std::getline(in, line)) throw ValidationError("CSV input is empty");
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      errno = 0;
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      // Underflow to a subnormal is fine; overflow is not.
      if (end == cell.c_str() || (errno == ERANGE && std::abs(v) > 1.0))
        throw ValidationError("CSV line " + std::to_string(lineno) + ": cannot parse '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.columns.size())
      throw ValidationError("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) +
                            " values");
    t.rows.push_back(std::move(row));
  }
  return t;
}

json table_to_json(const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows) rows.push_back(r);
  return {{"columns", t.columns}, {"rows", rows}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_table(const std::filesystem::path& path, const Table& t, TableFormat format) {
  write_text(path, format == TableFormat::csv ? table_to_csv(t) : table_to_json(t).dump(2) + "\n");
}

Table read_csv(const std::filesystem::path& path) { return table_from_csv(read_text(path)); }

json state_to_json(const KineticState& s) {
  return {{"k_max", s.n.size()},
          {"n", std::vector<double>(s.n.begin(), s.n.end())},
          {"excess_linewidth_rad_per_s", std::vector<double>(s.excess.begin(), s.excess.end())},
          {"steps", s.steps},
          {"residual", s.residual},
          {"dt_s", s.dt}};
}

KineticState state_from_json(const json& j) {
  try {
    KineticState s;
    const auto n = j.at("n").get<std::vector<double>>();
    const auto ex = j.at("excess_linewidth_rad_per_s").get<std::vector<double>>();
    if (n.size() != ex.size() || n.empty()) throw ValidationError("state arrays must be non-empty and equal length");
    s.n = Eigen::Map<const Eigen::ArrayXd>(n.data(), static_cast<Eigen::Index>(n.size()));
    s.excess = Eigen::Map<const Eigen::ArrayXd>(ex.data(), static_cast<Eigen::Index>(ex.size()));
    s.steps = j.value("steps", 0L);
    s.residual = j.value("residual", 0.0);
    s.dt = j.value("dt_s", 0.0);
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed state file: ") + e.what());
  }
}

json RunManifest::to_json() const {
  return {{"command", command},
          {"config_digest", config_digest},
          {"versions", versions},
          {"outputs", outputs},
          {"wall_time_s", wall_time_s}};
}

}  // namespace jjchain
