#include "adi/run_record.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace adi {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    if constexpr (std::is_same_v<T, double>) {
      out += format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

std::vector<double> split_doubles(const std::string& cell) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < cell.size()) {
    std::size_t next = cell.find(';', pos);
    if (next == std::string::npos) next = cell.size();
    out.push_back(std::strtod(cell.substr(pos, next - pos).c_str(), nullptr));
    pos = next + 1;
  }
  return out;
}

std::vector<Index> split_indices(const std::string& cell) {
  std::vector<Index> out;
  std::size_t pos = 0;
  while (pos < cell.size()) {
    std::size_t next = cell.find(';', pos);
    if (next == std::string::npos) next = cell.size();
    out.push_back(Index(std::strtoll(cell.substr(pos, next - pos).c_str(), nullptr, 10)));
    pos = next + 1;
  }
  return out;
}

json record_to_json(const RunRecord& r) {
  json j;
  j["family"] = r.family;
  j["n"] = r.n;
  j["p"] = r.p;
  j["m"] = r.m;
  j["solver"] = r.solver;
  j["alpha"] = r.alpha;
  j["omega"] = r.omega;
  if (r.beta) j["beta"] = *r.beta;
  j["criterion"] = r.criterion;
  j["tol"] = r.tol;
  j["iterations"] = r.iterations;
  j["inner_iterations"] = r.inner_iterations;
  j["residual_history"] = r.residual_history;
  j["width_history"] = r.width_history;
  j["converged"] = r.converged;
  j["wall_milliseconds"] = r.wall_milliseconds;
  if (r.compress_tol) j["compress_tol"] = *r.compress_tol;
  return j;
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  r.family = j.at("family").get<std::string>();
  r.n = j.at("n").get<Index>();
  r.p = j.at("p").get<Index>();
  r.m = j.at("m").get<Index>();
  r.solver = j.at("solver").get<std::string>();
  r.alpha = j.at("alpha").get<double>();
  r.omega = j.at("omega").get<double>();
  if (j.contains("beta")) r.beta = j.at("beta").get<double>();
  r.criterion = j.at("criterion").get<std::string>();
  r.tol = j.at("tol").get<double>();
  r.iterations = j.at("iterations").get<Index>();
  r.inner_iterations = j.at("inner_iterations").get<std::vector<Index>>();
  r.residual_history = j.at("residual_history").get<std::vector<double>>();
  r.width_history = j.at("width_history").get<std::vector<Index>>();
  r.converged = j.at("converged").get<bool>();
  r.wall_milliseconds = j.at("wall_milliseconds").get<double>();
  if (j.contains("compress_tol")) r.compress_tol = j.at("compress_tol").get<double>();
  return r;
}

constexpr const char* kCsvHeader =
    "schema,family,n,p,m,solver,alpha,omega,beta,criterion,tol,iterations,"
    "inner_iterations,converged,wall_milliseconds,compress_tol,residual_history,width_history";

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = line.find(',', pos);
    if (next == std::string::npos) {
      cells.push_back(line.substr(pos));
      break;
    }
    cells.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return cells;
}

}  // namespace

void RunRecord::validate() const {
  if (Index(residual_history.size()) != iterations) {
    throw DimensionMismatch("RunRecord: residual history length " +
                            std::to_string(residual_history.size()) + " != iterations " +
                            std::to_string(iterations));
  }
  if (Index(width_history.size()) != iterations) {
    throw DimensionMismatch("RunRecord: width history length " +
                            std::to_string(width_history.size()) + " != iterations " +
                            std::to_string(iterations));
  }
  if (!inner_iterations.empty() && Index(inner_iterations.size()) != iterations) {
    throw DimensionMismatch("RunRecord: inner iteration list length " +
                            std::to_string(inner_iterations.size()) + " != iterations " +
                            std::to_string(iterations));
  }
}

std::string to_json(const std::vector<RunRecord>& records) {
  json j;
  j["schema"] = kRunRecordSchemaVersion;
  j["records"] = json::array();
  for (const RunRecord& r : records) {
    r.validate();
    j["records"].push_back(record_to_json(r));
  }
  return j.dump(2) + "\n";
}

std::vector<RunRecord> records_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.at("schema").get<int>() != kRunRecordSchemaVersion) {
    throw std::runtime_error("records_from_json: unsupported schema version");
  }
  std::vector<RunRecord> out;
  for (const json& rec : j.at("records")) out.push_back(record_from_json(rec));
  return out;
}

std::string to_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const RunRecord& r : records) {
    r.validate();
    out << kRunRecordSchemaVersion << ',' << r.family << ',' << r.n << ',' << r.p << ',' << r.m
        << ',' << r.solver << ',' << format_double(r.alpha) << ',' << format_double(r.omega)
        << ',' << (r.beta ? format_double(*r.beta) : "") << ',' << r.criterion << ','
        << format_double(r.tol) << ',' << r.iterations << ',' << join(r.inner_iterations) << ','
        << (r.converged ? "true" : "false") << ',' << format_double(r.wall_milliseconds) << ','
        << (r.compress_tol ? format_double(*r.compress_tol) : "") << ','
        << join(r.residual_history) << ',' << join(r.width_history) << "\n";
  }
  return out.str();
}

std::vector<RunRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("records_from_csv: unrecognized header");
  }
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_row(line);
    if (cells.size() != 18) {
      throw std::runtime_error("records_from_csv: expected 18 cells, got " +
                               std::to_string(cells.size()));
    }
    if (std::atoi(cells[0].c_str()) != kRunRecordSchemaVersion) {
      throw std::runtime_error("records_from_csv: unsupported schema version");
    }
    RunRecord r;
    r.family = cells[1];
    r.n = Index(std::strtoll(cells[2].c_str(), nullptr, 10));
    r.p = Index(std::strtoll(cells[3].c_str(), nullptr, 10));
    r.m = Index(std::strtoll(cells[4].c_str(), nullptr, 10));
    r.solver = cells[5];
    r.alpha = std::strtod(cells[6].c_str(), nullptr);
    r.omega = std::strtod(cells[7].c_str(), nullptr);
    if (!cells[8].empty()) r.beta = std::strtod(cells[8].c_str(), nullptr);
    r.criterion = cells[9];
    r.tol = std::strtod(cells[10].c_str(), nullptr);
    r.iterations = Index(std::strtoll(cells[11].c_str(), nullptr, 10));
    r.inner_iterations = split_indices(cells[12]);
    r.converged = cells[13] == "true";
    r.wall_milliseconds = std::strtod(cells[14].c_str(), nullptr);
    if (!cells[15].empty()) r.compress_tol = std::strtod(cells[15].c_str(), nullptr);
    r.residual_history = split_doubles(cells[16]);
    r.width_history = split_indices(cells[17]);
    out.push_back(std::move(r));
  }
  return out;
}

std::string residual_history_csv(const RunRecord& record) {
  std::ostringstream out;
  out << "iteration,residual\n";
  for (std::size_t k = 0; k < record.residual_history.size(); ++k) {
    out << (k + 1) << ',' << format_double(record.residual_history[k]) << "\n";
  }
  return out.str();
}

}  // namespace adi
