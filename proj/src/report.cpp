#include "apdisc/report.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace apdisc {

Json& Report::add(const std::string& op, std::uint64_t seed, Json fields) {
  Json row = Json::object();
  row["op"] = op;
  row["seed"] = seed;
  for (auto it = fields.begin(); it != fields.end(); ++it) row[it.key()] = it.value();
  records.push_back(std::move(row));
  return records.back();
}

Json provenance_json(const Provenance& node, int max_depth) {
  Json j = {{"kind", node.kind}, {"value", node.value}, {"rows", node.rows}, {"inner", node.inner}, {"cols", node.cols}};
  if (!node.note.empty()) j["note"] = node.note;
  if (!node.children.empty()) {
    if (max_depth <= 0) {
      j["children_omitted"] = node.children.size();
    } else {
      Json kids = Json::array();
      for (const auto& c : node.children) kids.push_back(provenance_json(*c, max_depth - 1));
      j["children"] = std::move(kids);
    }
  }
  return j;
}

Json certificate_json(const FactorizationCertificate& cert, const SetSystem* target) {
  Json j = {{"rows", cert.rows()},          {"inner", cert.inner()},           {"cols", cert.cols()},
            {"value", cert.value},          {"left_norm", cert.left_norm()},   {"right_norm", cert.right_norm()},
            {"nnz_right", cert.R.nonZeros()}, {"has_left", cert.has_left()}};
  if (target && cert.has_left()) j["max_residual"] = max_residual(cert, *target);
  if (cert.provenance) j["provenance"] = provenance_json(*cert.provenance);
  return j;
}

std::string to_json_text(const Report& report) {
  Json j = Json::object();
  j["command"] = report.command;
  j["config"] = report.config;
  j["violation"] = report.violation;
  j["records"] = report.records;
  j["run"] = report.run;
  return j.dump(2) + "\n";
}

namespace {

std::string csv_cell(const Json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return s;
}

}  // namespace

std::string to_csv(const Report& report) {
  std::vector<std::string> cols;
  for (const auto& row : report.records) {
    for (auto it = row.begin(); it != row.end(); ++it) {
      if (it.value().is_structured()) continue;
      if (std::find(cols.begin(), cols.end(), it.key()) == cols.end()) cols.push_back(it.key());
    }
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& row : report.records) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out << ",";
      if (row.contains(cols[i])) out << csv_cell(row[cols[i]]);
    }
    out << "\n";
  }
  return out.str();
}

void write_report(const Report& report, const std::string& format, std::ostream& out) {
  if (format == "csv") {
    out << to_csv(report);
  } else {
    out << to_json_text(report);
  }
}

}  // namespace apdisc
