#pragma once

// JSON reports with a flat CSV projection. Everything replayable lives in
// "config" and "records"; wall-clock data is confined to "run".

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

#include "apdisc/gamma2.hpp"

namespace apdisc {

using Json = nlohmann::ordered_json;

struct Report {
  std::string command;
  Json config = Json::object();
  Json records = Json::array();
  Json run = Json::object();
  bool violation = false;

  /// Appends a record tagged with the operation that produced it.
  Json& add(const std::string& op, std::uint64_t seed, Json fields = Json::object());
};

Json provenance_json(const Provenance& node, int max_depth = 6);

/// Shape, norms, value and, when L is kept and a target is given, the residual.
Json certificate_json(const FactorizationCertificate& cert, const SetSystem* target = nullptr);

std::string to_json_text(const Report& report);
/// One row per record; columns are the union of scalar fields in first-seen order.
std::string to_csv(const Report& report);

void write_report(const Report& report, const std::string& format, std::ostream& out);

}  // namespace apdisc
