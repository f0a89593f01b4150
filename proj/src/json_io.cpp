// SPDX-License-Identifier: Apache-2.0

#include "teamlogic/json_io.hpp"

#include <fstream>
#include <sstream>

#include "teamlogic/error.hpp"

namespace teamlogic {

Json structure_to_json(const Structure& s) {
  Json j;
  j["domain"] = s.element_names();
  j["relations"] = Json::object();
  Json arities = Json::object();
  for (const auto& [name, r] : s.relations()) {
    Json tuples = Json::array();
    for (const auto& t : r.tuples()) {
      Json row = Json::array();
      for (Element e : t) row.push_back(s.element_name(e));
      tuples.push_back(std::move(row));
    }
    j["relations"][name] = std::move(tuples);
    if (r.empty()) arities[name] = r.arity();
  }
  if (!arities.empty()) j["arities"] = std::move(arities);
  return j;
}

Structure structure_from_json(const Json& j) {
  try {
    auto names = j.at("domain").get<std::vector<std::string>>();
    if (names.empty()) throw InvalidArgument("structure domain must be nonempty");
    Structure s(static_cast<int>(names.size()), names);
    if (j.contains("arities")) {
      for (const auto& [name, arity] : j.at("arities").items()) s.add_relation(name, arity.get<int>());
    }
    if (j.contains("relations")) {
      for (const auto& [name, tuples] : j.at("relations").items()) {
        if (!tuples.is_array()) throw InvalidArgument("relation " + name + " must be a list of tuples");
        if (tuples.empty()) {
          if (!s.has_relation(name)) {
            throw InvalidArgument("empty relation " + name + " needs an entry in \"arities\"");
          }
          continue;
        }
        for (const auto& t : tuples) {
          auto elems = t.get<std::vector<std::string>>();
          Relation& r = s.add_relation(name, static_cast<int>(elems.size()));
          Tuple tuple;
          for (const auto& e : elems) tuple.push_back(s.element(e));
          r.insert(tuple);
        }
      }
    }
    return s;
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed structure JSON: ") + e.what());
  }
}

Json team_to_json(const Team& team, const Structure& s) {
  Json rows = Json::array();
  for (const auto& r : team.rows()) {
    Json row = Json::array();
    for (Element e : r) row.push_back(s.element_name(e));
    rows.push_back(std::move(row));
  }
  return Json{{"vars", team.vars()}, {"rows", std::move(rows)}};
}

Team team_from_json(const Json& j, const Structure& s) {
  try {
    auto vars = j.at("vars").get<VarTuple>();
    std::vector<Tuple> rows;
    for (const auto& row : j.at("rows")) {
      auto elems = row.get<std::vector<std::string>>();
      if (elems.size() != vars.size()) throw InvalidArgument("team row length differs from \"vars\"");
      Tuple t;
      for (const auto& e : elems) t.push_back(s.element(e));
      rows.push_back(std::move(t));
    }
    return Team(std::move(vars), std::move(rows));
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed team JSON: ") + e.what());
  }
}

Json assignment_to_json(const Assignment& a, const Structure& s) {
  Json j = Json::object();
  for (const auto& [v, e] : a) j[v] = s.element_name(e);
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw InvalidArgument("invalid JSON in " + path + ": " + e.what());
  }
}

}  // namespace teamlogic
