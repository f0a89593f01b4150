// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLOGIC_JSON_IO_HPP
#define TEAMLOGIC_JSON_IO_HPP

#include <string>

#include "json.hpp"
#include "teamlogic/model.hpp"

namespace teamlogic {

using Json = nlohmann::json;

/// {"domain":[...],"relations":{"R":[[...],...]}}. An optional "arities"
/// object declares relations that have no tuples. Output is canonical:
/// domain in id order, tuples sorted, "arities" only for empty relations.
Json structure_to_json(const Structure& s);
Structure structure_from_json(const Json& j);

/// {"vars":[...],"rows":[[...],...]} with element names of `s`.
Json team_to_json(const Team& team, const Structure& s);
Team team_from_json(const Json& j, const Structure& s);

Json assignment_to_json(const Assignment& a, const Structure& s);

/// Reads a whole file; throws InvalidArgument when it cannot be opened.
std::string read_file(const std::string& path);
Json read_json_file(const std::string& path);

}  // namespace teamlogic

#endif  // TEAMLOGIC_JSON_IO_HPP
