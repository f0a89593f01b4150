// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLOGIC_TILING_HPP
#define TEAMLOGIC_TILING_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "teamlogic/json_io.hpp"
#include "teamlogic/model.hpp"
#include "teamlogic/syntax.hpp"

namespace teamlogic {

struct TileType {
  int top = 0;
  int right = 0;
  int bottom = 0;
  int left = 0;

  bool operator==(const TileType&) const = default;
};

/// Nonempty ordered tile set. Tile i is named by the unary predicate P<i>.
class TileSet {
 public:
  explicit TileSet(std::vector<TileType> tiles);

  std::size_t size() const { return tiles_.size(); }
  const TileType& operator[](std::size_t i) const { return tiles_.at(i); }
  const std::vector<TileType>& tiles() const { return tiles_; }
  static std::string predicate(std::size_t i) { return "P" + std::to_string(i); }

 private:
  std::vector<TileType> tiles_;
};

/// {"tiles":[{"top":0,"right":1,"bottom":0,"left":1}, ...]}
TileSet tile_set_from_json(const Json& j);
Json tile_set_to_json(const TileSet& t);

/// {V:2, H:2}.
Vocabulary grid_vocabulary();
/// {V:2, H:2, C:1, U:1, P:1, Q:1}.
Vocabulary striped_grid_vocabulary();

/// Outcome of a structural check. On failure `condition` names the first
/// violated condition and `witness` lists the elements involved.
struct GridCheck {
  bool holds = true;
  std::string condition;
  std::vector<Element> witness;
};

Json grid_check_to_json(const GridCheck& c, const Structure& s);

/// V and H serial, and V(a,b), H(b,c), H(a,b'), V(b',c') imply c = c'.
/// Failure conditions: "V-serial" [a], "H-serial" [a], "confluence"
/// [a, b, c, b', c']. Missing relations count as empty.
GridCheck is_gridlike(const Structure& s);

/// Gridlike, P and Q distinct singletons, U = P ∪ Q, C constant along H
/// and alternating along V. Additional conditions: "P-singleton",
/// "Q-singleton", "P-Q-distinct", "U-union" [a], "H-stripe" [a, b],
/// "V-stripe" [a, b].
GridCheck is_striped_gridlike(const Structure& s);

/// The two-element striped gridlike structure: V = {(a,b),(b,a)},
/// H = {(a,a),(b,b)}, C = {a}, P = {a}, Q = {b}, U = {a,b}.
Structure striped_witness();

struct TilingResult {
  bool tilable = false;
  /// Tile index per element when tilable.
  std::vector<int> assignment;
  /// Search nodes visited.
  std::uint64_t nodes = 0;
};

/// Backtracking search for a tiling: H(a,b) needs right(a) = left(b) and
/// V(a,b) needs top(a) = bottom(b). Throws ResourceLimit past max_nodes.
TilingResult brute_force_tilable(const Structure& s, const TileSet& tiles,
                                 std::uint64_t max_nodes = std::uint64_t{1} << 26);

/// `s` expanded with P<i> = elements assigned tile i.
Structure expand_with_tiling(const Structure& s, const TileSet& tiles, const std::vector<int>& assignment);

/// First-order sentence over {x,y} true in an expansion iff the P<i>
/// fail to describe a tiling of its {V,H}-reduct.
Formula phi_T(const TileSet& tiles);

/// Named pieces of the non-grid sentence: non-serial, non-singleton(P),
/// non-singleton(Q), non-distinct(P,Q), non-union(U,P,Q), |U|!=2,
/// non-stripes, non-C+-join, non-C--join, non-join.
std::map<std::string, Formula> phi_components();
/// True exactly in the structures that are not striped gridlike.
Formula phi_non_grid();
/// phi_non_grid ∨ phi_T: valid iff the grid has no T-tiling.
Formula phi_non_T_tiling(const TileSet& tiles);

}  // namespace teamlogic

#endif  // TEAMLOGIC_TILING_HPP
