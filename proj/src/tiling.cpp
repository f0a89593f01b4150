// SPDX-License-Identifier: Apache-2.0

#include "teamlogic/tiling.hpp"

#include "teamlogic/error.hpp"

namespace teamlogic {

TileSet::TileSet(std::vector<TileType> tiles) : tiles_(std::move(tiles)) {
  if (tiles_.empty()) throw InvalidArgument("tile set must be nonempty");
  for (const TileType& t : tiles_) {
    if (t.top < 0 || t.right < 0 || t.bottom < 0 || t.left < 0)
      throw InvalidArgument("tile colours must be nonnegative");
  }
}

TileSet tile_set_from_json(const Json& j) {
  try {
    std::vector<TileType> tiles;
    for (const Json& t : j.at("tiles")) {
      tiles.push_back({t.at("top").get<int>(), t.at("right").get<int>(), t.at("bottom").get<int>(),
                       t.at("left").get<int>()});
    }
    return TileSet(std::move(tiles));
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed tile set: ") + e.what());
  }
}

Json tile_set_to_json(const TileSet& t) {
  Json tiles = Json::array();
  for (const TileType& tt : t.tiles())
    tiles.push_back({{"top", tt.top}, {"right", tt.right}, {"bottom", tt.bottom}, {"left", tt.left}});
  return {{"tiles", tiles}};
}

Vocabulary grid_vocabulary() { return {{"V", 2}, {"H", 2}}; }

Vocabulary striped_grid_vocabulary() { return {{"V", 2}, {"H", 2}, {"C", 1}, {"U", 1}, {"P", 1}, {"Q", 1}}; }

namespace {

/// Relation view that treats a missing symbol as empty.
class RelView {
 public:
  RelView(const Structure& s, const std::string& name, int arity) {
    if (s.has_relation(name)) {
      rel_ = &s.relation(name);
      if (rel_->arity() != arity) throw InvalidArgument("relation " + name + " must have arity " + std::to_string(arity));
    }
  }
  bool operator()(Element a) const { return rel_ && rel_->contains({a}); }
  bool operator()(Element a, Element b) const { return rel_ && rel_->contains({a, b}); }

 private:
  const Relation* rel_ = nullptr;
};

GridCheck fail(std::string condition, std::vector<Element> witness) {
  return {false, std::move(condition), std::move(witness)};
}

GridCheck check_singleton(const Structure& s, const RelView& r, const std::string& condition) {
  std::vector<Element> members;
  for (Element a = 0; a < s.size(); ++a)
    if (r(a)) members.push_back(a);
  if (members.size() != 1) return fail(condition, members);
  return {};
}

}  // namespace

Json grid_check_to_json(const GridCheck& c, const Structure& s) {
  Json j{{"holds", c.holds}};
  if (!c.holds) {
    Json w = Json::array();
    for (Element e : c.witness) w.push_back(s.element_name(e));
    j["condition"] = c.condition;
    j["witness"] = w;
  }
  return j;
}

GridCheck is_gridlike(const Structure& s) {
  const RelView V(s, "V", 2), H(s, "H", 2);
  const int n = s.size();
  for (const auto& [rel, name] : {std::pair{&V, "V-serial"}, std::pair{&H, "H-serial"}}) {
    for (Element a = 0; a < n; ++a) {
      bool serial = false;
      for (Element b = 0; b < n && !serial; ++b) serial = (*rel)(a, b);
      if (!serial) return fail(name, {a});
    }
  }
  for (Element a = 0; a < n; ++a)
    for (Element b = 0; b < n; ++b) {
      if (!V(a, b)) continue;
      for (Element c = 0; c < n; ++c) {
        if (!H(b, c)) continue;
        for (Element b2 = 0; b2 < n; ++b2) {
          if (!H(a, b2)) continue;
          for (Element c2 = 0; c2 < n; ++c2)
            if (V(b2, c2) && c != c2) return fail("confluence", {a, b, c, b2, c2});
        }
      }
    }
  return {};
}

GridCheck is_striped_gridlike(const Structure& s) {
  if (GridCheck g = is_gridlike(s); !g.holds) return g;
  const RelView V(s, "V", 2), H(s, "H", 2), C(s, "C", 1), U(s, "U", 1), P(s, "P", 1), Q(s, "Q", 1);
  if (GridCheck g = check_singleton(s, P, "P-singleton"); !g.holds) return g;
  if (GridCheck g = check_singleton(s, Q, "Q-singleton"); !g.holds) return g;
  const int n = s.size();
  for (Element a = 0; a < n; ++a)
    if (P(a) && Q(a)) return fail("P-Q-distinct", {a});
  for (Element a = 0; a < n; ++a)
    if (U(a) != (P(a) || Q(a))) return fail("U-union", {a});
  for (Element a = 0; a < n; ++a)
    for (Element b = 0; b < n; ++b) {
      if (H(a, b) && C(a) != C(b)) return fail("H-stripe", {a, b});
      if (V(a, b) && C(a) == C(b)) return fail("V-stripe", {a, b});
    }
  return {};
}

Structure striped_witness() {
  Structure s(2);
  s.add_relation("V", 2).insert({0, 1});
  s.relation("V").insert({1, 0});
  s.add_relation("H", 2).insert({0, 0});
  s.relation("H").insert({1, 1});
  s.add_relation("C", 1).insert({0});
  s.add_relation("P", 1).insert({0});
  s.add_relation("Q", 1).insert({1});
  s.add_relation("U", 1).insert({0});
  s.relation("U").insert({1});
  return s;
}

namespace {

class TilingSearch {
 public:
  TilingSearch(const Structure& s, const TileSet& tiles, std::uint64_t max_nodes)
      : tiles_(tiles), max_nodes_(max_nodes), n_(s.size()), assignment_(n_, -1) {
    const RelView V(s, "V", 2), H(s, "H", 2);
    for (Element a = 0; a < n_; ++a)
      for (Element b = 0; b < n_; ++b) {
        if (H(a, b)) edges_.push_back({std::max(a, b), a, b, true});
        if (V(a, b)) edges_.push_back({std::max(a, b), a, b, false});
      }
  }

  TilingResult run() {
    TilingResult r;
    r.tilable = place(0);
    r.nodes = nodes_;
    if (r.tilable) r.assignment = assignment_;
    return r;
  }

 private:
  struct Edge {
    Element last;  // the edge is checked once both endpoints are placed
    Element from, to;
    bool horizontal;
  };

  bool consistent(Element e) const {
    for (const Edge& edge : edges_) {
      if (edge.last != e) continue;
      const TileType& a = tiles_[assignment_[edge.from]];
      const TileType& b = tiles_[assignment_[edge.to]];
      if (edge.horizontal ? a.right != b.left : a.top != b.bottom) return false;
    }
    return true;
  }

  bool place(Element e) {
    if (e == n_) return true;
    for (std::size_t t = 0; t < tiles_.size(); ++t) {
      if (++nodes_ > max_nodes_) throw ResourceLimit("tiling search exceeded " + std::to_string(max_nodes_) + " nodes");
      assignment_[e] = static_cast<int>(t);
      if (consistent(e) && place(e + 1)) return true;
    }
    assignment_[e] = -1;
    return false;
  }

  const TileSet& tiles_;
  std::uint64_t max_nodes_;
  Element n_;
  std::vector<int> assignment_;
  std::vector<Edge> edges_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

TilingResult brute_force_tilable(const Structure& s, const TileSet& tiles, std::uint64_t max_nodes) {
  return TilingSearch(s, tiles, max_nodes).run();
}

Structure expand_with_tiling(const Structure& s, const TileSet& tiles, const std::vector<int>& assignment) {
  if (assignment.size() != static_cast<std::size_t>(s.size()))
    throw InvalidArgument("tiling must assign a tile to every element");
  Structure out = s;
  for (std::size_t t = 0; t < tiles.size(); ++t) out.add_relation(TileSet::predicate(t), 1);
  for (Element e = 0; e < s.size(); ++e) {
    const int t = assignment[e];
    if (t < 0 || static_cast<std::size_t>(t) >= tiles.size()) throw InvalidArgument("tile index out of range");
    out.relation(TileSet::predicate(t)).insert({e});
  }
  return out;
}

Formula phi_T(const TileSet& tiles) {
  const std::size_t m = tiles.size();
  auto p = [](std::size_t t, const Variable& v, bool positive = true) { return rel(TileSet::predicate(t), {v}, positive); };

  std::vector<Formula> none;
  for (std::size_t t = 0; t < m; ++t) none.push_back(p(t, "x", false));
  std::vector<Formula> not_one{conj(none)};
  for (std::size_t t = 0; t < m; ++t)
    for (std::size_t s = t + 1; s < m; ++s) not_one.push_back(conj(p(t, "x"), p(s, "x")));

  std::vector<Formula> h_bad, v_bad;
  for (std::size_t t = 0; t < m; ++t)
    for (std::size_t s = 0; s < m; ++s) {
      if (tiles[t].right != tiles[s].left) h_bad.push_back(conj(p(t, "x"), p(s, "y")));
      if (tiles[t].top != tiles[s].bottom) v_bad.push_back(conj(p(t, "x"), p(s, "y")));
    }

  std::vector<Formula> parts{exists("x", disj(not_one))};
  if (!h_bad.empty()) parts.push_back(exists("x", exists("y", conj(rel("H", {"x", "y"}), disj(h_bad)))));
  if (!v_bad.empty()) parts.push_back(exists("x", exists("y", conj(rel("V", {"x", "y"}), disj(v_bad)))));
  return disj(parts);
}

namespace {

Formula flip_relation(const Formula& f, const std::string& symbol) {
  if (!f) return f;
  Node n = *f;
  if (n.kind == NodeKind::kRel && n.symbol == symbol) n.positive = !n.positive;
  n.lhs = flip_relation(f->lhs, symbol);
  n.rhs = flip_relation(f->rhs, symbol);
  return std::make_shared<const Node>(std::move(n));
}

Formula non_singleton(const std::string& X) {
  return parse_formula("A x. ~" + X + "(x) | E x. E y. (" + X + "(x) & " + X + "(y) & x!=y)");
}

Formula non_distinct(const std::string& X, const std::string& Y) {
  return parse_formula("E x. (" + X + "(x) & " + Y + "(x))");
}

Formula non_union(const std::string& X, const std::string& Y, const std::string& Z) {
  return parse_formula("E x. (" + X + "(x) & ~" + Y + "(x) & ~" + Z + "(x)) | E x. (~" + X + "(x) & (" + Y +
                       "(x) | " + Z + "(x)))");
}

}  // namespace

std::map<std::string, Formula> phi_components() {
  std::map<std::string, Formula> c;
  c["non-serial"] = parse_formula("E x. A y. ~V(x,y) | E x. A y. ~H(x,y)");
  c["non-singleton(P)"] = non_singleton("P");
  c["non-singleton(Q)"] = non_singleton("Q");
  c["non-distinct(P,Q)"] = non_distinct("P", "Q");
  c["non-union(U,P,Q)"] = non_union("U", "P", "Q");
  c["|U|!=2"] = disj({c["non-singleton(P)"], c["non-singleton(Q)"], c["non-distinct(P,Q)"], c["non-union(U,P,Q)"]});
  c["non-stripes"] = parse_formula(
      "E x. E y. ((H(x,y) & ((C(x) & ~C(y)) | (~C(x) & C(y)))) | (V(x,y) & ((C(x) & C(y)) | (~C(x) & ~C(y)))))");
  c["non-C+-join"] = parse_formula(
      "A x. (~U(x) | E y. (C(y) & dep(y,x) & E x. (dep(x,y) & ((dep(x) & H(x,y)) | (dep(x) & V(x,y))) & "
      "E y. (dep(y) & (V(y,x) | H(y,x)) & ~C(y)))))");
  c["non-C--join"] = flip_relation(c["non-C+-join"], "C");
  c["non-join"] = disj(c["non-C+-join"], c["non-C--join"]);
  return c;
}

Formula phi_non_grid() {
  auto c = phi_components();
  return disj({c["non-serial"], c["|U|!=2"], c["non-stripes"], c["non-join"]});
}

Formula phi_non_T_tiling(const TileSet& tiles) { return disj(phi_non_grid(), phi_T(tiles)); }

}  // namespace teamlogic
