// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "speceval/molgraph.hpp"

namespace speceval {

namespace smiles_detail {

// Normalized bond annotation characters: 0 = unspecified, '-' single,
// '=' double, '#' triple, ':' aromatic. Stereo slashes collapse to '-'.
inline char normalize_bond_char(char c) {
  return (c == '/' || c == '\\') ? '-' : c;
}

inline BondOrder resolve_bond(char c, bool arom_a, bool arom_b) {
  switch (c) {
    case 0: return (arom_a && arom_b) ? BondOrder::Aromatic : BondOrder::Single;
    case '-': return BondOrder::Single;
    case '=': return BondOrder::Double;
    case '#': return BondOrder::Triple;
    case ':': return BondOrder::Aromatic;
  }
  return BondOrder::Single;
}

struct Parser {
  std::string_view text;
  std::size_t pos = 0;
  MoleculeGraph mol;
  std::vector<int> hfill;  // -1: organic fill later; >=0: explicit bracket count

  struct RingOpen {
    std::size_t atom;
    char bond;
    std::size_t at;  // character position, for diagnostics
  };
  std::map<int, RingOpen> rings;

  [[noreturn]] void fail(errc code, const std::string& msg) {
    throw Error(code, msg, static_cast<long>(pos + 1));
  }

  bool eof() const { return pos >= text.size(); }
  char peek() const { return eof() ? '\0' : text[pos]; }

  std::size_t add_atom(std::string element, int charge, bool aromatic, int hcount) {
    if (!known_element(element))
      fail(errc::unknown_atom_symbol, "unknown element '" + element + "'");
    mol.atoms.push_back(Atom{std::move(element), charge, aromatic, std::nullopt});
    hfill.push_back(hcount);
    return mol.atoms.size() - 1;
  }

  void add_bond(std::size_t a, std::size_t b, char bond_char) {
    BondOrder order = resolve_bond(bond_char, mol.atoms[a].aromatic, mol.atoms[b].aromatic);
    std::size_t lo = std::min(a, b), hi = std::max(a, b);
    for (const Bond& existing : mol.bonds)
      if (existing.a == lo && existing.b == hi)
        fail(errc::duplicate_bond, "bond specified twice");
    mol.bonds.push_back(Bond{lo, hi, order});
  }

  // [isotope? symbol chiral? hcount? charge? class?] — isotope, chirality and
  // atom class are accepted and discarded.
  std::size_t parse_bracket_atom() {
    ++pos;  // consume '['
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos;  // isotope
    if (eof()) fail(errc::unterminated_bracket, "unterminated bracket atom");

    std::string symbol;
    bool aromatic = false;
    char c = peek();
    if (std::isupper(static_cast<unsigned char>(c))) {
      symbol += c;
      ++pos;
      if (!eof() && std::islower(static_cast<unsigned char>(peek())) &&
          known_element(symbol + peek())) {
        symbol += peek();
        ++pos;
      }
    } else if (std::islower(static_cast<unsigned char>(c))) {
      symbol += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      const ElementInfo* info = find_element(symbol);
      if (info == nullptr || !info->aromatic_ok)
        fail(errc::unknown_atom_symbol, std::string("bad aromatic symbol '") + c + "'");
      aromatic = true;
      ++pos;
    } else {
      fail(errc::unknown_atom_symbol, "expected element symbol in bracket");
    }

    while (!eof() && peek() == '@') ++pos;  // chirality, discarded

    int hcount = 0;
    if (!eof() && peek() == 'H' && symbol != "H") {
      ++pos;
      hcount = 1;
      if (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
        hcount = peek() - '0';
        ++pos;
      }
    } else if (symbol == "H" && !eof() && peek() == 'H') {
      // [HH] style is outside the subset
      fail(errc::smiles_syntax, "hydrogen count on H atom");
    }

    int charge = 0;
    if (!eof() && (peek() == '+' || peek() == '-')) {
      char sign = peek();
      ++pos;
      int magnitude = 1;
      if (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
        magnitude = peek() - '0';
        ++pos;
      } else {
        while (!eof() && peek() == sign) {
          ++magnitude;
          ++pos;
        }
      }
      charge = (sign == '+') ? magnitude : -magnitude;
    }

    if (!eof() && peek() == ':') {  // atom class, discarded
      ++pos;
      if (eof() || !std::isdigit(static_cast<unsigned char>(peek())))
        fail(errc::smiles_syntax, "atom class expects digits");
      while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos;
    }

    if (eof() || peek() != ']')
      fail(errc::unterminated_bracket, "unterminated bracket atom");
    ++pos;  // consume ']'

    std::size_t idx = add_atom(std::move(symbol), charge, aromatic, hcount);
    return idx;
  }

  // Organic-subset atom outside brackets; returns npos when the cursor is not
  // at an atom.
  std::size_t try_parse_organic() {
    char c = peek();
    if (c == 'C' && pos + 1 < text.size() && text[pos + 1] == 'l') {
      pos += 2;
      return add_atom("Cl", 0, false, -1);
    }
    if (c == 'B' && pos + 1 < text.size() && text[pos + 1] == 'r') {
      pos += 2;
      return add_atom("Br", 0, false, -1);
    }
    static constexpr std::string_view aliphatic = "BCNOPSFI";
    if (aliphatic.find(c) != std::string_view::npos) {
      ++pos;
      return add_atom(std::string(1, c), 0, false, -1);
    }
    static constexpr std::string_view aromatic = "bcnops";
    if (aromatic.find(c) != std::string_view::npos) {
      ++pos;
      return add_atom(std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c)))),
                      0, true, -1);
    }
    return static_cast<std::size_t>(-1);
  }

  void handle_ring(std::size_t atom, int digit, char pending) {
    auto it = rings.find(digit);
    if (it == rings.end()) {
      rings.emplace(digit, RingOpen{atom, pending, pos});
      return;
    }
    if (it->second.atom == atom)
      fail(errc::smiles_syntax, "ring bond closes on its own atom");
    char open_c = it->second.bond, close_c = pending;
    if (open_c != 0 && close_c != 0 && open_c != close_c)
      fail(errc::smiles_syntax, "conflicting ring bond symbols");
    add_bond(it->second.atom, atom, open_c != 0 ? open_c : close_c);
    rings.erase(it);
  }

  MoleculeGraph run() {
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t prev = npos;
    char pending = 0;
    std::vector<std::size_t> stack;

    while (!eof()) {
      char c = peek();
      if (c == '(') {
        if (prev == npos) fail(errc::unbalanced_parenthesis, "branch with no preceding atom");
        if (pending != 0) fail(errc::smiles_syntax, "bond symbol before '('");
        stack.push_back(prev);
        ++pos;
      } else if (c == ')') {
        if (stack.empty()) fail(errc::unbalanced_parenthesis, "unmatched ')'");
        if (pending != 0) fail(errc::smiles_syntax, "dangling bond symbol before ')'");
        prev = stack.back();
        stack.pop_back();
        ++pos;
      } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\') {
        if (pending != 0) fail(errc::smiles_syntax, "two bond symbols in a row");
        if (prev == npos) fail(errc::smiles_syntax, "bond symbol with no preceding atom");
        pending = normalize_bond_char(c);
        ++pos;
      } else if (c == '.') {
        if (pending != 0) fail(errc::smiles_syntax, "bond symbol before '.'");
        prev = npos;
        ++pos;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev == npos) fail(errc::smiles_syntax, "ring closure with no preceding atom");
        int digit;
        if (c == '%') {
          if (pos + 2 >= text.size() ||
              !std::isdigit(static_cast<unsigned char>(text[pos + 1])) ||
              !std::isdigit(static_cast<unsigned char>(text[pos + 2])))
            fail(errc::smiles_syntax, "'%' expects two digits");
          digit = (text[pos + 1] - '0') * 10 + (text[pos + 2] - '0');
          pos += 3;
        } else {
          digit = c - '0';
          ++pos;
        }
        handle_ring(prev, digit, pending);
        pending = 0;
      } else if (c == '[') {
        std::size_t atom = parse_bracket_atom();
        if (prev != npos) add_bond(prev, atom, pending);
        else if (pending != 0) fail(errc::smiles_syntax, "leading bond symbol");
        pending = 0;
        prev = atom;
      } else {
        std::size_t atom = try_parse_organic();
        if (atom == npos)
          fail(errc::unknown_atom_symbol, std::string("unexpected character '") + c + "'");
        if (prev != npos) add_bond(prev, atom, pending);
        else if (pending != 0) fail(errc::smiles_syntax, "leading bond symbol");
        pending = 0;
        prev = atom;
      }
    }

    if (!stack.empty()) fail(errc::unbalanced_parenthesis, "unclosed '('");
    if (!rings.empty())
      throw Error(errc::unclosed_ring_bond,
                  "ring bond " + std::to_string(rings.begin()->first) + " never closed",
                  static_cast<long>(rings.begin()->second.at));
    if (pending != 0) fail(errc::smiles_syntax, "trailing bond symbol");

    materialize_hydrogens();
    normalize_bonds(mol);
    validate(mol);
    return std::move(mol);
  }

  void materialize_hydrogens() {
    const std::size_t parsed = mol.atoms.size();
    std::vector<double> sums(parsed, 0.0);
    for (const Bond& b : mol.bonds) {
      sums[b.a] += bond_order_value(b.order);
      sums[b.b] += bond_order_value(b.order);
    }
    for (std::size_t i = 0; i < parsed; ++i) {
      int h = hfill[i];
      if (h < 0) {
        const ElementInfo* info = find_element(mol.atoms[i].element);
        int bonded = static_cast<int>(std::floor(sums[i] + 1e-9));
        auto v = fill_valence(*info, bonded);
        h = v ? *v - bonded : 0;
      }
      for (int k = 0; k < h; ++k) {
        mol.atoms.push_back(Atom{"H", 0, false, std::nullopt});
        mol.bonds.push_back(Bond{i, mol.atoms.size() - 1, BondOrder::Single});
      }
    }
  }
};

}  // namespace smiles_detail

// Parses the supported SMILES subset: organic-subset atoms, aromatic
// lowercase, bracket atoms with charge and explicit H count, branches, ring
// closures (digit and %nn), bond symbols - = # :, dot-disconnection. Stereo
// markers (/ \ @ @@), isotopes and atom classes are accepted and discarded.
// Implicit hydrogens are materialized as explicit atoms.
inline MoleculeGraph parse_smiles(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  if (text.empty()) throw Error(errc::empty_input, "empty SMILES");
  smiles_detail::Parser p;
  p.text = text;
  return p.run();
}

namespace smiles_detail {

// Writer-side view of the molecule with suppressible hydrogens folded into
// per-atom counts.
struct WriteGraph {
  struct Node {
    std::string element;
    int charge = 0;
    bool aromatic = false;
    int hcount = 0;
  };
  std::vector<Node> nodes;
  std::vector<std::vector<std::pair<std::size_t, BondOrder>>> adj;

  int bonded_sum(std::size_t i) const {
    double s = 0.0;
    for (auto [j, o] : adj[i]) s += bond_order_value(o);
    return static_cast<int>(std::floor(s + 1e-9));
  }
};

inline bool suppressible_h(const MoleculeGraph& mol,
                           const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& adj,
                           std::size_t i) {
  const Atom& a = mol.atoms[i];
  if (a.element != "H" || a.formal_charge != 0 || a.aromatic) return false;
  if (adj[i].size() != 1) return false;
  auto [nbr, bond_idx] = adj[i][0];
  return mol.atoms[nbr].element != "H" && mol.bonds[bond_idx].order == BondOrder::Single;
}

inline WriteGraph build_write_graph(const MoleculeGraph& mol) {
  auto adj = adjacency(mol);
  std::vector<std::size_t> remap(mol.atoms.size(), static_cast<std::size_t>(-1));
  WriteGraph g;
  for (std::size_t i = 0; i < mol.atoms.size(); ++i) {
    if (suppressible_h(mol, adj, i)) continue;
    remap[i] = g.nodes.size();
    const Atom& a = mol.atoms[i];
    const ElementInfo* info = find_element(a.element);
    if (info == nullptr)
      throw Error(errc::unsupported_feature, "element '" + a.element + "' not in writer table");
    if (a.aromatic && !info->aromatic_ok)
      throw Error(errc::unsupported_feature, "aromatic " + a.element + " has no SMILES form");
    g.nodes.push_back({a.element, a.formal_charge, a.aromatic, 0});
  }
  g.adj.resize(g.nodes.size());
  for (const Bond& b : mol.bonds) {
    std::size_t wa = remap[b.a], wb = remap[b.b];
    if (wa == static_cast<std::size_t>(-1) || wb == static_cast<std::size_t>(-1)) {
      std::size_t heavy = (wa == static_cast<std::size_t>(-1)) ? wb : wa;
      g.nodes[heavy].hcount++;  // bond to a suppressed hydrogen
      continue;
    }
    g.adj[wa].push_back({wb, b.order});
    g.adj[wb].push_back({wa, b.order});
  }
  return g;
}

inline std::string charge_suffix(int charge) {
  if (charge == 0) return "";
  if (charge == 1) return "+";
  if (charge == -1) return "-";
  return (charge > 0 ? "+" : "-") + std::to_string(std::abs(charge));
}

inline std::string atom_token(const WriteGraph& g, std::size_t i) {
  const WriteGraph::Node& n = g.nodes[i];
  const ElementInfo& info = *find_element(n.element);
  std::string sym = n.element;
  if (n.aromatic)
    for (char& c : sym) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  if (info.organic_subset && n.charge == 0) {
    int bonded = g.bonded_sum(i);
    auto v = fill_valence(info, bonded);
    int expected = v ? *v - bonded : 0;
    if (expected == n.hcount) return sym;
  }
  std::string tok = "[" + sym;
  if (n.hcount == 1) tok += "H";
  else if (n.hcount > 1) tok += "H" + std::to_string(n.hcount);
  tok += charge_suffix(n.charge);
  tok += "]";
  return tok;
}

inline const char* bond_token(BondOrder order, bool arom_a, bool arom_b) {
  switch (order) {
    case BondOrder::Single: return (arom_a && arom_b) ? "-" : "";
    case BondOrder::Double: return "=";
    case BondOrder::Triple: return "#";
    case BondOrder::Aromatic: return (arom_a && arom_b) ? "" : ":";
  }
  return "";
}

// One Morgan-style refinement sweep: the new key is the old rank plus the
// sorted multiset of (bond class, neighbor rank). Classes only ever split.
inline void refine_ranks(const WriteGraph& g, std::vector<int>& ranks) {
  const std::size_t n = g.nodes.size();
  for (;;) {
    std::vector<std::vector<int>> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::pair<int, int>> nb;
      for (auto [j, o] : g.adj[i]) nb.push_back({static_cast<int>(o), ranks[j]});
      std::sort(nb.begin(), nb.end());
      keys[i].push_back(ranks[i]);
      for (auto [o, r] : nb) {
        keys[i].push_back(o);
        keys[i].push_back(r);
      }
    }
    std::vector<std::vector<int>> sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    int old_classes = *std::max_element(ranks.begin(), ranks.end()) + 1;
    for (std::size_t i = 0; i < n; ++i)
      ranks[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), keys[i]) -
                                  sorted.begin());
    if (static_cast<int>(sorted.size()) == old_classes) return;
  }
}

inline std::vector<int> initial_ranks(const WriteGraph& g) {
  struct Key {
    std::string element;
    bool aromatic;
    int charge;
    std::size_t degree;
    int hcount;
    auto operator<=>(const Key&) const = default;
  };
  std::vector<Key> keys;
  keys.reserve(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    keys.push_back({g.nodes[i].element, g.nodes[i].aromatic, g.nodes[i].charge,
                    g.adj[i].size(), g.nodes[i].hcount});
  std::vector<Key> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> ranks(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    ranks[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), keys[i]) -
                                sorted.begin());
  return ranks;
}

// Emits the SMILES string for one connected write-graph under a discrete
// ranking. DFS from the lowest-ranked atom, neighbors in rank order; ring
// closure digits are allocated in emission order and reused after closing.
struct Emitter {
  const WriteGraph& g;
  const std::vector<int>& ranks;

  std::vector<int> visit_order;          // discovery index per atom, -1 unseen
  std::vector<std::vector<std::size_t>> tree_children;
  struct RingEdge {
    std::size_t opener, closer;
    BondOrder order;
    int digit = -1;
  };
  std::vector<RingEdge> ring_edges;
  std::vector<std::vector<std::size_t>> opens_at, closes_at;  // ring edge ids per atom

  explicit Emitter(const WriteGraph& graph, const std::vector<int>& r)
      : g(graph), ranks(r) {}

  std::vector<std::size_t> ordered_neighbors(std::size_t u) const {
    std::vector<std::size_t> nb;
    for (auto [v, o] : g.adj[u]) nb.push_back(v);
    std::sort(nb.begin(), nb.end(), [&](std::size_t a, std::size_t b) {
      return ranks[a] < ranks[b];
    });
    return nb;
  }

  BondOrder order_of(std::size_t u, std::size_t v) const {
    for (auto [w, o] : g.adj[u])
      if (w == v) return o;
    return BondOrder::Single;
  }

  std::string run(std::size_t root) {
    const std::size_t n = g.nodes.size();
    visit_order.assign(n, -1);
    tree_children.assign(n, {});
    opens_at.assign(n, {});
    closes_at.assign(n, {});
    ring_edges.clear();

    // Pass 1: classify tree vs ring edges with the same DFS order the
    // emission pass uses. Non-tree edges in an undirected DFS are back
    // edges, so they are always first seen from the later-visited endpoint.
    std::set<std::pair<std::size_t, std::size_t>> consumed;
    int counter = 0;
    classify(root, counter, consumed);
    assign_digits();
    return emit(root);
  }

  void classify(std::size_t u, int& counter,
                std::set<std::pair<std::size_t, std::size_t>>& consumed) {
    visit_order[u] = counter++;
    for (std::size_t v : ordered_neighbors(u)) {
      auto key = std::minmax(u, v);
      if (consumed.count({key.first, key.second})) continue;
      consumed.insert({key.first, key.second});
      if (visit_order[v] == -1) {
        tree_children[u].push_back(v);
        classify(v, counter, consumed);
      } else {
        // v was emitted earlier, so v opens and u closes.
        ring_edges.push_back({v, u, order_of(u, v)});
        std::size_t id = ring_edges.size() - 1;
        opens_at[v].push_back(id);
        closes_at[u].push_back(id);
      }
    }
  }

  void assign_digits() {
    std::vector<bool> used(100, false);
    // Walk atoms in discovery order; open digits when the opener is reached,
    // free them at the closer.
    std::vector<std::size_t> by_order(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      if (visit_order[i] >= 0) by_order[static_cast<std::size_t>(visit_order[i])] = i;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      std::size_t u = by_order[k];
      // Closing digits free first so they can be reused at the same atom.
      for (std::size_t id : closes_at[u]) used[static_cast<std::size_t>(ring_edges[id].digit)] = false;
      auto& opens = opens_at[u];
      std::sort(opens.begin(), opens.end(), [&](std::size_t x, std::size_t y) {
        return ranks[ring_edges[x].closer] < ranks[ring_edges[y].closer];
      });
      for (std::size_t id : opens) {
        int d = 1;
        while (d < 100 && used[static_cast<std::size_t>(d)]) ++d;
        if (d >= 100) throw Error(errc::unsupported_feature, "more than 99 open ring bonds");
        ring_edges[id].digit = d;
        used[static_cast<std::size_t>(d)] = true;
      }
    }
  }

  std::string digit_str(int d) const {
    return d < 10 ? std::to_string(d) : "%" + std::to_string(d);
  }

  std::string emit(std::size_t u) {
    std::string s = atom_token(g, u);
    // Closures sorted by digit, then openings (already in assignment order).
    std::vector<int> close_digits;
    for (std::size_t id : closes_at[u]) close_digits.push_back(ring_edges[id].digit);
    std::sort(close_digits.begin(), close_digits.end());
    for (int d : close_digits) s += digit_str(d);
    for (std::size_t id : opens_at[u]) {
      const RingEdge& e = ring_edges[id];
      s += bond_token(e.order, g.nodes[e.opener].aromatic, g.nodes[e.closer].aromatic);
      s += digit_str(e.digit);
    }
    const auto& children = tree_children[u];
    for (std::size_t k = 0; k < children.size(); ++k) {
      std::size_t v = children[k];
      std::string part = bond_token(order_of(u, v), g.nodes[u].aromatic, g.nodes[v].aromatic);
      part += emit(v);
      if (k + 1 < children.size()) s += "(" + part + ")";
      else s += part;
    }
    return s;
  }
};

inline std::string canonical_component(const WriteGraph& g, std::vector<int> ranks) {
  refine_ranks(g, ranks);
  int classes = *std::max_element(ranks.begin(), ranks.end()) + 1;
  if (classes == static_cast<int>(g.nodes.size())) {
    std::size_t root = static_cast<std::size_t>(
        std::min_element(ranks.begin(), ranks.end()) - ranks.begin());
    Emitter em(g, ranks);
    return em.run(root);
  }
  // Tie break: split the lowest tied class one atom at a time and keep the
  // lexicographically smallest completion.
  int tied = -1;
  for (int r = 0; r < classes && tied < 0; ++r) {
    int count = 0;
    for (int x : ranks)
      if (x == r) ++count;
    if (count > 1) tied = r;
  }
  std::string best;
  for (std::size_t a = 0; a < g.nodes.size(); ++a) {
    if (ranks[a] != tied) continue;
    std::vector<int> trial = ranks;
    for (std::size_t i = 0; i < trial.size(); ++i)
      if (trial[i] > tied || (trial[i] == tied && i != a)) trial[i]++;
    std::string candidate = canonical_component(g, std::move(trial));
    if (best.empty() || candidate < best) best = std::move(candidate);
  }
  return best;
}

}  // namespace smiles_detail

// Canonical SMILES: invariant under any permutation of the input atom order.
// Iterative invariant refinement over (element, charge, degree, aromatic,
// H count), remaining ties broken by trial assignment taking the smallest
// output string. Reparsing yields an isomorphic graph (element, charge and
// bond orders preserved; positions and stereo are not represented).
inline std::string canonical_smiles(const MoleculeGraph& mol) {
  if (mol.atoms.empty()) throw Error(errc::empty_input, "empty graph");
  using namespace smiles_detail;
  WriteGraph g = build_write_graph(mol);

  // Split into connected components, canonicalize each, join sorted.
  std::vector<int> comp(g.nodes.size(), -1);
  int ncomp = 0;
  for (std::size_t s = 0; s < g.nodes.size(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<std::size_t> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (auto [v, o] : g.adj[u])
        if (comp[v] < 0) {
          comp[v] = ncomp;
          stack.push_back(v);
        }
    }
    ++ncomp;
  }

  std::vector<std::string> fragments;
  for (int c = 0; c < ncomp; ++c) {
    WriteGraph sub;
    std::vector<std::size_t> remap(g.nodes.size(), static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if (comp[i] != c) continue;
      remap[i] = sub.nodes.size();
      sub.nodes.push_back(g.nodes[i]);
    }
    sub.adj.resize(sub.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if (comp[i] != c) continue;
      for (auto [j, o] : g.adj[i]) sub.adj[remap[i]].push_back({remap[j], o});
    }
    fragments.push_back(canonical_component(sub, initial_ranks(sub)));
  }
  std::sort(fragments.begin(), fragments.end());
  std::string out;
  for (std::size_t i = 0; i < fragments.size(); ++i) {
    if (i) out += '.';
    out += fragments[i];
  }
  return out;
}

}  // namespace speceval
