// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace speceval {

// Per-element data for the supported symbol table. `valences` lists the
// standard valences used for implicit-hydrogen fill (0-terminated);
// `max_valence` is the cap enforced by the molecule-graph validity check
// (0 = unchecked). vdW radii are the Bondi values; 0 = not tabulated.
struct ElementInfo {
  std::string_view symbol;
  std::array<int, 3> valences;  // 0-terminated standard valence list
  int max_valence;              // 0 = no cap enforced
  double vdw_radius;            // Angstrom, 0 = unknown
  bool organic_subset;          // writable bare in SMILES
  bool aromatic_ok;             // lowercase form allowed in SMILES
};

inline constexpr std::array<ElementInfo, 23> element_table = {{
    {"H", {1, 0, 0}, 1, 1.20, false, false},
    {"B", {3, 0, 0}, 0, 1.92, true, true},
    {"C", {4, 0, 0}, 4, 1.70, true, true},
    {"N", {3, 0, 0}, 3, 1.55, true, true},
    {"O", {2, 0, 0}, 2, 1.52, true, true},
    {"F", {1, 0, 0}, 1, 1.47, true, false},
    {"Na", {1, 0, 0}, 0, 2.27, false, false},
    {"Mg", {2, 0, 0}, 0, 1.73, false, false},
    {"Al", {3, 0, 0}, 0, 1.84, false, false},
    {"Si", {4, 0, 0}, 0, 2.10, false, false},
    {"P", {3, 5, 0}, 0, 1.80, true, true},
    {"S", {2, 4, 6}, 0, 1.80, true, true},
    {"Cl", {1, 0, 0}, 1, 1.75, true, false},
    {"K", {1, 0, 0}, 0, 2.75, false, false},
    {"Ca", {2, 0, 0}, 0, 2.31, false, false},
    {"Zn", {2, 0, 0}, 0, 1.39, false, false},
    {"Se", {2, 4, 6}, 0, 1.90, false, false},
    {"Br", {1, 0, 0}, 1, 1.85, true, false},
    {"I", {1, 0, 0}, 1, 1.98, true, false},
    {"Li", {1, 0, 0}, 0, 1.82, false, false},
    {"Fe", {2, 3, 0}, 0, 0.0, false, false},
    {"Cu", {1, 2, 0}, 0, 1.40, false, false},
    {"Sn", {4, 0, 0}, 0, 2.17, false, false},
}};

inline const ElementInfo* find_element(std::string_view symbol) {
  for (const auto& e : element_table) {
    if (e.symbol == symbol) return &e;
  }
  return nullptr;
}

inline bool known_element(std::string_view symbol) {
  return find_element(symbol) != nullptr;
}

// Smallest standard valence >= `bonded`, or nullopt when `bonded` exceeds
// every entry (callers then add no implicit hydrogens).
inline std::optional<int> fill_valence(const ElementInfo& info, int bonded) {
  for (int v : info.valences) {
    if (v == 0) break;
    if (v >= bonded) return v;
  }
  return std::nullopt;
}

}  // namespace speceval
