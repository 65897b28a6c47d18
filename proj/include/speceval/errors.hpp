// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace speceval {

// Error codes for every failure mode the toolkit reports. Grouped by the
// subsystem that raises them; the same code is reused when two parsers share
// a failure family (structure text reuses the SDF codes, for example).
enum class errc {
  // molfile / structure-block parsing
  malformed_counts,
  atom_block,
  bond_index_out_of_range,
  valence_violation,
  unsupported_version,
  unknown_bond_order,
  truncated_file,
  duplicate_bond,

  // SMILES
  empty_input,
  unbalanced_parenthesis,
  unclosed_ring_bond,
  unknown_atom_symbol,
  smiles_syntax,
  unsupported_feature,

  // spectrum text
  unknown_tag,
  tag_mismatch,
  malformed_peak,
  empty_body,
  invalid_spectrum,
  too_few_points,
  non_finite_intensity,

  // metrics
  empty_list,
  empty_truth,
  unterminated_bracket,
  config_mismatch,
  kind_mismatch,
  length_mismatch,

  // geometry
  missing_coordinates,
  unknown_element_radius,
  unknown_bond_reference,
  empty_corpus,

  // task generation
  missing_field,
  empty_template_pool,
  insufficient_corpus,
  bad_fractions,

  // io / config
  input_not_found,
  config_parse,
};

inline std::string_view errc_name(errc c) {
  switch (c) {
    case errc::malformed_counts: return "malformed_counts";
    case errc::atom_block: return "atom_block";
    case errc::bond_index_out_of_range: return "bond_index_out_of_range";
    case errc::valence_violation: return "valence_violation";
    case errc::unsupported_version: return "unsupported_version";
    case errc::unknown_bond_order: return "unknown_bond_order";
    case errc::truncated_file: return "truncated_file";
    case errc::duplicate_bond: return "duplicate_bond";
    case errc::empty_input: return "empty_input";
    case errc::unbalanced_parenthesis: return "unbalanced_parenthesis";
    case errc::unclosed_ring_bond: return "unclosed_ring_bond";
    case errc::unknown_atom_symbol: return "unknown_atom_symbol";
    case errc::smiles_syntax: return "smiles_syntax";
    case errc::unsupported_feature: return "unsupported_feature";
    case errc::unknown_tag: return "unknown_tag";
    case errc::tag_mismatch: return "tag_mismatch";
    case errc::malformed_peak: return "malformed_peak";
    case errc::empty_body: return "empty_body";
    case errc::invalid_spectrum: return "invalid_spectrum";
    case errc::too_few_points: return "too_few_points";
    case errc::non_finite_intensity: return "non_finite_intensity";
    case errc::empty_list: return "empty_list";
    case errc::empty_truth: return "empty_truth";
    case errc::unterminated_bracket: return "unterminated_bracket";
    case errc::config_mismatch: return "config_mismatch";
    case errc::kind_mismatch: return "kind_mismatch";
    case errc::length_mismatch: return "length_mismatch";
    case errc::missing_coordinates: return "missing_coordinates";
    case errc::unknown_element_radius: return "unknown_element_radius";
    case errc::unknown_bond_reference: return "unknown_bond_reference";
    case errc::empty_corpus: return "empty_corpus";
    case errc::missing_field: return "missing_field";
    case errc::empty_template_pool: return "empty_template_pool";
    case errc::insufficient_corpus: return "insufficient_corpus";
    case errc::bad_fractions: return "bad_fractions";
    case errc::input_not_found: return "input_not_found";
    case errc::config_parse: return "config_parse";
  }
  return "unknown";
}

// Single exception type for the whole library. `line()` is 1-based and refers
// to the offending input line (or character position for one-line formats);
// -1 when not applicable.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message, long line = -1)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message +
                           (line >= 0 ? " (line " + std::to_string(line) + ")" : "")),
        code_(code),
        line_(line) {}

  errc code() const noexcept { return code_; }
  long line() const noexcept { return line_; }

 private:
  errc code_;
  long line_;
};

}  // namespace speceval
