// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "speceval/molgraph.hpp"
#include "speceval/rng.hpp"
#include "speceval/smiles.hpp"
#include "speceval/spectra.hpp"
#include "speceval/structure_text.hpp"

namespace speceval {

enum class TaskKind {
  MoleculeQa,
  StructureGen,
  IupacToSmiles,
  SmilesToIupac,
  SpectrumToSmiles,
  SmilesToSpectrum,
};

enum class TaskFormat { FreeForm, MultipleChoice, TrueFalse };

inline std::string_view task_name(TaskKind t) {
  switch (t) {
    case TaskKind::MoleculeQa: return "molecule_qa";
    case TaskKind::StructureGen: return "structure_gen";
    case TaskKind::IupacToSmiles: return "iupac_to_smiles";
    case TaskKind::SmilesToIupac: return "smiles_to_iupac";
    case TaskKind::SpectrumToSmiles: return "spectrum_to_smiles";
    case TaskKind::SmilesToSpectrum: return "smiles_to_spectrum";
  }
  return "molecule_qa";
}

inline std::string_view format_name(TaskFormat f) {
  switch (f) {
    case TaskFormat::FreeForm: return "free_form";
    case TaskFormat::MultipleChoice: return "multiple_choice";
    case TaskFormat::TrueFalse: return "true_false";
  }
  return "free_form";
}

inline std::optional<TaskKind> task_from_name(std::string_view s) {
  for (TaskKind t : {TaskKind::MoleculeQa, TaskKind::StructureGen, TaskKind::IupacToSmiles,
                     TaskKind::SmilesToIupac, TaskKind::SpectrumToSmiles,
                     TaskKind::SmilesToSpectrum})
    if (task_name(t) == s) return t;
  return std::nullopt;
}

inline std::optional<TaskFormat> format_from_name(std::string_view s) {
  for (TaskFormat f : {TaskFormat::FreeForm, TaskFormat::MultipleChoice, TaskFormat::TrueFalse})
    if (format_name(f) == s) return f;
  return std::nullopt;
}

struct MoleculeRecord {
  std::string id;
  std::string smiles;
  std::optional<std::string> iupac;
  std::optional<MoleculeGraph> graph;  // 3D structure when available
  std::vector<Spectrum> spectra;
};

struct InstructionRecord {
  TaskKind task = TaskKind::MoleculeQa;
  TaskFormat format = TaskFormat::FreeForm;
  std::string prompt;
  std::string answer;
  std::string source_id;
  std::string template_id;
};

// A prompt template. `answer_key` names what the answer is built from:
// canonical_smiles | iupac | spectrum | structure | formula |
// heavy_atom_count | atom_count | bond_count.
struct Template {
  std::string id;
  std::string answer_key;
  std::string prompt;
};

using TemplatePool = std::vector<Template>;

namespace taskgen_detail {

struct RawTemplate {
  const char* key;
  const char* prompt;
};

inline const std::vector<RawTemplate>& raw_templates(TaskKind task, TaskFormat format) {
  static const std::vector<RawTemplate> empty;
  static const std::map<std::pair<TaskKind, TaskFormat>, std::vector<RawTemplate>> pools = {
      {{TaskKind::MoleculeQa, TaskFormat::FreeForm},
       {{"heavy_atom_count", "How many heavy atoms does the molecule {smiles} contain? Answer with a number."},
        {"atom_count", "Counting hydrogens, how many atoms make up {smiles}? Answer with a number."},
        {"bond_count", "How many bonds, including bonds to hydrogen, does {smiles} have? Answer with a number."},
        {"formula", "What is the molecular formula of {smiles}?"},
        {"canonical_smiles", "Rewrite {smiles} as a canonical SMILES string."}}},
      {{TaskKind::MoleculeQa, TaskFormat::MultipleChoice},
       {{"formula", "Which of the following is the molecular formula of {smiles}?\n{options}\nAnswer with the formula."},
        {"heavy_atom_count", "How many heavy atoms does {smiles} contain?\n{options}\nAnswer with the number."}}},
      {{TaskKind::MoleculeQa, TaskFormat::TrueFalse},
       {{"formula", "True or false: the molecular formula of {smiles} is {candidate}."},
        {"heavy_atom_count", "True or false: the molecule {smiles} has {candidate} heavy atoms."}}},
      {{TaskKind::StructureGen, TaskFormat::FreeForm},
       {{"structure", "Generate the 3D structure of {smiles} as an atom and bond block."},
        {"structure", "Produce atomic coordinates, atom types and bond connectivity for the molecule {smiles}."}}},
      {{TaskKind::IupacToSmiles, TaskFormat::FreeForm},
       {{"canonical_smiles", "Convert the IUPAC name {iupac} to a SMILES string."},
        {"canonical_smiles", "What is the SMILES representation of {iupac}?"},
        {"canonical_smiles", "Write a SMILES string for the compound named {iupac}."}}},
      {{TaskKind::IupacToSmiles, TaskFormat::MultipleChoice},
       {{"canonical_smiles", "Which SMILES corresponds to the name {iupac}?\n{options}\nAnswer with the SMILES."}}},
      {{TaskKind::IupacToSmiles, TaskFormat::TrueFalse},
       {{"canonical_smiles", "True or false: {candidate} is a correct SMILES for the molecule named {iupac}."}}},
      {{TaskKind::SmilesToIupac, TaskFormat::FreeForm},
       {{"iupac", "Give the IUPAC name of {smiles}."},
        {"iupac", "What is the systematic name of the molecule {smiles}?"}}},
      {{TaskKind::SmilesToIupac, TaskFormat::MultipleChoice},
       {{"iupac", "Which name matches the molecule {smiles}?\n{options}\nAnswer with the name."}}},
      {{TaskKind::SmilesToIupac, TaskFormat::TrueFalse},
       {{"iupac", "True or false: {smiles} is named {candidate}."}}},
      {{TaskKind::SpectrumToSmiles, TaskFormat::FreeForm},
       {{"canonical_smiles", "Given the following spectra, determine the molecule and answer with its SMILES: {spectrum}"},
        {"canonical_smiles", "Which molecule produced these spectra? {spectrum} Answer with a SMILES string."}}},
      {{TaskKind::SpectrumToSmiles, TaskFormat::MultipleChoice},
       {{"canonical_smiles", "The spectra {spectrum} belong to which of these molecules?\n{options}\nAnswer with the SMILES."}}},
      {{TaskKind::SpectrumToSmiles, TaskFormat::TrueFalse},
       {{"canonical_smiles", "True or false: the spectra {spectrum} were measured on the molecule {candidate}."}}},
      {{TaskKind::SmilesToSpectrum, TaskFormat::FreeForm},
       {{"spectrum", "Predict the {modality} of {smiles} in the standard tagged format."},
        {"spectrum", "Write the expected {modality} for the molecule {smiles}."}}},
  };
  auto it = pools.find({task, format});
  return it == pools.end() ? empty : it->second;
}

}  // namespace taskgen_detail

inline TemplatePool default_templates(TaskKind task, TaskFormat format) {
  TemplatePool pool;
  const auto& raw = taskgen_detail::raw_templates(task, format);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::string id = std::string(task_name(task)) + "/" + std::string(format_name(format)) +
                     "#" + std::to_string(i);
    pool.push_back({std::move(id), raw[i].key, raw[i].prompt});
  }
  return pool;
}

// Template file format: one template per line, "answer_key<TAB>prompt".
// Blank lines and #-comments are skipped.
inline TemplatePool load_templates(const std::string& path, TaskKind task, TaskFormat format) {
  std::ifstream in(path);
  if (!in) throw Error(errc::input_not_found, "cannot open " + path);
  TemplatePool pool;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(errc::config_parse, "template line needs 'key<TAB>prompt'", lineno);
    std::string id = std::string(task_name(task)) + "/" + std::string(format_name(format)) +
                     "#" + std::to_string(pool.size());
    pool.push_back({std::move(id), line.substr(0, tab), line.substr(tab + 1)});
  }
  return pool;
}

namespace taskgen_detail {

inline std::string spectrum_label(const Spectrum& s) {
  if (std::holds_alternative<CarbonSpectrum>(s)) return "13C NMR spectrum";
  if (std::holds_alternative<ProtonSpectrum>(s)) return "1H NMR spectrum";
  if (const auto* w = std::get_if<WaveformSpectrum>(&s))
    return std::string(modality_tag(w->modality)) + " spectrum";
  const auto& m = std::get<MassSpectrum>(s);
  return m.mode == MsMode::Positive ? "positive-mode mass spectrum"
                                    : "negative-mode mass spectrum";
}

inline void replace_all(std::string& text, std::string_view key, std::string_view value) {
  std::size_t at = 0;
  while ((at = text.find(key, at)) != std::string::npos) {
    text.replace(at, key.size(), value);
    at += value.size();
  }
}

inline MoleculeGraph record_graph(const MoleculeRecord& rec) {
  if (rec.graph) return *rec.graph;
  return parse_smiles(rec.smiles);
}

// The answer for a record under a given key; nullopt when the record lacks
// the needed field. `spectrum_index` selects the spectrum for per-spectrum
// tasks (-1: not a per-spectrum item).
inline std::optional<std::string> compute_answer(const MoleculeRecord& rec,
                                                 const std::string& key, int spectrum_index) {
  if (key == "canonical_smiles") return canonical_smiles(parse_smiles(rec.smiles));
  if (key == "iupac") return rec.iupac;
  if (key == "structure") {
    if (!rec.graph || !has_positions(*rec.graph)) return std::nullopt;
    return write_structure_text(*rec.graph);
  }
  if (key == "spectrum") {
    if (spectrum_index < 0 || spectrum_index >= static_cast<int>(rec.spectra.size()))
      return std::nullopt;
    return serialize(rec.spectra[static_cast<std::size_t>(spectrum_index)]);
  }
  if (key == "formula") return molecular_formula(record_graph(rec));
  if (key == "heavy_atom_count") return std::to_string(heavy_atom_count(record_graph(rec)));
  if (key == "atom_count") return std::to_string(record_graph(rec).atoms.size());
  if (key == "bond_count") return std::to_string(record_graph(rec).bonds.size());
  throw Error(errc::config_parse, "unknown answer key '" + key + "'");
}

}  // namespace taskgen_detail

// Deterministic instruction-record generation. Answers come from this
// toolkit's own serializers, so every answer re-parses with the matching
// module. Multiple-choice items carry exactly four options (distractors are
// other records' answers for the same key); true/false items pair the prompt
// with the real or a sampled wrong candidate.
inline std::vector<InstructionRecord> generate(const std::vector<MoleculeRecord>& records,
                                               TaskKind task, TaskFormat format,
                                               const TemplatePool& pool, std::uint64_t seed) {
  if (pool.empty())
    throw Error(errc::empty_template_pool,
                std::string(task_name(task)) + "/" + std::string(format_name(format)));

  // Distractor values per answer key, in record order, deduplicated.
  std::map<std::string, std::vector<std::string>> candidates;
  auto candidates_for = [&](const std::string& key) -> const std::vector<std::string>& {
    auto it = candidates.find(key);
    if (it != candidates.end()) return it->second;
    std::vector<std::string> vals;
    std::set<std::string> seen;
    for (const auto& rec : records) {
      std::optional<std::string> v;
      try {
        v = taskgen_detail::compute_answer(rec, key, rec.spectra.empty() ? -1 : 0);
      } catch (const Error&) {
        continue;
      }
      if (v && seen.insert(*v).second) vals.push_back(*v);
    }
    return candidates.emplace(key, std::move(vals)).first->second;
  };

  std::vector<InstructionRecord> out;
  for (std::size_t ri = 0; ri < records.size(); ++ri) {
    const MoleculeRecord& rec = records[ri];
    SplitMix64 rng(derive_seed(seed, fnv1a64(rec.id.data(), rec.id.size())));

    std::vector<int> spectrum_indices{-1};
    if (task == TaskKind::SmilesToSpectrum) {
      if (rec.spectra.empty())
        throw Error(errc::missing_field,
                    "smiles_to_spectrum needs spectra (record " + rec.id + ")");
      spectrum_indices.clear();
      for (int k = 0; k < static_cast<int>(rec.spectra.size()); ++k)
        spectrum_indices.push_back(k);
    }
    if (task == TaskKind::SpectrumToSmiles && rec.spectra.empty())
      throw Error(errc::missing_field,
                  "spectrum_to_smiles needs spectra (record " + rec.id + ")");

    for (int sidx : spectrum_indices) {
      const Template& tpl = pool[rng.below(pool.size())];
      auto answer = taskgen_detail::compute_answer(rec, tpl.answer_key, sidx);
      if (!answer)
        throw Error(errc::missing_field, "record " + rec.id + " lacks field for key '" +
                                             tpl.answer_key + "'");

      std::string prompt = tpl.prompt;
      taskgen_detail::replace_all(prompt, "{smiles}", rec.smiles);
      if (prompt.find("{iupac}") != std::string::npos) {
        if (!rec.iupac)
          throw Error(errc::missing_field, "record " + rec.id + " has no IUPAC name");
        taskgen_detail::replace_all(prompt, "{iupac}", *rec.iupac);
      }
      if (prompt.find("{spectrum}") != std::string::npos) {
        if (rec.spectra.empty())
          throw Error(errc::missing_field, "record " + rec.id + " has no spectra");
        std::string all;
        if (sidx >= 0) {
          all = serialize(rec.spectra[static_cast<std::size_t>(sidx)]);
        } else {
          for (std::size_t k = 0; k < rec.spectra.size(); ++k) {
            if (k) all += " ";
            all += serialize(rec.spectra[k]);
          }
        }
        taskgen_detail::replace_all(prompt, "{spectrum}", all);
      }
      if (prompt.find("{modality}") != std::string::npos && sidx >= 0)
        taskgen_detail::replace_all(
            prompt, "{modality}",
            taskgen_detail::spectrum_label(rec.spectra[static_cast<std::size_t>(sidx)]));

      std::string final_answer = *answer;
      if (format == TaskFormat::MultipleChoice) {
        const auto& vals = candidates_for(tpl.answer_key);
        std::vector<std::string> distractors;
        for (const auto& v : vals)
          if (v != *answer) distractors.push_back(v);
        if (distractors.size() < 3)
          throw Error(errc::insufficient_corpus,
                      "need 3 distinct distractors for key '" + tpl.answer_key + "'");
        rng.shuffle(distractors);
        std::vector<std::string> options(distractors.begin(), distractors.begin() + 3);
        options.push_back(*answer);
        rng.shuffle(options);
        std::string block;
        const char* letters = "ABCD";
        for (std::size_t k = 0; k < 4; ++k) {
          if (k) block += "\n";
          block += std::string(1, letters[k]) + ". " + options[k];
        }
        taskgen_detail::replace_all(prompt, "{options}", block);
      } else if (format == TaskFormat::TrueFalse) {
        const auto& vals = candidates_for(tpl.answer_key);
        std::vector<std::string> distractors;
        for (const auto& v : vals)
          if (v != *answer) distractors.push_back(v);
        bool truthy = distractors.empty() ? true : (rng.below(2) == 0);
        std::string candidate = truthy || distractors.empty()
                                    ? *answer
                                    : distractors[rng.below(distractors.size())];
        taskgen_detail::replace_all(prompt, "{candidate}", candidate);
        final_answer = truthy ? "True" : "False";
      }

      if (prompt.find('{') != std::string::npos && prompt.find('}') != std::string::npos) {
        std::size_t open = prompt.find('{');
        std::size_t close = prompt.find('}', open);
        if (close != std::string::npos)
          throw Error(errc::config_parse,
                      "unresolved placeholder " + prompt.substr(open, close - open + 1) +
                          " in template " + tpl.id);
      }

      out.push_back({task, format, std::move(prompt), std::move(final_answer), rec.id, tpl.id});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Leakage-safe splits.
// ---------------------------------------------------------------------------

struct SplitResult {
  std::vector<std::string> train, val, test;
};

// Splits molecule ids into disjoint train/val/test sets. Sizes follow the
// fractions by largest remainder, so (0.8, 0.1, 0.1) over 10 ids gives 8/1/1.
inline SplitResult split(const std::vector<std::string>& ids,
                         const std::array<double, 3>& fractions, std::uint64_t seed) {
  double sum = fractions[0] + fractions[1] + fractions[2];
  for (double f : fractions)
    if (f < 0.0) throw Error(errc::bad_fractions, "negative fraction");
  if (std::abs(sum - 1.0) > 1e-9) throw Error(errc::bad_fractions, "fractions must sum to 1");
  std::set<std::string> unique(ids.begin(), ids.end());
  if (unique.size() != ids.size()) throw Error(errc::bad_fractions, "duplicate ids");

  std::vector<std::string> shuffled = ids;
  SplitMix64 rng(seed);
  rng.shuffle(shuffled);

  const double n = static_cast<double>(ids.size());
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    double exact = fractions[k] * n;
    sizes[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainders[k] = exact - static_cast<double>(sizes[k]);
    assigned += sizes[k];
  }
  while (assigned < ids.size()) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 3; ++k)
      if (remainders[k] > remainders[best]) best = k;
    sizes[best]++;
    remainders[best] = -1.0;
    ++assigned;
  }

  SplitResult out;
  std::size_t at = 0;
  for (std::size_t k = 0; k < sizes[0]; ++k) out.train.push_back(shuffled[at++]);
  for (std::size_t k = 0; k < sizes[1]; ++k) out.val.push_back(shuffled[at++]);
  for (std::size_t k = 0; k < sizes[2]; ++k) out.test.push_back(shuffled[at++]);
  return out;
}

// Disjoint per-split template pools (same largest-remainder sizing).
inline std::array<TemplatePool, 3> partition_templates(const TemplatePool& pool,
                                                       const std::array<double, 3>& fractions,
                                                       std::uint64_t seed) {
  std::vector<std::string> ids;
  for (const auto& t : pool) ids.push_back(t.id);
  SplitResult r = split(ids, fractions, seed);
  auto subset = [&](const std::vector<std::string>& want) {
    TemplatePool sub;
    for (const auto& t : pool)
      for (const auto& id : want)
        if (t.id == id) sub.push_back(t);
    return sub;
  };
  return {subset(r.train), subset(r.val), subset(r.test)};
}

// Checks the self-consistency contract: the answer re-parses with the module
// that produced it and reproduces itself byte for byte.
inline bool verify_instruction(const InstructionRecord& rec, const TemplatePool& pool) {
  const Template* tpl = nullptr;
  for (const auto& t : pool)
    if (t.id == rec.template_id) tpl = &t;
  if (tpl == nullptr) return false;
  if (rec.answer.empty()) return false;
  try {
    if (rec.format == TaskFormat::TrueFalse)
      return rec.answer == "True" || rec.answer == "False";
    const std::string& key = tpl->answer_key;
    if (key == "canonical_smiles")
      return canonical_smiles(parse_smiles(rec.answer)) == rec.answer;
    if (key == "spectrum") return serialize(parse_spectrum(rec.answer)) == rec.answer;
    if (key == "structure")
      return write_structure_text(parse_structure_text(rec.answer)) == rec.answer;
    if (key == "heavy_atom_count" || key == "atom_count" || key == "bond_count") {
      for (char c : rec.answer)
        if (c < '0' || c > '9') return false;
      return true;
    }
    return true;  // iupac / formula: opaque strings, already nonempty
  } catch (const Error&) {
    return false;
  }
}

}  // namespace speceval
