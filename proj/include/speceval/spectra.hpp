// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "speceval/errors.hpp"

namespace speceval {

// ---------------------------------------------------------------------------
// Spectrum value types. Constructors ("make") bring values to canonical form:
// 13C shifts sorted descending with exact duplicates removed, 1H peaks sorted
// by descending centroid, MS peaks sorted by m/z and renormalized to base
// peak 100. Serialization is injective on these canonical forms.
// ---------------------------------------------------------------------------

struct CarbonSpectrum {
  std::vector<double> shifts;  // ppm, strictly descending
  std::optional<double> frequency;  // MHz
  std::optional<std::string> solvent;

  friend bool operator==(const CarbonSpectrum&, const CarbonSpectrum&) = default;

  static CarbonSpectrum make(std::vector<double> shifts,
                             std::optional<double> frequency = std::nullopt,
                             std::optional<std::string> solvent = std::nullopt) {
    std::sort(shifts.begin(), shifts.end(), std::greater<>());
    shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());
    for (double s : shifts)
      if (!(s >= -50.0 && s <= 350.0))
        throw Error(errc::invalid_spectrum, "13C shift out of [-50, 350] ppm");
    return CarbonSpectrum{std::move(shifts), frequency, std::move(solvent)};
  }
};

struct ProtonPeak {
  double centroid = 0.0;          // ppm
  std::string shape = "s";        // multiplicity token (open vocabulary)
  std::vector<double> j_values;   // Hz
  int n_h = 1;                    // integration

  friend bool operator==(const ProtonPeak&, const ProtonPeak&) = default;
  friend auto operator<=>(const ProtonPeak&, const ProtonPeak&) = default;
};

// The multiplicity tokens the corpus uses; anything else is carried verbatim.
inline constexpr std::string_view known_multiplicities[] = {
    "s", "d", "t", "q", "m", "dd", "dt", "td", "tt", "ddd", "dq", "qd", "br", "bs"};

inline bool is_known_multiplicity(std::string_view token) {
  for (auto m : known_multiplicities)
    if (m == token) return true;
  return false;
}

struct ProtonSpectrum {
  std::vector<ProtonPeak> peaks;  // descending centroid
  std::optional<double> frequency;
  std::optional<std::string> solvent;

  friend bool operator==(const ProtonSpectrum&, const ProtonSpectrum&) = default;

  int total_protons() const {
    int n = 0;
    for (const auto& p : peaks) n += p.n_h;
    return n;
  }

  static ProtonSpectrum make(std::vector<ProtonPeak> peaks,
                             std::optional<double> frequency = std::nullopt,
                             std::optional<std::string> solvent = std::nullopt) {
    for (const auto& p : peaks) {
      if (!(p.centroid >= -2.0 && p.centroid <= 20.0))
        throw Error(errc::invalid_spectrum, "1H centroid out of [-2, 20] ppm");
      if (p.n_h < 1) throw Error(errc::invalid_spectrum, "integration must be >= 1");
      if (p.shape.empty()) throw Error(errc::invalid_spectrum, "empty multiplicity");
      for (double j : p.j_values)
        if (!(j > 0.0)) throw Error(errc::invalid_spectrum, "coupling constant must be > 0");
    }
    // Canonical order: centroid descending, ties broken by the remaining
    // fields so equal spectra always store peaks identically.
    std::sort(peaks.begin(), peaks.end(), [](const ProtonPeak& a, const ProtonPeak& b) {
      if (a.centroid != b.centroid) return a.centroid > b.centroid;
      if (a.shape != b.shape) return a.shape < b.shape;
      if (a.n_h != b.n_h) return a.n_h < b.n_h;
      return a.j_values < b.j_values;
    });
    ProtonSpectrum s{std::move(peaks), frequency, std::move(solvent)};
    if (s.total_protons() < 1)
      throw Error(errc::invalid_spectrum, "1H spectrum needs at least one proton");
    return s;
  }
};

enum class WaveformModality { IR, Raman, UV };

inline std::string_view modality_tag(WaveformModality m) {
  switch (m) {
    case WaveformModality::IR: return "IR";
    case WaveformModality::Raman: return "Raman";
    case WaveformModality::UV: return "UV";
  }
  return "IR";
}

struct WaveformSpectrum {
  WaveformModality modality = WaveformModality::IR;
  double axis_low = 0.0;
  double axis_high = 0.0;
  std::vector<std::pair<double, double>> points;  // (position, intensity in [0,1])

  friend bool operator==(const WaveformSpectrum&, const WaveformSpectrum&) = default;

  static WaveformSpectrum make(WaveformModality modality, double low, double high,
                               std::vector<std::pair<double, double>> points) {
    if (!(high > low)) throw Error(errc::invalid_spectrum, "axis range must be increasing");
    std::sort(points.begin(), points.end());
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto [p, v] = points[i];
      if (i > 0 && !(p > points[i - 1].first))
        throw Error(errc::invalid_spectrum, "positions must be strictly increasing");
      if (p < low || p > high)
        throw Error(errc::invalid_spectrum, "peak position outside axis range");
      if (!(v >= 0.0 && v <= 1.0))
        throw Error(errc::invalid_spectrum, "intensity outside [0, 1]");
    }
    return WaveformSpectrum{modality, low, high, std::move(points)};
  }
};

enum class MsMode { Positive, Negative };

struct MassSpectrum {
  MsMode mode = MsMode::Positive;
  std::optional<double> collision_energy;  // eV
  std::vector<std::pair<double, double>> peaks;  // (m/z, % of base peak]

  friend bool operator==(const MassSpectrum&, const MassSpectrum&) = default;

  static MassSpectrum make(MsMode mode, std::optional<double> collision_energy,
                           std::vector<std::pair<double, double>> peaks) {
    if (peaks.empty()) throw Error(errc::invalid_spectrum, "mass spectrum has no peaks");
    std::sort(peaks.begin(), peaks.end());
    // Exact duplicate m/z entries merge by summing abundance.
    std::vector<std::pair<double, double>> merged;
    for (auto [mz, ab] : peaks) {
      if (!(mz > 0.0)) throw Error(errc::invalid_spectrum, "m/z must be positive");
      if (!(ab > 0.0)) throw Error(errc::invalid_spectrum, "abundance must be positive");
      if (!merged.empty() && merged.back().first == mz) merged.back().second += ab;
      else merged.push_back({mz, ab});
    }
    double base = 0.0;
    for (auto [mz, ab] : merged) base = std::max(base, ab);
    for (auto& [mz, ab] : merged) ab = ab * 100.0 / base;
    return MassSpectrum{mode, collision_energy, std::move(merged)};
  }
};

using Spectrum = std::variant<CarbonSpectrum, ProtonSpectrum, WaveformSpectrum, MassSpectrum>;

// ---------------------------------------------------------------------------
// Serialization. Numeric precision is fixed so equal spectra produce
// byte-identical strings: 13C shifts 1 decimal, 1H centroids 2, J 1,
// waveform positions integer with 3-decimal intensities, m/z and abundance
// 1 decimal each. Missing frequency/solvent serialize as "unknown".
// ---------------------------------------------------------------------------

namespace spectra_detail {

inline std::string fixed(double v, int decimals) {
  if (v == 0.0) v = 0.0;  // never print "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// One decimal, with a trailing ".0" stripped; used for frequency and CE.
inline std::string trimmed(double v) {
  std::string s = fixed(v, 1);
  if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
  return s;
}

inline std::string nmr_header(const std::optional<double>& freq,
                              const std::optional<std::string>& solvent) {
  if (!freq && !solvent) return "(unknown)";
  std::string f = freq ? trimmed(*freq) + " MHz" : "unknown";
  std::string s = solvent ? *solvent : "unknown";
  return "(" + f + ", " + s + ")";
}

}  // namespace spectra_detail

inline std::string serialize(const CarbonSpectrum& s) {
  std::string out = "<13C_NMR>" + spectra_detail::nmr_header(s.frequency, s.solvent) + " δ";
  for (std::size_t i = 0; i < s.shifts.size(); ++i) {
    out += (i == 0 ? " " : ", ");
    out += spectra_detail::fixed(s.shifts[i], 1);
  }
  out += "</13C_NMR>";
  return out;
}

inline std::string serialize(const ProtonSpectrum& s) {
  std::string out = "<1H_NMR>" + spectra_detail::nmr_header(s.frequency, s.solvent) + " δ ";
  for (std::size_t i = 0; i < s.peaks.size(); ++i) {
    const ProtonPeak& p = s.peaks[i];
    if (i) out += ", ";
    out += spectra_detail::fixed(p.centroid, 2) + " (" + p.shape;
    if (!p.j_values.empty()) {
      out += ", J = ";
      for (std::size_t k = 0; k < p.j_values.size(); ++k) {
        if (k) out += ", ";
        out += spectra_detail::fixed(p.j_values[k], 1);
      }
      out += " Hz";
    }
    out += ", " + std::to_string(p.n_h) + "H)";
  }
  out += "</1H_NMR>";
  return out;
}

inline std::string serialize(const WaveformSpectrum& s) {
  std::string tag(modality_tag(s.modality));
  std::string out = "<" + tag + ">(" + spectra_detail::fixed(s.axis_low, 0) + "~" +
                    spectra_detail::fixed(s.axis_high, 0) + ")";
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    if (i) out += " ";
    out += spectra_detail::fixed(s.points[i].first, 0) + "(" +
           spectra_detail::fixed(s.points[i].second, 3) + ")";
  }
  out += "</" + tag + ">";
  return out;
}

inline std::string serialize(const MassSpectrum& s) {
  std::string tag = s.mode == MsMode::Positive ? "ms_positive" : "ms_negative";
  std::string out = "<" + tag + ">";
  if (s.collision_energy)
    out += "(CE=" + spectra_detail::trimmed(*s.collision_energy) + " eV)";
  for (std::size_t i = 0; i < s.peaks.size(); ++i) {
    if (i) out += " ";
    out += spectra_detail::fixed(s.peaks[i].first, 1) + ":" +
           spectra_detail::fixed(s.peaks[i].second, 1);
  }
  out += "</" + tag + ">";
  return out;
}

inline std::string serialize(const Spectrum& s) {
  return std::visit([](const auto& v) { return serialize(v); }, s);
}

// ---------------------------------------------------------------------------
// Parsing the tagged text back into values. Strict: anything inside a known
// tag that does not belong to the grammar is an error, not skipped.
// ---------------------------------------------------------------------------

namespace spectra_detail {

struct Cursor {
  std::string_view text;  // full original text, for error offsets
  std::string_view rest;

  long offset() const { return static_cast<long>(rest.data() - text.data() + 1); }

  [[noreturn]] void fail(errc code, const std::string& msg) const {
    throw Error(code, msg, offset());
  }

  bool consume(std::string_view prefix) {
    if (rest.substr(0, prefix.size()) != prefix) return false;
    rest.remove_prefix(prefix.size());
    return true;
  }
};

inline double parse_number(Cursor& c, errc code = errc::malformed_peak) {
  // strtod skips leading whitespace; the grammar does not.
  if (c.rest.empty() ||
      (!std::isdigit(static_cast<unsigned char>(c.rest.front())) &&
       c.rest.front() != '-' && c.rest.front() != '+' && c.rest.front() != '.'))
    c.fail(code, "expected a number");
  char* end = nullptr;
  std::string buf(c.rest.substr(0, 64));
  double v = std::strtod(buf.c_str(), &end);
  if (end == buf.c_str()) c.fail(code, "expected a number");
  c.rest.remove_prefix(static_cast<std::size_t>(end - buf.c_str()));
  return v;
}

inline std::pair<std::optional<double>, std::optional<std::string>>
parse_nmr_header(Cursor& c) {
  if (!c.consume("(")) c.fail(errc::malformed_peak, "expected '(' header");
  std::size_t close = c.rest.find(')');
  if (close == std::string_view::npos) c.fail(errc::malformed_peak, "unterminated header");
  std::string inside(c.rest.substr(0, close));
  c.rest.remove_prefix(close + 1);
  if (inside == "unknown") return {std::nullopt, std::nullopt};
  std::size_t comma = inside.find(", ");
  if (comma == std::string::npos) c.fail(errc::malformed_peak, "header needs 'freq, solvent'");
  std::string f = inside.substr(0, comma);
  std::string s = inside.substr(comma + 2);
  std::optional<double> freq;
  if (f != "unknown") {
    if (f.size() < 5 || f.compare(f.size() - 4, 4, " MHz") != 0)
      c.fail(errc::malformed_peak, "frequency must end in ' MHz'");
    char* end = nullptr;
    std::string num = f.substr(0, f.size() - 4);
    double v = std::strtod(num.c_str(), &end);
    if (end != num.c_str() + num.size()) c.fail(errc::malformed_peak, "bad frequency");
    freq = v;
  }
  std::optional<std::string> solvent;
  if (s != "unknown") {
    if (s.empty()) c.fail(errc::malformed_peak, "empty solvent");
    solvent = s;
  }
  return {freq, solvent};
}

inline CarbonSpectrum parse_carbon_body(Cursor& c) {
  auto [freq, solvent] = parse_nmr_header(c);
  if (!c.consume(" δ")) c.fail(errc::malformed_peak, "expected ' δ'");
  std::vector<double> shifts;
  if (!c.rest.empty()) {
    if (!c.consume(" ")) c.fail(errc::malformed_peak, "expected ' ' after δ");
    for (;;) {
      shifts.push_back(parse_number(c));
      if (c.rest.empty()) break;
      if (!c.consume(", ")) c.fail(errc::malformed_peak, "expected ', ' between shifts");
    }
  }
  return CarbonSpectrum::make(std::move(shifts), freq, std::move(solvent));
}

inline ProtonSpectrum parse_proton_body(Cursor& c) {
  auto [freq, solvent] = parse_nmr_header(c);
  if (!c.consume(" δ ")) c.fail(errc::malformed_peak, "expected ' δ '");
  if (c.rest.empty()) c.fail(errc::empty_body, "1H spectrum has no peaks");
  std::vector<ProtonPeak> peaks;
  for (;;) {
    ProtonPeak p;
    p.centroid = parse_number(c);
    if (!c.consume(" (")) c.fail(errc::malformed_peak, "expected ' (' after centroid");
    std::size_t close = c.rest.find(')');
    if (close == std::string_view::npos) c.fail(errc::malformed_peak, "unterminated peak");
    std::string inside(c.rest.substr(0, close));
    c.rest.remove_prefix(close + 1);

    // inside = "shape[, J = j1, j2 Hz], nH"
    std::size_t comma = inside.find(", ");
    if (comma == std::string::npos) c.fail(errc::malformed_peak, "peak needs 'shape, nH'");
    p.shape = inside.substr(0, comma);
    std::string tail = inside.substr(comma + 2);
    if (tail.rfind("J = ", 0) == 0) {
      std::size_t hz = tail.find(" Hz, ");
      if (hz == std::string::npos) c.fail(errc::malformed_peak, "J clause must end ' Hz, '");
      std::string jlist = tail.substr(4, hz - 4);
      tail = tail.substr(hz + 5);
      std::size_t start = 0;
      while (start <= jlist.size()) {
        std::size_t next = jlist.find(", ", start);
        std::string tok = jlist.substr(start, next == std::string::npos ? std::string::npos
                                                                        : next - start);
        char* end = nullptr;
        double j = std::strtod(tok.c_str(), &end);
        if (tok.empty() || end != tok.c_str() + tok.size())
          c.fail(errc::malformed_peak, "bad coupling constant '" + tok + "'");
        p.j_values.push_back(j);
        if (next == std::string::npos) break;
        start = next + 2;
      }
    }
    if (tail.size() < 2 || tail.back() != 'H')
      c.fail(errc::malformed_peak, "peak must end in 'nH'");
    std::string nh = tail.substr(0, tail.size() - 1);
    for (char ch : nh)
      if (ch < '0' || ch > '9') c.fail(errc::malformed_peak, "integration must be an integer");
    p.n_h = std::stoi(nh);
    peaks.push_back(std::move(p));
    if (c.rest.empty()) break;
    if (!c.consume(", ")) c.fail(errc::malformed_peak, "expected ', ' between peaks");
  }
  return ProtonSpectrum::make(std::move(peaks), freq, std::move(solvent));
}

inline WaveformSpectrum parse_waveform_body(Cursor& c, WaveformModality modality) {
  if (!c.consume("(")) c.fail(errc::malformed_peak, "expected '(low~high)'");
  double low = parse_number(c);
  if (!c.consume("~")) c.fail(errc::malformed_peak, "expected '~' in range");
  double high = parse_number(c);
  if (!c.consume(")")) c.fail(errc::malformed_peak, "unterminated range");
  std::vector<std::pair<double, double>> points;
  while (!c.rest.empty()) {
    if (!points.empty() && !c.consume(" "))
      c.fail(errc::malformed_peak, "expected ' ' between points");
    double pos = parse_number(c);
    if (!c.consume("(")) c.fail(errc::malformed_peak, "expected '(intensity)'");
    double inten = parse_number(c);
    if (!c.consume(")")) c.fail(errc::malformed_peak, "unterminated intensity");
    points.push_back({pos, inten});
  }
  return WaveformSpectrum::make(modality, low, high, std::move(points));
}

inline MassSpectrum parse_ms_body(Cursor& c, MsMode mode) {
  std::optional<double> ce;
  if (c.consume("(")) {
    if (!c.consume("CE=")) c.fail(errc::malformed_peak, "expected 'CE='");
    ce = parse_number(c);
    if (!c.consume(" eV)")) c.fail(errc::malformed_peak, "expected ' eV)'");
  }
  if (c.rest.empty()) c.fail(errc::empty_body, "mass spectrum has no peaks");
  std::vector<std::pair<double, double>> peaks;
  while (!c.rest.empty()) {
    if (!peaks.empty() && !c.consume(" "))
      c.fail(errc::malformed_peak, "expected ' ' between peaks");
    double mz = parse_number(c);
    if (!c.consume(":")) c.fail(errc::malformed_peak, "expected ':' in m/z pair");
    double ab = parse_number(c);
    peaks.push_back({mz, ab});
  }
  return MassSpectrum::make(mode, ce, std::move(peaks));
}

}  // namespace spectra_detail

// Parses any of the tagged spectrum formats, detecting the modality from the
// opening tag. parse_spectrum(serialize(s)) == s for every canonical s.
inline Spectrum parse_spectrum(std::string_view text) {
  using namespace spectra_detail;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  if (text.empty()) throw Error(errc::empty_body, "empty spectrum text");
  if (text.front() != '<') throw Error(errc::unknown_tag, "spectrum text must start with a tag", 1);
  std::size_t tag_end = text.find('>');
  if (tag_end == std::string_view::npos) throw Error(errc::unknown_tag, "unterminated opening tag", 1);
  std::string tag(text.substr(1, tag_end - 1));

  static constexpr std::string_view known[] = {"13C_NMR", "1H_NMR", "IR", "Raman",
                                               "UV", "ms_positive", "ms_negative"};
  bool is_known = false;
  for (auto k : known) is_known |= (k == tag);
  if (!is_known) throw Error(errc::unknown_tag, "unknown tag <" + tag + ">", 1);

  if (text.size() < tag_end + 1 || text.back() != '>')
    throw Error(errc::tag_mismatch, "missing closing tag");
  std::size_t close_open = text.rfind("</");
  if (close_open == std::string_view::npos || close_open < tag_end)
    throw Error(errc::tag_mismatch, "missing closing tag");
  std::string close_tag(text.substr(close_open + 2, text.size() - close_open - 3));
  if (close_tag != tag)
    throw Error(errc::tag_mismatch, "<" + tag + "> closed by </" + close_tag + ">");

  Cursor c{text, text.substr(tag_end + 1, close_open - tag_end - 1)};
  if (tag == "13C_NMR") return parse_carbon_body(c);
  if (tag == "1H_NMR") return parse_proton_body(c);
  if (tag == "IR") return parse_waveform_body(c, WaveformModality::IR);
  if (tag == "Raman") return parse_waveform_body(c, WaveformModality::Raman);
  if (tag == "UV") return parse_waveform_body(c, WaveformModality::UV);
  if (tag == "ms_positive") return parse_ms_body(c, MsMode::Positive);
  return parse_ms_body(c, MsMode::Negative);
}

// ---------------------------------------------------------------------------
// Waveform cleaning: interpolate onto a uniform grid, min-max normalize,
// keep local maxima above the noise floor.
// ---------------------------------------------------------------------------

inline WaveformSpectrum clean_waveform(std::vector<std::pair<double, double>> raw,
                                       WaveformModality modality, double grid_step,
                                       double noise_floor) {
  if (raw.size() < 2) throw Error(errc::too_few_points, "need at least 2 raw points");
  if (!(grid_step > 0.0) || !(noise_floor >= 0.0 && noise_floor < 1.0))
    throw Error(errc::config_mismatch, "bad grid_step or noise_floor");
  for (auto [p, v] : raw)
    if (!std::isfinite(p) || !std::isfinite(v))
      throw Error(errc::non_finite_intensity, "non-finite raw sample");

  std::sort(raw.begin(), raw.end());
  // Average duplicate positions so interpolation sees a function.
  std::vector<std::pair<double, double>> pts;
  std::size_t i = 0;
  while (i < raw.size()) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < raw.size() && raw[j].first == raw[i].first) sum += raw[j++].second;
    pts.push_back({raw[i].first, sum / static_cast<double>(j - i)});
    i = j;
  }
  if (pts.size() < 2) throw Error(errc::too_few_points, "need at least 2 distinct positions");

  const double lo = pts.front().first, hi = pts.back().first;
  const std::size_t ngrid = static_cast<std::size_t>(std::floor((hi - lo) / grid_step + 1e-9)) + 1;
  std::vector<double> grid(ngrid);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < ngrid; ++k) {
    double x = lo + static_cast<double>(k) * grid_step;
    while (seg + 2 < pts.size() && pts[seg + 1].first < x) ++seg;
    auto [x0, y0] = pts[seg];
    auto [x1, y1] = pts[seg + 1];
    double t = (x - x0) / (x1 - x0);
    t = std::clamp(t, 0.0, 1.0);
    grid[k] = y0 + t * (y1 - y0);
  }

  double gmin = *std::min_element(grid.begin(), grid.end());
  double gmax = *std::max_element(grid.begin(), grid.end());
  if (gmax > gmin) {
    for (double& v : grid) v = (v - gmin) / (gmax - gmin);
  } else {
    for (double& v : grid) v = 0.0;  // constant signal → nothing above the floor
  }

  // Local maxima with plateau handling: a run of equal values is a maximum
  // when both flanks are lower (missing flank counts as lower); the run's
  // center point represents it. The global maximum therefore always survives
  // when anything does, so a nonempty result peaks at exactly 1.
  std::vector<std::pair<double, double>> kept;
  std::size_t run_start = 0;
  for (std::size_t k = 0; k < ngrid; ++k) {
    if (k + 1 < ngrid && grid[k + 1] == grid[run_start]) continue;
    std::size_t run_end = k;  // inclusive
    bool left_lower = run_start == 0 || grid[run_start - 1] < grid[run_start];
    bool right_lower = run_end + 1 >= ngrid || grid[run_end + 1] < grid[run_start];
    if (left_lower && right_lower && grid[run_start] > noise_floor) {
      std::size_t mid = (run_start + run_end) / 2;
      kept.push_back({lo + static_cast<double>(mid) * grid_step, grid[run_start]});
    }
    run_start = k + 1;
  }

  double axis_high = lo + static_cast<double>(ngrid - 1) * grid_step;
  return WaveformSpectrum::make(modality, lo, axis_high, std::move(kept));
}

inline constexpr double default_grid_step(WaveformModality m) {
  return m == WaveformModality::UV ? 1.0 : 2.0;
}
inline constexpr double default_noise_floor = 0.01;

}  // namespace speceval
