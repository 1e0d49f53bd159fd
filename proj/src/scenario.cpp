#include "darkline/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <vector>

#include "darkline/sweep.hpp"  // format_number

namespace darkline {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw ParseError("line " + std::to_string(line) + ": " + message);
}

double parse_double(const std::string& token, int line) {
  const std::string t = trim(token);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  // from_chars rejects an explicit plus sign; the split imaginary part of
  // "a+bi" carries one.
  if (begin != end && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end || begin == end)
    fail(line, "'" + t + "' is not a number");
  return value;
}

/// Accepts "a", "bi", "a+bi", "a-bi" (decimal literals, exponents allowed,
/// bare "i"/"-i" for unit imaginary parts).
Complex parse_complex(const std::string& token, int line) {
  const std::string t = trim(token);
  if (t.empty()) fail(line, "empty value");

  // Split at the last +/- that is not an exponent sign and not leading.
  std::size_t split = std::string::npos;
  for (std::size_t k = 1; k < t.size(); ++k) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E')
      split = k;
  }

  auto imag_of = [&](const std::string& part) {
    std::string body = part.substr(0, part.size() - 1);  // strip trailing 'i'
    if (body.empty() || body == "+") return 1.0;
    if (body == "-") return -1.0;
    return parse_double(body, line);
  };

  if (split != std::string::npos) {
    const std::string head = t.substr(0, split);
    const std::string tail = t.substr(split);
    if (tail.back() != 'i') fail(line, "'" + t + "' is not a complex literal");
    return {parse_double(head, line), imag_of(tail)};
  }
  if (t.back() == 'i') return {0.0, imag_of(t)};
  return {parse_double(t, line), 0.0};
}

struct Entry {
  std::string value;
  int line = 0;
};

struct Section {
  int line = 0;
  std::map<std::string, Entry> entries;
};

const std::map<std::string, std::vector<std::string>>& section_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"scheme", {"kind"}},
      {"mode.1", {"label", "kappa", "kappa_ext"}},
      {"mode.2", {"label", "kappa", "kappa_ext"}},
      {"mode.3", {"label", "kappa", "kappa_ext"}},
      {"mech", {"gamma_m"}},
      {"coupling", {"g1", "g2", "g3"}},
      {"signal", {"amplitude", "delta"}},
      {"aux_drive", {"amplitude", "delta"}},
      {"parametric", {"lambda"}},
  };
  return keys;
}

}  // namespace

SchemeConfig parse_scenario(const std::string& text) {
  std::map<std::string, Section> sections;
  std::string current;

  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header '" + line + "'");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (!section_keys().count(name)) fail(line_no, "unknown section '[" + name + "]'");
      if (sections.count(name)) fail(line_no, "duplicate section '[" + name + "]'");
      sections[name].line = line_no;
      current = name;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value', got '" + line + "'");
    if (current.empty()) fail(line_no, "key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");

    const auto& allowed = section_keys().at(current);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(line_no, "unknown key '" + key + "' in section [" + current + "]");
    auto [it, inserted] = sections[current].entries.emplace(key, Entry{value, line_no});
    if (!inserted) fail(line_no, "duplicate key '" + key + "' in section [" + current + "]");
  }

  auto section_of = [&](const std::string& name) -> Section& {
    auto it = sections.find(name);
    if (it == sections.end())
      throw ParseError("missing required section [" + name + "]");
    return it->second;
  };
  auto required = [&](const std::string& section, const std::string& key) -> Entry& {
    Section& s = section_of(section);
    auto it = s.entries.find(key);
    if (it == s.entries.end())
      throw ParseError("section [" + section + "] (line " + std::to_string(s.line) +
                       ") is missing key '" + key + "'");
    return it->second;
  };

  const Entry& kind_entry = required("scheme", "kind");
  SchemeConfig config;
  if (kind_entry.value == "baseline") config.kind = SchemeKind::Baseline;
  else if (kind_entry.value == "weak_drive") config.kind = SchemeKind::WeakDrive;
  else if (kind_entry.value == "parametric") config.kind = SchemeKind::Parametric;
  else fail(kind_entry.line, "unknown scheme kind '" + kind_entry.value + "'");

  // Reject sections the declared scheme does not use.
  std::vector<std::string> allowed_sections = {"scheme", "mode.1", "mode.2",
                                               "mech",   "coupling", "signal"};
  if (config.kind == SchemeKind::WeakDrive) {
    allowed_sections.emplace_back("mode.3");
    allowed_sections.emplace_back("aux_drive");
  }
  if (config.kind == SchemeKind::Parametric) allowed_sections.emplace_back("parametric");
  for (const auto& [name, section] : sections)
    if (std::find(allowed_sections.begin(), allowed_sections.end(), name) ==
        allowed_sections.end())
      fail(section.line, "section [" + name + "] is not used by scheme '" +
                             kind_entry.value + "'");

  auto read_mode = [&](const std::string& section_name) {
    OpticalMode mode;
    Section& s = section_of(section_name);
    if (auto it = s.entries.find("label"); it != s.entries.end())
      mode.label = it->second.value;
    const Entry& kappa = required(section_name, "kappa");
    mode.kappa = parse_double(kappa.value, kappa.line);
    const Entry& kext = required(section_name, "kappa_ext");
    mode.kappa_ext = parse_double(kext.value, kext.line);
    return mode;
  };

  config.mode1 = read_mode("mode.1");
  config.mode2 = read_mode("mode.2");

  const Entry& gamma = required("mech", "gamma_m");
  config.mech.gamma_m = parse_double(gamma.value, gamma.line);

  const Entry& g1 = required("coupling", "g1");
  config.g1.g = parse_double(g1.value, g1.line);
  const Entry& g2 = required("coupling", "g2");
  config.g2.g = parse_double(g2.value, g2.line);

  const Entry& amp = required("signal", "amplitude");
  config.signal.amplitude = parse_complex(amp.value, amp.line);
  const Entry& delta = required("signal", "delta");
  config.signal.delta = parse_double(delta.value, delta.line);

  if (config.kind == SchemeKind::WeakDrive) {
    config.mode3 = read_mode("mode.3");
    const Entry& g3 = required("coupling", "g3");
    config.g3 = Coupling{parse_double(g3.value, g3.line)};
    DriveTone aux;
    const Entry& aamp = required("aux_drive", "amplitude");
    aux.amplitude = parse_complex(aamp.value, aamp.line);
    const Entry& adelta = required("aux_drive", "delta");
    aux.delta = parse_double(adelta.value, adelta.line);
    config.aux_drive = aux;
  } else if (Section& coupling = section_of("coupling"); coupling.entries.count("g3")) {
    fail(coupling.entries.at("g3").line, "key 'g3' is only used by scheme 'weak_drive'");
  }

  if (config.kind == SchemeKind::Parametric) {
    const Entry& lambda = required("parametric", "lambda");
    config.lambda = parse_complex(lambda.value, lambda.line);
  }

  config.validate();
  return config;
}

namespace {

std::string render_complex(const Complex& z) {
  if (z.imag() == 0.0) return format_number(z.real());
  const std::string sign = z.imag() < 0.0 ? "-" : "+";
  return format_number(z.real()) + sign + format_number(std::abs(z.imag())) + "i";
}

}  // namespace

std::string render_scenario(const SchemeConfig& config) {
  std::ostringstream out;
  out << "[scheme]\nkind = " << to_string(config.kind) << "\n";

  auto mode_block = [&out](const char* name, const OpticalMode& mode) {
    out << "\n[" << name << "]\n";
    if (!mode.label.empty()) out << "label = " << mode.label << "\n";
    out << "kappa = " << format_number(mode.kappa) << "\n";
    out << "kappa_ext = " << format_number(mode.kappa_ext) << "\n";
  };
  mode_block("mode.1", config.mode1);
  mode_block("mode.2", config.mode2);
  if (config.mode3) mode_block("mode.3", *config.mode3);

  out << "\n[mech]\ngamma_m = " << format_number(config.mech.gamma_m) << "\n";

  out << "\n[coupling]\n";
  out << "g1 = " << format_number(config.g1.g) << "\n";
  out << "g2 = " << format_number(config.g2.g) << "\n";
  if (config.g3) out << "g3 = " << format_number(config.g3->g) << "\n";

  out << "\n[signal]\n";
  out << "amplitude = " << render_complex(config.signal.amplitude) << "\n";
  out << "delta = " << format_number(config.signal.delta) << "\n";

  if (config.aux_drive) {
    out << "\n[aux_drive]\n";
    out << "amplitude = " << render_complex(config.aux_drive->amplitude) << "\n";
    out << "delta = " << format_number(config.aux_drive->delta) << "\n";
  }
  if (config.kind == SchemeKind::Parametric)
    out << "\n[parametric]\nlambda = " << render_complex(config.lambda) << "\n";

  return out.str();
}

}  // namespace darkline
