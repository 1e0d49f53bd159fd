// scenario.hpp — sectioned key-value scenario files <-> SchemeConfig.
#pragma once

#include <stdexcept>
#include <string>

#include "darkline/model.hpp"

namespace darkline {

/// Scenario text is malformed; the message carries the line number and the
/// offending token.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parses strict sectioned key-value text ([scheme], [mode.1], [mode.2],
/// [mode.3], [mech], [coupling], [signal], [aux_drive], [parametric]).
/// Unknown sections or keys, duplicates, and missing requirements are errors;
/// the returned config is validated.
[[nodiscard]] SchemeConfig parse_scenario(const std::string& text);

/// Canonical renderer; parse_scenario(render_scenario(c)) == c on every field.
[[nodiscard]] std::string render_scenario(const SchemeConfig& config);

}  // namespace darkline
