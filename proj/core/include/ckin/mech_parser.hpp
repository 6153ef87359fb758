#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ckin/error.hpp"
#include "ckin/kinetics.hpp"

namespace ckin {

enum class Severity { Error, Warning };

enum class DiagnosticCode {
  Syntax,
  UndeclaredSpecies,
  UnbalancedReaction,
  MalformedNumber,
  UnsupportedFeature,
  UnsupportedOrder,
  MissingThermo,
  ThermoFormat,
  DuplicateDeclaration,
};

std::string_view to_string(DiagnosticCode code);

struct ParseDiagnostic {
  Severity severity = Severity::Error;
  std::size_t line = 1;  // 1-based
  DiagnosticCode code = DiagnosticCode::Syntax;
  std::string message;

  /// "<line>: error: [Code] message"
  std::string format() const;
};

struct ThermoEntry {
  std::map<std::string, int> composition;
  Nasa7 fit;
  std::size_t line = 1;

  friend bool operator==(const ThermoEntry&, const ThermoEntry&) = default;
};

struct ThermoParseResult {
  std::map<std::string, ThermoEntry> entries;
  std::vector<ParseDiagnostic> diagnostics;
  bool ok() const;
};

struct MechanismParseResult {
  std::optional<Mechanism> mechanism;  // present iff there are no errors
  std::vector<ParseDiagnostic> diagnostics;
  bool ok() const { return mechanism.has_value(); }
};

/// Thrown by the load_* helpers; carries every diagnostic.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::vector<ParseDiagnostic> diagnostics);
  const std::vector<ParseDiagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<ParseDiagnostic> diagnostics_;
};

/// Fixed-column NASA-7 data, with or without surrounding THERMO/END lines.
ThermoParseResult parse_thermo(std::string_view text);

/// Chemkin-subset mechanism: ELEMENTS, SPECIES, optional THERMO, REACTIONS.
/// Species without an in-file THERMO entry take theirs from `external_thermo`.
MechanismParseResult parse_mechanism(
    std::string_view text, const std::map<std::string, ThermoEntry>* external_thermo = nullptr);

/// Writes a mechanism back in the same Chemkin subset.
std::string serialize_mechanism(const Mechanism& m);

std::string read_text_file(const std::filesystem::path& path);

Mechanism load_mechanism(const std::filesystem::path& mechanism_file,
                         const std::optional<std::filesystem::path>& thermo_file = std::nullopt);

}  // namespace ckin
