#include "ckin/mech_parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace ckin {

std::string_view to_string(DiagnosticCode code) {
  switch (code) {
    case DiagnosticCode::Syntax: return "Syntax";
    case DiagnosticCode::UndeclaredSpecies: return "UndeclaredSpecies";
    case DiagnosticCode::UnbalancedReaction: return "UnbalancedReaction";
    case DiagnosticCode::MalformedNumber: return "MalformedNumber";
    case DiagnosticCode::UnsupportedFeature: return "UnsupportedFeature";
    case DiagnosticCode::UnsupportedOrder: return "UnsupportedOrder";
    case DiagnosticCode::MissingThermo: return "MissingThermo";
    case DiagnosticCode::ThermoFormat: return "ThermoFormat";
    case DiagnosticCode::DuplicateDeclaration: return "DuplicateDeclaration";
  }
  return "Unknown";
}

std::string ParseDiagnostic::format() const {
  return std::to_string(line) + ": " + (severity == Severity::Error ? "error" : "warning") +
         ": [" + std::string(to_string(code)) + "] " + message;
}

bool ThermoParseResult::ok() const {
  return std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const auto& d) { return d.severity == Severity::Error; });
}

namespace {

std::string summarize(const std::string& source, const std::vector<ParseDiagnostic>& diags) {
  std::string msg = source + ": parse failed";
  for (const auto& d : diags) {
    if (d.severity == Severity::Error) msg += "\n  " + source + ":" + d.format();
  }
  return msg;
}

}  // namespace

ParseError::ParseError(std::string source, std::vector<ParseDiagnostic> diagnostics)
    : Error(summarize(source, diagnostics)), diagnostics_(std::move(diagnostics)) {}

namespace {

struct Line {
  std::size_t number;
  std::string raw;   // comment stripped, trailing whitespace kept for columns
  std::string text;  // comment stripped and trimmed
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string upper(std::string_view s) {
  std::string u(s);
  for (auto& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return u;
}

std::vector<std::string> tokens(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string raw(text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos));
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (const auto bang = raw.find('!'); bang != std::string::npos) raw.erase(bang);
    lines.push_back({number, raw, trim(raw)});
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

std::optional<double> parse_number(std::string_view s) {
  std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  for (auto& c : t) {
    if (c == 'd' || c == 'D') c = 'E';
  }
  std::size_t start = (t[0] == '+') ? 1 : 0;
  double v = 0.0;
  const auto res = std::from_chars(t.data() + start, t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::string column(const std::string& raw, std::size_t begin, std::size_t width) {
  if (begin >= raw.size()) return {};
  return raw.substr(begin, std::min(width, raw.size() - begin));
}

char marker(const std::string& raw) { return raw.size() >= 80 ? raw[79] : ' '; }

bool is_keyword(const std::string& token_upper, std::string_view full, std::size_t min_len) {
  return token_upper.size() >= min_len && full.substr(0, token_upper.size()) == token_upper &&
         token_upper.size() <= full.size();
}

bool is_end(const Line& l) { return upper(l.text) == "END"; }

class Diagnostics {
 public:
  void error(std::size_t line, DiagnosticCode code, std::string msg) {
    list.push_back({Severity::Error, line, code, std::move(msg)});
  }
  void warning(std::size_t line, DiagnosticCode code, std::string msg) {
    list.push_back({Severity::Warning, line, code, std::move(msg)});
  }
  bool has_errors() const {
    return std::any_of(list.begin(), list.end(),
                       [](const auto& d) { return d.severity == Severity::Error; });
  }
  std::vector<ParseDiagnostic> list;
};

// Parses the body of a thermo section (no THERMO/END lines) into `out`.
void parse_thermo_body(const std::vector<Line>& lines, std::map<std::string, ThermoEntry>& out,
                       Diagnostics& diag) {
  std::optional<std::array<double, 3>> global;
  std::size_t k = 0;
  while (k < lines.size()) {
    const Line& first = lines[k];
    if (first.text.empty()) {
      ++k;
      continue;
    }
    // Optional global range line: three numbers and nothing else.
    const auto toks = tokens(first.text);
    if (out.empty() && !global && toks.size() == 3 &&
        std::all_of(toks.begin(), toks.end(), [](const auto& t) { return parse_number(t); })) {
      global = std::array<double, 3>{*parse_number(toks[0]), *parse_number(toks[1]),
                                     *parse_number(toks[2])};
      ++k;
      continue;
    }

    // Collect the three continuation lines.
    std::vector<const Line*> group{&first};
    std::size_t j = k + 1;
    while (group.size() < 4 && j < lines.size()) {
      const Line& next = lines[j];
      if (next.text.empty()) {
        ++j;
        continue;
      }
      if (marker(next.raw) == '1') break;
      group.push_back(&next);
      ++j;
    }
    if (group.size() < 4) {
      diag.error(first.number, DiagnosticCode::ThermoFormat,
                 "thermo entry '" + (toks.empty() ? std::string() : toks[0]) + "' has " +
                     std::to_string(group.size()) + " lines, expected 4");
      k = j;
      continue;
    }
    k = j;

    bool entry_ok = true;
    for (std::size_t g = 0; g < 4; ++g) {
      const char m = marker(group[g]->raw);
      if (m != ' ' && m != static_cast<char>('1' + g)) {
        diag.error(group[g]->number, DiagnosticCode::ThermoFormat,
                   std::string("column 80 holds '") + m + "', expected '" +
                       static_cast<char>('1' + g) + "'");
        entry_ok = false;
      }
    }
    if (!entry_ok) continue;

    const std::string& l1 = first.raw;
    const auto name_tokens = tokens(column(l1, 0, 18));
    if (name_tokens.empty()) {
      diag.error(first.number, DiagnosticCode::ThermoFormat, "missing species name in columns 1-18");
      continue;
    }
    ThermoEntry entry;
    entry.line = first.number;
    const std::string name = name_tokens[0];

    for (std::size_t slot = 0; slot < 4; ++slot) {
      const std::string field = column(l1, 24 + 5 * slot, 5);
      const std::string el = trim(column(field, 0, 2));
      const std::string count = trim(column(field, 2, 3));
      if (el.empty() && count.empty()) continue;
      const auto n = parse_number(count);
      if (el.empty() || !n || *n < 0.0 || std::floor(*n) != *n) {
        diag.error(first.number, DiagnosticCode::ThermoFormat,
                   "malformed element field '" + field + "' in columns " +
                       std::to_string(25 + 5 * slot) + "-" + std::to_string(29 + 5 * slot));
        entry_ok = false;
        continue;
      }
      if (*n > 0.0) entry.composition[upper(el)] += static_cast<int>(*n);
    }

    const auto temp = [&](std::size_t begin, std::size_t width, std::size_t which) {
      const std::string f = column(l1, begin, width);
      if (trim(f).empty() && global) return std::optional<double>((*global)[which]);
      const auto v = parse_number(f);
      if (!v) {
        diag.error(first.number, DiagnosticCode::MalformedNumber,
                   "temperature field '" + trim(f) + "' in columns " + std::to_string(begin + 1) +
                       "-" + std::to_string(begin + width) + " is not a number");
      }
      return v;
    };
    const auto t_low = temp(45, 10, 0);
    const auto t_high = temp(55, 10, 2);
    const auto t_common = temp(65, 8, 1);
    if (!t_low || !t_high || !t_common) continue;
    entry.fit.t_low = *t_low;
    entry.fit.t_high = *t_high;
    entry.fit.t_common = *t_common;
    if (!(entry.fit.t_low < entry.fit.t_common && entry.fit.t_common < entry.fit.t_high)) {
      diag.error(first.number, DiagnosticCode::ThermoFormat,
                 "temperature ranges of '" + name + "' are not ordered low < common < high");
      continue;
    }

    std::array<double, 14> c{};
    std::size_t idx = 0;
    for (std::size_t g = 1; g < 4 && entry_ok; ++g) {
      const std::size_t fields = g == 3 ? 4 : 5;
      for (std::size_t f = 0; f < fields; ++f) {
        const std::string text = column(group[g]->raw, 15 * f, 15);
        const auto v = parse_number(text);
        if (!v) {
          diag.error(group[g]->number, DiagnosticCode::ThermoFormat,
                     "coefficient field " + std::to_string(f + 1) + " (columns " +
                         std::to_string(15 * f + 1) + "-" + std::to_string(15 * f + 15) +
                         ") is '" + trim(text) + "', not a number");
          entry_ok = false;
          break;
        }
        c[idx++] = *v;
      }
    }
    if (!entry_ok) continue;
    std::copy(c.begin(), c.begin() + 7, entry.fit.high.begin());
    std::copy(c.begin() + 7, c.end(), entry.fit.low.begin());
    if (out.contains(name)) {
      diag.warning(first.number, DiagnosticCode::DuplicateDeclaration,
                   "second thermo entry for '" + name + "' ignored");
      continue;
    }
    out.emplace(name, std::move(entry));
  }
}

const std::set<std::string>& unsupported_keywords() {
  static const std::set<std::string> k{"LOW", "TROE", "SRI", "PLOG", "FORD", "HIGH",
                                       "CHEB", "RORD", "LT", "RLT", "JAN", "FIT1",
                                       "TDEP", "EXCI", "MOME", "XSMI", "UNITS", "TCHEB",
                                       "PCHEB"};
  return k;
}

struct PendingReaction {
  Reaction reaction;
  std::size_t line;
  bool has_rev = false;
};

class MechanismReader {
 public:
  explicit MechanismReader(const std::map<std::string, ThermoEntry>* external)
      : external_(external) {}

  MechanismParseResult run(std::string_view text) {
    const auto lines = split_lines(text);
    std::size_t k = 0;
    while (k < lines.size()) {
      const Line& l = lines[k];
      if (l.text.empty()) {
        ++k;
        continue;
      }
      const auto toks = tokens(l.text);
      const std::string head = upper(toks[0]);
      if (is_keyword(head, "ELEMENTS", 4)) {
        k = read_list(lines, k, elements_, elements_line_, true);
      } else if (is_keyword(head, "SPECIES", 4)) {
        k = read_list(lines, k, species_, species_line_, false);
      } else if (is_keyword(head, "THERMO", 5)) {
        k = read_thermo(lines, k);
      } else if (is_keyword(head, "REACTIONS", 4)) {
        k = read_reactions(lines, k);
      } else {
        diag_.error(l.number, DiagnosticCode::Syntax,
                    "unexpected '" + toks[0] + "' outside of any section");
        ++k;
      }
    }
    return finish();
  }

 private:
  std::size_t read_list(const std::vector<Line>& lines, std::size_t k,
                        std::vector<std::string>& out, std::map<std::string, std::size_t>& where,
                        bool uppercase) {
    auto toks = tokens(lines[k].text);
    toks.erase(toks.begin());
    std::size_t line_no = lines[k].number;
    while (true) {
      for (const auto& t : toks) {
        if (upper(t) == "END") return k + 1;
        const std::string name = uppercase ? upper(t) : t;
        if (!uppercase && upper(name) == "M") {
          diag_.error(line_no, DiagnosticCode::Syntax, "'M' is reserved for third bodies");
          continue;
        }
        if (where.contains(name)) {
          diag_.error(line_no, DiagnosticCode::DuplicateDeclaration,
                      "'" + name + "' declared twice (first on line " +
                          std::to_string(where[name]) + ")");
          continue;
        }
        where[name] = line_no;
        out.push_back(name);
      }
      ++k;
      if (k >= lines.size()) {
        diag_.warning(lines.back().number, DiagnosticCode::Syntax, "missing END");
        return k;
      }
      toks = tokens(lines[k].text);
      line_no = lines[k].number;
    }
  }

  std::size_t read_thermo(const std::vector<Line>& lines, std::size_t k) {
    std::vector<Line> body;
    ++k;
    while (k < lines.size() && !is_end(lines[k])) body.push_back(lines[k++]);
    if (k >= lines.size()) diag_.warning(lines.back().number, DiagnosticCode::Syntax, "missing END");
    parse_thermo_body(body, thermo_, diag_);
    return k + 1;
  }

  std::size_t read_reactions(const std::vector<Line>& lines, std::size_t k) {
    const auto toks = tokens(lines[k].text);
    for (std::size_t t = 1; t < toks.size(); ++t) {
      const std::string u = upper(toks[t]);
      if (u == "CAL/MOLE" || u == "MOLES") continue;
      diag_.error(lines[k].number, DiagnosticCode::UnsupportedFeature,
                  "reaction units '" + toks[t] + "' are not supported (use CAL/MOLE MOLES)");
    }
    ++k;
    for (; k < lines.size(); ++k) {
      const Line& l = lines[k];
      if (l.text.empty()) continue;
      if (is_end(l)) return k + 1;
      if (l.text.find('=') != std::string::npos) {
        read_reaction_line(l);
      } else {
        read_auxiliary_line(l);
      }
    }
    diag_.warning(lines.back().number, DiagnosticCode::Syntax, "missing END");
    return k;
  }

  std::optional<Stoichiometry> read_side(const std::string& side, std::size_t line,
                                         bool& third_body) {
    Stoichiometry s;
    third_body = false;
    std::size_t pos = 0;
    bool ok = true;
    while (pos <= side.size()) {
      const auto plus = side.find('+', pos);
      const std::string piece =
          side.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos);
      pos = plus == std::string::npos ? side.size() + 1 : plus + 1;
      if (piece.empty()) {
        diag_.error(line, DiagnosticCode::Syntax, "empty term in '" + side + "'");
        ok = false;
        continue;
      }
      if (upper(piece) == "M") {
        third_body = true;
        continue;
      }
      std::string name = piece;
      int nu = 1;
      if (!species_line_.contains(name)) {
        std::size_t d = 0;
        while (d < piece.size() && std::isdigit(static_cast<unsigned char>(piece[d]))) ++d;
        if (d < piece.size() && piece[d] == '.') {
          diag_.error(line, DiagnosticCode::UnsupportedFeature,
                      "non-integer stoichiometric coefficient in '" + piece + "'");
          ok = false;
          continue;
        }
        if (d > 0) {
          nu = std::stoi(piece.substr(0, d));
          name = piece.substr(d);
        }
      }
      if (!species_line_.contains(name)) {
        diag_.error(line, DiagnosticCode::UndeclaredSpecies,
                    "species '" + name + "' is not declared in SPECIES");
        ok = false;
        continue;
      }
      if (nu <= 0) {
        diag_.error(line, DiagnosticCode::Syntax, "zero coefficient for '" + name + "'");
        ok = false;
        continue;
      }
      s[name] += nu;
    }
    if (!ok) return std::nullopt;
    return s;
  }

  void read_reaction_line(const Line& l) {
    pending_.reset();
    const auto toks = tokens(l.text);
    if (toks.size() < 4) {
      diag_.error(l.number, DiagnosticCode::Syntax,
                  "reaction line needs an equation followed by A, b and E_a");
      return;
    }
    std::array<double, 3> params{};
    for (std::size_t p = 0; p < 3; ++p) {
      const std::string& t = toks[toks.size() - 3 + p];
      const auto v = parse_number(t);
      if (!v) {
        diag_.error(l.number, DiagnosticCode::MalformedNumber,
                    "Arrhenius parameter '" + t + "' is not a number");
        return;
      }
      params[p] = *v;
    }
    std::string eq;
    for (std::size_t t = 0; t + 3 < toks.size(); ++t) eq += toks[t];

    if (eq.find("(+") != std::string::npos) {
      diag_.error(l.number, DiagnosticCode::UnsupportedFeature,
                  "pressure-dependent (falloff) reaction '" + eq + "' is not supported");
      return;
    }
    std::string arrow;
    ReverseMode mode = ReverseMode::FromEquilibrium;
    std::size_t at = eq.find("<=>");
    if (at != std::string::npos) {
      arrow = "<=>";
    } else if ((at = eq.find("=>")) != std::string::npos) {
      arrow = "=>";
      mode = ReverseMode::None;
    } else if ((at = eq.find('=')) != std::string::npos) {
      arrow = "=";
    }
    if (eq.find('=', at + arrow.size()) != std::string::npos) {
      diag_.error(l.number, DiagnosticCode::Syntax, "more than one '=' in '" + eq + "'");
      return;
    }
    bool m_left = false, m_right = false;
    auto reactants = read_side(eq.substr(0, at), l.number, m_left);
    auto products = read_side(eq.substr(at + arrow.size()), l.number, m_right);
    if (!reactants || !products) return;
    if (m_left != m_right) {
      diag_.error(l.number, DiagnosticCode::Syntax, "'+M' must appear on both sides");
      return;
    }

    PendingReaction pr;
    pr.line = l.number;
    pr.reaction.reactants = std::move(*reactants);
    pr.reaction.products = std::move(*products);
    pr.reaction.forward = {params[0], params[1], params[2]};
    pr.reaction.reverse_mode = mode;
    if (m_left) pr.reaction.third_body = ThirdBody{};
    if (!(params[0] > 0.0)) {
      diag_.error(l.number, DiagnosticCode::MalformedNumber,
                  "pre-exponential factor must be positive");
      return;
    }
    reactions_.push_back(std::move(pr));
    pending_ = reactions_.size() - 1;
  }

  void read_auxiliary_line(const Line& l) {
    static const std::regex slash_item(R"(([^\s/]+)\s*/([^/]*)/)");
    std::string rest;
    std::size_t last = 0;
    std::vector<std::pair<std::string, std::string>> items;
    for (auto it = std::sregex_iterator(l.text.begin(), l.text.end(), slash_item);
         it != std::sregex_iterator(); ++it) {
      rest += l.text.substr(last, static_cast<std::size_t>(it->position()) - last) + " ";
      last = static_cast<std::size_t>(it->position() + it->length());
      items.emplace_back((*it)[1].str(), (*it)[2].str());
    }
    rest += l.text.substr(last);

    std::vector<std::string> stray;
    for (const auto& t : tokens(rest)) {
      const std::string u = upper(t);
      if (u == "DUP" || u == "DUPLICATE") {
        if (!pending_) {
          diag_.error(l.number, DiagnosticCode::Syntax, "DUPLICATE without a preceding reaction");
        } else {
          reactions_[*pending_].reaction.duplicate = true;
        }
      } else if (unsupported_keywords().contains(u)) {
        diag_.error(l.number, DiagnosticCode::UnsupportedFeature,
                    "auxiliary keyword '" + u + "' is not supported");
      } else {
        stray.push_back(t);
      }
    }
    if (!stray.empty()) {
      std::string joined;
      for (const auto& t : stray) joined += (joined.empty() ? "" : " ") + t;
      diag_.error(l.number, DiagnosticCode::Syntax,
                  "expected a reaction equation (with '=') or auxiliary data, found '" + joined +
                      "'");
    }

    for (const auto& [key, value] : items) {
      const std::string u = upper(key);
      if (unsupported_keywords().contains(u)) {
        diag_.error(l.number, DiagnosticCode::UnsupportedFeature,
                    "auxiliary keyword '" + u + "' is not supported");
        continue;
      }
      if (!pending_) {
        diag_.error(l.number, DiagnosticCode::Syntax,
                    "auxiliary data '" + key + "' without a preceding reaction");
        continue;
      }
      auto& pr = reactions_[*pending_];
      if (u == "REV") {
        const auto nums = tokens(value);
        std::vector<double> v;
        for (const auto& n : nums) {
          const auto x = parse_number(n);
          if (!x) {
            diag_.error(l.number, DiagnosticCode::MalformedNumber,
                        "REV parameter '" + n + "' is not a number");
            break;
          }
          v.push_back(*x);
        }
        if (v.size() != nums.size()) continue;
        if (v.size() != 3) {
          diag_.error(l.number, DiagnosticCode::Syntax, "REV needs exactly three parameters");
          continue;
        }
        if (pr.reaction.reverse_mode == ReverseMode::None) {
          diag_.error(l.number, DiagnosticCode::Syntax, "REV given for an irreversible reaction");
          continue;
        }
        if (!(v[0] > 0.0)) {
          diag_.error(l.number, DiagnosticCode::MalformedNumber,
                      "REV pre-exponential factor must be positive");
          continue;
        }
        pr.reaction.reverse_mode = ReverseMode::Explicit;
        pr.reaction.reverse = Arrhenius{v[0], v[1], v[2]};
        continue;
      }
      // Third-body efficiency.
      if (!species_line_.contains(key)) {
        diag_.error(l.number, DiagnosticCode::UndeclaredSpecies,
                    "efficiency given for undeclared species '" + key + "'");
        continue;
      }
      if (!pr.reaction.third_body) {
        diag_.error(l.number, DiagnosticCode::Syntax,
                    "efficiency for '" + key + "' on a reaction without '+M'");
        continue;
      }
      const auto x = parse_number(value);
      if (!x || *x < 0.0) {
        diag_.error(l.number, DiagnosticCode::MalformedNumber,
                    "efficiency '" + trim(value) + "' for '" + key + "' is not a nonnegative number");
        continue;
      }
      pr.reaction.third_body->efficiencies[key] = *x;
    }
  }

  MechanismParseResult finish() {
    const std::set<std::string> element_set(elements_.begin(), elements_.end());
    std::vector<Species> species;
    for (const auto& name : species_) {
      Species s{name, {}, std::nullopt};
      const ThermoEntry* entry = nullptr;
      if (const auto it = thermo_.find(name); it != thermo_.end()) {
        entry = &it->second;
      } else if (external_ != nullptr) {
        if (const auto jt = external_->find(name); jt != external_->end()) entry = &jt->second;
      }
      if (entry != nullptr) {
        s.composition = entry->composition;
        s.thermo = entry->fit;
        for (const auto& [el, n] : s.composition) {
          if (!element_set.contains(el)) {
            diag_.error(entry->line, DiagnosticCode::ThermoFormat,
                        "species '" + name + "' contains undeclared element '" + el + "'");
          }
        }
      } else {
        diag_.warning(species_line_.at(name), DiagnosticCode::MissingThermo,
                      "no thermo data for species '" + name + "'");
      }
      species.push_back(std::move(s));
    }

    std::map<std::string, const Species*> by_name;
    for (const auto& s : species) by_name[s.name] = &s;

    std::vector<Reaction> reactions;
    for (const auto& pr : reactions_) {
      const Reaction& r = pr.reaction;
      const std::string eq = r.equation();
      bool ok = true;
      if (r.forward_order() > kMaxMolecularity ||
          (r.reversible() && r.reverse_order() > kMaxMolecularity)) {
        diag_.error(pr.line, DiagnosticCode::UnsupportedOrder,
                    "reaction " + eq + " has molecularity above " +
                        std::to_string(kMaxMolecularity));
        ok = false;
      }
      std::map<std::string, int> balance;
      bool known = true;
      for (const auto* side : {&r.reactants, &r.products}) {
        const int sign = side == &r.products ? 1 : -1;
        for (const auto& [name, nu] : *side) {
          const Species* s = by_name.at(name);
          if (s->composition.empty()) known = false;
          for (const auto& [el, n] : s->composition) balance[el] += sign * nu * n;
          if (r.reverse_mode == ReverseMode::FromEquilibrium && !s->thermo) {
            diag_.error(pr.line, DiagnosticCode::MissingThermo,
                        "reversible reaction " + eq + " needs thermo data for '" + name + "'");
            ok = false;
          }
        }
      }
      if (known) {
        for (const auto& [el, b] : balance) {
          if (b != 0) {
            diag_.error(pr.line, DiagnosticCode::UnbalancedReaction,
                        "reaction " + eq + " is unbalanced in " + el + " by " +
                            std::to_string(b));
            ok = false;
          }
        }
      } else {
        diag_.warning(pr.line, DiagnosticCode::MissingThermo,
                      "element balance of " + eq + " not checked (composition unknown)");
      }
      if (ok) reactions.push_back(r);
    }

    MechanismParseResult result;
    if (!diag_.has_errors()) {
      try {
        result.mechanism.emplace(elements_, std::move(species), std::move(reactions));
      } catch (const Error& e) {
        diag_.error(1, DiagnosticCode::Syntax, e.what());
      }
    }
    std::stable_sort(diag_.list.begin(), diag_.list.end(),
                     [](const auto& a, const auto& b) { return a.line < b.line; });
    result.diagnostics = std::move(diag_.list);
    return result;
  }

  const std::map<std::string, ThermoEntry>* external_;
  Diagnostics diag_;
  std::vector<std::string> elements_;
  std::map<std::string, std::size_t> elements_line_;
  std::vector<std::string> species_;
  std::map<std::string, std::size_t> species_line_;
  std::map<std::string, ThermoEntry> thermo_;
  std::vector<PendingReaction> reactions_;
  std::optional<std::size_t> pending_;
};

}  // namespace

ThermoParseResult parse_thermo(std::string_view text) {
  auto lines = split_lines(text);
  std::vector<Line> body;
  for (const auto& l : lines) {
    const std::string head = l.text.empty() ? std::string() : upper(tokens(l.text)[0]);
    if (is_keyword(head, "THERMO", 5) || head == "END") continue;
    body.push_back(l);
  }
  Diagnostics diag;
  ThermoParseResult result;
  parse_thermo_body(body, result.entries, diag);
  result.diagnostics = std::move(diag.list);
  return result;
}

MechanismParseResult parse_mechanism(std::string_view text,
                                     const std::map<std::string, ThermoEntry>* external_thermo) {
  return MechanismReader(external_thermo).run(text);
}

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fixed_coeff(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%15.8E", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string serialize_mechanism(const Mechanism& m) {
  std::ostringstream os;
  os << "ELEMENTS\n";
  for (const auto& e : m.elements()) os << e << ' ';
  os << "\nEND\nSPECIES\n";
  for (const auto& s : m.species()) os << s.name << '\n';
  os << "END\n";

  os << "THERMO\n";
  for (const auto& s : m.species()) {
    if (!s.thermo) continue;
    std::string comp;
    for (const auto& [el, n] : s.composition) {
      char field[8];
      std::snprintf(field, sizeof(field), "%-2s%3d", el.c_str(), n);
      comp += field;
    }
    char temps[40];
    std::snprintf(temps, sizeof(temps), "%10.3f%10.3f%8.2f", s.thermo->t_low, s.thermo->t_high,
                  s.thermo->t_common);
    std::string l1 = pad(pad(s.name, 24) + pad(comp, 20).substr(0, 20) + "G" + temps, 79) + "1";
    const auto& h = s.thermo->high;
    const auto& lo = s.thermo->low;
    std::string l2, l3, l4;
    for (int i = 0; i < 5; ++i) l2 += fixed_coeff(h[i]);
    l3 = fixed_coeff(h[5]) + fixed_coeff(h[6]) + fixed_coeff(lo[0]) + fixed_coeff(lo[1]) +
         fixed_coeff(lo[2]);
    for (int i = 3; i < 7; ++i) l4 += fixed_coeff(lo[i]);
    os << l1 << '\n'
       << pad(l2, 79) << "2\n"
       << pad(l3, 79) << "3\n"
       << pad(l4, 79) << "4\n";
  }
  os << "END\n";

  os << "REACTIONS CAL/MOLE MOLES\n";
  for (const auto& r : m.reactions()) {
    os << pad(r.equation(), 32) << ' ' << shortest(r.forward.pre_exponential) << ' '
       << shortest(r.forward.temperature_exponent) << ' '
       << shortest(r.forward.activation_energy) << '\n';
    if (r.third_body && !r.third_body->efficiencies.empty()) {
      std::string effs;
      for (const auto& [name, e] : r.third_body->efficiencies) {
        effs += name + "/" + shortest(e) + "/ ";
      }
      os << trim(effs) << '\n';
    }
    if (r.reverse) {
      os << "REV / " << shortest(r.reverse->pre_exponential) << ' '
         << shortest(r.reverse->temperature_exponent) << ' '
         << shortest(r.reverse->activation_energy) << " /\n";
    }
    if (r.duplicate) os << "DUPLICATE\n";
  }
  os << "END\n";
  return os.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Mechanism load_mechanism(const std::filesystem::path& mechanism_file,
                         const std::optional<std::filesystem::path>& thermo_file) {
  std::map<std::string, ThermoEntry> external;
  if (thermo_file) {
    auto th = parse_thermo(read_text_file(*thermo_file));
    if (!th.ok()) throw ParseError(thermo_file->string(), std::move(th.diagnostics));
    external = std::move(th.entries);
  }
  auto res = parse_mechanism(read_text_file(mechanism_file), thermo_file ? &external : nullptr);
  if (!res.ok()) throw ParseError(mechanism_file.string(), std::move(res.diagnostics));
  return std::move(*res.mechanism);
}

}  // namespace ckin
