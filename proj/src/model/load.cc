#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "rroa/model/system_model.h"
#include "rroa/poly/monomial.h"
#include "rroa/poly/parse.h"

namespace rroa {
namespace model {

namespace {

struct Entry {
  std::string key;
  std::string value;
  int line;
  int value_column;  // 1-based column where `value` starts
};

std::string Trim(const std::string& s, std::size_t* lead = nullptr) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    if (lead) *lead = s.size();
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r");
  if (lead) *lead = b;
  return s.substr(b, e - b + 1);
}

double ParseNumber(const Entry& e) {
  const char* begin = e.value.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ModelParseError("expected a number for '" + e.key + "'", e.line,
                          e.value_column);
  }
  return v;
}

int ParseInt(const Entry& e) {
  const char* begin = e.value.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw ModelParseError("expected an integer for '" + e.key + "'", e.line,
                          e.value_column);
  }
  return static_cast<int>(v);
}

// Comma-separated items with their 1-based columns.
std::vector<std::pair<std::string, int>> SplitList(const Entry& e) {
  std::vector<std::pair<std::string, int>> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = e.value.find(',', start);
    const std::string raw = e.value.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t lead = 0;
    const std::string item = Trim(raw, &lead);
    if (item.empty()) {
      throw ModelParseError("empty list item in '" + e.key + "'", e.line,
                            e.value_column + static_cast<int>(start));
    }
    out.emplace_back(item, e.value_column + static_cast<int>(start + lead));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

poly::Polynomial ParsePoly(const Entry& e, const std::vector<std::string>& names) {
  try {
    return poly::ParsePolynomial(e.value, names);
  } catch (const poly::ParseError& err) {
    throw ModelParseError(err.what(), e.line, e.value_column + err.column() - 1);
  }
}

// Keys of the form <prefix><index> (f1, h2, ...), ordered by index.
std::vector<const Entry*> Indexed(const std::vector<Entry>& entries,
                                  const std::string& prefix,
                                  const std::string& section) {
  std::vector<std::pair<int, const Entry*>> found;
  for (const auto& e : entries) {
    if (e.key.size() <= prefix.size() || e.key.compare(0, prefix.size(), prefix) != 0) {
      continue;
    }
    const std::string digits = e.key.substr(prefix.size());
    if (digits.find_first_not_of("0123456789") != std::string::npos) continue;
    found.emplace_back(std::stoi(digits), &e);
  }
  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<const Entry*> out;
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (found[i].first != static_cast<int>(i) + 1) {
      throw ModelParseError("[" + section + "] keys " + prefix +
                                "1, " + prefix + "2, ... must be contiguous",
                            found[i].second->line, 1);
    }
    out.push_back(found[i].second);
  }
  return out;
}

const Entry* Find(const std::vector<Entry>& entries, const std::string& key) {
  for (const auto& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

const Entry& Require(const std::map<std::string, std::vector<Entry>>& sections,
                     const std::string& section, const std::string& key,
                     int last_line) {
  auto it = sections.find(section);
  if (it == sections.end()) {
    throw ModelParseError("missing section [" + section + "]", last_line, 1);
  }
  const Entry* e = Find(it->second, key);
  if (e == nullptr) {
    throw ModelParseError("missing key '" + key + "' in [" + section + "]",
                          last_line, 1);
  }
  return *e;
}

}  // namespace

SystemModel LoadModel(const std::string& text) {
  static const std::map<std::string, std::set<std::string>> kKnown = {
      {"system", {"n", "m"}},
      {"disturbance", {}},
      {"constraint", {}},
      {"seed", {"h"}},
      {"bound", {"R2"}},
      {"cost", {"g"}},
      {"solver",
       {"degrees", "mult_degree", "feasibility_tol", "gap_tol", "eig_tol",
        "max_iterations", "lyapunov_slack", "disturbance_grid"}},
  };
  std::map<std::string, std::vector<Entry>> sections;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    std::size_t lead = 0;
    const std::string t = Trim(line, &lead);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ModelParseError("unterminated section header", lineno,
                              static_cast<int>(lead) + 1);
      }
      current = Trim(t.substr(1, t.size() - 2));
      if (kKnown.count(current) == 0) {
        throw ModelParseError("unknown section [" + current + "]", lineno,
                              static_cast<int>(lead) + 1);
      }
      if (sections.count(current) > 0) {
        throw ModelParseError("duplicate section [" + current + "]", lineno,
                              static_cast<int>(lead) + 1);
      }
      sections[current];
      continue;
    }
    if (current.empty()) {
      throw ModelParseError("entry outside of a section", lineno,
                            static_cast<int>(lead) + 1);
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ModelParseError("expected 'key = value'", lineno,
                            static_cast<int>(lead) + 1);
    }
    Entry e;
    e.key = Trim(line.substr(0, eq));
    std::size_t vlead = 0;
    e.value = Trim(line.substr(eq + 1), &vlead);
    e.line = lineno;
    e.value_column = static_cast<int>(eq + 1 + vlead) + 1;
    if (e.key.empty()) {
      throw ModelParseError("empty key", lineno, static_cast<int>(lead) + 1);
    }
    if (e.value.empty()) {
      throw ModelParseError("empty value for '" + e.key + "'", lineno,
                            static_cast<int>(eq) + 2);
    }
    const auto& known = kKnown.at(current);
    const bool indexed =
        (current == "system" && e.key[0] == 'f') ||
        ((current == "disturbance" || current == "constraint") && e.key[0] == 'h');
    if (known.count(e.key) == 0 && !indexed) {
      throw ModelParseError("unknown key '" + e.key + "' in [" + current + "]",
                            lineno, static_cast<int>(lead) + 1);
    }
    if (Find(sections[current], e.key) != nullptr) {
      throw ModelParseError("duplicate key '" + e.key + "'", lineno,
                            static_cast<int>(lead) + 1);
    }
    sections[current].push_back(std::move(e));
  }
  const int last = std::max(lineno, 1);

  SystemModel model;
  model.n = ParseInt(Require(sections, "system", "n", last));
  model.m = ParseInt(Require(sections, "system", "m", last));
  if (model.n < 1 || model.m < 0) {
    const Entry& e = Require(sections, "system", "n", last);
    throw ModelParseError("need n >= 1 and m >= 0", e.line, e.value_column);
  }
  model.names = poly::DefaultNames(model.n, model.m);
  const std::vector<std::string> xnames(model.names.begin(),
                                        model.names.begin() + model.n);
  const std::vector<std::string> dnames(model.names.begin() + model.n,
                                        model.names.end());

  const auto fs = Indexed(sections["system"], "f", "system");
  if (static_cast<int>(fs.size()) != model.n) {
    throw ModelParseError("[system] needs f1..f" + std::to_string(model.n), last, 1);
  }
  for (const Entry* e : fs) model.f.push_back(ParsePoly(*e, model.names));

  model.D.nvars = model.m;
  if (sections.count("disturbance") > 0) {
    for (const Entry* e : Indexed(sections["disturbance"], "h", "disturbance")) {
      model.D.constraints.push_back({ParsePoly(*e, dnames), 0.0, false});
    }
  }
  model.X.nvars = model.n;
  if (sections.count("constraint") == 0) {
    throw ModelParseError("missing section [constraint]", last, 1);
  }
  for (const Entry* e : Indexed(sections["constraint"], "h", "constraint")) {
    model.X.constraints.push_back({ParsePoly(*e, xnames), 1.0, true});
  }
  model.h_inf = ParsePoly(Require(sections, "seed", "h", last), xnames);
  model.R2 = ParseNumber(Require(sections, "bound", "R2", last));
  model.g = ParsePoly(Require(sections, "cost", "g", last), xnames);

  if (sections.count("solver") > 0) {
    auto& sd = model.solver;
    for (const auto& e : sections["solver"]) {
      if (e.key == "degrees") {
        for (const auto& [item, col] : SplitList(e)) {
          Entry sub{e.key, item, e.line, col};
          const int k = ParseInt(sub);
          if (k < 2) throw ModelParseError("degree must be >= 2", e.line, col);
          sd.degrees.push_back(k);
        }
      } else if (e.key == "mult_degree") {
        for (const auto& [item, col] : SplitList(e)) {
          const auto colon = item.find(':');
          if (colon == std::string::npos) {
            throw ModelParseError("expected 'k:degree' pairs", e.line, col);
          }
          Entry k{e.key, Trim(item.substr(0, colon)), e.line, col};
          Entry v{e.key, Trim(item.substr(colon + 1)), e.line,
                  col + static_cast<int>(colon) + 1};
          const int deg = ParseInt(v);
          if (deg < 0 || deg % 2 != 0) {
            throw ModelParseError("multiplier degree must be even and >= 0",
                                  e.line, v.value_column);
          }
          sd.mult_degree[ParseInt(k)] = deg;
        }
      } else if (e.key == "feasibility_tol") {
        sd.feasibility_tol = ParseNumber(e);
      } else if (e.key == "gap_tol") {
        sd.gap_tol = ParseNumber(e);
      } else if (e.key == "eig_tol") {
        sd.eig_tol = ParseNumber(e);
      } else if (e.key == "max_iterations") {
        sd.max_iterations = ParseInt(e);
      } else if (e.key == "lyapunov_slack") {
        sd.lyapunov_slack = ParseNumber(e);
      } else if (e.key == "disturbance_grid") {
        sd.disturbance_grid = ParseInt(e);
        if (sd.disturbance_grid < 1) {
          throw ModelParseError("disturbance_grid must be >= 1", e.line,
                                e.value_column);
        }
      }
    }
  }
  model.source_hash = Fnv1aHex(text);
  Validate(model);
  return model;
}

SystemModel LoadModelFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return LoadModel(ss.str());
}

}  // namespace model
}  // namespace rroa
