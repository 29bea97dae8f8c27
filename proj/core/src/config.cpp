#include "subergo/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace subergo::cfg {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
      return false;
  return true;
}

// Cuts an end-of-line comment, respecting quoted strings.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool parse_scalar(const std::string& text, json& out) {
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    std::string v;
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
      if (text[i] == '\\' && i + 2 < text.size()) {
        ++i;
        v += text[i];
      } else if (text[i] == '"') {
        return false;  // bare quote inside the literal
      } else {
        v += text[i];
      }
    }
    out = v;
    return true;
  }
  if (text == "true") {
    out = true;
    return true;
  }
  if (text == "false") {
    out = false;
    return true;
  }
  if (text.empty()) return false;
  bool integral = true;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (i == 0 && (c == '+' || c == '-')) continue;
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      integral = false;
      break;
    }
  }
  if (integral) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (errno == 0 && end && *end == '\0') {
      out = static_cast<std::int64_t>(v);
      return true;
    }
  }
  char* end = nullptr;
  const double d = std::strtod(text.c_str(), &end);
  if (end && *end == '\0' && end != text.c_str()) {
    out = d;
    return true;
  }
  return false;
}

// Splits a one-line [a, b, c] body on top-level commas.
bool parse_array(const std::string& text, json& out) {
  out = json::array();
  const std::string inner = trim(text.substr(1, text.size() - 2));
  if (inner.empty()) return true;
  std::vector<std::string> parts;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    const char c = inner[i];
    if (c == '"' && (i == 0 || inner[i - 1] != '\\')) quoted = !quoted;
    if (c == ',' && !quoted) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  for (const std::string& p : parts) {
    json v;
    if (!parse_scalar(trim(p), v)) return false;
    out.push_back(v);
  }
  return true;
}

bool is_number(const json& j) {
  return j.is_number_integer() || j.is_number_unsigned() || j.is_number_float();
}

const json* find(const json& doc, const char* section, const char* key) {
  auto s = doc.find(section);
  if (s == doc.end() || !s->is_object()) return nullptr;
  auto k = s->find(key);
  if (k == s->end()) return nullptr;
  return &*k;
}

struct Checker {
  const json& doc;
  std::vector<std::string> errors;

  void fail(const std::string& field, const std::string& why) {
    errors.push_back(field + ": " + why);
  }

  const json* want(const char* sec, const char* key, const char* why) {
    const json* j = find(doc, sec, key);
    if (!j) fail(std::string(sec) + "." + key, why);
    return j;
  }

  // nullptr when absent, error (and nullptr) when present but not numeric
  const json* number_opt(const char* sec, const char* key) {
    const json* j = find(doc, sec, key);
    if (!j) return nullptr;
    if (!is_number(*j)) {
      fail(std::string(sec) + "." + key, "expected a number");
      return nullptr;
    }
    return j;
  }

  const json* number_req(const char* sec, const char* key) {
    const json* j = want(sec, key, "required");
    if (!j) return nullptr;
    if (!is_number(*j)) {
      fail(std::string(sec) + "." + key, "expected a number");
      return nullptr;
    }
    return j;
  }

  bool check_range(const char* sec, const char* key, const json* j, bool ok,
                   const char* why) {
    if (j && !ok) {
      fail(std::string(sec) + "." + key, why);
      return false;
    }
    return j != nullptr;
  }

  std::string enum_req(const char* sec, const char* key,
                       std::initializer_list<const char*> allowed) {
    const json* j = want(sec, key, "required");
    if (!j) return "";
    if (!j->is_string()) {
      fail(std::string(sec) + "." + key, "expected a string");
      return "";
    }
    const std::string v = j->get<std::string>();
    for (const char* a : allowed)
      if (v == a) return v;
    std::string list;
    for (const char* a : allowed) {
      if (!list.empty()) list += " | ";
      list += a;
    }
    fail(std::string(sec) + "." + key, "must be one of: " + list);
    return "";
  }
};

std::vector<std::string> validate(const json& doc) {
  Checker c{doc, {}};
  if (!doc.is_object()) {
    c.errors.push_back("config: expected an object with sections");
    return c.errors;
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& k = it.key();
    if (k != "model" && k != "action" && k != "numeric" && k != "output")
      c.fail(k, "unknown section");
    else if (!it.value().is_object())
      c.fail(k, "expected a section (table of keys)");
  }
  if (!doc.contains("model")) c.fail("model", "section required");
  if (!doc.contains("action")) c.fail("action", "section required");
  if (!doc.contains("numeric")) c.fail("numeric", "section required");

  const std::string model =
      doc.contains("model") && doc["model"].is_object()
          ? c.enum_req("model", "kind", {"jump", "langevin", "cpou"})
          : "";
  if (model == "jump") {
    const std::string w =
        c.enum_req("model", "weights", {"geometric", "power"});
    const json* wp = c.number_req("model", "weight_param");
    if (w == "geometric")
      c.check_range("model", "weight_param", wp,
                    wp && wp->get<double>() > 0.0 && wp->get<double>() < 1.0,
                    "geometric weight needs a ratio in (0, 1)");
    if (w == "power")
      c.check_range("model", "weight_param", wp, wp && wp->get<double>() > 1.0,
                    "power weight needs an exponent > 1");
    const std::string r =
        c.enum_req("model", "rates", {"constant", "geometric", "power"});
    const json* rc = c.number_req("model", "rate_c");
    c.check_range("model", "rate_c", rc, rc && rc->get<double>() > 0.0,
                  "must be positive");
    if (r == "geometric") {
      const json* rp = c.number_req("model", "rate_param");
      c.check_range("model", "rate_param", rp,
                    rp && rp->get<double>() > 0.0 && rp->get<double>() < 1.0,
                    "geometric rate needs a ratio in (0, 1)");
    } else if (r == "power") {
      const json* rp = c.number_req("model", "rate_param");
      c.check_range("model", "rate_param", rp, rp && rp->get<double>() > 0.0,
                    "power rate needs an exponent > 0");
    }
  } else if (model == "langevin") {
    const json* dim = c.number_opt("model", "dimension");
    int n = 1;
    if (dim) {
      if (!dim->is_number_integer() || dim->get<std::int64_t>() < 1)
        c.fail("model.dimension", "expected an integer >= 1");
      else
        n = static_cast<int>(dim->get<std::int64_t>());
    }
    const json* beta = c.number_req("model", "beta");
    c.check_range("model", "beta", beta,
                  beta && beta->get<double>() > 0.0 &&
                      beta->get<double>() < 1.0 / n,
                  "tail index must satisfy 0 < beta < 1/dimension");
    const json* d = c.number_opt("model", "temperature");
    c.check_range("model", "temperature", d, !d || d->get<double>() >= 0.0,
                  "must be nonnegative");
    const json* h = c.number_opt("model", "step_scale");
    c.check_range("model", "step_scale", h, !h || h->get<double>() > 0.0,
                  "must be positive");
    const json* r0 = c.number_opt("model", "bridge_radius");
    c.check_range("model", "bridge_radius", r0, !r0 || r0->get<double>() > 0.0,
                  "must be positive");
  } else if (model == "cpou") {
    const json* mu = c.number_req("model", "mu");
    c.check_range("model", "mu", mu, mu && mu->get<double>() > 0.0,
                  "must be positive");
    const json* lam = c.number_req("model", "lambda");
    c.check_range("model", "lambda", lam, lam && lam->get<double>() >= 0.0,
                  "must be nonnegative");
    const std::string fam = c.enum_req(
        "model", "jump_family", {"point-mass", "pareto-log", "log-weibull"});
    const json* jp = c.number_req("model", "jump_param");
    if (fam == "point-mass")
      c.check_range("model", "jump_param", jp, jp && jp->get<double>() > 0.0,
                    "point mass location must be positive");
    if (fam == "pareto-log")
      c.check_range("model", "jump_param", jp, jp && jp->get<double>() > 1.0,
                    "pareto-log exponent must exceed 1");
    if (fam == "log-weibull")
      c.check_range("model", "jump_param", jp, jp && jp->get<double>() > 0.0,
                    "log-weibull exponent must be positive");
  }

  if (doc.contains("action") && doc["action"].is_object())
    c.enum_req("action", "kind", {"simulate", "drift-check", "nested-check",
                                  "converge", "classify", "rates"});

  if (doc.contains("numeric") && doc["numeric"].is_object()) {
    const json* seed = c.want("numeric", "seed", "required");
    if (seed && (!seed->is_number_integer() || seed->get<std::int64_t>() < 0))
      c.fail("numeric.seed", "expected a nonnegative integer");
    const json* n = c.number_opt("numeric", "n");
    c.check_range("numeric", "n", n,
                  !n || (n->is_number_integer() && n->get<std::int64_t>() > 0),
                  "expected a positive integer");
    const json* hor = c.number_opt("numeric", "horizon");
    c.check_range("numeric", "horizon", hor, !hor || hor->get<double>() > 0.0,
                  "must be positive");
    for (auto it = doc["numeric"].begin(); it != doc["numeric"].end(); ++it) {
      const std::string& k = it.key();
      if (k.size() > 4 && k.compare(k.size() - 4, 4, "_tol") == 0) {
        if (!is_number(it.value()) || !(it.value().get<double>() > 0.0))
          c.fail("numeric." + k, "tolerances must be positive numbers");
      }
    }
  }

  if (doc.contains("output")) {
    const json* dir = find(doc, "output", "directory");
    if (dir && !dir->is_string())
      c.fail("output.directory", "expected a string");
    const json* gp = find(doc, "output", "gnuplot");
    if (gp && !gp->is_boolean()) c.fail("output.gnuplot", "expected a boolean");
  }
  return c.errors;
}

}  // namespace

ExperimentConfig::ExperimentConfig(nlohmann::json doc) : doc_(std::move(doc)) {
  const std::vector<std::string> errors = validate(doc_);
  if (!errors.empty()) {
    std::string msg = "config validation failed:";
    for (const std::string& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
}

std::string ExperimentConfig::model_kind() const {
  return doc_["model"]["kind"].get<std::string>();
}

std::string ExperimentConfig::action() const {
  return doc_["action"]["kind"].get<std::string>();
}

std::uint64_t ExperimentConfig::seed() const {
  return static_cast<std::uint64_t>(doc_["numeric"]["seed"].get<std::int64_t>());
}

std::string ExperimentConfig::out_dir() const {
  return str("output", "directory", "out");
}

bool ExperimentConfig::has(const char* section, const char* key) const {
  return find(doc_, section, key) != nullptr;
}

double ExperimentConfig::num(const char* section, const char* key,
                             double fallback) const {
  const json* j = find(doc_, section, key);
  if (!j) return fallback;
  if (!is_number(*j))
    throw ConfigError(std::string(section) + "." + key + ": expected a number");
  return j->get<double>();
}

std::int64_t ExperimentConfig::integer(const char* section, const char* key,
                                       std::int64_t fallback) const {
  const json* j = find(doc_, section, key);
  if (!j) return fallback;
  if (!j->is_number_integer())
    throw ConfigError(std::string(section) + "." + key +
                      ": expected an integer");
  return j->get<std::int64_t>();
}

std::string ExperimentConfig::str(const char* section, const char* key,
                                  const std::string& fallback) const {
  const json* j = find(doc_, section, key);
  if (!j) return fallback;
  if (!j->is_string())
    throw ConfigError(std::string(section) + "." + key + ": expected a string");
  return j->get<std::string>();
}

std::vector<double> ExperimentConfig::nums(const char* section,
                                           const char* key) const {
  const json* j = find(doc_, section, key);
  if (!j) return {};
  if (!j->is_array())
    throw ConfigError(std::string(section) + "." + key + ": expected an array");
  std::vector<double> out;
  for (const auto& v : *j) {
    if (!is_number(v))
      throw ConfigError(std::string(section) + "." + key +
                        ": expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

nlohmann::json structured_text_to_json(const std::string& text) {
  json doc = json::object();
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int ln = 0;
  std::vector<std::string> errors;
  auto fail = [&](const std::string& m) {
    errors.push_back("line " + std::to_string(ln) + ": " + m);
  };
  while (std::getline(in, raw)) {
    ++ln;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string::npos) {
      if (line.back() != ']') {
        fail("unterminated section header");
        continue;
      }
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (!valid_name(name)) {
        fail("bad section name '" + name + "'");
        continue;
      }
      if (doc.contains(name)) {
        fail("duplicate section [" + name + "]");
        continue;
      }
      doc[name] = json::object();
      section = name;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail("expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_name(key)) {
      fail("bad key '" + key + "'");
      continue;
    }
    if (section.empty()) {
      fail("key '" + key + "' outside any [section]");
      continue;
    }
    if (doc[section].contains(key)) {
      fail("duplicate key " + section + "." + key);
      continue;
    }
    json v;
    bool ok;
    if (value.size() >= 2 && value.front() == '[' && value.back() == ']')
      ok = parse_array(value, v);
    else
      ok = parse_scalar(value, v);
    if (!ok) {
      fail("bad value for " + section + "." + key);
      continue;
    }
    doc[section][key] = v;
  }
  if (!errors.empty()) {
    std::string msg = "config parse failed:";
    for (const std::string& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return doc;
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
    ++i;
  if (i < text.size() && text[i] == '{') {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config parse failed: bad json");
    return ExperimentConfig(std::move(doc));
  }
  return ExperimentConfig(structured_text_to_json(text));
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace subergo::cfg
