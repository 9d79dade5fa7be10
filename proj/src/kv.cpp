#include "crmt/kv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crmt {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void KvMap::set(const std::string& key, const std::string& value) {
  auto it = index_.find(key);
  if (it != index_.end()) {
    items_[it->second].second = value;
    return;
  }
  index_[key] = items_.size();
  items_.emplace_back(key, value);
}

void KvMap::set(const std::string& key, double value) {
  set(key, format_double(value));
}

void KvMap::set(const std::string& key, long value) {
  set(key, std::to_string(value));
}

void KvMap::set(const std::string& key, std::uint64_t value) {
  set(key, std::to_string(value));
}

bool KvMap::has(const std::string& key) const { return index_.count(key) > 0; }

const std::string& KvMap::get(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end())
    throw std::invalid_argument("KvMap: missing key '" + key + "'");
  return items_[it->second].second;
}

std::string KvMap::get_or(const std::string& key,
                          const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

double KvMap::get_double(const std::string& key) const {
  const std::string& s = get(key);
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("KvMap: key '" + key + "' is not a number: " + s);
  }
}

double KvMap::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long KvMap::get_long(const std::string& key) const {
  const std::string& s = get(key);
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("KvMap: key '" + key + "' is not an integer: " + s);
  }
}

long KvMap::get_long_or(const std::string& key, long fallback) const {
  return has(key) ? get_long(key) : fallback;
}

std::uint64_t KvMap::get_u64(const std::string& key) const {
  const std::string& s = get(key);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument("KvMap: key '" + key + "' is not a u64: " + s);
  return v;
}

std::vector<double> KvMap::get_doubles(const std::string& key) const {
  std::istringstream in(get(key));
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof())
    throw std::invalid_argument("KvMap: key '" + key + "' has non-numeric items");
  return out;
}

std::vector<std::string> KvMap::merge_from(const KvMap& other) {
  std::vector<std::string> overridden;
  for (const auto& [k, v] : other.items_) {
    if (has(k) && get(k) != v) overridden.push_back(k);
    set(k, v);
  }
  return overridden;
}

std::string KvMap::print() const {
  std::string out;
  for (const auto& [k, v] : items_) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  }
  return out;
}

KvMap KvMap::parse(const std::string& text) {
  KvMap kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("KvMap: line " + std::to_string(lineno) +
                                  " has no '='");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("KvMap: line " + std::to_string(lineno) +
                                  " has an empty key");
    kv.set(key, value);
  }
  return kv;
}

KvMap KvMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("KvMap: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

namespace {

std::string part_kind(const Mixture1D::Part& part) {
  if (std::holds_alternative<Mixture1D::Atom>(part)) return "atom";
  if (std::holds_alternative<Mixture1D::Gaussian>(part)) return "gaussian";
  if (std::holds_alternative<Mixture1D::PoissonLaw>(part)) return "poisson";
  return "empirical";
}

void jump_to_kv(const JumpFamily& j, const std::string& prefix, KvMap& kv) {
  kv.set(prefix + "kind",
         j.kind == JumpFamily::Kind::Gamma ? std::string("gamma")
                                           : std::string("gengamma"));
  kv.set(prefix + "rate", j.rate);
  if (j.kind == JumpFamily::Kind::GenGamma) kv.set(prefix + "sigma", j.sigma);
}

JumpFamily jump_from_kv(const KvMap& kv, const std::string& prefix) {
  std::string kind = kv.get(prefix + "kind");
  if (kind == "gamma") return JumpFamily::gamma(kv.get_double(prefix + "rate"));
  if (kind == "gengamma")
    return JumpFamily::gen_gamma(kv.get_double(prefix + "rate"),
                                 kv.get_double(prefix + "sigma"));
  throw std::invalid_argument("KvMap: unknown jump kind '" + kind + "'");
}

}  // namespace

void mixture_to_kv(const Mixture1D& m, const std::string& prefix, KvMap& kv) {
  kv.set(prefix + "components", static_cast<long>(m.components.size()));
  for (std::size_t i = 0; i < m.components.size(); ++i) {
    const auto& c = m.components[i];
    std::string p = prefix + "c" + std::to_string(i) + ".";
    kv.set(p + "weight", c.weight);
    kv.set(p + "part", part_kind(c.part));
    if (const auto* a = std::get_if<Mixture1D::Atom>(&c.part)) {
      kv.set(p + "x", a->x);
    } else if (const auto* g = std::get_if<Mixture1D::Gaussian>(&c.part)) {
      kv.set(p + "mean", g->mean);
      kv.set(p + "var", g->var);
    } else if (const auto* pl = std::get_if<Mixture1D::PoissonLaw>(&c.part)) {
      kv.set(p + "mean", pl->mean);
    } else {
      const auto& pts = std::get<Mixture1D::Empirical>(c.part).points;
      std::string s;
      for (double x : pts) {
        if (!s.empty()) s += ' ';
        s += format_double(x);
      }
      kv.set(p + "points", s);
    }
  }
}

Mixture1D mixture_from_kv(const KvMap& kv, const std::string& prefix) {
  long count = kv.get_long(prefix + "components");
  Mixture1D m;
  for (long i = 0; i < count; ++i) {
    std::string p = prefix + "c" + std::to_string(i) + ".";
    double w = kv.get_double(p + "weight");
    std::string kind = kv.get(p + "part");
    if (kind == "atom") {
      m.add(w, Mixture1D::Atom{kv.get_double(p + "x")});
    } else if (kind == "gaussian") {
      m.add(w, Mixture1D::Gaussian{kv.get_double(p + "mean"),
                                   kv.get_double(p + "var")});
    } else if (kind == "poisson") {
      m.add(w, Mixture1D::PoissonLaw{kv.get_double(p + "mean")});
    } else if (kind == "empirical") {
      m.add(w, Mixture1D::Empirical{kv.get_doubles(p + "points")});
    } else {
      throw std::invalid_argument("KvMap: unknown mixture part '" + kind + "'");
    }
  }
  m.validate();
  return m;
}

void intensity_to_kv(const ScaledLevyIntensity& s, const std::string& prefix,
                     KvMap& kv) {
  jump_to_kv(s.base_jump, prefix + "jump.", kv);
  kv.set(prefix + "weight", s.base_weight);
  mixture_to_kv(s.base, prefix + "base.", kv);
  kv.set(prefix + "atoms", static_cast<long>(s.fixed_atoms.size()));
  for (std::size_t i = 0; i < s.fixed_atoms.size(); ++i) {
    std::string p = prefix + "atom" + std::to_string(i) + ".";
    kv.set(p + "location", s.fixed_atoms[i].location);
    kv.set(p + "weight", s.fixed_atoms[i].weight);
    jump_to_kv(s.fixed_atoms[i].jump, p + "jump.", kv);
  }
}

ScaledLevyIntensity intensity_from_kv(const KvMap& kv,
                                      const std::string& prefix) {
  ScaledLevyIntensity s;
  s.base_jump = jump_from_kv(kv, prefix + "jump.");
  s.base_weight = kv.get_double(prefix + "weight");
  s.base = mixture_from_kv(kv, prefix + "base.");
  long atoms = kv.get_long(prefix + "atoms");
  for (long i = 0; i < atoms; ++i) {
    std::string p = prefix + "atom" + std::to_string(i) + ".";
    s.fixed_atoms.push_back({kv.get_double(p + "location"),
                             jump_from_kv(kv, p + "jump."),
                             kv.get_double(p + "weight")});
  }
  s.validate();
  return s;
}

}  // namespace crmt
