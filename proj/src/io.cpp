#include "homog/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "homog/errors.hpp"

namespace homog {

namespace {

bool canonical(std::span<const int> n) {
  for (int v : n)
    if (v != 0) return v > 0;
  return true;
}

PeriodicField trig(int d, std::initializer_list<PeriodicField::Term> terms) {
  std::vector<PeriodicField::Term> t(terms);
  return PeriodicField::from_terms(d, t);
}

using T = PeriodicField::Term;
constexpr cplx I{0.0, 1.0};

}  // namespace

PeriodicField random_field(int d, int degree, std::uint64_t seed, bool with_mean) {
  Rng rng(seed);
  std::vector<T> terms;
  ModeBox box{d, degree};
  box.for_each([&](std::size_t, std::span<const int> n) {
    if (!canonical(n)) return;
    bool zero = true;
    for (int v : n) zero = zero && v == 0;
    const double re = rng.uniform(-1.0, 1.0), im = rng.uniform(-1.0, 1.0);
    if (zero && !with_mean) return;
    terms.push_back({std::vector<int>(n.begin(), n.end()), zero ? cplx{re, 0.0} : cplx{re, im}});
  });
  auto f = PeriodicField::from_terms(d, terms, degree);
  const double nrm = f.l2_norm();
  return nrm > 0.0 ? (1.0 / nrm) * f : f;
}

SolenoidalVector random_solenoidal(int d, int m, int modes, std::uint64_t seed) {
  Rng rng(seed);
  const auto idx = enumerate(d, m, IndexMode::ExactlyM);
  const ModeBox box{d, modes};
  std::vector<std::vector<cplx>> c(idx.size(), std::vector<cplx>(box.size()));
  box.for_each([&](std::size_t i, std::span<const int> n) {
    if (!canonical(n) || i == box.index(std::vector<int>(static_cast<std::size_t>(d), 0))) return;
    std::vector<cplx> g(idx.size());
    for (auto& v : g) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    cplx proj{};
    for (std::size_t a = 0; a < idx.size(); ++a) proj += monomial(n, idx.members[a]) * g[a];
    const double lam = lambda_m(n, m);
    for (std::size_t a = 0; a < idx.size(); ++a) {
      g[a] -= monomial(n, idx.members[a]) * proj / lam;
      c[a][i] = g[a];
      c[a][box.mirror(i)] = std::conj(g[a]);
    }
  });
  SolenoidalVector out{d, m, {}};
  for (std::size_t a = 0; a < idx.size(); ++a) out.components.emplace(idx.members[a], PeriodicField(d, modes, std::move(c[a])));
  return out;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

json field_to_json(const PeriodicField& f) {
  json coeffs = json::array();
  f.box().for_each([&](std::size_t i, std::span<const int> n) {
    if (!canonical(n)) return;
    const cplx c = f.coeffs()[i];
    if (c == cplx{}) return;
    coeffs.push_back(json::array({json(std::vector<int>(n.begin(), n.end())), c.real(), c.imag()}));
  });
  json j;
  j["d"] = f.dim();
  j["modes"] = f.cutoff();
  j["coeffs"] = std::move(coeffs);
  return j;
}

PeriodicField field_from_json(const json& j, int d) {
  const json* list = &j;
  int cutoff = -1;
  if (j.is_object()) {
    if (j.contains("d")) {
      const int jd = j.at("d").get<int>();
      if (d >= 0 && jd != d) throw ShapeError("field dimension " + std::to_string(jd) + " where " + std::to_string(d) + " was expected");
      d = jd;
    }
    if (j.contains("modes")) cutoff = j.at("modes").get<int>();
    list = &j.at("coeffs");
  }
  if (!list->is_array()) throw ShapeError("coefficient list must be an array of [n, re, im]");
  std::vector<T> terms;
  for (const auto& e : *list) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3) throw ShapeError("coefficient entry must be [n, re, im]");
    auto n = e[0].is_array() ? e[0].get<std::vector<int>>() : std::vector<int>{e[0].get<int>()};
    if (d < 0) d = static_cast<int>(n.size());
    if (static_cast<int>(n.size()) != d) throw ShapeError("wavenumber length does not match the dimension");
    if (!canonical(n)) {
      for (auto& v : n) v = -v;
      terms.push_back({n, {e[1].get<double>(), e.size() > 2 ? -e[2].get<double>() : 0.0}});
    } else {
      terms.push_back({n, {e[1].get<double>(), e.size() > 2 ? e[2].get<double>() : 0.0}});
    }
  }
  if (d < 1) throw ShapeError("cannot infer the field dimension");
  return PeriodicField::from_terms(d, terms, cutoff);
}

MultiIndex index_from_json(const json& j) {
  if (j.is_string()) return MultiIndex::parse(j.get<std::string>());
  if (j.is_array()) return MultiIndex(j.get<std::vector<int>>());
  throw ShapeError("multi-index must be a string \"(a1,...)\" or an integer array");
}

json problem_to_json(const CoefficientMatrix& a) {
  json j;
  if (!a.name().empty()) j["name"] = a.name();
  j["d"] = a.dim();
  j["m"] = a.order();
  j["lambda0"] = a.lambda0();
  j["lambda1"] = a.lambda1();
  json entries = json::array();
  for (const auto& [key, f] : a.entries()) {
    json e;
    e["alpha"] = key.first.to_string();
    e["beta"] = key.second.to_string();
    e["field"] = field_to_json(f.with_cutoff(f.degree()))["coeffs"];
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  return j;
}

CoefficientMatrix problem_from_json(const json& j) {
  for (const char* key : {"d", "m", "lambda0", "lambda1", "entries"})
    if (!j.contains(key)) throw ShapeError(std::string("problem file lacks \"") + key + "\"");
  const int d = j.at("d").get<int>(), m = j.at("m").get<int>();
  if (d < 1 || m < 1) throw ShapeError("problem needs d >= 1 and m >= 1");
  CoefficientMatrix a(d, m, j.at("lambda0").get<double>(), j.at("lambda1").get<double>(), j.value("name", std::string{}));
  for (const auto& e : j.at("entries")) {
    const auto alpha = index_from_json(e.at("alpha"));
    const auto beta = index_from_json(e.at("beta"));
    if (alpha.dim() != d || beta.dim() != d) throw ShapeError("entry " + alpha.to_string() + beta.to_string() + " has the wrong dimension");
    if (alpha.order() > m || beta.order() > m) throw ShapeError("entry " + alpha.to_string() + beta.to_string() + " exceeds order m");
    a.add(alpha, beta, field_from_json(e.at("field"), d));
  }
  return a;
}

std::vector<std::string> builtin_problems() {
  return {"1d-m1-harmonic", "1d-m2-harmonic", "bilaplacian", "plate-tensor", "2d-m1-general", "constant"};
}

CoefficientMatrix builtin_problem(const std::string& name) {
  if (name == "1d-m1-harmonic" || name == "1d-m2-harmonic") {
    const int m = name == "1d-m1-harmonic" ? 1 : 2;
    CoefficientMatrix a(1, m, 1.0, 3.0, name);
    a.set(MultiIndex{m}, MultiIndex{m}, trig(1, {T{{0}, 2.0}, T{{1}, -0.5 * I}}));
    return a;
  }
  if (name == "bilaplacian") {
    // Delta(alpha Delta u) with alpha = 2 + cos 2 pi y1
    CoefficientMatrix a(2, 2, 1.0, 3.0, name);
    const auto alpha = trig(2, {T{{0, 0}, 2.0}, T{{1, 0}, 0.5}});
    for (const auto& p : {MultiIndex{2, 0}, MultiIndex{0, 2}})
      for (const auto& q : {MultiIndex{2, 0}, MultiIndex{0, 2}}) a.set(p, q, alpha);
    return a;
  }
  if (name == "plate-tensor") {
    // a_{ijsh} = s(y) d_is d_jh; the (1,2) and (2,1) pairs share the multi-index (1,1)
    CoefficientMatrix a(2, 2, 1.0, 6.0, name);
    const auto s = trig(2, {T{{0, 0}, 2.0}, T{{1, 0}, 0.25}, T{{0, 1}, 0.25}});
    a.set({2, 0}, {2, 0}, s);
    a.set({0, 2}, {0, 2}, s);
    a.set({1, 1}, {1, 1}, 2.0 * s);
    return a;
  }
  if (name == "2d-m1-general") {
    CoefficientMatrix a(2, 1, 0.7, 3.0, name);
    a.set({1, 0}, {1, 0}, trig(2, {T{{0, 0}, 2.0}, T{{1, 0}, 0.25}, T{{1, 1}, -0.15 * I}}));
    a.set({0, 1}, {0, 1}, trig(2, {T{{0, 0}, 2.0}, T{{0, 1}, -0.25 * I}}));
    a.set({1, 0}, {0, 1}, trig(2, {T{{0, 0}, 0.3}, T{{0, 1}, 0.1}}));
    a.set({0, 1}, {1, 0}, trig(2, {T{{0, 0}, -0.1}, T{{1, 0}, -0.1 * I}}));
    a.set({1, 0}, {0, 0}, trig(2, {T{{1, 0}, -0.15 * I}}));
    a.set({0, 0}, {0, 1}, trig(2, {T{{1, 0}, 0.1}}));
    a.set({0, 0}, {0, 0}, trig(2, {T{{0, 0}, 0.5}, T{{1, 0}, 0.125}}));
    return a;
  }
  if (name == "constant") {
    CoefficientMatrix a(1, 1, 1.0, 2.0, name);
    a.set(MultiIndex{1}, MultiIndex{1}, PeriodicField::constant(1, 2.0));
    return a;
  }
  throw PreconditionError("unknown built-in problem \"" + name + "\"");
}

CoefficientMatrix load_problem(const std::string& spec) {
  for (const auto& n : builtin_problems())
    if (n == spec) return builtin_problem(spec);
  if (!std::filesystem::exists(spec)) throw PreconditionError("\"" + spec + "\" is neither a built-in problem nor a readable file");
  auto j = read_json(spec);
  if (!j.contains("name")) j["name"] = std::filesystem::path(spec).stem().string();
  return problem_from_json(j);
}

json solenoidal_to_json(const SolenoidalVector& g) {
  json j;
  j["d"] = g.d;
  j["m"] = g.m;
  json comps = json::array();
  for (const auto& [alpha, f] : g.components) comps.push_back({{"alpha", alpha.to_string()}, {"field", field_to_json(f)}});
  j["components"] = std::move(comps);
  return j;
}

SolenoidalVector solenoidal_from_json(const json& j) {
  SolenoidalVector g{j.at("d").get<int>(), j.at("m").get<int>(), {}};
  for (const auto& c : j.at("components")) {
    auto alpha = index_from_json(c.at("alpha"));
    if (alpha.dim() != g.d || alpha.order() != g.m) throw ShapeError("component " + alpha.to_string() + " is not of order m");
    g.components.emplace(alpha, field_from_json(c.at("field"), g.d));
  }
  const int cutoff = g.cutoff();
  for (const auto& alpha : enumerate(g.d, g.m, IndexMode::ExactlyM)) {
    auto it = g.components.find(alpha);
    if (it == g.components.end())
      g.components.emplace(alpha, PeriodicField(g.d, cutoff));
    else
      it->second = it->second.with_cutoff(cutoff);
  }
  return g;
}

json potential_to_json(const SkewPotential& G) {
  json j;
  j["d"] = G.d;
  j["m"] = G.m;
  j["measured_constant"] = G.measured_constant;
  json comps = json::array();
  for (const auto& [key, f] : G.components)
    comps.push_back({{"alpha", key.first.to_string()}, {"beta", key.second.to_string()}, {"field", field_to_json(f)}});
  j["components"] = std::move(comps);
  return j;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ShapeError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace homog
