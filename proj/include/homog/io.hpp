#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "homog/operators.hpp"
#include "homog/potential.hpp"

namespace homog {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::ordered_json;

/// Uniform doubles in [0, 1) from the raw 64-bit stream, so seeded output does not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }

 private:
  std::mt19937_64 engine_;
};

/// Random real trigonometric polynomial of the given degree, scaled to unit L2 norm.
/// with_mean = false zeroes the constant mode.
PeriodicField random_field(int d, int degree, std::uint64_t seed, bool with_mean = true);

/// Random mean-zero family {g_alpha}_{|alpha|=m}, projected per mode onto
/// sum_alpha n^alpha g^n_alpha = 0.
SolenoidalVector random_solenoidal(int d, int m, int modes, std::uint64_t seed);

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex(std::uint64_t h);

/// {d, modes, coeffs: [[n...], re, im]...}; each Hermitian pair is stored once,
/// under the wavenumber whose first nonzero component is positive.
json field_to_json(const PeriodicField& f);
/// Also accepts a bare coefficient list, read with the same pairing rule.
PeriodicField field_from_json(const json& j, int d = -1);

MultiIndex index_from_json(const json& j);

json problem_to_json(const CoefficientMatrix& a);
CoefficientMatrix problem_from_json(const json& j);

/// "1d-m1-harmonic", "1d-m2-harmonic", "bilaplacian", "plate-tensor", "2d-m1-general", "constant".
std::vector<std::string> builtin_problems();
CoefficientMatrix builtin_problem(const std::string& name);
/// A built-in name or a path to a problem file.
CoefficientMatrix load_problem(const std::string& spec);

json solenoidal_to_json(const SolenoidalVector& g);
SolenoidalVector solenoidal_from_json(const json& j);
json potential_to_json(const SkewPotential& G);

json read_json(const std::filesystem::path& path);
/// Writes with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace homog
