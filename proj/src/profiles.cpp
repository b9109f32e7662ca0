#include "pdeetc/profiles.hpp"

#include "pdeetc/error.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace pdeetc {

namespace {

constexpr double pi = std::numbers::pi;

const std::map<std::string, Profile>& fixed_profiles() {
  static const std::map<std::string, Profile> table = {
      {"zero", [](double) { return 0.0; }},
      {"one", [](double) { return 1.0; }},
      {"example1.b1", [](double p) { return 4.0 / pi * std::sin(p) + 3.0 / 8.0 * pi * std::cos(p); }},
      {"example1.b2.1",
       [](double p) {
         const double s = std::sqrt(2.0 / pi);
         return -9.0 / 4.0 * s * std::cos(p) - 3.0 / pi * s * std::sin(p);
       }},
      {"example1.b2.2", [](double p) { return -5.0 / pi * std::sqrt(2.0 / pi) * std::sin(p); }},
      {"example1.cbar",
       [](double p) { return std::sqrt(2.0 / pi) * std::sin(p) + 0.75 * std::sqrt(pi / 2.0) * std::cos(p); }},
      {"example1.xi0",
       [](double p) {
         return -0.4 * std::pow(2.0 / pi, 1.5) * std::sin(p) - 0.075 * std::sqrt(2.0 / pi) * std::cos(p);
       }},
      {"example2.xi0", [](double p) { return 0.1 - 0.1 * std::cos(p); }},
  };
  return table;
}

bool parse_call(const std::string& name, const std::string& fn, double& arg) {
  const std::string head = fn + "(";
  if (name.rfind(head, 0) != 0 || name.back() != ')') return false;
  const std::string inner = name.substr(head.size(), name.size() - head.size() - 1);
  size_t used = 0;
  try {
    arg = std::stod(inner, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == inner.size();
}

}  // namespace

Profile builtin_profile(const std::string& name, Interval domain) {
  const auto& table = fixed_profiles();
  if (auto it = table.find(name); it != table.end()) return it->second;
  double a = 0.0;
  if (parse_call(name, "const", a)) return [a](double) { return a; };
  if (parse_call(name, "sin", a)) return [a](double p) { return std::sin(a * p); };
  if (parse_call(name, "cos", a)) return [a](double p) { return std::cos(a * p); };
  if (parse_call(name, "mode", a)) {
    const double len = domain.length(), lo = domain.lo, s = std::sqrt(2.0 / len);
    return [a, len, lo, s](double p) { return s * std::sin(a * pi * (p - lo) / len); };
  }
  throw Error(ErrorKind::Config, "unknown profile '" + name + "'");
}

std::vector<std::string> builtin_profile_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : fixed_profiles()) names.push_back(k);
  names.insert(names.end(), {"const(v)", "sin(k)", "cos(k)", "mode(k)"});
  return names;
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
  return acc;
}

double Polynomial::derivative(double x) const {
  double acc = 0.0;
  for (size_t k = coeffs.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * coeffs[k];
  return acc;
}

double sampled_lipschitz(const Polynomial& f, double bound, int samples) {
  double worst = 0.0;
  double prev_x = -bound, prev_f = f(-bound);
  for (int i = 1; i < samples; ++i) {
    const double x = -bound + 2.0 * bound * i / (samples - 1);
    const double fx = f(x);
    worst = std::max(worst, std::abs(fx - prev_f) / (x - prev_x));
    prev_x = x;
    prev_f = fx;
  }
  return worst;
}

}  // namespace pdeetc
