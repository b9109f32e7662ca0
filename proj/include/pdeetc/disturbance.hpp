#pragma once

#include "pdeetc/quadrature.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pdeetc {

enum class DisturbanceKind { Zero, Constant, DecayingSine, BandNoise };

/// Scalar disturbance models, all bounded by |d| <= amplitude.
///   Constant:      d = amplitude
///   DecayingSine:  d = amplitude * exp(-t) * sin(5 t)
///   BandNoise:     normalised sum of seeded sinusoids below `band` rad/s
class Disturbance {
 public:
  Disturbance() = default;
  Disturbance(DisturbanceKind kind, double amplitude, int channels = 1, std::uint64_t seed = 0,
              double band = 10.0);

  Vec operator()(double t) const;
  double amplitude() const { return amplitude_; }
  DisturbanceKind kind() const { return kind_; }
  int channels() const { return channels_; }
  /// Same model, amplitude multiplied by `factor`.
  Disturbance scaled(double factor) const;
  std::string describe() const;

 private:
  DisturbanceKind kind_ = DisturbanceKind::Zero;
  double amplitude_ = 0.0;
  int channels_ = 1;
  std::uint64_t seed_ = 0;
  double band_ = 10.0;
  std::vector<std::vector<double>> freq_, phase_, gain_;
};

DisturbanceKind parse_disturbance_kind(const std::string& name);
const char* to_string(DisturbanceKind kind);

}  // namespace pdeetc
