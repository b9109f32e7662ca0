#include "pdeetc/disturbance.hpp"

#include "pdeetc/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace pdeetc {

namespace {
constexpr int kNoiseComponents = 16;
}

Disturbance::Disturbance(DisturbanceKind kind, double amplitude, int channels, std::uint64_t seed, double band)
    : kind_(kind), amplitude_(amplitude), channels_(channels), seed_(seed), band_(band) {
  if (amplitude < 0.0) throw Error(ErrorKind::InvalidArgument, "disturbance amplitude must be >= 0");
  if (channels < 1) throw Error(ErrorKind::InvalidArgument, "disturbance needs at least one channel");
  if (kind_ == DisturbanceKind::BandNoise) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    freq_.resize(channels);
    phase_.resize(channels);
    gain_.resize(channels);
    for (int c = 0; c < channels; ++c) {
      double total = 0.0;
      for (int i = 0; i < kNoiseComponents; ++i) {
        freq_[c].push_back(band * unit(rng));
        phase_[c].push_back(2.0 * std::numbers::pi * unit(rng));
        gain_[c].push_back(unit(rng));
        total += gain_[c].back();
      }
      for (double& g : gain_[c]) g /= total;
    }
  }
}

Vec Disturbance::operator()(double t) const {
  Vec d = Vec::Zero(channels_);
  for (int c = 0; c < channels_; ++c) {
    double v = 0.0;
    switch (kind_) {
      case DisturbanceKind::Zero: v = 0.0; break;
      case DisturbanceKind::Constant: v = amplitude_; break;
      case DisturbanceKind::DecayingSine: v = amplitude_ * std::exp(-t) * std::sin(5.0 * t); break;
      case DisturbanceKind::BandNoise:
        for (size_t i = 0; i < freq_[c].size(); ++i) v += gain_[c][i] * std::sin(freq_[c][i] * t + phase_[c][i]);
        v *= amplitude_;
        break;
    }
    d[c] = std::clamp(v, -amplitude_, amplitude_);
  }
  return d;
}

Disturbance Disturbance::scaled(double factor) const {
  Disturbance copy = *this;
  copy.amplitude_ *= factor;
  return copy;
}

std::string Disturbance::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << " amplitude=" << amplitude_;
  if (kind_ == DisturbanceKind::BandNoise) os << " seed=" << seed_ << " band=" << band_;
  return os.str();
}

DisturbanceKind parse_disturbance_kind(const std::string& name) {
  if (name == "zero") return DisturbanceKind::Zero;
  if (name == "constant") return DisturbanceKind::Constant;
  if (name == "decaying-sine") return DisturbanceKind::DecayingSine;
  if (name == "band-noise") return DisturbanceKind::BandNoise;
  throw Error(ErrorKind::Config, "unknown disturbance model '" + name + "'");
}

const char* to_string(DisturbanceKind kind) {
  switch (kind) {
    case DisturbanceKind::Zero: return "zero";
    case DisturbanceKind::Constant: return "constant";
    case DisturbanceKind::DecayingSine: return "decaying-sine";
    case DisturbanceKind::BandNoise: return "band-noise";
  }
  return "zero";
}

}  // namespace pdeetc
