#pragma once

#include <stdexcept>
#include <string>
#include <variant>

#include "tacf/types.hpp"

namespace tacf {

namespace decay {

// w(t) = 1. Plain item-based CF.
struct Constant {
  friend bool operator==(const Constant&, const Constant&) = default;
};

// w(t) = 1 for t <= window, else 0.
struct Window {
  double window = 1e7;
  friend bool operator==(const Window&, const Window&) = default;
};

// w(t) = 1 / (1 + exp(t / scale - offset)).
struct Logistic {
  double scale = 3e4;
  double offset = 5.0;
  friend bool operator==(const Logistic&, const Logistic&) = default;
};

// w(t) = exp(-t / scale).
struct Exponential {
  double scale = 5e4;
  friend bool operator==(const Exponential&, const Exponential&) = default;
};

// Flat for the first day, then (t / 1 day)^-exponent.
struct Outraday {
  double exponent = 0.9;
  friend bool operator==(const Outraday&, const Outraday&) = default;
};

// Short-term power decay below short_end, plateau of 1 until long_start,
// long-term power decay after:
//   (t/short_end)^-short_exponent   t < short_end
//   1                                short_end <= t < long_start
//   (t/long_start)^-long_exponent    t >= long_start
// Ages below one second are evaluated at one second.
struct Piecewise {
  double short_end = 5e4;
  double long_start = 1e6;
  double short_exponent = 0.6;
  double long_exponent = 0.3;
  friend bool operator==(const Piecewise&, const Piecewise&) = default;
};

inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kAgeFloor = 1.0;

}  // namespace decay

using DecaySpec = std::variant<decay::Constant, decay::Window, decay::Logistic, decay::Exponential,
                               decay::Outraday, decay::Piecewise>;

struct DecayParseError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Throws std::invalid_argument if a parameter is out of range (non-positive
/// times, negative exponents, short_end > long_start, non-finite values).
void validate(const DecaySpec& spec);

/// Weight of a rating `age` seconds old. Throws std::domain_error for age < 0.
double eval_decay(const DecaySpec& spec, Seconds age);

/// Parses `constant`, `window:Tw=1e7`, `logistic:Tg=3e4,b=5`, `exp:Te=5e4`,
/// `outraday:Ko=0.9`, `piecewise:Ts=5e4,Tl=1e6,Ks=0.6,Kl=0.3`.
/// Logistic `b` defaults to 5; every other key is required. Errors name the
/// offending key.
DecaySpec parse_decay(const std::string& text);

/// Canonical text form accepted by parse_decay, numbers at 12 significant digits.
std::string to_string(const DecaySpec& spec);

/// Family name as used on the command line ("constant", "window", ...).
std::string family_name(const DecaySpec& spec);

}  // namespace tacf
