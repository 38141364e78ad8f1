#include "tacf/decay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <initializer_list>
#include <map>
#include <string_view>

#include "tacf/format.hpp"

namespace tacf {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void validate(const DecaySpec& spec) {
  std::visit(overloaded{
                 [](const decay::Constant&) {},
                 [](const decay::Window& d) { require(positive(d.window), "window: Tw must be > 0"); },
                 [](const decay::Logistic& d) {
                   require(positive(d.scale), "logistic: Tg must be > 0");
                   require(std::isfinite(d.offset), "logistic: b must be finite");
                 },
                 [](const decay::Exponential& d) { require(positive(d.scale), "exp: Te must be > 0"); },
                 [](const decay::Outraday& d) { require(nonnegative(d.exponent), "outraday: Ko must be >= 0"); },
                 [](const decay::Piecewise& d) {
                   require(positive(d.short_end), "piecewise: Ts must be > 0");
                   require(positive(d.long_start), "piecewise: Tl must be > 0");
                   require(d.short_end <= d.long_start, "piecewise: Ts must not exceed Tl");
                   require(nonnegative(d.short_exponent), "piecewise: Ks must be >= 0");
                   require(nonnegative(d.long_exponent), "piecewise: Kl must be >= 0");
                 },
             },
             spec);
}

double eval_decay(const DecaySpec& spec, Seconds age) {
  if (age < 0) throw std::domain_error("negative rating age " + std::to_string(age));
  const double t = static_cast<double>(age);
  return std::visit(overloaded{
                        [](const decay::Constant&) { return 1.0; },
                        [t](const decay::Window& d) { return t <= d.window ? 1.0 : 0.0; },
                        [t](const decay::Logistic& d) { return 1.0 / (1.0 + std::exp(t / d.scale - d.offset)); },
                        [t](const decay::Exponential& d) { return std::exp(-t / d.scale); },
                        [t](const decay::Outraday& d) {
                          return t < decay::kSecondsPerDay ? 1.0 : std::pow(t / decay::kSecondsPerDay, -d.exponent);
                        },
                        [t](const decay::Piecewise& d) {
                          const double tc = std::max(t, decay::kAgeFloor);
                          if (tc < d.short_end) return std::pow(tc / d.short_end, -d.short_exponent);
                          if (tc < d.long_start) return 1.0;
                          return std::pow(tc / d.long_start, -d.long_exponent);
                        },
                    },
                    spec);
}

namespace {

struct Fields {
  std::string family;
  std::map<std::string, double> values;

  double take(const std::string& key) {
    const auto it = values.find(key);
    if (it == values.end()) throw DecayParseError(family + ": missing parameter '" + key + "'");
    const double v = it->second;
    values.erase(it);
    return v;
  }

  double take_or(const std::string& key, double fallback) {
    return values.count(key) ? take(key) : fallback;
  }

  // Rejects keys outside `allowed` before any missing-key complaint.
  void allow(std::initializer_list<const char*> allowed) const {
    for (const auto& [key, v] : values) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        throw DecayParseError(family + ": unknown parameter '" + key + "'");
      }
    }
  }

  void finish() const {
    if (!values.empty()) {
      throw DecayParseError(family + ": unknown parameter '" + values.begin()->first + "'");
    }
  }
};

Fields split_fields(const std::string& text) {
  Fields f;
  const auto colon = text.find(':');
  f.family = text.substr(0, colon);
  if (colon == std::string::npos) return f;
  std::string_view rest(text);
  rest.remove_prefix(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string item(rest.substr(0, comma));
    const auto eq = item.find('=');
    const std::string key = item.substr(0, eq);
    if (key.empty()) throw DecayParseError(f.family + ": empty parameter name in '" + item + "'");
    if (eq == std::string::npos) throw DecayParseError(f.family + ": parameter '" + key + "' has no value");
    const std::string value = item.substr(eq + 1);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size() || !std::isfinite(v)) {
      throw DecayParseError(f.family + ": parameter '" + key + "' has invalid value '" + value + "'");
    }
    if (!f.values.emplace(key, v).second) throw DecayParseError(f.family + ": parameter '" + key + "' repeated");
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return f;
}

}  // namespace

DecaySpec parse_decay(const std::string& text) {
  auto f = split_fields(text);
  DecaySpec spec;
  if (f.family == "constant" || f.family == "ibcf") {
    spec = decay::Constant{};
  } else if (f.family == "window") {
    f.allow({"Tw"});
    spec = decay::Window{f.take("Tw")};
  } else if (f.family == "logistic") {
    f.allow({"Tg", "b"});
    const double scale = f.take("Tg");
    spec = decay::Logistic{scale, f.take_or("b", 5.0)};
  } else if (f.family == "exp" || f.family == "exponential") {
    f.allow({"Te"});
    spec = decay::Exponential{f.take("Te")};
  } else if (f.family == "outraday") {
    f.allow({"Ko"});
    spec = decay::Outraday{f.take("Ko")};
  } else if (f.family == "piecewise") {
    f.allow({"Ts", "Tl", "Ks", "Kl"});
    decay::Piecewise p;
    p.short_end = f.take("Ts");
    p.long_start = f.take("Tl");
    p.short_exponent = f.take("Ks");
    p.long_exponent = f.take("Kl");
    spec = p;
  } else {
    throw DecayParseError("unknown decay family '" + f.family + "'");
  }
  f.finish();
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    throw DecayParseError(e.what());
  }
  return spec;
}

std::string to_string(const DecaySpec& spec) {
  const auto r = [](double v) { return format_real(v); };
  return std::visit(overloaded{
                        [](const decay::Constant&) { return std::string("constant"); },
                        [&](const decay::Window& d) { return "window:Tw=" + r(d.window); },
                        [&](const decay::Logistic& d) { return "logistic:Tg=" + r(d.scale) + ",b=" + r(d.offset); },
                        [&](const decay::Exponential& d) { return "exp:Te=" + r(d.scale); },
                        [&](const decay::Outraday& d) { return "outraday:Ko=" + r(d.exponent); },
                        [&](const decay::Piecewise& d) {
                          return "piecewise:Ts=" + r(d.short_end) + ",Tl=" + r(d.long_start) +
                                 ",Ks=" + r(d.short_exponent) + ",Kl=" + r(d.long_exponent);
                        },
                    },
                    spec);
}

std::string family_name(const DecaySpec& spec) {
  static constexpr const char* names[] = {"constant", "window", "logistic", "exp", "outraday", "piecewise"};
  return names[spec.index()];
}

}  // namespace tacf
