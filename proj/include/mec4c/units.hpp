#ifndef MEC4C_UNITS_HPP_
#define MEC4C_UNITS_HPP_

// Canonical units: bits, bits/s, cycles/s (Hz), seconds, watts, joules, meters.

#include <array>
#include <cctype>
#include <cmath>
#include <string>
#include <string_view>

#include "mec4c/errors.hpp"

namespace mec4c
{

inline constexpr double kBitsPerByte = 8.0;
inline constexpr double kBitsPerGigabyte = 8.0e9;

inline double dbm_to_watts(double dbm) {return std::pow(10.0, dbm / 10.0) * 1.0e-3;}
inline double watts_to_dbm(double w) {return 10.0 * std::log10(w / 1.0e-3);}

enum class Dimension
{
  data,       // bits
  frequency,  // Hz or cycles/s
  rate,       // bits/s
  power,      // W
  time,       // s
  energy,     // J
  distance,   // m
};

inline const char * dimension_name(Dimension d)
{
  switch (d) {
    case Dimension::data: return "data size";
    case Dimension::frequency: return "frequency";
    case Dimension::rate: return "data rate";
    case Dimension::power: return "power";
    case Dimension::time: return "time";
    case Dimension::energy: return "energy";
    case Dimension::distance: return "distance";
  }
  return "quantity";
}

namespace detail
{

struct UnitEntry
{
  std::string_view suffix;
  Dimension dim;
  double factor;
};

inline constexpr std::array<UnitEntry, 33> kUnits{{
  {"bit", Dimension::data, 1.0},
  {"kbit", Dimension::data, 1e3},
  {"Mbit", Dimension::data, 1e6},
  {"Gbit", Dimension::data, 1e9},
  {"Tbit", Dimension::data, 1e12},
  {"B", Dimension::data, 8.0},
  {"KB", Dimension::data, 8e3},
  {"kB", Dimension::data, 8e3},
  {"MB", Dimension::data, 8e6},
  {"GB", Dimension::data, 8e9},
  {"TB", Dimension::data, 8e12},
  {"Hz", Dimension::frequency, 1.0},
  {"kHz", Dimension::frequency, 1e3},
  {"MHz", Dimension::frequency, 1e6},
  {"GHz", Dimension::frequency, 1e9},
  {"bps", Dimension::rate, 1.0},
  {"kbps", Dimension::rate, 1e3},
  {"Mbps", Dimension::rate, 1e6},
  {"Gbps", Dimension::rate, 1e9},
  {"bit/s", Dimension::rate, 1.0},
  {"W", Dimension::power, 1.0},
  {"mW", Dimension::power, 1e-3},
  {"s", Dimension::time, 1.0},
  {"ms", Dimension::time, 1e-3},
  {"us", Dimension::time, 1e-6},
  {"min", Dimension::time, 60.0},
  {"J", Dimension::energy, 1.0},
  {"mJ", Dimension::energy, 1e-3},
  {"m", Dimension::distance, 1.0},
  {"km", Dimension::distance, 1e3},
  // Log-scale power units are handled separately; listed for lookup.
  {"dBm", Dimension::power, 0.0},
  {"dBW", Dimension::power, 0.0},
  {"cycles/s", Dimension::frequency, 1.0},
}};

inline std::string_view trim(std::string_view s)
{
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {s.remove_prefix(1);}
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {s.remove_suffix(1);}
  return s;
}

}  // namespace detail

// Parses "25 MHz", "2GB", "27 dBm", or a bare number (already canonical).
inline double parse_quantity(std::string_view text, Dimension dim)
{
  const std::string_view t = detail::trim(text);
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(std::string(t), &pos);
  } catch (const std::exception &) {
    throw ParameterError("cannot parse " + std::string(dimension_name(dim)) + " '" +
            std::string(text) + "'");
  }
  const std::string_view suffix = detail::trim(t.substr(pos));
  if (suffix.empty()) {
    return value;
  }
  if (dim == Dimension::power && suffix == "dBm") {
    return dbm_to_watts(value);
  }
  if (dim == Dimension::power && suffix == "dBW") {
    return std::pow(10.0, value / 10.0);
  }
  for (const auto & u : detail::kUnits) {
    if (u.suffix == suffix && u.dim == dim && u.factor > 0.0) {
      return value * u.factor;
    }
  }
  throw ParameterError("unknown " + std::string(dimension_name(dim)) + " unit '" +
          std::string(suffix) + "' in '" + std::string(text) + "'");
}

}  // namespace mec4c

#endif  // MEC4C_UNITS_HPP_
