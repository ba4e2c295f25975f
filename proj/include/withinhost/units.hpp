#ifndef WITHINHOST_UNITS_HPP
#define WITHINHOST_UNITS_HPP

#include <stdexcept>

namespace withinhost {

/// Supported time/rate units. The engine is hour-canonical: every stored
/// parameter is in hours or per-hour; day-quoted inputs are converted once
/// at the boundary.
enum class Unit {
    hours,
    days,
    per_hour,
    per_day,
};

constexpr double hours_per_day = 24.0;

/// Exact scale conversion between the supported units.
/// Durations and rates convert by the factor 24 in opposite directions;
/// mixing a duration unit with a rate unit is an error.
inline double convert_units(double value, Unit from, Unit to) {
    if (from == to) {
        return value;
    }
    if (from == Unit::days && to == Unit::hours) {
        return value * hours_per_day;
    }
    if (from == Unit::hours && to == Unit::days) {
        return value / hours_per_day;
    }
    if (from == Unit::per_day && to == Unit::per_hour) {
        return value / hours_per_day;
    }
    if (from == Unit::per_hour && to == Unit::per_day) {
        return value * hours_per_day;
    }
    throw std::invalid_argument("convert_units: unsupported unit pair (duration vs rate)");
}

inline double days_to_hours(double days) { return days * hours_per_day; }
inline double hours_to_days(double hours) { return hours / hours_per_day; }
inline double per_day_to_per_hour(double rate) { return rate / hours_per_day; }

} // namespace withinhost

#endif
