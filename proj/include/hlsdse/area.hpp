// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace hlsdse {

/// Clock cycles.
using Cycles = std::int64_t;

/// Area in tenths of an area unit. Reported figures carry at most one
/// decimal, so keeping tenths as an integer makes every sum and comparison
/// exact.
class Area {
public:
    constexpr Area() = default;

    static constexpr Area from_tenths(std::int64_t tenths) { return Area(tenths); }
    static constexpr Area from_units(std::int64_t units) { return Area(units * 10); }

    /// Converts a decimal value; throws ParseError if it has more than one
    /// decimal place or is not finite.
    static Area parse(double units);

    constexpr std::int64_t tenths() const { return tenths_; }
    double units() const { return static_cast<double>(tenths_) / 10.0; }

    /// "4784.2", "210.0", "-3.5"
    std::string to_string() const;

    constexpr Area& operator+=(Area other) {
        tenths_ += other.tenths_;
        return *this;
    }
    constexpr Area& operator-=(Area other) {
        tenths_ -= other.tenths_;
        return *this;
    }
    friend constexpr Area operator+(Area a, Area b) { return a += b; }
    friend constexpr Area operator-(Area a, Area b) { return a -= b; }
    friend constexpr auto operator<=>(Area, Area) = default;

private:
    constexpr explicit Area(std::int64_t tenths) : tenths_(tenths) {}

    std::int64_t tenths_ = 0;
};

} // namespace hlsdse
