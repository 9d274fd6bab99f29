// SPDX-License-Identifier: Apache-2.0
#include "hlsdse/area.hpp"

#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "hlsdse/errors.hpp"

namespace hlsdse {

Area Area::parse(double units) {
    if (!std::isfinite(units)) {
        throw ParseError("area must be a finite number");
    }
    const double scaled = units * 10.0;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-6 * std::max(1.0, std::abs(scaled))) {
        throw ParseError(fmt::format("area {} has more than one decimal place", units));
    }
    return Area(static_cast<std::int64_t>(rounded));
}

std::string Area::to_string() const {
    const std::int64_t magnitude = tenths_ < 0 ? -tenths_ : tenths_;
    return fmt::format("{}{}.{}", tenths_ < 0 ? "-" : "", magnitude / 10, magnitude % 10);
}

} // namespace hlsdse
