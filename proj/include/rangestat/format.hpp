#pragma once

#include <cstdio>
#include <string>

namespace rangestat {

// All emitted decimal floats use 17 significant digits: enough to round-trip
// any IEEE double, and deterministic across runs.  Nothing in this codebase
// calls setlocale(), so snprintf always formats with the default C locale.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace rangestat
