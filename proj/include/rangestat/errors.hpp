#pragma once

#include <stdexcept>
#include <string>

namespace rangestat {

// Validation failures (bad parameters, out-of-domain arguments) are reported
// as std::domain_error.  Failures caused by the *content* of input data land
// here instead, so callers can distinguish "you asked a malformed question"
// from "the data cannot answer it".  The CLI maps the former to exit 2 and
// the latter to exit 3.
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rangestat
