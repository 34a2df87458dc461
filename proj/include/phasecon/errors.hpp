#pragma once

#include <stdexcept>
#include <string>

namespace phasecon {

enum class Errc {
    size_not_power_of_two,
    duplicate_label,
    label_out_of_range,
    duplicate_point,
    size_mismatch,
    all_zero,
    width_mismatch,
    unsupported_reference,
    not_normalized,
    index_out_of_range,
    invalid_argument,
    target_unreachable,
    format_error,
};

const char* errc_name(Errc code) noexcept;

// Single exception type for the library; the code distinguishes the cause.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace phasecon
