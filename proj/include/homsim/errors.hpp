#ifndef HOMSIM_ERRORS_HPP
#define HOMSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace homsim {

// A numeric input violates a precondition (non-positive width, probability
// outside [0,1], non-finite value, ...).
class invalid_parameter : public std::invalid_argument {
public:
    explicit invalid_parameter(const std::string& what)
        : std::invalid_argument(what) {}
};

// The requested evaluation point lies outside the validity domain of the
// model (e.g. a path delay beyond the detector-resolution guard).
class model_domain_error : public std::domain_error {
public:
    explicit model_domain_error(const std::string& what)
        : std::domain_error(what) {}
};

// Input data cannot support the requested analysis (too few points,
// accidental level at or above the baseline, ...).
class degenerate_data_error : public std::runtime_error {
public:
    explicit degenerate_data_error(const std::string& what)
        : std::runtime_error(what) {}
};

// Configuration file / CLI configuration problem. `field` carries the dotted
// key path when one is known.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what, std::string field = {})
        : std::runtime_error(field.empty() ? what : field + ": " + what),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Malformed CSV input; `line` is the 1-based line number.
class csv_error : public std::runtime_error {
public:
    csv_error(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace homsim

#endif  // HOMSIM_ERRORS_HPP
