#ifndef QSUM_SPECFILE_HPP
#define QSUM_SPECFILE_HPP

#include <string>

#include "qsum/system.hpp"

namespace qsum {

/// Parsed contents of a system spec file. Complex numbers are [re, im]
/// pairs throughout; W is an array of m-1 arrays of n pairs, rows in flat
/// order i0 = j*d + b.
struct SpecFile {
    SystemSpec spec;
    Direction lambda;
    NumericContext ctx;
    int N = 40;
    int laplace_window = 200;
};

/// Thrown with a field-precise message when a spec file violates an
/// invariant.
class spec_parse_error : public std::runtime_error {
public:
    explicit spec_parse_error(const std::string& what) : std::runtime_error(what) {}
};

SpecFile parse_spec_text(const std::string& json_text);
SpecFile parse_spec(const std::string& path);

/// Canonical re-emission (deterministic key order and number formatting);
/// parse(emit(x)) == x field-for-field.
std::string emit_spec(const SpecFile& sf);

/// Deterministic "%.17g" rendering used for all numeric output.
std::string fmt_double(double v);

}  // namespace qsum

#endif
