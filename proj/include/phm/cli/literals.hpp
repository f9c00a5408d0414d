#pragma once

#include <string_view>
#include <vector>

#include "phm/types.hpp"

namespace phm::cli {

/// Decimal float with optional sign and exponent; the whole token must be consumed.
double parse_real(std::string_view text);

/// `a`, `bi`, `a+bi` or `a-bi` where a, b are decimal floats (optional sign, optional
/// exponent). The imaginary coefficient is mandatory: `1+i` and `i` are rejected.
Complex parse_complex(std::string_view text);

/// Comma-separated lists; an empty string is an empty list.
std::vector<double> parse_real_list(std::string_view text);
std::vector<Complex> parse_complex_list(std::string_view text);
/// `+` / `-` tokens mapped to ±1.
std::vector<int> parse_sign_list(std::string_view text);
/// `0` / `1` tokens.
std::vector<int> parse_bit_list(std::string_view text);

}  // namespace phm::cli
