#include "phm/cli/literals.hpp"

#include <cmath>
#include <regex>
#include <string>

#include "phm/errors.hpp"

namespace phm::cli {

namespace {

const std::string kNumber = R"((?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)";

std::vector<std::string> split(std::string_view text) {
    std::vector<std::string> out;
    if (text.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        out.emplace_back(text.substr(start, comma == std::string_view::npos ? text.size() - start
                                                                             : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double to_double(const std::string& token, std::string_view original) {
    // The regexes have already validated the token; stod accepts exactly this grammar.
    const double v = std::stod(token);
    if (!std::isfinite(v)) {
        throw InvalidParameterError("numeric literal '" + std::string(original) +
                                    "' is out of range");
    }
    return v;
}

}  // namespace

double parse_real(std::string_view text) {
    static const std::regex re("[+-]?" + kNumber);
    const std::string s(text);
    if (!std::regex_match(s, re)) {
        throw InvalidParameterError("malformed real literal '" + s + "'");
    }
    return to_double(s, text);
}

Complex parse_complex(std::string_view text) {
    static const std::regex full("([+-]?" + kNumber + ")([+-]" + kNumber + ")i");
    static const std::regex imag_only("([+-]?" + kNumber + ")i");
    static const std::regex real_only("[+-]?" + kNumber);
    const std::string s(text);
    std::smatch m;
    if (std::regex_match(s, m, full)) {
        return {to_double(m[1].str(), text), to_double(m[2].str(), text)};
    }
    if (std::regex_match(s, m, imag_only)) return {0.0, to_double(m[1].str(), text)};
    if (std::regex_match(s, real_only)) return {to_double(s, text), 0.0};
    throw InvalidParameterError("malformed complex literal '" + s +
                                "' (expected a, bi, a+bi or a-bi)");
}

std::vector<double> parse_real_list(std::string_view text) {
    std::vector<double> out;
    for (const auto& tok : split(text)) out.push_back(parse_real(tok));
    return out;
}

std::vector<Complex> parse_complex_list(std::string_view text) {
    std::vector<Complex> out;
    for (const auto& tok : split(text)) out.push_back(parse_complex(tok));
    return out;
}

std::vector<int> parse_sign_list(std::string_view text) {
    std::vector<int> out;
    for (const auto& tok : split(text)) {
        if (tok == "+") {
            out.push_back(1);
        } else if (tok == "-") {
            out.push_back(-1);
        } else {
            throw InvalidParameterError("malformed sign '" + tok + "' (expected + or -)");
        }
    }
    return out;
}

std::vector<int> parse_bit_list(std::string_view text) {
    std::vector<int> out;
    for (const auto& tok : split(text)) {
        if (tok == "0") {
            out.push_back(0);
        } else if (tok == "1") {
            out.push_back(1);
        } else {
            throw InvalidParameterError("malformed bit '" + tok + "' (expected 0 or 1)");
        }
    }
    return out;
}

}  // namespace phm::cli
