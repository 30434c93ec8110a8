#include "orderbench/rational.hpp"

#include "orderbench/error.hpp"

#include <charconv>
#include <cstdlib>

namespace orderbench {

namespace mp = boost::multiprecision;

double to_double(const Rational& r)
{
    return r.convert_to<double>();
}

std::string to_string(const Rational& r)
{
    const auto num = mp::numerator(r);
    const auto den = mp::denominator(r);
    if (den == 1) {
        return num.str();
    }
    return num.str() + "/" + den.str();
}

namespace {

mp::cpp_int parse_integer(std::string_view text, std::string_view whole)
{
    std::string_view digits = text;
    if (!digits.empty() && digits.front() == '-') {
        digits.remove_prefix(1);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string_view::npos) {
        throw DataError("malformed rational '" + std::string(whole) + "'");
    }
    return mp::cpp_int(std::string(text));
}

} // namespace

Rational parse_rational(std::string_view text)
{
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        return Rational(parse_integer(text, text));
    }
    const auto num = parse_integer(text.substr(0, slash), text);
    const auto den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) {
        throw DataError("zero denominator in rational '" + std::string(text) + "'");
    }
    return Rational(num, den);
}

int round_to_tenths(const Rational& r)
{
    // |r| * 10 + 1/2, floored, with the sign restored.
    const Rational scaled = mp::abs(r) * 10 + Rational(1, 2);
    const mp::cpp_int floored = mp::numerator(scaled) / mp::denominator(scaled);
    const int magnitude = floored.convert_to<int>();
    return r < 0 ? -magnitude : magnitude;
}

std::string tenths_label(int tenths)
{
    const int magnitude = std::abs(tenths);
    std::string out = tenths < 0 ? "-" : "";
    out += std::to_string(magnitude / 10);
    out += '.';
    out += std::to_string(magnitude % 10);
    return out;
}

} // namespace orderbench
