#ifndef DGMORSE_SCALAR_HPP
#define DGMORSE_SCALAR_HPP

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace dgmorse {

/// Exact rational coefficient. GMP keeps every value canonical (lowest terms, positive denominator).
using Scalar = mpq_class;

/// Parses "p", "p/q" or "-p/q" into a canonical rational.
inline Scalar parse_scalar(const std::string& text)
{
    if (text.empty())
        throw std::invalid_argument("empty rational literal");
    std::string body = text;
    if (body.front() == '+')
        body.erase(body.begin());
    Scalar value;
    if (value.set_str(body, 10) != 0)
        throw std::invalid_argument("malformed rational literal '" + text + "'");
    if (value.get_den() == 0)
        throw std::invalid_argument("zero denominator in '" + text + "'");
    value.canonicalize();
    return value;
}

/// p/q in lowest terms.
inline Scalar rational(long p, long q = 1)
{
    if (q == 0)
        throw std::invalid_argument("zero denominator");
    Scalar value(p, q);
    value.canonicalize();
    return value;
}

inline std::string to_string(const Scalar& value)
{
    return value.get_str();
}

/// (-1)^e for any integer exponent.
inline int sign_of(long e)
{
    return (e % 2 == 0) ? 1 : -1;
}

} // namespace dgmorse

#endif // DGMORSE_SCALAR_HPP
