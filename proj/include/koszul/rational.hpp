#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>

namespace koszul {

// Exact rational scalars. All kernel arithmetic is over these; nothing is
// ever rounded.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline Rational rat(long num, long den = 1) { return Rational(num, den); }

// Parses "p", "-p" or "p/q" (q > 0 after normalization).
inline std::optional<Rational> parse_rational(const std::string& s)
{
	if (s.empty())
		return std::nullopt;
	auto slash = s.find('/');
	try
	{
		if (slash == std::string::npos)
			return Rational(Integer(s));
		Integer num(s.substr(0, slash));
		Integer den(s.substr(slash + 1));
		if (den == 0)
			return std::nullopt;
		return Rational(num, den);
	}
	catch (...)
	{
		return std::nullopt;
	}
}

inline std::string to_string(const Rational& r)
{
	if (denominator(r) == 1)
		return numerator(r).str();
	return numerator(r).str() + "/" + denominator(r).str();
}

inline Rational rat_pow(const Rational& base, unsigned e)
{
	Rational r = 1;
	for (unsigned i = 0; i < e; ++i)
		r *= base;
	return r;
}

} // namespace koszul
