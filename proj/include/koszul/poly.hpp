#pragma once

#include "koszul/rational.hpp"

#include <cassert>
#include <map>
#include <stdexcept>
#include <vector>

namespace koszul {

// Sparse multivariate polynomial over Rational in a fixed number of chart
// variables. Terms are kept in a canonically ordered map with no zero
// coefficients, so operator== is exact structural equality.
class Poly
{
  public:
	using Monomial = std::vector<unsigned>; // exponent per variable

	Poly() : nvars_(0) {}
	explicit Poly(int nvars) : nvars_(nvars) {}

	static Poly constant(int nvars, const Rational& c)
	{
		Poly p(nvars);
		if (c != 0)
			p.terms_[Monomial(nvars, 0)] = c;
		return p;
	}

	static Poly var(int nvars, int i)
	{
		assert(i >= 0 && i < nvars);
		Poly p(nvars);
		Monomial m(nvars, 0);
		m[i] = 1;
		p.terms_[m] = 1;
		return p;
	}

	static Poly monomial(int nvars, const Monomial& m, const Rational& c)
	{
		assert((int)m.size() == nvars);
		Poly p(nvars);
		if (c != 0)
			p.terms_[m] = c;
		return p;
	}

	int nvars() const { return nvars_; }
	bool is_zero() const { return terms_.empty(); }
	const std::map<Monomial, Rational>& terms() const { return terms_; }

	bool is_constant() const
	{
		return terms_.empty() ||
		       (terms_.size() == 1 &&
		        terms_.begin()->first == Monomial(nvars_, 0));
	}

	Rational constant_term() const
	{
		auto it = terms_.find(Monomial(nvars_, 0));
		return it == terms_.end() ? Rational(0) : it->second;
	}

	int total_degree() const
	{
		int d = -1;
		for (auto& [m, c] : terms_)
		{
			int s = 0;
			for (unsigned e : m)
				s += (int)e;
			d = std::max(d, s);
		}
		return d; // -1 for the zero polynomial
	}

	void add_term(const Monomial& m, const Rational& c)
	{
		if (c == 0)
			return;
		auto it = terms_.find(m);
		if (it == terms_.end())
			terms_.emplace(m, c);
		else
		{
			it->second += c;
			if (it->second == 0)
				terms_.erase(it);
		}
	}

	Poly& operator+=(const Poly& o)
	{
		assert(nvars_ == o.nvars_);
		for (auto& [m, c] : o.terms_)
			add_term(m, c);
		return *this;
	}
	Poly& operator-=(const Poly& o)
	{
		assert(nvars_ == o.nvars_);
		for (auto& [m, c] : o.terms_)
			add_term(m, -c);
		return *this;
	}
	friend Poly operator+(Poly a, const Poly& b) { return a += b; }
	friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
	friend Poly operator-(const Poly& a)
	{
		Poly r(a.nvars_);
		for (auto& [m, c] : a.terms_)
			r.terms_[m] = -c;
		return r;
	}

	friend Poly operator*(const Poly& a, const Poly& b)
	{
		assert(a.nvars_ == b.nvars_);
		Poly r(a.nvars_);
		for (auto& [ma, ca] : a.terms_)
			for (auto& [mb, cb] : b.terms_)
			{
				Monomial m(a.nvars_);
				for (int i = 0; i < a.nvars_; ++i)
					m[i] = ma[i] + mb[i];
				r.add_term(m, ca * cb);
			}
		return r;
	}
	Poly& operator*=(const Poly& o) { return *this = *this * o; }

	friend Poly operator*(const Poly& a, const Rational& c)
	{
		Poly r(a.nvars_);
		if (c == 0)
			return r;
		for (auto& [m, k] : a.terms_)
			r.terms_[m] = k * c;
		return r;
	}
	friend Poly operator*(const Rational& c, const Poly& a) { return a * c; }

	bool operator==(const Poly& o) const
	{
		return nvars_ == o.nvars_ && terms_ == o.terms_;
	}
	bool operator!=(const Poly& o) const { return !(*this == o); }
	bool operator<(const Poly& o) const
	{
		if (nvars_ != o.nvars_)
			return nvars_ < o.nvars_;
		return terms_ < o.terms_;
	}

	Poly derivative(int i) const
	{
		Poly r(nvars_);
		for (auto& [m, c] : terms_)
			if (m[i] > 0)
			{
				Monomial mm = m;
				mm[i] -= 1;
				r.add_term(mm, c * (int)m[i]);
			}
		return r;
	}

	Poly antiderivative(int i) const
	{
		Poly r(nvars_);
		for (auto& [m, c] : terms_)
		{
			Monomial mm = m;
			mm[i] += 1;
			r.add_term(mm, c / (int)mm[i]);
		}
		return r;
	}

	// Full composition: substitute args[i] (all over the same target chart)
	// for variable i.
	Poly substitute(const std::vector<Poly>& args) const
	{
		assert((int)args.size() == nvars_);
		int out_vars = args.empty() ? 0 : args[0].nvars();
		Poly r(out_vars);
		for (auto& [m, c] : terms_)
		{
			Poly t = Poly::constant(out_vars, c);
			for (int i = 0; i < nvars_; ++i)
				for (unsigned e = 0; e < m[i]; ++e)
					t *= args[i];
			r += t;
		}
		return r;
	}

	// Substitute a single variable, keeping the chart.
	Poly substitute_var(int i, const Poly& val) const
	{
		assert(val.nvars() == nvars_);
		Poly r(nvars_);
		for (auto& [m, c] : terms_)
		{
			Monomial mm = m;
			mm[i] = 0;
			Poly t = Poly::monomial(nvars_, mm, c);
			for (unsigned e = 0; e < m[i]; ++e)
				t *= val;
			r += t;
		}
		return r;
	}

	Rational eval(const std::vector<Rational>& x) const
	{
		assert((int)x.size() == nvars_);
		Rational r = 0;
		for (auto& [m, c] : terms_)
		{
			Rational t = c;
			for (int i = 0; i < nvars_; ++i)
				t *= rat_pow(x[i], m[i]);
			r += t;
		}
		return r;
	}

	// Definite integral over variable i with polynomial bounds in the
	// remaining variables. Exact.
	Poly integrate(int i, const Poly& lo, const Poly& hi) const
	{
		Poly anti = antiderivative(i);
		return anti.substitute_var(i, hi) - anti.substitute_var(i, lo);
	}

	std::string str(const std::vector<std::string>& names) const
	{
		if (terms_.empty())
			return "0";
		std::string s;
		bool first = true;
		for (auto& [m, c] : terms_)
		{
			std::string t = to_string(c);
			for (int i = 0; i < nvars_; ++i)
				if (m[i] > 0)
				{
					t += "*" + names[i];
					if (m[i] > 1)
						t += "^" + std::to_string(m[i]);
				}
			s += first ? t : (c >= 0 ? "+" + t : t);
			first = false;
		}
		return s;
	}

  private:
	int nvars_;
	std::map<Monomial, Rational> terms_;
};

} // namespace koszul
