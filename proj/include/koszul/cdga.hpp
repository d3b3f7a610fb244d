#pragma once

#include "koszul/graded.hpp"

#include <memory>

namespace koszul {

// Free graded-commutative algebra over a polynomial chart ring: polynomials
// in graded generators (degree >= 1) with Poly coefficients, odd generators
// squaring to zero. Elements are kept in canonical form (sorted generator
// words), so graded commutativity holds by construction.
struct Cdga
{
	int nvars = 0;
	std::vector<std::string> var_names;
	struct Gen
	{
		std::string name;
		int degree; // >= 1
	};
	std::vector<Gen> gens;

	Cdga() = default;
	Cdga(int nv, std::vector<std::string> vn, std::vector<Gen> g)
	    : nvars(nv), var_names(std::move(vn)), gens(std::move(g))
	{
		for (auto& gen : gens)
			if (gen.degree < 1)
				throw std::invalid_argument("generator degree must be >= 1");
	}

	int ngens() const { return (int)gens.size(); }
	bool odd(int g) const { return gens[g].degree & 1; }
	int index_of(const std::string& name) const
	{
		for (int i = 0; i < ngens(); ++i)
			if (gens[i].name == name)
				return i;
		throw std::out_of_range("no cdga generator " + name);
	}
};

using Word = std::vector<int>; // sorted generator indices, odd ones distinct

inline int word_degree(const Cdga& A, const Word& w)
{
	int d = 0;
	for (int g : w)
		d += A.gens[g].degree;
	return d;
}

// Merge two sorted words; returns the Koszul sign, or 0 when an odd
// generator repeats.
inline int merge_words(const Cdga& A, const Word& a, const Word& b, Word& out)
{
	out.clear();
	out.reserve(a.size() + b.size());
	size_t i = 0, j = 0;
	int sign = 1;
	while (i < a.size() || j < b.size())
	{
		bool take_b = i >= a.size() || (j < b.size() && b[j] < a[i]);
		if (take_b)
		{
			int g = b[j++];
			if (A.odd(g))
			{
				// a b-letter crosses every remaining odd a-letter
				int odd_passed = 0;
				for (size_t k = i; k < a.size(); ++k)
					if (A.odd(a[k]))
						++odd_passed;
				if (odd_passed & 1)
					sign = -sign;
			}
			out.push_back(g);
		}
		else
			out.push_back(a[i++]);
	}
	for (size_t k = 0; k + 1 < out.size(); ++k)
		if (out[k] == out[k + 1] && A.odd(out[k]))
			return 0;
	return sign;
}

struct CdgaElement
{
	const Cdga* alg = nullptr;
	std::map<Word, Poly> terms; // canonical, no zero coefficients

	CdgaElement() = default;
	explicit CdgaElement(const Cdga& A) : alg(&A) {}

	static CdgaElement zero(const Cdga& A) { return CdgaElement(A); }
	static CdgaElement scalar(const Cdga& A, const Poly& c)
	{
		CdgaElement e(A);
		if (!c.is_zero())
			e.terms[{}] = c;
		return e;
	}
	static CdgaElement one(const Cdga& A)
	{
		return scalar(A, Poly::constant(A.nvars, 1));
	}
	static CdgaElement generator(const Cdga& A, int g)
	{
		CdgaElement e(A);
		e.terms[{g}] = Poly::constant(A.nvars, 1);
		return e;
	}

	void rebind(const Cdga& A) { alg = &A; }

	bool is_zero() const { return terms.empty(); }

	// true iff every term has the same total degree d (zero is every degree)
	bool homogeneous(int d) const
	{
		for (auto& [w, c] : terms)
			if (word_degree(*alg, w) != d)
				return false;
		return true;
	}

	void add_term(const Word& w, const Poly& c)
	{
		if (c.is_zero())
			return;
		auto it = terms.find(w);
		if (it == terms.end())
			terms.emplace(w, c);
		else
		{
			it->second += c;
			if (it->second.is_zero())
				terms.erase(it);
		}
	}

	CdgaElement& operator+=(const CdgaElement& o)
	{
		for (auto& [w, c] : o.terms)
			add_term(w, c);
		return *this;
	}
	friend CdgaElement operator+(CdgaElement a, const CdgaElement& b)
	{
		return a += b;
	}
	friend CdgaElement operator-(const CdgaElement& a)
	{
		CdgaElement r(*a.alg);
		for (auto& [w, c] : a.terms)
			r.terms[w] = -c;
		return r;
	}
	friend CdgaElement operator-(CdgaElement a, const CdgaElement& b)
	{
		return a += -b;
	}
	friend CdgaElement operator*(const CdgaElement& a, const CdgaElement& b)
	{
		CdgaElement r(*a.alg);
		Word w;
		for (auto& [wa, ca] : a.terms)
			for (auto& [wb, cb] : b.terms)
			{
				int s = merge_words(*a.alg, wa, wb, w);
				if (s != 0)
					r.add_term(w, s > 0 ? ca * cb : -(ca * cb));
			}
		return r;
	}
	friend CdgaElement operator*(const Poly& c, const CdgaElement& a)
	{
		CdgaElement r(*a.alg);
		for (auto& [w, k] : a.terms)
			r.add_term(w, c * k);
		return r;
	}
	friend CdgaElement operator*(const Rational& c, const CdgaElement& a)
	{
		return Poly::constant(a.alg->nvars, c) * a;
	}
	bool operator==(const CdgaElement& o) const { return terms == o.terms; }
	bool operator!=(const CdgaElement& o) const { return !(*this == o); }

	// coefficient polynomial with all generators set to zero
	Poly body() const
	{
		auto it = terms.find({});
		return it == terms.end() ? Poly(alg->nvars) : it->second;
	}

	std::string str() const
	{
		if (terms.empty())
			return "0";
		std::string s;
		for (auto& [w, c] : terms)
		{
			if (!s.empty())
				s += " + ";
			s += "(" + c.str(alg->var_names) + ")";
			for (int g : w)
				s += "*" + alg->gens[g].name;
		}
		return s;
	}
};

inline CdgaElement word_element(const Cdga& A, const Word& w)
{
	CdgaElement e(A);
	e.terms[w] = Poly::constant(A.nvars, 1);
	return e;
}

// Graded derivation stored by its values on chart variables and generators;
// the Leibniz rule determines the rest.
struct Derivation
{
	const Cdga* alg = nullptr;
	int degree = 0;
	bool strict = true; // enforce degree-homogeneous values
	std::vector<CdgaElement> on_var; // value on chart variable i
	std::vector<CdgaElement> on_gen; // value on generator g

	Derivation() = default;
	Derivation(const Cdga& A, int deg, bool strict_degrees = true)
	    : alg(&A), degree(deg), strict(strict_degrees),
	      on_var(A.nvars, CdgaElement(A)), on_gen(A.ngens(), CdgaElement(A))
	{
	}

	void set_var(int i, CdgaElement v)
	{
		if (strict && !v.homogeneous(degree))
			throw std::invalid_argument("derivation value on variable has wrong degree");
		on_var[i] = std::move(v);
	}
	void set_gen(int g, CdgaElement v)
	{
		if (strict && !v.homogeneous(alg->gens[g].degree + degree))
			throw std::invalid_argument("derivation value on " +
			                            alg->gens[g].name + " has wrong degree");
		on_gen[g] = std::move(v);
	}

	bool is_zero() const
	{
		for (auto& v : on_var)
			if (!v.is_zero())
				return false;
		for (auto& v : on_gen)
			if (!v.is_zero())
				return false;
		return true;
	}

	void rebind(const Cdga& A)
	{
		alg = &A;
		for (auto& v : on_var)
			v.rebind(A);
		for (auto& v : on_gen)
			v.rebind(A);
	}

	CdgaElement apply(const CdgaElement& e) const
	{
		// structural compatibility; distinct instances of the same algebra
		// are interchangeable
		if (e.alg->nvars != alg->nvars || e.alg->ngens() != alg->ngens())
			throw std::invalid_argument("element belongs to a different algebra");
		CdgaElement r(*alg);
		for (auto& [w, c] : e.terms)
		{
			// chain rule through the polynomial coefficient
			for (int i = 0; i < alg->nvars; ++i)
			{
				Poly dc = c.derivative(i);
				if (dc.is_zero() || on_var[i].is_zero())
					continue;
				r += (dc * on_var[i]) * word_element(*alg, w);
			}
			// Leibniz over the generator word
			int prefix = 0;
			for (size_t pos = 0; pos < w.size(); ++pos)
			{
				int g = w[pos];
				if (!on_gen[g].is_zero())
				{
					int sign = ((degree & 1) && (prefix & 1)) ? -1 : 1;
					CdgaElement left(*alg);
					left.terms[Word(w.begin(), w.begin() + pos)] =
					    sign > 0 ? c : -c;
					CdgaElement right =
					    word_element(*alg, Word(w.begin() + pos + 1, w.end()));
					r += left * on_gen[g] * right;
				}
				prefix += alg->gens[g].degree;
			}
		}
		return r;
	}

	friend Derivation operator+(const Derivation& a, const Derivation& b)
	{
		Derivation r(*a.alg, a.degree);
		for (int i = 0; i < a.alg->nvars; ++i)
			r.on_var[i] = a.on_var[i] + b.on_var[i];
		for (int g = 0; g < a.alg->ngens(); ++g)
			r.on_gen[g] = a.on_gen[g] + b.on_gen[g];
		return r;
	}

	bool operator==(const Derivation& o) const
	{
		return on_var == o.on_var && on_gen == o.on_gen;
	}
};

// Graded commutator [D1, D2] = D1 D2 - (-1)^{|D1||D2|} D2 D1.
inline Derivation compose_bracket(const Derivation& d1, const Derivation& d2)
{
	if (d1.alg != d2.alg)
		throw std::invalid_argument("derivations on different algebras");
	Derivation r(*d1.alg, d1.degree + d2.degree);
	int sign = ((d1.degree & 1) && (d2.degree & 1)) ? -1 : 1;
	auto comm = [&](const CdgaElement& x2_of, const CdgaElement& x1_of) {
		return d1.apply(x2_of) - Rational(sign) * d2.apply(x1_of);
	};
	for (int i = 0; i < d1.alg->nvars; ++i)
		r.on_var[i] = comm(d2.on_var[i], d1.on_var[i]);
	for (int g = 0; g < d1.alg->ngens(); ++g)
		r.on_gen[g] = comm(d2.on_gen[g], d1.on_gen[g]);
	return r;
}

struct HomologicalVerdict
{
	bool ok;
	std::string witness; // name of a variable/generator with Q^2 != 0
};

inline HomologicalVerdict is_homological(const Derivation& Q)
{
	if (Q.degree != 1)
		throw std::invalid_argument("is_homological requires degree 1");
	for (int g = 0; g < Q.alg->ngens(); ++g)
		if (!Q.apply(Q.on_gen[g]).is_zero())
			return {false, Q.alg->gens[g].name};
	for (int i = 0; i < Q.alg->nvars; ++i)
		if (!Q.apply(Q.on_var[i]).is_zero())
			return {false, Q.alg->var_names[i]};
	return {true, ""};
}

inline CdgaElement apply_derivation(const Derivation& D, const CdgaElement& a)
{
	return D.apply(a);
}

} // namespace koszul
