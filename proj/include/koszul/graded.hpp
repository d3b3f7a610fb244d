#pragma once

#include "koszul/poly.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace koszul {

// A permutation given by its image list: perm[i] = sigma(i), 0-based.
struct Permutation
{
	std::vector<int> image;

	explicit Permutation(std::vector<int> img) : image(std::move(img))
	{
		std::vector<int> s = image;
		std::sort(s.begin(), s.end());
		for (int i = 0; i < (int)s.size(); ++i)
			if (s[i] != i)
				throw std::invalid_argument("not a permutation");
	}
	int size() const { return (int)image.size(); }

	// (a*b)(i) = a(b(i))
	friend Permutation compose(const Permutation& a, const Permutation& b)
	{
		std::vector<int> img(b.size());
		for (int i = 0; i < b.size(); ++i)
			img[i] = a.image[b.image[i]];
		return Permutation(img);
	}
};

// Graded-symmetric Koszul sign: x_{sigma(0)} ... x_{sigma(n-1)} =
// eps(sigma) * x_0 ... x_{n-1} for homogeneous x_i of the given degrees.
// Only crossings of two odd elements contribute a sign; the plain
// permutation parity is not included.
inline int koszul_sign(const Permutation& perm, const std::vector<int>& degrees)
{
	if (perm.size() != (int)degrees.size())
		throw std::invalid_argument("koszul_sign: length mismatch");
	std::vector<int> a = perm.image;
	int sign = 1;
	for (size_t i = 0; i + 1 < a.size(); ++i)
		for (size_t j = 0; j + 1 < a.size() - i; ++j)
			if (a[j] > a[j + 1])
			{
				if ((degrees[a[j]] & 1) && (degrees[a[j + 1]] & 1))
					sign = -sign;
				std::swap(a[j], a[j + 1]);
			}
	return sign;
}

// Sign for sorting an index tuple (with parallel degrees): returns the
// Koszul sign relating the given order to ascending order, or 0 if two
// odd entries coincide. `idx` is sorted in place.
inline int sort_with_koszul_sign(std::vector<int>& idx, std::vector<int>& degs)
{
	int sign = 1;
	for (size_t i = 0; i + 1 < idx.size(); ++i)
		for (size_t j = 0; j + 1 < idx.size() - i; ++j)
			if (idx[j] > idx[j + 1])
			{
				if ((degs[j] & 1) && (degs[j + 1] & 1))
					sign = -sign;
				std::swap(idx[j], idx[j + 1]);
				std::swap(degs[j], degs[j + 1]);
			}
	for (size_t i = 0; i + 1 < idx.size(); ++i)
		if (idx[i] == idx[i + 1] && (degs[i] & 1))
			return 0;
	return sign;
}

// Bounded basis-indexed graded free module. Generators are stored in a
// fixed canonical order; labels are unique within a degree.
struct GradedModule
{
	struct Gen
	{
		std::string label;
		int degree;
	};
	std::vector<Gen> gens;

	GradedModule() = default;
	explicit GradedModule(std::vector<Gen> g) : gens(std::move(g))
	{
		std::set<std::pair<int, std::string>> seen;
		for (auto& gen : gens)
			if (!seen.insert({gen.degree, gen.label}).second)
				throw std::invalid_argument("duplicate basis label " +
				                            gen.label);
	}

	int size() const { return (int)gens.size(); }
	int degree(int i) const { return gens[i].degree; }
	const std::string& label(int i) const { return gens[i].label; }

	int index_of(const std::string& label) const
	{
		for (int i = 0; i < size(); ++i)
			if (gens[i].label == label)
				return i;
		throw std::out_of_range("no generator " + label);
	}

	std::vector<int> indices_of_degree(int d) const
	{
		std::vector<int> r;
		for (int i = 0; i < size(); ++i)
			if (gens[i].degree == d)
				r.push_back(i);
		return r;
	}

	std::set<int> degrees() const
	{
		std::set<int> r;
		for (auto& g : gens)
			r.insert(g.degree);
		return r;
	}
};

// Sparse element of a graded module with Poly coefficients (a 0-variable
// chart recovers plain rational coefficients). No zero coefficients stored.
struct GradedElement
{
	int nvars = 0;
	std::map<int, Poly> coeffs; // generator index -> coefficient

	GradedElement() = default;
	explicit GradedElement(int nv) : nvars(nv) {}

	static GradedElement gen(int nvars, int i)
	{
		GradedElement e(nvars);
		e.coeffs[i] = Poly::constant(nvars, 1);
		return e;
	}

	bool is_zero() const { return coeffs.empty(); }

	void add(int i, const Poly& c)
	{
		if (c.is_zero())
			return;
		auto it = coeffs.find(i);
		if (it == coeffs.end())
			coeffs.emplace(i, c);
		else
		{
			it->second += c;
			if (it->second.is_zero())
				coeffs.erase(it);
		}
	}

	GradedElement& operator+=(const GradedElement& o)
	{
		for (auto& [i, c] : o.coeffs)
			add(i, c);
		return *this;
	}
	friend GradedElement operator+(GradedElement a, const GradedElement& b)
	{
		return a += b;
	}
	friend GradedElement operator-(const GradedElement& a)
	{
		GradedElement r(a.nvars);
		for (auto& [i, c] : a.coeffs)
			r.coeffs[i] = -c;
		return r;
	}
	friend GradedElement operator-(GradedElement a, const GradedElement& b)
	{
		return a += -b;
	}
	friend GradedElement operator*(const Poly& c, const GradedElement& a)
	{
		GradedElement r(a.nvars);
		for (auto& [i, k] : a.coeffs)
			r.add(i, c * k);
		return r;
	}
	friend GradedElement operator*(const Rational& c, const GradedElement& a)
	{
		GradedElement r(a.nvars);
		if (c == 0)
			return r;
		for (auto& [i, k] : a.coeffs)
			r.coeffs[i] = k * c;
		return r;
	}
	bool operator==(const GradedElement& o) const
	{
		return coeffs == o.coeffs;
	}

	std::string str(const GradedModule& mod,
	                const std::vector<std::string>& vars) const
	{
		if (coeffs.empty())
			return "0";
		std::string s;
		for (auto& [i, c] : coeffs)
		{
			if (!s.empty())
				s += " + ";
			s += "(" + c.str(vars) + ")*" + mod.label(i);
		}
		return s;
	}
};

} // namespace koszul
