#pragma once

#include "koszul/poly.hpp"
#include "koszul/qlinalg.hpp"

namespace koszul {

// Differential form with polynomial coefficients: sparse sum of
// f * dv_{i_1} ^ ... ^ dv_{i_r} with strictly increasing symbol sets.
struct PolyForm
{
	using DiffSet = std::vector<int>;
	int nvars = 0;
	std::map<DiffSet, Poly> parts;

	PolyForm() = default;
	explicit PolyForm(int nv) : nvars(nv) {}

	static PolyForm scalar(const Poly& p)
	{
		PolyForm f(p.nvars());
		if (!p.is_zero())
			f.parts[{}] = p;
		return f;
	}
	static PolyForm d_var(int nvars, int i)
	{
		PolyForm f(nvars);
		f.parts[{i}] = Poly::constant(nvars, 1);
		return f;
	}

	bool is_zero() const { return parts.empty(); }

	void add_part(const DiffSet& s, const Poly& c)
	{
		if (c.is_zero())
			return;
		auto it = parts.find(s);
		if (it == parts.end())
			parts.emplace(s, c);
		else
		{
			it->second += c;
			if (it->second.is_zero())
				parts.erase(it);
		}
	}

	friend PolyForm operator+(PolyForm a, const PolyForm& b)
	{
		for (auto& [s, c] : b.parts)
			a.add_part(s, c);
		return a;
	}
	friend PolyForm operator-(const PolyForm& a)
	{
		PolyForm r(a.nvars);
		for (auto& [s, c] : a.parts)
			r.parts[s] = -c;
		return r;
	}
	friend PolyForm operator-(PolyForm a, const PolyForm& b)
	{
		return a + (-b);
	}
	friend PolyForm operator*(const Poly& c, const PolyForm& a)
	{
		PolyForm r(a.nvars);
		for (auto& [s, k] : a.parts)
			r.add_part(s, c * k);
		return r;
	}
	friend PolyForm operator*(const Rational& c, const PolyForm& a)
	{
		return Poly::constant(a.nvars, c) * a;
	}
	bool operator==(const PolyForm& o) const { return parts == o.parts; }

	// merge two increasing symbol sets; 0 on repeats, else the sign
	static int merge_diff(const DiffSet& a, const DiffSet& b, DiffSet& out)
	{
		out.clear();
		size_t i = 0, j = 0;
		int sign = 1;
		while (i < a.size() || j < b.size())
		{
			if (j >= b.size() || (i < a.size() && a[i] < b[j]))
				out.push_back(a[i++]);
			else
			{
				if (i < a.size() && a[i] == b[j])
					return 0;
				if ((a.size() - i) % 2 == 1)
					sign = -sign;
				out.push_back(b[j++]);
			}
		}
		return sign;
	}

	friend PolyForm wedge(const PolyForm& a, const PolyForm& b)
	{
		PolyForm r(a.nvars);
		DiffSet s;
		for (auto& [sa, ca] : a.parts)
			for (auto& [sb, cb] : b.parts)
			{
				int sign = merge_diff(sa, sb, s);
				if (sign != 0)
					r.add_part(s, sign > 0 ? ca * cb : -(ca * cb));
			}
		return r;
	}

	// exterior differential over the listed variables
	PolyForm exterior_d(const std::vector<int>& vars) const
	{
		PolyForm r(nvars);
		for (auto& [s, c] : parts)
			for (int v : vars)
			{
				Poly dc = c.derivative(v);
				if (dc.is_zero())
					continue;
				DiffSet out;
				int sign = merge_diff({v}, s, out);
				if (sign != 0)
					r.add_part(out, sign > 0 ? dc : -dc);
			}
		return r;
	}

	// pullback along a polynomial map: var i of this form becomes vals[i],
	// expressed in a target space with tgt_nvars variables and the
	// differentials taken over tgt_diff_vars
	PolyForm pullback(const std::vector<Poly>& vals, int tgt_nvars,
	                  const std::vector<int>& tgt_diff_vars) const
	{
		PolyForm r(tgt_nvars);
		for (auto& [s, c] : parts)
		{
			PolyForm term = PolyForm::scalar(c.substitute(vals));
			for (int sym : s)
			{
				PolyForm dv(tgt_nvars);
				for (int v : tgt_diff_vars)
				{
					Poly dcomp = vals[sym].derivative(v);
					if (!dcomp.is_zero())
						dv.add_part({v}, dcomp);
				}
				term = wedge(term, dv);
				if (term.is_zero())
					break;
			}
			r = r + term;
		}
		return r;
	}

	int top_degree() const
	{
		int d = -1;
		for (auto& [s, c] : parts)
			d = std::max(d, (int)s.size());
		return d;
	}
};

// Iterated integration region: variables with polynomial bounds referring
// only to earlier (outer) entries. Integration eliminates variables from
// the innermost end.
struct BoundChain
{
	struct Var
	{
		int var;
		Poly lo, hi;
	};
	std::vector<Var> vars; // outermost first

	// integrate a polynomial over the chain; the result depends only on
	// variables outside the chain
	Poly integrate(Poly p) const
	{
		for (auto it = vars.rbegin(); it != vars.rend(); ++it)
			p = p.integrate(it->var, it->lo, it->hi);
		return p;
	}
};

// fiber integration over the region described by the chain in the t_vars:
// keeps the components containing every dt, extracts them in front with the
// orientation sign, integrates the coefficient.
inline PolyForm pushforward_over(const PolyForm& a,
                                 const std::vector<int>& t_vars,
                                 const BoundChain& chain)
{
	PolyForm r(a.nvars);
	int k = (int)t_vars.size();
	for (auto& [s, c] : a.parts)
	{
		// split s into t-symbols and the rest
		std::vector<int> rest;
		std::vector<bool> seen(k, false);
		bool extra_t = false;
		for (int sym : s)
		{
			auto it = std::find(t_vars.begin(), t_vars.end(), sym);
			if (it != t_vars.end())
				seen[it - t_vars.begin()] = true;
			else
				rest.push_back(sym);
		}
		bool all = true;
		for (bool b : seen)
			all = all && b;
		if (!all || extra_t)
			continue;
		// sign to reorder s into (t_1..t_k, rest): count transpositions
		std::vector<int> order;
		for (int v : t_vars)
			order.push_back(v);
		for (int v : rest)
			order.push_back(v);
		// permutation sign from sorted s to the target order
		std::vector<int> src(s.begin(), s.end());
		int sign = 1;
		for (size_t i = 0; i < order.size(); ++i)
		{
			size_t j = std::find(src.begin(), src.end(), order[i]) -
			           src.begin();
			// bubble it to position i
			for (size_t t = j; t > i; --t)
			{
				std::swap(src[t], src[t - 1]);
				sign = -sign;
			}
		}
		Poly val = chain.integrate(c);
		if (!val.is_zero())
			r.add_part(rest, sign > 0 ? val : -val);
	}
	(void)k;
	return r;
}

// pushforward over the standard simplex 1 >= t_1 >= ... >= t_k >= 0
inline PolyForm simplex_pushforward(const PolyForm& a,
                                    const std::vector<int>& t_vars)
{
	BoundChain chain;
	for (size_t i = 0; i < t_vars.size(); ++i)
	{
		Poly hi = i == 0 ? Poly::constant(a.nvars, 1)
		                 : Poly::var(a.nvars, t_vars[i - 1]);
		chain.vars.push_back({t_vars[i], Poly::constant(a.nvars, 0), hi});
	}
	return pushforward_over(a, t_vars, chain);
}

} // namespace koszul
