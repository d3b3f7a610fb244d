#pragma once

#include "koszul/cdga.hpp"
#include "koszul/complex.hpp"

#include <optional>

namespace koszul {

// Polynomial vector field on the chart: one coefficient per chart variable.
struct VectorField
{
	std::vector<Poly> comp;

	VectorField() = default;
	explicit VectorField(int nvars) : comp(nvars, Poly(nvars)) {}

	bool is_zero() const
	{
		for (auto& c : comp)
			if (!c.is_zero())
				return false;
		return true;
	}
	Poly apply(const Poly& f) const
	{
		Poly r(f.nvars());
		for (int i = 0; i < (int)comp.size(); ++i)
			r += comp[i] * f.derivative(i);
		return r;
	}
	friend VectorField lie_bracket(const VectorField& a, const VectorField& b)
	{
		VectorField r((int)a.comp.size());
		for (int i = 0; i < (int)a.comp.size(); ++i)
			r.comp[i] = a.apply(b.comp[i]) - b.apply(a.comp[i]);
		return r;
	}
	friend VectorField operator-(const VectorField& a, const VectorField& b)
	{
		VectorField r((int)a.comp.size());
		for (int i = 0; i < (int)a.comp.size(); ++i)
			r.comp[i] = a.comp[i] - b.comp[i];
		return r;
	}
	bool operator==(const VectorField& o) const { return comp == o.comp; }
};

// L-infinity algebroid in the shifted picture: the carrier holds the shifted
// generators (degrees <= -1; what is classically degree 0 sits in degree -1
// here), every n-bracket is graded symmetric of degree +1, and the anchor
// acts on degree -1 generators. The binary bracket extends coefficient
// functions by the anchor Leibniz rule; all other arities are linear over
// the chart ring.
struct LInftyStructure
{
	int nvars = 0;
	std::vector<std::string> var_names;
	GradedModule carrier;
	// arity -> sorted generator tuple -> value
	std::map<int, std::map<std::vector<int>, GradedElement>> brackets;
	std::map<int, VectorField> anchor; // on degree -1 generators

	LInftyStructure() = default;
	LInftyStructure(int nv, std::vector<std::string> names, GradedModule mod)
	    : nvars(nv), var_names(std::move(names)), carrier(std::move(mod))
	{
		for (auto& g : carrier.gens)
			if (g.degree > -1)
				throw std::invalid_argument(
				    "shifted carrier degrees must be <= -1");
	}

	int max_arity() const
	{
		return brackets.empty() ? 0 : brackets.rbegin()->first;
	}

	void set_bracket(int n, std::vector<int> tuple, GradedElement value)
	{
		if ((int)tuple.size() != n)
			throw std::invalid_argument("tuple length != arity");
		if (!std::is_sorted(tuple.begin(), tuple.end()))
			throw std::invalid_argument("bracket tuples are stored sorted");
		for (size_t i = 0; i + 1 < tuple.size(); ++i)
			if (tuple[i] == tuple[i + 1] &&
			    (carrier.degree(tuple[i]) & 1))
				throw std::invalid_argument(
				    "repeated odd generator spans a zero symmetric tensor");
		int want = 1;
		for (int g : tuple)
			want += carrier.degree(g);
		for (auto& [j, c] : value.coeffs)
			if (carrier.degree(j) != want)
				throw std::invalid_argument("bracket value has wrong degree");
		if (!value.is_zero())
			brackets[n][std::move(tuple)] = std::move(value);
	}

	void set_anchor(int gen, VectorField v)
	{
		if (carrier.degree(gen) != -1)
			throw std::invalid_argument("anchor lives on degree -1 generators");
		if (!v.is_zero())
			anchor[gen] = std::move(v);
	}

	VectorField anchor_of(int gen) const
	{
		auto it = anchor.find(gen);
		return it == anchor.end() ? VectorField(nvars) : it->second;
	}

	// anchor of an element with polynomial coefficients
	VectorField anchor_of(const GradedElement& e) const
	{
		VectorField r(nvars);
		for (auto& [g, c] : e.coeffs)
		{
			auto it = anchor.find(g);
			if (it == anchor.end())
				continue;
			for (int i = 0; i < nvars; ++i)
				r.comp[i] += c * it->second.comp[i];
		}
		return r;
	}

	// Stored value on a sorted tuple (missing => 0).
	GradedElement stored(int n, const std::vector<int>& tuple) const
	{
		auto ait = brackets.find(n);
		if (ait != brackets.end())
		{
			auto it = ait->second.find(tuple);
			if (it != ait->second.end())
				return it->second;
		}
		return GradedElement(nvars);
	}

	// Bracket on generators in any order, sign-normalized on the fly.
	GradedElement bracket_gens(int n, std::vector<int> tuple) const
	{
		std::vector<int> degs(tuple.size());
		for (size_t i = 0; i < tuple.size(); ++i)
			degs[i] = carrier.degree(tuple[i]);
		int sign = sort_with_koszul_sign(tuple, degs);
		if (sign == 0)
			return GradedElement(nvars);
		auto v = stored(n, tuple);
		return sign > 0 ? v : -v;
	}

	// Multilinear, graded-symmetric extension to elements. Arity 2 inserts
	// the anchor Leibniz terms; all other arities are chart-linear.
	GradedElement bracket(const std::vector<GradedElement>& args) const
	{
		int n = (int)args.size();
		if (n == 0)
			throw std::invalid_argument("bracket needs at least one argument");
		GradedElement out(nvars);
		if (n == 2)
		{
			for (auto& [x, f] : args[0].coeffs)
				for (auto& [y, g] : args[1].coeffs)
				{
					out += (f * g) * bracket_gens(2, {x, y});
					// {f x, g y} = f g {x,y} + f rho(x)[g] y
					//            + (-1)^{|x||y|} g rho(y)[f] x
					auto rx = anchor_of(x);
					if (!rx.is_zero())
						out.add(y, f * rx.apply(g));
					auto ry = anchor_of(y);
					if (!ry.is_zero())
					{
						int s = (carrier.degree(x) & 1) &&
						                (carrier.degree(y) & 1)
						            ? -1
						            : 1;
						out.add(x, Rational(s) * (g * ry.apply(f)));
					}
				}
			return out;
		}
		std::vector<int> tuple(n);
		std::function<void(int, Poly)> rec = [&](int slot, Poly coeff) {
			if (slot == n)
			{
				out += coeff * bracket_gens(n, tuple);
				return;
			}
			for (auto& [g, c] : args[slot].coeffs)
			{
				tuple[slot] = g;
				rec(slot + 1, coeff * c);
			}
		};
		rec(0, Poly::constant(nvars, 1));
		return out;
	}

	GradedElement bracket1(const GradedElement& e) const
	{
		return bracket({e});
	}
};

// Enumerates (i, n-i) unshuffles of {0..n-1}: returns the selected i-subsets
// in increasing order; the complement keeps its order too.
inline std::vector<std::vector<int>> unshuffles(int n, int i)
{
	std::vector<std::vector<int>> out;
	std::vector<int> pick;
	std::function<void(int)> rec = [&](int start) {
		if ((int)pick.size() == i)
		{
			out.push_back(pick);
			return;
		}
		for (int k = start; k < n; ++k)
		{
			pick.push_back(k);
			rec(k + 1);
			pick.pop_back();
		}
	};
	rec(0);
	return out;
}

// J^n(x_1..x_n) = sum_{i=1}^{n} sum_{(i,n-i) unshuffles} eps(sigma)
//   { { x_{s(1)}..x_{s(i)} }_i, x_{s(i+1)}.. }_{n-i+1};
// zero for every tuple iff the structure is L-infinity.
inline GradedElement jacobiator(const LInftyStructure& L, int n,
                                const std::vector<int>& tuple)
{
	if ((int)tuple.size() != n)
		throw std::invalid_argument("jacobiator: tuple length != arity");
	std::vector<int> degs(n);
	for (int k = 0; k < n; ++k)
		degs[k] = L.carrier.degree(tuple[k]);
	GradedElement out(L.nvars);
	for (int i = 1; i <= n; ++i)
	{
		for (auto& pick : unshuffles(n, i))
		{
			// merged permutation: picked slots then the rest
			std::vector<int> image;
			std::vector<bool> used(n, false);
			for (int p : pick)
			{
				image.push_back(p);
				used[p] = true;
			}
			for (int k = 0; k < n; ++k)
				if (!used[k])
					image.push_back(k);
			int sign = koszul_sign(Permutation(image), degs);

			std::vector<int> inner;
			for (int p : pick)
				inner.push_back(tuple[p]);
			GradedElement iv = L.bracket_gens(i, inner);
			if (iv.is_zero())
				continue;
			std::vector<GradedElement> outer_args;
			outer_args.push_back(iv);
			for (int k = 0; k < n; ++k)
				if (!used[k])
					outer_args.push_back(GradedElement::gen(L.nvars, tuple[k]));
			GradedElement term = L.bracket(outer_args);
			out += Rational(sign) * term;
		}
	}
	return out;
}

struct JacobiatorReport
{
	int arity;
	std::vector<std::pair<std::vector<int>, GradedElement>> failures;
	bool pass() const { return failures.empty(); }
};

// All sorted generator tuples of the given arity (repeats only on even
// generators).
inline std::vector<std::vector<int>> sorted_tuples(const GradedModule& m,
                                                   int arity)
{
	std::vector<std::vector<int>> out;
	std::vector<int> cur;
	std::function<void(int)> rec = [&](int start) {
		if ((int)cur.size() == arity)
		{
			out.push_back(cur);
			return;
		}
		for (int g = start; g < m.size(); ++g)
		{
			if (!cur.empty() && cur.back() == g && (m.degree(g) & 1))
				continue;
			cur.push_back(g);
			rec(g);
			cur.pop_back();
		}
	};
	rec(0);
	return out;
}

struct LInftyCheck
{
	std::vector<JacobiatorReport> reports;
	std::vector<std::string> structural; // Leibniz/anchor violations
	bool pass() const
	{
		if (!structural.empty())
			return false;
		for (auto& r : reports)
			if (!r.pass())
				return false;
		return true;
	}
	std::optional<std::pair<int, std::vector<int>>> witness() const
	{
		for (auto& r : reports)
			if (!r.pass())
				return std::make_pair(r.arity, r.failures.front().first);
		return std::nullopt;
	}
};

inline LInftyCheck check_linfty(const LInftyStructure& L, int max_arity)
{
	LInftyCheck res;
	// rho o d = 0 on the 1-bracket
	for (int g = 0; g < L.carrier.size(); ++g)
	{
		auto dg = L.bracket_gens(1, {g});
		if (!L.anchor_of(dg).is_zero())
			res.structural.push_back("anchor does not annihilate d(" +
			                         L.carrier.label(g) + ")");
	}
	// anchor is a bracket morphism on degree -1 pairs
	for (int x = 0; x < L.carrier.size(); ++x)
		for (int y = x; y < L.carrier.size(); ++y)
		{
			if (L.carrier.degree(x) != -1 || L.carrier.degree(y) != -1)
				continue;
			auto lhs = L.anchor_of(L.bracket_gens(2, {x, y}));
			auto rhs = lie_bracket(L.anchor_of(x), L.anchor_of(y));
			if (!(lhs - rhs).is_zero())
				res.structural.push_back(
				    "anchor fails to intertwine the binary bracket on (" +
				    L.carrier.label(x) + ", " + L.carrier.label(y) + ")");
		}
	for (int n = 1; n <= max_arity; ++n)
	{
		JacobiatorReport rep;
		rep.arity = n;
		for (auto& t : sorted_tuples(L.carrier, n))
		{
			auto j = jacobiator(L, n, t);
			if (!j.is_zero())
				rep.failures.push_back({t, j});
		}
		res.reports.push_back(std::move(rep));
	}
	return res;
}

} // namespace koszul
