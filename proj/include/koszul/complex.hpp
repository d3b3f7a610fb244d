#pragma once

#include "koszul/graded.hpp"

#include <functional>
#include <optional>

namespace koszul {

// Degree-homogeneous linear map of a graded module into itself (or another),
// stored by generator images.
struct LinearMap
{
	const GradedModule* src = nullptr;
	const GradedModule* dst = nullptr;
	int degree = 0;
	int nvars = 0;
	std::vector<GradedElement> images; // per src generator

	LinearMap() = default;
	LinearMap(const GradedModule& s, const GradedModule& d, int deg, int nv)
	    : src(&s), dst(&d), degree(deg), nvars(nv),
	      images(s.size(), GradedElement(nv))
	{
	}

	void set(int i, GradedElement v)
	{
		for (auto& [j, c] : v.coeffs)
			if (dst->degree(j) != src->degree(i) + degree)
				throw std::invalid_argument("image of " + src->label(i) +
				                            " is not degree-homogeneous");
		images[i] = std::move(v);
	}

	GradedElement apply(const GradedElement& e) const
	{
		GradedElement r(nvars);
		for (auto& [i, c] : e.coeffs)
			r += c * images[i];
		return r;
	}

	bool is_zero() const
	{
		for (auto& im : images)
			if (!im.is_zero())
				return false;
		return true;
	}

	friend LinearMap compose(const LinearMap& f, const LinearMap& g)
	{
		LinearMap r(*g.src, *f.dst, f.degree + g.degree, g.nvars);
		for (int i = 0; i < g.src->size(); ++i)
			r.images[i] = f.apply(g.images[i]);
		return r;
	}
};

struct ComplexReport
{
	std::vector<std::string> failures; // labels with d(d(e)) != 0
	bool ok() const { return failures.empty(); }
};

// (E, d) with d*d = 0 checked on every basis element at construction.
struct Complex
{
	GradedModule module;
	LinearMap d;
	int direction; // +1 cochain, -1 chain

	Complex(GradedModule m, LinearMap diff, int dir, bool enforce = true)
	    : module(std::move(m)), d(std::move(diff)), direction(dir)
	{
		d.src = d.dst = &module;
		if (d.degree != dir)
			throw std::invalid_argument("differential degree mismatch");
		if (enforce && !check().ok())
			throw std::invalid_argument("differential does not square to zero");
	}

	ComplexReport check() const
	{
		ComplexReport rep;
		for (int i = 0; i < module.size(); ++i)
			if (!d.apply(d.images[i]).is_zero())
				rep.failures.push_back(module.label(i));
		return rep;
	}
};

inline ComplexReport check_complex(const Complex& c) { return c.check(); }

// Chain-cochain (stacky) bigraded complex: d raises the cochain index i,
// delta lowers the chain index j, and the stored pair anticommutes.
// A commuting input pair is accepted and delta is twisted by (-1)^i
// internally, so both sign conventions of the total differential are
// representable by the single invariant (d+delta)^2 = 0.
struct StackyComplex
{
	struct BiGen
	{
		std::string label;
		int i; // cochain degree
		int j; // chain degree
	};
	std::vector<BiGen> gens;
	GradedModule total; // graded by i - j
	LinearMap d, delta;
	int nvars = 0;

	StackyComplex(std::vector<BiGen> g,
	              const std::function<GradedElement(int)>& dval,
	              const std::function<GradedElement(int)>& deltaval, int nv,
	              bool commuting_pair = false)
	    : gens(std::move(g)), nvars(nv)
	{
		std::vector<GradedModule::Gen> tg;
		for (auto& bg : gens)
			tg.push_back({bg.label, bg.i - bg.j});
		total = GradedModule(tg);
		d = LinearMap(total, total, 1, nvars);
		delta = LinearMap(total, total, 1, nvars);
		for (int k = 0; k < (int)gens.size(); ++k)
		{
			GradedElement dv = dval(k);
			for (auto& [l, c] : dv.coeffs)
				if (gens[l].i != gens[k].i + 1 || gens[l].j != gens[k].j)
					throw std::invalid_argument("d is not bidegree (1,0)");
			d.set(k, dv);
			GradedElement sv = deltaval(k);
			for (auto& [l, c] : sv.coeffs)
				if (gens[l].i != gens[k].i || gens[l].j != gens[k].j - 1)
					throw std::invalid_argument("delta is not bidegree (0,-1)");
			if (commuting_pair && (gens[k].i & 1))
				sv = Rational(-1) * sv;
			delta.set(k, sv);
		}
		auto dd = compose(d, d), ss = compose(delta, delta);
		LinearMap mix(total, total, 2, nvars);
		for (int k = 0; k < total.size(); ++k)
			mix.images[k] = d.apply(delta.images[k]) + delta.apply(d.images[k]);
		for (int k = 0; k < total.size(); ++k)
			if (!dd.images[k].is_zero() || !ss.images[k].is_zero() ||
			    !mix.images[k].is_zero())
				throw std::invalid_argument("(d+delta)^2 != 0 at " +
				                            gens[k].label);
	}
};

// Total differential D = d + delta on the product total complex; D^2 = 0 by
// the construction invariant.
inline LinearMap total_differential(const StackyComplex& s)
{
	LinearMap D(s.total, s.total, 1, s.nvars);
	for (int k = 0; k < s.total.size(); ++k)
		D.images[k] = s.d.images[k] + s.delta.images[k];
	return D;
}

} // namespace koszul
