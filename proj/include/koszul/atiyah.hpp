#pragma once

#include "koszul/ce_dual.hpp"
#include "koszul/zconn.hpp"

namespace koszul {

// An explicitly presented pair: a sub-structure spanned by a subset of the
// carrier generators, closed under all brackets and the differential.
struct PairData
{
	LInftyStructure g;
	std::vector<int> h_gens; // strictly increasing generator indices
};

// Workspace for Atiyah computations: the ambient and sub CE algebras, the
// extended algebra of the sub side with one marker generator per ambient
// dual (the dual leg), and the dual restriction map.
struct AtiyahSetup
{
	NQStructure ambient; // O(g), Q_g
	NQStructure sub;     // O(h), Q_h
	Cdga ext;            // O(h) with markers appended
	Derivation dext;     // Q_h on O(h) generators, J(Q_g .) on markers
	std::vector<int> h_gens;
	std::vector<int> h_pos;   // ambient gen -> position in h (-1 if normal)
	int marker_off = 0;       // first marker index in ext
};

namespace detail {

// iota*: O(g) -> O(h): kill normal duals, renumber the rest
inline CdgaElement restrict_to_sub(const AtiyahSetup& s, const CdgaElement& e)
{
	CdgaElement r(s.sub.algebra);
	for (auto& [w, c] : e.terms)
	{
		Word w2;
		bool dead = false;
		for (int g : w)
		{
			if (s.h_pos[g] < 0)
			{
				dead = true;
				break;
			}
			w2.push_back(s.h_pos[g]);
		}
		if (!dead)
			r.add_term(w2, c);
	}
	return r;
}

// embed O(h) into the extended algebra
inline CdgaElement embed_sub(const AtiyahSetup& s, const CdgaElement& e)
{
	CdgaElement r(s.ext);
	for (auto& [w, c] : e.terms)
		r.add_term(w, c);
	return r;
}

// J: O(g) -> O(h) tensor g-dual, valued in the extended algebra and linear
// in the markers. Each generator of a term is split off to the right with
// its Koszul sign, the remaining word is restricted to the sub side.
inline CdgaElement j_split(const AtiyahSetup& s, const CdgaElement& e)
{
	CdgaElement r(s.ext);
	const Cdga& G = s.ambient.algebra;
	for (auto& [w, c] : e.terms)
		for (size_t i = 0; i < w.size(); ++i)
		{
			// sign: move letter i past the suffix
			int suffix = 0;
			for (size_t j = i + 1; j < w.size(); ++j)
				suffix += G.gens[w[j]].degree;
			int sign = ((G.gens[w[i]].degree & 1) && (suffix & 1)) ? -1 : 1;
			Word rest;
			bool dead = false;
			for (size_t j = 0; j < w.size(); ++j)
			{
				if (j == i)
					continue;
				if (s.h_pos[w[j]] < 0)
				{
					dead = true;
					break;
				}
				rest.push_back(s.h_pos[w[j]]);
			}
			if (dead)
				continue;
			rest.push_back(s.marker_off + w[i]);
			r.add_term(rest, sign > 0 ? c : -c);
		}
	return r;
}

} // namespace detail

inline AtiyahSetup atiyah_setup(const PairData& pair)
{
	AtiyahSetup s;
	s.h_gens = pair.h_gens;
	s.h_pos.assign(pair.g.carrier.size(), -1);
	for (size_t i = 0; i < pair.h_gens.size(); ++i)
		s.h_pos[pair.h_gens[i]] = (int)i;

	// the sub-structure: restricted brackets and anchor; closure validated
	std::vector<GradedModule::Gen> hg;
	for (int g : pair.h_gens)
		hg.push_back(pair.g.carrier.gens[g]);
	LInftyStructure H(pair.g.nvars, pair.g.var_names, GradedModule(hg));
	for (auto& [n, table] : pair.g.brackets)
		for (auto& [tuple, value] : table)
		{
			bool inside = true;
			for (int g : tuple)
				inside = inside && s.h_pos[g] >= 0;
			if (!inside)
				continue;
			GradedElement v(pair.g.nvars);
			for (auto& [g, c] : value.coeffs)
			{
				if (s.h_pos[g] < 0)
					throw std::invalid_argument(
					    "subset is not closed under the brackets");
				v.add(s.h_pos[g], c);
			}
			std::vector<int> t2;
			for (int g : tuple)
				t2.push_back(s.h_pos[g]);
			if (!v.is_zero())
				H.set_bracket(n, t2, v);
		}
	for (auto& [g, vf] : pair.g.anchor)
		if (s.h_pos[g] >= 0)
			H.set_anchor(s.h_pos[g], vf);

	s.ambient = build_Q(pair.g);
	s.sub = build_Q(H);

	// extended algebra: sub duals then one marker per ambient dual
	std::vector<Cdga::Gen> gens = s.sub.algebra.gens;
	s.marker_off = (int)gens.size();
	for (auto& g : s.ambient.algebra.gens)
		gens.push_back({"[" + g.name + "]", g.degree});
	s.ext = Cdga(pair.g.nvars, pair.g.var_names, gens);

	s.dext = Derivation(s.ext, 1);
	for (int i = 0; i < s.ext.nvars; ++i)
		s.dext.set_var(i, detail::embed_sub(s, s.sub.Q.on_var[i]));
	for (int g = 0; g < s.sub.algebra.ngens(); ++g)
		s.dext.set_gen(g, detail::embed_sub(s, s.sub.Q.on_gen[g]));
	// markers carry the normal-module structure J(Q_g(dual))
	for (int g = 0; g < s.ambient.algebra.ngens(); ++g)
		s.dext.set_gen(s.marker_off + g,
		               detail::j_split(s, s.ambient.Q.on_gen[g]));
	return s;
}

struct AtiyahResult
{
	AMatrix alpha;           // over the extended algebra, marker-linear
	bool normal_valued;      // no markers of sub generators appear
	bool closed;             // E^{perp(x)End}(alpha) = 0
};

// Validates that the extension matrix over O(g) restricts to the given flat
// sub-side connection, then computes alpha = (J x 1)(R) and checks the
// cocycle conditions exactly. Matrices are given on the module generators.
class AtiyahWorkspace
{
  public:
	AtiyahWorkspace(const PairData& pair, GradedModule module)
	    : setup_(atiyah_setup(pair)), module_(std::move(module)),
	      base_g_(setup_.ambient.algebra, setup_.ambient.Q),
	      base_h_(setup_.sub.algebra, setup_.sub.Q),
	      base_ext_(setup_.ext, setup_.dext)
	{
	}

	const AtiyahSetup& setup() const { return setup_; }
	const BaseCdga& base_g() const { return base_g_; }
	const BaseCdga& base_h() const { return base_h_; }
	const BaseCdga& base_ext() const { return base_ext_; }
	const GradedModule& module() const { return module_; }

	// the D^{h,E} part as a connection over O(h); must be flat
	ZConnection sub_connection(const AMatrix& Dh) const
	{
		ZConnection c(base_h_, module_);
		c.m = Dh;
		if (!is_flat(c))
			throw std::invalid_argument("sub-side connection is not flat");
		return c;
	}

	// checks the extension restricts to Dh
	void validate_extension(const AMatrix& Dg, const AMatrix& Dh) const
	{
		for (int g = 0; g < module_.size(); ++g)
			for (int e = 0; e < module_.size(); ++e)
			{
				auto r = detail::restrict_to_sub(setup_, Dg.at(g, e));
				if (!(r == Dh.at(g, e)))
					throw std::invalid_argument(
					    "extension does not restrict to the sub-side "
					    "connection at (" + module_.label(g) + ", " +
					    module_.label(e) + ")");
			}
	}

	AMatrix curvature_of_extension(const AMatrix& Dg) const
	{
		ZConnection c(base_g_, module_);
		c.m = Dg;
		return curvature(c);
	}

	// alpha = (J x 1) R, entrywise
	AMatrix atiyah_cocycle_matrix(const AMatrix& Dg) const
	{
		AMatrix R = curvature_of_extension(Dg);
		AMatrix alpha(base_ext_, module_, module_, 2);
		for (auto& [k, v] : R.entries)
		{
			auto jv = detail::j_split(setup_, v);
			if (!jv.is_zero())
				alpha.entries[k] = jv;
		}
		return alpha;
	}

	bool normal_valued(const AMatrix& alpha) const
	{
		for (auto& [k, v] : alpha.entries)
			for (auto& [w, c] : v.terms)
				for (int g : w)
					if (g >= setup_.marker_off &&
					    setup_.h_pos[g - setup_.marker_off] >= 0)
						return false;
		return true;
	}

	// the normal-module covariant derivative on marker-linear matrices
	AMatrix normal_covariant(const AMatrix& Dh, const AMatrix& a) const
	{
		AMatrix D(base_ext_, module_, module_, 1);
		for (auto& [k, v] : Dh.entries)
			D.entries[k] = detail::embed_sub(setup_, v);
		ZConnection c(base_ext_, module_);
		c.m = D;
		return covariant(c, a);
	}

	AtiyahResult atiyah(const AMatrix& Dg, const AMatrix& Dh) const
	{
		validate_extension(Dg, Dh);
		sub_connection(Dh);
		AtiyahResult res;
		res.alpha = atiyah_cocycle_matrix(Dg);
		res.normal_valued = normal_valued(res.alpha);
		res.closed = normal_covariant(Dh, res.alpha).is_zero();
		return res;
	}

	// exact primitive for the difference of two extensions:
	// alpha - alpha' = E((J x 1)(Dg - Dg'))
	struct Difference
	{
		AMatrix primitive;
		bool exact;
	};
	Difference difference(const AMatrix& Dg, const AMatrix& Dg2,
	                      const AMatrix& Dh) const
	{
		auto a1 = atiyah_cocycle_matrix(Dg);
		auto a2 = atiyah_cocycle_matrix(Dg2);
		AMatrix omega = Dg - Dg2;
		omega.degree = 1;
		AMatrix jom(base_ext_, module_, module_, 1);
		for (auto& [k, v] : omega.entries)
		{
			auto jv = detail::j_split(setup_, v);
			if (!jv.is_zero())
				jom.entries[k] = jv;
		}
		auto dprim = normal_covariant(Dh, jom);
		bool ok = (a1 - a2) == dprim;
		return {jom, ok};
	}

  private:
	AtiyahSetup setup_;
	GradedModule module_;
	BaseCdga base_g_, base_h_, base_ext_;
};

} // namespace koszul
