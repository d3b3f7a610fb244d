#pragma once

#include "koszul/linfty.hpp"

namespace koszul {

// Chevalley-Eilenberg dual of an L-infinity algebroid: the free cdga on the
// shifted duals together with the homological vector field Q. Generator i of
// the algebra is the dual of carrier generator i.
struct NQStructure
{
	Cdga algebra;
	GradedModule carrier;
	Derivation Q;

	NQStructure() = default;
	NQStructure(Cdga a, GradedModule c, Derivation q)
	    : algebra(std::move(a)), carrier(std::move(c)), Q(std::move(q))
	{
		Q.rebind(algebra);
	}
	NQStructure(const NQStructure& o)
	    : algebra(o.algebra), carrier(o.carrier), Q(o.Q)
	{
		Q.rebind(algebra);
	}
	NQStructure(NQStructure&& o) noexcept
	    : algebra(std::move(o.algebra)), carrier(std::move(o.carrier)),
	      Q(std::move(o.Q))
	{
		Q.rebind(algebra);
	}
	NQStructure& operator=(const NQStructure& o)
	{
		algebra = o.algebra;
		carrier = o.carrier;
		Q = o.Q;
		Q.rebind(algebra);
		return *this;
	}
	NQStructure& operator=(NQStructure&& o) noexcept
	{
		algebra = std::move(o.algebra);
		carrier = std::move(o.carrier);
		Q = std::move(o.Q);
		Q.rebind(algebra);
		return *this;
	}
};

// Constant contraction field: kills chart variables, pairs dual generators
// with the carrier basis.
inline Derivation contraction_field(const NQStructure& N, int gen)
{
	Derivation d(N.algebra, N.carrier.degree(gen));
	d.set_gen(gen, CdgaElement::one(N.algebra));
	return d;
}

namespace detail {

// Coefficient the commutator extraction assigns to a single monomial term:
// with Q(b*) = word, the n-fold contraction-commutator against `tuple`
// produces K * b. Calibrating against this K pins every sign and
// multiplicity convention to the derived-bracket formula.
inline Rational extraction_coefficient(const NQStructure& N,
                                       const std::vector<int>& tuple,
                                       const Word& word, int probe_gen)
{
	Derivation P(N.algebra, 1, /*strict=*/false);
	P.set_gen(probe_gen, word_element(N.algebra, word));
	Derivation B = P;
	for (int t : tuple)
		B = compose_bracket(B, contraction_field(N, t));
	return B.on_gen[probe_gen].body().constant_term();
}

} // namespace detail

// Builds Q from the brackets: the anchor feeds the action on chart
// functions, each stored n-bracket value contributes a word of duals whose
// coefficient is calibrated so that derived_brackets inverts build_Q
// exactly.
inline NQStructure build_Q(const LInftyStructure& L, bool verify = true)
{
	if (verify)
	{
		// identities at arity n mix brackets of arities i + j = n + 1, so a
		// structure with top stored arity m can first fail at 2m - 1
		auto chk = check_linfty(L, std::max(1, 2 * L.max_arity() - 1));
		if (!chk.pass())
		{
			std::string msg = "structure fails the generalized Jacobi identity";
			if (auto w = chk.witness())
			{
				msg += " at arity " + std::to_string(w->first) + " on (";
				for (size_t i = 0; i < w->second.size(); ++i)
					msg += (i ? " " : "") + L.carrier.label(w->second[i]);
				msg += ")";
			}
			if (!chk.structural.empty())
				msg += "; " + chk.structural.front();
			throw std::invalid_argument(msg);
		}
	}

	std::vector<Cdga::Gen> dual_gens;
	for (auto& g : L.carrier.gens)
		dual_gens.push_back({g.label + "*", -g.degree});
	NQStructure N{Cdga(L.nvars, L.var_names, dual_gens), L.carrier, {}};
	N.Q = Derivation(N.algebra, 1);

	// action on chart functions through the anchor
	for (int i = 0; i < L.nvars; ++i)
	{
		CdgaElement v(N.algebra);
		for (auto& [g, vf] : L.anchor)
			v += vf.comp[i] * CdgaElement::generator(N.algebra, g);
		N.Q.set_var(i, v);
	}

	// dualized brackets, one word per stored sorted tuple
	std::vector<CdgaElement> on_gen(N.algebra.ngens(),
	                                CdgaElement(N.algebra));
	for (auto& [n, table] : L.brackets)
		for (auto& [tuple, value] : table)
		{
			Word word(tuple.begin(), tuple.end());
			int probe = value.coeffs.begin()->first;
			Rational K =
			    detail::extraction_coefficient(N, tuple, word, probe);
			for (auto& [b, coeff] : value.coeffs)
				on_gen[b] += (coeff * (Rational(1) / K)) *
				             word_element(N.algebra, word);
		}
	for (int g = 0; g < N.algebra.ngens(); ++g)
		N.Q.set_gen(g, on_gen[g]);

	if (verify)
	{
		auto verdict = is_homological(N.Q);
		if (!verdict.ok)
			throw std::logic_error("constructed Q fails Q^2 = 0 at " +
			                       verdict.witness);
	}
	return N;
}

// Voronov's higher derived brackets: iterated commutators with constant
// contraction fields, projected to the fiber-constant part. The anchor is
// read off the action on chart functions.
inline LInftyStructure derived_brackets(const NQStructure& N,
                                        int max_arity = 0)
{
	auto verdict = is_homological(N.Q);
	if (!verdict.ok)
		throw std::invalid_argument("Q is not homological; witness " +
		                            verdict.witness);
	int bound = max_arity;
	if (bound == 0)
	{
		// longest generator word appearing in Q
		size_t w = 1;
		for (auto& v : N.Q.on_gen)
			for (auto& [word, c] : v.terms)
				w = std::max(w, word.size());
		bound = (int)w;
	}

	LInftyStructure L(N.algebra.nvars, N.algebra.var_names, N.carrier);
	for (int g = 0; g < N.carrier.size(); ++g)
	{
		if (N.carrier.degree(g) != -1)
			continue;
		VectorField vf(L.nvars);
		Derivation c = contraction_field(N, g);
		bool nonzero = false;
		for (int i = 0; i < L.nvars; ++i)
		{
			vf.comp[i] = c.apply(N.Q.on_var[i]).body();
			nonzero = nonzero || !vf.comp[i].is_zero();
		}
		if (nonzero)
			L.set_anchor(g, vf);
	}
	for (int n = 1; n <= bound; ++n)
		for (auto& tuple : sorted_tuples(N.carrier, n))
		{
			Derivation B = N.Q;
			for (int t : tuple)
				B = compose_bracket(B, contraction_field(N, t));
			GradedElement value(L.nvars);
			for (int b = 0; b < N.carrier.size(); ++b)
				value.add(b, B.on_gen[b].body());
			if (!value.is_zero())
				L.set_bracket(n, tuple, std::move(value));
		}
	return L;
}

// --- Chevalley-Eilenberg complex with coefficients -------------------------

// Connection data for a representation of a Lie-algebroid-level structure
// (carrier concentrated in degree -1) on a bounded complex of free modules:
// nabla_a(e) for each carrier generator a and module generator e.
struct CeCoefficientData
{
	// [carrier gen][module gen] -> module element
	std::vector<std::vector<GradedElement>> nabla;
};

struct CeComplexResult
{
	bool flat = true;
	std::vector<std::string> witnesses;
	std::optional<StackyComplex> complex; // present iff flat

	// basis bookkeeping: (poly monomial, increasing word S, module gen)
	struct BasisKey
	{
		Poly::Monomial mono;
		std::vector<int> word;
		int egen;
		auto operator<=>(const BasisKey&) const = default;
	};
	std::vector<BasisKey> basis;
};

namespace detail {

inline int position_sign(const std::vector<int>& word, int a)
{
	// sign of inserting a in front of an increasing word it doesn't contain
	int s = 1, i = 0;
	for (int g : word)
	{
		if (g == a)
			return 0;
		if (g < a)
			s = -s;
		(void)i;
	}
	return s;
}

} // namespace detail

// CE complex of a representation, modelled on the finite basis of
// coefficient monomials of total degree <= poly_bound. The operation
// refuses data whose differential leaves the bounded slice. Flatness
// (d^2 = 0) is reported, not assumed.
inline CeComplexResult ce_with_coefficients(const LInftyStructure& L,
                                            const Complex& E,
                                            const CeCoefficientData& data,
                                            int poly_bound)
{
	for (auto& g : L.carrier.gens)
		if (g.degree != -1)
			throw std::invalid_argument(
			    "coefficients are supported for degree -1 carriers");
	int na = L.carrier.size();
	int nv = L.nvars;

	// enumerate monomials of total degree <= bound
	std::vector<Poly::Monomial> monos;
	Poly::Monomial cur(nv, 0);
	std::function<void(int, int)> rec = [&](int var, int left) {
		if (var == nv)
		{
			monos.push_back(cur);
			return;
		}
		for (int e = 0; e <= left; ++e)
		{
			cur[var] = e;
			rec(var + 1, left - e);
		}
		cur[var] = 0;
	};
	rec(0, poly_bound);
	std::sort(monos.begin(), monos.end());

	std::vector<std::vector<int>> words;
	for (int l = 0; l <= na; ++l)
		for (auto& t : sorted_tuples(GradedModule([&] {
			     std::vector<GradedModule::Gen> gg;
			     for (auto& g : L.carrier.gens)
				     gg.push_back({g.label, 1}); // odd duals
			     return gg;
		     }()), l))
		{
			bool strict = true;
			for (size_t i = 0; i + 1 < t.size(); ++i)
				if (t[i] == t[i + 1])
					strict = false;
			if (strict)
				words.push_back(t);
		}

	CeComplexResult res;
	std::map<CeComplexResult::BasisKey, int> index;
	std::vector<StackyComplex::BiGen> bigens;
	for (auto& w : words)
		for (int e = 0; e < E.module.size(); ++e)
			for (auto& m : monos)
			{
				CeComplexResult::BasisKey k{m, w, e};
				index[k] = (int)res.basis.size();
				res.basis.push_back(k);
				std::string lbl = "m";
				for (unsigned x : m)
					lbl += std::to_string(x);
				lbl += "|";
				for (int g : w)
					lbl += L.carrier.label(g);
				lbl += "|" + E.module.label(e);
				int j = -E.module.degree(e) * E.direction *
				        (E.direction == -1 ? -1 : 1);
				// chain degree: negate cochain grading
				j = E.direction == 1 ? -E.module.degree(e)
				                     : E.module.degree(e);
				bigens.push_back({lbl, (int)w.size(), j});
			}

	// nabla_a on a module element with polynomial coefficient:
	// nabla_a(f e) = rho(a)[f] e + f nabla_a(e)
	auto nabla = [&](int a, const Poly& f,
	                 int egen) -> std::vector<std::pair<int, Poly>> {
		std::vector<std::pair<int, Poly>> out;
		Poly rf = L.anchor_of(a).apply(f);
		if (!rf.is_zero())
			out.push_back({egen, rf});
		for (auto& [e2, c] : data.nabla[a][egen].coeffs)
		{
			Poly t = f * c;
			if (!t.is_zero())
				out.push_back({e2, t});
		}
		return out;
	};

	// d_nabla on basis element (m, S, e): evaluate on increasing tuples T
	// of size |S|+1 by the Koszul formula.
	auto dval = [&](int k) {
		GradedElement out(0);
		auto& key = res.basis[k];
		int n = (int)key.word.size();
		Poly f = Poly::monomial(nv, key.mono, 1);
		for (auto& T : words)
		{
			if ((int)T.size() != n + 1)
				continue;
			// accumulated value of d_nabla(omega)(T) as poly combos of egens
			std::map<int, Poly> val;
			auto add = [&](int eg, const Poly& c) {
				if (c.is_zero())
					return;
				auto [it, fresh] = val.emplace(eg, c);
				if (!fresh)
					it->second += c;
			};
			// first sum: (-1)^{i+1} nabla_{T_i} omega(T minus i)
			for (int i = 0; i <= n; ++i)
			{
				std::vector<int> rest;
				for (int j = 0; j <= n; ++j)
					if (j != i)
						rest.push_back(T[j]);
				if (rest != key.word)
					continue;
				int sgn = (i % 2 == 0) ? 1 : -1; // (-1)^{(i+1)+1}, 1-based
				for (auto& [eg, c] : nabla(T[i], f, key.egen))
					add(eg, Rational(sgn) * c);
			}
			// second sum: (-1)^{i+j} omega([T_i,T_j], T minus {i,j})
			for (int i = 0; i <= n; ++i)
				for (int j = i + 1; j <= n; ++j)
				{
					auto br = L.bracket_gens(2, {T[i], T[j]});
					if (br.is_zero())
						continue;
					std::vector<int> rest;
					for (int l = 0; l <= n; ++l)
						if (l != i && l != j)
							rest.push_back(T[l]);
					for (auto& [g, c] : br.coeffs)
					{
						// omega(g, rest) with plain antisymmetric sign
						std::vector<int> tup = {g};
						tup.insert(tup.end(), rest.begin(), rest.end());
						// sort with parity sign
						int s = 1;
						for (size_t p = 0; p + 1 < tup.size(); ++p)
							for (size_t q = 0; q + 1 < tup.size() - p; ++q)
								if (tup[q] > tup[q + 1])
								{
									std::swap(tup[q], tup[q + 1]);
									s = -s;
								}
						bool repeat = false;
						for (size_t p = 0; p + 1 < tup.size(); ++p)
							repeat |= tup[p] == tup[p + 1];
						if (repeat || tup != key.word)
							continue;
						int sgn =
						    (((i + 1) + (j + 1)) % 2 == 0 ? 1 : -1) * s;
						add(key.egen, Rational(sgn) * c * f);
					}
				}
			// project onto the bounded monomial basis
			for (auto& [eg, c] : val)
				for (auto& [m, coef] : c.terms())
				{
					CeComplexResult::BasisKey kk{m, T, eg};
					auto it = index.find(kk);
					if (it == index.end())
						throw std::invalid_argument(
						    "coefficient degree bound exceeded");
					out.add(it->second, Poly::constant(0, coef));
				}
		}
		return out;
	};

	auto deltaval = [&](int k) {
		GradedElement out(0);
		auto& key = res.basis[k];
		int sgn = (key.word.size() % 2 == 0) ? 1 : -1;
		for (auto& [e2, c] : E.d.images[key.egen].coeffs)
		{
			Poly prod = Poly::monomial(nv, key.mono, 1) * c;
			for (auto& [m2, coef2] : prod.terms())
			{
				CeComplexResult::BasisKey kk{m2, key.word, e2};
				auto it = index.find(kk);
				if (it == index.end())
					throw std::invalid_argument(
					    "coefficient degree bound exceeded");
				out.add(it->second, Poly::constant(0, Rational(sgn) * coef2));
			}
		}
		return out;
	};

	// flatness check: d^2 = 0 on every basis element
	{
		std::vector<GradedElement> dimg(res.basis.size());
		for (int k = 0; k < (int)res.basis.size(); ++k)
			dimg[k] = dval(k);
		for (int k = 0; k < (int)res.basis.size(); ++k)
		{
			GradedElement dd(0);
			for (auto& [l, c] : dimg[k].coeffs)
				dd += c * dimg[l];
			if (!dd.is_zero())
			{
				res.flat = false;
				res.witnesses.push_back(bigens[k].label);
			}
		}
	}
	if (res.flat)
		res.complex.emplace(bigens, dval, deltaval, 0, false);
	return res;
}

} // namespace koszul
