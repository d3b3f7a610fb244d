#pragma once

#include "koszul/cdga.hpp"
#include "koszul/graded.hpp"
#include "koszul/qlinalg.hpp"

#include <memory>
#include <optional>

namespace koszul {

// Base for Z-connections: a free cdga with a chosen degree-1 differential
// and an optional central curvature element c (d c = 0). The algebra is
// graded commutative, so [c, -] = 0 and d still squares to zero.
struct BaseCdga
{
	Cdga alg;
	Derivation d;
	std::optional<CdgaElement> c;

	BaseCdga() = default;
	BaseCdga(Cdga a, Derivation diff,
	         std::optional<CdgaElement> curv = std::nullopt)
	    : alg(std::move(a)), d(std::move(diff)), c(std::move(curv))
	{
		rebind_all();
		if (d.degree != 1)
			throw std::invalid_argument("base differential must have degree 1");
		auto v = is_homological(d);
		if (!v.ok)
			throw std::invalid_argument("base differential squares to " +
			                            v.witness);
		if (c && !d.apply(*c).is_zero())
			throw std::invalid_argument("curvature fails the Bianchi identity");
		if (c && !c->homogeneous(2))
			throw std::invalid_argument("curvature must have degree 2");
	}

	BaseCdga(const BaseCdga& o) : alg(o.alg), d(o.d), c(o.c) { rebind_all(); }
	BaseCdga(BaseCdga&& o) noexcept
	    : alg(std::move(o.alg)), d(std::move(o.d)), c(std::move(o.c))
	{
		rebind_all();
	}
	BaseCdga& operator=(const BaseCdga& o)
	{
		alg = o.alg;
		d = o.d;
		c = o.c;
		rebind_all();
		return *this;
	}
	BaseCdga& operator=(BaseCdga&& o) noexcept
	{
		alg = std::move(o.alg);
		d = std::move(o.d);
		c = std::move(o.c);
		rebind_all();
		return *this;
	}

  private:
	void rebind_all()
	{
		d.rebind(alg);
		if (c)
			c->rebind(alg);
	}
};

// A-linear map between graded modules tensored with the base algebra,
// stored entrywise: phi(e) = sum_g g * entry(g, e). Composition is the
// plain matrix product; no Koszul signs enter in the right-module
// convention.
struct AMatrix
{
	const BaseCdga* base = nullptr;
	GradedModule src, dst;
	int degree = 0;
	std::map<std::pair<int, int>, CdgaElement> entries; // (dst gen, src gen)

	AMatrix() = default;
	AMatrix(const BaseCdga& b, GradedModule s, GradedModule d, int deg)
	    : base(&b), src(std::move(s)), dst(std::move(d)), degree(deg)
	{
	}

	static AMatrix identity(const BaseCdga& b, const GradedModule& m)
	{
		AMatrix r(b, m, m, 0);
		for (int i = 0; i < m.size(); ++i)
			r.set(i, i, CdgaElement::one(b.alg));
		return r;
	}

	void set(int g, int e, CdgaElement v)
	{
		if (v.is_zero())
		{
			entries.erase({g, e});
			return;
		}
		if (!v.homogeneous(degree + src.degree(e) - dst.degree(g)))
			throw std::invalid_argument("matrix entry degree mismatch at (" +
			                            dst.label(g) + ", " + src.label(e) +
			                            ")");
		entries[{g, e}] = std::move(v);
	}

	CdgaElement at(int g, int e) const
	{
		auto it = entries.find({g, e});
		return it == entries.end() ? CdgaElement::zero(base->alg)
		                           : it->second;
	}

	bool is_zero() const
	{
		for (auto& [k, v] : entries)
			if (!v.is_zero())
				return false;
		return true;
	}

	friend AMatrix operator*(const AMatrix& a, const AMatrix& b)
	{
		AMatrix r(*a.base, b.src, a.dst, a.degree + b.degree);
		for (auto& [kb, vb] : b.entries)
			for (int g = 0; g < a.dst.size(); ++g)
			{
				auto va = a.entries.find({g, kb.first});
				if (va == a.entries.end())
					continue;
				CdgaElement t = va->second * vb;
				if (t.is_zero())
					continue;
				auto key = std::make_pair(g, kb.second);
				auto it = r.entries.find(key);
				if (it == r.entries.end())
					r.entries.emplace(key, t);
				else
				{
					it->second += t;
					if (it->second.is_zero())
						r.entries.erase(it);
				}
			}
		return r;
	}
	friend AMatrix operator+(AMatrix a, const AMatrix& b)
	{
		for (auto& [k, v] : b.entries)
		{
			auto it = a.entries.find(k);
			if (it == a.entries.end())
				a.entries.emplace(k, v);
			else
			{
				it->second += v;
				if (it->second.is_zero())
					a.entries.erase(it);
			}
		}
		return a;
	}
	friend AMatrix operator-(const AMatrix& a)
	{
		AMatrix r = a;
		for (auto& [k, v] : r.entries)
			v = -v;
		return r;
	}
	friend AMatrix operator-(const AMatrix& a, const AMatrix& b)
	{
		return a + (-b);
	}
	friend AMatrix operator*(const Rational& cst, AMatrix a)
	{
		if (cst == 0)
			return AMatrix(*a.base, a.src, a.dst, a.degree);
		for (auto& [k, v] : a.entries)
			v = cst * v;
		return a;
	}
	bool operator==(const AMatrix& o) const { return entries == o.entries; }

	// entrywise base differential with the row sign of the Leibniz rule
	AMatrix d_entries() const
	{
		AMatrix r(*base, src, dst, degree + 1);
		for (auto& [k, v] : entries)
		{
			CdgaElement t = base->d.apply(v);
			if ((dst.degree(k.first) & 1))
				t = -t;
			if (!t.is_zero())
				r.entries[k] = t;
		}
		return r;
	}

	// supertrace: sum over the diagonal with the parity sign of the degree
	CdgaElement supertrace() const
	{
		CdgaElement s(base->alg);
		for (int e = 0; e < src.size(); ++e)
		{
			auto it = entries.find({e, e});
			if (it == entries.end())
				continue;
			s += (src.degree(e) & 1) ? -it->second : it->second;
		}
		return s;
	}

	CdgaElement trace() const
	{
		CdgaElement s(base->alg);
		for (int e = 0; e < src.size(); ++e)
		{
			auto it = entries.find({e, e});
			if (it != entries.end())
				s += it->second;
		}
		return s;
	}
};

// Z-connection: total-degree-1 operator on E tensor A determined by its
// generator matrix and the Leibniz rule E(e w) = E(e) w + (-1)^{|e|} e dw.
struct ZConnection
{
	const BaseCdga* base = nullptr;
	GradedModule module;
	AMatrix m; // degree-1 matrix of the connection

	ZConnection() = default;
	ZConnection(const BaseCdga& b, GradedModule mod)
	    : base(&b), module(mod), m(b, mod, mod, 1)
	{
	}

	void set(int g, int e, CdgaElement v) { m.set(g, e, std::move(v)); }
};

// relative curvature R = E^2 + (- . c); A-linear of degree 2
inline AMatrix curvature(const ZConnection& conn)
{
	AMatrix R = conn.m * conn.m + conn.m.d_entries();
	if (conn.base->c)
		for (int e = 0; e < conn.module.size(); ++e)
		{
			auto key = std::make_pair(e, e);
			auto it = R.entries.find(key);
			if (it == R.entries.end())
				R.entries.emplace(key, *conn.base->c);
			else
			{
				it->second += *conn.base->c;
				if (it->second.is_zero())
					R.entries.erase(it);
			}
		}
	R.degree = 2;
	return R;
}

inline bool is_flat(const ZConnection& conn)
{
	return curvature(conn).is_zero();
}

// Morphism element between two connections: an A-linear matrix of a fixed
// total degree.
struct MorphismElement
{
	const ZConnection* from = nullptr;
	const ZConnection* to = nullptr;
	AMatrix phi;

	MorphismElement() = default;
	MorphismElement(const ZConnection& a, const ZConnection& b, int degree)
	    : from(&a), to(&b), phi(*a.base, a.module, b.module, degree)
	{
	}
};

// d_Hom(phi) = E2 o phi - (-1)^{|phi|} phi o E1 as matrices; defined for
// flat endpoints (the failure witness is the curvature entry).
inline MorphismElement d_hom(const MorphismElement& f, bool require_flat = true)
{
	if (require_flat)
	{
		auto r1 = curvature(*f.from), r2 = curvature(*f.to);
		if (!r1.is_zero() || !r2.is_zero())
		{
			auto& bad = r1.is_zero() ? r2 : r1;
			auto& conn = r1.is_zero() ? *f.to : *f.from;
			auto& [k, v] = *bad.entries.begin();
			throw std::invalid_argument(
			    "endpoint connection is not flat; curvature at (" +
			    conn.module.label(k.first) + ", " +
			    conn.module.label(k.second) + ") = " + v.str());
		}
	}
	MorphismElement r(*f.from, *f.to, f.phi.degree + 1);
	int sign = (f.phi.degree & 1) ? -1 : 1;
	r.phi = f.to->m * f.phi + f.phi.d_entries() -
	        Rational(sign) * (f.phi * f.from->m);
	r.phi.degree = f.phi.degree + 1;
	return r;
}

// covariant derivative of an endomorphism-valued element in End(E) tensor A
inline AMatrix covariant(const ZConnection& conn, const AMatrix& a)
{
	int sign = (a.degree & 1) ? -1 : 1;
	AMatrix r = conn.m * a + a.d_entries() - Rational(sign) * (a * conn.m);
	r.degree = a.degree + 1;
	return r;
}

// shift E[1] = (E^{.+1}, -E)
inline ZConnection shift(const ZConnection& conn)
{
	std::vector<GradedModule::Gen> gens;
	for (auto& g : conn.module.gens)
		gens.push_back({g.label + "[1]", g.degree - 1});
	ZConnection r(*conn.base, GradedModule(gens));
	for (auto& [k, v] : conn.m.entries)
		r.m.entries[k] = -v;
	return r;
}

struct ConeResult
{
	// stable addresses: the triangle morphisms point into these
	std::unique_ptr<ZConnection> cone;
	std::unique_ptr<ZConnection> shifted; // E[1]
	MorphismElement incl;                 // F -> C_phi
	MorphismElement proj;                 // C_phi -> E[1]
};

// cone of a closed degree-0 morphism phi: E -> F, with the triangle maps
inline ConeResult cone(const MorphismElement& f)
{
	if (f.phi.degree != 0)
		throw std::invalid_argument("cone needs a degree-0 morphism");
	auto df = d_hom(f);
	if (!df.phi.is_zero())
	{
		auto& [k, v] = *df.phi.entries.begin();
		throw std::invalid_argument("cone of a non-closed morphism; d(phi) at (" +
		                            f.to->module.label(k.first) + ", " +
		                            f.from->module.label(k.second) + ")");
	}
	auto& E1 = f.from->module;
	auto& E2 = f.to->module;
	std::vector<GradedModule::Gen> gens;
	for (auto& g : E2.gens)
		gens.push_back({"F:" + g.label, g.degree});
	for (auto& g : E1.gens)
		gens.push_back({"E[1]:" + g.label, g.degree - 1});
	int off = E2.size();

	ConeResult res;
	res.cone = std::make_unique<ZConnection>(*f.from->base, GradedModule(gens));
	for (auto& [k, v] : f.to->m.entries)
		res.cone->m.entries[{k.first, k.second}] = v;
	for (auto& [k, v] : f.phi.entries)
		res.cone->m.entries[{k.first, k.second + off}] = v;
	for (auto& [k, v] : f.from->m.entries)
		res.cone->m.entries[{k.first + off, k.second + off}] = -v;

	res.shifted = std::make_unique<ZConnection>(shift(*f.from));
	res.incl = MorphismElement(*f.to, *res.cone, 0);
	for (int e = 0; e < E2.size(); ++e)
		res.incl.phi.entries[{e, e}] = CdgaElement::one(f.to->base->alg);
	res.proj = MorphismElement(*res.cone, *res.shifted, 0);
	for (int e = 0; e < E1.size(); ++e)
		res.proj.phi.entries[{e, e + off}] =
		    CdgaElement::one(f.from->base->alg);
	return res;
}

// ---- homotopy-equivalence criterion ---------------------------------------

namespace detail {

// A^0-degree-zero part of the connection matrix per module degree: the
// differential E^0 of the underlying complex of A^0-modules.
inline std::map<std::pair<int, int>, Poly> page_zero(const ZConnection& c)
{
	std::map<std::pair<int, int>, Poly> out;
	for (auto& [k, v] : c.m.entries)
	{
		if (c.module.degree(k.first) != c.module.degree(k.second) + 1)
			continue;
		auto it = v.terms.find({});
		if (it != v.terms.end() && !it->second.is_zero())
			out[k] = it->second;
	}
	return out;
}

inline std::map<std::pair<int, int>, Poly> page_zero_map(const AMatrix& m)
{
	std::map<std::pair<int, int>, Poly> out;
	for (auto& [k, v] : m.entries)
	{
		if (m.dst.degree(k.first) != m.src.degree(k.second) + m.degree)
			continue;
		auto it = v.terms.find({});
		if (it != v.terms.end() && !it->second.is_zero())
			out[k] = it->second;
	}
	return out;
}

inline QMatrix eval_block(const std::map<std::pair<int, int>, Poly>& mp,
                          const GradedModule& dst, const GradedModule& src,
                          int srcdeg, int shiftdeg,
                          const std::vector<Rational>& pt)
{
	auto scols = src.indices_of_degree(srcdeg);
	auto drows = dst.indices_of_degree(srcdeg + shiftdeg);
	QMatrix m((int)drows.size(), (int)scols.size());
	for (int i = 0; i < (int)drows.size(); ++i)
		for (int j = 0; j < (int)scols.size(); ++j)
		{
			auto it = mp.find({drows[i], scols[j]});
			if (it != mp.end())
				m(i, j) = it->second.eval(pt);
		}
	return m;
}

} // namespace detail

// Closed degree-0 phi is a homotopy equivalence iff phi^0 is a
// quasi-isomorphism of the page-zero complexes over A^0. Verified by exact
// rank computations at a deterministic set of rational chart points, with a
// Bareiss generic-rank consistency check for polynomial entries.
inline bool is_homotopy_equivalence(const MorphismElement& f)
{
	if (f.phi.degree != 0)
		throw std::invalid_argument("criterion needs a degree-0 morphism");
	if (!d_hom(f).phi.is_zero())
		throw std::invalid_argument("criterion needs a closed morphism");

	auto d1 = detail::page_zero(*f.from);
	auto d2 = detail::page_zero(*f.to);
	auto p0 = detail::page_zero_map(f.phi);
	auto& M1 = f.from->module;
	auto& M2 = f.to->module;

	int nv = f.from->base->alg.nvars;
	std::vector<std::vector<Rational>> points;
	points.push_back(std::vector<Rational>(nv, Rational(0)));
	for (int i = 0; i < nv; ++i)
	{
		std::vector<Rational> p(nv, Rational(0));
		p[i] = 1;
		points.push_back(p);
	}
	{
		std::vector<Rational> p(nv);
		for (int i = 0; i < nv; ++i)
			p[i] = Rational(2 * i + 3, 2); // fixed generic-looking point
		points.push_back(p);
	}

	std::set<int> degrees;
	for (auto& g : M1.gens)
		degrees.insert(g.degree);
	for (auto& g : M2.gens)
		degrees.insert(g.degree);

	for (auto& pt : points)
		for (int n : degrees)
		{
			QMatrix d1n = detail::eval_block(d1, M1, M1, n, 1, pt);
			QMatrix d1p = detail::eval_block(d1, M1, M1, n - 1, 1, pt);
			QMatrix d2n = detail::eval_block(d2, M2, M2, n, 1, pt);
			QMatrix d2p = detail::eval_block(d2, M2, M2, n - 1, 1, pt);
			QMatrix ph = detail::eval_block(p0, M2, M1, n, 0, pt);

			auto K1 = kernel_basis(d1n);
			auto K2 = kernel_basis(d2n);
			int h1 = (int)K1.size() - rank(d1p);
			int h2 = (int)K2.size() - rank(d2p);
			if (h1 != h2)
				return false;
			// span test: [phi(K1) | im d2] must fill ker d2n
			int n2rows = ph.rows;
			QMatrix big(n2rows, (int)K1.size() + d2p.cols);
			for (int c = 0; c < (int)K1.size(); ++c)
				for (int r = 0; r < n2rows; ++r)
				{
					Rational s = 0;
					for (int j = 0; j < ph.cols; ++j)
						s += ph(r, j) * K1[c][j];
					big(r, c) = s;
				}
			for (int c = 0; c < d2p.cols; ++c)
				for (int r = 0; r < n2rows; ++r)
					big(r, (int)K1.size() + c) = d2p(r, c);
			if (rank(big) != rank(d2p) + h1)
				return false;
		}
	// generic-rank certification: the evaluated ranks of the polynomial
	// blocks agree with their Bareiss ranks at the last point
	for (int n : degrees)
	{
		auto collect = [&](const std::map<std::pair<int, int>, Poly>& mp,
		                   const GradedModule& dst, const GradedModule& src,
		                   int shiftdeg) {
			auto scols = src.indices_of_degree(n);
			auto drows = dst.indices_of_degree(n + shiftdeg);
			std::vector<std::vector<Poly>> m(
			    drows.size(), std::vector<Poly>(scols.size(), Poly(nv)));
			for (size_t i = 0; i < drows.size(); ++i)
				for (size_t j = 0; j < scols.size(); ++j)
				{
					auto it = mp.find({drows[i], scols[j]});
					if (it != mp.end())
						m[i][j] = it->second;
				}
			return m;
		};
		auto& pt = points.back();
		if (bareiss_rank(collect(d1, M1, M1, 1)) !=
		    rank(detail::eval_block(d1, M1, M1, n, 1, pt)))
			return false;
		if (bareiss_rank(collect(d2, M2, M2, 1)) !=
		    rank(detail::eval_block(d2, M2, M2, n, 1, pt)))
			return false;
	}
	return true;
}

// ---- Chern-Weil ------------------------------------------------------------

// Str(R^k), a closed element of degree 2k (closedness is a theorem; the
// caller can verify with base->d).
inline CdgaElement chern_form(const ZConnection& conn, int k)
{
	if (k == 0)
	{
		Rational dim = 0;
		for (auto& g : conn.module.gens)
			dim += (g.degree & 1) ? -1 : 1;
		return dim * CdgaElement::one(conn.base->alg);
	}
	AMatrix R = curvature(conn);
	AMatrix P = R;
	for (int i = 1; i < k; ++i)
		P = P * R;
	return P.supertrace();
}

// sum f^{(k)}(0)/k! Str(R^k) over the provided Taylor coefficients,
// truncated when the curvature power vanishes
inline CdgaElement pontryagin(const ZConnection& conn,
                              const std::vector<Rational>& taylor)
{
	CdgaElement out(conn.base->alg);
	AMatrix R = curvature(conn);
	AMatrix P = AMatrix::identity(*conn.base, conn.module);
	Rational kfact = 1;
	for (size_t k = 0; k < taylor.size(); ++k)
	{
		if (k > 0)
		{
			P = P * R;
			kfact *= (int)k;
			if (P.is_zero())
				break;
		}
		out += (taylor[k] / kfact) * P.supertrace();
	}
	return out;
}

struct Transgression
{
	CdgaElement primitive;
	bool certified; // Str(R1^k) - Str(R0^k) == d(primitive), checked exactly
};

namespace detail {

inline Poly lift_poly(const Poly& p, int extra)
{
	Poly r(p.nvars() + extra);
	for (auto& [m, c] : p.terms())
	{
		Poly::Monomial mm = m;
		mm.resize(m.size() + extra, 0);
		r.add_term(mm, c);
	}
	return r;
}

inline Poly drop_var(const Poly& p)
{
	// drop the last variable, which must not occur
	Poly r(p.nvars() - 1);
	for (auto& [m, c] : p.terms())
	{
		if (m.back() != 0)
			throw std::logic_error("cannot drop an occurring variable");
		Poly::Monomial mm(m.begin(), m.end() - 1);
		r.add_term(mm, c);
	}
	return r;
}

} // namespace detail

// Exact transgression along the straight line between two connections on
// the same module: P with Str(R_1^k) - Str(R_0^k) = d P.
inline Transgression transgression(const ZConnection& c0,
                                   const ZConnection& c1, int k)
{
	const BaseCdga& B = *c0.base;
	int nv = B.alg.nvars;
	// extended base with the deformation parameter as an extra variable
	Cdga ext(nv + 1, [&] {
		auto names = B.alg.var_names;
		names.push_back("@t");
		return names;
	}(), B.alg.gens);
	auto lift_elem = [&](const CdgaElement& e) {
		CdgaElement r(ext);
		for (auto& [w, c] : e.terms)
			r.add_term(w, detail::lift_poly(c, 1));
		return r;
	};
	Derivation dext(ext, 1);
	for (int i = 0; i < nv; ++i)
		dext.set_var(i, lift_elem(B.d.on_var[i]));
	for (int g = 0; g < B.alg.ngens(); ++g)
		dext.set_gen(g, lift_elem(B.d.on_gen[g]));
	BaseCdga extbase(ext, dext,
	                 B.c ? std::optional<CdgaElement>(lift_elem(*B.c))
	                     : std::nullopt);

	ZConnection ct(extbase, c0.module);
	AMatrix mdot(extbase, c0.module, c0.module, 1);
	Poly t = Poly::var(nv + 1, nv);
	for (int g = 0; g < c0.module.size(); ++g)
		for (int e = 0; e < c0.module.size(); ++e)
		{
			auto a0 = lift_elem(c0.m.at(g, e));
			auto a1 = lift_elem(c1.m.at(g, e));
			auto diff = a1 - a0;
			ct.m.set(g, e, a0 + t * diff);
			mdot.set(g, e, diff);
		}

	AMatrix Rt = curvature(ct);
	AMatrix Pm = AMatrix::identity(extbase, c0.module);
	for (int i = 0; i < k - 1; ++i)
		Pm = Pm * Rt;
	// In the operator-entry convention the commutator lemma pairs the
	// supertrace of even elements with the plain trace of odd ones:
	// d/dt Str(R_t^k) = d Tr(k E' R_t^{k-1}).
	CdgaElement integrand = Rational(k) * (mdot * Pm).trace();

	// integrate the parameter over [0,1] coefficientwise, then return to
	// the original base
	CdgaElement prim(B.alg);
	for (auto& [w, c] : integrand.terms)
		prim.add_term(w, detail::drop_var(c.integrate(
		                     nv, Poly::constant(nv + 1, 0),
		                     Poly::constant(nv + 1, 1))));

	CdgaElement diff = chern_form(c1, k) - chern_form(c0, k);
	bool ok = (diff - B.d.apply(prim)).is_zero();
	return {prim, ok};
}

} // namespace koszul
