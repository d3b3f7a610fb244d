#include "koszul/atiyah.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace koszul;

namespace {

// g spanned by a (sub) and n (normal) with {a, n} = x n, anchor rho(a) = d/dx
PairData weighted_pair()
{
	PairData p;
	p.g = LInftyStructure(1, {"x"}, GradedModule({{"a", -1}, {"n", -1}}));
	VectorField v(1);
	v.comp[0] = Poly::constant(1, 1);
	p.g.set_anchor(0, v);
	GradedElement xn(1);
	xn.add(1, Poly::var(1, 0));
	p.g.set_bracket(2, {0, 1}, xn);
	p.h_gens = {0};
	return p;
}

} // namespace

TEST_CASE("atiyah: zero normal directions give a zero cocycle")
{
	PairData p;
	p.g = LInftyStructure(1, {"x"}, GradedModule({{"dx", -1}}));
	VectorField v(1);
	v.comp[0] = Poly::constant(1, 1);
	p.g.set_anchor(0, v);
	p.h_gens = {0};

	AtiyahWorkspace ws(p, GradedModule({{"e", 0}}));
	AMatrix Dh(ws.base_h(), ws.module(), ws.module(), 1);
	AMatrix Dg(ws.base_g(), ws.module(), ws.module(), 1);
	auto res = ws.atiyah(Dg, Dh);
	CHECK(res.alpha.is_zero());
	CHECK(res.normal_valued);
	CHECK(res.closed);
}

TEST_CASE("atiyah: canonical abelian extension is trivial")
{
	// g = h + E with the split structure {a, n} = n
	PairData p;
	p.g = LInftyStructure(1, {"x"}, GradedModule({{"a", -1}, {"n", -1}}));
	VectorField v(1);
	v.comp[0] = Poly::constant(1, 1);
	p.g.set_anchor(0, v);
	GradedElement n(1);
	n.add(1, Poly::constant(1, 1));
	p.g.set_bracket(2, {0, 1}, n);
	p.h_gens = {0};

	AtiyahWorkspace ws(p, GradedModule({{"e", 0}}));
	// h acts on E by the weight-one action: D^{h,E}(e) = a* e
	AMatrix Dh(ws.base_h(), ws.module(), ws.module(), 1);
	Dh.set(0, 0, CdgaElement::generator(ws.base_h().alg, 0));
	AMatrix Dg(ws.base_g(), ws.module(), ws.module(), 1);
	Dg.set(0, 0, CdgaElement::generator(ws.base_g().alg, 0));
	auto res = ws.atiyah(Dg, Dh);
	CHECK(res.alpha.is_zero());
	CHECK(res.closed);
}

TEST_CASE("atiyah: Bott data on the flat chart is trivial")
{
	PairData p;
	p.g = LInftyStructure(2, {"x", "y"}, GradedModule({{"X", -1}, {"Y", -1}}));
	VectorField vx(2), vy(2);
	vx.comp[0] = Poly::constant(2, 1);
	vy.comp[1] = Poly::constant(2, 1);
	p.g.set_anchor(0, vx);
	p.g.set_anchor(1, vy);
	p.h_gens = {0};

	AtiyahWorkspace ws(p, GradedModule({{"nrm", 0}}));
	AMatrix Dh(ws.base_h(), ws.module(), ws.module(), 1); // Bott value 0
	AMatrix Dg(ws.base_g(), ws.module(), ws.module(), 1);
	auto res = ws.atiyah(Dg, Dh);
	CHECK(res.alpha.is_zero());
	CHECK(res.normal_valued);
	CHECK(res.closed);
}

TEST_CASE("atiyah: weighted pair has a nonzero closed normal-valued cocycle")
{
	auto p = weighted_pair();
	AtiyahWorkspace ws(p, GradedModule({{"e", 0}}));
	AMatrix Dh(ws.base_h(), ws.module(), ws.module(), 1);
	// extension D(e) = x n* e: restricts to zero on the sub side
	AMatrix Dg(ws.base_g(), ws.module(), ws.module(), 1);
	Dg.set(0, 0, Poly::var(1, 0) *
	                 CdgaElement::generator(ws.base_g().alg, 1));
	auto res = ws.atiyah(Dg, Dh);
	CHECK(!res.alpha.is_zero());
	CHECK(res.normal_valued);
	CHECK(res.closed);
}

TEST_CASE("atiyah: two extensions differ by an exact primitive")
{
	auto p = weighted_pair();
	AtiyahWorkspace ws(p, GradedModule({{"e", 0}}));
	AMatrix Dh(ws.base_h(), ws.module(), ws.module(), 1);
	AMatrix Dg(ws.base_g(), ws.module(), ws.module(), 1);
	Dg.set(0, 0, Poly::var(1, 0) *
	                 CdgaElement::generator(ws.base_g().alg, 1));
	AMatrix Dg2(ws.base_g(), ws.module(), ws.module(), 1);
	auto x = Poly::var(1, 0);
	Dg2.set(0, 0, (x * x - Poly::constant(1, 2)) *
	                  CdgaElement::generator(ws.base_g().alg, 1));
	ws.validate_extension(Dg, Dh);
	ws.validate_extension(Dg2, Dh);
	auto diff = ws.difference(Dg, Dg2, Dh);
	CHECK(diff.exact);
	CHECK(!diff.primitive.is_zero());
}

TEST_CASE("atiyah: extension that does not restrict is rejected")
{
	auto p = weighted_pair();
	AtiyahWorkspace ws(p, GradedModule({{"e", 0}}));
	AMatrix Dh(ws.base_h(), ws.module(), ws.module(), 1);
	AMatrix Dg(ws.base_g(), ws.module(), ws.module(), 1);
	Dg.set(0, 0, CdgaElement::generator(ws.base_g().alg, 0)); // a* term
	CHECK_THROWS_AS(ws.atiyah(Dg, Dh), std::invalid_argument);
}

TEST_CASE("atiyah: non-closed subset is rejected")
{
	auto p = weighted_pair();
	p.h_gens = {1}; // {a, n} = x n leaves span(n)? no: bracket needs a
	// swap roles: the subset {n} is actually closed ({n,n} = 0), so use a
	// pair where the bracket lands outside: {a, n} = x n with subset {a}
	// is closed; make a structure whose subset bracket escapes instead
	PairData bad;
	bad.g = LInftyStructure(0, {}, GradedModule({{"u", -1}, {"w", -1}}));
	GradedElement w(0);
	w.add(1, Poly::constant(0, 1));
	// {u, u} would repeat an odd generator; use a 3-generator example
	bad.g = LInftyStructure(0, {},
	                        GradedModule({{"u", -1}, {"v", -1}, {"w", -1}}));
	GradedElement ww(0);
	ww.add(2, Poly::constant(0, 1));
	bad.g.set_bracket(2, {0, 1}, ww); // {u,v} = w
	bad.h_gens = {0, 1};
	CHECK_THROWS_AS(AtiyahWorkspace(bad, GradedModule({{"e", 0}})),
	                std::invalid_argument);
}
