#include "koszul/linfty.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace koszul;

namespace {

// sl2 in the shifted symmetric picture: three odd generators e < f < h with
// stored sorted values {e,f} = h, {e,h} = -2e, {f,h} = 2f. Querying the
// unsorted pairs reproduces the classical table {h,e} = 2e, {h,f} = -2f.
LInftyStructure sl2(Rational he_coeff = 2)
{
	LInftyStructure L(0, {}, GradedModule({{"e", -1}, {"f", -1}, {"h", -1}}));
	GradedElement h(0), e(0), f(0);
	h.add(2, Poly::constant(0, 1));
	e.add(0, Poly::constant(0, -he_coeff));
	f.add(1, Poly::constant(0, 2));
	L.set_bracket(2, {0, 1}, h);
	L.set_bracket(2, {0, 2}, e);
	L.set_bracket(2, {1, 2}, f);
	return L;
}

LInftyStructure tangent_r2()
{
	LInftyStructure L(2, {"x", "y"},
	                  GradedModule({{"dx", -1}, {"dy", -1}}));
	VectorField vx(2), vy(2);
	vx.comp[0] = Poly::constant(2, 1);
	vy.comp[1] = Poly::constant(2, 1);
	L.set_anchor(0, vx);
	L.set_anchor(1, vy);
	return L;
}

// Classical antisymmetric Lie bracket oracle for sl2-type constants,
// [e,f]=h, [h,e]=c*e, [h,f]=-c*f on unshifted degree-0 generators.
struct Sl2Oracle
{
	Rational c;
	std::map<std::pair<int, int>, std::map<int, Rational>> table;
	Sl2Oracle(Rational cc) : c(cc)
	{
		table[{0, 1}][2] = 1;  // [e,f] = h
		table[{2, 0}][0] = c;  // [h,e] = c e
		table[{2, 1}][1] = -c; // [h,f] = -c f
	}
	std::map<int, Rational> bracket(int a, int b) const
	{
		auto it = table.find({a, b});
		if (it != table.end())
			return it->second;
		it = table.find({b, a});
		std::map<int, Rational> r;
		if (it != table.end())
			for (auto& [g, k] : it->second)
				r[g] = -k;
		return r;
	}
};

} // namespace

TEST_CASE("abelian structure: everything vanishes")
{
	LInftyStructure L(0, {}, GradedModule({{"a", -1}, {"b", -2}}));
	CHECK(L.bracket({GradedElement::gen(0, 0), GradedElement::gen(0, 1)})
	          .is_zero());
	CHECK(jacobiator(L, 3, {0, 0, 1}).is_zero());
	CHECK(check_linfty(L, 4).pass());
}

TEST_CASE("sl2 bracket symmetry through the shift dictionary")
{
	auto L = sl2();
	// {f,e} = eps(swap on two odd generators) * {e,f} = -h
	auto v = L.bracket_gens(2, {1, 0});
	GradedElement minus_h(0);
	minus_h.add(2, Poly::constant(0, -1));
	CHECK(v == minus_h);
	// classical queries hold with their stated signs
	GradedElement two_e(0);
	two_e.add(0, Poly::constant(0, 2));
	CHECK(L.bracket_gens(2, {2, 0}) == two_e);

	// brute-force dictionary oracle: the symmetric bracket on the shifted
	// generators agrees with the classical antisymmetric table, and the
	// symmetric-picture Jacobiator vanishes exactly when classical Jacobi
	// holds.
	Sl2Oracle oracle(2);
	for (int a = 0; a < 3; ++a)
		for (int b = 0; b < 3; ++b)
		{
			auto classical = oracle.bracket(a, b);
			auto shifted = L.bracket_gens(2, {a, b});
			std::map<int, Rational> got;
			for (auto& [g, p] : shifted.coeffs)
				got[g] = p.constant_term();
			CHECK(got == classical);
		}
}

TEST_CASE("jacobiator: sl2 passes, corrupted sl2 fails at arity 3")
{
	CHECK(jacobiator(sl2(), 3, {0, 1, 2}).is_zero());
	CHECK(check_linfty(sl2(), 4).pass());

	auto bad = sl2(3); // {h,e} corrupted to 3e
	auto j = jacobiator(bad, 3, {0, 1, 2});
	REQUIRE(!j.is_zero());
	// direct expansion leaves a single h-term residual (c - 2) h
	GradedElement expect(0);
	expect.add(2, Poly::constant(0, 1));
	CHECK(j == expect);

	auto chk = check_linfty(bad, 3);
	CHECK(!chk.pass());
	REQUIRE(chk.witness().has_value());
	CHECK(chk.witness()->first == 3);
	CHECK(chk.witness()->second == std::vector<int>{0, 1, 2});
}

TEST_CASE("tangent algebroid passes to arity 4; anchor Leibniz rule")
{
	auto L = tangent_r2();
	CHECK(check_linfty(L, 4).pass());

	// {x, f y} = f {x, y} + rho(x)[f] y with f = x1
	auto x1 = Poly::var(2, 0);
	GradedElement X = GradedElement::gen(2, 0);
	GradedElement fY = x1 * GradedElement::gen(2, 1);
	auto v = L.bracket({X, fY});
	// {dx, dy} = 0, rho(dx)[x1] = 1, so v = dy
	CHECK(v == GradedElement::gen(2, 1));

	// and the symmetric-slot variant
	auto w = L.bracket({fY, X});
	// {x1 dy, dx} = x1 {dy,dx} + (-1)^{1*1} rho(dx)[x1] dy = -dy
	CHECK(w == -GradedElement::gen(2, 1));
}

TEST_CASE("bracket permutation invariance against koszul_sign")
{
	auto L = sl2();
	std::vector<int> base = {0, 1, 2};
	std::vector<int> degs = {-1, -1, -1};
	std::sort(base.begin(), base.end());
	std::vector<int> perm = {0, 1, 2};
	do
	{
		std::vector<int> tuple(3);
		for (int i = 0; i < 3; ++i)
			tuple[i] = base[perm[i]];
		// arity-3 bracket is zero here, but the sign normalization path is
		// exercised through arity 2 on all pairs:
		(void)tuple;
	} while (std::next_permutation(perm.begin(), perm.end()));

	for (int a = 0; a < 3; ++a)
		for (int b = 0; b < 3; ++b)
		{
			auto lhs = L.bracket_gens(2, {a, b});
			int s = koszul_sign(Permutation({1, 0}), {-1, -1});
			auto rhs = Rational(s) * L.bracket_gens(2, {b, a});
			CHECK(lhs == rhs);
		}
}

TEST_CASE("anchor compatibility is checked")
{
	auto L = tangent_r2();
	// corrupt: give dx an anchor that fails the bracket morphism by
	// adding a bracket value violating rho({x,y}) = [rho x, rho y]
	GradedElement v(2);
	v.add(0, Poly::constant(2, 1));
	L.set_bracket(2, {0, 1}, v); // {dx,dy} = dx but [rho dx, rho dy] = 0
	auto chk = check_linfty(L, 2);
	CHECK(!chk.structural.empty());
}
