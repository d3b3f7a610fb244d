#include "koszul/locsys.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace koszul;

namespace {

ChainCx point_cx()
{
	ChainCx c;
	c.dims[0] = 1;
	return c;
}

ChainCx two_term() // Q -> Q in degrees 0, 1 with zero differential
{
	ChainCx c;
	c.dims[0] = 1;
	c.dims[1] = 1;
	return c;
}

QMatrix scalar(const Rational& v)
{
	QMatrix m(1, 1);
	m(0, 0) = v;
	return m;
}

// classical rank-1 local system on the bounded nerve of Z: the edge g acts
// by lambda^g
InftyLocalSystem z_system(const SimplicialSet& K, const Rational& lambda)
{
	InftyLocalSystem L(K, {point_cx()});
	for (int c = 0; c < K.count(1); ++c)
	{
		int g = std::stoi(K.cells[1][c].label);
		LinMap v = LinMap::zero(0);
		Rational val = 1;
		for (int i = 0; i < std::abs(g); ++i)
		{
			if (g > 0)
				val *= lambda;
			else
				val /= lambda;
		}
		v.blocks[0] = scalar(val);
		L.set(1, c, v);
	}
	return L;
}

struct Lcg
{
	unsigned long s = 99;
	Rational next()
	{
		s = s * 6364136223846793005ULL + 1442695040888963407ULL;
		return Rational((long)((s >> 33) % 7) - 3);
	}
};

LocMorphism random_morphism(const InftyLocalSystem& A,
                            const InftyLocalSystem& B, int degree, Lcg& rng)
{
	LocMorphism m(A, B, degree);
	for (int d = 0; d <= A.K->dim(); ++d)
		for (int c = 0; c < A.K->count(d); ++c)
		{
			SimplexRef s{d, c, {}};
			auto& src = A.F[A.last_vertex(s)];
			auto& dst = B.F[B.first_vertex(s)];
			LinMap v = LinMap::zero(degree - d);
			for (auto& [n, k] : src.dims)
			{
				int dn = dst.dim(n + degree - d);
				if (dn == 0)
					continue;
				QMatrix mm(dn, k);
				for (int i = 0; i < dn; ++i)
					for (int j = 0; j < k; ++j)
						mm(i, j) = rng.next();
				if (!mm.is_zero())
					v.blocks[n] = mm;
			}
			m.comp[d][c] = v;
		}
	return m;
}

} // namespace

TEST_CASE("constant system passes the Maurer-Cartan equation")
{
	auto K = nerve(cyclic_group(2), 3);
	InftyLocalSystem L(K, {point_cx()});
	for (int c = 0; c < K.count(1); ++c)
	{
		LinMap v = LinMap::zero(0);
		v.blocks[0] = scalar(1);
		L.set(1, c, v);
	}
	CHECK(mc_check(L).pass());
}

TEST_CASE("classical local system on the circle: cocycle condition")
{
	auto K = bounded_z_nerve(2, 2);
	auto L = z_system(K, Rational(2));
	CHECK(mc_check(L).pass());

	// corrupt multiplicativity: f(2) != f(1)^2
	auto bad = z_system(K, Rational(2));
	LinMap v = LinMap::zero(0);
	v.blocks[0] = scalar(5);
	bad.set(1, K.index_of(1, "2"), v);
	auto rep = mc_check(bad);
	CHECK(!rep.pass());
	bool witness_is_triangle = false;
	for (auto& [r, res] : rep.failures)
		witness_is_triangle |= r.dim() == 2;
	CHECK(witness_is_triangle);
}

TEST_CASE("D(id) = 0 and D^2 = 0 on random morphisms")
{
	auto K = nerve(cyclic_group(2), 3);
	InftyLocalSystem L(K, {two_term()});
	for (int c = 0; c < K.count(1); ++c)
	{
		LinMap v = LinMap::zero(0);
		v.blocks[0] = scalar(1);
		v.blocks[1] = scalar(1);
		L.set(1, c, v);
	}
	REQUIRE(mc_check(L).pass());

	auto id = LocMorphism::identity(L);
	CHECK(is_closed(id));

	Lcg rng;
	for (int trial = 0; trial < 10; ++trial)
		for (int deg = -1; deg <= 1; ++deg)
		{
			auto m = random_morphism(L, L, deg, rng);
			auto dm = D(m);
			auto ddm = D(dm);
			bool zero = true;
			for (auto& lvl : ddm.comp)
				for (auto& v : lvl)
					zero = zero && v.is_zero();
			CHECK(zero);
		}
}

TEST_CASE("Leibniz rule for D over the cup product")
{
	auto K = nerve(cyclic_group(2), 2);
	InftyLocalSystem L(K, {two_term()});
	for (int c = 0; c < K.count(1); ++c)
	{
		LinMap v = LinMap::zero(0);
		v.blocks[0] = scalar(1);
		v.blocks[1] = scalar(1);
		L.set(1, c, v);
	}
	REQUIRE(mc_check(L).pass());
	Lcg rng;
	for (int trial = 0; trial < 6; ++trial)
	{
		auto a = random_morphism(L, L, 1 - (trial % 2), rng);
		auto b = random_morphism(L, L, (trial % 3) - 1, rng);
		auto lhs = D(cup(a, b));
		auto rhs1 = cup(D(a), b);
		auto rhs2 = cup(a, D(b));
		int sign = (a.degree % 2 == 0) ? 1 : -1;
		for (int d = 0; d <= K.dim(); ++d)
			for (int c = 0; c < K.count(d); ++c)
			{
				auto want =
				    rhs1.comp[d][c] + Rational(sign) * rhs2.comp[d][c];
				CHECK(lhs.comp[d][c] == want);
			}
	}
}

TEST_CASE("shift: involution with exact signs; shift by zero is identity")
{
	auto K = bounded_z_nerve(2, 2);
	auto L = z_system(K, Rational(3));
	auto L0 = shift(L, 0);
	for (int c = 0; c < K.count(1); ++c)
		CHECK(L0.f[1][c] == L.f[1][c]);
	for (int i : {1, 2, -1})
	{
		auto Ls = shift(shift(L, i), -i);
		for (int d = 1; d <= K.dim(); ++d)
			for (int c = 0; c < K.count(d); ++c)
				CHECK(Ls.f[d][c] == L.f[d][c]);
		CHECK(mc_check(shift(L, i)).pass());
	}
}

TEST_CASE("cone validity is equivalent to closedness")
{
	auto K = bounded_z_nerve(2, 2);
	auto L = z_system(K, Rational(2));
	auto M = z_system(K, Rational(2));

	// closed degree-0 morphism: a scalar intertwiner
	LocMorphism m(L, M, 0);
	m.comp[0][0].blocks[0] = scalar(7);
	for (int c = 0; c < K.count(1); ++c)
		m.comp[1][c] = LinMap::zero(-1);
	REQUIRE(is_closed(m));
	auto C = cone(m);
	CHECK(mc_check(C).pass());

	// cone of zero = direct sum with the shift
	LocMorphism z(L, M, 0);
	auto Cz = cone(z);
	CHECK(mc_check(Cz).pass());

	// non-closed morphism is rejected with a witness
	LocMorphism bad(L, M, 0);
	bad.comp[0][0].blocks[0] = scalar(1);
	LinMap e = LinMap::zero(-1);
	bad.comp[1][K.index_of(1, "1")] = e; // leave as zero: still closed?
	// make it genuinely non-closed: break the intertwiner relation
	auto L5 = z_system(K, Rational(5));
	LocMorphism bad2(L5, M, 0);
	bad2.comp[0][0].blocks[0] = scalar(1);
	CHECK(!is_closed(bad2));
	CHECK_THROWS_AS(cone(bad2), std::invalid_argument);
}

TEST_CASE("cone of the identity is vertexwise acyclic")
{
	auto K = nerve(cyclic_group(2), 2);
	InftyLocalSystem L(K, {two_term()});
	for (int c = 0; c < K.count(1); ++c)
	{
		LinMap v = LinMap::zero(0);
		v.blocks[0] = scalar(1);
		v.blocks[1] = scalar(1);
		L.set(1, c, v);
	}
	auto id = LocMorphism::identity(L);
	auto C = cone(id);
	REQUIRE(mc_check(C).pass());
	for (int x = 0; x < K.count(0); ++x)
	{
		auto& cx = C.F[x];
		std::set<int> degs;
		for (auto& [n, k] : cx.dims)
			degs.insert(n);
		for (int n : degs)
		{
			int h = (int)kernel_basis(cx.block(n)).size() -
			        rank(cx.block(n - 1));
			CHECK(h == 0);
		}
	}
}

TEST_CASE("homotopy equivalence criterion on local systems")
{
	auto K = bounded_z_nerve(1, 2);
	auto L = z_system(K, Rational(2));
	auto id = LocMorphism::identity(L);
	CHECK(is_homotopy_equivalence(id));

	// zero map between non-acyclic systems
	LocMorphism z(L, L, 0);
	CHECK(is_closed(z));
	CHECK(!is_homotopy_equivalence(z));
}

TEST_CASE("page-zero differential of the filtration squares to zero")
{
	auto K = nerve(cyclic_group(2), 2);
	InftyLocalSystem L(K, {two_term()});
	for (int c = 0; c < K.count(1); ++c)
	{
		LinMap v = LinMap::zero(0);
		v.blocks[0] = scalar(1);
		v.blocks[1] = scalar(1);
		L.set(1, c, v);
	}
	Lcg rng;
	for (int trial = 0; trial < 8; ++trial)
	{
		auto m = random_morphism(L, L, 1, rng);
		// d0(phi)(s) = d_G o phi(s) - (-1)^{|phi|} phi(s) o d_F, per cell
		auto d0 = [&](const LocMorphism& f) {
			LocMorphism r(L, L, f.degree + 1);
			for (int d = 0; d <= K.dim(); ++d)
				for (int c = 0; c < K.count(d); ++c)
				{
					SimplexRef s{d, c, {}};
					auto dg = LinMap::differential(L.F[L.first_vertex(s)]);
					auto df = LinMap::differential(L.F[L.last_vertex(s)]);
					int sign = ((f.degree - d) % 2 == 0) ? 1 : -1;
					r.comp[d][c] = compose(dg, f.comp[d][c]) -
					               Rational(sign) *
					                   compose(f.comp[d][c], df);
				}
			return r;
		};
		auto dd = d0(d0(m));
		for (auto& lvl : dd.comp)
			for (auto& v : lvl)
				CHECK(v.is_zero());
	}
}

TEST_CASE("dg nerve of a one-object discrete category counts monoid strings")
{
	DgCatSample C;
	C.objects = {point_cx()};
	LinMap one = LinMap::zero(0), zero0 = LinMap::zero(0);
	one.blocks[0] = scalar(1);
	zero0.blocks[0] = scalar(0);
	C.pool[{0, 0}][0] = {one, zero0}; // multiplicative monoid {1, 0}
	for (int p = 1; p <= 3; ++p)
	{
		auto simplices = dg_nerve_level(C, delta(p), std::vector<int>(p + 1, 0));
		// edges choose freely, higher faces are forced by MC:
		// |M|^p assignments survive
		int expect = 1;
		for (int i = 0; i < p; ++i)
			expect *= 2;
		CHECK((int)simplices.size() == expect);
	}
}

TEST_CASE("local system <-> dg nerve family roundtrip")
{
	auto K = nerve(cyclic_group(2), 3);
	InftyLocalSystem L(K, {point_cx()});
	for (int c = 0; c < K.count(1); ++c)
	{
		LinMap v = LinMap::zero(0);
		v.blocks[0] = scalar(c == K.index_of(1, "g1") ? -1 : 1);
		L.set(1, c, v);
	}
	REQUIRE(mc_check(L).pass());
	// the family assigns each k-cell its restricted system; levelwise <= 3
	for (int d = 1; d <= 3; ++d)
	{
		auto dp = delta(d);
		auto subs = subset_table(dp);
		for (int c = 0; c < K.count(d); ++c)
		{
			auto datum = restrict_system(L, dp, SimplexRef{d, c, {}});
			CHECK(mc_check(datum).pass());
			// reconstruct the top value from the datum
			CHECK(datum.f[d][0] == L.f[d][c]);
			// faces of the datum agree with the data of the faces
			for (int i = 0; i <= d && d >= 2; ++i)
			{
				auto fr = face_of_ref(K, SimplexRef{d, c, {}}, i);
				std::vector<int> keep;
				for (int v = 0; v <= d; ++v)
					if (v != i)
						keep.push_back(v);
				auto sub = face_by_subset(K, SimplexRef{d, c, {}}, keep);
				CHECK(L.value(fr) == L.value(sub));
			}
		}
	}
}

TEST_CASE("empty dg category has an empty nerve")
{
	DgCatSample C;
	for (int p = 1; p <= 2; ++p)
	{
		// no vertex labellings exist; level sets are empty by construction
		CHECK(C.objects.empty());
	}
}
