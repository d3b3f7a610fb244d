#pragma once

#include "koszul/qlinalg.hpp"
#include "koszul/simplicial.hpp"

namespace koszul {

// Bounded complex of finite-dimensional Q-spaces, cochain convention.
struct ChainCx
{
	std::map<int, int> dims;        // degree -> dimension (nonzero only)
	std::map<int, QMatrix> d;       // degree n -> matrix V^n -> V^{n+1}

	int dim(int n) const
	{
		auto it = dims.find(n);
		return it == dims.end() ? 0 : it->second;
	}
	QMatrix block(int n) const
	{
		auto it = d.find(n);
		if (it != d.end())
			return it->second;
		return QMatrix(dim(n + 1), dim(n));
	}
	void validate() const
	{
		for (auto& [n, m] : d)
		{
			if (m.rows != dim(n + 1) || m.cols != dim(n))
				throw std::invalid_argument("differential block shape");
			auto next = block(n + 1);
			if (!(next * m).is_zero())
				throw std::invalid_argument("differential does not square to zero");
		}
	}
	ChainCx shifted(int i) const
	{
		ChainCx r;
		for (auto& [n, k] : dims)
			r.dims[n - i] = k;
		for (auto& [n, m] : d)
		{
			QMatrix mm = (i % 2 == 0) ? m : Rational(-1) * m;
			if (!mm.is_zero())
				r.d[n - i] = mm;
		}
		return r;
	}
	static ChainCx direct_sum(const ChainCx& a, const ChainCx& b)
	{
		ChainCx r;
		std::set<int> degs;
		for (auto& [n, k] : a.dims)
			degs.insert(n);
		for (auto& [n, k] : b.dims)
			degs.insert(n);
		for (int n : degs)
			if (a.dim(n) + b.dim(n) > 0)
				r.dims[n] = a.dim(n) + b.dim(n);
		for (int n : degs)
		{
			QMatrix m(r.dim(n + 1), r.dim(n));
			auto ma = a.block(n), mb = b.block(n);
			for (int i = 0; i < ma.rows; ++i)
				for (int j = 0; j < ma.cols; ++j)
					m(i, j) = ma(i, j);
			for (int i = 0; i < mb.rows; ++i)
				for (int j = 0; j < mb.cols; ++j)
					m(a.dim(n + 1) + i, a.dim(n) + j) = mb(i, j);
			if (!m.is_zero())
				r.d[n] = m;
		}
		return r;
	}
};

// Degree-k linear map between graded spaces, stored blockwise by source
// degree.
struct LinMap
{
	int degree = 0;
	std::map<int, QMatrix> blocks; // n -> matrix src^n -> dst^{n+degree}

	static LinMap zero(int degree) { return LinMap{degree, {}}; }

	static LinMap identity(const ChainCx& v)
	{
		LinMap r{0, {}};
		for (auto& [n, k] : v.dims)
			r.blocks[n] = QMatrix::identity(k);
		return r;
	}

	static LinMap differential(const ChainCx& v)
	{
		LinMap r{1, {}};
		for (auto& [n, m] : v.d)
			if (!m.is_zero())
				r.blocks[n] = m;
		return r;
	}

	bool is_zero() const
	{
		for (auto& [n, m] : blocks)
			if (!m.is_zero())
				return false;
		return true;
	}

	QMatrix block(int n, const ChainCx& src, const ChainCx& dst) const
	{
		auto it = blocks.find(n);
		if (it != blocks.end())
			return it->second;
		return QMatrix(dst.dim(n + degree), src.dim(n));
	}

	void prune()
	{
		for (auto it = blocks.begin(); it != blocks.end();)
			it = it->second.is_zero() ? blocks.erase(it) : std::next(it);
	}

	friend LinMap operator+(LinMap a, const LinMap& b)
	{
		for (auto& [n, m] : b.blocks)
		{
			auto it = a.blocks.find(n);
			if (it == a.blocks.end())
				a.blocks[n] = m;
			else
				it->second = it->second + m;
		}
		a.prune();
		return a;
	}
	friend LinMap operator*(const Rational& c, LinMap a)
	{
		for (auto& [n, m] : a.blocks)
			m = c * m;
		a.prune();
		return a;
	}
	friend LinMap operator-(const LinMap& a) { return Rational(-1) * a; }
	friend LinMap operator-(const LinMap& a, const LinMap& b)
	{
		return a + (-b);
	}
	// composition a o b
	friend LinMap compose(const LinMap& a, const LinMap& b)
	{
		LinMap r{a.degree + b.degree, {}};
		for (auto& [n, mb] : b.blocks)
		{
			auto it = a.blocks.find(n + b.degree);
			if (it == a.blocks.end())
				continue;
			QMatrix prod = it->second * mb;
			if (!prod.is_zero())
				r.blocks[n] = prod;
		}
		return r;
	}
	bool operator==(const LinMap& o) const
	{
		LinMap d = *this - o;
		return d.is_zero();
	}
};

// An infinity-local system on a finite simplicial set: complexes on
// vertices, degree (1-k) maps on nondegenerate k-simplices. Values on
// degenerate simplices are forced: s0-degenerate edges carry the identity,
// everything else carries zero.
struct InftyLocalSystem
{
	const SimplicialSet* K = nullptr;
	std::vector<ChainCx> F;                        // per vertex
	std::vector<std::vector<LinMap>> f;            // per dim >= 1, per cell

	InftyLocalSystem() = default;
	InftyLocalSystem(const SimplicialSet& k, std::vector<ChainCx> fx)
	    : K(&k), F(std::move(fx))
	{
		f.assign(K->dim() + 1, {});
		for (int d = 1; d <= K->dim(); ++d)
			f[d].assign(K->count(d), LinMap::zero(1 - d));
	}

	int first_vertex(const SimplexRef& r) const
	{
		return vertex_of_ref(*K, r, 0).base;
	}
	int last_vertex(const SimplexRef& r) const
	{
		return vertex_of_ref(*K, r, r.dim()).base;
	}

	void set(int dim, int cell, LinMap v)
	{
		if (v.degree != 1 - dim)
			throw std::invalid_argument("local system value has wrong degree");
		f[dim][cell] = std::move(v);
	}

	LinMap value(const SimplexRef& r) const
	{
		if (r.word.empty())
		{
			if (r.base_dim == 0)
				return LinMap::differential(F[r.base]);
			return f[r.base_dim][r.base];
		}
		if (r.dim() == 1 && r.word == std::vector<int>{0})
			return LinMap::identity(F[r.base]);
		return LinMap::zero(1 - r.dim());
	}
};

namespace detail {

inline SimplexRef front_face(const SimplicialSet& X, const SimplexRef& r,
                             int t)
{
	std::vector<int> keep;
	for (int v = 0; v <= t; ++v)
		keep.push_back(v);
	return face_by_subset(X, r, keep);
}

inline SimplexRef back_face(const SimplicialSet& X, const SimplexRef& r,
                            int t)
{
	std::vector<int> keep;
	for (int v = t; v <= r.dim(); ++v)
		keep.push_back(v);
	return face_by_subset(X, r, keep);
}

} // namespace detail

// Maurer-Cartan residual of the structure maps on one simplex:
// (delta-hat f)(s) + (f cup f)(s) with the pinned total-degree signs.
inline LinMap mc_residual(const InftyLocalSystem& L, const SimplexRef& r)
{
	int k = r.dim();
	LinMap res = LinMap::zero(2 - k);
	for (int l = 1; l <= k - 1; ++l)
	{
		// (-1)^{l + |f|} with |f| = 1
		auto v = L.value(face_of_ref(*L.K, r, l));
		res = res + ((l % 2 == 0) ? Rational(-1) : Rational(1)) * v;
	}
	for (int t = 0; t <= k; ++t)
	{
		auto front = L.value(detail::front_face(*L.K, r, t));
		auto back = L.value(detail::back_face(*L.K, r, t));
		auto prod = compose(front, back);
		res = res + ((t % 2 == 0) ? Rational(1) : Rational(-1)) * prod;
	}
	return res;
}

struct McReport
{
	std::vector<std::pair<SimplexRef, LinMap>> failures;
	bool pass() const { return failures.empty(); }
};

inline McReport mc_check(const InftyLocalSystem& L)
{
	McReport rep;
	for (auto& cx : L.F)
		cx.validate();
	for (int d = 0; d <= L.K->dim(); ++d)
		for (int c = 0; c < L.K->count(d); ++c)
		{
			SimplexRef r{d, c, {}};
			auto v = mc_residual(L, r);
			if (!v.is_zero())
				rep.failures.push_back({r, v});
		}
	return rep;
}

// Morphism between local systems: components on k-simplices of degree p-k,
// plus the vertex components; zero on degenerate simplices.
struct LocMorphism
{
	const InftyLocalSystem* from = nullptr;
	const InftyLocalSystem* to = nullptr;
	int degree = 0;
	std::vector<std::vector<LinMap>> comp; // per dim >= 0, per cell

	LocMorphism() = default;
	LocMorphism(const InftyLocalSystem& a, const InftyLocalSystem& b, int p)
	    : from(&a), to(&b), degree(p)
	{
		comp.assign(a.K->dim() + 1, {});
		for (int d = 0; d <= a.K->dim(); ++d)
			comp[d].assign(a.K->count(d), LinMap::zero(p - d));
	}

	static LocMorphism identity(const InftyLocalSystem& L)
	{
		LocMorphism m(L, L, 0);
		for (int x = 0; x < L.K->count(0); ++x)
			m.comp[0][x] = LinMap::identity(L.F[x]);
		return m;
	}

	LinMap value(const SimplexRef& r) const
	{
		if (r.word.empty())
			return comp[r.base_dim][r.base];
		return LinMap::zero(degree - r.dim());
	}
};

// cup product of morphism-like data: (a cup b)(s) = sum_t
// (-1)^{t |b|} a(front_t) o b(back_t); the local-system structure maps f
// enter with their degenerate-value conventions through `left`/`right`.
inline LinMap cup_value(const SimplicialSet& K,
                        const std::function<LinMap(const SimplexRef&)>& a,
                        int, const std::function<LinMap(const SimplexRef&)>& b,
                        int deg_b, const SimplexRef& r, int out_degree)
{
	int k = r.dim();
	LinMap res = LinMap::zero(out_degree);
	for (int t = 0; t <= k; ++t)
	{
		auto front = a(detail::front_face(K, r, t));
		auto back = b(detail::back_face(K, r, t));
		auto prod = compose(front, back);
		int sign = ((t * deg_b) % 2 == 0) ? 1 : -1;
		res = res + Rational(sign) * prod;
	}
	return res;
}

inline LocMorphism cup(const LocMorphism& a, const LocMorphism& b)
{
	// a: F -> G on top of b: E -> F
	LocMorphism r(*b.from, *a.to, a.degree + b.degree);
	for (int d = 0; d <= r.from->K->dim(); ++d)
		for (int c = 0; c < r.from->K->count(d); ++c)
		{
			SimplexRef s{d, c, {}};
			r.comp[d][c] = cup_value(
			    *r.from->K, [&](const SimplexRef& q) { return a.value(q); },
			    a.degree, [&](const SimplexRef& q) { return b.value(q); },
			    b.degree, s, r.degree - d);
		}
	return r;
}

// D(phi) = delta-hat(phi) + G cup phi - (-1)^{|phi|} phi cup F
inline LocMorphism D(const LocMorphism& m)
{
	const InftyLocalSystem& Fs = *m.from;
	const InftyLocalSystem& Gs = *m.to;
	LocMorphism r(Fs, Gs, m.degree + 1);
	for (int d = 0; d <= Fs.K->dim(); ++d)
		for (int c = 0; c < Fs.K->count(d); ++c)
		{
			SimplexRef s{d, c, {}};
			LinMap acc = LinMap::zero(m.degree + 1 - d);
			for (int l = 1; l <= d - 1; ++l)
			{
				int sign = ((l + m.degree) % 2 == 0) ? 1 : -1;
				acc = acc +
				      Rational(sign) * m.value(face_of_ref(*Fs.K, s, l));
			}
			acc = acc + cup_value(
			                *Fs.K,
			                [&](const SimplexRef& q) { return Gs.value(q); },
			                1, [&](const SimplexRef& q) { return m.value(q); },
			                m.degree, s, m.degree + 1 - d);
			int sign = (m.degree % 2 == 0) ? 1 : -1;
			acc = acc +
			      Rational(-sign) *
			          cup_value(
			              *Fs.K,
			              [&](const SimplexRef& q) { return m.value(q); },
			              m.degree,
			              [&](const SimplexRef& q) { return Fs.value(q); }, 1,
			              s, m.degree + 1 - d);
			r.comp[d][c] = acc;
		}
	return r;
}

inline bool is_closed(const LocMorphism& m)
{
	auto d = D(m);
	for (auto& lvl : d.comp)
		for (auto& v : lvl)
			if (!v.is_zero())
				return false;
	return true;
}

// shift: F[i]_x = F_x[i], F[i](s_k) = (-1)^{i(k-1)} F(s_k)
inline InftyLocalSystem shift(const InftyLocalSystem& L, int i)
{
	InftyLocalSystem r(*L.K, [&] {
		std::vector<ChainCx> fx;
		for (auto& cx : L.F)
			fx.push_back(cx.shifted(i));
		return fx;
	}());
	for (int d = 1; d <= L.K->dim(); ++d)
		for (int c = 0; c < L.K->count(d); ++c)
		{
			LinMap v = L.f[d][c];
			int sign = ((i * (d - 1)) % 2 == 0) ? 1 : -1;
			LinMap w = LinMap::zero(v.degree);
			for (auto& [n, mm] : v.blocks)
				w.blocks[n - i] = Rational(sign) * mm;
			w.prune();
			r.f[d][c] = w;
		}
	return r;
}

// cone of a closed degree-0 morphism: C_x = F[1]_x + G_x with the
// lower-triangular structure maps
inline InftyLocalSystem cone(const LocMorphism& m)
{
	if (m.degree != 0)
		throw std::invalid_argument("cone needs a degree-0 morphism");
	{
		auto dm = D(m);
		for (auto& lvl : dm.comp)
			for (auto& v : lvl)
				if (!v.is_zero())
					throw std::invalid_argument(
					    "cone of a non-closed morphism; residual present");
	}
	const InftyLocalSystem& Fs = *m.from;
	const InftyLocalSystem& Gs = *m.to;
	auto F1 = shift(Fs, 1);
	std::vector<ChainCx> cx;
	for (int x = 0; x < Fs.K->count(0); ++x)
		cx.push_back(ChainCx::direct_sum(F1.F[x], Gs.F[x]));
	InftyLocalSystem r(*Fs.K, cx);
	for (int d = 1; d <= Fs.K->dim(); ++d)
		for (int c = 0; c < Fs.K->count(d); ++c)
		{
			SimplexRef s{d, c, {}};
			int xq = r.first_vertex(s), xp = r.last_vertex(s);
			auto a = F1.f[d][c];                   // F[1] block
			auto g = Gs.f[d][c];                   // G block
			LinMap phi1 = m.comp[d][c];            // phi[1](s) = (-1)^{k} phi
			int sign = (d % 2 == 0) ? 1 : -1;
			LinMap v = LinMap::zero(1 - d);
			// assemble block map on F[1](xp) + G(xp) -> F[1](xq) + G(xq)
			for (auto& [n, mm] : a.blocks)
			{
				QMatrix big(F1.F[xq].dim(n + 1 - d) + Gs.F[xq].dim(n + 1 - d),
				            F1.F[xp].dim(n) + Gs.F[xp].dim(n));
				for (int i = 0; i < mm.rows; ++i)
					for (int j = 0; j < mm.cols; ++j)
						big(i, j) = mm(i, j);
				auto [it, fresh] = v.blocks.emplace(n, big);
				if (!fresh)
					it->second = it->second + big;
			}
			for (auto& [n, mm] : g.blocks)
			{
				QMatrix big(F1.F[xq].dim(n + 1 - d) + Gs.F[xq].dim(n + 1 - d),
				            F1.F[xp].dim(n) + Gs.F[xp].dim(n));
				for (int i = 0; i < mm.rows; ++i)
					for (int j = 0; j < mm.cols; ++j)
						big(F1.F[xq].dim(n + 1 - d) + i,
						    F1.F[xp].dim(n) + j) = mm(i, j);
				auto [it, fresh] = v.blocks.emplace(n, big);
				if (!fresh)
					it->second = it->second + big;
			}
			// phi[1]: the F[1] column into the G row; source degree n in
			// F[1] is n+1 in F, phi block at n+1 with target degree n+1-d
			for (auto& [n0, mm] : phi1.blocks)
			{
				int n = n0 - 1; // block keyed by F[1] source degree
				QMatrix big(F1.F[xq].dim(n + 1 - d) + Gs.F[xq].dim(n + 1 - d),
				            F1.F[xp].dim(n) + Gs.F[xp].dim(n));
				for (int i = 0; i < mm.rows; ++i)
					for (int j = 0; j < mm.cols; ++j)
						big(F1.F[xq].dim(n + 1 - d) + i, j) =
						    Rational(sign) * mm(i, j);
				auto [it, fresh] = v.blocks.emplace(n, big);
				if (!fresh)
					it->second = it->second + big;
			}
			v.prune();
			r.f[d][c] = v;
		}
	// vertex differentials: the MC-at-vertices data lives in F via
	// direct_sum of the shifted complex; the phi[1] vertex block adds the
	// connecting map
	for (int x = 0; x < Fs.K->count(0); ++x)
	{
		auto& phi0 = m.comp[0][x];
		for (auto& [n0, mm] : phi0.blocks)
		{
			int n = n0 - 1;
			auto& cxr = r.F[x];
			QMatrix big = cxr.block(n);
			for (int i = 0; i < mm.rows; ++i)
				for (int j = 0; j < mm.cols; ++j)
					big(F1.F[x].dim(n + 1) + i, j) =
					    big(F1.F[x].dim(n + 1) + i, j) + mm(i, j);
			cxr.d[n] = big;
		}
	}
	return r;
}

// vertexwise cohomology comparison for a closed degree-0 morphism
inline bool is_homotopy_equivalence(const LocMorphism& m)
{
	if (m.degree != 0)
		throw std::invalid_argument("criterion needs degree 0");
	if (!is_closed(m))
		throw std::invalid_argument("criterion needs a closed morphism");
	for (int x = 0; x < m.from->K->count(0); ++x)
	{
		auto& A = m.from->F[x];
		auto& B = m.to->F[x];
		std::set<int> degs;
		for (auto& [n, k] : A.dims)
			degs.insert(n);
		for (auto& [n, k] : B.dims)
			degs.insert(n);
		for (int n : degs)
		{
			auto K1 = kernel_basis(A.block(n));
			auto K2 = kernel_basis(B.block(n));
			int h1 = (int)K1.size() - rank(A.block(n - 1));
			int h2 = (int)K2.size() - rank(B.block(n - 1));
			if (h1 != h2)
				return false;
			auto ph = m.comp[0][x].block(n, A, B);
			auto d2p = B.block(n - 1);
			QMatrix big(ph.rows, (int)K1.size() + d2p.cols);
			for (int c = 0; c < (int)K1.size(); ++c)
				for (int r2 = 0; r2 < ph.rows; ++r2)
				{
					Rational s = 0;
					for (int j = 0; j < ph.cols; ++j)
						s += ph(r2, j) * K1[c][j];
					big(r2, c) = s;
				}
			for (int c = 0; c < d2p.cols; ++c)
				for (int r2 = 0; r2 < d2p.rows; ++r2)
					big(r2, (int)K1.size() + c) = d2p(r2, c);
			if (rank(big) != rank(d2p) + h1)
				return false;
		}
	}
	return true;
}

// ---- dg-nerve sampling -------------------------------------------------------

// A small dg category presented with finite candidate pools: objects carry
// complexes, and for each ordered pair a finite set of degree-d morphisms
// used to enumerate nerve simplices.
struct DgCatSample
{
	std::vector<ChainCx> objects;
	// pool[x][y] = candidate maps y -> x by total degree
	std::map<std::pair<int, int>, std::map<int, std::vector<LinMap>>> pool;
};

// simplices of the dg nerve at level p on a chosen vertex labelling:
// local systems on Delta[p] with F from the objects
inline std::vector<InftyLocalSystem>
dg_nerve_level(const DgCatSample& C, const SimplicialSet& dp,
               const std::vector<int>& vertex_objects)
{
	int p = dp.dim();
	std::vector<ChainCx> fx;
	auto subs = subset_table(dp);
	for (int v = 0; v <= p; ++v)
		fx.push_back(C.objects[vertex_objects[v]]);

	std::vector<InftyLocalSystem> out;
	InftyLocalSystem L(dp, fx);
	// assign cells dimension-major; cells of delta are subsets
	std::vector<std::pair<int, int>> order;
	for (int d = 1; d <= p; ++d)
		for (int c = 0; c < dp.count(d); ++c)
			order.push_back({d, c});
	std::function<void(size_t)> rec = [&](size_t i) {
		if (i == order.size())
		{
			if (mc_check(L).pass())
				out.push_back(L);
			return;
		}
		auto [d, c] = order[i];
		auto& s = subs[d][c];
		int xfrom = vertex_objects[s.back()], xto = vertex_objects[s.front()];
		auto it = C.pool.find({xto, xfrom});
		std::vector<LinMap> cands = {LinMap::zero(1 - d)};
		if (it != C.pool.end())
		{
			auto jt = it->second.find(1 - d);
			if (jt != it->second.end())
				cands = jt->second;
		}
		for (auto& v : cands)
		{
			L.f[d][c] = v;
			rec(i + 1);
		}
	};
	rec(0);
	return out;
}

// pullback of a local system along one simplex: the dg-nerve datum of that
// simplex
inline InftyLocalSystem restrict_system(const InftyLocalSystem& L,
                                        const SimplicialSet& dp,
                                        const SimplexRef& big)
{
	auto subs = subset_table(dp);
	std::vector<ChainCx> fx;
	for (int v = 0; v <= dp.dim(); ++v)
		fx.push_back(L.F[vertex_of_ref(*L.K, big, v).base]);
	InftyLocalSystem r(dp, fx);
	for (int d = 1; d <= dp.dim(); ++d)
		for (int c = 0; c < dp.count(d); ++c)
			r.f[d][c] = L.value(face_by_subset(*L.K, big, subs[d][c]));
	return r;
}

} // namespace koszul
