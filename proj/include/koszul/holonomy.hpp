#pragma once

#include "koszul/graded.hpp"
#include "koszul/integration.hpp"
#include "koszul/locsys.hpp"

namespace koszul {

// Product-foliation chart on R^m: leaf variables first, then q transverse
// ones. Foliated forms live on the leaf differentials with coefficients in
// all variables.
struct FoliatedChart
{
	int m = 0, q = 0;
	std::vector<std::string> names;

	int leaf_count() const { return m - q; }
	std::vector<int> leaf_vars() const
	{
		std::vector<int> v(leaf_count());
		for (int i = 0; i < leaf_count(); ++i)
			v[i] = i;
		return v;
	}
	void validate_foliated(const PolyForm& a) const
	{
		for (auto& [s, c] : a.parts)
			for (int sym : s)
				if (sym >= leaf_count())
					throw std::invalid_argument(
					    "form uses a transverse differential");
	}
	PolyForm d_leaf(const PolyForm& a) const
	{
		return a.exterior_d(leaf_vars());
	}
};

// Affine simplex in the chart, all vertices sharing transverse coordinates.
// Parametrized on 1 >= t_1 >= ... >= t_k >= 0 with vertex i at
// (1,..,1,0,..,0) (i ones), so sigma(t) = v_0 + sum t_i (v_i - v_{i-1}).
struct AffineSimplex
{
	std::vector<std::vector<Rational>> verts;

	int dim() const { return (int)verts.size() - 1; }
	void validate(const FoliatedChart& chart) const
	{
		for (auto& v : verts)
			if ((int)v.size() != chart.m)
				throw std::invalid_argument("vertex dimension mismatch");
		for (int j = chart.leaf_count(); j < chart.m; ++j)
			for (auto& v : verts)
				if (v[j] != verts[0][j])
					throw std::invalid_argument(
					    "simplex does not lie in a single leaf");
	}
	AffineSimplex face(int i) const
	{
		AffineSimplex r = *this;
		r.verts.erase(r.verts.begin() + i);
		return r;
	}
	// coordinates as polynomials in t-variables living in a space with
	// t_nvars variables, t-variable indices t0..t_{k-1}
	std::vector<Poly> position(int t_nvars, int t_offset) const
	{
		int k = dim(), m = (int)verts[0].size();
		std::vector<Poly> pos(m, Poly(t_nvars));
		for (int c = 0; c < m; ++c)
		{
			pos[c] = Poly::constant(t_nvars, verts[0][c]);
			for (int i = 1; i <= k; ++i)
				pos[c] += Poly::var(t_nvars, t_offset + i - 1) *
				          Poly::constant(t_nvars,
				                         verts[i][c] - verts[i - 1][c]);
		}
		return pos;
	}
};

// ---- the cube-to-simplex path family ----------------------------------------

// Piecewise-affine family of paths in the simplex, parametrized over a cube
// cell decomposition: within each cell the time axis splits into segments
// with affine position data. The polynomial space has wvars cube variables
// followed by the time variable.
struct PathFamily
{
	int k = 0;     // target simplex dimension
	int wvars = 0; // cube dimension
	struct Segment
	{
		Poly lo, hi;           // time bounds, affine in the cube variables
		std::vector<Poly> pos; // k simplex coordinates, affine in (w, s)
	};
	struct Cell
	{
		BoundChain wchain;
		std::vector<Segment> segments; // increasing time
	};
	std::vector<Cell> cells;

	int nvars() const { return wvars + 1; }
	int svar() const { return wvars; }
};

namespace detail {

// builds the unit-speed traversal with terminal rest: the path visits the
// lambda breakpoints of the cube at speed k in the moving coordinate and
// rests at the origin afterwards; composition with the ordered-suffix-max
// retraction gives affine cells.
inline PathFamily theta_family(int k)
{
	PathFamily F;
	F.k = k;
	F.wvars = k - 1;
	int nv = F.nvars();
	int sv = F.svar();
	Poly one = Poly::constant(nv, 1), zero = Poly::constant(nv, 0);
	auto wvar = [&](int i) { return Poly::var(nv, i); };
	Poly s = Poly::var(nv, sv);
	Poly invk = Poly::constant(nv, Rational(1, k));

	std::vector<int> perm(k - 1);
	for (int i = 0; i < k - 1; ++i)
		perm[i] = i;
	do
	{
		// cell: w_{perm[0]} >= w_{perm[1]} >= ... ; rank: position in perm
		std::vector<int> rank(k - 1);
		for (int i = 0; i < k - 1; ++i)
			rank[perm[i]] = i; // smaller rank = larger value
		PathFamily::Cell cell;
		for (int i = 0; i < k - 1; ++i)
		{
			Poly hi = i == 0 ? one : wvar(perm[i - 1]);
			cell.wchain.vars.push_back({perm[i], zero, hi});
		}
		// levels: index k-1 means the constant 1, -1 means 0
		auto level_poly = [&](int lv) {
			if (lv == k - 1)
				return one;
			if (lv < 0)
				return zero;
			return wvar(lv);
		};
		auto level_rank = [&](int lv) {
			if (lv == k - 1)
				return -1; // larger than every w
			if (lv < 0)
				return k; // smaller than every w
			return rank[lv];
		};
		Poly a = zero; // running segment start
		for (int j = 1; j <= k; ++j)
		{
			int mov = k - j; // moving coordinate
			Poly L = level_poly(mov == k - 1 ? k - 1 : mov);
			// suffix maxima of the fixed coordinates below the moving one
			std::vector<int> cuts; // level indices, strictly decreasing rank
			for (int i = mov - 1; i >= 0; --i)
			{
				int lv = i;
				if (cuts.empty() ||
				    level_rank(lv) < level_rank(cuts.back()))
					cuts.push_back(lv);
			}
			std::reverse(cuts.begin(), cuts.end()); // descending value
			// suffix max symbol per fixed position
			std::vector<int> suffmax(mov, -1);
			for (int i = mov - 1; i >= 0; --i)
			{
				int best = i;
				if (i + 1 < mov &&
				    level_rank(suffmax[i + 1]) < level_rank(best))
					best = suffmax[i + 1];
				suffmax[i] = best;
			}
			// cut levels below the moving level
			std::vector<int> below;
			for (int lv : cuts)
				if (level_rank(lv) > level_rank(mov == k - 1 ? k - 1 : mov))
					below.push_back(lv);
			below.push_back(-1); // final descent to zero
			Poly seg_lo = a;
			int top = mov == k - 1 ? k - 1 : mov; // current sweep top level
			for (int bot : below)
			{
				PathFamily::Segment seg;
				seg.lo = seg_lo;
				seg.hi = a + invk * (L - level_poly(bot));
				// m(s) = L - k (s - a)
				Poly ms = L - Poly::constant(nv, k) * (s - a);
				seg.pos.assign(k, zero);
				for (int i = 0; i < mov; ++i)
				{
					int Mi = suffmax[i];
					if (level_rank(Mi) <= level_rank(top))
						seg.pos[i] = level_poly(Mi);
					else
						seg.pos[i] = ms;
				}
				seg.pos[mov] = ms;
				// positions above mov stay zero
				cell.segments.push_back(seg);
				seg_lo = seg.hi;
				top = bot;
			}
			a = a + invk * L;
		}
		// terminal rest at the origin
		PathFamily::Segment rest;
		rest.lo = a;
		rest.hi = one;
		rest.pos.assign(k, zero);
		cell.segments.push_back(rest);
		F.cells.push_back(std::move(cell));
	} while (std::next_permutation(perm.begin(), perm.end()));
	return F;
}

} // namespace detail

inline PathFamily theta_family(int k) { return detail::theta_family(k); }

// evaluate the family at a rational cube point and time; checks that every
// containing cell and segment agrees
inline std::optional<std::vector<Rational>>
eval_family(const PathFamily& F, const std::vector<Rational>& w,
            const Rational& s)
{
	std::vector<Rational> pt(w.begin(), w.end());
	pt.push_back(s);
	std::optional<std::vector<Rational>> out;
	for (auto& cell : F.cells)
	{
		bool inw = true;
		for (auto& b : cell.wchain.vars)
			inw = inw && b.lo.eval(pt) <= pt[b.var] &&
			      pt[b.var] <= b.hi.eval(pt);
		if (!inw)
			continue;
		for (auto& seg : cell.segments)
		{
			if (!(seg.lo.eval(pt) <= s && s <= seg.hi.eval(pt)))
				continue;
			std::vector<Rational> t(F.k);
			for (int i = 0; i < F.k; ++i)
				t[i] = seg.pos[i].eval(pt);
			if (out && !(*out == t))
				throw std::logic_error("family is inconsistent at a point");
			out = t;
		}
	}
	return out;
}

// exact equality of two families over the same cube: they are affine on the
// cells of the joint hyperplane arrangement, so agreement at every pairwise
// intersection vertex inside the box decides equality (domains of dimension
// <= 2 suffice for the shipped checks)
inline bool families_agree(const PathFamily& A, const PathFamily& B)
{
	if (A.k != B.k || A.wvars != B.wvars)
		return false;
	int dim = A.wvars + 1;
	// collect affine hyperplanes h(x) = 0 as coefficient rows (c0 + sum ci xi)
	std::vector<std::vector<Rational>> planes;
	auto add_plane = [&](const Poly& lhs, int var) {
		// plane x_var - lhs = 0
		std::vector<Rational> row(dim + 1, Rational(0));
		row[1 + var] += 1;
		for (auto& [mono, c] : lhs.terms())
		{
			int which = -1, count = 0;
			for (int i = 0; i < dim; ++i)
				if (mono[i] > 0)
				{
					which = i;
					count += mono[i];
				}
			if (count == 0)
				row[0] -= c;
			else if (count == 1)
				row[1 + which] -= c;
			else
				throw std::logic_error("nonaffine bound");
		}
		planes.push_back(row);
	};
	for (auto* F : {&A, &B})
		for (auto& cell : F->cells)
		{
			for (auto& b : cell.wchain.vars)
			{
				add_plane(b.lo, b.var);
				add_plane(b.hi, b.var);
			}
			for (auto& seg : cell.segments)
			{
				add_plane(seg.lo, F->svar());
				add_plane(seg.hi, F->svar());
			}
		}
	// box faces
	for (int v = 0; v < dim; ++v)
	{
		std::vector<Rational> r0(dim + 1, Rational(0)), r1(dim + 1,
		                                                   Rational(0));
		r0[1 + v] = 1;
		planes.push_back(r0);
		r1[0] = -1;
		r1[1 + v] = 1;
		planes.push_back(r1);
	}

	std::set<std::vector<Rational>> points;
	auto in_box = [&](const std::vector<Rational>& p) {
		for (auto& x : p)
			if (x < 0 || x > 1)
				return false;
		return true;
	};
	if (dim == 1)
	{
		for (auto& pl : planes)
			if (pl[1] != 0)
			{
				std::vector<Rational> p = {-pl[0] / pl[1]};
				if (in_box(p))
					points.insert(p);
			}
	}
	else if (dim == 2)
	{
		for (size_t a = 0; a < planes.size(); ++a)
			for (size_t b = a + 1; b < planes.size(); ++b)
			{
				auto &p1 = planes[a], &p2 = planes[b];
				Rational det = p1[1] * p2[2] - p1[2] * p2[1];
				if (det == 0)
					continue;
				Rational x = (-p1[0] * p2[2] + p2[0] * p1[2]) / det;
				Rational y = (-p1[1] * p2[0] + p1[0] * p2[1]) / det;
				std::vector<Rational> p = {x, y};
				if (in_box(p))
					points.insert(p);
			}
	}
	else
		throw std::invalid_argument("map comparison supports cube dim <= 2");

	for (auto& p : points)
	{
		std::vector<Rational> w(p.begin(), p.end() - 1);
		Rational s = p.back();
		auto ta = eval_family(A, w, s);
		auto tb = eval_family(B, w, s);
		if (!ta.has_value() || !tb.has_value())
			return false;
		if (!(*ta == *tb))
			return false;
	}
	return true;
}

// uniform slowdown: traverse the same picture in time scaled by `factor`,
// resting at the end
inline PathFamily retime(const PathFamily& F, const Rational& factor)
{
	PathFamily r = F;
	int nv = F.nvars();
	for (auto& cell : r.cells)
	{
		std::vector<Poly> subs;
		for (int i = 0; i < nv; ++i)
			subs.push_back(Poly::var(nv, i));
		subs[F.svar()] =
		    Poly::var(nv, F.svar()) * Poly::constant(nv, Rational(1) / factor);
		bool first_rest_extended = false;
		for (auto& seg : cell.segments)
		{
			seg.lo = seg.lo * factor;
			Poly hi = seg.hi * factor;
			seg.hi = hi;
			for (auto& c : seg.pos)
				c = c.substitute(subs);
			(void)first_rest_extended;
		}
		// extend the final rest up to time 1
		if (!cell.segments.empty())
			cell.segments.back().hi = Poly::constant(nv, 1);
	}
	return r;
}

// compose positions with the coface Delta^{k-1} -> Delta^k
inline PathFamily coface_compose(const PathFamily& F, int i)
{
	PathFamily r = F;
	r.k = F.k + 1;
	int nv = F.nvars();
	for (auto& cell : r.cells)
		for (auto& seg : cell.segments)
		{
			std::vector<Poly> t = seg.pos;
			std::vector<Poly> out;
			if (i == 0)
			{
				out.push_back(Poly::constant(nv, 1));
				for (auto& c : t)
					out.push_back(c);
			}
			else if (i == F.k + 1)
			{
				out = t;
				out.push_back(Poly::constant(nv, 0));
			}
			else
			{
				for (int a = 0; a < (int)t.size(); ++a)
				{
					out.push_back(t[a]);
					if (a == i - 1)
						out.push_back(t[a]);
				}
			}
			seg.pos = std::move(out);
		}
	return r;
}

// restriction of the family to a cube face w_pos = value (0 or 1); the
// result lives over the cube with that variable removed
inline PathFamily face_restrict(const PathFamily& F, int pos, int value)
{
	PathFamily r;
	r.k = F.k;
	r.wvars = F.wvars - 1;
	int nv_old = F.nvars(), nv_new = r.nvars();
	std::vector<Poly> subs;
	for (int i = 0, j = 0; i < nv_old; ++i)
	{
		if (i == pos)
			subs.push_back(Poly::constant(nv_new, value));
		else
			subs.push_back(Poly::var(nv_new, j++));
	}
	for (auto& cell : F.cells)
	{
		PathFamily::Cell c2;
		bool alive = true;
		for (auto& b : cell.wchain.vars)
		{
			Poly lo = b.lo.substitute(subs), hi = b.hi.substitute(subs);
			if (b.var == pos)
			{
				// keep a cell only when the slice value meets its bound
				// identically: value 0 needs lo == 0, value 1 needs hi == 1;
				// other cells touch the slice on measure-zero boundaries
				// already covered by the kept ones
				Poly want = Poly::constant(nv_new, value);
				if (!((value == 0 && lo == want) ||
				      (value == 1 && hi == want)))
					alive = false;
				continue;
			}
			int nvvar = b.var - (b.var > pos ? 1 : 0);
			c2.wchain.vars.push_back({nvvar, lo, hi});
		}
		if (!alive)
			continue;
		for (auto& seg : cell.segments)
		{
			PathFamily::Segment s2;
			s2.lo = seg.lo.substitute(subs);
			s2.hi = seg.hi.substitute(subs);
			for (auto& c : seg.pos)
				s2.pos.push_back(c.substitute(subs));
			c2.segments.push_back(s2);
		}
		r.cells.push_back(std::move(c2));
	}
	return r;
}


// ---- Chen iterated integrals -------------------------------------------------

// matrix of polynomial forms, used for connection slots and their products
using MatPolyForm = std::map<std::pair<int, int>, PolyForm>;

namespace detail {

inline void mat_add(MatPolyForm& a, int g, int e, const PolyForm& v)
{
	if (v.is_zero())
		return;
	auto key = std::make_pair(g, e);
	auto it = a.find(key);
	if (it == a.end())
		a.emplace(key, v);
	else
	{
		it->second = it->second + v;
		if (it->second.is_zero())
			a.erase(it);
	}
}

// matrix product with the Koszul sign (-1)^{|omega_1| * end_deg_2}
inline MatPolyForm mat_mul(const GradedModule& mod, const MatPolyForm& A,
                           const MatPolyForm& B, int nvars)
{
	MatPolyForm r;
	for (auto& [ka, va] : A)
		for (auto& [kb, vb] : B)
		{
			if (ka.second != kb.first)
				continue;
			int ed2 = mod.degree(kb.first) - mod.degree(kb.second);
			PolyForm prod(nvars);
			for (auto& [sa, ca] : va.parts)
			{
				PolyForm left(nvars);
				left.parts[sa] =
				    ((int)sa.size() * ed2) % 2 == 0 ? ca : -ca;
				prod = prod + wedge(left, vb);
			}
			mat_add(r, ka.first, kb.second, prod);
		}
	return r;
}

} // namespace detail

// Chen slot data: one matrix of forms per (cell, segment), pulled back to
// the big polynomial space with a chosen time variable.
struct ChenContext
{
	const PathFamily* family = nullptr;
	int p = 0;               // word length
	int big_nvars = 0;       // wvars + p
	std::vector<int> tvars;  // time variable indices, slot order

	explicit ChenContext(const PathFamily& f, int word_len)
	    : family(&f), p(word_len), big_nvars(f.wvars + word_len)
	{
		for (int i = 0; i < p; ++i)
			tvars.push_back(f.wvars + i);
	}

	// substitution sending the family space (w, s) to (w, s_i)
	std::vector<Poly> time_subst(int slot) const
	{
		std::vector<Poly> subs;
		for (int i = 0; i < family->wvars; ++i)
			subs.push_back(Poly::var(big_nvars, i));
		subs.push_back(Poly::var(big_nvars, tvars[slot]));
		return subs;
	}
};

// Integrates a word of matrix-valued foliated forms along a path family
// whose positions land in the chart. `slot_forms[i]` is evaluated at the
// i-th latest time; for a word a_1 (x) ... (x) a_p of the bar complex pass
// the reversed list so the last letter sits at the latest time.
// Returns the cube-space form (per matrix entry) summed over cells,
// together with the per-cell data needed for the final cube integration.
struct ChenResult
{
	// per cell of the family: matrix of forms on the cube variables
	std::vector<MatPolyForm> per_cell;
	int nvars = 0;
};

inline ChenResult
chen_core(const GradedModule& mod, const PathFamily& chart_family,
          const std::vector<MatPolyForm>& slot_forms_latest_first,
          const FoliatedChart& chart)
{
	int p = (int)slot_forms_latest_first.size();
	ChenContext ctx(chart_family, p);
	int nv = ctx.big_nvars;
	ChenResult out;
	out.nvars = nv;

	std::vector<int> diffvars;
	for (int i = 0; i < nv; ++i)
		diffvars.push_back(i);

	for (auto& cell : chart_family.cells)
	{
		MatPolyForm acc; // cube-form result on this cell
		int nseg = (int)cell.segments.size();
		// nonincreasing segment assignments j_1 >= ... >= j_p
		std::vector<int> assign(p);
		std::function<void(int, int)> rec = [&](int slot, int maxseg) {
			if (slot == p)
			{
				// pull back each slot's matrix at its own time variable
				MatPolyForm prod;
				bool first = true;
				BoundChain chain;
				for (int i = 0; i < p; ++i)
				{
					auto& seg = cell.segments[assign[i]];
					auto subs = ctx.time_subst(i);
					// chart position with s replaced by s_i
					std::vector<Poly> pos;
					for (auto& c : seg.pos)
						pos.push_back(c.substitute(subs));
					MatPolyForm slot;
					for (auto& [k, form] : slot_forms_latest_first[i])
					{
						PolyForm pb =
						    form.pullback(pos, nv, diffvars);
						detail::mat_add(slot, k.first, k.second, pb);
					}
					if (first)
					{
						prod = std::move(slot);
						first = false;
					}
					else
						prod = detail::mat_mul(mod, prod, slot, nv);
					if (prod.empty())
						return;
					Poly lo = seg.lo.substitute(ctx.time_subst(i));
					Poly hi =
					    (i > 0 && assign[i] == assign[i - 1])
					        ? Poly::var(nv, ctx.tvars[i - 1])
					        : seg.hi.substitute(ctx.time_subst(i));
					chain.vars.push_back({ctx.tvars[i], lo, hi});
				}
				for (auto& [k, form] : prod)
				{
					PolyForm integrated =
					    pushforward_over(form, ctx.tvars, chain);
					detail::mat_add(acc, k.first, k.second, integrated);
				}
				return;
			}
			for (int j = maxseg; j >= 0; --j)
			{
				assign[slot] = j;
				rec(slot + 1, j);
			}
		};
		rec(0, nseg - 1);
		out.per_cell.push_back(std::move(acc));
	}
	(void)chart;
	return out;
}

// integrate the top cube part of a cube form over the cell chain
inline Poly integrate_cube_top(const PathFamily& F, int cell_index,
                               const PolyForm& form, int big_nvars)
{
	std::vector<int> wv;
	for (int i = 0; i < F.wvars; ++i)
		wv.push_back(i);
	Poly total(big_nvars);
	for (auto& [s, c] : form.parts)
	{
		if ((int)s.size() != F.wvars)
			continue;
		bool pure = true;
		for (int i = 0; i < F.wvars; ++i)
			pure = pure && s[i] == i;
		if (!pure)
			continue;
		// the cell chain bounds live in the family space; lift to big space
		BoundChain chain;
		for (auto& b : F.cells[cell_index].wchain.vars)
		{
			Poly lo(big_nvars), hi(big_nvars);
			for (auto& [m, k] : b.lo.terms())
			{
				Poly::Monomial mm = m;
				mm.resize(big_nvars, 0);
				lo.add_term(mm, k);
			}
			for (auto& [m, k] : b.hi.terms())
			{
				Poly::Monomial mm = m;
				mm.resize(big_nvars, 0);
				hi.add_term(mm, k);
			}
			chain.vars.push_back({b.var, lo, hi});
		}
		total += chain.integrate(c);
	}
	return total;
}

// run the family backwards in time
inline PathFamily reverse_time(const PathFamily& F)
{
	PathFamily r = F;
	int nv = F.nvars();
	std::vector<Poly> subs;
	for (int i = 0; i < nv; ++i)
		subs.push_back(Poly::var(nv, i));
	subs[F.svar()] = Poly::constant(nv, 1) - Poly::var(nv, F.svar());
	for (auto& cell : r.cells)
	{
		for (auto& seg : cell.segments)
		{
			Poly lo = Poly::constant(nv, 1) - seg.hi;
			Poly hi = Poly::constant(nv, 1) - seg.lo;
			seg.lo = lo;
			seg.hi = hi;
			for (auto& c : seg.pos)
				c = c.substitute(subs);
		}
		std::reverse(cell.segments.begin(), cell.segments.end());
	}
	return r;
}

// compose a simplex-valued family with an affine simplex into the chart
inline PathFamily compose_with_simplex(const PathFamily& F,
                                       const AffineSimplex& sigma)
{
	PathFamily r = F;
	int nv = F.nvars();
	for (auto& cell : r.cells)
		for (auto& seg : cell.segments)
		{
			// sigma(t) with t = seg.pos
			int m = (int)sigma.verts[0].size();
			std::vector<Poly> chart_pos(m, Poly(nv));
			for (int c = 0; c < m; ++c)
			{
				chart_pos[c] = Poly::constant(nv, sigma.verts[0][c]);
				for (int i = 1; i <= sigma.dim(); ++i)
					chart_pos[c] +=
					    seg.pos[i - 1] *
					    Poly::constant(nv, sigma.verts[i][c] -
					                           sigma.verts[i - 1][c]);
			}
			seg.pos = std::move(chart_pos);
		}
	return r;
}

// straight-line path family through the given chart points, unit cube
// parameters absent (a single path)
inline PathFamily straight_path(const std::vector<std::vector<Rational>>& pts)
{
	PathFamily F;
	F.k = (int)pts[0].size();
	F.wvars = 0;
	PathFamily::Cell cell;
	int nseg = (int)pts.size() - 1;
	for (int j = 0; j < nseg; ++j)
	{
		PathFamily::Segment seg;
		seg.lo = Poly::constant(1, Rational(j, nseg));
		seg.hi = Poly::constant(1, Rational(j + 1, nseg));
		Poly s = Poly::var(1, 0);
		for (int c = 0; c < F.k; ++c)
		{
			Poly frac = (s - Poly::constant(1, Rational(j, nseg))) *
			            Poly::constant(1, Rational(nseg));
			seg.pos.push_back(Poly::constant(1, pts[j][c]) +
			                  frac * Poly::constant(1, pts[j + 1][c] -
			                                               pts[j][c]));
		}
		cell.segments.push_back(seg);
	}
	F.cells.push_back(cell);
	return F;
}

// ---- scalar Chen map ----------------------------------------------------------

// spadesuit normalization: sum (T(a_i) - 1)(k - i) over 1 <= i < k
inline int spade_sign(const std::vector<int>& degrees)
{
	int k = (int)degrees.size();
	int e = 0;
	for (int i = 1; i < k; ++i)
		e += (degrees[i - 1] - 1) * (k - i);
	return (e % 2 == 0) ? 1 : -1;
}

// Chen map of a word of foliated forms along a chart-valued family:
// returns the per-cell forms on the cube variables. Vanishes when any
// letter has degree 0.
inline ChenResult chen(const std::vector<PolyForm>& word,
                       const PathFamily& chart_family,
                       const FoliatedChart& chart)
{
	GradedModule trivial(std::vector<GradedModule::Gen>{{"e", 0}});
	std::vector<MatPolyForm> slots;
	for (auto it = word.rbegin(); it != word.rend(); ++it)
	{
		MatPolyForm m;
		detail::mat_add(m, 0, 0, *it);
		slots.push_back(m);
	}
	auto res = chen_core(trivial, chart_family, slots, chart);
	std::vector<int> degs;
	for (auto& a : word)
		degs.push_back(a.top_degree());
	int sign = spade_sign(degs);
	if (sign < 0)
		for (auto& mp : res.per_cell)
			for (auto& [k, v] : mp)
				v = Rational(-1) * v;
	return res;
}

// ---- simplicial cochain maps ---------------------------------------------------

// phi_1(a)(sigma) = (-1)^k int_sigma a
inline Rational phi1(const FoliatedChart& chart, const PolyForm& a,
                     const AffineSimplex& sigma)
{
	int k = sigma.dim();
	chart.validate_foliated(a);
	sigma.validate(chart);
	// pull back along sigma into the t-space and integrate over the
	// standard simplex
	std::vector<int> tv;
	for (int i = 0; i < k; ++i)
		tv.push_back(i);
	auto pos = sigma.position(k, 0);
	PolyForm pulled = a.pullback(pos, std::max(k, 1), tv);
	PolyForm integrated = simplex_pushforward(pulled, tv);
	Poly c = integrated.parts.count({}) ? integrated.parts.at({})
	                                    : Poly(std::max(k, 1));
	Rational v = c.is_zero() ? Rational(0) : c.constant_term();
	return (k % 2 == 0) ? v : -v;
}

// phi_n = S o C over the theta family of the simplex; exact rational
inline Rational phi(const FoliatedChart& chart,
                    const std::vector<PolyForm>& word,
                    const AffineSimplex& sigma)
{
	int n = (int)word.size();
	if (n == 1)
		return phi1(chart, word[0], sigma);
	int k = sigma.dim();
	if (k == 0)
		return 0;
	for (auto& a : word)
		chart.validate_foliated(a);
	sigma.validate(chart);
	auto theta = theta_family(k);
	auto family = compose_with_simplex(theta, sigma);
	auto res = chen(word, family, chart);
	Rational total = 0;
	for (size_t c = 0; c < res.per_cell.size(); ++c)
		for (auto& [key, form] : res.per_cell[c])
		{
			Poly v = integrate_cube_top(family, (int)c, form, res.nvars);
			if (!v.is_zero())
				total += v.constant_term();
		}
	return total;
}

// ---- connections over the foliated chart ---------------------------------------

// Z-connection data on a trivialized graded module over the foliated
// chart: the matrix of E = d + A, stored as foliated polynomial forms. The
// degree-0 part of A is the fiberwise differential, the 1-form part the
// connection proper, higher parts the homotopies.
struct ChartConnection
{
	FoliatedChart chart;
	GradedModule module;
	MatPolyForm m; // entry (g, e): form of degree 1 + |e| - |g|

	void set(int g, int e, PolyForm v)
	{
		chart.validate_foliated(v);
		for (auto& [s, c] : v.parts)
			if ((int)s.size() != 1 + module.degree(e) - module.degree(g))
				throw std::invalid_argument("connection entry degree mismatch");
		detail::mat_add(m, g, e, v);
	}

	// curvature entries: R = M^2 + dM with the row sign
	MatPolyForm curvature() const
	{
		int nv = chart.m;
		MatPolyForm r = detail::mat_mul(module, m, m, nv);
		for (auto& [k, v] : m)
		{
			PolyForm dv = chart.d_leaf(v);
			if ((module.degree(k.first) & 1))
				dv = -dv;
			detail::mat_add(r, k.first, k.second, dv);
		}
		return r;
	}
	bool flat() const { return curvature().empty(); }
};

// nilpotency of the slot algebra along a family: all products of length N
// of the pulled-back direction matrices vanish
inline bool word_algebra_nilpotent(const ChartConnection& conn,
                                   const PathFamily& family, int N)
{
	// collect the distinct matrix-of-polynomials factors from every cell
	// and segment, with every differential stripped (direction components)
	int nv = family.nvars();
	std::vector<int> diffvars;
	for (int i = 0; i < nv; ++i)
		diffvars.push_back(i);
	std::vector<MatPolyForm> gens;
	for (auto& cell : family.cells)
		for (auto& seg : cell.segments)
		{
			MatPolyForm g;
			for (auto& [k, form] : conn.m)
			{
				PolyForm pb = form.pullback(seg.pos, nv, diffvars);
				// only parts carrying differentials enter the integrals;
				// the 0-form components never supply a time differential
				PolyForm dir(nv);
				for (auto& [sset, c] : pb.parts)
					if (!sset.empty())
						dir.add_part({}, c);
				detail::mat_add(g, k.first, k.second, dir);
			}
			if (!g.empty())
				gens.push_back(g);
		}
	// products of length N
	std::vector<MatPolyForm> frontier = gens;
	for (int len = 2; len <= N; ++len)
	{
		std::vector<MatPolyForm> next;
		for (auto& a : frontier)
			for (auto& g : gens)
			{
				auto pr = detail::mat_mul(conn.module, a, g, nv);
				if (!pr.empty())
					next.push_back(pr);
			}
		if (next.empty())
			return true;
		frontier = std::move(next);
	}
	return frontier.empty();
}

struct RhResult
{
	InftyLocalSystem system;
	bool truncated = false; // true when the order cap cut a nonzero tail
};

// vertex complex: module dims with the degree-0 part of M evaluated at the
// chart point
inline ChainCx vertex_complex(const ChartConnection& conn,
                              const std::vector<Rational>& point)
{
	ChainCx cx;
	std::map<int, std::vector<int>> byd;
	for (int i = 0; i < conn.module.size(); ++i)
		byd[conn.module.degree(i)].push_back(i);
	for (auto& [n, v] : byd)
		cx.dims[n] = (int)v.size();
	for (auto& [n, cols] : byd)
	{
		auto rows = byd.count(n + 1) ? byd[n + 1] : std::vector<int>{};
		if (rows.empty())
			continue;
		QMatrix m((int)rows.size(), (int)cols.size());
		bool nz = false;
		for (size_t i = 0; i < rows.size(); ++i)
			for (size_t j = 0; j < cols.size(); ++j)
			{
				auto it = conn.m.find({rows[i], cols[j]});
				if (it == conn.m.end())
					continue;
				auto jt = it->second.parts.find({});
				if (jt == it->second.parts.end())
					continue;
				m((int)i, (int)j) = jt->second.eval(point);
				nz = nz || m((int)i, (int)j) != 0;
			}
		if (nz)
			cx.d[n] = m;
	}
	return cx;
}

// psi_k of one simplex: the integrated holonomy of the slot word algebra
inline LinMap rh_simplex(const ChartConnection& conn,
                         const AffineSimplex& sigma, int order)
{
	int k = sigma.dim();
	auto theta = theta_family(k);
	// forward orientation: the transport runs from the first vertex
	auto family = reverse_time(compose_with_simplex(theta, sigma));
	LinMap out = LinMap::zero(1 - k);
	std::map<int, std::vector<int>> byd;
	for (int i = 0; i < conn.module.size(); ++i)
		byd[conn.module.degree(i)].push_back(i);
	auto posof = [&](int g) {
		auto& v = byd[conn.module.degree(g)];
		return (int)(std::find(v.begin(), v.end(), g) - v.begin());
	};
	// the empty word contributes the identity transport on edges
	if (k == 1)
		for (auto& [n, gens] : byd)
			out.blocks[n] = QMatrix::identity((int)gens.size());
	for (int p = 1; p <= order; ++p)
	{
		std::vector<MatPolyForm> slots(p, conn.m);
		auto res = chen_core(conn.module, family, slots, conn.chart);
		for (size_t c = 0; c < res.per_cell.size(); ++c)
			for (auto& [key, form] : res.per_cell[c])
			{
				Poly v = integrate_cube_top(family, (int)c, form,
				                            res.nvars);
				if (v.is_zero())
					continue;
				int e = key.second, g = key.first;
				if (conn.module.degree(g) !=
				    conn.module.degree(e) + 1 - k)
					throw std::logic_error("holonomy degree mismatch");
				int n = conn.module.degree(e);
				auto [it, fresh] = out.blocks.emplace(
				    n, QMatrix((int)byd[n + 1 - k].size(),
				               (int)byd[n].size()));
				it->second(posof(g), posof(e)) =
				    it->second(posof(g), posof(e)) + v.constant_term();
			}
	}
	out.prune();
	return out;
}

// Holonomy local system of a connection over a triangulated chart region:
// the simplicial set K comes with an affine realization of each cell.
struct TriangulatedChart
{
	SimplicialSet K;
	std::vector<std::vector<Rational>> vertex_points; // per 0-cell
	// the affine simplex of a nondegenerate cell, via its vertices
	AffineSimplex realize(const SimplexRef& r) const
	{
		AffineSimplex s;
		for (int v = 0; v <= r.dim(); ++v)
		{
			SimplexRef vr = vertex_of_ref(K, r, v);
			s.verts.push_back(vertex_points[vr.base]);
		}
		return s;
	}
};

inline RhResult rh_holonomy(const ChartConnection& conn,
                            const TriangulatedChart& tri, int order,
                            bool exact_mode = true)
{
	RhResult res;
	std::vector<ChainCx> fx;
	for (int v = 0; v < tri.K.count(0); ++v)
		fx.push_back(vertex_complex(conn, tri.vertex_points[v]));
	res.system = InftyLocalSystem(tri.K, fx);
	for (int d = 1; d <= tri.K.dim(); ++d)
		for (int c = 0; c < tri.K.count(d); ++c)
		{
			auto sigma = tri.realize(SimplexRef{d, c, {}});
			sigma.validate(conn.chart);
			if (exact_mode)
			{
				auto fam = reverse_time(
				    compose_with_simplex(theta_family(d), sigma));
				if (!word_algebra_nilpotent(conn, fam, order))
					throw std::invalid_argument(
					    "slot word algebra is not nilpotent within the "
					    "requested order");
			}
			res.system.set(d, c, rh_simplex(conn, sigma, order));
		}
	return res;
}

// ---- foliated cohomology --------------------------------------------------------

// dimensions of H^i of the foliated polynomial forms, graded by
// (coefficient degree + form degree) <= bound
inline std::vector<std::map<int, int>>
foliated_cohomology(const FoliatedChart& chart, int bound)
{
	int nl = chart.leaf_count();
	// basis per total weight s and form degree i
	struct Key
	{
		Poly::Monomial mono;
		std::vector<int> diff;
		auto operator<=>(const Key&) const = default;
	};
	std::vector<std::map<int, int>> result(nl + 1); // per i: weight -> dim
	for (int weight = 0; weight <= bound; ++weight)
	{
		// collect bases for form degrees 0..nl at this weight
		std::map<int, std::vector<Key>> basis;
		std::map<int, std::map<Key, int>> index;
		std::function<void(Poly::Monomial&, int, int)> gen_m =
		    [&](Poly::Monomial& cur, int var, int left) {
			    if (var == chart.m)
			    {
				    int used = 0;
				    for (unsigned e : cur)
					    used += (int)e;
				    int i = weight - used;
				    if (i < 0 || i > nl)
					    return;
				    std::vector<int> diff;
				    std::function<void(int)> gen_d = [&](int start) {
					    if ((int)diff.size() == i)
					    {
						    Key k{cur, diff};
						    index[i][k] = (int)basis[i].size();
						    basis[i].push_back(k);
						    return;
					    }
					    for (int v = start; v < nl; ++v)
					    {
						    diff.push_back(v);
						    gen_d(v + 1);
						    diff.pop_back();
					    }
				    };
				    gen_d(0);
				    return;
			    }
			    for (int e = 0; e <= left; ++e)
			    {
				    cur[var] = e;
				    gen_m(cur, var + 1, left - e);
			    }
			    cur[var] = 0;
		    };
		Poly::Monomial cur(chart.m, 0);
		gen_m(cur, 0, weight);

		std::map<int, QMatrix> dmat;
		for (int i = 0; i < nl; ++i)
		{
			QMatrix m((int)basis[i + 1].size(), (int)basis[i].size());
			for (int col = 0; col < (int)basis[i].size(); ++col)
			{
				auto& key = basis[i][col];
				PolyForm f(chart.m);
				f.add_part(key.diff, Poly::monomial(chart.m, key.mono, 1));
				PolyForm df = chart.d_leaf(f);
				for (auto& [sset, c] : df.parts)
					for (auto& [mono, coef] : c.terms())
					{
						Key k2{mono, sset};
						auto it = index[i + 1].find(k2);
						if (it == index[i + 1].end())
							throw std::logic_error("weight grading broken");
						m(it->second, col) = coef;
					}
			}
			dmat[i] = m;
		}
		for (int i = 0; i <= nl; ++i)
		{
			int dim_i = (int)basis[i].size();
			int rk_out = i < nl ? rank(dmat[i]) : 0;
			int rk_in = i > 0 ? rank(dmat[i - 1]) : 0;
			int h = dim_i - rk_out - rk_in;
			if (h != 0)
				result[i][weight] = h;
		}
	}
	return result;
}

} // namespace koszul
