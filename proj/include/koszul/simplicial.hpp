#pragma once

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace koszul {

// Reference to a possibly degenerate simplex: a degeneracy word applied to a
// nondegenerate base cell. Words are normalized to strictly decreasing
// indices (Eilenberg-Zilber normal form), so equality is structural.
struct SimplexRef
{
	int base_dim = 0;
	int base = 0;
	std::vector<int> word; // strictly decreasing, outermost first

	int dim() const { return base_dim + (int)word.size(); }
	auto operator<=>(const SimplexRef&) const = default;
};

// Finite simplicial set: nondegenerate cells per dimension with face data.
// Face targets may be degenerate.
struct SimplicialSet
{
	struct Cell
	{
		std::string label;
		std::vector<SimplexRef> faces; // dim+1 entries for dim >= 1
	};
	std::vector<std::vector<Cell>> cells; // by dimension

	int dim() const { return (int)cells.size() - 1; }
	int count(int d) const
	{
		return d >= 0 && d <= dim() ? (int)cells[d].size() : 0;
	}
	const Cell& cell(int d, int i) const { return cells[d][i]; }

	int index_of(int d, const std::string& label) const
	{
		for (int i = 0; i < count(d); ++i)
			if (cells[d][i].label == label)
				return i;
		throw std::out_of_range("no cell " + label);
	}
};

// s_j applied on the outside of a normalized ref
inline SimplexRef apply_degeneracy(SimplexRef r, int j)
{
	// rewrite s_j s_i = s_{i+1} s_j for j <= i
	std::vector<int> out;
	size_t pos = 0;
	while (pos < r.word.size() && j <= r.word[pos])
	{
		out.push_back(r.word[pos] + 1);
		++pos;
	}
	out.push_back(j);
	for (; pos < r.word.size(); ++pos)
		out.push_back(r.word[pos]);
	r.word = std::move(out);
	return r;
}

// d_i applied on the outside of a normalized ref
inline SimplexRef face_of_ref(const SimplicialSet& X, SimplexRef r, int i)
{
	if (!r.word.empty())
	{
		int j = r.word.front();
		std::vector<int> rest(r.word.begin() + 1, r.word.end());
		SimplexRef inner{r.base_dim, r.base, rest};
		if (i == j || i == j + 1)
			return inner;
		if (i < j)
		{
			SimplexRef f = face_of_ref(X, inner, i);
			return apply_degeneracy(f, j - 1);
		}
		SimplexRef f = face_of_ref(X, inner, i - 1);
		return apply_degeneracy(f, j);
	}
	if (r.base_dim == 0)
		throw std::invalid_argument("vertex has no faces");
	return X.cells[r.base_dim][r.base].faces[i];
}

// iterated faces selecting the subset S (sorted vertex positions) of a
// dim-n reference
inline SimplexRef face_by_subset(const SimplicialSet& X, SimplexRef r,
                                 const std::vector<int>& keep)
{
	int n = r.dim();
	std::vector<bool> in(n + 1, false);
	for (int v : keep)
		in[v] = true;
	for (int j = n; j >= 0; --j)
		if (!in[j])
			r = face_of_ref(X, r, j);
	return r;
}

inline SimplexRef vertex_of_ref(const SimplicialSet& X, const SimplexRef& r,
                                int v)
{
	return face_by_subset(X, r, {v});
}

// checks d_i d_j = d_{j-1} d_i for i < j on every stored cell
inline void validate_simplicial(const SimplicialSet& X)
{
	for (int d = 2; d <= X.dim(); ++d)
		for (int c = 0; c < X.count(d); ++c)
		{
			SimplexRef r{d, c, {}};
			for (int j = 1; j <= d; ++j)
				for (int i = 0; i < j; ++i)
				{
					auto a = face_of_ref(X, face_of_ref(X, r, j), i);
					auto b = face_of_ref(X, face_of_ref(X, r, i), j - 1);
					if (!(a == b))
						throw std::invalid_argument(
						    "simplicial identities fail at " +
						    X.cells[d][c].label);
				}
		}
	for (int d = 1; d <= X.dim(); ++d)
		for (int c = 0; c < X.count(d); ++c)
		{
			if ((int)X.cells[d][c].faces.size() != d + 1)
				throw std::invalid_argument("cell with wrong face count");
			for (auto& f : X.cells[d][c].faces)
			{
				std::vector<int> w = f.word;
				if (!std::is_sorted(w.rbegin(), w.rend()) ||
				    std::adjacent_find(w.begin(), w.end()) != w.end())
					throw std::invalid_argument(
					    "degeneracy word is not normalized");
				if (f.dim() != d - 1)
					throw std::invalid_argument("face with wrong dimension");
			}
		}
}

// all simplex references of dimension d (degenerate included)
inline std::vector<SimplexRef> all_refs(const SimplicialSet& X, int d)
{
	std::vector<std::set<SimplexRef>> by_dim(d + 1);
	for (int q = 0; q <= std::min(d, X.dim()); ++q)
		for (int c = 0; c < X.count(q); ++c)
			by_dim[q].insert(SimplexRef{q, c, {}});
	for (int q = 0; q < d; ++q)
		for (auto& r : by_dim[q])
			for (int j = 0; j <= q; ++j)
				by_dim[q + 1].insert(apply_degeneracy(r, j));
	return {by_dim[d].begin(), by_dim[d].end()};
}

// ---- standard complexes ----------------------------------------------------

namespace detail {

inline std::string subset_label(const std::vector<int>& s)
{
	std::string l = "(";
	for (size_t i = 0; i < s.size(); ++i)
		l += (i ? " " : "") + std::to_string(s[i]);
	return l + ")";
}

} // namespace detail

// subcomplex of Delta[n] given by a predicate on vertex subsets
inline SimplicialSet
delta_subcomplex(int n, const std::function<bool(const std::vector<int>&)>& keep)
{
	SimplicialSet X;
	std::map<std::vector<int>, int> index;
	std::vector<std::vector<std::vector<int>>> subs(n + 1);
	std::function<void(int, std::vector<int>&)> rec = [&](int start,
	                                                      std::vector<int>& cur) {
		if (!cur.empty())
		{
			if (keep(cur))
				subs[cur.size() - 1].push_back(cur);
		}
		for (int v = start; v <= n; ++v)
		{
			cur.push_back(v);
			rec(v + 1, cur);
			cur.pop_back();
		}
	};
	std::vector<int> cur;
	rec(0, cur);
	X.cells.resize(n + 1);
	for (int d = 0; d <= n; ++d)
		for (auto& s : subs[d])
		{
			index[s] = (int)X.cells[d].size();
			X.cells[d].push_back({detail::subset_label(s), {}});
		}
	for (int d = 1; d <= n; ++d)
		for (auto& s : subs[d])
		{
			auto& cell = X.cells[d][index[s]];
			for (int i = 0; i <= d; ++i)
			{
				std::vector<int> f = s;
				f.erase(f.begin() + i);
				if (!index.count(f))
					throw std::invalid_argument(
					    "subset predicate is not closed under faces");
				cell.faces.push_back(SimplexRef{d - 1, index[f], {}});
			}
		}
	// drop empty top dimensions
	while (!X.cells.empty() && X.cells.back().empty())
		X.cells.pop_back();
	return X;
}

inline SimplicialSet delta(int n)
{
	return delta_subcomplex(n, [](auto&) { return true; });
}

inline SimplicialSet boundary(int n)
{
	return delta_subcomplex(
	    n, [n](const std::vector<int>& s) { return (int)s.size() <= n; });
}

inline SimplicialSet horn(int n, int j)
{
	return delta_subcomplex(n, [n, j](const std::vector<int>& s) {
		// contained in some face d_i with i != j
		for (int i = 0; i <= n; ++i)
		{
			if (i == j)
				continue;
			if (std::find(s.begin(), s.end(), i) == s.end())
				return true;
		}
		return false;
	});
}

// ---- products with Delta[1] -------------------------------------------------

using Chain = std::vector<std::pair<int, int>>; // strictly increasing in
                                                // [n] x [1]

// subcomplex of Delta[n] x Delta[1] given by a predicate on vertex chains
inline SimplicialSet
prism_subcomplex(int n, const std::function<bool(const Chain&)>& keep,
                 std::map<Chain, std::pair<int, int>>* index_out = nullptr)
{
	std::vector<std::pair<int, int>> verts;
	for (int b = 0; b <= 1; ++b)
		for (int a = 0; a <= n; ++a)
			verts.push_back({a, b});
	std::vector<std::vector<Chain>> chains(n + 2);
	std::function<void(size_t, Chain&)> rec = [&](size_t start, Chain& cur) {
		if (!cur.empty() && keep(cur))
			chains[cur.size() - 1].push_back(cur);
		for (size_t k = start; k < verts.size(); ++k)
		{
			auto [a, b] = verts[k];
			if (!cur.empty())
			{
				auto [pa, pb] = cur.back();
				if (!((pa <= a && pb <= b) && (pa != a || pb != b)))
					continue;
			}
			cur.push_back(verts[k]);
			rec(k + 1, cur);
			cur.pop_back();
		}
	};
	Chain cur;
	rec(0, cur);

	SimplicialSet X;
	X.cells.resize(n + 2);
	std::map<Chain, int> index;
	for (int d = 0; d <= n + 1; ++d)
		for (auto& c : chains[d])
		{
			index[c] = (int)X.cells[d].size();
			std::string l = "[";
			for (auto& [a, b] : c)
				l += "(" + std::to_string(a) + "," + std::to_string(b) + ")";
			l += "]";
			X.cells[d].push_back({l, {}});
			if (index_out)
				(*index_out)[c] = {d, index[c]};
		}
	for (int d = 1; d <= n + 1; ++d)
		for (auto& c : chains[d])
		{
			auto& cell = X.cells[d][index[c]];
			for (int i = 0; i <= d; ++i)
			{
				Chain f = c;
				f.erase(f.begin() + i);
				if (!index.count(f))
					throw std::invalid_argument(
					    "chain predicate is not closed under faces");
				cell.faces.push_back(SimplexRef{d - 1, index[f], {}});
			}
		}
	while (!X.cells.empty() && X.cells.back().empty())
		X.cells.pop_back();
	return X;
}

inline SimplicialSet prism(int n)
{
	return prism_subcomplex(n, [](auto&) { return true; });
}

// the canonical n+1 top simplices of Delta[n] x Delta[1]: x_k has vertices
// (0,0)..(k,0),(k,1)..(n,1)
inline std::vector<Chain> prism_decomposition(int n)
{
	std::vector<Chain> out;
	for (int k = 0; k <= n; ++k)
	{
		Chain c;
		for (int a = 0; a <= k; ++a)
			c.push_back({a, 0});
		for (int a = k; a <= n; ++a)
			c.push_back({a, 1});
		out.push_back(c);
	}
	return out;
}

// ---- simplicial maps --------------------------------------------------------

struct SimplicialMap
{
	const SimplicialSet* src = nullptr;
	const SimplicialSet* tgt = nullptr;
	std::vector<std::vector<SimplexRef>> image; // per dim, per nondeg cell

	SimplexRef map_ref(const SimplexRef& r) const
	{
		SimplexRef out = image[r.base_dim][r.base];
		for (auto it = r.word.rbegin(); it != r.word.rend(); ++it)
			out = apply_degeneracy(out, *it);
		return out;
	}

	bool operator==(const SimplicialMap& o) const { return image == o.image; }
	bool operator<(const SimplicialMap& o) const { return image < o.image; }
};

inline bool map_valid(const SimplicialMap& f)
{
	for (int d = 1; d < (int)f.image.size(); ++d)
		for (int c = 0; c < (int)f.image[d].size(); ++c)
		{
			SimplexRef r{d, c, {}};
			for (int i = 0; i <= d; ++i)
			{
				auto lhs = face_of_ref(*f.tgt, f.image[d][c], i);
				auto rhs = f.map_ref(face_of_ref(*f.src, r, i));
				if (!(lhs == rhs))
					return false;
			}
		}
	return true;
}

// enumerates Hom(K, X) by dimension-major backtracking
inline std::vector<SimplicialMap> hom_set(const SimplicialSet& K,
                                          const SimplicialSet& X)
{
	std::vector<SimplicialMap> out;
	SimplicialMap f;
	f.src = &K;
	f.tgt = &X;
	f.image.resize(K.dim() + 1);
	for (int d = 0; d <= K.dim(); ++d)
		f.image[d].resize(K.count(d));

	std::vector<std::vector<SimplexRef>> cands(K.dim() + 1);
	for (int d = 0; d <= K.dim(); ++d)
		cands[d] = all_refs(X, d);

	std::function<void(int, int)> rec = [&](int d, int c) {
		if (d > K.dim())
		{
			out.push_back(f);
			return;
		}
		if (c >= K.count(d))
		{
			rec(d + 1, 0);
			return;
		}
		SimplexRef r{d, c, {}};
		for (auto& cand : cands[d])
		{
			bool ok = true;
			for (int i = 0; ok && d >= 1 && i <= d; ++i)
			{
				auto want = f.map_ref(face_of_ref(K, r, i));
				auto got = face_of_ref(X, cand, i);
				ok = want == got;
			}
			if (!ok)
				continue;
			f.image[d][c] = cand;
			rec(d, c + 1);
		}
	};
	rec(0, 0);
	return out;
}

inline std::vector<SimplicialMap> matching_object(const SimplicialSet& K,
                                                  const SimplicialSet& X)
{
	return hom_set(K, X);
}

// restriction of an n-simplex reference to a Delta-subcomplex whose cells
// are labelled by vertex subsets (delta_subcomplex output)
inline SimplicialMap restrict_to_subsets(const SimplicialSet& K,
                                         const SimplicialSet& X,
                                         const SimplexRef& big,
                                         const std::vector<std::vector<std::vector<int>>>& subsets)
{
	SimplicialMap f;
	f.src = &K;
	f.tgt = &X;
	f.image.resize(K.dim() + 1);
	for (int d = 0; d <= K.dim(); ++d)
	{
		f.image[d].resize(K.count(d));
		for (int c = 0; c < K.count(d); ++c)
			f.image[d][c] = face_by_subset(X, big, subsets[d][c]);
	}
	return f;
}

// vertex subsets attached to delta_subcomplex cells, recovered from labels
inline std::vector<std::vector<std::vector<int>>>
subset_table(const SimplicialSet& K)
{
	std::vector<std::vector<std::vector<int>>> out(K.dim() + 1);
	for (int d = 0; d <= K.dim(); ++d)
		for (int c = 0; c < K.count(d); ++c)
		{
			std::vector<int> s;
			const std::string& l = K.cells[d][c].label;
			int cur = -1;
			for (char ch : l)
			{
				if (ch >= '0' && ch <= '9')
					cur = (cur < 0 ? 0 : cur * 10) + (ch - '0');
				else if (cur >= 0)
				{
					s.push_back(cur);
					cur = -1;
				}
			}
			out[d].push_back(s);
		}
	return out;
}

struct KanReport
{
	bool surjective;
	bool unique;
	int horn_count;
	int filler_count;
};

// surjectivity (resp. bijectivity) of X_n -> X(Lambda^i[n])
inline KanReport kan_report(const SimplicialSet& X, int n, int i)
{
	if (n < 1 || i < 0 || i > n)
		throw std::invalid_argument("horn index out of range");
	auto H = horn(n, i);
	auto horn_maps = hom_set(H, X);
	auto subs = subset_table(H);
	std::map<std::vector<std::vector<SimplexRef>>, int> hits;
	for (auto& r : all_refs(X, n))
	{
		auto f = restrict_to_subsets(H, X, r, subs);
		hits[f.image]++;
	}
	bool surj = true, uniq = true;
	for (auto& m : horn_maps)
	{
		auto it = hits.find(m.image);
		int k = it == hits.end() ? 0 : it->second;
		surj = surj && k >= 1;
		uniq = uniq && k == 1;
	}
	return {surj, uniq, (int)horn_maps.size(), 0};
}

inline bool kan_check(const SimplicialSet& X, int n, int i)
{
	return kan_report(X, n, i).surjective;
}

inline bool unique_kan_check(const SimplicialSet& X, int n, int i)
{
	return kan_report(X, n, i).unique;
}

// ---- nerves ------------------------------------------------------------------

struct FiniteCategory
{
	int nobj = 0;
	struct Mor
	{
		int src, tgt;
		std::string label;
	};
	std::vector<Mor> mor;                  // including identities
	std::vector<int> identity;             // per object
	std::map<std::pair<int, int>, int> comp; // comp[{g,f}] = g o f

	bool is_identity(int m) const
	{
		for (int id : identity)
			if (id == m)
				return true;
		return false;
	}
	int compose(int g, int f) const
	{
		auto it = comp.find({g, f});
		if (it == comp.end())
			throw std::invalid_argument("composition not defined");
		return it->second;
	}
	void validate() const
	{
		for (int f = 0; f < (int)mor.size(); ++f)
		{
			if (compose(identity[mor[f].tgt], f) != f ||
			    compose(f, identity[mor[f].src]) != f)
				throw std::invalid_argument("identity laws fail");
			for (int g = 0; g < (int)mor.size(); ++g)
			{
				if (mor[g].src != mor[f].tgt)
					continue;
				int gf = compose(g, f);
				if (mor[gf].src != mor[f].src || mor[gf].tgt != mor[g].tgt)
					throw std::invalid_argument("composition typing fails");
				for (int h = 0; h < (int)mor.size(); ++h)
				{
					if (mor[h].src != mor[g].tgt)
						continue;
					if (compose(h, gf) != compose(compose(h, g), f))
						throw std::invalid_argument("associativity fails");
				}
			}
		}
	}
};

struct FiniteGroupoid : FiniteCategory
{
	std::vector<int> inverse; // per morphism
	void validate_groupoid() const
	{
		validate();
		for (int f = 0; f < (int)mor.size(); ++f)
		{
			if (compose(inverse[f], f) != identity[mor[f].src] ||
			    compose(f, inverse[f]) != identity[mor[f].tgt])
				throw std::invalid_argument("inverse laws fail");
		}
	}
};

// nerve of a finite category up to the given dimension; nondegenerate cells
// are identity-free composable strings (m_1: x0 -> x1, ..., m_p)
inline SimplicialSet nerve(const FiniteCategory& C, int N)
{
	SimplicialSet X;
	X.cells.resize(N + 1);
	std::map<std::vector<int>, int> index; // string -> cell (per dim via size)
	for (int o = 0; o < C.nobj; ++o)
		X.cells[0].push_back({"x" + std::to_string(o), {}});

	std::vector<std::vector<std::vector<int>>> strings(N + 1);
	std::function<void(std::vector<int>&)> rec = [&](std::vector<int>& cur) {
		int p = (int)cur.size();
		if (p >= 1)
			strings[p].push_back(cur);
		if (p == N)
			return;
		for (int m = 0; m < (int)C.mor.size(); ++m)
		{
			if (C.is_identity(m))
				continue;
			if (!cur.empty() && C.mor[m].src != C.mor[cur.back()].tgt)
				continue;
			cur.push_back(m);
			rec(cur);
			cur.pop_back();
		}
	};
	std::vector<int> cur;
	rec(cur);
	for (int p = 1; p <= N; ++p)
		for (auto& s : strings[p])
		{
			index[s] = (int)X.cells[p].size();
			std::string l;
			for (int m : s)
				l += (l.empty() ? "" : "|") + C.mor[m].label;
			X.cells[p].push_back({l, {}});
		}

	// normalize a string with possible identities into a SimplexRef
	std::function<SimplexRef(const std::vector<int>&)> normalize =
	    [&](const std::vector<int>& s) -> SimplexRef {
		for (size_t t = 0; t < s.size(); ++t)
			if (C.is_identity(s[t]))
			{
				std::vector<int> rest = s;
				rest.erase(rest.begin() + t);
				if (rest.empty())
					return apply_degeneracy(
					    SimplexRef{0, C.mor[s[t]].src, {}}, 0);
				return apply_degeneracy(normalize(rest), (int)t);
			}
		return SimplexRef{(int)s.size(), index.at(s), {}};
	};

	for (int p = 1; p <= N; ++p)
		for (auto& s : strings[p])
		{
			auto& cell = X.cells[p][index[s]];
			for (int i = 0; i <= p; ++i)
			{
				if (p == 1)
				{
					// edge faces are vertices: d_0 = target, d_1 = source
					int v = i == 0 ? C.mor[s[0]].tgt : C.mor[s[0]].src;
					cell.faces.push_back(SimplexRef{0, v, {}});
					continue;
				}
				std::vector<int> f;
				if (i == 0)
					f.assign(s.begin() + 1, s.end());
				else if (i == p)
					f.assign(s.begin(), s.end() - 1);
				else
				{
					f = s;
					int comp = C.compose(s[i], s[i - 1]);
					f[i - 1] = comp;
					f.erase(f.begin() + i);
				}
				if (f.empty())
					cell.faces.push_back(SimplexRef{0, C.mor[s[0]].src, {}});
				else
					cell.faces.push_back(normalize(f));
			}
		}
	validate_simplicial(X);
	return X;
}

inline FiniteGroupoid cyclic_group(int n)
{
	FiniteGroupoid G;
	G.nobj = 1;
	for (int k = 0; k < n; ++k)
		G.mor.push_back({0, 0, "g" + std::to_string(k)});
	G.identity = {0};
	for (int a = 0; a < n; ++a)
		for (int b = 0; b < n; ++b)
			G.comp[{a, b}] = (a + b) % n;
	G.inverse.resize(n);
	for (int a = 0; a < n; ++a)
		G.inverse[a] = (n - a) % n;
	return G;
}

// bounded nerve of the integers: strings with total absolute sum <= bound
inline SimplicialSet bounded_z_nerve(int bound, int N)
{
	SimplicialSet X;
	X.cells.resize(N + 1);
	X.cells[0].push_back({"*", {}});
	std::map<std::vector<int>, int> index;
	std::vector<std::vector<std::vector<int>>> strings(N + 1);
	std::function<void(std::vector<int>&, int)> rec = [&](std::vector<int>& cur,
	                                                      int used) {
		int p = (int)cur.size();
		if (p >= 1)
			strings[p].push_back(cur);
		if (p == N)
			return;
		for (int g = -bound; g <= bound; ++g)
		{
			if (g == 0 || used + std::abs(g) > bound)
				continue;
			cur.push_back(g);
			rec(cur, used + std::abs(g));
			cur.pop_back();
		}
	};
	std::vector<int> cur;
	rec(cur, 0);
	for (int p = 1; p <= N; ++p)
		for (auto& s : strings[p])
		{
			index[s] = (int)X.cells[p].size();
			std::string l;
			for (int m : s)
				l += (l.empty() ? "" : "|") + std::to_string(m);
			X.cells[p].push_back({l, {}});
		}
	std::function<SimplexRef(const std::vector<int>&)> normalize =
	    [&](const std::vector<int>& s) -> SimplexRef {
		for (size_t t = 0; t < s.size(); ++t)
			if (s[t] == 0)
			{
				std::vector<int> rest = s;
				rest.erase(rest.begin() + t);
				if (rest.empty())
					return apply_degeneracy(SimplexRef{0, 0, {}}, 0);
				return apply_degeneracy(normalize(rest), (int)t);
			}
		return SimplexRef{(int)s.size(), index.at(s), {}};
	};
	for (int p = 1; p <= N; ++p)
		for (auto& s : strings[p])
		{
			auto& cell = X.cells[p][index[s]];
			for (int i = 0; i <= p; ++i)
			{
				std::vector<int> f;
				if (i == 0)
					f.assign(s.begin() + 1, s.end());
				else if (i == p)
					f.assign(s.begin(), s.end() - 1);
				else
				{
					f = s;
					f[i - 1] = s[i - 1] + s[i];
					f.erase(f.begin() + i);
				}
				if (f.empty())
					cell.faces.push_back(SimplexRef{0, 0, {}});
				else
					cell.faces.push_back(normalize(f));
			}
		}
	validate_simplicial(X);
	return X;
}

// ---- path object --------------------------------------------------------------

struct PathObject
{
	// level p: tuples (y_0..y_p) of (p+1)-refs with d_{k+1} y_k = d_{k+1} y_{k+1}
	std::vector<std::vector<std::vector<SimplexRef>>> levels;
};

// levels of X^{Delta[1]} up to m via the prism gluing
inline PathObject path_object_levels(const SimplicialSet& X, int m)
{
	PathObject P;
	P.levels.resize(m + 1);
	for (int p = 0; p <= m; ++p)
	{
		auto refs = all_refs(X, p + 1);
		std::vector<std::vector<SimplexRef>> tuples;
		std::vector<SimplexRef> cur(p + 1);
		std::function<void(int)> rec = [&](int k) {
			if (k == p + 1)
			{
				tuples.push_back(cur);
				return;
			}
			for (auto& r : refs)
			{
				if (k > 0 &&
				    !(face_of_ref(X, cur[k - 1], k) == face_of_ref(X, r, k)))
					continue;
				cur[k] = r;
				rec(k + 1);
			}
		};
		rec(0);
		P.levels[p] = std::move(tuples);
	}
	return P;
}

// the three structure maps on a level-p tuple
inline SimplexRef path_d0(const SimplicialSet& X,
                          const std::vector<SimplexRef>& y)
{
	return face_of_ref(X, y.front(), 0); // restriction to Delta[n] x {1}
}
inline SimplexRef path_d1(const SimplicialSet& X,
                          const std::vector<SimplexRef>& y)
{
	return face_of_ref(X, y.back(), (int)y.size()); // Delta[n] x {0}
}
inline std::vector<SimplexRef> path_s0(const SimplicialSet& X,
                                       const SimplexRef& x)
{
	std::vector<SimplexRef> out;
	for (int k = 0; k <= x.dim(); ++k)
		out.push_back(apply_degeneracy(x, k));
	return out;
}

// ---- collapsible extensions ----------------------------------------------------

struct HornStep
{
	int dim;   // dimension of the filled simplex
	int cell;  // its index
	int horn;  // the free face index
};

// subcomplex = set of nondegenerate cells (per dim) closed under faces
using CellSet = std::vector<std::set<int>>;

inline bool cellset_closed(const SimplicialSet& X, const CellSet& s)
{
	for (int d = 1; d < (int)s.size(); ++d)
		for (int c : s[d])
			for (int i = 0; i <= d; ++i)
			{
				auto f = face_of_ref(X, SimplexRef{d, c, {}}, i);
				if (!s[f.base_dim].count(f.base))
					return false;
			}
	return true;
}

// exhaustive DFS over horn fillings from S up to the full complex T
inline std::optional<std::vector<HornStep>>
collapsible_decomposition(const SimplicialSet& T, CellSet S,
                          int max_cells = 200)
{
	int total = 0;
	for (int d = 0; d <= T.dim(); ++d)
		total += T.count(d);
	if (total > max_cells)
		throw std::invalid_argument("complex exceeds the search bound");
	if (!cellset_closed(T, S))
		throw std::invalid_argument("start is not a subcomplex");
	S.resize(T.dim() + 1);

	auto full = [&] {
		int have = 0;
		for (auto& s : S)
			have += (int)s.size();
		return have == total;
	};
	std::set<CellSet> seen;
	std::vector<HornStep> steps;
	std::function<bool()> dfs = [&]() -> bool {
		if (full())
			return true;
		if (!seen.insert(S).second)
			return false;
		for (int d = 1; d <= T.dim(); ++d)
			for (int c = 0; c < T.count(d); ++c)
			{
				if (S[d].count(c))
					continue;
				// find a unique missing face: pushout along Lambda^j[d]
				int missing = -1;
				bool ok = true;
				for (int i = 0; ok && i <= d; ++i)
				{
					auto f = face_of_ref(T, SimplexRef{d, c, {}}, i);
					bool have = S[f.base_dim].count(f.base) > 0;
					if (!have)
					{
						// the single free face must itself be nondegenerate
						if (missing >= 0 || !f.word.empty())
							ok = false;
						else
							missing = i;
					}
				}
				if (!ok || missing < 0)
					continue;
				auto f = face_of_ref(T, SimplexRef{d, c, {}}, missing);
				S[d].insert(c);
				S[d - 1].insert(f.base);
				steps.push_back({d, c, missing});
				if (dfs())
					return true;
				steps.pop_back();
				S[d].erase(c);
				S[d - 1].erase(f.base);
			}
		return false;
	};
	if (dfs())
		return steps;
	return std::nullopt;
}

} // namespace koszul
