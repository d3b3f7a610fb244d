#pragma once

#include "koszul/linfty.hpp"
#include "koszul/qlinalg.hpp"

namespace koszul {

// Resolution of an involutive module of vector fields by free modules, the
// input for homotopy transfer. Everything is given in the unshifted picture:
// E sits in cohomological degrees -n..0 with differential of degree +1, rho
// maps degree-0 generators onto the module generators, delta is a chosen
// section. The contracting homotopy is canonical: preimages of the
// differential are computed on polynomial-degree slices by reduced-echelon
// elimination, so rebuilding yields identical brackets.
struct ResolutionData
{
	int nvars = 0;
	std::vector<std::string> var_names;
	GradedModule E; // degrees -n..0
	LinearMap d;    // degree +1, squares to zero

	struct ModuleGen
	{
		std::string label;
		VectorField field;
	};
	std::vector<ModuleGen> F;
	// bracket table: [f_i, f_j] = sum_l c[i][j][l] f_l, i < j
	std::map<std::pair<int, int>, std::vector<Poly>> bracket_table;

	std::vector<std::vector<Poly>> rho;   // E_0 gen -> F coefficients
	std::vector<GradedElement> delta;     // F gen -> element of E_0

	int slice_bound = 6; // polynomial degree cap for exactness/preimages
};

struct TransferredStructure
{
	LInftyStructure structure;
	// (arity, tuple) -> the obstruction this bracket value kills
	std::map<std::pair<int, std::vector<int>>, GradedElement> obstructions;
};

namespace detail {

inline std::vector<Poly::Monomial> monomials_upto(int nvars, int bound)
{
	std::vector<Poly::Monomial> out;
	Poly::Monomial cur(nvars, 0);
	std::function<void(int, int)> rec = [&](int var, int left) {
		if (var == nvars)
		{
			out.push_back(cur);
			return;
		}
		for (int e = 0; e <= left; ++e)
		{
			cur[var] = e;
			rec(var + 1, left - e);
		}
		cur[var] = 0;
	};
	rec(0, bound);
	std::sort(out.begin(), out.end());
	return out;
}

// Solve map(z) = w over the polynomial-degree slice, z supported on the
// given generator set. Deterministic: first solution of the reduced system.
inline std::optional<GradedElement>
slice_solve(const LinearMap& map, const std::vector<int>& dom_gens,
            const GradedElement& w, int nvars, int bound)
{
	auto monos = monomials_upto(nvars, bound);
	std::map<std::pair<Poly::Monomial, int>, int> row_index;
	std::vector<std::pair<Poly::Monomial, int>> rows;
	auto row_of = [&](const Poly::Monomial& m, int g) {
		auto key = std::make_pair(m, g);
		auto it = row_index.find(key);
		if (it != row_index.end())
			return it->second;
		int id = (int)rows.size();
		row_index.emplace(key, id);
		rows.push_back(key);
		return id;
	};
	// columns: (monomial, domain generator)
	std::vector<std::pair<Poly::Monomial, int>> cols;
	for (int g : dom_gens)
		for (auto& m : monos)
			cols.push_back({m, g});
	std::vector<std::map<int, Rational>> colvals(cols.size());
	for (size_t c = 0; c < cols.size(); ++c)
	{
		auto& [m, g] = cols[c];
		Poly mono = Poly::monomial(nvars, m, 1);
		for (auto& [h, coef] : map.images[g].coeffs)
		{
			Poly prod = mono * coef;
			for (auto& [m2, k] : prod.terms())
				colvals[c][row_of(m2, h)] += k;
		}
	}
	std::map<int, Rational> wvals;
	for (auto& [h, coef] : w.coeffs)
		for (auto& [m2, k] : coef.terms())
			wvals[row_of(m2, h)] += k;
	QMatrix A((int)rows.size(), (int)cols.size());
	for (size_t c = 0; c < cols.size(); ++c)
		for (auto& [r, v] : colvals[c])
			A((int)r, (int)c) = v;
	std::vector<Rational> b(rows.size(), Rational(0));
	for (auto& [r, v] : wvals)
		b[r] = v;
	auto sol = solve(A, b);
	if (!sol)
		return std::nullopt;
	GradedElement z(nvars);
	for (size_t c = 0; c < cols.size(); ++c)
		if ((*sol)[c] != 0)
			z.add(cols[c].second,
			      Poly::monomial(nvars, cols[c].first, (*sol)[c]));
	return z;
}

} // namespace detail

class TransferError : public std::runtime_error
{
  public:
	using std::runtime_error::runtime_error;
};

// Validates the resolution: d^2 = 0, rho kills boundaries, the bracket
// table matches the honest vector-field brackets, delta sections rho, and
// the complex is exact on polynomial-degree slices.
inline void validate_resolution(const ResolutionData& r)
{
	for (int g = 0; g < r.E.size(); ++g)
		if (!r.d.apply(r.d.images[g]).is_zero())
			throw TransferError("resolution differential does not square to zero");

	auto field_of_F = [&](const std::vector<Poly>& coeffs) {
		VectorField v(r.nvars);
		for (size_t l = 0; l < r.F.size(); ++l)
			for (int i = 0; i < r.nvars; ++i)
				v.comp[i] += coeffs[l] * r.F[l].field.comp[i];
		return v;
	};
	// bracket table against the actual Lie brackets
	for (size_t i = 0; i < r.F.size(); ++i)
		for (size_t j = i + 1; j < r.F.size(); ++j)
		{
			auto it = r.bracket_table.find({(int)i, (int)j});
			std::vector<Poly> c(r.F.size(), Poly(r.nvars));
			if (it != r.bracket_table.end())
				c = it->second;
			auto lhs = lie_bracket(r.F[i].field, r.F[j].field);
			auto rhs = field_of_F(c);
			if (!(lhs == rhs))
				throw TransferError("bracket table does not match [" +
				                    r.F[i].label + ", " + r.F[j].label + "]");
		}
	// rho o delta = id as vector fields
	auto field_of_E0 = [&](const GradedElement& e) {
		VectorField v(r.nvars);
		for (auto& [g, coef] : e.coeffs)
			for (int i = 0; i < r.nvars; ++i)
				for (size_t l = 0; l < r.F.size(); ++l)
					v.comp[i] += coef * r.rho[g][l] * r.F[l].field.comp[i];
		return v;
	};
	auto e0 = r.E.indices_of_degree(0);
	for (size_t l = 0; l < r.F.size(); ++l)
		if (!(field_of_E0(r.delta[l]) == r.F[l].field))
			throw TransferError("delta is not a section of rho at " +
			                    r.F[l].label);
	// rho o d = 0
	for (int g = 0; g < r.E.size(); ++g)
		if (r.E.degree(g) == -1)
			if (!field_of_E0(r.d.images[g]).is_zero())
				throw TransferError("rho does not annihilate boundaries");
	(void)e0;
}

// Inductive construction of the transferred structure on the shifted
// resolution. Arity by arity and degree by degree, the missing bracket is
// the canonical preimage of the partial Jacobiator; every identity is then
// re-verified exactly.
inline TransferredStructure transfer(const ResolutionData& r, int max_arity)
{
	validate_resolution(r);

	std::vector<GradedModule::Gen> shifted;
	for (auto& g : r.E.gens)
		shifted.push_back({g.label, g.degree - 1});
	TransferredStructure out;
	out.structure = LInftyStructure(r.nvars, r.var_names,
	                                GradedModule(shifted));
	LInftyStructure& L = out.structure;

	// anchor on shifted degree -1 (unshifted E_0)
	for (int g = 0; g < r.E.size(); ++g)
	{
		if (r.E.degree(g) != 0)
			continue;
		VectorField v(r.nvars);
		for (size_t l = 0; l < r.F.size(); ++l)
			for (int i = 0; i < r.nvars; ++i)
				v.comp[i] += r.rho[g][l] * r.F[l].field.comp[i];
		L.set_anchor(g, v);
	}
	// l_1 = d
	for (int g = 0; g < r.E.size(); ++g)
		if (!r.d.images[g].is_zero())
			L.set_bracket(1, {g}, r.d.images[g]);

	auto lower_gens = [&](int deg) { return L.carrier.indices_of_degree(deg); };

	auto solve_l1 = [&](const GradedElement& target,
	                    int target_degree) -> GradedElement {
		if (target.is_zero())
			return GradedElement(r.nvars);
		if (target_degree == -1)
		{
			// solvability needs rho(target) = 0
			VectorField v(r.nvars);
			for (auto& [g, coef] : target.coeffs)
				for (int i = 0; i < r.nvars; ++i)
					for (size_t l = 0; l < r.F.size(); ++l)
						v.comp[i] += coef * r.rho[g][l] * r.F[l].field.comp[i];
			if (!v.is_zero())
				throw TransferError(
				    "obstruction is not annihilated by the anchor");
		}
		else
		{
			GradedElement l1t(r.nvars);
			for (auto& [g, coef] : target.coeffs)
				l1t += coef * r.d.images[g];
			if (!l1t.is_zero())
				throw TransferError("obstruction is not a cycle");
		}
		int bound = r.slice_bound;
		for (auto& [g, coef] : target.coeffs)
			bound = std::max(bound, coef.total_degree() + r.slice_bound);
		LinearMap l1map = L.carrier.size() ? LinearMap(L.carrier, L.carrier,
		                                               1, r.nvars)
		                                   : LinearMap();
		for (int g = 0; g < L.carrier.size(); ++g)
			l1map.images[g] = r.d.images[g];
		auto z = detail::slice_solve(l1map, lower_gens(target_degree - 1),
		                             target, r.nvars, bound);
		if (!z)
			throw TransferError("obstruction is not exact on the slice");
		return *z;
	};

	// binary bracket on shifted degree -1 pairs through the module table
	{
		auto gens0 = lower_gens(-1);
		for (size_t a = 0; a < gens0.size(); ++a)
			for (size_t b = a + 1; b < gens0.size(); ++b)
			{
				int ga = gens0[a], gb = gens0[b];
				// [rho(ga), rho(gb)] expanded in module generators, then
				// pushed through delta
				GradedElement val(r.nvars);
				for (size_t p = 0; p < r.F.size(); ++p)
					for (size_t q = 0; q < r.F.size(); ++q)
					{
						Poly ap = r.rho[ga][p], bq = r.rho[gb][q];
						if (ap.is_zero() || bq.is_zero())
							continue;
						// [ap f_p, bq f_q] = ap bq [f_p,f_q]
						//   + ap rho(f_p)(bq) f_q - bq rho(f_q)(ap) f_p
						std::vector<Poly> fc(r.F.size(), Poly(r.nvars));
						if (p < q)
						{
							auto it = r.bracket_table.find({(int)p, (int)q});
							if (it != r.bracket_table.end())
								fc = it->second;
						}
						else if (q < p)
						{
							auto it = r.bracket_table.find({(int)q, (int)p});
							if (it != r.bracket_table.end())
								for (size_t l = 0; l < r.F.size(); ++l)
									fc[l] = -it->second[l];
						}
						for (size_t l = 0; l < r.F.size(); ++l)
							val += (ap * bq * fc[l]) * r.delta[l];
						val += (ap * r.F[p].field.apply(bq)) * r.delta[q];
						val += (Rational(-1) * (bq * r.F[q].field.apply(ap))) *
						       r.delta[p];
					}
				if (!val.is_zero())
					L.set_bracket(2, {std::min(ga, gb), std::max(ga, gb)},
					              val);
			}
	}

	// remaining brackets, arity by arity, total degree descending
	int bottom = *L.carrier.degrees().begin();
	for (int n = 2; n <= max_arity; ++n)
	{
		for (int D = -n; D >= bottom * n; --D)
		{
			for (auto& tuple : sorted_tuples(L.carrier, n))
			{
				int total = 0;
				for (int g : tuple)
					total += L.carrier.degree(g);
				if (total != D)
					continue;
				if (n == 2 && D == -2)
					continue; // base case above
				GradedElement W = jacobiator(L, n, tuple);
				if (W.is_zero())
					continue;
				auto value = solve_l1(-W, D + 2);
				out.obstructions[{n, tuple}] = W;
				if (!value.is_zero())
					L.set_bracket(n, tuple, value);
			}
		}
		// exact re-verification at this arity
		for (auto& tuple : sorted_tuples(L.carrier, n))
			if (!jacobiator(L, n, tuple).is_zero())
				throw TransferError("homotopy Jacobi identity fails at arity " +
				                    std::to_string(n));
	}
	return out;
}

} // namespace koszul
