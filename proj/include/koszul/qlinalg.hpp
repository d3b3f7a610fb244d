#pragma once

#include "koszul/poly.hpp"
#include "koszul/rational.hpp"

#include <vector>

namespace koszul {

// Dense exact rational matrix, row-major.
struct QMatrix
{
	int rows = 0, cols = 0;
	std::vector<Rational> a;

	QMatrix() = default;
	QMatrix(int r, int c) : rows(r), cols(c), a((size_t)r * c, Rational(0)) {}

	static QMatrix identity(int n)
	{
		QMatrix m(n, n);
		for (int i = 0; i < n; ++i)
			m(i, i) = 1;
		return m;
	}

	Rational& operator()(int i, int j) { return a[(size_t)i * cols + j]; }
	const Rational& operator()(int i, int j) const
	{
		return a[(size_t)i * cols + j];
	}

	bool is_zero() const
	{
		for (auto& x : a)
			if (x != 0)
				return false;
		return true;
	}

	friend QMatrix operator*(const QMatrix& x, const QMatrix& y)
	{
		QMatrix r(x.rows, y.cols);
		for (int i = 0; i < x.rows; ++i)
			for (int k = 0; k < x.cols; ++k)
			{
				if (x(i, k) == 0)
					continue;
				for (int j = 0; j < y.cols; ++j)
					r(i, j) += x(i, k) * y(k, j);
			}
		return r;
	}
	friend QMatrix operator+(const QMatrix& x, const QMatrix& y)
	{
		QMatrix r = x;
		for (size_t i = 0; i < r.a.size(); ++i)
			r.a[i] += y.a[i];
		return r;
	}
	friend QMatrix operator-(const QMatrix& x, const QMatrix& y)
	{
		QMatrix r = x;
		for (size_t i = 0; i < r.a.size(); ++i)
			r.a[i] -= y.a[i];
		return r;
	}
	friend QMatrix operator*(const Rational& c, const QMatrix& x)
	{
		QMatrix r = x;
		for (auto& v : r.a)
			v *= c;
		return r;
	}
	bool operator==(const QMatrix& o) const
	{
		return rows == o.rows && cols == o.cols && a == o.a;
	}
};

// Reduced row echelon form in place; returns pivot columns.
inline std::vector<int> rref(QMatrix& m)
{
	std::vector<int> pivots;
	int r = 0;
	for (int c = 0; c < m.cols && r < m.rows; ++c)
	{
		int p = -1;
		for (int i = r; i < m.rows; ++i)
			if (m(i, c) != 0)
			{
				p = i;
				break;
			}
		if (p < 0)
			continue;
		for (int j = 0; j < m.cols; ++j)
			std::swap(m(p, j), m(r, j));
		Rational inv = Rational(1) / m(r, c);
		for (int j = 0; j < m.cols; ++j)
			m(r, j) *= inv;
		for (int i = 0; i < m.rows; ++i)
			if (i != r && m(i, c) != 0)
			{
				Rational f = m(i, c);
				for (int j = 0; j < m.cols; ++j)
					m(i, j) -= f * m(r, j);
			}
		pivots.push_back(c);
		++r;
	}
	return pivots;
}

inline int rank(QMatrix m) { return (int)rref(m).size(); }

// Basis of the right kernel, as columns.
inline std::vector<std::vector<Rational>> kernel_basis(QMatrix m)
{
	auto pivots = rref(m);
	std::vector<bool> is_pivot(m.cols, false);
	for (int c : pivots)
		is_pivot[c] = true;
	std::vector<std::vector<Rational>> basis;
	for (int c = 0; c < m.cols; ++c)
	{
		if (is_pivot[c])
			continue;
		std::vector<Rational> v(m.cols, Rational(0));
		v[c] = 1;
		for (int r = 0; r < (int)pivots.size(); ++r)
			v[pivots[r]] = -m(r, c);
		basis.push_back(std::move(v));
	}
	return basis;
}

// Solves m x = b; returns empty if inconsistent.
inline std::optional<std::vector<Rational>> solve(QMatrix m,
                                                  std::vector<Rational> b)
{
	int n = m.cols;
	QMatrix aug(m.rows, n + 1);
	for (int i = 0; i < m.rows; ++i)
	{
		for (int j = 0; j < n; ++j)
			aug(i, j) = m(i, j);
		aug(i, n) = b[i];
	}
	auto pivots = rref(aug);
	if (!pivots.empty() && pivots.back() == n)
		return std::nullopt;
	std::vector<Rational> x(n, Rational(0));
	for (int r = 0; r < (int)pivots.size(); ++r)
		x[pivots[r]] = aug(r, n);
	return x;
}

// Fraction-free Bareiss rank of a polynomial matrix: the generic rank over
// the rational function field of the chart.
inline int bareiss_rank(std::vector<std::vector<Poly>> m)
{
	if (m.empty() || m[0].empty())
		return 0;
	int rows = (int)m.size(), cols = (int)m[0].size();
	int rank = 0;
	int r = 0;
	for (int c = 0; c < cols && r < rows; ++c)
	{
		int p = -1;
		for (int i = r; i < rows; ++i)
			if (!m[i][c].is_zero())
			{
				p = i;
				break;
			}
		if (p < 0)
			continue;
		std::swap(m[p], m[r]);
		for (int i = r + 1; i < rows; ++i)
		{
			// row_i := row_i * m[r][c] - row_r * m[i][c]; exactness of the
			// rank is unaffected by the extra polynomial factor
			for (int j = c + 1; j < cols; ++j)
				m[i][j] = m[i][j] * m[r][c] - m[r][j] * m[i][c];
			m[i][c] = Poly(m[i][c].nvars());
		}
		++rank;
		++r;
	}
	return rank;
}

} // namespace koszul
