#pragma once
#include "hml/poly.hpp"
#include "hml/symbols.hpp"

namespace hml {

// Translation tau_{x0} f (x) = f(x - x0).
AnalyticPoly translate(const AnalyticPoly& f, double x0);
// Step version requires x0 * P to be an integer (cell-aligned shift).
StepFunction translate(const StepFunction& f, double x0);

// Shift average (1/N) sum_{j<N} tau_{j/N}. On analytic polynomials this is
// the Fourier multiplier keeping exactly the frequencies divisible by N;
// both routes are kept so they can be played against each other.
AnalyticPoly shift_average(const AnalyticPoly& f, int N);
StepFunction shift_average(const StepFunction& f, int N);  // requires N | P

// Conditional expectation onto the grid of N cells: cell value is the mean
// of f over that cell. Closed-form (exact) for analytic polynomials.
StepFunction grid_expectation(const AnalyticPoly& f, int N);
StepFunction grid_expectation(const StepFunction& f, int N);  // requires N | P

// Coefficientwise application; degree must not exceed the symbol horizon.
AnalyticPoly apply_symbol(const AnalyticPoly& f, const Symbol& mu);

// Coefficientwise indicator projection onto the idempotent set.
BivariatePoly apply_symbol_2d(const BivariatePoly& F, const IdemSet2D& A);

StepFunction abs_pointwise(const StepFunction& f);
StepFunction abs_pointwise(const AnalyticPoly& f, const QuadratureGrid& grid);

// Restriction of a 1/N-periodic step function to one period (P/N pieces).
// The value distribution is unchanged, which is all product-measure
// integration cares about; errors out if f is not exactly periodic.
StepFunction periodize(const StepFunction& f, int N);

}  // namespace hml
