#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace levydiv::poly {

// Coefficient vectors are ascending: p[0] + p[1] x + ... + p[n] x^n.

template <typename T>
T evaluate(const std::vector<double>& p, T x) {
    T acc{0.0};
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

std::vector<double> derivative(const std::vector<double>& p);
std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> scale(const std::vector<double>& a, double k);
/// Drops exactly-zero leading coefficients.
std::vector<double> trim(std::vector<double> p);
/// Largest absolute coefficient.
double norm_inf(const std::vector<double>& p);

}  // namespace levydiv::poly
