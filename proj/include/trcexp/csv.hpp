#ifndef TRCEXP_CSV_HPP
#define TRCEXP_CSV_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trcexp/dual.hpp"

namespace trcexp {

// One rate point of a curve sweep. Column order is fixed:
// rate,dual,regime,regime_label,Er,Esp,Eex,primal,sigma,tau,lambda,theta,zeta,warnings
struct CurveRow {
    double rate = 0.0;
    double dual = 0.0;
    std::optional<double> regime_value;
    std::string regime_label = "unknown";
    double e_r = 0.0;
    double e_sp = 0.0;
    double e_ex = 0.0;
    std::optional<double> primal;
    DualParams achiever;
    std::string warnings;
};

// 12 significant digits, locale-independent (infinities as "inf"/"-inf").
std::string format_g12(double v);

std::string csv_header();
std::string to_csv_line(const CurveRow& row);

// Deterministic byte output: '\n' newlines, fixed formatting.
void write_csv(std::span<const CurveRow> rows, const std::string& path);

}  // namespace trcexp

#endif
