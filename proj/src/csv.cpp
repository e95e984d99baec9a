#include "trcexp/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace trcexp {

std::string format_g12(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
    if (ec != std::errc()) throw std::runtime_error("format_g12: conversion failed");
    return std::string(buf, ptr);
}

std::string csv_header() {
    return "rate,dual,regime,regime_label,Er,Esp,Eex,primal,sigma,tau,lambda,theta,zeta,warnings";
}

namespace {

std::string sanitized(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

}  // namespace

std::string to_csv_line(const CurveRow& row) {
    std::string line;
    line += format_g12(row.rate);
    line += ',';
    line += format_g12(row.dual);
    line += ',';
    if (row.regime_value) line += format_g12(*row.regime_value);
    line += ',';
    line += sanitized(row.regime_label);
    line += ',';
    line += format_g12(row.e_r);
    line += ',';
    line += format_g12(row.e_sp);
    line += ',';
    line += format_g12(row.e_ex);
    line += ',';
    if (row.primal) line += format_g12(*row.primal);
    line += ',';
    line += format_g12(row.achiever.sigma);
    line += ',';
    line += format_g12(row.achiever.tau);
    line += ',';
    line += format_g12(row.achiever.lambda);
    line += ',';
    line += format_g12(row.achiever.theta);
    line += ',';
    line += format_g12(row.achiever.zeta);
    line += ',';
    line += sanitized(row.warnings);
    return line;
}

void write_csv(std::span<const CurveRow> rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << csv_header() << '\n';
    for (const auto& row : rows) out << to_csv_line(row) << '\n';
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace trcexp
