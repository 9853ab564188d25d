#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eigencert/core/error.hpp"
#include "eigencert/spectral/types.hpp"

namespace eigencert::cert {

// One experiment's rows plus a '#'-prefixed metadata block. Column order
// follows the experiment tables: N/h/ndof, then the lambda, H1, L2 triples.
struct ResultTable {
    std::vector<spectral::ErrorReport> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    void add_meta(std::string key, std::string value) {
        metadata.emplace_back(std::move(key), std::move(value));
    }
};

namespace detail {

inline std::string format_number(double v, bool precise) {
    if (std::isnan(v)) return "n/a";
    char buf[40];
    std::snprintf(buf, sizeof(buf), precise ? "%.17g" : "%.6g", v);
    return buf;
}

inline double parse_number(const std::string& s) {
    if (s == "n/a") return std::nan("");
    return std::stod(s);
}

} // namespace detail

inline void write_csv(const ResultTable& table, std::ostream& out, bool precise = false) {
    out << "# eigencert result table v1\n";
    for (const auto& [k, v] : table.metadata) out << "# " << k << " = " << v << '\n';
    out << "N,h,ndof,err_lambda,eta_sq,ieff_lambda,err_h1,eta,ieff_h1,err_l2,eta_l2,"
           "ieff_l2\n";
    for (const auto& r : table.rows) {
        const double hide = std::nan("");
        const bool ok = r.assumptions_ok;
        out << detail::format_number(r.n_param, precise) << ','
            << detail::format_number(r.h_or_n, precise) << ',' << r.ndof << ','
            << detail::format_number(r.err_lambda, precise) << ','
            << detail::format_number(ok ? r.eta_sq : hide, precise) << ','
            << detail::format_number(ok ? r.ieff_lambda : hide, precise) << ','
            << detail::format_number(r.err_h1, precise) << ','
            << detail::format_number(ok ? r.eta : hide, precise) << ','
            << detail::format_number(ok ? r.ieff_h1 : hide, precise) << ','
            << detail::format_number(r.err_l2, precise) << ','
            << detail::format_number(ok ? r.eta_l2 : hide, precise) << ','
            << detail::format_number(ok ? r.ieff_l2 : hide, precise) << '\n';
    }
}

inline std::string to_csv(const ResultTable& table, bool precise = false) {
    std::ostringstream os;
    write_csv(table, os, precise);
    return os.str();
}

inline ResultTable read_csv(std::istream& in) {
    ResultTable table;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find(" = ");
            if (eq != std::string::npos && line.size() > 2) {
                table.add_meta(line.substr(2, eq - 2), line.substr(eq + 3));
            }
            continue;
        }
        if (!header_seen) {
            if (line.rfind("N,h,ndof", 0) != 0) throw IoError("unexpected CSV header: " + line);
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 12) throw IoError("CSV row with wrong column count");
        spectral::ErrorReport r;
        r.n_param = detail::parse_number(fields[0]);
        r.h_or_n = detail::parse_number(fields[1]);
        r.ndof = static_cast<std::size_t>(std::stoull(fields[2]));
        r.err_lambda = detail::parse_number(fields[3]);
        r.eta_sq = detail::parse_number(fields[4]);
        r.ieff_lambda = detail::parse_number(fields[5]);
        r.err_h1 = detail::parse_number(fields[6]);
        r.eta = detail::parse_number(fields[7]);
        r.ieff_h1 = detail::parse_number(fields[8]);
        r.err_l2 = detail::parse_number(fields[9]);
        r.eta_l2 = detail::parse_number(fields[10]);
        r.ieff_l2 = detail::parse_number(fields[11]);
        r.assumptions_ok = !std::isnan(r.eta_sq);
        table.rows.push_back(r);
    }
    return table;
}

// Fixed-width text rendering for the terminal.
inline void write_text_table(const ResultTable& table, std::ostream& out) {
    const char* names[12] = {"N",      "h",   "ndof",    "Err_l", "eta^2", "Ieff_l",
                             "Err_H1", "eta", "Ieff_H1", "Err_L2", "eta_L2", "Ieff_L2"};
    out << std::left;
    for (const char* n : names) out << std::setw(12) << n;
    out << '\n';
    for (const auto& r : table.rows) {
        const double hide = std::nan("");
        const bool ok = r.assumptions_ok;
        const double cols[12] = {r.n_param,
                                 r.h_or_n,
                                 static_cast<double>(r.ndof),
                                 r.err_lambda,
                                 ok ? r.eta_sq : hide,
                                 ok ? r.ieff_lambda : hide,
                                 r.err_h1,
                                 ok ? r.eta : hide,
                                 ok ? r.ieff_h1 : hide,
                                 r.err_l2,
                                 ok ? r.eta_l2 : hide,
                                 ok ? r.ieff_l2 : hide};
        for (int c = 0; c < 12; ++c) {
            if (c == 2)
                out << std::setw(12) << r.ndof;
            else
                out << std::setw(12) << detail::format_number(cols[c], false);
        }
        out << '\n';
    }
}

// Effectivity indices from measured errors; n/a (nan) below the noise floor.
inline void fill_effectivity(spectral::ErrorReport& r, double noise_floor = 1e-14) {
    auto ratio = [noise_floor](double est, double err) {
        return (err > noise_floor) ? est / err : std::nan("");
    };
    r.ieff_lambda = ratio(r.eta_sq, r.err_lambda);
    r.ieff_h1 = ratio(r.eta, r.err_h1);
    r.ieff_l2 = ratio(r.eta_l2, r.err_l2);
}

} // namespace eigencert::cert
