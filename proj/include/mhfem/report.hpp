#pragma once

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <string>

#include "mhfem/majorant.hpp"

namespace mhfem {

namespace detail {
inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.8e", v);
    return buf;
}
}  // namespace detail

/// CSV emission: one row per level x mode, plus one combined row per level
/// (mode column "overall"). Missing values stay empty.
inline void write_csv(std::ostream& os, const std::string& problem, const MajorantReport& report) {
    os << "problem,level,mode,r1,r2,majorant_semi,majorant_norm,exact_error,eff_index,e_n\n";
    for (const ReportRow& row : report.rows) {
        os << problem << ',' << row.level << ',';
        if (row.mode < 0) {
            os << "overall";
        } else {
            os << row.mode;
        }
        os << ',' << detail::sci(row.r1) << ',' << detail::sci(row.r2) << ','
           << detail::sci(row.majorant_semi) << ',' << detail::sci(row.majorant_norm) << ',';
        if (row.exact_error) os << detail::sci(*row.exact_error);
        os << ',';
        if (row.eff_index) os << detail::sci(*row.eff_index);
        os << ',';
        if (row.e_n) os << detail::sci(*row.e_n);
        os << '\n';
    }
}

/// Human-readable table mirroring the per-mode layout of the experiment
/// section. Iteration counts and timings come from the exact-factorization
/// inner solver and are not comparable to multilevel-preconditioner figures.
inline void write_table(std::ostream& os, const std::string& problem, const MajorantReport& report) {
    os << "# problem: " << problem << "\n";
    os << "# note: iteration counts and CPU times use an exact sparse inner solve;\n";
    os << "#       they are not comparable to the AMLI-preconditioned reference data.\n";
    os << std::left << std::setw(7) << "level" << std::setw(9) << "mode" << std::setw(8) << "iters"
       << std::setw(10) << "seconds" << std::setw(16) << "R1" << std::setw(16) << "R2"
       << std::setw(16) << "maj_semi" << std::setw(16) << "maj_norm" << std::setw(16) << "error"
       << std::setw(10) << "I_eff" << std::setw(16) << "E_N" << "\n";
    for (const ReportRow& row : report.rows) {
        os << std::left << std::setw(7) << row.level;
        if (row.mode < 0) {
            os << std::setw(9) << "overall";
        } else {
            os << std::setw(9) << row.mode;
        }
        os << std::setw(8) << row.iterations;
        {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%.2f", row.solve_seconds);
            os << std::setw(10) << buf;
        }
        os << std::setw(16) << detail::sci(row.r1) << std::setw(16) << detail::sci(row.r2)
           << std::setw(16) << detail::sci(row.majorant_semi) << std::setw(16)
           << detail::sci(row.majorant_norm);
        if (row.exact_error) {
            os << std::setw(16) << detail::sci(*row.exact_error);
        } else {
            os << std::setw(16) << "-";
        }
        if (row.eff_index) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%.3f", *row.eff_index);
            os << std::setw(10) << buf;
        } else {
            os << std::setw(10) << "-";
        }
        if (row.e_n) {
            os << std::setw(16) << detail::sci(*row.e_n);
        } else {
            os << std::setw(16) << "-";
        }
        os << "\n";
    }
}

}  // namespace mhfem
