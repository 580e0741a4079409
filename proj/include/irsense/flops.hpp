// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace irsense {

/// Analytic flop counts for the two estimation pipelines, parameterized by
/// the tensor dimensions and the grid sizes. Conventions: an inner product
/// of length n costs (2n - 1) flops, a vector-matrix product with an
/// n1 x n2 matrix costs (2 n1 n2 - n2), and a rank-one SVD of an n1 x n2
/// matrix costs n1 n2.
///
/// Per candidate, the coupled baseline evaluates L block matched filters at
/// (2 N_c Q + N_c - 1) flops each across the R_tau * R_nu joint grid plus
/// R_theta angle candidates. The decoupled pipeline pays 3 N_c Q L for the
/// three rank-one SVDs, then R_tau (2 N_c - 1), R_nu (2 Q L - 1) for the
/// one-dimensional searches and R_theta (2 N_c Q + N_c - 1) for the angle
/// search.
struct FlopTerm {
  std::string name;
  std::uint64_t flops = 0;
};

struct FlopReport {
  int n_c = 0, q = 0, l = 0;
  int r_tau = 0, r_nu = 0, r_theta = 0;
  std::uint64_t baseline_total = 0;
  std::uint64_t proposed_total = 0;
  std::vector<FlopTerm> baseline_terms;
  std::vector<FlopTerm> proposed_terms;

  double ratio() const {
    return static_cast<double>(baseline_total) / static_cast<double>(proposed_total);
  }
};

inline FlopReport complexity_model(int n_c, int q, int l, int r_tau, int r_nu,
                                   int r_theta) {
  if (n_c < 1 || q < 1 || l < 1 || r_tau < 1 || r_nu < 1 || r_theta < 1)
    throw std::invalid_argument("complexity_model: all inputs must be >= 1");
  const auto nc = static_cast<std::uint64_t>(n_c);
  const auto qq = static_cast<std::uint64_t>(q);
  const auto ll = static_cast<std::uint64_t>(l);
  const auto rt = static_cast<std::uint64_t>(r_tau);
  const auto rn = static_cast<std::uint64_t>(r_nu);
  const auto rth = static_cast<std::uint64_t>(r_theta);

  const std::uint64_t block_mf = 2 * nc * qq + nc - 1;

  FlopReport report;
  report.n_c = n_c;
  report.q = q;
  report.l = l;
  report.r_tau = r_tau;
  report.r_nu = r_nu;
  report.r_theta = r_theta;

  report.baseline_terms = {
      {"delay_doppler_search", rt * rn * ll * block_mf},
      {"angle_search", rth * block_mf},
  };
  report.proposed_terms = {
      {"hosvd", 3 * nc * qq * ll},
      {"delay_search", rt * (2 * nc - 1)},
      {"doppler_search", rn * (2 * qq * ll - 1)},
      {"angle_search", rth * block_mf},
  };
  for (const auto& t : report.baseline_terms) report.baseline_total += t.flops;
  for (const auto& t : report.proposed_terms) report.proposed_total += t.flops;
  return report;
}

enum class SweepVariable { subcarriers, grid_points };

/// One complexity comparison per swept value. For grid sweeps the point r
/// expands to r_tau = r_nu = r and r_theta = r^2, preserving the ratio
/// structure of the default 100/100/10000 grids.
inline std::vector<FlopReport> complexity_sweep(SweepVariable variable,
                                                const std::vector<int>& values,
                                                int n_c, int q, int l, int r_tau,
                                                int r_nu, int r_theta) {
  if (values.empty())
    throw std::invalid_argument("complexity_sweep: range must be nonempty");
  std::vector<FlopReport> out;
  out.reserve(values.size());
  for (int v : values) {
    switch (variable) {
      case SweepVariable::subcarriers:
        out.push_back(complexity_model(v, q, l, r_tau, r_nu, r_theta));
        break;
      case SweepVariable::grid_points:
        out.push_back(complexity_model(n_c, q, l, v, v, v * v));
        break;
    }
  }
  return out;
}

inline void write_flops_csv(SweepVariable variable,
                            const std::vector<FlopReport>& reports,
                            std::ostream& os) {
  if (!reports.empty()) {
    // Echo the fixed parameters so the file identifies its own run.
    const FlopReport& first = reports.front();
    if (variable == SweepVariable::subcarriers)
      os << "# q=" << first.q << " l=" << first.l << " r_tau=" << first.r_tau
         << " r_nu=" << first.r_nu << " r_theta=" << first.r_theta << "\n";
    else
      os << "# n_c=" << first.n_c << " q=" << first.q << " l=" << first.l << "\n";
  }
  os << (variable == SweepVariable::subcarriers ? "n_c" : "grid_points")
     << ",baseline_flops,proposed_flops,ratio\n";
  char buf[64];
  for (const auto& r : reports) {
    const int v = variable == SweepVariable::subcarriers ? r.n_c : r.r_tau;
    std::snprintf(buf, sizeof(buf), "%.6f", r.ratio());
    os << v << ',' << r.baseline_total << ',' << r.proposed_total << ',' << buf
       << '\n';
  }
}

}  // namespace irsense
