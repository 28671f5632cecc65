#include "tpart/acflow.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "tpart/error.hpp"

namespace tpart {

namespace {

using cd = std::complex<double>;
using SparseC = Eigen::SparseMatrix<cd, Eigen::RowMajor>;

struct BranchAdmittance {
  cd yff, yft, ytf, ytt;
};

BranchAdmittance branch_admittance(const Line& l) {
  const cd ys = 1.0 / cd(l.r, l.x);
  const cd half_charging(0.0, l.charging / 2.0);
  const cd tap = std::polar(l.tap, l.shift);
  BranchAdmittance y;
  y.ytt = ys + half_charging;
  y.yff = y.ytt / (l.tap * l.tap);
  y.yft = -ys / std::conj(tap);
  y.ytf = -ys / tap;
  return y;
}

SparseC build_ybus(const Network& network, std::vector<BranchAdmittance>& branches) {
  const int n = network.bus_count();
  std::vector<Eigen::Triplet<cd>> t;
  t.reserve(static_cast<std::size_t>(4 * network.line_count() + n));
  branches.clear();
  branches.reserve(static_cast<std::size_t>(network.line_count()));
  for (const Line& l : network.lines()) {
    BranchAdmittance y = branch_admittance(l);
    branches.push_back(y);
    t.emplace_back(l.from, l.from, y.yff);
    t.emplace_back(l.from, l.to, y.yft);
    t.emplace_back(l.to, l.from, y.ytf);
    t.emplace_back(l.to, l.to, y.ytt);
  }
  for (int i = 0; i < n; ++i) t.emplace_back(i, i, cd(network.bus(i).gs, network.bus(i).bs));
  SparseC y(n, n);
  y.setFromTriplets(t.begin(), t.end());
  return y;
}

std::vector<cd> injections(const SparseC& ybus, const std::vector<cd>& v) {
  std::vector<cd> s(v.size());
  for (int i = 0; i < ybus.outerSize(); ++i) {
    cd current = 0.0;
    for (SparseC::InnerIterator it(ybus, i); it; ++it) current += it.value() * v[static_cast<std::size_t>(it.col())];
    s[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)] * std::conj(current);
  }
  return s;
}

struct BusRoles {
  std::vector<BusType> type;
  std::vector<double> p_spec;
  std::vector<double> q_spec;
};

double mismatch(const std::vector<cd>& s, const BusRoles& roles, Eigen::VectorXd& f,
                const std::vector<int>& ap, const std::vector<int>& aq, int npvpq) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (ap[i] >= 0) {
      const double dp = s[i].real() - roles.p_spec[i];
      f(ap[i]) = dp;
      worst = std::max(worst, std::abs(dp));
    }
    if (aq[i] >= 0) {
      const double dq = s[i].imag() - roles.q_spec[i];
      f(npvpq + aq[i]) = dq;
      worst = std::max(worst, std::abs(dq));
    }
  }
  return worst;
}

struct NewtonResult {
  std::vector<cd> v;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

NewtonResult newton(const SparseC& ybus, const BusRoles& roles, std::vector<cd> v, const AcOptions& opt) {
  const int n = static_cast<int>(v.size());
  std::vector<int> ap(static_cast<std::size_t>(n), -1);
  std::vector<int> aq(static_cast<std::size_t>(n), -1);
  int npvpq = 0;
  int npq = 0;
  for (int i = 0; i < n; ++i) {
    if (roles.type[static_cast<std::size_t>(i)] != BusType::kSlack) ap[static_cast<std::size_t>(i)] = npvpq++;
  }
  for (int i = 0; i < n; ++i) {
    if (roles.type[static_cast<std::size_t>(i)] == BusType::kPQ) aq[static_cast<std::size_t>(i)] = npq++;
  }
  const int dim = npvpq + npq;

  std::vector<double> vm(static_cast<std::size_t>(n));
  std::vector<double> va(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    vm[static_cast<std::size_t>(i)] = std::abs(v[static_cast<std::size_t>(i)]);
    va[static_cast<std::size_t>(i)] = std::arg(v[static_cast<std::size_t>(i)]);
  }

  NewtonResult result;
  Eigen::VectorXd f(dim);
  auto s = injections(ybus, v);
  result.residual = mismatch(s, roles, f, ap, aq, npvpq);
  if (dim == 0 || result.residual <= opt.tolerance) {
    result.converged = std::isfinite(result.residual);
    result.v = std::move(v);
    return result;
  }

  std::vector<Eigen::Triplet<double>> t;
  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    // Bus currents and the partial derivatives of S with respect to angle and magnitude.
    std::vector<cd> current(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      for (SparseC::InnerIterator it(ybus, i); it; ++it) {
        current[static_cast<std::size_t>(i)] += it.value() * v[static_cast<std::size_t>(it.col())];
      }
    }
    t.clear();
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (ap[ui] < 0) continue;
      const cd vi = v[ui];
      for (SparseC::InnerIterator it(ybus, i); it; ++it) {
        const int k = static_cast<int>(it.col());
        const auto uk = static_cast<std::size_t>(k);
        const cd vn_k = v[uk] / vm[uk];
        cd ds_dva = cd(0.0, 1.0) * vi * std::conj(-it.value() * v[uk]);
        cd ds_dvm = vi * std::conj(it.value() * vn_k);
        if (k == i) {
          ds_dva += cd(0.0, 1.0) * vi * std::conj(current[ui]);
          ds_dvm += std::conj(current[ui]) * vn_k;
        }
        if (ap[uk] >= 0) {
          t.emplace_back(ap[ui], ap[uk], ds_dva.real());
          if (aq[ui] >= 0) t.emplace_back(npvpq + aq[ui], ap[uk], ds_dva.imag());
        }
        if (aq[uk] >= 0) {
          t.emplace_back(ap[ui], npvpq + aq[uk], ds_dvm.real());
          if (aq[ui] >= 0) t.emplace_back(npvpq + aq[ui], npvpq + aq[uk], ds_dvm.imag());
        }
      }
    }
    Eigen::SparseMatrix<double> jac(dim, dim);
    jac.setFromTriplets(t.begin(), t.end());
    jac.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(jac);
    if (lu.info() != Eigen::Success) {
      result.iterations = iter;
      break;
    }
    Eigen::VectorXd dx = lu.solve(-f);
    if (lu.info() != Eigen::Success || !dx.allFinite()) {
      result.iterations = iter;
      break;
    }
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (ap[ui] >= 0) va[ui] += dx(ap[ui]);
      if (aq[ui] >= 0) vm[ui] += dx(npvpq + aq[ui]);
      v[ui] = std::polar(vm[ui], va[ui]);
    }
    s = injections(ybus, v);
    result.residual = mismatch(s, roles, f, ap, aq, npvpq);
    result.iterations = iter;
    if (!std::isfinite(result.residual)) break;
    if (result.residual <= opt.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.v = std::move(v);
  return result;
}

}  // namespace

std::vector<cd> bus_injections(const Network& network, const std::vector<cd>& voltages) {
  std::vector<BranchAdmittance> branches;
  return injections(build_ybus(network, branches), voltages);
}

AcSolution solve_ac(const Network& network, const AcSolution* warm_start, const AcOptions& options) {
  const int n = network.bus_count();
  std::vector<BranchAdmittance> branches;
  const SparseC ybus = build_ybus(network, branches);

  BusRoles roles;
  roles.type.resize(static_cast<std::size_t>(n));
  roles.p_spec.resize(static_cast<std::size_t>(n));
  roles.q_spec.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Bus& b = network.bus(i);
    const auto ui = static_cast<std::size_t>(i);
    roles.type[ui] = i == network.reference_bus() ? BusType::kSlack
                     : b.type == BusType::kSlack  ? BusType::kPV
                                                  : b.type;
    roles.p_spec[ui] = b.p;
    roles.q_spec[ui] = b.q;
  }

  std::vector<cd> v(static_cast<std::size_t>(n));
  const bool warm = warm_start != nullptr && warm_start->voltages.size() == static_cast<std::size_t>(n);
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const Bus& b = network.bus(i);
    double mag = roles.type[ui] == BusType::kPQ ? 1.0 : b.vm;
    double ang = 0.0;
    if (warm) {
      if (roles.type[ui] == BusType::kPQ) mag = std::abs(warm_start->voltages[ui]);
      if (roles.type[ui] != BusType::kSlack) ang = std::arg(warm_start->voltages[ui]);
    }
    v[ui] = std::polar(mag, ang);
  }

  AcSolution sol;
  int total_iterations = 0;
  for (int round = 0;; ++round) {
    NewtonResult nr = newton(ybus, roles, v, options);
    total_iterations += nr.iterations;
    if (!nr.converged) {
      throw NotConvergedError("AC power flow did not converge (residual " + std::to_string(nr.residual) + ")",
                              nr.residual, total_iterations);
    }
    v = std::move(nr.v);
    sol.residual = nr.residual;
    if (!options.enforce_q_limits || round >= options.max_q_limit_rounds) break;

    // PV buses whose reactive output leaves its limits become PQ at the limit.
    auto s = injections(ybus, v);
    bool switched = false;
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (roles.type[ui] != BusType::kPV) continue;
      const Bus& b = network.bus(i);
      const double q = s[ui].imag();
      if (b.qmax && q > *b.qmax + options.q_limit_tolerance) {
        roles.q_spec[ui] = *b.qmax;
      } else if (b.qmin && q < *b.qmin - options.q_limit_tolerance) {
        roles.q_spec[ui] = *b.qmin;
      } else {
        continue;
      }
      roles.type[ui] = BusType::kPQ;
      sol.pv_to_pq.push_back(i);
      switched = true;
    }
    if (!switched) break;
  }
  std::sort(sol.pv_to_pq.begin(), sol.pv_to_pq.end());

  sol.iterations = total_iterations;
  sol.voltages = v;
  sol.s_from.reserve(branches.size());
  sol.s_to.reserve(branches.size());
  for (std::size_t k = 0; k < branches.size(); ++k) {
    const Line& l = network.line(static_cast<int>(k));
    const cd vf = v[static_cast<std::size_t>(l.from)];
    const cd vt = v[static_cast<std::size_t>(l.to)];
    const BranchAdmittance& y = branches[k];
    sol.s_from.push_back(vf * std::conj(y.yff * vf + y.yft * vt));
    sol.s_to.push_back(vt * std::conj(y.ytf * vf + y.ytt * vt));
  }
  return sol;
}

AcSolution solve_ac_with_fallback(const Network& network, const AcSolution* warm_start, const AcOptions& options) {
  if (warm_start != nullptr) {
    try {
      return solve_ac(network, warm_start, options);
    } catch (const NotConvergedError&) {
    }
  }
  return solve_ac(network, nullptr, options);
}

CongestionReport congestion_ac(const AcSolution& solution, const Network& network) {
  std::vector<double> magnitude(solution.s_from.size());
  for (std::size_t k = 0; k < magnitude.size(); ++k) {
    magnitude[k] = std::max(std::abs(solution.s_from[k]), std::abs(solution.s_to[k]));
  }
  return detail::congestion_from_magnitudes(network, magnitude);
}

double total_active_losses(const AcSolution& solution, const Network& network) {
  double losses = 0.0;
  for (std::size_t k = 0; k < solution.s_from.size(); ++k) {
    losses += solution.s_from[k].real() + solution.s_to[k].real();
  }
  for (int i = 0; i < network.bus_count(); ++i) {
    losses += network.bus(i).gs * std::norm(solution.voltages[static_cast<std::size_t>(i)]);
  }
  return losses;
}

}  // namespace tpart
