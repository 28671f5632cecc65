#include "tpart/dcflow.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "tpart/error.hpp"

namespace tpart {

namespace {

std::vector<double> congestion_levels(const Network& network, const std::vector<double>& magnitudes,
                                      double& gamma, LineId& argmax) {
  std::vector<double> levels(magnitudes.size(), 0.0);
  bool any = false;
  gamma = 0.0;
  for (int i = 0; i < network.line_count(); ++i) {
    const Line& l = network.line(i);
    if (l.unlimited) continue;
    const double g = magnitudes[static_cast<std::size_t>(i)] / l.capacity;
    levels[static_cast<std::size_t>(i)] = g;
    if (!any || g > gamma) {
      gamma = g;
      argmax = l.id;
      any = true;
    }
  }
  if (!any) throw Error(ErrorCode::kUndefinedCongestion, "every line is unlimited; maximum congestion is undefined");
  return levels;
}

}  // namespace

double conservation_residual(const Network& network, const std::vector<double>& flows) {
  std::vector<double> net(static_cast<std::size_t>(network.bus_count()), 0.0);
  for (int i = 0; i < network.line_count(); ++i) {
    const Line& l = network.line(i);
    net[static_cast<std::size_t>(l.from)] += flows[static_cast<std::size_t>(i)];
    net[static_cast<std::size_t>(l.to)] -= flows[static_cast<std::size_t>(i)];
  }
  double worst = 0.0;
  for (int b = 0; b < network.bus_count(); ++b) {
    worst = std::max(worst, std::abs(net[static_cast<std::size_t>(b)] - network.bus(b).p));
  }
  return worst;
}

DcSolution solve_dc(const Network& network) {
  const int n = network.bus_count();
  const int ref = network.reference_bus();
  const auto p = network.injections();
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (std::abs(total) > kBalanceTolerance) {
    throw Error(ErrorCode::kUnbalanced, "injections are not balanced (sum = " + std::to_string(total) + ")");
  }

  // Reduced index: buses other than the reference, in order.
  std::vector<int> reduced(static_cast<std::size_t>(n), -1);
  for (int i = 0, r = 0; i < n; ++i) {
    if (i != ref) reduced[static_cast<std::size_t>(i)] = r++;
  }

  DcSolution sol;
  sol.angles.assign(static_cast<std::size_t>(n), 0.0);
  if (n > 1) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(4 * network.line_count()));
    for (const Line& l : network.lines()) {
      const int a = reduced[static_cast<std::size_t>(l.from)];
      const int b = reduced[static_cast<std::size_t>(l.to)];
      if (a >= 0) triplets.emplace_back(a, a, l.b);
      if (b >= 0) triplets.emplace_back(b, b, l.b);
      if (a >= 0 && b >= 0) {
        triplets.emplace_back(a, b, -l.b);
        triplets.emplace_back(b, a, -l.b);
      }
    }
    Eigen::SparseMatrix<double> lap(n - 1, n - 1);
    lap.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::VectorXd rhs(n - 1);
    for (int i = 0; i < n; ++i) {
      if (i != ref) rhs(reduced[static_cast<std::size_t>(i)]) = p[static_cast<std::size_t>(i)];
    }
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(lap);
    if (ldlt.info() != Eigen::Success) {
      throw Error(ErrorCode::kSingular, "reduced Laplacian is singular");
    }
    Eigen::VectorXd theta = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !theta.allFinite()) {
      throw Error(ErrorCode::kSingular, "reduced Laplacian solve failed");
    }
    for (int i = 0; i < n; ++i) {
      if (i != ref) sol.angles[static_cast<std::size_t>(i)] = theta(reduced[static_cast<std::size_t>(i)]);
    }
  }

  sol.flows.reserve(static_cast<std::size_t>(network.line_count()));
  for (const Line& l : network.lines()) {
    sol.flows.push_back(l.b * (sol.angles[static_cast<std::size_t>(l.from)] - sol.angles[static_cast<std::size_t>(l.to)]));
  }
  sol.residual = conservation_residual(network, sol.flows);
  return sol;
}

CongestionReport congestion_dc(const DcSolution& solution, const Network& network) {
  CongestionReport report;
  std::vector<double> magnitude(solution.flows.size());
  std::transform(solution.flows.begin(), solution.flows.end(), magnitude.begin(),
                 [](double f) { return std::abs(f); });
  report.levels = congestion_levels(network, magnitude, report.gamma, report.argmax);
  return report;
}

double gamma_of_switch(const Network& network, const SwitchSet& switched) {
  Network post = apply_switch(network, switched);
  return congestion_dc(solve_dc(post), post).gamma;
}

namespace detail {

CongestionReport congestion_from_magnitudes(const Network& network, const std::vector<double>& magnitudes) {
  CongestionReport report;
  report.levels = congestion_levels(network, magnitudes, report.gamma, report.argmax);
  return report;
}

}  // namespace detail

}  // namespace tpart
