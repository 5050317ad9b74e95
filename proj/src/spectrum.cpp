#include "autores/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "autores/error.hpp"

namespace autores {

Eigensystem eigenspectrum(const OperatorMatrix& h) {
  if (!is_hermitian(h, 1e-12)) throw NumericalError("eigenspectrum: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenspectrum: eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

const Branch* BranchTable::find(BasisLabel label) const {
  for (const auto& b : branches)
    if (b.label == label) return &b;
  return nullptr;
}

namespace {

struct Assignment {
  std::vector<int> column;  // branch -> eigenvector column
  double worst = 1.0;       // smallest chosen overlap
  std::vector<bool> ambiguous;
};

// Greedy maximum-overlap matching. overlaps(i, k) pairs branch i with column k.
Assignment match(const Eigen::MatrixXd& overlaps, double ambiguity_tol) {
  const auto n = overlaps.rows();
  std::vector<std::tuple<double, int, int>> cand;
  cand.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (overlaps(i, k) > 1e-14) cand.emplace_back(overlaps(i, k), i, k);
  std::sort(cand.begin(), cand.end(), [](const auto& x, const auto& y) {
    if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
    return std::tie(std::get<1>(x), std::get<2>(x)) < std::tie(std::get<1>(y), std::get<2>(y));
  });
  Assignment a;
  a.column.assign(n, -1);
  a.ambiguous.assign(n, false);
  std::vector<bool> used(n, false);
  for (const auto& [ov, i, k] : cand) {
    if (a.column[i] >= 0 || used[k]) continue;
    a.column[i] = k;
    used[k] = true;
  }
  // Leftovers (zero overlap everywhere) pair up in order.
  int next_free = 0;
  for (int i = 0; i < n; ++i) {
    if (a.column[i] >= 0) continue;
    while (used[next_free]) ++next_free;
    a.column[i] = next_free;
    used[next_free] = true;
  }
  for (int i = 0; i < n; ++i) {
    const double chosen = overlaps(i, a.column[i]);
    a.worst = std::min(a.worst, chosen);
    double runner_up = 0;
    for (int k = 0; k < n; ++k)
      if (k != a.column[i]) runner_up = std::max(runner_up, overlaps(i, k));
    a.ambiguous[i] = chosen - runner_up < ambiguity_tol;
  }
  return a;
}

class Tracker {
 public:
  Tracker(const SystemParams& p, const TrackingOptions& opts) : p_(p), opts_(opts) {}

  Eigensystem at(double detuning) const {
    SystemParams q = p_;
    q.detuning = detuning;
    return eigenspectrum(build_hamiltonian(q, opts_.coupling));
  }

  // Seeds branch i = bare basis state i.
  void seed(double detuning) {
    auto es = at(detuning);
    Eigen::MatrixXd ov = es.vectors.cwiseAbs2();  // ov(i, k) = |<i|v_k>|^2
    auto a = match(ov, opts_.ambiguity_tol);
    store(es, a);
    ambiguous_ = std::any_of(a.ambiguous.begin(), a.ambiguous.end(), [](bool b) { return b; });
  }

  // Continues from the current point to `to`, bisecting while overlaps drop.
  void advance(double from, double to, int depth = 0) {
    auto es = at(to);
    Eigen::MatrixXd ov = (vectors_.adjoint() * es.vectors).cwiseAbs2();
    auto a = match(ov, opts_.ambiguity_tol);
    if (a.worst < opts_.min_overlap && depth < opts_.max_refine_depth) {
      const double mid = 0.5 * (from + to);
      ++refinements_;
      advance(from, mid, depth + 1);
      advance(mid, to, depth + 1);
      return;
    }
    store(es, a);
    ambiguous_ = std::any_of(a.ambiguous.begin(), a.ambiguous.end(), [](bool b) { return b; });
  }

  const Eigen::VectorXd& energies() const { return energies_; }
  const Eigen::MatrixXcd& vectors() const { return vectors_; }
  bool ambiguous() const { return ambiguous_; }
  std::size_t refinements() const { return refinements_; }

 private:
  void store(const Eigensystem& es, const Assignment& a) {
    const auto n = es.values.size();
    energies_.resize(n);
    vectors_.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      energies_(i) = es.values(a.column[i]);
      vectors_.col(i) = es.vectors.col(a.column[i]);
    }
  }

  SystemParams p_;
  TrackingOptions opts_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXcd vectors_;
  bool ambiguous_ = false;
  std::size_t refinements_ = 0;
};

}  // namespace

BranchTable track_branches(const SystemParams& p, std::span<const double> grid,
                           const TrackingOptions& opts) {
  p.validate();
  if (grid.empty()) throw ConfigError("track_branches: empty detuning grid");
  if (!std::is_sorted(grid.begin(), grid.end()) ||
      std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
    throw ConfigError("track_branches: detuning grid must be strictly increasing");
  }
  if (opts.max_excitation < 0 || opts.max_excitation > p.n_photons - 1) {
    throw ConfigError("track_branches: max_excitation " + std::to_string(opts.max_excitation) +
                      " needs n_photons >= " + std::to_string(opts.max_excitation + 1));
  }
  const std::size_t m = grid.size();
  const bool from_top = std::abs(grid.back()) >= std::abs(grid.front());
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  if (from_top) std::reverse(order.begin(), order.end());

  const int dim = p.dim();
  std::vector<std::vector<double>> energy(dim, std::vector<double>(m));
  std::vector<std::vector<double>> fidelity(dim, std::vector<double>(m));
  BranchTable table;
  table.detunings.assign(grid.begin(), grid.end());

  Tracker tracker(p, opts);
  for (std::size_t step = 0; step < m; ++step) {
    const std::size_t idx = order[step];
    if (step == 0) {
      tracker.seed(grid[idx]);
    } else {
      tracker.advance(grid[order[step - 1]], grid[idx]);
    }
    if (tracker.ambiguous()) table.flagged.push_back(idx);
    for (int i = 0; i < dim; ++i) {
      energy[i][idx] = tracker.energies()(i);
      fidelity[i][idx] = std::norm(tracker.vectors()(i, i));
    }
  }
  std::sort(table.flagged.begin(), table.flagged.end());
  table.refinements = tracker.refinements();

  for (int i = 0; i < dim; ++i) {
    const auto label = basis_label(p, i);
    if (label.excitations() > opts.max_excitation) continue;
    table.branches.push_back({label, std::move(energy[i]), std::move(fidelity[i])});
  }
  std::sort(table.branches.begin(), table.branches.end(), [](const Branch& x, const Branch& y) {
    return std::make_tuple(x.label.excitations(), x.label.q) <
           std::make_tuple(y.label.excitations(), y.label.q);
  });
  return table;
}

std::string AvoidedCrossing::pair_name() const {
  std::ostringstream os;
  os << '|' << a.q << ',' << a.n << ">-|" << b.q << ',' << b.n << '>';
  return os.str();
}

std::vector<AvoidedCrossing> find_avoided_crossings(const BranchTable& table, int manifold) {
  std::vector<AvoidedCrossing> out;
  const auto& x = table.detunings;
  if (x.size() < 3) return out;
  for (int q = 0; q < manifold; ++q) {
    const BasisLabel la{q, manifold - q};
    const BasisLabel lb{q + 1, manifold - q - 1};
    const Branch* ba = table.find(la);
    const Branch* bb = table.find(lb);
    if (!ba || !bb) continue;
    const std::size_t m = x.size();
    std::vector<double> diff(m), gap(m);
    for (std::size_t i = 0; i < m; ++i) {
      diff[i] = bb->energies[i] - ba->energies[i];
      gap[i] = std::abs(diff[i]);
    }
    for (std::size_t i = 1; i + 1 < m; ++i) {
      if (!(gap[i] < gap[i - 1] && gap[i] <= gap[i + 1])) continue;
      // A sign change means the labelled levels cross rather than repel.
      if (std::signbit(diff[i - 1]) != std::signbit(diff[i]) ||
          std::signbit(diff[i + 1]) != std::signbit(diff[i]) || gap[i] == 0.0) {
        continue;
      }
      const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
      const double y0 = gap[i - 1], y1 = gap[i], y2 = gap[i + 1];
      const double d01 = (y1 - y0) / (x1 - x0);
      const double d12 = (y2 - y1) / (x2 - x1);
      const double curv = (d12 - d01) / (x2 - x0);
      double xm = x1, ym = y1;
      if (curv > 0) {
        // y = y1 + d(x - x1) + curv (x - x1)^2 with d the centred slope at x1
        const double slope = d01 + curv * (x1 - x0);
        xm = std::clamp(x1 - slope / (2 * curv), x0, x2);
        ym = y1 + slope * (xm - x1) + curv * (xm - x1) * (xm - x1);
        if (!(ym > 0) || ym > y1) {
          xm = x1;
          ym = y1;
        }
      }
      out.push_back({xm, ym, la, lb, manifold});
    }
  }
  return out;
}

EffectiveParams fit_ladder(std::span<const double> energies) {
  const auto m = static_cast<Eigen::Index>(energies.size());
  if (m < 3) throw NumericalError("fit_ladder needs at least three levels");
  Eigen::MatrixXd design(m, 3);
  Eigen::VectorXd y(m);
  for (Eigen::Index n = 0; n < m; ++n) {
    design(n, 0) = 1.0;
    design(n, 1) = static_cast<double>(n);
    design(n, 2) = -static_cast<double>(n * n);
    y(n) = energies[n];
  }
  Eigen::Vector3d c = design.colPivHouseholderQr().solve(y);
  const double rms = std::sqrt((design * c - y).squaredNorm() / static_cast<double>(m));
  return {c(0), c(1), c(2), rms};
}

std::vector<double> dressed_energies(const SystemParams& p, std::span<const BasisLabel> labels,
                                     Coupling coupling, double ambiguity_tol) {
  const auto es = eigenspectrum(build_hamiltonian(p, coupling));
  std::vector<double> out;
  std::vector<Eigen::Index> taken;
  for (const auto& l : labels) {
    if (l.q < 0 || l.q >= p.n_levels || l.n < 0 || l.n >= p.n_photons) {
      throw ConfigError("label |" + std::to_string(l.q) + "," + std::to_string(l.n) +
                        "> outside the truncated space");
    }
    const auto row = basis_index(p, l);
    Eigen::VectorXd w = es.vectors.row(row).cwiseAbs2().transpose();
    Eigen::Index best = 0;
    w.maxCoeff(&best);
    double runner_up = 0;
    for (Eigen::Index k = 0; k < w.size(); ++k)
      if (k != best) runner_up = std::max(runner_up, w(k));
    if (w(best) - runner_up < ambiguity_tol) {
      throw NumericalError("branch labeling ambiguous for |" + std::to_string(l.q) + "," +
                           std::to_string(l.n) + "> at detuning " + std::to_string(p.detuning));
    }
    if (std::find(taken.begin(), taken.end(), best) != taken.end()) {
      throw NumericalError("branch labeling failed: two labels share one eigenstate at detuning " +
                           std::to_string(p.detuning));
    }
    taken.push_back(best);
    out.push_back(es.values(best));
  }
  return out;
}

EffectiveParams effective_params(const SystemParams& p, int n_fit, Coupling coupling) {
  if (n_fit < 3) throw ConfigError("effective_params: n_fit must be >= 3");
  if (n_fit > p.n_photons - 1) {
    throw ConfigError("effective_params: n_fit " + std::to_string(n_fit) + " needs n_photons >= " +
                      std::to_string(n_fit + 1));
  }
  std::vector<BasisLabel> labels;
  for (int n = 0; n <= n_fit; ++n) labels.push_back({0, n});
  const auto e = dressed_energies(p, labels, coupling);
  return fit_ladder(e);
}

double dispersive_shift(const SystemParams& p, int qubit_state) {
  if (qubit_state != 0 && qubit_state != 1) throw ConfigError("qubit_state must be 0 or 1");
  const BasisLabel labels[] = {{qubit_state, 0}, {qubit_state, 1}};
  const auto e = dressed_energies(p, labels);
  return e[1] - e[0] - p.cavity_freq;
}

}  // namespace autores
