#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

#include "autores/analysis.hpp"
#include "autores/csv.hpp"
#include "autores/dynamics_quantum.hpp"
#include "autores/ensemble.hpp"
#include "autores/error.hpp"
#include "autores/parallel.hpp"
#include "autores/rng.hpp"
#include "autores/semiclassical.hpp"
#include "autores/spectrum.hpp"

namespace arsim {

using namespace autores;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double x) { return format_number(x); }
std::string num(int x) { return format_number(x); }

// Commas would break the CSV layout.
std::string clean(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

CsvTable table(const Context& ctx, std::vector<std::string> columns) {
  CsvTable t;
  t.meta.emplace_back("command", ctx.command);
  t.meta.emplace_back("config_hash", ctx.config.content_hash());
  for (auto& e : ctx.config.entries()) t.meta.push_back(std::move(e));
  t.columns = std::move(columns);
  return t;
}

void save(const Context& ctx, const CsvTable& t, const std::string& name) {
  t.write(ctx.out / name);
  std::cerr << "wrote " << (ctx.out / name).string() << " (" << t.rows.size() << " rows)\n";
}

void need_sweep(const Context& ctx, const std::string& parameter) {
  if (ctx.config.sweep.parameter != parameter) {
    throw ConfigError("sweep.parameter must be '" + parameter + "' for " + ctx.command + ", got '" +
                      ctx.config.sweep.parameter + "'");
  }
}

void semiclassical_notes(const Context& ctx, CsvTable& t, bool both_states) {
  if (ctx.config.engine != Engine::semiclassical) return;
  if (both_states || ctx.config.analysis.qubit_init == 1) {
    t.meta.emplace_back("note.qubit_proxy", "excited qubit modeled as one quantum with random phase added to the qubit oscillator");
  }
}

std::vector<double> crossing_detunings(const RunConfig& c, double lo, double hi, std::string* note) {
  std::vector<double> out;
  try {
    std::vector<double> grid;
    const double step = 0.005;
    for (double d = lo - 0.1; d <= hi + 0.1 + 1e-12; d += step) grid.push_back(d);
    TrackingOptions opts;
    opts.max_excitation = c.analysis.max_excitation;
    opts.coupling = c.analysis.coupling;
    const auto tab = track_branches(c.system, grid, opts);
    for (int m : c.analysis.manifolds)
      for (const auto& x : find_avoided_crossings(tab, m))
        if (x.a.q == 0) out.push_back(x.detuning_at_min);
  } catch (const std::exception& e) {
    *note = e.what();
  }
  return out;
}

}  // namespace

void check(const Context& ctx) {
  const auto& c = ctx.config;
  c.validate();
  const auto& cmd = ctx.command;
  if (cmd == "spectrum" || cmd == "nonlinearity" || cmd == "threshold-map") need_sweep(ctx, "detuning");
  if (cmd == "chirp" || cmd == "scurve" || cmd == "fidelity") need_sweep(ctx, "amplitude");
  if (cmd == "scaling") need_sweep(ctx, "rate");
  if (cmd == "transmission") {
    if (c.sweep.parameter != "none") throw ConfigError("sweep.parameter must be 'none' for transmission");
  }
  if (cmd == "scurve" || cmd == "fidelity") {
    if (c.sweep.steps < 3) throw ConfigError("sweep.steps must be >= 3 for an S-curve");
    if (c.sweep.stop <= c.sweep.start) throw ConfigError("sweep.stop must exceed sweep.start for an S-curve");
  }
  if (cmd == "chirp" || cmd == "scurve" || cmd == "fidelity" || cmd == "threshold-map") {
    locked_orbit_photons(c.system, c.pulse.f_stop);  // throws when the cut is undefined
  }
  if (cmd == "scaling") {
    const auto rates = c.sweep.values();
    if (rates.size() < 4) throw ConfigError("sweep.steps must be >= 4 for scaling");
  }
  if (c.engine == Engine::quantum && (cmd == "threshold-map" || cmd == "scaling")) {
    throw ConfigError("engine.name = quantum is not supported for " + cmd + "; use semiclassical");
  }
}

int run_spectrum(const Context& ctx) {
  const auto& c = ctx.config;
  const auto grid = c.sweep.values();
  TrackingOptions opts;
  opts.max_excitation = c.analysis.max_excitation;
  opts.coupling = c.analysis.coupling;
  const BranchTable tab = track_branches(c.system, grid, opts);

  auto branches = table(ctx, {"detuning_ghz", "label_q", "label_n", "energy_ghz", "overlap"});
  for (std::size_t i = 0; i < tab.detunings.size(); ++i)
    for (const auto& b : tab.branches)
      branches.add_row({num(tab.detunings[i]), num(b.label.q), num(b.label.n), num(b.energies[i]),
                        num(b.overlap_trace[i])});
  branches.meta.emplace_back("tracking.refinements", num(static_cast<int>(tab.refinements)));
  branches.meta.emplace_back("tracking.flagged_points", num(static_cast<int>(tab.flagged.size())));

  auto crossings = table(ctx, {"manifold", "pair", "detuning_at_min_ghz", "gap_ghz"});
  for (int m : c.analysis.manifolds)
    for (const auto& x : find_avoided_crossings(tab, m))
      if (c.analysis.all_pairs || x.a.q == 0)
        crossings.add_row({num(m), x.pair_name(), num(x.detuning_at_min), num(x.gap)});

  save(ctx, branches, "branches.csv");
  save(ctx, crossings, "crossings.csv");
  if (!tab.flagged.empty()) {
    std::cerr << "warning: " << tab.flagged.size() << " grid points had ambiguous branch continuation\n";
  }
  return Exit::ok;
}

namespace {

struct NonlinearityRow {
  double spectral = kNaN, residual = kNaN, classical = kNaN, dynamical = kNaN;
  std::string status = "ok";
};

double dynamical_lambda(const RunConfig& c, const SystemParams& p) {
  // Dressed cavity line of the ground-qubit ladder.
  const std::vector<BasisLabel> labels{{0, 0}, {0, 1}};
  const auto e = dressed_energies(p, labels, Coupling::rwa);
  const double center = e[1] - e[0];
  const double pump = center + c.analysis.pump_detuning;
  const double halfspan = 4.0 * p.kappa + 2.0 * std::abs(p.kerr) * 2.0 *
                                              *std::max_element(c.analysis.pump_nbar.begin(), c.analysis.pump_nbar.end());
  std::vector<double> coarse;
  for (int k = 0; k <= 40; ++k) coarse.push_back(center - halfspan + 2.0 * halfspan * k / 40.0);
  std::vector<double> photons, freqs;
  for (double nbar : c.analysis.pump_nbar) {
    double n = 0;
    freqs.push_back(resonance_frequency(p, coarse, c.analysis.probe_amp, pump, nbar, &n));
    photons.push_back(n);
  }
  const double mx = std::accumulate(photons.begin(), photons.end(), 0.0) / photons.size();
  const double my = std::accumulate(freqs.begin(), freqs.end(), 0.0) / freqs.size();
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < photons.size(); ++k) {
    sxy += (photons[k] - mx) * (freqs[k] - my);
    sxx += (photons[k] - mx) * (photons[k] - mx);
  }
  if (!(sxx > 0)) throw NumericalError("dynamical nonlinearity: pump photon numbers do not vary");
  return -0.5 * sxy / sxx;
}

}  // namespace

int run_nonlinearity(const Context& ctx) {
  const auto& c = ctx.config;
  const auto grid = c.sweep.values();
  std::vector<NonlinearityRow> rows(grid.size());
  parallel_for(grid.size(), ctx.jobs, [&](std::size_t k) {
    SystemParams p = c.system;
    p.detuning = grid[k];
    auto& r = rows[k];
    std::string fail;
    try {
      const auto fit = effective_params(p, c.analysis.n_fit, c.analysis.coupling);
      r.spectral = fit.lambda;
      r.residual = fit.fit_residual;
    } catch (const NumericalError& e) {
      fail += std::string("spectral: ") + e.what() + "; ";
    }
    try {
      r.classical = classical_nonlinearity(p);
    } catch (const std::exception& e) {
      fail += std::string("classical: ") + e.what() + "; ";
    }
    if (c.analysis.dynamical) {
      try {
        r.dynamical = dynamical_lambda(c, p);
      } catch (const NumericalError& e) {
        fail += std::string("dynamical: ") + e.what() + "; ";
      }
    }
    if (!fail.empty()) r.status = clean(fail);
  });
  auto t = table(ctx, {"detuning_ghz", "lambda_spectral_ghz", "fit_residual_ghz", "lambda_classical_ghz",
                       "lambda_dynamical_ghz", "status"});
  int failed = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& r = rows[k];
    failed += r.status != "ok";
    t.add_row({num(grid[k]), num(r.spectral), num(r.residual), num(r.classical), num(r.dynamical), r.status});
  }
  save(ctx, t, "nonlinearity.csv");
  if (failed) {
    std::cerr << failed << " of " << grid.size() << " detuning points failed; see the status column\n";
    return Exit::partial;
  }
  return Exit::ok;
}

int run_transmission(const Context& ctx) {
  const auto& c = ctx.config;
  const auto& p = c.system;
  const std::vector<BasisLabel> labels{{0, 0}, {0, 1}};
  const auto e = dressed_energies(p, labels, Coupling::rwa);
  const double center = e[1] - e[0];
  const double pump = center + c.analysis.pump_detuning;
  const double nmax = *std::max_element(c.analysis.pump_nbar.begin(), c.analysis.pump_nbar.end());
  const double halfspan = 5.0 * p.kappa + 4.0 * std::abs(p.kerr) * nmax;
  std::vector<double> freqs;
  for (int k = 0; k <= 200; ++k) freqs.push_back(center - halfspan + 2.0 * halfspan * k / 200.0);

  std::vector<TransmissionScan> scans(c.analysis.pump_nbar.size());
  parallel_for(scans.size(), ctx.jobs, [&](std::size_t k) {
    scans[k] = steady_transmission(p, freqs, c.analysis.probe_amp, pump, c.analysis.pump_nbar[k]);
  });
  auto t = table(ctx, {"pump_nbar", "pump_photons", "probe_freq_ghz", "magnitude", "converged"});
  t.meta.emplace_back("pump_freq_ghz", num(pump));
  int unconverged = 0;
  for (std::size_t k = 0; k < scans.size(); ++k)
    for (const auto& pt : scans[k].points) {
      unconverged += !pt.converged;
      t.add_row({num(c.analysis.pump_nbar[k]), num(scans[k].pump_photons), num(pt.freq), num(pt.magnitude),
                 pt.converged ? "1" : "0"});
    }
  save(ctx, t, "transmission.csv");
  return unconverged ? Exit::partial : Exit::ok;
}

int run_chirp(const Context& ctx) {
  const auto& c = ctx.config;
  const auto amps = c.sweep.values();
  const auto s = c.ensemble(ctx.jobs);
  const std::size_t nr = c.n_runs, na = amps.size();
  const int q0 = c.analysis.qubit_init;

  auto single = table(ctx, {"amplitude_ghz", "time_ns", "mean_n", "field_mag", "qubit_pop", "re_alpha_c",
                            "im_alpha_c", "re_alpha_q", "im_alpha_q"});
  auto mean = table(ctx, {"amplitude_ghz", "time_ns", "mean_n", "field_mag", "qubit_pop", "captured_fraction"});
  semiclassical_notes(ctx, single, false);
  semiclassical_notes(ctx, mean, false);

  if (c.engine == Engine::semiclassical) {
    CaptureSettings cs;
    cs.noise = c.analysis.noise;
    cs.qubit_init = q0;
    cs.integ = s.integ;
    const double offset = cs.noise == InitialNoise::vacuum ? 0.5 : 0.0;  // symmetric ordering
    if (offset > 0) mean.meta.emplace_back("note.ordering", "mean_n and qubit_pop are Wigner averages minus 1/2");
    std::vector<std::vector<ClassicalState>> runs(na * nr);
    parallel_for(na * nr, ctx.jobs, [&](std::size_t job) {
      ChirpPulse pulse = c.pulse;
      pulse.amplitude = amps[job / nr];
      runs[job] = integrate_coupled(c.system, pulse, capture_initial_state(cs, stream_seed(c.seed0, job % nr)), s.integ);
    });
    const double cut = c.analysis.cut_fraction * locked_orbit_photons(c.system, c.pulse.f_stop);
    for (std::size_t a = 0; a < na; ++a) {
      for (const auto& st : runs[a * nr]) {
        single.add_row({num(amps[a]), num(st.time), num(std::norm(st.alpha_c)), num(std::abs(st.alpha_c)),
                        num(std::norm(st.alpha_q)), num(st.alpha_c.real()), num(st.alpha_c.imag()),
                        num(st.alpha_q.real()), num(st.alpha_q.imag())});
      }
      const std::size_t nt = runs[a * nr].size();
      for (std::size_t i = 0; i < nt; ++i) {
        double n = 0, nq = 0, hit = 0;
        std::complex<double> field = 0;
        for (std::size_t k = 0; k < nr; ++k) {
          const auto& st = runs[a * nr + k][i];
          n += std::norm(st.alpha_c);
          nq += std::norm(st.alpha_q);
          field += st.alpha_c;
          hit += std::norm(st.alpha_c) > cut;
        }
        mean.add_row({num(amps[a]), num(runs[a * nr][i].time), num(n / nr - offset), num(std::abs(field) / double(nr)),
                      num(nq / nr - offset), num(hit / nr)});
      }
    }
  } else {
    const QuantumSystem sys(c.system);
    std::vector<TrajectoryRecord> runs(na * nr);
    parallel_for(na * nr, ctx.jobs, [&](std::size_t job) {
      ChirpPulse pulse = c.pulse;
      pulse.amplitude = amps[job / nr];
      runs[job] = evolve_trajectory(sys, pulse, q0, stream_seed(c.seed0, job % nr), s.traj);
    });
    const double cut = c.analysis.cut_fraction * locked_orbit_photons(c.system, c.pulse.f_stop);
    for (std::size_t a = 0; a < na; ++a) {
      const auto& r0 = runs[a * nr];
      for (std::size_t i = 0; i < r0.times.size(); ++i)
        single.add_row({num(amps[a]), num(r0.times[i]), num(r0.mean_n[i]), num(r0.field_mag[i]), num(r0.qubit_pop[i]),
                        "nan", "nan", "nan", "nan"});
      for (std::size_t i = 0; i < r0.times.size(); ++i) {
        double n = 0, f = 0, qp = 0, hit = 0;
        for (std::size_t k = 0; k < nr; ++k) {
          const auto& r = runs[a * nr + k];
          n += r.mean_n[i];
          f += r.field_mag[i];
          qp += r.qubit_pop[i];
          hit += r.mean_n[i] > cut;
        }
        mean.add_row({num(amps[a]), num(r0.times[i]), num(n / nr), num(f / nr), num(qp / nr), num(hit / nr)});
      }
    }
    mean.meta.emplace_back("note.field_mag", "trajectory average of |<a>|");
  }
  save(ctx, single, "chirp_single.csv");
  save(ctx, mean, "chirp_mean.csv");
  return Exit::ok;
}

namespace {

std::vector<std::string> threshold_cells(const std::optional<ThresholdResult>& r, const std::string& status) {
  if (!r) return {"nan", "nan", "nan", "nan", "nan", "nan", clean(status)};
  return {num(r->v_half), num(r->v_half_err), num(r->width), num(r->width_err), num(r->fit_residual),
          r->width_at_floor ? "1" : "0", "ok"};
}

const std::vector<std::string> kThresholdColumns{"v_half_ghz", "v_half_err_ghz", "width_ghz", "width_err_ghz",
                                                 "fit_residual", "width_at_floor", "status"};

}  // namespace

int run_scurve(const Context& ctx) {
  const auto& c = ctx.config;
  const auto amps = c.sweep.values();
  const SCurve curve = autores::run_scurve(c.system, c.pulse, amps, c.analysis.qubit_init, c.ensemble(ctx.jobs));

  auto t = table(ctx, {"amplitude_ghz", "P", "stderr", "n_runs", "seed0", "median_capture_ns"});
  semiclassical_notes(ctx, t, false);
  for (std::size_t k = 0; k < curve.size(); ++k)
    t.add_row({num(curve.amplitudes[k]), num(curve.probs[k]), num(curve.stderrs[k]), num(curve.trials[k]),
               std::to_string(c.seed0), num(curve.median_capture_time[k])});

  std::vector<std::string> cols{"qubit_init"};
  cols.insert(cols.end(), kThresholdColumns.begin(), kThresholdColumns.end());
  auto th = table(ctx, cols);
  std::optional<ThresholdResult> fit;
  std::string status;
  try {
    fit = fit_threshold(curve);
  } catch (const NumericalError& e) {
    status = e.what();
  }
  auto cells = threshold_cells(fit, status);
  cells.insert(cells.begin(), num(c.analysis.qubit_init));
  th.add_row(cells);
  save(ctx, t, "scurve.csv");
  save(ctx, th, "threshold.csv");
  if (!fit) {
    std::cerr << "threshold fit failed: " << status << '\n';
    return Exit::partial;
  }
  return Exit::ok;
}

int run_fidelity(const Context& ctx) {
  const auto& c = ctx.config;
  const auto amps = c.sweep.values();
  const auto s = c.ensemble(ctx.jobs);
  const SCurve s0 = autores::run_scurve(c.system, c.pulse, amps, 0, s);
  const SCurve s1 = autores::run_scurve(c.system, c.pulse, amps, 1, s);
  const double t1 = t1_from_gamma1(c.system.gamma1);
  const FidelityReport rep = fidelity(s0, s1, std::isfinite(t1) ? t1 : 1e300, c.analysis.t_capture);

  auto curves = table(ctx, {"amplitude_ghz", "P0", "stderr0", "P1", "stderr1", "n_runs", "seed0",
                            "median_capture0_ns", "median_capture1_ns"});
  semiclassical_notes(ctx, curves, true);
  for (std::size_t k = 0; k < amps.size(); ++k)
    curves.add_row({num(amps[k]), num(s0.probs[k]), num(s0.stderrs[k]), num(s1.probs[k]), num(s1.stderrs[k]),
                    num(s0.trials[k]), std::to_string(c.seed0), num(s0.median_capture_time[k]),
                    num(s1.median_capture_time[k])});

  auto f = table(ctx, {"f_raw", "v_opt_ghz", "f_t1_corrected", "capture_time_ns", "survival", "t1_ns"});
  semiclassical_notes(ctx, f, true);
  f.meta.emplace_back("note.fidelity", "separation of capture probabilities; latched and unlatched responses assumed perfectly distinguishable");
  f.add_row({num(rep.f_raw), num(rep.v_opt), num(rep.f_t1_corrected), num(rep.capture_time_used), num(rep.survival),
             num(t1)});
  save(ctx, curves, "scurves.csv");
  save(ctx, f, "fidelity.csv");
  return Exit::ok;
}

int run_threshold_map(const Context& ctx) {
  const auto& c = ctx.config;
  const auto detunings = c.sweep.values();
  std::string note;
  const auto crossings = crossing_detunings(c, *std::min_element(detunings.begin(), detunings.end()),
                                            *std::max_element(detunings.begin(), detunings.end()), &note);
  MapGrid grid{c.scurve.values(), c.scurve.relative};
  const auto rows = threshold_map(c.system, detunings, c.pulse, grid, c.ensemble(ctx.jobs), crossings,
                                  c.analysis.crossing_window);

  std::vector<std::string> cols{"detuning_ghz", "qubit_init"};
  cols.insert(cols.end(), kThresholdColumns.begin(), kThresholdColumns.end());
  cols.insert(cols.end(), {"amp_scale_ghz", "near_crossing"});
  auto t = table(ctx, cols);
  semiclassical_notes(ctx, t, true);
  std::string xs;
  for (double x : crossings) xs += (xs.empty() ? "" : ";") + num(x);
  t.meta.emplace_back("crossing_detunings_ghz", xs.empty() ? "none" : xs);
  if (!note.empty()) t.meta.emplace_back("note.crossings", clean(note));
  int failed = 0;
  for (const auto& r : rows) {
    failed += !r.result.has_value();
    std::vector<std::string> cells{num(r.detuning), num(r.qubit_init)};
    for (auto& s : threshold_cells(r.result, r.error)) cells.push_back(std::move(s));
    cells.push_back(num(r.scale));
    cells.push_back(r.near_crossing ? "1" : "0");
    t.add_row(cells);
  }
  save(ctx, t, "threshold_map.csv");
  if (failed) {
    std::cerr << failed << " of " << rows.size() << " map points failed; see the status column\n";
    return Exit::partial;
  }
  return Exit::ok;
}

int run_scaling(const Context& ctx) {
  const auto& c = ctx.config;
  const auto rates = c.sweep.values();
  const auto res = classical_threshold(c.system, c.pulse, rates, ctx.jobs, c.ensemble(ctx.jobs).integ);
  auto t = table(ctx, {"rate_ghz_per_ns", "duration_ns", "v_c_ghz"});
  for (const auto& pt : res.points)
    t.add_row({num(pt.rate), num(with_rate(c.pulse, pt.rate).duration), num(pt.v_c)});
  auto fit = table(ctx, {"exponent", "exponent_stderr"});
  fit.add_row({num(res.exponent), num(res.exponent_stderr)});
  save(ctx, t, "scaling.csv");
  save(ctx, fit, "scaling_fit.csv");
  return Exit::ok;
}

}  // namespace arsim
