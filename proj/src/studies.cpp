#include "vmproj/studies.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "vmproj/csv.hpp"

namespace vmproj {

namespace fs = std::filesystem;

double stressNorm(const FemSpace* space, const StressField& s) {
  if (space) return space->normH(s);
  return frobNorm(s.at(0));
}

double minYieldSlack(const SchemeState& state, const StepData& data) {
  double slack = std::numeric_limits<double>::infinity();
  for (int e = 0; e < state.stress.size(); ++e)
    slack = std::min(slack, yieldSlack(state.stress.at(e), data.shift.at(e), data.yield[e]));
  return slack;
}

namespace {

std::ofstream openOutput(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  return out;
}

void requireFem(const RunConfig& cfg, const char* command) {
  if (cfg.problem.mode != Mode::Fem)
    throw ConfigError(std::string(command) + ": needs mode \"fem\"");
}

ProblemSpec withSteps(ProblemSpec spec, int steps) {
  spec.steps = steps;
  return spec;
}

double log2Ratio(double coarse, double fine, double stepRatio) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return 0.0;
  return std::log2(coarse / fine) / std::log2(stepRatio);
}

}  // namespace

std::vector<ConvergenceErrors> trajectoryErrors(const std::vector<Trajectory>& coarse,
                                                const ProblemSpec& reference, Scheme scheme,
                                                const StepperOptions& options) {
  std::vector<ConvergenceErrors> errs(coarse.size());
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    errs[i].steps = coarse[i].steps();
    errs[i].dt = coarse[i].dt();
  }
  const double dtRef = reference.dt();
  run(reference, scheme, options, [&](const SchemeState& ref) {
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      const Trajectory& c = coarse[i];
      const FemSpace* space = c.space().get();
      const double t = std::min(ref.time, c.finalTime());
      const StressField ds = stressAt(c, t, Interp::Hat) - ref.stress;
      errs[i].sigmaLinfH = std::max(errs[i].sigmaLinfH, stressNorm(space, ds));
      if (!space) continue;
      const Vector dv = velocityAt(c, t, Interp::Hat) - ref.velocity;
      errs[i].vLinfH = std::max(errs[i].vLinfH, space->normH(dv));
      if (ref.step >= 1) {
        // reference v-bar is v_ref on (t - dtRef, t]; sample the coarse v-bar inside it
        const Vector dbar = velocityAt(c, t - 0.5 * dtRef, Interp::Bar) - ref.velocity;
        const double n = space->normV(dbar);
        errs[i].vL2V += dtRef * n * n;
      }
    }
  });
  for (auto& e : errs) e.vL2V = std::sqrt(e.vL2V);
  return errs;
}

double logLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

std::vector<AgreementRow> schemeAgreement(const ProblemSpec& spec, const std::vector<int>& stepsList,
                                          const StepperOptions& options) {
  std::vector<AgreementRow> rows;
  for (int steps : stepsList) {
    const ProblemSpec s = withSteps(spec, steps);
    const Trajectory proj = run(s, Scheme::Projection, options);
    const Trajectory impl = run(s, Scheme::Implicit, options);
    const FemSpace* space = proj.space().get();
    AgreementRow row;
    row.steps = steps;
    for (int n = 0; n <= steps; ++n) {
      row.sigmaDiffLinfH = std::max(row.sigmaDiffLinfH, stressNorm(space, proj[n].stress - impl[n].stress));
      row.maxFixedPointIterations = std::max(row.maxFixedPointIterations, impl[n].fixedPointIterations);
    }
    row.flaggedSteps = impl.flaggedSteps();
    rows.push_back(std::move(row));
  }
  return rows;
}

double barSupError(const ProblemSpec& spec, Scheme scheme, const StepperOptions& options,
                   const std::function<SymMatd(double)>& exact) {
  if (spec.mode != Mode::Pointwise) throw std::invalid_argument("barSupError: pointwise mode only");
  double err = 0.0;
  run(spec, scheme, options, [&](const SchemeState& s) {
    if (s.step == 0) return;
    const SymMatd sigma = s.stress.at(0);
    err = std::max({err, frobNorm(sigma - exact(spec.time(s.step - 1))), frobNorm(sigma - exact(s.time))});
  });
  return err;
}

double gridError(const ProblemSpec& spec, Scheme scheme, const StepperOptions& options,
                 const std::function<SymMatd(double)>& exact) {
  if (spec.mode != Mode::Pointwise) throw std::invalid_argument("gridError: pointwise mode only");
  double err = 0.0;
  run(spec, scheme, options,
      [&](const SchemeState& s) { err = std::max(err, frobNorm(s.stress.at(0) - exact(s.time))); });
  return err;
}

void cmdRun(const RunConfig& cfg, const fs::path& out) {
  const Stepper stepper(cfg.problem, cfg.scheme, cfg.stepper);
  const FemSpace* space = stepper.space().get();
  std::ofstream file = openOutput(out, "norms.csv");
  CsvWriter csv(file, {"n", "t", "v_norm_H", "sigma_norm_H", "yield_slack_min", "cg_iterations",
                       "fp_iterations"});

  const auto emit = [&](const SchemeState& s) {
    const double vNorm = space ? space->normH(s.velocity) : 0.0;
    csv.row({double(s.step), s.time, vNorm, stressNorm(space, s.stress), minYieldSlack(s, stepper.data(s.step)),
             double(s.cgIterations), double(s.fixedPointIterations)});
    if (!s.fixedPointConverged)
      std::cerr << "warning: implicit fixed-point iteration hit the cap at step " << s.step << '\n';
    if (space && cfg.vtkStride > 0 && (s.step % cfg.vtkStride == 0 || s.step == cfg.problem.steps)) {
      std::ostringstream name;
      name << "snapshot_" << std::setw(6) << std::setfill('0') << s.step << ".vtk";
      std::ofstream vtk = openOutput(out, name.str());
      writeVtk(vtk, space->mesh(), s.velocity, s.stress, &s.trialStress,
               "vmproj " + toString(cfg.scheme) + " step " + std::to_string(s.step));
    }
  };

  SchemeState state = stepper.initialState();
  emit(state);
  for (int n = 1; n <= cfg.problem.steps; ++n) {
    state = stepper.step(state);
    emit(state);
  }
}

void cmdStability(const RunConfig& cfg, const fs::path& out) {
  requireFem(cfg, "stability");
  validateStudy(cfg.study, false);
  if (cfg.study.stepsList.empty()) throw ConfigError("study.N_list: at least one step count is required");

  std::ofstream file = openOutput(out, "stability.csv");
  CsvWriter csv(file, {"N", "dt", "dual_norm_dv", "linf_H_vbar", "l2_V_vbar", "gap_v", "linf_H_sigma_star",
                       "linf_H_sigma", "gap_sigma", "h1_H_sigma_hat", "gap_v_L2", "gap_sigma_L2",
                       "energy_ratio_max", "energy_checked"});
  std::optional<double> korn;
  std::vector<double> dts, gapV, gapS;
  for (int steps : cfg.study.stepsList) {
    const ProblemSpec spec = withSteps(cfg.problem, steps);
    const Stepper stepper(spec, cfg.scheme, cfg.stepper);
    const Trajectory traj = run(spec, cfg.scheme, cfg.stepper);
    const NormReport r = discreteNorms(traj);
    if (!r.allFinite()) throw std::runtime_error("stability: non-finite norms at N = " + std::to_string(steps));
    double ratio = 0.0;
    bool checked = false;
    if (cfg.scheme == Scheme::Projection && spec.dt() <= 1.0) {
      if (!korn) korn = kornConstant(*traj.space());
      ratio = energyInequality(traj, stepper, *korn).maxRatio();
      checked = true;
    }
    csv.row({double(steps), r.dt, r.dualNormDv, r.linfHVbar, r.l2VVbar, r.gapV, r.linfHSigmaStar, r.linfHSigma,
             r.gapSigma, r.h1HSigmaHat, r.gapVL2(), r.gapSigmaL2(), ratio, checked ? 1.0 : 0.0});
    dts.push_back(r.dt);
    gapV.push_back(r.gapVL2());
    gapS.push_back(r.gapSigmaL2());
  }

  std::ofstream rates = openOutput(out, "stability_rates.csv");
  CsvWriter rcsv(rates, {"N_coarse", "N_fine", "slope_gap_v_L2", "slope_gap_sigma_L2"});
  const auto& ns = cfg.study.stepsList;
  for (std::size_t i = 1; i < ns.size(); ++i) {
    const double ratio = double(ns[i]) / ns[i - 1];
    rcsv.row({double(ns[i - 1]), double(ns[i]), log2Ratio(gapV[i - 1], gapV[i], ratio),
              log2Ratio(gapS[i - 1], gapS[i], ratio)});
  }
  std::ofstream fit = openOutput(out, "stability_fit.csv");
  CsvWriter fcsv(fit, {"N_first", "N_last", "slope_gap_v_L2", "slope_gap_sigma_L2"});
  fcsv.row({double(ns.front()), double(ns.back()), logLogSlope(dts, gapV), logLogSlope(dts, gapS)});
}

void cmdConvergence(const RunConfig& cfg, const fs::path& out) {
  validateStudy(cfg.study, true);
  std::vector<Trajectory> coarse;
  for (int steps : cfg.study.stepsList) coarse.push_back(run(withSteps(cfg.problem, steps), cfg.scheme, cfg.stepper));
  const auto errs =
      trajectoryErrors(coarse, withSteps(cfg.problem, cfg.study.referenceSteps), cfg.scheme, cfg.stepper);

  std::ofstream file = openOutput(out, "convergence.csv");
  CsvWriter csv(file, {"N", "dt", "N_ref", "err_sigma_LinfH", "err_v_LinfH", "err_v_L2V"});
  std::vector<double> dts, es, ev, el;
  for (const auto& e : errs) {
    csv.row({double(e.steps), e.dt, double(cfg.study.referenceSteps), e.sigmaLinfH, e.vLinfH, e.vL2V});
    dts.push_back(e.dt);
    es.push_back(e.sigmaLinfH);
    ev.push_back(e.vLinfH);
    el.push_back(e.vL2V);
  }

  std::ofstream rates = openOutput(out, "convergence_rates.csv");
  CsvWriter rcsv(rates, {"N_coarse", "N_fine", "order_sigma_LinfH", "order_v_LinfH", "order_v_L2V"});
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double ratio = double(errs[i].steps) / errs[i - 1].steps;
    rcsv.row({double(errs[i - 1].steps), double(errs[i].steps), log2Ratio(es[i - 1], es[i], ratio),
              log2Ratio(ev[i - 1], ev[i], ratio), log2Ratio(el[i - 1], el[i], ratio)});
  }
  std::ofstream fit = openOutput(out, "convergence_fit.csv");
  CsvWriter fcsv(fit, {"N_first", "N_last", "order_sigma_LinfH", "order_v_LinfH", "order_v_L2V"});
  fcsv.row({double(errs.front().steps), double(errs.back().steps), logLogSlope(dts, es), logLogSlope(dts, ev),
            logLogSlope(dts, el)});
}

}  // namespace vmproj
