// Command-line front end. Kept in a header so the test suite can drive every
// subcommand in-process.
//
// Exit codes: 0 success, 2 usage error, 3 input error, 4 budget refusal.

#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dmmv/builders/fir.hpp"
#include "dmmv/builders/quant.hpp"
#include "dmmv/builders/subsetsum.hpp"
#include "dmmv/builders/tomo.hpp"
#include "dmmv/controller.hpp"
#include "dmmv/io.hpp"
#include "dmmv/oracle.hpp"
#include "dmmv/version.hpp"

namespace dmmv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitBudget = 4;

// Invalid user input that is not a file-format problem.
class InputError : public Error {
 public:
  using Error::Error;
};

// Parses "0.4", "pi", "2pi/5", "0.75pi", "3/7" style angles (radians).
inline double parse_angle(const std::string& text) {
  std::string s = text;
  double den = 1.0;
  if (auto slash = s.find('/'); slash != std::string::npos) {
    const std::string d = s.substr(slash + 1);
    std::size_t used = 0;
    try {
      den = std::stod(d, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != d.size() || d.empty() || den == 0.0) throw InputError("bad angle '" + text + "'");
    s = s.substr(0, slash);
  }
  double scale = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    scale = std::numbers::pi;
    s = s.substr(0, s.size() - 2);
    if (s.empty()) s = "1";
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) throw InputError("bad angle '" + text + "'");
  return v * scale / den;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

// "lo:hi:D[:w],..." with angles in parse_angle syntax.
inline std::vector<fir::Band> parse_bands(const std::string& text) {
  std::vector<fir::Band> bands;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 3 && parts.size() != 4) throw InputError("band '" + item + "' must be lo:hi:D[:w]");
    fir::Band band;
    band.lo = parse_angle(parts[0]);
    band.hi = parse_angle(parts[1]);
    try {
      band.desired = std::stod(parts[2]);
      band.weight = parts.size() == 4 ? std::stod(parts[3]) : 1.0;
    } catch (const std::exception&) {
      throw InputError("band '" + item + "' has a non-numeric gain or weight");
    }
    bands.push_back(band);
  }
  return bands;
}

inline std::vector<std::int64_t> parse_weights(const std::string& text) {
  std::vector<std::int64_t> out;
  for (const auto& item : split(text, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) throw InputError("bad weight '" + item + "'");
    out.push_back(v);
  }
  return out;
}

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

inline Instance load_instance(const std::string& path, Streams io) {
  if (path == "-") return dmmv::io::read_instance(io.in);
  std::ifstream f(path);
  if (!f) throw InputError("cannot open instance file '" + path + "'");
  try {
    return dmmv::io::read_instance(f);
  } catch (const dmmv::io::ParseError& e) {
    throw dmmv::io::ParseError(e.line(), e.column(), path + ": " + std::string(e.what()));
  }
}

template <class Writer>
void write_output(const std::string& path, Streams io, Writer&& write) {
  if (path == "-") {
    write(io.out);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path + "'");
  write(f);
  if (!f) throw InputError("write to '" + path + "' failed");
}

inline nlohmann::ordered_json config_json(const SolverConfig& cfg) {
  nlohmann::ordered_json j;
  j["destroy_rate"] = cfg.destroy_rate;
  j["alpha"] = cfg.alpha;
  j["k_eps"] = cfg.k_eps;
  j["max_candidates"] = cfg.max_candidates;
  j["max_iters"] = cfg.max_iters;
  j["time_limit"] = std::isfinite(cfg.time_limit) ? nlohmann::ordered_json(cfg.time_limit) : nlohmann::ordered_json();
  j["seed"] = cfg.seed;
  j["sigma"] = {cfg.sigma1, cfg.sigma2, cfg.sigma3};
  j["decay"] = cfg.decay;
  j["segment"] = cfg.segment;
  j["l2_tiebreak"] = cfg.l2_tiebreak;
  j["workers"] = cfg.workers;
  return j;
}

inline nlohmann::ordered_json report_json(const Instance& inst, const SolverConfig& cfg, const SolveReport& rep,
                                          const std::string& instance_path) {
  nlohmann::ordered_json j;
  j["solver"] = "dmmv";
  j["version"] = std::string(kVersion);
  j["instance"] = instance_path;
  j["m"] = inst.m();
  j["n"] = inst.n();
  j["levels"] = inst.values().size();
  j["seed"] = cfg.seed;
  j["config"] = config_json(cfg);
  j["initial_objective"] = rep.initial_objective;
  j["best_objective"] = rep.best.objective;
  j["iterations"] = rep.iterations;
  j["wall_time"] = rep.wall_time;
  j["stop_reason"] = rep.stop_reason;
  if (!rep.warning.empty()) j["warning"] = rep.warning;
  nlohmann::ordered_json ops = nlohmann::ordered_json::array();
  for (std::size_t q = 0; q < kOperatorPairs; ++q) {
    ops.push_back({{"pair", pair_name(q)},
                   {"selected", rep.operator_stats[q].selected},
                   {"accepted", rep.operator_stats[q].accepted},
                   {"new_best", rep.operator_stats[q].new_best},
                   {"final_weight", rep.final_bank.weights[q]}});
  }
  j["operators"] = ops;
  return j;
}

inline void write_trace(std::ostream& out, const SolveReport& rep) {
  out << "iter,current_t,best_t,op_pair,accepted\n";
  for (const auto& e : rep.trace) {
    out << e.iteration << ',' << dmmv::io::format_double(e.current_t) << ','
        << dmmv::io::format_double(e.best_t) << ',' << pair_name(e.pair) << ',' << (e.accepted ? 1 : 0) << '\n';
  }
}

inline int run(int argc, const char* const* argv, Streams io) {
  CLI::App app{"Discrete min-max violation solver: min over x in V^n of ||Ax - b||_inf"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  // solve
  SolverConfig cfg;
  std::string instance_path;
  std::string out_dir = ".";
  bool no_l2 = false;
  double time_limit = 0.0;
  auto* solve = app.add_subcommand("solve", "Run the adaptive search on an instance file");
  solve->add_option("--instance", instance_path, "Instance file ('-' for stdin)")->required();
  solve->add_option("--iters", cfg.max_iters, "Iteration limit")->capture_default_str();
  solve->add_option("--time-limit", time_limit, "Wall-clock limit in seconds (0 = none)");
  solve->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  solve->add_option("--destroy-rate", cfg.destroy_rate, "Fraction of variables removed per iteration")
      ->capture_default_str();
  solve->add_option("--alpha", cfg.alpha, "Worst-removal impact coefficient")->capture_default_str();
  solve->add_option("--k-eps", cfg.k_eps, "Rows used by the swap candidate filter")->capture_default_str();
  solve->add_option("--max-candidates", cfg.max_candidates, "Cap on evaluated swap pairs")->capture_default_str();
  solve->add_option("--workers", cfg.workers, "Parallel evaluation workers")->capture_default_str();
  solve->add_flag("--no-l2-tiebreak", no_l2, "Accept only strict l_inf improvements");
  solve->add_option("--out", out_dir, "Output directory for report.json, trace.csv, solution.txt")
      ->capture_default_str();

  // gen-fir
  fir::FirSpec fir_spec;
  std::string bands_text;
  std::string gen_out = "-";
  auto* gen_fir = app.add_subcommand("gen-fir", "Fixed-point FIR design instance");
  gen_fir->add_option("--order", fir_spec.order, "Filter order N")->required();
  gen_fir->add_option("--bits", fir_spec.bits, "Coefficient bits p")->required();
  gen_fir->add_option("--bands", bands_text, "Bands 'lo:hi:D[:w],...' (angles like 2pi/5)")->required();
  gen_fir->add_option("--grid-mult", fir_spec.grid_mult, "Grid points per unit order")->capture_default_str();
  gen_fir->add_option("--gain", fir_spec.gain, "Passband gain K")->capture_default_str();
  gen_fir->add_flag("--symmetric", fir_spec.symmetric, "Linear-phase symmetric taps (N/2+1 variables)");
  gen_fir->add_option("--out", gen_out, "Output instance file ('-' for stdout)")->capture_default_str();

  // gen-tomo
  tomo::TomoSpec tomo_spec;
  std::size_t tomo_levels = 2;
  std::string phantom = "disk";
  auto* gen_tomo = app.add_subcommand("gen-tomo", "Parallel-beam discrete tomography instance");
  gen_tomo->add_option("--side", tomo_spec.side, "Image side in pixels")->capture_default_str();
  gen_tomo->add_option("--angles", tomo_spec.n_angles, "Projection angles over [0, pi)")->capture_default_str();
  gen_tomo->add_option("--levels", tomo_levels, "Gray levels 0..L-1")->capture_default_str();
  gen_tomo->add_option("--noise", tomo_spec.noise, "Uniform noise half-width")->capture_default_str();
  gen_tomo->add_flag("--noise-relative", tomo_spec.noise_relative, "Noise as a fraction of the largest row sum");
  gen_tomo->add_option("--phantom", phantom, "disk, squares or checker")->capture_default_str();
  gen_tomo->add_option("--sirt-iters", tomo_spec.sirt_iters, "SIRT warm-start iterations")->capture_default_str();
  gen_tomo->add_option("--seed", tomo_spec.seed, "Noise seed")->capture_default_str();
  gen_tomo->add_option("--out", gen_out, "Output instance file ('-' for stdout)")->capture_default_str();

  // gen-quant
  quant::QuantSpec quant_spec;
  auto* gen_quant = app.add_subcommand("gen-quant", "Weight-row quantization instance");
  gen_quant->add_option("--dim", quant_spec.dim, "Row dimension d")->capture_default_str();
  gen_quant->add_option("--calib", quant_spec.calib, "Calibration samples m")->capture_default_str();
  gen_quant->add_option("--bits", quant_spec.bits, "Alphabet bits")->capture_default_str();
  gen_quant->add_option("--scale", quant_spec.weight_scale, "Weight standard deviation")->capture_default_str();
  gen_quant->add_option("--seed", quant_spec.seed, "Sampling seed")->capture_default_str();
  gen_quant->add_option("--out", gen_out, "Output instance file ('-' for stdout)")->capture_default_str();

  // gen-subsetsum
  std::string weights_text;
  std::int64_t target = 0;
  auto* gen_ss = app.add_subcommand("gen-subsetsum", "Subset-sum reduction instance");
  gen_ss->add_option("--weights", weights_text, "Positive integer weights a,b,c")->required();
  gen_ss->add_option("--target", target, "Target sum S")->required();
  gen_ss->add_option("--out", gen_out, "Output instance file ('-' for stdout)")->capture_default_str();

  // oracle
  OracleOptions oracle_opt;
  std::string oracle_out = "-";
  auto* oracle = app.add_subcommand("oracle", "Exact optimum by enumeration");
  oracle->add_option("--instance", instance_path, "Instance file ('-' for stdin)")->required();
  oracle->add_option("--budget", oracle_opt.budget, "Maximum assignments to enumerate")->capture_default_str();
  oracle->add_flag("--prune", oracle_opt.prune, "Bound-based pruning");
  oracle->add_option("--workers", oracle_opt.workers, "Parallel workers")->capture_default_str();
  oracle->add_option("--out", oracle_out, "Report file ('-' for stdout)")->capture_default_str();

  // export-lp
  std::string lp_out;
  auto* export_lp = app.add_subcommand("export-lp", "Write the MILP model in LP format");
  export_lp->add_option("--instance", instance_path, "Instance file ('-' for stdin)")->required();
  export_lp->add_option("--out", lp_out, "Output LP file ('-' for stdout)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, io.out, io.err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve->parsed()) {
      cfg.l2_tiebreak = !no_l2;
      cfg.time_limit = time_limit > 0.0 ? time_limit : std::numeric_limits<double>::infinity();
      try {
        cfg.validate();
      } catch (const Error& e) {
        throw InputError(e.what());
      }
      const Instance inst = load_instance(instance_path, io);
      const SolveReport rep = dmmv::solve(inst, cfg);
      std::filesystem::create_directories(out_dir);
      const auto dir = std::filesystem::path(out_dir);
      write_output((dir / "report.json").string(), io,
                   [&](std::ostream& os) { os << report_json(inst, cfg, rep, instance_path).dump(2) << '\n'; });
      write_output((dir / "trace.csv").string(), io, [&](std::ostream& os) { write_trace(os, rep); });
      write_output((dir / "solution.txt").string(), io,
                   [&](std::ostream& os) { dmmv::io::write_solution(os, inst, rep.best); });
      io.out << "best_objective " << dmmv::io::format_double(rep.best.objective) << " initial_objective "
             << dmmv::io::format_double(rep.initial_objective) << " iterations " << rep.iterations << '\n';
      return kExitOk;
    }
    if (gen_fir->parsed()) {
      fir_spec.bands = parse_bands(bands_text);
      Instance inst = [&] {
        try {
          return fir::build_fir(fir_spec);
        } catch (const Error& e) {
          throw InputError(e.what());
        }
      }();
      write_output(gen_out, io, [&](std::ostream& os) { dmmv::io::write_instance(os, inst); });
      return kExitOk;
    }
    if (gen_tomo->parsed()) {
      tomo::TomoProblem prob = [&] {
        try {
          if (tomo_levels < 2) throw Error("need at least two gray levels");
          std::vector<double> levels(tomo_levels);
          for (std::size_t v = 0; v < tomo_levels; ++v) levels[v] = static_cast<double>(v);
          tomo_spec.gray_levels = ValueSet(std::move(levels));
          tomo_spec.phantom = tomo::parse_phantom(phantom);
          return tomo::build_tomo(tomo_spec);
        } catch (const Error& e) {
          throw InputError(e.what());
        }
      }();
      write_output(gen_out, io, [&](std::ostream& os) { dmmv::io::write_instance(os, prob.instance); });
      if (gen_out != "-") {
        write_output(gen_out + ".truth", io, [&](std::ostream& os) {
          os << tomo_spec.side << ' ' << tomo_spec.side << '\n';
          dmmv::io::write_numbers(os, prob.truth_values);
        });
      }
      return kExitOk;
    }
    if (gen_quant->parsed()) {
      quant::QuantProblem prob = [&] {
        try {
          return quant::build_quant(quant_spec);
        } catch (const Error& e) {
          throw InputError(e.what());
        }
      }();
      write_output(gen_out, io, [&](std::ostream& os) { dmmv::io::write_instance(os, prob.instance); });
      if (gen_out != "-") {
        write_output(gen_out + ".truth", io, [&](std::ostream& os) {
          os << prob.weights.size() << '\n';
          dmmv::io::write_numbers(os, prob.weights);
        });
      }
      return kExitOk;
    }
    if (gen_ss->parsed()) {
      subsetsum::SubsetSumSpec spec{parse_weights(weights_text), target};
      Instance inst = [&] {
        try {
          return subsetsum::build_subsetsum(spec);
        } catch (const Error& e) {
          throw InputError(e.what());
        }
      }();
      write_output(gen_out, io, [&](std::ostream& os) { dmmv::io::write_instance(os, inst); });
      return kExitOk;
    }
    if (oracle->parsed()) {
      const Instance inst = load_instance(instance_path, io);
      const OracleResult res = brute_force(inst, oracle_opt);
      nlohmann::ordered_json j;
      j["solver"] = "dmmv-oracle";
      j["version"] = std::string(kVersion);
      j["best_objective"] = res.best_t;
      std::vector<double> x;
      for (std::size_t v : res.best_x) x.push_back(inst.values()[v]);
      j["best_x"] = x;
      j["enumerated"] = res.enumerated;
      j["prune"] = oracle_opt.prune;
      write_output(oracle_out, io, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
      return kExitOk;
    }
    if (export_lp->parsed()) {
      const Instance inst = load_instance(instance_path, io);
      write_output(lp_out, io, [&](std::ostream& os) { dmmv::io::export_lp(os, inst); });
      return kExitOk;
    }
  } catch (const BudgetError& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const dmmv::io::ParseError& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitUsage;
}

inline int run(const std::vector<std::string>& args, Streams io) {
  std::vector<const char*> argv;
  argv.push_back("dmmv");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), io);
}

}  // namespace dmmv::cli
