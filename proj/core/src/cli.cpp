#include "aiid/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aiid/classical.hpp"
#include "aiid/errors.hpp"
#include "aiid/io.hpp"
#include "aiid/states.hpp"
#include "aiid/verify.hpp"
#include "aiid/w1.hpp"

namespace aiid {

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitParse = 2;
constexpr int kExitGuard = 3;
constexpr int kExitSolver = 4;

json jnum(double v) {
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  if (std::isnan(v)) return json("nan");
  return json(round_for_output(v));
}

void emit(const std::string& text, const std::string& out_path) {
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot write file: " + out_path);
    out << text;
  }
  std::cout << text;
}

std::string values_csv(const json& j) {
  std::ostringstream os;
  os << "key,value\n";
  for (const auto& [k, v] : j.items()) {
    os << k << ',';
    if (v.is_string())
      os << v.get<std::string>();
    else
      os << v.dump();
    os << '\n';
  }
  return os.str();
}

void emit_values(const json& j, const std::string& format,
                 const std::string& out_path) {
  if (format == "csv")
    emit(values_csv(j), out_path);
  else
    emit(j.dump(2) + "\n", out_path);
}

int env_threads() {
  const char* env = std::getenv("AIID_THREADS");
  if (!env) return 1;
  const int t = std::atoi(env);
  return std::max(1, std::min(t, 64));
}

DensityOperator load_single_site(const std::string& spec) {
  if (spec == "zero") return basis_state(2, 0);
  if (spec == "one") return basis_state(2, 1);
  if (spec == "tau") return maximally_mixed_site(2);
  if (spec == "plus") {
    Mat m(2, 2);
    m << 0.5, 0.5, 0.5, 0.5;
    return DensityOperator::make(2, 1, m);
  }
  return read_density(spec);
}

Vec pure_vector_of(const DensityOperator& state) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitized(state.mat));
  const Eigen::Index top = state.dim() - 1;  // eigenvalues ascending
  if (es.eigenvalues()[top] < 1.0 - 1e-9)
    throw std::invalid_argument("reference state is not pure");
  return es.eigenvectors().col(top);
}

TailWeight parse_weight(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg =
      colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "linear") return TailWeight::linear();
  if (kind == "cutoff" || kind == "indicator") {
    if (arg.empty())
      throw CLI::ValidationError("--weight", kind + " needs :r0");
    const int r0 = std::stoi(arg);
    return kind == "cutoff" ? TailWeight::hard_cutoff(r0)
                            : TailWeight::indicator(r0);
  }
  if (kind == "exp") {
    if (arg.empty()) throw CLI::ValidationError("--weight", "exp needs :lambda");
    return TailWeight::exponential(std::stod(arg));
  }
  throw CLI::ValidationError("--weight", "unknown weight " + spec);
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"almost-i.i.d. state toolkit"};
  app.require_subcommand(1);

  double tol = 1e-7;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string format = "json";
  app.add_option("--tol", tol, "solver tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out_path, "write output to this file as well");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));

  // w1
  auto* w1_cmd = app.add_subcommand("w1", "Wasserstein-1 distance between operator files");
  std::string w1_a, w1_b;
  bool w1_dual_flag = false;
  w1_cmd->add_option("a", w1_a, "operator JSON")->required();
  w1_cmd->add_option("b", w1_b, "operator JSON")->required();
  w1_cmd->add_flag("--dual", w1_dual_flag, "also solve the Lipschitz dual");

  // lv
  auto* lv_cmd = app.add_subcommand("lv", "local variation distance");
  std::string lv_a, lv_b;
  lv_cmd->add_option("a", lv_a)->required();
  lv_cmd->add_option("b", lv_b)->required();

  // tracedist
  auto* td_cmd = app.add_subcommand("tracedist", "trace distance");
  std::string td_a, td_b;
  td_cmd->add_option("a", td_a)->required();
  td_cmd->add_option("b", td_b)->required();

  // hamming-w1
  auto* hw_cmd = app.add_subcommand("hamming-w1",
                                    "Hamming-cost transport distance between distribution files");
  std::string hw_p, hw_q;
  hw_cmd->add_option("p", hw_p)->required();
  hw_cmd->add_option("q", hw_q)->required();

  // make-state
  auto* mk = app.add_subcommand("make-state", "construct states and projectors");
  mk->require_subcommand(1);
  int mk_n = 2, mk_r = 0;
  std::string mk_base = "zero", mk_defect = "one", mk_psi = "zero", mk_p;
  bool mk_density = false;
  auto* mk_iid = mk->add_subcommand("iid", "n-fold tensor power");
  mk_iid->add_option("--base", mk_base, "single-site state (preset or file)");
  mk_iid->add_option("--n", mk_n)->required();
  auto* mk_def = mk->add_subcommand("defect", "permutation-averaged defect state");
  mk_def->add_option("--base", mk_base);
  mk_def->add_option("--defect", mk_defect, "defect block (preset or file)");
  mk_def->add_option("--n", mk_n)->required();
  auto* mk_xi = mk->add_subcommand("xi", "balanced-type counterexample distribution");
  mk_xi->add_option("--n", mk_n)->required();
  mk_xi->add_flag("--density", mk_density, "emit the diagonal operator instead");
  auto* mk_paired = mk->add_subcommand("paired", "paired-bit source distribution");
  mk_paired->add_option("--n", mk_n)->required();
  mk_paired->add_option("--p", mk_p, "single-symbol distribution file (default uniform bit)");
  auto* mk_five = mk->add_subcommand("five-qubit", "five-qubit stabilizer demonstration state");
  (void)mk_five;
  auto* mk_proj = mk->add_subcommand("projector", "span projector");
  mk_proj->add_option("--n", mk_n)->required();
  mk_proj->add_option("--r", mk_r)->required();
  mk_proj->add_option("--psi", mk_psi, "reference pure state (preset or file)");

  // tail
  auto* tail_cmd = app.add_subcommand("tail", "tail functional of an extension");
  std::string tail_state, tail_psi, tail_weight;
  tail_cmd->add_option("state", tail_state, "extension operator JSON")->required();
  tail_cmd->add_option("psi", tail_psi, "reference pure state (preset or file)")->required();
  tail_cmd->add_option("--weight", tail_weight,
                       "cutoff:r0 | indicator:r0 | linear | exp:lambda")
      ->required();

  // suite
  auto* suite_cmd = app.add_subcommand("suite", "run a verification suite");
  std::string suite_name;
  bool enforce_one_over_n = false, full_dual = false;
  std::string only;
  suite_cmd->add_option("name", suite_name, "all | hierarchy | counterexamples | ame")
      ->required()
      ->check(CLI::IsMember({"all", "hierarchy", "counterexamples", "ame"}));
  suite_cmd->add_flag("--enforce-one-over-n", enforce_one_over_n,
                      "make the stated 1/n LV constant blocking");
  suite_cmd->add_flag("--full-dual", full_dual,
                      "attempt the 5-qubit dual conic solve");
  suite_cmd->add_option("--only", only, "run only task groups with this prefix");

  std::vector<std::string> argv = args;
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  }

  try {
    if (*w1_cmd) {
      const DensityOperator a = read_density(w1_a);
      const DensityOperator b = read_density(w1_b);
      const W1Certificate cert = w1_primal(a, b, tol);
      json j;
      j["command"] = "w1";
      j["value"] = jnum(cert.value);
      j["solver_gap"] = jnum(cert.solver_gap);
      j["constraint_residual"] = jnum(cert.max_constraint_residual);
      if (w1_dual_flag) {
        const LipschitzWitness wit = w1_dual(a, b, tol);
        j["dual_value"] = jnum(wit.value);
        j["duality_gap"] =
            jnum(std::abs(cert.value - wit.value) / std::max(1.0, cert.value));
        j["witness_site_norm"] = jnum(wit.max_site_norm);
      }
      emit_values(j, format, out_path);
      return kExitOk;
    }
    if (*lv_cmd) {
      const DensityOperator a = read_density(lv_a);
      const DensityOperator b = read_density(lv_b);
      json j;
      j["command"] = "lv";
      j["value"] = jnum(lv_norm(a, b));
      emit_values(j, format, out_path);
      return kExitOk;
    }
    if (*td_cmd) {
      const DensityOperator a = read_density(td_a);
      const DensityOperator b = read_density(td_b);
      const double d = trace_distance(a, b);
      json j;
      j["command"] = "tracedist";
      j["value"] = jnum(d);
      j["helstrom_success"] = jnum(0.5 * (1.0 + d));
      emit_values(j, format, out_path);
      return kExitOk;
    }
    if (*hw_cmd) {
      const ClassicalDistribution p = read_distribution(hw_p);
      const ClassicalDistribution q = read_distribution(hw_q);
      const TransportResult tr = hamming_w1(p, q);
      json j;
      j["command"] = "hamming-w1";
      j["value"] = jnum(tr.value);
      j["dual_value"] = jnum(tr.dual_value);
      j["coupling_size"] = static_cast<int>(tr.coupling.mass.size());
      emit_values(j, format, out_path);
      return kExitOk;
    }
    if (*mk) {
      if (out_path.empty())
        throw CLI::ValidationError("--out", "make-state needs an output path");
      json j;
      j["command"] = "make-state";
      if (*mk_iid) {
        write_operator(out_path, iid_state(load_single_site(mk_base), mk_n));
        j["kind"] = "iid";
      } else if (*mk_def) {
        const DensityOperator base = load_single_site(mk_base);
        const DensityOperator defect =
            mk_defect == "none" ? no_defect(base.site_dim)
                                : load_single_site(mk_defect);
        write_operator(out_path, defect_state(base, defect, mk_n));
        j["kind"] = "defect";
      } else if (*mk_xi) {
        if (mk_density) {
          write_operator(out_path, classical_to_density(xi_distribution(mk_n)));
        } else {
          write_distribution(out_path, xi_distribution(mk_n));
        }
        j["kind"] = "xi";
      } else if (*mk_paired) {
        const ClassicalDistribution p =
            mk_p.empty() ? ClassicalDistribution::uniform_symbol(2)
                         : read_distribution(mk_p);
        write_distribution(out_path, paired_source(p, mk_n));
        j["kind"] = "paired";
      } else if (*mk_five) {
        write_operator(out_path, five_qubit_code_state());
        j["kind"] = "five-qubit";
      } else {
        const Vec psi = pure_vector_of(load_single_site(mk_psi));
        write_projector(out_path, v_span_projector(psi, mk_n, mk_r));
        j["kind"] = "projector";
      }
      j["out"] = out_path;
      std::cout << j.dump(2) << "\n";
      return kExitOk;
    }
    if (*tail_cmd) {
      const DensityOperator state = read_density(tail_state);
      const Vec psi = pure_vector_of(load_single_site(tail_psi));
      const double value = tail_functional(state, psi, parse_weight(tail_weight));
      json j;
      j["command"] = "tail";
      j["weight"] = tail_weight;
      j["value"] = jnum(value);
      emit_values(j, format, out_path);
      return kExitOk;
    }
    if (*suite_cmd) {
      SuiteConfig config;
      config.seed = seed;
      if (app.count("--tol") > 0) config.solver_tol = tol;
      config.enforce_one_over_n = enforce_one_over_n;
      config.attempt_full_dual = full_dual;
      config.threads = env_threads();
      config.only = only;
      const VerificationReport rep = run_suite(suite_name, config);
      emit(format == "csv" ? report_to_csv(rep) : report_to_json(rep), out_path);
      return rep.all_pass() ? kExitOk : kExitCheckFailure;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  } catch (const GuardError& e) {
    std::cerr << "guard violation: " << e.what() << "\n";
    return kExitGuard;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitParse;
}

}  // namespace aiid
