#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "edml/learn.hpp"
#include "edml/model.hpp"
#include "edml/verify.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitVerify = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Write-temp-then-rename so partial files never appear under the target
// name.
void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::string> pick_hidden(const edml::Network& net,
                                     const std::string& spec, uint64_t seed) {
  if (spec.empty()) return {};
  if (spec.rfind("frac:", 0) == 0) {
    const double q = std::stod(spec.substr(5));
    if (q < 0.0 || q > 1.0) throw std::runtime_error("bad fraction: " + spec);
    const int count = static_cast<int>(
        std::ceil(q * net.num_variables()));
    std::vector<int> pool(net.num_variables());
    for (int i = 0; i < net.num_variables(); ++i) pool[i] = i;
    std::mt19937_64 rng(seed ^ 0x68696464656eULL);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<std::string> hidden;
    for (int i = 0; i < count; ++i) hidden.push_back(net.name(pool[i]));
    return hidden;
  }
  std::vector<std::string> hidden;
  std::istringstream in(spec);
  std::string name;
  while (std::getline(in, name, ','))
    if (!name.empty()) hidden.push_back(name);
  return hidden;
}

std::string trace_csv(const edml::Trace& trace) {
  std::ostringstream out;
  out.precision(14);
  out << "iter,logpost,max_delta,elapsed_s\n";
  for (const auto& row : trace)
    out << row.iteration << ',' << row.log_posterior << ',' << row.max_delta
        << ',' << row.elapsed_s << "\n";
  return out.str();
}

int run_algorithm(edml::Algorithm algo, const edml::LearnConfig& base,
                  const edml::Network& structure, const edml::Dataset& data,
                  const std::string& prefix) {
  edml::LearnConfig config = base;
  config.algorithm = algo;
  const char* tag = algo == edml::Algorithm::EM ? "em" : "edml";
  try {
    const auto result = edml::run(config, structure, data);
    write_file_atomic(prefix + "." + tag + ".trace.csv",
                      trace_csv(result.trace));
    write_file_atomic(prefix + "." + tag + ".net",
                      edml::serialize_network(result.network));
  } catch (const edml::ZeroProbabilityError& e) {
    std::cerr << tag << ": " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MAP/ML parameter learning for binary Bayesian networks "
               "from incomplete data (EM and EDML)"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate",
                                 "Forwardsample a dataset from a network");
  std::string sim_net, sim_hidden, sim_out;
  int sim_n = 1024;
  uint64_t sim_seed = 0;
  sim->add_option("network", sim_net, "network file")->required();
  sim->add_option("--n", sim_n, "number of examples");
  sim->add_option("--hidden", sim_hidden,
                  "comma-separated variables, or frac:Q");
  sim->add_option("--seed", sim_seed, "master seed");
  sim->add_option("--out", sim_out, "output dataset file")->required();

  // learn
  auto* learn = app.add_subcommand("learn", "Run EM and/or EDML");
  std::string learn_net, learn_data, learn_algo = "both";
  std::string learn_ab = "2,2", learn_prefix = "run";
  double learn_gamma = 0.5, learn_stop = 1e-6;
  int learn_iters = 1024;
  uint64_t learn_seed = 0;
  bool learn_serial = false;
  learn->add_option("network", learn_net, "network file (structure + seed "
                    "parameters)")->required();
  learn->add_option("dataset", learn_data, "dataset file")->required();
  learn->add_option("--algo", learn_algo, "em | edml | both");
  learn->add_option("--alpha-beta", learn_ab, "Beta prior exponents a,b");
  learn->add_option("--gamma", learn_gamma, "EDML damping in (0,1]");
  learn->add_option("--iters", learn_iters, "iteration budget");
  learn->add_option("--stop-delta", learn_stop,
                    "stop when max parameter change is below this; 0 "
                    "disables");
  learn->add_option("--seed", learn_seed, "parameter seed");
  learn->add_option("--out-prefix", learn_prefix, "output file prefix");
  learn->add_flag("--serial", learn_serial, "disable the OpenMP sweep");

  // verify
  auto* verify = app.add_subcommand("verify", "Run oracle suites");
  std::string verify_suite = "all";
  uint64_t verify_seed = 20120815;
  verify->add_option("--suite", verify_suite,
                     "all | infer | island | mode | closed-form");
  verify->add_option("--seed", verify_seed, "suite seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : kExitUsage;
  }

  try {
    if (sim->parsed()) {
      const auto net = edml::parse_network(read_file(sim_net));
      const auto hidden = pick_hidden(net, sim_hidden, sim_seed);
      const auto data = edml::simulate_dataset(net, sim_n, hidden, sim_seed);
      write_file_atomic(sim_out, edml::serialize_dataset(data));
      return 0;
    }

    if (learn->parsed()) {
      const auto net = edml::parse_network(read_file(learn_net));
      const auto data = edml::parse_dataset(read_file(learn_data));
      if (data.header != net.names()) {
        std::cerr << "dataset header does not match network variables\n";
        return kExitData;
      }
      edml::LearnConfig config;
      if (std::sscanf(learn_ab.c_str(), "%lf,%lf", &config.alpha,
                      &config.beta) != 2) {
        std::cerr << "bad --alpha-beta, expected a,b\n";
        return kExitUsage;
      }
      config.damping = learn_gamma;
      config.max_iterations = learn_iters;
      config.stop_delta = learn_stop;
      config.seed = learn_seed;
      config.parallel = !learn_serial;
      int rc = 0;
      if (learn_algo == "em" || learn_algo == "both")
        rc = std::max(rc, run_algorithm(edml::Algorithm::EM, config, net,
                                        data, learn_prefix));
      if (learn_algo == "edml" || learn_algo == "both")
        rc = std::max(rc, run_algorithm(edml::Algorithm::EDML, config, net,
                                        data, learn_prefix));
      if (learn_algo != "em" && learn_algo != "edml" &&
          learn_algo != "both") {
        std::cerr << "unknown --algo: " << learn_algo << "\n";
        return kExitUsage;
      }
      return rc;
    }

    if (verify->parsed()) {
      std::vector<edml::verify::SuiteReport> reports;
      if (verify_suite == "all" || verify_suite == "infer")
        reports.push_back(edml::verify::suite_infer(verify_seed));
      if (verify_suite == "all" || verify_suite == "island")
        reports.push_back(edml::verify::suite_island(verify_seed));
      if (verify_suite == "all" || verify_suite == "mode")
        reports.push_back(edml::verify::suite_mode(verify_seed));
      if (verify_suite == "all" || verify_suite == "closed-form")
        reports.push_back(edml::verify::suite_closed_form(verify_seed));
      if (reports.empty()) {
        std::cerr << "unknown --suite: " << verify_suite << "\n";
        return kExitUsage;
      }
      bool all_passed = true;
      for (const auto& r : reports) {
        std::printf("%-12s instances=%-5d max_discrepancy=%.3e %s\n",
                    r.name.c_str(), r.instances, r.max_discrepancy,
                    r.passed ? "PASS" : "FAIL");
        all_passed = all_passed && r.passed;
      }
      return all_passed ? 0 : kExitVerify;
    }
  } catch (const edml::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
