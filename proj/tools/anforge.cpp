// anforge command line: forge, verify, stats, count-fields.
//
// Exit codes: 0 success, 2 budget exhausted, 3 verification reject,
// 4 invalid arguments. Logs go to stderr, machine output to stdout or --out.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "anforge/pipeline.hpp"

namespace {

using namespace anforge;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitBudget = 2;
constexpr int kExitReject = 3;
constexpr int kExitInvalid = 4;

void log_line(const std::string& s) { std::cerr << "[anforge] " << s << "\n"; }

std::vector<std::uint64_t> parse_prime_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    const mpz_class v = parse_integer(item);
    if (v < 2 || !mpz_fits_ulong_p(v.get_mpz_t())) throw InvalidArgument("bad prime '" + item + "'");
    out.push_back(v.get_ui());
  }
  return out;
}

IntWindow parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvalidArgument("window must be LO:HI");
  return {parse_integer(text.substr(0, colon)), parse_integer(text.substr(colon + 1))};
}

/// "U:A2,A3,..." -> explicit shape
Shape parse_shape(int n, const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvalidArgument("shape must be U:A2,A3,...");
  std::vector<mpz_class> a;
  std::stringstream ss(text.substr(colon + 1));
  for (std::string item; std::getline(ss, item, ',');) a.push_back(parse_integer(item));
  return build_shape(n, parse_integer(text.substr(0, colon)), std::move(a));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_certificates(const std::vector<Certificate>& certs, const fs::path& dir, const std::string& stem) {
  fs::create_directories(dir);
  for (std::size_t k = 0; k < certs.size(); ++k) {
    const fs::path file = dir / (stem + "-" + std::to_string(k + 1) + ".json");
    std::ofstream(file, std::ios::binary) << to_text(certs[k]);
    std::cout << file.string() << "\n";
  }
}

struct CommonForge {
  int n = 5;
  int r = 0;
  std::string avoid;
  std::uint64_t seed = 1;
  bool allow_small_n = false;
  unsigned workers = 1;
  int shape_attempts = 400;
  long time_limit = 0;
};

void add_common(CLI::App* cmd, CommonForge& c) {
  cmd->add_option("--n", c.n, "degree")->required();
  cmd->add_option("--r", c.r, "complex conjugate pairs")->required();
  cmd->add_option("--avoid", c.avoid, "comma-separated primes that must not divide the discriminant");
  cmd->add_option("--seed", c.seed, "pipeline seed");
  cmd->add_flag("--allow-small-n", c.allow_small_n, "permit n = 3, 4");
  cmd->add_option("--workers", c.workers, "scan threads");
  cmd->add_option("--shape-attempts", c.shape_attempts, "shape samples before giving up");
  cmd->add_option("--time-limit", c.time_limit, "seconds (0 = none)");
}

ForgeOptions to_options(const CommonForge& c) {
  ForgeOptions o;
  o.n = c.n;
  o.r = c.r;
  o.avoid = parse_prime_list(c.avoid);
  o.seed = c.seed;
  o.allow_small_n = c.allow_small_n;
  o.workers = c.workers;
  o.shape_attempts = c.shape_attempts;
  if (c.time_limit > 0) o.time_limit = std::chrono::seconds(c.time_limit);
  o.log = log_line;
  return o;
}

int run_forge_cmd(const CommonForge& common, std::size_t count, const std::string& out) {
  ForgeOptions o = to_options(common);
  o.count = count;
  const ForgeReport report = run_forge(o);
  write_certificates(report.certificates, out, "cert-n" + std::to_string(o.n) + "-r" + std::to_string(o.r));
  log_line("forged " + std::to_string(report.certificates.size()) + " certificate(s) in " +
           std::to_string(report.seconds) + " s");
  if (report.exhausted) {
    log_line("budget exhausted in stage '" + *report.exhausted + "'");
    return kExitBudget;
  }
  return kExitOk;
}

int run_verify_cmd(const std::vector<std::string>& files) {
  int status = kExitOk;
  for (const auto& file : files) {
    const VerifyReport report = verify_text(read_file(file));
    if (report.accepted()) {
      std::cout << file << ": accept\n";
      continue;
    }
    status = kExitReject;
    std::cout << file << ": reject\n";
    for (const auto& issue : report.issues) std::cout << "  " << issue.check << ": " << issue.detail << "\n";
  }
  return status;
}

int run_stats_cmd(int n, std::uint64_t shape_seed, const std::string& shape_text, const std::string& window_text,
                  const std::string& ell_text, std::optional<double> xi) {
  if (n < 3) throw InvalidArgument("degree must be at least 3");
  std::mt19937_64 rng(shape_seed);
  const Shape shape = shape_text.empty() ? random_small_shape(n, rng) : parse_shape(n, shape_text);
  const IntWindow window = parse_window(window_text);
  StatsOptions so;
  so.xi = xi;
  const StatsReport rep = stats_report(shape, parse_integer(ell_text), window, so);
  const auto& s = rep.stats;
  json a = json::array();
  for (const auto& v : shape.a()) a.push_back(v.get_str());
  const json out = {
      {"n", n},
      {"shape", {{"u", shape.u().get_str()}, {"a", a}}},
      {"ell", ell_text},
      {"window", {s.window.lo.get_str(), s.window.hi.get_str()}},
      {"progression", {{"residue", s.base.residue.get_str()}, {"modulus", s.base.modulus.get_str()}}},
      {"N0", s.n0},
      {"N1", s.n1},
      {"N2", s.n2},
      {"N3", s.n3},
      {"degenerate", s.degenerate},
      {"xi", s.xi},
      {"empirical_density", s.density()},
      {"local_density", rep.local_density.get_d()},
      {"local_density_prime_bound", rep.local_bound},
      {"inequality_holds", s.inequality_holds()},
  };
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int run_count_cmd(const CommonForge& common, std::size_t target, const std::string& max_disc, const std::string& out) {
  ForgeOptions o = to_options(common);
  std::optional<mpz_class> bound;
  if (!max_disc.empty()) bound = parse_integer(max_disc);
  const FieldCount fc = count_fields(o, target, bound);
  json deltas = json::array();
  for (const auto& d : fc.discriminants) deltas.push_back(d.get_str());
  json doc = {{"n", fc.n},
              {"r", fc.r},
              {"bound", bound ? json(bound->get_str()) : json(nullptr)},
              {"count", fc.count()},
              {"collisions", fc.collisions},
              {"over_bound", fc.over_bound},
              {"discriminants", deltas}};
  if (fc.exhausted) doc["exhausted"] = *fc.exhausted;
  std::cout << doc.dump(2) << "\n";
  if (!out.empty()) write_certificates(fc.certificates, out, "field-n" + std::to_string(fc.n) + "-r" + std::to_string(fc.r));
  return fc.exhausted ? kExitBudget : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anforge: squarefree-discriminant polynomials with certified S_n Galois group"};
  app.require_subcommand(1);

  CommonForge forge_args;
  std::size_t count = 1;
  std::string out_dir;
  auto* forge_cmd = app.add_subcommand("forge", "forge certificates");
  add_common(forge_cmd, forge_args);
  forge_cmd->add_option("--count", count, "certificates to emit")->required();
  forge_cmd->add_option("--out", out_dir, "output directory")->required();

  std::vector<std::string> files;
  auto* verify_cmd = app.add_subcommand("verify", "verify certificate files");
  verify_cmd->add_option("files", files, "certificate files")->required();

  int stats_n = 3;
  std::uint64_t shape_seed = 1;
  std::string shape_text, window_text, ell_text = "1";
  std::optional<double> xi;
  auto* stats_cmd = app.add_subcommand("stats", "exact sieve statistics on a window");
  stats_cmd->add_option("--n", stats_n, "degree")->required();
  stats_cmd->add_option("--shape-seed", shape_seed, "seed for a random small shape");
  stats_cmd->add_option("--shape", shape_text, "explicit shape U:A2,A3,... (overrides the seed)");
  stats_cmd->add_option("--window", window_text, "LO:HI")->required();
  stats_cmd->add_option("--ell", ell_text, "scaling prime (1 for raw shapes)");
  stats_cmd->add_option("--xi", xi, "small/large prime cutoff (default log(width)/4)");

  CommonForge count_args;
  std::size_t target = 10;
  std::string max_disc, count_out;
  auto* count_cmd = app.add_subcommand("count-fields", "count distinct squarefree discriminants");
  add_common(count_cmd, count_args);
  count_cmd->add_option("--max-disc", max_disc, "bound on |Delta| (default: none)");
  count_cmd->add_option("--target", target, "distinct discriminants wanted");
  count_cmd->add_option("--out", count_out, "also write the certificates here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*forge_cmd) return run_forge_cmd(forge_args, count, out_dir);
    if (*verify_cmd) return run_verify_cmd(files);
    if (*stats_cmd) return run_stats_cmd(stats_n, shape_seed, shape_text, window_text, ell_text, xi);
    if (*count_cmd) return run_count_cmd(count_args, target, max_disc, count_out);
  } catch (const BudgetExhausted& e) {
    log_line(e.what());
    return kExitBudget;
  } catch (const InvalidArgument& e) {
    log_line(std::string("invalid argument: ") + e.what());
    return kExitInvalid;
  } catch (const Error& e) {
    log_line(e.what());
    return kExitInvalid;
  }
  return kExitInvalid;
}
