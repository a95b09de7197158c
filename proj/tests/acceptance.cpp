// Acceptance run: one PASS/FAIL line per criterion.
// usage: acceptance PATH_TO_ANFORGE_CLI

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "anforge/pipeline.hpp"
#include "mutation.hpp"
#include "oracles.hpp"

namespace {

using namespace anforge;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::map<int, std::pair<bool, std::string>> results;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::ostringstream line;
  line.precision(2);
  line << std::fixed << (o.pass ? "PASS" : "FAIL") << " " << id << " " << name << ": " << o.detail << " ["
       << secs << " s]";
  std::cerr << line.str() << std::endl;
  results[id] = {o.pass, line.str()};
}

std::string run_capture(const std::string& command, int& status) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) throw std::runtime_error("cannot run " + command);
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  status = pclose(pipe);
  status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Random valid instances shared by criteria 1 and 3.
std::vector<Instance> random_instances(std::size_t count) {
  std::mt19937_64 rng(1001);
  std::vector<Instance> out;
  const std::vector<std::uint64_t> ells = {11, 13, 17, 19, 23};
  while (out.size() < count) {
    const int n = 3 + static_cast<int>(out.size() % 5);
    const Shape s = random_small_shape(n, rng);
    std::optional<mpz_class> ell;
    if (rng() % 2) ell = from_u64(ells[rng() % ells.size()]);
    const mpz_class b = uniform_in(rng, -1000000000L, 1000000000L);
    try {
      out.push_back(instantiate(s, ell, b));
    } catch (const ZeroFactor&) {
    } catch (const BNotCoprime&) {
    }
  }
  return out;
}

bool has_sn_witness_types(const Certificate& c) {
  std::set<std::vector<int>> types;
  for (const auto& w : c.galois) types.insert(w.cycle_type);
  std::vector<int> tr(static_cast<std::size_t>(c.n - 1), 1);
  tr[0] = 2;
  return types.count({c.n}) && types.count({c.n - 1, 1}) && types.count(tr);
}

std::string congruence_problem(const Certificate& c) {
  for (const auto& w : c.reference_witnesses) {
    if (!(reduce_mod(c.pb, w.prime) == reduce_mod(c.reference, w.prime))) {
      return "P != R mod " + std::to_string(w.prime);
    }
  }
  for (std::size_t i = 0; i < c.factors.size(); ++i) {
    for (std::size_t j = i + 1; j < c.factors.size(); ++j) {
      if (gcd(c.factors[i], c.factors[j]) != 1) return "F_i, F_j share a factor";
    }
  }
  return {};
}

ForgeOptions forge_options(int n, int r, std::size_t count, std::uint64_t seed) {
  ForgeOptions o;
  o.n = n;
  o.r = r;
  o.count = count;
  o.seed = seed;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance PATH_TO_ANFORGE_CLI\n";
    return 4;
  }
  const std::string cli = argv[1];
  std::vector<Instance> instances;
  std::vector<Certificate> forged;  // everything forged below, for criterion 4

  report(1, "discriminant identity", [&] {
    instances = random_instances(500);
    std::size_t bad = 0, cross_checked = 0;
    for (const auto& inst : instances) {
      const mpz_class subres = discriminant(inst.pb());
      if (discriminant_factored(inst).value != subres) ++bad;
      if (inst.shape().degree() <= 5) {
        ++cross_checked;
        if (oracle::sylvester_discriminant(inst.pb()) != subres) ++bad;
      }
    }
    return Outcome{bad == 0, std::to_string(instances.size()) + " instances (n = 3..7), " + std::to_string(bad) +
                                 " mismatches; " + std::to_string(cross_checked) + " also matched a Sylvester determinant"};
  });

  report(2, "worked example", [&] {
    const Instance inst = instantiate(build_shape(3, 2, {mpz_class(6)}), std::nullopt, 1);
    const auto fd = discriminant_factored(inst);
    const auto proof = squarefree_proof(fd.factors);
    std::string why;
    if (!(inst.pb() == IntPoly{1, 12, -10, 1})) why += " polynomial";
    if (fd.value != 9301 || discriminant(inst.pb()) != 9301) why += " discriminant";
    if (!(fd.factors == std::vector<mpz_class>{131, -71})) why += " factors";
    if (!proof.proven()) why += " squarefree";
    if (real_root_count(inst.pb()) != 3) why += " real roots";
    if (gcd(fd.value, 6) != 1) why += " coprimality";
    return Outcome{why.empty(), why.empty() ? "x^3 - 10x^2 + 12x + 1, Delta = 9301 = 71 * 131, 3 real roots"
                                            : "mismatch in" + why};
  });

  report(3, "coprimality", [&] {
    if (instances.empty()) instances = random_instances(500);
    std::size_t bad = 0;
    for (const auto& inst : instances) {
      if (gcd(discriminant_factored(inst).value, lcm_upto(inst.shape().degree())) != 1) ++bad;
    }
    return Outcome{bad == 0, std::to_string(bad) + " exceptions in " + std::to_string(instances.size()) + " instances"};
  });

  std::vector<Certificate> end_to_end_certs;
  report(5, "end-to-end forging", [&] {
    std::string detail;
    bool ok = true;
    const auto t0 = Clock::now();
    for (int r = 0; r <= 2; ++r) {
      ForgeOptions o = forge_options(5, r, 3, 100 + r);
      o.time_limit = std::chrono::seconds(600);
      const auto rep = run_forge(o);
      std::size_t good = 0;
      for (const auto& c : rep.certificates) {
        const bool v = verify_text(to_text(c)).accepted() && has_sn_witness_types(c) &&
                       real_root_count(c.pb) == 5 - 2 * r && squarefree_proof(c.factors).proven();
        good += v ? 1 : 0;
        end_to_end_certs.push_back(c);
      }
      ok = ok && good >= 3;
      detail += "n=5 r=" + std::to_string(r) + ": " + std::to_string(good) + " verified; ";
    }
    const double five = std::chrono::duration<double>(Clock::now() - t0).count();
    ok = ok && five <= 600;
    const auto t1 = Clock::now();
    ForgeOptions six = forge_options(6, 0, 1, 106);
    six.time_limit = std::chrono::seconds(900);
    const auto rep6 = run_forge(six);
    const double six_secs = std::chrono::duration<double>(Clock::now() - t1).count();
    std::size_t good6 = 0;
    for (const auto& c : rep6.certificates) {
      good6 += (verify_text(to_text(c)).accepted() && has_sn_witness_types(c) && real_root_count(c.pb) == 6) ? 1 : 0;
      end_to_end_certs.push_back(c);
    }
    ok = ok && good6 >= 1 && six_secs <= 900;
    std::ostringstream os;
    os.precision(1);
    os << std::fixed << detail << "n=5 total " << five << " s; n=6 r=0: " << good6 << " verified in " << six_secs
       << " s";
    forged.insert(forged.end(), end_to_end_certs.begin(), end_to_end_certs.end());
    return Outcome{ok, os.str()};
  });

  report(6, "verifier adversarial suite", [&] {
    if (end_to_end_certs.empty()) return Outcome{false, "no certificates from criterion 5"};
    std::mt19937_64 rng(606);
    std::size_t raw_accepted = 0, sealed_accepted = 0, clean_rejected = 0, total = 0;
    for (const auto& c : end_to_end_certs) {
      const nlohmann::json doc = to_json(c);
      if (!verify_json(doc).accepted()) ++clean_rejected;
      std::vector<std::string> all, semantic;
      fuzz::numeric_leaves(doc, "", all);
      for (const auto& p : all) {
        if (!fuzz::provenance_only(p)) semantic.push_back(p);
      }
      for (int k = 0; k < 100; ++k) {
        ++total;
        if (verify_json(fuzz::mutate(doc, all, rng).doc).accepted()) ++raw_accepted;
        if (verify_json(fuzz::reseal(fuzz::mutate(doc, semantic, rng).doc)).accepted()) ++sealed_accepted;
      }
    }
    const bool ok = raw_accepted == 0 && sealed_accepted == 0 && clean_rejected == 0;
    return Outcome{ok, std::to_string(end_to_end_certs.size()) + " certificates, " + std::to_string(total) +
                           " mutations each way; accepted after mutation: " + std::to_string(raw_accepted) +
                           " raw, " + std::to_string(sealed_accepted) + " with recomputed digest; clean rejected: " +
                           std::to_string(clean_rejected)};
  });

  report(7, "sieve inequality", [&] {
    std::mt19937_64 rng(707);
    int windows = 0, holds = 0;
    std::uint64_t incidences = 0;
    while (windows < 50) {
      const int n = 3 + windows % 3;
      const Shape s = random_small_shape(n, rng);
      const mpz_class ell = windows % 2 ? mpz_class(1) : mpz_class(11);
      const long width = 1000 + static_cast<long>(rng() % 4000);
      const long lo = uniform_in(rng, -1000000, 1000000);
      const BProgram program{{1, factorial(n)}, {}, {lo, lo + width - 1}};
      SieveStats st;
      try {
        st = sieve_stats(s, ell, program);
      } catch (const BudgetExceeded&) {
        continue;  // not exhaustively factorable within budget: draw another window
      }
      ++windows;
      holds += (st.n2 >= st.n1 && st.n1 + st.n3 >= st.n2) ? 1 : 0;
      incidences += st.n3;
    }
    return Outcome{holds == windows, std::to_string(holds) + "/" + std::to_string(windows) +
                                         " windows of width >= 1000 satisfy n2 >= n1 >= n2 - n3 (" +
                                         std::to_string(incidences) + " large-prime incidences)"};
  });

  report(8, "density sanity", [&] {
    std::mt19937_64 rng(91);
    const Shape s = random_small_shape(5, rng);
    const BProgram program{{1, 120}, {}, {0, 120L * 12000}};
    const SieveStats st = sieve_stats(s, 1, program);
    const double predicted = local_density(s, 1, program, 1000).get_d();
    const double rel = std::abs(st.density() - predicted) / predicted;
    std::ostringstream os;
    os.precision(4);
    os << st.n0 << " admissible b, empirical " << st.density() << ", local product " << predicted
       << ", relative error " << rel;
    return Outcome{st.n0 >= 10000 && st.density() > 0 && rel <= 0.15, os.str()};
  });

  report(9, "field counting", [&] {
    const fs::path dir = fs::temp_directory_path() / "anforge-acceptance-fields";
    fs::remove_all(dir);
    int status = 0;
    const std::string out = run_capture(cli + " count-fields --n 5 --r 0 --out " + dir.string() + " 2>/dev/null", status);
    const auto doc = nlohmann::json::parse(out.substr(0, out.find("\n}") + 2));
    std::set<std::string> distinct;
    for (const auto& d : doc.at("discriminants")) distinct.insert(d.get<std::string>());
    std::size_t verified = 0, files = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
      ++files;
      const auto text = read_file(entry.path());
      if (verify_text(text).accepted()) ++verified;
      const Certificate c = parse_certificate(text);
      if (!squarefree_proof(c.factors).proven()) --verified;
      forged.push_back(c);
    }
    const bool ok = status == 0 && distinct.size() >= 10 && distinct.size() == doc.at("count").get<std::size_t>() &&
                    verified == files && files == distinct.size();
    return Outcome{ok, std::to_string(distinct.size()) + " distinct squarefree Delta, " + std::to_string(verified) + "/" +
                           std::to_string(files) + " certificates verify, exit " + std::to_string(status)};
  });

  report(10, "ramification avoidance", [&] {
    ForgeOptions o = forge_options(5, 0, 3, 110);
    o.avoid = {7, 11};
    const auto certs = forge(o);
    std::size_t clean = 0;
    for (const auto& c : certs) {
      clean += (gcd(c.discriminant, 77) == 1 && verify(c).accepted()) ? 1 : 0;
      forged.push_back(c);
    }
    // synthetic: declare a prime that divides one of the factors
    const Certificate& c = certs.front();
    std::uint64_t inside = 0;
    for (const auto& fp : c.squarefree.factors) {
      for (const auto& pp : fp.primes) {
        if (inside == 0 && pp.prime > 5 && pp.prime < 1000000) inside = pp.prime.get_ui();
      }
    }
    bool rejected = false;
    if (inside != 0) {
      try {
        make_certificate(0, choose_reference(5), build_shape(5, c.u, c.a), c.ell, {c.b, c.squarefree}, {inside}, 110);
      } catch (const AvoidanceViolated& e) {
        rejected = e.prime() == inside;
      }
    }
    return Outcome{clean == certs.size() && certs.size() == 3 && rejected,
                   std::to_string(clean) + "/" + std::to_string(certs.size()) +
                       " certificates coprime to 77; avoid prime " + std::to_string(inside) +
                       (rejected ? " inside a factor rejected before emission" : " NOT rejected")};
  });

  report(4, "congruence soundness", [&] {
    std::size_t bad = 0;
    std::string first;
    for (const auto& c : forged) {
      const auto why = congruence_problem(c);
      if (!why.empty()) {
        ++bad;
        if (first.empty()) first = ": " + why;
      }
    }
    return Outcome{bad == 0 && !forged.empty(),
                   std::to_string(forged.size()) + " forged certificates, " + std::to_string(bad) + " exceptions" + first};
  });

  report(11, "Sturm correctness", [&] {
    std::mt19937_64 rng(1111);
    int checked = 0, agree = 0, undecided = 0;
    while (checked < 200) {
      const int degree = 1 + static_cast<int>(rng() % 7);
      const IntPoly p = oracle::random_monic(rng, degree, 20);
      if (degree > 1 && discriminant(p) == 0) continue;
      const auto numeric = oracle::numeric_real_root_count(p);
      if (!numeric) {
        ++undecided;
        continue;
      }
      ++checked;
      agree += (real_root_count(p) == *numeric) ? 1 : 0;
    }
    return Outcome{agree == checked, std::to_string(agree) + "/" + std::to_string(checked) +
                                         " squarefree polynomials of degree <= 7 agree (" + std::to_string(undecided) +
                                         " numerically ambiguous draws replaced)"};
  });

  // criteria run in dependency order; report them in numeric order
  int failures = 0;
  for (const auto& [id, r] : results) {
    std::cout << r.second << "\n";
    failures += r.first ? 0 : 1;
  }
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
