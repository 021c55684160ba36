// Batch experiment driver over the cmt C API. Every command prints
// line-oriented deterministic output (rationals as p/q) and exits with
// 0 = ok, 1 = a declared check failed or an error value was hit,
// 2 = bad input.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cmt.h"

namespace {

struct CStr {
  char* p = nullptr;
  ~CStr() { cmt_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

int g_exit = 0;
std::string g_out_path;
std::string g_format = "raw";
std::ostringstream g_report;

void emit(const std::string& text) { g_report << text; }

void emit_line(const std::string& line) { g_report << line << "\n"; }

// table format aligns the first token; raw is byte-stable output.
void flush_report() {
  std::string body = g_report.str();
  if (g_format == "table") {
    std::istringstream in(body);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
      size_t sp = line.find(' ');
      if (sp != std::string::npos && sp < 16)
        out << line.substr(0, sp) << std::string(16 - sp, ' ')
            << line.substr(sp + 1) << "\n";
      else
        out << line << "\n";
    }
    body = out.str();
  }
  if (g_out_path.empty()) {
    std::cout << body;
  } else {
    std::ofstream f(g_out_path);
    f << body;
  }
}

// Returns false (and arranges the exit code) when the call failed.
bool ok(cmt_status st) {
  if (st == CMT_OK) return true;
  std::cerr << "ERROR=" << cmt_last_error() << "\n";
  g_exit = st == CMT_BAD_INPUT ? 2 : 1;
  return false;
}

template <typename T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, decltype([](T* p) { Free(p); })>;

using Measure = Handle<cmt_measure, cmt_measure_free>;
using Machine = Handle<cmt_machine, cmt_machine_free>;
using Oracle = Handle<cmt_oracle, cmt_oracle_free>;
using Plan = Handle<cmt_plan, cmt_plan_free>;
using Product = Handle<cmt_product, cmt_product_free>;
using Family = Handle<cmt_family, cmt_family_free>;

Measure measure_of(const std::string& ref) {
  cmt_measure* m = nullptr;
  ok(cmt_measure_parse(ref.c_str(), &m));
  return Measure(m);
}

Machine machine_of(const std::string& ref) {
  cmt_machine* m = nullptr;
  ok(cmt_machine_parse(ref.c_str(), &m));
  return Machine(m);
}

Oracle oracle_of(const std::string& pattern) {
  cmt_oracle* o = nullptr;
  ok(cmt_oracle_pattern(pattern.c_str(), &o));
  return Oracle(o);
}

void cmd_additivity(const std::string& measure_ref, uint32_t depth) {
  Measure m = measure_of(measure_ref);
  if (!m) return;
  int pass = 0;
  CStr report;
  if (!ok(cmt_check_additivity(m.get(), depth, &pass, &report.p))) return;
  emit(report.str());
  emit_line(std::string("RESULT=") + (pass ? "pass" : "fail"));
  if (!pass) g_exit = 1;
}

void cmd_pushforward(const std::string& machine_ref,
                     const std::string& measure_ref, const std::string& tau,
                     uint32_t depth) {
  Machine mach = machine_of(machine_ref);
  Measure m = measure_of(measure_ref);
  if (!mach || !m) return;
  CStr lo, hi;
  if (!ok(cmt_pushforward_bounds(mach.get(), m.get(), tau.c_str(), depth,
                                 &lo.p, &hi.p)))
    return;
  emit_line("INTERVAL lo=" + lo.str() + " hi=" + hi.str());
}

void cmd_avoider(const std::string& mu_ref, const std::string& nuprime_ref,
                 const std::string& x0, uint32_t depth,
                 const std::string& plan_path, uint32_t samples, uint64_t seed,
                 const std::string& threshold) {
  cmt_plan* raw = nullptr;
  if (!ok(cmt_plan_build(mu_ref.c_str(), nuprime_ref.c_str(), x0.c_str(),
                         depth, &raw)))
    return;
  Plan plan(raw);
  int pass = 0;
  CStr ledger;
  if (!ok(cmt_plan_verify(plan.get(), depth, &pass, &ledger.p))) return;
  emit(ledger.str());
  emit_line(std::string("VERIFY=") + (pass ? "pass" : "fail"));
  if (!pass) g_exit = 1;

  uint32_t cert_for_threshold = 0;
  for (const char* y0 : {"1/2", "1/4", "1/64"}) {
    int found = 0;
    uint32_t n = 0;
    CStr bound;
    uint32_t max_depth = depth > 16 ? depth * 4 : 64;
    if (!ok(cmt_plan_certificate(plan.get(), y0, max_depth, &found, &n,
                                 &bound.p)))
      return;
    if (!found) {
      emit_line(std::string("CERT y0=") + y0 + " result=notfound");
      emit_line("ERROR=no density decay along x0; is x0 a divergence witness?");
      g_exit = 1;
      continue;
    }
    emit_line(std::string("CERT y0=") + y0 + " n=" + std::to_string(n) +
              " bound=" + bound.str());
    if (threshold == y0) cert_for_threshold = n;
  }

  if (!plan_path.empty()) {
    CStr text;
    if (!ok(cmt_plan_text(plan.get(), &text.p))) return;
    std::ofstream f(plan_path);
    f << text.str();
    emit_line("PLAN_FILE=" + plan_path);
  }

  if (samples > 0 && g_exit == 0) {
    int spass = 0;
    CStr report;
    if (!ok(cmt_plan_trace_samples(plan.get(), seed, samples,
                                   threshold.c_str(), cert_for_threshold,
                                   /*fuel=*/96, &spass, &report.p)))
      return;
    emit(report.str());
    if (!spass) g_exit = 1;
  }
}

void cmd_trace(const std::string& plan_path, const std::string& x,
               uint64_t seed, bool x_random, uint32_t stages, uint32_t fuel) {
  std::ifstream f(plan_path);
  if (!f) {
    std::cerr << "ERROR=cannot open plan file " << plan_path << "\n";
    g_exit = 2;
    return;
  }
  std::stringstream ss;
  ss << f.rdbuf();
  cmt_plan* raw = nullptr;
  if (!ok(cmt_plan_load(ss.str().c_str(), &raw))) return;
  Plan plan(raw);
  Oracle omega;
  if (x_random) {
    cmt_oracle* o = nullptr;
    if (!ok(cmt_oracle_seeded(seed, 2 * fuel, &o))) return;
    omega = Oracle(o);
  } else {
    omega = oracle_of(x);
    if (!omega) return;
  }
  CStr lines;
  if (!ok(cmt_plan_trace(plan.get(), omega.get(), stages, fuel, &lines.p)))
    return;
  emit(lines.str());
}

void cmd_martingale(const std::string& nu_ref, const std::string& mu_ref,
                    const std::string& x, const std::string& threshold,
                    uint32_t depth) {
  Measure nu = measure_of(nu_ref), mu = measure_of(mu_ref);
  Oracle ox = oracle_of(x);
  if (!nu || !mu || !ox) return;
  int truncated = 0;
  CStr lines;
  if (!ok(cmt_martingale_trace(nu.get(), mu.get(), ox.get(), depth, &truncated,
                               &lines.p)))
    return;
  emit(lines.str());
  if (truncated) g_exit = 1;
  if (!threshold.empty()) {
    int found = 0;
    uint32_t n = 0;
    if (!ok(cmt_divergence_witness(nu.get(), mu.get(), ox.get(),
                                   threshold.c_str(), depth, &found, &n)))
      return;
    if (found) {
      emit_line("WITNESS n=" + std::to_string(n));
    } else {
      emit_line("WITNESS result=notfound");
      g_exit = 1;
    }
  }
}

void cmd_conditional(const std::string& mu_ref, const std::string& y,
                     const std::string& sigma) {
  cmt_product* raw = nullptr;
  if (!ok(cmt_product_parse(mu_ref.c_str(), &raw))) return;
  Product p(raw);
  CStr value;
  if (!ok(cmt_conditional_value(p.get(), y.c_str(), sigma.c_str(), &value.p)))
    return;
  emit_line("VALUE=" + value.str());
}

void cmd_slln(const std::string& machine_ref, const std::string& x,
              bool x_random, uint64_t seed, uint32_t n, uint32_t fuel) {
  Machine m = machine_of(machine_ref);
  if (!m) return;
  if (fuel == 0) fuel = 8 * n + 64;
  Oracle ox;
  if (x_random) {
    cmt_oracle* o = nullptr;
    if (!ok(cmt_oracle_seeded(seed, fuel, &o))) return;
    ox = Oracle(o);
  } else {
    ox = oracle_of(x);
    if (!ox) return;
  }
  int stalled = 0;
  CStr lines;
  if (!ok(cmt_slln_trace(m.get(), ox.get(), n, fuel, &stalled, &lines.p)))
    return;
  emit(lines.str());
}

void cmd_independence(const std::string& family_ref, uint32_t k) {
  cmt_family* raw = nullptr;
  if (!ok(cmt_family_parse(family_ref.c_str(), &raw))) return;
  Family fam(raw);
  int pass = 0;
  CStr witness;
  if (!ok(cmt_check_independence(fam.get(), k, &pass, &witness.p))) return;
  if (pass) {
    emit_line("RESULT=pass");
  } else {
    emit_line(witness.str());
    emit_line("RESULT=fail");
    g_exit = 1;
  }
}

void cmd_density(const std::string& mu_ref, const std::string& clopen,
                 const std::string& x, uint32_t n, uint32_t work_depth) {
  Measure mu = measure_of(mu_ref);
  Oracle ox = oracle_of(x);
  if (!mu || !ox) return;
  if (work_depth < n) work_depth = n;
  CStr lines;
  if (!ok(cmt_density_trace(mu.get(), clopen.c_str(), ox.get(), n, work_depth,
                            &lines.p)))
    return;
  emit(lines.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact computable-measure experiments on Cantor space"};
  app.require_subcommand(1);
  app.add_option("--out", g_out_path, "write the report to a file");
  app.add_option("--format", g_format, "raw or table")
      ->check(CLI::IsMember({"raw", "table"}));

  // additivity
  std::string add_measure;
  uint32_t add_depth = 12;
  auto* add = app.add_subcommand("additivity", "exact additivity check");
  add->add_option("measure", add_measure)->required();
  add->add_option("--depth", add_depth);
  add->callback([&] { cmd_additivity(add_measure, add_depth); });

  // pushforward
  std::string pf_machine, pf_measure, pf_tau;
  uint32_t pf_depth = 16;
  auto* pf = app.add_subcommand("pushforward", "pushforward mass enclosure");
  pf->add_option("machine", pf_machine)->required();
  pf->add_option("measure", pf_measure)->required();
  pf->add_option("tau", pf_tau)->required();
  pf->add_option("--depth", pf_depth);
  pf->callback([&] { cmd_pushforward(pf_machine, pf_measure, pf_tau, pf_depth); });

  // avoider
  std::string av_mu, av_nuprime, av_x0, av_threshold = "1/4";
  uint32_t av_depth = 8, av_samples = 0;
  uint64_t av_seed = 1;
  auto* av = app.add_subcommand(
      "avoider", "staged transport plan avoiding a designated point");
  av->add_option("mu", av_mu)->required();
  av->add_option("nuprime", av_nuprime)->required();
  av->add_option("x0", av_x0)->required();
  av->add_option("--depth", av_depth);
  av->add_option("--samples", av_samples);
  av->add_option("--seed", av_seed);
  av->add_option("--threshold", av_threshold);
  av->callback([&] {
    cmd_avoider(av_mu, av_nuprime, av_x0, av_depth, g_out_path, av_samples,
                av_seed, av_threshold);
    g_out_path.clear();  // the plan took the --out path; report goes to stdout
  });

  // trace
  std::string tr_plan, tr_x = "0";
  uint64_t tr_seed = 1;
  bool tr_random = false;
  uint32_t tr_stages = 4, tr_fuel = 96;
  auto* tr = app.add_subcommand("trace", "trace a point through plan stages");
  tr->add_option("--plan", tr_plan)->required();
  tr->add_option("--x", tr_x);
  tr->add_flag("--x-random", tr_random);
  tr->add_option("--seed", tr_seed);
  tr->add_option("--stages", tr_stages);
  tr->add_option("--fuel", tr_fuel);
  tr->callback([&] {
    cmd_trace(tr_plan, tr_x, tr_seed, tr_random, tr_stages, tr_fuel);
  });

  // martingale
  std::string mg_nu, mg_mu, mg_x, mg_threshold;
  uint32_t mg_depth = 20;
  auto* mg = app.add_subcommand("martingale", "capital trace nu/mu along x");
  mg->add_option("--nu", mg_nu)->required();
  mg->add_option("--mu", mg_mu)->required();
  mg->add_option("--x", mg_x)->required();
  mg->add_option("--threshold", mg_threshold);
  mg->add_option("--depth", mg_depth);
  mg->callback([&] {
    cmd_martingale(mg_nu, mg_mu, mg_x, mg_threshold, mg_depth);
  });

  // conditional
  std::string cd_mu, cd_y, cd_sigma;
  auto* cd = app.add_subcommand("conditional", "stage-n conditional value");
  cd->add_option("--mu", cd_mu)->required();
  cd->add_option("--y", cd_y)->required();
  cd->add_option("--sigma", cd_sigma)->required();
  cd->callback([&] { cmd_conditional(cd_mu, cd_y, cd_sigma); });

  // slln
  std::string sl_machine, sl_x = "01";
  bool sl_random = false;
  uint64_t sl_seed = 7;
  uint32_t sl_n = 100, sl_fuel = 0;
  auto* sl = app.add_subcommand("slln", "running means of extractor output");
  sl->add_option("--machine", sl_machine)->required();
  sl->add_option("--x", sl_x);
  sl->add_flag("--x-random", sl_random);
  sl->add_option("--seed", sl_seed);
  sl->add_option("-n,--n", sl_n);
  sl->add_option("--fuel", sl_fuel);
  sl->callback([&] {
    cmd_slln(sl_machine, sl_x, sl_random, sl_seed, sl_n, sl_fuel);
  });

  // independence
  std::string in_family;
  uint32_t in_k = 2;
  auto* ind = app.add_subcommand("independence", "sequence-set independence");
  ind->add_option("--family", in_family)->required();
  ind->add_option("-k,--k", in_k);
  ind->callback([&] { cmd_independence(in_family, in_k); });

  // density
  std::string dn_mu, dn_clopen, dn_x;
  uint32_t dn_n = 8, dn_work = 0;
  auto* dn = app.add_subcommand("density", "Lebesgue density ratios along x");
  dn->add_option("--mu", dn_mu)->required();
  dn->add_option("--clopen", dn_clopen)->required();
  dn->add_option("--x", dn_x)->required();
  dn->add_option("-n,--n", dn_n);
  dn->add_option("--work-depth", dn_work);
  dn->callback([&] { cmd_density(dn_mu, dn_clopen, dn_x, dn_n, dn_work); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  flush_report();
  return g_exit;
}
