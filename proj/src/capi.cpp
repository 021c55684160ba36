#include "cmt.h"

#include <cstdlib>
#include <cstring>
#include <random>
#include <sstream>

#include "cmt/refs.hpp"

using namespace cmt;

struct cmt_measure {
  CylinderMeasure m;
};
struct cmt_product {
  ProductCylinderMeasure p;
};
struct cmt_machine {
  MonotoneMachine m;
};
struct cmt_oracle {
  PointOracle x;
};
struct cmt_plan {
  std::shared_ptr<TransportPlan> plan;
  std::string mu_ref, nuprime_ref, x0_ref;
};
struct cmt_family {
  SequenceSetFamily fam;
};

namespace {

thread_local std::string g_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
cmt_status guarded(Fn&& fn) {
  try {
    fn();
    return CMT_OK;
  } catch (const BadInput& e) {
    g_error = e.what();
    return CMT_BAD_INPUT;
  } catch (const std::exception& e) {
    g_error = e.what();
    return CMT_ERROR;
  }
}

BinWord word_arg(const char* w) {
  if (w == nullptr) throw BadInput("null word");
  return BinWord(std::string_view(w));
}

// Deterministic sample stream: one engine, bits then the y numerator, in a
// fixed draw order per sample.
std::vector<AvoidanceSample> seeded_samples(uint64_t seed, uint32_t count,
                                            const Rat& y0_min) {
  if (y0_min <= 0 || y0_min >= 1)
    throw BadInput("sample threshold must be in (0,1)");
  const long kPrec = 20;  // y0 = k / 2^20
  // Smallest admissible numerator: ceil(y0_min * 2^20).
  Rat scaled = y0_min * rat_pow2(kPrec);
  mpz_class lo_z;
  mpz_cdiv_q(lo_z.get_mpz_t(), scaled.get_num().get_mpz_t(),
             scaled.get_den().get_mpz_t());
  unsigned long lo = lo_z.get_ui();
  unsigned long hi = (1ul << kPrec) - 1;  // y0 stays strictly below 1
  if (lo > hi) throw BadInput("sample threshold leaves no dyadic room");
  std::mt19937_64 rng(seed);
  std::vector<AvoidanceSample> out;
  out.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    BinWord head;
    for (int j = 0; j < 32; ++j) head.push_back(int(rng() & 1));
    unsigned long k = lo + rng() % (hi - lo + 1);
    Rat y0 = Rat((unsigned long)k) / rat_pow2(kPrec);
    out.push_back({PointOracle::dyadic(head), y0, "i=" + std::to_string(i)});
  }
  return out;
}

}  // namespace

extern "C" {

const char* cmt_last_error(void) { return g_error.c_str(); }

void cmt_string_free(char* s) { std::free(s); }

cmt_status cmt_measure_parse(const char* ref, cmt_measure** out) {
  return guarded([&] {
    if (!ref || !out) throw BadInput("null argument");
    *out = new cmt_measure{parse_measure(ref)};
  });
}

void cmt_measure_free(cmt_measure* m) { delete m; }

cmt_status cmt_measure_label(const cmt_measure* m, char** label) {
  return guarded([&] { *label = dup_string(m->m.label()); });
}

cmt_status cmt_measure_eval(const cmt_measure* m, const char* word,
                            char** value) {
  return guarded([&] { *value = dup_string(rat_str(m->m(word_arg(word)))); });
}

cmt_status cmt_check_additivity(const cmt_measure* m, uint32_t depth,
                                int* pass, char** report) {
  return guarded([&] {
    AdditivityReport rep = check_additivity(m->m, depth);
    *pass = rep.pass ? 1 : 0;
    std::ostringstream out;
    for (const auto& w : rep.violations) {
      out << "VIOLATION node=" << w.display()
          << " parent=" << rat_str(m->m(w))
          << " children_sum=" << rat_str(m->m(w.child(0)) + m->m(w.child(1)))
          << "\n";
    }
    *report = dup_string(out.str());
  });
}

cmt_status cmt_dominates(const cmt_measure* mu, const cmt_measure* nu,
                         uint32_t depth, int* pass, char** failed_at) {
  return guarded([&] {
    DominationReport rep = dominates(mu->m, nu->m, depth);
    *pass = rep.pass ? 1 : 0;
    *failed_at = dup_string(rep.failed_at ? rep.failed_at->display() : "");
  });
}

cmt_status cmt_oracle_pattern(const char* pattern, cmt_oracle** out) {
  return guarded([&] {
    if (!pattern || !out) throw BadInput("null argument");
    *out = new cmt_oracle{parse_point(pattern)};
  });
}

cmt_status cmt_oracle_seeded(uint64_t seed, uint32_t precision,
                             cmt_oracle** out) {
  return guarded([&] {
    std::mt19937_64 rng(seed);
    BinWord head;
    for (uint32_t i = 0; i < precision; ++i) head.push_back(int(rng() & 1));
    *out = new cmt_oracle{PointOracle::dyadic(head)};
  });
}

void cmt_oracle_free(cmt_oracle* o) { delete o; }

cmt_status cmt_machine_parse(const char* ref, cmt_machine** out) {
  return guarded([&] {
    if (!ref || !out) throw BadInput("null argument");
    *out = new cmt_machine{parse_machine(ref)};
  });
}

void cmt_machine_free(cmt_machine* m) { delete m; }

cmt_status cmt_machine_step(const cmt_machine* m, const char* input,
                            char** output) {
  return guarded([&] {
    *output = dup_string(m->m.step(word_arg(input)).display());
  });
}

cmt_status cmt_machine_check_monotone(const cmt_machine* m, uint32_t depth,
                                      int* pass, char** counterexample) {
  return guarded([&] {
    MonotoneReport rep = check_monotone(m->m, depth);
    *pass = rep.pass ? 1 : 0;
    *counterexample = dup_string(
        rep.counterexample ? rep.counterexample->first.display() + " " +
                                 rep.counterexample->second.display()
                           : "");
  });
}

cmt_status cmt_pushforward_bounds(const cmt_machine* m, const cmt_measure* mu,
                                  const char* tau, uint32_t depth, char** lo,
                                  char** hi) {
  return guarded([&] {
    RatInterval iv = pushforward_bounds(m->m, mu->m, word_arg(tau), depth);
    *lo = dup_string(rat_str(iv.lo()));
    *hi = dup_string(rat_str(iv.hi()));
  });
}

cmt_status cmt_preimage_search(const cmt_machine* m, const cmt_measure* mu,
                               const char* tau, uint32_t depth,
                               char** report) {
  return guarded([&] {
    PreimageReport rep = preimage_search(m->m, mu->m, word_arg(tau), depth);
    std::ostringstream out;
    out << "IN";
    for (const auto& w : rep.decided_in) out << " " << w.display();
    out << "\nOUT";
    for (const auto& w : rep.decided_out) out << " " << w.display();
    out << "\nMASS in=" << rat_str(rep.in_mass)
        << " out=" << rat_str(rep.out_mass)
        << " undecided=" << rat_str(rep.undecided_mass) << "\n";
    *report = dup_string(out.str());
  });
}

cmt_status cmt_martingale_trace(const cmt_measure* nu, const cmt_measure* mu,
                                const cmt_oracle* x, uint32_t n,
                                int* truncated, char** lines) {
  return guarded([&] {
    CapitalTrace t = capital_trace(Martingale{nu->m, mu->m}, x->x, n);
    std::ostringstream out;
    for (size_t k = 0; k < t.values.size(); ++k)
      out << k << " " << rat_str(t.values[k]) << "\n";
    if (t.zero_denominator_at)
      out << "ZERODENOM depth=" << *t.zero_denominator_at << "\n";
    *truncated = t.zero_denominator_at ? 1 : 0;
    *lines = dup_string(out.str());
  });
}

cmt_status cmt_divergence_witness(const cmt_measure* nu, const cmt_measure* mu,
                                  const cmt_oracle* x, const char* threshold,
                                  uint32_t max_depth, int* found,
                                  uint32_t* depth) {
  return guarded([&] {
    auto r = divergence_witness(Martingale{nu->m, mu->m}, x->x,
                                rat_parse(threshold), max_depth);
    *found = r ? 1 : 0;
    *depth = r ? uint32_t(*r) : 0;
  });
}

cmt_status cmt_product_parse(const char* ref, cmt_product** out) {
  return guarded([&] {
    if (!ref || !out) throw BadInput("null argument");
    *out = new cmt_product{parse_product_measure(ref)};
  });
}

void cmt_product_free(cmt_product* p) { delete p; }

cmt_status cmt_conditional_value(const cmt_product* p, const char* cond_prefix,
                                 const char* sigma, char** value) {
  return guarded([&] {
    Rat v = conditional_value(ConditionalApprox{p->p, word_arg(cond_prefix)},
                              word_arg(sigma));
    *value = dup_string(rat_str(v));
  });
}

cmt_status cmt_density_trace(const cmt_measure* m, const char* clopen_ref,
                             const cmt_oracle* x, uint32_t n,
                             uint32_t working_depth, char** lines) {
  return guarded([&] {
    ClosedSetApprox c = ClosedSetApprox::clopen(parse_clopen(clopen_ref));
    auto entries = lebesgue_density_trace(m->m, c, x->x, n, working_depth);
    std::ostringstream out;
    for (const auto& e : entries)
      out << e.depth << " lo=" << rat_str(e.ratio.lo())
          << " hi=" << rat_str(e.ratio.hi()) << " exact=" << (e.exact ? 1 : 0)
          << "\n";
    *lines = dup_string(out.str());
  });
}

cmt_status cmt_plan_build(const char* mu_ref, const char* nuprime_ref,
                          const char* x0_pattern, uint32_t depth,
                          cmt_plan** out) {
  return guarded([&] {
    WitnessInstance inst =
        make_instance(parse_measure(mu_ref), parse_measure(nuprime_ref),
                      parse_point(x0_pattern));
    *out = new cmt_plan{std::make_shared<TransportPlan>(inst, depth), mu_ref,
                        nuprime_ref, x0_pattern};
  });
}

cmt_status cmt_plan_load(const char* text, cmt_plan** out) {
  return guarded([&] {
    auto plan = plan_from_text(text);
    // Keep the instance references for re-serialization.
    std::istringstream in(text);
    std::string line, mu, nuprime, x0;
    while (std::getline(in, line)) {
      if (line.rfind("MU ", 0) == 0) mu = line.substr(3);
      if (line.rfind("NUPRIME ", 0) == 0) nuprime = line.substr(8);
      if (line.rfind("X0 ", 0) == 0) x0 = line.substr(3);
    }
    *out = new cmt_plan{plan, mu, nuprime, x0};
  });
}

void cmt_plan_free(cmt_plan* p) { delete p; }

cmt_status cmt_plan_text(const cmt_plan* p, char** text) {
  return guarded([&] {
    *text = dup_string(
        plan_to_text(*p->plan, p->mu_ref, p->nuprime_ref, p->x0_ref));
  });
}

cmt_status cmt_plan_verify(const cmt_plan* p, uint32_t depth, int* pass,
                           char** ledger) {
  return guarded([&] {
    PushforwardReport rep = verify_pushforward(*p->plan, depth);
    *pass = rep.pass ? 1 : 0;
    std::ostringstream out;
    for (const auto& row : rep.rows)
      out << "PUSHFORWARD sigma=" << row.sigma.display()
          << " ledger=" << rat_str(row.ledger) << " mu=" << rat_str(row.mu)
          << " ok=" << (row.ok ? 1 : 0) << "\n";
    *ledger = dup_string(out.str());
  });
}

cmt_status cmt_plan_certificate(const cmt_plan* p, const char* y0,
                                uint32_t max_depth, int* found,
                                uint32_t* depth, char** bound) {
  return guarded([&] {
    auto cert =
        avoidance_certificate(p->plan->instance(), rat_parse(y0), max_depth);
    *found = cert ? 1 : 0;
    *depth = cert ? uint32_t(cert->depth) : 0;
    *bound = dup_string(cert ? rat_str(cert->bound) : "");
  });
}

cmt_status cmt_plan_trace(const cmt_plan* p, const cmt_oracle* omega,
                          uint32_t stages, uint32_t fuel, char** lines) {
  return guarded([&] {
    TracedPoint t = trace_point(*p->plan, omega->x, stages, fuel);
    std::ostringstream out;
    for (const auto& rec : t.history)
      out << "STAGE " << rec.stage << " col=" << rec.column.display()
          << " y=" << rec.y.str() << "\n";
    if (t.stalled) out << "STALLED stage=" << t.stalled_at << "\n";
    *lines = dup_string(out.str());
  });
}

cmt_status cmt_plan_trace_samples(cmt_plan* p, uint64_t seed, uint32_t count,
                                  const char* y0_min, uint32_t cert_depth,
                                  uint32_t fuel, int* pass, char** report) {
  return guarded([&] {
    auto samples = seeded_samples(seed, count, rat_parse(y0_min));
    AvoidanceRunReport rep =
        check_avoidance_empirical(*p->plan, samples, cert_depth, fuel);
    *pass = rep.pass ? 1 : 0;
    std::ostringstream out;
    out << "SAMPLES=" << count << " DEVIATED=" << rep.deviated
        << " STALLED=" << rep.stalled.size() << " FAILED=" << rep.failed.size()
        << "\n";
    for (const auto& s : rep.stalled) out << "STALLED sample " << s << "\n";
    for (const auto& s : rep.failed) out << "FAILED sample " << s << "\n";
    *report = dup_string(out.str());
  });
}

cmt_status cmt_family_parse(const char* ref, cmt_family** out) {
  return guarded([&] {
    if (!ref || !out) throw BadInput("null argument");
    *out = new cmt_family{parse_family(ref)};
  });
}

void cmt_family_free(cmt_family* f) { delete f; }

cmt_status cmt_check_independence(const cmt_family* f, uint32_t k, int* pass,
                                  char** witness) {
  return guarded([&] {
    auto w = check_independence(f->fam, k);
    *pass = w ? 0 : 1;
    if (!w) {
      *witness = dup_string("");
      return;
    }
    std::ostringstream out;
    out << "WITNESS sets=";
    for (size_t i = 0; i < w->subfamily.size(); ++i)
      out << (i ? "," : "") << w->subfamily[i];
    out << " intersection=" << rat_str(w->intersection_mass)
        << " product=" << rat_str(w->product_mass);
    *witness = dup_string(out.str());
  });
}

cmt_status cmt_slln_trace(const cmt_machine* m, const cmt_oracle* x,
                          uint32_t n, uint32_t fuel, int* stalled,
                          char** lines) {
  return guarded([&] {
    SllnTrace t = slln_trace(m->m, x->x, n, fuel);
    std::ostringstream out;
    for (size_t k = 0; k < t.means.size(); ++k)
      out << (k + 1) << " " << rat_str(t.means[k]) << "\n";
    if (t.stalled) out << "STALLED after=" << t.produced << "\n";
    *stalled = t.stalled ? 1 : 0;
    *lines = dup_string(out.str());
  });
}

}  // extern "C"
