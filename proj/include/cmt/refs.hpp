#pragma once

#include <memory>
#include <string>

#include "cmt/extractors.hpp"
#include "cmt/machine.hpp"
#include "cmt/measure.hpp"
#include "cmt/transport.hpp"

namespace cmt {

// Textual references for measures, machines, points, clopen sets and
// families. Grammar (whitespace separated, prefix notation):
//
//   measure   := FAIR
//              | BERNOULLI p/q
//              | DIRAC <pattern>            point = pattern repeated forever
//              | MIX [k] w1 m1 ... wk mk    k optional; without it, pairs are
//                                           read while a rational follows
//              | SCALE p/q measure
//              | RESTRICT measure clopen
//              | SUM k m1 ... mk
//   clopen    := [ w1 w2 ... ]              generator words, e for the empty word
//   family    := { clopen clopen ... }
//   strategy  := ( h:i h:i ... )            history word : input index
//   machine   := ID | VN | TAIL | PROJ_EVEN | PROJ_ODD
//              | CDFINV measure
//              | GRAPH machine
//              | COMPOSE machine machine
//              | SELECT strategy
//              | SEQSET family
//              | TRANSPORT <plan-file>
//
// A measure file may carry a leading "MEASURE <label>" line; the parser
// accepts either form.

CylinderMeasure parse_measure(const std::string& text);
ProductCylinderMeasure parse_product_measure(const std::string& text);
MonotoneMachine parse_machine(const std::string& text);
ClopenSet parse_clopen(const std::string& text);
SequenceSetFamily parse_family(const std::string& text);
// pattern of 0/1 characters, repeated forever; "e" is rejected.
PointOracle parse_point(const std::string& text);

std::string clopen_str(const ClopenSet& c);

// Plan files: header lines (MU / NUPRIME / X0 / STAGES) followed by the
// per-stage MOVE lines. Loading rebuilds the plan from the instance and
// verifies the recorded moves against the rebuilt ones.
std::string plan_to_text(const TransportPlan& plan, const std::string& mu_ref,
                         const std::string& nu_prime_ref,
                         const std::string& x0_ref);
std::shared_ptr<TransportPlan> plan_from_text(const std::string& text);

std::string interval_str(const RatInterval& iv);

}  // namespace cmt
