#pragma once

// JSON formats for curves, divisors, fiber problems and reports.
//
// Curve:   {"type":"affine","slope":s,"intercept":c} | {"type":"logexp","a":a,"b":b}
//        | {"type":"max"|"min"|"sum","args":[...]} | {"type":"scale","k":k,"arg":...}
//        | {"type":"grid","ts":[...],"us":[...],"asym":[s-,b-,s+,b+]}
//        | {"type":"piecewise","breaks":[...],"pieces":[...]}
// Divisor: {"a0":r,"a1":r,"fibers":[{"p":int,"c":r},...],"green":<curve>}
// Fiber:   {"M":[[...]],"mult":[...],"p":int,"v":[...],"e":[...]}

#include <string>

#include <nlohmann/json.hpp>

#include "arakzar/fiber_config.hpp"
#include "arakzar/positivity_zariski.hpp"

namespace arakzar {

using Json = nlohmann::json;

constexpr int kReportSchema = 1;

/// Parses text; syntax errors become InputError "source:line:column: message".
Json parse_json_text(const std::string& text, const std::string& source = "<input>");
Json read_json_file(const std::string& path);

GreenCurve parse_curve(const Json& j, const std::string& where = "green");
Json curve_to_json(const GreenCurve& u);

ToricArithDivisor parse_divisor(const Json& j);
Json divisor_to_json(const ToricArithDivisor& d);

struct FiberProblem {
  FiberConfiguration cfg;
  VerticalDivisorData data;
};

FiberProblem parse_fiber_problem(const Json& j);
Json to_json(const PiNefResult& r, const FiberConfiguration& cfg);

Json to_json(const Interval& i);
Json to_json(const ZariskiReport& r);
Json to_json(const TheoremCheck& c);
Json to_json(const SectionCount& c);

/// +-inf and NaN have no JSON number form; they are written as the strings "inf", "-inf", "nan".
Json number(double x);

/// G(x) at n evenly spaced points of delta as [[x, G], ...].
Json g_samples(const OkounkovData& ok, int n = 101);

}  // namespace arakzar
