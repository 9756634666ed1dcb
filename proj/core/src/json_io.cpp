#include "arakzar/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "arakzar/errors.hpp"

namespace arakzar {

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    // Drop nlohmann's "[json.exception.parse_error.101] parse error at line x, column y: " prefix.
    if (auto pos = what.find(": "); pos != std::string::npos) what = what.substr(pos + 2);
    std::ostringstream msg;
    msg << source << ":" << line << ":" << col << ": malformed JSON: " << what;
    throw InputError(msg.str());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(where + ": missing field \"" + key + "\"");
  return *it;
}

double as_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw InputError(where + ": expected a finite number");
  return x;
}

long long as_integer(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (std::isfinite(x) && x == std::round(x) && std::abs(x) < 9e15) return static_cast<long long>(x);
  }
  throw InputError(where + ": expected an integer");
}

std::vector<double> as_numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<GreenCurve> parse_curves(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw InputError(where + ": expected a nonempty array of curves");
  std::vector<GreenCurve> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_curve(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

GreenCurve parse_curve(const Json& j, const std::string& where) {
  const Json& type = field(j, "type", where);
  if (!type.is_string()) throw InputError(where + ".type: expected a string");
  const std::string t = type.get<std::string>();
  try {
    if (t == "affine")
      return GreenCurve::affine(as_number(field(j, "slope", where), where + ".slope"),
                                as_number(field(j, "intercept", where), where + ".intercept"));
    if (t == "logexp")
      return GreenCurve::logexp(as_number(field(j, "a", where), where + ".a"), as_number(field(j, "b", where), where + ".b"));
    if (t == "max") return GreenCurve::max(parse_curves(field(j, "args", where), where + ".args"));
    if (t == "min") return GreenCurve::min(parse_curves(field(j, "args", where), where + ".args"));
    if (t == "sum") return GreenCurve::sum(parse_curves(field(j, "args", where), where + ".args"));
    if (t == "scale")
      return GreenCurve::scale(as_number(field(j, "k", where), where + ".k"), parse_curve(field(j, "arg", where), where + ".arg"));
    if (t == "grid") {
      const auto asym = as_numbers(field(j, "asym", where), where + ".asym");
      if (asym.size() != 4) throw InputError(where + ".asym: expected [s_minus, beta_minus, s_plus, beta_plus]");
      return GreenCurve::grid(as_numbers(field(j, "ts", where), where + ".ts"), as_numbers(field(j, "us", where), where + ".us"),
                              Asymptotics{asym[0], asym[1], asym[2], asym[3]});
    }
    if (t == "piecewise")
      return GreenCurve::piecewise(as_numbers(field(j, "breaks", where), where + ".breaks"),
                                   parse_curves(field(j, "pieces", where), where + ".pieces"));
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind(where, 0) == 0) throw;
    throw InputError(where + ": " + msg);
  }
  throw InputError(where + ".type: unknown curve type \"" + t + "\"");
}

Json curve_to_json(const GreenCurve& u) {
  using K = GreenCurve::Kind;
  Json j;
  auto children = [&u]() {
    Json arr = Json::array();
    for (const auto& c : u.children()) arr.push_back(curve_to_json(c));
    return arr;
  };
  switch (u.kind()) {
    case K::affine:
      j = {{"type", "affine"}, {"slope", u.param0()}, {"intercept", u.param1()}};
      break;
    case K::logexp:
      j = {{"type", "logexp"}, {"a", u.param0()}, {"b", u.param1()}};
      break;
    case K::max:
      j = {{"type", "max"}, {"args", children()}};
      break;
    case K::min:
      j = {{"type", "min"}, {"args", children()}};
      break;
    case K::sum:
      j = {{"type", "sum"}, {"args", children()}};
      break;
    case K::scale:
      j = {{"type", "scale"}, {"k", u.param0()}, {"arg", curve_to_json(u.children().front())}};
      break;
    case K::grid: {
      const auto& a = u.asymptotics();
      j = {{"type", "grid"},
           {"ts", u.knots()},
           {"us", u.samples()},
           {"asym", {a.slope_minus, a.intercept_minus, a.slope_plus, a.intercept_plus}}};
      break;
    }
    case K::piecewise:
      j = {{"type", "piecewise"}, {"breaks", u.knots()}, {"pieces", children()}};
      break;
  }
  return j;
}

ToricArithDivisor parse_divisor(const Json& j) {
  const std::string where = "divisor";
  if (!j.is_object()) throw InputError(where + ": expected an object");
  const double a0 = as_number(field(j, "a0", where), "a0");
  const double a1 = as_number(field(j, "a1", where), "a1");
  FiberMap fibers;
  if (auto it = j.find("fibers"); it != j.end()) {
    if (!it->is_array()) throw InputError("fibers: expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string w = "fibers[" + std::to_string(i) + "]";
      const long long p = as_integer(field((*it)[i], "p", w), w + ".p");
      if (!is_prime(p)) throw InputError(w + ".p: " + std::to_string(p) + " is not a prime");
      if (fibers.count(p)) throw InputError(w + ".p: prime " + std::to_string(p) + " listed twice");
      fibers[p] = as_number(field((*it)[i], "c", w), w + ".c");
    }
  }
  GreenCurve g = parse_curve(field(j, "green", where), "green");
  return ToricArithDivisor(a0, a1, std::move(fibers), std::move(g));
}

Json divisor_to_json(const ToricArithDivisor& d) {
  Json fibers = Json::array();
  for (const auto& [p, c] : d.fibers()) fibers.push_back({{"p", p}, {"c", c}});
  return {{"a0", d.a0()}, {"a1", d.a1()}, {"fibers", fibers}, {"green", curve_to_json(d.green())}};
}

namespace {

Eigen::VectorXd as_vector(const Json& j, const std::string& where) {
  const auto xs = as_numbers(j, where);
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v(static_cast<Eigen::Index>(i)) = xs[i];
  return v;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

}  // namespace

FiberProblem parse_fiber_problem(const Json& j) {
  const std::string where = "fiber";
  const Json& m = field(j, "M", where);
  if (!m.is_array() || m.empty()) throw InputError("M: expected a nonempty array of rows");
  const auto r = static_cast<Eigen::Index>(m.size());
  FiberProblem fp;
  fp.cfg.M.resize(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto row = as_numbers(m[static_cast<std::size_t>(i)], "M[" + std::to_string(i) + "]");
    if (static_cast<Eigen::Index>(row.size()) != r) throw InputError("M: matrix must be square");
    for (Eigen::Index k = 0; k < r; ++k) fp.cfg.M(i, k) = row[static_cast<std::size_t>(k)];
  }
  fp.cfg.mult = as_vector(field(j, "mult", where), "mult");
  if (auto it = j.find("p"); it != j.end()) {
    fp.cfg.p = as_integer(*it, "p");
    if (!is_prime(fp.cfg.p)) throw InputError("p: " + std::to_string(fp.cfg.p) + " is not a prime");
  }
  fp.data.v = as_vector(field(j, "v", where), "v");
  fp.data.e = as_vector(field(j, "e", where), "e");
  if (fp.cfg.mult.size() != r || fp.data.v.size() != r || fp.data.e.size() != r)
    throw InputError("mult, v and e must have one entry per row of M");
  return fp;
}

Json to_json(const PiNefResult& r, const FiberConfiguration& cfg) {
  return {{"schema", kReportSchema},
          {"q", vector_json(r.q)},
          {"n", vector_json(r.n)},
          {"slack", vector_json(r.slack)},
          {"slack_log_p", vector_json(r.slack * cfg.logp())},
          {"iterations", r.iterations}};
}

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

Json to_json(const Interval& i) {
  if (i.empty) return nullptr;
  return Json::array({i.lo, i.hi});
}

Json to_json(const ZariskiReport& r) {
  Json pieces = Json::array();
  for (std::size_t i = 0; i < r.N_pieces.size(); ++i)
    pieces.push_back({{"label", r.N_pieces[i].label},
                      {"divisor", divisor_to_json(r.N_pieces[i].divisor)},
                      {"positive_current", r.N_pieces[i].positive_current},
                      {"deg_P_dot_piece", r.orthogonality[i]}});
  const auto& f = r.flags;
  return {{"P", divisor_to_json(r.P)},
          {"N_pieces", pieces},
          {"theta", to_json(r.theta)},
          {"contact_points", {number(r.t_minus), number(r.t_plus)}},
          {"orthogonality", r.orthogonality},
          {"gram_labels", r.gram_labels},
          {"gram", r.gram},
          {"gram_eigenvalues", r.gram_eigenvalues},
          {"deg_P_dot_N", r.p_dot_n},
          {"deg_N_self", r.n_self},
          {"vol_P", r.vol_P},
          {"vol_D", r.vol_D},
          {"flags",
           {{"nef_D", f.nef_D},
            {"pseudo_effective_D", f.pseudo_effective_D},
            {"big_D", f.big_D},
            {"relatively_nef_D", f.relatively_nef_D},
            {"consistent_thm_4_3", f.consistent_thm_4_3},
            {"consistent_cor_4_4", f.consistent_cor_4_4},
            {"consistent_thm_2_1", f.consistent_thm_2_1},
            {"consistent_thm_5_1", f.consistent_thm_5_1}}}};
}

Json to_json(const TheoremCheck& c) {
  Json j = {{"deg_self", c.deg_self},
            {"vol", c.vol},
            {"vol_chi", c.vol_chi},
            {"nef", c.nef},
            {"relatively_nef", c.relatively_nef},
            {"pseudo_effective", c.pseudo_effective},
            {"big", c.big},
            {"thm_2_1", c.thm_2_1},
            {"thm_4_3", c.thm_4_3},
            {"cor_4_4", c.cor_4_4},
            {"thm_5_1", c.thm_5_1}};
  j["deg_N_self"] = c.n_self ? Json(*c.n_self) : Json(nullptr);
  j["deg_P_dot_N"] = c.p_dot_n ? Json(*c.p_dot_n) : Json(nullptr);
  return j;
}

Json to_json(const SectionCount& c) {
  Json j = {{"log_count_lower", c.log_count_lower}, {"log_count_upper", c.log_count_upper}};
  j["exact"] = c.exact ? Json(*c.exact) : Json(nullptr);
  return j;
}

Json g_samples(const OkounkovData& ok, int n) {
  Json arr = Json::array();
  if (ok.delta().empty) return arr;
  const double lo = ok.delta().lo;
  const double hi = ok.delta().hi;
  if (hi == lo || n < 2) {
    arr.push_back({lo, ok.G(lo)});
    return arr;
  }
  for (int i = 0; i < n; ++i) {
    const double x = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
    arr.push_back({x, ok.G(x)});
  }
  return arr;
}

}  // namespace arakzar
