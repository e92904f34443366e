#include "degensink/io.hpp"

#include "degensink/measures.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace degensink {

namespace {

using json = nlohmann::json;

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(num(v(k)));
  return a;
}

json mat_json(const Mat& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
  return a;
}

json mask_json(const BipartiteSupport& S) {
  json a = json::array();
  for (int i = 0; i < S.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < S.cols(); ++j) row.push_back(S(i, j));
    a.push_back(std::move(row));
  }
  return a;
}

Vec read_vec(const json& j, const char* name) {
  if (!j.is_array()) throw InvalidInput(std::string(name) + " must be an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  return v;
}

}  // namespace

Instance parse_instance_json(const std::string& text) {
  Instance inst;
  try {
    const json j = json::parse(text);
    if (!j.is_object() || !j.contains("R") || !j.contains("mu") || !j.contains("nu"))
      throw InvalidInput("instance JSON needs R, mu and nu");
    const json& R = j["R"];
    if (!R.is_array() || R.empty()) throw InvalidInput("R must be a nonempty array of rows");
    const size_t cols = R[0].is_array() ? R[0].size() : 0;
    inst.R.resize(static_cast<Eigen::Index>(R.size()), static_cast<Eigen::Index>(cols));
    for (size_t i = 0; i < R.size(); ++i) {
      if (!R[i].is_array() || R[i].size() != cols) throw InvalidInput("R rows differ in length");
      for (size_t k = 0; k < cols; ++k)
        inst.R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = R[i][k].get<double>();
    }
    inst.mu = read_vec(j["mu"], "mu");
    inst.nu = read_vec(j["nu"], "nu");
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("instance JSON: ") + e.what());
  }
  validate_instance(inst.R, inst.mu, inst.nu);
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance_json(ss.str());
}

std::string instance_to_json(const Instance& inst) {
  json j;
  j["R"] = mat_json(inst.R);
  j["mu"] = vec_json(inst.mu);
  j["nu"] = vec_json(inst.nu);
  return j.dump();
}

std::string report_to_json(const SolveReport& r) {
  json j;
  j["p_star"] = mat_json(r.p_star);
  j["q_star"] = mat_json(r.q_star);
  j["r_star"] = mat_json(r.r_star);
  j["r_bar_star"] = mat_json(r.r_bar_star);
  j["mu_star"] = vec_json(r.mu_star);
  j["nu_star"] = vec_json(r.nu_star);
  j["mu_g"] = vec_json(r.mu_g);
  j["nu_g"] = vec_json(r.nu_g);
  j["z_norm"] = num(r.z_norm);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["support"] = mask_json(r.support);
  j["classification"] =
      r.classification ? json::parse(classification_to_json(*r.classification)) : json(nullptr);
  return j.dump();
}

std::string classification_to_json(const ScalabilityClass& cls) {
  json j;
  j["tag"] = to_string(cls.tag);
  j["witness"] = cls.witness ? json(*cls.witness) : json(nullptr);
  return j.dump();
}

std::string mask_to_json(const BipartiteSupport& mask) { return mask_json(mask).dump(); }

std::string trace_to_json(const ProcedureTrace& trace) {
  json steps = json::array();
  for (const auto& s : trace.steps) {
    json zeroed = json::array();
    for (const auto& [i, k] : s.zeroed) zeroed.push_back({i, k});
    steps.push_back({{"rows", s.rows},
                     {"cols", s.cols},
                     {"chosen", s.chosen},
                     {"image", s.image},
                     {"theta", num(s.theta)},
                     {"zeroed", zeroed}});
  }
  json j;
  j["steps"] = steps;
  j["final_mask"] = mask_json(trace.final_mask);
  j["stationary_at"] = trace.stationary_at;
  return j.dump();
}

std::string gap_trace_csv(const SolveReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,gap\n";
  for (const auto& t : report.trace) {
    os << t.iteration << ",";
    if (std::isfinite(t.criterion)) os << t.criterion;
    os << "\n";
  }
  return os.str();
}

}  // namespace degensink
